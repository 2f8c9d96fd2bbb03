"""B-spline / NURBS kernels: knot vectors, basis evaluation, derivatives,
knot insertion and tensor-product spaces.

Conventions used throughout the package:

* parametric domains are [0, 1] and knot vectors are p-open,
* basis indices are 0-based,
* evaluation at t = 1 uses the left-limit convention, so the last basis
  function attains 1 there,
* 0/0 is defined as 0 in the recursion.
"""

import numpy as np

from .errors import SplineError

__all__ = [
    "KnotVector",
    "make_open_knot_vector",
    "eval_basis",
    "eval_deriv",
    "eval_nurbs",
    "ders_basis",
    "nurbs_ders_basis",
    "insert_knot",
    "TensorSplineSpace",
    "BasisEval",
    "gauss_points",
]


class KnotVector:
    """A p-open knot vector on [0, 1].

    ``n = len(values) - p - 1`` basis functions. Interior multiplicities up
    to p+1 are representable (a p+1 multiplicity encodes a C^-1 break used
    during curve splitting); analysis spaces restrict to multiplicity <= p.
    """

    __slots__ = ("values", "p", "n")

    def __init__(self, values, p):
        values = np.asarray(values, dtype=float)
        if p < 0:
            raise SplineError("degree must be nonnegative", tag="invalid-degree")
        if values.ndim != 1 or len(values) < 2 * (p + 1):
            raise SplineError("too few knots for degree %d" % p, tag="invalid-knots")
        if np.any(np.diff(values) < 0):
            raise SplineError("knots must be non-decreasing", tag="invalid-knots")
        if not (np.all(values[: p + 1] == values[0]) and np.all(values[-p - 1 :] == values[-1])):
            raise SplineError("knot vector is not p-open", tag="invalid-knots")
        if values[0] != 0.0 or values[-1] != 1.0:
            raise SplineError("knot vectors are normalized to [0, 1]", tag="invalid-knots")
        values = values.copy()
        values.flags.writeable = False
        self.values = values
        self.p = p
        self.n = len(values) - p - 1
        for t, m in zip(*self.interior_multiplicities()):
            if m > p + 1:
                raise SplineError(
                    "interior knot %g has multiplicity %d > p+1" % (t, m),
                    tag="invalid-multiplicity",
                )

    def __repr__(self):
        return f"KnotVector(p={self.p}, n={self.n}, values={np.array2string(self.values, precision=4)})"

    def __eq__(self, other):
        return (
            isinstance(other, KnotVector)
            and self.p == other.p
            and len(self.values) == len(other.values)
            and np.array_equal(self.values, other.values)
        )

    def interior_multiplicities(self):
        """Distinct interior knots and their multiplicities."""
        interior = self.values[self.p + 1 : -self.p - 1]
        if len(interior) == 0:
            return np.empty(0), np.empty(0, dtype=int)
        uniq, counts = np.unique(interior, return_counts=True)
        return uniq, counts

    def breakpoints(self):
        return np.unique(self.values)

    def spans(self):
        """Nonempty spans as an array of (start index, a, b) rows."""
        out = []
        for k in range(self.p, self.n):
            a, b = self.values[k], self.values[k + 1]
            if b > a:
                out.append((k, a, b))
        return out

    def span_index(self, t):
        """Index k with values[k] <= t < values[k+1] (left limit at t=1)."""
        k = int(np.searchsorted(self.values, t, side="right")) - 1
        return min(max(k, self.p), self.n - 1)

    def multiplicity(self, t, tol=1e-12):
        return int(np.sum(np.abs(self.values - t) <= tol))

    def greville(self):
        """Greville abscissae g_i = mean of p consecutive knots."""
        if self.p == 0:
            return 0.5 * (self.values[:-1] + self.values[1:])
        return np.array(
            [self.values[i + 1 : i + self.p + 1].mean() for i in range(self.n)]
        )

    def mirrored(self):
        """Knot vector of the reversed parametrization t -> 1-t."""
        return KnotVector(1.0 - self.values[::-1], self.p)

    def regularity(self):
        """Global smoothness p - max interior multiplicity (p-1 if none)."""
        _, counts = self.interior_multiplicities()
        if len(counts) == 0:
            return self.p - 1
        return self.p - int(counts.max())


def make_open_knot_vector(p, segments, r):
    """Uniform p-open knot vector with ``segments`` spans and regularity r.

    Interior breakpoints k/segments carry multiplicity p - r, giving
    n = segments*(p-r) + r + 1 basis functions.
    """
    if not (0 <= r <= p - 1):
        raise SplineError("regularity must satisfy 0 <= r <= p-1", tag="invalid-regularity")
    if segments < 1:
        raise SplineError("segments must be >= 1", tag="invalid-segments")
    mult = p - r
    interior = np.repeat(np.arange(1, segments) / segments, mult)
    values = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
    return KnotVector(values, p)


def _basis_value(values, p, i, t):
    """Cox-DeBoor recursion for a single B-spline value (reference path)."""
    if p == 0:
        if values[i] <= t < values[i + 1]:
            return 1.0
        # left-limit convention at the right end
        if t == values[-1] and values[i] < t <= values[i + 1]:
            return 1.0
        return 0.0
    left = 0.0
    den = values[i + p] - values[i]
    if den > 0.0:
        left = (t - values[i]) / den * _basis_value(values, p - 1, i, t)
    right = 0.0
    den = values[i + p + 1] - values[i + 1]
    if den > 0.0:
        right = (values[i + p + 1] - t) / den * _basis_value(values, p - 1, i + 1, t)
    return left + right


def eval_basis(kv, i, t):
    """Value of the i-th (0-based) B-spline of ``kv`` at t."""
    if not 0 <= i < kv.n:
        raise SplineError("basis index %d out of range" % i, tag="invalid-index")
    return _basis_value(kv.values, kv.p, i, float(t))


def _deriv_value(values, p, i, t, order):
    if order == 0:
        return _basis_value(values, p, i, t)
    n = len(values) - p - 1
    out = 0.0
    den = values[i + p] - values[i]
    if den > 0.0:
        out += p / den * _deriv_value(values, p - 1, i, t, order - 1)
    den = values[i + p + 1] - values[i + 1]
    # B_{n+1,p-1} := 0 boundary convention
    if den > 0.0 and i + 1 <= n:
        out -= p / den * _deriv_value(values, p - 1, i + 1, t, order - 1)
    return out


def eval_deriv(kv, i, t, order):
    """order-th derivative (order in {1, 2}) of the i-th B-spline at t."""
    if not 0 <= i < kv.n:
        raise SplineError("basis index %d out of range" % i, tag="invalid-index")
    if order > kv.p:
        raise SplineError("derivative order %d > degree" % order, tag="unsupported-order")
    return _deriv_value(kv.values, kv.p, i, float(t), order)


def ders_basis(kv, t, nders):
    """All nonzero B-splines and derivatives at t.

    Returns (first_index, D) where D[k, j] is the k-th derivative of basis
    function first_index + j, k = 0..nders, j = 0..p.  Standard triangular
    algorithm; this is the fast path used by assembly.
    """
    p = kv.p
    U = kv.values
    span = kv.span_index(t)
    ndu = np.zeros((p + 1, p + 1))
    ndu[0, 0] = 1.0
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    for j in range(1, p + 1):
        left[j] = t - U[span + 1 - j]
        right[j] = U[span + j] - t
        saved = 0.0
        for rr in range(j):
            ndu[j, rr] = right[rr + 1] + left[j - rr]
            temp = ndu[rr, j - 1] / ndu[j, rr] if ndu[j, rr] != 0.0 else 0.0
            ndu[rr, j] = saved + right[rr + 1] * temp
            saved = left[j - rr] * temp
        ndu[j, j] = saved
    ders = np.zeros((nders + 1, p + 1))
    ders[0, :] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for rr in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, nders + 1):
            d = 0.0
            rk = rr - k
            pk = p - k
            if rr >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk] if ndu[pk + 1, rk] != 0.0 else 0.0
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if rr - 1 <= pk else p - rr
            for j in range(j1, j2 + 1):
                if ndu[pk + 1, rk + j] != 0.0:
                    a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                else:
                    a[s2, j] = 0.0
                d += a[s2, j] * ndu[rk + j, pk]
            if rr <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, rr] if ndu[pk + 1, rr] != 0.0 else 0.0
                d += a[s2, k] * ndu[rr, pk]
            ders[k, rr] = d
            s1, s2 = s2, s1
    rfac = 1.0
    for k in range(1, nders + 1):
        rfac *= p - k + 1
        ders[k, :] *= rfac
    return span - p, ders


def nurbs_ders_basis(kv, weights, t, nders):
    """Rational counterpart of :func:`ders_basis` for weights w_i > 0.

    N_i = w_i B_i / W with W = sum_j w_j B_j; derivatives by the quotient
    rule (exact, needed at second order for the H2 bilinear form).
    """
    weights = np.asarray(weights, dtype=float)
    if np.any(weights <= 0.0):
        raise SplineError("weights must be strictly positive", tag="invalid-weights")
    first, D = ders_basis(kv, t, nders)
    w_act = weights[first : first + kv.p + 1]
    num = D * w_act[None, :]           # derivatives of w_i B_i
    Wd = num.sum(axis=1)               # derivatives of the weight function
    R = np.zeros_like(D)
    R[0] = num[0] / Wd[0]
    if nders >= 1:
        R[1] = (num[1] - R[0] * Wd[1]) / Wd[0]
    if nders >= 2:
        R[2] = (num[2] - 2.0 * R[1] * Wd[1] - R[0] * Wd[2]) / Wd[0]
    return first, R


def eval_nurbs(kv, weights, i, t, order=0):
    """Value/derivative of the i-th univariate NURBS basis function."""
    if not 0 <= i < kv.n:
        raise SplineError("basis index %d out of range" % i, tag="invalid-index")
    first, R = nurbs_ders_basis(kv, weights, t, max(order, 0))
    j = i - first
    if not 0 <= j <= kv.p:
        return 0.0
    return R[order, j]


def insert_knot(kv, ctrl, t, times=1):
    """Boehm knot insertion, geometry preserving.

    ``ctrl`` is an (n, d) control array (d arbitrary; pass homogeneous
    coordinates for rational curves).  Returns (new_kv, new_ctrl).
    """
    if not 0.0 < t < 1.0:
        raise SplineError("insertion parameter must lie in (0, 1)", tag="invalid-parameter")
    ctrl = np.asarray(ctrl, dtype=float)
    if ctrl.shape[0] != kv.n:
        raise SplineError("control count does not match basis count", tag="invalid-control")
    p = kv.p
    for _ in range(times):
        if kv.multiplicity(t) + 1 > p + 1:
            raise SplineError(
                "multiplicity at %g would exceed p+1" % t, tag="invalid-multiplicity"
            )
        U = kv.values
        k = kv.span_index(t)
        new_ctrl = np.empty((ctrl.shape[0] + 1, ctrl.shape[1]))
        new_ctrl[: k - p + 1] = ctrl[: k - p + 1]
        new_ctrl[k + 1 :] = ctrl[k:]
        for i in range(k - p + 1, k + 1):
            den = U[i + p] - U[i]
            a = (t - U[i]) / den if den > 0.0 else 0.0
            new_ctrl[i] = a * ctrl[i] + (1.0 - a) * ctrl[i - 1]
        kv = KnotVector(np.insert(U, k + 1, t), p)
        ctrl = new_ctrl
    return kv, ctrl


class BasisEval:
    """Active bivariate functions at one parametric point.

    ``indices`` holds (i, j) pairs; ``values``, ``grads`` and ``hessians``
    are parametric (per active function).
    """

    __slots__ = ("point", "indices", "values", "grads", "hessians")

    def __init__(self, point, indices, values, grads, hessians):
        self.point = point
        self.indices = indices
        self.values = values
        self.grads = grads
        self.hessians = hessians


class TensorSplineSpace:
    """Bivariate tensor space kv_zeta x kv_xi with optional NURBS weights.

    For scaled-boundary use the weight function depends on zeta only;
    pass a weight vector of length n1 (or a full (n1, n2) table whose
    columns are constant along xi).
    """

    def __init__(self, kv_zeta, kv_xi, weights=None):
        self.kv_zeta = kv_zeta
        self.kv_xi = kv_xi
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.ndim == 2:
                if weights.shape != (kv_zeta.n, kv_xi.n):
                    raise SplineError("weight table shape mismatch", tag="invalid-weights")
                if not np.allclose(weights, weights[:, :1], rtol=0.0, atol=1e-14):
                    raise SplineError(
                        "SB weights must be constant along xi", tag="invalid-weights"
                    )
                weights = weights[:, 0]
            if weights.shape != (kv_zeta.n,):
                raise SplineError("weight vector length mismatch", tag="invalid-weights")
            if np.any(weights <= 0.0):
                raise SplineError("weights must be strictly positive", tag="invalid-weights")
        self.weights = weights

    @property
    def shape(self):
        return (self.kv_zeta.n, self.kv_xi.n)

    def eval(self, zeta, xi, nders=2):
        """Values, parametric gradients and Hessians of active functions."""
        if self.weights is None:
            f1, Dz = ders_basis(self.kv_zeta, zeta, nders)
        else:
            f1, Dz = nurbs_ders_basis(self.kv_zeta, self.weights, zeta, nders)
        f2, Dx = ders_basis(self.kv_xi, xi, nders)
        p1, p2 = self.kv_zeta.p, self.kv_xi.p
        idx = [(f1 + a, f2 + b) for a in range(p1 + 1) for b in range(p2 + 1)]
        vals = np.outer(Dz[0], Dx[0]).ravel()
        grads = np.stack(
            [np.outer(Dz[1], Dx[0]).ravel(), np.outer(Dz[0], Dx[1]).ravel()], axis=1
        )
        hzz = np.outer(Dz[2], Dx[0]).ravel() if nders >= 2 else None
        hzx = np.outer(Dz[1], Dx[1]).ravel() if nders >= 2 else None
        hxx = np.outer(Dz[0], Dx[2]).ravel() if nders >= 2 else None
        hess = None
        if nders >= 2:
            hess = np.empty((len(vals), 2, 2))
            hess[:, 0, 0] = hzz
            hess[:, 0, 1] = hess[:, 1, 0] = hzx
            hess[:, 1, 1] = hxx
        return BasisEval((zeta, xi), idx, vals, grads, hess)


def tensor_eval(space, zeta, xi):
    """Functional form of :meth:`TensorSplineSpace.eval`."""
    return space.eval(zeta, xi)


_gauss_cache = {}


def gauss_points(npts, a, b):
    """Gauss-Legendre nodes and weights on (a, b)."""
    if npts not in _gauss_cache:
        _gauss_cache[npts] = np.polynomial.legendre.leggauss(npts)
    x, w = _gauss_cache[npts]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w
