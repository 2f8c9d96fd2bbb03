"""Kirchhoff plate bending on C1-coupled SB-IGA spaces.

Weak form: a(u, v) = int D [(1-nu) Hess(v):Hess(u) + nu Lap(v) Lap(u)],
F(v) = int g v + int_GammaM M dv/dn + int_GammaQ Q v + point loads F*v(x_p).
Element quadrature is Gauss-Legendre with (p+1)^2 points per Bezier element
by default; all quadrature points are strictly inside knot spans, so the
singular scaling center is never evaluated.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import AssemblyError, SolverError, GeometryError
from .geometry import locate_point
from .splines import gauss_points

__all__ = [
    "PlateMaterial",
    "LoadSpec",
    "ExactSolution",
    "cos2_square",
    "manufactured_rhs",
    "point_load_reference",
    "assemble_stiffness",
    "assemble_load",
    "solve",
    "solve_plate",
    "Solution",
    "evaluate",
    "bending_moments",
    "error_norms",
    "ErrorReport",
]


class PlateMaterial:
    """Isotropic plate material; D = E t^3 / (12 (1 - nu^2)) exactly.

    Exactly one of t, D is given; the other is derived.
    """

    __slots__ = ("E", "nu", "t", "D")

    def __init__(self, E, nu, t=None, D=None):
        if not 0.0 <= nu < 0.5:
            raise AssemblyError("Poisson ratio must lie in [0, 0.5)", tag="invalid-material")
        if (t is None) == (D is None):
            raise AssemblyError("give exactly one of t or D", tag="invalid-material")
        self.E = float(E)
        self.nu = float(nu)
        if t is not None:
            self.t = float(t)
            self.D = self.E * self.t**3 / (12.0 * (1.0 - self.nu**2))
        else:
            self.D = float(D)
            self.t = (12.0 * (1.0 - self.nu**2) * self.D / self.E) ** (1.0 / 3.0)


class LoadSpec:
    """Surface load g(x, y), edge shear/moment data and point loads."""

    def __init__(self, surface=None, edge_loads=(), edge_moments=(), point_loads=()):
        self.surface = surface
        self.edge_loads = list(edge_loads)      # (patch index, Q) on outer edges
        self.edge_moments = list(edge_moments)  # (patch index, M) on outer edges
        self.point_loads = [(np.asarray(x, dtype=float), float(F)) for x, F in point_loads]


class ExactSolution:
    """Closed-form reference field with analytic derivatives."""

    def __init__(self, value, grad, hess, biharmonic=None):
        self.value = value
        self.grad = grad
        self.hess = hess
        self.biharmonic = biharmonic


def cos2_square():
    """u = cos^2(pi x) cos^2(pi y): clamped solution on [-1/2, 1/2]^2."""

    def value(x, y):
        return np.cos(np.pi * x) ** 2 * np.cos(np.pi * y) ** 2

    def grad(x, y):
        gx = -np.pi * np.sin(2 * np.pi * x) * np.cos(np.pi * y) ** 2
        gy = -np.pi * np.sin(2 * np.pi * y) * np.cos(np.pi * x) ** 2
        return gx, gy

    def hess(x, y):
        hxx = -2 * np.pi**2 * np.cos(2 * np.pi * x) * np.cos(np.pi * y) ** 2
        hyy = -2 * np.pi**2 * np.cos(2 * np.pi * y) * np.cos(np.pi * x) ** 2
        hxy = np.pi**2 * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)
        return hxx, hyy, hxy

    def biharmonic(x, y):
        cx = np.cos(2 * np.pi * x)
        cy = np.cos(2 * np.pi * y)
        return 4 * np.pi**4 * (cx + cy) + 16 * np.pi**4 * cx * cy

    return ExactSolution(value, grad, hess, biharmonic)


def manufactured_rhs(exact, D):
    """Surface load g = D * Lap^2(u) from analytic fourth derivatives."""
    if exact.biharmonic is None:
        raise AssemblyError("exact solution carries no biharmonic", tag="load-error")

    def g(x, y):
        return D * exact.biharmonic(x, y)

    return g


def point_load_reference(F=1.0, L=1.0, D=1.0, terms=2000):
    """Navier series for the center deflection of a simply supported square
    plate under a center point load; converges to ~0.01160 F L^2 / D.

    Only odd m, n contribute (sin^2(m pi / 2) factors); ``terms`` bounds m
    and n.
    """
    if terms < 1:
        raise AssemblyError("need terms >= 1", tag="invalid-series")
    n2 = np.arange(1, terms + 1, 2, dtype=float) ** 2
    s = 0.0
    for m2 in n2:
        s += np.sum(1.0 / (m2 + n2) ** 2)
    return 4.0 * F * L**2 / (D * np.pi**4) * s


# ----------------------------------------------------------------------
# assembly


def _quad_counts(cspace, quad):
    p = cspace.domain.p
    return (quad or p + 1, quad or p + 1)


def assemble_stiffness(cspace, material, quad=None):
    """Coupled stiffness A = M^T Atilde M (symmetric, PD when clamped)."""
    D, nu = material.D, material.nu
    uspace = cspace.uspace
    nq1, nq2 = _quad_counts(cspace, quad)
    rows, cols, vals = [], [], []
    for m in range(len(cspace.domain.patches)):
        tab = uspace.quad_tables(m, nq1, nq2)
        for s2 in range(tab.S2):
            IDX, V, GX, GY, H11, H22, H12, geo = tab.row_physical(s2)
            w = geo["w"] * np.abs(geo["det"])
            lap = H11 + H22
            loc = D * (1.0 - nu) * (
                np.einsum("saq,sbq,sq->sab", H11, H11, w)
                + np.einsum("saq,sbq,sq->sab", H22, H22, w)
                + 2.0 * np.einsum("saq,sbq,sq->sab", H12, H12, w)
            ) + D * nu * np.einsum("saq,sbq,sq->sab", lap, lap, w)
            K = IDX.shape[1]
            rows.append(np.repeat(IDX, K, axis=1).ravel())
            cols.append(np.tile(IDX, (1, K)).ravel())
            vals.append(loc.ravel())
    vals = np.concatenate(vals)
    if not np.all(np.isfinite(vals)):
        raise AssemblyError("nonfinite stiffness entry", tag="assembly-failure")
    Atilde = sp.coo_matrix(
        (vals, (np.concatenate(rows), np.concatenate(cols))),
        shape=(cspace.N, cspace.N),
    ).tocsc()
    A = (cspace.M.T @ Atilde @ cspace.M).tocsc()
    return A


def assemble_load(cspace, loads, quad=None):
    """Coupled load vector f = M^T ftilde plus direct point-load rows."""
    uspace = cspace.uspace
    domain = cspace.domain
    nq1, nq2 = _quad_counts(cspace, quad)
    ftil = np.zeros(cspace.N)

    if loads.surface is not None:
        g = loads.surface
        for m in range(len(domain.patches)):
            tab = uspace.quad_tables(m, nq1, nq2)
            for s2 in range(tab.S2):
                IDX, A = tab.row_basis(s2)
                geo = tab.row_geometry(s2)
                w = geo["w"] * np.abs(geo["det"]) * g(geo["px"], geo["py"])
                contrib = np.einsum("saq,sq->sa", A["V"], w)
                np.add.at(ftil, IDX.ravel(), contrib.ravel())

    for patch_idx, val in loads.edge_loads:
        _edge_functional(uspace, patch_idx, val, ftil, order=0)
    for patch_idx, val in loads.edge_moments:
        _edge_functional(uspace, patch_idx, val, ftil, order=1)

    f = np.asarray(cspace.M.T @ ftil).ravel()

    for xp, F in loads.point_loads:
        m, z, x = locate_point(domain, xp)
        idx, V = uspace.parametric_eval(m, z, x, nders=0)[:2]
        row = np.zeros(cspace.N)
        row[idx] = V
        f += F * np.asarray(cspace.M.T @ row).ravel()
    return f


def _edge_functional(uspace, patch_idx, val, ftil, order):
    """Accumulate int_edge val * v ds (order 0) or val * dv/dn ds (order 1)
    over the outer edge of one patch."""
    domain = uspace.domain
    patch = domain.patches[patch_idx]
    edge = patch.outer_edge_curve()
    nq = domain.p + 1
    for _, a, b in edge.kv.spans():
        ts, ws = gauss_points(nq, a, b)
        _, d1 = edge.eval(ts, nders=1)
        speed = np.hypot(d1[:, 0], d1[:, 1])
        for t, w, s in zip(ts, ws, speed):
            qv = val(*patch.map(t, 1.0)) if callable(val) else val
            if order == 0:
                idx, V = uspace.parametric_eval(patch_idx, t, 1.0, nders=0)[:2]
                ftil[idx] += w * s * qv * V
            else:
                ge = patch.geom_eval(t, 1.0)
                n = np.linalg.solve(ge.jac.T, np.array([0.0, 1.0]))
                n /= np.hypot(*n)
                idx, V, G, _ = uspace.physical_eval(patch_idx, t, 1.0, nders=1)
                ftil[idx] += w * s * qv * (G @ n)


# ----------------------------------------------------------------------
# solve


class Solution:
    def __init__(self, space, coeffs, material, loads, residual, cond_estimate):
        self.space = space
        self.coeffs = coeffs
        self.material = material
        self.loads = loads
        self.residual = residual
        self.cond_estimate = cond_estimate
        self._ctil = None

    @property
    def ctil(self):
        if self._ctil is None:
            self._ctil = self.space.expand(self.coeffs)
        return self._ctil


def _cond_estimate(A, lu, iters=12, rng=None):
    """2-norm condition estimate by power iteration on A and A^{-1}."""
    rng = rng or np.random.default_rng(11)
    n = A.shape[0]
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam_hi = 0.0
    for _ in range(iters):
        v = A @ v
        lam_hi = np.linalg.norm(v)
        if lam_hi == 0.0:
            return np.inf
        v /= lam_hi
    w = rng.standard_normal(n)
    w /= np.linalg.norm(w)
    lam_inv = 0.0
    for _ in range(iters):
        w = lu.solve(w)
        lam_inv = np.linalg.norm(w)
        if not np.isfinite(lam_inv) or lam_inv == 0.0:
            return np.inf
        w /= lam_inv
    return lam_hi * lam_inv


def solve(A, f, cond=True):
    """Direct sparse solve with one refinement step.

    Returns (coeffs, residual, condition estimate).  A residual above
    1e-8*||f|| is reported, not raised: the unstabilized fine meshes of the
    stability study are intentionally ill-conditioned.
    """
    A = sp.csc_matrix(A)
    f = np.asarray(f, dtype=float)
    try:
        # symmetric-structure ordering: about half the fill-in of COLAMD here
        lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A")
        x = lu.solve(f)
        r = f - A @ x
        x = x + lu.solve(r)
    except RuntimeError as exc:
        raise SolverError("factorization failed: %s" % exc, tag="solver-error")
    if not np.all(np.isfinite(x)):
        raise SolverError("solver produced nonfinite values", tag="solver-error")
    res = np.linalg.norm(f - A @ x)
    est = _cond_estimate(A, lu) if cond else np.nan
    return x, res, est


def solve_plate(cspace, material, loads, quad=None, cond=True):
    """Assemble and solve; returns a :class:`Solution`."""
    A = assemble_stiffness(cspace, material, quad=quad)
    f = assemble_load(cspace, loads, quad=quad)
    x, res, est = solve(A, f, cond=cond)
    return Solution(cspace, x, material, loads, res, est)


# ----------------------------------------------------------------------
# postprocessing


def evaluate(solution, points, nders=2):
    """Field values (and physical derivatives) at (patch, zeta, xi) points.

    Derivatives require xi > 0; values are defined at xi = 0 through the
    center functions.
    """
    cspace = solution.space
    ctil = solution.ctil
    us, gs, hs = [], [], []
    for m, z, x in points:
        if x == 0.0 and nders > 0:
            raise GeometryError(
                "derivatives at the scaling center need xi > 0", tag="singular-jacobian"
            )
        if nders == 0:
            idx, V = cspace.uspace.parametric_eval(m, z, x, nders=0)[:2]
            us.append(ctil[idx] @ V)
            continue
        idx, V, G, H = cspace.uspace.physical_eval(m, z, x, nders=nders)
        c = ctil[idx]
        us.append(c @ V)
        gs.append(c @ G)
        hs.append(np.einsum("n,nij->ij", c, H) if nders >= 2 else None)
    us = np.array(us)
    if nders == 0:
        return us
    return us, np.array(gs), (np.array(hs) if nders >= 2 else None)


def evaluate_at_xy(solution, xys, nders=0):
    """Same as :func:`evaluate` but for physical coordinates."""
    pts = [locate_point(solution.space.domain, xy) for xy in np.atleast_2d(xys)]
    return evaluate(solution, pts, nders=nders)


def bending_moments(solution, points):
    """(m11, m22, m12) from physical Hessians:
    m11 = D(uxx + nu uyy), m22 = D(uyy + nu uxx), m12 = D(1-nu) uxy."""
    D, nu = solution.material.D, solution.material.nu
    _, _, H = evaluate(solution, points, nders=2)
    m11 = D * (H[:, 0, 0] + nu * H[:, 1, 1])
    m22 = D * (H[:, 1, 1] + nu * H[:, 0, 0])
    m12 = D * (1.0 - nu) * H[:, 0, 1]
    return m11, m22, m12


class ErrorReport:
    """H2 seminorm and L2 norm of u - u_h (Frobenius Hessian convention)."""

    def __init__(self, h2_semi, l2):
        self.h2_semi = h2_semi
        self.l2 = l2

    def __repr__(self):
        return f"ErrorReport(h2_semi={self.h2_semi:.6e}, l2={self.l2:.6e})"


def error_norms(solution, exact, quad=None):
    cspace = solution.space
    uspace = cspace.uspace
    ctil = solution.ctil
    nq1, nq2 = _quad_counts(cspace, quad)
    l2 = 0.0
    h2 = 0.0
    for m in range(len(cspace.domain.patches)):
        tab = uspace.quad_tables(m, nq1, nq2)
        for s2 in range(tab.S2):
            IDX, V, GX, GY, H11, H22, H12, geo = tab.row_physical(s2)
            w = geo["w"] * np.abs(geo["det"])
            c = ctil[IDX]
            uh = np.einsum("sa,saq->sq", c, V)
            uh11 = np.einsum("sa,saq->sq", c, H11)
            uh22 = np.einsum("sa,saq->sq", c, H22)
            uh12 = np.einsum("sa,saq->sq", c, H12)
            ue = exact.value(geo["px"], geo["py"])
            e11, e22, e12 = exact.hess(geo["px"], geo["py"])
            l2 += np.sum(w * (uh - ue) ** 2)
            h2 += np.sum(
                w * ((uh11 - e11) ** 2 + (uh22 - e22) ** 2 + 2.0 * (uh12 - e12) ** 2)
            )
    return ErrorReport(np.sqrt(h2), np.sqrt(l2))


def domain_area(cspace, quad=None):
    """Quadrature area of the domain (used by trimming sanity checks)."""
    uspace = cspace.uspace
    nq1, nq2 = _quad_counts(cspace, quad)
    total = 0.0
    for m in range(len(cspace.domain.patches)):
        tab = uspace.quad_tables(m, nq1, nq2)
        for s2 in range(tab.S2):
            geo = tab.row_geometry(s2)
            total += np.sum(geo["w"] * np.abs(geo["det"]))
    return total


def observed_orders(hs, errs):
    """Consecutive log-ratio convergence orders."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    return np.log(errs[:-1] / errs[1:]) / np.log(hs[:-1] / hs[1:])


def fitted_order(hs, errs):
    """Least-squares slope of log err vs log h."""
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
