"""Scaled-boundary patch geometry.

A patch maps the unit square through F(zeta, xi) = q(xi)(gamma(zeta) - x0) + x0
with a NURBS boundary curve gamma, scaling center x0 and scaling polynomial
q(xi) = c1*xi + c2.  c2 = 0 collapses the xi=0 edge into the (singular)
scaling center.  Domains glue several such patches; boundary curves are
ordered so that the interior lies to the right of the running direction,
which makes det J > 0.
"""

import numpy as np

from .errors import GeometryError
from .splines import KnotVector, make_open_knot_vector, insert_knot, ders_basis

__all__ = [
    "NurbsCurve",
    "line_curve",
    "circle_arc",
    "SBPatch",
    "GeomEval",
    "sb_eval",
    "sb_control_net",
    "Interface",
    "BoundaryEdge",
    "geom_eval",
    "physical_derivs",
    "MultiPatchDomain",
    "make_domain",
    "validate_star_shape",
    "locate_point",
]


class NurbsCurve:
    """Planar NURBS curve: knot vector, (n, 2) control points, weights."""

    __slots__ = ("kv", "points", "weights")

    def __init__(self, kv, points, weights=None):
        points = np.asarray(points, dtype=float)
        if weights is None:
            weights = np.ones(len(points))
        weights = np.asarray(weights, dtype=float)
        if points.shape != (kv.n, 2) or weights.shape != (kv.n,):
            raise GeometryError("control data does not match knot vector", tag="invalid-curve")
        if np.any(weights <= 0.0):
            raise GeometryError("curve weights must be positive", tag="invalid-weights")
        points = points.copy()
        weights = weights.copy()
        points.flags.writeable = False
        weights.flags.writeable = False
        self.kv = kv
        self.points = points
        self.weights = weights

    @property
    def p(self):
        return self.kv.p

    @property
    def n(self):
        return self.kv.n

    def homogeneous(self):
        h = np.empty((self.n, 3))
        h[:, :2] = self.points * self.weights[:, None]
        h[:, 2] = self.weights
        return h

    def eval(self, ts, nders=0):
        """Curve point (and derivatives up to nders<=2) at parameters ts."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        hom = self.homogeneous()
        p = self.p
        A = np.zeros((nders + 1, len(ts), 3))
        for k, t in enumerate(ts):
            first, D = ders_basis(self.kv, t, nders)
            A[:, k, :] = D @ hom[first : first + p + 1]
        W = A[..., 2]
        out = [A[0, :, :2] / W[0][:, None]]
        if nders >= 1:
            out.append((A[1, :, :2] - out[0] * W[1][:, None]) / W[0][:, None])
        if nders >= 2:
            out.append(
                (A[2, :, :2] - 2.0 * out[1] * W[1][:, None] - out[0] * W[2][:, None])
                / W[0][:, None]
            )
        return out[0] if nders == 0 else tuple(out)

    def eval_one(self, t, nders=0):
        res = self.eval([t], nders)
        if nders == 0:
            return res[0]
        return tuple(r[0] for r in res)

    def start(self):
        return self.points[0].copy()

    def end(self):
        return self.points[-1].copy()

    def insert_knot(self, t, times=1):
        kv, hom = insert_knot(self.kv, self.homogeneous(), t, times)
        return NurbsCurve(kv, hom[:, :2] / hom[:, 2:3], hom[:, 2])

    def refine_to_segments(self, segments, r):
        """Insert uniform breakpoints k/segments to multiplicity p - r."""
        cur = self
        target = self.p - r
        for k in range(1, segments):
            t = k / segments
            missing = target - cur.kv.multiplicity(t)
            if missing < 0:
                raise GeometryError(
                    "existing multiplicity at %g exceeds p-r" % t, tag="invalid-regularity"
                )
            if missing > 0:
                cur = cur.insert_knot(t, missing)
        return cur

    def refine_dyadic(self, levels, r):
        """Insert span midpoints to multiplicity p - r, ``levels`` times."""
        cur = self
        for _ in range(levels):
            mids = [0.5 * (a + b) for _, a, b in cur.kv.spans()]
            for t in mids:
                missing = (cur.p - r) - cur.kv.multiplicity(t)
                if missing > 0:
                    cur = cur.insert_knot(t, missing)
        return cur

    def reversed_curve(self):
        return NurbsCurve(self.kv.mirrored(), self.points[::-1].copy(), self.weights[::-1].copy())

    def is_straight(self, tol=1e-10):
        chord = self.end() - self.start()
        L = np.hypot(*chord)
        if L == 0.0:
            return False
        d = self.points - self.start()
        cross = d[:, 0] * chord[1] - d[:, 1] * chord[0]
        return bool(np.max(np.abs(cross)) <= tol * max(L, 1.0) * L)


def _elevate_bezier_hom(hom):
    """One degree-elevation step of a Bezier segment in homogeneous form."""
    q = len(hom)  # current degree + 1
    out = np.empty((q + 1, hom.shape[1]))
    out[0] = hom[0]
    out[q] = hom[-1]
    for i in range(1, q):
        a = i / q
        out[i] = a * hom[i - 1] + (1.0 - a) * hom[i]
    return out


def line_curve(p0, p1, degree):
    """Straight segment as a degree-``degree`` Bezier with affine speed."""
    kv = make_open_knot_vector(degree, 1, degree - 1) if degree > 1 else KnotVector(
        np.array([0.0, 0.0, 1.0, 1.0]), 1
    )
    g = kv.greville()
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    pts = p0[None, :] + g[:, None] * (p1 - p0)[None, :]
    return NurbsCurve(kv, pts)


def circle_arc(center, radius, angle0, angle1, degree=2):
    """Exact circular arc (|angle1 - angle0| <= pi/2 + eps) of given degree.

    Built as the standard quadratic rational Bezier and elevated in
    homogeneous form when degree > 2.
    """
    center = np.asarray(center, dtype=float)
    sweep = angle1 - angle0
    if abs(sweep) > 0.5 * np.pi + 1e-12:
        raise GeometryError("arc sweep must not exceed 90 degrees", tag="invalid-arc")
    if degree < 2:
        raise GeometryError("circular arcs need degree >= 2", tag="invalid-arc")
    a0, a1 = angle0, angle1
    P0 = center + radius * np.array([np.cos(a0), np.sin(a0)])
    P2 = center + radius * np.array([np.cos(a1), np.sin(a1)])
    half = 0.5 * sweep
    w1 = np.cos(half)
    amid = 0.5 * (a0 + a1)
    P1 = center + (radius / w1) * np.array([np.cos(amid), np.sin(amid)])
    hom = np.empty((3, 3))
    hom[0] = [P0[0], P0[1], 1.0]
    hom[1] = [w1 * P1[0], w1 * P1[1], w1]
    hom[2] = [P2[0], P2[1], 1.0]
    for _ in range(degree - 2):
        hom = _elevate_bezier_hom(hom)
    kv = make_open_knot_vector(degree, 1, degree - 1)
    return NurbsCurve(kv, hom[:, :2] / hom[:, 2:3], hom[:, 2])


class GeomEval:
    """Geometry data at one parametric point: F, J, det J, and the
    second-derivative tensor d2[k] = parametric Hessian of F_k."""

    __slots__ = ("point", "jac", "det", "d2")

    def __init__(self, point, jac, det, d2):
        self.point = point
        self.jac = jac
        self.det = det
        self.d2 = d2


class SBPatch:
    """One scaled-boundary patch."""

    def __init__(self, curve, x0, c1=1.0, c2=0.0, radial=None):
        if c1 <= 0.0 or c2 < 0.0:
            raise GeometryError("need c1 > 0 and c2 >= 0", tag="invalid-scaling")
        self.curve = curve
        self.x0 = np.asarray(x0, dtype=float)
        self.c1 = float(c1)
        self.c2 = float(c2)
        if radial is None:
            radial = make_open_knot_vector(curve.p, 1, curve.p - 1)
        if radial.p != curve.p:
            raise GeometryError(
                "radial degree %d != curve degree %d" % (radial.p, curve.p),
                tag="degree-mismatch",
            )
        self.radial = radial

    @property
    def p(self):
        return self.curve.p

    def q(self, xi):
        return self.c1 * np.asarray(xi, dtype=float) + self.c2

    def is_singular(self):
        return self.c2 == 0.0

    def map(self, zeta, xi):
        """Physical point(s) F(zeta, xi); broadcasts over matching shapes."""
        g = self.curve.eval(np.atleast_1d(zeta))
        qv = np.atleast_1d(self.q(xi))
        pts = qv[:, None] * (g - self.x0) + self.x0
        return pts[0] if np.isscalar(zeta) and np.isscalar(xi) else pts

    def geom_eval(self, zeta, xi):
        g, g1, g2 = self.curve.eval_one(zeta, nders=2)
        qv = float(self.q(xi))
        if qv == 0.0:
            raise GeometryError(
                "Jacobian is singular at the scaling center", tag="singular-jacobian"
            )
        J = np.empty((2, 2))
        J[:, 0] = qv * g1
        J[:, 1] = self.c1 * (g - self.x0)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        d2 = np.empty((2, 2, 2))
        for k in range(2):
            d2[k, 0, 0] = qv * g2[k]
            d2[k, 0, 1] = d2[k, 1, 0] = self.c1 * g1[k]
            d2[k, 1, 1] = 0.0
        return GeomEval(qv * (g - self.x0) + self.x0, J, det, d2)

    def control_net(self, curve=None, radial=None, verify=True):
        """Control net C[i, j] = q(g_j)(C_i - x0) + x0 (g_j radial Greville).

        q has degree 1, so Greville coefficients reproduce it exactly; the
        net is verified against the direct map on construction.
        """
        curve = curve or self.curve
        radial = radial or self.radial
        g = radial.greville()
        qg = self.c1 * g + self.c2
        net = qg[None, :, None] * (curve.points - self.x0)[:, None, :] + self.x0
        if verify:
            rng = np.random.default_rng(52)
            zs = rng.uniform(0.0, 1.0, 20)
            xs = rng.uniform(0.0, 1.0, 20)
            direct = self.map(zs, xs)
            hom_w = curve.weights
            recon = np.empty_like(direct)
            for k, (z, x) in enumerate(zip(zs, xs)):
                f1, Dz = ders_basis(curve.kv, z, 0)
                f2, Dx = ders_basis(radial, x, 0)
                Bz = Dz[0] * hom_w[f1 : f1 + curve.p + 1]
                Bz = Bz / Bz.sum()
                sub = net[f1 : f1 + curve.p + 1, f2 : f2 + radial.p + 1]
                recon[k] = np.einsum("i,j,ijk->k", Bz, Dx[0], sub)
            err = np.max(np.abs(recon - direct))
            if err > 1e-10:
                raise GeometryError(
                    "control net reproduction error %.2e" % err, tag="net-construction-failed"
                )
        return net

    def with_segments(self, segments_zeta, segments_xi, r):
        """Patch with uniform segments inserted in both directions."""
        curve = self.curve.refine_to_segments(segments_zeta, r)
        radial = make_open_knot_vector(self.p, segments_xi, r)
        return SBPatch(curve, self.x0, self.c1, self.c2, radial)

    def refine(self, levels_zeta, levels_xi, r=None):
        """Dyadic refinement: segment counts double per level."""
        if r is None:
            r = min(self.curve.kv.regularity(), self.radial.regularity())
        curve = self.curve.refine_dyadic(levels_zeta, r)
        seg = len(self.radial.breakpoints()) - 1
        radial = make_open_knot_vector(self.p, seg * 2 ** levels_xi, r)
        return SBPatch(curve, self.x0, self.c1, self.c2, radial)

    def outer_edge_curve(self):
        """The xi = 1 edge as a curve (gamma scaled by q(1))."""
        q1 = self.c1 + self.c2
        pts = q1 * (self.curve.points - self.x0) + self.x0
        return NurbsCurve(self.curve.kv, pts, self.curve.weights.copy())


def sb_eval(patch, zeta, xi):
    """Functional form of :meth:`SBPatch.map`."""
    return patch.map(zeta, xi)


def sb_control_net(patch):
    """Functional form of :meth:`SBPatch.control_net`."""
    return patch.control_net()


def geom_eval(patch, zeta, xi):
    """Functional form of :meth:`SBPatch.geom_eval`."""
    return patch.geom_eval(zeta, xi)


def physical_derivs(patch, zeta, xi, values, grads, hessians):
    """Push parametric values/grads/Hessians to physical space at one point.

    grads: (k, 2), hessians: (k, 2, 2).  Returns (values, physical grads,
    physical Hessians).  The Hessian uses the full second-order pullback
    H = J^{-T} (Hhat - sum_k dphi_k * Hess(F_k)) J^{-1}.
    """
    ge = patch.geom_eval(zeta, xi)
    if abs(ge.det) < 1e-14:
        raise GeometryError("Jacobian numerically singular", tag="singular-jacobian")
    Jinv = np.linalg.inv(ge.jac)
    g_phys = grads @ Jinv  # rows: J^{-T} grad
    corr = g_phys[:, 0, None, None] * ge.d2[0] + g_phys[:, 1, None, None] * ge.d2[1]
    H = np.einsum("ki,nkl,lj->nij", Jinv, hessians - corr, Jinv)
    return values, g_phys, H


class Interface:
    """Patch-to-patch interface.

    kind 'radial': left patch's zeta=1 edge meets right patch's zeta=0 edge
    (same center group); parametrized by xi on both sides.
    kind 'outer': two xi=1 edges of patches from different center groups,
    reversed parametrization, required straight.
    """

    __slots__ = ("kind", "left", "right", "corner")

    def __init__(self, kind, left, right, corner=None):
        self.kind = kind
        self.left = left
        self.right = right
        self.corner = corner

    def __repr__(self):
        return f"Interface({self.kind}, L={self.left}, R={self.right})"


class BoundaryEdge:
    """Physical boundary edge of one patch with a BC tag."""

    __slots__ = ("patch", "edge", "tag")

    def __init__(self, patch, edge, tag="free"):
        self.patch = patch
        self.edge = edge  # 'outer', 'zeta0' or 'zeta1'
        self.tag = tag

    def __repr__(self):
        return f"BoundaryEdge(patch={self.patch}, {self.edge}, {self.tag})"


class CenterGroup:
    __slots__ = ("x0", "c1", "c2", "radial", "patches")

    def __init__(self, x0, c1, c2, radial, patches):
        self.x0 = x0
        self.c1 = c1
        self.c2 = c2
        self.radial = radial
        self.patches = patches


class MultiPatchDomain:
    def __init__(self, patches, groups, interfaces, boundary):
        self.patches = patches
        self.groups = groups
        self.interfaces = interfaces
        self.boundary = boundary

    @property
    def p(self):
        return self.patches[0].p

    def group_of(self, patch_index):
        for gi, g in enumerate(self.groups):
            if patch_index in g.patches:
                return gi
        raise GeometryError("patch %d not in any group" % patch_index, tag="topology-error")

    def boundary_for(self, patch_index, edge="outer"):
        for be in self.boundary:
            if be.patch == patch_index and be.edge == edge:
                return be
        return None

    def with_segments(self, segments_zeta, segments_xi, r):
        """Uniformly refined copy; topology (and tags) carried over."""
        patches = [pa.with_segments(segments_zeta, segments_xi, r) for pa in self.patches]
        dom = make_domain(patches)
        for be in dom.boundary:
            src = self.boundary_for(be.patch, be.edge)
            if src is not None:
                be.tag = src.tag
        return dom


_MATCH_TOL = 1e-12


def _same_point(a, b, tol=_MATCH_TOL):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


def _curves_mirror(ca, cb, tol=_MATCH_TOL):
    """cb equals ca with reversed parametrization (control-level check)."""
    if ca.n != cb.n or ca.p != cb.p:
        return False
    if not ca.kv.mirrored() == cb.kv:
        if np.max(np.abs(ca.kv.mirrored().values - cb.kv.values)) > tol:
            return False
    if np.max(np.abs(ca.points - cb.points[::-1])) > tol:
        return False
    return np.max(np.abs(ca.weights - cb.weights[::-1])) <= 1e-10


def make_domain(patches, bc=None, check_orientation=True, interfaces=None):
    """Assemble and validate a multipatch domain.

    Center groups are formed by exact (x0, c1, c2, radial) agreement; radial
    interfaces are detected from matching curve endpoint control points, and
    straight outer interfaces between groups from mirrored xi=1 edges.  An
    explicit ``interfaces`` list skips the detection but not the validation.
    ``bc`` maps patch index (or 'all') to a tag for outer boundary edges.
    """
    if not patches:
        raise GeometryError("empty patch list", tag="topology-error")
    p = patches[0].p
    for k, pa in enumerate(patches):
        if pa.p != p:
            raise GeometryError(
                "patch %d has degree %d, expected %d" % (k, pa.p, p), tag="degree-mismatch"
            )

    # center groups
    groups = []
    for k, pa in enumerate(patches):
        placed = False
        for g in groups:
            if (
                _same_point(g.x0, pa.x0, 1e-14)
                and g.c1 == pa.c1
                and g.c2 == pa.c2
                and g.radial == pa.radial
            ):
                g.patches.append(k)
                placed = True
                break
        if not placed:
            groups.append(CenterGroup(pa.x0.copy(), pa.c1, pa.c2, pa.radial, [k]))
    for g in groups:
        for k in g.patches:
            if not patches[k].radial == g.radial:
                raise GeometryError("radial knot vectors differ in group", tag="topology-error")

    # orientation: detJ > 0 sampled
    if check_orientation:
        for k, pa in enumerate(patches):
            for z in (0.12, 0.5, 0.93):
                det = pa.geom_eval(z, 0.77).det
                if det <= 0.0:
                    raise GeometryError(
                        "patch %d has non-positive Jacobian (det=%.3e at zeta=%.2f); "
                        "boundary curves must run with the interior on their right"
                        % (k, det, z),
                        tag="topology-error",
                    )

    explicit = interfaces
    group_index = {}
    for gi, g in enumerate(groups):
        for k in g.patches:
            group_index[k] = gi

    # radial interfaces inside groups (gamma_L(1) == gamma_R(0))
    interfaces = []
    has_succ = set()
    has_pred = set()
    if explicit is not None:
        for itf in explicit:
            if itf.kind != "radial":
                continue
            ca, cb = patches[itf.left].curve, patches[itf.right].curve
            if group_index[itf.left] != group_index[itf.right] or not _same_point(
                ca.points[-1], cb.points[0]
            ):
                raise GeometryError(
                    "declared radial interface %d-%d does not match"
                    % (itf.left, itf.right),
                    tag="topology-error",
                )
            interfaces.append(
                Interface("radial", itf.left, itf.right, corner=ca.points[-1].copy())
            )
            has_succ.add(itf.left)
            has_pred.add(itf.right)
    else:
        for g in groups:
            for a in g.patches:
                for b in g.patches:
                    if a == b:
                        continue
                    ca, cb = patches[a].curve, patches[b].curve
                    if _same_point(ca.points[-1], cb.points[0]):
                        if a in has_succ or b in has_pred:
                            raise GeometryError(
                                "ambiguous radial interface at patch %d-%d" % (a, b),
                                tag="topology-error",
                            )
                        interfaces.append(
                            Interface("radial", a, b, corner=ca.points[-1].copy())
                        )
                        has_succ.add(a)
                        has_pred.add(b)
    for g in groups:
        for a in g.patches:
            for b in g.patches:
                ca, cb = patches[a].curve, patches[b].curve
                if (
                    a != b
                    and a not in has_succ
                    and _same_point(ca.points[-1], cb.points[0], 1e-6)
                    and not _same_point(ca.points[-1], cb.points[0])
                ):
                    raise GeometryError(
                        "corner control points of patches %d/%d almost meet but "
                        "differ by more than 1e-12" % (a, b),
                        tag="topology-error",
                    )

    # outer interfaces across groups (mirrored xi=1 edges)
    def _check_outer(a, b):
        ca = patches[a].outer_edge_curve()
        cb = patches[b].outer_edge_curve()
        if not _curves_mirror(ca, cb):
            raise GeometryError(
                "outer edges of patches %d/%d coincide but control data does "
                "not mirror" % (a, b),
                tag="topology-error",
            )
        if not ca.is_straight(1e-10):
            raise GeometryError(
                "interface between center groups (patches %d/%d) is not "
                "straight" % (a, b),
                tag="topology-error",
            )

    outer_matched = set()
    if explicit is not None:
        for itf in explicit:
            if itf.kind != "outer":
                continue
            _check_outer(itf.left, itf.right)
            interfaces.append(Interface("outer", itf.left, itf.right))
            outer_matched.update((itf.left, itf.right))
    else:
        for gi, ga in enumerate(groups):
            for gb in groups[gi + 1 :]:
                for a in ga.patches:
                    for b in gb.patches:
                        ca = patches[a].outer_edge_curve()
                        cb = patches[b].outer_edge_curve()
                        if _same_point(ca.start(), cb.end()) and _same_point(
                            ca.end(), cb.start()
                        ):
                            ts = np.linspace(0.07, 0.93, 7)
                            gap = np.max(np.abs(ca.eval(ts) - cb.eval(1.0 - ts)))
                            if gap > 1e-9:
                                continue  # shared endpoints only (two hole halves)
                            _check_outer(a, b)
                            interfaces.append(Interface("outer", a, b))
                            outer_matched.update((a, b))

    # boundary edges
    boundary = []
    for k in range(len(patches)):
        if k not in outer_matched:
            boundary.append(BoundaryEdge(k, "outer"))
        if k not in has_succ:
            boundary.append(BoundaryEdge(k, "zeta1"))
        if k not in has_pred:
            boundary.append(BoundaryEdge(k, "zeta0"))

    dom = MultiPatchDomain(patches, groups, interfaces, boundary)
    if bc is not None:
        apply_bc_tags(dom, bc)
    return dom


def apply_bc_tags(domain, bc):
    """Set BC tags from {'all': tag} or {patch_index: tag} (outer edges)."""
    valid = {"clamped", "simply_supported", "free"}
    if "all" in bc:
        tag = bc["all"]
        if tag not in valid:
            raise GeometryError("unknown bc tag %r" % tag, tag="config-error")
        for be in domain.boundary:
            if be.edge == "outer":
                be.tag = tag
        bc = {k: v for k, v in bc.items() if k != "all"}
    for key, tag in bc.items():
        k = int(key)
        if tag not in valid:
            raise GeometryError("unknown bc tag %r" % tag, tag="config-error")
        be = domain.boundary_for(k, "outer")
        if be is None:
            raise GeometryError(
                "patch %d has no outer boundary edge (it is an interface)" % k,
                tag="config-error",
            )
        be.tag = tag
    for be in domain.boundary:
        if be.edge != "outer" and be.tag != "free":
            raise GeometryError(
                "radial boundary edges support only 'free'", tag="config-error"
            )


def validate_star_shape(patch, samples=400, rng=None):
    """min over samples of detJ/xi (c2=0) resp. detJ/q(xi); negative means
    the patch is not star-shaped w.r.t. its scaling center."""
    rng = rng or np.random.default_rng(7)
    zs = rng.uniform(0.0, 1.0, samples)
    xs = rng.uniform(1e-3, 1.0, samples)
    worst = np.inf
    for z, x in zip(zs, xs):
        det = patch.geom_eval(z, x).det
        denom = x if patch.c2 == 0.0 else float(patch.q(x))
        worst = min(worst, det / denom)
    return worst


def locate_point(domain, xy, tol=1e-9):
    """Invert the SB map: return (patch index, zeta, xi) for a physical point.

    Works patch by patch using the angular monotonicity of star patches.
    """
    xy = np.asarray(xy, dtype=float)
    for gi, g in enumerate(domain.groups):
        if g.c2 == 0.0 and np.hypot(*(xy - g.x0)) <= tol:
            return domain.groups[gi].patches[0], 0.5, 0.0
    for k, pa in enumerate(domain.patches):
        v = xy - pa.x0
        rv = np.hypot(*v)
        if rv == 0.0:
            continue

        def miss(z):
            g = pa.curve.eval_one(z) - pa.x0
            return g[0] * v[1] - g[1] * v[0]

        f0, f1 = miss(0.0), miss(1.0)
        if f0 == 0.0:
            z = 0.0
        elif f1 == 0.0:
            z = 1.0
        elif f0 * f1 > 0.0:
            continue
        else:
            lo, hi = 0.0, 1.0
            flo = f0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                fm = miss(mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            z = 0.5 * (lo + hi)
        gpt = pa.curve.eval_one(z) - pa.x0
        if gpt @ v <= 0.0:
            continue
        qv = rv / np.hypot(*gpt)
        xi = (qv - pa.c2) / pa.c1
        if -tol <= xi <= 1.0 + tol:
            xi = min(max(xi, 0.0), 1.0)
            if np.max(np.abs(pa.map(z, xi) - xy)) <= max(tol, 1e-9):
                return k, z, xi
    raise GeometryError("point %s lies outside the domain" % xy, tag="load-error")
