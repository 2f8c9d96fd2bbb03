"""Globally C1-smooth coupled bases on SB multipatch domains.

The chain follows six steps: prune the two innermost radial layers of every
singular center group, merge interface traces continuously, append the three
scaling-center functions of each singular group, remove layers that violate
essential boundary conditions (all encoded in M0), assemble the Gram matrix
MJ of normal-derivative jumps across all interfaces, and span the C1 space
with an orthonormal basis M1 of its null space.  System matrices in the
coupled basis are congruences A = M1^T M0^T Atilde M0 M1.
"""

import numpy as np
import scipy.sparse as sp

from .errors import CouplingError, GeometryError
from .space import UncoupledSpace
from .splines import gauss_points

__all__ = [
    "G1Coefficients",
    "asg1_coefficients",
    "verify_asg1",
    "scaling_center_functions",
    "build_m0",
    "assemble_jump_matrix",
    "nullspace",
    "gram_rank",
    "CoupledSpace",
    "build_coupled_space",
    "reproduction_vector",
    "c1_jump_report",
]

_ESSENTIAL_LAYERS = {"clamped": 2, "simply_supported": 1, "free": 0}


# ----------------------------------------------------------------------
# AS-G1 gluing data (runtime verification of the coupling geometry)


class G1Coefficients:
    """Gluing functions of one interface: constant alphas, degree-1 betas.

    beta(t) = beta[0] + beta[1]*t and beta = alphaL*betaR - alphaR*betaL
    holds coefficientwise by construction.
    """

    __slots__ = ("alphaL", "alphaR", "beta", "betaL", "betaR")

    def __init__(self, alphaL, alphaR, beta):
        if alphaL * alphaR <= 0.0:
            raise GeometryError("alphaL*alphaR must be positive", tag="invalid-geometry")
        self.alphaL = float(alphaL)
        self.alphaR = float(alphaR)
        self.beta = np.asarray(beta, dtype=float)
        self.betaL = -self.beta / (2.0 * self.alphaR)
        self.betaR = self.beta / (2.0 * self.alphaL)

    def beta_at(self, t):
        return self.beta[0] + self.beta[1] * np.asarray(t, dtype=float)


def asg1_coefficients(domain, interface):
    """Constructive gluing coefficients for one interface.

    Radial interfaces: solve d1*dgammaL(1) + d2*dgammaR(0) = gammaL(1) - x0
    and set alphaR = d1, alphaL = -d2, beta = -(c1 t + c2)/c1.  Parallel
    tangents use (alphaR, alphaL, beta) = (c, 1, 0) with c > 0.  Straight
    interfaces between center groups use the bilinear two-patch branch.
    """
    if interface.kind == "radial":
        pl = domain.patches[interface.left]
        pr = domain.patches[interface.right]
        _, tl = pl.curve.eval_one(1.0, nders=1)
        _, tr = pr.curve.eval_one(0.0, nders=1)
        nl, nr = np.hypot(*tl), np.hypot(*tr)
        if nl < 1e-14 or nr < 1e-14:
            raise GeometryError("zero boundary tangent at interface", tag="degenerate-curve")
        rhs = pl.curve.eval_one(1.0) - pl.x0
        det = tl[0] * tr[1] - tl[1] * tr[0]
        if abs(det) <= 1e-12 * nl * nr:
            c = (tr @ tl) / (tl @ tl)
            if c <= 0.0:
                raise GeometryError(
                    "antiparallel interface tangents", tag="invalid-geometry"
                )
            return G1Coefficients(1.0, c, (0.0, 0.0))
        d1 = (rhs[0] * tr[1] - rhs[1] * tr[0]) / det
        d2 = (tl[0] * rhs[1] - tl[1] * rhs[0]) / det
        alphaR, alphaL = d1, -d2
        scale = max(abs(alphaL), abs(alphaR))
        if alphaR < 0:
            scale = -scale
        beta = np.array([-pl.c2 / pl.c1, -1.0]) / scale
        return G1Coefficients(alphaL / scale, alphaR / scale, beta)

    pa = domain.patches[interface.left]
    pb = domain.patches[interface.right]
    ca = pa.curve
    A0, A1 = ca.eval_one(0.0), ca.eval_one(1.0)
    v = A1 - A0
    L2 = v @ v
    crs_a = (A0[0] - pa.x0[0]) * v[1] - (A0[1] - pa.x0[1]) * v[0]
    crs_b = (A0[0] - pb.x0[0]) * v[1] - (A0[1] - pb.x0[1]) * v[0]
    if crs_a * crs_b >= 0.0:
        raise GeometryError(
            "scaling centers lie on the same side of the cut line", tag="invalid-geometry"
        )
    alphaR = pb.c1 * crs_b
    alphaL = -pa.c1 * crs_a
    scale = max(abs(alphaL), abs(alphaR))
    if alphaR < 0:
        scale = -scale
    alphaR /= scale
    alphaL /= scale
    qB1 = pb.c1 + pb.c2

    def beta_of(mu):
        x = A0 + mu * v
        s = alphaR * pa.c1 * ((x - pa.x0) @ v) + alphaL * pb.c1 * ((x - pb.x0) @ v)
        return -s / (qB1 * L2)

    b0 = beta_of(0.0)
    b1 = beta_of(1.0) - b0
    return G1Coefficients(alphaL, alphaR, (b0, b1))


def verify_asg1(domain, interface, coeffs, samples=50):
    """Max norm of the AS-G1 identity residual at ``samples`` points."""
    ts = np.linspace(0.0, 1.0, samples)
    worst = 0.0
    if interface.kind == "radial":
        pl = domain.patches[interface.left]
        pr = domain.patches[interface.right]
        _, tl = pl.curve.eval_one(1.0, nders=1)
        _, tr = pr.curve.eval_one(0.0, nders=1)
        axial = pl.c1 * (pl.curve.eval_one(1.0) - pl.x0)
        for t in ts:
            q = pl.c1 * t + pl.c2
            r = coeffs.alphaR * q * tl - coeffs.alphaL * q * tr + coeffs.beta_at(t) * axial
            worst = max(worst, np.hypot(*r))
        return worst
    pa = domain.patches[interface.left]
    pb = domain.patches[interface.right]
    qB1 = pb.c1 + pb.c2
    for t in ts:
        x, dx = pa.curve.eval(np.array([t]), nders=1)
        x, dx = x[0], dx[0]
        r = (
            coeffs.alphaR * pa.c1 * (x - pa.x0)
            + coeffs.alphaL * pb.c1 * (x - pb.x0)
            + coeffs.beta_at(t) * qB1 * dx
        )
        worst = max(worst, np.hypot(*r))
    return worst


# ----------------------------------------------------------------------
# M0: prune + C0 + scaling center + boundary conditions


class _UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n)

    def find(self, a):
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def scaling_center_functions(uspace, group_index):
    """Coefficient vectors of the three center functions of one group.

    Coefficients live on radial indices j <= p of the innermost block of
    every patch in the group: ones for phi1, control-point x/y coordinates
    for phi2/phi3 (value and gradient at the center are then (1,0,0),
    (0,1,0), (0,0,1) and the functions equal 1, x, y on the first radial
    span).
    """
    domain = uspace.domain
    group = domain.groups[group_index]
    if group.c2 != 0.0:
        raise CouplingError(
            "scaling-center functions need a singular parametrization (c2=0)",
            tag="not-applicable",
        )
    p = domain.p
    cols = [{}, {}, {}]
    for m in group.patches:
        patch = domain.patches[m]
        for b, blk in enumerate(uspace.blocks[m]):
            if blk.j_lo > p:
                continue
            net = blk.net(patch)
            j_hi_loc = min(p, blk.j_hi) - blk.j_lo
            for i in range(blk.n1):
                for jl in range(j_hi_loc + 1):
                    a = uspace.flat(m, b, i, jl)
                    cols[0][a] = 1.0
                    cols[1][a] = net[i, jl, 0]
                    cols[2][a] = net[i, jl, 1]
    return cols


class M0Result:
    """M0 with its bookkeeping."""

    def __init__(self, matrix, col_kind, center_cols, unc2col, removed):
        self.matrix = matrix          # (N, N4) csc
        self.col_kind = col_kind      # 0 plain, 1 center
        self.center_cols = center_cols  # group index -> (c1, c2, c3)
        self.unc2col = unc2col        # uncoupled index -> plain column (-1)
        self.removed = removed        # set of removed uncoupled indices

    @property
    def N4(self):
        return self.matrix.shape[1]


def _blocks_with_layer(uspace, m, j_global):
    out = []
    for b, blk in enumerate(uspace.blocks[m]):
        if blk.j_lo <= j_global <= blk.j_hi:
            out.append((b, j_global - blk.j_lo))
    return out


def build_m0(uspace, domain=None):
    """Steps 1-4 of the coupling chain as a sparse basis transformation."""
    domain = domain or uspace.domain
    N = uspace.N
    p = domain.p
    n2 = {gi: g.radial.n for gi, g in enumerate(domain.groups)}

    # step 1: prune j <= 1 (0-based) in singular groups
    removed = set()
    for gi, g in enumerate(domain.groups):
        if g.c2 != 0.0:
            continue
        for m in g.patches:
            for b, blk in enumerate(uspace.blocks[m]):
                for j_global in (0, 1):
                    if blk.j_lo <= j_global <= blk.j_hi:
                        jl = j_global - blk.j_lo
                        for i in range(blk.n1):
                            removed.add(uspace.flat(m, b, i, jl))

    # step 2: C0 identification across interfaces
    uf = _UnionFind(N)
    for itf in domain.interfaces:
        if itf.kind == "radial":
            mL, mR = itf.left, itf.right
            bl, br = uspace.blocks[mL], uspace.blocks[mR]
            if len(bl) != len(br):
                raise GeometryError("block structure differs across interface", tag="topology-error")
            for b, (bL, bR) in enumerate(zip(bl, br)):
                if (bL.j_lo, bL.j_hi) != (bR.j_lo, bR.j_hi):
                    raise GeometryError("radial ranges differ across interface", tag="topology-error")
                for jl in range(bL.nj):
                    uf.union(
                        uspace.flat(mL, b, bL.n1 - 1, jl), uspace.flat(mR, b, 0, jl)
                    )
        else:
            mA, mB = itf.left, itf.right
            gA = domain.group_of(mA)
            gB = domain.group_of(mB)
            jA = n2[gA] - 1
            jB = n2[gB] - 1
            (bA, jlA), = _blocks_with_layer(uspace, mA, jA)
            (bB, jlB), = _blocks_with_layer(uspace, mB, jB)
            n1A = uspace.blocks[mA][bA].n1
            n1B = uspace.blocks[mB][bB].n1
            if n1A != n1B:
                raise GeometryError("outer interface bases differ", tag="topology-error")
            for i in range(n1A):
                uf.union(
                    uspace.flat(mA, bA, i, jlA),
                    uspace.flat(mB, bB, n1B - 1 - i, jlB),
                )

    # step 4 data: essential BC layer removal (applied to merged classes)
    group_constrained = set()
    for be in domain.boundary:
        if be.edge != "outer":
            continue
        nlay = _ESSENTIAL_LAYERS.get(be.tag)
        if nlay is None:
            raise GeometryError("unknown bc tag %r" % be.tag, tag="config-error")
        if nlay == 0:
            continue
        m = be.patch
        gi = domain.group_of(m)
        group_constrained.add(gi)
        for j_global in range(n2[gi] - nlay, n2[gi]):
            for b, jl in _blocks_with_layer(uspace, m, j_global):
                for i in range(uspace.blocks[m][b].n1):
                    removed.add(uspace.flat(m, b, i, jl))
    for itf in domain.interfaces:
        if itf.kind == "outer":
            group_constrained.add(domain.group_of(itf.left))
            group_constrained.add(domain.group_of(itf.right))
    for gi in group_constrained:
        g = domain.groups[gi]
        if g.c2 == 0.0 and not (p + 1 <= n2[gi] - 2):
            raise CouplingError(
                "center functions of group %d reach constrained layers; "
                "need n2 >= p+3 (got n2=%d, p=%d)" % (gi, n2[gi], p),
                tag="config-error",
            )

    # collect merged classes of retained indices
    classes = {}
    for a in range(N):
        root = uf.find(a)
        classes.setdefault(root, []).append(a)
    removed_classes = set()
    for root, members in classes.items():
        if any(a in removed for a in members):
            removed_classes.add(root)

    rows, cols, vals = [], [], []
    col_kind = []
    unc2col = np.full(N, -1, dtype=int)
    k = 0
    for root in sorted(classes):
        if root in removed_classes:
            continue
        members = classes[root]
        for a in members:
            rows.append(a)
            cols.append(k)
            vals.append(1.0)
            unc2col[a] = k
        col_kind.append(0)
        k += 1

    center_cols = {}
    for gi, g in enumerate(domain.groups):
        if g.c2 != 0.0:
            continue
        triple = []
        for coeffs in scaling_center_functions(uspace, gi):
            for a, v in coeffs.items():
                rows.append(a)
                cols.append(k)
                vals.append(v)
            col_kind.append(1)
            triple.append(k)
            k += 1
        center_cols[gi] = tuple(triple)

    M0 = sp.csc_matrix((vals, (rows, cols)), shape=(N, k))
    return M0Result(M0, np.array(col_kind), center_cols, unc2col, removed)


# ----------------------------------------------------------------------
# MJ: normal-derivative jump Gram matrix


def _interface_sides(domain, itf):
    """(patch, edge-parametric mapper, normal direction) for both sides."""
    if itf.kind == "radial":
        sideL = (itf.left, lambda t: (1.0, t), np.array([1.0, 0.0]))
        sideR = (itf.right, lambda t: (0.0, t), None)
    else:
        sideL = (itf.left, lambda t: (t, 1.0), np.array([0.0, 1.0]))
        sideR = (itf.right, lambda t: (1.0 - t, 1.0), None)
    return sideL, sideR


def _interface_quadrature(domain, itf, nq):
    """(params t, weights including the 1D arc measure)."""
    if itf.kind == "radial":
        patch = domain.patches[itf.left]
        spans = patch.radial.spans()
        speed = patch.c1 * np.hypot(*(itf.corner - patch.x0))
        ts, ws = [], []
        for _, a, b in spans:
            x, w = gauss_points(nq, a, b)
            ts.append(x)
            ws.append(w * speed)
        return np.concatenate(ts), np.concatenate(ws)
    edge = domain.patches[itf.left].outer_edge_curve()
    ts, ws = [], []
    for _, a, b in edge.kv.spans():
        x, w = gauss_points(nq, a, b)
        _, d1 = edge.eval(x, nders=1)
        ts.append(x)
        ws.append(w * np.hypot(d1[:, 0], d1[:, 1]))
    return np.concatenate(ts), np.concatenate(ws)


def _jump_rows(uspace, m0res, itf, ts):
    """Jump of n_L . grad over coupled columns at interface params ts.

    Returns (rows (npts, nact), active column indices).
    """
    domain = uspace.domain
    M0csr = m0res.matrix.tocsr()
    (mL, mapL, ndir), (mR, mapR, _) = _interface_sides(domain, itf)

    col_set = {}

    def touched(side_m, z, x):
        idx, V, G, _ = uspace.physical_eval(side_m, z, x, nders=1)
        for a in idx:
            sl = slice(M0csr.indptr[a], M0csr.indptr[a + 1])
            for c in M0csr.indices[sl]:
                col_set.setdefault(c, len(col_set))
        return idx, V, G

    data = []
    for t in ts:
        zL, xL = mapL(t)
        zR, xR = mapR(t)
        pl = domain.patches[mL]
        ge = pl.geom_eval(zL, xL)
        n = np.linalg.solve(ge.jac.T, ndir)
        n /= np.hypot(*n)
        data.append((touched(mL, zL, xL), touched(mR, zR, xR), n))

    nact = len(col_set)
    rows = np.zeros((len(ts), nact))
    for r, ((idxL, _, GL), (idxR, _, GR), n) in enumerate(data):
        for sign, idx, G in ((1.0, idxL, GL), (-1.0, idxR, GR)):
            nd = G @ n
            for a, v in zip(idx, nd):
                sl = slice(M0csr.indptr[a], M0csr.indptr[a + 1])
                for c, coef in zip(M0csr.indices[sl], M0csr.data[sl]):
                    rows[r, col_set[c]] += sign * coef * v
    active = np.empty(nact, dtype=int)
    for c, loc in col_set.items():
        active[loc] = c
    return rows, active


def assemble_jump_matrix(uspace, m0res, nquad=None):
    """Symmetric PSD Gram matrix of normal-derivative jumps (sparse, N4^2).

    Gauss points are strictly inside knot spans (never at xi=0); default
    p+2 points per span so a vanishing quadrature jump certifies a vanishing
    jump function on radial interfaces.
    """
    domain = uspace.domain
    nq = nquad or (domain.p + 2)
    N4 = m0res.N4
    MJ = sp.csc_matrix((N4, N4))
    for itf in domain.interfaces:
        ts, ws = _interface_quadrature(domain, itf, nq)
        rows, active = _jump_rows(uspace, m0res, itf, ts)
        local = rows.T @ (rows * ws[:, None])
        local = sp.coo_matrix(
            (
                local.ravel(),
                (
                    np.repeat(active, len(active)),
                    np.tile(active, len(active)),
                ),
            ),
            shape=(N4, N4),
        )
        MJ = (MJ + local.tocsc()).tocsc()
    return MJ


def nullspace(MJ, tol=1e-10):
    """Orthonormal basis of {v : MJ v = 0} via a spectral cutoff.

    Rows/columns that are identically zero pass through as identity
    columns; the remaining active block is decomposed densely and
    eigenvectors with eigenvalue <= tol * max eigenvalue are kept,
    ordered by ascending eigenvalue.
    """
    MJ = sp.csc_matrix(MJ)
    N4 = MJ.shape[0]
    rownorm = np.asarray(np.abs(MJ).sum(axis=1)).ravel()
    active = np.flatnonzero(rownorm > 0.0)
    inactive = np.flatnonzero(rownorm == 0.0)
    cols = []
    if len(inactive):
        eye = sp.coo_matrix(
            (np.ones(len(inactive)), (inactive, np.arange(len(inactive)))),
            shape=(N4, len(inactive)),
        )
        cols.append(eye.tocsc())
    svals = np.zeros(0)
    if len(active):
        block = MJ[np.ix_(active, active)].toarray()
        block = 0.5 * (block + block.T)
        lam, vec = np.linalg.eigh(block)
        lmax = lam[-1] if len(lam) else 0.0
        keep = lam <= tol * max(lmax, 0.0)
        svals = lam
        if np.any(keep):
            emb = sp.lil_matrix((N4, int(keep.sum())))
            emb[active, :] = vec[:, keep]
            cols.append(emb.tocsc())
    if not cols:
        raise CouplingError("jump matrix has empty null space", tag="no-c1-space")
    M1 = sp.hstack(cols).tocsc()
    if M1.shape[1] == 0:
        raise CouplingError("jump matrix has empty null space", tag="no-c1-space")
    return M1, svals


def gram_rank(MJ, tol):
    """Brute-force rank of a PSD Gram matrix by diagonally pivoted
    elimination (independent of the spectral path)."""
    A = np.array(sp.csc_matrix(MJ).toarray(), dtype=float)
    n = A.shape[0]
    scale = np.max(np.diagonal(A)) if n else 0.0
    if scale <= 0.0:
        return 0
    rank = 0
    for _ in range(n):
        d = np.diagonal(A).copy()
        k = int(np.argmax(d))
        if d[k] <= tol * scale:
            break
        col = A[:, k] / d[k]
        A -= np.outer(col, A[k, :])
        A[k, :] = 0.0
        A[:, k] = 0.0
        rank += 1
    return rank


# ----------------------------------------------------------------------
# coupled space


class CoupledSpace:
    """A C1-coupled multipatch space with its transformation chain."""

    def __init__(self, domain, uspace, m0res, MJ, M1, svals, tol_null):
        self.domain = domain
        self.uspace = uspace
        self.m0res = m0res
        self.M0 = m0res.matrix
        self.MJ = MJ
        self.M1 = M1
        self.svals = svals
        self.tol_null = tol_null
        self.M = (self.M0 @ self.M1).tocsc()

    @property
    def N(self):
        return self.M0.shape[0]

    @property
    def N4(self):
        return self.M0.shape[1]

    @property
    def N6(self):
        return self.M1.shape[1]

    def expand(self, z):
        """Coupled coefficients -> uncoupled coefficient vector."""
        return np.asarray(self.M @ z).ravel()


def build_coupled_space(domain, bc=None, tol_null=1e-10, interface_quad=None, uspace=None):
    """Full chain: M0, MJ, M1 with jump-seminorm verification."""
    if bc is not None:
        from .geometry import apply_bc_tags

        apply_bc_tags(domain, bc)
    if uspace is None:
        uspace = UncoupledSpace.from_domain(domain)
    m0res = build_m0(uspace, domain)
    MJ = assemble_jump_matrix(uspace, m0res, nquad=interface_quad)
    M1, svals = nullspace(MJ, tol=tol_null)
    cs = CoupledSpace(domain, uspace, m0res, MJ, M1, svals, tol_null)
    if len(svals):
        lmax = max(svals[-1], 0.0)
        if lmax > 0.0:
            semi = (MJ @ M1).multiply(M1).sum(axis=0)
            semi = np.sqrt(np.maximum(np.asarray(semi).ravel(), 0.0))
            if np.max(semi) > 1e-8 * np.sqrt(lmax):
                raise CouplingError(
                    "null-space columns have nonzero jump seminorm (max %.2e)"
                    % np.max(semi),
                    tag="no-c1-space",
                )
    return cs


def reproduction_vector(cspace, which):
    """Coupled coefficients reproducing the polynomial 1, x or y exactly.

    Uses the isoparametric identity (control net coordinates as
    coefficients); raises if an essential boundary condition removed a
    required function.
    """
    sel = {"1": None, "x": 0, "y": 1}[which]
    uspace = cspace.uspace
    domain = cspace.domain
    ctil = np.empty(cspace.N)
    for m in range(len(domain.patches)):
        patch = domain.patches[m]
        for b, blk in enumerate(uspace.blocks[m]):
            lo = uspace.flat(m, b, 0, 0)
            sz = blk.size
            if sel is None:
                ctil[lo : lo + sz] = 1.0
            else:
                ctil[lo : lo + sz] = blk.net(patch)[:, :, sel].reshape(sz)

    m0res = cspace.m0res
    v4 = np.zeros(cspace.N4)
    comp = {"1": 0, "x": 1, "y": 2}[which]
    for gi, triple in m0res.center_cols.items():
        v4[triple[comp]] = 1.0
    resid = ctil - np.asarray(m0res.matrix @ v4).ravel()
    for a in np.flatnonzero(np.abs(resid) > 1e-12):
        k = m0res.unc2col[a]
        if k < 0:
            raise CouplingError(
                "%r is not representable (boundary conditions removed "
                "required functions)" % which,
                tag="not-applicable",
            )
        v4[k] = resid[a]
    z = np.asarray(cspace.M1.T @ v4).ravel()
    back = np.asarray(cspace.M1 @ z).ravel()
    err = np.linalg.norm(back - v4)
    if err > 1e-8 * max(np.linalg.norm(v4), 1.0):
        raise CouplingError(
            "reproduction vector of %r is not in the C1 null space "
            "(residual %.2e)" % (which, err),
            tag="no-c1-space",
        )
    return z


def c1_jump_report(cspace, nsamples=50, rng=None):
    """Pointwise two-sided C1 check of every coupled basis function.

    For every interface, samples the normal-derivative jump of all N6
    basis functions and reports max |jump| / gradient scale.  The scale of
    a function is its largest gradient magnitude seen at the interface or
    at interior samples of the two adjacent patches (a function whose
    support merely grazes the interface has a tiny trace there but is not
    C1-defective).
    """
    rng = rng or np.random.default_rng(2024)
    uspace = cspace.uspace
    domain = cspace.domain
    Mcsr = cspace.M.tocsr()
    report = []
    for itf in domain.interfaces:
        ts = rng.uniform(0.02, 0.98, nsamples)
        (mL, mapL, ndir), (mR, mapR, _) = _interface_sides(domain, itf)
        jump_max = np.zeros(cspace.N6)
        scale = np.zeros(cspace.N6)
        for m in (mL, mR):
            for _ in range(25):
                z, x = rng.uniform(0.05, 0.95, 2)
                idx, V, G, _ = uspace.physical_eval(m, z, x, nders=1)
                side_gx = np.zeros(cspace.N6)
                side_gy = np.zeros(cspace.N6)
                for a, g in zip(idx, G):
                    sl = slice(Mcsr.indptr[a], Mcsr.indptr[a + 1])
                    side_gx[Mcsr.indices[sl]] += Mcsr.data[sl] * g[0]
                    side_gy[Mcsr.indices[sl]] += Mcsr.data[sl] * g[1]
                scale = np.maximum(scale, np.hypot(side_gx, side_gy))
        for t in ts:
            zL, xL = mapL(t)
            zR, xR = mapR(t)
            ge = domain.patches[mL].geom_eval(zL, xL)
            n = np.linalg.solve(ge.jac.T, ndir)
            n /= np.hypot(*n)
            row_jump = np.zeros(cspace.N6)
            for sign, m, z, x in ((1.0, mL, zL, xL), (-1.0, mR, zR, xR)):
                idx, V, G, _ = uspace.physical_eval(m, z, x, nders=1)
                gn = G @ n
                side_gx = np.zeros(cspace.N6)
                side_gy = np.zeros(cspace.N6)
                for a, v, g in zip(idx, gn, G):
                    sl = slice(Mcsr.indptr[a], Mcsr.indptr[a + 1])
                    cols = Mcsr.indices[sl]
                    coefs = Mcsr.data[sl]
                    row_jump[cols] += sign * coefs * v
                    side_gx[cols] += coefs * g[0]
                    side_gy[cols] += coefs * g[1]
                scale = np.maximum(scale, np.hypot(side_gx, side_gy))
            jump_max = np.maximum(jump_max, np.abs(row_jump))
        # functions with (near-)zero gradients around this interface carry
        # roundoff-level jumps; measure those against the global scale
        floor = max(np.max(scale), 1.0) * 1e-4
        rel = jump_max / np.maximum(scale, floor)
        report.append((itf, float(np.max(rel))))
    return report
