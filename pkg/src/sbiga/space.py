"""Uncoupled per-patch tensor bases and their evaluation.

A patch carries one or more *blocks*: a block is a zeta basis (possibly a
coarser representation of the same boundary curve) tensorized with a
contiguous range of radial indices.  The standard space has one block per
patch covering all radial indices; the two-mesh stabilized space has a
coarse block (j <= p) and a fine block (j >= p+1), see :mod:`sbiga.stabilize`.

All heavy quadrature loops are batched per radial span row.
"""

import numpy as np

from .errors import GeometryError
from .splines import ders_basis, nurbs_ders_basis, gauss_points

__all__ = ["PatchBlock", "UncoupledSpace"]


class PatchBlock:
    """One tensor block of basis functions on a patch."""

    __slots__ = ("curve", "radial", "j_lo", "j_hi", "_net")

    def __init__(self, curve, radial, j_lo, j_hi):
        if not (0 <= j_lo <= j_hi < radial.n):
            raise GeometryError("invalid radial index range", tag="spec-error")
        self.curve = curve
        self.radial = radial
        self.j_lo = j_lo
        self.j_hi = j_hi
        self._net = None

    @property
    def n1(self):
        return self.curve.n

    @property
    def nj(self):
        return self.j_hi - self.j_lo + 1

    @property
    def size(self):
        return self.n1 * self.nj

    def net(self, patch):
        """Control net restricted to this block's radial range."""
        if self._net is None:
            full = patch.control_net(curve=self.curve, radial=self.radial)
            self._net = full[:, self.j_lo : self.j_hi + 1, :]
        return self._net

    def zeta_ders(self, z, nders):
        if self.curve.weights is not None and not np.all(self.curve.weights == 1.0):
            return nurbs_ders_basis(self.curve.kv, self.curve.weights, z, nders)
        return ders_basis(self.curve.kv, z, nders)

    def radial_window(self, x, nders):
        """Active radial indices of this block at xi = x and their ders."""
        first, D = ders_basis(self.radial, x, nders)
        p = self.radial.p
        cols = [c for c in range(p + 1) if self.j_lo <= first + c <= self.j_hi]
        jloc = np.array([first + c - self.j_lo for c in cols], dtype=int)
        return jloc, D[:, cols]


class UncoupledSpace:
    """Flat-indexed union of all patch blocks of a domain."""

    def __init__(self, domain, blocks):
        self.domain = domain
        self.blocks = blocks  # blocks[m] = list of PatchBlock
        self.offsets = []
        off = 0
        for per_patch in blocks:
            row = []
            for b in per_patch:
                row.append(off)
                off += b.size
            self.offsets.append(row)
        self.N = off

    @classmethod
    def from_domain(cls, domain):
        blocks = [
            [PatchBlock(pa.curve, pa.radial, 0, pa.radial.n - 1)] for pa in domain.patches
        ]
        return cls(domain, blocks)

    def flat(self, m, b, i, jloc):
        return self.offsets[m][b] + i * self.blocks[m][b].nj + jloc

    def patch_slice(self, m):
        lo = self.offsets[m][0]
        last = self.blocks[m][-1]
        hi = self.offsets[m][-1] + last.size
        return lo, hi

    # ------------------------------------------------------------------
    # pointwise evaluation

    def parametric_eval(self, m, z, x, nders=2):
        """Active flat indices and parametric value/deriv arrays at (z, x)."""
        idx, V, D10, D01, D20, D11, D02 = [], [], [], [], [], [], []
        for b, blk in enumerate(self.blocks[m]):
            f1, Dz = blk.zeta_ders(z, nders)
            jloc, Dx = blk.radial_window(x, nders)
            if len(jloc) == 0:
                continue
            ii = np.arange(f1, f1 + blk.curve.p + 1)
            flat = (self.offsets[m][b] + ii[:, None] * blk.nj + jloc[None, :]).ravel()
            idx.append(flat)
            V.append(np.outer(Dz[0], Dx[0]).ravel())
            if nders >= 1:
                D10.append(np.outer(Dz[1], Dx[0]).ravel())
                D01.append(np.outer(Dz[0], Dx[1]).ravel())
            if nders >= 2:
                D20.append(np.outer(Dz[2], Dx[0]).ravel())
                D11.append(np.outer(Dz[1], Dx[1]).ravel())
                D02.append(np.outer(Dz[0], Dx[2]).ravel())
        out = [np.concatenate(idx), np.concatenate(V)]
        for part in (D10, D01, D20, D11, D02):
            out.append(np.concatenate(part) if part else None)
        return tuple(out)

    def physical_eval(self, m, z, x, nders=2):
        """Active indices with physical gradients/Hessians at (z, x)."""
        patch = self.domain.patches[m]
        idx, V, D10, D01, D20, D11, D02 = self.parametric_eval(m, z, x, nders)
        if nders == 0:
            return idx, V, None, None
        ge = patch.geom_eval(z, x)
        if abs(ge.det) < 1e-14:
            raise GeometryError("Jacobian numerically singular", tag="singular-jacobian")
        Jinv = np.linalg.inv(ge.jac)
        gpar = np.stack([D10, D01], axis=1)
        gphys = gpar @ Jinv
        if nders == 1:
            return idx, V, gphys, None
        Hpar = np.empty((len(V), 2, 2))
        Hpar[:, 0, 0] = D20
        Hpar[:, 0, 1] = Hpar[:, 1, 0] = D11
        Hpar[:, 1, 1] = D02
        corr = gphys[:, 0, None, None] * ge.d2[0] + gphys[:, 1, None, None] * ge.d2[1]
        H = np.einsum("ki,nkl,lj->nij", Jinv, Hpar - corr, Jinv)
        return idx, V, gphys, H

    # ------------------------------------------------------------------
    # batched quadrature tables

    def zeta_spans(self, m):
        """Element span grid in zeta = spans of the finest block curve."""
        per = [blk.curve.kv.spans() for blk in self.blocks[m]]
        finest = max(per, key=len)
        fine_pts = {round(a, 14) for _, a, b in finest} | {1.0}
        for spans in per:
            for _, a, _ in spans:
                if round(a, 14) not in fine_pts:
                    raise GeometryError(
                        "block zeta meshes are not nested", tag="spec-error"
                    )
        return finest

    def quad_tables(self, m, nq1, nq2):
        """Per-patch Gauss tables for row-batched 2D assembly."""
        patch = self.domain.patches[m]
        zs_spans = self.zeta_spans(m)
        xi_spans = patch.radial.spans()
        S1, S2 = len(zs_spans), len(xi_spans)

        Znodes = np.empty((S1, nq1))
        Zw = np.empty((S1, nq1))
        for s, (_, a, b) in enumerate(zs_spans):
            Znodes[s], Zw[s] = gauss_points(nq1, a, b)
        Xnodes = np.empty((S2, nq2))
        Xw = np.empty((S2, nq2))
        for s, (_, a, b) in enumerate(xi_spans):
            Xnodes[s], Xw[s] = gauss_points(nq2, a, b)

        zflat = Znodes.ravel()
        g, g1, g2 = patch.curve.eval(zflat, nders=2)
        geom = {
            "g": g.reshape(S1, nq1, 2),
            "g1": g1.reshape(S1, nq1, 2),
            "g2": g2.reshape(S1, nq1, 2),
        }

        zt = []
        for blk in self.blocks[m]:
            p = blk.curve.p
            val = np.empty((S1, 3, p + 1, nq1))
            idx = np.empty((S1, p + 1), dtype=int)
            for s in range(S1):
                for q in range(nq1):
                    f1, D = blk.zeta_ders(Znodes[s, q], 2)
                    val[s, :, :, q] = D
                idx[s] = np.arange(f1, f1 + p + 1)
            zt.append((idx, val))

        xt = []
        for blk in self.blocks[m]:
            rows = []
            for s in range(S2):
                jloc = None
                vals = None
                for q in range(nq2):
                    jl, D = blk.radial_window(Xnodes[s, q], 2)
                    if jloc is None:
                        jloc = jl
                        vals = np.empty((3, len(jl), nq2))
                    vals[:, :, q] = D
                rows.append((jloc, vals))
            xt.append(rows)

        return _PatchTables(self, m, zs_spans, xi_spans, Znodes, Zw, Xnodes, Xw, geom, zt, xt)


class _PatchTables:
    """Precomputed Gauss data for one patch; rows are radial spans."""

    def __init__(self, space, m, zs_spans, xi_spans, Znodes, Zw, Xnodes, Xw, geom, zt, xt):
        self.space = space
        self.m = m
        self.zs_spans = zs_spans
        self.xi_spans = xi_spans
        self.Znodes = Znodes
        self.Zw = Zw
        self.Xnodes = Xnodes
        self.Xw = Xw
        self.geom = geom
        self.zt = zt
        self.xt = xt
        self.S1 = len(zs_spans)
        self.S2 = len(xi_spans)
        self.nq1 = Znodes.shape[1]
        self.nq2 = Xnodes.shape[1]

    def row_basis(self, s2):
        """Stacked element tensors for radial span row s2.

        Returns (IDX (S1, K), V, D10, D01, D20, D11, D02) each (S1, K, Q)
        with Q = nq1*nq2 and K the number of active functions.
        """
        space, m = self.space, self.m
        parts_idx, parts = [], {k: [] for k in ("V", "D10", "D01", "D20", "D11", "D02")}
        for b, blk in enumerate(space.blocks[m]):
            jloc, Xv = self.xt[b][s2]
            if len(jloc) == 0:
                continue
            Zidx, Zv = self.zt[b]
            pairs = {
                "V": (0, 0),
                "D10": (1, 0),
                "D01": (0, 1),
                "D20": (2, 0),
                "D11": (1, 1),
                "D02": (0, 2),
            }
            S1 = self.S1
            for key, (dz, dx) in pairs.items():
                T = np.einsum("skq,jr->skjqr", Zv[:, dz], Xv[dx])
                parts[key].append(T.reshape(S1, -1, self.nq1 * self.nq2))
            flat = (
                space.offsets[m][b]
                + Zidx[:, :, None] * blk.nj
                + jloc[None, None, :]
            ).reshape(S1, -1)
            parts_idx.append(flat)
        IDX = np.concatenate(parts_idx, axis=1)
        arrs = {k: np.concatenate(v, axis=1) for k, v in parts.items()}
        return IDX, arrs

    def row_geometry(self, s2):
        """Jacobian data on row s2: returns dict of (S1, Q) arrays."""
        patch = self.space.domain.patches[self.m]
        qv = patch.c1 * self.Xnodes[s2] + patch.c2      # (nq2,)
        g = self.geom["g"]
        g1 = self.geom["g1"]
        g2 = self.geom["g2"]
        x0 = patch.x0

        def mix(zq, xq):
            return (zq[:, :, None] * xq[None, None, :]).reshape(self.S1, -1)

        ones = np.ones_like(qv)
        J11 = mix(g1[:, :, 0], qv)
        J21 = mix(g1[:, :, 1], qv)
        J12 = mix(g[:, :, 0] - x0[0], patch.c1 * ones)
        J22 = mix(g[:, :, 1] - x0[1], patch.c1 * ones)
        det = J11 * J22 - J12 * J21
        px = mix(g[:, :, 0] - x0[0], qv) + x0[0]
        py = mix(g[:, :, 1] - x0[1], qv) + x0[1]
        w2d = (self.Zw[:, :, None] * self.Xw[s2][None, None, :]).reshape(self.S1, -1)
        # parametric second derivatives of F
        F1zz = mix(g2[:, :, 0], qv)
        F2zz = mix(g2[:, :, 1], qv)
        F1zx = mix(g1[:, :, 0], patch.c1 * ones)
        F2zx = mix(g1[:, :, 1], patch.c1 * ones)
        return {
            "J11": J11, "J12": J12, "J21": J21, "J22": J22, "det": det,
            "px": px, "py": py, "w": w2d,
            "F1zz": F1zz, "F2zz": F2zz, "F1zx": F1zx, "F2zx": F2zx,
        }

    def row_physical(self, s2):
        """Physical gradients and Hessian components on row s2.

        Returns (IDX, V, GX, GY, H11, H22, H12, geo) with arrays (S1, K, Q).
        """
        IDX, A = self.row_basis(s2)
        geo = self.row_geometry(s2)
        det = geo["det"]
        I11 = geo["J22"] / det
        I12 = -geo["J12"] / det
        I21 = -geo["J21"] / det
        I22 = geo["J11"] / det
        # grad = J^{-T} [D10, D01]
        GX = I11[:, None, :] * A["D10"] + I21[:, None, :] * A["D01"]
        GY = I12[:, None, :] * A["D10"] + I22[:, None, :] * A["D01"]
        # corrected parametric Hessian
        K11 = A["D20"] - GX * geo["F1zz"][:, None, :] - GY * geo["F2zz"][:, None, :]
        K12 = A["D11"] - GX * geo["F1zx"][:, None, :] - GY * geo["F2zx"][:, None, :]
        K22 = A["D02"]
        # H = J^{-1 T} K J^{-1} with J^{-1} = [[I11, I12], [I21, I22]]
        a, b, c, d = I11[:, None, :], I12[:, None, :], I21[:, None, :], I22[:, None, :]
        H11 = a * a * K11 + 2.0 * a * c * K12 + c * c * K22
        H22 = b * b * K11 + 2.0 * b * d * K12 + d * d * K22
        H12 = a * b * K11 + (a * d + b * c) * K12 + c * d * K22
        return IDX, A["V"], GX, GY, H11, H22, H12, geo
