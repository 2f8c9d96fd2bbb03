import numpy as np
import pytest
import scipy.sparse as sp

from sbiga.coupling import build_coupled_space, reproduction_vector
from sbiga.errors import AssemblyError, GeometryError, SolverError
from sbiga.geometry import SBPatch, line_curve, locate_point, make_domain
from sbiga.models import fan2, square4
from sbiga.plate import (
    LoadSpec,
    PlateMaterial,
    Solution,
    assemble_load,
    assemble_stiffness,
    bending_moments,
    cos2_square,
    domain_area,
    error_norms,
    evaluate,
    manufactured_rhs,
    point_load_reference,
    solve,
    solve_plate,
)


@pytest.fixture(scope="module")
def clamped_square():
    dom = square4(degree=3, bc={"all": "clamped"}).with_segments(4, 4, 1)
    return build_coupled_space(dom)


@pytest.fixture(scope="module")
def material():
    return PlateMaterial(E=1e4, nu=0.0, D=1.0)


class TestMaterial:
    def test_stiffness_formula(self):
        m = PlateMaterial(E=200.0, nu=0.3, t=0.1)
        assert m.D == pytest.approx(200.0 * 1e-3 / (12 * (1 - 0.09)))

    def test_thickness_from_stiffness(self):
        m = PlateMaterial(E=1e4, nu=0.0, D=1.0)
        assert m.D == 1.0
        assert PlateMaterial(E=1e4, nu=0.0, t=m.t).D == pytest.approx(1.0, rel=1e-14)

    def test_exactly_one_of_t_d(self):
        with pytest.raises(AssemblyError):
            PlateMaterial(E=1.0, nu=0.0)
        with pytest.raises(AssemblyError):
            PlateMaterial(E=1.0, nu=0.0, t=0.1, D=1.0)


class TestAssembleStiffness:
    def test_symmetry(self, clamped_square, material):
        A = assemble_stiffness(clamped_square, material)
        d = abs(A - A.T)
        assert d.max() <= 1e-12 * abs(A).max()

    def test_nu_zero_matches_reduced_integrand_bitwise(self):
        # general path at nu=0 vs an integrand without the nu term
        dom = fan2(degree=2).with_segments(2, 2, 1)
        cs = build_coupled_space(dom)
        mat0 = PlateMaterial(E=1.0, nu=0.0, D=2.5)
        A = assemble_stiffness(cs, mat0)

        D = mat0.D
        rows, cols, vals = [], [], []
        for m in range(len(dom.patches)):
            tab = cs.uspace.quad_tables(m, 3, 3)
            for s2 in range(tab.S2):
                IDX, V, GX, GY, H11, H22, H12, geo = tab.row_physical(s2)
                w = geo["w"] * np.abs(geo["det"])
                loc = D * (
                    np.einsum("saq,sbq,sq->sab", H11, H11, w)
                    + np.einsum("saq,sbq,sq->sab", H22, H22, w)
                    + 2.0 * np.einsum("saq,sbq,sq->sab", H12, H12, w)
                )
                K = IDX.shape[1]
                rows.append(np.repeat(IDX, K, axis=1).ravel())
                cols.append(np.tile(IDX, (1, K)).ravel())
                vals.append(loc.ravel())
        Atil = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(cs.N, cs.N),
        ).tocsc()
        B = (cs.M.T @ Atil @ cs.M).tocsc()
        assert (A != B).nnz == 0  # bitwise identical

    def test_positive_definite_when_clamped(self, clamped_square, material):
        A = assemble_stiffness(clamped_square, material)
        lam = np.linalg.eigvalsh(A.toarray())
        assert lam.min() > 0

    def test_over_integration_oracle_regular_patch(self):
        # on a regular (c2 > 0) patch the rational integrand is analytic and
        # Gauss quadrature converges exponentially: entries at order 8 match
        # the order-12 reference almost exactly
        c = line_curve((0.0, 1.0), (1.0, 1.0), 3)
        dom = make_domain([SBPatch(c, (0.5, 0.0), c1=1.0, c2=1.0).with_segments(2, 2, 1)])
        cs = build_coupled_space(dom)
        mat = PlateMaterial(E=1.0, nu=0.2, D=1.0)
        A8 = assemble_stiffness(cs, mat, quad=8).toarray()
        A12 = assemble_stiffness(cs, mat, quad=12).toarray()
        assert np.max(np.abs(A8 - A12)) <= 1e-9 * np.max(np.abs(A12))


class TestAssembleLoad:
    def test_zero_loads_zero_vector(self, clamped_square):
        f = assemble_load(clamped_square, LoadSpec())
        assert np.all(f == 0.0)

    def test_constant_load_total_equals_area(self):
        # free space represents constants: f . z_1 = integral of 1 = area
        dom = square4(degree=3).with_segments(3, 3, 1)
        cs = build_coupled_space(dom)
        f = assemble_load(cs, LoadSpec(surface=lambda x, y: np.ones_like(x)))
        z1 = reproduction_vector(cs, "1")
        assert f @ z1 == pytest.approx(domain_area(cs), rel=1e-10)

    def test_point_load_reproduction_identity(self):
        dom = square4(degree=3, offset=(-0.15, 0.1)).with_segments(3, 3, 1)
        cs = build_coupled_space(dom)
        # load at the scaling center: the dual pairing with the constant 1
        f = assemble_load(cs, LoadSpec(point_loads=[((-0.15, 0.1), 2.5)]))
        z1 = reproduction_vector(cs, "1")
        assert f @ z1 == pytest.approx(2.5, abs=1e-12)

    def test_point_load_outside_domain(self, clamped_square):
        with pytest.raises(GeometryError):
            assemble_load(clamped_square, LoadSpec(point_loads=[((3.0, 0.0), 1.0)]))


class TestSolve:
    def test_identity(self):
        A = sp.identity(5, format="csc")
        f = np.arange(5.0)
        x, res, est = solve(A, f)
        assert np.allclose(x, f)
        assert res <= 1e-14
        assert est == pytest.approx(1.0, rel=0.2)

    def test_explicit_inverse_oracle(self):
        rng = np.random.default_rng(0)
        B = rng.standard_normal((3, 3))
        A = B @ B.T + 3 * np.eye(3)
        f = rng.standard_normal(3)
        x, res, _ = solve(sp.csc_matrix(A), f)
        assert np.allclose(x, np.linalg.inv(A) @ f, atol=1e-12)

    def test_clamped_case_factorizes(self, clamped_square, material):
        exact = cos2_square()
        loads = LoadSpec(surface=manufactured_rhs(exact, material.D))
        sol = solve_plate(clamped_square, material, loads)
        assert sol.residual <= 1e-8 * np.linalg.norm(
            assemble_load(clamped_square, loads)
        )
        assert np.isfinite(sol.cond_estimate) and sol.cond_estimate > 1.0

    def test_singular_matrix_raises(self):
        A = sp.csc_matrix(np.zeros((3, 3)))
        with pytest.raises(SolverError):
            solve(A, np.ones(3))


class TestEvaluate:
    def test_zero_coeffs(self, clamped_square, material):
        sol = Solution(clamped_square, np.zeros(clamped_square.N6), material, LoadSpec(), 0, 1)
        u, g, H = evaluate(sol, [(0, 0.3, 0.5), (2, 0.9, 0.1)])
        assert np.all(u == 0) and np.all(g == 0) and np.all(H == 0)

    def test_x_reproduction_field(self, material):
        dom = square4(degree=3).with_segments(3, 3, 1)
        cs = build_coupled_space(dom)
        z = reproduction_vector(cs, "x")
        sol = Solution(cs, z, material, LoadSpec(), 0, 1)
        rng = np.random.default_rng(1)
        pts = [(int(rng.integers(0, 4)), rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98))
               for _ in range(100)]
        u, g, H = evaluate(sol, pts)
        xs = np.array([dom.patches[m].map(z_, x_)[0] for m, z_, x_ in pts])
        assert np.max(np.abs(u - xs)) <= 1e-10
        assert np.max(np.abs(g - [1.0, 0.0])) <= 1e-10
        assert np.max(np.abs(H)) <= 1e-9

    def test_finite_difference_oracle(self, clamped_square, material):
        exact = cos2_square()
        loads = LoadSpec(surface=manufactured_rhs(exact, material.D))
        sol = solve_plate(clamped_square, material, loads, cond=False)
        dom = clamped_square.domain
        rng = np.random.default_rng(2)

        def u_at(xy):
            return float(evaluate(sol, [locate_point(dom, xy)], nders=0)[0])

        for _ in range(8):
            m = int(rng.integers(0, 4))
            zp, xp = rng.uniform(0.35, 0.65, 2)
            xy = dom.patches[m].map(zp, xp)
            _, g, _ = evaluate(sol, [(m, zp, xp)])
            eps = 1e-6
            fdx = (u_at(xy + [eps, 0.0]) - u_at(xy - [eps, 0.0])) / (2 * eps)
            fdy = (u_at(xy + [0.0, eps]) - u_at(xy - [0.0, eps])) / (2 * eps)
            assert g[0][0] == pytest.approx(fdx, rel=1e-4, abs=1e-8)
            assert g[0][1] == pytest.approx(fdy, rel=1e-4, abs=1e-8)

    def test_derivatives_at_center_rejected(self, clamped_square, material):
        sol = Solution(clamped_square, np.zeros(clamped_square.N6), material, LoadSpec(), 0, 1)
        with pytest.raises(GeometryError):
            evaluate(sol, [(0, 0.5, 0.0)], nders=1)
        assert evaluate(sol, [(0, 0.5, 0.0)], nders=0)[0] == 0.0


class TestBendingMoments:
    def test_nu_zero_m11(self):
        dom = fan2(degree=3).with_segments(2, 2, 1)
        cs = build_coupled_space(dom)
        mat = PlateMaterial(E=1.0, nu=0.0, D=3.0)
        z = reproduction_vector(cs, "x")
        sol = Solution(cs, z, mat, LoadSpec(), 0, 1)
        pts = [(0, 0.4, 0.6), (1, 0.7, 0.3)]
        m11, m22, m12 = bending_moments(sol, pts)
        _, _, H = evaluate(sol, pts)
        assert np.allclose(m11, mat.D * H[:, 0, 0], atol=1e-14)

    def test_quadratic_field_constant_moments(self):
        # fit u = x^2/2 on a polynomial fan patch; m11 = D, m22 = nu D, m12 = 0
        dom = fan2(degree=3).with_segments(2, 2, 1)
        cs = build_coupled_space(dom)
        mat = PlateMaterial(E=1.0, nu=0.3, D=2.0)
        rng = np.random.default_rng(3)
        pts = [(int(rng.integers(0, 2)), rng.uniform(0.02, 0.98), rng.uniform(0.05, 1.0))
               for _ in range(3 * cs.N6)]
        rows = np.zeros((len(pts), cs.N6))
        rhs = np.zeros(len(pts))
        Mcsr = cs.M.tocsr()
        for r, (m, zp, xp) in enumerate(pts):
            idx, V = cs.uspace.parametric_eval(m, zp, xp, nders=0)[:2]
            for a, v in zip(idx, V):
                sl = slice(Mcsr.indptr[a], Mcsr.indptr[a + 1])
                rows[r, Mcsr.indices[sl]] += Mcsr.data[sl] * v
            rhs[r] = 0.5 * dom.patches[m].map(zp, xp)[0] ** 2
        z, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
        assert np.max(np.abs(rows @ z - rhs)) <= 1e-9  # x^2/2 is in the space
        sol = Solution(cs, z, mat, LoadSpec(), 0, 1)
        m11, m22, m12 = bending_moments(sol, [(0, 0.3, 0.7), (1, 0.6, 0.4)])
        assert np.allclose(m11, mat.D, atol=1e-7)
        assert np.allclose(m22, mat.nu * mat.D, atol=1e-7)
        assert np.allclose(m12, 0.0, atol=1e-7)


class TestErrorNorms:
    def test_exact_in_space_field(self, material):
        dom = square4(degree=3).with_segments(2, 2, 1)
        cs = build_coupled_space(dom)
        z = reproduction_vector(cs, "x")
        sol = Solution(cs, z, material, LoadSpec(), 0, 1)
        from sbiga.plate import ExactSolution

        exact = ExactSolution(
            value=lambda x, y: x,
            grad=lambda x, y: (np.ones_like(x), np.zeros_like(x)),
            hess=lambda x, y: (np.zeros_like(x),) * 3,
        )
        rep = error_norms(sol, exact)
        assert rep.h2_semi <= 1e-12 and rep.l2 <= 1e-12

    def test_quadrature_convergence(self, clamped_square, material):
        exact = cos2_square()
        loads = LoadSpec(surface=manufactured_rhs(exact, material.D))
        sol = solve_plate(clamped_square, material, loads, cond=False)
        r1 = error_norms(sol, exact)
        r2 = error_norms(sol, exact, quad=8)
        assert abs(r1.h2_semi - r2.h2_semi) <= 1e-3 * r2.h2_semi
        assert abs(r1.l2 - r2.l2) <= 1e-3 * r2.l2


class TestManufacturedRhs:
    def test_zero_for_zero(self):
        from sbiga.plate import ExactSolution

        exact = ExactSolution(None, None, None, biharmonic=lambda x, y: 0.0 * x)
        g = manufactured_rhs(exact, 5.0)
        assert g(0.3, 0.4) == 0.0

    def test_x3y_is_biharmonic(self):
        # Lap^2(x^3 y) = 0: finite differences of the exact biharmonic field
        h = 1e-2
        u = lambda x, y: x**3 * y

        def lap(f, x, y):
            return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / h**2

        val = lap(lambda a, b: lap(u, a, b), 0.21, -0.13)
        assert abs(val) <= 1e-6

    def test_cos2_fd_oracle(self):
        exact = cos2_square()
        g = manufactured_rhs(exact, 1.0)
        h = 1e-2

        def lap(f, x, y):
            return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * f(x, y)) / h**2

        for xy in ((0.0, 0.0), (0.21, -0.37), (-0.4, 0.11)):
            fd = lap(lambda a, b: lap(exact.value, a, b), *xy)
            assert g(*xy) == pytest.approx(fd, rel=1e-3, abs=1e-3 * abs(fd) + 1.0)


class TestPointLoadReference:
    def test_single_term(self):
        assert point_load_reference(terms=1) == pytest.approx(4 / (np.pi**4 * 4), rel=1e-14)

    def test_large_sum_matches_reported_value(self):
        assert point_load_reference(terms=10000) == pytest.approx(0.01160, abs=5e-6)

    def test_monotone_in_terms(self):
        vals = [point_load_reference(terms=t) for t in (1, 3, 9, 33, 101)]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestStructuralInvariants:
    def test_energy_monotone_under_nested_refinement(self):
        # Galerkin orthogonality proxy: for nested clamped spaces the energy
        # of the discrete solution is non-decreasing
        from sbiga.models import square4

        exact = cos2_square()
        mat = PlateMaterial(E=1e4, nu=0.0, D=1.0)
        loads = LoadSpec(surface=manufactured_rhs(exact, mat.D))
        energies = []
        for s in (2, 4, 8):
            dom = square4(degree=3, bc={"all": "clamped"}).with_segments(s, s, 1)
            cs = build_coupled_space(dom)
            A = assemble_stiffness(cs, mat)
            f = assemble_load(cs, loads)
            x, _, _ = solve(A, f, cond=False)
            energies.append(float(x @ (A @ x)))
        assert energies[0] <= energies[1] * (1 + 1e-12)
        assert energies[1] <= energies[2] * (1 + 1e-12)

    def test_point_load_reflection_symmetry(self):
        # centered point load on the symmetric mesh: u(x, y) == u(y, x)
        # == u(-x, -y) at matched samples
        from sbiga.geometry import locate_point
        from sbiga.models import square4

        dom = square4(degree=3, offset=(0.0, 0.0), bc={"all": "simply_supported"})
        cs = build_coupled_space(dom.with_segments(4, 4, 1))
        mat = PlateMaterial(E=1e6, nu=0.0, D=1.0)
        sol = solve_plate(cs, mat, LoadSpec(point_loads=[((0.0, 0.0), 1.0)]), cond=False)
        rng = np.random.default_rng(7)

        def u_at(xy):
            return float(evaluate(sol, [locate_point(cs.domain, xy)], nders=0)[0])

        for _ in range(20):
            x, y = rng.uniform(-0.45, 0.45, 2)
            base = u_at((x, y))
            for mirror in ((y, x), (-x, -y), (-y, -x)):
                assert u_at(mirror) == pytest.approx(base, rel=1e-6, abs=1e-12)

    def test_m11_symmetric_under_xy_swap(self):
        # swapping x and y maps m11 to m22; for the centered point load the
        # m11 field at (x, y) equals m11 at (y, x) after the swap symmetry
        from sbiga.geometry import locate_point
        from sbiga.models import square4

        dom = square4(degree=3, offset=(0.0, 0.0), bc={"all": "simply_supported"})
        cs = build_coupled_space(dom.with_segments(4, 4, 1))
        mat = PlateMaterial(E=1e6, nu=0.0, D=1.0)
        sol = solve_plate(cs, mat, LoadSpec(point_loads=[((0.0, 0.0), 1.0)]), cond=False)
        rng = np.random.default_rng(8)
        for _ in range(12):
            x, y = rng.uniform(0.05, 0.4, 2)
            p1 = locate_point(cs.domain, (x, y))
            p2 = locate_point(cs.domain, (y, x))
            m11_a, m22_a, _ = bending_moments(sol, [p1])
            m11_b, m22_b, _ = bending_moments(sol, [p2])
            assert m11_a[0] == pytest.approx(m22_b[0], rel=1e-6, abs=1e-9)
            assert m22_a[0] == pytest.approx(m11_b[0], rel=1e-6, abs=1e-9)


class TestEdgeFunctionals:
    def test_edge_load_work_against_reproductions(self):
        # int_edge Q * v ds tested through the exactly reproduced fields:
        # with v = 1 the load vector pairs to Q * edge length, with v = x to
        # Q * int_edge x ds
        from sbiga.models import square4

        dom = square4(degree=3).with_segments(2, 2, 1)
        cs = build_coupled_space(dom)
        # patch 1 outer edge is the top side y = 0.5, x in [-0.5, 0.5]
        f = assemble_load(cs, LoadSpec(edge_loads=[(1, 2.0)]))
        z1 = reproduction_vector(cs, "1")
        zx = reproduction_vector(cs, "x")
        assert f @ z1 == pytest.approx(2.0 * 1.0, rel=1e-12)
        assert f @ zx == pytest.approx(0.0, abs=1e-12)

    def test_edge_moment_work_against_reproductions(self):
        # int_edge M * dv/dn ds: zero for v = 1, M * length * n_y for v = y
        from sbiga.models import square4

        dom = square4(degree=3).with_segments(2, 2, 1)
        cs = build_coupled_space(dom)
        f = assemble_load(cs, LoadSpec(edge_moments=[(1, 3.0)]))
        z1 = reproduction_vector(cs, "1")
        zy = reproduction_vector(cs, "y")
        assert f @ z1 == pytest.approx(0.0, abs=1e-12)
        # top edge outward normal is (0, 1): dv/dn of y is 1
        assert f @ zy == pytest.approx(3.0 * 1.0, rel=1e-12)


class TestPointLoadStructure:
    def test_center_load_hits_only_center_columns(self):
        # at the scaling center every pruned-layer function vanishes, so the
        # C0-level load vector is supported on the three center columns
        from sbiga.models import square4

        dom = square4(degree=3, offset=(-0.15, 0.1)).with_segments(3, 3, 1)
        cs = build_coupled_space(dom)
        from sbiga.geometry import locate_point

        m, z, x = locate_point(dom, (-0.15, 0.1))
        idx, V = cs.uspace.parametric_eval(m, z, x, nders=0)[:2]
        row = np.zeros(cs.N)
        row[idx] = V
        f4 = np.asarray(cs.M0.T @ row).ravel()
        nz = set(np.flatnonzero(np.abs(f4) > 1e-14))
        center_cols = set(cs.m0res.center_cols[0])
        assert nz <= center_cols and nz
