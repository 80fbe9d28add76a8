"""Tests for the embedded-layer homogenized continuum."""

import numpy as np
import pytest

from archfem.errors import SingularConstraint
from archfem.interface_law import InterfaceParams, InterfaceState, integrate
from archfem.macro import (
    LayerPointState,
    assemble_A_B,
    compatibility,
    macro_integrate,
)


def layer_params(k_n, k_t, shear_nonlinear=True, **over):
    base = dict(
        k_normal=k_n, k_shear=k_t, f_t=0.10, f_c=24.5, c=0.40,
        tan_phi=0.5, tan_phi_g=0.0, g_t=0.10 / 65.0, g_s=0.125 / 65.0,
        g_c=5.0 / 65.0, mu=0.001, shear_nonlinear=shear_nonlinear,
    )
    base.update(over)
    return InterfaceParams(**base)


def table4_point():
    """Layer trio with the macromodel's per-direction elastic moduli."""
    px = layer_params(4818.0, 4128.0)
    py = layer_params(13980.0, 4128.0, f_t=0.85, c=0.80)
    pz = layer_params(6956.0, 3009.0, shear_nonlinear=False)
    return LayerPointState.virgin(px, py, pz)


def elastic_tangents(point):
    return tuple(p.elastic_stiffness() for p, _ in point.layers)


# ---------------------------------------------------------------------------
# A / B assembly
# ---------------------------------------------------------------------------


class TestAssembleAB:
    def test_diagonal_elastic(self):
        Sx = np.diag([10.0, 4.0, 4.0])
        Sy = np.diag([20.0, 4.0, 4.0])
        Sz = np.diag([30.0, 3.0, 3.0])
        A, B = assemble_A_B(Sx, Sy, Sz)
        assert np.allclose(A, np.diag([8.0, 7.0, 7.0]))
        B_expect = np.zeros((3, 6))
        B_expect[0, 3] = -4.0   # -S_y,22
        B_expect[1, 4] = -3.0   # -S_z,22
        B_expect[2, 3] = 0.0
        B_expect[2, 5] = -3.0   # -S_z,33
        assert np.allclose(B, B_expect)

    def test_table4_entry(self):
        S = np.diag([4818.0, 4128.0, 4128.0])
        A, _ = assemble_A_B(S, S, S)
        assert A[0, 0] == pytest.approx(8256.0)

    def test_jacobian_against_fd(self):
        # A must be the Jacobian of the reciprocity residual w.r.t. the three
        # first-layer shears, including coupled (dilatant) layer tangents.
        p = layer_params(4818.0, 4128.0, tan_phi_g=0.3)
        point = LayerPointState.virgin(p, p, p)
        eps = np.array([-2e-4, -2e-4, -2e-4, 8e-4, 6e-4, 5e-4])
        u = np.array([4.2e-4, 3.1e-4, 2.4e-4])

        def residual(uv):
            dx = np.array([eps[0], uv[0], uv[1]])
            dy = np.array([eps[1], eps[3] - uv[0], uv[2]])
            dz = np.array([eps[2], eps[4] - uv[1], eps[5] - uv[2]])
            rs = [integrate(pp, st, d, compute_tangent=False).s
                  for (pp, st), d in zip(point.layers, (dx, dy, dz))]
            return np.array([rs[0][1] - rs[1][1], rs[0][2] - rs[2][1],
                             rs[1][2] - rs[2][2]])

        dx = np.array([eps[0], u[0], u[1]])
        dy = np.array([eps[1], eps[3] - u[0], u[2]])
        dz = np.array([eps[2], eps[4] - u[1], eps[5] - u[2]])
        tangents = [integrate(pp, st, d).tangent
                    for (pp, st), d in zip(point.layers, (dx, dy, dz))]
        A, _ = assemble_A_B(*tangents)
        h = 1e-9
        A_fd = np.zeros((3, 3))
        for j in range(3):
            up, um = u.copy(), u.copy()
            up[j] += h
            um[j] -= h
            A_fd[:, j] = (residual(up) - residual(um)) / (2 * h)
        assert np.allclose(A, A_fd, rtol=1e-4, atol=1e-4 * np.abs(A).max())

    def test_singular_raises(self):
        dead = np.diag([1.0, 0.0, 0.0])
        with pytest.raises(SingularConstraint):
            assemble_A_B(dead, dead, dead)


# ---------------------------------------------------------------------------
# Compatibility matrix
# ---------------------------------------------------------------------------


class TestCompatibility:
    def test_identical_layers_split_half(self):
        S = np.diag([10.0, 4.0, 4.0])
        C = compatibility(S, S, S)
        assert np.allclose(C[0:3, 0:3], np.eye(3))
        for row, col in ((3, 3), (4, 4), (5, 5)):
            assert C[row, col] == pytest.approx(0.5)

    def test_reciprocity_split_fraction(self):
        # gxz split between layer x (shear modulus a) and layer z (b):
        # alpha_xz = b / (a + b) = 3009/7137
        a, b = 4128.0, 3009.0
        Sx = np.diag([4818.0, a, a])
        Sy = np.diag([13980.0, a, a])
        Sz = np.diag([6956.0, b, b])
        C = compatibility(Sx, Sy, Sz)
        assert C[4, 4] == pytest.approx(b / (a + b))
        assert C[7, 4] == pytest.approx(a / (a + b))

    def test_rows_partition_unit_shear(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            mats = []
            for _ in range(3):
                M = np.diag(rng.uniform(1.0, 10.0, 3))
                M += rng.normal(scale=0.2, size=(3, 3))
                mats.append(M + M.T + 5 * np.eye(3))
            C = compatibility(*mats)
            pair = C[3:6, :] + C[6:9, :]
            expect = np.zeros((3, 6))
            expect[:, 3:6] = np.eye(3)
            assert np.allclose(pair, expect, atol=1e-12)


# ---------------------------------------------------------------------------
# macro_integrate
# ---------------------------------------------------------------------------


class TestMacroIntegrate:
    def test_zero_strain_virgin(self):
        res = macro_integrate(table4_point(), np.zeros(6))
        assert np.allclose(res.sigma, 0.0)
        assert res.iterations == 1
        K_el = res.K
        assert np.allclose(K_el, K_el.T)
        assert K_el[0, 0] == pytest.approx(4818.0)

    def test_elastic_series_shear(self):
        point = table4_point()
        gam = 1e-4
        eps = np.array([0, 0, 0, gam, 0, 0], dtype=float)
        res = macro_integrate(point, eps)
        assert res.sigma[3] == pytest.approx(2064.0 * gam, rel=1e-10)
        assert res.iterations == 1
        # tangent entry equals the series stiffness of the two layers
        assert res.K[3, 3] == pytest.approx(2064.0, rel=1e-10)

    def test_elastic_series_shear_xz(self):
        point = table4_point()
        gam = 1e-4
        res = macro_integrate(point, np.array([0, 0, 0, 0, gam, 0.0]))
        expect = 4128.0 * 3009.0 / (4128.0 + 3009.0)
        assert res.sigma[4] == pytest.approx(expect * gam, rel=1e-10)

    def test_uniaxial_no_poisson_coupling(self):
        point = table4_point()
        res = macro_integrate(point, np.array([1e-5, 0, 0, 0, 0, 0.0]))
        assert res.sigma[0] == pytest.approx(4818.0 * 1e-5, rel=1e-12)
        assert abs(res.sigma[1]) < 1e-14 and abs(res.sigma[2]) < 1e-14

    def test_reciprocity_at_convergence_inelastic(self):
        point = table4_point()
        rng = np.random.default_rng(11)
        eps = np.zeros(6)
        for _ in range(15):
            eps += rng.normal(scale=[2e-5, 2e-5, 2e-5, 2e-4, 2e-4, 2e-4])
            res = macro_integrate(point, eps)
            point = res.new_state
            d = point.d_int
            slots = ((3, 6), (4, 7), (5, 8))
            stresses = []
            for (p, st), cols in zip(point.layers, ((0, 3, 4), (1, 6, 5), (2, 7, 8))):
                s = integrate(p, st, d[list(cols)], compute_tangent=False).s
                stresses.append(s)
            for i, (a, b) in enumerate(slots):
                pass
            r = [stresses[0][1] - stresses[1][1],
                 stresses[0][2] - stresses[2][1],
                 stresses[1][2] - stresses[2][2]]
            assert np.max(np.abs(r)) < 1e-6  # |s_kh - s_hk| small at convergence

    def test_shear_stress_equals_common_layer_stress(self):
        point = table4_point()
        eps = np.array([0, 0, 0, 3e-4, 0, 0.0])  # beyond cohesion on xy layers
        res = macro_integrate(point, eps)
        d = res.new_state.d_int
        px, stx = point.layers[0]
        s_layer = integrate(px, stx, [d[0], d[3], d[4]], compute_tangent=False).s
        assert res.sigma[3] == pytest.approx(s_layer[1], rel=1e-8)

    def test_closed_elastic_loop_reversible(self):
        point = table4_point()
        loop = [
            np.array([1e-5, 0, 0, 1e-5, 0, 0.0]),
            np.array([1e-5, 1e-5, 0, 1e-5, 1e-5, 0.0]),
            np.array([0, 1e-5, 0, 0, 1e-5, 0.0]),
            np.zeros(6),
        ]
        st = point
        for eps in loop:
            st = macro_integrate(st, eps).new_state
        res = macro_integrate(st, np.zeros(6))
        assert np.allclose(res.sigma, 0.0, atol=1e-12)
        for _, lst in st.layers:
            assert lst.w_t == 0.0 and lst.w_s == 0.0 and lst.w_c == 0.0

    def test_macro_tangent_fd_consistency(self):
        # acceptance: rel. err < 1e-3 on smooth branches
        rng = np.random.default_rng(5)
        checked = 0
        for trial in range(40):
            point = table4_point()
            kind = trial % 3
            if kind == 0:  # elastic state
                eps = rng.normal(scale=5e-6, size=6)
            elif kind == 1:  # tensile flow on x layer
                eps = np.array([8e-5, 0, 0, 0, 0, 0.0]) + rng.normal(scale=1e-6, size=6)
            else:  # xy shear sliding under compression
                eps = np.array([-5e-5, -5e-5, 0, 4e-4, 0, 0.0])
            res = macro_integrate(point, eps)
            h = 1e-8
            K_fd = np.zeros((6, 6))
            ok = True
            for j in range(6):
                ep, em = eps.copy(), eps.copy()
                ep[j] += h
                em[j] -= h
                sp = macro_integrate(point, ep).sigma
                sm = macro_integrate(point, em).sigma
                K_fd[:, j] = (sp - sm) / (2 * h)
            ref = np.abs(res.K).max()
            err = np.abs(res.K - K_fd).max() / ref
            assert err < 1e-3, (kind, eps, err)
            checked += 1
        assert checked == 40

    def test_substepping_handles_large_step(self):
        point = table4_point()
        eps = np.array([3e-3, 0, 0, 2e-3, 0, 0.0])  # far past damage in one go
        res = macro_integrate(point, eps)
        d = res.new_state.d_int
        assert np.isfinite(res.sigma).all()
        assert d[3] + d[6] == pytest.approx(2e-3)
