import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_signal
from latticeloc import (
    BandIndicator,
    FreqOnlySymbol,
    GridSamples,
    LatticeBox,
    SeparableSymbol,
    Signal,
    TorusGrid,
    apply_multiplier,
    band_composition_residual,
    band_project,
    ball_window,
    loc_apply,
    loc_bilinear,
    lps_compare,
    lps_weight_profile,
    multiplier_symbol,
    paracommutator_form,
    paracommutator_kernel,
    paraproduct,
    time_truncate,
)
from oracles import brute_lps_loc, brute_lps_projection, naive_paraproduct

seeds = st.integers(0, 2 ** 32 - 1)

# largest singular value of L - Q_2T P_Omega Q_2T, from the quadrature oracle
FROZEN_LPS_GAP = {
    (1, 0.125): 0.47255761594373186,
    (1, 0.25): 0.5790374265745193,
    (1, 0.5): 0.6666666666666667,
    (2, 0.125): 0.5913391920597549,
    (2, 0.25): 0.6812503170048471,
    (2, 0.5): 0.8,
}


def band_indicator(omega):
    # nodes arrive in [0, 1); use the distance to the nearest integer
    return lambda w: float(abs(w[0] - round(w[0])) <= omega)


class TestProjections:
    def test_time_truncate(self):
        f = Signal(LatticeBox(1, 2), [1, 2, 3, 4, 5])
        np.testing.assert_array_equal(time_truncate(f, 1).values, [0, 2, 3, 4, 0])
        with pytest.raises(ValueError):
            time_truncate(f, -1)

    @given(seeds, st.integers(0, 3))
    def test_time_truncate_idempotent(self, seed, T):
        f = make_signal(np.random.default_rng(seed), 2, 2)
        once = time_truncate(f, T)
        np.testing.assert_array_equal(time_truncate(once, T).values, once.values)

    def test_full_band_is_identity(self, rng):
        f = make_signal(rng, 1, 3)
        np.testing.assert_allclose(band_project(f, 0.5, f.box).values, f.values, atol=1e-15)

    def test_quarter_band_of_delta(self):
        out = band_project(Signal.delta([0]), 0.25, LatticeBox(1, 4))
        k = out.box.points[:, 0]
        expect = np.where(k == 0, 0.5, np.sin(np.pi * k / 2) / (np.pi * np.where(k == 0, 1, k)))
        np.testing.assert_allclose(out.values, expect, atol=1e-15)

    @given(seeds, st.floats(0.05, 0.5))
    def test_self_adjoint(self, seed, omega):
        rng = np.random.default_rng(seed)
        f, h = make_signal(rng, 1, 3), make_signal(rng, 1, 3)
        a = band_project(f, omega, h.box).inner(h)
        b = f.inner(band_project(h, omega, f.box))
        assert abs(a - b) < 1e-12 * f.norm() * h.norm()

    def test_two_dimensional_error_bound(self, rng):
        out, err = band_project(make_signal(rng, 2, 1), 0.3, LatticeBox(2, 1), return_error=True)
        assert out.box.size == 9 and 0 <= err < 1e-8

    @pytest.mark.parametrize("omega", [0.125, 0.3])
    def test_idempotent_composition(self, omega):
        assert band_composition_residual(omega, 3) < 1e-8


class TestLps:
    def test_weight_profile_diagonal(self):
        rho = lps_weight_profile(1, 1, LatticeBox(1, 2))
        np.testing.assert_allclose(np.diag(rho), [1 / 3, 2 / 3, 1, 2 / 3, 1 / 3])

    def test_ball_window_normalized(self):
        assert ball_window(2, 2).norm() == pytest.approx(1.0)

    def test_t_zero_matrices_equal(self):
        for omega in (0.125, 0.25, 0.5):
            cmp = lps_compare(0, omega)
            np.testing.assert_allclose(cmp.matrix_loc.entries, cmp.matrix_lps.entries, atol=1e-15)
            assert cmp.difference_operator_norm < 1e-15

    @pytest.mark.parametrize("T,omega", sorted(FROZEN_LPS_GAP))
    def test_against_quadrature_oracle(self, T, omega):
        cmp = lps_compare(T, omega)
        np.testing.assert_allclose(cmp.matrix_loc.entries, brute_lps_loc(T, omega), atol=1e-10)
        np.testing.assert_allclose(cmp.matrix_lps.entries, brute_lps_projection(T, omega), atol=1e-10)
        assert cmp.difference_operator_norm == pytest.approx(FROZEN_LPS_GAP[(T, omega)], abs=1e-10)
        assert cmp.closed_form_residual < 1e-14
        assert cmp.synthesis_residual < 1e-10

    def test_gap_at_half_band(self):
        assert abs(lps_compare(1, 0.5).difference_operator_norm - 2 / 3) < 1e-8

    @pytest.mark.parametrize("T,omega", [(1, 0.25), (2, 0.125)])
    def test_both_psd(self, T, omega):
        d = lps_compare(T, omega).to_dict()
        for key in ("loc", "lps"):
            assert d[key]["hermitian_residual"] < 1e-14
            assert d[key]["min_eigenvalue"] > -1e-12

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            lps_compare(1.5, 0.2)
        with pytest.raises(ValueError):
            lps_compare(1, 0.6)


class TestParacommutator:
    def test_delta_windows_constant(self):
        grid = TorusGrid(1, 8)
        d = Signal.delta([0])
        A = paracommutator_kernel(BandIndicator(0.2), d, d, grid)
        np.testing.assert_allclose(A.values, 0.4, atol=1e-15)

    def test_constant_beta(self, rng):
        grid = TorusGrid(1, 10)
        g1, g2 = make_signal(rng, 1, 2), make_signal(rng, 1, 2)
        A = paracommutator_kernel(GridSamples.constant(1.0, grid), g1, g2)
        xi = grid.nodes[:, 0]
        k = g1.box.points[:, 0]
        expect = np.einsum("k,ik,jk->ij", np.conj(g1.values) * g2.values,
                           np.exp(2j * np.pi * np.outer(xi, k)), np.exp(-2j * np.pi * np.outer(xi, k)))
        np.testing.assert_allclose(A.values, expect, atol=1e-12)

    def test_sampled_band_converges_to_exact(self, rng):
        g1, g2 = make_signal(rng, 1, 1), make_signal(rng, 1, 1)
        grid = TorusGrid(1, 12)
        exact = paracommutator_kernel(BandIndicator(0.3), g1, g2, grid).values
        fine = TorusGrid(1, 1200)
        beta = GridSamples.from_function(band_indicator(0.3), fine)
        A = paracommutator_kernel(beta, g1, g2).values[::100, ::100]
        assert np.max(np.abs(A - exact)) < 1e-2

    @given(seeds)
    def test_form_matches_localization(self, seed):
        rng = np.random.default_rng(seed)
        grid = TorusGrid(1, 20)
        g1, g2, f, h, alpha = (make_signal(rng, 1, 2) for _ in range(5))
        beta = BandIndicator(0.35)
        A = paracommutator_kernel(beta, g1, g2, grid)
        direct = loc_bilinear(SeparableSymbol(alpha, beta), g1, g2, f, h, grid)
        got = paracommutator_form(A, alpha, f, h)
        assert abs(got - direct) < 1e-8 * max(1.0, abs(direct))

    def test_grid_mismatch(self, rng):
        g = make_signal(rng, 1, 1)
        with pytest.raises(ValueError):
            paracommutator_kernel(GridSamples.constant(1.0, TorusGrid(1, 6)), g, g, TorusGrid(1, 8))


class TestParaproduct:
    @given(seeds)
    def test_matches_naive(self, seed):
        rng = np.random.default_rng(seed)
        g1, g2, f, h = (make_signal(rng, 1, 2) for _ in range(4))
        p = paraproduct(g1, g2, f, h)
        np.testing.assert_allclose(p.values, naive_paraproduct(g1, g2, f, h, p.radius), atol=1e-12)

    def test_delta_windows(self, rng):
        f, h = make_signal(rng, 1, 2), make_signal(rng, 1, 2)
        d = Signal.delta([0])
        p = paraproduct(d, d, f, h)
        np.testing.assert_allclose(p.values, f.values * np.conj(h.values), atol=1e-14)

    @given(seeds)
    def test_sum_and_l1_bound(self, seed):
        rng = np.random.default_rng(seed)
        g1, g2, f, h = (make_signal(rng, 1, 2) for _ in range(4))
        p = paraproduct(g1, g2, f, h)
        assert abs(np.sum(p.values) - f.inner(h) * g2.inner(g1)) < 1e-10 * f.norm() * h.norm() * g1.norm() * g2.norm()
        assert p.norm(1) <= f.norm() * h.norm() * g1.norm() * g2.norm() * (1 + 1e-10)

    def test_two_dimensional(self, rng):
        g1, g2, f, h = (make_signal(rng, 2, 1) for _ in range(4))
        p = paraproduct(g1, g2, f, h)
        np.testing.assert_allclose(p.values, naive_paraproduct(g1, g2, f, h, p.radius), atol=1e-12)


class TestMultiplier:
    def test_delta_windows_give_band_length(self):
        d = Signal.delta([0])
        mu = multiplier_symbol(BandIndicator(0.2), d, d, TorusGrid(1, 6))
        np.testing.assert_allclose(mu.values, 0.4, atol=1e-15)

    def test_constant_beta(self, rng):
        g1, g2 = make_signal(rng, 1, 2), make_signal(rng, 1, 2)
        mu = multiplier_symbol(GridSamples.constant(1.0, TorusGrid(1, 10)), g1, g2)
        np.testing.assert_allclose(mu.values, g2.inner(g1), atol=1e-12)

    @given(seeds)
    def test_matches_frequency_only_localization(self, seed):
        rng = np.random.default_rng(seed)
        g1, g2, f = (make_signal(rng, 1, 1) for _ in range(3))
        grid = TorusGrid(1, 14)
        for beta in (BandIndicator(0.3), GridSamples(grid, rng.standard_normal(14))):
            mu = multiplier_symbol(beta, g1, g2, grid)
            out = loc_apply(FreqOnlySymbol(beta), g1, g2, f, grid)
            got = apply_multiplier(mu, f, out.box)
            np.testing.assert_allclose(got.values, out.values, atol=1e-10)

    def test_sampled_band_converges_to_exact(self, rng):
        g1, g2 = make_signal(rng, 1, 1), make_signal(rng, 1, 1)
        errs = []
        for Q in (40, 400, 4000):
            grid = TorusGrid(1, Q)
            sampled = multiplier_symbol(GridSamples.from_function(band_indicator(0.3), grid), g1, g2)
            exact = multiplier_symbol(BandIndicator(0.3), g1, g2, grid)
            errs.append(np.max(np.abs(sampled.values - exact.values)))
        assert errs[2] < errs[0] and errs[2] < 1e-2

    def test_apply_default_period(self, rng):
        mu = GridSamples.constant(1.0, TorusGrid(1, 9))
        f = make_signal(rng, 1, 2)
        out = apply_multiplier(mu, f)
        assert out.radius == 4
        np.testing.assert_allclose(out.at(f.box.points), f.values, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            multiplier_symbol(BandIndicator(0.2), Signal.delta([0]), Signal.delta([0, 0]))
