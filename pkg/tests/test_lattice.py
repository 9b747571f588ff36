import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_signal
from latticeloc import (
    BandIndicator,
    GridSamples,
    LatticeBox,
    Signal,
    TorusGrid,
    band_moment,
    default_grid,
    dft_lattice_to_torus,
    dft_torus_to_lattice,
    tf_atom,
    torus_function_from_dict,
)
from oracles import quad_band_moment


class TestLatticeBox:
    @pytest.mark.parametrize("dim,radius", [(1, 0), (1, 3), (2, 2), (3, 1)])
    def test_enumeration_is_a_bijection(self, dim, radius):
        box = LatticeBox(dim, radius)
        pts = box.points
        assert len(pts) == (2 * radius + 1) ** dim == box.size
        assert len({tuple(p) for p in pts}) == box.size
        np.testing.assert_array_equal(box.index(pts), np.arange(box.size))

    def test_enumeration_is_lexicographic_and_stable(self):
        box = LatticeBox(2, 1)
        expected = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)]
        assert [tuple(p) for p in box.points] == expected
        assert LatticeBox(2, 1).points.tolist() == box.points.tolist()

    def test_index_outside_is_negative(self):
        box = LatticeBox(1, 2)
        np.testing.assert_array_equal(box.index([[3], [-3], [0]]), [-1, -1, 2])

    def test_ball_mask_uses_l1_norm(self):
        box = LatticeBox(2, 2)
        mask = box.ball_mask(2)
        assert mask.sum() == 13
        assert not mask[box.index([2, 2])]

    @pytest.mark.parametrize("bad", [(0, 1), (1, -1), (1.5, 1)])
    def test_rejects_bad_parameters(self, bad):
        with pytest.raises(ValueError):
            LatticeBox(*bad)


class TestSignal:
    def test_values_length_checked(self):
        with pytest.raises(ValueError):
            Signal(LatticeBox(1, 1), [1, 2])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Signal(LatticeBox(1, 0), [np.nan])

    def test_zero_outside_box(self):
        f = Signal(LatticeBox(1, 1), [1, 2, 3])
        np.testing.assert_array_equal(f.at([[-2], [-1], [1], [5]]), [0, 1, 3, 0])

    def test_json_round_trip(self, rng):
        f = make_signal(rng, 2, 1)
        g = Signal.from_dict(f.to_dict())
        np.testing.assert_array_equal(f.values, g.values)
        assert g.box == f.box

    def test_real_only_json_values(self):
        f = Signal.from_dict({"n": 1, "radius": 1, "values": [1, 2, 3]})
        np.testing.assert_array_equal(f.values, [1, 2, 3])

    def test_arithmetic_aligns_boxes(self):
        f = Signal.delta([0]) + Signal.delta([2])
        assert f.radius == 2
        np.testing.assert_array_equal(f.values, [0, 0, 1, 0, 1])

    @given(st.integers(0, 3), st.floats(1, 4))
    def test_lp_norms_finite(self, radius, p):
        f = make_signal(np.random.default_rng(radius), 1, radius)
        assert np.isfinite(f.norm(p))


class TestTorusGrid:
    def test_nodes_and_weight(self):
        grid = TorusGrid(1, 4)
        np.testing.assert_allclose(grid.nodes[:, 0], [0, 0.25, 0.5, 0.75])
        np.testing.assert_allclose(grid.centered_nodes[:, 0], [0, 0.25, -0.5, -0.25])
        assert grid.weight == 0.25

    def test_default_rule(self):
        assert default_grid(1, 3).Q == 14

    @given(st.integers(1, 12), st.integers(-40, 40))
    def test_quadrature_of_characters(self, Q, r):
        grid = TorusGrid(1, Q)
        total = np.sum(np.exp(-2j * np.pi * r * grid.nodes[:, 0])) * grid.weight
        assert abs(total - (1.0 if r % Q == 0 else 0.0)) < 1e-12

    def test_quadrature_of_characters_2d(self):
        grid = TorusGrid(2, 5)
        for r in [(0, 0), (5, 0), (1, 5), (5, 10), (2, 3)]:
            total = np.sum(np.exp(-2j * np.pi * grid.nodes @ np.array(r))) * grid.weight
            expect = 1.0 if all(x % 5 == 0 for x in r) else 0.0
            assert abs(total - expect) < 1e-12


class TestAtoms:
    def test_translation(self):
        out = tf_atom(Signal.delta([0]), [1], [0.0])
        np.testing.assert_array_equal(out.at([[1]]), [1])
        assert out.norm(1) == 1

    def test_modulation_of_delta_zero(self):
        out = tf_atom(Signal.delta([0]), [0], [0.37])
        np.testing.assert_allclose(out.values, [1])

    def test_half_modulation(self):
        f = Signal(LatticeBox(1, 1), [0, 1, 1])
        out = tf_atom(f, [0], [0.5])
        np.testing.assert_allclose(out.at([[0], [1]]), [1, -1], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            tf_atom(Signal.delta([0, 0]), [1], [0.0, 0.0])

    @given(st.integers(-3, 3), st.floats(0, 1))
    def test_composition(self, m, w):
        g = make_signal(np.random.default_rng(m + 3), 1, 2)
        out = tf_atom(tf_atom(g, [0], [w]), [m], [0.0])
        for k in range(-5, 6):
            expect = cmath.exp(2j * math.pi * w * (k - m)) * g.at([[k - m]])[0]
            assert abs(out.at([[k]])[0] - expect) < 1e-12


class TestFourier:
    def test_delta_zero(self):
        np.testing.assert_allclose(dft_lattice_to_torus(Signal.delta([0]), TorusGrid(1, 6)).values, 1)

    def test_delta_one(self):
        F = dft_lattice_to_torus(Signal.delta([1]), TorusGrid(1, 4))
        np.testing.assert_allclose(F.values, [1, -1j, -1, 1j], atol=1e-15)

    def test_two_deltas(self):
        F = dft_lattice_to_torus(Signal.delta([0], radius=1) + Signal.delta([1]), TorusGrid(1, 4))
        np.testing.assert_allclose(F.values, [2, 1 - 1j, 0, 1 + 1j], atol=1e-15)

    def test_inverse_of_ones(self):
        f = dft_torus_to_lattice(GridSamples.constant(1.0, TorusGrid(1, 8)), LatticeBox(1, 1))
        np.testing.assert_allclose(f.values, [0, 1, 0], atol=1e-15)

    def test_inverse_of_character(self):
        grid = TorusGrid(1, 8)
        F = GridSamples.from_function(lambda w: np.exp(2j * np.pi * w[0]), grid)
        np.testing.assert_allclose(dft_torus_to_lattice(F, LatticeBox(1, 1)).values, [1, 0, 0], atol=1e-15)

    @given(st.integers(0, 4), st.integers(0, 5), st.integers(1, 2))
    def test_round_trip(self, radius, extra, dim):
        f = make_signal(np.random.default_rng(radius * 7 + extra), dim, radius)
        grid = TorusGrid(dim, 2 * radius + 1 + extra)
        back = dft_torus_to_lattice(dft_lattice_to_torus(f, grid), f.box)
        np.testing.assert_allclose(back.values, f.values, atol=1e-12)

    @given(st.integers(0, 4), st.integers(0, 3))
    def test_parseval_on_grid(self, radius, extra):
        rng = np.random.default_rng(100 + radius + extra)
        f, g = make_signal(rng, 1, radius), make_signal(rng, 1, radius)
        grid = TorusGrid(1, 2 * radius + 1 + extra)
        lhs = np.sum(dft_lattice_to_torus(f, grid).values * np.conj(dft_lattice_to_torus(g, grid).values))
        lhs *= grid.weight
        assert abs(lhs - f.inner(g)) <= 1e-12 * f.norm() * g.norm()

    def test_exactness_between_q_and_2q(self, rng):
        f, g = make_signal(rng, 1, 3), make_signal(rng, 1, 3)
        vals = []
        for Q in (7, 14):
            grid = TorusGrid(1, Q)
            prod = dft_lattice_to_torus(f, grid).values * np.conj(dft_lattice_to_torus(g, grid).values)
            vals.append(np.mean(prod))
        assert abs(vals[0] - vals[1]) < 1e-12 * f.norm() * g.norm()


class TestBandMoment:
    @pytest.mark.parametrize("omega", [0.05, 0.125, 0.3, 0.5])
    def test_zero_moment_is_length(self, omega):
        assert band_moment(0, omega) == pytest.approx(2 * omega, abs=1e-15)

    @pytest.mark.parametrize("r", [1, 2, -3, 17])
    def test_full_band_kills_nonzero_r(self, r):
        assert band_moment(r, 0.5) == 0.0

    def test_quarter_band_frozen(self):
        # sin(pi/2)/pi, cross-checked by adaptive quadrature
        assert band_moment(1, 0.25) == pytest.approx(1 / math.pi, abs=1e-15)
        assert abs(quad_band_moment(1, 0.25) - 0.3183098861837907) < 1e-12

    @given(st.integers(-30, 30), st.floats(0.01, 0.5))
    def test_matches_quadrature_symmetric_bounded(self, r, omega):
        c = band_moment(r, omega)
        assert abs(c - quad_band_moment(r, omega).real) < 1e-10
        assert c == band_moment(-r, omega)
        assert abs(c) <= band_moment(0, omega) + 1e-15

    @pytest.mark.parametrize("omega", [0.0, -0.1, 0.51, float("nan")])
    def test_rejects_out_of_range(self, omega):
        with pytest.raises(ValueError):
            band_moment(1, omega)

    def test_two_dimensional_quadrature(self):
        # area of the l1 ball of radius omega is 2 omega^2
        val, err = band_moment([0, 0], 0.3, return_error=True)
        assert val == pytest.approx(0.18, abs=1e-10)
        assert err < 1e-9

    def test_two_dimensional_against_grid_sum(self):
        # product-of-cosines integrand on a fine midpoint grid
        omega, r = 0.3, np.array([1, 2])
        n = 2000
        w = (np.arange(n) + 0.5) / n * 2 * omega - omega
        W1, W2 = np.meshgrid(w, w, indexing="ij")
        inside = np.abs(W1) + np.abs(W2) <= omega
        approx = np.sum(np.cos(2 * np.pi * (r[0] * W1 + r[1] * W2)) * inside) * (2 * omega / n) ** 2
        assert band_moment(r, omega) == pytest.approx(approx, abs=2e-3)

    def test_band_indicator_json(self):
        b = torus_function_from_dict(BandIndicator(0.2).to_dict())
        assert isinstance(b, BandIndicator) and b.omega == 0.2
        assert b.integral() == pytest.approx(0.4)

    def test_grid_samples_json(self, rng):
        grid = TorusGrid(1, 5)
        F = GridSamples(grid, rng.standard_normal(5) + 1j * rng.standard_normal(5))
        G = torus_function_from_dict(F.to_dict())
        np.testing.assert_array_equal(F.values, G.values)
