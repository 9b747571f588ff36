import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from conftest import make_signal
from latticeloc import BandRegionSymbol, LatticeBox, Signal, loc_apply, stft
from latticeloc.estimators import LocalizationOperator, STFTTransformer, check_signal_array


def batch(rng, count, radius):
    size = 2 * radius + 1
    return rng.standard_normal((count, size)) + 1j * rng.standard_normal((count, size))


class TestValidation:
    def test_promotes_one_row(self):
        assert check_signal_array([1, 2, 3]).shape == (1, 3)

    def test_keeps_complex(self):
        out = check_signal_array([[1 + 2j, 0, 1]])
        assert out.dtype == np.complex128 and out[0, 0] == 1 + 2j

    @pytest.mark.parametrize("bad", [[[np.nan, 1, 1]], [["a", "b", "c"]], np.zeros((2, 2, 2))])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            check_signal_array(bad)

    def test_width(self):
        with pytest.raises(ValueError):
            check_signal_array(np.zeros((2, 3)), width=5)


class TestSTFTTransformer:
    def test_matches_function(self, rng):
        g = make_signal(rng, 1, 1)
        X = batch(rng, 4, 2)
        est = STFTTransformer(g).fit(X)
        out = est.transform(X)
        assert out.shape == (4, 7 * 10)
        ref = stft(Signal(LatticeBox(1, 2), X[2]), g, est.m_box_, est.grid_).values.ravel()
        np.testing.assert_allclose(out[2], ref)

    def test_magnitude(self, rng):
        X = batch(rng, 2, 1)
        out = STFTTransformer(Signal.delta([0]), magnitude=True).fit_transform(X)
        assert np.isrealobj(out) and np.all(out >= 0)

    def test_even_width_rejected(self, rng):
        with pytest.raises(ValueError):
            STFTTransformer(Signal.delta([0])).fit(np.ones((2, 4)))

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            STFTTransformer(Signal.delta([0])).transform(np.ones((1, 3)))

    def test_params_and_clone(self, rng):
        est = STFTTransformer(Signal.delta([0]), Q=8)
        assert est.get_params()["Q"] == 8
        assert clone(est).set_params(magnitude=True).magnitude is True


class TestLocalizationOperator:
    def test_matches_apply(self, rng):
        g = make_signal(rng, 1, 1)
        sym = BandRegionSymbol(1, 0.3)
        est = LocalizationOperator(sym, g, g).fit()
        X = batch(rng, 3, 2)
        out = est.transform(X)
        box = est.kernel_.in_box
        for row, x in zip(out, X):
            ref = loc_apply(sym, g, g, Signal(box, x), out_box=box)
            np.testing.assert_allclose(row, ref.values, atol=1e-12)

    def test_singular_values_sorted(self, rng):
        g = make_signal(rng, 1, 1)
        est = LocalizationOperator(BandRegionSymbol(1, 0.3), g, g).fit()
        assert np.all(np.diff(est.singular_values_) <= 0)

    def test_pipeline(self, rng):
        g = make_signal(rng, 1, 1)
        pipe = make_pipeline(LocalizationOperator(BandRegionSymbol(1, 0.3), g, g),
                             STFTTransformer(g, magnitude=True))
        out = pipe.fit_transform(batch(rng, 2, 2))
        assert out.shape[0] == 2 and np.all(out >= 0)

    def test_width_checked(self, rng):
        g = make_signal(rng, 1, 1)
        est = LocalizationOperator(BandRegionSymbol(1, 0.3), g, g).fit()
        with pytest.raises(ValueError):
            est.transform(np.ones((1, 3)))
