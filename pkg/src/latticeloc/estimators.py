"""scikit-learn style wrappers for batches of lattice signals.

Rows of ``X`` are signals on a fixed box in enumeration order. The generic
sklearn validators reject complex input, so :func:`check_signal_array` does
the validation here.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .lattice import LatticeBox, Signal, TorusGrid, default_grid
from .localization import Symbol, loc_kernel
from .spectral import operator_box, singular_values
from .stft import stft

__all__ = ["check_signal_array", "STFTTransformer", "LocalizationOperator"]


def check_signal_array(X, width: int | None = None) -> np.ndarray:
    """Return ``X`` as a finite complex 2-D array, optionally of a given width."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array of signals, got {arr.ndim} dimensions")
    if not (np.issubdtype(arr.dtype, np.number) or arr.dtype == bool):
        raise ValueError(f"signals must be numeric, got dtype {arr.dtype}")
    arr = arr.astype(np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError("signals contain NaN or infinity")
    if width is not None and arr.shape[1] != width:
        raise ValueError(f"expected {width} samples per signal, got {arr.shape[1]}")
    return arr


def _box_for_width(width: int, dim: int) -> LatticeBox:
    side = round(width ** (1.0 / dim))
    if side ** dim != width or side % 2 == 0:
        raise ValueError(f"{width} samples do not fill a centered box in dimension {dim}")
    return LatticeBox(dim, (side - 1) // 2)


class STFTTransformer(TransformerMixin, BaseEstimator):
    """Map each row signal to its flattened STFT samples.

    Parameters
    ----------
    window : Signal
        Analysis window.
    Q : int, optional
        Grid points per axis; defaults to ``2(2N + 1)``.
    m_radius : int, optional
        Lag box radius; defaults to ``N_f + N_g``.
    magnitude : bool
        Return ``|V_g f|`` instead of complex values.
    """

    def __init__(self, window: Signal, Q: int | None = None, m_radius: int | None = None,
                 magnitude: bool = False):
        self.window = window
        self.Q = Q
        self.m_radius = m_radius
        self.magnitude = magnitude

    def fit(self, X, y=None):
        X = check_signal_array(X)
        dim = self.window.dim
        self.box_ = _box_for_width(X.shape[1], dim)
        radius = max(self.box_.radius, self.window.radius)
        self.grid_ = TorusGrid(dim, self.Q) if self.Q else default_grid(dim, radius)
        self.m_box_ = LatticeBox(dim, self.m_radius if self.m_radius is not None
                                 else self.box_.radius + self.window.radius)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_signal_array(X, self.n_features_in_)
        rows = [stft(Signal(self.box_, x), self.window, self.m_box_, self.grid_).values.ravel()
                for x in X]
        out = np.array(rows)
        return np.abs(out) if self.magnitude else out


class LocalizationOperator(TransformerMixin, BaseEstimator):
    """Dense localization operator acting on row signals.

    ``fit`` assembles ``kernel_`` on a square box (radius from the symbol and
    windows unless ``radius`` is given) and records ``singular_values_``.
    """

    def __init__(self, symbol: Symbol, g1: Signal, g2: Signal, radius: int | None = None):
        self.symbol = symbol
        self.g1 = g1
        self.g2 = g2
        self.radius = radius

    def fit(self, X=None, y=None):
        box = operator_box(self.symbol, self.g1, self.g2, radius=self.radius)
        self.kernel_ = loc_kernel(self.symbol, self.g1, self.g2, box, box)
        self.singular_values_ = singular_values(self.kernel_).values
        self.n_features_in_ = box.size
        return self

    def transform(self, X):
        check_is_fitted(self, "kernel_")
        X = check_signal_array(X, self.n_features_in_)
        return X @ self.kernel_.entries.T
