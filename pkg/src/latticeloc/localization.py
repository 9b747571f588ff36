"""Time-frequency localization operators on Z^n.

The operator with symbol ``s`` and windows ``g1, g2`` is evaluated three
ways that share no code path beyond the STFT itself:

* synthesis, ``L f(k) = sum_m int s V_{g1} f (m, w) M_w T_m g2(k) dw``
  (:func:`loc_apply`);
* the weak form ``<L f, h> = sum_m int s V_{g1} f conj(V_{g2} h) dw``
  (:func:`loc_bilinear`);
* the kernel ``K(k, l) = sum_m g2(k - m) conj(g1(l - m)) c_s(m, k - l)``
  where ``c_s(m, r) = int s(m, w) exp(2 pi i w.r) dw`` (:func:`loc_kernel`).

Symbols whose frequency dependence is a grid function are integrated with
grid quadrature. Symbols built on a band indicator integrate each character
exactly through band moments, so no indicator sampling error enters.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Union

import numpy as np

from .lattice import (
    BandIndicator,
    GridSamples,
    LatticeBox,
    Signal,
    TorusFunction,
    TorusGrid,
    default_grid,
    torus_function_from_dict,
)
from .stft import PhaseSpaceField, stft, stft_adjoint

__all__ = [
    "GridSymbol",
    "SeparableSymbol",
    "TimeOnlySymbol",
    "FreqOnlySymbol",
    "BandRegionSymbol",
    "Symbol",
    "symbol_from_dict",
    "OperatorMatrix",
    "loc_bilinear",
    "loc_kernel",
    "loc_apply",
]


def _ones(points: np.ndarray) -> np.ndarray:
    return np.ones(points.shape[:-1], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class GridSymbol:
    """Symbol given by samples on ``field.m_box x field.grid``, zero elsewhere."""

    field: PhaseSpaceField

    @property
    def dim(self) -> int:
        return self.field.dim

    @property
    def m_radius(self) -> int | None:
        return self.field.m_box.radius

    @property
    def grid(self) -> TorusGrid:
        return self.field.grid

    band = None

    def char_coefficients(self, m_points, r_points) -> np.ndarray:
        coeffs = np.fft.ifftn(
            self.field.rows_at(m_points).reshape(len(m_points), *self.grid.shape),
            axes=tuple(range(1, self.dim + 1)),
        ).reshape(len(m_points), self.grid.size)
        return coeffs[:, self.grid.flat_index(r_points)]

    def sample(self, m_box: LatticeBox, grid: TorusGrid) -> PhaseSpaceField:
        if grid != self.grid:
            raise ValueError(f"grid mismatch: symbol on Q={self.grid.Q}, requested Q={grid.Q}")
        return self.field.on(m_box)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.field.values)))

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.field.values)) * self.grid.weight)

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        v = self.field.values
        return bool(np.all(np.abs(v.imag) <= tol) and np.all(v.real >= -tol))

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.field.values.imag) <= tol))

    def conj(self) -> "GridSymbol":
        return GridSymbol(self.field.conj())

    def to_dict(self) -> dict:
        return {"kind": "grid", **self.field.to_dict()}


class _FactoredSymbol:
    """Shared logic for ``s(m, w) = a(m) b(w)``."""

    def time_weights(self, m_points) -> np.ndarray:
        raise NotImplementedError

    def _freq(self) -> TorusFunction | None:
        raise NotImplementedError

    @property
    def grid(self) -> TorusGrid | None:
        beta = self._freq()
        return beta.grid if isinstance(beta, GridSamples) else None

    @property
    def band(self) -> BandIndicator | None:
        beta = self._freq()
        return beta if isinstance(beta, BandIndicator) else None

    def char_coefficients(self, m_points, r_points) -> np.ndarray:
        a = self.time_weights(m_points)
        beta = self._freq()
        if beta is None:
            b = np.all(np.asarray(r_points) == 0, axis=-1).astype(np.complex128)
        else:
            b = beta.coefficients(r_points)
        return a[:, None] * b[None, :]

    def sample(self, m_box: LatticeBox, grid: TorusGrid) -> PhaseSpaceField:
        beta = self._freq()
        b = np.ones(grid.size) if beta is None else beta.sample(grid)
        return PhaseSpaceField(m_box, grid, np.outer(self.time_weights(m_box.points), b))


@dataclass(frozen=True, eq=False)
class SeparableSymbol(_FactoredSymbol):
    """``s(m, w) = alpha(m) beta(w)``."""

    alpha: Signal
    beta: TorusFunction

    def __post_init__(self):
        if self.alpha.dim != self.beta.dim:
            raise ValueError("dimension mismatch between alpha and beta")

    @property
    def dim(self) -> int:
        return self.alpha.dim

    @property
    def m_radius(self) -> int | None:
        return self.alpha.radius

    def time_weights(self, m_points) -> np.ndarray:
        return self.alpha.at(m_points)

    def _freq(self):
        return self.beta

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.alpha.values))) * self.beta.sup_norm()

    def l1_norm(self) -> float:
        return self.alpha.norm(1) * self.beta.l1_norm()

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        a = self.alpha.values
        a_ok = np.all(np.abs(a.imag) <= tol) and np.all(a.real >= -tol)
        return bool(a_ok and self.beta.is_nonnegative(tol))

    def is_real(self, tol: float = 0.0) -> bool:
        beta_real = isinstance(self.beta, BandIndicator) or np.all(np.abs(self.beta.values.imag) <= tol)
        return bool(np.all(np.abs(self.alpha.values.imag) <= tol) and beta_real)

    def conj(self) -> "SeparableSymbol":
        return SeparableSymbol(self.alpha.conj(), self.beta.conj())

    def to_dict(self) -> dict:
        return {"kind": "separable", "alpha": self.alpha.to_dict(), "beta": self.beta.to_dict()}


@dataclass(frozen=True, eq=False)
class TimeOnlySymbol(_FactoredSymbol):
    """``s(m, w) = alpha(m)``."""

    alpha: Signal

    @property
    def dim(self) -> int:
        return self.alpha.dim

    @property
    def m_radius(self) -> int | None:
        return self.alpha.radius

    def time_weights(self, m_points) -> np.ndarray:
        return self.alpha.at(m_points)

    def _freq(self):
        return None

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.alpha.values)))

    def l1_norm(self) -> float:
        return self.alpha.norm(1)

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        a = self.alpha.values
        return bool(np.all(np.abs(a.imag) <= tol) and np.all(a.real >= -tol))

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.alpha.values.imag) <= tol))

    def conj(self) -> "TimeOnlySymbol":
        return TimeOnlySymbol(self.alpha.conj())

    def to_dict(self) -> dict:
        return {"kind": "time", "alpha": self.alpha.to_dict()}


@dataclass(frozen=True, eq=False)
class FreqOnlySymbol(_FactoredSymbol):
    """``s(m, w) = beta(w)`` for every ``m``; unbounded support in ``m``."""

    beta: TorusFunction

    @property
    def dim(self) -> int:
        return self.beta.dim

    m_radius = None

    def time_weights(self, m_points) -> np.ndarray:
        return _ones(np.asarray(m_points))

    def _freq(self):
        return self.beta

    def sup_norm(self) -> float:
        return self.beta.sup_norm()

    def l1_norm(self) -> float:
        return float("inf")

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return self.beta.is_nonnegative(tol)

    def is_real(self, tol: float = 0.0) -> bool:
        return isinstance(self.beta, BandIndicator) or bool(np.all(np.abs(self.beta.values.imag) <= tol))

    def conj(self) -> "FreqOnlySymbol":
        return FreqOnlySymbol(self.beta.conj())

    def to_dict(self) -> dict:
        return {"kind": "freq", "beta": self.beta.to_dict()}


@dataclass(frozen=True, eq=False)
class BandRegionSymbol(_FactoredSymbol):
    """Indicator of ``B_T x B_Omega`` (both l1 balls)."""

    T: int
    omega: float
    dim: int = 1

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 0:
            raise ValueError(f"T must be a nonnegative integer, got {self.T!r}")
        BandIndicator(self.omega, self.dim)

    @property
    def m_radius(self) -> int:
        return int(self.T)

    def time_weights(self, m_points) -> np.ndarray:
        return (np.abs(np.asarray(m_points)).sum(axis=-1) <= self.T).astype(np.complex128)

    def _freq(self):
        return BandIndicator(self.omega, self.dim)

    def ball_size(self) -> int:
        box = LatticeBox(self.dim, int(self.T))
        return int(box.ball_mask(self.T).sum())

    def sup_norm(self) -> float:
        return 1.0

    def l1_norm(self) -> float:
        return self.ball_size() * self._freq().l1_norm()

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return True

    def is_real(self, tol: float = 0.0) -> bool:
        return True

    def conj(self) -> "BandRegionSymbol":
        return self

    def to_dict(self) -> dict:
        return {"kind": "band_region", "T": int(self.T), "omega": self.omega, "n": self.dim}


Symbol = Union[GridSymbol, SeparableSymbol, TimeOnlySymbol, FreqOnlySymbol, BandRegionSymbol]


def symbol_from_dict(data: dict) -> Symbol:
    kind = data.get("kind")
    if kind == "grid":
        return GridSymbol(PhaseSpaceField.from_dict(data))
    if kind == "separable":
        return SeparableSymbol(Signal.from_dict(data["alpha"]), torus_function_from_dict(data["beta"]))
    if kind == "time":
        return TimeOnlySymbol(Signal.from_dict(data["alpha"]))
    if kind == "freq":
        return FreqOnlySymbol(torus_function_from_dict(data["beta"]))
    if kind == "band_region":
        return BandRegionSymbol(int(data["T"]), float(data["omega"]), int(data.get("n", 1)))
    raise ValueError(f"unknown symbol kind {kind!r}")


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix of an operator from signals on ``in_box`` to ``out_box``."""

    out_box: LatticeBox
    in_box: LatticeBox
    entries: np.ndarray

    def __post_init__(self):
        ent = np.array(self.entries, dtype=np.complex128)
        if ent.shape != (self.out_box.size, self.in_box.size):
            raise ValueError(
                f"entries of shape {ent.shape} do not match boxes "
                f"({self.out_box.size}, {self.in_box.size})"
            )
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def apply(self, f: Signal) -> Signal:
        return Signal(self.out_box, self.entries @ f.at(self.in_box.points))

    def form(self, f: Signal, h: Signal) -> complex:
        """``<K f, h>``."""
        return self.apply(f).inner(h)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.in_box, self.out_box, self.entries.conj().T)

    def on(self, out_box: LatticeBox, in_box: LatticeBox) -> "OperatorMatrix":
        rows = self.out_box.index(out_box.points)
        cols = self.in_box.index(in_box.points)
        ent = np.zeros((out_box.size, in_box.size), dtype=np.complex128)
        r_ok, c_ok = rows >= 0, cols >= 0
        ent[np.ix_(r_ok, c_ok)] = self.entries[np.ix_(rows[r_ok], cols[c_ok])]
        return OperatorMatrix(out_box, in_box, ent)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if (self.out_box, self.in_box) != (other.out_box, other.in_box):
            other = other.on(self.out_box, self.in_box)
        return OperatorMatrix(self.out_box, self.in_box, self.entries - other.entries)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        if self.out_box != self.in_box:
            return False
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol * scale)

    def to_dict(self) -> dict:
        return {
            "out_box": self.out_box.to_dict(),
            "in_box": self.in_box.to_dict(),
            "entries": [[[v.real, v.imag] for v in row] for row in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorMatrix":
        out_box = LatticeBox(data["out_box"]["n"], data["out_box"]["radius"])
        in_box = LatticeBox(data["in_box"]["n"], data["in_box"]["radius"])
        arr = np.asarray(data["entries"], dtype=float)
        return cls(out_box, in_box, arr[..., 0] + 1j * arr[..., 1])

    def to_csv(self) -> str:
        """Row-major ``row, col, re, im`` records in enumeration order."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row", "col", "re", "im"])
        for r, row in enumerate(self.entries):
            for c, v in enumerate(row):
                writer.writerow([r, c, f"{v.real:.17g}", f"{v.imag:.17g}"])
        return buf.getvalue()


def _check_windows(g1: Signal, g2: Signal, symbol) -> None:
    if not np.any(g1.values) or not np.any(g2.values):
        raise ValueError("windows must be nonzero")
    dims = {g1.dim, g2.dim, symbol.dim}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch among symbol and windows: {sorted(dims)}")


def _resolve_grid(symbol, grid: TorusGrid | None, radius: int) -> TorusGrid:
    own = symbol.grid
    if own is not None:
        if grid is not None and grid != own:
            raise ValueError(f"grid mismatch: symbol on Q={own.Q}, requested Q={grid.Q}")
        return own
    return grid if grid is not None else default_grid(symbol.dim, radius)


def _lag_box(symbol, lag_radius: int) -> LatticeBox:
    """Lags where both the symbol and the STFTs can be nonzero."""
    radius = lag_radius if symbol.m_radius is None else min(lag_radius, symbol.m_radius)
    return LatticeBox(symbol.dim, radius)


def _stft_coefficients(V: PhaseSpaceField, box: LatticeBox) -> np.ndarray:
    """Recover ``f(l) conj(g(l - m))`` from the STFT rows (inverse DFT)."""
    Q = V.grid.Q
    if Q < box.side:
        raise ValueError(
            f"grid resolution Q={Q} cannot resolve coefficients on a box of side {box.side}; "
            f"use Q >= {box.side}"
        )
    coeffs = np.fft.ifftn(
        V.values.reshape(V.m_box.size, *V.grid.shape), axes=tuple(range(1, V.dim + 1))
    ).reshape(V.m_box.size, V.grid.size)
    return coeffs[:, V.grid.flat_index(box.points)]


def loc_bilinear(symbol: Symbol, g1: Signal, g2: Signal, f: Signal, h: Signal,
                 grid: TorusGrid | None = None) -> complex:
    """Weak form ``sum_m int s(m, w) V_{g1} f(m, w) conj(V_{g2} h(m, w)) dw``."""
    _check_windows(g1, g2, symbol)
    if f.dim != symbol.dim or h.dim != symbol.dim:
        raise ValueError("dimension mismatch")
    lag = _lag_box(symbol, min(f.radius + g1.radius, h.radius + g2.radius))
    radius = max(f.radius, h.radius, g1.radius, g2.radius)
    grid = _resolve_grid(symbol, grid, radius)
    Vf = stft(f, g1, lag, grid)
    Vh = stft(h, g2, lag, grid)
    band = symbol.band
    if band is None:
        S = symbol.sample(lag, grid)
        return complex(np.sum(S.values * Vf.values * np.conj(Vh.values)) * grid.weight)
    box = LatticeBox(symbol.dim, max(f.radius, h.radius))
    a = _stft_coefficients(Vf, box)
    b = _stft_coefficients(Vh, box)
    pts = box.points
    moments = band.coefficients(pts[None, :, :] - pts[:, None, :])
    weights = symbol.time_weights(lag.points)
    per_lag = np.einsum("ml,ln,mn->m", a, moments, np.conj(b))
    return complex(np.sum(weights * per_lag))


def loc_kernel(symbol: Symbol, g1: Signal, g2: Signal, out_box: LatticeBox | None = None,
               in_box: LatticeBox | None = None) -> OperatorMatrix:
    """Kernel matrix ``K(k, l) = sum_m int s(m, w) conj(M_w T_m g1(l)) M_w T_m g2(k) dw``.

    Boxes default to the operator's natural support (symbol lag radius plus
    the window radius); symbols unbounded in ``m`` need explicit boxes.
    """
    _check_windows(g1, g2, symbol)
    if out_box is None or in_box is None:
        if symbol.m_radius is None:
            raise ValueError("symbol has unbounded lag support; pass out_box and in_box")
        out_box = out_box or LatticeBox(symbol.dim, symbol.m_radius + g2.radius)
        in_box = in_box or LatticeBox(symbol.dim, symbol.m_radius + g1.radius)
    lag = _lag_box(symbol, min(out_box.radius + g2.radius, in_box.radius + g1.radius))
    m = lag.points
    k = out_box.points
    l = in_box.points
    diff_box = LatticeBox(symbol.dim, out_box.radius + in_box.radius)
    coeff = symbol.char_coefficients(m, diff_box.points)
    diff_idx = diff_box.index(k[:, None, :] - l[None, :, :])
    w2 = g2.at(k[None, :, :] - m[:, None, :])
    w1 = np.conj(g1.at(l[None, :, :] - m[:, None, :]))
    entries = np.einsum("mk,ml,mkl->kl", w2, w1, coeff[:, diff_idx])
    return OperatorMatrix(out_box, in_box, entries)


def loc_apply(symbol: Symbol, g1: Signal, g2: Signal, f: Signal,
              grid: TorusGrid | None = None, out_box: LatticeBox | None = None) -> Signal:
    """Synthesis ``sum_m int s(m, w) V_{g1} f(m, w) M_w T_m g2 dw``.

    ``out_box`` defaults to radius ``N_f + N_g1 + N_g2``, which holds the
    whole output.
    """
    _check_windows(g1, g2, symbol)
    if f.dim != symbol.dim:
        raise ValueError("dimension mismatch")
    if out_box is None:
        out_box = LatticeBox(f.dim, f.radius + g1.radius + g2.radius)
    lag = _lag_box(symbol, f.radius + g1.radius)
    grid = _resolve_grid(symbol, grid, max(f.radius, g1.radius, g2.radius))
    V = stft(f, g1, lag, grid)
    band = symbol.band
    if band is None:
        return stft_adjoint(symbol.sample(lag, grid) * V, g2, out_box)
    a = _stft_coefficients(V, f.box) * symbol.time_weights(lag.points)[:, None]
    k = out_box.points
    moments = band.coefficients(k[:, None, :] - f.box.points[None, :, :])
    window = g2.at(k[None, :, :] - lag.points[:, None, :])
    vals = np.einsum("ml,kl,mk->k", a, moments, window)
    return Signal(out_box, vals)
