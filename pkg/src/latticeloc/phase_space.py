"""Norms and convolution on the phase space Z^n x T^n."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeBox, Signal, TorusGrid, _scatter_to_grid, default_grid
from .stft import PhaseSpaceField, stft

__all__ = [
    "NormReport",
    "parse_exponent",
    "lp_norm_field",
    "ps_convolve",
    "modulation_norm_lattice",
    "modulation_norm_field",
]


def parse_exponent(p) -> float:
    """Accept ``1 <= p <= inf`` as a number or the strings ``"inf"``/``"2"``."""
    if isinstance(p, str):
        p = math.inf if p.strip().lower() in {"inf", "infinity", "∞"} else float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {p!r}")
    return p


def _p_label(p: float):
    if math.isinf(p):
        return "inf"
    if p == 2:
        return "2"
    return p


@dataclass(frozen=True)
class NormReport:
    """A norm value with its exactness status.

    ``refinement_delta`` is the change of the value under ``Q -> 2Q`` and
    is only recorded for approximate values.
    """

    p: float
    value: float
    exact: bool
    refinement_delta: float | None = None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("norm values are nonnegative")
        if self.exact and self.refinement_delta is not None:
            raise ValueError("exact norms carry no refinement delta")

    def to_dict(self) -> dict:
        return {
            "p": _p_label(self.p),
            "value": self.value,
            "exact": self.exact,
            "refinement_delta": self.refinement_delta,
        }


def _lp(values: np.ndarray, weight: float, p: float) -> float:
    mag = np.abs(values)
    if math.isinf(p):
        return float(mag.max()) if mag.size else 0.0
    return float((np.sum(mag ** p) * weight) ** (1.0 / p))


def lp_norm_field(F: PhaseSpaceField, p) -> NormReport:
    """``(sum_m Q^-n sum_j |F(m, w_j)|^p)^(1/p)``; the max for ``p = inf``.

    The field is a grid function, so the value is exact for it.
    """
    p = parse_exponent(p)
    return NormReport(p, _lp(F.values, F.grid.weight, p), True)


def ps_convolve(F: PhaseSpaceField, G: PhaseSpaceField) -> PhaseSpaceField:
    """Group convolution ``(F * G)(m, w) = sum_l int F(l, x) G(m - l, w - x) dx``.

    Linear in the lattice variable (output box radius ``R_F + R_G``) and
    circular on the grid, both done with one multidimensional FFT.
    """
    if F.grid != G.grid:
        raise ValueError(f"grid mismatch: Q={F.grid.Q} vs Q={G.grid.Q}")
    n = F.dim
    out_box = LatticeBox(n, F.m_box.radius + G.m_box.radius)
    grid = F.grid
    lat_shape = out_box.shape
    axes = tuple(range(2 * n))

    def padded(field: PhaseSpaceField) -> np.ndarray:
        arr = field.values.reshape(field.m_box.shape + grid.shape)
        pad = [(0, lat_shape[0] - field.m_box.side)] * n + [(0, 0)] * n
        return np.fft.fftn(np.pad(arr, pad), axes=axes)

    prod = np.fft.ifftn(padded(F) * padded(G), axes=axes) * grid.weight
    return PhaseSpaceField(out_box, grid, prod.reshape(out_box.size, grid.size))


def modulation_norm_lattice(f: Signal, g: Signal, p, m_box: LatticeBox | None = None,
                            grid: TorusGrid | None = None) -> NormReport:
    """``||V_g f||_{L^p}`` on the phase space.

    Exact for ``p = 2`` (whenever ``Q >= 2 N_g + 1``) and for even integer
    ``p`` with ``Q >= p N_g + 1``, since ``|V_g f(m, .)|^p`` is then a
    trigonometric polynomial integrated exactly; otherwise the value is
    flagged approximate with its ``Q -> 2Q`` refinement delta.
    """
    p = parse_exponent(p)
    if not np.any(g.values):
        raise ValueError("window must be nonzero")
    if grid is None:
        grid = default_grid(f.dim, max(f.radius, g.radius))
    width = g.support_radius()
    value = lp_norm_field(stft(f, g, m_box, grid), p).value
    even = not math.isinf(p) and p == int(p) and int(p) % 2 == 0
    if even and grid.Q >= int(p) * width + 1:
        return NormReport(p, value, True)
    finer = lp_norm_field(stft(f, g, m_box, grid.refined()), p).value
    return NormReport(p, value, False, abs(finer - value))


def _field_stft_norm(F: PhaseSpaceField, G: PhaseSpaceField, p: float, P: int) -> float:
    """L^p norm of the STFT of ``F`` on the group ``Z^n x Z_Q^n``.

    The group carries counting measure times ``Q^-n`` counting, its dual
    ``T^n x Z_Q^n`` Lebesgue times counting; the ``T^n`` integral uses a
    ``P``-point grid.
    """
    n = F.dim
    grid = F.grid
    Q = grid.Q
    nu = TorusGrid(n, P)
    shift_box = LatticeBox(n, F.m_box.radius + G.m_box.radius)
    l = F.m_box.points
    i = grid.indices
    total = 0.0
    peak = 0.0
    for m in shift_box.points:
        g_rows = G.rows_at(l - m)
        if not np.any(g_rows):
            continue
        for jflat, j in enumerate(i):
            cols = grid.flat_index(i - j)
            prod = F.values * np.conj(g_rows[:, cols]) * grid.weight
            # lattice DFT onto the nu grid, then the Z_Q DFT
            folded = _scatter_to_grid(l, prod.T, nu).T
            spec = np.fft.fftn(folded.reshape(nu.shape + grid.shape), axes=tuple(range(2 * n)))
            mag = np.abs(spec)
            if math.isinf(p):
                peak = max(peak, float(mag.max()))
            else:
                total += float(np.sum(mag ** p))
    if math.isinf(p):
        return peak
    return float((total * grid.weight * nu.weight) ** (1.0 / p))


def modulation_norm_field(F: PhaseSpaceField, G: PhaseSpaceField, p,
                          nu_resolution: int | None = None) -> NormReport:
    """Surrogate of the symbol-class norm ``||F||_{M^p(Z^n x T^n)}``.

    The phase space is discretized to the group ``Z^n x Z_Q^n`` with its own
    STFT against the window ``G``; with a unit-norm ``G`` the value at
    ``p = 2`` equals ``lp_norm_field(F, 2)``. The continuous frequency dual
    to the lattice is integrated on a ``nu_resolution``-point grid
    (default ``2(2R + 1)``), exact for ``p = 2`` and for even ``p`` with
    enough points; otherwise the report is approximate.
    """
    p = parse_exponent(p)
    if F.grid != G.grid:
        raise ValueError(f"grid mismatch: Q={F.grid.Q} vs Q={G.grid.Q}")
    if not np.any(G.values):
        raise ValueError("window must be nonzero")
    R = max(F.m_box.radius, G.m_box.radius)
    P = nu_resolution or 2 * (2 * R + 1)
    value = _field_stft_norm(F, G, p, P)
    even = not math.isinf(p) and p == int(p) and int(p) % 2 == 0
    if even and P >= int(p) * G.m_box.radius + 1:
        return NormReport(p, value, True)
    finer = _field_stft_norm(F, G, p, 2 * P)
    return NormReport(p, value, False, abs(finer - value))
