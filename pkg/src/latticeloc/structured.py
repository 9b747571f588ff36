"""Structured operators: time and band projections, the Landau-Pollak-Slepian
comparison, paracommutators, paraproducts and Fourier multipliers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    BandIndicator,
    GridSamples,
    LatticeBox,
    Signal,
    TorusFunction,
    TorusGrid,
    _check_omega,
    _fft_rows,
    _scatter_to_grid,
    band_moment,
    default_grid,
    dft_lattice_to_torus,
    dft_torus_to_lattice,
    l1_norm_points,
)
from .localization import BandRegionSymbol, OperatorMatrix, loc_apply, loc_kernel
from .spectral import singular_values

__all__ = [
    "time_truncate",
    "band_project",
    "band_composition_residual",
    "ball_window",
    "lps_weight_profile",
    "LpsComparison",
    "lps_compare",
    "FrequencyKernel",
    "paracommutator_kernel",
    "paracommutator_form",
    "paraproduct",
    "multiplier_symbol",
    "apply_multiplier",
]


def time_truncate(f: Signal, T: int) -> Signal:
    """Keep ``f(k)`` for ``|k|_1 <= T`` and zero the rest."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    return Signal(f.box, np.where(f.box.ball_mask(T), f.values, 0))


def band_project(f: Signal, omega: float, out_box: LatticeBox,
                 return_error: bool = False):
    """Band projection ``sum_l f(l) c(k - l)`` evaluated on ``out_box``.

    Exact for ``n = 1``; for ``n >= 2`` the moments come from quadrature and
    ``return_error`` also yields an absolute error bound for the output.
    """
    _check_omega(omega)
    if out_box.dim != f.dim:
        raise ValueError("dimension mismatch")
    diffs = out_box.points[:, None, :] - f.box.points[None, :, :]
    c, err = band_moment(diffs, omega, return_error=True)
    out = Signal(out_box, np.asarray(c) @ f.values)
    if return_error:
        return out, float(np.max(np.asarray(err) @ np.abs(f.values), initial=0.0))
    return out


def band_composition_residual(omega: float, radius: int, cutoff: int = 2 ** 16) -> float:
    """``max |sum_l c(k - l) c(l - j) - c(k - j)|`` over ``|k|, |j| <= radius`` (``n = 1``).

    The lattice sums decay like ``1 / cutoff``; two cutoffs ``L`` and ``2L``
    are combined by Richardson extrapolation, leaving an ``O(L^-2)`` error.
    """
    _check_omega(omega)
    pts = np.arange(-radius, radius + 1)

    def partial(L: int) -> np.ndarray:
        l = np.arange(-L, L + 1, dtype=float)
        left = band_moment((pts[:, None] - l[None, :])[..., None], omega)
        right = band_moment((l[:, None] - pts[None, :])[..., None], omega)
        return left @ right

    total = 2 * partial(2 * cutoff) - partial(cutoff)
    exact = band_moment((pts[:, None] - pts[None, :])[..., None], omega)
    return float(np.max(np.abs(total - exact)))


def ball_window(dim: int, T: int) -> Signal:
    """Normalized indicator ``card(B_T)^(-1/2) chi_{B_T}``."""
    box = LatticeBox(dim, T)
    mask = box.ball_mask(T)
    return Signal(box, mask / np.sqrt(mask.sum()))


def lps_weight_profile(dim: int, T: int, box: LatticeBox) -> np.ndarray:
    """``rho(k, l) = #{m in B_T : |k - m|_1 <= T, |l - m|_1 <= T} / card(B_T)`` by counting."""
    ball = LatticeBox(dim, T)
    m = ball.points[ball.ball_mask(T)]
    near = l1_norm_points(box.points[:, None, :] - m[None, :, :]) <= T
    counts = near.astype(np.int64) @ near.T.astype(np.int64)
    return counts / len(m)


@dataclass(frozen=True, eq=False)
class LpsComparison:
    """Localization operator with ball windows against ``Q_2T P_Omega Q_2T``.

    ``closed_form_residual`` is the largest entrywise gap between the
    localization kernel and ``c(k - l) rho(k, l)``; ``synthesis_residual``
    compares the kernel columns with the synthesis path.
    """

    T: int
    omega: float
    matrix_loc: OperatorMatrix
    matrix_lps: OperatorMatrix
    weight_profile: np.ndarray
    difference_operator_norm: float
    closed_form_residual: float
    synthesis_residual: float

    def _hermitian_psd(self, M: OperatorMatrix) -> dict:
        A = M.entries
        herm = float(np.max(np.abs(A - A.conj().T)))
        eig = np.linalg.eigvalsh((A + A.conj().T) / 2)
        return {"hermitian_residual": herm, "min_eigenvalue": float(eig.min())}

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "omega": self.omega,
            "n": self.matrix_loc.out_box.dim,
            "difference_operator_norm": self.difference_operator_norm,
            "closed_form_residual": self.closed_form_residual,
            "synthesis_residual": self.synthesis_residual,
            "loc": self._hermitian_psd(self.matrix_loc),
            "lps": self._hermitian_psd(self.matrix_lps),
            "weight_profile": self.weight_profile.tolist(),
            "matrix_loc": self.matrix_loc.to_dict(),
            "matrix_lps": self.matrix_lps.to_dict(),
        }


def lps_compare(T: int, omega: float, grid: TorusGrid | None = None, dim: int = 1) -> LpsComparison:
    """Compare the band-region localization operator with ``Q_2T P_Omega Q_2T``.

    Both act on the box of radius ``2T``. The band moments are closed form
    for ``dim = 1`` and come from quadrature otherwise.
    """
    _check_omega(omega)
    if int(T) != T or T < 0:
        raise ValueError(f"T must be a nonnegative integer, got {T!r}")
    T = int(T)
    box = LatticeBox(dim, 2 * T)
    g = ball_window(dim, T)
    symbol = BandRegionSymbol(T, omega, dim)
    loc = loc_kernel(symbol, g, g, box, box)

    k = box.points
    c = np.asarray(band_moment(k[:, None, :] - k[None, :, :], omega), dtype=np.complex128)
    mask = box.ball_mask(2 * T)
    lps = OperatorMatrix(box, box, c * np.outer(mask, mask))

    rho = lps_weight_profile(dim, T, box)
    closed = float(np.max(np.abs(loc.entries - c * rho)))
    diff = singular_values(loc - lps).max

    grid = grid or default_grid(dim, 2 * T)
    synth = 0.0
    for col, point in enumerate(k):
        out = loc_apply(symbol, g, g, Signal.delta(point, radius=2 * T), grid, box)
        synth = max(synth, float(np.max(np.abs(out.values - loc.entries[:, col]))))
    return LpsComparison(T, float(omega), loc, lps, rho, diff, closed, synth)


@dataclass(frozen=True, eq=False)
class FrequencyKernel:
    """Samples ``A(xi_i, eta_j)`` on the grid; rows run over ``xi``."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.size, self.grid.size):
            raise ValueError(f"kernel of shape {vals.shape} does not match the grid")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_dict(self) -> dict:
        return {
            "n": self.grid.dim,
            "Q": self.grid.Q,
            "values": [[[v.real, v.imag] for v in row] for row in self.values],
        }


def _hat(g: Signal, grid: TorusGrid) -> np.ndarray:
    return dft_lattice_to_torus(g, grid).values


def _shift_table(grid: TorusGrid) -> np.ndarray:
    """``table[i, t]`` is the flat index of node ``i - t``."""
    idx = grid.indices
    return grid.flat_index(idx[:, None, :] - idx[None, :, :])


def _check_grid(beta: TorusFunction, grid: TorusGrid | None, radius: int, dim: int) -> TorusGrid:
    if isinstance(beta, GridSamples):
        if grid is not None and grid != beta.grid:
            raise ValueError(f"grid mismatch: beta on Q={beta.grid.Q}, requested Q={grid.Q}")
        return beta.grid
    if beta.dim != dim:
        raise ValueError("dimension mismatch")
    return grid or default_grid(dim, radius)


def paracommutator_kernel(beta: TorusFunction, g1: Signal, g2: Signal,
                          grid: TorusGrid | None = None) -> FrequencyKernel:
    """``A(xi, eta) = int beta(w) conj(g1^(xi - w)) g2^(eta - w) dw`` on the grid.

    Grid-sampled ``beta`` is integrated by grid quadrature. For a band
    indicator the integral is exact:
    ``A = sum_{k,l} conj(g1(k)) g2(l) c(l - k) exp(2 pi i (k.xi - l.eta))``.
    """
    if g1.dim != g2.dim:
        raise ValueError("dimension mismatch")
    grid = _check_grid(beta, grid, max(g1.radius, g2.radius), g1.dim)
    if isinstance(beta, GridSamples):
        shift = _shift_table(grid)
        left = np.conj(_hat(g1, grid))[shift] * beta.values[None, :]
        right = _hat(g2, grid)[shift]
        return FrequencyKernel(grid, left @ right.T * grid.weight)
    k, l = g1.box.points, g2.box.points
    c = beta.coefficients(l[None, :, :] - k[:, None, :])
    weights = np.conj(g1.values)[:, None] * g2.values[None, :] * c
    E1 = np.exp(2j * np.pi * (grid.nodes @ k.T))
    E2 = np.exp(-2j * np.pi * (grid.nodes @ l.T))
    return FrequencyKernel(grid, E1 @ weights @ E2.T)


def paracommutator_form(A: FrequencyKernel, alpha: Signal, f: Signal, h: Signal) -> complex:
    """``int int A(xi, eta) alpha^(eta - xi) f^(xi) conj(h^(eta)) dxi deta`` by quadrature.

    Exact when ``Q`` exceeds ``N_f + N_alpha + N_g1`` and ``N_h + N_alpha + N_g2``.
    """
    grid = A.grid
    alpha_hat = _hat(alpha, grid)
    diff = grid.flat_index(grid.indices[None, :, :] - grid.indices[:, None, :])
    integrand = A.values * alpha_hat[diff] * _hat(f, grid)[:, None] * np.conj(_hat(h, grid))[None, :]
    return complex(integrand.sum() * grid.weight ** 2)


def paraproduct(g1: Signal, g2: Signal, f: Signal, h: Signal,
                grid: TorusGrid | None = None) -> Signal:
    """``p(k) = int (M_w g1~ * f)(k) conj((M_w g2~ * h)(k)) dw`` with ``g~(k) = conj(g(-k))``.

    The ``w`` integral uses grid quadrature, exact for ``Q > N_g1 + N_g2``.
    """
    if len({g1.dim, g2.dim, f.dim, h.dim}) != 1:
        raise ValueError("dimension mismatch")
    grid = grid or default_grid(f.dim, max(g1.radius, g2.radius, f.radius, h.radius))
    box = LatticeBox(f.dim, min(f.radius + g1.radius, h.radius + g2.radius))
    k = box.points

    def windowed_conv(sig: Signal, g: Signal) -> np.ndarray:
        # (M_w g~ * sig)(k) = sum_l sig(l) exp(2 pi i w.(k - l)) conj(g(l - k))
        l = sig.box.points
        D = np.conj(g.at(l[None, :, :] - k[:, None, :])) * sig.values[None, :]
        phase_l = np.exp(-2j * np.pi * (grid.nodes @ l.T))
        phase_k = np.exp(2j * np.pi * (grid.nodes @ k.T))
        return phase_k * (phase_l @ D.T)

    prod = windowed_conv(f, g1) * np.conj(windowed_conv(h, g2))
    return Signal(box, prod.sum(axis=0) * grid.weight)


def multiplier_symbol(beta: TorusFunction, g1: Signal, g2: Signal,
                      grid: TorusGrid | None = None) -> GridSamples:
    """``mu(xi) = int beta(w) conj(g1^(xi - w)) g2^(xi - w) dw`` on the grid.

    A circular convolution over the grid for sampled ``beta``; exact band
    moments for a band indicator.
    """
    if g1.dim != g2.dim:
        raise ValueError("dimension mismatch")
    grid = _check_grid(beta, grid, max(g1.radius, g2.radius), g1.dim)
    if isinstance(beta, GridSamples):
        prod = np.conj(_hat(g1, grid)) * _hat(g2, grid)
        conv = _fft_rows(
            _fft_rows(beta.values, grid) * _fft_rows(prod, grid), grid, inverse=True
        )
        return GridSamples(grid, conv * grid.weight)
    k, l = g1.box.points, g2.box.points
    c = beta.coefficients(l[None, :, :] - k[:, None, :])
    weights = np.conj(g1.values)[:, None] * g2.values[None, :] * c
    lag_box = LatticeBox(g1.dim, g1.radius + g2.radius)
    lags = k[:, None, :] - l[None, :, :]
    folded = np.zeros(lag_box.size, dtype=np.complex128)
    np.add.at(folded, lag_box.index(lags).ravel(), weights.ravel())
    # mu(xi) = sum_r folded(r) exp(2 pi i r.xi)
    coeffs = _scatter_to_grid(-lag_box.points, folded, grid)
    return GridSamples(grid, _fft_rows(coeffs, grid))


def apply_multiplier(mu: GridSamples, f: Signal, out_box: LatticeBox | None = None) -> Signal:
    """``F^-1(mu f^)`` on ``out_box``.

    The result is ``Q``-periodic, so the default box is one period,
    radius ``(Q - 1) // 2``.
    """
    grid = mu.grid
    out_box = out_box or LatticeBox(f.dim, (grid.Q - 1) // 2)
    prod = GridSamples(grid, mu.values * _hat(f, grid))
    return dft_torus_to_lattice(prod, out_box)
