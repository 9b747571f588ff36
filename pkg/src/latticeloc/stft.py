"""Short-time Fourier transform on Z^n x T^n and its synthesis map."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .lattice import (
    LatticeBox,
    Signal,
    TorusGrid,
    _fft_rows,
    _scatter_to_grid,
    default_grid,
)

__all__ = ["PhaseSpaceField", "stft", "stft_convolution", "stft_adjoint"]


@dataclass(frozen=True, eq=False)
class PhaseSpaceField:
    """Complex samples ``F(m, w_j)`` over ``m_box x grid``.

    ``values`` has shape ``(m_box.size, grid.size)``; rows follow the box
    enumeration and columns the grid enumeration. Outside ``m_box`` the
    field is zero.
    """

    m_box: LatticeBox
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        if self.m_box.dim != self.grid.dim:
            raise ValueError("lattice and torus dimensions differ")
        vals = np.array(self.values, dtype=np.complex128)
        vals = vals.reshape(self.m_box.size, self.grid.size)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, m_box: LatticeBox, grid: TorusGrid) -> "PhaseSpaceField":
        return cls(m_box, grid, np.zeros((m_box.size, grid.size)))

    @classmethod
    def constant(cls, value, m_box: LatticeBox, grid: TorusGrid) -> "PhaseSpaceField":
        return cls(m_box, grid, np.full((m_box.size, grid.size), value, dtype=np.complex128))

    @classmethod
    def delta(cls, m_box: LatticeBox, grid: TorusGrid, m=None, j=None,
              scale: float = 1.0) -> "PhaseSpaceField":
        """``scale`` at the single node ``(m, w_j)`` (default the origin)."""
        dim = m_box.dim
        m = np.zeros(dim, dtype=np.int64) if m is None else np.atleast_1d(m)
        j = np.zeros(dim, dtype=np.int64) if j is None else np.atleast_1d(j)
        vals = np.zeros((m_box.size, grid.size), dtype=np.complex128)
        row = int(m_box.index(m))
        if row < 0:
            raise ValueError("delta location outside the lattice box")
        vals[row, int(grid.flat_index(j))] = scale
        return cls(m_box, grid, vals)

    @property
    def dim(self) -> int:
        return self.m_box.dim

    def rows_at(self, points) -> np.ndarray:
        """Rows for arbitrary lattice points; zero rows outside the box."""
        idx = self.m_box.index(points)
        out = np.zeros(idx.shape + (self.grid.size,), dtype=np.complex128)
        inside = idx >= 0
        out[inside] = self.values[idx[inside]]
        return out

    def on(self, m_box: LatticeBox) -> "PhaseSpaceField":
        return PhaseSpaceField(m_box, self.grid, self.rows_at(m_box.points))

    def conj(self) -> "PhaseSpaceField":
        return PhaseSpaceField(self.m_box, self.grid, np.conj(self.values))

    def abs(self) -> "PhaseSpaceField":
        return PhaseSpaceField(self.m_box, self.grid, np.abs(self.values))

    def _check_compatible(self, other: "PhaseSpaceField"):
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: Q={self.grid.Q} vs Q={other.grid.Q}")

    def _aligned(self, other: "PhaseSpaceField"):
        self._check_compatible(other)
        box = LatticeBox(self.dim, max(self.m_box.radius, other.m_box.radius))
        return box, self.rows_at(box.points), other.rows_at(box.points)

    def __add__(self, other):
        box, a, b = self._aligned(other)
        return PhaseSpaceField(box, self.grid, a + b)

    def __sub__(self, other):
        box, a, b = self._aligned(other)
        return PhaseSpaceField(box, self.grid, a - b)

    def __mul__(self, other):
        if isinstance(other, PhaseSpaceField):
            box, a, b = self._aligned(other)
            return PhaseSpaceField(box, self.grid, a * b)
        return PhaseSpaceField(self.m_box, self.grid, self.values * other)

    __rmul__ = __mul__

    def inner(self, other: "PhaseSpaceField") -> complex:
        """Quadrature ``sum_m int F conj(G) dw``."""
        self._check_compatible(other)
        b = other.rows_at(self.m_box.points)
        return complex(np.sum(self.values * np.conj(b)) * self.grid.weight)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.weight))

    def translated(self, l, x_index) -> "PhaseSpaceField":
        """``(m, w) -> F(m - l, w - x)`` with ``x`` a grid node index."""
        l = np.atleast_1d(np.asarray(l, dtype=np.int64))
        x_index = np.atleast_1d(np.asarray(x_index, dtype=np.int64))
        box = self.m_box.grown(int(np.max(np.abs(l))))
        rows = self.rows_at(box.points - l)
        cols = self.grid.flat_index(self.grid.indices - x_index)
        return PhaseSpaceField(box, self.grid, rows[:, cols])

    def to_csv(self, stream=None, magnitude: bool = False) -> str:
        """Rows ``m_1..m_n, j_1..j_n, re, im`` (or ``|F|`` when ``magnitude``)."""
        buf = io.StringIO() if stream is None else stream
        writer = csv.writer(buf, lineterminator="\n")
        n = self.dim
        head = [f"m{i + 1}" for i in range(n)] + [f"j{i + 1}" for i in range(n)]
        writer.writerow(head + (["abs"] if magnitude else ["re", "im"]))
        for r, m in enumerate(self.m_box.points):
            for c, j in enumerate(self.grid.indices):
                v = self.values[r, c]
                tail = [f"{abs(v):.17g}"] if magnitude else [f"{v.real:.17g}", f"{v.imag:.17g}"]
                writer.writerow([*map(int, m), *map(int, j), *tail])
        return buf.getvalue() if stream is None else ""

    def to_dict(self) -> dict:
        return {
            "n": self.dim,
            "radius": self.m_box.radius,
            "Q": self.grid.Q,
            "values": [[[v.real, v.imag] for v in row] for row in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseSpaceField":
        box = LatticeBox(data["n"], data["radius"])
        grid = TorusGrid(data["n"], data["Q"])
        arr = np.asarray(data["values"], dtype=float)
        return cls(box, grid, arr[..., 0] + 1j * arr[..., 1])


def _check_dims(*items):
    dims = {it.dim for it in items if it is not None}
    if len(dims) > 1:
        raise ValueError(f"dimension mismatch among inputs: {sorted(dims)}")


def stft(f: Signal, g: Signal, m_box: LatticeBox | None = None,
         grid: TorusGrid | None = None) -> PhaseSpaceField:
    """``V_g f(m, w) = sum_k f(k) conj(g(k - m)) exp(-2 pi i w.k)``.

    Each lag ``m`` is handled by one FFT of the windowed slice
    ``f * conj(T_m g)``.

    Parameters
    ----------
    f, g : Signal
        Signal and window.
    m_box : LatticeBox, optional
        Lags to evaluate; defaults to radius ``N_f + N_g``, which holds every
        nonzero lag.
    grid : TorusGrid, optional
        Frequency grid; defaults to ``Q = 2(2N + 1)`` with ``N`` the larger
        of the two box radii.
    """
    _check_dims(f, g, m_box, grid)
    if m_box is None:
        m_box = LatticeBox(f.dim, f.radius + g.radius)
    if grid is None:
        grid = default_grid(f.dim, max(f.radius, g.radius))
    k = f.box.points
    m = m_box.points
    windowed = f.values[None, :] * np.conj(g.at(k[None, :, :] - m[:, None, :]))
    folded = _scatter_to_grid(k, windowed, grid)
    return PhaseSpaceField(m_box, grid, _fft_rows(folded, grid))


def stft_convolution(f: Signal, g: Signal, m_box: LatticeBox | None = None,
                     grid: TorusGrid | None = None) -> PhaseSpaceField:
    """STFT evaluated frequency by frequency as a lattice convolution.

    ``V_g f(m, w) = exp(-2 pi i w.m) (f * M_w g^*)(m)`` with the involution
    ``g^*(k) = conj(g(-k))``. Independent of :func:`stft` (no FFT).
    """
    _check_dims(f, g, m_box, grid)
    if m_box is None:
        m_box = LatticeBox(f.dim, f.radius + g.radius)
    if grid is None:
        grid = default_grid(f.dim, max(f.radius, g.radius))
    k = f.box.points
    m = m_box.points
    lag = m[:, None, :] - k[None, :, :]
    g_star = np.conj(g.at(-lag))
    out = np.empty((m_box.size, grid.size), dtype=np.complex128)
    for col, w in enumerate(grid.nodes):
        kernel = np.exp(2j * np.pi * (lag @ w)) * g_star
        conv = kernel @ f.values
        out[:, col] = np.exp(-2j * np.pi * (m @ w)) * conv
    return PhaseSpaceField(m_box, grid, out)


def stft_adjoint(F: PhaseSpaceField, gamma: Signal,
                 out_box: LatticeBox | None = None) -> Signal:
    """Synthesis ``sum_m int F(m, w) M_w T_m gamma dw`` with grid quadrature.

    ``out_box`` defaults to the full support, radius ``R_m + N_gamma``.
    """
    _check_dims(F, gamma, out_box)
    if out_box is None:
        out_box = LatticeBox(F.dim, F.m_box.radius + gamma.radius)
    k = out_box.points
    m = F.m_box.points
    coeffs = _fft_rows(F.values, F.grid, inverse=True)
    phases = coeffs[:, F.grid.flat_index(k)]
    window = gamma.at(k[None, :, :] - m[:, None, :])
    return Signal(out_box, np.sum(phases * window, axis=0))
