"""Finitely supported signals on Z^n, quadrature grids on T^n, and the
Fourier pair between them.

Signals live on centered sup-norm boxes ``{k : max_i |k_i| <= N}`` enumerated
lexicographically (first coordinate slowest), with an implicit zero outside.
The torus is sampled at the nodes ``j / Q`` of a uniform grid with weight
``Q**-n`` per node; this rule integrates a trigonometric polynomial exactly
unless one of its frequencies is a nonzero multiple of ``Q``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Union

import numpy as np
from scipy import integrate

__all__ = [
    "LatticeBox",
    "Signal",
    "TorusGrid",
    "GridSamples",
    "BandIndicator",
    "TorusFunction",
    "default_grid",
    "tf_atom",
    "dft_lattice_to_torus",
    "dft_torus_to_lattice",
    "band_moment",
    "l1_norm_points",
]


def l1_norm_points(points: np.ndarray) -> np.ndarray:
    """``|k| = |k_1| + ... + |k_n|`` along the last axis."""
    return np.abs(np.asarray(points)).sum(axis=-1)


@dataclass(frozen=True)
class LatticeBox:
    """The cube ``{k in Z^n : max_i |k_i| <= radius}``."""

    dim: int
    radius: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        if int(self.radius) != self.radius or self.radius < 0:
            raise ValueError(f"radius must be a nonnegative integer, got {self.radius!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "radius", int(self.radius))

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def size(self) -> int:
        return self.side ** self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.dim

    @cached_property
    def points(self) -> np.ndarray:
        """Integer array of shape ``(size, dim)`` in lexicographic order."""
        pts = np.indices(self.shape).reshape(self.dim, -1).T - self.radius
        pts.setflags(write=False)
        return pts

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points)
        return np.all(np.abs(points) <= self.radius, axis=-1)

    def index(self, points) -> np.ndarray:
        """Flat enumeration index of each point, ``-1`` outside the box."""
        points = np.asarray(points, dtype=np.int64)
        inside = self.contains(points)
        shifted = np.where(inside[..., None], points + self.radius, 0)
        flat = np.zeros(points.shape[:-1], dtype=np.int64)
        for axis in range(self.dim):
            flat = flat * self.side + shifted[..., axis]
        return np.where(inside, flat, -1)

    def grown(self, amount: int) -> "LatticeBox":
        return LatticeBox(self.dim, self.radius + int(amount))

    def ball_mask(self, T: float) -> np.ndarray:
        """Predicate of the l1 ball ``B_T`` over the enumerated points."""
        return l1_norm_points(self.points) <= T

    def to_dict(self) -> dict:
        return {"n": self.dim, "radius": self.radius}


def _as_point(p, dim: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(p))
    if arr.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Complex function on ``box``, zero outside it."""

    box: LatticeBox
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128).reshape(-1)
        if vals.shape[0] != self.box.size:
            raise ValueError(
                f"{vals.shape[0]} values given for a box with {self.box.size} points"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, dim: int, radius: int) -> "Signal":
        box = LatticeBox(dim, radius)
        return cls(box, np.zeros(box.size))

    @classmethod
    def delta(cls, point, dim: int | None = None, radius: int | None = None) -> "Signal":
        """Unit impulse at ``point``."""
        pt = np.atleast_1d(np.asarray(point, dtype=np.int64))
        dim = pt.shape[0] if dim is None else dim
        pt = _as_point(pt, dim)
        need = int(np.max(np.abs(pt))) if pt.size else 0
        box = LatticeBox(dim, need if radius is None else radius)
        if not box.contains(pt):
            raise ValueError(f"point {pt.tolist()} lies outside the box of radius {box.radius}")
        vals = np.zeros(box.size, dtype=np.complex128)
        vals[box.index(pt)] = 1.0
        return cls(box, vals)

    @classmethod
    def from_function(cls, func, dim: int, radius: int) -> "Signal":
        box = LatticeBox(dim, radius)
        return cls(box, [func(tuple(p)) for p in box.points])

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def radius(self) -> int:
        return self.box.radius

    def cube(self) -> np.ndarray:
        return self.values.reshape(self.box.shape)

    def at(self, points) -> np.ndarray:
        """Values at arbitrary lattice points (any leading shape)."""
        idx = self.box.index(points)
        out = np.zeros(idx.shape, dtype=np.complex128)
        inside = idx >= 0
        out[inside] = self.values[idx[inside]]
        return out

    def on(self, box: LatticeBox) -> "Signal":
        """Restriction / zero extension to another box."""
        if box.dim != self.dim:
            raise ValueError("dimension mismatch")
        return Signal(box, self.at(box.points))

    def support_radius(self) -> int:
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return 0
        return int(np.max(np.abs(self.box.points[nz])))

    def norm(self, p: float = 2) -> float:
        return float(np.linalg.norm(self.values, ord=p))

    def inner(self, other: "Signal") -> complex:
        """``<self, other> = sum_k self(k) conj(other(k))``."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return complex(np.sum(self.values * np.conj(other.at(self.box.points))))

    def conj(self) -> "Signal":
        return Signal(self.box, np.conj(self.values))

    def reflected(self) -> "Signal":
        """``k -> self(-k)``."""
        return Signal(self.box, self.values[::-1])

    def _aligned(self, other: "Signal"):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        box = LatticeBox(self.dim, max(self.radius, other.radius))
        return box, self.at(box.points), other.at(box.points)

    def __add__(self, other: "Signal") -> "Signal":
        box, a, b = self._aligned(other)
        return Signal(box, a + b)

    def __sub__(self, other: "Signal") -> "Signal":
        box, a, b = self._aligned(other)
        return Signal(box, a - b)

    def __mul__(self, scalar) -> "Signal":
        return Signal(self.box, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Signal":
        return Signal(self.box, -self.values)

    def to_dict(self) -> dict:
        return {
            "n": self.dim,
            "radius": self.radius,
            "values": [[v.real, v.imag] for v in self.values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Signal":
        box = LatticeBox(data["n"], data["radius"])
        vals = np.asarray(data["values"], dtype=float)
        if vals.ndim == 1:
            vals = np.stack([vals, np.zeros_like(vals)], axis=1)
        return cls(box, vals[:, 0] + 1j * vals[:, 1])


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid ``{j / Q : j in {0..Q-1}^n}`` on the torus."""

    dim: int
    Q: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")
        if int(self.Q) != self.Q or self.Q < 1:
            raise ValueError(f"grid resolution must be >= 1, got {self.Q!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "Q", int(self.Q))

    @property
    def size(self) -> int:
        return self.Q ** self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.Q,) * self.dim

    @property
    def weight(self) -> float:
        return float(self.Q) ** (-self.dim)

    @cached_property
    def indices(self) -> np.ndarray:
        """Multi-indices ``j`` of shape ``(size, dim)``, lexicographic."""
        idx = np.indices(self.shape).reshape(self.dim, -1).T
        idx.setflags(write=False)
        return idx

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.indices / self.Q

    @cached_property
    def centered_nodes(self) -> np.ndarray:
        """Node representatives in ``[-1/2, 1/2)^n``."""
        c = self.indices.copy()
        c[c >= (self.Q + 1) // 2] -= self.Q
        # an even Q puts j = Q/2 at -1/2
        return c / self.Q

    def flat_index(self, multi) -> np.ndarray:
        """Flat node index of integer multi-indices taken modulo ``Q``."""
        multi = np.mod(np.asarray(multi, dtype=np.int64), self.Q)
        flat = np.zeros(multi.shape[:-1], dtype=np.int64)
        for axis in range(self.dim):
            flat = flat * self.Q + multi[..., axis]
        return flat

    def refined(self, factor: int = 2) -> "TorusGrid":
        return TorusGrid(self.dim, self.Q * factor)


def default_grid(dim: int, radius: int) -> TorusGrid:
    """``Q = 2(2N+1)``: twice the exactness threshold for data on box ``N``."""
    return TorusGrid(dim, 2 * (2 * radius + 1))


def _scatter_to_grid(points: np.ndarray, values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Fold lattice data onto ``Z_Q^n`` (last axis of ``values`` runs over points)."""
    flat = grid.flat_index(points)
    out = np.zeros(values.shape[:-1] + (grid.size,), dtype=np.complex128)
    np.add.at(out, (..., flat), values)
    return out


def _fft_rows(arr: np.ndarray, grid: TorusGrid, inverse: bool = False) -> np.ndarray:
    lead = arr.shape[:-1]
    cube = arr.reshape(lead + grid.shape)
    axes = tuple(range(len(lead), len(lead) + grid.dim))
    res = np.fft.ifftn(cube, axes=axes) if inverse else np.fft.fftn(cube, axes=axes)
    return res.reshape(lead + (grid.size,))


@dataclass(frozen=True, eq=False)
class GridSamples:
    """A function on the torus given by its samples on a grid."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128).reshape(-1)
        if vals.shape[0] != self.grid.size:
            raise ValueError(f"{vals.shape[0]} samples for a grid with {self.grid.size} nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value, grid: TorusGrid) -> "GridSamples":
        return cls(grid, np.full(grid.size, value, dtype=np.complex128))

    @classmethod
    def from_function(cls, func, grid: TorusGrid) -> "GridSamples":
        return cls(grid, [func(w) for w in grid.nodes])

    @property
    def dim(self) -> int:
        return self.grid.dim

    def coefficients(self, r) -> np.ndarray:
        """Quadrature of ``F(w) exp(2 pi i r.w)`` for integer points ``r``."""
        r = np.asarray(r, dtype=np.int64)
        inv = _fft_rows(self.values[None, :], self.grid, inverse=True)[0]
        return inv[self.grid.flat_index(r)]

    def sample(self, grid: TorusGrid) -> np.ndarray:
        if grid != self.grid:
            raise ValueError(f"grid mismatch: samples on Q={self.grid.Q}, requested Q={grid.Q}")
        return self.values

    def integral(self) -> complex:
        return complex(self.values.mean())

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l1_norm(self) -> float:
        return float(np.mean(np.abs(self.values)))

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol) and np.all(self.values.real >= -tol))

    def conj(self) -> "GridSamples":
        return GridSamples(self.grid, np.conj(self.values))

    def to_dict(self) -> dict:
        return {
            "n": self.dim,
            "Q": self.grid.Q,
            "values": [[v.real, v.imag] for v in self.values],
        }


@dataclass(frozen=True)
class BandIndicator:
    """Indicator of the l1 ball ``{|w| <= omega}`` in ``[-1/2, 1/2)^n``."""

    omega: float
    dim: int = 1

    def __post_init__(self):
        _check_omega(self.omega)
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim!r}")

    def coefficients(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.int64)
        return np.asarray(band_moment(r, self.omega), dtype=np.complex128)

    def sample(self, grid: TorusGrid) -> np.ndarray:
        """Pointwise samples (not used for integrals; those use band moments)."""
        if grid.dim != self.dim:
            raise ValueError("dimension mismatch")
        return (l1_norm_points(grid.centered_nodes) <= self.omega).astype(np.complex128)

    def integral(self) -> complex:
        return complex(band_moment(np.zeros(self.dim, dtype=np.int64), self.omega))

    def sup_norm(self) -> float:
        return 1.0

    def l1_norm(self) -> float:
        return float(self.integral().real)

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return True

    def conj(self) -> "BandIndicator":
        return self

    def to_dict(self) -> dict:
        return {"band": {"omega": self.omega, "n": self.dim}}


TorusFunction = Union[GridSamples, BandIndicator]


def torus_function_from_dict(data: dict) -> TorusFunction:
    if "band" in data:
        band = data["band"]
        return BandIndicator(float(band["omega"]), int(band.get("n", data.get("n", 1))))
    grid = TorusGrid(data["n"], data["Q"])
    vals = np.asarray(data["values"], dtype=float)
    if vals.ndim == 1:
        vals = np.stack([vals, np.zeros_like(vals)], axis=1)
    return GridSamples(grid, vals[:, 0] + 1j * vals[:, 1])


def tf_atom(g: Signal, m, w) -> Signal:
    """Time-frequency shift ``M_w T_m g``: ``k -> exp(2 pi i w.k) g(k - m)``.

    The output box is the input box grown by ``max|m_i|`` so that it holds
    the translated support.
    """
    m = _as_point(np.asarray(m, dtype=np.int64), g.dim)
    w = _as_point(np.asarray(w, dtype=float), g.dim)
    box = g.box.grown(int(np.max(np.abs(m))))
    k = box.points
    vals = np.exp(2j * np.pi * (k @ w)) * g.at(k - m)
    return Signal(box, vals)


def dft_lattice_to_torus(f: Signal, grid: TorusGrid) -> GridSamples:
    """Samples of ``sum_k f(k) exp(-2 pi i k.w)`` on the grid nodes."""
    if grid.dim != f.dim:
        raise ValueError(f"grid dimension {grid.dim} does not match signal dimension {f.dim}")
    folded = _scatter_to_grid(f.box.points, f.values, grid)
    return GridSamples(grid, _fft_rows(folded, grid))


def dft_torus_to_lattice(F: GridSamples, box: LatticeBox) -> Signal:
    """``f(k) = Q^-n sum_j F(w_j) exp(2 pi i k.w_j)`` on ``box``."""
    if box.dim != F.dim:
        raise ValueError("dimension mismatch")
    return Signal(box, F.coefficients(box.points))


def _check_omega(omega: float) -> None:
    if not (0.0 < omega <= 0.5):
        raise ValueError(f"band limit omega must lie in (0, 1/2], got {omega!r}")


def _band_moment_1d(r: np.ndarray, omega: float) -> np.ndarray:
    x = 2.0 * r * omega
    val = 2.0 * omega * np.sinc(x)
    # sin(pi x) at integer x is exactly zero
    exact_zero = (x == np.round(x)) & (r != 0)
    return np.where(exact_zero, 0.0, val)


def _cos_ball(r: tuple[int, ...], a: float) -> tuple[float, float]:
    """``int_{|w|_1 <= a} prod_i cos(2 pi r_i w_i) dw`` over R^d, with error."""
    if a <= 0.0:
        return 0.0, 0.0
    if len(r) == 1:
        return float(_band_moment_1d(np.asarray(r[0]), a)), 0.0
    head, tail = r[0], r[1:]
    inner_err = [0.0]

    def integrand(w0):
        val, err = _cos_ball(tail, a - w0)
        inner_err[0] = max(inner_err[0], err)
        return np.cos(2 * np.pi * head * w0) * val

    val, err = integrate.quad(integrand, 0.0, a, epsabs=1e-13, epsrel=1e-12, limit=200)
    return 2.0 * val, 2.0 * (err + a * inner_err[0])


@lru_cache(maxsize=4096)
def _band_moment_nd(r: tuple[int, ...], omega: float) -> tuple[float, float]:
    # the ball is symmetric under each coordinate reflection, so the sine
    # parts of the character integrate to zero
    return _cos_ball(tuple(sorted(abs(x) for x in r)), omega)


def band_moment(r, omega: float, return_error: bool = False):
    """Fourier moment ``c(r) = int_{|w|_1 <= omega} exp(2 pi i r.w) dw``.

    Parameters
    ----------
    r : int or array_like
        A scalar (``n = 1``) or integer points of shape ``(..., n)``.
    omega : float
        Band limit in ``(0, 1/2]``.
    return_error : bool
        Also return an absolute error bound (zero for ``n = 1``, where the
        closed form ``sin(2 pi r omega) / (pi r)`` is used; nested adaptive
        quadrature with a closed-form innermost integral otherwise).
    """
    _check_omega(omega)
    r = np.asarray(r, dtype=np.int64)
    if r.ndim == 0:
        r = r[None]
        scalar = True
    else:
        scalar = False
    n = r.shape[-1]
    if n == 1:
        val = _band_moment_1d(r[..., 0].astype(float), omega)
        err = np.zeros_like(val)
    else:
        flat = r.reshape(-1, n)
        pairs = [_band_moment_nd(tuple(int(x) for x in p), float(omega)) for p in flat]
        val = np.array([p[0] for p in pairs]).reshape(r.shape[:-1])
        err = np.array([p[1] for p in pairs]).reshape(r.shape[:-1])
    if scalar or (r.ndim == 1):
        val, err = float(val), float(err)
    return (val, err) if return_error else val
