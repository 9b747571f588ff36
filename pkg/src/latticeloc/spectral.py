"""Singular values, Schatten norms, the Berezin-type symbol and norm-bound reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeBox, Signal, TorusGrid, default_grid
from .localization import OperatorMatrix, Symbol, loc_kernel
from .phase_space import lp_norm_field, modulation_norm_field, modulation_norm_lattice, parse_exponent
from .stft import PhaseSpaceField

__all__ = [
    "SingularSpectrum",
    "singular_values",
    "schatten_norm",
    "trace",
    "berezin_symbol",
    "BoundCheck",
    "BoundReport",
    "bounds_report",
    "operator_box",
]

ASSERT_SLACK = 1e-10
MONITOR_SLACK = 1.0


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing singular values and the SVD reconstruction residual."""

    values: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if np.any(vals < 0) or np.any(np.diff(vals) > 0):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def max(self) -> float:
        return float(self.values[0]) if self.values.size else 0.0

    def to_dict(self) -> dict:
        return {"values": self.values.tolist(), "residual": self.residual}


def singular_values(K: OperatorMatrix | np.ndarray) -> SingularSpectrum:
    """Singular values by dense SVD, with the Frobenius reconstruction residual."""
    A = K.entries if isinstance(K, OperatorMatrix) else np.asarray(K, dtype=np.complex128)
    if A.size == 0:
        return SingularSpectrum(np.zeros(0))
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    residual = float(np.linalg.norm((U * s) @ Vh - A))
    return SingularSpectrum(s, residual)


def schatten_norm(s: SingularSpectrum, p) -> float:
    """``(sum s_j^p)^(1/p)``, the largest value for ``p = inf``."""
    p = parse_exponent(p)
    if math.isinf(p):
        return s.max
    return float(np.sum(s.values ** p) ** (1.0 / p))


def trace(K: OperatorMatrix | np.ndarray) -> complex:
    A = K.entries if isinstance(K, OperatorMatrix) else np.asarray(K)
    if isinstance(K, OperatorMatrix) and K.out_box != K.in_box:
        raise ValueError("trace needs an operator with equal input and output boxes")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"trace needs a square matrix, got shape {A.shape}")
    return complex(np.trace(A))


def operator_box(symbol: Symbol, *windows: Signal, radius: int | None = None) -> LatticeBox:
    """Common box holding the range and co-range of the operator.

    Symbols without a lag bound need an explicit ``radius``; the operator is
    then compressed to that box.
    """
    if radius is None:
        if symbol.m_radius is None:
            raise ValueError("symbol has unbounded lag support; pass an explicit box radius")
        radius = symbol.m_radius + max(w.radius for w in windows)
    return LatticeBox(symbol.dim, radius)


def berezin_symbol(symbol: Symbol, g: Signal, m_box: LatticeBox | None = None,
                   grid: TorusGrid | None = None, op_box: LatticeBox | None = None) -> PhaseSpaceField:
    """``s~(m, w) = <L(M_w T_m g), M_w T_m g>`` with ``L`` the operator with windows ``g, g``.

    The kernel is assembled once on ``op_box`` and paired with every atom.
    """
    if not np.any(g.values):
        raise ValueError("window must be nonzero")
    op_box = op_box or operator_box(symbol, g)
    m_box = m_box or LatticeBox(symbol.dim, op_box.radius + g.radius)
    grid = grid or default_grid(symbol.dim, op_box.radius)
    K = loc_kernel(symbol, g, g, op_box, op_box).entries
    k = op_box.points
    phases = np.exp(2j * np.pi * (k @ grid.nodes.T))
    out = np.empty((m_box.size, grid.size), dtype=np.complex128)
    for row, m in enumerate(m_box.points):
        atoms = phases * g.at(k - m)[:, None]
        out[row] = np.einsum("kj,kj->j", K @ atoms, np.conj(atoms))
    return PhaseSpaceField(m_box, grid, out)


@dataclass(frozen=True)
class BoundCheck:
    """``lhs <= rhs * (1 + slack)``; monitored checks never fail a report."""

    name: str
    lhs: float
    rhs: float
    slack: float
    asserted: bool = True
    skipped: bool = False
    reason: str | None = None

    @property
    def holds(self) -> bool | None:
        if self.skipped:
            return None
        return bool(self.lhs <= self.rhs * (1.0 + self.slack))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "slack": self.slack,
            "asserted": self.asserted,
            "skipped": self.skipped,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class BoundReport:
    checks: list = field(default_factory=list)

    def __getitem__(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.asserted and c.holds is False]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _skip(name, reason, asserted=True):
    return BoundCheck(name, math.nan, math.nan, ASSERT_SLACK if asserted else MONITOR_SLACK,
                      asserted, True, reason)


def _same_window(g1: Signal, g2: Signal) -> bool:
    box = LatticeBox(g1.dim, max(g1.radius, g2.radius))
    return bool(np.array_equal(g1.on(box).values, g2.on(box).values))


def _unit_delta(m_box_dim: int, grid: TorusGrid) -> PhaseSpaceField:
    # unit L^2 norm on the discretized phase space
    return PhaseSpaceField.delta(LatticeBox(m_box_dim, 0), grid, scale=grid.size ** 0.5)


def bounds_report(symbol: Symbol, g1: Signal, g2: Signal, grid: TorusGrid | None = None,
                  radius: int | None = None, monitored: bool = True) -> BoundReport:
    """Evaluate the operator-norm and trace-class inequalities for one instance.

    Asserted checks use the l^2 / L^1 forms with slack ``1e-10``:

    * ``op_norm``: ``s_max <= ||s||_inf ||g1||_2 ||g2||_2``;
    * ``trace_upper`` (``s >= 0``, ``g1 = g2``): ``S_1 <= ||s||_{L^1} ||g||_2^2``;
    * ``trace_equals_s1`` (same hypotheses): ``|tr - S_1|`` within ``1e-10 S_1``;
    * ``berezin_lower`` (same hypotheses): ``||s~||_{L^1} <= ||g||_2^2 S_1``.

    With ``monitored`` the modulation-norm forms are added as non-fatal
    checks with slack 1 (a factor 2), using the surrogate field norm with a
    unit delta window and lattice ``M^1`` norms with the window ``delta_0``.
    """
    n = symbol.dim
    checks: list[BoundCheck] = []
    box = operator_box(symbol, g1, g2, radius=radius)
    K = loc_kernel(symbol, g1, g2, box, box)
    spec = singular_values(K)
    n1, n2 = g1.norm(2), g2.norm(2)
    checks.append(BoundCheck("op_norm", spec.max, symbol.sup_norm() * n1 * n2, ASSERT_SLACK))

    same = _same_window(g1, g2)
    positive = symbol.is_nonnegative()
    s1 = schatten_norm(spec, 1)
    if same and positive:
        tr = trace(K)
        checks.append(BoundCheck("trace_equals_s1", abs(tr - s1), ASSERT_SLACK * max(1.0, s1), 0.0))
        checks.append(BoundCheck("trace_upper", s1, symbol.l1_norm() * n1 ** 2, ASSERT_SLACK))
        if symbol.m_radius is None:
            checks.append(_skip("berezin_lower", "symbol has unbounded lag support"))
        else:
            tilde = berezin_symbol(symbol, g1, op_box=box)
            checks.append(BoundCheck("berezin_lower", lp_norm_field(tilde, 1).value, n1 ** 2 * s1,
                                     ASSERT_SLACK))
    else:
        why = "needs g1 = g2 and a nonnegative symbol"
        checks += [_skip("trace_equals_s1", why), _skip("trace_upper", why), _skip("berezin_lower", why)]

    if monitored:
        checks += _monitored_checks(symbol, g1, g2, spec, grid, box, same, positive)
    return BoundReport(checks)


def _monitored_checks(symbol, g1, g2, spec, grid, box, same, positive) -> list:
    names = ["m_inf_op_norm", "m1_op_norm", "m1_s1", "m1_s1_lower", "mp_s2_interp"]
    if symbol.m_radius is None:
        return [_skip(nm, "symbol has unbounded lag support", asserted=False) for nm in names]
    n = symbol.dim
    delta0 = Signal.delta(np.zeros(n, dtype=np.int64))
    m1 = [modulation_norm_lattice(g, delta0, 1).value for g in (g1, g2)]
    grid = symbol.grid or grid or default_grid(n, box.radius)
    F = symbol.sample(LatticeBox(n, symbol.m_radius), grid)
    G = _unit_delta(n, grid)
    field_norm = {p: modulation_norm_field(F, G, p).value for p in (1, 2, math.inf)}
    out = [
        BoundCheck("m_inf_op_norm", spec.max, field_norm[math.inf] * m1[0] * m1[1], MONITOR_SLACK, False),
        BoundCheck("m1_op_norm", spec.max, field_norm[1] * m1[0] * m1[1], MONITOR_SLACK, False),
    ]
    if same:
        s1 = schatten_norm(spec, 1)
        const = 1.0 if positive else 4.0
        out.append(BoundCheck("m1_s1", s1, const * field_norm[1] * m1[0] ** 2, MONITOR_SLACK, False))
        tilde = berezin_symbol(symbol, g1, op_box=box)
        tilde_norm = modulation_norm_field(tilde, _unit_delta(n, tilde.grid), 1).value
        out.append(BoundCheck("m1_s1_lower", tilde_norm, m1[0] ** 2 * s1, MONITOR_SLACK, False))
        out.append(BoundCheck("mp_s2_interp", schatten_norm(spec, 2),
                              2.0 * field_norm[2] * m1[0], MONITOR_SLACK, False))
    else:
        why = "needs g1 = g2"
        out += [_skip(nm, why, asserted=False) for nm in names[2:]]
    return out
