"""Seeded verification suite over every module's identities and inequalities.

Each check draws from its own Philox stream spawned from the global seed,
so reports are reproducible check by check.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .lattice import (
    BandIndicator,
    GridSamples,
    LatticeBox,
    Signal,
    TorusGrid,
    band_moment,
    dft_lattice_to_torus,
)
from .localization import (
    BandRegionSymbol,
    FreqOnlySymbol,
    GridSymbol,
    SeparableSymbol,
    TimeOnlySymbol,
    loc_apply,
    loc_bilinear,
    loc_kernel,
)
from .phase_space import lp_norm_field, modulation_norm_lattice, ps_convolve
from .spectral import berezin_symbol, bounds_report, schatten_norm, singular_values
from .stft import PhaseSpaceField, stft, stft_adjoint, stft_convolution
from .structured import (
    apply_multiplier,
    band_composition_residual,
    band_project,
    lps_compare,
    multiplier_symbol,
    paracommutator_form,
    paracommutator_kernel,
    paraproduct,
    time_truncate,
)

__all__ = ["ConfigError", "CheckResult", "VerifyReport", "run_verify_suite", "random_signal", "CHECKS"]

SUITE_NAME = "latticeloc-verify"


class ConfigError(ValueError):
    """Invalid suite size parameters."""


@dataclass
class CheckResult:
    name: str
    status: str
    tolerance: float
    residual: float | None = None
    lhs: float | None = None
    rhs: float | None = None
    instances: int = 0
    seconds: float | None = None
    note: str | None = None

    def to_dict(self, timing: bool = False) -> dict:
        out = {"name": self.name, "status": self.status, "tolerance": self.tolerance}
        if self.residual is not None:
            out["residual"] = self.residual
        if self.lhs is not None:
            out["lhs"] = self.lhs
            out["rhs"] = self.rhs
        out["instances"] = self.instances
        if self.note:
            out["note"] = self.note
        if timing:
            out["seconds"] = self.seconds
        return out


@dataclass
class VerifyReport:
    seed: int
    size: dict
    checks: list = field(default_factory=list)

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_dict(self, timing: bool = False) -> dict:
        counts = {s: sum(c.status == s for c in self.checks) for s in ("pass", "fail", "skip")}
        return {
            "suite": SUITE_NAME,
            "seed": self.seed,
            "size": self.size,
            "summary": counts,
            "checks": [c.to_dict(timing) for c in self.checks],
        }


def random_signal(rng: np.random.Generator, dim: int, radius: int) -> Signal:
    box = LatticeBox(dim, radius)
    return Signal(box, rng.standard_normal(box.size) + 1j * rng.standard_normal(box.size))


def _random_field(rng, m_box: LatticeBox, grid: TorusGrid, nonneg: bool = False) -> PhaseSpaceField:
    shape = (m_box.size, grid.size)
    if nonneg:
        return PhaseSpaceField(m_box, grid, rng.random(shape))
    return PhaseSpaceField(m_box, grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _rel(a, b, scale=None) -> float:
    a, b = np.asarray(a), np.asarray(b)
    s = scale if scale is not None else max(1.0, float(np.max(np.abs(b), initial=0.0)))
    return float(np.max(np.abs(a - b), initial=0.0)) / s


class _Ctx:
    """Random instance factory handed to each check."""

    def __init__(self, rng, n, N, grid, instances):
        self.rng, self.n, self.N, self.grid, self.instances = rng, n, N, grid, instances

    def signal(self, radius=None):
        return random_signal(self.rng, self.n, self.N if radius is None else radius)

    def omega(self):
        return float(self.rng.uniform(0.05, 0.5))

    def symbols(self, nonneg=False):
        n, N, grid, rng = self.n, self.N, self.grid, self.rng
        alpha = self.signal()
        if nonneg:
            alpha = Signal(alpha.box, np.abs(alpha.values))
        beta_vals = rng.random(grid.size) if nonneg else rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
        beta = GridSamples(grid, beta_vals)
        return [
            GridSymbol(_random_field(rng, LatticeBox(n, N), grid, nonneg)),
            SeparableSymbol(alpha, beta),
            SeparableSymbol(alpha, BandIndicator(self.omega(), n)),
            TimeOnlySymbol(alpha),
            FreqOnlySymbol(beta),
            FreqOnlySymbol(BandIndicator(self.omega(), n)),
            BandRegionSymbol(int(rng.integers(0, N + 1)), self.omega(), n),
        ]


def _max_over(ctx, fn):
    return max(fn() for _ in range(ctx.instances))


# each check returns (residual, tolerance) or (lhs, rhs, slack) or a CheckResult-ready dict


def check_band_moment(ctx):
    if ctx.n != 1:
        return {"skip": "closed form is one-dimensional"}

    def one():
        om = ctx.omega()
        r = int(ctx.rng.integers(-3 * ctx.N, 3 * ctx.N + 1))
        ref = integrate.quad(lambda w: math.cos(2 * math.pi * r * w), -om, om, epsabs=1e-14)[0]
        return abs(band_moment(r, om) - ref)
    return _max_over(ctx, one), 1e-10


def check_orthogonality(ctx):
    def one():
        f1, f2, g1, g2 = (ctx.signal() for _ in range(4))
        lhs = stft(f1, g1, grid=ctx.grid).inner(stft(f2, g2, grid=ctx.grid))
        rhs = f1.inner(f2) * g2.inner(g1)
        return abs(lhs - rhs) / (f1.norm() * f2.norm() * g1.norm() * g2.norm())
    return _max_over(ctx, one), 1e-10


def check_plancherel(ctx):
    def one():
        f, g = ctx.signal(), ctx.signal()
        return abs(stft(f, g, grid=ctx.grid).norm() - f.norm() * g.norm()) / (f.norm() * g.norm())
    return _max_over(ctx, one), 1e-10


def check_inversion(ctx):
    def one():
        f, g, gamma = ctx.signal(), ctx.signal(), ctx.signal()
        back = stft_adjoint(stft(f, g, grid=ctx.grid), gamma) * (1 / gamma.inner(g))
        return _rel(back.at(f.box.points), f.values, f.norm(math.inf)) + float(
            np.max(np.abs(back.values[~f.box.contains(back.box.points)]), initial=0.0)
        ) / f.norm(math.inf)
    return _max_over(ctx, one), 1e-10


def check_convolution_form(ctx):
    def one():
        f, g = ctx.signal(), ctx.signal()
        a, b = stft(f, g, grid=ctx.grid), stft_convolution(f, g, grid=ctx.grid)
        return _rel(a.values, b.values, f.norm() * g.norm())
    return _max_over(ctx, one), 1e-10


def check_young(ctx):
    worst = -math.inf
    lhs_w = rhs_w = None
    small = LatticeBox(ctx.n, max(1, ctx.N // 2))
    for _ in range(ctx.instances):
        F = _random_field(ctx.rng, small, ctx.grid)
        G = _random_field(ctx.rng, small, ctx.grid)
        conv = ps_convolve(F, G)
        for p in (1, 2, math.inf):
            lhs = lp_norm_field(conv, p).value
            rhs = lp_norm_field(F, 1).value * lp_norm_field(G, p).value
            if lhs / rhs > worst:
                worst, lhs_w, rhs_w = lhs / rhs, lhs, rhs
    return lhs_w, rhs_w, 1e-10


def check_translation(ctx):
    def one():
        box = LatticeBox(ctx.n, max(1, ctx.N // 2))
        F, G = _random_field(ctx.rng, box, ctx.grid), _random_field(ctx.rng, box, ctx.grid)
        l = ctx.rng.integers(-2, 3, ctx.n)
        x = ctx.rng.integers(0, ctx.grid.Q, ctx.n)
        a = ps_convolve(F.translated(l, x), G)
        b = ps_convolve(F, G).translated(l, x)
        return _rel((a - b).values, 0, max(1.0, b.abs().values.max().real))
    return _max_over(ctx, one), 1e-10


def check_m2(ctx):
    def one():
        f, g = ctx.signal(), ctx.signal()
        val = modulation_norm_lattice(f, g, 2, grid=ctx.grid).value
        return abs(val - f.norm() * g.norm()) / (f.norm() * g.norm())
    return _max_over(ctx, one), 1e-10


def check_paths(ctx):
    def one():
        worst = 0.0
        g1, g2, f, h = (ctx.signal() for _ in range(4))
        for sym in ctx.symbols():
            box = LatticeBox(ctx.n, f.radius + g1.radius + g2.radius)
            applied = loc_apply(sym, g1, g2, f, ctx.grid, box)
            K = loc_kernel(sym, g1, g2, box, f.box)
            weak = loc_bilinear(sym, g1, g2, f, h, ctx.grid)
            scale = f.norm() * h.norm() * g1.norm() * g2.norm() * max(1.0, sym.sup_norm())
            worst = max(worst,
                        _rel(K.apply(f).values, applied.values, scale / h.norm()),
                        abs(applied.inner(h) - weak) / scale,
                        abs(K.form(f, h) - weak) / scale)
        return worst
    return _max_over(ctx, one), 1e-10


def check_adjoint(ctx):
    def one():
        worst = 0.0
        g1, g2 = ctx.signal(), ctx.signal()
        box = LatticeBox(ctx.n, 2 * ctx.N)
        for sym in ctx.symbols():
            a = loc_kernel(sym, g1, g2, box, box).adjoint()
            b = loc_kernel(sym.conj(), g2, g1, box, box)
            worst = max(worst, _rel(a.entries, b.entries))
        return worst
    return _max_over(ctx, one), 1e-12


def check_positivity(ctx):
    def one():
        g = ctx.signal()
        box = LatticeBox(ctx.n, 2 * ctx.N)
        worst = -math.inf
        for sym in ctx.symbols(nonneg=True):
            A = loc_kernel(sym, g, g, box, box).entries
            scale = max(1.0, float(np.linalg.norm(A, 2)))
            herm = _rel(A, A.conj().T, scale)
            worst = max(worst, -float(np.linalg.eigvalsh((A + A.conj().T) / 2).min()) / scale, herm)
        return worst
    return _max_over(ctx, one), 1e-10


def check_schatten(ctx):
    def one():
        shape = tuple(ctx.rng.integers(2, 12, 2))
        A = ctx.rng.standard_normal(shape) + 1j * ctx.rng.standard_normal(shape)
        s = singular_values(A)
        fro = float(np.sqrt(np.sum(np.abs(A) ** 2)))
        norms = [schatten_norm(s, p) for p in (1, 2, 4, math.inf)]
        mono = max(0.0, max(b - a for a, b in zip(norms, norms[1:])))
        return max(abs(norms[1] ** 2 - fro ** 2) / fro ** 2, mono, s.residual / fro)
    return _max_over(ctx, one), 1e-10


def check_bounds(ctx):
    worst = (-math.inf, None, None)
    for _ in range(ctx.instances):
        g = ctx.signal()
        pair = [g, g] if ctx.rng.random() < 0.5 else [g, ctx.signal()]
        for sym in ctx.symbols(nonneg=True):
            if sym.m_radius is None:
                continue
            for c in bounds_report(sym, *pair, monitored=False).checks:
                if c.skipped or c.name == "trace_equals_s1":
                    continue
                ratio = c.lhs / (c.rhs * (1 + c.slack))
                if ratio > worst[0]:
                    worst = (ratio, c.lhs, c.rhs)
    return worst[1], worst[2], 1e-10


def check_trace_s1(ctx):
    def one():
        g = ctx.signal()
        worst = 0.0
        for sym in ctx.symbols(nonneg=True):
            if sym.m_radius is None:
                continue
            c = bounds_report(sym, g, g, monitored=False)["trace_equals_s1"]
            worst = max(worst, c.lhs / max(1.0, c.rhs / 1e-10))
        return worst
    return _max_over(ctx, one), 1e-10


def check_berezin_real(ctx):
    def one():
        g = ctx.signal()
        sym = ctx.symbols(nonneg=True)[0]
        tilde = berezin_symbol(sym, g)
        return float(np.max(np.abs(tilde.values.imag))) / max(1.0, float(np.max(np.abs(tilde.values))))
    return _max_over(ctx, one), 1e-12


def check_time_truncate(ctx):
    def one():
        f, h = ctx.signal(), ctx.signal()
        T = int(ctx.rng.integers(0, ctx.N + 1))
        q = time_truncate(f, T)
        return max(_rel(time_truncate(q, T).values, q.values),
                   abs(q.inner(h) - f.inner(time_truncate(h, T))) / (f.norm() * h.norm()))
    return _max_over(ctx, one), 1e-12


def check_band_self_adjoint(ctx):
    def one():
        f, h = ctx.signal(), ctx.signal()
        om = ctx.omega()
        lhs = band_project(f, om, h.box).inner(h)
        rhs = f.inner(band_project(h, om, f.box))
        return abs(lhs - rhs) / (f.norm() * h.norm())
    if ctx.n != 1:
        return {"skip": "exact moments are one-dimensional"}
    return _max_over(ctx, one), 1e-10


def check_band_idempotent(ctx):
    if ctx.n != 1:
        return {"skip": "exact moments are one-dimensional"}
    return max(band_composition_residual(om, ctx.N) for om in (0.125, 0.25, ctx.omega())), 1e-8


def check_lps(ctx):
    if ctx.n != 1:
        return {"skip": "exact moments are one-dimensional"}
    worst = 0.0
    for T in range(0, min(ctx.N, 2) + 1):
        for om in (0.125, 0.25, 0.5, ctx.omega()):
            cmp = lps_compare(T, om)
            d = cmp.to_dict()
            worst = max(worst, cmp.closed_form_residual, cmp.synthesis_residual,
                        d["loc"]["hermitian_residual"] * 100, d["lps"]["hermitian_residual"] * 100,
                        -d["loc"]["min_eigenvalue"], -d["lps"]["min_eigenvalue"])
    return worst, 1e-10


def check_paracommutator(ctx):
    def one():
        g1, g2, f, h, alpha = (ctx.signal() for _ in range(5))
        b = ctx.signal(1)
        vals = []
        for grid in (ctx.grid, ctx.grid.refined()):
            beta = dft_lattice_to_torus(b, grid)
            A = paracommutator_kernel(beta, g1, g2, grid)
            form = paracommutator_form(A, alpha, f, h)
            weak = loc_bilinear(SeparableSymbol(alpha, beta), g1, g2, f, h, grid)
            vals.append((form, weak))
        scale = abs(vals[0][1]) or 1.0
        return max(abs(vals[0][0] - vals[0][1]), abs(vals[1][0] - vals[1][1]),
                   abs(vals[0][0] - vals[1][0])) / scale
    return _max_over(ctx, one), 1e-8


def check_paraproduct(ctx):
    def one():
        g1, g2, f, h, alpha = (ctx.signal() for _ in range(5))
        p = paraproduct(g1, g2, f, h, ctx.grid)
        lhs = complex(np.sum(alpha.at(p.box.points) * p.values))
        rhs = loc_bilinear(TimeOnlySymbol(alpha), g1, g2, f, h, ctx.grid)
        bound = g1.norm() * g2.norm() * f.norm() * h.norm()
        excess = max(0.0, p.norm(1) - bound * (1 + 1e-10)) / bound
        return max(abs(lhs - rhs) / (bound * alpha.norm(math.inf)), excess)
    return _max_over(ctx, one), 1e-10


def check_multiplier(ctx):
    wr = ctx.N // 2

    def one():
        g1, g2, f = ctx.signal(wr), ctx.signal(wr), ctx.signal()
        beta = GridSamples(ctx.grid, ctx.rng.standard_normal(ctx.grid.size))
        worst = 0.0
        for b in (beta, BandIndicator(ctx.omega(), ctx.n)):
            mu = multiplier_symbol(b, g1, g2, ctx.grid)
            direct = loc_apply(FreqOnlySymbol(b), g1, g2, f, ctx.grid)
            via = apply_multiplier(mu, f, direct.box)
            worst = max(worst, _rel(via.values, direct.values, f.norm() * g1.norm() * g2.norm()))
        return worst
    return _max_over(ctx, one), 1e-10


def check_identity(ctx):
    def one():
        g = ctx.signal()
        g = g * (1 / g.norm())
        lag = LatticeBox(ctx.n, 2 * ctx.N)
        one_sym = GridSymbol(PhaseSpaceField.constant(1.0, lag, ctx.grid))
        box = LatticeBox(ctx.n, ctx.N)
        K = loc_kernel(one_sym, g, g, box, box)
        f = ctx.signal()
        applied = loc_apply(one_sym, g, g, f, ctx.grid, box)
        mu = multiplier_symbol(GridSamples.constant(1.0, ctx.grid), g, g, ctx.grid)
        return max(_rel(K.entries, np.eye(box.size)), _rel(applied.values, f.values, f.norm(math.inf)),
                   _rel(mu.values, np.ones(ctx.grid.size)))
    return _max_over(ctx, one), 1e-10


CHECKS = [
    ("lattice.band_moment_quadrature", check_band_moment),
    ("stft.orthogonality", check_orthogonality),
    ("stft.plancherel", check_plancherel),
    ("stft.inversion", check_inversion),
    ("stft.convolution_form", check_convolution_form),
    ("phase_space.young", check_young),
    ("phase_space.translation_covariance", check_translation),
    ("phase_space.m2_equals_l2", check_m2),
    ("localization.three_paths", check_paths),
    ("localization.adjoint", check_adjoint),
    ("localization.positivity", check_positivity),
    ("spectral.schatten", check_schatten),
    ("spectral.bounds", check_bounds),
    ("spectral.trace_equals_s1", check_trace_s1),
    ("spectral.berezin_real", check_berezin_real),
    ("structured.time_truncate", check_time_truncate),
    ("structured.band_self_adjoint", check_band_self_adjoint),
    ("structured.band_idempotent", check_band_idempotent),
    ("structured.lps_closed_form", check_lps),
    ("structured.paracommutator", check_paracommutator),
    ("structured.paraproduct", check_paraproduct),
    ("structured.multiplier", check_multiplier),
    ("structured.identity_paths", check_identity),
]


def validate_size(n: int, N: int, Q: int) -> None:
    if n < 1 or N < 1:
        raise ConfigError(f"need n >= 1 and N >= 1, got n={n}, N={N}")
    if Q < 2 * (2 * N + 1):
        raise ConfigError(
            f"Q={Q} violates the quadrature exactness rule Q >= 2(2N + 1) = {2 * (2 * N + 1)}"
        )


def run_verify_suite(seed: int, n: int = 1, N: int = 2, Q: int | None = None,
                     instances: int = 3) -> VerifyReport:
    """Run every registered check on seeded random inputs of the given size."""
    Q = 2 * (2 * N + 1) if Q is None else Q
    validate_size(n, N, Q)
    grid = TorusGrid(n, Q)
    streams = np.random.SeedSequence(seed).spawn(len(CHECKS))
    report = VerifyReport(seed, {"n": n, "N": N, "Q": Q, "instances": instances})
    for (name, fn), ss in zip(CHECKS, streams):
        ctx = _Ctx(np.random.Generator(np.random.Philox(ss)), n, N, grid, instances)
        start = time.perf_counter()
        out = fn(ctx)
        elapsed = time.perf_counter() - start
        if isinstance(out, dict):
            result = CheckResult(name, "skip", math.nan, note=out["skip"])
        elif len(out) == 2:
            residual, tol = out
            result = CheckResult(name, "pass" if residual <= tol else "fail", tol, residual=residual,
                                 instances=instances)
        else:
            lhs, rhs, slack = out
            result = CheckResult(name, "pass" if lhs <= rhs * (1 + slack) else "fail", slack,
                                 lhs=lhs, rhs=rhs, instances=instances)
        result.seconds = elapsed
        report.checks.append(result)
    return report
