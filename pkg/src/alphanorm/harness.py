"""Seeded random ensembles and the inequality/identity verification suite.

Every trial is reproducible: trial i of a spec uses the 64-bit derived seed
splitmix64(master + (i+1) * GOLDEN), so identical specs generate bit-identical
matrices on any platform.  Checks are registered in CHECKS; each check draws
its parameters from its own substream, so adding or removing checks from a
run never changes another check's data.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bounds as bnd
from .blocks import BlockMatrix, SymbolFunctionPair, assemble, block_matrix, block_to_json
from .errors import ParameterError
from .linalg import matrix_to_json
from .norms import alpha_norm, numerical_radius, operator_norm

ENSEMBLE_KINDS = (
    "ginibre",
    "hermitian",
    "unitary",
    "nilpotent_upper",
    "entrywise_nonneg",
    "diag_blocks",
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def derive_seed(master: int, trial: int) -> int:
    """splitmix64 mix of (master, trial); stable across platforms."""
    x = (int(master) + (int(trial) + 1) * _GOLDEN) & _MASK64
    x ^= x >> 30
    x = (x * _MIX1) & _MASK64
    x ^= x >> 27
    x = (x * _MIX2) & _MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class EnsembleSpec:
    """One random-matrix ensemble: kind, block structure, trial count, seed."""

    kind: str
    n_blocks: int
    dim_range: tuple[int, int]
    trials: int
    seed: int

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ParameterError(f"unknown ensemble kind {self.kind!r}")
        if not 1 <= self.n_blocks <= 4:
            raise ParameterError(f"n_blocks must be in 1..4, got {self.n_blocks}")
        lo, hi = self.dim_range
        if not 1 <= lo <= hi <= 6:
            raise ParameterError(f"dim_range must satisfy 1 <= lo <= hi <= 6, got {self.dim_range}")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")


def _ginibre(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def generate(spec: EnsembleSpec, trial: int) -> BlockMatrix:
    """Deterministic BlockMatrix for (spec, trial); row and column partitions agree."""
    rng = np.random.default_rng(derive_seed(spec.seed, trial))
    n = spec.n_blocks
    lo, hi = spec.dim_range
    dims = [int(d) for d in rng.integers(lo, hi + 1, size=n)]

    def zero(i, j):
        return np.zeros((dims[i], dims[j]), dtype=np.complex128)

    grid = [[zero(i, j) for j in range(n)] for i in range(n)]
    if spec.kind == "ginibre":
        grid = [[_ginibre(rng, dims[i], dims[j]) for j in range(n)] for i in range(n)]
    elif spec.kind == "hermitian":
        for i in range(n):
            for j in range(i, n):
                g = _ginibre(rng, dims[i], dims[j])
                if i == j:
                    grid[i][i] = (g + g.conj().T) / 2.0
                else:
                    grid[i][j] = g
                    grid[j][i] = g.conj().T
    elif spec.kind == "unitary":
        u = _haar_unitary(rng, sum(dims))
        offs = np.concatenate([[0], np.cumsum(dims)])
        grid = [
            [u[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] for j in range(n)]
            for i in range(n)
        ]
    elif spec.kind == "nilpotent_upper":
        for i in range(n):
            for j in range(i + 1, n):
                grid[i][j] = _ginibre(rng, dims[i], dims[j])
    elif spec.kind == "entrywise_nonneg":
        for i in range(n):
            for j in range(n):
                grid[i][j] = np.abs(rng.standard_normal((dims[i], dims[j]))).astype(np.complex128)
    elif spec.kind == "diag_blocks":
        for i in range(n):
            grid[i][i] = _ginibre(rng, dims[i], dims[i])
    return block_matrix(grid, dims, dims)


# ---------------------------------------------------------------------------
# Records and reports
# ---------------------------------------------------------------------------

@dataclass
class CheckRecord:
    """One verified inequality or identity; slack >= 0 means pass."""

    check_id: str
    seed: int
    theorem: str
    alpha: float | None
    p: float | None
    s: float | None
    lhs: float
    rhs: float
    slack: float
    verdict: bool
    tightness: float | None = None
    input_echo: dict | None = None

    def to_json(self) -> dict:
        payload = {
            "check_id": self.check_id,
            "seed": int(self.seed),
            "theorem": self.theorem,
            "alpha": self.alpha,
            "p": self.p,
            "s": self.s,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "slack": float(self.slack),
            "verdict": "pass" if self.verdict else "fail",
        }
        if self.input_echo is not None:
            payload["input"] = self.input_echo
        return payload


CSV_HEADER = ("check_id", "seed", "theorem", "alpha", "p", "s", "lhs", "rhs", "slack", "verdict")


@dataclass
class SuiteReport:
    """All check records of a run plus aggregate counts and worst cases."""

    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.records if r.verdict)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.records if not r.verdict)

    def summary(self) -> dict:
        tight: dict[str, list[float]] = {}
        for r in self.records:
            if r.tightness is not None:
                tight.setdefault(r.theorem, []).append(float(r.tightness))
        worst = None
        for r in self.records:
            if worst is None or r.slack < worst.slack:
                worst = r
        return {
            "total": len(self.records),
            "passed": self.passed,
            "failed": self.failed,
            "min_slack": float(worst.slack) if worst is not None else None,
            "mean_tightness": {k: sum(v) / len(v) for k, v in sorted(tight.items())},
            "worst_case": (
                {
                    "check_id": worst.check_id,
                    "seed": int(worst.seed),
                    "slack": float(worst.slack),
                    "input": worst.input_echo,
                }
                if worst is not None
                else None
            ),
        }

    def to_json(self) -> dict:
        return {"records": [r.to_json() for r in self.records], "summary": self.summary()}

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def to_csv_str(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.records:
            writer.writerow([
                r.check_id,
                int(r.seed),
                r.theorem,
                "" if r.alpha is None else repr(float(r.alpha)),
                "" if r.p is None else repr(float(r.p)),
                "" if r.s is None else repr(float(r.s)),
                repr(float(r.lhs)),
                repr(float(r.rhs)),
                repr(float(r.slack)),
                "pass" if r.verdict else "fail",
            ])
        return buf.getvalue()


def _ineq_record(check_id, seed, theorem, lhs, rhs, *, alpha=None, p=None, s=None,
                 tol=bnd.VERDICT_TOL, absolute=False, tightness=None, echo=None) -> CheckRecord:
    """Record for lhs <= rhs; slack is the remaining margin."""
    allowed = tol if absolute else tol * max(1.0, abs(rhs))
    slack = (rhs - lhs) + allowed
    return CheckRecord(check_id, seed, theorem, alpha, p, s, float(lhs), float(rhs),
                       float(slack), slack >= 0.0, tightness, echo)


def _eq_record(check_id, seed, theorem, lhs, rhs, allowed, *, alpha=None, p=None,
               s=None, echo=None) -> CheckRecord:
    """Record for |lhs - rhs| <= allowed."""
    slack = allowed - abs(lhs - rhs)
    return CheckRecord(check_id, seed, theorem, alpha, p, s, float(lhs), float(rhs),
                       float(slack), slack >= 0.0, None, echo)


# ---------------------------------------------------------------------------
# Trial context: caches the expensive per-trial quantities across checks.
# ---------------------------------------------------------------------------

class TrialContext:
    def __init__(self, t: BlockMatrix, seed: int):
        self.t = t
        self.seed = seed
        self.m = assemble(t)
        self.alpha = float(np.random.default_rng([seed, 1]).uniform(0.0, 1.0))
        self._anorm: dict[float, object] = {}
        self._w: float | None = None
        self._opnorm: float | None = None

    def anorm(self, alpha: float):
        if alpha not in self._anorm:
            self._anorm[alpha] = alpha_norm(self.m, alpha)
        return self._anorm[alpha]

    @property
    def w(self) -> float:
        if self._w is None:
            self._w = numerical_radius(self.m)
        return self._w

    @property
    def opnorm(self) -> float:
        if self._opnorm is None:
            self._opnorm = operator_norm(self.m)
        return self._opnorm


@dataclass(frozen=True)
class CheckDef:
    fn: Callable[[TrialContext, np.random.Generator], list[CheckRecord]]
    index: int
    kinds: tuple[str, ...] | None = None  # None means every ensemble kind


_EST7_S = (0.25, 0.5, 0.75)
_EST8_P = (1.0, 1.5, 2.0, 3.0)
_HALF = SymbolFunctionPair.power(0.5)


def _soundness_est6(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    rep = bnd.bound_est6(ctx.t, a)
    ref = ctx.anorm(a).value
    return [_ineq_record("est6_soundness", ctx.seed, "est6", ref, rep.value,
                         alpha=a, tightness=rep.value / ref if ref > 0 else None)]


def _soundness_est7(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    ref = ctx.anorm(a).value
    out = []
    for s in _EST7_S:
        rep = bnd.bound_est7(ctx.t, a, SymbolFunctionPair.power(s))
        out.append(_ineq_record("est7_soundness", ctx.seed, "est7", ref, rep.value,
                                alpha=a, s=s, tightness=rep.value / ref if ref > 0 else None))
    return out


def _soundness_est8(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    ref = ctx.anorm(a).value
    out = []
    for p in _EST8_P:
        rep = bnd.bound_est8(ctx.t, a, _HALF, p)
        out.append(_ineq_record("est8_soundness", ctx.seed, "est8", ref, rep.value,
                                alpha=a, p=p, s=0.5, tightness=rep.value / ref if ref > 0 else None))
    return out


def _soundness_est9(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    ref = ctx.anorm(a).value
    rep = bnd.bound_est9(ctx.t, a, _HALF)
    return [_ineq_record("est9_soundness", ctx.seed, "est9", ref, rep.value,
                         alpha=a, s=0.5, tightness=rep.value / ref if ref > 0 else None)]


def _cor_chain(ctx: TrialContext, rng) -> list[CheckRecord]:
    out = []
    for builder, fg in (("est6", None), ("est7", _HALF), ("est9", _HALF)):
        rep = bnd.corollary_w_bound(ctx.t, builder, fg)
        out.append(_ineq_record(f"cor_w_{builder}_cap", ctx.seed, "cor_w",
                                rep.value, rep.cap, s=rep.s))
        out.append(_ineq_record(f"cor_w_{builder}_ref", ctx.seed, "cor_w",
                                ctx.w, rep.value, alpha=rep.alpha, s=rep.s,
                                tol=1e-5, absolute=True))
    rep = bnd.corollary_opnorm_bound(ctx.t)
    out.append(_ineq_record("cor_opnorm_cap", ctx.seed, "cor_opnorm", rep.value, rep.cap))
    out.append(_ineq_record("cor_opnorm_ref", ctx.seed, "cor_opnorm",
                            ctx.opnorm, rep.value, alpha=rep.alpha))
    return out


def _equal1(ctx: TrialContext, rng) -> list[CheckRecord]:
    if ctx.t.n != 2:
        return []
    x = ctx.t.block(0, 1)
    a = ctx.alpha
    exact = bnd.exact_nilpotent_alpha_norm(x, a)
    computed = ctx.anorm(a).value
    allowed = 1e-4 * max(1.0, operator_norm(x))
    return [_eq_record("equal1_exact", ctx.seed, "equal1", computed, exact, allowed, alpha=a)]


def _est1(ctx: TrialContext, rng) -> list[CheckRecord]:
    if ctx.t.n != 2:
        return []
    a = ctx.alpha
    x, y = ctx.t.block(0, 0), ctx.t.block(1, 1)
    lower, u1, u2, u3 = bnd.diag_block_bounds(x, y, a)
    true = ctx.anorm(a).value
    eps = 1e-5
    return [
        _ineq_record("est1_lower", ctx.seed, "est1", lower, true, alpha=a, tol=eps, absolute=True),
        _ineq_record("est1_upper_i", ctx.seed, "est1", true, u1, alpha=a, tol=eps, absolute=True),
        _ineq_record("est1_upper_ii", ctx.seed, "est1", true, u2, alpha=a, tol=eps, absolute=True),
        _ineq_record("est1_upper_iii", ctx.seed, "est1", true, u3, alpha=a, tol=eps, absolute=True),
        _ineq_record("est1_chain_sqrt2", ctx.seed, "est1", u1, np.sqrt(2.0) * lower,
                     alpha=a, tol=eps, absolute=True),
    ]


def _nonneg_radius(ctx: TrialContext, rng) -> list[CheckRecord]:
    re_part = (ctx.m + ctx.m.conj().T) / 2.0
    re_norm = float(np.max(np.abs(np.linalg.eigvalsh(re_part))))
    return [_eq_record("nonneg_radius_identity", ctx.seed, "lem_nonneg", ctx.w, re_norm, 1e-8)]


def _sandwich(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    val = ctx.anorm(a).value
    eps = 1e-5
    return [
        _ineq_record("sandwich_w_lower", ctx.seed, "sandwich", ctx.w, val,
                     alpha=a, tol=eps, absolute=True),
        _ineq_record("sandwich_w_upper", ctx.seed, "sandwich", val,
                     np.sqrt(4.0 - 3.0 * a) * ctx.w, alpha=a, tol=eps, absolute=True),
        _ineq_record("sandwich_op_lower", ctx.seed, "sandwich",
                     max(0.5, np.sqrt(1.0 - a)) * ctx.opnorm, val,
                     alpha=a, tol=eps, absolute=True),
        _ineq_record("sandwich_op_upper", ctx.seed, "sandwich", val, ctx.opnorm,
                     alpha=a, tol=eps, absolute=True),
    ]


def _monotonicity(ctx: TrialContext, rng) -> list[CheckRecord]:
    grid = np.linspace(0.0, 1.0, 11)
    vals = [ctx.anorm(float(a)).value for a in grid]
    worst = min(vals[i] - vals[i + 1] for i in range(len(vals) - 1))
    eps = 2.0 * 1e-5
    return [CheckRecord("alpha_monotonic", ctx.seed, "alpha_norm", None, None, None,
                        0.0, float(worst), float(worst + eps), worst + eps >= 0.0)]


def _homogeneity(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    c = complex(rng.standard_normal(), rng.standard_normal())
    scaled = alpha_norm(c * ctx.m, a).value
    base = ctx.anorm(a).value
    allowed = 1e-5 * max(1.0, abs(c)) * max(1.0, base)
    return [_eq_record("alpha_homogeneous", ctx.seed, "alpha_norm",
                       scaled, abs(c) * base, allowed, alpha=a)]


def _unitary_invariance(ctx: TrialContext, rng) -> list[CheckRecord]:
    a = ctx.alpha
    u = _haar_unitary(rng, ctx.m.shape[0])
    conj = alpha_norm(u.conj().T @ ctx.m @ u, a).value
    base = ctx.anorm(a).value
    return [_eq_record("alpha_unitary_invariant", ctx.seed, "alpha_norm",
                       conj, base, 1e-5 * max(1.0, base), alpha=a)]


def _prop21(ctx: TrialContext, rng) -> list[CheckRecord]:
    dim = int(rng.integers(1, 4))
    a_blk = _ginibre(rng, dim, dim)
    b_blk = _ginibre(rng, dim, dim)
    alpha = float(rng.uniform(0.0, 1.0))
    report = proposition21_suite(a_blk, b_blk, alpha, seed=ctx.seed)
    return report.records


CHECKS: dict[str, CheckDef] = {
    "est6_soundness": CheckDef(_soundness_est6, 10),
    "est7_soundness": CheckDef(_soundness_est7, 11),
    "est8_soundness": CheckDef(_soundness_est8, 12),
    "est9_soundness": CheckDef(_soundness_est9, 13),
    "cor_chain": CheckDef(_cor_chain, 14),
    "equal1": CheckDef(_equal1, 15, kinds=("nilpotent_upper",)),
    "est1": CheckDef(_est1, 16, kinds=("diag_blocks",)),
    "nonneg_radius": CheckDef(_nonneg_radius, 17, kinds=("entrywise_nonneg",)),
    "sandwich": CheckDef(_sandwich, 18),
    "monotonicity": CheckDef(_monotonicity, 19),
    "homogeneity": CheckDef(_homogeneity, 20),
    "unitary_invariance": CheckDef(_unitary_invariance, 21),
    "prop21": CheckDef(_prop21, 22),
}


def proposition21_suite(a, b, alpha: float, width: float | None = None,
                        seed: int = 0) -> SuiteReport:
    """Verify the four 2x2 block identities for a pair (A, B) at one alpha.

    (a) phase invariance of the antidiagonal corner over three rotation
        angles, (b) corner swap, (c) diagonal swap, (d) the circulant
        [[A,B],[B,A]] against diag(A-B, A+B).  Identity slack is the sum of
        the two solver enclosure gaps plus 1e-8.
    """
    a_blk = np.asarray(a, dtype=np.complex128)
    b_blk = np.asarray(b, dtype=np.complex128)
    if a_blk.shape != b_blk.shape or a_blk.shape[0] != a_blk.shape[1]:
        raise ParameterError("A and B must be square with equal shapes")
    al = float(alpha)
    z = np.zeros_like(a_blk)

    def anorm(mat):
        return alpha_norm(mat, al, width)

    def echo():
        return {"A": matrix_to_json(a_blk), "B": matrix_to_json(b_blk), "alpha": al}

    records = []
    base = anorm(np.block([[z, a_blk], [b_blk, z]]))
    for k, theta in enumerate((np.pi / 7.0, np.pi / 2.0, 1.0)):
        rot = anorm(np.block([[z, a_blk], [np.exp(1j * theta) * b_blk, z]]))
        allowed = (base.upper - base.lower) + (rot.upper - rot.lower) + 1e-8
        records.append(_eq_record(f"prop21_a_{k}", seed, "prop21",
                                  rot.value, base.value, allowed, alpha=al))
    swap = anorm(np.block([[z, b_blk], [a_blk, z]]))
    allowed = (base.upper - base.lower) + (swap.upper - swap.lower) + 1e-8
    records.append(_eq_record("prop21_b", seed, "prop21", swap.value, base.value, allowed, alpha=al))
    d1 = anorm(np.block([[a_blk, z], [z, b_blk]]))
    d2 = anorm(np.block([[b_blk, z], [z, a_blk]]))
    allowed = (d1.upper - d1.lower) + (d2.upper - d2.lower) + 1e-8
    records.append(_eq_record("prop21_c", seed, "prop21", d2.value, d1.value, allowed, alpha=al))
    circ = anorm(np.block([[a_blk, b_blk], [b_blk, a_blk]]))
    diff = anorm(np.block([[a_blk - b_blk, z], [z, a_blk + b_blk]]))
    allowed = (circ.upper - circ.lower) + (diff.upper - diff.lower) + 1e-8
    records.append(_eq_record("prop21_d", seed, "prop21", circ.value, diff.value, allowed, alpha=al))
    for rec in records:
        if not rec.verdict:
            rec.input_echo = echo()
    return SuiteReport(records=records)


def _threads_from_env() -> int:
    raw = os.environ.get("ALPHA_NORM_THREADS", "1")
    try:
        val = int(raw)
    except ValueError as exc:
        raise ParameterError(f"ALPHA_NORM_THREADS must be an integer, got {raw!r}") from exc
    return max(1, val)


def _run_trial(spec: EnsembleSpec, trial: int, selected: Sequence[str]) -> list[CheckRecord]:
    seed = derive_seed(spec.seed, trial)
    t = generate(spec, trial)
    ctx = TrialContext(t, seed)
    records: list[CheckRecord] = []
    for name in selected:
        cd = CHECKS[name]
        if cd.kinds is not None and spec.kind not in cd.kinds:
            continue
        rng = np.random.default_rng([seed, cd.index])
        records.extend(cd.fn(ctx, rng))
    for rec in records:
        if not rec.verdict and rec.input_echo is None:
            rec.input_echo = block_to_json(t)
    return records


def run_suite(
    specs: Sequence[EnsembleSpec],
    checks: Sequence[str] | None = None,
    threads: int | None = None,
) -> SuiteReport:
    """Run the selected checks over every trial of every spec.

    Trials may execute in parallel (ALPHA_NORM_THREADS or ``threads``), but
    records are always aggregated in (spec, trial, check) order, so reports
    are identical regardless of the execution schedule.
    """
    if checks is None:
        checks = list(CHECKS)
    for name in checks:
        if name not in CHECKS:
            raise ParameterError(f"unknown check {name!r}")
    if threads is None:
        threads = _threads_from_env()

    tasks = [(spec, trial) for spec in specs for trial in range(spec.trials)]
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda st: _run_trial(st[0], st[1], checks), tasks))
    else:
        chunks = [_run_trial(spec, trial, checks) for spec, trial in tasks]
    report = SuiteReport()
    for chunk in chunks:
        report.records.extend(chunk)
    return report


def default_specs(seed: int, trials: int) -> list[EnsembleSpec]:
    """One spec per ensemble kind at desk scale, seeded from a master seed."""
    shapes = {
        "ginibre": 2,
        "hermitian": 3,
        "unitary": 2,
        "nilpotent_upper": 2,
        "entrywise_nonneg": 3,
        "diag_blocks": 2,
    }
    return [
        EnsembleSpec(kind, shapes[kind], (1, 4), trials, derive_seed(seed, i))
        for i, kind in enumerate(ENSEMBLE_KINDS)
    ]


SUITES: dict[str, list[str]] = {
    "all": list(CHECKS),
    "est6": ["est6_soundness"],
    "est7": ["est7_soundness"],
    "est8": ["est8_soundness"],
    "est9": ["est9_soundness"],
    "prop21": ["prop21"],
    "equal1": ["equal1"],
    "est1": ["est1"],
    "lemmas": ["nonneg_radius", "sandwich", "monotonicity", "homogeneity", "unitary_invariance"],
}
