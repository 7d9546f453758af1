"""Bound families on block matrices, exact special values, and alpha sweeps.

Each bound family condenses a block matrix T into small real matrices
(R, S, T~ from the blocks module) and caps an exactly computed quantity:

    est6 / est7 / est9:  ||T||_alpha <= sqrt(||alpha |R|^2 + (1-alpha) |S|^2||)
    est8:                ||T||_alpha^p <= sqrt(||alpha |R|^(2p) + (1-alpha) |S|^(2p)||)
    cor_w:               w(T)  <= min over alpha of the est-family value <= w(T~)
    cor_opnorm:          ||T|| <= min over alpha of value / max(1/2, sqrt(1-alpha)) <= ||S||

BoundReports carry the bound value, the exactly computed reference, and
their ratio (tightness).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import (
    BlockMatrix,
    SymbolFunctionPair,
    assemble,
    build_R_diag,
    build_R_est6,
    build_R_est7,
    build_S,
    build_Ttilde_diag,
    build_Ttilde_est6,
    build_Ttilde_est7,
)
from .errors import AlphaNormError, ParameterError, ShapeError
from .linalg import as_matrix, lambda_max, matrix_abs, require_square, spectral_apply
from .norms import (
    DEFAULT_NUMRAD_TOL,
    alpha_norm,
    check_alpha,
    numerical_radius,
    operator_norm,
)

# Inequality verdicts use rhs - lhs >= -VERDICT_TOL * max(1, rhs); the scale
# guard avoids relative blowup near zero.
VERDICT_TOL = 1e-8
MINIMIZE_RESOLUTION = 1e-6


def inequality_holds(lhs: float, rhs: float, tol: float = VERDICT_TOL) -> bool:
    """lhs <= rhs up to the scale-guarded tolerance."""
    return rhs - lhs >= -tol * max(1.0, abs(rhs))


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: value >= reference whenever the family applies."""

    theorem: str
    value: float
    alpha: float
    reference: float
    tightness: float | None
    p: float | None = None
    s: float | None = None
    cap: float | None = None

    def to_json(self) -> dict:
        payload = {
            "theorem": self.theorem,
            "alpha": self.alpha,
            "value": self.value,
            "reference": self.reference,
            "tightness": self.tightness,
        }
        if self.p is not None:
            payload["p"] = self.p
        if self.s is not None:
            payload["s"] = self.s
        if self.cap is not None:
            payload["cap"] = self.cap
        return payload


def _tightness(value: float, reference: float) -> float | None:
    if reference == 0.0:
        return 1.0 if value == 0.0 else None
    return value / reference


def combined_norm(r, s, alpha: float, p: float = 1.0) -> float:
    """||alpha |R|^(2p) + (1-alpha) |S|^(2p)|| for real auxiliary matrices.

    |R| and |S| are matrix absolute values; the powered combination is
    Hermitian PSD, so the norm is its largest eigenvalue.
    """
    a = check_alpha(alpha)
    if p < 1.0 or not np.isfinite(p):
        raise ParameterError(f"p must be >= 1, got {p!r}")
    rm = as_matrix(r)
    sm = as_matrix(s)
    if rm.shape != sm.shape or rm.shape[0] != rm.shape[1]:
        raise ShapeError(f"R and S must be square of equal size, got {rm.shape} and {sm.shape}")
    power = lambda t: t ** (2.0 * p)
    r_pow = spectral_apply(power, matrix_abs(rm))
    s_pow = spectral_apply(power, matrix_abs(sm))
    return lambda_max(a * r_pow + (1.0 - a) * s_pow)


def bound_est6(t: BlockMatrix, alpha: float) -> BoundReport:
    """sqrt(||alpha |R|^2 + (1-alpha) |S|^2||) with the est6 R against ||T||_alpha."""
    a = check_alpha(alpha)
    value = float(np.sqrt(combined_norm(build_R_est6(t), build_S(t), a, 1.0)))
    reference = alpha_norm(assemble(t), a).value
    return BoundReport("est6", value, a, reference, _tightness(value, reference))


def bound_est7(
    t: BlockMatrix, alpha: float, fg: SymbolFunctionPair, strict: bool = False
) -> BoundReport:
    """est6-shaped bound with the function-pair R."""
    a = check_alpha(alpha)
    r = build_R_est7(t, fg, strict=strict)
    value = float(np.sqrt(combined_norm(r, build_S(t), a, 1.0)))
    reference = alpha_norm(assemble(t), a).value
    return BoundReport("est7", value, a, reference, _tightness(value, reference), s=fg.s)


def bound_est8(
    t: BlockMatrix,
    alpha: float,
    fg: SymbolFunctionPair,
    p: float,
    strict: bool = False,
    theorem: str = "est8",
) -> BoundReport:
    """p-th-root bound: combined_norm(...)^(1/(2p)) caps ||T||_alpha."""
    a = check_alpha(alpha)
    if p < 1.0 or not np.isfinite(p):
        raise ParameterError(f"p must be >= 1, got {p!r}")
    r = build_R_diag(t, fg, strict=strict)
    value = float(combined_norm(r, build_S(t), a, p) ** (1.0 / (2.0 * p)))
    reference = alpha_norm(assemble(t), a).value
    return BoundReport(
        theorem, value, a, reference, _tightness(value, reference),
        p=p if theorem == "est8" else None, s=fg.s,
    )


def bound_est9(
    t: BlockMatrix, alpha: float, fg: SymbolFunctionPair, strict: bool = False
) -> BoundReport:
    """est8 at p = 1; shares the code path so the values agree bit for bit."""
    return bound_est8(t, alpha, fg, 1.0, strict=strict, theorem="est9")


def exact_nilpotent_alpha_norm(x, alpha: float) -> float:
    """Exact alpha-norm of [[0, X], [0, 0]].

    Equals ||X|| / (2 sqrt(alpha)) when alpha > 1/2 and
    sqrt(1 - alpha) ||X|| otherwise; the two branches agree at alpha = 1/2,
    and alpha = 0 recovers the operator norm.
    """
    a = check_alpha(alpha)
    nrm = operator_norm(x)
    if a > 0.5:
        return nrm / (2.0 * np.sqrt(a))
    return float(np.sqrt(1.0 - a) * nrm)


def diag_block_bounds(x, y, alpha: float) -> tuple[float, float, float, float]:
    """Two-sided bounds for the alpha-norm of diag(X, Y).

    Returns (lower, upper_i, upper_ii, upper_iii):
      lower     = max(||X||_a, ||Y||_a)
      upper_i   = max over the pair of sqrt(||.||_a^2 + alpha w(.)^2)
      upper_ii  = sqrt(max(||X||_a^2, ||Y||_a^2) + alpha w(X) w(Y))
      upper_iii = ||X||_a + ||Y||_a
    """
    a = check_alpha(alpha)
    xm = require_square(as_matrix(x), "X")
    ym = require_square(as_matrix(y), "Y")
    nx = alpha_norm(xm, a).value
    ny = alpha_norm(ym, a).value
    wx = numerical_radius(xm, DEFAULT_NUMRAD_TOL)
    wy = numerical_radius(ym, DEFAULT_NUMRAD_TOL)
    lower = max(nx, ny)
    upper_i = max(np.sqrt(nx * nx + a * wx * wx), np.sqrt(ny * ny + a * wy * wy))
    upper_ii = np.sqrt(max(nx * nx, ny * ny) + a * wx * wy)
    upper_iii = nx + ny
    return lower, float(upper_i), float(upper_ii), float(upper_iii)


def minimize_over_alpha(phi, mode: str = "convex_ternary") -> tuple[float, float]:
    """Minimize phi over [0, 1] to resolution 1e-6.

    ``convex_ternary`` is valid when phi is convex (the combined-norm family
    is a max of affine functions of alpha); ``grid_refine`` runs a 101-point
    grid plus local refinement of the best three cells.  Both endpoints are
    always evaluated, so chain inequalities anchored at alpha = 0 or 1 hold
    to evaluation accuracy; a constant phi reports alpha = 0.
    """
    if mode not in ("convex_ternary", "grid_refine"):
        raise ParameterError(f"unknown minimize mode {mode!r}")

    def fin(v: float) -> float:
        v = float(v)
        if not np.isfinite(v):
            raise ParameterError(f"objective returned non-finite value {v!r}")
        return v

    candidates: list[tuple[float, float]] = [(0.0, fin(phi(0.0))), (1.0, fin(phi(1.0)))]

    if mode == "convex_ternary":
        lo, hi = 0.0, 1.0
        while hi - lo > MINIMIZE_RESOLUTION:
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if fin(phi(m1)) <= fin(phi(m2)):
                hi = m2
            else:
                lo = m1
        mid = (lo + hi) / 2.0
        candidates.append((mid, fin(phi(mid))))
    else:
        grid = np.linspace(0.0, 1.0, 101)
        vals = [fin(phi(a)) for a in grid]
        best = np.argsort(vals, kind="stable")[:3]
        for idx in best:
            lo = max(0.0, float(grid[idx]) - 0.01)
            hi = min(1.0, float(grid[idx]) + 0.01)
            while (hi - lo) / 20.0 > MINIMIZE_RESOLUTION / 2.0:
                sub = np.linspace(lo, hi, 21)
                sub_vals = [fin(phi(a)) for a in sub]
                j = int(np.argmin(sub_vals))
                h = (hi - lo) / 20.0
                lo = max(0.0, float(sub[j]) - h)
                hi = min(1.0, float(sub[j]) + h)
            mid = (lo + hi) / 2.0
            candidates.append((mid, fin(phi(mid))))

    alpha_star, value = candidates[0]
    for a, v in candidates[1:]:
        if v < value:
            alpha_star, value = a, v
    return alpha_star, value


_COROLLARY_BUILDERS = ("est6", "est7", "est9")


def corollary_w_bound(
    t: BlockMatrix,
    builder: str = "est6",
    fg: SymbolFunctionPair | None = None,
    strict: bool = False,
) -> BoundReport:
    """min over alpha of the chosen family's value, against w(T).

    Also computes the dominance cap w(T~) for the family's auxiliary matrix
    (cross-checked against ||Re(T~)||, the two agree for entrywise
    nonnegative matrices) and verifies value <= cap within tolerance.
    """
    if builder not in _COROLLARY_BUILDERS:
        raise ParameterError(f"builder must be one of {_COROLLARY_BUILDERS}, got {builder!r}")
    if builder == "est6":
        r = build_R_est6(t)
        ttilde = build_Ttilde_est6(t)
    else:
        if fg is None:
            raise ParameterError(f"builder {builder!r} requires a symbol function pair")
        if builder == "est7":
            r = build_R_est7(t, fg, strict=strict)
            ttilde = build_Ttilde_est7(t, fg)
        else:
            r = build_R_diag(t, fg, strict=strict)
            ttilde = build_Ttilde_diag(t, fg)
    s = build_S(t)

    alpha_star, sq = minimize_over_alpha(lambda a: combined_norm(r, s, a, 1.0))
    value = float(np.sqrt(sq))
    reference = numerical_radius(assemble(t), DEFAULT_NUMRAD_TOL)

    cap = numerical_radius(ttilde, DEFAULT_NUMRAD_TOL)
    re_norm = float(np.max(np.abs(np.linalg.eigvalsh((ttilde + ttilde.T) / 2.0))))
    if abs(cap - re_norm) > 1e-8 * max(1.0, cap):
        raise AlphaNormError(
            f"nonnegative-matrix radius cross-check failed: w={cap!r} vs ||Re||={re_norm!r}"
        )
    if not inequality_holds(value, cap):
        raise AlphaNormError(f"dominance cap violated: value={value!r} exceeds w(T~)={cap!r}")
    return BoundReport(
        "cor_w", value, alpha_star, reference, _tightness(value, reference),
        s=fg.s if fg is not None else None, cap=cap,
    )


def corollary_opnorm_bound(t: BlockMatrix) -> BoundReport:
    """min over alpha of value / max(1/2, sqrt(1-alpha)), against ||T||.

    The quotient is not known to be convex, so the minimum is located by
    grid refinement; ||S|| caps the result (the quotient at alpha = 0).
    """
    r = build_R_est6(t)
    s = build_S(t)

    def quotient(a: float) -> float:
        divisor = max(0.5, np.sqrt(1.0 - a))
        return float(np.sqrt(combined_norm(r, s, a, 1.0)) / divisor)

    alpha_star, value = minimize_over_alpha(quotient, mode="grid_refine")
    reference = operator_norm(assemble(t))
    cap = operator_norm(s)
    if not inequality_holds(value, cap):
        raise AlphaNormError(f"dominance cap violated: value={value!r} exceeds ||S||={cap!r}")
    return BoundReport(
        "cor_opnorm", value, alpha_star, reference, _tightness(value, reference), cap=cap
    )
