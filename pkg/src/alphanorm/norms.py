"""Operator norm, spectral radius, numerical radius, and the alpha-norm.

The alpha-norm of a square complex matrix M is

    ||M||_a = sup { sqrt(a*|<Mx,x>|^2 + (1-a)*||Mx||^2) : ||x|| = 1 },

with a in [0, 1].  It equals the numerical radius at a = 1 and the operator
norm at a = 0.

Computation strategy for the supremum F* of
F(x) = a|<Mx,x>|^2 + (1-a)||Mx||^2:

For any complex tangent parameter zeta, (|z - zeta|^2 >= 0 with z = <Mx,x>)

    F(x) >= <H(zeta) x, x> - a|zeta|^2,
    H(zeta) = (1-a) M*M + a (zeta M + conj(zeta) M*),

with equality at zeta = <Mx,x>.  Hence

    F* = max over zeta of  g(zeta) = lambda_max(H(zeta)) - a|zeta|^2,

and the maximizing zeta lies in the disk |zeta| <= w(M).  Every evaluation
of g is a certified lower bound on F*; lambda_max(H(zeta)) is a convex
function of (Re zeta, Im zeta), so on any rectangle it is dominated by the
bilinear interpolant of its corner values (Jensen).  Subtracting the
explicitly-known quadratic a|zeta|^2 leaves a quadratic whose maximum over
the rectangle is computed in closed form, giving a certified upper bound
per cell with second-order slack.  Branch-and-bound over rectangles then
encloses F* to the requested width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError, ShapeError
from .linalg import as_matrix, require_square

DEFAULT_NUMRAD_TOL = 1e-8
# Default enclosure width on the squared objective, scaled by max(1, ||M||^2).
DEFAULT_WIDTH_REL = 1e-6
_INIT_GRID = 32          # initial cells per side of the tangent-parameter square
_MAX_SPLITS_PER_ROUND = 2048
_MAX_EVALS = 2_000_000


def check_alpha(alpha: float) -> float:
    a = float(alpha)
    if not np.isfinite(a) or a < 0.0 or a > 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha!r}")
    return a


def operator_norm(m) -> float:
    """Largest singular value of M."""
    a = as_matrix(m)
    return float(np.linalg.svd(a, compute_uv=False)[0])


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a square M."""
    a = require_square(as_matrix(m))
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def _rotated_tops(m: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """lambda_max of the Hermitian part of e^{i theta} M, batched over theta."""
    rotated = np.exp(1j * thetas)[:, None, None] * m[None, :, :]
    herm = (rotated + rotated.conj().transpose(0, 2, 1)) / 2.0
    return np.linalg.eigvalsh(herm)[:, -1]


def _wedge_uppers(val_l: np.ndarray, val_r: np.ndarray, widths: np.ndarray) -> np.ndarray:
    """Upper bound for the rotation objective on each segment.

    h(theta) = lambda_max(Re(e^{i theta} M)) is the support function of the
    numerical range, so the range lies inside the wedge cut out by the two
    supporting half-planes at the segment endpoints.  For directions inside
    the segment the support of that wedge is attained at its vertex z*, and

        |z*|^2 = ((h1 - h2)^2 + 4 h1 h2 sin^2(d/2)) / sin^2(d),

    for a segment of width d < pi.  The formula is written to avoid the
    cancellation in 1 - cos(d) for small d.
    """
    s = np.sin(widths)
    shalf = np.sin(widths / 2.0)
    num = (val_l - val_r) ** 2 + 4.0 * val_l * val_r * shalf * shalf
    with np.errstate(divide="ignore", invalid="ignore"):
        vertex = np.sqrt(np.maximum(num, 0.0)) / s
    endpoint = np.maximum(val_l, val_r)
    return np.where(np.isfinite(vertex), np.maximum(vertex, endpoint), np.inf)


def _numerical_radius_enclosure(m: np.ndarray, tol: float) -> tuple[float, float, float]:
    """Certified enclosure (lo, hi) of w(M) plus the best rotation angle.

    w(M) = max over theta of lambda_max(Re(e^{i theta} M)).  A 360-point
    rotation grid provides the lower bound; segments are capped by the
    supporting-wedge bound and refined at midpoints until no segment can
    exceed the running maximum by more than tol.
    """
    nrm = operator_norm(m)
    if nrm == 0.0:
        return 0.0, 0.0, 0.0
    k = 360
    thetas = np.linspace(0.0, 2.0 * np.pi, k, endpoint=False)
    vals = _rotated_tops(m, thetas)
    best_idx = int(np.argmax(vals))
    lo = float(vals[best_idx])
    theta_star = float(thetas[best_idx])

    seg_l = thetas
    seg_r = np.roll(thetas, -1)
    seg_r[-1] = 2.0 * np.pi
    val_l = vals
    val_r = np.roll(vals, -1)

    # cap over segments already ruled out (their upper bound when dropped)
    dropped_cap = -np.inf
    hi = lo
    for _ in range(80):
        uppers = np.minimum(_wedge_uppers(val_l, val_r, seg_r - seg_l), nrm)
        hi = max(lo, dropped_cap, float(np.max(uppers)))
        active = uppers > lo + tol
        if not np.any(active):
            break
        if np.any(~active):
            dropped_cap = max(dropped_cap, float(np.max(uppers[~active])))
        seg_l, seg_r = seg_l[active], seg_r[active]
        val_l, val_r = val_l[active], val_r[active]
        mid = (seg_l + seg_r) / 2.0
        val_m = _rotated_tops(m, mid)
        i = int(np.argmax(val_m))
        if val_m[i] > lo:
            lo = float(val_m[i])
            theta_star = float(mid[i])
        seg_l = np.concatenate([seg_l, mid])
        seg_r = np.concatenate([mid, seg_r])
        val_l = np.concatenate([val_l, val_m])
        val_r = np.concatenate([val_m, val_r])
    else:
        raise ConvergenceError("numerical radius refinement did not reach tolerance")
    return lo, hi, theta_star


def _numerical_radius_coarse_upper(m: np.ndarray, nrm: float) -> float:
    """Cheap certified upper bound on w(M) from one 360-point rotation grid."""
    thetas = np.linspace(0.0, 2.0 * np.pi, 360, endpoint=False)
    vals = _rotated_tops(m, thetas)
    val_r = np.roll(vals, -1)
    widths = np.full(360, 2.0 * np.pi / 360.0)
    return float(min(np.max(_wedge_uppers(vals, val_r, widths)), nrm))


def numerical_radius(m, tol: float = DEFAULT_NUMRAD_TOL) -> float:
    """Numerical radius w(M) within tol.

    Runs a 360-point rotation grid followed by local refinement of every
    segment that could still contain the maximum, until the certified
    enclosure is narrower than tol; returns the enclosure midpoint.
    """
    a = require_square(as_matrix(m))
    if tol <= 0.0 or not np.isfinite(tol):
        raise ParameterError(f"tol must be positive, got {tol!r}")
    if a.shape[0] == 1:
        return float(abs(a[0, 0]))
    lo, hi, _ = _numerical_radius_enclosure(a, tol)
    return (lo + hi) / 2.0


@dataclass(frozen=True)
class AlphaNormResult:
    """Certified alpha-norm enclosure.

    ``value`` equals ``lower`` and is the objective attained by ``witness``;
    ``upper`` is a certified upper bound for the true norm.  ``iterations``
    counts branch-and-bound refinement rounds.
    """

    value: float
    lower: float
    upper: float
    witness: np.ndarray
    iterations: int


def _objective_batch(m: np.ndarray, alpha: float, vecs: np.ndarray) -> np.ndarray:
    """F(x) = alpha |<Mx,x>|^2 + (1-alpha) ||Mx||^2 for unit rows of vecs."""
    mv = vecs @ m.T
    z = np.sum(vecs.conj() * mv, axis=1)
    nsq = np.sum(np.abs(mv) ** 2, axis=1).real
    return alpha * np.abs(z) ** 2 + (1.0 - alpha) * nsq


def _objective(m: np.ndarray, alpha: float, x: np.ndarray) -> float:
    return float(_objective_batch(m, alpha, x[None, :])[0])


class _TangentEvaluator:
    """Batched evaluation of lambda_max(H(zeta)) with top eigenvectors."""

    def __init__(self, m: np.ndarray, alpha: float):
        self.m = m
        self.mh = m.conj().T
        q = (1.0 - alpha) * (self.mh @ m)
        self.q = (q + q.conj().T) / 2.0
        self.alpha = alpha
        self.evals = 0

    def top(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """pts: (K, 2) -> (lambda_max values, top eigenvectors (K, n))."""
        zeta = pts[:, 0] + 1j * pts[:, 1]
        h = self.q[None, :, :] + self.alpha * (
            zeta[:, None, None] * self.m[None, :, :]
            + zeta.conj()[:, None, None] * self.mh[None, :, :]
        )
        vals, vecs = np.linalg.eigh(h)
        self.evals += pts.shape[0]
        return vals[:, -1], vecs[:, :, -1]


def _cell_upper_bounds(a1, a2, b1, b2, f00, f10, f01, f11, alpha):
    """Exact max over each cell of (bilinear interpolant of corners) - alpha r^2.

    The bilinear surface dominates the convex lambda_max part (Jensen), and
    the remaining quadratic is maximized in closed form: corners, the
    stationary point of each edge (1-D concave for alpha > 0), and the
    interior stationary point when the quadratic is concave.
    """
    da = a2 - a1
    db = b2 - b1
    c3 = (f00 - f10 - f01 + f11) / (da * db)
    c1 = (f10 - f00) / da - c3 * b1
    c2 = (f01 - f00) / db - c3 * a1
    c0 = f00 - c1 * a1 - c2 * b1 - c3 * a1 * b1

    best = np.maximum.reduce([
        f00 - alpha * (a1 * a1 + b1 * b1),
        f10 - alpha * (a2 * a2 + b1 * b1),
        f01 - alpha * (a1 * a1 + b2 * b2),
        f11 - alpha * (a2 * a2 + b2 * b2),
    ])

    with np.errstate(all="ignore"):
        for b in (b1, b2):
            slope = c1 + c3 * b
            astar = slope / (2.0 * alpha)
            inside = (astar > a1) & (astar < a2)
            q = c0 + (c2 - alpha * b) * b + slope * astar - alpha * astar * astar
            best = np.where(inside & np.isfinite(q), np.maximum(best, q), best)
        for a in (a1, a2):
            slope = c2 + c3 * a
            bstar = slope / (2.0 * alpha)
            inside = (bstar > b1) & (bstar < b2)
            q = c0 + (c1 - alpha * a) * a + slope * bstar - alpha * bstar * bstar
            best = np.where(inside & np.isfinite(q), np.maximum(best, q), best)
        det = 4.0 * alpha * alpha - c3 * c3
        astar = (2.0 * alpha * c1 + c2 * c3) / det
        bstar = (2.0 * alpha * c2 + c1 * c3) / det
        inside = (det > 0.0) & (astar > a1) & (astar < a2) & (bstar > b1) & (bstar < b2)
        q = (
            c0 + c1 * astar + c2 * bstar + c3 * astar * bstar
            - alpha * (astar * astar + bstar * bstar)
        )
        best = np.where(inside & np.isfinite(q), np.maximum(best, q), best)
    return best


def _alpha_norm_shortcut_opnorm(m: np.ndarray) -> AlphaNormResult:
    _, svals, vh = np.linalg.svd(m)
    witness = vh[0, :].conj()
    f_lo = _objective(m, 0.0, witness)
    f_hi = max(float(svals[0]) ** 2, f_lo)
    f_hi += 4.0 * np.finfo(float).eps * max(1.0, f_hi)
    lower = float(np.sqrt(max(f_lo, 0.0)))
    return AlphaNormResult(
        value=lower, lower=lower, upper=float(np.sqrt(f_hi)), witness=witness, iterations=0
    )


def alpha_norm(m, alpha: float, width: float | None = None) -> AlphaNormResult:
    """Alpha-norm of a square M with a certified enclosure.

    ``width`` is the requested enclosure width on the squared objective;
    the default is 1e-6 * max(1, ||M||^2).  The reported ``lower`` equals
    the objective attained by ``witness`` and ``value`` coincides with it;
    refinement continues until both the squared-scale and the norm-scale
    gaps are below ``width``.
    """
    a = check_alpha(alpha)
    mat = require_square(as_matrix(m))
    n = mat.shape[0]
    if width is not None and (width <= 0.0 or not np.isfinite(width)):
        raise ParameterError(f"width must be positive, got {width!r}")

    if not np.any(mat):
        e1 = np.zeros(n, dtype=np.complex128)
        e1[0] = 1.0
        return AlphaNormResult(0.0, 0.0, 0.0, e1, 0)
    if n == 1:
        v = float(abs(mat[0, 0]))
        return AlphaNormResult(v, v, v, np.ones(1, dtype=np.complex128), 0)

    nrm = operator_norm(mat)
    if width is None:
        width = DEFAULT_WIDTH_REL * max(1.0, nrm * nrm)
    if a == 0.0:
        return _alpha_norm_shortcut_opnorm(mat)

    # The maximizing tangent parameter satisfies |zeta| <= w(M); a cheap
    # certified upper bound on w(M) is all the domain needs.
    w_hi = _numerical_radius_coarse_upper(mat, nrm)
    half = w_hi + 1e-9 * max(1.0, w_hi)

    ev = _TangentEvaluator(mat, a)
    grid = np.linspace(-half, half, _INIT_GRID + 1)
    pa, pb = np.meshgrid(grid, grid, indexing="ij")
    pts = np.column_stack([pa.ravel(), pb.ravel()])
    fvals, vecs = ev.top(pts)
    cache = {(p[0], p[1]): f for p, f in zip(pts, fvals)}

    objs = _objective_batch(mat, a, vecs)
    best_i = int(np.argmax(objs))
    f_best = float(objs[best_i])
    witness = vecs[best_i]

    fg = fvals.reshape(_INIT_GRID + 1, _INIT_GRID + 1)
    a1 = np.repeat(grid[:-1], _INIT_GRID)
    a2 = np.repeat(grid[1:], _INIT_GRID)
    b1 = np.tile(grid[:-1], _INIT_GRID)
    b2 = np.tile(grid[1:], _INIT_GRID)
    f00 = fg[:-1, :-1].ravel()
    f10 = fg[1:, :-1].ravel()
    f01 = fg[:-1, 1:].ravel()
    f11 = fg[1:, 1:].ravel()
    uppers = _cell_upper_bounds(a1, a2, b1, b2, f00, f10, f01, f11, a)

    retired_cap = -np.inf
    rounds = 0

    def slack_allowed(f_lo: float) -> float:
        # f_hi - f_lo <= this bound implies both the squared-scale gap <= width
        # and the norm-scale gap <= width (exact: f_lo + s <= (sqrt(f_lo)+width)^2).
        root_slack = 2.0 * np.sqrt(max(f_lo, 0.0)) * width + width * width
        return min(width, root_slack)

    while True:
        f_hi = max(f_best, retired_cap, float(np.max(uppers)) if uppers.size else -np.inf)
        if f_hi - f_best <= slack_allowed(f_best) or uppers.size == 0:
            break
        if ev.evals > _MAX_EVALS:
            raise ConvergenceError(
                f"alpha-norm enclosure stalled after {ev.evals} evaluations "
                f"(gap {f_hi - f_best:.3e}, requested {width:.3e})"
            )
        rounds += 1

        live = uppers > f_best + slack_allowed(f_best)
        # retire cells that can no longer matter, remembering their cap
        if np.any(~live):
            dropped = uppers[~live]
            if dropped.size:
                retired_cap = max(retired_cap, float(np.max(dropped)))
            a1, a2, b1, b2 = a1[live], a2[live], b1[live], b2[live]
            f00, f10, f01, f11 = f00[live], f10[live], f01[live], f11[live]
            uppers = uppers[live]
        if uppers.size == 0:
            continue

        order = np.argsort(-uppers, kind="stable")
        split_idx = order[:_MAX_SPLITS_PER_ROUND]
        keep = np.ones(uppers.size, dtype=bool)
        keep[split_idx] = False

        sa1, sa2 = a1[split_idx], a2[split_idx]
        sb1, sb2 = b1[split_idx], b2[split_idx]
        am = (sa1 + sa2) / 2.0
        bm = (sb1 + sb2) / 2.0
        new_pts = []
        for i in range(split_idx.size):
            for key in (
                (am[i], sb1[i]), (am[i], sb2[i]),
                (sa1[i], bm[i]), (sa2[i], bm[i]),
                (am[i], bm[i]),
            ):
                if key not in cache:
                    cache[key] = None
                    new_pts.append(key)
        if new_pts:
            arr = np.asarray(new_pts)
            vals, vecs = ev.top(arr)
            for key, val in zip(new_pts, vals):
                cache[key] = float(val)
            objs = _objective_batch(mat, a, vecs)
            j = int(np.argmax(objs))
            if objs[j] > f_best:
                f_best = float(objs[j])
                witness = vecs[j]

        def corner(xa, xb):
            return np.asarray([cache[(xa[i], xb[i])] for i in range(xa.size)])

        fc00 = f00[split_idx]
        fc10 = f10[split_idx]
        fc01 = f01[split_idx]
        fc11 = f11[split_idx]
        f_s0 = corner(am, sb1)   # mid-bottom
        f_s1 = corner(am, sb2)   # mid-top
        f_0s = corner(sa1, bm)   # left-mid
        f_1s = corner(sa2, bm)   # right-mid
        f_ss = corner(am, bm)    # center

        ca1 = np.concatenate([sa1, am, sa1, am])
        ca2 = np.concatenate([am, sa2, am, sa2])
        cb1 = np.concatenate([sb1, sb1, bm, bm])
        cb2 = np.concatenate([bm, bm, sb2, sb2])
        cf00 = np.concatenate([fc00, f_s0, f_0s, f_ss])
        cf10 = np.concatenate([f_s0, fc10, f_ss, f_1s])
        cf01 = np.concatenate([f_0s, f_ss, fc01, f_s1])
        cf11 = np.concatenate([f_ss, f_1s, f_s1, fc11])
        cup = _cell_upper_bounds(ca1, ca2, cb1, cb2, cf00, cf10, cf01, cf11, a)

        a1 = np.concatenate([a1[keep], ca1])
        a2 = np.concatenate([a2[keep], ca2])
        b1 = np.concatenate([b1[keep], cb1])
        b2 = np.concatenate([b2[keep], cb2])
        f00 = np.concatenate([f00[keep], cf00])
        f10 = np.concatenate([f10[keep], cf10])
        f01 = np.concatenate([f01[keep], cf01])
        f11 = np.concatenate([f11[keep], cf11])
        uppers = np.concatenate([uppers[keep], cup])

    f_hi = max(f_best, retired_cap, float(np.max(uppers)) if uppers.size else -np.inf)
    f_hi += 4.0 * np.finfo(float).eps * max(1.0, abs(f_hi))
    lower = float(np.sqrt(max(f_best, 0.0)))
    upper = float(np.sqrt(max(f_hi, 0.0)))
    witness = witness / np.linalg.norm(witness)
    return AlphaNormResult(value=lower, lower=lower, upper=upper, witness=witness, iterations=rounds)


def alpha_norm_sample(m, alpha: float, trials: int, seed: int) -> float:
    """Sampling lower bound for the alpha-norm.

    Evaluates sqrt(F) at ``trials`` random unit vectors, then polishes the
    five best starts by tangent-eigenvector ascent: repeatedly replace x by
    the top eigenvector of H(<Mx,x>), which never decreases F.  The result
    is always a valid lower bound on the alpha-norm.
    """
    a = check_alpha(alpha)
    mat = require_square(as_matrix(m))
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials!r}")
    n = mat.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    objs = _objective_batch(mat, a, x)
    best = float(np.max(objs))

    ev = _TangentEvaluator(mat, a)
    starts = np.argsort(-objs, kind="stable")[:5]
    for i in starts:
        v = x[i]
        f_cur = float(objs[i])
        for _ in range(60):
            mv = mat @ v
            z = np.vdot(v, mv)
            _, vecs = ev.top(np.asarray([[z.real, z.imag]]))
            v_new = vecs[0]
            f_new = _objective(mat, a, v_new)
            if f_new <= f_cur + 1e-15 * max(1.0, f_cur):
                f_cur = max(f_cur, f_new)
                break
            v = v_new
            f_cur = f_new
        best = max(best, f_cur)
    return float(np.sqrt(max(best, 0.0)))
