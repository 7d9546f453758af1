"""Block operator matrices and the auxiliary real matrices built from them.

A BlockMatrix is an n x n grid of complex blocks; block (i, j) maps the
j-th summand of a direct sum into the i-th, so it has shape
row_dims[i] x col_dims[j].  The bound families condense a block matrix
into small real n x n matrices of blockwise scalars (norms, numerical
radii, function-of-singular-value terms); this module builds those.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import MatrixFormatError, ParameterError, ShapeError
from .linalg import as_matrix, matrix_abs, matrix_from_json, matrix_to_json, spectral_apply
from .norms import DEFAULT_NUMRAD_TOL, numerical_radius, operator_norm

# numerical-radius tolerance used for diagonal blocks inside builders
BUILDER_NUMRAD_TOL = DEFAULT_NUMRAD_TOL


@dataclass(frozen=True)
class BlockMatrix:
    """n x n grid of complex blocks over a row/column dimension partition."""

    row_dims: tuple[int, ...]
    col_dims: tuple[int, ...]
    blocks: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        n = len(self.row_dims)
        if n == 0 or len(self.col_dims) != n:
            raise ShapeError("row_dims and col_dims must be equally sized and nonempty")
        if any(d < 1 for d in self.row_dims) or any(d < 1 for d in self.col_dims):
            raise ShapeError("all partition dimensions must be positive")
        if len(self.blocks) != n or any(len(row) != n for row in self.blocks):
            raise ShapeError(f"blocks must form an {n} x {n} grid")
        for i in range(n):
            for j in range(n):
                shape = self.blocks[i][j].shape
                want = (self.row_dims[i], self.col_dims[j])
                if shape != want:
                    raise ShapeError(f"block ({i},{j}) has shape {shape}, expected {want}")

    @property
    def n(self) -> int:
        return len(self.row_dims)

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]

    def has_square_diagonal(self) -> bool:
        return all(r == c for r, c in zip(self.row_dims, self.col_dims))

    def is_uniform(self) -> bool:
        """True when every block is square of one common dimension."""
        dims = set(self.row_dims) | set(self.col_dims)
        return len(dims) == 1


def block_matrix(blocks, row_dims=None, col_dims=None) -> BlockMatrix:
    """Build a BlockMatrix from a nested sequence of array-likes."""
    grid = tuple(tuple(as_matrix(b) for b in row) for row in blocks)
    if not grid or any(len(row) != len(grid) for row in grid):
        raise ShapeError("blocks must form a square n x n grid")
    if row_dims is None:
        row_dims = tuple(row[0].shape[0] for row in grid)
    if col_dims is None:
        col_dims = tuple(b.shape[1] for b in grid[0])
    return BlockMatrix(tuple(int(d) for d in row_dims), tuple(int(d) for d in col_dims), grid)


def assemble(t: BlockMatrix) -> np.ndarray:
    """Flatten to the (sum row_dims) x (sum col_dims) matrix."""
    return np.block([[np.asarray(b) for b in row] for row in t.blocks])


def split(m, row_dims, col_dims) -> BlockMatrix:
    """Partition a flat matrix back into blocks; inverse of assemble."""
    a = as_matrix(m)
    row_dims = tuple(int(d) for d in row_dims)
    col_dims = tuple(int(d) for d in col_dims)
    if sum(row_dims) != a.shape[0] or sum(col_dims) != a.shape[1]:
        raise ShapeError(
            f"partition {row_dims} x {col_dims} does not tile shape {a.shape}"
        )
    ro = np.concatenate([[0], np.cumsum(row_dims)])
    co = np.concatenate([[0], np.cumsum(col_dims)])
    grid = tuple(
        tuple(a[ro[i]:ro[i + 1], co[j]:co[j + 1]] for j in range(len(col_dims)))
        for i in range(len(row_dims))
    )
    return BlockMatrix(row_dims, col_dims, grid)


def block_to_json(t: BlockMatrix) -> dict:
    return {
        "row_dims": list(t.row_dims),
        "col_dims": list(t.col_dims),
        "blocks": [[matrix_to_json(b) for b in row] for row in t.blocks],
    }


def block_from_json(payload) -> BlockMatrix:
    if not isinstance(payload, dict):
        raise MatrixFormatError("block payload must be a JSON object")
    try:
        row_dims = tuple(int(d) for d in payload["row_dims"])
        col_dims = tuple(int(d) for d in payload["col_dims"])
        rows = payload["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"block payload missing or invalid field: {exc}") from exc
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise MatrixFormatError("blocks must be a nested list of matrix objects")
    grid = tuple(tuple(matrix_from_json(b) for b in row) for row in rows)
    return BlockMatrix(row_dims, col_dims, grid)


# ---------------------------------------------------------------------------
# Symbol function pairs: nonnegative continuous f, g with f(t) g(t) = t.
# ---------------------------------------------------------------------------

_PAIR_SAMPLES = np.linspace(0.0, 10.0, 1000)
_PAIR_TOL = 1e-9


@dataclass(frozen=True)
class SymbolFunctionPair:
    """Factorization t = f(t) g(t) by nonnegative functions on [0, inf).

    ``power(s)`` gives f = t^s, g = t^(1-s); ``tabulated`` accepts arbitrary
    callables, validated on 1000 samples over [0, 10].
    """

    kind: str
    f: Callable[[float], float]
    g: Callable[[float], float]
    s: float | None = None
    description: str = field(default="")

    @staticmethod
    def power(s: float) -> "SymbolFunctionPair":
        s = float(s)
        if not np.isfinite(s) or s < 0.0 or s > 1.0:
            raise ParameterError(f"power exponent must lie in [0, 1], got {s!r}")

        def f(t: float, _s=s) -> float:
            return 1.0 if _s == 0.0 else float(t) ** _s

        def g(t: float, _s=s) -> float:
            return 1.0 if _s == 1.0 else float(t) ** (1.0 - _s)

        return SymbolFunctionPair(kind="power", f=f, g=g, s=s, description=f"t^{s:g} * t^{1 - s:g}")

    @staticmethod
    def tabulated(f, g, description: str = "tabulated") -> "SymbolFunctionPair":
        fv = np.asarray([float(f(t)) for t in _PAIR_SAMPLES])
        gv = np.asarray([float(g(t)) for t in _PAIR_SAMPLES])
        if np.any(fv < 0.0) or np.any(gv < 0.0):
            raise ParameterError("f and g must be nonnegative on [0, 10] samples")
        err = np.abs(fv * gv - _PAIR_SAMPLES) / np.maximum(1.0, _PAIR_SAMPLES)
        if np.max(err) > _PAIR_TOL:
            raise ParameterError(
                f"f(t) g(t) = t violated by {np.max(err):.3e} on [0, 10] samples"
            )
        return SymbolFunctionPair(kind="tabulated", f=f, g=g, s=None, description=description)


def _abs_spectrum(svals: np.ndarray, dim: int) -> np.ndarray:
    """Eigenvalues of |A| for an operand with the given codomain dimension.

    The singular values are padded with zeros when |A| lives on a larger
    space than the rank bound.
    """
    if dim > svals.size:
        return np.concatenate([svals, np.zeros(dim - svals.size)])
    return svals


def func_abs_norm(fn, dim: int, svals: np.ndarray) -> float:
    """max over the spectrum of |A| (resp. |A*|) of the scalar function fn.

    Equals ||fn^2(|A|)||^(1/2) because fn >= 0 and fn^2(|A|) has eigenvalues
    fn^2(sigma); evaluated on scalars to avoid matrix-function rounding.
    ``dim`` is the dimension of the space |A| acts on, which pads the
    singular-value list with zeros for rectangular operands.
    """
    spectrum = _abs_spectrum(svals, dim)
    return float(max(fn(t) for t in spectrum))


def _pair_terms(block: np.ndarray, fg: SymbolFunctionPair) -> tuple[float, float]:
    """(||f^2(|A|)||^(1/2), ||g^2(|A*|)||^(1/2)) for one block."""
    svals = np.linalg.svd(block, compute_uv=False)
    if fg.kind == "power":
        top = float(svals[0])
        # t^s is monotone, so both norms come from the top singular value;
        # exponent 0 means the constant function 1 (value 1 on any spectrum).
        fs = 1.0 if fg.s == 0.0 else top ** fg.s
        gs = 1.0 if fg.s == 1.0 else top ** (1.0 - fg.s)
        return fs, gs
    fval = func_abs_norm(fg.f, block.shape[1], svals)
    gval = func_abs_norm(fg.g, block.shape[0], svals)
    return fval, gval


def _require_square_diagonal(t: BlockMatrix, what: str):
    if not t.has_square_diagonal():
        raise ShapeError(f"{what} requires square diagonal blocks")


def _require_uniform(t: BlockMatrix, what: str):
    if not t.is_uniform():
        raise ShapeError(f"{what} in strict mode requires all blocks square of equal dimension")


def build_S(t: BlockMatrix) -> np.ndarray:
    """S with s_ij = ||T_ij||; entrywise nonnegative, not symmetric in general."""
    n = t.n
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s[i, j] = operator_norm(t.block(i, j))
    return s


def build_R_est6(t: BlockMatrix) -> np.ndarray:
    """Symmetric R: diagonal w(T_ii), off-diagonal (||T_ij|| + ||T_ji||)/2."""
    _require_square_diagonal(t, "build_R_est6")
    n = t.n
    s = build_S(t)
    r = (s + s.T) / 2.0
    for i in range(n):
        r[i, i] = numerical_radius(t.block(i, i), BUILDER_NUMRAD_TOL)
    return r


def build_Ttilde_est6(t: BlockMatrix) -> np.ndarray:
    """T~ with diagonal w(T_ii) and off-diagonal ||T_ij|| (no symmetrization)."""
    _require_square_diagonal(t, "build_Ttilde_est6")
    s = build_S(t)
    for i in range(t.n):
        s[i, i] = numerical_radius(t.block(i, i), BUILDER_NUMRAD_TOL)
    return s


def build_Ttilde_est7(t: BlockMatrix, fg: SymbolFunctionPair) -> np.ndarray:
    """T~ with entries ||f^2(|T_ij|)||^(1/2) ||g^2(|T_ij*|)||^(1/2)."""
    n = t.n
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            fv, gv = _pair_terms(t.block(i, j), fg)
            out[i, j] = fv * gv
    return out


def build_R_est7(t: BlockMatrix, fg: SymbolFunctionPair, strict: bool = False) -> np.ndarray:
    """Symmetrization of build_Ttilde_est7; same formula on the diagonal."""
    if strict:
        _require_uniform(t, "build_R_est7")
    tt = build_Ttilde_est7(t, fg)
    return (tt + tt.T) / 2.0


def _diag_entry(block: np.ndarray, fg: SymbolFunctionPair) -> float:
    """(1/2) ||f^2(|T_ii|) + g^2(|T_ii*|)|| via functional calculus."""
    f2 = spectral_apply(lambda v: fg.f(v) ** 2, matrix_abs(block))
    g2 = spectral_apply(lambda v: fg.g(v) ** 2, matrix_abs(block.conj().T))
    return 0.5 * operator_norm(f2 + g2)


def build_R_diag(t: BlockMatrix, fg: SymbolFunctionPair, strict: bool = False) -> np.ndarray:
    """R with diagonal (1/2)||f^2(|T_ii|) + g^2(|T_ii*|)||, est7 off-diagonals."""
    _require_square_diagonal(t, "build_R_diag")
    if strict:
        _require_uniform(t, "build_R_diag")
    r = build_R_est7(t, fg)
    for i in range(t.n):
        r[i, i] = _diag_entry(t.block(i, i), fg)
    return r


def build_Ttilde_diag(t: BlockMatrix, fg: SymbolFunctionPair) -> np.ndarray:
    """T~ with the build_R_diag diagonal and unsymmetrized est7 off-diagonals."""
    _require_square_diagonal(t, "build_Ttilde_diag")
    tt = build_Ttilde_est7(t, fg)
    for i in range(t.n):
        tt[i, i] = _diag_entry(t.block(i, i), fg)
    return tt
