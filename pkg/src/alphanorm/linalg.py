"""Dense complex matrix substrate: Hermitian parts, |M|, eigen/SVD, functional calculus.

Everything operates on ``numpy.ndarray`` with dtype complex128.  All
operations are pure; no function mutates its arguments.  Eigenvalues are
always reported in ascending order, and eigenvector phases are normalized
(first significant component made real positive) so repeated runs produce
identical decompositions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MatrixFormatError, ParameterError, PositivityError, ShapeError

# Relative threshold below which a nominally-Hermitian input is accepted.
HERMITIAN_TOL = 1e-10
# Eigenvalues of a PSD operand in [-PSD_CLAMP_REL * ||A||, 0) are clamped to 0
# inside spectral_apply; anything more negative is a hard error.
PSD_CLAMP_REL = 1e-8


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex128 array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"matrix dimensions must be positive, got {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise MatrixFormatError("matrix entries must be finite")
    return a


def require_square(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what} must be square, got shape {a.shape}")
    return a


def hermitian_error(a: np.ndarray) -> float:
    """Max entrywise deviation of a from its own adjoint."""
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def require_hermitian(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    require_square(a, what)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if hermitian_error(a) > HERMITIAN_TOL * scale:
        raise ShapeError(f"{what} must be Hermitian within {HERMITIAN_TOL:g} (relative)")
    return a


def hermitian_parts(m) -> tuple[np.ndarray, np.ndarray]:
    """Split a square M into (H, K) with M = H + iK and both H, K Hermitian.

    H = (M + M*)/2 and K = (M - M*)/(2i).
    """
    a = require_square(as_matrix(m))
    ah = a.conj().T
    re = (a + ah) / 2.0
    im = (a - ah) / 2.0j
    return re, im


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition A = V diag(values) V* with ascending real eigenvalues.

    ``vectors`` columns are orthonormal; each column's phase is fixed by
    making its first component of significant modulus real positive.
    """

    values: np.ndarray
    vectors: np.ndarray


def _normalize_phases(vectors: np.ndarray) -> np.ndarray:
    v = vectors.copy()
    n = v.shape[0]
    mags = np.abs(v)
    col_max = np.max(mags, axis=0)
    for j in range(v.shape[1]):
        thresh = 1e-8 * max(col_max[j], 1e-300)
        for i in range(n):
            if mags[i, j] > thresh:
                phase = v[i, j] / mags[i, j]
                v[:, j] *= np.conj(phase)
                break
    return v


def hermitian_eig(m) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, deterministic up to LAPACK."""
    a = require_hermitian(as_matrix(m))
    vals, vecs = np.linalg.eigh(a)
    return HermitianEig(values=vals, vectors=_normalize_phases(vecs))


def lambda_max(m) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    a = require_hermitian(as_matrix(m))
    return float(np.linalg.eigvalsh(a)[-1])


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD M = U diag(s) Vh with singular values descending."""
    a = as_matrix(m)
    return np.linalg.svd(a)


def singular_values(m) -> np.ndarray:
    """Singular values of M, descending."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def matrix_abs(m) -> np.ndarray:
    """|M| = (M*M)^(1/2), a cols x cols PSD Hermitian matrix.

    Computed from the SVD (M = U S Vh gives |M| = V S V*), which keeps the
    eigenvalues of |M| exactly equal to the singular values of M instead of
    squaring and re-rooting them.
    """
    a = as_matrix(m)
    _, s, vh = np.linalg.svd(a)
    v = vh.conj().T
    k = s.shape[0]
    out = (v[:, :k] * s) @ vh[:k, :]
    # exact Hermitian symmetry for downstream eigh consumers
    return (out + out.conj().T) / 2.0


def spectral_apply(f, a) -> np.ndarray:
    """Apply a nonnegative scalar function to a Hermitian PSD matrix.

    Returns V f(D) V* from A = V D V*.  Eigenvalues in
    [-PSD_CLAMP_REL * ||A||, 0) are clamped to 0 (rounding noise from
    |M| constructions); more negative eigenvalues raise PositivityError.
    """
    mat = as_matrix(a)
    require_hermitian(mat, "spectral_apply operand")
    vals, vecs = np.linalg.eigh(mat)
    scale = max(abs(float(vals[0])), abs(float(vals[-1])))
    floor = -PSD_CLAMP_REL * max(scale, 0.0)
    if vals[0] < floor:
        raise PositivityError(
            f"operand has eigenvalue {vals[0]:.3e} below PSD tolerance {floor:.3e}"
        )
    clamped = np.maximum(vals, 0.0)
    fvals = np.asarray([float(f(t)) for t in clamped], dtype=np.float64)
    if np.any(fvals < 0.0):
        raise ParameterError("function must be nonnegative on the spectrum")
    out = (vecs * fvals) @ vecs.conj().T
    return (out + out.conj().T) / 2.0


# ---------------------------------------------------------------------------
# JSON interchange: {"rows": m, "cols": n, "re": [[...]], "im": [[...]]}
# "im" omitted means an all-zero imaginary part.
# ---------------------------------------------------------------------------

def matrix_to_json(m) -> dict:
    """Serialize to the nested-list JSON schema (row-major doubles)."""
    a = as_matrix(m)
    payload = {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": a.real.tolist(),
    }
    if np.any(a.imag != 0.0):
        payload["im"] = a.imag.tolist()
    return payload


def matrix_from_json(payload) -> np.ndarray:
    """Parse the matrix JSON schema, validating shape agreement."""
    if not isinstance(payload, dict):
        raise MatrixFormatError("matrix payload must be a JSON object")
    try:
        rows = int(payload["rows"])
        cols = int(payload["cols"])
        re = payload["re"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"matrix payload missing or invalid field: {exc}") from exc
    if rows < 1 or cols < 1:
        raise MatrixFormatError("rows and cols must be positive")
    try:
        re_arr = np.asarray(re, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError("re must be a nested numeric array") from exc
    if re_arr.shape != (rows, cols):
        raise MatrixFormatError(f"re has shape {re_arr.shape}, expected {(rows, cols)}")
    if "im" in payload:
        try:
            im_arr = np.asarray(payload["im"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise MatrixFormatError("im must be a nested numeric array") from exc
        if im_arr.shape != (rows, cols):
            raise MatrixFormatError(f"im has shape {im_arr.shape}, expected {(rows, cols)}")
    else:
        im_arr = np.zeros((rows, cols))
    return as_matrix(re_arr + 1j * im_arr)
