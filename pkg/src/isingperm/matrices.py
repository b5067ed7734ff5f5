"""Square complex matrices, their norms, random ensembles, and JSON I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLargeError, InvalidInputError

_SPECTRAL_DIAG_MAX_N = 8


class SquareMatrix:
    """Immutable N x N complex matrix.

    Caches the real/imaginary split and the norm triple on first use; safe
    to share across threads.
    """

    __slots__ = ("_arr", "_norms")

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InvalidInputError("expected a square matrix with n >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("matrix entries must be finite")
        arr.setflags(write=False)
        self._arr = arr
        self._norms = None

    @property
    def n(self) -> int:
        return self._arr.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._arr

    @property
    def real_part(self) -> np.ndarray:
        return np.real(self._arr)

    @property
    def imag_part(self) -> np.ndarray:
        return np.imag(self._arr)

    @property
    def is_real(self) -> bool:
        return not np.any(self._arr.imag)

    @property
    def norms(self) -> "MatrixNorms":
        if self._norms is None:
            self._norms = norms(self)
        return self._norms

    def __repr__(self) -> str:
        return f"SquareMatrix(n={self.n})"


def as_matrix(a) -> SquareMatrix:
    return a if isinstance(a, SquareMatrix) else SquareMatrix(a)


@dataclass(frozen=True)
class MatrixNorms:
    """2-norm (largest singular value), 1-norm (max column sum), and the
    Pauli-coefficient norm of the associated Ising operator, sum_jk |A_jk|."""

    two_norm: float
    one_norm: float
    ising_norm: float


def _two_norm_iterative(arr: np.ndarray, tol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Largest singular value by power iteration on A^H A."""
    gram = arr.conj().T @ arr
    rng = np.random.default_rng(0x5EED)
    v = rng.standard_normal(arr.shape[0]) + 1j * rng.standard_normal(arr.shape[0])
    v /= np.linalg.norm(v)
    prev = -1.0
    lam = 0.0
    for _ in range(max_iter):
        w = gram @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - prev) <= 0.01 * tol * lam:
            break
        prev = lam
    return math.sqrt(lam)


def norms(a) -> MatrixNorms:
    """All three norms of a square matrix."""
    arr = as_matrix(a).array
    absa = np.abs(arr)
    return MatrixNorms(
        two_norm=_two_norm_iterative(arr),
        one_norm=float(absa.sum(axis=0).max()),
        ising_norm=float(absa.sum()),
    )


def sign_matrix(n: int) -> np.ndarray:
    """All 2^n sign vectors in {-1,+1}^n, one per row (bit 0 -> +1)."""
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return 1.0 - 2.0 * bits


def ising_diag_spectral_norm(a) -> float:
    """Exact spectral norm of the diagonal Ising operator of A.

    max over sign vectors x, x' of |x'^T A x|; exponential cost, capped at
    n <= 8.  Diagnostic companion to the ising_norm upper bound.
    """
    m = as_matrix(a)
    if m.n > _SPECTRAL_DIAG_MAX_N:
        raise DimensionTooLargeError(
            f"exact diagonal spectral norm capped at n <= {_SPECTRAL_DIAG_MAX_N}, got {m.n}"
        )
    s = sign_matrix(m.n)
    return float(np.abs((s @ m.array) @ s.T).max())


_ENSEMBLE_KINDS = ("real-standard-normal", "complex-standard-normal")


def gaussian_ensemble(n: int, count: int, seed: int, kind: str = "real-standard-normal"):
    """Draw `count` i.i.d. Gaussian n x n matrices, deterministic under seed.

    real-standard-normal: each entry N(0, 1).
    complex-standard-normal: real and imaginary parts each N(0, 1/2),
    so E|A_jk|^2 = 1.
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    if kind not in _ENSEMBLE_KINDS:
        raise InvalidInputError(f"unknown ensemble kind {kind!r}")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        if kind == "real-standard-normal":
            draw = rng.standard_normal((n, n))
        else:
            draw = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
        out.append(SquareMatrix(draw))
    return out


# --- JSON matrix format -----------------------------------------------------
#
# {"n": int, "rows": [[entry, ...], ...]} where entry is either a bare number
# (real matrices) or a two-element [re, im] pair.


def _parse_entry(value, row_idx: int):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise InvalidInputError(f"row {row_idx}: entry {value!r} is not a number or [re, im] pair")


def matrix_from_json(obj) -> SquareMatrix:
    if not isinstance(obj, dict) or "n" not in obj or "rows" not in obj:
        raise InvalidInputError('matrix JSON must be an object with "n" and "rows"')
    n = obj["n"]
    rows = obj["rows"]
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError('"n" must be a positive integer')
    if not isinstance(rows, list) or len(rows) != n:
        raise InvalidInputError(f'"rows" must be a list of {n} rows')
    entries = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InvalidInputError(f"row {i}: expected {n} entries")
        entries.append([_parse_entry(v, i) for v in row])
    return SquareMatrix(entries)


def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    if m.is_real:
        rows = [[float(v) for v in row] for row in m.real_part]
    else:
        rows = [[[float(v.real), float(v.imag)] for v in row] for row in m.array]
    return {"n": m.n, "rows": rows}


def load_matrix(path) -> SquareMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"not valid JSON: {exc}") from exc
    return matrix_from_json(obj)


def save_matrix(a, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(a), fh)
        fh.write("\n")
