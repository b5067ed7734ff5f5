"""Classical permanent evaluators.

Exact routes: naive permutation sum, Gray-code Ryser, Gray-code Glynn, the
double-sign-vector Glynn-Kan form (and its complex binomial expansion), and
the GapP split of a real permanent into two nonnegative sums.  Randomized
route: the Gurvits additive-error sampler.

The exact evaluators double as oracles for the quantum protocol tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .accumulate import KahanSum, gray_flips
from .errors import DimensionTooLargeError, InvalidInputError
from .matrices import as_matrix, sign_matrix

_NAIVE_MAX_N = 10
_RYSER_MAX_N = 30
_GLYNN_MAX_N = 28
_GLYNN_KAN_MAX_N = 13
_GAPP_MAX_N = 12


@dataclass
class PermanentEstimate:
    """A permanent value together with how it was obtained.

    error_bound is 0 for exact methods, an additive envelope for sampling
    and protocol methods, None when no bound is attached.  wall_terms counts
    summand evaluations.
    """

    value: complex
    method: str
    error_bound: float | None = None
    samples_used: int | None = None
    wall_terms: int = 0
    extra: dict = field(default_factory=dict)


def _check_cap(n: int, cap: int, method: str) -> None:
    if n > cap:
        raise DimensionTooLargeError(f"{method} is capped at n <= {cap}, got n = {n}")


def permanent_naive(a) -> PermanentEstimate:
    """Sum over all N! permutations; the ground-truth oracle for small n."""
    m = as_matrix(a)
    n = m.n
    _check_cap(n, _NAIVE_MAX_N, "permanent_naive")
    arr = m.array
    rows = np.arange(n)
    acc = KahanSum(0j)
    count = 0
    chunk = []
    for perm in permutations(range(n)):
        chunk.append(perm)
        if len(chunk) == 65536:
            vals = arr[rows, np.array(chunk)].prod(axis=1)
            acc.add(complex(vals.sum()))
            count += len(chunk)
            chunk = []
    if chunk:
        vals = arr[rows, np.array(chunk)].prod(axis=1)
        acc.add(complex(vals.sum()))
        count += len(chunk)
    return PermanentEstimate(value=complex(acc.total), method="naive",
                             error_bound=0.0, wall_terms=count)


def permanent_ryser(a) -> PermanentEstimate:
    """Ryser inclusion-exclusion over column subsets, Gray-code ordered.

    Each Gray step updates the N running row sums in O(N), for O(N 2^N)
    total work over the 2^N - 1 nonempty subsets.
    """
    m = as_matrix(a)
    n = m.n
    _check_cap(n, _RYSER_MAX_N, "permanent_ryser")
    arr = m.array
    row_sums = np.zeros(n, dtype=np.complex128)
    acc = KahanSum(0j)
    size = 0
    for bit, now_set in gray_flips(n):
        if now_set:
            row_sums += arr[:, bit]
            size += 1
        else:
            row_sums -= arr[:, bit]
            size -= 1
        term = complex(np.prod(row_sums))
        acc.add(term if size % 2 == 0 else -term)
    value = acc.total * (-1) ** n
    return PermanentEstimate(value=complex(value), method="ryser",
                             error_bound=0.0, wall_terms=(1 << n) - 1)


def permanent_glynn(a) -> PermanentEstimate:
    """Glynn average of signed products over all 2^N sign vectors."""
    m = as_matrix(a)
    n = m.n
    _check_cap(n, _GLYNN_MAX_N, "permanent_glynn")
    arr = m.array
    x = np.ones(n)
    dots = arr.sum(axis=1).astype(np.complex128)  # A_j . x at x = (1,..,1)
    parity = 1.0
    acc = KahanSum(0j)
    acc.add(complex(np.prod(dots)))
    for bit, _ in gray_flips(n):
        old = x[bit]
        x[bit] = -old
        dots -= 2.0 * old * arr[:, bit]
        parity = -parity
        acc.add(parity * complex(np.prod(dots)))
    return PermanentEstimate(value=complex(acc.total / (1 << n)), method="glynn",
                             error_bound=0.0, wall_terms=1 << n)


def _glynn_kan_real(arr: np.ndarray, n: int) -> complex:
    s = sign_matrix(n)
    par_x = s.prod(axis=1)
    xp = np.ones(n)
    u = arr.sum(axis=0).copy()  # x'^T A at x' = (1,..,1)
    par_xp = 1.0
    acc = KahanSum(0.0)
    acc.add(float(par_x @ (s @ u) ** n))
    for bit, _ in gray_flips(n):
        old = xp[bit]
        xp[bit] = -old
        u -= 2.0 * old * arr[bit, :]
        par_xp = -par_xp
        acc.add(par_xp * float(par_x @ (s @ u) ** n))
    return complex(acc.total / (math.factorial(n) * 4**n))


def _glynn_kan_complex(b: np.ndarray, c: np.ndarray, n: int) -> complex:
    # Binomial-in-l expansion: sum_l i^l C(N,l) (x'^T B x)^{N-l} (x'^T C x)^l.
    s = sign_matrix(n)
    par_x = s.prod(axis=1)
    binom = [math.comb(n, l) for l in range(n + 1)]
    phase = [1j**l for l in range(n + 1)]
    xp = np.ones(n)
    ub = b.sum(axis=0).copy()
    uc = c.sum(axis=0).copy()
    par_xp = 1.0

    def inner() -> complex:
        qb = s @ ub
        qc = s @ uc
        tot = 0j
        for l in range(n + 1):
            tot += phase[l] * binom[l] * float(par_x @ (qb ** (n - l) * qc**l))
        return par_xp * tot

    acc = KahanSum(0j)
    acc.add(inner())
    for bit, _ in gray_flips(n):
        old = xp[bit]
        xp[bit] = -old
        ub -= 2.0 * old * b[bit, :]
        uc -= 2.0 * old * c[bit, :]
        par_xp = -par_xp
        acc.add(inner())
    return complex(acc.total / (math.factorial(n) * 4**n))


def permanent_glynn_kan(a) -> PermanentEstimate:
    """Glynn-Kan double-sign-vector average of N-th powers of x'^T A x.

    Real input evaluates the 4^N pair sum directly (Gray-code outer loop on
    x' with incremental x'^T A updates, vectorized inner sum over x); complex
    input uses the equivalent binomial expansion over B and C parts, which is
    the form the quantum protocol mirrors.
    """
    m = as_matrix(a)
    n = m.n
    _check_cap(n, _GLYNN_KAN_MAX_N, "permanent_glynn_kan")
    if m.is_real:
        value = _glynn_kan_real(m.real_part, n)
        return PermanentEstimate(value=value, method="glynn_kan",
                                 error_bound=0.0, wall_terms=4**n)
    value = _glynn_kan_complex(m.real_part, m.imag_part, n)
    return PermanentEstimate(value=value, method="glynn_kan_complex",
                             error_bound=0.0, wall_terms=(n + 1) * 4**n)


def permanent_gapp(b) -> PermanentEstimate:
    """Real permanent as a difference of two nonnegative sums.

    Splits the Glynn-Kan pair sum by the relative parity of (x, x'); for even
    N both partial sums are nonnegative.  Odd dimensions are first padded by
    a direct sum with the scalar 1, which leaves the permanent unchanged.
    """
    m = as_matrix(b)
    if not m.is_real:
        raise InvalidInputError("permanent_gapp requires a real matrix")
    n = m.n
    _check_cap(n, _GAPP_MAX_N, "permanent_gapp")
    arr = m.real_part.copy()
    padded = n % 2 == 1
    if padded:
        arr = np.pad(arr, ((0, 1), (0, 1)))
        arr[n, n] = 1.0
    np2 = arr.shape[0]

    s = sign_matrix(np2)
    par_x = s.prod(axis=1)
    pos = par_x > 0
    xp = np.ones(np2)
    u = arr.sum(axis=0).copy()
    par_xp = 1.0
    s_plus = KahanSum(0.0)
    s_minus = KahanSum(0.0)

    def absorb() -> None:
        qn = (s @ u) ** np2
        same = float(qn[pos].sum())
        diff = float(qn[~pos].sum())
        if par_xp > 0:
            s_plus.add(same)
            s_minus.add(diff)
        else:
            s_plus.add(diff)
            s_minus.add(same)

    absorb()
    for bit, _ in gray_flips(np2):
        old = xp[bit]
        xp[bit] = -old
        u -= 2.0 * old * arr[bit, :]
        par_xp = -par_xp
        absorb()

    scale = math.factorial(np2) * 4**np2
    sp = s_plus.total / scale
    sm = s_minus.total / scale
    return PermanentEstimate(
        value=complex(sp - sm),
        method="gapp",
        error_bound=0.0,
        wall_terms=4**np2,
        extra={"s_plus": sp, "s_minus": sm, "padded": padded},
    )


def permanent_gurvits(a, samples: int, seed: int, exhaustive: bool = False) -> PermanentEstimate:
    """Gurvits Monte-Carlo estimator of the Glynn average.

    Unbiased mean of (prod_k x_k)(prod_j A_j . x) over i.i.d. uniform sign
    vectors; reported error_bound is the 3-sigma-style envelope
    3 ||A||_2^N / sqrt(samples).  With exhaustive=True all 2^N sign vectors
    are enumerated once, reproducing the exact Glynn value.
    """
    m = as_matrix(a)
    n = m.n
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    arr = m.array

    if exhaustive:
        _check_cap(n, _GLYNN_MAX_N, "permanent_gurvits(exhaustive)")
        x = sign_matrix(n)
        vals = x.prod(axis=1) * (x @ arr.T).prod(axis=1)
        value = complex(vals.mean())
        return PermanentEstimate(value=value, method="gurvits", error_bound=0.0,
                                 samples_used=1 << n, wall_terms=1 << n,
                                 extra={"stderr": 0.0, "exhaustive": True})

    rng = np.random.default_rng(seed)
    total = KahanSum(0j)
    total_sq = KahanSum(0.0)
    done = 0
    while done < samples:
        batch = min(65536, samples - done)
        x = rng.integers(0, 2, size=(batch, n)) * 2.0 - 1.0
        vals = x.prod(axis=1) * (x @ arr.T).prod(axis=1)
        total.add(complex(vals.sum()))
        total_sq.add(float(np.abs(vals) ** 2 @ np.ones(batch)))
        done += batch
    mean = total.total / samples
    var = max(total_sq.total / samples - abs(mean) ** 2, 0.0)
    stderr = math.sqrt(var / samples)
    bound = 3.0 * m.norms.two_norm**n / math.sqrt(samples)
    return PermanentEstimate(value=complex(mean), method="gurvits", error_bound=bound,
                             samples_used=samples, wall_terms=samples,
                             extra={"stderr": stderr, "exhaustive": False})
