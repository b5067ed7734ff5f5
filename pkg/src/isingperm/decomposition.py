"""Finite-difference decomposition of the Glynn-Kan operator picture.

Turns a permanent into a weighted sum of propagator overlaps: generates the
shifted matrices and combination weights for real and complex inputs,
selects the time step, halves the term list by time-reversal pairing,
recombines evaluated overlaps, and Richardson-extrapolates in dt^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .accumulate import KahanSum
from .classical import PermanentEstimate
from .errors import DimensionTooLargeError, DtOutOfRangeError, InvalidInputError
from .matrices import SquareMatrix, as_matrix, sign_matrix

_OPERATOR_MAX_N = 7
_RICHARDSON_MAX_LEVELS = 4
E = math.e


@dataclass(frozen=True)
class OverlapTerm:
    """One shifted-matrix propagator and its combination weight.

    The weight already carries the sign, binomials, i^l phase, and this
    term's share of the (-1)^N / (N! dt^N) prefactor (doubled when the term
    represents a conjugate pair).
    """

    matrix: SquareMatrix
    weight: complex
    indices: tuple
    uses_conjugate_pair: bool = False


@dataclass
class ProtocolConfig:
    """Run configuration for the overlap protocol."""

    dt: float
    mode: str = "exact_overlap"  # or "hadamard_shots"
    shots_per_overlap: int = 1024
    richardson_levels: int = 0
    seed: int = 0
    halve_by_time_reversal: bool = True
    allow_dt_override: bool = False

    def __post_init__(self):
        if self.dt <= 0.0:
            raise InvalidInputError("dt must be positive")
        if self.mode not in ("exact_overlap", "hadamard_shots"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.shots_per_overlap < 1:
            raise InvalidInputError("shots_per_overlap must be >= 1")
        if self.richardson_levels < 0:
            raise InvalidInputError("richardson_levels must be >= 0")


def convergence_dt_max(a) -> float:
    """Largest dt meeting the expansion's convergence condition, d/||H(A)||."""
    m = as_matrix(a)
    d = 2.0 if m.is_real else 4.0
    h = m.norms.ising_norm
    return d / h if h > 0.0 else math.inf


def check_convergence(a, cfg: ProtocolConfig) -> None:
    limit = convergence_dt_max(a)
    if cfg.dt > limit * (1.0 + 1e-12) and not cfg.allow_dt_override:
        raise DtOutOfRangeError(
            f"dt = {cfg.dt:g} violates the convergence bound dt <= {limit:g}"
        )


# --- Delta-t selection --------------------------------------------------------


@dataclass(frozen=True)
class DtWindow:
    lower: float
    upper: float
    empty: bool
    chosen: float


@dataclass(frozen=True)
class DtSelection:
    exp_window: DtWindow       # exponentially-small-total-error window
    gurvits_window: DtWindow   # window where the quantum bound beats Gurvits'
    chosen: float
    d: float
    ising_norm: float


def _window(lower: float, upper: float) -> DtWindow:
    # boundary lower == upper counts as non-empty (closed upper end);
    # the tolerance absorbs float noise in the norm arithmetic
    empty = lower > upper * (1.0 + 1e-12)
    if empty:
        chosen = upper
    elif math.isinf(upper):
        chosen = 2.0 * lower
    else:
        chosen = math.sqrt(lower * upper)
    return DtWindow(lower=lower, upper=upper, empty=empty, chosen=chosen)


def select_dt(a) -> DtSelection:
    """Both dt windows and a concrete choice.

    Real matrices: exponential-error window (2e/N, 2/||H||]; complex: the
    same with d = 4.  The Gurvits-beating window is [de/(N ||A||_2), d/||H||].
    When the exponential window is empty the choice falls back to the
    convergence-limited maximum d/||H||, which minimizes the (d/dt)^N
    Hadamard-error amplification subject to validity.
    """
    m = as_matrix(a)
    n = m.n
    norms = m.norms
    d = 2.0 if m.is_real else 4.0
    upper = d / norms.ising_norm if norms.ising_norm > 0.0 else math.inf
    exp_win = _window(d * E / n, upper)
    gur_lower = d * E / (n * norms.two_norm) if norms.two_norm > 0.0 else math.inf
    gur_win = _window(gur_lower, upper)
    chosen = exp_win.chosen if not exp_win.empty else upper
    if math.isinf(chosen):  # zero matrix: any dt converges
        chosen = 1.0
    return DtSelection(exp_window=exp_win, gurvits_window=gur_win,
                       chosen=chosen, d=d, ising_norm=norms.ising_norm)


# --- term generation ----------------------------------------------------------


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _shifted(coef_b: float, coef_c: float, b: np.ndarray, c: np.ndarray | None,
             shift: float) -> SquareMatrix:
    arr = coef_b * b
    if c is not None:
        arr = arr + coef_c * c
    arr = arr + shift * np.eye(b.shape[0])
    return SquareMatrix(arr)


def generate_terms(a, cfg: ProtocolConfig) -> list[OverlapTerm]:
    """Overlap terms whose weighted sum approximates Per(A).

    Real input yields the N+1 binomial terms with shifted matrices
    (N-2l) B + (pi/dt) I; the parity operator is absorbed into the diagonal
    shift.  With time-reversal halving only l <= floor((N-1)/2) are emitted,
    flagged and with doubled weight (the self-paired middle term of even N
    has a vanishing overlap and is dropped).  Complex input expands over the
    triple binomial (l, j, k); the time-reversal partner of (l, j, k) is
    (l, N-l-j, l-k), and again the self-paired terms vanish identically.

    Weights are assembled in log-magnitude + phase form so the 1/(N! dt^N)
    prefactor never overflows on its own.
    """
    m = as_matrix(a)
    check_convergence(m, cfg)
    n = m.n
    dt = cfg.dt
    shift = math.pi / dt
    log_pref = -math.lgamma(n + 1) - n * math.log(dt)
    sign_n = -1.0 if n % 2 else 1.0
    b = m.real_part
    terms: list[OverlapTerm] = []

    if m.is_real:
        l_range = range((n + 1) // 2) if cfg.halve_by_time_reversal else range(n + 1)
        for l in l_range:
            mag = math.exp(_log_comb(n, l) + log_pref)
            weight = sign_n * (-1.0 if l % 2 else 1.0) * mag
            if cfg.halve_by_time_reversal:
                weight *= 2.0
            terms.append(OverlapTerm(
                matrix=_shifted(float(n - 2 * l), 0.0, b, None, shift),
                weight=complex(weight),
                indices=(l,),
                uses_conjugate_pair=cfg.halve_by_time_reversal,
            ))
        return terms

    c = m.imag_part
    for l in range(n + 1):
        for j in range(n - l + 1):
            for k in range(l + 1):
                partner = (n - l - j, l - k)
                halved = cfg.halve_by_time_reversal
                if halved:
                    if (j, k) == partner:
                        continue  # shifted matrix is exactly (pi/dt) I; overlap 0
                    if (j, k) > partner:
                        continue
                mag = math.exp(_log_comb(n, l) + _log_comb(n - l, j)
                               + _log_comb(l, k) + log_pref)
                phase = (1j**l) * (-1.0 if (j + k) % 2 else 1.0) * sign_n
                weight = phase * mag
                if halved:
                    weight *= 2.0
                terms.append(OverlapTerm(
                    matrix=_shifted(float(n - l - 2 * j), float(l - 2 * k), b, c, shift),
                    weight=weight,
                    indices=(l, j, k),
                    uses_conjugate_pair=halved,
                ))
    return terms


def term_to_json(term: OverlapTerm) -> dict:
    """Debug serialization of one term."""
    from .matrices import matrix_to_json

    return {
        "indices": list(term.indices),
        "weight": [term.weight.real, term.weight.imag],
        "uses_conjugate_pair": term.uses_conjugate_pair,
        "shifted_matrix": matrix_to_json(term.matrix),
    }


# --- error remainder of the finite difference ---------------------------------


def finite_difference_bound(a, dt: float, eps_fd: float = 1.0) -> float:
    """Analytic bound on the finite-difference remainder of the protocol.

    Real: eps_fd (N dt^2 / 24) ||H(B)||^{N+2} / N!.  Complex: the same with
    ||H(A)||^{N-1} (||H(B)||^3 + ||H(C)||^3).  Evaluated in log space.
    """
    m = as_matrix(a)
    n = m.n
    if m.is_real:
        h = m.norms.ising_norm
        if h == 0.0:
            return 0.0
        log_bound = ((n + 2) * math.log(h) + math.log(n * dt**2 / 24.0)
                     - math.lgamma(n + 1))
        return eps_fd * math.exp(log_bound)
    ha = m.norms.ising_norm
    hb = float(np.abs(m.real_part).sum())
    hc = float(np.abs(m.imag_part).sum())
    if ha == 0.0:
        return 0.0
    log_bound = ((n - 1) * math.log(ha) + math.log(hb**3 + hc**3)
                 + math.log(n * dt**2 / 24.0) - math.lgamma(n + 1))
    return eps_fd * math.exp(log_bound)


# --- recombination and extrapolation ------------------------------------------


def recombine(terms, overlaps, cfg: ProtocolConfig, matrix=None) -> PermanentEstimate:
    """Weighted compensated sum of overlap values.

    Conjugate-paired terms contribute weight * Re(overlap); the rest use the
    full complex value.  When the source matrix is supplied the analytic
    finite-difference bound is attached as error_bound.
    """
    terms = list(terms)
    overlaps = list(overlaps)
    if len(terms) != len(overlaps):
        raise InvalidInputError(
            f"{len(overlaps)} overlaps supplied for {len(terms)} terms"
        )
    acc = KahanSum(0j)
    for term, overlap in zip(terms, overlaps):
        if term.uses_conjugate_pair:
            acc.add(term.weight * complex(overlap).real)
        else:
            acc.add(term.weight * complex(overlap))
    bound = finite_difference_bound(matrix, cfg.dt) if matrix is not None else None
    return PermanentEstimate(value=complex(acc.total), method="quantum_protocol",
                             error_bound=bound, wall_terms=len(terms),
                             extra={"dt": cfg.dt})


def run_protocol(a, cfg: ProtocolConfig, evaluator) -> PermanentEstimate:
    """Generate terms, evaluate every overlap, and recombine.

    evaluator(term, dt_half, index) -> complex overlap value; indices are
    assigned in term order so per-term seeds stay reproducible.
    """
    m = as_matrix(a)
    terms = generate_terms(m, cfg)
    overlaps = [evaluator(t, cfg.dt / 2.0, i) for i, t in enumerate(terms)]
    est = recombine(terms, overlaps, cfg, matrix=m)
    if cfg.mode == "hadamard_shots":
        est.samples_used = cfg.shots_per_overlap * len(terms)
    est.extra["overlaps"] = overlaps
    return est


def richardson_extrapolate(a, base_cfg: ProtocolConfig, levels: int,
                           evaluator) -> PermanentEstimate:
    """Richardson tableau in dt^2 over step sizes dt, dt/2, ..., dt/2^levels.

    The finite-difference remainder contains only even powers of dt, so the
    tableau entry T[i][m] = (4^m T[i][m-1] - T[i-1][m-1]) / (4^m - 1)
    eliminates the leading 2m-th order error.  Per-level estimates and the
    last-column residuals are reported so a non-dt^2 signal stays visible.
    """
    if levels < 0 or levels > _RICHARDSON_MAX_LEVELS:
        raise InvalidInputError(f"richardson levels must be in 0..{_RICHARDSON_MAX_LEVELS}")
    m = as_matrix(a)
    per_level = []
    for i in range(levels + 1):
        cfg_i = ProtocolConfig(
            dt=base_cfg.dt / 2**i, mode=base_cfg.mode,
            shots_per_overlap=base_cfg.shots_per_overlap,
            richardson_levels=0, seed=base_cfg.seed + i,
            halve_by_time_reversal=base_cfg.halve_by_time_reversal,
            allow_dt_override=base_cfg.allow_dt_override,
        )
        est = run_protocol(m, cfg_i, evaluator)
        per_level.append(est.value)

    tableau = [list(per_level)]
    for col in range(1, levels + 1):
        factor = 4.0**col
        prev = tableau[-1]
        tableau.append([
            (factor * prev[i] - prev[i - 1]) / (factor - 1.0)
            for i in range(1, len(prev))
        ])
    value = tableau[-1][-1]
    residuals = [abs(tableau[c][-1] - tableau[c - 1][-1]) for c in range(1, levels + 1)]
    bound = finite_difference_bound(m, base_cfg.dt / 2**levels)
    return PermanentEstimate(
        value=complex(value), method="quantum_protocol", error_bound=bound,
        wall_terms=len(generate_terms(m, base_cfg)) * (levels + 1),
        extra={"per_level": per_level, "residuals": residuals,
               "base_dt": base_cfg.dt, "levels": levels},
    )


# --- direct operator expectation ----------------------------------------------


def glynn_kan_operator_expectation(a) -> PermanentEstimate:
    """Per(A) as <phi|P H(A)^N|phi> / N! on the dense 2N-qubit state.

    Builds the uniform superposition over 2^{2N} basis states, applies the
    diagonal Ising operator N times, applies the parity operator, and takes
    the inner product with the uniform state.
    """
    m = as_matrix(a)
    n = m.n
    if n > _OPERATOR_MAX_N:
        raise DimensionTooLargeError(
            f"operator expectation capped at n <= {_OPERATOR_MAX_N} (state size 4^N)"
        )
    s = sign_matrix(2 * n)
    x = s[:, :n]           # spins of qubits 1..N
    xp = s[:, n:]          # spins of qubits N+1..2N
    diag = ((xp @ m.array) * x).sum(axis=1)          # <s|H(A)|s>
    parity = x.prod(axis=1) * xp.prod(axis=1)        # <s|P|s>
    amp = np.full(s.shape[0], 1.0 / 2**n, dtype=np.complex128)
    vec = amp.copy()
    for _ in range(n):
        vec = vec * diag
    vec = vec * parity
    value = complex(np.conj(amp) @ vec) / math.factorial(n)
    return PermanentEstimate(value=value, method="operator_expectation",
                             error_bound=0.0, wall_terms=4**n)
