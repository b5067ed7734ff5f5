"""Gate-level circuits and statevector simulation for the overlap protocol.

Provides the Hadamard-test circuit construction (control ancilla on qubit
2N, system qubits 0..2N-1), a dense little-endian statevector simulator, an
exact fast-path overlap evaluator exploiting the diagonality of the Ising
propagator, and Bernoulli shot sampling of the ancilla.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooLargeError, InvalidInputError
from .matrices import as_matrix, sign_matrix

_MAX_QUBITS = 26
_OVERLAP_MAX_N = 13
_THETA_ELISION = 1e-15

_GATE_ARITY = {"H": 1, "SDG": 1, "X": 1, "RZ": 1, "CNOT": 2, "RZZ": 2, "CRZ": 2, "CRZZ": 3}
_GATE_HAS_THETA = {"RZ", "RZZ", "CRZ", "CRZZ"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    theta: float | None = None


@dataclass
class QuantumCircuit:
    """Ordered gate list over a fixed qubit register."""

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def _add(self, name: str, qubits: tuple[int, ...], theta: float | None = None) -> None:
        if len(set(qubits)) != len(qubits):
            raise InvalidInputError(f"{name}: qubit indices must be distinct, got {qubits}")
        if any(q < 0 or q >= self.num_qubits for q in qubits):
            raise InvalidInputError(f"{name}: qubit index out of range for {self.num_qubits} qubits")
        self.gates.append(Gate(name, qubits, theta))

    def h(self, q):
        self._add("H", (q,))

    def sdg(self, q):
        self._add("SDG", (q,))

    def x(self, q):
        self._add("X", (q,))

    def cnot(self, c, t):
        self._add("CNOT", (c, t))

    def rz(self, q, theta):
        self._add("RZ", (q,), float(theta))

    def rzz(self, q1, q2, theta):
        self._add("RZZ", (q1, q2), float(theta))

    def crz(self, c, t, theta):
        self._add("CRZ", (c, t), float(theta))

    def crzz(self, c, t1, t2, theta):
        self._add("CRZZ", (c, t1, t2), float(theta))

    def gate_counts(self) -> dict:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.name] = counts.get(g.name, 0) + 1
        return counts

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.name == "CNOT")

    def depth(self) -> int:
        """Greedy layering over disjoint qubit supports."""
        busy = [0] * self.num_qubits
        depth = 0
        for g in self.gates:
            layer = 1 + max(busy[q] for q in g.qubits)
            for q in g.qubits:
                busy[q] = layer
            depth = max(depth, layer)
        return depth

    def dumps(self) -> str:
        lines = [f"QUBITS {self.num_qubits}"]
        for g in self.gates:
            parts = [g.name] + [str(q) for q in g.qubits]
            if g.theta is not None:
                parts.append(repr(g.theta))
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "QuantumCircuit":
        lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
        if not lines or not lines[0].startswith("QUBITS "):
            raise InvalidInputError("circuit dump must start with a QUBITS header line")
        circ = cls(num_qubits=int(lines[0].split()[1]))
        for ln in lines[1:]:
            parts = ln.split()
            name = parts[0].upper()
            if name not in _GATE_ARITY:
                raise InvalidInputError(f"unknown gate {name!r}")
            arity = _GATE_ARITY[name]
            qubits = tuple(int(p) for p in parts[1 : 1 + arity])
            theta = float(parts[1 + arity]) if name in _GATE_HAS_THETA else None
            circ._add(name, qubits, theta)
        return circ


def _require_real(m) -> np.ndarray:
    sm = as_matrix(m)
    if not sm.is_real:
        raise InvalidInputError("shifted propagator matrices must be real")
    return sm.real_part


def build_propagator_circuit(m, dt_half: float) -> QuantumCircuit:
    """Ising propagator exp(-i H(M) dt_half) as N^2 RZZ gates.

    RZZ(theta) = exp(-i theta/2 ZZ), so entry M_pq couples qubits (q, N+p)
    with theta = 2 M_pq dt_half.  Gates with negligible angle are elided.
    """
    arr = _require_real(m)
    n = arr.shape[0]
    circ = QuantumCircuit(num_qubits=2 * n)
    for p in range(n):
        for q in range(n):
            theta = 2.0 * arr[p, q] * dt_half
            if abs(theta) < _THETA_ELISION:
                continue
            circ.rzz(q, n + p, theta)
    return circ


def build_hadamard_test(m, dt_half: float, measure_imag: bool = False,
                        synthesize: bool = True) -> QuantumCircuit:
    """Hadamard-test circuit for Re (or Im) of <phi|U(M; dt_half)|phi>.

    Ancilla is qubit 2N.  Each controlled-RZZ is synthesized as
    CNOT(t1,t2) CRZ(c,t2) CNOT(t1,t2), and each CRZ as two RZ plus two CNOT,
    giving 4 CNOTs per nonzero matrix entry (4N^2 for dense M); pass
    synthesize=False to keep native CRZZ gates.
    """
    arr = _require_real(m)
    n = arr.shape[0]
    anc = 2 * n
    circ = QuantumCircuit(num_qubits=2 * n + 1)
    circ.h(anc)
    if measure_imag:
        circ.sdg(anc)
    for k in range(2 * n):
        circ.h(k)
    for p in range(n):
        for q in range(n):
            theta = 2.0 * arr[p, q] * dt_half
            if abs(theta) < _THETA_ELISION:
                continue
            t1, t2 = q, n + p
            if not synthesize:
                circ.crzz(anc, t1, t2, theta)
                continue
            circ.cnot(t1, t2)
            circ.rz(t2, theta / 2.0)
            circ.cnot(anc, t2)
            circ.rz(t2, -theta / 2.0)
            circ.cnot(anc, t2)
            circ.cnot(t1, t2)
    circ.h(anc)
    return circ


# --- dense statevector simulation -------------------------------------------


def _bit(idx: np.ndarray, q: int) -> np.ndarray:
    return (idx >> q) & 1


def simulate_statevector(circ: QuantumCircuit) -> np.ndarray:
    """Exact dense simulation from |0...0>, little-endian qubit order."""
    nq = circ.num_qubits
    if nq > _MAX_QUBITS:
        raise DimensionTooLargeError(f"statevector simulation capped at {_MAX_QUBITS} qubits")
    size = 1 << nq
    state = np.zeros(size, dtype=np.complex128)
    state[0] = 1.0
    idx = np.arange(size)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)

    for g in circ.gates:
        name = g.name
        if name == "H":
            q = g.qubits[0]
            i0 = idx[_bit(idx, q) == 0]
            i1 = i0 + (1 << q)
            a0 = state[i0].copy()
            a1 = state[i1]
            state[i0] = (a0 + a1) * inv_sqrt2
            state[i1] = (a0 - a1) * inv_sqrt2
        elif name == "X":
            q = g.qubits[0]
            i0 = idx[_bit(idx, q) == 0]
            i1 = i0 + (1 << q)
            tmp = state[i0].copy()
            state[i0] = state[i1]
            state[i1] = tmp
        elif name == "SDG":
            q = g.qubits[0]
            state[_bit(idx, q) == 1] *= -1j
        elif name == "RZ":
            q = g.qubits[0]
            half = np.exp(-0.5j * g.theta)
            state *= np.where(_bit(idx, q) == 0, half, np.conj(half))
        elif name == "CNOT":
            c, t = g.qubits
            src = idx[(_bit(idx, c) == 1) & (_bit(idx, t) == 0)]
            dst = src + (1 << t)
            tmp = state[src].copy()
            state[src] = state[dst]
            state[dst] = tmp
        elif name == "RZZ":
            q1, q2 = g.qubits
            half = np.exp(-0.5j * g.theta)
            same = _bit(idx, q1) == _bit(idx, q2)
            state *= np.where(same, half, np.conj(half))
        elif name == "CRZ":
            c, t = g.qubits
            half = np.exp(-0.5j * g.theta)
            on = _bit(idx, c) == 1
            state *= np.where(on, np.where(_bit(idx, t) == 0, half, np.conj(half)), 1.0)
        elif name == "CRZZ":
            c, t1, t2 = g.qubits
            half = np.exp(-0.5j * g.theta)
            on = _bit(idx, c) == 1
            same = _bit(idx, t1) == _bit(idx, t2)
            state *= np.where(on, np.where(same, half, np.conj(half)), 1.0)
        else:  # pragma: no cover - gate set is closed
            raise InvalidInputError(f"unsupported gate {name!r}")
    return state


def ancilla_probability_zero(circ: QuantumCircuit, ancilla: int) -> float:
    state = simulate_statevector(circ)
    idx = np.arange(state.size)
    return float((np.abs(state[_bit(idx, ancilla) == 0]) ** 2).sum())


# --- overlap evaluation ------------------------------------------------------


@dataclass
class OverlapResult:
    """One evaluated overlap Re/Im pair with its sampling metadata."""

    real_part: float
    imag_part: float | None
    variance_estimate: float
    shots_used: int
    mode: str

    @property
    def value(self) -> complex:
        return complex(self.real_part, self.imag_part or 0.0)


def overlap_exact(m, dt_half: float) -> OverlapResult:
    """<phi|U(M; dt_half)|phi> by direct average over spin configurations.

    The propagator is diagonal, so the overlap is the mean of
    exp(-i dt_half x'^T M x) over all 4^N sign-vector pairs; evaluated in
    vectorized chunks over x'.
    """
    arr = _require_real(m)
    n = arr.shape[0]
    if n > _OVERLAP_MAX_N:
        raise DimensionTooLargeError(f"overlap_exact capped at n <= {_OVERLAP_MAX_N}")
    s = sign_matrix(n)
    total = 0j
    chunk = max(1, (1 << 22) // s.shape[0])
    for start in range(0, s.shape[0], chunk):
        sp = s[start : start + chunk]
        q = (sp @ arr) @ s.T
        total += complex(np.exp(-1j * dt_half * q).sum())
    val = total / 4**n
    return OverlapResult(real_part=float(val.real), imag_part=float(val.imag),
                         variance_estimate=0.0, shots_used=0, mode="exact")


def overlap_shots(m, dt_half: float, shots: int, seed: int,
                  measure_imag: bool = False) -> OverlapResult:
    """Shot-sampled Hadamard-test estimate of Re (or Im) of the overlap.

    Sampling draws from the exact ancilla marginal of the synthesized
    circuit, which is statistically identical to full-register sampling for
    this observable.
    """
    if shots < 1:
        raise InvalidInputError("shots must be >= 1")
    arr = _require_real(m)
    n = arr.shape[0]
    circ = build_hadamard_test(arr, dt_half, measure_imag=measure_imag)
    p0 = ancilla_probability_zero(circ, 2 * n)
    p0 = min(max(p0, 0.0), 1.0)
    rng = np.random.default_rng(seed)
    n0 = int(rng.binomial(shots, p0))
    est = (2 * n0 - shots) / shots
    result = OverlapResult(real_part=est, imag_part=None,
                           variance_estimate=(1.0 - est * est) / shots,
                           shots_used=shots, mode="shots")
    if measure_imag:
        result.real_part, result.imag_part = 0.0, est
    return result


def hoeffding_shots(epsilon_ht: float, delta: float) -> int:
    """Two-sided Hoeffding sample count for a +/-1-valued estimator."""
    if not (0.0 < epsilon_ht < 1.0) or not (0.0 < delta < 1.0):
        raise InvalidInputError("epsilon_ht and delta must lie in (0, 1)")
    return math.ceil(2.0 * math.log(2.0 / delta) / epsilon_ht**2)


# --- evaluators for the recombination protocol -------------------------------


def exact_overlap_evaluator():
    """Overlap evaluator callback computing the full complex value exactly."""

    def evaluate(term, dt_half: float, index: int) -> complex:
        return overlap_exact(term.matrix, dt_half).value

    return evaluate


def shot_overlap_evaluator(shots: int, seed: int):
    """Shot-mode evaluator; per-term seeds are derived as seed + index.

    Conjugate-paired terms only need the real part (one circuit); unpaired
    terms run the Sdg variant as well for the imaginary part.
    """

    def evaluate(term, dt_half: float, index: int) -> complex:
        re = overlap_shots(term.matrix, dt_half, shots, seed + index).real_part
        if term.uses_conjugate_pair:
            return complex(re, 0.0)
        im = overlap_shots(term.matrix, dt_half, shots, seed + index + 0x7FFF0001,
                           measure_imag=True).imag_part
        return complex(re, im)

    return evaluate
