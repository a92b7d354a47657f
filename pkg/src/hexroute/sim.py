"""Statevector simulation, calibration-derived Pauli noise, and sampling.

Bit convention is little-endian: qubit 0 is bit 0 of an outcome integer.
Noisy sampling uses trajectories (one pure state per shot, evolved in
vectorized batches): after each gate, with the gate-appropriate error
probability, a uniformly random non-identity Pauli hits the gate's qubits;
terminal measurement flips each bit independently with its readout error.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, pi, sin, sqrt

import numpy as np

from .circuit import GateKind, QuantumCircuit
from .device import CalibrationData, CouplingMap, Edge, edge_key

MAX_QUBITS = 20
DENSE_LIMIT = 14  # distributions wider than this go sparse

_SQ2 = 1.0 / sqrt(2.0)
_MAT_1Q = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * pi / 4)]], dtype=complex),
}
_PAULI = {
    1: _MAT_1Q[GateKind.X],
    2: _MAT_1Q[GateKind.Y],
    3: _MAT_1Q[GateKind.Z],
}


def _rotation(kind: GateKind, params: tuple[float, ...]) -> np.ndarray:
    if kind is GateKind.RX:
        (theta,) = params
        return np.array(
            [[cos(theta / 2), -1j * sin(theta / 2)], [-1j * sin(theta / 2), cos(theta / 2)]]
        )
    if kind is GateKind.RY:
        (theta,) = params
        return np.array(
            [[cos(theta / 2), -sin(theta / 2)], [sin(theta / 2), cos(theta / 2)]]
        )
    if kind is GateKind.RZ:
        (theta,) = params
        return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]])
    if kind is GateKind.U3:
        theta, phi, lam = params
        return np.array(
            [
                [cos(theta / 2), -np.exp(1j * lam) * sin(theta / 2)],
                [np.exp(1j * phi) * sin(theta / 2), np.exp(1j * (phi + lam)) * cos(theta / 2)],
            ]
        )
    raise ValueError(f"not a rotation: {kind}")  # pragma: no cover


def _matrix_1q(kind: GateKind, params: tuple[float, ...]) -> np.ndarray:
    return _MAT_1Q[kind] if kind in _MAT_1Q else _rotation(kind, params)


def _apply_1q(states: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix on qubit q. states: (..., 2**n)."""
    shape = states.shape
    arr = states.reshape(-1, *([2] * n))
    ax = 1 + (n - 1 - q)
    arr = np.moveaxis(arr, ax, -1)
    arr = arr @ mat.T
    return np.moveaxis(arr, -1, ax).reshape(shape)


def _apply_2q(states: np.ndarray, kind: GateKind, qa: int, qb: int, n: int) -> np.ndarray:
    shape = states.shape
    arr = states.reshape(-1, *([2] * n)).copy()
    axa, axb = 1 + (n - 1 - qa), 1 + (n - 1 - qb)

    def at(va, vb):
        idx = [slice(None)] * (n + 1)
        idx[axa], idx[axb] = va, vb
        return tuple(idx)

    if kind is GateKind.CNOT:
        arr[at(1, 0)], arr[at(1, 1)] = arr[at(1, 1)].copy(), arr[at(1, 0)].copy()
    elif kind is GateKind.CZ:
        arr[at(1, 1)] *= -1.0
    elif kind is GateKind.SWAP:
        arr[at(0, 1)], arr[at(1, 0)] = arr[at(1, 0)].copy(), arr[at(0, 1)].copy()
    else:  # pragma: no cover
        raise ValueError(f"not a two-qubit gate: {kind}")
    return arr.reshape(shape)


def _evolve(states: np.ndarray, circuit: QuantumCircuit) -> np.ndarray:
    n = circuit.num_qubits
    for g in circuit.gates:
        if g.kind is GateKind.BARRIER:
            continue
        if g.kind is GateKind.MEASURE:
            raise ValueError("cannot simulate MEASURE; strip with without_measurements")
        if g.kind in (GateKind.CNOT, GateKind.CZ, GateKind.SWAP):
            states = _apply_2q(states, g.kind, g.qubits[0], g.qubits[1], n)
        else:
            states = _apply_1q(states, _matrix_1q(g.kind, g.params), g.qubits[0], n)
    return states


def statevector(circuit: QuantumCircuit) -> np.ndarray:
    """Exact state after applying the circuit to |0...0>."""
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"statevector limited to {MAX_QUBITS} qubits, got {n}")
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    state = _evolve(state, circuit)
    assert abs(np.linalg.norm(state) - 1.0) < 1e-10, "statevector norm drifted"
    return state


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability mass over n-bit outcomes; dense array up to 14 qubits,
    sparse {outcome: prob} beyond."""

    num_qubits: int
    probs: object  # np.ndarray (dense) or dict[int, float] (sparse)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("distributions need at least one qubit")
        if self.dense:
            arr = np.asarray(self.probs, dtype=float)
            if arr.shape != (2**self.num_qubits,):
                raise ValueError("dense distribution has wrong length")
            arr.setflags(write=False)
            object.__setattr__(self, "probs", arr)
            total, low = arr.sum(), arr.min()
        else:
            object.__setattr__(
                self, "probs", {int(k): float(v) for k, v in self.probs.items() if v != 0.0}
            )
            total = sum(self.probs.values())
            low = min(self.probs.values(), default=0.0)
        if low < 0:
            raise ValueError("negative probability")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @property
    def dense(self) -> bool:
        return not isinstance(self.probs, dict)

    def prob(self, outcome: int) -> float:
        if self.dense:
            return float(self.probs[outcome])
        return self.probs.get(outcome, 0.0)

    def nonzero_items(self):
        if self.dense:
            (idx,) = np.nonzero(self.probs)
            return [(int(i), float(self.probs[i])) for i in idx]
        return sorted(self.probs.items())


def ideal_distribution(circuit: QuantumCircuit) -> Distribution:
    """Born-rule outcome distribution of the circuit's final state."""
    state = statevector(circuit)
    probs = np.abs(state) ** 2
    if circuit.num_qubits <= DENSE_LIMIT:
        return Distribution(circuit.num_qubits, probs)
    (idx,) = np.nonzero(probs)
    return Distribution(circuit.num_qubits, {int(i): float(probs[i]) for i in idx})


# ---------------------------------------------------------------------------
# noise


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing-Pauli gate noise plus readout bit flips.

    two_qubit maps each coupling edge to its CNOT error probability
    (1 - mu); single_qubit and readout are per-qubit (1 - sigma, 1 - rho).
    All probabilities must lie in [0, 0.5].
    """

    num_qubits: int
    two_qubit: dict[Edge, float]
    single_qubit: tuple[float, ...]
    readout: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "two_qubit", {edge_key(*e): float(v) for e, v in self.two_qubit.items()}
        )
        object.__setattr__(self, "single_qubit", tuple(self.single_qubit))
        object.__setattr__(self, "readout", tuple(self.readout))
        if len(self.single_qubit) != self.num_qubits or len(self.readout) != self.num_qubits:
            raise ValueError("per-qubit noise arrays must cover every qubit")
        for v in (
            list(self.two_qubit.values()) + list(self.single_qubit) + list(self.readout)
        ):
            if not 0.0 <= v <= 0.5:
                raise ValueError(f"noise probability {v} outside [0, 0.5]")

    @classmethod
    def from_calibration(cls, coupling: CouplingMap, calib: CalibrationData) -> "NoiseModel":
        calib.validate_against(coupling)
        n = coupling.num_qubits
        return cls(
            n,
            {e: 1.0 - calib.mu(*e) for e in coupling.edges},
            tuple(1.0 - calib.sigma(q) for q in range(n)),
            tuple(1.0 - calib.rho(q) for q in range(n)),
        )

    @classmethod
    def noiseless(cls, coupling: CouplingMap) -> "NoiseModel":
        n = coupling.num_qubits
        return cls(n, {e: 0.0 for e in coupling.edges}, (0.0,) * n, (0.0,) * n)

    @property
    def gate_noise_free(self) -> bool:
        return all(v == 0.0 for v in self.two_qubit.values()) and all(
            v == 0.0 for v in self.single_qubit
        )


@dataclass(frozen=True)
class Samples:
    """A measured multiset: outcomes are little-endian bitmask integers."""

    num_qubits: int
    outcomes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.outcomes, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", arr)

    def __len__(self) -> int:
        return len(self.outcomes)


def _gate_error(g, noise: NoiseModel) -> float:
    if g.kind is GateKind.CNOT:
        e = edge_key(*g.qubits)
        if e not in noise.two_qubit:
            raise ValueError(
                f"CNOT on {e} is not a coupling edge; route the circuit first"
            )
        return noise.two_qubit[e]
    if g.kind in (GateKind.CZ, GateKind.SWAP):
        raise ValueError(f"{g.kind.name} is not hardware-native; route the circuit first")
    return noise.single_qubit[g.qubits[0]]


def _inject_random_paulis(states: np.ndarray, qubits, err: float, rng, n: int) -> np.ndarray:
    """Per trajectory, with probability err, apply one uniformly random
    non-identity Pauli over `qubits` (a 1- or 2-qubit Pauli)."""
    m = states.shape[0]
    hit = rng.random(m) < err
    if len(qubits) == 2:
        pid = rng.integers(1, 16, size=m)
        plan = [(pid // 4, qubits[0]), (pid % 4, qubits[1])]
    else:
        pid = rng.integers(1, 4, size=m)
        plan = [(pid, qubits[0])]
    for codes, q in plan:
        for p in (1, 2, 3):
            mask = hit & (codes == p)
            if mask.any():
                states[mask] = _apply_1q(states[mask], _PAULI[p], q, n)
    return states


def sample_noisy(
    circuit: QuantumCircuit, noise: NoiseModel, shots: int, seed: int
) -> Samples:
    """Draw `shots` trajectory samples from the noisy circuit.

    Deterministic in `seed`: shots are evolved in fixed-size batches with a
    single RNG stream, consuming, per noisy gate, one uniform and one Pauli
    index per shot, then one uniform per shot for measurement and one per
    (shot, qubit) for readout flips.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = circuit.num_qubits
    if n != noise.num_qubits:
        raise ValueError("noise model and circuit disagree on qubit count")
    gates = [
        g
        for g in circuit.gates
        if g.kind not in (GateKind.MEASURE, GateKind.BARRIER)
    ]
    errs = [_gate_error(g, noise) for g in gates]
    rng = np.random.default_rng(seed)
    clean = QuantumCircuit(n, tuple(gates))
    if noise.gate_noise_free:
        probs = np.abs(statevector(clean)) ** 2
        probs /= probs.sum()
        outcomes = rng.choice(2**n, size=shots, p=probs).astype(np.int64)
    else:
        outcomes = np.empty(shots, dtype=np.int64)
        chunk = max(1, 2**22 // 2**n)
        for start in range(0, shots, chunk):
            m = min(chunk, shots - start)
            states = np.zeros((m, 2**n), dtype=complex)
            states[:, 0] = 1.0
            for g, err in zip(gates, errs):
                if g.kind is GateKind.CNOT:
                    states = _apply_2q(states, g.kind, g.qubits[0], g.qubits[1], n)
                else:
                    states = _apply_1q(states, _matrix_1q(g.kind, g.params), g.qubits[0], n)
                if err > 0.0:
                    states = _inject_random_paulis(states, g.qubits, err, rng, n)
            weights = np.abs(states) ** 2
            weights /= weights.sum(axis=1, keepdims=True)
            cum = np.cumsum(weights, axis=1)
            u = rng.random((m, 1))
            drawn = (cum < u).sum(axis=1)
            outcomes[start : start + m] = np.minimum(drawn, 2**n - 1)
    for q in range(n):
        if noise.readout[q] > 0.0:
            flips = rng.random(shots) < noise.readout[q]
            outcomes = outcomes ^ (flips.astype(np.int64) << q)
    return Samples(n, outcomes)


def empirical_distribution(samples: Samples) -> Distribution:
    """Outcome frequencies count/m."""
    if len(samples) == 0:
        raise ValueError("no samples")
    values, counts = np.unique(samples.outcomes, return_counts=True)
    m = len(samples)
    if samples.num_qubits <= DENSE_LIMIT:
        probs = np.zeros(2**samples.num_qubits)
        probs[values] = counts / m
        return Distribution(samples.num_qubits, probs)
    return Distribution(
        samples.num_qubits, {int(v): int(c) / m for v, c in zip(values, counts)}
    )


def relabel_bits(samples: Samples, positions) -> Samples:
    """Keep and reorder bits: output bit v is input bit positions[v]."""
    out = np.zeros_like(samples.outcomes)
    for v, p in enumerate(positions):
        out |= ((samples.outcomes >> p) & 1) << v
    return Samples(len(list(positions)), out)


def embed_virtual_state(psi: np.ndarray, v2p, num_physical: int) -> np.ndarray:
    """Place a k-qubit state onto physical wires: virtual v on wire v2p[v],
    all other wires |0>. Used to check routed circuits against originals."""
    v2p = list(v2p)
    k = len(v2p)
    if len(psi) != 2**k:
        raise ValueError("state length does not match mapping width")
    xs = np.arange(2**k)
    ys = np.zeros(2**k, dtype=np.int64)
    for v, p in enumerate(v2p):
        ys |= ((xs >> v) & 1) << p
    out = np.zeros(2**num_physical, dtype=complex)
    out[ys] = psi
    return out
