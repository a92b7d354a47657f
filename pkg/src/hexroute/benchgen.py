"""Benchmark circuit generators: the deep / square / shallow classes.

deep    - layers of Pauli-string exponential gadgets; CNOT count grows
          linearly with the layer count.
square  - rounds of random pairings, each pair getting a fixed 4-u3 /
          3-CNOT two-qubit block, so the gate count depends on width only.
shallow - Z-diagonal middle section (T / RZ / sparse CZ) sandwiched
          between Hadamard walls; middle depth is capped at 2*log2(n).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import log2, pi

import numpy as np

from .circuit import Gate, QuantumCircuit, cnot, cz, h, rz, s, sdg, t, u3

CLASSES = ("deep", "square", "shallow")


@dataclass(frozen=True)
class BenchSpec:
    circuit_class: str
    num_qubits: int
    depth: int
    seed: int

    def __post_init__(self):
        if self.circuit_class not in CLASSES:
            raise ValueError(f"unknown circuit class {self.circuit_class!r}")
        if self.num_qubits < 2:
            raise ValueError("benchmark circuits need at least 2 qubits")
        if self.depth < 1:
            raise ValueError("depth parameter must be >= 1")


def pauli_gadget(pauli: str, theta: float) -> list[Gate]:
    """Gates implementing exp(-i theta/2 * P) for a Pauli string P.

    pauli[q] in "IXYZ" is qubit q's letter. Basis changes bring every
    non-identity letter to Z, a CNOT ladder folds parities onto the last
    non-identity qubit, and RZ(theta) lands there.
    """
    support = [q for q, c in enumerate(pauli) if c != "I"]
    if not support:
        raise ValueError("Pauli string must not be all identity")
    opening: list[Gate] = []
    closing: list[Gate] = []
    for q in support:
        c = pauli[q]
        if c == "X":
            opening.append(h(q))
            closing.append(h(q))
        elif c == "Y":
            opening += [sdg(q), h(q)]
            closing += [h(q), s(q)]
        elif c != "Z":
            raise ValueError(f"bad Pauli letter {c!r}")
    ladder = [cnot(support[i], support[i + 1]) for i in range(len(support) - 1)]
    return (
        opening
        + ladder
        + [rz(support[-1], theta)]
        + ladder[::-1]
        + list(reversed(closing))
    )


def gen_deep(n: int, depth: int, seed: int) -> QuantumCircuit:
    """`depth` random Pauli gadgets over n qubits."""
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(depth):
        while True:
            codes = rng.integers(0, 4, size=n)
            if codes.any():
                break
        pauli = "".join("IXYZ"[c] for c in codes)
        gates += pauli_gadget(pauli, float(rng.uniform(0.0, 2.0 * pi)))
    return QuantumCircuit(n, tuple(gates))


def _su4_block(a: int, b: int, rng) -> list[Gate]:
    angles = rng.uniform(0.0, 2.0 * pi, size=12)
    return [
        u3(a, *angles[0:3]),
        u3(b, *angles[3:6]),
        cnot(a, b),
        u3(a, *angles[6:9]),
        u3(b, *angles[9:12]),
        cnot(b, a),
        cnot(a, b),
    ]


def gen_square(n: int, seed: int) -> QuantumCircuit:
    """n rounds of random disjoint pairings, one two-qubit block per pair.

    Every block has 7 gates (4 u3 + 3 CNOT), so the total gate count is a
    function of n alone: n * (n // 2) * 7.
    """
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(n):
        perm = rng.permutation(n)
        for i in range(n // 2):
            gates += _su4_block(int(perm[2 * i]), int(perm[2 * i + 1]), rng)
    return QuantumCircuit(n, tuple(gates))


def shallow_middle_depth(n: int) -> int:
    """Middle-section layer count; stays within the 2*log2(n) cap."""
    return max(1, round(log2(n)))


def gen_shallow(n: int, seed: int) -> QuantumCircuit:
    """Hadamard wall, a few layers of Z-diagonal gates, Hadamard wall.

    Each middle layer applies CZ to a sparse random pairing plus T or RZ
    on some of the remaining qubits, so every qubit sees O(1) CZs total.
    """
    rng = np.random.default_rng(seed)
    layers = shallow_middle_depth(n)
    gates: list[Gate] = [h(q) for q in range(n)]
    cz_per_layer = min(n // 2, max(1, round(n / (2 * layers))))
    for _ in range(layers):
        perm = rng.permutation(n)
        for i in range(cz_per_layer):
            gates.append(cz(int(perm[2 * i]), int(perm[2 * i + 1])))
        for q in perm[2 * cz_per_layer :]:
            roll = rng.random()
            if roll < 1.0 / 3.0:
                gates.append(t(int(q)))
            elif roll < 2.0 / 3.0:
                gates.append(rz(int(q), float(rng.uniform(0.0, 2.0 * pi))))
    gates += [h(q) for q in range(n)]
    return QuantumCircuit(n, tuple(gates))


def circuit_seed(root_seed: int, circuit_class: str, n: int, index: int) -> int:
    """Stable per-circuit seed derived from the corpus seed."""
    ss = np.random.SeedSequence(
        root_seed, spawn_key=(CLASSES.index(circuit_class), n, index)
    )
    return int(ss.generate_state(1, np.uint64)[0])


def generate(spec: BenchSpec) -> QuantumCircuit:
    if spec.circuit_class == "deep":
        return gen_deep(spec.num_qubits, spec.depth, spec.seed)
    if spec.circuit_class == "square":
        return gen_square(spec.num_qubits, spec.seed)
    return gen_shallow(spec.num_qubits, spec.seed)


def gen_corpus(
    circuit_class: str,
    sizes,
    count: int,
    seed: int,
    depth: int | None = None,
) -> list[tuple[BenchSpec, QuantumCircuit]]:
    """Deterministic corpus: `count` circuits per size.

    `depth` sets the gadget count for deep circuits (default: the width n).
    For square and shallow the depth field records what the generator used
    (n rounds, and the middle-layer count, respectively).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out: list[tuple[BenchSpec, QuantumCircuit]] = []
    for n in sizes:
        for i in range(count):
            if circuit_class == "deep":
                d = depth if depth is not None else n
            elif circuit_class == "square":
                d = n
            else:
                d = shallow_middle_depth(n)
            spec = BenchSpec(circuit_class, n, d, circuit_seed(seed, circuit_class, n, i))
            out.append((spec, generate(spec)))
    return out


def corpus_gate_stats(corpus) -> list[dict]:
    """Per (class, n) summary of total gate counts, table-ready."""
    groups: dict[tuple[str, int], list[int]] = {}
    for spec, circuit in corpus:
        groups.setdefault((spec.circuit_class, spec.num_qubits), []).append(len(circuit))
    rows = []
    for (cls, n), counts in sorted(groups.items()):
        arr = np.asarray(counts)
        rows.append(
            {
                "class": cls,
                "n": n,
                "circuits": len(counts),
                "gates_min": int(arr.min()),
                "gates_max": int(arr.max()),
                "gates_mean": float(arr.mean()),
                "gates_std": float(arr.std()),
            }
        )
    return rows
