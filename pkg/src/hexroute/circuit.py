"""Circuit IR: gate sequences, their dependency DAG, layers, and CNOT metrics.

Contains:
    - GateKind / Gate: the fixed gate set (CNOT qubit order is (control, target))
    - QuantumCircuit: immutable ordered gate list on k qubits
    - DagCircuit: gates as nodes, per-qubit dependency edges
    - layering and the CNOT count / CNOT depth metrics

All types are frozen; passes return new circuits instead of mutating.
Bit convention is little-endian everywhere: qubit 0 is bit 0.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum


class GateKind(Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    U3 = "u3"
    CNOT = "cx"
    CZ = "cz"
    SWAP = "swap"
    MEASURE = "measure"
    BARRIER = "barrier"


TWO_QUBIT_KINDS = frozenset({GateKind.CNOT, GateKind.CZ, GateKind.SWAP})

# Gates diagonal in the Z basis (used by the shallow-circuit generator).
DIAGONAL_KINDS = frozenset(
    {GateKind.Z, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.RZ, GateKind.CZ}
)

_PARAM_ARITY = {GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1, GateKind.U3: 3}


class CircuitStructureError(ValueError):
    """A circuit or DAG violates a structural invariant."""


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbit: int | None = None  # MEASURE only: destination classical bit

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        nq = len(self.qubits)
        if self.kind in TWO_QUBIT_KINDS:
            if nq != 2:
                raise CircuitStructureError(f"{self.kind.name} needs 2 qubits, got {nq}")
        elif self.kind is GateKind.BARRIER:
            if nq not in (1, 2):
                raise CircuitStructureError("BARRIER acts on 1 or 2 qubits")
        elif nq != 1:
            raise CircuitStructureError(f"{self.kind.name} needs 1 qubit, got {nq}")
        if len(set(self.qubits)) != nq:
            raise CircuitStructureError(f"repeated qubit in {self.kind.name}{self.qubits}")
        want = _PARAM_ARITY.get(self.kind, 0)
        if len(self.params) != want:
            raise CircuitStructureError(
                f"{self.kind.name} takes {want} params, got {len(self.params)}"
            )
        if self.clbit is not None and self.kind is not GateKind.MEASURE:
            raise CircuitStructureError("clbit is only valid on MEASURE")


# Terse builders so circuits read like netlists.
def h(q: int) -> Gate: return Gate(GateKind.H, (q,))
def x(q: int) -> Gate: return Gate(GateKind.X, (q,))
def y(q: int) -> Gate: return Gate(GateKind.Y, (q,))
def z(q: int) -> Gate: return Gate(GateKind.Z, (q,))
def s(q: int) -> Gate: return Gate(GateKind.S, (q,))
def sdg(q: int) -> Gate: return Gate(GateKind.SDG, (q,))
def t(q: int) -> Gate: return Gate(GateKind.T, (q,))
def tdg(q: int) -> Gate: return Gate(GateKind.TDG, (q,))
def rx(q: int, theta: float) -> Gate: return Gate(GateKind.RX, (q,), (theta,))
def ry(q: int, theta: float) -> Gate: return Gate(GateKind.RY, (q,), (theta,))
def rz(q: int, theta: float) -> Gate: return Gate(GateKind.RZ, (q,), (theta,))
def u3(q: int, theta: float, phi: float, lam: float) -> Gate:
    return Gate(GateKind.U3, (q,), (theta, phi, lam))
def cnot(c: int, tg: int) -> Gate: return Gate(GateKind.CNOT, (c, tg))
def cz(a: int, b: int) -> Gate: return Gate(GateKind.CZ, (a, b))
def swap(a: int, b: int) -> Gate: return Gate(GateKind.SWAP, (a, b))
def measure(q: int, clbit: int | None = None) -> Gate:
    return Gate(GateKind.MEASURE, (q,), clbit=q if clbit is None else clbit)
def barrier(*qubits: int) -> Gate: return Gate(GateKind.BARRIER, qubits)


@dataclass(frozen=True)
class QuantumCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    num_clbits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 1:
            raise CircuitStructureError("num_qubits must be positive")
        if self.num_clbits < 0:
            raise CircuitStructureError("num_clbits must be nonnegative")
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitStructureError(
                        f"qubit {q} out of range for {self.num_qubits}-qubit circuit"
                    )
            if g.clbit is not None and not 0 <= g.clbit < self.num_clbits:
                raise CircuitStructureError(f"clbit {g.clbit} out of range")

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class DagCircuit:
    """Gates as nodes (identified by circuit position), edges labeled by qubit.

    For each qubit q the q-labeled edges form a single path visiting exactly
    the gates acting on q, in circuit order.
    """
    num_qubits: int
    gates: tuple[Gate, ...]
    edges: tuple[tuple[int, int, int], ...]  # (src, dst, qubit)
    _succ: dict = field(init=False, repr=False, compare=False)
    _pred: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        succ: dict[int, list[int]] = {i: [] for i in range(len(self.gates))}
        pred: dict[int, list[int]] = {i: [] for i in range(len(self.gates))}
        for a, b, _q in self.edges:
            succ[a].append(b)
            pred[b].append(a)
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)

    def successors(self, node: int) -> list[int]:
        return self._succ[node]

    def predecessors(self, node: int) -> list[int]:
        return self._pred[node]

    @property
    def num_nodes(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class Layer:
    """Gates that can run concurrently: qubit sets pairwise disjoint."""
    gates: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        seen: set[int] = set()
        for g in self.gates:
            for q in g.qubits:
                if q in seen:
                    raise CircuitStructureError(f"layer reuses qubit {q}")
                seen.add(q)


def to_dag(circuit: QuantumCircuit) -> DagCircuit:
    """Build the dependency DAG: an edge per consecutive pair of gates on a qubit."""
    last: dict[int, int] = {}
    edges = []
    for i, g in enumerate(circuit.gates):
        for q in g.qubits:
            if q in last:
                edges.append((last[q], i, q))
            last[q] = i
    return DagCircuit(circuit.num_qubits, circuit.gates, tuple(edges))


def topological_order(dag: DagCircuit) -> tuple[Gate, ...]:
    """Deterministic topological order; ties broken by original circuit position."""
    indeg = [len(dag.predecessors(i)) for i in range(dag.num_nodes)]
    ready = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(ready)
    out: list[Gate] = []
    while ready:
        i = heapq.heappop(ready)
        out.append(dag.gates[i])
        for j in dag.successors(i):
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    if len(out) != dag.num_nodes:
        raise CircuitStructureError("cycle detected in DAG circuit")
    return tuple(out)


def compute_layers(circuit: QuantumCircuit) -> list[Layer]:
    """Greedy as-soon-as-possible layering.

    A gate lands in the earliest layer after all gates it depends on. BARRIER
    is a fence: everything after it starts in a strictly later layer.
    """
    level = [0] * circuit.num_qubits
    floor = 0
    buckets: list[list[Gate]] = []

    def place(gate: Gate, at: int) -> None:
        while len(buckets) <= at:
            buckets.append([])
        buckets[at].append(gate)

    for g in circuit.gates:
        if g.kind is GateKind.BARRIER:
            at = max([floor] + level)
            place(g, at)
            floor = at + 1
        else:
            at = max([floor] + [level[q] for q in g.qubits])
            place(g, at)
            for q in g.qubits:
                level[q] = at + 1
    layers = [Layer(tuple(b)) for b in buckets]
    if sum(len(l.gates) for l in layers) != len(circuit.gates):
        raise CircuitStructureError("layering lost gates")  # pragma: no cover
    return layers


def _reject_swaps(circuit: QuantumCircuit, what: str) -> None:
    for g in circuit.gates:
        if g.kind is GateKind.SWAP:
            raise CircuitStructureError(
                f"{what} is undefined on circuits with SWAP gates; "
                "run decompose_swaps first"
            )


def cnot_count(circuit: QuantumCircuit) -> int:
    """Number of CNOT gates. Rejects undecomposed SWAPs (each hides 3 CNOTs)."""
    _reject_swaps(circuit, "cnot_count")
    return sum(1 for g in circuit.gates if g.kind is GateKind.CNOT)


def cnot_depth(circuit: QuantumCircuit) -> int:
    """Number of layers that contain at least one CNOT."""
    _reject_swaps(circuit, "cnot_depth")
    return sum(
        1
        for layer in compute_layers(circuit)
        if any(g.kind is GateKind.CNOT for g in layer.gates)
    )


def decompose_swaps(circuit: QuantumCircuit) -> QuantumCircuit:
    """Replace each SWAP(a,b) with CNOT(a,b) CNOT(b,a) CNOT(a,b)."""
    out: list[Gate] = []
    for g in circuit.gates:
        if g.kind is GateKind.SWAP:
            a, b = g.qubits
            out += [cnot(a, b), cnot(b, a), cnot(a, b)]
        else:
            out.append(g)
    return QuantumCircuit(circuit.num_qubits, tuple(out), circuit.num_clbits)


def without_measurements(circuit: QuantumCircuit) -> QuantumCircuit:
    """Drop MEASURE gates (simulation inputs must be unitary)."""
    kept = tuple(g for g in circuit.gates if g.kind is not GateKind.MEASURE)
    return QuantumCircuit(circuit.num_qubits, kept, circuit.num_clbits)
