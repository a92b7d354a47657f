"""Noise-adaptive SWAP routing.

The pass walks the circuit DAG, emitting gates that are already executable
and collecting blocked CNOTs into a front layer. Candidate SWAPs touching
front-layer qubits are scored by a weighted mix of normalized swap-path
reliability and inverted normalized distance, averaged over the front layer
plus a small lookahead window:

    h(s) = mean over g of  alpha * Rn[pi_s(c), pi_s(t)]
                         + (1 - alpha) * (1 - Dn[pi_s(c), pi_s(t)])

A beam search (width beam_width, depth search_depth) picks the swap
sequence; it is applied up to the first step that makes a front gate
executable, and the loop repeats. If three consecutive rounds make no
front gate executable, the oldest front gate is routed greedily along a
shortest path, which guarantees termination.

Input CZ and SWAP gates are lowered to CNOT form first, so routed output
contains only single-qubit gates and CNOTs on coupling-map edges.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    DagCircuit,
    Gate,
    GateKind,
    QuantumCircuit,
    cnot,
    decompose_swaps,
    h,
    to_dag,
)
from .device import CouplingMap, DeviceModel, edge_key
from .placement import Mapping


class RoutingError(RuntimeError):
    pass


@dataclass(frozen=True)
class RoutingParams:
    alpha: float = 0.5
    beam_width: int = 4
    search_depth: int = 4
    lookahead: int = 5
    max_iterations: int = 0  # 0: derived from circuit size

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.beam_width < 1 or self.search_depth < 1:
            raise ValueError("beam_width and search_depth must be >= 1")
        if self.lookahead < 0:
            raise ValueError("lookahead must be >= 0")


@dataclass
class RoutingState:
    """Mutable bookkeeping for one routing run.

    Node ids are circuit positions. `executed` holds emitted nodes, `front`
    the blocked CNOTs under consideration; everything else is implicitly
    not executed yet. v2p/p2v are the evolving mapping (p2v is -1 on
    physical qubits that hold no virtual qubit).
    """

    v2p: list[int]
    p2v: list[int]
    executed: set[int] = field(default_factory=set)
    front: set[int] = field(default_factory=set)
    emitted: list[Gate] = field(default_factory=list)
    _indeg: list[int] = field(default_factory=list)
    _ready: list[int] = field(default_factory=list)
    _cursor: int = 0

    @classmethod
    def initial(cls, dag: DagCircuit, mapping: Mapping) -> "RoutingState":
        v2p = list(mapping.virtual_to_physical)
        p2v = [-1] * mapping.num_physical
        for v, p in enumerate(v2p):
            p2v[p] = v
        state = cls(v2p, p2v)
        state._indeg = [len(dag.predecessors(i)) for i in range(dag.num_nodes)]
        state._ready = [i for i, d in enumerate(state._indeg) if d == 0]
        heapq.heapify(state._ready)
        return state

    def not_executed(self, dag: DagCircuit) -> list[int]:
        return [
            i
            for i in range(dag.num_nodes)
            if i not in self.executed and i not in self.front
        ]


def lower_to_cnot(circuit: QuantumCircuit) -> QuantumCircuit:
    """Rewrite CZ as H-conjugated CNOT and SWAP as 3 CNOTs."""
    out: list[Gate] = []
    for g in circuit.gates:
        if g.kind is GateKind.CZ:
            a, b = g.qubits
            out += [h(b), cnot(a, b), h(b)]
        elif g.kind is GateKind.SWAP:
            a, b = g.qubits
            out += [cnot(a, b), cnot(b, a), cnot(a, b)]
        else:
            out.append(g)
    return QuantumCircuit(circuit.num_qubits, tuple(out), circuit.num_clbits)


def _emit(state: RoutingState, dag: DagCircuit, node: int) -> None:
    g = dag.gates[node]
    phys = tuple(state.v2p[q] for q in g.qubits)
    state.emitted.append(Gate(g.kind, phys, g.params, g.clbit))
    state.executed.add(node)
    for j in dag.successors(node):
        state._indeg[j] -= 1
        if state._indeg[j] == 0:
            heapq.heappush(state._ready, j)


def compute_front_layer(state: RoutingState, dag: DagCircuit, coupling: CouplingMap) -> None:
    """Emit everything executable and refill the front layer.

    Single-qubit gates (and barriers/measures) whose dependencies are
    emitted go straight out, remapped through the current mapping, as do
    CNOTs whose endpoints are adjacent. A blocked CNOT enters the front
    layer and keeps its successors pending.
    """
    for node in sorted(state.front):
        g = dag.gates[node]
        if coupling.has_edge(state.v2p[g.qubits[0]], state.v2p[g.qubits[1]]):
            state.front.discard(node)
            _emit(state, dag, node)
    while state._ready:
        node = heapq.heappop(state._ready)
        g = dag.gates[node]
        if g.kind is GateKind.CNOT:
            if coupling.has_edge(state.v2p[g.qubits[0]], state.v2p[g.qubits[1]]):
                _emit(state, dag, node)
            else:
                state.front.add(node)
        else:
            _emit(state, dag, node)


def _lookahead_gates(state: RoutingState, dag: DagCircuit, count: int) -> list[Gate]:
    """First `count` pending two-qubit gates past the front, in circuit order."""
    while state._cursor < dag.num_nodes and state._cursor in state.executed:
        state._cursor += 1
    out: list[Gate] = []
    for node in range(state._cursor, dag.num_nodes):
        if len(out) == count:
            break
        if node in state.executed or node in state.front:
            continue
        if dag.gates[node].kind is GateKind.CNOT:
            out.append(dag.gates[node])
    return out


def candidate_swaps(front_gates, v2p, coupling: CouplingMap) -> list[tuple[int, int]]:
    """Coupling edges touching at least one mapped front-layer qubit, sorted."""
    front_gates = list(front_gates)
    if not front_gates:
        raise RoutingError("candidate_swaps requires a nonempty front layer")
    phys = {v2p[q] for g in front_gates for q in g.qubits}
    cands = {edge_key(p, m) for p in phys for m in coupling.neighbors(p)}
    return sorted(cands)


def score_swap(
    swap: tuple[int, int],
    front_gates,
    lookahead_gates,
    rel_norm: np.ndarray,
    dist_norm: np.ndarray,
    alpha: float,
    v2p,
) -> float:
    """The heuristic h(s): higher is better. Evaluated with `swap` applied."""
    a, b = swap
    gates = list(front_gates) + list(lookahead_gates)
    total = 0.0
    for g in gates:
        pc, pt = v2p[g.qubits[0]], v2p[g.qubits[1]]
        if pc == a:
            pc = b
        elif pc == b:
            pc = a
        if pt == a:
            pt = b
        elif pt == b:
            pt = a
        total += alpha * rel_norm[pc, pt] + (1.0 - alpha) * (1.0 - dist_norm[pc, pt])
    return total / len(gates)


def beam_search(
    state: RoutingState, dag: DagCircuit, device: DeviceModel, params: RoutingParams
) -> list[tuple[int, int]]:
    """Pick a swap sequence for the current front layer.

    Explores sequences to depth search_depth, keeping the beam_width best
    per level. Nodes are ranked by the mean of their per-step h values
    plus 1 per front gate the sequence makes executable. A sequence that
    reaches executability is complete - the route applies swaps only up
    to first compliance - so such nodes become selection candidates and
    are not expanded further, leaving beam slots to still-searching
    alternatives (longer but more reliable detours survive this way).
    Ties break toward higher rank, then shorter, then lexicographically
    smaller sequences; undoing the previous swap is pruned.
    """
    coupling = device.coupling
    front_gates = [dag.gates[i] for i in sorted(state.front)]
    look = _lookahead_gates(state, dag, params.lookahead)

    def compliant(v2p) -> int:
        return sum(
            1
            for g in front_gates
            if coupling.has_edge(v2p[g.qubits[0]], v2p[g.qubits[1]])
        )

    def key_of(rank: float, swaps: list) -> tuple:
        return (-rank, len(swaps), swaps)

    beam = [([], [], state.v2p, state.p2v)]  # (swaps, h values, v2p, p2v)
    best_key = None
    best_swaps: list[tuple[int, int]] = []
    for _depth in range(params.search_depth):
        survivors = []
        for swaps, hs, v2p, p2v in beam:
            for cand in candidate_swaps(front_gates, v2p, coupling):
                if swaps and cand == swaps[-1]:
                    continue
                score = score_swap(
                    cand, front_gates, look, device.rel_norm, device.dist_norm,
                    params.alpha, v2p,
                )
                a, b = cand
                nv2p, np2v = list(v2p), list(p2v)
                va, vb = np2v[a], np2v[b]
                np2v[a], np2v[b] = vb, va
                if va >= 0:
                    nv2p[va] = b
                if vb >= 0:
                    nv2p[vb] = a
                nswaps = swaps + [cand]
                nhs = hs + [score]
                done = compliant(nv2p)
                rank = sum(nhs) / len(nhs) + done
                key = key_of(rank, nswaps)
                if done:
                    if best_key is None or key < best_key:
                        best_key, best_swaps = key, nswaps
                else:
                    survivors.append((key, nswaps, nhs, nv2p, np2v))
        survivors.sort(key=lambda c: c[0])
        beam = [(sw, hs, v2, p2) for _, sw, hs, v2, p2 in
                survivors[: params.beam_width]]
        if not beam:
            break
    if best_key is None and beam:
        # nothing reached compliance within the horizon: take the best
        # partial sequence and let the next round continue from there
        best_swaps = beam[0][0]
    return best_swaps


def _bfs_path(coupling: CouplingMap, src: int, dst: int) -> list[int]:
    parent = {src: src}
    queue = [src]
    while queue:
        nxt = []
        for p in queue:
            for m in coupling.neighbors(p):
                if m not in parent:
                    parent[m] = p
                    if m == dst:
                        path = [m]
                        while path[-1] != src:
                            path.append(parent[path[-1]])
                        return path[::-1]
                    nxt.append(m)
        queue = nxt
    raise RoutingError(f"no path between {src} and {dst}")  # pragma: no cover


def _greedy_swaps(state: RoutingState, dag: DagCircuit, coupling: CouplingMap) -> list:
    """Fallback: walk the oldest front gate's control along a shortest path."""
    node = min(state.front)
    g = dag.gates[node]
    path = _bfs_path(coupling, state.v2p[g.qubits[0]], state.v2p[g.qubits[1]])
    return [(path[i], path[i + 1]) for i in range(len(path) - 2)]


def _apply_swaps(state: RoutingState, swaps, dag: DagCircuit, coupling: CouplingMap) -> bool:
    for a, b in swaps:
        state.emitted.append(Gate(GateKind.SWAP, (a, b)))
        va, vb = state.p2v[a], state.p2v[b]
        state.p2v[a], state.p2v[b] = vb, va
        if va >= 0:
            state.v2p[va] = b
        if vb >= 0:
            state.v2p[vb] = a
    return any(
        coupling.has_edge(state.v2p[dag.gates[i].qubits[0]], state.v2p[dag.gates[i].qubits[1]])
        for i in state.front
    )


def route(
    circuit: QuantumCircuit,
    initial_mapping: Mapping,
    device: DeviceModel,
    params: RoutingParams | None = None,
) -> tuple[QuantumCircuit, Mapping]:
    """Make every two-qubit gate act on a coupling-map edge.

    Returns the routed physical circuit (single-qubit gates and CNOTs only;
    inserted SWAPs are decomposed to 3 CNOTs) and the final mapping, i.e.
    where each virtual qubit ended up. The output is equivalent to the
    input up to that final qubit permutation.
    """
    params = params or RoutingParams()
    n_phys = device.coupling.num_qubits
    if initial_mapping.num_virtual != circuit.num_qubits:
        raise RoutingError(
            f"mapping covers {initial_mapping.num_virtual} qubits, "
            f"circuit has {circuit.num_qubits}"
        )
    if initial_mapping.num_physical != n_phys:
        raise RoutingError("mapping and device disagree on physical qubit count")
    lowered = lower_to_cnot(circuit)
    dag = to_dag(lowered)
    state = RoutingState.initial(dag, initial_mapping)
    max_iter = params.max_iterations or (50 * max(dag.num_nodes, 1) + 1000)
    compute_front_layer(state, dag, device.coupling)
    stalled = 0
    iterations = 0
    while state.front:
        iterations += 1
        if iterations > max_iter:
            raise RoutingError(
                f"routing exceeded {max_iter} iterations; this is a bug"
            )
        if stalled >= 3:
            swaps = _greedy_swaps(state, dag, device.coupling)
            stalled = 0
        else:
            swaps = beam_search(state, dag, device, params)
        progressed = _apply_swaps(state, swaps, dag, device.coupling)
        stalled = 0 if progressed else stalled + 1
        compute_front_layer(state, dag, device.coupling)
    if len(state.executed) != dag.num_nodes:  # pragma: no cover
        raise RoutingError("routing finished with unprocessed gates")
    routed = decompose_swaps(
        QuantumCircuit(n_phys, tuple(state.emitted), circuit.num_clbits)
    )
    final = Mapping(tuple(state.v2p), n_phys)
    return routed, final
