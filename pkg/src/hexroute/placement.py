"""Initial placement: find a line of qubits through the device, pick the
most reliable window of it, and extend with leftover qubits when the
circuit is wider than the line.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import QuantumCircuit
from .device import CalibrationData, CouplingMap


class PlacementError(ValueError):
    pass


@dataclass(frozen=True)
class Mapping:
    """Injective virtual -> physical qubit assignment with its inverse."""

    virtual_to_physical: tuple[int, ...]
    num_physical: int
    _p2v: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "virtual_to_physical", tuple(self.virtual_to_physical)
        )
        p2v: dict[int, int] = {}
        for v, p in enumerate(self.virtual_to_physical):
            if not 0 <= p < self.num_physical:
                raise PlacementError(f"physical qubit {p} out of range")
            if p in p2v:
                raise PlacementError(f"physical qubit {p} assigned twice")
            p2v[p] = v
        object.__setattr__(self, "_p2v", p2v)

    @property
    def num_virtual(self) -> int:
        return len(self.virtual_to_physical)

    def physical(self, v: int) -> int:
        return self.virtual_to_physical[v]

    def virtual(self, p: int) -> int | None:
        return self._p2v.get(p)


@dataclass(frozen=True)
class QubitLine:
    """A simple path through the coupling map plus the qubits it missed."""

    sequence: tuple[int, ...]
    leftover: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))
        object.__setattr__(self, "leftover", frozenset(self.leftover))
        if set(self.sequence) & self.leftover:
            raise PlacementError("sequence and leftover overlap")
        if len(set(self.sequence)) != len(self.sequence):
            raise PlacementError("sequence repeats a qubit")


def find_line(coupling: CouplingMap, backtrack_budget: int | None = None) -> QubitLine:
    """Longest simple path found by DFS from qubit 0.

    Neighbors expand in ascending index order; dead ends backtrack (the
    popped qubit becomes available again). The search stops after
    backtrack_budget pops (default 10*n), which bounds the whole pass to
    linear work at the cost of possibly missing a longer line.
    """
    n = coupling.num_qubits
    budget = 10 * n if backtrack_budget is None else backtrack_budget
    path = [0]
    on_path = [False] * n
    on_path[0] = True
    cursor = [0]  # per-frame index into the sorted neighbor list
    best = [0]
    while True:
        frame = len(path) - 1
        nbrs = coupling.neighbors(path[frame])
        advanced = False
        while cursor[frame] < len(nbrs):
            cand = nbrs[cursor[frame]]
            cursor[frame] += 1
            if not on_path[cand]:
                path.append(cand)
                on_path[cand] = True
                cursor.append(0)
                if len(path) > len(best):
                    best = list(path)
                advanced = True
                break
        if advanced:
            continue
        if len(path) == 1 or budget <= 0:
            break
        on_path[path.pop()] = False
        cursor.pop()
        budget -= 1
    leftover = frozenset(range(n)) - set(best)
    return QubitLine(tuple(best), leftover)


def _window_product(seq: tuple[int, ...], calib: CalibrationData, start: int, k: int) -> float:
    prod = 1.0
    for i in range(start, start + k - 1):
        prod *= calib.mu(seq[i], seq[i + 1])
    return prod


def select_window(line: QubitLine, calib: CalibrationData, k: int) -> list[int]:
    """Contiguous length-k window of the line maximizing the product of
    consecutive-pair CNOT success rates; ties pick the smaller start."""
    seq = line.sequence
    if k > len(seq):
        raise PlacementError(
            f"window of {k} exceeds line length {len(seq)}; use extend_line"
        )
    best_start, best_prod = 0, -1.0
    for start in range(len(seq) - k + 1):
        prod = _window_product(seq, calib, start, k)
        if prod > best_prod:
            best_start, best_prod = start, prod
    return list(seq[best_start : best_start + k])


def extend_line(
    line: QubitLine, coupling: CouplingMap, calib: CalibrationData, k: int
) -> list[int]:
    """Grow the line to k qubits by inserting leftovers.

    Leftovers are scored rho(q) * mean(mu(q, m) over neighbors m) and
    inserted in descending score (ties by ascending index), each placed
    right after its best-mu neighbor already in the chain. Leftovers with
    no chained neighbor yet wait for a later round.
    """
    if k > coupling.num_qubits:
        raise PlacementError(
            f"circuit needs {k} qubits, device has {coupling.num_qubits}"
        )
    chain = list(line.sequence)
    if k < len(chain):
        raise PlacementError("extend_line needs k greater than the line length")

    def score(q: int) -> float:
        mus = [calib.mu(q, m) for m in coupling.neighbors(q)]
        return calib.rho(q) * (sum(mus) / len(mus))

    pending = sorted(line.leftover, key=lambda q: (-score(q), q))
    while len(chain) < k:
        chained = set(chain)
        placed = False
        for idx, q in enumerate(pending):
            anchors = [m for m in coupling.neighbors(q) if m in chained]
            if not anchors:
                continue
            pos_of = {p: i for i, p in enumerate(chain)}
            anchor = max(anchors, key=lambda m: (calib.mu(q, m), -pos_of[m]))
            chain.insert(pos_of[anchor] + 1, q)
            pending.pop(idx)
            placed = True
            break
        if not placed:  # pragma: no cover - impossible on a connected map
            raise PlacementError("no leftover qubit touches the chain")
    return chain


def place(circuit: QuantumCircuit, coupling: CouplingMap, calib: CalibrationData) -> Mapping:
    """Full placement pass: line, then window or extension, in index order."""
    k = circuit.num_qubits
    if k > coupling.num_qubits:
        raise PlacementError(
            f"circuit needs {k} qubits, device has {coupling.num_qubits}"
        )
    line = find_line(coupling)
    if k <= len(line.sequence):
        window = select_window(line, calib, k)
    else:
        window = extend_line(line, coupling, calib, k)
    return Mapping(tuple(window), coupling.num_qubits)
