"""Device model: coupling maps, calibration data, and the reliability /
distance tables that drive swap scoring.

Heavy-hexagon maps are built from horizontal rails of qubits joined by
vertical rungs (one extra qubit per rung). Labeling is row-major: rail 0
left to right, then the rungs below it, then rail 1, and so on. Full
lattices have vertex degrees 2-3; the size-targeted constructor trims
trailing qubits, which may leave degree-1 stubs on the boundary.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

Edge = tuple[int, int]


class DeviceError(ValueError):
    """Invalid coupling map or calibration data."""


def edge_key(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class CouplingMap:
    num_qubits: int
    edges: frozenset[Edge]
    _adj: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(edge_key(*e) for e in self.edges))
        adj: dict[int, list[int]] = {q: [] for q in range(self.num_qubits)}
        for i, j in self.edges:
            if i == j:
                raise DeviceError(f"self-loop on qubit {i}")
            if not (0 <= i < self.num_qubits and 0 <= j < self.num_qubits):
                raise DeviceError(f"edge ({i},{j}) out of range")
            adj[i].append(j)
            adj[j].append(i)
        for q in adj:
            adj[q].sort()
        object.__setattr__(self, "_adj", adj)
        if self.num_qubits > 1 and len(self._reachable_from_zero()) != self.num_qubits:
            raise DeviceError("coupling map must be connected")

    def _reachable_from_zero(self) -> set[int]:
        seen = {0}
        stack = [0]
        while stack:
            for m in self._adj[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return seen

    def neighbors(self, q: int) -> list[int]:
        return self._adj[q]

    def degree(self, q: int) -> int:
        return len(self._adj[q])

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self.edges


def heavy_hex_map(rows: int, cols: int) -> CouplingMap:
    """Heavy-hex lattice of rows x cols hexagonal cells.

    rows+1 rails of width 4*cols+1; the gap below rail r carries rungs at
    columns 0,4,8,... when r is even and 2,6,10,... when r is odd. Every
    qubit sits on a hexagon node or edge midpoint; degrees are 2 or 3.
    rows=cols=1 gives the single 12-qubit hexagon ring.
    """
    if rows < 1 or cols < 1:
        raise DeviceError("rows and cols must be >= 1")
    width = 4 * cols + 1
    label = 0
    rail_label: list[list[int]] = []
    rung_label: list[dict[int, int]] = []
    for r in range(rows + 1):
        rail_label.append(list(range(label, label + width)))
        label += width
        if r < rows:
            cols_r = range(0, width, 4) if r % 2 == 0 else range(2, width - 1, 4)
            rung_label.append({c: label + k for k, c in enumerate(cols_r)})
            label += len(rung_label[-1])
    edges: set[Edge] = set()
    for r in range(rows + 1):
        for c in range(width - 1):
            edges.add(edge_key(rail_label[r][c], rail_label[r][c + 1]))
    for r in range(rows):
        for c, mid in rung_label[r].items():
            edges.add(edge_key(rail_label[r][c], mid))
            edges.add(edge_key(mid, rail_label[r + 1][c]))
    return CouplingMap(label, frozenset(edges))


def _heavy_hex_size(rows: int, cols: int) -> int:
    width = 4 * cols + 1
    rungs = (rows + 1) // 2 * (cols + 1) + rows // 2 * cols
    return (rows + 1) * width + rungs


def heavy_hex_map_sized(num_qubits: int) -> CouplingMap:
    """Smallest heavy-hex lattice with at least num_qubits qubits, trimmed
    down to exactly num_qubits.

    Trimming repeatedly removes the highest-labeled qubit whose removal
    keeps the graph connected, then relabels contiguously. This covers the
    typical device sizes (27, 65, 127, 433) that full lattices miss.
    """
    if num_qubits < 12:
        raise DeviceError("heavy-hex maps need at least 12 qubits (one hexagon)")
    best: tuple[int, int, int, int] | None = None  # (trim, aspect miss, rows, cols)
    for cols in range(1, 32):
        rows = 1
        while _heavy_hex_size(rows, cols) < num_qubits:
            rows += 1
        trim = _heavy_hex_size(rows, cols) - num_qubits
        cand = (trim, abs(rows - 2 * cols), rows, cols)
        if best is None or cand < best:
            best = cand
    assert best is not None
    full = heavy_hex_map(best[2], best[3])
    keep = set(range(full.num_qubits))
    adj = {q: set(full.neighbors(q)) for q in range(full.num_qubits)}

    def connected_without(drop: int) -> bool:
        rest = keep - {drop}
        if not rest:
            return True
        start = next(iter(rest))
        seen = {start}
        stack = [start]
        while stack:
            for m in adj[stack.pop()]:
                if m != drop and m in rest and m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == len(rest)

    while len(keep) > num_qubits:
        for q in sorted(keep, reverse=True):
            if connected_without(q):
                keep.discard(q)
                for m in adj[q]:
                    adj[m].discard(q)
                break
        else:  # pragma: no cover - a connected graph always has a removable vertex
            raise DeviceError("could not trim lattice")
    relabel = {old: new for new, old in enumerate(sorted(keep))}
    edges = frozenset(
        edge_key(relabel[i], relabel[j]) for i, j in full.edges if i in keep and j in keep
    )
    return CouplingMap(num_qubits, edges)


def heavy_hex_7q() -> CouplingMap:
    """The 7-qubit H-shaped heavy-hex fragment (two degree-3 sites).

        0 - 1 - 2
            |
            3
            |
        4 - 5 - 6
    """
    return CouplingMap(7, frozenset({(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)}))


# ---------------------------------------------------------------------------
# calibration


@dataclass(frozen=True)
class CalibrationData:
    """Per-edge CNOT success rates plus per-qubit readout/single-qubit rates."""

    cnot_success: dict[Edge, float]
    readout_fidelity: tuple[float, ...]
    single_qubit_success: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "cnot_success", {edge_key(*e): v for e, v in self.cnot_success.items()}
        )
        object.__setattr__(self, "readout_fidelity", tuple(self.readout_fidelity))
        object.__setattr__(self, "single_qubit_success", tuple(self.single_qubit_success))
        for e, v in self.cnot_success.items():
            _check_rate(v, f"cnot[{e}]")
        for q, v in enumerate(self.readout_fidelity):
            _check_rate(v, f"readout[{q}]")
        for q, v in enumerate(self.single_qubit_success):
            _check_rate(v, f"single_qubit[{q}]")

    def mu(self, i: int, j: int) -> float:
        key = edge_key(i, j)
        if key not in self.cnot_success:
            raise DeviceError(f"no CNOT calibration for edge {key}")
        return self.cnot_success[key]

    def rho(self, q: int) -> float:
        return self.readout_fidelity[q]

    def sigma(self, q: int) -> float:
        return self.single_qubit_success[q]

    def validate_against(self, coupling: CouplingMap) -> None:
        for e in sorted(coupling.edges):
            if e not in self.cnot_success:
                raise DeviceError(f"cnot: missing entry for edge {e}")
        for name, seq in (
            ("readout", self.readout_fidelity),
            ("single_qubit", self.single_qubit_success),
        ):
            if len(seq) != coupling.num_qubits:
                raise DeviceError(
                    f"{name}[{len(seq)}]: expected {coupling.num_qubits} entries"
                )


def _check_rate(v: float, where: str) -> None:
    if not (isinstance(v, (int, float)) and 0.0 < v <= 1.0):
        raise DeviceError(f"{where}: rate {v!r} outside (0, 1]")


def load_coupling(path) -> CouplingMap:
    """Read a coupling map from `{"num_qubits": n, "edges": [[i,j], ...]}`."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        n = int(raw["num_qubits"])
        edges = frozenset(edge_key(int(i), int(j)) for i, j in raw["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DeviceError(f"malformed coupling map file: {exc}") from exc
    return CouplingMap(n, edges)


def write_coupling(coupling: CouplingMap, path) -> None:
    payload = {
        "num_qubits": coupling.num_qubits,
        "edges": [list(e) for e in sorted(coupling.edges)],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_calibration(path, coupling: CouplingMap) -> CalibrationData:
    """Read calibration JSON and validate it covers the coupling map.

    Schema: `{"num_qubits": n, "cnot": [{"edge": [i, j], "success": f}, ...],
    "readout": [f per qubit], "single_qubit": [f per qubit]}`.
    Errors name the offending field, e.g. `readout[3]`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if int(raw.get("num_qubits", -1)) != coupling.num_qubits:
        raise DeviceError(
            f"num_qubits: calibration says {raw.get('num_qubits')}, "
            f"device has {coupling.num_qubits}"
        )
    cnot: dict[Edge, float] = {}
    for k, entry in enumerate(raw.get("cnot", [])):
        try:
            e = edge_key(int(entry["edge"][0]), int(entry["edge"][1]))
            v = float(entry["success"])
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise DeviceError(f"cnot[{k}]: malformed entry ({exc})") from exc
        if e not in coupling.edges:
            raise DeviceError(f"cnot[{k}]: edge {e} not in coupling map")
        _check_rate(v, f"cnot[{k}].success")
        cnot[e] = v
    for name in ("readout", "single_qubit"):
        seq = raw.get(name)
        if not isinstance(seq, list) or len(seq) != coupling.num_qubits:
            raise DeviceError(f"{name}: expected {coupling.num_qubits} rates")
    calib = CalibrationData(cnot, tuple(raw["readout"]), tuple(raw["single_qubit"]))
    calib.validate_against(coupling)
    return calib


def write_calibration(calib: CalibrationData, path) -> None:
    payload = {
        "num_qubits": len(calib.readout_fidelity),
        "cnot": [
            {"edge": list(e), "success": v} for e, v in sorted(calib.cnot_success.items())
        ],
        "readout": list(calib.readout_fidelity),
        "single_qubit": list(calib.single_qubit_success),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def ideal_calibration(coupling: CouplingMap) -> CalibrationData:
    """All rates exactly 1 (noiseless device)."""
    n = coupling.num_qubits
    return CalibrationData({e: 1.0 for e in coupling.edges}, (1.0,) * n, (1.0,) * n)


# Synthetic profiles stand in for real calibration snapshots.
@dataclass(frozen=True)
class UniformProfile:
    mu: float = 0.99


@dataclass(frozen=True)
class LognormalProfile:
    """CNOT error rates 1-mu drawn lognormally (underlying normal mean/sd)."""
    mean: float = -4.5
    sd: float = 0.5


@dataclass(frozen=True)
class HotspotProfile:
    bad_edges: tuple[tuple[Edge, float], ...]
    base: float = 0.99

    def __post_init__(self):
        object.__setattr__(
            self, "bad_edges", tuple((edge_key(*e), v) for e, v in dict(self.bad_edges).items())
        )


_RATE_LO, _RATE_HI = 0.5, float(np.nextafter(1.0, 0.0))


def _clamp(v: float) -> float:
    return min(max(float(v), _RATE_LO), _RATE_HI)


def synthetic_calibration(coupling: CouplingMap, seed: int, profile) -> CalibrationData:
    """Deterministic synthetic calibration; rates clamped to [0.5, 1.0).

    Readout and single-qubit rates are derived from the same error scale as
    the CNOTs: single-qubit errors at a tenth of the CNOT error, readout at
    half of it.
    """
    rng = np.random.default_rng(seed)
    edges = sorted(coupling.edges)
    n = coupling.num_qubits
    if isinstance(profile, UniformProfile):
        mu = {e: _clamp(profile.mu) for e in edges}
        base = profile.mu
        sigma = [_clamp(1 - (1 - base) / 10)] * n
        rho = [_clamp(1 - (1 - base) / 2)] * n
    elif isinstance(profile, LognormalProfile):
        errs = rng.lognormal(profile.mean, profile.sd, size=len(edges))
        mu = {e: _clamp(1 - err) for e, err in zip(edges, errs)}
        sigma = [_clamp(1 - err) for err in rng.lognormal(profile.mean, profile.sd, size=n) / 10]
        rho = [_clamp(1 - err) for err in rng.lognormal(profile.mean, profile.sd, size=n) / 2]
    elif isinstance(profile, HotspotProfile):
        bad = dict(profile.bad_edges)
        for e in bad:
            if e not in coupling.edges:
                raise DeviceError(f"hotspot edge {e} not in coupling map")
        mu = {e: _clamp(bad.get(e, profile.base)) for e in edges}
        sigma = [_clamp(1 - (1 - profile.base) / 10)] * n
        rho = [_clamp(1 - (1 - profile.base) / 2)] * n
    else:
        raise DeviceError(f"unknown calibration profile {profile!r}")
    return CalibrationData(mu, tuple(rho), tuple(sigma))


# ---------------------------------------------------------------------------
# reliability / distance tables


def swap_reliability(calib: CalibrationData, edge: Edge) -> float:
    """Success rate of one SWAP across an edge: mu^3 (a SWAP is 3 CNOTs)."""
    mu = calib.mu(*edge)
    return mu * mu * mu


@dataclass(frozen=True)
class ReliabilityMatrix:
    """values[i][j]: best success product of a swap path making i and j adjacent."""
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class DistanceMatrix:
    """values[i][j]: fewest swaps needed to make i and j adjacent."""
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


def build_matrices(
    coupling: CouplingMap, calib: CalibrationData, include_readout: bool = False
) -> tuple[ReliabilityMatrix, DistanceMatrix]:
    """All-pairs tables via Floyd-Warshall.

    Reliability runs on the max-product semiring and distance on min-plus;
    a final pass minimizes over the neighbors of the destination (adjacent
    pairs need no swaps, so they get reliability 1 / distance 0). Both
    tables are symmetrized: either endpoint may be the one that moves.

    Products are taken directly (no log transform): with rates >= 0.5 and
    device diameters in the hundreds they stay far above double underflow,
    and direct products keep entries exactly equal to per-path products.

    include_readout folds each endpoint's readout fidelity into the
    per-swap rate (off by default; the swap itself involves no readout).
    """
    calib.validate_against(coupling)
    n = coupling.num_qubits
    prod = np.zeros((n, n))
    np.fill_diagonal(prod, 1.0)
    hops = np.full((n, n), n * n, dtype=np.int64)
    np.fill_diagonal(hops, 0)
    for i, j in coupling.edges:
        r = swap_reliability(calib, (i, j))
        if include_readout:
            r *= calib.rho(i) * calib.rho(j)
        prod[i, j] = prod[j, i] = r
        hops[i, j] = hops[j, i] = 1
    for k in range(n):
        np.maximum(prod, np.outer(prod[:, k], prod[k, :]), out=prod)
        np.minimum(hops, hops[:, k, None] + hops[None, k, :], out=hops)
    rel = np.empty((n, n))
    dist = np.empty((n, n), dtype=np.int64)
    for j in range(n):
        nbrs = coupling.neighbors(j)
        rel[:, j] = prod[:, nbrs].max(axis=1)
        dist[:, j] = hops[:, nbrs].min(axis=1)
    rel = np.maximum(rel, rel.T)
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(rel, 1.0)
    np.fill_diagonal(dist, 0)
    return ReliabilityMatrix(rel), DistanceMatrix(dist)


def normalize_for_scoring(
    rel: ReliabilityMatrix, dist: DistanceMatrix
) -> tuple[np.ndarray, np.ndarray]:
    """Min-max normalize both tables onto [0, 1].

    Adjacent entries anchor the ends: reliability 1 stays 1 and distance 0
    stays 0. A constant reliability table maps to all ones and a constant
    distance table to all zeros, so ideal devices score every swap equally.
    """
    r = rel.values
    lo = r.min()
    rel_n = np.ones_like(r) if lo >= 1.0 else (r - lo) / (1.0 - lo)
    d = dist.values.astype(float)
    hi = d.max()
    dist_n = np.zeros_like(d) if hi <= 0 else d / hi
    rel_n.setflags(write=False)
    dist_n.setflags(write=False)
    return rel_n, dist_n


@dataclass(frozen=True)
class DeviceModel:
    """A coupling map with calibration and the precomputed scoring tables.

    Built once per calibration snapshot; immutable afterwards, so many
    compilations can share one instance.
    """

    coupling: CouplingMap
    calibration: CalibrationData
    reliability: ReliabilityMatrix
    distance: DistanceMatrix
    rel_norm: np.ndarray
    dist_norm: np.ndarray

    @classmethod
    def build(
        cls, coupling: CouplingMap, calib: CalibrationData, include_readout: bool = False
    ) -> "DeviceModel":
        rel, dist = build_matrices(coupling, calib, include_readout=include_readout)
        rel_n, dist_n = normalize_for_scoring(rel, dist)
        return cls(coupling, calib, rel, dist, rel_n, dist_n)
