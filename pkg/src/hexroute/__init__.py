"""hexroute: calibration-aware placement and SWAP routing for heavy-hex
devices, with benchmark generation, noisy sampling, and figures of merit."""

from .benchgen import BenchSpec, gen_corpus, gen_deep, gen_shallow, gen_square, pauli_gadget
from .circuit import (
    DagCircuit,
    Gate,
    GateKind,
    Layer,
    QuantumCircuit,
    cnot_count,
    cnot_depth,
    compute_layers,
    decompose_swaps,
    to_dag,
    topological_order,
    without_measurements,
)
from .device import (
    CalibrationData,
    CouplingMap,
    DeviceModel,
    DistanceMatrix,
    HotspotProfile,
    LognormalProfile,
    ReliabilityMatrix,
    UniformProfile,
    build_matrices,
    heavy_hex_7q,
    heavy_hex_map,
    heavy_hex_map_sized,
    ideal_calibration,
    load_calibration,
    load_coupling,
    normalize_for_scoring,
    swap_reliability,
    synthetic_calibration,
)
from .metrics import MeritReport, hellinger_fidelity, hog, l1_distance, merit_report
from .placement import Mapping, QubitLine, extend_line, find_line, place, select_window
from .qasm import QasmError, emit_qasm, parse_qasm
from .routing import RoutingParams, RoutingState, beam_search, candidate_swaps, route, score_swap
from .sim import (
    Distribution,
    NoiseModel,
    Samples,
    empirical_distribution,
    ideal_distribution,
    sample_noisy,
    statevector,
)

__version__ = "0.1.0"
