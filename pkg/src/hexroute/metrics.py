"""Figures of merit comparing a sampled distribution D against the ideal p:
Hellinger fidelity, heavy-output generation, l1 distance, plus the CNOT
count and CNOT depth of the compiled circuit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import QuantumCircuit, cnot_count, cnot_depth
from .sim import Distribution


def _check_space(d: Distribution, p: Distribution) -> None:
    if d.num_qubits != p.num_qubits:
        raise ValueError(
            f"outcome spaces differ: {d.num_qubits} vs {p.num_qubits} qubits"
        )


def hellinger_fidelity(d: Distribution, p: Distribution) -> float:
    """(sum_x sqrt(D(x) p(x)))^2; 1 iff the distributions coincide."""
    _check_space(d, p)
    if d.dense and p.dense:
        return float(np.sqrt(d.probs * p.probs).sum() ** 2)
    total = sum(np.sqrt(val * p.prob(x)) for x, val in d.nonzero_items())
    return float(total**2)


def _median_of_all(p: Distribution) -> float:
    """Median over all 2^n outcome probabilities, zeros included; even
    counts average the two central order statistics."""
    size = 2**p.num_qubits
    lo_i, hi_i = size // 2 - 1, size // 2
    if p.dense:
        part = np.partition(p.probs, (lo_i, hi_i))
        return float((part[lo_i] + part[hi_i]) / 2.0)
    nonzero = sorted(v for _, v in p.nonzero_items())
    zeros = size - len(nonzero)

    def stat(i: int) -> float:
        return 0.0 if i < zeros else nonzero[i - zeros]

    return (stat(lo_i) + stat(hi_i)) / 2.0


def hog(d: Distribution, p: Distribution) -> float:
    """Probability that D lands on outcomes strictly above the median of p."""
    _check_space(d, p)
    med = _median_of_all(p)
    if d.dense and p.dense:
        return float(d.probs[p.probs > med].sum())
    return sum(val for x, val in d.nonzero_items() if p.prob(x) > med)


def l1_distance(d: Distribution, p: Distribution) -> float:
    """sum_x |D(x) - p(x)|, between 0 and 2."""
    _check_space(d, p)
    if d.dense and p.dense:
        return float(np.abs(d.probs - p.probs).sum())
    support = {x for x, _ in d.nonzero_items()} | {x for x, _ in p.nonzero_items()}
    return sum(abs(d.prob(x) - p.prob(x)) for x in support)


@dataclass(frozen=True)
class MeritReport:
    hellinger_fidelity: float
    hog: float
    l1: float
    cnot_count: int
    cnot_depth: int

    def __post_init__(self):
        if not 0.0 <= self.hellinger_fidelity <= 1.0 + 1e-12:
            raise ValueError(f"fidelity {self.hellinger_fidelity} out of range")
        if not 0.0 <= self.hog <= 1.0 + 1e-12:
            raise ValueError(f"hog {self.hog} out of range")
        if not 0.0 <= self.l1 <= 2.0 + 1e-12:
            raise ValueError(f"l1 {self.l1} out of range")
        if self.cnot_count < 0 or self.cnot_depth < 0:
            raise ValueError("negative CNOT metrics")


def merit_report(
    routed: QuantumCircuit, d: Distribution, p: Distribution
) -> MeritReport:
    """All five figures of merit for one compiled run."""
    return MeritReport(
        hellinger_fidelity=hellinger_fidelity(d, p),
        hog=hog(d, p),
        l1=l1_distance(d, p),
        cnot_count=cnot_count(routed),
        cnot_depth=cnot_depth(routed),
    )
