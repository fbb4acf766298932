"""Gate counts, depth and growth fits for emitted circuits."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from digispread.qsim import GATE_KINDS, Circuit

ROTATION_KINDS = frozenset({"RY", "CRY"})


@dataclass(frozen=True)
class ResourceReport:
    counts: dict[str, int]
    total: int
    depth: int
    num_qubits: int
    ancillas: int
    # amplitude-estimation runs needed to read the result out; >1 when the
    # output is a multi-bit register rather than a single flag qubit
    qae_instances: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def rotation_free(self) -> bool:
        return not any(self.counts.get(k, 0) for k in ROTATION_KINDS)

    def flat(self) -> dict:
        out = {f"gates_{k}": self.counts.get(k, 0) for k in GATE_KINDS}
        out.update(
            gate_count=self.total,
            depth=self.depth,
            num_qubits=self.num_qubits,
            ancillas=self.ancillas,
            qae_instances=self.qae_instances,
        )
        return out

    def to_dict(self) -> dict:
        return asdict(self)


def circuit_depth(circuit: Circuit) -> int:
    """Longest chain of gates where two gates conflict iff they share a qubit."""
    level = [0] * circuit.num_qubits
    for g in circuit.gates:
        qs = g.qubits
        d = max(level[q] for q in qs) + 1
        for q in qs:
            level[q] = d
    return max(level, default=0)


def resource_report(circuit: Circuit, qae_instances: int | None = None) -> ResourceReport:
    counts: dict[str, int] = {}
    for g in circuit.gates:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    layout = circuit.layout
    data = set(layout.value or ())
    if layout.target is not None:
        data.add(layout.target)
    if qae_instances is None:
        # an unconsolidated sum register needs one estimation per output bit
        qae_instances = len(layout.sum) if layout.target is None and layout.sum else 1
    return ResourceReport(
        counts=dict(sorted(counts.items())),
        total=len(circuit.gates),
        depth=circuit_depth(circuit),
        num_qubits=circuit.num_qubits,
        ancillas=circuit.num_qubits - len(data),
        qae_instances=qae_instances,
    )


def growth_exponent(ns: Sequence[float], ys: Sequence[float]) -> float:
    """Slope of ``log y`` against ``log n``."""
    slope, _ = np.polyfit(np.log(ns), np.log(ys), 1)
    return float(slope)


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares line; returns ``(slope, intercept, r_squared)``."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
