"""Text/JSON circuit dumps and the PMF file format.

Text form, one gate per line, controls before target::

    CCX q[0] q[1] q[2]
    CRY q[0] q[3] 0.02
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from digispread.circuits import Pmf
from digispread.errors import StructuralError
from digispread.qsim import Circuit, Gate, RegisterLayout

_QUBIT = re.compile(r"^q\[(\d+)\]$")


def circuit_to_text(circuit: Circuit) -> str:
    lines = [f"# qubits {circuit.num_qubits}"]
    for g in circuit.gates:
        parts = [g.kind] + [f"q[{q}]" for q in g.qubits]
        if g.angle is not None:
            parts.append(repr(g.angle))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    num_qubits = None
    gates = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*qubits\s+(\d+)", line)
            if m:
                num_qubits = int(m.group(1))
            continue
        kind, *rest = line.split()
        angle = None
        if rest and not _QUBIT.match(rest[-1]):
            angle = float(rest.pop())
        qubits = []
        for tok in rest:
            m = _QUBIT.match(tok)
            if not m:
                raise StructuralError(f"bad qubit token {tok!r} in {raw!r}")
            qubits.append(int(m.group(1)))
        if not qubits:
            raise StructuralError(f"gate without qubits: {raw!r}")
        gates.append(Gate(kind, qubits[-1], tuple(qubits[:-1]), angle))
    if num_qubits is None:
        num_qubits = 1 + max((max(g.qubits) for g in gates), default=0)
    return Circuit(num_qubits, gates)


def circuit_to_json(circuit: Circuit) -> dict:
    return {
        "num_qubits": circuit.num_qubits,
        "layout": circuit.layout.to_dict(),
        "gates": [
            {"kind": g.kind, "controls": list(g.controls), "target": g.target, "angle": g.angle}
            for g in circuit.gates
        ],
    }


def circuit_from_json(data: dict) -> Circuit:
    gates = [Gate(d["kind"], d["target"], tuple(d.get("controls", ())), d.get("angle")) for d in data["gates"]]
    layout = RegisterLayout.from_dict(data.get("layout") or {})
    return Circuit(data["num_qubits"], gates, layout)


def pmf_to_json(pmf: Pmf) -> dict:
    out = {"probs": pmf.probs.tolist()}
    if pmf.values is not None:
        out["values"] = pmf.values.tolist()
    return out


def pmf_from_json(data: dict) -> Pmf:
    if not isinstance(data, dict) or "probs" not in data:
        raise StructuralError("PMF JSON must be an object with a 'probs' array")
    values = data.get("values")
    return Pmf(np.asarray(data["probs"], dtype=float), None if values is None else np.asarray(values, float))


def load_pmf(path: str | Path) -> Pmf:
    with open(path) as fh:
        return pmf_from_json(json.load(fh))


def save_pmf(pmf: Pmf, path: str | Path) -> None:
    Path(path).write_text(json.dumps(pmf_to_json(pmf)) + "\n")
