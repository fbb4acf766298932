"""Reading the flag-qubit probability out: exact, by sampling, or by amplitude estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from digispread.errors import CapacityError, StructuralError
from digispread.qsim import (
    CP,
    CX,
    MAX_QUBITS,
    MCZ,
    PRNG_NAME,
    Circuit,
    Gate,
    H,
    RegisterLayout,
    X,
    Z,
    marginal_probability,
    register_distribution,
    run,
    sample_counts,
)
from digispread.resources import ResourceReport

MAX_EVAL_QUBITS = 8


def relative_error_pct(estimate: float, truth: float) -> float:
    if truth == 0:
        return 0.0 if estimate == 0 else math.inf
    return abs(estimate - truth) / abs(truth) * 100.0


@dataclass(frozen=True)
class EstimationResult:
    method: str
    estimator: str
    probability: float
    wag: float
    ground_truth: float
    relative_error_pct: float
    num_states: int
    resources: ResourceReport | None = None
    seed: int | None = None
    shots: int | None = None
    eval_qubits: int | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(cls, *, method, estimator, probability, wag, ground_truth, num_states, **kw) -> EstimationResult:
        return cls(
            method=method,
            estimator=estimator,
            probability=float(probability),
            wag=float(wag),
            ground_truth=float(ground_truth),
            relative_error_pct=relative_error_pct(wag, ground_truth),
            num_states=int(num_states),
            **kw,
        )

    @property
    def wag_normalized(self) -> float:
        return self.wag / self.num_states

    def to_dict(self) -> dict:
        """Flat record; key set is frozen by the CLI golden files."""
        err = self.relative_error_pct
        out = {
            "method": self.method,
            "estimator": self.estimator,
            "probability": self.probability,
            "wag": self.wag,
            "wag_normalized": self.wag_normalized,
            "ground_truth": self.ground_truth,
            "ground_truth_normalized": self.ground_truth / self.num_states,
            "relative_error_pct": None if math.isinf(err) else err,
            "num_states": self.num_states,
            "seed": self.seed,
            "shots": self.shots,
            "eval_qubits": self.eval_qubits,
            "prng": PRNG_NAME,
        }
        if self.resources is not None:
            out.update(self.resources.flat())
        return out


@dataclass(frozen=True)
class WagProblem:
    """A state preparation whose flag-qubit probability encodes a weighted average."""

    method: str
    oracle: Circuit
    target: int
    recover: Callable[[float], float]
    ground_truth: float
    num_states: int


@dataclass(frozen=True)
class QaeConfig:
    eval_qubits: int
    shots: int | None = None  # None: take the most probable outcome exactly
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.eval_qubits <= MAX_EVAL_QUBITS:
            raise CapacityError(f"eval_qubits must be in [1, {MAX_EVAL_QUBITS}]")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass(frozen=True)
class QaeOutcome:
    probability: float
    measured: int
    distribution: np.ndarray
    circuit: Circuit


def exact_probability(oracle: Circuit, target: int) -> float:
    return marginal_probability(run(oracle), target)


def shot_probability(oracle: Circuit, target: int, shots: int, seed: int) -> float:
    counts = sample_counts(run(oracle), shots, seed)
    hits = sum(c for idx, c in counts.items() if (idx >> target) & 1)
    return hits / shots


def _check_target(oracle: Circuit, target: int) -> None:
    if not 0 <= target < oracle.num_qubits:
        raise StructuralError(f"target {target} outside oracle of {oracle.num_qubits} qubits")


def _reflect_zero(qubits: list[int], extra_controls: tuple[int, ...] = ()) -> list[Gate]:
    flips = [X(q) for q in qubits]
    return flips + [MCZ(tuple(qubits[1:]) + extra_controls, qubits[0])] + flips


def build_grover_operator(oracle: Circuit, target: int) -> Circuit:
    """``A S0 A^dag S_chi`` with ``S_chi = Z(target)`` and ``S0 = I - 2|0><0|``.

    This is the negative of the textbook operator; the sign is a global phase here
    and is restored on the control qubit in :func:`controlled_grover_gates`.
    """
    _check_target(oracle, target)
    qubits = list(range(oracle.num_qubits))
    inverse = oracle.inverse()
    gates = [Z(target), *inverse.gates, *_reflect_zero(qubits), *oracle.gates]
    return Circuit(oracle.num_qubits, gates, oracle.layout)


def controlled_grover_gates(
    oracle: Circuit, target: int, control: int, work: list[int] | None = None
) -> list[Gate]:
    """Textbook ``Q = -A S0 A^dag S_chi`` controlled on ``control``.

    Only the two reflections need the control: with them switched off the
    ``A``/``A^dag`` pair cancels.  ``Z(control)`` supplies the ``-1``.  ``work``
    lists the qubits the reflection about ``|0...0>`` acts on (default: all).
    """
    qubits = list(range(oracle.num_qubits)) if work is None else list(work)
    inverse = oracle.inverse()
    return [
        MCZ((control,), target),
        *inverse.gates,
        *_reflect_zero(qubits, (control,)),
        *oracle.gates,
        Z(control),
    ]


def inverse_qft_gates(qubits: list[int]) -> list[Gate]:
    """Inverse QFT; afterwards ``qubits[l]`` holds bit ``l`` of the phase integer."""
    m = len(qubits)
    gates: list[Gate] = []
    for j in reversed(range(m)):
        for k in reversed(range(j + 1, m)):
            gates.append(CP(qubits[k], qubits[j], -math.pi / (1 << (k - j))))
        gates.append(H(qubits[j]))
    for j in range(m // 2):
        a, b = qubits[j], qubits[m - 1 - j]
        gates += [CX(a, b), CX(b, a), CX(a, b)]
    return gates


def build_qae_circuit(oracle: Circuit, target: int, eval_qubits: int) -> Circuit:
    """Evaluation register on qubits ``[0, m)``; the oracle is shifted up by ``m``.

    Keeping the oracle on the high qubits gives its gates long contiguous strides.
    """
    _check_target(oracle, target)
    w, m = oracle.num_qubits, eval_qubits
    if w + m > MAX_QUBITS:
        raise CapacityError(f"{w} oracle + {m} eval qubits exceeds {MAX_QUBITS}")
    shifted = Circuit(w + m, [g.shifted(m) for g in oracle.gates])
    evals = list(range(m))
    gates: list[Gate] = list(shifted.gates) + [H(e) for e in evals]
    for j, e in enumerate(evals):
        step = controlled_grover_gates(shifted, target + m, e, list(range(m, m + w)))
        for _ in range(1 << j):
            gates += step
    gates += inverse_qft_gates(evals)
    layout = RegisterLayout(eval=range(0, m), target=target + m)
    return Circuit(w + m, gates, layout)


def canonical_qae(oracle: Circuit, target: int, cfg: QaeConfig) -> QaeOutcome:
    """Phase-estimation amplitude estimation; ``a* = sin^2(pi y / 2**m)``."""
    circuit = build_qae_circuit(oracle, target, cfg.eval_qubits)
    state = run(circuit)
    dist = register_distribution(state, list(circuit.layout.eval))
    if cfg.shots is None:
        y = int(np.argmax(dist))
    else:
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        counts = rng.multinomial(cfg.shots, dist / dist.sum())
        y = int(np.argmax(counts))
    a = math.sin(math.pi * y / (1 << cfg.eval_qubits)) ** 2
    return QaeOutcome(a, y, dist, circuit)


def qae_grid_bound(m: int) -> float:
    return math.pi / (1 << m) + math.pi**2 / (1 << (2 * m))


def estimate(
    problem: WagProblem,
    estimator: str = "exact",
    *,
    shots: int | None = None,
    eval_qubits: int | None = None,
    seed: int = 0,
    resources: ResourceReport | None = None,
) -> EstimationResult:
    if estimator == "exact":
        p = exact_probability(problem.oracle, problem.target)
    elif estimator == "shots":
        if shots is None:
            raise ValueError("shot estimator needs a shot count")
        p = shot_probability(problem.oracle, problem.target, shots, seed)
    elif estimator == "qae":
        if eval_qubits is None:
            raise ValueError("qae estimator needs eval_qubits")
        p = canonical_qae(problem.oracle, problem.target, QaeConfig(eval_qubits, shots, seed)).probability
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return EstimationResult.build(
        method=problem.method,
        estimator=estimator,
        probability=p,
        wag=problem.recover(p),
        ground_truth=problem.ground_truth,
        num_states=problem.num_states,
        resources=resources,
        seed=seed,
        shots=shots if estimator != "exact" else None,
        eval_qubits=eval_qubits if estimator == "qae" else None,
    )
