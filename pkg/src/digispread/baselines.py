"""Competing weighted-average circuits: rotation-based, calibrated rotation, weighted adder.

All rotation angles are written as gate parameters, i.e. twice the analytic
amplitude angle, because ``RY(t)|0>`` has ``sin(t/2)`` on ``|1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from digispread.circuits import (
    Pmf,
    build_amplitude_encoder,
    build_weighted_adder,
    uniformly_controlled_ry,
    weighted_adder_layout,
)
from digispread.errors import DomainError, StructuralError
from digispread.estimation import EstimationResult
from digispread.qsim import CRY, RY, Circuit, RegisterLayout, register_distribution, run, sample_counts
from digispread.resources import resource_report


@dataclass(frozen=True)
class RotationConfig:
    theta: float = 0.01
    base_angle: float = math.pi / 4
    price_scale_m: float = 1.0
    shots: int | None = None  # None means exact readout

    def __post_init__(self):
        # theta == 0 is accepted to build the index-independent circuit; recovery rejects it
        if self.theta < 0:
            raise DomainError("theta must be >= 0")
        if not 0 < self.base_angle < math.pi / 2:
            raise DomainError("base_angle must lie in (0, pi/2)")


def rotation_layout(n: int) -> RegisterLayout:
    return RegisterLayout(value=range(0, n), target=n)


def build_rotation_stage(n: int, cfg: RotationConfig) -> Circuit:
    """The rotation block alone: ``RY(2*base)`` then one CRY per value qubit."""
    layout = rotation_layout(n)
    gates = [RY(n, 2 * cfg.base_angle)]
    gates += [CRY(j, n, 2 * cfg.theta * (1 << j) * cfg.price_scale_m) for j in range(n)]
    return Circuit(n + 1, gates, layout)


def build_rotation_circuit(pmf: Pmf, cfg: RotationConfig) -> Circuit:
    """|i> picks up target amplitude ``sin(base + m*i*theta)``."""
    n = pmf.num_qubits
    layout = rotation_layout(n)
    return build_amplitude_encoder(pmf, layout).then(build_rotation_stage(n, cfg))


def rotation_closed_form(pmf: Pmf, cfg: RotationConfig) -> float:
    i = np.arange(pmf.num_states)
    return float(np.dot(pmf.probs, np.sin(cfg.base_angle + cfg.price_scale_m * i * cfg.theta) ** 2))


def taylor_wag_recovery(measured_prob: float, cfg: RotationConfig) -> float:
    """First-order inversion of ``sin^2(base + m*i*theta)``.

    Reduces to ``(p - 0.5) / theta`` at ``base = pi/4``, ``m = 1``.
    """
    if not 0.0 <= measured_prob <= 1.0:
        raise DomainError(f"probability {measured_prob} outside [0, 1]")
    slope = cfg.theta * cfg.price_scale_m * math.sin(2 * cfg.base_angle)
    if slope == 0:
        raise DomainError("theta * m must be non-zero to recover a weighted average")
    return (measured_prob - math.sin(cfg.base_angle) ** 2) / slope


@dataclass(frozen=True)
class DigitalCalibrationConfig:
    lut_bits: int = 4
    theta: float = 0.01
    base_angle: float = math.pi / 4

    def __post_init__(self):
        if self.lut_bits < 1:
            raise DomainError("lut_bits must be >= 1")

    @property
    def base_prob(self) -> float:
        return math.sin(self.base_angle) ** 2

    def domain(self, num_states: int) -> np.ndarray:
        """Per-state probability the calibrated rotation should produce."""
        return self.base_prob + np.arange(num_states) * self.theta


def quantize_angle(r: np.ndarray | float, bits: int) -> np.ndarray:
    """Round to the nearest multiple of ``(pi/2) / 2**bits`` inside ``[0, pi/2]``."""
    step = (math.pi / 2) / (1 << bits)
    return np.clip(np.round(np.asarray(r, float) / step), 0, 1 << bits) * step


def calibrated_angles(num_states: int, cfg: DigitalCalibrationConfig) -> np.ndarray:
    x = cfg.domain(num_states)
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError(f"calibration targets leave [0, 1]: min {x.min()}, max {x.max()}")
    return quantize_angle(np.arcsin(np.sqrt(x)), cfg.lut_bits)


def build_digital_calibration_circuit(pmf: Pmf, cfg: DigitalCalibrationConfig) -> Circuit:
    """Encoder, then a value-selected RY whose angle is the quantized ``arcsin(sqrt(x_i))``."""
    n = pmf.num_qubits
    layout = rotation_layout(n)
    angles = 2 * calibrated_angles(pmf.num_states, cfg)
    lut = uniformly_controlled_ry(angles, list(range(n)), n)
    return build_amplitude_encoder(pmf, layout).then(lut)


def digital_calibration_closed_form(pmf: Pmf, cfg: DigitalCalibrationConfig) -> float:
    return float(np.dot(pmf.probs, np.sin(calibrated_angles(pmf.num_states, cfg)) ** 2))


def digital_calibration_recovery(measured_prob: float, cfg: DigitalCalibrationConfig) -> float:
    if cfg.theta == 0:
        raise DomainError("theta must be non-zero to recover a weighted average")
    return (measured_prob - cfg.base_prob) / cfg.theta


def binary_weights(n: int) -> list[int]:
    return [1 << j for j in range(n)]


def weighted_values(num_states: int, weights) -> np.ndarray:
    """Integer each basis state carries under the adder: ``sum_j bit_j(i) * w_j``."""
    i = np.arange(num_states)
    return sum(((i >> j) & 1) * w for j, w in enumerate(weights)).astype(float)


def build_qwa_circuit(pmf: Pmf, weights) -> Circuit:
    n = pmf.num_qubits
    layout = weighted_adder_layout(n, weights)
    return build_amplitude_encoder(pmf, layout).then(build_weighted_adder(weights, layout))


def weighted_adder_mean(pmf: Pmf, weights, shots: int | None, seed: int):
    """Mean of the multi-bit sum register, sampled (``shots``) or read exactly (``None``)."""
    weights = [int(w) for w in weights]
    if len(weights) != pmf.num_qubits:
        raise StructuralError(f"need {pmf.num_qubits} weights, got {len(weights)}")
    circuit = build_qwa_circuit(pmf, weights)
    state = run(circuit)
    acc = circuit.layout.sum
    if shots is None:
        dist = register_distribution(state, list(acc))
        mean = float(np.dot(dist, np.arange(dist.size)))
    else:
        if shots < 1:
            raise ValueError("shots must be >= 1")
        counts = sample_counts(state, shots, seed)
        mask = (1 << len(acc)) - 1
        total = sum(((idx >> acc.start) & mask) * c for idx, c in counts.items())
        mean = total / shots
    truth = float(np.dot(pmf.probs, weighted_values(pmf.num_states, weights)))
    return EstimationResult.build(
        method="qwa",
        estimator="exact" if shots is None else "shots",
        probability=mean / (1 << len(acc)),
        wag=mean,
        ground_truth=truth,
        num_states=pmf.num_states,
        resources=resource_report(circuit),
        seed=seed,
        shots=shots,
    )
