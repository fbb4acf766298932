import math

import numpy as np
import pytest

from digispread.baselines import (
    DigitalCalibrationConfig,
    RotationConfig,
    binary_weights,
    build_digital_calibration_circuit,
    build_qwa_circuit,
    build_rotation_circuit,
    build_rotation_stage,
    calibrated_angles,
    digital_calibration_closed_form,
    digital_calibration_recovery,
    quantize_angle,
    rotation_closed_form,
    taylor_wag_recovery,
    weighted_adder_mean,
    weighted_values,
)
from digispread.circuits import Pmf, sec2_pmf
from digispread.errors import DomainError, StructuralError
from digispread.estimation import exact_probability, relative_error_pct
from digispread.resources import linear_fit, resource_report


def test_rotation_circuit_matches_closed_form():
    pmf = sec2_pmf()
    for cfg in (RotationConfig(), RotationConfig(theta=0.05, price_scale_m=math.pi / 2), RotationConfig(theta=0)):
        assert abs(exact_probability(build_rotation_circuit(pmf, cfg), 3) - rotation_closed_form(pmf, cfg)) < 1e-12


def test_rotation_sec2_values():
    # sum_i p_i sin^2(pi/4 + 0.01 i) over i in {1,2,4,5}
    pmf = sec2_pmf()
    cfg = RotationConfig(theta=0.01)
    p = exact_probability(build_rotation_circuit(pmf, cfg), 3)
    expected = sum(0.25 * math.sin(math.pi / 4 + 0.01 * i) ** 2 for i in (1, 2, 4, 5))
    assert abs(p - expected) < 1e-12
    assert abs(p - 0.529967014) < 1e-9
    wag = taylor_wag_recovery(p, cfg)
    assert abs(wag - 2.9967014) < 1e-6
    assert abs(relative_error_pct(wag, 3.0) - 0.10995) < 1e-4


def test_analog_scale_half_pi_value():
    p = exact_probability(build_rotation_circuit(sec2_pmf(), RotationConfig(price_scale_m=math.pi / 2)), 3)
    assert abs(p - 0.5469961) < 1e-6


def test_analog_calibration_invariance():
    # only the product m * theta enters the circuit and the recovery
    pmf = sec2_pmf()
    a = RotationConfig(theta=0.01, price_scale_m=1.0)
    b = RotationConfig(theta=0.01 / (math.pi / 2), price_scale_m=math.pi / 2)
    pa = exact_probability(build_rotation_circuit(pmf, a), 3)
    pb = exact_probability(build_rotation_circuit(pmf, b), 3)
    assert abs(pa - pb) < 1e-12
    assert abs(taylor_wag_recovery(pa, a) - taylor_wag_recovery(pb, b)) < 1e-9


def test_taylor_examples():
    cfg = RotationConfig(theta=0.01)
    assert abs(taylor_wag_recovery(0.53, cfg) - 3.0) < 1e-12
    assert abs(taylor_wag_recovery(0.5, cfg)) < 1e-12


def test_taylor_magnifies_probability_error():
    cfg = RotationConfig(theta=0.01)
    eps = 1e-4
    assert abs((taylor_wag_recovery(0.53 + eps, cfg) - taylor_wag_recovery(0.53, cfg)) - eps / 0.01) < 1e-9


def test_taylor_bias_grows_with_theta():
    pmf = sec2_pmf()
    errs = [
        relative_error_pct(taylor_wag_recovery(rotation_closed_form(pmf, RotationConfig(theta=t)), RotationConfig(theta=t)), 3)
        for t in (0.005, 0.01, 0.02, 0.04)
    ]
    assert errs == sorted(errs)
    # sin^2(pi/4 + x) = 1/2 + x - (2/3) x^3 + ..., so the relative bias scales as theta^2
    assert 3.8 < errs[2] / errs[1] < 4.2


def test_rotation_domain_errors():
    with pytest.raises(DomainError):
        RotationConfig(theta=-0.1)
    with pytest.raises(DomainError):
        RotationConfig(base_angle=0.0)
    with pytest.raises(DomainError):
        taylor_wag_recovery(1.5, RotationConfig())
    with pytest.raises(DomainError):
        taylor_wag_recovery(0.5, RotationConfig(theta=0))


def test_rotation_stage_gate_count():
    for n in (1, 5, 20):
        assert len(build_rotation_stage(n, RotationConfig())) == n + 1


def test_quantize_angle_grid():
    step = (math.pi / 2) / 16
    assert quantize_angle(0.0, 4) == 0
    assert abs(quantize_angle(step * 3.4, 4) - 3 * step) < 1e-15
    assert abs(quantize_angle(10.0, 4) - math.pi / 2) < 1e-15


def test_digital_calibration_circuit_matches_closed_form():
    pmf = sec2_pmf()
    for b in (2, 4, 9):
        cfg = DigitalCalibrationConfig(lut_bits=b)
        p = exact_probability(build_digital_calibration_circuit(pmf, cfg), 3)
        assert abs(p - digital_calibration_closed_form(pmf, cfg)) < 1e-12


@pytest.mark.parametrize("bits,err", [(4, 18.712365826614), (6, 2.126), (12, 0.082)])
def test_digital_calibration_sweep_values(bits, err):
    cfg = DigitalCalibrationConfig(lut_bits=bits)
    got = relative_error_pct(digital_calibration_recovery(digital_calibration_closed_form(sec2_pmf(), cfg), cfg), 3)
    assert abs(got - err) < 5e-3


def test_digital_calibration_exact_limit():
    cfg = DigitalCalibrationConfig(lut_bits=30)
    wag = digital_calibration_recovery(digital_calibration_closed_form(sec2_pmf(), cfg), cfg)
    assert abs(wag - 3) < 1e-6


def test_digital_calibration_error_trend():
    pmf = sec2_pmf()
    bits = list(range(4, 21))
    errs = []
    for b in bits:
        cfg = DigitalCalibrationConfig(lut_bits=b)
        errs.append(relative_error_pct(digital_calibration_recovery(digital_calibration_closed_form(pmf, cfg), cfg), 3))
    slope, _, _ = linear_fit(bits, np.log2(errs))
    # one extra bit halves the angle step; the fit should show a steady decline
    assert -1.3 < slope < -0.7


def test_calibration_domain_checked():
    with pytest.raises(DomainError):
        calibrated_angles(8, DigitalCalibrationConfig(theta=0.1))
    with pytest.raises(DomainError):
        DigitalCalibrationConfig(lut_bits=0)


def test_weighted_values():
    np.testing.assert_array_equal(weighted_values(8, binary_weights(3)), np.arange(8))
    np.testing.assert_array_equal(weighted_values(4, [3, 5]), [0, 3, 5, 8])


def test_qwa_exact_mean():
    res = weighted_adder_mean(sec2_pmf(), binary_weights(3), None, 0)
    assert abs(res.wag - 3) < 1e-12
    assert res.method == "qwa" and res.estimator == "exact"


def test_qwa_custom_weights():
    pmf = Pmf(np.full(4, 0.25))
    res = weighted_adder_mean(pmf, [3, 5], None, 0)
    assert abs(res.wag - 4.0) < 1e-12


def test_qwa_shots_seeded():
    a = weighted_adder_mean(sec2_pmf(), binary_weights(3), 10_000, 1)
    b = weighted_adder_mean(sec2_pmf(), binary_weights(3), 10_000, 1)
    assert a.wag == b.wag
    assert abs(a.wag - 3) < 0.1


def test_qwa_weight_count_checked():
    with pytest.raises(StructuralError):
        weighted_adder_mean(sec2_pmf(), [1, 2], None, 0)


def test_qwa_circuit_reports_sum_width():
    rep = resource_report(build_qwa_circuit(sec2_pmf(), binary_weights(3)))
    assert rep.qae_instances == 3
