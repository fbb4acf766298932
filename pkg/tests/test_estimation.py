import math

import numpy as np
import pytest

from digispread.circuits import Pmf, build_ds_oracle, sec2_pmf
from digispread.errors import CapacityError, StructuralError
from digispread.estimation import (
    EstimationResult,
    QaeConfig,
    build_grover_operator,
    build_qae_circuit,
    canonical_qae,
    controlled_grover_gates,
    estimate,
    exact_probability,
    inverse_qft_gates,
    qae_grid_bound,
    relative_error_pct,
    shot_probability,
)
from digispread.methods import ds_problem
from digispread.qsim import RY, Circuit, H, Statevector, apply_circuit, basis_state, marginal_probability, run


def ry_oracle(a):
    return Circuit(1, [RY(0, 2 * math.asin(math.sqrt(a)))])


def unitary(circuit):
    n = circuit.num_qubits
    return np.column_stack([apply_circuit(basis_state(n, j), circuit).amplitudes for j in range(1 << n)])


@pytest.mark.parametrize("a", [0.1, 0.375, 0.5])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_grover_powers_single_qubit(a, k):
    oracle = ry_oracle(a)
    q = build_grover_operator(oracle, 0)
    state = run(oracle)
    for _ in range(k):
        state = apply_circuit(state, q)
    expected = math.sin((2 * k + 1) * math.asin(math.sqrt(a))) ** 2
    assert abs(marginal_probability(state, 0) - expected) < 1e-12


def test_grover_on_ds_oracle():
    oracle = build_ds_oracle(sec2_pmf())
    state = apply_circuit(run(oracle), build_grover_operator(oracle, 7))
    assert abs(marginal_probability(state, 7) - math.sin(3 * math.asin(math.sqrt(0.375))) ** 2) < 1e-12


def test_controlled_grover_is_textbook_operator():
    # oracle on qubits 0..1, control qubit 2
    oracle = Circuit(3, [RY(0, 0.9), H(1), RY(1, 0.4)])
    gates = controlled_grover_gates(oracle, 1, 2, [0, 1])
    u = unitary(Circuit(3, gates))
    a = unitary(Circuit(2, oracle.gates))
    s0 = np.eye(4)
    s0[0, 0] = -1
    s_chi = np.diag([1, 1, -1, -1])
    q_std = -a @ s0 @ a.conj().T @ s_chi
    np.testing.assert_allclose(u[:4, :4], np.eye(4), atol=1e-12)
    np.testing.assert_allclose(u[4:, 4:], q_std, atol=1e-12)
    np.testing.assert_allclose(u[:4, 4:], 0, atol=1e-12)


def test_inverse_qft_decodes_fourier_states():
    m = 3
    iqft = Circuit(m, inverse_qft_gates(list(range(m))))
    for y in range(1 << m):
        phases = np.exp(2j * math.pi * y * np.arange(1 << m) / (1 << m)) / math.sqrt(1 << m)
        out = apply_circuit(Statevector(m, phases), iqft)
        assert abs(abs(out.amplitudes[y]) - 1) < 1e-12


def test_qae_exact_for_half():
    pmf = Pmf(np.eye(8)[4])  # a = 4/8
    oracle = build_ds_oracle(pmf)
    for m in (2, 3, 4):
        assert abs(canonical_qae(oracle, 7, QaeConfig(m)).probability - 0.5) < 1e-12


@pytest.mark.parametrize("m,y,a_star", [(3, 2, 0.5), (4, 13, 0.30866), (5, 7, 0.40245), (6, 13, 0.35486)])
def test_qae_readout_on_ds_oracle(m, y, a_star):
    out = canonical_qae(build_ds_oracle(sec2_pmf()), 7, QaeConfig(m))
    assert out.measured == y
    assert abs(out.probability - a_star) < 1e-5
    assert abs(out.probability - 0.375) <= qae_grid_bound(m)
    assert abs(out.distribution.sum() - 1) < 1e-12


@pytest.mark.parametrize("a", [0.1, 0.2, 0.7, 0.9])
def test_qae_single_qubit_within_bound(a):
    for m in (3, 5):
        est = canonical_qae(ry_oracle(a), 0, QaeConfig(m)).probability
        assert abs(est - a) <= qae_grid_bound(m)


def test_qae_shot_readout_seeded():
    oracle = ry_oracle(0.3)
    a = canonical_qae(oracle, 0, QaeConfig(4, shots=200, seed=9))
    b = canonical_qae(oracle, 0, QaeConfig(4, shots=200, seed=9))
    assert a.measured == b.measured
    assert abs(a.probability - 0.3) <= qae_grid_bound(4)


def test_qae_capacity():
    with pytest.raises(CapacityError):
        QaeConfig(9)
    with pytest.raises(CapacityError):
        QaeConfig(0)
    with pytest.raises(CapacityError):
        build_qae_circuit(Circuit(20, [H(0)]), 0, 5)


def test_qae_bad_target():
    with pytest.raises(StructuralError):
        build_qae_circuit(ry_oracle(0.2), 3, 2)


def test_shot_probability_statistics():
    oracle = build_ds_oracle(sec2_pmf())
    p = shot_probability(oracle, 7, 100_000, seed=0)
    assert abs(p - 0.375) < 5 * math.sqrt(0.375 * 0.625 / 100_000)
    assert p == shot_probability(oracle, 7, 100_000, seed=0)


def test_estimate_modes():
    problem = ds_problem(sec2_pmf())
    exact = estimate(problem, "exact")
    assert abs(exact.wag - 3) < 1e-12 and exact.shots is None
    shots = estimate(problem, "shots", shots=1000, seed=4)
    assert shots.shots == 1000 and shots.seed == 4
    qae = estimate(problem, "qae", eval_qubits=3)
    assert qae.eval_qubits == 3 and abs(qae.probability - 0.5) < 1e-12
    with pytest.raises(ValueError):
        estimate(problem, "shots")
    with pytest.raises(ValueError):
        estimate(problem, "qae")
    with pytest.raises(ValueError):
        estimate(problem, "bogus")


def test_relative_error():
    assert relative_error_pct(2.9, 3.0) == pytest.approx(10 / 3)
    assert relative_error_pct(0.0, 0.0) == 0.0
    assert math.isinf(relative_error_pct(1.0, 0.0))


def test_result_dict_is_flat():
    res = EstimationResult.build(method="ds", estimator="exact", probability=0.5, wag=4, ground_truth=0, num_states=8)
    d = res.to_dict()
    assert d["relative_error_pct"] is None
    assert all(not isinstance(v, (dict, list)) for v in d.values())
    assert d["wag_normalized"] == 0.5


def test_exact_probability_equals_marginal():
    oracle = ry_oracle(0.25)
    assert abs(exact_probability(oracle, 0) - 0.25) < 1e-12
