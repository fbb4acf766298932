"""Brute-force self-checks run by ``digispread verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from digispread.circuits import (
    Pmf,
    build_amplitude_encoder,
    build_ds_oracle,
    build_full_cuccaro_adder,
    build_pruned_comparator,
    build_weighted_adder,
    ds_layout,
    telescoping_count,
    weighted_adder_layout,
)
from digispread.estimation import QaeConfig, canonical_qae, qae_grid_bound
from digispread.qsim import Circuit, RegisterLayout, apply_circuit, basis_state, marginal_probability, run


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def basis_map(circuit: Circuit, index: int) -> int:
    """Output basis index of a classical-reversible circuit on input ``|index>``."""
    state = apply_circuit(basis_state(circuit.num_qubits, index), circuit)
    probs = state.probabilities()
    out = int(np.argmax(probs))
    if abs(probs[out] - 1.0) > 1e-9:
        raise AssertionError(f"circuit does not map |{index}> to a basis state")
    return out


def _pack(layout: RegisterLayout, a: int, b: int) -> int:
    return (a << layout.value.start) | (b << layout.ramp.start)


def _field(index: int, r: range) -> int:
    return (index >> r.start) & ((1 << len(r)) - 1)


def check_comparator(
    builder: Callable[[RegisterLayout], Circuit] = build_pruned_comparator, widths=(1, 2, 3, 4)
) -> CheckResult:
    bad = total = 0
    for n in widths:
        layout = ds_layout(n)
        circ = builder(layout)
        size = 1 << n
        for a in range(size):
            for kp in range(size):
                total += 1
                expected = _pack(layout, a, kp) | (int(a + kp >= size) << layout.target)
                # A + K' >= N must coincide with A > K for K = N - 1 - K'
                assert (a + kp >= size) == (a > size - 1 - kp)
                if basis_map(circ, _pack(layout, a, kp)) != expected:
                    bad += 1
    return CheckResult("comparator exhaustive", bad == 0, f"{total - bad}/{total} basis inputs correct")


def check_full_adder(widths=(1, 2, 3, 4)) -> CheckResult:
    bad = total = 0
    for n in widths:
        layout = ds_layout(n)
        circ = build_full_cuccaro_adder(layout)
        size = 1 << n
        for a in range(size):
            for b in range(size):
                total += 1
                out = basis_map(circ, _pack(layout, a, b))
                ok = (
                    _field(out, layout.value) == a
                    and _field(out, layout.ramp) == (a + b) % size
                    and (out >> layout.target) & 1 == int(a + b >= size)
                    and (out >> layout.carry_in) & 1 == 0
                )
                bad += not ok
    return CheckResult("full adder exhaustive", bad == 0, f"{total - bad}/{total} basis inputs correct")


def check_weighted_adder(weight_sets=((1, 2, 4), (3, 5), (1, 1, 2, 3))) -> CheckResult:
    bad = total = 0
    for weights in weight_sets:
        n = len(weights)
        layout = weighted_adder_layout(n, weights)
        circ = build_weighted_adder(weights, layout)
        for x in range(1 << n):
            total += 1
            out = basis_map(circ, x)
            expected = sum(w for j, w in enumerate(weights) if (x >> j) & 1)
            ok = (
                _field(out, layout.value) == x
                and _field(out, layout.sum) == expected
                and _field(out, layout.scratch) == 0
                and (out >> layout.carry_in) & 1 == 0
            )
            bad += not ok
    return CheckResult("weighted adder exhaustive", bad == 0, f"{total - bad}/{total} inputs correct")


def random_pmfs(count: int, widths, seed: int) -> list[Pmf]:
    rng = np.random.Generator(np.random.PCG64(seed))
    pmfs = []
    for k in range(count):
        n = widths[k % len(widths)]
        raw = rng.random(1 << n)
        raw[rng.random(1 << n) < 0.25] = 0.0  # exercise zero-mass subtrees
        if raw.sum() == 0:
            raw[0] = 1.0
        pmfs.append(Pmf.from_weights(raw))
    return pmfs


def check_spreading_identity(count: int = 50, seed: int = 7, tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for pmf in random_pmfs(count, (2, 3, 4), seed):
        n = pmf.num_qubits
        p = marginal_probability(run(build_ds_oracle(pmf)), 2 * n + 1)
        worst = max(worst, abs(p - pmf.index_mean() / pmf.num_states))
    return CheckResult("spreading identity", worst < tol, f"max |P(target) - E[A]/N| = {worst:.3e} over {count} PMFs")


def check_encoder(count: int = 20, seed: int = 11, tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for pmf in random_pmfs(count, (2, 3, 4), seed):
        amps = run(build_amplitude_encoder(pmf)).amplitudes
        worst = max(worst, float(np.max(np.abs(amps - np.sqrt(pmf.probs)))))
    return CheckResult("encoder exactness", worst < tol, f"max |amp - sqrt(p)| = {worst:.3e}")


def check_telescoping(widths=(1, 2, 3, 4, 5)) -> CheckResult:
    ok = all(telescoping_count(a, n) == a for n in widths for a in range(1 << n))
    return CheckResult("telescoping count", ok, "sum_K [A > K] == A for all A")


def check_qae_grid(evals=(3, 4, 5, 6)) -> CheckResult:
    pmf = Pmf(np.array([0.0, 0.25, 0.25, 0.0, 0.25, 0.25, 0.0, 0.0]))
    oracle = build_ds_oracle(pmf)
    worst = []
    for m in evals:
        est = canonical_qae(oracle, 7, QaeConfig(m)).probability
        worst.append(abs(est - 0.375) <= qae_grid_bound(m))
    return CheckResult("QAE grid bound", all(worst), f"m in {list(evals)}: within pi/2^m + pi^2/4^m")


def run_all(comparator_builder=build_pruned_comparator) -> list[CheckResult]:
    return [
        check_comparator(comparator_builder),
        check_full_adder(),
        check_weighted_adder(),
        check_telescoping(),
        check_spreading_identity(),
        check_encoder(),
        check_qae_grid(),
    ]
