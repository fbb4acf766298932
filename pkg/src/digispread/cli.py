"""Command-line driver.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 qubit budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from digispread import __version__
from digispread.baselines import (
    DigitalCalibrationConfig,
    RotationConfig,
    binary_weights,
    build_digital_calibration_circuit,
    build_qwa_circuit,
    build_rotation_circuit,
    build_rotation_stage,
)
from digispread.circuits import (
    build_amplitude_encoder,
    build_digital_ramp,
    build_ds_oracle,
    build_full_adder_comparator,
    build_full_cuccaro_adder,
    build_pruned_comparator,
    build_weighted_adder,
    ds_layout,
    sec2_pmf,
    weighted_adder_layout,
)
from digispread.errors import CapacityError, DomainError, StructuralError
from digispread.estimation import build_grover_operator, exact_probability
from digispread.finance import (
    REPORTED_NORMALIZED_WAG,
    BsmParams,
    discretize_pmf,
    fit_symmetric_grid,
    ground_truth_wag,
    index_to_price,
)
from digispread.formats import circuit_to_json, circuit_to_text, load_pmf, pmf_to_json
from digispread.methods import DEFAULT_LUT_BITS, METHODS, CompareRequest, MethodSettings, compare
from digispread.resources import circuit_depth, growth_exponent, linear_fit, resource_report
from digispread.verify import run_all

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3


class InputError(Exception):
    pass


def _shots(text: str) -> int | None:
    if text == "exact":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("shots must be >= 1 or 'exact'")
    return value


def _methods(text: str) -> tuple[str, ...]:
    items = tuple(m.strip() for m in text.split(",") if m.strip())
    unknown = [m for m in items if m not in METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown method(s): {', '.join(unknown)}")
    return items


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _source_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--pmf", metavar="FILE", help="JSON file {probs: [...], values: [...]}")
    src.add_argument("--builtin", choices=["sec2"], help="built-in eight-state example")
    src.add_argument("--bsm", action="store_true", help="discretized log-normal PMF")
    p.add_argument("--s0", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=0.10)
    p.add_argument("--rate", type=float, default=0.04)
    p.add_argument("--maturity", type=float, default=300 / 365)
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--grid-lo", type=float, default=None)
    p.add_argument("--grid-hi", type=float, default=None)
    p.add_argument("--fit-grid", action="store_true", help="use the symmetric grid fitted to the reported mean")


def _output_args(p: argparse.ArgumentParser, formats=("json", "csv")) -> None:
    p.add_argument("--out", metavar="PATH", default=None)
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="digispread", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="run methods on one PMF and tabulate errors")
    _source_args(p)
    p.add_argument("--methods", type=_methods, default=METHODS)
    p.add_argument("--theta", type=float, default=0.01)
    p.add_argument("--m-scale", type=float, default=math.pi / 2)
    p.add_argument("--lut-bits", type=int, default=DEFAULT_LUT_BITS)
    p.add_argument("--weights", type=_ints, default=None, help="QWA weights, comma separated")
    p.add_argument("--shots", type=_shots, default=None, help="N or 'exact'")
    p.add_argument("--eval-qubits", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _output_args(p)

    p = sub.add_parser("bsm", help="build the log-normal PMF and its ground truth")
    _source_args(p)
    _output_args(p)

    p = sub.add_parser("resources", help="gate-count and depth scaling table")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--theta", type=float, default=0.01)
    _output_args(p)

    p = sub.add_parser("verify", help="brute-force self-checks")
    p.add_argument("--out", metavar="PATH", default=None)

    p = sub.add_parser("dump", help="print a built circuit")
    p.add_argument(
        "--circuit",
        required=True,
        choices=[
            "ramp", "comparator", "full-adder", "full-adder-comparator", "weighted-adder",
            "encoder", "ds-oracle", "rotation", "digital-cal", "qwa", "grover",
        ],
    )
    p.add_argument("--n", type=int, default=3, help="register width for arithmetic blocks")
    _source_args(p)
    p.add_argument("--theta", type=float, default=0.01)
    p.add_argument("--m-scale", type=float, default=1.0)
    p.add_argument("--lut-bits", type=int, default=DEFAULT_LUT_BITS)
    p.add_argument("--weights", type=_ints, default=None)
    _output_args(p, formats=("text", "json"))
    return parser


def _bsm_params(args) -> BsmParams:
    params = BsmParams(args.s0, args.sigma, args.rate, args.maturity, args.qubits, args.grid_lo, args.grid_hi)
    if args.fit_grid:
        params = fit_symmetric_grid(params)
    return params


def load_source(args):
    """Return ``(pmf, source_tag, grid)``; ``grid`` is ``None`` unless log-normal."""
    if args.pmf:
        try:
            return load_pmf(args.pmf), f"file:{args.pmf}", None
        except OSError as exc:
            raise InputError(f"cannot read PMF file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"PMF file is not valid JSON: {exc}") from exc
    if args.bsm or args.fit_grid or args.grid_lo is not None or args.grid_hi is not None:
        params = _bsm_params(args)
        return discretize_pmf(params), "bsm", params.grid
    return sec2_pmf(), "builtin:sec2", None


def _write(payload, rows, args) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_value(v) for k, v in row.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def cmd_compare(args) -> int:
    pmf, source, grid = load_source(args)
    settings = MethodSettings(theta=args.theta, m_scale=args.m_scale, lut_bits=args.lut_bits, weights=args.weights)
    req = CompareRequest(pmf, args.methods, settings, args.shots, args.eval_qubits, args.seed)
    provenance = {
        "artifact_version": __version__,
        "pmf_source": source,
        "grid_lo": None if grid is None else grid[0],
        "grid_hi": None if grid is None else grid[1],
        "theta": args.theta,
        "m_scale": args.m_scale,
        "lut_bits": args.lut_bits,
    }
    rows = [{**r.to_dict(), **provenance} for r in compare(req)]
    _write({"command": "compare", "rows": rows}, rows, args)
    return EXIT_OK


def cmd_bsm(args) -> int:
    params = _bsm_params(args)
    pmf = discretize_pmf(params)
    oracle = build_ds_oracle(pmf)
    ds_prob = exact_probability(oracle, 2 * pmf.num_qubits + 1)
    lo, hi = params.grid
    states = [
        {"index": i, "value": float(v), "prob": float(p)} for i, (v, p) in enumerate(zip(pmf.values, pmf.probs))
    ]
    payload = {
        "command": "bsm",
        "artifact_version": __version__,
        "params": {
            "s0": params.s0, "sigma": params.sigma, "rate": params.rate,
            "maturity": params.maturity, "qubits": params.qubits,
        },
        "mu": params.mu,
        "grid_lo": lo,
        "grid_hi": hi,
        "fitted_grid": bool(args.fit_grid),
        "reported_normalized_wag": REPORTED_NORMALIZED_WAG,
        "ground_truth_index": ground_truth_wag(pmf, "index"),
        "ground_truth_normalized": ground_truth_wag(pmf, "normalized"),
        "ground_truth_price": ground_truth_wag(pmf, "price"),
        "ds_exact_probability": ds_prob,
        "ds_price": index_to_price(ds_prob * pmf.num_states, pmf),
        "pmf": pmf_to_json(pmf),
        "states": states,
    }
    _write(payload, states, args)
    return EXIT_OK


def resource_rows(n_min: int, n_max: int, theta: float = 0.01) -> list[dict]:
    rows = []
    cfg = RotationConfig(theta=theta)
    for n in range(n_min, n_max + 1):
        layout = ds_layout(n)
        pruned = build_pruned_comparator(layout)
        full = build_full_cuccaro_adder(layout)
        full_cmp = build_full_adder_comparator(layout)
        weights = binary_weights(n)
        qwa = build_weighted_adder(weights, weighted_adder_layout(n, weights))
        rot = build_rotation_stage(n, cfg)
        ramp = build_digital_ramp(layout)
        rows.append({
            "n": n,
            "comparator_gates": len(pruned),
            "comparator_depth": circuit_depth(pruned),
            "full_adder_gates": len(full),
            "full_adder_depth": circuit_depth(full),
            "full_adder_comparator_gates": len(full_cmp),
            "full_adder_comparator_depth": circuit_depth(full_cmp),
            "pruned_ratio": len(pruned) / len(full_cmp),
            "weighted_adder_gates": len(qwa),
            "weighted_adder_depth": circuit_depth(qwa),
            "weighted_adder_qae_instances": resource_report(qwa).qae_instances,
            "rotation_gates": len(rot),
            "rotation_depth": circuit_depth(rot),
            "ramp_depth": circuit_depth(ramp),
        })
    return rows


def resource_fits(rows: list[dict]) -> dict:
    ns = [r["n"] for r in rows]
    fits = {}
    if len(ns) >= 2:
        for key in ("comparator_gates", "comparator_depth", "full_adder_comparator_gates", "weighted_adder_gates"):
            slope, intercept, r2 = linear_fit(ns, [r[key] for r in rows])
            fits[key] = {
                "linear_slope": slope,
                "linear_intercept": intercept,
                "linear_r2": r2,
                "growth_exponent": growth_exponent(ns, [r[key] for r in rows]),
            }
    return fits


def cmd_resources(args) -> int:
    if not 1 <= args.n_min <= args.n_max <= 64:
        raise InputError("need 1 <= n-min <= n-max <= 64")
    rows = resource_rows(args.n_min, args.n_max, args.theta)
    payload = {"command": "resources", "artifact_version": __version__, "rows": rows, "fits": resource_fits(rows)}
    _write(payload, rows, args)
    return EXIT_OK


def cmd_verify(args, comparator_builder=build_pruned_comparator) -> int:
    results = run_all(comparator_builder)
    text = "\n".join(r.line() for r in results) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_dump_circuit(args):
    name, n = args.circuit, args.n
    if name in ("ramp", "comparator", "full-adder", "full-adder-comparator"):
        layout = ds_layout(n)
        return {
            "ramp": build_digital_ramp,
            "comparator": build_pruned_comparator,
            "full-adder": build_full_cuccaro_adder,
            "full-adder-comparator": build_full_adder_comparator,
        }[name](layout)
    if name == "weighted-adder":
        weights = list(args.weights or binary_weights(n))
        return build_weighted_adder(weights, weighted_adder_layout(len(weights), weights))
    pmf, _, _ = load_source(args)
    if name == "encoder":
        return build_amplitude_encoder(pmf)
    if name == "ds-oracle":
        return build_ds_oracle(pmf)
    if name == "rotation":
        return build_rotation_circuit(pmf, RotationConfig(theta=args.theta, price_scale_m=args.m_scale))
    if name == "digital-cal":
        return build_digital_calibration_circuit(pmf, DigitalCalibrationConfig(lut_bits=args.lut_bits, theta=args.theta))
    if name == "qwa":
        return build_qwa_circuit(pmf, list(args.weights or binary_weights(pmf.num_qubits)))
    oracle = build_ds_oracle(pmf)
    return build_grover_operator(oracle, 2 * pmf.num_qubits + 1)


def cmd_dump(args) -> int:
    circuit = build_dump_circuit(args)
    if args.format == "json":
        text = json.dumps(circuit_to_json(circuit), indent=2) + "\n"
    else:
        text = circuit_to_text(circuit)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"compare": cmd_compare, "bsm": cmd_bsm, "resources": cmd_resources, "verify": cmd_verify, "dump": cmd_dump}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, StructuralError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
