"""Batch scenario runner.

Usage:
    cstar-fusion run <scenario-file> [--only CMD] [--out FILE] [--seed U64]
    cstar-fusion examples [--dir DIR]

``run`` executes the scenario's commands in order and emits one structured
report (stdout by default).  The exit status is 0 exactly when no command
errored; a false verdict (not a frame, not guaranteed, ...) is an ordinary
result.  ``examples`` materializes the bundled demonstration scenarios into
the working directory.

Reports are deterministic: identical scenario and seed give byte-identical
output.  Every float is emitted with 17 significant digits and the report
embeds the resolved scenario configuration.
"""

from __future__ import annotations

import argparse
import sys
import zlib
from pathlib import Path

import numpy as np

from .errors import CstarFusionError, ParseError, ValidationError
from .frame import (
    assemble_block_frame,
    block_multiplier_check,
    cone_add,
    frame_bounds,
    reconstruct,
    tightness,
)
from .morphism import transport_frame
from .oracle import brute_force_frame_check, eigen_bounds, flatten_frame_operator
from .perturbation import perturbation_check, randomly_rotated
from .scenario import Scenario, build_scenario, load_scenario

REPORT_VERSION = "cstar-fusion/1"


def dump_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits and sorted
    object keys."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{dump_json(str(k))}: {dump_json(v, indent + 1)}"
            for k, v in sorted(obj.items())
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return '"' + repr(obj) + '"'
        return format(obj, ".17g")
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _frame_report(frame) -> dict:
    bounds = frame_bounds(frame)
    payload = bounds.to_payload()
    if bounds.is_frame:
        tight = tightness(frame)
        payload.update(tight.to_payload())
    else:
        payload.update({"tight": False, "parseval": False, "constant": None})
    return payload


def _cmd_check_frame(scenario: Scenario, cmd: dict, rng) -> dict:
    bounds = frame_bounds(scenario.frames[cmd["frame"]])
    return {
        "is_frame": bounds.is_frame,
        "scalar_lower": bounds.scalar_lower,
        "scalar_upper": bounds.scalar_upper,
    }


def _cmd_bounds(scenario: Scenario, cmd: dict, rng) -> dict:
    return _frame_report(scenario.frames[cmd["frame"]])


def _cmd_reconstruct(scenario: Scenario, cmd: dict, rng) -> dict:
    result = reconstruct(scenario.frames[cmd["frame"]], scenario.vectors[cmd["vector"]])
    return {"rel_error": result.rel_error, "vector": result.vector.to_payload()}


def _cmd_tightness(scenario: Scenario, cmd: dict, rng) -> dict:
    return tightness(scenario.frames[cmd["frame"]]).to_payload()


def _cmd_multiplier(scenario: Scenario, cmd: dict, rng) -> dict:
    index_sets = [list(ix) for ix in cmd["index_sets"]]
    weights = scenario.weights[cmd["weights"]]
    result = block_multiplier_check(index_sets, weights.matrix, scenario.shape.kind)
    payload = result.to_payload()
    assembled = assemble_block_frame(scenario.shape.kind, index_sets, weights.matrix)
    bounds = frame_bounds(assembled)
    agrees = result.member == bounds.is_frame
    if result.member and bounds.is_frame:
        agrees = bool(
            agrees
            and np.allclose(
                result.tight_constant.real_parts(), bounds.lower.real_parts(), atol=1e-10
            )
            and np.allclose(
                result.tight_constant.real_parts(), bounds.upper.real_parts(), atol=1e-10
            )
        )
    payload["assembled_scalar_lower"] = bounds.scalar_lower
    payload["assembled_scalar_upper"] = bounds.scalar_upper
    payload["agrees_with_frame_bounds"] = agrees
    return payload


def _cmd_cone(scenario: Scenario, cmd: dict, rng) -> dict:
    summed = cone_add(scenario.frames[cmd["frame"]], scenario.weights[cmd["weights"]])
    return _frame_report(summed)


def _cmd_transport(scenario: Scenario, cmd: dict, rng) -> dict:
    mapping = scenario.maps[cmd["map"]]
    moved = transport_frame(mapping, scenario.frames[cmd["frame"]])
    return {"nu": mapping.nu().to_payload(), "bounds": _frame_report(moved)}


def _cmd_perturb(scenario: Scenario, cmd: dict, rng) -> dict:
    spec = scenario.perturbations[cmd["perturbation"]]
    frame = scenario.frames[spec.frame]
    if spec.candidates is not None:
        candidates = [scenario.submodules[name] for name in spec.candidates]
    else:
        rotate_seed = spec.rotate.get("seed")
        if rotate_seed is None:
            stream = np.random.default_rng(
                [scenario.seed, zlib.crc32(cmd["perturbation"].encode())]
            )
        else:
            stream = np.random.default_rng(rotate_seed)
        candidates = randomly_rotated(frame.submodules, spec.rotate["max_angle"], stream)
    return perturbation_check(frame, candidates, p=cmd.get("p", 2.0)).to_payload()


def _cmd_verify_oracle(scenario: Scenario, cmd: dict, rng) -> dict:
    frame = scenario.frames[cmd["frame"]]
    samples = cmd.get("samples", 200)
    bounds = frame_bounds(frame)
    eig = eigen_bounds(flatten_frame_operator(frame))
    slack = 1e-10 * max(1.0, bounds.scalar_upper)
    matches = (
        abs(eig["lambda_min"] - bounds.scalar_lower) <= slack
        and abs(eig["lambda_max"] - bounds.scalar_upper) <= slack
    )
    sample_ok = brute_force_frame_check(frame, samples, rng=rng)
    return {
        "lambda_min": eig["lambda_min"],
        "lambda_max": eig["lambda_max"],
        "matches_bounds": bool(matches),
        "samples": samples,
        "sample_check": bool(sample_ok),
    }


_HANDLERS = {
    "check-frame": _cmd_check_frame,
    "bounds": _cmd_bounds,
    "reconstruct": _cmd_reconstruct,
    "tightness": _cmd_tightness,
    "multiplier": _cmd_multiplier,
    "cone": _cmd_cone,
    "transport": _cmd_transport,
    "perturb": _cmd_perturb,
    "verify-oracle": _cmd_verify_oracle,
}


def run_scenario(
    scenario: Scenario, only: str | None = None, seed: int | None = None
) -> tuple[dict, bool]:
    """Execute the scenario's commands and build the report document.

    Returns the report and a flag that is True when no command errored.
    Each command draws randomness from a stream derived from the effective
    seed and the command's position, so ``--only`` filtering does not
    change any individual result.
    """
    if seed is not None:
        scenario = build_scenario({**scenario.raw, "seed": seed})
    results = []
    ok = True
    for index, cmd in enumerate(scenario.commands):
        name = cmd["run"]
        if only is not None and name != only:
            continue
        entry = {"index": index, "command": name}
        entry.update({k: v for k, v in cmd.items() if k != "run"})
        rng = np.random.default_rng([scenario.seed, index])
        try:
            entry["output"] = _HANDLERS[name](scenario, cmd, rng)
        except CstarFusionError as exc:
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
            ok = False
        results.append(entry)
    report = {
        "version": REPORT_VERSION,
        "seed": scenario.seed,
        "scenario": scenario.raw,
        "results": results,
        "ok": ok,
    }
    return report, ok


# -- bundled example scenarios ----------------------------------------------


def _unit_vector(m: int, index: int) -> list[list[float]]:
    return [[1.0 if i == index else 0.0, 0.0] for i in range(m)]


def _example_block_tight(kind: str) -> dict:
    if kind == "complex":
        probe = [[[1, 0]], [[2, 0]], [[0, 1]]]
    else:
        probe = [[1, 0, 0, 0], [2, 0, 0, 0], [0, 0, 1, 0]]
    return {
        "seed": 2024,
        "algebra": {"kind": kind, "fibers": 3},
        "module": {"dims": [1, 1, 1]},
        "submodules": {"u1": {"blocks": [1, 2]}, "u2": {"blocks": [2, 3]}},
        "weights": {"ones": [[1, 1, 1], [1, 1, 1]], "double": [[2, 2, 2], [2, 2, 2]]},
        "frames": {"f": {"submodules": ["u1", "u2"], "weights": "ones"}},
        "vectors": {"x": probe},
        "commands": [
            {"run": "check-frame", "frame": "f"},
            {"run": "bounds", "frame": "f"},
            {"run": "tightness", "frame": "f"},
            {"run": "reconstruct", "frame": "f", "vector": "x"},
            {"run": "multiplier", "index_sets": [[1, 2], [2, 3]], "weights": "ones"},
            {"run": "cone", "frame": "f", "weights": "double"},
            {"run": "verify-oracle", "frame": "f", "samples": 200},
        ],
    }


def _example_angle_counterexample() -> dict:
    m = 8
    u0 = [_unit_vector(m, i) for i in (3, 7)]
    v0 = [_unit_vector(m, i) for i in (1, 3, 5, 7)]
    u0_perp = [_unit_vector(m, i) for i in (0, 1, 2, 4, 5, 6)]
    v0_perp = [_unit_vector(m, i) for i in (0, 2, 4, 6)]
    return {
        "seed": 7,
        "algebra": {"kind": "complex", "fibers": 1},
        "module": {"dims": [m]},
        "submodules": {
            "u0": {"span": [u0]},
            "v0": {"span": [v0]},
            "u0_perp": {"span": [u0_perp]},
            "v0_perp": {"span": [v0_perp]},
        },
        "weights": {"ones": [[1], [1]]},
        "frames": {"f": {"submodules": ["u0", "u0_perp"], "weights": "ones"}},
        "perturbations": {"swap": {"frame": "f", "candidates": ["v0", "v0_perp"]}},
        "commands": [
            {"run": "bounds", "frame": "f"},
            {"run": "perturb", "perturbation": "swap"},
        ],
    }


def _example_perturbation_demo() -> dict:
    inv = 2.0 ** -0.5
    return {
        "seed": 99,
        "algebra": {"kind": "complex", "fibers": 1},
        "module": {"dims": [2]},
        "submodules": {
            "s1": {"span": [[[[1, 0], [0, 0]]]]},
            "s2": {"span": [[[[0, 0], [1, 0]]]]},
            "s3": {"span": [[[[inv, 0], [inv, 0]]]]},
        },
        "weights": {"ones": [[1], [1], [1]]},
        "frames": {"f": {"submodules": ["s1", "s2", "s3"], "weights": "ones"}},
        "vectors": {"x": [[[1, 0], [0, 0]]]},
        "maps": {"stretch": {"scales": [2]}},
        "perturbations": {"wiggle": {"frame": "f", "rotate": {"max_angle": 0.3}}},
        "commands": [
            {"run": "bounds", "frame": "f"},
            {"run": "reconstruct", "frame": "f", "vector": "x"},
            {"run": "transport", "frame": "f", "map": "stretch"},
            {"run": "perturb", "perturbation": "wiggle"},
            {"run": "verify-oracle", "frame": "f", "samples": 200},
        ],
    }


EXAMPLE_SCENARIOS = {
    "block_tight.json": _example_block_tight("complex"),
    "quaternion_tight.json": _example_block_tight("quaternion"),
    "angle_counterexample.json": _example_angle_counterexample(),
    "perturbation_demo.json": _example_perturbation_demo(),
}


def write_examples(directory: str | Path) -> list[Path]:
    """Materialize the bundled scenarios; returns the written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, doc in EXAMPLE_SCENARIOS.items():
        target = directory / name
        target.write_text(dump_json(doc) + "\n")
        written.append(target)
    return written


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cstar-fusion", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run_parser = sub.add_parser("run", help="execute a scenario file")
    run_parser.add_argument("scenario", type=Path)
    run_parser.add_argument("--only", default=None, help="run only this command")
    run_parser.add_argument("--out", type=Path, default=None, help="report file (default stdout)")
    run_parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")

    examples_parser = sub.add_parser("examples", help="write the bundled example scenarios")
    examples_parser.add_argument("--dir", type=Path, default=Path("."))

    args = parser.parse_args(argv)

    if args.subcommand == "examples":
        for path in write_examples(args.dir):
            print(path)
        return 0

    try:
        scenario = load_scenario(args.scenario)
        report, ok = run_scenario(scenario, only=args.only, seed=args.seed)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dump_json(report) + "\n"
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
