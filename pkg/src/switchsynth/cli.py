"""Command-line interface.

Exit codes: 0 ran (a NoneExists verdict included), 2 input error,
3 certificate error, 4 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import scenarios
from .certificates import DEFAULT_MARGIN
from .circuit_synth import Status, synthesize_circuit
from .cycle_synth import detect_negative_cycle, most_negative_cycle_via_lp_support
from .digraph import SCHEMA_VERSION, SwitchingDigraph, build_with_constants
from .errors import CertificateError, DeadEnd, Infeasible, InputError, NotFullRank, SolverError
from .random_synth import (
    RandomGraphModel,
    assign_weights,
    azuma_bound,
    experiment_csv,
    generate_nicely_connected,
    monte_carlo_experiment,
    random_cycle,
)
from .simulate import (
    DEFAULT_BOUNDEDNESS,
    DEFAULT_DECAY,
    DEFAULT_RADIUS,
    DEFAULT_SAMPLES,
    DEFAULT_STEPS,
    norms_csv,
    signal_from_walk,
    verify_gas,
)
from .walks import Walk, xi_bar

EXIT_OK, EXIT_INPUT, EXIT_CERT, EXIT_SOLVER = 0, 2, 3, 4

_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": {"type": "number"}}}

INPUT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "subsystems", "edges"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "subsystems": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["index", "A"],
                "additionalProperties": False,
                "properties": {"index": {"type": "integer"}, "A": _matrix},
            },
        },
        "edges": {
            "type": "array",
            "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "integer"}},
        },
        "certificates": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "lambda": {
                    "type": "object",
                    "patternProperties": {r"^-?\d+$": {"type": "number", "exclusiveMinimum": 0}},
                    "additionalProperties": False,
                },
                "mu": {
                    "type": "object",
                    "patternProperties": {r"^-?\d+,-?\d+$": {"type": "number", "exclusiveMinimum": 0}},
                    "additionalProperties": False,
                },
            },
        },
    },
}

DIGRAPH_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "vertices", "stable", "unstable", "vertex_weights", "edges"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "vertices": {"type": "array", "items": {"type": "integer"}},
        "stable": {"type": "array", "items": {"type": "integer"}},
        "unstable": {"type": "array", "items": {"type": "integer"}},
        "vertex_weights": {
            "type": "object",
            "patternProperties": {r"^-?\d+$": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "to", "weight"],
                "additionalProperties": False,
                "properties": {"from": {"type": "integer"}, "to": {"type": "integer"}, "weight": {"type": "number"}},
            },
        },
    },
}

RESULT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "method", "status", "walk", "xi_bar"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "method": {"enum": ["circuit", "cycle", "lp-then-cycle", "random"]},
        "status": {"enum": [s.value for s in Status]},
        "walk": {"type": ["array", "null"], "items": {"type": "integer"}},
        "xi_bar": {"type": ["number", "null"]},
        "bound": {"type": ["number", "null"]},
        "eta": {"type": ["array", "null"], "items": {"type": "integer"}},
        "objective": {"type": ["number", "null"]},
        "components": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "runtime_s": {"type": "number"},
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "n_stable", "A", "B", "alpha", "beta"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": 1},
        "n_stable": {"type": "integer", "minimum": 1},
        "n_unstable": {"type": "integer", "minimum": 0},
        "phi": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"coef": {"type": "number"}, "power": {"type": "number"}},
        },
        "A": {"type": "number"},
        "B": {"type": "number"},
        "alpha": {"type": "number"},
        "beta": {"type": "number"},
        "out_degree": {"type": ["integer", "null"], "minimum": 0},
        "self_loops": {"type": "boolean"},
    },
}


def load_json(path: str | Path, schema: dict) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{path}: schema violation: {exc.message}") from None
    return data


def dump_json(data: dict, path: str | Path | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def family_from_input(doc: dict) -> dict[int, np.ndarray]:
    family = {}
    for s in doc["subsystems"]:
        i = int(s["index"])
        if i in family:
            raise InputError(f"duplicate subsystem index {i}")
        A = np.asarray(s["A"], dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError(f"A_{i} is not square")
        family[i] = A
    dims = {A.shape for A in family.values()}
    if len(dims) != 1:
        raise InputError("subsystem matrices have different dimensions")
    for i, A in family.items():
        if np.linalg.matrix_rank(A) < A.shape[0]:
            raise NotFullRank(f"NotFullRank: A_{i} is singular")
    return family


def digraph_from_input(doc: dict, margin: float = DEFAULT_MARGIN) -> SwitchingDigraph:
    family = family_from_input(doc)
    certs = doc.get("certificates", {})
    lambdas = {int(k): float(v) for k, v in certs.get("lambda", {}).items()}
    mus = {}
    for k, v in certs.get("mu", {}).items():
        i, j = (int(p) for p in k.split(","))
        mus[(i, j)] = float(v)
    return build_with_constants(family, doc["edges"], lambdas, mus, margin=margin)


def _status_for_cost(cost: float | None) -> Status:
    return Status.CONTRACTIVE if cost is not None and cost < 0 else Status.NONE_EXISTS


def synthesize(G: SwitchingDigraph, method: str, seed: int = 0, model: RandomGraphModel | None = None) -> dict:
    """Run one synthesis method and shape the result document."""
    t0 = time.perf_counter()
    out: dict = {"schema_version": SCHEMA_VERSION, "method": method}
    walk: Walk | None = None
    try:
        if method == "circuit":
            sol = synthesize_circuit(G)
            walk = sol.circuit
            out["objective"] = sol.objective
            out["eta"] = None if sol.eta is None else [int(v) for v in sol.eta]
            out["components"] = [W.to_list() for W in sol.components]
        elif method == "cycle":
            walk = detect_negative_cycle(G)
        elif method == "lp-then-cycle":
            hit = most_negative_cycle_via_lp_support(G)
            walk = None if hit is None else hit[0]
        elif method == "random":
            if model is not None:
                out["bound"] = azuma_bound(model)
            walk = random_cycle(G, seed)
            if not xi_bar(walk, G) < 0:
                walk = None
        else:
            raise InputError(f"unknown method {method!r}")
    except (Infeasible, DeadEnd):
        # no closed walk at all, or the randomized walk cannot close
        walk = None
    cost = None if walk is None else xi_bar(walk, G)
    out["status"] = _status_for_cost(cost).value
    out["walk"] = None if walk is None else walk.to_list()
    out["xi_bar"] = cost
    out["runtime_s"] = time.perf_counter() - t0
    return out


def cmd_analyze(args) -> int:
    doc = load_json(args.input, INPUT_SCHEMA)
    G = digraph_from_input(doc, margin=args.margin)
    data = G.to_dict()
    dump_json(data, args.output)
    if args.output not in (None, "-"):
        print(f"stable={sorted(G.stable)} unstable={sorted(G.unstable)}")
        for j in G.vertices:
            print(f"w({j}) = {G.vertex_weight[j]:.4f}")
        for (i, j), w in G.edge_weight.items():
            print(f"w({i},{j}) = {w:.4f}  cost = {G.cost(i, j):.4f}")
        if not G.stable or not any(i in G.stable for (i, _) in G.edges):
            print("xi: Undefined for every walk (no stable vertex is ever visited)")
    return EXIT_OK


def cmd_synthesize(args) -> int:
    G = SwitchingDigraph.from_dict(load_json(args.digraph, DIGRAPH_SCHEMA))
    model = None
    if args.model:
        model = RandomGraphModel.from_dict(load_json(args.model, MODEL_SCHEMA))
    result = synthesize(G, args.method, seed=args.seed, model=model)
    if args.no_timing:
        result.pop("runtime_s")
    dump_json(result, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    doc = load_json(args.input, INPUT_SCHEMA)
    result = load_json(args.result, RESULT_SCHEMA)
    family = family_from_input(doc)
    if result["walk"] is None:
        raise InputError("result holds no walk to simulate")
    W = Walk(result["walk"])
    G = digraph_from_input(doc)
    sigma = signal_from_walk(W.check(G), G)
    report = verify_gas(
        family,
        sigma,
        n_initial=args.samples,
        box_radius=args.radius,
        T=args.steps,
        decay_threshold=args.decay,
        rng_seed=args.seed,
        boundedness_factor=args.boundedness,
    )
    Path(args.norms).write_text(norms_csv(report.norms))
    dump_json(report.to_dict(), args.report)
    return EXIT_OK


def cmd_experiment(args) -> int:
    model = RandomGraphModel.from_dict(load_json(args.model, MODEL_SCHEMA))
    lengths = [int(x) for x in args.lengths.split(",")] if args.lengths else None
    rows = monte_carlo_experiment(model, lengths=lengths, trials=args.trials, rng_seed=args.seed, n_runs=args.runs)
    text = experiment_csv(rows)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


def cmd_generate(args) -> int:
    model = RandomGraphModel.from_dict(load_json(args.model, MODEL_SCHEMA))
    skel = generate_nicely_connected(model, args.seed)
    G = assign_weights(skel, model, args.seed)
    dump_json(G.to_dict(), args.output)
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.name == "example2-model":
        doc = scenarios.example2_model()
    else:
        doc = scenarios.SCENARIOS[args.name]()
    dump_json(doc, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="switchsynth", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="build the weighted switching digraph")
    a.add_argument("input")
    a.add_argument("-o", "--output", default="-")
    a.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synthesize", help="find a contractive closed walk")
    s.add_argument("digraph")
    s.add_argument("--method", choices=["circuit", "cycle", "lp-then-cycle", "random"], default="circuit")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--model", help="random graph model, for the probability bound")
    s.add_argument("--no-timing", action="store_true", help="omit runtime for byte-stable output")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_synthesize)

    m = sub.add_parser("simulate", help="simulate the periodic switching signal")
    m.add_argument("input")
    m.add_argument("result")
    m.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    m.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    m.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    m.add_argument("--decay", type=float, default=DEFAULT_DECAY)
    m.add_argument("--boundedness", type=float, default=DEFAULT_BOUNDEDNESS)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--norms", default="norms.csv")
    m.add_argument("--report", default="report.json")
    m.set_defaults(func=cmd_simulate)

    e = sub.add_parser("experiment", help="Monte Carlo contractivity experiment")
    e.add_argument("model")
    e.add_argument("--lengths", help="comma-separated cycle lengths")
    e.add_argument("--trials", type=int, default=1000)
    e.add_argument("--runs", type=int, default=50, help="randomized walks when --lengths is absent")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("-o", "--output", default="fig2.csv")
    e.set_defaults(func=cmd_experiment)

    g = sub.add_parser("generate", help="sample a nicely connected weighted digraph")
    g.add_argument("model")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("scenario", help="write a built-in example input")
    c.add_argument("name", choices=sorted(scenarios.SCENARIOS) + ["example2-model"])
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_scenario)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CertificateError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERT
    except InputError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
