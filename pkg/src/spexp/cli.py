"""Command-line entry point.

Subcommands: gen, expansion, decompose, verify, embed. Every output file
embeds a run manifest (subcommand, parameters, master seed, tool version);
wall-clock duration goes to stderr so reruns with the same manifest produce
byte-identical payloads. Exit codes: 0 success, 2 input error, 3 infeasible
configuration, 4 numerical failure. SPEXP_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .channels import random_unitary_tuple, tuple_from_permutations
from .embed import (
    OptimizerConfig,
    distortion_lower_bound,
    l2_expansion_oracle,
    lp_expansion_estimate,
    sp_expansion_estimate,
)
from .errors import (
    DimensionTooLarge,
    InstanceTooLarge,
    NumericalFailure,
    SpexpError,
)
from .graphs import (
    BRUTE_FORCE_LIMIT,
    build_complete,
    build_cycle,
    build_hypercube,
    cut_oracle_l1,
    decompose_permutations,
    edge_expansion_bruteforce,
    metric_ratio,
    random_regular,
    shortest_path_metric,
)
from .search import (
    SearchConfig,
    estimate_expansion,
    minimize_coordinate,
    minimize_random,
    minimize_riemannian,
)
from .serialize import (
    dumps_canonical,
    embedding_to_json,
    estimate_to_json,
    graph_from_json,
    graph_to_json,
    permutations_from_json,
    permutations_to_json,
    tuple_from_json,
    tuple_to_json,
)
from .verify import SweepConfig, sweep

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _manifest(subcommand: str, params: dict, seed) -> dict:
    clean = {k: v for k, v in params.items() if v is not None}
    return {
        "subcommand": subcommand,
        "parameters": clean,
        "seed": seed,
        "version": __version__,
    }


def _emit(document: dict, out_path: str | None, quiet: bool = False) -> None:
    text = dumps_canonical(document)
    if out_path:
        tmp = out_path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, out_path)
    if not quiet:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpexpError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    kind = args.kind
    seed = args.seed
    if kind == "cycle":
        payload = {"graph": graph_to_json(build_cycle(args.n))}
    elif kind == "complete":
        payload = {"graph": graph_to_json(build_complete(args.n))}
    elif kind == "hypercube":
        payload = {"graph": graph_to_json(build_hypercube(args.k))}
    elif kind == "random-regular":
        g = random_regular(
            args.n, args.d, seed, symmetric=not args.directed, allow_loops=not args.no_loops
        )
        payload = {"graph": graph_to_json(g)}
    elif kind == "unitary-tuple":
        payload = {"tuple": tuple_to_json(random_unitary_tuple(args.n, args.d, seed))}
    elif kind == "permutation-tuple":
        if args.perms:
            perms = permutations_from_json(_load_json(args.perms))
        else:
            rng = np.random.default_rng(seed)
            perms = [rng.permutation(args.n).tolist() for _ in range(args.d)]
        t = tuple_from_permutations(perms)
        payload = {"tuple": tuple_to_json(t), "permutations": permutations_to_json(perms)}
    else:  # pragma: no cover - argparse restricts choices
        raise SpexpError(f"unknown kind {kind}")
    params = {
        "kind": kind,
        "n": getattr(args, "n", None),
        "d": getattr(args, "d", None),
        "k": getattr(args, "k", None),
        "perms": getattr(args, "perms", None),
    }
    _emit({"manifest": _manifest("gen", params, seed), **payload}, args.out, args.quiet)
    return EXIT_OK


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------


def _cmd_expansion(args) -> int:
    doc = _load_json(args.input)
    params = {
        "input": args.input,
        "mode": args.mode,
        "p": args.p,
        "strategy": args.strategy,
        "k": args.k,
        "samples": args.samples,
        "restarts": args.restarts,
        "max_iters": args.max_iters,
        "epsilon": args.epsilon,
    }
    if args.mode == "classical":
        g = graph_from_json(doc.get("graph", doc))
        value, witness = edge_expansion_bruteforce(g)
        result = {"value": value, "witness_subset": witness, "mode": "classical"}
    else:
        t = tuple_from_json(doc.get("tuple", doc))
        if args.strategy == "coordinate":
            est = minimize_coordinate(t, args.p, mode=args.mode)
        elif args.mode != "sp":
            raise InstanceTooLarge(
                f"mode {args.mode!r} supports only the coordinate strategy"
            )
        else:
            strategy = "random-sample" if args.strategy == "random" else "riemannian"
            cfg = SearchConfig(
                strategy=strategy,
                k=args.k if args.k is not None else "all",
                samples=args.samples,
                restarts=args.restarts,
                max_iters=args.max_iters,
                epsilon=args.epsilon,
                seed=args.seed,
            )
            if cfg.k == "all":
                est = estimate_expansion(t, args.p, cfg)
            elif strategy == "random-sample":
                est = minimize_random(t, args.p, cfg)
            else:
                est = minimize_riemannian(t, args.p, cfg)
        result = {"estimate": estimate_to_json(est), "mode": args.mode}
    _emit(
        {"manifest": _manifest("expansion", params, args.seed), "result": result},
        args.out,
        args.quiet,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------


def _cmd_decompose(args) -> int:
    doc = _load_json(args.input)
    g = graph_from_json(doc.get("graph", doc))
    perms = decompose_permutations(g)
    recon = np.zeros((g.n, g.n), dtype=np.int64)
    for perm in perms:
        recon[perm, np.arange(g.n)] += 1
    if np.any(recon != g.adjacency):
        raise NumericalFailure("decomposition failed to reconstruct the adjacency")
    params = {"input": args.input}
    _emit(
        {
            "manifest": _manifest("decompose", params, None),
            **permutations_to_json(perms),
        },
        args.out,
        args.quiet,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    cfg = SweepConfig(
        instances=args.instances,
        n_range=(args.n_min, args.n_max),
        d_range=(args.d_min, args.d_max),
        p_range=(args.p_min, args.p_max),
        seed=args.seed,
    )
    report = sweep(cfg)
    params = {
        "instances": args.instances,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "d_min": args.d_min,
        "d_max": args.d_max,
        "p_min": args.p_min,
        "p_max": args.p_max,
    }
    _emit(
        {"manifest": _manifest("verify", params, args.seed), "result": report},
        args.out,
        args.quiet,
    )
    return EXIT_OK if report["all_pass"] else 1


# ---------------------------------------------------------------------------
# embed
# ---------------------------------------------------------------------------


def _cmd_embed(args) -> int:
    g = graph_from_json(_load_json(args.input).get("graph", _load_json(args.input)))
    cfg = OptimizerConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
    )
    if args.target == "lp":
        est = lp_expansion_estimate(g, args.p, args.m or g.n, cfg)
    else:
        est = sp_expansion_estimate(g, args.p, args.m or g.n, cfg)
    r_rho = metric_ratio(g, shortest_path_metric(g), args.p)
    if args.p == 1.0 and g.n <= BRUTE_FORCE_LIMIT:
        h_low, _ = cut_oracle_l1(g)
        bound_kind = "oracle"
    elif args.p == 2.0:
        h_low = l2_expansion_oracle(g)
        bound_kind = "oracle"
    else:
        h_low = est.value
        bound_kind = "heuristic"
    bound = distortion_lower_bound(g, args.p, h_low)
    result = {
        "estimate": est.value,
        "target": args.target,
        "p": args.p,
        "m": args.m or g.n,
        "metric_ratio": r_rho,
        "distortion_lower_bound": bound,
        "bound_kind": bound_kind,
        "witness": embedding_to_json(est.witness),
    }
    params = {
        "input": args.input,
        "target": args.target,
        "p": args.p,
        "m": args.m,
        "restarts": args.restarts,
        "max_iters": args.max_iters,
    }
    _emit(
        {"manifest": _manifest("embed", params, args.seed), "result": result},
        args.out,
        args.quiet,
    )
    if args.csv:
        line = "n,d,target,p,m,estimate,metric_ratio,bound,bound_kind\n"
        row = (
            f"{g.n},{g.d},{args.target},{args.p},{args.m or g.n},"
            f"{est.value!r},{r_rho!r},{bound!r},{bound_kind}\n"
        )
        write_header = not os.path.exists(args.csv)
        with open(args.csv, "a") as fh:
            if write_header:
                fh.write(line)
            fh.write(row)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spexp",
        description="Expansion of bistochastic matrix tuples and regular graphs",
    )
    parser.add_argument("--version", action="version", version=f"spexp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate graphs and tuples")
    g.add_argument(
        "kind",
        choices=[
            "cycle",
            "complete",
            "hypercube",
            "random-regular",
            "unitary-tuple",
            "permutation-tuple",
        ],
    )
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--k", type=int, default=3, help="hypercube dimension")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--perms", help="JSON permutations file for permutation-tuple")
    g.add_argument("--directed", action="store_true", help="asymmetric random graph")
    g.add_argument("--no-loops", action="store_true", help="forbid loops")
    g.add_argument("--out")
    g.add_argument("--quiet", action="store_true")
    g.set_defaults(func=_cmd_gen)

    e = sub.add_parser("expansion", help="minimize an expansion functional")
    e.add_argument("input", help="tuple or graph JSON file")
    e.add_argument("--mode", choices=["sp", "dim", "Q", "classical"], default="sp")
    e.add_argument("--p", type=float, default=2.0)
    e.add_argument(
        "--strategy", choices=["coordinate", "random", "riemannian"], default="coordinate"
    )
    e.add_argument("--k", type=int, default=None, help="fixed subspace dimension")
    e.add_argument("--samples", type=int, default=100)
    e.add_argument("--restarts", type=int, default=8)
    e.add_argument("--max-iters", type=int, default=200)
    e.add_argument("--epsilon", type=float, default=1e-10)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.add_argument("--quiet", action="store_true")
    e.set_defaults(func=_cmd_expansion)

    d = sub.add_parser("decompose", help="decompose a regular graph into permutations")
    d.add_argument("input")
    d.add_argument("--out")
    d.add_argument("--quiet", action="store_true")
    d.set_defaults(func=_cmd_decompose)

    v = sub.add_parser("verify", help="run the inequality sweep")
    v.add_argument("--instances", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n-min", type=int, default=4)
    v.add_argument("--n-max", type=int, default=16)
    v.add_argument("--d-min", type=int, default=2)
    v.add_argument("--d-max", type=int, default=5)
    v.add_argument("--p-min", type=float, default=1.0)
    v.add_argument("--p-max", type=float, default=6.0)
    v.add_argument("--out")
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=_cmd_verify)

    m = sub.add_parser("embed", help="embedding expansion estimate and distortion bound")
    m.add_argument("input")
    m.add_argument("--target", choices=["lp", "sp"], default="lp")
    m.add_argument("--p", type=float, default=1.0)
    m.add_argument("--m", type=int, default=None, help="target dimension (default n)")
    m.add_argument("--restarts", type=int, default=6)
    m.add_argument("--max-iters", type=int, default=300)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--csv", help="append a CSV row for batch experiments")
    m.add_argument("--out")
    m.add_argument("--quiet", action="store_true")
    m.set_defaults(func=_cmd_embed)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        code = args.func(args)
    except (InstanceTooLarge, DimensionTooLarge) as exc:
        print(f"spexp: infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalFailure as exc:
        print(f"spexp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SpexpError as exc:
        print(f"spexp: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"spexp: {args.command} finished in {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
