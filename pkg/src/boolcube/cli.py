"""Command-line front end.

Exit codes: 0 success, 1 verification-check failure, 2 usage error,
3 refusal by a resource guard.  All randomized subcommands take --seed
(default from BOOLCUBE_SEED) and produce byte-identical output for a fixed
seed and fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import pcp, testing, verify
from .errors import ResourceLimitError
from .functions import (
    fn_from_json,
    fn_to_json,
    load_fn,
    make_block_and,
    make_chi,
    make_long_code,
    make_quadratic_phase,
    random_fn,
    save_fn,
    fourier,
)
from .gowers import (
    collection_from_json,
    gowers_ip,
    gowers_ip_mc,
    gowers_u,
    gowers_u_mc,
    gowers_u_naive,
    linear_gowers_ip,
)
from .influence import cross_influence, degree_influence, influence, influence_profile


def _print_json(obj) -> None:
    sys.stdout.write(verify._json_value(obj) + "\n")


def _default_seed() -> int:
    return int(os.environ.get("BOOLCUBE_SEED", "0"))


def _parse_subset(text: str) -> int:
    if not text:
        return 0
    mask = 0
    for part in text.split(","):
        mask |= 1 << (int(part) - 1)
    return mask


def _gowers_result_obj(res) -> dict:
    return {"value": res.value, "method": res.method, "samples": res.samples, "stderr": res.stderr}


def _acceptance_obj(rep) -> dict:
    obj = {
        "probability": rep.probability,
        "method": rep.method,
        "samples": rep.samples,
        "stderr": rep.stderr,
    }
    if rep.terms is not None:
        obj["terms"] = rep.terms
    return obj


def _cmd_fn(args) -> int:
    if args.fn_command == "gen":
        if args.kind == "chi":
            f = make_chi(args.n, _parse_subset(args.subset))
        elif args.kind == "long-code":
            f = make_long_code(args.n, args.coord)
        elif args.kind == "quadratic-phase":
            f = make_quadratic_phase(args.n)
        elif args.kind == "block-and":
            f = make_block_and(args.n, args.block)
        else:
            f = random_fn(args.n, args.mode, args.seed)
        if args.out:
            save_fn(f, args.out, compact=args.compact)
        else:
            _print_json(fn_to_json(f, compact=args.compact))
        return 0
    f = load_fn(args.file)
    spectrum = fourier(f)
    _print_json({"n": spectrum.n, "coeffs": [float(c) for c in spectrum.coeffs]})
    return 0


def _cmd_influence(args) -> int:
    f = load_fn(args.file)
    if args.collection:
        fns = [f] + [load_fn(p) for p in args.collection]
        vals = [cross_influence(fns, i, args.t) for i in range(1, f.n + 1)]
        arg = int(np.argmax(vals)) + 1
        _print_json({"values": vals, "argmax": arg, "max_value": vals[arg - 1]})
        return 0
    report = influence_profile(f, args.degree)
    _print_json(
        {"values": list(report.values), "argmax": report.argmax, "max_value": report.max_value}
    )
    return 0


def _cmd_gowers(args) -> int:
    f = load_fn(args.file)
    if args.mc:
        res = gowers_u_mc(f, args.dim, args.mc, args.seed, args.threads)
    elif args.naive:
        res = gowers_u_naive(f, args.dim, args.override_guard)
    else:
        res = gowers_u(f, args.dim, args.override_guard)
    _print_json(_gowers_result_obj(res))
    return 0


def _cmd_ip(args) -> int:
    with open(args.file) as fh:
        c = collection_from_json(json.load(fh))
    if args.linear:
        res = linear_gowers_ip(c, args.override_guard)
    elif args.mc:
        res = gowers_ip_mc(c, args.mc, args.seed, args.threads)
    else:
        res = gowers_ip(c, args.override_guard)
    _print_json(_gowers_result_obj(res))
    return 0


def _cmd_test(args) -> int:
    if args.test_command == "blr":
        f = load_fn(args.fn)
        rep = testing.run_blr_mc(f, args.mc, args.seed, args.threads) if args.mc else testing.exact_blr(f)
    elif args.test_command == "blr3":
        f, g, h = (load_fn(p) for p in args.fns)
        if args.mc:
            rep = testing.run_3fn_blr_mc(f, g, h, args.gamma, args.mc, args.seed, args.threads)
        else:
            rep = testing.exact_3fn_blr(f, g, h, args.gamma)
    elif args.test_command == "h":
        H = testing.load_hypergraph(args.hypergraph)
        f = load_fn(args.fn)
        if args.mc:
            rep = testing.run_h_test_mc(H, f, args.mc, args.seed, args.threads)
        else:
            rep = testing.exact_h_test(H, f, args.override_guard)
    else:
        H = testing.load_hypergraph(args.hypergraph)
        with open(args.inputs) as fh:
            inputs = testing.inputs_from_json(json.load(fh))
        if args.mc:
            rep = testing.run_noisy_h_test_mc(H, args.gamma, inputs, args.mc, args.seed, args.threads)
        else:
            rep = testing.exact_noisy_h_test(H, args.gamma, inputs, args.override_guard)
    _print_json(_acceptance_obj(rep))
    return 0


def _cmd_verify(args) -> int:
    report = verify.run_suite(args.suite, args.n, args.trials, args.seed)
    if args.json:
        verify.write_report(report, args.json, "json")
    if args.csv:
        verify.write_report(report, args.csv, "csv")
    for rec in report.records:
        status = "PASS" if rec.passed else "FAIL"
        print(f"{status} {rec.lemma} [{rec.instance}] margin={rec.margin:.3e}")
    print(f"{report.suite}: {report.total - report.failed}/{report.total} checks passed")
    return 0 if report.all_passed else 1


def _cmd_ugame(args) -> int:
    game = pcp.load_game(args.file)
    rep = pcp.solve_unique_game(game, args.override_guard)
    _print_json(
        {
            "strong_value": rep.strong_value,
            "weak_value": rep.weak_value,
            "best_assignment": {
                game.variables[i]: int(a) for i, a in enumerate(rep.best_assignment)
            },
        }
    )
    return 0


def _cmd_pcp(args) -> int:
    game = pcp.load_game(args.game)
    H = testing.load_hypergraph(args.hypergraph)
    if args.proof == "honest":
        solved = pcp.solve_unique_game(game, args.override_guard)
        proof = pcp.honest_proof(game, solved.best_assignment)
    elif args.proof == "random":
        proof = pcp.random_proof(game, args.seed)
    else:
        with open(args.proof) as fh:
            proof = pcp.proof_from_json(json.load(fh))
    report = pcp.run_composed_mc(game, proof, H, args.gamma, args.rounds, args.seed, args.threads)
    obj = {
        "acceptance": report.acceptance,
        "stderr": report.stderr,
        "rounds": report.rounds,
        "baseline": report.baseline,
    }
    if args.exact:
        obj["exact_acceptance"] = pcp.exact_composed_acceptance(
            game, proof, H, args.gamma, args.override_guard
        )
    decoded = pcp.decode(proof, args.decode_degree, args.decode_tau, args.seed)
    strong = weak = 0
    for c in game.constraints:
        s, w = pcp._satisfaction(c, decoded)
        strong += s
        weak += w
    obj["decoded"] = {
        "assignment": {game.variables[i]: int(a) for i, a in enumerate(decoded)},
        "strong_fraction": strong / len(game.constraints),
        "weak_fraction": weak / len(game.constraints),
    }
    _print_json(obj)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boolcube",
        description="Fourier analysis, influence, Gowers uniformity, linearity and "
        "long-code test simulators, and a desk-scale composed verifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    p_fn = sub.add_parser("fn", help="generate function tables or transform them")
    fn_sub = p_fn.add_subparsers(dest="fn_command", required=True)
    p_gen = fn_sub.add_parser("gen", help="write a function table as JSON")
    p_gen.add_argument(
        "--kind",
        required=True,
        choices=["chi", "long-code", "quadratic-phase", "block-and", "random"],
    )
    p_gen.add_argument("--n", type=int, required=True, help="arity")
    p_gen.add_argument("--subset", default="", help="comma-separated coordinates for chi")
    p_gen.add_argument("--coord", type=int, default=1, help="coordinate for long-code")
    p_gen.add_argument("--block", type=int, default=2, help="block size for block-and")
    p_gen.add_argument("--mode", default="sign", choices=["sign", "bounded"], help="random mode")
    p_gen.add_argument("--seed", type=int, default=seed)
    p_gen.add_argument("--compact", action="store_true", help="hex-packed sign table")
    p_gen.add_argument("-o", "--out", help="output path (default: stdout)")
    p_four = fn_sub.add_parser("fourier", help="print all Fourier coefficients")
    p_four.add_argument("file")

    p_inf = sub.add_parser("influence", help="per-coordinate influence report")
    p_inf.add_argument("file")
    p_inf.add_argument("--degree", type=int, default=None, help="degree bound")
    p_inf.add_argument("--collection", nargs="+", help="more function files for cross-influence")
    p_inf.add_argument("--t", type=int, default=2, help="cross-influence threshold")

    p_gow = sub.add_parser("gowers", help="uniformity of a function")
    p_gow.add_argument("file")
    p_gow.add_argument("--dim", type=int, required=True)
    p_gow.add_argument("--mc", type=int, default=0, help="Monte Carlo samples (0 = exact)")
    p_gow.add_argument("--naive", action="store_true", help="exact by full enumeration")
    p_gow.add_argument("--seed", type=int, default=seed)
    p_gow.add_argument("--threads", type=int, default=1)
    p_gow.add_argument("--override-guard", action="store_true")

    p_ip = sub.add_parser("ip", help="Gowers inner product of a collection file")
    p_ip.add_argument("file")
    p_ip.add_argument("--linear", action="store_true", help="cube anchored at zero")
    p_ip.add_argument("--mc", type=int, default=0)
    p_ip.add_argument("--seed", type=int, default=seed)
    p_ip.add_argument("--threads", type=int, default=1)
    p_ip.add_argument("--override-guard", action="store_true")

    p_test = sub.add_parser("test", help="run a linearity / long-code test")
    test_sub = p_test.add_subparsers(dest="test_command", required=True)
    p_blr = test_sub.add_parser("blr", help="two-point linearity test")
    p_blr.add_argument("--fn", required=True)
    p_blr3 = test_sub.add_parser("blr3", help="three-function linearity test")
    p_blr3.add_argument("--fns", nargs=3, required=True, metavar=("F", "G", "H"))
    p_blr3.add_argument("--gamma", type=float, default=0.0, help="per-query noise rate")
    p_h = test_sub.add_parser("h", help="hypergraph linearity test")
    p_h.add_argument("--hypergraph", required=True)
    p_h.add_argument("--fn", required=True)
    p_noisy = test_sub.add_parser("noisy-h", help="noisy hypergraph long-code test")
    p_noisy.add_argument("--hypergraph", required=True)
    p_noisy.add_argument("--inputs", required=True, help="JSON with vertex and edge functions")
    p_noisy.add_argument("--gamma", type=float, required=True)
    for p in (p_blr, p_blr3, p_h, p_noisy):
        p.add_argument("--mc", type=int, default=0, help="Monte Carlo samples (0 = exact)")
        p.add_argument("--seed", type=int, default=seed)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--override-guard", action="store_true")

    p_ver = sub.add_parser("verify", help="run a lemma verification suite")
    p_ver.add_argument("suite", choices=list(verify.SUITE_NAMES))
    p_ver.add_argument("--n", type=int, default=6)
    p_ver.add_argument("--trials", type=int, default=50)
    p_ver.add_argument("--seed", type=int, default=seed)
    p_ver.add_argument("--json", help="write the JSON report here")
    p_ver.add_argument("--csv", help="write the CSV report here")

    p_ug = sub.add_parser("ugame", help="unique games")
    ug_sub = p_ug.add_subparsers(dest="ugame_command", required=True)
    p_solve = ug_sub.add_parser("solve", help="exhaustive strong/weak optimum")
    p_solve.add_argument("file")
    p_solve.add_argument("--override-guard", action="store_true")

    p_pcp = sub.add_parser("pcp", help="composed verifier demos")
    pcp_sub = p_pcp.add_subparsers(dest="pcp_command", required=True)
    p_demo = pcp_sub.add_parser("demo", help="run the composed verifier on a proof")
    p_demo.add_argument("--game", required=True)
    p_demo.add_argument("--hypergraph", required=True)
    p_demo.add_argument("--gamma", type=float, required=True)
    p_demo.add_argument("--rounds", type=int, default=100000)
    p_demo.add_argument("--seed", type=int, default=seed)
    p_demo.add_argument("--threads", type=int, default=1)
    p_demo.add_argument("--proof", default="honest", help="honest, random, or a proof file")
    p_demo.add_argument("--exact", action="store_true", help="also compute the exact acceptance")
    p_demo.add_argument("--decode-degree", type=int, default=2)
    p_demo.add_argument("--decode-tau", type=float, default=0.25)
    p_demo.add_argument("--override-guard", action="store_true")

    return parser


_HANDLERS = {
    "fn": _cmd_fn,
    "influence": _cmd_influence,
    "gowers": _cmd_gowers,
    "ip": _cmd_ip,
    "test": _cmd_test,
    "verify": _cmd_verify,
    "ugame": _cmd_ugame,
    "pcp": _cmd_pcp,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
