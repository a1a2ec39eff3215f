"""Command-line front end: ``scg-signal {generate,solve,verify,sample,compare}``.

A JSON report goes to stdout and a short human-readable table to stderr.
Exit codes: 0 success, 2 input error, 3 size guard, 4 numerical failure,
5 invariant violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import serialization as ser
from .core import expected_cost_functions
from .equilibrium import is_pure_ne
from .errors import (
    InfeasibleMarginals,
    InvalidScheme,
    NumericalFailure,
    ScgError,
    SizeGuard,
)
from .instances import GraphSpec, gen_figure1, gen_hardness, gen_random, gen_table1
from .private import (
    PrivateSampler,
    check_obedience,
    check_reduced_feasibility,
    explicit_from_reduced,
    reduced_cost,
    solve_optimal_ce,
    solve_optimal_private,
)
from .public import (
    evaluate_public_scheme,
    full_info_scheme,
    no_info_scheme,
    solve_optimal_public,
    validate_public_scheme,
)

EXIT_OK, EXIT_INPUT, EXIT_SIZE, EXIT_NUMERIC, EXIT_VIOLATION = 0, 2, 3, 4, 5
CHAIN_TOL = 1e-7


class InvariantViolation(Exception):
    pass


def resolve_threads(flag) -> int:
    env = os.environ.get("SCG_SIGNAL_THREADS")
    if env:
        return max(1, int(env))
    if flag:
        return max(1, flag)
    return os.cpu_count() or 1


def _num(v):
    return ser.format_number(v)


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _emit(report: dict, rows=None) -> None:
    sys.stdout.write(ser.dumps(report))
    if rows:
        print(_table(rows), file=sys.stderr)


def _report(command, inst=None, **extra) -> dict:
    rep = {"command": command}
    if inst is not None:
        rep["instance"] = ser.instance_digest(inst)
    rep.update(extra)
    return rep


# -- commands --------------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.kind == "table1":
        prior = tuple(args.prior) if args.prior else None
        inst = gen_table1(prior) if prior else gen_table1()
    elif args.kind == "figure1":
        inst = gen_figure1(args.n or 5, args.eps, args.h)
    elif args.kind == "hardness":
        if not args.graph:
            raise ValueError("generate hardness needs --graph")
        graph = GraphSpec.from_edge_list(Path(args.graph).read_text(encoding="utf-8"))
        inst = gen_hardness(graph, args.q, args.k, args.eps or "0")
    else:
        if args.n is None or args.r is None:
            raise ValueError("generate random needs --n and --r")
        inst = gen_random(args.n, args.r, args.states, args.seed, args.asymmetric)
    text = ser.dumps(ser.instance_to_doc(inst))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit(_report("generate", inst, kind=args.kind, out=str(args.out)),
              [("kind", args.kind), ("agents", inst.num_agents),
               ("resources", inst.num_resources), ("states", inst.num_states)])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = ser.read_instance(args.input)
    threads = resolve_threads(args.threads)
    start = time.perf_counter()
    rows = [("mode", args.mode)]
    if args.mode == "public":
        kwargs = {"max_signatures": args.max_size} if args.max_size else {}
        scheme, value = solve_optimal_public(inst, backend=args.backend, threads=threads, **kwargs)
        elapsed = time.perf_counter() - start
        evaluation = evaluate_public_scheme(inst, scheme, args.selection)
        doc = ser.public_scheme_to_doc(inst, scheme, value)
        values = {"public": _num(value), f"public_{args.selection}": _num(evaluation)}
        rows += [("value", _num(value)), (f"{args.selection} evaluation", _num(evaluation)),
                 ("signals", len(scheme))]
    else:
        solver = solve_optimal_ce if args.mode == "ce" else solve_optimal_private
        kwargs = {"max_size": args.max_size} if args.max_size else {}
        x, value = solver(inst, backend=args.backend, **kwargs)
        elapsed = time.perf_counter() - start
        report = check_reduced_feasibility(inst, x, args.tolerance)
        if report:
            raise InvariantViolation(f"solver output violates {len(report)} feasibility constraints")
        explicit = explicit_from_reduced(inst, x) if args.explicit else None
        doc = ser.private_scheme_to_doc(inst, x, explicit, value)
        values = {args.mode: _num(value)}
        rows += [("value", _num(value)), ("reduced-form cells", len(x))]
    if args.out:
        ser.write_scheme(doc, args.out)
    rows.append(("seconds", f"{elapsed:.3f}"))
    _emit(_report("solve", inst, mode=args.mode, values=values,
                  timings={"solve_seconds": round(elapsed, 6)},
                  tolerance=args.tolerance, threads=threads,
                  scheme=doc if not args.out else str(args.out)), rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = ser.read_instance(args.input)
    kind, payload = ser.read_scheme(inst, args.scheme)
    problems = []
    values = {}
    if kind == "public":
        scheme = payload
        try:
            validate_public_scheme(inst, scheme, args.tolerance)
        except InvalidScheme as exc:
            problems.append(str(exc))
        for k, s in enumerate(scheme.signals):
            costs = expected_cost_functions(inst, s.posterior)
            if not is_pure_ne(costs, s.assignment, inst.action_sets):
                problems.append(f"signal {k}: recommended profile is not a pure NE")
        if not problems:
            values["best"] = _num(evaluate_public_scheme(inst, scheme, "best"))
            values["worst"] = _num(evaluate_public_scheme(inst, scheme, "worst"))
    else:
        x, explicit = payload
        problems += [f"{v.constraint} {v.index}: {v.residual}" for v in
                     check_reduced_feasibility(inst, x, args.tolerance)]
        if not problems:
            explicit = explicit or explicit_from_reduced(inst, x)
            problems += [f"{v.constraint} {v.index}: {v.residual}" for v in
                         check_obedience(inst, explicit, args.tolerance)]
            values["cost"] = _num(reduced_cost(inst, x))
    status = "OK" if not problems else "VIOLATED"
    _emit(_report("verify", inst, kind=kind, status=status, problems=problems, values=values,
                  tolerance=args.tolerance),
          [("status", status)] + [("problem", p) for p in problems[:20]])
    return EXIT_OK if not problems else EXIT_VIOLATION


def cmd_sample(args) -> int:
    inst = ser.read_instance(args.input)
    kind, payload = ser.read_scheme(inst, args.scheme)
    if kind != "private":
        raise ValueError("sample needs a private scheme document")
    x, _ = payload
    rng = np.random.default_rng(args.seed)
    draws = PrivateSampler(inst, x).sample_many(args.state, rng, args.draws)
    profiles = [list(map(int, a)) for a in draws]
    _emit(_report("sample", inst, state=args.state, seed=args.seed, draws=profiles),
          [("state", args.state), ("draws", args.draws), ("seed", args.seed)])
    return EXIT_OK


def cmd_compare(args) -> int:
    inst = ser.read_instance(args.input)
    threads = resolve_threads(args.threads)
    timings = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timings[name] = round(time.perf_counter() - t0, 6)
        return out

    full, none_ = full_info_scheme(inst), no_info_scheme(inst)
    pub_scheme, pub = timed("public", lambda: solve_optimal_public(inst, threads=threads))
    _, priv = timed("private", lambda: solve_optimal_private(inst))
    table = {
        "private": (priv, None),
        "public": (evaluate_public_scheme(inst, pub_scheme, "best"),
                   evaluate_public_scheme(inst, pub_scheme, "worst")),
        "full_info": (evaluate_public_scheme(inst, full, "best"),
                      evaluate_public_scheme(inst, full, "worst")),
        "no_info": (evaluate_public_scheme(inst, none_, "best"),
                    evaluate_public_scheme(inst, none_, "worst")),
    }
    baseline = min(float(table["full_info"][0]), float(table["no_info"][0]))
    chain_ok = float(priv) <= float(pub) + CHAIN_TOL and float(pub) <= baseline + CHAIN_TOL
    values = {k: {"best": _num(b), **({"worst": _num(w)} if w is not None else {})}
              for k, (b, w) in table.items()}
    rows = [(k, f"best {float(b):.6g}" + (f"  worst {float(w):.6g}" if w is not None else ""))
            for k, (b, w) in table.items()]
    rows.append(("value chain", "ok" if chain_ok else "VIOLATED"))
    _emit(_report("compare", inst, values=values, timings=timings, chain_ok=chain_ok,
                  tolerance=CHAIN_TOL, threads=threads), rows)
    return EXIT_OK if chain_ok else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scg-signal", description="Optimal signaling for singleton congestion games.")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (SCG_SIGNAL_THREADS overrides)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an instance document")
    g.add_argument("kind", choices=["table1", "figure1", "hardness", "random"])
    g.add_argument("--out")
    g.add_argument("--prior", nargs="+", help="table1 prior, e.g. 3/5 2/5")
    g.add_argument("--n", type=int, help="agents (figure1, random)")
    g.add_argument("--r", type=int, help="resources (random)")
    g.add_argument("--states", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--asymmetric", action="store_true")
    g.add_argument("--eps", default=None)
    g.add_argument("--h", default="2", help="figure1 wrong-state cost")
    g.add_argument("--graph", help="edge-list file (hardness)")
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--k", type=int, default=1)

    s = sub.add_parser("solve", help="compute an optimal scheme")
    s.add_argument("mode", choices=["public", "private", "ce"])
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--selection", choices=["best", "worst"], default="best")
    s.add_argument("--tolerance", type=float, default=1e-7)
    s.add_argument("--max-size", type=int, default=None)
    s.add_argument("--backend", choices=["highs", "exact"], default="highs")
    s.add_argument("--explicit", action="store_true", help="also store the explicit private scheme")

    v = sub.add_parser("verify", help="check a scheme document against an instance")
    v.add_argument("--scheme", required=True)
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--tolerance", type=float, default=1e-7)

    d = sub.add_parser("sample", help="draw profiles from a private scheme")
    d.add_argument("--scheme", required=True)
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--state", type=int, required=True)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--draws", type=int, default=10)

    c = sub.add_parser("compare", help="value table of all schemes")
    c.add_argument("--in", dest="input", required=True)

    for parser in (s, c):
        parser.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    return p


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SizeGuard as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (NumericalFailure, InfeasibleMarginals) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ScgError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
