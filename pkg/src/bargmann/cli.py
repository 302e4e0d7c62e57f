"""Command-line interface.

Every subcommand prints one JSON document (or circuit text for ``synth``)
to stdout.  Exit codes: 0 success, 2 parse error, 3 validation error,
4 resource budget exceeded.  ``BARGMANN_LOG_LEVEL`` sets log verbosity
and nothing else.
"""

from __future__ import annotations

import argparse
import logging
import os
import secrets
import sys

from . import circuits, witnesses
from .documents import complex_pair, dumps, gram_to_dict, load_document
from .equivalence import (
    DEFAULT_SEQUENCE_BUDGET,
    mixed_equivalent,
    mixed_fingerprint,
    procrustes_align,
    pure_equivalent,
)
from .errors import DocumentError, InputError, ResourceBudgetError
from .formats import to_lines, to_qasm
from .gram import build_frame_graph, reconstruct_gram, spanning_forest
from .invariants import parse_sequence
from .simulate import Branch, CycleTestSpec, exact_probability, gate_level_simulate, sample
from .states import bargmann

log = logging.getLogger("bargmann")

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_BUDGET = 0, 2, 3, 4

FAMILIES = {
    "nn": circuits.nn_cycle,
    "log": circuits.log_depth_cycle,
    "controlled-nn": circuits.controlled_nn_cycle,
    "parallel": circuits.parallel_controlled_cycle,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _sequence(text):
    try:
        return parse_sequence(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(args):
    if args.seed is None:
        args.seed = secrets.randbits(32)
        log.info("generated seed %d", args.seed)
    return args.seed


def cmd_invariants(args):
    doc = load_document(args.input)
    out = {"n": doc.states.n, "dim": doc.dim}
    if args.degree_cap is not None:
        fp = mixed_fingerprint(doc.states, args.degree_cap, args.budget)
        out["fingerprint"] = fp.to_dict()
        return out
    table = []
    for seq in args.sequence or []:
        inv = bargmann(doc.states, seq)
        table.append({"indices": list(inv.indices), "degree": inv.degree, "value": complex_pair(inv.value)})
    out["invariants"] = table
    return out


def cmd_simulate(args):
    doc = load_document(args.input)
    seed = _seed(args) if args.shots else args.seed
    spec = CycleTestSpec(doc.states, args.indices, Branch(args.branch), args.shots, seed)
    result = sample(spec) if args.shots else exact_probability(spec)
    out = result.to_dict()
    if args.gate_level:
        circuit = FAMILIES[args.gate_level](spec.m)
        out["p0_gate_level"] = gate_level_simulate(spec, circuit).p0_exact
        out["gate_level_family"] = args.gate_level
    return out


def cmd_synth(args):
    circuit = FAMILIES[args.family](args.m)
    if args.verify:
        report = circuits.verify_permutation(circuit, circuits.cycle_permutation(args.m))
        if not report:
            raise InputError(f"synthesized circuit failed verification: {report.failure}")
    return to_qasm(circuit) if args.format == "qasm" else to_lines(circuit)


def cmd_gram(args):
    doc = load_document(args.input)
    graph = build_frame_graph(doc.states, args.zero_threshold)
    trees = spanning_forest(graph, args.tree)
    gram = reconstruct_gram(doc.states, trees, graph=graph, close_all_pairs=args.all_pairs)
    out = gram_to_dict(gram)
    out["rank"] = gram.rank()
    return out


def cmd_equiv(args):
    a, b = load_document(args.input), load_document(args.other)
    mode = args.mode
    if mode == "auto":
        mode = "pure" if a.states.is_pure and b.states.is_pure else "mixed"
    if mode == "pure":
        if not (a.states.is_pure and b.states.is_pure):
            raise InputError("pure mode needs two pure tuples")
        report = (procrustes_align if args.align else pure_equivalent)(a.states, b.states, tol=args.tol)
    else:
        report = mixed_equivalent(a.states, b.states, tol=args.tol, degree_cap=args.degree_cap, budget=args.budget)
    out = report.to_dict()
    out["mode"] = mode
    return out


def cmd_witness(args):
    if args.kind == "coherence":
        if args.values:
            vals = args.values
            d123 = complex(vals[3], vals[4] if len(vals) > 4 else 0.0)
            verdict = witnesses.coherence_polytope_check(vals[0], vals[1], vals[2], d123, args.threshold)
        else:
            verdict = witnesses.coherence_check_states(_require_input(args).states, args.threshold)
        return verdict.to_dict()
    doc = _require_input(args)
    if args.kind == "li":
        if not doc.states.is_pure:
            raise InputError("linear independence is decided for pure tuples")
        gram = reconstruct_gram(doc.states)
        out = witnesses.linear_independence(gram, args.threshold).to_dict()
        out["rank"] = gram.rank()
        return out
    seq = args.sequence or tuple(range(1, doc.states.n + 1))
    out = {}
    if args.shots:
        seed = _seed(args)
        spec = CycleTestSpec(doc.states, seq, Branch.IMAG, args.shots, seed)
        res = sample(spec)
        inv = bargmann(doc.states, seq)
        inv = type(inv)(inv.indices, complex(0.0, res.implied_invariant_part))
        threshold = witnesses.statistical_threshold(2 * res.stderr, args.sigmas, args.alpha)
        out.update(shots=args.shots, seed=seed, estimate=res.implied_invariant_part, stderr=2 * res.stderr)
    else:
        inv = bargmann(doc.states, seq)
        threshold = args.threshold
    out.update(witnesses.imaginarity_witness(inv, threshold).to_dict())
    out["indices"] = list(inv.indices)
    return out


def _require_input(args):
    if not args.input:
        raise InputError("--input is required for this witness")
    return load_document(args.input)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bargmann", description="Bargmann invariants of quantum state tuples.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("invariants", help="evaluate invariants or a degree-capped fingerprint")
    s.add_argument("--input", required=True, help="tuple document (JSON)")
    s.add_argument("--sequence", action="append", type=_sequence, help="comma-separated 1-based indices; repeatable")
    s.add_argument("--degree-cap", type=int, help="emit every cyclic class up to this degree instead")
    s.add_argument("--budget", type=int, default=DEFAULT_SEQUENCE_BUDGET)
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("simulate", help="cycle-test outcome probability, exact or sampled")
    s.add_argument("--input", required=True)
    s.add_argument("--indices", required=True, type=_sequence)
    s.add_argument("--branch", choices=[b.value for b in Branch], default="real")
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int, help="generated and echoed when absent")
    s.add_argument("--gate-level", choices=sorted(FAMILIES), help="also run a state-vector simulation")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("synth", help="emit a cyclic-permutation circuit")
    s.add_argument("--m", required=True, type=int)
    s.add_argument("--family", choices=sorted(FAMILIES), default="nn")
    s.add_argument("--format", choices=["lines", "qasm"], default="lines")
    s.add_argument("--verify", action="store_true", help="check the permutation before emitting")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("gram", help="gauge-fixed Gram matrix from invariants")
    s.add_argument("--input", required=True)
    s.add_argument("--all-pairs", action="store_true", help="close every non-tree pair, including orthogonal ones")
    s.add_argument("--tree", choices=["bfs", "dfs"], default="bfs")
    s.add_argument("--zero-threshold", type=float, default=1e-9)
    s.set_defaults(func=cmd_gram)

    s = sub.add_parser("equiv", help="decide projective-unitary equivalence of two tuples")
    s.add_argument("--input", required=True)
    s.add_argument("--other", required=True)
    s.add_argument("--mode", choices=["auto", "pure", "mixed"], default="auto")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--align", action="store_true", help="pure mode: report the Procrustes alignment and bound")
    s.add_argument("--degree-cap", type=int)
    s.add_argument("--budget", type=int, default=DEFAULT_SEQUENCE_BUDGET)
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("witness", help="linear independence, imaginarity or coherence witness")
    s.add_argument("kind", choices=["li", "imaginarity", "coherence"])
    s.add_argument("--input")
    s.add_argument("--values", type=float, nargs="+", metavar="V",
                   help="coherence: d12 d13 d23 re(d123) [im(d123)]")
    s.add_argument("--sequence", type=_sequence)
    s.add_argument("--threshold", type=float)
    s.add_argument("--shots", type=int, default=0)
    s.add_argument("--seed", type=int)
    s.add_argument("--sigmas", type=float, default=witnesses.STATISTICAL_SIGMAS)
    s.add_argument("--alpha", type=float)
    s.set_defaults(func=cmd_witness)
    return p


_DEFAULT_THRESHOLDS = {"li": 1e-10, "imaginarity": 0.0, "coherence": witnesses.COHERENCE_THRESHOLD}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "kind", None) and args.threshold is None:
        args.threshold = _DEFAULT_THRESHOLDS[args.kind]
    if args.command == "witness" and args.values is not None and not 4 <= len(args.values) <= 5:
        print("bargmann: error: --values takes 4 or 5 numbers", file=sys.stderr)
        return EXIT_PARSE
    try:
        out = args.func(args)
    except DocumentError as exc:
        print(f"bargmann: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceBudgetError as exc:
        print(f"bargmann: resource budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InputError as exc:
        print(f"bargmann: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    stdout.write(out if isinstance(out, str) else dumps(out))
    return EXIT_OK


def main(argv=None) -> int:
    level = os.environ.get("BARGMANN_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    try:
        return run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
