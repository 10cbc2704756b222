"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 internal integrity failure (including
a failed ``--check``).
"""

import argparse
import json
import random
import sys

from .cells import ComplexPoset, IntegrityError, build_complex, cell_counts_by_framing, run_checks
from .molecule import MoleculeInvalid
from .permutohedron import ValidationError, enumerate_faces
from .topology import (
    DisconnectedComplex, IrregularComplex, homology, order_complex, pi1, rank_report)
from .winding import invariants_report, load_setup, load_word

EXIT_OK, EXIT_INPUT, EXIT_INTEGRITY = 0, 2, 3


class InputError(Exception):
    pass


def _dumps(obj):
    return json.dumps(obj, sort_keys=True) + "\n"


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _pick(flag, positional, name):
    if flag is not None and positional is not None and flag != positional:
        raise InputError(f"conflicting values for {name}: {flag} and {positional}")
    value = flag if flag is not None else positional
    if value is None:
        raise InputError(f"missing parameter {name}")
    return value


def cmd_permutohedron(args):
    q = _pick(args.q, args.q_pos, "q")
    lattice = enumerate_faces(q)
    _emit(_dumps(lattice.to_json()), args.out)
    if args.out:
        print(f"q={q}: {len(lattice)} faces, f-vector {lattice.f_vector()}")
    return EXIT_OK


def cmd_complex(args):
    pos = args.params or []
    if len(pos) not in (0, 3):
        raise InputError("give p q r together, or use --p --q --r")
    p = _pick(args.p, pos[0] if pos else None, "p")
    q = _pick(args.q, pos[1] if pos else None, "q")
    r = _pick(args.r, pos[2] if pos else None, "r")
    cx = build_complex(p, q, r, workers=args.workers)
    _emit(cx.dumps(), args.out)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(cx.to_dot())
    log = sys.stdout if args.out else sys.stderr
    print(f"K_{{{p},{q},{r}}}: {len(cx.cells)} cells, f-vector {cx.f_vector()}, "
          f"chi {cx.euler_characteristic()}", file=log)
    for face, n in cell_counts_by_framing(cx.cells).items():
        print(f"  framing {face.to_json()}: {n} cells", file=log)
    status = EXIT_OK
    if args.check:
        for rep in run_checks(cx):
            print(f"  check {rep.name}: {'PASS' if rep.ok else 'FAIL'}", file=log)
            for msg in rep.failures[:10]:
                print(f"    {msg}", file=log)
            if not rep.ok:
                status = EXIT_INTEGRITY
    return status


def cmd_topology(args):
    kind = _pick(args.kind, args.kind_pos, "kind")
    try:
        cx = ComplexPoset.from_json(_read_json(args.inp))
    except ValidationError as exc:
        raise InputError(str(exc)) from exc
    sc = order_complex(cx)
    if kind == "homology":
        h = homology(sc)
        out = {"betti": [b for b, _ in h], "torsion": [t for _, t in h]}
        if args.seed is not None:
            rng = random.Random(args.seed)
            names = list(sc.vertices)
            shuffled = names[:]
            rng.shuffle(shuffled)
            h2 = homology(sc.relabeled(dict(zip(names, shuffled))))
            out["relabel_check"] = {"seed": args.seed, "agrees": h2 == h}
    elif kind == "pi1":
        raw, simp = pi1(sc)
        out = {"pi1": {"generators": len(raw.generators), "relators": len(raw.relators),
                       "simplified_generators": len(simp.generators),
                       "simplified_relators": [list(r) for r in simp.relators],
                       "trivial": simp.is_trivial}}
    else:
        _, simp = pi1(sc)
        out = {"rank_report": rank_report(cx, pi1_simplified=simp)}
    _emit(_dumps(out), args.out)
    return EXIT_OK


def cmd_invariants(args):
    setup_path = args.setup or args.inp
    if not setup_path or not args.word:
        raise InputError("invariants needs --setup (or --in) and --word")
    setup, curves = load_setup(_read_json(setup_path))
    word = load_word(_read_json(args.word), setup, curves)
    _emit(_dumps(invariants_report(setup, word)), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="morsecx", description="Complexes of Morse functions on surfaces")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized self-checks")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("permutohedron", help="face lattice of the permutohedron")
    sp.add_argument("q_pos", nargs="?", type=int, metavar="q")
    sp.add_argument("--q", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_permutohedron)

    sp = sub.add_parser("complex", help="build K_{p,q,r}")
    sp.add_argument("params", nargs="*", type=int, metavar="p q r")
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--out")
    sp.add_argument("--dot", help="write the 1-skeleton as Graphviz DOT")
    sp.add_argument("--check", action="store_true",
                    help="regularity, delta transitivity, branched covering, connectivity")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_complex)

    sp = sub.add_parser("topology", help="homology, pi1 or rank report of a built complex")
    sp.add_argument("kind_pos", nargs="?", choices=("homology", "pi1", "rank"), metavar="kind")
    sp.add_argument("--kind", choices=("homology", "pi1", "rank"))
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_topology)

    sp = sub.add_parser("invariants", help="evaluate B and B_abs on a twist word")
    sp.add_argument("--setup")
    sp.add_argument("--in", dest="inp")
    sp.add_argument("--word")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_invariants)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, ValidationError, MoleculeInvalid, DisconnectedComplex) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrityError, IrregularComplex) as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY


if __name__ == "__main__":
    sys.exit(main())
