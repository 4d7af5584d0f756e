"""Command-line front end.

Exit codes: 0 success or true verdict, 1 false verdict, 2 usage error, 3 input error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import charform, games, kernel, textio
from .play import play as play_game, play_interactive, random_abelard
from .checker import CheckError, Checker, satisfies_fo
from .formulas import FormulaError, mqrank, parse, to_sexpr
from .refine import Refinement
from .structures import StructureError, parse_signature
from .systems import (PointedSystem, PotentialistSystem, SystemsError, UnravelDepthExceeded,
                      build_mod_system, build_mode_system, check_flatten_squares, check_unravel_zigzag, disjointify,
                      enumerate_models, iter_unravel, skeleton, skeleton_witness)

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _env_int(name, default):
    v = os.environ.get(name)
    return int(v) if v else default


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


def _report(args, items):
    """Print (key, value) pairs in the chosen output format."""
    for k, v in items:
        if args.format == "tsv":
            print(f"{k}\t{v}")
        elif args.format == "kv":
            print(f"{k.replace(' ', '_')}={v}")
        else:
            print(f"{k}: {v}")


def _yes(b):
    return "yes" if b else "no"


def _pointed(args, left, right):
    (w, a), (v, b) = textio.parse_pointed(args.pointed)
    for sysx, world in ((left, w), (right, v)):
        if world not in sysx.worlds:
            raise textio.TextError(f"unknown world {world!r}")
    return PointedSystem(left, w, a), PointedSystem(right, v, b)


def _formula(args, signature):
    if args.formula is not None:
        return parse(args.formula, signature)
    fs = textio.read_formulas(args.formula_file, signature)
    if len(fs) != 1:
        raise UsageError(f"{args.formula_file}: expected one formula, found {len(fs)}")
    return fs[0]


# subcommands ----------------------------------------------------------------

def cmd_check(args):
    system = textio.read_system_file(args.system)
    f = _formula(args, system.signature)
    asg = textio.parse_assignment(args.assign or "")
    if args.world not in system.worlds:
        raise textio.TextError(f"unknown world {args.world!r}")
    val = Checker(system).satisfies(args.world, asg, f)
    print("true" if val else "false")
    return EXIT_TRUE if val else EXIT_FALSE


def cmd_bisim(args):
    left, right = textio.read_system_file(args.left), textio.read_system_file(args.right)
    pL, pR = _pointed(args, left, right)
    if args.method == "refine":
        r = Refinement(left, right).rank(pL.world, pL.params, pR.world, pR.params)
    else:
        r = games.pointed_rank(pL, pR)
    items = [("bisimilar", _yes(r == games.INF)), ("rank", games.format_rank(r))]
    verdict = r == games.INF
    if args.alpha is not None:
        verdict = r >= args.alpha
        items.append((f"{args.alpha}-bisimilar", _yes(verdict)))
    _report(args, items)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_rank(args):
    left, right = textio.read_system_file(args.left), textio.read_system_file(args.right)
    table = games.rank_table(left, right)
    if args.emit:
        _emit(args.emit, table.to_tsv())
    counts = {}
    for _, r in table.items():
        counts[games.format_rank(r)] = counts.get(games.format_rank(r), 0) + 1
    keys = sorted(counts, key=lambda k: (k == "inf", int(k) if k != "inf" else 0))
    _report(args, [("positions", len(table)), ("rounds", table.rounds), ("backend", kernel.BACKEND)]
            + [(f"rank {k}", counts[k]) for k in keys])
    return EXIT_TRUE


def cmd_game(args):
    left, right = textio.read_system_file(args.left), textio.read_system_file(args.right)
    pL, pR = _pointed(args, left, right)
    table = games.rank_table(left, right)
    start = games.canonical_position(pL.world, pL.params, pR.world, pR.params)
    if start is None:
        print("inconsistent starting tuples: Abelard wins at once")
        return EXIT_FALSE
    if args.as_ == "random":
        tr = play_game(table, start, random_abelard(args.seed), max_rounds=args.max_rounds)
        print("\n".join(tr.lines()))
    else:
        def ask(prompt):
            try:
                return input(prompt)
            except EOFError:
                return None
        tr = play_interactive(table, start, args.as_, ask, print, args.max_rounds)
    return EXIT_FALSE if tr.winner == "abelard" else EXIT_TRUE


def cmd_theta(args):
    system = textio.read_system_file(args.system)
    if args.world not in system.worlds:
        raise textio.TextError(f"unknown world {args.world!r}")
    p = PointedSystem(system, args.world, textio.parse_tuple(args.tuple or ""))
    f = charform.theta(p, args.alpha, cap=args.cap)
    if args.emit:
        _emit(args.emit, to_sexpr(f) + "\n")
        _report(args, [("mqrank", mqrank(f)), ("size", f.size), ("written", args.emit)])
    else:
        print(to_sexpr(f))
    return EXIT_TRUE


def _models(args):
    if args.max_size > args.size_cap:
        raise UsageError(f"--max-size {args.max_size} exceeds the cap {args.size_cap}")
    sig = parse_signature(args.sig)
    theory = textio.read_formulas(args.theory, sig) if args.theory else []
    return enumerate_models(sig, theory, args.max_size, cap=args.size_cap)


def cmd_enum(args):
    models = _models(args)
    if not models:
        print("0 models")
        return EXIT_FALSE
    system = build_mod_system(models) if args.mode == "mod" else build_mode_system(models)
    if args.emit:
        _emit(args.emit, textio.write_system(system, "Mod" if args.mode == "mod" else "Mode"))
    if args.adjacency:
        _emit(args.adjacency, textio.write_adjacency(system))
    _report(args, [("models", len(models)), ("arrows", len(system.arrows))])
    return EXIT_TRUE


def cmd_modmode(args):
    models = _models(args)
    if not models:
        print("0 models")
        return EXIT_FALSE
    mod, mode = build_mod_system(models), build_mode_system(models)
    ref = Refinement(mod, mode)
    copies = all(ref.rank(w, (), w, ()) == games.INF for w in mod.worlds)
    bitotal = ref.is_bitotal()
    print(f"{len(models)} models; bitotal: {_yes(copies and bitotal)}")
    if args.format != "text":
        _report(args, [("copies bisimilar", _yes(copies)), ("relation bitotal", _yes(bitotal))])
    ok = copies and bitotal
    if args.flatten_depth:
        chains, bad = check_flatten_squares(disjointify(mode)[0], args.flatten_depth)
        print(f"flatten squares: {chains} chains, {len(bad)} failures")
        ok = ok and not bad
    return EXIT_TRUE if ok else EXIT_FALSE


def cmd_unravel(args):
    system = textio.read_system_file(args.system)
    if args.world not in system.worlds:
        raise textio.TextError(f"unknown world {args.world!r}")
    n, ok = 0, True
    for node in iter_unravel(system, args.world, args.depth):
        n += 1
        label = repr(node.seq[-1]) if node.seq else str(node.root)
        print("  " * node.depth + label)
        if node.depth < args.depth and not check_unravel_zigzag(node, args.depth):
            ok = False
            print("  " * node.depth + "  ! zig-zag failure")
    print(f"nodes: {n}; zig-zag: {'ok' if ok else 'failed'}")
    return EXIT_TRUE if ok else EXIT_FALSE


def cmd_skeleton(args):
    system = textio.read_system_file(args.system)
    skel, quotient = skeleton(system)
    w = skeleton_witness(system, quotient)
    ver = games.verify_iso_bisimulation(w, system, skel)
    for world in system.worlds:
        print(f"{world}\t{quotient[world]}")
    _report(args, [("worlds", len(system.worlds)), ("classes", len(skel.worlds)),
                   ("iso-bisimulation", _yes(ver.ok)), ("bitotal", _yes(ver.bitotal))])
    if args.emit:
        _emit(args.emit, textio.write_system(skel))
    return EXIT_TRUE if ver.ok and ver.bitotal else EXIT_FALSE


def cmd_examples(args):
    out = args.emit
    if args.family == "ordinal":
        cap = args.cap
        rows = []
        for a in range(args.alpha + 1):
            g = charform.ordinal_graph(a, cap=cap)
            if out:
                _emit(os.path.join(out, f"ordinal{a}.sys"),
                      textio.write_system(PotentialistSystem.single(g, f"O{a}"), f"Ord{a}"))
                _emit(os.path.join(out, f"nu{a}.fml"), to_sexpr(charform.nu(a, cap=cap)) + "\n")
            rows.append([satisfies_fo(g, {}, charform.nu(b, cap=cap)) for b in range(args.alpha + 1)])
    else:
        cap = args.cap
        rows = []
        for b in range(args.alpha + 1):
            system, root = charform.button_system(b, args.buttons, args.base, cap=cap)
            if out:
                _emit(os.path.join(out, f"buttons{b}.sys"), textio.write_system(system, f"B{b}"))
                _emit(os.path.join(out, f"theta{b}.fml"), to_sexpr(charform.button_theta(b, cap=cap)) + "\n")
            chk = Checker(system)
            rows.append([chk.satisfies(root, {}, charform.button_theta(a, cap=cap))
                         for a in range(args.alpha + 1)])
    n = args.alpha + 1
    print("model\\sentence\t" + "\t".join(str(b) for b in range(n)))
    for a, row in enumerate(rows):
        print(f"{a}\t" + "\t".join("1" if v else "0" for v in row))
    diag = all(rows[a][b] == (a == b) for a in range(n) for b in range(n))
    print(f"diagonal: {_yes(diag)}")
    return EXIT_TRUE if diag else EXIT_FALSE


# parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="potsys", description="Potentialist systems: model checking, "
                                "bisimulation games and characteristic formulas.")
    p.add_argument("--format", choices=["text", "tsv", "kv"], default="text",
                   help="report format (default text)")
    sub = p.add_subparsers(dest="cmd", required=True)

    def formula_opts(q):
        g = q.add_mutually_exclusive_group(required=True)
        g.add_argument("--formula", help="formula as an s-expression")
        g.add_argument("--formula-file", help="file holding one formula")

    q = sub.add_parser("check", help="evaluate a formula at a world")
    q.add_argument("--system", required=True)
    q.add_argument("--world", required=True)
    formula_opts(q)
    q.add_argument("--assign", help="variable assignment, e.g. x=0,y=2")
    q.set_defaults(fn=cmd_check)

    for name, fn, hlp in (("bisim", cmd_bisim, "decide bisimilarity of two pointed systems"),
                          ("rank", cmd_rank, "rank every position of the game board"),
                          ("game", cmd_game, "play the game in the terminal")):
        q = sub.add_parser(name, help=hlp)
        q.add_argument("--left", required=True)
        q.add_argument("--right", required=True)
        if name == "bisim":
            q.add_argument("--pointed", required=True, help="W:a,b=V:c,d")
            q.add_argument("--alpha", type=int)
            q.add_argument("--method", choices=["game", "refine"], default="game")
        elif name == "rank":
            q.add_argument("--emit", help="write the rank table (tab-separated) here; - for stdout")
        else:
            q.add_argument("--pointed", required=True, help="W:a,b=V:c,d")
            q.add_argument("--as", dest="as_", choices=["abelard", "eloise", "random"], default="abelard",
                           help="your side; 'random' pits the machine against a random Abelard")
            q.add_argument("--max-rounds", type=int, default=100)
            q.add_argument("--seed", type=int, default=0)
        q.set_defaults(fn=fn)

    alpha_cap = _env_int("POTSYS_MAX_ALPHA", 4)
    q = sub.add_parser("theta", help="characteristic formula of a pointed system")
    q.add_argument("--system", required=True)
    q.add_argument("--world", required=True)
    q.add_argument("--tuple", default="", help="parameters, e.g. 0,1")
    q.add_argument("--alpha", type=int, required=True)
    q.add_argument("--cap", type=int, default=alpha_cap, help=f"largest alpha allowed (default {alpha_cap})")
    q.add_argument("--emit")
    q.set_defaults(fn=cmd_theta)

    size_cap = _env_int("POTSYS_MAX_SIZE", 4)
    for name, fn, hlp in (("enum", cmd_enum, "enumerate small models of a theory"),
                          ("modmode", cmd_modmode, "compare the inclusion and embedding systems of a theory")):
        q = sub.add_parser(name, help=hlp)
        q.add_argument("--sig", required=True, help="signature, e.g. R:2,c")
        q.add_argument("--theory", help="file of first-order sentences")
        q.add_argument("--max-size", type=int, required=True)
        q.add_argument("--size-cap", type=int, default=size_cap, help=f"largest max-size allowed (default {size_cap})")
        if name == "enum":
            q.add_argument("--mode", choices=["mod", "mode"], default="mod")
            q.add_argument("--emit", help="write the system file here")
            q.add_argument("--adjacency", help="write the arrow listing here")
        else:
            q.add_argument("--flatten-depth", type=int, default=0,
                           help="also check flattening squares on chains up to this length")
        q.set_defaults(fn=fn)

    depth = _env_int("POTSYS_UNRAVEL_DEPTH", 3)
    q = sub.add_parser("unravel", help="list the unravelling to a depth and check zig-zag")
    q.add_argument("--system", required=True)
    q.add_argument("--world", required=True)
    q.add_argument("--depth", type=int, default=depth)
    q.set_defaults(fn=cmd_unravel)

    q = sub.add_parser("skeleton", help="quotient by isomorphic worlds")
    q.add_argument("--system", required=True)
    q.add_argument("--emit")
    q.set_defaults(fn=cmd_skeleton)

    q = sub.add_parser("examples", help="ordinal or button families")
    q.add_argument("family", choices=["ordinal", "buttons"])
    q.add_argument("--alpha", type=int, required=True)
    q.add_argument("--buttons", type=int, default=4)
    q.add_argument("--base", type=int, default=2)
    q.add_argument("--cap", type=int, default=alpha_cap)
    q.add_argument("--emit", help="directory for generated files")
    q.set_defaults(fn=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_TRUE
    for name in ("max_size", "depth", "alpha", "cap", "max_rounds", "buttons", "base", "flatten_depth"):
        v = getattr(args, name, None)
        if v is not None and v < 0:
            print(f"error: --{name.replace('_', '-')} must be >= 0", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, charform.CapExceeded, UnravelDepthExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, textio.TextError, FormulaError, CheckError, StructureError, SystemsError,
            games.GameError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
