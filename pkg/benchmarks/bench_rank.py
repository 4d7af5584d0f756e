"""Compare the compiled and pure-Python rank solvers on identical game boards.

    python benchmarks/bench_rank.py --max-size 2 --repeat 5
"""

import argparse
import random
import sys
import time

from potsys import kernel
from potsys.formulas import parse
from potsys.games import rank_table
from potsys.structures import Signature, Structure, enumerate_embeddings
from potsys.systems import Arrow, build_mod_system, build_mode_system, enumerate_models, validate_or_close

SIG = Signature((("R", 2),), ())


def random_system(rng, worlds, size, prefix):
    ws = {}
    for i in range(worlds):
        u = list(range(rng.randint(1, size)))
        ws[f"{prefix}{i}"] = Structure(SIG, u, {"R": {(a, b) for a in u for b in u if rng.random() < 0.3}})
    arrows = [Arrow(a, b, e) for a in ws for b in ws for e in enumerate_embeddings(ws[a], ws[b])
              if rng.random() < 0.5]
    return validate_or_close(ws, arrows, "close")


def boards(args):
    models = enumerate_models(SIG, [parse("(forall x (not (rel R x x)))")], args.max_size)
    yield f"Mod x Mod^e (irreflexive, size <= {args.max_size})", build_mod_system(models), build_mode_system(models)
    rng = random.Random(args.seed)
    yield "random pair (4 worlds, size <= 4)", random_system(rng, 4, 4, "a"), random_system(rng, 4, 4, "b")
    yield "random pair (8 worlds, size <= 5)", random_system(rng, 8, 5, "a"), random_system(rng, 8, 5, "b")


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-size", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if kernel.BACKEND != "cython":
        print("compiled kernel not available; build with `pip install -e . --no-build-isolation`")
        return 1
    from potsys._rank_c import solve_ranks as solve_c
    print(f"{'board':45s} {'positions':>9s} {'edges':>9s} {'cython s':>9s} {'python s':>9s} {'speedup':>8s}")
    for label, left, right in boards(args):
        table = rank_table(left, right)
        # rebuild the flat graph once, then time only the solver
        n = len(table.positions)
        base = [1 if r != -1 else 0 for r in table.ranks]
        owner, ptr, tgt = [], [0], []
        for i, pm in enumerate(table.moves):
            for _, replies in pm:
                owner.append(i)
                tgt.extend(sorted({t for _, t in replies}))
                ptr.append(len(tgt))
        res_c = solve_c(n, base, owner, ptr, tgt)
        res_py = kernel.solve_ranks_py(n, base, owner, ptr, tgt)
        if list(res_c[0]) != list(res_py[0]):
            print(f"{label}: solvers disagree", file=sys.stderr)
            return 2
        tc = best_of(lambda: solve_c(n, base, owner, ptr, tgt), args.repeat)
        tp = best_of(lambda: kernel.solve_ranks_py(n, base, owner, ptr, tgt), args.repeat)
        print(f"{label:45s} {n:9d} {len(tgt):9d} {tc:9.4f} {tp:9.4f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
