"""Command-line entry points for the solving engine and its services."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import board as B
from . import census as C
from . import engine as E
from . import layout as L
from . import midgame as M
from . import partition as P
from . import prng
from . import search as SE
from . import storage as ST
from . import supers as SU


def _seed_arg(text: str) -> bytes:
    if text == "default":
        return prng.DEFAULT_SEED
    raw = bytes.fromhex(text)
    if len(raw) != prng.SEED_BYTES:
        raise argparse.ArgumentTypeError(f"seed must be {2*prng.SEED_BYTES} hex digits")
    return raw


def cmd_census(args):
    print(f"{'n':>3} {'raw':>22} {'reduced':>20}")
    for rec in C.census():
        print(f"{rec.slice:>3} {rec.raw:>22} {rec.reduced:>20}")
    total_raw = sum(C.raw_count(n) for n in range(37))
    total = C.total_positions()
    print(f"{'sum':>3} {total_raw:>22} {total:>20}")
    rep = C.overcount_ratio()
    print(f"rotation-only overcount factor: {float(rep.rotation_factor):.6f}")
    print(f"section-level overcount factor: {float(rep.section_factor):.6f}")
    print(f"combined overcount factor:      {float(rep.combined):.6f}")
    print(f"branching (raw):                {C.branching_average('raw'):.3f}")
    print(f"branching (rotation-abstracted): {C.branching_average('rotation_abstracted'):.4f}")
    return 0


def cmd_layout_stats(args):
    print(f"{'n':>3} {'sections':>9} {'blocks':>14} {'lines':>14} {'supers':>18}")
    for rec in L.per_slice_stats():
        print(
            f"{rec['slice']:>3} {rec['sections']:>9} {rec['blocks']:>14}"
            f" {rec['lines']:>14} {rec['supers']:>18}"
        )
    t = L.layout_totals()
    print(f"totals: blocks={t.blocks} lines={t.lines} supers={t.supers}")
    print(f"max sections per slice: {t.max_sections} (slice {t.max_sections_slice})")
    return 0


def cmd_partition_stats(args):
    rep = P.partition_stats(args.seed, args.slice, args.ranks)
    r = rep.ratios()
    print(f"slice {args.slice}, {args.ranks} ranks, seed {args.seed.hex()}")
    if rep.degenerate:
        print("degenerate: at least as many ranks as lines")
    for name in ("lines", "blocks", "supers", "line_size"):
        arr = getattr(rep, name if name != "line_size" else "line_size")
        print(
            f"{name:>9}: total={int(arr.sum())} min={int(arr.min())}"
            f" max={int(arr.max())} max/min={r[name]:.4f}"
        )
    return 0


def cmd_solve(args):
    if args.boundary == "terminal":
        spec = E.BoundarySpec("terminal")
        from_slice = 36
    else:
        kind, _, seedhex = args.boundary.partition(":")
        if kind != "random":
            raise SystemExit("--boundary must be terminal or random:SEEDHEX")
        seed = _seed_arg(seedhex or "default")
        spec = E.BoundarySpec("random", args.from_slice, seed)
        from_slice = args.from_slice
    cfg = E.SolveConfig(workers=args.workers, ranks=args.ranks, seed=args.seed, keep_all=True)
    root = B.parse_board(args.root) if args.root else None
    res = E.solve(from_slice, args.to, spec, cfg, domain_root=root)
    for rec in res.counts:
        print(
            f"slice {rec['slice']:>2}: supers={rec['supers']} win={rec['win']}"
            f" tie={rec['tie']} loss={rec['loss']}"
        )
    if args.store:
        for path in res.write_store(args.store):
            print("wrote", path)
    return 0


def cmd_verify(args):
    """Backward/forward equivalence with an injected boundary."""
    spec = E.BoundarySpec("random", args.slice, args.seed)
    res = E.solve(args.slice, 0, spec, E.SolveConfig(workers=args.workers, keep_all=True))
    boundary = E.inject_boundary(args.seed, args.slice)
    swept = SE.sweep_values(boundary)
    from . import _kernels as K

    bad = 0
    for n in range(args.slice - 1, -1, -1):
        keys, vals = swept[n]
        got = res.values_for_keys(keys)
        mism = int((got != vals).sum())
        bad += mism
        print(f"slice {n}: {len(keys)} positions, {mism} mismatches")
    print("equivalence", "FAILED" if bad else "ok")
    return 1 if bad else 0


def cmd_midgame(args):
    root = B.parse_board(args.board)
    res = M.solve_midgame(root, threshold=args.threshold)
    if args.json:
        import json

        print(
            json.dumps(
                {
                    "board": str(root),
                    "value": res.value,
                    "moves": [
                        {
                            "cell": list(mv.cell),
                            "quad": mv.quad,
                            "direction": mv.direction,
                            "value": v,
                        }
                        for mv, v in res.moves
                    ],
                    "seconds": res.seconds,
                }
            )
        )
        return 0
    print(B.pretty(root))
    print(f"value for {B.side_to_move(root).name.lower()}: {res.value:+d}"
          f"  ({res.boards_processed} positions in {res.seconds:.1f}s)")
    for mv, v in res.moves:
        rot = "win" if mv.quad is None else f"quad {mv.quad} {'ccw' if mv.direction == 1 else 'cw'}"
        print(f"  place {mv.cell} {rot}: {v:+d}")
    return 0


def cmd_search(args):
    board = B.parse_board(args.board)
    boundary = E.StoredBoundary(args.boundary) if args.boundary else None
    res = SE.perfect_value(board, boundary=boundary, prune=args.prune)
    print(B.pretty(board))
    print(f"value for {B.side_to_move(board).name.lower()}: {res.value:+d} ({res.nodes} nodes)")
    return 0


def cmd_store_verify(args):
    r = ST.SliceReader(args.path)
    n = 0
    for blk in r.block_ids():
        r.read_block(blk)  # checksum + codec + shape validation
        n += 1
    print(f"{args.path}: slice {r.slice}, {len(r.sections)} sections, {n} blocks ok")
    return 0


def cmd_serve(args):
    from . import server as SV

    cfg = SV.ServerConfig(
        store_dir=args.store,
        midgame_threshold=args.midgame_threshold,
        cache_mb=args.cache_mb,
    )
    SV.serve(cfg, args.port)
    return 0


def cmd_vectors(args):
    """Shared board-key test vectors for alternative front ends."""
    import random

    rng = random.Random(args.seed_int)
    lines = []
    moves = []
    for _ in range(args.count):
        stones = rng.randint(0, 36)
        cells = rng.sample(B.CELLS, stones)
        nb = (stones + 1) // 2
        key = 0
        for i, (x, y) in enumerate(cells):
            d = 1 if i < nb else 2
            key += d * int(B.POW3[B.cell_local(x, y)]) << (16 * B.cell_quadrant(x, y))
        lines.append(f"{B.board_string(key)} {key}")
        if args.moves_out and stones < 36 and B.terminal_value(key) is None:
            child, mv = rng.choice(B.moves(key))
            q = -1 if mv.quad is None else mv.quad
            d = 0 if mv.direction is None else mv.direction
            moves.append(f"{key} {mv.cell[0]} {mv.cell[1]} {q} {d} {child}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if args.moves_out:
        with open(args.moves_out, "w") as f:
            f.write("\n".join(moves) + "\n")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="pentago", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sub.add_parser("census", help="exact position counts and overcount ratios")
    sub.add_parser("layout-stats", help="per-slice section/block/line totals")

    p = sub.add_parser("partition-stats", help="load balance of the pseudorandom partition")
    p.add_argument("--slice", type=int, required=True)
    p.add_argument("--ranks", type=int, default=72)
    p.add_argument("--seed", type=_seed_arg, default=prng.DEFAULT_SEED)

    p = sub.add_parser("solve", help="retrograde-solve a slice range")
    p.add_argument("--from", dest="from_slice", type=int, default=5)
    p.add_argument("--to", type=int, default=0)
    p.add_argument("--boundary", default="random:default", help="terminal | random:SEEDHEX")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--ranks", type=int, default=None)
    p.add_argument("--seed", type=_seed_arg, default=prng.DEFAULT_SEED)
    p.add_argument("--store", help="directory for solution files")
    p.add_argument("--root", help="restrict to fill-ins of this board")

    p = sub.add_parser("verify", help="backward/forward equivalence on an injected boundary")
    p.add_argument("--slice", type=int, default=5)
    p.add_argument("--seed", type=_seed_arg, default=prng.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=2)

    p = sub.add_parser("midgame", help="exact move values for a many-stone board")
    p.add_argument("--board", required=True)
    p.add_argument("--threshold", type=int, default=M.DEFAULT_THRESHOLD)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("search", help="forward negamax value of a board")
    p.add_argument("--board", required=True)
    p.add_argument("--boundary", help="solution file supplying values at its slice")
    p.add_argument("--prune", action="store_true")

    p = sub.add_parser("store", help="solution file utilities")
    store_sub = p.add_subparsers(dest="store_cmd", required=True)
    pv = store_sub.add_parser("verify", help="validate every block of a file")
    pv.add_argument("path")

    p = sub.add_parser("serve", help="HTTP JSON value service")
    p.add_argument("--port", type=int, default=2048)
    p.add_argument("--store", help="directory of solution files")
    p.add_argument("--midgame-threshold", type=int, default=M.DEFAULT_THRESHOLD)
    p.add_argument("--cache-mb", type=int, default=64)

    p = sub.add_parser("vectors", help="emit shared board-key test vectors")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed-int", type=int, default=20260809)
    p.add_argument("--out")
    p.add_argument("--moves-out", help="also emit place-then-rotate vectors")

    args = ap.parse_args(argv)
    handlers = {
        "census": cmd_census,
        "layout-stats": cmd_layout_stats,
        "partition-stats": cmd_partition_stats,
        "solve": cmd_solve,
        "verify": cmd_verify,
        "midgame": cmd_midgame,
        "search": cmd_search,
        "serve": cmd_serve,
        "vectors": cmd_vectors,
    }
    if args.cmd == "store":
        return cmd_store_verify(args)
    return handlers[args.cmd](args)


if __name__ == "__main__":
    raise SystemExit(main())
