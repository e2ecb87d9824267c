"""Single command-line entry point: enumerate, infer, simulate, serve.

Exit codes: 0 success, 2 validation error, 3 inconsistent example set,
4 file or cache I/O failure. Machine-readable output goes to files; stdout
carries human summaries.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import CacheFileError, GameBuildError, InconsistentSpecError
from .griddsl import (CANONICAL_TARGET, N_RAW_PROGRAMS, GridGame, build_grid_game,
                      canonicalize, load_space, parse_grid_examples, pattern_to_text,
                      prior_scores, save_space)
from .pragmatics import l0_posterior, l1_posterior, lp_posterior
from .refgame import load_matrix, save_matrix
from .segment import build_segment_game, format_segment_hypothesis, parse_segment_examples
from .simulation import (ExperimentConfig, mean_symbols, success_curve,
                         write_curve_csv, write_means_csv)


def cache_dir() -> Path:
    root = os.environ.get("PRAGSYNTH_CACHE_DIR")
    if root:
        return Path(root)
    return Path.home() / ".cache" / "pragsynth"


def default_space_path() -> Path:
    return cache_dir() / "canonical_space.bin"


def _load_grid_game(space_path: str | None, matrix_cache: str | None) -> GridGame:
    if space_path:
        space = load_space(space_path)
    elif default_space_path().is_file():
        space = load_space(default_space_path())
    else:
        print("building canonical space (no cache found)...", flush=True)
        space = canonicalize()
    matrix = None
    if matrix_cache and Path(matrix_cache).is_file():
        matrix = load_matrix(matrix_cache)
        if matrix.n_hypotheses != len(space):
            raise CacheFileError(
                f"matrix cache holds {matrix.n_hypotheses} hypotheses, "
                f"canonical space has {len(space)}")
    if matrix is None:
        matrix = build_grid_game(space)
        if matrix_cache:
            save_matrix(matrix, matrix_cache)
            print(f"wrote matrix cache to {matrix_cache}")
    return GridGame(space, matrix, prior_scores(space))


def cmd_enumerate(args) -> int:
    out = Path(args.out) if args.out else default_space_path()
    if out.exists() and not args.force:
        print(f"error: {out} exists; pass --force to overwrite", file=sys.stderr)
        return 2
    space = canonicalize()
    print(f"raw programs:        {space.raw_count}")
    print(f"canonical patterns:  {len(space)}")
    if len(space) == CANONICAL_TARGET:
        print(f"matches the published count of {CANONICAL_TARGET}")
    else:
        print(f"published count is {CANONICAL_TARGET}; this reconstruction of the "
              f"corrupted color-function production differs by {len(space) - CANONICAL_TARGET:+d} "
              f"(see README discrepancy note)")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_space(space, out)
    print(f"wrote canonical space to {out}")
    return 0


def cmd_infer(args) -> int:
    if args.game == "segment":
        if args.listener == "lp":
            print("error: the crafted-prior listener is grid-only", file=sys.stderr)
            return 2
        game = build_segment_game()
        examples = parse_segment_examples(args.examples)
        posterior = (l0_posterior if args.listener == "l0" else l1_posterior)(
            game.matrix, examples)
        print(f"listener={args.listener} examples={examples} "
              f"n_consistent={posterior.n_consistent}")
        for rank, (h, prob) in enumerate(posterior.top_k(args.top_k), start=1):
            print(f"{rank}. {format_segment_hypothesis(game.hypotheses[h])}  p={prob:.4f}")
        return 0
    grid = _load_grid_game(args.space, args.matrix_cache)
    examples = parse_grid_examples(args.examples)
    if args.listener == "l0":
        posterior = l0_posterior(grid.matrix, examples)
    elif args.listener == "l1":
        posterior = l1_posterior(grid.matrix, examples)
    else:
        posterior = lp_posterior(grid.matrix, examples, grid.scores)
    print(f"listener={args.listener} n_examples={len(examples)} "
          f"n_consistent={posterior.n_consistent}")
    for rank, (h, prob) in enumerate(posterior.top_k(args.top_k), start=1):
        print(f"--- rank {rank}  pattern {h}  p={prob:.4f}")
        print(pattern_to_text(grid.space.pattern(h)))
    return 0


def cmd_simulate(args) -> int:
    if args.game == "segment":
        if args.listener == "lp":
            print("error: the crafted-prior listener is grid-only", file=sys.stderr)
            return 2
        matrix, scores = build_segment_game().matrix, None
    else:
        grid = _load_grid_game(args.space, args.matrix_cache)
        matrix, scores = grid.matrix, grid.scores
    cfg = ExperimentConfig(speaker=args.speaker, listener=args.listener,
                           trials=args.trials, max_rounds=args.max_rounds,
                           max_symbols=args.max_symbols, seed=args.seed)
    if args.mode == "means":
        mean, std, _, failures = mean_symbols(matrix, cfg, scores)
        print(f"{cfg.speaker}-{cfg.listener}: mean={mean:.3f} std={std:.3f} "
              f"failures={failures} trials={cfg.trials} seed={cfg.seed}")
        if args.out:
            write_means_csv(cfg, mean, std, failures, args.out)
            print(f"wrote {args.out}")
    else:
        rows = success_curve(matrix, cfg, scores)
        for r in rows:
            print(f"n_symbols={r['n_symbols']:2d} rate={r['rate']:.3f}")
        if args.out:
            write_curve_csv(rows, args.out)
            print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .service import SynthService, load_stimuli, make_server

    grid = _load_grid_game(args.space, args.matrix_cache)
    stimuli = load_stimuli(args.stimuli_file)
    service = SynthService(grid.matrix, grid.space, grid.scores, stimuli,
                           log_dir=args.log_dir)
    server = make_server(service, host=args.host, port=args.port,
                         static_dir=args.static_dir)
    print(f"serving {len(stimuli)} stimuli over {grid.matrix.n_hypotheses} patterns "
          f"on http://{args.host}:{server.server_address[1]}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pragsynth",
                                     description="Pragmatic synthesis-by-example engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_enum = sub.add_parser("enumerate", help="build and save the canonical pattern space")
    p_enum.add_argument("--out", help="canonical-space file (default: cache dir)")
    p_enum.add_argument("--force", action="store_true", help="overwrite an existing file")
    p_enum.set_defaults(func=cmd_enumerate)

    p_infer = sub.add_parser("infer", help="run a listener on an example set")
    p_infer.add_argument("--game", choices=("segment", "grid"), default="grid")
    p_infer.add_argument("--listener", choices=("l0", "l1", "lp"), default="l1")
    p_infer.add_argument("--examples", required=True,
                         help='segment: "1:occ,2:occ"; grid: "0,0,pebble;3,3,pig_red"')
    p_infer.add_argument("--top-k", type=int, default=5)
    p_infer.add_argument("--space", help="canonical-space file")
    p_infer.add_argument("--matrix-cache", help="binary meaning-matrix cache")
    p_infer.set_defaults(func=cmd_infer)

    p_sim = sub.add_parser("simulate", help="run communication-efficiency experiments")
    p_sim.add_argument("--game", choices=("segment", "grid"), default="grid")
    p_sim.add_argument("--speaker", choices=("s0", "s1-sample", "s1-greedy"), required=True)
    p_sim.add_argument("--listener", choices=("l0", "l1", "lp"), required=True)
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--max-rounds", type=int, default=40)
    p_sim.add_argument("--max-symbols", type=int, default=10)
    p_sim.add_argument("--mode", choices=("means", "curve"), default="means")
    p_sim.add_argument("--out", help="CSV output path")
    p_sim.add_argument("--space", help="canonical-space file")
    p_sim.add_argument("--matrix-cache", help="binary meaning-matrix cache")
    p_sim.set_defaults(func=cmd_simulate)

    p_serve = sub.add_parser("serve", help="run the interactive synthesis service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--space", help="canonical-space file")
    p_serve.add_argument("--matrix-cache", help="binary meaning-matrix cache")
    p_serve.add_argument("--stimuli-file", help="stimulus fixture (default: packaged)")
    p_serve.add_argument("--log-dir", help="directory for per-session JSONL event logs")
    p_serve.add_argument("--static-dir", help="directory of web client assets to serve at /")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, GameBuildError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except InconsistentSpecError as err:
        print(f"error: inconsistent examples: {err}", file=sys.stderr)
        return 3
    except (CacheFileError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
