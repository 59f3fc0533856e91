"""Command line entry point: ``csimap <subcommand>``.

Exit status: 0 success, 1 configuration/usage error, 2 runtime error.
"""

import argparse
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from .csi_map import CsiMap, MapFormatError
from .quantizer import CodebookError, load_codebook, save_codebook
from . import sim


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _log(msg):
    print(msg, file=sys.stderr)


def _load_cfg(path):
    return ExperimentConfig() if path is None else load_config(path)


def _load_book(path, cfg):
    if path is None:
        _log("no codebook given; training one from the config")
        return sim.train_codebook(cfg)
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"codebook file not found: {p}")
    return load_codebook(p)


def cmd_design_codebook(args):
    cfg = _load_cfg(args.config)
    book = sim.train_codebook(cfg)
    save_codebook(book, args.out)
    _log(f"wrote {book.I}x{book.N} codebook (version {book.version_id}) to {args.out}")


def cmd_run(args):
    cfg = _load_cfg(args.config)
    book = _load_book(args.codebook, cfg)
    res = sim.run(cfg, book, force_hit_ratio=args.force_hit_ratio)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    whr = res.windowed_hit_ratio(cfg.hit_window)
    sim.write_csv(out / "fig7.csv", ["session", "windowed_hit_ratio"],
                  [(t + 1, v) for t, v in enumerate(whr)])
    sim.write_csv(out / "alpha.csv", ["session", "alpha"],
                  [(t + 1, a) for t, a in enumerate(res.alpha)])
    sim.write_csv(out / "sessions.csv",
                  ["session", "alpha", "sum_rate_bits", "initiative", "predicted_hit",
                   "predicted_miss", "forced_initiative"],
                  [(t + 1, res.alpha[t], res.sum_rate[t], *map(int, res.outcome_counts[t]))
                   for t in range(res.alpha.size)])
    for j, m in enumerate(res.state.maps):
        (out / f"map_{j}.txt").write_text(m.dumps())
    (out / "run_meta.txt").write_text(
        f"seed = {cfg.system.rng_seed}\nconfig_hash = {cfg.digest()}\n"
        f"code_version = {sim.__version__}\ncodebook_version = {book.version_id}\n")
    _log(f"{res.alpha.size} sessions, mean sum-rate {res.sum_rate.mean():.4f} bits/s/Hz per cell")


def cmd_sweep(args):
    cfg = _load_cfg(args.config)
    book = _load_book(args.codebook, cfg)
    metrics = sim.run_experiment(cfg, book, oracle_bands=args.force_hit_ratio, log=_log)
    sim.write_outputs(metrics, cfg, args.out_dir)
    for band in metrics.missing_bands:
        _log(f"hit-ratio band {band} not reached within the search budget")
    _log(f"wrote fig6.csv, fig6_mc.csv, fig7.csv, alpha.csv to {args.out_dir}")


def cmd_map_dump(args):
    p = Path(args.map)
    if not p.exists():
        raise ConfigError(f"map file not found: {p}")
    m = CsiMap.loads(p.read_text())
    self_loops = sum(1 for s, d, _ in m.edges() if s == d)
    out_deg = [len(e) for e in m.out_edges.values()]
    print(f"codebook_version {m.codebook_version}")
    print(f"theta {m.theta!r}  gc_threshold {m.gc_threshold!r}")
    print(f"nodes {m.num_nodes}  edges {m.num_edges}  self_loops {self_loops}  "
          f"cursors {len(m.cursors)}")
    if out_deg:
        print(f"out-degree max {max(out_deg)}  mean {sum(out_deg) / len(out_deg):.3f}")
    for node, q in sorted(m.qcsi_of.items()):
        edges = sorted(m.out_edges[node].items(), key=lambda kv: -kv[1])
        desc = ", ".join(f"->{d}:{w:.3f}" for d, w in edges)
        print(f"  node {node} qcsi=({q.i},{q.n}) {desc}")


def build_parser():
    p = _Parser(prog="csimap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("design-codebook", help="train a codebook from simulated estimates")
    d.add_argument("--config")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_design_codebook)

    r = sub.add_parser("run", help="single experiment")
    r.add_argument("--config")
    r.add_argument("--codebook")
    r.add_argument("--out-dir", required=True)
    r.add_argument("--force-hit-ratio", type=float, default=None, metavar="H",
                   help="oracle mode: each UT skips its pilot with probability H")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="sum-rate vs hit-ratio bands and hit-ratio convergence")
    s.add_argument("--config")
    s.add_argument("--codebook")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--force-hit-ratio", action="store_true",
                   help="place hit-ratio bands by oracle injection instead of search")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("map-dump", help="print CSI map statistics")
    m.add_argument("--map", required=True)
    m.set_defaults(func=cmd_map_dump)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _log(str(exc))
        return 1
    try:
        args.func(args)
    except (ConfigError, CodebookError, MapFormatError) as exc:
        _log(f"error: {exc}")
        return 1
    except Exception as exc:  # noqa: BLE001
        _log(f"runtime error: {type(exc).__name__}: {exc}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
