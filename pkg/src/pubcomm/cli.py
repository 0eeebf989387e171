"""Command-line entry point: ``pubcomm <subcommand> ...``."""
from __future__ import annotations

import argparse
import io
import logging
import sys
from pathlib import Path

from .config import defaults_text, load_config
from .pipeline import CONFIG_FILE, EXPORTS, STAGES, export, report_from_counts, run_pipeline, run_stage
from .workspace import StageError, Workspace

log = logging.getLogger("pubcomm")

# flag dest -> (section, key)
FLAG_MAP = {
    "seed": ("run", "seed"),
    "trials": ("run", "trials"),
    "workers": ("run", "workers"),
    "input": ("ingest", "input"),
    "disambiguation": ("ingest", "disambiguation"),
    "min_pubs": ("authors", "min_pubs"),
    "min_frac": ("topics", "min_frac"),
    "window": ("rir", "window"),
    "mode": ("affinity", "mode"),
    "top_k": ("delineation", "top_k"),
    "researchers": ("delineation", "researchers"),
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-w", "--workspace", default="workspace", help="workspace directory (default: ./workspace)")
    p.add_argument("-c", "--config", help="INI configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--input", help="WoS flat file(s), comma separated")
    p.add_argument("--disambiguation", help="CSV: record_id, author_position, resolved_id")
    p.add_argument("--min-pubs", type=int)
    p.add_argument("--min-frac", type=float)
    p.add_argument("--window", type=int)
    p.add_argument("--mode", choices=("citation", "author_activity"))
    p.add_argument("--top-k", type=int)
    p.add_argument("--researchers", help="WoS flat file with one researcher's publications")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pubcomm", description="Community structure of research fields "
                                     "from bibliographic records.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run",) + tuple(STAGES):
        p = sub.add_parser(name, help="run the full pipeline" if name == "run" else f"run the {name} stage")
        _common(p)
        if name == "report":
            p.add_argument("--counts", help="JSON count fixture; prints the tables without a workspace")
    p = sub.add_parser("export", help="export a staged artifact")
    p.add_argument("artifact", help=f"one of: {', '.join(sorted(EXPORTS))}")
    p.add_argument("format", help="graphml, dot or csv")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-w", "--workspace", default="workspace")
    p = sub.add_parser("synth", help="planted-partition benchmark graph and its recovery score")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--p-in", type=float, default=0.25)
    p.add_argument("--p-out", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("-o", "--output", help="directory for edges.csv and truth.csv")
    p = sub.add_parser("config", help="print configuration")
    p.add_argument("--defaults", action="store_true", help="print the embedded defaults")
    return parser


def _config_for(args):
    ws_cfg = Path(args.workspace) / CONFIG_FILE
    path = args.config or (ws_cfg if ws_cfg.exists() else None)
    cfg = load_config(path)
    for dest, (sec, key) in FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is not None:
            if dest in ("input", "disambiguation", "researchers"):
                value = ",".join(str(Path(v).resolve()) for v in str(value).split(","))
            cfg.set(sec, key, value)
    return cfg


def _synth(args) -> int:
    from .community import detect_communities, nmi, planted_partition
    from .graph import write_edgelist_csv

    g = planted_partition(args.n, args.k, args.p_in, args.p_out, args.seed)
    part, rep = detect_communities(g.network, args.seed, args.trials)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        write_edgelist_csv(g.network, out / "edges.csv")
        (out / "truth.csv").write_text(g.truth.to_csv(), "utf-8")
        (out / "detected.csv").write_text(part.to_csv(), "utf-8")
    print(f"clusters: {part.num_clusters} (planted {args.k})")
    print(f"codelength: {rep.codelength_bits:.6f} bits")
    print(f"nmi: {nmi(part, g.truth):.4f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "config":
            if args.defaults:
                sys.stdout.write(defaults_text())
            else:
                buf = io.StringIO()
                load_config().parser.write(buf)
                sys.stdout.write(buf.getvalue())
            return 0
        if args.command == "synth":
            return _synth(args)
        if args.command == "export":
            dest = export(Workspace(args.workspace, create=False), args.artifact, args.format, args.output)
            print(f"wrote {dest}")
            return 0
        if args.command == "report" and args.counts:
            with open(args.counts, encoding="utf-8") as fh:
                sys.stdout.write(report_from_counts(fh.read()))
            return 0
        try:
            cfg = _config_for(args)
        except (OSError, ValueError) as exc:
            raise StageError("config", str(exc)) from exc
        if args.command == "run":
            ws = run_pipeline(cfg, args.workspace)
        else:
            ws = Workspace(args.workspace)
            buf = io.StringIO()
            cfg.parser.write(buf)
            ws.path(CONFIG_FILE).write_text(buf.getvalue(), "utf-8")
            run_stage(ws, args.command, cfg)
        if args.command in ("run", "report"):
            sys.stdout.write(ws.path("summary.txt").read_text("utf-8"))
        return 0
    except StageError as exc:
        print(f"pubcomm: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
