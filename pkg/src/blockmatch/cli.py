"""Command-line front end.

Subcommands: ``estimate``, ``bench``, ``stats``, ``reconstruct``, ``synth``.
Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import Algo, EstimatorConfig, estimate_sequence, fs_mean_nsp
from .analysis import (
    chung_probabilities,
    containment_records,
    frame_quality,
    pr_of_d,
    reconstruct,
    sequence_report,
)
from .matching import CriterionKind
from .video_io import SynthSpec, VideoFormatError, load_y4m, load_yuv420, save_yuv420, synth

log = logging.getLogger("blockmatch")

MV_HEADER = ["frame", "block_row", "block_col", "mvx", "mvy", "cost", "nsp"]
FRAME_STATS_HEADER = ["frame", "total_nsp", "mean_nsp", "mse", "psnr_db"]
BENCH_HEADER = ["algo", "d", "mean_psnr_db", "mean_mse", "mean_nsp", "sur_pct"]
QUALITY_HEADER = ["frame_index", "mse", "psnr_db"]


class UsageError(Exception):
    pass


# --- formatting -----------------------------------------------------------------


def fmt(x, dp: int) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.{dp}f}"


def fmt_cost(cost) -> str:
    if isinstance(cost, int):
        return str(cost)
    return f"{float(cost):.6f}"


def jnum(x, dp: int):
    """JSON-safe rounded number; infinities become the string ``"inf"``."""
    if x is None:
        return None
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return round(float(x), dp)


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_json(path: Path, obj) -> Path:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    return path


def report_json(rep) -> dict:
    cfg = rep.config
    return {
        "sequence": rep.sequence,
        "algo": rep.algo,
        "config": {"w": cfg["w"], "n": cfg["n"], "d": cfg["d"], "criterion": cfg["criterion"]},
        "frames": [
            {"index": q.frame_index, "mse": jnum(q.mse, 3), "psnr_db": jnum(q.psnr_db, 3), "nsp_total": nsp}
            for q, nsp in zip(rep.frames, rep.frame_nsp)
        ],
        "summary": {
            "mean_psnr_db": jnum(rep.mean_psnr_db, 3),
            "mean_mse": jnum(rep.mean_mse, 3),
            "mean_nsp_per_block": jnum(rep.mean_nsp, 2),
            "sur_pct": jnum(rep.sur_pct, 2),
            "lossless_frames": rep.lossless_frames,
        },
    }


# --- argument handling ----------------------------------------------------------


def _pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X,Y got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _algo_list(text: str):
    try:
        return [Algo.parse(a) for a in text.split(",") if a.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _criterion(text: str):
    try:
        return CriterionKind.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def parse_synth(text: str, args) -> SynthSpec:
    """``static``, ``translate:X,Y`` or ``random-texture-translate:X,Y`` (alias ``texture``)."""
    name, _, mv = text.partition(":")
    name = {"texture": "random-texture-translate"}.get(name, name)
    true_mv = _pair(mv) if mv else (0, 0)
    return SynthSpec(
        pattern=name,
        true_mv=true_mv,
        width=args.width or 64,
        height=args.height or 64,
        frame_count=args.frames if args.frames is not None else 5,
        seed=args.seed,
    )


def _add_input(p, algo_multi=False, d_multi=False):
    src = p.add_argument_group("input")
    g = src.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", type=Path, help="raw YUV 4:2:0 file or .y4m stream")
    g.add_argument("--synth", metavar="SPEC", help="static | translate:X,Y | random-texture-translate:X,Y")
    src.add_argument("--width", type=int)
    src.add_argument("--height", type=int)
    src.add_argument("--frames", type=int, help="maximum number of frames to read")
    src.add_argument("--seed", type=int, default=0)

    est = p.add_argument_group("estimator")
    if algo_multi:
        est.add_argument("--algo", type=_algo_list, default=[Algo.FS, Algo.PVSSA], help="comma-separated list")
    else:
        est.add_argument("--algo", type=Algo.parse, default=Algo.PVSSA, help="fs|3ss|4ss|ds|psa|pvssa")
    if d_multi:
        est.add_argument("--d", type=_int_list, default=[3], help="comma-separated PVSSA d values")
    else:
        est.add_argument("--d", type=int, default=3)
    est.add_argument("--w", type=int, default=15, help="maximum displacement W")
    est.add_argument("--block", type=int, default=16, help="block size N")
    est.add_argument("--criterion", type=_criterion, default=None, help="sae|mae|sse|mse")
    est.add_argument("--psa-count-overlaps", action="store_true")
    p.add_argument("--out", type=Path, default=Path("out"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockmatch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate motion vectors and dump them as CSV")
    _add_input(p)

    p = sub.add_parser("bench", help="compare algorithms on one sequence")
    _add_input(p, algo_multi=True, d_multi=True)

    p = sub.add_parser("stats", help="predictor-rectangle containment probabilities")
    _add_input(p)
    p.add_argument("--d-max", type=int, default=5)
    p.add_argument("--chung", action="store_true", help="also tabulate the D statistic")

    p = sub.add_parser("reconstruct", help="motion-compensated frames and per-frame quality")
    _add_input(p, algo_multi=True)
    p.add_argument("--format", choices=["pgm", "yuv"], default="pgm")

    p = sub.add_parser("synth", help="write a synthetic raw YUV 4:2:0 sequence")
    p.add_argument("--pattern", choices=["static", "translate", "random-texture-translate"], default="translate")
    p.add_argument("--mv", type=_pair, default=(0, 0))
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--frames", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", type=Path, required=True)
    return parser


def load_input(args):
    if args.synth:
        try:
            spec = parse_synth(args.synth, args)
        except (ValueError, argparse.ArgumentTypeError) as e:
            raise UsageError(str(e)) from None
        return synth(spec), {"synth": args.synth, "width": spec.width, "height": spec.height,
                             "frames": spec.frame_count, "seed": spec.seed}
    path = args.input
    if path.suffix.lower() == ".y4m":
        seq = load_y4m(path, args.frames)
    else:
        if args.width is None or args.height is None:
            raise UsageError("raw YUV input requires --width and --height")
        seq = load_yuv420(path, args.width, args.height, args.frames)
    return seq, {"path": str(path), "width": seq.width, "height": seq.height, "frames": len(seq)}


def make_config(args, algo, d, default_criterion=CriterionKind.SAE) -> EstimatorConfig:
    try:
        return EstimatorConfig(
            algo=algo,
            w_max=args.w,
            block_n=args.block,
            d=d,
            criterion=args.criterion or default_criterion,
            psa_count_overlaps=args.psa_count_overlaps,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def write_manifest(out: Path, command: str, source: dict, configs, outputs) -> None:
    write_json(
        out / "manifest.json",
        {
            "tool": "blockmatch",
            "version": __version__,
            "command": command,
            "input": source,
            "configs": [c.echo() for c in configs],
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "outputs": sorted(p.name if p.parent == out else str(p.relative_to(out)) for p in outputs),
        },
    )


def _need_frames(seq, n=2):
    if len(seq) < n:
        raise VideoFormatError(f"need at least {n} frames, got {len(seq)}")


def _job_name(cfg: EstimatorConfig) -> str:
    return f"{cfg.algo.value}_d{cfg.d}" if cfg.algo is Algo.PVSSA else cfg.algo.value


# --- commands -----------------------------------------------------------------


def cmd_estimate(args) -> list:
    seq, source = load_input(args)
    _need_frames(seq)
    cfg = make_config(args, args.algo, args.d)
    fields, _ = estimate_sequence(seq, cfg)
    rep = sequence_report(seq, fields, cfg)

    out = args.out
    rows = []
    for fld in fields:
        for (r, c), e in zip(fld.positions(), fld.entries):
            rows.append([fld.frame_index, r, c, e.mv[0], e.mv[1], fmt_cost(e.cost), e.nsp])
    outputs = [write_csv(out / "mvs.csv", MV_HEADER, rows)]
    blocks = rep.blocks_per_frame
    stats_rows = [
        [q.frame_index, nsp, fmt(nsp / blocks, 2), fmt(q.mse, 3), fmt(q.psnr_db, 3)]
        for q, nsp in zip(rep.frames, rep.frame_nsp)
    ]
    outputs.append(write_csv(out / "frame_stats.csv", FRAME_STATS_HEADER, stats_rows))
    write_manifest(out, "estimate", source, [cfg], outputs)
    return outputs


def bench_jobs(args) -> list[EstimatorConfig]:
    algos = list(dict.fromkeys(args.algo))
    if not algos:
        raise UsageError("bench needs at least one algorithm")
    if Algo.FS not in algos:
        algos.insert(0, Algo.FS)
    jobs = []
    for a in algos:
        if a is Algo.PVSSA:
            jobs.extend(make_config(args, a, d) for d in args.d)
        else:
            jobs.append(make_config(args, a, args.d[0] if args.d else 3))
    return jobs


def cmd_bench(args) -> list:
    seq, source = load_input(args)
    _need_frames(seq)
    jobs = bench_jobs(args)
    fs_nsp = fs_mean_nsp(seq.width, seq.height, jobs[0])

    out = args.out
    outputs, rows = [], []
    for cfg in jobs:
        log.info("bench %s on %s", _job_name(cfg), seq.name)
        fields, _ = estimate_sequence(seq, cfg)
        rep = sequence_report(seq, fields, cfg, fs_nsp=fs_nsp)
        outputs.append(write_json(out / f"report_{_job_name(cfg)}.json", report_json(rep)))
        rows.append([
            cfg.algo.label,
            cfg.d if cfg.algo is Algo.PVSSA else "",
            fmt(rep.mean_psnr_db, 3),
            fmt(rep.mean_mse, 3),
            fmt(rep.mean_nsp, 2),
            fmt(rep.sur_pct, 2),
        ])
    outputs.append(write_csv(out / "comparison.csv", BENCH_HEADER, rows))
    write_manifest(out, "bench", source, jobs, outputs)
    return outputs


def cmd_stats(args) -> list:
    seq, source = load_input(args)
    _need_frames(seq)
    if args.d_max < 1:
        raise UsageError("--d-max must be >= 1")
    cfg = make_config(args, Algo.FS, args.d, default_criterion=CriterionKind.MAE)
    fields, _ = estimate_sequence(seq, cfg)
    records = containment_records(fields)

    out = args.out
    rows = [[d, fmt(100.0 * pr_of_d(records, d), 2)] for d in range(1, args.d_max + 1)]
    outputs = [write_csv(out / "pr_d.csv", ["d", "pr_pct"], rows)]
    if args.chung:
        table = chung_probabilities([fields], cfg.w_max)
        acc = table.accumulated
        crow = [[d, fmt(100.0 * p, 2), fmt(100.0 * a, 2)] for d, (p, a) in enumerate(zip(table.prob, acc))]
        outputs.append(write_csv(out / "chung_d.csv", ["d", "prob_pct", "accumulated_pct"], crow))
    write_manifest(out, "stats", source, [cfg], outputs)
    return outputs


def _write_pgm(path: Path, luma: np.ndarray) -> Path:
    h, w = luma.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(np.ascontiguousarray(luma, dtype=np.uint8).tobytes())
    return path


def _psnr_diff(a, b) -> str:
    if a.lossless and b.lossless:
        return fmt(0.0, 3)
    if a.lossless or b.lossless:
        return "inf" if a.lossless else "-inf"
    return fmt(a.psnr_db - b.psnr_db, 3)


def cmd_reconstruct(args) -> list:
    from .video_io import Sequence

    seq, source = load_input(args)
    _need_frames(seq)
    algos = list(dict.fromkeys(args.algo))
    jobs = [make_config(args, a, args.d) for a in algos]
    out = args.out
    outputs = []
    series = {}
    for cfg in jobs:
        name = _job_name(cfg)
        fields, _ = estimate_sequence(seq, cfg)
        recs = [reconstruct(seq[k], fld, cfg.block_n) for k, fld in enumerate(fields)]
        quality = [frame_quality(seq[k + 1], r, k + 1) for k, r in enumerate(recs)]
        series[name] = quality
        if args.format == "pgm":
            d = out / name
            d.mkdir(parents=True, exist_ok=True)
            for k, r in enumerate(recs):
                outputs.append(_write_pgm(d / f"frame_{k + 1:04d}.pgm", r.luma))
        else:
            rseq = Sequence.from_arrays([r.luma for r in recs], name=name)
            p = out / f"recon_{name}.yuv"
            save_yuv420(rseq, p)
            outputs.append(p)
        rows = [[q.frame_index, fmt(q.mse, 3), fmt(q.psnr_db, 3)] for q in quality]
        outputs.append(write_csv(out / f"quality_{name}.csv", QUALITY_HEADER, rows))

    names = list(series)
    if len(names) > 1:
        base = names[0]
        header = ["frame_index"] + [f"{base}_minus_{n}" for n in names[1:]]
        rows = []
        for i, q0 in enumerate(series[base]):
            row = [q0.frame_index]
            for n in names[1:]:
                row.append(_psnr_diff(q0, series[n][i]))
            rows.append(row)
        outputs.append(write_csv(out / "psnr_diff.csv", header, rows))
    write_manifest(out, "reconstruct", source, jobs, outputs)
    return outputs


def cmd_synth(args) -> list:
    try:
        spec = SynthSpec(args.pattern, args.mv, args.width, args.height, args.frames, args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if spec.width % 2 or spec.height % 2:
        raise UsageError("4:2:0 output needs even --width/--height")
    save_yuv420(synth(spec), args.output)
    return [args.output]


COMMANDS = {
    "estimate": cmd_estimate,
    "bench": cmd_bench,
    "stats": cmd_stats,
    "reconstruct": cmd_reconstruct,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if hasattr(args, "out") and args.command != "synth":
            args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2
    except (OSError, VideoFormatError, ValueError) as e:
        print(f"{parser.prog}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
