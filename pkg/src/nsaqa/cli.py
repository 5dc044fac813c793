"""Command-line front-end.

Exit codes: 0 success, 1 bad input, 2 analysis failure, 3 internal error.
Payloads go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus
from .config import load_config, parse_overrides
from .errors import InputError, NsaqaError
from .evaluation import evaluate
from .pipeline import analyze, shipped_reference
from .recognition import recognize
from .report import load_templates, render_html
from .scoring import ReferenceDistribution, WeightProfile, build_reference
from .segmentation import segment
from .symbols import interpolate_poses
from .synth import sample_corpus


class UsageError(InputError):
    pass


def _config(args):
    return load_config(args.config, parse_overrides(args.set))


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=1) + "\n")


def cmd_analyze(args) -> int:
    cfg = _config(args)
    stream = corpus.read_stream(args.stream)
    ref = ReferenceDistribution.load(args.ref) if args.ref else shipped_reference()
    weights = WeightProfile.load(args.weights) if args.weights else None
    templates = load_templates(args.templates) if args.templates else None
    report = analyze(stream, ref, cfg, weights, templates)
    out = Path(args.out)
    out.write_bytes(render_html(report))
    out.with_suffix(".json").write_bytes(report.to_json())
    sys.stdout.write(f"{report.overall:.1f}\n")
    return 0


def _prepared(args):
    cfg = _config(args)
    s = interpolate_poses(corpus.read_stream(args.stream), cfg.max_gap)
    return s, cfg


def cmd_recognize(args) -> int:
    s, cfg = _prepared(args)
    _emit(recognize(s, cfg).to_dict())
    return 0


def cmd_segment(args) -> int:
    s, cfg = _prepared(args)
    _emit(segment(s, recognize(s, cfg), cfg).to_dict())
    return 0


def cmd_build_ref(args) -> int:
    cfg = _config(args)
    streams = corpus.read_streams(args.corpus_dir)

    def skipped(clip_id, err):
        print(f"skipped {clip_id}: {type(err).__name__}: {err}", file=sys.stderr)

    ref = build_reference(streams, cfg, name=args.name or Path(args.corpus_dir).name,
                          provenance=args.provenance, jobs=args.jobs, on_skip=skipped)
    Path(args.out).write_bytes(ref.to_json())
    return 0


def cmd_synth(args) -> int:
    if args.n < 1:
        raise UsageError("n must be at least 1")
    for stream, truth in sample_corpus(args.n, args.seed, args.noise, args.dropout):
        corpus.write_pair(args.out_dir, stream, truth)
    return 0


def cmd_eval(args) -> int:
    cfg = _config(args)
    result = evaluate(corpus.read_pairs(args.corpus_dir), cfg, jobs=args.jobs)
    _emit(result)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (default: $NSAQA_CONFIG)")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config field; repeatable")

    p = argparse.ArgumentParser(prog="nsaqa", description="Rule-based platform dive analysis.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="full report for one stream")
    a.add_argument("stream")
    a.add_argument("--ref", help="reference distribution JSON (default: shipped synthetic reference)")
    a.add_argument("--out", required=True, help="HTML output path; JSON goes next to it")
    a.add_argument("--weights", help="JSON object of aspect -> weight")
    a.add_argument("--templates", help="sentence template library JSON")
    a.set_defaults(func=cmd_analyze)

    for name, func in (("recognize", cmd_recognize), ("segment", cmd_segment)):
        c = sub.add_parser(name, parents=[common], help=f"print the {name} result as JSON")
        c.add_argument("stream")
        c.set_defaults(func=func)

    b = sub.add_parser("build-ref", parents=[common], help="build a reference distribution")
    b.add_argument("corpus_dir")
    b.add_argument("out")
    b.add_argument("--name")
    b.add_argument("--provenance", default="")
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_build_ref)

    s = sub.add_parser("synth", help="write synthetic streams with ground truth")
    s.add_argument("n", type=int)
    s.add_argument("seed", type=int)
    s.add_argument("out_dir")
    s.add_argument("--noise", type=float, default=0.0, help="pixel noise sigma")
    s.add_argument("--dropout", type=float, default=0.0, help="per-frame pose dropout probability")
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", parents=[common], help="accuracy and AIoU against ground truth")
    e.add_argument("corpus_dir")
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        return args.func(args)
    except NsaqaError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e.strerror or e}: {e.filename or ''}".rstrip(": "), file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - last-resort mapping to the internal-error code
        print(f"error: internal: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
