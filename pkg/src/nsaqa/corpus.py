"""Directories of symbol streams with optional ground-truth sidecars.

A stream lives in ``<clip_id>.jsonl``; its ground truth, when present, in
``<clip_id>.truth.json`` next to it.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import EmptyCorpus, MalformedDocument, MissingGroundTruth
from .symbols import SymbolStream, parse_stream, serialize_stream
from .synth import GroundTruth

STREAM_SUFFIX = ".jsonl"
TRUTH_SUFFIX = ".truth.json"


def read_stream(path) -> SymbolStream:
    return parse_stream(Path(path).read_bytes())


def write_pair(out_dir, stream: SymbolStream, truth: GroundTruth = None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stream.clip_id}{STREAM_SUFFIX}").write_bytes(serialize_stream(stream))
    if truth is not None:
        doc = json.dumps(truth.to_dict(), indent=1, sort_keys=True) + "\n"
        (out / f"{stream.clip_id}{TRUTH_SUFFIX}").write_text(doc, encoding="utf-8")


def stream_paths(corpus_dir) -> list:
    d = Path(corpus_dir)
    if not d.is_dir():
        raise EmptyCorpus(f"{corpus_dir} is not a directory")
    paths = sorted(d.glob(f"*{STREAM_SUFFIX}"))
    if not paths:
        raise EmptyCorpus(f"no *{STREAM_SUFFIX} streams in {corpus_dir}")
    return paths


def read_streams(corpus_dir) -> list:
    return [read_stream(p) for p in stream_paths(corpus_dir)]


def read_truth(path) -> GroundTruth:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return GroundTruth.from_dict(doc)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise MalformedDocument(f"{path}: unreadable ground truth ({e})") from None


def read_pairs(corpus_dir) -> list:
    pairs = []
    for p in stream_paths(corpus_dir):
        truth = p.with_name(p.name[: -len(STREAM_SUFFIX)] + TRUTH_SUFFIX)
        if not truth.exists():
            raise MissingGroundTruth(f"{p.name} has no {truth.name}")
        pairs.append((read_stream(p), read_truth(truth)))
    return pairs
