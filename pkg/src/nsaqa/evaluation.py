"""Recognition accuracy and phase AIoU against generator ground truth."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from .config import AnalyzerConfig
from .errors import AnalysisError
from .recognition import recognize
from .segmentation import PHASES, segment
from .symbols import interpolate_poses

CATEGORIES = ("armstand", "rotation_type", "position", "half_somersaults", "half_twists")
IOU_THRESHOLDS = (0.5, 0.75)


def iou(a: Optional[tuple], b: Optional[tuple]) -> Optional[float]:
    """IoU of inclusive frame ranges; None when both are absent, 0 when only one is."""
    if a is None and b is None:
        return None
    if a is None or b is None:
        return 0.0
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]) + 1)
    union = (a[1] - a[0] + 1) + (b[1] - b[0] + 1) - inter
    return inter / union


def dive_hit_rate(pred: Optional[dict], truth: dict, threshold: float) -> float:
    """Share of phases (present in either input) whose IoU reaches ``threshold``."""
    hits, total = 0, 0
    for p in PHASES:
        v = iou(None if pred is None else pred.get(p), truth.get(p))
        if v is None:
            continue
        total += 1
        hits += v >= threshold
    return hits / total if total else 1.0


def aiou(preds, truths, threshold: float) -> float:
    """Mean over dives of the per-dive share of phases with IoU >= threshold."""
    rates = [dive_hit_rate(p, t, threshold) for p, t in zip(preds, truths, strict=True)]
    if not rates:
        raise ValueError("aiou needs at least one dive")
    return sum(rates) / len(rates)


def _predict(stream, cfg):
    s = interpolate_poses(stream, cfg.max_gap)
    try:
        d = recognize(s, cfg)
        seg = segment(s, d, cfg)
    except AnalysisError as e:
        return None, None, f"{type(e).__name__}: {e}"
    return d, seg, None


def evaluate(pairs, cfg: Optional[AnalyzerConfig] = None, jobs: int = 1) -> dict:
    """Score the analyzer on ``(stream, GroundTruth)`` pairs; order-independent."""
    cfg = cfg or AnalyzerConfig()
    pairs = sorted(pairs, key=lambda p: p[0].clip_id)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda p: _predict(p[0], cfg), pairs))
    else:
        results = [_predict(s, cfg) for s, _ in pairs]

    correct = {c: 0 for c in CATEGORIES}
    preds, truths, failures = [], [], []
    for (s, gt), (d, seg, err) in zip(pairs, results):
        truth = gt.descriptor.to_dict()
        if err is not None:
            failures.append({"clip_id": s.clip_id, "error": err})
        else:
            got = d.to_dict()
            for c in CATEGORIES:
                correct[c] += got[c] == truth[c]
        preds.append(None if seg is None else {p: seg.get(p) for p in PHASES})
        truths.append(dict(gt.phases))
    n = len(pairs)
    return {
        "n": n,
        "accuracy": {c: correct[c] / n for c in CATEGORIES} if n else {},
        "aiou": {str(k): aiou(preds, truths, k) for k in IOU_THRESHOLDS} if n else {},
        "failures": failures,
    }
