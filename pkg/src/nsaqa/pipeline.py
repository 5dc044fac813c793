"""End-to-end analysis of one symbol stream."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from .config import AnalyzerConfig
from .recognition import DiveDescriptor
from .report import DiveReport, compose_report
from .scoring import ReferenceDistribution, WeightProfile, aggregate, measure, score_aspects
from .segmentation import PhaseSegmentation
from .symbols import SymbolStream


@dataclass(frozen=True)
class Analysis:
    stream: SymbolStream  # after gap filling
    descriptor: DiveDescriptor
    segmentation: PhaseSegmentation
    raws: dict


@lru_cache(maxsize=1)
def shipped_reference() -> ReferenceDistribution:
    """Reference distribution built from the synthetic corpus bundled with the package."""
    data = resources.files("nsaqa").joinpath("data/reference_synthetic.json").read_bytes()
    return ReferenceDistribution.from_json(data)


def analyze_stream(s: SymbolStream, cfg: Optional[AnalyzerConfig] = None) -> Analysis:
    cfg = cfg or AnalyzerConfig()
    return Analysis(*measure(s, cfg))


def analyze(s: SymbolStream, ref: ReferenceDistribution, cfg: Optional[AnalyzerConfig] = None,
            weights: Optional[WeightProfile] = None, templates: Optional[dict] = None) -> DiveReport:
    cfg = cfg or AnalyzerConfig()
    a = analyze_stream(s, cfg)
    scores = score_aspects(a.raws, ref, cfg)
    overall = aggregate(scores, weights)
    return compose_report(a.stream, a.descriptor, a.segmentation, scores, overall, weights, templates)
