"""Rule-based analysis of platform dives from per-frame pose and splash symbols."""

from .config import AnalyzerConfig, load_config
from .pipeline import analyze, analyze_stream, shipped_reference
from .recognition import DiveDescriptor, Position, RotationType, recognize
from .report import DiveReport, render_html
from .scoring import AspectId, ReferenceDistribution, WeightProfile, build_reference
from .segmentation import PhaseSegmentation, segment
from .symbols import SymbolStream, parse_stream, serialize_stream

__all__ = [
    "AnalyzerConfig", "AspectId", "DiveDescriptor", "DiveReport", "PhaseSegmentation", "Position",
    "ReferenceDistribution", "RotationType", "SymbolStream", "WeightProfile", "analyze", "analyze_stream",
    "build_reference", "load_config", "parse_stream", "recognize", "render_html", "segment",
    "serialize_stream", "shipped_reference",
]
