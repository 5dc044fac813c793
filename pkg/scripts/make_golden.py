"""Regenerate the golden fixture stream and its expected analyze outputs.

Only run this after a deliberate output change, then review the diff of
tests/golden/ by hand before committing.
"""

import sys
from pathlib import Path

from nsaqa.cli import main as cli_main
from nsaqa.corpus import write_pair
from nsaqa.synth import forward_twister_script, generate

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def main():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    stream, _ = generate(forward_twister_script(noise_sigma=1.5, pose_dropout=0.02, feet_apart_deg=6.0),
                         seed=7, clip_id="fixture")
    write_pair(GOLDEN, stream)
    code = cli_main(["analyze", str(GOLDEN / "fixture.jsonl"), "--out", str(GOLDEN / "fixture.html")])
    if code:
        sys.exit(code)
    print(f"golden files written to {GOLDEN}", file=sys.stderr)


if __name__ == "__main__":
    main()
