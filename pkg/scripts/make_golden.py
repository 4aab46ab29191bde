"""Regenerate the determinism regression file used by the acceptance suite.

Only rerun this after an intentional change to the simulation dynamics.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from swarmest.engine import run  # noqa: E402
from test_acceptance import GOLDEN, GOLDEN_PARAMS  # noqa: E402

if __name__ == "__main__":
    GOLDEN.parent.mkdir(parents=True, exist_ok=True)
    GOLDEN.write_text(run(GOLDEN_PARAMS).to_json() + "\n")
    print(f"wrote {GOLDEN}")
