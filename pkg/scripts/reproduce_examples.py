"""Recompute the worked examples from the bundled configs and print JSON."""

import json
import sys
from pathlib import Path

from logkummer.cli import run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

EXAMPLES = [
    ["--config", str(CONFIGS / "base_z.toml"), "monoid", "check"],
    ["--config", str(CONFIGS / "base_z.toml"), "torsor", "--element", "5", "--n", "2"],
    ["--config", str(CONFIGS / "qsqrt-5.toml"), "torsor", "--element", "2", "--n", "2"],
    ["--config", str(CONFIGS / "qsqrt-5.toml"), "torsor", "--element", "1+s*1-s", "--n", "2"],
    ["--config", str(CONFIGS / "qsqrt-5.toml"), "rac", "--n", "2", "--I", "p2"],
    ["--config", str(CONFIGS / "pairing_z2.toml"), "monodromy", "--x", "1", "--y", "1"],
]

if __name__ == "__main__":
    worst = 0
    for argv in EXAMPLES:
        code, outcome, err = run(argv)
        worst = max(worst, code)
        print(json.dumps(outcome.to_json() if outcome else {"error": err, "argv": argv}, indent=2))
    sys.exit(worst)
