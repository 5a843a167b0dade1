"""Regenerate the committed golden CSVs from the configs under tests/configs.

Run from the repository root after an intentional change to the sampling
pipeline, then review the diff before committing:

    python3 scripts/regen_goldens.py
"""

from pathlib import Path

from finslerlab.cli import main

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "tests" / "configs"
GOLDENS = ROOT / "tests" / "goldens"


def run() -> None:
    GOLDENS.mkdir(exist_ok=True)
    for cfg in sorted(CONFIGS.glob("golden_*.json")):
        dst = GOLDENS / (cfg.stem + ".csv")
        code = main(["sample", str(cfg), "--out", str(dst)])
        if code != 0:
            raise SystemExit(f"sample failed for {cfg.name} (exit {code})")
        print(f"wrote {dst.relative_to(ROOT)}")


if __name__ == "__main__":
    run()
