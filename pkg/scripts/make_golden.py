"""Regenerate the committed golden sweep snapshots.

Run from the repository root:

    python3 scripts/make_golden.py

Only do this when a sampling or accounting convention changes on purpose;
the snapshot test exists to catch accidental drift.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))

from test_harness import golden_config  # noqa: E402

from latdet.harness import emit, run_sweep  # noqa: E402


def main():
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "tests" / "golden"
    out_dir.mkdir(exist_ok=True)
    metrics = run_sweep(golden_config())
    emit(metrics, "csv", str(out_dir / "sweep.csv"))
    emit(metrics, "json", str(out_dir / "sweep.json"))
    print(f"wrote {out_dir / 'sweep.csv'}")
    print(f"wrote {out_dir / 'sweep.json'}")


if __name__ == "__main__":
    main()
