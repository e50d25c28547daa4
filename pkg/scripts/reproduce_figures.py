#!/usr/bin/env python3
"""Write the three kappa = 0.8 gamma sweeps as CSV files.

The files hold the plus-quadrature variance, the quadrature squeezing and
the EPR fluctuation sum from gamma = 0 up to threshold.

Usage:
    # Default: 101 points into ./figures
    uv run python scripts/reproduce_figures.py

    # Finer grid into another directory
    uv run python scripts/reproduce_figures.py --steps 401 --out-dir /tmp/cavityq

    # Show what would be written
    uv run python scripts/reproduce_figures.py --dry-run
"""

import argparse
import sys
from pathlib import Path

from cavityq.logging import configure_logging
from cavityq.models import Observable, SweepSpec
from cavityq.sweep import write_sweep

KAPPA = 0.8

# Output file and the observable it plots
FIGURES = [
    ("plus_variance.csv", Observable.PLUS_VAR),
    ("squeezing.csv", Observable.SQUEEZING),
    ("epr_sum.csv", Observable.EPR_SUM),
]


def figure_specs(steps: int, epsilon: float) -> list[tuple[str, SweepSpec]]:
    """Sweep specification for each figure file."""
    return [
        (
            filename,
            SweepSpec(
                kappa=KAPPA,
                epsilon=epsilon,
                gamma_max=KAPPA / 2.0,
                steps=steps,
                observables=(observable,),
            ),
        )
        for filename, observable in FIGURES
    ]


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Write the kappa = 0.8 plus-variance, squeezing and EPR sweeps"
    )
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path("figures"),
        help="Directory for the CSV files (default: ./figures)",
    )
    parser.add_argument(
        "--steps",
        type=int,
        default=101,
        help="Grid points per sweep (default: 101)",
    )
    parser.add_argument(
        "--epsilon",
        type=float,
        default=0.0,
        help="Coherent drive amplitude; the curves do not depend on it (default: 0)",
    )
    parser.add_argument(
        "--dry-run",
        action="store_true",
        help="Show what would be written without writing",
    )
    args = parser.parse_args()

    configure_logging("WARNING")
    specs = figure_specs(args.steps, args.epsilon)

    if args.dry_run:
        for filename, spec in specs:
            print(f"[DRY RUN] {args.out_dir / filename}: {spec.observables[0].value}")
        sys.exit(0)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for filename, spec in specs:
        path = args.out_dir / filename
        with path.open("w", encoding="utf-8", newline="") as stream:
            write_sweep(stream, spec)
        print(f"Wrote {path} ({spec.steps} points)")


if __name__ == "__main__":
    main()
