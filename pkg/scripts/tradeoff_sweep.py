#!/usr/bin/env python3
"""Run the default trade-off sweep and write tradeoff.csv.

Equivalent to `pdcfilter sweep`; kept as a script so the sweep grid is easy
to edit in place for one-off experiments.
"""

import argparse
from pathlib import Path

from pdcfilter.cli import RunConfig, export_tradeoff, sweep_tradeoff


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out/sweep"))
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    config = RunConfig(threads=args.threads)
    records = sweep_tradeoff(config)
    for path in export_tradeoff(records, config, args.out):
        print(f"wrote {path}")
    for rec in records:
        print(
            f"gain_b={rec.gain_b:.4f} width={rec.filter_width:4.1f} "
            f"first={rec.first_mode_squeezing_db:7.4f} dB "
            f"smc={rec.single_mode_character:9.4f} purity={rec.purity:.6f}"
        )


if __name__ == "__main__":
    main()
