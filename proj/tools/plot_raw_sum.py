#!/usr/bin/env python3
"""Render sweep curves from a hta-sim CSV as an ASCII chart.

Default: the mean raw fraction sum of the bounded-rationality solver versus
network size, one series per randomization multiplier (the saturation curves).

    ./build/tools/hta-sim --scenario scenarios/reference.scn --out sweep.csv
    tools/plot_raw_sum.py sweep.csv
    tools/plot_raw_sum.py sweep.csv --column qos_pct --solver equal
"""

import argparse
import csv
import sys

MARKS = "ox+*#@"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("--column", default="raw_che_sum")
    ap.add_argument("--solver", default="che")
    ap.add_argument("--stat", default="mean")
    ap.add_argument("--height", type=int, default=18)
    ap.add_argument("--dat", help="also write a gnuplot-style data file")
    args = ap.parse_args()

    series = {}  # mu -> [(size, value)]
    with open(args.csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["solver"] != args.solver or row["sample_stat"] != args.stat:
                continue
            if not row[args.column]:
                continue
            mu = float(row["mu_multiplier"])
            series.setdefault(mu, []).append((int(row["size"]), float(row[args.column])))
    if not series:
        sys.exit(f"no rows for solver={args.solver} stat={args.stat} column={args.column}")
    for pts in series.values():
        pts.sort()

    if args.dat:
        with open(args.dat, "w") as out:
            out.write(f"# size {args.column} (per mu multiplier)\n")
            for mu, pts in sorted(series.items()):
                out.write(f'"mu={mu:g}"\n')
                for size, v in pts:
                    out.write(f"{size} {v:.10g}\n")
                out.write("\n\n")

    values = [v for pts in series.values() for _, v in pts]
    sizes = sorted({s for pts in series.values() for s, _ in pts})
    lo, hi = min(values), max(values)
    if args.column == "raw_che_sum":
        lo, hi = min(lo, 0.95), max(hi, 1.05)  # keep the saturation line visible
    span = (hi - lo) or 1.0

    width = len(sizes)
    grid = [[" "] * width for _ in range(args.height)]
    the_one = None
    if lo <= 1.0 <= hi and args.column == "raw_che_sum":
        the_one = int(round((args.height - 1) * (1.0 - lo) / span))
        for x in range(width):
            grid[the_one][x] = "-"
    for idx, (mu, pts) in enumerate(sorted(series.items())):
        mark = MARKS[idx % len(MARKS)]
        for size, v in pts:
            x = sizes.index(size)
            y = int(round((args.height - 1) * (v - lo) / span))
            grid[y][x] = mark
    print(f"{args.column} ({args.solver}, {args.stat})")
    for y in range(args.height - 1, -1, -1):
        label = lo + span * y / (args.height - 1)
        print(f"{label:10.4g} |" + " ".join(grid[y]))
    print(" " * 11 + "+" + "-" * (2 * width - 1))
    print(" " * 12 + " ".join(str(s // 1000) for s in sizes) + "   (size, thousands)")
    for idx, mu in enumerate(sorted(series)):
        print(f"  {MARKS[idx % len(MARKS)]} mu multiplier {mu:g}")


if __name__ == "__main__":
    main()
