"""Tally phase labels over the (s, t) simplex and write the full grid as CSV."""

import argparse
import csv
from collections import Counter

from bellrepeat.ensemble_stats import classify_phase, simplex_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--res", type=float, default=0.01)
    ap.add_argument("--out", default="phase.csv")
    args = ap.parse_args(argv)

    tally = Counter()
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "t", "H", "separable", "label"])
        for s, t in simplex_grid(args.res):
            ph = classify_phase(s, t)
            tally[ph.label.value, ph.separable] += 1
            w.writerow([s, t, ph.entropy, ph.separable, ph.label.value])
    for (label, sep), n in sorted(tally.items()):
        print(f"{label:20s} separable={sep!s:5s} {n}")


if __name__ == "__main__":
    main()
