"""Write the pmf tables behind Figures 1-4 as CSV (plus manifests) into a directory."""

import argparse
import sys

from tcpoisson.cli import main
from tcpoisson.verify import FIGURES


def figure_args(family, p, out_dir, plot):
    argv = ["pmf", "--family", family.value.lower(), "--lambda", repr(p.lam), "--alpha", repr(p.alpha),
            "--beta", repr(p.beta), "--lambda1", repr(p.lam1), "--a", repr(p.a), "--t", "1,2,3",
            "--out", f"{out_dir}/{family.value.lower()}.csv"]
    if plot:
        argv += ["--plot", f"{out_dir}/{family.value.lower()}.png"]
    return argv


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--plot", action="store_true", help="also save PNG line plots (needs matplotlib)")
    args = ap.parse_args()
    codes = [main(figure_args(fam, p, args.out_dir, args.plot)) for fam, p in FIGURES.items()]
    sys.exit(max(codes))
