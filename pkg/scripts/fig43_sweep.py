#!/usr/bin/env python3
"""Confidence vs efficiency for cascades of 1, 4, 16 and infinitely many detectors.

Writes the data behind the efficiency figure as CSV (default results/fig43.csv) and
prints where each curve crosses a target confidence.
"""
import argparse
from fractions import Fraction
from pathlib import Path

from photocascade import cli
from photocascade.errors import UnachievableTargetError
from photocascade.povm import required_efficiency


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/fig43.csv")
    parser.add_argument("--steps", type=int, default=101)
    parser.add_argument("--target", default="0.65")
    args = parser.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    code = cli.main(["sweep", "--steps", str(args.steps), "--output", args.out])
    if code:
        raise SystemExit(code)
    print(f"wrote {args.out}")

    target = Fraction(args.target)
    for N in (1, 4, 16, "inf"):
        try:
            eta = required_efficiency(N, 1, target)
            print(f"N={N:>3}: confidence {float(target)} needs eta^2 = {float(eta):.4f}")
        except UnachievableTargetError:
            print(f"N={N:>3}: confidence {float(target)} unreachable")


if __name__ == "__main__":
    main()
