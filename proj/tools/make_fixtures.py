#!/usr/bin/env python3
"""Regenerate the bundled fixture datasets in data/fixtures."""

import argparse
import csv
from pathlib import Path

import numpy as np


def planted_noise(rng, n=400):
    # label = x1 AND x2 on 0/1 attributes, so every impure node has an exact
    # split on x1 or x2. noise is an independent uniform column.
    rows = []
    for _ in range(n):
        x1 = int(rng.uniform() < 0.5)
        x2 = int(rng.uniform() < 0.5)
        noise = rng.uniform()
        y = "pos" if (x1 and x2) else "neg"
        rows.append([str(x1), str(x2), f"{noise:.6f}", y])
    return ["x1", "x2", "noise", "y"], rows


def mixed_types(rng, n=300):
    colors = ["blue", "green", "red", "yellow"]
    rows = []
    for _ in range(n):
        age = int(rng.integers(18, 81))
        color = colors[int(rng.integers(0, 4))]
        smoker = "yes" if rng.uniform() < 0.4 else "no"
        member = "y" if rng.uniform() < 0.5 else "n"
        score = rng.normal(50.0, 10.0)
        z = 0.08 * (age - 50) + 1.6 * (smoker == "yes") + 1.2 * (color == "red") - 0.9
        y = "sick" if rng.uniform() < 1.0 / (1.0 + np.exp(-z)) else "well"
        rows.append([str(age), color, smoker, member, f"{score:.4f}", y])
    return ["age", "color", "smoker", "member", "score", "outcome"], rows


def wide_imbalanced(rng, n=600, f=16):
    x = rng.normal(size=(n, f))
    x[:, 3] = 0.7 * x[:, 0] + 0.3 * rng.normal(size=n)
    z = 1.1 * x[:, 0] - 0.8 * x[:, 1] + 0.5 * x[:, 2] - 1.9
    y = rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-z))
    header = [f"f{i:02d}" for i in range(f)] + ["target"]
    rows = [[f"{v:.6f}" for v in x[r]] + ["1" if y[r] else "0"] for r in range(n)]
    return header, rows


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "fixtures")
    ap.add_argument("--seed", type=int, default=20230401)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    write(args.out / "planted_noise.csv", *planted_noise(rng))
    write(args.out / "mixed_types.csv", *mixed_types(rng))
    write(args.out / "wide_imbalanced.csv", *wide_imbalanced(rng))


if __name__ == "__main__":
    main()
