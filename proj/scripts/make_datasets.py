#!/usr/bin/env python3
"""Regenerates the bundled CSVs under data/.

iris and wine are the classic UCI tables, copied from scikit-learn's
bundled data. banknote and tae are synthetic stand-ins with the same
shape, class balance, and rough difficulty as their UCI namesakes
(this environment cannot download the originals): banknote is a
near-separable 2-class problem (1372x4, 762/610), tae a weak-signal
3-class problem (151x5, 49/50/52).
"""

import os

import numpy as np
from sklearn import datasets

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(os.path.dirname(HERE), "data")


def write_csv(path, X, labels):
    with open(path, "w") as fh:
        for row, label in zip(X, labels):
            cells = [repr(float(v)) if isinstance(v, float) or v != int(v) else str(int(v)) for v in row]
            fh.write(",".join(cells) + "," + label + "\n")


def main():
    os.makedirs(OUT, exist_ok=True)

    iris = datasets.load_iris()
    write_csv(
        os.path.join(OUT, "iris.csv"),
        iris.data,
        [iris.target_names[t] for t in iris.target],
    )

    wine = datasets.load_wine()
    write_csv(
        os.path.join(OUT, "wine.csv"),
        wine.data,
        [wine.target_names[t] for t in wine.target],
    )

    rng = np.random.default_rng(20240817)

    # banknote stand-in: two mildly correlated 4-d Gaussians, well separated
    # in two of the four coordinates. 762 genuine / 610 forged.
    n0, n1 = 762, 610
    mean0 = np.array([3.6, 6.6, 0.5, -1.0])
    mean1 = np.array([-3.3, -3.6, 5.4, -1.5])
    cov0 = np.array(
        [
            [2.6, 1.0, -0.7, 0.3],
            [1.0, 8.2, -1.7, -1.3],
            [-0.7, -1.7, 3.3, 0.6],
            [0.3, -1.3, 0.6, 3.5],
        ]
    )
    cov1 = np.array(
        [
            [2.4, 0.7, -1.1, 0.4],
            [0.7, 9.8, -2.4, -1.6],
            [-1.1, -2.4, 5.6, 0.8],
            [0.4, -1.6, 0.8, 3.9],
        ]
    )
    x0 = rng.multivariate_normal(mean0, cov0, size=n0)
    x1 = rng.multivariate_normal(mean1, cov1, size=n1)
    X = np.vstack([x0, x1]).round(6)
    y = ["genuine"] * n0 + ["forged"] * n1
    order = rng.permutation(len(y))
    write_csv(os.path.join(OUT, "banknote.csv"), X[order], [y[i] for i in order])

    # tae stand-in: categorical-looking integer features with a weak class
    # signal; most of the variance is noise, as in the original.
    counts = {"low": 49, "medium": 50, "high": 52}
    rows, labels = [], []
    for ci, (label, count) in enumerate(counts.items()):
        for _ in range(count):
            native = rng.integers(1, 3)
            instructor = int(np.clip(rng.normal(8 + 4 * ci, 6), 1, 25))
            course = rng.integers(1, 27)
            semester = rng.integers(1, 3)
            size = int(np.clip(rng.normal(24 + 6 * ci + 4 * (native - 1), 12), 3, 66))
            rows.append([native, instructor, course, semester, size])
            labels.append(label)
    order = rng.permutation(len(labels))
    X = np.array(rows, dtype=float)
    write_csv(os.path.join(OUT, "tae.csv"), X[order], [labels[i] for i in order])

    for name in ("iris", "wine", "banknote", "tae"):
        data = np.loadtxt(
            os.path.join(OUT, name + ".csv"), delimiter=",", usecols=0
        )
        print(name, "rows:", len(data))


if __name__ == "__main__":
    main()
