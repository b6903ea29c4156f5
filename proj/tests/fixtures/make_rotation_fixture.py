#!/usr/bin/env python3
"""Regenerates the rotation fixture: 500 source vectors in 10 dimensions and
targets t_i = s_i Q for a random orthogonal Q. The source cloud is a mixture
of clusters with unequal sizes and spreads at well-separated directions, so
the point distribution has no nontrivial isometry: matching mapped sources to
targets determines Q uniquely, which is what the unsupervised initializer
needs. An isotropic cloud would look identical under every orthogonal map and
carry no alignment signal at all. The checked-in .vec/.tsv files are the
fixture of record; rerun only if the file format itself changes."""

import math
import random

N, D = 500, 10
SIZES = [77, 71, 65, 59, 53, 47, 41, 35, 29, 23]  # sums to 500
assert sum(SIZES) == N
rng = random.Random(20240817)


def gauss_vec(d):
    return [rng.gauss(0.0, 1.0) for _ in range(d)]


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def orthogonal(d):
    # Gram-Schmidt on gaussian draws; redraw on near-degeneracy.
    basis = []
    while len(basis) < d:
        v = gauss_vec(d)
        for b in basis:
            proj = sum(x * y for x, y in zip(v, b))
            v = [x - proj * y for x, y in zip(v, b)]
        norm = math.sqrt(sum(x * x for x in v))
        if norm > 1e-6:
            basis.append([x / norm for x in v])
    return basis  # rows are orthonormal


def separated_centers(k, min_gap_cos=0.55):
    while True:
        centers = [unit(gauss_vec(D)) for _ in range(k)]
        worst = max(
            abs(sum(a * b for a, b in zip(centers[i], centers[j])))
            for i in range(k)
            for j in range(i + 1, k)
        )
        if worst < min_gap_cos:
            return centers


def write_vec(path, prefix, rows):
    with open(path, "w") as f:
        f.write(f"{len(rows)} {D}\n")
        for i, row in enumerate(rows):
            f.write(f"{prefix}{i:03d} " + " ".join(f"{x:.12g}" for x in row) + "\n")


centers = separated_centers(len(SIZES))
src = []
for j, size in enumerate(SIZES):
    spread = 0.15 + 0.015 * j
    for _ in range(size):
        src.append(unit([c + spread * g for c, g in zip(centers[j], gauss_vec(D))]))

q = orthogonal(D)
tgt = [[sum(s[k] * q[k][j] for k in range(D)) for j in range(D)] for s in src]

write_vec("rot_src.vec", "s", src)
write_vec("rot_tgt.vec", "t", tgt)
with open("rot_gold.tsv", "w") as f:
    for i in range(N):
        f.write(f"s{i:03d}\tt{i:03d}\n")
print("wrote rot_src.vec rot_tgt.vec rot_gold.tsv")
