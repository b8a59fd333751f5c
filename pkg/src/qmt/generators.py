"""Reproducible example and random theories.

Random quantum theories are sums of rank-one terms ``v v^dagger`` built
from small Gaussian-integer amplitudes, so the decoherence matrix is
positive semidefinite and exact zeros (null events) show up often enough to
exercise preclusion.
"""

from __future__ import annotations

import random
import string
from fractions import Fraction

from .measure import HistoriesTheory, from_amplitudes, new_theory


def labels_for(n: int) -> list[str]:
    return list(string.ascii_lowercase[:n]) if n <= 26 else [f"h{i}" for i in range(n)]


def coin() -> HistoriesTheory:
    q = Fraction(1, 4)
    re = [[q if a == b else 0 for b in range(4)] for a in range(4)]
    return new_theory(["hh", "ht", "th", "tt"], re)


def three_path() -> HistoriesTheory:
    return from_amplitudes(["a", "b", "c"], [1, 1, -1])


def single() -> HistoriesTheory:
    return new_theory(["a"], [[1]])


def _small_vector(rng: random.Random, n: int, complex_prob: float):
    re = [rng.choice((-2, -1, -1, 0, 0, 1, 1, 2)) for _ in range(n)]
    if rng.random() < complex_prob:
        im = [rng.choice((-1, 0, 0, 1)) for _ in range(n)]
    else:
        im = [0] * n
    return re, im


def random_amplitudes(seed: int, n: int) -> tuple[list[Fraction], list[Fraction]]:
    """Rational amplitudes summing to exactly 1, so the rank-one theory is normalised."""
    rng = random.Random(seed)
    while True:
        re, im = _small_vector(rng, n, 0.3)
        sr, si = sum(re), sum(im)
        norm = sr * sr + si * si
        if norm:
            break
    # divide every amplitude by the complex number (sr + i si)
    vr = [Fraction(x * sr + y * si, norm) for x, y in zip(re, im)]
    vi = [Fraction(y * sr - x * si, norm) for x, y in zip(re, im)]
    return vr, vi


def random_matrix(seed: int, n: int, rank: int | None = None):
    """Hermitian PSD matrix with rational entries and unit total sum."""
    rng = random.Random(seed)
    rank = rank or rng.choice((1, 1, 2))
    while True:
        re = [[Fraction(0)] * n for _ in range(n)]
        im = [[Fraction(0)] * n for _ in range(n)]
        total = Fraction(0)
        for _ in range(rank):
            vr, vi = _small_vector(rng, n, 0.3)
            w = rng.choice((1, 1, 2, 3))
            for a in range(n):
                for b in range(n):
                    re[a][b] += w * (vr[a] * vr[b] + vi[a] * vi[b])
                    im[a][b] += w * (vi[a] * vr[b] - vr[a] * vi[b])
            total += w * (sum(vr) ** 2 + sum(vi) ** 2)
        if total:
            break
    re = [[x / total for x in row] for row in re]
    im = [[x / total for x in row] for row in im]
    return re, im


def random_theory(seed: int, n: int, rank: int | None = None) -> HistoriesTheory:
    re, im = random_matrix(seed, n, rank)
    return new_theory(labels_for(n), re, im)


def random_probability_theory(seed: int, n: int) -> HistoriesTheory:
    """Diagonal decoherence matrix: a classical probability measure, zeros allowed."""
    rng = random.Random(seed)
    while True:
        w = [rng.choice((0, 0, 1, 2, 3, 5)) for _ in range(n)]
        if sum(w):
            break
    total = sum(w)
    re = [[Fraction(w[a], total) if a == b else 0 for b in range(n)] for a in range(n)]
    return new_theory(labels_for(n), re)


def suite(count: int, seed: int = 0, max_n: int = 5, min_n: int = 1) -> list[HistoriesTheory]:
    """``count`` seeded random quantum theories with ``min_n <= n <= max_n``."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        n = rng.randint(min_n, max_n)
        out.append(random_theory(seed * 100003 + k, n))
    return out
