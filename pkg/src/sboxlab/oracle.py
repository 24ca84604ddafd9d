"""Slow reference implementations.

Everything here is a direct sum over the defining quantifiers: no butterflies,
no Wiener-Khinchin, no bincount tricks. Loops over x are vectorised with numpy
where that keeps the code readable, which does not change the arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from . import metrics
from .boolfn import (
    InvalidInput,
    SBoxTable,
    TruthTable,
    anf,
    autocorrelation,
    ddt,
    random_bijection,
    walsh_transform,
)

METRIC_TAGS = (
    "balanced",
    "nl",
    "degree",
    "ci",
    "du",
    "robustness",
    "abs_indicator",
    "sum_sq",
    "ai",
    "fp",
    "ofp",
    "snr",
    "to",
    "cc",
)


def _dot(a, b) -> np.ndarray:
    """GF(2) inner product, bit by bit."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    x = a & b
    out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    while np.any(x):
        out ^= x & 1
        x = x >> 1
    return out


def _hw(v: int) -> int:
    return bin(int(v)).count("1")


def naive_walsh(f: TruthTable, w: int) -> int:
    """``sum_x (-1)^(f(x) + w.x)`` evaluated term by term."""
    x = np.arange(1 << f.n)
    return int(np.sum(1 - 2 * (f.bits.astype(np.int64) ^ _dot(w, x))))


def _component_bits(S: SBoxTable, v: int) -> np.ndarray:
    return _dot(v, S.entries)


def _walsh(bits: np.ndarray, w: int) -> int:
    x = np.arange(bits.size)
    return int(np.sum(1 - 2 * (bits ^ _dot(w, x))))


def _autocorr(bits: np.ndarray, a: int) -> int:
    x = np.arange(bits.size)
    return int(np.sum(1 - 2 * (bits ^ bits[x ^ a])))


def naive_anf(bits) -> np.ndarray:
    """ANF coefficient at u is the XOR of f over all x covered by u."""
    bits = np.asarray(bits, dtype=np.int64)
    x = np.arange(bits.size)
    return np.array([int(np.bitwise_xor.reduce(bits[(x & u) == x])) for u in x], dtype=np.uint8)


def _gf2_rank(rows: list[list[int]]) -> int:
    """Textbook Gaussian elimination on lists of 0/1."""
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                rows[i] = [p ^ q for p, q in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _annihilated(points: list[int], n: int, d: int) -> bool:
    mons = [u for u in range(1 << n) if _hw(u) <= d]
    if len(points) < len(mons):
        return True
    rows = [[int(x & u == u) for u in mons] for x in points]
    return _gf2_rank(rows) < len(mons)


def _boolean_ai(bits: np.ndarray, n: int) -> int:
    ones = [int(x) for x in np.flatnonzero(bits)]
    zeros = [int(x) for x in np.flatnonzero(bits == 0)]
    for d in range((n + 1) // 2):
        if _annihilated(ones, n, d) or _annihilated(zeros, n, d):
            return d
    return (n + 1) // 2


def _ddt(S: SBoxTable) -> list[list[int]]:
    N = 1 << S.n
    counts = [[0] * (1 << S.m) for _ in range(N)]
    for a in range(N):
        for x in range(N):
            counts[a][int(S.entries[x] ^ S.entries[x ^ a])] += 1
    return counts


def naive_metric(S: SBoxTable, which: str, cc_statistic: str = "var"):
    """Metric ``which`` (a ``MetricsReport`` field name) by direct evaluation."""
    if which not in METRIC_TAGS:
        raise InvalidInput(f"unknown metric tag {which!r}")
    n, m = S.n, S.m
    N = 1 << n
    comps = [_component_bits(S, v) for v in range(1 << m)]

    if which == "balanced":
        return all(int(comps[v].sum()) * 2 == N for v in range(1, 1 << m))
    if which == "nl":
        return min(min((N - abs(_walsh(comps[v], w))) // 2 for w in range(N)) for v in range(1, 1 << m))
    if which == "degree":
        best = 0
        for i in range(m):
            coef = naive_anf(_component_bits(S, 1 << i))
            best = max([best] + [_hw(u) for u in range(N) if coef[u]])
        return best
    if which == "ci":
        t = 0
        for order in range(1, n + 1):
            masks = [w for w in range(N) if _hw(w) == order]
            if any(_walsh(comps[v], w) for v in range(1, 1 << m) for w in masks):
                return t
            t = order
        return t
    if which in ("du", "robustness"):
        counts = _ddt(S)
        L = max((max(row) for row in counts[1:]), default=0)
        if which == "du":
            return L
        R = sum(1 for row in counts[1:] if row[0])
        return (1 - Fraction(R, N)) * (1 - Fraction(L, N))
    if which == "abs_indicator":
        return max(abs(_autocorr(comps[v], a)) for v in range(1, 1 << m) for a in range(1, N))
    if which == "sum_sq":
        return max(sum(_autocorr(comps[v], a) ** 2 for a in range(N)) for v in range(1, 1 << m))
    if which == "ai":
        return min(_boolean_ai(comps[v], n) for v in range(1, 1 << m))
    x = np.arange(N)
    if which == "fp":
        return int(sum(int(S.entries[i]) == i for i in range(N)))
    if which == "ofp":
        return int(sum(int(S.entries[i]) == i ^ (N - 1) for i in range(N)))
    coords = [_component_bits(S, 1 << i) for i in range(m)]
    if which == "snr":
        total = [sum(_walsh(c, k) for c in coords) for k in range(N)]
        return m * N * N / float(np.sqrt(sum(t**4 for t in total)))
    if which == "to":
        best = -np.inf
        for beta in range(1 << m):
            acc = 0
            for a in range(1, N):
                # zero-mask Walsh value of each coordinate of the derivative
                acc += abs(sum((-1) ** ((beta >> i) & 1) * int(np.sum(1 - 2 * (coords[i] ^ coords[i][x ^ a]))) for i in range(m)))
            best = max(best, abs(m - 2 * _hw(beta)) - acc / float(N * N - N))
        return float(best)
    # cc: squared weight gap of every pair of distinct keys
    h = np.array([_hw(v) for v in S.entries], dtype=np.float64)
    values = [float(np.mean((h[x ^ ki] - h[x ^ kj]) ** 2)) for ki, kj in combinations(range(N), 2)]
    stats = {"min": min(values), "mean": float(np.mean(values)), "max": max(values), "var": float(np.var(values))}
    if cc_statistic not in stats:
        raise InvalidInput(f"unknown confusion statistic {cc_statistic!r}")
    return stats[cc_statistic]


def brute_bijectivity(S: SBoxTable) -> bool:
    """True iff the entries are exactly 0 .. 2^n - 1 in some order."""
    return S.n == S.m and sorted(int(v) for v in S.entries) == list(range(1 << S.n))


# equivalence sweeps

def naive_autocorrelation(f: TruthTable, a: int) -> int:
    return _autocorr(f.bits.astype(np.int64), a)


def naive_ddt(S: SBoxTable) -> np.ndarray:
    return np.array(_ddt(S), dtype=np.int64)


def fast_metric(S: SBoxTable, which: str, cc_statistic: str = "var"):
    """Fast-path counterpart of :func:`naive_metric`."""
    if which not in METRIC_TAGS:
        raise InvalidInput(f"unknown metric tag {which!r}")
    funcs = {
        "balanced": metrics.is_balanced,
        "nl": metrics.nonlinearity,
        "degree": metrics.algebraic_degree,
        "ci": metrics.correlation_immunity,
        "du": metrics.differential_uniformity,
        "robustness": metrics.robustness,
        "abs_indicator": metrics.absolute_indicator,
        "sum_sq": metrics.sum_of_squares,
        "ai": metrics.algebraic_immunity,
        "fp": metrics.fixed_points,
        "ofp": metrics.opposite_fixed_points,
        "snr": metrics.snr_dpa,
        "to": metrics.transparency_order,
    }
    if which == "cc":
        return metrics.cc_statistics(S)[cc_statistic]
    return funcs[which](S)


def agrees(fast, slow, rel: float = 1e-9) -> bool:
    if isinstance(slow, float) or isinstance(fast, float):
        return abs(float(fast) - float(slow)) <= rel * max(1.0, abs(float(slow)))
    return fast == slow


def metric_sweep(n: int, count: int, seed: int, tags=METRIC_TAGS) -> list[tuple[int, str, object, object]]:
    """Compare fast and naive metrics on ``count`` seeded random bijections.

    Returns the mismatches as ``(case, tag, fast, naive)``; empty means success.
    """
    rng = np.random.default_rng(seed)
    bad = []
    for case in range(count):
        S = random_bijection(n, rng)
        for tag in tags:
            fast, slow = fast_metric(S, tag), naive_metric(S, tag)
            if not agrees(fast, slow):
                bad.append((case, tag, fast, slow))
    return bad


def transform_sweep(n: int, count: int, seed: int) -> list[tuple[str, int]]:
    """Walsh, autocorrelation and ANF of random functions against the naive sums."""
    rng = np.random.default_rng(seed)
    bad = []
    for case in range(count):
        f = TruthTable.from_bits(rng.integers(0, 2, 1 << n))
        w = int(rng.integers(0, 1 << n))
        if int(walsh_transform(f)[w]) != naive_walsh(f, w):
            bad.append(("walsh", case))
        if int(autocorrelation(f)[w]) != naive_autocorrelation(f, w):
            bad.append(("autocorrelation", case))
        if case % 10 == 0 and not np.array_equal(anf(f), naive_anf(f.bits)):
            bad.append(("anf", case))
    return bad


def ddt_sweep(n: int, count: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    bad = []
    for case in range(count):
        S = random_bijection(n, rng)
        if not np.array_equal(ddt(S).counts, naive_ddt(S)):
            bad.append(case)
    return bad
