"""Acceptance criteria, one PASS/FAIL line each (collected in the terminal summary)."""

import io
import itertools
import json
import math
from contextlib import redirect_stdout
from fractions import Fraction

import numpy as np
import pytest

from sboxlab import oracle
from sboxlab.boolfn import BinaryMatrix, apply_mix, moebius_transform, random_bijection, random_invertible_matrix, walsh_batch
from sboxlab.calibration import check_column
from sboxlab.cli import main
from sboxlab.fixtures import PAPER_TALLIES, fixture, readings
from sboxlab.metrics import cc_statistics, full_report
from sboxlab.search import SearchConfig, enumerate_all, genetic_search, random_sample

INVARIANT_FIELDS = ("nl", "degree", "ci", "du", "robustness", "abs_indicator", "sum_sq", "ai")


def gl_over_factorial(n: int) -> int:
    # independent of the package: product formula for |GL(n, 2)|
    return math.prod(2**n - 2**k for k in range(n)) // math.factorial(n)


@pytest.fixture(scope="module")
def enum4():
    return enumerate_all(fixture("paper-4x4-initial"), SearchConfig(ordering_policy="descending", report_accepted=False))


@pytest.fixture(scope="module")
def enum5():
    return enumerate_all(fixture("paper-5x5-initial"), SearchConfig(ordering_policy="descending", report_accepted=False))


def test_c01_golden_4x4(criterion):
    bad = []
    for name, snr, to in (("paper-4x4-initial", 1.612, 3.533), ("paper-4x4-proposed", 1.663, 3.466)):
        r = full_report(fixture(name))
        ints = (r.nl, r.degree, r.ci, r.du, r.abs_indicator, r.sum_sq, r.ai, r.fp, r.ofp)
        if ints != (4, 3, 0, 4, 8, 640, 2, 0, 0) or r.robustness != Fraction(3, 4):
            bad.append(f"{name} integers {ints} eps {r.robustness}")
        if abs(r.snr - snr) > 1e-3 or abs(r.to - to) > 1e-3:
            bad.append(f"{name} snr {r.snr:.4f} to {r.to:.4f}")
    criterion("C1 golden 4x4 columns (Table 7/8 vs Table 2)", not bad, "; ".join(bad))


def test_c02_golden_5_to_7(criterion):
    failures, discrepancies = [], []
    tables = {3: ("paper-5x5-initial", "paper-5x5-proposed"), 4: ("paper-6x6-initial", "paper-6x6-proposed"),
              5: ("paper-7x7-initial", "paper-7x7-proposed")}
    for table, names in tables.items():
        real_bad = 0
        for name in names:
            for row in check_column(name):
                if row.ok:
                    continue
                alternatives = [full_report(S) for S in readings(name).values()]
                reachable = any(getattr(rep, row.field) == row.want for rep in alternatives)
                if row.field in ("snr", "to"):
                    real_bad += 1
                    discrepancies.append(f"{name}.{row.field} {row.got:.4f} vs {row.want}")
                elif reachable:
                    failures.append(f"{name}.{row.field} {row.got} vs {row.want} (another reading matches)")
                else:
                    discrepancies.append(f"{name}.{row.field} {row.got} vs {row.want} (no reading matches)")
        if real_bad > 2:
            failures.append(f"Table {table}: {real_bad} real-valued rows off")
    detail = "; ".join(failures) or ("published-table discrepancies: " + "; ".join(discrepancies) if discrepancies else "")
    criterion("C2 golden 5x5/6x6/7x7 columns (Tables 9-14 vs Tables 3-5)", not failures, detail)


def test_c03_golden_8x8(criterion):
    S = fixture("paper-8x8-proposed")
    r = full_report(S)
    checks = {
        "bijective": S.is_permutation(),
        "FP=0": r.fp == 0,
        "OFP=0": r.ofp == 0,
        "NL=112": r.nl == 112,
        "du=4": r.du == 4,
        "sigma=133120": r.sum_sq == 133120,
        "AI=4": r.ai == 4,
        "SNR 8.758": abs(r.snr - 8.758) <= 1e-3,
        "TO 7.85": abs(r.to - 7.85) <= 1e-2,
    }
    aes = full_report(fixture("aes"))
    aes_ok = abs(aes.snr - 9.599) <= 0.01 and abs(aes.to - 7.86) <= 0.01
    failed = [k for k, ok in checks.items() if not ok]
    detail = f"failed: {failed} (FP={r.fp}, OFP={r.ofp})" if failed else ""
    detail += f"; AES presumption {'holds' if aes_ok else 'NOT the initial box'} (SNR {aes.snr:.3f}, TO {aes.to:.3f})"
    criterion("C3 golden 8x8 (Table 15 vs Table 6)", not failed, detail)


def test_c04_table1_4x4(criterion, enum4):
    t = enum4.tally
    want = PAPER_TALLIES[4]
    oc = enum4.ordering_counts
    log = (f"to_better {t.to_better} (not-worse {t.to_not_worse}); FP/OFF published {want['fp_zero']}/{want['ofp_zero']}, "
           + ", ".join(f"{p}: {c['fp_zero']}/{c['ofp_zero']}" for p, c in oc.items()))
    ok = t.total == 1820 and t.bijective == 840 and t.to_better == 355
    criterion("C4 Table 1 exhaustive 4x4 (total 1820, bij 840, to_better 355)", ok, log)


def test_c05_table1_5x5(criterion, enum5):
    t = enum5.tally
    ok = t.total == 201376 and t.bijective == 83328
    detail = f"total {t.total}, bij {t.bijective} (printed {PAPER_TALLIES[5]['bijective']} flagged), to_better {t.to_better}"
    criterion("C5 Table 1 exhaustive 5x5 (total 201376, bij 83328)", ok, detail)


def test_c06_group_count(criterion, enum5):
    got = {}
    for n in (3, 4):
        S = random_bijection(n, np.random.default_rng(n))
        got[n] = enumerate_all(S, SearchConfig(report_accepted=False)).tally.bijective
    got[5] = enum5.tally.bijective
    want = {n: gl_over_factorial(n) for n in got}
    criterion("C6 bijective counts = |GL(n,2)|/n! at n=3,4,5", got == want == {3: 28, 4: 840, 5: 83328}, f"{got}")


def test_c07_mix_invariance(criterion):
    bad = []
    for n in (4, 5, 6):
        rng = np.random.default_rng(700 + n)
        for k in range(200):
            S = random_bijection(n, rng)
            a = full_report(S)
            b = full_report(apply_mix(S, random_invertible_matrix(n, rng)))
            bad += [f"n={n} #{k} {f}" for f in INVARIANT_FIELDS if getattr(a, f) != getattr(b, f)]
            P = BinaryMatrix(tuple(1 << int(i) for i in rng.permutation(n)), n)
            c = full_report(apply_mix(S, P))
            for f in ("snr", "to", "cc"):
                if abs(getattr(a, f) - getattr(c, f)) > 1e-9 * max(1.0, abs(getattr(a, f))):
                    bad.append(f"n={n} #{k} perm {f}")
    criterion("C7 mix invariance (200 matrices per n=4,5,6)", not bad, "; ".join(bad[:5]))


@pytest.mark.slow
def test_c08_oracle_equivalence(criterion):
    bad = []
    for n in (3, 4, 5):
        bad += oracle.metric_sweep(n, 100, seed=800 + n)
    most = tuple(t for t in oracle.METRIC_TAGS if t not in ("cc", "to"))
    bad += oracle.metric_sweep(6, 100, seed=806, tags=most)
    bad += oracle.metric_sweep(6, 25, seed=816, tags=("to",))
    criterion("C8 oracle equivalence (100 boxes n=3,4,5; n=6 sans kappa, TO on 25)", not bad, f"{bad[:5]}")


def test_c09_transforms(criterion):
    rng = np.random.default_rng(900)
    bad = []
    for n in range(1, 9):
        bits = rng.integers(0, 2, size=(1000, 1 << n))
        W = walsh_batch(bits)
        if not np.all((W * W).sum(axis=1) == 1 << (2 * n)):
            bad.append(f"Parseval n={n}")
    for n in range(1, 5):
        for table in itertools.product((0, 1), repeat=1 << n):
            if not np.array_equal(moebius_transform(moebius_transform(table)), table):
                bad.append(f"Moebius n={n} {table}")
                break
    for bits in rng.integers(0, 2, size=(1000, 256)):
        if not np.array_equal(moebius_transform(moebius_transform(bits)), bits):
            bad.append("Moebius n=8")
            break
    criterion("C9 Parseval (n<=8) and Moebius involution", not bad, "; ".join(bad))


def test_c10_search_determinism(criterion, enum4):
    S = fixture("paper-4x4-initial")
    known = {c.masks for c, _, _ in enumerate_all(S, SearchConfig(ordering_policy="descending", report_accepted=False)).accepted}
    docs = []
    for workers in (1, 1, 4):
        cfg = SearchConfig(mode="genetic", seed=2024, generations=50, ordering_policy="descending",
                           workers=workers, report_accepted=False)
        docs.append(json.dumps(genetic_search(S, cfg).summary(), sort_keys=True))
    found = {tuple(m) for m in json.loads(docs[0])["accepted"]}
    ok = len(set(docs)) == 1 and bool(found & known) and len(known) == enum4.tally.all_better == 70
    criterion("C10 GA byte-identical across reruns and workers 1/4; recovers a known 4x4 box", ok,
              f"{len(found & known)} of 70 recovered")


def test_c11_calibration(criterion):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["verify", "--scope", "calibration"])
    out = buf.getvalue()
    decisions = [line for line in out.splitlines() if line.startswith("decision")]
    snr = [d for d in decisions if "SNR variant" in d]
    kappa = [d for d in decisions if "kappa model" in d]
    t9 = [d for d in decisions if "Table 9: value" in d]
    t11 = [d for d in decisions if "Table 11:" in d]
    cc = cc_statistics(fixture("paper-4x4-initial"))["var"]
    ok = code == 0 and all(len(x) == 1 for x in (snr, kappa, t9, t11)) and abs(cc - 1.357) <= 1e-3
    criterion("C11 calibration decisions resolved; kappa reproduces 1.357", ok, " | ".join(snr + kappa + t9 + t11))


@pytest.mark.slow
def test_c12_sampling_replacement(criterion):
    S = fixture("paper-6x6-initial")
    small = random_sample(S, SearchConfig(mode="random-sample", seed=61, max_candidates=25_000, report_accepted=False)).tally
    big = random_sample(S, SearchConfig(mode="random-sample", seed=62, max_candidates=100_000, report_accepted=False)).tally
    # probability that 6 random masks are independent, with mask 0 allowed
    p = gl_over_factorial(6) / math.comb(64, 6)
    rates = (small.bijective / small.total, big.bijective / big.total)
    ok = big.all_better > 0 and all(abs(r - p) < 0.01 for r in rates) and abs(big.to_better / big.total - small.to_better / small.total) < 0.01
    criterion("C12 n=6 sampling: tallies scale with budget, accepted boxes within 1e5 draws", ok,
              f"bij rates {rates[0]:.4f}/{rates[1]:.4f} vs {p:.4f}, accepted {big.all_better}")
