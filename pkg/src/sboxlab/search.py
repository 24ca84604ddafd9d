"""Search over output-side linear mixes of an initial S-box.

A candidate is an ordered choice of n component masks; coordinate ``i`` of the
candidate box is the component ``masks[i] . S``. Everything except FP/OFP
depends only on the set of masks, so candidates are evaluated in batches from
per-component spectra precomputed once in :class:`ComponentSet`.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property

import numpy as np

from .boolfn import (
    InvalidInput,
    SBoxTable,
    all_components,
    autocorrelation_from_walsh,
    gf2_rank_rows,
    walsh_batch,
)
from .metrics import (
    DEFAULT_CC_MODEL,
    DEFAULT_CC_STATISTIC,
    MetricsReport,
    cc_profile_from_weights,
    cc_stats_from_profile,
    full_report,
    snr_from_total,
    to_from_coord_ac,
)

log = logging.getLogger(__name__)

MODES = ("exhaustive", "random-sample", "genetic")
ORDERINGS = ("canonical", "descending", "best-of-orderings")
THRESHOLDS = ("to", "snr", "cc")
MAX_EXHAUSTIVE_N = 5
_REL_TOL = 1e-12


class UnsupportedSize(InvalidInput):
    """Exhaustive enumeration requested beyond desk scale."""


class PreconditionError(InvalidInput):
    """The initial S-box does not satisfy a search precondition."""


@dataclass(frozen=True)
class MaskCandidate:
    masks: tuple[int, ...]

    def __post_init__(self):
        masks = tuple(int(m) for m in self.masks)
        if len(set(masks)) != len(masks):
            raise InvalidInput(f"masks must be distinct: {masks}")
        object.__setattr__(self, "masks", masks)

    @property
    def n(self) -> int:
        return len(self.masks)

    def canonical(self) -> MaskCandidate:
        return MaskCandidate(tuple(sorted(self.masks)))


@dataclass(frozen=True, eq=False)
class ComponentSet:
    """All 2^n components of an initial S-box, ``functions[a] = a . S``."""

    source: SBoxTable
    functions: np.ndarray

    @property
    def n(self) -> int:
        return self.source.n

    @cached_property
    def walsh(self) -> np.ndarray:
        return walsh_batch(self.functions)

    @cached_property
    def autocorr(self) -> np.ndarray:
        return autocorrelation_from_walsh(self.walsh)


def build_component_set(S: SBoxTable) -> ComponentSet:
    if not S.is_permutation():
        raise PreconditionError("initial S-box must be a bijective n x n box")
    funcs = all_components(S)
    funcs.setflags(write=False)
    return ComponentSet(S, funcs)


def _check_masks(masks, n: int):
    masks = np.asarray(masks)
    if masks.size and (masks.min() < 0 or masks.max() >= 1 << n):
        raise InvalidInput(f"mask out of range for n={n}")


def assemble(candidate: MaskCandidate, g: ComponentSet) -> SBoxTable:
    if candidate.n != g.n:
        raise InvalidInput(f"candidate has {candidate.n} masks, component set has n={g.n}")
    _check_masks(candidate.masks, g.n)
    return SBoxTable(g.n, g.n, _assemble_values(np.asarray([candidate.masks]), g)[0])


def is_bijective(candidate: MaskCandidate) -> bool:
    """Rank test on the mask matrix; equivalent to bijectivity of the assembled
    box when the initial box is bijective."""
    return gf2_rank_rows(candidate.masks) == candidate.n


# batched candidate scoring


def _assemble_values(C: np.ndarray, g: ComponentSet) -> np.ndarray:
    shifts = np.arange(C.shape[1], dtype=np.int64)
    return (g.functions[C].astype(np.int64) << shifts[None, :, None]).sum(axis=1)


def full_rank_batch(C: np.ndarray) -> np.ndarray:
    """Rows of ``C`` whose masks are linearly independent (no nonempty subset XORs to 0)."""
    K, n = C.shape
    xors = np.zeros((K, 1 << n), dtype=np.int64)
    for s in range(1, 1 << n):
        low = (s & -s).bit_length() - 1
        xors[:, s] = xors[:, s & (s - 1)] ^ C[:, low]
    return np.all(xors[:, 1:] != 0, axis=1)


def _fp_counts(values: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.arange(1 << n)
    fp = (values == x).sum(axis=-1)
    ofp = (values == (x ^ ((1 << n) - 1))).sum(axis=-1)
    return fp, ofp


def order_candidates(C: np.ndarray, g: ComponentSet, policy: str) -> np.ndarray:
    """Apply an ordering policy to a batch of mask rows."""
    C = np.sort(C, axis=1)
    if policy == "canonical":
        return C
    if policy == "descending":
        return C[:, ::-1].copy()
    if policy != "best-of-orderings":
        raise InvalidInput(f"unknown ordering policy {policy!r}")
    n = C.shape[1]
    perms = np.array(list(itertools.permutations(range(n))))
    out = C.copy()
    # process in slices to bound memory at n! * 2^n per candidate
    step = max(1, (1 << 22) // (len(perms) * (1 << n) * n))
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, len(C), step):
        block = C[start : start + step]
        bits = g.functions[block].astype(np.int64)  # (k, n, N)
        permuted = bits[:, perms, :]  # (k, P, n, N)
        values = (permuted << shifts[None, None, :, None]).sum(axis=2)
        fp, ofp = _fp_counts(values, n)
        ok = (fp == 0) & (ofp == 0)
        has = ok.any(axis=1)
        first = ok.argmax(axis=1)
        chosen = block[np.arange(len(block))[:, None], perms[first]]
        out[start : start + step][has] = chosen[has]
    return out


@dataclass(frozen=True)
class Baseline:
    snr: float
    to: float
    cc: float


def _score_batch(C: np.ndarray, g: ComponentSet, cc_model: str, cc_statistic: str) -> dict[str, np.ndarray]:
    """Metrics of every candidate row in ``C`` (already ordered)."""
    n = g.n
    bij = full_rank_batch(C)
    values = _assemble_values(C, g)
    fp, ofp = _fp_counts(values, n)
    snr = snr_from_total(g.walsh[C].sum(axis=1), n, n)
    to = to_from_coord_ac(g.autocorr[C], n, n)
    weights = g.functions[C].astype(np.int64).sum(axis=1)
    stats = cc_stats_from_profile(cc_profile_from_weights(weights, n, n, cc_model))
    return dict(bijective=bij, fp=fp, ofp=ofp, snr=snr, to=to, cc=stats[cc_statistic])


def _tol(b: float) -> float:
    return _REL_TOL * max(1.0, abs(b))


@dataclass
class PipelineTally:
    """Table 1 counters.

    ``fp_zero``, ``ofp_zero``, ``to_not_worse`` and the ``*_better`` counters
    range over bijective candidates. ``*_better`` means strictly better than the
    initial box (lower, or higher TO when the direction is flipped);
    ``all_better`` counts accepted candidates.
    """

    total: int = 0
    bijective: int = 0
    fp_zero: int = 0
    ofp_zero: int = 0
    snr_better: int = 0
    to_better: int = 0
    cc_better: int = 0
    all_better: int = 0
    to_not_worse: int = 0

    def __iadd__(self, other: PipelineTally):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def as_table_rows(self) -> dict[str, int]:
        return {
            "#T_total": self.total,
            "#T_bij": self.bijective,
            "#T_FP": self.fp_zero,
            "#T_OFF": self.ofp_zero,
            "#T_SNR": self.snr_better,
            "#T_TO": self.to_better,
            "#T_K": self.cc_better,
            "#T_better": self.all_better,
            "#T_TO(not worse)": self.to_not_worse,
        }


@dataclass(frozen=True)
class SearchConfig:
    mode: str = "exhaustive"
    seed: int = 0
    max_candidates: int = 10_000
    population_size: int = 64
    generations: int = 50
    tournament_size: int = 4
    mutation_rate: float = 0.1
    elitism: int = 1
    ordering_policy: str = "canonical"
    thresholds: tuple[str, ...] = ("to",)
    to_direction: str = "le"
    cc_model: str = DEFAULT_CC_MODEL
    cc_statistic: str = DEFAULT_CC_STATISTIC
    workers: int = 1
    chunk_size: int = 8192
    report_accepted: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInput(f"unknown mode {self.mode!r}")
        if self.ordering_policy not in ORDERINGS:
            raise InvalidInput(f"unknown ordering policy {self.ordering_policy!r}")
        if self.to_direction not in ("le", "ge"):
            raise InvalidInput("to_direction must be 'le' or 'ge'")
        if not set(self.thresholds) <= set(THRESHOLDS) or "to" not in self.thresholds:
            raise InvalidInput(f"thresholds must include 'to' and be drawn from {THRESHOLDS}")
        if self.mode == "genetic" and self.population_size < 2:
            raise InvalidInput("population_size must be at least 2")
        if not 0 < self.mutation_rate < 1:
            raise InvalidInput("mutation_rate must lie in (0, 1)")
        if self.workers < 1 or self.chunk_size < 1:
            raise InvalidInput("workers and chunk_size must be positive")

    def describe_acceptance(self) -> str:
        op = "<=" if self.to_direction == "le" else ">="
        parts = ["bijective", "FP = 0", "OFP = 0", f"TO {op} initial TO"]
        if "snr" in self.thresholds:
            parts.append("SNR < initial SNR")
        if "cc" in self.thresholds:
            parts.append(f"kappa[{self.cc_model}, {self.cc_statistic}] < initial")
        return " and ".join(parts)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    stages: dict[str, bool]


def _stage_flags(scores: dict[str, np.ndarray], base: Baseline, config: SearchConfig) -> dict[str, np.ndarray]:
    bij = scores["bijective"]
    t, eps = scores["to"], _tol(base.to)
    if config.to_direction == "le":
        to_ok, to_strict = t <= base.to + eps, t < base.to - eps
    else:
        to_ok, to_strict = t >= base.to - eps, t > base.to + eps
    snr_ok = scores["snr"] < base.snr - _tol(base.snr)
    cc_ok = scores["cc"] < base.cc - _tol(base.cc)
    fp0 = bij & (scores["fp"] == 0)
    ofp0 = bij & (scores["ofp"] == 0)
    accepted = fp0 & ofp0 & to_ok
    if "snr" in config.thresholds:
        accepted &= snr_ok
    if "cc" in config.thresholds:
        accepted &= cc_ok
    return dict(
        bijective=bij,
        fp_zero=fp0,
        ofp_zero=ofp0,
        to_ok=bij & to_ok,
        to=bij & to_strict,
        snr=bij & snr_ok,
        cc=bij & cc_ok,
        accepted=accepted,
    )


def _tally(flags: dict[str, np.ndarray]) -> PipelineTally:
    return PipelineTally(
        total=len(flags["bijective"]),
        bijective=int(flags["bijective"].sum()),
        fp_zero=int(flags["fp_zero"].sum()),
        ofp_zero=int(flags["ofp_zero"].sum()),
        snr_better=int(flags["snr"].sum()),
        to_better=int(flags["to"].sum()),
        cc_better=int(flags["cc"].sum()),
        all_better=int(flags["accepted"].sum()),
        to_not_worse=int(flags["to_ok"].sum()),
    )


def baseline_of(S: SBoxTable, config: SearchConfig) -> Baseline:
    g = build_component_set(S)
    identity = np.array([[1 << i for i in range(S.n)]])
    s = _score_batch(identity, g, config.cc_model, config.cc_statistic)
    return Baseline(float(s["snr"][0]), float(s["to"][0]), float(s["cc"][0]))


def filter_pipeline(candidate: MaskCandidate, g: ComponentSet, baseline, config: SearchConfig) -> Verdict:
    """Staged filter for one candidate, in the candidate's own coordinate order.

    Stages after a failed bijectivity check are not evaluated. ``baseline`` may be
    a :class:`Baseline` or the initial box's :class:`MetricsReport`.
    """
    if isinstance(baseline, MetricsReport):
        baseline = Baseline(baseline.snr, baseline.to, baseline.cc)
    _check_masks(candidate.masks, g.n)
    if not is_bijective(candidate):
        return Verdict(False, {"bijective": False})
    C = np.asarray([candidate.masks])
    flags = _stage_flags(_score_batch(C, g, config.cc_model, config.cc_statistic), baseline, config)
    stages = {k: bool(v[0]) for k, v in flags.items() if k != "accepted"}
    return Verdict(bool(flags["accepted"][0]), stages)


def ordering_refinement(candidate: MaskCandidate, g: ComponentSet, policy: str) -> MaskCandidate:
    ordered = order_candidates(np.asarray([candidate.masks]), g, policy)[0]
    return MaskCandidate(tuple(int(m) for m in ordered))


# drivers


@dataclass
class SearchResult:
    accepted: list[tuple[MaskCandidate, SBoxTable, MetricsReport | None]]
    tally: PipelineTally
    config: SearchConfig
    baseline: Baseline
    ordering_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    generations_run: int = 0

    def summary(self) -> dict:
        """Plain-data view; execution details (workers, chunk size) are left out
        so the output does not depend on them."""
        config = {k: v for k, v in asdict(self.config).items() if k not in ("workers", "chunk_size")}
        return {
            "config": config,
            "acceptance": self.config.describe_acceptance(),
            "baseline": asdict(self.baseline),
            "tally": self.tally.as_table_rows(),
            "ordering_counts": self.ordering_counts,
            "accepted": [list(c.masks) for c, _, _ in self.accepted],
            "generations_run": self.generations_run,
        }


def _evaluate_chunk(args):
    C, g_source, base, config = args
    g = build_component_set(g_source)
    ordered = order_candidates(C, g, config.ordering_policy)
    scores = _score_batch(ordered, g, config.cc_model, config.cc_statistic)
    flags = _stage_flags(scores, base, config)
    return ordered, scores, flags


def _map_chunks(chunks, S: SBoxTable, base: Baseline, config: SearchConfig):
    jobs = [(c, S, base, config) for c in chunks]
    if config.workers == 1 or len(jobs) <= 1:
        yield from map(_evaluate_chunk, jobs)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        yield from pool.map(_evaluate_chunk, jobs)


def _finish_accepted(rows: list[np.ndarray], g: ComponentSet, config: SearchConfig):
    accepted = []
    keyed = sorted({tuple(int(v) for v in r): None for r in rows})
    for masks in keyed:
        cand = MaskCandidate(masks)
        box = assemble(cand, g)
        report = full_report(box, cc_model=config.cc_model, cc_statistic=config.cc_statistic) if config.report_accepted else None
        accepted.append((cand, box, report))
    return accepted


def _combination_chunks(n: int, size: int):
    it = itertools.combinations(range(1 << n), n)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.asarray(block, dtype=np.int64)


def _fp_zero_counts(C: np.ndarray, g: ComponentSet, policy: str) -> dict[str, int]:
    ordered = order_candidates(C, g, policy)
    fp, ofp = _fp_counts(_assemble_values(ordered, g), g.n)
    return {"fp_zero": int((fp == 0).sum()), "ofp_zero": int((ofp == 0).sum()), "both_zero": int(((fp == 0) & (ofp == 0)).sum())}


def enumerate_all(S_initial: SBoxTable, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Evaluate every unordered n-subset of the 2^n component masks (mask 0 included)."""
    n = S_initial.n
    if n > MAX_EXHAUSTIVE_N:
        raise UnsupportedSize(f"exhaustive enumeration supports n <= {MAX_EXHAUSTIVE_N}; use genetic mode for n={n}")
    g = build_component_set(S_initial)
    base = baseline_of(S_initial, config)
    tally = PipelineTally()
    accepted_rows = []
    ordering_counts = {p: {"fp_zero": 0, "ofp_zero": 0, "both_zero": 0} for p in ORDERINGS}
    chunks = list(_combination_chunks(n, config.chunk_size))
    for chunk, (ordered, scores, flags) in zip(chunks, _map_chunks(chunks, S_initial, base, config)):
        tally += _tally(flags)
        accepted_rows.extend(ordered[flags["accepted"]])
        bij = chunk[scores["bijective"]]
        for policy in ORDERINGS:
            for k, v in _fp_zero_counts(bij, g, policy).items():
                ordering_counts[policy][k] += v
    expected = math.comb(1 << n, n)
    assert tally.total == expected, (tally.total, expected)
    return SearchResult(_finish_accepted(accepted_rows, g, config), tally, config, base, ordering_counts)


def random_subsets(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniformly random n-subsets of range(2^n), one per row."""
    keys = rng.random((count, 1 << n))
    return np.sort(np.argpartition(keys, n - 1, axis=1)[:, :n], axis=1).astype(np.int64)


def random_sample(S_initial: SBoxTable, config: SearchConfig) -> SearchResult:
    """Evaluate ``max_candidates`` independent uniform draws (repeats allowed)."""
    n = S_initial.n
    g = build_component_set(S_initial)
    base = baseline_of(S_initial, config)
    rng = np.random.default_rng(config.seed)
    chunks = []
    left = config.max_candidates
    while left > 0:
        k = min(left, config.chunk_size)
        chunks.append(random_subsets(n, k, rng))
        left -= k
    tally = PipelineTally()
    accepted_rows = []
    for ordered, _, flags in _map_chunks(chunks, S_initial, base, config):
        tally += _tally(flags)
        accepted_rows.extend(ordered[flags["accepted"]])
    return SearchResult(_finish_accepted(accepted_rows, g, config), tally, config, base)


def _fitness(scores: dict[str, np.ndarray], base: Baseline, config: SearchConfig, C: np.ndarray) -> list[tuple]:
    sign = 1.0 if config.to_direction == "le" else -1.0
    out = []
    for i in range(len(C)):
        rank = gf2_rank_rows(C[i])
        clean = int(scores["fp"][i] == 0 and scores["ofp"][i] == 0)
        key = [rank, clean, sign * (base.to - scores["to"][i])]
        if "snr" in config.thresholds:
            key.append(base.snr - scores["snr"][i])
        if "cc" in config.thresholds:
            key.append(base.cc - scores["cc"][i])
        out.append(tuple(float(k) for k in key))
    return out


def _random_unused(rng: np.random.Generator, used: set[int], N: int) -> int:
    while True:
        v = int(rng.integers(N))
        if v not in used:
            return v


def genetic_search(S_initial: SBoxTable, config: SearchConfig) -> SearchResult:
    """Seeded GA over mask sets.

    Fitness is lexicographic: rank of the mask matrix, then FP = OFP = 0, then
    TO gain over the initial box, then the optional SNR / kappa gains.
    Selection is by tournament, crossover is uniform per position with
    duplicates replaced by unused masks, mutation swaps one mask for an unused
    one, and the best individual survives unchanged. Every distinct candidate
    seen is tallied once; all that pass the filter are returned.
    """
    if config.population_size < 2:
        raise InvalidInput("population_size must be at least 2")
    n = S_initial.n
    N = 1 << n
    g = build_component_set(S_initial)
    base = baseline_of(S_initial, config)
    rng = np.random.default_rng(config.seed)

    seen: dict[tuple[int, ...], tuple] = {}
    tally = PipelineTally()
    accepted_rows = []

    def evaluate(pop: list[tuple[int, ...]]) -> list[tuple]:
        nonlocal tally
        fresh = sorted({p for p in pop if p not in seen})
        if fresh:
            C = np.asarray(fresh, dtype=np.int64)
            parts = np.array_split(C, min(config.workers, len(C))) if config.workers > 1 else [C]
            results = list(_map_chunks(parts, S_initial, base, config))
            for part, (ordered, scores, flags) in zip(parts, results):
                tally += _tally(flags)
                accepted_rows.extend(ordered[flags["accepted"]])
                fit = _fitness(scores, base, config, ordered)
                for key, f in zip(map(tuple, part.tolist()), fit):
                    seen[key] = f
        return [seen[p] for p in pop]

    def tournament(fit):
        idx = rng.choice(len(fit), size=min(config.tournament_size, len(fit)), replace=False)
        return int(max(idx, key=lambda i: (fit[i], -i)))

    pop = [tuple(int(v) for v in row) for row in random_subsets(n, config.population_size, rng)]
    fit = evaluate(pop)
    gens = 0
    for _ in range(config.generations):
        gens += 1
        order = sorted(range(len(pop)), key=lambda i: (fit[i], -i), reverse=True)
        nxt = [pop[i] for i in order[: config.elitism]]
        while len(nxt) < config.population_size:
            a, b = pop[tournament(fit)], pop[tournament(fit)]
            pick = rng.random(n) < 0.5
            child = [a[i] if pick[i] else b[i] for i in range(n)]
            used: set[int] = set()
            for i, v in enumerate(child):
                if v in used:
                    child[i] = _random_unused(rng, used | set(child), N)
                used.add(child[i])
            if rng.random() < config.mutation_rate:
                i = int(rng.integers(n))
                child[i] = _random_unused(rng, set(child), N)
            nxt.append(tuple(sorted(child)))
        pop = nxt
        fit = evaluate(pop)
    return SearchResult(_finish_accepted(accepted_rows, g, config), tally, config, base, generations_run=gens)


def run(S_initial: SBoxTable, config: SearchConfig) -> SearchResult:
    if config.mode == "exhaustive":
        return enumerate_all(S_initial, config)
    if config.mode == "random-sample":
        return random_sample(S_initial, config)
    return genetic_search(S_initial, config)


def group_count(n: int) -> int:
    """|GL(n, 2)| / n!: the number of unordered bases of GF(2)^n."""
    order = 1
    for k in range(n):
        order *= (1 << n) - (1 << k)
    return order // math.factorial(n)


__all__ = [
    "Baseline",
    "ComponentSet",
    "MaskCandidate",
    "PipelineTally",
    "SearchConfig",
    "SearchResult",
    "Verdict",
    "assemble",
    "build_component_set",
    "enumerate_all",
    "filter_pipeline",
    "genetic_search",
    "group_count",
    "is_bijective",
    "ordering_refinement",
    "random_sample",
    "run",
]
