"""Security metrics of S-boxes.

Every metric takes an :class:`~sboxlab.boolfn.SBoxTable`. Spectral quantities are
computed once per call from the stacked component spectra; ``full_report``
shares that work across metrics.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .boolfn import (
    InvalidInput,
    SBoxTable,
    all_components,
    autocorrelation_from_walsh,
    ddt,
    fwht,
    gf2_rank_dense,
    moebius_transform,
    popcount,
    walsh_batch,
)

CC_MODELS = ("sqhw", "bit", "sqhw-norm")
CC_STATISTICS = ("var", "min", "mean", "max")
SNR_VARIANTS = ("sign", "01")

# calibrated defaults (see README, "Calibration")
DEFAULT_CC_MODEL = "sqhw"
DEFAULT_CC_STATISTIC = "var"
DEFAULT_SNR_VARIANT = "sign"


def component_spectra(S: SBoxTable) -> np.ndarray:
    """Walsh spectra of all components, ``spectra[v, w] = W_{v.S}(w)``."""
    return walsh_batch(all_components(S))


def coordinate_bits(S: SBoxTable) -> np.ndarray:
    return ((S.entries[None, :] >> np.arange(S.m)[:, None]) & 1).astype(np.uint8)


def is_balanced(S: SBoxTable, spectra: np.ndarray | None = None) -> bool:
    if spectra is None:
        spectra = component_spectra(S)
    return bool(np.all(spectra[1:, 0] == 0))


def nonlinearity(S: SBoxTable, spectra: np.ndarray | None = None) -> int:
    if spectra is None:
        spectra = component_spectra(S)
    return (1 << (S.n - 1)) - int(np.abs(spectra[1:]).max()) // 2


def algebraic_degree(S: SBoxTable) -> int:
    """Largest monomial weight over the ANFs of all coordinates."""
    best = 0
    for bits in coordinate_bits(S):
        support = np.flatnonzero(moebius_transform(bits))
        if support.size:
            best = max(best, int(popcount(support).max()))
    return best


def correlation_immunity(S: SBoxTable, spectra: np.ndarray | None = None) -> int:
    """Largest t with ``W_{v.S}(w) = 0`` for all v != 0 and 1 <= hw(w) <= t."""
    if spectra is None:
        spectra = component_spectra(S)
    weights = popcount(np.arange(1 << S.n))
    hit = np.any(spectra[1:] != 0, axis=0)
    hit[0] = False
    if not hit.any():
        return S.n
    return int(weights[hit].min()) - 1


def differential_uniformity(S: SBoxTable, table=None) -> int:
    return (table or ddt(S)).max_nontrivial


def fixed_points(S: SBoxTable) -> int:
    _require_square(S)
    return int(np.count_nonzero(S.entries == np.arange(1 << S.n)))


def opposite_fixed_points(S: SBoxTable) -> int:
    """Number of x with ``S(x)`` equal to the bitwise complement of x."""
    _require_square(S)
    x = np.arange(1 << S.n)
    return int(np.count_nonzero(S.entries == x ^ ((1 << S.n) - 1)))


def _require_square(S: SBoxTable):
    if S.n != S.m:
        raise InvalidInput(f"operation needs n = m, got n={S.n}, m={S.m}")


def robustness(S: SBoxTable, table=None) -> Fraction:
    table = table or ddt(S)
    N = 1 << S.n
    return (1 - Fraction(table.zero_column_hits, N)) * (1 - Fraction(table.max_nontrivial, N))


def component_autocorrelations(S: SBoxTable, spectra: np.ndarray | None = None) -> np.ndarray:
    if spectra is None:
        spectra = component_spectra(S)
    return autocorrelation_from_walsh(spectra)


def absolute_indicator(S: SBoxTable, ac: np.ndarray | None = None) -> int:
    if ac is None:
        ac = component_autocorrelations(S)
    if S.n == 0:
        return 0
    return int(np.abs(ac[1:, 1:]).max())


def sum_of_squares(S: SBoxTable, ac: np.ndarray | None = None) -> int:
    if ac is None:
        ac = component_autocorrelations(S)
    return int((ac[1:] * ac[1:]).sum(axis=1).max())


# algebraic immunity


@lru_cache(maxsize=None)
def _monomial_matrix(n: int, d: int) -> np.ndarray:
    """Evaluation matrix ``E[x, j] = x^{I_j}`` for all monomials of degree <= d."""
    masks = np.arange(1 << n)
    mons = masks[popcount(masks) <= d]
    x = np.arange(1 << n)
    E = ((x[:, None] & mons[None, :]) == mons[None, :]).astype(np.uint8)
    E.setflags(write=False)
    return E


def _has_annihilator(support: np.ndarray, n: int, d: int) -> bool:
    """True when some nonzero g with deg g <= d vanishes on ``support``."""
    E = _monomial_matrix(n, d)
    if support.size < E.shape[1]:
        return True
    return gf2_rank_dense(E[support]) < E.shape[1]


def boolean_algebraic_immunity(bits, limit: int | None = None) -> int:
    """AI of a single Boolean function given as a truth table.

    With ``limit`` set, only degrees below it are examined and ``limit`` is
    returned when no smaller annihilator exists.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.size.bit_length() - 1
    top = (n + 1) // 2
    if limit is not None:
        top = min(top, limit)
    ones = np.flatnonzero(bits)
    zeros = np.flatnonzero(bits == 0)
    for d in range(top):
        if _has_annihilator(ones, n, d) or _has_annihilator(zeros, n, d):
            return d
    return top


def algebraic_immunity(S: SBoxTable) -> int:
    """Minimum Boolean AI over the nonzero components of S."""
    if S.n > 8:
        raise InvalidInput("algebraic immunity is limited to n <= 8")
    comps = all_components(S)
    best = (S.n + 1) // 2
    for v in range(1, 1 << S.m):
        best = boolean_algebraic_immunity(comps[v], limit=best)
        if best == 0:
            break
    return best


def preimage_algebraic_immunity(S: SBoxTable) -> int:
    """Minimum degree of a nonzero function vanishing on some preimage ``S^{-1}(b)``.

    The literal set-annihilator form; every bijective S-box with n >= 2 scores 1.
    """
    if S.n > 8:
        raise InvalidInput("algebraic immunity is limited to n <= 8")
    preimages = [np.flatnonzero(S.entries == b) for b in np.unique(S.entries)]
    for d in range(S.n + 1):
        if any(_has_annihilator(pre, S.n, d) for pre in preimages):
            return d
    return S.n


# side-channel indicators
#
# The *_from_* helpers accept stacked inputs (leading batch axes) so the
# search module can score many candidates with the same arithmetic.


def snr_from_total(total: np.ndarray, n: int, m: int) -> np.ndarray:
    """SNR from summed coordinate spectra ``total[..., k]``."""
    total = np.asarray(total, dtype=np.int64)
    denom = (total**4).sum(axis=-1).astype(np.float64)
    with np.errstate(divide="ignore"):
        return m * float(1 << (2 * n)) / np.sqrt(denom)


def snr_dpa(S: SBoxTable, variant: str = DEFAULT_SNR_VARIANT) -> float:
    """DPA signal-to-noise ratio from the summed coordinate spectra."""
    bits = coordinate_bits(S)
    if variant == "sign":
        total = walsh_batch(bits).sum(axis=0)
    elif variant == "01":
        total = fwht(bits.astype(np.int64)).sum(axis=0)
    else:
        raise InvalidInput(f"unknown SNR variant {variant!r}")
    return float(snr_from_total(total, S.n, S.m))


@lru_cache(maxsize=None)
def _beta_signs(m: int) -> np.ndarray:
    beta = np.arange(1 << m)
    signs = 1 - 2 * ((beta[:, None] >> np.arange(m)[None, :]) & 1)
    signs.setflags(write=False)
    return signs


def to_from_coord_ac(coord_ac: np.ndarray, n: int, m: int) -> np.ndarray:
    """TO from coordinate autocorrelations ``coord_ac[..., i, a]``."""
    N = 1 << n
    coord_ac = np.asarray(coord_ac, dtype=np.int64)
    if N == 1:
        return np.full(coord_ac.shape[:-2], float(m))
    sums = np.abs(np.matmul(_beta_signs(m), coord_ac[..., 1:])).sum(axis=-1)
    beta_weight = popcount(np.arange(1 << m))
    values = np.abs(m - 2 * beta_weight) - sums / float(N * N - N)
    return values.max(axis=-1)


def transparency_order(S: SBoxTable) -> float:
    """Transparency order.

    The zero-mask Walsh value of coordinate i of the derivative in direction a
    equals the autocorrelation of f_i at a, so only coordinate
    autocorrelations are needed.
    """
    coord_ac = autocorrelation_from_walsh(walsh_batch(coordinate_bits(S)))
    return float(to_from_coord_ac(coord_ac, S.n, S.m))


def cc_profile_from_weights(h: np.ndarray, n: int, m: int, model: str = DEFAULT_CC_MODEL) -> np.ndarray:
    """``profile[..., d] = kappa(k, k ^ d)`` from output weights ``h[..., x] = hw(S(x))``."""
    N = 1 << n
    h = np.asarray(h, dtype=np.int64)
    if model not in ("sqhw", "sqhw-norm"):
        raise InvalidInput(f"model {model!r} is not weight based")
    hh = fwht(h)
    corr = fwht(hh * hh) // N  # sum_x h(x) h(x ^ d)
    prof = 2 * ((h * h).sum(axis=-1, keepdims=True) - corr) / float(N)
    return prof / m if model == "sqhw-norm" else prof


def _cc_profile(S: SBoxTable, model: str) -> np.ndarray:
    """The confusion coefficient of a key pair depends only on their difference d."""
    N = 1 << S.n
    if model in ("sqhw", "sqhw-norm"):
        return cc_profile_from_weights(popcount(S.entries), S.n, S.m, model)
    if model == "bit":
        ac = autocorrelation_from_walsh(walsh_batch(coordinate_bits(S)))
        return ((N - ac) / float(2 * N)).mean(axis=0)
    raise InvalidInput(f"unknown confusion-coefficient model {model!r}")


def confusion_coefficients(S: SBoxTable, model: str = DEFAULT_CC_MODEL) -> np.ndarray:
    """Full symmetric grid ``kappa[k_i, k_j]`` under the chosen selection model."""
    _require_square(S)
    if S.n > 8:
        raise InvalidInput("confusion coefficients are limited to n <= 8")
    prof = _cc_profile(S, model)
    k = np.arange(1 << S.n)
    return prof[k[:, None] ^ k[None, :]]


def cc_stats_from_profile(prof: np.ndarray) -> dict[str, np.ndarray]:
    """min / mean / max / population variance over nonzero key differences.

    Each nonzero difference occurs equally often among distinct key pairs, so
    these equal the statistics over the pairs themselves.
    """
    p = np.asarray(prof)[..., 1:]
    return {"min": p.min(axis=-1), "mean": p.mean(axis=-1), "max": p.max(axis=-1), "var": p.var(axis=-1)}


def cc_statistics(S: SBoxTable, model: str = DEFAULT_CC_MODEL) -> dict[str, float]:
    _require_square(S)
    if S.n < 1:
        raise InvalidInput("need at least one key bit")
    stats = cc_stats_from_profile(_cc_profile(S, model))
    return {k: float(v) for k, v in stats.items()}


# aggregate


@dataclass(frozen=True)
class MetricsReport:
    n: int
    m: int
    balanced: bool
    nl: int
    degree: int
    ci: int
    du: int
    robustness: Fraction
    fp: int
    ofp: int
    abs_indicator: int
    sum_sq: int
    ai: int
    snr: float
    to: float
    cc_min: float
    cc_mean: float
    cc_max: float
    cc_var: float
    cc_model: str = DEFAULT_CC_MODEL
    cc_statistic: str = DEFAULT_CC_STATISTIC
    snr_variant: str = DEFAULT_SNR_VARIANT

    @property
    def cc(self) -> float:
        """The scalar confusion-coefficient figure used for comparisons."""
        return getattr(self, f"cc_{self.cc_statistic}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["robustness"] = str(self.robustness)
        d["robustness_value"] = float(self.robustness)
        d["cc"] = self.cc
        return d


# Row labels in the order of the comparison tables
ROW_ORDER = (
    ("B", "balanced"),
    ("NL", "nl"),
    ("AD", "degree"),
    ("CI", "ci"),
    ("R", "robustness"),
    ("δ", "du"),
    ("AC", "abs_indicator"),
    ("σ", "sum_sq"),
    ("AI", "ai"),
    ("FP", "fp"),
    ("OFP", "ofp"),
    ("SNR", "snr"),
    ("TO", "to"),
    ("K", "cc"),
)


def full_report(
    S: SBoxTable,
    cc_model: str = DEFAULT_CC_MODEL,
    cc_statistic: str = DEFAULT_CC_STATISTIC,
    snr_variant: str = DEFAULT_SNR_VARIANT,
) -> MetricsReport:
    if cc_statistic not in CC_STATISTICS:
        raise InvalidInput(f"unknown confusion statistic {cc_statistic!r}")
    _require_square(S)
    spectra = component_spectra(S)
    ac = autocorrelation_from_walsh(spectra)
    table = ddt(S)
    coord_ac = ac[1 << np.arange(S.m)]
    cc = cc_statistics(S, cc_model)
    return MetricsReport(
        n=S.n,
        m=S.m,
        balanced=is_balanced(S, spectra),
        nl=nonlinearity(S, spectra),
        degree=algebraic_degree(S),
        ci=correlation_immunity(S, spectra),
        du=differential_uniformity(S, table),
        robustness=robustness(S, table),
        fp=fixed_points(S),
        ofp=opposite_fixed_points(S),
        abs_indicator=absolute_indicator(S, ac),
        sum_sq=sum_of_squares(S, ac),
        ai=algebraic_immunity(S),
        snr=snr_dpa(S, snr_variant),
        to=float(to_from_coord_ac(coord_ac, S.n, S.m)),
        cc_min=cc["min"],
        cc_mean=cc["mean"],
        cc_max=cc["max"],
        cc_var=cc["var"],
        cc_model=cc_model,
        cc_statistic=cc_statistic,
        snr_variant=snr_variant,
    )
