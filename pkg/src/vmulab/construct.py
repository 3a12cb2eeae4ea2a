"""Probabilistic constructions, the greedy edge-toggling planner and the
closed-form calculators behind the existence results.

Two random families are covered: Erdős–Rényi graphs for pairability and
(k+1)-partite graphs for vertex-minor universality. Calculators work in log
space (``mpmath`` when the parameters leave double range).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

import mpmath
import numpy as np

from .graph import Graph, GraphError, bits, mask_of, popcount

E2 = math.e**2
PAIRABLE_C1_MIN = 5.0
VMU_C_MIN = 3 * E2 / 4


# sampling -------------------------------------------------------------------


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability must lie in [0, 1], got {p}")
    return p


def erdos_renyi(n: int, p: float, seed: int | np.random.Generator | None = None) -> Graph:
    p = _check_p(p)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def multipartite(
    parts: int, m: int, p: float, seed: int | np.random.Generator | None = None
) -> Graph:
    """Random graph on ``parts`` independent blocks of ``m`` vertices each.

    Vertex ``v`` lies in block ``v // m``; only cross-block pairs are eligible.
    """
    p = _check_p(p)
    rng = np.random.default_rng(seed)
    n = parts * m
    iu, ju = np.triu_indices(n, 1)
    cross = iu // m != ju // m
    iu, ju = iu[cross], ju[cross]
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def stream_multipartite(
    parts: int, m: int, p: float, seed: int = 0
) -> Iterator[tuple[int, np.ndarray]]:
    """Stream ``(v, higher-numbered neighbours of v)`` for a multipartite sample.

    Memory stays O(n) so orders in the millions are fine. Vertex ``v`` draws
    its row from ``default_rng([seed, v])``, so rows are reproducible alone.
    The stream is a different sample from :func:`multipartite` for the same seed.
    """
    p = _check_p(p)
    n = parts * m
    for v in range(n):
        rng = np.random.default_rng([seed, v])
        start = (v // m + 1) * m  # later blocks only; same-block pairs are never edges
        count = n - start
        if count <= 0:
            yield v, np.empty(0, dtype=np.int64)
            continue
        k = rng.binomial(count, p)
        nb = np.sort(rng.choice(count, size=k, replace=False)) + start
        yield v, nb


def sample_random_graph(spec: dict, seed: int) -> Graph:
    """Dispatch on ``spec["kind"]``: ``erdos_renyi`` (n, p) or ``multipartite`` (parts, m, p)."""
    kind = spec["kind"]
    if kind == "erdos_renyi":
        return erdos_renyi(int(spec["n"]), spec["p"], seed)
    if kind == "multipartite":
        return multipartite(int(spec["parts"]), int(spec["m"]), spec["p"], seed)
    raise GraphError(f"unknown random graph kind {kind!r}")


# construction parameters ----------------------------------------------------


@dataclass(frozen=True)
class ConstructionParams:
    kind: str
    k: int
    constants: dict
    n: int
    m: int
    p: Fraction | float
    t: int | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "constants": self.constants,
            "n": self.n,
            "m": self.m,
            "t": self.t,
            "p": str(self.p),
        }


def _floor(x) -> int:
    return int(mpmath.floor(x))


def _digits(x: int) -> int:
    """Decimal digit count, to within one, without converting to a string."""
    return int(x.bit_length() * 0.30103) + 1


def _mp_precision_for(k: int) -> int:
    # n grows like k^4, so four times the digits of k plus slack
    return max(50, 40 + 4 * _digits(k))


def construction_params(kind: str, k: int, **constants) -> ConstructionParams:
    """Derived sizes for the two constructions.

    pairable: ``c1``, ``c2`` -> t = floor(c1 k ln k), n = floor(c2 k^3 ln^3 k),
    m = n - 2k, p = 2/(2k+t).
    vmu: ``c`` -> m = floor(c k^4/(k+1) ln k), n = m(k+1), p = 2/k.
    """
    if k < 2:
        raise GraphError("constructions need k >= 2")
    with mpmath.workdps(_mp_precision_for(k)):
        lk = mpmath.log(k)
        if kind == "pairable":
            c1 = mpmath.mpf(str(constants.get("c1", 5.1)))
            c2 = mpmath.mpf(str(constants.get("c2", 5 * E2 * float(c1) ** 2 / 4 + 1)))
            if c1 <= PAIRABLE_C1_MIN:
                warnings.warn(f"c1 = {c1} is not above 5; the existence argument does not apply")
            c2_min = 5 * mpmath.e**2 * c1**2 / 4
            if c2 <= c2_min:
                warnings.warn(f"c2 = {c2} is not above 5 e^2 c1^2 / 4 = {float(c2_min):.2f}")
            t = _floor(c1 * k * lk)
            n = _floor(c2 * k**3 * lk**3)
            return ConstructionParams(
                kind, k, {"c1": float(c1), "c2": float(c2)}, n=n, m=n - 2 * k,
                p=Fraction(2, 2 * k + t), t=t,
            )
        if kind == "vmu":
            c = mpmath.mpf(str(constants.get("c", 5.6)))
            if c <= VMU_C_MIN:
                warnings.warn(f"c = {c} is not above 3 e^2 / 4 ~ 5.54")
            m = _floor(c * mpmath.mpf(k) ** 4 / (k + 1) * lk)
            return ConstructionParams(
                kind, k, {"c": float(c)}, n=m * (k + 1), m=m, p=Fraction(2, k)
            )
    raise GraphError(f"unknown construction kind {kind!r}")


# greedy toggling ------------------------------------------------------------


@dataclass
class TogglePlan:
    """Outcome of the greedy scan: pool vertex chosen for each toggled pair."""

    selected: dict[tuple[int, int], int] = field(default_factory=dict)
    leftover: list[tuple[int, int]] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return not self.leftover

    def lc_sequence(self) -> list[int]:
        return list(self.selected.values())


def greedy_toggle_plan(
    g: Graph, K: int | Iterable[int], h: Graph, pool: int | Iterable[int] | None = None
) -> TogglePlan:
    """Pick, for every pair where ``g[K]`` and ``h`` differ, a pool vertex whose
    neighbourhood inside ``K | S`` is exactly that pair.

    The pool is scanned in ascending label order and ``S`` collects accepted
    vertices, so ``S`` is independent and each chosen vertex sees only its own
    pair. Local complementation at every vertex of ``S`` then turns ``g[K]``
    into ``h``.
    """
    K = K if isinstance(K, int) else mask_of(K)
    if pool is None:
        pool = g.active & ~K
    elif not isinstance(pool, int):
        pool = mask_of(pool)
    if pool & K:
        raise GraphError("pool must be disjoint from K")
    if h.active != K:
        raise GraphError("target graph must be defined exactly on K")
    g._check_subset(K | pool)

    kv = list(bits(K))
    remaining: dict[int, tuple[int, int]] = {}
    for i, a in enumerate(kv):
        diff = (g.adj[a] ^ h.adj[a]) & K
        for b in kv[i + 1 :]:
            if diff >> b & 1:
                remaining[(1 << a) | (1 << b)] = (a, b)
    plan = TogglePlan()
    s = 0
    for u in bits(pool):
        if not remaining:
            break
        seen = g.adj[u] & (K | s)
        pair = remaining.pop(seen, None)
        if pair is not None:
            plan.selected[pair] = u
            s |= 1 << u
    plan.leftover = sorted(remaining.values())
    return plan


# Lemma-style failure bounds ---------------------------------------------------


def closed_bound(m: int, r: int, k: int, p: float) -> float:
    """``r exp(-(m - r) p^2 (1-p)^(k+r-2))``."""
    return r * math.exp(-(m - r) * p * p * (1 - p) ** (k + r - 2))


def dp_exact(m: int, r: int, s: int, k: int, p: float) -> float:
    """Exact failure probability of the greedy scan with ``m`` pool vertices
    left, ``r`` pairs left to toggle and ``|S| = s`` accepted so far."""
    if r == 0:
        return 0.0
    if r > m:
        return 1.0
    grid = _dp_grid(k, float(p), _round_up(m, 256), _round_up(r, 8), _round_up(s, 8))
    return float(grid[m, r, s])


def _round_up(x: int, base: int) -> int:
    return max(base, 1 << (x - 1).bit_length())


@lru_cache(maxsize=128)
def _dp_grid(k: int, p: float, m_max: int, r_max: int, s_max: int) -> np.ndarray:
    # s grows by one each time r drops, so s never exceeds s_max + r_max
    S = s_max + r_max + 2
    r = np.arange(r_max + 1)[:, None]
    s = np.arange(S)[None, :]
    hit = r * p * p * (1 - p) ** (k + s - 2.0)
    grid = np.empty((m_max + 1, r_max + 1, S))
    prev = np.where(r > 0, 1.0, 0.0) * np.ones((1, S))  # m = 0
    grid[0] = prev
    for mm in range(1, m_max + 1):
        shifted = np.zeros_like(prev)
        shifted[1:, :-1] = prev[:-1, 1:]  # p(m-1, r-1, s+1)
        cur = hit * shifted + (1 - hit) * prev
        cur[0] = 0.0
        cur[r[:, 0] > mm] = 1.0
        grid[mm] = cur
        prev = cur
    return grid


def dp_table(k: int, p: float, m_max: int, r_max: int) -> np.ndarray:
    """``dp_exact(m, r, 0, k, p)`` for all ``m <= m_max``, ``r <= r_max``; shape ``(m_max+1, r_max+1)``."""
    return _dp_grid(k, float(p), _round_up(m_max, 256), _round_up(r_max, 8), 8)[: m_max + 1, : r_max + 1, 0].copy()


def greedy_failure_rate(
    m: int, r: int, k: int, p: float, trials: int, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo failure rate of the greedy scan and its standard error.

    Each pool vertex is joined to each vertex of ``K`` and to each accepted
    vertex independently with probability ``p``; only the events the scan
    looks at are sampled. The ``r`` pairs to toggle are the first ``r`` pairs
    of ``K`` in lexicographic order.
    """
    npairs = k * (k - 1) // 2
    if not 0 <= r <= npairs:
        raise ValueError(f"r must lie in 0..{npairs}")
    p = _check_p(p)
    if r == 0:
        return 0.0, 1.0 / trials
    rng = np.random.default_rng(seed)
    weights = np.int64(1) << np.arange(k, dtype=np.int64)
    pair_codes = np.array(
        [(1 << a) | (1 << b) for a in range(k) for b in range(a + 1, k)][:r], dtype=np.int64
    )
    remaining = np.ones((trials, r), dtype=bool)
    s = np.zeros(trials, dtype=np.int64)
    for _ in range(m):
        code = (rng.random((trials, k)) < p).astype(np.int64) @ weights
        free = rng.random(trials) < (1 - p) ** s  # no edge to the accepted set
        match = (code[:, None] == pair_codes[None, :]) & remaining
        hit = match.any(axis=1) & free
        rows = np.nonzero(hit)[0]
        remaining[rows, match[rows].argmax(axis=1)] = False
        s += hit
    rate = float(remaining.any(axis=1).mean())
    return rate, math.sqrt(max(rate * (1 - rate), 1.0 / trials) / trials)


def probaS_bounds(m: int, r: int, s: int, k: int, p: float) -> dict:
    return {"closed_bound": closed_bound(m, r, k, p), "dp_exact": dp_exact(m, r, s, k, p)}


# appendix functions -----------------------------------------------------------


def appendix_functions(c: float, x: float) -> dict:
    """``f(x) = x^2 (1-x)^c``, its maximiser ``2/(c+2)`` and ``4 e^-2 / (c+2)^2``."""
    if c <= 0:
        raise ValueError("c must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return {
        "f": x * x * (1 - x) ** c,
        "argmax": 2 / (c + 2),
        "cap": 4 * math.exp(-2) / (c + 2) ** 2,
    }


def f_peak(c: float) -> float:
    x = 2 / (c + 2)
    return x * x * (1 - x) ** c


def lemma12_holds(k: int, m: int) -> bool:
    """``C(m(k+1), k) C(k, 2) <= C(m(k+1), k+1)``, in exact integers."""
    N = m * (k + 1)
    return math.comb(N, k) * math.comb(k, 2) <= math.comb(N, k + 1)


# feasibility ------------------------------------------------------------------


def binary_entropy(x):
    """``H(x)`` in bits; ``H(0) = H(1) = 0``. Floats in, float out; mpf in, mpf out."""
    if x <= 0 or x >= 1:
        return 0.0 if isinstance(x, (int, float)) else mpmath.mpf(0)
    if isinstance(x, float):
        return -x * math.log2(x) - (1 - x) * math.log2(1 - x)
    return -(x * mpmath.log(x) + (1 - x) * mpmath.log(1 - x)) / mpmath.log(2)


def chernoff_tail(delta, mu):
    """``exp(-delta^2 / (2 + delta) * mu)``, the upper-tail Chernoff bound."""
    return mpmath.exp(-(mpmath.mpf(delta) ** 2) / (2 + mpmath.mpf(delta)) * mu)


@dataclass(frozen=True)
class FeasibilityReport:
    """Natural-log terms of the union bound for one parameter set."""

    params: ConstructionParams
    log_d: mpmath.mpf
    log_p0: mpmath.mpf
    log_dp0: mpmath.mpf
    terms: dict

    @property
    def feasible(self) -> bool:
        return self.log_dp0 < 0

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "log_d": _num(self.log_d),
            "log_p0": _num(self.log_p0),
            "log_dp0": _num(self.log_dp0),
            "feasible": self.feasible,
            **self.terms,
        }


def _num(x):
    """Float when representable, otherwise a 15-digit decimal string."""
    if abs(x) < 1e300:
        return float(x)
    return mpmath.nstr(x, 15)


def _ln_comb(n, r):
    return mpmath.loggamma(n + 1) - mpmath.loggamma(r + 1) - mpmath.loggamma(n - r + 1)


def feasibility_report(params: ConstructionParams) -> FeasibilityReport:
    """Union-bound check ``d * p0 < 1`` for one parameter set, in log space.

    Working precision scales with the digit count of ``n`` so that
    ``log n!`` minus ``log (n-2k)!`` keeps its significant digits.
    """
    with mpmath.workdps(max(50, _digits(params.n) + 40)):
        if params.kind == "pairable":
            return _feasibility_pairable(params)
        if params.kind == "vmu":
            return _feasibility_vmu(params)
    raise GraphError(f"unknown construction kind {params.kind!r}")


def _feasibility_pairable(params: ConstructionParams) -> FeasibilityReport:
    k, t = params.k, params.t
    n, m = mpmath.mpf(params.n), mpmath.mpf(params.m)
    p = mpmath.mpf(params.p.numerator) / params.p.denominator
    mu = 2 * p * k * (k - 1)
    log_d = _ln_comb(n, 2 * k) + mpmath.loggamma(2 * k + 1) - mpmath.loggamma(k + 1) - k * mpmath.log(2)
    log_greedy = mpmath.log(t) - (m - t) * p**2 * (1 - p) ** (2 * k + t - 2)
    gap = t + 1 - k - mu
    log_tail = -(gap**2) / (t + 1 - k + mu)
    top = max(log_greedy, log_tail)
    log_p0 = top + mpmath.log(mpmath.exp(log_greedy - top) + mpmath.exp(log_tail - top))
    # the sufficient conditions use d <= (1/e) (n^2 e / 2k)^k
    log_count = k * (2 * mpmath.log(n) + 1 - mpmath.log(2 * k))
    half_e = mpmath.log(mpmath.e / 2)
    terms = {
        "mu": _num(mu),
        "chernoff_valid": bool(gap > 0),
        "log_greedy_term": _num(log_greedy),
        "log_chernoff_term": _num(log_tail),
        "log_relaxed_count": _num(log_count),
        "inequality_1": bool(log_tail + log_count < half_e),
        "inequality_2": bool(log_greedy + log_count < half_e),
    }
    return FeasibilityReport(params, log_d, log_p0, log_d + log_p0, terms)


def _feasibility_vmu(params: ConstructionParams) -> FeasibilityReport:
    k, m = params.k, mpmath.mpf(params.m)
    N = m * (k + 1)
    log_d = _ln_comb(N, k) + mpmath.log(math.comb(k, 2))
    log_d_upper = _ln_comb(N, k + 1)
    log_entropy = N * binary_entropy(1 / m) * mpmath.log(2)
    p = mpmath.mpf(2) / k
    log_p0_exact = m * mpmath.log1p(-(p**2) * (1 - p) ** (k - 2))
    log_p0 = -4 * mpmath.exp(-2) * m / k**2
    terms = {
        "m_exceeds_pairs": bool(params.m > math.comb(k, 2)),
        "log_d_upper": _num(log_d_upper),
        "log_entropy_bound": _num(log_entropy),
        "log_p0_exact": _num(log_p0_exact),
        "log_dp0_entropy": _num(log_entropy + log_p0),
        "entropy_chain_holds": bool(log_d <= log_d_upper and log_d_upper <= log_entropy),
    }
    return FeasibilityReport(params, log_d, log_p0, log_d + log_p0, terms)


def smallest_feasible_k(
    kind: str, max_log2: int = 1 << 14, exact_bits: int = 512, **constants
) -> int | None:
    """Smallest ``k`` with ``d p0 < 1``, assuming feasibility persists once reached.

    Scans ``k = 2..1000`` directly, then doubles the bit length of ``k`` up to
    ``max_log2`` bits and bisects. Below ``exact_bits`` bits the answer is
    exact; above, bisection runs on ``log k`` and stops at relative width
    ``1e-12``, returning the feasible end. None if nothing qualifies.
    """

    def ok(k: int) -> bool:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return feasibility_report(construction_params(kind, k, **constants)).feasible

    for k in range(2, 1001):
        if ok(k):
            return k
    j = 10
    while not ok(1 << (2 * j)):
        j *= 2
        if 2 * j > max_log2:
            return None
    lo, hi = 1 << j, 1 << (2 * j)
    # geometric bisection while the bracket is wide
    while hi.bit_length() > exact_bits and hi - lo > hi >> 40:
        mid = math.isqrt(lo * hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if hi.bit_length() > exact_bits:
        return hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
