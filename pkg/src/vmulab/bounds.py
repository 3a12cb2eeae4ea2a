"""Local sets, local minimum degree, vertex cover and the pairability / VMU bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .graph import Graph, GraphError, bits, mask_of, popcount

# low block size for the local-set scan; the table has 2**LOW_BITS entries
LOW_BITS = 15


@dataclass(frozen=True)
class LocalSetReport:
    min_size: int
    witness_d: int
    delta_loc: int

    @property
    def witness(self) -> list[int]:
        return list(bits(self.witness_d))


def _compact(g: Graph) -> tuple[list[int], list[int]]:
    """Relabel active vertices to 0..m-1; return (labels, compact rows)."""
    verts = g.vertices()
    index = {v: i for i, v in enumerate(verts)}
    rows = [mask_of(index[w] for w in bits(g.adj[v])) for v in verts]
    return verts, rows


def _odd_table(rows: list[int], nbits: int) -> np.ndarray:
    """odd[s] = Odd(s) for every subset s of the first ``nbits`` vertices."""
    odd = np.zeros(1 << nbits, dtype=np.uint64)
    for b in range(nbits):
        half = 1 << b
        odd[half : 2 * half] = odd[:half] ^ np.uint64(rows[b])
    return odd


def local_min_degree(g: Graph) -> LocalSetReport:
    """Smallest nonempty local set ``D | Odd(D)``, by exhaustive scan.

    Subsets are split into a low block, tabulated once, and a high block walked
    in Gray-code order so that each step updates ``Odd`` with a single XOR. The
    scan is ``O(2**m)`` for ``m`` active vertices; ``m = 29`` takes seconds.
    """
    m = g.num_vertices()
    if m == 0:
        raise GraphError("local minimum degree of the empty graph is undefined")
    if m > 40:
        raise GraphError(f"exhaustive local-set scan is not feasible for {m} vertices")
    verts, rows = _compact(g)

    low = min(m, LOW_BITS)
    high = m - low
    odd_low = _odd_table(rows, low)
    d_low = np.arange(1 << low, dtype=np.uint64)
    base = d_low | odd_low  # local set of a low-only D, before the high part

    best = m + 1
    best_d = 0
    # the empty D is excluded by giving it an impossible size
    sizes = np.bitwise_count(base).astype(np.int64)
    sizes[0] = m + 1
    i = int(np.argmin(sizes))
    best, best_d = int(sizes[i]), i

    d_high = 0
    odd_high = 0
    for step in range(1, 1 << high):
        flip = (step & -step).bit_length() - 1  # Gray code: bit that changes
        v = low + flip
        d_high ^= 1 << v
        odd_high ^= rows[v]
        sizes = np.bitwise_count(
            (d_low | np.uint64(d_high)) | (odd_low ^ np.uint64(odd_high))
        )
        i = int(np.argmin(sizes))
        if sizes[i] < best:
            best = int(sizes[i])
            best_d = d_high | i
            if best == 1:
                break

    witness = mask_of(verts[j] for j in bits(best_d))
    return LocalSetReport(min_size=best, witness_d=witness, delta_loc=best - 1)


def local_set(g: Graph, d: int) -> int:
    """``D | Odd(D)`` as a bitset."""
    odd = 0
    for v in bits(d):
        odd ^= g.adj[v]
    return d | odd


def vertex_cover_number(g: Graph) -> int:
    """Exact vertex cover number by branch and bound on bitsets."""
    adj = list(g.adj)
    best = [popcount(g.active)]

    def rec(alive: int, size: int) -> None:
        if size >= best[0]:
            return
        # vertex of maximum remaining degree
        top, top_deg = -1, 0
        edges2 = 0
        for v in bits(alive):
            d = popcount(adj[v] & alive)
            edges2 += d
            if d > top_deg:
                top, top_deg = v, d
        if top_deg == 0:
            best[0] = size
            return
        # a cover of E needs at least |E| / maxdeg vertices
        if size + -(-edges2 // (2 * top_deg)) >= best[0]:
            return
        nb = adj[top] & alive
        if top_deg <= 2:
            # max degree <= 2: paths and cycles, solved directly
            best[0] = min(best[0], size + _cover_deg2(adj, alive))
            return
        rec(alive & ~(1 << top), size + 1)
        rec(alive & ~nb & ~(1 << top), size + popcount(nb))

    rec(g.active, 0)
    return best[0]


def _cover_deg2(adj: list[int], alive: int) -> int:
    """Vertex cover of a graph with maximum degree 2 (disjoint paths/cycles)."""
    total = 0
    seen = 0
    for v in bits(alive):
        if seen >> v & 1:
            continue
        comp = frontier = 1 << v
        while frontier:
            nxt = 0
            for w in bits(frontier):
                nxt |= adj[w] & alive
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        size = popcount(comp)
        nedges = sum(popcount(adj[w] & alive) for w in bits(comp)) // 2
        if nedges == size:  # cycle
            total += (size + 1) // 2
        else:  # path
            total += size // 2
    return total


def _ceil_tau_bound(tau: int) -> int:
    """ceil((tau + log2(tau)) / 4), exactly."""
    if tau <= 0:
        return 0
    q = 0
    while 4 * q < tau or (1 << (4 * q - tau)) < tau:
        q += 1
    return q


def cor4_consistent(delta_loc: int, tau: int) -> bool:
    """Check ``2*delta_loc <= tau + log2(tau) + 1`` in exact arithmetic."""
    if tau == 0:
        return delta_loc == 0
    e = 2 * delta_loc - tau - 1
    return e <= 0 or (1 << e) <= tau


def counting_inequality(n: int, k: int) -> bool:
    """Necessary condition ``3**(n-k) >= 2**((k*k - 5*k)/2 - 1)`` for k-VMU."""
    rhs_exp = (k * k - 5 * k) // 2 - 1  # k*(k-5) is always even
    return Fraction(3) ** (n - k) >= Fraction(2) ** rhs_exp


def counting_closed_form(n: int) -> float:
    return math.sqrt(2 * n * math.log2(3)) + 2


def vmu_counting_bound(n: int) -> tuple[int, float]:
    """Largest ``k <= n`` passing the counting inequality, and the closed-form value."""
    if n < 1:
        raise GraphError("order must be positive")
    best = 0
    for k in range(0, n + 1):
        if counting_inequality(n, k):
            best = k
    return best, counting_closed_form(n)


@dataclass(frozen=True)
class BoundsReport:
    order: int
    delta_loc: int
    witness_d: list[int]
    tau: int
    pairability_max_deltaloc: int
    pairability_max_tau: int
    vmu_max_deltaloc: int
    vmu_max_counting: int
    counting_closed_form: float

    @property
    def pairability_max(self) -> int:
        return min(self.pairability_max_deltaloc, self.pairability_max_tau)

    @property
    def vmu_max(self) -> int:
        return min(self.vmu_max_deltaloc, self.vmu_max_counting)

    def excludes_pairable(self, k: int) -> str | None:
        """Name of the bound refuting k-pairability, or None."""
        if k > self.pairability_max_deltaloc:
            return "delta_loc"
        if k > self.pairability_max_tau:
            return "vertex_cover"
        if 2 * k > self.order:
            return "order"
        return None

    def excludes_vmu(self, k: int) -> str | None:
        if k > self.vmu_max_deltaloc:
            return "delta_loc"
        if k > self.vmu_max_counting:
            return "counting"
        return None

    def to_json(self) -> dict:
        return asdict(self)


def bounds_report(g: Graph) -> BoundsReport:
    ls = local_min_degree(g)
    tau = vertex_cover_number(g)
    n = g.num_vertices()
    counting, closed = vmu_counting_bound(n)
    return BoundsReport(
        order=n,
        delta_loc=ls.delta_loc,
        witness_d=ls.witness,
        tau=tau,
        pairability_max_deltaloc=-(-ls.delta_loc // 2),
        pairability_max_tau=_ceil_tau_bound(tau),
        vmu_max_deltaloc=ls.delta_loc + 1,
        vmu_max_counting=counting,
        counting_closed_form=closed,
    )
