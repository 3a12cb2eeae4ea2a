"""Labeled simple graphs over a fixed vertex universe.

Vertices are the integers ``0 .. order-1``. A graph carries an *active* mask
and deletion only clears bits in that mask, so labels never move. Neighbour
sets and vertex sets are plain Python ints used as bitsets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Raised on an operation outside a graph's domain (bad vertex, bad set)."""


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def popcount(mask: int) -> int:
    return mask.bit_count()


@dataclass(frozen=True)
class Graph:
    """Immutable labeled graph.

    ``adj[v]`` is the neighbour bitset of ``v``; rows of inactive vertices are
    zero. Equality is exact labeled equality, never isomorphism.
    """

    order: int
    active: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.order:
            raise GraphError("adjacency must have one row per universe vertex")
        if self.active >> self.order:
            raise GraphError("active mask exceeds the universe")

    # construction ---------------------------------------------------------

    @classmethod
    def empty(cls, order: int, active: int | None = None) -> Graph:
        if active is None:
            active = (1 << order) - 1
        return cls(order, active, (0,) * order)

    @classmethod
    def from_edges(
        cls,
        order: int,
        edges: Iterable[tuple[int, int]],
        active: Iterable[int] | int | None = None,
    ) -> Graph:
        if active is None:
            act = (1 << order) - 1
        elif isinstance(active, int):
            act = active
        else:
            act = mask_of(active)
        rows = [0] * order
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            for w in (u, v):
                if not 0 <= w < order or not act >> w & 1:
                    raise GraphError(f"edge ({u}, {v}) touches inactive vertex {w}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(order, act, tuple(rows))

    @classmethod
    def from_matrix(cls, matrix) -> Graph:
        """Build from a square 0/1 matrix (numpy array or nested lists)."""
        n = len(matrix)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if matrix[i][j]]
        return cls.from_edges(n, edges)

    # queries --------------------------------------------------------------

    def vertices(self) -> list[int]:
        return list(bits(self.active))

    def num_vertices(self) -> int:
        return popcount(self.active)

    def is_active(self, u: int) -> bool:
        return 0 <= u < self.order and bool(self.active >> u & 1)

    def neighbors(self, u: int) -> list[int]:
        return list(bits(self.adj[u]))

    def degree(self, u: int) -> int:
        return popcount(self.adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in bits(self.active) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    def num_edges(self) -> int:
        return sum(popcount(r) for r in self.adj) // 2

    def min_degree(self) -> int:
        return min((popcount(self.adj[u]) for u in bits(self.active)), default=0)

    def is_connected(self) -> bool:
        if not self.active:
            return True
        start = self.active & -self.active
        seen = frontier = start
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == self.active

    def to_matrix(self):
        import numpy as np

        a = np.zeros((self.order, self.order), dtype=np.uint8)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def key(self) -> bytes:
        """Exact labeled-adjacency bytes, usable as a hash key."""
        width = (self.order + 7) // 8
        return self.active.to_bytes(width, "little") + b"".join(
            r.to_bytes(width, "little") for r in self.adj
        )

    def _check_vertex(self, u: int) -> None:
        if not self.is_active(u):
            raise GraphError(f"vertex {u} is not active in this graph")

    def _check_subset(self, s: int) -> None:
        if s & ~self.active:
            raise GraphError(f"vertex set {sorted(bits(s & ~self.active))} is not active")

    # transformations ------------------------------------------------------

    def local_complement(self, u: int) -> Graph:
        return local_complement(self, u)

    def delete(self, u: int) -> Graph:
        return delete_vertex(self, u)

    def induced(self, s: int | Iterable[int]) -> Graph:
        return induced_subgraph(self, s)

    # export ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.order,
            "active": self.vertices(),
            "edges": [list(e) for e in self.edges()],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> Graph:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_edges(
            int(data["n"]), [tuple(e) for e in data["edges"]], active=data.get("active")
        )

    def __repr__(self) -> str:
        return f"Graph(order={self.order}, active={self.vertices()}, edges={self.edges()})"


def _as_mask(s: int | Iterable[int]) -> int:
    return s if isinstance(s, int) else mask_of(s)


def local_complement(g: Graph, u: int) -> Graph:
    """Return G*u: complement the subgraph induced on N(u)."""
    g._check_vertex(u)
    nu = g.adj[u]
    if popcount(nu) < 2:
        return g
    rows = list(g.adj)
    for v in bits(nu):
        rows[v] ^= nu & ~(1 << v)
    return Graph(g.order, g.active, tuple(rows))


def delete_vertex(g: Graph, u: int) -> Graph:
    g._check_vertex(u)
    rows = list(g.adj)
    clear = ~(1 << u)
    for v in bits(rows[u]):
        rows[v] &= clear
    rows[u] = 0
    return Graph(g.order, g.active & clear, tuple(rows))


def induced_subgraph(g: Graph, s: int | Iterable[int]) -> Graph:
    s = _as_mask(s)
    g._check_subset(s)
    rows = tuple(r & s if s >> v & 1 else 0 for v, r in enumerate(g.adj))
    return Graph(g.order, s, rows)


def odd_neighborhood(g: Graph, d: int | Iterable[int]) -> int:
    """Bitset of vertices with an odd number of neighbours in ``d``."""
    d = _as_mask(d)
    g._check_subset(d)
    odd = 0
    for v in bits(d):
        odd ^= g.adj[v]
    return odd


# named families -------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def wheel10() -> Graph:
    """Ten-cycle plus the five long diagonals i -- i+5 (cubic, 10 vertices)."""
    edges = [(i, (i + 1) % 10) for i in range(10)] + [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, edges)


def petersen() -> Graph:
    """Inner pentagram on 0..4, outer pentagon on 5..9, spokes i -- i+5."""
    inner = [(0, 3), (3, 1), (1, 4), (4, 2), (2, 0)]
    outer = [(5 + i, 5 + (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, inner + outer + spokes)


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def paley_graph(q: int) -> Graph:
    if not (_is_prime(q) and q % 4 == 1):
        raise GraphError(f"Paley graph needs a prime q = 1 mod 4, got {q}")
    squares = {(x * x) % q for x in range(1, q)}
    return Graph.from_edges(
        q, [(i, j) for i, j in combinations(range(q), 2) if (j - i) % q in squares]
    )


def make_named(name: str) -> Graph:
    """Resolve a registry name: ``k2``, ``k3``, ``complete:n``, ``cycle:n``,
    ``path:n``, ``wheel10``, ``petersen``, ``paley:q``."""
    family, _, arg = name.strip().lower().partition(":")
    if family in ("wheel10", "wheel"):
        return wheel10()
    if family == "petersen":
        return petersen()
    if family.startswith("k") and family[1:].isdigit():
        return complete_graph(int(family[1:]))
    if family.startswith("c") and family[1:].isdigit():
        return cycle_graph(int(family[1:]))
    builders = {
        "complete": complete_graph,
        "cycle": cycle_graph,
        "path": path_graph,
        "paley": paley_graph,
    }
    if family not in builders or not arg.isdigit():
        raise GraphError(f"unknown named graph {name!r}")
    return builders[family](int(arg))


# matchings ------------------------------------------------------------------


def count_matchings(n: int, k: int) -> int:
    """Number of matchings of size ``k`` on ``n`` labeled vertices."""
    if k < 0 or 2 * k > n:
        raise GraphError(f"no matching of size {k} on {n} vertices")
    return math.factorial(n) // (math.factorial(k) * math.factorial(n - 2 * k) * 2**k)


def enumerate_matchings(
    s: int | Iterable[int], k: int
) -> Iterator[tuple[tuple[int, int], ...]]:
    """Yield every set of ``k`` disjoint pairs drawn from ``s``, each exactly once.

    Pairs are ``(a, b)`` with ``a < b`` and listed in increasing order of ``a``.
    """
    verts = list(bits(_as_mask(s)))
    if k < 0 or 2 * k > len(verts):
        raise GraphError(f"no matching of size {k} on {len(verts)} vertices")

    def rec(avail: list[int], need: int) -> Iterator[tuple[tuple[int, int], ...]]:
        if need == 0:
            yield ()
            return
        # the smallest vertex is either skipped or paired
        for i in range(len(avail) - 2 * need + 1):
            a = avail[i]
            rest = avail[i + 1 :]
            for j, b in enumerate(rest):
                for tail in rec(rest[:j] + rest[j + 1 :], need - 1):
                    yield ((a, b),) + tail

    yield from rec(verts, k)


def enumerate_perfect_matchings(vertices: Iterable[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    verts = sorted(vertices)
    if len(verts) % 2:
        return
    yield from enumerate_matchings(mask_of(verts), len(verts) // 2)


def matching_graph(order: int, pairs: Iterable[tuple[int, int]], on: int | Iterable[int] | None = None) -> Graph:
    """Graph on ``on`` (default: the paired vertices) whose edges are ``pairs``."""
    pairs = list(pairs)
    support = mask_of(v for p in pairs for v in p)
    act = support if on is None else _as_mask(on)
    return Graph.from_edges(order, pairs, active=act)
