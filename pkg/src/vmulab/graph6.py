"""graph6 text encoding (McKay's format), bit-exact.

Only the active vertices are encoded, relabeled ``0..m-1`` in ascending
order, so the round trip is the identity on graphs whose active set is the
whole universe.
"""

from __future__ import annotations

from .graph import Graph

HEADER = ">>graph6<<"


class Graph6Error(ValueError):
    """Malformed graph6 input; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


def _encode_n(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n < 1 << 36:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise ValueError("graph too large for graph6")


def encode(g: Graph, header: bool = False) -> str:
    verts = g.vertices()
    n = len(verts)
    out = bytearray(_encode_n(n))
    acc = nbits = 0
    for j in range(1, n):
        row = g.adj[verts[j]]
        for i in range(j):
            acc = (acc << 1) | (row >> verts[i] & 1)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    text = out.decode("ascii")
    return HEADER + text if header else text


def _decode_n(data: bytes) -> tuple[int, int]:
    if not data:
        raise Graph6Error("empty input", 0)

    def group(start: int, count: int) -> int:
        if len(data) < start + count:
            raise Graph6Error("truncated vertex count", len(data))
        n = 0
        for i in range(start, start + count):
            c = data[i]
            if not 63 <= c <= 126:
                raise Graph6Error(f"invalid byte {c!r}", i)
            n = (n << 6) | (c - 63)
        return n

    first = data[0]
    if first < 63 or first > 126:
        raise Graph6Error(f"invalid byte {first!r}", 0)
    if first != 126:
        return first - 63, 1
    if len(data) > 1 and data[1] == 126:
        return group(2, 6), 8
    return group(1, 3), 4


def decode(text: str | bytes) -> Graph:
    data = text.encode("ascii") if isinstance(text, str) else bytes(text)
    data = data.strip()
    start = 0
    if data.startswith(HEADER.encode()):
        start = len(HEADER)
    body = data[start:]
    if body[:1] in (b":", b";", b"&"):
        raise Graph6Error("sparse6/digraph6 input is not graph6", start)
    n, pos = _decode_n(body)
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    payload = body[pos:]
    if len(payload) != need:
        raise Graph6Error(f"expected {need} data bytes, found {len(payload)}", start + pos + min(len(payload), need))
    rows = [0] * n
    k = 0
    j, i = 1, 0
    for off, c in enumerate(payload):
        if not 63 <= c <= 126:
            raise Graph6Error(f"invalid byte {c!r}", start + pos + off)
        v = c - 63
        for shift in range(5, -1, -1):
            if k == nbits:
                if v & ((1 << (shift + 1)) - 1):
                    raise Graph6Error("nonzero padding bits", start + pos + off)
                break
            if v >> shift & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
            i += 1
            if i == j:
                j += 1
                i = 0
    return Graph(n, (1 << n) - 1, tuple(rows))


def relabel_contiguous(g: Graph) -> Graph:
    """Copy of ``g`` with active vertices renumbered 0..m-1."""
    verts = g.vertices()
    index = {v: i for i, v in enumerate(verts)}
    return Graph.from_edges(
        len(verts), [(index[u], index[v]) for u, v in g.edges()]
    )


__all__ = ["Graph6Error", "decode", "encode", "relabel_contiguous"]
