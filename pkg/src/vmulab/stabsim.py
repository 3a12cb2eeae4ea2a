"""Stabilizer tableaux for graph states and replay of CLOCC certificates.

A Pauli operator is stored as two bitsets (``x``, ``z``) and a sign bit, with
``(1, 1)`` meaning ``Y`` so every stored operator is Hermitian. Qubit ``q`` is
vertex ``q`` of the source graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import Graph, bits, delete_vertex, local_complement, mask_of, popcount


class StabilizerError(ValueError):
    pass


@dataclass(frozen=True)
class PauliOperator:
    x: int
    z: int
    sign: int = 0  # 0 for +1, 1 for -1

    @property
    def support(self) -> int:
        return self.x | self.z

    def is_identity(self) -> bool:
        return not (self.x or self.z) and not self.sign

    def commutes(self, other: PauliOperator) -> bool:
        return not popcount((self.x & other.z) ^ (self.z & other.x)) & 1

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        e = _phase_exponent(self.x, self.z, other.x, other.z)
        if e & 1:
            raise StabilizerError("product of anticommuting Paulis is not Hermitian")
        sign = (self.sign + other.sign + e // 2) & 1
        return PauliOperator(self.x ^ other.x, self.z ^ other.z, sign)

    def negate(self) -> PauliOperator:
        return PauliOperator(self.x, self.z, self.sign ^ 1)

    def to_string(self, n: int) -> str:
        chars = []
        for q in range(n):
            xb, zb = self.x >> q & 1, self.z >> q & 1
            chars.append("IXZY"[xb | zb << 1])
        return ("-" if self.sign else "+") + "".join(chars)

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        sign = 0
        if text[0] in "+-":
            sign = text[0] == "-"
            text = text[1:]
        x = z = 0
        for q, c in enumerate(text):
            if c in "XY":
                x |= 1 << q
            if c in "ZY":
                z |= 1 << q
            if c not in "IXYZ_":
                raise StabilizerError(f"bad Pauli letter {c!r}")
        return cls(x, z, int(sign))


def _phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of i picked up by P(x1,z1) P(x2,z2), summed over qubits (mod 4)."""
    y1 = x1 & z1
    xo = x1 & ~z1
    zo = z1 & ~x1
    pos = (y1 & z2 & ~x2) | (xo & z2 & x2) | (zo & x2 & ~z2)
    neg = (y1 & x2 & ~z2) | (xo & z2 & ~x2) | (zo & x2 & z2)
    return (popcount(pos) - popcount(neg)) & 3


def pauli_x(q: int) -> PauliOperator:
    return PauliOperator(1 << q, 0)


def pauli_z_on(mask: int) -> PauliOperator:
    return PauliOperator(0, mask)


# single-qubit Cliffords by their conjugation action on a row ------------------
# each takes (x, z, sign, q) and returns the updated triple


def _h(x, z, s, q):
    xb, zb = x >> q & 1, z >> q & 1
    s ^= xb & zb
    if xb != zb:
        x ^= 1 << q
        z ^= 1 << q
    return x, z, s


def _s(x, z, s, q):
    xb, zb = x >> q & 1, z >> q & 1
    s ^= xb & zb
    z ^= xb << q
    return x, z, s


def _sdg(x, z, s, q):
    xb, zb = x >> q & 1, z >> q & 1
    s ^= xb & (zb ^ 1)
    z ^= xb << q
    return x, z, s


def _px(x, z, s, q):
    return x, z, s ^ (z >> q & 1)


def _py(x, z, s, q):
    return x, z, s ^ ((x ^ z) >> q & 1)


def _pz(x, z, s, q):
    return x, z, s ^ (x >> q & 1)


def _sqrt_x(x, z, s, q):
    # exp(-i pi/4 X): X -> X, Y -> Z, Z -> -Y
    xb, zb = x >> q & 1, z >> q & 1
    s ^= zb & (xb ^ 1)
    x ^= zb << q
    return x, z, s


GATES = {
    "H": _h,
    "S": _s,
    "SDG": _sdg,
    "X": _px,
    "Y": _py,
    "Z": _pz,
    "SQRT_X": _sqrt_x,  # sqrt(-iX) up to phase
    "SQRT_Z": _sdg,  # sqrt(iZ) up to phase
}


def _clifford_words() -> list[tuple[str, ...]]:
    """One H/S word per element of the 24-element single-qubit Clifford group
    (modulo phase), found by BFS on the action on (X, Z)."""
    start = ((1, 0, 0), (0, 1, 0))

    def act(word):
        out = []
        for x, z, s in start:
            for g in word:
                x, z, s = GATES[g](x, z, s, 0)
            out.append((x, z, s))
        return tuple(out)

    seen = {act(()): ()}
    frontier = [()]
    while frontier:
        nxt = []
        for w in frontier:
            for g in ("H", "S"):
                w2 = w + (g,)
                a = act(w2)
                if a not in seen:
                    seen[a] = w2
                    nxt.append(w2)
        frontier = nxt
    return sorted(seen.values(), key=lambda w: (len(w), w))


CLIFFORD_WORDS = _clifford_words()


# tableau ----------------------------------------------------------------------


@dataclass
class Tableau:
    """Stabilizer generators of a pure state on ``n`` qubits.

    Mutated in place by gates and measurements. ``log`` records every
    operation as ``(name, qubit)`` and ``outcomes`` the measurement results.
    """

    n: int
    xs: list[int]
    zs: list[int]
    signs: list[int]
    outcomes: dict[int, int] = field(default_factory=dict)
    log: list[tuple[str, int]] = field(default_factory=list)
    _basis: list | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_paulis(cls, n: int, paulis: Iterable[PauliOperator]) -> Tableau:
        ps = list(paulis)
        return cls(n, [p.x for p in ps], [p.z for p in ps], [p.sign for p in ps])

    def copy(self) -> Tableau:
        return Tableau(self.n, list(self.xs), list(self.zs), list(self.signs), dict(self.outcomes), list(self.log))

    def generators(self) -> list[PauliOperator]:
        return [PauliOperator(x, z, s) for x, z, s in zip(self.xs, self.zs, self.signs)]

    def __len__(self) -> int:
        return len(self.xs)

    def strings(self) -> list[str]:
        return [p.to_string(self.n) for p in self.generators()]

    # gates

    def apply(self, gate: str, q: int) -> Tableau:
        fn = GATES[gate]
        self._basis = None
        xs, zs, ss = self.xs, self.zs, self.signs
        for i in range(len(xs)):
            xs[i], zs[i], ss[i] = fn(xs[i], zs[i], ss[i], q)
        self.log.append((gate, q))
        return self

    def apply_clifford_word(self, word: Iterable[str], q: int) -> Tableau:
        for g in word:
            self.apply(g, q)
        return self

    def apply_z_mask(self, mask: int) -> Tableau:
        for q in bits(mask):
            self.apply("Z", q)
        return self

    # algebra

    def commute_check(self) -> bool:
        gens = self.generators()
        return all(a.commutes(b) for i, a in enumerate(gens) for b in gens[i + 1 :])

    def rank(self) -> int:
        return len(_echelon([PauliOperator(x, z, 0) for x, z in zip(self.xs, self.zs)], self.n, 0)[0])

    def contains(self, p: PauliOperator) -> bool:
        """Whether ``p``, sign included, lies in the stabilizer group."""
        found = self.express(p)
        return found is not None and found.sign == p.sign

    def express(self, p: PauliOperator) -> PauliOperator | None:
        """Group element with the same X/Z pattern as ``p``, or None."""
        if self._basis is None:
            self._basis = _echelon(self.generators(), self.n, 0)[0]
        basis = self._basis
        vec = _vec(p, self.n, 0)
        acc = PauliOperator(0, 0, 0)
        for lead, row in basis:
            if vec >> lead & 1:
                vec ^= _vec(row, self.n, 0)
                acc = acc * row
        if vec:
            return None
        return acc

    def restricted(self, on: int) -> list[PauliOperator]:
        """Generators of the subgroup of elements supported inside ``on``."""
        outside = ((1 << self.n) - 1) & ~on
        basis, _ = _echelon(self.generators(), self.n, outside)
        return [row for lead, row in basis if not row.support & outside]

    # measurement

    def measure_z(
        self,
        q: int,
        forced_outcome: int | None = None,
        rng: np.random.Generator | None = None,
    ) -> int:
        """Measure qubit ``q`` in the Z basis; returns the outcome bit."""
        if q in self.outcomes:
            raise StabilizerError(f"qubit {q} was already measured")
        if not 0 <= q < self.n:
            raise StabilizerError(f"qubit {q} out of range")
        self.log.append(("MZ", q))
        self._basis = None
        anti = [i for i in range(len(self.xs)) if self.xs[i] >> q & 1]
        if not anti:
            elem = self.express(PauliOperator(0, 1 << q))
            outcome = elem.sign if elem is not None else None
            if outcome is None:
                raise StabilizerError("tableau is not a full stabilizer group")
            if forced_outcome is not None and forced_outcome != outcome:
                raise StabilizerError(f"outcome {forced_outcome} has probability zero")
            self.outcomes[q] = outcome
            return outcome
        piv = anti[0]
        prow = PauliOperator(self.xs[piv], self.zs[piv], self.signs[piv])
        for i in anti[1:]:
            r = PauliOperator(self.xs[i], self.zs[i], self.signs[i]) * prow
            self.xs[i], self.zs[i], self.signs[i] = r.x, r.z, r.sign
        if forced_outcome is None:
            rng = rng if rng is not None else np.random.default_rng()
            outcome = int(rng.integers(2))
        else:
            outcome = int(forced_outcome) & 1
        self.xs[piv], self.zs[piv], self.signs[piv] = 0, 1 << q, outcome
        self.outcomes[q] = outcome
        return outcome

    def apply_lc_clifford(self, u: int, neighbors: int | Iterable[int] | None = None) -> Tableau:
        return apply_lc_clifford(self, u, neighbors)

    def to_graph(self) -> tuple[Graph, dict[int, int]] | None:
        """Read off ``(graph, signs)`` when the group has generators
        ``+-X_u Z_{N(u)}`` for every qubit; None otherwise."""
        n = self.n
        basis, rank = _echelon(self.generators(), n, 0, x_first=True)
        if rank != n or any(lead < n for lead, _ in basis):
            return None
        # fully reduced with every X column a pivot: each row has X part {u}
        adj = [0] * n
        signs = {}
        for lead, r in basis:
            u = lead - n
            if r.z >> u & 1:
                return None
            adj[u] = r.z
            signs[u] = r.sign
        if any((adj[a] >> b & 1) != (adj[b] >> a & 1) for a in range(n) for b in range(n)):
            return None
        return Graph(n, (1 << n) - 1, tuple(adj)), signs


def _vec(p: PauliOperator, n: int, outside: int, x_first: bool = False) -> int:
    """Pack a Pauli into an int whose high bits are the ``outside`` columns."""
    inside = ((1 << n) - 1) & ~outside
    # layout: [outside x | outside z | inside x | inside z]
    lo_x = p.x & inside
    lo_z = p.z & inside
    hi_x = p.x & outside
    hi_z = p.z & outside
    if x_first:
        return (p.x << n) | p.z
    return (hi_x << (3 * n)) | (hi_z << (2 * n)) | (lo_x << n) | lo_z


def _echelon(
    gens: list[PauliOperator], n: int, outside: int, x_first: bool = False
) -> tuple[list[tuple[int, PauliOperator]], int]:
    """Row-reduce generators (with exact signs) on the packed layout.

    Returns ``[(leading bit, row), ...]`` with distinct leading bits, fully
    reduced so each leading bit appears in exactly one row.
    """
    rows = [(g, _vec(g, n, outside, x_first)) for g in gens]
    basis: list[tuple[int, PauliOperator, int]] = []
    for g, v in rows:
        for lead, b, bv in basis:
            if v >> lead & 1:
                v ^= bv
                g = g * b
        if v:
            lead = v.bit_length() - 1
            # keep the basis reduced
            for i, (l2, b2, bv2) in enumerate(basis):
                if bv2 >> lead & 1:
                    basis[i] = (l2, b2 * g, bv2 ^ v)
            basis.append((lead, g, v))
    basis.sort(key=lambda t: -t[0])
    return [(lead, g) for lead, g, _ in basis], len(basis)


def measure_z(
    t: Tableau, q: int, forced_outcome: int | None = None, rng: np.random.Generator | None = None
) -> tuple[int, Tableau]:
    return t.measure_z(q, forced_outcome, rng), t


def graph_state_tableau(g: Graph) -> Tableau:
    """Generators ``X_u Z_{N(u)}`` for every active ``u`` (inactive qubits get ``Z``)."""
    paulis = []
    for u in range(g.order):
        if g.active >> u & 1:
            paulis.append(PauliOperator(1 << u, g.adj[u]))
        else:
            paulis.append(PauliOperator(0, 1 << u))
    return Tableau.from_paulis(g.order, paulis)


def apply_lc_clifford(t: Tableau, u: int, neighbors: int | Iterable[int] | None = None) -> Tableau:
    """Conjugate by ``sqrt(-iX)`` on ``u`` and ``sqrt(iZ)`` on each neighbour.

    This maps the stabilizer group of ``|G>`` onto that of ``|G*u>``, signs
    included. Without ``neighbors`` the tableau must be in graph form.
    """
    if neighbors is None:
        form = t.to_graph()
        if form is None:
            raise StabilizerError("tableau is not a graph state; pass the neighbourhood explicitly")
        neighbors = form[0].adj[u]
    elif not isinstance(neighbors, int):
        neighbors = mask_of(neighbors)
    t._basis = None
    xs, zs, ss = t.xs, t.zs, t.signs
    ub = 1 << u
    for i in range(len(xs)):
        x, z, s = xs[i], zs[i], ss[i]
        # sqrt(iZ) on the neighbourhood: X -> -Y, Y -> X
        s ^= popcount(x & ~z & neighbors) & 1
        z ^= x & neighbors
        # sqrt(-iX) on u: Z -> -Y, Y -> Z
        s ^= (z & ~x & ub) >> u
        x ^= z & ub
        xs[i], zs[i], ss[i] = x, z, s
    t.log.append(("SQRT_X", u))
    t.log.extend(("SQRT_Z", v) for v in bits(neighbors))
    return t


def stabilizer_group_equal(a: Tableau, b: Tableau, on: int | Iterable[int] | None = None) -> bool:
    """Equality, signs included, of the subgroups supported inside ``on``."""
    if a.n != b.n:
        raise StabilizerError("tableaux are over different qubit counts")
    if on is None:
        on = (1 << a.n) - 1
    elif not isinstance(on, int):
        on = mask_of(on)
    ra, rb = a.restricted(on), b.restricted(on)
    if len(ra) != len(rb):
        return False
    return all(b.contains(p) for p in ra)


# protocol replay ----------------------------------------------------------------


@dataclass
class ProtocolRun:
    source: Graph
    certificate: object
    outcomes: dict[int, int]
    tableau: Tableau
    verdict: bool
    touched: set[int]
    missing: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.to_json(),
            "outcomes": {str(k): v for k, v in sorted(self.outcomes.items())},
            "verdict": self.verdict,
            "missing": self.missing,
            "final_generators": self.tableau.strings(),
        }


def _validate(g: Graph, cert) -> None:
    for u in cert.lc:
        if not g.is_active(u):
            raise StabilizerError(f"certificate applies LC at inactive vertex {u}")
    tv = mask_of(cert.target_vertices)
    dv = mask_of(cert.delete)
    if tv & ~g.active or dv & ~g.active:
        raise StabilizerError("certificate mentions inactive vertices")
    if tv & dv or (tv | dv) != g.active:
        raise StabilizerError("deletions and targets must partition the active vertices")


def _deletion_corrections(
    t: Tableau, graph: Graph, delete: Iterable[int], rng, forced: dict[int, int] | None
) -> tuple[Graph, int]:
    """Measure each deleted vertex in Z; return the graph left and the
    accumulated Z-correction mask ``xor of N(u)`` over outcomes ``s_u = 1``."""
    corr = 0
    for d in sorted(delete):
        s = t.measure_z(d, forced_outcome=(forced or {}).get(d), rng=rng)
        if s:
            corr ^= graph.adj[d]
        graph = delete_vertex(graph, d)
    return graph, corr


def run_certificate_protocol(
    g: Graph,
    cert,
    seed: int | None = None,
    forced_outcomes: dict[int, int] | None = None,
) -> ProtocolRun:
    """Replay a certificate on the graph state: LC Cliffords, Z measurements of
    deleted qubits, then outcome-dependent Z corrections on the targets.

    The verdict is true iff every generator of the target graph state, with
    sign ``+``, is in the final stabilizer group.
    """
    _validate(g, cert)
    rng = np.random.default_rng(seed)
    t = graph_state_tableau(g)
    cur = g
    for u in cert.lc:
        apply_lc_clifford(t, u, cur.adj[u])
        cur = local_complement(cur, u)
    cur, corr = _deletion_corrections(t, cur, cert.delete, rng, forced_outcomes)
    target = mask_of(cert.target_vertices)
    t.apply_z_mask(corr & target)
    h = cert.target_graph(g.order)
    missing = []
    for a in cert.target_vertices:
        p = PauliOperator(1 << a, h.adj[a])
        if not t.contains(p):
            missing.append(p.to_string(g.order))
    touched = {q for _, q in t.log}
    return ProtocolRun(g, cert, dict(t.outcomes), t, not missing, touched, missing)


def run_robust_protocol(
    g: Graph,
    malicious: int | Iterable[int],
    matching: Iterable[tuple[int, int]],
    cert,
    adversary_seed: int | None = None,
    seed: int | None = None,
    strict: bool = True,
) -> ProtocolRun:
    """Create EPR pairs on ``matching`` without any operation on ``malicious``.

    ``cert`` must induce the matching on ``K | M`` with ``M`` isolated. Only
    the factors of each LC Clifford acting outside ``M`` are applied; the
    vertices of ``V - (K | M)`` are measured and their outcomes drive Z
    corrections on ``K``. Finally ``H`` on the second vertex of each pair turns
    each graph-state edge into ``(|00> + |11>)/sqrt 2``; the verdict checks
    ``+X_aX_b`` and ``+Z_aZ_b``.

    With ``adversary_seed`` a uniformly random single-qubit Clifford is applied
    to each qubit of ``M`` first. ``strict`` (the default) rejects
    certificates with an LC at a vertex of ``M``; with ``strict=False`` such an
    LC contributes only its neighbour factors outside ``M``, which is the
    per-qubit split of the total local Clifford.
    """
    M = malicious if isinstance(malicious, int) else mask_of(malicious)
    pairs = [tuple(sorted(p)) for p in matching]
    K = mask_of(v for p in pairs for v in p)
    if K & M:
        raise StabilizerError("matching must avoid the malicious set")
    _validate(g, cert)
    if mask_of(cert.target_vertices) != K | M:
        raise StabilizerError("certificate must target K | M")
    h = cert.target_graph(g.order)
    want = Graph.from_edges(g.order, pairs, active=K | M)
    if h != want:
        raise StabilizerError("certificate target is not the matching with M isolated")
    if strict and any(M >> u & 1 for u in cert.lc):
        raise StabilizerError("certificate applies an LC inside the malicious set")

    rng = np.random.default_rng(seed)
    t = graph_state_tableau(g)
    if adversary_seed is not None:
        arng = np.random.default_rng(adversary_seed)
        for q in bits(M):
            t.apply_clifford_word(CLIFFORD_WORDS[int(arng.integers(len(CLIFFORD_WORDS)))], q)
    start = len(t.log)

    cur = g
    for u in cert.lc:
        nb = cur.adj[u] & ~M
        if M >> u & 1:
            # only the neighbour factors lie outside M
            for v in bits(nb):
                t.apply("SQRT_Z", v)
        else:
            apply_lc_clifford(t, u, nb)
        cur = local_complement(cur, u)
    cur, corr = _deletion_corrections(t, cur, bits(g.active & ~(K | M)), rng, None)
    t.apply_z_mask(corr & K)
    for a, b in pairs:
        t.apply("H", b)
    missing = []
    for a, b in pairs:
        for p in (PauliOperator((1 << a) | (1 << b), 0), PauliOperator(0, (1 << a) | (1 << b))):
            if not t.contains(p):
                missing.append(p.to_string(g.order))
    touched = {q for _, q in t.log[start:]}
    run = ProtocolRun(g, cert, dict(t.outcomes), t, not missing and not touched & set(bits(M)), touched, missing)
    return run


# dense oracle -----------------------------------------------------------------

ORACLE_MAX_QUBITS = 12

_R = 1 / np.sqrt(2)
GATE_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _R,
    "S": np.diag([1, 1j]),
    "SDG": np.diag([1, -1j]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "SQRT_X": np.array([[1, -1j], [-1j, 1]], dtype=complex) * _R,
    "SQRT_Z": np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)]),
}


def statevector_oracle(g: Graph) -> np.ndarray:
    """Dense graph state ``2**(-m/2) (-1)**|G[x]|`` over the universe.

    Bit ``q`` of the basis index is qubit ``q``; inactive qubits sit in
    ``|0>``, matching the ``Z`` generators of :func:`graph_state_tableau`.
    """
    if g.order > ORACLE_MAX_QUBITS:
        raise StabilizerError(f"dense oracle limited to {ORACLE_MAX_QUBITS} qubits")
    idx = np.arange(1 << g.order)
    parity = np.zeros(len(idx), dtype=np.int64)
    for a, b in g.edges():
        parity ^= (idx >> a) & (idx >> b) & 1
    inactive = ((1 << g.order) - 1) & ~g.active
    amp = np.where(parity, -1.0, 1.0) * 2.0 ** (-g.num_vertices() / 2)
    amp[(idx & inactive) != 0] = 0
    return amp.astype(complex)


def _nqubits(state: np.ndarray) -> int:
    return int(len(state)).bit_length() - 1


def oracle_apply(state: np.ndarray, gate: str | np.ndarray, q: int) -> np.ndarray:
    """Apply a named gate (or a 2x2 matrix) to qubit ``q``; returns a new vector."""
    u = GATE_MATRICES[gate] if isinstance(gate, str) else np.asarray(gate)
    n = _nqubits(state)
    psi = state.reshape(1 << (n - q - 1), 2, 1 << q)
    return np.einsum("ij,ajb->aib", u, psi).reshape(-1)


def oracle_apply_pauli(state: np.ndarray, p: PauliOperator) -> np.ndarray:
    for q in bits(p.x | p.z):
        xb, zb = p.x >> q & 1, p.z >> q & 1
        state = oracle_apply(state, "Y" if xb and zb else ("X" if xb else "Z"), q)
    return -state if p.sign else state


def oracle_measure(state: np.ndarray, q: int, outcome: int) -> tuple[float, np.ndarray]:
    """Probability of ``outcome`` on qubit ``q`` and the normalized post state."""
    idx = np.arange(len(state))
    post = np.where((idx >> q & 1) == outcome, state, 0)
    prob = float(np.vdot(post, post).real)
    if prob > 1e-12:
        post = post / np.sqrt(prob)
    return prob, post


def oracle_stabilizes(state: np.ndarray, p: PauliOperator, tol: float = 1e-9) -> bool:
    return bool(np.linalg.norm(oracle_apply_pauli(state, p) - state) < tol)
