"""Syndrome decoding on the constraint graph, and its reversible circuit.

A two-variable parity system maps to a multigraph: variables are vertices,
constraints are edges.  An error vector flips the syndrome bits of the
endpoints of every flipped edge, so recovering an error from a syndrome
means finding an edge subset whose odd-degree vertex set equals the
syndrome support T (a T-join).  Both decoders here pick a T-join built
from precomputed shortest paths: the greedy decoder scans an ordered path
list and takes the first path whose endpoints are still unmatched; the
minimum-length decoder pairs T optimally by exact subset dynamic
programming over the pairwise graph distances.

The greedy scan translates gate-for-gate into a reversible circuit of
CNOT/Toffoli gates over three registers (syndrome, one flag qubit per
path, error), which is what makes it attractive as an in-circuit decoder.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .encoding import XorsatInstance, syndrome
from .errors import CapacityError, ValidationError


@dataclass(frozen=True)
class ConstraintGraph:
    """Multigraph view of a parity system: one vertex per variable, one edge per row.

    ``dedup_class`` sends every edge id to the lowest edge id with the same
    unordered endpoints; only those representatives take part in shortest
    paths, since parallel edges are interchangeable for decoding.
    """

    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]  # (edge_id, u, v), all 1-based
    dedup_class: dict[int, int]


@dataclass(frozen=True)
class PathEntry:
    u: int
    v: int
    edges: tuple[int, ...]  # representative edge ids along the path
    length: int


@dataclass(frozen=True)
class PathList:
    """Ordered shortest paths between all vertex pairs of each component.

    Entries are sorted by (length, smaller endpoint, larger endpoint); the
    retained path per pair is the one with lexicographically smallest
    vertex sequence.  ``dist`` holds the graph distance per unordered pair,
    ``component`` labels connected components, and ``index`` locates the
    entry of a pair within ``entries``.
    """

    entries: tuple[PathEntry, ...]
    dist: dict[tuple[int, int], int]
    component: dict[int, int]
    index: dict[tuple[int, int], int]


@dataclass(frozen=True)
class DecodeOutcome:
    decoded_residual: tuple[int, ...]  # y XOR the chosen T-join
    success: bool  # residual identically zero
    decoded_error: tuple[int, ...]  # the T-join itself


@dataclass(frozen=True)
class GateList:
    n_syndrome: int
    n_path: int
    n_error: int
    gates: tuple[tuple, ...]  # ("CX", ctrl, tgt) or ("CCX", c1, c2, tgt), wires ("v"|"p"|"e", i)


@dataclass(frozen=True)
class GateCost:
    leading_order: int  # path-controlled error-register CX count = sum of all pairwise distances
    ccx: int
    cx: int

    @property
    def total(self) -> int:
        return self.ccx + self.cx


def build_graph(x: XorsatInstance) -> ConstraintGraph:
    """Turn a parity system into its constraint multigraph."""
    edges = []
    rep: dict[tuple[int, int], int] = {}
    dedup: dict[int, int] = {}
    for eid, (a, b) in enumerate(x.rows, start=1):
        if a == b:
            raise ValidationError(f"unsupported instance: row {eid} is not a 2-variable constraint")
        key = (min(a, b), max(a, b))
        edges.append((eid, a, b))
        dedup[eid] = rep.setdefault(key, eid)
    return ConstraintGraph(n_vertices=x.n_vars, edges=tuple(edges), dedup_class=dedup)


def build_path_list(g: ConstraintGraph) -> PathList:
    """BFS all-pairs shortest paths over representative edges.

    Ties between equal-length paths go to the lexicographically smallest
    vertex sequence, which keeps the list platform-independent.  Pairs in
    different components are omitted.
    """
    rep_support: dict[tuple[int, int], int] = {}
    for eid, u, v in g.edges:
        if g.dedup_class[eid] == eid:
            rep_support[(min(u, v), max(u, v))] = eid
    adj: dict[int, list[int]] = {v: [] for v in range(1, g.n_vertices + 1)}
    for u, v in rep_support:
        adj[u].append(v)
        adj[v].append(u)
    for v in adj:
        adj[v].sort()

    component: dict[int, int] = {}
    comp = 0
    for start in range(1, g.n_vertices + 1):
        if start in component:
            continue
        comp += 1
        component[start] = comp
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in component:
                    component[w] = comp
                    queue.append(w)

    dist_from: dict[int, dict[int, int]] = {}
    for source in range(1, g.n_vertices + 1):
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        dist_from[source] = dist

    entries = []
    dist_table: dict[tuple[int, int], int] = {}
    for u in range(1, g.n_vertices + 1):
        for v in range(u + 1, g.n_vertices + 1):
            if component[u] != component[v]:
                continue
            dist_v = dist_from[v]
            dist_table[(u, v)] = dist_v[u]
            # walk from u towards v, always taking the smallest next vertex
            # that still decreases the distance: lexicographically minimal
            # among all shortest vertex sequences
            seq = [u]
            cur = u
            while cur != v:
                cur = min(w for w in adj[cur] if dist_v.get(w, -1) == dist_v[cur] - 1)
                seq.append(cur)
            edge_ids = tuple(
                rep_support[(min(a, b), max(a, b))] for a, b in zip(seq, seq[1:])
            )
            entries.append(PathEntry(u=u, v=v, edges=edge_ids, length=len(edge_ids)))
    entries.sort(key=lambda e: (e.length, e.u, e.v))
    index = {(e.u, e.v): i for i, e in enumerate(entries)}
    return PathList(
        entries=tuple(entries), dist=dist_table, component=component, index=index
    )


def greedy_decode(p: PathList, x: XorsatInstance, y) -> DecodeOutcome:
    """Scan the ordered path list, flipping each path whose endpoints are both unmatched.

    T starts as the syndrome support.  Paths need not be disjoint, so an
    edge may be flipped several times; on a connected component every pair
    of T-vertices eventually appears, so the scan always empties T.
    """
    y = tuple(int(b) for b in y)
    syn = syndrome(x, y)
    t_set = {v for v, bit in enumerate(syn, start=1) if bit}
    residual = list(y)
    for entry in p.entries:
        if entry.u in t_set and entry.v in t_set:
            for eid in entry.edges:
                residual[eid - 1] ^= 1
            t_set.discard(entry.u)
            t_set.discard(entry.v)
    residual_t = tuple(residual)
    return DecodeOutcome(
        decoded_residual=residual_t,
        success=not any(residual_t),
        decoded_error=tuple(a ^ b for a, b in zip(y, residual_t)),
    )


def _min_weight_pairing(verts: tuple[int, ...], dist) -> tuple[tuple[int, int], ...]:
    """Exact minimum-weight perfect matching of an even vertex set.

    Subset dynamic programming, O(2^t * t^2): the lowest unmatched vertex
    is paired with every candidate partner.  Among equal-weight matchings
    the lexicographically smallest pair list wins, which pins the decoder's
    tie-breaking.
    """
    memo: dict[int, tuple[int, tuple[tuple[int, int], ...]]] = {0: (0, ())}

    def solve(mask: int) -> tuple[int, tuple[tuple[int, int], ...]]:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        best = None
        sub_mask = rest
        while sub_mask:
            j = (sub_mask & -sub_mask).bit_length() - 1
            sub_mask ^= 1 << j
            a, b = verts[i], verts[j]
            w_sub, pairs = solve(rest ^ (1 << j))
            cand = (w_sub + dist[(a, b)], ((a, b),) + pairs)
            if best is None or cand < best:
                best = cand
        memo[mask] = best
        return best

    return solve((1 << len(verts)) - 1)[1]


def min_length_decode(
    p: PathList, x: XorsatInstance, y, t_cap: int = 22
) -> DecodeOutcome:
    """Decode via an exact minimum-weight perfect matching of the syndrome set.

    The matched pairs are expanded through the stored shortest paths and
    XORed into an error candidate; decoding succeeds iff that candidate
    equals the true error.  Instances whose syndrome support exceeds
    ``t_cap`` raise CapacityError instead of attempting the 2^|T| search.
    """
    y = tuple(int(b) for b in y)
    syn = syndrome(x, y)
    t_all = [v for v, bit in enumerate(syn, start=1) if bit]
    if len(t_all) > t_cap:
        raise CapacityError(
            f"syndrome support {len(t_all)} exceeds matching capacity {t_cap}"
        )
    groups: dict[int, list[int]] = {}
    for v in t_all:
        groups.setdefault(p.component[v], []).append(v)

    decoded = [0] * x.m
    for comp_verts in groups.values():
        if len(comp_verts) % 2:
            raise ValidationError("odd syndrome parity within a component")
        pairs = _min_weight_pairing(tuple(sorted(comp_verts)), p.dist)
        for a, b in pairs:
            entry = p.entries[p.index[(a, b)]]
            for eid in entry.edges:
                decoded[eid - 1] ^= 1
    decoded_t = tuple(decoded)
    residual = tuple(a ^ b for a, b in zip(y, decoded_t))
    return DecodeOutcome(
        decoded_residual=residual,
        success=not any(residual),
        decoded_error=decoded_t,
    )


DECODERS = {"greedy": greedy_decode, "min-length": min_length_decode}


def emit_circuit(p: PathList, g: ConstraintGraph) -> GateList:
    """Reversible circuit for the greedy scan.

    Per path i with endpoints (u, v): a Toffoli marks the path qubit when
    both syndrome bits are set, then path-controlled CNOTs flip the path's
    error-register bits and clear the two syndrome bits.  A final pass
    re-applies the syndrome CNOTs to restore the syndrome register; the
    path register is left as garbage.
    """
    gates = []
    for i, entry in enumerate(p.entries, start=1):
        pq = ("p", i)
        gates.append(("CCX", ("v", entry.u), ("v", entry.v), pq))
        for eid in entry.edges:
            gates.append(("CX", pq, ("e", eid)))
        gates.append(("CX", pq, ("v", entry.u)))
        gates.append(("CX", pq, ("v", entry.v)))
    for i, entry in enumerate(p.entries, start=1):
        pq = ("p", i)
        gates.append(("CX", pq, ("v", entry.u)))
        gates.append(("CX", pq, ("v", entry.v)))
    return GateList(
        n_syndrome=g.n_vertices,
        n_path=len(p.entries),
        n_error=len(g.edges),
        gates=tuple(gates),
    )


def simulate_circuit(gl: GateList, y, s) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Apply the gate list to classical basis states; returns (syndrome, path, error)."""
    y = [int(b) for b in y]
    s = [int(b) for b in s]
    if len(y) != gl.n_error:
        raise ValidationError(f"error register length {len(y)} != {gl.n_error}")
    if len(s) != gl.n_syndrome:
        raise ValidationError(f"syndrome register length {len(s)} != {gl.n_syndrome}")
    regs = {"v": s, "p": [0] * gl.n_path, "e": y}
    sizes = {"v": gl.n_syndrome, "p": gl.n_path, "e": gl.n_error}

    def read(wire):
        reg, i = wire
        if reg not in sizes or not 1 <= i <= sizes[reg]:
            raise ValidationError(f"malformed circuit: wire {reg}:{i} out of range")
        return regs[reg][i - 1]

    for gate in gl.gates:
        kind, *wires = gate
        if kind == "CX" and len(wires) == 2:
            ctrl, tgt = wires
        elif kind == "CCX" and len(wires) == 3:
            *ctrls, tgt = wires
        else:
            raise ValidationError(f"malformed circuit: bad gate {gate!r}")
        read(tgt)  # range-check the target even when controls are off
        if kind == "CX":
            fire = read(ctrl)
        else:
            fire = read(ctrls[0]) and read(ctrls[1])
        if fire:
            regs[tgt[0]][tgt[1] - 1] ^= 1
    return tuple(regs["v"]), tuple(regs["p"]), tuple(regs["e"])


def gate_cost(p: PathList) -> GateCost:
    """Gate counts of the emitted circuit.

    The leading-order term is the number of path-controlled error-register
    CNOTs, one per edge of every stored path, i.e. the sum of all pairwise
    distances of the completed graph.  Each path additionally costs one
    Toffoli and four syndrome CNOTs (two in the scan, two in the restore
    pass).
    """
    leading = sum(entry.length for entry in p.entries)
    n_paths = len(p.entries)
    return GateCost(leading_order=leading, ccx=n_paths, cx=leading + 4 * n_paths)


def format_circuit(gl: GateList) -> str:
    """Render a gate list in the line-oriented circuit file format."""
    lines = [
        f"REGISTERS syndrome={gl.n_syndrome} path={gl.n_path} error={gl.n_error}"
    ]
    for gate in gl.gates:
        kind, *wires = gate
        lines.append(" ".join([kind] + [f"{reg}:{i}" for reg, i in wires]))
    return "\n".join(lines) + "\n"


def write_circuit(gl: GateList, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_circuit(gl))
