"""Brute-force ground truth for homomorphism indistinguishability.

Two graphs G and H are homomorphism indistinguishable over a class of
graphs when hom(F, G) = hom(F, H) for every member F of the class.  The
closure engine decides this through linear algebra over prime fields; this
module decides it the slow, obviously-correct way instead: enumerate every
member graph up to a size cutoff, count homomorphisms one by one, and
compare.  Every verdict the engine produces at desk scale is validated
against these oracles, so nothing here may depend on the engine.

The size cutoff is an honest truncation: agreement up to the cutoff is
evidence, not proof, except for the paths class where a finite check is
complete — hom(P_{l+1}, G) is the number of length-l walks in G, walk
counts satisfy a linear recurrence of order |V(G)| (Cayley-Hamilton on the
adjacency matrix), and two sequences that each satisfy a recurrence of
order at most n and agree on the first 2n terms agree everywhere.

Enumeration of non-isomorphic graphs is incremental edge addition with
exhaustive isomorphism rejection — fine up to 7 vertices, no external
graph catalogs involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graphs import (
    Graph,
    adjacency_sets,
    hom_count,
    is_connected,
    is_isomorphic_small,
    path_graph,
    walk_counts,
)
from .decomp import exact_pathwidth_tiny, exact_treewidth_tiny
from .labelled import LabelledGraph

__all__ = [
    "OracleVerdict",
    "ClassSpec",
    "parse_class_spec",
    "enumerate_graphs",
    "enumerate_graphs_up_to",
    "class_members",
    "homind_bruteforce",
    "homind_size_bruteforce",
    "paths_oracle",
    "hom_tensor",
    "is_path_graph",
]


# ------------------------------------------------------------ enumeration


_ENUMERATION_CAP = 7


def _invariant_key(g: Graph) -> tuple:
    """Cheap isomorphism invariant used to bucket candidates."""
    adj = adjacency_sets(g)
    degs = [len(a) for a in adj]
    neigh_profile = sorted(
        (degs[v], tuple(sorted(degs[u] for u in adj[v]))) for v in range(g.n)
    )
    triangles = 0
    for (u, v) in g.edges:
        triangles += len(adj[u] & adj[v])
    return (g.n, len(g.edges), tuple(neigh_profile), triangles)


@lru_cache(maxsize=None)
def enumerate_graphs(n: int) -> tuple:
    """All simple graphs on exactly n vertices, one per isomorphism class.

    Ordered by edge count (then discovery order), so the empty graph comes
    first and K_n last.  Supported up to 7 vertices.
    """
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    if n > _ENUMERATION_CAP:
        raise ValueError(
            "graph enumeration supported up to %d vertices, got %d"
            % (_ENUMERATION_CAP, n)
        )
    empty_graph = Graph(n, ())
    result = [empty_graph]
    current = [empty_graph]
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    while current:
        buckets: dict = {}
        level: list = []
        for g in current:
            present = set(g.edges)
            for (u, v) in all_pairs:
                if (u, v) in present:
                    continue
                cand = Graph(n, tuple(sorted(present | {(u, v)})))
                key = _invariant_key(cand)
                bucket = buckets.setdefault(key, [])
                if any(is_isomorphic_small(cand, other) for other in bucket):
                    continue
                bucket.append(cand)
                level.append(cand)
        result.extend(level)
        current = level
    return tuple(result)


def enumerate_graphs_up_to(max_size: int) -> list:
    """Non-isomorphic graphs on 1..max_size vertices, smallest first."""
    graphs = []
    for n in range(1, max_size + 1):
        graphs.extend(enumerate_graphs(n))
    return graphs


# ------------------------------------------------------------ class specs


@dataclass(frozen=True)
class ClassSpec:
    """A graph class the oracle can enumerate.

    kind: one of "all", "tw", "pw", "paths", "lasserre", "automaton"
    param: the width bound (tw/pw), the level t (lasserre), or the
           automaton-with-arity pair (automaton); None otherwise.
    """

    kind: str
    param: object = None


def parse_class_spec(spec) -> ClassSpec:
    """Accepts a ClassSpec, or a string like "all", "tw<=1", "tw:1",
    "pw<=2", "paths", "lasserre-t1"."""
    if isinstance(spec, ClassSpec):
        return spec
    if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "automaton":
        return ClassSpec("automaton", spec[1])
    if not isinstance(spec, str):
        raise ValueError("unrecognized class spec: %r" % (spec,))
    text = spec.strip().lower()
    if text == "all":
        return ClassSpec("all")
    if text == "paths":
        return ClassSpec("paths")
    for prefix in ("tw", "pw"):
        for sep in ("<=", ":"):
            if text.startswith(prefix + sep):
                return ClassSpec(prefix, int(text[len(prefix) + len(sep):]))
    if text.startswith("lasserre-t"):
        return ClassSpec("lasserre", int(text[len("lasserre-t"):]))
    raise ValueError("unrecognized class spec: %r" % (spec,))


def is_path_graph(g: Graph) -> bool:
    """True when g is a path P_n (n >= 1): connected, acyclic, max degree 2."""
    if g.n == 0:
        return False
    if len(g.edges) != g.n - 1:
        return False
    degs = [0] * g.n
    for (u, v) in g.edges:
        degs[u] += 1
        degs[v] += 1
    if any(d > 2 for d in degs):
        return False
    return is_connected(g)


def _dedup_isomorphic(graphs) -> list:
    buckets: dict = {}
    out = []
    for g in graphs:
        key = _invariant_key(g)
        bucket = buckets.setdefault(key, [])
        if any(is_isomorphic_small(g, other) for other in bucket):
            continue
        bucket.append(g)
        out.append(g)
    return out


def class_members(spec, max_size: int) -> list:
    """All non-isomorphic members of the class with at most max_size
    vertices, ordered by vertex count then edge count."""
    cs = parse_class_spec(spec)
    if max_size <= 0:
        return []
    if cs.kind == "all":
        return enumerate_graphs_up_to(max_size)
    if cs.kind == "paths":
        return [path_graph(n) for n in range(1, max_size + 1)]
    if cs.kind in ("tw", "pw"):
        measure = exact_treewidth_tiny if cs.kind == "tw" else exact_pathwidth_tiny
        out = []
        for g in enumerate_graphs_up_to(max_size):
            if measure(g) <= cs.param:
                out.append(g)
        return out
    if cs.kind == "lasserre":
        from .labelled import enumerate_lasserre

        graphs = enumerate_lasserre(cs.param, max_size, max_size)
        members = _dedup_isomorphic(sorted(graphs, key=lambda g: (g.n, len(g.edges))))
        return members
    if cs.kind == "automaton":
        from .recognizer import accepted_value_graphs

        aut = cs.param
        graphs = accepted_value_graphs(aut, max_size)
        return _dedup_isomorphic(sorted(graphs, key=lambda g: (g.n, len(g.edges))))
    raise ValueError("unrecognized class spec kind: %r" % (cs.kind,))


# ------------------------------------------------------------ verdicts


@dataclass(frozen=True)
class OracleVerdict:
    """Outcome of a brute-force comparison.

    indistinguishable: no member graph separated the counts
    witness: the first member with differing counts, or None
    counts: the differing (count_G, count_H) pair at the witness, or None
    family_size: how many member graphs were compared
    """

    indistinguishable: bool
    witness: Graph | None
    counts: tuple | None
    family_size: int

    def __bool__(self) -> bool:
        return self.indistinguishable


def homind_bruteforce(
    G: Graph,
    H: Graph,
    class_spec,
    max_size: int,
    modulus: int | None = None,
    budget: int = 10 ** 8,
) -> OracleVerdict:
    """Compare hom(F, G) against hom(F, H) for every class member F with at
    most max_size vertices; exact counts, or residues mod modulus.

    Returns the first witness in enumeration order on failure.  Raises
    OracleBudgetExceeded (from the homomorphism counter) if the total
    work breaches the budget.
    """
    members = class_members(class_spec, max_size)
    for index, F in enumerate(members):
        a = hom_count(F, G, budget=budget)
        b = hom_count(F, H, budget=budget)
        if modulus is not None:
            a %= modulus
            b %= modulus
        if a != b:
            return OracleVerdict(False, F, (a, b), index + 1)
    return OracleVerdict(True, None, None, len(members))


def homind_size_bruteforce(G: Graph, H: Graph, k: int) -> OracleVerdict:
    """Indistinguishability over all graphs with at most k vertices, k <= 5.

    At k = 1 the only member is K_1, so the verdict is exactly
    |V(G)| = |V(H)|.
    """
    if k > 5:
        raise ValueError("homind_size_bruteforce supports k <= 5, got %d" % k)
    if k < 1:
        raise ValueError("homind_size_bruteforce requires k >= 1")
    return homind_bruteforce(G, H, "all", k)


def paths_oracle(G: Graph, H: Graph, modulus: int | None = None) -> bool:
    """Indistinguishability over ALL paths (complete, not truncated).

    hom(P_{l+1}, X) is the number of length-l walks in X.  Both walk-count
    sequences satisfy linear recurrences of order at most n = max(|V(G)|,
    |V(H)|), so agreement at l = 0..2n-1 forces agreement everywhere.
    """
    n = max(G.n, H.n)
    if n == 0:
        return True
    wg = walk_counts(G, 2 * n - 1)
    wh = walk_counts(H, 2 * n - 1)
    if modulus is not None:
        wg = [x % modulus for x in wg]
        wh = [x % modulus for x in wh]
    return wg == wh


# ------------------------------------------------------------ hom tensors


def _count_homs_with_pins(F: Graph, G: Graph, pins: dict) -> int:
    """Number of homomorphisms F -> G extending the partial map `pins`."""
    adj_f = adjacency_sets(F)
    adj_g = adjacency_sets(G)
    for u, img in pins.items():
        for w in adj_f[u]:
            if w in pins and pins[w] not in adj_g[img]:
                return 0
    free = [v for v in range(F.n) if v not in pins]
    if not free:
        return 1
    # visit free vertices so that each has as many already-placed
    # neighbors as possible (pinned vertices count as placed)
    order = []
    placed = set(pins)
    remaining = set(free)
    while remaining:
        best = max(
            remaining,
            key=lambda v: (len(adj_f[v] & placed), len(adj_f[v])),
        )
        order.append(best)
        placed.add(best)
        remaining.discard(best)

    assignment = dict(pins)
    count = 0
    pos = 0
    choices = [0] * len(order)
    if G.n == 0:
        return 0
    while pos >= 0:
        if pos == len(order):
            count += 1
            pos -= 1
            continue
        v = order[pos]
        start = choices[pos]
        found = False
        for img in range(start, G.n):
            ok = True
            for w in adj_f[v]:
                if w in assignment and assignment[w] not in adj_g[img]:
                    ok = False
                    break
            if ok:
                assignment[v] = img
                choices[pos] = img + 1
                found = True
                break
        if found:
            pos += 1
            if pos < len(order):
                choices[pos] = 0
        else:
            choices[pos] = 0
            assignment.pop(v, None)
            pos -= 1
    return count


def hom_tensor(F: LabelledGraph, G: Graph, modulus: int | None = None) -> np.ndarray:
    """The homomorphism tensor of a labelled graph F in G.

    Entry [v_1, ..., v_r] (r = number of in-labels plus out-labels, axes in
    that order) counts homomorphisms of F's underlying graph into G that
    send the i-th label vertex to v_i.  Coincident label vertices make the
    tensor supported on the corresponding diagonal.  Entries are exact
    Python integers, or residues when modulus is given.
    """
    label_vertices = list(F.in_labels) + list(F.out_labels)
    r = len(label_vertices)
    shape = (G.n,) * r
    tensor = np.zeros(shape, dtype=object)
    for targets in itertools.product(range(G.n), repeat=r):
        pins: dict = {}
        consistent = True
        for vertex, img in zip(label_vertices, targets):
            if pins.get(vertex, img) != img:
                consistent = False
                break
            pins[vertex] = img
        if not consistent:
            continue
        value = _count_homs_with_pins(F.graph, G, pins)
        if modulus is not None:
            value %= modulus
        tensor[targets] = value
    return tensor
