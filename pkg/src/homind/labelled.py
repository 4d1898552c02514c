"""(Bi)labelled graphs, their algebra, terms, and bounded enumerations.

A k-labelled graph is a graph F with a tuple of k (not necessarily distinct)
label vertices; a (k,l)-bilabelled graph carries an in-tuple of k and an
out-tuple of l.  Over a target graph G these objects denote homomorphism
tensors: F_G(x_1..x_k) counts homomorphisms F -> G pinning label i to x_i.
Four operations generate everything the deciders need, and each corresponds
to a tensor operation:

- ``soe``    drop labels             <-> sum of entries,
- ``glue``   merge labels pairwise   <-> entrywise (Schur) product,
- ``series`` out-to-in composition   <-> matrix product,
- ``permute_labels``                 <-> axis permutation.

The generator family B(k) = {J^i} u {A^{ij}} drives the treewidth world:
J^i introduces one fresh vertex and hands it label i (the previously
labelled vertex stays behind unlabelled), A^{ij} adds the edge between the
label-i and label-j vertices.  Terms over {one, glue, A, J} evaluate into
distinctly k-labelled graphs of bounded treewidth; their levelwise
enumeration below reproduces the depth-d classes with the sharp size bound
max{k^d, d} (and k+d-1 for the glue-free pathwidth variant): level 1 holds
the edge-closures of the all-ones graph, and level d+1 glues J^l-images of
level-d members over *distinct* labels l before applying edge operations —
distinctness is what a rooted out-degree-<=-k decomposition forces.

The Lasserre world instead starts from *atomic* (t,t)-bilabelled graphs
(every vertex labelled: a set partition of the 2t label slots plus an edge
set on the quotient) and closes under series composition, gluing with
atomics, and label permutations, with depth counted only along series.

Gluing graphs whose labels coincide can demand a self-loop (for example the
merged single-vertex atomic glued onto the edge atomic).  Over simple
targets such a value has an identically-zero tensor, so these values never
distinguish anything; the operations raise ``LoopCreated`` and enumerators
skip them.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .graphs import Graph, adjacency_sets, empty_graph


class LoopCreated(ValueError):
    """Label identification forced a self-loop; the value's tensor is 0."""


class ArityMismatch(ValueError):
    pass


# === LabelledGraph ===


@dataclass(frozen=True)
class LabelledGraph:
    """Graph plus in/out label tuples (vertex ids, possibly repeating)."""

    graph: Graph
    in_labels: tuple
    out_labels: tuple = ()

    def __post_init__(self):
        for v in self.in_labels + self.out_labels:
            if not (0 <= v < self.graph.n):
                raise ValueError(f"label vertex {v} outside graph")

    @property
    def k(self):
        return len(self.in_labels)

    @property
    def l(self):
        return len(self.out_labels)

    def is_distinct(self):
        return len(set(self.in_labels)) == self.k and len(set(self.out_labels)) == self.l


def one_labelled(k):
    """The all-ones graph: k isolated vertices, vertex i carrying label i+1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return LabelledGraph(empty_graph(k), tuple(range(k)))


def soe(F):
    """Drop labels: the underlying unlabelled graph."""
    return F.graph


def _merge(n_total, edges, unions):
    """Contract vertex pairs in ``unions``; return (renumber map, Graph).

    Renumbering follows the minimal original id in each class, so results
    are deterministic.  Raises LoopCreated when contraction makes an edge
    into a loop.  Parallel edges collapse silently (hom tensors only see
    adjacency).
    """
    parent = list(range(n_total))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in unions:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    reps = sorted({find(x) for x in range(n_total)})
    dense = {r: i for i, r in enumerate(reps)}
    remap = [dense[find(x)] for x in range(n_total)]
    out_edges = set()
    for u, v in edges:
        a, b = remap[u], remap[v]
        if a == b:
            raise LoopCreated(f"edge {u} {v} contracted to a loop")
        out_edges.add((min(a, b), max(a, b)))
    return remap, Graph(len(reps), tuple(sorted(out_edges)))


def glue(F1, F2):
    """Parallel composition: merge in-labels pairwise (and out-labels, if any).

    Tensor side: entrywise product.
    """
    if F1.k != F2.k or F1.l != F2.l:
        raise ArityMismatch(f"glue arity mismatch ({F1.k},{F1.l}) vs ({F2.k},{F2.l})")
    off = F1.graph.n
    edges = list(F1.graph.edges) + [(u + off, v + off) for u, v in F2.graph.edges]
    unions = [(F1.in_labels[i], F2.in_labels[i] + off) for i in range(F1.k)]
    unions += [(F1.out_labels[i], F2.out_labels[i] + off) for i in range(F1.l)]
    remap, g = _merge(off + F2.graph.n, edges, unions)
    return LabelledGraph(
        g,
        tuple(remap[v] for v in F1.in_labels),
        tuple(remap[v] for v in F1.out_labels),
    )


def series(K, F):
    """Series composition: K's i-th out-vertex is identified with F's i-th
    in-vertex; the result keeps K's in-labels and F's out-labels.

    Tensor side: matrix product K_G · F_G.
    """
    if K.l != F.k:
        raise ArityMismatch(f"series arity mismatch: out {K.l} vs in {F.k}")
    off = K.graph.n
    edges = list(K.graph.edges) + [(u + off, v + off) for u, v in F.graph.edges]
    unions = [(K.out_labels[i], F.in_labels[i] + off) for i in range(K.l)]
    remap, g = _merge(off + F.graph.n, edges, unions)
    return LabelledGraph(
        g,
        tuple(remap[v] for v in K.in_labels),
        tuple(remap[v + off] for v in F.out_labels),
    )


def permute_labels(F, sigma):
    """Redistribute labels: position i of the combined (in+out) tuple takes
    the label vertex previously at position sigma[i].

    Tensor side: axis permutation.  Composition satisfies
    permute(permute(F, s), t) = permute(F, compose(s, t)) with
    compose(s, t)[i] = s[t[i]].
    """
    total = F.k + F.l
    if sorted(sigma) != list(range(total)):
        raise ValueError(f"invalid permutation of {total} points: {sigma}")
    combined = F.in_labels + F.out_labels
    new = tuple(combined[sigma[i]] for i in range(total))
    return LabelledGraph(F.graph, new[: F.k], new[F.k :])


def compose_perms(s, t):
    """The single permutation equivalent to permuting by t, then by s:
    permute_labels(permute_labels(F, t), s) == permute_labels(F, compose_perms(s, t)).

    permute_labels pulls (new position i takes the label from old position
    sigma[i]), so the two-step application reads t at position s[i].
    """
    return tuple(t[s[i]] for i in range(len(s)))


# === Generators B(k) ===


def j_generator(k, i):
    """J^i: k+1 isolated vertices; label i moves to the fresh vertex.

    Out-labels sit on the original k vertices, in-labels agree except that
    position i points at the fresh vertex k (0-based id).
    """
    if not 1 <= i <= k:
        raise ValueError(f"J index {i} outside 1..{k}")
    ins = tuple(k if j == i - 1 else j for j in range(k))
    outs = tuple(range(k))
    return LabelledGraph(empty_graph(k + 1), ins, outs)


def a_generator(k, i, j):
    """A^{ij}: the k labelled vertices with the single edge {i, j}."""
    if not 1 <= i < j <= k:
        raise ValueError(f"A indices ({i},{j}) need 1 <= i < j <= {k}")
    g = Graph.from_edges(k, [(i - 1, j - 1)])
    ids = tuple(range(k))
    return LabelledGraph(g, ids, ids)


def generators(k):
    """The family B(k) = {J^i : i in [k]} u {A^{ij} : i < j in [k]}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = {}
    for i in range(1, k + 1):
        out[f"J{i}"] = j_generator(k, i)
    for i, j in combinations(range(1, k + 1), 2):
        out[f"A{i}{j}"] = a_generator(k, i, j)
    return out


# === Terms of the treewidth/pathwidth algebra ===


@dataclass(frozen=True)
class TOne:
    k: int


@dataclass(frozen=True)
class TGlue:
    left: object
    right: object


@dataclass(frozen=True)
class TApplyA:
    i: int
    j: int
    arg: object


@dataclass(frozen=True)
class TApplyJ:
    i: int
    arg: object


def term_arity(t):
    while True:
        if isinstance(t, TOne):
            return t.k
        t = t.left if isinstance(t, TGlue) else t.arg


def val(t):
    """Evaluate a term to its distinctly k-labelled graph."""
    if isinstance(t, TOne):
        return one_labelled(t.k)
    if isinstance(t, TGlue):
        return glue(val(t.left), val(t.right))
    if isinstance(t, TApplyA):
        f = val(t.arg)
        k = f.k
        if not 1 <= t.i < t.j <= k:
            raise ValueError(f"A({t.i},{t.j}) invalid at arity {k}")
        u, v = f.in_labels[t.i - 1], f.in_labels[t.j - 1]
        edges = set(f.graph.edges)
        edges.add((min(u, v), max(u, v)))
        return LabelledGraph(Graph(f.graph.n, tuple(sorted(edges))), f.in_labels)
    if isinstance(t, TApplyJ):
        f = val(t.arg)
        k = f.k
        if not 1 <= t.i <= k:
            raise ValueError(f"J({t.i}) invalid at arity {k}")
        fresh = f.graph.n
        g = Graph(fresh + 1, f.graph.edges)
        ins = tuple(fresh if p == t.i - 1 else f.in_labels[p] for p in range(k))
        return LabelledGraph(g, ins)
    raise TypeError(f"not a term: {t!r}")


def format_term(t):
    """Render a term: one, glue(t1,t2), A(i,j,t), J(i,t)."""
    if isinstance(t, TOne):
        return "one"
    if isinstance(t, TGlue):
        return f"glue({format_term(t.left)},{format_term(t.right)})"
    if isinstance(t, TApplyA):
        return f"A({t.i},{t.j},{format_term(t.arg)})"
    if isinstance(t, TApplyJ):
        return f"J({t.i},{format_term(t.arg)})"
    raise TypeError(f"not a term: {t!r}")


# === Labelled isomorphism and dedup ===


def labelled_isomorphic(F1, F2):
    """Isomorphism respecting label positions (in->in, out->out, same index)."""
    g, h = F1.graph, F2.graph
    if g.n != h.n or g.m != h.m or F1.k != F2.k or F1.l != F2.l:
        return False
    n = g.n
    image = [-1] * n
    used = [False] * n
    # labels force a partial map; conflicting forcings reject immediately
    for a, b in zip(F1.in_labels + F1.out_labels, F2.in_labels + F2.out_labels):
        if image[a] == -1:
            if used[b]:
                return False
            image[a] = b
            used[b] = True
        elif image[a] != b:
            return False
    deg_g = g.degree_sequence()
    deg_h = h.degree_sequence()
    if sorted(deg_g) != sorted(deg_h):
        return False
    if any(image[a] != -1 and deg_g[a] != deg_h[image[a]] for a in range(n)):
        return False

    adj_g = adjacency_sets(g)
    adj_h = [0] * n
    for u, v in h.edges:
        adj_h[u] |= 1 << v
        adj_h[v] |= 1 << u

    free = [x for x in range(n) if image[x] == -1]

    def extend(idx):
        if idx == len(free):
            # verify all adjacency (forced part included)
            for u, v in g.edges:
                if not (adj_h[image[u]] >> image[v]) & 1:
                    return False
            return True
        x = free[idx]
        need = 0
        placed = 0
        for y in range(n):
            if image[y] >= 0:
                placed |= 1 << image[y]
                if y in adj_g[x]:
                    need |= 1 << image[y]
        forbid = placed & ~need
        for h_v in range(n):
            if used[h_v] or deg_h[h_v] != deg_g[x]:
                continue
            if (adj_h[h_v] & need) != need or (adj_h[h_v] & forbid):
                continue
            image[x] = h_v
            used[h_v] = True
            if extend(idx + 1):
                return True
            image[x] = -1
            used[h_v] = False
        return False

    return extend(0)


def _bucket_key(F):
    g = F.graph
    deg = g.degree_sequence()
    labels = F.in_labels + F.out_labels
    # pattern of coinciding labels, degree profile on labels, global degrees
    first_seen = {}
    pattern = []
    for v in labels:
        pattern.append(first_seen.setdefault(v, len(first_seen)))
    label_edges = tuple(
        sorted(
            (p, q)
            for p, q in combinations(range(len(labels)), 2)
            if labels[p] != labels[q] and g.has_edge(labels[p], labels[q])
        )
    )
    return (
        g.n,
        g.m,
        F.k,
        F.l,
        tuple(pattern),
        tuple(deg[v] for v in labels),
        tuple(sorted(deg)),
        label_edges,
    )


class LabelledSet:
    """Dedup collection of labelled graphs up to labelled isomorphism."""

    def __init__(self):
        self.buckets = {}
        self.items = []

    def add(self, F, payload=None):
        """Insert unless an isomorphic member exists; return True if new."""
        key = _bucket_key(F)
        bucket = self.buckets.setdefault(key, [])
        for other in bucket:
            if labelled_isomorphic(F, other):
                return False
        bucket.append(F)
        self.items.append((F, payload))
        return True

    def __len__(self):
        return len(self.items)

    def graphs(self):
        return [f for f, _ in self.items]


# === Enumeration: treewidth and pathwidth classes ===


@dataclass(frozen=True)
class TwRecord:
    term: object
    value: LabelledGraph
    level: int


def _a_closure(records, k):
    """Close a batch of (term, value) pairs under single A applications."""
    out = LabelledSet()
    for term, value in records:
        out.add(value, term)
    frontier = list(records)
    while frontier:
        term, value = frontier.pop()
        for i, j in combinations(range(1, k + 1), 2):
            t2 = TApplyA(i, j, term)
            v2 = val_apply_a(value, i, j)
            if out.add(v2, t2):
                frontier.append((t2, v2))
    return [(payload, f) for f, payload in out.items]


def val_apply_a(F, i, j):
    u, v = F.in_labels[i - 1], F.in_labels[j - 1]
    edges = set(F.graph.edges)
    edges.add((min(u, v), max(u, v)))
    return LabelledGraph(Graph(F.graph.n, tuple(sorted(edges))), F.in_labels)


def val_apply_j(F, i):
    fresh = F.graph.n
    g = Graph(fresh + 1, F.graph.edges)
    ins = tuple(fresh if p == i - 1 else F.in_labels[p] for p in range(F.k))
    return LabelledGraph(g, ins)


def enumerate_tw(k, d, max_vertices):
    """Members of the depth-d treewidth-(k-1) class, up to max_vertices.

    Levelwise: level 1 is the set of edge-closures of the all-ones graph;
    level d+1 adds, for every nonempty L subseteq [k] and level-d members
    F_l, the edge-closures of glue_{l in L} J^l(F_l).  Distinct dropped
    labels per glue factor mirror the out-degree-bounded decomposition and
    give the sharp size bound max{k^d, d}.

    Returns TwRecords (term, labelled value, first level seen), deduplicated
    by labelled isomorphism.
    """
    if k < 1 or d < 1:
        raise ValueError("k and d must be >= 1")
    if max_vertices < k:
        return []

    seen = LabelledSet()
    records = []

    def admit(batch, level):
        fresh = []
        for term, value in batch:
            if value.graph.n <= max_vertices and seen.add(value, None):
                rec = TwRecord(term, value, level)
                records.append(rec)
                fresh.append(rec)
        return fresh

    base = _a_closure([(TOne(k), one_labelled(k))], k)
    admit(base, 1)
    current = [(r.term, r.value) for r in records]

    for level in range(2, d + 1):
        produced = LabelledSet()
        by_size = sorted(current, key=lambda tf: tf[1].graph.n)
        if not by_size:
            break
        min_size = by_size[0][1].graph.n
        labels = list(range(1, k + 1))
        for count in range(1, k + 1):
            for chosen in combinations(labels, count):
                # glued vertex count: sum(n_l + 1) - (count-1)*k, so the
                # member sizes must sum to at most this budget
                budget = max_vertices + (count - 1) * k - count

                def assemble(slot, used, parts):
                    if slot == count:
                        term = None
                        value = None
                        for lab, (t, f) in zip(chosen, parts):
                            jt = TApplyJ(lab, t)
                            jv = val_apply_j(f, lab)
                            if term is None:
                                term, value = jt, jv
                            else:
                                term = TGlue(term, jt)
                                value = glue(value, jv)
                        produced.add(value, term)
                        return
                    remaining = count - slot - 1
                    for t, f in by_size:
                        n = f.graph.n
                        if used + n + remaining * min_size > budget:
                            break  # by_size is sorted; nothing later fits
                        assemble(slot + 1, used + n, parts + [(t, f)])

                assemble(0, 0, [])
        closed = _a_closure(
            [(payload, f) for f, payload in produced.items], k
        )
        fresh = admit(closed, level)
        current = [(r.term, r.value) for r in records]
        if not fresh:
            break  # cumulative rule: an empty level is a fixed point
    return records


def enumerate_pw(k, d):
    """Members of the depth-d pathwidth-(k-1) class: no gluing, so level
    i+1 applies a single J to level i and closes under edge operations.
    Sizes are bounded by k+d-1 (one fresh vertex per level)."""
    if k < 1 or d < 1:
        raise ValueError("k and d must be >= 1")
    seen = LabelledSet()
    records = []

    def admit(batch, level):
        fresh = []
        for term, value in batch:
            if seen.add(value, None):
                rec = TwRecord(term, value, level)
                records.append(rec)
                fresh.append(rec)
        return fresh

    admit(_a_closure([(TOne(k), one_labelled(k))], k), 1)
    current = [(r.term, r.value) for r in records]
    for level in range(2, d + 1):
        produced = []
        for t, f in current:
            for i in range(1, k + 1):
                produced.append((TApplyJ(i, t), val_apply_j(f, i)))
        fresh = admit(_a_closure(produced, k), level)
        current = [(r.term, r.value) for r in records]
        if not fresh:
            break
    return records


# === Atomic graphs and the Lasserre term algebra ===


def _set_partitions(n):
    """All set partitions of range(n) as restricted growth strings."""
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def rec(i, maxv):
        if i == n:
            yield list(rgs)
            return
        for c in range(maxv + 2):
            rgs[i] = c
            yield from rec(i + 1, max(maxv, c))

    yield from rec(1, 0)


def enumerate_atomic(t):
    """All atomic (t,t)-bilabelled graphs: a set partition of the 2t label
    slots (quotient = vertex set) plus any edge set on the quotient.

    Two atomics are bilabelled-isomorphic iff they share the partition and
    edge set, so no dedup pass is needed.  t <= 2 keeps this tractable.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if t > 2:
        raise ValueError("enumerate_atomic supports t <= 2")
    out = []
    for rgs in _set_partitions(2 * t):
        blocks = max(rgs) + 1
        ins = tuple(rgs[:t])
        outs = tuple(rgs[t:])
        for edge_set in range(1 << (blocks * (blocks - 1) // 2)):
            edges = []
            for idx, (a, b) in enumerate(combinations(range(blocks), 2)):
                if (edge_set >> idx) & 1:
                    edges.append((a, b))
            out.append(LabelledGraph(Graph.from_edges(blocks, edges), ins, outs))
    return out


def identity_atomic(t):
    """The atomic with u_i = v_i and no edges; its tensor is the identity."""
    ids = tuple(range(t))
    return LabelledGraph(empty_graph(t), ids, ids)


@dataclass(frozen=True)
class LAtomic:
    value: LabelledGraph


@dataclass(frozen=True)
class LGlueAtomic:
    atomic: LabelledGraph
    arg: object


@dataclass(frozen=True)
class LPermute:
    sigma: tuple
    arg: object


@dataclass(frozen=True)
class LSeries:
    left: object
    right: object


def lasserre_depth(w):
    """Depth counts only series nesting: atomics are 1, glue/permute free."""
    if isinstance(w, LAtomic):
        return 1
    if isinstance(w, (LGlueAtomic, LPermute)):
        return lasserre_depth(w.arg)
    if isinstance(w, LSeries):
        return max(lasserre_depth(w.left), lasserre_depth(w.right)) + 1
    raise TypeError(f"not a Lasserre term: {w!r}")


def lasserre_val(w):
    """Evaluate to the (t,t)-bilabelled graph (may raise LoopCreated)."""
    if isinstance(w, LAtomic):
        return w.value
    if isinstance(w, LGlueAtomic):
        return glue(w.atomic, lasserre_val(w.arg))
    if isinstance(w, LPermute):
        return permute_labels(lasserre_val(w.arg), w.sigma)
    if isinstance(w, LSeries):
        return series(lasserre_val(w.left), lasserre_val(w.right))
    raise TypeError(f"not a Lasserre term: {w!r}")


def _format_graph_inline(g):
    inner = ",".join(f"{u}-{v}" for u, v in g.edges)
    return f"n{g.n}:{inner}" if inner else f"n{g.n}"


def format_lasserre_term(w):
    """Render: atomic(<graph>,<in>,<out>), glue(atomic,w), perm(<sigma>,w),
    series(w1,w2)."""
    if isinstance(w, LAtomic):
        f = w.value
        ins = ",".join(str(v) for v in f.in_labels)
        outs = ",".join(str(v) for v in f.out_labels)
        return f"atomic({_format_graph_inline(f.graph)},({ins}),({outs}))"
    if isinstance(w, LGlueAtomic):
        return f"glue({format_lasserre_term(LAtomic(w.atomic))},{format_lasserre_term(w.arg)})"
    if isinstance(w, LPermute):
        sig = ",".join(str(s) for s in w.sigma)
        return f"perm(({sig}),{format_lasserre_term(w.arg)})"
    if isinstance(w, LSeries):
        return f"series({format_lasserre_term(w.left)},{format_lasserre_term(w.right)})"
    raise TypeError(f"not a Lasserre term: {w!r}")


@lru_cache(maxsize=None)
def _all_perms(n):
    from itertools import permutations

    return tuple(permutations(range(n)))


def enumerate_lasserre_terms(t, depth, max_vertices):
    """Records (term, bilabelled value, depth) for the level-t hierarchy,
    deduplicated by bilabelled isomorphism; loop-forcing terms are skipped.

    Depth-preserving operations (glue with an atomic, permutation) never add
    vertices, so each depth class saturates; series steps to the next depth.
    """
    atomics = enumerate_atomic(t)
    perms = _all_perms(2 * t)
    seen = LabelledSet()
    records = []  # (term, value, depth)

    def saturate(batch, dep):
        """Close under glue-with-atomic and permutations at fixed depth."""
        fresh = []
        for term, value in batch:
            if value.graph.n <= max_vertices and seen.add(value, None):
                rec = (term, value, dep)
                records.append(rec)
                fresh.append(rec)
        idx = 0
        while idx < len(fresh):
            term, value, _ = fresh[idx]
            idx += 1
            for a in atomics:
                try:
                    v2 = glue(a, value)
                except LoopCreated:
                    continue
                t2 = LGlueAtomic(a, term)
                if seen.add(v2, None):
                    rec = (t2, v2, dep)
                    records.append(rec)
                    fresh.append(rec)
            for sigma in perms:
                v2 = permute_labels(value, sigma)
                t2 = LPermute(sigma, term)
                if seen.add(v2, None):
                    rec = (t2, v2, dep)
                    records.append(rec)
                    fresh.append(rec)

    saturate([(LAtomic(a), a) for a in atomics], 1)
    for dep in range(2, depth + 1):
        lower = [r for r in records if r[2] < dep]
        batch = []
        for t1, v1, d1 in lower:
            for t2, v2, d2 in lower:
                if max(d1, d2) + 1 != dep:
                    continue
                try:
                    v = series(v1, v2)
                except LoopCreated:
                    continue
                if v.graph.n <= max_vertices:
                    batch.append((LSeries(t1, t2), v))
        saturate(batch, dep)
    return records


def enumerate_lasserre(t, depth, max_vertices):
    """Underlying unlabelled graphs soe(val(w)) of the enumerated terms."""
    out = set()
    for _, value, _ in enumerate_lasserre_terms(t, depth, max_vertices):
        out.add(soe(value))
    return out
