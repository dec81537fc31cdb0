"""Block recognition, block discovery, the tunneling transform, and
traversal / path search on tunneled Wheeler graphs.

A block is a family of w label-isomorphic subtrees whose column tuples
occupy consecutive Wheeler ranks; tunneling collapses the w copies into
one, redirecting boundary edges.  Traversal of the original graph is
simulated on the tunneled one with (node, tunnel offset) pairs; bitvectors
I' and O' recover which copy an edge entered or left.

Two places deliberately go beyond the bare I'/O' arithmetic, which is only
exact when every copy participates in the edge group under inspection:

* entering a tunnel adds a ``width - marked-groups`` correction so that
  roots without in-edges (a legal zero-indegree prefix of the column) do
  not shift the offset;
* every exit edge records which copy it left, so exits stay exact when
  copies have differing counts of same-labeled out-edges (legal under the
  block conditions, and present in tree-shaped tunnels).
"""

from __future__ import annotations

import heapq
from array import array
from dataclasses import dataclass, field

from .bitvec import BitVec
from .errors import BoundsError, NotFoundError, ValidationError
from .wheeler import CheckResult, EdgeList, NodeRange, WheelerGraph, encode


@dataclass
class Block:
    """A width-w, size-s family of label-isomorphic subtrees.

    ``columns[j]`` holds the j-th column tuple (v_{1,j}, .., v_{w,j});
    ``columns[0]`` are the subtree roots.  Column tuples occupy consecutive
    Wheeler ranks, ascending with the row index.
    """

    width: int
    size: int
    columns: list[tuple[int, ...]]
    entry_label: int | None = field(default=None, compare=False)

    def node_set(self) -> set[int]:
        return {v for col in self.columns for v in col}

    def key(self):
        return (self.width, self.columns[0], frozenset(self.columns[1:]))


@dataclass(frozen=True)
class StringBlock:
    """Path-graph specialization: s collapsed columns starting at the run
    of ranks [start_rank .. start_rank+width-1]; the implied block has s+1
    column tuples, the last staying uncollapsed."""

    start_rank: int
    width: int
    length: int

    def expand(self, g: WheelerGraph) -> Block:
        s_max, cols = derive_string_block(g, self.start_rank, self.width)
        if s_max < self.length:
            raise ValidationError(
                f"string block ({self.start_rank},{self.width},{self.length})"
                f" only extends to length {s_max}")
        entry = g.in_label(self.start_rank)
        entry_byte = g.label_byte(entry) if entry is not None else None
        return Block(self.width, self.length, cols[:self.length], entry_byte)


@dataclass(frozen=True)
class TraversalPos:
    """A simulated position in the original graph: tunneled node rank plus
    the tunnel offset (which collapsed copy we are in; 1 outside tunnels)."""

    node: int
    offset: int = 1


@dataclass(frozen=True)
class TunnelRecord:
    entrance: int   # tunneled rank of the collapsed root column
    exit: int       # tunneled rank of the last collapsed column
    width: int
    length: int


class _GraphView:
    """Decoded adjacency of a WheelerGraph, shared across block checks."""

    __slots__ = ("n", "edges", "out_adj", "in_adj")

    def __init__(self, g: WheelerGraph):
        el = g.to_edge_list()
        self.n = g.n
        self.edges = el.edges
        self.out_adj = [[] for _ in range(g.n + 1)]
        self.in_adj = [[] for _ in range(g.n + 1)]
        for idx, (u, v, c) in enumerate(el.edges):
            self.out_adj[u].append((idx, v, c))
            self.in_adj[v].append((idx, u, c))


# ---------------------------------------------------------------------------
# block checking


def check_block(g: WheelerGraph, b: Block) -> CheckResult:
    """Verify the five block conditions against the graph."""
    return _check_block(_GraphView(g), b)


def _check_block(view: _GraphView, b: Block) -> CheckResult:
    w, s = b.width, b.size
    if w < 1 or s < 1 or len(b.columns) != s or any(len(c) != w for c in b.columns):
        raise ValidationError("malformed block: column shape does not match width/size")
    nodes = [v for col in b.columns for v in col]
    for v in nodes:
        if not 1 <= v <= view.n:
            return CheckResult.bad("bounds", f"node rank {v} outside [1..{view.n}]")
    if len(set(nodes)) != len(nodes):
        return CheckResult.bad("distinct", "block nodes are not pairwise distinct")
    for j, col in enumerate(b.columns, 1):
        for i in range(w - 1):
            if col[i + 1] != col[i] + 1:
                return CheckResult.bad(
                    "i", f"column {j} is not a run of consecutive ranks")

    node_set = set(nodes)
    vi = [set() for _ in range(w + 1)]
    colidx = {}
    for j, col in enumerate(b.columns, 1):
        for i, v in enumerate(col, 1):
            vi[i].add(v)
            colidx[v] = (i, j)

    # subtree shape: s-1 internal edges, root parentless, everyone else
    # with exactly one internal parent
    ei = [None] * (w + 1)
    for i in range(1, w + 1):
        edges_i = []
        indeg_within = {}
        for u in vi[i]:
            for _, v, c in view.out_adj[u]:
                if v in vi[i]:
                    edges_i.append((u, v, c))
                    indeg_within[v] = indeg_within.get(v, 0) + 1
        root = b.columns[0][i - 1]
        if indeg_within.get(root, 0) != 0:
            return CheckResult.bad("ii", f"root {root} has an in-edge inside its subtree")
        for v in vi[i]:
            if v != root and indeg_within.get(v, 0) != 1:
                return CheckResult.bad(
                    "ii", f"node {v} has {indeg_within.get(v, 0)} parents inside subtree {i}")
        if len(edges_i) != s - 1:
            return CheckResult.bad(
                "ii", f"subtree {i} has {len(edges_i)} internal edges, expected {s - 1}")
        ei[i] = set(edges_i)

    # label-preserving isomorphism along rows (simultaneous traversal of the
    # forced correspondences)
    for u, v, c in ei[1]:
        _, cu = colidx[u]
        _, cv = colidx[v]
        for i in range(2, w + 1):
            u2 = b.columns[cu - 1][i - 1]
            v2 = b.columns[cv - 1][i - 1]
            if (u2, v2, c) not in ei[i]:
                return CheckResult.bad(
                    "ii", f"edge ({u},{v},{c}) of subtree 1 has no counterpart in subtree {i}")

    # (iii) all edges into any root carry one label
    entry = None
    for root in b.columns[0]:
        for _, _, c in view.in_adj[root]:
            if entry is None:
                entry = c
            elif c != entry:
                return CheckResult.bad(
                    "iii", f"edges into the roots carry labels {entry} and {c}")
    if b.entry_label is not None and entry is not None and b.entry_label != entry:
        return CheckResult.bad("iii", "stored entry label does not match the graph")

    # (iv) non-root block nodes have total in-degree 1
    for col in b.columns[1:]:
        for v in col:
            if len(view.in_adj[v]) != 1:
                return CheckResult.bad(
                    "iv", f"node {v} has in-degree {len(view.in_adj[v])}, expected 1")

    # (v) per column and letter: either one internal edge per copy and no
    # escapes, or no internal edges and only escapes to non-block nodes
    for j, col in enumerate(b.columns, 1):
        letters = set()
        for v in col:
            for _, _, c in view.out_adj[v]:
                letters.add(c)
        for c in letters:
            holds_a = True
            holds_b = True
            for i, v in enumerate(col, 1):
                internal = outside = cross = 0
                for _, t, lab in view.out_adj[v]:
                    if lab != c:
                        continue
                    if t in vi[i]:
                        internal += 1
                    elif t in node_set:
                        cross += 1
                    else:
                        outside += 1
                if not (internal == 1 and outside == 0 and cross == 0):
                    holds_a = False
                if not (internal == 0 and cross == 0):
                    holds_b = False
            if not holds_a and not holds_b:
                return CheckResult.bad(
                    "v", f"column {j}, letter {c}: neither uniformity case holds")
    return CheckResult.good()


def _require_path_graph(g: WheelerGraph) -> None:
    if g.m != g.n - 1:
        raise ValidationError("not a path graph: edge count must be n-1")
    for r in range(1, g.n + 1):
        if g.outdeg(r) > 1 or g.indeg(r) > 1:
            raise ValidationError(f"not a path graph: node {r} has branching degree")


def derive_string_block(g: WheelerGraph, start: int, w: int):
    """Greedily derive the longest valid string block at (start, w).

    Returns (s_max, columns) where columns holds the s_max+1 implied tuples
    (just the seed column when s_max = 0).  Mirrors check_string_block: the
    block of length s is valid iff s <= s_max.
    """
    if w < 1 or start < 1 or start + w - 1 > g.n:
        return 0, []
    col1 = tuple(range(start, start + w))
    in_labels = [g.in_label(r) for r in col1]
    present = [lab for lab in in_labels if lab is not None]
    if present and any(lab != present[0] for lab in present):
        return 0, [col1]
    cols = [col1]
    used = set(col1)
    first_nonuniform = None  # 1-based index of first column with mixed out-labels
    while first_nonuniform is None or len(cols) <= first_nonuniform:
        last = cols[-1]
        outs = [g.out_label_single(r) for r in last]
        if any(o is None for o in outs):
            break
        if first_nonuniform is None and any(o != outs[0] for o in outs):
            first_nonuniform = len(cols)
        nxt = tuple(g.edge_target(g.out_edge_rank(r, outs[i], 1))
                    for i, r in enumerate(last))
        if any(nxt[i + 1] != nxt[i] + 1 for i in range(w - 1)):
            break
        if used & set(nxt):
            break
        cols.append(nxt)
        used |= set(nxt)
    s_max = len(cols) - 1
    if first_nonuniform is not None:
        s_max = min(s_max, first_nonuniform)
    return s_max, cols[:s_max + 1] if s_max else cols[:1]


def check_string_block(g: WheelerGraph, sb: StringBlock) -> CheckResult:
    """Check the path-graph block conditions for the implied s+1 tuples."""
    _require_path_graph(g)
    if sb.length < 1 or sb.width < 1:
        raise ValidationError("string block needs width >= 1 and length >= 1")
    start, w, s = sb.start_rank, sb.width, sb.length
    if start < 1 or start + w - 1 > g.n:
        return CheckResult.bad("bounds", f"seed run outside [1..{g.n}]")
    cols = [tuple(range(start, start + w))]
    used = set(cols[0])
    in_labels = [g.in_label(r) for r in cols[0]]
    present = [lab for lab in in_labels if lab is not None]
    if present and any(lab != present[0] for lab in present):
        return CheckResult.bad("iii", "in-labels of the seed column differ")
    for j in range(1, s + 1):
        last = cols[-1]
        outs = [g.out_label_single(r) for r in last]
        if any(o is None for o in outs):
            return CheckResult.bad("ii", f"column {j} contains the sink")
        if j < s and any(o != outs[0] for o in outs):
            # in-labels of column j+1 <= s must be uniform
            return CheckResult.bad("iii", f"in-labels of column {j + 1} differ")
        nxt = tuple(g.edge_target(g.out_edge_rank(r, outs[i], 1))
                    for i, r in enumerate(last))
        if any(nxt[i + 1] != nxt[i] + 1 for i in range(w - 1)):
            return CheckResult.bad("i", f"column {j + 1} is not consecutive")
        if used & set(nxt):
            return CheckResult.bad("distinct", f"column {j + 1} overlaps the block")
        cols.append(nxt)
        used |= set(nxt)
    return CheckResult.good()


def find_string_blocks(g: WheelerGraph, min_w: int = 2, min_s: int = 2) -> list[StringBlock]:
    """Heuristic block discovery on the Wheeler graph of a string.

    Seeds on maximal runs of equal out-labels whose source nodes share
    in-labels, maximizes each seed in size and width, then selects greedily
    by merged-edge benefit (w-1)(s-1) with ties to smaller start rank.
    Overlapping candidates are truncated to their longest conflict-free
    column prefix and re-scored.
    """
    _require_path_graph(g)
    if min_w < 1 or min_s < 1:
        raise ValidationError("min_w and min_s must be >= 1")
    n = g.n
    out = [None] * (n + 2)
    inl = [None] * (n + 2)
    for r in range(1, n + 1):
        out[r] = g.out_label_single(r)
        inl[r] = g.in_label(r)

    seeds = []
    r = 1
    while r <= n:
        if out[r] is None:
            r += 1
            continue
        r2 = r
        while r2 + 1 <= n and out[r2 + 1] == out[r]:
            r2 += 1
        a = r
        while a <= r2:
            b = a
            while b + 1 <= r2 and inl[b + 1] == inl[a]:
                b += 1
            if b - a + 1 >= min_w:
                seeds.append((a, b - a + 1))
            a = b + 1
        r = r2 + 1

    candidates = {}
    for start, w in seeds:
        got = _maximize_string_block(g, start, w)
        if got is None:
            continue
        start, w, s, cols = got
        if s >= min_s and w >= min_w and (start, w, s) not in candidates:
            candidates[(start, w, s)] = cols

    heap = []
    for (start, w, s), cols in candidates.items():
        heapq.heappush(heap, (-(w - 1) * (s - 1), start, w, s, cols))
    used: set[int] = set()
    selected = []
    while heap:
        negb, start, w, s, cols = heapq.heappop(heap)
        collapsed = [set(col) for col in cols[:s]]
        if any(colset & used for colset in collapsed):
            s2 = 0
            for colset in collapsed:
                if colset & used:
                    break
                s2 += 1
            if s2 >= min_s:
                heapq.heappush(heap, (-(w - 1) * (s2 - 1), start, w, s2, cols[:s2 + 1]))
            continue
        selected.append(StringBlock(start, w, s))
        for colset in collapsed:
            used |= colset
    selected.sort(key=lambda sb: sb.start_rank)
    return selected


def _maximize_string_block(g: WheelerGraph, start: int, w: int):
    s, cols = derive_string_block(g, start, w)
    if s < 1:
        return None
    while True:
        for ns, nw in ((start - 1, w + 1), (start, w + 1)):
            if ns < 1 or ns + nw - 1 > g.n:
                continue
            s2, cols2 = derive_string_block(g, ns, nw)
            if s2 >= s:
                start, w, s, cols = ns, nw, s2, cols2
                break
        else:
            return start, w, s, cols


# ---------------------------------------------------------------------------
# brute-force enumeration of maximal blocks


def enumerate_blocks_bruteforce(g: WheelerGraph, max_nodes: int = 64) -> list[Block]:
    """All maximal blocks, by exhaustive extension of every legal single
    column.  Guarded by a node-count limit; this is an oracle, not a
    production finder."""
    if g.n > max_nodes:
        raise ValidationError(
            f"graph has {g.n} nodes, over the brute-force guard {max_nodes}")
    view = _GraphView(g)
    stack = []
    for w in range(1, g.n + 1):
        for base in range(1, g.n - w + 2):
            b = Block(w, 1, [tuple(range(base, base + w))])
            if _check_block(view, b):
                stack.append(b)
    seen = set()
    maximal = {}
    while stack:
        b = stack.pop()
        key = b.key()
        if key in seen:
            continue
        seen.add(key)
        exts = _bf_extensions(view, b)
        if exts:
            stack.extend(exts)
        else:
            maximal[key] = b
    return sorted(maximal.values(),
                  key=lambda b: (b.columns[0][0], b.width, b.size,
                                 sorted(c[0] for c in b.columns)))


def _bf_extensions(view: _GraphView, b: Block) -> list[Block]:
    out = []
    w = b.width
    blocknodes = b.node_set()
    # append a column: its first row must be a child of a first-row node
    child_bases = set()
    for col in b.columns:
        for _, t, _ in view.out_adj[col[0]]:
            child_bases.add(t)
    for u in sorted(child_bases):
        if u in blocknodes or u + w - 1 > view.n:
            continue
        nb = Block(w, b.size + 1, b.columns + [tuple(range(u, u + w))])
        if _check_block(view, nb):
            out.append(nb)
    # prepend new roots: only possible when the old roots have in-degree 1
    roots = b.columns[0]
    if all(len(view.in_adj[r]) == 1 for r in roots):
        q = view.in_adj[roots[0]][0][1]
        if 1 <= q and q + w - 1 <= view.n:
            nb = Block(w, b.size + 1, [tuple(range(q, q + w))] + b.columns)
            if _check_block(view, nb):
                out.append(nb)
    # widen by one row below or above
    if all(col[0] - 1 >= 1 for col in b.columns):
        nb = Block(w + 1, b.size, [(col[0] - 1,) + col for col in b.columns])
        if _check_block(view, nb):
            out.append(nb)
    if all(col[-1] + 1 <= view.n for col in b.columns):
        nb = Block(w + 1, b.size, [col + (col[-1] + 1,) for col in b.columns])
        if _check_block(view, nb):
            out.append(nb)
    return out


# ---------------------------------------------------------------------------
# the tunneling transform


class TunneledGraph:
    """A tunneled Wheeler graph with the traversal support structures.

    Holds the succinct graph of G_t, bitvectors I'/O' (first edge per
    original target / per original (source, letter) group), entrance and
    inner marks over nodes, per-tunnel records, the per-exit-edge copy
    directory, and optionally the original-to-tunneled node map (testing
    builds only).
    """

    def __init__(self, g, iprime, oprime, entrance_marks, inner_marks,
                 tunnels, exit_copies, orig_n, node_map=None):
        self.g = g
        self.iprime = iprime
        self.oprime = oprime
        self.entrance_marks = entrance_marks
        self.inner_marks = inner_marks
        self.tunnels = list(tunnels)
        self.exit_copies = dict(exit_copies)
        self.orig_n = orig_n
        self.node_map = node_map
        self.entrance_info = {t.entrance: t for t in self.tunnels}

    # -- marks ---------------------------------------------------------------

    def is_entrance(self, r: int) -> bool:
        return bool(self.entrance_marks.access(r))

    def is_inner(self, r: int) -> bool:
        return bool(self.inner_marks.access(r))

    def is_tunnel_node(self, r: int) -> bool:
        return self.is_entrance(r) or self.is_inner(r)

    # -- offset machinery ------------------------------------------------------

    def enter_offset(self, j: int, r: int) -> int:
        """Index of the original subtree entered via edge j into entrance r.

        rank_1(I',j) - rank_1(I',select_1(I,r)-r) counts marked in-groups up
        to j; roots without any in-edge contribute no group, so the width
        minus the total group count realigns the offset.
        """
        rec = self.entrance_info.get(r)
        if rec is None:
            raise ValidationError(f"node {r} is not a tunnel entrance")
        start = self.g._istart[r]
        deg = self.g.indeg(r)
        marks = self.iprime.rank(start + deg) - self.iprime.rank(start)
        return (rec.width - marks) + self.iprime.rank(j) - self.iprime.rank(start)

    def _exit_groups(self, j1: int, j2: int):
        """Per-copy exit-edge groups inside the label range [j1, j2]:
        (first edge, last edge, copy index), ordered by copy."""
        groups = []
        base = self.oprime.rank(j1)  # includes j1's own mark
        t = 0
        starts = []
        total = self.oprime.ones
        while base + t <= total:
            p = self.oprime.select(base + t)
            if p > j2:
                break
            starts.append(p)
            t += 1
        for idx, s0 in enumerate(starts):
            e0 = starts[idx + 1] - 1 if idx + 1 < len(starts) else j2
            copy = self.exit_copies.get(s0, idx + 1)
            groups.append((s0, e0, copy))
        return groups

    def exit_edge(self, j1: int, o: int, k: int = 1, last: bool = False) -> int:
        """Wheeler rank of the k-th (or last) same-labeled edge that
        originally left copy o of the tunnel node owning edge j1."""
        c = self.g.edge_label(j1)
        src = self.g.edge_source(j1)
        r1, r2 = self.g.edge_range_for_label(NodeRange(src, src), c)
        if r1 != j1:
            raise ValidationError(f"edge {j1} is not the first {c}-edge of its node")
        for s0, e0, copy in self._exit_groups(r1, r2):
            if copy == o:
                if last:
                    return e0
                if s0 + k - 1 > e0:
                    raise NotFoundError(f"copy {o} has fewer than {k} such edges")
                return s0 + k - 1
        raise NotFoundError(f"copy {o} has no out-edge labeled {c}")

    # -- single-step traversal -------------------------------------------------

    def step(self, p: TraversalPos, c: int, k: int = 1) -> TraversalPos:
        """Take the k-th c-labeled edge from the simulated original position."""
        g = self.g
        if not 1 <= p.node <= g.n:
            raise BoundsError(f"node {p.node} outside [1..{g.n}]")
        if not 1 <= c <= g.sigma:
            raise NotFoundError(f"symbol {c} not in alphabet")
        j1, j2 = g.edge_range_for_label(NodeRange(p.node, p.node), c)
        if j1 > j2:
            raise NotFoundError(f"node {p.node} has no out-edge labeled {c}")
        if not self.is_tunnel_node(p.node):
            j = j1 + k - 1
            if j > j2 or k < 1:
                raise NotFoundError(f"node {p.node} has no {k}-th {c}-edge")
            return self._land(j)
        r1 = g.edge_target(j1)
        if self.is_inner(r1):
            # moving inside: one collapsed edge serves every copy
            if k != 1:
                raise NotFoundError("in-tunnel letters have exactly one edge per copy")
            return TraversalPos(r1, p.offset)
        for s0, e0, copy in self._exit_groups(j1, j2):
            if copy == p.offset:
                j = s0 + k - 1
                if j > e0 or k < 1:
                    raise NotFoundError(f"copy {p.offset} has fewer than {k} {c}-edges")
                return self._land(j)
        raise NotFoundError(f"copy {p.offset} has no out-edge labeled {c}")

    def _land(self, j: int) -> TraversalPos:
        r = self.g.edge_target(j)
        if self.is_entrance(r):
            return TraversalPos(r, self.enter_offset(j, r))
        return TraversalPos(r, 1)

    # -- range search ------------------------------------------------------------

    def _node_first(self, v, c, min_copy, max_copy):
        """First qualifying c-edge leaving node v, restricted to copies in
        [min_copy, max_copy] (None = unbounded).  Returns (edge, kind, carry)."""
        g = self.g
        j1, j2 = g.edge_range_for_label(NodeRange(v, v), c)
        if j1 > j2:
            return None
        if not self.is_tunnel_node(v):
            return (j1, "plain", None)
        r1 = g.edge_target(j1)
        if self.is_inner(r1):
            return (j1, "carry", min_copy if min_copy is not None else 1)
        for s0, e0, copy in self._exit_groups(j1, j2):
            if min_copy is not None and copy < min_copy:
                continue
            if max_copy is not None and copy > max_copy:
                return None
            return (s0, "plain", None)
        return None

    def _node_last(self, v, c, min_copy, max_copy):
        g = self.g
        j1, j2 = g.edge_range_for_label(NodeRange(v, v), c)
        if j1 > j2:
            return None
        if not self.is_tunnel_node(v):
            return (j2, "plain", None)
        r1 = g.edge_target(j1)
        if self.is_inner(r1):
            return (j1, "carry", max_copy)
        best = None
        for s0, e0, copy in self._exit_groups(j1, j2):
            if min_copy is not None and copy < min_copy:
                continue
            if max_copy is not None and copy > max_copy:
                break
            best = (e0, "plain", None)
        return best

    def _middle_pick(self, j, first: bool):
        r = self.g.edge_target(j)
        if self.is_inner(r):
            return (j, "carry", 1 if first else None)
        return (j, "plain", None)

    def _resolve(self, pick):
        j, kind, carry = pick
        r = self.g.edge_target(j)
        if kind == "carry":
            return (r, carry)
        if self.is_entrance(r):
            return (r, self.enter_offset(j, r))
        return (r, 1)

    def _follow_pairs(self, lo, hi, c):
        """One search step on offset-annotated endpoints.

        lo = (node, offset), hi = (node, offset-or-None); None means the
        full width of the node.  Returns the new endpoint pair or None.
        """
        g = self.g
        if not 1 <= c <= g.sigma:
            return None
        lo_node, lo_off = lo
        hi_node, hi_off = hi
        single = lo_node == hi_node

        lo_pick = self._node_first(lo_node, c, lo_off,
                                   hi_off if single else None)
        if lo_pick is None and not single:
            if lo_node + 1 <= hi_node - 1:
                mj1, mj2 = g.edge_range_for_label(NodeRange(lo_node + 1, hi_node - 1), c)
                if mj1 <= mj2:
                    lo_pick = self._middle_pick(mj1, first=True)
            if lo_pick is None:
                lo_pick = self._node_first(hi_node, c, None, hi_off)
        if lo_pick is None:
            return None

        hi_pick = self._node_last(hi_node, c, lo_off if single else None, hi_off)
        if hi_pick is None and not single:
            if lo_node + 1 <= hi_node - 1:
                mj1, mj2 = g.edge_range_for_label(NodeRange(lo_node + 1, hi_node - 1), c)
                if mj1 <= mj2:
                    hi_pick = self._middle_pick(mj2, first=False)
            if hi_pick is None:
                hi_pick = self._node_last(lo_node, c, lo_off, None)
        assert hi_pick is not None, "lo endpoint found but hi endpoint missing"

        new_lo = self._resolve(lo_pick)
        new_hi = self._resolve(hi_pick)
        assert new_lo[0] <= new_hi[0], "follow produced a non-coherent range"
        return new_lo, new_hi

    def _search_pairs(self, pattern):
        """Offset-annotated Wheeler range of the pattern over the simulated
        original graph; None when empty."""
        lo = (1, 1)
        hi = (self.g.n, None)
        for byte in pattern:
            c = self.g.label_id(byte)
            if c is None:
                return None
            nxt = self._follow_pairs(lo, hi, c)
            if nxt is None:
                return None
            lo, hi = nxt
        return lo, hi

    def follow_range(self, r: NodeRange, c: int) -> NodeRange:
        """Tunneled-node range reachable by letter c from range r."""
        if r.is_empty or not 1 <= c <= self.g.sigma:
            return NodeRange.empty()
        got = self._follow_pairs((r.lo, 1), (r.hi, None), c)
        if got is None:
            return NodeRange.empty()
        return NodeRange(got[0][0], got[1][0])

    def path_search(self, pattern) -> NodeRange:
        """Non-empty iff the pattern labels a path in the original graph;
        the returned range is over tunneled node ranks."""
        got = self._search_pairs(pattern)
        if got is None:
            return NodeRange.empty()
        return NodeRange(got[0][0], got[1][0])

    def __repr__(self) -> str:
        return (f"TunneledGraph(n_t={self.g.n}, m_t={self.g.m}, "
                f"tunnels={len(self.tunnels)})")


def tunnel_graph(g: WheelerGraph, blocks: list[Block],
                 keep_node_map: bool = True) -> TunneledGraph:
    """Collapse the given pairwise-disjoint blocks.

    Every block must pass check_block; width-1 blocks are accepted and act
    as the identity.  Node count drops by sum (w-1)*s, edge count by
    sum (w-1)*(s-1).
    """
    view = _GraphView(g)
    real = []
    for bidx, b in enumerate(blocks):
        res = _check_block(view, b)
        if not res:
            raise ValidationError(
                f"block {bidx} violates condition ({res.condition}): {res.detail}",
                condition=res.condition)
        if b.width > 1:
            real.append(b)
    node_to: dict[int, tuple[int, int, int]] = {}
    for bidx, b in enumerate(real):
        for j, col in enumerate(b.columns, 1):
            for i, v in enumerate(col, 1):
                if v in node_to:
                    raise ValidationError(
                        f"blocks overlap at node {v}", condition="disjoint")
                node_to[v] = (bidx, i, j)

    n = g.n
    phi = array("q", [0] * (n + 1))
    col_rank: dict[tuple[int, int], int] = {}
    nt = 0
    for v in range(1, n + 1):
        info = node_to.get(v)
        if info is not None and info[1] > 1:
            phi[v] = col_rank[(info[0], info[2])]
        else:
            nt += 1
            phi[v] = nt
            if info is not None:
                col_rank[(info[0], info[2])] = nt

    kept = []
    for idx, (u, v, cbyte) in enumerate(view.edges):
        iu = node_to.get(u)
        iv = node_to.get(v)
        if (iu is not None and iv is not None and iu[0] == iv[0]
                and iu[1] == iv[1] and iu[1] >= 2):
            continue  # duplicate subtree edge of a copy >= 2
        kept.append((cbyte, phi[u], u, idx, phi[v], v, iu))
    kept.sort(key=lambda e: e[:4])

    tedges = [(pu, pv, cbyte) for cbyte, pu, u, idx, pv, v, iu in kept]
    tg = encode(EdgeList(nt, tedges))
    mt = len(tedges)

    ipr = bytearray((mt + 7) >> 3)
    opr = bytearray((mt + 7) >> 3)
    seen_target = set()
    seen_sl = set()
    exit_copies = {}
    for pos, (cbyte, pu, u, idx, pv, v, iu) in enumerate(kept):
        if v not in seen_target:
            seen_target.add(v)
            ipr[pos >> 3] |= 1 << (pos & 7)
        if (u, cbyte) not in seen_sl:
            seen_sl.add((u, cbyte))
            opr[pos >> 3] |= 1 << (pos & 7)
        if iu is not None:
            iv = node_to.get(v)
            inside = (iv is not None and iv[0] == iu[0] and iv[1] == iu[1])
            if not inside:
                exit_copies[pos + 1] = iu[1]

    ent_bits = bytearray((nt + 7) >> 3)
    inn_bits = bytearray((nt + 7) >> 3)
    tunnels = []
    for bidx, b in enumerate(real):
        entrance = col_rank[(bidx, 1)]
        ent_bits[(entrance - 1) >> 3] |= 1 << ((entrance - 1) & 7)
        for j in range(2, b.size + 1):
            r = col_rank[(bidx, j)]
            inn_bits[(r - 1) >> 3] |= 1 << ((r - 1) & 7)
        tunnels.append(TunnelRecord(entrance, col_rank[(bidx, b.size)],
                                    b.width, b.size))

    expected = n - sum((b.width - 1) * b.size for b in real)
    if nt != expected:
        raise AssertionError(f"node accounting broke: {nt} != {expected}")

    return TunneledGraph(
        tg,
        BitVec.from_packed(bytes(ipr), mt),
        BitVec.from_packed(bytes(opr), mt),
        BitVec.from_packed(bytes(ent_bits), nt),
        BitVec.from_packed(bytes(inn_bits), nt),
        tunnels,
        exit_copies,
        orig_n=n,
        node_map=phi if keep_node_map else None,
    )
