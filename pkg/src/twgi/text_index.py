"""Text self-index on a tunneled Wheeler graph.

The Wheeler graph of a string is a path whose node order is the colex order
of prefixes, i.e. the suffix array of the reversed text; its label array is
the BWT of the reversed text.  After tunneling, count / locate / extract are
answered with sampling structures:

* skip pointers inside long tunnels (with backpointers from the exit),
* text-position samples on the run-contracted node sequence for locate and
  extract,
* cumulative tunnel-width sums at aligned ranks for count.

All forward walks use partial rank: the next edge's label is read directly
from L at the node's offset, so the rank is always taken at a position
holding that same symbol.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .bitvec import BitVec, LabelSeq
from .errors import BoundsError, NotFoundError, ValidationError
from .tunnel import TraversalPos, TunneledGraph, find_string_blocks, tunnel_graph
from .wheeler import WheelerGraph


# ---------------------------------------------------------------------------
# suffix array construction (induced sorting)


def suffix_array(seq) -> list[int]:
    """Suffix array of seq plus a virtual terminator smaller than every
    symbol.  Returns len(seq)+1 start positions; position len(seq) is the
    empty suffix and always sorts first."""
    s = [v + 1 for v in seq]
    s.append(0)
    return _sais(s, max(s) + 1)


def _sais(s: list[int], alphabet: int) -> list[int]:
    n = len(s)
    if n == 1:
        return [0]
    stype = [False] * n
    stype[n - 1] = True
    for i in range(n - 2, -1, -1):
        stype[i] = s[i] < s[i + 1] or (s[i] == s[i + 1] and stype[i + 1])
    bucket = [0] * (alphabet + 1)
    for ch in s:
        bucket[ch] += 1

    def heads():
        out, acc = [0] * (alphabet + 1), 0
        for c in range(alphabet + 1):
            out[c] = acc
            acc += bucket[c]
        return out

    def tails():
        out, acc = [0] * (alphabet + 1), 0
        for c in range(alphabet + 1):
            acc += bucket[c]
            out[c] = acc
        return out

    def induce(sa):
        h = heads()
        for i in range(n):
            p = sa[i]
            if p > 0 and not stype[p - 1]:
                c = s[p - 1]
                sa[h[c]] = p - 1
                h[c] += 1
        t = tails()
        for i in range(n - 1, -1, -1):
            p = sa[i]
            if p > 0 and stype[p - 1]:
                c = s[p - 1]
                t[c] -= 1
                sa[t[c]] = p - 1

    lms = [i for i in range(1, n) if stype[i] and not stype[i - 1]]
    lms_set = set(lms)

    sa = [-1] * n
    t = tails()
    for i in reversed(lms):
        c = s[i]
        t[c] -= 1
        sa[t[c]] = i
    induce(sa)

    order = [p for p in sa if p in lms_set]
    names = {}
    prev = None
    cur = -1
    for p in order:
        if prev is None or not _lms_equal(s, stype, prev, p):
            cur += 1
        names[p] = cur
        prev = p
    reduced = [names[i] for i in lms]
    if cur + 1 == len(lms):
        sub = [0] * len(lms)
        for i, nm in enumerate(reduced):
            sub[nm] = i
    else:
        sub = _sais(reduced, cur + 1)
    ordered_lms = [lms[i] for i in sub]

    sa = [-1] * n
    t = tails()
    for i in reversed(ordered_lms):
        c = s[i]
        t[c] -= 1
        sa[t[c]] = i
    induce(sa)
    return sa


def _lms_equal(s, stype, a, b) -> bool:
    if a == b:
        return True
    n = len(s)
    if a == n - 1 or b == n - 1:
        return False
    i = 0
    while True:
        a_lms = i > 0 and stype[a + i] and not stype[a + i - 1]
        b_lms = i > 0 and stype[b + i] and not stype[b + i - 1]
        if i > 0 and a_lms and b_lms:
            return True
        if a_lms != b_lms or s[a + i] != s[b + i]:
            return False
        i += 1


# ---------------------------------------------------------------------------
# Wheeler graph of a string


def _string_graph(text: bytes):
    """Succinct graph plus the node-index -> Wheeler-rank table.

    rank[i] is the Wheeler rank of the node reached after i-1 text
    characters (i = 1..|T|+1): the colex rank of the prefix of length i-1.
    """
    n = len(text)
    sa = suffix_array(text[::-1])
    isa = [0] * (n + 1)
    for idx, p in enumerate(sa):
        isa[p] = idx
    rank = [0] * (n + 2)
    for i in range(1, n + 2):
        rank[i] = isa[n - (i - 1)] + 1

    alphabet = sorted(set(text))
    sigma = len(alphabet)
    to_id = {b: i + 1 for i, b in enumerate(alphabet)}
    out_label = [0] * (n + 2)  # by Wheeler rank; 0 = sink
    for i in range(1, n + 1):
        out_label[rank[i]] = to_id[text[i - 1]]
    sink = rank[n + 1]

    l_ids = [out_label[r] for r in range(1, n + 2) if r != sink]
    counts = [0] * (sigma + 2)
    for cid in l_ids:
        counts[cid] += 1
    C = [0] * (sigma + 2)
    for c in range(1, sigma + 1):
        C[c + 1] = C[c] + counts[c]

    # the source (empty prefix) always has rank 1; every other node has
    # in-degree exactly 1
    i_bits = [1]
    for _ in range(n):
        i_bits.extend((1, 0))
    i_bits.append(1)
    o_bits = []
    for r in range(1, n + 2):
        o_bits.append(1)
        if r != sink:
            o_bits.append(0)
    o_bits.append(1)

    g = WheelerGraph(n + 1, n, sigma, LabelSeq(l_ids, sigma), C,
                     BitVec(i_bits), BitVec(o_bits), alphabet)
    return g, rank


def build_graph_from_text(text: bytes) -> WheelerGraph:
    """Wheeler graph of the string: a path in colex-of-prefix order whose
    label array is the BWT of the reversed text."""
    return _string_graph(text)[0]


# ---------------------------------------------------------------------------
# the index


@dataclass
class StepCounter:
    """Counts graph traversal operations (forward steps and skip jumps)."""

    steps: int = 0


class TextIndex:
    """Tunneled FM-index over a byte string: count, locate, extract."""

    def __init__(self, tg: TunneledGraph, n: int, sample_rate_n: int,
                 sample_rate_t: int, skip, back, loc, cnt):
        self.tg = tg
        self.n = n                       # |T| + 1, node count of the original graph
        self.sample_rate_n = sample_rate_n
        self.sample_rate_t = sample_rate_t
        self.skip = skip                 # pointer node -> (exit rank, distance)
        self.back = back                 # exit rank -> [(distance, node)] ascending
        self.loc = loc                   # non-tunnel node rank -> text position
        self.cnt = cnt                   # cumulative widths at rank multiples
        self.ext = sorted((pos, node) for node, pos in loc.items())
        self._ext_pos = [p for p, _ in self.ext]

    @property
    def text_len(self) -> int:
        return self.n - 1

    # -- forward walking -----------------------------------------------------

    def _fstep(self, node: int, off: int, counter: StepCounter):
        """One simulated original step: returns (node', off', label byte)."""
        g = self.tg.g
        lstart = g._lstart[node]
        deg = g._lstart[node + 1] - lstart
        if deg == 0:
            raise BoundsError("walked past the sink")
        slot = off if (deg > 1 and self.tg.is_tunnel_node(node)) else 1
        p = lstart + slot
        c = g.L.access(p)
        j = g.C[c] + g.L.partial_rank(p)
        r = g.edge_target(j)
        counter.steps += 1
        if self.tg.is_inner(r):
            noff = off
        elif self.tg.is_entrance(r):
            noff = self.tg.enter_offset(j, r)
        else:
            noff = 1
        return r, noff, g.alphabet[c - 1]

    def node_width(self, v: int, counter: StepCounter | None = None) -> int:
        """Width of the tunnel containing v (1 outside tunnels): follow the
        tunnel to its exit and read the exit's out-degree."""
        counter = counter if counter is not None else StepCounter()
        if not self.tg.is_tunnel_node(v):
            return 1
        g = self.tg.g
        cur = v
        while True:
            ptr = self.skip.get(cur)
            if ptr is not None:
                cur = ptr[0]
                counter.steps += 1
                continue
            deg = g.outdeg(cur)
            if deg != 1:
                return deg
            p = g._lstart[cur] + 1
            c = g.L.access(p)
            cur = g.edge_target(g.C[c] + g.L.partial_rank(p))
            counter.steps += 1

    # -- counting --------------------------------------------------------------

    def count(self, pattern: bytes, counter: StepCounter | None = None) -> int:
        """Occurrences of the pattern in the text (|T|+1 for the empty
        pattern: every node is an occurrence)."""
        counter = counter if counter is not None else StepCounter()
        if len(pattern) == 0:
            return self.n
        got = self.tg._search_pairs(pattern)
        if got is None:
            return 0
        (lo, lo_off), (hi, hi_off) = got
        w_hi = self.node_width(hi, counter)
        if hi_off is None:
            hi_off = w_hi
        total = self._range_weight(lo, hi, counter)
        return total - (lo_off - 1) - (w_hi - hi_off)

    def _range_weight(self, lo: int, hi: int, counter: StepCounter) -> int:
        """Sum of w(v) over ranks [lo..hi] using the aligned samples plus at
        most ~2*sample_rate_t boundary width evaluations."""
        rt = self.sample_rate_t
        a = (lo - 1 + rt - 1) // rt   # smallest aligned index >= lo-1
        b = hi // rt                  # largest aligned index <= hi
        total = 0
        if a <= b:
            total += self.cnt[b] - self.cnt[a]
            for v in range(lo, a * rt + 1):
                total += self.node_width(v, counter)
            for v in range(b * rt + 1, hi + 1):
                total += self.node_width(v, counter)
        else:
            for v in range(lo, hi + 1):
                total += self.node_width(v, counter)
        return total

    # -- locating ----------------------------------------------------------------

    def locate_one(self, p: TraversalPos, counter: StepCounter | None = None) -> int:
        """Text position (1-based) of the original node at the simulated
        position p: walk forward to the next text-order sample, skipping
        long tunnels, and subtract the travelled distance."""
        counter = counter if counter is not None else StepCounter()
        node, off = p.node, p.offset
        travelled = 0
        while True:
            pos = self.loc.get(node)
            if pos is not None:
                return pos - travelled
            ptr = self.skip.get(node)
            if ptr is not None:
                node = ptr[0]
                travelled += ptr[1]
                counter.steps += 1
                continue
            node, off, _ = self._fstep(node, off, counter)
            travelled += 1

    def locate(self, pattern: bytes, limit: int | None = None,
               counter: StepCounter | None = None) -> list[int]:
        """Ascending start positions of the pattern (all, or first `limit`
        found).  The empty pattern is rejected."""
        if len(pattern) == 0:
            raise ValidationError("locate needs a non-empty pattern")
        counter = counter if counter is not None else StepCounter()
        got = self.tg._search_pairs(pattern)
        if got is None:
            return []
        (lo, lo_off), (hi, hi_off) = got
        out = []
        plen = len(pattern)
        for v in range(lo, hi + 1):
            w_v = self.node_width(v, counter)
            first = lo_off if v == lo else 1
            last = (hi_off if hi_off is not None else w_v) if v == hi else w_v
            for o in range(first, last + 1):
                end_pos = self.locate_one(TraversalPos(v, o), counter)
                out.append(end_pos - plen)
                if limit is not None and len(out) >= limit:
                    out.sort()
                    assert len(set(out)) == len(out), "duplicate occurrence"
                    return out
        out.sort()
        assert len(set(out)) == len(out), "duplicate occurrence"
        return out

    # -- extracting -----------------------------------------------------------------

    def extract(self, start: int, length: int,
                counter: StepCounter | None = None) -> bytes:
        """T[start .. start+length-1] (1-based, inclusive)."""
        if start < 1 or length < 0 or start + length - 1 > self.text_len:
            raise BoundsError(
                f"extract({start},{length}) outside text of length {self.text_len}")
        if length == 0:
            return b""
        counter = counter if counter is not None else StepCounter()
        idx = bisect_right(self._ext_pos, start) - 1
        if idx >= 0:
            pos, node = self.ext[idx]
            off = 1
        else:
            # the first sample may sit past `start` when the source node
            # lives inside a tunnel; the source is always rank 1, copy 1
            pos, node, off = 1, 1, 1
        while pos < start:
            ptr = self.skip.get(node)
            if ptr is not None:
                exit_rank, dist = ptr
                if pos + dist <= start:
                    node = exit_rank
                    pos += dist
                    counter.steps += 1
                    continue
                # target lies inside this tunnel: hop to the exit's
                # backpointer closest before the target, then plain-walk
                # (no pointer sits between that backpointer and the target)
                exit_pos = pos + dist
                node, pos = self._back_hop(exit_rank, exit_pos, start, node, pos)
                counter.steps += 1
                while pos < start:
                    node, off, _ = self._fstep(node, off, counter)
                    pos += 1
                break
            node, off, _ = self._fstep(node, off, counter)
            pos += 1
        out = bytearray()
        for _ in range(length):
            node, off, byte = self._fstep(node, off, counter)
            out.append(byte)
        return bytes(out)

    def _back_hop(self, exit_rank: int, exit_pos: int, target: int,
                  cur_node: int, cur_pos: int):
        """Best pointer node at or before the target position."""
        best_node, best_pos = cur_node, cur_pos
        for dist_b, node_b in self.back.get(exit_rank, ()):
            pos_b = exit_pos - dist_b
            if cur_pos < pos_b <= target and pos_b > best_pos:
                best_node, best_pos = node_b, pos_b
        return best_node, best_pos

    # -- bookkeeping ------------------------------------------------------------------

    def stats(self) -> dict:
        return {
            "n": self.n,
            "n_t": self.tg.g.n,
            "m_t": self.tg.g.m,
            "sigma": self.tg.g.sigma,
            "tunnels": len(self.tg.tunnels),
            "sample_rate_n": self.sample_rate_n,
            "sample_rate_t": self.sample_rate_t,
        }

    def __repr__(self) -> str:
        return (f"TextIndex(|T|={self.text_len}, n_t={self.tg.g.n}, "
                f"tunnels={len(self.tg.tunnels)})")


def build_index(text: bytes, *, sample_rate_n: int | None = None,
                sample_rate_t: int | None = None, min_width: int = 2,
                min_length: int = 2, tunneling: bool = True,
                keep_node_map: bool = False) -> TextIndex:
    """Build the full index: string graph, block discovery, tunneling, and
    all sampling structures.  With tunneling off this degenerates to a plain
    FM-index over the Wheeler graph."""
    if isinstance(text, str):
        raise TypeError("text must be bytes")
    text = bytes(text)
    g, rank = _string_graph(text)
    blocks = find_string_blocks(g, min_width, min_length) if tunneling else []
    expanded = [sb.expand(g) for sb in blocks]
    tg = tunnel_graph(g, expanded, keep_node_map=True)
    n = g.n
    nt = tg.g.n
    if (sample_rate_n is not None and sample_rate_n < 1) or \
            (sample_rate_t is not None and sample_rate_t < 1):
        raise ValidationError("sample rates must be >= 1")
    rate_n = sample_rate_n if sample_rate_n is not None else \
        max(1, math.ceil(math.log2(max(2, n))))
    rate_t = sample_rate_t if sample_rate_t is not None else \
        max(1, math.ceil(math.log2(max(2, nt))))

    phi = tg.node_map
    real = [b for b in expanded if b.width > 1]
    block_of = {}
    for bidx, blk in enumerate(real):
        for col in blk.columns:
            for v in col:
                block_of[v] = bidx

    # run-contracted text-order sequence: one element per non-tunnel node,
    # one per full tunnel traversal
    elements = []  # (first text position, tunneled node or None, is_tunnel)
    i = 1
    while i <= n:
        r = rank[i]
        b = block_of.get(r)
        if b is None:
            elements.append((i, phi[r], False))
            i += 1
        else:
            j = i
            while j + 1 <= n and block_of.get(rank[j + 1]) == b:
                j += 1
            elements.append((i, None, True))
            i = j + 1

    nelem = len(elements)
    wanted = set(range(rate_n, nelem + 1, rate_n))
    wanted.add(1)
    wanted.add(nelem)
    loc = {}
    for k in sorted(wanted):
        kk = k
        while elements[kk - 1][2]:  # shift off tunnels (chains included)
            kk += 1
        pos, tnode, _ = elements[kk - 1]
        loc[tnode] = pos

    skip = {}
    back = {}
    for blk in real:
        s = blk.size
        if s < rate_t:
            continue
        exit_rank = phi[blk.columns[s - 1][0]]
        ptrs = []
        for j in range(rate_t, s, rate_t):
            nodej = phi[blk.columns[j - 1][0]]
            skip[nodej] = (exit_rank, s - j)
            ptrs.append((s - j, nodej))
        ptrs.sort()
        back[exit_rank] = ptrs

    widths = np.ones(nt + 1, dtype=np.int64)
    for blk in real:
        for col in blk.columns:
            widths[phi[col[0]]] = blk.width
    cumulative = np.cumsum(widths[1:])
    if nt and int(cumulative[-1]) != n:
        raise AssertionError("width conservation broke: every original node "
                             "must be counted exactly once")
    cnt = [0] + [int(cumulative[k * rate_t - 1]) for k in range(1, nt // rate_t + 1)]

    if not keep_node_map:
        tg.node_map = None
    return TextIndex(tg, n, rate_n, rate_t, skip, back, loc, cnt)
