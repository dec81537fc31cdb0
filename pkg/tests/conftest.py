"""Shared oracles and generators for the test suite.

Everything here is deliberately independent of the library's own formulas:
colex orders come from sorting reversed prefixes, occurrence counts from
naive scans, and random Wheeler graphs are built constructively so that the
axioms hold by construction.
"""

import random

from twgi.errors import NotFoundError
from twgi.tunnel import Block, TraversalPos
from twgi.wheeler import EdgeList, validate_wheeler


def colex_string_graph(text: bytes):
    """Wheeler graph of a string via brute-force colex sort of prefixes.

    Returns (EdgeList, rank) where rank[k] is the Wheeler rank of the node
    reached after reading the length-k prefix (k = 0..len(text)).
    """
    n = len(text)
    prefs = [text[:k][::-1] for k in range(n + 1)]
    order = sorted(range(n + 1), key=lambda k: prefs[k])
    rank = [0] * (n + 1)
    for r, k in enumerate(order):
        rank[k] = r + 1
    edges = [(rank[k], rank[k + 1], text[k]) for k in range(n)]
    return EdgeList(n + 1, edges), rank


def naive_count(text: bytes, pat: bytes) -> int:
    if not pat:
        return len(text) + 1
    return sum(1 for i in range(len(text) - len(pat) + 1)
               if text[i:i + len(pat)] == pat)


def naive_locate(text: bytes, pat: bytes) -> list[int]:
    """1-based start positions of pat in text."""
    m = len(pat)
    return [i + 1 for i in range(len(text) - m + 1) if text[i:i + m] == pat]


def edgelist_step(el: EdgeList, v: int, c: int, k: int):
    """k-th c-labeled out-edge target of node v, in (label, source, input)
    order; None when it does not exist."""
    seen = 0
    for u, w, lab in el.edges:
        if u == v and lab == c:
            seen += 1
            if seen == k:
                return w
    return None


def random_wheeler_edge_list(rng: random.Random, n_max=20, sigma_max=4,
                             allow_sources=True) -> EdgeList:
    """Constructively generate a valid Wheeler graph.

    Nodes with in-edges are grouped into label zones ordered by label; the
    edges into each zone pair sorted sources with sorted targets, which makes
    axioms (i) and (ii) hold by construction.
    """
    n = rng.randint(1, n_max)
    z = rng.randint(1 if allow_sources else 0, n) if allow_sources else 0
    z = min(z, n)
    sigma = rng.randint(1, sigma_max)
    labels = sorted(rng.randint(0, sigma - 1) for _ in range(n - z))
    edges = []
    pos = z + 1
    while pos <= n:
        c = labels[pos - z - 1]
        hi = pos
        while hi + 1 <= n and labels[hi + 1 - z - 1] == c:
            hi += 1
        targets = []
        for r in range(pos, hi + 1):
            for _ in range(rng.randint(1, 3)):
                targets.append(r)
        sources = sorted(rng.randint(1, n) for _ in targets)
        edges.extend((u, v, 97 + c) for u, v in zip(sources, sorted(targets)))
        pos = hi + 1
    el = EdgeList(n, edges)
    assert validate_wheeler(el), "generator must produce valid graphs"
    return el


def fibonacci_word(nbytes: int) -> bytes:
    a, b = b"a", b"ab"
    while len(b) < nbytes:
        a, b = b, b + a
    return b[:nbytes]


def copy_paste_mutate(rng: random.Random, size: int, sigma: int) -> bytes:
    alpha = bytes(range(97, 97 + sigma)) if sigma <= 26 else bytes(range(256))[:sigma]
    out = bytearray(rng.choice(alpha) for _ in range(max(4, size // 16)))
    while len(out) < size:
        if rng.random() < 0.8 and len(out) > 4:
            start = rng.randrange(len(out))
            span = rng.randint(1, min(len(out) - start, size - len(out)))
            out += out[start:start + span]
        else:
            out.append(rng.choice(alpha))
        if rng.random() < 0.15:
            out[rng.randrange(len(out))] = rng.choice(alpha)
    return bytes(out[:size])


def random_text(rng: random.Random, size: int, sigma: int) -> bytes:
    if sigma <= 26:
        alpha = bytes(range(97, 97 + sigma))
    else:
        alpha = bytes(range(sigma))
    return bytes(rng.choice(alpha) for _ in range(size))


def fig1_edge_list() -> EdgeList:
    """A 35-node Wheeler graph embedding the two label-isomorphic 7-node
    trees of width 2, with root in-degrees 2 vs 1 and per-copy exit counts
    that differ (3 vs 1 'c'-exits, 2 vs 0 'a'-exits)."""
    a, b, c = 97, 98, 99
    edges = [
        (17, 9, a), (18, 9, a), (16, 8, a), (19, 10, a), (20, 11, a),
        (10, 5, a), (11, 6, a), (34, 14, a), (34, 15, a), (26, 13, a),
        (21, 12, a), (14, 7, a),
        (2, 17, b), (3, 17, b), (4, 18, b), (1, 16, b), (8, 19, b),
        (9, 20, b), (31, 24, b), (32, 25, b), (20, 21, b), (25, 23, b),
        (35, 26, b), (21, 22, b),
        (8, 31, c), (9, 32, c), (31, 34, c), (32, 35, c), (5, 27, c),
        (6, 28, c), (6, 29, c), (6, 30, c), (14, 33, c),
    ]
    return EdgeList(35, edges)


def fig1_block() -> Block:
    return Block(2, 7, [(8, 9), (19, 20), (31, 32), (10, 11), (24, 25),
                        (34, 35), (5, 6)])


def unequal_exit_graph():
    """Width-2 single-column tunnel where copy 1 has no 'd'-exit but copy 2
    does; naive offset arithmetic misattributes the exit here."""
    el = EdgeList(7, [(2, 3, 97), (1, 4, 98), (3, 5, 99), (4, 6, 99),
                      (6, 7, 100)])
    return el, [Block(2, 1, [(5, 6)])]


def chain_graph(depth: int = 3):
    """`depth` single-column tunnels in sequence: every exit lands straight
    on the next entrance."""
    n = 2 + 2 * depth
    edges = [(1, 3, 97), (2, 4, 97)]
    for d in range(depth - 1):
        base = 3 + 2 * d
        edges.append((base, base + 2, 98 + d))
        edges.append((base + 1, base + 3, 98 + d))
    el = EdgeList(n, edges)
    blocks = [Block(2, 1, [(3 + 2 * d, 4 + 2 * d)]) for d in range(depth - 1)]
    return el, blocks


def block_offsets(blocks) -> dict[int, int]:
    """Original rank -> tunnel offset (row index) for block members."""
    out = {}
    for b in blocks:
        if b.width == 1:
            continue
        for col in b.columns:
            for i, v in enumerate(col, 1):
                out[v] = i
    return out


def assert_simulation_equal(el: EdgeList, tg, blocks) -> int:
    """Exhaustively compare tg.step against the untunneled edge list over
    every (node, symbol, ordinal), including not-found agreement.  Returns
    the number of positions checked."""
    offsets = block_offsets(blocks)
    phi = tg.node_map
    alphabet = sorted({c for _, _, c in el.edges})
    checked = 0
    for v in range(1, el.n + 1):
        pos = TraversalPos(phi[v], offsets.get(v, 1))
        for byte in alphabet:
            cid = tg.g.label_id(byte)
            k = 0
            while True:
                k += 1
                want = edgelist_step(el, v, byte, k)
                if want is None:
                    if cid is not None:
                        try:
                            got = tg.step(pos, cid, k)
                        except NotFoundError:
                            pass
                        else:
                            raise AssertionError(
                                f"step({v},{byte!r},{k}) found {got}, expected none")
                    break
                got = tg.step(pos, cid, k)
                expect = TraversalPos(phi[want], offsets.get(want, 1))
                assert got == expect, (
                    f"step({v},{byte!r},{k}) = {got}, expected {expect}")
                checked += 1
    return checked


def make_patterns(rng: random.Random, text: bytes, count: int,
                  max_len: int = 32, min_len: int = 1) -> list[bytes]:
    """Mixed positive/negative patterns drawn from and around the text."""
    pats = []
    n = len(text)
    alpha = sorted(set(text)) or [97]
    while len(pats) < count:
        roll = rng.random()
        ln = rng.randint(min_len, max_len)
        if roll < 0.6 and n:
            i = rng.randrange(n)
            p = bytearray(text[i:i + min(ln, n - i)])
            if not p:
                continue
            if roll < 0.15:  # mutate one byte: usually turns it negative
                p[rng.randrange(len(p))] = rng.choice(alpha) ^ 1
            pats.append(bytes(p))
        else:
            pats.append(bytes(rng.choice(alpha) for _ in range(ln)))
    return pats
