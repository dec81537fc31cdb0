"""File formats: text graph files, block files, and the binary index.

The binary index starts with magic ``TWGI``, a 16-bit version, and 16-bit
flags, followed by little-endian length-prefixed sections and a trailing
CRC-32 over all preceding bytes.  Any single corrupted byte is caught: the
magic and version have dedicated errors and everything (including them) is
covered by the checksum.
"""

from __future__ import annotations

import struct
import zlib

from .bitvec import BitVec, LabelSeq
from .errors import (
    BadMagicError,
    ChecksumError,
    TruncatedError,
    ValidationError,
    VersionError,
)
from .text_index import TextIndex
from .tunnel import Block, TunneledGraph, TunnelRecord
from .wheeler import EdgeList, WheelerGraph

MAGIC = b"TWGI"
VERSION = 1
_FLAG_TUNNELED = 1
_FLAG_NODE_MAP = 2


# ---------------------------------------------------------------------------
# text graph files


def format_label(byte: int) -> str:
    if 33 <= byte <= 126 and byte != ord("#"):
        return chr(byte)
    return f"\\x{byte:02x}"


def parse_label(tok: str) -> int:
    if len(tok) == 1:
        v = ord(tok)
        if v > 255:
            raise ValidationError(f"label {tok!r} is not a byte")
        return v
    if len(tok) == 4 and tok.startswith("\\x"):
        return int(tok[2:], 16)
    raise ValidationError(f"bad label token {tok!r}")


def parse_pattern(s: str) -> bytes:
    """CLI pattern with \\xNN escapes, latin-1 byte semantics."""
    out = bytearray()
    i = 0
    while i < len(s):
        if s.startswith("\\x", i) and i + 4 <= len(s):
            out.append(int(s[i + 2:i + 4], 16))
            i += 4
        else:
            v = ord(s[i])
            if v > 255:
                raise ValidationError(f"pattern character {s[i]!r} is not a byte")
            out.append(v)
            i += 1
    return bytes(out)


def write_graph_file(fh, el: EdgeList, sigma: int | None = None,
                     meta: dict | None = None) -> None:
    """GraphFile: header ``WG <n> <m> <sigma>`` then one edge per line.
    Structured ``#!`` comments carry tunnel metadata when present."""
    if sigma is None:
        sigma = len({c for _, _, c in el.edges})
    fh.write(f"WG {el.n} {len(el.edges)} {sigma}\n")
    if meta:
        fh.write("#! tunneled\n")
        fh.write(f"#! orig-n {meta['orig_n']}\n")
        fh.write(f"#! iprime {meta['iprime']}\n")
        fh.write(f"#! oprime {meta['oprime']}\n")
        fh.write("#! entrance " + " ".join(map(str, meta["entrance"])) + "\n")
        fh.write("#! inner " + " ".join(map(str, meta["inner"])) + "\n")
        for t in meta["tunnels"]:
            fh.write(f"#! tunnel {t[0]} {t[1]} {t[2]} {t[3]}\n")
        if meta["exit_copies"]:
            pairs = " ".join(f"{j}:{o}" for j, o in sorted(meta["exit_copies"].items()))
            fh.write(f"#! exitcopy {pairs}\n")
    for u, v, c in el.edges:
        fh.write(f"{u} {v} {format_label(c)}\n")


def read_graph_file(fh) -> tuple[EdgeList, int, dict | None]:
    """Returns (edge list in file order, declared sigma, tunnel meta or None)."""
    header = None
    edges = []
    meta: dict | None = None
    declared = None
    for raw in fh:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#!"):
            meta = _parse_meta_line(line[2:].strip(), meta)
            continue
        if line.startswith("#"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 4 or parts[0] != "WG":
                raise ValidationError(f"bad graph header: {line!r}")
            header = (int(parts[1]), int(parts[2]))
            declared = int(parts[3])
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValidationError(f"bad edge line: {line!r}")
        edges.append((int(parts[0]), int(parts[1]), parse_label(parts[2])))
    if header is None:
        raise ValidationError("graph file has no header line")
    n, m = header
    if len(edges) != m:
        raise ValidationError(f"header declares {m} edges, file has {len(edges)}")
    el = EdgeList(n, edges)
    el.check_well_formed()
    return el, declared, meta


def _parse_meta_line(body: str, meta: dict | None) -> dict:
    if meta is None:
        meta = {"tunnels": [], "entrance": [], "inner": [], "exit_copies": {},
                "iprime": "", "oprime": "", "orig_n": 0}
    parts = body.split()
    if not parts:
        return meta
    key = parts[0]
    if key == "tunneled":
        pass
    elif key == "orig-n":
        meta["orig_n"] = int(parts[1])
    elif key in ("iprime", "oprime"):
        meta[key] = parts[1] if len(parts) > 1 else ""
    elif key in ("entrance", "inner"):
        meta[key] = [int(x) for x in parts[1:]]
    elif key == "tunnel":
        meta["tunnels"].append(tuple(int(x) for x in parts[1:5]))
    elif key == "exitcopy":
        for pair in parts[1:]:
            j, o = pair.split(":")
            meta["exit_copies"][int(j)] = int(o)
    else:
        raise ValidationError(f"unknown metadata key {key!r}")
    return meta


def tunneled_graph_meta(tg: TunneledGraph) -> dict:
    nt = tg.g.n
    return {
        "orig_n": tg.orig_n,
        "iprime": tg.iprime.to01(),
        "oprime": tg.oprime.to01(),
        "entrance": [r for r in range(1, nt + 1) if tg.entrance_marks.access(r)],
        "inner": [r for r in range(1, nt + 1) if tg.inner_marks.access(r)],
        "tunnels": [(t.entrance, t.exit, t.width, t.length) for t in tg.tunnels],
        "exit_copies": dict(tg.exit_copies),
    }


def tunneled_graph_from_meta(g: WheelerGraph, meta: dict) -> TunneledGraph:
    records = [TunnelRecord(*t) for t in meta["tunnels"]]
    ent = bytearray((g.n + 7) >> 3)
    inn = bytearray((g.n + 7) >> 3)
    for r in meta["entrance"]:
        ent[(r - 1) >> 3] |= 1 << ((r - 1) & 7)
    for r in meta["inner"]:
        inn[(r - 1) >> 3] |= 1 << ((r - 1) & 7)
    return TunneledGraph(
        g,
        BitVec(meta["iprime"]),
        BitVec(meta["oprime"]),
        BitVec.from_packed(bytes(ent), g.n),
        BitVec.from_packed(bytes(inn), g.n),
        records,
        meta["exit_copies"],
        orig_n=meta["orig_n"] or g.n,
    )


# ---------------------------------------------------------------------------
# block files


def write_blocks_file(fh, blocks: list[Block]) -> None:
    for b in blocks:
        fh.write(f"BLOCK {b.width} {b.size}\n")
        for col in b.columns:
            fh.write(" ".join(map(str, col)) + "\n")


def read_blocks_file(fh) -> list[Block]:
    blocks = []
    cur = None
    for raw in fh:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "BLOCK":
            if len(parts) != 3:
                raise ValidationError(f"bad block header: {line!r}")
            cur = Block(int(parts[1]), int(parts[2]), [])
            blocks.append(cur)
            continue
        if cur is None:
            raise ValidationError("column line before any BLOCK header")
        col = tuple(int(x) for x in parts)
        if len(col) != cur.width:
            raise ValidationError(
                f"column {line!r} has {len(col)} entries, width is {cur.width}")
        cur.columns.append(col)
    for b in blocks:
        if len(b.columns) != b.size:
            raise ValidationError(
                f"block declares size {b.size} but has {len(b.columns)} columns")
    return blocks


# ---------------------------------------------------------------------------
# binary index files


def _pack_symbols(ids, sigma: int) -> bytes:
    width = max(1, (sigma - 1).bit_length()) if sigma > 1 else 1
    total = len(ids) * width
    buf = bytearray((total + 7) >> 3)
    pos = 0
    for v in ids:
        val = v - 1
        for b in range(width):
            if (val >> b) & 1:
                buf[pos >> 3] |= 1 << (pos & 7)
            pos += 1
    return bytes(buf)


def _unpack_symbols(data: bytes, count: int, sigma: int) -> list[int]:
    width = max(1, (sigma - 1).bit_length()) if sigma > 1 else 1
    if len(data) < (count * width + 7) >> 3:
        raise TruncatedError("label section shorter than declared")
    out = []
    pos = 0
    for _ in range(count):
        val = 0
        for b in range(width):
            val |= ((data[pos >> 3] >> (pos & 7)) & 1) << b
            pos += 1
        out.append(val + 1)
    return out


def _section(payload: bytes) -> bytes:
    return struct.pack("<I", len(payload)) + payload


class _Reader:
    def __init__(self, data: bytes, off: int):
        self.data = data
        self.off = off

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.data):
            raise TruncatedError("file ends inside a declared section")
        out = self.data[self.off:self.off + n]
        self.off += n
        return out

    def section(self) -> bytes:
        (ln,) = struct.unpack("<I", self.take(4))
        return self.take(ln)


def serialize_index(ix: TextIndex) -> bytes:
    tg = ix.tg
    g = tg.g
    flags = 0
    if tg.tunnels:
        flags |= _FLAG_TUNNELED
    if tg.node_map is not None:
        flags |= _FLAG_NODE_MAP
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<HH", VERSION, flags)

    buf += _section(struct.pack("<QQQIIII", ix.n, g.n, g.m, g.sigma,
                                ix.sample_rate_n, ix.sample_rate_t,
                                len(tg.tunnels)))
    buf += _section(bytes(g.alphabet))
    buf += _section(struct.pack(f"<{g.sigma + 1}Q", *g.C[1:g.sigma + 2]))
    l_ids = [g.L.access(i) for i in range(1, g.m + 1)]
    buf += _section(_pack_symbols(l_ids, g.sigma))
    buf += _section(g.I.to_packed())
    buf += _section(g.O.to_packed())
    buf += _section(tg.iprime.to_packed())
    buf += _section(tg.oprime.to_packed())
    buf += _section(tg.entrance_marks.to_packed())
    buf += _section(tg.inner_marks.to_packed())
    buf += _section(b"".join(struct.pack("<QQII", t.entrance, t.exit, t.width,
                                         t.length) for t in tg.tunnels))
    skip_items = sorted(ix.skip.items())
    buf += _section(struct.pack("<I", len(skip_items)) +
                    b"".join(struct.pack("<QQQ", node, tgt, dist)
                             for node, (tgt, dist) in skip_items))
    back_items = [(e, d, node) for e, lst in sorted(ix.back.items())
                  for d, node in lst]
    buf += _section(struct.pack("<I", len(back_items)) +
                    b"".join(struct.pack("<QQQ", *it) for it in back_items))
    loc_items = sorted(ix.loc.items())
    buf += _section(struct.pack("<I", len(loc_items)) +
                    b"".join(struct.pack("<QQ", node, pos)
                             for node, pos in loc_items))
    buf += _section(struct.pack("<I", len(ix.cnt)) +
                    b"".join(struct.pack("<Q", v) for v in ix.cnt))
    if tg.node_map is not None:
        buf += _section(b"".join(struct.pack("<Q", v) for v in tg.node_map))
    buf += struct.pack("<I", zlib.crc32(bytes(buf)))
    return bytes(buf)


def deserialize_index(data: bytes) -> TextIndex:
    if len(data) < 12:
        raise TruncatedError("file too short to be an index")
    if data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}")
    stored = struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(data[:-4]) != stored:
        raise ChecksumError("checksum mismatch: the file is corrupted")
    version, flags = struct.unpack("<HH", data[4:8])
    if version != VERSION:
        raise VersionError(f"format version {version}, reader supports {VERSION}")

    try:
        return _parse_sections(data, flags)
    except struct.error as exc:
        raise TruncatedError(f"malformed section: {exc}") from exc


def _parse_sections(data: bytes, flags: int) -> TextIndex:
    rd = _Reader(data[:-4], 8)
    n, nt, mt, sigma, rate_n, rate_t, ntun = struct.unpack("<QQQIIII", rd.section())
    alphabet = list(rd.section())
    if len(alphabet) != sigma:
        raise TruncatedError("alphabet section has the wrong size")
    craw = rd.section()
    cvals = struct.unpack(f"<{sigma + 1}Q", craw)
    C = [0] + list(cvals)
    l_ids = _unpack_symbols(rd.section(), mt, sigma)
    I = BitVec.from_packed(rd.section(), nt + mt + 1)
    O = BitVec.from_packed(rd.section(), nt + mt + 1)
    ipr = BitVec.from_packed(rd.section(), mt)
    opr = BitVec.from_packed(rd.section(), mt)
    ent = BitVec.from_packed(rd.section(), nt)
    inn = BitVec.from_packed(rd.section(), nt)
    traw = rd.section()
    if len(traw) != 24 * ntun:
        raise TruncatedError("tunnel record section has the wrong size")
    tunnels = [TunnelRecord(*struct.unpack("<QQII", traw[i:i + 24]))
               for i in range(0, len(traw), 24)]

    sraw = rd.section()
    (cnt_skip,) = struct.unpack("<I", sraw[:4])
    skip = {}
    for i in range(cnt_skip):
        node, tgt, dist = struct.unpack("<QQQ", sraw[4 + 24 * i:4 + 24 * (i + 1)])
        skip[node] = (tgt, dist)
    braw = rd.section()
    (cnt_back,) = struct.unpack("<I", braw[:4])
    back: dict[int, list] = {}
    for i in range(cnt_back):
        e, d, node = struct.unpack("<QQQ", braw[4 + 24 * i:4 + 24 * (i + 1)])
        back.setdefault(e, []).append((d, node))
    for lst in back.values():
        lst.sort()
    lraw = rd.section()
    (cnt_loc,) = struct.unpack("<I", lraw[:4])
    loc = {}
    for i in range(cnt_loc):
        node, pos = struct.unpack("<QQ", lraw[4 + 16 * i:4 + 16 * (i + 1)])
        loc[node] = pos
    craw2 = rd.section()
    (cnt_n,) = struct.unpack("<I", craw2[:4])
    cnt = [struct.unpack("<Q", craw2[4 + 8 * i:4 + 8 * (i + 1)])[0]
           for i in range(cnt_n)]
    node_map = None
    if flags & _FLAG_NODE_MAP:
        mraw = rd.section()
        from array import array
        node_map = array("q", struct.unpack(f"<{len(mraw) // 8}Q", mraw))
    if rd.off != len(rd.data):
        raise TruncatedError("trailing bytes after the last section")

    g = WheelerGraph(nt, mt, sigma, LabelSeq(l_ids, sigma), C, I, O, alphabet)
    tg = TunneledGraph(g, ipr, opr, ent, inn, tunnels,
                       _rebuild_exit_copies(g, ent, inn, tunnels),
                       orig_n=n, node_map=node_map)
    return TextIndex(tg, n, rate_n, rate_t, skip, back, loc, cnt)


def _rebuild_exit_copies(g: WheelerGraph, ent: BitVec, inn: BitVec,
                         tunnels: list[TunnelRecord]) -> dict[int, int]:
    """String-tunnel exits leave only from the exit column; the copy index
    is the edge's slot among the exit's out-edges."""
    copies = {}
    for t in tunnels:
        lstart = g._lstart[t.exit]
        deg = g.outdeg(t.exit)
        for o in range(1, deg + 1):
            p = lstart + o
            c = g.L.access(p)
            j = g.C[c] + g.L.rank(p, c)
            copies[j] = o
    return copies


def save_index(ix: TextIndex, path) -> None:
    data = serialize_index(ix)
    with open(path, "wb") as fh:
        fh.write(data)


def load_index(path) -> TextIndex:
    with open(path, "rb") as fh:
        data = fh.read()
    return deserialize_index(data)
