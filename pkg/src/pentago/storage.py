"""Durable block-indexed solution files with random access to single blocks.

File layout (all integers little-endian):

    header:   magic b"SPGO1", version u8, slice u16, nsections u32,
              nblocks u64                                   (20 bytes)
    sections: per section: counts u8[8] (b0,w0,..,b3,w3), dims u16[4]
                                                            (16 bytes each)
    index:    per block: section u32, coords u8[4], flags u8, pad u8[3],
              offset u64, comp_len u32, raw_len u32, codec u8, pad u8[7],
              checksum u64                                  (44 bytes each)
    payloads: concatenated compressed blocks, in index order

Blocks are sorted by (section ordinal, coords); offsets increase and do
not overlap.  flags bit 0 marks a sparse block whose raw payload is
``u32 count, count * u32 in-block offsets, count * 64-byte supers``;
dense raw payloads are just ``extent-product * 64`` bytes of supers.
The checksum is CRC-64/XZ (polynomial 0x42F0E1EBA9EA3693, reflected,
init and xorout all-ones) over the compressed payload, so integrity is
codec-independent.  Codec 0 is identity and always supported; codec 1
is zlib.  Any block is readable knowing only the header and index.
"""

from __future__ import annotations

import os
import struct
import urllib.request
import zlib
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from numba import njit

from . import layout as L

MAGIC = b"SPGO1"
VERSION = 1
FLAG_SPARSE = 1

_HEADER = struct.Struct("<5sBHIQ")
_SECTION = struct.Struct("<8B4H")
_BLOCK = struct.Struct("<I4B B3x Q I I B 7x Q")
SAMPLE_RECORD = 72  # 8-byte board key + 64-byte supervalue


class ChecksumMismatch(IOError):
    pass


class UnknownCodec(IOError):
    pass


class BlockNotFound(KeyError):
    pass


class FormatError(IOError):
    pass


# ---------------------------------------------------------------------------
# CRC-64/XZ

_CRC_POLY = 0xC96C5795D7870F42  # 0x42F0E1EBA9EA3693 bit-reflected


def _crc_table():
    t = np.zeros(256, dtype=np.uint64)
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ _CRC_POLY if c & 1 else c >> 1
        t[i] = c
    return t


_CRC_TABLE = _crc_table()


@njit(cache=True)
def _crc64_nb(table, data, crc):
    for i in range(data.shape[0]):
        crc = table[(crc ^ np.uint64(data[i])) & np.uint64(0xFF)] ^ (crc >> np.uint64(8))
    return crc


def crc64(data: bytes) -> int:
    arr = np.frombuffer(data, dtype=np.uint8)
    crc = _crc64_nb(_CRC_TABLE, arr, np.uint64(0xFFFFFFFFFFFFFFFF))
    return int(crc ^ np.uint64(0xFFFFFFFFFFFFFFFF))


# ---------------------------------------------------------------------------
# Codecs

CODEC_IDENTITY = 0
CODEC_ZLIB = 1


def encode_payload(codec: int, raw: bytes) -> bytes:
    if codec == CODEC_IDENTITY:
        return raw
    if codec == CODEC_ZLIB:
        return zlib.compress(raw, 1)
    raise UnknownCodec(f"codec {codec}")


def decode_payload(codec: int, comp: bytes, raw_len: int) -> bytes:
    if codec == CODEC_IDENTITY:
        out = comp
    elif codec == CODEC_ZLIB:
        out = zlib.decompress(comp)
    else:
        raise UnknownCodec(f"codec {codec}")
    if len(out) != raw_len:
        raise FormatError(f"raw length mismatch: {len(out)} != {raw_len}")
    return out


# ---------------------------------------------------------------------------
# Byte-range sources


class RangeSource:
    def read(self, offset: int, length: int) -> bytes:
        raise NotImplementedError

    def close(self):
        pass


class FileSource(RangeSource):
    def __init__(self, path):
        self._f = open(path, "rb")

    def read(self, offset, length):
        self._f.seek(offset)
        out = self._f.read(length)
        if len(out) != length:
            raise FormatError("short read")
        return out

    def close(self):
        self._f.close()


class BytesSource(RangeSource):
    def __init__(self, data: bytes):
        self._d = data

    def read(self, offset, length):
        if offset + length > len(self._d):
            raise FormatError("short read")
        return self._d[offset : offset + length]


class HttpSource(RangeSource):
    """Fetches byte ranges of a remote object with HTTP Range requests."""

    def __init__(self, url: str):
        self.url = url

    def read(self, offset, length):
        req = urllib.request.Request(
            self.url, headers={"Range": f"bytes={offset}-{offset + length - 1}"}
        )
        with urllib.request.urlopen(req) as resp:
            out = resp.read()
        if len(out) != length:
            raise FormatError("short range response")
        return out


class InstrumentedSource(RangeSource):
    """Wrapper recording every (offset, length) fetched, for tests."""

    def __init__(self, inner: RangeSource):
        self.inner = inner
        self.reads: list[tuple[int, int]] = []

    def read(self, offset, length):
        self.reads.append((offset, length))
        return self.inner.read(offset, length)

    def bytes_fetched(self) -> int:
        return sum(n for _, n in self.reads)


def open_source(spec) -> RangeSource:
    if isinstance(spec, RangeSource):
        return spec
    s = os.fspath(spec)
    if isinstance(s, str) and s.startswith(("http://", "https://")):
        return HttpSource(s)
    return FileSource(s)


# ---------------------------------------------------------------------------
# Writing


@dataclass(frozen=True)
class BlockEntry:
    section_ordinal: int
    coords: tuple[int, int, int, int]
    flags: int
    offset: int
    comp_len: int
    raw_len: int
    codec: int
    checksum: int


def write_slice(
    path,
    slice_n: int,
    sections: list[L.Section],
    blocks: Iterable[tuple[L.BlockId, int, bytes]],
    codec: int = CODEC_ZLIB,
) -> None:
    """Write one solved slice; `blocks` yields (id, flags, raw bytes)."""
    ordinal = {s: i for i, s in enumerate(sections)}
    items = sorted(
        ((ordinal[b.section], b.coords, flags, raw) for b, flags, raw in blocks),
        key=lambda t: (t[0], t[1]),
    )
    entries = []
    payloads = []
    offset = _HEADER.size + _SECTION.size * len(sections) + _BLOCK.size * len(items)
    for sec_ord, coords, flags, raw in items:
        comp = encode_payload(codec, raw)
        entries.append(
            BlockEntry(sec_ord, coords, flags, offset, len(comp), len(raw), codec, crc64(comp))
        )
        payloads.append(comp)
        offset += len(comp)
    tmp = os.fspath(path) + ".tmp"
    with open(tmp, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, slice_n, len(sections), len(items)))
        for s in sections:
            flat = [x for pair in s.counts for x in pair]
            f.write(_SECTION.pack(*flat, *s.dims()))
        for e in entries:
            f.write(
                _BLOCK.pack(
                    e.section_ordinal, *e.coords, e.flags, e.offset,
                    e.comp_len, e.raw_len, e.codec, e.checksum,
                )
            )
        for p in payloads:
            f.write(p)
    os.replace(tmp, path)


def slice_file_bytes(slice_n, sections, blocks, codec=CODEC_ZLIB) -> bytes:
    """Serialized file image, for determinism comparisons."""
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        p = os.path.join(d, "s.spg")
        write_slice(p, slice_n, sections, blocks, codec)
        with open(p, "rb") as f:
            return f.read()


# ---------------------------------------------------------------------------
# Reading


class SliceReader:
    """Random access to one solution file; fetches only header, index, and
    the requested blocks' byte ranges."""

    def __init__(self, source):
        self.source = open_source(source)
        head = self.source.read(0, _HEADER.size)
        magic, version, slice_n, nsec, nblk = _HEADER.unpack(head)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported version {version}")
        self.slice = slice_n
        table = self.source.read(
            _HEADER.size, _SECTION.size * nsec + _BLOCK.size * nblk
        )
        self.sections: list[L.Section] = []
        self.dims: list[tuple[int, ...]] = []
        for i in range(nsec):
            vals = _SECTION.unpack_from(table, _SECTION.size * i)
            counts = tuple((vals[2 * q], vals[2 * q + 1]) for q in range(4))
            self.sections.append(L.Section(counts))
            self.dims.append(vals[8:12])
        self.index: dict[tuple[int, tuple], BlockEntry] = {}
        base = _SECTION.size * nsec
        prev_end = None
        for i in range(nblk):
            vals = _BLOCK.unpack_from(table, base + _BLOCK.size * i)
            e = BlockEntry(vals[0], tuple(vals[1:5]), vals[5], *vals[6:])
            if prev_end is not None and e.offset < prev_end:
                raise FormatError("overlapping block payloads")
            prev_end = e.offset + e.comp_len
            self.index[(e.section_ordinal, e.coords)] = e
        self._ordinal = {s: i for i, s in enumerate(self.sections)}

    def block_ids(self):
        for (so, coords) in self.index:
            yield L.BlockId(self.sections[so], coords)

    def has_block(self, block: L.BlockId) -> bool:
        so = self._ordinal.get(block.section)
        return so is not None and (so, block.coords) in self.index

    def read_block(self, block: L.BlockId):
        """Returns (offsets or None, supers ndarray (m, 8) uint64)."""
        so = self._ordinal.get(block.section)
        if so is None or (so, block.coords) not in self.index:
            raise BlockNotFound(f"{block}")
        e = self.index[(so, block.coords)]
        comp = self.source.read(e.offset, e.comp_len)
        if crc64(comp) != e.checksum:
            raise ChecksumMismatch(f"block {block}")
        raw = decode_payload(e.codec, comp, e.raw_len)
        return decode_block_payload(raw, e.flags)

    def close(self):
        self.source.close()


def encode_block_payload(offsets: Optional[np.ndarray], supers: np.ndarray) -> tuple[int, bytes]:
    sup = np.ascontiguousarray(supers, dtype="<u8")
    if offsets is None:
        return 0, sup.tobytes()
    off = np.ascontiguousarray(offsets, dtype="<u4")
    head = struct.pack("<I", len(off))
    return FLAG_SPARSE, head + off.tobytes() + sup.tobytes()


def decode_block_payload(raw: bytes, flags: int):
    if flags & FLAG_SPARSE:
        (m,) = struct.unpack_from("<I", raw, 0)
        off = np.frombuffer(raw, dtype="<u4", count=m, offset=4).astype(np.int64)
        sup = np.frombuffer(raw, dtype="<u8", offset=4 + 4 * m).reshape(m, 8)
        return off, sup.astype(np.uint64)
    sup = np.frombuffer(raw, dtype="<u8").reshape(-1, 8)
    return None, sup.astype(np.uint64)


def read_block(source, block: L.BlockId):
    r = SliceReader(source)
    try:
        return r.read_block(block)
    finally:
        r.close()


# ---------------------------------------------------------------------------
# Auxiliary count and sample files


def write_counts(records, path) -> None:
    """records: iterable of dicts with slice/supers/win/tie/loss."""
    with open(path, "w") as f:
        f.write("# slice supers win tie loss\n")
        for r in records:
            f.write(f"{r['slice']} {r['supers']} {r['win']} {r['tie']} {r['loss']}\n")


def read_counts(path) -> list[dict]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            s, n, w, t, l = (int(x) for x in line.split())
            out.append({"slice": s, "supers": n, "win": w, "tie": t, "loss": l})
    return out


def write_samples(samples, path) -> None:
    """samples: iterable of (board key, 64-byte supervalue bytes)."""
    with open(path, "wb") as f:
        for key, sv in samples:
            rec = struct.pack("<Q", key) + sv
            if len(rec) != SAMPLE_RECORD:
                raise ValueError("sample record must be 72 bytes")
            f.write(rec)


def read_samples(path) -> list[tuple[int, bytes]]:
    out = []
    with open(path, "rb") as f:
        while True:
            rec = f.read(SAMPLE_RECORD)
            if not rec:
                break
            if len(rec) != SAMPLE_RECORD:
                raise FormatError("truncated sample file")
            (key,) = struct.unpack_from("<Q", rec)
            out.append((key, rec[8:]))
    return out
