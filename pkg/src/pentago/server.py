"""HTTP JSON service answering exact position values.

GET /value?board=KEY returns the board's value and the value of every
legal move, dispatching per child: solution-file lookup when the
child's slice is stored (with an LRU block cache; the children of one
position touch at most four blocks), midgame solving at or above the
stone threshold, forward search when the remaining tree is small, and
an honest "unknown" otherwise.  GET /health reports configuration and
cache statistics.  Expensive solves are single-flighted per canonical
board.
"""

from __future__ import annotations

import json
import os
import threading
from collections import OrderedDict
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

import numpy as np

from . import board as B
from . import layout as L
from . import midgame as M
from . import search as SE
from . import storage as ST
from . import supers as SU
from . import symmetry as S

API_VERSION = 1

_VALUE_NAMES = {1: "win", 0: "tie", -1: "loss"}


class BlockCache:
    """Byte-bounded LRU over decompressed blocks, safe for concurrent readers."""

    def __init__(self, max_bytes: int):
        self.max_bytes = max_bytes
        self._lock = threading.Lock()
        self._data: OrderedDict = OrderedDict()
        self._bytes = 0
        self.hits = 0
        self.misses = 0

    def get(self, key):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                return self._data[key]
            self.misses += 1
            return None

    def put(self, key, value, nbytes: int):
        with self._lock:
            if key in self._data:
                return
            self._data[key] = value
            self._bytes += nbytes
            while self._bytes > self.max_bytes and len(self._data) > 1:
                _, v = self._data.popitem(last=False)
                self._bytes -= v[1]

    def stats(self):
        with self._lock:
            return {
                "entries": len(self._data),
                "bytes": self._bytes,
                "hits": self.hits,
                "misses": self.misses,
            }


@dataclass
class ServerConfig:
    store_dir: Optional[str] = None
    midgame_threshold: int = M.DEFAULT_THRESHOLD
    cache_mb: int = 64
    search_node_limit: int = SE.DEFAULT_NODE_LIMIT
    midgame_budget: int = M.DEFAULT_BUDGET


class ValueService:
    """The dispatch logic behind the HTTP endpoints."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.cache = BlockCache(config.cache_mb << 20)
        self.readers: dict[int, ST.SliceReader] = {}
        self.counters = {"database": 0, "midgame": 0, "search": 0, "unknown": 0}
        self._flight_lock = threading.Lock()
        self._in_flight: dict[int, threading.Event] = {}
        self._midgame_cache: dict[int, dict] = {}
        if config.store_dir:
            self._scan_stores(config.store_dir)

    def _scan_stores(self, directory):
        for name in sorted(os.listdir(directory)):
            if not name.endswith(".spg"):
                continue
            path = os.path.join(directory, name)
            try:
                r = ST.SliceReader(path)
            except OSError:
                continue
            self.readers[r.slice] = r

    # -- database path --

    def _read_block_cached(self, slice_n: int, block: L.BlockId):
        key = (slice_n, block.section.counts, block.coords)
        hit = self.cache.get(key)
        if hit is not None:
            return hit[0]
        reader = self.readers[slice_n]
        data = reader.read_block(block)
        nbytes = data[1].nbytes + (data[0].nbytes if data[0] is not None else 0)
        self.cache.put(key, (data, nbytes), nbytes)
        return data

    def _db_value(self, board: B.Board) -> Optional[int]:
        """Value from the stored slices, None when not present."""
        n = B.count_stones(board)
        if n not in self.readers:
            return None
        loc = L.locate(board)
        dims = loc.section.dims()
        coords = tuple(i // L.BLOCK for i in loc.index)
        block = L.BlockId(loc.section, coords)
        reader = self.readers[n]
        if not reader.has_block(block):
            return None
        offsets, sup = self._read_block_cached(n, block)
        ext = L.block_extent(loc.section, coords)
        off = 0
        for a in range(4):
            off = off * ext[a] + (loc.index[a] - L.BLOCK * coords[a])
        if offsets is None:
            row = sup[off]
        else:
            pos = int(np.searchsorted(offsets, off))
            if pos >= len(offsets) or int(offsets[pos]) != off:
                return None
            row = sup[pos]
        bit = L.supervalue_bit(loc)
        word, shift = bit >> 6, bit & 63
        if (int(row[word]) >> shift) & 1:
            return 1
        return 0 if (int(row[4 + word]) >> shift) & 1 else -1

    # -- midgame path, single-flighted per canonical root --

    def _midgame_moves(self, board: B.Board) -> dict:
        key = S.canonicalize_global(board)
        while True:
            with self._flight_lock:
                cached = self._midgame_cache.get(key)
                if cached is not None:
                    return self._map_moves(cached, board)
                ev = self._in_flight.get(key)
                if ev is None:
                    ev = threading.Event()
                    self._in_flight[key] = ev
                    break
            ev.wait()
        try:
            res = M.solve_midgame(
                key,
                threshold=self.config.midgame_threshold,
                budget=self.config.midgame_budget,
            )
            entry = {"root": key, "moves": dict(res.moves), "value": res.value}
            with self._flight_lock:
                self._midgame_cache[key] = entry
                self.counters["midgame"] += 1
            return self._map_moves(entry, board)
        finally:
            with self._flight_lock:
                self._in_flight.pop(key, None)
            ev.set()

    def _map_moves(self, entry: dict, board: B.Board) -> dict:
        if entry["root"] == board:
            return entry
        # the cache is keyed by the canonical image: recompute move mapping
        # by re-solving the value per child through the canonical root
        d = next(
            dd for dd in range(8) if S.transform_global(dd, board) == entry["root"]
        )
        moves = {}
        for child, mv in B.moves(board):
            if mv.quad is None:
                moves[mv] = 1
                continue
            img = S.transform_global(d, child)
            # find the canonical root's move reaching img
            val = entry["_by_child"].get(img) if "_by_child" in entry else None
            if val is None:
                by_child = {}
                mover = B.side_to_move(entry["root"])
                for c2, mv2 in B.moves(entry["root"]):
                    by_child[c2] = entry["moves"][mv2]
                entry["_by_child"] = by_child
                val = by_child[img]
            moves[mv] = val
        return {"root": board, "moves": moves, "value": entry["value"]}

    # -- public API --

    def get_value(self, text: str) -> dict:
        board = B.parse_board(text)  # raises InvalidBoard for malformed input
        n = B.count_stones(board)
        tv = B.terminal_value(board)
        resp = {
            "version": API_VERSION,
            "board": str(board),
            "stones": n,
            "side_to_move": B.side_to_move(board).name.lower(),
            "children": [],
        }
        if tv is not None:
            resp["value"] = _VALUE_NAMES[tv]
            resp["source"] = "terminal"
            return resp

        moves = B.moves(board)
        child_vals: dict = {}
        source = None
        # database first: the board's children live one slice up
        if self.readers:
            ok = True
            for child, mv in moves:
                if mv.quad is None:
                    child_vals[mv] = 1
                    continue
                v = self._db_value(child)
                if v is None:
                    ok = False
                    break
                child_vals[mv] = -v  # stored value is from the child mover's view
            if ok:
                source = "database"
                self.counters["database"] += 1
            else:
                child_vals = {}
        if source is None and n >= self.config.midgame_threshold:
            try:
                entry = self._midgame_moves(board)
                child_vals = entry["moves"]
                source = "midgame"
            except M.TooFewStones:
                pass
        if source is None:
            try:
                for child, mv in moves:
                    if mv.quad is None:
                        child_vals[mv] = 1
                        continue
                    ctv = B.terminal_value(child)
                    v = (
                        ctv
                        if ctv is not None
                        else SE.perfect_value(child, node_limit=self.config.search_node_limit).value
                    )
                    child_vals[mv] = -v
                source = "search"
                self.counters["search"] += 1
            except SE.TreeTooLarge:
                child_vals = {}
        if source is None:
            self.counters["unknown"] += 1
            resp["value"] = "unknown"
            resp["reason"] = "outside computed range: no stored slice covers this position and it is too sparse for on-the-fly solving"
            resp["source"] = "none"
            for child, mv in moves:
                resp["children"].append(_child_json(child, mv, None))
            return resp
        value = max(child_vals.values())
        resp["value"] = _VALUE_NAMES[value]
        resp["source"] = source
        for child, mv in moves:
            resp["children"].append(_child_json(child, mv, child_vals.get(mv)))
        return resp

    def health(self) -> dict:
        return {
            "version": API_VERSION,
            "stores": sorted(self.readers),
            "midgame_threshold": self.config.midgame_threshold,
            "cache": self.cache.stats(),
            "requests": dict(self.counters),
            "midgame_cache_entries": len(self._midgame_cache),
        }


def _child_json(child: B.Board, mv: B.Move, value: Optional[int]) -> dict:
    return {
        "move": {
            "cell": list(mv.cell),
            "quad": mv.quad,
            "direction": mv.direction,
        },
        "board": str(child),
        "value": _VALUE_NAMES[value] if value is not None else "unknown",
    }


class _Handler(BaseHTTPRequestHandler):
    service: ValueService

    def log_message(self, fmt, *args):
        pass

    def _reply(self, code: int, payload: dict):
        data = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        url = urlparse(self.path)
        try:
            if url.path == "/value":
                q = parse_qs(url.query)
                if "board" not in q:
                    self._reply(400, {"error": "missing board parameter"})
                    return
                self._reply(200, self.service.get_value(q["board"][0]))
            elif url.path == "/health":
                self._reply(200, self.service.health())
            else:
                self._reply(404, {"error": f"no such path {url.path}"})
        except B.InvalidBoard as exc:
            self._reply(400, {"error": str(exc)})
        except (ST.ChecksumMismatch, ST.FormatError, OSError) as exc:
            self._reply(503, {"error": f"backing store unreachable: {exc}"})
        except Exception as exc:  # defensive: report, do not crash the thread
            self._reply(500, {"error": f"{type(exc).__name__}: {exc}"})


def make_server(config: ServerConfig, port: int = 0) -> tuple[ThreadingHTTPServer, ValueService]:
    service = ValueService(config)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    httpd = ThreadingHTTPServer(("127.0.0.1", port), handler)
    return httpd, service


def serve(config: ServerConfig, port: int):
    httpd, service = make_server(config, port)
    print(f"serving on http://127.0.0.1:{httpd.server_address[1]}  (Ctrl-C to stop)")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
