import json
import random
import threading
import urllib.request

import numpy as np
import pytest

from pentago import board as B
from pentago import engine as E
from pentago import search as SE
from pentago import server as SV
from pentago import symmetry as S
from pentago.board import Color

from conftest import random_board


@pytest.fixture(scope="module")
def running_server(tmp_path_factory):
    # a desk-scale database: injected 3->0 solve written to disk
    store_dir = tmp_path_factory.mktemp("store")
    res = E.solve(
        3, 0, E.BoundarySpec("random", 3, bytes(range(32))),
        E.SolveConfig(keep_all=True),
    )
    res.write_store(store_dir)
    cfg = SV.ServerConfig(store_dir=str(store_dir), midgame_threshold=30)
    httpd, service = SV.make_server(cfg, port=0)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}", service, res
    httpd.shutdown()


def get(base, path):
    with urllib.request.urlopen(base + path) as resp:
        return resp.status, json.loads(resp.read())


def get_raw(base, path):
    try:
        with urllib.request.urlopen(base + path) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def test_malformed_key(running_server):
    base, _, _ = running_server
    status, body = get_raw(base, "/value?board=xyz")
    assert status == 400
    assert "error" in body
    status, _ = get_raw(base, "/value")
    assert status == 400
    status, _ = get_raw(base, "/nope")
    assert status == 404


def test_health(running_server):
    base, service, _ = running_server
    status, body = get(base, "/health")
    assert status == 200
    assert body["stores"] == [0, 1, 2]
    assert body["midgame_threshold"] == 30


def test_database_children(running_server):
    base, service, res = running_server
    # a 1-stone board: children live at slice 2, which is stored
    b = B.place(0, (2, 3), Color.BLACK)
    status, body = get(base, f"/value?board={b}")
    assert status == 200
    assert body["source"] == "database"
    moves = B.moves(b)
    assert len(body["children"]) == len(moves)
    bychild = {str(c): mv for c, mv in moves}
    for child in body["children"]:
        assert child["board"] in bychild
        v = res.values_for_keys(np.array([int(child["board"])], dtype=np.uint64))[0]
        expect = {1: "loss", 0: "tie", -1: "win"}[int(v)]  # parent sees -v
        assert child["value"] == expect
    # board value == max over children
    vals = {"win": 1, "tie": 0, "loss": -1}
    assert vals[body["value"]] == max(vals[c["value"]] for c in body["children"])


def test_midgame_dispatch_and_single_flight(running_server, rng):
    base, service, _ = running_server
    while True:
        root = random_board(rng, 33)
        if B.terminal_value(root) is None:
            break
    before = service.counters["midgame"]
    results = []

    def query():
        results.append(get(base, f"/value?board={root}"))

    threads = [threading.Thread(target=query) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(status == 200 for status, _ in results)
    bodies = [body for _, body in results]
    for b2 in bodies[1:]:
        assert b2 == bodies[0]
    assert bodies[0]["source"] == "midgame"
    assert service.counters["midgame"] == before + 1  # one solve, all answered
    # values match forward search
    got = {tuple(c["move"]["cell"]) if c["move"]["quad"] is None else (tuple(c["move"]["cell"]), c["move"]["quad"], c["move"]["direction"]): c["value"] for c in bodies[0]["children"]}
    for child, mv in B.moves(root):
        tv = B.terminal_value(child)
        cv = tv if tv is not None else SE.perfect_value(child).value
        expect = {1: "win", 0: "tie", -1: "loss"}[1 if mv.quad is None else -cv]
        k = tuple(mv.cell) if mv.quad is None else (tuple(mv.cell), mv.quad, mv.direction)
        assert got[k] == expect


def test_35_stone_board_matches_search(running_server, rng):
    base, _, _ = running_server
    while True:
        b = random_board(rng, 35)
        if B.terminal_value(b) is None:
            break
    status, body = get(base, f"/value?board={b}")
    assert status == 200
    assert body["source"] in ("midgame", "search")
    for child in body["children"]:
        ck = int(child["board"])
        tv = B.terminal_value(ck)
        cv = tv if tv is not None else SE.perfect_value(ck).value
        assert child["value"] == {1: "loss", 0: "tie", -1: "win"}[cv]


def test_unknown_outside_range(running_server, rng):
    base, _, _ = running_server
    b = random_board(rng, 10)
    status, body = get(base, f"/value?board={b}")
    assert status == 200
    assert body["value"] == "unknown"
    assert "outside computed range" in body["reason"]
    assert len(body["children"]) == len(B.moves(b))
    assert all(c["value"] == "unknown" for c in body["children"])


def test_terminal_board(running_server, rng):
    while True:
        b = random_board(rng, 36)
        if B.terminal_value(b) is not None:
            break
    base, _, _ = running_server
    status, body = get(base, f"/value?board={b}")
    assert status == 200
    assert body["children"] == []
    assert body["value"] in ("win", "tie", "loss")


def test_string_form_accepted(running_server):
    base, _, _ = running_server
    s = "0" * 36
    status, body = get(base, f"/value?board={s}")
    assert status == 200
    assert body["board"] == "0"


def test_cache_effectiveness(running_server):
    base, service, _ = running_server
    b = B.place(0, (1, 1), Color.BLACK)
    get(base, f"/value?board={b}")
    h0 = service.cache.stats()
    get(base, f"/value?board={b}")
    h1 = service.cache.stats()
    assert h1["hits"] > h0["hits"]


def test_canonical_cache_reuse_under_symmetry(running_server, rng):
    base, service, _ = running_server
    while True:
        root = random_board(rng, 33)
        if B.terminal_value(root) is None:
            break
    img = S.transform_global(3, root)
    s1, b1 = get(base, f"/value?board={root}")
    before = service.counters["midgame"]
    s2, b2 = get(base, f"/value?board={img}")
    assert service.counters["midgame"] == before  # served from the canonical solve
    assert b1["value"] == b2["value"]
    vals = sorted(c["value"] for c in b1["children"])
    assert vals == sorted(c["value"] for c in b2["children"])
