"""Interactive exploration: the JSON service behind the web UI.

Starts the value server in-process, plays a few moves, and shows how
every legal move comes back labeled win/tie/loss.
"""

import json
import random
import threading
import urllib.request

from pentago import board as B
from pentago import server as SV

httpd, service = SV.make_server(SV.ServerConfig(midgame_threshold=28), port=0)
threading.Thread(target=httpd.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{httpd.server_address[1]}"
print("server at", base)


def query(key):
    with urllib.request.urlopen(f"{base}/value?board={key}") as resp:
        return json.loads(resp.read())


rng = random.Random(11)
while True:
    cells = rng.sample(B.CELLS, 32)
    board = 0
    for i, (x, y) in enumerate(cells):
        d = 1 if i < 16 else 2
        board += d * int(B.POW3[B.cell_local(x, y)]) << (16 * B.cell_quadrant(x, y))
    if B.terminal_value(board) is None:
        break

print(B.pretty(board))
body = query(board)
print(f"\n{body['side_to_move']} to move: {body['value']} (source: {body['source']})")
colored = {}
for child in body["children"]:
    colored.setdefault(child["value"], []).append(child["move"])
for value in ("win", "tie", "loss"):
    print(f"  {value}: {len(colored.get(value, []))} moves")

health = json.loads(urllib.request.urlopen(base + "/health").read())
print("\n/health:", json.dumps(health, indent=2)[:300], "...")
httpd.shutdown()
