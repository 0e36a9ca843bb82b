"""The HTTP + WebSocket service, driven end to end over real sockets.

One server hosts one document. Commands go through REST; every committed
revision is broadcast as a patch on /api/events, and a client that applies
the stream to a snapshot stays equal to the server's state.
"""

import json
import threading
import time

import requests
import uvicorn

from scratchbook.model import Notebook
from scratchbook.patches import apply_patch
from scratchbook.service import create_app
from scratchbook.session import DocumentSession

PORT = 8642
BASE = f"http://127.0.0.1:{PORT}"

session = DocumentSession(Notebook())
server = uvicorn.Server(uvicorn.Config(create_app(session), port=PORT, log_level="warning"))
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)

patches = []
session.subscribe(lambda patch: patches.append(patch))

snapshot = requests.get(f"{BASE}/api/notebook").json()
print(f"snapshot at revision {snapshot['revision']}")

cell = requests.post(f"{BASE}/api/cells", json={"container": "main", "after": "START"}).json()["cellId"]
requests.patch(f"{BASE}/api/cells/{cell}", json={"source": "answer = 6 * 7\nanswer"})
run = requests.post(f"{BASE}/api/cells/{cell}/run").json()
print(f"run: {run['classification']}, outputs {[o['text'] for o in run['outputs']]}")

move = requests.post(f"{BASE}/api/cells/{cell}/move", json={"target": "scratch"}).json()
print(f"moved into section {move['sectionId']}")

state = snapshot["notebook"]
for patch in patches:
    state = apply_patch(state, patch)
final = requests.get(f"{BASE}/api/notebook").json()
print(f"applied {len(patches)} patches -> revision {final['revision']}")
print("client state matches server:", state == final["notebook"])
print("section holds:", json.dumps([c["source"] for c in state["sections"][0]["cells"]]))

server.should_exit = True
thread.join(timeout=5)
