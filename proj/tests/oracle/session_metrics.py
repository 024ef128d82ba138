"""Reference session metrics computed straight from a session file.

Shares no code with the C++ implementation; used to cross-check
`mrr report --session --json`.
"""

import json
import math
import sys


def load(path):
    header, footer, events, trace = None, None, [], []
    with open(path, "rb") as f:
        data = f.read()
    # Only complete lines count; a trailing partial line is a crash artifact.
    for raw in data.split(b"\n")[:-1]:
        line = json.loads(raw)
        kind = line["kind"]
        if kind == "header":
            header = line
        elif kind == "footer":
            footer = line
        elif kind == "event":
            events.append(line["event"])
        elif kind == "hand":
            trace.append(line)
    events.sort(key=lambda e: e["t"])
    return header, footer, events, trace


def metrics(path):
    header, footer, events, trace = load(path)
    start = header.get("started_at", 0.0)
    if footer is not None:
        end = footer["ended_at"]
    else:
        end = max([start] + [e["t"] for e in events] + [s["t"] for s in trace])
    duration = end - start

    path_len, tracked_time, peak = 0.0, 0.0, 0.0
    for a, b in zip(trace, trace[1:]):
        if a["tracking_lost"] or b["tracking_lost"]:
            continue
        seg = math.dist(a["pos"], b["pos"])
        dt = b["t"] - a["t"]
        path_len += seg
        tracked_time += dt
        if dt > 0:
            peak = max(peak, seg / dt)

    occupancy = {"wander": 0.0, "helpful": 0.0, "challenging": 0.0}
    if duration > 0:
        mode, since = "wander", start
        for e in events:
            if e["kind"] != "agent_transition":
                continue
            at = min(max(e["t"], since), end)
            occupancy[mode] += at - since
            mode, since = e["to"], at
        occupancy[mode] += end - since
        occupancy = {k: v / duration for k, v in occupancy.items()}
    else:
        occupancy["wander"] = 1.0

    tasks = {}
    endorsed = 0
    lost_total, lost_since = 0.0, None
    for e in events:
        k = e["kind"]
        if k == "task_activated":
            tasks.setdefault(e["index"], {"zone": e["zone"], "activated_at": None, "completed_at": None})
            tasks[e["index"]]["activated_at"] = e["t"]
        elif k == "task_completed":
            tasks.setdefault(e["index"], {"zone": e["zone"], "activated_at": None, "completed_at": None})
            tasks[e["index"]]["completed_at"] = e["t"]
        elif k == "touch_endorsed":
            endorsed += 1
        elif k == "tracking_lost":
            if lost_since is None:
                lost_since = e["t"]
        elif k == "tracking_recovered":
            if lost_since is not None:
                lost_total += e["t"] - lost_since
                lost_since = None
    if lost_since is not None:
        lost_total += max(0.0, end - lost_since)

    return {
        "duration": duration,
        "movement_volume": path_len,
        "mean_speed": path_len / tracked_time if tracked_time > 0 else 0.0,
        "peak_speed": peak,
        "endorsed_touches": endorsed,
        "occupancy": occupancy,
        "tracking_loss_duration": lost_total,
        "tasks": [dict(index=i, **t) for i, t in sorted(tasks.items())],
    }


if __name__ == "__main__":
    print(json.dumps(metrics(sys.argv[1]), indent=2))
