#!/usr/bin/env python3
"""Independent audit of an execlab run directory.

Checks that every row of fills.log matches a fill event in events.log, then
recomputes the implementation shortfall and the expanded decomposition from
fills.log plus the price inputs in the report and compares every field.

Usage: audit_report.py RUN_DIR
Exit status 0 when everything agrees, 1 otherwise.
"""

import csv
import json
import math
import sys
from collections import Counter
from pathlib import Path


def rows(path):
    with open(path, newline="") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def load_report(run_dir):
    if (run_dir / "report.json").exists():
        r = json.loads((run_dir / "report.json").read_text())
        flat = {k: v for k, v in r.items() if not isinstance(v, (dict, list))}
        for part in ("shortfall", "expanded"):
            for k, v in r[part].items():
                flat[f"{'is' if part == 'shortfall' else 'expanded'}_{k}"] = v
        return flat
    return {row["key"]: row["value"] for row in rows(run_dir / "report.csv")}


def llround(x):
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def parse_flags(text):
    out = {}
    for tok in text.split("|"):
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k] = v
    return out


def audit(run_dir):
    problems = []
    report = load_report(run_dir)
    fills = rows(run_dir / "fills.log")

    book = Counter()
    for ev in rows(run_dir / "events.log"):
        if ev["event"] != "fill":
            continue
        flags = parse_flags(ev["flags"])
        key = (int(ev["clock"]), int(flags["venue"]), int(ev["price_ticks"]), int(ev["qty"]))
        book[key + (int(ev["order_id"]),)] += 1
        book[key + (int(flags["maker"]),)] += 1
    for i, f in enumerate(fills):
        key = (int(f["clock"]), int(f["venue"]), int(f["price_ticks"]), int(f["qty"]), int(f["child"]))
        if book[key] == 0:
            problems.append(f"fills.log row {i + 1} has no matching fill in events.log: {f}")
        else:
            book[key] -= 1

    side = 1 if report["side"] == "buy" else -1
    intended = int(report["intended"])
    decision = int(report["decision_price"])
    arrival = int(report["arrival_price"])
    final = int(report["final_price"])
    tick = float(report["tick_size"])

    executed = sum(int(f["qty"]) for f in fills)
    value = sum(int(f["qty"]) * int(f["price_ticks"]) for f in fills)
    fees = 0.0
    for f in fills:
        fees += float(f["fee"])
    fixed = llround(fees / tick)
    unexecuted = intended - executed

    expect = {
        "filled": executed,
        "unfilled": unexecuted,
        "fixed": fixed,
        "is_execution": side * (value - executed * decision),
        "is_opportunity": side * unexecuted * (final - decision),
        "is_fixed": fixed,
        "expanded_delay": side * executed * (arrival - decision),
        "expanded_trade_related": side * (value - executed * arrival),
        "expanded_opportunity": side * unexecuted * (final - decision),
        "expanded_fixed": fixed,
    }
    expect["is_total"] = expect["is_execution"] + expect["is_opportunity"] + fixed
    expect["expanded_total"] = (
        expect["expanded_delay"] + expect["expanded_trade_related"] + expect["expanded_opportunity"] + fixed
    )
    for key, want in expect.items():
        got = int(report[key])
        if got != want:
            problems.append(f"{key}: report says {got}, recomputed {want}")
    return problems


def main(argv):
    if len(argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    problems = audit(Path(argv[1]))
    for p in problems:
        print("MISMATCH", p)
    if not problems:
        print(f"audit ok: {argv[1]}")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
