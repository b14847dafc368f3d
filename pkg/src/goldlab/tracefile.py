"""JSON-lines trace files with a code-table sidecar.

One line per step: {"t": 3, "x": 1, "label": 0, "h": 7}.  The sidecar maps
every code in the trace to its binding; enumerated hypotheses are stored as
the members they had enumerated below the bound.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from .core import InfoPair, Prefix
from .hypotheses import Hypothesis, Snapshot, descriptor_from_json
from .learners import Trace


class TraceFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".codes.json")


def trace_lines(trace: Trace) -> str:
    out = []
    for t, ((x, b), h) in enumerate(zip(trace.prefix, trace.hyps)):
        out.append(json.dumps({"t": t, "x": x, "label": b, "h": h.code}))
    return "".join(line + "\n" for line in out)


def code_table(trace: Trace, bound: int) -> dict:
    table = {}
    for h in sorted({h.code: h for h in trace.hyps}.values(), key=lambda h: h.code):
        entry = h.to_json()
        if not h.is_exact:
            budget = h.default_budget(bound)
            entry["members"] = sorted(h.extension_below(bound, budget))
            entry["budget"] = budget
        table[str(h.code)] = entry
    return table


def dump_trace(trace: Trace, path: Union[str, Path], bound: int = 200) -> Path:
    """Write the trace and its sidecar; returns the sidecar path."""
    path = Path(path)
    path.write_text(trace_lines(trace))
    side = {
        "name": trace.name,
        "target": None if trace.target is None else trace.target.to_json(),
        "bound": bound,
        "diverged": trace.diverged is not None,
        "codes": code_table(trace, bound),
    }
    sp = sidecar_path(path)
    sp.write_text(json.dumps(side, indent=1, sort_keys=True) + "\n")
    return sp


def _hypothesis_from_entry(code: int, entry: dict, bound: int) -> Hypothesis:
    if "exact" in entry:
        return Hypothesis(code, descriptor_from_json(entry["exact"]), salt=entry.get("salt"))
    return Hypothesis(code, Snapshot(entry["members"], entry.get("budget", bound), source="file"),
                      salt=entry.get("salt"), label=f"snapshot{code}")


def parse_trace(text: str, side: Optional[dict] = None) -> Trace:
    side = side or {}
    table = side.get("codes", {})
    bound = side.get("bound", 200)
    hyps_by_code: dict = {}
    labels: dict = {}
    items, hyps = [], []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceFormatError(n, f"not JSON ({e.msg})") from None
        if not isinstance(rec, dict) or not {"t", "x", "label", "h"} <= rec.keys():
            raise TraceFormatError(n, "expected keys t, x, label, h")
        if rec["t"] != len(items):
            raise TraceFormatError(n, f"expected t={len(items)}, got {rec['t']}")
        try:
            pair = InfoPair.make(rec["x"], rec["label"])
        except (TypeError, ValueError) as e:
            raise TraceFormatError(n, str(e)) from None
        if labels.setdefault(pair.value, pair.label) != pair.label:
            raise TraceFormatError(n, f"{pair.value} was labeled {labels[pair.value]} earlier")
        items.append(pair)
        code = rec["h"]
        if code not in hyps_by_code:
            entry = table.get(str(code))
            if entry is None:
                raise TraceFormatError(n, f"code {code} missing from the code table")
            hyps_by_code[code] = _hypothesis_from_entry(code, entry, bound)
        hyps.append(hyps_by_code[code])
    prefix = Prefix(items)
    target = side.get("target")
    return Trace(prefix, hyps, None if target is None else descriptor_from_json(target),
                 name=side.get("name", ""))


def load_trace(path: Union[str, Path]) -> Trace:
    path = Path(path)
    sp = sidecar_path(path)
    side = json.loads(sp.read_text()) if sp.exists() else {}
    return parse_trace(path.read_text(), side)
