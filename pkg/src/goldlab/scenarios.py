"""Named experiments: config, execution, expectation matching.

A scenario is plain JSON.  Monitor keys are restriction names, ``Lim(a,b)``,
or one of the checks in CHECKS below; a ``raw:`` prefix evaluates the key on
the learner before its pipeline, and ``prime:`` on the second learner of a
delay scenario.
"""
from __future__ import annotations

import json
import os
import random
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .core import (
    Informant,
    Prefix,
    Schedule,
    canonical_informant,
    scheduled_informant,
    splice_informants,
)
from .hypotheses import (
    LangDescriptor,
    MoreThan,
    PROGRAMS,
    agree_up_to,
    descriptor_from_json,
    fresh_registry,
    sym_diff_count,
)
from .learners import Learner, Trace, build_learner, run_trace
from .monitors import (
    BACKBONE,
    RESTRICTIONS,
    EqOracle,
    Verdict,
    check_delayable,
    check_lim,
    check_restriction,
)
from .transforms import (
    CollapseLearner,
    SimulatingFunction,
    pipeline,
    vacillation_collapse,
)

KINDS = ("trace", "sweep", "delay", "bridge")
CHECKS = ("Total", "Agree", "MatchesRaw", "SetDriven", "Withdrawn", "Delay", "RoundTrip", "HatInformant")
_LIM = re.compile(r"^Lim\((\*|\d+),(\*|inf|\d+)\)$")


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    name: str
    learner: dict
    informant: dict
    horizon: int = 50
    bound: int = 200
    monitors: list = field(default_factory=list)
    expect: dict = field(default_factory=dict)
    kind: str = "trace"
    extra: dict = field(default_factory=dict)
    description: str = ""

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ScenarioError(f"{self.name}: unknown kind {self.kind!r}")
        if self.horizon <= 0 or self.bound <= 0:
            raise ScenarioError(f"{self.name}: horizon and bound must be positive")
        for key in self.monitors:
            base = key.split(":", 1)[-1]
            if base not in RESTRICTIONS and base not in CHECKS and not _LIM.match(base):
                raise ScenarioError(f"{self.name}: unknown monitor {key!r}")
        extra = set(self.expect) - set(self.monitors)
        if extra:
            raise ScenarioError(f"{self.name}: expectation names unconfigured monitors {sorted(extra)}")

    @classmethod
    def from_json(cls, d: dict) -> "Scenario":
        known = {"name", "learner", "informant", "horizon", "bound", "monitors", "expect",
                 "kind", "extra", "description"}
        unknown = set(d) - known
        if unknown:
            raise ScenarioError(f"unknown scenario fields {sorted(unknown)}")
        try:
            sc = cls(**d)
        except TypeError as e:
            raise ScenarioError(str(e)) from None
        sc.validate()
        return sc

    def to_json(self) -> dict:
        return {"name": self.name, "description": self.description, "kind": self.kind,
                "learner": self.learner, "informant": self.informant, "horizon": self.horizon,
                "bound": self.bound, "monitors": self.monitors, "expect": self.expect,
                "extra": self.extra}


@dataclass
class Check:
    key: str
    verdict: Verdict
    expected: Optional[dict]

    @property
    def ok(self) -> bool:
        return self.expected is None or expectation_met(self.expected, self.verdict)


@dataclass
class Result:
    scenario: Scenario
    checks: list
    traces: dict

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def verdicts(self, prefix: str = "") -> dict:
        out = {}
        for c in self.checks:
            if prefix:
                if c.key.startswith(prefix):
                    out[c.key[len(prefix):]] = c.verdict
            elif ":" not in c.key:
                out[c.key] = c.verdict
        return out


def expectation_met(expected: dict, v: Verdict) -> bool:
    if expected.get("outcome") != v.outcome:
        return False
    if "witness" in expected and list(expected["witness"]) != [v.r, v.s, v.t]:
        return False
    for k, want in expected.get("detail", {}).items():
        if v.detail.get(k) != want:
            return False
    return True


# --------------------------------------------------------------------------
# building blocks from config


def base_seed() -> int:
    """Seed offset for randomized schedules (GOLDLAB_SEED, default 0)."""
    raw = os.environ.get("GOLDLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ScenarioError(f"GOLDLAB_SEED must be an integer, got {raw!r}") from None


def normalize_pipeline(steps) -> list:
    """Step dicts, with totalize and synDecPad inserted ahead of a bare convSDec."""
    out = []
    for st in steps:
        st = {"name": st} if isinstance(st, str) else dict(st)
        if st["name"] == "convSDec":
            names = [s["name"] for s in out]
            if "totalize" not in names:
                out.append({"name": "totalize"})
            if "synDecPad" not in names:
                out.append({"name": "synDecPad"})
        out.append(st)
    return out


def apply_pipeline(M: Learner, steps) -> Learner:
    for st in normalize_pipeline(steps):
        if st["name"] == "collapse":
            a = st.get("a", 0)
            M = vacillation_collapse(M, None if a == "*" else int(a))
        else:
            M = pipeline(M, [st["name"]])
    return M


def build_learners(spec: dict) -> tuple[Learner, Learner]:
    """(raw learner, learner with its pipeline applied)."""
    raw = build_learner(spec)
    return raw, apply_pipeline(raw, spec.get("pipeline", []))


def build_informant(spec: dict, seed: Optional[int] = None) -> Informant:
    target = descriptor_from_json(spec["target"])
    if "splice" in spec:
        sp = spec["splice"]
        first = canonical_informant(descriptor_from_json(sp["first"]))
        return splice_informants(first, canonical_informant(target), int(sp["at"]))
    sched = spec.get("schedule")
    if seed is not None:
        sched = Schedule.random(seed)
    elif isinstance(sched, dict):
        sched = Schedule.from_json(sched)
    if sched is None:
        return canonical_informant(target)
    return scheduled_informant(target, sched)


# --------------------------------------------------------------------------
# monitors over traces


def evaluate(key: str, trace: Trace, bound: int, ctx: dict) -> Verdict:
    m = _LIM.match(key)
    if m:
        a = m.group(1) if m.group(1) == "*" else int(m.group(1))
        b = m.group(2) if m.group(2) in ("*", "inf") else int(m.group(2))
        return check_lim(trace, a, b, bound)
    if key in RESTRICTIONS:
        return check_restriction(key, trace, EqOracle.exact(bound))
    fn = _CHECK_FNS.get(key)
    if fn is None:
        raise ScenarioError(f"unknown monitor {key!r}")
    return fn(trace, bound, ctx)


def _check_total(trace: Trace, bound: int, ctx: dict) -> Verdict:
    T = ctx["horizon"]
    if trace.diverged is not None or len(trace) < T:
        return Verdict("Total", "violation", t=len(trace), horizon=T,
                       detail={"reason": "no answer within budget"})
    return Verdict("Total", "pass", horizon=T)


def _check_agree(trace: Trace, bound: int, ctx: dict) -> Verdict:
    n = sym_diff_count(trace.hyps[-1], trace.target, bound)
    out = "pass" if n == 0 else "violation"
    return Verdict("Agree", out, t=len(trace) - 1, horizon=len(trace), bound=bound, exact=False,
                   detail={"anomalies": n})


def _check_matches_raw(trace: Trace, bound: int, ctx: dict) -> Verdict:
    raw = ctx["raw_trace"]
    for t, (h, g) in enumerate(zip(trace.hyps, raw.hyps)):
        if not agree_up_to(h, g, bound):
            return Verdict("MatchesRaw", "violation", t=t, horizon=len(trace), bound=bound, exact=False)
    return Verdict("MatchesRaw", "pass", horizon=len(trace), bound=bound, exact=False)


def _random_content_pair(rng: random.Random, L: LangDescriptor, max_len: int) -> tuple[Prefix, Prefix]:
    """Two prefixes for L with the same content in different order and multiplicity."""
    values = [rng.randrange(max_len) for _ in range(rng.randint(0, max_len))]
    other = list(values) + [rng.choice(values) for _ in range(rng.randint(0, 3))] if values else []
    rng.shuffle(other)
    lab = lambda vs: Prefix((v, 1 if L.member(v) else 0) for v in vs)
    return lab(values), lab(other)


def _check_set_driven(trace: Trace, bound: int, ctx: dict) -> Verdict:
    M = ctx["learner"]
    pairs = int(ctx["extra"].get("pairs", 100))
    rng = random.Random(ctx["seed"])
    for i in range(pairs):
        a, b = _random_content_pair(rng, trace.target, int(ctx["extra"].get("max_len", 12)))
        if M(a) != M(b):
            return Verdict("SetDriven", "violation", t=i, horizon=pairs, exact=True,
                           detail={"pair": [a.items, b.items]})
    return Verdict("SetDriven", "pass", horizon=pairs)


def _check_withdrawn(trace: Trace, bound: int, ctx: dict) -> Verdict:
    M = ctx["learner"]
    if not isinstance(M, CollapseLearner):
        raise ScenarioError("Withdrawn needs a collapse pipeline")
    gone: set = set()
    for t in range(len(trace) + 1):
        sigma = trace.prefix.initial(t)
        kept = {h.code for h in M.kept(sigma)}
        back = kept & gone
        if back:
            return Verdict("Withdrawn", "violation", t=t, horizon=len(trace),
                           detail={"reentered": sorted(back)})
        gone |= {h.code for h in M.withdrawn(sigma)}
    return Verdict("Withdrawn", "pass", horizon=len(trace), detail={"withdrawn": len(gone)})


def _check_delay(trace: Trace, bound: int, ctx: dict) -> Verdict:
    return check_delayable(ctx["trace"], ctx["informant"], ctx["prime_trace"], ctx["prime_informant"],
                           ctx["simulating"], ctx["horizon"])


def _check_round_trip(trace: Trace, bound: int, ctx: dict) -> Verdict:
    from .bridge import round_trip

    extra = ctx["extra"]
    upto = int(extra.get("roundtrip_range", 50))
    budget = int(extra.get("max_budget", 6000))
    for i, name in enumerate(extra["programs"]):
        p = PROGRAMS[name]
        for x in range(upto):
            got = round_trip(p, x, budget)
            if got is None or got[1] != p(x):
                return Verdict("RoundTrip", "violation", s=i, t=x, horizon=upto,
                               detail={"program": name, "got": None if got is None else got[1]})
    return Verdict("RoundTrip", "pass", horizon=upto)


def _check_hat_informant(trace: Trace, bound: int, ctx: dict) -> Verdict:
    from .bridge import canonical_text, hat_length, text_informant
    from .core import pair_encode

    extra = ctx["extra"]
    upto = int(extra.get("hat_range", 20))
    scan = int(extra.get("hat_scan", hat_length(2 * upto)))
    for i, name in enumerate(extra["programs"]):
        p = PROGRAMS[name]
        seen = set(text_informant(canonical_text(p)).prefix(scan).items)
        for x in range(upto):
            if (pair_encode(x, p(x)), 1) not in seen:
                return Verdict("HatInformant", "violation", s=i, t=x, horizon=upto, detail={"program": name})
    return Verdict("HatInformant", "pass", horizon=upto)


_CHECK_FNS = {
    "Total": _check_total,
    "Agree": _check_agree,
    "MatchesRaw": _check_matches_raw,
    "SetDriven": _check_set_driven,
    "Withdrawn": _check_withdrawn,
    "Delay": _check_delay,
    "RoundTrip": _check_round_trip,
    "HatInformant": _check_hat_informant,
}


# --------------------------------------------------------------------------
# running


def _split_key(key: str) -> tuple[str, str]:
    if ":" in key:
        side, base = key.split(":", 1)
        return side, base
    return "", key


def run_scenario(sc: Scenario, seed: Optional[int] = None) -> Result:
    """Execute in a fresh code registry so artifacts are reproducible."""
    seed = base_seed() if seed is None else seed
    with fresh_registry():
        if sc.kind == "sweep":
            return _run_sweep(sc, seed)
        return _run_single(sc, seed)


def _run_single(sc: Scenario, seed: int) -> Result:
    raw, M = build_learners(sc.learner)
    I = build_informant(sc.informant)
    T = sc.horizon
    traces = {"main": run_trace(M, I, T)}
    ctx = {"horizon": T, "learner": M, "extra": sc.extra, "seed": seed, "informant": I,
           "trace": traces["main"]}
    sides = {_split_key(k)[0] for k in sc.monitors}
    if "raw" in sides:
        traces["raw"] = run_trace(raw, I, T)
        ctx["raw_trace"] = traces["raw"]
    if sc.kind == "delay":
        _, Mp = build_learners(sc.extra["learner_prime"])
        Ip = build_informant(sc.extra["informant_prime"])
        s = SimulatingFunction(**sc.extra["simulating"])
        traces["main"] = run_trace(M, I, max(T, max(s(t) for t in range(T)) + 1))
        traces["prime"] = run_trace(Mp, Ip, T)
        ctx.update(trace=traces["main"], prime_trace=traces["prime"], prime_informant=Ip, simulating=s)
    elif "MatchesRaw" in sc.monitors and "raw" not in traces:
        traces["raw"] = run_trace(raw, I, T)
        ctx["raw_trace"] = traces["raw"]
    checks = []
    for key in sc.monitors:
        side, base = _split_key(key)
        tr = traces["main" if side == "" else side]
        local = dict(ctx, learner=raw if side == "raw" else M)
        checks.append(Check(key, evaluate(base, tr, sc.bound, local), sc.expect.get(key)))
    return Result(sc, checks, traces)


def _run_sweep(sc: Scenario, seed: int) -> Result:
    """Canonical informants for every listed target plus seeded random schedules."""
    _, M = build_learners(sc.learner)
    targets = [sc.informant["target"]] + list(sc.extra.get("more_targets", []))
    runs = [(f"canonical:{i}", build_informant({"target": d})) for i, d in enumerate(targets)]
    for i in range(int(sc.extra.get("random", 0))):
        d = targets[i % len(targets)]
        runs.append((f"random:{seed + i}", build_informant({"target": d}, seed=seed + i)))
    failures: dict = {}
    traces = {}
    for label, I in runs:
        tr = run_trace(M, I, sc.horizon)
        if not traces:
            traces["main"] = tr
        ctx = {"horizon": sc.horizon, "learner": M, "extra": sc.extra, "seed": seed}
        for key in sc.monitors:
            if key in failures:
                continue
            v = evaluate(key, tr, sc.bound, ctx)
            if not v.passed:
                v.detail = dict(v.detail, informant=label)
                failures[key] = v
    checks = []
    for key in sc.monitors:
        v = failures.get(key) or Verdict(key, "pass", horizon=sc.horizon, bound=sc.bound,
                                         exact=False, detail={"informants": len(runs)})
        checks.append(Check(key, v, sc.expect.get(key)))
    return Result(sc, checks, traces)


# --------------------------------------------------------------------------
# built-in scenarios


def builtin_names() -> list[str]:
    folder = resources.files("goldlab") / "scenario_data"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> Scenario:
    path = resources.files("goldlab") / "scenario_data" / f"{name}.json"
    if not path.is_file():
        raise ScenarioError(f"unknown scenario {name!r}; known: {', '.join(builtin_names())}")
    return Scenario.from_json(json.loads(path.read_text()))


def load_file(path: Union[str, Path]) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: not valid JSON ({e})") from None
    return Scenario.from_json(data)


# --------------------------------------------------------------------------
# reporting


def backbone_rows(verdicts: dict) -> list[str]:
    rows = []
    for lhs, rhs in BACKBONE:
        lhs = (lhs,) if isinstance(lhs, str) else lhs
        for q in rhs:
            if not all(n in verdicts for n in lhs + (q,)):
                continue
            premise = all(verdicts[n].passed for n in lhs)
            if premise and not verdicts[q].passed:
                mark = "CONTRADICTED"
            elif premise:
                mark = "premise holds, consequence holds"
            else:
                mark = "premise violated (vacuous)"
            rows.append(f"  {'+'.join(lhs):>9} => {q:<5} {mark}")
    names = [n for n in RESTRICTIONS if n in verdicts]
    for a in names:
        for b in names:
            if a != b and verdicts[a].passed and not verdicts[b].passed:
                rows.append(f"  evidence: {a} holds while {b} fails, so {a} does not imply {b} here")
    return rows


def render(result: Result) -> str:
    sc = result.scenario
    lines = [f"scenario {sc.name}: {sc.description}".rstrip(": "),
             "  (violations under the exact oracle are facts about the trace; passes hold up to the horizon)"]
    for c in result.checks:
        exp = "-" if c.expected is None else c.expected["outcome"]
        if c.expected and "witness" in c.expected:
            exp += " " + ",".join("_" if w is None else str(w) for w in c.expected["witness"])
        status = "ok" if c.ok else "MISMATCH"
        lines.append(f"  {c.key:<14} expected {exp:<22} {status:<8} {c.verdict.describe()}")
    rows = backbone_rows(result.verdicts())
    if rows:
        lines.append("  backbone:")
        lines.extend(rows)
    lines.append(f"  result: {'all expectations met' if result.ok else 'EXPECTATION MISMATCH'}")
    return "\n".join(lines) + "\n"


def write_artifacts(result: Result, out_dir: Union[str, Path]) -> Path:
    from .tracefile import dump_trace

    out = Path(out_dir) / result.scenario.name
    out.mkdir(parents=True, exist_ok=True)
    for label, tr in result.traces.items():
        dump_trace(tr, out / f"{label}.jsonl", result.scenario.bound)
    with open(out / "verdicts.jsonl", "w") as f:
        for c in result.checks:
            d = dict(c.verdict.to_json(), key=c.key, expected=c.expected, ok=c.ok)
            f.write(json.dumps(d, default=_jsonable) + "\n")
    (out / "table.txt").write_text(render(result))
    return out


def _jsonable(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, MoreThan):
        return {"more_than": o.cap}
    return str(o)
