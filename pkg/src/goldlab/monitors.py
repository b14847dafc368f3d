"""Horizon-bounded judges for learning restrictions and convergence.

Monitors are falsifiers.  Under the exact oracle a Violation is a fact about
the trace; a Pass only says nothing went wrong below the horizon.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .core import InfoPair, Informant, Prefix, consistent
from .hypotheses import (
    Hypothesis,
    LangDescriptor,
    MoreThan,
    UndecidedSymbolically,
    equal_exact,
    relation_window,
    subset_exact,
    sym_diff_count,
)
from .learners import Learner, Trace

RESTRICTIONS = ("Cons", "Conv", "Dec", "Caut", "WMon", "Mon", "SMon", "NU", "SNU", "SDec", "SynDec")
NEEDS_TARGET = ("Mon", "NU", "SNU")


class OracleUnavailable(RuntimeError):
    """The exact oracle cannot judge this trace; use a horizon oracle instead."""


@dataclass(frozen=True)
class EqOracle:
    """How semantic comparisons are decided: exactly, or by agreement below a bound."""

    mode: str = "exact"
    bound: int = 200
    strict: bool = False

    @classmethod
    def exact(cls, fallback_bound: int = 200, strict: bool = False) -> "EqOracle":
        return cls("exact", fallback_bound, strict)

    @classmethod
    def horizon(cls, bound: int) -> "EqOracle":
        return cls("horizon", bound)


@dataclass
class Verdict:
    monitor: str
    outcome: str  # "pass" or "violation"
    r: Optional[int] = None
    s: Optional[int] = None
    t: Optional[int] = None
    horizon: int = 0
    bound: Optional[int] = None
    exact: bool = True
    trivial: bool = False
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"

    @property
    def witness(self) -> tuple:
        return (self.r, self.s, self.t)

    def to_json(self) -> dict:
        d = {"monitor": self.monitor, "outcome": self.outcome, "r": self.r, "s": self.s,
             "t": self.t, "horizon": self.horizon, "bound": self.bound, "exact": self.exact}
        if self.trivial:
            d["finite_horizon_trivial"] = True
        if self.detail:
            d["detail"] = self.detail
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    def describe(self) -> str:
        if self.passed:
            qual = "finite-horizon-trivial pass" if self.trivial else "pass up to horizon"
            return f"{self.monitor}: {qual} T={self.horizon}" + (f" B={self.bound}" if self.bound else "")
        idx = ",".join(f"{k}={v}" for k, v in (("r", self.r), ("s", self.s), ("t", self.t)) if v is not None)
        cert = "certain (exact oracle)" if self.exact else "relative to bound B"
        return f"{self.monitor}: VIOLATION at {idx} [{cert}]"


# --------------------------------------------------------------------------
# semantic view of a trace


class _Semantics:
    """Distinct codes of a trace with their semantic classes and relations."""

    def __init__(self, trace: Trace, eq: EqOracle):
        self.trace = trace
        self.eq = eq
        self.codes = trace.codes
        self.by_code: dict[int, Hypothesis] = {}
        for h in trace.hyps:
            self.by_code.setdefault(h.code, h)
        self.first: dict[int, int] = {}
        for t, c in enumerate(self.codes):
            self.first.setdefault(c, t)
        self.order = sorted(self.by_code, key=self.first.get)
        vmax = trace.prefix.max_value()
        self.bound = max(eq.bound, vmax + 1)
        self.exact = eq.mode == "exact" and self._try_exact()
        if eq.mode == "exact" and not self.exact and eq.strict:
            raise OracleUnavailable("trace has hypotheses outside the exact algebra; use --horizon")
        if not self.exact:
            self._ext = {c: h.extension_below(self.bound) for c, h in self.by_code.items()}
        self._classify()

    def _try_exact(self) -> bool:
        hs = list(self.by_code.values())
        if not all(h.is_exact for h in hs):
            return False
        try:
            descs = [h.descriptor for h in hs]
            if self.trace.target is not None:
                descs.append(self.trace.target)
            relation_window(*descs)
        except UndecidedSymbolically:
            return False
        return True

    # membership of a class representative
    def member(self, code: int, x: int) -> bool:
        if self.exact:
            return self.by_code[code].descriptor.member(x)
        return x in self._ext[code]

    def _eq(self, a: int, b: int) -> bool:
        if self.exact:
            return equal_exact(self.by_code[a].descriptor, self.by_code[b].descriptor)
        return self._ext[a] == self._ext[b]

    def _classify(self) -> None:
        reps: list[int] = []
        self.cls: dict[int, int] = {}
        for c in self.order:
            for i, r in enumerate(reps):
                if self._eq(c, r):
                    self.cls[c] = i
                    break
            else:
                self.cls[c] = len(reps)
                reps.append(c)
        self.reps = reps
        n = len(reps)
        self.sub = [[False] * n for _ in range(n)]
        for i, j in itertools.product(range(n), repeat=2):
            self.sub[i][j] = i == j or self._subset(reps[i], reps[j])
        self.seq = [self.cls[c] for c in self.codes]
        self.class_first: dict[int, int] = {}
        for t, k in enumerate(self.seq):
            self.class_first.setdefault(k, t)
        target = self.trace.target
        self.correct = set()
        if target is not None:
            for k, rep in enumerate(reps):
                if self._equals_target(rep):
                    self.correct.add(k)

    def _subset(self, a: int, b: int) -> bool:
        if self.exact:
            return subset_exact(self.by_code[a].descriptor, self.by_code[b].descriptor)
        return self._ext[a] <= self._ext[b]

    def _window(self) -> int:
        if self.exact:
            descs = [h.descriptor for h in self.by_code.values()]
            if self.trace.target is not None:
                descs.append(self.trace.target)
            return relation_window(*descs)
        return self.bound

    def _equals_target(self, code: int) -> bool:
        target = self.trace.target
        if self.exact:
            return equal_exact(self.by_code[code].descriptor, target)
        return all(target.member(x) == (x in self._ext[code]) for x in range(self.bound))

    def mon_gap(self, a: int, b: int) -> Optional[int]:
        """Least x in W_a n target but not in W_b (on the decision window)."""
        target = self.trace.target
        for x in range(self._window()):
            if target.member(x) and self.member(a, x) and not self.member(b, x):
                return x
        return None

    def inconsistency_time(self) -> dict:
        """Per class: least t with not Cons(I[t], W), or None if consistent throughout."""
        items = self.trace.prefix.items
        T = len(self.codes)
        out = {}
        for k, rep in enumerate(self.reps):
            out[k] = None
            for i, (x, b) in enumerate(items[: max(T - 1, 0)]):
                if self.member(rep, x) != bool(b):
                    out[k] = i + 1
                    break
        return out


def _pass(name, trace, sem, **kw) -> Verdict:
    return Verdict(name, "pass", horizon=len(trace), bound=None if sem.exact else sem.bound,
                   exact=sem.exact, **kw)


def _viol(name, trace, sem, r=None, s=None, t=None, **detail) -> Verdict:
    return Verdict(name, "violation", r, s, t, horizon=len(trace),
                   bound=None if sem.exact else sem.bound, exact=sem.exact, detail=detail)


def _first_other(seq: Sequence[int], start: int, value: int, stop: int) -> Optional[int]:
    for i in range(start, stop):
        if seq[i] != value:
            return i
    return None


def check_restriction(name: str, trace: Trace, eq: Optional[EqOracle] = None) -> Verdict:
    """Evaluate one restriction over all index pairs/triples below the trace length.

    Reports the least witness in (t, s, r) order.
    """
    if name not in RESTRICTIONS:
        raise ValueError(f"unknown restriction {name!r}; expected one of {RESTRICTIONS}")
    if name in NEEDS_TARGET and trace.target is None:
        raise ValueError(f"{name} quantifies over pos(I) and needs the trace target")
    eq = eq or EqOracle.exact()
    sem = _Semantics(trace, eq)
    T = len(trace)
    seq, codes = sem.seq, sem.codes

    if name == "SynDec":
        first = {}
        for t, c in enumerate(codes):
            r = first.setdefault(c, t)
            if r < t:
                s = _first_other(codes, r + 1, c, t)
                if s is not None:
                    return _viol(name, trace, sem, r, s, t)
        return _pass(name, trace, sem)

    if name in ("Dec", "NU"):
        for t in range(T):
            k = seq[t]
            if name == "NU" and k not in sem.correct:
                continue
            r = sem.class_first[k]
            s = _first_other(seq, r + 1, k, t)
            if s is not None:
                return _viol(name, trace, sem, r, s, t)
        return _pass(name, trace, sem)

    if name in ("SDec", "SNU"):
        for t in range(T):
            k = seq[t]
            if name == "SNU" and k not in sem.correct:
                continue
            r = sem.class_first[k]
            s = _first_other(codes, r + 1, codes[r], t + 1)
            if s is not None:
                return _viol(name, trace, sem, r, s, t)
        return _pass(name, trace, sem)

    # pairwise restrictions: for each t the least s <= t, looking only at first
    # occurrences of each semantic class (or code, for Conv)
    firsts = sorted((t0, k) for k, t0 in sem.class_first.items())
    if name == "Cons":
        inc = sem.inconsistency_time()
        for t in range(T):
            i = inc[seq[t]]
            if i is not None and i <= t:
                return _viol(name, trace, sem, t=t, datum=list(trace.prefix[i - 1]))
        return _pass(name, trace, sem)

    if name == "Conv":
        inc = sem.inconsistency_time()
        code_firsts = sorted((t0, c) for c, t0 in sem.first.items())
        for t in range(T):
            for s, c in code_firsts:
                if s > t:
                    break
                i = inc[sem.cls[c]]
                if c != codes[t] and (i is None or i > t):
                    return _viol(name, trace, sem, s=s, t=t)
        return _pass(name, trace, sem)

    if name == "WMon":
        inc = sem.inconsistency_time()
    for t in range(T):
        kt = seq[t]
        for s, ks in firsts:
            if s > t:
                break
            if name == "Caut":
                bad = ks != kt and sem.sub[kt][ks]
            elif name == "SMon":
                bad = not sem.sub[ks][kt]
            elif name == "WMon":
                i = inc[ks]
                bad = (i is None or i > t) and not sem.sub[ks][kt]
            else:  # Mon
                bad = ks != kt and sem.mon_gap(sem.reps[ks], sem.reps[kt]) is not None
            if bad:
                extra = {}
                if name == "Mon":
                    extra["x"] = sem.mon_gap(sem.reps[ks], sem.reps[kt])
                return _viol(name, trace, sem, s=s, t=t, **extra)
    return _pass(name, trace, sem)


def check_all(trace: Trace, names: Iterable[str] = RESTRICTIONS, eq: Optional[EqOracle] = None) -> dict:
    names = [n for n in names if trace.target is not None or n not in NEEDS_TARGET]
    return {n: check_restriction(n, trace, eq) for n in names}


# --------------------------------------------------------------------------
# convergence


Anomalies = Union[int, str]     # int or "*"
Vacillation = Union[int, str]   # positive int, "*" or "inf"


def check_lim(trace: Trace, a: Anomalies = 0, b: Vacillation = 1, B: int = 200,
              min_tail: Optional[int] = None) -> Verdict:
    """Lim^a_b on the finite trace: the least t0 whose suffix uses at most b codes,
    each with at most a anomalies against the target below B.

    The suffix must span at least ``min_tail`` steps (default: half the
    trace), otherwise every trace would converge at its last step.
    """
    if trace.target is None:
        raise ValueError("Lim needs the trace target")
    name = f"Lim({a},{b})"
    T = len(trace)
    if min_tail is None:
        min_tail = max(1, T // 2)
    codes = trace.codes
    cap = None if a == "*" else int(a)
    ok_code: dict[int, bool] = {}
    hyps = {h.code: h for h in trace.hyps}
    for c, h in hyps.items():
        n = sym_diff_count(h, trace.target, B, cap=cap)
        ok_code[c] = not isinstance(n, MoreThan)
    trivial = a == "*" or b == "*"
    limit = None if b in ("*", "inf") else int(b)
    # scan suffixes from the end: the suffix [t0, T) grows as t0 decreases
    best = None
    seen: set = set()
    for t0 in range(T - 1, -1, -1):
        c = codes[t0]
        if not ok_code[c]:
            break
        seen.add(c)
        if limit is not None and len(seen) > limit:
            break
        if T - t0 >= min_tail:
            best = t0
    base = dict(horizon=T, bound=B, exact=False, trivial=trivial)
    if best is None:
        return Verdict(name, "violation", t=T - 1 if T else None, detail={"reason": "no converging suffix"}, **base)
    return Verdict(name, "pass", t=best, detail={"t0": best, "final_codes": sorted(set(codes[best:]))}, **base)


# --------------------------------------------------------------------------
# delayability


def check_delayable(trace: Trace, I: Informant, trace_p: Trace, I_p: Informant,
                    s: Callable[[int], int], T: int) -> Verdict:
    """The three simulation clauses for t < T: data containment and h'_t = h_{s(t)}."""
    full = I.prefix(max(s(t) for t in range(T)) + 1 if T else 0)
    fast = I_p.prefix(T)
    for t in range(T):
        st = s(t)
        old, new = full.initial(st), fast.initial(t)
        if not old.pos <= new.pos:
            return Verdict("Delay", "violation", s=st, t=t, horizon=T, detail={"clause": "pos"})
        if not old.ng <= new.ng:
            return Verdict("Delay", "violation", s=st, t=t, horizon=T, detail={"clause": "ng"})
        if st >= len(trace) or trace_p.hyps[t] != trace.hyps[st]:
            return Verdict("Delay", "violation", s=st, t=t, horizon=T, detail={"clause": "hypothesis"})
    return Verdict("Delay", "pass", horizon=T)


# --------------------------------------------------------------------------
# locking sequences


@dataclass(frozen=True)
class CounterexampleExtension:
    tau: Prefix


@dataclass(frozen=True)
class LockedUpTo:
    depth: int
    bound: int


def locking_falsifier(M: Learner, L: LangDescriptor, sigma: Prefix, depth: int, bound: int):
    """Search L-consistent extensions (shortest first, then lexicographic by value)."""
    if not consistent(sigma, L):
        raise ValueError("sigma must be consistent with L")
    base = M(sigma)
    labels = [InfoPair(v, 1 if L.member(v) else 0) for v in range(bound)]
    for n in range(1, depth + 1):
        for vals in itertools.product(range(bound), repeat=n):
            tau = tuple(labels[v] for v in vals)
            if M(Prefix._trusted(sigma.items + tau)) != base:
                return CounterexampleExtension(Prefix._trusted(tau))
    return LockedUpTo(depth, bound)


# --------------------------------------------------------------------------
# implication backbone


BACKBONE = (
    ("Conv", ("SNU", "WMon")),
    ("SDec", ("Dec", "SNU")),
    ("SMon", ("Caut", "Dec", "Mon", "WMon")),
    (("Dec", "SNU"), ("NU",)),
)


def backbone_contradictions(verdicts: dict) -> list[str]:
    """Implications of the backbone lattice that the given verdicts contradict."""
    out = []
    for lhs, rhs in BACKBONE:
        lhs = (lhs,) if isinstance(lhs, str) else lhs
        if not all(n in verdicts for n in lhs + rhs):
            continue
        if all(verdicts[n].passed for n in lhs):
            for n in rhs:
                if not verdicts[n].passed:
                    out.append(f"{'+'.join(lhs)} passes but {n} fails")
    return out
