"""Hypothesis space: exact descriptors plus step-bounded enumerators.

Two backends share one code registry.  ``Exact`` hypotheses carry a
``LangDescriptor`` with total membership and, for the closed algebra, an
eventual-periodicity certificate that makes equality and inclusion exactly
decidable.  ``Enumerated`` hypotheses carry an ``Enumerator`` whose step-t
enumeration is monotone in t; their extension is only ever observed at a
finite budget.
"""
from __future__ import annotations

import bisect
import contextlib
import contextvars
import json
import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, NamedTuple, Optional, Union

from .core import Prefix, pair_decode, pair_encode


class UndecidedSymbolically(Exception):
    """No symbolic rule decides this descriptor pair; fall back to a horizon check."""


class NotExact(TypeError):
    """Exact membership requested on an enumerated hypothesis."""


# --------------------------------------------------------------------------
# step-costed programs


class Halt(NamedTuple):
    value: int


class _Running:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "Running"

    def __bool__(self) -> bool:
        return False


RUNNING = _Running()


class FnProgram:
    """A deterministic, possibly partial, step-costed map N -> N.

    ``cost(x)`` is the number of steps needed on ``x`` (``None`` = diverges).
    """

    def __init__(self, name: str, fn: Callable[[int], int], cost: Callable[[int], Optional[int]] = None):
        self.name = name
        self.fn = fn
        self.cost = cost or (lambda x: 1)

    def eval_with_budget(self, x: int, t: int):
        c = self.cost(x)
        if c is None or c > t:
            return RUNNING
        return Halt(self.fn(x))

    def __call__(self, x: int) -> int:
        if self.cost(x) is None:
            raise RuntimeError(f"{self.name} diverges on {x}")
        return self.fn(x)

    def __eq__(self, other) -> bool:
        return isinstance(other, FnProgram) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("FnProgram", self.name))

    def __repr__(self) -> str:
        return f"FnProgram({self.name})"


PROGRAMS: dict[str, FnProgram] = {}


def register_program(p: FnProgram) -> FnProgram:
    PROGRAMS[p.name] = p
    return p


IDENTITY = register_program(FnProgram("identity", lambda x: x))
CONST0 = register_program(FnProgram("const0", lambda x: 0))
MOD3 = register_program(FnProgram("mod3", lambda x: x % 3, cost=lambda x: 1 + x // 3))


# --------------------------------------------------------------------------
# uniform deciders: name -> (bit function f(x, index), optional periodicity(index))


def _parity_threshold(x: int, k: int) -> int:
    return int((x % 2 == 0 and x <= k) or (x % 2 == 1 and x > k))


DECIDERS: dict[str, tuple[Callable[[int, int], int], Optional[Callable[[int], tuple]]]] = {
    # evens up to k together with odds above k
    "parity_threshold": (_parity_threshold, lambda k: (k + 1, 2)),
    # multiples of (index + 1)
    "multiples": (lambda x, k: int(x % (k + 1) == 0), lambda k: (0, k + 1)),
    # index, index + 2, index + 4, ...: a language whose minimum is its index
    "evens_from": (lambda x, k: int(x >= k and (x - k) % 2 == 0), lambda k: (k, 2)),
}


def register_decider(name: str, fn: Callable[[int, int], int], periodicity=None) -> None:
    DECIDERS[name] = (fn, periodicity)


# --------------------------------------------------------------------------
# descriptors


def _fs(xs) -> frozenset:
    return frozenset(int(x) for x in xs)


class LangDescriptor:
    """Symbolic description of a decidable language."""

    def member(self, x: int) -> bool:
        raise NotImplementedError

    def periodicity(self) -> Optional[tuple[int, int]]:
        """(start, period) with membership periodic beyond start, or None."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError

    def __contains__(self, x: int) -> bool:
        return self.member(x)


@dataclass(frozen=True)
class Finite(LangDescriptor):
    X: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "X", _fs(self.X))

    def member(self, x):
        return x in self.X

    def periodicity(self):
        return (max(self.X, default=-1) + 1, 1)

    def to_json(self):
        return {"kind": "finite", "X": sorted(self.X)}

    def __repr__(self):
        return f"Finite({sorted(self.X)})"


@dataclass(frozen=True)
class Cofinite(LangDescriptor):
    X: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "X", _fs(self.X))

    def member(self, x):
        return x not in self.X

    def periodicity(self):
        return (max(self.X, default=-1) + 1, 1)

    def to_json(self):
        return {"kind": "cofinite", "X": sorted(self.X)}

    def __repr__(self):
        return f"Cofinite({sorted(self.X)})"


@dataclass(frozen=True)
class Evens(LangDescriptor):
    def member(self, x):
        return x % 2 == 0

    def periodicity(self):
        return (0, 2)

    def to_json(self):
        return {"kind": "evens"}

    def __repr__(self):
        return "Evens"


@dataclass(frozen=True)
class EvensPlusOne(LangDescriptor):
    def member(self, x):
        return x % 2 == 0 or x == 1

    def periodicity(self):
        return (2, 2)

    def to_json(self):
        return {"kind": "evens_plus_one"}

    def __repr__(self):
        return "EvensPlusOne"


@dataclass(frozen=True)
class Split(LangDescriptor):
    """2X u (2(N \\ X) + 1); ``X=None`` stands for X = N."""

    X: Optional[frozenset] = None

    def __post_init__(self):
        if self.X is not None:
            object.__setattr__(self, "X", _fs(self.X))

    @classmethod
    def all(cls) -> "Split":
        return cls(None)

    def member(self, x):
        half, odd = divmod(x, 2)
        inside = self.X is None or half in self.X
        return inside != bool(odd)

    def periodicity(self):
        if self.X is None:
            return (0, 2)
        return (2 * (max(self.X, default=-1) + 1), 2)

    def to_json(self):
        return {"kind": "split", "X": "all" if self.X is None else sorted(self.X)}

    def __repr__(self):
        return "Split(All)" if self.X is None else f"Split({sorted(self.X)})"


@dataclass(frozen=True)
class BaseWithException(LangDescriptor):
    base: LangDescriptor
    x: int

    def member(self, y):
        return y == self.x or self.base.member(y)

    def periodicity(self):
        p = self.base.periodicity()
        return None if p is None else (max(p[0], self.x + 1), p[1])

    def to_json(self):
        return {"kind": "base_with_exception", "base": self.base.to_json(), "x": self.x}

    def __repr__(self):
        return f"{self.base!r}+{{{self.x}}}"


@dataclass(frozen=True)
class DoubledPair(LangDescriptor):
    """Doubled copy of ``base`` with an optional one-element exception.

    side="odd":  2B u 2(B u {x}) + 1
    side="even": 2(B u {x}) u 2B + 1
    ``x=None`` means no exception (2B u 2B+1).
    """

    base: LangDescriptor
    x: Optional[int] = None
    side: str = "odd"

    def __post_init__(self):
        if self.side not in ("odd", "even"):
            raise ValueError(f"side must be 'odd' or 'even', not {self.side!r}")

    def member(self, n):
        half, odd = divmod(n, 2)
        if self.x is not None and half == self.x and bool(odd) == (self.side == "odd"):
            return True
        return self.base.member(half)

    def periodicity(self):
        p = self.base.periodicity()
        if p is None:
            return None
        start = p[0] if self.x is None else max(p[0], self.x + 1)
        return (2 * start, 2 * p[1])

    def to_json(self):
        return {"kind": "doubled_pair", "base": self.base.to_json(), "x": self.x, "side": self.side}

    def __repr__(self):
        exc = "" if self.x is None else f",x={self.x},{self.side}"
        return f"DoubledPair({self.base!r}{exc})"


@dataclass(frozen=True)
class Graph(LangDescriptor):
    """{<x, f(x)>} for a total program f."""

    f: FnProgram

    def member(self, n):
        x, y = pair_decode(n)
        return self.f(x) == y

    def to_json(self):
        return {"kind": "graph", "f": self.f.name}

    def __repr__(self):
        return f"Graph({self.f.name})"


@dataclass(frozen=True)
class Uniform(LangDescriptor):
    """Member ``index`` of a uniformly decidable family: x in L iff decider(x, index) = 1."""

    decider: str
    index: int

    def __post_init__(self):
        if self.decider not in DECIDERS:
            raise KeyError(f"unknown decider {self.decider!r}")

    def member(self, x):
        return DECIDERS[self.decider][0](x, self.index) == 1

    def periodicity(self):
        hint = DECIDERS[self.decider][1]
        return None if hint is None else hint(self.index)

    def to_json(self):
        return {"kind": "uniform", "decider": self.decider, "index": self.index}

    def __repr__(self):
        return f"{self.decider}[{self.index}]"


NATURALS = Cofinite(frozenset())
EMPTY_LANGUAGE = Finite(frozenset())


def descriptor_from_json(d: dict) -> LangDescriptor:
    kind = d.get("kind")
    if kind == "finite":
        return Finite(d["X"])
    if kind == "cofinite":
        return Cofinite(d["X"])
    if kind == "evens":
        return Evens()
    if kind == "evens_plus_one":
        return EvensPlusOne()
    if kind == "split":
        return Split(None if d["X"] == "all" else d["X"])
    if kind == "base_with_exception":
        return BaseWithException(descriptor_from_json(d["base"]), int(d["x"]))
    if kind == "doubled_pair":
        return DoubledPair(descriptor_from_json(d["base"]), d.get("x"), d.get("side", "odd"))
    if kind == "graph":
        try:
            return Graph(PROGRAMS[d["f"]])
        except KeyError:
            raise ValueError(f"unknown program {d['f']!r}") from None
    if kind == "uniform":
        try:
            return Uniform(d["decider"], int(d["index"]))
        except KeyError:
            raise ValueError(f"unknown decider {d['decider']!r}") from None
    raise ValueError(f"unknown descriptor kind {kind!r}")


# --------------------------------------------------------------------------
# exact relations


def relation_window(*descs: LangDescriptor) -> int:
    """A bound W such that membership on [0, W) decides all Boolean relations."""
    forms = [d.periodicity() for d in descs]
    if any(f is None for f in forms):
        raise UndecidedSymbolically(f"no periodicity certificate among {descs!r}")
    start = max(f[0] for f in forms)
    period = 1
    for f in forms:
        period = period * f[1] // math.gcd(period, f[1])
    return start + period


def equal_exact(a: LangDescriptor, b: LangDescriptor) -> bool:
    if a == b:
        return True
    w = relation_window(a, b)
    return all(a.member(x) == b.member(x) for x in range(w))


def subset_exact(a: LangDescriptor, b: LangDescriptor) -> bool:
    if a == b:
        return True
    w = relation_window(a, b)
    return all(b.member(x) for x in range(w) if a.member(x))


def proper_subset_exact(a: LangDescriptor, b: LangDescriptor) -> bool:
    return subset_exact(a, b) and not subset_exact(b, a)


def subset_within_exact(a: LangDescriptor, b: LangDescriptor, within: LangDescriptor) -> bool:
    """a n within  <=  b n within."""
    w = relation_window(a, b, within)
    return all(b.member(x) for x in range(w) if a.member(x) and within.member(x))


# --------------------------------------------------------------------------
# enumerators


class Enumerator:
    """Monotone step-bounded enumeration W^t."""

    provenance = "abstract"

    def enum_up_to(self, t: int) -> frozenset:
        raise NotImplementedError

    def bound(self, t: int) -> int:
        """Every element of enum_up_to(t) is below this."""
        return max(self.enum_up_to(t), default=-1) + 1

    def default_budget(self, horizon: int) -> int:
        return horizon

    def first_step(self, x: int, limit: int) -> Optional[int]:
        """Least t <= limit with x in enum_up_to(t), else None."""
        if x not in self.enum_up_to(limit):
            return None
        lo, hi = 0, limit
        while lo < hi:
            mid = (lo + hi) // 2
            if x in self.enum_up_to(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def to_json(self) -> dict:
        return {"provenance": self.provenance}


class LiftedExact(Enumerator):
    """enum_up_to(t) = {x < t : x in d}."""

    provenance = "lifted-exact"

    def __init__(self, desc: LangDescriptor):
        self.desc = desc
        self._members: list[int] = []
        self._scanned = 0
        self._lock = threading.Lock()
        self._windows: list = []
        self._window_items: list = []
        self._window_tuple: tuple = ()

    def _scan(self, t: int) -> None:
        with self._lock:
            while self._scanned < t:
                if self.desc.member(self._scanned):
                    self._members.append(self._scanned)
                self._scanned += 1

    def enum_up_to(self, t: int) -> frozenset:
        self._scan(t)
        return frozenset(self._members[: bisect.bisect_left(self._members, t)])

    def window(self, n: int) -> Prefix:
        """Canonical informant prefix of length n for the descriptor (cached)."""
        ws = self._windows
        if n < len(ws):
            w = ws[n]
            if w is not None:
                return w
        from .core import InfoPair

        full = self._window_items
        if n > len(full):
            d = self.desc
            # grow geometrically so the backing tuple is rebuilt rarely
            for v in range(len(full), max(n, 2 * len(full), 16)):
                full.append(InfoPair(v, 1 if d.member(v) else 0))
            self._window_tuple = tuple(full)
        ws = self._windows
        if n >= len(ws):
            ws.extend([None] * (n + 1 - len(ws)))
        w = ws[n]
        if w is None:
            w = ws[n] = Prefix._trusted(self._window_tuple[:n])
            w._inits = ws
        return w

    def sorted_up_to(self, t: int) -> list[int]:
        self._scan(t)
        return self._members[: bisect.bisect_left(self._members, t)]

    def bound(self, t):
        return t

    def first_step(self, x, limit):
        return x + 1 if x + 1 <= limit and self.desc.member(x) else None

    def to_json(self):
        return {"provenance": self.provenance, "descriptor": self.desc.to_json()}


def lift_exact(d: LangDescriptor) -> LiftedExact:
    return LiftedExact(d)


class Guarded(Enumerator):
    """inner minus a fixed finite set K of realized commission errors."""

    provenance = "guard"

    def __init__(self, inner: Enumerator, removed: frozenset):
        self.inner = inner
        self.removed = frozenset(removed)

    def enum_up_to(self, t):
        return self.inner.enum_up_to(t) - self.removed

    def bound(self, t):
        return self.inner.bound(t)

    def default_budget(self, horizon):
        return self.inner.default_budget(horizon)

    def first_step(self, x, limit):
        return None if x in self.removed else self.inner.first_step(x, limit)

    def to_json(self):
        return {"provenance": self.provenance, "removed": sorted(self.removed)}


class UnionVote(Enumerator):
    provenance = "union-vote"

    def __init__(self, parts: Iterable[Enumerator]):
        self.parts = tuple(parts)

    def enum_up_to(self, t):
        out = frozenset()
        for p in self.parts:
            out = out | p.enum_up_to(t)
        return out

    def bound(self, t):
        return max((p.bound(t) for p in self.parts), default=0)

    def default_budget(self, horizon):
        return max((p.default_budget(horizon) for p in self.parts), default=horizon)

    def first_step(self, x, limit):
        steps = [s for s in (p.first_step(x, limit) for p in self.parts) if s is not None]
        return min(steps, default=None)

    def to_json(self):
        return {"provenance": self.provenance, "parts": len(self.parts)}


class GraphEnumerator(Enumerator):
    """<x, y> appears at step t iff x < t and the program halts on x with y within t steps."""

    provenance = "graph-encode"

    def __init__(self, program: FnProgram):
        self.program = program

    def enum_up_to(self, t):
        out = set()
        for x in range(t):
            r = self.program.eval_with_budget(x, t)
            if r is not RUNNING:
                out.add(pair_encode(x, r.value))
        return frozenset(out)

    def first_step(self, n, limit):
        x, y = pair_decode(n)
        c = self.program.cost(x)
        if c is None:
            return None
        s = max(x + 1, c)
        if s > limit or self.program.fn(x) != y:
            return None
        return s

    def default_budget(self, horizon):
        # every <x, y> < horizon has x < horizon
        costs = [self.program.cost(x) for x in range(horizon)]
        return horizon + max((c for c in costs if c is not None), default=0)

    def to_json(self):
        return {"provenance": self.provenance, "program": self.program.name}


class Snapshot(Enumerator):
    """A recorded enumeration: members known at a fixed budget (loaded from files)."""

    provenance = "snapshot"

    def __init__(self, members: Iterable[int], budget: int, source: str = ""):
        self.members = frozenset(members)
        self.budget = budget
        self.source = source

    def enum_up_to(self, t):
        return self.members

    def default_budget(self, horizon):
        return self.budget

    def to_json(self):
        return {"provenance": self.provenance, "source": self.source, "budget": self.budget}


# --------------------------------------------------------------------------
# hypotheses and the code registry


class Membership(Enum):
    IN = "In"
    NOT_YET = "NotYet"


@dataclass(eq=False)
class Hypothesis:
    code: int
    binding: Union[LangDescriptor, Enumerator]
    salt: Optional[int] = None
    base: Optional["Hypothesis"] = None
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.binding, LangDescriptor)

    @property
    def descriptor(self) -> LangDescriptor:
        if not self.is_exact:
            raise NotExact(f"hypothesis {self.code} is enumerated ({self.binding.provenance})")
        return self.binding

    @property
    def enumerator(self) -> Enumerator:
        if self.is_exact:
            if self.base is not None and self.base.binding is self.binding:
                return self.base.enumerator
            if "lift" not in self._cache:
                self._cache["lift"] = LiftedExact(self.binding)
            return self._cache["lift"]
        return self.binding

    def member(self, x: int) -> bool:
        return self.descriptor.member(x)

    def member_up_to(self, x: int, t: int) -> Membership:
        return Membership.IN if x in self.enumerator.enum_up_to(t) else Membership.NOT_YET

    def default_budget(self, horizon: int) -> int:
        return horizon if self.is_exact else self.binding.default_budget(horizon)

    def extension_below(self, horizon: int, budget: Optional[int] = None) -> frozenset:
        """Members below ``horizon``; enumerated hypotheses are read at ``budget``."""
        if self.is_exact:
            key = ("ext", horizon)
            if key not in self._cache:
                d = self.binding
                self._cache[key] = frozenset(x for x in range(horizon) if d.member(x))
            return self._cache[key]
        if budget is None:
            budget = self.binding.default_budget(horizon)
        key = ("ext", horizon, budget)
        if key not in self._cache:
            self._cache[key] = frozenset(x for x in self.binding.enum_up_to(budget) if x < horizon)
        return self._cache[key]

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.is_exact:
            s = repr(self.binding)
        else:
            s = f"<{self.binding.provenance}>"
        return s if self.salt is None else f"{s}#pad{self.salt}"

    def to_json(self) -> dict:
        d = {"code": self.code, "salt": self.salt}
        if self.is_exact:
            d["exact"] = self.binding.to_json()
        else:
            d["enumerated"] = self.binding.to_json()
        if self.base is not None:
            d["base"] = self.base.code
        return d

    def __eq__(self, other) -> bool:
        return isinstance(other, Hypothesis) and other.code == self.code

    def __hash__(self) -> int:
        return hash(self.code)

    def __repr__(self) -> str:
        return f"h{self.code}:{self.describe()}"


class Registry:
    """Interns content keys to consecutive natural codes."""

    def __init__(self):
        # reentrant: building one hypothesis may intern others
        self._lock = threading.RLock()
        self._by_key: dict = {}
        self._by_code: list[Hypothesis] = []

    def intern(self, key, build: Callable[[int], Hypothesis]) -> Hypothesis:
        with self._lock:
            h = self._by_key.get(key)
            if h is None:
                code = len(self._by_code)
                self._by_code.append(None)
                h = build(code)
                self._by_key[key] = h
                self._by_code[code] = h
            return h

    def lookup(self, code: int) -> Hypothesis:
        return self._by_code[code]

    def __len__(self) -> int:
        return len(self._by_code)

    def code_table(self, codes: Optional[Iterable[int]] = None) -> dict:
        codes = range(len(self._by_code)) if codes is None else sorted(set(codes))
        return {str(c): self._by_code[c].to_json() for c in codes}


_REGISTRY = contextvars.ContextVar("goldlab_registry", default=Registry())


def current_registry() -> Registry:
    return _REGISTRY.get()


@contextlib.contextmanager
def fresh_registry():
    """Issue codes from a new registry inside the block (reproducible numbering)."""
    token = _REGISTRY.set(Registry())
    try:
        yield _REGISTRY.get()
    finally:
        _REGISTRY.reset(token)


def exact(d: LangDescriptor) -> Hypothesis:
    return current_registry().intern(("exact", d), lambda c: Hypothesis(c, d))


def enumerated(key, enumerator: Enumerator, label: str = "") -> Hypothesis:
    return current_registry().intern(("enum",) + tuple(key), lambda c: Hypothesis(c, enumerator, label=label))


def ind_finite(X: Iterable[int]) -> Hypothesis:
    return exact(Finite(X))


def pad(h: Hypothesis, salt: int) -> Hypothesis:
    """Fresh code, identical extension; injective in (h.code, salt)."""
    return current_registry().intern(
        ("pad", h.code, salt), lambda c: Hypothesis(c, h.binding, salt=salt, base=h))


def guard_xi(sigma: Prefix, h: Hypothesis) -> Hypothesis:
    """Remove the commission errors of h already visible at step |sigma|.

    The code depends on (h.code, K) only, K = W^{|sigma|}_h n ng(sigma).
    """
    K = h.enumerator.enum_up_to(len(sigma)) & sigma.ng
    return guard_with(h, K)


def guard_with(h: Hypothesis, K: frozenset) -> Hypothesis:
    K = frozenset(K)
    return current_registry().intern(
        ("xi", h.code, K), lambda c: Hypothesis(c, Guarded(h.enumerator, K), base=h))


def union_vote(hs: Iterable[Hypothesis]) -> Hypothesis:
    hs = {h.code: h for h in hs}
    codes = frozenset(hs)
    parts = [hs[c].enumerator for c in sorted(codes)]
    return current_registry().intern(("union", codes), lambda c: Hypothesis(c, UnionVote(parts)))


def graph_encode_g(p: FnProgram) -> Hypothesis:
    return current_registry().intern(("G", p.name), lambda c: Hypothesis(c, GraphEnumerator(p)))


class DecodedProgram(FnProgram):
    """phi_{H(h)}: search the enumeration of h for a pair whose first coordinate is x.

    The search is dovetailed by enumeration step (earliest step first, then
    smallest pair code), so a Halt answer never changes under larger budgets.
    """

    def __init__(self, h: Hypothesis):
        self.h = h
        super().__init__(f"H({h.code})", self._unbounded, cost=self._cost)

    def _find(self, x: int, t: int):
        # enumerations are monotone, so the earliest pair for x is already
        # visible at the first budget where any pair for x is
        b = 1
        while True:
            b = min(b, t)
            found = self._find_at(x, b)
            if found is not None or b == t:
                return found
            b *= 2

    def _find_at(self, x: int, t: int):
        e = self.h.enumerator
        best = None
        for n in e.enum_up_to(t):
            u, v = pair_decode(n)
            if u != x:
                continue
            s = e.first_step(n, t)
            if best is None or (s, n) < best[0]:
                best = ((s, n), v)
        return best

    def eval_with_budget(self, x, t):
        found = self._find(x, t)
        return RUNNING if found is None else Halt(found[1])

    def _cost(self, x):
        return None

    def _unbounded(self, x):
        raise RuntimeError("decoded programs are only evaluated under a budget")

    def run(self, x: int, max_budget: int):
        """Smallest budget t <= max_budget at which the program halts on x, with its value."""
        found = self._find(x, max_budget)
        if found is None:
            return None
        (s, _), v = found
        return s, v


def graph_decode_h(h: Hypothesis) -> DecodedProgram:
    return DecodedProgram(h)


# --------------------------------------------------------------------------
# horizon comparisons


class MoreThan(NamedTuple):
    cap: int


def agree_up_to(a: Hypothesis, b: Hypothesis, horizon: int, budget: Optional[int] = None) -> bool:
    return a.extension_below(horizon, budget) == b.extension_below(horizon, budget)


def sym_diff_count(h: Hypothesis, target: LangDescriptor, horizon: int,
                   cap: Optional[int] = None, budget: Optional[int] = None):
    """|W_h symmetric-difference target| restricted to [0, horizon); MoreThan(cap) past cap."""
    ext = h.extension_below(horizon, budget)
    n = 0
    for x in range(horizon):
        if (x in ext) != target.member(x):
            n += 1
            if cap is not None and n > cap:
                return MoreThan(cap)
    return n


# --------------------------------------------------------------------------
# serialization


def dumps_descriptor(d: LangDescriptor) -> str:
    return json.dumps(d.to_json(), sort_keys=True)


def loads_descriptor(s: str) -> LangDescriptor:
    return descriptor_from_json(json.loads(s))
