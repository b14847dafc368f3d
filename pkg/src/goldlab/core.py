"""Labeled data, prefixes, informants, schedules and pairing.

Everything here is immutable once built.  Informants are total generators
indexed by time and are never materialized beyond the requested prefix.
"""
from __future__ import annotations

import json
import math
import random
from operator import itemgetter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, NamedTuple, Optional, Sequence


class ContradictionError(ValueError):
    """A value was labeled both 1 and 0."""


class ScheduleError(ValueError):
    """A schedule rule does not cover every natural number."""


class InfoPair(NamedTuple):
    value: int
    label: int

    @classmethod
    def make(cls, value: int, label: int) -> "InfoPair":
        if value < 0:
            raise ValueError(f"negative value {value}")
        if label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        return cls(int(value), int(label))


class Prefix:
    """A finite, contradiction-free sequence of labeled data.

    Construction rejects contradictory labels.  ``pos``/``ng`` are computed
    lazily and cached; slicing a validated prefix skips re-validation.
    """

    __slots__ = ("items", "_pos", "_ng", "_hash", "_inits")

    def __init__(self, items: Iterable = ()):
        pairs = tuple(p if type(p) is InfoPair else InfoPair.make(*p) for p in items)
        pos, ng = set(), set()
        for t, (x, b) in enumerate(pairs):
            if b:
                if x in ng:
                    raise ContradictionError(f"value {x} labeled 1 at t={t} but 0 earlier")
                pos.add(x)
            else:
                if x in pos:
                    raise ContradictionError(f"value {x} labeled 0 at t={t} but 1 earlier")
                ng.add(x)
        self.items = pairs
        self._pos = frozenset(pos)
        self._ng = frozenset(ng)
        self._hash = None
        self._inits = None

    @classmethod
    def _trusted(cls, items: tuple) -> "Prefix":
        obj = cls.__new__(cls)
        obj.items = items
        obj._pos = None
        obj._ng = None
        obj._hash = None
        obj._inits = None
        return obj

    def _side(self, label: int) -> frozenset:
        """Values carrying ``label``, built from the one-shorter prefix when it is cached."""
        items = self.items
        n = len(items)
        attr = "_pos" if label else "_ng"
        inits = self._inits
        if n and inits is not None:
            prev = inits[n - 1]
            if prev is not None:
                known = getattr(prev, attr)
                if known is not None:
                    x, b = items[-1]
                    return known | {x} if b == label else known
        return frozenset([x for x, b in items if b == label])

    @property
    def pos(self) -> frozenset:
        if self._pos is None:
            self._pos = self._side(1)
        return self._pos

    @property
    def ng(self) -> frozenset:
        if self._ng is None:
            self._ng = self._side(0)
        return self._ng

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[InfoPair]:
        return iter(self.items)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Prefix._trusted(self.items[idx])
        return self.items[idx]

    def initial(self, t: int) -> "Prefix":
        """sigma[t]: the first t items."""
        n = len(self.items)
        if t >= n:
            return self
        # initial segments are shared objects, so repeated lookups hash once
        inits = self._inits
        if inits is None:
            inits = self._inits = [None] * (n + 1)
            inits[n] = self
        p = inits[t]
        if p is None:
            p = inits[t] = Prefix._trusted(self.items[:t])
            p._inits = inits
        return p

    @property
    def minus(self) -> "Prefix":
        """All but the last item (the empty prefix stays empty)."""
        return self.initial(max(0, len(self.items) - 1))

    def extend(self, more: Iterable) -> "Prefix":
        return Prefix(self.items + tuple(more))

    def append(self, pair) -> "Prefix":
        pair = pair if type(pair) is InfoPair else InfoPair.make(*pair)
        x, b = pair
        if (b and x in self.ng) or (not b and x in self.pos):
            raise ContradictionError(f"value {x} already carries the opposite label")
        return Prefix._trusted(self.items + (pair,))

    def is_initial_segment_of(self, other: "Prefix") -> bool:
        n = len(self.items)
        return n <= len(other.items) and other.items[:n] == self.items

    def max_value(self) -> int:
        return max((x for x, _ in self.items), default=-1)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Prefix):
            return NotImplemented
        return self.items == other.items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.items)
        return self._hash

    def __repr__(self) -> str:
        body = ",".join(f"({x},{b})" for x, b in self.items)
        return f"Prefix({body})"


EMPTY = Prefix()


def pos_of(sigma: Prefix) -> frozenset:
    return sigma.pos


def ng_of(sigma: Prefix) -> frozenset:
    return sigma.ng


def consistent(sigma: Prefix, language) -> bool:
    """Cons(sigma, A): every positive datum is in A, every negative one is not.

    ``language`` is anything with a ``member(x)`` method or a plain callable.
    """
    member = getattr(language, "member", language)
    return all(member(x) for x in sigma.pos) and not any(member(x) for x in sigma.ng)


def covered_length(sigma: Prefix) -> int:
    """Largest s such that every w < s is labeled somewhere in sigma."""
    seen = sigma.pos | sigma.ng
    s = 0
    while s in seen:
        s += 1
    return s


def sigma_canonicalize(sigma: Prefix) -> Prefix:
    """Sorted, duplicate-free canonical rewrite of the fully-labeled initial segment."""
    if tuple(map(itemgetter(0), sigma.items)) == tuple(range(len(sigma.items))):
        return sigma
    s = covered_length(sigma)
    ng = sigma.ng
    return Prefix._trusted(tuple(InfoPair(t, 0 if t in ng else 1) for t in range(s)))


def canonical_prefix(member: Callable[[int], bool], n: int) -> Prefix:
    return Prefix._trusted(tuple(InfoPair(t, 1 if member(t) else 0) for t in range(n)))


# --------------------------------------------------------------------------
# pairing


def pair_encode(x: int, y: int) -> int:
    """Cantor pairing <x, y> = (x+y)(x+y+1)/2 + y."""
    if x < 0 or y < 0:
        raise ValueError("pairing is defined on naturals only")
    s = x + y
    return s * (s + 1) // 2 + y


def pair_decode(n: int) -> tuple[int, int]:
    if n < 0:
        raise ValueError("pairing is defined on naturals only")
    w = (math.isqrt(8 * n + 1) - 1) // 2
    y = n - w * (w + 1) // 2
    return w - y, y


def pi1(n: int) -> int:
    return pair_decode(n)[0]


def pi2(n: int) -> int:
    return pair_decode(n)[1]


# --------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Schedule:
    """A time -> value rule that provably covers every natural number.

    Rules are closed-form: an optional finite permutation of an initial
    segment, block permutations of bounded width, and a duplication factor
    (applied last: ``order(t) = blocks(t // factor)``).
    """

    width: int = 1
    perms: tuple = ((0,),)
    factor: int = 1
    head: tuple = ()
    name: str = "identity"

    def __post_init__(self):
        if self.width < 1 or self.factor < 1:
            raise ScheduleError("block width and duplication factor must be positive")
        if not self.perms:
            raise ScheduleError("at least one block permutation is required")
        for p in self.perms:
            if sorted(p) != list(range(self.width)):
                raise ScheduleError(f"{p} is not a permutation of range({self.width})")
        if sorted(self.head) != list(range(len(self.head))):
            raise ScheduleError(f"head {self.head} is not a permutation of an initial segment")

    @classmethod
    def identity(cls) -> "Schedule":
        return cls()

    @classmethod
    def blocks(cls, width: int, perm: Sequence[int], name: Optional[str] = None) -> "Schedule":
        return cls(width=width, perms=(tuple(perm),), name=name or f"blocks{width}:{list(perm)}")

    @classmethod
    def swap_pairs(cls) -> "Schedule":
        return cls.blocks(2, (1, 0), name="swap-pairs")

    @classmethod
    def duplicate(cls, factor: int) -> "Schedule":
        return cls(factor=factor, name=f"duplicate{factor}")

    @classmethod
    def prefix_permutation(cls, head: Sequence[int]) -> "Schedule":
        return cls(head=tuple(head), name=f"head{list(head)}")

    @classmethod
    def random(cls, seed: int, max_width: int = 6, max_factor: int = 2) -> "Schedule":
        """Seeded block shuffles; each block draws one of a few fixed permutations."""
        rng = random.Random(seed)
        width = rng.randint(2, max_width)
        perms = []
        for _ in range(rng.randint(1, 4)):
            p = list(range(width))
            rng.shuffle(p)
            perms.append(tuple(p))
        factor = rng.randint(1, max_factor)
        return cls(width=width, perms=tuple(perms), factor=factor, name=f"random{seed}")

    def __call__(self, t: int) -> int:
        t //= self.factor
        if t < len(self.head):
            return self.head[t]
        t -= len(self.head)
        block, offset = divmod(t, self.width)
        perm = self.perms[block % len(self.perms)]
        return len(self.head) + block * self.width + perm[offset]

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "perms": [list(p) for p in self.perms],
            "factor": self.factor,
            "head": list(self.head),
            "name": self.name,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Schedule":
        if "random" in d:
            return cls.random(int(d["random"]))
        return cls(
            width=d.get("width", 1),
            perms=tuple(tuple(p) for p in d.get("perms", [[0]])),
            factor=d.get("factor", 1),
            head=tuple(d.get("head", ())),
            name=d.get("name", "custom"),
        )


# --------------------------------------------------------------------------
# informants


class Informant:
    """A total map t -> InfoPair, optionally tagged with the language it presents."""

    def __init__(self, generator: Callable[[int], InfoPair], target=None, name: str = ""):
        self._gen = generator
        self.target = target
        self.name = name
        self._items: list[InfoPair] = []

    def __call__(self, t: int) -> InfoPair:
        while len(self._items) <= t:
            self._items.append(self._gen(len(self._items)))
        return self._items[t]

    def prefix(self, t: int) -> Prefix:
        """I[t]."""
        if t > 0:
            self(t - 1)
        return Prefix._trusted(tuple(self._items[:t]))

    def prefixes(self, horizon: int) -> Iterator[Prefix]:
        full = self.prefix(horizon)
        for t in range(horizon + 1):
            yield full.initial(t)

    def __repr__(self) -> str:
        return f"Informant({self.name or self.target!r})"


def _member_fn(language) -> Callable[[int], bool]:
    return getattr(language, "member", language)


def canonical_informant(language) -> Informant:
    member = _member_fn(language)
    return Informant(lambda t: InfoPair(t, 1 if member(t) else 0), target=language, name="canonical")


def scheduled_informant(language, schedule: Schedule) -> Informant:
    member = _member_fn(language)

    def gen(t: int) -> InfoPair:
        x = schedule(t)
        return InfoPair(x, 1 if member(x) else 0)

    return Informant(gen, target=language, name=schedule.name)


def informant_from_prefix_then(prefix: Prefix, rest: Informant) -> Informant:
    """Play ``prefix`` first, then continue with ``rest`` from its start."""
    n = len(prefix)
    return Informant(lambda t: prefix[t] if t < n else rest(t - n), target=rest.target,
                     name=f"splice{n}+{rest.name}")


def splice_informants(first: Informant, second: Informant, at: int) -> Informant:
    """first(t) for t < at, second(t) afterwards (same time index, no restart)."""
    return Informant(lambda t: first(t) if t < at else second(t), target=second.target,
                     name=f"{first.name}|{at}|{second.name}")


# --------------------------------------------------------------------------
# JSON lines


def dump_prefix(sigma: Prefix) -> str:
    return "".join(json.dumps({"t": t, "x": x, "label": b}) + "\n" for t, (x, b) in enumerate(sigma))


def load_prefix(text: str) -> Prefix:
    items = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if rec["t"] != len(items):
                raise ValueError(f"expected t={len(items)}, got {rec['t']}")
            items.append(InfoPair.make(rec["x"], rec["label"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return Prefix(items)
