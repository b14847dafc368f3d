"""Learner-to-learner constructions.

Pipelines compose left to right, e.g. ``pipeline(M, ["totalize", "synDecPad",
"convSDec", "setDriven"])``.  All step budgets derive from |sigma| alone.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import InfoPair, Informant, Prefix, sigma_canonicalize
from .hypotheses import (
    Enumerator,
    Hypothesis,
    LiftedExact,
    current_registry,
    guard_xi,
    pad,
    union_vote,
)
from .learners import Learner, PartialLearner, Trace

_TOKENS = itertools.count()


class PreconditionError(ValueError):
    pass


class DelayContractViolation(ValueError):
    def __init__(self, t: int, detail: str = ""):
        super().__init__(f"delay contract violated at t={t}" + (f": {detail}" if detail else ""))
        self.t = t


# --------------------------------------------------------------------------
# set-driven wrapper, totalizer, padder


def set_driven_wrap(M: Learner) -> Learner:
    """M'(sigma) = M(Sigma(sigma)): depends only on the content of sigma."""
    return Learner(f"setDriven({M.name})", lambda s: M(sigma_canonicalize(s)))


def totalize(M: Learner) -> Learner:
    """Answer with M on the longest initial segment it finishes within |sigma| steps."""
    if M.kind != "partial":
        return M
    if M.cost(Prefix(())) is None:
        raise PreconditionError(f"{M.name} must halt on the empty prefix")

    def step(s: Prefix) -> Hypothesis:
        n = len(s)
        for k in range(n, -1, -1):
            c = M.cost(s.initial(k))
            if c is not None and c <= n:
                return M(s.initial(k))
        return M(s.initial(0))

    return Learner(f"totalize({M.name})", step)


def totalize_length(M: Learner, s: Prefix) -> int:
    """The initial-segment length the totalizer uses on s."""
    n = len(s)
    for k in range(n, -1, -1):
        c = M.cost(s.initial(k))
        if c is not None and c <= n:
            return k
    return 0


class _PadState(Learner):
    """pad(M(sigma), |sigma|) on every mind change of M, otherwise repeat."""

    def __init__(self, M: Learner):
        super().__init__(f"synDecPad({M.name})", None)
        self.M = M

    def __call__(self, sigma: Prefix) -> Hypothesis:
        h = self._memo.get(sigma)
        if h is not None:
            return h
        k = len(sigma)
        while k > 0 and sigma.initial(k) not in self._memo:
            k -= 1
        if k == 0 and sigma.initial(0) not in self._memo:
            self._memo[sigma.initial(0)] = pad(self.M(sigma.initial(0)), 0)
        prev = self._memo[sigma.initial(k)]
        for i in range(k + 1, len(sigma) + 1):
            tau = sigma.initial(i)
            cur = self.M(tau)
            if cur != self.M(tau.minus):
                prev = pad(cur, i)
            self._memo[tau] = prev
        return prev


def syn_dec_pad(M: Learner) -> Learner:
    return _PadState(M)


# --------------------------------------------------------------------------
# conservative + strongly decisive rewrite


@dataclass
class ApproxChainState:
    sigma: Prefix
    t: int
    A: frozenset
    base: Hypothesis


def _canonical_window(W: frozenset, n: int) -> Prefix:
    return Prefix._trusted(tuple(InfoPair(v, 1 if v in W else 0) for v in range(n)))


def advance_approx(st: ApproxChainState, M: Learner, _cache: Optional[dict] = None) -> ApproxChainState:
    """One step of the approximation chain: A^t -> A^{t+1}.

    (1) poisoned (ng(sigma) meets A): take W^t of M(sigma);
    (2) else the largest initial subset X of W^t strictly above A on which M
        still agrees with M(sigma) at the matching canonical prefix;
    (3) else keep A.
    """
    sigma, t, A, base = st.sigma, st.t, st.A, st.base
    enum = base.enumerator
    W = enum.enum_up_to(t)
    if sigma.ng & A:
        return ApproxChainState(sigma, t + 1, frozenset(W), base)
    n = len(sigma)
    if t < n or not A <= W:
        return ApproxChainState(sigma, t + 1, A, base)
    ws = enum.sorted_up_to(t) if isinstance(enum, LiftedExact) else sorted(W)
    lo = len(A) + 1
    if A:
        lo = max(lo, bisect.bisect_right(ws, max(A)))
    if lo > len(ws):
        return ApproxChainState(sigma, t + 1, A, base)
    lifted = isinstance(enum, LiftedExact)
    # r_j = max(|sigma|, latest first-enumeration step among the first j elements);
    # a lifted descriptor enumerates x at step x + 1
    if lifted:
        steps = None
    else:
        steps = []
        hi = n
        for x in ws:
            s = None if _cache is None else _cache.get(("fs", x))
            if s is None:
                s = enum.first_step(x, t)
                if _cache is not None:
                    _cache[("fs", x)] = s
            hi = max(hi, s)
            steps.append(hi)
    target = M(sigma)
    for j in range(len(ws), lo - 1, -1):
        r = max(n, ws[j - 1] + 1) if lifted else steps[j - 1]
        key = ("ok", r)
        # for lifted descriptors the canonical window below t is stable in t
        stable = lifted and r + 1 <= t
        ok = _cache.get(key) if (_cache is not None and stable) else None
        if ok is None:
            if lifted:
                window = _lifted_window(enum, r + 1, t)
            else:
                window = _canonical_window(W, r + 1)
            ok = M(window) == target
            if _cache is not None and stable:
                _cache[key] = ok
        if ok:
            return ApproxChainState(sigma, t + 1, frozenset(ws[:j]), base)
    return ApproxChainState(sigma, t + 1, A, base)


def _lifted_window(enum: LiftedExact, n: int, t: int) -> Prefix:
    if n <= t:
        return enum.window(n)
    # values at or beyond t are not enumerated yet at step t
    cache = enum.__dict__.setdefault("_unstable", {})
    w = cache.get((n, t))
    if w is None:
        if not any(enum.desc.member(v) for v in range(t, n)):
            w = cache[(n, t)] = enum.window(n)
            return w
        items = enum.window(t).items + tuple(InfoPair(v, 0) for v in range(t, n))
        w = cache[(n, t)] = Prefix._trusted(items)
        if n == t + 1:
            w._inits = enum.window(t)._inits
    return w


class ConvChain(Enumerator):
    """enum_up_to(t) = A^t for one sigma; advanced lazily and kept as change points."""

    provenance = "conv-chain"

    def __init__(self, sigma: Prefix, M: Learner):
        self.sigma = sigma
        self.M = M
        self.base = M(sigma)
        self._times = [0]
        # each entry is a frozenset, or k meaning the first k members of a lifted base
        self._sets: list = [sigma.pos]
        self._last = (-1, frozenset())
        self._fast = isinstance(self.base.enumerator, LiftedExact)
        if self._fast:
            self._t = 0
            self._init_fast()
        else:
            self._state = ApproxChainState(sigma, 0, sigma.pos, self.base)
            self._cache: dict = {}

    def _init_fast(self) -> None:
        enum = self.base.enumerator
        member = enum.desc.member
        pos = self.sigma.pos
        self._checked = 0   # initial subsets X_1..X_checked have a final verdict
        self._best = 0      # largest of those on which M agrees with M(sigma)
        self._verdicts: dict = {}
        self._pos_fit = all(member(x) for x in pos)
        self._pos_max = max(pos, default=-1)
        # A = first k members is poisoned once it reaches a member labeled 0 in sigma
        bad = [x for x in self.sigma.ng if member(x)]
        if bad:
            enum._scan(min(bad) + 1)
            self._poison_at = bisect.bisect_left(enum._members, min(bad))
        else:
            self._poison_at = None

    def _advance_to(self, t: int) -> None:
        if self._fast:
            while self._t < t:
                cur = self._sets[-1]
                nxt = self._fast_step(self._t, cur)
                self._t += 1
                if nxt is not cur:
                    self._times.append(self._t)
                    self._sets.append(nxt)
            return
        while self._state.t < t:
            st = self._state
            nxt = advance_approx(st, self.M, self._cache)
            if nxt.A != st.A:
                self._times.append(nxt.t)
                self._sets.append(nxt.A)
            self._state = nxt

    def _fast_step(self, t: int, A):
        """advance_approx for lifted bases, checking each initial subset once.

        The enumeration below t only grows at the end, and the canonical
        window of length r + 1 <= t never changes afterwards, so verdicts for
        such windows are final.
        """
        enum = self.base.enumerator
        enum._scan(t)
        members = enum._members
        count = bisect.bisect_left(members, t)   # |W^t|
        is_prefix = isinstance(A, int)
        if is_prefix and self._poison_at is not None and A > self._poison_at:
            return count
        n = len(self.sigma)
        if t < n:
            return A
        if is_prefix:
            lo = A + 1
        else:
            if A and (self._pos_max >= t or not self._pos_fit):
                return A
            lo = len(A) + 1
            if A:
                lo = max(lo, bisect.bisect_right(members, self._pos_max, 0, count))
        if lo > count:
            return A
        target = self.base
        j = self._checked + 1
        while j <= count:
            r = max(n, members[j - 1] + 1)
            if r + 1 > t:
                break
            if self._verdict(r, t, enum) is target:
                self._best = j
            self._checked = j
            j += 1
        top = self._best
        for k in range(count, self._checked, -1):
            r = max(n, members[k - 1] + 1)
            if self._verdict(r, t, enum) is target:
                top = k
                break
        return top if top >= lo else A

    def _verdict(self, r: int, t: int, enum) -> Hypothesis:
        stable = r + 1 <= t
        h = self._verdicts.get(r) if stable else None
        if h is None:
            h = self.M(_lifted_window(enum, r + 1, t))
            if stable:
                self._verdicts[r] = h
        return h

    def _materialize(self, A) -> frozenset:
        if isinstance(A, int):
            if self._last[0] != A:
                # the enumeration has already been scanned past these members
                self._last = (A, frozenset(self.base.enumerator._members[:A]))
            return self._last[1]
        return A

    def enum_up_to(self, t: int) -> frozenset:
        self._advance_to(t)
        return self._materialize(self._sets[bisect.bisect_right(self._times, t) - 1])

    def default_budget(self, horizon: int) -> int:
        # an element x joins A once the window of length max(|sigma|, x + 1) + 1 is readable
        return max(horizon, len(self.sigma)) + 2

    def first_step(self, x: int, limit: int):
        self._advance_to(limit)
        for t, A in zip(self._times, self._sets):
            if t > limit:
                return None
            if isinstance(A, int):
                members = self.base.enumerator._members
                i = bisect.bisect_left(members, x)
                if i < A and members[i] == x:
                    return t
            elif x in A:
                return t
        return None

    def to_json(self):
        return {"provenance": self.provenance, "sigma_length": len(self.sigma)}


class ConvSDecLearner(Learner):
    """Follows the mind changes of M only once the current guess is refuted by data."""

    def __init__(self, M: Learner):
        super().__init__(f"convSDec({M.name})", None)
        self.M = M
        self._token = next(_TOKENS)
        self._anchor: dict = {}
        self._chains: dict = {}

    def p(self, sigma: Prefix) -> Hypothesis:
        def build(code):
            chain = self._chains.get(sigma)
            if chain is None:
                chain = self._chains[sigma] = ConvChain(sigma, self.M)
            return Hypothesis(code, chain, label=f"p[{len(sigma)}]")

        return current_registry().intern(("conv", self._token, sigma.items), build)

    def chain(self, sigma: Prefix) -> ConvChain:
        return self.p(sigma).binding

    def anchor(self, sigma: Prefix) -> Prefix:
        if sigma not in self._anchor:
            self(sigma)
        return self._anchor[sigma]

    def __call__(self, sigma: Prefix) -> Hypothesis:
        a = self._anchor.get(sigma)
        if a is not None:
            return self.p(a)
        k = len(sigma)
        while k > 0 and sigma.initial(k) not in self._anchor:
            k -= 1
        empty = sigma.initial(0)
        if empty not in self._anchor:
            self._anchor[empty] = empty
        a = self._anchor[sigma.initial(k)]
        for i in range(k + 1, len(sigma) + 1):
            tau = sigma.initial(i)
            if self.M(a) != self.M(tau):
                A = self.chain(a).enum_up_to(i)
                if not (tau.pos <= A and not (tau.ng & A)):
                    a = tau
            self._anchor[tau] = a
        return self.p(a)

    def recompute_anchor(self, sigma: Prefix) -> Prefix:
        """Shortest initial segment with the same output as sigma (no bookkeeping)."""
        out = self(sigma)
        for k in range(len(sigma) + 1):
            if self(sigma.initial(k)) == out:
                return sigma.initial(k)
        return sigma


def conv_sdec(M: Learner) -> ConvSDecLearner:
    return ConvSDecLearner(M)


# --------------------------------------------------------------------------
# delay simulation


@dataclass(frozen=True)
class SimulatingFunction:
    """Non-decreasing unbounded time reindexing given by a closed-form rule."""

    kind: str
    a: int = 1
    b: int = 1
    c: int = 0

    def __post_init__(self):
        if self.kind == "affine":
            if self.b < 1:
                raise PreconditionError("affine denominator must be positive")
            if self.a < 1:
                raise PreconditionError("affine slope must be positive (non-decreasing and unbounded)")
        elif self.kind in ("floor_div", "staircase"):
            if self.a < 1:
                raise PreconditionError(f"{self.kind} parameter must be positive")
        elif self.kind == "shift":
            if self.a < 0:
                raise PreconditionError("shift must be non-negative")
        else:
            raise PreconditionError(f"unknown simulating rule {self.kind!r}")

    @classmethod
    def identity(cls):
        return cls("affine", 1, 1, 0)

    @classmethod
    def affine(cls, num: int, den: int = 1, offset: int = 0):
        return cls("affine", num, den, offset)

    @classmethod
    def floor_div(cls, k: int):
        return cls("floor_div", k)

    @classmethod
    def shift(cls, d: int):
        return cls("shift", d)

    @classmethod
    def staircase(cls, width: int):
        return cls("staircase", width)

    def __call__(self, t: int) -> int:
        if self.kind == "affine":
            return max(0, (self.a * t) // self.b + self.c)
        if self.kind == "floor_div":
            return t // self.a
        if self.kind == "shift":
            return max(0, t - self.a)
        return (t // self.a) * self.a


def delay_simulate(M: Learner, I: Informant, s: SimulatingFunction, T: int,
                   I_prime: Optional[Informant] = None) -> tuple[Trace, Informant]:
    """The delayed trace h'_t = M(I[s(t)]) aligned with I' (default I)."""
    I_prime = I_prime or I
    need = max((s(t) for t in range(T)), default=0)
    full = I.prefix(need + 1)
    fast = I_prime.prefix(T)
    hyps = []
    for t in range(T):
        old = full.initial(s(t))
        new = fast.initial(t)
        if not old.pos <= new.pos:
            raise DelayContractViolation(t, f"positive data {sorted(old.pos - new.pos)} missing")
        if not old.ng <= new.ng:
            raise DelayContractViolation(t, f"negative data {sorted(old.ng - new.ng)} missing")
        hyps.append(M(old))
    return Trace(fast, hyps, I_prime.target, name=f"delayed({M.name})"), I_prime


# --------------------------------------------------------------------------
# vacillation collapse


class CollapseLearner(Learner):
    """Union vote over guarded earlier guesses that show at most ``a`` commission errors."""

    def __init__(self, M: Learner, a: Optional[int] = 0):
        super().__init__(f"collapse{a}({M.name})", None)
        self.M = M
        self.a = a
        self._seen: dict = {}

    def guesses(self, sigma: Prefix) -> dict:
        """Distinct M(sigma[i]), i <= |sigma|, keyed by code."""
        got = self._seen.get(sigma)
        if got is not None:
            return got
        k = len(sigma)
        while k > 0 and sigma.initial(k) not in self._seen:
            k -= 1
        if sigma.initial(k) not in self._seen:
            h = self.M(sigma.initial(0))
            self._seen[sigma.initial(0)] = {h.code: h}
        cur = self._seen[sigma.initial(k)]
        for i in range(k + 1, len(sigma) + 1):
            tau = sigma.initial(i)
            h = self.M(tau)
            if h.code not in cur:
                cur = dict(cur)
                cur[h.code] = h
            self._seen[tau] = cur
        return cur

    def kept(self, sigma: Prefix) -> list:
        n = len(sigma)
        out = []
        for code in sorted(self.guesses(sigma)):
            h = self.guesses(sigma)[code]
            errs = len(h.enumerator.enum_up_to(n) & sigma.ng)
            if self.a is None or errs <= self.a:
                out.append(h)
        return out

    def withdrawn(self, sigma: Prefix) -> list:
        keep = {h.code for h in self.kept(sigma)}
        return [h for c, h in sorted(self.guesses(sigma).items()) if c not in keep]

    def __call__(self, sigma: Prefix) -> Hypothesis:
        h = self._memo.get(sigma)
        if h is None:
            h = union_vote(guard_xi(sigma, p) for p in self.kept(sigma))
            self._memo[sigma] = h
        return h


def vacillation_collapse(M: Learner, a: Optional[int] = 0) -> CollapseLearner:
    return CollapseLearner(M, a)


# --------------------------------------------------------------------------
# pipelines


TRANSFORMS = {
    "setDriven": set_driven_wrap,
    "totalize": totalize,
    "synDecPad": syn_dec_pad,
    "convSDec": conv_sdec,
}


def pipeline(M: Learner, steps: Sequence[str]) -> Learner:
    for name in steps:
        try:
            M = TRANSFORMS[name](M)
        except KeyError:
            raise ValueError(f"unknown transform {name!r}") from None
    return M


def conv_sdec_pipeline(M: Learner) -> Learner:
    """totalize, pad for syntactic decisiveness, rewrite, then read data set-driven."""
    return pipeline(M, ["totalize", "synDecPad", "convSDec", "setDriven"])
