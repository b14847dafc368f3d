"""Learners, traces, and the concrete learners used by the witness scenarios."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Sequence

from .core import Informant, Prefix, consistent
from .hypotheses import (
    BaseWithException,
    Cofinite,
    DoubledPair,
    EvensPlusOne,
    Evens,
    Finite,
    Hypothesis,
    LangDescriptor,
    Split,
    Uniform,
    exact,
    ind_finite,
)


class Diverge(NamedTuple):
    """A partial learner did not answer within the budget."""

    cost_so_far: int


class Learner:
    """A deterministic map from prefixes to hypotheses, memoized per prefix."""

    kind = "total"

    def __init__(self, name: str, fn: Callable[[Prefix], Hypothesis]):
        self.name = name
        self.fn = fn
        self._memo: dict = {}

    def __call__(self, sigma: Prefix) -> Hypothesis:
        h = self._memo.get(sigma)
        if h is None:
            h = self.fn(sigma)
            self._memo[sigma] = h
        return h

    def answer(self, sigma: Prefix, budget: Optional[int] = None):
        return self(sigma)

    def cost(self, sigma: Prefix) -> Optional[int]:
        return 1

    def clear(self) -> None:
        self._memo.clear()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class PartialLearner(Learner):
    """A step-costed learner.  ``cost(sigma)`` is the number of steps it needs
    on sigma, or None where it diverges."""

    kind = "partial"

    def __init__(self, name: str, fn: Callable[[Prefix], Hypothesis],
                 cost: Callable[[Prefix], Optional[int]]):
        super().__init__(name, fn)
        self._cost = cost

    def cost(self, sigma: Prefix) -> Optional[int]:
        return self._cost(sigma)

    def answer(self, sigma: Prefix, budget: Optional[int] = None):
        c = self._cost(sigma)
        if c is None:
            return Diverge(budget if budget is not None else 0)
        if budget is not None and c > budget:
            return Diverge(budget)
        return super().__call__(sigma)

    def __call__(self, sigma: Prefix) -> Hypothesis:
        if self._cost(sigma) is None:
            raise RuntimeError(f"{self.name} diverges on {sigma!r}")
        return super().__call__(sigma)


@dataclass
class Trace:
    prefix: Prefix
    hyps: list
    target: Optional[LangDescriptor] = None
    diverged: Optional[Diverge] = None
    name: str = ""

    def __len__(self) -> int:
        return len(self.hyps)

    @property
    def codes(self) -> list[int]:
        return [h.code for h in self.hyps]

    def data(self, t: int) -> Prefix:
        """I[t]: the data the learner had seen when it output h_t."""
        return self.prefix.initial(t)


def run_trace(M: Learner, I: Informant, T: int,
              budget: Optional[Callable[[int], int]] = None,
              target: Optional[LangDescriptor] = None) -> Trace:
    """h_t = M(I[t]) for t < T.  Partial learners are queried with budget(t)
    (default: t + 1) and the trace stops at the first divergence."""
    full = I.prefix(T)
    hyps = []
    diverged = None
    for t in range(T):
        sigma = full.initial(t)
        if M.kind == "partial":
            ans = M.answer(sigma, (budget or (lambda s: s + 1))(t))
            if isinstance(ans, Diverge):
                diverged = ans
                break
        else:
            ans = M(sigma)
        hyps.append(ans)
    if target is None:
        target = I.target
    return Trace(full.initial(len(hyps)) if diverged else full, hyps, target, diverged,
                 name=f"{M.name}@{I.name}")


# --------------------------------------------------------------------------
# concrete learners


def cofinite_learner() -> Learner:
    """Everything not explicitly excluded so far."""
    return Learner("cofinite", lambda s: exact(Cofinite(s.ng)))


def split_family_learner() -> Learner:
    def step(s: Prefix) -> Hypothesis:
        if all(x % 2 == 0 for x in s.pos):
            return exact(Split.all())
        return exact(Split({x // 2 for x in s.pos if x % 2 == 0}))

    return Learner("split-family", step)


def evens_wmon_learner() -> Learner:
    """Guesses the evens plus 1 while 1 is known absent but 2 not yet seen."""

    def step(s: Prefix) -> Hypothesis:
        if 1 in s.ng and 2 not in s.pos:
            return exact(EvensPlusOne())
        return exact(Evens())

    return Learner("evens-wmon", step)


def evens_pair_learner() -> Learner:
    """Learns {Evens, EvensPlusOne}; U-shaped on the evens like evens_wmon_learner."""
    inner = evens_wmon_learner()

    def step(s: Prefix) -> Hypothesis:
        if 1 in s.pos:
            return exact(EvensPlusOne())
        return inner(s)

    return Learner("evens-pair", step)


def doubled_pair_learner(base: LangDescriptor) -> Learner:
    def step(s: Prefix) -> Hypothesis:
        xs = [n // 2 for n in s.ng if n % 2 == 0 and n + 1 in s.pos]
        return exact(DoubledPair(base, min(xs) if xs else None))

    return Learner(f"doubled-pair[{base!r}]", step)


def pair_distinguisher_learner(base: LangDescriptor) -> Learner:
    """Learns {N, base}: N until the first negative datum."""
    return Learner(f"pair-distinguisher[{base!r}]",
                   lambda s: exact(Cofinite(())) if not s.ng else exact(base))


def _has_min(m: int, s: Prefix) -> bool:
    if 2 * m not in s.pos and 2 * m + 1 not in s.pos:
        return False
    return all(2 * k in s.ng or 2 * k + 1 in s.ng for k in range(m))


def min_coded_learner(resolve: Callable[[int], LangDescriptor]) -> Learner:
    """Locates the minimum m of the doubled language, then the least exception."""

    def step(s: Prefix) -> Hypothesis:
        top = max(s.pos, default=-1) // 2
        ms = [m for m in range(top + 1) if _has_min(m, s)]
        if not ms:
            return ind_finite(())
        base = resolve(ms[0])
        xs = [n // 2 for n in s.pos if n % 2 == 0 and n + 1 in s.ng]
        return exact(DoubledPair(base, min(xs) if xs else None, side="even"))

    return Learner("min-coded", step)


def min_union_exception_learner(resolve: Callable[[int], LangDescriptor]) -> Learner:
    """Resolve the minimum positive datum; add the least datum its language misses."""

    def step(s: Prefix) -> Hypothesis:
        if not s.pos:
            return ind_finite(())
        base = exact(resolve(min(s.pos)))
        seen = base.enumerator.enum_up_to(len(s))
        missing = s.pos - seen
        if not missing:
            return base
        return exact(BaseWithException(base.descriptor, min(missing)))

    return Learner("min-union-exception", step)


def enumeration_learner(family: Sequence[LangDescriptor]) -> Learner:
    family = list(family)

    def step(s: Prefix) -> Hypothesis:
        for d in family:
            if consistent(s, d):
                return exact(d)
        return ind_finite(())

    return Learner("enumeration", step)


def parity_threshold_learner(divisor: int = 2) -> Learner:
    """Evens up to floor(|sigma|/divisor) together with the odds above it."""
    return Learner(f"parity-threshold/{divisor}",
                   lambda s: exact(Uniform("parity_threshold", len(s) // divisor)))


def detour_learner(M: Learner, at: int) -> Learner:
    """M, except that at length ``at`` it guesses exactly the positive data seen.

    On any language M has already identified by then this is a U-shape.
    """

    def step(s: Prefix) -> Hypothesis:
        if len(s) == at:
            return ind_finite(s.pos)
        return M(s)

    return Learner(f"detour{at}({M.name})", step)


def vacillating_learner(hyps: Sequence[Hypothesis], warmup: Optional[tuple] = None) -> Learner:
    """Cycles through ``hyps`` by prefix length; ``warmup=(n, h)`` answers h below length n."""
    hyps = list(hyps)

    def step(s: Prefix) -> Hypothesis:
        if warmup is not None and len(s) < warmup[0]:
            return warmup[1]
        return hyps[len(s) % len(hyps)]

    return Learner(f"vacillating[{len(hyps)}]", step)


def slow_learner(M: Learner, cost: Callable[[Prefix], Optional[int]], name: str = "") -> PartialLearner:
    """Give M a synthetic step cost, turning it into a partial learner."""
    return PartialLearner(name or f"slow({M.name})", M, cost)


# --------------------------------------------------------------------------
# registry of learner ids used by scenario configs


def _resolve_table(params: Mapping) -> Callable[[int], LangDescriptor]:
    from .hypotheses import descriptor_from_json

    table = {int(k): descriptor_from_json(v) for k, v in params["resolve"].items()}

    def resolve(m: int) -> LangDescriptor:
        try:
            return table[m]
        except KeyError:
            raise KeyError(f"resolve has no language with minimum {m}") from None

    return resolve


def build_learner(spec: Mapping) -> Learner:
    """Construct a learner from {"id": ..., "params": {...}}."""
    from .hypotheses import descriptor_from_json

    lid = spec["id"]
    params = spec.get("params", {})
    if lid == "cofinite":
        return cofinite_learner()
    if lid == "split_family":
        return split_family_learner()
    if lid == "evens_wmon":
        return evens_wmon_learner()
    if lid == "evens_pair":
        return evens_pair_learner()
    if lid == "doubled_pair":
        return doubled_pair_learner(descriptor_from_json(params["base"]))
    if lid == "pair_distinguisher":
        return pair_distinguisher_learner(descriptor_from_json(params["base"]))
    if lid == "min_coded":
        return min_coded_learner(_resolve_table(params))
    if lid == "min_union_exception":
        return min_union_exception_learner(_resolve_table(params))
    if lid == "enumeration":
        return enumeration_learner([descriptor_from_json(d) for d in params["family"]])
    if lid == "parity_threshold":
        return parity_threshold_learner(int(params.get("divisor", 2)))
    if lid == "detour":
        return detour_learner(build_learner(params["inner"]), int(params["at"]))
    if lid == "vacillating":
        warmup = params.get("warmup")
        if warmup is not None:
            warmup = (int(warmup["length"]), hypothesis_from_json(warmup["hypothesis"]))
        return vacillating_learner([hypothesis_from_json(h) for h in params["hypotheses"]], warmup)
    if lid == "slow":
        per_item = int(params.get("cost", {}).get("per_item", 1))
        offset = int(params.get("cost", {}).get("offset", 0))
        return slow_learner(build_learner(params["inner"]), lambda s: offset + per_item * len(s))
    if lid == "fn_enumeration_g":
        from .bridge import function_enumeration_learner, lift_through_g
        from .hypotheses import PROGRAMS

        return lift_through_g(function_enumeration_learner([PROGRAMS[n] for n in params["programs"]]))
    raise ValueError(f"unknown learner id {lid!r}")


def hypothesis_from_json(d: Mapping) -> Hypothesis:
    """{"descriptor": {...}, "pad": salt}; the pad is optional."""
    from .hypotheses import descriptor_from_json, pad

    h = exact(descriptor_from_json(d["descriptor"]))
    return h if d.get("pad") is None else pad(h, int(d["pad"]))


LEARNER_IDS = ("cofinite", "split_family", "evens_wmon", "evens_pair", "doubled_pair",
               "pair_distinguisher", "min_coded", "min_union_exception", "enumeration",
               "parity_threshold", "detour", "vacillating", "slow", "fn_enumeration_g")
