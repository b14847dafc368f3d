"""Moving between function learning and informant learning via graph languages."""
from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence

from .core import InfoPair, Informant, Prefix, pair_decode, pair_encode
from .hypotheses import (
    FnProgram,
    Graph,
    Hypothesis,
    graph_decode_h,
    graph_encode_g,
)
from .learners import Learner

# A function sequence is a tuple of (x, f(x)) pairs.
FnSeq = tuple


class FnLearner:
    """A map from finite function sequences to programs, memoized."""

    def __init__(self, name: str, fn: Callable[[FnSeq], FnProgram]):
        self.name = name
        self.fn = fn
        self._memo: dict = {}

    def __call__(self, seq: FnSeq) -> FnProgram:
        seq = tuple(seq)
        p = self._memo.get(seq)
        if p is None:
            p = self._memo[seq] = self.fn(seq)
        return p


def function_enumeration_learner(programs: Sequence[FnProgram]) -> FnLearner:
    """First program (in order) agreeing with every observed pair; the last one otherwise."""
    programs = list(programs)

    def step(seq: FnSeq) -> FnProgram:
        for p in programs:
            if all(p(x) == y for x, y in seq):
                return p
        return programs[-1]

    return FnLearner("fn-enumeration", step)


def decode_positive(sigma: Prefix) -> FnSeq:
    """The function sequence carried by the positive data of sigma, in order of appearance."""
    out, seen = [], set()
    for n, b in sigma:
        if b and n not in seen:
            seen.add(n)
            out.append(pair_decode(n))
    return tuple(out)


def lift_through_g(M: FnLearner) -> Learner:
    """Informant learner: G(M(decode(pos(sigma))))."""
    return Learner(f"G({M.name})", lambda s: graph_encode_g(M(decode_positive(s))))


def hat_length(n: int) -> int:
    """Largest j with pi1(i) < n for every i < j."""
    return pair_encode(n, 0) if n > 0 else 0


def sigma_hat(seq: FnSeq) -> Prefix:
    """Informant prefix for the graph language built from a function sequence.

    Position i talks about <x_{pi1(i)}, pi2(i)>, labeled 1 exactly when the
    sequence's value at x_{pi1(i)} is pi2(i).
    """
    items = []
    for i in range(hat_length(len(seq))):
        k, y = pair_decode(i)
        x, fx = seq[k]
        items.append(InfoPair(pair_encode(x, y), 1 if fx == y else 0))
    return Prefix(items)


def text_informant(text: Callable[[int], tuple]) -> Informant:
    """I_T, the union of sigma_hat(T[j]) over j, for a function text T."""
    cache: list = []

    def gen(i: int) -> InfoPair:
        k, y = pair_decode(i)
        while len(cache) <= k:
            cache.append(text(len(cache)))
        x, fx = cache[k]
        return InfoPair(pair_encode(x, y), 1 if fx == y else 0)

    return Informant(gen, name="from-text")


def canonical_text(p: FnProgram) -> Callable[[int], tuple]:
    return lambda k: (k, p(k))


def lift_through_h(M: Learner) -> FnLearner:
    """Function learner: H(M(sigma_hat)); returns a budgeted decoded program."""
    return FnLearner(f"H({M.name})", lambda seq: graph_decode_h(M(sigma_hat(seq))))


def round_trip(p: FnProgram, x: int, max_budget: int) -> Optional[tuple]:
    """(steps, value) for H(G(p)) on x within max_budget, else None."""
    return graph_decode_h(graph_encode_g(p)).run(x, max_budget)


def graph_target(p: FnProgram) -> Graph:
    return Graph(p)
