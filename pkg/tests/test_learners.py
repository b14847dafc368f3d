import pytest
from hypothesis import given, strategies as st

from goldlab.core import Prefix, Schedule, canonical_informant, scheduled_informant
from goldlab.hypotheses import (
    BaseWithException,
    Cofinite,
    DoubledPair,
    Evens,
    EvensPlusOne,
    Finite,
    Split,
    Uniform,
    exact,
    ind_finite,
    pad,
)
from goldlab.learners import (
    LEARNER_IDS,
    Diverge,
    PartialLearner,
    build_learner,
    cofinite_learner,
    detour_learner,
    doubled_pair_learner,
    enumeration_learner,
    evens_pair_learner,
    evens_wmon_learner,
    hypothesis_from_json,
    min_coded_learner,
    min_union_exception_learner,
    pair_distinguisher_learner,
    parity_threshold_learner,
    run_trace,
    slow_learner,
    split_family_learner,
    vacillating_learner,
)
from goldlab.monitors import check_restriction


def P(*items):
    return Prefix(items)


def test_cofinite_learner_examples():
    M = cofinite_learner()
    assert M(P((60, 1), (2, 0))).descriptor == Cofinite({2})
    assert M(P()).descriptor == Cofinite()
    assert M(P((1, 0), (4, 0))).descriptor == Cofinite({1, 4})


@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 1)), max_size=15), st.randoms(use_true_random=False))
def test_cofinite_learner_depends_only_on_negative_data(raw, rng):
    labels = {}
    items = [(x, labels.setdefault(x, b)) for x, b in raw]
    shuffled = list(items) + items[:3]
    rng.shuffle(shuffled)
    M = cofinite_learner()
    assert M(Prefix(items)) == M(Prefix(shuffled))
    assert M(Prefix(items)).descriptor == Cofinite({x for x, b in items if not b})


def test_split_family_learner_examples():
    M = split_family_learner()
    assert M(P((0, 1), (2, 1))).descriptor == Split.all()
    assert M(P((0, 1), (3, 1))).descriptor == Split({0})
    assert M(P()).descriptor == Split.all()


def test_evens_wmon_learner_examples():
    M = evens_wmon_learner()
    assert M(P((0, 1), (1, 0))).descriptor == EvensPlusOne()
    assert M(P((0, 1), (1, 0), (2, 1))).descriptor == Evens()
    assert M(P()).descriptor == Evens()


def test_evens_pair_learner_switches_on_a_positive_one():
    M = evens_pair_learner()
    assert M(P((1, 1))).descriptor == EvensPlusOne()
    assert M(P((0, 1), (1, 0))).descriptor == EvensPlusOne()
    assert M(P((0, 1), (1, 0), (2, 1))).descriptor == Evens()


def test_doubled_pair_learner_examples():
    M = doubled_pair_learner(Evens())
    assert M(P((2, 0), (3, 1))).descriptor == DoubledPair(Evens(), 1)
    assert M(P()).descriptor == DoubledPair(Evens(), None)
    assert M(P((5, 1), (8, 1))).descriptor == DoubledPair(Evens(), None)
    # several witnesses: the least one
    assert M(P((6, 0), (7, 1), (2, 0), (3, 1))).descriptor == DoubledPair(Evens(), 1)


def test_pair_distinguisher_examples():
    M = pair_distinguisher_learner(Evens())
    assert M(P()).descriptor == Cofinite()
    assert M(P((1, 0))).descriptor == Evens()
    assert M(P((0, 1))).descriptor == Cofinite()


def test_min_coded_learner_examples():
    resolve = {0: Evens(), 1: Cofinite({2}), 2: Finite({4})}.__getitem__
    M = min_coded_learner(resolve)
    assert M(P()) == ind_finite(())
    s = P((0, 0), (1, 0), (2, 1))
    assert M(s).descriptor == DoubledPair(Cofinite({2}), None, side="even")
    s = s.extend([(6, 1), (7, 0)])
    assert M(s).descriptor == DoubledPair(Cofinite({2}), 3, side="even")


def test_min_coded_learner_uses_the_disjunction():
    resolve = {0: Evens(), 1: Cofinite({2})}.__getitem__
    M = min_coded_learner(resolve)
    # only 2*1+1 is positive; for k < 1 one of 0, 1 is negative
    assert M(P((1, 0), (3, 1))).descriptor.base == Cofinite({2})


def test_min_union_exception_examples():
    M = min_union_exception_learner({3: Uniform("evens_from", 3)}.__getitem__)
    assert M(P((0, 0), (1, 0))) == ind_finite(())


@pytest.mark.parametrize("m,x", [(0, 7), (3, 10), (3, 4), (2, 15)])
def test_min_union_exception_has_three_phases(m, x):
    L = Uniform("evens_from", m)
    target = BaseWithException(L, x)
    M = min_union_exception_learner({m: L}.__getitem__)
    tr = run_trace(M, canonical_informant(target), 40)
    for t, h in enumerate(tr.hyps):
        # canonical data below t: the minimum m is seen once t > m, x once t > x
        if t <= m:
            want = Finite()
        elif t <= x:
            want = L
        else:
            want = target
        assert h.extension_below(60) == frozenset(v for v in range(60) if want.member(v)), t


def test_enumeration_learner_examples():
    M = enumeration_learner([Evens(), Cofinite({1})])
    assert M(P((1, 0))).descriptor == Evens()
    assert M(P((2, 0), (1, 0))) == ind_finite(())
    assert M(P()).descriptor == Evens()


FAMILY = [Finite({0}), Evens(), EvensPlusOne(), Cofinite({1}), Cofinite()]


@pytest.mark.parametrize("target", FAMILY, ids=repr)
@pytest.mark.parametrize("seed", [None, 3, 11])
def test_enumeration_learner_is_consistent_and_conservative(target, seed):
    M = enumeration_learner(FAMILY)
    I = canonical_informant(target) if seed is None else scheduled_informant(target, Schedule.random(seed))
    tr = run_trace(M, I, 200)
    assert check_restriction("Cons", tr).passed
    assert check_restriction("Conv", tr).passed
    assert tr.hyps[-1].descriptor == target


def test_parity_threshold_learner_reads_only_the_length():
    M = parity_threshold_learner(2)
    assert M(P((9, 1), (3, 0), (4, 1))).descriptor == Uniform("parity_threshold", 1)
    assert M(P()).descriptor == Uniform("parity_threshold", 0)


def test_detour_guesses_the_positive_data_once():
    M = detour_learner(cofinite_learner(), 3)
    s = P((0, 1), (1, 0), (2, 1))
    assert M(s).descriptor == Finite({0, 2})
    assert M(s.initial(2)).descriptor == Cofinite({1})
    assert M(s.append((3, 1))).descriptor == Cofinite({1})


def test_vacillating_learner_cycles_after_the_warmup():
    E = exact(Evens())
    hs = [pad(E, 0), pad(E, 1)]
    M = vacillating_learner(hs, warmup=(3, exact(Cofinite())))
    codes = run_trace(M, canonical_informant(Evens()), 7).codes
    w = exact(Cofinite()).code
    assert codes == [w, w, w, hs[1].code, hs[0].code, hs[1].code, hs[0].code]


# traces


def test_run_trace_examples():
    tr = run_trace(evens_wmon_learner(), canonical_informant(Evens()), 5)
    assert [h.descriptor for h in tr.hyps] == [Evens(), Evens(), EvensPlusOne(), Evens(), Evens()]
    tr = run_trace(cofinite_learner(), canonical_informant(Cofinite({2})), 4)
    assert [h.descriptor for h in tr.hyps] == [Cofinite(), Cofinite(), Cofinite(), Cofinite({2})]
    tr = run_trace(cofinite_learner(), canonical_informant(Evens()), 0)
    assert len(tr) == 0 and tr.codes == [] and tr.target == Evens()


def test_trace_data_is_the_prefix_seen_before_each_hypothesis():
    tr = run_trace(cofinite_learner(), canonical_informant(Evens()), 6)
    assert tr.data(0) == Prefix()
    assert tr.data(3).items == ((0, 1), (1, 0), (2, 1))
    assert all(tr.hyps[t] == cofinite_learner()(tr.data(t)) for t in range(6))


def test_runs_are_deterministic():
    a = run_trace(split_family_learner(), scheduled_informant(Split({1, 4}), Schedule.random(2)), 80)
    b = run_trace(split_family_learner(), scheduled_informant(Split({1, 4}), Schedule.random(2)), 80)
    assert a.codes == b.codes


def test_partial_learner_traces_stop_at_divergence():
    slow = slow_learner(evens_pair_learner(), lambda s: 2 * len(s))
    tr = run_trace(slow, canonical_informant(Evens()), 10)
    # budget t + 1 covers cost 2t only for t <= 1; at t = 2 the budget is 3
    assert len(tr) == 2 and tr.diverged == Diverge(3)
    assert len(tr.prefix) == 2
    tr = run_trace(slow, canonical_informant(Evens()), 10, budget=lambda t: 2 * t)
    assert len(tr) == 10 and tr.diverged is None


def test_partial_learner_answers():
    M = PartialLearner("p", lambda s: exact(Evens()), lambda s: None if len(s) == 2 else 3)
    assert M.answer(P(), 5) == exact(Evens())
    assert M.answer(P(), 2) == Diverge(2)
    assert isinstance(M.answer(P((0, 1), (1, 0)), 100), Diverge)
    with pytest.raises(RuntimeError):
        M(P((0, 1), (1, 0)))


# config ids


SPECS = {
    "cofinite": {},
    "split_family": {},
    "evens_wmon": {},
    "evens_pair": {},
    "doubled_pair": {"base": {"kind": "evens"}},
    "pair_distinguisher": {"base": {"kind": "evens"}},
    "min_coded": {"resolve": {"0": {"kind": "evens"}}},
    "min_union_exception": {"resolve": {"0": {"kind": "evens"}}},
    "enumeration": {"family": [{"kind": "evens"}, {"kind": "cofinite", "X": []}]},
    "parity_threshold": {"divisor": 3},
    "detour": {"inner": {"id": "cofinite"}, "at": 4},
    "vacillating": {"hypotheses": [{"descriptor": {"kind": "evens"}, "pad": 0},
                                   {"descriptor": {"kind": "evens"}}]},
    "slow": {"inner": {"id": "evens_wmon"}, "cost": {"per_item": 2}},
    "fn_enumeration_g": {"programs": ["const0", "identity"]},
}


def test_every_learner_id_has_a_config_example():
    assert set(SPECS) == set(LEARNER_IDS)


@pytest.mark.parametrize("lid", sorted(SPECS))
def test_learners_build_from_config(lid):
    M = build_learner({"id": lid, "params": SPECS[lid]})
    tr = run_trace(M, canonical_informant(Evens()), 6, budget=lambda t: 10 ** 6)
    assert len(tr) == 6


def test_unknown_learner_id():
    with pytest.raises(ValueError):
        build_learner({"id": "oracle"})


def test_missing_resolve_entry_is_reported():
    M = build_learner({"id": "min_union_exception", "params": {"resolve": {"4": {"kind": "evens"}}}})
    with pytest.raises(KeyError):
        M(P((0, 1)))


def test_hypotheses_from_config():
    h = hypothesis_from_json({"descriptor": {"kind": "evens"}, "pad": 2})
    assert h == pad(exact(Evens()), 2)
    assert hypothesis_from_json({"descriptor": {"kind": "evens"}}) == exact(Evens())
