import pytest
from hypothesis import given, strategies as st

from goldlab.core import Prefix, Schedule, canonical_informant, scheduled_informant, sigma_canonicalize
from goldlab.hypotheses import Cofinite, Evens, EvensPlusOne, Finite, Split, exact, guard_with, pad
from goldlab.learners import (
    Learner,
    PartialLearner,
    cofinite_learner,
    enumeration_learner,
    evens_pair_learner,
    evens_wmon_learner,
    parity_threshold_learner,
    run_trace,
    slow_learner,
    split_family_learner,
    vacillating_learner,
)
from goldlab.monitors import RESTRICTIONS, check_lim, check_restriction
from goldlab.transforms import (
    ApproxChainState,
    CollapseLearner,
    DelayContractViolation,
    PreconditionError,
    SimulatingFunction,
    advance_approx,
    conv_sdec,
    conv_sdec_pipeline,
    delay_simulate,
    pipeline,
    set_driven_wrap,
    syn_dec_pad,
    totalize,
    totalize_length,
)

import oracles


def P(*items):
    return Prefix(items)


LANGS = [Evens(), EvensPlusOne(), Cofinite({2}), Split({1}), Finite({0, 3})]


def informants(lang):
    return st.one_of(st.just(canonical_informant(lang)),
                     st.integers(0, 40).map(lambda k: scheduled_informant(lang, Schedule.random(k))))


# set-driven


def test_set_driven_examples():
    M = split_family_learner()
    S = set_driven_wrap(M)
    # 3 alone is not an initial segment of the content, so nothing is read
    assert S(P((3, 1))) == M(P())
    assert S(P((1, 0), (0, 1), (3, 1))) == M(P((0, 1), (1, 0)))


@given(st.sampled_from(LANGS), st.integers(0, 30), st.randoms(use_true_random=False))
def test_set_driven_output_ignores_order_and_repetition(lang, n, rng):
    S = set_driven_wrap(evens_wmon_learner())
    items = list(canonical_informant(lang).prefix(n).items)
    shuffled = items + items[: n // 3]
    rng.shuffle(shuffled)
    assert S(Prefix(items)) == S(Prefix(shuffled))
    assert S(Prefix(shuffled)) == evens_wmon_learner()(sigma_canonicalize(Prefix(shuffled)))


# totalizer


def test_total_learners_pass_through():
    M = cofinite_learner()
    assert totalize(M) is M


def test_totalizer_reads_the_longest_affordable_segment():
    inner = evens_pair_learner()
    M = totalize(slow_learner(inner, lambda s: 2 * len(s)))
    s = canonical_informant(EvensPlusOne()).prefix(7)
    for n in range(8):
        assert M(s.initial(n)) == inner(s.initial(n // 2))


def test_totalizer_needs_an_answer_on_the_empty_prefix():
    M = PartialLearner("p", lambda s: exact(Evens()), lambda s: None if len(s) == 0 else 1)
    with pytest.raises(PreconditionError):
        totalize(M)


@given(st.integers(1, 4), st.integers(0, 3), st.sets(st.integers(1, 12)), st.integers(0, 14))
def test_totalizer_matches_a_direct_search(rate, fixed, diverges, n):
    inner = evens_pair_learner()
    M = slow_learner(inner, lambda s: None if len(s) in diverges else rate * len(s) + fixed * (len(s) > 0))
    s = canonical_informant(EvensPlusOne()).prefix(n)
    k = max(j for j in range(n + 1) if M.cost(s.initial(j)) is not None and M.cost(s.initial(j)) <= n)
    k = max(k, 0)
    assert totalize_length(M, s) == k
    assert totalize(M)(s) == inner(s.initial(k))


# padder


def test_padder_gives_fresh_codes_on_returns():
    p, q = exact(Evens()), exact(Cofinite())
    M = Learner("pqp", lambda s: [p, q, p][min(len(s), 2)])
    tr = run_trace(syn_dec_pad(M), canonical_informant(Evens()), 3)
    assert len(set(tr.codes)) == 3
    assert [h.extension_below(30) for h in tr.hyps] == [p.extension_below(30), q.extension_below(30),
                                                         p.extension_below(30)]
    assert tr.hyps == [pad(p, 0), pad(q, 1), pad(p, 2)]


@given(st.lists(st.integers(0, 2), min_size=1, max_size=25), st.integers(0, 5))
def test_padder_is_syntactically_decisive_and_agrees(pattern, start):
    pool = [exact(Evens()), exact(EvensPlusOne()), exact(Cofinite())]
    M = Learner("by-length", lambda s: pool[pattern[len(s) % len(pattern)]])
    I = canonical_informant(Evens())
    T = len(pattern) + start
    padded = run_trace(syn_dec_pad(M), I, T)
    plain = run_trace(M, I, T)
    assert oracles.restriction_witness("SynDec", padded) is None
    assert check_restriction("SynDec", padded).passed
    assert all(a.extension_below(40) == b.extension_below(40) for a, b in zip(padded.hyps, plain.hyps))


# approximation chain


def test_chain_starts_from_the_positive_data():
    M = cofinite_learner()
    s = P((0, 1), (4, 0), (3, 1))
    assert conv_sdec(M).chain(s).enum_up_to(0) == {0, 3}


def test_toy_chain_stabilizes_on_the_seen_element():
    M = enumeration_learner([Finite({0}), Finite({0, 1})])
    s = P((0, 1))
    chain = conv_sdec(M).chain(s)
    got = [chain.enum_up_to(t) for t in range(21)]
    assert got == oracles.approximation_chain(M, s, 20)
    assert got[-1] == {0}


def test_poisoned_chain_restarts_from_the_base_enumeration():
    M = Learner("const", lambda s: exact(Cofinite()))
    s = P((0, 1), (2, 0))
    st_ = ApproxChainState(s, 4, frozenset({0, 1, 2}), M(s))
    assert advance_approx(st_, M).A == frozenset(range(4))
    chain = conv_sdec(M).chain(s)
    assert [chain.enum_up_to(t) for t in range(12)] == oracles.approximation_chain(M, s, 11)
    assert chain.enum_up_to(4) == {0, 1, 2}
    assert chain.enum_up_to(9) == frozenset(range(8))


CHAIN_LEARNERS = {
    "cofinite": cofinite_learner,
    "split": split_family_learner,
    "evens_wmon": evens_wmon_learner,
    "evens_pair": evens_pair_learner,
    "enumeration": lambda: enumeration_learner([Finite({0}), Evens(), Cofinite({1}), Cofinite()]),
    # a guarded base is not a lifted descriptor, so this exercises the general path
    "guarded": lambda: Learner("guarded", lambda s: guard_with(exact(Cofinite(s.ng)), frozenset())),
}


@given(st.sampled_from(sorted(CHAIN_LEARNERS)), st.sampled_from(LANGS), st.integers(0, 200), st.integers(0, 6))
def test_chain_matches_the_three_case_rule(name, lang, seed, n):
    M = CHAIN_LEARNERS[name]()
    s = scheduled_informant(lang, Schedule.random(seed)).prefix(n)
    chain = conv_sdec(M).chain(s)
    T = 24
    assert [chain.enum_up_to(t) for t in range(T + 1)] == oracles.approximation_chain(M, s, T)


@given(st.sampled_from(sorted(CHAIN_LEARNERS)), st.sampled_from(LANGS), st.integers(0, 5))
def test_chain_is_monotone(name, lang, n):
    chain = conv_sdec(CHAIN_LEARNERS[name]()).chain(canonical_informant(lang).prefix(n))
    sets = [chain.enum_up_to(t) for t in range(30)]
    assert all(a <= b for a, b in zip(sets, sets[1:]))


# conservative, strongly decisive rewrite


def anchors_by_hand(M, sigma):
    """anchor(tau) for each initial segment, following the definition with the brute chain."""
    out = [sigma.initial(0)]
    for i in range(1, len(sigma) + 1):
        a, tau = out[-1], sigma.initial(i)
        if M(a) != M(tau):
            A = oracles.approximation_chain(M, a, i)[i]
            if not oracles.agrees(tau, A):
                a = tau
        out.append(a)
    return out


@given(st.sampled_from(sorted(CHAIN_LEARNERS)), st.sampled_from(LANGS), informants(Evens()) | st.none(),
       st.integers(0, 14))
def test_anchors_match_the_definition(name, lang, I, n):
    M = CHAIN_LEARNERS[name]()
    I = I or canonical_informant(lang)
    s = I.prefix(n)
    C = conv_sdec(M)
    want = anchors_by_hand(M, s)
    for i in range(n + 1):
        assert C.anchor(s.initial(i)) == want[i]
        assert C.recompute_anchor(s.initial(i)) == want[i]
        assert C(s.initial(i)) == C.p(want[i])


def test_rewrite_of_the_u_shaped_learner():
    C = conv_sdec_pipeline(evens_wmon_learner())
    tr = run_trace(C, canonical_informant(Evens()), 100)
    assert check_restriction("Conv", tr).passed
    assert check_restriction("SDec", tr).passed
    assert tr.hyps[-1].extension_below(100) == frozenset(range(0, 100, 2))


def test_rewrite_codes_are_one_to_one_in_the_anchor():
    C = conv_sdec(cofinite_learner())
    a, b = P(), P((1, 0))
    assert C.p(a) != C.p(b)
    assert C.p(a) is C.p(P())


def test_pipeline_rejects_unknown_steps():
    with pytest.raises(ValueError):
        pipeline(cofinite_learner(), ["totalize", "sharpen"])


# delay simulation


def test_identity_delay_reproduces_the_trace():
    I = scheduled_informant(Split({2}), Schedule.random(5))
    M = split_family_learner()
    delayed, _ = delay_simulate(M, I, SimulatingFunction.identity(), 30)
    assert delayed.codes == run_trace(M, I, 30).codes


def test_halved_time_on_a_duplicating_informant():
    I = scheduled_informant(Evens(), Schedule.duplicate(2))
    J = canonical_informant(Evens())
    delayed, I2 = delay_simulate(parity_threshold_learner(2), I, SimulatingFunction.floor_div(2), 20, J)
    assert I2 is J
    assert delayed.prefix == J.prefix(20)
    assert check_restriction("Cons", run_trace(parity_threshold_learner(2), I, 20)).passed
    v = check_restriction("Cons", delayed)
    assert v.outcome == "violation" and v.t <= 3


def test_running_ahead_of_the_data_breaks_the_contract():
    I = canonical_informant(Evens())
    with pytest.raises(DelayContractViolation) as e:
        delay_simulate(evens_wmon_learner(), I, SimulatingFunction.affine(2), 10)
    assert e.value.t == 1


@pytest.mark.parametrize("make", [
    lambda: SimulatingFunction.affine(0),
    lambda: SimulatingFunction.affine(1, 0),
    lambda: SimulatingFunction.floor_div(0),
    lambda: SimulatingFunction.shift(-1),
    lambda: SimulatingFunction("sqrt"),
])
def test_bad_simulating_functions(make):
    with pytest.raises(PreconditionError):
        make()


def test_simulating_function_values():
    assert [SimulatingFunction.shift(3)(t) for t in range(6)] == [0, 0, 0, 0, 1, 2]
    assert [SimulatingFunction.staircase(3)(t) for t in range(7)] == [0, 0, 0, 3, 3, 3, 6]
    assert [SimulatingFunction.affine(1, 2, 1)(t) for t in range(4)] == [1, 1, 2, 2]


SLOWDOWNS = st.one_of(st.integers(0, 4).map(SimulatingFunction.shift),
                      st.integers(1, 4).map(SimulatingFunction.staircase),
                      st.integers(1, 3).map(SimulatingFunction.floor_div))
DELAY_LEARNERS = [cofinite_learner, split_family_learner, evens_wmon_learner, evens_pair_learner]


@given(st.sampled_from(DELAY_LEARNERS), st.sampled_from(LANGS), st.integers(0, 50), SLOWDOWNS, st.integers(1, 25))
def test_delay_transfers_every_restriction_but_consistency(make, lang, seed, s, T):
    M = make()
    I = scheduled_informant(lang, Schedule.random(seed))
    original = run_trace(M, I, T)
    delayed, _ = delay_simulate(M, I, s, T)
    for name in RESTRICTIONS:
        if name != "Cons" and check_restriction(name, original).passed:
            assert check_restriction(name, delayed).passed, name


# vacillation collapse


def test_collapse_withdraws_guesses_with_commission_errors():
    E, C = exact(Evens()), exact(Cofinite())
    M = vacillating_learner([E], warmup=(2, C))
    s = canonical_informant(Evens()).prefix(4)
    # Cofinite enumerates 0..3 by step 4 and errs on the negatives 1 and 3
    for a, kept in [(0, [E]), (1, [E]), (2, [C, E]), (None, [C, E])]:
        L = CollapseLearner(M, a)
        assert set(L.guesses(s)) == {E.code, C.code}
        assert {h.code for h in L.kept(s)} == {h.code for h in kept}
        assert {h.code for h in L.withdrawn(s)} == {E.code, C.code} - {h.code for h in kept}


def test_collapse_of_a_two_pad_vacillation_converges():
    E = exact(Evens())
    M = vacillating_learner([pad(E, 0), pad(E, 1)])
    tr = run_trace(CollapseLearner(M, 0), canonical_informant(Evens()), 40)
    assert check_lim(tr, 0, 1, 200).passed
    assert tr.hyps[-1].extension_below(40) == frozenset(range(0, 40, 2))
