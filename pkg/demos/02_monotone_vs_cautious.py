"""Two data streams: one breaks caution but not monotonicity, the other the reverse."""
from goldlab.core import canonical_informant, splice_informants
from goldlab.hypotheses import Cofinite, Split
from goldlab.learners import cofinite_learner, run_trace, split_family_learner
from goldlab.monitors import check_restriction

# all of N for a while, then 5 turns out to be missing
I = splice_informants(canonical_informant(Cofinite()), canonical_informant(Cofinite({5})), 5)
trace = run_trace(cofinite_learner(), I, 30)
print("cofinite learner on N, then N minus {5}")
for name in ("Caut", "Mon"):
    print(" ", check_restriction(name, trace).describe())

trace = run_trace(split_family_learner(), canonical_informant(Split({0, 1, 2, 3, 7})), 30)
print("split-family learner on 2X + (2(N-X)+1), X = {0,1,2,3,7}")
for name in ("Caut", "Mon"):
    v = check_restriction(name, trace)
    print(" ", v.describe(), *([v.detail] if v.detail else []))
