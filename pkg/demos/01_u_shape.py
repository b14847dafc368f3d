"""A learner of the even numbers that briefly adds 1 to its guess and then takes it back."""
from goldlab.core import canonical_informant
from goldlab.hypotheses import Evens
from goldlab.learners import evens_wmon_learner, run_trace
from goldlab.monitors import check_lim, check_restriction

trace = run_trace(evens_wmon_learner(), canonical_informant(Evens()), 50)
for t in range(5):
    print(t, trace.data(t), "->", trace.hyps[t].descriptor)

for name in ("NU", "WMon", "Conv"):
    print(check_restriction(name, trace).describe())
print(check_lim(trace, 0, 1, 200).describe())
