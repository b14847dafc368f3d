"""Rewrite the U-shaped learner into one that only changes its mind when refuted."""
from goldlab.core import canonical_informant
from goldlab.hypotheses import Evens
from goldlab.learners import evens_wmon_learner, run_trace
from goldlab.monitors import check_restriction
from goldlab.transforms import conv_sdec_pipeline

I = canonical_informant(Evens())
before = run_trace(evens_wmon_learner(), I, 100)
after = run_trace(conv_sdec_pipeline(evens_wmon_learner()), I, 100)

for label, trace in (("original", before), ("rewritten", after)):
    print(label)
    for name in ("Conv", "SDec"):
        print("  ", check_restriction(name, trace).describe())
print("final guess below 20:", sorted(after.hyps[-1].extension_below(20)))
