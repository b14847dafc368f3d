"""A learner that alternates between two codes for the same language, and its collapse."""
from goldlab.core import canonical_informant
from goldlab.hypotheses import Evens, exact, pad
from goldlab.learners import run_trace, vacillating_learner
from goldlab.monitors import check_lim
from goldlab.transforms import vacillation_collapse

E = exact(Evens())
M = vacillating_learner([pad(E, 0), pad(E, 1)])
I = canonical_informant(Evens())

raw = run_trace(M, I, 60)
collapsed = run_trace(vacillation_collapse(M, 0), I, 60)
print("last codes, raw:      ", raw.codes[-6:])
print("last codes, collapsed:", collapsed.codes[-6:])
for b in (1, 2):
    print("raw", check_lim(raw, 0, b, 200).describe())
print("collapsed", check_lim(collapsed, 0, 1, 200).describe())
