"""Running a consistent learner on a slowed-down copy of its data breaks consistency."""
from goldlab.core import Schedule, canonical_informant, scheduled_informant
from goldlab.hypotheses import Evens
from goldlab.learners import parity_threshold_learner, run_trace
from goldlab.monitors import check_restriction
from goldlab.transforms import SimulatingFunction, delay_simulate

doubled = scheduled_informant(Evens(), Schedule.duplicate(2))
plain = canonical_informant(Evens())
M = parity_threshold_learner(2)

original = run_trace(M, doubled, 20)
delayed, _ = delay_simulate(M, doubled, SimulatingFunction.floor_div(2), 20, plain)
print("on the doubled stream:", check_restriction("Cons", original).describe())
print("at half speed on the plain stream:", check_restriction("Cons", delayed).describe())
