"""Learning functions through their graphs, and decoding graph guesses back into programs."""
from goldlab.bridge import (
    canonical_text,
    function_enumeration_learner,
    graph_target,
    lift_through_g,
    round_trip,
    sigma_hat,
    text_informant,
)
from goldlab.hypotheses import CONST0, IDENTITY, MOD3
from goldlab.learners import run_trace
from goldlab.monitors import check_lim

seq = tuple(canonical_text(MOD3)(k) for k in range(3))
print("function data", seq, "as labeled graph data:")
print(" ", sigma_hat(seq))

G = lift_through_g(function_enumeration_learner([CONST0, IDENTITY, MOD3]))
trace = run_trace(G, text_informant(canonical_text(MOD3)), 300)
trace.target = graph_target(MOD3)
print(check_lim(trace, 0, 1, 200).describe())

for x in range(6):
    steps, value = round_trip(MOD3, x, 6000)
    print(f"decoded program on {x}: {value} after {steps} steps")
