"""Coloring construction on a cycle: signalling the color class of the
realized vertex lets the agents spread over that class."""
import sys

from scg_signal import coloring_scheme, cycle_graph, evaluate_public_scheme, gen_hardness, solve_optimal_public

R = int(sys.argv[1]) if len(sys.argv) > 1 else 4
graph = cycle_graph(R)
inst = gen_hardness(graph, q=2)
coloring = [1 + v % 2 for v in range(R)]
scheme = coloring_scheme(inst, graph, coloring)

print(f"cycle on {R} vertices, {inst.num_agents} agents")
for s in scheme:
    print(f"  signal prob {s.probability}: agents sent to {s.assignment}")
print(f"coloring scheme value: {evaluate_public_scheme(inst, scheme)}")
_, value = solve_optimal_public(inst, backend="exact")
print(f"optimal public value:  {value}")
