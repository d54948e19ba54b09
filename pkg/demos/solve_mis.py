"""Generate a random MIS instance, anneal it, and check the answer exactly.

Walks the full round trip: graph -> penalty QUBO -> parallel annealer ->
decoded vertex set -> brute-force certificate. Instances this small are
solved exactly in milliseconds, which is what makes the certificate cheap.
"""

from nebm import (
    brute_force_mis,
    decode_mis,
    generate_mis_graph,
    mis_to_qubo,
    solve_qubo,
)

N = 24
DENSITY = 0.2
SEED = 42

graph = generate_mis_graph(N, DENSITY, SEED)
print(f"instance: n={graph.n}, m={graph.m} edges, density target {DENSITY}")

qubo = mis_to_qubo(graph)
print(f"encoded as a QUBO with {graph.n + graph.m} nonzero coefficients")

result = solve_qubo(qubo, seed=0, max_steps=20_000)
size, feasible, violations = decode_mis(graph, result.best_assignment)
vertices = sorted(int(v) for v in result.best_assignment.nonzero()[0])
print(f"annealer: best cost {result.best_cost} after {result.steps} steps "
      f"({result.elapsed_s * 1000:.1f} ms)")
print(f"decoded set: {vertices} (size {size}, independent={feasible}, "
      f"violated edges={violations})")

opt_size, _ = brute_force_mis(graph)
print(f"exact oracle: maximum independent set has size {opt_size}")
if feasible and size == opt_size:
    print("the annealer found an optimum")
else:
    print(f"the annealer is {opt_size - size} vertex(es) short of optimal")
