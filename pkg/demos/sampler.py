"""Draw profiles from an optimal private scheme and compare empirical
marginals with the reduced form the solver returned."""
import numpy as np

from scg_signal import PrivateSampler, gen_random, solve_optimal_private

inst = gen_random(4, 3, 2, seed=509)
x, value = solve_optimal_private(inst)
sampler = PrivateSampler(inst, x)
rng = np.random.default_rng(0)
draws = 20_000

print(f"{inst.name}: private value {value:.6f}")
for t in range(inst.num_states):
    profiles = sampler.sample_many(t, rng, draws)
    print(f"state {t}: {len(sampler.branches(t))} configurations")
    for n in sampler.x.configurations(t):
        hit = np.all(np.stack([np.bincount(a, minlength=inst.num_resources) for a in profiles]) == n, axis=1)
        for i in range(inst.num_agents):
            target = [float(sampler.x[t, n, i, r]) for r in range(inst.num_resources)]
            seen = [np.count_nonzero(hit & (profiles[:, i] == r)) / draws for r in range(inst.num_resources)]
            print(f"  n={n} agent {i}: target {np.round(target, 3)}  empirical {np.round(seen, 3)}")
