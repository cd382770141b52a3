"""
Sampled trajectories against the analytic chain
===============================================

The Monte Carlo walker replays the same protocol one trajectory at a
time with a counter-based RNG, so any slice of samples is reproducible
in isolation.  For post-selective pumping the chain is exact and the
sampler must agree to statistical precision; for non-post-selective
pumping the walker carries the full per-sample state and exposes what
the score-labelled chain glosses over.
"""

import numpy as np

from regsim import bellcore as bc
from regsim import chain, mc, pumping

noise = bc.NoiseParams("depolarizing", 0.95, p_gate=1e-4)
SCHED = (2, 3)

# ---------------------------------------------------------------------
# 1. PS sampler vs chain, same numbers three ways
# ---------------------------------------------------------------------

ch = chain.chain_for_schedule(noise, 1e-4, SCHED)
stats = mc.simulate_ps(noise, 1e-4, SCHED, 40, n_samples=200_000, seed=7)
print("PS schedule (2,3), N_tot=40, 2e5 samples:")
print(f"  fail prob   chain {chain.fail_prob(ch, 40):.4e}   "
      f"mc {stats.fail_prob:.4e}   95% CI {stats.fail_ci}")
print(f"  avg infid   chain {chain.aif(ch, 40):.4e}   mc {stats.aif:.4e}")
run = pumping.run_schedule(noise, 1e-4, SCHED)
print(f"  delivered   exact {run.final_infidelity:.4e}   "
      f"mc {stats.mean_infidelity:.4e} (identical by construction)")

# absorption-attempt histogram: nothing can finish before 12 attempts
head = stats.attempts[:16]
print(f"  first deliveries per attempt 0..15: {list(head)}")

# ---------------------------------------------------------------------
# 2. Reproducibility is bitwise, not approximate
# ---------------------------------------------------------------------

again = mc.simulate_ps(noise, 1e-4, SCHED, 40, n_samples=200_000, seed=7)
print(f"\nsame seed, same result object: {stats == again}")

# ---------------------------------------------------------------------
# 3. NPS: the walker tracks what the chain approximates
# ---------------------------------------------------------------------

deph = bc.NoiseParams("dephasing", 0.85, p_gate=5e-3)
nps_chain = chain.chain_for_schedule(deph, 5e-3, (0, 5), scheme="nps")
nps_stats = mc.simulate_nps(deph, 5e-3, (0, 5), 30,
                            n_samples=200_000, seed=3)
print("\nNPS (0,5) with strong gate noise p_L=5e-3:")
print(f"  chain (score-labelled, optimistic) fail "
      f"{chain.fail_prob(nps_chain, 30):.4f}")
print(f"  history-resolved sampler fail      {nps_stats.fail_prob:.4f}")

# ---------------------------------------------------------------------
# 4. Probabilistic generation: attempts are negative-binomial
# ---------------------------------------------------------------------

gen = mc.simulate_generation(0.5, noise, 1e-4, (0, 0), 60,
                             n_samples=100_000, seed=11)
counts = np.asarray(gen.attempts[1:9], dtype=float)
print("\np_gen=0.5, trivial schedule: delivery attempt is geometric")
print(f"  measured P(attempt=k), k=1..8: {np.round(counts / 100_000, 4)}")
print(f"  geometric reference:           "
      f"{np.round([0.5 ** k for k in range(1, 9)], 4)}")
