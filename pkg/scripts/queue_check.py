"""Compare the discrete-event queue simulation with the closed forms."""

import numpy as np

from crnsw.queueing import QueueParams, des_oracle, pu_idle_prob, su_distribution

for rho_p in (0.2, 0.5, 0.8):
    q = QueueParams(lambda_p=0.2, mu_p=0.2 / rho_p, lambda_s=0.5, mu_s=1.0)
    r = des_oracle(q, horizon=10**6, seed=1)
    print(f"rho_p={rho_p}: des={r.pu_idle_fraction:.4f} closed={pu_idle_prob(q):.4f}")

for n, k in ((1, 1), (2, 4), (3, 6)):
    q = QueueParams(lambda_p=0.2, mu_p=0.5, lambda_s=0.5 * n, mu_s=1.0, n_servers=n, k_capacity=k)
    r = des_oracle(q, horizon=10**6, seed=2)
    gap = np.max(np.abs(np.asarray(r.su_occupancy) - su_distribution(q)))
    print(f"N={n} K={k}: max state gap {gap:.4f}")
