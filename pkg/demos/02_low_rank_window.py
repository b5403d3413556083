"""Keep a projection-cost preserving sample of a sliding window at several sizes.

A rank-2 signal plus noise streams past. The sample's top-2 subspace is
compared with the window's, and random rank-2 projections check the cost
sandwich directly.
"""

import numpy as np

from swnla import PcpState
from swnla.linalg import best_rank_k_residual, top_k_projector
from swnla.oracle import pcp_check, projection_cost

n, W, k, eps = 8, 64, 2, 0.25
g = np.random.default_rng(7)
signal = g.standard_normal((300, k)) @ g.standard_normal((k, n))
rows = signal + 0.1 * g.standard_normal((300, n))

A = rows[-W:]
print(f"optimal rank-{k} residual of the last {W} rows: {best_rank_k_residual(A, k):.3f}")
for c in (None, 8.0, 2.0, 0.5):
    st = PcpState(n, W, k, eps, seed=7, c=c)
    for r in rows:
        st.ingest(r)
    M = st.query()
    cost = projection_cost(A, top_k_projector(M, k))
    ok = pcp_check(A, M, k, eps, seed=1)["pass"]
    label = "default" if c is None else f"{c:g}"
    print(f"c={label:7s}: {st.size:2d} rows kept, residual in sample subspace {cost:.3f}, cost sandwich {ok}")
