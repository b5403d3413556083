"""ℓ1 subspace sketch of a window of small-integer rows."""

import numpy as np

from swnla import L1SlidingState
from swnla.oracle import l1_check
from swnla.streams import StreamSpec, generate

n, W, eps = 4, 32, 0.4
rows = generate(StreamSpec("integer-bounded", n, 80, W, seed=4, params={"c": 1}))
st = L1SlidingState(n, W, eps, seed=4)
for r in rows:
    st.ingest(r)

M = st.query()
xs = np.random.default_rng(0).integers(-3, 4, (200, n)).astype(float)
res = l1_check(rows[-W:], M, eps, xs)
print(f"window starts at t={st.anchor()}, sketch has {len(M)} rows")
print(f"|‖Mx‖₁ - ‖Ax‖₁| <= eps ‖Ax‖₁ for all 200 test vectors: {res['pass']}")
