"""Approximate the window covariance with few rows, in word and bit storage."""

import numpy as np

from swnla import CovSketchState
from swnla.streams import StreamSpec, generate

n, W, eps = 6, 256, 0.3
rows = generate(StreamSpec("geometric-norm", n, 600, W, seed=2, params={"growth": 1.01}))
A = rows[-W:]
exact = A.T @ A
for mode, c in (("words", None), ("words", 8.0), ("bits", 8.0)):
    st = CovSketchState(n, W, eps, seed=2, mode=mode, c=c)
    for r in rows:
        st.ingest(r)
    B = st.query()
    rel = np.linalg.norm(exact - B.T @ B) / np.trace(exact)
    label = "default c" if c is None else f"c={c:g}"
    print(f"{mode:5s} {label:9s}: {len(B):3d} rows, {len(st.buckets)} buckets, error/||A||_F^2 = {rel:.3f}")
