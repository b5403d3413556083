"""Track the Gram matrix of the last W rows two ways and compare with the truth.

The deterministic histogram keeps a few suffix Grams; the sampler keeps rescaled
rows. Both are checked against the exact window at every step.
"""

from swnla import MetaState, SamplerConfig, SpectralHistogram
from swnla.linalg import spectral_sandwich, two_sided_sandwich
from swnla.streams import StreamSpec, generate

n, W, eps = 5, 64, 0.2
rows = generate(StreamSpec("duplicate-heavy", n, 400, W, seed=3))

hist = SpectralHistogram(n, eps, W)
det_ok = 0
for t, r in enumerate(rows, start=1):
    hist.ingest(r)
    A = rows[max(0, t - W) : t]
    det_ok += spectral_sandwich(hist.query()[0], A.T @ A, eps)
print(f"{len(rows)} arrivals, window {W}, eps {eps}")
print(f"histogram: sandwich held at {det_ok}/{len(rows)} steps, {hist.size} Grams stored at the end")

# The sampler's oversampling constant trades stored rows for accuracy.
for c in (None, 16.0, 4.0, 1.0):
    sampler = MetaState(SamplerConfig(n, W, eps, seed=3, c=c, batch=1))
    ok = sizes = 0
    for t, r in enumerate(rows, start=1):
        sampler.ingest(r)
        A = rows[max(0, t - W) : t]
        ok += two_sided_sandwich(sampler.query_gram(), A.T @ A, eps)
        sizes += sampler.size
    label = "default" if c is None else f"{c:g}"
    print(f"sampler c={label:7s}: sandwich at {ok:3d}/{len(rows)} steps, {sizes / len(rows):5.1f} rows stored on average")
