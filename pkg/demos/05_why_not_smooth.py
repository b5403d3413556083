"""Why a smooth histogram cannot track the rank-k residual.

Dropping the two oldest rows loses little of the residual, yet one later row
separates the two suffixes by more than a factor of 2. A histogram that merged
them would be stuck with the wrong answer.
"""

import math

from swnla.linalg import best_rank_k_residual
from swnla.streams import nonsmooth_lra_blocks

for alpha in (0.5, 0.25, 0.1):
    head, tail, extra = nonsmooth_lra_blocks(alpha)

    def res(*blocks):
        import numpy as np

        return math.sqrt(best_rank_k_residual(np.vstack(blocks), 2))

    before = res(tail) / res(head, tail)
    after = res(head, tail, extra) / res(tail, extra)
    print(f"alpha={alpha}: suffix/full before = {before:.3f} (> {1 - alpha}), after = {after:.2f} (>= 2)")
