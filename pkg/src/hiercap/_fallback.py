"""Pure-numpy implementation of the capacity integrand kernel.

Used when the compiled extension (hiercap._core) is unavailable; same
contract, vectorized over the evaluation rows.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp


def integrand_nats(
    pts: np.ndarray,
    subset_of: np.ndarray,
    centers: np.ndarray,
    offsets: np.ndarray,
    out: np.ndarray,
) -> None:
    """Log-likelihood-ratio integrand of the per-stream capacity integral.

    For each row ``s`` the receive point is ``pts[centers[s]] + offsets[s]``
    in noise-normalized coordinates (constellation points divided by
    sqrt(N0)). Writes, in nats,

        out[s] = ln sum_x exp(-|y - pts[x]|^2)
               - ln sum_{x in cell} exp(-|y - pts[x]|^2)

    where the cell is the subset containing the conditioning point
    ``centers[s]``. Always >= 0.
    """
    y = pts[centers] + offsets  # (n, 2)
    z = -np.sum((y[:, None, :] - pts[None, :, :]) ** 2, axis=2)  # (n, M)
    mask = subset_of[None, :] == subset_of[centers][:, None]
    np.subtract(logsumexp(z, axis=1), logsumexp(z, axis=1, b=mask), out=out)
