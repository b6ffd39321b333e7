"""Pure numpy simulation kernels.

Fallback backend used when the compiled extension is unavailable (or when
``RANKSTOP_PURE=1``).  Results are bit-identical to the compiled kernels:
same decision walk, same tie rule (ties resolved by arrival index, earlier
equal value counts as smaller).
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def final_ranks_of(values: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Final rank of values[i, idx[i]] among row i, index tie-break."""
    rows = np.arange(values.shape[0])
    x = values[rows, idx]
    less = (values < x[:, None]).sum(axis=1)
    cols = np.arange(values.shape[1])
    eq_upto = ((values == x[:, None]) & (cols[None, :] <= idx[:, None])).sum(axis=1)
    return (less + eq_upto).astype(np.int64)


def threshold_sim(values: np.ndarray, phi: np.ndarray):
    """Accept the first value <= phi[k]; phi[-1] == 1 forces acceptance.

    Returns (accept_idx, final_ranks), both shape (rows,).
    """
    hit = values <= phi[None, :]
    idx = hit.argmax(axis=1).astype(np.int64)
    return idx, final_ranks_of(values, idx)


def cloud_accept_index(
    row: np.ndarray,
    phi: np.ndarray,
    d_pc: float,
    theta_pre: int,
    p_pc: float,
    theta_post: int,
    margin: float,
    counters: np.ndarray | None = None,
) -> int:
    """Decision walk for one instance under the cloud-override rule.

    An override is enabled only when its window has positive width; with
    all widths zero the walk reduces exactly to the threshold rule.  When
    ``counters`` (shape (2,)) is given, it accumulates the number of
    pre-cloud PASS overrides and post-cloud ACCEPT overrides taken.
    """
    n = row.shape[0]
    pre_on = d_pc > 0.0
    post_on = p_pc > 0.0 and margin > 0.0
    for k in range(n - 1):
        x = row[k]
        fk = phi[k]
        if x <= fk:
            if pre_on:
                prior = row[:k]
                n_pre = int(((prior >= x - d_pc) & (prior < x)).sum())
                if n_pre >= theta_pre:
                    if counters is not None:
                        counters[0] += 1
                    continue
            return k
        if post_on and x <= fk + margin:
            prior = row[:k]
            n_post = int(((prior > x) & (prior <= x + p_pc)).sum())
            if n_post >= theta_post:
                if counters is not None:
                    counters[1] += 1
                return k
    return n - 1


def cloud_sim(
    values: np.ndarray,
    phi: np.ndarray,
    d_pc: float,
    theta_pre: int,
    p_pc: float,
    theta_post: int,
    margin: float,
):
    """Cloud-rule walk over each row. Returns (accept_idx, final_ranks)."""
    rows = values.shape[0]
    idx = np.empty(rows, dtype=np.int64)
    if d_pc == 0.0 and (p_pc == 0.0 or margin == 0.0):
        return threshold_sim(values, phi)
    for i in range(rows):
        idx[i] = cloud_accept_index(
            values[i], phi, d_pc, theta_pre, p_pc, theta_post, margin
        )
    return idx, final_ranks_of(values, idx)
