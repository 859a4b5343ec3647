"""Pure-Python kernels, used when the compiled extension is unavailable."""

import numpy as np


def respond(signals, mask, out):
    """Sum the rows of ``signals`` that match ``mask`` into ``out``.

    A row matches when it equals ``mask`` at every nonzero mask position.
    Returns ``(count, first)`` where ``first`` is the index of the first
    matching row, or -1.
    """
    if mask.shape[0] != signals.shape[1] or out.shape[0] != signals.shape[1]:
        raise ValueError("signals, mask and out must share one width")
    constrained = np.flatnonzero(mask)
    if constrained.size:
        hit = np.all(signals[:, constrained] == mask[constrained], axis=1)
        rows = np.flatnonzero(hit)
        out[:] = signals[rows].sum(axis=0, dtype=np.int64)
    else:
        rows = np.arange(signals.shape[0])
        out[:] = signals.sum(axis=0, dtype=np.int64)
    return int(rows.size), int(rows[0]) if rows.size else -1


def split_scan(answer):
    """Return ``(m1, p1, m2, p2)`` for an answer vector.

    ``m1`` is the largest absolute value and ``p1`` its first position;
    ``m2`` is the largest absolute value strictly below ``m1`` and ``p2``
    its first position. ``m2`` and ``p2`` are -1 when no such value exists.
    """
    mags = [abs(int(v)) for v in answer]
    m1 = max(mags, default=-1)
    p1 = mags.index(m1) if mags else -1
    m2, p2 = -1, -1
    for j, v in enumerate(mags):
        if m2 < v < m1:
            m2, p2 = v, j
    return m1, p1, m2, p2
