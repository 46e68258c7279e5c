"""Pure numpy version of the grid matching loop."""
import numpy as np


def match_products(L, R, target: float, tau: float, max_hits: int):
    L = np.ascontiguousarray(L, dtype=np.float64)
    R = np.ascontiguousarray(R, dtype=np.float64)
    if L.shape[1] != R.shape[1]:
        raise ValueError("left and right tables disagree on the number of target states")
    hits_a, hits_b, hits_r = [], [], []
    total = 0
    base = np.arange(R.shape[0])
    for a in range(L.shape[0]):
        idx = base
        worst = np.zeros(len(idx))
        for i in range(L.shape[1]):
            r = np.abs(L[a, i] * R[idx, i] - target)
            keep = r <= tau
            idx = idx[keep]
            worst = np.maximum(worst[keep], r[keep])
            if not len(idx):
                break
        if len(idx):
            hits_a.append(np.full(len(idx), a, dtype=np.int64))
            hits_b.append(idx.astype(np.int64))
            hits_r.append(worst)
            total += len(idx)
            if total > max_hits:
                break
    if not hits_a:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0), False
    ia, ib, ir = np.concatenate(hits_a), np.concatenate(hits_b), np.concatenate(hits_r)
    overflow = len(ia) > max_hits
    return ia[:max_hits], ib[:max_hits], ir[:max_hits], overflow
