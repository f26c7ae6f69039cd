"""Pure numpy versions of the compiled pair-sum kernels in ``_core``."""

import numpy as np

# rows per chunk in the broadcast evaluator; bounds the (chunk, N, N) temporary
_CHUNK_ELEMENTS = 1 << 22


def pair_power_sums(x: np.ndarray, r: float) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    reps, n = x.shape
    out = np.empty(reps)
    iu, ju = np.triu_indices(n, k=1)
    step = max(1, _CHUNK_ELEMENTS // max(1, iu.size))
    for start in range(0, reps, step):
        blk = x[start : start + step]
        d = np.abs(blk[:, iu] - blk[:, ju])
        if r == 2.0:
            d *= d
        elif r != 1.0:
            d **= r
        out[start : start + step] = d.sum(axis=1)
    return out


def sq_diff_sums(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.shape[1]
    centered = x - x.mean(axis=1, keepdims=True)
    return n * np.einsum("ij,ij->i", centered, centered)


def abs_diff_sums_sorted(xs: np.ndarray) -> np.ndarray:
    # gap form: sum_k k (N - k) (x_(k+1) - x_(k)); all terms nonnegative
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[1]
    k = np.arange(1, n, dtype=float)
    return np.diff(xs, axis=1) @ (k * (n - k))
