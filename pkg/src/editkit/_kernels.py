"""Levenshtein DP matrix kernels.

Two interchangeable implementations fill the unit-cost edit-distance matrix
over int-interned token ids: a numba @njit kernel and a pure-numpy fallback
whose rows are vectorized with the minimum.accumulate trick (the in-row
insertion dependency dp[i][j-1] + 1 unrolls to a running minimum of
candidate - column).

Selection: the EDITKIT_KERNEL environment variable ("numba", "numpy", or
"auto"/unset). "auto" prefers numba when importable. The flag is read on
every call so tests and benchmarks can flip it without reloading.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrapper(func):
            return func

        return wrapper


@njit(cache=True)
def _fill_dp_numba(a, b):  # pragma: no cover - numba-compiled
    n = a.shape[0]
    m = b.shape[0]
    dp = np.empty((n + 1, m + 1), dtype=np.int32)
    for j in range(m + 1):
        dp[0, j] = j
    for i in range(1, n + 1):
        dp[i, 0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = dp[i - 1, j - 1]
            if ai != b[j - 1]:
                best += 1
            up = dp[i - 1, j] + 1
            if up < best:
                best = up
            left = dp[i, j - 1] + 1
            if left < best:
                best = left
            dp[i, j] = best
    return dp


def _fill_dp_numpy(a, b):
    n = a.shape[0]
    m = b.shape[0]
    dp = np.empty((n + 1, m + 1), dtype=np.int32)
    cols = np.arange(m + 1, dtype=np.int32)
    dp[0] = cols
    for i in range(1, n + 1):
        prev = dp[i - 1]
        cand = np.empty(m + 1, dtype=np.int32)
        cand[0] = i
        # substitution/match and deletion candidates, no in-row dependency
        cand[1:] = np.minimum(prev[:-1] + (b != a[i - 1]), prev[1:] + 1)
        # dp[i][j] = min over k <= j of cand[k] + (j - k)
        dp[i] = np.minimum.accumulate(cand - cols) + cols
    return dp


def active_kernel() -> str:
    """Resolve which kernel the current environment selects."""
    flag = os.environ.get("EDITKIT_KERNEL", "auto").lower()
    if flag not in ("auto", "numba", "numpy"):
        raise ValueError(f"EDITKIT_KERNEL must be auto, numba or numpy, got {flag!r}")
    if flag == "numba" and not HAVE_NUMBA:
        raise RuntimeError("EDITKIT_KERNEL=numba but numba is not installed")
    if flag == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    return flag


def fill_dp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Fill the (len(a)+1) x (len(b)+1) unit-cost DP matrix for int32 id arrays."""
    if active_kernel() == "numba":
        return _fill_dp_numba(a, b)
    return _fill_dp_numpy(a, b)
