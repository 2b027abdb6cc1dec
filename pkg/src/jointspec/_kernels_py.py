"""Pure-Python implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``JOINTSPEC_PURE_PYTHON`` is set.
"""
import numpy as np


def _popcount(x):
    return bin(x).count("1")


def blade_sign(a, b):
    """Sign of ``e_a e_b`` for bitmask blades with ``e_i**2 = -1``."""
    swaps = 0
    s = a >> 1
    while s:
        swaps += _popcount(s & b)
        s >>= 1
    swaps += _popcount(a & b)
    return -1 if swaps & 1 else 1


def materialize(masks, blocks, m, n):
    """Dense matrix of ``sum_S blocks[i] (x) e_{masks[i]}`` acting by left multiplication.

    Row/column index of basis vector ``x_r (x) e_T`` is ``T * n + r``.
    """
    dim = 1 << m
    out = np.zeros((dim * n, dim * n), dtype=np.complex128)
    for idx in range(len(masks)):
        S = int(masks[idx])
        block = blocks[idx]
        for T in range(dim):
            R = S ^ T
            sign = blade_sign(S, T)
            r0 = R * n
            c0 = T * n
            for i in range(n):
                row = out[r0 + i]
                for j in range(n):
                    row[c0 + j] += sign * block[i, j]
    return out


def lap_solve(cost):
    """Minimum-cost perfect assignment by shortest augmenting paths.

    Returns ``perm`` with ``perm[row] = column``.
    """
    C = np.asarray(cost, dtype=np.float64)
    n = C.shape[0]
    inf = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[col] = row matched to col (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            crow = C[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = crow[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    perm = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    return perm


def perfect_matching(weights, cutoff):
    """Perfect matching on the entries of ``weights`` strictly above ``cutoff``.

    Augmenting-path search; heavier entries are tried first. Returns
    ``perm`` (``perm[row] = column``) or ``None`` if no matching exists.
    """
    W = np.asarray(weights, dtype=np.float64)
    n = W.shape[0]
    order = [[j for j in np.argsort(-W[i], kind="stable") if W[i, j] > cutoff] for i in range(n)]
    match_col = [-1] * n

    def augment(i, seen):
        for j in order[i]:
            if not seen[j]:
                seen[j] = True
                if match_col[j] < 0 or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    perm = np.empty(n, dtype=np.int64)
    for j in range(n):
        perm[match_col[j]] = j
    return perm
