import itertools

import numpy as np
import pytest

from jointspec import kernels


def naive_blade_product(S, T):
    """Reduce the word S + T with e_i e_j = -e_j e_i and e_i e_i = -1."""
    word = list(S) + list(T)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
            elif word[i] == word[i + 1]:
                del word[i:i + 2]
                sign = -sign
                changed = True
                break
    return sign, tuple(word)


def mask_of(gens):
    return sum(1 << (g - 1) for g in gens)


def gens_of(mask):
    return [j + 1 for j in range(mask.bit_length()) if mask >> j & 1]


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_blade_sign_matches_word_reduction(backend, m):
    for a in range(1 << m):
        for b in range(1 << m):
            sign, word = naive_blade_product(gens_of(a), gens_of(b))
            assert backend.blade_sign(a, b) == sign
            assert mask_of(word) == a ^ b


def brute_force(cost):
    n = cost.shape[0]
    return min(sum(cost[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def test_lap_solve_matches_brute_force(backend, rng):
    for _ in range(150):
        n = int(rng.integers(1, 7))
        C = rng.uniform(0, 10, (n, n))
        perm = backend.lap_solve(C)
        assert sorted(perm.tolist()) == list(range(n))
        assert sum(C[i, perm[i]] for i in range(n)) == pytest.approx(brute_force(C), abs=1e-12)


def test_lap_solve_integer_ties(backend, rng):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        C = rng.integers(0, 3, (n, n)).astype(float)
        perm = backend.lap_solve(C)
        assert sum(C[i, perm[i]] for i in range(n)) == brute_force(C)


def test_backends_agree_on_lap(rng):
    found = kernels.backends()
    if len(found) < 2:
        pytest.skip("compiled kernels not built")
    for _ in range(50):
        n = int(rng.integers(1, 30))
        C = rng.uniform(0, 1, (n, n))
        assert np.array_equal(found["python"].lap_solve(C), found["cython"].lap_solve(C))


def test_perfect_matching(backend):
    W = np.array([[0.5, 0.5, 0], [0, 0.5, 0.5], [0.5, 0, 0.5]])
    perm = backend.perfect_matching(W, 1e-10)
    assert all(W[i, perm[i]] > 0 for i in range(3))
    assert sorted(perm.tolist()) == [0, 1, 2]
    assert backend.perfect_matching(np.array([[1.0, 1.0], [0.0, 0.0]]), 1e-10) is None


def test_materialize_backends_agree(rng):
    found = kernels.backends()
    if len(found) < 2:
        pytest.skip("compiled kernels not built")
    for _ in range(20):
        m, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        masks = rng.choice(1 << m, size=int(rng.integers(1, (1 << m) + 1)), replace=False)
        blocks = rng.standard_normal((len(masks), n, n)) + 1j * rng.standard_normal((len(masks), n, n))
        a = found["python"].materialize(masks, blocks, m, n)
        b = found["cython"].materialize(masks, blocks, m, n)
        assert np.array_equal(a, b)


def test_backend_name():
    assert kernels.BACKEND in kernels.backends()


def test_pure_python_switch():
    import os
    import subprocess
    import sys
    env = dict(os.environ, JOINTSPEC_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import jointspec.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
