import itertools

import numpy as np
import pytest

from jointspec.clifford import (
    BasisBlade,
    CliffordElement,
    CliffordOperator,
    CliffordVector,
    blade_product,
    cliff,
    clifford_frobenius_norm,
    clifford_trace,
    element_inner_product,
    materialize,
    operator_apply,
    structured_frobenius_norm,
    tuple_frobenius_identity,
)
from jointspec.errors import CapacityExceeded, DimensionMismatch, GeneratorCountMismatch

from conftest import random_complex
from test_kernels import naive_blade_product


def e(m, *gens):
    return BasisBlade.from_generators(m, *gens)


def test_blade_product_examples():
    assert blade_product(e(2, 1), e(2, 2)) == (1, e(2, 1, 2))
    assert blade_product(e(2, 1), e(2, 1)) == (-1, e(2))
    assert blade_product(e(2, 2), e(2, 1)) == (-1, e(2, 1, 2))
    with pytest.raises(GeneratorCountMismatch):
        blade_product(e(2, 1), e(3, 1))


def test_blade_validation():
    with pytest.raises(ValueError):
        BasisBlade(2, 4)
    with pytest.raises(ValueError):
        e(3, 1, 1)
    assert str(e(3)) == "e_phi"
    assert str(e(3, 3, 1)) == "e_13"
    assert e(3, 1, 3).grade == 2


@pytest.mark.parametrize("m", range(1, 7))
def test_blade_product_associative(m):
    blades = [BasisBlade(m, s) for s in range(1 << m)]
    for S, T, R in itertools.product(blades, repeat=3):
        s1, ST = blade_product(S, T)
        s2, left = blade_product(ST, R)
        s3, TR = blade_product(T, R)
        s4, right = blade_product(S, TR)
        assert left == right and s1 * s2 == s3 * s4


@pytest.mark.parametrize("m", range(1, 7))
def test_blade_square_sign(m):
    for mask in range(1 << m):
        S = BasisBlade(m, mask)
        k = S.grade
        assert blade_product(S, S) == ((-1) ** (k * (k + 1) // 2), BasisBlade(m, 0))


def test_element_inner_product_examples():
    e1 = CliffordElement(2, {e(2, 1): 1.0})
    e2 = CliffordElement(2, {e(2, 2): 1.0})
    assert element_inner_product(e1, e1) == 1.0
    assert element_inner_product(e1, e2) == 0.0
    a = CliffordElement(2, {0: 2.0, 0b11: 3.0})
    b = CliffordElement(2, {0: 1.0, 0b11: -1.0})
    assert element_inner_product(a, b) == -1.0
    with pytest.raises(GeneratorCountMismatch):
        element_inner_product(a, CliffordElement(3, {0: 1.0}))


def test_element_product_relations():
    m = 3
    for i in range(1, m + 1):
        ei = CliffordElement(m, {e(m, i): 1.0})
        assert (ei * ei).coeffs == {0: -1.0}
        for j in range(i + 1, m + 1):
            ej = CliffordElement(m, {e(m, j): 1.0})
            assert (ei * ej).coeffs == {k: -v for k, v in (ej * ei).coeffs.items()}


def test_operator_apply_examples(rng):
    n, m = 3, 2
    x = CliffordVector(n, m, {0: random_complex(rng, n), 0b11: random_complex(rng, n)})
    y = operator_apply(CliffordOperator.identity(n, m), x)
    assert np.allclose(y.to_array(), x.to_array())

    A = random_complex(rng, n, n)
    v = random_complex(rng, n)
    out = operator_apply(CliffordOperator.tensor(A, e(m, 1)), CliffordVector(n, m, {e(m, 1): v}))
    assert set(out.components) == {0}
    assert np.allclose(out.components[0], -A @ v)

    out = operator_apply(CliffordOperator.tensor(A, e(m, 1)), CliffordVector(n, m, {e(m, 2): v}))
    assert set(out.components) == {0b11}
    assert np.allclose(out.components[0b11], A @ v)

    with pytest.raises(DimensionMismatch):
        operator_apply(CliffordOperator.identity(2, m), x)


def test_cliff_examples():
    C = cliff([np.eye(2)])
    assert set(C.blocks) == {1} and np.array_equal(C.blocks[1], 1j * np.eye(2))
    assert cliff(np.zeros((2, 2, 2))).blocks == {}
    C = cliff([np.diag([1, 2]), np.diag([3, 4])])
    assert set(C.blocks) == {1, 2}
    assert np.array_equal(C.blocks[2], 1j * np.diag([3, 4]))


def apply_oracle(A: CliffordOperator):
    """Matrix of A built column by column from operator_apply on basis vectors."""
    dim = (1 << A.m) * A.n
    cols = []
    for c in range(dim):
        unit = np.zeros(dim, dtype=complex)
        unit[c] = 1
        cols.append(operator_apply(A, CliffordVector.from_array(A.n, A.m, unit)).to_array())
    return np.column_stack(cols)


def test_materialize_examples():
    assert np.array_equal(materialize(CliffordOperator.identity(3, 2)), np.eye(12))
    I2, Z2 = np.eye(2), np.zeros((2, 2))
    expected = np.block([[Z2, -1j * I2], [1j * I2, Z2]])
    M = materialize(cliff([I2]))
    assert np.array_equal(M, expected)
    assert np.array_equal(apply_oracle(cliff([I2])), expected)
    assert not np.any(materialize(CliffordOperator(2, 3)))


def test_materialize_capacity():
    with pytest.raises(CapacityExceeded):
        materialize(CliffordOperator.identity(300, 4))
    assert materialize(CliffordOperator.identity(300, 4), limit=4800).shape == (4800, 4800)


def test_apply_agrees_with_materialize(rng):
    for _ in range(50):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        masks = rng.choice(1 << m, size=int(rng.integers(1, (1 << m) + 1)), replace=False)
        A = CliffordOperator(n, m, {int(s): random_complex(rng, n, n) for s in masks})
        x = CliffordVector.from_array(n, m, random_complex(rng, (1 << m) * n))
        y = operator_apply(A, x).to_array()
        assert np.allclose(y, materialize(A) @ x.to_array(), rtol=0, atol=1e-12 * (1 + np.abs(y).max()))


def test_clifford_norm_examples():
    assert clifford_frobenius_norm(cliff([np.eye(2)])) == pytest.approx(2.0, rel=1e-15)
    assert clifford_frobenius_norm(cliff(np.zeros((3, 2, 2)))) == 0.0
    assert clifford_frobenius_norm(cliff([np.diag([3.0, 4.0])])) == pytest.approx(np.sqrt(50), rel=1e-15)


def test_frobenius_identity_for_arbitrary_tuples(rng):
    for _ in range(100):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        T = random_complex(rng, m, n, n)
        C = cliff(T)
        expected = (1 << m) * sum(np.linalg.norm(M) ** 2 for M in T)
        assert clifford_frobenius_norm(C) ** 2 == pytest.approx(expected, rel=1e-10)
        assert structured_frobenius_norm(C) == pytest.approx(tuple_frobenius_identity(T), rel=1e-12)


def test_clifford_trace_examples(rng):
    P = random_complex(rng, 3, 3)
    for T in range(1, 8):
        assert clifford_trace(CliffordOperator.tensor(P, BasisBlade(3, T))) == 0
    assert clifford_trace(CliffordOperator.tensor(np.diag([1, 2]), BasisBlade(2, 0))) == 12
    assert clifford_trace(cliff(random_complex(rng, 3, 2, 2))) == 0


@pytest.mark.parametrize("m", range(1, 6))
def test_trace_law_against_materialized(m, rng):
    n = int(rng.integers(1, 5))
    P = random_complex(rng, n, n)
    for T in range(1 << m):
        A = CliffordOperator.tensor(P, BasisBlade(m, T))
        tr = np.trace(materialize(A))
        assert tr == pytest.approx(clifford_trace(A), abs=1e-12 * (1 << m) * (1 + abs(np.trace(P))))
