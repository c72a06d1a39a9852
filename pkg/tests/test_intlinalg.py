import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from covjac.intlinalg import (
    det_bareiss,
    det_crt,
    det_exact,
    hermite_row_basis,
    hnf_is_full_unimodular,
    identity_matrix,
    kernel_basis,
    kernel_mod,
    lattice_contains,
    matmul,
    smith_normal_form_full,
    snf_diagonal,
    transpose,
)


def random_matrix(rng, rows, cols, bound=9):
    return [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]


def test_snf_transforms_roundtrip():
    rng = random.Random(101)
    for _ in range(40):
        m = rng.randint(1, 5)
        n = rng.randint(0, 5)
        a = random_matrix(rng, m, n)
        d, u, v, uinv, vinv = smith_normal_form_full(a)
        assert matmul(matmul(u, a), v) == d
        assert matmul(u, uinv) == identity_matrix(m)
        assert matmul(v, vinv) == identity_matrix(n)
        diag = [d[i][i] for i in range(min(m, n))]
        assert all(x >= 0 for x in diag)
        for i in range(len(diag) - 1):
            if diag[i + 1]:
                assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
            # zero may only follow zero or divide nothing


def test_snf_agrees_with_sympy():
    rng = random.Random(757)
    for _ in range(25):
        m = rng.randint(1, 5)
        n = rng.randint(1, 5)
        a = random_matrix(rng, m, n)
        mine = [x for x in snf_diagonal(a) if x not in (0,)]
        theirs = sympy.Matrix(a).rank()
        assert len([x for x in mine if x]) == theirs
        sm = smith_normal_form(sympy.Matrix(a))
        ref = sorted(abs(sm[i, i]) for i in range(min(m, n)) if sm[i, i])
        assert sorted(x for x in mine if x) == ref


def test_known_snf():
    d = snf_diagonal([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    assert d == [2, 2, 156]


def test_det_routes_agree():
    rng = random.Random(33)
    for _ in range(30):
        n = rng.randint(1, 6)
        a = random_matrix(rng, n, n, bound=20)
        ref = int(sympy.Matrix(a).det())
        assert det_bareiss([row[:] for row in a]) == ref
        assert det_crt(a) == ref
        assert det_exact(a) == ref


def test_det_big_entries():
    a = [[10**30, 3], [7, -(10**25)]]
    assert det_exact(a) == -(10**55) - 21


def test_hermite_canonical():
    rows = [[2, 4], [6, 8]]
    h1 = hermite_row_basis(rows, 2)
    h2 = hermite_row_basis([[6, 8], [2, 4], [8, 12]], 2)
    assert h1 == h2
    assert lattice_contains(h1, [2, 4])
    assert lattice_contains(h1, [6, 8])
    assert not lattice_contains(h1, [1, 0])


def test_kernel_basis():
    a = [[1, 2, 3], [2, 4, 6]]
    ker = kernel_basis(a)
    assert len(ker) == 2
    for v in ker:
        assert all(sum(r[j] * v[j] for j in range(3)) == 0 for r in a)


def test_kernel_mod():
    # x + 2y = 0 mod 4, solutions generated exactly
    ker = kernel_mod([[1, 2]], [4])
    for v in ker:
        assert (v[0] + 2 * v[1]) % 4 == 0
    assert lattice_contains(hermite_row_basis(ker, 2), [2, 1])
    assert not lattice_contains(hermite_row_basis(ker, 2), [1, 0])
    assert kernel_mod([], []) == []


def test_unimodular_check():
    assert hnf_is_full_unimodular([[1, 5], [0, 1]], 2)
    assert not hnf_is_full_unimodular([[2, 0], [0, 1]], 2)


def test_transpose_shape():
    assert transpose([[1, 2, 3]]) == [[1], [2], [3]]
    assert transpose([]) == []
