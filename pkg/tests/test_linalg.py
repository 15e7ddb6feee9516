import random
from fractions import Fraction

from qhlab.linalg import (invert, nullspace, rank, rref, solve,
                          sparse_nullspace, sv_add_scaled, sv_primitive)

rng = random.Random(555)


def rand_matrix(rows, cols, density=1.0):
    return [[Fraction(rng.randint(-6, 6), rng.randint(1, 4))
             if rng.random() < density else Fraction(0)
             for _ in range(cols)] for _ in range(rows)]


def test_nullspace_examples():
    ident = [[Fraction(i == j) for j in range(3)] for i in range(3)]
    assert nullspace(ident, 3) == []
    zero = [[Fraction(0)] * 3 for _ in range(2)]
    assert len(nullspace(zero, 3)) == 3
    kern = nullspace([[Fraction(1), Fraction(-1)]], 2)
    assert len(kern) == 1
    v = kern[0]
    assert v[0] == v[1] != 0


def test_nullspace_annihilates_and_rank_nullity():
    for _ in range(40):
        m, n = rng.randint(1, 7), rng.randint(1, 7)
        a = rand_matrix(m, n, density=0.7)
        kern = nullspace(a, n)
        assert rank(a) + len(kern) == n
        for v in kern:
            for row in a:
                assert sum(x * y for x, y in zip(row, v)) == 0
        # kernel vectors are linearly independent: stack and re-rank
        if kern:
            assert rank(kern) == len(kern)


def test_solve_and_invert():
    for _ in range(30):
        n = rng.randint(1, 6)
        a = rand_matrix(n, n)
        if rank(a) < n:
            continue
        x_true = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
        b = [sum(a[i][j] * x_true[j] for j in range(n)) for i in range(n)]
        assert solve(a, b) == x_true
        inv = invert(a)
        prod = [[sum(a[i][t] * inv[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)]
        assert prod == [[Fraction(i == j) for j in range(n)] for i in range(n)]


def test_solve_inconsistent():
    assert solve([[Fraction(1), Fraction(1)], [Fraction(1), Fraction(1)]],
                 [Fraction(0), Fraction(1)]) is None


def test_rref_idempotent():
    a = rand_matrix(4, 6, density=0.8)
    ech, piv = rref(a)
    again, piv2 = rref(ech)
    assert ech == again and piv == piv2


def test_sparse_matches_dense():
    for _ in range(40):
        m, n = rng.randint(1, 10), rng.randint(1, 10)
        a = rand_matrix(m, n, density=0.3)
        dense_kern = nullspace(a, n)
        rows = [{j: x for j, x in enumerate(row) if x} for row in a]
        sparse_kern = sparse_nullspace([r for r in rows if r], n)
        assert len(sparse_kern) == len(dense_kern)
        for v in sparse_kern:
            for row in a:
                assert sum(row[j] * x for j, x in v.items()) == 0
        # spans agree: each dense vector reduces to zero against the sparse set
        from qhlab.lie import SpanBasis
        basis = SpanBasis()
        for v in sparse_kern:
            basis.add(v)
        for v in dense_kern:
            assert basis.contains({j: x for j, x in enumerate(v) if x})


def test_sparse_components_split():
    # two independent blocks plus an untouched column
    rows = [{0: Fraction(1), 1: Fraction(-1)}, {2: Fraction(2), 3: Fraction(2)}]
    kern = sparse_nullspace(rows, 5)
    assert len(kern) == 3
    supports = [set(v) for v in kern]
    assert {4} in supports


def test_sv_primitive_canonical():
    v = {3: Fraction(-2, 6), 7: Fraction(4, 6)}
    p = sv_primitive(v)
    assert p == {3: Fraction(1), 7: Fraction(-2)}
    w = sv_add_scaled({1: Fraction(1)}, {1: Fraction(-1), 2: Fraction(1)}, Fraction(1))
    assert w == {2: Fraction(1)}
