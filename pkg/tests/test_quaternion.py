import random
from fractions import Fraction

import pytest

from qhlab.quaternion import (IM_UNITS, Q_I, Q_J, Q_K, Q_ONE, QMatrix,
                              Quaternion, eta_matrix, hermitian_metric, in_sp,
                              rat, real_trace_pairing, realify, sp_basis,
                              sp_coordinates)

rng = random.Random(1214)


def rand_q():
    return Quaternion.of(*(Fraction(rng.randint(-8, 8), rng.randint(1, 5))
                           for _ in range(4)))


def test_hamilton_table():
    assert Q_I * Q_J == Q_K
    assert Q_J * Q_K == Q_I
    assert Q_K * Q_I == Q_J
    assert Q_I * Q_I == -Q_ONE
    assert (Q_I * Q_J) * Q_K == -Q_ONE


def test_identity_and_bilinearity():
    q = rand_q()
    assert Q_ONE * q == q
    assert (Q_ONE + Q_I) * (Q_ONE + Q_J) == Quaternion.of(1, 1, 1, 1)


def test_associativity_random():
    for _ in range(1000):
        a, b, c = rand_q(), rand_q(), rand_q()
        assert (a * b) * c == a * (b * c)


def test_conjugation_antihomomorphism():
    for _ in range(100):
        a, b = rand_q(), rand_q()
        assert (a * b).conj() == b.conj() * a.conj()
        assert (a.conj() * a).im().is_zero()
        assert a.norm_sq() == (a * a.conj()).a


def test_hermitian_metric_examples():
    e_i = (Q_I,)
    e_j = (Q_J,)
    assert hermitian_metric(e_i, e_i) == 1
    assert hermitian_metric(e_i, e_j) == 0
    v1 = (Q_ONE + Q_I, Quaternion())
    v2 = (Q_ONE - Q_I, Quaternion())
    assert hermitian_metric(v1, v2) == 0
    with pytest.raises(ValueError):
        hermitian_metric((Q_ONE,), (Q_ONE, Q_I))


def test_hermitian_metric_unit_invariance():
    for a in IM_UNITS:
        for _ in range(20):
            v = tuple(rand_q() for _ in range(3))
            w = tuple(rand_q() for _ in range(3))
            va = tuple(x * a for x in v)
            wa = tuple(x * a for x in w)
            assert hermitian_metric(va, wa) == hermitian_metric(v, w)


def test_sp_basis_counts():
    b10 = sp_basis(1, 0)
    assert len(b10) == 3
    assert all(m.rows == 1 for m in b10)
    assert {m.entries[0][0] for m in b10} == set(IM_UNITS)
    assert len(sp_basis(3, 0)) == 21
    assert len(sp_basis(1, 2)) == 21
    assert len(sp_basis(2, 0)) == 10


@pytest.mark.parametrize("p,q", [(2, 0), (1, 1), (1, 2)])
def test_sp_basis_defining_equation_and_closure(p, q):
    basis = sp_basis(p, q)
    for m in basis:
        assert in_sp(m, p, q)
    # closure: every pairwise commutator must expand exactly in the basis
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            comm = basis[i].commutator(basis[j])
            coords = sp_coordinates(comm, p, q)
            rebuilt = QMatrix.zero(p + q, p + q)
            for c, mat in zip(coords, basis):
                if c:
                    rebuilt = rebuilt + mat.scale(c)
            assert rebuilt == comm


def test_sp_rank_matches_dimension():
    # nullity of the defining linear system equals (p+q)(2(p+q)+1)
    from qhlab.linalg import nullspace
    for p, q in ((1, 2), (3, 0)):
        n = p + q
        eta = eta_matrix(p, q)
        # unknowns: the 4 n^2 real coordinates of X in X^dagger eta + eta X = 0
        unknowns = []
        for a in range(n):
            for b in range(n):
                for u, unit in enumerate((Q_ONE, Q_I, Q_J, Q_K)):
                    unknowns.append(QMatrix.from_entry(n, n, a, b, unit))
        eqrows = []
        for r in range(n):
            for c in range(n):
                for comp in range(4):
                    row = []
                    for x in unknowns:
                        img = x.dagger() @ eta + eta @ x
                        row.append(img.entries[r][c].components()[comp])
                    eqrows.append(row)
        kern = nullspace(eqrows, len(unknowns))
        assert len(kern) == n * (2 * n + 1)


def test_realify_homomorphism_random():
    def matmul(a, b):
        return [[sum(a[i][t] * b[t][j] for t in range(len(b)))
                 for j in range(len(b[0]))] for i in range(len(a))]

    for _ in range(200):
        a = QMatrix([[rand_q() for _ in range(2)] for _ in range(2)])
        b = QMatrix([[rand_q() for _ in range(2)] for _ in range(2)])
        assert realify(a @ b) == matmul(realify(a), realify(b))


def test_realify_complex_structure():
    ri = realify(QMatrix([[Q_I]]))
    sq = [[sum(ri[i][t] * ri[t][j] for t in range(4)) for j in range(4)]
          for i in range(4)]
    assert sq == [[-1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert realify(QMatrix.identity(2)) == [
        [1 if i == j else 0 for j in range(8)] for i in range(8)]


def test_realify_trace_orthogonality():
    ri = realify(QMatrix([[Q_I]]))
    rj = realify(QMatrix([[Q_J]]))
    assert sum(sum(ri[i][t] * rj[t][i] for t in range(4)) for i in range(4)) == 0
    assert real_trace_pairing(QMatrix([[Q_I]]), QMatrix([[Q_J]])) == 0
    assert real_trace_pairing(QMatrix([[Q_I]]), QMatrix([[Q_I]])) == -4


def test_rat_parsing():
    assert rat("3/4") == Fraction(3, 4)
    assert rat(-2) == Fraction(-2)
