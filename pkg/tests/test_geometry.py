import random
from fractions import Fraction

from qhlab.geometry import (GroupData, classify, curvature,
                            hyperbolic_group_data, model_groups,
                            nabla_g_is_zero, nomizu, sectional)
from qhlab.models import ModelSpec, build_model, horizontal_brackets

rng = random.Random(77)

F = Fraction


def _model(kind, n=3, c1=1, c2=1, beta=None):
    return build_model(ModelSpec(kind, n, c1=F(c1), c2=F(c2),
                                 beta=None if beta is None else F(beta)))


def test_hyperbolic_lemma():
    # R acting by a nonzero scalar on an abelian ideal: constant negative
    # curvature for any product metric
    for dim, eta, g0, gn in ((6, F(2), F(1), F(3)), (6, F(-1), F(2), F(1)),
                             (6, F(1, 2), F(1), F(1)), (12, F(3), F(2), F(5))):
        data = hyperbolic_group_data(dim, eta, g0, gn)
        cls = classify(curvature(data))
        assert cls.constant_sectional is not None
        assert cls.constant_sectional == -eta * eta / g0
        assert cls.conformally_flat and cls.einstein is not None


def test_flat_model_is_flat():
    model = _model("FlatMax", 2)
    data = GroupData.from_model(model)
    lam = nomizu(data)
    assert all(not col for col in lam)
    cur = curvature(data)
    assert not cur.r4 and cur.scalar == 0
    cls = classify(cur)
    assert cls.constant_sectional == 0 and cls.ricci_flat


def test_nomizu_koszul_oracle_h2():
    # [q1, q2] = Theta(q1, q2) only: L(e) f must carry Im(H)-component
    # (1/2) Theta(e, f) and metric duality handles the rest
    model = _model("H2", 3, 1, 1)
    data = GroupData.from_model(model)
    lam = nomizu(data)
    theta = horizontal_brackets(3)["Theta"]
    for e in range(4, 12):
        for f in range(4, 12):
            got = lam[e].get(f, {})
            expect = {k: v / 2 for k, v in theta.pair(e, f).items()}
            im_part = {k: v for k, v in got.items() if 1 <= k <= 3}
            assert im_part == expect


def test_nomizu_assertions_random_metric():
    for _ in range(3):
        c1 = F(rng.randint(1, 5), rng.randint(1, 3))
        c2 = F(rng.randint(1, 5), rng.randint(1, 3))
        model = _model("H5", 3, c1, c2, beta=2)
        data = GroupData.from_model(model)
        lam = nomizu(data)  # metric-skewness and torsion assertions inside
        assert nabla_g_is_zero(data, lam)


def test_curvature_symmetries_are_asserted():
    # the constructor itself validates antisymmetries, pair symmetry, Bianchi
    for kind, beta in (("H2", None), ("H3", 1), ("QHP", None)):
        cur = curvature(GroupData.from_model(_model(kind, 3, 2, 1, beta)))
        assert cur.r4


def test_h32_constant_negative_curvature():
    for c1, c2 in ((1, 1), (2, 1), (1, 3)):
        cur = curvature(GroupData.from_model(_model("H3", 3, c1, c2, beta=2)))
        cls = classify(cur, model_groups(3))
        assert cls.constant_sectional == F(-4) / c1
        assert cls.einstein is not None and cls.conformally_flat
        assert cls.locally_symmetric


def test_h5_product_signature():
    # S^3 x hyperbolic block structure for beta != 0
    cur = curvature(GroupData.from_model(_model("H5", 3, 1, 2, beta=2)))
    cls = classify(cur, model_groups(3))
    sizes = sorted((b["size"], b["flat"], b["constant_sectional"] is not None
                    and b["constant_sectional"] > 0)
                   for b in cls.product_blocks)
    assert [s[0] for s in sizes] == [3, 9]
    sphere = next(b for b in cls.product_blocks if b["size"] == 3)
    hyper = next(b for b in cls.product_blocks if b["size"] == 9)
    assert sphere["constant_sectional"] > 0
    assert hyper["constant_sectional"] < 0
    assert cls.locally_symmetric


def test_h50_product_signature():
    cur = curvature(GroupData.from_model(_model("H5", 3, 1, 2, beta=0)))
    cls = classify(cur, model_groups(3))
    sphere = next(b for b in cls.product_blocks if b["size"] == 3)
    assert sphere["constant_sectional"] > 0
    # the flat complement does not merge (nothing curvature-links R to H^{n-1})
    assert sum(b["size"] for b in cls.product_blocks if b["flat"]) == 9


def test_h4_product_signature():
    cur = curvature(GroupData.from_model(_model("H4", 3, 2, 3)))
    cls = classify(cur, model_groups(3))
    hyper = next(b for b in cls.product_blocks if b["size"] == 9)
    flat = next(b for b in cls.product_blocks if b["size"] == 3)
    assert hyper["constant_sectional"] == F(-1, 2) and flat["flat"]
    assert cls.locally_symmetric


def test_h30_computed_signature():
    # exact blocks: 4-dimensional constant negative + flat complement
    cur = curvature(GroupData.from_model(_model("H3", 3, 1, 1, beta=0)))
    cls = classify(cur, model_groups(3))
    sizes = sorted(b["size"] for b in cls.product_blocks)
    assert sizes == [4, 8]
    neg = next(b for b in cls.product_blocks if b["size"] == 4)
    assert neg["constant_sectional"] == F(-4)
    assert next(b for b in cls.product_blocks if b["size"] == 8)["flat"]


def test_einstein_points():
    cls = classify(curvature(GroupData.from_model(_model("H1-", 3, 2, 1))))
    assert cls.einstein is not None and cls.locally_symmetric
    assert not cls.conformally_flat
    cls = classify(curvature(GroupData.from_model(_model("H1-", 3, 1, 1))))
    assert cls.einstein is None and not cls.locally_symmetric
    cls = classify(curvature(GroupData.from_model(_model("H2", 3, 1, 2))))
    assert cls.einstein is None


def test_scaling_covariance():
    base = _model("H5", 3, 1, 2, beta=1)
    cur = curvature(GroupData.from_model(base), with_nabla=False)
    for _ in range(20):
        lam = F(rng.randint(1, 9), rng.randint(1, 9))
        scaled = curvature(GroupData.from_model(base.with_metric(lam * 1, lam * 2)),
                           with_nabla=False)
        assert scaled.scalar == cur.scalar / lam
        # as a (1,3)-tensor the curvature is unchanged: R4 scales with g
        for key, v in cur.r4.items():
            assert scaled.r4.get(key, 0) == lam * v
        for key, v in scaled.r4.items():
            assert cur.r4.get(key, 0) == v / lam


def test_divergence_free_at_einstein_point():
    # parallel curvature at the Einstein point makes every contraction of
    # nabla R vanish; check the contracted-Bianchi pattern explicitly
    model = _model("H1-", 3, 2, 1)
    cur = curvature(GroupData.from_model(model))
    assert not cur.nabla_r
    div = {}
    for (m, i, j, k, l), v in cur.nabla_r.items():
        if m == l:
            key = (i, j, k)
            div[key] = div.get(key, 0) + v / cur.data.metric[m]
    assert all(not x for x in div.values())
