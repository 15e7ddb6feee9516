"""Riemannian geometry of invariant metrics on reductive homogeneous models.

Conventions: R(x,y) = [L(x), L(y)] - L([x,y]_m) - rho([x,y]_h) with L the
Nomizu operator of the metric; R4(x,y,z,w) = g(R(x,y)z, w); sectional
curvature K(x,y) = R4(x,y,y,x) / (|x|^2 |y|^2 - g(x,y)^2), so round spheres
come out positive and the solvable hyperbolic algebras negative.  All
quantities are exact Fractions evaluated at rational metric points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .lie import BilinearMap, ColMat, op_apply
from .linalg import SparseVec

R4 = dict[tuple[int, int, int, int], Fraction]


@dataclass
class GroupData:
    """Minimal input for the curvature pipeline.

    h_action maps the h-part of the bracket into endomorphisms of m; it is
    empty for simply transitive (Lie group) models.
    """

    dim: int
    bracket_m: BilinearMap
    bracket_h: BilinearMap | None
    h_mats: list[ColMat] | None
    metric: list[Fraction]

    @staticmethod
    def from_model(model) -> "GroupData":
        return GroupData(model.dim_m, model.bracket_m, model.bracket_h,
                         model.rho.mats, list(model.metric))


def nomizu(data: GroupData) -> list[ColMat]:
    """Nomizu operators L(e_i) of the Levi-Civita connection.

    Defined by 2 g(L(x)y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y); the
    returned operators are checked to be g-skew and torsion-free.
    """
    dm, G, b = data.dim, data.metric, data.bracket_m
    if any(gx <= 0 for gx in G):
        raise ValueError("metric must be positive definite")
    lam: list[ColMat] = []
    for i in range(dm):
        col: ColMat = {}
        for j in range(dm):
            vec: SparseVec = {}
            bij = b.pair(i, j)
            for k in range(dm):
                num = G[k] * bij.get(k, 0)
                num -= G[i] * b.pair(j, k).get(i, 0)
                num += G[j] * b.pair(k, i).get(j, 0)
                if num:
                    vec[k] = num / (2 * G[k])
            if vec:
                col[j] = vec
        lam.append(col)
    for i in range(dm):
        for j in range(dm):
            cij = lam[i].get(j, {})
            for k, v in cij.items():
                if G[k] * v + G[j] * lam[i].get(k, {}).get(j, 0) != 0:
                    raise AssertionError("Nomizu operator is not metric-skew")
            diff = dict(cij)
            for k, v in lam[j].get(i, {}).items():
                t = diff.get(k, 0) - v
                if t:
                    diff[k] = t
                else:
                    diff.pop(k, None)
            if diff != b.pair(i, j):
                raise AssertionError("Nomizu operator fails torsion-freeness")
    return lam


@dataclass
class CurvatureData:
    data: GroupData
    lam: list[ColMat]
    r4: R4
    ricci: list[list[Fraction]]
    scalar: Fraction
    weyl: R4
    nabla_r: dict[tuple[int, int, int, int, int], Fraction]


def _kn_product(a_diag_or_mat, b_diag_or_mat, dm: int) -> R4:
    """Kulkarni-Nomizu-type product with the sign making g*g the constant
    curvature template: (a*b)_{ijkl} = a_il b_jk + a_jk b_il - a_ik b_jl - a_jl b_ik."""
    def ent(m, i, j):
        if isinstance(m, list) and isinstance(m[0], list):
            return m[i][j]
        return m[i] if i == j else Fraction(0)

    out: R4 = {}
    for i in range(dm):
        for j in range(dm):
            for k in range(dm):
                for l in range(dm):
                    v = (ent(a_diag_or_mat, i, l) * ent(b_diag_or_mat, j, k)
                         + ent(a_diag_or_mat, j, k) * ent(b_diag_or_mat, i, l)
                         - ent(a_diag_or_mat, i, k) * ent(b_diag_or_mat, j, l)
                         - ent(a_diag_or_mat, j, l) * ent(b_diag_or_mat, i, k))
                    if v:
                        out[(i, j, k, l)] = v
    return out


def curvature(data: GroupData, with_nabla: bool = True) -> CurvatureData:
    dm, G = data.dim, data.metric
    lam = nomizu(data)
    r_ops: dict[tuple[int, int], ColMat] = {}
    for i, j in combinations(range(dm), 2):
        op: ColMat = {}
        for c in range(dm):
            base = {c: Fraction(1)}
            vec = op_apply(lam[i], op_apply(lam[j], base))
            for k, v in op_apply(lam[j], op_apply(lam[i], base)).items():
                t = vec.get(k, 0) - v
                if t:
                    vec[k] = t
                else:
                    vec.pop(k, None)
            bm = data.bracket_m.pair(i, j)
            for t_idx, s in bm.items():
                for k, v in lam[t_idx].get(c, {}).items():
                    t = vec.get(k, 0) - s * v
                    if t:
                        vec[k] = t
                    else:
                        vec.pop(k, None)
            if data.bracket_h is not None and data.h_mats is not None:
                for hidx, s in data.bracket_h.pair(i, j).items():
                    for k, v in data.h_mats[hidx].get(c, {}).items():
                        t = vec.get(k, 0) - s * v
                        if t:
                            vec[k] = t
                        else:
                            vec.pop(k, None)
            if vec:
                op[c] = vec
        r_ops[(i, j)] = op

    r4: R4 = {}
    for (i, j), op in r_ops.items():
        for k, col in op.items():
            for l, v in col.items():
                val = G[l] * v
                r4[(i, j, k, l)] = val
                r4[(j, i, k, l)] = -val
    # algebraic curvature symmetries, asserted exactly
    for (i, j, k, l), v in r4.items():
        if r4.get((i, j, l, k), 0) != -v:
            raise AssertionError("curvature not antisymmetric in the value pair")
        if r4.get((k, l, i, j), 0) != v:
            raise AssertionError("curvature fails pair symmetry")
    for i, j, k in combinations(range(dm), 3):
        for l in range(dm):
            if (r4.get((i, j, k, l), 0) + r4.get((j, k, i, l), 0)
                    + r4.get((k, i, j, l), 0)) != 0:
                raise AssertionError("curvature fails the first Bianchi identity")

    ricci = [[Fraction(0)] * dm for _ in range(dm)]
    for j in range(dm):
        for k in range(dm):
            s = Fraction(0)
            for i in range(dm):
                v = r4.get((i, j, k, i), 0)
                if v:
                    s += v / G[i]
            ricci[j][k] = s
    for j in range(dm):
        for k in range(j):
            if ricci[j][k] != ricci[k][j]:
                raise AssertionError("Ricci tensor not symmetric")
    scalar = sum((ricci[j][j] / G[j] for j in range(dm)), Fraction(0))

    d = dm
    schouten = [[(ricci[i][j] - (scalar / (2 * (d - 1))) * (G[i] if i == j else 0))
                 / (d - 2) for j in range(d)] for i in range(d)]
    weyl = dict(r4)
    for key, v in _kn_product(schouten, G, dm).items():
        t = weyl.get(key, 0) - v
        if t:
            weyl[key] = t
        else:
            weyl.pop(key, None)
    # Weyl is totally trace-free; this pins the decomposition coefficients
    for j in range(dm):
        for k in range(dm):
            s = Fraction(0)
            for i in range(dm):
                v = weyl.get((i, j, k, i), 0)
                if v:
                    s += v / G[i]
            if s != 0:
                raise AssertionError("Weyl tensor is not trace-free")

    nabla: dict[tuple[int, int, int, int, int], Fraction] = {}
    if with_nabla:
        # (nabla_m R)(y1..y4) = -sum_t R(.., L(e_m) y_t, ..); distributing each
        # nonzero R4 entry needs L(e_m) row-major: source slot s feeds targets a
        # with coefficient L_m[a][s].
        from .lie import op_transpose
        rows_t = [op_transpose(lam[m]) for m in range(dm)]
        for (i, j, k, l), v in r4.items():
            idx = (i, j, k, l)
            for slot in range(4):
                for m in range(dm):
                    for a, c in rows_t[m].get(idx[slot], {}).items():
                        key = (m,) + idx[:slot] + (a,) + idx[slot + 1:]
                        t = nabla.get(key, 0) - v * c
                        if t:
                            nabla[key] = t
                        else:
                            nabla.pop(key, None)
    return CurvatureData(data, lam, r4, ricci, scalar, weyl, nabla)


def nabla_g_is_zero(data: GroupData, lam: list[ColMat]) -> bool:
    """Self-test: the invariant-tensor derivative of the metric vanishes."""
    dm, G = data.dim, data.metric
    for m in range(dm):
        for y in range(dm):
            col = lam[m].get(y, {})
            for z, v in col.items():
                if G[z] * v + G[y] * lam[m].get(z, {}).get(y, 0) != 0:
                    return False
    return True


def sectional(cur: CurvatureData, i: int, j: int) -> Fraction:
    G = cur.data.metric
    return cur.r4.get((i, j, j, i), Fraction(0)) / (G[i] * G[j])


@dataclass
class RiemannClass:
    einstein: Fraction | None
    conformally_flat: bool
    locally_symmetric: bool
    constant_sectional: Fraction | None
    ricci_flat: bool
    product_blocks: list[dict]


def _block_partition(cur: CurvatureData, groups: list[list[int]]) -> list[list[int]]:
    """Merge the given index groups along curvature and Ricci support."""
    parent = list(range(len(groups)))
    where = {}
    for gi, grp in enumerate(groups):
        for idx in grp:
            where[idx] = gi

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for (i, j, k, l), v in cur.r4.items():
        gs = {where[i], where[j], where[k], where[l]}
        gs = sorted(gs)
        for other in gs[1:]:
            union(gs[0], other)
    dm = cur.data.dim
    for i in range(dm):
        for j in range(dm):
            if i != j and cur.ricci[i][j]:
                union(where[i], where[j])
    blocks: dict[int, list[int]] = {}
    for gi, grp in enumerate(groups):
        blocks.setdefault(find(gi), []).extend(grp)
    return [sorted(v) for _, v in sorted(blocks.items())]


def classify(cur: CurvatureData, groups: list[list[int]] | None = None) -> RiemannClass:
    """Exact Einstein / conformally-flat / symmetric / constant-curvature flags."""
    dm, G = cur.data.dim, cur.data.metric
    lam_e = cur.ricci[0][0] / G[0]
    einstein: Fraction | None = lam_e
    for i in range(dm):
        for j in range(dm):
            expect = lam_e * G[i] if i == j else Fraction(0)
            if cur.ricci[i][j] != expect:
                einstein = None
                break
        if einstein is None:
            break
    conf_flat = not cur.weyl
    loc_sym = not cur.nabla_r
    k0 = sectional(cur, 0, 1)
    const_k: Fraction | None = k0
    template = _kn_product(G, G, dm)
    for key in set(cur.r4) | set(template):
        if cur.r4.get(key, 0) != (k0 / 2) * template.get(key, 0):
            const_k = None
            break
    ricci_flat = all(not cur.ricci[i][j] for i in range(dm) for j in range(dm))

    if groups is None:
        groups = [[i] for i in range(dm)]
    blocks = []
    for block in _block_partition(cur, groups):
        flat = all(not cur.r4.get((i, j, k, l), 0)
                   for i in block for j in block for k in block for l in block)
        entry = {"indices": block, "size": len(block), "flat": flat,
                 "constant_sectional": None}
        if not flat and len(block) >= 2:
            kb = sectional(cur, block[0], block[1])
            ok = all(cur.r4.get((i, j, k, l), 0) == (kb / 2) * template.get((i, j, k, l), 0)
                     for i in block for j in block for k in block for l in block)
            entry["constant_sectional"] = kb if ok else None
        blocks.append(entry)
    return RiemannClass(einstein, conf_flat, loc_sym, const_k, ricci_flat, blocks)


def model_groups(n: int) -> list[list[int]]:
    """The fixed basis split R / Im(H) / H^{n-1} used for product detection."""
    return [[0], [1, 2, 3], list(range(4, 4 * n))]


def hyperbolic_group_data(dim: int, eta: Fraction, g0: Fraction,
                          gn: Fraction) -> GroupData:
    """R acting on an abelian R^{dim-1} by the scalar eta, with product metric."""
    coeffs = {(0, a): {a: Fraction(eta)} for a in range(1, dim)}
    b = BilinearMap(dim, dim, coeffs)
    metric = [g0] + [gn] * (dim - 1)
    return GroupData(dim, b, None, None, metric)
