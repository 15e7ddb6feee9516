"""Isotropy representations, invariant brackets, bracket normal forms and
construction of the named homogeneous models.

Basis of m (= R^{4n}): index 4p + u where p is the quaternionic slot and
u in {0,1,2,3} enumerates (1, i, j, k).  Slot 0 carries R + Im(H); slots
1..n-1 carry H^{n-1}.  The isotropy algebra h = sp(1) + sp(n-1) acts by

    sp(1):   v -> a v - v a   on Im(H),    q -> -q a   on H^{n-1},
    sp(n-1): q -> Y q         on H^{n-1},

The quaternionic triple acts by right multiplication (R_i, R_j, -R_k)
on H^{n-1} and by the conjugated left realization (-L_i, -L_j, L_k) on the
H-slot; see quaternionic_triple for why that orientation is the one
matching the normal-form labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .lie import (BilinearMap, ColMat, LieAlgebra, Representation, SpanBasis,
                  equivariant_hom, is_equivariant, op_apply, op_compose,
                  op_is_zero, op_sub, semidirect)
from .linalg import SparseVec, invert, sv_add_scaled
from .poly import Poly
from .quaternion import (IM_UNITS, UNITS, QMatrix, Quaternion, rat, sp_basis,
                         sp_coordinates)

HORIZONTAL_NAMES = ("Theta", "Psi1", "Psi2", "Upsilon1", "Upsilon2")
VERTICAL_NAMES = ("ThetaV", "Psi1V", "Upsilon1V", "Xi")
FAMILY_NAMES = ("F1", "F2", "F3", "F4")
PARAM_NAMES = ("alpha", "beta1", "beta2", "gamma1", "gamma2")


def dims(n: int) -> dict[str, int]:
    """Maximal, submaximal and isotropy dimensions for quaternionic dim n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    d = 2 * n * n + n + 4
    if n in (1, 2):
        d += 1
    return {"D": 2 * n * n + 5 * n + 3, "d": d, "delta": 2 * n * n - 3 * n + 4}


# --------------------------------------------------------------------------
# basis bookkeeping
# --------------------------------------------------------------------------

def _quat_to_slot(p: int, q: Quaternion) -> SparseVec:
    out: SparseVec = {}
    for u, comp in enumerate(q.components()):
        if comp:
            out[4 * p + u] = comp
    return out


def _im_to_coords(q: Quaternion, offset: int) -> SparseVec:
    """Imaginary quaternion -> coordinates on three consecutive indices."""
    out: SparseVec = {}
    for t, comp in enumerate((q.b, q.c, q.d)):
        if comp:
            out[offset + t] = comp
    return out


_SP1_BRACKETS = {
    (0, 1): {2: Fraction(2)},
    (0, 2): {1: Fraction(-2)},
    (1, 2): {0: Fraction(2)},
}


def _sp_block_brackets(p: int, q: int, offset: int) -> dict[tuple[int, int], SparseVec]:
    """Structure constants of sp(p,q) in the sp_basis layout, shifted by offset."""
    basis = sp_basis(p, q)
    out: dict[tuple[int, int], SparseVec] = {}
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            coords = sp_coordinates(basis[i].commutator(basis[j]), p, q)
            col = {offset + k: c for k, c in enumerate(coords) if c}
            if col:
                out[(offset + i, offset + j)] = col
    return out


def isotropy_rep(n: int) -> tuple[LieAlgebra, Representation, list[int]]:
    """The algebra h = sp(1) + sp(n-1), its action on m, and a solver order.

    The order lists torus-like generators first (the diagonal sp(1) element
    A_i and the diagonal i E_ss of sp(n-1)); their constraint operators
    decompose into tiny blocks, which keeps the exact kernel engine fast.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    dh = 3 + (n - 1) * (2 * n - 1)
    brackets = dict(_SP1_BRACKETS)
    brackets.update(_sp_block_brackets(n - 1, 0, 3))
    h = LieAlgebra(dh, brackets)
    if not h.verify_jacobi():
        raise AssertionError("isotropy algebra fails Jacobi")

    mats: list[ColMat] = []
    for a in IM_UNITS:  # A_a, the diagonal sp(1)
        col: ColMat = {}
        for u, unit in enumerate(UNITS):
            img = a * unit - unit * a if u else Quaternion()
            vec = _quat_to_slot(0, img)
            if vec:
                col[u] = vec
        for p in range(1, n):
            for u, unit in enumerate(UNITS):
                vec = _quat_to_slot(p, -(unit * a))
                if vec:
                    col[4 * p + u] = vec
        mats.append(col)
    spb = sp_basis(n - 1, 0)
    for Y in spb:
        col = {}
        for p in range(1, n):
            for u, unit in enumerate(UNITS):
                img: SparseVec = {}
                for t in range(1, n):
                    e = Y.entries[t - 1][p - 1]
                    if not e.is_zero():
                        img = sv_add_scaled(img, _quat_to_slot(t, e * unit), 1)
                if img:
                    col[4 * p + u] = img
        mats.append(col)
    rho = Representation(h, 4 * n, mats, check=True)
    torus = [0] + [3 + 3 * s for s in range(n - 1)]
    order = torus + [g for g in range(dh) if g not in torus]
    return h, rho, order


def ambient_rep(n: int) -> tuple[LieAlgebra, Representation, list[int]]:
    """k = sp(1) + sp(n) acting on H^n: q -> -q a and q -> X q."""
    dk = 3 + n * (2 * n + 1)
    brackets = dict(_SP1_BRACKETS)
    brackets.update(_sp_block_brackets(n, 0, 3))
    k = LieAlgebra(dk, brackets)
    if not k.verify_jacobi():
        raise AssertionError("ambient algebra fails Jacobi")
    mats: list[ColMat] = []
    for a in IM_UNITS:  # S_a
        col: ColMat = {}
        for p in range(n):
            for u, unit in enumerate(UNITS):
                vec = _quat_to_slot(p, -(unit * a))
                if vec:
                    col[4 * p + u] = vec
        mats.append(col)
    for Y in sp_basis(n, 0):
        col = {}
        for p in range(n):
            for u, unit in enumerate(UNITS):
                img: SparseVec = {}
                for t in range(n):
                    e = Y.entries[t][p]
                    if not e.is_zero():
                        img = sv_add_scaled(img, _quat_to_slot(t, e * unit), 1)
                if img:
                    col[4 * p + u] = img
        mats.append(col)
    rho = Representation(k, 4 * n, mats, check=True)
    torus = [0] + [3 + 3 * s for s in range(n)]
    order = torus + [g for g in range(dk) if g not in torus]
    return k, rho, order


def _mixed_mult(n: int, a: Quaternion, sign0: int, sign_h: int) -> ColMat:
    """sign0 * L_a on the H-slot, sign_h * R_a on H^{n-1}, column-major."""
    col: ColMat = {}
    for u, unit in enumerate(UNITS):
        vec = _quat_to_slot(0, (a * unit) * Fraction(sign0))
        if vec:
            col[u] = vec
    for p in range(1, n):
        for u, unit in enumerate(UNITS):
            vec = _quat_to_slot(p, (unit * a) * Fraction(sign_h))
            if vec:
                col[4 * p + u] = vec
    return col


def quaternionic_triple(n: int) -> tuple[ColMat, ColMat, ColMat]:
    """Invariant triple for the submaximal models.

    On the H^{n-1} block the structure is right multiplication (R_i, R_j,
    -R_k); on the H-slot it is the conjugated realization (-L_i, -L_j, L_k).
    Both mixed-sign patterns satisfy I^2 = J^2 = K^2 = I J K = -Id and are
    h-invariant as a span; this orientation is the one for which the
    quaternion-Kahler locus lands on the alpha = -1 bracket at c1 = 2 c2,
    matching the classification's normal-form labels.
    """
    i, j, k = IM_UNITS
    return (_mixed_mult(n, i, -1, 1), _mixed_mult(n, j, -1, 1),
            _mixed_mult(n, k, 1, -1))


def ambient_triple(n: int) -> tuple[ColMat, ColMat, ColMat]:
    """Right multiplications (R_i, R_j, -R_k) on all of H^n.

    This is the unique triple invariant under the full sp(1) + sp(n); used by
    the flat and curved maximal models (their isotropy rotates any slotwise
    mixture out of the span).
    """
    i, j, k = IM_UNITS

    def right_mult(a: Quaternion, sign: int) -> ColMat:
        col: ColMat = {}
        for p in range(n):
            for u, unit in enumerate(UNITS):
                col[4 * p + u] = _quat_to_slot(p, (unit * a) * Fraction(sign))
        return col
    return right_mult(i, 1), right_mult(j, 1), right_mult(k, -1)


def metric_diag(n: int, c1, c2) -> list:
    return [c1 if idx < 4 else c2 for idx in range(4 * n)]


# --------------------------------------------------------------------------
# the nine invariant brackets
# --------------------------------------------------------------------------

def horizontal_brackets(n: int) -> dict[str, BilinearMap]:
    """Basis Theta, Psi1, Psi2, Upsilon1, Upsilon2 of the m-valued brackets."""
    dm = 4 * n
    theta: dict[tuple[int, int], SparseVec] = {}
    for p in range(1, n):
        for u in range(4):
            for v in range(u + 1, 4):
                val = (UNITS[u].conj() * UNITS[v]).im()
                vec = _quat_to_slot(0, val)
                if vec:
                    theta[(4 * p + u, 4 * p + v)] = vec
    psi1 = {(0, t): {t: Fraction(1)} for t in (1, 2, 3)}
    psi2 = {(0, 4 * p + u): {4 * p + u: Fraction(1)}
            for p in range(1, n) for u in range(4)}
    ups1: dict[tuple[int, int], SparseVec] = {}
    for a in range(1, 4):
        for b in range(a + 1, 4):
            val = (UNITS[a] * UNITS[b]) * 2
            vec = _quat_to_slot(0, val.im())
            if vec:
                ups1[(a, b)] = vec
    ups2: dict[tuple[int, int], SparseVec] = {}
    for a in range(1, 4):
        for p in range(1, n):
            for u in range(4):
                val = UNITS[u] * UNITS[a].conj()
                vec = _quat_to_slot(p, val)
                if vec:
                    ups2[(a, 4 * p + u)] = vec
    return {
        "Theta": BilinearMap(dm, dm, theta),
        "Psi1": BilinearMap(dm, dm, psi1),
        "Psi2": BilinearMap(dm, dm, psi2),
        "Upsilon1": BilinearMap(dm, dm, ups1),
        "Upsilon2": BilinearMap(dm, dm, ups2),
    }


def xi_operator(q1_slot: int, q1_unit: int, q2_slot: int, q2_unit: int,
                nloc: int) -> QMatrix:
    """Xi(q1, q2) = q2 q1^dagger - q1 q2^dagger as an (nloc x nloc) matrix."""
    u = UNITS[q1_unit]
    v = UNITS[q2_unit]
    ent = [[Quaternion() for _ in range(nloc)] for _ in range(nloc)]
    ent[q2_slot][q1_slot] = ent[q2_slot][q1_slot] + v * u.conj()
    ent[q1_slot][q2_slot] = ent[q1_slot][q2_slot] - u * v.conj()
    return QMatrix(ent)


def vertical_brackets(n: int) -> dict[str, BilinearMap]:
    """Basis ThetaV, Psi1V, Upsilon1V (sp(1)-valued) and Xi (sp(n-1)-valued)."""
    dm = 4 * n
    dh = 3 + (n - 1) * (2 * n - 1)
    hz = horizontal_brackets(n)

    def to_sp1(b: BilinearMap) -> BilinearMap:
        # horizontal values lie in Im(H) = indices 1..3; reindex onto A_i..A_k
        coeffs = {}
        for ij, col in b.coeffs.items():
            coeffs[ij] = {idx - 1: val for idx, val in col.items()}
        return BilinearMap(dm, dh, coeffs)

    xi: dict[tuple[int, int], SparseVec] = {}
    for p in range(1, n):
        for u in range(4):
            for q in range(p, n):
                for v in range(4):
                    if q == p and v <= u:
                        continue
                    mat = xi_operator(p - 1, u, q - 1, v, n - 1)
                    coords = sp_coordinates(mat, n - 1, 0)
                    col = {3 + t: c for t, c in enumerate(coords) if c}
                    if col:
                        xi[(4 * p + u, 4 * q + v)] = col
    return {
        "ThetaV": to_sp1(hz["Theta"]),
        "Psi1V": to_sp1(hz["Psi1"]),
        "Upsilon1V": to_sp1(hz["Upsilon1"]),
        "Xi": BilinearMap(dm, dh, xi),
    }


def bracket_from_params(n: int, alpha, beta1, beta2, gamma1, gamma2) -> BilinearMap:
    """B = alpha*Theta + beta1*Psi1 + beta2*Psi2 + gamma1*Upsilon1 + gamma2*Upsilon2."""
    hz = horizontal_brackets(n)
    out = BilinearMap.zero(4 * n, 4 * n)
    for coeff, name in zip((alpha, beta1, beta2, gamma1, gamma2), HORIZONTAL_NAMES):
        if coeff:
            out = out.add(hz[name].scale(coeff))
    return out


# --------------------------------------------------------------------------
# Jacobi families and normal forms
# --------------------------------------------------------------------------

JACOBI_EQUATIONS = None  # computed lazily, cached


def jacobi_equations() -> list[Poly]:
    """Canonical generators of the Jacobi obstruction (n fixed at 3).

    Cyclic-Jacobi components of B(alpha..gamma2) are collected, the span of
    the resulting quadratics is echelonized exactly over the monomial basis,
    and the reduced generators are returned monic.  The zero set is the
    union of the four parameter families.
    """
    global JACOBI_EQUATIONS
    if JACOBI_EQUATIONS is not None:
        return JACOBI_EQUATIONS
    b = bracket_from_params(3, *(Poly.var(v) for v in PARAM_NAMES))
    seen: dict = {}
    for comp in b.jacobiator().values():
        for val in comp.values():
            m = val.monic()
            seen[m.key()] = m
    monos = sorted({mono for p in seen.values() for mono in p.terms})
    midx = {mono: i for i, mono in enumerate(monos)}
    rows = []
    for p in seen.values():
        row = [Fraction(0)] * len(monos)
        for mono, c in p.terms.items():
            row[midx[mono]] = c
        rows.append(row)
    from .linalg import rref
    ech, _ = rref(rows)
    eqs = [Poly({monos[i]: c for i, c in enumerate(row) if c}).monic()
           for row in ech]
    JACOBI_EQUATIONS = sorted(eqs, key=lambda p: sorted(p.terms))
    return JACOBI_EQUATIONS


_FAMILY_CONDITIONS = {
    "F1": lambda a, b1, b2, g1, g2: b1 == 2 * b2 and g1 == 0 and g2 == 0,
    "F2": lambda a, b1, b2, g1, g2: a == 0 and g1 == 0 and g2 == 0,
    "F3": lambda a, b1, b2, g1, g2: a == 0 and b1 == 0 and g1 == g2,
    "F4": lambda a, b1, b2, g1, g2: a == 0 and b1 == 0 and g2 == 0,
}


def in_families(params) -> set[str]:
    p = tuple(Fraction(x) for x in params)
    return {name for name, cond in _FAMILY_CONDITIONS.items() if cond(*p)}


def violated_equations(params) -> list[Poly]:
    point = dict(zip(PARAM_NAMES, (Fraction(x) for x in params)))
    return [eq for eq in jacobi_equations() if eq.eval(point) != 0]


@dataclass(frozen=True)
class NormalForm:
    name: str                      # H1+, H1-, H2, H3, H4, H5, H6
    canonical: tuple               # normalized (alpha, beta1, beta2, gamma1, gamma2)
    beta: Fraction | None          # free parameter for H3, H5, H6
    s: Fraction
    t_sq: Fraction                 # the action only involves t^2, kept rational


def apply_scaling(params, s: Fraction, t_sq: Fraction) -> tuple:
    a, b1, b2, g1, g2 = (Fraction(x) for x in params)
    return (t_sq / s * a, s * b1, s * b2, s * g1, s * g2)


def normalize(params) -> NormalForm:
    """Table representative of the A_{s,t}-orbit of a non-flat Jacobi point.

    A_{s,t} sends (alpha, b1, b2, g1, g2) to (t^2 s^-1 alpha, s b1, s b2,
    s g1, s g2); only t^2 enters, so the witness is returned as (s, t^2).
    In the alpha != 0 family the sign of alpha*beta2 is an orbit invariant
    and splits H1 into H1+/H1-.
    """
    p = tuple(Fraction(x) for x in params)
    bad = violated_equations(p)
    if bad:
        raise ValueError("not a Lie bracket; violated: "
                         + ", ".join(str(e) for e in bad))
    a, b1, b2, g1, g2 = p
    if not any(p):
        raise ValueError("flat bracket (all parameters zero) is excluded")
    one = Fraction(1)
    if a != 0:
        if b2 != 0:
            s = 1 / b2
            sign = 1 if a * b2 > 0 else -1
            t_sq = Fraction(sign) * s / a
            name = "H1+" if sign > 0 else "H1-"
            canon = (Fraction(sign), Fraction(2), one, Fraction(0), Fraction(0))
            return NormalForm(name, canon, None, s, t_sq)
        # beta's vanish, so s is free up to the alpha slot; fix t^2 = 1, s = alpha
        return NormalForm("H2", (one, *(Fraction(0),) * 4), None, a, one)
    if g2 != 0:
        s = 1 / g1
        beta = b2 / g1
        return NormalForm("H6", (Fraction(0), Fraction(0), beta, one, one),
                          beta, s, one)
    if g1 != 0:
        s = 1 / g1
        beta = b2 / g1
        return NormalForm("H5", (Fraction(0), Fraction(0), beta, one, Fraction(0)),
                          beta, s, one)
    if b1 != 0:
        s = 2 / b1
        beta = 2 * b2 / b1
        return NormalForm("H3", (Fraction(0), Fraction(2), beta, Fraction(0), Fraction(0)),
                          beta, s, one)
    s = 1 / b2
    return NormalForm("H4", (Fraction(0), Fraction(0), one, Fraction(0), Fraction(0)),
                      None, s, one)


TABLE3_PARAMS = {
    "H1+": (1, 2, 1, 0, 0),
    "H1-": (-1, 2, 1, 0, 0),
    "H2": (1, 0, 0, 0, 0),
    "H3": ("beta",),  # (0, 2, beta, 0, 0)
    "H4": (0, 0, 1, 0, 0),
    "H5": ("beta",),  # (0, 0, beta, 1, 0)
}


def table3_tuple(name: str, beta: Fraction | None = None) -> tuple:
    if name in ("H1+", "H1-", "H2", "H4"):
        return tuple(Fraction(x) for x in TABLE3_PARAMS[name])
    if beta is None:
        raise ValueError(f"{name} needs a beta parameter")
    if name == "H3":
        return (Fraction(0), Fraction(2), Fraction(beta), Fraction(0), Fraction(0))
    if name == "H5":
        return (Fraction(0), Fraction(0), Fraction(beta), Fraction(1), Fraction(0))
    raise ValueError(f"unknown normal-form name {name}")


# --------------------------------------------------------------------------
# model specs and construction
# --------------------------------------------------------------------------

MODEL_KINDS = ("H1+", "H1-", "H2", "H3", "H4", "H5", "QHP", "QHH",
               "FlatMax", "MaxCurved", "TwistedTheta")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    n: int
    c1: Fraction = Fraction(1)
    c2: Fraction = Fraction(1)
    beta: Fraction | None = None
    c: Fraction | None = None  # MaxCurved bracket scale

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind in ("H3", "H5") and self.beta is None:
            raise ValueError(f"{self.kind} requires beta")
        if self.kind not in ("H3", "H5") and self.beta is not None:
            raise ValueError(f"{self.kind} takes no beta")
        if self.kind == "MaxCurved" and self.c is None:
            raise ValueError("MaxCurved requires c")
        if self.kind != "MaxCurved" and self.c is not None:
            raise ValueError(f"{self.kind} takes no c")
        if self.n < 2:
            raise ValueError("n >= 2 required")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("metric parameters must be positive")

    def to_string(self) -> str:
        parts = [self.kind]
        if self.beta is not None:
            parts.append(f"beta={_fmt(self.beta)}")
        if self.c is not None:
            parts.append(f"c={_fmt(self.c)}")
        parts.append(f"n={self.n}")
        parts.append(f"c1={_fmt(self.c1)}")
        parts.append(f"c2={_fmt(self.c2)}")
        return ":".join(parts)

    @staticmethod
    def parse(text: str) -> "ModelSpec":
        chunks = text.split(":")
        kind = chunks[0].strip()
        aliases = {"H1plus": "H1+", "H1minus": "H1-", "Twisted": "TwistedTheta"}
        kind = aliases.get(kind, kind)
        kwargs: dict = {"kind": kind, "n": 3}
        for chunk in chunks[1:]:
            key, _, val = chunk.partition("=")
            key = key.strip()
            val = val.strip()
            if key == "n":
                kwargs["n"] = int(val)
            elif key in ("c1", "c2", "beta", "c"):
                kwargs[key] = rat(val)
            else:
                raise ValueError(f"unknown spec field {key!r}")
        return ModelSpec(**kwargs)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass
class HomogeneousModel:
    """A reductive pair with chosen complement, brackets, triple and metric."""

    name: str
    spec: ModelSpec
    n: int
    g: LieAlgebra
    h_alg: LieAlgebra
    rho: Representation
    h_indices: list[int]
    m_indices: list[int]
    bracket_m: BilinearMap
    bracket_h: BilinearMap
    triple: tuple[ColMat, ColMat, ColMat]
    metric: list
    extras: dict = field(default_factory=dict)

    @property
    def dim_m(self) -> int:
        return len(self.m_indices)

    def metric_value(self, i: int):
        return self.metric[i]

    def with_metric(self, c1, c2) -> "HomogeneousModel":
        clone = HomogeneousModel(self.name, self.spec, self.n, self.g, self.h_alg,
                                 self.rho, self.h_indices, self.m_indices,
                                 self.bracket_m, self.bracket_h, self.triple,
                                 metric_diag(self.n, c1, c2), dict(self.extras))
        return clone


def verify_model(model: HomogeneousModel) -> None:
    """Exact checks of the structural invariants; raises on any failure."""
    dm = model.dim_m
    I, J, K = model.triple
    minus_id: ColMat = {c: {c: Fraction(-1)} for c in range(dm)}
    for A in (I, J, K):
        if not op_is_zero(op_sub(op_compose(A, A), minus_id)):
            raise AssertionError("triple element does not square to -Id")
    if not op_is_zero(op_sub(op_compose(I, J), K)):
        raise AssertionError("I J != K")
    G = model.metric
    for A in (I, J, K):
        for c, col in A.items():
            for r, v in col.items():
                if G[r] * v + G[c] * A.get(r, {}).get(c, 0) != 0:
                    raise AssertionError("metric is not Hermitian for the triple")
    triple_span = SpanBasis()
    for A in (I, J, K):
        triple_span.add(_flatten_op(A, dm))
    for g in range(model.rho.algebra.dim):
        mat = model.rho.mats[g]
        for c, col in mat.items():
            for r, v in col.items():
                if G[r] * v + G[c] * mat.get(r, {}).get(c, 0) != 0:
                    raise AssertionError("metric is not isotropy invariant")
        for A in (I, J, K):
            comm = op_sub(op_compose(mat, A), op_compose(A, mat))
            if not triple_span.contains(_flatten_op(comm, dm)):
                raise AssertionError("triple span is not isotropy invariant")
    if not model.g.verified:
        raise AssertionError("ambient algebra not Jacobi-verified")


def _flatten_op(op: ColMat, dim: int) -> SparseVec:
    return {c * dim + r: v for c, col in op.items() for r, v in col.items()}


def _restrict_rep(rep: Representation, sub: LieAlgebra, gens: list[int]) -> Representation:
    return Representation(sub, rep.dim, [rep.mats[g] for g in gens], check=True)


def build_model(spec: ModelSpec) -> HomogeneousModel:
    n = spec.n
    if spec.kind in ("H1+", "H1-", "H2", "H3", "H4", "H5"):
        h, rho, _ = isotropy_rep(n)
        params = table3_tuple(spec.kind, spec.beta)
        b = bracket_from_params(n, *params)
        g = semidirect(h, rho, b, None)
        dh = h.dim
        model = HomogeneousModel(
            spec.kind, spec, n, g, h, rho,
            list(range(dh)), list(range(dh, dh + 4 * n)),
            b, BilinearMap.zero(4 * n, h.dim),
            quaternionic_triple(n), metric_diag(n, spec.c1, spec.c2),
            extras={"params": params})
        verify_model(model)
        return model
    if spec.kind in ("QHP", "QHH"):
        return _build_reductive_model(spec)
    if spec.kind == "FlatMax":
        k, rho_k, _ = ambient_rep(n)
        g = semidirect(k, rho_k, None, None)
        model = HomogeneousModel(
            "FlatMax", spec, n, g, k, rho_k,
            list(range(k.dim)), list(range(k.dim, k.dim + 4 * n)),
            BilinearMap.zero(4 * n, 4 * n), BilinearMap.zero(4 * n, k.dim),
            ambient_triple(n), metric_diag(n, spec.c1, spec.c2))
        verify_model(model)
        return model
    if spec.kind == "MaxCurved":
        k, rho_k, _ = ambient_rep(n)
        b_k = maximal_vertical_bracket(n, 2 * spec.c, spec.c)
        g = semidirect(k, rho_k, None, b_k)
        model = HomogeneousModel(
            "MaxCurved", spec, n, g, k, rho_k,
            list(range(k.dim)), list(range(k.dim, k.dim + 4 * n)),
            BilinearMap.zero(4 * n, 4 * n), b_k,
            ambient_triple(n), metric_diag(n, spec.c1, spec.c2))
        verify_model(model)
        return model
    if spec.kind == "TwistedTheta":
        return _build_twisted_model(spec)
    raise ValueError(f"unhandled kind {spec.kind}")


def maximal_vertical_bracket(n: int, c_theta, c_xi) -> BilinearMap:
    """c_theta * Theta + c_xi * Xi on all of H^n, valued in k = sp(1) + sp(n).

    Im(H) is identified with the sp(1) ideal via v -> -S_v, the sign fixed so
    that the Jacobi identity closes exactly on the c_theta = 2 c_xi locus.
    """
    dm = 4 * n
    dk = 3 + n * (2 * n + 1)
    coeffs: dict[tuple[int, int], SparseVec] = {}
    for p in range(n):
        for u in range(4):
            for q in range(p, n):
                for v in range(4):
                    if q == p and v <= u:
                        continue
                    col: SparseVec = {}
                    if p == q:
                        th = (UNITS[u].conj() * UNITS[v]).im()
                        for t, comp in enumerate((th.b, th.c, th.d)):
                            if comp:
                                col[t] = -c_theta * comp
                    xi = xi_operator(p, u, q, v, n)
                    for t, comp in enumerate(sp_coordinates(xi, n, 0)):
                        if comp:
                            col[3 + t] = col.get(3 + t, 0) + c_xi * comp
                    col = {k2: v2 for k2, v2 in col.items() if v2}
                    if col:
                        coeffs[(4 * p + u, 4 * q + v)] = col
    return BilinearMap(dm, dk, coeffs)


def _build_reductive_model(spec: ModelSpec) -> HomogeneousModel:
    """g = H + sp(n) (QHP) or H + sp(1, n-1) (QHH), h embedded diagonally.

    The complement m is R*(1,0) + the anti-diagonal Im(H) + the first-row
    block, with the block coordinates conjugated so the isotropy action on m
    agrees entry-for-entry with the standard representation.
    """
    n = spec.n
    pq = (n, 0) if spec.kind == "QHP" else (1, n - 1)
    spb = sp_basis(*pq)
    nsp = len(spb)
    dg = 4 + nsp
    brackets: dict[tuple[int, int], SparseVec] = {}
    for a in range(1, 4):
        for b in range(a + 1, 4):
            comm = UNITS[a] * UNITS[b] - UNITS[b] * UNITS[a]
            col = _im_to_coords(comm, 1)
            if col:
                brackets[(a, b)] = col
    brackets.update(_sp_block_brackets(*pq, 4))
    g_old = LieAlgebra(dg, brackets)
    if not g_old.verify_jacobi():
        raise AssertionError("reductive ambient algebra fails Jacobi")

    def sp_index(coords_matrix: QMatrix) -> SparseVec:
        return {4 + t: c for t, c in
                enumerate(sp_coordinates(coords_matrix, *pq)) if c}

    # change of basis: h-part then m-part
    cols: list[SparseVec] = []
    for a in range(1, 4):  # A_a = a_H + a E_11
        vec = {a: Fraction(1)}
        e11 = QMatrix.from_entry(n, n, 0, 0, UNITS[a])
        vec = sv_add_scaled(vec, sp_index(e11), 1)
        cols.append(vec)
    lower: list[SparseVec] = []
    for s in range(1, n):
        for a in IM_UNITS:
            lower.append(sp_index(QMatrix.from_entry(n, n, s, s, a)))
    for s in range(1, n):  # -eta_s eta_t = -1 in both signatures on this block
        for t in range(s + 1, n):
            for a in UNITS:
                ent = [[Quaternion() for _ in range(n)] for _ in range(n)]
                ent[s][t] = a
                ent[t][s] = a.conj() * Fraction(-1)
                lower.append(sp_index(QMatrix(ent)))
    cols.extend(lower)
    dh = 3 + len(lower)
    cols.append({0: Fraction(1)})  # m_0 = real quaternion unit
    for a in range(1, 4):  # anti-diagonal Im(H)
        vec = {a: Fraction(1)}
        e11 = QMatrix.from_entry(n, n, 0, 0, UNITS[a])
        vec = sv_add_scaled(vec, sp_index(e11), -1)
        cols.append(vec)
    first_row_sign = -1 if spec.kind == "QHP" else 1  # -eta_0 eta_t
    for t in range(1, n):
        for u in range(4):  # standard coordinate (t, u), block entries conjugated
            q = UNITS[u].conj()
            ent = [[Quaternion() for _ in range(n)] for _ in range(n)]
            ent[0][t] = q
            ent[t][0] = q.conj() * Fraction(first_row_sign)
            cols.append(sp_index(QMatrix(ent)))
    if len(cols) != dg:
        raise AssertionError("basis count mismatch")

    p_mat = [[Fraction(0)] * dg for _ in range(dg)]
    for c, vec in enumerate(cols):
        for r, v in vec.items():
            p_mat[r][c] = v
    p_inv = invert(p_mat)

    def to_new(vec: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for r, v in vec.items():
            for i in range(dg):
                x = p_inv[i][r]
                if x:
                    t = out.get(i, 0) + x * v
                    if t:
                        out[i] = t
                    else:
                        out.pop(i, None)
        return out

    new_brackets: dict[tuple[int, int], SparseVec] = {}
    for i in range(dg):
        for j in range(i + 1, dg):
            img = to_new(g_old.bracket(cols[i], cols[j]))
            if img:
                new_brackets[(i, j)] = img
    g_new = LieAlgebra(dg, new_brackets)
    if not g_new.verify_jacobi():
        raise AssertionError("conjugated algebra fails Jacobi")

    h_idx = list(range(dh))
    m_idx = list(range(dh, dg))
    h_sub, rho, b_m, b_h = split_reductive(g_new, h_idx, m_idx)
    h_std, rho_std, _ = isotropy_rep(n)
    if h_sub.brackets != h_std.brackets:
        raise AssertionError("isotropy structure constants do not match the standard ones")
    for g1, g2 in zip(rho.mats, rho_std.mats):
        if not op_is_zero(op_sub(g1, g2)):
            raise AssertionError("isotropy action on m is not the standard one")
    model = HomogeneousModel(
        spec.kind, spec, n, g_new, h_sub, rho, h_idx, m_idx, b_m, b_h,
        quaternionic_triple(n), metric_diag(n, spec.c1, spec.c2))
    verify_model(model)
    return model


def split_reductive(g: LieAlgebra, h_idx: list[int], m_idx: list[int]):
    """Extract (h, rho, bracket_m, bracket_h) from a reductive decomposition."""
    dh, dm = len(h_idx), len(m_idx)
    pos_h = {v: i for i, v in enumerate(h_idx)}
    pos_m = {v: i for i, v in enumerate(m_idx)}
    hb: dict[tuple[int, int], SparseVec] = {}
    for a in range(dh):
        for b in range(a + 1, dh):
            img = g.bracket_basis(h_idx[a], h_idx[b])
            if any(k not in pos_h for k in img):
                raise AssertionError("h is not a subalgebra")
            if img:
                hb[(a, b)] = {pos_h[k]: v for k, v in img.items()}
    h_sub = LieAlgebra(dh, hb, verified=True)
    mats: list[ColMat] = []
    for a in range(dh):
        col: ColMat = {}
        for b in range(dm):
            img = g.bracket_basis(h_idx[a], m_idx[b])
            if any(k not in pos_m for k in img):
                raise AssertionError("complement is not rho-invariant")
            if img:
                col[b] = {pos_m[k]: v for k, v in img.items()}
        mats.append(col)
    rho = Representation(h_sub, dm, mats, check=True)
    bm: dict[tuple[int, int], SparseVec] = {}
    bh: dict[tuple[int, int], SparseVec] = {}
    for a in range(dm):
        for b in range(a + 1, dm):
            img = g.bracket_basis(m_idx[a], m_idx[b])
            mpart = {pos_m[k]: v for k, v in img.items() if k in pos_m}
            hpart = {pos_h[k]: v for k, v in img.items() if k in pos_h}
            if len(mpart) + len(hpart) != len(img):
                raise AssertionError("bracket leaves h + m")
            if mpart:
                bm[(a, b)] = mpart
            if hpart:
                bh[(a, b)] = hpart
    return h_sub, rho, BilinearMap(dm, dm, bm), BilinearMap(dm, dh, bh)


# --------------------------------------------------------------------------
# twisted model
# --------------------------------------------------------------------------

def twisted_theta(n: int, variant: str) -> BilinearMap:
    """Theta twisted by the complex structure I.

    variant 'output': (x, y) -> I(Theta(x, y));
    variant 'conjugate': (x, y) -> I(Theta(I x, I y)) (= I Theta I^{-1} up to
    the bilinear sign, since I^{-1} = -I).
    """
    I, _, _ = quaternionic_triple(n)
    theta = horizontal_brackets(n)["Theta"]
    coeffs: dict[tuple[int, int], SparseVec] = {}
    if variant == "output":
        for ij, col in theta.coeffs.items():
            img = op_apply(I, col)
            if img:
                coeffs[ij] = img
        return BilinearMap(4 * n, 4 * n, coeffs)
    if variant != "conjugate":
        raise ValueError("variant must be 'output' or 'conjugate'")
    dm = 4 * n
    out = BilinearMap.zero(dm, dm)
    basis = [{i: Fraction(1)} for i in range(dm)]
    coeffs = {}
    for i in range(dm):
        for j in range(i + 1, dm):
            val = theta.apply(op_apply(I, basis[i]), op_apply(I, basis[j]))
            img = op_apply(I, val)
            if img:
                coeffs[(i, j)] = img
    return BilinearMap(dm, dm, coeffs)


def centralizer_subalgebra(n: int):
    """Z_h(I) = so(2) + sp(n-1): the A_i axis plus the sp(n-1) block."""
    h, rho, _ = isotropy_rep(n)
    gens = [0] + list(range(3, h.dim))
    pos = {g: i for i, g in enumerate(gens)}
    sub_br: dict[tuple[int, int], SparseVec] = {}
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            img = h.bracket_basis(gens[a], gens[b])
            if any(k not in pos for k in img):
                raise AssertionError("centralizer candidate is not a subalgebra")
            if img:
                sub_br[(a, b)] = {pos[k]: v for k, v in img.items()}
    z = LieAlgebra(len(gens), sub_br, verified=True)
    rho_z = _restrict_rep(rho, z, gens)
    return z, rho_z, h, rho, gens


def _build_twisted_model(spec: ModelSpec) -> HomogeneousModel:
    n = spec.n
    z, rho_z, h, rho, gens = centralizer_subalgebra(n)
    chosen = None
    for variant in ("output", "conjugate"):
        b = twisted_theta(n, variant)
        if not is_equivariant(b, rho_z, rho_z.mats):
            continue  # must be Z-equivariant
        if is_equivariant(b, rho, rho.mats):
            continue  # must NOT be equivariant under all of h
        chosen = (variant, b)
        break
    if chosen is None:
        raise AssertionError("no twisted variant passed the symmetry protocol")
    variant, b = chosen
    g = semidirect(z, rho_z, b, None)
    model = HomogeneousModel(
        "TwistedTheta", spec, n, g, z, rho_z,
        list(range(z.dim)), list(range(z.dim, z.dim + 4 * n)),
        b, BilinearMap.zero(4 * n, z.dim),
        quaternionic_triple(n), metric_diag(n, spec.c1, spec.c2),
        extras={"twist_variant": variant, "centralizer_gens": gens})
    verify_model(model)
    return model


# --------------------------------------------------------------------------
# solvers specialised to the isotropy setting
# --------------------------------------------------------------------------

def rotation_matrix(q: Quaternion) -> list[list[Fraction]]:
    """Exact SO(3) matrix of v -> q v conj(q)/|q|^2 on (i, j, k) coordinates."""
    nsq = q.norm_sq()
    if not nsq:
        raise ValueError("rotation quaternion must be nonzero")
    cols = [(q * u * q.conj()) * (1 / nsq) for u in IM_UNITS]
    return [[col.components()[1 + r] for col in cols] for r in range(3)]


def rotated_triple(triple: tuple[ColMat, ColMat, ColMat],
                   q: Quaternion) -> tuple[ColMat, ColMat, ColMat]:
    """The triple rotated by an exact SO(3) element (unit-quaternion image).

    A rotation mixes (I, J, K) linearly and preserves the quaternion
    relations; Omega must be invariant under every such change of adapted
    frame.
    """
    rot = rotation_matrix(q)
    out = []
    for a in range(3):
        acc: ColMat = {}
        for b in range(3):
            s = rot[b][a]
            if not s:
                continue
            for c, col in triple[b].items():
                cur = acc.setdefault(c, {})
                for r, v in col.items():
                    t = cur.get(r, 0) + s * v
                    if t:
                        cur[r] = t
                    else:
                        cur.pop(r, None)
        out.append({c: col for c, col in acc.items() if col})
    return tuple(out)


def symbolic_model(kind: str, n: int) -> HomogeneousModel:
    """Model with symbolic metric (c1, c2) and, for H3/H5, symbolic beta2.

    Used by the class-coefficient computation; Hodge-dependent geometry
    requires rational points and is not available on these models.
    """
    c1, c2 = Poly.var("c1"), Poly.var("c2")
    if kind in ("H1+", "H1-", "H2", "H4"):
        params = table3_tuple(kind)
    elif kind == "H3":
        params = (Fraction(0), Fraction(2), Poly.var("beta2"), Fraction(0), Fraction(0))
    elif kind == "H5":
        params = (Fraction(0), Fraction(0), Poly.var("beta2"), Fraction(1), Fraction(0))
    elif kind in ("QHP", "QHH"):
        base = build_model(ModelSpec(kind, n))
        model = base.with_metric(c1, c2)
        model.extras["symbolic"] = True
        return model
    else:
        raise ValueError(f"no symbolic construction for {kind}")
    h, rho, _ = isotropy_rep(n)
    b = bracket_from_params(n, *params)
    g = semidirect(h, rho, b, None)
    dh = h.dim
    model = HomogeneousModel(
        kind, ModelSpec(kind if kind not in ("H3", "H5") else kind, n,
                        beta=Fraction(0) if kind in ("H3", "H5") else None),
        n, g, h, rho, list(range(dh)), list(range(dh, dh + 4 * n)),
        b, BilinearMap.zero(4 * n, h.dim), quaternionic_triple(n),
        metric_diag(n, c1, c2), extras={"symbolic": True, "params": params})
    verify_model(model)
    return model


def bracket_space_dims(n: int) -> tuple[int, int]:
    """(horizontal, vertical) dimensions of the invariant-bracket space."""
    h, rho, order = isotropy_rep(n)
    lam2 = rho.exterior_power(2)
    horizontal = equivariant_hom(lam2, rho, order=order)
    vertical = equivariant_hom(lam2, h.adjoint(), order=order)
    return len(horizontal), len(vertical)


def inadmissible_hom_dim(n: int, which: str) -> int:
    """dim of equivariant maps Lambda^2 H^n -> H^n for a Cartan-torus isotropy.

    which = 'sp1' uses the Cartan direction of the sp(1) ideal, 'spn' the
    diagonal torus of sp(n).
    """
    k, rho_k, _ = ambient_rep(n)
    if which == "sp1":
        gens = [0]
    elif which == "spn":
        gens = [3 + 3 * s for s in range(n)]
    else:
        raise ValueError("which must be 'sp1' or 'spn'")
    sub = LieAlgebra(len(gens), {}, verified=True)  # tori are abelian
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            if k.bracket_basis(gens[a], gens[b]):
                raise AssertionError("torus generators do not commute")
    rho_sub = _restrict_rep(rho_k, sub, gens)
    lam2 = rho_sub.exterior_power(2)
    return len(equivariant_hom(lam2, rho_sub))


def maxmodel_jacobi_holds(n: int, c_theta: Fraction, c_xi: Fraction) -> bool:
    """Jacobi for the bracket c_theta*Theta + c_xi*Xi on m = H^n (full algebra)."""
    k, rho_k, _ = ambient_rep(n)
    b_k = maximal_vertical_bracket(n, c_theta, c_xi)
    try:
        semidirect(k, rho_k, None, b_k)
        return True
    except ValueError:
        return False
