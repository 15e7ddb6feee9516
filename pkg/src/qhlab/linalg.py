"""Exact linear algebra over the rationals.

Two layers:

* dense rows of Fractions, eliminated fraction-free (Bareiss) after clearing
  denominators -- used for small systems (Jacobi families, curvature solves,
  dual bases);
* sparse dict-vectors with a component-splitting nullspace -- used for the
  large equivariance / invariance kernels, where constraint rows touch only
  a handful of unknowns each.

Every public routine returns exact results; callers are expected to verify
kernels post hoc (A.v == 0) where correctness matters.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

SparseVec = dict[int, Fraction]

_DENSE_COMPONENT_LIMIT = 48


# --------------------------------------------------------------------------
# dense exact elimination
# --------------------------------------------------------------------------

def clear_denominators(row: list[Fraction]) -> list[int]:
    lcm = 1
    for x in row:
        d = Fraction(x).denominator
        lcm = lcm // gcd(lcm, d) * d
    return [int(Fraction(x) * lcm) for x in row]


def bareiss_echelon(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns (echelon_rows, pivot_cols); input is consumed (copies are cheap
    at the sizes this is used for).
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    piv_cols: list[int] = []
    r = 0
    prev = 1
    for c in range(ncols):
        sel = None
        for i in range(r, len(m)):
            if m[i][c]:
                if sel is None or abs(m[i][c]) < abs(m[sel][c]):
                    sel = i
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        piv = m[r][c]
        for i in range(r + 1, len(m)):
            if not any(m[i][c:]):
                continue
            fi = m[i][c]
            for j in range(c, ncols):
                m[i][j] = (m[i][j] * piv - fi * m[r][j]) // prev
        prev = piv
        piv_cols.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], piv_cols


def rank(rows: list[list[Fraction]]) -> int:
    ints = [clear_denominators(r) for r in rows]
    _, piv = bareiss_echelon(ints)
    return len(piv)


def nullspace(rows: list[list[Fraction]], ncols: int | None = None) -> list[list[Fraction]]:
    """Exact kernel basis, one vector per free column (echelonized)."""
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for empty row list")
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(ncols)]
                for j in range(ncols)]
    ints = [clear_denominators(r) for r in rows]
    ech, piv_cols = bareiss_echelon(ints)
    piv_set = set(piv_cols)
    free_cols = [c for c in range(ncols) if c not in piv_set]
    basis = []
    for f in free_cols:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        # back-substitute pivot variables from the bottom up
        for r in range(len(ech) - 1, -1, -1):
            c = piv_cols[r]
            s = Fraction(0)
            for j in range(c + 1, ncols):
                if ech[r][j] and v[j]:
                    s += ech[r][j] * v[j]
            v[c] = -s / ech[r][c]
        basis.append(v)
    return basis


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Fraction (Gauss-Jordan)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    piv_cols: list[int] = []
    r = 0
    for c in range(ncols):
        sel = next((i for i in range(r, len(m)) if m[i][c]), None)
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], piv_cols


def solve(a_rows: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """One exact solution of A x = b, or None when inconsistent."""
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a_rows, b)]
    ncols = len(a_rows[0])
    ech, piv = rref(aug)
    x = [Fraction(0)] * ncols
    for r, c in enumerate(piv):
        if c == ncols:
            return None
        x[c] = ech[r][ncols]
    return x


def invert(a_rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a_rows)
    aug = [[Fraction(a_rows[i][j]) for j in range(n)]
           + [Fraction(1) if j == i else Fraction(0) for j in range(n)]
           for i in range(n)]
    ech, piv = rref(aug)
    if piv != list(range(n)):
        raise ValueError("matrix not invertible")
    return [row[n:] for row in ech]


# --------------------------------------------------------------------------
# sparse vectors
# --------------------------------------------------------------------------

def sv_add_scaled(a: SparseVec, b: SparseVec, s) -> SparseVec:
    """a + s*b as a new sparse vector."""
    if not s:
        return dict(a)
    out = dict(a)
    for k, v in b.items():
        t = out.get(k, 0) + s * v
        if t:
            out[k] = t
        else:
            out.pop(k, None)
    return out


def sv_scale(a: SparseVec, s) -> SparseVec:
    if not s:
        return {}
    return {k: v * s for k, v in a.items()}


def sv_primitive(a: SparseVec) -> SparseVec:
    """Integer-primitive rescaling with positive leading entry (canonical)."""
    if not a:
        return {}
    lcm = 1
    for v in a.values():
        d = v.denominator
        lcm = lcm // gcd(lcm, d) * d
    ints = {k: int(v * lcm) for k, v in a.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, abs(v))
    lead = min(ints)
    sign = -1 if ints[lead] < 0 else 1
    return {k: Fraction(v, sign * g) for k, v in ints.items()}


def _union_find_components(rows: list[SparseVec]) -> dict[int, list[SparseVec]]:
    """Group rows by the connected component of the columns they touch."""
    parent: dict[int, int] = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for row in rows:
        cols = list(row)
        for c in cols:
            parent.setdefault(c, c)
        for c in cols[1:]:
            union(cols[0], c)
    groups: dict[int, list[SparseVec]] = {}
    for row in rows:
        root = find(next(iter(row)))
        groups.setdefault(root, []).append(row)
    return groups


def _component_nullspace_dense(rows: list[SparseVec], cols: list[int]) -> list[SparseVec]:
    local = {c: i for i, c in enumerate(cols)}
    dense = [[Fraction(0)] * len(cols) for _ in rows]
    for r, row in enumerate(rows):
        for c, v in row.items():
            dense[r][local[c]] = v
    return [{cols[i]: v for i, v in enumerate(vec) if v}
            for vec in nullspace(dense, len(cols))]


def _component_nullspace_sparse(rows: list[SparseVec], cols: list[int]) -> list[SparseVec]:
    """Sparse Gauss-Jordan; pivot rows kept fully reduced for easy extraction."""
    pivots: dict[int, SparseVec] = {}
    usage: dict[int, set[int]] = {}  # col -> pivot cols whose row touches col

    def register(pc: int, row: SparseVec):
        pivots[pc] = row
        for c in row:
            usage.setdefault(c, set()).add(pc)

    def unregister(pc: int, row: SparseVec):
        for c in row:
            usage.get(c, set()).discard(pc)

    for row in sorted(rows, key=lambda r: (len(r), min(r))):
        row = dict(row)
        while True:
            hit = None
            for c in row:
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            row = sv_add_scaled(row, pivots[hit], -row[hit])
        if not row:
            continue
        pc = min(row)
        inv = Fraction(1) / row[pc]
        row = {c: v * inv for c, v in row.items()}
        for opc in list(usage.get(pc, ())):
            prow = pivots[opc]
            unregister(opc, prow)
            prow = sv_add_scaled(prow, row, -prow[pc])
            register(opc, prow)
        register(pc, row)

    piv_set = set(pivots)
    basis = []
    for f in cols:
        if f in piv_set:
            continue
        v: SparseVec = {f: Fraction(1)}
        for pc in usage.get(f, ()):
            v[pc] = -pivots[pc][f]
        basis.append(v)
    return basis


def sparse_nullspace(rows: list[SparseVec], ncols: int) -> list[SparseVec]:
    """Exact kernel basis of the sparse homogeneous system rows . x = 0.

    The column-interaction graph is split into connected components, each
    solved independently (dense below a size threshold, sparse Gauss-Jordan
    above it).  Columns untouched by any row contribute unit kernel vectors.
    """
    rows = [r for r in rows if r]
    touched: set[int] = set()
    for r in rows:
        touched.update(r)
    basis: list[SparseVec] = [{c: Fraction(1)} for c in range(ncols) if c not in touched]
    for _, comp_rows in sorted(_union_find_components(rows).items()):
        cols = sorted({c for row in comp_rows for c in row})
        if len(cols) <= _DENSE_COMPONENT_LIMIT:
            basis.extend(_component_nullspace_dense(comp_rows, cols))
        else:
            basis.extend(_component_nullspace_sparse(comp_rows, cols))
    basis = [sv_primitive(v) for v in basis]
    basis.sort(key=lambda v: min(v))
    return basis
