"""Exact linear algebra over Q(i): elimination, kernels, and similarity invariants."""

from __future__ import annotations

from typing import Sequence

from .gaussian import QI

__all__ = [
    "Matrix",
    "as_matrix",
    "identity",
    "zeros",
    "matmul",
    "determinant",
    "inverse",
    "rank",
    "nullity",
    "block_diag",
    "intertwiner_dim",
    "invariant_factors",
    "rational_canonical_form",
    "similar",
]

Matrix = list[list[QI]]


def _q(x) -> QI:
    return QI.coerce(x)


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = [[_q(x) for x in row] for row in rows]
    if any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def identity(n: int) -> Matrix:
    return [[QI(1) if i == j else QI(0) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[QI(0)] * c for _ in range(r)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        for k in range(inner):
            x = row[k]
            if not x:
                continue
            bk = b[k]
            for j in range(cols):
                if bk[j]:
                    out[i][j] = out[i][j] + x * bk[j]
    return out


def _echelon(m: Matrix) -> tuple[Matrix, list[int], QI]:
    """Row echelon form, pivot columns, and the determinant factor."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    pivots: list[int] = []
    det = QI(1)
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c]), None)
        if p is None:
            det = QI(0)
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            det = -det
        piv = a[r][c]
        det = det * piv
        inv = piv.inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots, det


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    return len(_echelon(m)[1])


def nullity(m: Matrix) -> int:
    return (len(m[0]) if m else 0) - rank(m)


def determinant(m: Matrix) -> QI:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return QI(1)
    _, pivots, det = _echelon(m)
    return det if len(pivots) == n else QI(0)


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [row[:] + ident for row, ident in zip(m, identity(n))]
    red, pivots, _ = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def intertwiner_dim(t1: Matrix, t2: Matrix) -> int:
    """``dim {X : t2 X = X t1}`` with X of shape (len(t2), len(t1))."""
    r1, r2 = len(t1), len(t2)
    if r1 == 0 or r2 == 0:
        return 0
    eqs = []
    # unknown X[a][b] sits at column a*r1 + b
    for a in range(r2):
        for b in range(r1):
            row = [QI(0)] * (r1 * r2)
            for c in range(r2):
                if t2[a][c]:
                    row[c * r1 + b] = row[c * r1 + b] + t2[a][c]
            for c in range(r1):
                if t1[c][b]:
                    row[a * r1 + c] = row[a * r1 + c] - t1[c][b]
            eqs.append(row)
    return r1 * r2 - rank(eqs)


# --------------------------------------------------------------------------
# polynomials over Q(i), coefficient lists low -> high, no trailing zeros

Poly = list[QI]


def _trim(p: Poly) -> Poly:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _deg(p: Poly) -> int:
    return len(p) - 1


def _padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else QI(0)) + (q[i] if i < len(q) else QI(0)) for i in range(n)])


def _pscale(p: Poly, c: QI) -> Poly:
    return _trim([c * x for x in p])


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [QI(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] = out[i + j] + a * b
    return _trim(out)


def _pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim(p)
    quo = [QI(0)] * max(len(r) - len(q) + 1, 0)
    lead_inv = q[-1].inverse()
    while r and len(r) >= len(q):
        shift = len(r) - len(q)
        c = r[-1] * lead_inv
        quo[shift] = c
        r = _padd(r, _pscale([QI(0)] * shift + q, -c))
    return _trim(quo), r


def _monic(p: Poly) -> Poly:
    p = _trim(p)
    return _pscale(p, p[-1].inverse()) if p else p


def invariant_factors(t: Matrix) -> list[Poly]:
    """Monic invariant factors of ``t`` (Smith form of ``xI - t``), non-unit ones only,
    in divisibility order."""
    n = len(t)
    a: list[list[Poly]] = [[_trim([-t[i][j]] + ([QI(1)] if i == j else [])) for j in range(n)]
                           for i in range(n)]
    diag: list[Poly] = []
    for k in range(n):
        while True:
            entries = [(i, j) for i in range(k, n) for j in range(k, n) if a[i][j]]
            if not entries:
                diag.extend([[]] * (n - k))
                break
            i0, j0 = min(entries, key=lambda ij: _deg(a[ij[0]][ij[1]]))
            a[k], a[i0] = a[i0], a[k]
            for row in a:
                row[k], row[j0] = row[j0], row[k]
            piv = a[k][k]
            clean = True
            for i in range(k + 1, n):
                if a[i][k]:
                    qt, rm = _pdivmod(a[i][k], piv)
                    a[i] = [_padd(x, _pscale(_pmul(qt, y), QI(-1))) for x, y in zip(a[i], a[k])]
                    if rm:
                        clean = False
            for j in range(k + 1, n):
                if a[k][j]:
                    qt, rm = _pdivmod(a[k][j], piv)
                    for i in range(n):
                        a[i][j] = _padd(a[i][j], _pscale(_pmul(qt, a[i][k]), QI(-1)))
                    if rm:
                        clean = False
            if not clean:
                continue
            # divisibility: fold any offending row into row k and retry
            bad = next((i for i in range(k + 1, n) for j in range(k + 1, n)
                        if a[i][j] and _pdivmod(a[i][j], piv)[1]), None)
            if bad is not None:
                a[k] = [_padd(x, y) for x, y in zip(a[k], a[bad])]
                continue
            diag.append(_monic(piv))
            break
        if len(diag) == n:
            break
    return [d for d in diag if _deg(d) > 0]


def _companion(p: Poly) -> Matrix:
    d = _deg(p)
    c = zeros(d, d)
    for i in range(1, d):
        c[i][i - 1] = QI(1)
    for i in range(d):
        c[i][d - 1] = -p[i]
    return c


def rational_canonical_form(t: Matrix) -> Matrix:
    """Block diagonal of companion matrices of the invariant factors."""
    return block_diag([_companion(p) for p in invariant_factors(t)])


def similar(t1: Matrix, t2: Matrix) -> bool:
    if len(t1) != len(t2):
        return False
    return invariant_factors(t1) == invariant_factors(t2)
