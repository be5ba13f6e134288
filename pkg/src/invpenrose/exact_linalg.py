"""Exact linear algebra kernels.

``bareiss_inverse`` runs fraction-free Gauss-Jordan elimination over the
polynomial ring; every division in it is exact.  ``nullspace`` and
``solve_rows`` do sparse elimination over the Gaussian rationals.
"""

from __future__ import annotations

from typing import Sequence

from .coeff_ring import C0, C1, Polynomial, cinv, cmul


class SingularMatrixError(ArithmeticError):
    pass


def bareiss_inverse(m: Sequence[Sequence[Polynomial]]) -> tuple[Polynomial, list[list[Polynomial]]]:
    """Return ``(d, R)`` with ``m^{-1} = R / d`` and ``d = +-det(m)``."""
    size = len(m)
    if not size or any(len(row) != size for row in m):
        raise ValueError("square matrix required")
    lay = m[0][0].layout
    one = Polynomial.const(lay, 1)
    zero = Polynomial.zero(lay)
    a = [list(row) + [one if i == j else zero for j in range(size)] for i, row in enumerate(m)]
    width = 2 * size
    prev = one
    for k in range(size):
        piv = next((r for r in range(k, size) if a[r][k].terms), None)
        if piv is None:
            raise SingularMatrixError(f"no pivot in column {k}")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        akk = a[k][k]
        rowk = a[k]
        for i in range(size):
            if i == k:
                continue
            rowi = a[i]
            aik = rowi[k]
            new = []
            for j in range(width):
                if j == k:
                    new.append(zero)
                    continue
                t = akk * rowi[j]
                if aik.terms and rowk[j].terms:
                    t = t - aik * rowk[j]
                if prev is not one:
                    q = t.divexact(prev)
                    if q is None:
                        raise ArithmeticError("fraction-free step produced an inexact division")
                    t = q
                new.append(t)
            a[i] = new
        prev = akk
    d = a[0][0]
    for i in range(size):
        if a[i][i] != d:
            raise ArithmeticError("fraction-free elimination did not reach a scalar diagonal")
    return d, [row[size:] for row in a]


def matmul(a: Sequence[Sequence[Polynomial]], b: Sequence[Sequence[Polynomial]]) -> list[list[Polynomial]]:
    lay = a[0][0].layout
    out = []
    for row in a:
        out_row = []
        for j in range(len(b[0])):
            acc = Polynomial.zero(lay)
            for k, x in enumerate(row):
                if x.terms and b[k][j].terms:
                    acc = acc + x * b[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


# --------------------------------------------------------------------------
# sparse elimination over Q(i); rows are {column: (re, im)}


def _row_axpy(target: dict, factor: tuple, src: dict) -> None:
    fr, fi = factor
    for c, (sr, si) in src.items():
        dr = fr * sr - fi * si
        di = fr * si + fi * sr
        old = target.get(c)
        if old is None:
            target[c] = (dr, di)
        else:
            s = (old[0] + dr, old[1] + di)
            if s[0] or s[1]:
                target[c] = s
            else:
                del target[c]


def rref(rows: list[dict]) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form; returns (rows, pivot columns), pivots ascending."""
    pivots: dict[int, dict] = {}
    for row in rows:
        r = {c: v for c, v in row.items() if v[0] or v[1]}
        # pivot rows carry no other pivot column, so one pass suffices
        for c in [c for c in r if c in pivots]:
            v = r.get(c)
            if v is not None:
                _row_axpy(r, (-v[0], -v[1]), pivots[c])
        if not r:
            continue
        c0 = min(r)
        inv = cinv(r[c0])
        r = {c: cmul(v, inv) for c, v in r.items()}
        for pc, prow in pivots.items():
            v = prow.get(c0)
            if v is not None:
                _row_axpy(prow, (-v[0], -v[1]), r)
        pivots[c0] = r
    order = sorted(pivots)
    return [pivots[c] for c in order], order


def nullspace(rows: list[dict], ncols: int) -> list[dict]:
    """Basis of ``{v : row . v = 0 for all rows}`` as sparse vectors."""
    red, piv = rref(rows)
    pivset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        vec = {f: C1}
        for pc, prow in zip(piv, red):
            v = prow.get(f)
            if v is not None:
                vec[pc] = (-v[0], -v[1])
        basis.append(vec)
    return basis


def rank(rows: list[dict]) -> int:
    return len(rref(rows)[1])


def solve_rows(rows: list[dict], rhs: list[tuple], ncols: int) -> dict | None:
    """One solution of ``rows . v = rhs`` (free variables 0), or None."""
    aug = []
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b[0] or b[1]:
            r[ncols] = b
        aug.append(r)
    red, piv = rref(aug)
    if ncols in piv:
        return None
    sol = {}
    for pc, prow in zip(piv, red):
        v = prow.get(ncols, C0)
        if v[0] or v[1]:
            sol[pc] = v
    return sol
