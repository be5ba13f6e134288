"""Exact coefficient arithmetic.

Sparse multivariate polynomials over the Gaussian rationals in the chart
variables ``x_a`` (``a = 1..2n``), ``w_ij`` and ``wb_ij`` (``i < j``), and
their localization at a fixed tuple of denominator polynomials (the chart
norm ``N`` first, optionally frame denominators after it).

Monomials are packed into one Python int, 16 bits per variable with the top
bit of each field kept clear.  Packed-int addition is monomial
multiplication and integer comparison is a lex monomial order, which is all
the exact division loop needs.  Coefficients are ``(re, im)`` pairs of
``gmpy2.mpq``.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from gmpy2 import mpq

FIELD = 16
FMASK = (1 << FIELD) - 1
MAX_EXP = (1 << (FIELD - 1)) - 1

Q0 = mpq(0)
Q1 = mpq(1)
C0 = (Q0, Q0)
C1 = (Q1, Q0)
CI = (Q0, Q1)


class RingError(ValueError):
    """Operands from different rings, or a malformed coefficient."""


class PoleError(ArithmeticError):
    """Evaluation at a point where a denominator vanishes."""


# --------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    """Exact ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @classmethod
    def from_pair(cls, c: tuple) -> "GaussianRational":
        g = cls.__new__(cls)
        g.re, g.im = c
        return g

    @classmethod
    def parse(cls, re: str | int = "0", im: str | int = "0") -> "GaussianRational":
        try:
            return cls(mpq(Fraction(str(re))), mpq(Fraction(str(im))))
        except (ValueError, ZeroDivisionError) as exc:
            raise RingError(f"bad rational literal {re!r}/{im!r}") from exc

    @property
    def pair(self) -> tuple:
        return (self.re, self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __add__(self, o):
        o = _as_gr(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _as_gr(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _as_gr(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = _as_gr(o)
        return GaussianRational.from_pair(cmul(self.pair, o.pair))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _as_gr(o)
        return GaussianRational.from_pair(cmul(self.pair, cinv(o.pair)))

    def __eq__(self, o):
        try:
            o = _as_gr(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({fmt_q(self.re)}, {fmt_q(self.im)})"

    def __str__(self):
        return fmt_c(self.pair)


def _as_gr(o) -> GaussianRational:
    if isinstance(o, GaussianRational):
        return o
    if isinstance(o, complex):
        raise TypeError("floating complex values are not exact")
    if isinstance(o, (int, Fraction)) or type(o).__name__ == "mpq":
        return GaussianRational(o, 0)
    raise TypeError(f"cannot coerce {type(o).__name__} to GaussianRational")


def coerce_pair(c) -> tuple:
    if isinstance(c, tuple):
        return (mpq(c[0]), mpq(c[1]))
    return _as_gr(c).pair


def cmul(a: tuple, b: tuple) -> tuple:
    ar, ai = a
    br, bi = b
    return (ar * br - ai * bi, ar * bi + ai * br)


def cinv(a: tuple) -> tuple:
    ar, ai = a
    d = ar * ar + ai * ai
    if not d:
        raise ZeroDivisionError("inverse of zero")
    return (ar / d, -ai / d)


def fmt_q(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_c(c: tuple) -> str:
    re, im = c
    if not im:
        return fmt_q(re)
    if not re:
        return f"{fmt_q(im)}*i"
    return f"({fmt_q(re)}{'+' if im > 0 else '-'}{fmt_q(abs(im))}*i)"


# --------------------------------------------------------------------------
# variables


class VarId(NamedTuple):
    """``X(a)``, ``W(i, j)`` or ``WBar(i, j)`` with ``i < j``."""

    kind: str
    a: int
    b: int = 0

    def __str__(self):
        if self.kind == "x":
            return f"x{self.a}"
        return f"{'w' if self.kind == 'w' else 'wb'}{self.a}{self.b}"


def X(a: int) -> VarId:
    return VarId("x", a)


def _pair(kind: str, i: int, j: int) -> VarId:
    if i == j:
        raise RingError(f"w_{i}{j} is not a coordinate")
    if i > j:
        raise RingError(f"w_{i}{j}: normalize to w_{j}{i} and carry the sign")
    return VarId(kind, i, j)


def W(i: int, j: int) -> VarId:
    return _pair("w", i, j)


def WBar(i: int, j: int) -> VarId:
    return _pair("wb", i, j)


def normalize_pair(i: int, j: int) -> tuple[int, tuple[int, int]]:
    """``w_ji = -w_ij``: returns (sign, sorted pair)."""
    if i < j:
        return 1, (i, j)
    if i > j:
        return -1, (j, i)
    return 0, (i, j)


class Layout:
    """Variable order and bit packing for a given ``n``.

    Order: ``x_1..x_2n``, then ``w_ij`` (lex pairs), then ``wb_ij``.
    """

    def __init__(self, n: int):
        if n < 2:
            raise RingError(f"n must be >= 2, got {n}")
        self.n = n
        self.pairs: list[tuple[int, int]] = [
            (i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
        ]
        self.npairs = len(self.pairs)
        self.nx = 2 * n
        self.nvars = self.nx + 2 * self.npairs
        self.pair_index = {p: k for k, p in enumerate(self.pairs)}
        self.vars: list[VarId] = (
            [X(a) for a in range(1, 2 * n + 1)]
            + [W(i, j) for i, j in self.pairs]
            + [WBar(i, j) for i, j in self.pairs]
        )
        self.index = {v: k for k, v in enumerate(self.vars)}
        self.guard = sum(1 << (FIELD * k + FIELD - 1) for k in range(self.nvars))
        self._sw = FIELD * self.nx
        self._swb = FIELD * (self.nx + self.npairs)
        self._maskx = (1 << self._sw) - 1
        self._maskp = (1 << (FIELD * self.npairs)) - 1

    def var(self, v: VarId | int) -> int:
        if isinstance(v, int):
            if not 0 <= v < self.nvars:
                raise RingError(f"variable index {v} out of range")
            return v
        try:
            return self.index[v]
        except KeyError:
            raise RingError(f"{v} is not a variable for n={self.n}") from None

    def x(self, a: int) -> int:
        return a - 1

    def w(self, i: int, j: int) -> int:
        return self.nx + self.pair_index[(i, j)]

    def wbar(self, i: int, j: int) -> int:
        return self.nx + self.npairs + self.pair_index[(i, j)]

    def is_x(self, v: int) -> bool:
        return v < self.nx

    def pack(self, exps: Sequence[int]) -> int:
        k = 0
        for v, e in enumerate(exps):
            if e:
                if not 0 < e <= MAX_EXP:
                    raise RingError(f"exponent {e} out of range")
                k |= e << (FIELD * v)
        return k

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (FIELD * v)) & FMASK for v in range(self.nvars))

    def exponent(self, key: int, v: int) -> int:
        return (key >> (FIELD * v)) & FMASK

    def divides(self, a: int, b: int) -> bool:
        """Monomial ``a`` divides monomial ``b``."""
        h = self.guard
        return ((b | h) - a) & h == h

    def conj_key(self, key: int) -> int:
        kx = key & self._maskx
        kw = (key >> self._sw) & self._maskp
        kwb = (key >> self._swb) & self._maskp
        return kx | (kwb << self._sw) | (kw << self._swb)

    def x_only(self, key: int) -> bool:
        return key >> self._sw == 0

    def name(self, v: int) -> str:
        return str(self.vars[v])


@lru_cache(maxsize=None)
def layout(n: int) -> Layout:
    return Layout(n)


# --------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Sparse polynomial ``{packed monomial: (re, im)}``; no zero coefficients."""

    __slots__ = ("layout", "terms")

    def __init__(self, lay: Layout, terms: dict | None = None):
        self.layout = lay
        self.terms = terms if terms is not None else {}

    # constructors
    @classmethod
    def zero(cls, lay: Layout) -> "Polynomial":
        return cls(lay, {})

    @classmethod
    def const(cls, lay: Layout, c=1) -> "Polynomial":
        c = coerce_pair(c)
        return cls(lay, {0: c} if (c[0] or c[1]) else {})

    @classmethod
    def var(cls, lay: Layout, v: VarId | int, c=1) -> "Polynomial":
        k = lay.var(v)
        return cls(lay, {1 << (FIELD * k): coerce_pair(c)})

    @classmethod
    def from_exps(cls, lay: Layout, items: Iterable[tuple[Sequence[int] | Mapping, object]]) -> "Polynomial":
        out: dict = {}
        for exps, c in items:
            if isinstance(exps, Mapping):
                e = [0] * lay.nvars
                for v, p in exps.items():
                    e[lay.var(v)] += p
                exps = e
            key = lay.pack(exps)
            c = coerce_pair(c)
            old = out.get(key, C0)
            s = (old[0] + c[0], old[1] + c[1])
            if s[0] or s[1]:
                out[key] = s
            else:
                out.pop(key, None)
        return cls(lay, out)

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, o):
        if isinstance(o, Polynomial):
            return self.layout is o.layout and self.terms == o.terms
        if isinstance(o, (int, Fraction, GaussianRational)):
            return self.terms == Polynomial.const(self.layout, o).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def constant_term(self) -> GaussianRational:
        return GaussianRational.from_pair(self.terms.get(0, C0))

    def coefficient(self, exps: Sequence[int] | Mapping) -> GaussianRational:
        if isinstance(exps, Mapping):
            e = [0] * self.layout.nvars
            for v, p in exps.items():
                e[self.layout.var(v)] += p
            exps = e
        return GaussianRational.from_pair(self.terms.get(self.layout.pack(exps), C0))

    def total_degree(self) -> int:
        lay = self.layout
        return max((sum(lay.unpack(k)) for k in self.terms), default=-1)

    def degree_in(self, v: VarId | int) -> int:
        k = self.layout.var(v)
        return max((self.layout.exponent(m, k) for m in self.terms), default=-1)

    def is_x_only(self) -> bool:
        return all(self.layout.x_only(k) for k in self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], tuple]]:
        """Terms in graded-lex order (total degree, then exponent vector)."""
        lay = self.layout
        items = [(lay.unpack(k), c) for k, c in self.terms.items()]
        items.sort(key=lambda t: (sum(t[0]), t[0]))
        return items

    def _check(self, o: "Polynomial"):
        if o.layout is not self.layout:
            raise RingError("polynomials from different layouts")

    # arithmetic
    def __add__(self, o):
        if not isinstance(o, Polynomial):
            o = Polynomial.const(self.layout, o)
        self._check(o)
        if len(o.terms) > len(self.terms):
            a, b = o.terms, self.terms
        else:
            a, b = self.terms, o.terms
        out = dict(a)
        for k, c in b.items():
            old = out.get(k)
            if old is None:
                out[k] = c
            else:
                s = (old[0] + c[0], old[1] + c[1])
                if s[0] or s[1]:
                    out[k] = s
                else:
                    del out[k]
        return Polynomial(self.layout, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.layout, {k: (-c[0], -c[1]) for k, c in self.terms.items()})

    def __sub__(self, o):
        if not isinstance(o, Polynomial):
            o = Polynomial.const(self.layout, o)
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def scale(self, c) -> "Polynomial":
        c = coerce_pair(c)
        if not (c[0] or c[1]):
            return Polynomial(self.layout, {})
        cr, ci = c
        if not ci:
            if cr == 1:
                return self
            return Polynomial(self.layout, {k: (a * cr, b * cr) for k, (a, b) in self.terms.items()})
        return Polynomial(
            self.layout,
            {k: (a * cr - b * ci, a * ci + b * cr) for k, (a, b) in self.terms.items()},
        )

    def __mul__(self, o):
        if not isinstance(o, Polynomial):
            return self.scale(o)
        self._check(o)
        a, b = self.terms, o.terms
        if not a or not b:
            return Polynomial(self.layout, {})
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, (br, bi)), = b.items()
            if not bi:
                return Polynomial(self.layout, {k + kb: (x * br, y * br) for k, (x, y) in a.items()})
            return Polynomial(
                self.layout,
                {k + kb: (x * br - y * bi, x * bi + y * br) for k, (x, y) in a.items()},
            )
        out: dict = {}
        get = out.get
        bitems = list(b.items())
        for ka, (ar, ai) in a.items():
            for kb, (br, bi) in bitems:
                k = ka + kb
                old = get(k)
                if old is None:
                    out[k] = (ar * br - ai * bi, ar * bi + ai * br)
                else:
                    out[k] = (old[0] + ar * br - ai * bi, old[1] + ar * bi + ai * br)
        return Polynomial(self.layout, {k: c for k, c in out.items() if c[0] or c[1]})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.const(self.layout, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def partial(self, v: VarId | int) -> "Polynomial":
        k = self.layout.var(v)
        shift = FIELD * k
        step = 1 << shift
        out = {}
        for m, (a, b) in self.terms.items():
            e = (m >> shift) & FMASK
            if e:
                out[m - step] = (a * e, b * e)
        return Polynomial(self.layout, out)

    def conjugate(self) -> "Polynomial":
        ck = self.layout.conj_key
        return Polynomial(self.layout, {ck(k): (a, -b) for k, (a, b) in self.terms.items()})

    def leading_key(self) -> int:
        return max(self.terms)

    def divexact(self, g: "Polynomial") -> "Polynomial | None":
        """Exact quotient ``self / g``, or None when ``g`` does not divide."""
        self._check(g)
        if not g.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self.terms:
            return Polynomial(self.layout, {})
        lay = self.layout
        lmg = max(g.terms)
        if not lay.divides(lmg, max(self.terms)):
            return None
        if len(g.terms) == 1:
            cg = cinv(g.terms[lmg])
            out = {}
            for k, c in self.terms.items():
                if not lay.divides(lmg, k):
                    return None
                out[k - lmg] = cmul(c, cg)
            return Polynomial(lay, out)
        h = lay.guard
        inv = cinv(g.terms[lmg])
        gitems = [(k, c) for k, c in g.terms.items() if k != lmg]
        r = dict(self.terms)
        heap = [-k for k in r]
        heapq.heapify(heap)
        q = {}
        while r:
            while True:
                k = -heap[0]
                if k in r:
                    break
                heapq.heappop(heap)
            heapq.heappop(heap)
            if ((k | h) - lmg) & h != h:
                return None
            c = r.pop(k)
            mq = k - lmg
            cqr, cqi = cq = cmul(c, inv)
            q[mq] = cq
            for kg, (gr, gi) in gitems:
                key = mq + kg
                old = r.get(key)
                dr = cqr * gr - cqi * gi
                di = cqr * gi + cqi * gr
                if old is None:
                    r[key] = (-dr, -di)
                    heapq.heappush(heap, -key)
                else:
                    s = (old[0] - dr, old[1] - di)
                    if s[0] or s[1]:
                        r[key] = s
                    else:
                        del r[key]
        return Polynomial(lay, q)

    def substitute_zero(self, vars_: Iterable[int]) -> "Polynomial":
        """Set the given variables to 0."""
        lay = self.layout
        mask = 0
        for v in vars_:
            mask |= FMASK << (FIELD * v)
        return Polynomial(lay, {k: c for k, c in self.terms.items() if not k & mask})

    def evaluate(self, point: Mapping) -> GaussianRational:
        """Exact value; ``point`` maps VarId or index to a number."""
        lay = self.layout
        vals = {}
        for v, val in point.items():
            vals[lay.var(v)] = coerce_pair(val)
        powcache: dict = {}
        acc = C0
        for key, c in self.terms.items():
            t = c
            for v in range(lay.nvars):
                e = (key >> (FIELD * v)) & FMASK
                if e:
                    if v not in vals:
                        raise RingError(f"no value for {lay.name(v)}")
                    p = powcache.get((v, e))
                    if p is None:
                        p = C1
                        for _ in range(e):
                            p = cmul(p, vals[v])
                        powcache[(v, e)] = p
                    t = cmul(t, p)
            acc = (acc[0] + t[0], acc[1] + t[1])
        return GaussianRational.from_pair(acc)

    def iter_monomials(self) -> Iterator[tuple[int, tuple]]:
        return iter(self.terms.items())

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        lay = self.layout
        parts = []
        for exps, c in reversed(self.sorted_terms()):
            mono = "*".join(
                lay.name(v) + (f"^{e}" if e > 1 else "") for v, e in enumerate(exps) if e
            )
            cs = fmt_c(c)
            if not mono:
                parts.append(cs)
            elif c == C1:
                parts.append(mono)
            elif c == (-Q1, Q0):
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self.to_str()})"


# --------------------------------------------------------------------------
# localized scalars


class LocalRing:
    """Polynomials localized at a fixed tuple of denominators.

    The first denominator is the chart norm; the tuple is part of the ring's
    identity, so scalars built over different charts never mix silently.
    """

    def __init__(self, lay: Layout, denominators: Sequence[Polynomial], key: object = None):
        self.layout = lay
        self.denominators = tuple(denominators)
        for g in self.denominators:
            if g.layout is not lay:
                raise RingError("denominator from a foreign layout")
            if not g.terms:
                raise RingError("zero denominator")
        self.key = key
        self._pow: list[dict[int, Polynomial]] = [{0: Polynomial.const(lay, 1), 1: g} for g in self.denominators]
        self._dpartial: dict = {}
        self.zero_pows = (0,) * len(self.denominators)
        self.self_conjugate = all(g.conjugate() == g for g in self.denominators)

    def extend(self, extra: Sequence[Polynomial], key: object = None) -> "LocalRing":
        return LocalRing(self.layout, self.denominators + tuple(extra), key)

    def gpow(self, i: int, e: int) -> Polynomial:
        cache = self._pow[i]
        p = cache.get(e)
        if p is None:
            p = self.gpow(i, e - 1) * self.denominators[i]
            cache[e] = p
        return p

    def dpartial(self, i: int, v: int) -> Polynomial:
        key = (i, v)
        p = self._dpartial.get(key)
        if p is None:
            p = self.denominators[i].partial(v)
            self._dpartial[key] = p
        return p

    def same(self, o: "LocalRing") -> bool:
        return self is o or (self.key is not None and self.key == o.key)

    # constructors
    def scalar(self, num: Polynomial, pows: Sequence[int] | int | None = None) -> "ChartScalar":
        if num.layout is not self.layout:
            raise RingError("numerator from a foreign layout")
        if pows is None:
            pows = self.zero_pows
        elif isinstance(pows, int):
            pows = (pows,) + (0,) * (len(self.denominators) - 1)
        else:
            pows = tuple(pows)
            if len(pows) != len(self.denominators):
                raise RingError("denominator exponent vector has wrong length")
        return ChartScalar.make(self, num, pows)

    def const(self, c=1) -> "ChartScalar":
        return ChartScalar(self, Polynomial.const(self.layout, c), self.zero_pows)

    def zero(self) -> "ChartScalar":
        return ChartScalar(self, Polynomial(self.layout, {}), self.zero_pows)

    def var(self, v: VarId | int) -> "ChartScalar":
        return ChartScalar(self, Polynomial.var(self.layout, v), self.zero_pows)

    def inv_denominator(self, i: int = 0, e: int = 1) -> "ChartScalar":
        pows = [0] * len(self.denominators)
        pows[i] = e
        return ChartScalar(self, Polynomial.const(self.layout, 1), tuple(pows))


class ChartScalar:
    """``numerator / prod(denominators[i] ** pows[i])`` with minimal exponents."""

    __slots__ = ("ring", "num", "pows")

    def __init__(self, ring: LocalRing, num: Polynomial, pows: tuple):
        self.ring = ring
        self.num = num
        self.pows = pows

    @staticmethod
    def make(ring: LocalRing, num: Polynomial, pows: tuple) -> "ChartScalar":
        if not num.terms:
            return ChartScalar(ring, num, ring.zero_pows)
        if any(pows):
            pows = list(pows)
            for i, e in enumerate(pows):
                g = ring.denominators[i]
                while e > 0:
                    q = num.divexact(g)
                    if q is None:
                        break
                    num = q
                    e -= 1
                pows[i] = e
            pows = tuple(pows)
        return ChartScalar(ring, num, pows)

    @property
    def npow(self) -> int:
        return self.pows[0]

    @property
    def numerator(self) -> Polynomial:
        return self.num

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self):
        return bool(self.num.terms)

    def _check(self, o: "ChartScalar"):
        if not self.ring.same(o.ring):
            raise RingError("scalars from different charts")

    def _coerce(self, o) -> "ChartScalar":
        if isinstance(o, ChartScalar):
            self._check(o)
            return o
        if isinstance(o, Polynomial):
            return ChartScalar.make(self.ring, o, self.ring.zero_pows)
        return self.ring.const(o)

    def _lift(self, target: tuple) -> Polynomial:
        num = self.num
        for i, (have, want) in enumerate(zip(self.pows, target)):
            if want > have:
                num = num * self.ring.gpow(i, want - have)
        return num

    def __add__(self, o):
        o = self._coerce(o)
        if not o.num.terms:
            return self
        if not self.num.terms:
            return o
        if self.pows == o.pows:
            return ChartScalar.make(self.ring, self.num + o.num, self.pows)
        target = tuple(max(a, b) for a, b in zip(self.pows, o.pows))
        return ChartScalar.make(self.ring, self._lift(target) + o._lift(target), target)

    __radd__ = __add__

    def __neg__(self):
        return ChartScalar(self.ring, -self.num, self.pows)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        if isinstance(o, ChartScalar):
            self._check(o)
            pows = tuple(a + b for a, b in zip(self.pows, o.pows))
            return ChartScalar.make(self.ring, self.num * o.num, pows)
        if isinstance(o, Polynomial):
            return ChartScalar.make(self.ring, self.num * o, self.pows)
        return ChartScalar(self.ring, self.num.scale(o), self.pows if _nonzero(o) else self.ring.zero_pows)

    __rmul__ = __mul__

    def scale(self, c) -> "ChartScalar":
        return self * c

    def __truediv__(self, c):
        if isinstance(c, (ChartScalar, Polynomial)):
            raise RingError("division by a ring element is not supported; multiply by an inverse denominator")
        return self * GaussianRational.from_pair(cinv(coerce_pair(c)))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = self.ring.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, ChartScalar):
            if not self.ring.same(o.ring):
                return False
            return self.pows == o.pows and self.num.terms == o.num.terms
        if isinstance(o, (int, Fraction, GaussianRational, Polynomial)):
            return self == self._coerce(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.pows, frozenset(self.num.terms.items())))

    def partial(self, v: VarId | int) -> "ChartScalar":
        """Exact partial derivative; the quotient rule raises one power per denominator involved."""
        ring = self.ring
        k = ring.layout.var(v)
        dnum = self.num.partial(k)
        if not any(self.pows):
            return ChartScalar(ring, dnum, self.pows)
        active = [i for i, e in enumerate(self.pows) if e and ring.dpartial(i, k).terms]
        if not active:
            return ChartScalar.make(ring, dnum, self.pows)
        new_pows = list(self.pows)
        for i in active:
            new_pows[i] += 1
        # d(p / prod g^e) = (p' prod_act g - p sum_i e_i g_i' prod_{act, j != i} g_j) / prod g^(e + [act])
        gs = ring.denominators
        prod_all = Polynomial.const(ring.layout, 1)
        for i in active:
            prod_all = prod_all * gs[i]
        out = dnum * prod_all
        for i in active:
            rest = Polynomial.const(ring.layout, self.pows[i])
            for j in active:
                if j != i:
                    rest = rest * gs[j]
            out = out - self.num * ring.dpartial(i, k) * rest
        return ChartScalar.make(ring, out, tuple(new_pows))

    def conjugate(self) -> "ChartScalar":
        if not self.ring.self_conjugate:
            raise RingError("ring denominators are not self-conjugate")
        return ChartScalar(self.ring, self.num.conjugate(), self.pows)

    def evaluate(self, point: Mapping) -> GaussianRational:
        val = self.num.evaluate(point)
        for g, e in zip(self.ring.denominators, self.pows):
            if e:
                gv = g.evaluate(point)
                if not gv:
                    raise PoleError("denominator vanishes at the evaluation point")
                for _ in range(e):
                    val = val / gv
        return val

    eval = evaluate

    def cross_equal(self, o: "ChartScalar") -> bool:
        """Equality by cross-multiplication (independent of canonical form)."""
        self._check(o)
        target = tuple(max(a, b) for a, b in zip(self.pows, o.pows))
        return (self._lift(target) - o._lift(target)).is_zero()

    def to_str(self) -> str:
        s = self.num.to_str()
        den = [
            (f"D{i}" if i else "N") + (f"^{e}" if e > 1 else "")
            for i, e in enumerate(self.pows)
            if e
        ]
        if den:
            return f"({s})/({'*'.join(den)})"
        return s

    def __repr__(self):
        return f"ChartScalar({self.to_str()})"


def _nonzero(c) -> bool:
    c = coerce_pair(c)
    return bool(c[0] or c[1])


def plain_ring(n: int) -> LocalRing:
    """Polynomial ring without localization (used for x-only field components)."""
    return LocalRing(layout(n), (), key=("plain", n))
