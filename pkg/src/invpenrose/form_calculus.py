"""Twisted differential forms on ``M x U_I``.

A form is a map from covector monomials to chart scalars, together with a
bundle charge ``c``: the form takes values in ``H^{-c}`` through the chart
frame ``sigma_I^c``, whose squared norm is ``N^c``.  The covariant exterior
derivative of the Chern connection is then ``d + c * dN'/N`` with ``dN'`` the
(1,0) fiber differential of ``N``.

Covector monomials are bitmasks.  Bit order, low to high: ``e^1..e^2n``,
``dw_ij``, ``dwb_ij`` (pairs in lex order), ``abar^1..abar^n``.  A monomial
is the wedge of its covectors in increasing bit order.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

from .coeff_ring import ChartScalar, LocalRing, Polynomial, RingError, layout
from .twistor_chart import Chart, HorizontalForm, VerticalVectorField


class FormTypeError(TypeError):
    """A form handed to ``dbar`` is not of pure type (0, q)."""


class CovectorId(NamedTuple):
    kind: str  # 'e', 'dw', 'dwb', 'abar'
    a: int
    b: int = 0

    def __str__(self):
        if self.kind == "e":
            return f"e{self.a}"
        if self.kind == "abar":
            return f"abar{self.a}"
        return f"{self.kind}{self.a}{self.b}"


def E(a: int) -> CovectorId:
    return CovectorId("e", a)


def DW(i: int, j: int) -> CovectorId:
    return CovectorId("dw", i, j)


def DWBar(i: int, j: int) -> CovectorId:
    return CovectorId("dwb", i, j)


def ABar(k: int) -> CovectorId:
    return CovectorId("abar", k)


class FormLayout:
    """Bit positions of covectors for a given ``n``."""

    def __init__(self, n: int):
        self.n = n
        lay = layout(n)
        self.pairs = lay.pairs
        p = len(self.pairs)
        self.nE = 2 * n
        self.off_dw = 2 * n
        self.off_dwb = 2 * n + p
        self.off_abar = 2 * n + 2 * p
        self.nbits = 2 * n + 2 * p + n
        self.e_mask = (1 << (2 * n)) - 1
        self.dw_mask = ((1 << p) - 1) << self.off_dw
        self.dwb_mask = ((1 << p) - 1) << self.off_dwb
        self.abar_mask = ((1 << n) - 1) << self.off_abar
        self.ids: list[CovectorId] = (
            [E(a) for a in range(1, 2 * n + 1)]
            + [DW(i, j) for i, j in self.pairs]
            + [DWBar(i, j) for i, j in self.pairs]
            + [ABar(k) for k in range(1, n + 1)]
        )
        self.bit_of = {c: k for k, c in enumerate(self.ids)}
        # ring variable paired with each coordinate covector
        self.var_of_bit: dict[int, int] = {}
        for a in range(1, 2 * n + 1):
            self.var_of_bit[a - 1] = lay.x(a)
        for k, (i, j) in enumerate(self.pairs):
            self.var_of_bit[self.off_dw + k] = lay.w(i, j)
            self.var_of_bit[self.off_dwb + k] = lay.wbar(i, j)
        self.bit_of_var = {v: b for b, v in self.var_of_bit.items()}

    def e(self, a: int) -> int:
        return a - 1

    def dw(self, i: int, j: int) -> int:
        return self.off_dw + self.pairs.index((i, j))

    def dwb(self, i: int, j: int) -> int:
        return self.off_dwb + self.pairs.index((i, j))

    def abar(self, k: int) -> int:
        return self.off_abar + k - 1

    def mask(self, covectors: Iterable[CovectorId]) -> tuple[int, int]:
        """(sign, mask) of the wedge of ``covectors`` in the given order."""
        sign, m = 1, 0
        for c in covectors:
            b = self.bit_of[c]
            s = wedge_sign(m, 1 << b)
            if not s:
                return 0, 0
            sign *= s
            m |= 1 << b
        return sign, m

    def covectors(self, m: int) -> list[CovectorId]:
        return [self.ids[b] for b in bits(m)]

    def top_dwb(self) -> int:
        return self.dwb_mask


@lru_cache(maxsize=None)
def form_layout(n: int) -> FormLayout:
    return FormLayout(n)


def bits(m: int) -> list[int]:
    out = []
    b = 0
    while m:
        if m & 1:
            out.append(b)
        m >>= 1
        b += 1
    return out


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``mono(a) ^ mono(b) = sign * mono(a | b)``; 0 if they overlap."""
    if a & b:
        return 0
    swaps = 0
    for k in bits(b):
        swaps += bin(a >> (k + 1)).count("1")
    return -1 if swaps & 1 else 1


def _below(m: int, k: int) -> int:
    return bin(m & ((1 << k) - 1)).count("1")


class TwistedForm:
    """``sum_mask coeff * mono(mask)`` with values in ``H^{-charge}``."""

    __slots__ = ("chart", "ring", "charge", "terms")

    def __init__(self, chart: Chart, charge: int, terms: dict | None = None, ring: LocalRing | None = None):
        self.chart = chart
        self.ring = ring if ring is not None else chart.ring
        self.charge = charge
        if terms is None:
            terms = {}
        elif not all(terms.values()):
            # zero coefficients are never stored, so truthiness means nonzero
            terms = {m: c for m, c in terms.items() if c}
        self.terms: dict[int, ChartScalar] = terms

    @property
    def layout(self) -> FormLayout:
        return form_layout(self.chart.n)

    # ---- construction

    @classmethod
    def zero(cls, chart: Chart, charge: int = 0, ring: LocalRing | None = None) -> "TwistedForm":
        return cls(chart, charge, {}, ring)

    @classmethod
    def function(cls, chart: Chart, f, charge: int = 0, ring: LocalRing | None = None) -> "TwistedForm":
        ring = ring or chart.ring
        f = _as_scalar(ring, f)
        return cls(chart, charge, {0: f} if f else {}, ring)

    @classmethod
    def monomial(
        cls, chart: Chart, covectors: Iterable[CovectorId], coeff=1, charge: int = 0, ring: LocalRing | None = None
    ) -> "TwistedForm":
        ring = ring or chart.ring
        sign, m = form_layout(chart.n).mask(covectors)
        f = _as_scalar(ring, coeff)
        if not sign or not f:
            return cls(chart, charge, {}, ring)
        return cls(chart, charge, {m: f if sign > 0 else -f}, ring)

    @classmethod
    def from_horizontal(cls, h: HorizontalForm, charge: int = 0, ring: LocalRing | None = None) -> "TwistedForm":
        ring = ring or h.chart.ring
        terms = {}
        for a, c in h.components.items():
            if c:
                terms[1 << (a - 1)] = _recast(ring, c)
        return cls(h.chart, charge, terms, ring)

    def _new(self, terms: dict, charge: int | None = None) -> "TwistedForm":
        return TwistedForm(self.chart, self.charge if charge is None else charge, terms, self.ring)

    # ---- queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree_set(self) -> set[int]:
        return {bin(m).count("1") for m in self.terms}

    def coefficient(self, covectors: Iterable[CovectorId]) -> ChartScalar:
        sign, m = self.layout.mask(covectors)
        c = self.terms.get(m)
        if c is None or not sign:
            return self.ring.zero()
        return c if sign > 0 else -c

    def max_npow(self) -> int:
        return max((c.npow for c in self.terms.values()), default=0)

    def __eq__(self, o):
        if not isinstance(o, TwistedForm):
            return NotImplemented
        if self.chart != o.chart:
            return False
        if not self.terms and not o.terms:
            return True
        return self.charge == o.charge and self.terms == o.terms

    def __repr__(self):
        return f"TwistedForm(charge={self.charge}, {self.to_str()})"

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        lay = self.layout
        parts = []
        for m in sorted(self.terms, key=lambda m: (bin(m).count("1"), bits(m))):
            mono = "^".join(str(c) for c in lay.covectors(m)) or "1"
            parts.append(f"[{self.terms[m].to_str()}]*{mono}")
        return " + ".join(parts)

    def _check(self, o: "TwistedForm", same_charge: bool = True):
        if self.chart != o.chart or not self.ring.same(o.ring):
            raise RingError("forms from different charts")
        if same_charge and self.charge != o.charge and self.terms and o.terms:
            raise RingError(f"charge mismatch {self.charge} vs {o.charge}")

    # ---- linear structure

    def __add__(self, o: "TwistedForm") -> "TwistedForm":
        self._check(o)
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for m, c in o.terms.items():
            old = out.get(m)
            if old is None:
                out[m] = c
            else:
                s = old + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return self._new(out, self.charge if self.terms else o.charge)

    def __neg__(self):
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, f) -> "TwistedForm":
        """Multiply every coefficient by a scalar, polynomial or chart scalar."""
        if isinstance(f, ChartScalar):
            if not f:
                return self._new({})
        out = {}
        for m, c in self.terms.items():
            p = c * f
            if p:
                out[m] = p
        return self._new(out)

    __mul__ = scale
    __rmul__ = scale

    def with_charge(self, charge: int) -> "TwistedForm":
        return self._new(self.terms, charge)

    def map_coefficients(self, fn: Callable[[ChartScalar], ChartScalar]) -> "TwistedForm":
        out = {}
        for m, c in self.terms.items():
            r = fn(c)
            if r:
                out[m] = r
        return self._new(out)

    def conjugate_coefficients(self) -> "TwistedForm":
        return self.map_coefficients(lambda c: c.conjugate())


def _as_scalar(ring: LocalRing, f) -> ChartScalar:
    if isinstance(f, ChartScalar):
        return _recast(ring, f)
    if isinstance(f, Polynomial):
        return ring.scalar(f)
    return ring.const(f)


def _recast(ring: LocalRing, c: ChartScalar) -> ChartScalar:
    """Move a scalar into ``ring`` (which must extend ``c.ring``)."""
    if ring.same(c.ring):
        return c
    src = c.ring.denominators
    if ring.denominators[: len(src)] != src:
        raise RingError("target ring does not extend the source ring")
    pows = c.pows + (0,) * (len(ring.denominators) - len(src))
    return ChartScalar(ring, c.num, pows)


def recast_form(u: TwistedForm, ring: LocalRing) -> TwistedForm:
    return TwistedForm(u.chart, u.charge, {m: _recast(ring, c) for m, c in u.terms.items()}, ring)


def wedge(u: TwistedForm, v: TwistedForm) -> TwistedForm:
    if u.chart != v.chart or not u.ring.same(v.ring):
        raise RingError("forms from different charts")
    out: dict[int, ChartScalar] = {}
    for mu, cu in u.terms.items():
        for mv, cv in v.terms.items():
            s = wedge_sign(mu, mv)
            if not s:
                continue
            p = cu * cv
            if not p:
                continue
            if s < 0:
                p = -p
            m = mu | mv
            old = out.get(m)
            if old is None:
                out[m] = p
            else:
                t = old + p
                if t:
                    out[m] = t
                else:
                    del out[m]
    return TwistedForm(u.chart, u.charge + v.charge, out, u.ring)


def wedge_covector(bit: int, u: TwistedForm, coeff: ChartScalar | None = None) -> TwistedForm:
    """``(coeff * covector) ^ u`` for a single basis covector."""
    b = 1 << bit
    out = {}
    for m, c in u.terms.items():
        if m & b:
            continue
        s = -1 if _below(m, bit) & 1 else 1
        p = c if coeff is None else c * coeff
        if not p:
            continue
        out[m | b] = p if s > 0 else -p
    return u._new(out)


# --------------------------------------------------------------------------
# vector fields


class GeneralVectorField:
    """``sum x[a] d/dx_a + sum w[ij] d/dw_ij + sum wb[ij] d/dwb_ij``."""

    __slots__ = ("chart", "ring", "x", "w", "wb")

    def __init__(self, chart: Chart, x=None, w=None, wb=None, ring: LocalRing | None = None):
        self.chart = chart
        self.ring = ring or chart.ring
        self.x: dict[int, ChartScalar] = {a: _recast(self.ring, c) for a, c in (x or {}).items() if c}
        self.w: dict[tuple, ChartScalar] = {p: _recast(self.ring, c) for p, c in (w or {}).items() if c}
        self.wb: dict[tuple, ChartScalar] = {p: _recast(self.ring, c) for p, c in (wb or {}).items() if c}

    @classmethod
    def e(cls, chart: Chart, a: int, ring: LocalRing | None = None) -> "GeneralVectorField":
        ring = ring or chart.ring
        return cls(chart, x={a: ring.const(1)}, ring=ring)

    @classmethod
    def from_vertical(cls, v: VerticalVectorField, ring: LocalRing | None = None) -> "GeneralVectorField":
        if v.conj:
            return cls(v.chart, wb=dict(v.components), ring=ring)
        return cls(v.chart, w=dict(v.components), ring=ring)

    @classmethod
    def d_wbar(cls, chart: Chart, i: int, j: int, ring: LocalRing | None = None) -> "GeneralVectorField":
        ring = ring or chart.ring
        return cls(chart, wb={(i, j): ring.const(1)}, ring=ring)

    def component_items(self) -> list[tuple[int, int, ChartScalar]]:
        """(covector bit, ring variable, component) for every nonzero component."""
        fl = form_layout(self.chart.n)
        lay = self.chart.layout
        out = []
        for a, c in self.x.items():
            out.append((fl.e(a), lay.x(a), c))
        for (i, j), c in self.w.items():
            out.append((fl.dw(i, j), lay.w(i, j), c))
        for (i, j), c in self.wb.items():
            out.append((fl.dwb(i, j), lay.wbar(i, j), c))
        return out

    def apply(self, f: ChartScalar) -> ChartScalar:
        """Directional derivative of a function."""
        acc = self.ring.zero()
        for _bit, v, c in self.component_items():
            d = f.partial(v)
            if d:
                acc = acc + c * d
        return acc

    def scale(self, f) -> "GeneralVectorField":
        return GeneralVectorField(
            self.chart,
            {a: c * f for a, c in self.x.items()},
            {p: c * f for p, c in self.w.items()},
            {p: c * f for p, c in self.wb.items()},
            self.ring,
        )

    def __add__(self, o: "GeneralVectorField") -> "GeneralVectorField":
        def merge(a, b):
            out = dict(a)
            for k, c in b.items():
                out[k] = out[k] + c if k in out else c
            return out

        return GeneralVectorField(self.chart, merge(self.x, o.x), merge(self.w, o.w), merge(self.wb, o.wb), self.ring)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, o):
        return self + (-o)

    def is_zero(self) -> bool:
        return not (self.x or self.w or self.wb)

    def __eq__(self, o):
        if not isinstance(o, GeneralVectorField):
            return NotImplemented
        return (self - o).is_zero()


def bracket(v: GeneralVectorField, u: GeneralVectorField) -> GeneralVectorField:
    """Lie bracket ``[v, u]`` of vector fields."""
    x, w, wb = {}, {}, {}
    for a in set(v.x) | set(u.x):
        x[a] = v.apply(u.x.get(a, v.ring.zero())) - u.apply(v.x.get(a, v.ring.zero()))
    for p in set(v.w) | set(u.w):
        w[p] = v.apply(u.w.get(p, v.ring.zero())) - u.apply(v.w.get(p, v.ring.zero()))
    for p in set(v.wb) | set(u.wb):
        wb[p] = v.apply(u.wb.get(p, v.ring.zero())) - u.apply(v.wb.get(p, v.ring.zero()))
    return GeneralVectorField(v.chart, x, w, wb, v.ring)


def interior(v: GeneralVectorField, u: TwistedForm) -> TwistedForm:
    comps = [(bit, c) for bit, _v, c in v.component_items()]
    if not comps:
        return u._new({})
    if any(m & u.layout.abar_mask for m in u.terms):
        raise FormTypeError("interior product with abar covectors is not defined; expand them first")
    out: dict[int, ChartScalar] = {}
    for m, c in u.terms.items():
        for bit, vc in comps:
            b = 1 << bit
            if not m & b:
                continue
            p = c * vc
            if not p:
                continue
            if _below(m, bit) & 1:
                p = -p
            k = m ^ b
            old = out.get(k)
            if old is None:
                out[k] = p
            else:
                s = old + p
                if s:
                    out[k] = s
                else:
                    del out[k]
    return u._new(out)


def interior_bit(bit: int, u: TwistedForm) -> TwistedForm:
    """Interior product with the coordinate vector field dual to covector ``bit``."""
    b = 1 << bit
    out = {}
    for m, c in u.terms.items():
        if m & b:
            out[m ^ b] = -c if _below(m, bit) & 1 else c
    return u._new(out)


# --------------------------------------------------------------------------
# covariant exterior derivative


def _dN_form(u: TwistedForm) -> dict[int, ChartScalar]:
    """``dN'/N`` as {covector bit: coefficient}, cached per ring."""
    ring = u.ring
    cache = _DN_CACHE.get(id(ring))
    if cache is not None and cache[0] is ring:
        return cache[1]
    c = u.chart
    fl = u.layout
    out = {}
    for i, j in fl.pairs:
        d = c.N.partial(c.layout.w(i, j))
        if d.terms:
            out[fl.dw(i, j)] = ring.scalar(d, 1)
    _DN_CACHE[id(ring)] = (ring, out)
    return out


_DN_CACHE: dict = {}


def partial_form(u: TwistedForm, var: int) -> TwistedForm:
    """Coefficientwise partial derivative (all basis covectors used here are constant)."""
    out = {}
    for m, c in u.terms.items():
        d = c.partial(var)
        if d:
            out[m] = d
    return u._new(out)


def covariant_d(u: TwistedForm) -> TwistedForm:
    if any(m & u.layout.abar_mask for m in u.terms):
        u = expand_abar(u)
    fl = u.layout
    out = TwistedForm.zero(u.chart, u.charge, u.ring)
    for bit in range(fl.off_abar):
        var = fl.var_of_bit[bit]
        du = partial_form(u, var)
        if du:
            out = out + wedge_covector(bit, du)
    if u.charge:
        for bit, g in _dN_form(u).items():
            out = out + wedge_covector(bit, u, g * u.charge)
    return out


def curvature(chart: Chart, charge: int, ring: LocalRing | None = None) -> TwistedForm:
    """``Omega = (d + c dN'/N)^2`` as a 2-form: ``c * d(dN'/N)``."""
    ring = ring or chart.ring
    one = TwistedForm.function(chart, 1, charge, ring)
    return covariant_d(covariant_d(one)).with_charge(charge)


def curvature_pairing(v: GeneralVectorField, v2: GeneralVectorField, charge: int) -> ChartScalar:
    """``Omega(v, v') = i(v') i(v) Omega``."""
    om = curvature(v.chart, charge, v.ring)
    r = interior(v2, interior(v, om))
    return r.terms.get(0, v.ring.zero())


def lie(v: GeneralVectorField, u: TwistedForm) -> TwistedForm:
    """Covariant Cartan formula ``i(v) d + d i(v)``."""
    return interior(v, covariant_d(u)) + covariant_d(interior(v, u))


def lie_e(a: int, u: TwistedForm) -> TwistedForm:
    """``L_{e_a}``: on this chart every covector is x-independent, so this is ``d/dx_a``."""
    return partial_form(u, u.chart.layout.x(a))


# --------------------------------------------------------------------------
# type decomposition


def _abar_images(u: TwistedForm) -> dict[int, dict[int, ChartScalar]]:
    """(0,1) part of each ``e^a``: {e bit: {abar bit: q}}."""
    split = u.chart.antiholo_split()
    fl = u.layout
    out = {}
    for a in range(1, 2 * u.chart.n + 1):
        img = {}
        for k in range(1, u.chart.n + 1):
            q = split.q[a - 1][k - 1]
            if q:
                img[fl.abar(k)] = _recast(u.ring, q)
        out[fl.e(a)] = img
    return out


def _substitute(u: TwistedForm, images: Mapping[int, Mapping[int, ChartScalar] | None]) -> TwistedForm:
    """Replace covector bits by linear combinations (``None`` keeps the bit)."""
    out = TwistedForm.zero(u.chart, u.charge, u.ring)
    for m, c in u.terms.items():
        acc = {0: c}
        for b in bits(m):
            img = images.get(b, None)
            if img is None:
                img = {b: None}
            nxt: dict[int, ChartScalar] = {}
            for am, ac in acc.items():
                for ib, icoef in img.items():
                    bb = 1 << ib
                    if am & bb:
                        continue
                    # appending on the right: count bits of am above ib
                    s = bin(am >> (ib + 1)).count("1") & 1
                    p = ac if icoef is None else ac * icoef
                    if not p:
                        continue
                    if s:
                        p = -p
                    k = am | bb
                    old = nxt.get(k)
                    if old is None:
                        nxt[k] = p
                    else:
                        t = old + p
                        if t:
                            nxt[k] = t
                        else:
                            del nxt[k]
            acc = nxt
            if not acc:
                break
        if acc:
            out = out + u._new(acc)
    return out


def project_antiholo(u: TwistedForm) -> TwistedForm:
    """(0, q) part of ``u`` over the covectors ``abar^k`` and ``dwb_ij``."""
    if any(m & u.layout.abar_mask for m in u.terms):
        u = expand_abar(u)
    fl = u.layout
    images: dict[int, dict | None] = dict(_abar_images(u))
    for k in range(len(fl.pairs)):
        images[fl.off_dw + k] = {}
    return _substitute(u, images)


def project_holo_part(u: TwistedForm) -> TwistedForm:
    """``u`` minus its (0, q) part, re-expanded in the coordinate coframe."""
    return u - expand_abar(project_antiholo(u))


def expand_abar(u: TwistedForm) -> TwistedForm:
    """Rewrite ``abar^k`` as ``conj(alpha^{kI}) = sum_a conj(-z^{akI}) e^a``."""
    fl = u.layout
    c = u.chart
    images: dict[int, dict | None] = {}
    for k in range(1, c.n + 1):
        ab = c.alpha((k,) + c.base).conjugate()
        images[fl.abar(k)] = {fl.e(a): _recast(u.ring, v) for a, v in ab.components.items() if v}
    return _substitute(u, images)


def dbar(u: TwistedForm) -> TwistedForm:
    """``dbar`` of a (0, q) form, returned over ``abar`` / ``dwb`` covectors."""
    if any(m & u.layout.abar_mask for m in u.terms):
        u = expand_abar(u)
    rest = project_holo_part(u)
    if rest:
        m = min(rest.terms)
        names = "^".join(str(x) for x in u.layout.covectors(m)) or "1"
        raise FormTypeError(f"form is not of type (0,q): component {names} = {rest.terms[m].to_str()}")
    return project_antiholo(covariant_d(u))
