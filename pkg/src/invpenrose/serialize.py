"""JSON, LaTeX and plain-text formats for fields and forms.

Rationals are written as ``"p/q"`` strings; nothing is ever a float.  Every
emitter sorts its output so equal objects serialize to identical bytes.
"""

from __future__ import annotations

import json
import re
from typing import Any

from gmpy2 import mpq

from . import spin_index as si
from .coeff_ring import ChartScalar, GaussianRational, Polynomial, RingError, fmt_q, layout
from .fields import FieldError, SymSpinorField, canonical_key
from .form_calculus import TwistedForm, bits, form_layout
from .twistor_chart import Chart


class FormatError(ValueError):
    """Malformed field or form document."""


_VAR_RE = re.compile(r"^(x|w|wb)(\d)(\d?)$")


def _var_index(lay, name: str) -> int:
    m = _VAR_RE.match(name)
    if not m:
        raise FormatError(f"unknown variable name {name!r}")
    kind, a, b = m.group(1), int(m.group(2)), m.group(3)
    try:
        if kind == "x":
            if b:
                a = int(m.group(2) + b)
            if not 1 <= a <= lay.nx:
                raise FormatError(f"variable {name} out of range")
            return lay.x(a)
        if not b:
            raise FormatError(f"variable {name} needs two indices")
        fn = lay.w if kind == "w" else lay.wbar
        return fn(a, int(b))
    except KeyError:
        raise FormatError(f"variable {name} out of range") from None


def _parse_q(s: Any) -> mpq:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"rational must be a string or integer, got {s!r}")
    try:
        return GaussianRational.parse(s, 0).re
    except RingError as exc:
        raise FormatError(str(exc)) from exc


def poly_to_json(p: Polynomial) -> list[dict]:
    lay = p.layout
    out = []
    for exps, (re_, im_) in p.sorted_terms():
        out.append(
            {
                "exps": {lay.name(v): e for v, e in enumerate(exps) if e},
                "re": fmt_q(re_),
                "im": fmt_q(im_),
            }
        )
    return out


def poly_from_json(n: int, items: Any) -> Polynomial:
    lay = layout(n)
    if not isinstance(items, list):
        raise FormatError("poly must be a list of terms")
    terms = []
    for t in items:
        if not isinstance(t, dict) or "exps" not in t:
            raise FormatError("each poly term needs 'exps'")
        exps = t["exps"]
        if not isinstance(exps, dict):
            raise FormatError("'exps' must be an object")
        vec = [0] * lay.nvars
        for name, e in exps.items():
            if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                raise FormatError(f"bad exponent {e!r} for {name}")
            vec[_var_index(lay, name)] += e
        terms.append((vec, (_parse_q(t.get("re", "0")), _parse_q(t.get("im", "0")))))
    try:
        return Polynomial.from_exps(lay, terms)
    except RingError as exc:
        raise FormatError(str(exc)) from exc


# ---- fields


def field_to_json(phi: SymSpinorField) -> dict:
    terms = []
    for key in sorted(phi.components, key=lambda k: [(len(i), i) for i in k]):
        terms.append({"indices": [list(i) for i in key], "poly": poly_to_json(phi.components[key])})
    return {"n": phi.n, "m": phi.m, "parity": si.parity_str(phi.parity), "terms": terms}


def field_from_json(doc: Any) -> SymSpinorField:
    if not isinstance(doc, dict):
        raise FormatError("field document must be an object")
    try:
        n, m, parity = doc["n"], doc["m"], doc["parity"]
    except KeyError as exc:
        raise FormatError(f"field document lacks {exc}") from None
    if not isinstance(n, int) or not isinstance(m, int) or isinstance(n, bool):
        raise FormatError("n and m must be integers")
    if not 2 <= n <= 5 or m < 0:
        raise FormatError("need 2 <= n <= 5 and m >= 0")
    try:
        par = si.parse_parity(parity)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    comps: dict = {}
    for t in doc.get("terms", []):
        if not isinstance(t, dict) or "indices" not in t or "poly" not in t:
            raise FormatError("each field term needs 'indices' and 'poly'")
        idx = t["indices"]
        if not isinstance(idx, list) or not all(isinstance(i, list) for i in idx):
            raise FormatError("'indices' must be a list of integer lists")
        if len(idx) != m:
            raise FormatError(f"term has {len(idx)} indices, expected {m}")
        try:
            reduced = []
            unit = si.UNIT_ONE
            for seq in idx:
                r = si.reduce_dual(tuple(seq), n)
                reduced.append(r.index)
                unit = si.unit_mul(unit, r.unit)
        except (si.MultiIndexError, TypeError) as exc:
            raise FormatError(f"bad index {idx}: {exc}") from None
        key = canonical_key(reduced)
        p = poly_from_json(n, t["poly"]).scale(si.unit_value(si.unit_conj(unit)))
        comps[key] = comps[key] + p if key in comps else p
    try:
        return SymSpinorField(n, m, par, comps)
    except FieldError as exc:
        raise FormatError(str(exc)) from None


# ---- forms


def _mono_key(m: int):
    return (bin(m).count("1"), bits(m))


def form_to_json(u: TwistedForm) -> dict:
    fl = u.layout
    if len(u.ring.denominators) != 1:
        raise FormatError("only chart forms (denominator N) are serializable")
    terms = []
    for m in sorted(u.terms, key=_mono_key):
        c = u.terms[m]
        terms.append(
            {
                "covectors": [str(x) for x in fl.covectors(m)],
                "npow": c.npow,
                "poly": poly_to_json(c.num),
            }
        )
    return {
        "kind": "twisted_form",
        "n": u.chart.n,
        "parity": si.parity_str(u.chart.parity),
        "base": list(u.chart.base),
        "charge": u.charge,
        "terms": terms,
    }


_COV_RE = re.compile(r"^(e|dw|dwb|abar)(\d+)$")


def _covector_bit(fl, name: str) -> int:
    m = _COV_RE.match(name)
    if not m:
        raise FormatError(f"unknown covector {name!r}")
    kind, digits = m.group(1), m.group(2)
    try:
        if kind == "e":
            a = int(digits)
            if not 1 <= a <= 2 * fl.n:
                raise FormatError(f"covector {name} out of range")
            return fl.e(a)
        if kind == "abar":
            k = int(digits)
            if not 1 <= k <= fl.n:
                raise FormatError(f"covector {name} out of range")
            return fl.abar(k)
        if len(digits) != 2:
            raise FormatError(f"covector {name} needs two indices")
        i, j = int(digits[0]), int(digits[1])
        return fl.dw(i, j) if kind == "dw" else fl.dwb(i, j)
    except ValueError:
        raise FormatError(f"covector {name} out of range") from None


def form_from_json(doc: Any) -> TwistedForm:
    if not isinstance(doc, dict) or doc.get("kind") != "twisted_form":
        raise FormatError("not a twisted_form document")
    try:
        n, parity, base, charge = doc["n"], doc["parity"], doc["base"], doc["charge"]
    except KeyError as exc:
        raise FormatError(f"form document lacks {exc}") from None
    if not isinstance(n, int) or not 2 <= n <= 5:
        raise FormatError("n must be an integer in 2..5")
    if not isinstance(charge, int):
        raise FormatError("charge must be an integer")
    try:
        chart = chart_for(n, base, parity)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    fl = form_layout(n)
    out = TwistedForm.zero(chart, charge)
    for t in doc.get("terms", []):
        if not isinstance(t, dict):
            raise FormatError("form term must be an object")
        sign, mask = 1, 0
        for name in t.get("covectors", []):
            b = _covector_bit(fl, str(name))
            if mask & (1 << b):
                sign = 0
                break
            if bin(mask >> (b + 1)).count("1") & 1:
                sign = -sign
            mask |= 1 << b
        if not sign:
            continue
        npow = t.get("npow", 0)
        if not isinstance(npow, int) or npow < 0:
            raise FormatError("npow must be a non-negative integer")
        p = poly_from_json(n, t.get("poly", []))
        coeff = chart.ring.scalar(p if sign > 0 else -p, npow)
        if coeff:
            out = out + TwistedForm(chart, charge, {mask: coeff})
    return out


_CHARTS: dict = {}


def chart_for(n: int, base, parity=None) -> Chart:
    """Shared chart objects so repeated loads reuse caches."""
    if not isinstance(base, (list, tuple)) or not all(isinstance(b, int) for b in base):
        raise FormatError("base must be a list of integers")
    key = (n, tuple(base))
    c = _CHARTS.get(key)
    if c is None:
        c = _CHARTS[key] = Chart(n, tuple(base))
    if parity is not None and si.parse_parity(parity) != c.parity:
        raise FormatError("base index parity does not match the stated parity")
    return c


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


# ---- LaTeX and text


def _latex_var(name: str) -> str:
    m = _VAR_RE.match(name)
    kind, a, b = m.group(1), m.group(2), m.group(3)
    if kind == "x":
        return f"x_{{{a}{b}}}"
    if kind == "w":
        return f"w_{{{a}{b}}}"
    return f"\\bar w_{{{a}{b}}}"


def _latex_q(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"\\frac{{{q.numerator}}}{{{q.denominator}}}"


def _latex_c(c) -> str:
    re_, im_ = c
    if not im_:
        return _latex_q(re_)
    if not re_:
        if abs(im_) == 1:
            return "i" if im_ > 0 else "-i"
        return _latex_q(im_) + "i"
    sign = "+" if im_ > 0 else "-"
    return f"\\left({_latex_q(re_)}{sign}{_latex_q(abs(im_))}i\\right)"


def poly_to_latex(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    lay = p.layout
    parts = []
    for exps, c in p.sorted_terms():
        mono = " ".join(
            _latex_var(lay.name(v)) + (f"^{{{e}}}" if e > 1 else "") for v, e in enumerate(exps) if e
        )
        cs = _latex_c(c)
        if mono and c == (1, 0):
            parts.append(mono)
        elif mono and c == (-1, 0):
            parts.append("-" + mono)
        else:
            parts.append((cs + " " + mono).strip())
    return " + ".join(parts).replace("+ -", "- ")


def _latex_cov(name: str) -> str:
    m = _COV_RE.match(name)
    kind, d = m.groups()
    if kind == "e":
        return f"e^{{{d}}}"
    if kind == "abar":
        return f"\\bar\\alpha^{{{d}}}"
    if kind == "dw":
        return f"dw_{{{d}}}"
    return f"d\\bar w_{{{d}}}"


def form_to_latex(u: TwistedForm) -> str:
    fl = u.layout
    if len(u.ring.denominators) != 1:
        raise FormatError("only chart forms (denominator N) have a LaTeX form")
    if not u.terms:
        return "0"
    lines = []
    for m in sorted(u.terms, key=_mono_key):
        c = u.terms[m]
        cov = " \\wedge ".join(_latex_cov(str(x)) for x in fl.covectors(m)) or "1"
        num = poly_to_latex(c.num)
        coeff = f"\\frac{{{num}}}{{N^{{{c.npow}}}}}" if c.npow else f"\\left({num}\\right)"
        lines.append(f"{coeff}\\, {cov}")
    body = " \\\\\n&+ ".join(lines)
    header = (
        f"% n={u.chart.n} parity={si.parity_str(u.chart.parity)} "
        f"base={list(u.chart.base)} charge={u.charge}\n"
    )
    return header + "\\begin{aligned}\n& " + body + "\n\\end{aligned}\n"


def form_to_text(u: TwistedForm) -> str:
    fl = u.layout
    lines = [
        f"n={u.chart.n} parity={si.parity_str(u.chart.parity)} base={list(u.chart.base)} charge={u.charge}"
    ]
    for m in sorted(u.terms, key=_mono_key):
        c = u.terms[m]
        cov = "^".join(str(x) for x in fl.covectors(m)) or "1"
        if len(c.pows) == 1:
            den = f" / N^{c.npow}" if c.npow else ""
            lines.append(f"{cov}: ({c.num.to_str()}){den}")
        else:
            lines.append(f"{cov}: {c.to_str()}")
    return "\n".join(lines) + "\n"


def form_stats(u: TwistedForm) -> dict:
    npows = [c.npow for c in u.terms.values()]
    return {
        "terms": len(u.terms),
        "npow_min": min(npows, default=0),
        "npow_max": max(npows, default=0),
        "monomials": sum(len(c.num.terms) for c in u.terms.values()),
    }


def scalar_to_json(c: ChartScalar) -> dict:
    return {"npow": c.npow, "poly": poly_to_json(c.num)}
