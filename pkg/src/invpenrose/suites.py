"""Seeded verification suites and their JSON reports.

A suite plans a list of independent :class:`Case` objects (plain tuples, so
they pickle), runs each one to a :class:`CaseResult`, and aggregates the
results in planning order.  Nothing in a report depends on timing or on how
many worker processes were used.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Callable

from gmpy2 import mpq

from . import fields as F
from . import operators as O
from . import sampling as S
from . import serialize as ser
from . import spin_index as si
from .coeff_ring import GaussianRational, Polynomial, layout
from .exact_linalg import rank
from .form_calculus import (
    FormTypeError,
    GeneralVectorField,
    TwistedForm,
    bracket,
    covariant_d,
    curvature,
    curvature_pairing,
    dbar,
    expand_abar,
    form_layout,
    interior,
    lie,
    project_antiholo,
    project_holo_part,
    recast_form,
    wedge,
)
from .twistor_chart import Chart, check_quadrics, four_term_residual, pfaffian_matchings

SUITES = ("reduction", "quadrics", "localdeliv", "vectorfield", "operators", "comp-e", "dbar-closed", "four-dim")

# supported n per suite (inclusive)
N_RANGE = {
    "reduction": (2, 5),
    "quadrics": (2, 4),
    "localdeliv": (2, 4),
    "vectorfield": (2, 4),
    "operators": (2, 3),
    "comp-e": (2, 3),
    "dbar-closed": (2, 3),
    "four-dim": (2, 2),
}

DEFAULT_DEGREE = {"comp-e": 2, "dbar-closed": 3, "four-dim": 3, "operators": 2}

REDUCTION_SAMPLES = 500


class SuiteError(ValueError):
    """Unknown suite or unsupported parameters (a usage error)."""


@dataclass(frozen=True)
class Case:
    suite: str
    label: str
    params: tuple


@dataclass
class CaseResult:
    label: str
    ok: bool
    detail: str = ""
    counterexample: Any = None

    def to_json(self) -> dict:
        out: dict = {"label": self.label, "ok": self.ok}
        if self.detail:
            out["detail"] = self.detail
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteReport:
    suite: str
    n: int
    seed: int
    max_degree: int | None
    cases: list[CaseResult] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> int:
        return sum(1 for c in self.cases if c.ok)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases)

    def to_json(self) -> dict:
        # wall time is deliberately absent: reports must be reproducible byte for byte
        return {
            "suite": self.suite,
            "n": self.n,
            "seed": self.seed,
            "max_degree": self.max_degree,
            "case_count": len(self.cases),
            "passed": self.passed,
            "failed": len(self.cases) - self.passed,
            "ok": self.ok,
            "cases": [c.to_json() for c in self.cases],
        }


# ---------------------------------------------------------------------------
# shared helpers


@lru_cache(maxsize=None)
def chart(n: int, base: tuple = ()) -> Chart:
    return Chart(n, tuple(base))


def _parity_base(parity: int) -> tuple:
    return () if parity == si.EVEN else (1,)


def _fail_forms(**forms) -> dict:
    return {k: ser.form_to_json(v) for k, v in forms.items()}


def _poly_payload(**polys) -> dict:
    return {k: ser.poly_to_json(p) for k, p in polys.items()}


class _Checks:
    """Collects named sub-check failures of one case."""

    def __init__(self, label: str):
        self.label = label
        self.failed: list[str] = []
        self.payload: dict | None = None

    def check(self, name: str, ok: bool, payload: Callable[[], Any] | None = None) -> None:
        if ok:
            return
        self.failed.append(name)
        if self.payload is None and payload is not None:
            self.payload = {"check": name, "residual": payload()}

    def result(self) -> CaseResult:
        if not self.failed:
            return CaseResult(self.label, True)
        return CaseResult(self.label, False, "failed: " + ", ".join(self.failed), self.payload)


# ---------------------------------------------------------------------------
# reduction


def _plan_reduction(n, seed, deg):
    return [Case("reduction", f"seq{k}", (n, seed, k)) for k in range(REDUCTION_SAMPLES)]


def _run_reduction(case: Case) -> CaseResult:
    n, seed, k = case.params
    rng = S.rng_for(seed, "reduction", n, k)
    seq = tuple(rng.randint(1, 2 * n) for _ in range(rng.randint(0, 3 * n)))
    ck = _Checks(case.label)
    right = si.reduce_theta(seq, n)
    left = si.reduce_theta_left(seq, n)
    rand = si.reduce_theta_random(seq, n, S.rng_for(seed, "strategy", n, k))
    dual = si.reduce_dual(seq, n)
    payload = lambda: {"sequence": list(seq), "right": repr(right), "left": repr(left), "random": repr(rand)}
    ck.check("left-vs-right", left == right, payload)
    ck.check("random-vs-right", rand == right, payload)
    ck.check("dual-conjugate", dual.index == right.index and dual.unit == si.unit_conj(right.unit), payload)
    ck.check("reduced", list(right.index) == sorted(set(right.index)) and all(1 <= t <= n for t in right.index), payload)
    return ck.result()


# ---------------------------------------------------------------------------
# quadrics: the three quadric relations, the four-term relation and the Pfaffian oracle


def _plan_quadrics(n, seed, deg):
    out = []
    for base in si.all_reduced(n):
        for I in si.all_reduced(n):
            out.append(Case("quadrics", f"base{list(base)}-I{list(I)}", (n, base, I)))
        out.append(Case("quadrics", f"base{list(base)}-four-term", (n, base, "four")))
        out.append(Case("quadrics", f"base{list(base)}-pfaffian", (n, base, "pfaffian")))
    return out


def z_oracle(c: Chart, J: tuple) -> Polynomial:
    """``z^J`` rebuilt with the permutation Pfaffian instead of the recursive one."""
    d = si.reduce_dual(J, c.n)
    if si.parity(d.index) != c.parity:
        return Polynomial.zero(c.layout)
    rows = si.sym_diff(c.base, d.index)
    s = si.reduce_theta(tuple(rows) + c.base, c.n)
    return pfaffian_matchings(c.n, rows).scale(si.unit_value(si.unit_mul(d.unit, s.unit)))


def _run_quadrics(case: Case) -> CaseResult:
    n, base, I = case.params
    c = chart(n, base)
    ck = _Checks(case.label)
    R = si.all_reduced(n)
    if I == "four":
        for J in R:
            for quad in itertools.combinations(range(1, 2 * n + 1), 4):
                r = four_term_residual(c, J, quad)
                ck.check(f"four-term J={list(J)} {quad}", not r.terms, lambda: _poly_payload(residual=r))
        return ck.result()
    if I == "pfaffian":
        for J in R:
            z, o = c.z(J), z_oracle(c, J)
            ck.check(f"pfaffian J={list(J)}", z == o, lambda: _poly_payload(z=z, oracle=o))
        ck.check("z(I)=1", c.z(c.base) == Polynomial.const(c.layout, 1))
        for i, j in c.layout.pairs:
            ck.check(f"z(ijI)=w{i}{j}", c.z((i, j) + c.base) == Polynomial.var(c.layout, c.layout.w(i, j)))
        return ck.result()
    for J in R:
        for a in range(1, 2 * n + 1):
            for b in range(1, 2 * n + 1):
                res = check_quadrics(c, I, J, a, b)
                for k, r in res.items():
                    if r.terms:
                        ck.check(f"relation {k} J={list(J)} a={a} b={b}", False, lambda: _poly_payload(residual=r))
    return ck.result()


# ---------------------------------------------------------------------------
# localdeliv: dz^J/dw_ij


def _plan_localdeliv(n, seed, deg):
    return [Case("localdeliv", f"base{list(base)}", (n, base)) for base in si.all_reduced(n)]


def _run_localdeliv(case: Case) -> CaseResult:
    n, base = case.params
    c = chart(n, base)
    lay = c.layout
    ck = _Checks(case.label)
    for J in si.all_reduced(n):
        d = set(si.sym_diff(base, si.reduce_dual(J, n).index))
        for i, j in lay.pairs:
            lhs = c.z(J).partial(lay.w(i, j))
            rhs = c.z((j, i) + J) if (i in d and j in d) else Polynomial.zero(lay)
            ck.check(f"J={list(J)} w{i}{j}", lhs == rhs, lambda: _poly_payload(lhs=lhs, rhs=rhs))
    return ck.result()


# ---------------------------------------------------------------------------
# vectorfield: F_ab, brackets and the type splitting


def _plan_vectorfield(n, seed, deg):
    bases = [(), (1,)]
    out = []
    for base in bases:
        out.append(Case("vectorfield", f"base{list(base)}-flow", (n, base, "flow", seed)))
        out.append(Case("vectorfield", f"base{list(base)}-split", (n, base, "split", seed)))
        if n <= 3:
            for a in range(1, 2 * n + 1):
                out.append(Case("vectorfield", f"base{list(base)}-bracket-a{a}", (n, base, "bracket", a)))
    return out


def _vf_payload(v):
    return {f"{i}{j}": ser.scalar_to_json(c) for (i, j), c in sorted(v.components.items())}


def _run_vectorfield(case: Case) -> CaseResult:
    n, base, kind, extra = case.params
    c = chart(n, base)
    ck = _Checks(case.label)
    idx = range(1, 2 * n + 1)
    if kind == "flow":
        for a in idx:
            for b in idx:
                if a == b:
                    continue
                Fv, oracle = c.vector_field_F(a, b), c.vector_field_F_flow(a, b)
                ck.check(f"flow F{a}{b}", Fv == oracle, lambda: {"F": _vf_payload(Fv), "oracle": _vf_payload(oracle)})
                ck.check(f"antisymmetry F{a}{b}", Fv == -c.vector_field_F(b, a))
        return ck.result()
    if kind == "bracket":
        a = extra

        def gv(p, q):
            return GeneralVectorField.from_vertical(c.vector_field_F(p, q))

        def delta(p, q):
            return 1 if p == q else 0

        for b in idx:
            if b == a:
                continue
            for cc in idx:
                for d in idx:
                    if cc == d:
                        continue
                    lhs = bracket(gv(a, b), gv(cc, d))
                    rhs = GeneralVectorField(c)
                    for coef, p, q in (
                        (-delta(a, cc), b, d),
                        (delta(a, d), b, cc),
                        (delta(b, cc), a, d),
                        (-delta(b, d), a, cc),
                    ):
                        if coef and p != q:
                            rhs = rhs + gv(p, q).scale(coef)
                    ck.check(f"[F{a}{b},F{cc}{d}]", lhs == rhs)
        return ck.result()
    # split
    sp = c.antiholo_split()
    al = c.alpha_basis()
    alb = [x.conjugate() for x in al]
    for a in range(2 * n):
        for k in range(n):
            ck.check(f"q=conj(p) a={a + 1} k={k + 1}", sp.q[a][k] == sp.p[a][k].conjugate())
    ck.check(
        "determinant=unit*N^k",
        sp.det == c.N ** sp.n_power * Polynomial.const(c.layout, sp.unit),
    )
    fl = form_layout(n)
    for k in range(n):
        ak = TwistedForm.from_horizontal(al[k], 0)
        ck.check(f"annihilates alpha{k + 1}", not project_antiholo(ak))
        abk = TwistedForm.from_horizontal(alb[k], 0)
        ck.check(
            f"fixes abar{k + 1}",
            project_antiholo(abk) == TwistedForm(c, 0, {1 << fl.abar(k + 1): c.ring.const(1)}),
        )
    # idempotence and rank at random points with wb = conj(w)
    rng = S.rng_for(extra, "split-points", n, base)
    lay = c.layout
    for t in range(3):
        point = {}
        for v in range(lay.nx):
            point[v] = mpq(rng.randint(-4, 4), rng.randint(1, 3))
        for i, j in lay.pairs:
            val = GaussianRational(mpq(rng.randint(-3, 3), rng.randint(1, 3)), mpq(rng.randint(-3, 3), rng.randint(1, 3)))
            point[lay.w(i, j)] = val
            point[lay.wbar(i, j)] = val.conjugate()
        # P[a][b]: coefficient of e^b in the (0,1) part of e^a
        P = [
            [sum((sp.q[a][k] * alb[k].get(b + 1) for k in range(n)), c.ring.zero()).evaluate(point) for b in range(2 * n)]
            for a in range(2 * n)
        ]
        P2 = [[sum((P[a][r] * P[r][b] for r in range(2 * n)), GaussianRational()) for b in range(2 * n)] for a in range(2 * n)]
        ck.check(f"idempotent at point {t}", P2 == P)
        rows = [{b: P[a][b].pair for b in range(2 * n) if P[a][b]} for a in range(2 * n)]
        ck.check(f"rank n at point {t}", rank(rows) == n)
    return ck.result()


# ---------------------------------------------------------------------------
# operators


def _plan_operators(n, seed, deg):
    out = [Case("operators", f"monomial{m}", (n, "mono", m, seed, deg)) for m in S.spanning_masks(n)]
    for k in range(6):
        for base in [(), (1,)]:
            out.append(Case("operators", f"random{k}-base{list(base)}", (n, "random", base, seed, k, deg)))
    out.append(Case("operators", "F-scalar", (n, "fscalar")))
    out.append(Case("operators", "basis-liftings", (n, "sbar")))
    for k in range(4):
        out.append(Case("operators", f"calculus{k}", (n, "calculus", seed, k)))
    return out


def operator_identities(u: TwistedForm, ck: _Checks, frame_def: bool = True) -> None:
    """Every exact operator identity, evaluated on one form."""
    n = u.chart.n
    Du = O.op_D(u)
    du = covariant_d(u)
    Eu = O.op_E(u)

    def res(**kw):
        return lambda: _fail_forms(**kw)

    r = Eu - (covariant_d(Du) - O.op_D(du))
    ck.check("E = dD - Dd", not r, res(residual=r))
    r = (O.op_E(Du) - O.op_D(Eu)) - (O.op_Gamma(u) - O.op_D(O.op_dH(u)).scale(2))
    ck.check("ED - DE = -2 D dH + Gamma", not r, res(residual=r))
    r = O.op_Gamma(Du) - O.op_D(O.op_Gamma(u))
    ck.check("Gamma D = D Gamma", not r, res(residual=r))
    r = O.op_dH(Du) - O.op_D(O.op_dH(u))
    ck.check("dH D = D dH", not r, res(residual=r))
    r = O.apply_D_power(Du, n)
    ck.check("D^(n+1) = 0", not r, res(residual=r))
    r = O.op_B(Du) - O.op_D(O.op_B(u))
    ck.check("[D, B] = 0", not r, res(residual=r))
    for a in range(1, 2 * n + 1):
        cx = O.commutator_x(a, u)
        r = cx - O.commutator_x_expected(a, u)
        ck.check(f"[D, x{a}] closed form", not r, res(residual=r))
        r = O.commutator_x(a, Du) - O.op_D(cx)
        ck.check(f"[[D, x{a}], D] = 0", not r, res(residual=r))
    if frame_def:
        r = O.op_D_frame_definition(u) - Du
        ck.check("D frame definition", not r, res(residual=r))
    r = O.op_D_coordinate_alpha(u) - Du
    ck.check("D alpha formula", not r, res(residual=r))


def _induction_and_series(u: TwistedForm, ck: _Checks) -> None:
    P = O.apply_D_power
    du = covariant_d(u)
    Eu, dHu, Gu = O.op_E(u), O.op_dH(u), O.op_Gamma(u)
    for k in range(1, 5):
        lhs = covariant_d(P(u, k)) - P(du, k)
        rhs = P(Eu, k - 1).scale(k) - P(dHu, k - 1).scale(k * (k - 1))
        if k >= 2:
            rhs = rhs + P(Gu, k - 2).scale(Fraction(k * (k - 1), 2))
        r = lhs - rhs
        ck.check(f"induction k={k}", not r, lambda: _fail_forms(residual=r))
    powers = O.d_powers(u)
    for l in range(0, 5):
        r = (
            O.op_D(O.apply_F_deriv(l + 2, u, powers))
            + O.apply_F_deriv(l + 1, u, powers).scale(l + 1)
            - O.apply_F_deriv(l, u, powers)
        )
        ck.check(f"F recurrence l={l}", not r, lambda: _fail_forms(residual=r))


def _run_operators(case: Case) -> CaseResult:
    n, kind = case.params[:2]
    ck = _Checks(case.label)
    if kind == "mono":
        _, _, mask, seed, deg = case.params
        c = chart(n)
        u = S.random_monomial_form(c, mask, S.rng_for(seed, "op-mono", n, mask), degree=deg)
        operator_identities(u, ck)
        if not mask & form_layout(n).dwb_mask:
            ck.check("D vanishes without dwb", not O.op_D(u))
        return ck.result()
    if kind == "random":
        _, _, base, seed, k, deg = case.params
        c = chart(n, base)
        u = S.random_form(c, S.rng_for(seed, "op-random", n, base, k), nterms=3, degree=deg)
        operator_identities(u, ck)
        _induction_and_series(u, ck)
        # B is zeroth order
        f = S.random_poly(c.layout, S.rng_for(seed, "op-B", n, base, k), 2)
        r = O.op_B(u.scale(f)) - O.op_B(u).scale(f)
        ck.check("B tensorial", not r, lambda: _fail_forms(residual=r))
        # D preserves (0,q) type
        fl = form_layout(n)
        rng = S.rng_for(seed, "op-type", n, base, k)
        mask = rng.getrandbits(fl.nbits) & (fl.abar_mask | fl.dwb_mask)
        w = expand_abar(S.random_monomial_form(c, mask, rng, degree=deg))
        r = project_holo_part(O.op_D(w))
        ck.check("D preserves type", not r, lambda: _fail_forms(residual=r))
        return ck.result()
    if kind == "fscalar":
        for l in range(0, 8):
            ck.check(f"F^({l})(0) = 1/{l}!", O.F_deriv_scalar(l, 0) == Fraction(1, factorial(l)))
        return ck.result()
    if kind == "sbar":
        for base in [(), (1,)]:
            c = chart(n, base)
            basis = si.spin_basis(n, c.parity)
            for m in range(0, 3):
                for key in itertools.product(basis, repeat=m):
                    s = F.basis_lift(c, key)
                    ck.check(f"D sbar base={list(base)} {[list(k) for k in key]}", not O.op_D(s))
        return ck.result()
    if kind == "calculus":
        _, _, seed, k = case.params
        return _run_calculus(n, seed, k, ck)
    raise SuiteError(f"unknown operators case {kind}")


def _run_calculus(n: int, seed: int, k: int, ck: _Checks) -> CaseResult:
    """Identities of the twisted exterior calculus the operators rest on."""
    c = chart(n, () if k % 2 == 0 else (1,))
    rng = S.rng_for(seed, "calculus", n, k)
    fl = form_layout(n)
    v, v2 = S.random_vector_field(c, rng), S.random_vector_field(c, rng)
    u = S.random_form(c, rng, nterms=2, degree=1)
    u2 = S.random_form(c, rng, nterms=2, degree=1, charge=0)
    r = lie(v, lie(v2, u)) - lie(v2, lie(v, u)) - lie(bracket(v, v2), u) - u.scale(curvature_pairing(v, v2, u.charge))
    ck.check("[L_v, L_v'] - L_[v,v'] = Omega(v,v')", not r, lambda: _fail_forms(residual=r))
    r = lie(v, wedge(u, u2)) - wedge(lie(v, u), u2) - wedge(u, lie(v, u2))
    ck.check("Lie derivative is a derivation", not r, lambda: _fail_forms(residual=r))
    ea = GeneralVectorField.e(c, rng.randint(1, 2 * n))
    r = lie(ea, interior(v, u)) - interior(v, lie(ea, u)) - interior(bracket(ea, v), u)
    ck.check("[L_e, i(v)] = i([e, v])", not r, lambda: _fail_forms(residual=r))
    f = S.random_monomial_form(c, 0, rng, charge=u.charge)
    r = covariant_d(covariant_d(f)) - wedge(curvature(c, u.charge).with_charge(0), f)
    ck.check("d^2 = curvature", not r, lambda: _fail_forms(residual=r))
    if u.charge:
        ck.check("curvature nonzero", bool(curvature(c, u.charge)))
    mask = rng.getrandbits(fl.nbits) & (fl.abar_mask | fl.dwb_mask)
    w = expand_abar(S.random_monomial_form(c, mask, rng))
    try:
        r = dbar(dbar(w))
        ck.check("dbar^2 = 0", not r, lambda: _fail_forms(residual=r))
    except FormTypeError as exc:
        ck.check(f"dbar type purity ({exc})", False)
    P = project_antiholo(u)
    ck.check("projection idempotent", project_antiholo(expand_abar(P)) == P)
    # calibration: L_{Fbar_ab} of 1/N at charge 1 is -(Fbar_ab N / N) / N
    a, b = 1, 2
    Fb = GeneralVectorField.from_vertical(c.vector_field_F(a, b).conjugate())
    rho = TwistedForm.function(c, c.ring.inv_denominator(0, 1), 1)
    FN = Fb.apply(c.ring.scalar(c.N))
    expect = TwistedForm.function(c, -(FN * c.ring.inv_denominator(0, 2)), 1)
    ck.check("L_Fbar rho = -(Fbar(N)/N) rho", lie(Fb, rho) == expect)
    return ck.result()


# ---------------------------------------------------------------------------
# comp-e: the two-term formula for d Q on random (non-solution) fields


COMP_E_SAMPLES = 3


def _plan_comp_e(n, seed, deg):
    out = []
    for parity in (si.EVEN, si.ODD):
        for m in range(3):
            for k in range(COMP_E_SAMPLES):
                out.append(
                    Case("comp-e", f"{si.parity_str(parity)}-m{m}-sample{k}", (n, parity, m, seed, k, deg))
                )
    return out


def _round_trip(phi, c: Chart, Q: TwistedForm, ck: _Checks) -> None:
    j = F.lift_j(phi, c)
    r = F.vertical_component(Q) - j
    ck.check("vertical component is j(phi)", not r, lambda: _fail_forms(residual=r))
    try:
        back = F.recover_field(F.vertical_component(Q), phi.n, phi.m, phi.parity)
        ck.check("recovery reproduces phi", back == phi, lambda: ser.field_to_json(back - phi))
    except F.FieldError as exc:
        ck.check(f"recovery ({exc})", False)


def _run_comp_e(case: Case) -> CaseResult:
    n, parity, m, seed, k, deg = case.params
    c = chart(n, _parity_base(parity))
    ck = _Checks(case.label)
    phi = S.random_field(n, m, parity, S.rng_for(seed, "comp-e", n, parity, m, k), degree=deg)
    v = F.comp_E_identity(phi, c)
    ck.check("comp_E", v.ok, (lambda: _fail_forms(residual=v.residual)) if v.residual is not None else None)
    Q = F.inverse_penrose(phi, c)
    _round_trip(phi, c, Q, ck)
    return ck.result()


# ---------------------------------------------------------------------------
# dbar-closed: the whole pipeline on solution bases


@lru_cache(maxsize=None)
def _basis(n: int, m: int, parity: int, degree: int) -> tuple:
    return tuple(F.solution_basis(n, m, parity, degree))


def non_solution(n: int, m: int, parity: int) -> F.SymSpinorField:
    """A fixed field violating the field equation: ``x1^2`` (m = 0) or ``x1`` in the first component."""
    L = layout(n)
    x1 = Polynomial.var(L, L.x(1))
    key = F.component_keys(n, m, parity)[0]
    phi = F.SymSpinorField(n, m, parity, {key: x1 * x1 if m == 0 else x1})
    assert not F.is_solution(phi)
    return phi


def _plan_dbar(n, seed, deg):
    out = []
    for parity in (si.EVEN, si.ODD):
        for m in range(3):
            for i in range(len(_basis(n, m, parity, deg))):
                out.append(Case("dbar-closed", f"{si.parity_str(parity)}-m{m}-basis{i}", (n, parity, m, deg, i)))
            out.append(Case("dbar-closed", f"{si.parity_str(parity)}-m{m}-non-solution", (n, parity, m, deg, -1)))
    return out


def pipeline_residual(phi, c: Chart) -> tuple[TwistedForm, TwistedForm]:
    """``(Q_m(phi), dbar Q_m(phi))``; raises :class:`FormTypeError` on impure type."""
    Q = F.inverse_penrose(phi, c)
    return Q, dbar(Q)


def _run_dbar(case: Case) -> CaseResult:
    n, parity, m, deg, i = case.params
    c = chart(n, _parity_base(parity))
    ck = _Checks(case.label)
    phi = non_solution(n, m, parity) if i < 0 else _basis(n, m, parity, deg)[i]
    if i >= 0:
        ck.check("field equation", F.is_solution(phi))
    try:
        Q, r = pipeline_residual(phi, c)
    except FormTypeError as exc:
        ck.check(f"type purity ({exc})", False)
        return ck.result()
    if i < 0:
        ck.check("non-solution has nonzero dbar", bool(r))
        return ck.result()
    ck.check("dbar Q = 0", not r, lambda: _fail_forms(residual=r))
    ck.check("no dw components", not any(m & Q.layout.dw_mask for m in Q.terms))
    g = O.op_Gamma(F.lift_j(phi, c))
    ck.check("Gamma j = 0", not g, lambda: _fail_forms(residual=g))
    _round_trip(phi, c, Q, ck)
    return ck.result()


# ---------------------------------------------------------------------------
# four-dim: frames on R^4


def _plan_four(n, seed, deg):
    out = []
    for f in range(3):
        out.append(Case("four-dim", f"frame{f}-D", (f, "D", seed)))
        out.append(Case("four-dim", f"frame{f}-trF", (f, "trF", seed)))
    for pair in ((1, 2), (0, 1), (-1, 2)):
        out.append(Case("four-dim", f"trL{pair[0]}-{pair[1]}", (pair, "trL", seed)))
    out.append(Case("four-dim", "frame-data", (0, "data", seed)))
    for m in range(3):
        for i in range(len(_basis(2, m, si.EVEN, deg))):
            out.append(Case("four-dim", f"m{m}-basis{i}", ((m, i), "qm", deg)))
        out.append(Case("four-dim", f"m{m}-random", ((m, -1), "qm", seed)))
    return out


@lru_cache(maxsize=None)
def _frames():
    from .four_dim import identity_frame, standard_test_frames

    c = chart(2)
    return tuple(standard_test_frames(c)), identity_frame(c)


def _run_four(case: Case) -> CaseResult:
    from .four_dim import compose_frames, connection_form, frame_F, frame_F_flow, hatted_L, op_D_frame, qm_four

    which, kind, extra = case.params
    c = chart(2)
    ck = _Checks(case.label)
    frames, ident = _frames()
    if kind == "D":
        f = frames[which]
        for mask in S.spanning_masks(2):
            u = S.random_monomial_form(c, mask, S.rng_for(extra, "frame-D", which, mask))
            r = op_D_frame(f, u) - recast_form(O.op_D(u), f.ring)
            ck.check(f"frame D mask {mask}", not r, lambda: _fail_forms(residual=r))
        u = S.random_form(c, S.rng_for(extra, "frame-id", which))
        ck.check("identity frame D", op_D_frame(ident, u) == O.op_D(u))
        return ck.result()
    if kind == "trF":
        f = frames[which]
        for a in range(1, 5):
            for b in range(1, 5):
                if a != b:
                    ck.check(f"F'{a}{b} flow", frame_F(f, a, b) == frame_F_flow(f, a, b))
        return ck.result()
    if kind == "trL":
        i, j = which
        f = ident if i < 0 else frames[i]
        g = frames[j]
        f2, g2, fg = compose_frames(f, g)
        rng = S.rng_for(extra, "trL", i, j)
        for t in range(4):
            u = recast_form(S.random_form(c, rng, nterms=2), f2.ring)
            for a in range(1, 5):
                lhs = hatted_L(a, fg, u)
                rhs = TwistedForm.zero(c, u.charge, f2.ring)
                for b in range(1, 5):
                    rhs = rhs + hatted_L(b, f2, u.scale(g2.entry(b, a)))
                r = lhs - rhs
                ck.check(f"trL sample {t} a={a}", not r, lambda: _fail_forms(residual=r))
        return ck.result()
    if kind == "data":
        ck.check("identity frame has omega = 0", connection_form(ident).is_zero())
        ck.check("constant frame has omega = 0", connection_form(frames[0]).is_zero())
        ck.check("linear frame has omega != 0", not connection_form(frames[1]).is_zero())
        ck.check("quadratic frame has omega != 0", not connection_form(frames[2]).is_zero())
        u = S.random_form(c, S.rng_for(extra, "hatL"))
        for a in range(1, 5):
            ck.check(f"identity frame Lhat_{a} = L_{a}", hatted_L(a, ident, u) == lie(GeneralVectorField.e(c, a), u))
        return ck.result()
    if kind == "qm":
        m, i = which
        if i < 0:
            phi = S.random_field(2, m, si.EVEN, S.rng_for(extra, "four-qm", m))
        else:
            phi = _basis(2, m, si.EVEN, extra)[i]
        j = F.lift_j(phi, c)
        Q4 = qm_four(phi, c)
        r = O.op_D(O.op_D(j))
        ck.check("D^2 j = 0", not r, lambda: _fail_forms(residual=r))
        for f in frames:
            r = op_D_frame(f, op_D_frame(f, j))
            ck.check(f"frame {f.name} D^2 j = 0", not r)
        r = Q4 - O.apply_F_deriv(m, j).scale(factorial(m))
        ck.check("Q = m! F^(m)(D) j", not r, lambda: _fail_forms(residual=r))
        r = Q4 - F.inverse_penrose(phi, c)
        ck.check("Q = inverse_penrose", not r, lambda: _fail_forms(residual=r))
        if i >= 0:
            try:
                r = dbar(Q4)
                ck.check("dbar Q = 0", not r, lambda: _fail_forms(residual=r))
            except FormTypeError as exc:
                ck.check(f"type purity ({exc})", False)
        return ck.result()
    raise SuiteError(f"unknown four-dim case {kind}")


# ---------------------------------------------------------------------------
# driver

_PLANNERS = {
    "reduction": _plan_reduction,
    "quadrics": _plan_quadrics,
    "localdeliv": _plan_localdeliv,
    "vectorfield": _plan_vectorfield,
    "operators": _plan_operators,
    "comp-e": _plan_comp_e,
    "dbar-closed": _plan_dbar,
    "four-dim": _plan_four,
}

_RUNNERS = {
    "reduction": _run_reduction,
    "quadrics": _run_quadrics,
    "localdeliv": _run_localdeliv,
    "vectorfield": _run_vectorfield,
    "operators": _run_operators,
    "comp-e": _run_comp_e,
    "dbar-closed": _run_dbar,
    "four-dim": _run_four,
}


def run_case(case: Case) -> CaseResult:
    try:
        return _RUNNERS[case.suite](case)
    except (ArithmeticError, ValueError, TypeError, KeyError) as exc:
        # an exception inside a check is a failed case, not a crash of the suite
        return CaseResult(case.label, False, f"error: {type(exc).__name__}: {exc}")


def validate(suite: str, n: int, max_degree: int | None = None) -> None:
    if suite not in _PLANNERS:
        raise SuiteError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
    lo, hi = N_RANGE[suite]
    if not lo <= n <= hi:
        raise SuiteError(f"suite {suite} supports n in {lo}..{hi}, got {n}")
    if max_degree is not None and not 0 <= max_degree <= 4:
        raise SuiteError("max-degree must be in 0..4")


def plan(suite: str, n: int, seed: int = 0, max_degree: int | None = None) -> list[Case]:
    validate(suite, n, max_degree)
    deg = max_degree if max_degree is not None else DEFAULT_DEGREE.get(suite)
    return _PLANNERS[suite](n, seed, deg)


def default_jobs() -> int:
    env = os.environ.get("INVPENROSE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SuiteError(f"INVPENROSE_JOBS must be an integer, got {env!r}") from None
    return 1


def run_suite(suite: str, n: int, seed: int = 0, max_degree: int | None = None, jobs: int | None = None) -> SuiteReport:
    cases = plan(suite, n, seed, max_degree)
    deg = max_degree if max_degree is not None else DEFAULT_DEGREE.get(suite)
    jobs = default_jobs() if jobs is None else jobs
    t0 = time.perf_counter()
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(cases) // (4 * jobs))
            results = list(pool.map(run_case, cases, chunksize=chunk))
    else:
        results = [run_case(c) for c in cases]
    return SuiteReport(suite, n, seed, deg, results, time.perf_counter() - t0)


def run_all(n: int, seed: int = 0, max_degree: int | None = None, jobs: int | None = None) -> tuple[list[SuiteReport], list[str]]:
    """Every suite that supports ``n``; returns the reports and the skipped suite names."""
    reports, skipped = [], []
    for name in SUITES:
        lo, hi = N_RANGE[name]
        if lo <= n <= hi:
            reports.append(run_suite(name, n, seed, max_degree, jobs))
        else:
            skipped.append(name)
    if not reports:
        raise SuiteError(f"no suite supports n = {n}")
    return reports, skipped
