"""Exact zeta expressions.

An expression is a finite sum of terms ``coeff * rat(s) * mono(s)`` where

* ``coeff`` is a formal rational combination of constant products of zhat(n),
* ``rat`` is a rational function kept as a multiset of linear factors,
* ``mono`` is a product of zhat(k s + c) with k >= 1.

The same algebra is reused with xi in place of zhat (``basis="xi"``); both
functions obey f(x) = f(1 - x), so canonicalization is identical.
Nothing numeric happens here: identities among zhat(n) values are never assumed.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import DivisionNotExact, IndexSetMismatch, InternalInconsistency, NotCleared


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _fmt_num(x: Fraction) -> str:
    x = _q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# linear factors


@dataclass(frozen=True, order=True)
class LinearFactor:
    """The affine form k*s + c."""

    k: int
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "c", _q(self.c))

    def __call__(self, s):
        if isinstance(s, Fraction):
            return self.k * s + self.c
        return self.k * s + float(self.c)

    def reflect(self, C) -> "LinearFactor":
        """The form obtained from s -> -C - s (not normalized)."""
        return LinearFactor(-self.k, self.c - self.k * _q(C))

    def primitive(self) -> tuple[Fraction, "LinearFactor"]:
        """Split k s + c = scale * (k' s + c') with k' > 0 and integral coprime k', c'."""
        if self.k == 0:
            raise ValueError("constant form has no primitive part")
        d = self.c.denominator
        kk, cc = self.k * d, self.c.numerator
        g = gcd(kk, cc)
        if kk < 0:
            g = -g
        return Fraction(g, d), LinearFactor(kk // g, cc // g)

    def root(self) -> Fraction:
        return -self.c / self.k

    def canonical_arg(self) -> "LinearFactor":
        """Representative under x ~ 1 - x: k > 0, or k = 0 with c >= 1."""
        if self.k < 0 or (self.k == 0 and self.c < 1):
            return LinearFactor(-self.k, 1 - self.c)
        return self

    def text(self, var: str = "s") -> str:
        if self.k == 0:
            return _fmt_num(self.c)
        head = var if self.k == 1 else f"{self.k}*{var}"
        if self.c == 0:
            return head
        sign = "+" if self.c > 0 else "-"
        return f"{head}{sign}{_fmt_num(abs(self.c))}"

    def latex(self) -> str:
        if self.k == 0:
            return _latex_num(self.c)
        head = "s" if self.k == 1 else f"{self.k}s"
        if self.c == 0:
            return head
        sign = "+" if self.c > 0 else "-"
        return f"{head}{sign}{_latex_num(abs(self.c))}"


def _latex_num(x: Fraction) -> str:
    x = _q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"\\tfrac{{{x.numerator}}}{{{x.denominator}}}"


def lf(k: int, c) -> LinearFactor:
    return LinearFactor(k, c)


# ---------------------------------------------------------------------------
# products of zhat (or xi) values


@dataclass(frozen=True, order=True)
class ZhatMonomial:
    """prod zhat(k s + c)^e over canonical arguments; ``items`` is sorted, exponents nonzero."""

    items: tuple = ()

    @classmethod
    def from_map(cls, exps) -> "ZhatMonomial":
        acc: dict = defaultdict(int)
        for f, e in dict(exps).items() if not isinstance(exps, (list, tuple)) else exps:
            if e:
                acc[f.canonical_arg()] += e
        return cls(tuple(sorted((f, e) for f, e in acc.items() if e)))

    @classmethod
    def single(cls, k: int, c, e: int = 1) -> "ZhatMonomial":
        return cls.from_map([(LinearFactor(k, c), e)])

    @property
    def exponents(self) -> dict:
        return dict(self.items)

    def __mul__(self, other: "ZhatMonomial") -> "ZhatMonomial":
        return ZhatMonomial.from_map(list(self.items) + list(other.items))

    def inverse(self) -> "ZhatMonomial":
        return ZhatMonomial(tuple((f, -e) for f, e in self.items))

    def __pow__(self, n: int) -> "ZhatMonomial":
        return ZhatMonomial.from_map([(f, e * n) for f, e in self.items])

    def is_one(self) -> bool:
        return not self.items

    def split(self) -> tuple["ZhatMonomial", "ZhatMonomial"]:
        """(constant part, part depending on s)."""
        const = tuple((f, e) for f, e in self.items if f.k == 0)
        var = tuple((f, e) for f, e in self.items if f.k != 0)
        return ZhatMonomial(const), ZhatMonomial(var)

    def reflect(self, C) -> "ZhatMonomial":
        return ZhatMonomial.from_map([(f.reflect(C), e) for f, e in self.items])

    def min_exponent(self) -> int:
        return min((e for _, e in self.items), default=0)

    def sort_key(self):
        # larger shifts first, so zhat(s+2) precedes zhat(s+1)
        return tuple((-f.k, -f.c, -e) for f, e in reversed(self.items))


# ---------------------------------------------------------------------------
# formal constants


@dataclass(frozen=True)
class ConstantCombo:
    """Formal Q-linear combination of constant monomials prod zhat(n)^e."""

    items: tuple = ()  # sorted ((ZhatMonomial, Fraction), ...)

    @classmethod
    def from_map(cls, m) -> "ConstantCombo":
        acc: dict = defaultdict(Fraction)
        for mono, v in (m.items() if isinstance(m, dict) else m):
            if mono.split()[1].items:
                raise ValueError("ConstantCombo monomials must not depend on s")
            acc[mono] += _q(v)
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v)))

    @classmethod
    def scalar(cls, v) -> "ConstantCombo":
        return cls.from_map([(ZhatMonomial(), v)])

    @classmethod
    def monomial(cls, mono: ZhatMonomial, v=1) -> "ConstantCombo":
        return cls.from_map([(mono, v)])

    def __add__(self, other: "ConstantCombo") -> "ConstantCombo":
        return ConstantCombo.from_map(list(self.items) + list(other.items))

    def __neg__(self) -> "ConstantCombo":
        return ConstantCombo(tuple((m, -v) for m, v in self.items))

    def __sub__(self, other: "ConstantCombo") -> "ConstantCombo":
        return self + (-other)

    def __mul__(self, other) -> "ConstantCombo":
        if not isinstance(other, ConstantCombo):
            return ConstantCombo.from_map([(m, v * _q(other)) for m, v in self.items])
        return ConstantCombo.from_map([(m1 * m2, v1 * v2) for m1, v1 in self.items for m2, v2 in other.items])

    def is_zero(self) -> bool:
        return not self.items

    def as_scalar(self):
        """The rational value when the combo has no zhat symbols, else None."""
        if not self.items:
            return Fraction(0)
        if len(self.items) == 1 and self.items[0][0].is_one():
            return self.items[0][1]
        return None

    def evaluate(self, const_value) -> complex:
        """Numeric value, given const_value(n) for the symbol of argument n."""
        total = 0.0
        for mono, v in self.items:
            term = float(v)
            for f, e in mono.items:
                term *= const_value(f.c) ** e
            total += term
        return total

    def text(self, sym: str = "zhat") -> str:
        if not self.items:
            return "0"
        parts = []
        for mono, v in self.items:
            body = _mono_text(mono, sym)
            num = _fmt_num(abs(v)) if (abs(v) != 1 or not body) else ""
            txt = "*".join(x for x in (num, body) if x)
            parts.append(("-" if v < 0 else "+", txt))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, txt in parts[1:]:
            out += f" {sign} {txt}"
        return out


def _mono_text(mono: ZhatMonomial, sym: str) -> str:
    out = []
    for f, e in mono.items:
        base = f"{sym}({f.text()})"
        out.append(base if e == 1 else f"{base}^{e}")
    return "*".join(out)


# ---------------------------------------------------------------------------
# factored rational functions


def _counter_items(c) -> tuple:
    return tuple(sorted((f, m) for f, m in c.items() if m))


@dataclass(frozen=True)
class FactoredRational:
    scalar: Fraction = Fraction(1)
    num: tuple = ()  # ((LinearFactor, multiplicity), ...) primitive factors
    den: tuple = ()

    @classmethod
    def build(cls, scalar=1, num=(), den=()) -> "FactoredRational":
        """Normalize: constants folded into the scalar, factors primitive, common factors cancelled."""
        sc = _q(scalar)
        n, d = Counter(), Counter()
        for target, facs, sgn in ((n, num, 1), (d, den, -1)):
            items = facs.items() if isinstance(facs, (dict, Counter)) else ((f, 1) for f in facs)
            for f, m in items:
                if not m:
                    continue
                if f.k == 0:
                    if f.c == 0:
                        if sgn < 0:
                            raise ZeroDivisionError("zero constant in a denominator")
                        return cls(Fraction(0))
                    sc *= f.c ** (m * sgn)
                    continue
                scale, pf = f.primitive()
                sc *= scale ** (m * sgn)
                target[pf] += m
        common = n & d
        n -= common
        d -= common
        return cls(sc, _counter_items(n), _counter_items(d))

    @classmethod
    def one(cls) -> "FactoredRational":
        return cls()

    @property
    def num_counter(self) -> Counter:
        return Counter(dict(self.num))

    @property
    def den_counter(self) -> Counter:
        return Counter(dict(self.den))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.num) - sum(m for _, m in self.den)

    def monic_part(self) -> "FactoredRational":
        return FactoredRational(Fraction(1), self.num, self.den)

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        n = self.num_counter + other.num_counter
        d = self.den_counter + other.den_counter
        return FactoredRational.build(self.scalar * other.scalar, n, d)

    def inverse(self) -> "FactoredRational":
        if self.scalar == 0:
            raise ZeroDivisionError
        return FactoredRational(1 / self.scalar, self.den, self.num)

    def __truediv__(self, other: "FactoredRational") -> "FactoredRational":
        return self * other.inverse()

    def reflect(self, C) -> "FactoredRational":
        return FactoredRational.build(
            self.scalar,
            Counter({f.reflect(C): m for f, m in self.num}),
            Counter({f.reflect(C): m for f, m in self.den}),
        )

    def __call__(self, s):
        val = float(self.scalar) if not isinstance(s, Fraction) else self.scalar
        for f, m in self.num:
            val *= f(s) ** m
        for f, m in self.den:
            val /= f(s) ** m
        return val

    def leading_coefficient(self) -> Fraction:
        out = self.scalar
        for f, m in self.num:
            out *= Fraction(f.k) ** m
        for f, m in self.den:
            out /= Fraction(f.k) ** m
        return out

    def sort_key(self):
        return (self.den, self.num)


# ---------------------------------------------------------------------------
# polynomial helpers (coefficients low to high, Fractions)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_from_factors(factors) -> list:
    out = [Fraction(1)]
    for f, m in factors.items() if isinstance(factors, dict) else factors:
        for _ in range(m):
            out = _poly_mul(out, [f.c, Fraction(f.k)])
    return out


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_eval(a, x):
    val = Fraction(0)
    for coef in reversed(a):
        val = val * x + coef
    return val


def _poly_div_linear(a, f: LinearFactor):
    """Exact quotient of a by (k s + c); caller guarantees divisibility."""
    r = f.root()
    out = [Fraction(0)] * (len(a) - 1)
    carry = Fraction(0)
    for i in range(len(a) - 1, 0, -1):
        carry = a[i] + carry * r if i < len(a) - 1 else a[i]
        out[i - 1] = carry
    return [x / f.k for x in out]


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class ZetaExpression:
    terms: tuple = ()  # ((ConstantCombo, FactoredRational, ZhatMonomial), ...) in normal form
    basis: str = "zhat"

    @classmethod
    def from_terms(cls, terms, basis: str = "zhat") -> "ZetaExpression":
        acc: dict = {}
        for coeff, rat, mono in terms:
            if rat.scalar == 0 or coeff.is_zero():
                continue
            const, var = mono.split()
            coeff = coeff * ConstantCombo.monomial(const, rat.scalar)
            key = (rat.monic_part(), var)
            acc[key] = acc[key] + coeff if key in acc else coeff
        out = [(c, r, m) for (r, m), c in acc.items() if not c.is_zero()]
        out.sort(key=lambda t: (t[2].sort_key(), t[1].sort_key()))
        return cls(tuple(out), basis)

    @classmethod
    def zero(cls, basis: str = "zhat") -> "ZetaExpression":
        return cls((), basis)

    @classmethod
    def constant(cls, v, basis: str = "zhat") -> "ZetaExpression":
        return cls.from_terms([(ConstantCombo.scalar(v), FactoredRational(), ZhatMonomial())], basis)

    def normalize(self) -> "ZetaExpression":
        return ZetaExpression.from_terms(self.terms, self.basis)

    def _check(self, other):
        if self.basis != other.basis:
            raise ValueError(f"cannot combine {self.basis} and {other.basis} expressions")

    def __add__(self, other: "ZetaExpression") -> "ZetaExpression":
        self._check(other)
        return ZetaExpression.from_terms(self.terms + other.terms, self.basis)

    def __neg__(self) -> "ZetaExpression":
        return ZetaExpression(tuple((-c, r, m) for c, r, m in self.terms), self.basis)

    def __sub__(self, other: "ZetaExpression") -> "ZetaExpression":
        return self + (-other)

    def __mul__(self, other) -> "ZetaExpression":
        if isinstance(other, ZetaExpression):
            self._check(other)
            return ZetaExpression.from_terms(
                [(c1 * c2, r1 * r2, m1 * m2) for c1, r1, m1 in self.terms for c2, r2, m2 in other.terms],
                self.basis,
            )
        if isinstance(other, ConstantCombo):
            return ZetaExpression.from_terms([(c * other, r, m) for c, r, m in self.terms], self.basis)
        if isinstance(other, FactoredRational):
            return ZetaExpression.from_terms([(c, r * other, m) for c, r, m in self.terms], self.basis)
        if isinstance(other, ZhatMonomial):
            return ZetaExpression.from_terms([(c, r, m * other) for c, r, m in self.terms], self.basis)
        return ZetaExpression.from_terms([(c * _q(other), r, m) for c, r, m in self.terms], self.basis)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def reflect(self, C) -> "ZetaExpression":
        return substitute_reflect(self, C)

    def to_zhat(self) -> "ZetaExpression":
        """Expand xi(a) = a (a - 1) zhat(a) everywhere."""
        if self.basis == "zhat":
            return self
        out = []
        for coeff, rat, mono in self.terms:
            new_coeff = ConstantCombo.from_map(
                [(m, v * _xi_const_scalar(m)) for m, v in coeff.items]
            )
            num, den = Counter(), Counter()
            for f, e in mono.items:
                target = num if e > 0 else den
                target[f] += abs(e)
                target[LinearFactor(f.k, f.c - 1)] += abs(e)
            out.append((new_coeff, rat * FactoredRational.build(1, num, den), mono))
        return ZetaExpression.from_terms(out, "zhat")

    def equals(self, other: "ZetaExpression") -> bool:
        """Exact equality as functions of s (formal in the zhat constants)."""
        diff = self - other
        return diff.is_zero() or not canonical_form(diff)

    def monomials(self) -> set:
        return {m for _, _, m in self.terms}


def _xi_const_scalar(mono: ZhatMonomial) -> Fraction:
    out = Fraction(1)
    for f, e in mono.items:
        n = f.c
        if n * (n - 1) == 0:
            raise ValueError("xi(0) and xi(1) have no zhat expansion")
        out *= (n * (n - 1)) ** e
    return out


def canonical_form(expr: ZetaExpression) -> dict:
    """Unique representation: (mono, constant monomial) -> (reduced numerator, denominator).

    Rational functions sharing a zhat monomial are put over their least common
    denominator and common linear factors are cancelled, so two expressions are
    equal as functions exactly when their canonical forms agree.
    """
    groups: dict = defaultdict(list)
    for coeff, rat, mono in expr.terms:
        for cm, v in coeff.items:
            groups[(mono, cm)].append((v * rat.scalar, rat))
    out = {}
    for key, parts in groups.items():
        lcm: Counter = Counter()
        for _, rat in parts:
            for f, m in rat.den:
                lcm[f] = max(lcm[f], m)
        num = [Fraction(0)]
        for v, rat in parts:
            fac = rat.num_counter
            rest = lcm.copy()
            rest.subtract(rat.den_counter)
            fac.update(+rest)
            p = _poly_from_factors(fac)
            if len(p) > len(num):
                num += [Fraction(0)] * (len(p) - len(num))
            for i, x in enumerate(p):
                num[i] += v * x
        num = _poly_trim(num)
        if not num:
            continue
        for f in sorted(lcm):
            while lcm[f] and _poly_eval(num, f.root()) == 0:
                num = _poly_div_linear(num, f)
                lcm[f] -= 1
        out[key] = (tuple(num), _counter_items(lcm))
    return out


def substitute_reflect(expr: ZetaExpression, C) -> ZetaExpression:
    """Apply s -> -C - s and re-canonicalize arguments with f(x) = f(1 - x)."""
    return ZetaExpression.from_terms(
        [(coeff, rat.reflect(C), mono.reflect(C)) for coeff, rat, mono in expr.terms], expr.basis
    )


@dataclass
class FECheck:
    ok: bool
    report: list = field(default_factory=list)
    termwise_ok: bool | None = None

    def __bool__(self):
        return self.ok


def check_functional_equation(expr: ZetaExpression, c, expected_sign: int = 1, record=None) -> FECheck:
    """Is expr(-c - s) == expected_sign * expr(s)?  Optionally also the termwise w <-> w0 w w_p pairing on ``record``."""
    diff = substitute_reflect(expr, c) - expr * expected_sign
    report = []
    ok = diff.is_zero()
    if not ok:
        residue = canonical_form(diff)
        ok = not residue
        for (mono, cm), (num, den) in sorted(residue.items(), key=lambda kv: repr(kv[0]))[:10]:
            report.append(
                f"mismatch at {_mono_text(cm * mono, expr.basis) or '1'}: "
                f"numerator degree {len(num) - 1}, {len(den)} denominator factors"
            )
    termwise = None
    if record is not None:
        termwise, extra = termwise_pairing(record)
        report.extend(extra)
    return FECheck(ok and termwise is not False, report, termwise)


# ---------------------------------------------------------------------------
# rendering


def _factor_text(f: LinearFactor) -> str:
    t = f.text()
    return t if (f.k == 1 and f.c == 0) else f"({t})"


def _term_text(coeff: ConstantCombo, rat: FactoredRational, mono: ZhatMonomial, sym: str):
    """(sign, body) for one term."""
    num_parts, den_parts = [], []
    sign = 1
    scalar = coeff.as_scalar()
    if scalar is None and len(coeff.items) == 1:
        cm, scalar = coeff.items[0]
        for f, e in cm.items:
            base = f"{sym}({f.text()})"
            (num_parts if e > 0 else den_parts).append(base if abs(e) == 1 else f"{base}^{abs(e)}")
    elif scalar is None:
        num_parts.append(f"({coeff.text(sym)})")
        scalar = Fraction(1)
    scalar = scalar * rat.scalar
    if scalar < 0:
        sign, scalar = -1, -scalar
    if scalar.numerator != 1:
        num_parts.insert(0, str(scalar.numerator))
    if scalar.denominator != 1:
        den_parts.insert(0, str(scalar.denominator))
    for f, e in mono.items:
        base = f"{sym}({f.text()})"
        (num_parts if e > 0 else den_parts).append(base if abs(e) == 1 else f"{base}^{abs(e)}")
    for f, m in rat.num:
        num_parts.append(_factor_text(f) + ("" if m == 1 else f"^{m}"))
    for f, m in rat.den:
        den_parts.append(_factor_text(f) + ("" if m == 1 else f"^{m}"))
    body = "*".join(num_parts) or "1"
    if len(den_parts) == 1:
        body += "/" + den_parts[0]
    elif den_parts:
        body += "/(" + "*".join(den_parts) + ")"
    return sign, body


def _term_latex(coeff, rat, mono, sym):
    num_parts, den_parts = [], []
    scalar = coeff.as_scalar()
    prefix = ""
    if scalar is None and len(coeff.items) == 1:
        cm, scalar = coeff.items[0]
        for f, e in cm.items:
            base = f"{sym}({f.latex()})"
            (num_parts if e > 0 else den_parts).append(base if abs(e) == 1 else f"{base}^{{{abs(e)}}}")
    elif scalar is None:
        prefix = "\\left(" + " ".join(
            ("+ " if i and v > 0 else "- " if v < 0 else "") + _term_latex(ConstantCombo.monomial(m, abs(v)), FactoredRational(), ZhatMonomial(), sym)[1]
            for i, (m, v) in enumerate(coeff.items)
        ) + "\\right)"
        scalar = Fraction(1)
    scalar = scalar * rat.scalar
    sign = -1 if scalar < 0 else 1
    scalar = abs(scalar)
    if scalar.numerator != 1:
        num_parts.insert(0, str(scalar.numerator))
    if scalar.denominator != 1:
        den_parts.insert(0, str(scalar.denominator))
    for f, e in mono.items:
        base = f"{sym}({f.latex()})"
        (num_parts if e > 0 else den_parts).append(base if abs(e) == 1 else f"{base}^{{{abs(e)}}}")
    for f, m in rat.num:
        num_parts.append(f"({f.latex()})" + ("" if m == 1 else f"^{{{m}}}"))
    for f, m in rat.den:
        t = f.latex() if (f.k == 1 and f.c == 0 and len(rat.den) + len(den_parts) == 1) else f"({f.latex()})"
        den_parts.append(t + ("" if m == 1 else f"^{{{m}}}"))
    num = " ".join(num_parts) or "1"
    body = f"\\frac{{{num}}}{{{' '.join(den_parts)}}}" if den_parts else num
    return sign, prefix + body


def render(expr: ZetaExpression, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_json_obj(expr), sort_keys=True)
    if not expr.terms:
        return "0"
    if fmt == "text":
        sym, fn = ("zhat" if expr.basis == "zhat" else "xi"), _term_text
    elif fmt == "latex":
        sym, fn = ("\\hat{\\zeta}" if expr.basis == "zhat" else "\\xi"), _term_latex
    else:
        raise ValueError(f"unknown format {fmt!r}")
    out = ""
    for i, (c, r, m) in enumerate(expr.terms):
        sign, body = fn(c, r, m, sym)
        if i == 0:
            out = ("-" if sign < 0 else "") + body
        else:
            out += (" - " if sign < 0 else " + ") + body
    return out


def _lf_json(f: LinearFactor, m: int):
    return [f.k, _fmt_num(f.c), m]


def _lf_from_json(row):
    return LinearFactor(int(row[0]), Fraction(row[1])), int(row[2])


def to_json_obj(expr: ZetaExpression) -> dict:
    return {
        "basis": expr.basis,
        "terms": [
            {
                "coeff": [
                    {"value": _fmt_num(v), "constants": [_lf_json(f, e) for f, e in cm.items]}
                    for cm, v in c.items
                ],
                "scalar": _fmt_num(r.scalar),
                "num": [_lf_json(f, m) for f, m in r.num],
                "den": [_lf_json(f, m) for f, m in r.den],
                "mono": [_lf_json(f, e) for f, e in m.items],
            }
            for c, r, m in expr.terms
        ],
    }


def from_json(text) -> ZetaExpression:
    obj = json.loads(text) if isinstance(text, str) else text
    terms = []
    for t in obj["terms"]:
        coeff = ConstantCombo.from_map(
            [
                (ZhatMonomial.from_map([_lf_from_json(x) for x in c["constants"]]), Fraction(c["value"]))
                for c in t["coeff"]
            ]
        )
        rat = FactoredRational.build(
            Fraction(t["scalar"]),
            Counter(dict(_lf_from_json(x) for x in t["num"])),
            Counter(dict(_lf_from_json(x) for x in t["den"])),
        )
        mono = ZhatMonomial.from_map([_lf_from_json(x) for x in t["mono"]])
        terms.append((coeff, rat, mono))
    return ZetaExpression.from_terms(terms, obj.get("basis", "zhat"))


# ---------------------------------------------------------------------------
# construction of omega_p and zhat_p


class _RootView:
    """Cached per-(rs, p) accessors: k(alpha) = <lambda_p, alpha^vee> and ht(alpha^vee)."""

    def __init__(self, rs, p):
        self.rs = rs
        self.p = p
        self.k = [int(c[p - 1]) for c in rs.coroots]
        self.ht = [int(h) for h in rs.heights]
        self.n = rs.n_pos

    def form(self, a: int, shift: int = 0) -> LinearFactor:
        return LinearFactor(self.k[a], self.ht[a] + shift)


def _winv_simple(group, w, rs):
    """Indices of w^{-1} alpha_i for i = 1..r."""
    inv = group.inverse_perm(w)
    return [int(inv[s]) for s in rs.simple]


def omega_terms(rs, group, pd) -> dict:
    """w -> (f_{p,w}, zhat quotient) as separate single-term expressions' parts."""
    v = _RootView(rs, pd.p)
    delta_p = set(pd.delta_p)
    out = {}
    for w in pd.frak_Wp:
        den = [v.form(b, -1) for b in _winv_simple(group, w, rs) if b not in delta_p]
        rat = FactoredRational.build(1, (), den)
        perm = group.perms[w]
        exps = []
        for a in range(v.n):
            if perm[a] >= v.n:
                if a not in delta_p:
                    exps.append((v.form(a), 1))
                exps.append((v.form(a, 1), -1))
        out[w] = (rat, ZhatMonomial.from_map(exps))
    return out


def omega_p(rs, group, pd, tables=None) -> ZetaExpression:
    """The period omega_p(s) as a sum over frak W_p."""
    one = ConstantCombo.scalar(1)
    return ZetaExpression.from_terms([(one, r, m) for r, m in omega_terms(rs, group, pd).values()])


@dataclass(frozen=True)
class ZhatP:
    expr: ZetaExpression
    multiplier: ZhatMonomial  # prod zhat(ks+h)^{M_p(k,h)}, k >= 0
    M0: dict  # h -> M_p(0, h)


def zhat_p(rs, tables, omega: ZetaExpression, details: bool = False):
    """omega_p times the minimal zhat product; raises NotCleared if a denominator survives."""
    var = ZhatMonomial.from_map([(LinearFactor(k, h), m) for (k, h), m in tables.M.items() if m])
    expr = omega * var
    for _, _, mono in expr.terms:
        if mono.min_exponent() < 0:
            raise NotCleared(f"negative exponent survives in {_mono_text(mono, 'zhat')}")
    need: dict = defaultdict(int)
    for coeff, _, _ in expr.terms:
        for cm, _ in coeff.items:
            for f, e in cm.items:
                need[f.c] = max(need[f.c], -e)
    const = ZhatMonomial.from_map([(LinearFactor(0, n), e) for n, e in need.items() if e > 0])
    expr = expr * ConstantCombo.monomial(const)
    for coeff, _, _ in expr.terms:
        for cm, _ in coeff.items:
            if cm.min_exponent() < 0:
                raise NotCleared("constant zhat denominator survives")
    if details:
        M0 = {int(f.c): e for f, e in const.items}
        return ZhatP(expr, var * const, M0)
    return expr


def M0_bruteforce(rs, group, pd) -> dict:
    """M_p(0, h) straight from the max-over-frak-W_p definition."""
    p = pd.p
    out = {}
    ks = [int(c[p - 1]) for c in rs.coroots]
    hts = [int(h) for h in rs.heights]
    hs = {hts[a] for a in range(rs.n_roots) if ks[a] == 0}
    for h in range(min(hs, default=0), max(hs, default=0) + 3):
        best = None
        for w in pd.frak_Wp:
            perm = group.perms[w]
            neg = perm >= rs.n_pos
            n1 = sum(1 for a in range(rs.n_roots) if neg[a] and ks[a] == 0 and hts[a] == h - 1)
            n2 = sum(1 for a in range(rs.n_roots) if neg[a] and ks[a] == 0 and hts[a] == h)
            best = n1 - n2 if best is None else max(best, n1 - n2)
        if h >= 2 and best:
            out[h] = best
    return out


# ---------------------------------------------------------------------------
# X_p, E_p, D_p, R_p, xi_p


@dataclass
class XEQDRecord:
    rs: object
    pd: object
    tables: object
    c: int
    sign: int  # epsilon_p of Q_p(-c-s) = eps Q_p(s)
    line_sign: int  # xi_p(-c-s) = line_sign * xi_p(s)
    C: dict  # w -> ConstantCombo in the xi basis
    Qt: dict  # w -> FactoredRational (tilde Q_{p,w})
    Xw: dict  # w -> Counter of xi arguments
    Xp: ZetaExpression
    Ep: ZetaExpression
    Dp: Counter
    Rp: FactoredRational
    xi_p: ZetaExpression
    eps_p: ZetaExpression
    Xdd: Counter
    Qdd: ZetaExpression
    Q_total: Counter = field(repr=False, default_factory=Counter)

    def Q_degree(self, w) -> int:
        return self.Qt[w].degree

    @property
    def Ep_terms(self):
        return self.Ep.terms


def _bracket(v: _RootView, group, pd, w):
    """Scalar and primitive factor multiset of the w-th bracket of Q_p."""
    rs = v.rs
    delta_p = set(pd.delta_p)
    perm = group.perms[w]
    factors = []
    n_plus = sum(1 for a in pd.delta_p if perm[a] < v.n)
    scalar = Fraction(2) ** n_plus
    for b in _winv_simple(group, w, rs):
        if b not in delta_p:
            factors.append(v.form(b, -1))
    for a in range(v.n):
        if a in delta_p:
            continue
        d = 1 if perm[a] < v.n else 0
        factors.append(v.form(a, d))
        factors.append(v.form(a, d - 1))
    fr = FactoredRational.build(scalar, factors, ())
    return fr.scalar, fr.num_counter


def _xi_combo(args: Counter) -> ConstantCombo:
    return ConstantCombo.monomial(ZhatMonomial.from_map([(LinearFactor(0, n), e) for n, e in args.items()]))


def build_XEQD(rs, group, pd, tables) -> XEQDRecord:
    p = pd.p
    v = _RootView(rs, p)
    c = tables.c_p
    levi = set(pd.phi_p_plus)
    delta_p = set(pd.delta_p)
    outside = [a for a in range(v.n) if a not in levi]
    levi_nonsimple = [a for a in pd.phi_p_plus if a not in delta_p]

    scal, B = {}, {}
    total = Counter()
    sigma_all = Fraction(1)
    for w in pd.frak_Wp:
        scal[w], B[w] = _bracket(v, group, pd, w)
        total += B[w]
        sigma_all *= scal[w]

    # Q_p(-c-s) = eps Q_p(s): the factor multiset must be reflection invariant.
    reflected = Counter()
    for f, m in total.items():
        _, pf = f.reflect(c).primitive()
        reflected[pf] += m
    if reflected != total:
        raise InternalInconsistency("Q_p factor multiset is not invariant under s -> -c_p - s")
    eps = -1 if sum(total.values()) % 2 else 1

    Qt, C, Xw = {}, {}, {}
    for w in pd.frak_Wp:
        perm = group.perms[w]
        Qt[w] = FactoredRational.build(sigma_all / scal[w], total - B[w], ())
        n_plus = sum(1 for a in pd.delta_p if perm[a] < v.n)
        cargs = Counter()
        if n_plus:
            cargs[2] += n_plus
        for a in levi_nonsimple:
            cargs[v.ht[a] + (1 if perm[a] < v.n else 0)] += 1
        C[w] = _xi_combo(cargs)
        Xw[w] = Counter(v.form(a, 1 if perm[a] < v.n else 0) for a in outside)

    def term(w, weight=1):
        return (C[w] * weight, Qt[w], ZhatMonomial.from_map(list(Xw[w].items())))

    Xp = ZetaExpression.from_terms([term(w) for w in pd.frak_Wp], "xi")
    Ep = ZetaExpression.from_terms(
        [term(w) for w in pd.classes["plus"]] + [term(w, Fraction(1, 2)) for w in pd.classes["zero"]], "xi"
    )

    Dp = Counter()
    for (k, h), n_prev in ((key, tables.n(key[0], key[1] - 1)) for key in _dp_keys(tables)):
        e = n_prev - tables.M.get((k, h), 0)
        if e < 0:
            raise DivisionNotExact(f"D_p exponent {e} < 0 at (k, h) = ({k}, {h})")
        if e:
            Dp[LinearFactor(k, h)] += e

    lcm = Counter()
    for w in pd.frak_Wp:
        lcm |= B[w]
    r_factors = total - lcm
    Rp = FactoredRational.build(1, r_factors, ())
    Rp = FactoredRational(Fraction(1) / Rp.leading_coefficient() * Rp.scalar, Rp.num, Rp.den)

    def reduce_terms(expr):
        out = []
        for coeff, rat, mono in expr.terms:
            new_rat = rat / Rp
            if new_rat.den:
                raise DivisionNotExact("R_p does not divide a Q_{p,w}")
            exps = Counter(mono.exponents)
            exps.subtract(Dp)
            if any(e < 0 for e in exps.values()):
                raise DivisionNotExact("D_p does not divide an X_{p,w}")
            out.append((coeff, new_rat, ZhatMonomial.from_map(list(exps.items()))))
        return ZetaExpression.from_terms(out, "xi")

    # R_p and D_p are divided out per w, before merging terms.
    xi_p = reduce_terms(ZetaExpression(tuple(term(w) for w in pd.frak_Wp), "xi"))
    eps_terms = [term(w) for w in pd.classes["plus"]] + [term(w, Fraction(1, 2)) for w in pd.classes["zero"]]
    eps_p = reduce_terms(ZetaExpression(tuple(eps_terms), "xi"))

    r_reflected = Counter()
    for f, m in Rp.num:
        r_reflected[f.reflect(c).primitive()[1]] += m
    if r_reflected != Rp.num_counter:
        raise InternalInconsistency("R_p is not symmetric under s -> -c_p - s")
    line_sign = eps * (-1 if Rp.degree % 2 else 1)

    dd = pd.classes["ddagger"]
    Xdd = Xw[group.identity]
    Qdd = ZetaExpression.from_terms([(C[w], Qt[w], ZhatMonomial()) for w in dd], "xi")
    return XEQDRecord(rs, pd, tables, c, eps, line_sign, C, Qt, Xw, Xp, Ep, Dp, Rp, xi_p, eps_p, Xdd, Qdd, total)


def _dp_keys(tables):
    keys = set()
    for (k, h) in tables.N:
        keys.add((k, h + 1))
    return sorted(k for k in keys if k[0] >= 1 and k[1] >= 2)


def termwise_pairing(record: XEQDRecord):
    """The pairing w <-> w0 w w_p for tilde X and tilde Q, term by term."""
    from .weyl import involution

    c = record.c
    report = []
    ok = True
    for w in record.pd.frak_Wp:
        w2 = involution(record.pd, w)
        xt = ZetaExpression.from_terms([(record.C[w], FactoredRational(), ZhatMonomial.from_map(list(record.Xw[w].items())))], "xi")
        xt2 = ZetaExpression.from_terms([(record.C[w2], FactoredRational(), ZhatMonomial.from_map(list(record.Xw[w2].items())))], "xi")
        if substitute_reflect(xt, c) != xt2:
            ok = False
            report.append(f"tilde X pairing fails for element {w}")
        if record.Qt[w].reflect(c) != FactoredRational(record.Qt[w2].scalar * record.sign, record.Qt[w2].num, record.Qt[w2].den):
            ok = False
            report.append(f"tilde Q pairing fails for element {w}")
    return ok, report


def reconstruction_holds(record: XEQDRecord) -> bool:
    """X_p == E_p + eps_p * E_p(-c_p - s), exactly."""
    rhs = record.Ep + substitute_reflect(record.Ep, record.c) * record.sign
    return record.Xp.equals(rhs)


def quotient_exponents(tables) -> Counter:
    """Exponents of xi(ks+h) in X_p^ddagger / D_p from the closed form."""
    out = Counter()
    for (k, h) in _dp_keys(tables):
        if 2 * h > k * tables.c_p + 1:
            e = tables.n(k, h - 1) - tables.n(k, h)
            if e:
                out[LinearFactor(k, h)] = e
    return out


def quotient_identity_holds(record: XEQDRecord) -> bool:
    quotient = Counter(record.Xdd)
    quotient.subtract(record.Dp)
    quotient = Counter({f: e for f, e in quotient.items() if e})
    return quotient == quotient_exponents(record.tables)


def exponents_zero_free(record_or_exps, c_p=None) -> bool:
    """Every xi(ks+h) left in X^ddagger/D_p is zero free on Re s >= -c_p/2, i.e. (1-h)/k <= -c_p/2."""
    if isinstance(record_or_exps, XEQDRecord):
        exps, c_p = quotient_exponents(record_or_exps.tables), record_or_exps.c
    else:
        exps = record_or_exps
    return all(Fraction(1 - f.c, f.k) <= Fraction(-c_p, 2) for f, e in exps.items() if e > 0)


# ---------------------------------------------------------------------------
# constant term of the top coefficient, and the degree gap


def constant_index_sets(rs, group, pd):
    """The two index sets that must coincide before the constant can be summed."""
    levi = set(pd.phi_p_plus)
    delta_p = set(pd.delta_p)
    n = rs.n_pos
    levi_all = levi | {rs.neg(a) for a in levi}
    left = set()
    for w in pd.classes["ddagger"]:
        outside = [b for b in _winv_simple(group, w, rs) if b not in levi_all]
        if len(outside) == 1:
            left.add(w)
    right = set()
    levi_neg = {rs.neg(a) for a in levi}
    for w in pd.Wp_members:
        perm = group.perms[w]
        if all(int(perm[a]) in delta_p or int(perm[a]) in levi_neg for a in pd.delta_p):
            right.add(w)
    return left, right


def lemma_10_3_constant(rs, group, pd) -> ConstantCombo:
    """The exact leading constant, as a rational combination of products of zhat values at integers."""
    left, right = constant_index_sets(rs, group, pd)
    if left != right:
        raise IndexSetMismatch(f"index sets differ: {sorted(left)} vs {sorted(right)}")
    v = _RootView(rs, pd.p)
    levi = set(pd.phi_p_plus)
    delta_p = set(pd.delta_p)
    levi_all = levi | {rs.neg(a) for a in levi}
    total = ConstantCombo()
    for w in sorted(left):
        perm = group.perms[w]
        winv = _winv_simple(group, w, rs)
        alpha_w = [b for b in winv if b not in levi_all][0]
        scalar = Fraction(1, v.k[alpha_w])
        for b in winv:
            if b in levi_all and b not in delta_p:
                scalar /= v.ht[b] - 1
        exps = Counter()
        n_plus = sum(1 for a in pd.delta_p if perm[a] < v.n)
        if n_plus:
            exps[2] += n_plus
        for a in levi:
            if a not in delta_p:
                exps[v.ht[a] + (1 if perm[a] < v.n else 0)] += 1
        total = total + ConstantCombo.monomial(
            ZhatMonomial.from_map([(LinearFactor(0, h), e) for h, e in exps.items()]), scalar
        )
    return total


def levi_residue_oracle(rs, group, pd) -> ConstantCombo:
    """prod_{Phi_p^+} zhat(ht+1) times the residue of the Levi period, summed over W_p."""
    levi = set(pd.phi_p_plus)
    delta_p = set(pd.delta_p)
    levi_neg = {rs.neg(a) for a in levi}
    n = rs.n_pos
    ht = [int(h) for h in rs.heights]
    total = ConstantCombo()
    base = Counter(ht[a] + 1 for a in levi)
    for w in pd.Wp_members:
        perm = group.perms[w]
        if not all(int(perm[a]) in delta_p or int(perm[a]) in levi_neg for a in pd.delta_p):
            continue
        inv = group.inverse_perm(w)
        exps = Counter(base)
        n_minus = sum(1 for a in pd.delta_p if perm[a] >= n)
        exps[2] -= n_minus
        scalar = Fraction(1)
        for a in pd.delta_p:
            b = int(inv[a])
            if b not in delta_p:
                scalar /= ht[b] - 1
        for a in levi:
            if a not in delta_p and perm[a] >= n:
                exps[ht[a]] += 1
                exps[ht[a] + 1] -= 1
        total = total + ConstantCombo.monomial(
            ZhatMonomial.from_map([(LinearFactor(0, h), e) for h, e in exps.items() if e]), scalar
        )
    return total


def Qdd_degree(record: XEQDRecord):
    """(degree, leading ConstantCombo) of Q_p^ddagger; degree None if it cancels formally."""
    by_deg: dict = defaultdict(ConstantCombo)
    for w in record.pd.classes["ddagger"]:
        q = record.Qt[w]
        by_deg[q.degree] = by_deg[q.degree] + record.C[w] * q.leading_coefficient()
    for d in sorted(by_deg, reverse=True):
        if not by_deg[d].is_zero():
            return d, by_deg[d]
    return None, ConstantCombo()


def degree_gap_check(record: XEQDRecord) -> bool:
    deg, _ = Qdd_degree(record)
    if deg is None:
        return False
    dd = set(record.pd.classes["ddagger"])
    others = [w for w in record.pd.classes["plus"] + record.pd.classes["zero"] if w not in dd]
    return all(deg >= record.Qt[w].degree + 1 for w in others)


# ---------------------------------------------------------------------------
# the sum_h R_h(s) zhat(s+h) presentation of a one-variable expression


def R_coefficients(expr: ZetaExpression) -> dict:
    """h -> canonical R_h, for an expression of the form sum_h R_h(s) zhat(s+h).

    Each R_h is a dict (constant monomial) -> (numerator, denominator) in the
    format of ``canonical_form``. Raises ValueError on any other zhat argument.
    """
    out: dict = defaultdict(dict)
    for (mono, cm), nd in canonical_form(expr.to_zhat()).items():
        f = mono.items[0][0] if len(mono.items) == 1 else None
        if f is None or mono.items[0][1] != 1 or f.k != 1 or f.c.denominator != 1:
            raise ValueError(f"term {mono} is not zhat(s+h)")
        out[int(f.c)][cm] = nd
    return dict(out)


def P_polynomials(expr: ZetaExpression, n: int) -> dict:
    """h -> numerator coefficients of P_h = R_h(s) prod_{k=0}^n (s+k) / ((s+h)(s+h-1)).

    Coefficients are ConstantCombos, low to high. Raises NotCleared when some
    P_h keeps a denominator.
    """
    out = {}
    for h, parts in R_coefficients(expr).items():
        clear = Counter({LinearFactor(1, k): 1 for k in range(n + 1)})
        clear.subtract({LinearFactor(1, h): 1, LinearFactor(1, h - 1): 1})
        poly: list = []
        for cm, (num, den) in parts.items():
            rest = clear.copy()
            rest.subtract(dict(den))
            if any(m < 0 for m in rest.values()):
                raise NotCleared(f"P_{h} keeps a denominator")
            p = _poly_mul(list(num), _poly_from_factors(+rest))
            poly += [ConstantCombo()] * (len(p) - len(poly))
            for i, x in enumerate(p):
                if x:
                    poly[i] = poly[i] + ConstantCombo.monomial(cm, x)
        while poly and poly[-1].is_zero():
            poly.pop()
        out[h] = poly
    return out
