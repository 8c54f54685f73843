"""Exact multivariate polynomial arithmetic over Q.

Monomials are exponent tuples, one slot per ambient variable.  Polynomials
are term maps monomial -> nonzero Fraction.  Everything is immutable by
convention and safe to share; no floating point appears anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
Monomial = tuple[int, ...]


class RingError(ValueError):
    """Violated precondition or malformed ring-level input."""


# ---------------------------------------------------------------------------
# monomials


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_deg(a: Monomial) -> int:
    return sum(a)


class MonomialOrder:
    """Total multiplicative well-order on monomials.

    kind is one of "grevlex", "lex", "block"; a block order compares the
    first `block` exponents grevlex-wise and breaks ties on the rest, which
    makes the leading variables an elimination block.
    """

    __slots__ = ("kind", "block")

    def __init__(self, kind: str = "grevlex", block: int = 0):
        if kind not in ("grevlex", "lex", "block"):
            raise RingError(f"unknown monomial order {kind!r}")
        if kind == "block" and block <= 0:
            raise RingError("block order needs a positive block size")
        self.kind = kind
        self.block = block

    @staticmethod
    def _grevlex_key(m: Monomial):
        return (sum(m), tuple(-e for e in reversed(m)))

    def key(self, m: Monomial):
        if self.kind == "grevlex":
            return self._grevlex_key(m)
        if self.kind == "lex":
            return m
        k = self.block
        return (self._grevlex_key(m[:k]), self._grevlex_key(m[k:]))

    def greater(self, m1: Monomial, m2: Monomial) -> bool:
        return self.key(m1) > self.key(m2)

    def cache_token(self):
        return (self.kind, self.block)

    def __repr__(self):
        if self.kind == "block":
            return f"MonomialOrder('block', {self.block})"
        return f"MonomialOrder({self.kind!r})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(block: int) -> MonomialOrder:
    return MonomialOrder("block", block)


def compare_monomials(order: MonomialOrder, m1: Monomial, m2: Monomial) -> int:
    """Return -1, 0 or 1 as m1 <, =, > m2 under the order."""
    if len(m1) != len(m2):
        raise RingError("monomial length mismatch")
    k1, k2 = order.key(m1), order.key(m2)
    return (k1 > k2) - (k1 < k2)


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Polynomial as a map from exponent tuples to nonzero rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms=None, _clean: bool = True):
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = {m: Fraction(c) for m, c in terms.items() if c != 0}
        else:
            self.terms = terms

    # -- constructors

    @staticmethod
    def zero() -> "Poly":
        return Poly(None)

    @staticmethod
    def const(c, nvars: int) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly(None)
        return Poly({(0,) * nvars: c}, _clean=False)

    @staticmethod
    def variable(i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return Poly({tuple(e): Fraction(1)}, _clean=False)

    @staticmethod
    def term(m: Monomial, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly(None)
        return Poly({m: c}, _clean=False)

    # -- queries

    def is_zero(self) -> bool:
        return not self.terms

    def nvars(self) -> int:
        for m in self.terms:
            return len(m)
        return -1

    def degree(self) -> int:
        return max((mono_deg(m) for m in self.terms), default=-1)

    def leading(self, order: MonomialOrder) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise RingError("leading term of zero polynomial")
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    def is_constant(self) -> bool:
        return all(mono_deg(m) == 0 for m in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise RingError("not a constant polynomial")
        return next(iter(self.terms.values()))

    # -- arithmetic

    def __add__(self, other: "Poly") -> "Poly":
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, 0) + c
            if s:
                res[m] = s
            else:
                res.pop(m, None)
        return Poly(res, _clean=False)

    def __sub__(self, other: "Poly") -> "Poly":
        res = dict(self.terms)
        for m, c in other.terms.items():
            s = res.get(m, 0) - c
            if s:
                res[m] = s
            else:
                res.pop(m, None)
        return Poly(res, _clean=False)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, _clean=False)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly(None)
        res: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = res.get(m, 0) + c1 * c2
                if s:
                    res[m] = s
                else:
                    res.pop(m, None)
        return Poly(res, _clean=False)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly(None)
        return Poly({m: c * v for m, v in self.terms.items()}, _clean=False)

    def mul_term(self, m: Monomial, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly(None)
        return Poly({mono_mul(m, k): c * v for k, v in self.terms.items()}, _clean=False)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise RingError("negative polynomial power")
        result = Poly.const(1, self.nvars() if self.terms else 0)
        if e == 0:
            if self.is_zero():
                raise RingError("0^0 in polynomial power")
            return Poly.const(1, self.nvars())
        base = self
        while True:
            if e & 1:
                result = result * base if not result.is_zero() else base
            e >>= 1
            if not e:
                break
            base = base * base
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- evaluation / substitution

    def eval(self, point: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            if len(m) != len(point):
                raise RingError("evaluation point length mismatch")
            v = c
            for e, x in zip(m, point):
                v *= Fraction(x) ** e
            total += v
        return total

    def substitute(self, values: Sequence["Poly"]) -> "Poly":
        """Substitute a polynomial for each variable (all at once)."""
        if not self.terms:
            return Poly(None)
        n = values[0].nvars()
        out = Poly(None)
        for m, c in self.terms.items():
            part = Poly.const(c, n)
            for e, p in zip(m, values):
                for _ in range(e):
                    part = part * p
            out = out + part
        return out

    def extend_vars(self, old_n: int, new_n: int) -> "Poly":
        """Reinterpret in a ring with extra trailing variables."""
        pad = (0,) * (new_n - old_n)
        return Poly({m + pad: c for m, c in self.terms.items()}, _clean=False)

    def __repr__(self):
        return f"Poly({self.terms!r})"


def poly_eval(f: Poly, point: Sequence) -> Fraction:
    """Exact value of f at a rational point."""
    if not f.is_zero():
        n = f.nvars()
        if n != len(point):
            raise RingError("evaluation point length mismatch")
    return f.eval([Fraction(x) for x in point])


# ---------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\*|\+|-|\(|\)))")


def _tokenize(s: str):
    pos, out = 0, []
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            if s[pos:].strip():
                raise RingError(f"cannot parse polynomial near {s[pos:pos+12]!r}")
            break
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", Fraction(num)))
        elif name is not None:
            out.append(("var", name))
        else:
            out.append((op, op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, variables):
        self.toks = tokens
        self.i = 0
        self.vars = list(variables)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse_expr(self) -> Poly:
        sign = 1
        kind, _ = self.peek()
        if kind in ("+", "-"):
            self.take()
            sign = -1 if kind == "-" else 1
        p = self.parse_term()
        if sign < 0:
            p = -p
        while True:
            kind, _ = self.peek()
            if kind == "+":
                self.take()
                p = p + self.parse_term()
            elif kind == "-":
                self.take()
                p = p - self.parse_term()
            else:
                return p

    def parse_term(self) -> Poly:
        p = self.parse_factor()
        while True:
            kind, _ = self.peek()
            if kind == "*":
                self.take()
                p = p * self.parse_factor()
            else:
                return p

    def parse_factor(self) -> Poly:
        p = self.parse_base()
        kind, _ = self.peek()
        if kind == "^":
            self.take()
            k, v = self.take()
            if k != "num" or v.denominator != 1:
                raise RingError("exponent must be a nonnegative integer")
            p = p ** int(v)
        return p

    def parse_base(self) -> Poly:
        kind, val = self.take()
        n = len(self.vars)
        if kind == "num":
            return Poly.const(val, n)
        if kind == "var":
            try:
                return Poly.variable(self.vars.index(val), n)
            except ValueError:
                raise RingError(f"unknown variable {val!r}") from None
        if kind == "(":
            p = self.parse_expr()
            k, _ = self.take()
            if k != ")":
                raise RingError("unbalanced parenthesis")
            return p
        raise RingError(f"unexpected token {val!r}")


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse plain-text expressions like "2*x^2*y - 1/3"."""
    toks = _tokenize(text)
    if not toks:
        raise RingError("empty polynomial text")
    parser = _Parser(toks, variables)
    p = parser.parse_expr()
    if parser.i != len(parser.toks):
        raise RingError(f"trailing input in polynomial {text!r}")
    return p


def poly_str(p: Poly, variables: Sequence[str]) -> str:
    if p.is_zero():
        return "0"
    monos = sorted(p.terms, key=GREVLEX.key, reverse=True)
    parts = []
    for m in monos:
        c = p.terms[m]
        factors = []
        for name, e in zip(variables, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        body = "*".join(factors)
        coeff = abs(c)
        if not body:
            piece = str(coeff)
        elif coeff == 1:
            piece = body
        else:
            piece = f"{coeff}*{body}"
        if not parts:
            parts.append(piece if c > 0 else f"-{piece}")
        else:
            parts.append(f"+ {piece}" if c > 0 else f"- {piece}")
    return " ".join(parts)


def poly_to_json(p: Poly) -> list[dict]:
    out = []
    for m in sorted(p.terms, key=GREVLEX.key, reverse=True):
        c = p.terms[m]
        out.append({"exps": list(m), "num": str(c.numerator), "den": str(c.denominator)})
    return out


def poly_from_json(data: Iterable[dict], nvars: int) -> Poly:
    terms = {}
    for t in data:
        m = tuple(int(e) for e in t["exps"])
        if len(m) != nvars:
            raise RingError("term exponent length mismatch")
        terms[m] = Fraction(int(t["num"]), int(t["den"]))
    return Poly(terms)


# ---------------------------------------------------------------------------
# ring descriptors


class RingDescriptor:
    """Ambient ring Q[variables]/(modulus) with an asserted Krull dimension.

    The modulus is carried, never rewritten into elements; ideal operations
    join it in.  `domain` asserts the modulus is prime (trivially true when
    the modulus is empty), which gates localization equality tests and the
    height computation.
    """

    __slots__ = ("variables", "modulus", "dim", "domain")

    def __init__(self, variables: Sequence[str], modulus: Sequence[Poly] = (),
                 dim: int | None = None, domain: bool | None = None,
                 check: bool = True):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise RingError("duplicate variable names")
        self.modulus = tuple(m for m in modulus if not m.is_zero())
        for m in self.modulus:
            if m.nvars() != len(self.variables):
                raise RingError("modulus polynomial has wrong variable count")
        if domain is None:
            domain = not self.modulus
        self.domain = bool(domain)
        if dim is None:
            dim = self._computed_dimension()
        self.dim = int(dim)
        if check:
            actual = self._computed_dimension()
            if actual != self.dim:
                raise RingError(
                    f"asserted dimension {self.dim} but modulus has dimension {actual}")

    def _computed_dimension(self) -> int:
        from . import groebner  # deferred: groebner imports this module

        return groebner.krull_dimension(groebner.Ideal(self, ()))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def zero(self) -> Poly:
        return Poly.zero()

    def one(self) -> Poly:
        return Poly.const(1, self.nvars)

    def const(self, c) -> Poly:
        return Poly.const(c, self.nvars)

    def var(self, name: str) -> Poly:
        return Poly.variable(self.variables.index(name), self.nvars)

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self.variables)

    def str_of(self, p: Poly) -> str:
        return poly_str(p, self.variables)

    def same_ring(self, other: "RingDescriptor") -> bool:
        return (self.variables == other.variables and
                list(self.modulus) == list(other.modulus))

    def extended(self, extra_vars: Sequence[str], extra_modulus: Sequence[Poly] = ()):
        """Presentation with trailing variables appended (internal helper).

        Existing modulus polynomials are lifted; extra relations must already
        live in the extended variable set.  Dimension is not re-asserted.
        """
        new_vars = self.variables + tuple(extra_vars)
        n_old, n_new = self.nvars, len(new_vars)
        lifted = [m.extend_vars(n_old, n_new) for m in self.modulus]
        lifted.extend(extra_modulus)
        return RingDescriptor(new_vars, lifted, dim=self.dim, domain=self.domain,
                              check=False)

    def to_json(self) -> dict:
        return {
            "vars": list(self.variables),
            "modulus": [poly_str(m, self.variables) for m in self.modulus],
            "dim": self.dim,
            "domain": self.domain,
        }

    @staticmethod
    def from_json(data: dict, check: bool = True) -> "RingDescriptor":
        variables = list(data["vars"])
        modulus = [parse_poly(s, variables) for s in data.get("modulus", [])]
        return RingDescriptor(variables, modulus, dim=data.get("dim"),
                              domain=data.get("domain"), check=check)

    def __repr__(self):
        mods = ", ".join(poly_str(m, self.variables) for m in self.modulus)
        return f"RingDescriptor({'...' if not self.variables else ','.join(self.variables)}; ({mods}); dim={self.dim})"


# ---------------------------------------------------------------------------
# localization fractions


class LocFraction:
    """Syntactic fraction num/den with denominator provenance.

    den_class is ("power-of", s) recording den = s^k, or ("one-plus", gens)
    recording den = 1 + k with k an explicit member of the ideal generated
    by gens.  Equality in the localization is decided by cross-multiplication
    under the ambient domain assumption.
    """

    __slots__ = ("ring", "num", "den", "den_class")

    def __init__(self, ring: RingDescriptor, num: Poly, den: Poly, den_class):
        self.ring = ring
        self.num = num
        self.den = den
        self.den_class = den_class
        if den.is_zero():
            raise RingError("zero denominator")

    def cross_equal(self, other: "LocFraction") -> bool:
        if not self.ring.domain:
            raise RingError("localization equality needs a domain assertion")
        from . import groebner

        diff = self.num * other.den - other.num * self.den
        return groebner.reduce_mod_ring(diff, self.ring).is_zero()

    def __repr__(self):
        return (f"LocFraction({self.ring.str_of(self.num)} / "
                f"{self.ring.str_of(self.den)})")


def poly_divexact(f: Poly, g: Poly, order: MonomialOrder = GREVLEX) -> Poly | None:
    """Quotient q with f = q*g, or None when g does not divide f exactly."""
    if g.is_zero():
        raise RingError("division by zero polynomial")
    if f.is_zero():
        return Poly(None)
    q = Poly(None)
    rem = f
    lm, lc = g.leading(order)
    while not rem.is_zero():
        m, c = rem.leading(order)
        if not mono_divides(lm, m):
            return None
        t = Poly.term(mono_div(m, lm), c / lc)
        q = q + t
        rem = rem - t * g
    return q


def loc_reduce(e: LocFraction) -> LocFraction:
    """Cancel common factors of the multiplicative-set generator.

    Only power-of(s) classes reduce; value is unchanged in the localization
    (ambient ring must be a domain).
    """
    if not e.ring.domain:
        raise RingError("loc_reduce needs a domain assertion on the ring")
    kind = e.den_class[0]
    if kind != "power-of":
        return e
    s = e.den_class[1]
    num, den = e.num, e.den
    if s.is_constant():
        return e
    while True:
        qd = poly_divexact(den, s)
        if qd is None:
            break
        qn = poly_divexact(num, s)
        if qn is None:
            break
        num, den = qn, qd
    return LocFraction(e.ring, num, den, e.den_class)
