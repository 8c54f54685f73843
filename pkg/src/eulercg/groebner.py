"""Buchberger engine and the ideal-theoretic oracles built on it.

Every basis element carries cofactors expressing it in terms of the original
generators (plus the ring modulus), so membership, comaximality, equality and
intersection all come with machine-checkable witnesses.  S-pair selection is
the normal strategy with deterministic tie-breaks; reduced bases are unique,
which makes all downstream certificates reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .ring import (GREVLEX, MonomialOrder, Poly, RingDescriptor, RingError,
                   elimination_order, mono_deg, mono_div, mono_divides,
                   mono_lcm, mono_mul)


class SearchBoundExceeded(RuntimeError):
    """A bounded enumeration ran out before verification succeeded."""


class PreconditionError(ValueError):
    """An operation's stated precondition failed (with its evidence)."""


# ---------------------------------------------------------------------------
# ideals


class Ideal:
    """Generator list interpreted inside an ambient ring descriptor.

    Groebner bases (with the cofactor matrix over generators + modulus) are
    cached per monomial order and never mutated afterwards.
    """

    __slots__ = ("ring", "generators", "_gb")

    def __init__(self, ring: RingDescriptor, generators):
        self.ring = ring
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = ring.parse(g)
            if not g.is_zero() and g.nvars() != ring.nvars:
                raise RingError("generator has wrong variable count")
            gens.append(g)
        self.generators = tuple(gens)
        self._gb: dict = {}

    def gens_str(self) -> list[str]:
        return [self.ring.str_of(g) for g in self.generators]

    def __repr__(self):
        return f"Ideal({', '.join(self.gens_str())})"


@dataclass
class GroebnerData:
    order: MonomialOrder
    basis: list[Poly]              # reduced, monic, sorted by leading monomial
    cofactors: list[list[Poly]]    # basis[i] == sum_j cofactors[i][j] * source[j]
    source: list[Poly]             # generators followed by ring modulus


def _reduce_tracking(f: Poly, basis: list[Poly], order: MonomialOrder):
    """Full division: f = sum q_i b_i + r, no r-term divisible by any LT."""
    quots = [Poly.zero() for _ in basis]
    rem = Poly.zero()
    p = f
    lts = [b.leading(order) for b in basis]
    while not p.is_zero():
        m, c = p.leading(order)
        hit = -1
        for i, (lm, _) in enumerate(lts):
            if mono_divides(lm, m):
                hit = i
                break
        if hit >= 0:
            lm, lc = lts[hit]
            t = Poly.term(mono_div(m, lm), c / lc)
            quots[hit] = quots[hit] + t
            p = p - t * basis[hit]
        else:
            t = Poly.term(m, c)
            rem = rem + t
            p = p - t
    return rem, quots


def _vec_add(u: list[Poly], v: list[Poly]) -> list[Poly]:
    return [a + b for a, b in zip(u, v)]


def _vec_scale_term(u: list[Poly], m, c) -> list[Poly]:
    return [a.mul_term(m, c) for a in u]


def _vec_poly_scale(u: list[Poly], p: Poly) -> list[Poly]:
    return [a * p for a in u]


_GB_CACHE: dict = {}
_GB_CACHE_LIMIT = 4096


def _ideal_token(I: Ideal, order: MonomialOrder):
    return (I.ring.variables, I.ring.modulus, I.generators, order.cache_token())


def buchberger(I: Ideal, order: MonomialOrder = GREVLEX) -> GroebnerData:
    """Reduced Groebner basis of (generators + modulus), cofactors included."""
    token = order.cache_token()
    if token in I._gb:
        return I._gb[token]
    global_token = _ideal_token(I, order)
    hit = _GB_CACHE.get(global_token)
    if hit is not None:
        I._gb[token] = hit
        return hit

    source = [g for g in I.generators] + list(I.ring.modulus)
    nsrc = len(source)
    basis: list[Poly] = []
    cofs: list[list[Poly]] = []

    def push(p: Poly, cof: list[Poly]):
        m, c = p.leading(order)
        basis.append(p.scale(1 / c))
        cofs.append([q.scale(1 / c) for q in cof])

    for j, g in enumerate(source):
        if g.is_zero():
            continue
        unit = [Poly.zero() for _ in range(nsrc)]
        unit[j] = Poly.const(1, I.ring.nvars) if I.ring.nvars else Poly.const(1, g.nvars())
        push(g, unit)

    pairs = {(i, j) for i, j in combinations(range(len(basis)), 2)}

    def pair_key(pr):
        i, j = pr
        lcm = mono_lcm(basis[i].leading(order)[0], basis[j].leading(order)[0])
        return (mono_deg(lcm), order.key(lcm), i, j)

    while pairs:
        i, j = min(pairs, key=pair_key)
        pairs.discard((i, j))
        lmi = basis[i].leading(order)[0]
        lmj = basis[j].leading(order)[0]
        lcm = mono_lcm(lmi, lmj)
        if mono_mul(lmi, lmj) == lcm:
            continue  # coprime leading terms: S-poly reduces to zero
        mi, mj = mono_div(lcm, lmi), mono_div(lcm, lmj)
        s = basis[i].mul_term(mi, 1) - basis[j].mul_term(mj, 1)
        scof = _vec_add(_vec_scale_term(cofs[i], mi, 1),
                        _vec_scale_term(cofs[j], mj, -1))
        rem, quots = _reduce_tracking(s, basis, order)
        if rem.is_zero():
            continue
        for k, q in enumerate(quots):
            if not q.is_zero():
                scof = _vec_add(scof, _vec_poly_scale(cofs[k], -q))
        push(rem, scof)
        new = len(basis) - 1
        for k in range(new):
            pairs.add((k, new))

    # minimalize: drop elements whose leading term another one divides
    keep = []
    for i, b in enumerate(basis):
        lm = b.leading(order)[0]
        if any(mono_divides(basis[k].leading(order)[0], lm)
               for k in range(len(basis)) if k != i and (k in keep or k > i)):
            continue
        keep.append(i)
    basis = [basis[i] for i in keep]
    cofs = [cofs[i] for i in keep]

    # tail-reduce each element against the others
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            others = basis[:i] + basis[i + 1:]
            ocofs = cofs[:i] + cofs[i + 1:]
            rem, quots = _reduce_tracking(basis[i], others, order)
            if rem != basis[i]:
                changed = True
                cof = cofs[i]
                for k, q in enumerate(quots):
                    if not q.is_zero():
                        cof = _vec_add(cof, _vec_poly_scale(ocofs[k], -q))
                if rem.is_zero():
                    basis[i] = rem
                    cofs[i] = cof
                else:
                    m, c = rem.leading(order)
                    basis[i] = rem.scale(1 / c)
                    cofs[i] = [q.scale(1 / c) for q in cof]
        live = [k for k, b in enumerate(basis) if not b.is_zero()]
        basis = [basis[k] for k in live]
        cofs = [cofs[k] for k in live]

    idx = sorted(range(len(basis)), key=lambda k: order.key(basis[k].leading(order)[0]))
    data = GroebnerData(order, [basis[k] for k in idx], [cofs[k] for k in idx], source)
    I._gb[token] = data
    if len(_GB_CACHE) < _GB_CACHE_LIMIT:
        _GB_CACHE[global_token] = data
    return data


def normal_form(f: Poly, I: Ideal, order: MonomialOrder = GREVLEX):
    """Remainder and per-basis-element cofactors: f = sum q_i gb_i + r."""
    gb = buchberger(I, order)
    if f.is_zero():
        return Poly.zero(), [Poly.zero() for _ in gb.basis]
    return _reduce_tracking(f, gb.basis, order)


def reduce_mod_ring(f: Poly, ring: RingDescriptor) -> Poly:
    """Normal form against the ring modulus alone."""
    if not ring.modulus:
        return f
    rem, _ = normal_form(f, Ideal(ring, ()))
    return rem


def is_zero_in_ring(f: Poly, ring: RingDescriptor) -> bool:
    return reduce_mod_ring(f, ring).is_zero()


# ---------------------------------------------------------------------------
# certificates


@dataclass
class MembershipCertificate:
    element: Poly
    ideal: Ideal
    cofactors: list[Poly]  # over ideal.generators; modulus contributions folded in

    def verify(self) -> bool:
        acc = self.element
        for c, g in zip(self.cofactors, self.ideal.generators):
            acc = acc - c * g
        return is_zero_in_ring(acc, self.ideal.ring)


@dataclass
class ComaximalityCertificate:
    I: Ideal
    J: Ideal
    u: Poly
    v: Poly
    cert_u: MembershipCertificate
    cert_v: MembershipCertificate

    def verify(self) -> bool:
        ring = self.I.ring
        one = ring.one()
        return (is_zero_in_ring(self.u + self.v - one, ring)
                and self.cert_u.element == self.u and self.cert_v.element == self.v
                and self.cert_u.verify() and self.cert_v.verify())


@dataclass
class IdealEqualityCertificate:
    I: Ideal
    J: Ideal
    i_in_j: list[MembershipCertificate] = field(default_factory=list)
    j_in_i: list[MembershipCertificate] = field(default_factory=list)

    def verify(self) -> bool:
        return (all(c.verify() for c in self.i_in_j)
                and all(c.verify() for c in self.j_in_i))


def ideal_member(f: Poly, I: Ideal, order: MonomialOrder = GREVLEX):
    """Membership certificate for f in I, or None when NF(f) != 0."""
    rem, quots = normal_form(f, I, order)
    if not rem.is_zero():
        return None
    gb = buchberger(I, order)
    ngens = len(I.generators)
    total = [Poly.zero() for _ in range(ngens)]
    for q, cof in zip(quots, gb.cofactors):
        if q.is_zero():
            continue
        for j in range(ngens):
            if not cof[j].is_zero():
                total[j] = total[j] + q * cof[j]
    return MembershipCertificate(f, I, total)


def radical_member(f: Poly, I: Ideal) -> bool:
    """f in sqrt(I), decided by 1 in I + (1 - w f) in an extended ring."""
    ring = I.ring
    ext = ring.extended(("_w",))
    n_old, n_new = ring.nvars, ext.nvars
    w = Poly.variable(n_new - 1, n_new)
    gens = [g.extend_vars(n_old, n_new) for g in I.generators]
    gens.append(ext.one() - w * f.extend_vars(n_old, n_new))
    gb = buchberger(Ideal(ext, gens))
    return len(gb.basis) == 1 and gb.basis[0].is_constant()


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    return Ideal(I.ring, list(I.generators) + list(J.generators))


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    gens = [g * h for g in I.generators for h in J.generators]
    return Ideal(I.ring, gens)


def ideal_square(I: Ideal) -> Ideal:
    return ideal_product(I, I)


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J by eliminating t from t*I + (1-t)*J."""
    if not I.ring.same_ring(J.ring):
        raise PreconditionError("intersection needs a common ambient ring")
    ring = I.ring
    base = RingDescriptor(("_t",) + ring.variables, [], dim=None, domain=ring.domain,
                          check=False)
    n_old, n_new = ring.nvars, base.nvars

    def lift(p: Poly) -> Poly:
        return Poly({(0,) + m: c for m, c in p.terms.items()})

    t = Poly.variable(0, n_new)
    one = Poly.const(1, n_new)
    gens = [t * lift(g) for g in I.generators]
    gens += [(one - t) * lift(g) for g in J.generators]
    gens += [lift(m) for m in ring.modulus]
    ext = RingDescriptor(base.variables, [], dim=None, domain=ring.domain, check=False)
    gb = buchberger(Ideal(ext, gens), elimination_order(1))
    out = []
    for b in gb.basis:
        if all(m[0] == 0 for m in b.terms):
            out.append(Poly({m[1:]: c for m, c in b.terms.items()}))
    result = [reduce_mod_ring(p, ring) for p in out]
    return Ideal(ring, [p for p in result if not p.is_zero()])


def comaximal(I: Ideal, J: Ideal):
    """Certificate u + v = 1 with u in I, v in J, or None if I + J is proper."""
    if not I.ring.same_ring(J.ring):
        raise PreconditionError("comaximality needs a common ambient ring")
    ring = I.ring
    S = ideal_sum(I, J)
    cert = ideal_member(ring.one(), S)
    if cert is None:
        return None
    k = len(I.generators)
    u = Poly.zero()
    for c, g in zip(cert.cofactors[:k], I.generators):
        u = u + c * g
    v = Poly.zero()
    for c, g in zip(cert.cofactors[k:], J.generators):
        v = v + c * g
    cu = MembershipCertificate(u, I, list(cert.cofactors[:k]))
    cv = MembershipCertificate(v, J, list(cert.cofactors[k:]))
    # fold any modulus discrepancy into v so u + v = 1 on the nose mod modulus
    return ComaximalityCertificate(I, J, u, v, cu, cv)


def is_unit_ideal(I: Ideal) -> bool:
    gb = buchberger(I)
    return len(gb.basis) == 1 and gb.basis[0].is_constant()


def krull_dimension(I: Ideal) -> int:
    """Dimension of A/(I + modulus) via independent variable sets.

    A variable subset S is independent when no leading-term monomial is
    supported inside S; the dimension is the largest such |S|.  Returns -1
    for the unit ideal.
    """
    gb = buchberger(I)
    if len(gb.basis) == 1 and gb.basis[0].is_constant():
        return -1
    n = I.ring.nvars
    lts = [b.leading(gb.order)[0] for b in gb.basis]
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in lts]
    best = 0
    for size in range(n, 0, -1):
        for S in combinations(range(n), size):
            sset = set(S)
            if all(not sup <= sset for sup in supports):
                return size
        # else keep shrinking
    return best


def height(I: Ideal) -> int:
    """ring dimension minus dim A/I, valid on equidimensional ambients."""
    ring = I.ring
    if ring.modulus and not ring.domain:
        raise PreconditionError(
            "height needs a polynomial ring or a modulus asserted prime")
    d = krull_dimension(I)
    if d < 0:
        raise PreconditionError("height of the unit ideal is undefined")
    return ring.dim - d


def height_or_inf(I: Ideal):
    """Height with ht(unit ideal) = +infinity, for precondition checks."""
    if is_unit_ideal(I):
        return float("inf")
    return height(I)


def equal_ideals(I: Ideal, J: Ideal):
    """Equality certificate (two-sided memberships), or None.

    Ideals are equal exactly when their reduced Groebner bases coincide.
    """
    if not I.ring.same_ring(J.ring):
        raise PreconditionError("equality needs a common ambient ring")
    gi = buchberger(I)
    gj = buchberger(J)
    if gi.basis != gj.basis:
        return None
    cert = IdealEqualityCertificate(I, J)
    for g in I.generators:
        m = ideal_member(g, J)
        if m is None:
            return None
        cert.i_in_j.append(m)
    for g in J.generators:
        m = ideal_member(g, I)
        if m is None:
            return None
        cert.j_in_i.append(m)
    return cert


def ideal_with_modulus_member(f: Poly, ring: RingDescriptor, gens: list[Poly]):
    """Membership in the ideal generated by gens inside the quotient ring."""
    return ideal_member(f, Ideal(ring, gens))
