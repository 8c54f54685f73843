"""Constructive lemma toolkit: prime avoidance, general position, ideal
splitting, generator transfer, SL2 transitions, unimodular-row completion,
localization patching and Quillen-style splitting.

Existence searches are deterministic small-integer enumerations; soundness
always comes from an exact symbolic verification of the produced witness,
never from the search heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import groebner
from .groebner import (ComaximalityCertificate, Ideal, MembershipCertificate,
                       PreconditionError, SearchBoundExceeded, comaximal,
                       equal_ideals, height, height_or_inf, ideal_member,
                       ideal_square, ideal_sum, is_unit_ideal,
                       is_zero_in_ring, krull_dimension, reduce_mod_ring)
from .ring import (GREVLEX, LocFraction, Poly, RingDescriptor, RingError,
                   poly_divexact)
from .artinian import _poly_det, quotient_algebra, sum_polys


DEFAULT_BOUND = 4


# ---------------------------------------------------------------------------
# generator tuples and congruence certificates


@dataclass
class GeneratorTuple:
    ideal: Ideal
    elements: tuple
    membership: list = field(default_factory=list)

    def __post_init__(self):
        self.elements = tuple(self.elements)

    def certify(self) -> "GeneratorTuple":
        self.membership = []
        for e in self.elements:
            cert = ideal_member(e, self.ideal)
            if cert is None:
                raise PreconditionError(
                    f"tuple entry {self.ideal.ring.str_of(e)} is not in the ideal")
            self.membership.append(cert)
        return self

    def verify(self) -> bool:
        if len(self.membership) != len(self.elements):
            return False
        return all(c.verify() for c in self.membership)

    def __len__(self):
        return len(self.elements)


@dataclass
class CongruenceCertificate:
    """Per-index witnesses that left_i - right_i lies in square_ideal."""

    left: tuple
    right: tuple
    square_ideal: Ideal
    witnesses: list

    def verify(self) -> bool:
        if len(self.left) != len(self.right) or len(self.left) != len(self.witnesses):
            return False
        for l, r, w in zip(self.left, self.right, self.witnesses):
            diff = reduce_mod_ring(l - r, self.square_ideal.ring)
            ref = reduce_mod_ring(w.element, self.square_ideal.ring)
            if diff != ref or not w.verify():
                return False
        return True


def make_congruence(left, right, square_ideal: Ideal) -> CongruenceCertificate:
    wits = []
    for l, r in zip(left, right):
        cert = ideal_member(l - r, square_ideal)
        if cert is None:
            raise PreconditionError("difference escapes the square ideal")
        wits.append(cert)
    return CongruenceCertificate(tuple(left), tuple(right), square_ideal, wits)


# ---------------------------------------------------------------------------
# integer enumeration helper


def int_vectors(length: int, bound: int):
    """All integer vectors ordered by max-norm, deterministic within a norm
    (positive entries preferred)."""
    yield (0,) * length
    for norm in range(1, bound + 1):
        vals = [0] + [v for k in range(1, norm + 1) for v in (k, -k)]
        for vec in product(vals, repeat=length):
            if max((abs(v) for v in vec), default=0) == norm:
                yield vec


# ---------------------------------------------------------------------------
# prime avoidance / general position / generator moves


def avoid_primes(gens: GeneratorTuple, primes, bound: int = DEFAULT_BOUND) -> Poly:
    """c = a1 + sum b_i a_i avoiding every listed prime, verified by
    non-membership.  The listed ideals are used as given."""
    ring = gens.ideal.ring
    elems = gens.elements
    if not elems:
        raise PreconditionError("empty generator tuple")
    for p in primes:
        if all(ideal_member(a, p) is not None for a in elems):
            raise PreconditionError("tuple ideal is contained in a listed prime")
    if not primes:
        return elems[0]
    for lam in int_vectors(len(elems) - 1, bound):
        c = elems[0]
        for lv, a in zip(lam, elems[1:]):
            if lv:
                c = c + a.scale(lv)
        if all(ideal_member(c, p) is None for p in primes):
            return c
    raise SearchBoundExceeded("avoid_primes enumeration exhausted")


def general_position(gens: GeneratorTuple, bound: int = DEFAULT_BOUND):
    """Elementary factor list theta with gens·theta regenerating the ideal
    and every prefix (b1..bi) of height >= i, each height verified."""
    ideal = gens.ideal
    ring = ideal.ring
    n = len(gens.elements)
    if height_or_inf(Ideal(ring, gens.elements)) < n:
        raise PreconditionError("generator tuple has height below its length")
    current = list(gens.elements)
    factors = []  # (i, j, integer): add c * entry_i onto entry_j

    def prefix_ok(i):
        return height_or_inf(Ideal(ring, current[:i])) >= i

    for i in range(1, n):
        if prefix_ok(i):
            continue
        fixed = False
        for lam in int_vectors(n - i, bound):
            if all(v == 0 for v in lam):
                continue
            trial = list(current)
            for off, lv in enumerate(lam):
                if lv:
                    trial[i - 1] = trial[i - 1] + current[i + off].scale(lv)
            if height_or_inf(Ideal(ring, trial[:i])) >= i:
                for off, lv in enumerate(lam):
                    if lv:
                        factors.append((i + off, i - 1, lv))
                current = trial
                fixed = True
                break
        if not fixed:
            raise SearchBoundExceeded(f"general_position stuck at prefix {i}")
    new = GeneratorTuple(Ideal(ring, current), tuple(current)).certify()
    if equal_ideals(Ideal(ring, current), Ideal(ring, gens.elements)) is None:
        raise RuntimeError("elementary moves changed the ideal")
    return factors, new


def evans_move(row, a: Poly, ring: RingDescriptor, bound: int = DEFAULT_BOUND):
    """b with (a_i + a·b_i) of height >= n, found by integer enumeration.

    Unit ideals count as height +infinity (they pass every bound)."""
    n = len(row)
    joined = Ideal(ring, list(row) + [a])
    if height_or_inf(joined) < n:
        raise PreconditionError("(a_1..a_n, a) has height below n")
    for b in int_vectors(n, bound):
        moved = [ai + a.scale(bi) for ai, bi in zip(row, b)]
        I = Ideal(ring, moved)
        if height_or_inf(I) >= n:
            return list(b), moved
    raise SearchBoundExceeded("evans_move enumeration exhausted")


# ---------------------------------------------------------------------------
# ideal splitting and Mohan Kumar generators


@dataclass
class SplitResult:
    e: Poly
    Jprime: Ideal
    cert_e_in_J2: MembershipCertificate
    cert_generation: object           # J = J1 + (e)
    cert_intersection: object         # J ∩ J' = J1
    cert_comax: ComaximalityCertificate  # J2 + J' = A
    cert_idem: MembershipCertificate  # e^2 - e in J1

    def verify(self) -> bool:
        return (self.cert_e_in_J2.verify() and self.cert_generation.verify()
                and self.cert_intersection.verify() and self.cert_comax.verify()
                and self.cert_idem.verify())


def split_ideal(J: Ideal, J1: Ideal, J2: Ideal) -> SplitResult:
    """e in J2 with J = J1 + (e), J' = J1 + (1-e), J ∩ J' = J1, J2 + J' = A."""
    ring = J.ring
    for g in J1.generators:
        if ideal_member(g, J) is None:
            raise PreconditionError("J1 is not contained in J")
    Jsq = ideal_square(J)
    for g in J2.generators:
        if ideal_member(g, Jsq) is None:
            raise PreconditionError("J2 is not contained in J^2")
    if equal_ideals(ideal_sum(J1, J2), J) is None:
        raise PreconditionError("J1 + J2 differs from J")
    if not is_unit_ideal(J1) and krull_dimension(J1) != 0:
        raise PreconditionError("A/J1 must be zero-dimensional")

    from .artinian import idempotent_of_ideal

    if is_unit_ideal(J1):
        e0 = ring.zero()
    else:
        e0 = idempotent_of_ideal(J, J1)
    # normalize the idempotent representative into J2
    split = ideal_member(e0, ideal_sum(J1, J2))
    if split is None:
        raise RuntimeError("idempotent escapes J1 + J2")
    k1 = len(J1.generators)
    j1_part = Poly.zero()
    for cof, g in zip(split.cofactors[:k1], J1.generators):
        j1_part = j1_part + cof * g
    e = reduce_mod_ring(e0 - j1_part, ring)

    cert_e = ideal_member(e, J2)
    if cert_e is None:
        raise RuntimeError("normalized idempotent is not in J2")
    Jprime = Ideal(ring, list(J1.generators) + [ring.one() - e])
    gen_cert = equal_ideals(Ideal(ring, list(J1.generators) + [e]), J)
    if gen_cert is None:
        raise RuntimeError("J1 + (e) does not reproduce J")
    inter = groebner.ideal_intersect(J, Jprime)
    inter_cert = equal_ideals(inter, J1)
    if inter_cert is None:
        raise RuntimeError("J ∩ J' differs from J1")
    comax_cert = comaximal(J2, Jprime)
    if comax_cert is None:
        raise RuntimeError("J2 + J' is proper")
    idem_cert = ideal_member(e * e - e, J1)
    if idem_cert is None:
        raise RuntimeError("e^2 - e escapes J1")
    return SplitResult(e, Jprime, cert_e, gen_cert, inter_cert, comax_cert, idem_cert)


def mohan_kumar(I: Ideal, gens_mod_sq: GeneratorTuple, x: Poly):
    """n+1 generators of (I, x) from n generators of I mod I^2."""
    ring = I.ring
    for e in gens_mod_sq.elements:
        if ideal_member(e, I) is None:
            raise PreconditionError("generator tuple escapes I")
    Isq = ideal_square(I)
    lifted = Ideal(ring, list(gens_mod_sq.elements) + list(Isq.generators))
    if equal_ideals(lifted, I) is None:
        raise PreconditionError("tuple does not generate I mod I^2")
    Jsmall = Ideal(ring, gens_mod_sq.elements)
    if not is_unit_ideal(Jsmall) and krull_dimension(Jsmall) != 0:
        raise PreconditionError("A/(gens) must be zero-dimensional")

    from .artinian import idempotent_of_ideal

    h = idempotent_of_ideal(I, Jsmall)
    cert_h = ideal_member(h, I)
    if cert_h is None:
        raise RuntimeError("idempotent escapes I")
    cert_hh = ideal_member(h * (ring.one() - h), Jsmall)
    if cert_hh is None:
        raise RuntimeError("h(1-h) escapes (gens)")
    last = reduce_mod_ring(h + (ring.one() - h) * x, ring)
    out_gens = list(gens_mod_sq.elements) + [last]
    target = Ideal(ring, list(I.generators) + [x])
    cert_eq = equal_ideals(Ideal(ring, out_gens), target)
    if cert_eq is None:
        raise RuntimeError("output tuple does not generate (I, x)")
    out = GeneratorTuple(target, tuple(out_gens)).certify()
    return out, h, cert_eq


# ---------------------------------------------------------------------------
# SL2 transition (determinant-one change of generator pairs)


def _represent_in_product(f: Poly, pair, J: Ideal):
    """f = a·alpha1 + b·alpha2 with alpha_i in J, from f in (a,b)·J."""
    ring = J.ring
    a, b = pair
    gens = [a * g for g in J.generators] + [b * g for g in J.generators]
    cert = ideal_member(f, Ideal(ring, gens))
    if cert is None:
        return None
    k = len(J.generators)
    alpha1 = Poly.zero()
    for cof, g in zip(cert.cofactors[:k], J.generators):
        alpha1 = alpha1 + cof * g
    alpha2 = Poly.zero()
    for cof, g in zip(cert.cofactors[k:], J.generators):
        alpha2 = alpha2 + cof * g
    return alpha1, alpha2


@dataclass
class Sl2Result:
    matrix: list            # 2x2 rows of Poly, row convention [a,b]·M = [c,d]
    det_is_one: bool
    product_matches: bool

    def verify(self) -> bool:
        return self.det_is_one and self.product_matches


def sl2_transition(J: Ideal, ab: GeneratorTuple, cd: GeneratorTuple) -> Sl2Result:
    """Determinant-1 matrix M with [a,b]·M = [c,d], for two generator pairs
    of J that agree mod J^2."""
    ring = J.ring
    a, b = ab.elements
    c, d = cd.elements
    if equal_ideals(Ideal(ring, [a, b]), J) is None:
        raise PreconditionError("(a,b) does not generate J")
    if equal_ideals(Ideal(ring, [c, d]), J) is None:
        raise PreconditionError("(c,d) does not generate J")
    Jsq = ideal_square(J)
    if ideal_member(a - c, Jsq) is None or ideal_member(b - d, Jsq) is None:
        raise PreconditionError("pairs do not agree modulo J^2")

    rep1 = _represent_in_product(a - c, (a, b), J)
    rep2 = _represent_in_product(b - d, (a, b), J)
    if rep1 is None or rep2 is None:
        raise PreconditionError("cannot express the differences inside (a,b)·J")
    a1, a2 = rep1
    a3, a4 = rep2
    one = ring.one()
    u, v, w, x = one - a1, -a2, -a3, one - a4
    # c = a·u + b·v and d = a·w + b·x exactly by construction
    f = one - (u * x - v * w)
    mem = ideal_member(f, Ideal(ring, [c, d]))
    if mem is None:
        raise PreconditionError(
            "internal expression 1 - det escapes (c,d); failing membership "
            f"element: {ring.str_of(f)}")
    gc, gd = mem.cofactors
    t1, t2 = -gc, gd
    M = [[u + b * t2, w + b * t1],
         [v - a * t2, x - a * t1]]
    det = _poly_det(M, ring)
    det_ok = is_zero_in_ring(det - one, ring)
    prod_ok = (is_zero_in_ring(a * M[0][0] + b * M[1][0] - c, ring)
               and is_zero_in_ring(a * M[0][1] + b * M[1][1] - d, ring))
    if not (det_ok and prod_ok):
        raise RuntimeError("sl2 transition failed its own verification")
    return Sl2Result(M, det_ok, prod_ok)


# ---------------------------------------------------------------------------
# completion of (a^2, b, c) to SL3


def _poly_mat_mul(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    return [[sum_polys([A[i][t] * B[t][j] for t in range(k)]) for j in range(m)]
            for i in range(n)]


def swan_towber_complete(a: Poly, b: Poly, c: Poly, ring: RingDescriptor,
                         bound: int = 2):
    """3x3 matrix with first row (a^2, b, c) and determinant exactly 1.

    The kernel of the row is free; column kernel vectors live in the image
    of the projector I - w^t v (w a cofactor section).  When two of them
    complement the section column to a rational-determinant matrix N, the
    inverse of N is the completion; every candidate is verified by exact
    determinant expansion.
    """
    asq = reduce_mod_ring(a * a, ring)
    v = [asq, reduce_mod_ring(b, ring), reduce_mod_ring(c, ring)]
    row_ideal = Ideal(ring, v)
    cert = ideal_member(ring.one(), row_ideal)
    if cert is None:
        raise PreconditionError("row (a^2, b, c) is not unimodular")
    p, q, r = cert.cofactors
    w = [p, q, r]

    def check(rows):
        if not verify_sl3_completion(rows, a, b, c, ring):
            return None
        return [[reduce_mod_ring(e, ring) for e in row] for row in rows]

    if is_zero_in_ring(a, ring):
        rows = [v, [ring.const(-1), ring.zero(), ring.zero()],
                [ring.zero(), -r, q]]
        done = check(rows)
        if done is not None:
            return done

    # column kernel vectors: g_j = e_j - v_j * w^t
    kernel_gens = []
    for j in range(3):
        gj = [reduce_mod_ring((-v[j]) * w[i], ring) for i in range(3)]
        gj[j] = gj[j] + ring.one()
        kernel_gens.append(gj)

    pool = list(kernel_gens)
    for i in range(3):
        for j in range(3):
            if i != j:
                pool.append([x - y for x, y in zip(kernel_gens[i], kernel_gens[j])])
                pool.append([x + y for x, y in zip(kernel_gens[i], kernel_gens[j])])
    mons = [ring.var(name) for name in ring.variables]
    for base_i in range(3):
        for m in mons:
            for sign in (1, -1):
                for other in range(3):
                    if other == base_i:
                        continue
                    cand = [reduce_mod_ring(x + (m * y).scale(sign), ring)
                            for x, y in zip(kernel_gens[base_i], kernel_gens[other])]
                    pool.append(cand)

    for i in range(len(pool)):
        for j in range(i + 1, len(pool)):
            cols = [w, pool[i], pool[j]]
            N = [[cols[cc][rr] for cc in range(3)] for rr in range(3)]
            det = reduce_mod_ring(_poly_det(N, ring), ring)
            if not det.is_constant() or det.is_zero():
                continue
            d = det.constant_value()
            # scale the first kernel column so det N = 1, then invert
            N = [[N[rr][0], N[rr][1].scale(Fraction(1) / d), N[rr][2]]
                 for rr in range(3)]
            M = _poly_adjugate(N, ring)
            done = check(M)
            if done is not None:
                return done
    raise SearchBoundExceeded("no free kernel basis found within the search pool")


def verify_sl3_completion(rows, a: Poly, b: Poly, c: Poly,
                          ring: RingDescriptor) -> bool:
    asq = reduce_mod_ring(a * a, ring)
    first = [reduce_mod_ring(e, ring) for e in rows[0]]
    if first != [asq, reduce_mod_ring(b, ring), reduce_mod_ring(c, ring)]:
        return False
    det = reduce_mod_ring(_poly_det(rows, ring), ring)
    return det == ring.one()


def unit_transition_2gen(J: Ideal, ab: GeneratorTuple, a_unit: Poly,
                         bound: int = 2):
    """2x2 matrix tau (det ≡ a_unit^2 mod J) carrying [a1,a2] to a new
    certified generating pair [b1,b2] of J via an SL3 completion."""
    ring = J.ring
    a1, a2 = ab.elements
    if equal_ideals(Ideal(ring, [a1, a2]), J) is None:
        raise PreconditionError("(a1,a2) does not generate J")
    alg = quotient_algebra(J)
    from .artinian import ResidueElement, try_invert

    inv = try_invert(alg.element(a_unit))
    if not isinstance(inv, ResidueElement):
        raise PreconditionError("a_unit is not invertible modulo J")
    b = inv.lift()
    sigma = swan_towber_complete(b, a2, -a1, ring, bound)
    tau = [[sigma[1][1], sigma[1][2]], [sigma[2][1], sigma[2][2]]]
    b1 = reduce_mod_ring(a1 * tau[0][0] + a2 * tau[0][1], ring)
    b2 = reduce_mod_ring(a1 * tau[1][0] + a2 * tau[1][1], ring)
    new_ideal = Ideal(ring, [b1, b2])
    eq = equal_ideals(new_ideal, J)
    if eq is None:
        raise RuntimeError("transition pair does not regenerate J")
    det = _poly_det(tau, ring)
    det_cert = ideal_member(det - a_unit * a_unit, J)
    if det_cert is None:
        raise RuntimeError("determinant of tau is not a_unit^2 mod J")
    new = GeneratorTuple(J, (b1, b2)).certify()
    return tau, new, eq, det_cert


# ---------------------------------------------------------------------------
# localized matrices


def power_exponent(den: Poly, base: Poly, ring: RingDescriptor) -> int:
    """k with den = base^k, by repeated exact division."""
    k = 0
    cur = den
    while not (cur.is_constant() and cur.constant_value() == 1):
        nxt = poly_divexact(cur, base)
        if nxt is None:
            raise RingError("denominator is not a power of the declared base")
        cur = nxt
        k += 1
    return k


class LocMatrix:
    """Matrix over A localized at two elements: value = num / (p^pe · q^qe)."""

    __slots__ = ("ring", "num", "p", "q", "pe", "qe")

    def __init__(self, ring: RingDescriptor, num, p: Poly, q: Poly,
                 pe: int = 0, qe: int = 0):
        self.ring = ring
        self.num = [[reduce_mod_ring(e, ring) for e in row] for row in num]
        self.p = p
        self.q = q
        self.pe = pe
        self.qe = qe

    @property
    def n(self):
        return len(self.num)

    def den_poly(self) -> Poly:
        return (self.p ** self.pe) * (self.q ** self.qe)

    @staticmethod
    def identity(ring, n, p, q):
        rows = [[ring.one() if i == j else ring.zero() for j in range(n)]
                for i in range(n)]
        return LocMatrix(ring, rows, p, q)

    @staticmethod
    def from_plain(ring, rows, p, q):
        return LocMatrix(ring, rows, p, q)

    def normalize(self) -> "LocMatrix":
        num, pe, qe = self.num, self.pe, self.qe
        changed = True
        while changed:
            changed = False
            if pe > 0:
                divided = [[poly_divexact(e, self.p) for e in row] for row in num]
                if all(e is not None for row in divided for e in row):
                    num, pe, changed = divided, pe - 1, True
            if qe > 0:
                divided = [[poly_divexact(e, self.q) for e in row] for row in num]
                if all(e is not None for row in divided for e in row):
                    num, qe, changed = divided, qe - 1, True
        return LocMatrix(self.ring, num, self.p, self.q, pe, qe)

    def mul(self, other: "LocMatrix") -> "LocMatrix":
        return LocMatrix(self.ring, _poly_mat_mul(self.num, other.num),
                         self.p, self.q, self.pe + other.pe,
                         self.qe + other.qe).normalize()

    def scale_den(self, extra_pe: int, extra_qe: int) -> "LocMatrix":
        f = (self.p ** extra_pe) * (self.q ** extra_qe)
        rows = [[e * f for e in row] for row in self.num]
        return LocMatrix(self.ring, rows, self.p, self.q,
                         self.pe + extra_pe, self.qe + extra_qe)

    def det_unit(self):
        """(c, i, j) with det(value) = c · p^i · q^j, c a nonzero rational."""
        d = reduce_mod_ring(_poly_det(self.num, self.ring), self.ring)
        if d.is_zero():
            raise PreconditionError("determinant vanishes; matrix not invertible")
        i = j = 0
        while True:
            nxt = poly_divexact(d, self.p)
            if nxt is None:
                break
            d, i = nxt, i + 1
        while True:
            nxt = poly_divexact(d, self.q)
            if nxt is None:
                break
            d, j = nxt, j + 1
        if not d.is_constant():
            raise PreconditionError("determinant is not a unit of the localization")
        n = self.n
        return d.constant_value(), i - n * self.pe, j - n * self.qe

    def inverse(self) -> "LocMatrix":
        c, i, j = self.det_unit()
        adj = _poly_adjugate(self.num, self.ring)
        # value^{-1} = adj(num) · p^pe q^qe / (c · p^{i + n·pe} q^{j + n·qe}) · p^{n pe} ...
        # det(num) = c p^{i + n pe} q^{j + n qe}; inverse = p^pe q^qe adj / det(num)
        num_pe = self.pe
        num_qe = self.qe
        den_pe = i + self.n * self.pe
        den_qe = j + self.n * self.qe
        shift_p = max(den_pe - num_pe, 0)
        shift_q = max(den_qe - num_qe, 0)
        extra_p = max(num_pe - den_pe, 0)
        extra_q = max(num_qe - den_qe, 0)
        f = (self.p ** extra_p) * (self.q ** extra_q)
        rows = [[(e * f).scale(Fraction(1) / c) for e in row] for row in adj]
        return LocMatrix(self.ring, rows, self.p, self.q, shift_p, shift_q).normalize()

    def cross_equal(self, other: "LocMatrix") -> bool:
        d1, d2 = self.den_poly(), other.den_poly()
        for r1, r2 in zip(self.num, other.num):
            for e1, e2 in zip(r1, r2):
                if not is_zero_in_ring(e1 * d2 - e2 * d1, self.ring):
                    return False
        return True

    def is_identity(self) -> bool:
        return self.cross_equal(LocMatrix.identity(self.ring, self.n, self.p, self.q))

    def congruent_identity_mod(self, m: Poly, sat: Poly, bound: int = 8) -> bool:
        """value ≡ Id mod (m) in the localization inverting sat."""
        den = self.den_poly()
        target = Ideal(self.ring, [m])
        for i in range(self.n):
            for j in range(self.n):
                diff = self.num[i][j] - (den if i == j else Poly.zero())
                ok = False
                probe = diff
                for _ in range(bound):
                    if ideal_member(probe, target) is not None:
                        ok = True
                        break
                    probe = probe * sat
                if not ok:
                    return False
        return True

    def row(self, i: int):
        return list(self.num[i])


def _poly_adjugate(mat, ring):
    n = len(mat)
    adj = [[ring.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[mat[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = _poly_det(minor, ring) if n > 1 else ring.one()
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


# ---------------------------------------------------------------------------
# patching a global element from compatible local data


def patch_element(f_over: LocFraction, g_over: LocFraction) -> Poly:
    """Global c with c·s^a = f and c·t^b = g, from compatible fractions."""
    ring = f_over.ring
    if not ring.domain:
        raise PreconditionError("patching needs a domain assertion")
    if f_over.den_class[0] != "power-of" or g_over.den_class[0] != "power-of":
        raise PreconditionError("patching expects power-of denominators")
    s = f_over.den_class[1]
    t = g_over.den_class[1]
    a = power_exponent(f_over.den, s, ring)
    b = power_exponent(g_over.den, t, ring)
    f, g = f_over.num, g_over.num
    if not is_zero_in_ring(f * (t ** b) - g * (s ** a), ring):
        raise PreconditionError("local data are not compatible")
    sa, tb = s ** a, t ** b
    cert = comaximal(Ideal(ring, [sa]), Ideal(ring, [tb]))
    if cert is None:
        raise PreconditionError("(s^a) and (t^b) are not comaximal")
    lam = cert.cert_u.cofactors[0]
    mu = cert.cert_v.cofactors[0]
    c = reduce_mod_ring(lam * f + mu * g, ring)
    if not is_zero_in_ring(c * sa - f, ring) or not is_zero_in_ring(c * tb - g, ring):
        raise RuntimeError("patched element failed its defining identities")
    return c


# ---------------------------------------------------------------------------
# Quillen splitting and isotopy splitting


def _lift_poly_to_T(p: Poly, base_n: int) -> Poly:
    return p.extend_vars(base_n, base_n + 1)


def _subst_T(p: Poly, base_n: int, value: Poly) -> Poly:
    """Substitute the trailing variable by `value` (a poly in the T-ring)."""
    out = Poly.zero()
    for m, c in p.terms.items():
        stem = Poly.term(m[:-1] + (0,), c)
        piece = stem
        for _ in range(m[-1]):
            piece = piece * value
        out = out + piece
    return out


def _project_from_T(p: Poly) -> Poly:
    if any(m[-1] != 0 for m in p.terms):
        raise RingError("polynomial still involves the parameter")
    return Poly({m[:-1]: c for m, c in p.terms.items()})


class IsotopyMatrix:
    """Matrix over A_{pq}[T]; entries live in the ring with T appended."""

    __slots__ = ("base", "ringT", "mat")

    def __init__(self, base: RingDescriptor, ringT: RingDescriptor, mat: LocMatrix):
        self.base = base
        self.ringT = ringT
        self.mat = mat

    @staticmethod
    def make(base: RingDescriptor, rows, p: Poly, q: Poly, pe: int, qe: int):
        ringT = base.extended(("_T",))
        n = base.nvars
        lifted = [[_lift_poly_to_T(e, n) for e in row] for row in rows]
        return IsotopyMatrix(base, ringT, LocMatrix(
            ringT, lifted, _lift_poly_to_T(p, n), _lift_poly_to_T(q, n), pe, qe))

    def at(self, value) -> LocMatrix:
        """Evaluate at T = value (a base-ring constant or polynomial)."""
        n = self.base.nvars
        if isinstance(value, (int, Fraction)):
            value_poly = Poly.const(value, n + 1)
        else:
            value_poly = _lift_poly_to_T(value, n)
        rows = [[_project_from_T(_subst_T(e, n, value_poly)) for e in row]
                for row in self.mat.num]
        return LocMatrix(self.base, rows, self.mat.p and _project_from_T(self.mat.p),
                         _project_from_T(self.mat.q), self.mat.pe,
                         self.mat.qe).normalize()

    def subst_scaled(self, factor: Poly) -> "IsotopyMatrix":
        """T -> factor · T with factor from the base ring."""
        n = self.base.nvars
        T = Poly.variable(n, n + 1)
        value = _lift_poly_to_T(factor, n) * T
        rows = [[_subst_T(e, n, value) for e in row] for row in self.mat.num]
        return IsotopyMatrix(self.base, self.ringT, LocMatrix(
            self.ringT, rows, self.mat.p, self.mat.q, self.mat.pe,
            self.mat.qe).normalize())

    def normalized(self) -> "IsotopyMatrix":
        return IsotopyMatrix(self.base, self.ringT, self.mat.normalize())

    def mul(self, other: "IsotopyMatrix") -> "IsotopyMatrix":
        return IsotopyMatrix(self.base, self.ringT, self.mat.mul(other.mat))

    def inverse(self) -> "IsotopyMatrix":
        return IsotopyMatrix(self.base, self.ringT, self.mat.inverse())


@dataclass
class QuillenSplit:
    psi1: IsotopyMatrix   # over A_t[T], ≡ Id mod (s)
    psi2: IsotopyMatrix   # over A_s[T], ≡ Id mod (t)
    k: int
    lam: Poly
    mu: Poly

    def factors(self):
        return self.psi1, self.psi2


def quillen_split(sigma: IsotopyMatrix, s: Poly, t: Poly,
                  cap: int = 1024) -> QuillenSplit:
    """sigma(T) = psi2(T)·psi1(T) with psi1 s-denominator-free and ≡ Id mod
    (s), psi2 t-denominator-free and ≡ Id mod (t); exact identity, exponent
    found by doubling."""
    base = sigma.base
    if not sigma.at(0).is_identity():
        raise PreconditionError("sigma(0) is not the identity")
    sigma.mat.det_unit()  # raises unless det is a unit of the localization
    n = base.nvars
    sT = _lift_poly_to_T(s, n)
    tT = _lift_poly_to_T(t, n)
    k = 1
    while k <= cap:
        cert = comaximal(Ideal(base, [s ** k]), Ideal(base, [t ** k]))
        if cert is None:
            raise PreconditionError("(s^k) and (t^k) are not comaximal")
        lam = cert.cert_u.cofactors[0]
        mu = cert.cert_v.cofactors[0]
        psi1 = sigma.subst_scaled(reduce_mod_ring(lam * s ** k, base)).normalized()
        if psi1.mat.pe == 0:
            psi2 = sigma.mul(psi1.inverse()).normalized()
            if psi2.mat.qe == 0:
                ok1 = psi1.mat.congruent_identity_mod(sT, tT)
                ok2 = psi2.mat.congruent_identity_mod(tT, sT)
                id1 = psi1.at(0).is_identity()
                id2 = psi2.at(0).is_identity()
                prod_ok = psi2.mul(psi1).mat.cross_equal(sigma.mat)
                if ok1 and ok2 and id1 and id2 and prod_ok:
                    return QuillenSplit(psi1, psi2, k, lam, mu)
        k *= 2
    raise SearchBoundExceeded("denominator-clearing exponent exceeded the cap")


@dataclass
class IsotopySplit:
    theta1: LocMatrix  # over A_s, ≡ Id mod (t)
    theta2: LocMatrix  # over A_t, ≡ Id mod (s)
    split: QuillenSplit


def isotopy_split(theta: LocMatrix, isotopy: IsotopyMatrix, s: Poly, t: Poly,
                  cap: int = 1024) -> IsotopySplit:
    """theta = (theta1)(theta2) with theta1 over A_s ≡ Id mod (t) and
    theta2 over A_t ≡ Id mod (s), via the splitting of its isotopy."""
    if not isotopy.at(0).is_identity():
        raise PreconditionError("isotopy does not start at the identity")
    if not isotopy.at(1).cross_equal(theta):
        raise PreconditionError("isotopy does not end at theta")
    qs = quillen_split(isotopy, s, t, cap)
    theta1 = qs.psi2.at(1)
    theta2 = qs.psi1.at(1)
    if not theta1.mul(theta2).cross_equal(theta):
        raise RuntimeError("isotopy split failed the exact product identity")
    if not theta1.congruent_identity_mod(t, s):
        raise RuntimeError("theta1 is not congruent to Id mod (t)")
    if not theta2.congruent_identity_mod(s, t):
        raise RuntimeError("theta2 is not congruent to Id mod (s)")
    return IsotopySplit(theta1, theta2, qs)


# ---------------------------------------------------------------------------
# moving lemma (free module case)


@dataclass
class MovingLemmaResult:
    Jprime: Ideal
    beta: GeneratorTuple            # generates J ∩ Jprime
    cert_generation: object         # (beta) = J ∩ Jprime
    congruence: CongruenceCertificate  # beta ≡ w mod J^2
    comax_J: ComaximalityCertificate | None   # None when Jprime = (1)
    comax_avoid: list
    auxiliary: Poly | None

    def verify(self) -> bool:
        if not self.cert_generation.verify() or not self.congruence.verify():
            return False
        if self.comax_J is not None and not self.comax_J.verify():
            return False
        return all(c.verify() for c in self.comax_avoid)


def moving_lemma_free(J: Ideal, w: GeneratorTuple, avoid,
                      bound: int = DEFAULT_BOUND) -> MovingLemmaResult:
    """beta generating J ∩ J' with beta ≡ w mod J^2, J' comaximal with J and
    every listed ideal, ht J' >= n or J' = (1).

    The auxiliary element is a product of a J^2 generator with one generator
    of each avoid ideal; beta is searched as w + a·γ over a small
    deterministic pool and every clause is certified.
    """
    ring = J.ring
    n = len(w.elements)
    if height(J) != n or ring.dim != n:
        raise PreconditionError("moving lemma needs ht J = n = dim A")
    Jsq = ideal_square(J)
    if equal_ideals(Ideal(ring, list(w.elements) + list(Jsq.generators)), J) is None:
        raise PreconditionError("tuple does not generate J mod J^2")
    for av in avoid:
        if height_or_inf(av) < 1:
            raise PreconditionError("avoid ideal of height 0")

    def finish(Jprime, beta, aux):
        inter = groebner.ideal_intersect(J, Jprime)
        gen_cert = equal_ideals(Ideal(ring, beta), inter)
        if gen_cert is None:
            return None
        cong = make_congruence(beta, w.elements, Jsq)
        comax_J = None
        if not is_unit_ideal(Jprime):
            comax_J = comaximal(J, Jprime)
            if comax_J is None:
                return None
            if height(Jprime) < n:
                return None
        comax_avoid = []
        for av in avoid:
            cm = comaximal(av, Jprime)
            if cm is None:
                return None
            comax_avoid.append(cm)
        bt = GeneratorTuple(inter, tuple(beta)).certify()
        return MovingLemmaResult(Jprime, bt, gen_cert, cong, comax_J,
                                 comax_avoid, aux)

    # shortcut: the tuple already lifts
    if equal_ideals(Ideal(ring, w.elements), J) is not None:
        out = finish(Ideal(ring, [ring.one()]), list(w.elements), None)
        if out is not None:
            return out

    # auxiliary element a in J^2 ∩ (∩ avoid), of height exactly 1
    aux_candidates = []
    for g in Jsq.generators:
        if g.is_zero():
            continue
        a = g
        ok = True
        for av in avoid:
            pick = next((h for h in av.generators if not h.is_zero()), None)
            if pick is None:
                ok = False
                break
            a = a * pick
        if ok and not a.is_zero():
            aux_candidates.append(reduce_mod_ring(a, ring))
    aux_candidates = [a for a in aux_candidates if not a.is_zero()]
    if not aux_candidates:
        raise SearchBoundExceeded("no nonzero auxiliary element available")

    pool_scalars = [ring.zero(), ring.one(), ring.const(-1), ring.const(2),
                    ring.const(-2)]
    pool_scalars += [ring.var(v) for v in ring.variables]
    pool_scalars += [-ring.var(v) for v in ring.variables]

    for a in aux_candidates[:4]:
        if height_or_inf(Ideal(ring, [a])) != 1:
            continue
        for gamma in product(range(len(pool_scalars)), repeat=n):
            beta = [reduce_mod_ring(wi + a * pool_scalars[gi], ring)
                    for wi, gi in zip(w.elements, gamma)]
            Jt = Ideal(ring, beta)
            if equal_ideals(Ideal(ring, beta + [a]), J) is None:
                continue
            if is_unit_ideal(Jt) or krull_dimension(Jt) != 0:
                continue
            try:
                split = split_ideal(J, Jt, Ideal(ring, [a]))
            except (PreconditionError, RuntimeError):
                continue
            out = finish(split.Jprime, beta, a)
            if out is not None:
                return out
    raise SearchBoundExceeded("moving lemma search exhausted")


def elementary_isotopy(base: RingDescriptor, n: int, factors, p: Poly, q: Poly):
    """gamma(T) = prod (Id + value·T·e_ij) for localized elementary factors.

    factors: list of (i, j, LocMatrix-style numerator Poly, pe, qe) where the
    factor value is num / (p^pe q^qe).
    """
    ringT = base.extended(("_T",))
    nv = base.nvars
    T = Poly.variable(nv, nv + 1)
    acc = IsotopyMatrix.make(base, [[base.one() if i == j else base.zero()
                                     for j in range(n)] for i in range(n)],
                             p, q, 0, 0)
    for (i, j, num, pe, qe) in factors:
        # factor = Id + (num/(p^pe q^qe))·T·e_ij, on denominator p^pe q^qe
        den = (acc.mat.p ** pe) * (acc.mat.q ** qe)
        rows = [[den if r == c_ else ringT.zero() for c_ in range(n)]
                for r in range(n)]
        rows[i][j] = rows[i][j] + _lift_poly_to_T(num, nv) * T
        fac = IsotopyMatrix(base, ringT, LocMatrix(ringT, rows, acc.mat.p,
                                                   acc.mat.q, pe, qe))
        acc = acc.mul(fac)
    return acc
