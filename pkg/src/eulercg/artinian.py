"""Linear algebra inside zero-dimensional quotients A/J.

A quotient with finitely many standard monomials becomes an explicit
Q-vector space with per-variable multiplication matrices; units, idempotent
lifting, and effective elementary reduction of unimodular rows all reduce to
exact rational linear algebra here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import groebner
from .groebner import (Ideal, PreconditionError, SearchBoundExceeded,
                       buchberger, equal_ideals, ideal_member, ideal_square,
                       ideal_sum, is_zero_in_ring, krull_dimension,
                       normal_form)
from .ring import GREVLEX, Poly, RingDescriptor, RingError, mono_divides


# ---------------------------------------------------------------------------
# exact rational linear algebra (internal)


def q_solve(mat: list[list[Fraction]], rhs: list[Fraction]):
    """One solution of mat * x = rhs over Q, or None if inconsistent."""
    m, n = len(mat), len(mat[0]) if mat else 0
    aug = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = Fraction(1) / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


def q_nullspace(mat: list[list[Fraction]]):
    """Basis of the right nullspace of mat over Q."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    a = [row[:] for row in mat]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [u - f * v for u, v in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, pc in enumerate(piv_cols):
            vec[pc] = -a[i][fc]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# the algebra


class ArtinianAlgebra:
    """A/J as a finite-dimensional Q-vector space with multiplication."""

    __slots__ = ("source_ideal", "gb", "basis", "index", "mult_tables", "ring")

    def __init__(self, source_ideal: Ideal, gb, basis, mult_tables):
        self.source_ideal = source_ideal
        self.ring = source_ideal.ring
        self.gb = gb
        self.basis = basis                      # standard monomials, ascending
        self.index = {m: i for i, m in enumerate(basis)}
        self.mult_tables = mult_tables          # per variable: column-major coords

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def nf(self, p: Poly) -> Poly:
        rem, _ = normal_form(p, self.source_ideal)
        return rem

    def coords(self, p: Poly) -> list[Fraction]:
        rem = self.nf(p)
        vec = [Fraction(0)] * len(self.basis)
        for m, c in rem.terms.items():
            if m not in self.index:
                raise RingError("normal form left a non-standard monomial")
            vec[self.index[m]] = c
        return vec

    def from_coords(self, vec) -> Poly:
        terms = {m: Fraction(c) for m, c in zip(self.basis, vec) if c != 0}
        return Poly(terms)

    def element(self, p: Poly) -> "ResidueElement":
        return ResidueElement(self, self.coords(p))

    def one(self) -> "ResidueElement":
        return self.element(self.ring.one())

    def zero(self) -> "ResidueElement":
        return ResidueElement(self, [Fraction(0)] * self.dimension)

    def to_json(self) -> dict:
        return {
            "ideal": self.source_ideal.gens_str(),
            "basis": [list(m) for m in self.basis],
            "tables": {
                var: [[str(c) for c in col] for col in table]
                for var, table in zip(self.ring.variables, self.mult_tables)
            },
        }


@dataclass
class ResidueElement:
    algebra: ArtinianAlgebra
    coords: list

    def lift(self) -> Poly:
        return self.algebra.from_coords(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other):
        return ResidueElement(self.algebra,
                              [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return ResidueElement(self.algebra,
                              [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return ResidueElement(self.algebra, [-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, ResidueElement):
            prod = self.lift() * other.lift()
            return self.algebra.element(prod)
        return ResidueElement(self.algebra, [Fraction(other) * a for a in self.coords])

    def __eq__(self, other):
        return (isinstance(other, ResidueElement)
                and self.algebra is other.algebra and self.coords == other.coords)

    def scale_int(self, k: int):
        return ResidueElement(self.algebra, [Fraction(k) * a for a in self.coords])

    def __repr__(self):
        return f"Res({self.algebra.ring.str_of(self.lift())})"


class NotUnit:
    """Negative answer from try_invert, carrying a rational kernel vector."""

    __slots__ = ("element", "kernel")

    def __init__(self, element: ResidueElement, kernel):
        self.element = element
        self.kernel = kernel

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotUnit(kernel={self.kernel})"


def quotient_algebra(J: Ideal) -> ArtinianAlgebra:
    """Standard-monomial basis and multiplication tables of A/J."""
    if krull_dimension(J) != 0:
        raise PreconditionError("quotient_algebra needs a zero-dimensional ideal")
    gb = buchberger(J)
    lts = [b.leading(gb.order)[0] for b in gb.basis]
    n = J.ring.nvars
    basis = []
    seen = set()
    stack = [(0,) * n]
    while stack:
        m = stack.pop()
        if m in seen:
            continue
        seen.add(m)
        if any(mono_divides(lt, m) for lt in lts):
            continue
        basis.append(m)
        for i in range(n):
            up = list(m)
            up[i] += 1
            stack.append(tuple(up))
    basis.sort(key=gb.order.key)
    alg = ArtinianAlgebra(J, gb, basis, [])
    tables = []
    for v in range(n):
        xv = Poly.variable(v, n)
        cols = [alg.coords(xv * Poly.term(m, 1)) for m in basis]
        tables.append(cols)
    alg.mult_tables.extend(tables)
    return alg


def multiplication_matrix(r: ResidueElement):
    """Column-major matrix of multiplication by r on the monomial basis."""
    alg = r.algebra
    p = r.lift()
    cols = [alg.coords(p * Poly.term(m, 1)) for m in alg.basis]
    # convert to row-major
    d = alg.dimension
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def try_invert(r: ResidueElement):
    """Inverse of r, or NotUnit with a kernel vector of multiplication-by-r."""
    alg = r.algebra
    mat = multiplication_matrix(r)
    rhs = alg.coords(alg.ring.one())
    sol = q_solve(mat, rhs)
    if sol is None:
        null = q_nullspace(mat)
        return NotUnit(r, null[0] if null else None)
    return ResidueElement(alg, sol)


def is_unit(r: ResidueElement) -> bool:
    return isinstance(try_invert(r), ResidueElement)


# ---------------------------------------------------------------------------
# idempotents


def idempotent_of_ideal(Jbig: Ideal, Jsmall: Ideal) -> Poly:
    """Idempotent generator e of Jbig modulo Jsmall.

    Requires Jsmall ⊆ Jbig, A/Jsmall zero-dimensional, and Jbig idempotent
    mod Jsmall (Jbig ⊆ Jbig² + Jsmall).  Returns e with e² ≡ e and
    (e) + Jsmall = Jbig, both certified.
    """
    ring = Jbig.ring
    for g in Jsmall.generators:
        if ideal_member(g, Jbig) is None:
            raise PreconditionError("Jsmall is not contained in Jbig")
    if krull_dimension(Jsmall) != 0:
        raise PreconditionError("A/Jsmall must be zero-dimensional")

    alg = quotient_algebra(Jsmall)
    gens = [alg.nf(g) for g in Jbig.generators]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        e = ring.zero()
        _check_idempotent_certs(Jbig, Jsmall, e)
        return e

    sq_plus = Ideal(ring, [a * b for a in gens for b in gens] + list(Jsmall.generators))
    k = len(gens)
    Q = [[Poly.zero()] * k for _ in range(k)]
    for i, g in enumerate(gens):
        cert = ideal_member(g, sq_plus)
        if cert is None:
            raise PreconditionError(
                f"ideal not idempotent mod Jsmall: generator {ring.str_of(g)}"
                " escapes Jbig^2 + Jsmall")
        # fold cofactors of the products a*b into coefficients in Jbig
        idx = 0
        for u in range(k):
            for v in range(k):
                c = cert.cofactors[idx]
                idx += 1
                if not c.is_zero():
                    Q[i][u] = Q[i][u] + c * gens[v]
    # det(I - Q) = 1 - j with j idempotent mod Jsmall generating the image
    iq = [[(ring.one() if i == u else ring.zero()) - Q[i][u] for u in range(k)]
          for i in range(k)]
    det = _poly_det(iq, ring)
    e = alg.nf(ring.one() - det)
    _check_idempotent_certs(Jbig, Jsmall, e)
    return e


def _check_idempotent_certs(Jbig: Ideal, Jsmall: Ideal, e: Poly):
    ring = Jbig.ring
    if ideal_member(e * e - e, Jsmall) is None:
        raise PreconditionError("constructed element is not idempotent mod Jsmall")
    joined = Ideal(ring, [e] + list(Jsmall.generators))
    if equal_ideals(joined, Jbig) is None:
        raise PreconditionError("(e) + Jsmall does not reproduce Jbig")


def _poly_det(mat, ring: RingDescriptor) -> Poly:
    n = len(mat)
    if n == 0:
        return ring.one()
    if n == 1:
        return mat[0][0]
    det = ring.zero()
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in mat[1:]]
        sub = _poly_det(minor, ring)
        term = mat[0][j] * sub
        det = det + (term if j % 2 == 0 else -term)
    return det


def lift_idempotent(e0: Poly, N: Ideal, cap: int = 64):
    """Newton lift 3e² - 2e³ to an exact idempotent modulo the ring modulus.

    N must be nilpotent in the working quotient; each step at least doubles
    the vanishing order of e² - e.  Returns (e, iterations).
    """
    ring = N.ring
    if ideal_member(e0 * e0 - e0, N) is None:
        raise PreconditionError("e0^2 - e0 must lie in N")
    for g in N.generators:
        if not _nilpotent_in_ring(g, ring):
            raise PreconditionError(
                f"N generator {ring.str_of(g)} is not nilpotent in the quotient")
    e = groebner.reduce_mod_ring(e0, ring)
    iters = 0
    while not is_zero_in_ring(e * e - e, ring):
        if iters >= cap:
            raise SearchBoundExceeded(
                "idempotent lifting did not converge; N is not nilpotent")
        e = groebner.reduce_mod_ring(e * e * (ring.const(3) - e.scale(2)), ring)
        iters += 1
    if ideal_member(e - groebner.reduce_mod_ring(e0, ring), N) is None:
        raise PreconditionError("lift drifted away from e0 modulo N")
    return e, iters


def _nilpotent_in_ring(g: Poly, ring: RingDescriptor) -> bool:
    """g^k ≡ 0 mod the ring modulus for some k (radical membership of 0)."""
    ext = ring.extended(("_w",))
    n_old, n_new = ring.nvars, ext.nvars
    w = Poly.variable(n_new - 1, n_new)
    gens = list(ext.modulus)
    gens.append(ext.one() - w * g.extend_vars(n_old, n_new))
    plain = RingDescriptor(ext.variables, (), dim=None, domain=True, check=False)
    gb = buchberger(Ideal(plain, gens))
    return len(gb.basis) == 1 and gb.basis[0].is_constant()


# ---------------------------------------------------------------------------
# elementary matrices over the quotient


@dataclass
class ElementaryFactor:
    """Identity plus `value` in off-diagonal slot (i, j); det 1."""
    i: int
    j: int
    value: ResidueElement


class MatrixOverQuotient:
    """n x n matrix over A/J, optionally with an elementary factorization."""

    __slots__ = ("algebra", "entries", "factors")

    def __init__(self, algebra: ArtinianAlgebra, entries, factors=None):
        self.algebra = algebra
        self.entries = entries
        self.factors = factors

    @staticmethod
    def identity(algebra: ArtinianAlgebra, n: int) -> "MatrixOverQuotient":
        one, zero = algebra.one(), algebra.zero()
        rows = [[one if i == j else zero for j in range(n)] for i in range(n)]
        return MatrixOverQuotient(algebra, rows, factors=[])

    @staticmethod
    def from_factors(algebra: ArtinianAlgebra, n: int, factors) -> "MatrixOverQuotient":
        M = MatrixOverQuotient.identity(algebra, n)
        entries = M.entries
        for f in factors:
            entries = _mat_mul(entries, _factor_matrix(algebra, n, f))
        return MatrixOverQuotient(algebra, entries, factors=list(factors))

    def size(self) -> int:
        return len(self.entries)


def _factor_matrix(algebra, n, f: ElementaryFactor):
    M = MatrixOverQuotient.identity(algebra, n).entries
    M[f.i][f.j] = M[f.i][f.j] + f.value
    return M


def _mat_mul(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = A[i][0] * B[0][j]
            for k in range(1, n):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def row_times_matrix(row, M):
    n = len(row)
    return [sum_elements([row[k] * M.entries[k][j] for k in range(n)]) for j in range(n)]


def sum_elements(elems):
    acc = elems[0]
    for e in elems[1:]:
        acc = acc + e
    return acc


def apply_factors(row, algebra, factors):
    """Replay elementary column operations on a row vector."""
    cur = list(row)
    for f in factors:
        cur[f.j] = cur[f.j] + cur[f.i] * f.value
    return cur


def row_unimodular(row) -> bool:
    """Entries generate the unit ideal of the quotient."""
    alg = row[0].algebra
    ring = alg.ring
    lifts = [r.lift() for r in row]
    joined = Ideal(ring, lifts + list(alg.source_ideal.generators))
    return groebner.is_unit_ideal(joined)


def unit_search(row, bound: int = 6):
    """Combination c = row[0] + sum λ_i row[i] that is a unit, λ integers.

    Enumerates λ by increasing max-norm and verifies with try_invert.
    Returns (lambdas, combination, inverse witness).
    """
    if not row_unimodular(row):
        raise PreconditionError("row is not unimodular over the quotient")
    n = len(row)
    for norm in range(bound + 1):
        values = range(-norm, norm + 1)
        for lam in product(values, repeat=n - 1):
            if norm > 0 and max((abs(v) for v in lam), default=0) != norm:
                continue
            c = row[0]
            for lv, r in zip(lam, row[1:]):
                if lv:
                    c = c + r.scale_int(lv)
            inv = try_invert(c)
            if isinstance(inv, ResidueElement):
                return list(lam), c, inv
    raise SearchBoundExceeded("unit_search exhausted the integer enumeration")


def reduce_unimodular_row(row, bound: int = 6) -> MatrixOverQuotient:
    """Elementary matrix M (as a factor list) with row · M = (1, 0, ..., 0)."""
    if len(row) < 2:
        raise PreconditionError("need a row of length at least 2")
    alg = row[0].algebra
    if not row_unimodular(row):
        raise PreconditionError("row is not unimodular over the quotient")
    lam, c, cinv = unit_search(row, bound)
    factors = []
    cur = list(row)
    one = alg.one()

    def push(i, j, value):
        factors.append(ElementaryFactor(i, j, value))
        cur[j] = cur[j] + cur[i] * value

    for i, lv in enumerate(lam, start=1):
        if lv:
            push(i, 0, alg.element(alg.ring.const(lv)))
    # cur[0] == c is a unit; clear the tail, then normalize c to 1
    for j in range(1, len(row)):
        if not cur[j].is_zero():
            push(0, j, -(cinv * cur[j]))
    # (c, 0, ...) -> (c, 1-c, ...) -> (1, 1-c, ...) -> (1, 0, ...)
    push(0, 1, cinv * (one - c))
    push(1, 0, one)
    push(0, 1, -(cur[1]))
    target = [one] + [alg.zero()] * (len(row) - 1)
    if cur != target:
        raise RuntimeError("elementary reduction failed to reach (1,0,...,0)")
    return MatrixOverQuotient.from_factors(alg, len(row), factors)


def lift_elementary(M: MatrixOverQuotient):
    """Entry-wise lift of each elementary factor, multiplied in A.

    Returns the lifted matrix (rows of Poly) whose determinant is exactly 1
    and whose reduction mod J equals M.
    """
    if M.factors is None:
        raise PreconditionError("matrix carries no elementary factorization")
    alg = M.algebra
    ring = alg.ring
    n = M.size()
    lifted = [[ring.one() if i == j else ring.zero() for j in range(n)]
              for i in range(n)]
    for f in M.factors:
        F = [[ring.one() if i == j else ring.zero() for j in range(n)]
             for i in range(n)]
        F[f.i][f.j] = f.value.lift()
        lifted = [[sum_polys([lifted[i][k] * F[k][j] for k in range(n)])
                   for j in range(n)] for i in range(n)]
    det = _poly_det(lifted, ring)
    if det != ring.one():
        raise RuntimeError("lifted elementary product lost determinant 1")
    for i in range(n):
        for j in range(n):
            if alg.element(lifted[i][j]) != M.entries[i][j]:
                raise RuntimeError("lift does not reduce to the input matrix")
    return lifted


def sum_polys(ps):
    acc = ps[0]
    for p in ps[1:]:
        acc = acc + p
    return acc
