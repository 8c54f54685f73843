"""Addition and Subtraction Principles for pairs of height-2 ideals in a
two-dimensional domain.

Both pipelines follow the same arc: normalize one generator row over an
Artinian quotient, localize at a pair of comaximal elements, split a
conjugated elementary automorphism along its isotopy, patch the two local
generator rows into a global one, and correct residues by a lifted
determinant-one matrix.  Every claim the pipeline makes is certified and the
final PrincipleResult re-verifies from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import groebner
from .artinian import (MatrixOverQuotient, lift_elementary, quotient_algebra,
                       reduce_unimodular_row)
from .groebner import (Ideal, PreconditionError, comaximal, equal_ideals,
                       height, ideal_intersect, ideal_member, ideal_square,
                       is_unit_ideal, is_zero_in_ring, reduce_mod_ring)
from .ring import Poly, RingDescriptor
from .transforms import (CongruenceCertificate, GeneratorTuple, IsotopyMatrix,
                         LocMatrix, elementary_isotopy, isotopy_split,
                         make_congruence, patch_element, sl2_transition)
from .ring import LocFraction


class NotSupported(NotImplementedError):
    """Capability outside the implemented n = 2 case."""


@dataclass
class PrincipleResult:
    output: GeneratorTuple
    congruences: list
    generation: object
    transcript: list = field(default_factory=list)

    def verify(self) -> bool:
        return verify_principle_result(self)


def verify_principle_result(r: PrincipleResult) -> bool:
    """Re-check every embedded certificate from scratch."""
    try:
        if not r.output.verify():
            return False
        if r.generation is None or not r.generation.verify():
            return False
        for cong in r.congruences:
            if not cong.verify():
                return False
    except Exception:
        return False
    return True


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _require_dim2_domain(ring: RingDescriptor):
    if ring.dim != 2:
        raise NotSupported(
            "only the two-dimensional case is implemented; general n needs "
            "effective elementary transitivity over one-dimensional quotients")
    if not ring.domain:
        raise PreconditionError("pipeline needs the ambient domain assertion")


def _row_apply(row, M):
    """Row vector times a matrix given as rows of Poly."""
    n = len(row)
    return [sum((row[r] * M[r][i] for r in range(1, n)), row[0] * M[0][i])
            for i in range(n)]


def _normalize_first_one(Jmod: Ideal, row):
    """Elementary sigma in SL2(A) with (row·sigma)[0] ≡ 1, [1] ≡ 0 mod Jmod."""
    alg = quotient_algebra(Jmod)
    res_row = [alg.element(r) for r in row]
    M = reduce_unimodular_row(res_row)
    sigma = lift_elementary(M)
    moved = [reduce_mod_ring(p, Jmod.ring) for p in _row_apply(row, sigma)]
    return sigma, moved, M


def _unit_row_to_10_factors(ring, r0, r1, inv_num, inv_pe, p, q):
    """Elementary factors over the localization inverting p that carry
    (r0, r1) to (1, 0); r0's inverse is inv_num / p^inv_pe.

    Factors are (i, j, numerator, pe, qe) with value num/(p^pe q^qe):
    column j gains value times column i.
    """
    one = ring.one()
    facs = []
    # (r0, r1) -> (r0, 1): add inv*(1 - r1) * col0 to col1
    facs.append((0, 1, inv_num * (one - r1), inv_pe, 0))
    # (r0, 1) -> (1, 1): add (1 - r0) * col1 to col0
    facs.append((1, 0, one - r0, 0, 0))
    # (1, 1) -> (1, 0): subtract col0 from col1
    facs.append((0, 1, ring.const(-1), 0, 0))
    return facs


def _loc_row(ring, row, p, q):
    return LocMatrix(ring, [list(row)], p, q, 0, 0)


def _patch_rows(ring, row_s, row_t, s, t):
    """Patch a row over A_s against a row over A_t coordinate-wise."""
    if row_s.qe != 0:
        raise RuntimeError("s-side row still carries t-denominators")
    if row_t.pe != 0:
        raise RuntimeError("t-side row still carries s-denominators")
    out = []
    for j in range(len(row_s.num[0])):
        f = LocFraction(ring, row_s.num[0][j], s ** row_s.pe, ("power-of", s))
        g = LocFraction(ring, row_t.num[0][j], t ** row_t.qe, ("power-of", t))
        out.append(patch_element(f, g))
    return out


def _connecting_matrix(ring, g, wanted, Jk):
    """C (rows of Poly) with [g]·C ≡ wanted mod Jk^2 and det C ≡ 1 mod Jk."""
    Jk2 = ideal_square(Jk)
    sol = Ideal(ring, list(g) + list(Jk2.generators))
    cols = []
    for w in wanted:
        mem = ideal_member(w, sol)
        if mem is None:
            raise RuntimeError("target generator escapes (g) + Jk^2")
        cols.append(mem.cofactors[:len(g)])
    C = [[cols[i][r] for i in range(len(wanted))] for r in range(len(g))]
    det = C[0][0] * C[1][1] - C[0][1] * C[1][0]
    if ideal_member(det - ring.one(), Jk) is None:
        raise RuntimeError(
            "connecting matrix is not special linear mod the component; "
            "the pipeline lost the orientation")
    return C


def _sl2_factor_lift(target: Ideal, Cbar_entries):
    """Factor an SL2 matrix over the Artinian quotient A/target into
    elementary factors and lift to a det-1 matrix over A."""
    alg = quotient_algebra(target)
    a, b = Cbar_entries[0]
    c, d = Cbar_entries[1]
    row = [alg.element(a), alg.element(b)]
    F = reduce_unimodular_row(row)
    # C·F is lower unitriangular E21(l); so C = E21(l) · F^{-1}
    CF = _artinian_mat_mul(alg, [[alg.element(a), alg.element(b)],
                                 [alg.element(c), alg.element(d)]], F)
    ell = CF[1][0]
    if not (CF[0][0] == alg.one() and CF[0][1].is_zero()
            and CF[1][1] == alg.one()):
        raise RuntimeError("elementary factorization of the correction failed")
    from .artinian import ElementaryFactor

    factors = [ElementaryFactor(1, 0, ell)]
    for f in reversed(F.factors):
        factors.append(ElementaryFactor(f.i, f.j, -f.value))
    M = MatrixOverQuotient.from_factors(alg, 2, factors)
    return lift_elementary(M)


def _artinian_mat_mul(alg, entries, F: MatrixOverQuotient):
    from .artinian import _mat_mul

    return _mat_mul(entries, F.entries)


def _shrink_row(ring, g, target: Ideal):
    """Replace the row by its normal form modulo target^2 when that still
    generates target.  Differences lie in target^2, so every downstream
    congruence clause is unaffected."""
    tsq = ideal_square(target)
    reduced = [groebner.normal_form(p, tsq)[0] for p in g]
    if equal_ideals(Ideal(ring, reduced), target) is not None:
        return reduced
    return list(g)


def _correct_residues(ring, g, target: Ideal, wants, transcript):
    """Right-multiply the row g by a lifted SL2 matrix so its residues match
    every wanted tuple modulo the square of its component ideal."""
    mats = []
    for Jk, wk in wants:
        mats.append(_connecting_matrix(ring, g, wk, Jk))
    if len(mats) == 1:
        C = mats[0]
    else:
        (J1, _), (J2, _) = wants
        cm = comaximal(J1, J2)
        if cm is None:
            raise RuntimeError("component ideals are not comaximal")
        u, v = cm.u, cm.v  # u in J1, v in J2, u + v = 1
        C = [[v * mats[0][r][i] + u * mats[1][r][i] for i in range(2)]
             for r in range(2)]
    det = C[0][0] * C[1][1] - C[0][1] * C[1][0]
    if ideal_member(det - ring.one(), target) is None:
        raise RuntimeError("combined correction is not special linear mod target")
    Cbar = [[reduce_mod_ring(e, ring) for e in row] for row in C]
    theta = _sl2_factor_lift(target, Cbar)
    c = [reduce_mod_ring(p, ring) for p in _row_apply(g, theta)]
    transcript.append({
        "step": "residue-correction",
        "matrix": [[ring.str_of(e) for e in row] for row in theta],
    })
    return c


# ---------------------------------------------------------------------------
# addition principle


def addition_principle(J1g: GeneratorTuple, J2g: GeneratorTuple,
                       bound: int = 6) -> PrincipleResult:
    """Certified generators of J1 ∩ J2 congruent to the given generators of
    J1 mod J1^2 and of J2 mod J2^2."""
    ring = J1g.ideal.ring
    _require_dim2_domain(ring)
    if len(J1g.elements) != 2 or len(J2g.elements) != 2:
        raise NotSupported("only pairs of 2-generated ideals are supported")
    a0 = [reduce_mod_ring(p, ring) for p in J1g.elements]
    b0 = [reduce_mod_ring(p, ring) for p in J2g.elements]
    J1 = Ideal(ring, a0)
    J2 = Ideal(ring, b0)
    if height(J1) != 2 or height(J2) != 2:
        raise PreconditionError("both ideals must have height 2")
    if comaximal(J1, J2) is None:
        raise PreconditionError("ideals are not comaximal")
    J3 = ideal_intersect(J1, J2)
    transcript = []

    # normalize the a-row over A/J2: a[0] ≡ 1, a[1] ≡ 0 mod J2
    sigma, a, _ = _normalize_first_one(J2, a0)
    transcript.append({"step": "normalize-mod-J2",
                       "sigma": [[ring.str_of(e) for e in r] for r in sigma]})

    # comaximal pair: s in J2 ∩ (1 + K), t = s - 1 in K = (a[0])
    K = Ideal(ring, [a[0]])
    cm = comaximal(J2, K)
    if cm is None:
        raise RuntimeError("K + J2 must be the unit ideal after normalization")
    s = reduce_mod_ring(cm.u, ring)
    t = reduce_mod_ring(s - ring.one(), ring)
    if ideal_member(s, J2) is None or ideal_member(t, K) is None:
        raise RuntimeError("localization pair lost its memberships")
    transcript.append({"step": "localization-pair", "s": ring.str_of(s),
                       "t": ring.str_of(t)})

    # Gamma over A_s with [b]·Gamma = [1, 0], det 1
    mem_s = ideal_member(s, Ideal(ring, b0))
    if mem_s is None:
        raise RuntimeError("s escapes J2")
    s1, s2 = mem_s.cofactors
    Gamma = LocMatrix(ring, [[s1, -b0[1] * s], [s2, b0[0] * s]], s, t, 1, 0)
    if not _row_is(_loc_row(ring, b0, s, t).mul(Gamma), ring, [1, 0]):
        raise RuntimeError("Gamma does not trivialize the b-row")

    # Delta over A_t with [a]·Delta = [1, 0]; a[0] is a unit there
    mem_t = ideal_member(-t, K)
    if mem_t is None:
        raise RuntimeError("t escapes K")
    kappa = mem_t.cofactors[0]          # -t = kappa · a[0]
    inv_num = -kappa                    # a[0]^{-1} = -kappa / t
    facs = _unit_row_to_10_factors(ring, a[0], a[1], inv_num, 1, t, s)
    # build Delta(T) over the pair (s, t): values have t-denominators
    delta_facs = [(i, j, num, 0, pe) for (i, j, num, pe, _qe) in facs]
    DeltaT = elementary_isotopy(ring, 2, delta_facs, s, t)
    Delta = DeltaT.at(1)
    if not _row_is(_loc_row(ring, a, s, t).mul(Delta), ring, [1, 0]):
        raise RuntimeError("Delta does not trivialize the a-row")

    # Phi = Gamma · Delta · Gamma^{-1}, isotopic to identity
    GammaT = _lift_locmatrix_T(Gamma)
    iso = GammaT.mul(DeltaT).mul(GammaT.inverse())
    Phi = iso.at(1)
    rowa = _loc_row(ring, a, s, t)
    if not rowa.mul(Gamma.inverse()).mul(Phi).cross_equal(_loc_row(ring, b0, s, t)):
        raise RuntimeError("[a]·Gamma^{-1}·Phi does not reach the b-row")

    sp = isotopy_split(Phi, iso, s, t)
    Phi1, Phi2 = sp.theta1, sp.theta2    # Phi1 over A_s ≡ Id mod t, Phi2 over A_t ≡ Id mod s
    transcript.append({"step": "isotopy-split", "k": sp.split.k})

    aprime = rowa.mul(Gamma.inverse()).mul(Phi1)
    bprime = _loc_row(ring, b0, s, t).mul(Phi2.inverse())
    if not aprime.cross_equal(bprime):
        raise RuntimeError("local generator rows do not agree on the overlap")
    g = _patch_rows(ring, aprime, bprime, s, t)
    if equal_ideals(Ideal(ring, g), J3) is None:
        raise RuntimeError("patched row does not generate J1 ∩ J2")
    g = _shrink_row(ring, g, J3)
    transcript.append({"step": "patch", "g": [ring.str_of(p) for p in g]})

    c = _correct_residues(ring, g, J3, [(J1, a0), (J2, b0)], transcript)
    c = _shrink_row(ring, c, J3)

    gen_cert = equal_ideals(Ideal(ring, c), J3)
    if gen_cert is None:
        raise RuntimeError("corrected row does not generate J1 ∩ J2")
    cong1 = make_congruence(a0, c, ideal_square(J1))
    cong2 = make_congruence(b0, c, ideal_square(J2))
    out = GeneratorTuple(J3, tuple(c)).certify()
    return PrincipleResult(out, [cong1, cong2], gen_cert, transcript)


def _row_is(row: LocMatrix, ring, consts) -> bool:
    target = LocMatrix(ring, [[ring.const(v) for v in consts]], row.p, row.q, 0, 0)
    return row.cross_equal(target)


def _lift_locmatrix_T(M: LocMatrix) -> IsotopyMatrix:
    base = M.ring
    n = base.nvars
    rows = [[e.extend_vars(n, n + 1) for e in row] for row in M.num]
    ringT = base.extended(("_T",))
    return IsotopyMatrix(base, ringT, LocMatrix(
        ringT, rows, M.p.extend_vars(n, n + 1), M.q.extend_vars(n, n + 1),
        M.pe, M.qe))


# ---------------------------------------------------------------------------
# subtraction principle


def subtraction_principle(Jg: Ideal, J1g: GeneratorTuple, J2g: GeneratorTuple,
                          cong: CongruenceCertificate,
                          bound: int = 6) -> PrincipleResult:
    """Certified generators of J congruent mod J^2 to the given generators
    of J ∩ J1, assuming those agree with the J1 generators mod J1^2."""
    ring = Jg.ring
    _require_dim2_domain(ring)
    if len(J1g.elements) != 2 or len(J2g.elements) != 2:
        raise NotSupported("only pairs of 2-generated ideals are supported")
    a0 = [reduce_mod_ring(p, ring) for p in J2g.elements]   # generators of J ∩ J1
    b0 = [reduce_mod_ring(p, ring) for p in J1g.elements]   # generators of J1
    J = Jg
    J1 = Ideal(ring, b0)
    transcript = []

    if is_unit_ideal(J1):
        gen_cert = equal_ideals(Ideal(ring, a0), J)
        if gen_cert is None:
            raise PreconditionError("degenerate case: J2 does not generate J")
        out = GeneratorTuple(J, tuple(a0)).certify()
        congJ = make_congruence(a0, a0, ideal_square(J))
        return PrincipleResult(out, [congJ], gen_cert,
                               [{"step": "degenerate-J1-unit"}])

    if comaximal(J, J1) is None:
        raise PreconditionError("J and J1 are not comaximal")
    if height(J) != 2 or height(J1) != 2:
        raise PreconditionError("J and J1 must have height 2")
    if equal_ideals(Ideal(ring, a0), ideal_intersect(J, J1)) is None:
        raise PreconditionError("J2 generators do not generate J ∩ J1")
    if not cong.verify():
        raise PreconditionError("congruence witness fails to verify")
    if (tuple(cong.left) != tuple(J2g.elements)
            or tuple(cong.right) != tuple(J1g.elements)):
        raise PreconditionError("congruence witness does not bind the inputs")
    if equal_ideals(cong.square_ideal, ideal_square(J1)) is None:
        raise PreconditionError("congruence witness uses the wrong square ideal")

    # normalize the b-row over A/J and carry the a-row along
    sigma, b, _ = _normalize_first_one(J, b0)
    a = [reduce_mod_ring(p, ring) for p in _row_apply(a0, sigma)]
    transcript.append({"step": "normalize-mod-J",
                       "sigma": [[ring.str_of(e) for e in r] for r in sigma]})

    # b_loc = s ∈ J ∩ (1 + K), a_loc = s - 1 ∈ K = (b[0])
    K = Ideal(ring, [b[0]])
    cm = comaximal(J, K)
    if cm is None:
        raise RuntimeError("K + J must be the unit ideal after normalization")
    b_loc = reduce_mod_ring(cm.u, ring)
    a_loc = reduce_mod_ring(b_loc - ring.one(), ring)
    if ideal_member(b_loc, J) is None or ideal_member(a_loc, K) is None:
        raise RuntimeError("localization pair lost its memberships")
    transcript.append({"step": "localization-pair", "b": ring.str_of(b_loc),
                       "a": ring.str_of(a_loc)})

    # tau over A_{b_loc} with [a]·tau = [b], det 1 (SL2 transition localized)
    tau = _sl2_localized(ring, b_loc, a_loc, a, b, transcript)

    # Delta over A_{a_loc b_loc}: [b]·Delta = [1, 0]; b[0] inverts over A_{a_loc}
    mem = ideal_member(-a_loc, K)
    if mem is None:
        raise RuntimeError("a_loc escapes K")
    kappa = mem.cofactors[0]            # -a_loc = kappa · b[0]
    inv_num = -kappa                    # b[0]^{-1} = -kappa / a_loc
    facs = _unit_row_to_10_factors(ring, b[0], b[1], inv_num, 1, a_loc, b_loc)
    DeltaT = elementary_isotopy(ring, 2, facs, a_loc, b_loc)
    Delta = DeltaT.at(1)
    if not _row_is(_loc_row(ring, b, a_loc, b_loc).mul(Delta), ring, [1, 0]):
        raise RuntimeError("Delta does not trivialize the b-row")

    # conjugate: Dtilde = tau · Delta · tau^{-1}
    tauT = _lift_locmatrix_T(tau)
    iso = tauT.mul(DeltaT).mul(tauT.inverse())
    Dtilde = iso.at(1)
    sp = isotopy_split(Dtilde, iso, a_loc, b_loc)
    D1, D2 = sp.theta1, sp.theta2   # D1 over A_{a_loc} ≡ Id mod b_loc; D2 over A_{b_loc} ≡ Id mod a_loc
    transcript.append({"step": "isotopy-split", "k": sp.split.k})

    rowa = _loc_row(ring, a, a_loc, b_loc)
    cprime = rowa.mul(D1)
    beta = LocMatrix(ring, [[ring.one(), ring.zero()]], a_loc, b_loc, 0, 0)
    dprime = beta.mul(tau.inverse()).mul(D2.inverse())
    if not cprime.cross_equal(dprime):
        raise RuntimeError("local generator rows do not agree on the overlap")
    g = _patch_rows(ring, cprime, dprime, a_loc, b_loc)
    transcript.append({"step": "patch", "g": [ring.str_of(p) for p in g]})
    if equal_ideals(Ideal(ring, g), J) is None:
        raise RuntimeError("patched row does not generate J")

    c = _correct_residues(ring, g, J, [(J, a0)], transcript)

    gen_cert = equal_ideals(Ideal(ring, c), J)
    if gen_cert is None:
        raise RuntimeError("corrected row does not generate J")
    congJ = make_congruence(a0, c, ideal_square(J))
    out = GeneratorTuple(J, tuple(c)).certify()
    return PrincipleResult(out, [congJ], gen_cert, transcript)


def _sl2_localized(ring, b_loc, a_loc, a, b, transcript):
    """SL2 transition [a]·tau = [b] computed in the presentation
    Q[vars, w]/(w·b_loc - 1) of the localization at b_loc, returned as a
    LocMatrix over the pair (a_loc, b_loc)."""
    n = ring.nvars
    wvar = Poly.variable(n, n + 1)
    rel = wvar * b_loc.extend_vars(n, n + 1) - Poly.const(1, n + 1)
    E = ring.extended(("_w",), (rel,))
    lift = lambda p: p.extend_vars(n, n + 1)
    aE = [lift(p) for p in a]
    bE = [lift(p) for p in b]
    JE = Ideal(E, aE)
    abE = GeneratorTuple(JE, tuple(aE))
    cdE = GeneratorTuple(JE, tuple(bE))
    res = sl2_transition(JE, abE, cdE)
    # map w -> 1/b_loc: common denominator b_loc^D
    D = max((m[-1] for row in res.matrix for e in row for m in e.terms),
            default=0)
    num = []
    for row in res.matrix:
        out_row = []
        for e in row:
            acc = Poly.zero()
            for m, cc in e.terms.items():
                stem = Poly.term(m[:-1], cc)
                acc = acc + stem * (b_loc ** (D - m[-1]))
            out_row.append(reduce_mod_ring(acc, ring))
        num.append(out_row)
    tau = LocMatrix(ring, num, a_loc, b_loc, 0, D).normalize()
    # verify [a]·tau = [b] over the localization and det = 1
    lhs = _loc_row(ring, a, a_loc, b_loc).mul(tau)
    rhs = _loc_row(ring, b, a_loc, b_loc)
    if not lhs.cross_equal(rhs):
        raise RuntimeError("localized SL2 transition lost the row identity")
    cdet, pi, qi = tau.det_unit()
    if not (cdet == 1 and pi == 0 and qi == 0):
        raise RuntimeError("localized SL2 transition lost determinant one")
    transcript.append({"step": "sl2-transition",
                       "tau_den_exp": D})
    return tau
