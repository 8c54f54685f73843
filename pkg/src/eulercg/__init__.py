"""Exact ideal arithmetic and Euler class group calculator over Q."""

from .ring import (GREVLEX, LEX, LocFraction, MonomialOrder, Poly, Rational,
                   RingDescriptor, RingError, compare_monomials,
                   elimination_order, loc_reduce, parse_poly, poly_eval,
                   poly_str)
from .groebner import (ComaximalityCertificate, GroebnerData, Ideal,
                       IdealEqualityCertificate, MembershipCertificate,
                       PreconditionError, SearchBoundExceeded, buchberger,
                       comaximal, equal_ideals, height, ideal_intersect,
                       ideal_member, ideal_product, ideal_square, ideal_sum,
                       krull_dimension, normal_form, radical_member)

__all__ = [
    "GREVLEX", "LEX", "LocFraction", "MonomialOrder", "Poly", "Rational",
    "RingDescriptor", "RingError", "compare_monomials", "elimination_order",
    "loc_reduce", "parse_poly", "poly_eval", "poly_str",
    "ComaximalityCertificate", "GroebnerData", "Ideal",
    "IdealEqualityCertificate", "MembershipCertificate", "PreconditionError",
    "SearchBoundExceeded", "buchberger", "comaximal", "equal_ideals",
    "height", "ideal_intersect", "ideal_member", "ideal_product",
    "ideal_square", "ideal_sum", "krull_dimension", "normal_form",
    "radical_member",
]
