"""Residual images of the cyclotomic elements c_b(r) at a prime ell = 1 mod d p^n.

A prime lambda above ell is fixed implicitly by sending zeta_{d p^n} to
eta^((ell-1)/(d p^n)). The image of c_b(r) in the sum over the conjugates
lambda^g of F_lambda^x[p^n](r-1) is written in discrete-log coordinates,
the coordinate at lambda^g becoming the coefficient of g in (Z/p^n)[G].
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from math import gcd

from chi_index.chipart import GroupRing, build_T_chi, chi_span_order
from chi_index.errors import PreconditionError, ZeroCyclotomicFactorError
from chi_index.fieldspec import galois_representatives
from chi_index.modarith import (
    dlog_prime_power,
    is_prime,
    is_primitive_root,
    p_adic_valuation,
    primitive_root,
    teichmuller,
)

logger = logging.getLogger(__name__)

__all__ = [
    "ResidualContext",
    "check_norm_relation",
    "kurihara_index",
    "residual_index",
    "residual_vector",
    "residual_vector_direct",
    "teichmuller",
]


@dataclass(frozen=True)
class ResidualContext:
    field: object
    ell: int
    n: int
    r: int
    eta: int

    @classmethod
    def build(cls, field, ell, n, r, eta=None):
        """Validated context; eta defaults to the smallest primitive root mod ell."""
        p = field.p
        if r < 3 or r % 2 == 0:
            raise PreconditionError(f"r must be odd and >= 3, got {r}")
        if n < max(field.a, 1):
            raise PreconditionError(f"level n = {n} is below max(a, 1) = {max(field.a, 1)}")
        if ell == p or not is_prime(ell):
            raise PreconditionError(f"ell = {ell} must be a prime different from p")
        if (ell - 1) % (field.d * p**n):
            raise PreconditionError(f"ell = {ell} is not 1 mod d p^n = {field.d * p**n}")
        if eta is None:
            eta = primitive_root(ell)
        elif not is_primitive_root(eta, ell):
            raise PreconditionError(f"{eta} is not a primitive root mod {ell}")
        return cls(field, ell, n, r, eta)

    @property
    def p(self):
        return self.field.p

    @property
    def modulus(self):
        return self.p**self.n

    @property
    def g_p(self):
        """eta^((ell-1)/p^n), of exact order p^n."""
        return pow(self.eta, (self.ell - 1) // self.modulus, self.ell)

    @cached_property
    def ring(self):
        return GroupRing(self.field, self.p, self.n)

    def log_factor(self, t, b):
        """dlog of (1 - zeta^t)^((ell-1)/p^n) for zeta = eta^((ell-1)/(b p^n)) and t prime to b p^n."""
        m = b * self.modulus
        zeta = pow(self.eta, (self.ell - 1) // m, self.ell)
        factor = (1 - pow(zeta, t % m, self.ell)) % self.ell
        if factor == 0:
            raise ZeroCyclotomicFactorError(f"1 - zeta^{t} vanishes mod {self.ell}")
        w = pow(factor, (self.ell - 1) // self.modulus, self.ell)
        return dlog_prime_power(self.ell, self.g_p, w, self.p, self.n)


def _check_divisor(field, b):
    if b < 1 or field.d % b:
        raise PreconditionError(f"{b} does not divide d = {field.d}")


def residual_vector(ctx, b, representatives=None, galois_set=None):
    """Residual image of c_b(r) as an element of (Z/p^n)[G].

    coord_g = sum over i in J_{b,n} of (a_g i)^(r-1) * dlog((1 - zeta^(a_g i))^((ell-1)/p^n))
    with a_g an integer in the class of g^-1. The twist by a_g^(r-1) makes
    coord_g depend on the class of g only, which is what the invariance
    suites verify. `representatives` (one a_g per element of G) and
    `galois_set` (a replacement for J_{b,n}) override the defaults.
    """
    field, p, pn = ctx.field, ctx.p, ctx.modulus
    _check_divisor(field, b)
    m = b * pn
    galois_set = galois_representatives(field, b, ctx.n) if galois_set is None else list(galois_set)
    for i in galois_set:
        if gcd(i, m) != 1:
            raise PreconditionError(f"{i} is not a unit mod {m}")

    if representatives is None:
        representatives = [field.representative_of_inverse(g) for g in range(field.degree)]
    elif len(representatives) != field.degree:
        raise PreconditionError(f"need {field.degree} representatives, got {len(representatives)}")
    for g, a in enumerate(representatives):
        if gcd(a, field.d * p) != 1 or field.element_of(a) != field.inverses[g]:
            raise PreconditionError(f"{a} does not represent the inverse of element {g}")

    logs = {}
    coordinates = []
    for a in representatives:
        total = 0
        for i in galois_set:
            t = a * i
            key = t % m
            if key not in logs:
                logs[key] = ctx.log_factor(t, b)
            total += pow(t, ctx.r - 1, pn) * logs[key]
        coordinates.append(total % pn)
    logger.debug("c_%d at ell=%d n=%d: %s", b, ctx.ell, ctx.n, coordinates)
    return ctx.ring.element(coordinates)


def residual_vector_direct(ctx, b):
    """Straight-line recomputation of residual_vector over all of (Z/b p^n)^x.

    For every g, sums over the t whose class restricts to g^-1 on
    Q(zeta_{b p^a}) cap F, with no representative sets and no log cache.
    """
    field, p, pn = ctx.field, ctx.p, ctx.modulus
    _check_divisor(field, b)
    m = b * pn
    image = field.image_of_subgroup(b)
    mod_a = b * p**field.a
    coordinates = []
    for g in range(field.degree):
        a = field.transversal[field.inverses[g]]
        total = 0
        for t in range(1, m):
            if gcd(t, m) != 1:
                continue
            if b == field.d:
                if field.element_of(t) != field.inverses[g]:
                    continue
            elif (t * pow(a, -1, mod_a)) % mod_a not in image:
                continue
            total += pow(t, ctx.r - 1, pn) * ctx.log_factor(t, b)
        coordinates.append(total % pn)
    return ctx.ring.element(coordinates)


def residual_index(ctx, chi, c, generator=None, numerator=None):
    """Valuation of ire: chi_span_order(1) - chi_span_order(c)."""
    ring = ctx.ring
    if generator is None:
        generator = build_T_chi(ring, chi)
    if numerator is None:
        numerator = chi_span_order(ring, chi, ring.one(), generator).valuation
    return numerator - chi_span_order(ring, chi, c, generator).valuation


def _coset_transversal(field, larger, smaller):
    """Representatives of larger / smaller, both given as index sets of subgroups of G."""
    covered, chosen = set(), []
    for g in larger:
        if g in covered:
            continue
        chosen.append(g)
        covered.update(field.multiply(g, k) for k in smaller)
    return chosen


def check_norm_relation(ctx, q, b):
    """Whether N c_{qb} = (1 - q^(r-1) Fr_q^-1) c_b (q not dividing b), or N c_{qb} = c_b (q | b)."""
    field = ctx.field
    if q == ctx.p:
        raise PreconditionError("q must differ from p")
    if not is_prime(q):
        raise PreconditionError(f"q = {q} is not prime")
    _check_divisor(field, b)
    if field.d % (q * b):
        raise PreconditionError(f"q b = {q * b} does not divide d = {field.d}")

    ring = ctx.ring
    upper = residual_vector(ctx, q * b)
    lower = residual_vector(ctx, b)
    transversal = _coset_transversal(field, field.fixing_subgroup(b), field.fixing_subgroup(q * b))
    lhs = ring.norm_element(transversal) * upper

    if b % q == 0:
        rhs = lower
    else:
        frobenius_inverse = field.inverses[field.frobenius(q)]
        euler = pow(q, ctx.r - 1, ctx.modulus)
        rhs = lower - euler * ring.translate(frobenius_inverse, lower)
    holds = lhs == rhs
    logger.debug("norm relation q=%d b=%d at ell=%d n=%d: %s", q, b, ctx.ell, ctx.n, holds)
    return holds


def kurihara_index(ctx, chi, c):
    """ire valuation as min(n, v_p(s)) with s = sum_g omega(chi(g)) c_g.

    Needs o(chi) | p - 1: the chi-part is then free of rank one over
    Z/p^n and T_chi c = s T_chi. The root of unity is realized as the
    Teichmuller lift of g^((p-1)/o) for the smallest primitive root g mod p,
    the same embedding build_T_chi uses.
    """
    p, n, pn = ctx.p, ctx.n, ctx.modulus
    o = chi.order
    if (p - 1) % o:
        raise PreconditionError(f"o(chi) = {o} does not divide p - 1 = {p - 1}")
    zeta = teichmuller(pow(primitive_root(p), (p - 1) // o, p), p, n)
    values = ctx.field.character_values(chi)
    s = sum(pow(zeta, v, pn) * x for v, x in zip(values, c.coefficients)) % pn
    return p_adic_valuation(s, p, cap=n)
