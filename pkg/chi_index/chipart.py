"""Group-ring arithmetic over Z/p^n and the chi-part generators T_chi.

Elements of (Z/p^n)[G] are coefficient vectors indexed like the field's
transversal. Subgroup orders come from the Smith normal form of the
integer lift of a generator matrix.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import Poly, factor_list, symbols, totient
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from chi_index.errors import NonRationalTraceError, PreconditionError
from chi_index.fieldspec import decomposition_units, qp_degree
from chi_index.modarith import multiplicative_order, p_adic_valuation, primitive_root, teichmuller

logger = logging.getLogger(__name__)

GROUP_ORDER_CAP = 256

_x = symbols("x")


@dataclass(frozen=True)
class GroupRing:
    """(Z/p^n)[G] for the Galois group G of `field`."""

    field: object
    p: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"level must be >= 1, got {self.n}")

    @property
    def modulus(self):
        return self.p**self.n

    @property
    def size(self):
        return self.field.degree

    @property
    def table(self):
        return self.field.multiplication_table

    def element(self, coefficients):
        coefficients = tuple(int(c) % self.modulus for c in coefficients)
        if len(coefficients) != self.size:
            raise PreconditionError(f"expected {self.size} coefficients, got {len(coefficients)}")
        return GroupRingElt(self, coefficients)

    def zero(self):
        return GroupRingElt(self, (0,) * self.size)

    def one(self):
        return self.basis(0)

    def basis(self, g):
        coefficients = [0] * self.size
        coefficients[g] = 1
        return GroupRingElt(self, tuple(coefficients))

    def norm_element(self, elements):
        """Sum of the group elements listed (indices of G)."""
        coefficients = [0] * self.size
        for g in elements:
            coefficients[g] += 1
        return self.element(coefficients)

    def translate(self, g, x):
        """g . x, the left regular action."""
        result = np.zeros(self.size, dtype=object)
        result[self.table[g]] = x.as_array()
        return self.element(result)

    def left_matrix(self, x):
        """Matrix of y -> x*y on the basis of G; column j is x * g_j."""
        size = self.size
        matrix = np.zeros((size, size), dtype=object)
        columns = np.arange(size)
        for i, xi in enumerate(x.coefficients):
            if xi:
                matrix[self.table[i], columns] += xi
        return matrix % self.modulus


@dataclass(frozen=True)
class GroupRingElt:
    ring: GroupRing
    coefficients: tuple

    def as_array(self):
        return np.array(self.coefficients, dtype=object)

    def __add__(self, other):
        _check_ambient(self, other)
        return self.ring.element(self.as_array() + other.as_array())

    def __sub__(self, other):
        _check_ambient(self, other)
        return self.ring.element(self.as_array() - other.as_array())

    def __neg__(self):
        return self.ring.element(-self.as_array())

    def __mul__(self, other):
        if isinstance(other, GroupRingElt):
            return ring_multiply(self, other)
        return self.ring.element(self.as_array() * int(other))

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.coefficients)


def _check_ambient(x, y):
    if x.ring != y.ring:
        raise PreconditionError(
            f"group ring mismatch: (p={x.ring.p}, n={x.ring.n}, #G={x.ring.size}) "
            f"vs (p={y.ring.p}, n={y.ring.n}, #G={y.ring.size})"
        )


def ring_multiply(x, y):
    """Convolution product in (Z/p^n)[G]."""
    _check_ambient(x, y)
    ring = x.ring
    result = np.zeros(ring.size, dtype=object)
    ys = y.as_array()
    for i, xi in enumerate(x.coefficients):
        if xi:
            result[ring.table[i]] += xi * ys
    return ring.element(result)


@lru_cache(maxsize=256)
def _cyclotomic_poly(m):
    poly = Poly(_x**m - 1, _x, domain=ZZ)
    for e in range(1, m):
        if m % e == 0:
            poly = poly.exquo(_cyclotomic_poly(e))
    return poly


def cyclotomic_polynomial(m):
    """Integer coefficients of Phi_m, highest degree first."""
    if m < 1:
        raise PreconditionError(f"cyclotomic index must be >= 1, got {m}")
    return tuple(int(c) for c in _cyclotomic_poly(m).all_coeffs())


def trace_root_of_unity(m, k, p):
    """Tr_{Q_p(zeta_m)/Q_p}(zeta_m^k) when that trace is a rational integer."""
    if m < 1:
        raise PreconditionError(f"root of unity order must be >= 1, got {m}")
    dense = [0] * m
    for t in decomposition_units(m, p):
        dense[k * t % m] += 1
    remainder = Poly(dense[::-1], _x, domain=ZZ).rem(_cyclotomic_poly(m))
    if remainder.degree() > 0:
        raise NonRationalTraceError(
            f"trace of zeta_{m}^{k} over Q_{p} reduces to {remainder.as_expr()}, not a constant"
        )
    return int(remainder.LC())


@dataclass(frozen=True)
class RootOfUnityEmbedding:
    """zeta_m (p not dividing m) inside the Galois ring (Z/p^n)[x]/(P).

    P is a monic lift of one irreducible factor of Phi_m mod p, and zeta is
    the Teichmuller lift of the class of x. When m | p-1 the factor is
    x - c with c = g^((p-1)/m) for the smallest primitive root g mod p, so
    zeta is a plain residue matching teichmuller(c).
    """

    m: int
    p: int
    n: int
    modulus_poly: Poly
    zeta: Poly

    @property
    def residue_degree(self):
        return self.modulus_poly.degree()

    def reduce(self, a):
        return a.rem(self.modulus_poly).trunc(self.p**self.n)

    def multiply(self, a, b):
        return self.reduce(a * b)

    def power(self, k):
        result = Poly(1, _x, domain=ZZ)
        base = self.zeta
        e = k % self.m
        while e:
            if e & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            e >>= 1
        return result

    def trace(self, k):
        """Tr_{W(F_q)/Z_p}(zeta^k) mod p^n as an integer in [0, p^n)."""
        total = Poly(0, _x, domain=ZZ)
        for j in range(self.residue_degree):
            total = self.reduce(total + self.power(k * self.p**j))
        if total.degree() > 0:
            raise NonRationalTraceError(f"Frobenius orbit sum of zeta_{self.m}^{k} is not constant")
        return int(total.LC()) % self.p**self.n


@lru_cache(maxsize=256)
def root_of_unity_embedding(m, p, n):
    if m % p == 0:
        raise PreconditionError(f"p = {p} divides the root-of-unity order {m}")
    pn = p**n
    if (p - 1) % m == 0:
        c = pow(primitive_root(p), (p - 1) // m, p)
        lift = teichmuller(c, p, n)
        return RootOfUnityEmbedding(m, p, n, Poly(_x - lift, _x, domain=ZZ), Poly(lift, _x, domain=ZZ))

    _, factors = factor_list(_cyclotomic_poly(m).as_expr(), _x, modulus=p)
    candidates = sorted(
        tuple(int(c) % p for c in Poly(factor, _x).all_coeffs()) for factor, _ in factors
    )
    modulus_poly = Poly(list(candidates[0]), _x, domain=ZZ)
    q = p ** modulus_poly.degree()
    embedding = RootOfUnityEmbedding(m, p, n, modulus_poly, Poly(_x, _x, domain=ZZ))
    teich = embedding.reduce(Poly(1, _x, domain=ZZ))
    # x^(q^(n-1)) is the Teichmuller lift of x in a Galois ring of characteristic p^n
    base, e = embedding.zeta, q ** (n - 1)
    while e:
        if e & 1:
            teich = embedding.multiply(teich, base)
        base = embedding.multiply(base, base)
        e >>= 1
    logger.debug("zeta_%d over Z/%d realized mod %s", m, pn, modulus_poly.as_expr())
    return RootOfUnityEmbedding(m, p, n, modulus_poly, teich)


def unramified_trace(m, k, p, n):
    """Tr_{Q_p(zeta_m)/Q_p}(zeta_m^k) mod p^n for p not dividing m."""
    if multiplicative_order(p, m) == int(totient(m)):
        return trace_root_of_unity(m, k, p) % p**n
    return root_of_unity_embedding(m, p, n).trace(k)


def padic_trace(m, k, p, n):
    """Tr_{Q_p(zeta_m)/Q_p}(zeta_m^k) mod p^n, rational or not.

    zeta_m splits as a p-power root (totally ramified, rational trace) times
    a prime-to-p root (unramified, traced in the Galois ring).
    """
    s = p_adic_valuation(m, p)
    ps = p**s
    m1 = m // ps
    a = pow(m1, -1, ps) if ps > 1 else 0
    b = pow(ps, -1, m1) if m1 > 1 else 0
    ramified = trace_root_of_unity(ps, k * a % ps, p)
    return ramified * unramified_trace(m1, k * b % m1, p, n) % p**n


def _value_order(v, o):
    """Order of zeta_o^v."""
    return o // gcd(v, o)


def build_T_chi(ring, chi, h=None):
    """The generator T_chi of the chi-part of (Z/p^n)[G].

    T_chi = S_chi * E_chi1 when p does not divide o(chi), and
    S_chi * (1 - h) * E_chi1 otherwise, with E_chi1 the prime-to-p idempotent
    over Delta. The default h is the first element on which chi takes a
    value of exact order p, so the result is constant on a Q_p-class.
    """
    field, p, pn = ring.field, ring.p, ring.modulus
    values = field.character_values(chi)
    o = chi.order
    s, m1 = chi.split(p)
    ps = p**s

    kernel = ring.norm_element(g for g, v in enumerate(values) if v == 0)

    lifts = {}
    for g, v in enumerate(values):
        if v % ps == 0:
            lifts.setdefault(v, g)
    inverse_m1 = pow(m1, -1, pn)
    idempotent = [0] * ring.size
    for v, g in lifts.items():
        idempotent[field.inverses[g]] += inverse_m1 * unramified_trace(m1, v // ps, p, ring.n)
    generator = kernel * ring.element(idempotent)

    if s:
        if h is None:
            h = next(g for g, v in enumerate(values) if _value_order(v, o) == p)
        elif _value_order(values[h], o) != p:
            raise PreconditionError(f"chi(h) must have exact order {p}")
        generator = generator * (ring.one() - ring.basis(h))
    return generator


@dataclass(frozen=True)
class SpanOrderResult:
    """Order p^valuation of a submodule, with the capped elementary-divisor valuations."""

    valuation: int
    elementary_valuations: tuple


def lattice_order(matrix, p, n):
    """Order of the column span of `matrix` inside (Z/p^n)^rows.

    Entries are lifted to [0, p^n); every invariant factor d of the lift
    contributes n - min(n, v_p(d)), and zero factors contribute nothing.
    """
    pn = p**n
    rows = [[int(v) % pn for v in row] for row in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    if nrows == 0 or ncols == 0:
        return SpanOrderResult(0, ())
    dm = DomainMatrix([[ZZ(v) for v in row] for row in rows], (nrows, ncols), ZZ)
    capped = tuple(p_adic_valuation(int(d), p, cap=n) for d in invariant_factors(dm))
    return SpanOrderResult(sum(n - v for v in capped), capped)


def span_order(generators, cap=GROUP_ORDER_CAP):
    """Order of the Z/p^n-span of the generators inside (Z/p^n)[G]."""
    generators = list(generators)
    if not generators:
        return SpanOrderResult(0, ())
    ring = generators[0].ring
    for x in generators[1:]:
        _check_ambient(generators[0], x)
    if ring.size > cap:
        raise PreconditionError(f"#G = {ring.size} exceeds the group-order cap {cap}")
    columns = np.array([x.coefficients for x in generators], dtype=object).T
    return lattice_order(columns, ring.p, ring.n)


def chi_span_order(ring, chi, c, generator=None):
    """Order of the Z_p[G]-span of T_chi * c."""
    if c.ring != ring:
        raise PreconditionError("c does not live in the given group ring")
    t = build_T_chi(ring, chi) if generator is None else generator
    tc = t * c
    return span_order(ring.translate(g, tc) for g in range(ring.size))


def ima(chi, p, n):
    """Valuation n * d_chi of #Z_p[chi]/p^n."""
    return n * qp_degree(chi, p)


def _kernel_generators(field, values):
    kernel = [g for g, v in enumerate(values) if v == 0]
    chosen, span = [], {0}
    for k in kernel:
        if k in span:
            continue
        chosen.append(k)
        frontier = list(span)
        while frontier:
            x = frontier.pop()
            for y in chosen:
                z = field.multiply(x, y)
                if z not in span:
                    span.add(z)
                    frontier.append(z)
    return chosen


def chi_part_order_oracle(ring, chi):
    """Valuation of #(Z/p^n)[G]^chi computed as the kernel of a stacked linear system.

    Conditions: (k - 1)x = 0 for generators k of Ker chi, E x = x for the
    prime-to-p idempotent, and N_C x = 0 for the norm of an order-p element
    of G / Ker chi when p | o(chi). The idempotent uses the last lift of
    each Delta-coset and the last order-p element, where build_T_chi takes the
    first ones. Unramified traces still go through root_of_unity_embedding,
    so both sides share the choice of prime above p.
    """
    field, p, n, pn = ring.field, ring.p, ring.n, ring.modulus
    size = ring.size
    values = field.character_values(chi)
    o = chi.order
    s, m1 = chi.split(p)
    ps = p**s
    identity = np.identity(size, dtype=object)

    blocks = []
    for k in _kernel_generators(field, values):
        blocks.append((ring.left_matrix(ring.basis(k)) - identity) % pn)

    lifts = {}
    for g, v in enumerate(values):
        if v % ps == 0:
            lifts[v] = g
    inverse_m1 = pow(m1, -1, pn)
    coefficients = [0] * size
    for v, g in lifts.items():
        coefficients[field.inverses[g]] += inverse_m1 * padic_trace(m1, v // ps, p, n)
    blocks.append((ring.left_matrix(ring.element(coefficients)) - identity) % pn)

    if s:
        order_p = [g for g, v in enumerate(values) if _value_order(v, o) == p]
        h = order_p[-1]
        powers, x = [], 0
        for _ in range(p):
            powers.append(x)
            x = field.multiply(x, h)
        blocks.append(ring.left_matrix(ring.norm_element(powers)))

    image = lattice_order(np.vstack(blocks), p, n)
    return n * size - image.valuation


def exhaustive_span_order(generators):
    """Brute-force order of the Z/p^n-span by closing under addition."""
    generators = list(generators)
    if not generators:
        return 0
    ring = generators[0].ring
    pn = ring.modulus
    span = {(0,) * ring.size}
    for x in generators:
        step = x.as_array()
        grown = set()
        for v in span:
            w = np.array(v, dtype=object)
            for _ in range(pn):
                grown.add(tuple(int(c) for c in w))
                w = (w + step) % pn
        span = grown
    return p_adic_valuation(len(span), ring.p)
