"""Exact Bernoulli numbers and generalized Bernoulli numbers B_{k,psi}.

Used to locate configurations where the chi-index is expected to be
nontrivial. B_1 is -1/2 here; the trivial character of conductor 1 gives
B_{1,1} = B_1(1) = +1/2, and both values appear below under their own names.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, gcd, lcm
from threading import Lock

from sympy import Poly, Rational, resultant, symbols
from sympy.polys.domains import QQ, ZZ

from chi_index.chipart import cyclotomic_polynomial, root_of_unity_embedding
from chi_index.errors import PreconditionError
from chi_index.fieldspec import enumerate_characters, unit_group_structure, units
from chi_index.modarith import is_prime, p_adic_valuation, primitive_root

logger = logging.getLogger(__name__)

_x, _y = symbols("x y")

_bernoulli_table = [Fraction(1)]
_bernoulli_lock = Lock()


def bernoulli(k):
    """B_k with B_1 = -1/2, from sum_{j<=m} C(m+1, j) B_j = 0."""
    if k < 0:
        raise PreconditionError(f"Bernoulli index must be >= 0, got {k}")
    if k < len(_bernoulli_table):
        return _bernoulli_table[k]
    with _bernoulli_lock:
        while len(_bernoulli_table) <= k:
            m = len(_bernoulli_table)
            total = sum(comb(m + 1, j) * _bernoulli_table[j] for j in range(m))
            _bernoulli_table.append(-total / (m + 1))
    return _bernoulli_table[k]


def bernoulli_polynomial(k, x):
    """B_k(x) = sum_j C(k, j) B_j x^(k-j), evaluated at the rational x."""
    x = Fraction(x)
    return sum(comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1))


def is_regular(p):
    if p == 2 or not is_prime(p):
        raise PreconditionError("p must be an odd prime")
    return all(bernoulli(k).numerator % p for k in range(2, p - 2, 2))


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod `modulus` with values zeta_order^e.

    `exponents[t]` is e for t a unit mod `modulus` and None otherwise.
    The order is always exact.
    """

    modulus: int
    order: int
    exponents: tuple

    @classmethod
    def normalized(cls, modulus, order, exponents):
        g = gcd(order, *(e for e in exponents if e is not None))
        return cls(modulus, order // g, tuple(None if e is None else (e // g) % (order // g) for e in exponents))

    @classmethod
    def from_field_character(cls, field, chi):
        """chi on G = (Z/f)^x / H pulled back to a character mod f."""
        f = field.conductor
        exponents = [None] * f
        for t in units(f):
            exponents[t] = chi.value_exponent(field.coordinates[field.element_of(t)])
        return cls.normalized(f, chi.order, exponents)

    def value_exponent(self, a):
        return self.exponents[a % self.modulus]

    @property
    def is_even(self):
        return self.value_exponent(-1) == 0

    @property
    def conductor(self):
        unit_residues = units(self.modulus)
        for m in range(1, self.modulus + 1):
            if self.modulus % m:
                continue
            if all(self.exponents[t] == 0 for t in unit_residues if t % m == 1 % m):
                return m
        return self.modulus

    @property
    def is_primitive(self):
        return self.conductor == self.modulus

    def primitive(self):
        """The primitive character inducing this one."""
        m = self.conductor
        exponents = [None] * m
        for t in units(m):
            lift = t
            while gcd(lift, self.modulus) != 1:
                lift += m
            exponents[t] = self.exponents[lift % self.modulus]
        return DirichletCharacter.normalized(m, self.order, exponents)

    def __mul__(self, other):
        modulus = lcm(self.modulus, other.modulus)
        order = lcm(self.order, other.order)
        exponents = [None] * modulus
        for t in units(modulus):
            exponents[t] = (
                self.value_exponent(t) * (order // self.order)
                + other.value_exponent(t) * (order // other.order)
            ) % order
        return DirichletCharacter.normalized(modulus, order, exponents)

    def power(self, k):
        return DirichletCharacter.normalized(
            self.modulus, self.order, [None if e is None else e * k % self.order for e in self.exponents]
        )


def teichmuller_character(p):
    """omega mod p with omega(g) = zeta_{p-1} for the smallest primitive root g."""
    g = primitive_root(p)
    exponents = [None] * p
    x = 1
    for j in range(p - 1):
        exponents[x] = j
        x = x * g % p
    return DirichletCharacter(p, p - 1, tuple(exponents))


def characters_mod(f):
    """All Dirichlet characters mod f (f not 2 mod 4), in exponent-vector order."""
    structure = unit_group_structure(f)
    coordinates = {}
    for vector in product(*(range(o) for o in structure.orders)):
        t = 1 % f
        for g, e in zip(structure.generators, vector):
            t = t * pow(g, e, f) % f
        coordinates[t] = vector
    result = []
    for chi in enumerate_characters(structure):
        exponents = [None] * f
        for t, vector in coordinates.items():
            exponents[t] = chi.value_exponent(vector)
        result.append(DirichletCharacter.normalized(f, chi.order, exponents))
    return result


def even_primitive_characters(f):
    return [chi for chi in characters_mod(f) if chi.is_even and chi.is_primitive]


@dataclass(frozen=True)
class CyclotomicRational:
    """An element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1)."""

    m: int
    coefficients: tuple

    @classmethod
    def reduce(cls, m, dense):
        """Reduce sum_e dense[e] zeta_m^e modulo Phi_m."""
        poly = Poly([Rational(c.numerator, c.denominator) for c in reversed(dense)], _x, domain=QQ)
        phi = Poly(list(cyclotomic_polynomial(m)), _x, domain=QQ)
        remainder = poly.rem(phi)
        degree = phi.degree()
        coeffs = [Fraction(0)] * degree
        for (e,), c in remainder.terms():
            c = Rational(c)
            coeffs[e] = Fraction(int(c.p), int(c.q))
        return cls(m, tuple(coeffs))

    def is_zero(self):
        return not any(self.coefficients)

    def as_rational(self):
        if any(self.coefficients[1:]):
            raise PreconditionError("element is not rational")
        return self.coefficients[0]

    def norm(self):
        """N_{Q(zeta_m)/Q}, as the resultant of Phi_m and the representing polynomial."""
        if len(self.coefficients) == 1:
            return self.coefficients[0]
        poly = sum(Rational(c.numerator, c.denominator) * _x**e for e, c in enumerate(self.coefficients))
        phi = Poly(list(cyclotomic_polynomial(self.m)), _x).as_expr()
        value = Rational(resultant(phi, poly, _x))
        return Fraction(int(value.p), int(value.q))

    def local_valuation(self, p):
        """v_P for the prime P above p singled out by the Teichmuller character, with v_P(p) = 1.

        zeta_m = zeta_{m'} zeta_{p^s} with p not dividing m'. zeta_{m'} lands in
        the Galois ring of root_of_unity_embedding, conjugated so that its
        (p-1)-part is the Teichmuller lift used by teichmuller_character(p).
        zeta_{p^s} = 1 - pi with pi a uniformizer of ramification index
        e = phi(p^s), so the result lies in (1/e)Z.
        """
        if self.is_zero():
            raise PreconditionError("v_p(0) is infinite")
        denominator = lcm(*(c.denominator for c in self.coefficients))
        integral = [int(c * denominator) for c in self.coefficients]
        s = p_adic_valuation(self.m, p)
        e = p**s - p ** (s - 1) if s else 1
        precision = 4
        while True:
            v = _integral_valuation(self.m, integral, p, precision)
            if v is not None:
                return Fraction(v, e) - p_adic_valuation(denominator, p)
            precision *= 2


def _teichmuller_twist(m1, p):
    """t in (Z/m1)^x such that zeta -> zeta^t matches the Teichmuller lift on the (p-1)-part."""
    d = gcd(m1, p - 1)
    if d == 1:
        return 1
    residue = int(root_of_unity_embedding(m1, p, 1).power(m1 // d).LC()) % p
    base = pow(primitive_root(p), (p - 1) // d, p)
    u = next(u for u in range(1, d + 1) if gcd(u, d) == 1 and pow(base, u, p) == residue)
    target = pow(u, -1, d)
    return next(t for t in range(1, m1 + 1) if gcd(t, m1) == 1 and t % d == target)


def _integral_valuation(m, integral, p, precision):
    """v_pi of sum_e integral[e] zeta_m^e, or None when it vanishes mod p^precision."""
    s = p_adic_valuation(m, p)
    ps = p**s
    m1 = m // ps
    e = ps - ps // p if s else 1
    pk = p**precision
    embedding = root_of_unity_embedding(m1, p, precision)
    twist = _teichmuller_twist(m1, p)
    alpha = pow(ps, -1, m1) if m1 > 1 else 0
    beta = pow(m1, -1, ps) if ps > 1 else 0
    if s:
        eisenstein = Poly(Poly(list(cyclotomic_polynomial(ps)), _x).as_expr().subs(_x, 1 - _y), _y, domain=ZZ)
        if eisenstein.LC() < 0:
            eisenstein = -eisenstein

    ramified_powers = {}

    def ramified_power(b):
        if b not in ramified_powers:
            if s:
                reduced = Poly((1 - _y) ** b, _y, domain=ZZ).rem(eisenstein).trunc(pk)
                ramified_powers[b] = [int(c) for c in reversed(reduced.all_coeffs())]
            else:
                ramified_powers[b] = [1]
        return ramified_powers[b]

    layers = [Poly(0, _x, domain=ZZ) for _ in range(e)]
    for k, coefficient in enumerate(integral):
        if coefficient == 0:
            continue
        unramified = embedding.power(alpha * k * twist % m1 if m1 > 1 else 0)
        for j, c in enumerate(ramified_power(beta * k % ps if ps > 1 else 0)):
            if c:
                layers[j] = layers[j] + unramified * (coefficient * c)

    best = None
    for j, layer in enumerate(layers):
        for c in embedding.reduce(layer).coeffs():
            if int(c) % pk:
                candidate = e * p_adic_valuation(int(c), p) + j
                best = candidate if best is None else min(best, candidate)
    return best


def generalized_bernoulli(psi, k):
    """B_{k,psi} = f^(k-1) sum_{a=1}^{f} psi(a) B_k(a/f) in Q(zeta_{o(psi)}), psi primitive."""
    if k < 1:
        raise PreconditionError(f"k must be >= 1, got {k}")
    if not psi.is_primitive:
        raise PreconditionError(f"character mod {psi.modulus} is not primitive (conductor {psi.conductor})")
    f = psi.modulus
    dense = [Fraction(0)] * psi.order
    for a in range(1, f + 1):
        e = psi.value_exponent(a)
        if e is None:
            continue
        dense[e] += bernoulli_polynomial(k, Fraction(a, f))
    scale = f ** (k - 1)
    return CyclotomicRational.reduce(psi.order, [scale * c for c in dense])


@dataclass(frozen=True)
class PredictedConfig:
    character: DirichletCharacter
    r: int
    twisted: DirichletCharacter
    valuation: Fraction


def predicted_nontrivial_configs(p, conductor_bound, r_bound, conductors=None):
    """(chi, r) with v_P(B_{r,psi} / r) > 0, psi the primitive character of chi omega^(1-2r).

    chi ranges over even primitive characters of conductor <= conductor_bound
    (or exactly the listed `conductors`) and r over odd values in [3, r_bound].
    P is the prime above p fixed by the Teichmuller embedding (see
    CyclotomicRational.local_valuation); a norm down to Q would mix in the
    conjugate twists and flag almost every r. By the Kummer congruences
    B_{r, omega^(1-2r)}/r matches B_{p-r}/(p-r) mod p, so for chi trivial this
    flags r = p - k mod p - 1 for the irregular indices k.
    """
    if p == 2 or not is_prime(p):
        raise PreconditionError("p must be an odd prime")
    omega = teichmuller_character(p)
    if conductors is None:
        conductors = range(1, conductor_bound + 1)
    found = []
    for f in conductors:
        if f % 4 == 2:
            continue
        for chi in even_primitive_characters(f):
            for r in range(3, r_bound + 1, 2):
                psi = (chi * omega.power(1 - 2 * r)).primitive()
                value = generalized_bernoulli(psi, r)
                if value.is_zero():
                    continue
                valuation = value.local_valuation(p) - p_adic_valuation(r, p)
                if valuation > 0:
                    logger.info("conductor %d, chi of order %d, r = %d: valuation %s", f, chi.order, r, valuation)
                    found.append(PredictedConfig(chi, r, psi, valuation))
    return found
