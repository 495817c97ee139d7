"""The real abelian field F, its Galois group G = (Z/f)^x / H and its characters."""
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from math import gcd, lcm

import numpy as np
from sympy import divisors, factorint
from sympy import primitive_root as sympy_primitive_root
from sympy.ntheory.modular import crt

from chi_index.errors import NotTotallyRealError, PreconditionError
from chi_index.modarith import is_prime, multiplicative_order, p_adic_valuation


def units(m):
    """Residues of (Z/m)^x in [0, m); (Z/1)^x is {0}."""
    if m == 1:
        return [0]
    return [t for t in range(1, m) if gcd(t, m) == 1]


def generated_subgroup(generators, m):
    """Closure of the residues `generators` inside (Z/m)^x."""
    start = 1 % m
    group = {start}
    frontier = [start]
    gens = [g % m for g in generators]
    for g in gens:
        if gcd(g, m) != 1:
            raise PreconditionError(f"{g} is not a unit mod {m}")
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % m
            if y not in group:
                group.add(y)
                frontier.append(y)
    return frozenset(group)


def _check_modulus(f):
    if f < 1 or f % 4 == 2:
        raise PreconditionError(f"conductor must be >= 1 and not 2 mod 4, got {f}")


@dataclass(frozen=True)
class AbelianStructure:
    """Independent generators (as residues mod `modulus`) and their exact orders."""

    modulus: int
    generators: tuple
    orders: tuple

    @property
    def order(self):
        total = 1
        for o in self.orders:
            total *= o
        return total

    @property
    def exponent(self):
        return lcm(*self.orders) if self.orders else 1


def unit_group_structure(f):
    """Structure of (Z/f)^x by CRT over prime powers.

    Odd prime powers contribute their smallest primitive root, the 2-part
    contributes -1 and 5.
    """
    _check_modulus(f)
    generators, orders = [], []
    for q, e in sorted(factorint(f).items()):
        qe = q**e
        rest = f // qe
        if q == 2:
            local = [(qe - 1, 2)]
            if e >= 3:
                local.append((5, 2 ** (e - 2)))
        else:
            local = [(int(sympy_primitive_root(qe)), (q - 1) * q ** (e - 1))]
        for g, o in local:
            lifted = int(crt([qe, rest], [g, 1])[0]) if rest > 1 else g
            generators.append(lifted % f)
            orders.append(o)
    return AbelianStructure(f, tuple(generators), tuple(orders))


def decomposition_units(m, p):
    """D in (Z/m)^x: residues whose prime-to-p part lies in <p mod m'>.

    This is Gal(Q_p(zeta_m)/Q_p) inside (Z/m)^x.
    """
    s = p_adic_valuation(m, p)
    m1 = m // p**s
    powers = {1 % m1}
    x = p % m1
    while x not in powers:
        powers.add(x)
        x = x * p % m1
    return [t for t in units(m) if t % m1 in powers]


@dataclass(frozen=True)
class Character:
    """A character of G stored as exponents on the generators of G.

    chi(g_i) = zeta_{o_i}^{k_i} where o_i is the order of the i-th generator.
    """

    exponents: tuple
    generator_orders: tuple

    @cached_property
    def order(self):
        return lcm(1, *(o // gcd(k, o) for k, o in zip(self.exponents, self.generator_orders)))

    def split(self, p):
        """(s, m') with o(chi) = p^s * m' and p not dividing m'."""
        s = p_adic_valuation(self.order, p)
        return s, self.order // p**s

    def value_exponent(self, coordinates):
        """v with chi(g) = zeta_{o(chi)}^v for g with the given generator coordinates."""
        exponent = lcm(1, *self.generator_orders)
        v = sum(k * c * (exponent // o) for k, c, o in zip(self.exponents, coordinates, self.generator_orders))
        return (v // (exponent // self.order)) % self.order

    def power(self, t):
        return Character(
            tuple(k * t % o for k, o in zip(self.exponents, self.generator_orders)),
            self.generator_orders,
        )

    @property
    def is_trivial(self):
        return self.order == 1


@dataclass(frozen=True)
class CharacterClass:
    """A Q_p-conjugacy class of characters: chi ~ chi^t for t in the decomposition group."""

    representative: Character
    members: tuple
    degree: int

    @property
    def order(self):
        return self.representative.order


@dataclass(frozen=True)
class FieldSpec:
    """F inside Q(zeta_f), given by its conductor and the subgroup H of (Z/f)^x fixing it.

    Elements of G are indexed 0..#G-1 by their smallest positive coset
    representative, ascending; index 0 is the identity.
    """

    conductor: int
    p: int
    subgroup: frozenset

    def __post_init__(self):
        _check_modulus(self.conductor)
        if self.p == 2 or not is_prime(self.p):
            raise PreconditionError("p must be an odd prime")

    @cached_property
    def a(self):
        return p_adic_valuation(self.conductor, self.p)

    @cached_property
    def d(self):
        return self.conductor // self.p**self.a

    @cached_property
    def _cosets(self):
        f = self.conductor
        class_of, transversal = {}, []
        for t in units(f):
            if t in class_of:
                continue
            index = len(transversal)
            transversal.append(t if t else 1)
            for h in self.subgroup:
                class_of[t * h % f] = index
        return class_of, tuple(transversal)

    @property
    def transversal(self):
        return self._cosets[1]

    @property
    def degree(self):
        return len(self.transversal)

    def element_of(self, t):
        """Index in G of the class of the integer t, which must be prime to f."""
        try:
            return self._cosets[0][t % self.conductor]
        except KeyError:
            raise PreconditionError(f"{t} is not a unit mod {self.conductor}") from None

    @cached_property
    def multiplication_table(self):
        reps = self.transversal
        size = len(reps)
        table = np.empty((size, size), dtype=np.int64)
        for i, x in enumerate(reps):
            for j, y in enumerate(reps):
                table[i, j] = self.element_of(x * y)
        return table

    @cached_property
    def inverses(self):
        table = self.multiplication_table
        return tuple(int(np.flatnonzero(table[i] == 0)[0]) for i in range(self.degree))

    def multiply(self, i, j):
        return int(self.multiplication_table[i, j])

    def power(self, i, k):
        result, base = 0, i
        while k:
            if k & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            k >>= 1
        return result

    @cached_property
    def element_orders(self):
        orders = []
        for i in range(self.degree):
            k, x = 1, i
            while x != 0:
                x = self.multiply(x, i)
                k += 1
            orders.append(k)
        return tuple(orders)

    @cached_property
    def _basis(self):
        return _abelian_basis(self)

    @property
    def group(self):
        """G as an AbelianStructure (generators are transversal residues mod f)."""
        elements, orders = self._basis
        return AbelianStructure(
            self.conductor, tuple(self.transversal[e] for e in elements), tuple(orders)
        )

    @cached_property
    def coordinates(self):
        """Exponent vector of every element of G on the generators of `group`."""
        elements, orders = self._basis
        coords = {0: ()}
        for g, o in zip(elements, orders):
            extended = {}
            for x, vec in coords.items():
                y = x
                for j in range(o):
                    extended[y] = vec + (j,)
                    y = self.multiply(y, g)
            coords = extended
        return tuple(coords[i] for i in range(self.degree))

    def representative_of_inverse(self, g):
        """Default a_g: smallest positive integer prime to d*p in the class of g^-1."""
        target = self.inverses[g]
        base = self.transversal[target]
        for k in range(self.p + 1):
            a = base + k * self.conductor
            if gcd(a, self.d * self.p) == 1:
                return a
        raise AssertionError(f"no representative prime to {self.d * self.p} for class {target}")

    def image_of_subgroup(self, b):
        """Image of H in (Z/b p^a)^x; b must divide d."""
        m = b * self.p**self.a
        return frozenset(h % m for h in self.subgroup)

    def fixing_subgroup(self, b):
        """Gal(F / Q(zeta_{b p^a}) cap F) as a sorted tuple of indices of G."""
        if self.d % b:
            raise PreconditionError(f"{b} does not divide d = {self.d}")
        m = b * self.p**self.a
        image = self.image_of_subgroup(b)
        return tuple(i for i, t in enumerate(self.transversal) if t % m in image)

    def frobenius(self, q):
        """An element of G restricting to Frob_q on Q(zeta_{b p^inf}) cap F for q not dividing b."""
        if q == self.p or not is_prime(q):
            raise PreconditionError(f"Frobenius needs a prime different from p, got {q}")
        f = self.conductor
        e = p_adic_valuation(f, q)
        if e == 0:
            return self.element_of(q)
        qe = q**e
        rest = f // qe
        t = int(crt([qe, rest], [1, q % rest])[0]) if rest > 1 else 1
        return self.element_of(t)

    def character_conductor(self, chi):
        """Conductor of chi viewed as a Dirichlet character mod f."""
        values = self.character_values(chi)
        f = self.conductor
        for m in divisors(f):
            if all(values[self.element_of(t)] == 0 for t in units(f) if t % m == 1 % m):
                return m
        return f

    def character_values(self, chi):
        return tuple(chi.value_exponent(c) for c in self.coordinates)

    def subgroup_generators(self):
        """A small generating set of H, for serialization."""
        chosen, span = [], frozenset({1 % self.conductor})
        for h in sorted(self.subgroup):
            if h not in span:
                chosen.append(h if h else 1)
                span = generated_subgroup(chosen, self.conductor)
        return tuple(chosen)


def _abelian_basis(field):
    """Independent generators of G, Sylow by Sylow, largest order first."""
    size = field.degree
    orders = field.element_orders
    elements, basis_orders = [], []
    for q in sorted(factorint(size)):
        sylow = [x for x in range(size) if orders[x] == q ** p_adic_valuation(orders[x], q)]
        chosen = []
        span = {0: ()}
        while len(span) < len(sylow):
            best, best_e = None, -1
            for y in sylow:
                e, z = 0, y
                while z not in span:
                    z = field.power(z, q)
                    e += 1
                if e > best_e:
                    best, best_e = y, e
            qe = q**best_e
            coeffs = span[field.power(best, qe)]
            x = best
            for (b, ob), c in zip(chosen, coeffs):
                x = field.multiply(x, field.power(b, (-(c // qe)) % ob))
            chosen.append((x, qe))
            extended = {}
            for s, vec in span.items():
                y = s
                for j in range(qe):
                    extended[y] = vec + (j,)
                    y = field.multiply(y, x)
            span = extended
        for x, o in chosen:
            elements.append(x)
            basis_orders.append(o)
    return tuple(elements), tuple(basis_orders)


def quotient_structure(f, subgroup, p):
    """Build the FieldSpec of the fixed field of <subgroup> in Q(zeta_f).

    The conductor is normalized: the result uses the smallest f' | f such
    that H contains the kernel of (Z/f)^x -> (Z/f')^x.
    """
    _check_modulus(f)
    h = generated_subgroup(subgroup, f)
    if (f - 1) % f not in h:
        raise NotTotallyRealError(f"-1 is not in H mod {f}: the field is not totally real")

    all_units = units(f)
    for m in divisors(f):
        if all(t in h for t in all_units if t % m == 1 % m):
            return FieldSpec(m, p, frozenset(x % m for x in h))
    raise AssertionError("f itself always satisfies the conductor condition")


def rational_field(p):
    return quotient_structure(1, (), p)


def real_cyclotomic_field(f, p):
    return quotient_structure(f, (f - 1,), p)


def enumerate_characters(group):
    """Every character of the AbelianStructure `group`, exponents in lexicographic order."""
    ranges = [range(o) for o in group.orders]
    return [Character(tuple(k), group.orders) for k in product(*ranges)]


def qp_degree(chi, p):
    """[Q_p(chi) : Q_p] = phi(p^s) * ord_{m'}(p)."""
    s, m1 = chi.split(p)
    phi_ps = (p - 1) * p ** (s - 1) if s else 1
    return phi_ps * multiplicative_order(p, m1)


def qp_conjugacy_classes(characters, p):
    """Partition characters into Q_p-conjugacy classes, in order of first appearance."""
    position = {chi: i for i, chi in enumerate(characters)}
    seen = set()
    classes = []
    for chi in characters:
        if chi in seen:
            continue
        orbit = {chi.power(t) for t in decomposition_units(chi.order, p)}
        members = tuple(sorted(orbit, key=position.__getitem__))
        seen.update(members)
        classes.append(CharacterClass(chi, members, qp_degree(chi, p)))
    return classes


def galois_representatives(field, b, n):
    """J_{b,n}: smallest positive representatives of Gal(Q(zeta_{b p^n}) / Q(zeta_{b p^a}) cap F).

    Read as the preimage in (Z/b p^n)^x of the image of H in (Z/b p^a)^x;
    for b = d this is {t : t mod f in H}.
    """
    p = field.p
    if b < 1 or field.d % b:
        raise PreconditionError(f"{b} does not divide d = {field.d}")
    if n < max(field.a, 1):
        raise PreconditionError(f"level n = {n} is below max(a, 1) = {max(field.a, 1)}")
    m = b * p**n
    mod_a = b * p**field.a
    image = field.image_of_subgroup(b)
    return [t for t in range(1, m) if gcd(t, m) == 1 and t % mod_a in image]
