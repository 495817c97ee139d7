"""Word-sized modular arithmetic over F_ell.

Primality, primes in arithmetic progression, primitive roots and discrete
logarithms inside the p^n-torsion of F_ell^x. Every function is pure.
"""
from functools import lru_cache
from itertools import count
from math import isqrt

from sympy import factorint, primerange
from sympy.ntheory import n_order

from chi_index.errors import NotInSubgroupError, PreconditionError

# Deterministic for every n < 3.3 * 10^24, which covers the 64-bit range.
MILLER_RABIN_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
MAX_MODULUS = 1 << 64

# Below this size the order-p logarithm uses a full lookup table.
_TABLE_LIMIT = 1 << 16


def is_prime(n):
    """Deterministic Miller-Rabin for 0 <= n < 2^64."""
    if n < 2:
        return False
    if n >= MAX_MODULUS:
        raise PreconditionError(f"{n} exceeds the 64-bit modulus range")
    for q in MILLER_RABIN_WITNESSES:
        if n % q == 0:
            return n == q

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for a in MILLER_RABIN_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_progression(modulus, bound):
    """All primes ell <= bound with ell = 1 mod modulus, ascending."""
    if modulus < 1:
        raise PreconditionError("modulus must be >= 1")
    target = 1 % modulus
    return [q for q in primerange(2, bound + 1) if q % modulus == target]


def iter_primes_in_progression(modulus, bound):
    """Lazy variant of primes_in_progression that walks 1 + k*modulus.

    The search only needs the first few primes of a progression, so this
    never sieves up to the bound.
    """
    if modulus < 1:
        raise PreconditionError("modulus must be >= 1")
    for k in count(1):
        candidate = k * modulus + 1
        if candidate > bound:
            return
        if is_prime(candidate):
            yield candidate


def pow_mod(base, exponent, modulus):
    if modulus < 1:
        raise PreconditionError("modulus must be >= 1")
    if exponent < 0:
        raise PreconditionError("exponent must be >= 0")
    return pow(base, exponent, modulus)


def p_adic_valuation(x, p, cap=None):
    """v_p(x); x = 0 returns cap (and requires one). Nonzero results are capped too."""
    if x == 0:
        if cap is None:
            raise PreconditionError("v_p(0) needs a cap")
        return cap
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def multiplicative_order(x, m):
    if m == 1:
        return 1
    return int(n_order(x, m))


@lru_cache(maxsize=4096)
def prime_divisors(n):
    return tuple(sorted(factorint(n)))


@lru_cache(maxsize=4096)
def primitive_root(ell):
    """Smallest positive primitive root mod the prime ell."""
    if ell == 2:
        return 1
    if not is_prime(ell):
        raise PreconditionError(f"{ell} is not prime")
    divisors = prime_divisors(ell - 1)
    for g in range(2, ell):
        if all(pow(g, (ell - 1) // q, ell) != 1 for q in divisors):
            return g
    raise AssertionError(f"no primitive root found mod {ell}")


def is_primitive_root(eta, ell):
    if eta % ell == 0:
        return False
    return all(pow(eta, (ell - 1) // q, ell) != 1 for q in prime_divisors(ell - 1))


def all_primitive_roots(ell):
    return [g for g in range(1, ell) if is_primitive_root(g, ell)]


@lru_cache(maxsize=16)
def _order_p_table(ell, gamma, p):
    table = {}
    x = 1
    for j in range(p):
        table[x] = j
        x = x * gamma % ell
    return table


def _dlog_order_p(ell, gamma, target, p):
    """Logarithm of target to the base gamma of order p (baby-step/giant-step)."""
    if p <= _TABLE_LIMIT:
        try:
            return _order_p_table(ell, gamma, p)[target]
        except KeyError:
            raise NotInSubgroupError(f"{target} is not a power of {gamma} mod {ell}") from None

    m = isqrt(p) + 1
    baby = {}
    x = 1
    for j in range(m):
        baby.setdefault(x, j)
        x = x * gamma % ell
    giant = pow(gamma, -m, ell)
    y = target
    for i in range(m):
        if y in baby:
            return (i * m + baby[y]) % p
        y = y * giant % ell
    raise NotInSubgroupError(f"{target} is not a power of {gamma} mod {ell}")


def dlog_prime_power(ell, g, w, p, n):
    """e in Z/p^n with g^e = w mod ell, for g of exact order p^n.

    Pohlig-Hellman descent: one order-p logarithm per level.
    """
    order = p**n
    if (ell - 1) % order:
        raise PreconditionError(f"p^n = {order} does not divide ell - 1 = {ell - 1}")
    if pow(g, order, ell) != 1 or (n > 0 and pow(g, order // p, ell) == 1):
        raise PreconditionError(f"{g} does not have order exactly {order} mod {ell}")
    w %= ell
    if w == 0 or pow(w, order, ell) != 1:
        raise NotInSubgroupError(f"{w} is not in the subgroup of order {order} mod {ell}")
    if n == 0:
        return 0

    gamma = pow(g, order // p, ell)
    g_inv = pow(g, -1, ell)
    e = 0
    for k in range(n):
        shifted = w * pow(g_inv, e, ell) % ell
        h = pow(shifted, p ** (n - 1 - k), ell)
        e += _dlog_order_p(ell, gamma, h, p) * p**k
    return e % order


def teichmuller(x, p, n):
    """The (p-1)-th root of unity in Z/p^n congruent to x mod p.

    Iterated p-th powering; the sequence is constant after at most n steps.
    """
    if x % p == 0:
        raise PreconditionError(f"p = {p} divides {x}: no Teichmuller lift")
    modulus = p**n
    y = x % modulus
    while True:
        z = pow(y, p, modulus)
        if z == y:
            return y
        y = z
