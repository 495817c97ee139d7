"""Self-check suites behind `--check`.

Each suite runs a bounded family of small configurations and reports the
first disagreement it meets.
"""
import logging
from dataclasses import dataclass
from itertools import islice
from math import gcd

import numpy as np

from chi_index.chipart import (
    GroupRing,
    chi_part_order_oracle,
    chi_span_order,
    exhaustive_span_order,
    ima,
    padic_trace,
    span_order,
    trace_root_of_unity,
)
from chi_index.errors import NonRationalTraceError
from chi_index.fieldspec import (
    enumerate_characters,
    qp_conjugacy_classes,
    rational_field,
    real_cyclotomic_field,
)
from chi_index.modarith import (
    all_primitive_roots,
    dlog_prime_power,
    is_prime,
    iter_primes_in_progression,
    primes_in_progression,
    primitive_root,
)
from chi_index.residual import ResidualContext, check_norm_relation, kurihara_index, residual_index, residual_vector

logger = logging.getLogger(__name__)

GENERATOR_LAW_CONDUCTORS = (1, 5, 7, 8, 9, 12, 13, 16, 20)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _field(f, p):
    return rational_field(p) if f == 1 else real_cyclotomic_field(f, p)


def check_generator_law(levels=(1, 2, 3)):
    for f in GENERATOR_LAW_CONDUCTORS:
        for p in (3, 5):
            field = _field(f, p)
            for n in levels:
                ring = GroupRing(field, p, n)
                for chi in enumerate_characters(field.group):
                    spanned = chi_span_order(ring, chi, ring.one()).valuation
                    oracle = chi_part_order_oracle(ring, chi)
                    expected = ima(chi, p, n)
                    if not spanned == oracle == expected:
                        return CheckResult(
                            "generator law", False,
                            f"f={f} p={p} n={n} chi={chi.exponents}: span {spanned}, oracle {oracle}, n*d {expected}",
                        )
    return CheckResult("generator law", True)


def check_traces():
    for p in (3, 5, 7):
        for m in range(1, 25):
            for k in range(m):
                try:
                    exact = trace_root_of_unity(m, k, p)
                except NonRationalTraceError:
                    continue
                if padic_trace(m, k, p, 3) != exact % p**3:
                    return CheckResult("traces", False, f"m={m} k={k} p={p}")
    return CheckResult("traces", True)


def check_span_oracle(instances=30, seed=7):
    rng = np.random.default_rng(seed)
    for p, n, sizes in ((3, 1, (1, 2, 3)), (3, 2, (1, 2)), (5, 1, (1, 2))):
        fields = {1: rational_field(p), 2: real_cyclotomic_field(5 if p != 5 else 8, p), 3: real_cyclotomic_field(7, p)}
        for _ in range(instances):
            size = int(rng.choice(sizes))
            ring = GroupRing(fields[size], p, n)
            count = int(rng.integers(0, 4))
            generators = [ring.element(rng.integers(0, p**n, size)) for _ in range(count)]
            fast = span_order(generators).valuation
            slow = exhaustive_span_order(generators)
            if fast != slow:
                return CheckResult("span oracle", False, f"p={p} n={n} #G={size}: {fast} != {slow}")
    return CheckResult("span oracle", True)


def check_dlog(instances=10**4, seed=11):
    """Round trips at random primes ell = 1 mod p^n below 10^6."""
    rng = np.random.default_rng(seed)
    shapes = ((3, 1), (3, 2), (3, 4), (5, 2), (7, 2), (11, 2))
    pools = {shape: primes_in_progression(shape[0] ** shape[1], 10**6) for shape in shapes}
    generators = {}
    for _ in range(instances):
        p, n = shapes[int(rng.integers(len(shapes)))]
        order = p**n
        ell = int(rng.choice(pools[p, n]))
        if (ell, order) not in generators:
            generators[ell, order] = pow(primitive_root(ell), (ell - 1) // order, ell)
        g = generators[ell, order]
        e = int(rng.integers(0, order))
        if dlog_prime_power(ell, g, pow(g, e, ell), p, n) != e:
            return CheckResult("dlog", False, f"ell={ell} p^n={order} e={e}")
    return CheckResult("dlog", True, f"{instances} round trips over {len(generators)} primes")


def _invariance_configs():
    yield rational_field(3), 3, 1, 7
    yield real_cyclotomic_field(5, 3), 3, 1, 31
    yield real_cyclotomic_field(7, 3), 5, 1, 43
    yield real_cyclotomic_field(13, 5), 3, 1, 131
    yield real_cyclotomic_field(13, 7), 3, 1, 547
    yield real_cyclotomic_field(13, 3), 3, 2, 937


def check_primitive_root_invariance():
    for field, r, n, ell in _invariance_configs():
        classes = qp_conjugacy_classes(enumerate_characters(field.group), field.p)
        baseline = None
        for eta in all_primitive_roots(ell):
            ctx = ResidualContext.build(field, ell, n, r, eta)
            c = residual_vector(ctx, field.d)
            indices = [residual_index(ctx, cls.representative, c) for cls in classes]
            if baseline is None:
                baseline = indices
            elif indices != baseline:
                return CheckResult(
                    "primitive-root invariance", False,
                    f"f={field.conductor} ell={ell} eta={eta}: {indices} != {baseline}",
                )
    return CheckResult("primitive-root invariance", True)


def shifted_representatives(field, n):
    """a_g' = h a_g + k f for the first h in H \\ {1} (then h = 1) that moves a_g mod d p^n.

    Every a_g' is prime to d p and still represents the class of g^-1.
    """
    modulus = field.d * field.p**n
    multipliers = sorted(h for h in field.subgroup if h % field.conductor != 1 % field.conductor) + [1]
    result = []
    for g in range(field.degree):
        a = field.representative_of_inverse(g)
        moved = next(
            b
            for h in multipliers
            for k in range(4 * field.d * field.p + 2)
            for b in (h * a + k * field.conductor,)
            if gcd(b, field.d * field.p) == 1 and b % modulus != a % modulus
        )
        result.append(moved)
    return result


def check_representative_invariance():
    for field, r, n, ell in _invariance_configs():
        ctx = ResidualContext.build(field, ell, n, r)
        default = residual_vector(ctx, field.d)
        moved = residual_vector(ctx, field.d, shifted_representatives(field, n))
        if moved != default:
            return CheckResult("representative invariance", False, f"f={field.conductor} ell={ell}")
    return CheckResult("representative invariance", True)


def check_norm_relations(primes_per_field=3):
    for f in (15, 35):
        field = real_cyclotomic_field(f, 3)
        pairs = [
            (q, b)
            for b in range(1, field.d + 1) if field.d % b == 0
            for q in range(2, field.d + 1) if field.d % (q * b) == 0 and is_prime(q)
        ]
        n = max(field.a, 1)
        for ell in islice(iter_primes_in_progression(field.d * 3**n, 10**5), primes_per_field):
            ctx = ResidualContext.build(field, ell, n, 3)
            for q, b in pairs:
                if not check_norm_relation(ctx, q, b):
                    return CheckResult("norm relations", False, f"f={f} ell={ell} q={q} b={b}")
    return CheckResult("norm relations", True)


def check_kurihara():
    for f in GENERATOR_LAW_CONDUCTORS:
        for p in (3, 5):
            field = _field(f, p)
            chars = [chi for chi in enumerate_characters(field.group) if (p - 1) % chi.order == 0]
            n = max(field.a, 1)
            for ell in islice(iter_primes_in_progression(field.d * p**n, 10**5), 2):
                ctx = ResidualContext.build(field, ell, n, 3)
                c = residual_vector(ctx, field.d)
                for chi in chars:
                    if kurihara_index(ctx, chi, c) != residual_index(ctx, chi, c):
                        return CheckResult("kurihara", False, f"f={f} p={p} ell={ell} chi={chi.exponents}")
    return CheckResult("kurihara", True)


SUITES = (
    check_dlog,
    check_traces,
    check_span_oracle,
    check_generator_law,
    check_primitive_root_invariance,
    check_representative_invariance,
    check_norm_relations,
    check_kurihara,
)


def run_checks(suites=SUITES):
    results = []
    for suite in suites:
        result = suite()
        log = logger.info if result.passed else logger.error
        log("%s: %s %s", result.name, "ok" if result.passed else "FAILED", result.detail)
        results.append(result)
    return results
