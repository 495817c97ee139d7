import numpy as np
import pytest

from chi_index.chipart import (
    GroupRing,
    build_T_chi,
    chi_part_order_oracle,
    chi_span_order,
    cyclotomic_polynomial,
    exhaustive_span_order,
    ima,
    lattice_order,
    padic_trace,
    ring_multiply,
    root_of_unity_embedding,
    span_order,
    trace_root_of_unity,
)
from chi_index.errors import NonRationalTraceError, PreconditionError
from chi_index.fieldspec import (
    enumerate_characters,
    qp_conjugacy_classes,
    qp_degree,
    rational_field,
    real_cyclotomic_field,
)

GENERATOR_LAW_CONDUCTORS = (1, 5, 7, 8, 9, 12, 13, 16, 20)


def _field(f, p):
    return rational_field(p) if f == 1 else real_cyclotomic_field(f, p)


def _quadratic(p=3, n=1):
    field = real_cyclotomic_field(5, p)
    ring = GroupRing(field, p, n)
    chi = [c for c in enumerate_characters(field.group) if c.order == 2][0]
    return ring, chi


def _cubic(p=3, n=1):
    field = real_cyclotomic_field(7, p)
    ring = GroupRing(field, p, n)
    chi = [c for c in enumerate_characters(field.group) if c.order == 3][0]
    return ring, chi


def test_ring_multiply_identity_and_norm():
    field = real_cyclotomic_field(13, 5)
    ring = GroupRing(field, 5, 2)
    x = ring.element(range(field.degree))
    assert ring_multiply(x, ring.one()) == x
    g = field.element_of(2)  # generator of G = C6
    order = field.element_orders[g]
    norm = ring.norm_element(field.power(g, j) for j in range(order))
    assert (ring.one() - ring.basis(g)) * norm == ring.zero()


def test_ring_multiply_worked_example():
    ring, _ = _quadratic()
    x = ring.element([2, 1])
    assert x * x == ring.element([2, 1])


def test_ring_multiply_rejects_mixed_rings():
    ring, _ = _quadratic()
    other = GroupRing(ring.field, 3, 2)
    with pytest.raises(PreconditionError):
        ring_multiply(ring.one(), other.one())


def test_ring_is_commutative_and_associative():
    field = real_cyclotomic_field(20, 3)
    ring = GroupRing(field, 3, 2)
    rng = np.random.default_rng(5)
    x, y, z = (ring.element(rng.integers(0, 9, field.degree)) for _ in range(3))
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)


def test_left_matrix_matches_multiplication():
    field = real_cyclotomic_field(13, 3)
    ring = GroupRing(field, 3, 2)
    rng = np.random.default_rng(9)
    x, y = (ring.element(rng.integers(0, 9, field.degree)) for _ in range(2))
    product = ring.left_matrix(x).dot(np.array(y.coefficients, dtype=object))
    assert ring.element(product) == x * y


@pytest.mark.parametrize("m, coefficients", [(1, (1, -1)), (4, (1, 0, 1)), (12, (1, 0, -1, 0, 1)),
                                              (9, (1, 0, 0, 1, 0, 0, 1))])
def test_cyclotomic_polynomial(m, coefficients):
    assert cyclotomic_polynomial(m) == coefficients


@pytest.mark.parametrize("m, k, p, expected", [(4, 1, 3, 0), (3, 1, 3, -1), (4, 0, 3, 2), (9, 0, 3, 6),
                                                (5, 1, 3, -1), (1, 0, 7, 1), (9, 3, 3, -3)])
def test_trace_root_of_unity(m, k, p, expected):
    assert trace_root_of_unity(m, k, p) == expected


def test_trace_of_non_rational_element_raises():
    # 5 = 1 mod 4: Q_5(i) = Q_5, so Tr(i) = i
    with pytest.raises(NonRationalTraceError):
        trace_root_of_unity(4, 1, 5)


def test_padic_trace_agrees_with_rational_traces():
    for p in (3, 5, 7):
        for m in range(1, 30):
            for k in range(m):
                try:
                    exact = trace_root_of_unity(m, k, p)
                except NonRationalTraceError:
                    continue
                assert padic_trace(m, k, p, 3) == exact % p**3


def test_padic_trace_of_teichmuller_roots():
    # Q_5 contains mu_4: Tr(i^k) is i^k realized as a 4th root of unity mod 125
    values = [padic_trace(4, k, 5, 3) for k in range(4)]
    assert values[0] == 1 and values[2] == 124
    assert values[1] * values[1] % 125 == 124
    assert values[3] == 125 - values[1]


def test_root_of_unity_embedding_has_exact_order():
    for m, p, n in [(8, 3, 2), (5, 11, 2), (13, 3, 2), (7, 3, 3)]:
        embedding = root_of_unity_embedding(m, p, n)
        acc = embedding.power(0)
        for _ in range(m):
            acc = embedding.multiply(acc, embedding.zeta)
        assert acc == embedding.power(0)
        assert all(embedding.power(m // q) != embedding.power(0) for q in (2, 3, 5, 7, 13) if m % q == 0)


def test_T_chi_trivial_group():
    field = rational_field(3)
    ring = GroupRing(field, 3, 1)
    chi = enumerate_characters(field.group)[0]
    assert build_T_chi(ring, chi) == ring.one()


def test_T_chi_quadratic():
    ring, chi = _quadratic()
    assert build_T_chi(ring, chi) == ring.element([2, 1])


def test_T_chi_ramified_cubic():
    ring, chi = _cubic()
    h = next(g for g, v in enumerate(ring.field.character_values(chi)) if v == 1)
    assert build_T_chi(ring, chi) in (ring.one() - ring.basis(h), ring.one() - ring.basis(ring.field.inverses[h]))


def test_T_chi_is_constant_on_classes():
    for f, p in [(13, 3), (16, 3), (20, 5), (9, 3), (13, 5)]:
        field = _field(f, p)
        ring = GroupRing(field, p, 2)
        for cls in qp_conjugacy_classes(enumerate_characters(field.group), p):
            generators = {build_T_chi(ring, chi) for chi in cls.members}
            assert len(generators) == 1


def test_T_chi_span_does_not_depend_on_h():
    ring, chi = _cubic(p=3, n=2)
    values = ring.field.character_values(chi)
    spans = set()
    for h, v in enumerate(values):
        if v:
            t = build_T_chi(ring, chi, h=h)
            spans.add(chi_span_order(ring, chi, ring.one(), t).valuation)
    assert spans == {ima(chi, 3, 2)}


def test_lattice_order_worked_example():
    result = lattice_order([[2, 1], [1, 2]], 3, 1)
    assert result.valuation == 1
    assert lattice_order([], 3, 2).valuation == 0


def test_span_order_examples():
    field = rational_field(3)
    ring = GroupRing(field, 3, 2)
    assert span_order([ring.one()]).valuation == 2
    quad, _ = _quadratic(3, 2)
    assert span_order([quad.translate(g, quad.one()) for g in range(2)]).valuation == 4
    quad1, _ = _quadratic(3, 1)
    assert span_order([quad1.element([2, 1]), quad1.element([1, 2])]).valuation == 1


def test_span_order_respects_the_cap():
    ring, _ = _quadratic()
    with pytest.raises(PreconditionError):
        span_order([ring.one()], cap=1)


@pytest.mark.parametrize("p, n, sizes", [(3, 1, (1, 2, 3)), (3, 2, (1, 2)), (5, 1, (1, 2))])
def test_span_order_matches_exhaustive_enumeration(p, n, sizes):
    rng = np.random.default_rng(p * 10 + n)
    fields = {1: rational_field(p), 2: real_cyclotomic_field(5 if p != 5 else 8, p), 3: real_cyclotomic_field(7, p)}
    for _ in range(100):
        size = int(rng.choice(sizes))
        ring = GroupRing(fields[size], p, n)
        generators = [ring.element(rng.integers(0, p**n, size)) for _ in range(int(rng.integers(0, 4)))]
        assert span_order(generators).valuation == exhaustive_span_order(generators)


def test_chi_span_order_examples():
    ring, chi = _quadratic()
    assert chi_span_order(ring, chi, ring.one()).valuation == 1
    assert chi_span_order(ring, chi, ring.zero()).valuation == 0


def test_ima_examples():
    trivial = enumerate_characters(rational_field(3).group)[0]
    assert ima(trivial, 3, 2) == 2
    field = real_cyclotomic_field(16, 3)
    quartic = [chi for chi in enumerate_characters(field.group) if chi.order == 4][0]
    assert ima(quartic, 3, 2) == 4
    _, cubic = _cubic()
    assert ima(cubic, 3, 1) == 2


def test_oracle_examples():
    trivial_ring = GroupRing(rational_field(3), 3, 1)
    assert chi_part_order_oracle(trivial_ring, enumerate_characters(trivial_ring.field.group)[0]) == 1
    ring, chi = _quadratic()
    assert chi_part_order_oracle(ring, chi) == 1
    ring, chi = _cubic()
    assert chi_part_order_oracle(ring, chi) == 2


@pytest.mark.parametrize("f", GENERATOR_LAW_CONDUCTORS)
@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_generator_law(f, p, n):
    field = _field(f, p)
    ring = GroupRing(field, p, n)
    for chi in enumerate_characters(field.group):
        expected = n * qp_degree(chi, p)
        assert chi_span_order(ring, chi, ring.one()).valuation == expected
        assert chi_part_order_oracle(ring, chi) == expected


def test_T_chi_module_closure():
    field = real_cyclotomic_field(13, 3)
    ring = GroupRing(field, 3, 2)
    rng = np.random.default_rng(1)
    x = ring.element(rng.integers(0, 9, field.degree))
    for chi in enumerate_characters(field.group):
        tx = build_T_chi(ring, chi) * x
        base = [ring.translate(g, tx) for g in range(field.degree)]
        before = span_order(base).valuation
        for g in range(field.degree):
            assert span_order(base + [ring.translate(g, ring.translate(1, tx))]).valuation == before


def test_galois_ring_traces_sum_to_the_rational_trace():
    # (Z/13)^x / <3> has four cosets; the local traces over them add up to Tr_{Q(zeta_13)/Q} = -1
    embedding = root_of_unity_embedding(13, 3, 3)
    assert embedding.residue_degree == 3
    cosets = [1, 2, 4, 7]
    assert sum(embedding.trace(c) for c in cosets) % 27 == 26
