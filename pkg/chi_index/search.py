"""Candidate scan over primes ell = 1 mod d p^n and the upper-bound report per character class."""
import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice

from chi_index.chipart import GroupRing, build_T_chi, chi_span_order, ima
from chi_index.errors import PreconditionError
from chi_index.fieldspec import enumerate_characters, qp_conjugacy_classes
from chi_index.modarith import iter_primes_in_progression
from chi_index.residual import ResidualContext, residual_index, residual_vector

logger = logging.getLogger(__name__)

SEMANTICS = (
    "certified upper bound; equals the exact chi-index once a level-n prime "
    "in L_n^iso is sampled"
)


@dataclass(frozen=True)
class SearchConfig:
    ell_bound: int = 10**7
    n_max: int = 6
    primes_per_level: int = 4
    stabilization_window: int = 2
    workers: int = 4
    processes: bool = False
    n_min: int | None = None

    def levels(self, field):
        """Levels scanned for `field`; n_min defaults to max(a, 1)."""
        floor = max(field.a, 1)
        n_min = floor if self.n_min is None else self.n_min
        if n_min < floor:
            raise PreconditionError(f"n_min = {n_min} is below max(a, 1) = {floor}")
        if self.n_max < n_min:
            raise PreconditionError(f"n_max = {self.n_max} is below n_min = {n_min}")
        if self.primes_per_level < 1:
            raise PreconditionError("primes_per_level must be >= 1")
        if self.stabilization_window < 1:
            raise PreconditionError("stabilization_window must be >= 1")
        return range(n_min, self.n_max + 1)


@dataclass(frozen=True)
class CandidateRecord:
    ell: int
    n: int
    ire: int
    ima: int

    @property
    def accepted(self):
        return self.ire < self.ima

    def to_dict(self):
        return {"ell": self.ell, "n": self.n, "ire": self.ire, "ima": self.ima, "accepted": self.accepted}


@dataclass(frozen=True)
class IndexReport:
    character_class: object
    upper_bound_valuation: int | None
    witness: CandidateRecord | None
    candidates: tuple
    stabilized: bool
    semantics: str = SEMANTICS

    def to_dict(self):
        chi = self.character_class.representative
        return {
            "character": {
                "order": chi.order,
                "exponents": list(chi.exponents),
                "qp_degree": self.character_class.degree,
            },
            "upper_bound_valuation": self.upper_bound_valuation,
            "stabilized": self.stabilized,
            "witness": None if self.witness is None else {"ell": self.witness.ell, "n": self.witness.n},
            "candidates": [record.to_dict() for record in self.candidates],
        }


def _check_run(field, r):
    if r < 3 or r % 2 == 0:
        raise PreconditionError(f"r must be odd and >= 3, got {r}")


def candidate_primes(field, config):
    """(n, ell) pairs in scan order: the first K primes of each progression 1 mod d p^n."""
    plan = []
    for n in config.levels(field):
        modulus = field.d * field.p**n
        primes = list(islice(iter_primes_in_progression(modulus, config.ell_bound), config.primes_per_level))
        if not primes:
            logger.info("no prime = 1 mod %d below %d", modulus, config.ell_bound)
        plan.extend((n, ell) for ell in primes)
    return plan


def _evaluate(field, r, n, ell, generators):
    """ire for every class at one prime; generators holds (class index, T_chi, numerator) for level n."""
    ctx = ResidualContext.build(field, ell, n, r)
    c = residual_vector(ctx, field.d)
    results = []
    for index, chi, generator, numerator in generators:
        ire = residual_index(ctx, chi, c, generator=generator, numerator=numerator)
        results.append((index, CandidateRecord(ell, n, ire, ima(chi, field.p, n))))
    logger.debug("ell=%d n=%d: %s", ell, n, [record.ire for _, record in results])
    return results


def _level_generators(field, classes, n):
    ring = GroupRing(field, field.p, n)
    generators = []
    for index, cls in enumerate(classes):
        chi = cls.representative
        t = build_T_chi(ring, chi)
        numerator = chi_span_order(ring, chi, ring.one(), t).valuation
        generators.append((index, chi, t, numerator))
    return generators


def _scan(field, classes, r, config):
    plan = candidate_primes(field, config)
    generators = {n: _level_generators(field, classes, n) for n in sorted({n for n, _ in plan})}
    trails = [[] for _ in classes]
    if config.workers <= 1:
        results = [_evaluate(field, r, n, ell, generators[n]) for n, ell in plan]
    else:
        pool = ProcessPoolExecutor if config.processes else ThreadPoolExecutor
        with pool(max_workers=config.workers) as executor:
            futures = [executor.submit(_evaluate, field, r, n, ell, generators[n]) for n, ell in plan]
            results = [future.result() for future in futures]
    for result in results:
        for index, record in result:
            trails[index].append(record)
    return [sorted(trail, key=lambda rec: (rec.n, rec.ell)) for trail in trails]


def scan_candidates(field, character_class, r, config):
    """CandidateRecords for one class, ascending ell within ascending n."""
    _check_run(field, r)
    return _scan(field, [character_class], r, config)[0]


def index_upper_bound(records):
    """(min accepted ire, first record attaining it), or (None, None) when nothing is accepted."""
    bound, witness = None, None
    for record in records:
        if record.accepted and (bound is None or record.ire < bound):
            bound, witness = record.ire, record
    return bound, witness


def is_stabilized(records, window):
    """Running min of accepted ire unchanged across the last `window` productive levels."""
    by_level = {}
    for record in records:
        if record.accepted:
            by_level.setdefault(record.n, []).append(record.ire)
    if len(by_level) < window:
        return False
    running, history = None, []
    for n in sorted(by_level):
        level_min = min(by_level[n])
        running = level_min if running is None else min(running, level_min)
        history.append(running)
    return len(set(history[-window:])) == 1


def build_report(character_class, records, window):
    records = tuple(sorted(records, key=lambda rec: (rec.n, rec.ell)))
    bound, witness = index_upper_bound(records)
    return IndexReport(
        character_class=character_class,
        upper_bound_valuation=bound,
        witness=witness,
        candidates=records,
        stabilized=bound is not None and is_stabilized(records, window),
    )


def full_run(field, r, config, characters=None):
    """One IndexReport per Q_p-conjugacy class of characters of G.

    `characters` restricts the run to the classes containing the given
    characters.
    """
    _check_run(field, r)
    classes = qp_conjugacy_classes(enumerate_characters(field.group), field.p)
    if characters is not None:
        wanted = set(characters)
        classes = [cls for cls in classes if wanted & set(cls.members)]
        if not classes:
            raise PreconditionError("no character class matches the selection")
    logger.info(
        "F: conductor %d, #G = %d, p = %d, r = %d, %d class(es)",
        field.conductor, field.degree, field.p, r, len(classes),
    )
    trails = _scan(field, classes, r, config)
    reports = [build_report(cls, trail, config.stabilization_window) for cls, trail in zip(classes, trails)]
    for report in reports:
        logger.info(
            "class of order %d: bound %s, stabilized %s, %d candidate(s)",
            report.character_class.order, report.upper_bound_valuation, report.stabilized,
            len(report.candidates),
        )
    return reports
