import time

from chi_index.fieldspec import rational_field, real_cyclotomic_field
from chi_index.search import SearchConfig, full_run


def bench(label, field, r, config):
    t0 = time.time()
    try:
        reports = full_run(field, r, config)
        dur = time.time() - t0
        bounds = [report.upper_bound_valuation for report in reports]
        print(f"{label} -> Duration: {dur:.2f}s, Classes: {len(reports)}, Bounds: {bounds}")
    except Exception as e:
        print(f"{label} -> Failed: {e}")


print("Benchmarking...")
small = SearchConfig(ell_bound=10**5, n_max=3)
bench("Q, p=3, r=3", rational_field(3), 3, small)
bench("Q, p=7, r=5", rational_field(7), 5, small)
bench("Q(sqrt5), p=3, r=3", real_cyclotomic_field(5, 3), 3, small)
bench("Q(zeta_13)+, p=3, r=3", real_cyclotomic_field(13, 3), 3, small)
bench("Q(zeta_37)+, p=37, r=5", real_cyclotomic_field(37, 37), 5, SearchConfig(ell_bound=10**7, n_max=2))
