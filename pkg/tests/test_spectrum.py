import math
import time

import numpy as np
import pytest

from herglotz_sl import configs
from herglotz_sl.errors import SuspectedDoubleRoot
from herglotz_sl.fd import assemble_fd, fd_spectrum
from herglotz_sl.spectrum import ScanOptions, find_spectrum, scan_poles, scan_regular
from herglotz_sl.transmission import Variant, characteristic


def test_continuous_window(continuous):
    recs = scan_regular(continuous, ScanOptions(window=(1e-6, 7.0)))
    np.testing.assert_allclose([r.lam for r in recs], [0.25, 1.0, 2.25, 4.0, 6.25], atol=1e-8)
    assert all(r.multiplicity == 1 and r.classification is Variant.REGULAR for r in recs)


def test_first_ten_continuous_eigenvalues_fast(continuous):
    t0 = time.perf_counter()
    recs = find_spectrum(continuous, ScanOptions(window=(0.01, 26.0)))
    elapsed = time.perf_counter() - t0
    lams = np.array([r.lam for r in recs])[:10]
    np.testing.assert_allclose(lams, (np.arange(1, 11) / 2) ** 2, atol=1e-8)
    assert elapsed < 5.0


def test_negative_window_empty(continuous):
    assert find_spectrum(continuous, ScanOptions(window=(-5.0, 0.05))) == []


def test_window_without_roots_empty(continuous):
    assert scan_regular(continuous, ScanOptions(window=(0.3, 0.9))) == []


def test_double_eigenvalue_record(double):
    recs = find_spectrum(double, ScanOptions(window=(0.1, 5.0)))
    at_one = [r for r in recs if abs(r.lam - 1.0) < 1e-12]
    assert len(at_one) == 1
    assert at_one[0].multiplicity == 2 and at_one[0].classification is Variant.POLE_OF_MU
    others = [r for r in recs if r is not at_one[0]]
    assert others and all(r.multiplicity == 1 for r in others)


def test_pole_scan(double, continuous):
    recs = scan_poles(double, ScanOptions(window=(-1.0, 5.0)))
    assert [(r.lam, r.multiplicity) for r in recs] == [(1.0, 2)]
    assert scan_poles(continuous, ScanOptions()) == []


def test_no_double_slice_all_simple(no_double):
    recs = find_spectrum(no_double, ScanOptions(window=(0.0, 10.0)))
    assert recs and all(r.multiplicity == 1 for r in recs)
    assert not any(abs(r.lam - p) < 1e-6 for r in recs for p in (1.0, 2.25))


@pytest.mark.parametrize("name", sorted(configs.SHIPPED))
def test_spectrum_matches_oracle(name):
    """Every shooting eigenvalue has an oracle partner within O(h^2)."""
    p = configs.SHIPPED[name]()
    recs = find_spectrum(p, ScanOptions(window=(-5.0, 12.0)))
    exact = np.array([r.lam for r in recs for _ in range(r.multiplicity)])
    fd = fd_spectrum(assemble_fd(p, math.pi / 200))
    fd = fd[fd < 12.5]
    assert fd.size >= exact.size
    for e in exact:
        k = int(np.argmin(np.abs(fd - e)))
        assert abs(fd[k] - e) < 5e-3 * max(1, abs(e))
        fd = np.delete(fd, k)


def test_residuals_are_small(full):
    for r in find_spectrum(full, ScanOptions(window=(-5.0, 25.0))):
        if r.classification is Variant.REGULAR:
            assert abs(characteristic(full, np.array([r.lam]))[0]) < 1e-8


def test_records_sorted_with_disjoint_brackets(full):
    recs = find_spectrum(full, ScanOptions(window=(-5.0, 25.0)))
    lams = [r.lam for r in recs]
    assert lams == sorted(lams)
    assert all(a.bracket[1] <= b.bracket[0] for a, b in zip(recs, recs[1:]))


def test_coarse_grid_misses_nothing_that_fine_grid_finds(full):
    coarse = find_spectrum(full, ScanOptions(window=(-5.0, 25.0), grid_points_per_unit=10))
    fine = find_spectrum(full, ScanOptions(window=(-5.0, 25.0), grid_points_per_unit=80))
    np.testing.assert_allclose([r.lam for r in coarse], [r.lam for r in fine], atol=1e-9)


def test_parallel_matches_serial(full):
    serial = find_spectrum(full, ScanOptions(window=(-2.0, 8.0)))
    parallel = find_spectrum(full, ScanOptions(window=(-2.0, 8.0), workers=2))
    assert [r.lam for r in serial] == [r.lam for r in parallel]


def test_sample_on_root_is_handled(continuous):
    """A grid point landing exactly on an eigenvalue must not break the refinement."""
    recs = find_spectrum(continuous, ScanOptions(window=(0.0, 1.0), grid_points_per_unit=4))
    assert sorted(round(r.lam, 8) for r in recs) == [0.25, 1.0]


def test_touching_root_reported_as_suspect(monkeypatch):
    import herglotz_sl.spectrum as sp

    monkeypatch.setattr(sp, "characteristic", lambda problem, lams: (np.asarray(lams) - 0.5) ** 2 + 1e-14)
    recs, suspects = sp._scan_interval(None, (0.0, 1.0), ScanOptions(grid_points_per_unit=7))
    assert recs == [] and len(suspects) == 1
    assert suspects[0][0] == pytest.approx(0.5, abs=1e-6)


def test_touching_root_warns(monkeypatch, continuous):
    import herglotz_sl.spectrum as sp

    monkeypatch.setattr(sp, "characteristic", lambda problem, lams: (np.asarray(lams) - 0.5) ** 2 + 1e-14)
    with pytest.warns(SuspectedDoubleRoot):
        sp.scan_regular(continuous, ScanOptions(window=(0.0, 1.0), grid_points_per_unit=7))


def test_invalid_options():
    for kwargs in (dict(window=(3, 1)), dict(grid_points_per_unit=0), dict(refine_tol=-1), dict(workers=0)):
        with pytest.raises(ValueError):
            ScanOptions(**kwargs)
