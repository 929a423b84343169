import numpy as np
import pytest

from aoif.age_analysis import analyze_source, evaluate_grid
from aoif.errors import DomainError, StarvationError
from aoif.model import SourceSpec, SystemSpec, homogeneous_system
from aoif.phase_type import exponential, ph_fit_two_moments
from aoif.simulator import EmpiricalAoICdf, EmpiricalCdf, ks_distance, simulate


def test_table1_mean_covered():
    s = homogeneous_system((1, 2, 3), exponential(12.0), "global")
    sim = simulate(s, 1_000_000, seed=3)
    for n, want in zip((1, 2, 3), (1.5, 0.75, 0.5)):
        assert sim[n].mean_aoi.covers(want)
        assert sim[n].deliveries >= 1_000_000


def test_single_source_against_analysis():
    s = homogeneous_system((1.0,), exponential(1.0), [[0.0]])
    sim = simulate(s, 1_000_000, seed=9)
    exact = analyze_source(s, 1)
    assert sim[1].mean_aoi.covers(exact.aoi.mean)
    assert sim[1].mean_paoi.covers(exact.paoi.mean)


def test_errors_and_retransmissions_against_analysis():
    s = homogeneous_system((1.0, 2.0), ph_fit_two_moments(0.3, 0.5), "self_", 0.2, 0.5)
    sim = simulate(s, 300_000, seed=1)
    for n in (1, 2):
        exact = analyze_source(s, n)
        assert sim[n].mean_aoi.covers(exact.aoi.mean)
        assert sim[n].mean_paoi.covers(exact.paoi.mean)


def test_regenerative_structure():
    s = homogeneous_system((1.0, 2.0), ph_fit_two_moments(0.3, 0.5), "prioritized", 0.1, 0.3)
    src = simulate(s, 20_000, seed=4)[1]
    # peak = age right after the previous reception + time until the next reception
    elapsed = np.diff(src.reception_times)
    assert np.allclose(src.cycle_peak, src.system_times[:-1] + elapsed, rtol=1e-12)
    assert np.allclose(src.cycle_peak, src.peaks[1:], rtol=1e-12)
    assert np.all(src.cycle_peak > src.cycle_start)
    assert src.aoi_mean_from_areas() == pytest.approx(src.mean_aoi.mean, rel=1e-12)


def test_same_seed_same_path():
    s = homogeneous_system((1.0, 3.0), exponential(5.0), "global")
    a, b = simulate(s, 5000, seed=42), simulate(s, 5000, seed=42)
    assert np.array_equal(a[1].peaks, b[1].peaks)
    assert a.events == b.events
    c = simulate(s, 5000, seed=43)
    assert not np.array_equal(a[1].peaks[:100], c[1].peaks[:100])


def test_total_starvation():
    src = SourceSpec(1.0, exponential(1.0), error_prob=1.0, retx_prob=1.0)
    with pytest.raises(StarvationError) as info:
        simulate(SystemSpec((src,), np.zeros((1, 1))), 100)
    assert info.value.source == 1


def test_event_cap_reports_starving_source():
    s = homogeneous_system((1e-4, 5.0), exponential(10.0), "global")
    with pytest.raises(StarvationError) as info:
        simulate(s, 1000, max_events=20_000)
    assert info.value.source == 1


def test_cycle_count_validated():
    s = homogeneous_system((1.0,), exponential(1.0), "global")
    with pytest.raises(DomainError):
        simulate(s, 0)


def test_ks_distance_examples():
    grid = np.linspace(0, 5, 101)
    F = lambda x: 1 - np.exp(-np.asarray(x))
    assert ks_distance(F, F, grid) == 0.0
    assert ks_distance(F, lambda x: F(x) + 0.5, grid) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        ks_distance(F, F, [])


def test_empirical_cdfs():
    cdf = EmpiricalCdf([3.0, 1.0, 2.0])
    assert cdf([0.5, 1.0, 2.5, 3.0]).tolist() == [0.0, 1 / 3, 2 / 3, 1.0]
    # two ramps: [0, 2] and [1, 2]; total time 3
    aoi = EmpiricalAoICdf([0.0, 1.0], [2.0, 2.0])
    assert aoi([0.0, 1.0, 1.5, 2.0, 9.0]) == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0, 1.0])


def test_distribution_agreement_small_scale():
    s = homogeneous_system((1, 2, 3), ph_fit_two_moments(1 / 9, 0.25), "global")
    sim = simulate(s, 200_000, seed=5)
    exact = analyze_source(s, 2)
    grid = evaluate_grid(exact.aoi, 12 * exact.paoi.mean, 500)
    ks = ks_distance(sim[2].aoi_cdf, lambda x: grid[:, 2], grid[:, 0])
    assert ks <= 0.01
