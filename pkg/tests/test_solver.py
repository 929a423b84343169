import numpy as np
import pytest

from aoif.errors import NonErgodicError
from aoif.mfq import MFQSpec, build_mfq
from aoif.model import homogeneous_system
from aoif.phase_type import exponential
from aoif.solver import boundary_mass, solve_steady_state

from helpers import random_system


def _on_off(alpha, beta, r1, r2):
    Q = np.array([[-alpha, alpha], [beta, -beta]])
    return MFQSpec.general(Q, Q, np.diag([r1, -r2]))


@pytest.mark.parametrize("alpha,beta,r1,r2", [(2.0, 1.0, 1.0, 1.5), (0.7, 0.4, 2.0, 5.0), (1.0, 1.0, 1.0, 1.2)])
def test_two_state_fluid_closed_form(alpha, beta, r1, r2):
    sol = solve_steady_state(_on_off(alpha, beta, r1, r2))
    z = (beta * r1 - alpha * r2) / (r1 * r2)
    k = (alpha + z * r1) / beta
    C = 1.0 / (r1 / beta - (1.0 + k) / z)
    for x in (0.0, 0.3, 2.5):
        want = C * np.exp(z * x) * np.array([1.0, k])
        assert sol.density(x) == pytest.approx(want, rel=1e-10)
    assert sol.c[0] == 0.0
    assert sol.c[1] == pytest.approx(C * r1 / beta, rel=1e-10)
    assert sol.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_unstable_fluid_queue_is_rejected():
    with pytest.raises(NonErgodicError):
        solve_steady_state(_on_off(1.0, 3.0, 2.0, 1.0))


def test_deflated_and_plain_paths_agree():
    spec = build_mfq(homogeneous_system((1, 2, 3), exponential(4.0), "prioritized", 0.1, 0.5))
    a = solve_steady_state(spec, deflate=True)
    b = solve_steady_state(spec, deflate=False)
    for x in (0.1, 1.0, 3.0):
        assert a.density(x) == pytest.approx(b.density(x), rel=1e-9, abs=1e-13)
    assert a.c == pytest.approx(b.c, rel=1e-10)


def test_single_boundary_state_for_table1():
    spec = build_mfq(homogeneous_system((1, 2, 3), exponential(12.0), "global"))
    sol = solve_steady_state(spec)
    c = boundary_mass(sol, spec)
    assert np.count_nonzero(c) == 1 and c[spec.drain_state] > 0
    assert 0 < c.sum() < 1
    assert np.array_equal(c, sol.c)


def _fluid_path_zero_fraction(spec, cycles, rng):
    """Simulate (level, state) directly and return the time fraction at level 0."""
    Q, Qt = spec.Q, spec.Qtilde
    drain = spec.drain_state
    state, level = drain, 0.0
    t_total = t_zero = 0.0
    for _ in range(cycles):
        if state == drain:
            if level > 0:
                t_total += level
                level = 0.0
            rate = -Qt[drain, drain]
            dt = rng.exponential(1 / rate)
            t_total += dt
            t_zero += dt
            probs = np.maximum(Qt[drain], 0) / rate
        else:
            rate = -Q[state, state]
            dt = rng.exponential(1 / rate)
            t_total += dt
            level += dt
            probs = np.maximum(Q[state], 0) / rate
        state = rng.choice(spec.n, p=probs)
    return t_zero / t_total


def test_boundary_mass_matches_fluid_path_simulation():
    spec = build_mfq(homogeneous_system((1.0,), exponential(1.0), [[0.0]]))
    sol = solve_steady_state(spec)
    frac = _fluid_path_zero_fraction(spec, 200_000, np.random.default_rng(4))
    assert sol.c[spec.drain_state] == pytest.approx(1 / 7, rel=1e-10)
    assert frac == pytest.approx(sol.c[spec.drain_state], abs=0.005)


@pytest.mark.parametrize("seed", range(40))
def test_normalization_and_nonnegativity_random(seed):
    system = random_system(np.random.default_rng(100 + seed))
    spec = build_mfq(system)
    sol = solve_steady_state(spec)
    assert sol.total_mass() == pytest.approx(1.0, abs=1e-10)
    assert np.all(sol.c >= 0)
    mean_service = max(s.service.mean for s in system.sources)
    for x in np.linspace(0, 50 * mean_service, 25):
        assert sol.density(x).min() >= -1e-10
