import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multigamow.errors import BelowThresholdError, InputError, MasslessParticleError
from multigamow.kinematics import ParticleSystem, energy_of_velocity, energy_on_front
from multigamow.tau_front import (
    ComplexEnergy,
    front_surface_sample,
    grad_tau,
    lorentz_factors,
    solve_front,
    solve_tau,
    tau_implicit,
    tau_nonrel_closed,
)

NONREL = "nonrelativistic"
REL = "relativistic"


def residual(system, r, tau, e):
    return abs(energy_on_front(system, r, tau) - e)


def test_complex_energy_value():
    e = ComplexEnergy(2.0, 0.4)
    assert e.value() == complex(2.0, -0.2)
    assert ComplexEnergy(3.0).value() == 3.0
    assert ComplexEnergy.from_complex(2 - 0.2j) == e
    with pytest.raises(InputError):
        ComplexEnergy(1.0, -0.1)


@pytest.mark.parametrize(
    "masses, r, e, expected",
    [((1.0, 1.0), (1.0, 1.0), 1.0, 1.0), ((2.0,), (3.0,), 4.0, 1.5)],
)
def test_tau_closed_examples(masses, r, e, expected):
    assert tau_nonrel_closed(r, ParticleSystem(masses), e) == pytest.approx(expected, rel=1e-15)


def test_tau_closed_complex_energy():
    system = ParticleSystem((1.0, 3.0))
    e = 2 - 0.1j
    tau = tau_nonrel_closed([2.0, 1.0], system, e)
    assert tau == pytest.approx(np.sqrt(3.5 / e), rel=1e-15)
    assert tau.real > 0
    assert residual(system, [2.0, 1.0], tau, e) <= 1e-12 * abs(e)


def test_tau_implicit_relativistic_single_particle():
    # E = m gamma with gamma = 2 -> v = sqrt(3)/2 -> tau = r / v
    tau = tau_implicit([1.0], ParticleSystem((1.0,), REL), 2.0)
    assert tau == pytest.approx(2 / np.sqrt(3), rel=1e-14)


def test_threshold_energy_rejected():
    with pytest.raises(BelowThresholdError):
        tau_implicit([1.0, 1.0], ParticleSystem((1.0, 1.0), REL), 2.0)
    with pytest.raises(BelowThresholdError):
        tau_nonrel_closed([1.0], ParticleSystem((1.0,)), -1.0)


def test_bad_radii_rejected():
    with pytest.raises(InputError):
        solve_tau([0.0, 0.0], ParticleSystem((1.0, 1.0)), 1.0)
    with pytest.raises(InputError):
        solve_tau([-1.0, 1.0], ParticleSystem((1.0, 1.0)), 1.0)


def test_massless_particle_is_rejected_by_solver():
    system = ParticleSystem((0.0, 1.0), REL, allow_massless=True)
    with pytest.raises(MasslessParticleError):
        tau_implicit([1.0, 1.0], system, 3.0)


def test_zero_radius_contributes_rest_mass_only():
    rel = ParticleSystem((1.0, 2.0), REL)
    tau = tau_implicit([1.0, 0.0], rel, 4.0)
    # particle 1 carries E - m2 = 2 -> gamma 2
    assert tau == pytest.approx(2 / np.sqrt(3), rel=1e-13)
    assert tau_nonrel_closed([3.0, 0.0], ParticleSystem((1.0, 5.0)), 0.5) == pytest.approx(3.0)


@pytest.mark.parametrize("complex_energy", [False, True])
def test_implicit_matches_closed_form(complex_energy):
    rng = np.random.default_rng(10)
    for _ in range(100):
        n = rng.integers(1, 5)
        system = ParticleSystem(rng.uniform(0.1, 5.0, n))
        r = rng.uniform(0.0, 10.0, n)
        r[0] += 0.1
        e = rng.uniform(0.1, 10.0)
        if complex_energy:
            e = complex(e, -rng.uniform(0, 0.1) * e)
        a, b = tau_implicit(r, system, e), tau_nonrel_closed(r, system, e)
        assert abs(a - b) <= 1e-10 * abs(b)
        assert residual(system, r, a, e) <= 1e-12 * abs(e)


@pytest.mark.parametrize("dispersion", [NONREL, REL])
def test_homogeneity(dispersion):
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = rng.integers(1, 5)
        system = ParticleSystem(rng.uniform(0.1, 5.0, n), dispersion)
        r = rng.uniform(0.1, 10.0, n)
        e = system.threshold * rng.uniform(1.05, 3.0) if system.relativistic else rng.uniform(0.1, 10)
        tau = solve_tau(r, system, e)
        for lam in (0.5, 2.0, 10.0):
            assert abs(solve_tau(lam * r, system, e) - lam * tau) <= 1e-10 * lam * abs(tau)


def test_relativistic_complex_energy_residual():
    system = ParticleSystem((1.0, 2.0, 0.5), REL)
    r = np.array([1.0, 2.0, 0.3])
    e = 6.0 - 0.2j
    tau = tau_implicit(r, system, e)
    assert tau.real > 0
    assert residual(system, r, tau, e) <= 1e-12 * abs(e)


def test_monotone_energy_in_tau():
    system = ParticleSystem((1.0, 3.0), REL)
    r = np.array([2.0, 1.0])
    taus = r.max() * (1 + np.geomspace(1e-9, 1e3, 400))
    energies = np.array([energy_of_velocity(system, r / t) for t in taus])
    assert np.all(np.diff(energies) < 0)
    assert energies[-1] == pytest.approx(4.0, rel=1e-5)


def test_stiff_relativistic_front():
    # ultra-relativistic: tau hugs max r
    system = ParticleSystem((1.0, 1.0), REL)
    tau = tau_implicit([1.0, 0.5], system, 200.0)
    assert 1.0 < tau < 1.001
    assert residual(system, [1.0, 0.5], tau, 200.0) <= 1e-12 * 200


def _fd_grad(system, r, e, h=1e-6):
    r = np.asarray(r, float)
    out = []
    for j in range(len(r)):
        d = np.zeros_like(r)
        d[j] = h * max(1.0, r[j])
        out.append((solve_tau(r + d, system, e) - solve_tau(r - d, system, e)) / (2 * d[j]))
    return np.array(out)


def _tau_decimal(masses, r, e):
    # 50-digit bisection reference for the relativistic front
    from decimal import Decimal, getcontext

    getcontext().prec = 50
    ms = [Decimal(m) for m in masses]
    rs = [Decimal(x) for x in r]
    target = Decimal(e)

    def energy(t):
        return sum(m * t / ((t - x) * (t + x)).sqrt() for m, x in zip(ms, rs))

    lo, hi = max(rs), max(rs) * 2 + 1
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (lo, mid) if energy(mid) < target else (mid, hi)
    return float((lo + hi) / 2)


def test_axis_point_of_an_ultrarelativistic_front():
    # gamma ~ 199 on the axis: dE/dtau * ulp(tau) alone exceeds 1e-12 E there,
    # so the solver must return the correctly rounded tau instead of raising
    system = ParticleSystem((1.0, 1.0), REL)
    pts, res = front_surface_sample(system, 200.0, 1.0, 21)
    assert np.all(res <= 1e-10)
    for p in pts:
        tau = tau_implicit(p, system, 200.0)
        exact = _tau_decimal(system.m, p, 200.0)
        assert abs(tau - exact) <= 2 * np.spacing(exact)
        slope = abs(np.dot(system.m * (p / tau) ** 2 * (1 - (p / tau) ** 2) ** -1.5, [1, 1])) / tau
        assert residual(system, p, tau, 200.0) <= max(1e-12 * 200.0, 2 * slope * np.spacing(tau))


def test_grad_tau_examples():
    g, t = grad_tau([1.0, 1.0], ParticleSystem((1.0, 1.0)), 1.0)
    np.testing.assert_allclose(g, _fd_grad(ParticleSystem((1.0, 1.0)), [1.0, 1.0], 1.0), rtol=1e-8)
    np.testing.assert_allclose(g, [0.5, 0.5], rtol=1e-14)
    assert t == pytest.approx(1 / np.sqrt(2), rel=1e-14)

    g, t = grad_tau([3.0], ParticleSystem((1.0,)), 0.5)
    assert g == pytest.approx([1.0]) and t == pytest.approx(1.0)

    rel = ParticleSystem((1.0,), REL)
    g, _ = grad_tau([1.0], rel, 2.0)
    assert g[0] == pytest.approx(_fd_grad(rel, [1.0], 2.0)[0], rel=1e-7)
    assert g[0] == pytest.approx(2 / np.sqrt(3), rel=1e-13)


@pytest.mark.parametrize("dispersion", [NONREL, REL])
def test_grad_tau_matches_finite_differences(dispersion):
    rng = np.random.default_rng(12)
    for _ in range(30):
        n = rng.integers(1, 5)
        system = ParticleSystem(rng.uniform(0.1, 5.0, n), dispersion)
        r = rng.uniform(0.5, 10.0, n)
        e = system.threshold * rng.uniform(1.05, 3.0) if system.relativistic else rng.uniform(0.1, 10)
        g, _ = grad_tau(r, system, e)
        fd = np.array([
            (tau_implicit(r + d, system, e) - tau_implicit(r - d, system, e)) / (2 * d.max())
            for d in np.eye(n) * 1e-5 * np.maximum(1.0, r)
        ])
        assert np.max(np.abs(fd - g) / np.abs(g)) <= 1e-6


def test_complex_grad_tau_nonrel_closed_form():
    system = ParticleSystem((1.0, 3.0))
    r = np.array([2.0, 1.0])
    e = 2 - 0.1j
    g, t = grad_tau(r, system, e)
    tau = np.sqrt(3.5 / e)
    np.testing.assert_allclose(g, system.m * r / (2 * e * tau), rtol=1e-14)
    assert t == pytest.approx(np.sqrt(np.sum(g**2)))


def test_front_surface_nonrel_circle():
    pts, res = front_surface_sample(ParticleSystem((1.0, 1.0)), 1.0, 1.0, 25)
    np.testing.assert_allclose(np.sum(pts**2, axis=1), 2.0, rtol=0, atol=1e-10)
    assert np.all(res <= 1e-10)
    np.testing.assert_allclose(pts[0], [np.sqrt(2), 0.0], atol=1e-15)
    assert np.all(pts >= 0)


def test_front_surface_relativistic():
    system = ParticleSystem((1.0, 1.0), REL)
    pts, res = front_surface_sample(system, 4.0, 1.0, 41)
    assert np.all(res <= 1e-10)
    assert np.all(pts < 1.0)
    for p in pts:
        rho = lorentz_factors(p, 1.0, system)
        assert abs(np.dot(system.m, rho) - 4.0) <= 1e-12 * 4.0


def test_front_surface_three_particles_is_deterministic():
    system = ParticleSystem((1.0, 2.0, 3.0))
    a, ra = front_surface_sample(system, 2.0, 1.5, 10, seed=4)
    b, _ = front_surface_sample(system, 2.0, 1.5, 10, seed=4)
    assert np.array_equal(a, b)
    assert np.all(ra <= 1e-10)
    np.testing.assert_allclose(0.5 * (system.m * a**2).sum(axis=1), 2.0 * 1.5**2, rtol=1e-13)


def test_front_surface_rejects_complex_energy():
    with pytest.raises(InputError):
        front_surface_sample(ParticleSystem((1.0,)), 1 - 0.1j, 1.0, 3)


def test_lorentz_factors():
    system = ParticleSystem((1.0, 1.0), REL)
    np.testing.assert_allclose(lorentz_factors([0.0, 0.0], 3.0, system), [1.0, 1.0])
    assert lorentz_factors([1.0], 2 / np.sqrt(3), ParticleSystem((1.0,), REL))[0] == pytest.approx(2.0)
    with pytest.raises(InputError):
        lorentz_factors([2.0, 0.0], 1.0, system)
    with pytest.raises(InputError):
        lorentz_factors([0.5], 1.0, ParticleSystem((1.0,)))


def test_front_solution_fields():
    system = ParticleSystem((1.0, 2.0), REL)
    front = solve_front([1.0, 2.0], system, 5.0)
    assert abs(np.dot(system.m, front.rho) - 5.0) <= 1e-12 * 5
    assert front.action == pytest.approx(np.dot(front.momenta, [1.0, 2.0]))
    assert front.tau > 0


@settings(max_examples=100, deadline=None)
@given(
    masses=st.lists(st.floats(0.1, 10.0), min_size=1, max_size=4),
    scale=st.floats(0.1, 100.0),
    excess=st.floats(0.05, 5.0),
    relativistic=st.booleans(),
    data=st.data(),
)
def test_residual_property(masses, scale, excess, relativistic, data):
    n = len(masses)
    r = np.array(data.draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))) * scale
    system = ParticleSystem(masses, REL if relativistic else NONREL)
    e = system.threshold * (1 + excess) if relativistic else excess
    tau = tau_implicit(r, system, e)
    assert tau > 0
    if relativistic and lorentz_factors(r, tau, system).max() > 20:
        # too stiff for 1e-12 in double precision; demand the correctly rounded tau
        exact = _tau_decimal(masses, r, e)
        assert abs(tau - exact) <= 2 * np.spacing(exact)
    else:
        assert residual(system, r, tau, e) <= 1e-12 * e
