"""Wavefront travel time tau(r, E) and the geometry of constant-tau fronts.

For a radial multiplet ``r`` the travel time tau is fixed by requiring that
the constant velocities ``r / tau`` carry total free energy ``E``.  tau is
homogeneous of degree one in ``r``; the wavefront of a decaying state is a
level set of tau.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BelowThresholdError, ConvergenceError, InputError, MasslessParticleError
from .kinematics import (
    ParticleSystem,
    energy_on_front,
    energy_velocity_gradient,
    momentum_of_velocity,
)

__all__ = [
    "ComplexEnergy",
    "FrontSolution",
    "as_energy",
    "front_directions",
    "front_surface_sample",
    "grad_tau",
    "lorentz_factors",
    "solve_front",
    "solve_tau",
    "tau_implicit",
    "tau_nonrel_closed",
]

MAX_ITER = 200
RESIDUAL_RTOL = 1e-12


@dataclass(frozen=True)
class ComplexEnergy:
    """Resonance energy ``e0 - i gamma / 2``; ``gamma = 0`` is a real energy."""

    e0: float
    gamma: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.e0) or not np.isfinite(self.gamma):
            raise InputError("energy must be finite")
        if self.gamma < 0:
            raise InputError(f"width must be non-negative, got {self.gamma}")

    @classmethod
    def from_complex(cls, e) -> "ComplexEnergy":
        e = complex(e)
        return cls(e.real, -2.0 * e.imag)

    @property
    def is_real(self) -> bool:
        return self.gamma == 0.0

    def value(self) -> complex | float:
        if self.is_real:
            return float(self.e0)
        return complex(self.e0, -0.5 * self.gamma)

    def __complex__(self):
        return complex(self.value())


def as_energy(energy) -> complex | float:
    """Plain number from a ComplexEnergy, complex or float (real if Im == 0)."""
    if isinstance(energy, ComplexEnergy):
        return energy.value()
    e = complex(energy)
    return e.real if e.imag == 0 else e


def _radial(system: ParticleSystem, r) -> np.ndarray:
    r = np.asarray(system.check_length(np.asarray(r, dtype=float), "radial point"), dtype=float)
    if r.ndim != 1:
        raise InputError("radial point must be one-dimensional")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise InputError(f"radial coordinates must be finite and >= 0, got {r}")
    if not np.any(r > 0):
        raise InputError("at least one radial coordinate must be positive")
    return r


def _check_energy(system: ParticleSystem, e):
    if system.relativistic and system.has_massless:
        raise MasslessParticleError(
            "a massless particle has no finite-tau front equation (its coordinate is unconstrained)"
        )
    if np.real(e) <= system.threshold:
        raise BelowThresholdError(
            f"energy {e} is not above the threshold {system.threshold} of the system"
        )


def _residual(system, r, tau, e) -> float:
    return abs(energy_on_front(system, r, tau) - e)


def _acceptable(system, r, tau, e) -> bool:
    """Residual within 1e-12 |E|, or within what one ulp of tau can resolve.

    Near max r the relativistic front is so stiff that |dE/dtau| ulp(tau)
    exceeds 1e-12 |E|; the correctly rounded tau is then the best answer.
    """
    slope = abs(np.dot(energy_velocity_gradient(system, r / tau), r)) / abs(tau) ** 2
    floor = 2 * slope * np.spacing(abs(tau))
    return _residual(system, r, tau, e) <= max(RESIDUAL_RTOL * abs(e), floor)


def tau_nonrel_closed(r, system: ParticleSystem, energy) -> complex | float:
    """Closed-form nonrelativistic travel time sqrt(sum(m r^2 / 2) / E).

    Complex energies give a complex tau on the principal branch, which
    always has a positive real part when Re(E) > 0.
    """
    if system.relativistic:
        raise InputError("the closed-form travel time only holds for nonrelativistic dispersion")
    e = as_energy(energy)
    r = _radial(system, r)
    _check_energy(system, e)
    tau = np.sqrt(0.5 * np.sum(system.m * r**2) / e)
    return tau.item()


def _bracket_real(system, r, e):
    """(lo, hi) with E_F(r/lo) > e > E_F(r/hi)."""
    f = lambda t: energy_on_front(system, r, t) - e  # noqa: E731
    rmax = r.max()
    hi = 2.0 * rmax
    for _ in range(MAX_ITER):
        if f(hi) < 0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("could not bracket the travel time from above")
    if system.relativistic:
        lo = rmax * (1 + 1e-12)
    else:
        lo = hi
        for _ in range(MAX_ITER):
            lo *= 0.5
            if f(lo) > 0:
                break
        else:
            raise ConvergenceError("could not bracket the travel time from below")
    return lo, hi


def _polish(system, r, e, tau, ulps=8):
    # near max r the residual swings by many ulps of E per ulp of tau
    cands = [tau]
    lo = hi = tau
    for _ in range(ulps):
        lo, hi = np.nextafter(lo, -np.inf), np.nextafter(hi, np.inf)
        cands += [lo, hi]
    return min(cands, key=lambda t: _residual(system, r, t, e) if t > np.max(r) else np.inf)


def _newton_real(system, r, e):
    return _polish(system, r, e, _newton_core(system, r, e))


def _newton_core(system, r, e):
    lo, hi = _bracket_real(system, r, e)
    tol = 0.1 * RESIDUAL_RTOL * abs(e)
    tau = hi
    for _ in range(MAX_ITER):
        v = r / tau
        f = energy_on_front(system, r, tau) - e
        if abs(f) <= tol:
            return tau
        if f > 0:
            lo = tau
        else:
            hi = tau
        df = -np.dot(energy_velocity_gradient(system, v), r) / tau**2
        step = tau - f / df if df != 0 else np.nan
        if not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if step == tau or hi - lo <= 4 * np.spacing(hi):
            return step
        tau = step
    raise ConvergenceError(f"travel time did not converge in {MAX_ITER} iterations")


def _newton_complex(system, r, e, tau):
    tol = 0.1 * RESIDUAL_RTOL * abs(e)
    best = None
    for _ in range(MAX_ITER):
        v = r / tau
        f = energy_on_front(system, r, tau) - e
        if best is None or abs(f) < best[0]:
            best = (abs(f), tau)
        if abs(f) <= tol:
            return tau
        df = -np.dot(energy_velocity_gradient(system, v), r) / tau**2
        new = tau - f / df
        if new == tau:
            break
        tau = new
    return best[1]


def tau_implicit(r, system: ParticleSystem, energy) -> complex | float:
    """Travel time from the implicit condition E_F(r / tau) = E.

    Works for either dispersion.  Real energies use a bracketed Newton
    iteration with bisection fallback; complex energies run complex Newton
    seeded at the real-part solution, continuing in Im(E) if needed.

    Raises
    ------
    BelowThresholdError
        If Re(E) does not exceed the rest-mass threshold.
    ConvergenceError
        If the residual |E_F(r/tau) - E| stays above 1e-12 |E| and above
        what a two-ulp change of tau can resolve on a stiff front.
    """
    e = as_energy(energy)
    r = _radial(system, r)
    _check_energy(system, e)
    tau = _newton_real(system, r, float(np.real(e)))
    if isinstance(e, complex):
        for steps in (1, 4, 16, 64):
            t = complex(tau)
            for j in range(1, steps + 1):
                t = _newton_complex(system, r, complex(e.real, e.imag * j / steps), t)
            if t.real > 0 and _acceptable(system, r, t, e):
                tau = t
                break
        else:
            raise ConvergenceError(f"complex travel time did not converge for E = {e}")
    if not _acceptable(system, r, tau, e):
        raise ConvergenceError(f"travel time residual too large for E = {e}")
    return tau


def solve_tau(r, system: ParticleSystem, energy) -> complex | float:
    """Travel time using the closed form when one exists."""
    if system.relativistic:
        return tau_implicit(r, system, energy)
    return tau_nonrel_closed(r, system, energy)


def grad_tau(r, system: ParticleSystem, energy, tau=None) -> tuple[np.ndarray, complex | float]:
    """Gradient of tau with respect to the radii, and its length T.

    From implicit differentiation of E_F(r/tau) = E,
    d tau / d r_n = (dE_F/dv_n) / sum_k (dE_F/dv_k) v_k.  T is the
    principal square root of sum (d tau / d r_n)^2, complex for complex E.
    """
    r = _radial(system, r)
    if tau is None:
        tau = solve_tau(r, system, energy)
    v = r / tau
    dedv = energy_velocity_gradient(system, v)
    grad = dedv / np.dot(dedv, v)
    t_norm = np.sqrt(np.sum(grad**2))
    return grad, t_norm.item()


def lorentz_factors(r, tau, system: ParticleSystem) -> np.ndarray:
    """Per-particle factors 1 / sqrt(1 - (r_n / tau)^2), so E = sum m_n rho_n."""
    if not system.relativistic:
        raise InputError("Lorentz factors are only defined for relativistic dispersion")
    r = np.asarray(system.check_length(np.asarray(r, dtype=float), "radial point"))
    if np.isreal(tau) and np.any(r >= np.real(tau)):
        raise InputError("real tau requires r_n < tau for every particle")
    return 1.0 / np.sqrt(1 - (r / tau) ** 2)


@dataclass(frozen=True)
class FrontSolution:
    """Everything attached to one point of a constant-tau front."""

    r: np.ndarray
    energy: complex | float
    tau: complex | float
    velocities: np.ndarray
    momenta: np.ndarray
    action: complex | float
    grad_tau: np.ndarray
    t_norm: complex | float
    rho: np.ndarray | None = field(default=None)


def solve_front(r, system: ParticleSystem, energy) -> FrontSolution:
    """Travel time, stationary momenta, action p.r and gradient data at ``r``."""
    e = as_energy(energy)
    r = _radial(system, r)
    tau = solve_tau(r, system, e)
    v = r / tau
    p = momentum_of_velocity(system, v)
    grad, t_norm = grad_tau(r, system, e, tau=tau)
    rho = lorentz_factors(r, tau, system) if system.relativistic else None
    action = np.dot(p, r).item()
    return FrontSolution(r, e, tau, v, p, action, grad, t_norm, rho)


def front_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Unit directions in the closed positive orthant, shape ``(count, n)``.

    Two particles get an evenly spaced angle grid including both axes;
    three or more get seeded random directions (abs of Gaussian vectors).
    """
    if count < 1:
        raise InputError("count must be positive")
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        phi = np.linspace(0.0, 0.5 * np.pi, count)
        return np.column_stack([np.cos(phi), np.sin(phi)])
    w = np.abs(np.random.default_rng(seed).standard_normal((count, n)))
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def front_surface_sample(system: ParticleSystem, energy, tau_r: float, count: int, seed: int = 0):
    """Points of the front tau(r) = tau_r in the positive orthant.

    Returns ``(points, residuals)`` with ``points`` of shape ``(count, N)``
    and ``residuals`` the values |tau(point) - tau_r| recomputed by the
    travel-time solver.
    """
    e = as_energy(energy)
    if isinstance(e, complex):
        raise InputError("front sampling needs a real energy")
    if not tau_r > 0:
        raise InputError("tau_r must be positive")
    _check_energy(system, e)
    omega = front_directions(system.n, count, seed)
    m = system.m
    if not system.relativistic:
        points = tau_r * np.sqrt(2 * e / m) * omega
    else:
        points = np.empty_like(omega)
        for i, w in enumerate(omega):
            s_max = tau_r / w.max()
            g = lambda s: energy_on_front(system, s * w, tau_r) - e  # noqa: E731
            s = brentq(g, 0.0, s_max * (1 - 1e-15), xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)
            points[i] = s * w
    residuals = np.array([abs(solve_tau(p, system, e) - tau_r) for p in points])
    return points, residuals
