"""Stationary-phase momenta and the leading-edge time factor of a decay.

The outgoing multi-particle wave is dominated at large radii by the
momentum multiplet whose velocities are ``r / tau``.  Linearizing the
action p_s . r in the energy around a narrow resonance turns the energy
integral into a pole integral whose value is a causal step at t = tau0.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, GamowError, InputError, UnderResolvedError
from .kinematics import ParticleSystem, energy_velocity_gradient, mass_matrix
from .quadrature import ORDER, composite_nodes, panel_edges
from .tau_front import ComplexEnergy, as_energy, solve_front, solve_tau

__all__ = [
    "action_energy_derivative",
    "stationary_momenta",
    "velocity_identity_residual",
    "wavefront_factor",
    "wavefront_factor_oracle",
]


def stationary_momenta(r, system: ParticleSystem, energy):
    """Stationary momenta ``p_s`` and action ``S = p_s . r`` at radii ``r``.

    Examples
    --------
    >>> p, s = stationary_momenta([3.0], ParticleSystem((1.0,)), 0.5)
    >>> p, s
    (array([1.]), 3.0)
    """
    front = solve_front(r, system, energy)
    return front.momenta, front.action


def action_energy_derivative(r, system: ParticleSystem, energy: float, h: float = 1e-5):
    """Central-difference dS/dE next to the analytic travel time.

    ``h`` is a relative step: the energy is displaced by ``h * E``.  The
    derivative of the action with respect to energy should equal tau.

    Returns
    -------
    (float, float)
        ``(dS/dE estimate, tau)``.

    Raises
    ------
    ConvergenceError
        If the step leaves the physical region or the half-step estimate
        disagrees with the full step by more than 1e-4 relative.
    """
    e = as_energy(energy)
    if isinstance(e, complex):
        raise InputError("the action derivative check needs a real energy")
    if not 0 < h < 1:
        raise InputError("relative step h must lie in (0, 1)")

    def central(step):
        de = step * e
        try:
            s_plus = stationary_momenta(r, system, e + de)[1]
            s_minus = stationary_momenta(r, system, e - de)[1]
        except GamowError as exc:
            raise ConvergenceError(f"energy step {de} leaves the solvable region: {exc}") from exc
        return (s_plus - s_minus) / (2 * de)

    full = central(h)
    half = central(0.5 * h)
    if abs(full - half) > 1e-4 * abs(half):
        raise ConvergenceError(f"finite-difference step h={h} is too large (estimates {full}, {half})")
    return full, solve_tau(r, system, e)


def velocity_identity_residual(r, system: ParticleSystem, energy) -> np.ndarray:
    """Componentwise relative residual of r = (sum_k r_k dE/dv_k) grad(tau) M^-1.

    This is the identity that turns the Euler operator r . grad_r into a
    mass-weighted normal derivative on the constant-tau surface.
    """
    front = solve_front(r, system, energy)
    _, minv = mass_matrix(system, front.momenta)
    dedv = energy_velocity_gradient(system, front.velocities)
    rebuilt = np.dot(front.r, dedv) * (front.grad_tau @ minv)
    scale = np.maximum(np.abs(front.r), np.max(np.abs(front.r)) * 1e-300)
    return np.abs(rebuilt - front.r) / scale


def wavefront_factor(t: float, tau0: float, energy) -> complex:
    """Leading-edge time factor exp(-i E_D (t - tau0)) for t >= tau0, zero before.

    Examples
    --------
    >>> wavefront_factor(0.0, 1.0, ComplexEnergy(1.0, 0.2))
    0j
    """
    e = complex(as_energy(energy))
    if e.imag > 0:
        raise InputError("a decaying resonance needs Im(E) <= 0")
    dt = t - tau0
    if dt < 0:
        return 0j
    return complex(np.exp(-1j * e * dt))


def wavefront_factor_oracle(
    t: float,
    tau0: float,
    energy,
    cutoff: float,
    panels: int | None = None,
    order: int = ORDER,
) -> complex:
    """Direct quadrature of the energy integral behind :func:`wavefront_factor`.

    Integrates exp(-i E0 dt) exp(-i x dt) / (x + i Gamma/2) over
    x in [-cutoff, cutoff] with composite Gauss-Legendre panels and divides
    by -2 pi i, the factor produced by closing the contour around the pole.
    Truncation error decays like 1 / (cutoff |t - tau0|).

    Parameters
    ----------
    panels : int, optional
        Number of equal panels.  By default the panel width is
        min(pi / (8 max(1, |dt|)), Gamma / 2).

    Raises
    ------
    UnderResolvedError
        If the node spacing exceeds pi / (4 |dt|).
    """
    en = ComplexEnergy.from_complex(complex(as_energy(energy)))
    if en.gamma <= 0:
        raise InputError("the pole integral needs a positive width")
    if cutoff <= 0:
        raise InputError("cutoff must be positive")
    dt = t - tau0
    if panels is None:
        width = min(np.pi / (8 * max(1.0, abs(dt))), 0.5 * en.gamma)
        edges = panel_edges(-cutoff, cutoff, width, breaks=(0.0,))
    else:
        edges = np.linspace(-cutoff, cutoff, panels + 1)
    x, w = composite_nodes(edges, order)
    spacing = np.max(np.diff(edges)) / order * 2
    if dt != 0 and spacing > np.pi / (4 * abs(dt)):
        raise UnderResolvedError(
            f"node spacing {spacing:.3g} cannot resolve oscillation at |t - tau0| = {abs(dt):.3g}"
        )
    integrand = np.exp(-1j * x * dt) / (x + 0.5j * en.gamma)
    total = np.sum(integrand * w)
    return complex(np.exp(-1j * en.e0 * dt) * total / (-2j * np.pi))
