"""Exactly solvable single-particle resonances of an s-wave delta shell.

The potential lambda * delta(r - a), written through g = 2 m lambda, is
transparent enough that every object of the single-particle Gamow theory
is elementary: the pole condition, the Gamow state, the outgoing Green's
function and its pseudo-norm.  This module is the reference against which
the multi-particle machinery is checked at N = 1.

Radial functions here are the 3D s-wave functions u(r) (not r u(r)); the
measure 4 pi r^2 is applied explicitly where integrals appear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError
from .kinematics import ParticleSystem
from .pseudo_norm import ReducedState, StateKind
from .quadrature import integrate

__all__ = [
    "ShellResonance",
    "find_pole",
    "gamow_state",
    "gamow_u",
    "green_function",
    "pole_function",
    "pseudo_norm_1p",
    "residue_check",
    "system_of",
]

POLE_TOL = 1e-12
MAX_ITER = 100


def pole_function(k, g: float, a: float):
    """exp(2 i k a) - 1 + 2 i k / g; zero at the outgoing-wave poles."""
    return np.exp(2j * k * a) - 1 + 2j * k / g


@dataclass(frozen=True)
class ShellResonance:
    g: float
    a: float
    m: float
    k_pole: complex
    branch: int

    @property
    def energy(self) -> complex:
        """Complex resonance energy E_D = k^2 / 2m."""
        return self.k_pole**2 / (2 * self.m)

    @property
    def e0(self) -> float:
        return self.energy.real

    @property
    def gamma(self) -> float:
        return -2 * self.energy.imag

    @property
    def residual(self) -> float:
        return abs(pole_function(self.k_pole, self.g, self.a))

    @property
    def outer_amplitude(self) -> complex:
        """C in u = C exp(ikr)/r outside the shell."""
        k, a = self.k_pole, self.a
        return np.sin(k * a) * np.exp(-1j * k * a)


def find_pole(g: float, a: float, m: float = 1.0, branch: int = 1) -> ShellResonance:
    """Resonance pole of branch ``branch`` by complex Newton from k = branch * pi / a.

    Raises
    ------
    ConvergenceError
        If Newton stalls, or lands on a root with Im k >= 0.
    """
    if not (g > 0 and a > 0 and m > 0):
        raise InputError("need g > 0, a > 0, m > 0")
    if int(branch) != branch or branch < 1:
        raise InputError("branch must be a positive integer")
    k = branch * np.pi / a + 0j
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(MAX_ITER):
            f = pole_function(k, g, a)
            df = 2j * a * np.exp(2j * k * a) + 2j / g
            step = f / df
            k -= step
            if not np.isfinite(k):
                raise ConvergenceError(f"pole search diverged (g={g}, a={a}, branch={branch})")
            if abs(step) <= 1e-15 * abs(k) and abs(pole_function(k, g, a)) <= POLE_TOL:
                break
        else:
            if not abs(pole_function(k, g, a)) <= POLE_TOL:
                raise ConvergenceError(f"pole search did not converge (g={g}, a={a}, branch={branch})")
    if k.imag >= 0:
        raise ConvergenceError(f"root k={k} is not a decaying resonance (Im k >= 0)")
    return ShellResonance(float(g), float(a), float(m), complex(k), int(branch))


def gamow_u(res: ShellResonance, r):
    """Gamow state: sin(kr)/r inside the shell, C exp(ikr)/r outside."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InputError("the Gamow state is evaluated at r > 0")
    k = res.k_pole
    inside = np.sin(k * r) / r
    outside = res.outer_amplitude * np.exp(1j * k * r) / r
    out = np.where(r <= res.a, inside, outside)
    return out.item() if out.ndim == 0 else out


def gamow_state(res: ShellResonance) -> ReducedState:
    """The Gamow state as a one-particle :class:`ReducedState`.

    The shell radius is registered as a break point (in travel time at the
    real part of the resonance energy) so quadrature panels never straddle
    the kink.
    """
    tau_shell = res.a * np.sqrt(res.m / (2 * res.e0))
    return ReducedState(lambda r: gamow_u(res, r[:, 0]), res.energy, 1, StateKind.CUSTOM,
                        tau_breaks=(tau_shell,))


def system_of(res: ShellResonance) -> ParticleSystem:
    return ParticleSystem((res.m,))


def _norm_inside(res):
    k, a = res.k_pole, res.a
    return a / 2 - np.sin(2 * k * a) / (4 * k)


def pseudo_norm_1p(res: ShellResonance, radius: float, method: str = "analytic") -> complex:
    """Single-particle pseudo-norm at cutoff radius ``radius``.

        4 pi int_0^R u^2 r^2 dr + (i / 2k) 4 pi R^2 u(R)^2

    ``method="analytic"`` uses elementary antiderivatives of sin^2 and
    exp(2ikr); ``method="quadrature"`` integrates u^2 r^2 with composite
    Gauss-Legendre panels split at the shell.  Both keep the explicit R
    dependence, so the R-independence of the result is a genuine check.
    """
    if radius <= res.a:
        raise InputError("the cutoff radius must lie outside the shell")
    k, a, c = res.k_pole, res.a, res.outer_amplitude
    if method == "analytic":
        inner = _norm_inside(res)
        outer = c**2 * (np.exp(2j * k * radius) - np.exp(2j * k * a)) / (2j * k)
        vol = 4 * np.pi * (inner + outer)
    elif method == "quadrature":
        width = np.pi / (4 * abs(k))
        f = lambda r: gamow_u(res, r) ** 2 * r**2  # noqa: E731
        vol = 4 * np.pi * integrate(f, 0.0, radius, width, breaks=(a,))
    else:
        raise InputError(f"unknown method {method!r}")
    surf = 4 * np.pi * radius**2 * gamow_u(res, radius) ** 2 / (2 * k)
    return complex(vol + 1j * surf)


def _regular(k, g, a, r):
    """Regular solution r u(r): sin(kr) inside, matched across the shell."""
    beta = g / k * np.sin(k * a)
    return np.where(r <= a, np.sin(k * r), np.sin(k * r) + beta * np.sin(k * (r - a)))


def _outgoing(k, g, a, r):
    """Outgoing solution r u(r): exp(ikr) outside, matched across the shell."""
    return np.where(r >= a, np.exp(1j * k * r), np.exp(1j * k * r) - g / k * np.exp(1j * k * a) * np.sin(k * (r - a)))


def green_function(g: float, a: float, m: float, energy, r, r_prime):
    """Outgoing s-wave Green's function of (E - H) G = delta^3(x - x').

    G(r, r') = 2m / (4 pi r r') * phi(r_<) f(r_>) / W with phi the regular
    and f the outgoing solution, W = phi f' - phi' f their Wronskian.  The
    wavenumber is the principal sqrt(2 m E).  ``g = 0`` gives the free
    particle.
    """
    if not np.isfinite(complex(energy)):
        raise InputError("energy must be finite")
    k = np.sqrt(2 * m * complex(energy))
    r = np.asarray(r, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)
    if np.any(r <= 0) or np.any(r_prime <= 0):
        raise InputError("radii must be positive")
    shell = 0j if g == 0 else g * np.sin(k * a) * np.exp(1j * k * a)
    wronskian = -k - shell
    # the two terms cancel at a pole; compare against their size
    if abs(wronskian) <= 1e-12 * (abs(k) + abs(shell)):
        raise ConvergenceError(f"energy {energy} sits on a pole of the Green's function")
    lo = np.minimum(r, r_prime)
    hi = np.maximum(r, r_prime)
    out = 2 * m / (4 * np.pi * r * r_prime) * _regular(k, g, a, lo) * _outgoing(k, g, a, hi) / wronskian
    return out.item() if np.ndim(out) == 0 else out


def _contour_radius(res):
    e = res.energy
    gaps = []
    for b in (res.branch - 1, res.branch + 1):
        if b >= 1:
            try:
                gaps.append(abs(find_pole(res.g, res.a, res.m, b).energy - e))
            except ConvergenceError:
                pass
    return min([res.gamma / 4] + [d / 4 for d in gaps])


def residue_check(res: ShellResonance, r: float, r_prime: float, radius: float | None = None,
                  nodes: int = 64) -> tuple[complex, complex]:
    """Residue of the Green's function at E_D next to u(r) u(r') / N.

    The residue is the trapezoid rule on a circle of ``radius`` around E_D
    (default min(Gamma/4, distance to the neighbouring poles / 4)).  The
    pseudo-norm is taken at R = 5a.
    """
    if radius is None:
        radius = _contour_radius(res)
    e = res.energy
    theta = 2 * np.pi * np.arange(nodes) / nodes
    offsets = radius * np.exp(1j * theta)
    for b in (res.branch - 1, res.branch + 1):
        if b >= 1:
            try:
                other = find_pole(res.g, res.a, res.m, b).energy
            except ConvergenceError:
                continue
            if abs(other - e) <= radius:
                raise InputError("the residue contour encloses more than one pole")
    vals = np.array([green_function(res.g, res.a, res.m, e + d, r, r_prime) for d in offsets])
    residue = complex(np.mean(vals * offsets))
    factorized = complex(gamow_u(res, r) * gamow_u(res, r_prime) / pseudo_norm_1p(res, 5 * res.a))
    return residue, factorized
