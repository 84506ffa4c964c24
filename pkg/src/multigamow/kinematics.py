"""Free-particle dispersion relations, velocity maps and the mass matrix.

All momenta are radial magnitudes (the angular and spin structure is
factored out), so a multiplet of N particles is just an array of N scalars.
Units are hbar = c = 1.  Complex momenta are allowed; every square root is
the principal branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InputError, MasslessParticleError

__all__ = [
    "Dispersion",
    "ParticleSystem",
    "dispersion_energy",
    "energy_of_velocity",
    "energy_on_front",
    "energy_velocity_gradient",
    "mass_matrix",
    "momentum_of_velocity",
    "velocity_of_momentum",
]


class Dispersion(str, enum.Enum):
    NONRELATIVISTIC = "nonrelativistic"
    RELATIVISTIC = "relativistic"


@dataclass(frozen=True)
class ParticleSystem:
    """N outgoing particles sharing one dispersion law.

    Parameters
    ----------
    masses : sequence of float
        Particle masses, all finite and non-negative.
    dispersion : Dispersion or str
        ``"nonrelativistic"`` (sum of p^2/2m) or ``"relativistic"``
        (sum of sqrt(m^2 + p^2)).
    allow_massless : bool
        Zero masses are only accepted for relativistic dispersion, and only
        when this flag is set.
    """

    masses: tuple[float, ...]
    dispersion: Dispersion = Dispersion.NONRELATIVISTIC
    allow_massless: bool = False

    def __post_init__(self):
        masses = tuple(float(m) for m in np.atleast_1d(np.asarray(self.masses, dtype=float)))
        object.__setattr__(self, "masses", masses)
        try:
            object.__setattr__(self, "dispersion", Dispersion(self.dispersion))
        except ValueError:
            raise InputError(f"unknown dispersion {self.dispersion!r}") from None
        if len(masses) < 1:
            raise InputError("a particle system needs at least one particle")
        m = np.asarray(masses)
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise InputError(f"masses must be finite and non-negative, got {masses}")
        if np.any(m == 0):
            if self.dispersion is Dispersion.NONRELATIVISTIC:
                raise InputError("zero mass is not allowed with nonrelativistic dispersion")
            if not self.allow_massless:
                raise InputError("zero mass requires allow_massless=True")

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def m(self) -> np.ndarray:
        return np.asarray(self.masses)

    @property
    def relativistic(self) -> bool:
        return self.dispersion is Dispersion.RELATIVISTIC

    @property
    def has_massless(self) -> bool:
        return bool(np.any(self.m == 0))

    @property
    def threshold(self) -> float:
        """Smallest energy the system can carry (total rest mass, or zero)."""
        return float(self.m.sum()) if self.relativistic else 0.0

    def check_length(self, x, what="multiplet") -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1:] != (self.n,):
            raise InputError(f"{what} has length {x.shape[-1:]} but the system has {self.n} particles")
        return x


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def _as_multiplet(system, x, what):
    x = system.check_length(np.asarray(x), what)
    return x.astype(complex) if np.iscomplexobj(x) else x.astype(float)


def dispersion_energy(system: ParticleSystem, p) -> complex | float:
    """Total free energy E_F of the momentum multiplet ``p``.

    Examples
    --------
    >>> dispersion_energy(ParticleSystem((4.0,), "relativistic"), [3.0])
    5.0
    """
    p = _as_multiplet(system, p, "momentum multiplet")
    m = system.m
    if system.relativistic:
        e = np.sqrt(m**2 + p**2).sum(axis=-1)
    else:
        e = (p**2 / (2 * m)).sum(axis=-1)
    return _scalar(e)


def velocity_of_momentum(system: ParticleSystem, p) -> np.ndarray:
    """Group velocities v_n = dE_F/dp_n."""
    p = _as_multiplet(system, p, "momentum multiplet")
    m = system.m
    if system.relativistic:
        return p / np.sqrt(m**2 + p**2)
    return p / m


def momentum_of_velocity(system: ParticleSystem, v) -> np.ndarray:
    """Inverse of :func:`velocity_of_momentum`.

    Raises
    ------
    InputError
        If a massive relativistic particle has real speed ``|v| >= 1``.
    MasslessParticleError
        If the system contains a massless particle (its velocity does not
        determine its momentum).
    """
    v = _as_multiplet(system, v, "velocity multiplet")
    m = system.m
    if not system.relativistic:
        return m * v
    if system.has_massless:
        raise MasslessParticleError("momentum of a massless particle is not a function of its velocity")
    if not np.iscomplexobj(v) and np.any(np.abs(v) >= 1):
        raise InputError(f"relativistic speeds must satisfy |v| < 1, got {v}")
    return m * v / np.sqrt(1 - v**2)


def energy_of_velocity(system: ParticleSystem, v) -> complex | float:
    """E_F written as a function of the velocities."""
    v = _as_multiplet(system, v, "velocity multiplet")
    m = system.m
    if system.relativistic:
        if system.has_massless:
            raise MasslessParticleError("energy of a massless particle is not a function of its velocity")
        e = (m / np.sqrt(1 - v**2)).sum(axis=-1)
    else:
        e = (0.5 * m * v**2).sum(axis=-1)
    return _scalar(e)


def energy_on_front(system: ParticleSystem, r, tau) -> complex | float:
    """E_F(r / tau) evaluated without forming r / tau.

    Relativistically 1 - v^2 is written (tau - r)(tau + r) / tau^2.  Near
    v = 1 the difference tau - r is nearly exact, whereas 1 - (r/tau)^2
    loses about gamma^2 ulps.
    """
    r = _as_multiplet(system, r, "radial multiplet")
    m = system.m
    if system.relativistic:
        if system.has_massless:
            raise MasslessParticleError("energy of a massless particle is not a function of its velocity")
        e = (m * tau / np.sqrt((tau - r) * (tau + r))).sum(axis=-1)
    else:
        e = (0.5 * m * (r / tau) ** 2).sum(axis=-1)
    return _scalar(e)


def energy_velocity_gradient(system: ParticleSystem, v) -> np.ndarray:
    """dE_F/dv_n, i.e. M_nn v_n (m v nonrelativistic, m gamma^3 v relativistic)."""
    v = _as_multiplet(system, v, "velocity multiplet")
    m = system.m
    if system.relativistic:
        return m * v / (1 - v**2) ** 1.5
    return m * v


def mass_matrix(system: ParticleSystem, p) -> tuple[np.ndarray, np.ndarray]:
    """Mass matrix M and its inverse, the Hessian d^2 E_F / dp_n dp_m.

    Both dispersions are sums of one-particle terms, so both matrices are
    diagonal.  Returns ``(M, M_inv)`` as dense ``(N, N)`` arrays.
    """
    p = _as_multiplet(system, p, "momentum multiplet")
    m = system.m
    if system.relativistic:
        if system.has_massless:
            raise MasslessParticleError("the mass matrix diverges for a massless particle")
        e = np.sqrt(m**2 + p**2)
        minv = m**2 / e**3
    else:
        minv = 1.0 / m + 0 * p
    return np.diag(1.0 / minv), np.diag(minv)
