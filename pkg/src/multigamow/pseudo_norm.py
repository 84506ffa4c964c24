"""Pseudo-norm of s-wave reduced multi-particle Gamow states.

The pseudo-norm is the regularized square integral

    N(tau_R) = int_{tau < tau_R} u^2 d^{3N}x + i oint_{tau = tau_R} u^2 / w d^{3N-1}x

with w = 2 T <grad_p E_F | M | grad_p E_F> evaluated at the complex
resonance energy.  States are reduced to functions of the radii r_n only,
so d^{3N}x becomes prod(4 pi r_n^2) d^N r.

Volumes are integrated in coarea form: a composite Gauss-Legendre rule in
tau, times a tensor Gauss-Legendre rule over directions in the positive
orthant.  A direction omega is mapped to the front tau = tau' by
r = tau' * rho(omega) * omega with rho(omega) = 1 / tau(omega), which is
exact because tau is homogeneous of degree one.  The front geometry uses
the real part of the energy; the weight w uses the full complex energy.

The surface term enters with +i: that is the sign for which the volume
and surface contributions cancel as tau_R grows (for one particle the sum
is exactly independent of the radius).
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConvergenceError, InputError, UnderResolvedError
from .kinematics import ParticleSystem, mass_matrix
from .quadrature import ORDER, composite_nodes, gauss_legendre, panel_edges
from .tau_front import as_energy, grad_tau, solve_front, solve_tau

__all__ = [
    "NormScan",
    "ReducedState",
    "StateKind",
    "norm_convergence_scan",
    "orthant_directions",
    "partition_state",
    "partition_state_eval",
    "pseudo_norm",
    "separable_state",
    "surface_integral",
    "surface_weight",
    "volume_integral",
    "weight_nonrel_closed",
]

DEFAULT_INNER_CUTOFF = 1e-3
ANGULAR_PANELS = 4


class StateKind(str, enum.Enum):
    SEPARABLE_PRODUCT = "separable"
    PARTITION_INTEGRAL = "partition"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ReducedState:
    """An s-wave reduced state u(r_1, ..., r_N).

    ``evaluator`` maps an ``(M, N)`` array of radii to ``M`` complex values.
    The measure prod(4 pi r_n^2) is never part of the state; integrators
    apply it.  ``tau_breaks`` lists travel times (at the real part of the
    energy) where u is not smooth, and ``inner_cutoff`` the fraction of
    tau_R excluded around the origin.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    energy: complex
    n: int
    kind: StateKind = StateKind.CUSTOM
    tau_breaks: tuple[float, ...] = ()
    inner_cutoff: float = 0.0

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        single = r.ndim == 1
        out = np.asarray(self.evaluator(np.atleast_2d(r)), dtype=complex)
        return out[0] if single else out


@dataclass
class NormScan:
    """Pseudo-norm and its two parts along an increasing grid of tau_R."""

    tau_grid: np.ndarray
    volume_terms: np.ndarray
    surface_terms: np.ndarray
    norms: np.ndarray
    inner_cutoff: float = 0.0
    meta: dict = field(default_factory=dict)

    def rows(self):
        for t, v, s, n in zip(self.tau_grid, self.volume_terms, self.surface_terms, self.norms):
            yield float(t), complex(v), complex(s), complex(n)


# --- weights -----------------------------------------------------------------


def surface_weight(r, system: ParticleSystem, energy) -> complex | float:
    """w = 2 T <grad_p E_F | M | grad_p E_F> at the stationary point of ``r``.

    For one particle this is 2 k_D, the familiar single-particle weight.
    """
    front = solve_front(r, system, energy)
    m_mat, _ = mass_matrix(system, front.momenta)
    quad = front.velocities @ m_mat @ front.velocities
    return complex(2 * front.t_norm * quad) if np.iscomplexobj(quad) else float(2 * front.t_norm * quad)


def weight_nonrel_closed(r, system: ParticleSystem, energy) -> complex | float:
    """Nonrelativistic weight (2 / tau) sqrt(sum (m_n r_n)^2)."""
    if system.relativistic:
        raise InputError("the closed-form weight only holds for nonrelativistic dispersion")
    tau = solve_tau(r, system, energy)
    r = np.asarray(r, dtype=float)
    return 2.0 / tau * np.sqrt(np.sum((system.m * r) ** 2))


def _weights_nonrel(points, system, e):
    # vectorized weight_nonrel_closed over rows of ``points``
    m = system.m
    tau = np.sqrt(0.5 * np.sum(m * points**2, axis=1) / e)
    return 2.0 / tau * np.sqrt(np.sum((m * points) ** 2, axis=1))


# --- states --------------------------------------------------------------------


def separable_state(wavenumbers, energy=None, amplitude: complex = 1.0) -> ReducedState:
    """Product of outgoing s-waves amplitude * prod exp(i k_n r_n) / r_n."""
    k = np.atleast_1d(np.asarray(wavenumbers, dtype=complex))

    def evaluate(r):
        return amplitude * np.prod(np.exp(1j * k * r) / r, axis=1)

    if energy is None:
        raise InputError("separable_state needs the energy it was built at")
    return ReducedState(evaluate, complex(as_energy(energy)), len(k), StateKind.SEPARABLE_PRODUCT)


def bump_profile(x, lo: float = 0.1, hi: float = 0.9):
    """C-infinity bump supported on [lo, hi], equal to 1 at the midpoint.

    Compact support keeps the energy split away from the ends, where the
    slower particle's wavenumber acquires a large imaginary part and its
    outgoing wave grows much faster than the front.
    """
    x = np.asarray(x, dtype=float)
    z = (2 * x - (lo + hi)) / (hi - lo)
    out = np.zeros_like(x)
    inside = np.abs(z) < 1
    out[inside] = np.exp(1 - 1 / (1 - z[inside] ** 2))
    return out


default_profile = bump_profile


def partition_state_eval(r, system: ParticleSystem, energy, profile=default_profile, min_panels: int = 16):
    """Two-particle outgoing state built by splitting the energy between the particles.

    u(r1, r2) = int_0^E0 g(E1/E0) h(k1, r1) h(k2, r2) dE1 with
    h(k, r) = exp(i k r) / (k r), k1 = sqrt(2 m1 E1), k2 = sqrt(2 m2 (E_D - E1))
    and E0 = Re(E_D).  Every term solves the free equation at the complex
    energy E_D.  The substitution E1 = E0 sin^2(theta) removes the inverse
    square-root endpoint behaviour; each theta panel spans at most half a
    period of the phase k1 r1 + k2 r2.

    ``r`` may be one point ``(2,)`` or an array ``(M, 2)``.
    """
    if system.n != 2:
        raise InputError("partition states are implemented for two particles only")
    if system.relativistic:
        raise InputError("partition states are nonrelativistic")
    e = complex(as_energy(energy))
    e0 = e.real
    if e0 <= 0:
        raise InputError("partition states need Re(E) > 0")
    r = np.asarray(r, dtype=float)
    single = r.ndim == 1
    r = np.atleast_2d(r)
    if np.any(r <= 0):
        raise InputError("partition states are singular on the coordinate axes")
    m1, m2 = system.m
    kmax = np.sqrt(2 * np.array([m1, m2]) * e0)
    span = r @ kmax
    counts = np.maximum(min_panels, np.ceil(span / np.pi)).astype(int)
    out = np.empty(len(r), dtype=complex)
    x, w = gauss_legendre(ORDER)
    for n_pan in np.unique(counts):
        idx = np.flatnonzero(counts == n_pan)
        theta, wt = composite_nodes(np.linspace(0.0, 0.5 * np.pi, n_pan + 1))
        theta, wt = theta.ravel(), wt.ravel()
        s2 = np.sin(theta) ** 2
        k1 = kmax[0] * np.sin(theta)
        k2 = np.sqrt(2 * m2 * (e - e0 * s2))
        kern = profile(s2) * np.sqrt(2 * e0 / m1) * np.cos(theta) / k2 * wt
        for chunk in np.array_split(idx, max(1, len(idx) * n_pan // 4096)):
            r1 = r[chunk, 0:1]
            r2 = r[chunk, 1:2]
            # row sums, not matmul: BLAS kernels vary with batch shape
            vals = np.sum(np.exp(1j * (k1 * r1 + k2 * r2)) * kern, axis=1)
            out[chunk] = vals / (r[chunk, 0] * r[chunk, 1])
    if not np.all(np.isfinite(out)):
        raise ConvergenceError("partition-state quadrature produced non-finite values")
    return out[0] if single else out


def partition_state(system: ParticleSystem, energy, profile=default_profile, min_panels: int = 16,
                    inner_cutoff: float = DEFAULT_INNER_CUTOFF) -> ReducedState:
    """Wrap :func:`partition_state_eval` as a :class:`ReducedState`."""
    partition_state_eval(np.ones(2), system, energy, profile, min_panels)

    def evaluate(r):
        return partition_state_eval(r, system, energy, profile, min_panels)

    return ReducedState(evaluate, complex(as_energy(energy)), 2, StateKind.PARTITION_INTEGRAL,
                        inner_cutoff=inner_cutoff)


# --- geometry --------------------------------------------------------------------


def orthant_directions(n: int, panels: int = ANGULAR_PANELS, order: int = ORDER):
    """Unit directions in the positive orthant with quadrature weights for dOmega.

    Hyperspherical angles in [0, pi/2]^(n-1), composite Gauss-Legendre in
    each.  Returns ``(omega, weights)`` of shapes ``(K, n)`` and ``(K,)``.
    """
    if n == 1:
        return np.ones((1, 1)), np.ones(1)
    nodes, wts = composite_nodes(np.linspace(0, 0.5 * np.pi, panels + 1), order)
    nodes, wts = nodes.ravel(), wts.ravel()
    grids = np.meshgrid(*([nodes] * (n - 1)), indexing="ij")
    wgrid = np.meshgrid(*([wts] * (n - 1)), indexing="ij")
    phi = np.stack([g.ravel() for g in grids], axis=1)
    weight = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    omega = np.ones((len(phi), n))
    for j in range(n - 1):
        omega[:, j] *= np.cos(phi[:, j])
        omega[:, j + 1:] *= np.sin(phi[:, j])[:, None]
        weight *= np.sin(phi[:, j]) ** (n - 2 - j)
    return omega, weight


@dataclass(frozen=True)
class _Shells:
    omega: np.ndarray      # (K, N) directions
    rho: np.ndarray        # (K,) radius of the unit-tau front along omega
    dOmega: np.ndarray     # (K,) angular weights
    rate: float            # |dS/dtau|, phase rate of exp(iS)


def _shells(system, e0, n_ang_panels, energy):
    omega, d_omega = orthant_directions(system.n, n_ang_panels)
    if system.relativistic:
        tau1 = np.array([solve_tau(w, system, e0) for w in omega])
    else:
        tau1 = np.sqrt(0.5 * np.sum(system.m * omega**2, axis=1) / e0)
    rho = 1.0 / tau1
    probes = omega[:: max(1, len(omega) // 8)] * rho[:: max(1, len(omega) // 8), None]
    rate = max(abs(np.real(solve_front(p, system, energy).action)) for p in probes)
    return _Shells(omega, rho, d_omega, rate)


def _measure(points):
    return np.prod(4 * np.pi * points**2, axis=1)


def _check_system(state, system):
    if state.n != system.n:
        raise InputError(f"state has {state.n} particles but the system has {system.n}")


def _tau_edges(shells, a, b, resolution, breaks=()):
    if resolution < 1:
        raise InputError("resolution must be >= 1")
    # quarter period of exp(2iS) in tau, refined by ``resolution``
    width = np.pi / (4 * max(shells.rate, 1e-300)) / resolution
    width = min(width, (b - a) / resolution)
    return panel_edges(a, b, width, breaks)


def _panel_sums(state, shells, edges, weighted, workers):
    """Integral of u^2 (times the measure) over each tau panel."""
    nodes, wts = composite_nodes(edges)
    n_dim = shells.omega.shape[1]
    base = shells.omega * shells.rho[:, None]            # points on tau = 1
    jac_ang = shells.rho**n_dim * shells.dOmega          # (K,)

    def block(rows):
        t = nodes[rows]                                  # (P, ORDER)
        pts = t[:, :, None, None] * base[None, None]     # (P, ORDER, K, N)
        flat = pts.reshape(-1, n_dim)
        vals = state(flat) ** 2
        if weighted:
            vals = vals * _measure(flat)
        vals = vals.reshape(len(rows), ORDER, -1)
        vals = vals * (wts[rows] * t ** (n_dim - 1))[:, :, None] * jac_ang
        return vals.reshape(len(rows), -1).sum(axis=1)

    chunks = np.array_split(np.arange(len(nodes)), max(1, len(nodes) // 8))
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(block, chunks))
    else:
        parts = [block(c) for c in chunks]
    return np.concatenate(parts)


def _geometry(state, system, energy, resolution):
    _check_system(state, system)
    e = complex(as_energy(energy))
    e0 = e.real
    if e0 <= system.threshold:
        raise InputError("Re(E) must exceed the threshold")
    return e, e0, _shells(system, e0, ANGULAR_PANELS * resolution, e)


def volume_integral(state: ReducedState, system: ParticleSystem, energy, tau_r: float,
                    resolution: int = 1, weighted: bool = True, tau_inner: float | None = None,
                    workers: int = 1) -> complex:
    """Integral of u^2 prod(4 pi r_n^2) over the region tau < tau_r (pseudo-norm convention: u^2, not |u|^2).

    ``tau_inner`` overrides the state's inner cutoff (``inner_cutoff * tau_r``).
    ``weighted=False`` drops the 4 pi r^2 measure (plain d^N r).
    """
    e, e0, shells = _geometry(state, system, energy, resolution)
    if tau_inner is None:
        tau_inner = state.inner_cutoff * tau_r
    if not 0 <= tau_inner < tau_r:
        raise InputError("need 0 <= tau_inner < tau_r")
    edges = _tau_edges(shells, tau_inner, tau_r, resolution, state.tau_breaks)
    return complex(np.sum(_panel_sums(state, shells, edges, weighted, workers)))


def _surface(state, system, e, shells, tau_r, weighted):
    pts = tau_r * shells.rho[:, None] * shells.omega
    n_dim = system.n
    if system.relativistic:
        grad_len = np.array([np.linalg.norm(grad_tau(p, system, e.real)[0]) for p in pts])
        w = np.array([surface_weight(p, system, e) for p in pts])
    else:
        m = system.m
        grad = m * pts / (2 * e.real * tau_r)
        grad_len = np.linalg.norm(grad, axis=1)
        w = _weights_nonrel(pts, system, e)
    dS = grad_len * tau_r ** (n_dim - 1) * shells.rho**n_dim * shells.dOmega
    vals = state(pts) ** 2
    if weighted:
        vals = vals * _measure(pts)
    return vals, w, dS


def surface_integral(state: ReducedState, system: ParticleSystem, energy, tau_r: float,
                     resolution: int = 1, weighted: bool = True, divide_weight: bool = True) -> complex:
    """Integral of u^2 prod(4 pi r_n^2) / w over the front tau = tau_r.

    dS is the Euclidean surface measure of the front in radial space; for a
    single particle the front is a point and the result is
    4 pi R^2 u(R)^2 / (2 k_D).
    """
    e, e0, shells = _geometry(state, system, energy, resolution)
    vals, w, dS = _surface(state, system, e, shells, tau_r, weighted)
    if divide_weight:
        vals = vals / w
    return complex(np.sum(vals * dS))


def _require_nonrel(system):
    if system.relativistic:
        raise InputError(
            "relativistic pseudo-norms are not supported: the normalization of the surface "
            "weight for complex relativistic travel times is an open question"
        )


def pseudo_norm(state: ReducedState, system: ParticleSystem, energy, tau_r: float,
                resolution: int = 1, workers: int = 1) -> complex:
    """Pseudo-norm volume + i * surface at front time ``tau_r``."""
    _require_nonrel(system)
    vol = volume_integral(state, system, energy, tau_r, resolution, workers=workers)
    surf = surface_integral(state, system, energy, tau_r, resolution)
    return vol + 1j * surf


def norm_convergence_scan(state: ReducedState, system: ParticleSystem, energy, tau_grid,
                          resolution: int = 1, workers: int = 1) -> NormScan:
    """Volume, surface and pseudo-norm at every point of an increasing tau grid.

    One panelization covers the whole grid (every grid point and inner
    cutoff is a panel edge) and volumes are read off as cumulative sums,
    so each row equals the corresponding :func:`pseudo_norm` call up to
    rounding.
    """
    _require_nonrel(system)
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1 or np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise InputError("tau grid must be positive and strictly increasing")
    e, e0, shells = _geometry(state, system, energy, resolution)
    inner = state.inner_cutoff * grid
    breaks = tuple(state.tau_breaks) + tuple(grid) + tuple(inner)
    edges = _tau_edges(shells, inner[0], grid[-1], resolution, breaks)
    sums = _panel_sums(state, shells, edges, True, workers)
    cumulative = np.concatenate([[0.0], np.cumsum(sums)])

    def at(t):
        i = int(np.argmin(np.abs(edges - t)))
        if not np.isclose(edges[i], t, rtol=0, atol=1e-12 * max(1.0, abs(t))):
            raise UnderResolvedError(f"tau {t} is not a panel edge")
        return cumulative[i]

    volumes = np.array([at(t) - at(ti) for t, ti in zip(grid, inner)])
    surfaces = np.array([surface_integral(state, system, e, t, resolution) for t in grid])
    return NormScan(grid, volumes, surfaces, volumes + 1j * surfaces, state.inner_cutoff,
                    {"energy": e, "resolution": resolution})
