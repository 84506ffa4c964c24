"""Invariant and oracle checks run by ``multigamow validate`` and the acceptance tests.

Each check returns a :class:`CheckResult` holding the worst observed
error next to the tolerance it is held to.  Random instances come from a
seeded generator so every run sees the same inputs.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import delta_shell as ds
from .kinematics import ParticleSystem, energy_on_front
from .pseudo_norm import (
    norm_convergence_scan,
    partition_state,
    pseudo_norm,
    surface_weight,
    weight_nonrel_closed,
)
from .stationary_phase import (
    action_energy_derivative,
    velocity_identity_residual,
    wavefront_factor,
    wavefront_factor_oracle,
)
from .tau_front import ComplexEnergy, solve_tau, tau_implicit, tau_nonrel_closed


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst={self.worst:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


def _result(name, errors, tol, detail=""):
    worst = float(np.max(errors)) if len(errors) else 0.0
    return CheckResult(name, bool(worst <= tol), worst, tol, detail)


def random_instance(rng, dispersion: str, complex_energy: bool = False, n_max: int = 4):
    """Random (system, r, E) with E comfortably above threshold."""
    n = int(rng.integers(1, n_max + 1))
    masses = rng.uniform(0.2, 5.0, n)
    r = rng.uniform(0.1, 10.0, n)
    system = ParticleSystem(masses, dispersion)
    if system.relativistic:
        e0 = system.threshold * rng.uniform(1.05, 3.0)
    else:
        e0 = rng.uniform(0.1, 10.0)
    e = complex(e0, -0.5 * rng.uniform(0.0, 0.1) * e0) if complex_energy else e0
    return system, r, e


def _instances(count, seed, complex_energy=False):
    rng = np.random.default_rng(seed)
    for dispersion in ("nonrelativistic", "relativistic"):
        for i in range(count):
            yield random_instance(rng, dispersion, complex_energy and i % 2 == 1)


def check_homogeneity(count=100, seed=1) -> CheckResult:
    """tau(lambda r) = lambda tau(r) for lambda in {0.5, 2, 10}."""
    errs = []
    for system, r, e in _instances(count, seed, complex_energy=True):
        tau = solve_tau(r, system, e)
        for lam in (0.5, 2.0, 10.0):
            errs.append(abs(solve_tau(lam * r, system, e) - lam * tau) / (lam * abs(tau)))
    return _result("tau homogeneity", errs, 1e-10, f"({len(errs)} evaluations)")


def check_solver_residuals(count=100, seed=2) -> CheckResult:
    """Energy residual of both solvers and agreement of closed form and implicit solver."""
    residuals, agreement = [], []
    for system, r, e in _instances(count, seed, complex_energy=True):
        taus = [tau_implicit(r, system, e)]
        if not system.relativistic:
            taus.append(tau_nonrel_closed(r, system, e))
            agreement.append(abs(taus[0] - taus[1]) / abs(taus[1]))
        for tau in taus:
            residuals.append(abs(energy_on_front(system, r, tau) - e) / abs(e))
    res = _result("solver residual", residuals, 1e-12)
    agr = _result("closed vs implicit tau", agreement, 1e-10)
    worst = max(res.worst / res.tolerance, agr.worst / agr.tolerance)
    return CheckResult(
        "solver residual and cross-solver agreement",
        res.passed and agr.passed,
        worst,
        1.0,
        f"(residual {res.worst:.2e} <= 1e-12, agreement {agr.worst:.2e} <= 1e-10; worst is ratio to tol)",
    )


def check_action_derivative(count=100, seed=3) -> CheckResult:
    """Finite-difference dS/dE equals tau."""
    errs = []
    for system, r, e in _instances(count, seed):
        dsde, tau = action_energy_derivative(r, system, e, h=1e-5)
        errs.append(abs(dsde - tau) / abs(tau))
    return _result("dS/dE = tau", errs, 1e-6)


def check_velocity_identity(count=100, seed=4) -> CheckResult:
    """r_m = (sum_k r_k dE/dv_k) sum_n (d tau/d r_n) (M^-1)_nm."""
    errs = []
    for system, r, e in _instances(count, seed):
        errs.append(np.max(velocity_identity_residual(r, system, e)))
    return _result("Euler-operator vector identity", errs, 1e-8)


def check_weights(count=100, seed=5) -> CheckResult:
    """Closed-form nonrelativistic weight vs generic 2T<v|M|v>, and 2 k_D at N = 1."""
    rng = np.random.default_rng(seed)
    closed = []
    for i in range(count):
        system, r, e = random_instance(rng, "nonrelativistic", complex_energy=i % 2 == 1)
        closed.append(abs(surface_weight(r, system, e) - weight_nonrel_closed(r, system, e))
                      / abs(weight_nonrel_closed(r, system, e)))
    single = []
    for _ in range(count):
        m = rng.uniform(0.2, 5.0)
        e = complex(rng.uniform(0.1, 10.0), -rng.uniform(0.0, 0.5))
        r = rng.uniform(0.1, 10.0)
        kd = np.sqrt(2 * m * e)
        single.append(abs(surface_weight([r], ParticleSystem((m,)), e) - 2 * kd) / abs(2 * kd))
    a = _result("weight closed form", closed, 1e-10)
    b = _result("single-particle weight", single, 1e-12)
    return CheckResult(
        "surface weight consistency",
        a.passed and b.passed,
        max(a.worst / a.tolerance, b.worst / b.tolerance),
        1.0,
        f"(closed form {a.worst:.2e} <= 1e-10, N=1 vs 2k_D {b.worst:.2e} <= 1e-12; worst is ratio to tol)",
    )


def wavefront_t_grid(tau0: float, gamma: float) -> np.ndarray:
    """t - tau0 = k / Gamma for k = -5..5, k != 0."""
    k = np.array([j for j in range(-5, 6) if j != 0], dtype=float)
    return tau0 + k / gamma


def check_wavefront_oracle(e0=2.0, gamma=0.2, tau0=3.0) -> CheckResult:
    """Quadrature of the pole integral reproduces the causal step factor."""
    energy = ComplexEnergy(e0, gamma)
    grid = wavefront_t_grid(tau0, gamma)
    maxima = []
    for factor in (400, 800, 1600):
        maxima.append(max(abs(wavefront_factor_oracle(t, tau0, energy, factor * gamma)
                              - wavefront_factor(t, tau0, energy)) for t in grid))
    decreasing = all(b < a for a, b in zip(maxima, maxima[1:]))
    causal = all(wavefront_factor(t, tau0, energy) == 0 for t in grid if t < tau0)
    ok = maxima[0] <= 2e-3 and decreasing and causal
    return CheckResult("wavefront factor oracle", ok, maxima[0], 2e-3,
                       f"(max errors at cutoff 400/800/1600 Gamma: {', '.join(f'{m:.2e}' for m in maxima)})")


def check_delta_shell(gs=(10.0, 20.0, 100.0), branches=(1, 2, 3), a=1.0, m=1.0) -> CheckResult:
    """Pole residual, R-independence of the pseudo-norm, and residue factorization."""
    pole_res, r_indep, residue = [], [], []
    ok_sign = True
    for g in gs:
        for b in branches:
            res = ds.find_pole(g, a, m, b)
            pole_res.append(res.residual)
            ok_sign &= res.k_pole.imag < 0 and res.gamma > 0
            base = ds.pseudo_norm_1p(res, 5 * a)
            for radius in (7.5 * a, 10 * a, 20 * a):
                r_indep.append(abs(ds.pseudo_norm_1p(res, radius) - base) / abs(base))
            for r, rp in ((2 * a, 2 * a), (1.5 * a, 3 * a)):
                got, want = ds.residue_check(res, r, rp)
                residue.append(abs(got - want) / abs(want))
    p = _result("pole", pole_res, 1e-12)
    n = _result("R-independence", r_indep, 1e-8)
    q = _result("residue", residue, 1e-6)
    ok = p.passed and n.passed and q.passed and ok_sign
    worst = max(p.worst / 1e-12, n.worst / 1e-8, q.worst / 1e-6)
    return CheckResult("delta-shell oracle", ok, worst, 1.0,
                       f"(pole {p.worst:.1e}, R-indep {n.worst:.1e}, residue {q.worst:.1e}; worst is ratio to tol)")


def check_keystone(gs=(10.0, 20.0, 100.0), branches=(1, 2, 3)) -> CheckResult:
    """N = 1 multi-particle pseudo-norm equals the delta-shell formula."""
    errs = []
    for g in gs:
        for b in branches:
            res = ds.find_pole(g, 1.0, 1.0, b)
            system = ds.system_of(res)
            state = ds.gamow_state(res)
            for radius in (5.0, 10.0):
                tau_r = radius * np.sqrt(res.m / (2 * res.e0))
                got = pseudo_norm(state, system, res.energy, tau_r)
                want = ds.pseudo_norm_1p(res, radius)
                errs.append(abs(got - want) / abs(want))
    return _result("N=1 pseudo-norm vs delta-shell", errs, 1e-8)


def partition_scan_setup(masses=(1.0, 1.0), e0=1.0, gamma_ratio=0.005):
    system = ParticleSystem(masses)
    energy = complex(e0, -0.5 * gamma_ratio * e0)
    period = np.pi / (2 * e0)
    return system, energy, period


def check_partition_convergence(t0_periods=16, ratio=10.0) -> CheckResult:
    """Adding the surface term flattens the tau_R dependence of the volume term."""
    system, energy, period = partition_scan_setup()
    state = partition_state(system, energy)
    t0 = t0_periods * period
    grid = np.linspace(t0, 2 * t0, 17)
    scan = norm_convergence_scan(state, system, energy, grid)
    rel_norm = np.max(np.abs(scan.norms - scan.norms[0])) / abs(scan.norms[0])
    rel_vol = np.max(np.abs(scan.volume_terms - scan.volume_terms[0])) / abs(scan.volume_terms[0])
    ladder = period * np.array([4, 8, 16, 32])
    scan2 = norm_convergence_scan(state, system, energy, ladder)
    steps = np.abs(np.diff(scan2.norms)) / np.abs(scan2.norms[:-1])
    monotone = bool(np.all(np.diff(steps) < 0))
    achieved = rel_vol / rel_norm
    ok = achieved >= ratio and monotone
    return CheckResult("N=2 pseudo-norm convergence", ok, ratio / achieved, 1.0,
                       f"(volume/norm variation ratio {achieved:.1f} >= {ratio}; "
                       f"ladder steps {', '.join(f'{s:.2e}' for s in steps)} monotone={monotone})")


def check_determinism() -> CheckResult:
    """Identical configs give byte-identical CSVs, whatever the worker count."""
    from .cli import run_cli
    import json

    configs = {
        "front": {"masses": [1.0, 2.0], "dispersion": "relativistic", "energy": {"re": 5.0, "im": 0.0},
                  "tau_R": 3.0, "count": 33},
        "norm": {"masses": [1.0, 1.0], "dispersion": "nonrelativistic", "energy": {"re": 1.0, "im": -0.01},
                 "tau_grid": [3.0, 4.5, 6.0], "state": {"kind": "partition"}},
    }
    mismatches = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for cmd, cfg in configs.items():
            blobs = []
            for run, workers in enumerate((1, 1, 4)):
                cfg_path = tmp / f"{cmd}{run}.json"
                cfg_path.write_text(json.dumps(dict(cfg, workers=workers)))
                out = tmp / f"{cmd}{run}.csv"
                code = run_cli([cmd, "--config", str(cfg_path), "--out", str(out)])
                blobs.append(out.read_bytes() if code == 0 else b"")
            if not blobs[0] or any(b != blobs[0] for b in blobs):
                mismatches.append(cmd)
        poles = []
        for run in range(2):
            out = tmp / f"poles{run}.csv"
            run_cli(["poles", "--g", "20", "--a", "1", "--m", "1", "--branches", "1:3", "--out", str(out)])
            poles.append(out.read_bytes())
        if poles[0] != poles[1]:
            mismatches.append("poles")
    return CheckResult("byte-identical outputs", not mismatches, float(len(mismatches)), 0.0,
                       f"(mismatched: {', '.join(mismatches) or 'none'})")


def run_suite(suite: str = "fast") -> list[CheckResult]:
    """All checks; ``fast`` uses 20 random instances per dispersion instead of 100."""
    if suite not in ("fast", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    count = 20 if suite == "fast" else 100
    checks = [
        ("tau homogeneity", lambda: check_homogeneity(count)),
        ("solver residual", lambda: check_solver_residuals(count)),
        ("dS/dE = tau", lambda: check_action_derivative(count)),
        ("vector identity", lambda: check_velocity_identity(count)),
        ("surface weight", lambda: check_weights(count)),
        ("wavefront oracle", check_wavefront_oracle),
        ("delta-shell oracle", check_delta_shell),
        ("N=1 keystone", check_keystone),
        ("N=2 convergence", check_partition_convergence),
        ("determinism", check_determinism),
    ]
    results = []
    for name, check in checks:
        try:
            results.append(check())
        except Exception as exc:  # a crash is a failed check, reported by name
            results.append(CheckResult(name, False, float("inf"), 0.0, f"raised {type(exc).__name__}: {exc}"))
    return results
