"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances live in :mod:`multigamow.validation`; every check is run at the
full instance count.  Run ``pytest tests/test_acceptance.py -v`` to see the
summary lines next to the test ids.
"""

import pytest

from multigamow import validation as v

CRITERIA = [
    (1, "tau homogeneity", lambda: v.check_homogeneity(count=100)),
    (2, "solver residual", lambda: v.check_solver_residuals(count=100)),
    (3, "dS/dE equals tau", lambda: v.check_action_derivative(count=100)),
    (4, "Euler-operator vector identity", lambda: v.check_velocity_identity(count=100)),
    (5, "surface weight consistency", lambda: v.check_weights(count=100)),
    (6, "wavefront factor oracle", v.check_wavefront_oracle),
    (7, "delta-shell oracle", v.check_delta_shell),
    (8, "N=1 keystone", v.check_keystone),
    (9, "N=2 pseudo-norm convergence", v.check_partition_convergence),
    (10, "determinism", v.check_determinism),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, title, check, capsys):
    result = check()
    with capsys.disabled():
        status = "PASS" if result.passed else "FAIL"
        print(f"\ncriterion {number:2d} {status}: {title} | {result.line()}")
    assert result.passed, result.line()
