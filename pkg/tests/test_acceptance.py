"""Acceptance gate: every criterion at its stated tolerance.

One machine-readable line is printed per criterion:
    <name>,<measured>,<threshold>,<PASS|FAIL>
Criteria 6-8 share a single stability run (module-scoped fixture).
"""

import pytest

from shockwave_lab import verify


def _check(results):
    for r in results:
        print(verify.format_result(r))
    failed = [r.name for r in results if not r.passed]
    assert not failed, f"failed criteria: {failed}"


def test_criterion_1_riemann_exactness():
    _check(verify.suite_riemann())


def test_criterion_2_profile_fidelity():
    _check(verify.suite_profile())


def test_criterion_3_shift_correctness():
    _check(verify.suite_shifts())


def test_criterion_4_w_decay():
    _check(verify.suite_wdecay())


def test_criterion_5_scheme_convergence():
    _check(verify.suite_convergence())


@pytest.fixture(scope="module")
def stability_results():
    return verify.suite_stability()


def test_criterion_6_composite_stability(stability_results):
    _check([r for r in stability_results if r.name.startswith("stability.")])


def test_criterion_7_energy_structure(stability_results):
    _check([r for r in stability_results if r.name.startswith("energy.")])


def test_criterion_8_effective_velocity_consistency(stability_results):
    _check([r for r in stability_results if r.name.startswith("psi.")])
