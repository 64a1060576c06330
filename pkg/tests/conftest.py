import pytest

from shockwave_lab import (CompositeWave, EndState, GasModel, build_profiles,
                           hugoniot_u, solve_intermediate)


@pytest.fixture(scope="session")
def gas():
    return GasModel(a=1.0, gamma=2.0, alpha=0.0)


@pytest.fixture(scope="session")
def two_shock(gas):
    """Canonical symmetric datum: v_- = v_+ = 2, v_m = 1, |s| = sqrt(3)/2."""
    left = EndState(2.0, 0.0)
    u_m = hugoniot_u(gas, left, 1.0)
    u_p = hugoniot_u(gas, EndState(1.0, u_m), 2.0)
    return solve_intermediate(gas, left, EndState(2.0, u_p))


@pytest.fixture(scope="session")
def profiles(gas, two_shock):
    return build_profiles(gas, two_shock)


@pytest.fixture(scope="session")
def composite40(profiles):
    p1, p2 = profiles
    return CompositeWave(p1, p2, 40.0)
