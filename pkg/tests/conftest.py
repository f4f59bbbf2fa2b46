import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

_T0 = time.perf_counter()

BASE_PARAMS = (0.3, 0.7, 0.4)
SPECTRAL_PARAMS = (0.3, 0.7, 1.2)


@pytest.fixture(scope="session")
def hyp_system():
    from monodeform.hypergeom import hypergeometric_system

    return hypergeometric_system(*BASE_PARAMS)


@pytest.fixture(scope="session")
def frob0():
    from monodeform.transport import frobenius_basis

    return frobenius_basis(*BASE_PARAMS, point=0, x0=0.5)


@pytest.fixture(scope="session")
def frob1():
    from monodeform.transport import frobenius_basis

    return frobenius_basis(*BASE_PARAMS, point=1, x0=0.5)


@pytest.fixture(scope="session")
def connected_basis():
    from monodeform.hypergeom import ConnectedBasis

    return ConnectedBasis(*BASE_PARAMS)


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _T0
    budget = 120.0
    verdict = "within" if elapsed < budget else "OVER"
    print(f"\n[suite runtime] {elapsed:.1f}s ({verdict} the {budget:.0f}s budget)")
