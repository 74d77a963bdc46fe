import pytest

import khessian as kh
from khessian import verify


@pytest.fixture(scope="session")
def bounded_cfg():
    return kh.validate(*verify.REFERENCE_BOUNDED)


@pytest.fixture(scope="session")
def both_cfg():
    return kh.validate(*verify.REFERENCE_BOTH_BLOWUP)


@pytest.fixture(scope="session")
def ufin_cfg():
    return kh.validate(*verify.REFERENCE_U_FINITE)


@pytest.fixture(scope="session")
def reference_trajs():
    """The four shared reference integrations (see verify module)."""
    return verify.reference_trajectories()
