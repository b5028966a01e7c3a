import pytest

from hypodb import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the jitted kernels once so timed tests measure the work,
    # not compilation
    _kernels.warmup()
