import os

import pytest

from srlab import kernels


def pytest_collection_modifyitems(config, items):
    if os.environ.get("SRLAB_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="set SRLAB_SLOW=1 to run full-scale runs")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay the jit compilation cost once, outside any timed assertion
    kernels.warmup()
