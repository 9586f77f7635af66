import numpy as np
import pytest

from extnls import ModelParams, build_domain, LaplacianOp


@pytest.fixture(scope="session")
def params3():
    return ModelParams(n=3, p=10.0, r_max=5.0)


@pytest.fixture(scope="session")
def domain3(params3):
    return build_domain(params3, 256)


@pytest.fixture(scope="session")
def op3(domain3):
    return LaplacianOp(domain3)


@pytest.fixture(scope="session")
def params2():
    return ModelParams(n=2, p=7.0, r_max=5.0)


@pytest.fixture(scope="session")
def domain2(params2):
    return build_domain(params2, 128, num_angular=16)
