import sys

import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays


def sign_matrices(max_m=6, max_n=6):
    shape = st.tuples(st.integers(1, max_m), st.integers(1, max_n))
    return shape.flatmap(
        lambda s: arrays(np.float64, s, elements=st.sampled_from([-1.0, 1.0])))


def binary_matrices(max_m=6, max_n=6):
    shape = st.tuples(st.integers(1, max_m), st.integers(1, max_n))
    return shape.flatmap(
        lambda s: arrays(np.float64, s, elements=st.sampled_from([0.0, 1.0])))


def real_matrices(max_m=6, max_n=6, bound=10.0):
    shape = st.tuples(st.integers(1, max_m), st.integers(1, max_n))
    elements = st.floats(-bound, bound, allow_nan=False, allow_infinity=False)
    return shape.flatmap(lambda s: arrays(np.float64, s, elements=elements))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split()[1].rstrip("."))):
        terminalreporter.write_line(line)
