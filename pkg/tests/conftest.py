import numpy as np
import pytest

import carlesonlab as cl


@pytest.fixture(scope="session")
def unit_circle():
    return cl.generate_circle(1.0, 4096)


@pytest.fixture(scope="session")
def graded_circle():
    return cl.generate_graded_circle(1.0, 8192)


@pytest.fixture(scope="session")
def spiral1():
    return cl.generate_log_spiral(1.0, 1e-4, 1.0, 8192)


@pytest.fixture(scope="session")
def spiral1_branch(spiral1):
    return cl.unwrap_arg(spiral1, 0j)


@pytest.fixture(scope="session")
def corner():
    return cl.generate_corner(np.pi / 2, 1e-6, 1.0, 8192)


@pytest.fixture(scope="session")
def segment():
    return cl.generate_segment(1e-4, 1.0, 2048)
