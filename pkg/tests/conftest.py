import numpy as np
import pytest

from multitwist import models


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture(scope="session")
def torus2_q3():
    return models.fuzzy_torus2(models.FuzzyModelParams(q=3))


@pytest.fixture(scope="session")
def asym_q3():
    return models.asymmetric_torus(models.FuzzyModelParams(q=3, seed=1))


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
