import os
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ggbm.errors import AccuracyWarning

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def mlf_oracle(beta, s, dps=30):
    """E_beta(-s) by Talbot inversion of p^(beta-1) / (p^beta + 1) at t = s^(1/beta).

    Shares nothing with the library's series/integral evaluation.
    """
    with mp.workdps(dps):
        if s == 0:
            return 1.0
        b = mp.mpf(beta)
        t = mp.mpf(s) ** (1 / b)
        return float(mp.invertlaplace(lambda p: p ** (b - 1) / (p**b + 1), t, method="talbot"))


@pytest.fixture
def oracle():
    return mlf_oracle


@pytest.fixture(autouse=True)
def _quiet_uncertified():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        yield


def mc_z(values, target):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / np.sqrt(values.size)
    return abs(values.mean() - target) / se


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
