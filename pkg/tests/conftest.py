import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ssplab.tableau import ButcherTableau, ShuOsherForm

settings.register_profile(
    "ssplab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ssplab")


@st.composite
def shu_osher_forms(draw, s_min=1, s_max=8):
    """Random convex Shu-Osher forms: alpha rows sum to 1, beta >= 0."""
    s = draw(st.integers(s_min, s_max))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    alpha = np.zeros((s + 1, s + 1))
    beta = np.zeros((s + 1, s + 1))
    for i in range(1, s + 1):
        row = rng.random(i) * (rng.random(i) < 0.7)
        row[i - 1] += 0.1
        alpha[i, :i] = row / row.sum()
        beta[i, :i] = alpha[i, :i] * rng.uniform(0.2, 1.0, i)
    return ShuOsherForm(alpha, beta, f"random-{s}")


@st.composite
def nonnegative_tableaux(draw, s_min=1, s_max=8):
    s = draw(st.integers(s_min, s_max))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    A = np.tril(rng.uniform(0.0, 1.0 / s, (s, s)), -1)
    b = rng.random(s) + 0.05
    return ButcherTableau(A, b / b.sum(), f"random-{s}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
