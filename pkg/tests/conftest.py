import numpy as np
import pytest

from irasym.currents import PointParticle, ScatteringEvent
from irasym.lorentz import random_four_velocity


def random_event(rng, n_in=None, n_out=None, max_rapidity=0.8):
    """Charge-conserving event with random particles; the last outgoing charge balances."""
    n_in = n_in or int(rng.integers(1, 5))
    n_out = n_out or int(rng.integers(1, 5))
    q_in = rng.normal(size=n_in)
    q_out = rng.normal(size=n_out)
    q_out[-1] = q_in.sum() - q_out[:-1].sum()
    incoming = [PointParticle(float(q), random_four_velocity(rng, max_rapidity)) for q in q_in]
    outgoing = [PointParticle(float(q), random_four_velocity(rng, max_rapidity)) for q in q_out]
    return ScatteringEvent(incoming, outgoing, float(rng.uniform(0.5, 1.5)),
                           float(rng.uniform(-0.5, 0.5)))


def random_null(rng, n, scale=(0.3, 3.0)):
    """n null vectors with random directions and time components."""
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    lam = rng.uniform(*scale, n)
    return lam[:, None] * np.concatenate([np.ones((n, 1)), d], axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: headline acceptance criteria (slow)")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
