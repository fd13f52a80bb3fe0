import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(n, ok, detail):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[n] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])


def random_pmf(rng, shape, sparsity=0.0):
    p = rng.dirichlet(np.full(int(np.prod(shape)), 0.7))
    if sparsity:
        p[rng.random(p.size) < sparsity] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
        p /= p.sum()
    return p.reshape(shape)


def random_channel(rng, n_in, n_out):
    """Conditional tensor with input axes n_in and output axes n_out."""
    w = rng.dirichlet(np.full(int(np.prod(n_out)), 0.8), size=int(np.prod(n_in)))
    return w.reshape(tuple(n_in) + tuple(n_out))
