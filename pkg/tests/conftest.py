import numpy as np
import pytest

from quasitriple.models import builtin

#: builtin models covered by the cross-model checks
MODEL_SPECS = [
    ("sl1d", {"N": 16}),
    ("cd1d", {"N": 32}),
    ("ell2d", {"N": 12}),
] + [("synthetic", {"seed": s, "n": 8, "m": 3}) for s in range(1, 6)]

_CACHE = {}


def get_model(name, **params):
    key = (name, tuple(sorted(params.items())))
    if key not in _CACHE:
        _CACHE[key] = builtin(name, **params)
    return _CACHE[key]


def model_id(spec):
    name, params = spec
    return name + "-" + "-".join(f"{k}{v}" for k, v in params.items())


@pytest.fixture(params=MODEL_SPECS, ids=[model_id(s) for s in MODEL_SPECS])
def any_model(request):
    name, params = request.param
    return get_model(name, **params)


@pytest.fixture
def sl16():
    return get_model("sl1d", N=16)


@pytest.fixture
def cd32():
    return get_model("cd1d", N=32)


@pytest.fixture
def syn1():
    return get_model("synthetic", seed=1, n=8, m=3)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))


def cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def hpd(rng, n):
    a = cgauss(rng, n, n)
    w = a.conj().T @ a + np.eye(n)
    return 0.5 * (w + w.conj().T)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
