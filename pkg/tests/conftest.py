import numpy as np
import pytest

from droopalloc.allocation import FrozenProblem, seed_equilibrium
from droopalloc.caselib import load_builtin
from droopalloc.devices import MODELS, default_params
from droopalloc.network import assemble


def local_rows(kind, x, y, params=None, boundary=(0.0, 0.0)):
    """Residual rows of one device keyed by equation tag."""
    model = MODELS[kind]
    params = params or default_params(kind)
    f, g = model.residuals(x, y, params, boundary)
    return dict(zip(model.f_tags() + model.g_tags(), f + g))


def named_point(kind, **values):
    """Flat-start vectors with selected variables overwritten by name."""
    model = MODELS[kind]
    x, y = model.flat_start(default_params(kind))
    x, y = list(x), list(y)
    for name, v in values.items():
        if name in model.states:
            x[model.states.index(name)] = v
        else:
            y[model.algebraics.index(name)] = v
    return x, y


@pytest.fixture(scope="session")
def base_case():
    return load_builtin("base")


@pytest.fixture(scope="session")
def base_system(base_case):
    return assemble(base_case)


@pytest.fixture(scope="session")
def base_equilibrium(base_case, base_system):
    return seed_equilibrium(base_system, base_case.nominal_gains())


@pytest.fixture(scope="session")
def base_problem(base_system, base_equilibrium):
    return FrozenProblem(base_system, base_equilibrium.x, base_equilibrium.y)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


CRITERIA = {}


@pytest.fixture
def verdict():
    """Record and print the one-line outcome of an acceptance criterion."""
    def record(number, ok, detail):
        line = f"CRITERION {number:>2} {'PASS' if ok else 'FAIL'}: {detail}"
        CRITERIA[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
