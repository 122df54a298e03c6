import pytest

from meshcond.adapt import adapt_loop
from meshcond.fvm import assemble
from meshcond.mesh import build_graded, build_locally_refined, build_uniform
from meshcond.problem import KELLOGG_GAMMA_01

# experiment defaults at ~1024 dof; see cli.ExperimentConfig
FAMILY_BUILDERS = {
    "uniform": lambda: build_uniform(32),
    "graded": lambda: build_graded(32, 1.2),
    "locally_refined": lambda: build_locally_refined(24, 1),
    "adaptive": lambda: adapt_loop(KELLOGG_GAMMA_01, 1024, 1.0, 8).final_mesh,
}


@pytest.fixture(scope="session")
def kellogg():
    return KELLOGG_GAMMA_01


@pytest.fixture(scope="session")
def family_meshes():
    return {name: build() for name, build in FAMILY_BUILDERS.items()}


@pytest.fixture(scope="session")
def family_systems(family_meshes, kellogg):
    return {name: assemble(m, kellogg) for name, m in family_meshes.items()}


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
