import numpy as np
import pytest

from mechforge.config import DirichletBC, NeumannBC, parse_expression
from mechforge.fem import build_mixed, build_single
from mechforge.formulation import FluidProblem, SolidProblem


def expr(src):
    return parse_expression(src)


def dirichlet(region, values, field="displacement"):
    if field == "pressure":
        return DirichletBC(field, region, expr(values))
    return DirichletBC(field, region, tuple(None if v is None else expr(v) for v in values))


def neumann(region, kind, value):
    if kind == "pressure":
        return NeumannBC(region, kind, expr(value))
    return NeumannBC(region, kind, tuple(expr(v) for v in value))


def solid(mesh, material, element="p2", frame=None, **kw):
    spaces = build_mixed(mesh) if element == "p2-p1" else build_single(mesh, element.upper())
    return SolidProblem(mesh, spaces, material, frame=frame, **kw)


def fluid(mesh, material, **kw):
    return FluidProblem(mesh, build_mixed(mesh), material, **kw)


def random_rotation(rng):
    Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_frames(rng, n):
    return np.stack([random_rotation(rng) for _ in range(n)])


def directional_fd_error(residual, K, x, rng, directions=30, h=1e-6):
    """Worst relative mismatch between K d and central differences of R."""
    Kc = K.tocsr()
    worst = 0.0
    for _ in range(directions):
        d = rng.standard_normal(len(x))
        fd = (residual(x + h * d) - residual(x - h * d)) / (2 * h)
        worst = max(worst, np.linalg.norm(Kc @ d - fd) / max(np.linalg.norm(fd), 1e-30))
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one "criterion N PASS/FAIL ..." line per acceptance check, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
