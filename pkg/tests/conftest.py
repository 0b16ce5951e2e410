from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from stratalab.lattice import Lattice, SympSpace
from stratalab.ring import make_ring

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def lattices(draw, p: int = 3, d: int = 1, m: int = 8, max_exponent: int = 3):
    """Random lattices p^scale * U * diag(p^e) with U unimodular, e_i <= max_exponent, scale in {-1, 0, 1}."""
    ctx = make_ring(p, d, m)
    space = SympSpace.standard(ctx)
    n = space.n
    entry = st.lists(st.integers(0, ctx.modulus - 1), min_size=d, max_size=d).map(tuple)

    def triangular(lower: bool):
        return [
            [ctx.one if i == j else (draw(entry) if (i > j) == lower else ctx.zero) for j in range(n)]
            for i in range(n)
        ]

    lo, up = triangular(True), triangular(False)
    unimodular = [[_dot(ctx, lo[i], [up[k][j] for k in range(n)]) for j in range(n)] for i in range(n)]
    exps = draw(st.lists(st.integers(0, max_exponent), min_size=n, max_size=n))
    cols = [[ctx.mulp(unimodular[i][j], exps[j]) for i in range(n)] for j in range(n)]
    scale = draw(st.integers(-1, 1))
    return Lattice.span(space, cols, scale)


def _dot(ctx, a, b):
    acc = ctx.zero
    for x, y in zip(a, b):
        acc = ctx.add(acc, ctx.mul(x, y))
    return acc


@pytest.fixture(scope="session")
def space31():
    return SympSpace.standard(make_ring(3, 1, 6))


@pytest.fixture(scope="session")
def space32():
    return SympSpace.standard(make_ring(3, 2, 6))


@pytest.fixture(scope="session")
def quat1():
    from stratalab.rz import QuatModel

    return QuatModel.build(3, 1)


@pytest.fixture(scope="session")
def quat2():
    from stratalab.rz import QuatModel

    return QuatModel.build(3, 2)


@pytest.fixture(scope="session")
def census1(quat1):
    from stratalab.rz import enumerate_ball_points

    return enumerate_ball_points(quat1, 1)


@pytest.fixture(scope="session")
def census2(quat2):
    from stratalab.rz import enumerate_ball_points

    return enumerate_ball_points(quat2, 1)


# acceptance criteria: one aggregated pass/fail line per criterion in the terminal summary
_CRITERIA: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    n, title = marker.args
    entry = _CRITERIA.setdefault(n, [title, True])
    entry[1] = entry[1] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
