import pytest

from feynpoly import corpus as C


@pytest.fixture(scope="session")
def dunce():
    return C.dunce_cap()


@pytest.fixture(scope="session")
def tri2():
    return C.one_loop_massive_triangle()


@pytest.fixture(scope="session")
def w3():
    return C.wheel_three_spokes()


@pytest.fixture(scope="session")
def bubble():
    return C.massive_bubble()


@pytest.fixture(scope="session")
def banana3():
    return C.banana(3)


@pytest.fixture(scope="session")
def random_graphs():
    return C.random_corpus()


@pytest.fixture(scope="session")
def small_graphs(random_graphs):
    """Named and random graphs with at most six edges."""
    named = [f() for f in C.NAMED.values()]
    return [g for g in named + random_graphs if len(g.edges) <= 6]
