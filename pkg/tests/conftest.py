import pytest

from miw.ground_state import solve


@pytest.fixture(scope="session")
def solved():
    """Memoized solver so big N is paid for once per run."""
    cache = {}

    def get(n, tol=1e-13, precision="double"):
        key = (n, tol, precision)
        if key not in cache:
            cache[key] = solve(n, tol=tol, precision=precision)
        return cache[key]

    return get
