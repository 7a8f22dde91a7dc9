import pytest

import illposed as ip


@pytest.fixture(scope="session")
def master_directions():
    """Default enumeration: support bound 3, entry bound 8 (4034 directions)."""
    return ip.enumerate_directions(ip.EnumerationParams())


@pytest.fixture(scope="session")
def mazur200(master_directions):
    return ip.mazur(master_directions, 200, 3)
