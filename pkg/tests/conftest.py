import numpy as np
import pytest
from hypothesis import settings

from rmcover.classify import fn_rep
from rmcover.field import agl_generators
from rmcover.nonlin import build_nl_table
from rmcover.orbit import bfs_orbit, coset_key

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")


class TableCache:
    """Session-wide lazy cache of the (6,3) value tables per class index."""

    def __init__(self):
        self._tables = {}

    def __getitem__(self, index: int):
        if index not in self._tables:
            self._tables[index] = build_nl_table(fn_rep(index), 3)
        return self._tables[index]


@pytest.fixture(scope="session")
def tables():
    return TableCache()


@pytest.fixture(scope="session")
def agl6_gens():
    return list(agl_generators(6, 2))


@pytest.fixture(scope="session")
def fn10_orbit(agl6_gens):
    return bfs_orbit(coset_key(fn_rep(10)), agl6_gens,
                     collect_matrices=True, transcript=True)


@pytest.fixture(scope="session")
def matrix_set(fn10_orbit):
    return fn10_orbit.matrix_set


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory, tables, matrix_set):
    """Prebuilt NLT1/AMS1 artifacts for CLI tests."""
    root = tmp_path_factory.mktemp("artifacts")
    for i in range(11):
        tables[i].save(root / f"fn{i}.nlt", meta={"command": "test fixture"})
    matrix_set.save(root / "fn10.ams", meta={"command": "test fixture"})
    return root


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
