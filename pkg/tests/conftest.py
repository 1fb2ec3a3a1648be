import pytest

from branchflow import datasets


@pytest.fixture(scope="session")
def warapitiya():
    return datasets.load_network("warapitiya")


@pytest.fixture(scope="session")
def dummy6():
    return datasets.load_network("dummy6")


@pytest.fixture(scope="session")
def catalog():
    return datasets.load_catalog()


@pytest.fixture(scope="session")
def cost_table():
    return datasets.load_cost_table()


@pytest.fixture(scope="session")
def limits():
    return datasets.DEFAULT_LIMITS


@pytest.fixture(scope="session")
def warapitiya_params(warapitiya):
    return datasets.default_params(warapitiya)


@pytest.fixture(scope="session")
def dummy6_params(dummy6):
    return datasets.default_params(dummy6)


@pytest.fixture(scope="session")
def best_diameters(warapitiya):
    return datasets.load_diameters("warapitiya_best.csv", warapitiya)


@pytest.fixture(scope="session")
def nwsdb_diameters(warapitiya):
    return datasets.load_diameters("warapitiya_nwsdb.csv", warapitiya)


@pytest.fixture(scope="session")
def reference_gradients():
    return datasets.load_reference_pipe_gradients()


@pytest.fixture(scope="session")
def reference_heads():
    return datasets.load_reference_node_heads()
