import pytest

from speedprior.enumeration import enumerate_up_to_phase


@pytest.fixture(scope="session")
def ledger_k8():
    return enumerate_up_to_phase(8, "tree")


@pytest.fixture(scope="session")
def ledger_k12():
    return enumerate_up_to_phase(12, "tree")


@pytest.fixture(scope="session")
def ledger_k14():
    return enumerate_up_to_phase(14, "tree")
