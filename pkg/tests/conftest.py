import pytest

from helpers import load_fixture_instance, load_fixture_mapping


@pytest.fixture(scope="session")
def fig1():
    return load_fixture_instance("fig1.json")


@pytest.fixture(scope="session")
def fig2():
    return load_fixture_instance("fig2.json")


@pytest.fixture(scope="session")
def fig3():
    return load_fixture_instance("fig3.json")


@pytest.fixture(scope="session")
def fig4():
    return load_fixture_instance("fig4.json")


@pytest.fixture(scope="session")
def fig5():
    return load_fixture_instance("fig5.json")


@pytest.fixture(scope="session")
def fig6():
    return load_fixture_instance("fig6.json")


@pytest.fixture(scope="session")
def fig7():
    return load_fixture_instance("fig7.json")


@pytest.fixture(scope="session")
def fig8():
    return load_fixture_instance("fig8.json")


@pytest.fixture(scope="session")
def example1():
    return load_fixture_mapping("example1.tdx")


@pytest.fixture(scope="session")
def example3():
    return load_fixture_mapping("example3.tdx")


@pytest.fixture(scope="session")
def example3_source():
    return load_fixture_instance("example3_source.json")
