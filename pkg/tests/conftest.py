from importlib import resources

import pytest


@pytest.fixture(scope="session")
def toy_path():
    return str(resources.files("pubcomm.data").joinpath("toy.wos"))


@pytest.fixture(scope="session")
def toy_researcher_path():
    return str(resources.files("pubcomm.data").joinpath("toy_researcher.wos"))
