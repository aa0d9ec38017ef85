import pytest

from actiontubes.cli import main
from actiontubes.fixtures import generate_fixtures


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """A generated corpus with its spatial prior table already built."""
    out = tmp_path_factory.mktemp("corpus")
    config_path = generate_fixtures(out, seed=0)
    rc = main(["build-spatial-priors", "--config", str(config_path)])
    assert rc == 0
    return out
