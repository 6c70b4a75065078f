import shutil
from pathlib import Path

import pytest

from paperlake import cli
from paperlake.config import load_config
from paperlake.demo import write_demo_inputs

DEMO_SEED = 7


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory) -> Path:
    """Demo inputs + a fully built lake, shared by the whole session."""
    root = tmp_path_factory.mktemp("demo")
    config_path = write_demo_inputs(root, seed=DEMO_SEED)
    code = cli.main(["all", "--config", str(config_path)])
    assert code == 0, "demo pipeline must pass end to end"
    return root


@pytest.fixture(scope="session")
def demo_config(demo_workspace):
    return load_config(demo_workspace / "config.yaml")


@pytest.fixture()
def lake_copy(demo_workspace, tmp_path) -> Path:
    """Private writable copy of the demo workspace for corruption tests."""
    target = tmp_path / "workspace"
    shutil.copytree(demo_workspace, target)
    # the lock file may be owned by the session fixture; drop the copy
    lock = target / "lake" / ".lock"
    if lock.exists():
        lock.unlink()
    return target
