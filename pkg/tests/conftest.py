from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def mini_dir() -> Path:
    return REPO / "data" / "mini"


@pytest.fixture(scope="session")
def paper_totals_dir() -> Path:
    return REPO / "data" / "paper_totals"


@pytest.fixture(scope="session")
def mini_workspace(mini_dir):
    from shelteraccess.workspace import Workspace

    return Workspace.load(mini_dir)
