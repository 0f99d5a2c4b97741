import json
import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def sweep_dir(tmp_path_factory):
    """A fresh sweep produced through the simulator's public CLI."""
    out_dir = tmp_path_factory.mktemp("sweep") / "out"
    subprocess.run(
        [sys.executable, "-m", "gridfreq.cli", "sweep", "--out-dir", str(out_dir)],
        check=True,
        capture_output=True,
        text=True,
    )
    return out_dir


@pytest.fixture(scope="session")
def sweep_report(sweep_dir):
    return json.loads((sweep_dir / "report.json").read_text())
