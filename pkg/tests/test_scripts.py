import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize(
    "argv,expect",
    [
        (["symbolic_sweep.py", "A1", "A2"], "all ok"),
        (["invariants_all.py", "--max-rank", "2"], "0 failing suites"),
        (["zero_scan.py", "A1", "--t-max", "20"], "A1 p=1"),
    ],
)
def test_script_runs(argv, expect):
    res = subprocess.run([sys.executable, str(SCRIPTS / argv[0]), *argv[1:]], capture_output=True, text=True, timeout=300)
    assert res.returncode == 0, res.stderr
    assert expect in res.stdout
