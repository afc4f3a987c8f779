import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def files(tmp_path):
    """Small input documents on Z4 used by the CLI and I/O tests."""
    h = 2 ** -0.5
    return {
        "delta0": _write(tmp_path / "delta0.json", {"group": [4], "values": [[1, 0], [0, 0], [0, 0], [0, 0]]}),
        "delta1": _write(tmp_path / "delta1.json", {"group": [4], "values": [[0, 0], [1, 0], [0, 0], [0, 0]]}),
        "basis3": _write(tmp_path / "basis3.json", {"group": [4], "values": [[0, 0], [0, 0], [0, 0], [1, 0]]}),
        "const": _write(tmp_path / "const.json", {"group": [4], "values": [[0.5, 0]] * 4}),
        "rect": _write(tmp_path / "rect.json", {"group": [4], "subgroup": "div:2", "values": [[h, 0], [h, 0], [0, 0], [0, 0]]}),
        "phases0": _write(tmp_path / "phases0.json", {"group": [4], "subgroup": "div:2", "kind": "phases", "phases": [[0, 1]] * 4}),
        "dir": tmp_path,
    }
