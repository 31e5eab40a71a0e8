"""Shared helpers for the test suite."""

import json
from pathlib import Path

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
