"""Loading of the bundled reference tables.

The tables ship as one versioned JSON file transcribed once from the source
material; pipelines recompute everything independently and diff against them
cell by cell.  Set QHPP_FIXTURES to point at an alternative file.
"""

from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources

ENV_VAR = "QHPP_FIXTURES"


def fixtures_path() -> str | None:
    """Explicit fixture path from the environment, if any."""
    return os.environ.get(ENV_VAR)


@lru_cache(maxsize=4)
def _load(path: str | None) -> dict:
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    ref = resources.files("qhpp.data").joinpath("reference_tables.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_fixtures() -> dict:
    return _load(fixtures_path())
