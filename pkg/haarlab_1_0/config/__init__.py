# -*- coding: utf-8 -*-
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

import yaml

PROFILES_PATH = Path(__file__).resolve().parent / "profiles.yaml"


def load_profiles(path: Optional[Path] = None) -> Dict[str, Any]:
    with open(path or PROFILES_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)["profiles"]
