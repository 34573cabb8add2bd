"""Small helpers for deterministic JSON/file output."""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Union


def sig6(x: float) -> float:
    """Round to 6 significant digits (the precision of every JSON/CSV number)."""
    if not math.isfinite(x):
        return x
    return float(f"{x:.6g}")


def rounded(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return sig6(obj)
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def dump_json(obj: Any, path: Union[str, Path]) -> None:
    text = json.dumps(rounded(obj), indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def sha256_file(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
