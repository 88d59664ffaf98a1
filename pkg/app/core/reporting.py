"""Deterministic JSON and CSV emission for reports."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from pydantic import BaseModel

SCHEMA_VERSION = 1


def _finite(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def envelope(command: str, report: BaseModel | dict[str, Any], *, seed: int | None = None) -> dict[str, Any]:
    payload = report.model_dump(mode="json") if isinstance(report, BaseModel) else report
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "report": payload,
    }


def dumps_json(payload: dict[str, Any]) -> str:
    # Sorted keys + repr floats make identical runs byte-identical.
    return json.dumps(_finite(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if isinstance(v, float) and not math.isfinite(v) else v for v in row])
    return buffer.getvalue()


def write_text(text: str, path: Path | None) -> None:
    if path is None:
        print(text, end="")
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
