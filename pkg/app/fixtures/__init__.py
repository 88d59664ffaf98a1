"""Bundled metric-point fixtures."""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import ValidationError

from app.core.errors import ConfigError
from app.models.geometry import MetricPoint
from app.schemas.fixture import MetricPointIn

FIXTURE_DIR = Path(__file__).parent


def available() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


def load_fixture(name_or_path: str | Path) -> MetricPoint:
    """Load a bundled fixture by name (``"standard"``) or any JSON file path."""

    path = Path(name_or_path)
    if not path.suffix:
        path = FIXTURE_DIR / f"{path.name}.json"
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"fixture {name_or_path} not found (bundled: {', '.join(available())})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"fixture {path} is not valid JSON: {exc}") from exc
    try:
        return MetricPointIn.model_validate(raw).to_metric_point()
    except ValidationError as exc:
        raise ConfigError(f"fixture {path} is malformed: {exc.errors()[0]['msg']}") from exc
