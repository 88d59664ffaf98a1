"""Run the finsler command-line tool from a source checkout.

Usage:
  python scripts/finsler.py classify --phi randers --fixture standard
  python scripts/finsler.py suite --seed 0 --out reports/suite.json

Tolerances can also be set in .env (FINSLER_TOL, FINSLER_GUARD, ...).
"""

from __future__ import annotations

import sys
from pathlib import Path

# 프로젝트 루트 디렉토리를 Python 경로에 추가
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
