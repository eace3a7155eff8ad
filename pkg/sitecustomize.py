from __future__ import annotations
import sys, pathlib
root = pathlib.Path(__file__).resolve().parent
src = root / "src"
if src.is_dir() and str(src) not in sys.path:
    sys.path.insert(0, str(src))
