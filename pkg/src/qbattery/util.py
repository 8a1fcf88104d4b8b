"""Output formatting shared by the file writers."""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

SIG_DIGITS = 12


def fmt_float(x: float) -> float:
    """Round to 12 significant digits so printed output is reproducible."""
    x = float(x)
    if not math.isfinite(x) or x == 0.0:
        return 0.0 if x == 0.0 else x
    return float(f"{x:.{SIG_DIGITS}g}")


def clean(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and round floats."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return clean(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return fmt_float(obj)
    return obj


def write_json(path: str | Path, payload: Any) -> None:
    text = json.dumps(clean(payload), indent=2, sort_keys=True, allow_nan=True)
    Path(path).write_text(text + "\n")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    try:
        f = float(v)
    except (TypeError, ValueError):
        return str(v)
    return f"{f:.{SIG_DIGITS}g}"
