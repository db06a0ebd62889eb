"""CSV emission: comma-separated, '.' decimal point, 17 significant digits
for floats (lossless double round-trip), with a leading metadata comment
block so runs are self-describing."""

from __future__ import annotations

import csv
import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence


def format_number(x) -> str:
    """Lossless text form of a numeric value."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{float(x):.17g}"
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return f"{float(x):.17g}"


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form of a config document."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def write_csv(
    path,
    header: Sequence[str],
    rows: Iterable[Sequence[str]],
    meta: dict | None = None,
) -> None:
    """Write rows under a header, preceded by '# key: value' comment lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
