"""Report writers: JSON, aligned text tables, CSV, external score merging."""

from __future__ import annotations

import json
from collections import defaultdict
from pathlib import Path
from typing import Sequence


def format_table(headers: Sequence[str], rows: Sequence[Sequence], floatfmt: str = ".4f") -> str:
    cells = [[f"{v:{floatfmt}}" if isinstance(v, float) else str(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def write_json(data, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def merge_external_scores(path) -> dict:
    """Average externally computed per-pair scores by corpus label and metric.

    Each JSONL line: ``{"label": ..., "id": ..., "metric": ..., "score": float}``.
    """
    sums: dict[tuple[str, str], list[float]] = defaultdict(list)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                sums[(str(rec["label"]), str(rec.get("metric", "external")))].append(float(rec["score"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed external score line ({exc})") from None
    out: dict[str, dict[str, dict]] = {}
    for (label, metric), scores in sorted(sums.items()):
        out.setdefault(metric, {})[label] = {"mean": sum(scores) / len(scores), "n": len(scores)}
    return out
