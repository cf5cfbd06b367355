"""Bigraded charts: column ``-weight``, row ``t = weight + internal degree``."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .hopfss import BarcodeModule, Series


@dataclass
class ChartTable:
    """Cell dimensions ``entries[(s, t)]`` with ``s <= 0``, plus names of primitives."""

    entries: dict[tuple[int, int], int] = field(default_factory=dict)
    annotations: dict[tuple[int, int], list[str]] = field(default_factory=dict)
    title: str = ""

    @classmethod
    def from_series(cls, series: Series, V: BarcodeModule | None = None, title: str = "", max_t: int | None = None):
        entries = {}
        for (w, n), c in series.items():
            if c and (max_t is None or w + n <= max_t):
                entries[(-w, w + n)] = c
        notes: dict[tuple[int, int], list[str]] = {}
        if V is not None:
            for k in range(V.K + 1):
                for d in V.degrees(k):
                    key = (-(2 ** k), 2 ** k + d)
                    if key in entries:
                        notes.setdefault(key, []).extend(V.label(k, d))
        return cls(dict(sorted(entries.items())), dict(sorted(notes.items())), title)

    def totals(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (_, t), c in self.entries.items():
            out[t] = out.get(t, 0) + c
        return dict(sorted(out.items()))

    def bottom_entries(self) -> dict[int, tuple[int, int]]:
        """Lowest occupied row in each column: ``{s: (t, dim)}``."""
        out: dict[int, tuple[int, int]] = {}
        for (s, t), c in sorted(self.entries.items(), key=lambda kv: kv[0][1]):
            out.setdefault(s, (t, c))
        return dict(sorted(out.items(), reverse=True))

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "entries": [{"s": s, "t": t, "dim": c} for (s, t), c in self.entries.items()],
            "annotations": [{"s": s, "t": t, "names": names} for (s, t), names in self.annotations.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ChartTable":
        entries = {(e["s"], e["t"]): e["dim"] for e in data.get("entries", [])}
        notes = {(a["s"], a["t"]): list(a["names"]) for a in data.get("annotations", [])}
        return cls(dict(sorted(entries.items())), dict(sorted(notes.items())), data.get("title", ""))


def _text(t: ChartTable) -> str:
    lines = [t.title] if t.title else []
    cols = sorted({s for s, _ in t.entries} | {-1}, reverse=True)
    cols = list(range(cols[0], cols[-1] - 1, -1))
    rows = sorted({r for _, r in t.entries}, reverse=True)
    width = max([len(str(c)) for c in cols] + [len(str(v)) for v in t.entries.values()] + [2])
    lab = max([len(str(r)) for r in rows] + [3])
    lines.append("t".rjust(lab) + " | " + " ".join(str(c).rjust(width) for c in cols))
    lines.append("-" * lab + "-+-" + "-" * ((width + 1) * len(cols) - 1))
    for r in rows:
        cells = [str(t.entries.get((c, r), "")).rjust(width) for c in cols]
        lines.append(str(r).rjust(lab) + " | " + " ".join(cells).rstrip())
    if t.annotations:
        lines.append("")
        lines.append("primitives:")
        for (s, r), names in t.annotations.items():
            lines.append(f"  ({s},{r}): {', '.join(names)}")
    return "\n".join(lines) + "\n"


def _csv(t: ChartTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "t", "dim", "primitives"])
    for (s, r), c in t.entries.items():
        w.writerow([s, r, c, ";".join(t.annotations.get((s, r), []))])
    return buf.getvalue()


def read_csv(text: str, title: str = "") -> ChartTable:
    entries, notes = {}, {}
    for row in csv.DictReader(io.StringIO(text)):
        key = (int(row["s"]), int(row["t"]))
        entries[key] = int(row["dim"])
        if row["primitives"]:
            notes[key] = row["primitives"].split(";")
    return ChartTable(entries, notes, title)


def render_chart(t: ChartTable, fmt: str = "text") -> str:
    if fmt == "text":
        return _text(t)
    if fmt == "json":
        return json.dumps(t.to_json(), indent=1) + "\n"
    if fmt == "csv":
        return _csv(t)
    raise ValueError(f"unknown format {fmt!r}")
