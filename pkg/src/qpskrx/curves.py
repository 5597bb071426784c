"""Error-curve container and CSV serialization shared by the optimizer, service, and CLI."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

CSV_HEADER = "alpha_sq,p_error,std_err,method,label"


def format_sig(x: float) -> str:
    """Render a float with 12 significant digits."""
    return format(float(x), ".12g")


@dataclass(frozen=True)
class CurveRow:
    """One curve point: error estimate at a signal energy, tagged by method and label."""

    alpha_sq: float
    p_error: float
    std_err: float
    method: str
    label: str

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_error <= 1.0):
            raise ValueError("p_error must lie in [0, 1]")
        if self.std_err < 0.0:
            raise ValueError("std_err must be >= 0")
        if "," in self.method or "," in self.label:
            raise ValueError("method and label must not contain commas")


@dataclass(frozen=True)
class ErrorCurve:
    """Ordered curve rows; within each label the grid must ascend."""

    rows: tuple[CurveRow, ...]

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        last: dict[str, float] = {}
        for row in rows:
            if row.label in last and row.alpha_sq <= last[row.label]:
                raise ValueError(f"alpha_sq must ascend within label {row.label!r}")
            last[row.label] = row.alpha_sq
        object.__setattr__(self, "rows", rows)

    def __iter__(self) -> Iterator[CurveRow]:
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def by_label(self, label: str) -> "ErrorCurve":
        return ErrorCurve(rows=tuple(r for r in self.rows if r.label == label))

    def to_csv(self) -> str:
        """CSV text: fixed header, 12-significant-digit floats, LF line endings."""
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{format_sig(r.alpha_sq)},{format_sig(r.p_error)},"
                f"{format_sig(r.std_err)},{r.method},{r.label}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def concat_curves(curves: Iterable[ErrorCurve]) -> ErrorCurve:
    """Concatenate label-disjoint curves into one table."""
    rows: list[CurveRow] = []
    for curve in curves:
        rows.extend(curve.rows)
    return ErrorCurve(rows=tuple(rows))
