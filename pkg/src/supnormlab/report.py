"""Scan reports: fixed-schema rows, CSV/JSON serialization, bound checks.

Every scan in the package reports rows with the same columns
(name, k, y, x, lhs, envelope, ratio) so outputs from different suites can be
concatenated and diffed. Floats are serialized with 17 significant digits, and
serialization is deterministic: rerunning a scan must produce byte-identical
files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["fmt17", "ScanRow", "BoundCheck", "ScanReport"]


def fmt17(x) -> str:
    """17 significant digits; enough to round-trip any double exactly."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ScanRow:
    name: str
    k: float
    y: float
    x: float
    lhs: float
    envelope: float
    ratio: float


@dataclass(frozen=True)
class BoundCheck:
    """One certified inequality: lhs <= envelope up to the stated ratio."""

    name: str
    lhs: float
    envelope: float
    ratio: float
    params: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.ratio <= 1.0 + 1e-12


@dataclass
class ScanReport:
    suite: str
    rows: list[ScanRow]
    fitted_constant: float
    passed: bool

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    @property
    def argmax(self) -> ScanRow | None:
        best = None
        for r in self.rows:
            if best is None or r.ratio > best.ratio:
                best = r
        return best

    def to_csv_text(self) -> str:
        lines = ["name,k,y,x,lhs,envelope,ratio"]
        for r in self.rows:
            lines.append(",".join([
                r.name, fmt17(r.k), fmt17(r.y), fmt17(r.x),
                fmt17(r.lhs), fmt17(r.envelope), fmt17(r.ratio),
            ]))
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv_text())

    def to_json_text(self) -> str:
        am = self.argmax
        k, y, x = (am.k, am.y, am.x) if am is not None else (0.0, 0.0, 0.0)
        return ("{"
                f"\"suite\": \"{self.suite}\", "
                f"\"max_ratio\": {fmt17(self.max_ratio)}, "
                "\"argmax\": {"
                f"\"k\": {fmt17(k)}, \"y\": {fmt17(y)}, \"x\": {fmt17(x)}"
                "}, "
                f"\"fitted_constant\": {fmt17(self.fitted_constant)}, "
                f"\"passed\": {'true' if self.passed else 'false'}"
                "}\n")

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json_text())
