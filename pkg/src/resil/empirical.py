"""Recorded outage data for one event: step curves and area identities.

Each record is one component with its own outage time, restore time and
quantity. Outages are indexed in time order ``1..n``; the restore-order
permutation maps the k-th restore (in time) to the outage it clears.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import DomainError, ParseError, ValidationError

CSV_COLUMNS = ("component_id", "outage_time", "restore_time", "quantity")
REQUIRED_COLUMNS = CSV_COLUMNS[:3]


@dataclass(frozen=True)
class OutageRecord:
    component_id: str
    outage_time: float
    restore_time: float
    quantity: float = 1.0

    def __post_init__(self):
        for name in ("outage_time", "restore_time", "quantity"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(f"{self.component_id}: {name} must be finite")
            object.__setattr__(self, name, v)
        if self.restore_time < self.outage_time:
            raise ValidationError(
                f"{self.component_id}: restore_time {self.restore_time!r} "
                f"precedes outage_time {self.outage_time!r}"
            )
        if self.quantity <= 0:
            raise ValidationError(f"{self.component_id}: quantity must be > 0")

    @property
    def repair_time(self) -> float:
        return self.restore_time - self.outage_time


@dataclass(frozen=True)
class StepCurve:
    """Right-continuous step function.

    ``values[k]`` holds on ``[times[k], times[k+1])``; the curve is 0 before
    ``times[0]`` and keeps ``values[-1]`` after the last time.
    """

    times: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.times, t, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], 0.0)
        return float(out) if out.ndim == 0 else out

    def integral(self, t_end: float | None = None) -> float:
        """Exact integral from ``times[0]`` to ``t_end`` (default: the last time)."""
        t_end = self.times[-1] if t_end is None else t_end
        edges = np.minimum(np.append(self.times, t_end), t_end)
        return math.fsum(self.values * np.diff(edges))


class EmpiricalEvent:
    """One recorded event.

    Attributes:
        records: components sorted by outage time (file order breaks ties).
        outage_times, restore_times: sorted ``o_i`` and ``r_k`` arrays.
        quantities: ``c_i`` in outage order.
        restore_order: ``pi`` as 0-based indices; ``restore_order[k]`` is the
            outage index of the k-th restore.
        restore_of_outage: the inverse permutation.
    """

    def __init__(self, records: Iterable[OutageRecord]):
        records = list(records)
        if not records:
            raise ValidationError("event has no records")
        order = sorted(range(len(records)), key=lambda i: records[i].outage_time)
        self.records: tuple[OutageRecord, ...] = tuple(records[i] for i in order)
        self.n = len(self.records)
        self.outage_times = np.array([r.outage_time for r in self.records])
        self.quantities = np.array([r.quantity for r in self.records])
        own_restore = np.array([r.restore_time for r in self.records])
        pi = np.argsort(own_restore, kind="stable")
        self.restore_order: tuple[int, ...] = tuple(int(i) for i in pi)
        inv = np.empty(self.n, dtype=int)
        inv[pi] = np.arange(self.n)
        self.restore_of_outage: tuple[int, ...] = tuple(int(k) for k in inv)
        self.restore_times = own_restore[pi]

    @classmethod
    def from_arrays(
        cls,
        outage_times: Sequence[float],
        restore_times: Sequence[float],
        quantities: Sequence[float] | None = None,
        ids: Sequence[str] | None = None,
    ) -> "EmpiricalEvent":
        """Build from per-component columns; ``restore_times[i]`` belongs to outage ``i``."""
        n = len(outage_times)
        if len(restore_times) != n:
            raise ValidationError("outage_times and restore_times differ in length")
        quantities = [1.0] * n if quantities is None else quantities
        ids = [str(i + 1) for i in range(n)] if ids is None else ids
        return cls(
            OutageRecord(str(cid), o, r, c)
            for cid, o, r, c in zip(ids, outage_times, restore_times, quantities)
        )

    @property
    def total_quantity(self) -> float:
        return math.fsum(self.quantities)

    @property
    def repair_times(self) -> np.ndarray:
        return np.array([r.repair_time for r in self.records])

    def __repr__(self):
        return f"EmpiricalEvent(n={self.n}, total_quantity={self.total_quantity!r})"


def _read_rows(stream: TextIO) -> list[OutageRecord]:
    reader = csv.reader(stream)
    header = None
    for row in reader:
        if row and any(cell.strip() for cell in row):
            header = [h.strip() for h in row]
            break
    if header is None:
        raise ValidationError("empty event file")
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}", reader.line_num)
    col = {name: header.index(name) for name in CSV_COLUMNS if name in header}

    records = []
    for row in reader:
        line = reader.line_num
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
        cid = row[col["component_id"]].strip()
        try:
            o = float(row[col["outage_time"]])
            r = float(row[col["restore_time"]])
            qcell = row[col["quantity"]].strip() if "quantity" in col else ""
            c = float(qcell) if qcell else 1.0
        except ValueError as exc:
            raise ParseError(f"non-numeric field ({exc})", line) from None
        try:
            records.append(OutageRecord(cid, o, r, c))
        except ValidationError as exc:
            raise ParseError(str(exc), line) from None
    if not records:
        raise ValidationError("event file has a header but no records")
    return records


def load_event(csv_source: Union[str, os.PathLike, TextIO]) -> EmpiricalEvent:
    """Read an event CSV with columns ``component_id,outage_time,restore_time[,quantity]``.

    ``csv_source`` is a path or an open text stream. Times are decimal hours;
    a missing or blank quantity means 1.
    """
    if isinstance(csv_source, (str, os.PathLike)):
        with open(csv_source, newline="") as fh:
            return EmpiricalEvent(_read_rows(fh))
    return EmpiricalEvent(_read_rows(csv_source))


def loads_event(text: str) -> EmpiricalEvent:
    return load_event(io.StringIO(text))


def _step(times: np.ndarray, jumps: np.ndarray) -> StepCurve:
    uniq, inverse = np.unique(times, return_inverse=True)
    net = np.zeros(len(uniq))
    np.add.at(net, inverse, jumps)
    return StepCurve(uniq, np.cumsum(net))


def step_curves(e: EmpiricalEvent) -> tuple[StepCurve, StepCurve, StepCurve]:
    """Cumulative outages ``O``, cumulative restores ``R`` and ``P = R - O``."""
    c = e.quantities
    c_restore = c[list(e.restore_order)]
    O = _step(e.outage_times, c)
    R = _step(e.restore_times, c_restore)
    P = _step(
        np.concatenate([e.outage_times, e.restore_times]),
        np.concatenate([-c, c_restore]),
    )
    total = e.total_quantity
    O.values[-1] = total
    R.values[-1] = total
    # last breakpoint is the final restore; everything is back
    P.values[-1] = 0.0
    return O, R, P


def area_pairwise(e: EmpiricalEvent) -> float:
    """Quantity-weighted restore times minus quantity-weighted outage times."""
    c_restore = e.quantities[list(e.restore_order)]
    return math.fsum(np.concatenate([c_restore * e.restore_times, -e.quantities * e.outage_times]))


def area_repair(e: EmpiricalEvent) -> float:
    """Sum of quantity times repair time over components."""
    return math.fsum(e.quantities * e.repair_times)


def area_uniform(e: EmpiricalEvent, c_bar: float) -> float:
    """Area if every component carried quantity ``c_bar``: ``n * c_bar * (rbar - obar)``."""
    if not c_bar > 0:
        raise DomainError(f"c_bar must be > 0, got {c_bar!r}")
    return c_bar * math.fsum(np.concatenate([e.restore_times, -e.outage_times]))


@dataclass(frozen=True)
class EmpiricalReport:
    n: int
    total_quantity: float
    area: float
    area_pairwise: float
    nadir: float
    nadir_time: float
    duration: float
    mean_repair_time: float
    start_time: float
    end_time: float


def empirical_metrics(e: EmpiricalEvent) -> EmpiricalReport:
    _, _, P = step_curves(e)
    k = int(np.argmin(P.values))
    area = area_repair(e)
    total = e.total_quantity
    start = float(e.outage_times[0])
    end = float(e.restore_times[-1])
    return EmpiricalReport(
        n=e.n,
        total_quantity=total,
        area=area,
        area_pairwise=area_pairwise(e),
        nadir=max(0.0, -float(P.values[k])),
        nadir_time=float(P.times[k]),
        duration=end - start,
        mean_repair_time=area / total,
        start_time=start,
        end_time=end,
    )
