"""Validated p-value sets and the empirical functionals the decision rules use."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptyInput,
    IndexOutOfRange,
    NonFinite,
    OutOfRange,
    PValueFileError,
)

# p-values are clamped to 1 - LOG_GUARD before taking log(1 - p)
LOG_GUARD = 1e-12


class PValueSet:
    """An immutable collection of m p-values with a stable sort order.

    Ties keep their input order in ``sorted_index``, so "the N smallest
    p-values" is always a well defined set of positions.
    """

    __slots__ = ("_values", "_sorted_index", "_sorted", "_log1", "_log2", "_log_cumsum")

    def __init__(self, values: Sequence[float] | np.ndarray):
        arr = np.array(values, dtype=float).ravel()
        if arr.size == 0:
            raise EmptyInput("at least one p-value is required")
        finite = np.isfinite(arr)
        if not finite.all():
            raise NonFinite(int(np.argmin(finite)))
        bad = (arr < 0.0) | (arr > 1.0)
        if bad.any():
            i = int(np.argmax(bad))
            raise OutOfRange(i, float(arr[i]))
        arr.setflags(write=False)
        order = np.argsort(arr, kind="stable")
        order.setflags(write=False)
        srt = arr[order]
        srt.setflags(write=False)
        self._values = arr
        self._sorted_index = order
        self._sorted = srt
        self._log1 = None
        self._log2 = None
        self._log_cumsum = None

    @classmethod
    def load(cls, raw: Iterable[float]) -> "PValueSet":
        return cls(list(raw) if not isinstance(raw, np.ndarray) else raw)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def m(self) -> int:
        return int(self._values.size)

    @property
    def sorted_index(self) -> np.ndarray:
        return self._sorted_index

    @property
    def sorted_values(self) -> np.ndarray:
        return self._sorted

    def __len__(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return f"PValueSet(m={self.m})"

    def count_leq(self, t: float) -> int:
        """Number of p-values with p <= t (inclusive)."""
        _check_unit(t, "t")
        return int(np.searchsorted(self._sorted, t, side="right"))

    def ecdf_at(self, t: float) -> float:
        return self.count_leq(t) / self.m

    def _guarded_log(self) -> np.ndarray:
        # log(1 - p~) in sorted order, p~ = min(p, 1 - LOG_GUARD)
        return np.log1p(-np.minimum(self._sorted, 1.0 - LOG_GUARD))

    def log_moment(self, power: int) -> float:
        """Mean of log(1 - p)**power over the set, with p clamped below 1."""
        if power == 1:
            if self._log1 is None:
                self._log1 = float(np.mean(self._guarded_log()))
            return self._log1
        if power == 2:
            if self._log2 is None:
                self._log2 = float(np.mean(self._guarded_log() ** 2))
            return self._log2
        raise DomainError(f"power must be 1 or 2, got {power!r}")

    def log_sum_leq(self, t: float) -> float:
        """Sum of log(1 - p) over the p-values with p <= t."""
        if self._log_cumsum is None:
            self._log_cumsum = np.concatenate(([0.0], np.cumsum(self._guarded_log())))
        return float(self._log_cumsum[self.count_leq(t)])

    def kth_smallest(self, k: int) -> float:
        if not 1 <= k <= self.m:
            raise IndexOutOfRange(f"k must lie in [1, {self.m}], got {k}")
        return float(self._sorted[k - 1])

    def serialize(self) -> str:
        """One p-value per line, shortest round-tripping repr."""
        return "".join(f"{v!r}\n" for v in self._values.tolist())


def load(raw: Iterable[float]) -> PValueSet:
    return PValueSet.load(raw)


def _check_unit(t: float, name: str) -> None:
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {t!r}")


def _parse_value(token: str, path, line: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise PValueFileError(path, line, f"not a number: {token!r}") from None
    if not math.isfinite(v):
        raise PValueFileError(path, line, f"non-finite value: {token!r}")
    if not 0.0 <= v <= 1.0:
        raise PValueFileError(path, line, f"p-value outside [0, 1]: {token!r}")
    return v


def read_pvalues(path: str | Path, column: str | None = None) -> PValueSet:
    """Read p-values from a text file.

    Without ``column`` the file holds one value per line; blank lines and
    lines starting with ``#`` are skipped. With ``column`` the file is read
    as CSV and the named column is used.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PValueFileError(path, None, f"cannot read file ({exc.strerror})") from None

    values: list[float] = []
    if column is None:
        for lineno, line in enumerate(text.splitlines(), start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            values.append(_parse_value(s, path, lineno))
    else:
        lines = [ln for ln in text.splitlines()]
        reader = csv.reader(lines)
        header = None
        col = None
        for lineno, row in enumerate(reader, start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [h.strip().strip('"') for h in row]
                if column not in header:
                    raise PValueFileError(path, lineno, f"column {column!r} not found in header")
                col = header.index(column)
                continue
            if col >= len(row):
                raise PValueFileError(path, lineno, f"row has no column {column!r}")
            values.append(_parse_value(row[col].strip(), path, lineno))
    if not values:
        raise PValueFileError(path, None, "no p-values found")
    return PValueSet(values)
