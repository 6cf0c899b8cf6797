"""Shared plumbing for the dynamic clusterers."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .metric import MetricSpace
from .stream import StreamValidationError, UpdateEvent


@dataclass
class UpdateResult:
    recourse: int
    work: int
    size: int


class TrackedMultiset:
    """Counted multiset that logs net count changes since the last reset."""

    def __init__(self, items=()):
        self.counts: Counter = Counter(items)
        self.delta: dict[int, int] = {}
        self.total = sum(self.counts.values())

    def _bump(self, x: int, d: int) -> None:
        v = self.delta.get(x, 0) + d
        if v:
            self.delta[x] = v
        else:
            self.delta.pop(x, None)

    def add(self, x: int) -> None:
        self.counts[x] += 1
        self.total += 1
        self._bump(x, 1)

    def remove_one(self, x: int) -> bool:
        c = self.counts.get(x, 0)
        if not c:
            return False
        if c == 1:
            del self.counts[x]
        else:
            self.counts[x] = c - 1
        self.total -= 1
        self._bump(x, -1)
        return True

    def remove_all(self, x: int) -> int:
        c = self.counts.pop(x, 0)
        if c:
            self.total -= c
            self._bump(x, -c)
        return c

    def __contains__(self, x: int) -> bool:
        return x in self.counts

    def support(self) -> set[int]:
        return set(self.counts)

    def reset_delta(self) -> None:
        self.delta = {}

    def recourse(self) -> int:
        return sum(abs(v) for v in self.delta.values())

    def support_delta(self) -> tuple[list[int], list[int]]:
        """(removed, added) support elements since the last reset."""
        gone, new = [], []
        for x, v in self.delta.items():
            now = self.counts.get(x, 0)
            before = now - v
            if before and not now:
                gone.append(x)
            elif now and not before:
                new.append(x)
        return sorted(gone), sorted(new)


def set_recourse(before: set, after: set) -> int:
    """Half the symmetric difference for equal sizes, else its full size."""
    diff = len(before ^ after)
    return diff // 2 if len(before) == len(after) else diff


class Clusterer:
    """apply() registers the point with the metric, then dispatches."""

    name = "base"

    def __init__(self, metric: MetricSpace):
        self.metric = metric
        self.P: set[int] = set()

    @property
    def n(self) -> int:
        return len(self.P)

    def apply(self, ev: UpdateEvent) -> UpdateResult:
        if ev.is_insert:
            if ev.id in self.P or self.metric.is_known(ev.id):
                raise StreamValidationError(f"id {ev.id} is not fresh")
            self.metric.add_point(ev.id, ev.coords)
            return self.insert(ev.id)
        if ev.id not in self.P:
            raise StreamValidationError(f"id {ev.id} is not live")
        res = self.delete(ev.id)
        self.metric.remove_point(ev.id)
        return res

    def insert(self, p: int) -> UpdateResult:
        raise NotImplementedError

    def delete(self, p: int) -> UpdateResult:
        raise NotImplementedError

    def solution(self) -> set[int]:
        raise NotImplementedError
