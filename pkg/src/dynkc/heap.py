"""Indexed binary min-heap with delete-by-item."""

from __future__ import annotations


class IndexedMinHeap:
    """Entries are (key, item) with item unique; ties on key go to the smaller
    item because tuples compare lexicographically."""

    __slots__ = ("heap", "pos")

    def __init__(self):
        self.heap: list[tuple[float, int]] = []
        self.pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.heap)

    def __contains__(self, item: int) -> bool:
        return item in self.pos

    def key_of(self, item: int) -> float:
        return self.heap[self.pos[item]][0]

    def push(self, item: int, key: float) -> None:
        if item in self.pos:
            raise KeyError(f"{item} already in heap")
        self.heap.append((key, item))
        self.pos[item] = len(self.heap) - 1
        self._up(len(self.heap) - 1)

    def min(self) -> tuple[float, int] | None:
        return self.heap[0] if self.heap else None

    def two_smallest(self) -> list[tuple[float, int]]:
        h = self.heap
        if len(h) <= 1:
            return list(h)
        second = h[1] if len(h) == 2 or h[1] < h[2] else h[2]
        return [h[0], second]

    def remove(self, item: int) -> None:
        i = self.pos.pop(item)
        last = self.heap.pop()
        if i < len(self.heap):
            self.heap[i] = last
            self.pos[last[1]] = i
            self._up(i)
            self._down(self.pos[last[1]])

    def discard(self, item: int) -> None:
        if item in self.pos:
            self.remove(item)

    def items(self):
        return [(item, key) for key, item in self.heap]

    def _up(self, i: int) -> None:
        h, pos = self.heap, self.pos
        e = h[i]
        while i > 0:
            parent = (i - 1) >> 1
            if h[parent] <= e:
                break
            h[i] = h[parent]
            pos[h[i][1]] = i
            i = parent
        h[i] = e
        pos[e[1]] = i

    def _down(self, i: int) -> None:
        h, pos = self.heap, self.pos
        n = len(h)
        e = h[i]
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            if c + 1 < n and h[c + 1] < h[c]:
                c += 1
            if e <= h[c]:
                break
            h[i] = h[c]
            pos[h[i][1]] = i
            i = c
        h[i] = e
        pos[e[1]] = i

    def check(self) -> None:
        h = self.heap
        for i in range(1, len(h)):
            assert h[(i - 1) >> 1] <= h[i]
        for item, i in self.pos.items():
            assert h[i][1] == item
