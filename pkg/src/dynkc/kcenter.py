"""Deterministic fully dynamic k-center with recourse 1.

Clusters live in k slots. A slot's label is regular (every member within r of
the center), extended (non-zombie, may hold farther points after absorbing a
neighbour) or zombie (its center was replaced, or it has none yet). The radius
estimate r walks a geometric ladder r0*(1+delta)^j. Every point keeps two
indexed heaps over the centers: all of them, and the non-zombie ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Clusterer, UpdateResult, set_recourse
from .heap import IndexedMinHeap
from .metric import MetricSpace
from .params import Params

REGULAR, EXTENDED, ZOMBIE = "regular", "extended", "zombie"
LADDER_FLOOR = -64  # r0 * 1.5**-64 is ~5e-12 * r0


@dataclass
class Slot:
    center: int | None
    members: set[int] = field(default_factory=set)
    label: str = REGULAR


@dataclass
class SearchResult:
    sequence: list[int] | None  # p_1, c_2, p_2, ..., c_l, p_l
    explore: dict[int, list[int]]
    blocked: dict[int, int]
    visited: list[int]


class KCenter(Clusterer):
    name = "kcenter"

    def __init__(self, metric: MetricSpace, params: Params, initial=(), debug: bool = False,
                 check: bool = False):
        super().__init__(metric)
        params.check_kcenter()
        self.k = params.k
        self.delta = params.delta
        self.debug = debug
        self.checking = check
        self.slots: list[Slot | None] = [None] * self.k
        self.owner: dict[int, int] = {}
        self.center_slot: dict[int, int] = {}
        self.H: dict[int, IndexedMinHeap] = {}
        self.Hnz: dict[int, IndexedMinHeap] = {}
        self.level = 0
        self.events: list[str] = []  # which branch handled each update
        self.on_c2 = None  # test hook, called as on_c2(self, slot) before a search
        initial = sorted(initial)
        self.r0 = self._base_radius(initial)
        for p in initial:
            self.insert(p)

    def _base_radius(self, ids: list[int]) -> float:
        if len(ids) < 2:
            return 1.0
        m = self.metric.dist_matrix(ids, ids, count=False)
        pos = m[m > 0]
        return float(pos.min()) if len(pos) else 1.0

    # -- ladder

    def radius_at(self, j: int) -> float:
        return self.r0 * (1 + self.delta) ** j

    @property
    def r(self) -> float:
        return self.radius_at(self.level)

    def _level_covering(self, d: float) -> int:
        """Smallest ladder level j >= LADDER_FLOOR with radius_at(j) >= d."""
        if d <= self.radius_at(LADDER_FLOOR):
            return LADDER_FLOOR
        j = max(LADDER_FLOOR, math.ceil(math.log(d / self.r0) / math.log(1 + self.delta)))
        while self.radius_at(j) < d:
            j += 1
        while j > LADDER_FLOOR and self.radius_at(j - 1) >= d:
            j -= 1
        return j

    # -- views

    def centers(self) -> list[int]:
        return [s.center for s in self.slots if s is not None and s.center is not None]

    def solution(self) -> set[int]:
        return set(self.centers())

    def n_centers(self) -> int:
        return len(self.center_slot)

    def _d(self, p: int, c: int) -> float:
        return self.H[p].key_of(c)[0]

    def _dS(self, p: int) -> float:
        m = self.H[p].min()
        return math.inf if m is None else m[0][0]

    def _far(self, q: int, s: Slot) -> bool:
        return s.center is None or self._d(q, s.center) > self.r

    # -- heap maintenance

    def _add_center(self, c: int, slot: int, label: str) -> None:
        pts = sorted(self.P)
        ds = self.metric.dists(c, pts)
        nz = label != ZOMBIE
        for p, d in zip(pts, ds.tolist()):
            self.H[p].push(c, (d, c))
            if nz:
                self.Hnz[p].push(c, (d, c))
        self.center_slot[c] = slot

    def _drop_center(self, c: int) -> None:
        for p in self.P:
            self.H[p].discard(c)
            self.Hnz[p].discard(c)
        del self.center_slot[c]

    def _set_label(self, s: Slot, label: str) -> None:
        old = s.label
        s.label = label
        c = s.center
        if c is None or (old == ZOMBIE) == (label == ZOMBIE):
            return
        if label == ZOMBIE:
            for p in self.P:
                self.Hnz[p].discard(c)
        else:
            for p in self.P:
                self.Hnz[p].push(c, self.H[p].key_of(c))

    def _move(self, q: int, dst: int) -> None:
        src = self.owner[q]
        if src == dst:
            return
        self.slots[src].members.discard(q)
        self.slots[dst].members.add(q)
        self.owner[q] = dst

    def _tight(self, s: Slot) -> bool:
        r = self.r
        c = s.center
        return c is not None and all(self._d(q, c) <= r for q in s.members)

    # -- updates

    def insert(self, p: int) -> UpdateResult:
        evals0 = self.metric.evals
        before = self.solution()
        self.P.add(p)
        self.H[p] = IndexedMinHeap()
        self.Hnz[p] = IndexedMinHeap()
        cs = sorted(self.center_slot)
        if cs:
            ds = self.metric.dists(p, cs)
            for c, d in zip(cs, ds.tolist()):
                self.H[p].push(c, (d, c))
                if self.slots[self.center_slot[c]].label != ZOMBIE:
                    self.Hnz[p].push(c, (d, c))
        self._insert_body(p)
        self._decreasing()
        return self._done(before, evals0)

    def _insert_body(self, p: int) -> None:
        r = self.r
        m = self.Hnz[p].min()
        if m is not None and m[0][0] <= r:
            self._join(p, self.center_slot[m[1]])
            self.events.append("join")
            return
        if self.n_centers() < self.k:
            j = self.slots.index(None) if None in self.slots else self._free_slot()
            self.slots[j] = Slot(p, {p}, REGULAR)
            self.owner[p] = j
            self._add_center(p, j, REGULAR)
            self.events.append("open")
            return
        pair = self._close_pair()
        if pair is not None:
            self._absorb_and_refill(*pair, p)
            self.events.append("absorb")
            return
        self._increasing()
        far, dfar = self._farthest()
        if dfar > self.r:
            pair = self._close_pair()
            assert pair is not None, "increasing operation left a witness"
            if far != p:
                self._detach(far)
            self._absorb_and_refill(*pair, far)
            self.events.append("raise+absorb")
            if far != p:
                self._join_nearest(p)
        else:
            self._join_nearest(p)
            self.events.append("raise")

    def _free_slot(self) -> int:
        # a slot whose center is missing but which is not yet released
        for j, s in enumerate(self.slots):
            if s is not None and s.center is None and not s.members:
                return j
        raise RuntimeError("no free slot")

    def _join(self, p: int, slot: int) -> None:
        s = self.slots[slot]
        s.members.add(p)
        self.owner[p] = slot
        if s.label == REGULAR and self._far(p, s):
            self._set_label(s, EXTENDED)

    def _join_nearest(self, p: int) -> None:
        m = self.H[p].min()
        self._join(p, self.center_slot[m[1]])

    def _detach(self, q: int) -> None:
        s = self.owner.pop(q)
        self.slots[s].members.discard(q)

    def _close_pair(self) -> tuple[int, int] | None:
        r = self.r
        for j, s in enumerate(self.slots):
            if s is None or s.center is None:
                continue
            c = s.center
            for d, o in self.H[c].two_smallest():
                if o != c:
                    if d[0] <= r:
                        i2 = self.center_slot[o]
                        return (min(i2, j), max(i2, j))
                    break
        return None

    def _min_pair(self) -> float:
        best = math.inf
        for c in self.center_slot:
            for d, o in self.H[c].two_smallest():
                if o != c:
                    best = min(best, d[0])
                    break
        return best

    def _farthest(self) -> tuple[int | None, float]:
        best, bd = None, -1.0
        for q in sorted(self.P):
            d = self._dS(q)
            if d > bd:
                best, bd = q, d
        return best, bd

    def _absorb_and_refill(self, i: int, j: int, x: int) -> None:
        """Slot i takes slot j's points; slot j is refilled by a zombie center
        near x (which brings x along) or by x itself."""
        si, sj = self.slots[i], self.slots[j]
        cj = sj.center
        for q in sj.members:
            self.owner[q] = i
        si.members |= sj.members
        self.slots[j] = None
        self._drop_center(cj)
        if si.label != ZOMBIE:
            self._set_label(si, REGULAR if self._tight(si) else EXTENDED)
        r = self.r
        m = self.H[x].min()
        if m is not None and m[0][0] <= r and self.slots[self.center_slot[m[1]]].label == ZOMBIE:
            cz = m[1]
            z = self.center_slot[cz]
            sz = self.slots[z]
            keep = {q for q in sz.members if self._d(q, cz) <= r}
            rest = sz.members - keep
            self.slots[z] = Slot(None, rest, ZOMBIE)
            ns = Slot(cz, keep | {x}, ZOMBIE)
            self.slots[j] = ns
            for q in ns.members:
                self.owner[q] = j
            self.center_slot[cz] = j
            self._set_label(ns, REGULAR)
            self.events.append("refill-zombie")
            if rest:
                self._resolve_orphan(z)
            else:
                self.slots[z] = None
        else:
            self.slots[j] = Slot(x, {x}, REGULAR)
            self.owner[x] = j
            self._add_center(x, j, REGULAR)

    def _increasing(self) -> None:
        _, dfar = self._farthest()
        target = min(dfar, self._min_pair())
        if target <= self.r or target == math.inf:
            return
        self.level = max(self.level, self._level_covering(target))
        r = self.r
        for s_idx, s in enumerate(self.slots):
            if s is None:
                continue
            for q in sorted(s.members):
                if q == s.center or not self._far(q, s):
                    continue
                m = self.H[q].min()
                if m is not None and m[0][0] <= r:
                    self._move(q, self.center_slot[m[1]])
        for s in self.slots:
            if s is not None and s.center is not None and self._tight(s):
                self._set_label(s, REGULAR)

    def _decreasing(self) -> None:
        if not self.P or not self.center_slot:
            return
        maxd = max(self._dS(q) for q in self.P)
        if maxd < math.inf:
            j2 = self._level_covering(maxd)
            if j2 < self.level:
                self.level = j2
                for q in sorted(self.P):
                    c = q if q in self.center_slot else self.H[q].min()[1]
                    self._move(q, self.center_slot[c])
                for idx, s in enumerate(self.slots):
                    if s is None:
                        continue
                    if s.center is None:
                        assert not s.members
                        self.slots[idx] = None
                    else:
                        self._set_label(s, REGULAR)
        self._relabel_tight()
        r = self.r
        for s in list(self.slots):
            if s is None or s.label == REGULAR:
                continue
            for q in sorted(s.members):
                if q == s.center or not self._far(q, s):
                    continue
                m = self.Hnz[q].min()
                if m is not None and m[0][0] <= r:
                    self._move(q, self.center_slot[m[1]])
        self._relabel_tight()
        for idx, s in enumerate(self.slots):
            if s is not None and s.center is None and not s.members:
                self.slots[idx] = None

    def _relabel_tight(self) -> None:
        for s in self.slots:
            if s is not None and s.label != REGULAR and self._tight(s):
                self._set_label(s, REGULAR)

    def delete(self, p: int) -> UpdateResult:
        evals0 = self.metric.evals
        before = self.solution()
        self.slots[self.owner.pop(p)].members.discard(p)
        self.P.remove(p)
        del self.H[p], self.Hnz[p]
        was_center = p in self.center_slot
        if was_center:
            s_idx = self.center_slot[p]
            s = self.slots[s_idx]
            self._drop_center(p)
            s.center = None
            s.label = ZOMBIE
        self._decreasing()
        if was_center:
            s = self.slots[s_idx]
            if s is not None and s.center is None:
                self._resolve_orphan(s_idx)
            self.events.append("delete-center")
        else:
            self.events.append("delete")
        return self._done(before, evals0)

    def _resolve_orphan(self, s_idx: int) -> None:
        """Slot without a center: promote a far member (C1), else shift a
        sequence of centers (C2a), else spread its members (C2b)."""
        s = self.slots[s_idx]
        if not s.members:
            self.slots[s_idx] = None
            return
        r = self.r
        best, bd = None, -1.0
        for q in sorted(s.members):
            d = self._dS(q)
            if d > r and d > bd:
                best, bd = q, d
        if best is not None:
            ds = self.metric.dists(best, sorted(s.members))
            s.center = best
            s.label = REGULAR if bool((ds <= r).all()) else ZOMBIE
            self._add_center(best, s_idx, s.label)
            self.events.append("C1")
            return
        if self.on_c2 is not None:
            self.on_c2(self, s_idx)
        res = self.find_sequence(s_idx)
        if res.sequence is not None:
            self.shift_sequence(s_idx, res.sequence)
            self.events.append("C2a")
        else:
            self.reassign_points(s_idx, res)
            self.events.append("C2b")

    # -- sequence search

    def _far_points(self, slot: int) -> list[int]:
        s = self.slots[slot]
        return sorted(q for q in s.members if q != s.center and self._far(q, s))

    def find_sequence(self, root: int) -> SearchResult:
        """Depth-first search from the centerless root slot. A far point whose
        nearest center is beyond r ends a sequence; otherwise that nearest
        center blocks it and its cluster is searched next."""
        r = self.r
        explore: dict[int, list[int]] = {}
        blocked: dict[int, int] = {}
        visited = [root]
        seen = {root}
        stack = [(root, iter(self._far_points(root)), [])]
        while stack:
            slot, it, path = stack[-1]
            q = next(it, None)
            if q is None:
                stack.pop()
                continue
            explore.setdefault(slot, []).append(q)
            m = self.H[q].min()
            if m is None or m[0][0] > r:
                return SearchResult(path + [q], explore, blocked, visited)
            c = m[1]
            blocked[q] = c
            cs = self.center_slot[c]
            if cs not in seen:
                seen.add(cs)
                visited.append(cs)
                stack.append((cs, iter(self._far_points(cs)), path + [q, c]))
        return SearchResult(None, explore, blocked, visited)

    def shift_sequence(self, root: int, seq: list[int]) -> None:
        """seq = p_1, c_2, p_2, ..., c_l, p_l: the slot of c_i takes c_(i+1) as
        its center, the last slot takes p_l. Each new center moves into the
        cluster it now serves; other members stay put."""
        cs = seq[1::2]
        chain = [root] + [self.center_slot[c] for c in cs]
        for a, c in zip(chain, cs):
            sa = self.slots[a]
            old = self.slots[self.center_slot[c]]
            if old.label != ZOMBIE:
                self._set_label(old, ZOMBIE)
            sa.center = c
            sa.label = ZOMBIE
            self.center_slot[c] = a
            self._move(c, a)
        last = self.slots[chain[-1]]
        last.center = seq[-1]
        last.label = ZOMBIE
        self._add_center(seq[-1], chain[-1], ZOMBIE)
        self._relabel_tight()

    def reassign_points(self, root: int, res: SearchResult) -> None:
        for slot, pts in res.explore.items():
            for q in pts:
                if q not in res.blocked:
                    raise RuntimeError(f"explored point {q} has no blocking center")
                self._move(q, self.center_slot[res.blocked[q]])
        for slot in res.visited:
            s = self.slots[slot]
            if s.center is None:
                assert not s.members, "root cluster not emptied"
                self.slots[slot] = None
            else:
                assert self._tight(s), "visited cluster not within r"
                self._set_label(s, REGULAR)

    # -- bookkeeping

    def _done(self, before: set[int], evals0: int) -> UpdateResult:
        after = self.solution()
        if self.debug:
            self.check_heaps()
        if self.checking:
            self.check()
        return UpdateResult(set_recourse(before, after), self.metric.evals - evals0, len(after))

    def check(self) -> None:
        seen = set()
        for idx, s in enumerate(self.slots):
            if s is None:
                continue
            assert s.center is not None, f"slot {idx} has no center"
            assert self.center_slot[s.center] == idx
            assert s.center in s.members, f"center of slot {idx} sits elsewhere"
            assert not (seen & s.members), "clusters overlap"
            seen |= s.members
            for q in s.members:
                assert self.owner[q] == idx
            if s.label == REGULAR:
                assert self._tight(s), f"regular slot {idx} exceeds r"
        assert seen == self.P, "clusters do not partition P"
        assert set(self.center_slot) <= self.P, "deleted point is still a center"
        assert len(self.center_slot) <= self.k

    def check_heaps(self) -> None:
        cs = sorted(self.center_slot)
        nz = [c for c in cs if self.slots[self.center_slot[c]].label != ZOMBIE]
        for p in self.P:
            h, hz = self.H[p], self.Hnz[p]
            h.check()
            hz.check()
            assert sorted(h.pos) == cs
            assert sorted(hz.pos) == nz
            if cs:
                d = self.metric.dists(p, cs, count=False)
                j = int(np.argmin(d))
                assert h.min() == ((float(d[j]), cs[j]), cs[j])

    def dump(self) -> dict:
        return {
            "r_delta": self.r,
            "level": self.level,
            "slots": [None if s is None else
                      {"center": s.center, "label": s.label, "members": sorted(s.members)}
                      for s in self.slots],
        }
