"""Update stream format and adversary generators.

Line format: optional header `#dim d` or `#matrix path`, then `+ id x1 .. xd`,
`+ id` (matrix mode) or `- id`. Reals use repr, the shortest round-trip form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np


class StreamParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class StreamValidationError(ValueError):
    pass


class GeneratorExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class UpdateEvent:
    op: str  # "+" or "-"
    id: int
    coords: tuple[float, ...] | None = None

    @property
    def is_insert(self) -> bool:
        return self.op == "+"

    def line(self) -> str:
        if self.op == "-":
            return f"- {self.id}"
        if self.coords is None:
            return f"+ {self.id}"
        return "+ " + " ".join([str(self.id)] + [repr(float(x)) for x in self.coords])


def insert(pid: int, coords=None) -> UpdateEvent:
    return UpdateEvent("+", pid, None if coords is None else tuple(float(x) for x in coords))


def delete(pid: int) -> UpdateEvent:
    return UpdateEvent("-", pid)


@dataclass
class StreamFile:
    events: list[UpdateEvent]
    dim: int | None = None
    matrix: str | None = None


def validate_events(events: Iterable[UpdateEvent], dim: int | None = None) -> None:
    live: set[int] = set()
    last = -1
    for i, ev in enumerate(events):
        if ev.is_insert:
            if ev.id <= last:
                raise StreamValidationError(f"event {i}: id {ev.id} is not fresh")
            if dim is not None and ev.coords is not None and len(ev.coords) != dim:
                raise StreamValidationError(f"event {i}: expected {dim} coordinates")
            last = ev.id
            live.add(ev.id)
        else:
            if ev.id not in live:
                raise StreamValidationError(f"event {i}: id {ev.id} is not live")
            live.remove(ev.id)


def read_stream(text: str) -> StreamFile:
    dim = None
    matrix = None
    events: list[UpdateEvent] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        if raw == "":
            continue
        if raw.startswith("#"):
            parts = raw[1:].split(" ")
            if events or dim is not None or matrix is not None:
                raise StreamParseError(lineno, "header must come first")
            if len(parts) == 2 and parts[0] == "dim":
                try:
                    dim = int(parts[1])
                except ValueError:
                    raise StreamParseError(lineno, "bad dimension") from None
                if dim < 1:
                    raise StreamParseError(lineno, "bad dimension")
            elif len(parts) == 2 and parts[0] == "matrix":
                matrix = parts[1]
            else:
                raise StreamParseError(lineno, f"unknown header {raw!r}")
            continue
        parts = raw.split(" ")
        if len(parts) < 2 or parts[0] not in ("+", "-"):
            raise StreamParseError(lineno, f"malformed event {raw!r}")
        try:
            pid = int(parts[1])
            coords = tuple(float(x) for x in parts[2:])
        except ValueError:
            raise StreamParseError(lineno, f"malformed event {raw!r}") from None
        if pid < 0:
            raise StreamParseError(lineno, "negative id")
        if parts[0] == "-":
            if coords:
                raise StreamParseError(lineno, "delete takes no coordinates")
            events.append(UpdateEvent("-", pid))
            continue
        if matrix is not None and coords:
            raise StreamParseError(lineno, "matrix mode inserts take no coordinates")
        if matrix is None:
            if not coords:
                raise StreamParseError(lineno, "insert needs coordinates")
            if dim is None:
                dim = len(coords)
            elif len(coords) != dim:
                raise StreamParseError(lineno, f"expected {dim} coordinates")
        events.append(UpdateEvent("+", pid, coords or None))
    validate_events(events, dim)
    return StreamFile(events, dim, matrix)


def parse_stream(text: str) -> list[UpdateEvent]:
    return read_stream(text).events


def serialize_stream(events: Iterable[UpdateEvent], dim: int | None = None,
                     matrix: str | None = None) -> str:
    lines = []
    if dim is not None:
        lines.append(f"#dim {dim}")
    elif matrix is not None:
        lines.append(f"#matrix {matrix}")
    lines.extend(ev.line() for ev in events)
    return "".join(line + "\n" for line in lines)


# -- generators

@dataclass
class AdversaryConfig:
    strategy: str = "oblivious_random"
    seed: int = 0
    n_init: int = 50
    n_updates: int = 200
    delete_fraction: float = 0.5
    dim: int = 2
    n_blobs: int = 5
    spread: float = 1.0
    box: float = 100.0
    min_live: int = 1  # deletes are turned into inserts at or below this

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0 <= self.delete_fraction <= 1:
            raise ValueError("delete_fraction must lie in [0,1]")


STRATEGIES = ("oblivious_random", "adaptive_delete_center", "churn")


@dataclass
class AdversaryState:
    """Everything a generator remembers between events."""
    cfg: AdversaryConfig
    rng: np.random.Generator
    blobs: np.ndarray
    coords: dict[int, np.ndarray] = field(default_factory=dict)
    next_id: int = 0
    step: int = 0
    first_seen: dict[int, int] = field(default_factory=dict)
    axis: int = 0

    @classmethod
    def start(cls, cfg: AdversaryConfig) -> "AdversaryState":
        rng = np.random.default_rng(cfg.seed)
        blobs = rng.uniform(0, cfg.box, size=(cfg.n_blobs, cfg.dim))
        return cls(cfg, rng, blobs)

    @property
    def live(self) -> list[int]:
        return list(self.coords)

    def _random_point(self) -> np.ndarray:
        b = self.blobs[self.rng.integers(len(self.blobs))]
        return b + self.rng.normal(0, self.cfg.spread, size=self.cfg.dim)

    def _far_point(self) -> np.ndarray:
        # beyond twice the bounding-box diagonal, which bounds the diameter
        pts = np.array(list(self.coords.values()))
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        diam = float(np.linalg.norm(hi - lo))
        step = 2 * diam + 1.0
        d = self.cfg.dim
        a, sign = self.axis % d, 1 if (self.axis // d) % 2 == 0 else -1
        self.axis += 1
        x = lo.copy()
        x[a] = hi[a] + step if sign > 0 else lo[a] - step
        return x

    def emit_insert(self, far: bool = False) -> UpdateEvent:
        x = self._far_point() if far and self.coords else self._random_point()
        x = np.array([float(v) for v in x])
        pid = self.next_id
        self.next_id += 1
        self.coords[pid] = x
        return insert(pid, x)

    def emit_delete(self, pid: int) -> UpdateEvent:
        del self.coords[pid]
        return delete(pid)

    def observe(self, solution: Iterable[int]) -> None:
        for c in solution:
            if c not in self.first_seen:
                self.first_seen[c] = self.step


def _pick_center(state: AdversaryState, visible: Iterable[int]) -> int | None:
    best = None
    for c in visible:
        if c not in state.coords:
            continue
        key = (state.first_seen.get(c, state.step), c)
        if best is None or key > best:
            best = key
    return None if best is None else best[1]


def next_adaptive_event(state: AdversaryState, visible_solution: Iterable[int]) -> UpdateEvent:
    """One event of an adaptive strategy given the current output solution.

    adaptive_delete_center deletes the most recently added visible center
    (largest id on ties); churn alternates far inserts with such deletes.
    """
    cfg = state.cfg
    visible = list(visible_solution)
    state.observe(visible)
    state.step += 1
    if cfg.strategy == "churn":
        want_delete = state.step % 2 == 0
    else:
        want_delete = state.rng.random() < cfg.delete_fraction
    if want_delete and len(state.coords) <= cfg.min_live:
        if not state.coords:
            if cfg.min_live <= 0:
                raise GeneratorExhausted("delete requested with no live points")
        want_delete = False
    if want_delete:
        if not state.coords:
            raise GeneratorExhausted("delete requested with no live points")
        if cfg.strategy == "oblivious_random":
            live = state.live
            return state.emit_delete(live[state.rng.integers(len(live))])
        c = _pick_center(state, visible)
        if c is not None:
            return state.emit_delete(c)
    return state.emit_insert(far=cfg.strategy == "churn")


def generate_stream(cfg: AdversaryConfig,
                    solution_fn: Callable[[UpdateEvent], Iterable[int]] | None = None
                    ) -> list[UpdateEvent]:
    """Initial inserts then n_updates events.

    Adaptive strategies need solution_fn, called with each emitted event; it
    must apply the event to the algorithm and return the visible solution.
    """
    if cfg.strategy != "oblivious_random" and solution_fn is None:
        raise ValueError("adaptive strategies need an algorithm to observe")
    state = AdversaryState.start(cfg)
    events = []
    visible: Iterable[int] = ()
    for _ in range(cfg.n_init):
        ev = state.emit_insert()
        events.append(ev)
        if solution_fn is not None:
            visible = solution_fn(ev)
    for _ in range(cfg.n_updates):
        ev = next_adaptive_event(state, visible)
        events.append(ev)
        if solution_fn is not None:
            visible = solution_fn(ev)
    return events
