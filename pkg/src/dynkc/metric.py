"""Point store and instrumented distance oracle."""

from __future__ import annotations

import numpy as np


class UnknownPointError(KeyError):
    pass


class MetricError(ValueError):
    pass


def _euclid(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # coordinate-by-coordinate so pairwise and matrix calls round identically
    acc = None
    for i in range(a.shape[-1]):
        x = a[..., i] - b[..., i]
        acc = x * x if acc is None else acc + x * x
    return np.sqrt(acc)


class MetricSpace:
    """Euclidean or explicit-matrix metric with a distance evaluation counter.

    Point ids index rows of a growable coordinate buffer (euclidean) or rows
    of the matrix (explicit). Deleted points keep their coordinates so frozen
    snapshots can still be measured; only ids never added are rejected.
    """

    def __init__(self, dim: int | None = None, matrix: np.ndarray | None = None,
                 validate: bool = True):
        if (dim is None) == (matrix is None):
            raise MetricError("give exactly one of dim or matrix")
        self.evals = 0
        if matrix is not None:
            m = np.asarray(matrix, dtype=float)
            if validate:
                check_metric_matrix(m)
            self.kind = "explicit"
            self.dim = None
            self._matrix = m
            self._known = np.zeros(len(m), dtype=bool)
            self._live = np.zeros(len(m), dtype=bool)
        else:
            if dim < 1:
                raise MetricError("dim must be positive")
            self.kind = "euclidean"
            self.dim = int(dim)
            self._coords = np.zeros((16, self.dim))
            self._known = np.zeros(16, dtype=bool)
            self._live = np.zeros(16, dtype=bool)
        self.n_live = 0

    @classmethod
    def euclidean(cls, dim: int) -> "MetricSpace":
        return cls(dim=dim)

    @classmethod
    def explicit(cls, matrix, validate: bool = True) -> "MetricSpace":
        return cls(matrix=matrix, validate=validate)

    @classmethod
    def from_matrix_file(cls, path) -> "MetricSpace":
        return cls.explicit(read_matrix_file(path))

    # -- point store

    def _grow(self, pid: int) -> None:
        cap = len(self._known)
        if pid < cap:
            return
        new = max(cap * 2, pid + 1)
        coords = np.zeros((new, self.dim))
        coords[:cap] = self._coords
        self._coords = coords
        self._known = np.concatenate([self._known, np.zeros(new - cap, bool)])
        self._live = np.concatenate([self._live, np.zeros(new - cap, bool)])

    def add_point(self, pid: int, coords=None) -> None:
        if pid < 0:
            raise UnknownPointError(pid)
        if self.kind == "explicit":
            if pid >= len(self._matrix):
                raise UnknownPointError(pid)
        else:
            if coords is None or len(coords) != self.dim:
                raise MetricError(f"point {pid} needs {self.dim} coordinates")
            self._grow(pid)
            self._coords[pid] = coords
        if self._known[pid]:
            raise MetricError(f"id {pid} already used")
        self._known[pid] = True
        self._live[pid] = True
        self.n_live += 1

    def remove_point(self, pid: int) -> None:
        if not self.is_live(pid):
            raise UnknownPointError(pid)
        self._live[pid] = False
        self.n_live -= 1

    def is_known(self, pid: int) -> bool:
        return 0 <= pid < len(self._known) and bool(self._known[pid])

    def is_live(self, pid: int) -> bool:
        return 0 <= pid < len(self._live) and bool(self._live[pid])

    def live_ids(self) -> np.ndarray:
        return np.flatnonzero(self._live)

    def coords(self, pid: int) -> np.ndarray:
        if self.kind != "euclidean":
            raise MetricError("explicit metric has no coordinates")
        self._check(np.asarray([pid]))
        return self._coords[pid].copy()

    def _check(self, ids: np.ndarray) -> None:
        if len(ids) == 0:
            return
        if ids.min() < 0 or ids.max() >= len(self._known) or not self._known[ids].all():
            bad = [int(i) for i in ids if not self.is_known(int(i))]
            raise UnknownPointError(bad[0])

    # -- distances

    def _raw(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == "explicit":
            return self._matrix[a, b]
        return _euclid(self._coords[a], self._coords[b])

    def dist(self, p: int, q: int) -> float:
        return float(self.pair_dists([p], [q])[0])

    def pair_dists(self, ps, qs, count: bool = True) -> np.ndarray:
        """Elementwise dist(ps[i], qs[i])."""
        a = np.asarray(ps, dtype=np.int64)
        b = np.asarray(qs, dtype=np.int64)
        self._check(a)
        self._check(b)
        if count:
            self.evals += len(a)
        return self._raw(a, b)

    def dists(self, p: int, qs, count: bool = True) -> np.ndarray:
        """dist(p, q) for every q in qs."""
        b = np.asarray(qs, dtype=np.int64)
        return self.pair_dists(np.full(len(b), p, dtype=np.int64), b, count)

    def dist_matrix(self, ps, qs, count: bool = True) -> np.ndarray:
        a = np.asarray(ps, dtype=np.int64)
        b = np.asarray(qs, dtype=np.int64)
        self._check(a)
        self._check(b)
        if count:
            self.evals += len(a) * len(b)
        if self.kind == "explicit":
            return self._matrix[np.ix_(a, b)]
        return _euclid(self._coords[a][:, None, :], self._coords[b][None, :, :])

    def nearest(self, ps, S, count: bool = True, chunk: int = 1 << 18):
        """dist(p, S) and arg-min for each p; S must be sorted ascending so the
        first minimum is the smallest id."""
        a = np.asarray(ps, dtype=np.int64)
        s = np.asarray(S, dtype=np.int64)
        if len(s) == 0:
            raise MetricError("distance to an empty set")
        d = np.empty(len(a))
        arg = np.empty(len(a), dtype=np.int64)
        rows = max(1, chunk // len(s))
        for lo in range(0, len(a), rows):
            m = self.dist_matrix(a[lo:lo + rows], s, count)
            j = np.argmin(m, axis=1)
            d[lo:lo + rows] = m[np.arange(len(j)), j]
            arg[lo:lo + rows] = s[j]
        return d, arg

    def dist_to_set(self, p: int, S) -> tuple[float, int]:
        s = np.sort(np.asarray(list(S), dtype=np.int64))
        d, arg = self.nearest([p], s)
        return float(d[0]), int(arg[0])

    def ball(self, U, S, r: float, closed: bool = True) -> set[int]:
        u = np.asarray(sorted(U), dtype=np.int64)
        s = np.sort(np.asarray(list(S), dtype=np.int64))
        if len(u) == 0:
            return set()
        d, _ = self.nearest(u, s)
        keep = d <= r if closed else d < r
        return set(u[keep].tolist())


def check_metric_matrix(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MetricError("matrix must be square")
    if not np.isfinite(m).all() or (m < 0).any():
        raise MetricError("matrix entries must be finite and nonnegative")
    if (np.diag(m) != 0).any():
        raise MetricError("matrix diagonal must be zero")
    if not np.array_equal(m, m.T):
        raise MetricError("matrix must be symmetric")
    # tiny relative slack so matrices rounded from real metrics still load
    tol = 1e-12 * max(1.0, float(m.max(initial=0.0)))
    for k in range(len(m)):
        if (m > m[:, k:k + 1] + m[k:k + 1, :] + tol).any():
            raise MetricError(f"triangle inequality fails through index {k}")


def read_matrix_file(path) -> np.ndarray:
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise MetricError("empty matrix file")
    n = int(tokens[0])
    vals = tokens[1:]
    if len(vals) != n * n:
        raise MetricError(f"expected {n * n} entries, found {len(vals)}")
    return np.array([float(v) for v in vals]).reshape(n, n)


def write_matrix_file(path, m) -> None:
    m = np.asarray(m, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{len(m)}\n")
        for row in m:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def aspect_ratio(metric: MetricSpace, ids) -> float:
    """max / min positive pairwise distance; recorded, never used."""
    ids = list(ids)
    if len(ids) < 2:
        return 1.0
    m = metric.dist_matrix(ids, ids, count=False)
    pos = m[m > 0]
    return float(pos.max() / pos.min()) if len(pos) else 1.0
