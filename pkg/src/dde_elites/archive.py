"""Centroidal-Voronoi MAP-Elites archive over the unit disk.

The behavior space is partitioned into k Voronoi cells. Each cell stores at
most one elite (genome, fitness, behavior); a challenger replaces the
incumbent only with strictly greater fitness, so per-cell fitness is
monotone non-decreasing over any offer sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyArchiveError


def generate_centroids(k: int, seed: int, layout: str = "ring") -> np.ndarray:
    """Deterministic (k, 2) centroid set inside the unit disk.

    layout="ring" (default): concentric rings at radii (j - 0.5) / R for
    j = 1..R with R ~ sqrt(k / pi), each ring holding a centroid count
    proportional to its radius (largest-remainder rounding, total exactly
    k) and evenly spaced angles with a seed-derived phase per ring.

    layout="lloyd": Lloyd's algorithm on uniform disk samples, for
    comparison runs.
    """
    if k < 1:
        raise ValueError(f"centroid count must be >= 1, got {k}")
    if layout == "ring":
        return _ring_centroids(k, seed)
    if layout == "lloyd":
        return _lloyd_centroids(k, seed)
    raise ValueError(f"unknown centroid layout {layout!r}")


def _ring_centroids(k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), k]))
    n_rings = max(1, int(round(np.sqrt(k / np.pi))))
    radii = (np.arange(1, n_rings + 1) - 0.5) / n_rings
    # Apportion k among rings proportionally to radius, largest remainder,
    # remainder ties to the inner ring.
    quota = k * radii / radii.sum()
    counts = np.floor(quota).astype(int)
    remainder = quota - counts
    order = np.lexsort((np.arange(n_rings), -remainder))
    counts[order[: k - counts.sum()]] += 1

    points = np.empty((k, 2))
    row = 0
    for r, count in zip(radii, counts):
        if count == 0:
            continue
        theta = rng.uniform(0.0, 2.0 * np.pi) + 2.0 * np.pi * np.arange(count) / count
        points[row : row + count, 0] = r * np.cos(theta)
        points[row : row + count, 1] = r * np.sin(theta)
        row += count
    return points


def _sample_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)


def _lloyd_centroids(k: int, seed: int, iterations: int = 30) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), k, 1]))
    samples = _sample_disk(rng, max(10_000, 10 * k))
    centroids = _sample_disk(rng, k)
    for _ in range(iterations):
        sums = np.zeros((k, 2))
        counts = np.zeros(k)
        # chunked assignment keeps the distance matrix small
        for block in np.array_split(samples, max(1, len(samples) // 4096)):
            d2 = ((block[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
            nearest = d2.argmin(axis=1)
            np.add.at(sums, nearest, block)
            np.add.at(counts, nearest, 1.0)
        moved = counts > 0
        centroids[moved] = sums[moved] / counts[moved, None]
    return centroids


class CentroidIndex:
    """Exact nearest-centroid lookup via a uniform bucket grid.

    Matches a brute-force linear scan bit for bit, including the
    lowest-index tie-break: a ring of grid cells is only skipped once even
    an equal-distance candidate is impossible there.
    """

    # grid spans the unit disk with margin for behaviors at ||b|| = 1 + eps
    _LO = -1.001

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ValueError(f"expected (k, 2) centroid array, got {points.shape}")
        self.points = points
        k = len(points)
        self._g = g = max(1, int(np.ceil(np.sqrt(k))))
        self._h = 2.0 * abs(self._LO) / g
        cx = np.clip(((points[:, 0] - self._LO) / self._h).astype(int), 0, g - 1)
        cy = np.clip(((points[:, 1] - self._LO) / self._h).astype(int), 0, g - 1)
        buckets: list[list[int]] = [[] for _ in range(g * g)]
        for i, (a, b) in enumerate(zip(cx, cy)):
            buckets[a * g + b].append(i)
        self._buckets = [np.asarray(b, dtype=np.intp) for b in buckets]

    def _ring_cells(self, cx: int, cy: int, s: int):
        g = self._g
        if s == 0:
            if 0 <= cx < g and 0 <= cy < g:
                yield cx, cy
            return
        for x in range(cx - s, cx + s + 1):
            for y in (cy - s, cy + s):
                if 0 <= x < g and 0 <= y < g:
                    yield x, y
        for y in range(cy - s + 1, cy + s):
            for x in (cx - s, cx + s):
                if 0 <= x < g and 0 <= y < g:
                    yield x, y

    def query(self, p: np.ndarray) -> int:
        """Index of the closest centroid (Euclidean, ties to lowest index)."""
        px, py = float(p[0]), float(p[1])
        g, h = self._g, self._h
        cx = min(max(int((px - self._LO) / h), 0), g - 1)
        cy = min(max(int((py - self._LO) / h), 0), g - 1)
        best_d2 = np.inf
        best_i = -1
        for s in range(2 * g + 1):
            # cells in ring s hold no point closer than (s - 1) * h
            if best_i >= 0 and (s - 1) * h > np.sqrt(best_d2):
                break
            cand: list[np.ndarray] = []
            for x, y in self._ring_cells(cx, cy, s):
                bucket = self._buckets[x * g + y]
                if len(bucket):
                    cand.append(bucket)
            if not cand:
                continue
            idx = np.concatenate(cand)
            pts = self.points[idx]
            d2 = (pts[:, 0] - px) ** 2 + (pts[:, 1] - py) ** 2
            m = d2.min()
            i = int(idx[d2 == m].min())
            if m < best_d2 or (m == best_d2 and i < best_i):
                best_d2 = m
                best_i = i
        return best_i


@dataclass(frozen=True)
class ArchiveStats:
    coverage: float
    mean_fitness: float
    filled: int
    empty: bool


class Archive:
    """k-cell elite map; single-writer, offers applied sequentially."""

    def __init__(self, centroids: np.ndarray, genome_dim: int):
        self.centroids = np.asarray(centroids, dtype=float)
        self.k = len(self.centroids)
        self.genome_dim = int(genome_dim)
        self.index = CentroidIndex(self.centroids)
        self.genomes = np.zeros((self.k, self.genome_dim))
        self.fitness = np.full(self.k, -np.inf)
        self.behavior = np.zeros((self.k, 2))
        self.occupied = np.zeros(self.k, dtype=bool)
        self.filled_count = 0

    def offer(self, genome: np.ndarray, fitness: float, behavior: np.ndarray) -> bool:
        """Insert into the behavior's cell if empty or strictly improved.

        Returns True when accepted; equal fitness keeps the incumbent.
        """
        cell = self.index.query(behavior)
        if self.occupied[cell] and fitness <= self.fitness[cell]:
            return False
        if not self.occupied[cell]:
            self.occupied[cell] = True
            self.filled_count += 1
        self.genomes[cell] = genome
        self.fitness[cell] = fitness
        self.behavior[cell] = behavior
        return True

    def metrics(self) -> ArchiveStats:
        if self.filled_count == 0:
            return ArchiveStats(0.0, 0.0, 0, True)
        mean_fit = float(self.fitness[self.occupied].mean())
        return ArchiveStats(self.filled_count / self.k, mean_fit, self.filled_count, False)

    def occupied_cells(self) -> np.ndarray:
        return np.flatnonzero(self.occupied)

    def elite_genomes(self) -> np.ndarray:
        """Copy of all occupied genomes, in cell order."""
        return self.genomes[self.occupied].copy()

    def random_elite(self, rng: np.random.Generator) -> tuple[np.ndarray, int]:
        """Uniform draw over occupied cells; (genome copy, cell index)."""
        if self.filled_count == 0:
            raise EmptyArchiveError("archive has no occupied cells")
        cells = self.occupied_cells()
        cell = int(cells[rng.integers(len(cells))])
        return self.genomes[cell].copy(), cell


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_centroids_csv(path: str | Path, centroids: np.ndarray) -> None:
    lines = ["x,y"]
    lines += [f"{_fmt(x)},{_fmt(y)}" for x, y in np.asarray(centroids, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_centroids_csv(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text().strip().splitlines()
    if lines[0] != "x,y":
        raise ValueError(f"bad centroid CSV header: {lines[0]!r}")
    return np.array([[float(v) for v in line.split(",")] for line in lines[1:]])


def write_archive_csv(path: str | Path, archive: Archive) -> None:
    """One row per occupied cell: cell, fitness, behavior, genome."""
    header = "cell,fitness,behavior_x,behavior_y," + ",".join(
        f"g_{i}" for i in range(archive.genome_dim)
    )
    lines = [header]
    for cell in archive.occupied_cells():
        fields = [str(int(cell)), _fmt(archive.fitness[cell]),
                  _fmt(archive.behavior[cell, 0]), _fmt(archive.behavior[cell, 1])]
        fields += [_fmt(v) for v in archive.genomes[cell]]
        lines.append(",".join(fields))
    Path(path).write_text("\n".join(lines) + "\n")


def read_archive_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Parse an archive CSV back into arrays (cells, fitness, behavior, genomes)."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines[0].startswith("cell,fitness,behavior_x,behavior_y"):
        raise ValueError(f"bad archive CSV header: {lines[0]!r}")
    rows = [line.split(",") for line in lines[1:]]
    if not rows:
        dim = lines[0].count(",") - 3
        return {"cells": np.empty(0, dtype=int), "fitness": np.empty(0),
                "behavior": np.empty((0, 2)), "genomes": np.empty((0, dim))}
    data = np.array([[float(v) for v in row] for row in rows])
    return {"cells": data[:, 0].astype(int), "fitness": data[:, 1],
            "behavior": data[:, 2:4], "genomes": data[:, 4:]}
