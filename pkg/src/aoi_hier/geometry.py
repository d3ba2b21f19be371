"""Random network geometry, cell partitioning, and protocol-model checks.

Nodes are placed uniformly on a square and paired by a fixed-point-free random
permutation.  Interference is judged by the protocol model: receiver j of
transmitter i tolerates a simultaneously active transmitter k only if

    d(j, k) >= (1 + gamma) * d(j, i)

Spatial reuse follows a 9-TDMA schedule: cells in the same (row mod 3,
col mod 3) residue class are active together.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Network:
    """Node positions on [0, area_side]^2 with S-D pairing and grid layout."""

    area_side: float
    positions: np.ndarray  # (n, 2)
    pairing: np.ndarray  # pairing[i] = destination of source i
    cells_per_side: int
    subcells_per_side: int = 1  # per cell, along each axis

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.float64)
        pairing = np.asarray(self.pairing, dtype=np.int64)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "pairing", pairing)
        if self.area_side <= 0:
            raise ValueError("area side must be positive")
        if self.cells_per_side < 1 or self.subcells_per_side < 1:
            raise ValueError("grid side counts must be >= 1")
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (n, 2) array")
        if np.any(pos < 0) or np.any(pos > self.area_side):
            raise ValueError("positions must lie inside the square")
        n = len(pos)
        if sorted(pairing.tolist()) != list(range(n)):
            raise ValueError("pairing must be a permutation of the nodes")
        if np.any(pairing == np.arange(n)):
            raise ValueError("pairing must have no fixed points")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def cell_width(self) -> float:
        return self.area_side / self.cells_per_side

    def cell_index(self, node: int) -> tuple[int, int]:
        """(row, col) of the cell containing the node."""
        x, y = self.positions[node]
        w = self.cell_width
        col = min(int(x / w), self.cells_per_side - 1)
        row = min(int(y / w), self.cells_per_side - 1)
        return row, col

    def subcell_index(self, node: int) -> tuple[int, int]:
        """(row, col) of the subcell on the refined grid."""
        side = self.cells_per_side * self.subcells_per_side
        w = self.area_side / side
        x, y = self.positions[node]
        col = min(int(x / w), side - 1)
        row = min(int(y / w), side - 1)
        return row, col

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["node_id", "x", "y", "dest_id"])
            for i, ((x, y), dest) in enumerate(zip(self.positions, self.pairing)):
                writer.writerow([i, f"{x:.12g}", f"{y:.12g}", int(dest)])


def _derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm


def generate_network(
    n: int,
    area_side: float,
    cells_per_side: int,
    rng: np.random.Generator,
    subcells_per_side: int = 1,
) -> Network:
    """Uniform i.i.d. placement with a rejection-sampled derangement pairing."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    positions = rng.random((n, 2)) * area_side
    pairing = _derangement(n, rng)
    return Network(
        area_side=area_side,
        positions=positions,
        pairing=pairing,
        cells_per_side=cells_per_side,
        subcells_per_side=subcells_per_side,
    )


@dataclass(frozen=True)
class ActivationSet:
    """Simultaneously active (transmitter, receiver) point pairs."""

    pairs: list[tuple[tuple[float, float], tuple[float, float]]]
    gamma: float

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("guard-zone constant must be >= 0")


@dataclass(frozen=True)
class Violation:
    receiver: int  # index of the violated link in the activation set
    interferer: int  # index of the offending link
    distance: float
    required: float


@dataclass(frozen=True)
class ProtocolVerdict:
    feasible: bool
    violations: list[Violation] = field(default_factory=list)


def check_protocol_model(active: ActivationSet) -> ProtocolVerdict:
    """Verify the guard-zone inequality for every receiver/interferer pair."""
    violations = []
    for j, (tx_j, rx_j) in enumerate(active.pairs):
        d_intended = math.dist(rx_j, tx_j)
        for k, (tx_k, _) in enumerate(active.pairs):
            if k == j:
                continue
            d_interf = math.dist(rx_j, tx_k)
            required = (1 + active.gamma) * d_intended
            if d_interf < required:
                violations.append(Violation(j, k, d_interf, required))
    return ProtocolVerdict(feasible=not violations, violations=violations)


def nine_tdma_schedule(grid_side: int) -> list[list[tuple[int, int]]]:
    """Partition the cell grid into 9 groups by (row mod 3, col mod 3)."""
    if grid_side < 1:
        raise ValueError("grid side must be >= 1")
    groups: list[list[tuple[int, int]]] = [[] for _ in range(9)]
    for row in range(grid_side):
        for col in range(grid_side):
            groups[(row % 3) * 3 + (col % 3)].append((row, col))
    return groups


def _nearest_point_in_cell(
    point: tuple[float, float], cell: tuple[int, int], width: float
) -> tuple[float, float]:
    row, col = cell
    x = min(max(point[0], col * width), (col + 1) * width)
    y = min(max(point[1], row * width), (row + 1) * width)
    return (x, y)


def worst_case_slot_links(
    group: list[tuple[int, int]], width: float
) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Extremal link placement for one 9-TDMA slot.

    Every active cell uses the longest possible intended link (the full cell
    diagonal, receiver in the lower-left corner), and each interfering
    transmitter is moved to the point of its cell closest to the receiver
    under test.  Same-group cells are 3 widths apart center to center, so the
    nearest interferer sits 2 widths away while the intended link spans
    sqrt(2) widths: the inequality holds exactly up to gamma = 2/sqrt(2) - 1
    = sqrt(2) - 1.
    """
    pairs = []
    for row, col in group:
        rx = (col * width, row * width)
        tx = ((col + 1) * width, (row + 1) * width)
        pairs.append((tx, rx))
    return pairs


def validate_tdma_worst_case(
    grid_side: int, gamma: float, width: float = 1.0
) -> ProtocolVerdict:
    """Worst-case protocol-model check of all 9 slots on a square cell grid."""
    all_violations: list[Violation] = []
    for group in nine_tdma_schedule(grid_side):
        if len(group) < 2:
            continue
        links = worst_case_slot_links(group, width)
        # replace each interferer by its cell's point nearest the receiver
        for j, (_, rx) in enumerate(links):
            d_intended = width * math.sqrt(2.0)
            for k, cell in enumerate(group):
                if k == j:
                    continue
                nearest = _nearest_point_in_cell(rx, cell, width)
                d_interf = math.dist(rx, nearest)
                required = (1 + gamma) * d_intended
                if d_interf < required:
                    all_violations.append(Violation(j, k, d_interf, required))
    return ProtocolVerdict(feasible=not all_violations, violations=all_violations)


def validate_tdma_against_protocol(
    net: Network, gamma: float, worst_case: bool = True, level: str = "cell"
) -> ProtocolVerdict:
    """Protocol-model feasibility of 9-TDMA on a network's grid.

    In worst-case mode node positions are ignored and corner-extremal
    placements are used; otherwise each active cell picks its two most distant
    resident nodes as the intended link and actual positions interfere.
    """
    if level == "cell":
        side = net.cells_per_side
        width = net.cell_width
    elif level == "subcell":
        side = net.cells_per_side * net.subcells_per_side
        width = net.area_side / side
    else:
        raise ValueError(f"unknown level {level!r}")
    if worst_case:
        return validate_tdma_worst_case(side, gamma, width)

    # group nodes by cell on the requested grid
    cell_of = {}
    for i in range(net.n):
        idx = net.cell_index(i) if level == "cell" else net.subcell_index(i)
        cell_of.setdefault(idx, []).append(i)

    all_violations: list[Violation] = []
    for group in nine_tdma_schedule(side):
        pairs = []
        for cell in group:
            nodes = cell_of.get(cell, [])
            if len(nodes) < 2:
                continue
            pts = net.positions[nodes]
            # longest intra-cell link
            diff = pts[:, None, :] - pts[None, :, :]
            dist = np.sqrt((diff**2).sum(axis=2))
            j, k = np.unravel_index(np.argmax(dist), dist.shape)
            pairs.append((tuple(pts[j]), tuple(pts[k])))
        if len(pairs) >= 2:
            verdict = check_protocol_model(ActivationSet(pairs, gamma))
            all_violations.extend(verdict.violations)
    return ProtocolVerdict(feasible=not all_violations, violations=all_violations)
