"""Block-vector containers shared by the extension, duality and solver modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import ProductDomain


@dataclass(frozen=True)
class Ordering:
    """A compatible total order of the ``r`` entries of ``rho``.

    ``entries[s]`` is the flat index of the ``s``-th largest entry; ``blocks`` and
    ``levels`` give the corresponding ``(i(s), j(s))`` with 1-based levels, and
    ``thresholds`` the sorted values ``t(s)``.
    """

    entries: np.ndarray
    blocks: np.ndarray
    levels: np.ndarray
    thresholds: np.ndarray

    @property
    def key(self) -> bytes:
        return self.entries.tobytes()

    def pairs(self) -> list:
        """``(i, j)`` pairs in order, 0-based block and 1-based level."""
        return list(zip(self.blocks.tolist(), self.levels.tolist()))


@dataclass
class DualPoint:
    """Candidate ``w`` with optional convex-combination provenance.

    ``provenance`` is ``None`` for a raw vector, otherwise a list of
    ``(weight, Ordering)`` pairs whose greedy vertices average to ``flat``.
    """

    domain: ProductDomain
    flat: np.ndarray
    provenance: Optional[list] = None

    @property
    def blocks(self) -> list:
        return self.domain.split(self.flat)

    @property
    def certified(self) -> bool:
        return bool(self.provenance)

    @classmethod
    def raw(cls, domain: ProductDomain, w) -> "DualPoint":
        return cls(domain, domain.flatten(w), None)

    def recompute(self, oracle) -> np.ndarray:
        """Rebuild the vector from its provenance (costs one greedy pass per vertex)."""
        from .extension import greedy_vertex

        if not self.provenance:
            raise ValueError("a raw dual point has no provenance to recompute")
        out = np.zeros(self.domain.r)
        for weight, ordering in self.provenance:
            out += weight * greedy_vertex(oracle, ordering)
        return out


@dataclass
class GreedyOutput:
    w: DualPoint
    value: float
    best_point: np.ndarray
    best_value: float
    chain: np.ndarray
    chain_values: np.ndarray
    ordering: Ordering = field(repr=False)


class VertexAverage:
    """Convex combination of greedy vertices with exact bookkeeping of weights."""

    def __init__(self, domain: ProductDomain):
        self.domain = domain
        self.flat = np.zeros(domain.r)
        self.count = 0
        self._members: dict = {}

    def add(self, w_flat, ordering: Ordering) -> None:
        """Fold one more vertex into the uniform running average."""
        self.count += 1
        self.flat += (np.asarray(w_flat) - self.flat) / self.count
        entry = self._members.get(ordering.key)
        if entry is None:
            self._members[ordering.key] = [1, ordering, np.array(w_flat, dtype=float)]
        else:
            entry[0] += 1

    def vertices(self):
        """Distinct vertices seen so far as ``(orderings, matrix)``."""
        members = list(self._members.values())
        return [m[1] for m in members], np.array([m[2] for m in members])

    def dual_point(self) -> DualPoint:
        prov = [(c / self.count, o) for c, o, _ in self._members.values()]
        return DualPoint(self.domain, self.flat.copy(), prov)
