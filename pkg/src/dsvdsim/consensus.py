"""Consensus primitives: network-wide scalar sums and inner products.

Every decentralized algorithm in this package talks to the network through
two operations: ``sum_consensus`` (one scalar summation over all nodes) and
``inner_product_consensus`` (a block of parallel scalar summations computing
X^H Y from row-partitioned X and Y). Communication cost is counted in
*consensus instances*, one per scalar summation, regardless of whether the
scalar is real or complex.

Three engines are provided:

* ``exact``  -- returns the exact sum at every node (stands in for a
  finite-time consensus protocol); lets algorithm-level tests separate
  numerical bugs from protocol noise.
* ``ac``     -- synchronous average consensus with Metropolis weights.
* ``ps``     -- push-sum with uniform out-degree shares and unit initial
  weights.

Both iterative engines are fixed linear maps for a given graph and iteration
count, so the propagation operator is precomputed once per engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, metropolis_weights


class ConsensusError(ValueError):
    pass


@dataclass
class CostLedger:
    """Monotone counter of consensus instances."""

    instances: int = 0

    def add(self, k: int):
        if k < 0:
            raise ValueError("cannot decrement the ledger")
        self.instances += k


ENGINE_KINDS = ("exact", "ac", "ps")


@dataclass
class ConsensusEngine:
    kind: str
    graph: Graph
    iterations: int | None = None
    ledger: CostLedger = field(default_factory=CostLedger)
    _prop: np.ndarray | None = field(default=None, repr=False)
    _ps_weight: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes

    @property
    def uniform(self) -> bool:
        """True when all nodes are guaranteed bitwise-identical estimates."""
        return self.kind == "exact"

    def mix(self, signals: np.ndarray) -> np.ndarray:
        """Per-node estimates of the columnwise sums of ``signals`` (n, k).

        Does not touch the ledger; callers account for instances explicitly.
        """
        signals = np.asarray(signals)
        if signals.shape[0] != self.n_nodes:
            raise ConsensusError(
                f"signal has {signals.shape[0]} rows, graph has {self.n_nodes} nodes")
        if self.kind == "exact":
            total = signals.sum(axis=0)
            return np.tile(total, (self.n_nodes, 1))
        if self.kind == "ac":
            return self.n_nodes * (self._prop @ signals)
        # push-sum: ratio of propagated values to propagated unit weights
        return self.n_nodes * (self._prop @ signals) / self._ps_weight[:, None]


def make_engine(kind: str, graph: Graph, iterations: int | None = None) -> ConsensusEngine:
    if kind not in ENGINE_KINDS:
        raise ConsensusError(f"unknown engine kind {kind!r}")
    graph.validate()
    eng = ConsensusEngine(kind, graph, iterations)
    if kind == "exact":
        return eng
    if iterations is None or iterations < 1:
        raise ConsensusError(f"{kind} engine needs a positive iteration count")
    if kind == "ac":
        w = metropolis_weights(graph)
        prop = np.eye(graph.n_nodes)
        for _ in range(iterations):
            prop = w @ prop
        eng._prop = prop
    else:
        a = _push_sum_mixing(graph)
        prop = np.eye(graph.n_nodes)
        for _ in range(iterations):
            prop = a @ prop
        eng._prop = prop
        eng._ps_weight = graph.n_nodes * (prop @ np.full(graph.n_nodes, 1.0 / graph.n_nodes))
    return eng


def _push_sum_mixing(graph: Graph) -> np.ndarray:
    """Column-stochastic mixing: node j splits its mass uniformly between
    itself and its neighbours."""
    n = graph.n_nodes
    adj = graph.adjacency()
    a = np.zeros((n, n))
    deg = adj.sum(axis=1)
    for j in range(n):
        share = 1.0 / (deg[j] + 1.0)
        a[j, j] = share
        a[adj[:, j], j] = share
    return a


def sum_consensus(engine: ConsensusEngine, x: np.ndarray) -> np.ndarray:
    """Per-node estimates of sum_i x_i; costs one consensus instance."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ConsensusError("sum_consensus takes a 1-d graph signal")
    out = engine.mix(x[:, None])[:, 0]
    engine.ledger.add(1)
    return out


def inner_product_consensus(engine: ConsensusEngine, x_rows: np.ndarray,
                            y_rows: np.ndarray) -> np.ndarray:
    """Per-node estimates of X^H Y from row-partitioned X (n, a), Y (n, b).

    Returns an (n, a, b) array; node i's estimate is ``out[i]``. Costs a*b
    consensus instances (one per scalar of the result).
    """
    x_rows = np.asarray(x_rows)
    y_rows = np.asarray(y_rows)
    if x_rows.ndim != 2 or y_rows.ndim != 2:
        raise ConsensusError("row arguments must be 2-d (one row per node)")
    if x_rows.shape[0] != y_rows.shape[0]:
        raise ConsensusError("row counts differ between the two arguments")
    n, a = x_rows.shape
    b = y_rows.shape[1]
    signals = (np.conj(x_rows)[:, :, None] * y_rows[:, None, :]).reshape(n, a * b)
    out = engine.mix(signals).reshape(n, a, b)
    engine.ledger.add(a * b)
    return out
