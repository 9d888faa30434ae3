"""Network topologies for the simulated sensor network.

Provides small-world graph generation, Metropolis consensus weights, and
random sensor scenes in which disk obstacles block line-of-sight links.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RETRY_BUDGET = 100


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected connected graph on nodes 0..n_nodes-1.

    Edges are stored as a canonical sorted tuple of (i, j) pairs with i < j.
    """

    n_nodes: int
    edges: tuple = field(default=())

    def __post_init__(self):
        if self.n_nodes < 1:
            raise GraphError("graph needs at least one node")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise GraphError(f"edge ({i},{j}) out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        for i, j in self.edges:
            a[i, j] = a[j, i] = True
        return a

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def is_connected(self) -> bool:
        return _connected(self.adjacency())

    def validate(self):
        if not self.is_connected():
            raise GraphError("graph is not connected")


def _connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def graph_from_adjacency(adj: np.ndarray) -> Graph:
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    ii, jj = np.nonzero(np.triu(adj, 1))
    return Graph(n, tuple(zip(ii.tolist(), jj.tolist())))


def generate_small_world(n: int, k: int, p_rewire: float, seed: int) -> Graph:
    """Watts-Strogatz style ring lattice with random rewiring.

    Starts from a ring where each node links to its k/2 nearest neighbours on
    each side, then rewires every edge with probability ``p_rewire``.
    Regenerates (up to RETRY_BUDGET times) until the result is connected.
    """
    if n < 3:
        raise GraphError("need n >= 3")
    if k % 2 != 0 or k < 2:
        raise GraphError("k must be even and >= 2")
    if k >= n:
        raise GraphError("k must be < n")
    if not (0.0 <= p_rewire <= 1.0):
        raise GraphError("p_rewire must be in [0, 1]")

    rng = np.random.default_rng(seed)
    for _ in range(RETRY_BUDGET):
        adj = np.zeros((n, n), dtype=bool)
        for off in range(1, k // 2 + 1):
            for i in range(n):
                j = (i + off) % n
                adj[i, j] = adj[j, i] = True
        if p_rewire > 0:
            for off in range(1, k // 2 + 1):
                for i in range(n):
                    j = (i + off) % n
                    if not adj[i, j]:  # may have been rewired away already
                        continue
                    if rng.random() >= p_rewire:
                        continue
                    candidates = np.nonzero(~adj[i])[0]
                    candidates = candidates[candidates != i]
                    if candidates.size == 0:
                        continue
                    new_j = int(rng.choice(candidates))
                    adj[i, j] = adj[j, i] = False
                    adj[i, new_j] = adj[new_j, i] = True
        if _connected(adj):
            return graph_from_adjacency(adj)
    raise GraphError(f"no connected graph within {RETRY_BUDGET} retries")


def metropolis_weights(g: Graph) -> np.ndarray:
    """Symmetric doubly stochastic mixing matrix with Metropolis rule
    w_ij = 1 / (1 + max(deg_i, deg_j)) on edges."""
    g.validate()
    n = g.n_nodes
    deg = g.degrees()
    w = np.zeros((n, n))
    for i, j in g.edges:
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(deg[i], deg[j]))
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return w


# ---------------------------------------------------------------------------
# sensor scenes with disk obstacles


@dataclass(frozen=True)
class SensorScene:
    """Sensor positions plus disk obstacles and the induced LoS adjacency."""

    coords: np.ndarray          # (h, n) node positions
    obstacles: tuple            # ((cx, cy, radius), ...)
    los_adjacency: np.ndarray   # (n, n) bool, symmetric, False diagonal

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[1]

    def graph(self) -> Graph:
        return graph_from_adjacency(self.los_adjacency)

    def missing_fraction(self) -> float:
        """Fraction of off-diagonal node pairs without a LoS link."""
        n = self.n_nodes
        present = np.triu(self.los_adjacency, 1).sum()
        total = n * (n - 1) // 2
        return 1.0 - present / total


def segment_blocked(p: np.ndarray, q: np.ndarray, center: np.ndarray, radius: float) -> bool:
    """True iff the closed segment p-q passes strictly inside the disk."""
    d = q - p
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(p - center)) < radius
    t = float((center - p) @ d) / dd
    t = min(1.0, max(0.0, t))
    closest = p + t * d
    return float(np.linalg.norm(closest - center)) < radius


def _los_adjacency(coords: np.ndarray, obstacles) -> np.ndarray:
    n = coords.shape[1]
    adj = np.ones((n, n), dtype=bool)
    np.fill_diagonal(adj, False)
    for i in range(n):
        for j in range(i + 1, n):
            for cx, cy, r in obstacles:
                if segment_blocked(coords[:, i], coords[:, j], np.array([cx, cy]), r):
                    adj[i, j] = adj[j, i] = False
                    break
    return adj


# Obstacle radii, relative to the scene side length. Calibrated so that six
# obstacles in a 30-node scene hide roughly one fifth to one quarter of links.
OBSTACLE_RADIUS_RANGE = (0.08, 0.16)


def generate_scene(n: int, n_obstacles: int, area: float = 1.0, seed: int = 0,
                   h: int = 2) -> SensorScene:
    """Random scene: uniform node placement in the square [0, area]^h plus
    disk obstacles that do not cover nodes. Regenerates until the LoS graph
    is connected."""
    if h not in (2, 3):
        raise GraphError("node space dimension must be 2 or 3")
    if n < h + 2:
        raise GraphError(f"need at least {h + 2} nodes")
    if n_obstacles > 0 and h != 2:
        raise GraphError("obstacles are only supported in 2-d scenes")
    rng = np.random.default_rng(seed)
    for _ in range(RETRY_BUDGET):
        coords = rng.uniform(0.0, area, size=(h, n))
        obstacles = []
        tries = 0
        while len(obstacles) < n_obstacles and tries < 100 * max(1, n_obstacles):
            tries += 1
            r = rng.uniform(*OBSTACLE_RADIUS_RANGE) * area
            c = rng.uniform(0.0, area, size=2)
            dist = np.linalg.norm(coords - c[:, None], axis=0)
            if np.min(dist) <= r * 1.05:  # would cover (or graze) a node
                continue
            obstacles.append((float(c[0]), float(c[1]), float(r)))
        if len(obstacles) < n_obstacles:
            continue
        adj = _los_adjacency(coords, obstacles)
        if _connected(adj):
            return SensorScene(coords, tuple(obstacles), adj)
    raise GraphError(f"no connected LoS scene within {RETRY_BUDGET} retries")


def scene_with_target_missing(n: int, missing_frac: float, seed: int,
                              area: float = 1.0, tol: float = 0.025,
                              radius_range: tuple = OBSTACLE_RADIUS_RANGE) -> SensorScene:
    """Obstacle scene whose missing-link fraction lands within ``tol`` of a
    target. Obstacles are placed one at a time until the blocked fraction
    reaches the target; overshoots and disconnected layouts are redrawn.
    """
    if not (0.0 <= missing_frac < 0.9):
        raise GraphError("missing_frac must be in [0, 0.9)")
    rng = np.random.default_rng(seed)
    for _ in range(RETRY_BUDGET):
        coords = rng.uniform(0.0, area, size=(2, n))
        obstacles = []
        adj = _los_adjacency(coords, obstacles)
        frac = 0.0
        tries = 0
        while frac < missing_frac - 0.01 and tries < 400:
            tries += 1
            r = rng.uniform(*radius_range) * area
            c = rng.uniform(0.0, area, size=2)
            dist = np.linalg.norm(coords - c[:, None], axis=0)
            if np.min(dist) <= r * 1.05:
                continue
            cand = obstacles + [(float(c[0]), float(c[1]), float(r))]
            cand_adj = _los_adjacency(coords, cand)
            cand_frac = 1.0 - np.triu(cand_adj, 1).sum() / (n * (n - 1) // 2)
            if cand_frac > missing_frac + tol:
                continue
            obstacles, adj, frac = cand, cand_adj, cand_frac
        if abs(frac - missing_frac) <= tol and _connected(adj):
            return SensorScene(coords, tuple(obstacles), adj)
    raise GraphError(f"no scene with ~{missing_frac:.0%} missing links "
                     f"within {RETRY_BUDGET} retries")


def random_mask_graph(n: int, missing_frac: float, seed: int) -> Graph:
    """Connected graph obtained by deleting a target fraction of the complete
    graph's links uniformly at random. Used when the amount of missing data
    is controlled directly instead of via obstacles."""
    if not (0.0 <= missing_frac < 1.0):
        raise GraphError("missing_frac must be in [0, 1)")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    n_remove = int(round(missing_frac * len(pairs)))
    for _ in range(RETRY_BUDGET):
        removed = rng.choice(len(pairs), size=n_remove, replace=False)
        adj = np.ones((n, n), dtype=bool)
        np.fill_diagonal(adj, False)
        for idx in removed:
            i, j = pairs[idx]
            adj[i, j] = adj[j, i] = False
        if _connected(adj):
            return graph_from_adjacency(adj)
    raise GraphError(f"no connected mask within {RETRY_BUDGET} retries")


# ---------------------------------------------------------------------------
# plain-text import/export


def save_edge_list(g: Graph, path):
    with open(path, "w") as fh:
        fh.write(f"{g.n_nodes}\n")
        for i, j in g.edges:
            fh.write(f"{i} {j}\n")


def load_edge_list(path) -> Graph:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise GraphError("empty edge list file")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        i, j = ln.split()
        edges.append((int(i), int(j)))
    return Graph(n, tuple(edges))


def save_coords_csv(coords: np.ndarray, path):
    with open(path, "w") as fh:
        fh.write("node,x,y\n")
        for i in range(coords.shape[1]):
            fh.write(f"{i},{coords[0, i]!r},{coords[1, i]!r}\n")


def load_coords_csv(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        next(fh)
        for ln in fh:
            parts = ln.strip().split(",")
            if len(parts) >= 3:
                rows.append((float(parts[1]), float(parts[2])))
    return np.array(rows).T
