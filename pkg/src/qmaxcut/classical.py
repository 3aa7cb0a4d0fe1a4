"""Classical Heisenberg antiferromagnet and the product-state value Prod(G).

Prod(G) = max over unit 3-vectors of (1/2) sum w_ij (1 - O_i . O_j), and
CHA(G) = W - Prod(G) is the classical ground energy.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import WeightedGraph, total_weight


class BruteForceBudgetError(RuntimeError):
    pass


def random_unit_vectors(rng: np.random.Generator, n: int, dim: int = 3) -> np.ndarray:
    x = rng.standard_normal((n, dim))
    norms = np.linalg.norm(x, axis=1)
    while np.any(norms < 1e-12):
        bad = norms < 1e-12
        x[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(x, axis=1)
    return x / norms[:, None]


def check_unit(omegas, n: int | None = None, atol: float = 1e-10) -> np.ndarray:
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 2 or omegas.shape[1] != 3:
        raise ValueError(f"expected an (N, 3) array of unit vectors, got shape {omegas.shape}")
    if n is not None and omegas.shape[0] != n:
        raise ValueError(f"assignment has {omegas.shape[0]} vectors, graph has {n} vertices")
    bad = np.abs(np.linalg.norm(omegas, axis=1) - 1.0) > atol
    if np.any(bad):
        raise ValueError(f"non-unit vectors at vertices {np.flatnonzero(bad).tolist()}")
    return omegas


def cha_energy(g: WeightedGraph, omegas) -> float:
    """H_CHA = (1/2) sum_{ij in E} w_ij O_i . O_j."""
    omegas = check_unit(omegas, g.n)
    return 0.5 * math.fsum(w * float(omegas[i] @ omegas[j]) for i, j, w in g.edges)


def prod_objective(g: WeightedGraph, vectors) -> float:
    """(1/2) sum w_ij (1 - u_i . u_j); vectors need not be unit."""
    u = np.asarray(vectors, dtype=float)
    return 0.5 * math.fsum(w * (1.0 - float(u[i] @ u[j])) for i, j, w in g.edges)


def sweep(a: np.ndarray, y: np.ndarray, cancel_tol: float = 1e-14) -> None:
    """One cyclic pass of y_i <- -normalize(sum_j a_ij y_j), in place.

    A vertex whose neighbourhood vector vanishes keeps its current vector.
    """
    scale = np.abs(a).sum(axis=1)
    for i in range(a.shape[0]):
        if scale[i] == 0.0:
            continue
        h = a[i] @ y
        norm = np.linalg.norm(h)
        if norm > cancel_tol * scale[i]:
            y[i] = -h / norm


def _quadratic(a: np.ndarray, y: np.ndarray) -> float:
    # (1/2) sum_{i<j} a_ij y_i.y_j
    return 0.25 * float(np.einsum("ij,ij->", a, y @ y.T))


def prod_local_search(
    g: WeightedGraph,
    restarts: int = 32,
    seed: int = 0,
    tol: float = 1e-12,
    max_sweeps: int = 10_000,
    initial=None,
) -> tuple[float, np.ndarray]:
    """Best local optimum of the product-state objective over random restarts.

    Each restart draws i.i.d. uniform points on the sphere and applies
    single-site replacements O_i <- -w_i/|w_i| until a full sweep gains less
    than ``tol``. ``initial`` (N x 3, entries in the unit ball) replaces the
    first restart's starting point.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    a = g.weight_matrix()
    w_total = total_weight(g)
    rng = np.random.default_rng(seed)
    best_value, best = -math.inf, None
    for r in range(restarts):
        y = random_unit_vectors(rng, g.n)
        if r == 0 and initial is not None:
            y = np.array(initial, dtype=float, copy=True)
            if y.shape != (g.n, 3) or np.any(np.linalg.norm(y, axis=1) > 1 + 1e-12):
                raise ValueError("initial point must be N vectors in the closed unit ball")
        value = w_total - _quadratic(a, y)
        for _ in range(max_sweeps):
            sweep(a, y)
            new = w_total - _quadratic(a, y)
            gain = new - value
            value = max(value, new)
            if gain < tol:
                break
        # vertices never touched (zero degree) may still sit inside the ball
        norms = np.linalg.norm(y, axis=1)
        y = np.where(norms[:, None] > 0, y / np.where(norms > 0, norms, 1)[:, None], [0.0, 0.0, 1.0])
        value = w_total - _quadratic(a, y)
        if value > best_value:
            best_value, best = value, y
    return best_value, best


def cha_value(g: WeightedGraph, restarts: int = 32, seed: int = 0) -> float:
    """CHA(G) = W - Prod(G), with Prod from local search."""
    value, _ = prod_local_search(g, restarts=restarts, seed=seed)
    return total_weight(g) - value


# -- branch-and-bound oracle --------------------------------------------------

# Cube-map faces: (normal axis, sign, first tangent axis, second tangent axis).
_FACES = np.array([(a, s, (a + 1) % 3, (a + 2) % 3) for a in range(3) for s in (1, -1)])


def _cube_point(face, u, v):
    axis, sign, t1, t2 = (_FACES[face, k] for k in range(4))
    shape = np.shape(u)
    p = np.zeros(shape + (3,))
    np.put_along_axis(p, axis[..., None], sign[..., None].astype(float), axis=-1)
    np.put_along_axis(p, t1[..., None], np.asarray(u, dtype=float)[..., None], axis=-1)
    np.put_along_axis(p, t2[..., None], np.asarray(v, dtype=float)[..., None], axis=-1)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def _angle(x, y):
    return np.arccos(np.clip(np.sum(x * y, axis=-1), -1.0, 1.0))


class _Boxes:
    """Batch of product regions: one fixed spin, one half-circle arc, rest cube patches."""

    def __init__(self, face, u0, u1, v0, v1, t0, t1):
        self.face, self.u0, self.u1, self.v0, self.v1 = face, u0, u1, v0, v1
        self.t0, self.t1 = t0, t1

    def __len__(self):
        return len(self.t0)

    def take(self, idx):
        return _Boxes(self.face[idx], self.u0[idx], self.u1[idx], self.v0[idx], self.v1[idx],
                      self.t0[idx], self.t1[idx])

    @staticmethod
    def concat(parts):
        return _Boxes(*(np.concatenate([getattr(p, f) for p in parts])
                        for f in ("face", "u0", "u1", "v0", "v1", "t0", "t1")))

    def caps(self, has_arc: bool = True):
        """Cap centres (B, 2+m, 3) and angular radii (B, 2+m)."""
        b, m = self.face.shape
        um, vm = (self.u0 + self.u1) / 2, (self.v0 + self.v1) / 2
        centre = _cube_point(self.face, um, vm)
        radius = np.zeros((b, m))
        for uu, vv in ((self.u0, self.v0), (self.u0, self.v1), (self.u1, self.v0), (self.u1, self.v1)):
            radius = np.maximum(radius, _angle(centre, _cube_point(self.face, uu, vv)))
        # the distance to the centre is geodesically convex on a patch narrower
        # than a hemisphere, so the farthest point is a corner
        radius = radius + 1e-12
        fixed = np.broadcast_to([0.0, 0.0, 1.0], (b, 1, 3))
        tm = (self.t0 + self.t1) / 2
        arc = np.stack([np.sin(tm), np.zeros_like(tm), np.cos(tm)], axis=-1)[:, None, :]
        arc_r = ((self.t1 - self.t0) / 2 + 1e-12)[:, None]
        if not has_arc:
            arc_r = np.zeros_like(arc_r)
        centres = np.concatenate([fixed, arc, centre], axis=1)
        radii = np.concatenate([np.zeros((b, 1)), arc_r, radius], axis=1)
        return centres, radii


def _centre_values(a, w_total, c):
    iu = np.triu_indices(a.shape[0], 1)
    gram = np.einsum("bid,bjd->bij", c, c)
    return w_total - 0.5 * (gram[:, iu[0], iu[1]] @ a[iu])


def _box_bounds(a, w_total, c, r):
    """Bounds for products of caps with centres ``c`` and angular radii ``r``.

    Returns ``(upper, centre_value, discard_key)``. ``upper`` bounds the
    objective anywhere in the box. ``discard_key`` additionally bounds f* when
    the box contains the global maximiser; a box whose key is within ``tol`` of
    the incumbent can be dropped without losing the guarantee.
    """
    iu = np.triu_indices(a.shape[0], 1)
    a_pairs = a[iu]
    theta = _angle(c[:, iu[0], :], c[:, iu[1], :])
    spread = np.minimum(np.pi, theta + r[:, iu[0]] + r[:, iu[1]])
    edge_bound = 0.5 * ((1.0 - np.cos(spread)) @ a_pairs)
    f0 = _centre_values(a, w_total, c)
    h = 0.5 * np.einsum("ij,bjd->bid", a, c)
    hn = np.linalg.norm(h, axis=-1)
    phi = _angle(-h / np.maximum(hn, 1e-300)[..., None], c)
    lin = hn * np.cos(np.maximum(0.0, phi - r)) + np.sum(h * c, axis=-1)
    chord = 2.0 * np.sin(np.minimum(r, np.pi) / 2)
    quad = 0.25 * np.einsum("bi,ij,bj->b", chord, a, chord)
    upper = np.minimum(edge_bound, f0 + lin.sum(axis=1) + quad)
    # A global maximiser O* is stationary (O*_i antiparallel to its field), so
    # f* - f(c) = (1/4) sum |w*_i| |c_i - O*_i|^2 + (1/2) sum a_ij d_i.d_j
    # for the box holding O*: no first-order term survives.
    degree = a.sum(axis=1)
    near_optimum = f0 + 0.25 * (chord**2 @ degree) + quad
    return upper, f0, np.minimum(upper, near_optimum)


def lagrangian_bound(g: WeightedGraph, omegas) -> float:
    """Certified upper bound on Prod(G) from multipliers read off ``omegas``.

    For any mu, f <= W + sum(mu) + N * max(0, -lambda_min(A/4 + diag(mu))) on
    products of unit vectors. Taking mu_i = |sum_j w_ij O_j| / 4 makes the
    bound exact when ``omegas`` is a global optimum of the rank-unrestricted
    relaxation, which by the Pataki rank bound includes every N <= 9 optimum.
    """
    a = g.weight_matrix()
    y = np.asarray(omegas, dtype=float)
    mu = 0.25 * np.linalg.norm(a @ y, axis=1)
    lam = float(np.linalg.eigvalsh(0.25 * a + np.diag(mu))[0])
    shift = max(0.0, -lam) + 1e-12 * (1.0 + np.abs(a).sum())
    return total_weight(g) + float(mu.sum()) + g.n * shift


def prod_brute_force(
    g: WeightedGraph,
    grid_depth: int = 40,
    tol: float = 1e-3,
    batch: int = 2048,
    max_nodes: int = 5_000_000,
    multiplier_bound: bool = True,
) -> float:
    """Prod(G) for N <= 6, guaranteed within ``tol`` of the optimum.

    Branch and bound over products of spherical caps: one spin is fixed to +z,
    a second is restricted to a half great circle (rotation gauge) and every
    other spin ranges over cube-map patches. Boxes are refined best-first by
    halving the widest cap. A box is dropped once its bound is within ``tol``
    of the incumbent; the incumbent is the best cap centre seen, polished by
    single-site replacement sweeps. The search also stops early once the
    multiplier bound of the incumbent closes the gap (``multiplier_bound``).
    ``grid_depth`` caps the halvings per spin.
    """
    if g.n > 6:
        raise ValueError("prod_brute_force supports N <= 6")
    positive = [(i, j, w) for i, j, w in g.edges if w > 0]
    if not positive:
        return 0.0
    active = sorted({v for i, j, _ in positive for v in (i, j)})
    w_total = total_weight(g)
    p, q, _ = max(positive, key=lambda e: e[2])
    order = [p, q] + [v for v in active if v not in (p, q)]
    pos = {v: k for k, v in enumerate(order)}
    n = len(order)
    a = np.zeros((n, n))
    for i, j, w in positive:
        a[pos[i], pos[j]] = a[pos[j], pos[i]] = w
    sub = WeightedGraph(n, tuple((pos[i], pos[j], w) for i, j, w in positive))
    m = n - 2
    degree = a.sum(axis=1)

    best = {"value": -math.inf, "centre": -math.inf, "bound": math.inf}

    def offer(c, values):
        k = int(np.argmax(values))
        if values[k] <= best["centre"] + 1e-9:
            return
        best["centre"] = float(values[k])
        y = c[k].copy()
        for _ in range(10_000):
            before = w_total - _quadratic(a, y)
            sweep(a, y)
            if w_total - _quadratic(a, y) - before < 1e-13:
                break
        value = float(_centre_values(a, w_total, y[None])[0])
        if value > best["value"]:
            best["value"] = value
            if multiplier_bound:
                best["bound"] = min(best["bound"], lagrangian_bound(sub, y))

    if m:
        faces = np.array(np.meshgrid(*[np.arange(6)] * m, indexing="ij")).reshape(m, -1).T
    else:
        faces = np.zeros((1, 0), dtype=int)
    b0 = len(faces)
    ones = np.ones((b0, m))
    pool = _Boxes(faces, -ones, ones.copy(), -ones, ones.copy(), np.zeros(b0), np.full(b0, np.pi))
    c, r = pool.caps(True)
    _, f0, key = _box_bounds(a, w_total, c, r)
    offer(c, f0)
    min_width = 2.0 / 2**grid_depth
    visited = b0
    while True:
        keep = key > best["value"] + tol
        pool, key = pool.take(keep), key[keep]
        if not len(pool) or best["bound"] <= best["value"] + tol:
            return best["value"]
        if visited > max_nodes:
            raise BruteForceBudgetError(f"node budget exhausted with {len(pool)} open boxes")
        k = min(batch, len(pool))
        top = np.argpartition(-key, k - 1)[:k] if k < len(pool) else np.arange(len(pool))
        rest = np.ones(len(pool), bool)
        rest[top] = False
        work, pool, key = pool.take(top), pool.take(rest), key[rest]
        _, wr = work.caps(True)
        score = wr * degree[None, :]
        score[:, 0] = -1
        widths = np.concatenate([(work.t1 - work.t0)[:, None] / np.pi * 2, work.u1 - work.u0], axis=1)
        score[:, 1:][widths <= min_width] = -1
        pick = np.argmax(score, axis=1)
        if np.any(score[np.arange(len(pick)), pick] < 0):
            raise BruteForceBudgetError("grid depth exhausted before the bound closed")
        kids = _Boxes.concat([_split(work, pick, quadrant) for quadrant in range(4)])
        visited += len(kids)
        c, r = kids.caps(True)
        _, kf, kkey = _box_bounds(a, w_total, c, r)
        offer(c, kf)
        pool = _Boxes.concat([pool, kids])
        key = np.concatenate([key, kkey])


def _split(work: _Boxes, pick: np.ndarray, quadrant: int) -> _Boxes:
    """Child ``quadrant`` of every box; arc splits only have children 0 and 1."""
    ch = _Boxes(work.face.copy(), work.u0.copy(), work.u1.copy(), work.v0.copy(),
                work.v1.copy(), work.t0.copy(), work.t1.copy())
    arc_split = pick == 1
    tm = (ch.t0 + ch.t1) / 2
    if quadrant == 0:
        ch.t1 = np.where(arc_split, tm, ch.t1)
    elif quadrant == 1:
        ch.t0 = np.where(arc_split, tm, ch.t0)
    rows = np.flatnonzero(~arc_split)
    cols = pick[rows] - 2
    um = (ch.u0[rows, cols] + ch.u1[rows, cols]) / 2
    vm = (ch.v0[rows, cols] + ch.v1[rows, cols]) / 2
    if quadrant & 1:
        ch.u0[rows, cols] = um
    else:
        ch.u1[rows, cols] = um
    if quadrant & 2:
        ch.v0[rows, cols] = vm
    else:
        ch.v1[rows, cols] = vm
    return ch.take(~arc_split | (quadrant < 2))
