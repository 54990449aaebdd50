"""Simplex geometry for agent coordination in 2-D and 3-D.

A d-dimensional simplex (triangle or tetrahedron) is described by its d+1
vertices.  Points are located relative to a simplex through barycentric
coordinates: the unique affine weights that reproduce the point from the
vertices and sum to one.  The sign pattern of those weights classifies the
plane (or space) around the simplex into regions, with the all-positive
pattern marking the open interior.

All tolerances are module constants so callers and tests agree on the exact
cutoffs.
"""

from __future__ import annotations

import itertools

import numpy as np

# Relative singular-value cutoff used when measuring the affine rank of a
# point set.
RANK_TOL = 1e-9

# Half-width of the band around zero treated as "on the boundary" when
# classifying barycentric coordinates or testing containment.
CONTAIN_TOL = 1e-9

# Barycentric coordinates of a point must sum to one within this bound.
SUM_TOL = 1e-9

# Sign-pattern entries.
NEGATIVE = -1
ZERO = 0
POSITIVE = 1


class GeometryError(ValueError):
    """Invalid geometric input."""


class DegenerateSimplexError(GeometryError):
    """Vertex set does not span the ambient dimension."""


def as_point(p) -> np.ndarray:
    """Coerce input to a 1-D float array."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise GeometryError(f"expected a point, got array of shape {arr.shape}")
    return arr


def affine_rank(points) -> int:
    """Dimension of the affine hull of a point set.

    The rank is the number of singular values of the difference matrix
    ``[p_2 - p_1, ..., p_m - p_1]`` exceeding ``RANK_TOL`` relative to the
    largest one (or relative to 1 when all vanish).

    Parameters
    ----------
    points:
        Sequence of at least two points of equal dimension.

    Returns
    -------
    int
        Affine rank, between 0 and the ambient dimension.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise GeometryError("affine_rank needs at least two points")
    diffs = pts[1:] - pts[0]
    sv = np.linalg.svd(diffs, compute_uv=False)
    largest = sv.max() if sv.size else 0.0
    cutoff = RANK_TOL * (largest if largest > 0.0 else 1.0)
    return int(np.sum(sv > cutoff))


class Simplex:
    """A non-degenerate d-simplex given by d+1 vertices in d dimensions.

    Parameters
    ----------
    vertices:
        Array-like of shape (d+1, d) with d in {2, 3}.

    Raises
    ------
    DegenerateSimplexError
        If the vertices do not affinely span the ambient space.
    """

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2:
            raise GeometryError("vertices must form a 2-D array")
        n, d = verts.shape
        if d not in (2, 3):
            raise GeometryError(f"ambient dimension must be 2 or 3, got {d}")
        if n != d + 1:
            raise GeometryError(f"a {d}-simplex needs {d + 1} vertices, got {n}")
        if affine_rank(verts) != d:
            raise DegenerateSimplexError("vertices are affinely dependent")
        self.vertices = verts
        self.vertices.setflags(write=False)
        # Homogeneous vertex matrix: coordinates stacked over a row of ones.
        m = np.vstack([verts.T, np.ones(n)])
        self._matrix = m
        self._inverse = np.linalg.inv(m)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def matrix(self) -> np.ndarray:
        """The (d+1, d+1) homogeneous vertex matrix."""
        return self._matrix.copy()

    def inverse_matrix(self) -> np.ndarray:
        """Inverse of the homogeneous vertex matrix.

        Row k holds the affine functional giving the k-th barycentric
        coordinate of a point: ``alpha_k = row[:d] @ p + row[d]``.
        """
        return self._inverse.copy()

    def facet(self, k: int) -> np.ndarray:
        """Vertices of the facet opposite vertex k."""
        if not 0 <= k < len(self.vertices):
            raise GeometryError(f"facet index {k} out of range")
        return np.delete(self.vertices, k, axis=0)

    def __repr__(self):
        return f"Simplex({self.vertices.tolist()})"


def barycentric(simplex: Simplex, point) -> np.ndarray:
    """Barycentric coordinates of a point relative to a simplex.

    Solves the homogeneous system ``M @ alpha = [p; 1]`` where M is the
    simplex vertex matrix, so the result always satisfies
    ``sum(alpha) == 1`` and ``vertices.T @ alpha == p`` up to round-off.
    """
    p = as_point(point)
    if p.shape[0] != simplex.dim:
        raise GeometryError(
            f"point dimension {p.shape[0]} does not match simplex dimension {simplex.dim}"
        )
    rhs = np.append(p, 1.0)
    try:
        return np.linalg.solve(simplex._matrix, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - ctor rejects these
        raise DegenerateSimplexError(str(exc)) from exc


def contains(simplex: Simplex, point, closed: bool = False) -> bool:
    """Test whether a point lies in a simplex.

    In closed mode the boundary counts as inside: every coordinate must be
    at least ``-CONTAIN_TOL``.  In open mode the point must sit strictly
    interior, beyond the grazing band: every coordinate above
    ``CONTAIN_TOL``.  This keeps open containment equivalent to an
    all-positive classify_region pattern.
    """
    alpha = barycentric(simplex, point)
    if closed:
        return bool(np.all(alpha >= -CONTAIN_TOL))
    return bool(np.all(alpha > CONTAIN_TOL))


def classify_region(simplex: Simplex, point) -> tuple:
    """Sign pattern of the barycentric coordinates of a point.

    Each entry is NEGATIVE, ZERO or POSITIVE; magnitudes within
    ``CONTAIN_TOL`` count as ZERO.  Because the coordinates sum to one the
    all-negative pattern cannot occur.
    """
    alpha = barycentric(simplex, point)
    signs = np.where(alpha > CONTAIN_TOL, POSITIVE, np.where(alpha < -CONTAIN_TOL, NEGATIVE, ZERO))
    return tuple(int(s) for s in signs)


def point_segment_distance(point, a, b) -> float:
    """Euclidean distance from a point to the segment [a, b]."""
    p = as_point(point)
    a = as_point(a)
    b = as_point(b)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(p - (a + t * ab)))


def point_triangle_distance(point, a, b, c) -> float:
    """Euclidean distance from a point to a filled 3-D triangle.

    Uses the standard Voronoi-region walk: classify the point against the
    vertex, edge and face regions of the triangle and project accordingly.
    """
    p = as_point(point)
    a = as_point(a)
    b = as_point(b)
    c = as_point(c)
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = float(ab @ ap)
    d2 = float(ac @ ap)
    if d1 <= 0.0 and d2 <= 0.0:
        return float(np.linalg.norm(ap))
    bp = p - b
    d3 = float(ab @ bp)
    d4 = float(ac @ bp)
    if d3 >= 0.0 and d4 <= d3:
        return float(np.linalg.norm(bp))
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return float(np.linalg.norm(p - (a + v * ab)))
    cp = p - c
    d5 = float(ab @ cp)
    d6 = float(ac @ cp)
    if d6 >= 0.0 and d5 <= d6:
        return float(np.linalg.norm(cp))
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return float(np.linalg.norm(p - (a + w * ac)))
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return float(np.linalg.norm(p - (b + w * (c - b))))
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return float(np.linalg.norm(p - (a + ab * v + ac * w)))


def boundary_distance(simplex: Simplex, point) -> float:
    """Distance from an interior point to the simplex boundary.

    The minimum over the d+1 facets of the exact point-to-facet distance.

    Raises
    ------
    GeometryError
        If the point lies outside the closed simplex.
    """
    p = as_point(point)
    if not contains(simplex, p, closed=True):
        raise GeometryError("point lies outside the simplex; boundary distance undefined")
    dists = []
    for k in range(len(simplex.vertices)):
        f = simplex.facet(k)
        if simplex.dim == 2:
            dists.append(point_segment_distance(p, f[0], f[1]))
        else:
            dists.append(point_triangle_distance(p, f[0], f[1], f[2]))
    return min(dists)


def min_pairwise_distance(points) -> tuple[float, tuple[int, int]]:
    """Smallest distance between any two points, with the achieving pair.

    Returns the distance and the 1-based index pair (i, j), i < j.  Ties
    resolve to the lexicographically smallest pair.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise GeometryError("min_pairwise_distance needs at least two points")
    best = np.inf
    pair = (0, 0)
    for i, j in itertools.combinations(range(pts.shape[0]), 2):
        d = float(np.linalg.norm(pts[i] - pts[j]))
        if d < best:
            best = d
            pair = (i + 1, j + 1)
    return best, pair
