"""Cubical-lattice geometry: cycles, fillings, periodic lines, and the linking oracle.

The universal-cover picture is a unit cubical lattice in R^d.  For d = 3 the
spine preimage is the full 1-skeleton (the jungle gym): homology classes are
1-cycles supported on lattice edges, fillings are 2-chains of lattice squares,
and linking numbers count transverse intersections of those squares with the
translate orbit of an off-lattice line.

For d = 2 (the relative product-with-interval model) the spine preimage is
the family of vertical segments over the lattice points, with the top and
bottom sheets contracted.  Projecting along the interval direction, a 1-cycle
becomes a 0-cycle of weighted lattice points, a filling becomes a planar
1-chain of lattice edges (each edge is the projection of a vertical wall),
and linking counts the signed crossings of those walls by the lines.

Cells are keyed by integer base points: edges as (base, axis), squares as
(base, (axis_i, axis_j)) with axis_i < axis_j.  All line data is exact
(integer directions, Fraction offsets), so every transversality decision is
an exact comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import StructuralError
from .groupring import LaurentPoly

Vec = Tuple[int, ...]
Edge = Tuple[Vec, int]
Face = Tuple[Vec, Tuple[int, int]]
VertexChain = Dict[Vec, int]
EdgeChain = Dict[Edge, int]
FaceChain = Dict[Face, int]


class OffsetCollisionError(StructuralError):
    """A line hits the lattice skeleton, another line, or a cell boundary."""


class NotACycleError(ValueError):
    """The input chain has nonzero boundary."""


def _bump(chain: dict, key, value: int) -> None:
    if not value:
        return
    new = chain.get(key, 0) + value
    if new:
        chain[key] = new
    else:
        del chain[key]


def _shift(point: Vec, axis: int, delta: int = 1) -> Vec:
    return point[:axis] + (point[axis] + delta,) + point[axis + 1 :]


# -- boundary operators ------------------------------------------------------


def boundary_of_edges(edges: EdgeChain) -> VertexChain:
    out: VertexChain = {}
    for (base, axis), n in edges.items():
        _bump(out, _shift(base, axis), n)
        _bump(out, base, -n)
    return out


def boundary_of_faces(faces: FaceChain) -> EdgeChain:
    out: EdgeChain = {}
    for (base, (i, j)), n in faces.items():
        _bump(out, (base, i), n)
        _bump(out, (_shift(base, i), j), n)
        _bump(out, (_shift(base, j), i), -n)
        _bump(out, (base, j), -n)
    return out


def is_edge_cycle(edges: EdgeChain) -> bool:
    return not boundary_of_edges(edges)


def _signed_range(a: int, b: int) -> List[Tuple[int, int]]:
    """Pairs (t, sign) so that sum_t sign*f(t) means the oriented sum from a to b."""
    if b >= a:
        return [(t, 1) for t in range(a, b)]
    return [(t, -1) for t in range(b, a)]


def _oriented_face(base: Vec, a: int, b: int) -> Tuple[Face, int]:
    """The square spanned by e_a ^ e_b, as (canonical face, orientation sign)."""
    if a < b:
        return (base, (a, b)), 1
    return (base, (b, a)), -1


# -- fillings ----------------------------------------------------------------


def _support_min(points: Iterable[Vec], dim: int) -> Vec:
    pts = list(points)
    if not pts:
        return (0,) * dim
    return tuple(min(p[a] for p in pts) for a in range(dim))


def fill_edge_cycle(cycle: EdgeChain, dim: int, order: Optional[Sequence[int]] = None) -> FaceChain:
    """A 2-chain S with boundary equal to the given 1-cycle.

    The filling cones each edge off toward the smallest corner of the bounding
    box, sweeping the axes in the given order (default ascending).  Different
    orders give different chains with the same boundary.
    """
    if boundary_of_edges(cycle):
        raise NotACycleError("edge chain has nonzero boundary")
    if not cycle:
        return {}
    order = tuple(order) if order is not None else tuple(range(dim))
    if sorted(order) != list(range(dim)):
        raise ValueError(f"order {order} is not a permutation of the axes")
    base_corner = _support_min((b for (b, _a) in cycle), dim)
    faces: FaceChain = {}
    position = {axis: k for k, axis in enumerate(order)}
    for (v, axis), n in cycle.items():
        p = position[axis]
        for k in range(p + 1, dim):
            q = order[k]
            anchor = list(v)
            for later in order[k + 1 :]:
                anchor[later] = base_corner[later]
            for t, srange_sign in _signed_range(base_corner[q], v[q]):
                anchor[q] = t
                face, orient = _oriented_face(tuple(anchor), axis, q)
                _bump(faces, face, -n * srange_sign * orient)
    return faces


def staircase_path(start: Vec, end: Vec, order: Sequence[int]) -> EdgeChain:
    """The axis-by-axis lattice path from start to end, as a signed edge chain."""
    edges: EdgeChain = {}
    current = list(start)
    for axis in order:
        for t, sign in _signed_range(start[axis], end[axis]):
            base = list(current)
            base[axis] = t
            _bump(edges, (tuple(base), axis), sign)
        current[axis] = end[axis]
    return edges


def fill_vertex_cycle(cycle: VertexChain, dim: int, order: Optional[Sequence[int]] = None) -> EdgeChain:
    """A planar 1-chain with boundary equal to the given weighted points (d = 2).

    Requires total weight zero; fills by staircase paths from the smallest
    corner of the bounding box.
    """
    if sum(cycle.values()) != 0:
        raise NotACycleError("vertex weights do not sum to zero")
    if not cycle:
        return {}
    order = tuple(order) if order is not None else tuple(range(dim))
    base_corner = _support_min(cycle.keys(), dim)
    edges: EdgeChain = {}
    for v, n in cycle.items():
        for key, sign in staircase_path(base_corner, v, order).items():
            _bump(edges, key, n * sign)
    return edges


# -- word tracing ------------------------------------------------------------


def trace_word(letters: Sequence[Tuple[int, int]], dim: int) -> EdgeChain:
    """The closed edge path traced from the origin by a reduced word.

    ``letters`` is a sequence of (generator axis, +-1).  The path closes
    exactly when the word lies in the commutator subgroup; otherwise a
    NotACycleError is raised.
    """
    edges: EdgeChain = {}
    pos = [0] * dim
    for axis, sign in letters:
        if not 0 <= axis < dim:
            raise ValueError(f"letter axis {axis} out of range for dim {dim}")
        if sign == 1:
            _bump(edges, (tuple(pos), axis), 1)
            pos[axis] += 1
        elif sign == -1:
            pos[axis] -= 1
            _bump(edges, (tuple(pos), axis), -1)
        else:
            raise ValueError("letter sign must be +-1")
    if any(pos):
        raise NotACycleError("word is not in the commutator subgroup; path does not close")
    return edges


# -- plaquette realizations ---------------------------------------------------

# Orientations are pinned so that the boundary of each plaquette reproduces
# the edge-module images (1-y)Z etc., and so that the degree-0 pairing with
# the matching axis line is +1.

PLAQUETTE_GENS = {2: ("P_x", "P_y"), 3: ("P_x", "P_y", "P_z")}


def plaquette_cells(dim: int, gen: str):
    """The signed lattice cell realizing a plaquette generator at the origin.

    For d = 3 these are oriented squares; for d = 2 they are planar edges
    (projected vertical walls).
    """
    origin = (0,) * dim
    if dim == 3:
        table = {
            "P_x": ((origin, (1, 2)), 1),
            "P_y": ((origin, (0, 2)), -1),
            "P_z": ((origin, (0, 1)), 1),
        }
    elif dim == 2:
        table = {
            "P_x": ((origin, 1), -1),  # wall over the y-edge, boundary (1-y)Z
            "P_y": ((origin, 0), -1),  # wall over the x-edge, boundary (1-x)Z
        }
    else:
        raise ValueError(f"unsupported dimension {dim}")
    if gen not in table:
        raise ValueError(f"unknown plaquette generator {gen!r} for dim {dim}")
    return table[gen]


def plaquette_chain_cells(coords: Dict[str, LaurentPoly], dim: int):
    """Realize a plaquette chain as signed lattice cells (faces d=3, edges d=2)."""
    cells: dict = {}
    for gen, poly in coords.items():
        cell, orient = plaquette_cells(dim, gen)
        for exps, coeff in poly.terms.items():
            if dim == 3:
                base, axes = cell
                key = (tuple(b + e for b, e in zip(base, exps)), axes)
            else:
                base, axis = cell
                key = (tuple(b + e for b, e in zip(base, exps)), axis)
            _bump(cells, key, orient * coeff)
    return cells


def plaquette_chain_cycle(coords: Dict[str, LaurentPoly], dim: int):
    """The geometric cycle (boundary of the realizing cells) of a plaquette chain."""
    cells = plaquette_chain_cells(coords, dim)
    if dim == 3:
        return boundary_of_faces(cells)
    return boundary_of_edges(cells)


def cycle_to_plaquette_coords(cycle: EdgeChain, dim: int) -> Dict[str, LaurentPoly]:
    """Coordinates of an edge cycle over the plaquette generators.

    Fills the cycle and reads off the signed multiplicity of each face orbit.
    For d = 3 the generators are P_x, P_y, P_z (the result is well defined
    modulo the plaquette relation); for d = 2 the planar lattice has a single
    square class P and the coordinate is exact.
    """
    faces = fill_edge_cycle(cycle, dim)
    if dim == 3:
        labels = {(1, 2): ("P_x", 1), (0, 2): ("P_y", -1), (0, 1): ("P_z", 1)}
    else:
        labels = {(0, 1): ("P", 1)}
    coords: Dict[str, Dict[Vec, int]] = {}
    for (base, axes), n in faces.items():
        gen, orient = labels[axes]
        _bump(coords.setdefault(gen, {}), base, orient * n)
    return {gen: LaurentPoly(dim, terms) for gen, terms in coords.items() if terms}


# -- lines and link specifications --------------------------------------------


def _is_primitive(direction: Vec) -> bool:
    g = 0
    for v in direction:
        g = gcd(g, abs(v))
    return g == 1


@dataclass(frozen=True)
class Line:
    """A straight line off the lattice: integer direction, rational basepoint.

    The basepoint is derived from ``offset_seed``: component coordinates are
    (1/D, 2/D, 3/D) truncated to the dimension, with D = 2*offset_seed + 4.
    Distinct seeds give lines on incommensurable offsets, which keeps every
    translate off the lattice skeleton and away from the other components.
    """

    label: str
    direction: Vec
    offset_seed: int

    def __post_init__(self):
        if not any(self.direction):
            raise ValueError("line direction must be nonzero")
        if not _is_primitive(self.direction):
            raise ValueError(f"line direction {self.direction} is not primitive")
        if self.offset_seed < 1:
            raise ValueError("offset_seed must be >= 1")

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def basepoint(self) -> Tuple[Fraction, ...]:
        d = 2 * self.offset_seed + 4
        return tuple(Fraction(a + 1, d) for a in range(self.dim))

    @property
    def reduction_axis(self) -> int:
        """First axis with a unit direction entry (used for meridian normal forms)."""
        for a, v in enumerate(self.direction):
            if abs(v) == 1:
                return a
        raise ValueError(
            f"direction {self.direction} has no unit entry; meridian normal forms "
            "are only available for the standard curve families"
        )

    @property
    def rep_axis(self) -> int:
        """Axis used to normalize coset representatives (any primitive direction)."""
        for a, v in enumerate(self.direction):
            if abs(v) == 1:
                return a
        return next(a for a, v in enumerate(self.direction) if v)

    def canonical_rep(self, g: Vec) -> Vec:
        """Reduce a translate modulo the line stabilizer Z*direction.

        The representative has its rep-axis coordinate in [0, |v|), which is 0
        for the unit-entry families.
        """
        a0 = self.rep_axis
        v0 = self.direction[a0]
        residue = g[a0] % abs(v0)
        t = (g[a0] - residue) // v0
        return tuple(gi - t * vi for gi, vi in zip(g, self.direction))

    def to_dict(self) -> dict:
        return {
            "direction": list(self.direction),
            "label": self.label,
            "offsetSeed": self.offset_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Line":
        return cls(
            label=data["label"],
            direction=tuple(int(v) for v in data["direction"]),
            offset_seed=int(data["offsetSeed"]),
        )


def _progressions_share_point(
    pairs: List[Tuple[int, Fraction]],
) -> bool:
    """Whether the progressions { (Z - beta)/w } for (w, beta) pairs intersect.

    Each pair demands w*r ≡ -beta (mod 1).  Two progressions intersect iff
    beta_1*w_2 - beta_2*w_1 is divisible by gcd(w_1, w_2); the joint system is
    checked pairwise, which is sufficient for the rank-one lattices here.
    """
    for idx in range(len(pairs)):
        for jdx in range(idx + 1, len(pairs)):
            w1, b1 = pairs[idx]
            w2, b2 = pairs[jdx]
            g = gcd(w1, w2)
            if (b1 * w2 - b2 * w1) % g != 0:
                return False
    # single progressions are nonempty; pairwise compatible systems of rank-one
    # congruences over Q are solvable
    return True


def line_misses_skeleton(line: Line) -> bool:
    """True when no translate of the line meets the lattice 1-skeleton (d=3)
    or the lattice points (d=2)."""
    dim = line.dim
    w = line.direction
    beta = line.basepoint
    axis_sets = [tuple(a for a in range(dim) if a != skip) for skip in range(dim)] if dim == 3 else [tuple(range(dim))]
    for axes in axis_sets:
        pairs = []
        feasible = True
        for a in axes:
            if w[a] == 0:
                if beta[a].denominator == 1:
                    pairs = None
                    break
                feasible = False
                break
            pairs.append((w[a], beta[a]))
        if not feasible:
            continue  # this skeleton family is unreachable
        if pairs is None or _progressions_share_point(pairs):
            return False
    return True


def lines_disjoint(l1: Line, l2: Line) -> bool:
    """Whether all lattice translates of the two lines are pairwise disjoint (d=3)."""
    w1, w2 = l1.direction, l2.direction
    delta = tuple(b2 - b1 for b1, b2 in zip(l1.basepoint, l2.basepoint))
    cross = (
        w1[1] * w2[2] - w1[2] * w2[1],
        w1[2] * w2[0] - w1[0] * w2[2],
        w1[0] * w2[1] - w1[1] * w2[0],
    )
    if any(cross):
        # skew test: translates meet iff cross . (delta + g) = 0 for some integer g
        g = gcd(gcd(abs(cross[0]), abs(cross[1])), abs(cross[2]))
        value = sum(c * d for c, d in zip(cross, delta))
        return value % g != 0
    # parallel: they coincide iff delta + g lies on the direction line
    pairs = []
    for a in range(3):
        if w1[a] == 0:
            if delta[a].denominator != 1:
                return True
        else:
            pairs.append((w1[a], -delta[a]))
    return not _progressions_share_point(pairs)


@dataclass(frozen=True)
class LinkSpec:
    """A periodic line family: the lift of a link whose components are essential curves."""

    dim: int
    components: Tuple[Line, ...]

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        labels = [c.label for c in self.components]
        if len(set(labels)) != len(labels):
            raise ValueError("component labels must be unique")
        for c in self.components:
            if c.dim != self.dim:
                raise ValueError("component dimension mismatch")
        self.validate_geometry()

    def validate_geometry(self) -> None:
        for c in self.components:
            if not line_misses_skeleton(c):
                raise OffsetCollisionError(
                    f"component {c.label} meets the lattice skeleton"
                )
        if self.dim == 3:
            for i, c1 in enumerate(self.components):
                for c2 in self.components[i + 1 :]:
                    if not lines_disjoint(c1, c2):
                        raise OffsetCollisionError(
                            f"components {c1.label} and {c2.label} have colliding translates"
                        )
        else:
            seen = {}
            for c in self.components:
                key = (tuple(abs(v) for v in c.direction), c.basepoint)
                if key in seen:
                    raise OffsetCollisionError(
                        f"components {seen[key]} and {c.label} coincide"
                    )
                seen[key] = c.label

    def component(self, label: str) -> Line:
        for c in self.components:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "components": [c.to_dict() for c in self.components]}

    @classmethod
    def from_dict(cls, data: dict) -> "LinkSpec":
        return cls(
            dim=int(data["dim"]),
            components=tuple(Line.from_dict(c) for c in data["components"]),
        )


# -- crossing enumeration ------------------------------------------------------


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _floor_fraction(x: Fraction) -> int:
    return x.numerator // x.denominator


def _unique_integer_in_open_unit(lo: Fraction) -> int:
    """The unique integer in the open interval (lo, lo + 1); collision if lo is integral."""
    if lo.denominator == 1:
        raise OffsetCollisionError("crossing lands on a cell boundary")
    return _floor_fraction(lo) + 1


def cell_crossings(base: Vec, span_axes: Tuple[int, ...], line: Line) -> List[Vec]:
    """Translates of the line crossing the open unit cell, as canonical coset reps.

    The cell is the product of open unit intervals along ``span_axes`` at the
    integer base point, with the remaining coordinate fixed; exactly one axis
    is fixed (edges in d=2, squares in d=3).  Transversality failures raise
    OffsetCollisionError.
    """
    dim = line.dim
    w = line.direction
    beta = line.basepoint
    fixed = [a for a in range(dim) if a not in span_axes]
    assert len(fixed) == 1, "cells must have exactly one fixed axis"
    m = fixed[0]
    if w[m] == 0:
        return []  # line parallel to the cell
    a0 = line.rep_axis
    reps: List[Vec] = []

    def solve_span(r: Fraction, g: Dict[int, int]) -> Vec:
        for a in span_axes:
            if a in g:
                continue
            t = beta[a] + r * w[a]
            g[a] = _unique_integer_in_open_unit(Fraction(base[a]) - t)
        return tuple(g[a] for a in range(dim))

    for residue in range(abs(w[a0])):
        if a0 == m:
            # the representative fixes g_m, so the crossing parameter is forced
            r = (Fraction(base[m]) - beta[m] - residue) / w[m]
            reps.append(solve_span(r, {m: residue}))
        else:
            # g_m = n runs over the integers allowed by the open interval on axis a0
            lo = Fraction(base[a0]) - beta[a0] - residue
            hi = lo + 1
            r_lo, r_hi = sorted((lo / w[a0], hi / w[a0]))
            n_lo, n_hi = sorted(
                (
                    Fraction(base[m]) - beta[m] - r_lo * w[m],
                    Fraction(base[m]) - beta[m] - r_hi * w[m],
                )
            )
            if n_lo.denominator == 1 or n_hi.denominator == 1:
                # an integer endpoint is a translate through the cell corner
                raise OffsetCollisionError(
                    f"a translate of {line.label} grazes a cell boundary"
                )
            n_min = _floor_fraction(n_lo) + 1  # strictly inside the open interval
            n_max = _floor_fraction(n_hi)
            for n in range(n_min, n_max + 1):
                r = (Fraction(base[m]) - beta[m] - n) / w[m]
                reps.append(solve_span(r, {m: n, a0: residue}))
    return reps


def _crossing_sign(span_axes: Tuple[int, ...], m: int, w: Vec) -> int:
    """Sign of a transverse crossing: orientation of (cell frame, line direction)."""
    sign = 1 if w[m] > 0 else -1
    return sign * _perm_sign(tuple(span_axes) + (m,))


def linking_of_cells(cells: dict, line: Line, dim: int) -> LaurentPoly:
    """Signed crossings of a cell chain with the line orbit, as a group-ring element.

    Coefficients are collected on canonical coset representatives, so the
    result is the canonical form of the equivariant linking number modulo the
    line's translation relation.
    """
    total: Dict[Vec, int] = {}
    for key, coeff in cells.items():
        base, axes = key
        span = axes if isinstance(axes, tuple) else (axes,)
        m = next(a for a in range(dim) if a not in span)
        if line.direction[m] == 0:
            continue  # parallel to the cell
        sign = _crossing_sign(span, m, line.direction)
        for rep in cell_crossings(base, span, line):
            _bump(total, line.canonical_rep(rep), coeff * sign)
    return LaurentPoly(dim, total)


def dump_cells(cells: dict) -> str:
    """Debug form of a cell chain: sorted ``[base] @[axes]: coefficient`` lines."""
    def norm(key):
        if isinstance(key, tuple) and key and isinstance(key[0], tuple):
            base, axes = key
            return (tuple(base), (axes,) if isinstance(axes, int) else tuple(axes))
        return (tuple(key), ())

    rows = sorted((norm(k), v) for k, v in cells.items())
    out = []
    for (base, axes), value in rows:
        cell = str(list(base)) + (f" @{list(axes)}" if axes else "")
        out.append(f"{cell}: {value}")
    return "\n".join(out)


def geometric_linking(cycle, line: Line, dim: int, order: Optional[Sequence[int]] = None) -> LaurentPoly:
    """Equivariant linking of a lattice cycle with a line orbit, via a fresh filling.

    For d = 3 the cycle is an edge cycle and the filling is a square chain;
    for d = 2 the cycle is a weighted point set (total weight zero) and the
    filling is a planar edge chain of projected walls.  The answer is the sum
    of signed crossing counts over the line translates, written on canonical
    coset representatives.
    """
    if dim == 3:
        filling = fill_edge_cycle(cycle, dim, order)
    elif dim == 2:
        filling = fill_vertex_cycle(cycle, dim, order)
    else:
        raise ValueError("dim must be 2 or 3")
    return linking_of_cells(filling, line, dim)
