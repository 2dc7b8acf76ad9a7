"""The Z[Z^d]-modules of the spine complex: plaquette homology J, meridians H, edge chains C1.

J is generated by the plaquette classes P_x, P_y (and P_z for d = 3) subject
to the single relation

    d = 2:  (1-x) P_x - (1-y) P_y = 0
    d = 3:  (1-x) P_x + (1-y) P_y + (1-z) P_z = 0

pinned by requiring that the cycle-inclusion map j into the edge module C1 is
injective and matches j(P_x) = (1-y) Z, j(P_y) = (1-x) Z in the relative
model.  H is the direct sum, over the link components, of Z[Z^d] modulo the
component's translation relation (x^direction acts trivially on its
meridian); coordinates are stored on canonical representatives with zero
exponent along the component's reduction axis.

Filtration quotients I^k M / I^{k+1} M carry ordered bases:

    J, d = 2:  (1-x)^k P_y, then (1-x)^a (1-y)^(k-a) P_x for a = 0..k
    J, d = 3:  the P_x family, the P_y family, then the P_z family with no
               (1-z) factor, multi-indices in ascending lexicographic order
    H:         per component, the degree-k monomials in the surviving
               difference variables, in ascending lexicographic order

which reproduces the published matrix row and column labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple

from .errors import StructuralError
from .groupring import AXIS_NAMES, AugClass, Exponents, LaurentPoly, reduce_mod_filtration
from .lattice import PLAQUETTE_GENS, Line, LinkSpec
from .linalg import elementary_divisors

EDGE_GENS = {2: ("Z",), 3: ("E_x", "E_y", "E_z")}


class TorsionError(StructuralError):
    """A filtration quotient failed its freeness check."""


def u_multiplier(dim: int, alpha: Exponents) -> LaurentPoly:
    """The product of (1 - x_i)^alpha_i."""
    out = LaurentPoly.one(dim)
    for axis, a in enumerate(alpha):
        if a:
            out = out * (LaurentPoly.one_minus(dim, axis) ** a)
    return out


def multiplier_label(alpha: Exponents, skip: Tuple[int, ...] = ()) -> str:
    pieces = []
    for axis, a in enumerate(alpha):
        if axis in skip or a == 0:
            continue
        name = f"(1-{AXIS_NAMES[axis]})"
        pieces.append(name if a == 1 else f"{name}^{a}")
    return "".join(pieces)


def _degree_indices(dim: int, degree: int, zero_axes: Tuple[int, ...] = ()) -> List[Exponents]:
    """All multi-indices of the given total degree, zero on ``zero_axes``, lex ascending."""
    axes = [a for a in range(dim) if a not in zero_axes]
    out = set()
    for combo in combinations_with_replacement(axes, degree):
        alpha = [0] * dim
        for a in combo:
            alpha[a] += 1
        out.add(tuple(alpha))
    return sorted(out)


# -- chains -------------------------------------------------------------------


@dataclass
class PlaquetteChain:
    """An element of J: group-ring coefficients on the plaquette generators."""

    dim: int
    coords: Dict[str, LaurentPoly] = field(default_factory=dict)

    def __post_init__(self):
        gens = PLAQUETTE_GENS[self.dim]
        clean = {}
        for gen, poly in self.coords.items():
            if gen not in gens:
                raise ValueError(f"unknown plaquette generator {gen!r} for dim {self.dim}")
            if poly:
                clean[gen] = poly
        self.coords = clean

    @classmethod
    def generator(cls, dim: int, gen: str) -> "PlaquetteChain":
        return cls(dim, {gen: LaurentPoly.one(dim)})

    def coord(self, gen: str) -> LaurentPoly:
        return self.coords.get(gen, LaurentPoly.zero(self.dim))

    def __add__(self, other: "PlaquetteChain") -> "PlaquetteChain":
        out = dict(self.coords)
        for gen, poly in other.coords.items():
            out[gen] = out.get(gen, LaurentPoly.zero(self.dim)) + poly
        return PlaquetteChain(self.dim, out)

    def __neg__(self) -> "PlaquetteChain":
        return PlaquetteChain(self.dim, {g: -p for g, p in self.coords.items()})

    def __sub__(self, other: "PlaquetteChain") -> "PlaquetteChain":
        return self + (-other)

    def scaled(self, factor: LaurentPoly) -> "PlaquetteChain":
        return PlaquetteChain(self.dim, {g: factor * p for g, p in self.coords.items()})

    def normalized(self) -> "PlaquetteChain":
        """Canonical representative modulo the plaquette relation.

        The last generator's coefficient is made independent of the last
        variable by trading multiples of the relation into the earlier
        generators; the representative with that property is unique.
        """
        if self.dim == 2:
            q = self.coord("P_y")
            q0 = q.substitute_one(1)
            rest = (q - q0).exact_div_one_minus(1)
            # (1-y) P_y = (1-x) P_x
            new_px = self.coord("P_x") + rest * LaurentPoly.one_minus(2, 0)
            return PlaquetteChain(2, {"P_x": new_px, "P_y": q0})
        r = self.coord("P_z")
        r0 = r.substitute_one(2)
        rest = (r - r0).exact_div_one_minus(2)
        # (1-z) P_z = -(1-x) P_x - (1-y) P_y
        new_px = self.coord("P_x") - rest * LaurentPoly.one_minus(3, 0)
        new_py = self.coord("P_y") - rest * LaurentPoly.one_minus(3, 1)
        return PlaquetteChain(3, {"P_x": new_px, "P_y": new_py, "P_z": r0})

    def is_zero_in_module(self) -> bool:
        return not self.normalized().coords


def relation_chain(dim: int) -> PlaquetteChain:
    """The generator of the relation submodule (normalizes to zero in J)."""
    if dim == 2:
        return PlaquetteChain(
            2,
            {"P_x": LaurentPoly.one_minus(2, 0), "P_y": -LaurentPoly.one_minus(2, 1)},
        )
    return PlaquetteChain(
        3,
        {
            "P_x": LaurentPoly.one_minus(3, 0),
            "P_y": LaurentPoly.one_minus(3, 1),
            "P_z": LaurentPoly.one_minus(3, 2),
        },
    )


@dataclass
class EdgeModuleChain:
    """An element of the edge module C1 (rank 1 for d = 2, rank 3 for d = 3)."""

    dim: int
    coords: Dict[str, LaurentPoly] = field(default_factory=dict)

    def __post_init__(self):
        gens = EDGE_GENS[self.dim]
        clean = {}
        for gen, poly in self.coords.items():
            if gen not in gens:
                raise ValueError(f"unknown edge generator {gen!r} for dim {self.dim}")
            if poly:
                clean[gen] = poly
        self.coords = clean

    def coord(self, gen: str) -> LaurentPoly:
        return self.coords.get(gen, LaurentPoly.zero(self.dim))

    def min_filtration(self, maxdeg: int) -> int:
        """Minimum filtration degree over the coordinates (sentinel maxdeg + 1)."""
        if not self.coords:
            return maxdeg + 1
        return min(p.filtration_degree(maxdeg) for p in self.coords.values())

    def is_zero(self) -> bool:
        return not self.coords


def j_boundary(chain: PlaquetteChain) -> EdgeModuleChain:
    """The cycle-inclusion map J -> C1 on plaquette chains.

    j(P_x) = (1-y) Z and j(P_y) = (1-x) Z in the relative model; for the
    3-torus, j(P_x) = (1-z) E_y - (1-y) E_z and cyclic permutations.  The
    relation chain maps to zero.
    """
    dim = chain.dim
    if dim == 2:
        a = chain.coord("P_x")
        b = chain.coord("P_y")
        z_coord = a * LaurentPoly.one_minus(2, 1) + b * LaurentPoly.one_minus(2, 0)
        return EdgeModuleChain(2, {"Z": z_coord})
    p, q, r = chain.coord("P_x"), chain.coord("P_y"), chain.coord("P_z")
    ux, uy, uz = (LaurentPoly.one_minus(3, axis) for axis in range(3))
    return EdgeModuleChain(
        3,
        {
            "E_x": -uz * q + uy * r,
            "E_y": uz * p - ux * r,
            "E_z": -uy * p + ux * q,
        },
    )


# -- meridian module -----------------------------------------------------------


def meridian_reduce(poly: LaurentPoly, line: Line) -> LaurentPoly:
    """Canonical representative of a coefficient modulo the line's translation relation.

    The monomial x^direction acts trivially on the meridian of ``line``; the
    canonical form has exponent zero along the line's reduction axis.
    """
    a0 = line.reduction_axis
    v = line.direction
    s = v[a0]
    return poly.map_exponents(lambda e: tuple(ei - e[a0] * s * vi for ei, vi in zip(e, v)))


@dataclass
class MeridianChain:
    """An element of H: reduced group-ring coefficients on the meridians m(l)."""

    link: LinkSpec
    coords: Dict[str, LaurentPoly] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for label, poly in self.coords.items():
            line = self.link.component(label)
            reduced = meridian_reduce(poly, line)
            if reduced:
                clean[label] = reduced
        self.coords = clean

    @classmethod
    def zero(cls, link: LinkSpec) -> "MeridianChain":
        return cls(link, {})

    @classmethod
    def _reduced(cls, link: LinkSpec, coords: Dict[str, LaurentPoly]) -> "MeridianChain":
        """Internal fast path: coordinates must already be canonical representatives."""
        obj = object.__new__(cls)
        obj.link = link
        obj.coords = {label: poly for label, poly in coords.items() if poly}
        return obj

    def coord(self, label: str) -> LaurentPoly:
        return self.coords.get(label, LaurentPoly.zero(self.link.dim))

    def __add__(self, other: "MeridianChain") -> "MeridianChain":
        if other.link != self.link:
            raise ValueError("meridian chains over different links")
        out = dict(self.coords)
        for label, poly in other.coords.items():
            out[label] = out.get(label, LaurentPoly.zero(self.link.dim)) + poly
        return MeridianChain._reduced(self.link, out)

    def __neg__(self) -> "MeridianChain":
        return MeridianChain._reduced(self.link, {l: -p for l, p in self.coords.items()})

    def __sub__(self, other: "MeridianChain") -> "MeridianChain":
        return self + (-other)

    def scaled(self, factor: LaurentPoly) -> "MeridianChain":
        return MeridianChain(self.link, {l: factor * p for l, p in self.coords.items()})

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MeridianChain)
            and self.link == other.link
            and self.coords == other.coords
        )

    def min_filtration(self, maxdeg: int) -> int:
        if not self.coords:
            return maxdeg + 1
        return min(p.filtration_degree(maxdeg) for p in self.coords.values())

    def is_zero(self) -> bool:
        return not self.coords


# -- quotient bases -------------------------------------------------------------


@dataclass(frozen=True)
class BasisElement:
    generator: str  # plaquette generator or line label
    alpha: Exponents  # difference-variable multi-index
    label: str


@dataclass(frozen=True)
class QuotientBasis:
    module: str  # "J" or "H"
    dim: int
    degree: int
    elements: Tuple[BasisElement, ...]

    @property
    def labels(self) -> List[str]:
        return [e.label for e in self.elements]

    def index(self, generator: str, alpha: Exponents) -> int:
        for i, e in enumerate(self.elements):
            if e.generator == generator and e.alpha == alpha:
                return i
        raise KeyError((generator, alpha))

    def __len__(self) -> int:
        return len(self.elements)


def _element_label(multiplier: str, gen: str) -> str:
    return f"{multiplier} {gen}" if multiplier else gen


def basis_J(k: int, dim: int) -> QuotientBasis:
    """Ordered basis of I^k J / I^{k+1} J.

    For d = 2 this is the k+2 element family [(1-x)^k P_y, (1-x)^a (1-y)^(k-a)
    P_x], ordered with the P_y element first and ascending powers of (1-x)
    after it; for d = 3 it is the (k+1)(k+3) element family of all P_x and
    P_y multi-indices together with the z-free P_z ones.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    elements: List[BasisElement] = []
    if dim == 2:
        alpha_py = (k, 0)
        elements.append(BasisElement("P_y", alpha_py, _element_label(multiplier_label(alpha_py), "P_y")))
        for a in range(k + 1):
            alpha = (a, k - a)
            elements.append(BasisElement("P_x", alpha, _element_label(multiplier_label(alpha), "P_x")))
    elif dim == 3:
        for gen, zero_axes in (("P_x", ()), ("P_y", ()), ("P_z", (2,))):
            for alpha in _degree_indices(3, k, zero_axes):
                elements.append(BasisElement(gen, alpha, _element_label(multiplier_label(alpha), gen)))
    else:
        raise ValueError("dim must be 2 or 3")
    return QuotientBasis("J", dim, k, tuple(elements))


def _verify_meridian_freeness(k: int, line: Line, slots: Sequence[Exponents]) -> None:
    """Smith-form check that the degree-k piece of the meridian quotient is free.

    The images of all degree-k difference monomials must span the slot
    lattice with unit elementary divisors; anything else is torsion and
    aborts the computation.
    """
    dim = line.dim
    full = _degree_indices(dim, k)
    slot_index = {alpha: i for i, alpha in enumerate(slots)}
    rows = []
    for alpha in full:
        reduced = meridian_reduce(u_multiplier(dim, alpha), line)
        cls = reduce_mod_filtration(reduced, k) if reduced else AugClass.zero(dim, k)
        row = [0] * len(slots)
        for beta, c in cls.coeffs.items():
            row[slot_index[beta]] = c
        rows.append(row)
    if not slots:
        return
    divisors = elementary_divisors(rows)
    if len(divisors) != len(slots) or any(abs(d) != 1 for d in divisors):
        raise TorsionError(
            f"meridian quotient of {line.label} at degree {k} is not free "
            f"on the expected basis (elementary divisors {divisors})"
        )


def basis_H(k: int, link: LinkSpec, verify: bool = True) -> QuotientBasis:
    """Ordered basis of I^k H / I^{k+1} H for the given link.

    Per component, the translation relation substitutes away the difference
    variable of the reduction axis; the surviving degree-k monomials are the
    basis, in ascending lexicographic order.  Freeness of each component's
    quotient is certified by a Smith-form computation.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    elements: List[BasisElement] = []
    for line in link.components:
        a0 = line.reduction_axis
        slots = _degree_indices(link.dim, k, (a0,))
        if verify:
            _verify_meridian_freeness(k, line, slots)
        for alpha in slots:
            label = _element_label(multiplier_label(alpha), line.label)
            elements.append(BasisElement(line.label, alpha, label))
    return QuotientBasis("H", link.dim, k, tuple(elements))


# -- normal forms ----------------------------------------------------------------


def _class_coordinates(cls: AugClass, slots: Dict[Exponents, int], vector: List[int]) -> None:
    for alpha, c in cls.coeffs.items():
        if alpha not in slots:
            raise StructuralError(f"coefficient on unexpected slot {alpha}")
        vector[slots[alpha]] = c


def normal_form_J(chain: PlaquetteChain, k: int) -> List[int]:
    """Integer coordinates of a chain in I^k J over basis_J(k, dim).

    Raises FiltrationError when the chain does not lie in I^k J.
    """
    basis = basis_J(k, chain.dim)
    norm = chain.normalized()
    vector = [0] * len(basis)
    slot_of = {(e.generator, e.alpha): i for i, e in enumerate(basis.elements)}
    for gen, poly in norm.coords.items():
        cls = reduce_mod_filtration(poly, k)
        for alpha, c in cls.coeffs.items():
            key = (gen, alpha)
            if key not in slot_of:
                raise StructuralError(f"normalized chain touches non-basis slot {key}")
            vector[slot_of[key]] += c
    return vector


def normal_form_H(chain: MeridianChain, k: int) -> List[int]:
    """Integer coordinates of a meridian chain in I^k H over basis_H(k, link)."""
    basis = basis_H(k, chain.link, verify=False)
    vector = [0] * len(basis)
    slot_of = {(e.generator, e.alpha): i for i, e in enumerate(basis.elements)}
    for label, poly in chain.coords.items():
        cls = reduce_mod_filtration(poly, k)
        for alpha, c in cls.coeffs.items():
            key = (label, alpha)
            if key not in slot_of:
                raise StructuralError(f"meridian chain touches non-basis slot {key}")
            vector[slot_of[key]] += c
    return vector


def basis_chain(element: BasisElement, dim: int) -> PlaquetteChain:
    """The plaquette chain realizing a J-basis element."""
    return PlaquetteChain(dim, {element.generator: u_multiplier(dim, element.alpha)})


def chain_from_cycle(cycle, dim: int = 3) -> PlaquetteChain:
    """Plaquette coordinates of a lattice edge cycle, in module normal form.

    Only meaningful for the 3-torus model, whose plaquette module carries the
    relation; the planar grid's single free class is handled by the word
    machinery directly.
    """
    from .lattice import cycle_to_plaquette_coords

    if dim != 3:
        raise ValueError("module coordinates of cycles are a 3-torus operation")
    coords = cycle_to_plaquette_coords(cycle, dim)
    return PlaquetteChain(dim, coords).normalized()


def format_combination(vector: Sequence[int], basis: QuotientBasis) -> str:
    """Human form of an integer combination of basis elements, e.g. ``(1-z) P_z``."""
    pieces = []
    for c, element in zip(vector, basis.elements):
        if c == 0:
            continue
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        pieces.append(("- " if c < 0 else "+ ") + mag + element.label)
    if not pieces:
        return "0"
    out = " ".join(pieces)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]
