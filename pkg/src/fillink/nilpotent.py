"""Free-group words, Magnus expansion, Hall bases, and maps into plaquette quotients.

Lower-central-series membership is decided through the Magnus embedding
x_i -> 1 + X_i into truncated noncommutative power series: a word lies in
the k-th term exactly when every nonempty monomial of degree < k vanishes.

The map phi sends a word of the commutator subgroup to the homology class
of its traced lattice cycle.  A word of lower-central depth k lands in the
(k-2)-nd filtration piece of the plaquette module, and the left-normed
commutator [..[[x1,x2],x3]..,xk] maps to the plaquette class of [x1,x2]
multiplied by (1-x3)...(1-xk); every basis element of the quotient is hit
by such words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .groupring import AXIS_NAMES, LaurentPoly, reduce_mod_filtration
from .lattice import cycle_to_plaquette_coords, trace_word
from .linalg import bareiss_rank
from .modules import (
    BasisElement,
    PlaquetteChain,
    QuotientBasis,
    basis_J,
    multiplier_label,
    normal_form_J,
)

Letter = Tuple[int, int]  # (generator axis, +-1)


@dataclass(frozen=True)
class FreeWord:
    """A freely reduced word in the free group on d generators."""

    dim: int
    letters: Tuple[Letter, ...]

    @classmethod
    def identity(cls, dim: int) -> "FreeWord":
        return cls(dim, ())

    @classmethod
    def gen(cls, dim: int, axis: int, sign: int = 1) -> "FreeWord":
        if not 0 <= axis < dim:
            raise ValueError(f"generator {axis} out of range")
        return cls(dim, ((axis, sign),))

    @classmethod
    def from_letters(cls, dim: int, letters: Sequence[Letter]) -> "FreeWord":
        reduced: List[Letter] = []
        for axis, sign in letters:
            if sign not in (1, -1) or not 0 <= axis < dim:
                raise ValueError(f"bad letter ({axis}, {sign})")
            if reduced and reduced[-1] == (axis, -sign):
                reduced.pop()
            else:
                reduced.append((axis, sign))
        return cls(dim, tuple(reduced))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return FreeWord.from_letters(self.dim, self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.dim, tuple((a, -s) for a, s in reversed(self.letters)))

    def commutator(self, other: "FreeWord") -> "FreeWord":
        return self.inverse() * other.inverse() * self * other

    def conjugated(self, by: "FreeWord") -> "FreeWord":
        return by.inverse() * self * by

    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def abelianization(self) -> Tuple[int, ...]:
        out = [0] * self.dim
        for axis, sign in self.letters:
            out[axis] += sign
        return tuple(out)

    def in_commutator_subgroup(self) -> bool:
        return not any(self.abelianization())

    def text(self) -> str:
        return "".join(
            AXIS_NAMES[a] + ("'" if s < 0 else "") for a, s in self.letters
        ) or "1"

    def __repr__(self) -> str:
        return f"FreeWord({self.dim}, {self.text()!r})"


def commutator(a: FreeWord, b: FreeWord) -> FreeWord:
    return a.commutator(b)


def parse_word(text: str, dim: int) -> FreeWord:
    """Parse word syntax: letters x, y, z with ' for inverse and nested [a,b]."""
    names = AXIS_NAMES[:dim]
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse_sequence(stop: str = "") -> FreeWord:
        nonlocal pos
        word = FreeWord.identity(dim)
        while True:
            skip_ws()
            if pos >= len(text) or (stop and text[pos] in stop):
                return word
            ch = text[pos]
            if ch == "[":
                pos += 1
                left = parse_sequence(",")
                if pos >= len(text) or text[pos] != ",":
                    raise ValueError(f"expected ',' in commutator at position {pos}")
                pos += 1
                right = parse_sequence("]")
                if pos >= len(text) or text[pos] != "]":
                    raise ValueError(f"unclosed commutator at position {pos}")
                pos += 1
                piece = left.commutator(right)
            elif ch in names:
                axis = names.index(ch)
                pos += 1
                piece = FreeWord.gen(dim, axis)
            else:
                raise ValueError(f"unexpected character {ch!r} at position {pos}")
            skip_ws()
            if pos < len(text) and text[pos] == "'":
                pos += 1
                piece = piece.inverse()
            word = word * piece
        return word

    word = parse_sequence()
    if pos != len(text):
        raise ValueError(f"trailing input at position {pos}")
    return word


# -- Magnus expansion -----------------------------------------------------------


@dataclass
class MagnusSeries:
    """Truncated noncommutative power series with integer coefficients."""

    dim: int
    truncation: int
    coeffs: Dict[Tuple[int, ...], int]

    def coefficient(self, mono: Tuple[int, ...]) -> int:
        return self.coeffs.get(mono, 0)

    def __mul__(self, other: "MagnusSeries") -> "MagnusSeries":
        if (self.dim, self.truncation) != (other.dim, other.truncation):
            raise ValueError("series mismatch")
        out: Dict[Tuple[int, ...], int] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                if len(m1) + len(m2) > self.truncation:
                    continue
                key = m1 + m2
                new = out.get(key, 0) + c1 * c2
                if new:
                    out[key] = new
                else:
                    del out[key]
        return MagnusSeries(self.dim, self.truncation, out)

    def graded_part(self, degree: int) -> Dict[Tuple[int, ...], int]:
        return {m: c for m, c in self.coeffs.items() if len(m) == degree}


def _letter_series(dim: int, axis: int, sign: int, truncation: int) -> MagnusSeries:
    coeffs: Dict[Tuple[int, ...], int] = {(): 1}
    if sign == 1:
        if truncation >= 1:
            coeffs[(axis,)] = 1
    else:
        for m in range(1, truncation + 1):
            coeffs[(axis,) * m] = (-1) ** m
    return MagnusSeries(dim, truncation, coeffs)


def magnus(word: FreeWord, truncation: int) -> MagnusSeries:
    """The truncated Magnus expansion of a word (x_i -> 1 + X_i, multiplicative)."""
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    series = MagnusSeries(word.dim, truncation, {(): 1})
    for axis, sign in word.letters:
        series = series * _letter_series(word.dim, axis, sign, truncation)
    return series


def lcs_depth(word: FreeWord, truncation: int) -> int:
    """Lower-central-series depth: the least degree of a surviving Magnus term.

    Returns truncation + 1 as the sentinel "at least truncation + 1" (in
    particular for the identity word).
    """
    series = magnus(word, truncation)
    depths = [len(m) for m, c in series.coeffs.items() if m and c]
    return min(depths) if depths else truncation + 1


def basic_commutator(axes: Sequence[int], dim: int = 3) -> FreeWord:
    """The left-normed iterated commutator [..[[x1,x2],x3],..,xk]."""
    if len(axes) < 2:
        raise ValueError("need at least two letters")
    if axes[0] == axes[1]:
        raise ValueError("degenerate commutator: first two letters agree")
    word = FreeWord.gen(dim, axes[0]).commutator(FreeWord.gen(dim, axes[1]))
    for axis in axes[2:]:
        word = word.commutator(FreeWord.gen(dim, axis))
    return word


# -- Witt formula and Hall bases ---------------------------------------------------


def _mobius(n: int) -> int:
    if n == 1:
        return 1
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def witt_rank(d: int, k: int) -> int:
    """Rank of the k-th lower-central quotient of the free group of rank d."""
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    total = 0
    for e in range(1, k + 1):
        if k % e == 0:
            total += _mobius(e) * d ** (k // e)
    return total // k


HallTree = object  # int (generator) or (HallTree, HallTree)


def hall_basis(d: int, max_weight: int) -> List[List[HallTree]]:
    """Hall trees by weight (1-indexed: result[w-1] lists the weight-w elements).

    Trees are generators or pairs (u, v) with u > v in the length-then-creation
    order, and the right part of a composite u not exceeding v.
    """
    order: Dict[object, Tuple[int, int]] = {}
    by_weight: List[List[HallTree]] = [[g for g in range(d)]]
    for g in range(d):
        order[g] = (1, g)

    def less_eq(a, b) -> bool:
        return order[a] <= order[b]

    for weight in range(2, max_weight + 1):
        created: List[HallTree] = []
        for w2 in range(1, weight):
            w1 = weight - w2
            for b in by_weight[w2 - 1]:
                for a in by_weight[w1 - 1]:
                    if not (order[a] > order[b]):
                        continue
                    if isinstance(a, tuple) and not less_eq(a[1], b):
                        continue
                    created.append((a, b))
        # deterministic order within the weight: by the parts' orders
        created.sort(key=lambda t: (order[t[0]], order[t[1]]))
        for idx, t in enumerate(created):
            order[t] = (weight, idx)
        by_weight.append(created)
    return by_weight


def hall_tree_word(tree: HallTree, dim: int) -> FreeWord:
    if isinstance(tree, int):
        return FreeWord.gen(dim, tree)
    left, right = tree
    return hall_tree_word(left, dim).commutator(hall_tree_word(right, dim))


def hall_tree_text(tree: HallTree) -> str:
    if isinstance(tree, int):
        return AXIS_NAMES[tree]
    return f"[{hall_tree_text(tree[0])},{hall_tree_text(tree[1])}]"


def magnus_leading_rank(d: int, k: int) -> int:
    """Rank of the lattice spanned by the degree-k Magnus parts of weight-k Hall words."""
    trees = hall_basis(d, k)[k - 1]
    monomials = sorted(
        {m for t in trees for m in magnus(hall_tree_word(t, d), k).graded_part(k)}
    )
    index = {m: i for i, m in enumerate(monomials)}
    rows = []
    for t in trees:
        row = [0] * len(index)
        for m, c in magnus(hall_tree_word(t, d), k).graded_part(k).items():
            row[index[m]] = c
        rows.append(row)
    return bareiss_rank(rows) if rows else 0


# -- phi maps ------------------------------------------------------------------


def grid_basis(k: int) -> QuotientBasis:
    """Basis of the degree-k quotient for the planar grid's single plaquette class."""
    elements = []
    for alpha in sorted((a, k - a) for a in range(k + 1)):
        label = multiplier_label(alpha)
        elements.append(BasisElement("P", alpha, f"{label} P" if label else "P"))
    return QuotientBasis("J_grid", 2, k, tuple(elements))


@dataclass
class PhiImage:
    word: FreeWord
    k: int
    dim: int
    basis: QuotientBasis
    vector: List[int]

    def pretty(self) -> str:
        from .modules import format_combination

        return format_combination(self.vector, self.basis)


def phi_image(word: FreeWord, k: int, dim: int = 3) -> PhiImage:
    """Coordinates of the traced cycle's homology class in the degree-(k-2) quotient.

    Requires the word to lie in the commutator subgroup with lower-central
    depth at least k.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if word.dim != dim:
        raise ValueError("word dimension mismatch")
    if not word.in_commutator_subgroup():
        raise ValueError("word is not in the commutator subgroup")
    depth = lcs_depth(word, k)
    if depth < k:
        raise ValueError(f"word has lower-central depth {depth} < {k}")
    cycle = trace_word(word.letters, dim)
    coords = cycle_to_plaquette_coords(cycle, dim)
    degree = k - 2
    if dim == 3:
        basis = basis_J(degree, 3)
        vector = normal_form_J(PlaquetteChain(3, coords), degree)
    elif dim == 2:
        basis = grid_basis(degree)
        vector = [0] * len(basis)
        poly = coords.get("P", LaurentPoly.zero(2))
        if poly:
            cls = reduce_mod_filtration(poly, degree)
            slot = {e.alpha: i for i, e in enumerate(basis.elements)}
            for alpha, c in cls.coeffs.items():
                vector[slot[alpha]] = c
    else:
        raise ValueError("dim must be 2 or 3")
    return PhiImage(word, k, dim, basis, vector)


_BASE_COMMUTATORS = {
    # plaquette class of each base commutator, fixed by the traced orientation
    3: {"P_x": (1, 2), "P_y": (2, 0), "P_z": (0, 1)},
    2: {"P": (0, 1)},
}


@dataclass
class SurjectivityWitness:
    target_label: str
    word: FreeWord
    ok: bool


@dataclass
class SurjectivityReport:
    k: int
    dim: int
    witnesses: List[SurjectivityWitness]

    @property
    def ok(self) -> bool:
        return all(w.ok for w in self.witnesses)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "dim": self.dim,
            "ok": self.ok,
            "witnesses": [
                {"target": w.target_label, "word": w.word.text(), "ok": w.ok}
                for w in self.witnesses
            ],
        }


def phi_surjectivity_check(k: int, dim: int = 3) -> SurjectivityReport:
    """Exhibit, for every basis element of the degree-(k-2) quotient, a word
    of depth k mapping onto it, and verify the equality."""
    if k < 2:
        raise ValueError("k must be >= 2")
    degree = k - 2
    basis = basis_J(degree, dim) if dim == 3 else grid_basis(degree)
    witnesses = []
    for i, element in enumerate(basis.elements):
        first, second = _BASE_COMMUTATORS[dim][element.generator]
        word = FreeWord.gen(dim, first).commutator(FreeWord.gen(dim, second))
        for axis, count in enumerate(element.alpha):
            for _ in range(count):
                word = word.commutator(FreeWord.gen(dim, axis))
        image = phi_image(word, k, dim)
        expected = [0] * len(basis)
        expected[i] = 1
        witnesses.append(SurjectivityWitness(element.label, word, image.vector == expected))
    return SurjectivityReport(k, dim, witnesses)
