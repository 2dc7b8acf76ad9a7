"""Exact arithmetic in the group ring Z[Z^d] and its augmentation filtration.

Elements of Z[Z^d] are Laurent polynomials in commuting variables x, y (and z
when d = 3), stored as a sparse map from integer exponent vectors to integer
coefficients.  The augmentation ideal I is the kernel of the coefficient-sum
map; the quotients I^k/I^{k+1} are free abelian with basis the degree-k
monomials in the difference variables u_i = 1 - x_i.  Membership of p in I^k
is decided by expanding p as a power series in the u_i (negative exponents
expand through the geometric series, truncated at the requested degree) and
checking that every term of total degree < k vanishes.

All coefficients are Python ints, so there is no overflow anywhere.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, Mapping, Tuple

Exponents = Tuple[int, ...]

AXIS_NAMES = ("x", "y", "z")


class FiltrationError(ValueError):
    """Raised when an element is not in the required power of the augmentation ideal."""


def axis_name(axis: int) -> str:
    return AXIS_NAMES[axis]


class LaurentPoly:
    """A Laurent polynomial over Z in d commuting variables.

    Terms map exponent vectors (tuples of length ``dim``) to nonzero integers.
    Instances are treated as immutable; all operations return new objects.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponents, int] | None = None):
        if dim < 1 or dim > len(AXIS_NAMES):
            raise ValueError(f"unsupported dimension {dim}")
        clean: Dict[Exponents, int] = {}
        if terms:
            for exps, coeff in terms.items():
                if len(exps) != dim:
                    raise ValueError(f"exponent vector {exps} has wrong length for dim {dim}")
                if coeff:
                    exps = tuple(int(e) for e in exps)
                    clean[exps] = clean.get(exps, 0) + int(coeff)
                    if clean[exps] == 0:
                        del clean[exps]
        self.dim = dim
        self.terms = clean

    @classmethod
    def _raw(cls, dim: int, terms: Dict[Exponents, int]) -> "LaurentPoly":
        """Internal fast path: terms must already be clean (no zero coefficients)."""
        obj = object.__new__(cls)
        obj.dim = dim
        obj.terms = terms
        return obj

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "LaurentPoly":
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: 1})

    @classmethod
    def constant(cls, dim: int, value: int) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def monomial(cls, dim: int, exps: Iterable[int], coeff: int = 1) -> "LaurentPoly":
        return cls(dim, {tuple(exps): coeff})

    @classmethod
    def gen(cls, dim: int, axis: int, power: int = 1) -> "LaurentPoly":
        exps = [0] * dim
        exps[axis] = power
        return cls(dim, {tuple(exps): 1})

    @classmethod
    def one_minus(cls, dim: int, axis: int) -> "LaurentPoly":
        """The difference element 1 - x_axis, a generator of I."""
        exps = [0] * dim
        exps[axis] = 1
        return cls(dim, {(0,) * dim: 1, tuple(exps): -1})

    # -- ring operations ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LaurentPoly)
            and self.dim == other.dim
            and self.terms == other.terms
        )

    __hash__ = None  # mutable dict inside; value semantics only

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_dim(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            new = out.get(exps, 0) + coeff
            if new:
                out[exps] = new
            else:
                out.pop(exps, None)
        return LaurentPoly._raw(self.dim, out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly(self.dim)
            return LaurentPoly._raw(self.dim, {e: c * other for e, c in self.terms.items()})
        self._check_dim(other)
        out: Dict[Exponents, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                new = out.get(exps, 0) + c1 * c2
                if new:
                    out[exps] = new
                else:
                    del out[exps]
        return LaurentPoly._raw(self.dim, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            raise ValueError("negative powers of general elements are not defined")
        result = LaurentPoly.one(self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def translated(self, shift: Iterable[int]) -> "LaurentPoly":
        """Multiply by the monomial x^shift (the deck translation action)."""
        shift = tuple(shift)
        return LaurentPoly._raw(
            self.dim,
            {tuple(a + b for a, b in zip(e, shift)): c for e, c in self.terms.items()},
        )

    def _check_dim(self, other: "LaurentPoly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    # -- augmentation and filtration ---------------------------------------

    def augmentation(self) -> int:
        """Sum of all coefficients (the ring map Z[Z^d] -> Z)."""
        return sum(self.terms.values())

    def substitute_one(self, axis: int) -> "LaurentPoly":
        """Set x_axis = 1, keeping the ambient dimension."""
        out: Dict[Exponents, int] = {}
        for exps, coeff in self.terms.items():
            key = exps[:axis] + (0,) + exps[axis + 1 :]
            new = out.get(key, 0) + coeff
            if new:
                out[key] = new
            else:
                del out[key]
        return LaurentPoly._raw(self.dim, out)

    def depends_on(self, axis: int) -> bool:
        return any(e[axis] for e in self.terms)

    def exact_div_one_minus(self, axis: int) -> "LaurentPoly":
        """Exact division by (1 - x_axis); requires substitute_one(axis) == 0."""
        # (x^n - 1)/(1 - x) = -(1 + x + ... + x^{n-1}) for n > 0 and
        # x^-m (1 + ... + x^{m-1}) for n = -m < 0.
        out: Dict[Exponents, int] = {}

        def bump(exps: Exponents, k: int, coeff: int) -> None:
            key = exps[:axis] + (k,) + exps[axis + 1 :]
            new = out.get(key, 0) + coeff
            if new:
                out[key] = new
            else:
                del out[key]

        total_check: Dict[Exponents, int] = {}
        for exps, coeff in self.terms.items():
            n = exps[axis]
            base = exps[:axis] + (0,) + exps[axis + 1 :]
            total_check[base] = total_check.get(base, 0) + coeff
            if n > 0:
                for k in range(n):
                    bump(exps, k, -coeff)
            elif n < 0:
                for k in range(n, 0):
                    bump(exps, k, coeff)
        if any(total_check.values()):
            raise ValueError(f"not divisible by (1 - {axis_name(axis)})")
        return LaurentPoly._raw(self.dim, out)

    def map_exponents(self, mapping) -> "LaurentPoly":
        """Push every exponent vector through ``mapping`` (a group homomorphism Z^d -> Z^d)."""
        out: Dict[Exponents, int] = {}
        for exps, coeff in self.terms.items():
            key = tuple(mapping(exps))
            new = out.get(key, 0) + coeff
            if new:
                out[key] = new
            else:
                del out[key]
        return LaurentPoly._raw(self.dim, out)

    def u_expansion(self, maxdeg: int) -> Dict[Exponents, int]:
        """Expansion in the difference variables u_i = 1 - x_i, up to total degree maxdeg.

        Returns a map from degree multi-indices (alpha_1, ..., alpha_d) with
        sum <= maxdeg to integer coefficients.  Negative variable exponents go
        through the geometric series (1 - u)^-1 = sum u^m, which is what makes
        the truncated expansion exact in every degree <= maxdeg.
        """
        if maxdeg < 0:
            raise ValueError("maxdeg must be >= 0")
        total: Dict[Exponents, int] = {}
        for exps, coeff in self.terms.items():
            partial: Dict[Exponents, int] = {(): coeff}
            for e in exps:
                series = _one_minus_u_power(e, maxdeg)
                nxt: Dict[Exponents, int] = {}
                for prefix, c in partial.items():
                    used = sum(prefix)
                    for m, s in enumerate(series):
                        if used + m > maxdeg:
                            break
                        if s == 0:
                            continue
                        key = prefix + (m,)
                        nxt[key] = nxt.get(key, 0) + c * s
                partial = nxt
            for key, c in partial.items():
                new = total.get(key, 0) + c
                if new:
                    total[key] = new
                else:
                    del total[key]
        return total

    def filtration_degree(self, maxdeg: int) -> int:
        """Largest k <= maxdeg with self in I^k, or maxdeg + 1 when no obstruction is seen.

        The sentinel value maxdeg + 1 means "at least maxdeg + 1"; the zero
        polynomial always returns the sentinel.
        """
        expansion = self.u_expansion(maxdeg)
        if not expansion:
            return maxdeg + 1
        return min(sum(alpha) for alpha in expansion)

    # -- text form ----------------------------------------------------------

    def text(self) -> str:
        """Canonical text form, e.g. ``1 - x*y^-1 + 2*z`` (terms in lex order)."""
        if not self.terms:
            return "0"
        names = AXIS_NAMES[: self.dim]
        pieces = []
        for exps in sorted(self.terms):
            coeff = self.terms[exps]
            factors = [
                f"{names[i]}^{e}" if e != 1 else names[i]
                for i, e in enumerate(exps)
                if e != 0
            ]
            mono = "*".join(factors)
            mag = abs(coeff)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            pieces.append(("- " if coeff < 0 else "+ ") + body)
        out = " ".join(pieces)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    @classmethod
    def from_text(cls, dim: int, text: str) -> "LaurentPoly":
        return _parse_poly(dim, text)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.dim}, {self.text()!r})"


@lru_cache(maxsize=4096)
def _one_minus_u_power(e: int, maxdeg: int) -> list:
    """Coefficients of u^m, m = 0..maxdeg, in (1 - u)^e (geometric series for e < 0)."""
    if e >= 0:
        top = min(e, maxdeg)
        return [(-1) ** m * comb(e, m) for m in range(top + 1)]
    n = -e
    return [comb(n + m - 1, m) for m in range(maxdeg + 1)]


class AugClass:
    """An element of I^k/I^{k+1}: a homogeneous degree-k integer polynomial in the u_i.

    ``coeffs`` maps degree multi-indices (summing to exactly ``degree``) to
    nonzero integers.
    """

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Mapping[Exponents, int] | None = None):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        clean: Dict[Exponents, int] = {}
        if coeffs:
            for alpha, c in coeffs.items():
                if len(alpha) != dim or any(a < 0 for a in alpha):
                    raise ValueError(f"bad multi-index {alpha} for dim {dim}")
                if sum(alpha) != degree:
                    raise ValueError(f"multi-index {alpha} does not have degree {degree}")
                if c:
                    alpha = tuple(int(a) for a in alpha)
                    clean[alpha] = clean.get(alpha, 0) + int(c)
                    if clean[alpha] == 0:
                        del clean[alpha]
        self.dim = dim
        self.degree = degree
        self.coeffs = clean

    @classmethod
    def zero(cls, dim: int, degree: int) -> "AugClass":
        return cls(dim, degree)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AugClass)
            and (self.dim, self.degree) == (other.dim, other.degree)
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def __add__(self, other: "AugClass") -> "AugClass":
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError("cannot add classes of different dimension or degree")
        out = dict(self.coeffs)
        for alpha, c in other.coeffs.items():
            new = out.get(alpha, 0) + c
            if new:
                out[alpha] = new
            else:
                del out[alpha]
        return AugClass(self.dim, self.degree, out)

    def __neg__(self) -> "AugClass":
        return AugClass(self.dim, self.degree, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "AugClass") -> "AugClass":
        return self + (-other)

    def scaled(self, n: int) -> "AugClass":
        if n == 0:
            return AugClass(self.dim, self.degree)
        return AugClass(self.dim, self.degree, {a: n * c for a, c in self.coeffs.items()})

    def __mul__(self, other: "AugClass") -> "AugClass":
        """Graded product: the class of the product in degree deg+deg'."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out: Dict[Exponents, int] = {}
        for a1, c1 in self.coeffs.items():
            for a2, c2 in other.coeffs.items():
                key = tuple(x + y for x, y in zip(a1, a2))
                new = out.get(key, 0) + c1 * c2
                if new:
                    out[key] = new
                else:
                    del out[key]
        return AugClass(self.dim, self.degree + other.degree, out)

    def to_poly(self) -> LaurentPoly:
        """Substitute u_i = 1 - x_i, giving a canonical polynomial representative."""
        total = LaurentPoly.zero(self.dim)
        for alpha, c in self.coeffs.items():
            term = LaurentPoly.constant(self.dim, c)
            for axis, a in enumerate(alpha):
                if a:
                    term = term * (LaurentPoly.one_minus(self.dim, axis) ** a)
            total = total + term
        return total

    def text(self) -> str:
        """Canonical text form, e.g. ``2*u_y^2 + u_x*u_z``."""
        if not self.coeffs:
            return "0"
        names = [f"u_{AXIS_NAMES[i]}" for i in range(self.dim)]
        pieces = []
        for alpha in sorted(self.coeffs):
            c = self.coeffs[alpha]
            factors = [
                f"{names[i]}^{a}" if a != 1 else names[i]
                for i, a in enumerate(alpha)
                if a != 0
            ]
            mono = "*".join(factors)
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            pieces.append(("- " if c < 0 else "+ ") + body)
        out = " ".join(pieces)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    def __repr__(self) -> str:
        return f"AugClass({self.dim}, deg={self.degree}, {self.text()!r})"


def reduce_mod_filtration(p: LaurentPoly, k: int) -> AugClass:
    """The class of p in I^k/I^{k+1}, in the u-monomial basis.

    Raises FiltrationError when p is not in I^k (a nonzero u-term of total
    degree < k survives the expansion).
    """
    expansion = p.u_expansion(k)
    low = {a: c for a, c in expansion.items() if sum(a) < k}
    if low:
        worst = min(low, key=lambda a: (sum(a), a))
        raise FiltrationError(
            f"element is not in I^{k}: u-term {worst} has coefficient {low[worst]}"
        )
    top = {a: c for a, c in expansion.items() if sum(a) == k}
    return AugClass(p.dim, k, top)


# -- parser for the canonical text forms ------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>u_[xyz]|[xyz])|(?P<op>[-+*^]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ValueError(f"cannot parse {text!r} at position {pos}")
            break
        if m.group("num") is not None:
            out.append(("num", int(m.group("num"))))
        elif m.group("name") is not None:
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
        pos = m.end()
    return out


def _parse_terms(dim: int, text: str, names: Tuple[str, ...]):
    """Parse ``c*v^a*w^b +- ...`` into a list of (coeff, exponent-tuple)."""
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty expression")
    terms = []
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        while i < n and tokens[i][0] == "op" and tokens[i][1] in "+-":
            if tokens[i][1] == "-":
                sign = -sign
            i += 1
        coeff = None
        exps = [0] * dim
        saw_factor = False
        while i < n:
            kind, val = tokens[i]
            if kind == "num":
                if coeff is not None or saw_factor:
                    raise ValueError(f"unexpected number in {text!r}")
                coeff = val
                i += 1
            elif kind == "name":
                try:
                    axis = names.index(val)
                except ValueError:
                    raise ValueError(f"unknown variable {val!r} in {text!r}") from None
                power = 1
                i += 1
                if i < n and tokens[i] == ("op", "^"):
                    i += 1
                    neg = False
                    if i < n and tokens[i] == ("op", "-"):
                        neg = True
                        i += 1
                    if i >= n or tokens[i][0] != "num":
                        raise ValueError(f"missing exponent in {text!r}")
                    power = -tokens[i][1] if neg else tokens[i][1]
                    i += 1
                exps[axis] += power
                saw_factor = True
            else:
                break
            if i < n and tokens[i] == ("op", "*"):
                i += 1
                continue
            break
        if coeff is None and not saw_factor:
            raise ValueError(f"dangling sign in {text!r}")
        terms.append((sign * (coeff if coeff is not None else 1), tuple(exps)))
    return terms


def _parse_poly(dim: int, text: str) -> LaurentPoly:
    text = text.strip()
    if text == "0":
        return LaurentPoly.zero(dim)
    out: Dict[Exponents, int] = {}
    for coeff, exps in _parse_terms(dim, text, AXIS_NAMES[:dim]):
        out[exps] = out.get(exps, 0) + coeff
    return LaurentPoly(dim, out)


def parse_aug_class(dim: int, degree: int, text: str) -> AugClass:
    text = text.strip()
    if text == "0":
        return AugClass.zero(dim, degree)
    names = tuple(f"u_{AXIS_NAMES[i]}" for i in range(dim))
    out: Dict[Exponents, int] = {}
    for coeff, exps in _parse_terms(dim, text, names):
        out[exps] = out.get(exps, 0) + coeff
    return AugClass(dim, degree, out)
