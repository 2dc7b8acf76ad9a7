"""Spine homotopies as equivariant maps from edge chains to meridians.

A finger move pushes an edge of the spine through link components; its net
effect on linking data is an equivariant map F: C1 -> H determined by the
meridian chains assigned to the edge generators.  The perturbed linking map
of the moved spine is Lk + F o j.  Because the cycle-inclusion map j sends
I^k J into I^{k+1} C1, the composite F o j vanishes on every filtration
quotient; the checker verifies that inclusion on every basis element of
I^k J / I^{k+1} J, for any F.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .certifier import linking_map
from .groupring import LaurentPoly
from .lattice import LinkSpec
from .modules import (
    EDGE_GENS,
    EdgeModuleChain,
    MeridianChain,
    PlaquetteChain,
    basis_J,
    basis_chain,
    j_boundary,
)


@dataclass
class FingerMoveMap:
    """An equivariant map C1 -> H: a meridian chain per edge generator."""

    link: LinkSpec
    assignments: Dict[str, MeridianChain] = field(default_factory=dict)

    def __post_init__(self):
        gens = EDGE_GENS[self.link.dim]
        for gen in self.assignments:
            if gen not in gens:
                raise ValueError(f"unknown edge generator {gen!r} for dim {self.link.dim}")

    def apply(self, chain: EdgeModuleChain) -> MeridianChain:
        """Evaluate on an edge chain by equivariant linearity."""
        out = MeridianChain.zero(self.link)
        for gen, poly in chain.coords.items():
            target = self.assignments.get(gen)
            if target is not None:
                out = out + target.scaled(poly)
        return out

    def to_dict(self) -> dict:
        return {
            "link": self.link.to_dict(),
            "assignments": {
                gen: {label: p.text() for label, p in chain.coords.items()}
                for gen, chain in self.assignments.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FingerMoveMap":
        link = LinkSpec.from_dict(data["link"])
        assignments = {}
        for gen, coords in data.get("assignments", {}).items():
            assignments[gen] = MeridianChain(
                link,
                {
                    label: LaurentPoly.from_text(link.dim, text)
                    for label, text in coords.items()
                },
            )
        return cls(link, assignments)


def perturbed_linking(chain: PlaquetteChain, fmap: FingerMoveMap, link: LinkSpec) -> MeridianChain:
    """The linking map of the homotoped spine: Lk(chain) + F(j(chain))."""
    base = linking_map(chain, link)
    return base + fmap.apply(j_boundary(chain))


def random_finger_map(
    seed: int,
    support_radius: int,
    value_terms: int,
    link: LinkSpec,
) -> FingerMoveMap:
    """Deterministic pseudo-random finger-move map.

    Each edge generator gets, per link component, a coefficient with up to
    ``value_terms`` monomials, exponents within ``support_radius`` and
    coefficients in [-3, 3].  The draw order is fixed, so equal seeds give
    equal maps.
    """
    if support_radius < 0 or value_terms < 0:
        raise ValueError("parameters must be nonnegative")
    rng = random.Random(seed)
    dim = link.dim
    assignments = {}
    for gen in EDGE_GENS[dim]:
        coords = {}
        for line in link.components:
            terms = {}
            for _ in range(value_terms):
                exps = tuple(rng.randint(-support_radius, support_radius) for _ in range(dim))
                coeff = rng.choice([-3, -2, -1, 1, 2, 3])
                terms[exps] = terms.get(exps, 0) + coeff
            poly = LaurentPoly(dim, terms)
            if poly:
                coords[line.label] = poly
        assignments[gen] = MeridianChain(link, coords)
    return FingerMoveMap(link, assignments)


@dataclass
class InvarianceViolation:
    element_label: str
    line_label: str
    filtration_seen: int
    required: int


@dataclass
class InvarianceReport:
    k: int
    link: LinkSpec
    checked: int
    violations: List[InvarianceViolation] = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "link": self.link.to_dict(),
            "checked": self.checked,
            "seed": self.seed,
            "ok": self.ok,
            "violations": [
                {
                    "element": v.element_label,
                    "line": v.line_label,
                    "filtration": v.filtration_seen,
                    "required": v.required,
                }
                for v in self.violations
            ],
        }


@lru_cache(maxsize=64)
def _basis_data(k: int, link: LinkSpec) -> Tuple:
    """Seed-independent per-element data: (label, j-boundary image, base linking)."""
    out = []
    for element in basis_J(k, link.dim).elements:
        chain = basis_chain(element, link.dim)
        out.append((element.label, j_boundary(chain), linking_map(chain, link)))
    return tuple(out)


def kernel_invariance_check(
    k: int, link: LinkSpec, fmap: FingerMoveMap, seed: Optional[int] = None
) -> InvarianceReport:
    """Verify that the finger-move perturbation is invisible at filtration level k.

    For every basis element c of I^k J / I^{k+1} J the difference
    perturbed_linking(c) - Lk(c) = F(j(c)) must lie in I^{k+1} H; any
    coordinate of lower filtration is reported as a violation.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    data = _basis_data(k, link)
    report = InvarianceReport(k, link, checked=len(data), seed=seed)
    for label, boundary, base_linking in data:
        perturbed = base_linking + fmap.apply(boundary)
        difference = perturbed - base_linking
        for line_label, poly in difference.coords.items():
            degree = poly.filtration_degree(k + 1)
            if degree < k + 1:
                report.violations.append(
                    InvarianceViolation(label, line_label, degree, k + 1)
                )
    return report


def seeded_invariance_sweep(
    k: int,
    link: LinkSpec,
    seeds: int,
    support_radius: int = 2,
    value_terms: int = 3,
) -> List[InvarianceReport]:
    """Run the invariance check over a range of deterministic seeds."""
    reports = []
    for seed in range(seeds):
        fmap = random_finger_map(seed, support_radius, value_terms, link)
        reports.append(kernel_invariance_check(k, link, fmap, seed=seed))
    return reports
