import pytest

from fillink.groupring import FiltrationError, LaurentPoly
from fillink.lattice import Line, LinkSpec
from fillink.modules import (
    EdgeModuleChain,
    MeridianChain,
    PlaquetteChain,
    basis_H,
    basis_J,
    basis_chain,
    format_combination,
    j_boundary,
    meridian_reduce,
    normal_form_J,
    relation_chain,
    u_multiplier,
)


def P(dim, text):
    return LaurentPoly.from_text(dim, text)


def link_2d(k):
    comps = [Line("l_y", (0, -1), 1), Line("l_x", (1, 0), 2)]
    for j in range(1, k + 1):
        comps.append(Line(f"l_xy^{j}" if j > 1 else "l_xy", (1, -j), j + 2))
    return LinkSpec(2, tuple(comps))


class TestJBoundary:
    def test_generator_images(self):
        px = j_boundary(PlaquetteChain.generator(2, "P_x"))
        assert px.coords == {"Z": P(2, "1 - y")}
        py = j_boundary(PlaquetteChain.generator(2, "P_y"))
        assert py.coords == {"Z": P(2, "1 - x")}

    def test_relation_maps_to_zero(self):
        for dim in (2, 3):
            assert j_boundary(relation_chain(dim)).is_zero()

    def test_3d_images(self):
        px = j_boundary(PlaquetteChain.generator(3, "P_x"))
        assert px.coords == {"E_y": P(3, "1 - z"), "E_z": P(3, "-1 + y")}

    def test_boundary_raises_filtration(self):
        # j takes I^k J into I^(k+1) C_1: the content of the vanishing lemma
        for dim in (2, 3):
            for k in range(7):
                for element in basis_J(k, dim).elements:
                    chain = basis_chain(element, dim)
                    image = j_boundary(chain)
                    assert image.min_filtration(k + 1) >= k + 1


class TestRelation:
    def test_relation_normalizes_to_zero_every_degree(self):
        for dim in (2, 3):
            rel = relation_chain(dim)
            assert rel.is_zero_in_module()
            for k in range(7):
                mult = u_multiplier(dim, (k,) + (0,) * (dim - 1))
                scaled = rel.scaled(mult)
                assert scaled.is_zero_in_module()
                assert normal_form_J(scaled, k + 1) == [0] * len(basis_J(k + 1, dim))

    def test_normalization_idempotent(self):
        chain = PlaquetteChain(2, {"P_y": P(2, "x*y - y^2 + 3")})
        norm = chain.normalized()
        assert norm.normalized().coords == norm.coords
        assert not norm.coord("P_y").depends_on(1)


class TestBases:
    def test_basis_J_2d_paper_order(self):
        basis = basis_J(1, 2)
        assert basis.labels == ["(1-x) P_y", "(1-y) P_x", "(1-x) P_x"]
        basis2 = basis_J(2, 2)
        assert basis2.labels == [
            "(1-x)^2 P_y",
            "(1-y)^2 P_x",
            "(1-x)(1-y) P_x",
            "(1-x)^2 P_x",
        ]

    def test_basis_J_sizes(self):
        for k in range(7):
            assert len(basis_J(k, 2)) == k + 2
            assert len(basis_J(k, 3)) == (k + 1) * (k + 3)
        # enumeration oracle for the d=3 count at k=2
        count = 0
        for a in range(3):
            for b in range(3 - a):
                c = 2 - a - b
                count += 2  # P_x and P_y families
                if c == 0:
                    count += 1  # z-free P_z family
        assert count == 15 == len(basis_J(2, 3))

    def test_basis_J_k0(self):
        assert basis_J(0, 2).labels == ["P_y", "P_x"]
        assert basis_J(0, 3).labels == ["P_x", "P_y", "P_z"]

    def test_basis_H_sizes_2d(self):
        assert len(basis_H(0, link_2d(0))) == 2
        assert len(basis_H(1, link_2d(1))) == 3
        assert len(basis_H(2, link_2d(2))) == 4

    def test_basis_H_labels(self):
        basis = basis_H(1, link_2d(1))
        assert basis.labels == ["(1-x) l_y", "(1-y) l_x", "(1-y) l_xy"]
        basis2 = basis_H(2, link_2d(2))
        assert basis2.labels == [
            "(1-x)^2 l_y",
            "(1-y)^2 l_x",
            "(1-y)^2 l_xy",
            "(1-y)^2 l_xy^2",
        ]

    def test_basis_H_3d_sizes(self):
        link = LinkSpec(
            3,
            (
                Line("l_x", (1, 0, 0), 1),
                Line("l_y", (0, 1, 0), 2),
                Line("l_z", (0, 0, 1), 3),
                Line("l_xz", (1, 0, -1), 4),
                Line("l_yz", (0, 1, -1), 5),
            ),
        )
        for k in range(4):
            assert len(basis_H(k, link)) == 5 * (k + 1)


class TestMeridianReduction:
    def test_slope_substitution(self):
        line = Line("l_xy^2", (1, -2), 4)
        # x acts as y^2 on this meridian
        assert meridian_reduce(P(2, "x"), line) == P(2, "y^2")
        assert meridian_reduce(P(2, "x*y^-1"), line) == P(2, "y")

    def test_axis_kill(self):
        line = Line("l_x", (1, 0), 2)
        assert meridian_reduce(P(2, "1 - x"), line).is_zero()
        assert meridian_reduce(P(2, "y - x*y"), line).is_zero()

    def test_3d(self):
        line = Line("l_xz^3", (1, 0, -3), 8)
        assert meridian_reduce(P(3, "x"), line) == P(3, "z^3")
        assert meridian_reduce(P(3, "y"), line) == P(3, "y")

    def test_chain_reduction_and_filtration(self):
        link = link_2d(1)
        chain = MeridianChain(link, {"l_xy": P(2, "1 - x")})
        # x = y on the slope-one meridian: the stored form is 1 - y
        assert chain.coords == {"l_xy": P(2, "1 - y")}
        assert chain.min_filtration(3) == 1


class TestNormalForm:
    def test_basis_elements_are_unit_vectors(self):
        for dim in (2, 3):
            for k in range(4):
                basis = basis_J(k, dim)
                for i, element in enumerate(basis.elements):
                    vec = normal_form_J(basis_chain(element, dim), k)
                    expected = [0] * len(basis)
                    expected[i] = 1
                    assert vec == expected

    def test_x_minus_y_example(self):
        # (x - y) P_x = (1-y) P_x - (1-x) P_x
        chain = PlaquetteChain(2, {"P_x": P(2, "x - y")})
        basis = basis_J(1, 2)
        vec = normal_form_J(chain, 1)
        assert vec == [0, 1, -1]
        assert format_combination(vec, basis) == "(1-y) P_x - (1-x) P_x"

    def test_py_elimination(self):
        # (1-x)(1-y) P_y rewrites to (1-x)^2 P_x by the relation
        chain = PlaquetteChain(2, {"P_y": P(2, "1 - x") * P(2, "1 - y")})
        vec = normal_form_J(chain, 2)
        basis = basis_J(2, 2)
        assert format_combination(vec, basis) == "(1-x)^2 P_x"

    def test_not_in_filtration_raises(self):
        chain = PlaquetteChain(2, {"P_x": P(2, "1 - x")})
        with pytest.raises(FiltrationError):
            normal_form_J(chain, 2)

    def test_round_trip_through_cycles(self):
        # basis element -> geometric cycle -> plaquette coordinates -> same vector
        from fillink.lattice import cycle_to_plaquette_coords, plaquette_chain_cycle

        for k in range(5):
            basis = basis_J(k, 3)
            for i, element in enumerate(basis.elements):
                chain = basis_chain(element, 3)
                cycle = plaquette_chain_cycle(chain.coords, 3)
                coords = cycle_to_plaquette_coords(cycle, 3)
                rebuilt = PlaquetteChain(3, coords)
                vec = normal_form_J(rebuilt, k)
                expected = [0] * len(basis)
                expected[i] = 1
                assert vec == expected


class TestEdgeChain:
    def test_validation(self):
        with pytest.raises(ValueError):
            EdgeModuleChain(2, {"E_x": P(2, "1")})
        chain = EdgeModuleChain(3, {"E_x": P(3, "0")})
        assert chain.is_zero()


class TestChainFromCycle:
    def test_triple_commutator_chain(self):
        from fillink.lattice import trace_word
        from fillink.modules import chain_from_cycle

        letters = [(0, -1), (1, -1), (0, 1), (1, 1)]
        inverse = [(1, -1), (0, -1), (1, 1), (0, 1)]
        cycle = trace_word(inverse + [(2, -1)] + letters + [(2, 1)], 3)
        chain = chain_from_cycle(cycle, 3)
        # normal form has a z-free P_z coordinate
        assert not chain.coord("P_z").depends_on(2)
        assert normal_form_J(chain, 1) == normal_form_J(
            PlaquetteChain(3, {"P_z": P(3, "1 - z")}), 1
        )

    def test_rejects_2d(self):
        from fillink.modules import chain_from_cycle

        with pytest.raises(ValueError):
            chain_from_cycle({}, 2)


class TestNormalFormH:
    def test_unit_vectors(self):
        from fillink.modules import MeridianChain, basis_H, normal_form_H, u_multiplier

        link = link_2d(2)
        basis = basis_H(2, link)
        for i, element in enumerate(basis.elements):
            chain = MeridianChain(
                link, {element.generator: u_multiplier(2, element.alpha)}
            )
            vec = normal_form_H(chain, 2)
            expected = [0] * len(basis)
            expected[i] = 1
            assert vec == expected

    def test_substituted_coordinates(self):
        from fillink.modules import MeridianChain, normal_form_H

        link = link_2d(2)
        # (1-x)^2 on the slope-2 meridian is 4 (1-y)^2 plus higher filtration
        chain = MeridianChain(link, {"l_xy^2": P(2, "1 - x") ** 2})
        vec = normal_form_H(chain, 2)
        basis = basis_H(2, link)
        assert vec[basis.index("l_xy^2", (0, 2))] == 4
        assert sum(map(abs, vec)) == 4

    def test_not_in_filtration(self):
        from fillink.groupring import FiltrationError
        from fillink.modules import MeridianChain, normal_form_H

        link = link_2d(1)
        chain = MeridianChain(link, {"l_x": P(2, "1 - y")})
        with pytest.raises(FiltrationError):
            normal_form_H(chain, 2)


class TestNormalFormWellDefined:
    def test_relation_multiples_do_not_change_coordinates(self):
        import random

        from fillink.modules import relation_chain

        rng = random.Random(37)
        for dim in (2, 3):
            for k in (1, 2, 3):
                basis = basis_J(k, dim)
                rel = relation_chain(dim)
                for _ in range(10):
                    # random element of I^k J plus a random relation multiple
                    vec = [rng.randint(-3, 3) for _ in basis.elements]
                    chain = PlaquetteChain(dim, {})
                    for c, element in zip(vec, basis.elements):
                        if c:
                            piece = u_multiplier(dim, element.alpha) * c
                            chain = chain + PlaquetteChain(dim, {element.generator: piece})
                    noise_terms = {
                        tuple(rng.randint(-1, 1) for _ in range(dim)): rng.randint(-2, 2)
                        for _ in range(2)
                    }
                    noise = LaurentPoly(dim, noise_terms)
                    if k >= 2:
                        noise = noise * u_multiplier(dim, (k - 1,) + (0,) * (dim - 1))
                    perturbed = chain + rel.scaled(noise)
                    assert normal_form_J(chain, k) == vec
                    assert normal_form_J(perturbed, k) == vec
