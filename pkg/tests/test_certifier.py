import itertools

import pytest

from fillink.certifier import (
    StructureMismatchError,
    UnsupportedDirectionError,
    build_matrix,
    certify_filling,
    is_injective,
    linking_map,
    pairing_poly,
    single_curve_link,
    standard_link,
    vandermonde_check,
)
from fillink.groupring import LaurentPoly, reduce_mod_filtration
from fillink.lattice import Line, geometric_linking, plaquette_chain_cycle
from fillink.linalg import mat_vec_left
from fillink.modules import MeridianChain, PlaquetteChain, basis_J, meridian_reduce, normal_form_J


def P(dim, text):
    return LaurentPoly.from_text(dim, text)


class TestStandardLink:
    def test_component_counts(self):
        assert len(standard_link(0, 2).components) == 2
        assert len(standard_link(2, 2).components) == 4
        for k in range(5):
            assert len(standard_link(k, 3).components) == 2 * k + 3

    def test_labels_and_order(self):
        link = standard_link(2, 2)
        assert [c.label for c in link.components] == ["l_y", "l_x", "l_xy", "l_xy^2"]
        link3 = standard_link(2, 3)
        assert [c.label for c in link3.components] == [
            "l_x",
            "l_y",
            "l_z",
            "l_xz",
            "l_yz",
            "l_xz^2",
            "l_yz^2",
        ]


class TestPairings:
    def test_closed_form_matches_oracle_on_generators(self):
        # module-level agreement, not just per-degree classes
        for dim in (2, 3):
            link = standard_link(3, dim)
            for line in link.components:
                for gen in ("P_x", "P_y") if dim == 2 else ("P_x", "P_y", "P_z"):
                    chain = PlaquetteChain.generator(dim, gen)
                    cycle = plaquette_chain_cycle(chain.coords, dim)
                    geo = meridian_reduce(geometric_linking(cycle, line, dim), line)
                    assert geo == pairing_poly(gen, line), (dim, gen, line.label)

    def test_unsupported_direction(self):
        with pytest.raises(UnsupportedDirectionError):
            pairing_poly("P_x", Line("weird", (2, -3), 5))

    def test_closed_form_entry_examples(self):
        # pairing of (1-x)^2 P_x with the slope-2 curve is 4 (1-y)^2
        link = standard_link(2, 2)
        chain = PlaquetteChain(2, {"P_x": P(2, "1 - x") ** 2})
        image = linking_map(chain, link)
        line = link.component("l_xy^2")
        cls = reduce_mod_filtration(image.coord("l_xy^2"), 2)
        assert cls.coeffs == {(0, 2): 4}
        # and (1-x)(1-y) P_x gives 2 (1-y)^2
        chain2 = PlaquetteChain(2, {"P_x": P(2, "1 - x") * P(2, "1 - y")})
        cls2 = reduce_mod_filtration(linking_map(chain2, link).coord("l_xy^2"), 2)
        assert cls2.coeffs == {(0, 2): 2}

    def test_closed_form_entry_3d_axis(self):
        # pairing of (1-y)^b (1-z)^c P_x with l_x is (1-y)^b (1-z)^c
        link = standard_link(1, 3)
        chain = PlaquetteChain(3, {"P_x": P(3, "1 - y") * (P(3, "1 - z") ** 2)})
        cls = reduce_mod_filtration(linking_map(chain, link).coord("l_x"), 3)
        assert cls.coeffs == {(0, 1, 2): 1}

    def test_py_slope_pairing_forced_by_relation(self):
        # (1-y) P_y = (1-x) P_x in J forces the P_y pairing with a slope-j
        # curve to be the j-term translate sum, never a single monomial
        link = standard_link(2, 2)
        line = link.component("l_xy^2")
        lhs = linking_map(PlaquetteChain(2, {"P_y": P(2, "1 - y")}), link).coord("l_xy^2")
        rhs = linking_map(PlaquetteChain(2, {"P_x": P(2, "1 - x")}), link).coord("l_xy^2")
        assert meridian_reduce(lhs, line) == meridian_reduce(rhs, line)
        # consequence: the (1-x)^k P_y row entry against l_xy^j is j^(k+1)
        chain = PlaquetteChain(2, {"P_y": P(2, "1 - x") ** 2})
        cls = reduce_mod_filtration(
            meridian_reduce(linking_map(chain, link).coord("l_xy^2"), line), 2
        )
        assert cls.coeffs == {(0, 2): 8}


class TestGoldenMatrices:
    def test_k0_identity(self):
        m = build_matrix(0, standard_link(0, 2))
        assert m.entries == [[1, 0], [0, 1]]
        assert m.row_labels == ["P_y", "P_x"]
        assert m.col_labels == ["l_y", "l_x"]

    def test_k0_identity_3d(self):
        m = build_matrix(0, standard_link(0, 3))
        assert m.entries == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_k1_table(self):
        m = build_matrix(1, standard_link(1, 2))
        assert m.row_labels == ["(1-x) P_y", "(1-y) P_x", "(1-x) P_x"]
        assert m.col_labels == ["(1-x) l_y", "(1-y) l_x", "(1-y) l_xy"]
        assert m.entries == [[1, 0, 1], [0, 1, 1], [0, 0, 1]]

    def test_k2_table(self):
        # the published 4x4 table up to the top-right corner: the module
        # relation forces that entry to 8 = 2^3 (see the pairing tests)
        m = build_matrix(2, standard_link(2, 2))
        assert m.row_labels == [
            "(1-x)^2 P_y",
            "(1-y)^2 P_x",
            "(1-x)(1-y) P_x",
            "(1-x)^2 P_x",
        ]
        assert m.entries == [
            [1, 0, 1, 8],
            [0, 1, 1, 1],
            [0, 0, 1, 2],
            [0, 0, 1, 4],
        ]

    def test_geometric_mode_matches_closed_form(self):
        for dim, kmax in ((2, 3), (3, 2)):
            for k in range(kmax + 1):
                link = standard_link(k, dim)
                closed = build_matrix(k, link, "closed-form")
                geo = build_matrix(k, link, "geometric")
                assert closed.entries == geo.entries, (dim, k)
                assert closed.row_labels == geo.row_labels

    def test_render(self):
        text = build_matrix(1, standard_link(1, 2)).render()
        assert "(1-x) P_y" in text and "(1-y) l_xy" in text


class TestInjectivity:
    def test_paper_matrices_injective(self):
        for k in range(4):
            m = build_matrix(k, standard_link(k, 2))
            res = is_injective(m)
            assert res.injective and res.kernel_witness is None

    def test_negative_control_single_curve(self):
        link = single_curve_link()
        m = build_matrix(1, link)
        res = is_injective(m)
        assert not res.injective
        w = res.kernel_witness
        assert w is not None and any(w)
        assert all(v == 0 for v in mat_vec_left(w, m.entries))
        # (x - y) P_x is in the kernel: its coordinate vector annihilates the matrix
        vec = normal_form_J(PlaquetteChain(2, {"P_x": P(2, "x - y")}), 1)
        assert any(vec)
        assert all(v == 0 for v in mat_vec_left(vec, m.entries))

    def test_brute_force_agreement_on_real_matrices(self):
        # exhaustive small-vector search agrees with the two-method verdict on
        # every matrix of size <= 5x5 arising here
        matrices = [build_matrix(k, standard_link(k, 2)).entries for k in range(4)]
        matrices.append(build_matrix(1, single_curve_link()).entries)
        matrices.append(build_matrix(0, single_curve_link()).entries)
        from fillink.linalg import bareiss_rank

        for entries in matrices:
            rows = len(entries)
            if rows > 5:
                continue
            injective = bareiss_rank(entries) == rows
            brute_kernel = any(
                any(vec) and all(v == 0 for v in mat_vec_left(vec, entries))
                for vec in itertools.product(range(-3, 4), repeat=rows)
            )
            assert injective == (not brute_kernel)


class TestVandermonde:
    def test_small_blocks(self):
        rep = vandermonde_check(1, 2)
        assert rep.ok and rep.det == 1
        # the raw 2x2 slope block is [[1,2],[1,4]] with determinant 2; its
        # column-normalized Vandermonde form has determinant prod(n-m) = 1
        m2 = build_matrix(2, standard_link(2, 2))
        block = [row[2:] for row in m2.entries[2:]]
        assert block == [[1, 2], [1, 4]]
        from fillink.linalg import bareiss_det

        assert bareiss_det(block) == 2
        rep2 = vandermonde_check(2, 2)
        assert rep2.ok and rep2.det == 1

    def test_k4_determinant(self):
        rep = vandermonde_check(4, 2)
        assert rep.det == 12  # prod over 1<=m<n<=4 of (n-m)

    def test_3d_structure(self):
        for k in (1, 2, 3):
            assert vandermonde_check(k, 3).ok

    def test_detects_broken_structure(self):
        # sanity: the checker raises on a tampered matrix path; simulate by
        # asking for a degree where the link has too few slope curves
        with pytest.raises(ValueError):
            vandermonde_check(0, 2)


class TestCertificates:
    def test_trivial_certificate(self):
        cert = certify_filling(2, 2)
        assert cert.verdict and cert.degrees == [] and len(cert.link.components) == 0
        cert3 = certify_filling(2, 3)
        assert cert3.verdict

    def test_m3_identity_degree(self):
        cert = certify_filling(3, 2)
        assert cert.verdict
        assert [d.j for d in cert.degrees] == [0]
        assert cert.degrees[0].matrix.entries == [[1, 0], [0, 1]]

    def test_m5_reproduces_tables(self):
        cert = certify_filling(5, 2)
        assert cert.verdict
        assert len(cert.link.components) == 4
        by_degree = {d.j: d.matrix for d in cert.degrees}
        # degree-1 over the 4-component link: the extra slope column j=2
        # carries entries j^a (and the relation-forced j^2 on the P_y row)
        assert by_degree[1].entries == [[1, 0, 1, 4], [0, 1, 1, 1], [0, 0, 1, 2]]
        assert by_degree[2].entries[2][2] == 1

    def test_sweep_and_monotonicity(self):
        for dim, tops in ((2, 8), (3, 5)):
            for m in range(2, tops + 1):
                cert = certify_filling(m, dim, geometric_depth=0)
                assert cert.verdict, (dim, m)

    def test_oracle_cross_check_recorded(self):
        cert = certify_filling(4, 2)
        assert all(d.oracle_checked for d in cert.degrees)
        assert all(d.oracle_match for d in cert.degrees)

    def test_json_schema_shape(self):
        cert = certify_filling(3, 3, geometric_depth=0)
        data = cert.to_dict()
        assert set(data) >= {"m", "dim", "link", "degrees", "verdict", "lemmaChain"}
        assert data["degrees"][0]["matrixRef"] in data["matrices"]

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            certify_filling(1, 2)


class TestClosedFormEntry:
    def test_spec_values(self):
        from fillink.certifier import closed_form_entry
        from fillink.groupring import parse_aug_class
        from fillink.modules import basis_J

        link = standard_link(2, 2)
        basis = basis_J(2, 2)
        row = basis.elements[basis.index("P_x", (2, 0))]
        # (1-x)^2 P_x against the slope-2 curve: 4 (1-y)^2
        cls = closed_form_entry(row, link.component("l_xy^2"), 2)
        assert cls == parse_aug_class(2, 2, "4*u_y^2")
        row2 = basis.elements[basis.index("P_x", (1, 1))]
        assert closed_form_entry(row2, link.component("l_xy^2"), 2) == parse_aug_class(
            2, 2, "2*u_y^2"
        )

    def test_axis_line_3d(self):
        from fillink.certifier import closed_form_entry
        from fillink.groupring import parse_aug_class
        from fillink.modules import basis_J

        link = standard_link(1, 3)
        basis = basis_J(3, 3)
        row = basis.elements[basis.index("P_x", (0, 1, 2))]
        cls = closed_form_entry(row, link.component("l_x"), 3)
        assert cls == parse_aug_class(3, 3, "u_y*u_z^2")
        # and zero against the other axis lines
        assert closed_form_entry(row, link.component("l_y"), 3).is_zero()


class TestThreadedAssembly:
    def test_thread_count_is_deterministic(self, monkeypatch):
        link = standard_link(2, 2)
        baseline = build_matrix(2, link).entries
        monkeypatch.setenv("FILLINK_THREADS", "4")
        assert build_matrix(2, link).entries == baseline
        assert build_matrix(2, link, "geometric").entries == baseline


class TestModuleLevelAgreement:
    def test_random_chains_match_oracle(self):
        # closed-form linking of arbitrary chains equals the geometric value
        # as exact canonical meridian coefficients, not just per-degree classes
        import random

        rng = random.Random(31)
        for dim in (2, 3):
            link = standard_link(2, dim)
            gens = ("P_x", "P_y") if dim == 2 else ("P_x", "P_y", "P_z")
            for _ in range(8):
                coords = {}
                for gen in gens:
                    terms = {
                        tuple(rng.randint(-2, 2) for _ in range(dim)): rng.randint(-2, 2)
                        for _ in range(rng.randint(0, 3))
                    }
                    poly = LaurentPoly(dim, terms)
                    if poly:
                        coords[gen] = poly
                if not coords:
                    continue
                chain = PlaquetteChain(dim, coords)
                closed = linking_map(chain, link)
                cycle = plaquette_chain_cycle(coords, dim)
                for line in link.components:
                    geo = meridian_reduce(geometric_linking(cycle, line, dim), line)
                    assert geo == closed.coord(line.label), (dim, line.label)

    def test_closed_form_equivariance(self):
        link = standard_link(2, 2)
        chain = PlaquetteChain(2, {"P_x": P(2, "1 - 2*x + y"), "P_y": P(2, "3 - y")})
        base = linking_map(chain, link)
        for g in ((1, 0), (0, -2), (2, 1)):
            shifted = PlaquetteChain(2, {k: v.translated(g) for k, v in chain.coords.items()})
            lhs = linking_map(shifted, link)
            rhs = MeridianChain(
                link, {k: v.translated(g) for k, v in base.coords.items()}
            )
            assert lhs == rhs


class TestEmptyLink:
    def test_matrix_over_empty_link(self):
        from fillink.lattice import LinkSpec

        empty = LinkSpec(2, ())
        m = build_matrix(1, empty)
        assert m.col_labels == [] and len(m.entries) == 3
        res = is_injective(m)
        assert not res.injective and res.kernel_witness is not None
        assert m.render()  # renders without columns


class TestGolden3D:
    def test_k1_matrix_frozen(self):
        # hand-verified from the pairing table: axis blocks are unit slots,
        # the slope columns carry the substituted multipliers, and the P_z
        # rows pick up the negative translate-sum pairings
        m = build_matrix(1, standard_link(1, 3))
        assert m.row_labels == [
            "(1-z) P_x", "(1-y) P_x", "(1-x) P_x",
            "(1-z) P_y", "(1-y) P_y", "(1-x) P_y",
            "(1-y) P_z", "(1-x) P_z",
        ]
        assert m.col_labels == [
            "(1-z) l_x", "(1-y) l_x", "(1-z) l_y", "(1-x) l_y",
            "(1-y) l_z", "(1-x) l_z", "(1-z) l_xz", "(1-y) l_xz",
            "(1-z) l_yz", "(1-x) l_yz",
        ]
        assert m.entries == [
            [1, 0, 0, 0, 0, 0, 1, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 1, 0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 1, 0, 0, -1, -1, 0],
            [0, 0, 0, 0, 0, 1, -1, 0, 0, -1],
        ]
        assert is_injective(m).injective
