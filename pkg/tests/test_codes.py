import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qedet import (
    BudgetExceededError,
    CapacityError,
    InvalidParameterError,
    PauliString,
)
from qedet.codes import (
    StabilizerCode,
    build_color_lattice,
    code_distance_bruteforce,
    codeword_membership,
    diagonal_projector_terms,
    enumerate_codewords,
    projector_terms,
    random_css_code,
    random_stabilizer_code,
    repetition_code,
    single_qubit_code,
    triangular_color_code,
    validate_code,
)

from oracles import brute_force_codewords, dense_pauli_from, dense_projector


class TestRepetition:
    def test_structure(self):
        c = repetition_code(3)
        assert (c.n, c.k, c.d, c.r) == (3, 1, 3, 2)
        assert [g.to_label() for g in c.generators] == ["+ZZI", "+IZZ"]
        assert c.logical_x[0].to_label() == "+XXX"
        assert c.logical_z[0].to_label() == "+ZII"
        assert c.is_css

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_validates(self, n):
        assert validate_code(repetition_code(n)).passed

    @pytest.mark.parametrize("n", [1, 2, 4, 0])
    def test_rejects_bad_n(self, n):
        with pytest.raises(InvalidParameterError):
            repetition_code(n)

    def test_distance_depends_on_error_alphabet(self):
        c = repetition_code(3)
        # a single Z on any qubit commutes with everything yet acts as the
        # logical Z, so the unrestricted distance is 1
        assert code_distance_bruteforce(c) == 1
        assert code_distance_bruteforce(c, error_types="X") == 3
        assert code_distance_bruteforce(c, error_types="Z") == 1
        assert code_distance_bruteforce(repetition_code(5), error_types="X") == 5

    def test_codewords(self):
        c = repetition_code(3)
        assert enumerate_codewords(c) == {"000", "111"}
        assert enumerate_codewords(c, method="general") == {"000", "111"}
        assert brute_force_codewords(c) == {"000", "111"}

    def test_trivial_single_qubit(self):
        c = single_qubit_code()
        assert (c.n, c.k, c.d, c.r) == (1, 1, 1, 0)
        assert validate_code(c).passed
        assert enumerate_codewords(c) == {"0", "1"}
        assert code_distance_bruteforce(c) == 1


class TestColorCode:
    def test_d3_lattice_is_steane_shaped(self):
        lat = build_color_lattice(3)
        assert lat.n == 7
        assert len(lat.faces) == 3
        assert all(len(f.sites) == 4 for f in lat.faces)
        assert {f.color for f in lat.faces} == {"g", "b", "r"}

    def test_d3_generator_supports(self):
        c = triangular_color_code(3)
        xs = [tuple(np.flatnonzero(g.x_bits())) for g in c.x_type_generators()]
        zs = [tuple(np.flatnonzero(g.z_bits())) for g in c.z_type_generators()]
        assert xs == zs == [(1, 2, 3, 4), (0, 1, 3, 5), (3, 4, 5, 6)]
        assert tuple(np.flatnonzero(c.logical_x[0].x_bits())) == (0, 1, 2)

    @pytest.mark.parametrize("d", [3, 5, 7, 9])
    def test_qubit_count_formula(self, d):
        c = triangular_color_code(d)
        assert c.n == (3 * d * d + 1) // 4
        assert c.r == c.n - 1
        assert len(c.x_type_generators()) == len(c.z_type_generators()) == (c.n - 1) // 2

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_validates(self, d):
        report = validate_code(triangular_color_code(d))
        assert report.passed, str(report)

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_face_weights_and_coloring(self, d):
        lat = build_color_lattice(d)
        assert {len(f.sites) for f in lat.faces} <= {4, 6}
        for i, f in enumerate(lat.faces):
            for g in lat.faces[i + 1:]:
                if set(f.sites) & set(g.sites):
                    assert f.color != g.color

    def test_d3_distance(self):
        c = triangular_color_code(3)
        assert code_distance_bruteforce(c) == 3
        assert code_distance_bruteforce(c, error_types="X") == 3
        # weight-order general scan agrees with the CSS kernel shortcut
        from qedet.codes import _distance_scan
        assert _distance_scan(c, 3, "XYZ", 10 ** 7) == 3

    def test_d5_distance(self):
        assert code_distance_bruteforce(triangular_color_code(5)) == 5

    def test_d3_codewords_match_dense_oracle(self):
        c = triangular_color_code(3)
        words = enumerate_codewords(c)
        assert len(words) == 16
        assert words == brute_force_codewords(c)
        assert words == enumerate_codewords(c, method="general")
        assert min(w.count("1") for w in words if "1" in w) == 3

    @pytest.mark.parametrize("d", [2, 4, 1])
    def test_rejects_bad_distance(self, d):
        with pytest.raises(InvalidParameterError):
            triangular_color_code(d)

    def test_logical_weight_is_d(self):
        for d in (3, 5, 7):
            c = triangular_color_code(d)
            assert int(c.logical_x[0].weight()) == d
            assert int(c.logical_z[0].weight()) == d


class TestValidationFailures:
    def test_anticommuting_generators_reported(self):
        c = repetition_code(3)
        bad = StabilizerCode(
            3, 1, None,
            (c.generators[0], PauliString.from_label("+XII")),
            c.logical_x, c.logical_z, False,
        )
        report = validate_code(bad)
        assert not report.passed
        assert any("commute" in e.check for e in report.failures())

    def test_dependent_generators_reported(self):
        g = PauliString.from_label("+ZZI")
        bad = StabilizerCode(3, 1, None, (g, g.copy()), (), (), False)
        report = validate_code(bad)
        assert not report.passed
        checks = {e.check for e in report.failures()}
        assert any("independent" in c for c in checks)

    def test_wrong_logical_commutation_reported(self):
        c = repetition_code(3)
        bad = StabilizerCode(
            3, 1, 3, c.generators,
            logical_x=c.logical_z,  # commutes with logical_z instead
            logical_z=c.logical_z, is_css=True,
        )
        report = validate_code(bad)
        assert any("anticommute" in e.check for e in report.failures())

    def test_css_flag_checked(self):
        bad = StabilizerCode(
            2, 1, None, (PauliString.from_label("+XZ"),),
            (PauliString.from_label("+XI"),), (PauliString.from_label("+ZZ"),),
            is_css=True,
        )
        report = validate_code(bad)
        assert any("pure X or pure Z" in e.check for e in report.failures())


class TestDistanceGuards:
    def test_budget_exhaustion(self):
        c = random_stabilizer_code(8, seed=1)
        with pytest.raises(BudgetExceededError):
            code_distance_bruteforce(c, budget=10)

    def test_bad_error_types(self):
        with pytest.raises(InvalidParameterError):
            code_distance_bruteforce(repetition_code(3), error_types="Q")

    def test_max_weight_cutoff(self):
        c = repetition_code(5)
        assert code_distance_bruteforce(c, max_weight=3, error_types="X") is None


class TestEnumeration:
    def test_general_path_capacity(self):
        c = triangular_color_code(5)  # n = 19
        with pytest.raises(CapacityError, match="CSS"):
            enumerate_codewords(c, method="general", cap=12)

    def test_css_path_rejects_non_css(self):
        from qedet.errors import UnsupportedOperationError
        c = random_stabilizer_code(6, seed=0)
        with pytest.raises(UnsupportedOperationError):
            enumerate_codewords(c, method="css")

    @pytest.mark.parametrize("seed", range(4))
    def test_random_css_paths_agree(self, seed):
        c = random_css_code(9, seed)
        assert validate_code(c).passed
        assert enumerate_codewords(c, method="general") == enumerate_codewords(
            c, method="css"
        )

    @pytest.mark.parametrize("seed", range(4))
    def test_random_general_matches_projector_oracle(self, seed):
        c = random_stabilizer_code(7, seed)
        assert validate_code(c).passed
        assert enumerate_codewords(c, method="general") == brute_force_codewords(c)

    def test_membership_checker(self):
        c = triangular_color_code(3)
        words = sorted(enumerate_codewords(c))
        check = codeword_membership(c)
        bits = np.array([[int(b) for b in w] for w in words], np.uint8)
        assert check(bits).all()
        non = bits.copy()
        non[:, 0] ^= 1  # single flip leaves the kernel of H_z
        assert not check(non).any()

    def test_membership_non_css_fallback(self):
        c = random_stabilizer_code(6, seed=2)
        words = enumerate_codewords(c)
        check = codeword_membership(c)
        all_bits = np.array(
            [[int(b) for b in format(v, "06b")] for v in range(64)], np.uint8
        )
        got = check(all_bits)
        want = np.array([format(v, "06b") in words for v in range(64)])
        assert (got == want).all()


class TestProjectors:
    def test_full_expansion_matches_dense(self):
        c = triangular_color_code(3)
        exp = projector_terms(c)
        assert len(exp.terms) == 64
        assert exp.coefficient == pytest.approx(1 / 64)
        acc = sum(coeff * dense_pauli_from(p) for coeff, p in exp.terms)
        assert np.allclose(acc, dense_projector(c), atol=1e-12)

    def test_identity_appears_once(self):
        exp = projector_terms(repetition_code(5))
        idents = [p for _, p in exp.terms if p.is_identity()]
        assert len(idents) == 1 and idents[0].sign == 1

    def test_capacity(self):
        with pytest.raises(CapacityError):
            projector_terms(triangular_color_code(3), cap=5)

    def test_diagonal_expansion_is_codeword_indicator(self):
        c = triangular_color_code(3)
        exp = diagonal_projector_terms(c)
        assert len(exp.terms) == 8  # 2^{r_z}, r_z = 3
        acc = sum(coeff * dense_pauli_from(p) for coeff, p in exp.terms)
        diag = np.diag(acc).real
        assert np.allclose(acc, np.diag(diag), atol=1e-12)
        words = enumerate_codewords(c)
        want = np.zeros(2 ** 7)
        for w in words:
            want[int(w, 2)] = 1.0
        assert np.allclose(diag, want, atol=1e-12)

    def test_diagonal_equals_full_for_z_only_code(self):
        c = repetition_code(3)
        full = projector_terms(c)
        diag = diagonal_projector_terms(c)
        assert len(full.terms) == len(diag.terms) == 4
        full_set = {(coeff, p.to_label()) for coeff, p in full.terms}
        diag_set = {(coeff, p.to_label()) for coeff, p in diag.terms}
        assert full_set == diag_set

    def test_trivial_code_projector_is_identity(self):
        exp = projector_terms(single_qubit_code())
        assert len(exp.terms) == 1
        coeff, p = exp.terms[0]
        assert coeff == 1.0 and p.is_identity()


class TestSerialization:
    @pytest.mark.parametrize(
        "code",
        [
            repetition_code(5),
            triangular_color_code(3),
            random_stabilizer_code(8, seed=3),
            random_css_code(9, seed=1),
            single_qubit_code(),
        ],
        ids=lambda c: c.name,
    )
    def test_round_trip(self, code):
        again = StabilizerCode.from_text(code.to_text())
        assert again == code
        assert again.content_hash() == code.content_hash()

    def test_header_format(self):
        text = repetition_code(3).to_text()
        assert text.splitlines()[0] == "[[3,1,3]] css=true"
        assert "+ZZ_" in text and "LX" in text and "LZ" in text

    def test_bad_header_rejected(self):
        with pytest.raises(InvalidParameterError):
            StabilizerCode.from_text("nonsense\n+ZZ\n")

    def test_unknown_distance_round_trips_as_none(self):
        c = random_stabilizer_code(6, seed=0)
        assert c.d is None
        assert StabilizerCode.from_text(c.to_text()).d is None


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(5, 9))
def test_random_codes_validate(seed, n):
    assert validate_code(random_stabilizer_code(n, seed)).passed


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(5, 8))
def test_random_css_membership_matches_enumeration(seed, n):
    c = random_css_code(n, seed)
    assert validate_code(c).passed
    words = enumerate_codewords(c)
    check = codeword_membership(c)
    all_bits = np.array(
        [[int(b) for b in format(v, f"0{n}b")] for v in range(2 ** n)], np.uint8
    )
    got = check(all_bits)
    want = np.array([format(v, f"0{n}b") in words for v in range(2 ** n)])
    assert (got == want).all()
