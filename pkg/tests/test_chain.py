import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seektime import (
    NonnegativityError,
    ParseError,
    ShapeError,
    StochasticityError,
    UnknownStateError,
    classify_structure,
    load_matrix,
    parse_matrix,
    validate_stochastic,
)
from conftest import cycle_chain, make_chain, uniform_chain


class TestParseCsv:
    def test_uniform_two_state(self):
        entries, labels = parse_matrix("0.5,0.5\n0.5,0.5\n", "csv")
        assert entries.shape == (2, 2)
        assert labels == ("s0", "s1")
        np.testing.assert_array_equal(entries, [[0.5, 0.5], [0.5, 0.5]])

    def test_comments_blanks_and_no_trailing_newline(self):
        text = "# transition matrix\n0.5,0.5\n\n# second row\n0.5,0.5"
        entries, _ = parse_matrix(text, "csv")
        assert entries.shape == (2, 2)

    def test_bytes_input(self):
        entries, _ = parse_matrix(b"1.0\n", "csv")
        assert entries.shape == (1, 1)

    def test_row_length_mismatch_is_shape_error(self):
        with pytest.raises(ShapeError, match="line 2"):
            parse_matrix("0.5,0.5\n1.0\n", "csv")

    def test_non_numeric_cell_reports_line_and_column(self):
        with pytest.raises(ParseError, match=r"line 2, column 2"):
            parse_matrix("0.5,0.5\n0.5,x\n", "csv")

    def test_empty_input(self):
        with pytest.raises(ParseError):
            parse_matrix("# nothing here\n", "csv")


class TestParseJson:
    def test_states_and_matrix(self):
        entries, labels = parse_matrix(
            '{"states":["a","b"],"matrix":[[0.8,0.2],[0.4,0.6]]}', "json"
        )
        assert labels == ("a", "b")
        np.testing.assert_array_equal(entries, [[0.8, 0.2], [0.4, 0.6]])

    def test_default_labels_without_states(self):
        _, labels = parse_matrix('{"matrix":[[1.0]]}', "json")
        assert labels == ("s0",)

    def test_invalid_json_syntax(self):
        with pytest.raises(ParseError, match="invalid JSON"):
            parse_matrix("{not json", "json")

    def test_missing_matrix_key(self):
        with pytest.raises(ParseError, match='"matrix"'):
            parse_matrix('{"states":["a"]}', "json")

    def test_ragged_matrix(self):
        with pytest.raises(ShapeError):
            parse_matrix('{"matrix":[[0.5,0.5],[1.0]]}', "json")

    def test_non_numeric_entry(self):
        with pytest.raises(ParseError, match="non-numeric"):
            parse_matrix('{"matrix":[["x"]]}', "json")

    def test_states_length_mismatch(self):
        with pytest.raises(ShapeError):
            parse_matrix('{"states":["a"],"matrix":[[0.5,0.5],[0.5,0.5]]}', "json")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_matrix("1.0\n", "tsv")


class TestValidate:
    def test_exact_rows_accepted_unchanged(self):
        P = validate_stochastic(np.array([[0.5, 0.5], [0.5, 0.5]]))
        np.testing.assert_array_equal(P.entries, [[0.5, 0.5], [0.5, 0.5]])

    def test_row_sum_violation_names_row_and_sum(self):
        with pytest.raises(StochasticityError, match=r"row 0 sums to 0.6"):
            validate_stochastic(np.array([[0.3, 0.3], [0.5, 0.5]]))

    def test_within_tolerance_drift_is_renormalized(self):
        P = validate_stochastic(np.array([[0.5 + 1e-12, 0.5], [0.5, 0.5]]))
        # exact in working precision: at most one ulp of pairwise-sum rounding
        assert np.abs(P.entries.sum(axis=1) - 1.0).max() <= 2**-52

    def test_negative_entry(self):
        with pytest.raises(NonnegativityError, match=r"\(1, 0\)"):
            validate_stochastic(np.array([[0.5, 0.5], [-0.1, 1.1]]))

    def test_non_finite_entry(self):
        with pytest.raises(NonnegativityError, match="not finite"):
            validate_stochastic(np.array([[np.nan, 1.0], [0.5, 0.5]]))

    def test_non_square(self):
        with pytest.raises(ShapeError):
            validate_stochastic(np.array([[0.5, 0.5]]))

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ParseError, match="unique"):
            validate_stochastic(np.full((2, 2), 0.5), labels=("a", "a"))

    def test_custom_tolerance(self):
        bad = np.array([[0.6, 0.5], [0.5, 0.5]])
        with pytest.raises(StochasticityError):
            validate_stochastic(bad)
        P = validate_stochastic(bad, tol=0.2)
        np.testing.assert_allclose(P.entries.sum(axis=1), 1.0)

    def test_entries_are_frozen(self):
        P = validate_stochastic(np.full((2, 2), 0.5))
        with pytest.raises(ValueError):
            P.entries[0, 0] = 1.0

    def test_single_state_chain_accepted(self):
        P = validate_stochastic(np.array([[1.0]]))
        assert P.n == 1


class TestStateIndex:
    def test_label_index_and_errors(self, two_state):
        assert two_state.state_index("b") == 1
        assert two_state.state_index(0) == 0
        assert two_state.state_index("1") == 1
        with pytest.raises(UnknownStateError):
            two_state.state_index("zz")
        with pytest.raises(UnknownStateError):
            two_state.state_index(5)


class TestClassify:
    def test_cycle_is_irreducible_with_period_n(self):
        for n in range(2, 11):
            s = classify_structure(cycle_chain(n))
            assert s.irreducible and s.period == n

    def test_uniform_is_aperiodic(self):
        s = classify_structure(uniform_chain(2))
        assert s.irreducible and s.period == 1 and s.aperiodic

    def test_identity_is_reducible_with_two_classes(self):
        s = classify_structure(make_chain([[1.0, 0.0], [0.0, 1.0]]))
        assert not s.irreducible
        assert s.period is None
        assert s.communicating_classes == ((0,), (1,))

    def test_transient_plus_absorbing_classes(self):
        P = make_chain([[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.5, 0.5]])
        s = classify_structure(P)
        assert not s.irreducible
        assert len(s.communicating_classes) == 3

    def test_single_state(self):
        s = classify_structure(make_chain([[1.0]]))
        assert s.irreducible and s.period == 1

    def test_tiny_entries_make_edges(self):
        # entries below 1e-15 are kept; the edge test is strictly positive
        P = make_chain([[1.0 - 1e-16, 1e-16], [0.5, 0.5]])
        assert P.entries[0, 1] > 0
        assert classify_structure(P).irreducible

    def test_two_cycle_period(self):
        s = classify_structure(make_chain([[0.0, 1.0], [1.0, 0.0]]))
        assert s.period == 2

    def test_lazy_cycle_is_aperiodic(self):
        # one self-loop breaks the period of a cycle
        P = make_chain([[0.5, 0.5, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
        assert classify_structure(P).period == 1


@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**32))
@settings(max_examples=100, deadline=None)
def test_all_positive_chains_are_irreducible_aperiodic(n, seed):
    rng = np.random.default_rng(seed)
    entries = rng.random((n, n)) + 1e-3
    entries /= entries.sum(axis=1, keepdims=True)
    s = classify_structure(validate_stochastic(entries))
    assert s.irreducible and s.period == 1


@given(st.integers(min_value=1, max_value=10), st.integers(min_value=0, max_value=2**32))
@settings(max_examples=100, deadline=None)
def test_accepted_rows_sum_to_one_in_working_precision(n, seed):
    rng = np.random.default_rng(seed)
    P = validate_stochastic(rng.dirichlet(np.ones(n), size=n))
    assert np.all(P.entries >= 0) and np.all(P.entries <= 1)
    assert np.abs(P.entries.sum(axis=1) - 1.0).max() <= 2**-52


def test_load_matrix_roundtrip(two_state):
    text = "\n".join(",".join(repr(float(x)) for x in row) for row in two_state.entries)
    P = load_matrix(text, "csv")
    np.testing.assert_array_equal(P.entries, two_state.entries)
