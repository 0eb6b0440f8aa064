import numpy as np
import pytest

from radbench.analytics import (
    ExprDomainError,
    ExprSyntaxError,
    FeatureTable,
    custom_transform,
    evaluate,
    parse_expression,
)


def ev(expr, x):
    return evaluate(parse_expression(expr), np.asarray(x, dtype=np.float64))


class TestParser:
    def test_basic_arithmetic(self):
        assert ev("x^2 + 1", [3.0]).tolist() == [10.0]
        assert ev("2*x - 6/3", [5.0]).tolist() == [8.0]
        assert ev("-x", [4.0]).tolist() == [-4.0]
        assert ev("(x+1)*(x-1)", [3.0]).tolist() == [8.0]

    def test_precedence(self):
        assert ev("2+3*4", [0.0])[0] == 14.0
        assert ev("2*3^2", [0.0])[0] == 18.0  # ^ binds tighter than *

    def test_power_right_associative(self):
        assert ev("2^3^2", [0.0])[0] == 512.0  # 2^(3^2)

    def test_functions(self):
        assert ev("log(x+1)", [0.0])[0] == 0.0
        assert ev("sqrt(x)", [9.0])[0] == 3.0
        assert ev("abs(x)", [-2.5])[0] == 2.5
        assert ev("exp(x)", [0.0])[0] == 1.0
        assert ev("min(x, 3)", [5.0])[0] == 3.0
        assert ev("max(x, 0, 2)", [1.0])[0] == 2.0

    def test_unary_minus_nested(self):
        assert ev("--x", [2.0])[0] == 2.0
        assert ev("-x^2", [3.0])[0] == -9.0  # -(x^2)

    def test_scientific_literals(self):
        assert ev("1e2 + x", [1.0])[0] == 101.0
        assert ev("2.5e-1", [0.0])[0] == 0.25

    def test_syntax_error_positions(self):
        with pytest.raises(ExprSyntaxError, match="position 4"):
            parse_expression("1 + ")
        with pytest.raises(ExprSyntaxError, match="position"):
            parse_expression("log(x")
        with pytest.raises(ExprSyntaxError, match="unexpected"):
            parse_expression("x ? 2")
        with pytest.raises(ExprSyntaxError, match="unknown function"):
            parse_expression("sine(x)")
        with pytest.raises(ExprSyntaxError):
            parse_expression("min(x)")  # needs two arguments

    def test_domain_errors(self):
        with pytest.raises(ExprDomainError, match="log"):
            ev("log(x)", [1.0, 0.0])
        with pytest.raises(ExprDomainError, match="sqrt"):
            ev("sqrt(x)", [-1.0])
        with pytest.raises(ExprDomainError, match="division"):
            ev("1/x", [2.0, 0.0])


class TestCustomTransform:
    def _table(self):
        return FeatureTable(
            rows=["a", "b"],
            columns=["u", "v"],
            values=np.array([[0.0, 4.0], [3.0, 9.0]]),
        )

    def test_selected_columns_only(self):
        out, step = custom_transform(self._table(), "sqrt(x)", columns=["v"])
        assert out.values[:, 0].tolist() == [0.0, 3.0]  # untouched
        assert out.values[:, 1].tolist() == [2.0, 3.0]

    def test_all_columns_default(self):
        out, _ = custom_transform(self._table(), "x^2 + 1")
        assert out.values[0].tolist() == [1.0, 17.0]

    def test_domain_error_names_row_and_column(self):
        t = FeatureTable(rows=["a", "bad-row"], columns=["c"],
                         values=np.array([[1.0], [-1.0]]))
        with pytest.raises(ExprDomainError, match=r"column 'c', row 'bad-row'"):
            custom_transform(t, "sqrt(x)")

    def test_replayable_step(self):
        t = self._table()
        out, step = custom_transform(t, "log(x+1)", columns=["u"])
        replay = step.apply(t)
        assert np.array_equal(replay.values, out.values)

    def test_unknown_column(self):
        with pytest.raises(ValueError, match="unknown columns"):
            custom_transform(self._table(), "x", columns=["zzz"])
