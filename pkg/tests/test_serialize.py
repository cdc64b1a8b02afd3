import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from optholo.config import ValidationError
from optholo.coords import ParameterPoint
from optholo.serialize import (
    dumps, matrix_from_doc, matrix_to_doc, parse_complex, parse_point, parse_point_text, point_to_doc,
)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
complex_mats = arrays(np.complex128, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                      elements=st.complex_numbers(allow_nan=False, allow_infinity=False))


@settings(max_examples=60, deadline=None)
@given(complex_mats)
def test_matrix_round_trip_is_bit_exact(m):
    back = matrix_from_doc(json.loads(dumps({"m": m}))["m"])
    assert back.shape == m.shape
    assert np.array_equal(back.view(np.float64), m.view(np.float64))


@settings(max_examples=60, deadline=None)
@given(finite)
def test_floats_render_with_17_digits(x):
    assert float(dumps(x)) == x


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False), min_size=2, max_size=2))
def test_point_round_trip(vals):
    p = ParameterPoint((vals[0],), (vals[1],))
    assert parse_point(json.loads(dumps(point_to_doc(p)))) == p


def test_matrix_schema():
    doc = matrix_to_doc(np.array([[1 + 2j, 3], [0, -1j]]))
    assert doc == {"rows": 2, "cols": 2, "data": [[1, 2], [3, 0], [0, 0], [0, -1]]}
    with pytest.raises(ValidationError):
        matrix_from_doc({"rows": 2, "cols": 2, "data": [[0, 0]]})
    with pytest.raises(ValidationError):
        matrix_from_doc({"rows": 2})


def test_parse_complex_forms():
    assert parse_complex([1, -2]) == 1 - 2j
    assert parse_complex("0.1-0.2i") == 0.1 - 0.2j
    assert parse_complex(3) == 3
    for bad in ([1, 2, 3], "x", [math.inf, 0]):
        with pytest.raises(ValidationError):
            parse_complex(bad)


def test_point_text_forms(tmp_path):
    assert parse_point_text("0.1,0.2j|0.3,0") == ParameterPoint((0.1, 0.2j), (0.3, 0))
    inline = '{"xi": [[0.1, 0]], "zeta": [[0, 0.2]]}'
    assert parse_point_text(inline) == ParameterPoint((0.1,), (0.2j,))
    f = tmp_path / "p.json"
    f.write_text(inline)
    assert parse_point_text(str(f)) == ParameterPoint((0.1,), (0.2j,))
    with pytest.raises(ValidationError, match="point dimension mismatch"):
        parse_point_text("0.1|0.2,0.3")
    with pytest.raises(ValidationError):
        parse_point_text(str(tmp_path / "missing.json"))
    with pytest.raises(ValidationError):
        parse_point_text("{not json")


def test_non_finite_rejected():
    with pytest.raises(ValidationError):
        dumps({"x": math.nan})
