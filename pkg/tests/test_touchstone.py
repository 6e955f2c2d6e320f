import numpy as np
import pytest
from hypothesis import given, strategies as st

from widematch import TouchstoneData, read_touchstone, write_touchstone
from widematch.touchstone import TouchstoneError, format_touchstone, parse_touchstone

cplx = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@given(st.lists(cplx, min_size=1, max_size=8), st.sampled_from(["Hz", "kHz", "MHz", "GHz"]))
def test_ri_roundtrip_exact(values, unit):
    f = np.arange(1, len(values) + 1) * 1e9
    data = TouchstoneData(f, np.array(values).reshape(-1, 1, 1), 50.0, "RI", unit)
    back = parse_touchstone(format_touchstone(data))
    np.testing.assert_array_equal(back.s, data.s)
    np.testing.assert_allclose(back.frequencies, f, rtol=1e-15)


@given(st.lists(cplx.filter(lambda z: abs(z) > 1e-6), min_size=1, max_size=4),
       st.sampled_from(["MA", "DB"]))
def test_polar_roundtrip(values, fmt):
    f = np.arange(1, len(values) + 1) * 1e6
    data = TouchstoneData(f, np.array(values).reshape(-1, 1, 1), 50.0, fmt, "MHz")
    back = parse_touchstone(format_touchstone(data))
    np.testing.assert_allclose(back.s, data.s, rtol=1e-12, atol=1e-15)


def test_defaults_are_ghz_ma_50():
    data = parse_touchstone("1 0.5 90\n2 1 180\n")
    assert data.frequencies.tolist() == [1e9, 2e9]
    assert data.s[0, 0, 0] == pytest.approx(0.5j)
    assert data.resistance == 50.0


def test_two_port_order():
    text = "# Hz S RI R 75\n1 1 0 2 0 3 0 4 0\n"
    s = parse_touchstone(text).s[0]
    # v1 two-port order is S11 S21 S12 S22
    assert s.tolist() == [[1, 3], [2, 4]]
    assert parse_touchstone(text).resistance == 75.0


@pytest.mark.parametrize("text,line", [
    ("# Hz Z RI\n1 0 0\n", 1),
    ("# Hz S RI\n1 0 0\n1 0 0\n", 3),
    ("# Hz S RI\n1 0 x\n", 2),
    ("# Hz S RI\n1 0 0 0\n", 2),
    ("# Hz S RI R\n", 1),
    ("# Hz S RI\n# Hz S RI\n", 2),
    ("[Version] 2.0\n", 1),
])
def test_errors_name_the_line(text, line):
    with pytest.raises(TouchstoneError) as info:
        parse_touchstone(text)
    assert info.value.line == line


def test_suffix_sets_port_count(tmp_path):
    path = tmp_path / "x.s2p"
    path.write_text("# Hz S RI\n1 0 0\n")
    with pytest.raises(TouchstoneError):
        read_touchstone(path)
    data = TouchstoneData(np.array([1.0]), np.zeros((1, 1, 1), complex))
    write_touchstone(tmp_path / "y.s1p", data)
    assert read_touchstone(tmp_path / "y.s1p").ports == 1
