import numpy as np
import pytest

from focusseg.errors import FormatError
from focusseg.formats import format_matrix, read_matrix, write_matrix


def test_format_matrix():
    assert format_matrix([[0.5, 1], [0, 1 / 3]]) == "0.500000 1.000000\n0.000000 0.333333\n"
    assert format_matrix([[1, 0], [12, 3]], integer=True) == "1 0\n12 3\n"
    with pytest.raises(FormatError):
        format_matrix([1, 2])


def test_matrix_roundtrip(tmp_path, rng):
    m = np.round(rng.random((4, 5)), 6)
    write_matrix(tmp_path / "m.txt", m)
    np.testing.assert_allclose(read_matrix(tmp_path / "m.txt"), m, atol=1e-12)


def test_read_matrix_errors(tmp_path):
    p = tmp_path / "bad.txt"
    for text in ["", "1 2\n3\n", "1 x\n"]:
        p.write_text(text)
        with pytest.raises(FormatError):
            read_matrix(p)
