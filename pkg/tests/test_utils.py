import math

import numpy as np
import pytest
import scipy.sparse as sp

from processor.errors import ConfigError, MemoryGuardError
from utils.common import check_dense_budget, format_float, max_abs, parse_theta


@pytest.mark.parametrize("text, expected", [
    ("pi/8", math.pi / 8),
    (" pi / 2 ", math.pi / 2),
    ("3*pi/10", 3 * math.pi / 10),
    ("-0.25", -0.25),
    ("0.3927", 0.3927),
    (0.5, 0.5),
    (1, 1.0),
])
def test_parse_theta(text, expected):
    assert parse_theta(text) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [
    "",
    "pi/0",
    "tau",
    "__import__('os')",
    "pi**2",
    "1e400*1e400",
    True,
])
def test_parse_theta_rejects(bad):
    with pytest.raises(ConfigError):
        parse_theta(bad)


@pytest.mark.parametrize("value, expected", [
    (0.1, "0.1"),
    (np.float64(1 / 3), "0.3333333333333333"),
    (-0.0, "0.0"),
    (np.int64(7), "7"),
    (True, "true"),
    ("site", "site"),
])
def test_format_float(value, expected):
    assert format_float(value) == expected


def test_check_dense_budget(monkeypatch, caplog):
    monkeypatch.setattr("utils.common.MAX_QUBITS", 10)
    check_dense_budget(10)
    with caplog.at_level("ERROR"):
        with pytest.raises(MemoryGuardError):
            check_dense_budget(11, "Fock state")
    assert "Dense Fock state over 11 bits" in caplog.text


def test_max_abs_dense_and_sparse():
    dense = np.array([[1.0, -3.0], [2j, 0.0]])
    assert max_abs(dense) == 3.0
    assert max_abs(sp.csr_matrix(dense)) == 3.0
    assert max_abs(sp.csr_matrix((3, 3))) == 0.0
    assert max_abs(np.array([])) == 0.0
