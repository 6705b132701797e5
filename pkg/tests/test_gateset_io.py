import json
import logging

import numpy as np
import pytest

from liegates.gateset_io import (
    ProblemFileError,
    gate_names,
    matrix_to_json,
    named_gate,
    parse_problem,
    parse_problem_text,
    problem_from_dict,
    serialize_problem,
    special_unitarize,
)
from liegates.matrix_core import mat_exp

from conftest import H_SU


def test_named_gates():
    assert np.allclose(named_gate("h", 2), np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    cnot = named_gate("CNOT", 4)
    # control on the first qubit, |10> <-> |11>
    assert np.allclose(cnot @ np.eye(4)[2], np.eye(4)[3])
    assert np.allclose(cnot @ np.eye(4)[1], np.eye(4)[1])
    f = named_gate("FOURIER", 3)
    assert np.allclose(f.conj().T @ f, np.eye(3))
    assert "CLOCK" in gate_names(5) and "H" in gate_names(2)
    with pytest.raises(ProblemFileError):
        named_gate("H", 3)


def test_special_unitarize(caplog):
    u = np.eye(2, dtype=complex)
    assert np.allclose(special_unitarize(u), u)
    with caplog.at_level(logging.INFO, logger="liegates.gateset_io"):
        h = special_unitarize(named_gate("H", 2))
    assert "rescaled" in caplog.text
    assert abs(np.linalg.det(h) - 1) < 1e-10
    assert np.allclose(h, H_SU)
    with pytest.raises(ValueError):
        special_unitarize(2 * np.eye(2))


def test_parse_group_problem(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"d": 2, "problem": "group_universality", "gates": ["H", "T"]}))
    pf = parse_problem(path)
    assert len(pf.gates) == 2 and pf.gate_names() == ["H", "T"]
    for g in pf.gates:
        assert abs(np.linalg.det(g) - 1) < 1e-10
    assert pf.max_word_length == 16 and pf.element_budget == 200000


def test_explicit_matrix_and_names():
    pf = problem_from_dict({"d": 2, "problem": "group_universality",
                            "gates": ["S", matrix_to_json(H_SU)]})
    assert pf.gate_names() == ["S", "g1"]
    assert np.allclose(pf.gates[1], H_SU)


@pytest.mark.parametrize("data, fragment", [
    ({"d": 2, "problem": "group_universality", "gates": [matrix_to_json(np.eye(3))]}, "2x2"),
    ({"d": 2, "problem": "group_universality", "gates": ["FOO"]}, "unknown gate"),
    ({"d": 2, "problem": "group_universality", "gates": [matrix_to_json(2 * np.eye(2))]}, "not unitary"),
    ({"d": 2, "problem": "nope", "gates": ["H"]}, "problem"),
    ({"d": 1, "problem": "group_universality", "gates": ["H"]}, "d:"),
    ({"d": 2, "problem": "group_universality"}, "gates"),
    ({"d": 2, "problem": "algebra_universality"}, "hamiltonians"),
    ({"d": 2, "problem": "group_universality", "gates": ["H"], "tolerances": {"x": 1}}, "unknown"),
    ({"d": 2, "problem": "group_universality", "gates": ["H"], "budgets": {"element_budget": -1}},
     "element_budget"),
])
def test_problem_errors(data, fragment):
    with pytest.raises(ProblemFileError, match=fragment):
        problem_from_dict(data)


def test_parse_error_reports_position():
    with pytest.raises(ProblemFileError, match="line 2"):
        parse_problem_text('{"d": 2,\n "problem": }')


def test_missing_file(tmp_path):
    with pytest.raises(ProblemFileError):
        parse_problem(tmp_path / "absent.json")


def test_no_normalize_rejects_non_special():
    with pytest.raises(ProblemFileError, match="special"):
        problem_from_dict({"d": 2, "problem": "group_universality", "gates": ["H"]}, normalize=False)


def test_hamiltonian_conversion():
    z = np.diag([1.0, -1.0]).astype(complex)
    pf = problem_from_dict({"d": 2, "problem": "algebra_universality",
                            "hamiltonians": [matrix_to_json(z), matrix_to_json(1j * z + 1j * np.eye(2))]})
    assert np.allclose(pf.hamiltonians[0], 1j * z)
    assert np.allclose(pf.hamiltonians[1], 1j * z)
    with pytest.raises(ProblemFileError, match="traceless"):
        problem_from_dict({"d": 2, "problem": "algebra_universality",
                           "hamiltonians": [matrix_to_json(1j * np.eye(2))]}, normalize=False)
    with pytest.raises(ProblemFileError, match="hermitian"):
        problem_from_dict({"d": 2, "problem": "algebra_universality",
                           "hamiltonians": [matrix_to_json(np.array([[0, 1], [0, 0]]))]})


def test_subgroup_gates_synthesized():
    x = 1j * np.array([[0, 1], [1, 0]]) * 0.4
    pf = problem_from_dict({"d": 2, "problem": "subgroup_universality",
                            "hamiltonians": [matrix_to_json(x)]})
    assert len(pf.gates) == 1
    assert np.allclose(pf.gates[0], mat_exp(x))
    assert len(pf.Y) == 1


def test_round_trip():
    pf = problem_from_dict({
        "d": 2, "problem": "group_membership",
        "gates": ["H", matrix_to_json(H_SU)],
        "hamiltonians": [matrix_to_json(1j * np.diag([0.3, -0.3]))],
        "Y": [matrix_to_json(np.array([[0, 0.2], [-0.2, 0]], dtype=complex))],
        "budgets": {"max_word_length": 7, "element_budget": 99},
        "tolerances": {"dedup_tol": 1e-7},
    })
    again = parse_problem_text(serialize_problem(pf))
    assert pf.equals(again)
    assert again.tolerances.dedup_tol == 1e-7 and again.max_word_length == 7
