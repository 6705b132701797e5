"""Problem files and the named-gate library.

A problem file is JSON::

    {
      "d": 2,
      "problem": "group_universality",
      "gates": ["H", "T", [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]],
      "hamiltonians": [...],
      "Y": [...],
      "budgets": {"max_word_length": 16, "element_budget": 200000},
      "tolerances": {"rank_tol": 1e-9, "dedup_tol": 1e-8, "commute_tol": 1e-8}
    }

Matrices are row-major arrays of rows of [re, im] pairs; named gates are
bare strings. Hamiltonians are elements of su(d) (traceless skew-hermitian);
hermitian input is accepted and multiplied by i.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .group import DEFAULT_BUDGET, DEFAULT_MAX_LEN
from .matrix_core import (
    Tolerances,
    frobenius_norm,
    is_skew_hermitian,
    is_unitary,
    mat_exp,
)

log = logging.getLogger(__name__)

PROBLEMS = (
    "algebra_universality",
    "algebra_membership",
    "group_universality",
    "subgroup_universality",
    "group_membership",
)

UNITARY_TOL = 1e-8


class ProblemFileError(ValueError):
    pass


def _qubit_gates() -> dict[str, np.ndarray]:
    s2 = math.sqrt(2)
    return {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        "H": np.array([[1, 1], [1, -1]], dtype=complex) / s2,
        "S": np.diag([1, 1j]).astype(complex),
        "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    }


def _two_qubit_gates() -> dict[str, np.ndarray]:
    cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    swap = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    return {
        "I": np.eye(4, dtype=complex),
        "CNOT": cnot,
        "CX": cnot,
        "CZ": np.diag([1, 1, 1, -1]).astype(complex),
        "SWAP": swap,
    }


def _qudit_gate(name: str, d: int) -> Optional[np.ndarray]:
    w = np.exp(2j * np.pi / d)
    if name == "I":
        return np.eye(d, dtype=complex)
    if name == "CLOCK":
        return np.diag(w ** np.arange(d))
    if name == "SHIFT":
        return np.roll(np.eye(d, dtype=complex), 1, axis=0)
    if name == "FOURIER":
        j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        return w ** (j * k) / math.sqrt(d)
    return None


def gate_names(d: int) -> list[str]:
    names = ["I", "CLOCK", "SHIFT", "FOURIER"]
    if d == 2:
        names += [k for k in _qubit_gates() if k not in names]
    if d == 4:
        names += [k for k in _two_qubit_gates() if k not in names]
    return names


def named_gate(name: str, d: int) -> np.ndarray:
    """Exact matrix of a library gate (not yet special-unitarized)."""
    key = name.upper()
    table = _qubit_gates() if d == 2 else _two_qubit_gates() if d == 4 else {}
    if key in table:
        return table[key].copy()
    g = _qudit_gate(key, d)
    if g is None:
        raise ProblemFileError(f"unknown gate {name!r} for d={d}")
    return g


def special_unitarize(u, tol: float = UNITARY_TOL) -> np.ndarray:
    """Rescale a unitary by exp(-i phi/d), det U = exp(i phi), so that det = 1."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise ValueError("special_unitarize needs a unitary matrix")
    det = np.linalg.det(u)
    if abs(det - 1) <= 1e-12:
        return u
    phi = np.angle(det)
    log.info("rescaled gate by global phase exp(%.6gi) to land in SU(%d)", -phi / len(u), len(u))
    return np.exp(-1j * phi / len(u)) * u


def matrix_from_json(data, d: int, where: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"{where}: matrix entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ProblemFileError(f"{where}: matrix entries must be [re, im] pairs")
    if arr.shape[:2] != (d, d):
        raise ProblemFileError(f"{where}: expected a {d}x{d} matrix, got {arr.shape[0]}x{arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ProblemFileError(f"{where}: non-finite entry")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


@dataclass
class ProblemFile:
    d: int
    problem: str
    gates: list = field(default_factory=list)         # SU(d) matrices
    gate_labels: list = field(default_factory=list)   # name or None per gate
    hamiltonians: list = field(default_factory=list)  # su(d) matrices
    Y: list = field(default_factory=list)             # su(d) matrices
    max_word_length: int = DEFAULT_MAX_LEN
    element_budget: int = DEFAULT_BUDGET
    tolerances: Tolerances = field(default_factory=Tolerances)

    def gate_names(self) -> list[str]:
        return [lab if lab is not None else f"g{i}" for i, lab in enumerate(self.gate_labels)]

    def to_dict(self) -> dict:
        gates = [lab if lab is not None else matrix_to_json(g)
                 for g, lab in zip(self.gates, self.gate_labels)]
        out = {"d": self.d, "problem": self.problem}
        if gates:
            out["gates"] = gates
        if self.hamiltonians:
            out["hamiltonians"] = [matrix_to_json(h) for h in self.hamiltonians]
        if self.Y:
            out["Y"] = [matrix_to_json(y) for y in self.Y]
        out["budgets"] = {"max_word_length": self.max_word_length,
                          "element_budget": self.element_budget}
        out["tolerances"] = self.tolerances.as_dict()
        return out

    def equals(self, other: "ProblemFile", atol: float = 1e-12) -> bool:
        def same(a, b):
            return len(a) == len(b) and all(np.allclose(x, y, atol=atol, rtol=0) for x, y in zip(a, b))
        return (self.d == other.d and self.problem == other.problem
                and self.gate_labels == other.gate_labels
                and same(self.gates, other.gates)
                and same(self.hamiltonians, other.hamiltonians)
                and same(self.Y, other.Y)
                and self.max_word_length == other.max_word_length
                and self.element_budget == other.element_budget
                and self.tolerances == other.tolerances)


def _to_su_element(m: np.ndarray, where: str, normalize: bool) -> np.ndarray:
    if not is_skew_hermitian(m, UNITARY_TOL):
        if frobenius_norm(m - m.conj().T) <= UNITARY_TOL:
            log.info("%s: hermitian Hamiltonian multiplied by i", where)
            m = 1j * m
        else:
            raise ProblemFileError(f"{where}: Hamiltonian is neither hermitian nor skew-hermitian")
    m = (m - m.conj().T) / 2
    tr = np.trace(m)
    if abs(tr) > UNITARY_TOL:
        if not normalize:
            raise ProblemFileError(f"{where}: Hamiltonian is not traceless")
        log.info("%s: removed trace part %.3g", where, abs(tr))
        m = m - tr * np.eye(len(m)) / len(m)
    return m


def _to_gate(entry, d: int, where: str, normalize: bool) -> tuple[np.ndarray, Optional[str]]:
    if isinstance(entry, str):
        m, label = named_gate(entry, d), entry
    else:
        m, label = matrix_from_json(entry, d, where), None
    if not is_unitary(m, UNITARY_TOL):
        raise ProblemFileError(f"{where}: matrix is not unitary within {UNITARY_TOL:g}")
    if abs(np.linalg.det(m) - 1) > 1e-10:
        if not normalize:
            raise ProblemFileError(f"{where}: gate is not special unitary (normalization disabled)")
        m = special_unitarize(m)
    return m, label


def _int_field(section: dict, key: str, default: int, where: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ProblemFileError(f"{where}.{key}: expected a nonnegative integer")
    return value


def problem_from_dict(data: dict, normalize: bool = True) -> ProblemFile:
    if not isinstance(data, dict):
        raise ProblemFileError("top level must be an object")
    d = data.get("d")
    if isinstance(d, bool) or not isinstance(d, int) or d < 2:
        raise ProblemFileError("d: expected an integer >= 2")
    problem = data.get("problem")
    if problem not in PROBLEMS:
        raise ProblemFileError(f"problem: expected one of {', '.join(PROBLEMS)}")
    for key in ("gates", "hamiltonians", "Y"):
        if key in data and not isinstance(data[key], list):
            raise ProblemFileError(f"{key}: expected a list")

    gates, labels = [], []
    for i, entry in enumerate(data.get("gates", [])):
        g, lab = _to_gate(entry, d, f"gates[{i}]", normalize)
        gates.append(g)
        labels.append(lab)
    hams = [_to_su_element(matrix_from_json(h, d, f"hamiltonians[{i}]"), f"hamiltonians[{i}]", normalize)
            for i, h in enumerate(data.get("hamiltonians", []))]
    ys = [_to_su_element(matrix_from_json(y, d, f"Y[{i}]"), f"Y[{i}]", normalize)
          for i, y in enumerate(data.get("Y", []))]

    budgets = data.get("budgets", {})
    if not isinstance(budgets, dict):
        raise ProblemFileError("budgets: expected an object")
    max_len = _int_field(budgets, "max_word_length", DEFAULT_MAX_LEN, "budgets")
    budget = _int_field(budgets, "element_budget", DEFAULT_BUDGET, "budgets")
    tol_section = data.get("tolerances", {})
    if not isinstance(tol_section, dict):
        raise ProblemFileError("tolerances: expected an object")
    unknown = set(tol_section) - {"rank_tol", "dedup_tol", "commute_tol"}
    if unknown:
        raise ProblemFileError(f"tolerances: unknown keys {sorted(unknown)}")
    try:
        tol = Tolerances(**{k: float(v) for k, v in tol_section.items()})
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"tolerances: {exc}") from exc

    if problem in ("subgroup_universality",) and not gates:
        source = ys if ys else hams
        if source:
            gates = [mat_exp(h) for h in source]
            labels = [None] * len(gates)
    if problem in ("subgroup_universality",) and not ys:
        ys = list(hams)

    pf = ProblemFile(d, problem, gates, labels, hams, ys, max_len, budget, tol)
    _check_required(pf)
    return pf


def _check_required(pf: ProblemFile) -> None:
    if pf.problem == "group_universality" and not pf.gates:
        raise ProblemFileError("gates: group_universality needs at least one gate")
    if pf.problem in ("algebra_universality", "algebra_membership", "subgroup_universality",
                      "group_membership") and not pf.hamiltonians:
        raise ProblemFileError(f"hamiltonians: {pf.problem} needs at least one Hamiltonian")


def parse_problem_text(text: str, normalize: bool = True) -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return problem_from_dict(data, normalize)


def parse_problem(path, normalize: bool = True) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"{path}: {exc.strerror or exc}") from exc
    return parse_problem_text(text, normalize)


def serialize_problem(pf: ProblemFile) -> str:
    return json.dumps(pf.to_dict(), indent=2)
