"""Word closures of finite gate sets in SU(d) and the group-level deciders.

The deciders compare commutants of the adjoint action and then search the
explored words for an element of the ball B_K around the center of SU(d)
that certifies an infinite closure. The search length is a budget; when it
runs out before a certificate appears the verdict is Inconclusive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import (
    Answer,
    HypothesisError,
    as_elements,
    commutant_of_operators,
    ad_stack,
    decide_algebra_membership,
    generate_subalgebra,
    is_simple,
)
from .matrix_core import (
    DEFAULT_TOL,
    RealSubspace,
    Tolerances,
    as_matrix,
    dagger,
    is_special_unitary,
    mat_exp,
)
from .su_structure import Ad_matrix, SuStructure, build_su_structure

BALL_RADIUS = 1 / math.sqrt(2)
DEFAULT_MAX_LEN = 16
DEFAULT_BUDGET = 200_000


def _as_gates(gates, tol: float = 1e-8) -> np.ndarray:
    mats = [as_matrix(g) for g in gates]
    if not mats:
        raise ValueError("need at least one gate")
    d = len(mats[0])
    for i, g in enumerate(mats):
        if g.shape != (d, d):
            raise ValueError(f"gate {i} has shape {g.shape}, expected {(d, d)}")
        if not is_special_unitary(g, tol):
            raise ValueError(f"gate {i} is not special unitary within {tol:g}")
    return np.array(mats)


def center_distances(gs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distance of each matrix in a stack to the center {w^k I} of SU(d), and the argmin k.

    Uses |g - w^k I|^2 = |g|^2 + d - 2 Re(w^-k tr g).
    """
    gs = np.asarray(gs)
    d = gs.shape[-1]
    tr = np.trace(gs, axis1=-2, axis2=-1)
    norm2 = np.sum(np.abs(gs) ** 2, axis=(-2, -1))
    roots = np.exp(-2j * np.pi * np.arange(d) / d)
    overlap = (tr[..., None] * roots).real
    k = np.argmax(overlap, axis=-1)
    dist2 = norm2 + d - 2 * np.take_along_axis(overlap, k[..., None], -1)[..., 0]
    return np.sqrt(np.maximum(dist2, 0.0)), k


def center_element(d: int, k: int) -> np.ndarray:
    return np.exp(2j * np.pi * k / d) * np.eye(d)


def center_distance(g) -> tuple[float, np.ndarray]:
    """min over c in the center of |g - c|, with the minimising c."""
    g = as_matrix(g)
    dist, k = center_distances(g[None])
    return float(dist[0]), center_element(len(g), int(k[0]))


def is_in_ball(g) -> bool:
    return center_distance(g)[0] < BALL_RADIUS


def xy_matrices(g) -> tuple[np.ndarray, np.ndarray]:
    g = as_matrix(g)
    d = len(g)
    ginv = dagger(g)
    x = (g - ginv) / 2
    y = (g + ginv) / 2j
    eye = np.eye(d)
    return x - np.trace(x) * eye / d, y - np.trace(y) * eye / d


def xy_parts(g, structure: SuStructure | None = None,
             tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of x(g) = (g - g^-1)/2 and y(g) = (g + g^-1)/2i, trace parts removed."""
    g = as_matrix(g)
    if not is_special_unitary(g, tol):
        raise ValueError("xy_parts needs a special unitary matrix")
    structure = structure or build_su_structure(len(g))
    x, y = xy_matrices(g)
    return structure.to_coords(x), structure.to_coords(y)


class _DedupStore:
    """Near-duplicate lookup keyed by a 2-D random projection of the entries.

    The projection is 1-Lipschitz per axis, so any element within ``tol`` of
    a query sits in one of the 9 neighbouring cells; candidates are confirmed
    with an exact Frobenius distance.
    """

    def __init__(self, d: int, tol: float):
        rng = np.random.default_rng(20240601)
        dirs = rng.normal(size=(2, 2 * d * d))
        self._dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        self._tol = tol
        self._cells: dict[tuple[int, int], list[int]] = {}
        self._items: list[np.ndarray] = []

    def keys(self, gs: np.ndarray) -> np.ndarray:
        flat = gs.reshape(len(gs), -1)
        real = np.hstack([flat.real, flat.imag])
        return np.floor(real @ self._dirs.T / self._tol).astype(np.int64)

    def find(self, g: np.ndarray, key) -> Optional[int]:
        kx, ky = int(key[0]), int(key[1])
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self._cells.get((kx + dx, ky + dy), ()):
                    if np.sqrt(np.sum(np.abs(self._items[idx] - g) ** 2)) < self._tol:
                        return idx
        return None

    def add(self, g: np.ndarray, key) -> int:
        idx = len(self._items)
        self._items.append(g)
        self._cells.setdefault((int(key[0]), int(key[1])), []).append(idx)
        return idx


@dataclass
class WordClosure:
    d: int
    elements: np.ndarray          # (N, d, d)
    words: list                   # tuple of gate indices per element
    lengths: list
    max_len_reached: int
    is_finite: bool
    element_budget: int
    ball_elements: list           # indices into elements
    stop_reason: str              # "fixed_point", "max_len", "budget", "witness"

    @property
    def size(self) -> int:
        return len(self.elements)

    def budget_report(self) -> dict:
        return {
            "max_len_reached": self.max_len_reached,
            "elements_explored": self.size,
            "element_budget": self.element_budget,
            "is_finite": self.is_finite,
            "stop_reason": self.stop_reason,
        }


def bfs_words(gates: Sequence, max_len: int = DEFAULT_MAX_LEN, budget: int = DEFAULT_BUDGET,
              tol: Tolerances = DEFAULT_TOL,
              stop: Callable[[np.ndarray, int], bool] | None = None) -> WordClosure:
    """Breadth-first products g_1 ... g_n of the gates, deduplicated up to ``tol.dedup_tol``.

    Words are extended on the right, so each round is generated in
    lexicographic word order. ``stop(element, index)`` is called on every
    new element and ends the search early when it returns True.
    """
    gs = _as_gates(gates)
    d = gs.shape[1]
    if max_len < 0 or budget < 1:
        raise ValueError("max_len must be >= 0 and budget >= 1")
    store = _DedupStore(d, tol.dedup_tol)
    elements: list[np.ndarray] = []
    words: list[tuple] = []
    lengths: list[int] = []

    def insert(g, key, word) -> bool:
        if store.find(g, key) is not None:
            return False
        store.add(g, key)
        elements.append(g)
        words.append(word)
        lengths.append(len(word))
        return True

    eye = np.eye(d, dtype=complex)
    insert(eye, store.keys(eye[None])[0], ())
    frontier = [0]
    length = 0
    reason = "max_len"
    is_finite = False
    if stop is not None and stop(eye, 0):
        reason = "witness"
        frontier = []
    while frontier:
        if length >= max_len:
            reason = "max_len"
            break
        length += 1
        front = np.array([elements[i] for i in frontier])
        prods = (front[:, None] @ gs[None]).reshape(-1, d, d)
        keys = store.keys(prods)
        new_frontier = []
        halted = None
        for j, g in enumerate(prods):
            parent, gate = divmod(j, len(gs))
            if insert(g, keys[j], words[frontier[parent]] + (gate,)):
                idx = len(elements) - 1
                new_frontier.append(idx)
                if stop is not None and stop(g, idx):
                    halted = "witness"
                    break
                if len(elements) >= budget:
                    halted = "budget"
                    break
        if halted:
            reason = halted
            break
        if not new_frontier:
            is_finite = True
            reason = "fixed_point"
            break
        frontier = new_frontier
    arr = np.array(elements)
    dist, _ = center_distances(arr)
    ball = [int(i) for i in np.nonzero(dist < BALL_RADIUS)[0]]
    return WordClosure(d, arr, words, lengths, max(lengths), is_finite, budget, ball, reason)


def space_a(closure: WordClosure, structure: SuStructure | None = None,
            tol: Tolerances = DEFAULT_TOL) -> RealSubspace:
    """Real span of x(g), y(g) over the explored elements lying in the ball."""
    structure = structure or build_su_structure(closure.d)
    if not closure.ball_elements:
        return RealSubspace.zero(structure.n)
    vecs = []
    for i in closure.ball_elements:
        x, y = xy_matrices(closure.elements[i])
        vecs.append(structure.to_coords(x))
        vecs.append(structure.to_coords(y))
    return RealSubspace.span(np.array(vecs), structure.n, tol)


def commutant_dim_Ad(gates, structure: SuStructure, tol: Tolerances = DEFAULT_TOL) -> int:
    ops = [Ad_matrix(g, structure) for g in gates]
    return commutant_of_operators(ops, structure.n, tol).dim


@dataclass
class Witness:
    element: np.ndarray
    word: tuple
    reason: str  # "BallNonCenter" or "BallNonCommuting"
    center_distance: float
    detail: dict = field(default_factory=dict)

    def as_dict(self, gate_names: Sequence[str] | None = None) -> dict:
        out = {
            "reason": self.reason,
            "word": list(self.word),
            "word_length": len(self.word),
            "center_distance": self.center_distance,
            "element": [[[z.real, z.imag] for z in row] for row in self.element],
            **self.detail,
        }
        if gate_names is not None:
            out["word_names"] = [gate_names[i] for i in self.word]
        return out


@dataclass
class GroupVerdict:
    answer: Answer
    commutant_check: dict
    witness: Optional[Witness] = None
    budget_report: dict = field(default_factory=dict)
    diagram: Optional["DiagramCase"] = None
    note: str = ""
    finite_closure: Optional[WordClosure] = None

    def as_dict(self, gate_names: Sequence[str] | None = None) -> dict:
        return {
            "answer": self.answer.value,
            "commutant_check": self.commutant_check,
            "witness": None if self.witness is None else self.witness.as_dict(gate_names),
            "budget": self.budget_report,
            "diagram": None if self.diagram is None else self.diagram.as_dict(),
            "note": self.note,
        }


def _dim_check(lhs: int, rhs: int, lhs_name: str, rhs_name: str) -> dict:
    return {"status": "Equal" if lhs == rhs else "Unequal",
            lhs_name: lhs, rhs_name: rhs}


def _non_center_stop(tol: Tolerances):
    found = {}

    def stop(g, idx):
        dist, _ = center_distances(g[None])
        if tol.dedup_tol <= dist[0] < BALL_RADIUS:
            found["idx"] = idx
            found["dist"] = float(dist[0])
            return True
        return False

    return stop, found


def _non_commuting_stop(xs_mats: np.ndarray, tol: Tolerances):
    found = {}

    def stop(g, idx):
        dist, _ = center_distances(g[None])
        if not dist[0] < BALL_RADIUS:
            return False
        moved = g @ xs_mats @ dagger(g) - xs_mats
        norms = np.sqrt(np.sum(np.abs(moved) ** 2, axis=(1, 2)))
        j = int(np.argmax(norms))
        if norms[j] >= tol.commute_tol:
            found.update(idx=idx, dist=float(dist[0]), generator=j, displacement=float(norms[j]))
            return True
        return False

    return stop, found


def decide_group_universality(gates, max_len: int = DEFAULT_MAX_LEN,
                              budget: int = DEFAULT_BUDGET,
                              tol: Tolerances = DEFAULT_TOL) -> GroupVerdict:
    """Is the closure of the words over ``gates`` all of SU(d)?"""
    gs = _as_gates(gates)
    structure = build_su_structure(gs.shape[1])
    dim_s = commutant_dim_Ad(gs, structure, tol)
    dim_k = commutant_of_operators(ad_stack(np.eye(structure.n), structure), structure.n, tol).dim
    check = _dim_check(dim_s, dim_k, "dim_C_Ad_S", "dim_C_ad_k")
    if dim_s != dim_k:
        return GroupVerdict(Answer.NO, check, note="adjoint commutant is larger than the scalars")
    stop, found = _non_center_stop(tol)
    closure = bfs_words(gs, max_len, budget, tol, stop)
    if "idx" in found:
        i = found["idx"]
        w = Witness(closure.elements[i], closure.words[i], "BallNonCenter", found["dist"])
        return GroupVerdict(Answer.YES, check, w, closure.budget_report(),
                            note="non-central word inside the ball")
    if closure.is_finite:
        return GroupVerdict(Answer.NO, check, None, closure.budget_report(),
                            note="closure is finite and its ball elements are central",
                            finite_closure=closure)
    return GroupVerdict(Answer.INCONCLUSIVE, check, None, closure.budget_report(),
                        note="no ball witness within the word-length/element budget")


def _ball_commuting_search(gates: np.ndarray, xs_coords: np.ndarray, structure: SuStructure,
                           max_len: int, budget: int, tol: Tolerances):
    xs_mats = structure.from_coords(xs_coords)
    stop, found = _non_commuting_stop(xs_mats, tol)
    closure = bfs_words(gates, max_len, budget, tol, stop)
    witness = None
    if "idx" in found:
        i = found["idx"]
        witness = Witness(closure.elements[i], closure.words[i], "BallNonCommuting", found["dist"],
                          {"generator_index": found["generator"],
                           "displacement": found["displacement"]})
    return closure, witness


def exp_elements(xs_coords: np.ndarray, structure: SuStructure) -> np.ndarray:
    return np.array([mat_exp(m) for m in structure.from_coords(xs_coords)])


def _require_simple(xs_coords, structure, tol, what) -> RealSubspace:
    g = generate_subalgebra(xs_coords, structure, tol)
    if not is_simple(g, structure, tol):
        raise HypothesisError(f"{what} (dimension {g.dim}) is not simple")
    return g


def decide_subgroup_universality(xs, ys, d: int | None = None,
                                 max_len: int = DEFAULT_MAX_LEN, budget: int = DEFAULT_BUDGET,
                                 tol: Tolerances = DEFAULT_TOL) -> GroupVerdict:
    """Does exp(ys) generate a dense subgroup of the connected group with algebra <xs>?"""
    structure = _structure_for(xs, d)
    x = as_elements(xs, structure)
    y = as_elements(ys, structure)
    if len(x) == 0 or len(y) == 0:
        raise ValueError("X and Y must be nonempty")
    member = decide_algebra_membership(x, y, structure, tol=tol)
    if member.answer is not Answer.YES:
        raise HypothesisError("Y is not contained in the algebra generated by X")
    _require_simple(x, structure, tol, "the algebra generated by X")
    gates = exp_elements(y, structure)
    dim_s = commutant_dim_Ad(gates, structure, tol)
    dim_x = commutant_of_operators(ad_stack(x, structure), structure.n, tol).dim
    check = _dim_check(dim_s, dim_x, "dim_C_Ad_S", "dim_C_ad_X")
    if dim_s != dim_x:
        return GroupVerdict(Answer.NO, check, note="adjoint commutants differ")
    closure, witness = _ball_commuting_search(gates, x, structure, max_len, budget, tol)
    if witness is not None:
        return GroupVerdict(Answer.YES, check, witness, closure.budget_report(),
                            note="ball element not commuting with X")
    if closure.is_finite:
        return GroupVerdict(Answer.NO, check, None, closure.budget_report(),
                            note="closure is finite and its ball elements commute with X",
                            finite_closure=closure)
    return GroupVerdict(Answer.INCONCLUSIVE, check, None, closure.budget_report(),
                        note="no ball witness within the word-length/element budget")


def _structure_for(xs, d: int | None) -> SuStructure:
    if d is not None:
        return build_su_structure(d)
    arr = np.asarray(xs)
    if arr.ndim == 3:
        return build_su_structure(arr.shape[-1])
    if arr.ndim >= 1 and arr.shape[-1] > 0:
        n = arr.shape[-1]
        dd = int(round(math.sqrt(n + 1)))
        if dd * dd - 1 == n:
            return build_su_structure(dd)
    raise ValueError("cannot infer d; pass it explicitly")


# Edge statuses
EQUAL = "Equal"
UNEQUAL = "Unequal"
PROPER = "ProperInclusion"

# (top, bottom, left, right) -> case name; top is Equal in all five diagrams
_DIAGRAMS = {
    (EQUAL, EQUAL, EQUAL, EQUAL): ("decidable-1", True),
    (EQUAL, UNEQUAL, PROPER, EQUAL): ("decidable-2", True),
    (EQUAL, EQUAL, PROPER, PROPER): ("undecidable-1", False),
    (EQUAL, UNEQUAL, EQUAL, PROPER): ("undecidable-2", False),
    (EQUAL, UNEQUAL, PROPER, PROPER): ("undecidable-3", False),
}


@dataclass(frozen=True)
class DiagramCase:
    """Inclusion pattern of C(Ad_S1), C(Ad_S2), C(ad_X1), C(ad_X2).

    top: C(Ad_S1) vs C(Ad_S2); bottom: C(ad_X1) vs C(ad_X2);
    left: C(Ad_S1) vs C(ad_X1); right: C(Ad_S2) vs C(ad_X2).
    Every inclusion holds structurally, so equality is decided by dimension.
    """

    top: str
    bottom: str
    left: str
    right: str
    dims: dict

    @property
    def case(self) -> str:
        if self.top == UNEQUAL:
            return "necessary-condition-fails"
        return _DIAGRAMS.get((self.top, self.bottom, self.left, self.right), ("inconsistent", False))[0]

    @property
    def decidable(self) -> bool:
        if self.top == UNEQUAL:
            return True
        return _DIAGRAMS.get((self.top, self.bottom, self.left, self.right), ("", False))[1]

    def as_dict(self) -> dict:
        return {"top": self.top, "bottom": self.bottom, "left": self.left, "right": self.right,
                "case": self.case, "decidable": self.decidable, "dims": dict(self.dims)}


def _membership_dims(x1: np.ndarray, y: np.ndarray, structure: SuStructure, tol: Tolerances):
    s1 = exp_elements(x1, structure)
    t = exp_elements(y, structure) if len(y) else np.zeros((0, structure.d, structure.d))
    s2 = np.concatenate([s1, t])
    x2 = np.vstack([x1, y])
    dims = {
        "C_Ad_S1": commutant_dim_Ad(s1, structure, tol),
        "C_Ad_S2": commutant_dim_Ad(s2, structure, tol),
        "C_ad_X1": commutant_of_operators(ad_stack(x1, structure), structure.n, tol).dim,
        "C_ad_X2": commutant_of_operators(ad_stack(x2, structure), structure.n, tol).dim,
    }
    return s1, s2, x2, dims


def classify_diagram(x1s, ys, d: int | None = None, tol: Tolerances = DEFAULT_TOL) -> DiagramCase:
    structure = _structure_for(x1s, d)
    x1 = as_elements(x1s, structure)
    if len(x1) == 0:
        raise ValueError("X1 must be nonempty")
    y = as_elements(ys, structure)
    _, _, _, dims = _membership_dims(x1, y, structure, tol)
    return _diagram_from_dims(dims)


def _diagram_from_dims(dims: dict) -> DiagramCase:
    top = EQUAL if dims["C_Ad_S1"] == dims["C_Ad_S2"] else UNEQUAL
    bottom = EQUAL if dims["C_ad_X1"] == dims["C_ad_X2"] else UNEQUAL
    left = EQUAL if dims["C_Ad_S1"] == dims["C_ad_X1"] else PROPER
    right = EQUAL if dims["C_Ad_S2"] == dims["C_ad_X2"] else PROPER
    return DiagramCase(top, bottom, left, right, dims)


def decide_group_membership(x1s, ys, d: int | None = None,
                            max_len: int = DEFAULT_MAX_LEN, budget: int = DEFAULT_BUDGET,
                            tol: Tolerances = DEFAULT_TOL) -> GroupVerdict:
    """Do the gates exp(ys) lie in the closure of the words over exp(x1s)?"""
    structure = _structure_for(x1s, d)
    x1 = as_elements(x1s, structure)
    if len(x1) == 0:
        raise ValueError("X1 must be nonempty")
    y = as_elements(ys, structure)
    if len(y) == 0:
        return GroupVerdict(Answer.YES, {"status": "Equal"}, note="T is empty, so S2 = S1")
    s1, _, x2, dims = _membership_dims(x1, y, structure, tol)
    _require_simple(x2, structure, tol, "the algebra generated by X1 and Y")
    diagram = _diagram_from_dims(dims)
    check = _dim_check(dims["C_Ad_S1"], dims["C_Ad_S2"], "dim_C_Ad_S1", "dim_C_Ad_S2")
    if diagram.top == UNEQUAL:
        return GroupVerdict(Answer.NO, check, diagram=diagram,
                            note="necessary condition fails: C(Ad_S1) != C(Ad_S2)")
    if not diagram.decidable:
        return GroupVerdict(Answer.INCONCLUSIVE, check, diagram=diagram,
                            note="inclusion diagram is outside the decidable cases")
    if diagram.case == "decidable-2":
        _require_simple(x1, structure, tol, "the algebra generated by X1")
    closure, witness = _ball_commuting_search(s1, x1, structure, max_len, budget, tol)
    if witness is None:
        note = ("closure of S1 is finite and its ball elements commute with X1"
                if closure.is_finite else "no ball witness within the word-length/element budget")
        return GroupVerdict(Answer.INCONCLUSIVE, check, None, closure.budget_report(), diagram, note)
    if diagram.case == "decidable-1":
        return GroupVerdict(Answer.YES, check, witness, closure.budget_report(), diagram,
                            "H1 = G1 = G2 = H2")
    return GroupVerdict(Answer.NO, check, witness, closure.budget_report(), diagram,
                        "H1 is contained in G1, a proper subgroup of G2 = H2")
