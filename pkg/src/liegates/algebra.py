"""Subalgebras of su(d): generation, centralizers, commutants, projectors and
the algebra-level universality and membership deciders.

Elements of su(d) are coordinate vectors in the basis of a SuStructure; sets
of elements are 2-D arrays with one element per row.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from .matrix_core import DEFAULT_TOL, RealSubspace, Tolerances, real_null_space
from .su_structure import SuStructure, ad_matrix


class Answer(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


class HypothesisError(ValueError):
    """A theorem hypothesis (simplicity, inclusion) does not hold for the input."""


def as_elements(xs, structure: SuStructure) -> np.ndarray:
    """Rows of coordinates; accepts coordinate vectors or (d, d) matrices."""
    arr = np.asarray(xs)
    if arr.size == 0:
        return np.zeros((0, structure.n))
    if arr.ndim == 3 or (arr.ndim == 2 and arr.shape == (structure.d, structure.d)
                         and np.iscomplexobj(arr)):
        return np.atleast_2d(structure.to_coords(arr))
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    if arr.shape[1] != structure.n:
        raise ValueError(f"expected coordinate vectors of length {structure.n}")
    return arr


def ad_stack(xs, structure: SuStructure) -> list[np.ndarray]:
    return [ad_matrix(x, structure) for x in as_elements(xs, structure)]


def _brackets(vectors: np.ndarray, structure: SuStructure) -> np.ndarray:
    """All [v_i, v_j], i < j, as rows."""
    mats = structure.from_coords(vectors)
    out = []
    for i in range(len(mats)):
        rest = mats[i + 1:]
        if len(rest):
            out.append(structure.to_coords(mats[i] @ rest - rest @ mats[i]))
    if not out:
        return np.zeros((0, structure.n))
    return np.vstack(out)


def generate_subalgebra(xs, structure: SuStructure, tol: Tolerances = DEFAULT_TOL,
                        scale: float = 0.0) -> RealSubspace:
    """Fixed point of W_{i+1} = W_i + [W_i, W_i] starting from span(xs).

    ``scale`` sets an absolute floor for the rank decision on xs.
    """
    x = as_elements(xs, structure)
    w = RealSubspace.span(x, structure.n, tol, scale)
    while True:
        grown = RealSubspace.span(
            np.vstack([w.vectors(), _brackets(w.vectors(), structure)]), structure.n, tol)
        if grown.dim == w.dim:
            return w
        w = grown


def centralizer_in(g: RealSubspace, xs, structure: SuStructure,
                   tol: Tolerances = DEFAULT_TOL) -> RealSubspace:
    """Elements of ``g`` commuting with every element of ``xs``."""
    x = as_elements(xs, structure)
    if len(x) == 0 or g.dim == 0:
        return g
    rows = np.vstack([ad_matrix(y, structure) @ g.basis for y in x])
    coeffs = real_null_space(rows, tol)
    return RealSubspace(g.basis @ coeffs.basis)


def commutant_of_operators(ops, n: int | None = None,
                           tol: Tolerances = DEFAULT_TOL) -> RealSubspace:
    """Operators A (row-major vectorised in R^{n^2}) with AM = MA for all M in ops."""
    ops = [np.asarray(m, dtype=float) for m in ops]
    if n is None:
        if not ops:
            raise ValueError("need n when no operators are given")
        n = ops[0].shape[0]
    if not ops:
        return RealSubspace.full(n * n)
    eye = np.eye(n)
    # vec(AM - MA) = (I kron M^T - M kron I) vec(A)
    rows = np.vstack([np.kron(eye, m.T) - np.kron(m, eye) for m in ops])
    return real_null_space(rows, tol)


def commutant_dim_ad(xs, structure: SuStructure, tol: Tolerances = DEFAULT_TOL) -> int:
    return commutant_of_operators(ad_stack(xs, structure), structure.n, tol).dim


def full_algebra(structure: SuStructure) -> np.ndarray:
    return np.eye(structure.n)


def derived_algebra(g: RealSubspace, structure: SuStructure,
                    tol: Tolerances = DEFAULT_TOL) -> RealSubspace:
    """[g, g] for a bracket-closed subspace g."""
    brackets = _brackets(g.vectors(), structure)
    if len(brackets) == 0:
        return RealSubspace.zero(structure.n)
    scale = max(1.0, float(np.max(np.linalg.norm(brackets, axis=1))))
    resid = brackets - brackets @ g.basis @ g.basis.T
    if float(np.max(np.linalg.norm(resid, axis=1))) > 1e3 * tol.rank_tol * scale:
        raise ValueError("subspace is not closed under the bracket")
    return RealSubspace.span(brackets, structure.n, tol)


def projector_PX(xs, structure: SuStructure, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Projector with image C(xs) and kernel k' intersected with C(xs)^perp."""
    image = centralizer_in(RealSubspace.full(structure.n), xs, structure, tol)
    kernel = _projector_kernel(image, structure, tol)
    if image.dim + kernel.dim != structure.n:
        raise ArithmeticError("centralizer and its complement do not decompose the algebra")
    frame = np.hstack([image.basis, kernel.basis])
    sel = np.diag(np.r_[np.ones(image.dim), np.zeros(kernel.dim)])
    return frame @ sel @ np.linalg.inv(frame)


def _projector_kernel(image: RealSubspace, structure: SuStructure, tol: Tolerances) -> RealSubspace:
    derived = _derived_of_full(structure, tol)
    return derived.intersect(image.orthogonal_complement(tol), tol)


@lru_cache(maxsize=32)
def _derived_of_full(structure: SuStructure, tol: Tolerances) -> RealSubspace:
    return derived_algebra(RealSubspace.full(structure.n), structure, tol)


def decomposition_dims(xs, structure: SuStructure, tol: Tolerances = DEFAULT_TOL) -> tuple[int, int]:
    """(dim C(xs), dim k' cap C(xs)^perp)."""
    image = centralizer_in(RealSubspace.full(structure.n), xs, structure, tol)
    return image.dim, _projector_kernel(image, structure, tol).dim


def split_center_derived(xs, structure: SuStructure,
                         tol: Tolerances = DEFAULT_TOL) -> tuple[RealSubspace, RealSubspace]:
    """(center, derived algebra) of <xs> without generating <xs> first."""
    x = as_elements(xs, structure)
    if len(x) == 0:
        raise ValueError("need at least one element")
    p = projector_PX(x, structure, tol)
    scale = _scale(x)
    center = RealSubspace.span(x @ p.T, structure.n, tol, scale)
    derived = generate_subalgebra(x @ (np.eye(structure.n) - p).T, structure, tol, scale)
    return center, derived


def restricted_ad(g: RealSubspace, structure: SuStructure) -> list[np.ndarray]:
    """ad of each basis vector of g, written in g's own basis."""
    return [g.basis.T @ ad_matrix(v, structure) @ g.basis for v in g.vectors()]


def is_simple(g: RealSubspace, structure: SuStructure, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Perfect and with an absolutely irreducible adjoint action."""
    if g.dim == 0:
        return False
    if derived_algebra(g, structure, tol).dim != g.dim:
        return False
    return commutant_of_operators(restricted_ad(g, structure), g.dim, tol).dim == 1


@dataclass(frozen=True)
class DimCondition:
    lhs_dim: int
    rhs_dim: int

    @property
    def equal(self) -> bool:
        return self.lhs_dim == self.rhs_dim

    def as_dict(self) -> dict:
        return {"status": "Equal" if self.equal else "Unequal",
                "lhs_dim": self.lhs_dim, "rhs_dim": self.rhs_dim}


@dataclass(frozen=True)
class AlgebraVerdict:
    answer: Answer
    condition_commutant: DimCondition
    condition_dimension: DimCondition
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "answer": self.answer.value,
            "condition_commutant": self.condition_commutant.as_dict(),
            "condition_dimension": self.condition_dimension.as_dict(),
            "witnesses": [np.asarray(w).tolist() for w in self.witnesses],
            **self.extra,
        }


def _commutant_witness(small: RealSubspace, large: RealSubspace) -> np.ndarray | None:
    """A vector of ``large`` orthogonal to ``small`` (small is contained in large)."""
    if large.dim <= small.dim:
        return None
    rest = large.basis - small.basis @ (small.basis.T @ large.basis)
    u, s, _ = np.linalg.svd(rest, full_matrices=False)
    return u[:, 0]


def _scale(x: np.ndarray) -> float:
    return float(np.linalg.norm(x, 2)) if x.size else 0.0


def _span_dim(vectors: np.ndarray, structure: SuStructure, tol: Tolerances, scale: float) -> int:
    return RealSubspace.span(vectors, structure.n, tol, scale).dim


def decide_algebra_universality(xs, structure: SuStructure,
                                tol: Tolerances = DEFAULT_TOL) -> AlgebraVerdict:
    """Does <xs> equal su(d)?  Decided without generating <xs>."""
    x = as_elements(xs, structure)
    if len(x) == 0:
        raise ValueError("need at least one Hamiltonian")
    n = structure.n
    k = full_algebra(structure)
    c_x = commutant_of_operators(ad_stack(x, structure), n, tol)
    c_k = commutant_of_operators(ad_stack(k, structure), n, tol)
    p_k = projector_PX(k, structure, tol)
    center_k = centralizer_in(RealSubspace.full(n), k, structure, tol)
    commutant = DimCondition(c_x.dim, c_k.dim)
    dimension = DimCondition(_span_dim(x @ p_k.T, structure, tol, _scale(x)), center_k.dim)
    witnesses = []
    w = _commutant_witness(c_k, c_x)
    if w is not None:
        witnesses.append(w.reshape(n, n))
    answer = Answer.YES if commutant.equal and dimension.equal else Answer.NO
    return AlgebraVerdict(answer, commutant, dimension, witnesses)


def decide_algebra_membership(x1s, ys, structure: SuStructure, variant: str = "P_X1",
                              tol: Tolerances = DEFAULT_TOL) -> AlgebraVerdict:
    """Is every element of ``ys`` inside <x1s>?  Decided without generating either algebra."""
    if variant not in ("P_X1", "P_X2"):
        raise ValueError("variant must be 'P_X1' or 'P_X2'")
    x1 = as_elements(x1s, structure)
    if len(x1) == 0:
        raise ValueError("X1 must be nonempty")
    y = as_elements(ys, structure)
    x2 = np.vstack([x1, y])
    n = structure.n
    c1 = commutant_of_operators(ad_stack(x1, structure), n, tol)
    c2 = commutant_of_operators(ad_stack(x2, structure), n, tol)
    p = projector_PX(x1 if variant == "P_X1" else x2, structure, tol)
    commutant = DimCondition(c1.dim, c2.dim)
    dimension = DimCondition(_span_dim(x1 @ p.T, structure, tol, _scale(x2)),
                             _span_dim(x2 @ p.T, structure, tol, _scale(x2)))
    witnesses = []
    w = _commutant_witness(c2, c1)
    if w is not None:
        witnesses.append(w.reshape(n, n))
    answer = Answer.YES if commutant.equal and dimension.equal else Answer.NO
    return AlgebraVerdict(answer, commutant, dimension, witnesses, {"variant": variant})
