"""Realification of su(d): an orthonormal basis, coordinates, and the ad/Ad
matrices every criterion is computed from.

The inner product is <x, y> = -tr(xy). On su(d) it is a positive multiple of
minus the Killing form, so orthogonal complements and projectors coincide
with the Killing-form ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matrix_core import as_matrix, dagger, is_unitary


def gell_mann_basis(d: int) -> np.ndarray:
    """Generalized Gell-Mann matrices (hermitian, tr(l_a l_b) = 2 delta_ab).

    Order: symmetric off-diagonal pairs, antisymmetric pairs, diagonal family.
    """
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1
            mats.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.sqrt(2 / (l * (l + 1))) * np.diag(diag))
    return np.array(mats)


@dataclass(frozen=True, eq=False)
class SuStructure:
    d: int
    basis: np.ndarray  # (n, d, d), traceless skew-hermitian, orthonormal

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    def to_coords(self, x) -> np.ndarray:
        """Coordinates of one matrix (d, d) or a stack (m, d, d)."""
        x = np.asarray(x, dtype=complex)
        single = x.ndim == 2
        xs = x.reshape(-1, self.d, self.d)
        if xs.shape[1:] != (self.d, self.d):
            raise ValueError(f"expected {self.d}x{self.d} matrices")
        # <b_j, x> = -tr(b_j x) = -sum(b_j * x^T)
        flat_b = self.basis.reshape(self.n, -1)
        flat_xt = np.swapaxes(xs, -1, -2).reshape(xs.shape[0], -1)
        coords = -(flat_xt @ flat_b.T).real
        return coords[0] if single else coords

    def from_coords(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        return np.tensordot(c, self.basis, axes=([-1], [0]))

    def bracket(self, x, y) -> np.ndarray:
        a, b = self.from_coords(x), self.from_coords(y)
        return self.to_coords(a @ b - b @ a)

    def structure_constants(self) -> np.ndarray:
        """f[i, j, k] = <b_k, [b_i, b_j]>."""
        b = self.basis
        comm = np.einsum("iab,jbc->ijac", b, b) - np.einsum("jab,ibc->ijac", b, b)
        return self.to_coords(comm.reshape(-1, self.d, self.d)).reshape(self.n, self.n, self.n)


def build_su_structure(d: int) -> SuStructure:
    if int(d) != d or d < 2:
        raise ValueError(f"su(d) needs an integer d >= 2, got {d!r}")
    return _cached_structure(int(d))


@lru_cache(maxsize=None)
def _cached_structure(d: int) -> SuStructure:
    basis = 1j * gell_mann_basis(d) / np.sqrt(2)
    basis.setflags(write=False)
    return SuStructure(d, basis)


def inner_product(x, y) -> float:
    """<x, y> on coordinate vectors (the basis is orthonormal)."""
    return float(np.dot(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))


def trace_form(a, b) -> float:
    """-tr(ab) on matrices."""
    return float(-np.trace(as_matrix(a) @ as_matrix(b)).real)


def ad_matrix(x, structure: SuStructure) -> np.ndarray:
    """Matrix of ad_x = [x, .] in coordinates; column j holds [x, b_j]."""
    xm = structure.from_coords(x)
    b = structure.basis
    comm = xm @ b - b @ xm
    return structure.to_coords(comm).T


def Ad_matrix(g, structure: SuStructure, tol: float = 1e-8) -> np.ndarray:
    """Matrix of Ad_g = g(.)g^-1 in coordinates; column j holds g b_j g^-1."""
    g = as_matrix(g)
    if g.shape != (structure.d, structure.d):
        raise ValueError("gate dimension does not match the structure")
    if not is_unitary(g, tol):
        raise ValueError("Ad_matrix needs a unitary matrix")
    conj = g @ structure.basis @ dagger(g)
    return structure.to_coords(conj).T


def killing_form(x, y, structure: SuStructure) -> float:
    """tr(ad_x ad_y), computed from the ad matrices."""
    return float(np.trace(ad_matrix(x, structure) @ ad_matrix(y, structure)))
