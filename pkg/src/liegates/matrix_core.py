"""Dense complex matrix helpers: exp/log of normal matrices, null spaces,
group commutators and the unitary inequalities used by the deciders.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

# eigenphases this close to -pi are snapped onto the closed end of the strip
_BRANCH_SNAP = 1e-12
# slack for strict inequalities evaluated in floating point
_STRICT_GUARD = 1e-12


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every decider."""

    rank_tol: float = 1e-9
    dedup_tol: float = 1e-8
    commute_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "dedup_tol", "commute_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.dedup_tol >= 1 / math.sqrt(2):
            raise ValueError("dedup_tol must be below 1/sqrt(2)")

    def as_dict(self) -> dict:
        return {"rank_tol": self.rank_tol, "dedup_tol": self.dedup_tol,
                "commute_tol": self.commute_tol}


DEFAULT_TOL = Tolerances()


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite square complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def frobenius_norm(a) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(a)) ** 2)))


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return frobenius_norm(a - b)


def is_unitary(a, tol: float = 1e-8) -> bool:
    a = as_matrix(a)
    return frobenius_norm(dagger(a) @ a - np.eye(len(a))) <= tol


def is_special_unitary(a, tol: float = 1e-8) -> bool:
    a = as_matrix(a)
    return is_unitary(a, tol) and abs(np.linalg.det(a) - 1) <= tol


def is_skew_hermitian(a, tol: float = 1e-8) -> bool:
    a = as_matrix(a)
    return frobenius_norm(a + dagger(a)) <= tol


def is_traceless(a, tol: float = 1e-8) -> bool:
    return abs(np.trace(as_matrix(a))) <= tol


def is_normal(a, tol: float = 1e-8) -> bool:
    a = as_matrix(a)
    scale = max(1.0, frobenius_norm(a) ** 2)
    return frobenius_norm(a @ dagger(a) - dagger(a) @ a) <= tol * scale


def _require_unitary(a, tol: float, what: str = "matrix") -> np.ndarray:
    a = as_matrix(a)
    if not is_unitary(a, tol):
        raise ValueError(f"{what} is not unitary within {tol:g}")
    return a


def _normal_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and a unitary eigenbasis of a normal matrix."""
    t, z = scipy.linalg.schur(a, output="complex")
    return np.diag(t).copy(), z


def mat_exp(x, tol: float = 1e-8) -> np.ndarray:
    """Exponential of a normal matrix via its unitary eigendecomposition."""
    x = as_matrix(x)
    if is_skew_hermitian(x, tol):
        # x = i h with h hermitian
        h = -1j * x
        h = (h + dagger(h)) / 2
        w, v = np.linalg.eigh(h)
        return (v * np.exp(1j * w)) @ dagger(v)
    if not is_normal(x, tol):
        raise ValueError("mat_exp requires a normal matrix")
    lam, z = _normal_eig(x)
    return (z * np.exp(lam)) @ dagger(z)


def principal_log(u, tol: float = 1e-8) -> np.ndarray:
    """Logarithm of a unitary with eigenphases in (-pi, pi]; -1 maps to i*pi."""
    u = _require_unitary(u, tol)
    lam, z = _normal_eig(u)
    theta = np.angle(lam)
    theta = np.where(theta <= -np.pi + _BRANCH_SNAP, np.pi, theta)
    x = (z * (1j * theta)) @ dagger(z)
    return (x - dagger(x)) / 2


@dataclass(frozen=True)
class RealSubspace:
    """Real subspace given by orthonormal columns of ``basis`` (ambient x dim)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-D array of column vectors")
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, ambient_dim: int) -> "RealSubspace":
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "RealSubspace":
        return cls(np.eye(ambient_dim))

    @classmethod
    def span(cls, vectors, ambient_dim: int, tol: Tolerances = DEFAULT_TOL,
             scale: float = 0.0) -> "RealSubspace":
        """Orthonormal basis for the span of ``vectors`` (given as rows).

        Rank is relative to the largest singular value, or to ``scale`` when
        that is larger (vectors obtained by projecting data of size ``scale``
        may be pure roundoff).
        """
        v = np.asarray(vectors, dtype=float).reshape(-1, ambient_dim)
        if v.shape[0] == 0:
            return cls.zero(ambient_dim)
        u, s, _ = np.linalg.svd(v.T, full_matrices=False)
        if s.size == 0 or s[0] == 0:
            return cls.zero(ambient_dim)
        rank = int(np.sum(s > tol.rank_tol * max(s[0], scale)))
        return cls(_fix_signs(u[:, :rank]))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def vectors(self) -> np.ndarray:
        """Basis vectors as rows."""
        return self.basis.T

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, v) -> np.ndarray:
        return self.basis @ (self.basis.T @ np.asarray(v, dtype=float))

    def residual(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.project(v)))

    def contains(self, v, tol: float = 1e-8) -> bool:
        v = np.asarray(v, dtype=float)
        return self.residual(v) <= tol * max(1.0, float(np.linalg.norm(v)))

    def contains_subspace(self, other: "RealSubspace", tol: float = 1e-8) -> bool:
        if other.dim == 0:
            return True
        r = other.basis - self.basis @ (self.basis.T @ other.basis)
        return float(np.linalg.norm(r, 2)) <= tol

    def distance(self, other: "RealSubspace") -> float:
        """Spectral norm of the difference of orthogonal projectors."""
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("subspaces live in different ambient spaces")
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def orthogonal_complement(self, tol: Tolerances = DEFAULT_TOL) -> "RealSubspace":
        if self.dim == 0:
            return RealSubspace.full(self.ambient_dim)
        return real_null_space(self.basis.T, tol)

    def intersect(self, other: "RealSubspace", tol: Tolerances = DEFAULT_TOL) -> "RealSubspace":
        if self.dim == 0 or other.dim == 0:
            return RealSubspace.zero(self.ambient_dim)
        coeffs = real_null_space(np.hstack([self.basis, -other.basis]), tol)
        if coeffs.dim == 0:
            return RealSubspace.zero(self.ambient_dim)
        vecs = self.basis @ coeffs.basis[: self.dim]
        return RealSubspace.span(vecs.T, self.ambient_dim, tol)

    def __add__(self, other: "RealSubspace") -> "RealSubspace":
        return RealSubspace.span(np.vstack([self.vectors(), other.vectors()]), self.ambient_dim)


def _fix_signs(basis: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude coordinate of each column positive."""
    if basis.shape[1] == 0:
        return basis
    idx = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[idx, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs


def real_null_space(m, tol: Tolerances = DEFAULT_TOL) -> RealSubspace:
    """Orthonormal basis of {v : m v = 0}, rank decided relative to the largest singular value."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    ncols = m.shape[1]
    if m.shape[0] == 0 or not np.any(m):
        return RealSubspace.full(ncols)
    if m.shape[0] < ncols:
        # pad to square so the thin SVD still returns the full right basis
        m = np.vstack([m, np.zeros((ncols - m.shape[0], ncols))])
    _, s, vh = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > tol.rank_tol * s[0]))
    return RealSubspace(_fix_signs(vh[rank:].T.copy()))


def group_commutator(g, h, tol: float = 1e-8) -> np.ndarray:
    """g h g^-1 h^-1 for unitaries."""
    g = _require_unitary(g, tol, "g")
    h = _require_unitary(h, tol, "h")
    if g.shape != h.shape:
        raise ValueError("dimension mismatch")
    return g @ h @ dagger(g) @ dagger(h)


def commutator_bound_gap(a, b, tol: float = 1e-8) -> float:
    """sqrt(2)|A-1||B-1| - |[A,B]-1|; nonnegative whenever the bound holds."""
    c = group_commutator(a, b, tol)
    eye = np.eye(len(c))
    return math.sqrt(2) * frobenius_norm(a - eye) * frobenius_norm(b - eye) - frobenius_norm(c - eye)


def commutator_bound_holds(a, b, tol: float = 1e-8) -> bool:
    return commutator_bound_gap(a, b, tol) >= -1e-12


class LogVerdict(str, enum.Enum):
    IN_SU_D = "InSuD"
    BOUND_VIOLATED_PRECONDITIONS = "BoundViolatedPreconditions"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class LogBoundReport:
    verdict: LogVerdict
    d: int
    r: float
    distance_to_identity: float
    tightness_threshold: float
    min_dimension: int
    trace_log: complex

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "d": self.d,
            "r": self.r,
            "distance_to_identity": self.distance_to_identity,
            "tightness_threshold": self.tightness_threshold,
            "min_dimension": self.min_dimension,
            "abs_trace_log": abs(self.trace_log),
        }


def log_trace_bound_report(u, r: float, tol: float = 1e-8) -> LogBoundReport:
    u = as_matrix(u)
    if not is_special_unitary(u, tol):
        raise ValueError("log bound check needs a special unitary matrix")
    if not (0 < r <= 1):
        raise ValueError("r must lie in (0, 1]")
    d = len(u)
    dist = frobenius_distance(u, np.eye(d))
    threshold = 2 * math.sqrt(d) * math.sin(math.pi / d)
    min_dim = math.ceil(40 / r**2)
    trace_log = complex(np.trace(principal_log(u, tol)))
    hypotheses = (d >= min_dim
                  and dist < threshold - _STRICT_GUARD
                  and dist < r - _STRICT_GUARD)
    if not hypotheses:
        verdict = LogVerdict.NOT_APPLICABLE
    elif abs(trace_log) < 1e-8:
        verdict = LogVerdict.IN_SU_D
    else:
        verdict = LogVerdict.BOUND_VIOLATED_PRECONDITIONS
    return LogBoundReport(verdict, d, r, dist, threshold, min_dim, trace_log)


def log_trace_bound_verdict(u, r: float, tol: float = 1e-8) -> LogVerdict:
    """Classify whether the principal log of ``u`` is guaranteed traceless.

    The guarantee needs d >= ceil(40/r^2), |U-1| < r and
    |U-1| < 2 sqrt(d) sin(pi/d). Strict inequalities are tested with a
    1e-12 margin so the tight boundary case is reported as not applicable.
    """
    return log_trace_bound_report(u, r, tol).verdict


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random U(d) element (QR of a complex Ginibre matrix, phases fixed)."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_special_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    u = haar_unitary(d, rng)
    return u * np.exp(-1j * np.angle(np.linalg.det(u)) / d)


def random_su_algebra_element(d: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Traceless skew-hermitian matrix with Frobenius norm ``norm``."""
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    x = (a - dagger(a)) / 2
    x -= np.trace(x) * np.eye(d) / d
    return x * (norm / frobenius_norm(x))
