"""Ellipsoidal action sets ``{x : ||x - c||_{A^-1} <= 1}``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, NotPositiveDefinite, ZeroParameter

GEOM_TOL = 1e-9
SYMMETRY_RTOL = 1e-12


def _as_vector(u, d: int | None = None, name: str = "vector") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise ContractViolation(f"{name} must be one-dimensional, got shape {u.shape}")
    if d is not None and u.shape[0] != d:
        raise ContractViolation(f"{name} has length {u.shape[0]}, expected {d}")
    return u


def check_pd_matrix(A) -> np.ndarray:
    """Validate a symmetric positive-definite matrix and return it as a float array."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ContractViolation(f"expected a square matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(), np.finfo(float).tiny)
    if np.abs(A - A.T).max() > SYMMETRY_RTOL * scale:
        raise ContractViolation("matrix is not symmetric")
    return 0.5 * (A + A.T)


def mnorm(M, u) -> float:
    """Return ``sqrt(u^T M u)``."""
    M = np.asarray(M, dtype=float)
    u = _as_vector(u)
    if M.ndim != 2 or M.shape != (u.shape[0], u.shape[0]):
        raise ContractViolation(f"dimension mismatch: matrix {M.shape}, vector {u.shape}")
    q = float(u @ M @ u)
    return float(np.sqrt(max(q, 0.0)))


def factorize(A) -> tuple[np.ndarray, np.ndarray]:
    """Lower Cholesky factor ``S`` with ``S S^T = A`` and ``S_inv_t = (S^-1)^T``.

    Any factor with ``S S^T = A`` gives the same round-robin design matrix as the
    symmetric square root; Cholesky is cheaper and stable.
    """
    A = check_pd_matrix(A)
    try:
        S = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization failed") from exc
    if not np.all(np.diag(S) > 0):
        raise NotPositiveDefinite("non-positive Cholesky pivot")
    S_inv = np.linalg.solve(S, np.eye(A.shape[0]))
    return S, np.ascontiguousarray(S_inv.T)


@dataclass(frozen=True, eq=False)
class EllipsoidSet:
    """Immutable action set with cached Cholesky factor.

    Build with :meth:`from_matrix` or :meth:`ball`; ``S``, ``S_inv_t`` and
    ``A_inv`` are filled in automatically.
    """

    A: np.ndarray
    c: np.ndarray
    S: np.ndarray = field(repr=False)
    S_inv_t: np.ndarray = field(repr=False)
    A_inv: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, A, c=None) -> "EllipsoidSet":
        A = check_pd_matrix(A)
        d = A.shape[0]
        c = np.zeros(d) if c is None else _as_vector(c, d, "center").copy()
        S, S_inv_t = factorize(A)
        A_inv = S_inv_t @ S_inv_t.T
        for arr in (A, c, S, S_inv_t, A_inv):
            arr.setflags(write=False)
        return cls(A=A, c=c, S=S, S_inv_t=S_inv_t, A_inv=A_inv)

    @classmethod
    def ball(cls, d: int, radius: float = 1.0, c=None) -> "EllipsoidSet":
        return cls.from_matrix(radius**2 * np.eye(d), c)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def is_centered(self) -> bool:
        return not np.any(self.c)

    def centered(self) -> "EllipsoidSet":
        """Same shape translated to the origin (reuses the cached factors)."""
        if self.is_centered:
            return self
        c = np.zeros(self.d)
        c.setflags(write=False)
        return EllipsoidSet(A=self.A, c=c, S=self.S, S_inv_t=self.S_inv_t, A_inv=self.A_inv)

    def translated(self, c) -> "EllipsoidSet":
        c = _as_vector(c, self.d, "center").copy()
        c.setflags(write=False)
        return EllipsoidSet(A=self.A, c=c, S=self.S, S_inv_t=self.S_inv_t, A_inv=self.A_inv)

    def dual_norm(self, x) -> float:
        """``||x - c||_{A^-1}`` computed through the factor."""
        u = _as_vector(x, self.d, "action") - self.c
        return float(np.linalg.norm(self.S_inv_t.T @ u))

    def anorm(self, theta) -> float:
        """``||theta||_A = ||S^T theta||_2``."""
        return float(np.linalg.norm(self.S.T @ _as_vector(theta, self.d, "theta")))


def optimal_action(E: EllipsoidSet, theta) -> np.ndarray:
    """Maximizer of ``theta^T x`` over ``E``: ``c + A theta / ||theta||_A``."""
    theta = _as_vector(theta, E.d, "theta")
    norm = E.anorm(theta)
    if norm == 0.0:
        raise ZeroParameter("optimal action undefined for theta = 0")
    return E.c + (E.A @ theta) / norm


def membership(E: EllipsoidSet, x, tol: float = GEOM_TOL) -> bool:
    u = _as_vector(x, E.d, "action") - E.c
    return float(u @ E.A_inv @ u) <= 1.0 + tol


def exploration_direction(E: EllipsoidSet, j: int) -> np.ndarray:
    """Column ``j`` (1-based) of the factor: a boundary point of the centered set."""
    if not 1 <= j <= E.d:
        raise ContractViolation(f"coordinate index {j} outside [1, {E.d}]")
    return E.S[:, j - 1].copy()


def random_pd_matrix(d: int, rng: np.random.Generator, cond: float = 10.0) -> np.ndarray:
    """Random SPD matrix with eigenvalues log-uniform in ``[1, cond]``."""
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = np.exp(rng.uniform(0.0, np.log(cond), size=d))
    A = (Q * eig) @ Q.T
    return 0.5 * (A + A.T)


def sym_sqrt(A) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric square root and inverse square root of an SPD matrix."""
    A = check_pd_matrix(A)
    w, Q = np.linalg.eigh(A)
    if w.min() <= 0:
        raise NotPositiveDefinite("matrix has a non-positive eigenvalue")
    root = (Q * np.sqrt(w)) @ Q.T
    inv_root = (Q / np.sqrt(w)) @ Q.T
    return 0.5 * (root + root.T), 0.5 * (inv_root + inv_root.T)
