"""Hard instances: the sign-flip family on the sphere ``||theta||_A = B`` and the
Gaussian prior ``N(0, (B^2/d) A^-1)``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ellipsoid import check_pd_matrix, mnorm, sym_sqrt
from .errors import ContractViolation

_PARALLEL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AssouadFamily:
    """``2^d`` parameters ``theta(xi) = A^-1/2 phi(xi)`` in ambient dimension ``D = d + 2``.

    ``basis`` holds ``e_1 .. e_D`` as columns; column ``d`` (0-based) is along
    ``A^1/2 theta_base`` and columns ``d, d+1`` span ``A^-1/2 c``.
    """

    D: int
    B: float
    T: int
    sigma: float
    eps: float
    C: float
    basis: np.ndarray
    A_inv_sqrt: np.ndarray
    theta_base: np.ndarray

    @property
    def d(self) -> int:
        return self.D - 2

    def theta(self, xi) -> np.ndarray:
        return assouad_theta(self, xi)

    def all_thetas(self):
        """Iterate ``(xi, theta(xi))`` over every sign pattern."""
        for xi in itertools.product((-1, 1), repeat=self.d):
            yield np.array(xi), assouad_theta(self, xi)


def family_constants(B: float, T: int, sigma: float, d: int) -> tuple[float, float]:
    """``C = min(1/(2 sqrt 2), B sqrt(2T)/(sigma d))`` and ``eps = min(1, d sigma C / (B sqrt(2T)))``."""
    root = B * math.sqrt(2.0 * T)
    C = 1.0 / (2.0 * math.sqrt(2.0))
    if sigma > 0:
        C = min(C, root / (sigma * d))
    eps = min(1.0, d * sigma * C / root)
    return eps, C


def build_assouad(theta_base, B: float, T: int, sigma: float, A, c=None, seed: int = 0) -> AssouadFamily:
    theta_base = np.asarray(theta_base, dtype=float)
    A = check_pd_matrix(A)
    D = theta_base.shape[0]
    if D < 3:
        raise ContractViolation("ambient dimension must be >= 3")
    if A.shape != (D, D):
        raise ContractViolation("dimension mismatch")
    if not np.any(theta_base):
        raise ContractViolation("theta_base must be nonzero")
    if abs(mnorm(A, theta_base) - B) > 1e-9 * max(1.0, B):
        raise ContractViolation("theta_base must satisfy ||theta_base||_A = B")
    c = np.zeros(D) if c is None else np.asarray(c, dtype=float)
    root, inv_root = sym_sqrt(A)
    rng = np.random.default_rng(seed)

    # e_{d+1} along A^1/2 theta, so that phi(xi) -> A^1/2 theta as eps -> 0
    u1 = root @ theta_base
    u1 /= np.linalg.norm(u1)
    u2 = inv_root @ c
    u2 = u2 - (u2 @ u1) * u1
    if np.linalg.norm(u2) <= _PARALLEL_TOL * max(1.0, np.linalg.norm(inv_root @ c)):
        u2 = rng.standard_normal(D)
        u2 -= (u2 @ u1) * u1
    u2 /= np.linalg.norm(u2)
    M = np.column_stack([u1, u2, rng.standard_normal((D, D - 2))])
    Q, _ = np.linalg.qr(M)
    Q[:, 0] *= np.sign(Q[:, 0] @ u1)
    Q[:, 1] *= np.sign(Q[:, 1] @ u2)
    d = D - 2
    basis = np.column_stack([Q[:, 2:], Q[:, 0], Q[:, 1]])
    eps, C = family_constants(B, T, sigma, d)
    return AssouadFamily(
        D=D, B=float(B), T=int(T), sigma=float(sigma), eps=eps, C=C,
        basis=basis, A_inv_sqrt=inv_root, theta_base=theta_base.copy(),
    )


def assouad_theta(f: AssouadFamily, xi) -> np.ndarray:
    """``A^-1/2 B [e_{d+1} sqrt(1 - eps^2) + (eps / sqrt d) sum_i xi_i e_i]``."""
    xi = np.asarray(xi)
    if xi.shape != (f.d,) or not np.all(np.isin(xi, (-1, 1))):
        raise ContractViolation(f"xi must be a +-1 vector of length {f.d}")
    phi = f.B * (
        f.basis[:, f.d] * math.sqrt(1.0 - f.eps**2)
        + (f.eps / math.sqrt(f.d)) * (f.basis[:, : f.d] @ xi.astype(float))
    )
    return f.A_inv_sqrt @ phi


def flip_coordinate(xi, i: int) -> np.ndarray:
    """``xi`` with entry ``i`` (0-based) negated."""
    out = np.array(xi, copy=True)
    out[i] = -out[i]
    return out


def neighborhood_radius(B: float, T: int, sigma: float, d: int) -> float:
    """Allowed squared A-distance ``min(sigma d B / sqrt T, 4 B^2)``."""
    return min(sigma * d * B / math.sqrt(T), 4.0 * B * B)


@dataclass(frozen=True, eq=False)
class GaussianPrior:
    B: float
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", check_pd_matrix(self.A))
        _, inv_root = sym_sqrt(self.A)
        object.__setattr__(self, "_inv_root", inv_root)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def covariance(self) -> np.ndarray:
        return (self.B**2 / self.d) * np.linalg.inv(self.A)


def sample_prior(p: GaussianPrior, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """``A^-1/2 g B / sqrt(d)`` with ``g`` standard Gaussian; rows when ``size`` is given."""
    g = rng.standard_normal(p.d if size is None else (size, p.d))
    return (p.B / math.sqrt(p.d)) * (g @ p._inv_root)
