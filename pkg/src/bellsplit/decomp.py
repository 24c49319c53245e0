"""Joint factorization of the amplitude pair and the sparse correlation tensor.

The antisymmetric amplitude matrix factors as u sqrt(xi) v through its
singular values; the symmetric one shares the same side unitaries up to a
real traceless coefficient matrix q. Rotating the correlation tensor into
this basis leaves five nonzero entries whose squares reproduce the closed
eigenvalue formulas, which is the capstone cross-check of the bell module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .scattering import GammaPair, HybridMatrix
from .smallmat import (
    SIGMA_Z,
    dagger,
    herm_eigen,
    max_abs,
    svd2,
    tilde2,
)

__all__ = [
    "DegenerateXi",
    "SemiPolar",
    "RPrime",
    "semi_polar",
    "consistency_check",
    "ConsistencyRecord",
    "r_prime",
]


class DegenerateXi(ValueError):
    """Squared singular values coincide (or the smaller one vanishes).

    The coefficient matrix of the joint factorization is singular there and
    no convention is fabricated for it; scan drivers perturb inputs off the
    degenerate surface instead.
    """


@dataclass(frozen=True, eq=False)
class SemiPolar:
    """gamma2 = u sqrt(xi) v and gamma1 = u q sqrt(xi) v with real traceless q."""

    u: np.ndarray
    v: np.ndarray
    xi: np.ndarray  # (xi1, xi2), descending, nonnegative
    q: np.ndarray  # real 2x2, rows (c1, c2), (c3, -c1)

    @property
    def c1(self) -> float:
        return float(self.q[0, 0])

    @property
    def c2(self) -> float:
        return float(self.q[0, 1])

    @property
    def c3(self) -> float:
        return float(self.q[1, 0])

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        sq = np.diag(np.sqrt(self.xi)).astype(complex)
        return self.u @ self.q @ sq @ self.v, self.u @ sq @ self.v

    def to_json(self) -> dict:
        """Debug dump; format tag "debug-v1", not a stability promise."""
        from .smallmat import mat_to_json

        return {
            "format": "debug-v1",
            "u": mat_to_json(self.u),
            "v": mat_to_json(self.v),
            "xi": [float(self.xi[0]), float(self.xi[1])],
            "q": [[float(e) for e in row] for row in self.q],
        }


def semi_polar(g: GammaPair, tol: float = 1e-10) -> SemiPolar:
    """Jointly factor (gamma1, gamma2) with shared side unitaries.

    Steps: svd2 of gamma2 fixes u, v and xi (cross-checked against the trace
    formulas); the rotated gamma1 has real diagonal c1 * (sqrt(xi1), -sqrt(xi2))
    with c1 = Tr gamma1† gamma2 / (xi1 - xi2); the residual off-diagonal phase
    is pulled out as a diagonal phase pair and absorbed into u and v. The sign
    freedom left in the off-diagonal couple is fixed by c2 >= 0.
    """
    g1, g2 = g.gamma1, g.gamma2
    u0, s, v0 = svd2(g2)
    xi = s**2
    t2 = float(np.trace(dagger(g2) @ g2).real)
    tt2 = abs(np.trace(dagger(g2) @ tilde2(g2)))
    if abs((xi[0] + xi[1]) - t2) > 1e-10 * max(1.0, t2):
        raise ValueError("singular values inconsistent with the norm of gamma2")
    if abs(2.0 * np.sqrt(xi[0] * xi[1]) - tt2) > 1e-10 * max(1.0, t2):
        raise ValueError("singular values inconsistent with the spin-flip trace of gamma2")
    if xi[0] - xi[1] < tol:
        raise DegenerateXi(f"xi values {xi[0]:.3e}, {xi[1]:.3e} coincide within {tol:.1e}")
    if xi[1] < tol:
        raise DegenerateXi(f"smaller xi value {xi[1]:.3e} vanishes within {tol:.1e}")

    inner = np.trace(dagger(g1) @ g2)
    if abs(inner.imag) > 1e-8:
        raise ValueError(f"Tr gamma1† gamma2 = {inner} is not real; invalid amplitude pair")
    c1 = inner.real / (xi[0] - xi[1])

    a = dagger(u0) @ g1 @ dagger(v0)
    if abs(a[0, 0] - c1 * np.sqrt(xi[0])) > 1e-8 or abs(a[1, 1] + c1 * np.sqrt(xi[1])) > 1e-8:
        raise ValueError("rotated gamma1 diagonal violates the joint-factorization structure")

    if abs(a[0, 1]) > 1e-14:
        phi = float(np.angle(a[0, 1]))
    elif abs(a[1, 0]) > 1e-14:
        phi = -float(np.angle(a[1, 0]))
    else:
        phi = 0.0
    a12 = a[0, 1] * np.exp(-1j * phi)
    a21 = a[1, 0] * np.exp(1j * phi)
    if abs(a12.imag) > 1e-8 or abs(a21.imag) > 1e-8:
        raise ValueError("off-diagonal couple fails to reduce to a single phase")
    a12, a21 = a12.real, a21.real
    if a12 < 0.0:  # c2 >= 0 convention; shifting the phase by pi flips both couplings
        a12, a21, phi = -a12, -a21, phi + np.pi

    d1 = np.diag([np.exp(1j * phi / 2.0), np.exp(-1j * phi / 2.0)])
    u = u0 @ d1
    v = d1.conj() @ v0
    q = np.array([[c1, a12 / np.sqrt(xi[1])], [a21 / np.sqrt(xi[0]), -c1]], dtype=float)

    sp = SemiPolar(u=u, v=v, xi=xi.astype(float), q=q)
    r1, r2 = sp.reconstruct()
    if max_abs(g1 - r1) > 1e-10 or max_abs(g2 - r2) > 1e-10:
        raise ValueError("joint factorization failed to reconstruct the amplitude pair")
    return sp


class ConsistencyRecord(NamedTuple):
    """Spectral-route quantities of the hybrid Gram matrix and a real coupling solution."""

    lambdas: np.ndarray  # eigenvalues of the Gram matrix, descending
    xi: np.ndarray  # (lam1 (1 - lam2), lam2 (1 - lam1))
    inner: float  # Tr gamma1† gamma2 via the eigenbasis weights
    c1: float  # cos(2 eta) from the eigenvector overlaps
    couple_product: float
    couple_square_sum: float
    a12: float
    a21: float


def consistency_check(X: HybridMatrix) -> ConsistencyRecord:
    """Verify the spectral route to xi and c1 and solve for the real couplings.

    Diagonalizing the hybrid Gram matrix gives xi and c1 = cos 2 eta directly,
    where cos eta is the modulus of the eigenbasis overlap. The two quadratic
    constraints on the off-diagonal couplings always admit a real solution
    (their discriminant is the arithmetic-geometric mean gap); one solution is
    returned.
    """
    eig = herm_eigen(X.gram)
    lam = np.clip(eig.eigenvalues, 0.0, 1.0)
    w = dagger(eig.eigenvectors)  # rows indexed by eigenvalue
    xi = np.array([lam[0] * (1.0 - lam[1]), lam[1] * (1.0 - lam[0])])

    if abs(abs(w[0, 0]) - abs(w[1, 1])) > 1e-10 or abs(abs(w[0, 1]) - abs(w[1, 0])) > 1e-10:
        raise ValueError("eigenbasis moduli violate 2x2 unitarity")
    inner = float(
        lam[0] * (abs(w[0, 0]) ** 2 - abs(w[0, 1]) ** 2)
        + lam[1] * (abs(w[1, 0]) ** 2 - abs(w[1, 1]) ** 2)
    )
    inner_direct = float(np.trace(SIGMA_Z @ X.gram).real)
    if abs(inner - inner_direct) > 1e-10:
        raise ValueError("eigenbasis route to the inner product disagrees with the direct trace")
    c1 = 2.0 * min(abs(w[0, 0]), 1.0) ** 2 - 1.0  # cos 2 eta

    sin_sq_2eta = 1.0 - c1**2
    geo = np.sqrt(max(0.0, lam[0] * lam[1] * (1.0 - lam[0]) * (1.0 - lam[1])))
    ari = lam[0] * (1.0 - lam[0]) + lam[1] * (1.0 - lam[1])
    if 2.0 * geo > ari + 1e-12:
        raise ValueError("arithmetic-geometric mean inequality violated")
    product = sin_sq_2eta * geo
    square_sum = sin_sq_2eta * ari
    disc = np.sqrt(max(0.0, square_sum**2 - 4.0 * product**2))
    y_plus = (square_sum + disc) / 2.0
    a12 = np.sqrt(max(0.0, y_plus))
    a21 = product / a12 if a12 > 0.0 else 0.0
    return ConsistencyRecord(
        lambdas=lam,
        xi=xi,
        inner=inner,
        c1=c1,
        couple_product=product,
        couple_square_sum=square_sum,
        a12=float(a12),
        a21=float(a21),
    )


@dataclass(frozen=True, eq=False)
class RPrime:
    """Correlation tensor in the joint-factorization basis; five nonzero entries."""

    matrix: np.ndarray  # 3x3 real

    @property
    def r11(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def r13(self) -> float:
        return float(self.matrix[0, 2])

    @property
    def r22(self) -> float:
        return float(self.matrix[1, 1])

    @property
    def r31(self) -> float:
        return float(self.matrix[2, 0])

    @property
    def r33(self) -> float:
        return float(self.matrix[2, 2])

    def eigenvalues_squared(self) -> tuple[float, float, float]:
        """Eigenvalues of matrixᵀ matrix: the closed pair from the interior block plus r22²."""
        m = self.matrix
        trace = m[0, 0] ** 2 + m[2, 0] ** 2 + m[0, 2] ** 2 + m[2, 2] ** 2
        det = (m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]) ** 2
        disc = np.sqrt(max(0.0, trace**2 - 4.0 * det))
        return ((trace + disc) / 2.0, (trace - disc) / 2.0, float(m[1, 1] ** 2))

    def to_json(self) -> dict:
        """Debug dump; format tag "debug-v1", not a stability promise."""
        return {
            "format": "debug-v1",
            "r11": self.r11,
            "r13": self.r13,
            "r22": self.r22,
            "r31": self.r31,
            "r33": self.r33,
        }


def r_prime(sp: SemiPolar, alpha_sq: float, n: float) -> RPrime:
    """Correlation tensor entries in the joint-factorization basis.

    ``n`` is the mixture normalization (twice the coincidence probability).
    """
    a = alpha_sq
    c1, c2, c3 = sp.c1, sp.c2, sp.c3
    xi1, xi2 = float(sp.xi[0]), float(sp.xi[1])
    sq12 = np.sqrt(xi1 * xi2)
    m = np.zeros((3, 3))
    m[0, 0] = 2.0 / n * (1.0 - a - (1.0 + a) * (c1**2 - c2 * c3)) * sq12
    m[0, 2] = 2.0 / n * (1.0 + a) * c1 * (c2 * xi2 + c3 * xi1)
    m[1, 1] = 2.0 / n * (-1.0 + a + (1.0 + a) * (c1**2 + c2 * c3)) * sq12
    m[2, 0] = 2.0 / n * (1.0 + a) * c1 * (c2 + c3) * sq12
    m[2, 2] = 1.0 / n * (
        ((1.0 - a) + (1.0 + a) * c1**2) * (xi1 + xi2)
        - (1.0 + a) * (c2**2 * xi2 + c3**2 * xi1)
    )
    return RPrime(m)
