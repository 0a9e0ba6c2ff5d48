"""Small complex linear algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` complex128 arrays of shape (2, 2) or (4, 4).
The eigensolver is a cyclic Jacobi sweep, which is unconditionally stable
at these sizes and has no dependence on LAPACK ordering conventions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CMat2 = np.ndarray
CMat4 = np.ndarray

HERMITIAN_TOL = 1e-9
JACOBI_OFFDIAG_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100

_PAULI = {
    "i": np.array([[1, 0], [0, 1]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI.values():
    _m.flags.writeable = False

IDENTITY2 = _PAULI["i"]
IDENTITY4 = np.eye(4, dtype=complex)
IDENTITY4.flags.writeable = False


class NotHermitian(ValueError):
    """Raised when an operator expected to be Hermitian is not."""


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    m.flags.writeable = False
    return m


def pauli(axis: str) -> CMat2:
    """Return the Pauli matrix for ``axis`` in {"x", "y", "z"} ("i" gives the identity)."""
    try:
        return _PAULI[axis.lower()]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def bloch_matrix(vec) -> CMat2:
    """``vec . (sigma_x, sigma_y, sigma_z)`` for any real 3-vector."""
    x, y, z = (float(v) for v in vec)
    return _frozen(x * _PAULI["x"] + y * _PAULI["y"] + z * _PAULI["z"])


def tensor(lhs: CMat2, rhs: CMat2) -> CMat4:
    """Kronecker product; ``lhs`` acts on the first (slow-index) qubit."""
    return _frozen(np.kron(lhs, rhs))


def commutator(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if lhs.shape != rhs.shape:
        raise ValueError(f"shape mismatch {lhs.shape} vs {rhs.shape}")
    return _frozen(lhs @ rhs - rhs @ lhs)


def anticommutator(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if lhs.shape != rhs.shape:
        raise ValueError(f"shape mismatch {lhs.shape} vs {rhs.shape}")
    return _frozen(lhs @ rhs + rhs @ lhs)


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    """Frobenius norm of ``m - m^dagger``."""
    return float(np.linalg.norm(m - dagger(m)))


def expectation(op: np.ndarray, rho: np.ndarray) -> float:
    """Real part of ``Tr[op rho]``; ``op`` and ``rho`` are taken to be Hermitian."""
    return float(np.real(np.trace(op @ rho)))


def opnorm(m: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class EigenDecomp4:
    """Eigenvalues sorted descending; column ``k`` of ``eigenvectors`` belongs to ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> CMat4:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues) @ dagger(v)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    for comp in vec:
        if abs(comp) > 1e-12:
            return vec * (abs(comp) / comp)
    return vec


def eig_hermitian4(m: CMat4) -> EigenDecomp4:
    """Diagonalize a 4x4 Hermitian matrix by cyclic complex Jacobi rotations.

    Raises NotHermitian when ``||m - m^dagger||_F`` exceeds 1e-9.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotHermitian(f"||M - M^dagger||_F = {defect:.3e} exceeds {HERMITIAN_TOL:g}")

    a = 0.5 * (m + dagger(m))
    v = np.eye(4, dtype=complex)
    n = 4
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max() < JACOBI_OFFDIAG_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < JACOBI_OFFDIAG_TOL * 1e-3:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G = diag-phase on q followed by a real plane rotation
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = s
                g[q, p] = -s * np.conj(phase)
                g[q, q] = c * np.conj(phase)
                a = dagger(g) @ a @ g
                v = v @ g
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    evals = np.real(np.diag(a))
    order = sorted(range(n), key=lambda k: -evals[k])
    vecs = np.column_stack([_fix_phase(v[:, k]) for k in order])
    evals = evals[order]
    evals.flags.writeable = False
    vecs.flags.writeable = False
    return EigenDecomp4(eigenvalues=evals, eigenvectors=vecs)
