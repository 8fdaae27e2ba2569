"""Gaussian-state calculus on covariance matrices.

Conventions used throughout the package:

* quadrature ordering ``(x_1, p_1, x_2, p_2, ...)``;
* symplectic form ``Omega = diag([[0, 1], [-1, 0]], ...)``;
* shot-noise units, so the vacuum covariance matrix is the identity;
* a symplectic matrix ``S`` transforms a covariance matrix as ``S.T @ gamma @ S``.

Covariance matrices are plain ``(2N, 2N)`` float numpy arrays. First moments
are never tracked since entropies and key rates do not depend on them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, NumericalFailure

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9
G_CLAMP_TOL = 1e-12


class Quadrature(enum.Enum):
    X = 0
    P = 1


class ModeRole(enum.Enum):
    """Labels for the modes of the purified Alice-Bob-Eve network."""

    SourceToAlice = "source_to_alice"
    SourceToBob = "source_to_bob"
    Cloner1In = "cloner1_in"
    Cloner1Keep = "cloner1_keep"
    Cloner2In = "cloner2_in"
    Cloner2Keep = "cloner2_keep"
    PrepVacuum = "prep_vacuum"


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_square_even(gamma: np.ndarray) -> int:
    gamma = np.asarray(gamma)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise InvalidArgument(f"expected a square matrix of even size, got shape {gamma.shape}")
    if gamma.shape[0] == 0:
        raise InvalidArgument("covariance matrix has no modes")
    return gamma.shape[0] // 2


def g_function(x: float) -> float:
    """Entropy in bits of a thermal mode with mean photon number ``x``.

    Computes ``(x + 1) log2(x + 1) - x log2(x)``, continuous at 0.

    Args:
        x: Mean photon number. Values in ``[-1e-12, 0)`` are treated as 0.

    Raises:
        InvalidArgument: if ``x`` is negative beyond the clamp tolerance.

    >>> g_function(0.0), g_function(1.0)
    (0.0, 2.0)
    """
    x = float(x)
    if x < -G_CLAMP_TOL or np.isnan(x):
        raise InvalidArgument(f"g_function needs x >= 0, got {x!r}")
    if x <= 0.0:
        return 0.0
    return float((x + 1.0) * np.log2(x + 1.0) - x * np.log2(x))


def vacuum_cm(n: int) -> np.ndarray:
    if int(n) != n or n < 1:
        raise InvalidArgument(f"number of modes must be a positive integer, got {n!r}")
    return np.eye(2 * int(n))


def thermal_cm(w: float) -> np.ndarray:
    """Single-mode thermal state of quadrature variance ``w``."""
    if not w >= 1.0:
        raise InvalidArgument(f"thermal variance must be >= 1, got {w!r}")
    return np.diag([float(w), float(w)])


def epr_cm(v: float) -> np.ndarray:
    """Two-mode squeezed vacuum with single-mode variance ``v``.

    Diagonal blocks are ``v * I`` and the correlation blocks ``sqrt(v**2 - 1) * Z``
    with ``Z = diag(1, -1)``.
    """
    if not v >= 1.0:
        raise InvalidArgument(f"EPR variance must be >= 1, got {v!r}")
    v = float(v)
    c = np.sqrt(v * v - 1.0)
    z = np.diag([1.0, -1.0])
    return np.block([[v * np.eye(2), c * z], [c * z, v * np.eye(2)]])


def squeezed_cm(v: float, quadrature: Quadrature = Quadrature.X) -> np.ndarray:
    """Single-mode squeezed vacuum; ``quadrature`` has variance ``1/v``."""
    if not v >= 1.0:
        raise InvalidArgument(f"squeezing variance must be >= 1, got {v!r}")
    diag = [1.0 / v, v] if quadrature is Quadrature.X else [v, 1.0 / v]
    return np.diag(diag)


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    """Block-diagonal covariance matrix of a product state."""
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def beam_splitter(t: float, mode_i: int, mode_j: int, n_modes: int) -> np.ndarray:
    """Symplectic matrix of a beam splitter with transmission ``t``.

    The induced action on quadratures (both x and p) is::

        x_i' =  sqrt(t) x_i + sqrt(1 - t) x_j
        x_j' = -sqrt(1 - t) x_i + sqrt(t) x_j

    Returned in the right-multiplication convention of :func:`apply_symplectic`,
    i.e. ``S.T @ gamma @ S`` realises the map above.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidArgument(f"transmission must be in [0, 1], got {t!r}")
    if mode_i == mode_j:
        raise InvalidArgument("beam splitter needs two distinct modes")
    for m in (mode_i, mode_j):
        if not 0 <= m < n_modes:
            raise InvalidArgument(f"mode index {m} out of range for {n_modes} modes")
    st, sr = np.sqrt(t), np.sqrt(1.0 - t)
    action = np.eye(2 * n_modes)
    for q in (0, 1):
        i, j = 2 * mode_i + q, 2 * mode_j + q
        action[i, i] = st
        action[i, j] = sr
        action[j, i] = -sr
        action[j, j] = st
    return action.T


def is_symplectic(s: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    n = _check_square_even(s)
    om = omega(n)
    return bool(np.max(np.abs(s @ om @ s.T - om)) <= tol)


def apply_symplectic(gamma: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Return ``S.T @ gamma @ S``."""
    gamma = np.asarray(gamma, dtype=float)
    s = np.asarray(s, dtype=float)
    if gamma.shape != s.shape:
        raise InvalidArgument(f"dimension mismatch: gamma {gamma.shape} vs S {s.shape}")
    out = s.T @ gamma @ s
    return 0.5 * (out + out.T)


def _quadrature_indices(modes: Sequence[int]) -> list[int]:
    return [2 * m + q for m in modes for q in (0, 1)]


def partial_trace(gamma: np.ndarray, keep_modes: Sequence[int]) -> np.ndarray:
    """Reduced covariance matrix on ``keep_modes``, in the given order."""
    n = _check_square_even(gamma)
    keep = list(keep_modes)
    if not keep:
        raise InvalidArgument("keep_modes must be non-empty")
    if len(set(keep)) != len(keep) or any(not 0 <= m < n for m in keep):
        raise InvalidArgument(f"invalid keep_modes {keep} for {n} modes")
    idx = _quadrature_indices(keep)
    return np.asarray(gamma, dtype=float)[np.ix_(idx, idx)]


def _split(gamma: np.ndarray, measured_mode: int):
    n = _check_square_even(gamma)
    if n < 2:
        raise InvalidArgument("conditioning needs at least two modes")
    if not 0 <= measured_mode < n:
        raise InvalidArgument(f"measured mode {measured_mode} out of range for {n} modes")
    gamma = np.asarray(gamma, dtype=float)
    rest = _quadrature_indices([m for m in range(n) if m != measured_mode])
    meas = _quadrature_indices([measured_mode])
    return gamma[np.ix_(rest, rest)], gamma[np.ix_(rest, meas)], gamma[np.ix_(meas, meas)]


def condition_homodyne(gamma: np.ndarray, measured_mode: int,
                       quadrature: Quadrature = Quadrature.X) -> np.ndarray:
    """Covariance of the remaining modes after homodyning one quadrature.

    The pseudoinverse of the projected block has a single non-zero entry,
    ``1 / gamma_qq``, so the update is a rank-one Schur complement.
    """
    g_rest, sigma, g_meas = _split(gamma, measured_mode)
    q = quadrature.value
    var = g_meas[q, q]
    if not var > 0.0:
        raise NumericalFailure(f"measured quadrature variance {var!r} is not positive")
    col = sigma[:, q:q + 1]
    out = g_rest - (col @ col.T) / var
    return 0.5 * (out + out.T)


def condition_heterodyne(gamma: np.ndarray, measured_mode: int) -> np.ndarray:
    """Covariance of the remaining modes after heterodyning ``measured_mode``."""
    g_rest, sigma, g_meas = _split(gamma, measured_mode)
    m = g_meas + np.eye(2)
    det = np.linalg.det(m)
    if not det > 0.0:
        raise NumericalFailure("gamma_meas + I is singular; input is unphysical")
    out = g_rest - sigma @ np.linalg.solve(m, sigma.T)
    return 0.5 * (out + out.T)


def _raw_symplectic_spectrum(gamma: np.ndarray) -> np.ndarray:
    """Unclamped symplectic eigenvalues, descending."""
    n = _check_square_even(gamma)
    gamma = np.asarray(gamma, dtype=float)
    sym = 0.5 * (gamma + gamma.T)
    evals, evecs = np.linalg.eigh(sym)
    if evals[0] > 0.0:
        # i * sqrt(g) Omega sqrt(g) is Hermitian and similar to i Omega g
        root = (evecs * np.sqrt(evals)) @ evecs.T
        h = 1j * (root @ omega(n) @ root)
        w = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    else:
        w = np.linalg.eigvals(1j * omega(n) @ sym)
        if np.max(np.abs(w.imag)) > 1e-8 * max(1.0, np.max(np.abs(w))):
            raise NumericalFailure("symplectic spectrum is not real; matrix is not a valid covariance")
        w = w.real
    w = np.sort(w)
    neg, pos = -w[:n][::-1], w[n:]
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.max(np.abs(neg - pos)) > 1e-8 * scale:
        raise NumericalFailure("eigenvalues of i*Omega*gamma do not pair up as +/-nu")
    return np.sort(0.5 * (neg + pos))[::-1]


def symplectic_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues in descending order, clamped up to 1.

    Raises:
        NumericalFailure: if any eigenvalue falls below ``1 - 1e-9``.
    """
    nu = _raw_symplectic_spectrum(gamma)
    if nu[-1] < 1.0 - PHYSICAL_TOL:
        raise NumericalFailure(f"unphysical covariance matrix: symplectic eigenvalue {nu[-1]!r} < 1")
    return np.maximum(nu, 1.0)


def von_neumann_entropy(gamma: np.ndarray) -> float:
    """Entropy in bits, summing ``g_function((nu - 1) / 2)`` over the spectrum."""
    return float(sum(g_function((nu - 1.0) / 2.0) for nu in symplectic_eigenvalues(gamma)))


@dataclass(frozen=True)
class CMReport:
    symmetry_defect: float
    min_symplectic_eigenvalue: float
    symmetric: bool
    physical: bool

    @property
    def passed(self) -> bool:
        return self.symmetric and self.physical


def validate_cm(gamma: np.ndarray) -> CMReport:
    """Check symmetry and the uncertainty bound. Never raises on bad input."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2 or gamma.size == 0:
        return CMReport(float("inf"), float("nan"), False, False)
    defect = float(np.max(np.abs(gamma - gamma.T)))
    try:
        nu_min = float(_raw_symplectic_spectrum(gamma)[-1])
    except (NumericalFailure, np.linalg.LinAlgError):
        nu_min = float("nan")
    physical = bool(nu_min >= 1.0 - PHYSICAL_TOL)
    return CMReport(defect, nu_min, defect <= SYMMETRY_TOL, physical)
