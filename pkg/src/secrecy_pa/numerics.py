"""Dense complex linear algebra used by the channel model and rate code.

Matrices are plain ``numpy`` arrays with ``complex128`` dtype. Random draws
always go through an explicit :class:`numpy.random.Generator`.
"""

import numpy as np

from .exceptions import DegenerateChannelError, NotPSDError, PreconditionError

__all__ = [
    "is_hermitian",
    "hermitian_eig",
    "inv_sqrt_psd",
    "null_space_projector",
    "sample_complex_gaussian",
    "complex_gaussian_matrix",
]

HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-10
EIG_FLOOR_RTOL = 1e-12
RANK_RTOL = 1e-10


def _as_square(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise PreconditionError(f"expected a non-empty square matrix, got shape {A.shape}")
    return A


def is_hermitian(A, rtol=HERMITIAN_RTOL):
    """Return True if ``max|A - A^H| <= rtol * max|A|``."""
    A = np.asarray(A)
    scale = np.max(np.abs(A)) if A.size else 0.0
    return bool(np.max(np.abs(A - A.conj().T)) <= rtol * scale)


def hermitian_eig(A):
    """Eigendecomposition of a Hermitian matrix.

    Args:
        A: square Hermitian matrix.

    Returns:
        (U, lam): unitary eigenvectors (columns) and ascending real eigenvalues,
        with ``A = U @ diag(lam) @ U^H``.

    Raises:
        PreconditionError: if ``A`` is not square or not Hermitian.
    """
    A = _as_square(A)
    if not is_hermitian(A):
        raise PreconditionError("matrix is not Hermitian")
    # symmetrize so eigh sees exactly the Hermitian part
    lam, U = np.linalg.eigh(0.5 * (A + A.conj().T))
    return U, lam


def inv_sqrt_psd(A, eps=None):
    """Symmetric inverse square root ``A^{-1/2}`` of a PSD matrix.

    Eigenvalues below ``eps`` are floored at ``eps`` before inversion. The
    default floor is ``1e-12 * max(lam)``.

    Raises:
        NotPSDError: if an eigenvalue is below ``-1e-10 * max(lam)``.
    """
    U, lam = hermitian_eig(A)
    top = max(lam[-1], 0.0)
    if lam[0] < -PSD_RTOL * top or (top == 0.0 and lam[0] < 0.0):
        raise NotPSDError(f"smallest eigenvalue {lam[0]:.3e} is negative")
    if eps is None:
        eps = EIG_FLOOR_RTOL * top
    if eps <= 0.0 and lam[0] <= 0.0:
        raise NotPSDError("matrix is singular and no positive floor was given")
    lam = np.maximum(lam, eps)
    B = (U / np.sqrt(lam)) @ U.conj().T
    return 0.5 * (B + B.conj().T)


def null_space_projector(H):
    """Orthogonal projector onto the null space of a wide matrix.

    Returns ``P = I - H^H (H H^H)^{-1} H``, so that ``H @ P = 0``.

    Raises:
        DegenerateChannelError: if ``H`` is not wide (rows < cols) or its
            smallest singular value is below ``1e-10`` times the largest.
    """
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2:
        raise PreconditionError(f"expected a matrix, got shape {H.shape}")
    rows, cols = H.shape
    if rows >= cols:
        raise DegenerateChannelError(f"{rows}x{cols} matrix has no nontrivial null space")
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < RANK_RTOL * sv[0]:
        raise DegenerateChannelError("channel matrix is rank deficient")
    G = H @ H.conj().T
    P = np.eye(cols, dtype=np.complex128) - H.conj().T @ np.linalg.solve(G, H)
    return 0.5 * (P + P.conj().T)


def sample_complex_gaussian(rng, dim, variance=1.0):
    """Draw a ``CN(0, variance * I)`` vector of length ``dim``.

    Real and imaginary parts each carry ``variance / 2``.
    """
    return complex_gaussian_matrix(rng, (dim,), variance)


def complex_gaussian_matrix(rng, shape, variance=1.0):
    """Array of i.i.d. circularly-symmetric complex Gaussian entries."""
    if variance < 0:
        raise PreconditionError(f"variance must be non-negative, got {variance}")
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)
