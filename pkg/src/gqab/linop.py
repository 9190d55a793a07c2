"""Dense linear algebra on multipartite finite-dimensional systems.

Operators are plain complex ``numpy`` arrays. Subsystem structure is carried
separately as a tuple of dimensions in declaration order; index arithmetic is
mixed-radix over those dimensions (row-major, first subsystem most
significant).
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

TOL_HERM = 1e-12
TOL_PSD = 1e-10
TOL_PSD_HARD = 1e-8
EPS_CLAMP = 1e-12


def check_dims(mat: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    """Validate that ``mat`` is square with side ``prod(dims)``."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"dims must be a non-empty list of positive integers, got {dims}")
    n = int(np.prod(dims))
    if mat.ndim != 2 or mat.shape != (n, n):
        raise ValueError(f"matrix of shape {mat.shape} does not match dims {dims} (side {n})")
    return dims


def hermitian_asymmetry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def eig_hermitian(a: np.ndarray, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary whose columns are the
    corresponding eigenvectors, so that ``a == v @ diag(w) @ v.conj().T``.

    Raises
    ------
    ValueError
        If ``a`` is not Hermitian within ``tol`` (absolute, per entry).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    asym = hermitian_asymmetry(a)
    if asym > tol:
        raise ValueError(f"matrix is not Hermitian: max |A - A^dagger| = {asym:.3e}")
    w, v = np.linalg.eigh(symmetrize(a))
    return w, v


def func_hermitian(a: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its spectrum.

    ``f`` is called once on the eigenvalue array and must return finite
    values; a non-finite output is reported with the offending eigenvalue.
    """
    w, v = eig_hermitian(a)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    bad = ~np.isfinite(fw)
    if np.any(bad):
        raise ValueError(f"function undefined at eigenvalue {w[bad][0]!r}")
    return symmetrize((v * fw) @ v.conj().T)


def expm_hermitian(a: np.ndarray) -> np.ndarray:
    return func_hermitian(a, np.exp)


def logm_hermitian(a: np.ndarray) -> np.ndarray:
    return func_hermitian(a, np.log)


def log_clamped(a: np.ndarray, eps_clamp: float = EPS_CLAMP) -> np.ndarray:
    """Matrix logarithm of a PSD operator with eigenvalues floored at ``eps_clamp``.

    Eigenvalues in ``[-1e-8, eps_clamp)`` are treated as ``eps_clamp``; anything
    more negative is rejected.
    """
    if eps_clamp <= 0:
        raise ValueError("eps_clamp must be positive")
    w, v = eig_hermitian(a)
    if w.size and w[0] < -TOL_PSD_HARD:
        raise ValueError(f"operator is not positive semidefinite: eigenvalue {w[0]:.3e}")
    lw = np.log(np.maximum(w, eps_clamp))
    return symmetrize((v * lw) @ v.conj().T)


def tensor(a: np.ndarray, dims_a: Sequence[int], b: np.ndarray, dims_b: Sequence[int]):
    """Kronecker product; returns ``(matrix, dims_a + dims_b)``."""
    return np.kron(a, b), tuple(dims_a) + tuple(dims_b)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(a: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems appear in ascending index order in the result, whose
    dimensions are ``[dims[i] for i in sorted(keep)]``. Keeping nothing
    returns the ``1x1`` matrix holding the full trace.
    """
    dims = check_dims(a, dims)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    for k in keep:
        if not 0 <= k < n:
            raise ValueError(f"subsystem index {k} out of range for dims {dims}")
    t = a.reshape(dims + dims)
    # Trace highest-index subsystems first so remaining axis positions stay valid.
    cur = n
    for i in reversed(range(n)):
        if i in keep:
            continue
        t = np.trace(t, axis1=i, axis2=i + cur)
        cur -= 1
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def permute_subsystems(a: np.ndarray, dims: Sequence[int], perm: Sequence[int]):
    """Reorder tensor factors: new subsystem ``j`` is old subsystem ``perm[j]``.

    Returns ``(matrix, new_dims)``.
    """
    dims = check_dims(a, dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(dims))):
        raise ValueError(f"{perm} is not a permutation of {len(dims)} subsystems")
    n = len(dims)
    t = a.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    d = a.shape[0]
    return t.reshape(d, d), tuple(dims[p] for p in perm)


def embed(op: np.ndarray, left: int = 1, right: int = 1) -> np.ndarray:
    """``I_left (x) op (x) I_right``."""
    out = op
    if left > 1:
        out = np.kron(np.eye(left), out)
    if right > 1:
        out = np.kron(out, np.eye(right))
    return out


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    w = np.linalg.eigvalsh(symmetrize(rho - sigma))
    return 0.5 * float(np.sum(np.abs(w)))


def is_density(rho: np.ndarray, tol: float = TOL_PSD) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if hermitian_asymmetry(rho) > TOL_HERM:
        return False
    if abs(np.trace(rho).real - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh(symmetrize(rho))[0] >= -tol)


def check_density(rho: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    """Return ``rho`` as a complex array or raise if it is not a valid state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    asym = hermitian_asymmetry(rho)
    if asym > TOL_HERM:
        raise ValueError(f"state is not Hermitian: max asymmetry {asym:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"state trace is {tr!r}, expected 1")
    wmin = np.linalg.eigvalsh(symmetrize(rho))[0]
    if wmin < -tol:
        raise ValueError(f"state is not positive semidefinite: eigenvalue {wmin:.3e}")
    return rho


def normalize_state(rho: np.ndarray) -> np.ndarray:
    """Re-symmetrize and rescale to unit trace."""
    rho = symmetrize(rho)
    return rho / np.trace(rho).real


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full-rank (by default) state from the Hilbert-Schmidt ensemble."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return normalize_state(rho)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return symmetrize(g)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The phases of ``diag(R)`` are folded into ``Q`` so the distribution is
    exactly Haar rather than biased by the QR sign convention.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_isometry(dim_in: int, dim_out: int, rng: np.random.Generator) -> np.ndarray:
    """First ``dim_in`` columns of a Haar unitary on ``dim_out`` (``dim_out >= dim_in``)."""
    if dim_out < dim_in:
        raise ValueError("isometry needs dim_out >= dim_in")
    return haar_unitary(dim_out, rng)[:, :dim_in]
