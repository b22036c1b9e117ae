"""Steady-state and decay-mode solvers plus dense verification oracles.

The steady state (NESS) is the kernel vector of the q=0 sector matrix; the
Hermitian decay modes (HDM) are its eigenvectors with real negative
eigenvalues.  At desk scale both come from implicitly restarted Arnoldi
(ARPACK) on the shifted operator A = 1 + tau * L, whose rightmost
eigenvalue 1 corresponds to the NESS; small sectors fall back to a full
dense eigendecomposition, which is what the Arnoldi iteration degenerates
to once the Krylov space exhausts the sector.
"""

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from dataclasses import dataclass, field

from .exceptions import ConvergenceError, DegeneracyError, EmptySpectrumError, PartialResultError
from .lindblad import SectorBasis, build_superoperator_sector, magnetization_block

_DENSE_DIM = 600  # below this, sector eigenproblems are solved densely


@dataclass
class DensityOperator:
    """Operator in the q=0 sector with its Liouvillian eigenvalue.

    kind "ness": Hermitian, unit trace, eigenvalue 0.
    kind "hdm":  Hermitian, traceless, real negative eigenvalue, unit
    Frobenius norm, phase fixed so the largest diagonal entry is positive.
    """

    basis: SectorBasis
    coefficients: np.ndarray
    eigenvalue: complex
    kind: str
    residual: float = 0.0

    @property
    def n(self):
        return self.basis.n

    def trace(self):
        return complex(self.coefficients[self.basis.diagonal_indices()].sum())

    def to_matrix(self):
        return self.basis.embed(self.coefficients)

    def block(self, n_up):
        return magnetization_block(self, n_up)


@dataclass
class Spectrum:
    """Sorted real eigenvalues of one magnetization block."""

    values: np.ndarray
    discarded_count: int = 0
    source: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)


def _hermitize(basis, coeffs):
    return 0.5 * (coeffs + np.conj(coeffs[basis.adjoint_permutation()]))


def _sector_matrix(model, basis=None, sector_matrix=None):
    if basis is None:
        basis = SectorBasis(model.n)
    if sector_matrix is None:
        sector_matrix = build_superoperator_sector(model, basis)
    return basis, sector_matrix


def _shifted_operator(lmat):
    tau = 0.5 / spla.onenormest(lmat)
    return sp.identity(lmat.shape[0], dtype=complex, format="csr") + tau * lmat, tau


def _arnoldi_rightmost(lmat, k, v0, tol, max_iter):
    """Ritz pairs of L with largest real part, via ARPACK on 1 + tau*L."""
    a, tau = _shifted_operator(lmat)
    dim = lmat.shape[0]
    ncv = min(dim, max(4 * k + 1, 30))
    last_err = None
    while True:
        try:
            theta, vecs = spla.eigs(
                a, k=k, which="LR", v0=v0, ncv=ncv, maxiter=max_iter, tol=tol
            )
            return (theta - 1.0) / tau, vecs
        except spla.ArpackNoConvergence as err:
            last_err = err
            if ncv >= min(dim, 16 * k + 240):
                raise ConvergenceError(
                    f"Arnoldi failed to converge (ncv={ncv}, maxiter={max_iter})",
                    best_residual=None,
                ) from last_err
            ncv = min(dim, 2 * ncv)


def find_ness(model, tol=1e-10, max_iter=10000, basis=None, sector_matrix=None):
    """Non-equilibrium steady state of the model.

    Returns a DensityOperator with ||L rho|| / ||rho|| < tol, Hermitized and
    normalized to unit trace.  Raises DegeneracyError when a second
    eigenvalue sits within 1e-10 of zero (symmetry not fully broken) and
    ConvergenceError when the Arnoldi iteration stalls.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    basis, lmat = _sector_matrix(model, basis, sector_matrix)
    dim = basis.size
    # deterministic start: the maximally mixed state, a fair NESS guess
    v0 = np.zeros(dim, dtype=complex)
    v0[basis.diagonal_indices()] = 1.0
    v0 /= np.linalg.norm(v0)
    vals, vecs = _arnoldi_rightmost(lmat, 2, v0, tol * 1e-2, max_iter)
    order = np.argsort(-vals.real)
    vals, vecs = vals[order], vecs[:, order]
    if abs(vals[1]) < 1e-10:
        raise DegeneracyError(
            f"two Liouvillian eigenvalues within 1e-10 of zero: {vals[0]:.3e}, {vals[1]:.3e}"
        )
    coeffs = vecs[:, 0]
    residual = np.linalg.norm(lmat @ coeffs) / np.linalg.norm(coeffs)
    if residual > tol:
        raise ConvergenceError(
            f"NESS residual {residual:.3e} exceeds tol {tol:.1e}", best_residual=residual
        )
    coeffs = _hermitize(basis, coeffs)
    trace = coeffs[basis.diagonal_indices()].sum()
    if abs(trace) < 1e-12:
        raise DegeneracyError("candidate steady state is traceless; zero eigenvalue degenerate")
    coeffs = coeffs / trace
    return DensityOperator(basis, coeffs, 0.0 + 0.0j, "ness", residual=float(residual))


def _fix_mode(basis, coeffs):
    """Phase-fix, Hermitize and normalize one decay-mode vector."""
    diag = coeffs[basis.diagonal_indices()]
    lead = np.argmax(np.abs(diag))
    phase = diag[lead] / abs(diag[lead]) if abs(diag[lead]) > 0 else 1.0
    coeffs = coeffs / phase
    coeffs = _hermitize(basis, coeffs)
    return coeffs / np.linalg.norm(coeffs)


def find_decay_modes(model, k, tol=1e-10, max_iter=10000, realness_tol=1e-9,
                     separation_tol=1e-9, basis=None, sector_matrix=None):
    """The k slowest-decaying Hermitian decay modes.

    Candidates are eigenvalues with |Im| < realness_tol, real part below
    -realness_tol (excluding the steady state) and distance > separation_tol
    from every other computed eigenvalue; the k with largest real part are
    returned, Hermitized and unit-normalized.  Raises PartialResultError
    (carrying what was found) when fewer than k qualify.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    basis, lmat = _sector_matrix(model, basis, sector_matrix)
    dim = basis.size
    m = max(40, 6 * k)
    if dim <= _DENSE_DIM or m >= dim - 2:
        vals, vecs = scipy.linalg.eig(lmat.toarray())
    else:
        rng = np.random.default_rng(2024)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vals, vecs = _arnoldi_rightmost(lmat, m, v0, tol * 1e-2, max_iter)
    order = np.argsort(-vals.real)
    vals, vecs = vals[order], vecs[:, order]

    modes = []
    for idx in range(len(vals)):
        lam = vals[idx]
        if abs(lam.imag) >= realness_tol or lam.real >= -realness_tol:
            continue
        others = np.delete(vals, idx)
        if len(others) and np.min(np.abs(others - lam)) <= separation_tol:
            continue
        coeffs = _fix_mode(basis, vecs[:, idx])
        residual = np.linalg.norm(lmat @ coeffs - lam.real * coeffs)
        modes.append(
            DensityOperator(basis, coeffs, complex(lam.real), "hdm", residual=float(residual))
        )
        if len(modes) == k:
            return modes
    raise PartialResultError(
        f"only {len(modes)} of {k} requested nondegenerate real decay modes found "
        f"among {len(vals)} computed eigenvalues",
        modes,
    )


def block_spectrum(rho, n_up, zero_cutoff=1e-12):
    """Eigenvalues of one fixed-up-count block of a density operator.

    Eigenvalues with |lam| < zero_cutoff * max|lam| are moved to the
    discard count (strong driving pushes NESS weights below double
    precision; they must not pile up as spurious zero spacings).
    """
    block = magnetization_block(rho, n_up)
    herm_err = np.linalg.norm(block - block.conj().T)
    if herm_err > 1e-10 * max(1.0, np.linalg.norm(block)):
        raise ValueError(f"block is not Hermitian (||B - B^dag|| = {herm_err:.2e})")
    vals = np.sort(scipy.linalg.eigvalsh(block))
    scale = np.max(np.abs(vals)) if len(vals) else 0.0
    keep = np.abs(vals) >= zero_cutoff * scale
    discarded = int(len(vals) - keep.sum())
    vals = vals[keep]
    if len(vals) == 0:
        raise EmptySpectrumError(f"no block eigenvalues above cutoff in sector n_up={n_up}")
    return Spectrum(
        values=vals,
        discarded_count=discarded,
        source={"kind": rho.kind, "n": rho.n, "n_up": int(n_up),
                "eigenvalue": complex(rho.eigenvalue)},
    )


def dense_null_space_oracle(model, basis=None, sector_matrix=None):
    """NESS from a full dense SVD of the sector matrix (independent oracle).

    Only for n <= 5.  Raises DegeneracyError unless exactly one singular
    value lies below 1e-9 (relative).
    """
    if model.n > 5:
        raise ValueError("dense oracle is restricted to n <= 5")
    basis, lmat = _sector_matrix(model, basis, sector_matrix)
    u, s, vh = scipy.linalg.svd(lmat.toarray())
    small = s < 1e-9 * s[0]
    if small.sum() != 1:
        raise DegeneracyError(
            f"sector matrix kernel dimension {int(small.sum())} != 1 at tolerance 1e-9"
        )
    coeffs = np.conj(vh[-1])
    residual = np.linalg.norm(lmat @ coeffs)
    coeffs = _hermitize(basis, coeffs)
    trace = coeffs[basis.diagonal_indices()].sum()
    if abs(trace) < 1e-12:
        raise DegeneracyError("oracle kernel vector is traceless")
    coeffs = coeffs / trace
    return DensityOperator(basis, coeffs, 0.0 + 0.0j, "ness", residual=float(residual))
