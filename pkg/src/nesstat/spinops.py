"""Pauli operators, XXZ Hamiltonians and symmetry operators for spin-1/2 chains.

Basis convention (fixed once and for all): the computational basis of an
n-site chain is indexed by integers b in [0, 2^n).  Site 1 is the most
significant bit, bit value 0 means spin up, bit value 1 means spin down.
Hence index 0 is the all-up state and sigma^z has +1 on up spins.
"""

import numpy as np
import scipy.sparse as sp

from dataclasses import dataclass

_SITE_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "id": np.eye(2, dtype=complex),
}

SITE_OPERATOR_KINDS = tuple(_SITE_MATRICES)


def up_counts(states, n):
    """Number of up spins for each basis index in `states` (bit 1 = down)."""
    states = np.asarray(states, dtype=np.uint64)
    return n - np.bitwise_count(states).astype(np.int64)


def site_operator(kind, site, n):
    """Single-site operator embedded in the 2^n-dimensional chain space.

    Parameters
    ----------
    kind : one of "x", "y", "z", "+", "-", "id"
    site : 1-based site index
    n : number of sites

    Returns a CSR matrix acting as identity on every site except `site`.
    """
    if kind not in _SITE_MATRICES:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {SITE_OPERATOR_KINDS}")
    if not 1 <= site <= n:
        raise ValueError(f"site {site} out of range 1..{n}")
    left = sp.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sp.identity(2 ** (n - site), dtype=complex, format="csr")
    op = sp.csr_matrix(_SITE_MATRICES[kind])
    return sp.kron(sp.kron(left, op), right, format="csr")


@dataclass(frozen=True)
class ChainSpec:
    """XXZ chain parameters: size n, anisotropy delta, on-site z-fields."""

    n: int
    delta: float = 0.0
    field: tuple = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("chain needs at least 2 sites")
        f = self.field if self.field is not None else (0.0,) * self.n
        f = tuple(float(b) for b in f)
        if len(f) != self.n:
            raise ValueError(f"field must have exactly {self.n} entries, got {len(f)}")
        object.__setattr__(self, "field", f)


def build_hamiltonian(spec):
    """XXZ Hamiltonian

        H = sum_j (x_j x_{j+1} + y_j y_{j+1} + delta * z_j z_{j+1})
            + sum_j b_j z_j

    with open boundary conditions.  Hermitian; commutes with the total
    up-spin count.
    """
    n = spec.n
    h = sp.csr_matrix((2 ** n, 2 ** n), dtype=complex)
    for j in range(1, n):
        for kind in ("x", "y"):
            h = h + site_operator(kind, j, n) @ site_operator(kind, j + 1, n)
        if spec.delta != 0.0:
            h = h + spec.delta * (site_operator("z", j, n) @ site_operator("z", j + 1, n))
    for j, b in enumerate(spec.field, start=1):
        if b != 0.0:
            h = h + b * site_operator("z", j, n)
    h.sort_indices()
    return h


def staggered_field(n):
    """Period-3 field pattern (-1, -1/2, 0) repeated along the chain.

    Site 1 gets -1, site 2 gets -1/2, site 3 gets 0 and so on; this
    inhomogeneity makes the chain Hamiltonian quantum chaotic.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pattern = (-1.0, -0.5, 0.0)
    return tuple(pattern[(s - 1) % 3] for s in range(1, n + 1))


def total_up_count_operator(n):
    """Diagonal operator counting up spins; eigenvalue on |b> is N_up(b)."""
    diag = up_counts(np.arange(2 ** n), n).astype(complex)
    return sp.diags(diag, format="csr")


def _reverse_bits(states, n):
    out = np.zeros_like(states)
    for j in range(n):
        out |= ((states >> j) & 1) << (n - 1 - j)
    return out


def parity_operator(n):
    """Parity P = X * R: global spin flip composed with left-right reflection.

    A permutation matrix; P^2 = identity.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    states = np.arange(2 ** n, dtype=np.int64)
    mask = 2 ** n - 1
    target = _reverse_bits(states, n) ^ mask
    data = np.ones(2 ** n)
    return sp.csr_matrix((data, (target, states)), shape=(2 ** n, 2 ** n), dtype=complex)


def antiunitary_conjugator(n):
    """Unitary factor Z2 = prod over even sites of sigma^z.

    The antiunitary symmetry is Z2 composed with complex conjugation in the
    computational basis; the conjugation is applied by the caller.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    states = np.arange(2 ** n, dtype=np.int64)
    diag = np.ones(2 ** n, dtype=complex)
    for j in range(2, n + 1, 2):
        bit = (states >> (n - j)) & 1
        diag *= 1.0 - 2.0 * bit
    return sp.diags(diag, format="csr")
