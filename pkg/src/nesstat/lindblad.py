"""Lindblad models for boundary-driven chains and their Liouvillian superoperator.

The Liouvillian is

    L(rho) = -i [H, rho] + sum_mu ( 2 L_mu rho L_mu^dag - {L_mu^dag L_mu, rho} )

with four boundary driving operators (raising/lowering on the first and last
site) and, optionally, one dephasing operator per site.  The total up-spin
count generates a weak symmetry, so the superoperator block-decomposes by
magnetization difference q; the q = 0 block (spanned by |i><j| with equal
up counts) contains the steady state and all Hermitian decay modes and is
the only block materialized here.
"""

import functools

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from dataclasses import dataclass

from . import spinops


@dataclass(frozen=True)
class BathSpec:
    """Boundary driving (Gamma, mu, mu_bar) plus bulk dephasing strength."""

    gamma_drive: float = 1.0
    mu: float = 0.0
    mu_bar: float = 0.0
    gamma_deph: float = 0.0

    def __post_init__(self):
        if self.gamma_drive <= 0:
            raise ValueError("gamma_drive must be positive")
        if self.gamma_deph < 0:
            raise ValueError("gamma_deph must be nonnegative")
        if abs(self.mu + self.mu_bar) > 1.0:
            raise ValueError(
                f"|mu + mu_bar| = {abs(self.mu + self.mu_bar)} > 1: "
                "driving rates Gamma(1 -+ mu -+ mu_bar) would be negative"
            )
        if abs(self.mu - self.mu_bar) > 1.0:
            raise ValueError(
                f"|mu - mu_bar| = {abs(self.mu - self.mu_bar)} > 1: "
                "driving rates Gamma(1 -+ mu +- mu_bar) would be negative"
            )


@dataclass(frozen=True)
class ChainModel:
    """Full physical specification: closed chain plus bath couplings."""

    chain: spinops.ChainSpec
    bath: BathSpec

    @property
    def n(self):
        return self.chain.n


def build_jump_operators(model):
    """Lindblad jump operators of the model, prefactors included.

    Driving:  sqrt(Gamma(1-mu+mu_bar)) s+_1, sqrt(Gamma(1+mu-mu_bar)) s-_1,
              sqrt(Gamma(1+mu+mu_bar)) s+_n, sqrt(Gamma(1-mu-mu_bar)) s-_n;
    operators whose rate vanishes (maximal driving) are dropped.
    Dephasing: sqrt(gamma) * (1/sqrt(2)) sz_j on every site when gamma > 0.
    """
    n = model.n
    b = model.bath
    g, mu, mb = b.gamma_drive, b.mu, b.mu_bar
    ops = []
    for rate, kind, site in (
        (g * (1 - mu + mb), "+", 1),
        (g * (1 + mu - mb), "-", 1),
        (g * (1 + mu + mb), "+", n),
        (g * (1 - mu - mb), "-", n),
    ):
        if rate > 0.0:
            ops.append(np.sqrt(rate) * spinops.site_operator(kind, site, n))
    if b.gamma_deph > 0.0:
        amp = np.sqrt(b.gamma_deph / 2.0)
        for j in range(1, n + 1):
            ops.append(amp * spinops.site_operator("z", j, n))
    return ops


@functools.lru_cache(maxsize=16)
def _model_operators(model):
    h = spinops.build_hamiltonian(model.chain)
    jumps = build_jump_operators(model)
    rates = [(l.getH() @ l).tocsr() for l in jumps]
    return h, jumps, rates


def apply_liouvillian(model, rho):
    """Apply the Liouvillian to a dense density matrix (2^n x 2^n).

    Trace of the result vanishes and Hermitian input maps to Hermitian
    output, both to machine precision.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = 2 ** model.n
    if rho.shape != (dim, dim):
        raise ValueError(f"rho must be {dim}x{dim}, got {rho.shape}")
    h, jumps, rates = _model_operators(model)
    out = -1j * (h @ rho - rho @ h)
    for l, ldl in zip(jumps, rates):
        out = out + 2.0 * (l @ rho @ l.getH().toarray())
        out = out - (ldl @ rho) - (rho @ ldl)
    return np.asarray(out)


class SectorBasis:
    """Ordered basis |i><j| of the magnetization-difference-zero sector.

    Pairs are grouped into blocks of fixed up count Z = 0..n; within a block
    the bra index i varies slowest and both i and j run over the Z-class
    states in increasing integer order.  Total length C(2n, n).
    """

    def __init__(self, n):
        self.n = n
        dim = 2 ** n
        states = np.arange(dim, dtype=np.int64)
        self.z_of = spinops.up_counts(states, n)
        order = np.argsort(self.z_of, kind="stable")
        self.states_by_z = [np.sort(order[self.z_of[order] == z]) for z in range(n + 1)]
        self.class_counts = np.array([len(s) for s in self.states_by_z])
        # rank of each state within its up-count class
        self.pos = np.zeros(dim, dtype=np.int64)
        for s in self.states_by_z:
            self.pos[s] = np.arange(len(s))
        self.block_offsets = np.concatenate([[0], np.cumsum(self.class_counts ** 2)])
        self.size = int(self.block_offsets[-1])
        self.bra = np.concatenate(
            [np.repeat(s, len(s)) for s in self.states_by_z]
        )
        self.ket = np.concatenate(
            [np.tile(s, len(s)) for s in self.states_by_z]
        )

    def index_of(self, i, j):
        """Sector index of |i><j| (vectorized); caller guarantees z(i) = z(j)."""
        z = self.z_of[i]
        return self.block_offsets[z] + self.pos[i] * self.class_counts[z] + self.pos[j]

    def adjoint_permutation(self):
        """Permutation p with coefficients[p] = coefficients of the adjoint's pairs."""
        return self.index_of(self.ket, self.bra)

    def diagonal_indices(self):
        """Sector indices of the pairs |i><i| (the operator diagonal)."""
        states = np.arange(2 ** self.n, dtype=np.int64)
        return self.index_of(states, states)

    def full_indices(self):
        """Row-major vectorized full-space index 2^n * i + j of each pair."""
        return self.bra * (2 ** self.n) + self.ket

    def embed(self, coefficients):
        """Dense 2^n x 2^n matrix built from sector coefficients."""
        dim = 2 ** self.n
        rho = np.zeros((dim, dim), dtype=complex)
        rho[self.bra, self.ket] = coefficients
        return rho

    def project(self, rho):
        """Sector coefficients of a full-space matrix (q != 0 part ignored)."""
        return np.asarray(rho)[self.bra, self.ket]


def _sector_kron(a, b, basis, rows_out, cols_out, data_out):
    """Accumulate the q=0 restriction of the map rho -> A rho B^T.

    Appends COO triples for the sector matrix with entries
    M[(i', j'), (i, j)] = A[i', i] * B[j', j] restricted to pairs with equal
    up counts on both sides.  Entries of A and B are joined on the up-count
    key (z_col, z_row); within each key the contribution is the outer
    product of the two entry lists.
    """
    a = a.tocoo()
    b = b.tocoo()
    z = basis.z_of
    key_a = (z[a.col] * (basis.n + 1) + z[a.row])
    key_b = (z[b.col] * (basis.n + 1) + z[b.row])
    keys = np.intersect1d(np.unique(key_a), np.unique(key_b))
    for key in keys:
        sel_a = key_a == key
        sel_b = key_b == key
        ar, ac, av = a.row[sel_a], a.col[sel_a], a.data[sel_a]
        br, bc, bv = b.row[sel_b], b.col[sel_b], b.data[sel_b]
        ma, mb = len(ar), len(br)
        zr = z[ar[0]]
        zc = z[ac[0]]
        row_base = basis.block_offsets[zr] + basis.pos[ar] * basis.class_counts[zr]
        col_base = basis.block_offsets[zc] + basis.pos[ac] * basis.class_counts[zc]
        rows_out.append(np.repeat(row_base, mb) + np.tile(basis.pos[br], ma))
        cols_out.append(np.repeat(col_base, mb) + np.tile(basis.pos[bc], ma))
        data_out.append(np.repeat(av, mb) * np.tile(bv, ma))


def build_superoperator_sector(model, basis):
    """Sparse matrix of the Liouvillian on the q = 0 sector.

    Acts on coefficient vectors over `basis`; dimension C(2n, n).
    """
    if basis.n != model.n:
        raise ValueError(f"basis is for n={basis.n}, model has n={model.n}")
    h, jumps, rates = _model_operators(model)
    dim = 2 ** model.n
    eye = sp.identity(dim, dtype=complex, format="csr")

    mat = sp.csr_matrix((basis.size, basis.size), dtype=complex)
    # rho -> A rho B contributes _sector_kron(A, B.T); identity transposes freely
    terms = [(-1j * h, eye), (eye, 1j * h.transpose())]
    for l, ldl in zip(jumps, rates):
        terms.append((2.0 * l, l.conjugate()))
        terms.append((-ldl, eye))
        terms.append((eye, -ldl.transpose()))
    for a, b in terms:
        rows, cols, data = [], [], []
        _sector_kron(a, b, basis, rows, cols, data)
        if not rows:
            continue
        part = sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(basis.size, basis.size),
        )
        mat = mat + part
    mat.sort_indices()
    return mat


def full_superoperator(model):
    """Dense-route oracle: the full 4^n x 4^n superoperator via Kronecker products.

    Row-major vectorization, vec(A rho B) = (A kron B^T) vec(rho).  Only
    sensible at small n; used to verify the sector construction.
    """
    h, jumps, rates = _model_operators(model)
    dim = 2 ** model.n
    eye = sp.identity(dim, dtype=complex, format="csr")
    mat = -1j * (sp.kron(h, eye) - sp.kron(eye, h.transpose()))
    for l, ldl in zip(jumps, rates):
        mat = mat + 2.0 * sp.kron(l, l.conjugate())
        mat = mat - sp.kron(ldl, eye) - sp.kron(eye, ldl.transpose())
    return mat.tocsr()


def check_weak_symmetry(model, u, trials=10, tol=1e-9, seed=7):
    """Test whether U L(rho) U^dag = L(U rho U^dag) on random Hermitian probes.

    Returns True iff the relative Frobenius mismatch stays below `tol` for
    every probe.  `u` must be unitary within `tol`.
    """
    dim = 2 ** model.n
    u = sp.csr_matrix(u)
    if u.shape != (dim, dim):
        raise ValueError(f"u must be {dim}x{dim}")
    unit_err = spla.norm(u.getH() @ u - sp.identity(dim, format="csr"))
    if unit_err > max(tol, 1e-9) * dim:
        raise ValueError(f"u is not unitary (||u^dag u - 1|| = {unit_err:.2e})")
    ud = u.getH()
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = (a + a.conj().T) / 2.0
        lhs = (u @ apply_liouvillian(model, rho) @ ud.toarray())
        rhs = apply_liouvillian(model, np.asarray(u @ rho @ ud.toarray()))
        scale = np.linalg.norm(apply_liouvillian(model, rho))
        if np.linalg.norm(lhs - rhs) > tol * scale:
            return False
    return True


def magnetization_block(rho, n_up):
    """Dense Hermitian block of a q=0 operator on states with `n_up` up spins.

    `rho` must expose `basis` (a SectorBasis) and `coefficients`; the block
    has dimension C(n, n_up).
    """
    basis = rho.basis
    if not 0 <= n_up <= basis.n:
        raise ValueError(f"n_up must be in 0..{basis.n}, got {n_up}")
    d = int(basis.class_counts[n_up])
    start = int(basis.block_offsets[n_up])
    block = np.asarray(rho.coefficients[start:start + d * d]).reshape(d, d)
    return block
