import numpy as np
import pytest
import scipy.sparse as sp
from math import comb

from nesstat import lindblad, spinops


def xx_model(n, mu=0.2, mu_bar=0.3, gamma=1.0, deph=0.0, delta=0.0, field=None):
    return lindblad.ChainModel(
        chain=spinops.ChainSpec(n, delta, field),
        bath=lindblad.BathSpec(gamma, mu, mu_bar, deph),
    )


def random_hermitian(dim, rng):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


class TestBathSpec:
    def test_rate_negativity_rejected(self):
        with pytest.raises(ValueError, match=r"mu \+ mu_bar"):
            lindblad.BathSpec(1.0, 0.5, 0.6)
        with pytest.raises(ValueError, match=r"mu - mu_bar"):
            lindblad.BathSpec(1.0, 0.9, -0.2)
        with pytest.raises(ValueError):
            lindblad.BathSpec(-1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            lindblad.BathSpec(1.0, 0.0, 0.0, -0.5)

    def test_boundary_of_allowed_region_ok(self):
        lindblad.BathSpec(0.1, 1.0, 0.0)  # maximal driving is legal


class TestJumpOperators:
    def test_maximal_driving_drops_zero_amplitude(self):
        ops = lindblad.build_jump_operators(xx_model(3, mu=1.0, mu_bar=0.0, gamma=0.1))
        assert len(ops) == 2
        amp = np.sqrt(0.2)
        ref_minus1 = amp * spinops.site_operator("-", 1, 3)
        ref_plus3 = amp * spinops.site_operator("+", 3, 3)
        assert min(abs((ops[0] - ref_minus1)).max(), abs((ops[1] - ref_minus1)).max()) < 1e-15
        assert min(abs((ops[0] - ref_plus3)).max(), abs((ops[1] - ref_plus3)).max()) < 1e-15

    def test_equilibrium_all_four_unit_amplitude(self):
        ops = lindblad.build_jump_operators(xx_model(2, mu=0.0, mu_bar=0.0, gamma=1.0))
        assert len(ops) == 4
        for op in ops:
            assert np.isclose(abs(op).max(), 1.0)

    def test_dephasing_operators(self):
        ops = lindblad.build_jump_operators(xx_model(3, deph=1.0))
        assert len(ops) == 4 + 3
        for j, op in enumerate(ops[4:], start=1):
            ref = spinops.site_operator("z", j, 3) / np.sqrt(2.0)
            assert abs((op - ref)).max() < 1e-15


class TestApplyLiouvillian:
    def test_infinite_temperature_steady_state(self):
        for deph in (0.0, 0.7):
            model = xx_model(3, mu=0.0, mu_bar=0.0, deph=deph, delta=0.4)
            rho = np.eye(8) / 8.0
            assert np.linalg.norm(lindblad.apply_liouvillian(model, rho)) < 1e-14

    def test_trace_annihilation_and_hermiticity(self):
        rng = np.random.default_rng(3)
        model = xx_model(3, deph=0.5, delta=0.8)
        for _ in range(20):
            rho = random_hermitian(8, rng)
            out = lindblad.apply_liouvillian(model, rho)
            assert abs(np.trace(out)) < 1e-12
            assert np.linalg.norm(out - out.conj().T) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lindblad.apply_liouvillian(xx_model(3), np.eye(4))

    def test_matches_kron_superoperator(self):
        rng = np.random.default_rng(9)
        model = xx_model(2)
        full = lindblad.full_superoperator(model).toarray()
        rho = random_hermitian(4, rng)
        ref = (full @ rho.reshape(-1)).reshape(4, 4)
        assert np.allclose(lindblad.apply_liouvillian(model, rho), ref, atol=1e-13)


class TestSectorBasis:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_size_is_central_binomial(self, n):
        basis = lindblad.SectorBasis(n)
        assert basis.size == comb(2 * n, n)
        assert basis.size == sum(comb(n, z) ** 2 for z in range(n + 1))

    def test_pairs_have_equal_up_count(self):
        basis = lindblad.SectorBasis(4)
        assert np.array_equal(basis.z_of[basis.bra], basis.z_of[basis.ket])

    def test_enumeration_deterministic(self):
        a, b = lindblad.SectorBasis(3), lindblad.SectorBasis(3)
        assert np.array_equal(a.bra, b.bra) and np.array_equal(a.ket, b.ket)

    def test_index_roundtrip(self):
        basis = lindblad.SectorBasis(3)
        idx = basis.index_of(basis.bra, basis.ket)
        assert np.array_equal(idx, np.arange(basis.size))

    def test_adjoint_permutation_is_involution(self):
        basis = lindblad.SectorBasis(3)
        p = basis.adjoint_permutation()
        assert np.array_equal(p[p], np.arange(basis.size))

    def test_embed_project_roundtrip(self):
        basis = lindblad.SectorBasis(3)
        rng = np.random.default_rng(1)
        c = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
        assert np.allclose(basis.project(basis.embed(c)), c)


class TestSectorSuperoperator:
    def test_n2_dimension(self):
        basis = lindblad.SectorBasis(2)
        mat = lindblad.build_superoperator_sector(xx_model(2), basis)
        assert mat.shape == (6, 6)

    @pytest.mark.parametrize("kwargs", [
        dict(), dict(deph=1.0), dict(delta=0.5), dict(mu=1.0, mu_bar=0.0, gamma=0.1),
        dict(delta=0.5, field=(-1.0, -0.5, 0.0), mu=0.1, mu_bar=0.0),
    ])
    def test_matches_full_superoperator(self, kwargs):
        n = 3
        model = xx_model(n, **kwargs)
        basis = lindblad.SectorBasis(n)
        mat = lindblad.build_superoperator_sector(model, basis)
        full = lindblad.full_superoperator(model)
        ix = basis.full_indices()
        ref = full[ix][:, ix]
        assert abs((mat - ref)).max() < 1e-13

    def test_dissipative_spectrum(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            n = int(rng.integers(2, 4))
            model = xx_model(
                n,
                mu=float(rng.uniform(-0.5, 0.5)),
                mu_bar=float(rng.uniform(-0.4, 0.4)),
                gamma=float(rng.uniform(0.2, 2.0)),
                deph=float(rng.choice([0.0, 1.0])),
                delta=float(rng.normal()),
            )
            mat = lindblad.build_superoperator_sector(model, lindblad.SectorBasis(n))
            vals = np.linalg.eigvals(mat.toarray())
            assert vals.real.max() <= 1e-12

    def test_sector_closure(self):
        # applying L to a q=0 basis operator never leaks out of the sector
        n = 3
        model = xx_model(n, deph=0.3, delta=0.7)
        basis = lindblad.SectorBasis(n)
        dim = 2 ** n
        inside = np.zeros((dim, dim), dtype=bool)
        inside[basis.bra, basis.ket] = True
        for col in range(0, basis.size, 7):
            c = np.zeros(basis.size)
            c[col] = 1.0
            out = lindblad.apply_liouvillian(model, basis.embed(c))
            assert np.abs(out[~inside]).max() < 1e-13

    def test_action_matches_apply_liouvillian(self):
        model = xx_model(3)
        basis = lindblad.SectorBasis(3)
        mat = lindblad.build_superoperator_sector(model, basis)
        for col in range(basis.size):
            c = np.zeros(basis.size)
            c[col] = 1.0
            ref = basis.project(lindblad.apply_liouvillian(model, basis.embed(c)))
            assert np.allclose(mat.toarray()[:, col], ref, atol=1e-13)

    def test_basis_model_mismatch(self):
        with pytest.raises(ValueError):
            lindblad.build_superoperator_sector(xx_model(3), lindblad.SectorBasis(2))


class TestWeakSymmetry:
    def test_magnetization_rotation_always_symmetric(self):
        nup = spinops.total_up_count_operator(3)
        for alpha in (0.3, 1.7):
            u = sp.diags(np.exp(-1j * alpha * nup.diagonal()))
            for kwargs in (dict(), dict(delta=0.5), dict(deph=1.0)):
                assert lindblad.check_weak_symmetry(xx_model(3, **kwargs), u,
                                                    trials=5, tol=1e-9)

    def test_parity_broken_by_mean_magnetization(self):
        p = spinops.parity_operator(4)
        assert lindblad.check_weak_symmetry(xx_model(4, mu_bar=0.0), p, trials=5, tol=1e-9)
        assert not lindblad.check_weak_symmetry(xx_model(4, mu_bar=0.3), p, trials=5, tol=1e-9)

    def test_parity_broken_for_xxz(self):
        p = spinops.parity_operator(3)
        assert not lindblad.check_weak_symmetry(xx_model(3, delta=0.5, mu_bar=0.3), p,
                                                trials=5, tol=1e-9)

    def test_non_unitary_rejected(self):
        u = sp.diags(np.array([2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], dtype=complex))
        with pytest.raises(ValueError):
            lindblad.check_weak_symmetry(xx_model(3), u, trials=2, tol=1e-9)


class TestMagnetizationBlock:
    def test_block_dimensions(self):
        from nesstat.eigen import dense_null_space_oracle

        rho = dense_null_space_oracle(xx_model(2))
        assert lindblad.magnetization_block(rho, 1).shape == (2, 2)
        assert comb(16, 10) == 8008  # published block size at n=16, ten up spins

    def test_out_of_range(self):
        from nesstat.eigen import dense_null_space_oracle

        rho = dense_null_space_oracle(xx_model(2))
        with pytest.raises(ValueError):
            lindblad.magnetization_block(rho, 3)

    def test_ness_blocks_hermitian_and_off_blocks_vanish(self):
        from nesstat.eigen import dense_null_space_oracle

        rho = dense_null_space_oracle(xx_model(3, delta=0.4))
        full = rho.to_matrix()
        basis = rho.basis
        for n_up in range(4):
            block = lindblad.magnetization_block(rho, n_up)
            assert np.linalg.norm(block - block.conj().T) < 1e-12
        # off-block elements of the embedded operator vanish
        z = basis.z_of
        for i in range(8):
            for j in range(8):
                if z[i] != z[j]:
                    assert abs(full[i, j]) < 1e-10
