import numpy as np
import pytest

from conftest import get_model
from quasitriple.models import (
    MAX_UNKNOWNS_2D,
    Coefficients1D,
    Grid2D,
    PoleError,
    analytic_dtn_1d,
    builtin,
    convection_diffusion_1d,
    elliptic_2d,
    sturm_liouville_1d,
    synthetic_pair,
)
from quasitriple.numcore import pencil_eigenvalues
from quasitriple.triple import (
    check_maximality,
    dirichlet_operator,
    gamma,
    green_defect,
    weyl_identity_check,
)


def _order(errs):
    errs = np.asarray(errs)
    return np.log2(errs[:-1] / errs[1:])


def test_synthetic_green_exact():
    assert green_defect(synthetic_pair(1, 8, 3)) < 1e-12


def test_synthetic_deterministic():
    a, b = synthetic_pair(7, 5, 2), synthetic_pair(7, 5, 2)
    for name in ("embed", "op_T", "g0", "g1", "embed_t", "op_Tt", "g0t", "g1t"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    np.testing.assert_array_equal(a.space_H.gram, b.space_H.gram)
    assert a.lambda0 == b.lambda0


def test_synthetic_distinct_seeds_differ():
    a, b = synthetic_pair(1, 5, 2), synthetic_pair(2, 5, 2)
    assert np.linalg.norm(a.op_T - b.op_T) > 1e-3


def test_synthetic_without_boundary():
    model = synthetic_pair(3, 4, 0)
    a0 = dirichlet_operator(model)
    np.testing.assert_allclose(a0, model.op_T @ np.linalg.inv(model.embed), atol=1e-12)
    assert check_maximality(model, model.lambda0).ok


def test_synthetic_rejects_bad_sizes():
    with pytest.raises(ValueError):
        synthetic_pair(1, 0, 2)


def test_sl1d_green_and_flag(sl16):
    assert green_defect(sl16) < 1e-13
    assert sl16.symmetric and sl16.dim_D == 16 + 2


def test_sl1d_dirichlet_eigenvalue_order():
    errs = []
    for n in (16, 32, 64):
        ev = get_model("sl1d", N=n).a0_spectrum
        errs.append(abs(ev[0].real - np.pi ** 2))
    assert _order(errs).min() >= 1.9


def test_sl1d_constant_potential_shift():
    a = sturm_liouville_1d(Coefficients1D(16)).a0_spectrum
    b = sturm_liouville_1d(Coefficients1D(16, q=5.0)).a0_spectrum
    np.testing.assert_allclose(b - a, 5.0, atol=1e-10)


def test_sl1d_variable_coefficients():
    model = sturm_liouville_1d(Coefficients1D(24, p=lambda x: 1 + x ** 2, q=lambda x: np.cos(x)))
    assert green_defect(model) < 1e-13
    assert check_maximality(model, model.lambda0).ok


def test_coefficients_invariants():
    with pytest.raises(ValueError):
        Coefficients1D(2)
    with pytest.raises(ValueError):
        Coefficients1D(8, p=lambda x: x - 0.5)


def test_sl1d_rejects_complex_potential():
    with pytest.raises(ValueError):
        sturm_liouville_1d(Coefficients1D(8, q=1j))


def test_cd1d_reduces_to_sl1d():
    sl = sturm_liouville_1d(Coefficients1D(16, q=2.0))
    cd = convection_diffusion_1d(Coefficients1D(16, q=2.0, b=0.0, c=2.0))
    for name in ("embed", "op_T", "g0", "g1", "embed_t", "op_Tt", "g0t", "g1t"):
        np.testing.assert_array_equal(getattr(cd, name), getattr(sl, name))


def test_cd1d_adjoint_defect(cd32):
    cert = check_maximality(cd32, -1.0)
    assert cert.ok and cert.defect_adjoint < 1e-11


def test_cd1d_conjugate_spectra():
    model = convection_diffusion_1d(Coefficients1D(16, b=2.0, c=1 + 0.5j))
    a = np.sort_complex(model.a0_spectrum)
    b = np.sort_complex(np.conj(model.a0t_spectrum))
    assert np.abs(a - b).max() < 1e-8 * np.abs(a).max()


def test_cd1d_tilde_conormal_includes_convective_flux():
    b = 2.0
    model = convection_diffusion_1d(Coefficients1D(400, b=b))
    x = np.concatenate([(np.arange(400) + 0.5) / 400, [0.0, 1.0]])
    g = np.exp(x)
    g1t = model.g1t @ g
    # inward conormal of the formal adjoint: g'(0) + b g(0) and -g'(1) - b g(1)
    np.testing.assert_allclose(g1t.real, [1 + b, -(np.e + b * np.e)], rtol=2e-2)


def test_ell2d_weyl_hermitian_negative_definite():
    model = get_model("ell2d", N=12)
    w = gamma(model, -1.0).weyl
    assert np.linalg.norm(w - w.conj().T) < 1e-10 * np.linalg.norm(w)
    assert np.linalg.eigvalsh(0.5 * (w + w.conj().T)).max() < 0


def test_ell2d_convection_breaks_symmetry():
    model = elliptic_2d(Grid2D(10, 10, beta=(1.0, 0.5)))
    assert not model.symmetric
    w = gamma(model, -1.0).weyl
    assert np.linalg.norm(w - w.conj().T) > 1e-6 * np.linalg.norm(w)
    assert weyl_identity_check(model, -1.0, 2j).max() < 1e-10


def test_ell2d_corner_entry_refinement():
    # DtN entry at the boundary face nearest the corner, in raw coordinates
    vals = []
    for n in (8, 16, 32):
        model = elliptic_2d(Grid2D(n, n))
        raw = model.frame_in @ gamma(model, -1.0).weyl @ model.frame_out
        vals.append(raw[0, 0] * (1.0 / n))
    d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
    assert d2 <= d1


def test_ell2d_size_guard():
    with pytest.raises(ValueError):
        elliptic_2d(Grid2D(150, 150))
    assert 150 * 150 > MAX_UNKNOWNS_2D


def test_analytic_dtn_zero_limit():
    np.testing.assert_allclose(analytic_dtn_1d(0.0), [[-1, 1], [1, -1]], atol=1e-14)
    np.testing.assert_allclose(analytic_dtn_1d(1e-4), analytic_dtn_1d(1e-7), atol=1e-4)


def test_analytic_dtn_negative_lambda():
    t = 1.0
    m = analytic_dtn_1d(-t * t)
    np.testing.assert_allclose(m[0, 0], -t / np.tanh(t), rtol=1e-14)
    np.testing.assert_allclose(m[0, 1], t / np.sinh(t), rtol=1e-14)


@pytest.mark.parametrize("lam", [-5.0, -0.3, 3.0, 20.0 + 1j])
def test_analytic_dtn_symmetric(lam):
    m = analytic_dtn_1d(lam)
    assert m[0, 1] == m[1, 0] and m[0, 0] == m[1, 1]


def test_analytic_dtn_pole():
    with pytest.raises(PoleError):
        analytic_dtn_1d(np.pi ** 2)


def test_discrete_dtn_matches_analytic():
    w = gamma(get_model("sl1d", N=256), -1.0).weyl
    assert np.abs(w - analytic_dtn_1d(-1.0)).max() < 1e-3


def test_dtn_convergence_order():
    errs = [np.abs(gamma(get_model("sl1d", N=n), -1.0).weyl - analytic_dtn_1d(-1.0)).max()
            for n in (16, 32, 64, 128)]
    assert _order(errs).min() >= 1.9


def test_sl1d_dirichlet_pencil_approximates_k_pi_squared():
    ev = pencil_eigenvalues(*get_model("sl1d", N=64).dirichlet_pencil()).finite.real
    np.testing.assert_allclose(ev[:3], (np.pi * np.arange(1, 4)) ** 2, rtol=5e-3)


def test_builtin_unknown():
    with pytest.raises(KeyError):
        builtin("nope")


def test_every_builtin_certified(any_model):
    assert green_defect(any_model) < 1e-12
    assert check_maximality(any_model, any_model.lambda0).ok
