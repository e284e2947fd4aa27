import numpy as np
import pytest

from conftest import cgauss, get_model
from quasitriple.extensions import DEFAULT_PROBES, filter_probes
from quasitriple.numcore import pencil_eigenvalues, rank, weighted_adjoint
from quasitriple.triple import (
    ConstructionError,
    ResolventPointError,
    TripleModel,
    a0_resolvent,
    build,
    check_density,
    check_maximality,
    dirichlet_operator,
    gamma,
    gamma_adjoint,
    gamma_shift_check,
    gamma_star_check,
    gamma_tilde,
    green_defect,
    minimal_operators,
    replace,
    swap,
    weyl_identity_check,
    weyl_representation_check,
)


def _rebuild(model, **changes):
    fields = dict(embed=model.embed, op_T=model.op_T, g0=model.g0, g1=model.g1,
                  embed_t=model.embed_t, op_Tt=model.op_Tt, g0t=model.g0t, g1t=model.g1t)
    fields.update(changes)
    return build(model.space_H, model.space_G, **fields)


def test_build_sl1d_green_noise(sl16):
    assert green_defect(sl16) < 1e-13
    assert sl16.metadata["green_defect"] == green_defect(sl16)


def test_build_rejects_doubled_g1(sl16):
    with pytest.raises(ConstructionError) as info:
        _rebuild(sl16, g1=2 * sl16.g1)
    assert info.value.invariant == "green identity"
    assert info.value.defect > 1e-2


def test_build_rejects_non_injective_stack(syn1):
    g0 = syn1.g0.copy()
    emb = syn1.embed.copy()
    emb[:, 0] = 0
    g0[:, 0] = 0
    with pytest.raises(ConstructionError):
        _rebuild(syn1, embed=emb, g0=g0)


def test_green_defect_linear_in_perturbation(syn1, rng):
    e = cgauss(rng, *syn1.op_T.shape)
    d1 = green_defect(replace(syn1, op_T=syn1.op_T + 1e-6 * e))
    d2 = green_defect(replace(syn1, op_T=syn1.op_T + 2e-6 * e))
    assert d2 / d1 == pytest.approx(2.0, rel=1e-3)


def test_green_defect_zero_model():
    from quasitriple.numcore import WeightedSpace
    z = TripleModel(WeightedSpace.euclidean(2), WeightedSpace.euclidean(1),
                    *([np.zeros((2, 3))] * 2), *([np.zeros((1, 3))] * 2),
                    *([np.zeros((2, 3))] * 2), *([np.zeros((1, 3))] * 2))
    assert green_defect(z) == 0.0


def test_model_arrays_read_only(sl16):
    with pytest.raises(ValueError):
        sl16.op_T[0, 0] = 1.0


def test_density_sl1d(sl16):
    d = check_density(sl16)
    assert d.condition_D and d.condition_DD
    assert d.rank_stack == 2 * sl16.m


def test_density_g1_equal_g0(sl16):
    bad = replace(sl16, g1=sl16.g0, g1t=sl16.g0t)
    assert not check_density(bad).condition_DD


@pytest.mark.parametrize("spec", [("sl1d", {"N": 16}), ("cd1d", {"N": 32}),
                                  ("synthetic", {"seed": 2, "n": 6, "m": 2})])
def test_density_rank_implication(spec):
    model = get_model(spec[0], **spec[1])
    d = check_density(model)
    assert d.rank_g0 == d.rank_g0t == model.m
    assert d.condition_DD


def test_density_rank_implication_fails_at_grid_corners():
    # each corner cell of the five-point grid feeds two boundary faces through one unknown
    model = get_model("ell2d", N=12)
    d = check_density(model)
    assert d.condition_D
    assert d.rank_stack == 2 * model.m - 4
    assert not d.condition_DD


def test_a0_resolvent_residual(sl16):
    h = np.zeros(sl16.n)
    h[0] = 1.0
    sol = a0_resolvent(sl16, -1.0, h)
    a0 = dirichlet_operator(sl16)
    assert np.linalg.norm((a0 + np.eye(sl16.n)) @ sol.u - h) < 1e-11
    np.testing.assert_allclose(sl16.g0 @ sol.f_dom, 0, atol=1e-14)


def test_a0_resolvent_at_eigenvalue(sl16):
    lam = sl16.a0_spectrum[0]
    with pytest.raises(ResolventPointError) as info:
        a0_resolvent(sl16, lam, np.ones(sl16.n))
    assert info.value.rcond < 1e-12


def test_a0_resolvent_zero_rhs(sl16):
    assert np.all(a0_resolvent(sl16, -1.0, np.zeros(sl16.n)).u == 0)


def test_maximality_sl1d(sl16):
    cert = check_maximality(sl16, -1.0)
    assert cert.ok and cert.defect_adjoint < 1e-11


def test_maximality_cd1d_non_selfadjoint(cd32):
    cert = check_maximality(cd32, -1.0)
    assert cert.ok
    a0, a0t = dirichlet_operator(cd32), dirichlet_operator(cd32, "tilde")
    assert np.linalg.norm(a0 - a0t) > 1e-3 * np.linalg.norm(a0)
    adj = weighted_adjoint(a0, cd32.space_H, cd32.space_H)
    assert np.linalg.norm(a0t - adj) < 1e-10 * np.linalg.norm(a0)


def test_maximality_fails_for_scrambled_g0t(syn1, rng):
    mix = np.eye(syn1.m) + cgauss(rng, syn1.m, syn1.m)
    bad = replace(syn1, g0t=mix @ syn1.g0t + cgauss(rng, syn1.m, syn1.m) @ syn1.g1t)
    cert = check_maximality(bad, syn1.lambda0)
    assert not cert.ok
    assert cert.defect_adjoint > 1e-3


def test_minimal_operators_sl1d(sl16):
    mo = minimal_operators(sl16)
    assert mo.dom_S.shape[1] == 16 - 2
    assert mo.adjoint_pair_defect < 1e-12


def test_minimal_operators_synthetic():
    mo = minimal_operators(get_model("synthetic", seed=2, n=6, m=2))
    assert mo.adjoint_pair_defect < 1e-12


def test_minimal_operators_detect_green_violation(sl16):
    bad = replace(sl16, op_T=sl16.op_T * (1 + 1e-3))
    assert minimal_operators(bad).adjoint_pair_defect > 1e-5


def test_gamma_columns_solve_homogeneous_problem(sl16):
    s = gamma(sl16, -1.0)
    f = s.preimage
    assert np.linalg.norm((sl16.op_T + sl16.embed) @ f) < 1e-11 * np.linalg.norm(sl16.op_T)
    np.testing.assert_allclose(sl16.frame_out @ (sl16.g0 @ f), np.eye(2), atol=1e-11)
    assert s.cond_stack >= 1 and np.all(np.isfinite(s.weyl))


def test_gamma_without_boundary():
    model = get_model("synthetic", seed=4, n=5, m=0)
    s = gamma(model, -1.0)
    assert s.gamma.shape == (5, 0) and s.weyl.shape == (0, 0)


def test_gamma_tilde_side_flag(cd32):
    assert gamma_tilde(cd32, 1j).side == "tilde"


def test_gamma_star_examples(sl16, syn1):
    assert gamma_star_check(sl16, -1.0) < 1e-11
    assert gamma_star_check(syn1, 2j) < 1e-10


def test_gamma_star_symmetric_real_point(sl16):
    s = gamma(sl16, -2.0)
    sol = a0_resolvent(sl16, -2.0, np.eye(sl16.n))
    rhs = sl16.frame_out @ (sl16.g1 @ sol.f_dom)
    np.testing.assert_allclose(gamma_adjoint(sl16, s), rhs, atol=1e-11 * np.abs(rhs).max())


def test_gamma_shift_examples(sl16, syn1, rng):
    assert gamma_shift_check(sl16, 1j, 1j) < 1e-13
    assert gamma_shift_check(sl16, -1.0, 2j) < 1e-10
    for _ in range(5):
        lam, nu = cgauss(rng, 2) * 3
        assert gamma_shift_check(syn1, lam, nu) < 1e-10


def test_weyl_identity_conjugate_points(any_model):
    for lam in filter_probes(any_model):
        assert weyl_identity_check(any_model, lam, np.conj(lam)).d1 < 1e-11


def test_weyl_imaginary_part_psd(sl16):
    lam = 0.5 + 2j
    s = gamma(sl16, lam)
    im = (s.weyl - s.weyl.conj().T) / (lam - np.conj(lam))
    assert np.linalg.eigvalsh(0.5 * (im + im.conj().T)).min() > 0
    assert weyl_identity_check(sl16, lam, lam).max() < 1e-10


def test_weyl_hermitian_at_real_points(sl16):
    d = weyl_identity_check(sl16, -3.0, -3.0)
    assert d.d1 < 1e-12
    w = gamma(sl16, -3.0).weyl
    assert np.linalg.norm(w - w.conj().T) < 1e-12 * np.linalg.norm(w)


def test_weyl_representation_examples(sl16, syn1, rng):
    assert weyl_representation_check(sl16, -1.0, -1.0) < 1e-12
    assert weyl_representation_check(sl16, 1 + 1j, -1.0) < 1e-10
    for _ in range(3):
        lam = complex(*rng.standard_normal(2) * 3)
        assert weyl_representation_check(syn1, lam, syn1.lambda0) < 1e-10


def test_identities_all_models(any_model):
    probes = filter_probes(any_model, DEFAULT_PROBES)
    assert probes
    conds = [gamma(any_model, p).cond_stack for p in probes]
    assert max(conds) < 1e8
    for i, lam in enumerate(probes):
        nu = probes[(i + 1) % len(probes)]
        assert gamma_star_check(any_model, lam) < 1e-10
        assert gamma_shift_check(any_model, lam, nu) < 1e-10
        assert weyl_identity_check(any_model, lam, nu).max() < 1e-10
        assert weyl_representation_check(any_model, lam, any_model.lambda0) < 1e-10


def test_preimage_reproduces_boundary_data(any_model):
    for lam in filter_probes(any_model)[:2]:
        s = gamma(any_model, lam)
        np.testing.assert_allclose(any_model.frame_out @ (any_model.g0 @ s.preimage),
                                   np.eye(any_model.m), atol=1e-11)
        res = (any_model.op_T - lam * any_model.embed) @ s.preimage
        assert np.linalg.norm(res) < 1e-11 * max(1.0, np.linalg.norm(any_model.op_T)) * np.linalg.norm(s.preimage)


def test_tilde_spectrum_is_conjugate(any_model):
    a = np.sort_complex(any_model.a0_spectrum)
    b = np.sort_complex(np.conj(any_model.a0t_spectrum))
    assert a.shape == b.shape
    scale = max(1.0, np.abs(a).max())
    assert np.abs(a - b).max() < 1e-8 * scale


def test_swap_triple_recertified(sl16):
    sw = swap(sl16)
    assert green_defect(sw) < 1e-13
    assert check_maximality(sw, sw.lambda0).ok
    # Dirichlet-type operator of the swapped triple is the Neumann-type one: lowest eigenvalue near 0
    ev = pencil_eigenvalues(*sw.dirichlet_pencil()).finite
    assert abs(ev[0]) < 1e-10


def test_rank_of_stacked_boundary_maps(sl16):
    assert rank(np.vstack([sl16.g0, sl16.g1])) == 2 * sl16.m
