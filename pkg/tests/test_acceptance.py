"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the summary lines
alone.
"""

import json
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, MODEL_SPECS, get_model, model_id
from quasitriple.cli import main
from quasitriple.extensions import (
    DEFAULT_PROBES,
    BoundaryParameter,
    adjoint_duality_check,
    bs_completeness,
    eigenvalue_search,
    filter_probes,
    krein_direct_deviation,
    pencil_spectrum_AB,
    symmetric_suite,
)
from quasitriple.models import analytic_dtn_1d
from quasitriple.triple import (
    RESOLVENT_RCOND,
    check_maximality,
    gamma,
    gamma_shift_check,
    gamma_star_check,
    green_defect,
    weyl_identity_check,
    weyl_representation_check,
)

THETAS = (0.3, 1.0, 1 + 1j)


def _models():
    return [(model_id(s), get_model(s[0], **s[1])) for s in MODEL_SPECS]


def _report(k, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _order(errs):
    errs = np.asarray(errs)
    return np.log2(errs[:-1] / errs[1:])


def test_c01_green_exactness():
    t = time.perf_counter()
    worst = max(green_defect(m) for _, m in _models())
    dt = time.perf_counter() - t
    assert _report(1, worst < 1e-12, f"green exactness, max defect {worst:.2e} < 1e-12 ({dt:.1f}s incl. builds)")


def test_c02_maximality_certificate():
    worst, min_rcond = 0.0, np.inf
    ok = True
    for _, m in _models():
        c = check_maximality(m, m.lambda0)
        ok &= c.ok and min(c.rcond_plain, c.rcond_tilde) > RESOLVENT_RCOND
        worst = max(worst, c.defect_adjoint)
        min_rcond = min(min_rcond, c.rcond_plain, c.rcond_tilde)
    ok &= worst < 1e-10
    assert _report(2, ok, f"condition (M) certificate, adjoint defect {worst:.2e} < 1e-10, min rcond {min_rcond:.1e}")


def test_c03_gamma_identities():
    star = shift = 0.0
    for _, m in _models():
        probes = filter_probes(m, DEFAULT_PROBES)
        for i, lam in enumerate(probes):
            star = max(star, gamma_star_check(m, lam))
            shift = max(shift, gamma_shift_check(m, lam, probes[(i + 1) % len(probes)]))
    assert _report(3, max(star, shift) < 1e-10,
                   f"gamma-field identities, adjoint {star:.2e}, shift {shift:.2e} < 1e-10")


def test_c04_weyl_identities():
    ident = rep = 0.0
    for _, m in _models():
        probes = filter_probes(m, DEFAULT_PROBES)
        for i, lam in enumerate(probes):
            mu = probes[(i + 1) % len(probes)]
            ident = max(ident, weyl_identity_check(m, lam, mu).max(),
                        weyl_identity_check(m, lam, np.conj(lam)).max())
            rep = max(rep, weyl_representation_check(m, lam, m.lambda0))
    assert _report(4, max(ident, rep) < 1e-10,
                   f"Weyl identities, difference formula {ident:.2e}, representation {rep:.2e} < 1e-10")


def test_c05_krein_vs_direct():
    t = time.perf_counter()
    worst, count = 0.0, 0
    for _, m in _models():
        for theta in THETAS:
            p = BoundaryParameter.robin(theta, m.m)
            spec = pencil_spectrum_AB(m, p).finite
            for lam in filter_probes(m, DEFAULT_PROBES, extra_spectra=(spec,)):
                worst = max(worst, krein_direct_deviation(m, p, lam))
                count += 1
    dt = time.perf_counter() - t
    ok = worst < 1e-9 and dt < 60 and count > 0
    assert _report(5, ok, f"Krein vs direct, max deviation {worst:.2e} < 1e-9 over {count} (model, theta, probe) "
                          f"cases with all basis rhs, {dt:.1f}s < 60s")


def test_c06_birman_schwinger_completeness():
    dist, overlap, ok = 0.0, 1.0, True
    for name in ("sl1d", "cd1d"):
        m = get_model(name, N=16)
        p = BoundaryParameter.robin(1.0, m.m)
        region = (-5.0, 300.0, -2.0, 2.0)
        lowest = pencil_spectrum_AB(m, p).finite[:5]
        ok &= all(region[0] < z.real < region[1] for z in lowest)
        rep = bs_completeness(m, p, region)
        ok &= rep.ok and rep.matched >= 5
        dist = max(dist, rep.max_distance)
        overlap = min(overlap, rep.min_overlap)
    ok &= dist < 1e-7 and overlap > 1 - 1e-8
    assert _report(6, ok, f"Birman-Schwinger completeness, root/pencil distance {dist:.2e} < 1e-7, "
                          f"eigenvector overlap 1-{1 - overlap:.1e} > 1-1e-8")


def test_c07_duality():
    rng = np.random.Generator(np.random.PCG64(7))
    cd = get_model("cd1d", N=32)
    sl = get_model("sl1d", N=16)
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    params = [BoundaryParameter.from_matrix(b), BoundaryParameter.robin(1 + 1j, 2)]
    d_cd = 0.0
    for p in params:
        for lam in filter_probes(cd, DEFAULT_PROBES, extra_spectra=(pencil_spectrum_AB(cd, p).finite,)):
            d_cd = max(d_cd, adjoint_duality_check(cd, p, p.adjoint(cd.space_G), lam))
    h = 0.5 * (b + b.conj().T)
    herm = [BoundaryParameter.from_matrix(h), BoundaryParameter.robin(1.0, 2)]
    d_sl, imag = 0.0, 0.0
    for p in herm:
        for lam in filter_probes(sl, DEFAULT_PROBES, extra_spectra=(pencil_spectrum_AB(sl, p).finite,)):
            d_sl = max(d_sl, adjoint_duality_check(sl, p, p, lam))
        roots = eigenvalue_search(sl, p, (-50.0, 300.0, -2.0, 2.0)).values
        imag = max(imag, float(np.abs(roots.imag).max()))
    ok = d_cd < 1e-9 and d_sl < 1e-10 and imag < 1e-8
    assert _report(7, ok, f"duality, cd1d (B, B*) {d_cd:.2e} < 1e-9, sl1d Hermitian B {d_sl:.2e} < 1e-10, "
                          f"max |Im lambda| {imag:.1e} < 1e-8")


def test_c08_symmetric_suite():
    psd, conj, ok = 0.0, 0.0, True
    for name, kw in (("sl1d", {"N": 16}), ("ell2d", {"N": 12})):
        rep = symmetric_suite(get_model(name, **kw))
        ok &= rep.passed
        for e in rep.entries:
            if e.name.startswith("sym.im_weyl_psd"):
                psd = max(psd, e.defect)
            if e.name.startswith("sym.weyl_conjugate"):
                conj = max(conj, e.defect)
    ok &= psd <= 1e-12 and conj < 1e-11
    assert _report(8, ok, f"symmetric suite, PSD violation {psd:.1e} <= 1e-12, M(conj lam) = M(lam)^* {conj:.2e} < 1e-11")


def test_c09_continuum_convergence():
    ns = (16, 32, 64, 128)
    dtn, eig = [], []
    for n in ns:
        m = get_model("sl1d", N=n)
        dtn.append(np.abs(gamma(m, -1.0).weyl - analytic_dtn_1d(-1.0)).max())
        eig.append(abs(m.a0_spectrum[0].real - np.pi ** 2))
    o_dtn, o_eig = _order(dtn).min(), _order(eig).min()
    ok = o_dtn >= 1.9 and o_eig >= 1.9
    assert _report(9, ok, f"continuum convergence, DtN order {o_dtn:.3f}, Dirichlet eigenvalue order {o_eig:.3f} >= 1.9")


def test_c10_determinism(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        code = main(["verify", "--model", "sl1d:N=16", "--no-timestamp", "--out", str(path)])
        outs.append((code, path.read_bytes()))
    ok = outs[0] == outs[1] and outs[0][0] == 0 and json.loads(outs[0][1])["passed"]
    assert _report(10, ok, f"determinism, two verify runs byte-identical ({len(outs[0][1])} bytes)")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c")]
    failed = 0
    for fn in tests:
        try:
            if fn is test_c10_determinism:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
