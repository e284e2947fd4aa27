"""
Restrictions of ``T`` by boundary conditions and their spectral theory.

A boundary parameter is a factored pair ``(b1, b2)`` of ``m x m`` matrices
acting on ``G`` in raw coordinates; it selects

    A_{B1B2} = T restricted to {f : b1 b2 G1 f = G0 f}.

The direct resolvent is one stacked solve of ``[T - lam*embed; G0 - b1 b2 G1]``.
The Krein formula rebuilds the same resolvent from ``A0`` and boundary data::

    (A_B - lam)^{-1} = (A0 - lam)^{-1} + gamma(lam) b1 (I - b2 M(lam) b1)^{-1} b2 gamma~(conj lam)^*

and the Birman-Schwinger principle locates eigenvalues as the points where
``I - b2 M(lam) b1`` is singular.  Weyl functions and gamma-fields live in the
``W_G``-orthonormal boundary frame, so the parameters are transported there
first (:meth:`BoundaryParameter.framed`).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numcore import (
    LUSolver,
    SingularMatrixError,
    WeightedSpace,
    as_matrix,
    null_basis,
    pencil_eigenvalues,
    rank,
    relative_defect,
    singular_values,
    weighted_adjoint,
)
from .triple import (
    TripleModel,
    gamma,
    gamma_adjoint,
    gamma_star_check,
)

#: reciprocal condition below which ``I - b2 M b1`` is treated as singular
BS_RCOND = 1e-12
PAIRING_TOL = 1e-12
DEFAULT_PROBES = (-1.0, 2j, 1 + 1j, -3 - 1j, 0.5j)
PROBE_MARGIN = 1e-3


class ContractError(ValueError):
    """A documented precondition of an operation does not hold."""


class BoundaryConditionSingular(SingularMatrixError):
    """The restricted stacked system is singular: ``lam`` is an eigenvalue of ``A_B`` or the condition is degenerate."""


class BirmanSchwingerSingular(SingularMatrixError):
    """``I - b2 M(lam) b1`` is singular, so ``lam`` is an eigenvalue of ``A_B``."""

    reason = "birman-schwinger singular"


@dataclass(frozen=True, eq=False)
class BoundaryParameter:
    """Factored boundary parameter; the condition reads ``b1 b2 G1 f = G0 f``."""

    b1: np.ndarray
    b2: np.ndarray
    label: str = ""

    def __post_init__(self):
        b2 = as_matrix(self.b2, name="b2")
        b1 = as_matrix(self.b1, *b2.shape, name="b1")
        if b2.shape[0] != b2.shape[1]:
            raise ValueError("boundary parameters must be square")
        for a in (b1, b2):
            a.setflags(write=False)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)

    @classmethod
    def robin(cls, theta: complex, m: int) -> "BoundaryParameter":
        """``theta * G1 f = G0 f``."""
        theta = complex(theta)
        tag = f"{theta.real:g}" if theta.imag == 0 else f"{theta.real:g}{theta.imag:+g}j"
        return cls(np.eye(m), theta * np.eye(m), f"theta={tag}")

    @classmethod
    def dirichlet(cls, m: int) -> "BoundaryParameter":
        """``(I, 0)``, which recovers ``A0``."""
        return cls(np.eye(m), np.zeros((m, m)), "dirichlet")

    @classmethod
    def from_matrix(cls, b, label: str = "B") -> "BoundaryParameter":
        b = as_matrix(b, name="B")
        return cls(np.eye(b.shape[0]), b, label)

    @property
    def m(self) -> int:
        return self.b2.shape[0]

    @property
    def product(self) -> np.ndarray:
        return self.b1 @ self.b2

    def adjoint(self, space_G: WeightedSpace) -> "BoundaryParameter":
        """Parameter ``(b2^*, b1^*)`` with ``W_G``-adjoints, so that its product is ``(b1 b2)^*``."""
        return BoundaryParameter(weighted_adjoint(self.b2, space_G, space_G),
                                 weighted_adjoint(self.b1, space_G, space_G),
                                 f"adjoint({self.label})")

    def framed(self, model: TripleModel):
        """``(b1, b2)`` expressed in the orthonormal boundary frame of ``model``."""
        self._check(model)
        return model.to_frame(self.b1), model.to_frame(self.b2)

    def _check(self, model: TripleModel):
        if self.m != model.m:
            raise ValueError(f"parameter acts on C^{self.m}, boundary space has dim {model.m}")


# -- direct and Krein resolvents ----------------------------------------------


def _ab_solver(model: TripleModel, param: BoundaryParameter, lam: complex, side="plain") -> LUSolver:
    param._check(model)
    try:
        return model.stack_solver(side, lam, param.product)
    except SingularMatrixError as exc:
        raise BoundaryConditionSingular(
            f"lambda={complex(lam)!r} is in sigma(A_B) or the boundary condition is degenerate",
            exc.rcond) from exc


def ab_solve(model: TripleModel, param: BoundaryParameter, lam: complex, h, side="plain") -> np.ndarray:
    """Carrier solution ``f`` of ``[T - lam*embed; G0 - b1 b2 G1] f = [h; 0]``."""
    return _ab_solver(model, param, lam, side).solve(model.resolvent_rhs(h))


def ab_resolvent_direct(model: TripleModel, param: BoundaryParameter, lam: complex, h,
                        side="plain") -> np.ndarray:
    """``(A_B - lam)^{-1} h`` by a single stacked solve; ``h`` may hold several columns."""
    return model.side(side)[0] @ ab_solve(model, param, lam, h, side)


def ab_resolvent_matrix(model: TripleModel, param: BoundaryParameter, lam: complex, side="plain") -> np.ndarray:
    return ab_resolvent_direct(model, param, lam, np.eye(model.n), side)


def _bs_matrix(model: TripleModel, param: BoundaryParameter, weyl: np.ndarray) -> np.ndarray:
    b1, b2 = param.framed(model)
    return np.eye(model.m) - b2 @ weyl @ b1


def krein_solution(model: TripleModel, param: BoundaryParameter, lam: complex, h):
    """Krein-type solution ``(u, f)``: ``u = (A_B - lam)^{-1} h`` and its carrier preimage ``f``.

    ``gamma~(conj lam)^* h`` is evaluated as ``G1 (A0 - lam)^{-1} h``, which
    reuses the stacked solve that produces ``(A0 - lam)^{-1} h``.
    """
    lam = complex(lam)
    h = np.asarray(h, dtype=np.complex128)
    sample = gamma(model, lam)
    f0 = model.stack_solver("plain", lam).solve(model.resolvent_rhs(h))
    if model.m == 0:
        return model.embed @ f0, f0
    gts_h = model.frame_out @ (model.g1 @ f0)
    b1, b2 = param.framed(model)
    try:
        inner = LUSolver(np.eye(model.m) - b2 @ sample.weyl @ b1, min_rcond=BS_RCOND)
    except SingularMatrixError as exc:
        raise BirmanSchwingerSingular(
            f"I - B2 M(lambda) B1 is singular at lambda={lam!r}; lambda is an eigenvalue of A_B",
            exc.rcond) from exc
    f = f0 + sample.preimage @ (b1 @ inner.solve(b2 @ gts_h))
    return model.embed @ f, f


def krein_resolvent(model: TripleModel, param: BoundaryParameter, lam: complex, h) -> np.ndarray:
    """``(A_B - lam)^{-1} h`` from the Krein-type formula (see :func:`krein_solution`)."""
    return krein_solution(model, param, lam, h)[0]


def boundary_residual(model: TripleModel, param: BoundaryParameter, f) -> float:
    """Relative residual of ``b1 b2 G1 f = G0 f`` for a carrier vector ``f``."""
    g0f = model.g0 @ f
    bg1f = param.product @ (model.g1 @ f)
    scale = max(np.linalg.norm(g0f), np.linalg.norm(bg1f), np.finfo(float).tiny)
    return float(np.linalg.norm(bg1f - g0f) / scale)


def krein_direct_deviation(model: TripleModel, param: BoundaryParameter, lam: complex) -> float:
    """Largest relative column deviation between Krein and direct resolvents over the basis of ``H``."""
    eye = np.eye(model.n)
    rk = krein_resolvent(model, param, lam, eye)
    rd = ab_resolvent_direct(model, param, lam, eye)
    num = np.linalg.norm(rk - rd, axis=0)
    den = np.maximum(np.linalg.norm(rd, axis=0), np.finfo(float).tiny)
    return float(np.max(num / den)) if model.n else 0.0


def ab_resolvent_identity_check(model: TripleModel, param: BoundaryParameter, lam: complex, nu: complex) -> float:
    """Defect of ``R(lam) - R(nu) = (lam - nu) R(lam) R(nu)`` for the direct resolvent."""
    r_l = ab_resolvent_matrix(model, param, lam)
    r_n = ab_resolvent_matrix(model, param, nu)
    rhs = (complex(lam) - complex(nu)) * (r_l @ r_n)
    return relative_defect(r_l - r_n, rhs, r_l, r_n)


@dataclass(frozen=True)
class KreinHypotheses:
    """Finite forms of the closedness and solvability hypotheses of the Krein formula.

    ``distance_to_one`` is ``min |1 - z|`` over the eigenvalues ``z`` of
    ``b2 M(lam) b1``.  The remaining items concern ranges and domains of
    unbounded maps; for everywhere defined matrices they hold automatically
    and ``automatic`` records why.
    """

    lam: complex
    distance_to_one: float
    one_in_resolvent_set: bool
    rank_g0: int
    rank_g0t: int
    automatic: dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return self.one_in_resolvent_set and bool(self.automatic.get("ranks_full", False))


def krein_hypotheses(model: TripleModel, param: BoundaryParameter, lam: complex) -> KreinHypotheses:
    lam = complex(lam)
    m = model.m
    if m == 0:
        dist, ok = np.inf, True
    else:
        b1, b2 = param.framed(model)
        k = b2 @ gamma(model, lam).weyl @ b1
        dist = float(np.min(np.abs(1.0 - np.linalg.eigvals(k))))
        ok = dist > BS_RCOND * max(1.0, float(np.linalg.norm(k, 2)))
    r0, r0t = rank(model.g0), rank(model.g0t)
    full = r0 == m and r0t == m
    auto = {
        "ranks_full": full,
        "(ii) ran gamma~(conj lam)^* in dom B2": "B2 is an m x m matrix, defined on all of G",
        "(iii) ran B2 M(lam) B1 closure": "finite-dimensional ranges are closed",
        "(iv) B1, B2 closable": "matrices are bounded",
        "(v) ran G0 contains ran B1": f"rank G0 = {r0} = m" if r0 == m else f"rank G0 = {r0} < m",
    }
    return KreinHypotheses(lam, dist, bool(ok), r0, r0t, auto)


# -- Birman-Schwinger ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BSResult:
    lam: complex
    is_eigenvalue: bool
    kernel_dim: int
    eigenvectors: np.ndarray
    operator_residual: float
    boundary_residual: float
    bs_residual: float


def bs_test(model: TripleModel, param: BoundaryParameter, lam: complex, tol: float = 1e-9) -> BSResult:
    """Kernel of ``I - b2 M(lam) b1`` and the eigenvectors ``gamma(lam) b1 phi`` it yields.

    Residuals are relative: the operator residual ``(T - lam*embed) f`` is
    scaled by ``(||T|| + |lam|) ||f||`` and the boundary residual by
    ``||G0 f||``.
    """
    lam = complex(lam)
    sample = gamma(model, lam)
    a = _bs_matrix(model, param, sample.weyl)
    sv = singular_values(a)
    bs_res = float(sv[-1] / sv[0]) if sv.size and sv[0] > 0 else 0.0
    kern = null_basis(a, tol) if model.m else np.zeros((0, 0), complex)
    b1, _ = param.framed(model)
    coeffs = b1 @ kern
    vecs = sample.gamma @ coeffs
    op_res = bnd_res = 0.0
    if kern.shape[1]:
        f = sample.preimage @ coeffs
        t_norm = np.linalg.norm(model.op_T, 2) + abs(lam)
        op_res = float(np.linalg.norm((model.op_T - lam * model.embed) @ f) / (t_norm * np.linalg.norm(f)))
        g0f = model.g0 @ f
        bc = param.product @ (model.g1 @ f) - g0f
        bnd_res = float(np.linalg.norm(bc) / max(np.linalg.norm(g0f), np.finfo(float).tiny))
    return BSResult(lam, bool(kern.shape[1]), int(kern.shape[1]), vecs, op_res, bnd_res, bs_res)


def ab_pencil(model: TripleModel, param: BoundaryParameter, side="plain"):
    """Pencil ``([op; G0 - b1 b2 G1], [embed; 0])`` whose finite eigenvalues form ``sigma(A_B)``."""
    param._check(model)
    emb, op, g0, g1 = model.side(side)
    return np.vstack([op, g0 - param.product @ g1]), np.vstack([emb, np.zeros_like(g0)])


def pencil_spectrum_AB(model: TripleModel, param: BoundaryParameter, side="plain", vectors=False):
    return pencil_eigenvalues(*ab_pencil(model, param, side), vectors=vectors)


# -- adjoint duality ---------------------------------------------------------------


def adjoint_duality_check(model: TripleModel, param: BoundaryParameter,
                          param_t: BoundaryParameter, lam: complex) -> float:
    """Defect of ``(A_{B1B2} - lam)^{-1} = ((A~_{B'} - conj lam)^{-1})^*`` with ``W_H``-adjoints."""
    lam = complex(lam)
    wg = model.space_G
    target = weighted_adjoint(param.product, wg, wg)
    pair = relative_defect(param_t.product, target, param.product)
    if not pair <= PAIRING_TOL:
        raise ContractError(f"b1' b2' is not the adjoint of b1 b2 (defect {pair:.3e})")
    r = ab_resolvent_matrix(model, param, lam, "plain")
    rt = ab_resolvent_matrix(model, param_t, np.conj(lam), "tilde")
    adj = weighted_adjoint(rt, model.space_H, model.space_H)
    return relative_defect(r, adj)


# -- eigenvalue search ---------------------------------------------------------------


@dataclass(frozen=True)
class EigenRoot:
    lam: complex
    multiplicity: int
    bs_residual: float
    pencil_distance: float
    pencil_match: bool


@dataclass(frozen=True)
class SearchResult:
    roots: tuple
    flagged: tuple
    pencil: np.ndarray
    diagnostics: tuple

    @property
    def values(self) -> np.ndarray:
        return np.array([r.lam for r in self.roots], dtype=complex)


class _DetFunction:
    """``g(lam) = det(I - b2 M(lam) b1) * prod (lam - p)`` over the poles ``p`` in ``sigma(A0)``.

    The pole factor makes ``g`` proportional to the characteristic polynomial
    of the restricted pencil, which keeps Newton iterations well behaved
    near ``sigma(A0)``.
    """

    def __init__(self, model: TripleModel, param: BoundaryParameter):
        self.model = model
        self.param = param
        self.poles = model.a0_spectrum
        self.b1, self.b2 = param.framed(model)

    def log(self, lam: complex):
        """``(phase, log|g|)`` at ``lam``; raises on points of ``sigma(A0)``."""
        w = gamma(self.model, lam).weyl
        a = np.eye(self.model.m) - self.b2 @ w @ self.b1
        sign, logabs = np.linalg.slogdet(a)
        d = lam - self.poles
        return sign * np.prod(d / np.abs(d)), logabs + np.sum(np.log(np.abs(d)))

    def logabs(self, lam: complex) -> float:
        try:
            return float(self.log(lam)[1])
        except SingularMatrixError:
            return -np.inf

    def log_derivative(self, lam: complex) -> complex:
        """``g'/g`` by central differences of ``g`` with step ``1e-6 (1 + |lam|)``."""
        step = 1e-6 * (1.0 + abs(lam))
        s0, l0 = self.log(lam)
        sp, lp = self.log(lam + step)
        sm, lm = self.log(lam - step)
        rp = (sp / s0) * np.exp(lp - l0)
        rm = (sm / s0) * np.exp(lm - l0)
        return complex((rp - rm) / (2.0 * step))


def _newton(fn: _DetFunction, z: complex, deflate, tol: float, max_iter: int):
    for _ in range(max_iter):
        try:
            s, logabs = fn.log(z)
            if not np.isfinite(logabs):
                return z, True
            ld = fn.log_derivative(z) - sum(1.0 / (z - r) for r in deflate)
        except SingularMatrixError:
            return z, False
        if ld == 0 or not np.isfinite(ld):
            return z, False
        step = 1.0 / ld
        z = z - step
        if abs(step) <= tol * (1.0 + abs(z)):
            return z, True
    return z, False


def _scan_seeds(fn: _DetFunction, region, grid: int) -> list:
    x0, x1, y0, y1 = region
    xs = np.linspace(x0, x1, grid)
    rows = int(np.clip(round(grid * (y1 - y0) / max(x1 - x0, 1e-300)), 3, grid))
    ys = np.linspace(y0, y1, rows) if y1 > y0 else np.array([y0])
    vals = np.array([[fn.logabs(complex(x, y)) for x in xs] for y in ys])
    seeds = []
    ny, nx = vals.shape
    for j in range(ny):
        for i in range(nx):
            v = vals[j, i]
            nb = vals[max(j - 1, 0):j + 2, max(i - 1, 0):i + 2]
            if v <= nb.min():
                seeds.append(complex(xs[i], ys[j]))
    return seeds


def _in_region(z: complex, region, slack: float) -> bool:
    x0, x1, y0, y1 = region
    return x0 - slack <= z.real <= x1 + slack and y0 - slack <= z.imag <= y1 + slack


def eigenvalue_search(model: TripleModel, param: BoundaryParameter, region, grid: int = 64,
                      newton_tol: float = 1e-13, margin: float = PROBE_MARGIN, max_iter: int = 80,
                      match_tol: float = 1e-7, workers: int | None = None) -> SearchResult:
    """Eigenvalues of ``A_B`` in ``region = (re_min, re_max, im_min, im_max)``.

    Local minima of ``|g|`` on a grid seed undeflated Newton runs (in
    parallel, merged in seed order); seeds that land on known roots are then
    restarted sequentially with deflation by the roots found so far.  Roots
    closer than ``margin`` to ``sigma(A0)`` are flagged and dropped.  Every
    root is matched against the restricted pencil.
    """
    param._check(model)
    region = tuple(float(v) for v in region)
    fn = _DetFunction(model, param)
    diag = []
    flagged = []
    for p in fn.poles:
        if _in_region(p, region, margin):
            flagged.append((complex(p), "sigma(A0) point inside the search region"))
    seeds = _scan_seeds(fn, region, grid)
    diag.append(f"{len(seeds)} seeds from a {grid}-point scan")
    slack = 1e-6 * (1.0 + max(abs(v) for v in region))

    def same(a, b):
        return abs(a - b) <= 1e-7 * (1.0 + abs(a))

    def accept(z, roots):
        if not _in_region(z, region, slack):
            return False
        if len(fn.poles) and np.min(np.abs(fn.poles - z)) < margin:
            flagged.append((complex(z), "root within margin of sigma(A0)"))
            return False
        return not any(same(z, r) for r in roots)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        phase1 = list(pool.map(lambda s: _newton(fn, s, (), newton_tol, max_iter), seeds))
    # every converged point is kept for deflation; only accepted ones are reported
    known, roots = [], []

    def record(z):
        if any(same(z, r) for r in known):
            return False
        known.append(z)
        if accept(z, roots):
            roots.append(z)
        return True

    for z, ok in phase1:
        if ok:
            record(z)
    budget = 4 * (model.n + model.m) + len(seeds)
    for seed in seeds:
        while budget > 0:
            budget -= 1
            z, ok = _newton(fn, seed, known, newton_tol, max_iter)
            if ok:
                z, ok = _newton(fn, z, (), newton_tol, max_iter)
            if not (ok and record(z)):
                break
    roots.sort(key=lambda z: (z.real, z.imag))

    pencil = pencil_spectrum_AB(model, param).finite
    pencil_in = pencil[[_in_region(p, region, slack) for p in pencil]] if pencil.size else pencil
    out = []
    for z in roots:
        a = _bs_matrix(model, param, gamma(model, z).weyl)
        sv = singular_values(a)
        res = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
        mult = int(null_basis(a, 1e-7).shape[1])
        dist = float(np.min(np.abs(pencil - z))) if pencil.size else np.inf
        out.append(EigenRoot(complex(z), mult, res, dist, dist <= match_tol))
    if not out:
        diag.append("no root converged from any seed")
    return SearchResult(tuple(out), tuple(flagged), pencil_in, tuple(diag))


@dataclass(frozen=True)
class CompletenessReport:
    matched: int
    missing: tuple
    extra: tuple
    max_distance: float
    min_overlap: float

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra


def bs_completeness(model: TripleModel, param: BoundaryParameter, region, match_tol: float = 1e-7,
                    margin: float = PROBE_MARGIN, **search) -> CompletenessReport:
    """Pairwise comparison of determinant roots with the restricted pencil inside ``region``.

    Pencil eigenvalues within ``margin`` of ``sigma(A0)`` are excluded.  For
    each matched pair, the Birman-Schwinger eigenvector is compared with the
    pencil eigenvector through the ``W_H`` overlap ``|(u, v)| / (|u| |v|)``.
    """
    res = eigenvalue_search(model, param, region, margin=margin, match_tol=match_tol, **search)
    spec = pencil_spectrum_AB(model, param, vectors=True)
    a0 = model.a0_spectrum
    slack = 1e-6 * (1.0 + max(abs(float(v)) for v in region))
    keep = [k for k, p in enumerate(spec.finite)
            if _in_region(p, region, slack) and (a0.size == 0 or np.min(np.abs(a0 - p)) >= margin)]
    targets = list(keep)
    wh = model.space_H
    matched, extra, dists, overlaps = 0, [], [], []
    for r in res.roots:
        if not targets:
            extra.append(r.lam)
            continue
        d = [abs(spec.finite[k] - r.lam) for k in targets]
        j = int(np.argmin(d))
        if d[j] > match_tol:
            extra.append(r.lam)
            continue
        k = targets.pop(j)
        matched += 1
        dists.append(d[j])
        u = bs_test(model, param, r.lam).eigenvectors
        v = model.embed @ spec.vectors[:, k]
        if u.shape[1] == 1:
            u = u[:, 0]
            overlaps.append(abs(wh.inner(u, v)) / (wh.norm(u) * wh.norm(v)))
    missing = tuple(complex(spec.finite[k]) for k in targets)
    return CompletenessReport(matched, missing, tuple(extra), max(dists, default=0.0),
                              min(overlaps, default=1.0))


# -- reports and the symmetric specialization -----------------------------------------


@dataclass(frozen=True)
class ReportEntry:
    name: str
    anchor: str
    defect: float
    tolerance: float
    passed: bool

    @classmethod
    def check(cls, name: str, anchor: str, defect: float, tolerance: float) -> "ReportEntry":
        defect = float(defect)
        return cls(name, anchor, defect, float(tolerance), bool(np.isfinite(defect) and defect <= tolerance))

    def to_dict(self) -> dict:
        d = self.defect if np.isfinite(self.defect) else None
        return {"name": self.name, "anchor": self.anchor, "defect": d,
                "tolerance": self.tolerance, "passed": self.passed}


@dataclass(frozen=True)
class VerificationReport:
    model: dict
    entries: tuple
    certificates: dict

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]

    def to_dict(self) -> dict:
        return {"model": self.model, "passed": self.passed,
                "entries": [e.to_dict() for e in self.entries],
                "certificates": self.certificates}


def filter_probes(model: TripleModel, probes=DEFAULT_PROBES, margin: float = PROBE_MARGIN,
                  extra_spectra=()) -> list:
    """Probes at distance ``>= margin`` from ``sigma(A0)``, ``sigma(A0~)``-conjugates and any extra spectra."""
    spectra = [model.a0_spectrum, np.conj(model.a0t_spectrum), *extra_spectra]
    out = []
    for p in probes:
        p = complex(p)
        if all(s.size == 0 or np.min(np.abs(s - p)) >= margin for s in spectra):
            out.append(p)
    return out


def is_symmetric(model: TripleModel) -> bool:
    return (model.symmetric
            and np.array_equal(model.embed, model.embed_t) and np.array_equal(model.op_T, model.op_Tt)
            and np.array_equal(model.g0, model.g0t) and np.array_equal(model.g1, model.g1t))


def symmetric_suite(model: TripleModel, probes=DEFAULT_PROBES, theta: float = 1.0) -> VerificationReport:
    """Checks specific to symmetric models (tilde side equal to plain side).

    Per probe: ``M(conj lam) = M(lam)^*``; for non-real ``lam`` the identity
    ``(M(lam) - M(lam)^*) / (lam - conj lam) = gamma(lam)^* gamma(lam)`` and
    positivity of ``Im M(lam) / Im lam``; for real ``lam`` Hermiticity of
    ``M(lam)``; the gamma adjoint identity with tilde = plain; and
    self-adjointness of ``A_B`` for the Hermitian Robin parameter
    ``theta * I``.
    """
    if not is_symmetric(model):
        raise ContractError("symmetric_suite needs a model flagged symmetric with identical sides")
    param = BoundaryParameter.robin(theta, model.m)
    robin = pencil_spectrum_AB(model, param).finite
    used = filter_probes(model, probes, extra_spectra=(robin,))
    entries = []
    for lam in used:
        tag = f"[lambda=({lam.real:g},{lam.imag:g})]"
        s = gamma(model, lam)
        sc = gamma(model, np.conj(lam))
        entries.append(ReportEntry.check(f"sym.weyl_conjugate {tag}", "M(conj lam) = M(lam)^*",
                                         relative_defect(sc.weyl, s.weyl.conj().T, s.weyl), 1e-11))
        if lam.imag != 0:
            im = (s.weyl - s.weyl.conj().T) / (lam - np.conj(lam))
            gg = gamma_adjoint(model, s) @ s.gamma
            entries.append(ReportEntry.check(f"sym.im_weyl {tag}",
                                             "Im M(lam) = Im lam gamma(lam)^* gamma(lam)",
                                             relative_defect(im, gg), 1e-10))
            h = 0.5 * (im + im.conj().T)
            emin = float(np.linalg.eigvalsh(h).min()) if model.m else 0.0
            scale = max(float(np.linalg.norm(h, 2)), np.finfo(float).tiny) if model.m else 1.0
            entries.append(ReportEntry.check(f"sym.im_weyl_psd {tag}",
                                             "Im M(lam) / Im lam >= 0", max(0.0, -emin / scale), 1e-12))
        else:
            entries.append(ReportEntry.check(f"sym.weyl_hermitian {tag}", "M(lam) = M(lam)^* for real lam",
                                             relative_defect(s.weyl, s.weyl.conj().T), 1e-12))
        entries.append(ReportEntry.check(f"sym.gamma_star {tag}", "gamma(lam)^* = G1 (A0 - conj lam)^{-1}",
                                         gamma_star_check(model, lam), 1e-10))
        entries.append(ReportEntry.check(f"sym.self_adjoint_AB {tag}",
                                         "(A_B - lam)^{-1} = ((A_B - conj lam)^{-1})^*, B Hermitian",
                                         adjoint_duality_check(model, param, param, lam), 1e-10))
    imag = float(np.max(np.abs(robin.imag))) if robin.size else 0.0
    scale = max(1.0, float(np.max(np.abs(robin)))) if robin.size else 1.0
    entries.append(ReportEntry.check("sym.real_spectrum_AB", "sigma(A_B) real for Hermitian B",
                                     imag / scale, 1e-8))
    return VerificationReport({"kind": model.metadata.get("kind", "model")}, tuple(entries),
                              {"probes": [[p.real, p.imag] for p in used], "theta": theta})
