"""
Finite realizations of triples for adjoint pairs.

A :class:`TripleModel` stores the state space ``H``, the boundary space
``G`` and, for each side (``plain`` / ``tilde``), a domain carrier with

* ``embed``  -- the inclusion of the carrier into ``H``,
* ``op``     -- the action of ``T`` (resp. ``T~``) as a map carrier -> ``H``,
* ``g0, g1`` -- the boundary maps carrier -> ``G``.

Green's identity becomes the matrix identity::

    embed_t^H W_H T - Tt^H W_H embed = G0t^H W_G G1 - G1t^H W_G G0

With carrier dimension ``n + m`` the stacked map ``[embed; g0]`` is square,
and the resolvent of ``A0`` and the gamma-field at ``lam`` are both a single
LU solve of ``[T - lam*embed; g0]``.

Gamma-fields and Weyl functions are returned in a ``W_G``-orthonormal frame
of ``G`` (coordinates ``c = L^H v`` with ``W_G = L L^H``), so that on the
boundary side every adjoint is a plain conjugate transpose.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
import scipy.linalg as sla

from .numcore import (
    LUSolver,
    ShapeError,
    SingularMatrixError,
    WeightedSpace,
    as_matrix,
    null_basis,
    pencil_eigenvalues,
    rank,
    relative_defect,
    weighted_adjoint,
)

Side = Literal["plain", "tilde"]

#: reciprocal condition below which a stacked matrix is declared singular
RESOLVENT_RCOND = 1e-12
GREEN_TOL = 1e-12
ADJOINT_TOL = 1e-10


class ConstructionError(ValueError):
    """A model violates one of the triple invariants."""

    def __init__(self, invariant: str, defect: float, detail: str = ""):
        msg = f"invariant '{invariant}' violated (defect={defect:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.invariant = invariant
        self.defect = defect


class ResolventPointError(SingularMatrixError):
    """The spectral parameter is not in the resolvent set of the Dirichlet-type operator."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TripleModel:
    """Matrices of a triple ``{G, (G0, G1), (G0t, G1t)}`` for an adjoint pair.

    Construction only checks shapes; use :func:`build` for a validated model.
    """

    space_H: WeightedSpace
    space_G: WeightedSpace
    embed: np.ndarray
    op_T: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    embed_t: np.ndarray
    op_Tt: np.ndarray
    g0t: np.ndarray
    g1t: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n, m = self.space_H.dim, self.space_G.dim
        dd = np.shape(self.embed)[1] if np.ndim(self.embed) == 2 else -1
        ddt = np.shape(self.embed_t)[1] if np.ndim(self.embed_t) == 2 else -1
        spec = {
            "embed": (n, dd), "op_T": (n, dd), "g0": (m, dd), "g1": (m, dd),
            "embed_t": (n, ddt), "op_Tt": (n, ddt), "g0t": (m, ddt), "g1t": (m, ddt),
        }
        for name, (r, c) in spec.items():
            arr = as_matrix(getattr(self, name), r, c, name=name)
            object.__setattr__(self, name, _frozen(arr))
        object.__setattr__(self, "metadata", dict(self.metadata))

    # -- dimensions --------------------------------------------------------

    @property
    def n(self) -> int:
        return self.space_H.dim

    @property
    def m(self) -> int:
        return self.space_G.dim

    @property
    def dim_D(self) -> int:
        return self.embed.shape[1]

    @property
    def dim_Dt(self) -> int:
        return self.embed_t.shape[1]

    @property
    def symmetric(self) -> bool:
        return bool(self.metadata.get("symmetric", False))

    @property
    def lambda0(self) -> complex | None:
        lam = self.metadata.get("lambda0")
        return None if lam is None else complex(lam)

    def side(self, side: Side):
        """``(embed, op, g0, g1)`` of one side."""
        if side == "plain":
            return self.embed, self.op_T, self.g0, self.g1
        if side == "tilde":
            return self.embed_t, self.op_Tt, self.g0t, self.g1t
        raise ValueError(f"unknown side {side!r}")

    # -- boundary frame ----------------------------------------------------

    @cached_property
    def frame_out(self) -> np.ndarray:
        """``L^H``: raw G-coordinates -> orthonormal-frame coordinates."""
        return self.space_G.cholesky().conj().T

    @cached_property
    def frame_in(self) -> np.ndarray:
        """``L^{-H}``: columns form a ``W_G``-orthonormal basis of ``G``."""
        if self.m == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        return sla.solve_triangular(self.frame_out, np.eye(self.m), lower=False)

    def to_frame(self, b) -> np.ndarray:
        """Express an operator on ``G`` (raw coordinates) in the orthonormal frame."""
        b = as_matrix(b, self.m, self.m, name="boundary operator")
        return self.frame_out @ b @ self.frame_in

    # -- stacked systems ---------------------------------------------------

    def stack(self, side: Side, lam: complex, bmat=None) -> np.ndarray:
        """``[op - lam*embed; g0 - bmat @ g1]`` (``bmat`` in raw G-coordinates)."""
        emb, op, g0, g1 = self.side(side)
        rows = g0 if bmat is None else g0 - np.asarray(bmat) @ g1
        return np.vstack([op - lam * emb, rows])

    def stack_solver(self, side: Side, lam: complex, bmat=None,
                     min_rcond: float = RESOLVENT_RCOND) -> LUSolver:
        a = self.stack(side, lam, bmat)
        if a.shape[0] != a.shape[1]:
            raise ShapeError(
                f"stacked system is {a.shape}; resolvents need carrier dimension n + m")
        try:
            return LUSolver(a, min_rcond=min_rcond)
        except SingularMatrixError as exc:
            which = "A0" if side == "plain" else "A0~"
            if bmat is not None:
                raise
            raise ResolventPointError(f"lambda={lam!r} is not in rho({which})", exc.rcond) from exc

    def resolvent_rhs(self, h) -> np.ndarray:
        """Right-hand side ``[h; 0]`` for a stacked solve."""
        h = np.asarray(h, dtype=np.complex128)
        pad = np.zeros((self.m,) + h.shape[1:], dtype=np.complex128)
        return np.concatenate([h, pad], axis=0)

    def dirichlet_pencil(self, side: Side = "plain"):
        """Pencil ``([op; g0], [embed; 0])`` whose finite spectrum is that of A0 (A0~)."""
        emb, op, g0, _ = self.side(side)
        return np.vstack([op, g0]), np.vstack([emb, np.zeros_like(g0)])

    @cached_property
    def a0_spectrum(self) -> np.ndarray:
        return pencil_eigenvalues(*self.dirichlet_pencil("plain")).finite

    @cached_property
    def a0t_spectrum(self) -> np.ndarray:
        return pencil_eigenvalues(*self.dirichlet_pencil("tilde")).finite


# -- Green identity and construction -----------------------------------------


def green_terms(model: TripleModel):
    wh, wg = model.space_H.gram, model.space_G.gram
    return (
        model.embed_t.conj().T @ wh @ model.op_T,
        model.op_Tt.conj().T @ wh @ model.embed,
        model.g0t.conj().T @ wg @ model.g1,
        model.g1t.conj().T @ wg @ model.g0,
    )


def green_defect(model: TripleModel) -> float:
    """Relative norm of the Green matrix residual (0 for the zero model)."""
    a, b, c, d = green_terms(model)
    resid = np.linalg.norm((a - b) - (c - d))
    scale = max(np.linalg.norm(x) for x in (a, b, c, d))
    return 0.0 if scale == 0.0 else float(resid / scale)


def build(space_H: WeightedSpace, space_G: WeightedSpace, *, embed, op_T, g0, g1,
          embed_t, op_Tt, g0t, g1t, metadata: dict | None = None,
          tol: float = GREEN_TOL, rank_tol: float = 1e-10) -> TripleModel:
    """Validated :class:`TripleModel`; the Green defect is stored in the metadata."""
    model = TripleModel(space_H, space_G, embed, op_T, g0, g1, embed_t, op_Tt, g0t, g1t,
                        dict(metadata or {}))
    gd = green_defect(model)
    if not gd <= tol:
        raise ConstructionError("green identity", gd)
    for label, emb, g in (("plain", model.embed, model.g0), ("tilde", model.embed_t, model.g0t)):
        r = rank(np.vstack([emb, g]), rank_tol)
        if r != emb.shape[1]:
            raise ConstructionError(f"{label} stacked [embed; g0] injective",
                                    float(emb.shape[1] - r), f"rank {r} < {emb.shape[1]}")
        rg = rank(g, rank_tol)
        if rg != model.m:
            raise ConstructionError(f"{label} rank g0 = m", float(model.m - rg),
                                    f"rank {rg} < {model.m}")
    model.metadata["green_defect"] = gd
    return model


@dataclass(frozen=True)
class DensityReport:
    rank_g0: int
    rank_g0t: int
    rank_stack: int
    rank_stack_t: int
    condition_D: bool
    condition_DD: bool
    ordinary: bool


def check_density(model: TripleModel, tol: float = 1e-10) -> DensityReport:
    """Rank surrogates of the density conditions.

    In finite dimensions a dense range is the whole space, so (DD) and the
    surjectivity of ``(G0, G1)`` coincide; ``ordinary`` is informational.
    """
    m = model.m
    r0, r0t = rank(model.g0, tol), rank(model.g0t, tol)
    rs = rank(np.vstack([model.g0, model.g1]), tol)
    rst = rank(np.vstack([model.g0t, model.g1t]), tol)
    dd = rs == 2 * m and rst == 2 * m
    return DensityReport(r0, r0t, rs, rst, r0 == m and r0t == m, dd, dd)


# -- resolvent of A0 ----------------------------------------------------------


@dataclass(frozen=True)
class A0Solution:
    f_dom: np.ndarray
    u: np.ndarray


def a0_resolvent(model: TripleModel, lam: complex, h, side: Side = "plain") -> A0Solution:
    """``(A0 - lam)^{-1} h`` together with its preimage in the domain carrier."""
    solver = model.stack_solver(side, lam)
    f = solver.solve(model.resolvent_rhs(h))
    return A0Solution(f, model.side(side)[0] @ f)


def resolvent_matrix(model: TripleModel, lam: complex, side: Side = "plain") -> np.ndarray:
    """Matrix of ``(A0 - lam)^{-1}`` (or of ``(A0~ - lam)^{-1}``) on ``H``."""
    return a0_resolvent(model, lam, np.eye(model.n), side).u


def dirichlet_operator(model: TripleModel, side: Side = "plain", tol: float = 1e-10) -> np.ndarray:
    """Matrix of ``A0 = T|ker G0`` (resp. ``A0~``) acting on ``H``."""
    emb, op, g0, _ = model.side(side)
    k = null_basis(g0, tol)
    ik = emb @ k
    if ik.shape[0] != ik.shape[1]:
        raise ShapeError(f"ker g0 has dimension {ik.shape[1]}, expected n={model.n}")
    return np.linalg.solve(ik.T, (op @ k).T).T


@dataclass(frozen=True)
class MaximalityCertificate:
    ok: bool
    lambda0: complex
    defect_adjoint: float
    rcond_plain: float
    rcond_tilde: float
    message: str = ""


def check_maximality(model: TripleModel, lambda0: complex = -1.0,
                     tol: float = ADJOINT_TOL) -> MaximalityCertificate:
    """Certificate for A0* = A0~ in the resolvent-point form.

    Both stacked systems (plain at ``lambda0``, tilde at ``conj(lambda0)``)
    must be invertible and the matrix of ``A0~`` must match the weighted
    adjoint of the matrix of ``A0``.
    """
    lambda0 = complex(lambda0)
    try:
        rp = model.stack_solver("plain", lambda0).rcond
        rt = model.stack_solver("tilde", np.conj(lambda0)).rcond
    except (ResolventPointError, ShapeError) as exc:
        return MaximalityCertificate(False, lambda0, float("nan"), 0.0, 0.0, str(exc))
    try:
        a0 = dirichlet_operator(model, "plain")
        a0t = dirichlet_operator(model, "tilde")
    except (ShapeError, np.linalg.LinAlgError) as exc:
        return MaximalityCertificate(False, lambda0, float("nan"), rp, rt, str(exc))
    adj = weighted_adjoint(a0, model.space_H, model.space_H)
    defect = relative_defect(a0t, adj)
    ok = defect <= tol
    return MaximalityCertificate(ok, lambda0, defect, rp, rt,
                                 "" if ok else "A0~ differs from the adjoint of A0")


def find_lambda0(model: TripleModel, candidates) -> MaximalityCertificate:
    """First candidate giving a passing maximality certificate (or the last failure)."""
    cert = None
    for lam in candidates:
        cert = check_maximality(model, lam)
        if cert.ok:
            return cert
    if cert is None:
        raise ValueError("no candidates supplied")
    return cert


def swap(model: TripleModel, candidates=(-1.0, 1j, -1j, 1.0 + 1j)) -> TripleModel:
    """The triple ``{G, (G1, -G0), (G1t, -G0t)}`` with maximality re-certified.

    Neumann-type conditions ``G1 f = 0`` become Dirichlet-type for the
    swapped triple.  Raises :class:`ConstructionError` if no certificate
    can be found among ``candidates``.
    """
    swapped = build(
        model.space_H, model.space_G,
        embed=model.embed, op_T=model.op_T, g0=model.g1, g1=-model.g0,
        embed_t=model.embed_t, op_Tt=model.op_Tt, g0t=model.g1t, g1t=-model.g0t,
        metadata={**model.metadata, "kind": f"swap({model.metadata.get('kind', 'model')})"},
    )
    cert = find_lambda0(swapped, candidates)
    if not cert.ok:
        raise ConstructionError("maximality (swapped triple)", cert.defect_adjoint, cert.message)
    swapped.metadata["lambda0"] = cert.lambda0
    return swapped


# -- minimal operators --------------------------------------------------------


@dataclass(frozen=True)
class MinimalOperators:
    """``S = T~|ker G0t ∩ ker G1t`` and ``S~ = T|ker G0 ∩ ker G1``.

    ``dom_S`` / ``dom_St`` hold the domains as columns in ``H``; ``S`` /
    ``St`` hold the images of those columns.
    """

    dom_S: np.ndarray
    S: np.ndarray
    dom_St: np.ndarray
    St: np.ndarray
    adjoint_pair_defect: float


def minimal_operators(model: TripleModel, tol: float = 1e-10) -> MinimalOperators:
    kt = null_basis(np.vstack([model.g0t, model.g1t]), tol)
    k = null_basis(np.vstack([model.g0, model.g1]), tol)
    dom_s, s = model.embed_t @ kt, model.op_Tt @ kt
    dom_st, st = model.embed @ k, model.op_T @ k
    w = model.space_H.gram
    lhs = dom_st.conj().T @ w @ s
    rhs = st.conj().T @ w @ dom_s
    return MinimalOperators(dom_s, s, dom_st, st, relative_defect(lhs, rhs))


# -- gamma-fields and Weyl functions -----------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralSample:
    """``gamma(point)`` (n x m) and ``M(point)`` (m x m) in the orthonormal boundary frame.

    ``preimage`` holds the carrier vectors whose embeddings are the columns
    of ``gamma``.
    """

    point: complex
    gamma: np.ndarray
    weyl: np.ndarray
    cond_stack: float
    side: Side
    preimage: np.ndarray


def _sample(model: TripleModel, side: Side, lam: complex, solver: LUSolver | None = None) -> SpectralSample:
    lam = complex(lam)
    solver = solver or model.stack_solver(side, lam)
    emb, _, _, g1 = model.side(side)
    rhs = np.vstack([np.zeros((model.n, model.m)), model.frame_in])
    f = solver.solve(rhs)
    return SpectralSample(lam, emb @ f, model.frame_out @ (g1 @ f), solver.condition, side, f)


def gamma(model: TripleModel, lam: complex) -> SpectralSample:
    """gamma-field and Weyl function of the plain side at ``lam``."""
    return _sample(model, "plain", lam)


def gamma_tilde(model: TripleModel, mu: complex) -> SpectralSample:
    """gamma-field and Weyl function of the tilde side at ``mu``."""
    return _sample(model, "tilde", mu)


def spectral_sample(model: TripleModel, side: Side, lam: complex) -> SpectralSample:
    return _sample(model, side, lam)


def gamma_adjoint(model: TripleModel, sample: SpectralSample) -> np.ndarray:
    """Weighted adjoint of ``sample.gamma`` as a map ``H -> frame coordinates``."""
    return sample.gamma.conj().T @ model.space_H.gram


def _other(side: Side) -> Side:
    return "tilde" if side == "plain" else "plain"


def _gamma_star_defect(model: TripleModel, side: Side, lam: complex) -> float:
    # gamma(lam)^* = G1_other (A0_other - conj(lam))^{-1}
    s = _sample(model, side, lam)
    lhs = gamma_adjoint(model, s)
    other = _other(side)
    sol = a0_resolvent(model, np.conj(lam), np.eye(model.n), other)
    rhs = model.frame_out @ (model.side(other)[3] @ sol.f_dom)
    return relative_defect(lhs, rhs)


def gamma_star_check(model: TripleModel, lam: complex) -> float:
    """Defect of ``gamma(lam)^* = G1t (A0~ - conj lam)^{-1}`` and of the mirror
    identity ``gamma~(conj lam)^* = G1 (A0 - lam)^{-1}`` (maximum of the two)."""
    lam = complex(lam)
    return max(_gamma_star_defect(model, "plain", lam),
               _gamma_star_defect(model, "tilde", np.conj(lam)))


def _shift_defect(model: TripleModel, side: Side, lam: complex, nu: complex) -> float:
    g_lam = _sample(model, side, lam).gamma
    g_nu = _sample(model, side, nu).gamma
    corr = (lam - nu) * a0_resolvent(model, lam, g_nu, side).u
    return relative_defect(g_lam, g_nu + corr, g_nu, corr)


def gamma_shift_check(model: TripleModel, lam: complex, nu: complex) -> float:
    """Defect of ``gamma(lam) = (I + (lam - nu)(A0 - lam)^{-1}) gamma(nu)`` and its tilde mirror."""
    lam, nu = complex(lam), complex(nu)
    return max(_shift_defect(model, "plain", lam, nu),
               _shift_defect(model, "tilde", np.conj(lam), np.conj(nu)))


@dataclass(frozen=True)
class WeylDefects:
    d1: float
    d2: float

    def max(self) -> float:
        return max(self.d1, self.d2)


def weyl_identity_check(model: TripleModel, lam: complex, mu: complex) -> WeylDefects:
    """Defects of

    ``M(lam) - M~(mu)^* = (lam - conj mu) gamma~(mu)^* gamma(lam)`` and
    ``M(lam)^* - M~(mu) = (conj lam - mu) gamma(lam)^* gamma~(mu)``.
    """
    lam, mu = complex(lam), complex(mu)
    s = gamma(model, lam)
    t = gamma_tilde(model, mu)
    m_l, m_t = s.weyl, t.weyl
    r1 = (lam - np.conj(mu)) * (gamma_adjoint(model, t) @ s.gamma)
    r2 = (np.conj(lam) - mu) * (gamma_adjoint(model, s) @ t.gamma)
    d1 = relative_defect(m_l - m_t.conj().T, r1, m_l, m_t)
    d2 = relative_defect(m_l.conj().T - m_t, r2, m_l, m_t)
    return WeylDefects(d1, d2)


def _representation_defect(model: TripleModel, side: Side, lam: complex, lam0: complex) -> float:
    other = _other(side)
    s_lam = _sample(model, side, lam)
    s0 = _sample(model, side, lam0)
    t0 = _sample(model, other, lam0)
    shifted = s0.gamma + (lam - lam0) * a0_resolvent(model, lam, s0.gamma, side).u
    bounded = (lam - np.conj(lam0)) * (gamma_adjoint(model, t0) @ shifted)
    rhs = t0.weyl.conj().T + bounded
    return relative_defect(s_lam.weyl, rhs, t0.weyl, bounded)


def weyl_representation_check(model: TripleModel, lam: complex, lam0: complex) -> float:
    """Defect of ``M(lam) = M~(lam0)^* + gamma~(lam0)^*(lam - conj lam0)(I + (lam - lam0)(A0 - lam)^{-1}) gamma(lam0)``
    and of the mirror formula for ``M~`` at ``(conj lam, conj lam0)``."""
    lam, lam0 = complex(lam), complex(lam0)
    return max(_representation_defect(model, "plain", lam, lam0),
               _representation_defect(model, "tilde", np.conj(lam), np.conj(lam0)))


def replace(model: TripleModel, **changes) -> TripleModel:
    """``dataclasses.replace`` without validation (metadata copied)."""
    changes.setdefault("metadata", dict(model.metadata))
    return dataclasses.replace(model, **changes)
