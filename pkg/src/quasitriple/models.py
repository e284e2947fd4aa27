"""
Constructors for :class:`~quasitriple.triple.TripleModel` instances.

Every constructor makes Green's identity hold exactly (up to rounding) by
construction, so the identity checks downstream can run at tolerances near
machine precision.

Grid models use cell-centred finite volumes.  The domain carrier of each
side is ``(cell values, boundary-face values)``; ``embed`` extracts the
cell values and ``g0`` the boundary values, so ``[embed; g0]`` is the
identity.  With ``K = W_H T`` split into cell / boundary column blocks
``[K_II, K_IB]``, Green's identity fixes the tilde side block by block::

    Kt_II = K_II^H            Kt_IB = -(W_G G1_I)^H
    G1t_I = -W_G^{-1} K_IB^H  G1t_B = W_G^{-1} (W_G G1_B)^H

Sign convention: ``g1`` is the *inward* conormal derivative, so the Weyl
function of ``-f''`` on ``(0, 1)`` is negative definite below the first
Dirichlet eigenvalue.

Random draws use numpy's PCG64 bit generator seeded with the integer seed;
complex Gaussian entries are ``(x + i y) / sqrt(2)`` with ``x`` and ``y``
drawn by ``standard_normal`` in that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .numcore import WeightedSpace, solve
from .triple import TripleModel, build, find_lambda0

Coefficient = Union[float, complex, Callable]

#: fixed resolvent-point candidates tried before random ones
LAMBDA0_CANDIDATES = (-1.0, 1j, -1j, -1.0 + 1j, 2j, -10.0)
MAX_UNKNOWNS_2D = 20000


class GenerationError(RuntimeError):
    """A constructor could not certify the maximality condition."""


class PoleError(ValueError):
    """The spectral parameter sits on a pole of an analytic Weyl function."""


def _certify(model: TripleModel, rng: np.random.Generator | None = None, tries: int = 32) -> TripleModel:
    if rng is None:
        candidates = LAMBDA0_CANDIDATES
    else:
        z = rng.standard_normal(tries) + 1j * rng.standard_normal(tries)
        candidates = 2.0 * z
    cert = find_lambda0(model, candidates)
    if not cert.ok:
        raise GenerationError(f"no certified lambda0 among {len(candidates)} candidates: {cert.message}")
    model.metadata["lambda0"] = cert.lambda0
    model.metadata["maximality_defect"] = cert.defect_adjoint
    return model


# -- synthetic pairs -----------------------------------------------------------


def _cgauss(rng: np.random.Generator, shape) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def _hpd(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = _cgauss(rng, (dim, dim))
    w = a.conj().T @ a + np.eye(dim)
    return 0.5 * (w + w.conj().T)


def complete_tilde_side(space_H: WeightedSpace, space_G: WeightedSpace, embed, op_T, g0, g1,
                        embed_t, g0t):
    """Solve Green's identity for the unique ``(op_Tt, g1t)``.

    With ``Phi = [embed; g0]`` invertible and
    ``Y = embed_t^H W_H T - g0t^H W_G g1``, the column blocks
    ``[P, Q] = Y Phi^{-1}`` give ``Tt = W_H^{-1} P^H`` and
    ``g1t = -W_G^{-1} Q^H``.
    """
    n = space_H.dim
    wh, wg = space_H.gram, space_G.gram
    phi = np.vstack([embed, g0])
    y = embed_t.conj().T @ wh @ op_T - g0t.conj().T @ wg @ g1
    pq = solve(phi.T, y.T).T
    p, q = pq[:, :n], pq[:, n:]
    op_Tt = np.linalg.solve(wh, p.conj().T)
    g1t = -np.linalg.solve(wg, q.conj().T) if space_G.dim else np.zeros((0, embed_t.shape[1]))
    return op_Tt, g1t


def synthetic_pair(seed: int, n: int, m: int) -> TripleModel:
    """Random adjoint-pair model with Green's identity solved exactly.

    Draw order: W_H factor, W_G factor, ``Phi = [embed; g0]``,
    ``Psi = [embed_t; g0t]``, ``T``, ``g1``, then the 32 resolvent-point
    candidates used to certify maximality.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    d = n + m
    space_H = WeightedSpace(n, _hpd(rng, n))
    space_G = WeightedSpace(m, _hpd(rng, m))
    phi = _cgauss(rng, (d, d))
    psi = _cgauss(rng, (d, d))
    op_T = _cgauss(rng, (n, d))
    g1 = _cgauss(rng, (m, d))
    embed, g0 = phi[:n], phi[n:]
    embed_t, g0t = psi[:n], psi[n:]
    op_Tt, g1t = complete_tilde_side(space_H, space_G, embed, op_T, g0, g1, embed_t, g0t)
    model = build(space_H, space_G, embed=embed, op_T=op_T, g0=g0, g1=g1,
                  embed_t=embed_t, op_Tt=op_Tt, g0t=g0t, g1t=g1t,
                  metadata={"kind": "synthetic", "params": {"seed": seed, "n": n, "m": m},
                            "symmetric": False})
    return _certify(model, rng)


# -- finite-volume assembly ----------------------------------------------------


def _grid_model(w_H, w_G, K, g1_I, g1_B, metadata, symmetric: bool) -> TripleModel:
    """Assemble a model from ``K = W_H T`` and the plain conormal map (cell-centred carrier)."""
    w_H = np.asarray(w_H, dtype=float)
    w_G = np.asarray(w_G, dtype=float)
    n, m = w_H.size, w_G.size
    K = np.asarray(K, dtype=np.complex128)
    K_II, K_IB = K[:, :n], K[:, n:]
    g1_I = np.asarray(g1_I, dtype=np.complex128)
    g1_B = np.asarray(g1_B, dtype=np.complex128)

    Kt = np.hstack([K_II.conj().T, -(w_G[:, None] * g1_I).conj().T])
    g1t = np.hstack([-K_IB.conj().T / w_G[:, None], (w_G[:, None] * g1_B).conj().T / w_G[:, None]])

    embed = np.hstack([np.eye(n), np.zeros((n, m))])
    g0 = np.hstack([np.zeros((m, n)), np.eye(m)])
    op_T = K / w_H[:, None]
    op_Tt = Kt / w_H[:, None]
    g1 = np.hstack([g1_I, g1_B])
    if symmetric:
        op_Tt, g1t = op_T, g1
    model = build(WeightedSpace.diagonal(w_H), WeightedSpace.diagonal(w_G),
                  embed=embed, op_T=op_T, g0=g0, g1=g1,
                  embed_t=embed, op_Tt=op_Tt, g0t=g0, g1t=g1t,
                  metadata={**metadata, "symmetric": symmetric})
    return _certify(model)


def _sample(coef: Coefficient, *xs) -> np.ndarray:
    if callable(coef):
        return np.asarray(coef(*xs))
    return np.full(np.broadcast(*xs).shape, coef)


@dataclass(frozen=True)
class Coefficients1D:
    """Coefficients of ``-(p f')' + b f' + c f`` on ``(0, 1)`` with ``N`` cells.

    ``q`` is the real potential used by :func:`sturm_liouville_1d`;
    :func:`convection_diffusion_1d` uses ``c`` when given and ``q``
    otherwise.  Each coefficient is a constant or a vectorized callable of x.
    """

    N: int
    p: Coefficient = 1.0
    q: Coefficient = 0.0
    b: Coefficient | None = None
    c: Coefficient | None = None

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("need N >= 3 cells")
        if np.any(np.real(_sample(self.p, self.faces)) <= 0):
            raise ValueError("p must be strictly positive")

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.h

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h


def _assemble_1d(co: Coefficients1D, b: Coefficient, c: Coefficient):
    N, h = co.N, co.h
    pf = _sample(co.p, co.faces).astype(complex)
    bf = _sample(b, co.faces).astype(complex)
    cc = _sample(c, co.centers).astype(complex)
    K = np.zeros((N, N + 2), dtype=np.complex128)
    left, right = N, N + 1
    for i in range(N - 1):
        # interior face between cells i and i+1
        k = pf[i + 1] / h
        K[i, i] += k
        K[i + 1, i + 1] += k
        K[i, i + 1] -= k
        K[i + 1, i] -= k
    for cell, bnd, face in ((0, left, 0), (N - 1, right, N)):
        k = 2.0 * pf[face] / h
        K[cell, cell] += k
        K[cell, bnd] -= k
    # convection: sum over faces of (b.n) (f_face - f_cell), face values averaged
    for i in range(N - 1):
        bb = bf[i + 1] / 2.0
        K[i, i + 1] += bb
        K[i, i] -= bb
        K[i + 1, i + 1] += bb
        K[i + 1, i] -= bb
    K[0, left] -= bf[0]
    K[0, 0] += bf[0]
    K[N - 1, right] += bf[N]
    K[N - 1, N - 1] -= bf[N]
    K[:, :N] += np.diag(h * cc)
    g1_I = np.zeros((2, N), dtype=np.complex128)
    g1_I[0, 0] = 2.0 * pf[0] / h
    g1_I[1, N - 1] = 2.0 * pf[N] / h
    g1_B = -np.diag([2.0 * pf[0] / h, 2.0 * pf[N] / h])
    return np.full(N, h), np.ones(2), K, g1_I, g1_B


def sturm_liouville_1d(coeffs: Coefficients1D) -> TripleModel:
    """Symmetric model of ``-(p f')' + q f`` on ``(0, 1)``; boundary space ``C^2`` (x = 0, x = 1)."""
    if np.any(np.imag(_sample(coeffs.q, coeffs.centers)) != 0):
        raise ValueError("q must be real for the symmetric model")
    w_H, w_G, K, g1_I, g1_B = _assemble_1d(coeffs, 0.0, coeffs.q)
    meta = {"kind": "sl1d", "params": {"N": coeffs.N}}
    return _grid_model(w_H, w_G, K, g1_I, g1_B, meta, symmetric=True)


def convection_diffusion_1d(coeffs: Coefficients1D) -> TripleModel:
    """Model of ``-(p f')' + b f' + c f`` and its formal adjoint ``-(p g')' - (b g)' + conj(c) g``.

    The plain conormal map is ``p f'`` (inward); the tilde map picks up the
    convective flux, ``p g' + b g`` at ``x = 0``.
    """
    b = 0.0 if coeffs.b is None else coeffs.b
    c = coeffs.q if coeffs.c is None else coeffs.c
    w_H, w_G, K, g1_I, g1_B = _assemble_1d(coeffs, b, c)
    meta = {"kind": "cd1d", "params": {"N": coeffs.N}}
    return _grid_model(w_H, w_G, K, g1_I, g1_B, meta, symmetric=False)


# -- 2D --------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid2D:
    """Cell-centred grid on ``[0, Lx] x [0, Ly]`` with ``Nx x Ny`` cells.

    Diffusion is diagonal (``kxx``, ``kyy``), which is what a five-point
    stencil can represent.  ``beta`` is the convection vector and ``c``
    the potential.  Coefficients are constants or vectorized callables of
    ``(x, y)``.
    """

    Nx: int
    Ny: int
    Lx: float = 1.0
    Ly: float = 1.0
    kxx: Coefficient = 1.0
    kyy: Coefficient = 1.0
    beta: tuple = (0.0, 0.0)
    c: Coefficient = 0.0

    def __post_init__(self):
        if self.Nx < 3 or self.Ny < 3:
            raise ValueError("need Nx, Ny >= 3")

    @property
    def hx(self) -> float:
        return self.Lx / self.Nx

    @property
    def hy(self) -> float:
        return self.Ly / self.Ny

    def cell(self, i: int, j: int) -> int:
        return j * self.Nx + i

    def boundary_faces(self):
        """``(x, y, inward normal, length, cell)`` for each boundary face.

        Order: bottom (i = 0..Nx-1), top, left (j = 0..Ny-1), right.
        """
        hx, hy = self.hx, self.hy
        out = []
        for i in range(self.Nx):
            out.append(((i + 0.5) * hx, 0.0, (0, 1), hx, self.cell(i, 0)))
        for i in range(self.Nx):
            out.append(((i + 0.5) * hx, self.Ly, (0, -1), hx, self.cell(i, self.Ny - 1)))
        for j in range(self.Ny):
            out.append((0.0, (j + 0.5) * hy, (1, 0), hy, self.cell(0, j)))
        for j in range(self.Ny):
            out.append((self.Lx, (j + 0.5) * hy, (-1, 0), hy, self.cell(self.Nx - 1, j)))
        return out


def elliptic_2d(grid: Grid2D) -> TripleModel:
    """Five-point model of ``-div(k grad f) + beta.grad f + c f``; the Weyl matrix is the discrete DtN map."""
    Nx, Ny, hx, hy = grid.Nx, grid.Ny, grid.hx, grid.hy
    n = Nx * Ny
    faces = grid.boundary_faces()
    m = len(faces)
    if n + m > MAX_UNKNOWNS_2D:
        raise ValueError(f"grid too large: {n + m} unknowns > {MAX_UNKNOWNS_2D}")
    area = hx * hy
    bx = lambda x, y: _sample(grid.beta[0], x, y)  # noqa: E731
    by = lambda x, y: _sample(grid.beta[1], x, y)  # noqa: E731
    K = np.zeros((n, n + m), dtype=np.complex128)

    def couple(c1, c2, kf, length, dist, flux_n):
        # diffusion across an interior face, and centred convection with face-averaged values
        k = kf * length / dist
        K[c1, c1] += k
        K[c2, c2] += k
        K[c1, c2] -= k
        K[c2, c1] -= k
        v = flux_n * length / 2.0
        K[c1, c2] += v
        K[c1, c1] -= v
        K[c2, c1] -= v
        K[c2, c2] += v

    for j in range(Ny):
        for i in range(Nx - 1):
            x, y = (i + 1) * hx, (j + 0.5) * hy
            couple(grid.cell(i, j), grid.cell(i + 1, j), complex(_sample(grid.kxx, x, y)),
                   hy, hx, complex(bx(x, y)))
    for j in range(Ny - 1):
        for i in range(Nx):
            x, y = (i + 0.5) * hx, (j + 1) * hy
            couple(grid.cell(i, j), grid.cell(i, j + 1), complex(_sample(grid.kyy, x, y)),
                   hx, hy, complex(by(x, y)))

    g1_I = np.zeros((m, n), dtype=np.complex128)
    g1_B = np.zeros((m, m), dtype=np.complex128)
    w_G = np.zeros(m)
    for b, (x, y, nin, length, c) in enumerate(faces):
        kcoef = grid.kxx if nin[0] else grid.kyy
        half = (hx if nin[0] else hy) / 2.0
        kf = complex(_sample(kcoef, x, y))
        K[c, c] += kf * length / half
        K[c, n + b] -= kf * length / half
        # outward normal is -nin
        vn = -(complex(bx(x, y)) * nin[0] + complex(by(x, y)) * nin[1])
        K[c, n + b] += vn * length
        K[c, c] -= vn * length
        g1_I[b, c] = kf / half
        g1_B[b, b] = -kf / half
        w_G[b] = length
    xs = (np.arange(Nx) + 0.5) * hx
    ys = (np.arange(Ny) + 0.5) * hy
    X, Y = np.meshgrid(xs, ys)
    K[:, :n] += np.diag(area * _sample(grid.c, X.ravel(), Y.ravel()).astype(complex))
    symmetric = (
        np.allclose(_sample(grid.beta[0], X, Y), 0) and np.allclose(_sample(grid.beta[1], X, Y), 0)
        and np.all(np.imag(_sample(grid.c, X, Y)) == 0)
        and np.all(np.imag(_sample(grid.kxx, X, Y)) == 0)
        and np.all(np.imag(_sample(grid.kyy, X, Y)) == 0)
    )
    meta = {"kind": "ell2d", "params": {"Nx": Nx, "Ny": Ny}}
    return _grid_model(np.full(n, area), w_G, K, g1_I, g1_B, meta, symmetric=bool(symmetric))


# -- continuum oracle ------------------------------------------------------------


def analytic_dtn_1d(lam: complex, q: float = 0.0) -> np.ndarray:
    """Exact Weyl matrix of ``-f'' + q f = lam f`` on ``(0, 1)`` with inward derivatives.

    With ``s = sqrt(lam - q)`` the matrix is
    ``[[-s cot s, s / sin s], [s / sin s, -s cot s]]``; at ``s = 0`` it is
    ``[[-1, 1], [1, -1]]``.
    """
    z = complex(lam) - q
    s = np.sqrt(z)
    if abs(z) < 1e-6:
        # series: s cot s = 1 - z/3 - z^2/45, s / sin s = 1 + z/6 + 7 z^2/360
        diag = -(1 - z / 3 - z * z / 45)
        off = 1 + z / 6 + 7 * z * z / 360
    else:
        sn = np.sin(s)
        if abs(sn) < 1e-12 * max(1.0, abs(s)):
            raise PoleError(f"lambda={lam!r} is a Dirichlet eigenvalue")
        diag = -s * np.cos(s) / sn
        off = s / sn
    return np.array([[diag, off], [off, diag]], dtype=np.complex128)


def builtin(name: str, seed: int = 1, **params) -> TripleModel:
    """Named model constructors used by the command line and the test-suite."""
    if name == "sl1d":
        return sturm_liouville_1d(Coefficients1D(int(params.get("N", 16)),
                                                 p=params.get("p", 1.0), q=params.get("q", 0.0)))
    if name == "cd1d":
        return convection_diffusion_1d(Coefficients1D(
            int(params.get("N", 32)), p=params.get("p", 1.0), q=params.get("q", 0.0),
            b=params.get("b", 1.0), c=params.get("c", None)))
    if name == "ell2d":
        nx = int(params.get("Nx", params.get("N", 12)))
        ny = int(params.get("Ny", nx))
        return elliptic_2d(Grid2D(nx, ny, beta=(params.get("bx", 0.0), params.get("by", 0.0)),
                                  c=params.get("c", 0.0)))
    if name == "synthetic":
        return synthetic_pair(int(params.get("seed", seed)), int(params.get("n", 8)), int(params.get("m", 3)))
    raise KeyError(f"unknown builtin model {name!r}")
