"""Exact finite-N Lindblad solvers.

Three representations of the same master equation share one interface:

* ``build_collective_liouvillian`` works in the ``(N+1)``-dimensional Dicke
  manifold (collective channels only);
* ``build_permsym_liouvillian`` propagates one representative density-matrix
  element per permutation orbit, which admits single-atom channels;
* ``build_bruteforce_liouvillian`` uses the full ``2^N`` site space and only
  serves as an oracle for small ``N``.

Density matrices are column-stacked: ``vec(rho)[i + j D] = rho[i, j]`` so that
``vec(A rho B) = (B^T kron A) vec(rho)``. Every generator comes with linear
functionals for the trace and for the observables ``n_ph`` (``<a^+ a>``),
``sz`` (``<sigma_z>`` per atom) and the cross-site correlators ``xx, yy, zz,
xy`` (``<sigma_i^a sigma_j^b>``, ``i != j``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import cvxopt
import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from cvxopt import umfpack
from scipy.linalg.lapack import ztrsyl

from .errors import (
    CutoffTooSmall,
    DegenerateSteadyState,
    InsufficientPoints,
    NonStationary,
    SingleAtomChannelPresent,
)
from .fitting import PowerLawFit, fit_power_law
from .params import ModelParams
from .thresholds import lambda_c_collective

OBSERVABLES = ("n_ph", "sz", "xx", "yy", "zz", "xy")


# --- local operators -------------------------------------------------------


def boson_ops(cutoff: int):
    """``a`` on Fock states ``0..cutoff``."""
    return sp.diags(np.sqrt(np.arange(1, cutoff + 1)), 1, format="csr", dtype=complex)


def spin_half_ops():
    """``(sigma_z, sigma_+, sigma_-)`` in the basis ``(up, down)``."""
    sz = np.diag([0.5, -0.5]).astype(complex)
    spl = np.array([[0, 1], [0, 0]], dtype=complex)
    return sz, spl, spl.T.copy()


def collective_spin_ops(n_atoms: int):
    """``(S_z, S_+, S_-)`` on the ``j = N/2`` manifold, ordered ``m = -j .. j``."""
    j = 0.5 * n_atoms
    m = np.arange(-j, j + 1)
    szm = sp.diags(m, 0, format="csr", dtype=complex)
    up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    splus = sp.diags(up, -1, format="csr", dtype=complex)
    return szm, splus, splus.T.tocsr()


def left(a, dim=None):
    dim = a.shape[0] if dim is None else dim
    return sp.kron(sp.identity(dim, format="csr"), a, format="csr")


def right(b, dim=None):
    dim = b.shape[0] if dim is None else dim
    return sp.kron(sp.csr_matrix(b).T, sp.identity(dim, format="csr"), format="csr")


def dissipator(op, rate):
    """Superoperator of ``rate * (2 L rho L^+ - {L^+ L, rho})``."""
    op = sp.csr_matrix(op)
    ld = op.conj().T
    ldl = ld @ op
    return rate * (2 * sp.kron(op.conj(), op) - left(ldl) - right(ldl))


def commutator(h):
    """Superoperator of ``-i [H, rho]``."""
    return -1j * (left(h) - right(h))


def vec_functional(op) -> np.ndarray:
    """Row vector ``f`` with ``f . vec(rho) = tr(op rho)``."""
    op = sp.csr_matrix(op).toarray()
    return op.T.flatten(order="F")


# --- generic container -----------------------------------------------------


@dataclass
class Liouvillian:
    """A sparse generator with its trace and observable functionals."""

    matrix: sp.csr_matrix
    trace: np.ndarray
    observables: dict[str, np.ndarray]
    initial: np.ndarray
    top_fock: np.ndarray
    photon_cutoff: int
    kind: str
    hilbert_dim: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectations(self, v) -> dict[str, float]:
        return {k: float(np.real(f @ v)) for k, f in self.observables.items()}


def _hamiltonian_terms(params: ModelParams):
    n = params.n_atoms
    return params.lam / math.sqrt(n), params.lam_p / math.sqrt(n)


def _spin_observable_ops(sz, sx, sy, n):
    nn = n * (n - 1)
    # same-site parts: sigma_a^2 = 1/4 and {sigma_x, sigma_y} = 0
    return {
        "sz": (sz, 1.0 / n, 0.0),
        "xx": (sx @ sx, 1.0 / nn if nn else 0.0, -n / 4.0),
        "yy": (sy @ sy, 1.0 / nn if nn else 0.0, -n / 4.0),
        "zz": (sz @ sz, 1.0 / nn if nn else 0.0, -n / 4.0),
        "xy": (0.5 * (sx @ sy + sy @ sx), 1.0 / nn if nn else 0.0, 0.0),
    }


def _hilbert_liouvillian(params: ModelParams, cutoff: int, sz, spl, smi, jumps_spin,
                         n_spin_dim: int, initial_spin: int, kind: str) -> Liouvillian:
    """Generator on ``photon (x) spin`` from collective spin operators."""
    nph = cutoff + 1
    a = boson_ops(cutoff)
    ip = sp.identity(nph, format="csr")
    isp = sp.identity(n_spin_dim, format="csr")
    A = sp.kron(a, isp, format="csr")
    Szf = sp.kron(ip, sz, format="csr")
    Spf = sp.kron(ip, spl, format="csr")
    Smf = sp.kron(ip, smi, format="csr")
    gl, glp = _hamiltonian_terms(params)
    Ad = A.conj().T.tocsr()
    H = (params.omega_c * (Ad @ A) + params.omega_z * Szf
         + gl * (A @ Spf + Ad @ Smf) + glp * (A @ Smf + Ad @ Spf))
    L = commutator(H)
    if params.kappa > 0:
        L = L + dissipator(A, params.kappa)
    for op, rate in jumps_spin:
        if rate > 0:
            L = L + dissipator(sp.kron(ip, op, format="csr"), rate)
    dim = nph * n_spin_dim
    n = params.n_atoms
    sx = 0.5 * (Spf + Smf)
    sy = -0.5j * (Spf - Smf)
    obs = {"n_ph": vec_functional(Ad @ A)}
    for name, (op, scale, shift) in _spin_observable_ops(Szf, sx, sy, n).items():
        # tr(rho) * shift enters through the trace functional
        obs[name] = scale * (vec_functional(op) + shift * vec_functional(sp.identity(dim)))
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[initial_spin, initial_spin] = 1.0  # vacuum (x) all-down
    top = np.zeros(nph)
    top[-1] = 1.0
    top_op = sp.kron(sp.diags(top), isp)
    jumps = [(A, params.kappa)] + [(sp.kron(ip, op, format="csr"), r) for op, r in jumps_spin]
    extra = {"hamiltonian": H.tocsr(), "jumps": [(op, r) for op, r in jumps if r > 0],
             "n_ph_op": (Ad @ A).tocsr(), "top_op": top_op.tocsr()}
    return Liouvillian(L.tocsr(), vec_functional(sp.identity(dim)), obs,
                       rho0.flatten(order="F"), vec_functional(top_op), cutoff, kind, dim, extra)


def build_collective_liouvillian(params: ModelParams, photon_cutoff: int) -> Liouvillian:
    """Generator on the Dicke manifold; single-atom channels are rejected."""
    if params.has_single_atom_channels:
        raise SingleAtomChannelPresent("collective representation needs gamma_down = gamma_phi = gamma_up = 0")
    n = params.n_atoms
    sz, spl, smi = collective_spin_ops(n)
    jumps = [(smi / math.sqrt(n), params.gamma)]
    return _hilbert_liouvillian(params, photon_cutoff, sz, spl, smi, jumps, n + 1, 0, "collective")


def _site_op(op, site, n):
    mats = [sp.identity(2, format="csr")] * n
    mats = list(mats)
    mats[site] = sp.csr_matrix(op)
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out


def build_bruteforce_liouvillian(params: ModelParams, photon_cutoff: int) -> Liouvillian:
    """Unreduced generator on ``2^N`` site configurations (oracle, small ``N``)."""
    n = params.n_atoms
    if n > 6:
        raise ValueError("brute-force Liouvillian is limited to N <= 6")
    sz1, sp1, sm1 = spin_half_ops()
    zs = [_site_op(sz1, j, n) for j in range(n)]
    ps = [_site_op(sp1, j, n) for j in range(n)]
    ms = [_site_op(sm1, j, n) for j in range(n)]
    Sz, Sp, Sm = sum(zs), sum(ps), sum(ms)
    jumps = [(Sm / math.sqrt(n), params.gamma)]
    jumps += [(m, params.gamma_down) for m in ms]
    jumps += [(p, params.gamma_up) for p in ps]
    jumps += [(z, params.gamma_phi) for z in zs]
    # all-down is the last basis state in the (up, down) ordering
    return _hilbert_liouvillian(params, photon_cutoff, Sz.tocsr(), Sp.tocsr(), Sm.tocsr(),
                                jumps, 2**n, 2**n - 1, "bruteforce")


# --- permutation-symmetric representation -----------------------------------

# local element types |s_L><s_R| indexed p = s_L + 2 s_R with s = 0 (up), 1 (down)
UU, DU, UD, DD = 0, 1, 2, 3


def orbit_counts(n_atoms: int) -> np.ndarray:
    """All ``(c_0, c_1, c_2, c_3)`` with sum ``N``, lexicographically ordered."""
    out = [c for c in itertools.product(range(n_atoms + 1), repeat=3) if sum(c) <= n_atoms]
    return np.array([(*c, n_atoms - sum(c)) for c in sorted(out)], dtype=int)


@dataclass(frozen=True)
class OrbitBasis:
    counts: np.ndarray
    index: dict

    @classmethod
    def build(cls, n_atoms: int) -> "OrbitBasis":
        counts = orbit_counts(n_atoms)
        return cls(counts, {tuple(c): i for i, c in enumerate(counts)})

    def __len__(self):
        return len(self.counts)

    def lift(self, local: np.ndarray) -> sp.csr_matrix:
        """Orbit-space matrix of ``sum_j O_j`` for a 4x4 single-site superoperator."""
        local = np.asarray(local.toarray() if sp.issparse(local) else local, dtype=complex)
        rows, cols, vals = [], [], []
        diag = self.counts @ np.diag(local)
        nz = np.flatnonzero(diag)
        rows.extend(nz)
        cols.extend(nz)
        vals.extend(diag[nz])
        for p in range(4):
            for q in range(4):
                if p == q or local[q, p] == 0:
                    continue
                for i, c in enumerate(self.counts):
                    if c[p] == 0:
                        continue
                    c2 = c.copy()
                    c2[p] -= 1
                    c2[q] += 1
                    rows.append(self.index[tuple(c2)])
                    cols.append(i)
                    vals.append(local[q, p] * c2[q])
        m = len(self)
        return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))

    def trace(self) -> np.ndarray:
        c = self.counts
        diag = (c[:, DU] == 0) & (c[:, UD] == 0)
        n = c.sum(axis=1)
        out = np.zeros(len(c))
        out[diag] = [math.comb(int(nn), int(k)) for nn, k in zip(n[diag], c[diag, UU])]
        return out


def permsym_dim(n_atoms: int, photon_cutoff: int) -> int:
    return (photon_cutoff + 1) ** 2 * math.comb(n_atoms + 3, 3)


def build_permsym_liouvillian(params: ModelParams, photon_cutoff: int,
                              even_sector: bool = False) -> Liouvillian:
    """Generator on permutation-orbit representatives (all channels allowed).

    ``even_sector`` keeps only elements whose ket and bra have equal
    excitation parity (photons plus up spins). The generator never mixes
    the two parity sectors and the steady state reached from the vacuum
    lives in the even one, so this halves the problem size.
    """
    n = params.n_atoms
    basis = OrbitBasis.build(n)
    no = len(basis)
    nph = photon_cutoff + 1
    sz1, sp1, sm1 = spin_half_ops()
    a = boson_ops(photon_cutoff)
    ad = a.conj().T.tocsr()
    I_ph = sp.identity(nph * nph, format="csr")
    I_o = sp.identity(no, format="csr")
    T = basis.lift
    Lz, Rz = T(left(sp.csr_matrix(sz1))), T(right(sp.csr_matrix(sz1)))
    Lp, Rp = T(left(sp.csr_matrix(sp1))), T(right(sp.csr_matrix(sp1)))
    Lm, Rm = T(left(sp.csr_matrix(sm1))), T(right(sp.csr_matrix(sm1)))
    gl, glp = _hamiltonian_terms(params)
    K = sp.kron
    La, Ra, Lad, Rad = left(a), right(a), left(ad), right(ad)
    gen = params.omega_c * K(-1j * (left(ad @ a) - right(ad @ a)), I_o)
    gen = gen + params.omega_z * K(I_ph, -1j * (Lz - Rz))
    gen = gen - 1j * gl * (K(La, Lp) + K(Lad, Lm) - K(Ra, Rp) - K(Rad, Rm))
    gen = gen - 1j * glp * (K(La, Lm) + K(Lad, Lp) - K(Ra, Rm) - K(Rad, Rp))
    if params.kappa > 0:
        gen = gen + K(dissipator(a, params.kappa), I_o)
    for op, rate in ((sm1, params.gamma_down), (sp1, params.gamma_up), (sz1, params.gamma_phi)):
        if rate > 0:
            gen = gen + K(I_ph, T(dissipator(sp.csr_matrix(op), rate)))
    if params.gamma > 0:
        g = params.gamma / n
        coll = 2 * (Lm @ Rp) - Lp @ Lm - Rm @ Rp
        gen = gen + g * K(I_ph, coll)
    gen = gen.tocsr()

    t_ph = vec_functional(sp.identity(nph))
    t_o = basis.trace()
    trace = np.kron(t_ph, t_o)
    tr_row = sp.csr_matrix(trace)

    def functional(ph_super, spin_super):
        return np.asarray((tr_row @ K(ph_super, spin_super)).todense()).ravel()

    Sx = 0.5 * (Lp + Lm)
    Sy = -0.5j * (Lp - Lm)
    nn = n * (n - 1)
    obs = {"n_ph": functional(left(ad @ a), I_o), "sz": functional(I_ph, Lz) / n}
    for name, op, shift in (("xx", Sx @ Sx, -n / 4), ("yy", Sy @ Sy, -n / 4),
                            ("zz", Lz @ Lz, -n / 4), ("xy", 0.5 * (Sx @ Sy + Sy @ Sx), 0.0)):
        obs[name] = (functional(I_ph, op) + shift * trace) / nn if nn else 0 * trace
    init = np.zeros(nph * nph * no, dtype=complex)
    init[basis.index[(0, 0, 0, n)]] = 1.0
    top = np.zeros(nph)
    top[-1] = 1.0
    top_fn = np.kron(vec_functional(sp.diags(top)), t_o)
    liou = Liouvillian(gen, trace, obs, init, top_fn, photon_cutoff, "permsym",
                       extra={"basis": basis})
    if even_sector:
        nl = np.tile(np.arange(nph), nph)
        nr = np.repeat(np.arange(nph), nph)
        c = basis.counts
        par = (nl[:, None] + nr[:, None] + c[None, :, DU] + c[None, :, UD]) % 2
        liou = restrict(liou, np.flatnonzero(par.ravel() == 0))
    return liou


def restrict(liou: Liouvillian, keep: np.ndarray) -> Liouvillian:
    """Generator restricted to an invariant subspace of basis elements."""
    m = liou.matrix[keep][:, keep].tocsr()
    obs = {k: (f[keep] if np.ndim(f) else f) for k, f in liou.observables.items()}
    return Liouvillian(m, liou.trace[keep], obs, liou.initial[keep], liou.top_fock[keep],
                       liou.photon_cutoff, liou.kind, liou.hilbert_dim,
                       dict(liou.extra, keep=keep))


# --- steady states and dynamics ---------------------------------------------


@dataclass(frozen=True)
class SteadyState:
    vector: np.ndarray
    residual: float
    observables: dict
    top_fock: float
    photon_cutoff: int

    def density_matrix(self, dim: int) -> np.ndarray:
        return self.vector.reshape((dim, dim), order="F")


def _umfpack_solve(A, b):
    coo = A.tocoo()
    m = cvxopt.spmatrix(coo.data.astype(complex).tolist(), coo.row.tolist(), coo.col.tolist(),
                        coo.shape, "z")
    x = cvxopt.matrix(np.asarray(b, dtype=complex))
    try:
        umfpack.linsolve(m, x)
    except ArithmeticError as exc:
        raise DegenerateSteadyState(f"augmented generator is singular: {exc}") from exc
    return np.array(x).ravel()


def _solve_augmented(A, b, direct: bool):
    if direct:
        v = _umfpack_solve(A, b)
        # one step of iterative refinement
        return v + _umfpack_solve(A, b - A @ v)
    try:
        ilu = spla.spilu(A.tocsc(), drop_tol=1e-4, fill_factor=10, permc_spec="MMD_AT_PLUS_A")
    except RuntimeError as exc:
        raise DegenerateSteadyState(f"augmented generator is singular: {exc}") from exc
    pre = spla.LinearOperator(A.shape, ilu.solve, dtype=complex)
    v, info = spla.gmres(A, b, x0=ilu.solve(b), M=pre, rtol=1e-13, atol=0.0,
                         restart=200, maxiter=50)
    if info != 0:
        raise DegenerateSteadyState(f"GMRES did not converge (info={info})")
    return v


def steady_state(liou: Liouvillian, check_unique: bool = False, cutoff_tol: float = 1e-6,
                 residual_tol: float = 1e-10, direct_limit: int = 60000) -> SteadyState:
    """Null vector of the generator with unit trace.

    The trace functional replaces one row of ``L`` and the augmented system
    is solved by UMFPACK sparse LU (or, above ``direct_limit`` unknowns, by GMRES
    preconditioned with an incomplete LU); a singular augmented system means
    the zero eigenvalue is degenerate. ``check_unique`` additionally computes the two
    eigenvalues closest to zero by shift-invert Arnoldi.
    """
    k = int(np.flatnonzero(liou.initial)[0])
    mask = np.ones(liou.dim)
    mask[k] = 0.0
    nz = np.flatnonzero(liou.trace)
    row = sp.csr_matrix((liou.trace[nz], (np.full(len(nz), k), nz)), shape=liou.matrix.shape)
    A = (sp.diags(mask) @ liou.matrix + row).tocsc()
    b = np.zeros(liou.dim, dtype=complex)
    b[k] = 1.0
    v = _solve_augmented(A, b, direct=liou.dim <= direct_limit)
    v = v / (liou.trace @ v)
    res = float(np.linalg.norm(liou.matrix @ v))
    if not np.all(np.isfinite(v)):
        raise DegenerateSteadyState("steady-state solve produced non-finite values")
    if res > residual_tol:
        raise NonStationary(f"steady-state residual {res:.2e} exceeds {residual_tol:g}")
    if check_unique:
        vals = spla.eigs(liou.matrix.tocsc(), k=2, sigma=1e-9, return_eigenvectors=False)
        vals = sorted(vals, key=abs)
        if abs(vals[1]) < 1e-12 * max(1.0, spla.norm(liou.matrix, 1)):
            raise DegenerateSteadyState(f"second eigenvalue {vals[1]} is numerically zero")
    top = float(np.real(liou.top_fock @ v))
    if top > cutoff_tol:
        raise CutoffTooSmall(f"top Fock population {top:.2e} exceeds {cutoff_tol:g}")
    return SteadyState(v, res, liou.expectations(v), top, liou.photon_cutoff)


class _SylvesterInverse:
    """Solves ``K X + X K^+ = C`` for a fixed stable ``K``.

    A well-conditioned eigenbasis turns the solve into two congruences and an
    elementwise division; otherwise the complex Schur form and LAPACK
    ``trsyl`` are used.
    """

    def __init__(self, k: np.ndarray, max_cond: float = 1e8):
        w, v = np.linalg.eig(k)
        denom = w[:, None] + w.conj()[None, :]
        if np.linalg.cond(v) < max_cond and np.all(np.abs(denom) > 0):
            self._v, self._vi, self._denom = v, np.linalg.inv(v), denom
            self._schur = None
        else:
            r, q = sla.schur(k, output="complex")
            self._schur = (r, q)

    def __call__(self, c: np.ndarray) -> np.ndarray:
        if self._schur is None:
            y = (self._vi @ c @ self._vi.conj().T) / self._denom
            return self._v @ y @ self._v.conj().T
        r, q = self._schur
        y, scale, info = ztrsyl(r, r, q.conj().T @ c @ q, tranb="C")
        if info < 0:
            raise DegenerateSteadyState("triangular Sylvester solve failed")
        return q @ (y / scale) @ q.conj().T


def steady_state_jump_chain(liou: Liouvillian, cutoff_tol: float = 1e-6,
                            residual_tol: float = 1e-10) -> SteadyState:
    """Steady state of a Hilbert-space generator from its jump chain.

    With ``K = -iH - sum_k r_k L_k^+ L_k`` and ``J(rho) = 2 sum_k r_k L_k rho L_k^+``
    the stationarity condition ``K rho + rho K^+ + J(rho) = 0`` is equivalent to
    ``sigma = J(rho)`` being the fixed point of the CPTP map
    ``Phi(sigma) = J(-S^{-1} sigma)``, ``S(X) = K X + X K^+``. Photon loss flips
    the Z2 parity, so ``Phi`` also has the eigenvalue -1; the fixed point is
    computed as the dominant eigenvector of ``(1 + Phi) / 2``. Memory and work
    scale as ``D^2`` and ``D^3`` in the Hilbert dimension ``D``, not the
    ``D^4`` fill of a sparse factorisation. Dark steady states (no jumps, e.g.
    the vacuum of a lossy Tavis-Cummings model without pump) make ``J(rho) = 0``
    and are out of reach of this method; use ``steady_state`` for those.
    """
    if "hamiltonian" not in liou.extra:
        raise ValueError("the jump-chain solver needs a Hilbert-space generator")
    h = liou.extra["hamiltonian"].toarray()
    d = h.shape[0]
    k = -1j * h
    jumps = []
    for op, rate in liou.extra["jumps"]:
        op = sp.csr_matrix(op)
        k = k - rate * (op.conj().T @ op).toarray()
        jumps.append((op, op.conj().T.tocsr(), 2.0 * rate))
    sinv = _SylvesterInverse(k)

    def phi(s):
        x = -sinv(s)
        out = np.zeros_like(x)
        for op, opd, r in jumps:
            out += r * (op @ (opd.T @ x.T).T)
        return out

    def matvec(v):
        s = v.reshape(d, d)
        return (0.5 * (s + phi(s))).ravel()

    op = spla.LinearOperator((d * d, d * d), matvec=matvec, dtype=complex)
    try:
        _, vecs = spla.eigs(op, k=1, which="LM", tol=1e-13, v0=np.eye(d).ravel() / d)
    except spla.ArpackNoConvergence as exc:
        raise NonStationary(f"jump-chain fixed point did not converge: {exc}") from exc
    rho = -sinv(vecs[:, 0].reshape(d, d))
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    v = rho.flatten(order="F")
    res = float(np.linalg.norm(liou.matrix @ v))
    if res > residual_tol:
        raise NonStationary(f"steady-state residual {res:.2e} exceeds {residual_tol:g}")
    top = float(np.real(liou.top_fock @ v))
    if top > cutoff_tol:
        raise CutoffTooSmall(f"top Fock population {top:.2e} exceeds {cutoff_tol:g}")
    return SteadyState(v, res, liou.expectations(v), top, liou.photon_cutoff)


def evolve(liou: Liouvillian, times, v0=None) -> list[dict[str, float]]:
    """Observables along ``exp(L t) v0`` (default: vacuum, all atoms down)."""
    v0 = liou.initial if v0 is None else v0
    times = np.asarray(times, dtype=float)
    if len(times) > 1 and np.allclose(np.diff(times), times[1] - times[0]) and times[0] == 0:
        vs = spla.expm_multiply(liou.matrix.tocsc(), v0, start=times[0], stop=times[-1],
                                num=len(times), endpoint=True)
    else:
        vs = [spla.expm_multiply(liou.matrix.tocsc() * t, v0) for t in times]
    return [liou.expectations(v) for v in vs]


def default_cutoff(n_estimate: float) -> int:
    return max(10, int(math.ceil(8 * n_estimate)))


def solve_with_cutoff(builder, params: ModelParams, cutoff: int = 10, max_cutoff: int = 160,
                      solver=None, growth: float = 1.5, **kwargs) -> SteadyState:
    """Steady state, enlarging the photon cutoff until the top Fock state is empty.

    ``solver`` defaults to the jump-chain method for Hilbert-space builders
    and to the sparse augmented solve otherwise.
    """
    while True:
        liou = builder(params, cutoff)
        solve = solver or (steady_state_jump_chain if "hamiltonian" in liou.extra else steady_state)
        try:
            return solve(liou, **kwargs)
        except CutoffTooSmall:
            if cutoff >= max_cutoff:
                raise
            cutoff = min(max_cutoff, max(cutoff + 2, int(math.ceil(cutoff * growth))))


# --- finite-size scaling ----------------------------------------------------


@dataclass(frozen=True)
class FiniteSizeScan:
    n_atoms: np.ndarray
    n_ph: np.ndarray
    cutoffs: np.ndarray
    fit: PowerLawFit
    states: tuple = ()


def finite_size_scan(params: ModelParams, n_list, at_critical: bool = True,
                     builder=build_collective_liouvillian, cutoff: int = 12,
                     cutoff_tol: float = 1e-6) -> FiniteSizeScan:
    """Steady-state photon number against ``N`` and its log-log slope ``xi``."""
    n_list = [int(n) for n in n_list]
    if len(n_list) < 4:
        raise InsufficientPoints("finite-size scans need at least 4 values of N")
    if at_critical:
        lc = lambda_c_collective(params.omega_c, params.omega_z, params.kappa, params.gamma).lambda_c
        params = params.with_(lam=lc)
    states, cuts = [], []
    for n in n_list:
        st = solve_with_cutoff(builder, params.with_(n_atoms=n), cutoff, cutoff_tol=cutoff_tol)
        states.append(st)
        cuts.append(st.photon_cutoff)
        cutoff = st.photon_cutoff
    nph = np.array([s.observables["n_ph"] for s in states])
    fit = fit_power_law(n_list, nph)
    return FiniteSizeScan(np.array(n_list), nph, np.array(cuts), fit, tuple(states))


def ground_state_photons(params: ModelParams, photon_cutoff: int) -> tuple[float, float]:
    """Closed-system ground state on the Dicke manifold: ``(<a^+ a>, top Fock weight)``."""
    n = params.n_atoms
    sz, spl, smi = collective_spin_ops(n)
    a = boson_ops(photon_cutoff)
    ip = sp.identity(photon_cutoff + 1, format="csr")
    isp = sp.identity(n + 1, format="csr")
    A = sp.kron(a, isp, format="csr")
    Ad = A.conj().T.tocsr()
    Spf, Smf = sp.kron(ip, spl, format="csr"), sp.kron(ip, smi, format="csr")
    gl, glp = _hamiltonian_terms(params)
    H = (params.omega_c * (Ad @ A) + params.omega_z * sp.kron(ip, sz)
         + gl * (A @ Spf + Ad @ Smf) + glp * (A @ Smf + Ad @ Spf))
    H = (H + H.conj().T) * 0.5
    vals, vecs = spla.eigsh(H.tocsc(), k=1, which="SA", tol=1e-12)
    psi = vecs[:, 0]
    nph = float(np.real(np.vdot(psi, Ad @ (A @ psi))))
    w = np.abs(psi.reshape(photon_cutoff + 1, n + 1)) ** 2
    return nph, float(w[-1].sum())


def ground_state_scan(params: ModelParams, n_list, cutoff: int = 40) -> FiniteSizeScan:
    """``<a^+ a>`` of the closed-system ground state at ``lambda_c`` against ``N``."""
    n_list = [int(n) for n in n_list]
    if len(n_list) < 4:
        raise InsufficientPoints("finite-size scans need at least 4 values of N")
    lc = 0.5 * math.sqrt(params.omega_c * params.omega_z)
    p = params.with_(lam=lc, kappa=0.0, gamma=0.0)
    nph, cuts = [], []
    for n in n_list:
        while True:
            val, top = ground_state_photons(p.with_(n_atoms=n), cutoff)
            if top < 1e-12:
                break
            cutoff *= 2
        nph.append(val)
        cuts.append(cutoff)
    fit = fit_power_law(n_list, nph)
    return FiniteSizeScan(np.array(n_list), np.array(nph), np.array(cuts), fit)
