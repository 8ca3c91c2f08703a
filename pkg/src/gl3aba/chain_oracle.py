"""Exact realization of the GL(3) monodromy algebra on (C^3)^{x N}.

The monodromy matrix is the ordered product of R-matrices over the sites,

    T(u) = R_{0N}(u, xi_N) ... R_{01}(u, xi_1),      R(u,v) = I + g(u,v) P,

with the auxiliary space traced out as needed.  Everything the sum formulas
assert can be brute-forced here: scalar products, form factors, zero modes,
and the entry-transposition antimorphism.

Dual (bra) states are plain transposes, no complex conjugation: the left
eigenvector paired with a right eigenvector x is S x, where S is the
similarity realizing transposition,

    T_ij(u)^T = S T_ji(u) S^{-1}.

S is built from the site-reversal permutation times a bubble-sort product of
two-site exchange operators P + g(xi_a, xi_b) I; it is symmetric, so bra/ket
pairings inherit the transposition symmetry exactly (no per-state phase
bookkeeping is needed anywhere downstream).

Zero modes are exact 1/u coefficients: T_ij[0] = sum over sites of E_ji at
each site (partial versions sum over the first ``split`` sites only).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .ratcore import Coupling, ParameterSet, PoleError, tau
from .bethe_solver import BetheRoots, ModelFunctions

DIMENSION_CAP = 7
DENSE_MAX_SITES = 5
EIG_MATCH_TOL = 1e-8
CERT_PROBES = 4


class ChainError(ValueError):
    """Invalid chain construction request."""


class NoMatchError(LookupError):
    """No transfer-matrix eigenvalue matches the supplied Bethe roots."""


class AmbiguityError(LookupError):
    """Two eigenvalues match the supplied roots within tolerance."""


def _basis_digits(idx: int, N: int) -> tuple[int, ...]:
    return tuple((idx // 3 ** (N - 1 - k)) % 3 for k in range(N))


def _single_site_E(a: int, b: int) -> sp.csr_matrix:
    m = sp.lil_matrix((3, 3), dtype=complex)
    m[a, b] = 1.0
    return m.tocsr()


@dataclass
class ChainRealization:
    """Inhomogeneous GL(3) chain with a composite cut after site ``split``."""

    N: int
    xi: ParameterSet
    coupling: Coupling
    split: int = 0

    def __post_init__(self):
        if self.N < 1 or self.N > DIMENSION_CAP:
            raise ChainError(f"site count {self.N} outside 1..{DIMENSION_CAP}")
        if len(self.xi) != self.N:
            raise ChainError("need exactly one inhomogeneity per site")
        if not 0 <= self.split <= self.N:
            raise ChainError(f"split {self.split} outside 0..{self.N}")
        # ParameterSet construction already rejects coinciding points unless
        # the set was explicitly marked degenerate; re-check to be safe.
        pts = self.xi.points
        for i in range(self.N):
            for j in range(i + 1, self.N):
                if abs(pts[i] - pts[j]) < 1e-12 * max(1.0, abs(pts[i]), abs(pts[j])):
                    raise ChainError("coinciding inhomogeneities")
        self.dim = 3**self.N
        self.dense = self.N <= DENSE_MAX_SITES
        self._site_E = [
            [
                [self._embed(_single_site_E(a, b), s) for b in range(3)]
                for a in range(3)
            ]
            for s in range(self.N)
        ]
        self._cache: dict = {}
        self._lock = threading.Lock()
        self._S = None
        self._S_inv = None

    # -- construction helpers ------------------------------------------------

    def _embed(self, op3: sp.spmatrix, site: int) -> sp.csr_matrix:
        left = sp.identity(3**site, dtype=complex, format="csr")
        right = sp.identity(3 ** (self.N - site - 1), dtype=complex, format="csr")
        return sp.kron(sp.kron(left, op3), right, format="csr")

    def site_E(self, site: int, a: int, b: int) -> sp.csr_matrix:
        """E_{ab} acting at ``site`` (0-based), identity elsewhere."""
        return self._site_E[site][a][b]

    def model(self) -> ModelFunctions:
        return ModelFunctions.chain(self.xi, self.coupling, split=self.split)

    def _monodromy(self, u: complex, sites: Iterable[int]):
        """3x3 auxiliary block of the ordered R-product over ``sites``."""
        for p in self.xi:
            if abs(u - p) < 1e-12 * max(1.0, abs(u), abs(p)):
                raise PoleError(u, p, "monodromy argument hits an inhomogeneity")
        ident = sp.identity(self.dim, dtype=complex, format="csr")
        zero = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        T = [[ident if i == j else zero for j in range(3)] for i in range(3)]
        for s in sorted(sites):
            gk = self.coupling.c / (u - self.xi[s])
            new = [[None] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(3):
                    acc = T[i][j]
                    for m in range(3):
                        acc = acc + gk * (self._site_E[s][m][i] @ T[m][j])
                    new[i][j] = acc
            T = new
        if self.dense:
            T = [[np.asarray(T[i][j].todense()) for j in range(3)] for i in range(3)]
        return T

    def _blocks(self, u: complex, scope: str):
        key = (scope, complex(u))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        if scope == "total":
            sites: Iterable[int] = range(self.N)
        elif scope == "part1":
            sites = range(self.split)
        elif scope == "part2":
            sites = range(self.split, self.N)
        else:
            raise ValueError(f"unknown scope {scope!r}")
        blocks = self._monodromy(u, sites)
        with self._lock:
            self._cache.setdefault(key, blocks)
        return blocks

    # -- public operator surface ----------------------------------------------

    def monodromy_entry(self, i: int, j: int, u: complex, scope: str = "total"):
        """Quantum-space operator T_ij(u) (1-based entry indices)."""
        if not (1 <= i <= 3 and 1 <= j <= 3):
            raise ValueError("entry indices run over 1..3")
        return self._blocks(u, scope)[i - 1][j - 1]

    def transfer_matrix(self, w: complex, scope: str = "total"):
        blocks = self._blocks(w, scope)
        return blocks[0][0] + blocks[1][1] + blocks[2][2]

    def zero_mode(self, i: int, j: int, scope: str = "total"):
        """Exact 1/u coefficient of T_ij(u) - delta_ij: sum of site E_ji."""
        if scope == "total":
            sites: Iterable[int] = range(self.N)
        elif scope == "part1":
            sites = range(self.split)
        elif scope == "part2":
            sites = range(self.split, self.N)
        else:
            raise ValueError(f"unknown scope {scope!r}")
        acc = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for s in sites:
            acc = acc + self._site_E[s][j - 1][i - 1]
        return np.asarray(acc.todense()) if self.dense else acc

    def weight_operator(self, k: int):
        acc = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for s in range(self.N):
            acc = acc + self._site_E[s][k - 1][k - 1]
        return np.asarray(acc.todense()) if self.dense else acc

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    # -- weight blocks ---------------------------------------------------------

    def block_indices(self, counts: tuple[int, int, int]) -> np.ndarray:
        if any(c < 0 for c in counts) or sum(counts) != self.N:
            raise ChainError(f"invalid weight block {counts} for N={self.N}")
        out = [
            idx
            for idx in range(self.dim)
            if tuple(_basis_digits(idx, self.N).count(d) for d in range(3)) == counts
        ]
        return np.array(out, dtype=int)

    # -- transposition similarity ----------------------------------------------

    def _build_S(self):
        P9 = np.zeros((9, 9), dtype=complex)
        for a in range(3):
            for b in range(3):
                P9[b * 3 + a, a * 3 + b] = 1.0

        def two_site(op9: np.ndarray, s: int) -> sp.csr_matrix:
            left = sp.identity(3**s, dtype=complex, format="csr")
            right = sp.identity(3 ** (self.N - s - 2), dtype=complex, format="csr")
            return sp.kron(sp.kron(left, sp.csr_matrix(op9)), right, format="csr")

        X = sp.identity(self.dim, dtype=complex, format="csr")
        seq = list(self.xi.points)
        # bubble-reverse the inhomogeneity sequence with exchange operators
        for i in range(self.N - 1):
            for s in range(self.N - 1 - i):
                a, b = seq[s], seq[s + 1]
                gab = self.coupling.c / (a - b)
                X = two_site(P9 + gab * np.eye(9), s) @ X
                seq[s], seq[s + 1] = seq[s + 1], seq[s]
        # site-reversal permutation
        Pi = sp.lil_matrix((self.dim, self.dim), dtype=complex)
        for idx in range(self.dim):
            digs = _basis_digits(idx, self.N)[::-1]
            j = sum(d * 3 ** (self.N - 1 - k) for k, d in enumerate(digs))
            Pi[j, idx] = 1.0
        S = (Pi.tocsr() @ X)
        S = np.asarray(S.todense())
        # self-check: S implements the transposition antimorphism
        probe = (max(abs(p) for p in self.xi.points) + 1.7) * np.exp(0.83j)
        blocks = self._monodromy(probe, range(self.N))
        dev = 0.0
        for i in range(3):
            for j in range(3):
                Bij = blocks[i][j] if self.dense else np.asarray(blocks[i][j].todense())
                Bji = blocks[j][i] if self.dense else np.asarray(blocks[j][i].todense())
                dev = max(dev, np.abs(Bij.T @ S - S @ Bji).max())
        scale = max(1.0, float(np.abs(S).max()))
        if dev > 1e-8 * scale:
            raise ChainError(f"transposition similarity self-check failed: {dev:.3e}")
        self._S = S
        self._S_inv = np.linalg.inv(S)

    @property
    def transposition_similarity(self) -> np.ndarray:
        if self._S is None:
            with self._lock:
                if self._S is None:
                    self._build_S()
        return self._S

    def psi_transpose(self, op) -> np.ndarray:
        """Entry-transposition antimorphism: psi(T_ij(u)) = T_ji(u)."""
        S = self.transposition_similarity
        op = np.asarray(op.todense()) if sp.issparse(op) else np.asarray(op)
        return self._S_inv @ op.T @ S

    def dual_vector(self, x: np.ndarray) -> np.ndarray:
        """Left (bra) companion of a right eigenvector under the bilinear pairing."""
        return self.transposition_similarity @ x


def build_chain(N: int, xi: ParameterSet, c: Coupling, split: int = 0) -> ChainRealization:
    return ChainRealization(N=N, xi=xi, coupling=c, split=split)


# ---------------------------------------------------------------------------
# On-shell states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OnShellState:
    """Certified transfer-matrix eigenvector matched to a Bethe configuration."""

    state: np.ndarray
    dual: np.ndarray
    a: int
    b: int
    roots: BetheRoots
    certificate: float
    weights: tuple[int, int, int]

    def pairing(self) -> complex:
        """Bilinear self-pairing <dual, state> (no conjugation)."""
        return complex(self.dual @ self.state)


def _probe_points(chain: ChainRealization, roots: BetheRoots, count: int) -> list[complex]:
    avoid = list(chain.xi.points) + list(roots.ubar.points) + list(roots.vbar.points)
    radius = 2.0 * max([abs(p) for p in avoid] + [1.0]) + 1.0
    probes = []
    k = 0
    while len(probes) < count and k < 100:
        w = radius * np.exp(2j * np.pi * (k / 7.3) + 0.41j)
        k += 1
        if all(abs(w - p) > 1e-3 for p in avoid):
            probes.append(complex(w))
    return probes


def identify_onshell(chain: ChainRealization, roots: BetheRoots) -> OnShellState:
    """Select and certify the transfer-matrix eigenvector for given Bethe roots.

    Restricts to the weight block (N-a, a-b, b), diagonalizes the transfer
    matrix at one probe point, picks the eigenvalue matching tau there, and
    certifies against further probes.
    """
    a, b = roots.a, roots.b
    counts = (chain.N - a, a - b, b)
    if any(cnt < 0 for cnt in counts):
        raise NoMatchError(
            f"sector (a,b)=({a},{b}) has no weight block on an N={chain.N} chain"
        )
    idx = chain.block_indices(counts)
    model = chain.model()
    probes = _probe_points(chain, roots, CERT_PROBES + 1)
    w0, rest = probes[0], probes[1:]

    M0 = chain.transfer_matrix(w0)
    M0 = M0 if chain.dense else np.asarray(M0.todense())
    M0b = M0[np.ix_(idx, idx)]
    tau0 = tau(w0, roots.ubar, roots.vbar, model)
    evals, evecs = np.linalg.eig(M0b)
    dev = np.abs(evals - tau0) / max(1.0, abs(tau0))
    hits = np.flatnonzero(dev < EIG_MATCH_TOL)
    if hits.size == 0:
        raise NoMatchError(
            f"no eigenvalue matches tau({w0}) = {tau0}; best deviation {dev.min():.3e}"
        )
    if hits.size > 1:
        raise AmbiguityError(f"{hits.size} eigenvalues match tau within {EIG_MATCH_TOL}")
    xb = evecs[:, hits[0]]
    # normalize: largest-magnitude amplitude becomes exactly 1
    pivot = np.argmax(np.abs(xb))
    xb = xb / xb[pivot]
    x = np.zeros(chain.dim, dtype=complex)
    x[idx] = xb

    cert = 0.0
    for w in rest:
        Mw = chain.transfer_matrix(w)
        Mw = Mw if chain.dense else np.asarray(Mw.todense())
        tw = tau(w, roots.ubar, roots.vbar, model)
        cert = max(cert, float(np.linalg.norm(Mw[np.ix_(idx, idx)] @ xb - tw * xb)
                               / np.linalg.norm(xb)))
    y = chain.dual_vector(x)
    return OnShellState(
        state=x, dual=y, a=a, b=b, roots=roots, certificate=cert, weights=counts
    )


def enumerate_regular_solutions(
    chain: ChainRealization,
    a: int,
    b: int,
    rng_seed: int = 23,
    tries_per_eigenvalue: int = 60,
) -> list[BetheRoots]:
    """Recover the finite-root Bethe solutions of a weight sector.

    Diagonalizes the transfer matrix on the (N-a, a-b, b) block, then for each
    distinct eigenvalue branch attempts to invert tau for the root sets and
    polishes with Newton on the Bethe system.  Eigenvalue branches carried by
    lowered states of other sectors simply fail the inversion and are skipped;
    everything returned is a verified regular solution.
    """
    from .bethe_solver import SolverError, TwistVector, _newton, _package

    counts = (chain.N - a, a - b, b)
    if any(cnt < 0 for cnt in counts):
        return []
    idx = chain.block_indices(counts)
    if idx.size == 0:
        return []
    model = chain.model()
    n = a + b
    probes_all = _probe_points_raw(chain, CERT_PROBES + n + 2)
    w0, probes = probes_all[0], probes_all[1 : n + 2]

    M0 = chain.transfer_matrix(w0)
    M0 = M0 if chain.dense else np.asarray(M0.todense())
    M0b = M0[np.ix_(idx, idx)]
    evals, evecs = np.linalg.eig(M0b)
    # one representative eigenvector per distinct eigenvalue
    reps = []
    for s, lam in enumerate(evals):
        if all(abs(lam - mu) > 1e-8 * max(1.0, abs(mu)) for mu, _ in reps):
            reps.append((lam, evecs[:, s]))

    Mb = {}
    for w in probes:
        Mw = chain.transfer_matrix(w)
        Mw = Mw if chain.dense else np.asarray(Mw.todense())
        Mb[w] = Mw[np.ix_(idx, idx)]

    rng = np.random.default_rng(rng_seed)
    scale = max(1.0, float(max(abs(p) for p in chain.xi.points)))
    out: list[BetheRoots] = []
    tw = TwistVector.identity()
    for lam0, x in reps:
        if n == 0:
            lam_expected = tau(w0, ParameterSet.of(), ParameterSet.of(), model)
            if abs(lam0 - lam_expected) < 1e-8 * max(1.0, abs(lam_expected)):
                out.append(_package(np.zeros(0, complex), np.zeros(0, complex),
                                    model, tw, 0.0, {"method": "spectrum"}))
            continue
        lam = np.array([(x @ (Mb[w] @ x)) / (x @ x) for w in probes])

        def tau_defect(z):
            ub = ParameterSet(tuple(z[:a]), "uC", degenerate=True)
            vb = ParameterSet(tuple(z[a:]), "vC", degenerate=True)
            return np.array(
                [tau(w, ub, vb, model) - lam[i] for i, w in enumerate(probes)]
            )

        recovered = None
        for _ in range(tries_per_eigenvalue):
            z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * scale
            try:
                z = _tau_newton(tau_defect, z)
            except (ArithmeticError, np.linalg.LinAlgError):
                continue
            if z is None:
                continue
            try:
                u, v, norm = _newton(np.array(z[:a]), np.array(z[a:]), model, tw,
                                     bound=80.0 * (scale + 1.0))
            except SolverError:
                continue
            recovered = (u, v, norm)
            break
        if recovered is None:
            continue
        u, v, norm = recovered
        cand = _package(u, v, model, tw, norm, {"method": "spectrum"})
        if not any(
            cand.ubar.same_multiset(r.ubar) and cand.vbar.same_multiset(r.vbar)
            for r in out
        ):
            out.append(cand)
    return out


def _tau_newton(F, z0, max_iter=40, tol=1e-9):
    z = np.asarray(z0, dtype=complex)
    n = len(z)
    h = 1e-6
    for _ in range(max_iter):
        r = F(z)
        if np.max(np.abs(r)) < tol:
            return z
        J = np.zeros((len(r), n), dtype=complex)
        for k in range(n):
            dz = np.zeros(n, dtype=complex)
            dz[k] = h
            J[:, k] = (F(z + dz) - F(z - dz)) / (2 * h)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        if np.max(np.abs(step)) > 100.0:
            return None
        z = z + step
    return None


def _probe_points_raw(chain: ChainRealization, count: int) -> list[complex]:
    avoid = list(chain.xi.points)
    radius = 2.0 * max([abs(p) for p in avoid] + [1.0]) + 1.0
    probes = []
    k = 0
    while len(probes) < count and k < 200:
        w = radius * np.exp(2j * np.pi * (k / 7.3) + 0.41j)
        k += 1
        if all(abs(w - p) > 1e-3 for p in avoid):
            probes.append(complex(w))
    return probes


def matrix_element(chain: ChainRealization, C: OnShellState, op, B: OnShellState) -> complex:
    """Bilinear pairing <C| op |B> with the transpose (not Hermitian) bra."""
    opx = (op @ B.state) if not sp.issparse(op) else np.asarray(op @ B.state).ravel()
    if opx.shape != C.dual.shape:
        raise ValueError("operator does not act on this chain's space")
    return complex(C.dual @ opx)


def scalar_product(chain: ChainRealization, C: OnShellState, B: OnShellState) -> complex:
    return complex(C.dual @ B.state)


# ---------------------------------------------------------------------------
# Structure checks (used by the verify suites)
# ---------------------------------------------------------------------------


def rtt_defect(chain: ChainRealization, u: complex, v: complex) -> float:
    """max-norm of R12 T1(u) T2(v) - T2(v) T1(u) R12 on V1 x V2 x H."""
    dim = chain.dim
    Tu = chain._blocks(u, "total")
    Tv = chain._blocks(v, "total")
    as_dense = (lambda m: m) if chain.dense else (lambda m: np.asarray(m.todense()))
    big = 9 * dim
    T1 = np.zeros((big, big), dtype=complex)
    T2 = np.zeros((big, big), dtype=complex)
    for al in range(3):
        for be in range(3):
            for al2 in range(3):
                for be2 in range(3):
                    r0, c0 = (al * 3 + be) * dim, (al2 * 3 + be2) * dim
                    if be == be2:
                        T1[r0 : r0 + dim, c0 : c0 + dim] = as_dense(Tu[al][al2])
                    if al == al2:
                        T2[r0 : r0 + dim, c0 : c0 + dim] += as_dense(Tv[be][be2])
    g12 = chain.coupling.c / (u - v)
    R = np.zeros((big, big), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for al in range(3):
        for be in range(3):
            r0 = (al * 3 + be) * dim
            R[r0 : r0 + dim, r0 : r0 + dim] = eye
            c0 = (be * 3 + al) * dim
            R[r0 : r0 + dim, c0 : c0 + dim] += g12 * eye
    lhs = R @ T1 @ T2
    rhs = T2 @ T1 @ R
    return float(np.abs(lhs - rhs).max())


def composite_defect(chain: ChainRealization, u: complex) -> float:
    """max over entries of || T(u) - sum_k T2_ik(u) T1_kj(u) ||."""
    tot = chain._blocks(u, "total")
    p1 = chain._blocks(u, "part1")
    p2 = chain._blocks(u, "part2")
    as_dense = (lambda m: m) if chain.dense else (lambda m: np.asarray(m.todense()))
    worst = 0.0
    for i in range(3):
        for j in range(3):
            acc = np.zeros((chain.dim, chain.dim), dtype=complex)
            for k in range(3):
                acc += as_dense(p2[i][k]) @ as_dense(p1[k][j])
            worst = max(worst, float(np.abs(acc - as_dense(tot[i][j])).max()))
    return worst


def exchange_2132_defect(chain: ChainRealization, u: complex, v: complex) -> float:
    """[T1_21(u), T1_32(v)] - g(u,v)(T1_31(v) T1_22(u) - T1_31(u) T1_22(v))."""
    as_dense = (lambda m: m) if chain.dense else (lambda m: np.asarray(m.todense()))
    A = as_dense(chain.monodromy_entry(2, 1, u, "part1"))
    B = as_dense(chain.monodromy_entry(3, 2, v, "part1"))
    C31v = as_dense(chain.monodromy_entry(3, 1, v, "part1"))
    C31u = as_dense(chain.monodromy_entry(3, 1, u, "part1"))
    D22u = as_dense(chain.monodromy_entry(2, 2, u, "part1"))
    D22v = as_dense(chain.monodromy_entry(2, 2, v, "part1"))
    g12 = chain.coupling.c / (u - v)
    lhs = A @ B - B @ A
    rhs = g12 * (C31v @ D22u - C31u @ D22v)
    return float(np.abs(lhs - rhs).max())


def state_to_record(state: OnShellState) -> dict:
    return {
        "a": state.a,
        "b": state.b,
        "weights": list(state.weights),
        "certificate": state.certificate,
        "amplitudes": [[z.real, z.imag] for z in state.state],
        "u_roots": [[z.real, z.imag] for z in state.roots.ubar],
        "v_roots": [[z.real, z.imag] for z in state.roots.vbar],
    }
