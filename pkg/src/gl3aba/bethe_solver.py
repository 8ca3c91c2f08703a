"""Solver for the (twisted) Bethe systems of GL(3)-invariant models.

The equations are handled in logarithmic form.  With singleton subsets the
system reads, for every u-root u_k and v-root v_l,

    log r1(u_k) + log(k1/k2)
        - sum_{j != k} [log f(u_k,u_j) - log f(u_j,u_k)] - sum_l log f(v_l,u_k) = 0
    log r3(v_l) + log(k3/k2)
        - sum_{j != l} [log f(v_j,v_l) - log f(v_l,v_j)] - sum_m log f(v_l,u_m) = 0

each understood modulo 2*pi*i; the residual wraps the imaginary part to the
principal branch, so a configuration solves the system iff every wrapped
residual vanishes.  The identity twist (1,1,1) reduces to the untwisted
system.

Solving is Newton iteration with the analytic complex Jacobian.  For the
two-component gas the recommended route is continuation in the coupling: the
equations decouple at small varkappa (momenta 2*pi*n/L plus an electrostatic
condition for the u-roots), and the solver walks a geometric varkappa ladder
up to the target, guarding against root collisions along the way.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .ratcore import Coupling, ParameterSet, PoleError, product_f

TWO_PI = 2.0 * math.pi
RESIDUAL_TOL = 1e-12
COLLISION_TOL = 1e-8


class SolverError(RuntimeError):
    """Newton iteration failed to produce an accepted root configuration."""


class CollisionError(SolverError):
    """Two roots approached each other below the collision guard."""

    def __init__(self, msg: str, trajectory=None):
        super().__init__(msg)
        self.trajectory = trajectory or []


class SingularJacobianError(SolverError):
    """The Bethe Jacobian is singular; the configuration is degenerate."""


class BranchCutWarning(UserWarning):
    """log(kappa) crossed the principal branch cut."""


# ---------------------------------------------------------------------------
# Model functions
# ---------------------------------------------------------------------------


def _one(_w: complex) -> complex:
    return 1.0 + 0.0j


def _zero(_w: complex) -> complex:
    return 0.0 + 0.0j


@dataclass(frozen=True)
class ModelFunctions:
    """Vacuum ratio functions r1, r3 (r2 == 1 implicitly) plus composite l1, l3.

    ``log_r1``/``log_r3`` are analytic logarithms (used by the residuals, so
    unbounded imaginary parts stay exact for exponential r3), and
    ``dlog_r1``/``dlog_r3`` their derivatives, used by the Jacobian.
    """

    coupling: Coupling
    r1: Callable[[complex], complex]
    r3: Callable[[complex], complex]
    log_r1: Callable[[complex], complex]
    log_r3: Callable[[complex], complex]
    dlog_r1: Callable[[complex], complex]
    dlog_r3: Callable[[complex], complex]
    ell1: Callable[[complex], complex] = _one
    ell3: Callable[[complex], complex] = _one
    dlog_ell1: Callable[[complex], complex] = _zero
    dlog_ell3: Callable[[complex], complex] = _zero
    tag: str = "custom"
    params: dict = field(default_factory=dict)

    # -- constructors -------------------------------------------------------

    @classmethod
    def tcbg(cls, L: float, varkappa: float, x: float = 0.0) -> "ModelFunctions":
        """Two-component Bose gas: r1 = 1, r3(w) = exp(i w L); l3(u) = exp(i u x)."""
        c = Coupling.from_gas(varkappa)
        return cls(
            coupling=c,
            r1=_one,
            r3=lambda w: cmath.exp(1j * w * L),
            log_r1=_zero,
            log_r3=lambda w: 1j * w * L,
            dlog_r1=_zero,
            dlog_r3=lambda _w: 1j * L,
            ell1=_one,
            ell3=lambda u: cmath.exp(1j * u * x),
            dlog_ell1=_zero,
            dlog_ell3=lambda _u: 1j * x,
            tag="tcbg",
            params={"L": float(L), "varkappa": float(varkappa), "x": float(x)},
        )

    @classmethod
    def chain(cls, xi: ParameterSet, c: Coupling, split: int = 0) -> "ModelFunctions":
        """Inhomogeneous lattice: r1(u) = prod_i f(u, xi_i), r3 = 1.

        The composite cut keeps sites 1..split in the first factor, so
        l1(u) = prod_{i <= split} f(u, xi_i) and l3 = 1.
        """
        if not 0 <= split <= len(xi):
            raise ValueError(f"split {split} outside 0..{len(xi)}")
        pts = xi.points
        head = pts[:split]
        cc = c.c

        def r1(u: complex) -> complex:
            return product_f(u, pts, c)

        def log_r1(u: complex) -> complex:
            return sum(cmath.log((u - p + cc) / (u - p)) for p in pts)

        def dlog_r1(u: complex) -> complex:
            return sum(1.0 / (u - p + cc) - 1.0 / (u - p) for p in pts)

        def ell1(u: complex) -> complex:
            return product_f(u, head, c)

        def dlog_ell1(u: complex) -> complex:
            return sum(1.0 / (u - p + cc) - 1.0 / (u - p) for p in head)

        return cls(
            coupling=c,
            r1=r1,
            r3=_one,
            log_r1=log_r1,
            log_r3=_zero,
            dlog_r1=dlog_r1,
            dlog_r3=_zero,
            ell1=ell1,
            ell3=_one,
            dlog_ell1=dlog_ell1,
            dlog_ell3=_zero,
            tag="chain",
            params={"xi": pts, "split": int(split)},
        )

    @classmethod
    def custom(
        cls,
        coupling: Coupling,
        r1: Callable,
        r3: Callable,
        log_r1: Callable | None = None,
        log_r3: Callable | None = None,
        dlog_r1: Callable | None = None,
        dlog_r3: Callable | None = None,
        **kw,
    ) -> "ModelFunctions":
        h = 1e-6
        log_r1 = log_r1 or (lambda w: cmath.log(r1(w)))
        log_r3 = log_r3 or (lambda w: cmath.log(r3(w)))
        dlog_r1 = dlog_r1 or (lambda w: (log_r1(w + h) - log_r1(w - h)) / (2 * h))
        dlog_r3 = dlog_r3 or (lambda w: (log_r3(w + h) - log_r3(w - h)) / (2 * h))
        return cls(
            coupling=coupling,
            r1=r1,
            r3=r3,
            log_r1=log_r1,
            log_r3=log_r3,
            dlog_r1=dlog_r1,
            dlog_r3=dlog_r3,
            tag="custom",
            **kw,
        )

    def descriptor(self) -> dict:
        d = {"tag": self.tag}
        for k, v in self.params.items():
            if isinstance(v, tuple):
                d[k] = [[z.real, z.imag] for z in v]
            else:
                d[k] = v
        d["c"] = [self.coupling.c.real, self.coupling.c.imag]
        return d


@dataclass(frozen=True)
class TwistVector:
    k1: complex = 1.0
    k2: complex = 1.0
    k3: complex = 1.0

    def __post_init__(self):
        if self.k1 == 0 or self.k2 == 0 or self.k3 == 0:
            raise ValueError("twist components must be nonzero")

    @classmethod
    def identity(cls) -> "TwistVector":
        return cls(1.0, 1.0, 1.0)

    def is_identity(self) -> bool:
        return self.k1 == 1.0 and self.k2 == 1.0 and self.k3 == 1.0


@dataclass(frozen=True)
class BetheRoots:
    """A solved (twisted) Bethe configuration."""

    ubar: ParameterSet
    vbar: ParameterSet
    twist: TwistVector
    residual_norm: float
    model_descriptor: dict
    meta: dict = field(default_factory=dict)

    @property
    def a(self) -> int:
        return len(self.ubar)

    @property
    def b(self) -> int:
        return len(self.vbar)

    def sorted_copy(self) -> "BetheRoots":
        """Roots ordered lexicographically by (re, im); used for persistence."""
        key = lambda z: (z.real, z.imag)
        return replace(
            self,
            ubar=ParameterSet(tuple(sorted(self.ubar.points, key=key)), "uC", degenerate=True),
            vbar=ParameterSet(tuple(sorted(self.vbar.points, key=key)), "vC", degenerate=True),
        )


# ---------------------------------------------------------------------------
# Residuals and Jacobian
# ---------------------------------------------------------------------------


def _wrap(z: complex) -> complex:
    """Reduce the imaginary part to (-pi, pi] (residuals live modulo 2*pi*i)."""
    im = z.imag
    n = math.floor((im + math.pi) / TWO_PI)
    return complex(z.real, im - TWO_PI * n)


def _log_f(x: complex, y: complex, c: complex) -> complex:
    d = x - y
    return cmath.log((d + c) / d)


def _check_collisions(u: np.ndarray, v: np.ndarray, c: complex, trajectory=None):
    pts = list(u) + list(v)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) < COLLISION_TOL * max(1.0, abs(pts[i]), abs(pts[j])):
                raise CollisionError(
                    f"roots {pts[i]} and {pts[j]} collided within {COLLISION_TOL}",
                    trajectory,
                )
    for ui in u:
        for vj in v:
            if abs(vj - ui + c) < COLLISION_TOL * max(1.0, abs(ui), abs(vj)):
                raise CollisionError(
                    f"f-pole: v={vj} approaches u-c={ui - c}", trajectory
                )


def _raw_residuals(
    u: np.ndarray, v: np.ndarray, model: ModelFunctions, twist: TwistVector
) -> np.ndarray:
    c = model.coupling.c
    a, b = len(u), len(v)
    res = np.zeros(a + b, dtype=complex)
    lk1 = cmath.log(twist.k1) - cmath.log(twist.k2)
    lk3 = cmath.log(twist.k3) - cmath.log(twist.k2)
    for k in range(a):
        s = model.log_r1(u[k]) + lk1
        for j in range(a):
            if j != k:
                s -= _log_f(u[k], u[j], c) - _log_f(u[j], u[k], c)
        for l in range(b):
            s -= _log_f(v[l], u[k], c)
        res[k] = _wrap(s)
    for l in range(b):
        s = model.log_r3(v[l]) + lk3
        for j in range(b):
            if j != l:
                s -= _log_f(v[j], v[l], c) - _log_f(v[l], v[j], c)
        for m in range(a):
            s -= _log_f(v[l], u[m], c)
        res[a + l] = _wrap(s)
    return res


def bethe_residuals(
    roots: BetheRoots, model: ModelFunctions, twist: TwistVector | None = None
) -> np.ndarray:
    """Per-root logarithmic defects of the (twisted) Bethe system."""
    twist = twist or roots.twist
    u = np.asarray(roots.ubar.points, dtype=complex)
    v = np.asarray(roots.vbar.points, dtype=complex)
    _check_collisions(u, v, model.coupling.c)
    return _raw_residuals(u, v, model, twist)


def _dlog_f_x(x: complex, y: complex, c: complex) -> complex:
    """d/dx log f(x, y)."""
    d = x - y
    return 1.0 / (d + c) - 1.0 / d


def _jacobian(u: np.ndarray, v: np.ndarray, model: ModelFunctions) -> np.ndarray:
    c = model.coupling.c
    a, b = len(u), len(v)
    n = a + b
    J = np.zeros((n, n), dtype=complex)
    for k in range(a):
        diag = model.dlog_r1(u[k])
        for j in range(a):
            if j == k:
                continue
            # d/du_k of -[log f(u_k,u_j) - log f(u_j,u_k)]
            diag -= _dlog_f_x(u[k], u[j], c) + _dlog_f_x(u[j], u[k], c)
            # d/du_j of the same pair
            J[k, j] = _dlog_f_x(u[k], u[j], c) + _dlog_f_x(u[j], u[k], c)
        for l in range(b):
            diag += _dlog_f_x(v[l], u[k], c)  # -d/du_k log f(v_l, u_k)
            J[k, a + l] = -_dlog_f_x(v[l], u[k], c)
        J[k, k] = diag
    for l in range(b):
        diag = model.dlog_r3(v[l])
        for j in range(b):
            if j == l:
                continue
            diag += _dlog_f_x(v[j], v[l], c) + _dlog_f_x(v[l], v[j], c)
            J[a + l, a + j] = -(_dlog_f_x(v[j], v[l], c) + _dlog_f_x(v[l], v[j], c))
        for m in range(a):
            diag -= _dlog_f_x(v[l], u[m], c)
            J[a + l, m] = _dlog_f_x(v[l], u[m], c)
        J[a + l, a + l] = diag
    return J


# ---------------------------------------------------------------------------
# Newton solve and continuation
# ---------------------------------------------------------------------------


def _newton(
    u0: np.ndarray,
    v0: np.ndarray,
    model: ModelFunctions,
    twist: TwistVector,
    max_iter: int = 80,
    tol: float = RESIDUAL_TOL,
    bound: float | None = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    u, v = u0.astype(complex).copy(), v0.astype(complex).copy()
    a = len(u)
    if bound is None:
        scale = max([abs(z) for z in list(u) + list(v)] + [1.0])
        bound = 50.0 * (scale + 1.0)
    trajectory = [(u.copy(), v.copy())]
    _check_collisions(u, v, model.coupling.c, trajectory)
    res = _raw_residuals(u, v, model, twist)
    norm = float(np.max(np.abs(res))) if res.size else 0.0
    for _ in range(max_iter):
        if norm < tol:
            return u, v, norm
        J = _jacobian(u, v, model)
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(str(exc)) from exc
        # Cap the step so Newton cannot jump into the escape basin at infinity.
        smax = float(np.max(np.abs(step)))
        if smax > 0.5 * bound:
            step *= 0.5 * bound / smax
        # Damped update: halve until the residual stops growing.
        lam = 1.0
        for _ in range(30):
            uu = u + lam * step[:a]
            vv = v + lam * step[a:]
            try:
                _check_collisions(uu, vv, model.coupling.c, trajectory)
                new = _raw_residuals(uu, vv, model, twist)
            except (PoleError, ZeroDivisionError):
                lam *= 0.5
                continue
            new_norm = float(np.max(np.abs(new))) if new.size else 0.0
            if new_norm < norm or lam < 1e-6:
                u, v, res, norm = uu, vv, new, new_norm
                trajectory.append((u.copy(), v.copy()))
                break
            lam *= 0.5
        else:
            break
        if any(abs(z) > bound for z in list(u) + list(v)):
            raise SolverError("root escaped toward infinity during iteration")
    if norm < tol:
        return u, v, norm
    raise SolverError(f"Newton did not converge: residual {norm:.3e} > {tol:.1e}")


@dataclass(frozen=True)
class ContinuationPlan:
    """Coupling-homotopy seed recipe for the two-component gas.

    v-roots start on the free ladder 2*pi*n/L indexed by ``v_numbers``;
    u-roots start from small random spread around the v-centroid and the
    coupling walks a geometric ladder from ``start_varkappa`` to the target.
    """

    v_numbers: tuple[int, ...]
    start_varkappa: float = 1e-3
    steps: int = 12
    rng_seed: int = 7


def solve_bethe(
    model: ModelFunctions,
    a: int,
    b: int,
    twist: TwistVector | None = None,
    seed: tuple[Sequence[complex], Sequence[complex]] | None = None,
    plan: ContinuationPlan | None = None,
) -> BetheRoots:
    """Solve the (twisted) Bethe system for ``a`` u-roots and ``b`` v-roots.

    Either an explicit ``seed`` (initial root arrays) or a continuation
    ``plan`` (two-component gas only) must resolve the starting point.
    Deterministic for a fixed seed/plan.
    """
    twist = twist or TwistVector.identity()
    if model.tag == "tcbg" and a > b:
        raise ValueError("two-component gas requires a <= b")
    if seed is not None:
        u0 = np.asarray(list(seed[0]), dtype=complex)
        v0 = np.asarray(list(seed[1]), dtype=complex)
        if len(u0) != a or len(v0) != b:
            raise ValueError("seed sizes do not match (a, b)")
        u, v, norm = _newton(u0, v0, model, twist)
        return _package(u, v, model, twist, norm, {"method": "newton", "seed": "explicit"})

    if plan is None or model.tag != "tcbg":
        raise SolverError("no seed provided and no continuation plan applicable")
    if len(plan.v_numbers) != b:
        raise ValueError("continuation plan must carry one quantum number per v-root")

    L = model.params["L"]
    target = model.params["varkappa"]
    x = model.params.get("x", 0.0)
    vk = min(plan.start_varkappa, target)
    v0 = np.array([TWO_PI * n / L for n in plan.v_numbers], dtype=complex)
    start = ModelFunctions.tcbg(L=L, varkappa=float(vk), x=x)
    last_err: Exception | None = None
    for u0 in _u_seed_candidates(a, v0, vk):
        try:
            u, v, norm = _newton(u0, v0, start, twist)
            break
        except SolverError as exc:
            last_err = exc
    else:
        raise SolverError(f"no seed converged at start coupling: {last_err}")
    ladder = np.geomspace(vk, target, plan.steps) if target > vk else [target]
    for kk in ladder:
        m = ModelFunctions.tcbg(L=L, varkappa=float(kk), x=x)
        u, v, norm = _newton(u, v, m, twist)
    return _package(
        u, v, model, twist, norm,
        {"method": "continuation", "v_numbers": list(plan.v_numbers), "rng_seed": plan.rng_seed},
    )


def _u_seed_candidates(a: int, v0: np.ndarray, vk: float):
    """Deterministic u-seed ladder for the small-coupling start.

    At weak coupling the u-roots settle at electrostatic equilibria between
    the free momenta, shifted into the lower half plane by the coupling.  Seeds
    walk window means of the sorted momenta plus a small deterministic jitter
    ladder to dodge bad Newton basins.
    """
    if a == 0:
        yield np.zeros(0, dtype=complex)
        return
    vs = np.sort(v0.real) if len(v0) else np.zeros(1)
    span = max(1.0, float(vs.max() - vs.min()))
    groups = np.array_split(vs, a)
    base = np.array([gr.mean() for gr in groups], dtype=complex) - 0.5j * vk
    jitters = [0.0, 0.21j, -0.17j, 0.13, -0.29j * 0.5, 0.11 + 0.07j]
    for t, jit in enumerate(jitters):
        yield base + jit * span + t * 0.03 * span * np.arange(a)


def _package(u, v, model, twist, norm, meta) -> BetheRoots:
    key = lambda z: (z.real, z.imag)
    roots = BetheRoots(
        ubar=ParameterSet(tuple(sorted(u, key=key)), "uC", degenerate=True),
        vbar=ParameterSet(tuple(sorted(v, key=key)), "vC", degenerate=True),
        twist=twist,
        residual_norm=norm,
        model_descriptor=model.descriptor(),
        meta=meta,
    )
    return roots


def find_chain_solutions(
    model: ModelFunctions,
    a: int,
    b: int,
    attempts: int = 120,
    rng_seed: int = 11,
    match_tol: float = 1e-7,
) -> list[BetheRoots]:
    """Regular Bethe solutions of a lattice model found by multi-seed search.

    For (a, b) = (1, 0) the system is a single polynomial equation and the
    returned list is complete; otherwise random-seed Newton plus multiset
    deduplication finds the regular solutions that exist at the chain's scale.
    Deterministic for a fixed ``rng_seed``.
    """
    if model.tag != "chain":
        raise ValueError("find_chain_solutions expects a lattice model")
    xi = np.array([complex(*p) if isinstance(p, (list, tuple)) else complex(p)
                   for p in model.params["xi"]])
    c = model.coupling.c
    twist = TwistVector.identity()
    found: list[BetheRoots] = []

    def push(u, v, norm):
        cand_u = tuple(sorted(u, key=lambda z: (z.real, z.imag)))
        cand_v = tuple(sorted(v, key=lambda z: (z.real, z.imag)))
        for r in found:
            if len(r.ubar) == len(cand_u) and all(
                abs(p - q) < match_tol for p, q in zip(r.ubar.points, cand_u)
            ) and all(abs(p - q) < match_tol for p, q in zip(r.vbar.points, cand_v)):
                return
        found.append(_package(np.array(u), np.array(v), model, twist, norm,
                              {"method": "search", "rng_seed": rng_seed}))

    if (a, b) == (0, 0):
        push(np.zeros(0, complex), np.zeros(0, complex), 0.0)
        return found

    if (a, b) == (1, 0):
        # prod f(u, xi_i) = 1  <=>  prod(u - xi + c) - prod(u - xi) = 0
        poly = np.poly(xi - c) - np.poly(xi)
        poly = np.trim_zeros(poly, "f")
        for root in np.roots(poly):
            try:
                u, v, norm = _newton(np.array([root]), np.zeros(0, complex), model, twist)
                push(u, v, norm)
            except SolverError:
                continue
        return found

    rng = np.random.default_rng(rng_seed)
    scale = max(1.0, float(np.max(np.abs(xi))))
    for _ in range(attempts):
        u0 = (rng.standard_normal(a) + 1j * rng.standard_normal(a)) * scale
        v0 = (rng.standard_normal(b) + 1j * rng.standard_normal(b)) * scale
        try:
            u, v, norm = _newton(u0, v0, model, twist, bound=60.0 * (scale + 1.0))
        except SolverError:
            continue
        push(u, v, norm)
    return found


# ---------------------------------------------------------------------------
# Diagnostics and derivatives
# ---------------------------------------------------------------------------


def check_global_constraints(roots: BetheRoots, model: ModelFunctions) -> dict:
    """Deviations of the product constraints r1(ubar), r3(vbar), f(vbar, ubar) from 1."""
    c = model.coupling
    r1_prod = np.prod([model.r1(uk) for uk in roots.ubar]) if roots.a else 1.0
    r3_prod = np.prod([model.r3(vl) for vl in roots.vbar]) if roots.b else 1.0
    f_prod = product_f(roots.vbar, roots.ubar, c)
    return {
        "r1_ubar_dev": abs(r1_prod - 1.0),
        "r3_vbar_dev": abs(r3_prod - 1.0),
        "f_vu_dev": abs(f_prod - 1.0),
    }


_DKAPPA = {
    # d residual / d kappa_j at the identity twist, (u-rows, v-rows)
    1: (1.0, 0.0),
    2: (-1.0, -1.0),
    3: (0.0, 1.0),
}


def twist_derivatives(
    roots: BetheRoots, model: ModelFunctions, direction: int
) -> tuple[np.ndarray, np.ndarray]:
    """d(roots)/d kappa_j at the identity twist via implicit differentiation."""
    if direction not in (1, 2, 3):
        raise ValueError("direction must be 1, 2 or 3")
    u = np.asarray(roots.ubar.points, dtype=complex)
    v = np.asarray(roots.vbar.points, dtype=complex)
    a, b = len(u), len(v)
    if a + b == 0:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex)
    J = _jacobian(u, v, model)
    du_row, dv_row = _DKAPPA[direction]
    rhs = -np.concatenate([np.full(a, du_row, dtype=complex), np.full(b, dv_row, dtype=complex)])
    try:
        sol = np.linalg.solve(J, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError(str(exc)) from exc
    return sol[:a], sol[a:]


def verify_deform(roots: BetheRoots, model: ModelFunctions, kappa: complex) -> float:
    """Residual norm of the jointly-twisted system at the shifted roots.

    For the two-component gas with k1 = k2 = kappa, k3 = 1, shifting every
    root by -(i/L) log kappa solves the twisted system exactly.
    """
    if model.tag != "tcbg":
        raise ValueError("the closed-form twist shift applies to the gas model only")
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    if kappa.real < 0 and abs(kappa.imag) < 1e-14:
        import warnings

        warnings.warn("log(kappa) lies on the principal branch cut", BranchCutWarning)
    L = model.params["L"]
    shift = -1j / L * cmath.log(kappa)
    u = np.asarray(roots.ubar.points, dtype=complex) + shift
    v = np.asarray(roots.vbar.points, dtype=complex) + shift
    twist = TwistVector(kappa, kappa, 1.0)
    res = _raw_residuals(u, v, model, twist)
    return float(np.max(np.abs(res))) if res.size else 0.0


def excitation_momentum(vB: ParameterSet, vC: ParameterSet) -> complex:
    """Sum of ket v-roots minus sum of bra v-roots."""
    return sum(vB.points, 0.0 + 0.0j) - sum(vC.points, 0.0 + 0.0j)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def roots_to_record(roots: BetheRoots) -> dict:
    r = roots.sorted_copy()
    return {
        "model": r.model_descriptor,
        "a": r.a,
        "b": r.b,
        "twist": [[r.twist.k1.real, r.twist.k1.imag],
                  [r.twist.k2.real, r.twist.k2.imag],
                  [r.twist.k3.real, r.twist.k3.imag]],
        "u_roots": [[z.real, z.imag] for z in r.ubar],
        "v_roots": [[z.real, z.imag] for z in r.vbar],
        "residual_norm": r.residual_norm,
        "solver": r.meta,
    }


def roots_from_record(rec: dict) -> BetheRoots:
    tw = TwistVector(*(complex(re, im) for re, im in rec["twist"]))
    return BetheRoots(
        ubar=ParameterSet(tuple(complex(re, im) for re, im in rec["u_roots"]), "uC", degenerate=True),
        vbar=ParameterSet(tuple(complex(re, im) for re, im in rec["v_roots"]), "vC", degenerate=True),
        twist=tw,
        residual_norm=rec["residual_norm"],
        model_descriptor=rec["model"],
        meta=rec.get("solver", {}),
    )
