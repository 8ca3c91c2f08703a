"""Sum-over-partitions formulas: scalar products, cancellation identities,
zero-mode sums of the composite model.

Every sum here walks bitmask partition streams from :mod:`gl3aba.ratcore`,
collects all terms, orders them by descending magnitude and accumulates with
compensated (Kahan) summation: the cancellation identities are exact and
naive accumulation wastes most of the double-precision budget.

Large auxiliary arguments are never taken to symbolic infinity; callers use
the geometric-ladder + extrapolation helpers (`lemma2_limit`), and the w/c
factor multiplies after summation.

Arithmetic is duck-typed: passing mpmath numbers through the same code paths
gives high-precision evaluation, which `norm_squared_sum` uses to reach the
coinciding-argument limit of the scalar product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath as mp
import numpy as np

from .ratcore import (
    Coupling,
    ParameterSet,
    enumerate_bipartitions,
    enumerate_fourpartitions,
)
from .bethe_solver import ModelFunctions
from .highest_coefficient import HighestCoefficientProvider, ProviderError


def _pts(s) -> tuple:
    if isinstance(s, ParameterSet):
        return s.points
    return tuple(s)


def _f(u, v, c):
    d = u - v
    return (d + c) / d


def _prod_f(A, B, c):
    out = 1
    for a in A:
        for b in B:
            out = out * _f(a, b, c)
    return out


def kahan_sum(terms: Sequence):
    """Compensated sum of pre-collected terms, largest magnitude first."""
    ordered = sorted(terms, key=lambda z: -abs(z))
    total = 0
    comp = 0
    for z in ordered:
        y = z - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


# ---------------------------------------------------------------------------
# The W function and the cancellation identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WContext:
    """Eight subset slots of the W function plus coupling and provider."""

    uC_I: tuple
    uB_I: tuple
    vC_I: tuple
    vB_I: tuple
    uC_II: tuple
    uB_II: tuple
    vC_II: tuple
    vB_II: tuple
    coupling: object
    provider: HighestCoefficientProvider

    def __post_init__(self):
        if len(self.uC_I) != len(self.uB_I) or len(self.vC_I) != len(self.vB_I):
            raise ProviderError("paired subsets must have equal cardinalities")
        if len(self.uC_II) != len(self.uB_II) or len(self.vC_II) != len(self.vB_II):
            raise ProviderError("paired subsets must have equal cardinalities")


def W_eval(ctx: WContext):
    """The six f-factors and two highest coefficients of the W function."""
    c = ctx.coupling.c if isinstance(ctx.coupling, Coupling) else ctx.coupling
    val = (
        _prod_f(ctx.uC_II, ctx.uC_I, c)
        * _prod_f(ctx.uB_I, ctx.uB_II, c)
        * _prod_f(ctx.vC_I, ctx.vC_II, c)
        * _prod_f(ctx.vB_II, ctx.vB_I, c)
        * _prod_f(ctx.vC_II, ctx.uC_II, c)
        * _prod_f(ctx.vB_I, ctx.uB_I, c)
    )
    val = val * ctx.provider.evaluate(ctx.uC_II, ctx.uB_II, ctx.vC_I, ctx.vB_I, c)
    val = val * ctx.provider.evaluate(ctx.uB_I, ctx.uC_I, ctx.vB_II, ctx.vC_II, c)
    return val


def _w_terms(uC, uB, vC, vB, provider, c, xi_pin=None):
    """Yield (partition descriptor, W value) over all paired partitions.

    ``xi_pin`` restricts the v-type bra set partitions: ("I", idx) keeps
    element ``idx`` of vC in subset I, ("II", idx) in subset II.
    """
    uC, uB, vC, vB = _pts(uC), _pts(uB), _pts(vC), _pts(vB)
    a, b = len(uC), len(vC)
    if len(uB) != a or len(vB) != b:
        raise ProviderError("u-type and v-type groups must pair by cardinality")
    for kI in range(a + 1):
        uC_parts = list(enumerate_bipartitions(a, kI))
        uB_parts = uC_parts
        for lI in range(b + 1):
            vC_parts = list(enumerate_bipartitions(b, lI))
            for pc in uC_parts:
                uC_I = tuple(uC[i] for i in pc.indices_I)
                uC_II = tuple(uC[i] for i in pc.indices_II)
                for pb in uB_parts:
                    uB_I = tuple(uB[i] for i in pb.indices_I)
                    uB_II = tuple(uB[i] for i in pb.indices_II)
                    for qc in vC_parts:
                        if xi_pin is not None:
                            side, idx = xi_pin
                            in_I = bool(qc.mask >> idx & 1)
                            if (side == "I") != in_I:
                                continue
                        vC_I = tuple(vC[i] for i in qc.indices_I)
                        vC_II = tuple(vC[i] for i in qc.indices_II)
                        for qb in list(enumerate_bipartitions(b, lI)):
                            vB_I = tuple(vB[i] for i in qb.indices_I)
                            vB_II = tuple(vB[i] for i in qb.indices_II)
                            ctx = WContext(
                                uC_I, uB_I, vC_I, vB_I,
                                uC_II, uB_II, vC_II, vB_II,
                                c, provider,
                            )
                            yield W_eval(ctx)


def lemma1_sum(uC, uB, vC, vB, provider: HighestCoefficientProvider, c):
    """Unrestricted sum of W over all paired partitions.

    For a correct provider this cancels to delta_{0a} delta_{0b}.
    """
    return kahan_sum(list(_w_terms(uC, uB, vC, vB, provider, c)))


def lemma1_report(uC, uB, vC, vB, provider, c) -> dict:
    terms = list(_w_terms(uC, uB, vC, vB, provider, c))
    total = kahan_sum(terms)
    biggest = max((abs(t) for t in terms), default=0.0)
    return {"sum": total, "max_term": biggest, "terms": len(terms)}


def validate_provider(
    provider: HighestCoefficientProvider,
    c,
    draws: int = 20,
    rng_seed: int = 101,
    rel_tol: float = 1e-9,
    grid: Sequence[tuple[int, int]] | None = None,
) -> dict:
    """Cancellation harness: the provider passes iff every unrestricted sum
    over random generic draws stays below rel_tol times its largest term."""
    rng = np.random.default_rng(rng_seed)
    amax, bmax = provider.capacity
    if grid is None:
        grid = [(a, b) for a in range(amax + 1) for b in range(bmax + 1)]
    worst = {"rel": 0.0, "sector": None}
    results = []
    for (a, b) in grid:
        if a > amax or b > bmax:
            raise ProviderError(f"grid sector ({a},{b}) exceeds capacity")
        for _ in range(draws):
            def draw(n):
                return tuple(rng.standard_normal(n) * 2 + 1j * rng.standard_normal(n))
            rep = lemma1_report(draw(a), draw(a), draw(b), draw(b), provider, c)
            expected = 1.0 if (a, b) == (0, 0) else 0.0
            rel = abs(rep["sum"] - expected) / max(rep["max_term"], 1.0)
            results.append({"sector": (a, b), "relative": rel})
            if rel > worst["rel"]:
                worst = {"rel": rel, "sector": (a, b)}
    passed = worst["rel"] < rel_tol
    return {
        "provider": provider.name,
        "capacity": provider.capacity,
        "draws": draws,
        "worst_relative": worst["rel"],
        "worst_sector": worst["sector"],
        "pass": bool(passed),
        "tolerance": rel_tol,
    }


# ---------------------------------------------------------------------------
# Scalar product
# ---------------------------------------------------------------------------


def scalar_product_sum(uC, uB, vC, vB, model: ModelFunctions, provider):
    """Sum formula for the scalar product of two Bethe configurations."""
    uC, uB, vC, vB = _pts(uC), _pts(uB), _pts(vC), _pts(vB)
    a, b = len(uC), len(vC)
    if len(uB) != a or len(vB) != b:
        raise ProviderError("bra/ket sectors must match")
    c = model.coupling.c
    r1, r3 = model.r1, model.r3
    denom = _prod_f(vC, uC, c) * _prod_f(vB, uB, c)
    terms = []
    for kI in range(a + 1):
        for pc in enumerate_bipartitions(a, kI):
            uC_I = tuple(uC[i] for i in pc.indices_I)
            uC_II = tuple(uC[i] for i in pc.indices_II)
            for pb in enumerate_bipartitions(a, kI):
                uB_I = tuple(uB[i] for i in pb.indices_I)
                uB_II = tuple(uB[i] for i in pb.indices_II)
                for lI in range(b + 1):
                    for qc in enumerate_bipartitions(b, lI):
                        vC_I = tuple(vC[i] for i in qc.indices_I)
                        vC_II = tuple(vC[i] for i in qc.indices_II)
                        for qb in enumerate_bipartitions(b, lI):
                            vB_I = tuple(vB[i] for i in qb.indices_I)
                            vB_II = tuple(vB[i] for i in qb.indices_II)
                            term = 1
                            for z in uB_I:
                                term = term * r1(z)
                            for z in uC_II:
                                term = term * r1(z)
                            for z in vC_II:
                                term = term * r3(z)
                            for z in vB_I:
                                term = term * r3(z)
                            term = (
                                term
                                * _prod_f(uC_I, uC_II, c)
                                * _prod_f(uB_II, uB_I, c)
                                * _prod_f(vC_II, vC_I, c)
                                * _prod_f(vB_I, vB_II, c)
                                * _prod_f(vC_I, uC_I, c)
                                * _prod_f(vB_II, uB_II, c)
                                / denom
                            )
                            term = term * provider.evaluate(uC_II, uB_II, vC_I, vB_I, c)
                            term = term * provider.evaluate(uB_I, uC_I, vB_II, vC_II, c)
                            terms.append(term)
    return kahan_sum(terms)


def norm_squared_sum(ubar, vbar, model: ModelFunctions, provider, dps: int = 80):
    """Coinciding-argument limit of the scalar product (the squared norm).

    The sum formula diverges off shell when bra and ket arguments coincide,
    so the roots are first polished to working precision in mpmath (the
    residual controls the pole leakage).  Individual terms grow like
    eps^-4 through the paired highest coefficients, so the split eps and
    the working precision are chosen together: eps = 1e-11 at 80 digits
    leaves ~35 guard digits after the cancellation while keeping the O(eps)
    truncation far below every tolerance in the acceptance suite.
    """
    if model.tag == "tcbg":
        raise ValueError("high-precision norms are implemented for f-product models")
    u = _pts(ubar)
    v = _pts(vbar)
    with mp.workdps(dps):
        xi = [mp.mpc(complex(*p)) if isinstance(p, (list, tuple)) else mp.mpc(p)
              for p in model.params["xi"]]
        c = mp.mpc(model.coupling.c)
        uC, vC = _polish_roots_mp([mp.mpc(z) for z in u], [mp.mpc(z) for z in v], xi, c)
        eps = mp.mpf(10) ** (-11)
        uB = tuple(z + eps * (k + 1) * (1 + mp.mpf(1) / (3 + k)) for k, z in enumerate(uC))
        vB = tuple(z + eps * (k + 2) * (1 + mp.mpf(2) / (5 + k)) for k, z in enumerate(vC))

        class _M:
            coupling = model.coupling

            @staticmethod
            def r1(w):
                out = mp.mpc(1)
                for p in xi:
                    out *= (w - p + c) / (w - p)
                return out

            @staticmethod
            def r3(_w):
                return mp.mpc(1)

        val = scalar_product_sum(tuple(uC), uB, tuple(vC), vB, _M(), provider)
        return complex(val)


def _polish_roots_mp(u, v, xi, c, steps: int = 6):
    """Newton-polish chain Bethe roots in mpmath arithmetic."""
    a, b = len(u), len(v)
    n = a + b
    if n == 0:
        return tuple(), tuple()

    def F(z):
        uu, vv = z[:a], z[a:]
        out = []
        for k in range(a):
            val = mp.mpc(1)
            for p in xi:
                val *= (uu[k] - p + c) / (uu[k] - p)
            for j in range(a):
                if j != k:
                    val *= ((uu[j] - uu[k] + c) * (uu[k] - uu[j])) / (
                        (uu[j] - uu[k]) * (uu[k] - uu[j] + c)
                    )
            for l in range(b):
                val /= (vv[l] - uu[k] + c) / (vv[l] - uu[k])
            out.append(val - 1)
        for l in range(b):
            val = mp.mpc(1)
            for j in range(b):
                if j != l:
                    val *= ((vv[l] - vv[j] + c) * (vv[j] - vv[l])) / (
                        (vv[l] - vv[j]) * (vv[j] - vv[l] + c)
                    )
            for k in range(a):
                val /= (vv[l] - uu[k] + c) / (vv[l] - uu[k])
            out.append(val - 1)
        return out

    z = list(u) + list(v)
    h = mp.mpf(10) ** (-20)
    for _ in range(steps):
        f0 = F(z)
        if max(abs(x) for x in f0) < mp.mpf(10) ** (-45):
            break
        J = mp.matrix(n, n)
        for col in range(n):
            zp = z[:]
            zm = z[:]
            zp[col] = zp[col] + h
            zm[col] = zm[col] - h
            fp, fm = F(zp), F(zm)
            for row in range(n):
                J[row, col] = (fp[row] - fm[row]) / (2 * h)
        rhs = mp.matrix([[-x] for x in f0])
        try:
            step = mp.lu_solve(J, rhs)
        except Exception:
            break
        for i in range(n):
            z[i] = z[i] + step[i]
    return tuple(z[:a]), tuple(z[a:])


# ---------------------------------------------------------------------------
# Restricted sums (zero-mode route) and ladder limits
# ---------------------------------------------------------------------------


def lemma2_sum(uC, uB, vC, vB, w, provider, c, restriction: str = "I"):
    """(w/c) times the pinned-partition sum with xi = {vC, w}.

    ``restriction`` = "I" keeps the auxiliary argument w in subset I,
    "II" in subset II.  Cardinalities: #vC = #vB - 1.
    """
    if restriction not in ("I", "II"):
        raise ValueError("restriction must be 'I' or 'II'")
    uC, uB, vC, vB = _pts(uC), _pts(uB), _pts(vC), _pts(vB)
    if len(vC) + 1 != len(vB):
        raise ProviderError("the bra v-set plus the auxiliary argument must pair with the ket")
    cval = c.c if isinstance(c, Coupling) else c
    xi = vC + (w,)
    pin = (restriction, len(vC))
    terms = list(_w_terms(uC, uB, xi, vB, provider, cval, xi_pin=pin))
    return (w / cval) * kahan_sum(terms)


def lemma2_vlimit(uC, uB, vC, vB, provider, c):
    """Exact infinite-argument limit of the pinned sum: lim (w/c) * sum_I W.

    Every surviving W term carries the auxiliary argument inside the first
    highest coefficient only; its limit is evaluated through the provider's
    zero-mode reduction, and all f factors involving the auxiliary argument
    tend to one.  Used where a geometric ladder would have to dominate an
    already-large inserted argument (nested limits overflow double
    precision); elsewhere the ladder route is preferred.
    """
    uC, uB, vC, vB = _pts(uC), _pts(uB), _pts(vC), _pts(vB)
    if len(vC) + 1 != len(vB):
        raise ProviderError("the bra v-set plus the auxiliary argument must pair with the ket")
    cval = c.c if isinstance(c, Coupling) else c
    a, b = len(uC), len(vB)
    terms = []
    for kI in range(a + 1):
        for pc in enumerate_bipartitions(a, kI):
            uC_I = tuple(uC[i] for i in pc.indices_I)
            uC_II = tuple(uC[i] for i in pc.indices_II)
            for pb in enumerate_bipartitions(a, kI):
                uB_I = tuple(uB[i] for i in pb.indices_I)
                uB_II = tuple(uB[i] for i in pb.indices_II)
                for lI in range(1, b + 1):
                    # xi_I = {w} + (lI-1)-subset of vC; xi_II = complement in vC
                    for qc in enumerate_bipartitions(len(vC), lI - 1):
                        vC_I = tuple(vC[i] for i in qc.indices_I)
                        vC_II = tuple(vC[i] for i in qc.indices_II)
                        for qb in enumerate_bipartitions(b, lI):
                            vB_I = tuple(vB[i] for i in qb.indices_I)
                            vB_II = tuple(vB[i] for i in qb.indices_II)
                            # f factors of W with all w-bearing products -> 1
                            val = (
                                _prod_f(uC_II, uC_I, cval)
                                * _prod_f(uB_I, uB_II, cval)
                                * _prod_f(vC_I, vC_II, cval)
                                * _prod_f(vB_II, vB_I, cval)
                                * _prod_f(vC_II, uC_II, cval)
                                * _prod_f(vB_I, uB_I, cval)
                            )
                            val = val * provider.evaluate_vlimit(
                                uC_II, uB_II, vC_I, vB_I, cval
                            )
                            val = val * provider.evaluate(
                                uB_I, uC_I, vB_II, vC_II, cval
                            )
                            terms.append(val)
    return kahan_sum(terms)


def lemma2_limit(
    uC, uB, vC, vB, c, provider,
    ladder: tuple[float, ...] = (1e3, 1e4, 1e5),
    restriction: str = "I",
    direction: complex = 1j,
):
    """Geometric-ladder extrapolation of the pinned sum as |w| -> infinity."""
    cval = c.c if isinstance(c, Coupling) else c
    pts = list(_pts(uC)) + list(_pts(uB)) + list(_pts(vC)) + list(_pts(vB))
    scale = max([abs(z) for z in pts] + [abs(cval), 1.0])
    ts = np.asarray(ladder, dtype=float)
    vals = []
    for t in ts:
        w = direction * t * scale
        vals.append(lemma2_sum(uC, uB, vC, vB, w, provider, cval, restriction))
    n = len(ts)
    M = np.vander(1.0 / ts, n, increasing=True)
    coeffs = np.linalg.solve(M, np.asarray(vals, dtype=complex))
    return complex(coeffs[0])


# ---------------------------------------------------------------------------
# Composite-model four-fold sum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompositeSumResult:
    direct: complex
    omega1: complex
    omega2: complex
    ell_ratio: complex
    factored: complex
    collapse_defect: float
    term_count: int


def _split4(points, part):
    return tuple(
        tuple(points[i] for i in part.indices(n)) for n in range(4)
    )


def composite_zero_mode_sum(
    uC, uB, vC, vB, w, model: ModelFunctions, provider
) -> CompositeSumResult:
    """Four-fold partition sum of the composite zero-mode route.

    Evaluates the direct sum (prefactor products times four highest
    coefficients, restricted to partitions keeping w in the first or third
    xi-subset), the two pinned sums Omega_1/Omega_2, and checks the exact
    collapse   direct = Omega_1 * ell-ratio + Omega_2.
    """
    uC, uB, vC, vB = _pts(uC), _pts(uB), _pts(vC), _pts(vB)
    if len(uC) != len(uB) or len(vC) + 1 != len(vB):
        raise ProviderError("sector mismatch for the composite sum")
    c = model.coupling.c
    ell1, ell3 = model.ell1, model.ell3
    xi = vC + (w,)
    a, b = len(uC), len(vB)
    widx = len(vC)

    terms = []
    count = 0
    for sa in _compositions4(a):
        uC_parts = list(enumerate_fourpartitions(a, sa))
        for sb in _compositions4(b):
            xi_parts = list(enumerate_fourpartitions(b, sb))
            vB_parts = xi_parts
            for puC in uC_parts:
                uC4 = _split4(uC, puC)
                for puB in uC_parts:
                    uB4 = _split4(uB, puB)
                    for pxi in xi_parts:
                        which = pxi.part_of(widx)
                        if which not in (0, 2):  # w must sit in xi_1 or xi_3
                            continue
                        x4 = _split4(xi, pxi)
                        for pvB in vB_parts:
                            v4 = _split4(vB, pvB)
                            count += 1
                            terms.append(
                                _composite_term(uC4, uB4, x4, v4, ell1, ell3, provider, c)
                            )
    direct = kahan_sum(terms)

    omega1 = lemma2_sum(uC, uB, vC, vB, w, provider, c, "I") * c / w
    omega2 = lemma2_sum(uC, uB, vC, vB, w, provider, c, "II") * c / w
    num = 1
    for z in uC:
        num = num * ell1(z)
    for z in vB:
        num = num * ell3(z)
    den = 1
    for z in uB:
        den = den * ell1(z)
    for z in xi:
        den = den * ell3(z)
    ell_ratio = num / den
    factored = omega1 * ell_ratio + omega2
    defect = abs(direct - factored) / max(abs(direct), abs(factored), 1e-300)
    return CompositeSumResult(
        direct=complex(direct),
        omega1=complex(omega1),
        omega2=complex(omega2),
        ell_ratio=complex(ell_ratio),
        factored=complex(factored),
        collapse_defect=float(defect),
        term_count=count,
    )


def _compositions4(n: int):
    for n1 in range(n + 1):
        for n2 in range(n + 1 - n1):
            for n3 in range(n + 1 - n1 - n2):
                yield (n1, n2, n3, n - n1 - n2 - n3)


def _composite_term(uC4, uB4, x4, v4, ell1, ell3, provider, c):
    uC1, uC2, uC3, uC4_ = uC4
    uB1, uB2, uB3, uB4_ = uB4
    x1, x2, x3, x4_ = x4
    v1, v2, v3, v4_ = v4
    pref = 1
    for z in uC2 + uC3:
        pref = pref * ell1(z)
    for z in v1 + v4_:
        pref = pref * ell3(z)
    den = 1
    for z in uB2 + uB3:
        den = den * ell1(z)
    for z in x1 + x4_:
        den = den * ell3(z)
    pref = pref / den

    FCuu = (
        _prod_f(uC4_, uC1, c) * _prod_f(uC3, uC2, c) * _prod_f(uC4_, uC2, c)
        * _prod_f(uC4_, uC3, c) * _prod_f(uC1, uC2, c) * _prod_f(uC1, uC3, c)
    )
    FBuu = (
        _prod_f(uB1, uB4_, c) * _prod_f(uB2, uB3, c) * _prod_f(uB2, uB1, c)
        * _prod_f(uB2, uB4_, c) * _prod_f(uB3, uB1, c) * _prod_f(uB3, uB4_, c)
    )
    FCvv = (
        _prod_f(x1, x4_, c) * _prod_f(x2, x3, c) * _prod_f(x2, x1, c)
        * _prod_f(x2, x4_, c) * _prod_f(x3, x1, c) * _prod_f(x3, x4_, c)
    )
    FBvv = (
        _prod_f(v4_, v1, c) * _prod_f(v3, v2, c) * _prod_f(v1, v3, c)
        * _prod_f(v4_, v3, c) * _prod_f(v1, v2, c) * _prod_f(v4_, v2, c)
    )
    FCvu = (
        _prod_f(x1, uC4_, c) * _prod_f(x4_, uC4_, c) * _prod_f(x1, uC1, c)
        * _prod_f(x4_, uC1, c) * _prod_f(x3, uC4_, c) * _prod_f(x4_, uC3, c)
    )
    FBvu = (
        _prod_f(v3, uB3, c) * _prod_f(v2, uB2, c) * _prod_f(v3, uB2, c)
        * _prod_f(v2, uB3, c) * _prod_f(v1, uB2, c) * _prod_f(v2, uB1, c)
    )
    zfac = (
        provider.evaluate(uC3, uB3, x1, v1, c)
        * provider.evaluate(uB1, uC1, v3, x3, c)
        * provider.evaluate(uC4_, uB4_, x2, v2, c)
        * provider.evaluate(uB2, uC2, v4_, x4_, c)
    )
    return pref * FCuu * FBuu * FCvv * FBvv * FCvu * FBvu * zfac


def g_function(uC_i, uB_i, xi_ii, vB_ii, w, provider, c, which: int):
    """Inner grouped sums of the four-fold representation.

    ``which`` = 1 evaluates the sum over sub-partitions of the group-(i)
    u-sets and group-(ii) v-sets with w barred from the first v-subset;
    ``which`` = 2 the complementary grouping.  When w is absent from the
    v-type arguments the restriction is vacuous and the sum cancels by the
    unrestricted identity.
    """
    uC_i, uB_i = _pts(uC_i), _pts(uB_i)
    xi_ii, vB_ii = _pts(xi_ii), _pts(vB_ii)
    cval = c.c if isinstance(c, Coupling) else c
    pin = None
    for idx, z in enumerate(xi_ii):
        if z == w:
            pin = ("II", idx) if which == 1 else ("I", idx)
    terms = list(_w_terms(uC_i, uB_i, xi_ii, vB_ii, provider, cval, xi_pin=pin))
    return kahan_sum(terms)


def bethe_substitute(kind: str, parts, n: int, other, model: ModelFunctions):
    """Bethe-equation substitution for one subsubset of an on-shell set.

    kind = "r1": direct = prod r1 over parts[n]; rhs = the f-ratio
    over the other subsubsets times f(other, parts[n]).
    kind = "r3": direct = prod r3 over parts[n]; rhs has the inverse
    f-ratio and the factor f(parts[n], other).
    """
    c = model.coupling.c
    parts = [_pts(p) for p in parts]
    other = _pts(other)
    target = parts[n]
    if kind == "r1":
        direct = 1
        for z in target:
            direct = direct * model.r1(z)
        rhs = _prod_f(other, target, c)
        for m, p in enumerate(parts):
            if m == n:
                continue
            rhs = rhs * _prod_f(target, p, c) / _prod_f(p, target, c)
    elif kind == "r3":
        direct = 1
        for z in target:
            direct = direct * model.r3(z)
        rhs = _prod_f(target, other, c)
        for m, p in enumerate(parts):
            if m == n:
                continue
            rhs = rhs * _prod_f(p, target, c) / _prod_f(target, p, c)
    else:
        raise ValueError("kind must be 'r1' or 'r3'")
    defect = abs(direct - rhs) / max(abs(direct), abs(rhs), 1e-300)
    return direct, rhs, defect
