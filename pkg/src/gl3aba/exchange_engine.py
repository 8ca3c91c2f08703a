"""Numeric normal-ordering engine for the GL(3) exchange algebra.

This is the workhorse behind the reference highest-coefficient provider:
given bra parameters (x; s) and ket parameters (y; t), it derives both
sector vectors from the transfer-matrix eigenproperty (with the Bethe
values substituted for the vacuum-ratio symbols at the roots), contracts
them, and reads the highest coefficient off the r1(y-set) r3(s-set)
monomial of the resulting scalar product.  With the unit-leading-word
normalization used here the per-state factors cancel the sum formula's
global denominator exactly, so the monomial coefficient *is* the highest
coefficient; the identity harness in :mod:`gl3aba.partition_sums`
independently certifies that.

All arithmetic is duck-typed: machine complex numbers by default, mpmath
numbers for high-precision paths.  States are dictionaries mapping
canonically ordered creation words to polynomials in the vacuum-ratio
symbols (dictionaries keyed by symbol monomials with scalar coefficients).

The solved form of the exchange relation,

    T_ij(p) T_kl(q) = [ T_kl(q) T_ij(p) + g T_kj(q) T_il(p)
                        - g T_il(q) T_kj(p) - g^2 T_ij(q) T_kl(p) ] / (1 - g^2),

moves the p-argument operator rightward; products of equal operator count
can reference each other cyclically, which the reducer resolves by tracking
unknown slots with scalar coefficients and dividing out the self-coupling.
"""

from __future__ import annotations

from itertools import combinations, permutations

_RANK = {(1, 2): 0, (1, 3): 1, (2, 3): 2}

INF = None  # argument slot of a zero-mode (infinite-rapidity) operator


def _sym_key(sym):
    name, p = sym
    return (name, p.real if hasattr(p, "real") else p, getattr(p, "imag", 0.0))


def _mono_sorted(syms):
    return tuple(sorted(syms, key=_sym_key))


def _p_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, v in b.items():
        s = out.get(m, 0) + v
        if s == 0:
            out.pop(m, None)
        else:
            out[m] = s
    return out


def _p_scale(a: dict, v) -> dict:
    if v == 0:
        return {}
    return {m: cv * v for m, cv in a.items()}


def _p_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = _mono_sorted(ma + mb)
            s = out.get(m, 0) + ca * cb
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
    return out


def _s_accum(out: dict, w, coeff: dict):
    cur = out.get(w)
    if cur is None:
        if coeff:
            out[w] = coeff
        return
    s = _p_add(cur, coeff)
    if s:
        out[w] = s
    else:
        del out[w]


class ExchangeEngine:
    """Reduce products of monodromy generators to canonical creation words."""

    def __init__(self, c, one=1.0 + 0.0j):
        self.c = c
        self.one = one
        if type(one).__module__.startswith("mpmath"):
            import mpmath as mp

            self._guard = float(mp.eps) * 1e6
        else:
            self._guard = 1e-12
        self._memo: dict = {}
        self._stack: set = set()

    def _key(self, op):
        i, j, p = op
        if p is INF:
            return (_RANK[(i, j)], 1, 0.0, 0.0)
        return (_RANK[(i, j)], 0, p.real if hasattr(p, "real") else p, getattr(p, "imag", 0.0))

    def apply_op(self, op, word) -> dict:
        key = (op, word)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if key in self._stack:
            return {("UNK", key): {(): self.one}}
        self._stack.add(key)
        try:
            out = self._expand(op, word)
        finally:
            self._stack.discard(key)
        lam = out.pop(("UNK", key), None)
        if lam is not None:
            const = lam.get((), 0)
            if set(lam) - {()}:
                raise ArithmeticError("non-scalar self-coupling in reduction")
            denom = 1 - const
            if abs(denom) < self._guard * (1 + abs(const)):
                raise ArithmeticError("degenerate cycle in reduction")
            factor = 1 / denom
            out = {w: _p_scale(cf, factor) for w, cf in out.items()}
        if any(isinstance(w, tuple) and len(w) == 2 and w[0] == "UNK" for w in out):
            return out
        self._memo[key] = out
        return out

    def _expand(self, op, word) -> dict:
        i, j, p = op
        one = self.one
        if not word:
            if i < j:
                return {(op,): {(): one}}
            if i == j:
                if p is INF:
                    raise ArithmeticError("diagonal zero mode on the reference vector")
                if i == 2:
                    return {(): {(): one}}
                return {(): {((f"r{i}", p),): one}}
            return {}
        head = word[0]
        if i < j and self._key(op) <= self._key(head):
            return {(op,) + word: {(): one}}
        k, l, q = head
        rest = word[1:]
        if p is INF and q is INF:
            raise ArithmeticError("two zero modes in one word")
        if p is INF:
            # T_ij[0] T_kl(q) = T_kl(q) T_ij[0] + d_il T_kj(q) - d_kj T_il(q)
            out = self._compose(head, self.apply_op(op, rest))
            if i == l:
                out = self._s_add_scaled(out, self.apply_op((k, j, q), rest), one)
            if k == j:
                out = self._s_add_scaled(out, self.apply_op((i, l, q), rest), -one)
            return out
        if q is INF:
            # T_ij(p) T_kl[0] = T_kl[0] T_ij(p) - d_il T_kj(p) + d_kj T_il(p)
            out = self._compose(head, self.apply_op(op, rest))
            if i == l:
                out = self._s_add_scaled(out, self.apply_op((k, j, p), rest), -one)
            if k == j:
                out = self._s_add_scaled(out, self.apply_op((i, l, p), rest), one)
            return out
        g = self.c / (p - q)
        den = 1 - g * g
        out = self._compose((k, l, q), self.apply_op((i, j, p), rest))
        out = self._s_add_scaled(out, self._compose((k, j, q), self.apply_op((i, l, p), rest)), g)
        out = self._s_add_scaled(out, self._compose((i, l, q), self.apply_op((k, j, p), rest)), -g)
        out = self._s_add_scaled(out, self._compose((i, j, q), self.apply_op((k, l, p), rest)), -g * g)
        inv = 1 / den
        return {w: _p_scale(cf, inv) for w, cf in out.items()}

    @staticmethod
    def _s_add_scaled(a: dict, b: dict, v) -> dict:
        out = dict(a)
        for w, coeff in b.items():
            _s_accum(out, w, _p_scale(coeff, v))
        return out

    def _compose(self, op, state: dict) -> dict:
        out: dict = {}
        for w, coeff in state.items():
            if isinstance(w, tuple) and len(w) == 2 and w[0] == "UNK":
                raise ArithmeticError("composition over an unresolved cycle slot")
            for w2, c2 in self.apply_op(op, w).items():
                _s_accum(out, w2, _p_mul(coeff, c2))
        return out

    def apply_word(self, ops, state: dict) -> dict:
        for op in reversed(ops):
            out: dict = {}
            for w, coeff in state.items():
                for w2, c2 in self.apply_op(op, w).items():
                    _s_accum(out, w2, _p_mul(coeff, c2))
            state = out
        return state


# ---------------------------------------------------------------------------
# Sector vectors and the highest coefficient
# ---------------------------------------------------------------------------


def _basis_words(us, vs):
    a, b = len(us), len(vs)
    allp = list(us) + list(vs)
    words = set()
    key = lambda z: (z.real if hasattr(z, "real") else z, getattr(z, "imag", 0.0))
    for n13 in range(0, min(a, b) + 1):
        n12, n23 = a - n13, b - n13
        for args in permutations(range(a + b), n12 + n13 + n23):
            vals = [allp[i] for i in args]
            w12 = tuple(sorted(vals[:n12], key=key))
            w13 = tuple(sorted(vals[n12 : n12 + n13], key=key))
            w23 = tuple(sorted(vals[n12 + n13 :], key=key))
            words.add(
                tuple((1, 2, z) for z in w12)
                + tuple((1, 3, z) for z in w13)
                + tuple((2, 3, z) for z in w23)
            )
    return sorted(words, key=lambda w: [(o[0], o[1], key(o[2])) for o in w])


def _onshell_values(us, vs, c):
    vals = {}
    for k, u in enumerate(us):
        val = 1
        for j, u2 in enumerate(us):
            if j != k:
                val = val * ((u - u2 + c) * (u2 - u)) / ((u - u2) * (u2 - u + c))
        for v in vs:
            val = val * (v - u + c) / (v - u)
        vals[("r1", u)] = val
    for l, v in enumerate(vs):
        val = 1
        for j, v2 in enumerate(vs):
            if j != l:
                val = val * ((v2 - v + c) * (v - v2)) / ((v2 - v) * (v - v2 + c))
        for u in us:
            val = val * (v - u + c) / (v - u)
        vals[("r3", v)] = val
    return vals


def _tau_terms(w, us, vs, c):
    fu = 1
    for u in us:
        fu = fu * (u - w + c) / (u - w)
    fwu = 1
    for u in us:
        fwu = fwu * (w - u + c) / (w - u)
    fv = 1
    for v in vs:
        fv = fv * (v - w + c) / (v - w)
    fwv = 1
    for v in vs:
        fwv = fwv * (w - v + c) / (w - v)
    return {(("r1", w),): fu, (): fwu * fv, (("r3", w),): fwv}


def _nullvector(rows, ncols):
    """One-dimensional kernel of a stack of rows (duck-typed scalars).

    Rows are equilibrated to unit max-norm first; the float path uses an
    SVD, the high-precision path Gaussian elimination with full row
    pivoting and a relative rank threshold.
    """
    scales = []
    for row in rows:
        scales.append(max((abs(x) for x in row), default=0))
    top = max(scales, default=0)
    if top == 0:
        raise ArithmeticError("empty eigencondition system")
    # rows that cancel analytically survive as pure roundoff; equilibrating
    # them would manufacture O(1) garbage constraints, so drop them instead
    floor = 3e-9 * top
    m = []
    for row, scale in zip(rows, scales):
        if scale <= floor:
            continue
        inv = 1 / scale
        m.append([x * inv for x in row])
    if not m:
        raise ArithmeticError("empty eigencondition system")
    if isinstance(m[0][0], (complex, float)) or hasattr(m[0][0], "dtype"):
        import numpy as np

        A = np.asarray(m, dtype=complex)
        _u, sv, vh = np.linalg.svd(A)
        if len(sv) < ncols:
            sv = list(sv) + [0.0] * (ncols - len(sv))
        small = sv[ncols - 1]
        next_small = sv[ncols - 2] if ncols >= 2 else 1.0
        if next_small > 0 and small / max(next_small, 1e-300) > 1e-5:
            raise ArithmeticError(
                f"kernel not one-dimensional (sigma ratio {small/next_small:.2e})"
            )
        return list(vh[-1].conj())
    # high-precision path: elimination with a relative threshold
    pivots = []
    r = 0
    tol = 1e-30
    for col in range(ncols):
        piv, mag = None, 0
        for rr in range(r, len(m)):
            a = abs(m[rr][col])
            if a > mag:
                piv, mag = rr, a
        if piv is None or mag <= tol:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [x * inv for x in m[r]]
        for rr in range(len(m)):
            if rr != r and m[rr][col] != 0:
                fac = m[rr][col]
                m[rr] = [x - fac * y for x, y in zip(m[rr], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [ccol for ccol in range(ncols) if ccol not in pivots]
    if len(free) != 1:
        raise ArithmeticError(f"kernel dimension {len(free)}, expected 1")
    fc = free[0]
    vec = [0] * ncols
    vec[fc] = 1
    for rowi, pc in enumerate(pivots):
        vec[pc] = -m[rowi][fc]
    return vec


def sector_vector(us, vs, c, one=1.0 + 0.0j, probes=None):
    """Creation-word components of the (len(us), len(vs)) sector vector.

    Unit coefficient on the leading word T12(us) T23(vs).
    """
    us, vs = tuple(us), tuple(vs)
    eng = ExchangeEngine(c, one=one)
    basis = _basis_words(us, vs)
    if len(basis) == 1:
        # pure sectors: the single ordered word is the vector
        return {basis[0]: one}
    subs = _onshell_values(us, vs, c)
    if probes is None:
        probes = []
        cand = 1.9441 + 0.7127j
        scale = max([abs(z) for z in list(us) + list(vs)] + [abs(c), 1.0])
        k = 0
        while len(probes) < 3:
            w = (2.1 + 0.5 * k) * scale * (1.17 + 0.719j) / abs(1.17 + 0.719j) + cand * k
            k += 1
            if all(abs(w - z) > 1e-6 * scale for z in list(us) + list(vs)):
                probes.append(w)
    rows_by_eq: dict = {}
    for col, word in enumerate(basis):
        for w in probes:
            acting: dict = {}
            for kd in (1, 2, 3):
                st = eng.apply_word([(kd, kd, w)], {word: {(): one}})
                for ww, poly in st.items():
                    acting[ww] = _p_add(acting.get(ww, {}), poly)
            tau = _tau_terms(w, us, vs, c)
            acting[word] = _p_add(acting.get(word, {}), _p_scale(tau, -1))
            for ww, poly in acting.items():
                # substitute the Bethe values at the roots
                reduced: dict = {}
                for mono, coeff in poly.items():
                    keep = []
                    val = coeff
                    for sym in mono:
                        if sym in subs:
                            val = val * subs[sym]
                        else:
                            keep.append(sym)
                    m2 = _mono_sorted(keep)
                    s = reduced.get(m2, 0) + val
                    if s == 0:
                        reduced.pop(m2, None)
                    else:
                        reduced[m2] = s
                for mono, coeff in reduced.items():
                    row = rows_by_eq.setdefault((w, ww, mono), [0] * len(basis))
                    row[col] = row[col] + coeff
    vec = _nullvector(list(rows_by_eq.values()), len(basis))
    lead = basis.index(
        tuple((1, 2, z) for z in sorted(us, key=lambda z: (z.real, z.imag)))
        + tuple((2, 3, z) for z in sorted(vs, key=lambda z: (z.real, z.imag)))
    )
    sc = vec[lead]
    if sc == 0 or abs(sc) < 1e-300:
        raise ArithmeticError("vanishing leading component in sector vector")
    inv = 1 / sc
    return {wd: xv * inv for wd, xv in zip(basis, vec) if xv != 0}


def highest_coefficient(xs, ys, ss, ts, c, one=1.0 + 0.0j):
    """Z(ys; xs | ts; ss) from the contracted bra/ket sector vectors."""
    bra = sector_vector(xs, ss, c, one=one)
    ket = sector_vector(ys, ts, c, one=one)
    return _contract_slot(bra, ket, ys, ss, c, one)


def highest_coefficient_vlimit(xs, ys, ss, ts, c, one=1.0 + 0.0j):
    """Leading large-argument coefficient of Z in one ket v-slot.

    Returns lim (w/c) Z(ys; xs | {w} + ts; ss): the ket vector acquires an
    infinite v-type argument, realized exactly by acting with the
    corresponding zero-mode operator on the reduced-sector vector.
    """
    eng = ExchangeEngine(c, one=one)
    bra = sector_vector(xs, ss, c, one=one)
    base = sector_vector(ys, ts, c, one=one)
    ket: dict = {}
    for word, coeff in base.items():
        for w2, c2 in eng.apply_op((2, 3, INF), word).items():
            cur = ket.get(w2, 0) + coeff * c2.get((), 0)
            if cur == 0:
                ket.pop(w2, None)
            else:
                ket[w2] = cur
    return _contract_slot(bra, ket, ys, ss, c, one)


def _contract_slot(bra, ket, ys, ss, c, one):
    eng = ExchangeEngine(c, one=one)
    target = _mono_sorted([("r1", y) for y in ys] + [("r3", s) for s in ss])
    total = 0
    for ket_word, ket_coeff in ket.items():
        state = {ket_word: {(): ket_coeff}}
        for bra_word, bra_coeff in bra.items():
            ops = [(j, i, p) for (i, j, p) in reversed(bra_word)]
            st = eng.apply_word(ops, state)
            vac = st.get((), None)
            if not vac:
                continue
            for mono, coeff in vac.items():
                if _mono_sorted(mono) == target:
                    total = total + bra_coeff * coeff
    return total
