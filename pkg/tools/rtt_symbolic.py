"""Exact normal-ordering engine for the GL(3) exchange algebra.

Works over the field of rationals: rapidities and the R-matrix constant are
Fractions, vacuum eigenvalues r1(p), r3(p) stay symbolic (r2 == 1).  States
are linear combinations of canonically ordered creation words acting on the
reference vector, with coefficients that are polynomials in the r-symbols
with Fraction coefficients.

Exchange rule (all reductions derive from it):

    T_ij(u) T_kl(v) = T_kl(v) T_ij(u)
                      + g(u,v) [ T_kj(v) T_il(u) - T_kj(u) T_il(v) ]

Zero-mode operators (index None) obey the contracted rule

    [T_ij[0], T_kl(v)] = delta_il T_kj(v) - delta_kj T_il(v)

and T_ij[0] acting on the reference vector yields the formal infinite-argument
creation word (for i < j), r_i[0] symbols (diagonal) or zero (i > j).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

INF = None  # parameter slot of a zero-mode operator

# ---------------------------------------------------------------------------
# Polynomials in r-symbols over Fractions
# ---------------------------------------------------------------------------
# poly: dict {monomial: Fraction}, monomial = tuple of sorted symbol keys,
# symbol key = ("r1"|"r3"|"r1z"|"r3z", param) with param a Fraction or INF.

ONE = ((), Fraction(1))


def p_const(c) -> dict:
    c = Fraction(c)
    return {(): c} if c else {}


def p_sym(name, param) -> dict:
    return {((name, param),): Fraction(1)}


def p_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, Fraction(0)) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def p_scale(a: dict, c) -> dict:
    c = Fraction(c)
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def p_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(sorted(ma + mb))
            s = out.get(m, Fraction(0)) + ca * cb
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def p_subs(a: dict, values: dict) -> dict:
    """Substitute Fraction values for some symbols; others stay symbolic."""
    out: dict = {}
    for m, c in a.items():
        keep = []
        for sym in m:
            if sym in values:
                c = c * values[sym]
            else:
                keep.append(sym)
        m2 = tuple(sorted(keep))
        s = out.get(m2, Fraction(0)) + c
        if s:
            out[m2] = s
        else:
            out.pop(m2, None)
    return out


# ---------------------------------------------------------------------------
# States and operator application
# ---------------------------------------------------------------------------
# op = (i, j, param); creation i<j, diagonal i==j, annihilation i>j.
# word = tuple of creation ops in canonical order.
# state = dict {word: poly}

_RANK = {(1, 2): 0, (1, 3): 1, (2, 3): 2}


def _op_key(op):
    i, j, p = op
    return (_RANK[(i, j)], 1 if p is INF else 0, p if p is not INF else Fraction(0))


def _canonical_ok(op, head) -> bool:
    return _op_key(op) <= _op_key(head)


class Engine:
    """Normal-ordering reducer.

    ``apply_op(op, word)`` reduces T_op * (canonical word) |0> to canonical
    form.  Products at equal total operator count can reference each other
    cyclically (the exchange relation is self-referential), so reduction
    tracks unknown slots ("UNK", key) with scalar coefficients and divides
    the self-coupling out when a key's expansion closes on itself; unresolved
    references to deeper in-progress keys propagate upward and resolve at
    their owner, after which dependents are recomputed clean.
    """

    def __init__(self, c):
        self.c = Fraction(c)
        self._memo: dict = {}
        self._stack: set = set()

    def g(self, p, q) -> Fraction:
        if p is INF or q is INF:
            raise ValueError("zero-mode arguments use the contracted rule")
        return self.c / (p - q)

    # -- core reduction ------------------------------------------------------

    def apply_op(self, op, word) -> dict:
        key = (op, word)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if key in self._stack:
            return {("UNK", key): p_const(1)}
        self._stack.add(key)
        try:
            out = self._expand(op, word)
        finally:
            self._stack.discard(key)
        lam = out.pop(("UNK", key), None)
        if lam is not None:
            const = lam.get((), Fraction(0))
            if set(lam) - {()}:
                raise ArithmeticError("non-scalar self-coupling in reduction")
            factor = 1 / (1 - const)
            out = {w: p_scale(cf, factor) for w, cf in out.items()}
        if any(isinstance(w, tuple) and len(w) == 2 and w[0] == "UNK" for w in out):
            return out  # unresolved deeper dependency; do not memoize
        self._memo[key] = out
        return out

    def _expand(self, op, word) -> dict:
        i, j, p = op
        if not word:
            if p is INF:
                if i < j:
                    return {((i, j, INF),): p_const(1)}
                if i == j:
                    return {(): p_sym(f"r{i}z", INF)} if i != 2 else {}
                return {}
            if i < j:
                return {(op,): p_const(1)}
            if i == j:
                if i == 2:
                    return {(): p_const(1)}
                return {(): p_sym(f"r{i}", p)}
            return {}
        head = word[0]
        rest = word[1:]
        if i < j and _canonical_ok(op, head):
            return {(op,) + word: p_const(1)}
        k, l, q = head
        if p is INF and q is not INF:
            # T_ij[0] T_kl(q) = T_kl(q) T_ij[0] + d_il T_kj(q) - d_kj T_il(q)
            out = self._compose(head, self.apply_op(op, rest))
            if i == l:
                out = _s_add(out, self.apply_op((k, j, q), rest))
            if k == j:
                out = _s_add(out, _s_scale(self.apply_op((i, l, q), rest), -1))
            return out
        if q is INF and p is not INF:
            # T_ij(p) T_kl[0] = T_kl[0] T_ij(p) - d_il T_kj(p) + d_kj T_il(p)
            out = self._compose(head, self.apply_op(op, rest))
            if i == l:
                out = _s_add(out, _s_scale(self.apply_op((k, j, p), rest), -1))
            if k == j:
                out = _s_add(out, self.apply_op((i, l, p), rest))
            return out
        if p is INF and q is INF:
            raise NotImplementedError("two zero modes in one word")
        # solved exchange rule: move the p-argument operator rightward
        # T_ij(p) T_kl(q) = [ T_kl(q) T_ij(p) + g T_kj(q) T_il(p)
        #                     - g T_il(q) T_kj(p) - g^2 T_ij(q) T_kl(p) ] / (1-g^2)
        gpq = self.g(p, q)
        den = 1 - gpq * gpq
        out = self._compose((k, l, q), self.apply_op((i, j, p), rest))
        out = _s_add(out, _s_scale(
            self._compose((k, j, q), self.apply_op((i, l, p), rest)), gpq))
        out = _s_add(out, _s_scale(
            self._compose((i, l, q), self.apply_op((k, j, p), rest)), -gpq))
        out = _s_add(out, _s_scale(
            self._compose((i, j, q), self.apply_op((k, l, p), rest)), -gpq * gpq))
        return {w: p_scale(cf, 1 / den) for w, cf in out.items()}

    def _compose(self, op, state: dict) -> dict:
        out: dict = {}
        for w, coeff in state.items():
            if isinstance(w, tuple) and len(w) == 2 and w[0] == "UNK":
                raise ArithmeticError("composition over an unresolved cycle slot")
            for w2, c2 in self.apply_op(op, w).items():
                _s_accum(out, w2, p_mul(coeff, c2))
        return out

    # -- public helpers --------------------------------------------------------

    def apply_word(self, ops, state: dict) -> dict:
        """Apply a product of operators (leftmost acts last) to a state."""
        for op in reversed(ops):
            out: dict = {}
            for w, coeff in state.items():
                for w2, c2 in self.apply_op(op, w).items():
                    _s_accum(out, w2, p_mul(coeff, c2))
            state = out
        return state

    def vacuum(self) -> dict:
        return {(): p_const(1)}


def _s_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for w, coeff in b.items():
        _s_accum(out, w, coeff)
    return out


def _s_scale(a: dict, c) -> dict:
    return {w: p_scale(coeff, c) for w, coeff in a.items()}


def _s_accum(out: dict, w, coeff: dict):
    cur = out.get(w)
    if cur is None:
        if coeff:
            out[w] = coeff
        return
    s = p_add(cur, coeff)
    if s:
        out[w] = s
    else:
        del out[w]


def dual_word(word):
    """Transposition antimorphism image of a creation word (reversed, entries swapped)."""
    return tuple((j, i, p) for (i, j, p) in reversed(word))


def f_frac(u: Fraction, v: Fraction, c: Fraction) -> Fraction:
    return (u - v + c) / (u - v)
