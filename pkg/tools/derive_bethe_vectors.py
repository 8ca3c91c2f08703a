"""Derive low-sector Bethe vector components from the exchange algebra.

For a sector (a, b) the vector is an unknown combination of canonical
creation words; imposing the transfer-matrix eigenproperty with the Bethe
equations substituted (vacuum-ratio symbols at the roots replaced by their
f-product values, probe-argument symbols kept) yields an exact linear system
over the rationals whose nullspace is the vector up to scale.

Run directly to print solved component ratios at sample points; used
offline to pin closed forms for the scalar-product highest coefficient.
"""

from __future__ import annotations

import itertools
import sys
from fractions import Fraction as Fr

from rtt_symbolic import Engine, INF, f_frac, p_add, p_mul, p_scale, p_subs, p_sym, p_const


def basis_words(us, vs):
    """Candidate creation words for sector (len(us), len(vs)).

    Content: (a-k) operators T12 on a u-subset, (b-k) T23 on a v-subset,
    and k operators T13 on unused arguments of either type.
    """
    a, b = len(us), len(vs)
    words = []
    for k in range(0, min(a, b) + 1):
        for u_used in itertools.combinations(range(a), a - k):
            for v_used in itertools.combinations(range(b), b - k):
                pool = [us[i] for i in range(a) if i not in u_used] + [
                    vs[i] for i in range(b) if i not in v_used
                ]
                for z_args in itertools.combinations(range(len(pool)), k):
                    w12 = tuple((1, 2, us[i]) for i in u_used)
                    w13 = tuple(sorted(((1, 3, pool[i]) for i in z_args),
                                       key=lambda o: o[2]))
                    w23 = tuple((2, 3, vs[i]) for i in v_used)
                    words.append(w12 + w13 + w23)
    return sorted(set(words))


def onshell_values(us, vs, c):
    """Bethe-equation values for r1 at u-roots and r3 at v-roots."""
    vals = {}
    for k, u in enumerate(us):
        val = Fr(1)
        for j, u2 in enumerate(us):
            if j != k:
                val *= f_frac(u, u2, c) / f_frac(u2, u, c)
        for v in vs:
            val *= f_frac(v, u, c)
        vals[("r1", u)] = val
    for l, v in enumerate(vs):
        val = Fr(1)
        for j, v2 in enumerate(vs):
            if j != l:
                val *= f_frac(v2, v, c) / f_frac(v, v2, c)
        for u in us:
            val *= f_frac(v, u, c)
        vals[("r3", v)] = val
    return vals


def tau_poly(w, us, vs, c):
    """tau(w | us, vs) as a polynomial in r1(w), r3(w)."""
    fu = Fr(1)
    for u in us:
        fu *= f_frac(u, w, c)
    fwu = Fr(1)
    for u in us:
        fwu *= f_frac(w, u, c)
    fv = Fr(1)
    for v in vs:
        fv *= f_frac(v, w, c)
    fwv = Fr(1)
    for v in vs:
        fwv *= f_frac(w, v, c)
    out = p_scale(p_sym("r1", w), fu)
    out = p_add(out, p_const(fwu * fv))
    out = p_add(out, p_scale(p_sym("r3", w), fwv))
    return out


def nullspace_fraction(rows):
    """Exact nullspace of a matrix of Fractions (list of rows)."""
    if not rows:
        return []
    ncols = len(rows[0])
    m = [row[:] for row in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for rr in range(r, len(m)):
            if m[rr][col] != 0:
                piv = rr
                break
        if piv is None:
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
    free = [cc for cc in range(ncols) if cc not in pivots]
    basis = []
    for fc in free:
        vec = [Fr(0)] * ncols
        vec[fc] = Fr(1)
        for rowi, pc in enumerate(pivots):
            vec[pc] = -m[rowi][fc]
        basis.append(vec)
    return basis


def derive_vector(us, vs, c, probes=None):
    """Solve for the sector vector's word coefficients at one parameter point."""
    eng = Engine(c)
    words = basis_words(us, vs)
    subs = onshell_values(us, vs, c)
    if probes is None:
        probes = []
        cand = Fr(13, 7)
        while len(probes) < 2:
            if all(cand - p not in (0, c, -c) for p in list(us) + list(vs)):
                probes.append(cand)
            cand += Fr(5, 11)
    rows_by_eq = {}

    for col, word in enumerate(words):
        for w in probes:
            acting = {}
            for kdiag in (1, 2, 3):
                st = eng.apply_word([(kdiag, kdiag, w)], {word: p_const(1)})
                for ww, poly in st.items():
                    acting[ww] = p_add(acting.get(ww, {}), poly)
            tpol = tau_poly(w, us, vs, c)
            acting[word] = p_add(acting.get(word, {}), p_scale(tpol, -1))
            for ww, poly in acting.items():
                poly = p_subs(poly, subs)
                for mono, coeff in poly.items():
                    key = (w, ww, mono)
                    row = rows_by_eq.setdefault(key, [Fr(0)] * len(words))
                    row[col] += coeff

    rows = [row for row in rows_by_eq.values() if any(x != 0 for x in row)]
    null = nullspace_fraction(rows)
    return words, null


def main():
    c = Fr(1)
    print("== sector (1,1) ==")
    for (u, v) in [(Fr(2, 7), Fr(1, 3)), (Fr(3, 5), Fr(-1, 4)), (Fr(-2, 9), Fr(5, 8))]:
        words, null = derive_vector((u,), (v,), c)
        print(f"u={u} v={v}: nullspace dim {len(null)}")
        if len(null) == 1:
            vec = null[0]
            lead = words.index(((1, 2, u), (2, 3, v)))
            scale = vec[lead]
            for wd, x in zip(words, vec):
                if x:
                    print(f"    {wd}: {x/scale}")
            # compare against rational guesses
            d = f_frac(v, u, c)
            print(f"    [f(v,u) = {d},  g(v,u) = {c/(v-u)},  g(u,v) = {c/(u-v)}]")


if __name__ == "__main__":
    sys.exit(main())
