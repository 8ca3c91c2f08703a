"""Reverse-engineer the scalar-product highest coefficient from the algebra.

Pipeline per sector (a, b):
 1. derive the sector vector's creation-word coefficients at exact rational
    parameter points (transfer-matrix eigenproperty, Bethe values substituted,
    exact nullspace), normalized to unit leading word T12(u's) T23(v's);
 2. build the dual word list through the transposition antimorphism;
 3. normal-order the full bra x ket product and read the scalar product as a
    polynomial in the vacuum-ratio symbols;
 4. the r1(ket-u) r3(bra-v) monomial equals the highest coefficient
    Z_{a,b}(ket-u; bra-u | ket-v; bra-v) in this normalization (the unit
    leading word convention multiplies the conventional scalar product by
    f(bra-v, bra-u) f(ket-v, ket-u), which exactly removes the global
    denominator of the sum formula);
 5. fit the Z values with exact linear algebra against structured rational
    bases to obtain closed forms.

Run: python3 derive_highest_coefficient.py [sector]
"""

from __future__ import annotations

import sys
from fractions import Fraction as Fr
from itertools import combinations, permutations, product

from rtt_symbolic import Engine, p_add, p_const, p_scale, p_subs
from derive_bethe_vectors import nullspace_fraction, onshell_values, tau_poly


def wide_basis(us, vs):
    a, b = len(us), len(vs)
    allp = list(us) + list(vs)
    words = set()
    for n13 in range(0, min(a, b) + 1):
        n12, n23 = a - n13, b - n13
        for args in permutations(allp, n12 + n13 + n23):
            w12 = tuple(sorted(args[:n12]))
            w13 = tuple(sorted(args[n12 : n12 + n13]))
            w23 = tuple(sorted(args[n12 + n13 :]))
            words.add(
                tuple((1, 2, p) for p in w12)
                + tuple((1, 3, p) for p in w13)
                + tuple((2, 3, p) for p in w23)
            )
    return sorted(words)


def derive_vector(eng: Engine, us, vs, n_probes=3):
    """Sector vector at one exact point; unit coefficient on the leading word."""
    c = eng.c
    basis = wide_basis(us, vs)
    subs = onshell_values(us, vs, c)
    probes = []
    cand = Fr(13, 7)
    while len(probes) < n_probes:
        if all(cand - p not in (0, c, -c) for p in list(us) + list(vs)):
            probes.append(cand)
        cand += Fr(5, 11)
    rows_by_eq: dict = {}
    for col, word in enumerate(basis):
        for w in probes:
            acting: dict = {}
            for kd in (1, 2, 3):
                st = eng.apply_word([(kd, kd, w)], {word: p_const(1)})
                for ww, poly in st.items():
                    acting[ww] = p_add(acting.get(ww, {}), poly)
            acting[word] = p_add(acting.get(word, {}), p_scale(tau_poly(w, us, vs, c), -1))
            for ww, poly in acting.items():
                poly = p_subs(poly, subs)
                for mono, coeff in poly.items():
                    row = rows_by_eq.setdefault((w, ww, mono), [Fr(0)] * len(basis))
                    row[col] += coeff
    rows = [r for r in rows_by_eq.values() if any(x != 0 for x in r)]
    null = nullspace_fraction(rows)
    if len(null) != 1:
        raise RuntimeError(f"nullspace dimension {len(null)} at {us} {vs}")
    vec = null[0]
    lead = tuple((1, 2, p) for p in sorted(us)) + tuple((2, 3, p) for p in sorted(vs))
    sc = vec[basis.index(lead)]
    return {wd: xv / sc for wd, xv in zip(basis, vec) if xv}


def dual_ops(word):
    return [(j, i, p) for (i, j, p) in reversed(word)]


def scalar_product_poly(eng: Engine, bra_components: dict, ket_components: dict):
    total: dict = {}
    for ket_word, ket_coeff in ket_components.items():
        ket_state = {ket_word: p_const(ket_coeff)}
        for bra_word, bra_coeff in bra_components.items():
            st = eng.apply_word(dual_ops(bra_word), ket_state)
            vac = st.get((), None)
            if vac:
                total = p_add(total, p_scale(vac, bra_coeff))
    return total


def highest_coefficient_value(eng: Engine, xs, ys, ss, ts):
    """Z_{a,b}(ys; xs | ts; ss): bra parameters (xs; ss), ket (ys; ts)."""
    bra = derive_vector(eng, xs, ss)
    ket = derive_vector(eng, ys, ts)
    spoly = scalar_product_poly(eng, bra, ket)
    mono = tuple(sorted([("r1", y) for y in ys] + [("r3", s) for s in ss]))
    return spoly.get(mono, Fr(0)), spoly


def main():
    c = Fr(1)
    eng = Engine(c)
    xs, ss = (Fr(2, 7), Fr(-3, 5)), (Fr(1, 3),)
    ys, ts = (Fr(1, 2), Fr(-1, 5)), (Fr(-5, 4),)
    z, spoly = highest_coefficient_value(eng, xs, ys, ss, ts)
    print("Z_{2,1}(ys;xs|ts;ss) =", z)
    print("monomials in S:", len(spoly))


if __name__ == "__main__":
    sys.exit(main())
