"""Independent oracles: brute force or sympy, sharing no solver code with the package."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy
from sympy.matrices.normalforms import smith_normal_form

from cdgamaps.homotopy import IntervalElement


def brute_basis(alg, n):
    """All exponent vectors of total degree n (odd exponents capped at 1)."""
    degs = [g.degree for g in alg.generators]
    ranges = [range(0, 2) if d % 2 else range(0, n // d + 1) for d in degs]
    return {e for e in itertools.product(*ranges) if sum(a * d for a, d in zip(e, degs)) == n}


def koszul_sign(alg, m1, m2):
    """Sign of m1 * m2 by counting transpositions of odd letters (0 if an odd letter repeats)."""
    odd = [g.degree % 2 for g in alg.generators]
    for i, (a, b) in enumerate(zip(m1, m2)):
        if odd[i] and a and b:
            return 0
    # letters of m2 move left past the odd letters of m1 with larger index
    sign = 1
    for j, b in enumerate(m2):
        if b and odd[j]:
            passed = sum(m1[i] for i in range(j + 1, len(m1)) if odd[i])
            if passed % 2:
                sign = -sign
    return sign


def sympy_invariant_factors(M):
    if not M or not M[0]:
        return []
    S = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
    return [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]


def brute_quotient_order(M, box=None):
    """|Z^r / column span of M| by enumerating the box [0, det) modulo the lattice (square M)."""
    det = abs(int(sympy.Matrix(M).det()))
    if det == 0:
        return None
    r = len(M)
    Minv = sympy.Matrix(M).inv()
    reps = set()
    for x in itertools.product(range(det), repeat=r):
        # reduce x into the fundamental domain of the lattice
        c = Minv * sympy.Matrix(x)
        fl = [math.floor(v) for v in c]
        y = sympy.Matrix(x) - sympy.Matrix(M) * sympy.Matrix(fl)
        reps.add(tuple(int(v) for v in y))
    return len(reps)


def cochain_cohomology_order(cells, boundaries, k, g):
    """|H^k(X; Z/g)| by enumerating all cochains."""
    ck = cells[k]

    def delta(j, phi):
        # (delta phi)(sigma) = phi(d sigma) for a (j+1)-cell sigma
        M = boundaries.get(j + 1)
        if j + 1 >= len(cells) or cells[j + 1] == 0:
            return ()
        if not M:
            return tuple(0 for _ in range(cells[j + 1]))
        return tuple(sum(M[i][s] * phi[i] for i in range(cells[j])) % g for s in range(cells[j + 1]))

    cocycles = [phi for phi in itertools.product(range(g), repeat=ck) if not any(delta(k, phi))]
    if k == 0:
        boundaries_set = {tuple(0 for _ in range(ck))}
    else:
        boundaries_set = {delta(k - 1, psi) or tuple(0 for _ in range(ck))
                          for psi in itertools.product(range(g), repeat=cells[k - 1])}
    return len(cocycles) // len(boundaries_set)


def direct_extension_exists(p, extra_t: int = 2) -> bool:
    """Solve for f~(v) and H~(v) coefficient by coefficient (sympy linear solve).

    Unknowns: f~(v) in B^n and H~(v) = sum_i u_i t^i + sum_j w_j t^j dt with
    t-degrees up to that of H(dv) plus ``extra_t``. Equations: d f~(v) = f(dv),
    d H~(v) = H(dv), H~(v)|0 = g(v), H~(v)|1 = h(f~(v)).
    """
    A = p.f.source
    AV = p.g.source
    n = p.extension.degree
    top = n + 1
    B = p.f.target.with_truncation(max(top, p.f.target.truncation))
    C = p.g.target.with_truncation(max(top, p.g.target.truncation))
    f = p.f.with_truncation(max(top, A.truncation), B.truncation)
    h = p.h.with_truncation(max(top, p.h.source.truncation), C.truncation)
    H = p.H.with_truncation(max(top, A.truncation), C.truncation)
    g = p.g.with_truncation(max(top, AV.truncation), C.truncation)
    Aw = A.with_truncation(max(top, A.truncation))
    AVw = AV.with_truncation(max(top, AV.truncation))
    for name in [x.name for x in p.extension.new_generators]:
        dv_full = AVw.d_gen(name)
        m0 = len(A.generators)
        dv = Aw.element({m[:m0]: c for m, c in dv_full.terms.items()})
        fdv = f.apply(dv)
        Hdv = H.apply(dv)
        gv = g.apply(AVw.gen(name))
        T = max([Hdv.t_degree(), 0]) + extra_t
        Bn = B._basis_any(n)
        Cn = C._basis_any(n)
        Cm = C._basis_any(n - 1) if n >= 1 else []
        unknowns = []  # (kind, index, monomial)
        for m in Bn:
            unknowns.append(("f", 0, m))
        for i in range(T + 1):
            for m in Cn:
                unknowns.append(("u", i, m))
            for m in Cm:
                unknowns.append(("w", i, m))

        def image(u):
            kind, i, m = u
            if kind == "f":
                b = B.element({m: 1})
                return b, None
            if kind == "u":
                return None, IntervalElement(C, {i: C.element({m: 1})}, {})
            return None, IntervalElement(C, {}, {i: C.element({m: 1})})

        rows_keys = {}
        columns = []
        for u in unknowns:
            b, iv = image(u)
            eqs = {}
            if b is not None:
                for mono, c in b.d().terms.items():
                    eqs[("df", mono)] = eqs.get(("df", mono), 0) + c
                for mono, c in h.apply(b).terms.items():
                    eqs[("end1", mono)] = eqs.get(("end1", mono), 0) - c
            else:
                dI = iv.d()
                for i, x in dI.poly.items():
                    for mono, c in x.terms.items():
                        eqs[("dHp", i, mono)] = c
                for i, x in dI.dt.items():
                    for mono, c in x.terms.items():
                        eqs[("dHd", i, mono)] = c
                for mono, c in iv.at(0).terms.items():
                    eqs[("end0", mono)] = c
                for mono, c in iv.at(1).terms.items():
                    eqs[("end1", mono)] = eqs.get(("end1", mono), 0) + c
            columns.append(eqs)
            for k in eqs:
                rows_keys.setdefault(k, len(rows_keys))
        rhs = {}
        for mono, c in fdv.terms.items():
            rhs[("df", mono)] = c
        for i, x in Hdv.poly.items():
            for mono, c in x.terms.items():
                rhs[("dHp", i, mono)] = c
        for i, x in Hdv.dt.items():
            for mono, c in x.terms.items():
                rhs[("dHd", i, mono)] = c
        for mono, c in gv.terms.items():
            rhs[("end0", mono)] = c
        for k in rhs:
            rows_keys.setdefault(k, len(rows_keys))
        nr, nc = len(rows_keys), len(columns)
        if nc == 0:
            if any(rhs.values()):
                return False
            continue
        Mx = sympy.zeros(nr, nc)
        for j, eqs in enumerate(columns):
            for k, c in eqs.items():
                Mx[rows_keys[k], j] = sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
        bvec = sympy.zeros(nr, 1)
        for k, c in rhs.items():
            bvec[rows_keys[k], 0] = sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
        aug = Mx.row_join(bvec)
        if aug.rank() != Mx.rank():
            return False
    return True
