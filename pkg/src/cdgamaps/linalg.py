"""Exact linear algebra over Q and Z.

Matrices are lists of rows of Fractions (or ints for the integer routines).
Elimination always pivots on the leftmost available column, and columns
follow the canonical monomial order, so every choice made here (cohomology
representatives, antiderivatives) is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from .algebra import Element, FreeCDGA
from .errors import DegreeOutOfRange, NotExact

Vector = List[Fraction]
Matrix = List[List[Fraction]]


# -- rational elimination -----------------------------------------------------------

def to_fraction_matrix(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Matrix, ncols: Optional[int] = None):
    """Reduced row echelon form. Returns (R, pivot_columns)."""
    m = [list(r) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                row_r = m[r]
                m[i] = [a - f * b for a, b in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Matrix, ncols: Optional[int] = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Matrix, ncols: int) -> List[Vector]:
    """Basis of {x : M x = 0}, one vector per free column (free entry 1)."""
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        out.append(v)
    return out


def solve(rows: Matrix, rhs: Sequence, ncols: int) -> Optional[Vector]:
    """A solution of M x = rhs with all free variables zero, or None."""
    aug = [list(r) + [Fraction(b)] for r, b in zip(rows, rhs)]
    R, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = R[i][ncols]
    return x


def transpose(rows: Matrix, nrows_out: Optional[int] = None) -> Matrix:
    if not rows:
        return [[] for _ in range(nrows_out or 0)]
    return [list(c) for c in zip(*rows)]


def mat_vec(rows: Matrix, v: Sequence) -> Vector:
    return [sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in rows]


def columns_to_rows(cols: Sequence[Sequence], nrows: int) -> Matrix:
    return [[col[i] for col in cols] for i in range(nrows)]


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    if not any(v):
        return True
    if not vectors:
        return False
    n = len(v)
    return solve(columns_to_rows(vectors, n), v, len(vectors)) is not None


# -- degree matrices ------------------------------------------------------------------

def vector_of(x: Element, basis: Sequence) -> Vector:
    index = {m: i for i, m in enumerate(basis)}
    v = [Fraction(0)] * len(basis)
    for m, c in x.terms.items():
        if m not in index:
            raise ValueError(f"monomial {x.algebra.format_monomial(m)} is outside the given basis")
        v[index[m]] = c
    return v


def element_of(alg: FreeCDGA, basis: Sequence, v: Sequence) -> Element:
    return Element._make(alg, {m: Fraction(c) for m, c in zip(basis, v) if c})


@dataclass
class DegreeMatrix:
    """Matrix of d from degree n to degree n+1 (rows: target monomials)."""

    degree: int
    source: list
    target: list
    rows: Matrix

    @property
    def shape(self):
        return len(self.target), len(self.source)


def _working(alg: FreeCDGA, top: int) -> FreeCDGA:
    return alg if top <= alg.truncation else alg.with_truncation(top)


def diff_matrix(alg: FreeCDGA, n: int) -> DegreeMatrix:
    """Matrix of d_n. Degree n+1 may exceed the truncation; it is computed honestly."""
    if n < -1:
        return DegreeMatrix(n, [], [], [])
    work = _working(alg, n + 1)
    src = work._basis_any(n) if n >= 0 else []
    tgt = work._basis_any(n + 1)
    index = {m: i for i, m in enumerate(tgt)}
    rows = [[Fraction(0)] * len(src) for _ in tgt]
    for j, m in enumerate(src):
        dx = Element._make(work, {m: Fraction(1)}).d()
        for p, c in dx.terms.items():
            rows[index[p]][j] = c
    return DegreeMatrix(n, list(src), list(tgt), rows)


# -- cohomology ---------------------------------------------------------------------

@dataclass
class CohomologySpace:
    """Cohomology of a cochain complex in one degree.

    ``encode`` turns an object of the complex into a coordinate vector and
    ``decode`` turns coordinates back into objects.
    """

    degree: int
    dimension: int
    rep_vectors: List[Vector]
    boundary_vectors: List[Vector]
    cycle_vectors: List[Vector]
    encode: Callable
    decode: Callable
    representatives: list = field(default_factory=list)

    def project_vector(self, v: Sequence) -> Vector:
        cols = self.rep_vectors + self.boundary_vectors
        if not cols:
            if any(v):
                raise ValueError("vector is not a cocycle")
            return []
        sol = solve(columns_to_rows(cols, len(v)), v, len(cols))
        if sol is None:
            raise ValueError("element is not closed")
        return sol[: self.dimension]

    def project(self, x) -> Vector:
        return self.project_vector(self.encode(x))

    def is_exact(self, x) -> bool:
        return not any(self.project(x))

    def from_coordinates(self, coords: Sequence):
        v = [Fraction(0)] * len(self.cycle_vectors[0]) if self.cycle_vectors else []
        for c, r in zip(coords, self.rep_vectors):
            if c:
                v = [a + Fraction(c) * b for a, b in zip(v, r)]
        return self.decode(v)


def complex_cohomology(n: int, d_out: Matrix, d_in: Matrix, dim_n: int, dim_prev: int,
                       encode: Callable, decode: Callable) -> CohomologySpace:
    """H^n for d_in: C^{n-1} -> C^n and d_out: C^n -> C^{n+1}."""
    cycles = nullspace(d_out, dim_n)
    bounds = []
    if dim_prev and d_in:
        _, piv = rref(d_in, dim_prev)
        bounds = [[row[c] for row in d_in] for c in piv]
    reps = []
    current = list(bounds)
    for z in cycles:
        if not in_span(current, z):
            reps.append(z)
            current.append(z)
    space = CohomologySpace(n, len(reps), reps, bounds, cycles, encode, decode)
    space.representatives = [decode(r) for r in reps]
    return space


def cohomology(alg: FreeCDGA, n: int) -> CohomologySpace:
    """H^n(alg). Degree n+1 is computed past the truncation when needed."""
    if n < 0 or n > alg.truncation:
        raise DegreeOutOfRange(f"degree {n} outside 0..{alg.truncation}")
    out_m = diff_matrix(alg, n)
    in_m = diff_matrix(alg, n - 1)
    basis_n = out_m.source

    def encode(x: Element) -> Vector:
        x = alg.coerce(x) if x.algebra != alg else x
        return vector_of(x, basis_n)

    def decode(v):
        return element_of(alg, basis_n, v)

    return complex_cohomology(n, out_m.rows, in_m.rows, len(basis_n), len(in_m.source),
                              encode, decode)


def solve_d(alg: FreeCDGA, b: Element) -> Element:
    """Some x with dx = b (free coordinates zero); NotExact otherwise."""
    if b.algebra != alg:
        b = alg.coerce(b)
    if b.is_zero():
        return alg.zero()
    n = b.degree
    if n < 1 or n > alg.truncation:
        raise DegreeOutOfRange(f"degree {n} outside 1..{alg.truncation}")
    dm = diff_matrix(alg, n - 1)
    rhs = vector_of(b, dm.target)
    x = solve(dm.rows, rhs, len(dm.source))
    if x is None:
        raise NotExact(f"{b} is not a coboundary")
    return element_of(alg, dm.source, x)


def is_exact(alg: FreeCDGA, b: Element) -> bool:
    try:
        solve_d(alg, b)
        return True
    except NotExact:
        return False


def relative_cohomology(phi, n: int) -> CohomologySpace:
    """Cohomology of the cone C^n = A^n + B^(n-1), d(a, b) = (da, phi(a) - db).

    Classes are encoded from pairs (a, b) of Elements.
    """
    A, B = phi.source, phi.target
    top = max(A.truncation, B.truncation)
    if n < 0 or n > top + 1:
        raise DegreeOutOfRange(f"degree {n} outside 0..{top + 1}")
    hi = n + 1
    phi_w = phi.with_truncation(max(hi, A.truncation), max(hi, B.truncation))
    Aw, Bw = phi_w.source, phi_w.target

    def block(k):
        a_basis = Aw._basis_any(k) if k >= 0 else []
        b_basis = Bw._basis_any(k - 1) if k >= 1 else []
        return a_basis, b_basis

    def cone_matrix(k):
        a_src, b_src = block(k)
        a_tgt, b_tgt = block(k + 1)
        rows = [[Fraction(0)] * (len(a_src) + len(b_src)) for _ in range(len(a_tgt) + len(b_tgt))]
        ia = {m: i for i, m in enumerate(a_tgt)}
        ib = {m: i + len(a_tgt) for i, m in enumerate(b_tgt)}
        for j, m in enumerate(a_src):
            x = Element._make(Aw, {m: Fraction(1)})
            for p, c in x.d().terms.items():
                rows[ia[p]][j] += c
            for p, c in phi_w.apply(x).terms.items():
                rows[ib[p]][j] += c
        for j, m in enumerate(b_src):
            y = Element._make(Bw, {m: Fraction(1)})
            for p, c in y.d().terms.items():
                rows[ib[p]][len(a_src) + j] -= c
        return rows, len(a_src) + len(b_src)

    out_rows, dim_n = cone_matrix(n)
    in_rows, dim_prev = cone_matrix(n - 1) if n >= 1 else ([], 0)
    a_basis, b_basis = block(n)

    def encode(pair):
        a, b = pair
        a = Aw.coerce(a) if a.algebra != Aw else a
        b = Bw.coerce(b) if b.algebra != Bw else b
        return vector_of(a, a_basis) + vector_of(b, b_basis)

    def decode(v):
        return (element_of(Aw, a_basis, v[: len(a_basis)]),
                element_of(Bw, b_basis, v[len(a_basis):]))

    return complex_cohomology(n, out_rows, in_rows, dim_n, dim_prev, encode, decode)


# -- integer normal form ------------------------------------------------------------

def smith_normal_form(M: Sequence[Sequence[int]]):
    """Return (U, D, V) with U*M*V = D diagonal, U and V unimodular.

    Diagonal entries are nonnegative and each divides the next.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [[int(x) for x in r] for r in M]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):  # col dst += k * col src
        for r in A:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        done = False
                        if abs(A[i][t]) < abs(A[t][t]):
                            swap_rows(t, i)
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        done = False
                        if abs(A[t][j]) < abs(A[t][t]):
                            swap_cols(t, j)
            if done:
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if A[i][j] % A[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


def integer_kernel(M: Sequence[Sequence[int]], ncols: Optional[int] = None) -> List[List[int]]:
    """Basis of the integer lattice {x in Z^n : M x = 0}."""
    if not M:
        n = ncols or 0
        return [[int(i == j) for i in range(n)] for j in range(n)]
    _, D, V = smith_normal_form(M)
    n = len(M[0])
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [[V[i][j] for i in range(n)] for j in range(r, n)]


@dataclass
class IntegerLatticeQuotient:
    """Z^r modulo the column span of ``generators``."""

    ambient_rank: int
    generators: list
    invariant_factors: List[int]
    free_rank: int

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> Optional[int]:
        """Quotient order, None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out


def integer_normal_form(M: Sequence[Sequence[int]], ambient_rank: Optional[int] = None
                        ) -> IntegerLatticeQuotient:
    rows = len(M) if M else (ambient_rank or 0)
    if not M or not M[0]:
        return IntegerLatticeQuotient(rows, [list(r) for r in (M or [])], [], rows)
    _, D, _ = smith_normal_form(M)
    diag = [D[i][i] for i in range(min(len(D), len(D[0]))) if D[i][i]]
    return IntegerLatticeQuotient(rows, [list(r) for r in M], diag, rows - len(diag))


# -- exact linear programming ---------------------------------------------------------

def simplex_max(c: Sequence, A: Sequence[Sequence], b: Sequence):
    """Maximize c.x subject to A x <= b, x >= 0, with b >= 0 (origin feasible).

    Exact tableau simplex with Bland's rule. Returns (value, x) or raises
    ValueError when unbounded.
    """
    m, n = len(A), len(c)
    if any(Fraction(x) < 0 for x in b):
        raise ValueError("right-hand side must be nonnegative")
    T = [[Fraction(x) for x in A[i]] + [Fraction(int(i == k)) for k in range(m)] + [Fraction(b[i])]
         for i in range(m)]
    obj = [-Fraction(x) for x in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise ValueError("linear program is unbounded")
        r = best[1]
        piv = T[r][enter]
        T[r] = [x / piv for x in T[r]]
        for i in range(m):
            if i != r and T[i][enter]:
                f = T[i][enter]
                T[i] = [a - f * b_ for a, b_ in zip(T[i], T[r])]
        if obj[enter]:
            f = obj[enter]
            obj = [a - f * b_ for a, b_ in zip(obj, T[r])]
        basis[r] = enter
    x = [Fraction(0)] * (n + m)
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    return obj[-1], x[:n]


def coset_norm_min(v: Sequence, S: Sequence[Sequence]) -> Fraction:
    """min over s in span(S) of the l-infinity norm of v + s, exactly."""
    return coset_norm_minimizer(v, S)[0]


def coset_norm_minimizer(v: Sequence, S: Sequence[Sequence]):
    """Return (value, s) with s in span(S) minimizing |v + s|_inf.

    Solved as an LP in (lambda, u): substituting u = M0 + w with
    M0 = |v|_inf makes the origin feasible, so one simplex phase suffices.
    """
    v = [Fraction(x) for x in v]
    S = [[Fraction(x) for x in s] for s in S if any(s)]
    if not S or not v:
        return (max((abs(x) for x in v), default=Fraction(0)), [Fraction(0)] * len(v))
    k = len(S)
    M0 = max(abs(x) for x in v)
    A, b = [], []
    for i, vi in enumerate(v):
        row = [s[i] for s in S]
        A.append(row + [-x for x in row] + [Fraction(-1), Fraction(1)])
        b.append(M0 - vi)
        A.append([-x for x in row] + row + [Fraction(-1), Fraction(1)])
        b.append(M0 + vi)
    c = [Fraction(0)] * (2 * k) + [Fraction(-1), Fraction(1)]
    value, x = simplex_max(c, A, b)
    lam = [x[i] - x[k + i] for i in range(k)]
    s = [sum((l * vec[i] for l, vec in zip(lam, S)), Fraction(0)) for i in range(len(v))]
    return M0 - value, s
