"""Exact degree grading on tuples of rational functions.

The ambient model is R^k with R the field of univariate rational functions
over Q, and the operator is componentwise multiplication by the argument.
Everything reduces to exact Gaussian elimination over Q after clearing a
common polynomial denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InputError
from .rational import NEG_INF, Poly, RationalFunction, RationalMatrix


def deg(r) -> float | int:
    """Grading: deg(p/q) = deg p - deg q, deg 0 = -inf."""
    if isinstance(r, RationalFunction):
        return r.degree
    if isinstance(r, Poly):
        return r.degree
    return RationalFunction._coerce(r).degree


@dataclass(frozen=True)
class GradedVector:
    """Tuple of rational functions; components may freely be zero."""

    components: tuple

    def __init__(self, components):
        comps = tuple(RationalFunction._coerce(c) for c in components)
        if not comps:
            raise InputError("a graded vector needs at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def k(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def delta(self) -> float | int:
        """max_j deg of the components; -inf on the zero vector."""
        return max(deg(c) for c in self.components)

    def __add__(self, other):
        self._match(other)
        return GradedVector(
            [a + b for a, b in zip(self.components, other.components)]
        )

    def __sub__(self, other):
        self._match(other)
        return GradedVector(
            [a - b for a, b in zip(self.components, other.components)]
        )

    def scale(self, r) -> "GradedVector":
        r = RationalFunction._coerce(r)
        return GradedVector([r * c for c in self.components])

    def apply_poly(self, p: Poly) -> "GradedVector":
        """p(M) x where M is componentwise multiplication by the argument."""
        return self.scale(RationalFunction(p))

    def _match(self, other):
        if self.k != other.k:
            raise InputError("component count mismatch")

    def __eq__(self, other):
        return isinstance(other, GradedVector) and self.components == other.components

    def __hash__(self):
        return hash(self.components)


def _common_denominator(vectors) -> Poly:
    den = Poly.one()
    for v in vectors:
        for c in v.components:
            g = den.gcd(c.den)
            den = den * (c.den // g)
    return den


def _poly_rows(vectors):
    """Clear denominators: each vector becomes a k-tuple of polynomials.

    Multiplying the whole family by one common denominator D maps the span
    bijectively and shifts every delta by deg D, which cancels out of
    Delta+ - Delta-.
    """
    vectors = list(vectors)
    if not vectors:
        raise InputError("no vectors")
    k = vectors[0].k
    if any(v.k != k for v in vectors):
        raise InputError("component count mismatch")
    den = _common_denominator(vectors)
    rows = []
    for v in vectors:
        rows.append(tuple((c.num * (den // c.den)) for c in v.components))
    return rows, den


def _coefficient_matrix(rows, max_deg: int):
    """Coefficient matrix over monomials z^d e_j ordered by degree descending."""
    k = len(rows[0])
    cols = [(d, j) for d in range(max_deg, -1, -1) for j in range(k)]
    data = []
    for row in rows:
        entries = []
        for d, j in cols:
            p = row[j]
            c = p.coeffs[d] if d <= p.degree else Fraction(0)
            entries.append(c)
        data.append(entries)
    return RationalMatrix(data), cols


def t_independent(vectors):
    """Independence over polynomials in the multiplication operator.

    In the multiplication model this is linear independence over the
    rational-function field; when it fails, a polynomial relation with
    cleared denominators is returned: coefficients (p_1..p_m) with
    sum p_j(M) x_j = 0 and not all p_j zero.
    """
    vectors = [v if isinstance(v, GradedVector) else GradedVector(v) for v in vectors]
    rows, _ = _poly_rows(vectors)
    max_deg = max((p.degree for row in rows for p in row if not p.is_zero()), default=0)
    if max_deg == NEG_INF:
        # all vectors are zero: the relation 1 * x_1 = 0 witnesses dependence
        witness = [Poly.one()] + [Poly.zero()] * (len(vectors) - 1)
        return False, witness

    # Over the function field, dependence of m vectors shows up as a
    # polynomial syzygy; search by bounding the coefficient degree.  The
    # rank over Q(z) equals the rank of the polynomial matrix, so a
    # dependence exists iff rank < m; Cramer-style minors bound the witness
    # degree by m * max_deg.
    m = len(vectors)
    rank = _function_field_rank(rows)
    if rank == m:
        return True, None
    bound = m * int(max_deg) + 1
    witness = _polynomial_syzygy(rows, bound)
    if witness is None:  # pragma: no cover - the bound above suffices
        raise DomainError("failed to certify dependence")
    return False, witness


def _function_field_rank(rows) -> int:
    """Rank over Q(z) by Gaussian elimination on rational functions."""
    mat = [[RationalFunction(p) for p in row] for row in rows]
    nrows, ncols = len(mat), len(mat[0])
    rank = 0
    used = [False] * nrows
    for c in range(ncols):
        piv = None
        for r in range(nrows):
            if not used[r] and not mat[r][c].is_zero():
                piv = r
                break
        if piv is None:
            continue
        used[piv] = True
        rank += 1
        inv = RationalFunction.one() / mat[piv][c]
        mat[piv] = [inv * x for x in mat[piv]]
        for r in range(nrows):
            if r != piv and not mat[r][c].is_zero():
                f = mat[r][c]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[piv])]
    return rank


def _polynomial_syzygy(rows, degree_bound: int):
    """Polynomials (q_1..q_m), not all zero, with sum q_i row_i = 0."""
    m = len(rows)
    k = len(rows[0])
    max_deg = max(
        (int(p.degree) for row in rows for p in row if not p.is_zero()), default=0
    )
    total_deg = max_deg + degree_bound
    # unknowns: coefficients c_{i,d} of q_i, d < degree_bound
    cols = []
    for i in range(m):
        for d in range(degree_bound):
            cols.append((i, d))
    data = []
    for j in range(k):
        for out_d in range(total_deg + 1):
            row = []
            for i, d in cols:
                p = rows[i][j]
                c = p.coeffs[out_d - d] if 0 <= out_d - d <= p.degree else Fraction(0)
                row.append(c)
            data.append(row)
    null = RationalMatrix(data).nullspace()
    if not null:
        return None
    sol = null[0]
    witness = []
    for i in range(m):
        coeffs = [sol[i * degree_bound + d] for d in range(degree_bound)]
        witness.append(Poly(coeffs))
    return witness


@dataclass(frozen=True)
class DegreeBoundReport:
    delta_plus: int
    delta_minus: int
    n0: int
    verified_degrees: tuple
    counterexample_degree: int | None
    counterexample: GradedVector | None


def n0_bound(generators, probe_extra: int = 3) -> DegreeBoundReport:
    """Delta+, Delta- and n0 = Delta+ - Delta- + 1 for the span of the input.

    Delta- collapses to finitely many leading-coefficient cancellations via
    a degree filtration: row-reduce the coefficient matrix ordered by degree
    descending; every achievable delta is the degree of some pivot row.
    The verification checks z^d L ∩ L = {0} exactly for
    n0 <= d <= n0 + probe_extra and probes d = n0 - 1 for a counterexample.
    """
    vectors = [
        v if isinstance(v, GradedVector) else GradedVector(v) for v in generators
    ]
    vectors = [v for v in vectors if not v.is_zero()]
    if not vectors:
        raise DomainError("L = {0} has no degree bound")
    rows, den = _poly_rows(vectors)
    den_deg = den.degree
    max_deg = max(int(p.degree) for row in rows for p in row if not p.is_zero())
    mat, cols = _coefficient_matrix(rows, max_deg)
    red, pivots = mat.rref()
    # delta of each reduced row = degree of its leading (pivot) monomial
    deltas = [cols[pc][0] for pc in pivots]
    delta_plus = max(deltas) - den_deg
    delta_minus = min(deltas) - den_deg
    n0 = int(delta_plus - delta_minus + 1)

    basis_rows = [
        _row_to_vector(red.data[r], cols, len(rows[0])) for r in range(len(pivots))
    ]
    verified = []
    for d in range(n0, n0 + probe_extra + 1):
        if _monomial_intersection(basis_rows, d):
            raise DomainError(f"n0 verification failed: z^{d} L ∩ L is nonzero")
        verified.append(d)
    counter = None
    if n0 >= 2:
        counter = _monomial_intersection(basis_rows, n0 - 1)
        if counter is not None:
            counter = counter.scale(RationalFunction(Poly.one(), den))
    return DegreeBoundReport(
        int(delta_plus),
        int(delta_minus),
        n0,
        tuple(verified),
        (n0 - 1) if counter is not None else None,
        counter,
    )


def _row_to_vector(entries, cols, k) -> GradedVector:
    max_d = max(d for d, _ in cols)
    comp_coeffs = [[Fraction(0)] * (max_d + 1) for _ in range(k)]
    for (d, j), c in zip(cols, entries):
        comp_coeffs[j][d] = c
    return GradedVector([RationalFunction(Poly(cc)) for cc in comp_coeffs])


def _monomial_intersection(basis, d: int):
    """A nonzero element of z^d L ∩ L (as an element of L), or None.

    Both spans consist of polynomial vectors; intersect their Q-spans by a
    null-space computation on stacked coefficient matrices.
    """
    shifted = [v.apply_poly(Poly.monomial(d)) for v in basis]
    k = basis[0].k
    all_vecs = shifted + list(basis)
    rows = []
    max_deg = 0
    for v in all_vecs:
        for c in v.components:
            if not c.num.is_zero():
                max_deg = max(max_deg, int(c.num.degree))
    for v in all_vecs:
        entries = []
        for j in range(k):
            p = v.components[j].num  # denominators are 1 here
            for dd in range(max_deg + 1):
                entries.append(p.coeffs[dd] if dd <= p.degree else Fraction(0))
        rows.append(entries)
    # columns of the transposed system are the vectors; null vectors mix
    # shifted and unshifted generators to zero, i.e. give intersections
    mat = RationalMatrix(rows).transpose()
    for null_vec in mat.nullspace():
        head = null_vec[: len(shifted)]
        if any(c != 0 for c in head):
            out = None
            for c, v in zip(head, shifted):
                if c == 0:
                    continue
                term = v.scale(RationalFunction(Poly([c])))
                out = term if out is None else out + term
            if out is not None and not out.is_zero():
                return out
    return None


def monomial_intersection(generators, d: int):
    """A nonzero element of z^d L ∩ L for L = span(generators), or None.

    Exact: reduces to a rational null-space computation after clearing the
    common denominator (which rescales both sides identically).
    """
    vectors = [
        v if isinstance(v, GradedVector) else GradedVector(v) for v in generators
    ]
    vectors = [v for v in vectors if not v.is_zero()]
    if not vectors:
        raise DomainError("L = {0}")
    rows, den = _poly_rows(vectors)
    max_deg = max(int(p.degree) for row in rows for p in row if not p.is_zero())
    mat, cols = _coefficient_matrix(rows, max_deg)
    red, pivots = mat.rref()
    basis_rows = [
        _row_to_vector(red.data[r], cols, len(rows[0])) for r in range(len(pivots))
    ]
    out = _monomial_intersection(basis_rows, d)
    if out is None:
        return None
    return out.scale(RationalFunction(Poly.one(), den))


def membership_witness(x: GradedVector, y: GradedVector):
    """Decide y ∈ F(M, x): is y a rational-function multiple of x?

    Returns the reduced witness (p, q) with p(M) y = q(M) x componentwise
    (the ratio r = q/p), or None when no consistent ratio exists.
    """
    if x.is_zero():
        raise InputError("x must be nonzero")
    if x.k != y.k:
        raise InputError("component count mismatch")
    ratio = None
    for cx, cy in zip(x.components, y.components):
        if cx.is_zero():
            if not cy.is_zero():
                return None
            continue
        r = cy / cx
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    if ratio is None:  # unreachable: x nonzero has a nonzero component
        raise DomainError("no defining component")
    return ratio.den, ratio.num


def f_t_x_ratio(x: GradedVector, y: GradedVector) -> RationalFunction | None:
    """The linear ratio map y -> r_{x,y}, or None if y is outside F(M, x)."""
    w = membership_witness(x, y)
    if w is None:
        return None
    p, q = w
    return RationalFunction(q, p)


def random_rational_function(rng, max_deg: int = 4, max_coef: int = 9) -> RationalFunction:
    num = Poly([int(rng.integers(-max_coef, max_coef + 1)) for _ in range(max_deg + 1)])
    den = Poly()
    while den.is_zero():
        den = Poly([int(rng.integers(-max_coef, max_coef + 1)) for _ in range(max_deg + 1)])
    if num.is_zero():
        num = Poly.one()
    return RationalFunction(num, den)


def random_graded_vector(rng, k: int = 2, max_deg: int = 3) -> GradedVector:
    comps = [random_rational_function(rng, max_deg) for _ in range(k)]
    return GradedVector(comps)
