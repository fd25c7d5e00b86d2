"""Sparse multivariate polynomials over exact scalars.

Terms live in a dict mapping exponent tuples to coefficients; zero
coefficients are dropped eagerly so `not p.terms` is the zero test.
Coefficients only need +, *, unary - and truth testing, which keeps the
same code working over QQ, QQi and the sqrt(2) extension.
"""

from __future__ import annotations

import itertools

from .errors import MissingAssignment, NeedMoreSamples, NotPolynomialDeg2
from .scalars import QI0, QI1, QQi, scalar_conj


class PolyRing:
    """A polynomial ring fixed by an ordered tuple of variable names."""

    __slots__ = ("names", "index", "_zero_exp", "_vars")

    def __init__(self, names):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.index = {n: i for i, n in enumerate(self.names)}
        self._zero_exp = (0,) * len(self.names)
        self._vars = None

    @property
    def nvars(self):
        return len(self.names)

    def zero(self):
        return Poly(self, {})

    def one(self):
        return Poly(self, {self._zero_exp: QI1})

    def const(self, c):
        if not c:
            return Poly(self, {})
        return Poly(self, {self._zero_exp: c})

    def var(self, name):
        i = self.index[name]
        exp = list(self._zero_exp)
        exp[i] = 1
        return Poly(self, {tuple(exp): QI1})

    def gens(self):
        if self._vars is None:
            self._vars = tuple(self.var(n) for n in self.names)
        return self._vars

    def monomial(self, exps, coeff=QI1):
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise ValueError("exponent tuple has wrong length")
        if not coeff:
            return self.zero()
        return Poly(self, {exps: coeff})

    def monomials_up_to_degree(self, d):
        """All exponent tuples of total degree <= d, in a fixed sorted order."""
        out = []
        for total in range(d + 1):
            out.extend(_exps_of_degree(self.nvars, total))
        return sorted(out)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"PolyRing{self.names}"


def _exps_of_degree(nvars, total):
    if nvars == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _exps_of_degree(nvars - 1, total - head):
            yield (head,) + tail


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("mixed rings")
            out = dict(self.terms)
            for e, c in other.terms.items():
                acc = out.get(e)
                acc = c if acc is None else acc + c
                if acc:
                    out[e] = acc
                else:
                    out.pop(e, None)
            return Poly(self.ring, out)
        return self + self.ring.const(_as_coeff(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Poly):
            return self + (-other)
        return self + self.ring.const(-_as_coeff(other))

    def __rsub__(self, other):
        return (-self) + self.ring.const(_as_coeff(other))

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("mixed rings")
            out = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    c = c1 * c2
                    acc = out.get(e)
                    acc = c if acc is None else acc + c
                    if acc:
                        out[e] = acc
                    else:
                        out.pop(e, None)
            return Poly(self.ring, out)
        c = _as_coeff(other)
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {e: k * c for e, k in self.terms.items()})

    __rmul__ = __mul__

    # -- calculus ------------------------------------------------------------

    def diff(self, name):
        i = self.ring.index[name]
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if not k:
                continue
            e2 = list(e)
            e2[i] = k - 1
            out[tuple(e2)] = c * k
        return Poly(self.ring, out)

    # -- evaluation / substitution -------------------------------------------

    def eval_at(self, values):
        """Evaluate at a scalar point given as a sequence aligned with names."""
        if len(values) != self.ring.nvars:
            raise ValueError("point has wrong length")
        total = None
        for e, c in self.terms.items():
            v = c
            for x, k in zip(values, e):
                for _ in range(k):
                    v = v * x
            total = v if total is None else total + v
        return QI0 if total is None else total

    def substitute(self, mapping, target_ring):
        """Substitute polynomials for variables.

        Every variable actually occurring in self must be assigned, otherwise
        MissingAssignment is raised; variables of the target ring are not
        implicitly carried over.
        """
        imgs = {}
        for name in self.ring.names:
            if name in mapping:
                imgs[self.ring.index[name]] = mapping[name]
        out = target_ring.zero()
        pow_cache = {}
        for e, c in self.terms.items():
            piece = target_ring.const(c)
            for i, k in enumerate(e):
                if not k:
                    continue
                if i not in imgs:
                    raise MissingAssignment(
                        f"no substitution for variable {self.ring.names[i]!r}"
                    )
                key = (i, k)
                p = pow_cache.get(key)
                if p is None:
                    p = imgs[i]
                    for _ in range(k - 1):
                        p = p * imgs[i]
                    pow_cache[key] = p
                piece = piece * p
            out = out + piece
        return out

    def conj_swap(self, var_perm, target_ring=None):
        """Formal conjugate: conjugate coefficients, permute variables.

        var_perm maps source variable index -> target variable index.
        """
        ring = target_ring or self.ring
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    e2[var_perm[i]] += k
            out[tuple(e2)] = scalar_conj(c)
        return Poly(ring, out)

    # -- inspection ------------------------------------------------------------

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_zero(self):
        return not self.terms

    def coeff(self, exps):
        return self.terms.get(tuple(exps), QI0)

    def constant_term(self):
        return self.terms.get(self.ring._zero_exp, QI0)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if not self.terms:
            return not other
        ct = self.terms.get(self.ring._zero_exp)
        return len(self.terms) == 1 and ct is not None and ct == other

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items(), key=lambda t: t[0]))))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "*".join(
                f"{n}^{k}" if k > 1 else n
                for n, k in zip(self.ring.names, e)
                if k
            )
            bits.append(f"({c!r})" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def _as_coeff(x):
    if isinstance(x, QQi):
        return x
    return QQi(x) if not hasattr(x, "conj") else x


# --- degree-2 interpolation --------------------------------------------------


def interpolate_deg2(points, values, ring):
    """Fit the unique polynomial of degree <= 2 through exact samples.

    Raises NeedMoreSamples when the sample set does not pin the coefficients
    down, NotPolynomialDeg2 when no degree-2 polynomial matches.
    """
    [poly] = interpolate_deg2_many(points, [values], ring)
    return poly


def interpolate_deg2_many(points, value_columns, ring):
    """Shared-Vandermonde fit of several value columns at the same points."""
    from .linear import rref_dense

    monos = ring.monomials_up_to_degree(2)
    rows = []
    for pt in points:
        if len(pt) != ring.nvars:
            raise ValueError("sample point has wrong length")
        row = []
        for e in monos:
            v = QI1
            for x, k in zip(pt, e):
                for _ in range(k):
                    v = v * x
            row.append(v)
        rows.append(row)
    ncols = len(monos)
    aug = [list(r) + [col[i] for col in value_columns] for i, r in enumerate(rows)]
    pivots, reduced = rref_dense(aug, ncols)
    # inconsistent rows: zero left part, nonzero right part
    for r in reduced:
        if all(not r[j] for j in range(ncols)) and any(r[ncols:]):
            raise NotPolynomialDeg2("samples are not values of a degree-2 polynomial")
    if len(pivots) < ncols:
        raise NeedMoreSamples(
            f"rank {len(pivots)} < {ncols} coefficients; add sample points"
        )
    out = []
    for k in range(len(value_columns)):
        terms = {}
        for i, c in enumerate(pivots):
            v = reduced[i][ncols + k]
            if v:
                terms[monos[c]] = v
        out.append(Poly(ring, terms))
    return out


def random_point(ring, rng, num=4, den=3):
    from .scalars import qi_rand

    return tuple(qi_rand(rng, num, den) for _ in range(ring.nvars))


def pairs_up_to(n):
    return list(itertools.combinations_with_replacement(range(n), 2))
