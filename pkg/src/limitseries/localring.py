"""Exact computation in truncated rings F_p[x_1..x_d] (x) F_p[t]/(t^n).

Everything is tracked up to a total x-degree cap.  Translated monomial
ideals, the alternating truncate / colon-by-x_1 chains, their closed-form
generators, special fibers at t=0 and t-adic flat limits all live here.

All ideals and modules in the chain are graded by the x_2..x_d exponent
(truncation and colon-by-x_1 both preserve that multidegree), so spans are
stored column by column: one canonical Howell-form module over F_p[t]/(t^n)
in the x_1 coordinates per x_2..x_d exponent.  Spaces that are not graded
(flat limits, condition kernels) use a plain reduced echelon form instead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from itertools import product
from math import comb

from .errors import (BoundaryWarning, CapExceeded, CapExhausted,
                     DivisionWitnessFailure, InvalidSequence,
                     InvalidTruncation, PrecisionExceeded, PrimeTooSmall,
                     ResourceLimit)
from .linalg import DEFAULT_PRIME, is_prime
from .staircase import Staircase

# ---------------------------------------------------------------------------
# contexts and elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingContext:
    """Ambient data: dimension, prime, t-truncation and x-degree cap.

    ``t_trunc=None`` means untruncated working precision (exact polynomials
    in t).  The prime must exceed the x-cap so binomial coefficients of all
    tracked degrees stay invertible.
    """

    dim: int
    prime: int = DEFAULT_PRIME
    t_trunc: int | None = None
    x_cap: int = 12

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.x_cap < 0:
            raise ValueError("x_cap must be >= 0")
        if self.t_trunc is not None and self.t_trunc < 1:
            raise ValueError("t_trunc must be >= 1 or None")
        if not is_prime(self.prime):
            raise PrimeTooSmall(f"{self.prime} is not prime")
        if self.prime <= self.x_cap:
            raise PrimeTooSmall(
                f"prime {self.prime} must exceed the x-degree cap {self.x_cap}")

    def with_t(self, n):
        return replace(self, t_trunc=n)

    def with_cap(self, cap):
        return replace(self, x_cap=cap)

    def compatible(self, other: "RingContext") -> bool:
        return self.dim == other.dim and self.prime == other.prime


class Element:
    """A finite sum of monomials x^a t^b with F_p coefficients."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: RingContext, terms: dict):
        p = ctx.prime
        clean = {}
        for (a, b), c in terms.items():
            a = tuple(int(x) for x in a)
            if len(a) != ctx.dim:
                raise ValueError(f"exponent {a} has wrong arity for dim {ctx.dim}")
            if ctx.t_trunc is not None and b >= ctx.t_trunc:
                continue
            c %= p
            if c:
                clean[(a, int(b))] = c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def monomial(cls, ctx, xexps, texp=0, coeff=1):
        return cls(ctx, {(tuple(xexps), texp): coeff})

    @classmethod
    def one(cls, ctx):
        return cls.monomial(ctx, (0,) * ctx.dim)

    # -- arithmetic ---------------------------------------------------------

    def _require_same(self, other):
        if not self.ctx.compatible(other.ctx) or self.ctx.t_trunc != other.ctx.t_trunc:
            raise ValueError("elements live in different contexts")

    def __add__(self, other):
        self._require_same(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return Element(self.ctx, terms)

    def __neg__(self):
        return Element(self.ctx, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return Element(self.ctx, {k: c * s for k, c in self.terms.items()})

    def __mul__(self, other):
        self._require_same(other)
        n = self.ctx.t_trunc
        terms: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                b = b1 + b2
                if n is not None and b >= n:
                    continue
                key = (tuple(x + y for x, y in zip(a1, a2)), b)
                terms[key] = terms.get(key, 0) + c1 * c2
        return Element(self.ctx, terms)

    # -- queries / conversions ------------------------------------------------

    @property
    def is_zero(self):
        return not self.terms

    def x_degree(self):
        return max((sum(a) for (a, _b) in self.terms), default=-1)

    def truncate_t(self, n_to):
        cur = self.ctx.t_trunc
        if cur is not None and n_to > cur:
            raise InvalidTruncation(f"cannot truncate from t^{cur} to t^{n_to}")
        return Element(self.ctx.with_t(n_to),
                       {k: c for k, c in self.terms.items() if k[1] < n_to})

    def subs_t0(self):
        return Element(self.ctx.with_t(1),
                       {k: c for k, c in self.terms.items() if k[1] == 0})

    def to_json(self):
        return [[list(a), b, c] for (a, b), c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, ctx, data):
        return cls(ctx, {(tuple(a), b): c for a, b, c in data})

    def __eq__(self, other):
        return (isinstance(other, Element) and self.terms == other.terms
                and self.ctx.t_trunc == other.ctx.t_trunc)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        p = self.ctx.prime
        bits = []
        for (a, b), c in sorted(self.terms.items()):
            if c > p // 2:
                sign, c = "-", p - c
            else:
                sign = "+"
            parts = [] if c == 1 else [str(c)]
            parts += [f"x{i+1}^{e}" if e > 1 else f"x{i+1}"
                      for i, e in enumerate(a) if e]
            if b:
                parts.append(f"t^{b}" if b > 1 else "t")
            if not parts:
                parts = [str(c)]
            bits.append(sign + "*".join(parts))
        out = " ".join(bits)
        return out[1:] if out.startswith("+") else out


# ---------------------------------------------------------------------------
# sparse polynomials in t (dict exponent -> coefficient) and Howell modules
# ---------------------------------------------------------------------------


def _sp_inv(u, n, p):
    """Inverse of a unit power series (u[0] != 0) modulo t^n."""
    inv0 = pow(u[0], -1, p)
    out = {0: inv0}
    supp = sorted(e for e in u if e > 0)
    for k in range(1, n):
        acc = 0
        for j in supp:
            if j > k:
                break
            v = out.get(k - j)
            if v:
                acc += u[j] * v
        if acc:
            out[k] = (-acc % p) * inv0 % p
    return {e: c for e, c in out.items() if c}


class TModule:
    """Canonical Howell-form module over F_p[t]/(t^n) in x_1 coordinates.

    Rows are flat dicts {(coord, t_exp): coeff}.  In canonical form every
    row's pivot (its lowest nonzero coordinate) carries the exact entry
    t^val, pivots are distinct and increasing, and entries of other rows at
    a pivot coordinate are reduced below that pivot's valuation.  The form
    is unique for a given module, so equality is row equality.
    """

    __slots__ = ("p", "n", "ncoords", "rows", "pivots", "vals")

    def __init__(self, p, n, ncoords, rows, pivots, vals):
        self.p = p
        self.n = n
        self.ncoords = ncoords
        self.rows = rows
        self.pivots = pivots
        self.vals = vals

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_rows(cls, p, n, ncoords, gen_rows):
        """Canonicalize arbitrary generating rows (Howell algorithm)."""
        slots: list = [None] * ncoords
        pending = []
        for row in gen_rows:
            r = {k: c % p for k, c in row.items()
                 if k[1] < n and k[0] < ncoords and c % p}
            if r:
                pending.append(r)

        def pivot_of(row):
            j = min(k[0] for k in row)
            e = min(k[1] for k in row if k[0] == j)
            return j, e

        def normalize(row, j, e):
            unit = {k[1] - e: c for k, c in row.items() if k[0] == j}
            if unit == {0: 1}:
                return row
            inv = _sp_inv(unit, n, p)
            out: dict = {}
            for (jj, te), c in row.items():
                for ie, ic in inv.items():
                    te2 = te + ie
                    if te2 >= n:
                        continue
                    k2 = (jj, te2)
                    v = (out.get(k2, 0) + c * ic) % p
                    if v:
                        out[k2] = v
                    elif k2 in out:
                        del out[k2]
            # coordinate j is exactly t^e now; enforce against roundoff of
            # the modular series inverse
            for k in [k for k in out if k[0] == j]:
                del out[k]
            out[(j, e)] = 1
            return out

        def subtract_shifted(row, other, shift, factor=1):
            for (jj, te), c in other.items():
                te2 = te + shift
                if te2 >= n:
                    continue
                k2 = (jj, te2)
                v = (row.get(k2, 0) - factor * c) % p
                if v:
                    row[k2] = v
                elif k2 in row:
                    del row[k2]
            return row

        def shadow(row, e):
            # t^(n-e) * row, nonzero tail of the annihilator multiple
            sh = {}
            for (jj, te), c in row.items():
                te2 = te + n - e
                if te2 < n:
                    sh[(jj, te2)] = c
            return sh

        while pending:
            row = pending.pop()
            if not row:
                continue
            j, e = pivot_of(row)
            row = normalize(row, j, e)
            cur = slots[j]
            if cur is None:
                slots[j] = row
                if e > 0:
                    sh = shadow(row, e)
                    if sh:
                        pending.append(sh)
                continue
            je, ee = pivot_of(cur)
            if e < ee:
                slots[j] = row
                if e > 0:
                    sh = shadow(row, e)
                    if sh:
                        pending.append(sh)
                row, e = cur, ee
            # slot pivot val <= e: cancel coordinate j of row exactly
            srow = slots[j]
            se = pivot_of(srow)[1]
            row = dict(row)
            row = subtract_shifted(row, srow, e - se)
            if row:
                pending.append(row)

        rows = [slots[j] for j in range(ncoords) if slots[j] is not None]
        pivots = []
        vals = []
        for r in rows:
            j, e = pivot_of(r)
            pivots.append(j)
            vals.append(e)
        # back-reduction: entries at later pivots reduced below their val
        for i, r in enumerate(rows):
            for s_idx in range(i + 1, len(rows)):
                js, es = pivots[s_idx], vals[s_idx]
                q = {te - es: c for (jj, te), c in r.items()
                     if jj == js and te >= es}
                if not q:
                    continue
                srow = rows[s_idx]
                for (jj, te), c in srow.items():
                    for qe, qc in q.items():
                        te2 = te + qe
                        if te2 >= n:
                            continue
                        k2 = (jj, te2)
                        v = (r.get(k2, 0) - c * qc) % p
                        if v:
                            r[k2] = v
                        elif k2 in r:
                            del r[k2]
        return cls(p, n, ncoords, rows, pivots, vals)

    @classmethod
    def full(cls, p, n, ncoords):
        rows = [{(j, 0): 1} for j in range(ncoords)]
        return cls(p, n, ncoords, rows, list(range(ncoords)), [0] * ncoords)

    @classmethod
    def zero(cls, p, n, ncoords):
        return cls(p, n, ncoords, [], [], [])

    # -- queries ---------------------------------------------------------------

    @property
    def is_full(self):
        return len(self.rows) == self.ncoords and all(v == 0 for v in self.vals)

    def dim_fp(self):
        return sum(self.n - v for v in self.vals)

    def key(self):
        return (self.n, self.ncoords,
                tuple(tuple(sorted(r.items())) for r in self.rows))

    def __eq__(self, other):
        return isinstance(other, TModule) and self.p == other.p and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def contains_vector(self, vec: dict) -> bool:
        p, n = self.p, self.n
        v = {k: c % p for k, c in vec.items() if c % p and k[1] < n}
        by_pivot = {j: i for i, j in enumerate(self.pivots)}
        for j in range(self.ncoords):
            entries = {te: c for (jj, te), c in v.items() if jj == j}
            if not entries:
                continue
            i = by_pivot.get(j)
            if i is None:
                return False
            e = self.vals[i]
            if min(entries) < e:
                return False
            q = {te - e: c for te, c in entries.items()}
            row = self.rows[i]
            for (jj, te), c in row.items():
                for qe, qc in q.items():
                    te2 = te + qe
                    if te2 >= n:
                        continue
                    k2 = (jj, te2)
                    nv = (v.get(k2, 0) - c * qc) % p
                    if nv:
                        v[k2] = nv
                    elif k2 in v:
                        del v[k2]
        return not v

    # -- operations --------------------------------------------------------------

    def truncate(self, n_to):
        if n_to > self.n:
            raise InvalidTruncation(f"cannot truncate from t^{self.n} to t^{n_to}")
        if n_to == self.n:
            return self
        if self.is_full:
            return TModule.full(self.p, n_to, self.ncoords)
        return TModule.from_rows(self.p, n_to, self.ncoords, self.rows)

    def colon(self):
        """{g : x_1 * g in M}, one coordinate fewer."""
        if self.ncoords == 0:
            raise CapExhausted("no x-degree headroom left")
        if self.is_full:
            return TModule.full(self.p, self.n, self.ncoords - 1)
        rows = []
        for r, j in zip(self.rows, self.pivots):
            if j >= 1:
                rows.append({(jj - 1, te): c for (jj, te), c in r.items()})
        return TModule.from_rows(self.p, self.n, self.ncoords - 1, rows)

    def fiber_rows(self):
        """t=0 images of the canonical rows, as dense F_p vectors."""
        out = []
        for r in self.rows:
            vec = [0] * self.ncoords
            for (jj, te), c in r.items():
                if te == 0:
                    vec[jj] = c
            if any(vec):
                out.append(vec)
        return out

    def expand_rows(self):
        """An F_p-basis of the module: t^b * row for 0 <= b < n - val."""
        out = []
        for r, v in zip(self.rows, self.vals):
            for b in range(self.n - v):
                row = {}
                for (jj, te), c in r.items():
                    if te + b < self.n:
                        row[(jj, te + b)] = c
                if row:
                    out.append(row)
        return out


# ---------------------------------------------------------------------------
# monomial order and sparse reduced echelon forms
# ---------------------------------------------------------------------------


def _order_key(key):
    """degrevlex on the x part, then ascending t (pivoting prefers small t)."""
    a, te = key
    return (sum(a), tuple(-x for x in reversed(a)), -te)


def _colon_order_key(key):
    """Same order, but x_1-free monomials dominate (colon pivot priority)."""
    a, _te = key
    return (1 if a[0] == 0 else 0,) + _order_key(key)


def _sparse_rref(rows_iter, p, order_key):
    pivots: dict = {}
    for row in rows_iter:
        row = {k: c % p for k, c in row.items() if c % p}
        while row:
            lead = max(row, key=order_key)
            if lead in pivots:
                c = row[lead]
                for k, v in pivots[lead].items():
                    nv = (row.get(k, 0) - c * v) % p
                    if nv:
                        row[k] = nv
                    elif k in row:
                        del row[k]
            else:
                inv = pow(row[lead], -1, p)
                pivots[lead] = {k: v * inv % p for k, v in row.items()}
                break
    # back-reduction, ascending so earlier rows are already reduced
    for lead in sorted(pivots, key=order_key):
        row = pivots[lead]
        while True:
            inner = [k for k in row if k != lead and k in pivots]
            if not inner:
                break
            k = max(inner, key=order_key)
            c = row[k]
            for kk, v in pivots[k].items():
                nv = (row.get(kk, 0) - c * v) % p
                if nv:
                    row[kk] = nv
                elif kk in row:
                    del row[kk]
    return pivots


# ---------------------------------------------------------------------------
# MonomialSpace
# ---------------------------------------------------------------------------


class MonomialSpace:
    """Reduced span of elements: canonical, hence directly comparable.

    Internally either a graded layout (one TModule per x_2..x_d exponent,
    used by everything chain-shaped) or a plain sparse reduced echelon form
    over the monomial basis.  Both are canonical for the span they hold.
    """

    __slots__ = ("ctx", "columns", "rows")

    def __init__(self, ctx, *, columns=None, rows=None):
        if (columns is None) == (rows is None):
            raise ValueError("exactly one layout required")
        self.ctx = ctx
        self.columns = columns
        self.rows = rows

    # -- constructors -----------------------------------------------------------

    @classmethod
    def from_elements(cls, ctx, elements):
        rows = []
        for el in elements:
            if isinstance(el, Element):
                rows.append(el.terms)
            else:
                rows.append(el)
        return cls(ctx, rows=_sparse_rref(rows, ctx.prime, _order_key))

    @classmethod
    def from_columns(cls, ctx, columns):
        return cls(ctx, columns=dict(columns))

    # -- basic queries ------------------------------------------------------------

    def dimension(self):
        if self.rows is not None:
            return len(self.rows)
        return sum(m.dim_fp() for m in self.columns.values())

    def contains(self, el) -> bool:
        terms = el.terms if isinstance(el, Element) else dict(el)
        p = self.ctx.prime
        if self.rows is not None:
            row = {k: c % p for k, c in terms.items() if c % p}
            while row:
                lead = max(row, key=_order_key)
                prow = self.rows.get(lead)
                if prow is None:
                    return False
                c = row[lead]
                for k, v in prow.items():
                    nv = (row.get(k, 0) - c * v) % p
                    if nv:
                        row[k] = nv
                    elif k in row:
                        del row[k]
            return True
        split: dict = {}
        for (a, te), c in terms.items():
            if c % p == 0:
                continue
            w = a[1:]
            split.setdefault(w, {})[(a[0], te)] = c
        for w, vec in split.items():
            mod = self.columns.get(w)
            if mod is None:
                raise CapExceeded(f"column {w} outside the tracked cap")
            if not mod.contains_vector(vec):
                return False
        return True

    def basis(self):
        """Basis as Elements (expands a graded layout)."""
        out = []
        if self.rows is not None:
            for lead in sorted(self.rows, key=_order_key, reverse=True):
                out.append(Element(self.ctx, self.rows[lead]))
            return out
        for w in sorted(self.columns):
            for row in self.columns[w].expand_rows():
                out.append(Element(
                    self.ctx, {((j,) + w, te): c for (j, te), c in row.items()}))
        return out

    def __eq__(self, other):
        if not isinstance(other, MonomialSpace):
            return NotImplemented
        if not self.ctx.compatible(other.ctx):
            return False
        if self.ctx.t_trunc != other.ctx.t_trunc:
            return False
        if self.columns is not None and other.columns is not None:
            keys = set(self.columns) | set(other.columns)
            for w in keys:
                a = self.columns.get(w)
                b = other.columns.get(w)
                if a is None or b is None:
                    if (a or b) and (a.rows if a else b.rows):
                        return False
                    continue
                if a != b:
                    return False
            return True
        if self.rows is not None and other.rows is not None:
            return self.rows == other.rows
        graded, plain = (self, other) if self.columns is not None else (other, self)
        if graded.dimension() != plain.dimension():
            return False
        try:
            return all(graded.contains(row) for row in plain.rows.values())
        except CapExceeded:
            return False

    def __hash__(self):
        raise TypeError("MonomialSpace is unhashable")

    # -- operations -----------------------------------------------------------------

    def truncate(self, n_to):
        cur = self.ctx.t_trunc
        if cur is not None and n_to > cur:
            raise InvalidTruncation(f"cannot truncate from t^{cur} to t^{n_to}")
        ctx = self.ctx.with_t(n_to)
        if self.columns is not None:
            return MonomialSpace.from_columns(
                ctx, {w: m.truncate(n_to) for w, m in self.columns.items()})
        rows = [{k: c for k, c in row.items() if k[1] < n_to}
                for row in self.rows.values()]
        return MonomialSpace(ctx, rows=_sparse_rref(rows, ctx.prime, _order_key))

    def colon_x1(self):
        """{f : x_1 f in span}; the x-cap drops by one."""
        if self.ctx.x_cap < 1:
            raise CapExhausted("x_cap already exhausted")
        ctx = self.ctx.with_cap(self.ctx.x_cap - 1)
        if self.columns is not None:
            cols = {}
            for w, m in self.columns.items():
                if m.ncoords <= 1:
                    continue
                cols[w] = m.colon()
            return MonomialSpace.from_columns(ctx, cols)
        reduced = _sparse_rref(
            [dict(r) for r in self.rows.values()], self.ctx.prime, _colon_order_key)
        kept = []
        for lead, row in reduced.items():
            if lead[0][0] >= 1:
                kept.append({((a[0] - 1,) + tuple(a[1:]), te): c
                             for (a, te), c in row.items()})
        return MonomialSpace(ctx, rows=_sparse_rref(kept, ctx.prime, _order_key))

    def special_fiber(self):
        """Image at t=0, a space over F_p[x]."""
        ctx = self.ctx.with_t(1)
        if self.columns is not None:
            cols = {}
            for w, m in self.columns.items():
                rows = [{(j, 0): c for j, c in enumerate(vec) if c}
                        for vec in m.fiber_rows()]
                cols[w] = TModule.from_rows(ctx.prime, 1, m.ncoords, rows)
            return MonomialSpace.from_columns(ctx, cols)
        rows = [{k: c for k, c in row.items() if k[1] == 0}
                for row in self.rows.values()]
        return MonomialSpace(ctx, rows=_sparse_rref(rows, ctx.prime, _order_key))

    def __repr__(self):
        kind = "graded" if self.columns is not None else "plain"
        return (f"MonomialSpace(dim={self.dimension()}, {kind}, "
                f"t<{self.ctx.t_trunc}, cap={self.ctx.x_cap})")


# ---------------------------------------------------------------------------
# family ideals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyIdeal:
    """Generators of an ideal (or explicit module) in a ring context."""

    ctx: RingContext
    generators: tuple
    provenance: str = "derived"

    def truncate(self, n_to):
        return FamilyIdeal(self.ctx.with_t(n_to),
                           tuple(g.truncate_t(n_to) for g in self.generators),
                           self.provenance)

    def span(self, cap=None) -> MonomialSpace:
        """Span of the ideal up to the x-cap (x- and t-monomial multiples)."""
        ctx = self.ctx
        cap = ctx.x_cap if cap is None else cap
        n = ctx.t_trunc
        if n is None:
            raise ValueError("ideal spans need a finite t-truncation")
        homog = []
        for g in self.generators:
            if g.is_zero:
                continue
            wset = {a[1:] for (a, _te) in g.terms}
            degs = {a[0] for (a, _te) in g.terms}
            if len(wset) != 1:
                homog = None
                break
            homog.append((next(iter(wset)), max(degs), g))
        if homog is None:
            raise ResourceLimit("span of non-graded generators is not supported")
        columns = {}
        for w in _exponents_upto(ctx.dim - 1, cap):
            ncoords = cap - sum(w) + 1
            rows = []
            for wg, xdeg, g in homog:
                if len(wg) != len(w) or any(a > b for a, b in zip(wg, w)):
                    continue
                base = {}
                for (a, te), c in g.terms.items():
                    if te < n:
                        base[(a[0], te)] = c
                for s in range(ncoords - xdeg):
                    rows.append({(j + s, te): c for (j, te), c in base.items()})
            columns[w] = TModule.from_rows(ctx.prime, n, ncoords, rows)
        return MonomialSpace.from_columns(ctx, columns)


def _exponents_upto(arity, total):
    if arity == 0:
        return [()]
    out = []
    for head in range(total + 1):
        for tail in _exponents_upto(arity - 1, total - head):
            out.append((head,) + tail)
    return sorted(out)


def translate_ideal(E: Staircase, v: int, ctx: RingContext) -> FamilyIdeal:
    """J(E, v): the ideal of the staircase translated by x_1 -> x_1 - t^v."""
    if v < 1:
        raise ValueError("speed v must be >= 1")
    if E.dim != ctx.dim:
        raise ValueError("staircase dimension does not match the context")
    gens = []
    for c in E.complement_generators():
        if sum(c) > ctx.x_cap:
            raise CapExceeded(
                f"generator x^{c} exceeds the x-degree cap {ctx.x_cap}")
        if ctx.t_trunc is not None and v * c[0] >= ctx.t_trunc and c[0] > 0:
            raise CapExceeded(
                f"generator x^{c} needs t-degree {v * c[0]} >= {ctx.t_trunc}")
        terms = {}
        c1 = c[0]
        for l in range(c1 + 1):
            coeff = comb(c1, l) * (-1) ** (c1 - l)
            terms[((l,) + tuple(c[1:]), v * (c1 - l))] = coeff
        gens.append(Element(ctx, terms))
    return FamilyIdeal(ctx, tuple(gens), "translated-staircase")


# ---------------------------------------------------------------------------
# residual chains
# ---------------------------------------------------------------------------


def _validate_levels(ns):
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise InvalidSequence(f"levels must be >= 1, got {ns}")
    if any(a <= b for a, b in zip(ns, ns[1:])):
        raise InvalidSequence(f"levels must strictly decrease, got {ns}")
    return ns


def chain_context(E: Staircase, v: int, ns, prime=DEFAULT_PRIME) -> RingContext:
    """Smallest context with enough x- and t-headroom for the chain."""
    ns = _validate_levels(ns) if ns else []
    k = len(ns)
    gens = E.complement_generators()
    gen_deg = max((sum(c) for c in gens), default=0)
    fit = max((h + sum(w) for w, h in E.heights.items()), default=0)
    cap = max(1, k + max(gen_deg, fit))
    n1 = ns[0] if ns else v * E.max_height + 1
    return RingContext(dim=E.dim, prime=prime, t_trunc=n1, x_cap=cap)


def boundary_columns(E: Staircase, v: int, ns):
    """Columns whose height hits a level exactly: n_j == v * h(w)."""
    hits = []
    for w, h in sorted(E.heights.items()):
        for n in ns:
            if n == v * h:
                hits.append((w, h, n))
    return hits


def _chain_columns(E, v, ns, ctx, final_colon):
    ns = _validate_levels(ns)
    k = len(ns)
    p, cap = ctx.prime, ctx.x_cap
    if ctx.t_trunc is not None and ctx.t_trunc < ns[0]:
        raise InvalidTruncation(
            f"context t-precision {ctx.t_trunc} below first level {ns[0]}")
    gens = E.complement_generators()
    need = k + max(max((sum(c) for c in gens), default=0),
                   max((h + sum(w) for w, h in E.heights.items()), default=0))
    if cap < need:
        raise CapExceeded(f"x_cap {cap} below needed headroom {need}")
    hits = boundary_columns(E, v, ns)
    if hits:
        warnings.warn(
            f"boundary levels {sorted({n for _w, _h, n in hits})} touch "
            f"v*h at columns {sorted({w for w, _h, _n in hits})}",
            BoundaryWarning, stacklevel=3)

    n1 = ns[0]
    columns = {}
    for w in _exponents_upto(E.dim - 1, cap):
        ncoords = cap - sum(w) + 1
        h = E.height(w)
        if h == 0:
            mod = TModule.full(p, n1, ncoords)
        else:
            base = {}
            for l in range(h + 1):
                te = v * (h - l)
                if te < n1:
                    base[(l, te)] = comb(h, l) * (-1) ** (h - l)
            rows = [{(j + s, te): c for (j, te), c in base.items()}
                    for s in range(ncoords - h)]
            mod = TModule.from_rows(p, n1, ncoords, rows)
        for idx, n in enumerate(ns):
            mod = mod.truncate(n)
            if idx < k - 1 or final_colon:
                if mod.ncoords == 0:
                    break  # column falls outside the final cap
                mod = mod.colon()
        columns[w] = mod
    colons = k if final_colon else k - 1
    ctx_out = ctx.with_t(ns[-1]).with_cap(cap - colons)
    columns = {w: m for w, m in columns.items() if m.ncoords > 0}
    return MonomialSpace.from_columns(ctx_out, columns)


def restriction_chain(E: Staircase, v: int, ns, ctx=None) -> MonomialSpace:
    """J_{n_1:...:n_k}: alternating truncations and colons, ending on a
    truncation (k restrictions, k-1 colons)."""
    if ctx is None:
        ctx = chain_context(E, v, ns)
    return _chain_columns(E, v, ns, ctx, final_colon=False)


def residual_chain(E: Staircase, v: int, ns, ctx=None) -> MonomialSpace:
    """J_{n_1:...:n_k:}: same chain with the final colon applied."""
    if ctx is None:
        ctx = chain_context(E, v, ns)
    return _chain_columns(E, v, ns, ctx, final_colon=True)


def truncate(obj, n_to):
    """psi_{n p}: drop all monomials with t-exponent >= n_to."""
    return obj.truncate(n_to)


def colon_x1(space: MonomialSpace) -> MonomialSpace:
    """(span : x_1), computed degreewise by exact linear algebra."""
    return space.colon_x1()


def special_fiber(obj) -> MonomialSpace:
    """Set t = 0."""
    if isinstance(obj, FamilyIdeal):
        fibers = [g.subs_t0() for g in obj.generators]
        fiber_ideal = FamilyIdeal(obj.ctx.with_t(1), tuple(fibers), obj.provenance)
        return fiber_ideal.span()
    return obj.special_fiber()


# ---------------------------------------------------------------------------
# closed-form residual generators
# ---------------------------------------------------------------------------


def closed_form_residual(E: Staircase, v: int, ns, ctx=None) -> FamilyIdeal:
    """Generators f_m and t^{alpha_{k-i+1}} f_m / x_1^i of the residual
    chain, by exact division in R_{n_k}.

    alpha_j = max(0, n_j - v*h(m)).  Division is witnessed: any low-order
    x_1 coefficient that fails to vanish raises DivisionWitnessFailure,
    which signals a level sequence that breaks the gap rule for this (E,v).
    """
    if ctx is None:
        ctx = chain_context(E, v, ns)
    ns = _validate_levels(ns) if ns else []
    k = len(ns)
    n_k = ns[-1] if ns else ctx.t_trunc
    if n_k is None:
        raise ValueError("closed form needs a finite t-truncation")
    ectx = ctx.with_t(n_k)
    p = ctx.prime
    gens = []
    for w in sorted(E.heights):
        h = E.heights[w]
        f_terms = {}
        for l in range(h + 1):
            te = v * (h - l)
            if te < n_k:
                f_terms[((l,) + w, te)] = comb(h, l) * (-1) ** (h - l)
        gens.append(Element(ectx, f_terms))
        for i in range(1, k + 1):
            alpha = max(0, ns[k - i] - v * h)
            num = {}
            for l in range(h + 1):
                te = alpha + v * (h - l)
                if te < n_k:
                    num[(l, te)] = comb(h, l) * (-1) ** (h - l) % p
            bad = [l for (l, _te) in num if l < i]
            if bad:
                raise DivisionWitnessFailure(
                    f"x_1^{min(bad)} coefficient of t^{alpha} f_{w} survives "
                    f"in R_{n_k}; levels {ns} are invalid for v={v}, h={h}")
            terms = {((l - i,) + w, te): c for (l, te), c in num.items()}
            gens.append(Element(ectx, terms))
    return FamilyIdeal(ectx, tuple(gens), "derived")


def closed_form_span(E: Staircase, v: int, ns, ctx=None) -> MonomialSpace:
    """Span of the closed form as an (x_1, t)-module, plus the untouched
    block of columns with height zero; directly comparable with
    residual_chain output."""
    if ctx is None:
        ctx = chain_context(E, v, ns)
    ideal = closed_form_residual(E, v, ns, ctx)
    ns = _validate_levels(ns) if ns else []
    k = len(ns)
    n_k = ns[-1] if ns else ctx.t_trunc
    p = ctx.prime
    cap = ctx.x_cap - k
    by_col: dict = {}
    for g in ideal.generators:
        wset = {a[1:] for (a, _te) in g.terms}
        if len(wset) != 1:
            continue  # zero generator fully truncated away
        w = next(iter(wset))
        by_col.setdefault(w, []).append(g)
    columns = {}
    for w in _exponents_upto(E.dim - 1, cap):
        ncoords = cap - sum(w) + 1
        if E.height(w) == 0:
            columns[w] = TModule.full(p, n_k, ncoords)
            continue
        rows = []
        for g in by_col.get(w, []):
            base = {(a[0], te): c for (a, te), c in g.terms.items()}
            xdeg = max((j for (j, _te) in base), default=0)
            for s in range(ncoords - xdeg):
                rows.append({(j + s, te): c for (j, te), c in base.items()})
        columns[w] = TModule.from_rows(p, n_k, ncoords, rows)
    out_ctx = ctx.with_t(n_k).with_cap(cap)
    return MonomialSpace.from_columns(out_ctx, columns)


# ---------------------------------------------------------------------------
# flat limits
# ---------------------------------------------------------------------------


def flat_limit(family, ctx: RingContext) -> MonomialSpace:
    """lim_{t->0} of the span of a family over F_p[t].

    Gaussian elimination with t-adic valuation pivoting: vectors are divided
    by their t-content, the t=0 layer is reduced, and cancellations are
    pushed to higher t-order until the t=0 parts are independent.  The output
    dimension equals the rank of the family over F_p(t).  With a finite
    t-truncation, eliminations that exhaust the precision raise
    PrecisionExceeded (the caller raises the working precision and retries).
    """
    p = ctx.prime
    T = ctx.t_trunc
    vectors = []
    for el in family:
        terms = el.terms if isinstance(el, Element) else dict(el)
        vec = {}
        for (a, te), c in terms.items():
            vec.setdefault(a, {})[te] = c % p
        vectors.append(vec)

    basis = []  # list of (pivot_monomial, t0_part, full_vector, shift)

    def t0_part(vec):
        return {a: poly[0] for a, poly in vec.items() if poly.get(0)}

    for vec in vectors:
        # with finite precision T, digits are reliable below t^(T - shift);
        # shift grows under division by t and combines by max when vectors mix
        shift = 0
        while True:
            vec = {a: {e: c for e, c in poly.items() if c}
                   for a, poly in vec.items()}
            vec = {a: poly for a, poly in vec.items() if poly}
            if not vec:
                # exact coefficients: the vector was dependent over F_p(t);
                # truncated ones: indistinguishable from valuation >= T
                if T is not None:
                    raise PrecisionExceeded(
                        f"vector vanished modulo t^{T - shift} during "
                        f"elimination (working precision {T})")
                break
            val = min(min(poly) for poly in vec.values())
            if val > 0:
                shift += val
                if T is not None and shift >= T:
                    raise PrecisionExceeded(
                        f"elimination needs t-degree >= {T}")
                vec = {a: {e - val: c for e, c in poly.items()}
                       for a, poly in vec.items()}
                if T is not None:
                    window = T - shift
                    vec = {a: {e: c for e, c in poly.items() if e < window}
                           for a, poly in vec.items()}
            head = t0_part(vec)
            for pivot, b0, bvec, bshift in basis:
                c = head.get(pivot)
                if not c:
                    continue
                shift = max(shift, bshift)
                for a, poly in bvec.items():
                    dst = vec.setdefault(a, {})
                    for e, bc in poly.items():
                        dst[e] = (dst.get(e, 0) - c * bc) % p
                head = t0_part(vec)
            if head:
                pivot = max(head, key=lambda a: _order_key((a, 0)))
                inv = pow(head[pivot], -1, p)
                vec = {a: {e: c * inv % p for e, c in poly.items()}
                       for a, poly in vec.items()}
                basis.append((pivot, t0_part(vec), vec, shift))
                break
            # t=0 layer cancelled; loop divides by t again

    limit_rows = [{(a, 0): c for a, c in b0.items()}
                  for _piv, b0, _v, _s in basis]
    out_ctx = ctx.with_t(1)
    return MonomialSpace(out_ctx, rows=_sparse_rref(limit_rows, p, _order_key))
