"""Shared helpers for the test suite: seeded corpora and brute-force oracles."""

from __future__ import annotations

from math import comb

from limitseries.localring import Element, FamilyIdeal, MonomialSpace, RingContext
from limitseries.staircase import Staircase, make_staircase

SECOND_PRIME = 2**31 - 1


def monomial_span(E: Staircase, ctx: RingContext) -> MonomialSpace:
    """Span of the monomial ideal I^E inside the context."""
    gens = tuple(Element(ctx, {(tuple(c), 0): 1})
                 for c in E.complement_generators())
    return FamilyIdeal(ctx, gens, "derived").span()


def random_staircase(rng, max_cells=20, max_height=8) -> Staircase:
    heights = []
    h = rng.randint(1, max_height)
    total = 0
    while h > 0 and total + h <= max_cells:
        heights.append(h)
        total += h
        if rng.random() < 0.25:
            break
        h = rng.randint(0, h)
    return make_staircase(heights if heights else [1])


def random_levels(rng, E, v, r):
    """Strictly decreasing levels obeying the gap rule, avoiding every
    boundary value v*h; None if no sequence was found."""
    hmax = E.max_height
    forbidden = {v * h for h in set(E.heights.values())}
    for _ in range(300):
        n = rng.randint(1, v * hmax + v)
        ns = [n]
        for _ in range(r - 1):
            ns.append(ns[-1] + v + rng.randint(0, 2))
        ns = list(reversed(ns))
        if not any(x in forbidden for x in ns):
            return ns
    return None


def chain_corpus(seed, count, speeds=(1, 2, 3), depths=(1, 2, 3),
                 max_cells=20):
    import random
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        E = random_staircase(rng, max_cells=max_cells)
        v = rng.choice(list(speeds))
        r = rng.choice(list(depths))
        ns = random_levels(rng, E, v, r)
        if ns is None:
            continue
        out.append((E, v, ns))
    return out


def partitions_up_to(nmax):
    """All non-increasing positive integer tuples with sum <= nmax."""
    out = [()]

    def rec(prefix, remaining, bound):
        for part in range(min(remaining, bound), 0, -1):
            cur = prefix + (part,)
            out.append(cur)
            rec(cur, remaining - part, part)

    rec((), nmax, nmax)
    return out


def staircases_up_to(degree):
    return [make_staircase(list(p)) for p in partitions_up_to(degree)]


def collision_limit_oracle(E: Staircase, F: Staircase, p):
    """Flat-limit oracle for the collision of I^E with the x_2-translate
    of I^F: computes lim_{t->0} of the intersection ideal by exact linear
    algebra, one x_1-degree at a time (both ideals are x_1-graded, so the
    intersection and its limit split along that grading).

    Returns the row-length vector of the limit if it is a monomial ideal
    with initial-segment rows, else None.
    """
    from limitseries.linalg import kernel_over_fpt
    from limitseries.localring import flat_limit

    re = E.row_lengths()
    rf = F.row_lengths()
    depth = max(len(re), len(rf))
    rows_out = []
    for a in range(depth):
        rea = re[a] if a < len(re) else 0
        rfa = rf[a] if a < len(rf) else 0
        B = rea + rfa + 2
        # the intersection piece: combinations of (y-t)^c, rfa <= c <= B,
        # whose y^b coefficients vanish for b < rea
        cond = []
        for b in range(rea):
            row = []
            for c in range(rfa, B + 1):
                if c >= b:
                    val = comb(c, b) * (-1) ** (c - b) % p
                    row.append([0] * (c - b) + [val])
                else:
                    row.append([])
            cond.append(row)
        lams = kernel_over_fpt(cond, B - rfa + 1, p)
        ctx = RingContext(dim=1, prime=p, t_trunc=None, x_cap=B)
        family = []
        for lam in lams:
            terms: dict = {}
            for ci, poly in enumerate(lam):
                c = rfa + ci
                if not poly:
                    continue
                for j in range(c + 1):
                    base = comb(c, j) * (-1) ** (c - j) % p
                    if not base:
                        continue
                    for e, coeff in enumerate(poly):
                        if coeff:
                            key = ((j,), e + c - j)
                            terms[key] = (terms.get(key, 0)
                                          + base * coeff) % p
            family.append(Element(ctx, terms))
        limit = flat_limit(family, ctx)
        dim = limit.dimension()
        b0 = B + 1 - dim
        expected = MonomialSpace.from_elements(
            ctx.with_t(1),
            [Element(ctx.with_t(1), {((b,), 0): 1}) for b in range(b0, B + 1)])
        if limit != expected:
            return None
        rows_out.append(b0)
    while rows_out and rows_out[-1] == 0:
        rows_out.pop()
    return rows_out
