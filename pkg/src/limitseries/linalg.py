"""Exact linear algebra over a prime field F_p and over F_p[t].

No floating point anywhere.  Matrices over F_p are lists of equal-length
lists of ints in [0, p).  Polynomials in t over F_p are little-endian
coefficient lists with no trailing zeros ([] is the zero polynomial).
"""

from __future__ import annotations

from .errors import PrimeTooSmall

DEFAULT_PRIME = 2**61 - 1

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise PrimeTooSmall(f"{p} is not prime")
    return p


# ---------------------------------------------------------------------------
# dense matrices over F_p
# ---------------------------------------------------------------------------

def rref_mod_p(rows, p):
    """Reduced row echelon form over F_p.

    Returns (rref_rows, pivot_columns); input is not mutated.  The RREF of a
    span is unique, so equality of spans is equality of these outputs.
    """
    rows = [[v % p for v in row] for row in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], -1, p)
        prow = [v * inv % p for v in rows[r]]
        rows[r] = prow
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return [row for row in rows[:r]], pivots


def rank_mod_p(rows, p) -> int:
    """Rank over F_p by plain Gaussian elimination (no normalization)."""
    rows = [[v % p for v in row] for row in rows if any(v % p for v in row)]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        inv = pow(prow[col], -1, p)
        for i in range(rank + 1, len(rows)):
            f = rows[i][col]
            if f:
                f = f * inv % p
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def kernel_mod_p(rows, ncols, p):
    """Basis of the right kernel of the matrix over F_p."""
    rref, pivots = rref_mod_p(rows, p)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for r, col in enumerate(pivots):
            vec[col] = (-rref[r][free]) % p
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# polynomials in t over F_p (little-endian int lists, no trailing zeros)
# ---------------------------------------------------------------------------

def pnorm(c, p):
    c = [v % p for v in c]
    while c and c[-1] == 0:
        c.pop()
    return c


def padd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def psub(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] = v
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def pscale(a, s, p):
    s %= p
    if s == 0:
        return []
    return pnorm([v * s for v in a], p)


def pmul(a, b, p, trunc=None):
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if trunc is not None:
        n = min(n, trunc)
    out = [0] * n
    for i, av in enumerate(a):
        if av == 0 or i >= n:
            continue
        for j, bv in enumerate(b):
            k = i + j
            if k >= n:
                break
            out[k] = (out[k] + av * bv) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def pshift(a, k):
    """Multiply by t^k."""
    if not a:
        return []
    return [0] * k + list(a)


def ptrunc(a, n):
    out = list(a[:n])
    while out and out[-1] == 0:
        out.pop()
    return out


def pval(a):
    """t-adic valuation; None for the zero polynomial."""
    for i, v in enumerate(a):
        if v:
            return i
    return None


def pdiv_t(a, k):
    """Exact division by t^k (caller guarantees valuation >= k)."""
    return list(a[k:])


def peval0(a):
    return a[0] if a else 0


def pinv_mod_tn(a, n, p):
    """Inverse of a unit (a[0] != 0) modulo t^n, by linear recurrence."""
    inv0 = pow(a[0], -1, p)
    out = [0] * n
    out[0] = inv0
    for k in range(1, n):
        acc = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * out[k - j]
        out[k] = (-acc % p) * inv0 % p
    while out and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# matrices over F_p[t]: fraction-free elimination and kernels over F_p(t)
# ---------------------------------------------------------------------------

def _row_normalize_t(row, p):
    """Divide a polynomial row by the common power of t (content in t)."""
    vals = [pval(c) for c in row if c]
    if not vals:
        return row
    k = min(vals)
    if k == 0:
        return row
    return [pdiv_t(c, k) if c else c for c in row]


def rank_over_fpt(rows, p) -> int:
    """Rank over the fraction field F_p(t) (fraction-free elimination)."""
    rows = [[pnorm(list(c), p) for c in row] for row in rows]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        pc = prow[col]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col]
            if f:
                rows[i] = [psub(pmul(pc, c, p), pmul(f, d, p), p)
                           for c, d in zip(rows[i], prow)]
                rows[i] = _row_normalize_t(rows[i], p)
        rank += 1
        if rank == len(rows):
            break
    return rank


def kernel_over_fpt(rows, ncols, p):
    """Basis of the right kernel over F_p(t), cleared to F_p[t] entries.

    Entries of the returned vectors are polynomials in t; each vector is
    normalized by its t-content so that some entry is a unit at t=0.
    """
    rows = [[pnorm(list(c), p) for c in row] for row in rows]
    rows = [r for r in rows if any(r)]
    work = []
    pivots = []  # (work_row_index, column)
    used = set()
    for row in rows:
        row = list(row)
        # eliminate existing pivots from the row
        for ri, col in pivots:
            if row[col]:
                pc = work[ri][col]
                f = row[col]
                row = [psub(pmul(pc, c, p), pmul(f, d, p), p)
                       for c, d in zip(row, work[ri])]
                row = _row_normalize_t(row, p)
        # find a fresh pivot
        piv = None
        for col in range(ncols):
            if col not in used and row[col]:
                piv = col
                break
        if piv is None:
            continue
        work.append(row)
        pivots.append((len(work) - 1, piv))
        used.add(piv)
    basis = []
    for free in range(ncols):
        if free in used:
            continue
        vec = [[] for _ in range(ncols)]
        vec[free] = [1]
        # back-substitute in reverse pivot order, clearing denominators
        for ri, col in reversed(pivots):
            row = work[ri]
            acc = []
            for j in range(ncols):
                if j != col and vec[j] and row[j]:
                    acc = padd(acc, pmul(row[j], vec[j], p), p)
            if not acc:
                continue
            pc = row[col]
            vec = [pmul(pc, c, p) if j != col else c
                   for j, c in enumerate(vec)]
            vec[col] = pscale(acc, p - 1, p)
        vec = _row_normalize_t(vec, p)
        basis.append(vec)
    return basis
