"""Randomized exact interpolation oracle over F_p.

Dimensions of plane-curve systems vanishing on unions of monomial schemes
at points are measured by the rank of a vanishing-conditions matrix: one
row per staircase cell, holding the Taylor coefficient functional of that
cell in the site's local frame.  Random positions with a large prime make
the maximal (generic) rank overwhelmingly likely, and the max over trials
is reported; special positions can only lower the rank (semicontinuity).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

from .errors import PrimeTooSmall, ResourceLimit
from .hilbert import ambient_sections, fat_point_degree, virtual_hilbert
from .linalg import DEFAULT_PRIME, rank_mod_p, require_prime
from .staircase import Staircase, regular

# refuse single condition matrices larger than this without force
DESK_MATRIX_BUDGET = 120_000


@dataclass(frozen=True)
class Site:
    """A punctual scheme site: position, local frame, staircase shape.

    position None means "generic": drawn from the seeded RNG per trial.
    frame None means the identity for fat points and a random invertible
    frame per trial for any other shape (generic embedding); an explicit
    frame is a 2x2 invertible matrix sending local to global coordinates.
    """

    shape: Staircase
    position: tuple | None = None
    frame: tuple | None = None

    def __post_init__(self):
        if self.shape.dim != 2:
            raise ValueError("interpolation sites are planar (d=2 shapes)")

    def is_fat_point(self) -> bool:
        m = self.shape.max_height
        return self.shape == regular(m)


@dataclass(frozen=True)
class SystemDescriptor:
    """A linear system: degree-d curves through the base sites."""

    degree: int
    base_sites: tuple = ()
    prime: int = DEFAULT_PRIME


def monomials_of_degree_at_most(d: int):
    """Column order for conditions matrices: (i, j) with i + j <= d."""
    return [(i, j) for s in range(d + 1) for i in range(s + 1)
            for j in (s - i,)]


def _frame_det(frame, p):
    (a, b), (c, d) = frame
    return (a * d - b * c) % p


def conditions_matrix(sites, d: int, p: int = DEFAULT_PRIME):
    """Vanishing conditions of the sites on degree-d curves.

    Rows: one per staircase cell over all sites (Taylor coefficient of the
    cell monomial in frame coordinates).  Columns: the (d+1)(d+2)/2 curve
    coefficients.  Entries are exact integers mod p.
    """
    require_prime(p)
    if p <= d:
        raise PrimeTooSmall(f"prime {p} must exceed the degree {d}")
    cols = monomials_of_degree_at_most(d)
    colindex = {mon: idx for idx, mon in enumerate(cols)}
    rows = []
    seen = set()
    for site in sites:
        if site.position is None:
            raise ValueError("site position must be materialized first")
        if site.position in seen:
            raise ValueError(f"duplicate site position {site.position}")
        seen.add(site.position)
        rows.extend(_site_rows(site, d, p, colindex))
    return rows


def _site_rows(site, d, p, colindex):
    px, py = (c % p for c in site.position)
    cells = site.shape.cells()
    if not cells:
        return []
    ncols = len(colindex)
    frame = site.frame
    if frame is None or frame == ((1, 0), (0, 1)):
        return _identity_frame_rows(px, py, cells, d, p, colindex, ncols)
    if _frame_det(frame, p) == 0:
        raise ValueError("site frame is not invertible")
    return _general_frame_rows(px, py, frame, cells, d, p, colindex, ncols)


def _identity_frame_rows(px, py, cells, d, p, colindex, ncols):
    # coefficient of u1^a u2^b in (px+u1)^i (py+u2)^j is
    # C(i,a) px^(i-a) C(j,b) py^(j-b)
    powx = [1] * (d + 1)
    powy = [1] * (d + 1)
    for i in range(1, d + 1):
        powx[i] = powx[i - 1] * px % p
        powy[i] = powy[i - 1] * py % p
    rows = []
    for (a, b) in cells:
        row = [0] * ncols
        for (i, j), idx in colindex.items():
            if i >= a and j >= b:
                row[idx] = (comb(i, a) * powx[i - a] % p) * \
                           (comb(j, b) * powy[j - b] % p) % p
        rows.append(row)
    return rows


def _general_frame_rows(px, py, frame, cells, d, p, colindex, ncols):
    # global coordinates as functions of the local ones:
    #   x = px + f00 u1 + f01 u2,  y = py + f10 u1 + f11 u2
    (f00, f01), (f10, f11) = frame
    maxdeg = max(a + b for a, b in cells)

    def truncated_mul(P, Q):
        out = {}
        for (a1, b1), c1 in P.items():
            for (a2, b2), c2 in Q.items():
                a, b = a1 + a2, b1 + b2
                if a + b > maxdeg:
                    continue
                key = (a, b)
                out[key] = (out.get(key, 0) + c1 * c2) % p
        return out

    X = {(0, 0): px % p, (1, 0): f00 % p, (0, 1): f01 % p}
    Y = {(0, 0): py % p, (1, 0): f10 % p, (0, 1): f11 % p}
    xpow = [{(0, 0): 1}]
    ypow = [{(0, 0): 1}]
    for _ in range(d):
        xpow.append(truncated_mul(xpow[-1], X))
        ypow.append(truncated_mul(ypow[-1], Y))
    rows = []
    for (a, b) in cells:
        row = [0] * ncols
        for (i, j), idx in colindex.items():
            acc = 0
            for (a1, b1), c1 in xpow[i].items():
                if a1 > a or b1 > b:
                    continue
                c2 = ypow[j].get((a - a1, b - b1))
                if c2:
                    acc += c1 * c2
            row[idx] = acc % p
        rows.append(row)
    return rows


def _materialize(sites, rng, p):
    """Fill in generic positions and frames for one trial."""
    taken = {s.position for s in sites if s.position is not None}
    out = []
    for site in sites:
        pos = site.position
        if pos is None:
            while True:
                pos = (rng.randrange(p), rng.randrange(p))
                if pos not in taken:
                    break
            taken.add(pos)
        frame = site.frame
        if frame is None and not site.is_fat_point():
            while True:
                frame = ((rng.randrange(p), rng.randrange(p)),
                         (rng.randrange(p), rng.randrange(p)))
                if _frame_det(frame, p) != 0:
                    break
        out.append(Site(site.shape, pos, frame))
    return out


def hilbert_function_of(sites, d: int, trials: int = 3, seed: int = 0,
                        p: int = DEFAULT_PRIME) -> int:
    """Generic rank of the vanishing conditions in degree d (the Hilbert
    function of the generic union with these shapes, with failure
    probability <= degree-bound/p per trial)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    best = 0
    for _ in range(trials):
        placed = _materialize(sites, rng, p)
        rows = conditions_matrix(placed, d, p)
        best = max(best, rank_mod_p(rows, p))
    return best


def system_dimension(sys: SystemDescriptor, extra_sites=(), trials: int = 3,
                     seed: int = 0) -> int:
    """dim of the subspace of degree-d curves through base and extra sites."""
    sites = tuple(sys.base_sites) + tuple(extra_sites)
    rank = hilbert_function_of(sites, sys.degree, trials, seed, sys.prime)
    return ambient_sections(sys.degree) - rank


@dataclass
class NagataReport:
    """Oracle-vs-formula table for k^2 fat points of multiplicity m."""

    k: int
    m: int
    d_max: int
    trials: int
    seed: int
    prime: int
    prime2: int | None
    rows: list = field(default_factory=list)
    passed: bool = False
    cross_check_agrees: bool | None = None

    def to_json(self) -> dict:
        return {
            "header": {
                "k": self.k, "m": self.m, "d_max": self.d_max,
                "trials": self.trials, "seed": self.seed,
                "prime": self.prime, "prime2": self.prime2,
            },
            "rows": self.rows,
            "pass": self.passed,
            "cross_check_agrees": self.cross_check_agrees,
        }

    def to_csv(self) -> str:
        lines = [f"# seed={self.seed} prime={self.prime}"
                 + (f" prime2={self.prime2}" if self.prime2 else ""),
                 "d,oracle,virtual,match"]
        for row in self.rows:
            lines.append(f"{row['d']},{row['oracle']},{row['virtual']},"
                         f"{str(row['match']).lower()}")
        return "\n".join(lines) + "\n"


def verify_nagata_theorem(k: int, m: int, d_max: int | None = None,
                          trials: int = 3, seed: int = 0,
                          prime: int = DEFAULT_PRIME,
                          prime2: int | None = None,
                          force: bool = False) -> NagataReport:
    """Compare the oracle with min((d+1)(d+2)/2, k^2 m(m+1)/2) for d <= d_max."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    if d_max is None:
        d_max = k * m + k
    deg_z = k * k * fat_point_degree(m)
    cost = deg_z * ambient_sections(d_max)
    if cost > DESK_MATRIX_BUDGET and not force:
        raise ResourceLimit(
            f"conditions matrix {deg_z} x {ambient_sections(d_max)} exceeds "
            f"the desk-scale budget; pass force=True to override")
    report = NagataReport(k, m, d_max, trials, seed, prime, prime2)
    tables = []
    for p in [prime] + ([prime2] if prime2 else []):
        require_prime(p)
        sites = [Site(regular(m)) for _ in range(k * k)]
        table = []
        for d in range(d_max + 1):
            oracle = hilbert_function_of(sites, d, trials, seed, p)
            virtual = virtual_hilbert(deg_z, d)
            table.append({"d": d, "oracle": oracle, "virtual": virtual,
                          "match": oracle == virtual})
        tables.append(table)
    report.rows = tables[0]
    report.passed = all(row["match"] for row in tables[0])
    if prime2:
        report.cross_check_agrees = (
            [r["oracle"] for r in tables[0]] == [r["oracle"] for r in tables[1]])
        report.passed = report.passed and report.cross_check_agrees \
            and all(row["match"] for row in tables[1])
    return report
