"""Specialization plans and certificates for the divisor-collision method.

A plan moves a tuple of monomial schemes onto a divisor D (locally x_1 = 0)
at speeds t^{v_j} and restricts the family at levels n_1 > ... > n_r.  With
the gap condition n_i - n_{i+1} >= max(v_j) and the per-level transparency
hypothesis, the limit system is contained in the system cut out by r copies
of D plus the suppressed residual staircases.  This module builds the
arithmetic side (plans, degree tables, certificates) and, at desk scale,
verifies the limit inclusion directly through the flat-limit machinery.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

from .errors import (DomainError, HypothesisFailed, IdentityFailure,
                     OracleResourceLimit)
from .hilbert import (ambient_sections, bookkeeping_identity, critical_degree,
                      fat_point_degree)
from .interp import Site, conditions_matrix
from .linalg import (DEFAULT_PRIME, kernel_mod_p, kernel_over_fpt, rank_mod_p,
                     require_prime)
from .localring import Element, MonomialSpace, RingContext, flat_limit
from .staircase import Staircase, StaircaseTuple, regular, suppress_tuple

MAX_LIMIT_DEGREE = 6
MAX_SLIDING_SITES = 2


# ---------------------------------------------------------------------------
# plan and model types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecializationPlan:
    """Shapes, speeds and restriction levels; derived data is recomputed."""

    shapes: StaircaseTuple
    speeds: tuple
    levels: tuple
    divisor_marker: str = "D"

    def __post_init__(self):
        shapes = self.shapes if isinstance(self.shapes, StaircaseTuple) \
            else StaircaseTuple(self.shapes)
        object.__setattr__(self, "shapes", shapes)
        object.__setattr__(self, "speeds", tuple(int(v) for v in self.speeds))
        object.__setattr__(self, "levels", tuple(int(n) for n in self.levels))
        if len(self.speeds) != len(shapes):
            raise ValueError("one speed per shape required")
        if any(v < 1 for v in self.speeds):
            raise ValueError("speeds must be positive")

    @property
    def r(self) -> int:
        return len(self.levels)

    def t_vector(self, i: int):
        """t_i = (floor(n_i / v_1), ..., floor(n_i / v_s)), i is 1-based."""
        n = self.levels[i - 1]
        return tuple(n // v for v in self.speeds)

    def t_vectors(self):
        return [self.t_vector(i) for i in range(1, self.r + 1)]

    def slice_sizes(self, i: int):
        ts = self.t_vector(i)
        return tuple(E.slice_size(t) for E, t in zip(self.shapes, ts))

    def z_degree(self, i: int) -> int:
        return sum(self.slice_sizes(i))

    def residual_tuple(self) -> StaircaseTuple:
        """S(E, t_1, ..., t_r) by repeated slice suppression."""
        out = self.shapes
        for i in range(1, self.r + 1):
            out = suppress_tuple(out, self.t_vector(i))
        return out

    def algebraic_residual_tuple(self) -> StaircaseTuple:
        """Residual by the algebraic fiber rule h -> h - #{i : n_i <= v h}.

        Coincides with the combinatorial residual except at boundary
        columns (some n_i == v*h), where one more cell is suppressed.
        """
        out = []
        for E, v in zip(self.shapes, self.speeds):
            heights = {}
            for w, h in E.heights.items():
                heights[w] = h - sum(1 for n in self.levels if n <= v * h)
            out.append(Staircase(E.dim, heights))
        return StaircaseTuple(out)

    def to_json(self):
        return {
            "shapes": [E.to_json() for E in self.shapes],
            "speeds": list(self.speeds),
            "levels": list(self.levels),
            "divisor": self.divisor_marker,
        }


@dataclass(frozen=True)
class LineSystemModel:
    """Degree of the ambient system and, per level, the degree of the
    conditions already sitting on the divisor."""

    degree: int
    line_base_degrees: tuple
    ambient: str = "P2"

    def __post_init__(self):
        object.__setattr__(self, "line_base_degrees",
                           tuple(int(b) for b in self.line_base_degrees))
        if self.degree < 0 or any(b < 0 for b in self.line_base_degrees):
            raise ValueError("degrees must be nonnegative")

    def to_json(self):
        return {"degree": self.degree,
                "line_base_degrees": list(self.line_base_degrees),
                "ambient": self.ambient}


@dataclass(frozen=True)
class OracleScene:
    """Concrete desk-scale geometry: the divisor is the line x = 0;
    multiplicities of fat-point base conditions on and off it."""

    divisor_base: tuple = ()
    ambient_base: tuple = ()
    prime: int = DEFAULT_PRIME
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "divisor_base", tuple(self.divisor_base))
        object.__setattr__(self, "ambient_base", tuple(self.ambient_base))


@dataclass(frozen=True)
class Finding:
    code: str
    severity: str  # "error" | "warning" | "info"
    message: str
    data: dict = field(default_factory=dict)

    def to_json(self):
        return {"code": self.code, "severity": self.severity,
                "message": self.message, "data": self.data}


# ---------------------------------------------------------------------------
# plan validation and construction
# ---------------------------------------------------------------------------


def validate_plan(plan: SpecializationPlan):
    """Gap and boundary checks; returns findings (empty list = valid)."""
    findings = []
    ns = plan.levels
    if plan.r == 0:
        findings.append(Finding(
            "EmptyLevels", "info",
            "no levels: the inclusion is the trivial one (r = 0)"))
        return findings
    if any(n < 1 for n in ns):
        findings.append(Finding(
            "NonPositiveLevel", "error", f"levels must be >= 1, got {ns}"))
    if any(a <= b for a, b in zip(ns, ns[1:])):
        findings.append(Finding(
            "NonDecreasingLevels", "error",
            f"levels must strictly decrease, got {ns}"))
    vmax = max(plan.speeds)
    for a, b in zip(ns, ns[1:]):
        if a - b < vmax:
            findings.append(Finding(
                "GapViolation", "error",
                f"gap {a}-{b}={a - b} below max speed {vmax}",
                {"pair": [a, b], "max_speed": vmax}))
    for j, (E, v) in enumerate(zip(plan.shapes, plan.speeds)):
        for h in sorted(set(E.heights.values())):
            hits = [n for n in ns if n == v * h]
            if hits:
                findings.append(Finding(
                    "BoundaryWarning", "warning",
                    f"shape {j}: level {hits[0]} equals v*h = {v}*{h}",
                    {"shape": j, "height": h, "levels": hits}))
    return findings


def build_nagata_plan(k: int, m: int, s: int):
    """The specialization plan for k^2 fat points of multiplicity m at
    degree d = km+s: k-1 copies of the multiplicity-m staircase slide onto
    the divisor, k-s-2 slowly and s+1 fast, with m levels.

    N = m+1 is the smallest speed base making every floor exact
    (n_i/(N) and n_i/(N+1) land at m-i+1 and m-i for all levels).
    """
    if k < 4:
        raise DomainError("plans are built for k >= 4 (smaller k is the base case)")
    if m < 1:
        raise DomainError("multiplicity must be >= 1")
    if not 0 <= s <= k - 2:
        raise DomainError(f"s must satisfy 0 <= s <= k-2, got {s}")
    N = m + 1
    speeds = (N,) * (k - s - 2) + (N + 1,) * (s + 1)
    levels = tuple((N + 1) * (m - i + 1) - 1 for i in range(1, m + 1))
    shapes = StaircaseTuple([regular(m)] * (k - 1))
    plan = SpecializationPlan(shapes, speeds, levels)
    model = LineSystemModel(
        degree=k * m + s,
        line_base_degrees=tuple(k * (m - i + 1) for i in range(1, m + 1)))
    return plan, model


def slice_degree_table(plan: SpecializationPlan, k: int, m: int, s: int):
    """Per-level slice degrees with the double identity
    sum_j d_j = s+1+(i-1)(k-1) = d-i+2-k(m-i+1), d = km+s."""
    d = k * m + s
    levels = []
    for i in range(1, plan.r + 1):
        degrees = plan.slice_sizes(i)
        total = sum(degrees)
        expected = s + 1 + (i - 1) * (k - 1)
        cross = d - i + 2 - k * (m - i + 1)
        if not (total == expected == cross):
            raise IdentityFailure(
                f"level {i}: slice degrees {degrees} sum to {total}, "
                f"expected {expected} = {cross} (k={k}, m={m}, s={s})")
        levels.append({"i": i, "n": plan.levels[i - 1],
                       "t": list(plan.t_vector(i)),
                       "degrees": list(degrees), "total": total,
                       "expected": expected})
    return {"k": k, "m": m, "s": s, "d": d, "levels": levels, "ok": True}


# ---------------------------------------------------------------------------
# scene materialization (shared by oracle mode and the limit check)
# ---------------------------------------------------------------------------


def _slice_as_plane(T: Staircase) -> Staircase:
    """Embed a one-dimensional slice as the plane staircase (x, y^size)."""
    size = T.degree
    return Staircase(2, {(b,): 1 for b in range(size)})


@dataclass
class _Placed:
    sliding_ys: list
    divisor: list   # (multiplicity, y)
    ambient: list   # (multiplicity, (x, y))


def _materialize_scene(plan, scene, rng, p):
    used = set()

    def draw():
        while True:
            v = rng.randrange(1, p)
            if v not in used:
                used.add(v)
                return v

    sliding = [draw() for _ in plan.shapes]
    divisor = [(M, draw()) for M in scene.divisor_base]
    ambient = [(M, (draw(), draw())) for M in scene.ambient_base]
    return _Placed(sliding, divisor, ambient)


def _residual_system_sites(plan, placed, r, residual):
    """Sites cutting out L(-rD - residual) on the quotient by x^r."""
    sites = []
    for M, w in placed.divisor:
        if M - r > 0:
            sites.append(Site(regular(M - r), (0, w)))
    for M, pt in placed.ambient:
        sites.append(Site(regular(M), pt))
    for E, y in zip(residual, placed.sliding_ys):
        if not E.is_empty:
            sites.append(Site(E, (0, y)))
    return sites


def _system_dim(d, sites, p):
    if d < 0:
        return 0
    rows = conditions_matrix(sites, d, p)
    return ambient_sections(d) - rank_mod_p(rows, p)


# ---------------------------------------------------------------------------
# hypothesis checks
# ---------------------------------------------------------------------------


def hypothesis_check(plan: SpecializationPlan, model: LineSystemModel,
                     mode: str = "degree-count", scene: OracleScene | None = None,
                     trials: int = 2, seed: int = 0):
    """Per-level transparency verdicts: vanishing on Z_i forces one more
    vanishing on D.

    degree-count mode is pure arithmetic: deg(Z_i on D) must reach the
    degree of the restricted system on D minus the base conditions already
    there, plus one.  oracle mode compares the dimensions of both systems
    exactly at desk scale (needs a scene).
    """
    if mode not in ("degree-count", "oracle"):
        raise ValueError(f"unknown mode {mode!r}")
    verdicts = []
    if mode == "degree-count":
        if len(model.line_base_degrees) < plan.r:
            raise ValueError("model must carry one base degree per level")
        for i in range(1, plan.r + 1):
            z = plan.z_degree(i)
            restricted = model.degree - (i - 1)
            base = model.line_base_degrees[i - 1]
            need = restricted - base + 1
            verdicts.append({
                "level": i, "mode": mode, "ok": z >= need,
                "z_degree": z, "restricted_degree": restricted,
                "base_degree": base, "needed": need,
            })
        return verdicts
    if scene is None:
        raise ValueError("oracle mode needs a scene")
    p = scene.prime
    require_prime(p)
    d = model.degree
    if ambient_sections(d) > 80 or sum(E.degree for E in plan.shapes) > 40:
        raise OracleResourceLimit("oracle-mode hypothesis check beyond desk scale")
    rng = random.Random(f"{seed}:{scene.seed}:hypothesis")
    dims_with = [None] * plan.r
    dims_without = [None] * plan.r
    for _ in range(max(1, trials)):
        placed = _materialize_scene(plan, scene, rng, p)
        for i in range(1, plan.r + 1):
            di = d - (i - 1)
            sites_with = []
            for M, w in placed.divisor:
                if M - (i - 1) > 0:
                    sites_with.append(Site(regular(M - (i - 1)), (0, w)))
            for M, pt in placed.ambient:
                sites_with.append(Site(regular(M), pt))
            ts = plan.t_vector(i)
            for E, t, y in zip(plan.shapes, ts, placed.sliding_ys):
                Z = _slice_as_plane(E.slice(t))
                if not Z.is_empty:
                    sites_with.append(Site(Z, (0, y)))
            a = _system_dim(di, sites_with, p)
            sites_without = []
            for M, w in placed.divisor:
                if M - i > 0:
                    sites_without.append(Site(regular(M - i), (0, w)))
            for M, pt in placed.ambient:
                sites_without.append(Site(regular(M), pt))
            b = _system_dim(di - 1, sites_without, p)
            dims_with[i - 1] = a if dims_with[i - 1] is None else min(dims_with[i - 1], a)
            dims_without[i - 1] = b if dims_without[i - 1] is None \
                else min(dims_without[i - 1], b)
    for i in range(1, plan.r + 1):
        a, b = dims_with[i - 1], dims_without[i - 1]
        verdicts.append({"level": i, "mode": mode, "ok": a == b,
                         "dim_with_z": a, "dim_next": b})
    return verdicts


# ---------------------------------------------------------------------------
# theorem application
# ---------------------------------------------------------------------------


@dataclass
class ResidualCertificate:
    plan: SpecializationPlan
    model: LineSystemModel
    r: int
    residual: StaircaseTuple
    residual_algebraic: StaircaseTuple | None
    verdicts: list
    findings: list
    bookkeeping: dict
    dim_bound: dict

    def to_json(self):
        return {
            "plan": self.plan.to_json(),
            "model": self.model.to_json(),
            "r": self.r,
            "residual": [E.to_json() for E in self.residual],
            "residual_algebraic": (
                None if self.residual_algebraic is None
                else [E.to_json() for E in self.residual_algebraic]),
            "verdicts": self.verdicts,
            "findings": [f.to_json() for f in self.findings],
            "bookkeeping": self.bookkeeping,
            "dim_bound": self.dim_bound,
        }


def apply_theorem(plan: SpecializationPlan, model: LineSystemModel,
                  mode: str = "degree-count", scene: OracleScene | None = None,
                  allow_boundary: bool = False, trials: int = 2,
                  seed: int = 0) -> ResidualCertificate:
    """Produce the residual certificate: all hypotheses must hold.

    The certificate stores every intermediate number (levels, slice degrees,
    verdicts, residuals, degree bookkeeping) so it can be replayed without
    the library.  Boundary plans are refused unless allow_boundary is set;
    in that case both the combinatorial and the algebraic residual are
    recorded.
    """
    findings = validate_plan(plan)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        raise HypothesisFailed("; ".join(f.message for f in errors))
    boundary = [f for f in findings if f.code == "BoundaryWarning"]
    if boundary and not allow_boundary:
        raise HypothesisFailed(
            "unresolved boundary levels (n = v*h); pass allow_boundary=True "
            "to record both residual readings")
    verdicts = hypothesis_check(plan, model, mode, scene, trials, seed)
    bad = [v for v in verdicts if not v["ok"]]
    if bad:
        raise HypothesisFailed(
            f"hypothesis fails at levels {[v['level'] for v in bad]}")
    r = plan.r
    residual = plan.residual_tuple()
    residual_alg = plan.algebraic_residual_tuple() if boundary else None
    deg_e = plan.shapes.degree
    z_total = sum(plan.z_degree(i) for i in range(1, r + 1))
    deg_res = residual.degree
    if deg_e != deg_res + z_total:
        raise IdentityFailure(
            f"degree bookkeeping broken: deg E = {deg_e}, residual {deg_res} "
            f"+ slices {z_total}")
    bookkeeping = {"deg_shapes": deg_e, "deg_residual": deg_res,
                   "z_degrees": [plan.z_degree(i) for i in range(1, r + 1)],
                   "conserved": True}
    dim_bound = {"degree": model.degree - r,
                 "ambient_sections": ambient_sections(model.degree - r),
                 "oracle": None}
    if scene is not None:
        p = scene.prime
        rng = random.Random(f"{seed}:{scene.seed}:dim-bound")
        placed = _materialize_scene(plan, scene, rng, p)
        dim_bound["oracle"] = _system_dim(
            model.degree - r, _residual_system_sites(plan, placed, r, residual), p)
    return ResidualCertificate(plan, model, r, residual, residual_alg,
                               verdicts, findings, bookkeeping, dim_bound)


# ---------------------------------------------------------------------------
# direct limit verification at desk scale
# ---------------------------------------------------------------------------


def limit_inclusion_check(plan: SpecializationPlan, model: LineSystemModel,
                          scene: OracleScene, seed: int = 0,
                          residual_override: StaircaseTuple | None = None,
                          r_override: int | None = None,
                          t_precision: int | None = None):
    """Materialize a basis of the moving system over F_p[t], take its flat
    limit, and test containment in the span of L(-rD - residual).

    Returns (contained, details).  residual_override and r_override
    substitute a corrupted residual claim (negative controls: one extra
    suppression must come with one extra divisor copy, otherwise the
    corrupted target only grows)."""
    d = model.degree
    p = scene.prime
    require_prime(p)
    if d > MAX_LIMIT_DEGREE:
        raise OracleResourceLimit(
            f"limit check supports degree <= {MAX_LIMIT_DEGREE}")
    if len(plan.shapes) > MAX_SLIDING_SITES:
        raise OracleResourceLimit(
            f"limit check supports <= {MAX_SLIDING_SITES} sliding sites")
    rng = random.Random(f"{seed}:{scene.seed}:limit")
    placed = _materialize_scene(plan, scene, rng, p)
    cols = [(i, j) for s in range(d + 1) for i in range(s + 1) for j in (s - i,)]
    colindex = {mon: idx for idx, mon in enumerate(cols)}

    rows = []
    static_sites = [Site(regular(M), (0, w)) for M, w in placed.divisor]
    static_sites += [Site(regular(M), pt) for M, pt in placed.ambient]
    for row in conditions_matrix(static_sites, d, p):
        rows.append([[c] if c else [] for c in row])
    for E, v, y in zip(plan.shapes, plan.speeds, placed.sliding_ys):
        ypow = [1] * (d + 1)
        for i in range(1, d + 1):
            ypow[i] = ypow[i - 1] * y % p
        for (a, b) in E.cells():
            row = [[] for _ in cols]
            for (i, j), idx in colindex.items():
                if i < a or j < b:
                    continue
                c = comb(i, a) * comb(j, b) * ypow[j - b] % p
                if c:
                    row[idx] = [0] * (v * (i - a)) + [c]
            rows.append(row)

    family_vecs = kernel_over_fpt(rows, len(cols), p)
    ctx = RingContext(dim=2, prime=p, t_trunc=t_precision, x_cap=max(d, 1))
    family = []
    for vec in family_vecs:
        terms = {}
        for idx, poly in enumerate(vec):
            mon = cols[idx]
            for e, c in enumerate(poly):
                if c:
                    terms[(mon, e)] = c
        family.append(Element(ctx, terms))
    limit = flat_limit(family, ctx)

    r = plan.r if r_override is None else r_override
    residual = residual_override if residual_override is not None \
        else plan.residual_tuple()
    target_sites = _residual_system_sites(plan, placed, r, residual)
    gcols = [(i, j) for s in range(d - r + 1)
             for i in range(s + 1) for j in (s - i,)]
    grows = conditions_matrix(target_sites, d - r, p) if d - r >= 0 else []
    if not grows:
        gkernel = [[1 if i == j else 0 for i in range(len(gcols))]
                   for j in range(len(gcols))]
    else:
        gkernel = kernel_mod_p(grows, len(gcols), p)
    fiber_ctx = ctx.with_t(1)
    target_elems = []
    for vec in gkernel:
        terms = {}
        for idx, c in enumerate(vec):
            if c:
                i, j = gcols[idx]
                terms[((i + r, j), 0)] = c
        target_elems.append(Element(fiber_ctx, terms))
    target = MonomialSpace.from_elements(fiber_ctx, target_elems)

    contained = all(target.contains(el) for el in limit.basis())
    details = {
        "dim_moving": len(family),
        "dim_limit": limit.dimension(),
        "dim_target": target.dimension(),
        "r": r,
        "residual": [E.to_json() for E in residual],
        "contained": contained,
    }
    return contained, details


# ---------------------------------------------------------------------------
# the recursive certificate
# ---------------------------------------------------------------------------


def nagata_certificate(k: int, m: int, seed: int = 0,
                       prime: int = DEFAULT_PRIME,
                       oracle_base_max_m: int = 3) -> dict:
    """Replayable certificate chain k -> k-1 -> ... -> 3 for the statement
    that k^2 generic fat points of multiplicity m impose the virtually
    expected conditions.

    For each stage j >= 4 and each of the two critical degrees of the
    j-stage scheme, the certificate records the plan, the slice-degree
    identities, the hypothesis verdicts, the residual (both readings at
    boundary levels) and the codimension bookkeeping.  The base case
    (at most 9 equal fat points) is recorded as assumed-known, and is
    replayed by the interpolation oracle when small enough.
    """
    if k < 2:
        raise DomainError("certificate needs k >= 2")
    if m < 1:
        raise DomainError("multiplicity must be >= 1")
    require_prime(prime)
    plans = []
    identities = {"bookkeeping": True, "slice_degrees": True,
                  "line_absorption": True, "critical_bounds": True}
    top_deg = k * k * fat_point_degree(m)
    top_dc = critical_degree(top_deg)
    for j in range(k, 3, -1):
        deg_j = j * j * fat_point_degree(m)
        d_c = critical_degree(deg_j)
        if not (j * m + 1 <= d_c <= j * m + j - 2):
            identities["critical_bounds"] = False
        for d in (d_c - 1, d_c):
            s = d - j * m
            if not 0 <= s <= j - 2:
                raise IdentityFailure(
                    f"critical degree {d} leaves s={s} outside [0, {j - 2}] "
                    f"at stage k={j}")
            plan, model = build_nagata_plan(j, m, s)
            table = slice_degree_table(plan, j, m, s)
            cert = apply_theorem(plan, model, allow_boundary=True, seed=seed)
            bk = bookkeeping_identity(j, m, s)
            if not bk:
                identities["bookkeeping"] = False
            line_deg = (j - s - 2) * m
            absorb = line_deg <= critical_degree(
                (j - 1) * (j - 1) * fat_point_degree(m))
            if not absorb:
                identities["line_absorption"] = False
            plans.append({
                "k": j,
                "d": d,
                "s": s,
                "v": list(plan.speeds),
                "levels": list(plan.levels),
                "slice_degrees": table["levels"],
                "verdicts": cert.verdicts,
                "residual": [E.to_json() for E in cert.residual],
                "residual_algebraic": (
                    None if cert.residual_algebraic is None
                    else [E.to_json() for E in cert.residual_algebraic]),
                "boundary_levels": [f.to_json() for f in cert.findings
                                    if f.code == "BoundaryWarning"],
                "bookkeeping": cert.bookkeeping,
                "identities": {"slice_degrees": True, "bookkeeping": bk,
                               "line_absorption": absorb,
                               "line_degree": line_deg},
            })
    base = {"k": min(k, 3), "m": m, "status": "assumed-known",
            "note": ("unions of at most 9 equal fat points impose "
                     "independent conditions in every degree")}
    if m <= oracle_base_max_m:
        from .interp import verify_nagata_theorem
        report = verify_nagata_theorem(min(k, 3), m, trials=2, seed=seed,
                                       prime=prime)
        base["oracle_replay"] = {"pass": report.passed,
                                 "d_max": report.d_max}
    return {
        "k": k,
        "m": m,
        "d": [top_dc - 1, top_dc],
        "plans": plans,
        "base_case": base,
        "identities": identities,
        "seed": seed,
        "prime": prime,
    }
