"""Two-component glued metric space: a flat torus and a cylinder over it.

Points live either on the compact torus Y or on the cylinder Y x R.  The
distance adds a capped line gap min(|t1 - t2|, M) between cylinder points
and a constant offset R across components; the whole thing is a metric
exactly when 2R >= M, and the threshold is witnessed by an explicit
triangle counterexample below it.

Distances are carried as (squared torus part, linear offset) so exact mode
can compare components without ever taking a square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import (
    EXACT,
    ScalarMode,
    as_float,
    is_exact,
    rational_interval,
    require_exact,
    scalar_abs,
    scalar_lt,
    scalar_min,
    sign_of,
    sqrt_as_float,
    sqrt_interval,
)
from .sampling import random_glued_point, rng_for
from .torus import (
    GramMatrix,
    Length,
    OneParamSubgroup,
    TorusPoint,
    batch_torus_distance_sq,
    torus_distance_sq,
)


@dataclass(frozen=True)
class GluingParams:
    """Cross-component offset R and line cap M; strict mode enforces 2R >= M."""

    R: object
    M: object
    strict: bool = True

    def __post_init__(self):
        require_exact(self.R, "gluing offset R")
        require_exact(self.M, "line cap M")
        if sign_of(self.R) <= 0 or sign_of(self.M) <= 0:
            raise ValueError("R and M must be positive")
        if self.strict and self.is_degenerate():
            raise ValueError(
                "2R < M breaks the triangle inequality; pass strict=False to study the failure"
            )

    def is_degenerate(self) -> bool:
        return sign_of(2 * self.R - self.M) < 0

    def describe(self) -> dict:
        from .report import scalar_json

        return {"R": scalar_json(self.R), "M": scalar_json(self.M), "strict": self.strict}


@dataclass(frozen=True)
class GluedPoint:
    """Point of the glued space: torus point y, or cylinder point (y, t)."""

    y: TorusPoint
    t: object = None

    @classmethod
    def compact(cls, y: TorusPoint) -> "GluedPoint":
        return cls(y, None)

    @classmethod
    def cylinder(cls, y: TorusPoint, t) -> "GluedPoint":
        if t is None:
            raise ValueError("cylinder point needs a line coordinate")
        return cls(y, t)

    @property
    def is_compact(self) -> bool:
        return self.t is None

    def is_exact(self) -> bool:
        return self.y.is_exact() and (self.t is None or is_exact(self.t))

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "component": "torus" if self.is_compact else "cylinder",
            "y": self.y.describe(),
            "t": None if self.t is None else scalar_json(self.t),
        }


@dataclass(frozen=True)
class WindingPoint:
    """Point of the restricted space: torus point, or winding-line parameter t."""

    y: TorusPoint | None = None
    t: object = None

    def __post_init__(self):
        if (self.y is None) == (self.t is None):
            raise ValueError("exactly one of torus point and line parameter must be set")

    @classmethod
    def torus(cls, y: TorusPoint) -> "WindingPoint":
        return cls(y=y)

    @classmethod
    def line(cls, t) -> "WindingPoint":
        return cls(t=t)

    @property
    def is_compact(self) -> bool:
        return self.y is not None

    def embed(self, line: OneParamSubgroup) -> GluedPoint:
        if self.is_compact:
            return GluedPoint.compact(self.y)
        return GluedPoint.cylinder(line.point(self.t), self.t)

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "component": "torus" if self.is_compact else "line",
            "y": None if self.y is None else self.y.describe(),
            "t": None if self.t is None else scalar_json(self.t),
        }


@dataclass(frozen=True)
class Distance:
    """Glued distance sqrt(torus_sq) + offset, kept in components."""

    torus_sq: object
    offset: object

    @property
    def value(self) -> float:
        return sqrt_as_float(self.torus_sq) + as_float(self.offset)

    def __float__(self) -> float:
        return self.value

    def same_components(self, other: "Distance") -> bool:
        return self.torus_sq == other.torus_sq and self.offset == other.offset

    def is_zero(self) -> bool:
        return sign_of(self.torus_sq) == 0 and sign_of(self.offset) == 0

    def interval(self, digits: int = 30) -> tuple[Fraction, Fraction]:
        slo, shi = sqrt_interval(self.torus_sq, digits)
        olo, ohi = rational_interval(self.offset, digits)
        return slo + olo, shi + ohi

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "torus_sq": scalar_json(self.torus_sq),
            "offset": scalar_json(self.offset),
            "value": self.value,
        }


def glued_distance(a: GluedPoint, b: GluedPoint, params: GluingParams, gram: GramMatrix) -> Distance:
    base_sq = torus_distance_sq(a.y, b.y, gram)
    if a.is_compact and b.is_compact:
        return Distance(base_sq, 0)
    if not a.is_compact and not b.is_compact:
        gap = scalar_abs(a.t - b.t)
        return Distance(base_sq, scalar_min(gap, params.M))
    return Distance(base_sq, params.R)


def winding_distance(
    a: WindingPoint,
    b: WindingPoint,
    params: GluingParams,
    gram: GramMatrix,
    line: OneParamSubgroup,
) -> Distance:
    return glued_distance(a.embed(line), b.embed(line), params, gram)


# -- metric axiom verification ---------------------------------------------------


@dataclass(frozen=True)
class AxiomViolation:
    kind: str
    a: GluedPoint
    b: GluedPoint
    c: GluedPoint | None
    lhs: float
    rhs: float
    slack: float

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "a": self.a.describe(),
            "b": self.b.describe(),
            "c": None if self.c is None else self.c.describe(),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
        }


@dataclass
class AxiomReport:
    params: GluingParams
    mode: ScalarMode
    samples: int
    checks: int
    violations: list[AxiomViolation]
    violations_total: int
    max_abs_error: float
    gram: GramMatrix
    seed: int

    @property
    def passed(self) -> bool:
        return self.violations_total == 0

    def describe(self) -> dict:
        return {
            "params": {
                **self.params.describe(),
                "gram": self.gram.describe(),
                "seed": self.seed,
            },
            "mode": self.mode.describe(),
            "samples": self.samples,
            "checks": self.checks,
            "violations": [v.describe() for v in self.violations],
            "violations_total": self.violations_total,
            "max_abs_error": self.max_abs_error,
            "passed": self.passed,
        }


def _triangle_exact(lhs: Distance, r1: Distance, r2: Distance) -> tuple[bool, float]:
    """Decide lhs <= r1 + r2 with exact rational enclosures."""
    for digits in (30, 60):
        llo, lhi = lhs.interval(digits)
        alo, ahi = r1.interval(digits)
        blo, bhi = r2.interval(digits)
        if lhi <= alo + blo:
            return True, 0.0
        if llo > ahi + bhi:
            return False, float(llo - ahi - bhi)
    # ambiguous below 1e-60: a tight triangle equality
    return True, 0.0


class _ViolationLog:
    def __init__(self, max_recorded: int):
        self.max_recorded = max_recorded
        self.entries: list[AxiomViolation] = []
        self.total = 0
        self.max_err = 0.0

    def note_error(self, err: float):
        if err > self.max_err:
            self.max_err = err

    def add(self, kind, a, b, c, lhs, rhs, slack):
        self.total += 1
        self.note_error(max(0.0, slack))
        if len(self.entries) < self.max_recorded:
            self.entries.append(AxiomViolation(kind, a, b, c, lhs, rhs, slack))


def _points_equal(a: GluedPoint, b: GluedPoint, mode: ScalarMode) -> bool:
    if a.is_compact != b.is_compact:
        return False
    if mode.exact and a.is_exact() and b.is_exact():
        return a == b
    eps = mode.eps if not mode.exact else 1e-12
    ya, yb = np.array([a.y.as_floats()]), np.array([b.y.as_floats()])
    wrapped = batch_torus_distance_sq(ya, yb, GramMatrix.identity())[0]
    if wrapped > eps * eps:
        return False
    if a.is_compact:
        return True
    return abs(as_float(a.t) - as_float(b.t)) <= eps


def _check_triple(a, b, c, params, gram, mode, log: _ViolationLog) -> int:
    exact = mode.exact and a.is_exact() and b.is_exact() and c.is_exact()
    d_ab = glued_distance(a, b, params, gram)
    d_ba = glued_distance(b, a, params, gram)
    d_ac = glued_distance(a, c, params, gram)
    d_bc = glued_distance(b, c, params, gram)
    d_aa = glued_distance(a, a, params, gram)
    checks = 0

    # symmetry
    checks += 1
    err = abs(d_ab.value - d_ba.value)
    log.note_error(err)
    sym_ok = d_ab.same_components(d_ba) if exact else err <= mode.eps
    if not sym_ok:
        log.add("symmetry", a, b, None, d_ab.value, d_ba.value, err)

    # d(a, a) = 0
    checks += 1
    log.note_error(abs(d_aa.value))
    zero_ok = d_aa.is_zero() if exact else abs(d_aa.value) <= mode.identity_eps
    if not zero_ok:
        log.add("identity-zero", a, a, None, d_aa.value, 0.0, abs(d_aa.value))

    # d = 0 implies equal points
    for p, q, d in ((a, b, d_ab), (a, c, d_ac), (b, c, d_bc)):
        checks += 1
        is_null = d.is_zero() if exact else d.value <= mode.identity_eps
        if is_null and not _points_equal(p, q, mode):
            log.add("identity-distinct", p, q, None, d.value, 0.0, d.value)

    # triangle inequality, all three rotations
    for lhs, r1, r2, pa, pb, pc in (
        (d_ab, d_ac, d_bc, a, b, c),
        (d_ac, d_ab, d_bc, a, c, b),
        (d_bc, d_ab, d_ac, b, c, a),
    ):
        checks += 1
        if exact:
            ok, slack = _triangle_exact(lhs, r1, r2)
            if not ok:
                log.add("triangle", pa, pb, pc, lhs.value, r1.value + r2.value, slack)
        else:
            slack = lhs.value - (r1.value + r2.value)
            log.note_error(max(0.0, slack))
            if slack > mode.eps:
                log.add("triangle", pa, pb, pc, lhs.value, r1.value + r2.value, slack)
    return checks


def _batch_glued_values(ka, ya, ta, kb, yb, tb, params, gram):
    base = np.sqrt(np.maximum(batch_torus_distance_sq(ya, yb, gram), 0.0))
    both_cyl = (ka == 1) & (kb == 1)
    mixed = ka != kb
    m = float(as_float(params.M))
    r = float(as_float(params.R))
    off = np.where(both_cyl, np.minimum(np.abs(ta - tb), m), np.where(mixed, r, 0.0))
    return base + off


def _float_point(kind: int, y: np.ndarray, t: float) -> GluedPoint:
    p = TorusPoint(float(y[0]), float(y[1]))
    return GluedPoint.compact(p) if kind == 0 else GluedPoint.cylinder(p, float(t))


def _check_batch(n, params, gram, mode, seed, log: _ViolationLog) -> int:
    rng = np.random.default_rng(seed)
    kind = rng.integers(0, 2, size=(3, n))
    y = rng.random((3, n, 2))
    span = 3.0 * max(1.0, as_float(params.M))
    t = rng.uniform(-span, span, (3, n))

    d_ab = _batch_glued_values(kind[0], y[0], t[0], kind[1], y[1], t[1], params, gram)
    d_ba = _batch_glued_values(kind[1], y[1], t[1], kind[0], y[0], t[0], params, gram)
    d_ac = _batch_glued_values(kind[0], y[0], t[0], kind[2], y[2], t[2], params, gram)
    d_bc = _batch_glued_values(kind[1], y[1], t[1], kind[2], y[2], t[2], params, gram)
    d_aa = _batch_glued_values(kind[0], y[0], t[0], kind[0], y[0], t[0], params, gram)

    def point(col, i):
        return _float_point(int(kind[col][i]), y[col][i], float(t[col][i]))

    log.note_error(float(np.max(np.abs(d_ab - d_ba), initial=0.0)))
    for i in np.nonzero(np.abs(d_ab - d_ba) > mode.eps)[0]:
        log.add("symmetry", point(0, i), point(1, i), None,
                float(d_ab[i]), float(d_ba[i]), float(abs(d_ab[i] - d_ba[i])))

    log.note_error(float(np.max(np.abs(d_aa), initial=0.0)))
    for i in np.nonzero(np.abs(d_aa) > mode.identity_eps)[0]:
        log.add("identity-zero", point(0, i), point(0, i), None, float(d_aa[i]), 0.0, float(abs(d_aa[i])))

    for dv, c1, c2 in ((d_ab, 0, 1), (d_ac, 0, 2), (d_bc, 1, 2)):
        for i in np.nonzero(dv <= mode.identity_eps)[0]:
            p, q = point(c1, i), point(c2, i)
            if not _points_equal(p, q, mode):
                log.add("identity-distinct", p, q, None, float(dv[i]), 0.0, float(dv[i]))

    for lhs, r1, r2, cols in (
        (d_ab, d_ac, d_bc, (0, 1, 2)),
        (d_ac, d_ab, d_bc, (0, 2, 1)),
        (d_bc, d_ab, d_ac, (1, 2, 0)),
    ):
        slack = lhs - (r1 + r2)
        log.note_error(float(np.max(slack, initial=0.0)))
        for i in np.nonzero(slack > mode.eps)[0]:
            log.add("triangle", point(cols[0], i), point(cols[1], i), point(cols[2], i),
                    float(lhs[i]), float(r1[i] + r2[i]), float(slack[i]))
    return 8 * n


def check_metric_axioms(
    n: int,
    params: GluingParams,
    gram: GramMatrix,
    mode: ScalarMode = EXACT,
    seed: int = 0,
    sampler=None,
    extra_triples=(),
    max_recorded: int = 100,
) -> AxiomReport:
    """Sample n triples and test symmetry, identity, and the triangle inequality.

    Exact mode decides every comparison with exact arithmetic (triangle
    inequalities through rational square-root enclosures).  Float mode with
    the default sampler runs a vectorized batch.
    """
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    log = _ViolationLog(max_recorded)
    checks = 0
    if n:
        if not mode.exact and sampler is None:
            checks += _check_batch(n, params, gram, mode, seed, log)
        else:
            span = 3 * max(1, math.ceil(as_float(params.M)))
            for i in range(n):
                rng = rng_for(seed, i)
                if sampler is None:
                    a = random_glued_point(rng, span, exact=mode.exact)
                    b = a if rng.random() < 0.05 else random_glued_point(rng, span, exact=mode.exact)
                    c = a if rng.random() < 0.08 else random_glued_point(rng, span, exact=mode.exact)
                else:
                    a, b, c = sampler(rng), sampler(rng), sampler(rng)
                checks += _check_triple(a, b, c, params, gram, mode, log)
    for a, b, c in extra_triples:
        checks += _check_triple(a, b, c, params, gram, mode, log)
    return AxiomReport(
        params=params,
        mode=mode,
        samples=n,
        checks=checks,
        violations=log.entries,
        violations_total=log.total,
        max_abs_error=log.max_err,
        gram=gram,
        seed=seed,
    )


# -- the threshold counterexample -------------------------------------------------


@dataclass(frozen=True)
class TriangleWitness:
    """Explicit triple with d(a,b) > d(a,c) + d(c,b) when 2R < M."""

    a: GluedPoint
    b: GluedPoint
    c: GluedPoint
    d_ab: Distance
    d_ac: Distance
    d_cb: Distance
    slack: object

    def as_triple(self):
        return self.a, self.b, self.c

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "a": self.a.describe(),
            "b": self.b.describe(),
            "c": self.c.describe(),
            "lhs": self.d_ab.describe(),
            "rhs_1": self.d_ac.describe(),
            "rhs_2": self.d_cb.describe(),
            "slack": scalar_json(self.slack),
            "slack_value": as_float(self.slack),
        }


def triangle_counterexample(params: GluingParams, gram: GramMatrix | None = None) -> TriangleWitness:
    """Witness triple through the compact component, gaining M - 2R."""
    if not params.is_degenerate():
        raise ValueError("2R >= M is a valid metric; no counterexample exists")
    gram = gram or GramMatrix.identity()
    y = TorusPoint.origin()
    a = GluedPoint.cylinder(y, 0)
    b = GluedPoint.cylinder(y, params.M)
    c = GluedPoint.compact(y)
    d_ab = glued_distance(a, b, params, gram)
    d_ac = glued_distance(a, c, params, gram)
    d_cb = glued_distance(c, b, params, gram)
    slack = params.M - 2 * params.R
    assert sign_of(slack) > 0
    return TriangleWitness(a, b, c, d_ab, d_ac, d_cb, slack)


# -- nearest-point structure -------------------------------------------------------


def _grid_points(grid_n: int):
    for i in range(grid_n):
        for j in range(grid_n):
            yield TorusPoint(Fraction(i, grid_n), Fraction(j, grid_n))


def _grid_min_excluding(y: TorusPoint, gram: GramMatrix, grid_n: int, mode: ScalarMode):
    """Min of torus_distance_sq(y, y') over grid points y' != y.

    A vectorized float pass narrows the candidates; the winner (and the
    exclusion of y itself) is settled exactly when inputs are exact.
    """
    yf = np.array([y.as_floats()])
    idx = np.arange(grid_n * grid_n)
    pts = np.stack([(idx // grid_n) / grid_n, (idx % grid_n) / grid_n], axis=1)
    dsq = batch_torus_distance_sq(np.repeat(yf, len(pts), axis=0), pts, gram)

    exact = mode.exact and y.is_exact()

    def grid_point(k: int) -> TorusPoint:
        return TorusPoint(Fraction(int(k) // grid_n, grid_n), Fraction(int(k) % grid_n, grid_n))

    excluded = np.zeros(len(pts), dtype=bool)
    for k in np.nonzero(dsq < 1e-18)[0]:
        if exact:
            if grid_point(k) == y:
                excluded[k] = True
        else:
            excluded[k] = True
    masked = np.where(excluded, np.inf, dsq)
    best_f = float(np.min(masked))
    cand = np.nonzero(masked <= best_f * (1 + 1e-9) + 1e-12)[0]
    if not exact:
        k = int(cand[0])
        return grid_point(k), float(masked[k])
    best_pt, best_sq = None, None
    for k in cand:
        p = grid_point(int(k))
        sq = torus_distance_sq(y, p, gram)
        if best_sq is None or scalar_lt(sq, best_sq):
            best_pt, best_sq = p, sq
    assert sign_of(best_sq) > 0
    return best_pt, best_sq


@dataclass(frozen=True)
class NearestCompactResult:
    """The unique closest torus point to a cylinder point (y, t) is y itself."""

    y: TorusPoint
    achieved: Distance
    gap: Length
    gap_witness: TorusPoint
    grid_n: int

    def describe(self) -> dict:
        return {
            "y": self.y.describe(),
            "achieved": self.achieved.describe(),
            "gap_sq": _sq_json(self.gap.sq),
            "gap": self.gap.value,
            "gap_witness": self.gap_witness.describe(),
            "grid_n": self.grid_n,
        }


def _sq_json(sq):
    from .report import scalar_json

    return scalar_json(sq)


def nearest_in_compact(
    p: GluedPoint,
    params: GluingParams,
    gram: GramMatrix,
    grid_n: int = 100,
    mode: ScalarMode = EXACT,
) -> NearestCompactResult:
    if p.is_compact:
        raise ValueError("nearest_in_compact expects a cylinder point")
    achieved = glued_distance(p, GluedPoint.compact(p.y), params, gram)
    witness, gap_sq = _grid_min_excluding(p.y, gram, grid_n, mode)
    return NearestCompactResult(p.y, achieved, Length(gap_sq), witness, grid_n)


@dataclass(frozen=True)
class LineSetResult:
    """The cylinder points closest to a torus point y form the line {y} x R."""

    y: TorusPoint
    base: Distance
    margin: Length
    margin_witness: TorusPoint
    ts_checked: tuple
    grid_n: int
    line_constant: bool

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "y": self.y.describe(),
            "base": self.base.describe(),
            "margin_sq": _sq_json(self.margin.sq),
            "margin": self.margin.value,
            "margin_witness": self.margin_witness.describe(),
            "ts_checked": [scalar_json(t) for t in self.ts_checked],
            "grid_n": self.grid_n,
            "line_constant": self.line_constant,
        }


def nearest_line_set(
    y: TorusPoint,
    params: GluingParams,
    gram: GramMatrix,
    ts=(Fraction(-10), Fraction(0), Fraction(37, 10)),
    grid_n: int = 100,
    mode: ScalarMode = EXACT,
) -> LineSetResult:
    base = glued_distance(GluedPoint.compact(y), GluedPoint.cylinder(y, ts[0]), params, gram)
    constant = True
    for t in ts:
        d = glued_distance(GluedPoint.compact(y), GluedPoint.cylinder(y, t), params, gram)
        if mode.exact:
            if not (sign_of(d.torus_sq) == 0 and d.offset == params.R):
                constant = False
        elif abs(d.value - as_float(params.R)) > mode.eps:
            constant = False
    witness, margin_sq = _grid_min_excluding(y, gram, grid_n, mode)
    return LineSetResult(y, base, Length(margin_sq), witness, tuple(ts), grid_n, constant)


@dataclass(frozen=True)
class NearestOnLineResult:
    """On the line {y2} x R, the point closest to (y, r) sits at the same height r."""

    point: GluedPoint
    achieved: Distance

    def describe(self) -> dict:
        return {"point": self.point.describe(), "achieved": self.achieved.describe()}


def nearest_on_line(
    p: GluedPoint,
    y2: TorusPoint,
    params: GluingParams,
    gram: GramMatrix,
) -> NearestOnLineResult:
    if p.is_compact:
        raise ValueError("nearest_on_line expects a cylinder point")
    point = GluedPoint.cylinder(y2, p.t)
    return NearestOnLineResult(point, glued_distance(p, point, params, gram))


# -- brute-force grid oracles (independent of the closed forms above) -------------


def grid_nearest_in_compact(
    p: GluedPoint, params: GluingParams, gram: GramMatrix, grid_n: int = 100
) -> tuple[TorusPoint, float]:
    """Argmin of d(p, compact(y')) over the uniform grid, by direct enumeration."""
    yf = np.array([p.y.as_floats()])
    idx = np.arange(grid_n * grid_n)
    pts = np.stack([(idx // grid_n) / grid_n, (idx % grid_n) / grid_n], axis=1)
    dsq = batch_torus_distance_sq(np.repeat(yf, len(pts), axis=0), pts, gram)
    vals = np.sqrt(np.maximum(dsq, 0.0)) + as_float(params.R)
    k = int(np.argmin(vals))
    return (
        TorusPoint(Fraction(k // grid_n, grid_n), Fraction(k % grid_n, grid_n)),
        float(vals[k]),
    )


def grid_nearest_on_line(
    p: GluedPoint,
    y2: TorusPoint,
    params: GluingParams,
    gram: GramMatrix,
    t_n: int = 401,
    span=None,
) -> tuple[object, float]:
    """Argmin of d(p, (y2, s)) over a uniform s-grid centered at p.t."""
    if span is None:
        span = 2 * params.M
    base_sq = torus_distance_sq(p.y, y2, gram)
    base = sqrt_as_float(base_sq)
    step = 2 * span / (t_n - 1)
    best_t, best_v = None, None
    for j in range(t_n):
        s = p.t - span + j * step
        gap = scalar_abs(p.t - s)
        v = base + as_float(scalar_min(gap, params.M))
        if best_v is None or v < best_v:
            best_t, best_v = s, v
    return best_t, float(best_v)
