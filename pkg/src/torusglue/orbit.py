"""Orbit structure on the compact sheet: density, membership, local geometry.

Under the isometry group of the winding space, the orbit of a torus point y0
is {g(c) + y0} united with {g(c) - y0}.  It is dense because the slope is
irrational, yet it misses most points.  Both halves of that statement are
decided here with exact certificates: a closed-form return-time construction
(plus a budgeted scan) produces approach witnesses, and a two-line linear
argument over the basis {1, sqrt(d)} refutes membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gluing import Distance, GluingParams, WindingPoint, winding_distance
from .numerics import (
    EXACT,
    FieldMismatchError,
    QuadScalar,
    ScalarMode,
    as_float,
    frac,
    require_exact,
    scalar_abs,
    scalar_lt,
    scalar_min,
    sign_of,
    sqrt_as_float,
)
from .torus import (
    GramMatrix,
    OneParamSubgroup,
    TorusPoint,
    tangent_norm_sq,
    torus_distance_sq,
)


def _exact_eps(e) -> Fraction:
    """Tolerances enter exact comparisons, so they must be exact rationals."""
    if isinstance(e, float):
        return Fraction(*e.as_integer_ratio())
    return Fraction(e)


def _radical_parts(x, d: int) -> tuple[Fraction, Fraction]:
    """Coordinates of x in the basis (1, sqrt(d))."""
    if isinstance(x, QuadScalar):
        if x.b != 0 and x.d != d:
            raise FieldMismatchError(f"scalar lives in sqrt({x.d}), expected sqrt({d})")
        return x.a, x.b
    return Fraction(x), Fraction(0)


# -- continued fractions ------------------------------------------------------------


@dataclass(frozen=True)
class Convergent:
    """Best rational approximation p/q with signed defect err = q*x - p."""

    p: int
    q: int
    err: object

    @property
    def err_float(self) -> float:
        return as_float(self.err)

    def describe(self) -> dict:
        from .report import scalar_json

        return {"p": self.p, "q": self.q, "err": scalar_json(self.err), "err_float": self.err_float}


def cf_expansion(x, n: int) -> list[int]:
    """First n partial quotients of a quadratic irrational.

    Rationals are rejected: their expansions terminate and every question
    this module asks about them has a direct answer.
    """
    if not isinstance(x, QuadScalar) or x.b == 0:
        raise ValueError("continued fraction expansion expects a quadratic irrational")
    out = []
    cur = x
    for _ in range(n):
        a = cur.floor()
        out.append(a)
        cur = (cur - a).reciprocal()
    return out


def _convergent_stream(x):
    """Yield convergents one at a time, checking the classical invariants.

    Each step asserts gcd(p, q) = 1, strictly shrinking |q*x - p|, and
    alternating defect signs; any failure means the exact arithmetic broke.
    """
    if not isinstance(x, QuadScalar) or x.b == 0:
        raise ValueError("continued fraction expansion expects a quadratic irrational")
    p_prev, p_prev2 = 1, 0
    q_prev, q_prev2 = 0, 1
    prev_abs = None
    prev_sign = 0
    cur = x
    while True:
        a = cur.floor()
        cur = (cur - a).reciprocal()
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        err = q * x - p
        s = sign_of(err)
        assert math.gcd(p, q) == 1
        assert s != 0
        if prev_abs is not None:
            assert s == -prev_sign
            assert scalar_lt(scalar_abs(err), prev_abs)
        prev_sign = s
        prev_abs = scalar_abs(err)
        yield Convergent(p, q, err)
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q


def cf_convergents(x, n: int) -> list[Convergent]:
    """First n convergents via the standard recurrence."""
    stream = _convergent_stream(x)
    return [next(stream) for _ in range(n)]


# -- density: approach witnesses ----------------------------------------------------


@dataclass(frozen=True)
class CircleHit:
    """k rotation steps land within eps of the target circle coordinate."""

    target: object
    eps: Fraction
    k: int
    position: object
    distance_sq: object
    distance: float
    convergent: Convergent | None

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "target": scalar_json(self.target),
            "eps": scalar_json(self.eps),
            "k": self.k,
            "position": scalar_json(self.position),
            "distance_sq": scalar_json(self.distance_sq),
            "distance": self.distance,
            "convergent": None if self.convergent is None else self.convergent.describe(),
        }


def _circle_dist_sq(w, g_axis):
    # w is a fractional part in [0, 1); wrap to the short way around
    wrap = scalar_min(w, 1 - w)
    return wrap * wrap * g_axis


def circle_density_hit(
    target,
    theta,
    x0=Fraction(0),
    eps=Fraction(1, 1000),
    g_axis: Fraction = Fraction(1),
    max_terms: int = 64,
) -> CircleHit:
    """Closed-form approach to `target` by rotations s -> s + theta on the circle.

    Pick the first convergent p/q of theta whose defect delta = q*theta - p
    satisfies delta^2 * g_axis < eps^2, then take m blocks of q steps so that
    m*delta crosses the gap to the target.  The landing error is below |delta|
    by construction and is re-verified exactly before returning.
    """
    require_exact(target, "circle density target")
    require_exact(x0, "circle base point")
    if not isinstance(theta, QuadScalar) or theta.b == 0:
        raise ValueError("rotation step must be a quadratic irrational")
    eps = _exact_eps(eps)
    eps_sq = eps * eps
    w = frac(target - x0)
    d0 = _circle_dist_sq(w, g_axis)
    if scalar_lt(d0, eps_sq):
        return CircleHit(target, eps, 0, frac(x0), d0, sqrt_as_float(d0), None)
    conv = None
    stream = _convergent_stream(theta)
    for _ in range(max_terms):
        c = next(stream)
        if scalar_lt(c.err * c.err * g_axis, eps_sq):
            conv = c
            break
    if conv is None:
        raise ValueError(f"no convergent within {max_terms} terms is sharp enough for eps={eps}")
    delta = conv.err
    if sign_of(delta) > 0:
        m = (w / delta).floor()
    else:
        m = ((w - 1) / delta).floor()
    k = m * conv.q
    position = frac(x0 + k * theta)
    dist_sq = _circle_dist_sq(frac(position - target), g_axis)
    assert scalar_lt(dist_sq, eps_sq)
    return CircleHit(target, eps, k, position, dist_sq, sqrt_as_float(dist_sq), conv)


@dataclass(frozen=True)
class DensityHit:
    """Orbit point g(t) + y0 within eps of the target, certified exactly."""

    target: TorusPoint
    eps: Fraction
    k: int
    t: object
    point: TorusPoint
    distance_sq: object
    distance: float
    scanned: int

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "target": self.target.describe(),
            "eps": scalar_json(self.eps),
            "k": self.k,
            "t": scalar_json(self.t),
            "point": self.point.describe(),
            "distance_sq": scalar_json(self.distance_sq),
            "distance": self.distance,
            "scanned": self.scanned,
        }


def _min_eigen_float(gram: GramMatrix) -> float:
    a, b, c = float(gram.g11), float(gram.g12), float(gram.g22)
    return (a + c - math.sqrt((a - c) ** 2 + 4 * b * b)) / 2


def torus_density_hit(
    target: TorusPoint,
    subgroup: OneParamSubgroup,
    y0: TorusPoint | None = None,
    eps=Fraction(1, 100),
    gram: GramMatrix | None = None,
    budget: int = 50_000_000,
    chunk: int = 2_000_000,
) -> DensityHit | None:
    """First certified orbit point within eps of the target, or None.

    Scans return times t = w1 + k whose first coordinate matches the target
    exactly, so only the second coordinate can miss.  A vectorized float pass
    over each chunk of k discards everything that cannot possibly land inside
    eps (second-coordinate wrap above eps / sqrt(min eigenvalue), with a
    generous float-error guard); survivors are re-checked exactly in
    increasing k against the full lattice distance.
    """
    gram = gram or GramMatrix.identity()
    y0 = y0 or TorusPoint.origin()
    require_exact(target.u1, "density target")
    require_exact(target.u2, "density target")
    require_exact(y0.u1, "orbit base point")
    require_exact(y0.u2, "orbit base point")
    eps = _exact_eps(eps)
    eps_sq = eps * eps
    alpha = subgroup.alpha
    w1 = frac(target.u1 - y0.u1)
    w2 = frac(target.u2 - y0.u2)

    beta = as_float(alpha)
    base = as_float(frac(alpha * w1))
    w2f = as_float(w2)
    tol = as_float(eps) / math.sqrt(_min_eigen_float(gram)) * 1.0001 + 1e-6

    for start in range(0, budget + 1, chunk):
        stop = min(start + chunk, budget + 1)
        ks = np.arange(start, stop, dtype=np.float64)
        vals = base + beta * ks
        vals -= np.floor(vals)
        diff = np.abs(vals - w2f)
        np.minimum(diff, 1.0 - diff, out=diff)
        for idx in np.nonzero(diff <= tol)[0]:
            k = start + int(idx)
            t = (w1 + k) / subgroup.v1
            point = subgroup.point(t).translate(y0)
            dist_sq = torus_distance_sq(point, target, gram)
            if scalar_lt(dist_sq, eps_sq):
                return DensityHit(
                    target, eps, k, t, point, dist_sq, sqrt_as_float(dist_sq), k + 1
                )
    return None


@dataclass
class DensityReport:
    target: TorusPoint
    epsilons: list
    hits: list
    budget: int
    method: str

    @property
    def passed(self) -> bool:
        return all(h is not None for h in self.hits)

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "target": self.target.describe(),
            "budget": self.budget,
            "method": self.method,
            "results": [
                {"eps": scalar_json(e), "hit": None if h is None else h.describe()}
                for e, h in zip(self.epsilons, self.hits)
            ],
            "passed": self.passed,
        }


def density_report(
    target: TorusPoint,
    subgroup: OneParamSubgroup,
    epsilons,
    y0: TorusPoint | None = None,
    gram: GramMatrix | None = None,
    budget: int = 50_000_000,
) -> DensityReport:
    eps_list = [_exact_eps(e) for e in epsilons]
    hits = [torus_density_hit(target, subgroup, y0, e, gram, budget) for e in eps_list]
    return DensityReport(target, eps_list, hits, budget, "return-time scan")


# -- membership: exact decision over the basis (1, sqrt(d)) -------------------------


@dataclass(frozen=True)
class BranchDerivation:
    """One branch of the orbit equation, solved over the basis (1, sqrt(d)).

    Matching the radical coordinate forces a single candidate shift m_star;
    membership then needs m_star integral and the rational residue integral.
    """

    branch: str
    w1: object
    w2: object
    m_star: Fraction
    m_is_integer: bool
    residue: Fraction | None
    member: bool

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "branch": self.branch,
            "w1": scalar_json(self.w1),
            "w2": scalar_json(self.w2),
            "m_star": scalar_json(self.m_star),
            "m_is_integer": self.m_is_integer,
            "residue": None if self.residue is None else scalar_json(self.residue),
            "member": self.member,
        }


def derive_branch(
    target: TorusPoint, subgroup: OneParamSubgroup, y0: TorusPoint, branch: str
) -> BranchDerivation:
    """Decide g(t) = target -+ y0 by splitting both coordinates over (1, sqrt(d)).

    Writing t*v1 = w1 + m, the second coordinate needs alpha*(w1 + m) - w2
    integral.  Its sqrt(d) coordinate is linear in m with nonzero slope, so
    m is pinned to one rational value; everything else is bookkeeping.
    """
    alpha = subgroup.alpha
    d = alpha.d
    aa, ab = alpha.a, alpha.b
    if branch == "direct":
        w1 = frac(target.u1 - y0.u1)
        w2 = frac(target.u2 - y0.u2)
    elif branch == "inverted":
        w1 = frac(target.u1 + y0.u1)
        w2 = frac(target.u2 + y0.u2)
    else:
        raise ValueError("branch must be 'direct' or 'inverted'")
    w1a, w1b = _radical_parts(w1, d)
    w2a, w2b = _radical_parts(w2, d)
    m_star = (w2b - aa * w1b - ab * w1a) / ab
    if m_star.denominator != 1:
        return BranchDerivation(branch, w1, w2, m_star, False, None, False)
    residue = aa * w1a + d * ab * w1b + aa * m_star - w2a
    return BranchDerivation(branch, w1, w2, m_star, True, residue, residue.denominator == 1)


@dataclass(frozen=True)
class OrbitMembership:
    """Witness t with g(t) + y0 (direct) or g(t) - y0 (inverted) equal to target."""

    target: TorusPoint
    y0: TorusPoint
    branch: str
    t: object
    derivation: BranchDerivation

    def orbit_point(self, subgroup: OneParamSubgroup) -> TorusPoint:
        base = self.y0 if self.branch == "direct" else self.y0.invert()
        return subgroup.point(self.t).translate(base)

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "member": True,
            "target": self.target.describe(),
            "y0": self.y0.describe(),
            "branch": self.branch,
            "t": scalar_json(self.t),
            "derivation": self.derivation.describe(),
        }


@dataclass(frozen=True)
class NonMembershipCertificate:
    """Exact refutation of both orbit branches; replay() re-derives it."""

    target: TorusPoint
    y0: TorusPoint
    branches: tuple

    def replay(self, subgroup: OneParamSubgroup) -> bool:
        """Recompute each branch from the inputs and confirm the stored verdicts."""
        for stored in self.branches:
            fresh = derive_branch(self.target, subgroup, self.y0, stored.branch)
            if fresh != stored or fresh.member:
                return False
        return True

    def describe(self) -> dict:
        return {
            "member": False,
            "target": self.target.describe(),
            "y0": self.y0.describe(),
            "branches": [b.describe() for b in self.branches],
        }


def orbit_membership(
    target: TorusPoint, subgroup: OneParamSubgroup, y0: TorusPoint | None = None
):
    """Exact membership of target in {g(t) + y0} | {g(t) - y0}.

    Returns OrbitMembership (with the witness re-checked by evaluation) or
    NonMembershipCertificate.  Float coordinates are refused: the decision
    hinges on integrality, which floats cannot attest.
    """
    y0 = y0 or TorusPoint.origin()
    for val, what in ((target.u1, "target"), (target.u2, "target"), (y0.u1, "base"), (y0.u2, "base")):
        require_exact(val, f"orbit membership {what}")
    refutations = []
    for branch in ("direct", "inverted"):
        der = derive_branch(target, subgroup, y0, branch)
        if der.member:
            t = (der.w1 + der.m_star) / subgroup.v1
            witness = OrbitMembership(target, y0, branch, t, der)
            assert witness.orbit_point(subgroup) == target
            return witness
        refutations.append(der)
    return NonMembershipCertificate(target, y0, tuple(refutations))


@dataclass(frozen=True)
class CircleBranchDerivation:
    branch: str
    w: object
    k_star: Fraction
    k_is_integer: bool
    residue: Fraction | None
    member: bool

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "branch": self.branch,
            "w": scalar_json(self.w),
            "k_star": scalar_json(self.k_star),
            "k_is_integer": self.k_is_integer,
            "residue": None if self.residue is None else scalar_json(self.residue),
            "member": self.member,
        }


@dataclass(frozen=True)
class CircleMembership:
    target: object
    x0: object
    branch: str
    k: int
    derivation: CircleBranchDerivation

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "member": True,
            "target": scalar_json(self.target),
            "x0": scalar_json(self.x0),
            "branch": self.branch,
            "k": self.k,
            "derivation": self.derivation.describe(),
        }


@dataclass(frozen=True)
class CircleNonMembership:
    target: object
    x0: object
    branches: tuple

    def replay(self, theta) -> bool:
        for stored in self.branches:
            fresh = _derive_circle_branch(self.target, theta, self.x0, stored.branch)
            if fresh != stored or fresh.member:
                return False
        return True

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "member": False,
            "target": scalar_json(self.target),
            "x0": scalar_json(self.x0),
            "branches": [b.describe() for b in self.branches],
        }


def _derive_circle_branch(target, theta, x0, branch: str) -> CircleBranchDerivation:
    d = theta.d
    w = frac(target - x0) if branch == "direct" else frac(target + x0)
    wa, wb = _radical_parts(w, d)
    k_star = wb / theta.b
    if k_star.denominator != 1:
        return CircleBranchDerivation(branch, w, k_star, False, None, False)
    residue = k_star * theta.a - wa
    return CircleBranchDerivation(branch, w, k_star, True, residue, residue.denominator == 1)


def circle_orbit_membership(target, theta, x0=Fraction(0)):
    """Exact membership of target in {x0 + k*theta} | {k*theta - x0} on the circle."""
    require_exact(target, "circle membership target")
    require_exact(x0, "circle base point")
    if not isinstance(theta, QuadScalar) or theta.b == 0:
        raise ValueError("rotation step must be a quadratic irrational")
    refutations = []
    for branch in ("direct", "inverted"):
        der = _derive_circle_branch(target, theta, x0, branch)
        if der.member:
            k = int(der.k_star)
            landed = frac(x0 + k * theta) if branch == "direct" else frac(k * theta - x0)
            assert landed == frac(target)
            return CircleMembership(target, x0, branch, k, der)
        refutations.append(der)
    return CircleNonMembership(target, x0, tuple(refutations))


# -- dense but not closed ------------------------------------------------------------


@dataclass
class NonClosureReport:
    """Orbit misses the target exactly yet approaches it below every eps."""

    target: TorusPoint
    y0: TorusPoint
    certificate: NonMembershipCertificate
    density: DensityReport
    certificate_replayed: bool

    @property
    def passed(self) -> bool:
        return self.certificate_replayed and self.density.passed

    def describe(self) -> dict:
        return {
            "target": self.target.describe(),
            "y0": self.y0.describe(),
            "certificate": self.certificate.describe(),
            "certificate_replayed": self.certificate_replayed,
            "density": self.density.describe(),
            "passed": self.passed,
        }


def non_closure_report(
    target: TorusPoint,
    subgroup: OneParamSubgroup,
    epsilons,
    y0: TorusPoint | None = None,
    gram: GramMatrix | None = None,
    budget: int = 50_000_000,
) -> NonClosureReport:
    """Certify the orbit of y0 is not closed: target is a limit point off the orbit."""
    y0 = y0 or TorusPoint.origin()
    membership = orbit_membership(target, subgroup, y0)
    if isinstance(membership, OrbitMembership):
        raise ValueError(
            "target lies on the orbit; a non-closure witness must be a missed limit point"
        )
    density = density_report(target, subgroup, epsilons, y0, gram, budget)
    return NonClosureReport(target, y0, membership, density, membership.replay(subgroup))


# -- local isometry of the line embedding --------------------------------------------


class ValidityRadiusError(ValueError):
    """Separation left the window where the embedded line is a scaled isometry."""

    def __init__(self, radius: float, separation: float):
        self.radius = radius
        self.separation = separation
        super().__init__(
            f"|t - s| = {separation:.6g} exceeds the local isometry radius {radius:.6g}"
        )


@dataclass(frozen=True)
class LocalIsometryRecord:
    """Both sides of d((g(t),t),(g(s),s)) = (1 + |v|) |t - s| on one pair."""

    t: object
    s: object
    separation: float
    radius: float
    distance: Distance
    expected_torus_sq: object
    expected_offset: object
    slope: float
    lhs: float
    rhs: float
    exact_match: bool

    @property
    def passed(self) -> bool:
        return self.exact_match

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "t": scalar_json(self.t),
            "s": scalar_json(self.s),
            "separation": self.separation,
            "radius": self.radius,
            "distance": self.distance.describe(),
            "expected_torus_sq": scalar_json(self.expected_torus_sq),
            "expected_offset": scalar_json(self.expected_offset),
            "slope": self.slope,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "passed": self.passed,
        }


def local_isometry_check(
    t,
    s,
    subgroup: OneParamSubgroup,
    params: GluingParams,
    gram: GramMatrix | None = None,
    mode: ScalarMode = EXACT,
) -> LocalIsometryRecord:
    """Verify the line parameter is a scaled isometry near the diagonal.

    Inside |t - s|^2 <= min(M^2, sys^2/4) / max(1, |v|^2) the cylinder gap
    stays under the cutoff and the torus leg under half the systole, so the
    glued distance splits exactly into (|t-s|^2 |v|^2, |t-s|).  Outside that
    radius the comparison is meaningless and ValidityRadiusError is raised.
    """
    gram = gram or GramMatrix.identity()
    if mode.exact:
        require_exact(t, "local isometry parameter")
        require_exact(s, "local isometry parameter")
    nsq = tangent_norm_sq(subgroup.tangent(), gram)
    cap = scalar_min(params.M * params.M, gram.systole_sq() / 4)
    denom = nsq if scalar_lt(1, nsq) else 1
    radius_sq = cap / denom
    radius = math.sqrt(as_float(radius_sq))

    delta = t - s
    delta_sq = delta * delta
    separation = abs(as_float(delta))
    if scalar_lt(radius_sq, delta_sq):
        raise ValidityRadiusError(radius, separation)

    dist = winding_distance(WindingPoint.line(t), WindingPoint.line(s), params, gram, subgroup)
    expected_torus_sq = delta_sq * nsq
    expected_offset = scalar_abs(delta)
    slope = 1 + math.sqrt(as_float(nsq))
    lhs = dist.value
    rhs = slope * separation
    if mode.exact:
        ok = dist.torus_sq == expected_torus_sq and dist.offset == expected_offset
    else:
        ok = abs(lhs - rhs) <= mode.eps
    return LocalIsometryRecord(
        t,
        s,
        separation,
        radius,
        dist,
        expected_torus_sq,
        expected_offset,
        slope,
        lhs,
        rhs,
        ok,
    )
