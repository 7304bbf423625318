"""Isometries of the glued space and their lifts from line isometries.

A product isometry acts componentwise: a torus isometry on both sheets and
a line isometry on the cylinder coordinate.  An isometry of the restricted
winding space is pinned down by its line part alone: preserving the graph
of the dense winding line forces the torus part to be translation by g(c)
composed with inversion exactly when the line part reverses orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .gluing import Distance, GluedPoint, GluingParams, WindingPoint, glued_distance, winding_distance
from .numerics import EXACT, ScalarMode, as_float, require_exact, sign_of
from .sampling import random_glued_point, random_torus_point, random_winding_point, rng_for
from .torus import GramMatrix, OneParamSubgroup, Subtorus, TorusPoint


class DecompositionError(ValueError):
    """The supplied map is not a recognizable product isometry."""


class ComponentSwapError(DecompositionError):
    """The map moves points between the torus and the cylinder."""


class LineActionError(DecompositionError):
    """The induced action on a cylinder line is not a line isometry."""


class ProductFormError(DecompositionError):
    """The map does not split as one torus isometry times one line isometry."""


class TorusActionError(DecompositionError):
    """The torus action is outside the translation / inversion family."""


@dataclass(frozen=True)
class LineIsometry:
    """t -> sign * t + shift with sign in {+1, -1}."""

    sign: int
    shift: object = 0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def identity(cls) -> "LineIsometry":
        return cls(1, 0)

    @classmethod
    def translation(cls, a) -> "LineIsometry":
        return cls(1, a)

    @classmethod
    def reflection(cls, center=0) -> "LineIsometry":
        return cls(-1, 2 * center)

    def apply(self, t):
        return self.sign * t + self.shift if self.sign > 0 else self.shift - t

    def compose(self, other: "LineIsometry") -> "LineIsometry":
        return LineIsometry(self.sign * other.sign, self.shift + self.sign * other.shift)

    def inverse(self) -> "LineIsometry":
        return LineIsometry(self.sign, -self.sign * self.shift)

    def describe(self) -> dict:
        from .report import scalar_json

        return {"sign": self.sign, "shift": scalar_json(self.shift)}


@dataclass(frozen=True)
class TorusIsometry:
    """y -> x + y, or y -> x - y when inverts is set."""

    x: TorusPoint
    inverts: bool = False

    @classmethod
    def identity(cls) -> "TorusIsometry":
        return cls(TorusPoint.origin(), False)

    @classmethod
    def translation(cls, x: TorusPoint) -> "TorusIsometry":
        return cls(x, False)

    @classmethod
    def inversion(cls) -> "TorusIsometry":
        return cls(TorusPoint.origin(), True)

    def apply(self, y: TorusPoint) -> TorusPoint:
        base = y.invert() if self.inverts else y
        return base.translate(self.x)

    def compose(self, other: "TorusIsometry") -> "TorusIsometry":
        # x_s + e_s (x_o + e_o y) = (x_s + e_s x_o) + e_s e_o y
        x = self.x.translate(other.x.invert() if self.inverts else other.x)
        return TorusIsometry(x, self.inverts != other.inverts)

    def inverse(self) -> "TorusIsometry":
        return TorusIsometry(self.x if self.inverts else self.x.invert(), self.inverts)

    def describe(self) -> dict:
        return {"inverts": self.inverts, "x": self.x.describe()}


@dataclass(frozen=True)
class ProductIsometry:
    """Componentwise action: torus part on both sheets, line part on heights."""

    torus_part: TorusIsometry
    line_part: LineIsometry

    @classmethod
    def identity(cls) -> "ProductIsometry":
        return cls(TorusIsometry.identity(), LineIsometry.identity())

    def apply(self, p: GluedPoint) -> GluedPoint:
        y = self.torus_part.apply(p.y)
        if p.is_compact:
            return GluedPoint.compact(y)
        return GluedPoint.cylinder(y, self.line_part.apply(p.t))

    def compose(self, other: "ProductIsometry") -> "ProductIsometry":
        return ProductIsometry(
            self.torus_part.compose(other.torus_part),
            self.line_part.compose(other.line_part),
        )

    def inverse(self) -> "ProductIsometry":
        return ProductIsometry(self.torus_part.inverse(), self.line_part.inverse())

    def describe(self) -> dict:
        return {"torus": self.torus_part.describe(), "line": self.line_part.describe()}


@dataclass(frozen=True)
class LiftedIsometry:
    """Isometry of the winding space determined by its line part.

    The torus part is derived, never free: for line part t -> e*t + c it is
    y -> g(c) + e*y, the unique choice mapping the winding graph to itself.
    """

    line_part: LineIsometry
    subgroup: OneParamSubgroup
    torus_part: TorusIsometry = None

    def __post_init__(self):
        require_exact(self.line_part.shift, "lift shift")
        derived = TorusIsometry(
            self.subgroup.point(self.line_part.shift), self.line_part.sign < 0
        )
        if self.torus_part is None:
            object.__setattr__(self, "torus_part", derived)
        elif self.torus_part != derived:
            raise ValueError("torus part must be the one derived from the line part")

    def apply(self, p: WindingPoint) -> WindingPoint:
        if p.is_compact:
            return WindingPoint.torus(self.torus_part.apply(p.y))
        return WindingPoint.line(self.line_part.apply(p.t))

    def as_product(self) -> ProductIsometry:
        return ProductIsometry(self.torus_part, self.line_part)

    def compose(self, other: "LiftedIsometry") -> "LiftedIsometry":
        if other.subgroup != self.subgroup:
            raise ValueError("cannot compose lifts over different winding lines")
        return LiftedIsometry(self.line_part.compose(other.line_part), self.subgroup)

    def inverse(self) -> "LiftedIsometry":
        return LiftedIsometry(self.line_part.inverse(), self.subgroup)

    def describe(self) -> dict:
        return {
            "line": self.line_part.describe(),
            "torus": self.torus_part.describe(),
            "subgroup": self.subgroup.describe(),
        }


def lift_line_isometry(line_iso: LineIsometry, subgroup: OneParamSubgroup) -> LiftedIsometry:
    """The unique winding-space isometry over a given line isometry."""
    return LiftedIsometry(line_iso, subgroup)


def line_transitivity_witness(t, s, subgroup: OneParamSubgroup) -> LiftedIsometry:
    """The lifted translation carrying (g(t), t) to (g(s), s).

    Its existence for every parameter pair makes the cylinder sheet a single
    orbit, in contrast to the dense non-closed orbits on the compact sheet.
    """
    iso = lift_line_isometry(LineIsometry.translation(s - t), subgroup)
    moved = iso.apply(WindingPoint.line(t))
    assert moved.t == s
    assert iso.torus_part.apply(subgroup.point(t)) == subgroup.point(s)
    return iso


# -- verification ------------------------------------------------------------------


@dataclass(frozen=True)
class PairFailure:
    p: object
    q: object
    d_before: Distance
    d_after: Distance

    def describe(self) -> dict:
        return {
            "p": self.p.describe(),
            "q": self.q.describe(),
            "d_before": self.d_before.describe(),
            "d_after": self.d_after.describe(),
        }


@dataclass
class VerificationReport:
    kind: str
    samples: int
    max_error: float
    failures: list[PairFailure]
    failures_total: int
    mode: ScalarMode

    @property
    def passed(self) -> bool:
        return self.failures_total == 0

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "samples": self.samples,
            "max_error": self.max_error,
            "failures": [f.describe() for f in self.failures],
            "failures_total": self.failures_total,
            "mode": self.mode.describe(),
            "passed": self.passed,
        }


def verify_isometry(
    apply_map,
    n: int,
    params: GluingParams,
    gram: GramMatrix,
    mode: ScalarMode = EXACT,
    seed: int = 0,
    space: str = "glued",
    subgroup: OneParamSubgroup | None = None,
    max_recorded: int = 25,
) -> VerificationReport:
    """Check d(f(p), f(q)) == d(p, q) on seeded sample pairs.

    Exact mode demands equal distance components; float mode allows
    mode.identity_eps of drift.  `apply_map` is any callable on points of
    the chosen space ('glued' or 'winding').
    """
    if space == "winding":
        if subgroup is None:
            raise ValueError("winding-space verification needs the subgroup")

        def dist(p, q):
            return winding_distance(p, q, params, gram, subgroup)

        def sample(rng):
            return random_winding_point(rng, 3 * max(1, int(as_float(params.M))), exact=mode.exact)

    elif space == "glued":

        def dist(p, q):
            return glued_distance(p, q, params, gram)

        def sample(rng):
            return random_glued_point(rng, 3 * max(1, int(as_float(params.M))), exact=mode.exact)

    else:
        raise ValueError("space must be 'glued' or 'winding'")

    failures: list[PairFailure] = []
    max_err = 0.0
    total_failures = 0
    for i in range(n):
        rng = rng_for(seed, i)
        p, q = sample(rng), sample(rng)
        d0 = dist(p, q)
        d1 = dist(apply_map(p), apply_map(q))
        err = abs(d0.value - d1.value)
        max_err = max(max_err, err)
        ok = d0.same_components(d1) if mode.exact else err <= mode.identity_eps
        if not ok:
            total_failures += 1
            if len(failures) < max_recorded:
                failures.append(PairFailure(p, q, d0, d1))
    return VerificationReport(space, n, max_err, failures, total_failures, mode)


# -- decomposition -----------------------------------------------------------------


def _fit_torus_action(images: list[tuple[TorusPoint, TorusPoint]]) -> TorusIsometry:
    """Identify y -> x + y or y -> x - y from probe images, exactly."""
    base_in, base_out = images[0]
    x_translate = base_out.translate(base_in.invert())
    if all(out == y.translate(x_translate) for y, out in images):
        return TorusIsometry.translation(x_translate)
    x_invert = base_out.translate(base_in)
    if all(out == y.invert().translate(x_invert) for y, out in images):
        return TorusIsometry(x_invert, True)
    raise TorusActionError(
        "torus action is neither a translation nor an inverted translation"
    )


def decompose_isometry(
    apply_map,
    params: GluingParams,
    gram: GramMatrix,
    mode: ScalarMode = EXACT,
    seed: int = 0,
    extra_probes: int = 4,
) -> ProductIsometry:
    """Recover (torus part, line part) from a black-box glued-space map.

    Raises ComponentSwapError if sheets are mixed, LineActionError if some
    line's induced height map is not an isometry of the reals,
    ProductFormError if different lines see different height maps or the
    final cross-check fails, and TorusActionError for torus actions outside
    the recognized family.
    """
    probes = [
        TorusPoint.origin(),
        TorusPoint(Fraction(1, 4), Fraction(1, 8)),
        TorusPoint(Fraction(1, 3), Fraction(1, 5)),
        TorusPoint(Fraction(5, 8), Fraction(2, 7)),
    ]
    for i in range(extra_probes):
        probes.append(random_torus_point(rng_for(seed, i), exact=True))

    # sheets must be preserved
    torus_images = []
    for y in probes:
        img = apply_map(GluedPoint.compact(y))
        if not img.is_compact:
            raise ComponentSwapError("a torus point landed on the cylinder")
        torus_images.append((y, img.y))
    t_probes = (Fraction(0), Fraction(1), Fraction(1, 3))
    line_maps = []
    for y in probes[:3]:
        heights = []
        for t in t_probes:
            img = apply_map(GluedPoint.cylinder(y, t))
            if img.is_compact:
                raise ComponentSwapError("a cylinder point landed on the torus")
            heights.append(img.t)
        c = heights[0]
        sgn = heights[1] - c
        if sgn == 1:
            sign = 1
        elif sgn == -1:
            sign = -1
        else:
            raise LineActionError("height map does not move unit steps to unit steps")
        if heights[2] != c + sign * Fraction(1, 3):
            raise LineActionError("height map is not affine with slope +-1")
        line_maps.append(LineIsometry(sign, c))
    if any(lm != line_maps[0] for lm in line_maps):
        raise ProductFormError("different cylinder lines induce different height maps")

    candidate = ProductIsometry(_fit_torus_action(torus_images), line_maps[0])

    # cross-check the candidate against the black box on mixed probes
    check_points = [GluedPoint.compact(y) for y in probes]
    check_points += [GluedPoint.cylinder(y, t) for y in probes for t in t_probes]
    for p in check_points:
        expect = candidate.apply(p)
        got = apply_map(p)
        if mode.exact:
            ok = expect == got
        else:
            ok = (
                expect.is_compact == got.is_compact
                and abs(as_float(expect.y.u1) - as_float(got.y.u1)) <= mode.eps
                and abs(as_float(expect.y.u2) - as_float(got.y.u2)) <= mode.eps
                and (expect.is_compact or abs(as_float(expect.t) - as_float(got.t)) <= mode.eps)
            )
        if not ok:
            raise ProductFormError("map disagrees with its fitted product form")
    return candidate


# -- the discrete family preserving a coordinate circle -----------------------------


@dataclass(frozen=True)
class SubtorusElement:
    """A lifted isometry carrying a coordinate circle to itself."""

    k: int
    kind: str  # "translation" | "reflection"
    parameter: object  # line shift c = k / alpha
    circle_shift: object  # induced move of the circle coordinate, frac(k / alpha)
    iso: LiftedIsometry

    def describe(self) -> dict:
        from .report import scalar_json

        return {
            "k": self.k,
            "kind": self.kind,
            "parameter": scalar_json(self.parameter),
            "circle_shift": scalar_json(self.circle_shift),
            "iso": self.iso.describe(),
        }


def subtorus_isometries(
    subgroup: OneParamSubgroup,
    subtorus: Subtorus,
    k_lo: int,
    k_hi: int,
) -> list[SubtorusElement]:
    """All lifts with shift c = k/alpha, k in [k_lo, k_hi]; they fix the circle.

    For the canonical direction (1, alpha) these are exactly the lifted
    isometries whose torus part maps the circle {(s, 0)} to itself:
    translations rotate it by frac(k/alpha), reflections mirror it.
    Membership of g(c) in the circle is asserted exactly.
    """
    if subtorus.free_axis != 0:
        raise ValueError("the winding direction (1, alpha) preserves only the first-axis circle")
    if subgroup.v1 != 1:
        raise ValueError("subtorus family requires the canonical direction (1, alpha)")
    alpha = subgroup.alpha
    out: list[SubtorusElement] = []
    for k in range(k_lo, k_hi + 1):
        c = k / alpha
        anchor = subgroup.point(c)
        if not subtorus.contains(anchor):
            raise AssertionError("anchor g(k/alpha) must lie on the circle")
        shift = subtorus.coordinate(anchor)
        for kind, sign in (("translation", 1), ("reflection", -1)):
            elem = lift_line_isometry(LineIsometry(sign, c), subgroup)
            out.append(SubtorusElement(k, kind, c, shift, elem))
    return out
