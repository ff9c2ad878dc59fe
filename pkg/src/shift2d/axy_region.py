"""Closed-form region predicates and six-way classification for the
three-parameter family of commuting 2-variable weighted shifts.

The family is parameterized by (a, x, y) in the open unit cube with
a*y < x.  Each structural property (subnormality, hyponormality,
semi-hyponormality, weak hyponormality) has an exact scalar criterion;
this module evaluates them with signed margins, cross-validates the
semi-hyponormality formula against the direct matrix route, and maps
the four booleans to the six mutually exclusive region labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mat2 import DEFAULT_TOL, PsdTolerance, Sym2, is_psd
from .shift_model import OutOfClass, build_axy
from .hypo_tests import (
    k_hypo_up_to,
    semi_hypo_test,
    six_point_test,
    weak_hypo_test,
)

__all__ = [
    "AxyPoint",
    "RegionLabel",
    "PredicateResult",
    "FormulaMismatch",
    "InconsistentLattice",
    "LABELS",
    "LABEL_CODES",
    "OUT_OF_CLASS",
    "BOUNDARY_BAND",
    "DEFAULT_WINDOW",
    "hypo_bound_y",
    "sub_bound_y",
    "weakhypo_bound_y",
    "sh_matrix",
    "is_hyponormal_cf",
    "is_subnormal_cf",
    "is_semihypo_cf",
    "is_weakhypo_cf",
    "classify",
    "classify_grid",
    "transcription_audit",
]


class FormulaMismatch(RuntimeError):
    """A closed-form predicate and its independent cross-route disagree
    decisively (beyond the boundary band)."""


class InconsistentLattice(RuntimeError):
    """Predicate outputs violate subnormal => hyponormal => (semi-hypo
    and weak-hypo) with every involved margin decisively off zero."""


#: Absolute half-width, in margin units, of the band around each region
#: boundary inside which labels carry boundary=True and cross-route
#: disagreements are not treated as errors.
BOUNDARY_BAND = 1e-9

#: The (x, y) window that showcases all sub-region geometry at a = 1/2:
#: (x_min, x_max, y_min, y_max).
DEFAULT_WINDOW = (0.45, 0.66, 0.95, 1.00)

LABELS = (
    "SUBNORMAL",
    "HYPO_NOT_SUB",
    "SH_AND_WH_NOT_H",
    "SH_NOT_WH",
    "WH_NOT_SH",
    "NEITHER",
)
LABEL_CODES = {name: i for i, name in enumerate(LABELS)}
#: Grid code for points outside the class domain (a*y >= x).
OUT_OF_CLASS = -1

SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class AxyPoint:
    """A parameter point of the family: all of a, x, y in (0, 1) and
    a*y < x (otherwise the beta weights fail to be contractive)."""

    a: float
    x: float
    y: float

    def __post_init__(self):
        a, x, y = self.a, self.x, self.y
        for name, v in (("a", a), ("x", x), ("y", y)):
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise OutOfClass(f"parameter {name} must be a finite real, got {v!r}")
            if not 0.0 < v < 1.0:
                raise OutOfClass(f"parameter {name} must lie in (0, 1), got {v}")
        if not a * y < x:
            raise OutOfClass(f"class requires a*y < x, got a*y = {a * y} >= x = {x}")


@dataclass(frozen=True)
class PredicateResult:
    """Boolean verdict with a signed margin (positive inside the region,
    negative outside, zero on the boundary curve) and per-route detail."""

    ok: bool
    margin: float
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class RegionLabel:
    """One of the six mutually exclusive labels plus the four signed
    margins, a boundary flag (some |margin| < BOUNDARY_BAND), and the
    method that produced the booleans."""

    label: str
    boundary: bool
    margins: dict
    method: str


# ------------------------------------------------------------ bound curves

def hypo_bound_y(a: float, x: float) -> float:
    """Largest y (at this a, x) for which the pair is hyponormal."""
    den = x * x * (1.0 - x * x) + (x * x - a * a) ** 2
    return x * math.sqrt((1.0 - x * x) / den)


def sub_bound_y(a: float, x: float) -> float:
    """Largest y (at this a, x) for which the pair is subnormal."""
    return math.sqrt((1.0 - x * x) / (1.0 - a * a))


def weakhypo_bound_y(a: float, x: float) -> float:
    """Largest y for which the pair is weakly hyponormal, clamped at 2.

    For a >= sqrt(1/2) every y qualifies (the quadratic-coefficient
    branch is always nonnegative), reported as the clamp value 2.0 so
    margins stay finite.
    """
    if a >= SQRT_HALF:
        return 2.0
    y_f = math.sqrt((1.0 - x * x) / (1.0 - 2.0 * a * a))
    p = x * x * (1.0 - x * x) + (2.0 * a * a - x * x) ** 2
    q = x * x * (1.0 - x * x)
    y_crit = math.sqrt(q / p)
    return min(max(y_f, y_crit), 2.0)


def sh_matrix(p: AxyPoint) -> Sym2:
    """The scalar 2x2 matrix whose positive semidefiniteness is
    equivalent to semi-hyponormality of the pair.

    It equals sqrt(x^2 + y^2) times the rotated difference of the level-1
    block square roots, so its PSD-ness matches the block route while
    its entries are closed-form in (a, x, y).
    """
    a, x, y = p.a, p.x, p.y
    q = x * x + y * y
    d11 = math.sqrt(q * (x - a * a * y) / x) - (x - y) ** 2 / 2.0
    d12 = (x * x - y * y) / 2.0
    d22 = math.sqrt(q * (x + a * a * y) / x) - (x + y) ** 2 / 2.0
    return Sym2(d11, d12, d22)


# ------------------------------------------------------- scalar predicates

def is_hyponormal_cf(p: AxyPoint, tol: PsdTolerance = DEFAULT_TOL) -> PredicateResult:
    """Hyponormality by the closed-form bound curve, cross-checked
    against the interval form (the same criterion solved for a^2)."""
    a, x, y = p.a, p.x, p.y
    bound = hypo_bound_y(a, x)
    margin = bound - y
    ok = margin >= 0.0

    # interval form: a^2 must lie within x*sqrt((1-x^2)(1-y^2))/y of x^2
    root = x * math.sqrt((1.0 - x * x) * (1.0 - y * y))
    lo = (x * x * y - root) / y
    hi = (x * x * y + root) / y
    ok_interval = lo <= a * a <= hi
    if ok != ok_interval and abs(margin) > BOUNDARY_BAND:
        raise FormulaMismatch(
            "hyponormality bound curve and interval form disagree at "
            f"(a, x, y) = ({a}, {x}, {y}): curve margin {margin}, "
            f"interval [{lo}, {hi}] vs a^2 = {a * a}"
        )
    return PredicateResult(ok, margin, {"bound": bound, "a2_interval": (lo, hi)})


def is_subnormal_cf(p: AxyPoint, tol: PsdTolerance = DEFAULT_TOL) -> PredicateResult:
    """Subnormality by the closed-form bound curve."""
    a, x, y = p.a, p.x, p.y
    bound = sub_bound_y(a, x)
    margin = bound - y
    ok = margin >= 0.0
    if x * x + y * y < 1.0 and not ok:
        # inside the unit disk the bound exceeds sqrt(1-x^2) > y, so a
        # failure here would be an arithmetic impossibility
        raise FormulaMismatch(
            f"subnormality must hold inside the unit disk, got margin {margin} "
            f"at (a, x, y) = ({a}, {x}, {y})"
        )
    return PredicateResult(ok, margin, {"bound": bound})


def is_semihypo_cf(p: AxyPoint, tol: PsdTolerance = DEFAULT_TOL) -> PredicateResult:
    """Semi-hyponormality by the two closed-form clauses, always
    cross-checked against the direct matrix route.

    Clause 1 bounds a^2 by x*(4(x^2+y^2) - (x-y)^4)/(4y(x^2+y^2))
    (equivalent to the matrix's (1,1) entry being nonnegative); clause 2
    is the rearranged determinant inequality.  The reported margin is
    the smallest eigenvalue of the matrix, the common scale on which
    both clauses act.
    """
    a, x, y = p.a, p.x, p.y
    q = x * x + y * y

    rhs1 = x * (4.0 * q - (x - y) ** 4) / (4.0 * y * q)
    margin1 = rhs1 - a * a
    clause1 = margin1 >= 0.0

    lhs2 = math.sqrt(q * (x + a * a * y) / x)
    rhs2 = (x + y) ** 2 / 2.0 + math.sqrt(
        (x + a * a * y) * (x - y) ** 4 / (4.0 * (x - a * a * y))
    )
    margin2 = lhs2 - rhs2
    clause2 = margin2 >= 0.0

    ok = clause1 and clause2

    m = sh_matrix(p)
    lam = m.eig_min()
    direct_ok = lam >= 0.0
    if ok != direct_ok and abs(lam) > BOUNDARY_BAND and (
        min(abs(margin1), abs(margin2)) > BOUNDARY_BAND
    ):
        raise FormulaMismatch(
            "semi-hyponormality clauses and matrix route disagree at "
            f"(a, x, y) = ({a}, {x}, {y}): clauses ({clause1}, {clause2}) "
            f"with margins ({margin1}, {margin2}), matrix eig_min {lam}"
        )
    return PredicateResult(
        ok,
        lam,
        {"clause1_margin": margin1, "clause2_margin": margin2, "matrix": m},
    )


def is_weakhypo_cf(p: AxyPoint, tol: PsdTolerance = DEFAULT_TOL) -> PredicateResult:
    """Weak hyponormality by the division-free branch criterion.

    Always true for a >= sqrt(1/2).  Otherwise true when the quadratic
    coefficient is nonnegative (y^2 (1 - 2a^2) <= 1 - x^2) or when the
    biquadratic discriminant allows it (P y^2 <= Q); the P, Q comparison
    avoids the removable singularity of the quotient form at x^2 = 2a^2.
    """
    a, x, y = p.a, p.x, p.y
    bound = weakhypo_bound_y(a, x)
    if a >= SQRT_HALF:
        ok = True
    else:
        f_branch = y * y * (1.0 - 2.0 * a * a) <= 1.0 - x * x
        pc = x * x * (1.0 - x * x) + (2.0 * a * a - x * x) ** 2
        qc = x * x * (1.0 - x * x)
        ok = f_branch or pc * y * y <= qc
    margin = bound - y
    # the branch booleans and the bound are the same criterion in two
    # arrangements; reconcile deterministically at the boundary
    if ok != (margin >= 0.0) and abs(margin) > BOUNDARY_BAND:
        raise FormulaMismatch(
            "weak-hyponormality branch criterion and bound curve disagree "
            f"at (a, x, y) = ({a}, {x}, {y}): branch {ok}, margin {margin}"
        )
    return PredicateResult(ok, margin, {"bound": bound})


# ------------------------------------------------------------ classification

def _label_from_flags(sub: bool, hypo: bool, sh: bool, wh: bool,
                      margins: dict, boundary: bool) -> str:
    """Map the four predicate booleans to one of the six labels,
    raising InconsistentLattice on decisive implication violations and
    reconciling within-band ones toward the stronger predicate."""
    decisive = {k: abs(v) > BOUNDARY_BAND for k, v in margins.items()}
    violations = []
    if sub and not hypo and decisive["sub"] and decisive["hypo"]:
        violations.append("subnormal but not hyponormal")
    if hypo and not sh and decisive["hypo"] and decisive["sh"]:
        violations.append("hyponormal but not semi-hyponormal")
    if hypo and not wh and decisive["hypo"] and decisive["wh"]:
        violations.append("hyponormal but not weakly hyponormal")
    if violations:
        raise InconsistentLattice(
            "; ".join(violations) + f" (margins {margins})"
        )

    # within the band, clip the weaker flags so the lattice holds
    sub = sub and hypo
    sh = sh or hypo
    wh = wh or hypo

    if hypo:
        return "SUBNORMAL" if sub else "HYPO_NOT_SUB"
    if sh and wh:
        return "SH_AND_WH_NOT_H"
    if sh:
        return "SH_NOT_WH"
    if wh:
        return "WH_NOT_SH"
    return "NEITHER"


def classify(p: AxyPoint, method: str = "closed-form",
             tol: PsdTolerance = DEFAULT_TOL) -> RegionLabel:
    """Assign the six-way region label at a parameter point.

    method='closed-form' evaluates the four scalar criteria;
    method='direct' builds the weight diagram and runs the block tests
    (six-point for hyponormality, order <= 5 moment matrices as the
    subnormality proxy, block square roots for semi-hyponormality, and
    the commutator pencil for weak hyponormality).  Margins always come
    from the closed forms: the direct tests return verdicts, not
    distances to a boundary.
    """
    if method not in ("closed-form", "direct"):
        raise ValueError(f"unknown method {method!r}")

    r_sub = is_subnormal_cf(p, tol)
    r_hypo = is_hyponormal_cf(p, tol)
    r_sh = is_semihypo_cf(p, tol)
    r_wh = is_weakhypo_cf(p, tol)
    margins = {
        "sub": r_sub.margin,
        "hypo": r_hypo.margin,
        "sh": r_sh.margin,
        "wh": r_wh.margin,
    }
    boundary = any(abs(v) < BOUNDARY_BAND for v in margins.values())

    if method == "closed-form":
        flags = (r_sub.ok, r_hypo.ok, r_sh.ok, r_wh.ok)
    else:
        d = build_axy(p.a, p.x, p.y)
        flags = (
            k_hypo_up_to(d, 5, tol=tol)["first_fail"] is None,
            six_point_test(d, tol=tol).passed,
            semi_hypo_test(d, tol=tol).passed,
            weak_hypo_test(d, tol=tol).passed,
        )

    label = _label_from_flags(*flags, margins=margins, boundary=boundary)
    return RegionLabel(label, boundary, margins, method)


# ------------------------------------------------------------- grid sweep

def classify_grid(a: float, xs: np.ndarray, ys: np.ndarray) -> dict:
    """Vectorized closed-form classification over a rectangular grid.

    xs and ys are 1-d arrays of coordinates.  Returns a dict of arrays
    of shape (len(xs), len(ys)): 'codes' (LABEL_CODES values, or
    OUT_OF_CLASS where a*y >= x), the four margin arrays (NaN outside
    the class), and the 'boundary' mask.  Raises InconsistentLattice on
    any decisive implication violation, like the scalar path.
    """
    if not 0.0 < a < 1.0:
        raise OutOfClass(f"parameter a must lie in (0, 1), got {a}")
    x = np.asarray(xs, dtype=float)[:, None]
    y = np.asarray(ys, dtype=float)[None, :]
    if np.any((x <= 0) | (x >= 1)) or np.any((y <= 0) | (y >= 1)):
        raise OutOfClass("grid coordinates must lie in the open interval (0, 1)")
    in_class = a * y < x
    x2, y2 = x * x, y * y

    with np.errstate(invalid="ignore", divide="ignore"):
        m_hypo = x * np.sqrt((1.0 - x2) / (x2 * (1.0 - x2) + (x2 - a * a) ** 2)) - y
        m_sub = np.sqrt((1.0 - x2) / (1.0 - a * a)) - y

        qq = x2 + y2
        d11 = np.sqrt(qq * (x - a * a * y) / x) - (x - y) ** 2 / 2.0
        d12 = (x2 - y2) / 2.0
        d22 = np.sqrt(qq * (x + a * a * y) / x) - (x + y) ** 2 / 2.0
        m_sh = 0.5 * (d11 + d22) - np.hypot(0.5 * (d11 - d22), d12)

        if a >= SQRT_HALF:
            m_wh = 2.0 - y
        else:
            y_f = np.sqrt((1.0 - x2) / (1.0 - 2.0 * a * a))
            pc = x2 * (1.0 - x2) + (2.0 * a * a - x2) ** 2
            y_crit = np.sqrt(x2 * (1.0 - x2) / pc)
            m_wh = np.minimum(np.maximum(y_f, y_crit), 2.0) - y

    margins = {}
    for name, m in (("sub", m_sub), ("hypo", m_hypo), ("sh", m_sh), ("wh", m_wh)):
        m = np.broadcast_to(m, (x.shape[0], y.shape[1])).copy()
        m[~in_class] = np.nan
        margins[name] = m

    sub = margins["sub"] >= 0
    hypo = margins["hypo"] >= 0
    sh = margins["sh"] >= 0
    wh = margins["wh"] >= 0
    decisive = {k: np.abs(v) > BOUNDARY_BAND for k, v in margins.items()}

    bad = in_class & (
        (sub & ~hypo & decisive["sub"] & decisive["hypo"])
        | (hypo & ~sh & decisive["hypo"] & decisive["sh"])
        | (hypo & ~wh & decisive["hypo"] & decisive["wh"])
    )
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise InconsistentLattice(
            f"implication violated at (a, x, y) = ({a}, {float(x[i, 0])}, "
            f"{float(y[0, j])}); margins "
            + str({k: float(v[i, j]) for k, v in margins.items()})
        )

    sub = sub & hypo
    sh = sh | hypo
    wh = wh | hypo

    codes = np.select(
        [hypo & sub, hypo, sh & wh, sh, wh],
        [LABEL_CODES["SUBNORMAL"], LABEL_CODES["HYPO_NOT_SUB"],
         LABEL_CODES["SH_AND_WH_NOT_H"], LABEL_CODES["SH_NOT_WH"],
         LABEL_CODES["WH_NOT_SH"]],
        default=LABEL_CODES["NEITHER"],
    )
    codes = np.where(in_class, codes, OUT_OF_CLASS)

    boundary = in_class & np.logical_or.reduce(
        [np.abs(m) < BOUNDARY_BAND for m in margins.values()]
    )
    return {"codes": codes, "boundary": boundary, "in_class": in_class, **margins}


# -------------------------------------------------------- transcription audit

def transcription_audit(a: float = 0.5, nx: int = 100, ny: int = 100,
                        window: tuple = DEFAULT_WINDOW) -> dict:
    """Compare the as-printed first clause of the semi-hyponormality
    formula against the direct matrix oracle over a grid.

    The as-printed clause bounds a^2 by
    x*(4x^2 - x^4 + 4x^3 y + 4y^2 - 6x^2 y^2 + 4x y^3 - y^3)/(4y(x^2+y^2)),
    whose trailing odd-degree monomial -y^3 breaks the otherwise
    even-degree pattern; the corrected reading ends in -y^4, making the
    numerator exactly x*(4(x^2+y^2) - (x-y)^4), which is what the matrix
    route supports.  The report counts decisive disagreements of each
    reading against the matrix's (1,1)-entry sign and is produced even
    when every count is zero.
    """
    x_min, x_max, y_min, y_max = window
    printed_bad = corrected_bad = checked = 0
    examples = []
    for i in range(nx):
        x = x_min + (i + 0.5) * (x_max - x_min) / nx
        for j in range(ny):
            y = y_min + (j + 0.5) * (y_max - y_min) / ny
            if not (0 < x < 1 and 0 < y < 1 and a * y < x):
                continue
            q = x * x + y * y
            d11 = math.sqrt(q * (x - a * a * y) / x) - (x - y) ** 2 / 2.0
            if abs(d11) <= BOUNDARY_BAND:
                continue
            checked += 1
            oracle = d11 >= 0.0
            num_printed = (4 * x ** 2 - x ** 4 + 4 * x ** 3 * y + 4 * y ** 2
                           - 6 * x ** 2 * y ** 2 + 4 * x * y ** 3 - y ** 3)
            num_corrected = 4.0 * q - (x - y) ** 4
            if (a * a <= x * num_printed / (4 * y * q)) != oracle:
                printed_bad += 1
                if len(examples) < 5:
                    examples.append((a, x, y))
            if (a * a <= x * num_corrected / (4 * y * q)) != oracle:
                corrected_bad += 1
    supported = ("corrected (-y^4)" if corrected_bad <= printed_bad
                 else "as-printed (-y^3)")
    return {
        "a": a,
        "window": window,
        "points_checked": checked,
        "printed_disagreements": printed_bad,
        "corrected_disagreements": corrected_bad,
        "supported_reading": supported,
        "examples": examples,
        "band": BOUNDARY_BAND,
    }
