"""Exact-formula kernel for real symmetric 2x2 matrices.

Every positivity decision in this package bottoms out here: trace and
determinant arithmetic, a tolerance-banded PSD test with an eigenvalue
witness, the closed-form square root

    sqrt(M) = (M + sqrt(det M) * I) / sqrt(tr M + 2 sqrt(det M)),

the singular special case sqrt(M) = M / sqrt(tr M), and the rank-one
flat-extension structure test.  Pure Python floats only; callers that
need batches vectorize on their side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class NotPsd(ValueError):
    """Matrix is not positive semidefinite within the tolerance band."""

    def __init__(self, msg: str, lambda_min: float = math.nan):
        super().__init__(msg)
        self.lambda_min = lambda_min


@dataclass(frozen=True)
class Sym2:
    """Real symmetric matrix [[a11, a12], [a12, a22]].

    Symmetry is structural (one off-diagonal field).  Entries must be
    finite; NaN or infinite entries are rejected at construction.
    """

    a11: float
    a12: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a22"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"Sym2 entry {name} must be finite, got {v!r}")

    @property
    def tr(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    @property
    def norm_f(self) -> float:
        return math.sqrt(
            self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22
        )

    def eig_min(self) -> float:
        # lambda_min = (tr - sqrt(tr^2 - 4 det))/2; the radicand equals
        # (a11 - a22)^2 + 4 a12^2, a sum of squares, so hypot is exact-safe.
        half_gap = math.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return 0.5 * (self.a11 + self.a22) - half_gap

    def eig_max(self) -> float:
        half_gap = math.hypot(0.5 * (self.a11 - self.a22), self.a12)
        return 0.5 * (self.a11 + self.a22) + half_gap

    def __add__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a11 + other.a11, self.a12 + other.a12, self.a22 + other.a22)

    def __sub__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a11 - other.a11, self.a12 - other.a12, self.a22 - other.a22)

    def scaled(self, s: float) -> "Sym2":
        return Sym2(self.a11 * s, self.a12 * s, self.a22 * s)

    def matmul(self, other: "Sym2") -> tuple:
        """Full 2x2 product (row-major tuple); product of two symmetric
        matrices is generally not symmetric."""
        return (
            self.a11 * other.a11 + self.a12 * other.a12,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a12 * other.a11 + self.a22 * other.a12,
            self.a12 * other.a12 + self.a22 * other.a22,
        )


ZERO = Sym2(0.0, 0.0, 0.0)
IDENT = Sym2(1.0, 0.0, 1.0)


@dataclass(frozen=True)
class PsdTolerance:
    """Acceptance band for PSD checks.

    A matrix M is accepted as PSD iff lambda_min(M) >= -rel * (1 + ||M||_F).
    """

    rel: float = 1e-10

    def __post_init__(self):
        if not (self.rel >= 0.0 and math.isfinite(self.rel)):
            raise ValueError(f"rel must be a finite nonnegative real, got {self.rel!r}")

    def band(self, m: Sym2) -> float:
        return self.rel * (1.0 + m.norm_f)


DEFAULT_TOL = PsdTolerance()


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of is_psd: decision plus the eigenvalue witness."""

    ok: bool
    lambda_min: float
    band: float

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SqrtDiffVerdict:
    """Outcome of sqrt_diff_psd: decision plus trace/determinant witnesses
    of the difference sqrt(l) - sqrt(r)."""

    ok: bool
    tr: float
    det: float
    lambda_min: float
    diff: Sym2

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class FlatExtension:
    """Outcome of flat_extension_check: decision plus the column ratio w
    with m = [[a11, a11*w], [w*a11, w*a11*w]] when ok."""

    ok: bool
    w: float

    def __bool__(self) -> bool:
        return self.ok


def is_psd(m: Sym2, tol: PsdTolerance = DEFAULT_TOL) -> PsdVerdict:
    """PSD test with relative eigenvalue slack.

    Accepts iff lambda_min(m) >= -tol.rel * (1 + ||m||_F); the witness
    lambda_min is returned either way.
    """
    lam = m.eig_min()
    band = tol.band(m)
    return PsdVerdict(lam >= -band, lam, band)


def sqrt_psd(m: Sym2, tol: PsdTolerance = DEFAULT_TOL) -> Sym2:
    """Closed-form principal square root of a PSD 2x2 matrix.

    S = (m + sqrt(det m) * I) / sqrt(tr m + 2 sqrt(det m)).  A determinant
    that is negative within the tolerance band is clamped to 0 first (exact
    rank-one inputs land there after rounding), which also recovers the
    singular form S = m / sqrt(tr m).  The zero matrix returns the zero
    matrix from a dedicated branch (the formula would divide by zero);
    that branch is a documented result, not an error.

    Raises NotPsd when the input fails is_psd under tol.
    """
    v = is_psd(m, tol)
    if not v.ok:
        raise NotPsd(
            f"matrix [[{m.a11}, {m.a12}], [{m.a12}, {m.a22}]] is not PSD: "
            f"lambda_min = {v.lambda_min:.6g} < -{v.band:.6g}",
            lambda_min=v.lambda_min,
        )
    d = m.det
    if d < 0.0:
        d = 0.0
    s = math.sqrt(d)
    t = m.tr + 2.0 * s
    if t <= 0.0:
        # PSD with nonpositive trace means m is the zero matrix (within band)
        return ZERO
    c = math.sqrt(t)
    return Sym2((m.a11 + s) / c, m.a12 / c, (m.a22 + s) / c)


def sqrt_diff_psd(l: Sym2, r: Sym2, tol: PsdTolerance = DEFAULT_TOL) -> SqrtDiffVerdict:
    """Decide sqrt(l) >= sqrt(r) in the PSD order.

    Both square roots go through sqrt_psd (NotPsd propagates if either
    input is indefinite); the verdict carries the trace and determinant
    of the difference as reporting witnesses.
    """
    diff = sqrt_psd(l, tol) - sqrt_psd(r, tol)
    v = is_psd(diff, tol)
    return SqrtDiffVerdict(v.ok, diff.tr, diff.det, v.lambda_min, diff)


def flat_extension_check(m: Sym2, tol: PsdTolerance = DEFAULT_TOL) -> FlatExtension:
    """Test whether m is the rank-one flat extension of its leading entry.

    For a11 > 0 this holds iff det m = 0 within tolerance; then w = a12/a11
    satisfies m = [[a11, a11*w], [w*a11, w*a11*w]].  A nonpositive leading
    entry cannot anchor a flat extension and returns ok = False.
    """
    if m.a11 <= 0.0:
        return FlatExtension(False, math.nan)
    scale = 1.0 + m.norm_f * m.norm_f  # det scales quadratically in the entries
    if abs(m.det) > tol.rel * scale:
        return FlatExtension(False, m.a12 / m.a11)
    return FlatExtension(True, m.a12 / m.a11)
