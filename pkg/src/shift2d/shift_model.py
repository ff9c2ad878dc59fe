"""Finite presentations of commuting pairs of weighted shifts on the
two-dimensional lattice.

A diagram stores two rectangular weight cores (alpha moves along the
first axis, beta along the second) plus a tail rule saying how weights
continue outside the core: either clamped repetition of the last row and
column ("constant") or a registered closed formula ("formula:<id>").
Moments, block restrictions and every positivity test read weights only
through the two lookup functions here, so the tail rule is a single
point of truth.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class NonCommuting(ValueError):
    """Weight diagram violates the commutation identities.

    Carries the worst violation magnitude and the first few violating
    lattice points in .report.
    """

    def __init__(self, msg: str, report: tuple = (), worst: float = math.nan):
        super().__init__(msg)
        self.report = report
        self.worst = worst


class NonPositiveWeight(ValueError):
    """A weight entry is zero, negative, or not finite."""


class OutOfClass(ValueError):
    """Parameters fall outside the domain of the requested family."""


class SchemaError(ValueError):
    """Weight file or embedding file does not match the expected schema."""


class Overflow(ArithmeticError):
    """Moment computation left the double-precision range."""


# ------------------------------------------------------------------ tails

def _da_alpha(k1: int, k2: int) -> float:
    return math.sqrt((k1 + 1.0) / (k1 + k2 + 1.0))


def _da_beta(k1: int, k2: int) -> float:
    return math.sqrt((k2 + 1.0) / (k1 + k2 + 1.0))


# registered closed-formula tails: id -> (alpha(k1,k2), beta(k1,k2))
FORMULA_TAILS: dict[str, tuple[Callable, Callable]] = {
    "drury-arveson": (_da_alpha, _da_beta),
}


@dataclass(frozen=True)
class WeightDiagram:
    """Weight data of a pair of shifts, as row-major cores plus tail rule.

    alpha_core[k1][k2] and beta_core[k1][k2] give the weights inside the
    core; outside, "constant" clamps indices to the last row/column and
    "formula:<id>" evaluates the registered closed form everywhere.
    """

    alpha_core: tuple
    beta_core: tuple
    tail: str = "constant"
    name: str = ""

    @property
    def n1(self) -> int:
        return len(self.alpha_core)

    @property
    def n2(self) -> int:
        return len(self.alpha_core[0])

    def formula_id(self) -> str | None:
        if self.tail == "constant":
            return None
        return self.tail.split(":", 1)[1]


def _formula_pair(d: WeightDiagram) -> tuple[Callable, Callable]:
    fid = d.formula_id()
    if fid not in FORMULA_TAILS:
        raise SchemaError(f"unknown formula tail {d.tail!r}")
    return FORMULA_TAILS[fid]


def alpha(d: WeightDiagram, k1: int, k2: int) -> float:
    """First-direction weight at lattice point (k1, k2)."""
    if d.tail == "constant":
        return d.alpha_core[min(k1, d.n1 - 1)][min(k2, d.n2 - 1)]
    return _formula_pair(d)[0](k1, k2)


def beta(d: WeightDiagram, k1: int, k2: int) -> float:
    """Second-direction weight at lattice point (k1, k2)."""
    if d.tail == "constant":
        return d.beta_core[min(k1, d.n1 - 1)][min(k2, d.n2 - 1)]
    return _formula_pair(d)[1](k1, k2)


# --------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    points_checked: int
    violations: tuple = ()
    worst: float = 0.0


def _check_core_shape(core, label: str):
    if not core or not core[0]:
        raise SchemaError(f"{label} core must be a non-empty rectangle")
    width = len(core[0])
    for row in core:
        if len(row) != width:
            raise SchemaError(f"{label} core rows have unequal lengths")


def validate(d: WeightDiagram, max_reported: int = 10) -> ValidationReport:
    """Check positivity and the commutation identities on the core plus a
    surrounding ring.

    The identity is beta(k + e1) * alpha(k) = alpha(k + e2) * beta(k) for
    every k; it is checked to relative 1e-12.  Raises NonPositiveWeight or
    NonCommuting (with the first violations and the worst magnitude);
    returns a report when everything holds.
    """
    _check_core_shape(d.alpha_core, "alpha")
    _check_core_shape(d.beta_core, "beta")
    if len(d.beta_core) != d.n1 or len(d.beta_core[0]) != d.n2:
        raise SchemaError("alpha and beta cores must have the same shape")
    if d.tail != "constant":
        _formula_pair(d)  # raises SchemaError on unknown id

    for core, label in ((d.alpha_core, "alpha"), (d.beta_core, "beta")):
        for k1, row in enumerate(core):
            for k2, w in enumerate(row):
                if not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0.0):
                    raise NonPositiveWeight(
                        f"{label}[{k1}][{k2}] = {w!r} is not a positive finite real"
                    )

    # one ring past the core catches every clamp seam; formula tails get a
    # second ring since nothing stabilizes there
    reach1 = d.n1 + (1 if d.tail == "constant" else 2)
    reach2 = d.n2 + (1 if d.tail == "constant" else 2)
    violations = []
    worst = 0.0
    points = 0
    for k1 in range(reach1 + 1):
        for k2 in range(reach2 + 1):
            points += 1
            lhs = beta(d, k1 + 1, k2) * alpha(d, k1, k2)
            rhs = alpha(d, k1, k2 + 1) * beta(d, k1, k2)
            err = abs(lhs - rhs)
            scale = max(abs(lhs), abs(rhs), 1e-300)
            if err > 1e-12 * scale:
                worst = max(worst, err / scale)
                if len(violations) < max_reported:
                    violations.append((k1, k2, lhs, rhs))
    if violations:
        raise NonCommuting(
            f"commutation identity fails at {len(violations)} point(s), "
            f"first at {violations[0][:2]}, worst relative error {worst:.3g}",
            report=tuple(violations),
            worst=worst,
        )
    return ValidationReport(True, points)


# ------------------------------------------------------------------ moments

@dataclass(frozen=True)
class MomentTable:
    """Moments gamma[k1, k2] on the box [0..K1] x [0..K2], gamma[0,0] = 1."""

    gamma: np.ndarray

    @property
    def k1_max(self) -> int:
        return self.gamma.shape[0] - 1

    @property
    def k2_max(self) -> int:
        return self.gamma.shape[1] - 1

    def at(self, k1: int, k2: int) -> float:
        return float(self.gamma[k1, k2])


def moments(d: WeightDiagram, K1: int, K2: int, debug: bool = False,
            rng: np.random.Generator | None = None) -> MomentTable:
    """Moment table filled along canonical paths (right along the first
    axis, then up).

    Each step multiplies by the squared weight of the edge crossed.  With
    debug=True, 100 random monotone paths are recomputed from scratch and
    compared to the table at relative 1e-12; a mismatch means the diagram
    does not commute and raises NonCommuting.  Raises Overflow if any
    entry leaves the finite positive double range.
    """
    if K1 < 0 or K2 < 0:
        raise ValueError("moment box bounds must be nonnegative")
    g = np.empty((K1 + 1, K2 + 1))
    with np.errstate(over="ignore"):
        g[0, 0] = 1.0
        for k1 in range(K1):
            g[k1 + 1, 0] = g[k1, 0] * alpha(d, k1, 0) ** 2
        for k2 in range(K2):
            for k1 in range(K1 + 1):
                g[k1, k2 + 1] = g[k1, k2] * beta(d, k1, k2) ** 2
    if not np.isfinite(g).all() or (g <= 0.0).any():
        raise Overflow(
            f"moments on [0..{K1}] x [0..{K2}] leave the positive double range"
        )
    if debug:
        if rng is None:
            rng = np.random.default_rng(0)
        for _ in range(100):
            k1 = int(rng.integers(0, K1 + 1))
            k2 = int(rng.integers(0, K2 + 1))
            steps = [0] * k1 + [1] * k2
            rng.shuffle(steps)
            val = 1.0
            p1 = p2 = 0
            for s in steps:
                if s == 0:
                    val *= alpha(d, p1, p2) ** 2
                    p1 += 1
                else:
                    val *= beta(d, p1, p2) ** 2
                    p2 += 1
            ref = g[k1, k2]
            if abs(val - ref) > 1e-12 * max(abs(val), abs(ref)):
                raise NonCommuting(
                    f"moment at ({k1}, {k2}) is path-dependent: "
                    f"{val!r} vs {ref!r}",
                    report=((k1, k2, val, ref),),
                    worst=abs(val - ref) / max(abs(val), abs(ref)),
                )
    return MomentTable(gamma=g)


# ----------------------------------------------------------------- builders

def build_axy(a: float, x: float, y: float) -> WeightDiagram:
    """Three-parameter family: alpha is x at the origin, a along the rest
    of the first row, 1 from the second row on; beta is y at the origin,
    a*y/x down the rest of the first column, 1 from the second column on.

    Domain: 0 < a, x, y < 1 and a*y < x.
    """
    for label, v in (("a", a), ("x", x), ("y", y)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and 0.0 < v < 1.0):
            raise OutOfClass(f"parameter {label} = {v!r} must lie strictly in (0, 1)")
    if not a * y < x:
        raise OutOfClass(f"need a*y < x, got a*y = {a * y!r} >= x = {x!r}")
    r = a * y / x
    return WeightDiagram(
        alpha_core=((x, a, a), (1.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
        beta_core=((y, 1.0, 1.0), (r, 1.0, 1.0), (r, 1.0, 1.0)),
        tail="constant",
        name=f"axy({a!r},{x!r},{y!r})",
    )


def build_drury_arveson(depth: int = 4) -> WeightDiagram:
    """Row-contraction shift pair with alpha = sqrt((k1+1)/(k1+k2+1)) and
    beta = sqrt((k2+1)/(k1+k2+1)); formula tail, core sampled to depth."""
    if depth < 2:
        raise ValueError(f"depth must be at least 2, got {depth}")
    al = tuple(tuple(_da_alpha(i, j) for j in range(depth)) for i in range(depth))
    be = tuple(tuple(_da_beta(i, j) for j in range(depth)) for i in range(depth))
    return WeightDiagram(al, be, tail="formula:drury-arveson", name="drury-arveson")


def build_helton_howe() -> WeightDiagram:
    """Both shifts have all weights equal to one."""
    return WeightDiagram(((1.0,),), ((1.0,),), tail="constant", name="helton-howe")


def build_ex215(a: float, b: float) -> WeightDiagram:
    """Two-parameter diagram with 4x4 core used as a positivity
    counterexample source.  Domain: 0 < a < b < 1."""
    if not (0.0 < a < b < 1.0):
        raise OutOfClass(f"need 0 < a < b < 1, got a = {a!r}, b = {b!r}")
    aa, ab, bb = a * a, a * b, b * b
    alpha_row = (aa, ab, bb, bb)
    ones = (1.0, 1.0, 1.0, 1.0)
    return WeightDiagram(
        alpha_core=(alpha_row, alpha_row, ones, ones),
        beta_core=(
            (aa, aa, 1.0, 1.0),
            (ab, ab, 1.0, 1.0),
            (bb, bb, 1.0, 1.0),
            (bb, bb, 1.0, 1.0),
        ),
        tail="constant",
        name=f"ex215({a!r},{b!r})",
    )


def build_ex216(a: float, b: float) -> WeightDiagram:
    """Two-parameter diagram with 3x3 core whose first-level blocks have a
    closed-form square root.  Domain: a > 1/2, b > 0."""
    if not a > 0.5:
        raise OutOfClass(f"need a > 1/2, got a = {a!r}")
    if not b > 0.0:
        raise OutOfClass(f"need b > 0, got b = {b!r}")
    ones = (1.0, 1.0, 1.0)
    return WeightDiagram(
        alpha_core=((a, 1.0, 1.0), ones, ones),
        beta_core=(
            (b, 2.0 * b, 2.0 * b),
            (b / a, 2.0 * b, 2.0 * b),
            (b / a, 2.0 * b, 2.0 * b),
        ),
        tail="constant",
        name=f"ex216({a!r},{b!r})",
    )


# --------------------------------------------------------------- embeddings

@dataclass(frozen=True)
class EmbeddingSpec:
    """One-variable weight sequences omega (first axis) and eta (second),
    each eventually constant (the last entry repeats).  Commutation of the
    induced pair forces eta to be a constant multiple of omega."""

    omega: tuple
    eta: tuple

    def ratio(self) -> float:
        return self.eta[0] / self.omega[0]


def _seq(s: tuple, i: int) -> float:
    return s[min(i, len(s) - 1)]


def validate_embedding(e: EmbeddingSpec) -> float:
    """Check positivity and proportionality; returns the weight ratio."""
    if not e.omega or not e.eta:
        raise SchemaError("embedding sequences must be non-empty")
    for label, seq in (("omega", e.omega), ("eta", e.eta)):
        for i, w in enumerate(seq):
            if not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0.0):
                raise NonPositiveWeight(
                    f"{label}[{i}] = {w!r} is not a positive finite real"
                )
    r = e.ratio()
    reach = max(len(e.omega), len(e.eta)) + 1
    bad = []
    worst = 0.0
    for i in range(reach):
        lhs = _seq(e.eta, i)
        rhs = r * _seq(e.omega, i)
        err = abs(lhs - rhs)
        if err > 1e-12 * max(abs(lhs), abs(rhs)):
            worst = max(worst, err / max(abs(lhs), abs(rhs)))
            if len(bad) < 10:
                bad.append((i, lhs, rhs))
    if bad:
        raise NonCommuting(
            "embedding sequences are not proportional, so the induced pair "
            f"does not commute; first mismatch at index {bad[0][0]}",
            report=tuple(bad),
            worst=worst,
        )
    return r


def build_embedding(e: EmbeddingSpec) -> WeightDiagram:
    """Diagram with alpha(k1, k2) = omega(k1 + k2) and beta = eta(k1 + k2).

    The diagonal dependence makes the clamped core reproduce the sequences
    exactly once the core is as deep as the longer sequence.
    """
    validate_embedding(e)
    n = max(len(e.omega), len(e.eta))
    al = tuple(tuple(_seq(e.omega, i + j) for j in range(n)) for i in range(n))
    be = tuple(tuple(_seq(e.eta, i + j) for j in range(n)) for i in range(n))
    return WeightDiagram(al, be, tail="constant", name="embedding")


# -------------------------------------------------------------- persistence

def _fmt(v: float) -> str:
    return "%.17g" % v


def save_weights(d: WeightDiagram, path: str) -> None:
    """Write the diagram as JSON with 17-significant-digit floats.

    The file is assembled by hand so every weight round-trips bit for bit.
    """
    def rows(core):
        return ",\n".join(
            "      [" + ", ".join(_fmt(w) for w in row) + "]" for row in core
        )

    text = (
        "{\n"
        f'  "name": {json.dumps(d.name)},\n'
        f'  "tail": {json.dumps(d.tail)},\n'
        '  "alpha": [\n' + rows(d.alpha_core) + "\n  ],\n"
        '  "beta": [\n' + rows(d.beta_core) + "\n  ]\n"
        "}\n"
    )
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


def load_weights(path: str) -> WeightDiagram:
    """Read a diagram written by save_weights (or by hand) and validate it.

    Formula tails are re-derived from the registry and the stored core is
    checked against the formula to relative 1e-12; disagreement means the
    file does not describe what its tail claims and raises SchemaError.
    """
    if not os.path.exists(path):
        raise OSError(f"weight file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"weight file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("weight file must contain a JSON object")
    for key in ("alpha", "beta"):
        if key not in raw:
            raise SchemaError(f"weight file missing key {key!r}")
    tail = raw.get("tail", "constant")
    name = raw.get("name", "")
    if not isinstance(tail, str) or not (
        tail == "constant" or tail.startswith("formula:")
    ):
        raise SchemaError(f"tail must be 'constant' or 'formula:<id>', got {tail!r}")
    if not isinstance(name, str):
        raise SchemaError("name must be a string")

    def parse_core(key):
        core = raw[key]
        if not isinstance(core, list) or not core:
            raise SchemaError(f"{key} must be a non-empty list of rows")
        out = []
        for row in core:
            if not isinstance(row, list) or not row:
                raise SchemaError(f"{key} rows must be non-empty lists")
            for w in row:
                if isinstance(w, bool) or not isinstance(w, (int, float)):
                    raise SchemaError(f"{key} entries must be numbers, got {w!r}")
            out.append(tuple(float(w) for w in row))
        return tuple(out)

    d = WeightDiagram(parse_core("alpha"), parse_core("beta"), tail=tail, name=name)
    validate(d)
    if d.tail != "constant":
        af, bf = _formula_pair(d)
        for k1 in range(d.n1):
            for k2 in range(d.n2):
                for got, want, lab in (
                    (d.alpha_core[k1][k2], af(k1, k2), "alpha"),
                    (d.beta_core[k1][k2], bf(k1, k2), "beta"),
                ):
                    if abs(got - want) > 1e-12 * max(abs(got), abs(want), 1e-300):
                        raise SchemaError(
                            f"stored {lab}[{k1}][{k2}] = {got!r} disagrees with "
                            f"formula tail {d.tail!r} value {want!r}"
                        )
    return d
