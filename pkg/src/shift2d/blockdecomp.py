"""Homogeneous-level block structure of the two operator products.

For a commuting pair, the span K(n) of the basis vectors at lattice level
k1 + k2 = n reduces both products (adjoint-times-shift and
shift-times-adjoint).  On K(n) + K(n), after interleaving the two copies,
both restrictions split into a 1x1 head, n two-by-two middle blocks, and
a 1x1 tail; the head and tail of the second product vanish and its middle
blocks are rank one.  All large-matrix positivity questions in this
package reduce to those 2x2 blocks.

Basis convention inside level n: e_(0,n) first, then decreasing second
coordinate, ending at e_(n,0).  Middle block i (1-based, i = 1..n) pairs
the first copy of e_(i, n-i) with the second copy of e_(i-1, n-i+1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mat2 import Sym2
from .shift_model import WeightDiagram, alpha, beta


class LevelOutOfRange(ValueError):
    """Requested level index is negative."""


class NoStabilization(ValueError):
    """Diagram has a formula tail, so no level cap can be derived; the
    caller must supply one explicitly."""


@dataclass(frozen=True)
class BlockPair:
    """Aligned block forms of both restrictions at one level.

    l_head and l_tail are the 1x1 blocks of the first product (the
    corresponding blocks of the second vanish); l_mid[i-1] and r_mid[i-1]
    are the aligned middle blocks, r_mid entries rank one.
    """

    n: int
    l_head: float
    l_mid: tuple
    l_tail: float
    r_mid: tuple


@dataclass(frozen=True)
class CommutatorBlocks:
    """Self- and cross-commutators restricted to level n.

    a and d are the diagonals of the two self-commutators (each is
    diagonal on a level); b holds the superdiagonal of the cross
    commutator, whose matrix has no other nonzero entries: b[i-1] sits at
    row i-1, column i.  The combination for direction lam is
    diag(a) + lam * B + conj(lam) * B^T + |lam|^2 * diag(d).
    """

    n: int
    a: tuple
    d: tuple
    b: tuple


def _require_level(n: int):
    if n < 0:
        raise LevelOutOfRange(f"level must be nonnegative, got {n}")


def blocks(d: WeightDiagram, n: int, debug: bool = False) -> BlockPair:
    """Block data of both restrictions at level n.

    With debug=True the result is checked entrywise against a dense
    construction of the operators on a truncated box, including the
    reducing-subspace property; any disagreement raises AssertionError.
    """
    _require_level(n)
    l_head = alpha(d, 0, n) ** 2
    l_tail = beta(d, n, 0) ** 2
    l_mid = []
    r_mid = []
    for i in range(1, n + 1):
        l_mid.append(Sym2(
            alpha(d, i, n - i) ** 2,
            alpha(d, i - 1, n - i + 1) * beta(d, i, n - i),
            beta(d, i - 1, n - i + 1) ** 2,
        ))
        av = alpha(d, i - 1, n - i)
        bv = beta(d, i - 1, n - i)
        r_mid.append(Sym2(av * av, av * bv, bv * bv))
    pair = BlockPair(n, l_head, tuple(l_mid), l_tail, tuple(r_mid))
    if debug:
        _check_against_dense(d, pair)
    return pair


def commutator_blocks(d: WeightDiagram, n: int) -> CommutatorBlocks:
    """Diagonals and coupling of the three commutators at level n."""
    _require_level(n)
    a = []
    dd = []
    for i in range(n + 1):
        k1, k2 = i, n - i
        a_prev = alpha(d, k1 - 1, k2) ** 2 if k1 >= 1 else 0.0
        d_prev = beta(d, k1, k2 - 1) ** 2 if k2 >= 1 else 0.0
        a.append(alpha(d, k1, k2) ** 2 - a_prev)
        dd.append(beta(d, k1, k2) ** 2 - d_prev)
    b = []
    for i in range(1, n + 1):
        b.append(
            beta(d, i, n - i) * alpha(d, i - 1, n - i + 1)
            - alpha(d, i - 1, n - i) * beta(d, i - 1, n - i)
        )
    return CommutatorBlocks(n, tuple(a), tuple(dd), tuple(b))


def stabilization_level(d: WeightDiagram) -> int:
    """Level past which constant-tail block data repeats.

    Once n reaches the sum of the core dimensions, every weight consulted
    by the level-n blocks comes from clamped rows and columns, so the
    block inventory stops changing.  Formula tails never stabilize and
    raise NoStabilization.
    """
    if d.tail != "constant":
        raise NoStabilization(
            f"diagram {d.name or '<unnamed>'} has tail {d.tail!r}; "
            "supply an explicit level cap"
        )
    return d.n1 + d.n2


def effective_cap(d: WeightDiagram, cap: int | None) -> int:
    """Resolve a user cap: explicit wins, otherwise stabilization plus a
    safety margin of two levels."""
    if cap is not None:
        if cap < 0:
            raise LevelOutOfRange(f"cap must be nonnegative, got {cap}")
        return cap
    return stabilization_level(d) + 2


# ------------------------------------------------------------- debug oracle

def _dense_ops(d: WeightDiagram, b1: int, b2: int):
    dim = (b1 + 1) * (b2 + 1)
    t1 = np.zeros((dim, dim))
    t2 = np.zeros((dim, dim))
    for k1 in range(b1 + 1):
        for k2 in range(b2 + 1):
            src = k1 * (b2 + 1) + k2
            if k1 < b1:
                t1[src + (b2 + 1), src] = alpha(d, k1, k2)
            if k2 < b2:
                t2[src + 1, src] = beta(d, k1, k2)
    return t1, t2


def _check_against_dense(d: WeightDiagram, pair: BlockPair):
    """Dense verification: assemble both products on a box two steps past
    the level, restrict to the level, interleave, and compare entrywise.

    Sources at level n only reach level n + 1 before coming back, so a
    box of size n + 2 leaves no truncation error on the restriction.
    """
    n = pair.n
    b = n + 2
    t1, t2 = _dense_ops(d, b, b)
    l_ent = (t1.T @ t1, t2.T @ t1, t1.T @ t2, t2.T @ t2)
    r_ent = (t1 @ t1.T, t1 @ t2.T, t2 @ t1.T, t2 @ t2.T)

    level = [i * (b + 1) + (n - i) for i in range(n + 1)]
    keep = np.zeros(l_ent[0].shape[0], dtype=bool)
    keep[level] = True
    for ent in l_ent + r_ent:
        scale = max(1.0, float(np.abs(ent).max()))
        leak = float(np.abs(ent[~keep][:, level]).max()) if len(level) else 0.0
        if leak > 1e-14 * scale:
            raise AssertionError(
                f"level {n} does not reduce a product entry: leak {leak:.3g}"
            )

    sel = np.ix_(level, level)
    l_full = np.block([[l_ent[0][sel], l_ent[1][sel]],
                       [l_ent[2][sel], l_ent[3][sel]]])
    r_full = np.block([[r_ent[0][sel], r_ent[1][sel]],
                       [r_ent[2][sel], r_ent[3][sel]]])

    perm = [0]
    for i in range(1, n + 1):
        perm.extend([i, n + 1 + i - 1])
    perm.append(2 * n + 1)
    l_full = l_full[np.ix_(perm, perm)]
    r_full = r_full[np.ix_(perm, perm)]

    dim = 2 * (n + 1)
    l_want = np.zeros((dim, dim))
    r_want = np.zeros((dim, dim))
    l_want[0, 0] = pair.l_head
    l_want[dim - 1, dim - 1] = pair.l_tail
    for i, (lb, rb) in enumerate(zip(pair.l_mid, pair.r_mid)):
        o = 1 + 2 * i
        l_want[o:o + 2, o:o + 2] = [[lb.a11, lb.a12], [lb.a12, lb.a22]]
        r_want[o:o + 2, o:o + 2] = [[rb.a11, rb.a12], [rb.a12, rb.a22]]

    for got, want, label in ((l_full, l_want, "first"), (r_full, r_want, "second")):
        scale = max(1.0, float(np.abs(want).max()))
        err = float(np.abs(got - want).max())
        if err > 1e-12 * scale:
            raise AssertionError(
                f"{label} product blocks disagree with dense assembly at "
                f"level {n}: max error {err:.3g}"
            )
