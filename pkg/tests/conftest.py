"""Shared oracles and fuzz generators.

The oracles here are deliberately independent of the package internals:
square roots via numpy eigendecomposition, moments via explicit path
products, and dense operator assembly on a truncated box.  Library code
is tested against these, never against itself.
"""

import numpy as np

from shift2d.mat2 import Sym2


# ---------------------------------------------------------------- sqrt oracle

def sqrt_oracle(m: Sym2) -> np.ndarray:
    """Principal square root via numpy eigendecomposition.

    Tiny negative eigenvalues (roundoff on singular inputs) are clamped
    to zero so the oracle stays defined on the PSD closure.
    """
    a = np.array([[m.a11, m.a12], [m.a12, m.a22]], dtype=float)
    w, v = np.linalg.eigh(a)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def sqrt_oracle_batch(mats: np.ndarray) -> np.ndarray:
    """Vectorized eigendecomposition square root for an (n, 2, 2) stack."""
    w, v = np.linalg.eigh(mats)
    w = np.clip(w, 0.0, None)
    return np.einsum("nij,nj,nkj->nik", v, np.sqrt(w), v)


def random_psd_batch(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """(n, 2, 2) stack of random PSD matrices G^T G with mixed magnitudes."""
    g = rng.normal(size=(n, 2, 2))
    mags = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=(n, 1, 1)))
    g = g * np.sqrt(mags) * scale
    return np.einsum("nji,njk->nik", g, g)


# ------------------------------------------------------------- diagram fuzz

def random_diagram(rng: np.random.Generator, n1: int, n2: int,
                   lo: float = 0.4, hi: float = 1.6):
    """Random commuting diagram with constant tails.

    The alpha core is free except that its last row must be constant (the
    tail rule forces that); the first beta row is free and the rest is
    propagated through the commutation relation in a fixed order
    (increasing k1, then k2), which makes the result commuting by
    construction.
    """
    from shift2d.shift_model import WeightDiagram

    alpha = rng.uniform(lo, hi, size=(n1, n2))
    alpha[n1 - 1, :] = rng.uniform(lo, hi)

    def al(k1, k2):
        return alpha[min(k1, n1 - 1), min(k2, n2 - 1)]

    beta = np.empty((n1, n2))
    beta[0, :] = rng.uniform(lo, hi, size=n2)
    for k1 in range(n1 - 1):
        for k2 in range(n2):
            beta[k1 + 1, k2] = al(k1, k2 + 1) * beta[k1, k2] / al(k1, k2)

    return WeightDiagram(
        alpha_core=tuple(tuple(row) for row in alpha),
        beta_core=tuple(tuple(row) for row in beta),
        tail="constant",
        name="fuzz",
    )


def random_embedding(rng: np.random.Generator, length: int,
                     lo: float = 0.4, hi: float = 1.6):
    """Random one-variable embedding pair: eta is a positive multiple of
    omega, which is exactly the commutation constraint."""
    from shift2d.shift_model import EmbeddingSpec

    omega = rng.uniform(lo, hi, size=length)
    r = rng.uniform(0.5, 2.0)
    return EmbeddingSpec(omega=tuple(omega), eta=tuple(r * omega))


# ------------------------------------------------------------- moment oracle

def moment_path_oracle(d, k1: int, k2: int, rng: np.random.Generator) -> float:
    """Moment via an explicitly random monotone lattice path from the
    origin, multiplying squared weights step by step."""
    from shift2d.shift_model import alpha, beta

    steps = [0] * k1 + [1] * k2
    rng.shuffle(steps)
    g = 1.0
    p1 = p2 = 0
    for s in steps:
        if s == 0:
            g *= alpha(d, p1, p2) ** 2
            p1 += 1
        else:
            g *= beta(d, p1, p2) ** 2
            p2 += 1
    return g


# --------------------------------------------------------- dense box oracle

def dense_ops(d, b1: int, b2: int):
    """Dense matrices of both shifts on the box [0..b1] x [0..b2].

    Basis order: index (k1, k2) -> k1 * (b2 + 1) + k2.  Truncation zeroes
    the weights that would leave the box, so only conclusions about
    sources at least two steps from the upper edges are trustworthy.
    """
    from shift2d.shift_model import alpha, beta

    dim = (b1 + 1) * (b2 + 1)
    t1 = np.zeros((dim, dim))
    t2 = np.zeros((dim, dim))

    def idx(k1, k2):
        return k1 * (b2 + 1) + k2

    for k1 in range(b1 + 1):
        for k2 in range(b2 + 1):
            if k1 < b1:
                t1[idx(k1 + 1, k2), idx(k1, k2)] = alpha(d, k1, k2)
            if k2 < b2:
                t2[idx(k1, k2 + 1), idx(k1, k2)] = beta(d, k1, k2)
    return t1, t2, idx


def dense_level_matrices(d, n: int):
    """L and R compressed to K(n) + K(n) by dense assembly.

    Returns (l_full, r_full), each 2(n+1) x 2(n+1), in the interleaved
    basis [f_0, f_1, s_0, f_2, s_1, ..., f_n, s_{n-1}, s_n] where f_i is
    e_(i, n-i) in the first copy and s_i the same vector in the second.
    Also verifies that the level subspace reduces all four entries (any
    leakage above 1e-14 of the entry scale raises).
    """
    b = n + 2
    t1, t2, idx = dense_ops(d, b, b)
    l_entries = [[t1.T @ t1, t2.T @ t1], [t1.T @ t2, t2.T @ t2]]
    r_entries = [[t1 @ t1.T, t1 @ t2.T], [t2 @ t1.T, t2 @ t2.T]]

    level = [idx(i, n - i) for i in range(n + 1)]
    inside = set(level)
    for ent in (*l_entries[0], *l_entries[1], *r_entries[0], *r_entries[1]):
        scale = max(1.0, np.abs(ent).max())
        for src in level:
            col = ent[:, src].copy()
            col[list(inside)] = 0.0
            if np.abs(col).max() > 1e-14 * scale:
                raise AssertionError("level subspace does not reduce an entry")

    def restrict(ent):
        return ent[np.ix_(level, level)]

    l_res = np.block([[restrict(l_entries[0][0]), restrict(l_entries[0][1])],
                      [restrict(l_entries[1][0]), restrict(l_entries[1][1])]])
    r_res = np.block([[restrict(r_entries[0][0]), restrict(r_entries[0][1])],
                      [restrict(r_entries[1][0]), restrict(r_entries[1][1])]])

    perm = [0]
    for i in range(1, n + 1):
        perm.extend([i, n + 1 + i - 1])
    perm.append(2 * n + 1)
    return l_res[np.ix_(perm, perm)], r_res[np.ix_(perm, perm)]


def blocks_to_dense(pair) -> tuple:
    """Assemble the BlockPair content into dense matrices in the same
    interleaved order used by dense_level_matrices."""
    n = pair.n
    dim = 2 * (n + 1)
    l = np.zeros((dim, dim))
    r = np.zeros((dim, dim))
    l[0, 0] = pair.l_head
    for i, blk in enumerate(pair.l_mid):
        o = 1 + 2 * i
        l[o:o + 2, o:o + 2] = [[blk.a11, blk.a12], [blk.a12, blk.a22]]
    l[dim - 1, dim - 1] = pair.l_tail
    for i, blk in enumerate(pair.r_mid):
        o = 1 + 2 * i
        r[o:o + 2, o:o + 2] = [[blk.a11, blk.a12], [blk.a12, blk.a22]]
    return l, r


# ------------------------------------------------------ acceptance reporting

ACCEPTANCE_LINES = {}


def record_criterion(n: int, ok: bool) -> str:
    """Register the one-line outcome of an acceptance criterion; the line
    is echoed in the terminal summary so it is visible whether or not the
    test's own stdout is shown."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}"
    ACCEPTANCE_LINES[n] = line
    return line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
