"""Discounted agreement between a target and a hypothesis automaton.

A word ``u`` carries weight ``(1 - alpha) * (alpha / |A|) ** len(u)``; the
weights of all words sum to one. The progress of hypothesis ``h`` towards
target ``t`` is the total weight of the words on which they agree.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order
from scipy.sparse.linalg import bicgstab, spsolve

from .automata import Dfa
from .errors import InputError


# below this many product states a direct solve is cheaper than BiCGSTAB
KRYLOV_MIN = 500
# error bound a Krylov solution must certify, else the LU solve is used
KRYLOV_CERTIFY = 5e-13


def _check(t: Dfa, h: Dfa, alpha: float):
    if t.alphabet != h.alphabet:
        raise InputError(f"alphabet mismatch: {t.alphabet!r} vs {h.alphabet!r}")
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie strictly between 0 and 1, got {alpha}")


def product(t: Dfa, h: Dfa):
    """Reachable part of the product automaton.

    Returns ``(succ, agree)``: ``succ[i, a]`` is the successor of product
    state ``i`` on symbol ``a`` (state 0 is the start pair) and ``agree[i]``
    says whether both components accept or both reject.
    """
    nh = h.n_states
    k = len(t.alphabet)
    full = (t.delta[:, None, :] * nh + h.delta[None, :, :]).reshape(-1, k)
    m = full.shape[0]
    graph = sparse.csr_matrix(
        (np.ones(m * k, dtype=np.int8), (np.repeat(np.arange(m), k), full.ravel())), shape=(m, m)
    )
    order = breadth_first_order(graph, t.initial * nh + h.initial, return_predecessors=False)
    rename = np.full(m, -1, dtype=np.int64)
    rename[order] = np.arange(len(order))
    agree = t.accepting[order // nh] == h.accepting[order % nh]
    return rename[full[order]], agree


def _transition_matrix(succ: np.ndarray) -> sparse.csr_matrix:
    m, k = succ.shape
    rows = np.repeat(np.arange(m), k)
    return sparse.csr_matrix((np.full(m * k, 1.0 / k), (rows, succ.ravel())), shape=(m, m))


def progress(t: Dfa, h: Dfa, alpha: float, method: str = "krylov", tol: float = 1e-12) -> float:
    """Exact discounted agreement of ``h`` with ``t``.

    Solves ``f = (1 - alpha) * agree + alpha * P f`` on the product automaton,
    where ``P`` moves to each successor with probability ``1/|A|``, and
    returns ``f`` at the start state. Methods:

    ``"iterate"``
        fixed-point iteration until the sup-norm update is at most ``tol``;
        the reference, but slow for ``alpha`` close to one. The error left
        is at most ``tol * alpha / (1 - alpha)``.
    ``"solve"``
        sparse LU solve.
    ``"krylov"``
        BiCGSTAB on products of at least ``KRYLOV_MIN`` states, falling
        back to the LU solve if it stalls or its residual cannot certify
        the value to ``KRYLOV_CERTIFY``; smaller systems go straight to LU.
    """
    _check(t, h, alpha)
    succ, agree = product(t, h)
    if agree.all() or not agree.any():
        return 1.0 if agree.all() else 0.0
    b = (1.0 - alpha) * agree.astype(float)
    if method == "iterate":
        k = succ.shape[1]
        f = b.copy()
        while True:
            nxt = b + (alpha / k) * f[succ].sum(axis=1)
            step = np.abs(nxt - f).max()
            f = nxt
            if step <= tol:
                break
        value = f[0]
    elif method in ("solve", "krylov"):
        m = succ.shape[0]
        a = sparse.identity(m, format="csr") - alpha * _transition_matrix(succ)
        value = None
        if method == "krylov" and m >= KRYLOV_MIN:
            with np.errstate(invalid="ignore", divide="ignore"):
                x, info = bicgstab(a, b, rtol=1e-15, atol=0.0, maxiter=10 * m)
                r = b - a @ x
                # one refinement step; it may report breakdown on a residual
                # this small, so only the residual decides whether it helped
                d, _ = bicgstab(a, r, rtol=1e-6, atol=0.0, maxiter=10 * m)
                r2 = r - a @ d
            if np.abs(r2).max() < np.abs(r).max():
                x, r = x + d, r2
            # |x - f|_inf <= |residual|_inf / (1 - alpha)
            if info == 0 and np.abs(r).max() / (1.0 - alpha) <= KRYLOV_CERTIFY:
                value = x[0]
        if value is None:
            value = spsolve(a.tocsc(), b)[0]
    else:
        raise InputError(f"unknown method {method!r}")
    return float(min(1.0, max(0.0, value)))


def truncation_length(alpha: float, tol: float) -> int:
    """Smallest ``L`` with ``alpha ** (L + 1) <= tol``."""
    if tol <= 0:
        raise InputError("tol must be positive")
    if tol >= 1:
        return 0
    length = max(0, math.ceil(math.log(tol) / math.log(alpha)) - 1)
    while alpha ** (length + 1) > tol:
        length += 1
    while length > 0 and alpha**length <= tol:
        length -= 1
    return length


def progress_truncated(t: Dfa, h: Dfa, alpha: float, tol: float = 1e-9) -> float:
    """Partial sum of the agreement series over words of length ``<= L``.

    ``L`` is the :func:`truncation_length`, so the neglected tail weighs at
    most ``tol``. The fraction of length-``n`` words on which the automata
    agree comes from pushing a uniform word distribution through the
    product automaton one symbol at a time.
    """
    _check(t, h, alpha)
    succ, agree = product(t, h)
    m, k = succ.shape
    mass = np.zeros(m)
    mass[0] = 1.0
    total = 0.0
    weight = 1.0 - alpha
    for _ in range(truncation_length(alpha, tol) + 1):
        total += weight * mass[agree].sum()
        weight *= alpha
        nxt = np.zeros(m)
        for a in range(k):
            np.add.at(nxt, succ[:, a], mass / k)
        mass = nxt
    return total
