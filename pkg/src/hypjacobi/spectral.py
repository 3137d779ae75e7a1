"""Truncated complex Jacobi operators and their discrete spectrum.

The J-fraction coefficients define a complex symmetric tridiagonal matrix

    J = tridiag(b_{k-1}; a_k; b_k),     J_0 = tridiag(1; 0; 1),

with J - J_0 trace class, so the essential spectrum is the band [-2, 2] and
B(z) = <(J - z)^{-1} e, e> is meromorphic off the band with poles exactly at
the eigenvalues of J.  This module evaluates B by resolvent and by the
continued fraction, filters truncation spectra for stable eigenvalues,
bounds the trace norm of J - J_0, and maps eigenvalues back to zeros of the
underlying hypergeometric function through w = -4/(z-2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import solve_banded

from .cfrac import (
    c_coeff,
    c_is_zero,
    cf_ratio_eval,
    jacobi_coeffs,
    offdiag_roots,
    require_nondegenerate,
)
from .errors import (
    CNonpositiveInteger,
    EigensolverFailure,
    NearPole,
    NearSingular,
    NoConvergence,
    OnBand,
    ShiftInvalid,
)
from .hyp import HypParams, validate_params

#: eigenvalues within this distance of [-2, 2] are never retained
BAND_GUARD = 1e-6

#: b_function refuses evaluation this close to the band
BAND_EVAL_GUARD = 1e-9

#: resolvent solves with solution norm beyond this raise NearSingular
GROWTH_LIMIT = 1e12

#: eigenpair residual contract, relative to the operator norm
EIG_RESIDUAL = 1e-8

#: truncation orders for the adaptive resolvent path
RESOLVENT_N0 = 64
RESOLVENT_NMAX = 4096

#: retained eigenvalues closer than this are merged as one multiple pole
MERGE_TOL = 1e-6

#: the trace-norm bound sums the explicit coefficient formulas out to at
#: least this index before switching to the dominating series
TAIL_HORIZON = 20000


def termination_index(p: HypParams) -> Optional[int]:
    """First n with b_n^2 exactly zero, or None.

    A coefficient factor (a+m), (b+m), (c-a+m) or (c-b+m) can only vanish
    for m up to the magnitude of the parameters, so a bounded scan decides
    termination for the whole infinite sequence.
    """
    bound = int(math.ceil(max(abs(p.a), abs(p.b), abs(p.c - p.a), abs(p.c - p.b)))) + 2
    for n in range(bound + 1):
        if c_is_zero(p, 2 * n + 2) or c_is_zero(p, 2 * n + 3):
            return n
    return None


def band_distance(z: complex) -> float:
    """Exact distance from z to the segment [-2, 2]."""
    z = complex(z)
    if -2.0 <= z.real <= 2.0:
        return abs(z.imag)
    return math.hypot(abs(z.real) - 2.0, z.imag)


def band_to_cut(z: complex) -> complex:
    """w = -4/(z-2), mapping C minus [-2,2] onto C minus [1,inf)."""
    return -4.0 / (complex(z) - 2.0)


def cut_to_band(w: complex) -> complex:
    """Inverse map z = 2 - 4/w."""
    return 2.0 - 4.0 / complex(w)


@dataclass(frozen=True)
class TruncatedJacobi:
    """Leading principal block of the Jacobi matrix.

    Complex symmetric (equal sub- and superdiagonal), not Hermitian unless
    the parameters are real with positive b_k^2.  For a terminating triple
    the operator decouples and only the leading block is ever built.
    """

    order: int
    diag: np.ndarray
    offdiag: np.ndarray
    source: HypParams
    terminated: bool

    def matrix(self) -> np.ndarray:
        m = np.diag(self.diag.astype(complex))
        if self.order > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m


def build_truncated(p: HypParams, N: int) -> TruncatedJacobi:
    """Assemble the order-N truncation (or the exact decoupled block)."""
    if N < 1:
        raise ValueError("truncation order must be >= 1")
    coeffs = offdiag_roots(jacobi_coeffs(p, N))
    return TruncatedJacobi(
        order=len(coeffs.diag),
        diag=np.asarray(coeffs.diag, dtype=complex),
        offdiag=np.asarray(coeffs.offdiag, dtype=complex),
        source=p,
        terminated=coeffs.terminated_at is not None,
    )


def _resolvent_first(tj: TruncatedJacobi, z: complex) -> complex:
    n = tj.order
    ab = np.zeros((3, n), dtype=complex)
    ab[1] = tj.diag - z
    if n > 1:
        ab[0, 1:] = tj.offdiag
        ab[2, :-1] = tj.offdiag
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    x = solve_banded((1, 1), ab, rhs)
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > GROWTH_LIMIT:
        raise NearSingular(f"resolvent solve blew up at z = {z} (order {n})")
    return complex(x[0])


def m_function(p: HypParams, z: complex, N: int) -> complex:
    """<(J_N - z)^{-1} e, e> via a pivoted tridiagonal solve."""
    return _resolvent_first(build_truncated(p, N), complex(z))


def b_function(p: HypParams, z: complex, method: str = "cf", tol: float = 1e-12) -> complex:
    """Evaluate B(a,b,c;z) off the band.

    ``method="cf"`` goes through the continued fraction at w = -4/(z-2);
    ``method="resolvent"`` doubles the truncation order until two
    successive m-function values agree to ``tol``.  The two routes are
    algebraically identical and their numerical agreement is one of the
    package's standing invariants.

    Terminating triples give a rational B, so for them the band guard is
    waived and evaluation works anywhere off the (finitely many) poles.

    Raises
    ------
    OnBand
        z within guard distance of [-2, 2] for a non-terminating triple.
    NearPole
        The continued fraction would not settle (z at or next to a pole).
    """
    z = complex(z)
    require_nondegenerate(p)
    t = termination_index(p)
    if t is None and band_distance(z) <= BAND_EVAL_GUARD:
        raise OnBand(f"z = {z} is within {BAND_EVAL_GUARD} of [-2, 2]")

    if method == "cf":
        if z == 2.0:
            # the Moebius variable is infinite there; only reachable for a
            # terminating (rational) triple, where the block is exact
            return m_function(p, z, t + 1)
        w = band_to_cut(z)
        try:
            r = cf_ratio_eval(p, w, tol=tol)
        except NoConvergence as exc:
            raise NearPole(f"continued fraction unsettled at z = {z}: {exc}") from exc
        d1 = -c_coeff(p, 1)
        return (-1.0 / (4.0 * d1)) * (r.value - 1.0)

    if method == "resolvent":
        if t is not None:
            return m_function(p, z, t + 1)
        n = RESOLVENT_N0
        prev = m_function(p, z, n)
        while n < RESOLVENT_NMAX:
            n *= 2
            cur = m_function(p, z, n)
            if abs(cur - prev) <= tol * max(1.0, abs(cur)):
                return cur
            prev = cur
        raise NoConvergence(
            f"resolvent m-function not settled at order {RESOLVENT_NMAX} for z = {z}",
            last_value=prev,
        )

    raise ValueError(f"unknown method: {method!r}")


@dataclass(frozen=True)
class SpectralResult:
    """Stable point spectrum outside the band, with inequality data.

    ``eigenvalues`` is a multiset (algebraic multiplicity by repetition);
    ``discarded`` holds truncation eigenvalues that failed the N vs 2N
    stability match, ``merged`` the representatives of clusters collapsed
    at MERGE_TOL.
    """

    eigenvalues: tuple[complex, ...]
    distance_sum: float
    trace_bound: float
    N_used: int
    N_check: int
    discarded: tuple[complex, ...]
    merged: tuple[complex, ...]


def _eig_with_contract(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        vals, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(f"QR iteration failed: {exc}") from exc
    return vals, vecs


def _check_residuals(m: np.ndarray, vals: np.ndarray, vecs: np.ndarray, keep: list[int]) -> None:
    if not keep:
        return
    scale = np.linalg.norm(m, np.inf)
    for i in keep:
        v = vecs[:, i]
        res = np.linalg.norm(m @ v - vals[i] * v)
        if res > EIG_RESIDUAL * max(scale, 1.0):
            raise EigensolverFailure(
                f"eigenpair residual {res:.3e} exceeds contract at eigenvalue {vals[i]}"
            )


def _pair_conjugates(values: list[complex], tol: float) -> list[complex]:
    """Enforce exact conjugate pairing for real-parameter spectra.

    The spectrum of a real-parameter operator is conjugation symmetric; the
    eigensolver only delivers this to rounding.  Values with negligible
    imaginary part are realified, the rest matched and replaced by exact
    conjugate pairs.
    """
    out: list[complex] = []
    pending: list[complex] = []
    for lam in values:
        thr = max(tol * max(1.0, abs(lam)), 1e-12)
        if abs(lam.imag) <= thr:
            out.append(complex(lam.real, 0.0))
        else:
            pending.append(lam)
    used = [False] * len(pending)
    for i, lam in enumerate(pending):
        if used[i]:
            continue
        used[i] = True
        best, best_j = np.inf, -1
        for j in range(i + 1, len(pending)):
            if used[j]:
                continue
            d = abs(pending[j] - lam.conjugate())
            if d < best:
                best, best_j = d, j
        thr = max(tol * max(1.0, abs(lam)), 1e-12)
        if best_j >= 0 and best <= 2 * thr:
            used[best_j] = True
            w = (lam + pending[best_j].conjugate()) / 2.0
            out.extend([w, w.conjugate()])
        else:
            out.append(lam)
    return out


def discrete_spectrum(
    p: HypParams, N: int = 256, tol: float = 1e-10, band_guard: float = BAND_GUARD
) -> SpectralResult:
    """Stable eigenvalues of J outside the band.

    Non-terminating triples are diagonalized at truncation orders N and 2N
    (dense non-Hermitian QR); an order-N eigenvalue with band distance
    above ``band_guard`` is retained only if an order-2N eigenvalue sits
    within ``tol * max(1, |.|)`` of it, in which case the finer value is
    reported.  Everything else lands in ``discarded``: truncations pollute
    the band vicinity and only double-truncation agreement separates
    genuine poles of B from that debris.  Terminating triples are exact and
    skip the filter.

    Near-coincident retained values (within MERGE_TOL) are averaged and
    repeated, so multiplicity is reported by repetition and the merge is
    flagged in ``merged``.
    """
    if N < 8 and termination_index(p) is None:
        raise ValueError("truncation order must be >= 8 for non-terminating triples")

    tj = build_truncated(p, N)
    if tj.terminated:
        m = tj.matrix()
        vals, vecs = _eig_with_contract(m)
        keep = [i for i in range(len(vals)) if band_distance(vals[i]) > band_guard]
        _check_residuals(m, vals, vecs, keep)
        retained = [complex(vals[i]) for i in keep]
        discarded: list[complex] = []
        n_used = n_check = tj.order
    else:
        m1 = tj.matrix()
        vals1, _ = _eig_with_contract(m1)
        tj2 = build_truncated(p, 2 * N)
        m2 = tj2.matrix()
        vals2, vecs2 = _eig_with_contract(m2)

        candidates = [complex(v) for v in vals1 if band_distance(v) > band_guard]
        claimed = [False] * len(vals2)
        retained = []
        discarded = []
        kept_idx = []
        for lam in candidates:
            dists = np.abs(vals2 - lam)
            dists[claimed] = np.inf
            j = int(np.argmin(dists))
            if dists[j] <= tol * max(1.0, abs(lam)) and band_distance(vals2[j]) > band_guard:
                claimed[j] = True
                kept_idx.append(j)
                retained.append(complex(vals2[j]))
            else:
                discarded.append(lam)
        _check_residuals(m2, vals2, vecs2, kept_idx)
        n_used, n_check = N, 2 * N

    if p.is_real:
        retained = _pair_conjugates(retained, tol)

    # collapse near-coincident values into explicit multiplicities
    retained.sort(key=lambda v: (v.real, v.imag))
    merged: list[complex] = []
    final: list[complex] = []
    i = 0
    while i < len(retained):
        cluster = [retained[i]]
        j = i + 1
        while j < len(retained) and abs(retained[j] - cluster[-1]) <= MERGE_TOL:
            cluster.append(retained[j])
            j += 1
        if len(cluster) > 1:
            rep = sum(cluster) / len(cluster)
            merged.append(rep)
            final.extend([rep] * len(cluster))
        else:
            final.append(cluster[0])
        i = j

    dist_sum = float(sum(band_distance(v) for v in final))
    bound = trace_norm_bound(p, max(n_check, 64))
    return SpectralResult(
        eigenvalues=tuple(final),
        distance_sum=dist_sum,
        trace_bound=bound,
        N_used=n_used,
        N_check=n_check,
        discarded=tuple(discarded),
        merged=tuple(merged),
    )


def _tail_constants(p: HypParams) -> tuple[float, float, int, float]:
    """Dominating-series data for the coefficient tails.

    With t = 2n + c the exact partial-fraction forms

        a_n      = -2q/((t+1)(t+2)) - g1/(t(t+1)) - g2/((t+1)(t+2)),
        b_n^2 - 1 = u + v + uv,   u,v the deviations of 4d_{2n+2}, 4d_{2n+3},

    give |a_n| <= C_A / s_n^2 and |b_n^2 - 1| <= C_B / s_n^2 with
    s_n = 2n - |c| - 3, once n is large enough that s_n >= 1,
    |t| <= 2 s_n and C_B / s_n^2 < 1 (the last also makes Re b_n^2 > 0, so
    the principal root satisfies |b_n - 1| <= |b_n^2 - 1|).
    """
    a, b, c = p.a, p.b, p.c
    q = 2.0 * (a - b) - 1.0
    g1 = 2.0 * a * c + 2.0 * b * c - 4.0 * a * b - c * c
    g2 = (2.0 + 2.0 * b - c) * (2.0 + c - 2.0 * a) - 2.0
    g3 = (2.0 + 2.0 * a - c) * (2.0 + c - 2.0 * b) - 6.0
    r = abs(q)
    ca = 2.0 * r + abs(g1) + abs(g2)
    cb = 4.0 * r + abs(g2) + abs(g3) + (2.0 * r + abs(g2)) * (2.0 * r + abs(g3))
    beta = abs(c) + 3.0
    n_min = int(
        math.ceil(
            max(
                (beta + 1.0) / 2.0,          # s_n >= 1
                (3.0 * abs(c) + 6.0) / 2.0,  # |t| <= 2 s_n
                (beta + math.sqrt(cb)) / 2.0,  # C_B / s_n^2 < 1
            )
        )
    ) + 1
    return ca, cb, n_min, beta


def _deviation_sums(p: HypParams, n: int) -> float:
    """sum_{k<n} |a_k| + 2|b_k - 1| from the vectorized rational formulas."""
    idx = np.arange(n, dtype=float)
    a, b, c = p.a, p.b, p.c
    d_lo = (a + idx) * (c - b + idx) / ((c + 2 * idx) * (c + 2 * idx + 1))
    d_mid = (b + idx + 1) * (c - a + idx + 1) / ((c + 2 * idx + 1) * (c + 2 * idx + 2))
    d_hi = (a + idx + 1) * (c - b + idx + 1) / ((c + 2 * idx + 2) * (c + 2 * idx + 3))
    diag = 2.0 - 4.0 * d_lo - 4.0 * d_mid
    diag[0] = 2.0 - 4.0 * d_mid[0]
    bsq = (16.0 * d_mid * d_hi).astype(complex)
    bsq.imag[bsq.imag == 0.0] = 0.0  # sqrt branch: -0.0 would flip the root
    roots = np.sqrt(bsq)
    return float(np.sum(np.abs(diag)) + 2.0 * np.sum(np.abs(roots - 1.0)))


def trace_norm_bound(p: HypParams, K: int) -> float:
    """Computable upper bound for ||J - J_0||_1.

    Each diagonal entry contributes |a_k| and each symmetric off-diagonal
    pair at most 2|b_k - 1| to the trace norm.  The bound sums the explicit
    rational formulas out to max(K, TAIL_HORIZON) and caps the rest by the
    dominating series C/k^2 of ``_tail_constants`` via integral comparison,
    so it is a true upper bound for every K and essentially constant once
    K is moderate.

    For a terminating triple the sum is finite and exact, except that the
    broken bond b_t = 0 against the free matrix still costs 2|b_t - 1| = 2.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    require_nondegenerate(p)

    t = termination_index(p)
    if t is not None:
        coeffs = offdiag_roots(jacobi_coeffs(p, t + 2))
        total = sum(abs(x) for x in coeffs.diag)
        total += 2.0 * sum(abs(x - 1.0) for x in coeffs.offdiag)
        total += 2.0  # broken bond against the free matrix
        return float(total)

    ca, cb, n_min, beta = _tail_constants(p)
    horizon = max(K, TAIL_HORIZON, n_min)
    explicit = _deviation_sums(p, horizon)
    # sum_{n >= h} 1/(2n - beta)^2 <= 1/(2 (2(h - 1) - beta))
    tail = (ca + 2.0 * cb) / (2.0 * (2.0 * (horizon - 1.0) - beta))
    return float(explicit + tail)


class LiebThirring(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def lieb_thirring_check(p: HypParams, N: int = 256, tol: float = 1e-10) -> LiebThirring:
    """Distance sum of the stable spectrum against the trace-norm bound."""
    res = discrete_spectrum(p, N=N, tol=tol)
    return LiebThirring(res.distance_sum, res.trace_bound, res.distance_sum <= res.trace_bound + 1e-9)


def hyp_zeros(
    p: HypParams,
    N: int = 256,
    tol: float = 1e-10,
    which: str = "denominator",
) -> list[complex]:
    """Zeros of a hypergeometric function in the cut plane C minus [1, inf).

    ``which="denominator"`` (default) locates the zeros of F(a,b+1,c+1;.):
    they are exactly the images w = -4/(lambda-2) of the stable eigenvalues
    of J.  ``which="numerator"`` locates zeros of F(a,b,c;.) by running the
    same pipeline at the shifted triple (a, b-1, c-1).
    """
    if which == "numerator":
        try:
            p = validate_params(p.a, p.b - 1.0, p.c - 1.0)
        except CNonpositiveInteger as exc:
            raise ShiftInvalid(f"shift (a, b-1, c-1) invalid: {exc}") from exc
    elif which != "denominator":
        raise ValueError(f"unknown variant: {which!r}")
    res = discrete_spectrum(p, N=N, tol=tol)
    return [band_to_cut(lam) for lam in res.eigenvalues]
