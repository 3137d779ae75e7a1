"""Continued-fraction engine.

Builds the regular C-fraction for the ratio F(a,b,c;z)/F(a,b+1,c+1;z),

    1 + c1 z / (1 + c2 z / (1 + ...)),

with coefficients

    c_{2j+1} = -(a+j)(c-b+j) / ((c+2j)(c+2j+1)),      j >= 0,
    c_{2j}   = -(b+j)(c-a+j) / ((c+2j-1)(c+2j)),      j >= 1,

and runs the chain of equivalence transformations (z -> -1/z giving the
S-fraction in d_j = -c_j, its even part, the rescaling z -> (z-2)/4) that
ends in the J-fraction

    B(z) = -1 / (z - a_0 - b_0^2 / (z - a_1 - b_1^2 / (...)))

with

    a_0 = 2 - 4 d_2,
    a_n = 2 - 4 d_{2n+1} - 4 d_{2n+2}   (n >= 1),
    b_n^2 = 16 d_{2n+2} d_{2n+3}        (n >= 0).

These index placements are forced by the even-part contraction and are
cross-checked two independent ways in the test suite: against the moment
expansion of B at infinity (``moment_oracle``) and against exact rational
closed forms in the terminating polynomial cases.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    DegenerateRatio,
    NoConvergence,
    OnCut,
    PoleOfApproximant,
)
from .hyp import HypParams

#: points closer than this to [1, inf) are rejected by cf_ratio_eval
CUT_GUARD = 1e-9

#: replacement for an exactly vanishing backward-recurrence denominator
TINY = 1e-280


def _c_factors(p: HypParams, j: int):
    """Numerator factors and denominator of c_j, unreduced.

    Keeping the factored form lets termination be detected by an exact zero
    of a linear factor instead of a floating threshold.
    """
    if j % 2 == 1:
        m = (j - 1) // 2
        return (p.a + m), (p.c - p.b + m), (p.c + 2 * m) * (p.c + 2 * m + 1)
    m = j // 2
    return (p.b + m), (p.c - p.a + m), (p.c + 2 * m - 1) * (p.c + 2 * m)


def c_coeff(p: HypParams, j: int) -> complex:
    """The j-th C-fraction coefficient, j >= 1."""
    if j < 1:
        raise ValueError("coefficient index starts at 1")
    f1, f2, den = _c_factors(p, j)
    if f1 == 0 or f2 == 0:
        return 0.0 + 0.0j
    return -f1 * f2 / den


def c_is_zero(p: HypParams, j: int) -> bool:
    """Exact-zero test for c_j via its linear factors."""
    f1, f2, _ = _c_factors(p, j)
    return f1 == 0 or f2 == 0


def cfrac_termination_index(p: HypParams) -> Optional[int]:
    """First index j >= 1 with c_j exactly zero, or None.

    Zero factors only occur for indices up to the parameter magnitudes, so
    a bounded scan settles the question for the whole sequence.  A zero c_j
    truncates the fraction: it becomes a rational function of z, convergent
    everywhere off its poles (including on the cut).
    """
    bound = 2 * int(
        np.ceil(max(abs(p.a), abs(p.b), abs(p.c - p.a), abs(p.c - p.b)))
    ) + 4
    for j in range(1, bound + 1):
        if c_is_zero(p, j):
            return j
    return None


def require_nondegenerate(p: HypParams) -> None:
    """Reject triples with c_1 = 0 (a = 0 or c = b).

    There the ratio is identically 1 and the normalized function B is a
    0/0 expression; nothing downstream of the C-fraction is defined.
    """
    if p.a == 0 or p.c == p.b:
        raise DegenerateRatio(
            f"c_1 vanishes for (a,b,c) = ({p.a}, {p.b}, {p.c}); B is undefined"
        )


class CoeffStream:
    """Lazily extended, cached sequence of C-fraction coefficients.

    Extension is serialized by a lock so a stream may be shared between
    threads; reads of already-cached entries are plain list indexing.
    """

    def __init__(self, params: HypParams):
        self.params = params
        self._cache: list[complex] = []
        self._lock = threading.Lock()

    def _extend(self, n: int) -> None:
        with self._lock:
            for j in range(len(self._cache) + 1, n + 1):
                self._cache.append(c_coeff(self.params, j))

    def c(self, j: int) -> complex:
        if j < 1:
            raise ValueError("coefficient index starts at 1")
        if j > len(self._cache):
            self._extend(j)
        return self._cache[j - 1]

    def d(self, j: int) -> complex:
        return -self.c(j)

    def c_array(self, n: int) -> np.ndarray:
        """c_1..c_n as a numpy array."""
        if n > len(self._cache):
            self._extend(n)
        return np.asarray(self._cache[:n], dtype=complex)


@dataclass(frozen=True)
class CFValue:
    """Converged continued-fraction evaluation."""

    value: complex
    depth_used: int
    last_correction: float
    converged: bool


@dataclass(frozen=True)
class JacobiCoeffs:
    """J-fraction data: diagonal a_n, off-diagonal squares b_n^2 and the
    chosen roots b_n.

    ``terminated_at`` is the first n with b_n^2 exactly zero; the sequences
    are truncated there (``diag`` keeps n+1 entries, ``offdiag_sq`` keeps n).
    ``offdiag`` stays empty until :func:`offdiag_roots` picks roots;
    ``root_branches`` then records, per index, whether the principal branch
    (+1) or its negative (-1) was taken.
    """

    params: HypParams
    diag: tuple[complex, ...]
    offdiag_sq: tuple[complex, ...]
    offdiag: tuple[complex, ...] = field(default=())
    terminated_at: Optional[int] = None
    root_policy: str = ""
    root_branches: tuple[int, ...] = field(default=())

    @property
    def length(self) -> int:
        return len(self.diag)


def _dist_to_cut(z: complex) -> float:
    if z.real >= 1.0:
        return abs(z.imag)
    return abs(z - 1.0)


def _backward_eval(coeffs: np.ndarray, z: complex, depth: int) -> complex:
    # coeffs holds c_1..c_depth; tail initialized at 1
    t = 1.0 + 0.0j
    for j in range(depth - 1, -1, -1):
        t = 1.0 + coeffs[j] * z / t
        if t == 0:
            t = TINY
    return t


def cf_ratio_eval(
    p: HypParams, z: complex, tol: float = 1e-13, max_depth: int = 1 << 17
) -> CFValue:
    """Evaluate the C-fraction for F(a,b,c;z)/F(a,b+1,c+1;z).

    Backward recurrence from depth 8, doubling the depth until two
    successive evaluations agree to ``tol * max(1, |value|)``.  Converges
    everywhere off the cut [1, inf) where the ratio is finite; near a pole
    of the ratio the doubling never settles and NoConvergence is raised
    with the last correction attached.

    A terminating fraction (some c_j = 0) is rational: it is evaluated at
    its exact finite depth, anywhere in the plane, cut included.

    Raises
    ------
    OnCut
        z within guard distance of [1, inf) for a non-terminating fraction.
    NoConvergence
        max_depth reached without two agreeing evaluations.
    """
    z = complex(z)
    if z == 0:
        return CFValue(1.0 + 0.0j, 1, 0.0, True)

    stream = CoeffStream(p)
    j_zero = cfrac_termination_index(p)
    if j_zero is not None:
        depth = j_zero - 1
        if depth == 0:
            return CFValue(1.0 + 0.0j, 1, 0.0, True)
        val = _backward_eval(stream.c_array(depth), z, depth)
        return CFValue(val, depth, 0.0, True)

    if _dist_to_cut(z) <= CUT_GUARD:
        raise OnCut(f"z = {z} lies within {CUT_GUARD} of the cut [1, inf)")
    depth = 8
    prev: Optional[complex] = None
    corr = np.inf
    while depth <= max_depth:
        val = _backward_eval(stream.c_array(depth), z, depth)
        if prev is not None:
            corr = abs(val - prev)
            if corr <= tol * max(1.0, abs(val)):
                return CFValue(val, depth, corr, True)
        prev = val
        depth *= 2
    raise NoConvergence(
        f"continued fraction not settled at depth {max_depth} for z = {z} "
        "(expected near a pole of the ratio)",
        last_value=prev,
        last_correction=corr,
    )


def jacobi_coeffs(p: HypParams, n_max: int) -> JacobiCoeffs:
    """Diagonal and off-diagonal-square J-fraction coefficients.

    Produces up to ``n_max`` diagonal entries a_0..a_{n_max-1} and
    ``n_max - 1`` squares b_0^2..b_{n_max-2}.  If some b_n^2 vanishes
    exactly (a linear factor of d_{2n+2} or d_{2n+3} hits zero) the
    fraction terminates: ``terminated_at = n`` and the sequences stop with
    a_n as the last diagonal entry.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    require_nondegenerate(p)
    stream = CoeffStream(p)
    d = stream.d

    diag: list[complex] = [2.0 - 4.0 * d(2)]
    offdiag_sq: list[complex] = []
    terminated_at: Optional[int] = None
    for n in range(n_max - 1):
        if c_is_zero(p, 2 * n + 2) or c_is_zero(p, 2 * n + 3):
            terminated_at = n
            break
        offdiag_sq.append(16.0 * d(2 * n + 2) * d(2 * n + 3))
        diag.append(2.0 - 4.0 * d(2 * n + 3) - 4.0 * d(2 * n + 4))
    return JacobiCoeffs(
        params=p,
        diag=tuple(diag),
        offdiag_sq=tuple(offdiag_sq),
        terminated_at=terminated_at,
    )


RootPolicy = Union[str, Callable[[int, complex, complex], complex]]


def offdiag_roots(coeffs: JacobiCoeffs, policy: RootPolicy = "principal") -> JacobiCoeffs:
    """Pick square roots b_n of the squares b_n^2.

    Past the stabilization point (b_n^2 with positive real part, which the
    coefficient limits guarantee for all large n) the principal root is the
    canonical choice.  For earlier indices ``policy`` decides: the default
    keeps the principal root there too, or a callable
    ``(index, b_sq, principal_root) -> root`` may override.  The m-function
    and the spectrum only ever see b_n^2, so the choice is recorded but not
    load-bearing.
    """
    # -0.0 imaginary parts (artifacts of d_j = -c_j) would land on the
    # wrong side of the sqrt branch cut; a negative real square must give
    # the positive imaginary root
    cleaned = [
        complex(b.real, 0.0) if b.imag == 0.0 else complex(b)
        for b in coeffs.offdiag_sq
    ]
    roots = []
    branches = []
    principal = np.sqrt(np.asarray(cleaned, dtype=complex))
    stab = len(coeffs.offdiag_sq)
    while stab > 0 and coeffs.offdiag_sq[stab - 1].real > 0:
        stab -= 1
    for n, bsq in enumerate(coeffs.offdiag_sq):
        r = principal[n]
        if n < stab and callable(policy):
            r = policy(n, bsq, r)
        roots.append(complex(r))
        branches.append(1 if complex(r) == complex(principal[n]) else -1)
    name = policy if isinstance(policy, str) else getattr(policy, "__name__", "custom")
    return replace(
        coeffs,
        offdiag=tuple(roots),
        root_policy=name,
        root_branches=tuple(branches),
    )


def _cfrac_approximant(p: HypParams, n: int, z: complex) -> complex:
    if n == 0:
        return 1.0 + 0.0j
    t = 1.0 + 0.0j
    for j in range(n, 0, -1):
        if abs(t) < TINY:
            raise PoleOfApproximant(f"C-fraction approximant {n} has a pole near z = {z}")
        t = 1.0 + c_coeff(p, j) * z / t
    return t


def _sfrac_approximant(p: HypParams, m: int, zeta: complex) -> complex:
    # 1 + d1/(zeta + d2/(1 + d3/(zeta + ...))), truncated after d_m
    if m == 0:
        return 1.0 + 0.0j
    t = zeta if m % 2 == 1 else 1.0 + 0.0j
    for j in range(m - 1, 0, -1):
        if abs(t) < TINY:
            raise PoleOfApproximant(f"S-fraction approximant {m} has a pole near {zeta}")
        den = zeta if j % 2 == 1 else 1.0
        t = den + (-c_coeff(p, j + 1)) / t
    if abs(t) < TINY:
        raise PoleOfApproximant(f"S-fraction approximant {m} has a pole near {zeta}")
    return 1.0 + (-c_coeff(p, 1)) / t


def _jfrac_approximant(p: HypParams, n: int, z: complex) -> complex:
    coeffs = jacobi_coeffs(p, n)
    k = len(coeffs.diag)  # may be shorter if terminated
    t = z - coeffs.diag[k - 1]
    for i in range(k - 2, -1, -1):
        if abs(t) < TINY:
            raise PoleOfApproximant(f"J-fraction approximant {n} has a pole near z = {z}")
        t = z - coeffs.diag[i] - coeffs.offdiag_sq[i] / t
    if abs(t) < TINY:
        raise PoleOfApproximant(f"J-fraction approximant {n} has a pole near z = {z}")
    return -1.0 / t


def approximant(p: HypParams, kind: str, n: int, z: complex) -> complex:
    """Finite approximant of one of the three fraction forms.

    ``kind`` is one of ``c-fraction`` (variable z), ``s-fraction``
    (variable zeta = -1/z of the C-fraction), ``j-fraction`` (the fraction
    for B).  Exact truncation, no adaptivity; these exist so the algebraic
    contraction identities can be tested level by level.
    """
    z = complex(z)
    if kind == "c-fraction":
        if n < 0:
            raise ValueError("approximant order must be >= 0")
        return _cfrac_approximant(p, n, z)
    if kind == "s-fraction":
        if n < 0:
            raise ValueError("approximant order must be >= 0")
        return _sfrac_approximant(p, n, z)
    if kind == "j-fraction":
        if n < 1:
            raise ValueError("J-fraction approximant order must be >= 1")
        require_nondegenerate(p)
        return _jfrac_approximant(p, n, z)
    raise ValueError(f"unknown fraction kind: {kind!r}")


def _poly_mul(u: Sequence[complex], v: Sequence[complex], order: int) -> list[complex]:
    out = [0.0 + 0.0j] * (order + 1)
    for i, ui in enumerate(u[: order + 1]):
        if ui == 0:
            continue
        for j, vj in enumerate(v[: order + 1 - i]):
            out[i + j] += ui * vj
    return out


def _poly_inv(v: Sequence[complex], order: int) -> list[complex]:
    inv = [1.0 / v[0]] + [0.0 + 0.0j] * order
    for k in range(1, order + 1):
        s = 0.0 + 0.0j
        for j in range(1, min(k, len(v) - 1) + 1):
            s += v[j] * inv[k - j]
        inv[k] = -s / v[0]
    return inv


def _hyp_taylor(a: complex, b: complex, c: complex, order: int) -> list[complex]:
    out = [1.0 + 0.0j]
    t = 1.0 + 0.0j
    for n in range(order):
        t = t * (a + n) * (b + n) / ((c + n) * (n + 1))
        out.append(t)
    return out


def moment_oracle(p: HypParams, order: int) -> tuple[complex, ...]:
    """Moments s_0..s_order of B from series arithmetic alone.

    Expands B(z) = -s_0/z - s_1/z^2 - ... near infinity by dividing the two
    hypergeometric Taylor series, normalizing, and composing with
    w = -4/(z-2) as a formal series in 1/z.  Shares nothing with
    :func:`jacobi_coeffs` beyond the scalar c_1, which makes it an
    independent check on the J-fraction coefficient indices (the identities
    s_1 = a_0, s_2 = a_0^2 + b_0^2, ... pin them uniquely).

    Accuracy degrades slowly with order through the series division; orders
    up to ~10 are good to near machine precision for moderate parameters.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    require_nondegenerate(p)
    m = order + 1
    f_num = _hyp_taylor(p.a, p.b, p.c, m)
    f_den = _hyp_taylor(p.a, p.b + 1, p.c + 1, m)
    ratio = _poly_mul(f_num, _poly_inv(f_den, m), m)
    scale = -1.0 / (4.0 * (-c_coeff(p, 1)))
    g = [scale * x for x in ratio]
    g[0] = 0.0 + 0.0j

    # w(v) = -4v/(1-2v) = -sum_{j>=1} 4 * 2^(j-1) v^j, v = 1/z
    w = [0.0 + 0.0j] + [-4.0 * (2.0 ** (j - 1)) for j in range(1, m + 1)]
    b_of_v = [0.0 + 0.0j] * (m + 1)
    w_pow = [1.0 + 0.0j] + [0.0 + 0.0j] * m
    for k in range(1, m + 1):
        w_pow = _poly_mul(w_pow, w, m)
        if g[k] == 0:
            continue
        for i in range(m + 1):
            b_of_v[i] += g[k] * w_pow[i]
    return tuple(-b_of_v[k + 1] for k in range(order + 1))
