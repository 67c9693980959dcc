"""Continued fractions, convergents, semiconvergents and almost periods.

The almost periods of a two-tone drive with frequencies (Omega, omega_eff)
are T = (2*pi/Omega) * h where h/k runs over the convergents and
semiconvergents of the ratio beta = Omega/omega_eff.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Beyond this the coefficients of a 64-bit float are numerically meaningless.
_REMAINDER_FLOOR = 1e-9
_MAX_TERMS = 20


@dataclass(frozen=True)
class CFExpansion:
    """Continued fraction [a0; a1, a2, ...] with its rational approximants."""

    beta: float
    coeffs: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]          # (h_N, k_N)
    semiconvergents: tuple[tuple[int, int, int, int], ...]  # (h, k, N, m)
    exact: bool  # expansion terminated on a (numerically) rational input

    def value(self) -> Fraction:
        """Rational value of the full expansion."""
        h, k = self.convergents[-1]
        return Fraction(h, k)


@dataclass(frozen=True)
class AlmostPeriod:
    T: float
    h: int
    k: int
    kind: str  # "convergent" | "semiconvergent"


def continued_fraction(beta: float, max_terms: int = _MAX_TERMS,
                       tol: float = _REMAINDER_FLOOR) -> CFExpansion:
    """Standard continued-fraction algorithm with the recursion seeds
    (h_-2, h_-1) = (0, 1) and (k_-2, k_-1) = (1, 0)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    coeffs: list[int] = []
    x = float(beta)
    exact = False
    for _ in range(max_terms):
        a = int(np.floor(x))
        frac = x - a
        if frac > 1.0 - tol:
            # rounding pushed x just below an integer; snap up
            a += 1
            frac = 0.0
        coeffs.append(a)
        if frac < tol:
            exact = True
            break
        x = 1.0 / frac

    h_prev2, h_prev1 = 0, 1
    k_prev2, k_prev1 = 1, 0
    convergents: list[tuple[int, int]] = []
    for a in coeffs:
        h = a * h_prev1 + h_prev2
        k = a * k_prev1 + k_prev2
        convergents.append((h, k))
        h_prev2, h_prev1 = h_prev1, h
        k_prev2, k_prev1 = k_prev1, k

    semis: list[tuple[int, int, int, int]] = []
    for n in range(len(coeffs) - 1):
        a_next = coeffs[n + 1]
        h_n, k_n = convergents[n]
        h_nm1, k_nm1 = convergents[n - 1] if n >= 1 else (1, 0)
        for m in range(1, a_next):
            semis.append((m * h_n + h_nm1, m * k_n + k_nm1, n, m))

    return CFExpansion(float(beta), tuple(coeffs), tuple(convergents),
                       tuple(semis), exact)


def almost_periods(Omega: float, omega_eff: float, h_max: int) -> list[AlmostPeriod]:
    """All convergent/semiconvergent almost periods with h <= h_max, by T."""
    if Omega <= 0 or omega_eff <= 0:
        raise ValueError("frequencies must be positive")
    beta = Omega / omega_eff
    cf = continued_fraction(beta)
    T_drive = 2.0 * np.pi / Omega

    out: list[AlmostPeriod] = []
    for h, k in cf.convergents:
        if 0 < h <= h_max:
            out.append(AlmostPeriod(T_drive * h, h, k, "convergent"))
    for h, k, _, _ in cf.semiconvergents:
        if 0 < h <= h_max:
            out.append(AlmostPeriod(T_drive * h, h, k, "semiconvergent"))

    if cf.exact:
        # Rational ratio: exact periodicity, so every integer multiple of the
        # fundamental (h, k) is a true period.
        h0, k0 = cf.convergents[-1]
        mult = 2
        while mult * h0 <= h_max:
            out.append(AlmostPeriod(T_drive * mult * h0, mult * h0,
                                    mult * k0, "convergent"))
            mult += 1

    out.sort(key=lambda ap: ap.T)
    return out


def best_approx_check(cf: CFExpansion, N: int, semiconvergent: int | None = None) -> bool:
    """Brute-force best-approximation test.

    For convergent N verifies |k_N*beta - h_N| < |q*beta - p| for every
    0 < q <= k_N, p/q != h_N/k_N.  With `semiconvergent=m` checks the weaker
    |beta - h/k| ordering for the (N, m) semiconvergent instead.
    """
    beta = cf.beta
    if semiconvergent is None:
        if not (0 <= N < len(cf.convergents)):
            raise IndexError("convergent index out of range")
        h, k = cf.convergents[N]
        target = abs(k * beta - h)
        metric = lambda p, q: abs(q * beta - p)
    else:
        match = [s for s in cf.semiconvergents if s[2] == N and s[3] == semiconvergent]
        if not match:
            raise IndexError("semiconvergent (N, m) not present")
        h, k, _, _ = match[0]
        target = abs(beta - h / k)
        metric = lambda p, q: abs(beta - p / q)

    for q in range(1, k + 1):
        p = int(np.round(q * beta))
        for cand in (p - 1, p, p + 1):
            if q == k and cand == h:
                continue
            if metric(cand, q) <= target:
                return False
    return True


def wrap_angle(x):
    """Map angle(s) to the nearest-image interval (-pi, pi]."""
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


def torus_return_distance(t, Omega: float, omega_eff: float,
                          theta0=(0.0, 0.0)):
    """Euclidean nearest-image distance between theta(t) and theta(0)."""
    t = np.asarray(t, dtype=float)
    d1 = wrap_angle(Omega * t)
    d2 = wrap_angle(omega_eff * t)
    return np.sqrt(d1**2 + d2**2)


def torus_return_distance_max(t, Omega: float, omega_eff: float,
                              theta02_values) -> np.ndarray:
    """Ensemble version: max over theta02 members of the return distance.

    For rigid rotation the displacement is member independent; the max is
    provided for interface parity with quantum/back-action ensembles where
    members can differ.
    """
    del theta02_values
    return np.atleast_1d(torus_return_distance(t, Omega, omega_eff))
