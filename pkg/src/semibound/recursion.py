"""Self-improving extension of a finite-horizon semigroup majorant.

Start from m(t) >= ||exp(tA)|| known on [0, T) and a resolvent constant
r(omega).  Writing m(t) = m_tilde(t) e^{omega t} and
f_tilde = r(omega) / m_tilde, the symmetric-split bound applied to its own
output extends the majorant through

    f_tilde(t) = int_0^{t/2} f_tilde(s)^2 ds,    t >= T,

marched block by block (each dyadic block only reads prefix integrals from
earlier blocks, so the march vectorises).  The dyadic floors
F(k) = inf f_tilde over [T 2^{k-1}, T 2^k) obey a quadratic recursion that
eventually forces stretched-exponential decay of m_tilde.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import TabulatedWeight
from .errors import NumericsError

__all__ = [
    "RecursionState",
    "extend_majorant",
    "uniform_constant",
    "dyadic_floors",
    "k0_rule",
    "stretched_bound",
]


@dataclass(frozen=True)
class RecursionState:
    """Uniform-grid march of the majorant extension."""

    T: float
    omega: float
    r_omega: float
    h: float
    t: np.ndarray
    f_values: np.ndarray
    m_values: np.ndarray
    prefix: np.ndarray  # trapezoid prefix integral of f_tilde^2
    steps_per_T: int
    k0: int

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    def f_at(self, t: float) -> float:
        return float(np.interp(t, self.t, self.f_values))

    def m_at(self, t: float) -> float:
        """m_tilde at t (linear interpolation of f, then r/f)."""
        return self.r_omega / self.f_at(t)

    def block_index(self) -> np.ndarray:
        """0 on [0, T); k on [T 2^{k-1}, T 2^k)."""
        out = np.zeros(len(self.t), dtype=int)
        mask = self.t >= self.T
        ratio = np.floor(np.log2(np.maximum(self.t[mask] / self.T, 1.0)))
        out[mask] = ratio.astype(int) + 1
        return out

    def to_csv(self) -> str:
        blocks = self.block_index()
        lines = ["t,f_tilde,m_tilde,dyadic_block_index"]
        for k in range(len(self.t)):
            lines.append(
                f"{self.t[k]:.17g},{self.f_values[k]:.17g},"
                f"{self.m_values[k]:.17g},{blocks[k]}"
            )
        return "\n".join(lines) + "\n"


def extend_majorant(m0: TabulatedWeight, omega: float, r_omega: float,
                    t_max: float, h: float | None = None) -> RecursionState:
    """March the extension recursion from a tabulated majorant on [0, T).

    Parameters
    ----------
    m0 : TabulatedWeight
        Majorant of ||exp(tA)|| on [0, horizon); the horizon plays the
        role of T.
    omega, r_omega : float
        The weight exponent and a positive lower bound for r(omega).
    t_max : float
        March until at least this time.
    h : float, optional
        Grid step; defaults to T/1024, must be <= T/512.  Snapped so that
        T is an even number of steps.
    """
    if not r_omega > 0.0:
        raise ValueError(f"needs r(omega) > 0, got {r_omega}")
    T = float(m0.horizon)
    if h is None:
        h = T / 1024.0
    if h > T / 512.0:
        raise ValueError(f"step h={h} too coarse; need h <= T/512 = {T / 512.0}")
    if not t_max > T:
        raise ValueError(f"t_max={t_max} must exceed the horizon T={T}")
    steps_per_T = int(round(T / h))
    steps_per_T += steps_per_T % 2  # even, so that T/2 sits on the grid
    h = T / steps_per_T
    n_total = int(math.ceil(t_max / h - 1e-12))
    t = np.arange(n_total + 1) * h

    f = np.empty(n_total + 1)
    prefix = np.empty(n_total + 1)
    n0 = steps_per_T
    head = t[:n0]
    m_tilde_head = np.exp(np.asarray(m0._log_at(head)) - omega * head)
    if not np.all(np.isfinite(m_tilde_head)) or np.any(m_tilde_head <= 0.0):
        raise ValueError("initial majorant must be finite and positive on [0, T)")
    f[:n0] = r_omega / m_tilde_head
    prefix[0] = 0.0
    prefix[1:n0] = np.cumsum(0.5 * h * (f[:n0 - 1] ** 2 + f[1:n0] ** 2))

    # chunks [c0, c1) with c1 <= 2 c0 - 1: every needed prefix value at
    # t/2 then lies strictly before the chunk
    c0 = n0
    while c0 <= n_total:
        c1 = min(2 * c0 - 1, n_total + 1)
        j = np.arange(c0, c1)
        lo = j // 2
        half = prefix[lo].copy()
        odd = (j % 2) == 1
        half[odd] += 0.5 * (prefix[lo[odd] + 1] - prefix[lo[odd]])
        f[c0:c1] = half
        seg = 0.5 * h * (f[c0 - 1:c1 - 1] ** 2 + f[c0:c1] ** 2)
        prefix[c0:c1] = prefix[c0 - 1] + np.cumsum(seg)
        c0 = c1

    if not np.all(np.isfinite(f)) or np.any(f <= 0.0):
        raise NumericsError("extension march produced non-positive f values")
    m = r_omega / f
    F0 = float(np.min(f[:n0]))
    return RecursionState(
        T=T, omega=float(omega), r_omega=float(r_omega), h=h, t=t,
        f_values=f, m_values=m, prefix=prefix, steps_per_T=n0,
        k0=k0_rule(T, F0),
    )


def uniform_constant(state: RecursionState) -> float:
    """max(sup_{[0,T)} m_tilde, 1 / (r(omega) int_0^{T/2} m_tilde^{-2} ds)).

    A uniform bound on e^{-omega t} ||exp(tA)|| over all t >= 0, since the
    extended m_tilde is nonincreasing past T.
    """
    n0 = state.steps_per_T
    sup_head = float(np.max(state.m_values[:n0]))
    int_inv_sq = state.prefix[n0 // 2] / state.r_omega**2
    return max(sup_head, 1.0 / (state.r_omega * int_inv_sq))


def dyadic_floors(state: RecursionState, k_max: int | None = None,
                  validate: bool = True) -> dict[int, float]:
    """Floors F(k) = inf f_tilde over the dyadic block [T 2^{k-1}, T 2^k).

    F(0) is the infimum over [0, T); for k >= 1 the march makes f_tilde
    nondecreasing, so the floor is the left endpoint value f_tilde(T 2^{k-1}).
    With ``validate`` the floors are checked against the chain

        T F(k+1) >= (T F0)^2 + (T F1)^2 + 2 (T F2)^2 + ... + 2^{k-2} (T F(k-1))^2

    and its weaker single-term consequence, up to trapezoid slack.
    """
    n0 = state.steps_per_T
    n_total = len(state.t) - 1
    available = 1
    while n0 * 2**available <= n_total:
        available += 1
    if k_max is None:
        k_max = available
    elif n0 * 2 ** (k_max - 1) > n_total:
        raise ValueError(
            f"horizon too short for F({k_max}): need t_max >= "
            f"{state.T * 2 ** (k_max - 1)}, have {state.t_max}"
        )
    F = {0: float(np.min(state.f_values[:n0]))}
    for k in range(1, k_max + 1):
        F[k] = float(state.f_values[n0 * 2 ** (k - 1)])
    if validate:
        T = state.T
        # trapezoid slack, taken relative so it stays meaningful where the
        # floors grow doubly exponentially
        rel = 10.0 * state.h / T
        for k in range(2, k_max):
            if F[k] < F[k - 1] * (1.0 - 1e-12):
                raise NumericsError(f"floor F({k}) fell below F({k - 1})")
        for k in range(1, k_max):
            rhs = (T * F[0]) ** 2
            rhs += sum(2.0 ** (j - 1) * (T * F[j]) ** 2 for j in range(1, k))
            if T * F[k + 1] < rhs * (1.0 - rel):
                raise NumericsError(
                    f"dyadic chain violated at k={k}: "
                    f"TF({k + 1})={T * F[k + 1]:.6g} < {rhs:.6g}"
                )
            weak = 2.0 ** (k - 2) * (T * F[k - 1]) ** 2
            if T * F[k + 1] < weak * (1.0 - rel):
                raise NumericsError(
                    f"single-term chain violated at k={k}"
                )
    return F


def k0_rule(T: float, F0: float) -> int:
    """Smallest integer k >= 3 with 2^k >= max(2^6 / (T F0)^4, 8)."""
    if not (T > 0.0 and F0 > 0.0):
        raise ValueError("T and F(0) must be positive")
    threshold = max(64.0 / (T * F0) ** 4, 8.0)
    k = 3
    while 2.0**k < threshold * (1.0 - 1e-12):
        k += 1
        if k > 4096:
            raise NumericsError("k0 search failed: T F(0) is too small")
    return k


def stretched_bound(state: RecursionState, t: float) -> float:
    """Stretched-exponential cap on m_tilde(t) / (r(omega) T).

    Returns 2^{-(2^{-k0} t / T)^{1/2}}, valid for t/T >= 2^{k0 - 1}; the
    marched state is checked against the cap (up to trapezoid slack)
    before it is returned.
    """
    T, k0 = state.T, state.k0
    ratio = t / T
    if ratio < 2.0 ** (k0 - 1) * (1.0 - 1e-12):
        raise ValueError(
            f"t={t} below the validity threshold T 2^(k0-1) = {T * 2.0 ** (k0 - 1)}"
        )
    if t > state.t_max * (1.0 + 1e-12):
        raise ValueError(f"t={t} beyond the marched horizon {state.t_max}")
    bound = 2.0 ** (-math.sqrt(2.0 ** (-k0) * ratio))
    computed = state.m_at(t) / (state.r_omega * T)
    if computed > bound * (1.0 + 1e-3):
        raise NumericsError(
            f"marched majorant {computed:.6g} exceeds the stretched bound "
            f"{bound:.6g} at t={t}"
        )
    return bound
