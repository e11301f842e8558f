"""Explicit semigroup decay bounds driven by resolvent information.

Every estimate here consumes a certified lower bound r on the resolvent
quantity r(omega) (use the ``r_lo`` end of a sweep enclosure, never
``r_hi``: an underestimate of r only weakens a bound, an overestimate
would invalidate it) together with a majorant m(t) >= ||exp(tA)||, and
returns a pointwise bound on the semigroup norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import _search
from .errors import HypothesisError, NumericsError
from .resolvent import ResolventProfile

__all__ = [
    "ExponentialWeight",
    "TabulatedWeight",
    "WeightSpec",
    "BoundCurve",
    "CutoffCertificate",
    "weight_norm",
    "gps_bound",
    "optimal_split",
    "m_new",
    "m_new_growth_constant",
    "propa_constant",
    "contrb_bound",
    "optimal_contrb",
    "contrb_schedule",
    "contrbprime_bound",
    "power_bound",
    "optimal_power",
    "scheduled_power",
    "phi_limit",
    "phi_bound_curve",
    "optimal_cutoff",
]

# |omega - omega_hat| below this (relative) switches the exponential
# weight-norm integral to its removable-singularity branch.
_OMEGA_BRANCH_RTOL = 1e-8


@dataclass(frozen=True)
class ExponentialWeight:
    """Majorant m(t) = M_hat * exp(omega_hat * t)."""

    M_hat: float
    omega_hat: float

    def __post_init__(self):
        if not (math.isfinite(self.M_hat) and math.isfinite(self.omega_hat)):
            raise ValueError("weight parameters must be finite")
        if self.M_hat < 1.0:
            raise ValueError(f"M_hat must be >= 1, got {self.M_hat}")

    def value(self, t: float) -> float:
        return self.M_hat * math.exp(self.omega_hat * t)


@dataclass(frozen=True)
class TabulatedWeight:
    """Majorant tabulated on [0, horizon), equal to +inf beyond.

    Values are interpolated log-linearly between grid nodes, which keeps
    the weight positive.
    """

    grid: np.ndarray
    values: np.ndarray
    horizon: float

    def __init__(self, grid, values, horizon: float):
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValueError("grid and values must be congruent 1-d arrays, size >= 2")
        if g[0] != 0.0 or np.any(np.diff(g) <= 0.0):
            raise ValueError("grid must be ascending and start at 0")
        if not np.all(v > 0.0):
            raise ValueError("tabulated weight values must be positive")
        if not horizon > 0.0 or g[-1] > horizon:
            raise ValueError("horizon must be positive and cover the grid")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "horizon", float(horizon))
        self.grid.setflags(write=False)
        self.values.setflags(write=False)

    def value(self, t: float) -> float:
        if t >= self.horizon:
            return math.inf
        return float(np.exp(self._log_at(np.array([t]))[0]))

    def _log_at(self, t: np.ndarray) -> np.ndarray:
        # beyond the last node the final value is held constant
        return np.interp(t, self.grid, np.log(self.values))


WeightSpec = Union[ExponentialWeight, TabulatedWeight]


def _simpson_log_integrand(log_f: Callable[[np.ndarray], np.ndarray],
                           edges: np.ndarray, rel_tol: float = 1e-8,
                           max_doublings: int = 18) -> float:
    """Composite Simpson of exp(log_f) over cells, doubling until stable."""
    total_prev = None
    per_cell = 2
    for _ in range(max_doublings):
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            xs = np.linspace(a, b, per_cell + 1)
            fx = np.exp(log_f(xs))
            h = (b - a) / per_cell
            total += h / 3.0 * (fx[0] + fx[-1] + 4.0 * fx[1:-1:2].sum()
                                + 2.0 * fx[2:-1:2].sum())
        if total_prev is not None and abs(total - total_prev) <= rel_tol * abs(total):
            return total
        total_prev = total
        per_cell *= 2
    raise NumericsError("weight-norm quadrature failed to converge")


def weight_norm(m: WeightSpec, omega: float, a: float) -> float:
    """(int_0^a m(s)^{-2} e^{2 omega s} ds)^{1/2}.

    Closed form for exponential weights (with a dedicated branch at
    omega = omega_hat); adaptive Simpson on the stored grid for tabulated
    ones, which must satisfy a <= horizon.
    """
    if not a > 0.0:
        raise ValueError(f"integration endpoint must be positive, got a={a}")
    if isinstance(m, ExponentialWeight):
        mu = 2.0 * (omega - m.omega_hat)
        scale = max(1.0, abs(m.omega_hat))
        if abs(omega - m.omega_hat) < _OMEGA_BRANCH_RTOL * scale:
            integral = a / m.M_hat**2
        else:
            integral = math.expm1(mu * a) / (mu * m.M_hat**2)
        return math.sqrt(integral)
    if isinstance(m, TabulatedWeight):
        if a > m.horizon:
            raise ValueError(
                f"a={a} exceeds the tabulated horizon {m.horizon}"
            )
        edges = np.unique(np.concatenate((
            m.grid[m.grid < a], np.array([0.0, a]))))

        def log_f(s: np.ndarray) -> np.ndarray:
            return 2.0 * omega * s - 2.0 * m._log_at(s)

        return math.sqrt(_simpson_log_integrand(log_f, edges))
    raise TypeError(f"unsupported weight spec {type(m).__name__}")


def gps_bound(r_omega: float, m: WeightSpec, omega: float, t: float, a: float) -> float:
    """Semigroup-norm bound e^{omega t} / (r * ||1/m||_[0,a] * ||1/m||_[0,t-a]).

    ``r_omega`` is a positive lower bound for r(omega); the two weighted
    L^2 norms are taken over the split t = a + (t - a).
    """
    if not r_omega > 0.0:
        raise HypothesisError(f"bound needs r(omega) > 0, got {r_omega}")
    if not (0.0 < a < t):
        raise ValueError(f"split must satisfy 0 < a < t, got a={a}, t={t}")
    denom = r_omega * weight_norm(m, omega, a) * weight_norm(m, omega, t - a)
    return math.exp(omega * t) / denom


def optimal_split(r_omega: float, m: WeightSpec, omega: float, t: float,
                  n_grid: int = 256) -> tuple[float, float]:
    """Minimise :func:`gps_bound` over the split point a in (0, t).

    Returns (a, bound).  For exponential weights the product of the two
    half-norms is symmetric and unimodal, so the minimiser is t/2; the
    optimiser recovers it numerically rather than assuming it.
    """
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    lo, hi = 0.0, t
    if isinstance(m, TabulatedWeight):
        # both halves must stay within the tabulated horizon
        lo = max(lo, t - m.horizon)
        hi = min(hi, m.horizon)
        if not hi > lo:
            raise ValueError(
                f"no admissible split for t={t} with horizon {m.horizon}"
            )
    pad = 1e-9 * t
    a, val = _search.grid_then_golden(
        lambda x: gps_bound(r_omega, m, omega, t, x),
        lo + pad, hi - pad, n_grid=n_grid)
    return a, val


def m_new(M_hat: float, omega_hat: float, omega: float, r_omega: float,
          t: float) -> float:
    """Improved majorant 2 M^2 (om_hat - om) / (r [1 - e^{(om-om_hat)t}]) e^{om t}.

    This is the symmetric-split bound for the exponential weight
    (M_hat, omega_hat) evaluated in closed form; requires omega < omega_hat.
    """
    if omega >= omega_hat:
        raise HypothesisError(
            "m_new requires omega < omega_hat; for omega = omega_hat use "
            "gps_bound, whose weight norm has the flat-weight branch"
        )
    if not r_omega > 0.0:
        raise HypothesisError(f"needs r(omega) > 0, got {r_omega}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    gap = omega_hat - omega
    return (2.0 * M_hat**2 * gap
            / (r_omega * (-math.expm1(-gap * t)))) * math.exp(omega * t)


def m_new_growth_constant(M_hat: float, omega_hat: float, omega: float,
                          r_omega: float) -> float:
    """sup_t e^{-omega t} min(M_hat e^{omega_hat t}, m_new(t)), numerically.

    The first branch increases in t and the second decreases, so the sup
    sits at their crossing; located by bisection in log-time.
    """
    if omega >= omega_hat:
        raise HypothesisError("requires omega < omega_hat")

    def diff(t: float) -> float:
        return (M_hat * math.exp((omega_hat - omega) * t)
                - m_new(M_hat, omega_hat, omega, r_omega, t) * math.exp(-omega * t))

    lo, hi = 1e-12, 1.0
    while diff(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NumericsError("growth-constant crossing not bracketed")
    for _ in range(200):
        midt = math.sqrt(lo * hi)
        if diff(midt) < 0.0:
            lo = midt
        else:
            hi = midt
        if hi / lo < 1.0 + 1e-14:
            break
    t_star = math.sqrt(lo * hi)
    return min(M_hat * math.exp((omega_hat - omega) * t_star),
               m_new(M_hat, omega_hat, omega, r_omega, t_star)
               * math.exp(-omega * t_star))


def propa_constant(M_hat: float, omega_hat: float, omega: float,
                   r_omega: float) -> float:
    """M_hat (1 + 2 M_hat (omega_hat - omega) / r(omega)).

    With this constant, ||exp(tA)|| <= const * e^{omega t} whenever
    ||exp(tA)|| <= M_hat e^{omega_hat t} and r(omega) > 0 for some
    omega < omega_hat.
    """
    if omega >= omega_hat:
        raise HypothesisError(
            f"requires omega < omega_hat, got omega={omega}, omega_hat={omega_hat}"
        )
    if not r_omega > 0.0:
        raise HypothesisError(f"requires r(omega) > 0, got {r_omega}")
    return M_hat * (1.0 + 2.0 * M_hat * (omega_hat - omega) / r_omega)


def contrb_bound(M_hat: float, omega_hat: float, omega: float, r_omega: float,
                 s: float, t: float) -> float:
    """Rate-traded bound with decay e^{(omega - s r(omega)) t}, s in [0, 1).

    Trades a larger constant for extra decay rate by extending the
    resolvent bound left of omega; s = 0 reduces exactly to
    propa_constant * e^{omega t}.
    """
    if not 0.0 <= s < 1.0:
        raise ValueError(f"s must lie in [0, 1), got {s}")
    const = propa_constant(M_hat, omega_hat, omega, r_omega)
    if s == 0.0:
        return const * math.exp(omega * t)
    num = (1.0 - s) * r_omega + 2.0 * M_hat * (omega_hat - omega + s * r_omega)
    return M_hat * num / ((1.0 - s) * r_omega) * math.exp((omega - s * r_omega) * t)


def contrb_schedule(t: float) -> float:
    """The s = t / (1 + t) schedule, giving O(t) e^{(omega - r(omega)) t} decay."""
    return t / (1.0 + t)


def optimal_contrb(M_hat: float, omega_hat: float, omega: float, r_omega: float,
                   t: float, n_grid: int = 256) -> tuple[float, float]:
    """Minimise :func:`contrb_bound` over s in [0, 1); returns (s, bound)."""
    s, val = _search.grid_then_golden(
        lambda s_: contrb_bound(M_hat, omega_hat, omega, r_omega, s_, t),
        0.0, 1.0 - 1e-9, n_grid=n_grid)
    at_zero = contrb_bound(M_hat, omega_hat, omega, r_omega, 0.0, t)
    if at_zero <= val:
        return 0.0, at_zero
    return s, val


def contrbprime_bound(M_hat: float, r0: float, s: float, t: float) -> float:
    """Variant for resolvent control on Re z >= 0 (omega = omega_hat = 0).

    M_hat ((1-s) + 2 M_hat s)/(1-s) * e^{-s r(0) t}, for s in [0, 1).
    """
    if not 0.0 <= s < 1.0:
        raise ValueError(f"s must lie in [0, 1), got {s}")
    if not r0 > 0.0:
        raise HypothesisError(f"requires r(0) > 0, got {r0}")
    return M_hat * ((1.0 - s) + 2.0 * M_hat * s) / (1.0 - s) * math.exp(-s * r0 * t)


def power_bound(M_hat: float, r0: float, t: float, N: int) -> float:
    """(2 M_hat N / (r(0) t))^N, from the semigroup property applied N times."""
    if N < 1 or N != int(N):
        raise ValueError(f"N must be a positive integer, got {N}")
    if not (r0 > 0.0 and t > 0.0):
        raise HypothesisError(f"requires r(0) > 0 and t > 0, got r0={r0}, t={t}")
    return (2.0 * M_hat * N / (r0 * t)) ** N


def optimal_power(M_hat: float, r0: float, t: float,
                  alpha: float | None = None) -> tuple[int, float]:
    """Best N in {1, ..., ceil(alpha t) + 2}; returns (N, bound).

    alpha defaults to r0 / (4 M_hat) and must stay below r0 / (2 M_hat)
    so that the scheduled choice N ~ alpha t keeps the base below 1.
    """
    if alpha is None:
        alpha = r0 / (4.0 * M_hat)
    if not 0.0 < alpha < r0 / (2.0 * M_hat):
        raise HypothesisError(
            f"alpha must lie in (0, r0/(2 M_hat)), got {alpha}"
        )
    n_max = int(math.ceil(alpha * t)) + 2
    best = min(((power_bound(M_hat, r0, t, n), n) for n in range(1, n_max + 1)),
               key=lambda p: (p[0], p[1]))
    return best[1], best[0]


def scheduled_power(M_hat: float, r0: float, t: float, alpha: float) -> tuple[int, float]:
    """The N = floor(alpha t) choice (clamped to N >= 1); returns (N, bound)."""
    if not 0.0 < alpha < r0 / (2.0 * M_hat):
        raise HypothesisError(
            f"alpha must lie in (0, r0/(2 M_hat)), got {alpha}"
        )
    N = max(int(math.floor(alpha * t)), 1)
    return N, power_bound(M_hat, r0, t, N)


def phi_limit(profile: ResolventProfile, omega0: float, t: float,
              epsilon0: float) -> float:
    """Grid infimum of t (omega - omega0) - ln r_lo(omega) over (omega0, omega0 + eps0].

    Captures the trade-off between pushing omega toward the growth
    abscissa (smaller exponential factor e^{t(omega-omega0)}) and the
    vanishing of r(omega) there.
    """
    if not epsilon0 > 0.0:
        raise ValueError(f"epsilon0 must be positive, got {epsilon0}")
    sel = (profile.omega_grid > omega0) & (profile.omega_grid <= omega0 + epsilon0)
    if not np.any(sel):
        raise ValueError(
            f"profile has no grid points in ({omega0}, {omega0 + epsilon0}]"
        )
    r = profile.r_lo[sel]
    if np.any(r <= 0.0):
        raise HypothesisError("profile must certify r > 0 on the range")
    vals = t * (profile.omega_grid[sel] - omega0) - np.log(r)
    return float(np.min(vals))


def phi_bound_curve(profile: ResolventProfile, omega0: float, epsilon0: float,
                    m: WeightSpec, t_grid: Sequence[float]) -> "BoundCurve":
    """Bound curve e^{omega0 t + Phi(t)} / int_0^{1/2} m^{-2} e^{2 omega0 s} ds.

    Valid for t >= 1 (the fixed split a = 1/2 needs t - a >= a).
    """
    ts = np.asarray([float(t) for t in t_grid])
    if np.any(ts < 1.0):
        raise ValueError("phi-limit curve requires t >= 1")
    half_int = weight_norm(m, omega0, 0.5) ** 2
    vals = np.array([
        math.exp(omega0 * t + phi_limit(profile, omega0, t, epsilon0)) / half_int
        for t in ts
    ])
    return BoundCurve(
        t_grid=ts, values=vals, method="phi_limit",
        params={"omega0": omega0, "epsilon0": epsilon0},
    )


@dataclass(frozen=True)
class CutoffCertificate:
    """Sampled optimal cutoff with its equality certificate.

    ``lhs`` is ||chi' m|| in the e^{omega .} weighted L^2; ``rhs`` is
    1 / ||1/m|| over [0, a].  The cutoff is optimal exactly when the two
    agree (the equality case of Cauchy-Schwarz), so lhs ~ rhs up to
    quadrature error certifies the construction.
    """

    s_grid: np.ndarray
    chi: np.ndarray
    lhs: float
    rhs: float
    total_variation: float


def optimal_cutoff(m: WeightSpec, omega: float, a: float,
                   n_grid: int = 4096) -> CutoffCertificate:
    """Decreasing cutoff chi with chi(0)=1, chi(a)=0 minimising ||chi' m||.

    chi(s) = C int_s^a m(sigma)^{-2} e^{2 omega sigma} d sigma with
    C = 1 / ||1/m||^2, sampled on n_grid+1 uniform points of [0, a].
    """
    if not a > 0.0:
        raise ValueError(f"cutoff needs a > 0, got {a}")
    if isinstance(m, TabulatedWeight) and a > m.horizon:
        raise ValueError(f"weight is not finite on [0, {a}] (horizon {m.horizon})")
    if n_grid < 8 or n_grid % 2 != 0:
        raise ValueError("n_grid must be an even integer >= 8")
    s = np.linspace(0.0, a, n_grid + 1)
    if isinstance(m, ExponentialWeight):
        log_m = np.log(m.M_hat) + m.omega_hat * s
    else:
        log_m = m._log_at(s)
    g = np.exp(2.0 * omega * s - 2.0 * log_m)  # m^{-2} e^{2 omega s}

    # cumulative Simpson on pairs of cells; odd nodes filled by local quadratic
    h = a / n_grid
    cum = np.zeros(n_grid + 1)
    pair = (h / 3.0) * (g[:-2:2] + 4.0 * g[1:-1:2] + g[2::2])
    cum[2::2] = np.cumsum(pair)
    # int over [s_{2k}, s_{2k+1}] from the same parabola
    left_half = (h / 12.0) * (5.0 * g[:-2:2] + 8.0 * g[1:-1:2] - g[2::2])
    cum[1::2] = cum[:-2:2] + left_half
    total = cum[-1]
    chi = (total - cum) / total
    chi = np.maximum.accumulate(chi[::-1])[::-1]  # clip FP wiggle, keep monotone

    # certificate: ||chi' m|| e^{omega .}-weighted vs 1/||1/m||, with
    # chi'(s) = -C m^{-2} e^{2 omega s}; the lhs integral is Simpson on the
    # sampled grid, the rhs comes from the reference weight-norm quadrature.
    C = 1.0 / total
    sq = (C ** 2) * g  # |chi'|^2 m^2 e^{-2 omega s}
    lhs = math.sqrt(
        (h / 3.0) * (sq[0] + sq[-1] + 4.0 * sq[1:-1:2].sum() + 2.0 * sq[2:-1:2].sum())
    )
    rhs = 1.0 / weight_norm(m, omega, a)
    tv = C * total  # int_0^a |chi'| ds, exactly 1 up to quadrature
    return CutoffCertificate(s_grid=s, chi=chi, lhs=lhs, rhs=rhs,
                             total_variation=tv)


@dataclass(frozen=True)
class BoundCurve:
    """Bound values on a time grid, tagged with the producing method."""

    t_grid: np.ndarray
    values: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ValueError("t_grid and values must be congruent 1-d arrays")
        if np.any(t <= 0.0) or np.any(np.diff(t) <= 0.0):
            raise ValueError("t_grid must be positive and ascending")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise ValueError("bound values must be finite and positive")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)

    def to_csv(self) -> str:
        lines = [f"# method={self.method}"]
        for key in sorted(self.params):
            lines.append(f"# {key}={self.params[key]}")
        lines.append("t,bound,method")
        for t, v in zip(self.t_grid, self.values):
            lines.append(f"{t:.17g},{v:.17g},{self.method}")
        return "\n".join(lines) + "\n"
