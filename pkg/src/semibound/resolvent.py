"""Certified enclosures of r(omega) = 1 / sup_{Re z >= omega} ||(z-A)^{-1}||.

For a matrix with no spectrum in the closed half-plane Re z >= omega the
supremum is attained on the boundary line (the resolvent decays at
infinity and log||(z-A)^{-1}|| is subharmonic off the spectrum), so the
sweep reduces to a one-dimensional minimisation of

    g(y) = sigma_min((omega + i y) I - A)

over the line.  g is 1-Lipschitz, which yields certified lower bounds
from point evaluations (cone bounds a la Piyavskii); the far field is
dominated through dist(z, numerical-range box) <= sigma_min and the
sqrt(omega^2 + y^2) - ||A|| tail estimate.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .errors import HypothesisError, NumericsError, SpectrumError
from .linalg import _FULL_SVD_MAX_DIM, _shifted, _sigma_min_lu
from .linalg import OperatorMatrix, semigroup_norm, sigma_min

__all__ = [
    "CertifiedInterval",
    "ResolventProfile",
    "HilleYosidaReport",
    "r_of_omega",
    "r_on_line",
    "lipschitz_extend",
    "omega0_estimate",
    "profile",
    "hille_yosida_check",
]

_MAX_EVALS = 60_000
_MAX_WINDOW_DOUBLINGS = 80


@dataclass(frozen=True)
class CertifiedInterval:
    """Enclosure r_lo <= r(omega) <= r_hi with sweep metadata."""

    omega: float
    r_lo: float
    r_hi: float
    argmin_y: float
    window: float
    evaluations: int

    @property
    def width(self) -> float:
        return self.r_hi - self.r_lo


def _box_distance(x: float, y_a: float, y_b: float,
                  box: tuple[float, float, float, float]) -> float:
    """Distance from the segment {x + iy : y in [y_a, y_b]} to a box.

    The box is (re_lo, re_hi, im_lo, im_hi) and must contain the numerical
    range, so the distance lower-bounds sigma_min on the whole segment.
    """
    re_lo, re_hi, im_lo, im_hi = box
    dx = max(0.0, re_lo - x, x - re_hi)
    dy = max(0.0, im_lo - y_b, y_a - im_hi)
    return math.hypot(dx, dy)


class _LineSweep:
    """Certified global minimisation of sigma_min along Re z = omega."""

    def __init__(self, om: OperatorMatrix, omega: float, rel_width: float):
        self.om = om
        self.omega = float(omega)
        self.rel_width = float(rel_width)
        re_rng = om.real_numerical_range
        im_rng = om.imag_numerical_range
        self.box = (re_rng[0], re_rng[1], im_rng[0], im_rng[1])
        # real matrix, real shift: sigma_min(omega + iy) is even in y
        self.symmetric = bool(
            np.allclose(om.matrix.imag, 0.0, atol=0.0) and omega == float(omega)
        )
        self.evals = 0
        self.best_val = math.inf
        self.best_y = 0.0
        self._cache: dict[float, float] = {}
        self._warm_vec = None  # reused power-iteration vector for large dims

    def f(self, y: float) -> float:
        v = self._cache.get(y)
        if v is None:
            if self.evals >= _MAX_EVALS:
                raise NumericsError(
                    f"line sweep at omega={self.omega} hit the evaluation cap"
                )
            if self.om.dim > _FULL_SVD_MAX_DIM:
                v, vec = _sigma_min_lu(
                    _shifted(self.om, complex(self.omega, y)), self._warm_vec)
                if vec is not None:
                    self._warm_vec = vec
            else:
                v = sigma_min(self.om, complex(self.omega, y))
            self._cache[y] = v
            self.evals += 1
        if v < self.best_val or (v == self.best_val and abs(y) < abs(self.best_y)):
            self.best_val = v
            self.best_y = y
        return v

    def run(self) -> CertifiedInterval:
        om, omega = self.om, self.omega
        window = abs(omega) + 2.0 * (1.0 + om.norm2)
        lam = om.eigenvalues
        lo = min(float(np.min(lam.imag)), self.box[2]) - 1.0
        hi = max(float(np.max(lam.imag)), self.box[3]) + 1.0
        if self.symmetric:
            lo = 0.0
            hi = max(hi, 1.0)
        lo = max(lo, -window)
        hi = min(hi, window)

        seeds = [lo, hi]
        if lo <= 0.0 <= hi:
            seeds.append(0.0)
        # seed imaginary parts of the eigenvalues nearest the line: their
        # projections are where sigma_min dips; farther dips are found by
        # cone refinement anyway
        order = np.argsort(np.abs(lam.real - omega), kind="stable")[:24]
        for w in lam[order]:
            y = abs(w.imag) if self.symmetric else float(w.imag)
            if lo < y < hi:
                seeds.append(y)
        span = hi - lo
        seeds.extend(lo + span * k / 8.0 for k in range(1, 8))
        seeds = self._dedupe(seeds, min_gap=1e-9 * (1.0 + span))

        self._heap = []
        self._counter = 0
        fvals = [self.f(y) for y in seeds]
        for (a, fa), (b, fb) in zip(zip(seeds, fvals), zip(seeds[1:], fvals[1:])):
            self._push(a, fa, b, fb)
        self._refine()
        self.lo, self.hi = lo, hi

        # Certify the strips between the sweep domain and the outer window,
        # then push the window out until the tail bound cannot undercut the
        # interior minimum.
        doublings = 0
        while True:
            left_done = (self.symmetric and self.lo <= 0.0) or self.lo <= -window \
                or _box_distance(omega, -window, self.lo, self.box) >= self.best_val
            right_done = self.hi >= window \
                or _box_distance(omega, self.hi, window, self.box) >= self.best_val
            tail_classic = math.hypot(omega, window) - om.norm2
            tail_box_up = _box_distance(omega, window, math.inf, self.box)
            tail_box_down = math.inf if self.symmetric else \
                _box_distance(omega, -math.inf, -window, self.box)
            tail_ok = max(tail_classic, min(tail_box_up, tail_box_down)) >= self.best_val
            if left_done and right_done and tail_ok:
                break
            if not (left_done and right_done):
                step = max(self.hi - self.lo, 1.0)
                if not left_done:
                    new_lo = max(self.lo - step, -window)
                    self._push(new_lo, self.f(new_lo), self.lo, self._cache[self.lo])
                    self.lo = new_lo
                if not right_done:
                    new_hi = min(self.hi + step, window)
                    self._push(self.hi, self._cache[self.hi], new_hi, self.f(new_hi))
                    self.hi = new_hi
                self._refine()
            else:
                window *= 2.0
                doublings += 1
                if doublings > _MAX_WINDOW_DOUBLINGS:
                    raise NumericsError(
                        f"sweep window at omega={omega} failed to dominate the tail"
                    )

        interior_lb = self._heap[0][0] if self._heap else self.best_val
        r_lo = max(min(interior_lb, self.best_val), 0.0)
        return CertifiedInterval(
            omega=omega,
            r_lo=r_lo,
            r_hi=self.best_val,
            argmin_y=self.best_y,
            window=window,
            evaluations=self.evals,
        )

    def _push(self, a: float, fa: float, b: float, fb: float) -> None:
        if b <= a:
            return
        self._counter += 1
        heapq.heappush(self._heap, (self._interval_lb(a, fa, b, fb),
                                    self._counter, a, fa, b, fb))

    def _refine(self) -> None:
        """Split lowest-bound intervals until r_hi <= r_lo * (1 + rel_width)."""
        target = 1.0 + self.rel_width
        while self._heap:
            lb, _, a, fa, b, fb = heapq.heappop(self._heap)
            if lb * target >= self.best_val:
                self._counter += 1
                heapq.heappush(self._heap, (lb, self._counter, a, fa, b, fb))
                return
            # split at the cone vertex, clamped away from the endpoints
            mid = 0.5 * (a + b) + 0.5 * (fa - fb)
            mid = min(max(mid, a + 0.1 * (b - a)), b - 0.1 * (b - a))
            fm = self.f(mid)
            self._push(a, fa, mid, fm)
            self._push(mid, fm, b, fb)

    def _interval_lb(self, a: float, fa: float, b: float, fb: float) -> float:
        cone = 0.5 * (fa + fb - (b - a))
        return max(cone, _box_distance(self.omega, a, b, self.box), 0.0)

    @staticmethod
    def _dedupe(values: Sequence[float], min_gap: float) -> list[float]:
        out: list[float] = []
        for v in sorted(values):
            if not out or v - out[-1] > min_gap:
                out.append(v)
        return out


def _check_rel_width(rel_width: float) -> float:
    if not 0.0 < rel_width <= 0.5:
        raise ValueError(f"rel_width must lie in (0, 0.5], got {rel_width}")
    return float(rel_width)


def r_of_omega(A, omega: float, rel_width: float = 1e-4) -> CertifiedInterval:
    """Certified enclosure of r(omega) over the half-plane Re z >= omega.

    Requires the spectrum strictly to the left of omega; the half-plane
    supremum then coincides with the supremum over the boundary line.

    Raises
    ------
    SpectrumError
        If some eigenvalue has Re lambda >= omega.
    """
    om = OperatorMatrix.wrap(A)
    rel_width = _check_rel_width(rel_width)
    if om.spectral_abscissa >= omega:
        lam = om.eigenvalues[0]
        raise SpectrumError(
            f"spectrum in the half-plane Re z >= {omega}: eigenvalue {lam}",
            nearest_eigenvalue=lam,
        )
    return _LineSweep(om, omega, rel_width).run()


def r_on_line(A, omega: float, rel_width: float = 1e-4) -> CertifiedInterval:
    """Certified enclosure of 1 / sup_{Re z = omega} ||(z-A)^{-1}||.

    Unlike :func:`r_of_omega` spectrum is allowed on either side; only the
    line itself must stay clear of eigenvalues.
    """
    om = OperatorMatrix.wrap(A)
    rel_width = _check_rel_width(rel_width)
    gap = float(np.min(np.abs(om.eigenvalues.real - omega)))
    if gap < 1e-9 * (1.0 + om.norm2):
        lam = min(om.eigenvalues, key=lambda w: abs(w.real - omega))
        raise SpectrumError(
            f"spectrum on the sweep line Re z = {omega}: eigenvalue {lam}",
            nearest_eigenvalue=lam,
        )
    return _LineSweep(om, omega, rel_width).run()


def lipschitz_extend(r_at_omega: float, omega: float, omega_prime: float) -> float:
    """Push a resolvent bound leftwards: r(omega') >= r(omega) - (omega - omega').

    Valid for omega' in (omega - r(omega), omega]; returns the extended
    lower bound for r(omega').
    """
    if r_at_omega <= 0.0:
        raise HypothesisError(f"extension needs r(omega) > 0, got {r_at_omega}")
    if omega_prime > omega:
        raise HypothesisError(
            f"extension only moves left: omega'={omega_prime} > omega={omega}"
        )
    if omega_prime <= omega - r_at_omega:
        raise HypothesisError(
            f"omega'={omega_prime} outside the admissible range "
            f"({omega - r_at_omega}, {omega}]"
        )
    return r_at_omega - (omega - omega_prime)


def omega0_estimate(A, probe_omegas: Sequence[float],
                    rel_width: float = 1e-2) -> float:
    """Growth abscissa of A; equals the spectral abscissa for matrices.

    The probe grid (strictly right of the spectral abscissa) is swept to
    confirm r(probe) > 0 and nondecreasing, as a consistency check on the
    returned value.
    """
    om = OperatorMatrix.wrap(A)
    alpha = om.spectral_abscissa
    probes = sorted(float(w) for w in probe_omegas)
    if probes and probes[0] <= alpha:
        raise SpectrumError(
            f"probe omega={probes[0]} not right of the spectral abscissa {alpha}"
        )
    prev: CertifiedInterval | None = None
    for w in probes:
        cur = r_of_omega(om, w, rel_width)
        if not cur.r_lo > 0.0:
            raise NumericsError(f"probe at omega={w} failed to certify r > 0")
        if prev is not None and cur.r_hi < prev.r_lo - 1e-12:
            raise NumericsError(
                f"certified r decreased between omega={prev.omega} and {w}"
            )
        prev = cur
    return alpha


@dataclass(frozen=True)
class ResolventProfile:
    """r(omega) enclosures over an ascending omega grid."""

    omega_grid: np.ndarray
    r_lo: np.ndarray
    r_hi: np.ndarray
    argmin_y: np.ndarray
    window: np.ndarray
    grid_resolution: float = field(default=0.0)

    @classmethod
    def from_intervals(cls, intervals: Sequence[CertifiedInterval]) -> "ResolventProfile":
        ivs = list(intervals)
        return cls(
            omega_grid=np.array([iv.omega for iv in ivs]),
            r_lo=np.array([iv.r_lo for iv in ivs]),
            r_hi=np.array([iv.r_hi for iv in ivs]),
            argmin_y=np.array([iv.argmin_y for iv in ivs]),
            window=np.array([iv.window for iv in ivs]),
            grid_resolution=max((iv.width for iv in ivs), default=0.0),
        )

    @classmethod
    def synthetic(cls, omega_grid, r_values) -> "ResolventProfile":
        """Profile with zero-width enclosures, for model r(omega) curves."""
        w = np.asarray(omega_grid, dtype=float)
        r = np.asarray(r_values, dtype=float)
        if w.ndim != 1 or w.shape != r.shape:
            raise ValueError("omega_grid and r_values must be 1-d and congruent")
        if np.any(np.diff(w) <= 0.0):
            raise ValueError("omega_grid must be strictly ascending")
        zeros = np.zeros_like(w)
        return cls(w, r.copy(), r.copy(), zeros, zeros, 0.0)

    def __len__(self) -> int:
        return len(self.omega_grid)

    def to_csv(self) -> str:
        lines = ["omega,r_lo,r_hi,argmin_y,window_Y"]
        for k in range(len(self)):
            lines.append(
                f"{self.omega_grid[k]:.17g},{self.r_lo[k]:.17g},"
                f"{self.r_hi[k]:.17g},{self.argmin_y[k]:.17g},{self.window[k]:.17g}"
            )
        return "\n".join(lines) + "\n"


def profile(A, omega_grid: Sequence[float], rel_width: float = 1e-4) -> ResolventProfile:
    """Sweep r(omega) over an ascending grid and validate its shape.

    The certified intervals must be consistent with r nondecreasing and
    1-Lipschitz in omega; a certified violation of either property means
    the sweep itself failed and raises :class:`NumericsError`.
    """
    omegas = [float(w) for w in omega_grid]
    if any(b <= a for a, b in zip(omegas, omegas[1:])):
        raise ValueError("omega_grid must be strictly ascending")
    om = OperatorMatrix.wrap(A)
    intervals = pmap(lambda w: r_of_omega(om, w, rel_width), omegas)
    for prev, cur in zip(intervals, intervals[1:]):
        d_omega = cur.omega - prev.omega
        if cur.r_hi < prev.r_lo - 1e-12:
            raise NumericsError(
                f"certified r decreasing between omega={prev.omega} and {cur.omega}"
            )
        if cur.r_lo - prev.r_hi > d_omega + 1e-12:
            raise NumericsError(
                f"certified slope above 1 between omega={prev.omega} and {cur.omega}"
            )
    return ResolventProfile.from_intervals(intervals)


@dataclass(frozen=True)
class HilleYosidaReport:
    """Two-sided contraction-bound check: resolvent side and semigroup side."""

    omega: float
    lambdas: np.ndarray
    resolvent_norms: np.ndarray
    resolvent_ok: np.ndarray
    t_grid: np.ndarray
    semigroup_norms: np.ndarray
    semigroup_ok: np.ndarray

    @property
    def all_ok(self) -> bool:
        return bool(np.all(self.resolvent_ok) and np.all(self.semigroup_ok))

    def violations(self) -> list[str]:
        out = []
        for lam, norm, ok in zip(self.lambdas, self.resolvent_norms, self.resolvent_ok):
            if not ok:
                out.append(
                    f"resolvent: ||(lambda-A)^-1|| = {norm:.6g} > 1/(lambda-omega) "
                    f"= {1.0 / (lam - self.omega):.6g} at lambda={lam:.6g}"
                )
        for t, norm, ok in zip(self.t_grid, self.semigroup_norms, self.semigroup_ok):
            if not ok:
                out.append(
                    f"semigroup: ||exp(tA)|| = {norm:.6g} > e^(omega t) "
                    f"= {math.exp(self.omega * t):.6g} at t={t:.6g}"
                )
        return out


def hille_yosida_check(A, omega: float, lambda_grid: Sequence[float],
                       t_grid: Sequence[float] | None = None) -> HilleYosidaReport:
    """Check ||(lambda-A)^{-1}|| <= (lambda-omega)^{-1} and ||exp(tA)|| <= e^{omega t}.

    Both statements characterise the same contraction property; sampling
    them on a grid of lambdas and times tests the equivalence from both
    sides.  Violations are reported, not raised.
    """
    om = OperatorMatrix.wrap(A)
    lams = np.array(sorted(float(x) for x in lambda_grid))
    if lams.size == 0 or lams[0] <= omega:
        raise ValueError("lambda grid must lie strictly right of omega")
    res_norms = np.array([
        1.0 / sigma_min(om, complex(lam, 0.0)) for lam in lams
    ])
    res_ok = res_norms <= (1.0 / (lams - omega)) * (1.0 + 1e-9)
    ts = np.array([0.25, 0.5, 1.0, 2.0, 4.0] if t_grid is None
                  else [float(t) for t in t_grid])
    sg_norms = np.array([semigroup_norm(om, t) for t in ts])
    sg_ok = sg_norms <= np.exp(omega * ts) * (1.0 + 1e-9)
    return HilleYosidaReport(
        omega=float(omega),
        lambdas=lams,
        resolvent_norms=res_norms,
        resolvent_ok=res_ok,
        t_grid=ts,
        semigroup_norms=sg_norms,
        semigroup_ok=sg_ok,
    )
