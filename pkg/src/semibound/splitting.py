"""Riesz spectral projections and the semigroup splitting they induce.

The projector onto the spectral subspace of the eigenvalues inside a
contour is the contour integral (1/2 pi i) oint (z - A)^{-1} dz,
approximated by the trapezoidal rule (spectrally accurate on circles).
Splitting exp(tA) = exp(tA) Pi_+ + R(t) isolates a slowly decaying
finite-rank leading part from a remainder R(t) controlled by resolvent
data on a vertical line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .bounds import TabulatedWeight, WeightSpec, weight_norm
from .errors import HypothesisError, NumericsError
from .linalg import OperatorMatrix, semigroup_norm
from .resolvent import CertifiedInterval, r_on_line

__all__ = [
    "CircleContour",
    "RectangleContour",
    "SpectralSplit",
    "riesz_projection",
    "auto_contour",
    "split_bound",
    "SplitReport",
    "sampled_remainder_majorant",
]

_IDEMPOTENCY_RTOL = 1e-8
_COMMUTATION_RTOL = 1e-8
_TRACE_TOL = 1e-6


@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def nodes_weights(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes z_k and weights dz_k/(2 pi i) for oint f dz."""
        theta = 2.0 * np.pi * np.arange(n) / n
        ring = np.exp(1j * theta)
        z = self.center + self.radius * ring
        w = self.radius * ring / n  # i R e^{i theta} dtheta / (2 pi i)
        return z, w

    def distance(self, points: np.ndarray) -> np.ndarray:
        return np.abs(np.abs(points - self.center) - self.radius)

    def encloses(self, points: np.ndarray) -> np.ndarray:
        return np.abs(points - self.center) < self.radius


@dataclass(frozen=True)
class RectangleContour:
    """Axis-aligned rectangle, counterclockwise.

    Unlike the circle (where the periodic trapezoid rule is spectrally
    accurate) the edges use composite Gauss-Legendre panels, which keeps
    the corner kinks out of the quadrature.
    """

    corner_lo: complex  # bottom-left
    corner_hi: complex  # top-right

    def __post_init__(self):
        if not (self.corner_hi.real > self.corner_lo.real
                and self.corner_hi.imag > self.corner_lo.imag):
            raise ValueError("rectangle corners must be ordered (lo < hi)")

    def _corners(self) -> list[complex]:
        a, b = self.corner_lo, self.corner_hi
        return [a, complex(b.real, a.imag), b, complex(a.real, b.imag)]

    def nodes_weights(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        corners = self._corners()
        lengths = [abs(corners[(k + 1) % 4] - corners[k]) for k in range(4)]
        total = sum(lengths)
        deg = 12
        zs, ws = [], []
        for k in range(4):
            start, stop = corners[k], corners[(k + 1) % 4]
            m = max(deg, int(round(n * lengths[k] / total)))
            panels = max(1, m // deg)
            xg, wg = np.polynomial.legendre.leggauss(deg)
            edges = np.linspace(0.0, 1.0, panels + 1)
            tt = np.concatenate([
                0.5 * (a + b) + 0.5 * (b - a) * xg
                for a, b in zip(edges[:-1], edges[1:])
            ])
            wt = np.concatenate([
                0.5 * (b - a) * wg for a, b in zip(edges[:-1], edges[1:])
            ])
            zs.append(start + (stop - start) * tt)
            ws.append(wt * (stop - start) / (2j * np.pi))
        return np.concatenate(zs), np.concatenate(ws)

    def distance(self, points: np.ndarray) -> np.ndarray:
        x, y = points.real, points.imag
        x0, y0 = self.corner_lo.real, self.corner_lo.imag
        x1, y1 = self.corner_hi.real, self.corner_hi.imag
        dx = np.maximum.reduce([x0 - x, x - x1, np.zeros_like(x)])
        dy = np.maximum.reduce([y0 - y, y - y1, np.zeros_like(y)])
        outside = np.hypot(dx, dy)
        inside = np.minimum.reduce([x - x0, x1 - x, y - y0, y1 - y])
        return np.where(outside > 0.0, outside, np.abs(inside))

    def encloses(self, points: np.ndarray) -> np.ndarray:
        x, y = points.real, points.imag
        return ((self.corner_lo.real < x) & (x < self.corner_hi.real)
                & (self.corner_lo.imag < y) & (y < self.corner_hi.imag))


Contour = CircleContour | RectangleContour


@dataclass(frozen=True)
class SpectralSplit:
    """Projector Pi_+ with its complement norm and enclosed eigenvalues."""

    projector: OperatorMatrix
    complement_norm: float
    sigma_plus: np.ndarray
    contour: Contour
    nodes: int

    @property
    def rank(self) -> int:
        return len(self.sigma_plus)


def _pairwise_accumulate(term_iter, count: int) -> np.ndarray:
    """Deterministic pairwise summation with O(log count) live partials."""
    partials: dict[int, np.ndarray] = {}
    for _ in range(count):
        cur = next(term_iter)
        level = 0
        while level in partials:
            cur = partials.pop(level) + cur
            level += 1
        partials[level] = cur
    total = None
    for level in sorted(partials):
        total = partials[level] if total is None else total + partials[level]
    return total


def riesz_projection(A, contour: Contour, nodes: int = 256) -> SpectralSplit:
    """Projector (1/2 pi i) oint (z-A)^{-1} dz via trapezoidal quadrature.

    The contour must stay clear of the spectrum; the computed projector is
    validated (idempotency, commutation with A, near-integer trace equal
    to the enclosed eigenvalue count) before being returned.

    Raises
    ------
    HypothesisError
        Contour touching the spectrum, or enclosing nothing cleanly.
    NumericsError
        Validation failure (suggests more quadrature nodes).
    """
    om = OperatorMatrix.wrap(A)
    if nodes < 8:
        raise ValueError("need at least 8 quadrature nodes")
    lam = om.eigenvalues
    min_dist = float(np.min(contour.distance(lam)))
    if min_dist <= 1e-6 * (1.0 + om.norm2):
        raise HypothesisError(
            f"contour passes within {min_dist:.3e} of the spectrum"
        )
    inside = contour.encloses(lam)
    sigma_plus = lam[inside]

    z, w = contour.nodes_weights(nodes)
    n = om.dim
    idx = np.arange(n)

    def terms():
        for zk, wk in zip(z, w):
            Z = -om.matrix.copy()
            Z[idx, idx] += zk
            yield wk * np.linalg.inv(Z)

    proj = _pairwise_accumulate(terms(), len(z))

    # validation against the exact projector identities
    norm_p = float(np.linalg.norm(proj, 2))
    idem = float(np.linalg.norm(proj @ proj - proj, 2))
    if idem > _IDEMPOTENCY_RTOL * (1.0 + norm_p**2):
        raise NumericsError(
            f"projector fails idempotency ({idem:.3e}); increase nodes"
        )
    comm = float(np.linalg.norm(om.matrix @ proj - proj @ om.matrix, 2))
    if comm > _COMMUTATION_RTOL * om.norm2 * (1.0 + norm_p):
        raise NumericsError(
            f"projector fails to commute with A ({comm:.3e}); increase nodes"
        )
    tr = complex(np.trace(proj))
    if abs(tr - round(tr.real)) > _TRACE_TOL or abs(tr.imag) > _TRACE_TOL:
        raise NumericsError(
            f"projector trace {tr} is not near an integer; increase nodes"
        )
    if round(tr.real) != len(sigma_plus):
        raise NumericsError(
            f"projector trace {tr.real:.6f} does not match the "
            f"{len(sigma_plus)} enclosed eigenvalues"
        )
    complement = float(np.linalg.norm(np.eye(n) - proj, 2))
    return SpectralSplit(
        projector=OperatorMatrix(proj, label="riesz_projector"),
        complement_norm=complement,
        sigma_plus=sigma_plus,
        contour=contour,
        nodes=nodes,
    )


def auto_contour(A, omega_tilde: float, margin: float = 1.25) -> CircleContour:
    """Circle around the eigenvalues with Re > omega_tilde.

    Centered at their centroid with radius ``margin`` times the farthest
    enclosed eigenvalue, then verified disjoint from the rest of the
    spectrum.

    Raises
    ------
    HypothesisError
        Eigenvalue on (or numerically near) the line, nothing to enclose,
        or no separating circle of this shape.
    """
    om = OperatorMatrix.wrap(A)
    lam = om.eigenvalues
    gap_tol = 1e-9 * (1.0 + om.norm2)
    if float(np.min(np.abs(lam.real - omega_tilde))) < gap_tol:
        raise HypothesisError(
            f"eigenvalue on the splitting line Re z = {omega_tilde}"
        )
    right = lam[lam.real > omega_tilde]
    if right.size == 0:
        raise HypothesisError(
            f"no spectrum right of Re z = {omega_tilde}; nothing to project"
        )
    left = lam[lam.real <= omega_tilde]
    center = complex(np.mean(right))
    spread = float(np.max(np.abs(right - center)))
    if spread > 0.0:
        radius = margin * spread
    elif left.size:
        radius = 0.5 * float(np.min(np.abs(left - center)))
    else:
        radius = 1.0
    contour = CircleContour(center=center, radius=radius)
    # all selected eigenvalues strictly inside, all others strictly outside
    if not bool(np.all(contour.encloses(right))):
        raise HypothesisError("separating circle failed to enclose sigma_+")
    if left.size and bool(np.any(np.abs(left - center) <= radius + gap_tol)):
        raise HypothesisError(
            "no separating circle: excluded spectrum intersects the disc"
        )
    if float(np.min(contour.distance(lam))) <= 1e-6 * (1.0 + om.norm2):
        raise HypothesisError("separating circle passes too close to the spectrum")
    return contour


@dataclass(frozen=True)
class SplitReport:
    """Remainder truth/bound pairs for exp(tA) = exp(tA) Pi_+ + R(t)."""

    omega_tilde: float
    r_line: CertifiedInterval
    split: SpectralSplit
    t_grid: np.ndarray
    remainder_true: np.ndarray
    remainder_bound: np.ndarray
    leading_norm: np.ndarray

    def to_csv(self) -> str:
        lines = [
            f"# omega_tilde={self.omega_tilde}",
            f"# r_line_lo={self.r_line.r_lo:.17g}",
            f"# complement_norm={self.split.complement_norm:.17g}",
            "t,R_true,R_bound,leading_term_norm",
        ]
        for k, t in enumerate(self.t_grid):
            lines.append(
                f"{t:.17g},{self.remainder_true[k]:.17g},"
                f"{self.remainder_bound[k]:.17g},{self.leading_norm[k]:.17g}"
            )
        return "\n".join(lines) + "\n"


def split_bound(A, omega_tilde: float, m: WeightSpec, t: float, a: float,
                *, split: SpectralSplit | None = None,
                r_line: CertifiedInterval | None = None,
                rel_width: float = 1e-3) -> tuple[float, float]:
    """True remainder norm ||exp(tA)(I - Pi_+)|| and its certified bound.

    The bound is e^{omega_tilde t} ||I - Pi_+|| divided by r(omega_tilde)
    (line supremum) and the two weighted norms of 1/m over the split
    t = a + (t - a).  Any majorant of ||exp(tA)|| works for m: the
    restriction of the semigroup to range(I - Pi_+) has norm at most
    ||exp(tA)||.  Precomputed ``split``/``r_line`` may be passed to avoid
    recomputation across a time grid.
    """
    om = OperatorMatrix.wrap(A)
    if split is None:
        split = riesz_projection(om, auto_contour(om, omega_tilde))
    if r_line is None:
        r_line = r_on_line(om, omega_tilde, rel_width)
    if not (0.0 < a < t):
        raise ValueError(f"split must satisfy 0 < a < t, got a={a}, t={t}")
    E = sla.expm(t * om.matrix)
    if not np.all(np.isfinite(E.view(float))):
        raise NumericsError(f"exp(tA) overflowed at t={t}")
    pc = np.eye(om.dim) - split.projector.matrix
    true_norm = float(np.linalg.norm(E @ pc, 2))
    denom = (r_line.r_lo * weight_norm(m, omega_tilde, a)
             * weight_norm(m, omega_tilde, t - a))
    bound = math.exp(omega_tilde * t) / denom * split.complement_norm
    return true_norm, bound


def split_report(A, omega_tilde: float, m: WeightSpec, t_grid: Sequence[float],
                 *, nodes: int = 256, rel_width: float = 1e-3,
                 split: SpectralSplit | None = None,
                 r_line: CertifiedInterval | None = None) -> SplitReport:
    """Evaluate the splitting over a time grid with a = t/2 at each t.

    The projector and the line sweep are computed once and shared across
    the grid.
    """
    om = OperatorMatrix.wrap(A)
    ts = np.asarray([float(t) for t in t_grid])
    if ts.size == 0 or np.any(ts <= 0.0) or np.any(np.diff(ts) <= 0.0):
        raise ValueError("t_grid must be positive and strictly ascending")
    if split is None:
        split = riesz_projection(om, auto_contour(om, omega_tilde), nodes=nodes)
    if r_line is None:
        r_line = r_on_line(om, omega_tilde, rel_width)
    pc = np.eye(om.dim) - split.projector.matrix
    truth = np.empty_like(ts)
    bound = np.empty_like(ts)
    leading = np.empty_like(ts)
    for k, t in enumerate(ts):
        E = sla.expm(t * om.matrix)
        if not np.all(np.isfinite(E.view(float))):
            raise NumericsError(f"exp(tA) overflowed at t={t}")
        truth[k] = float(np.linalg.norm(E @ pc, 2))
        leading[k] = float(np.linalg.norm(E @ split.projector.matrix, 2))
        a = t / 2.0
        denom = (r_line.r_lo * weight_norm(m, omega_tilde, a)
                 * weight_norm(m, omega_tilde, t - a))
        bound[k] = math.exp(omega_tilde * t) / denom * split.complement_norm
    return SplitReport(
        omega_tilde=float(omega_tilde),
        r_line=r_line,
        split=split,
        t_grid=ts,
        remainder_true=truth,
        remainder_bound=bound,
        leading_norm=leading,
    )


def sampled_remainder_majorant(A, split: SpectralSplit, grid: Sequence[float],
                               safety: float = 1.0 + 1e-9) -> TabulatedWeight:
    """Tabulate ||exp(tA)(I - Pi_+)|| on a grid as a majorant for the
    restricted semigroup, for callers that prefer it over the full-space m."""
    om = OperatorMatrix.wrap(A)
    ts = np.asarray([float(t) for t in grid])
    if ts[0] != 0.0 or np.any(np.diff(ts) <= 0.0):
        raise ValueError("grid must be ascending and start at 0")
    pc = np.eye(om.dim) - split.projector.matrix
    vals = np.array([
        float(np.linalg.norm(sla.expm(t * om.matrix) @ pc, 2)) * safety
        for t in ts
    ])
    # hold each cell at its running maximum so interpolation stays above
    # the sampled curve on decreasing stretches
    vals = np.maximum(vals, np.append(vals[1:], vals[-1]))
    return TabulatedWeight(grid=ts, values=vals, horizon=float(ts[-1]) * (1 + 1e-12))
