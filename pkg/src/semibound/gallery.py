"""Finite-difference test operators and synthetic nonnormal matrices.

All builders return the generator A = -P (spectrum in the left half
plane for the model operators), discretised with second-order centered
differences and Dirichlet ends on a truncated domain.  Identical inputs
give bit-identical matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .linalg import OperatorMatrix

__all__ = [
    "DiscretizationSpec",
    "build_complex_airy",
    "build_davies_oscillator",
    "build_kfp_quadratic",
    "build_jordan",
    "build_toeplitz",
    "build_random_nonnormal",
    "GALLERY_BUILDERS",
    "build_by_name",
]


@dataclass(frozen=True)
class DiscretizationSpec:
    """Uniform grid: n_points interior nodes over a domain of scale length."""

    n_points: int
    length: float
    scheme: str = "centered2"
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError(f"need n_points >= 16, got {self.n_points}")
        if not self.length > 0.0:
            raise ValueError(f"need length > 0, got {self.length}")
        if self.scheme != "centered2" or self.boundary != "dirichlet":
            raise ValueError("only centered second-order Dirichlet is supported")


def _second_difference(n: int, h: float) -> np.ndarray:
    """-d^2/dx^2 on interior nodes with Dirichlet ends."""
    D2 = (np.diag(np.full(n, 2.0)) - np.diag(np.ones(n - 1), 1)
          - np.diag(np.ones(n - 1), -1))
    return D2 / h**2


def _centered_difference(n: int, h: float) -> np.ndarray:
    """d/dx on interior nodes with Dirichlet ends (skew-symmetric)."""
    C = np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1)
    return C / (2.0 * h)


def build_complex_airy(spec: DiscretizationSpec | None = None) -> OperatorMatrix:
    """A = -(D_x^2 + i x) on (0, L) with Dirichlet ends, D_x^2 = -d^2/dx^2.

    Leading eigenvalues sit on the e^{i pi/3} ray at distances given by
    the negated zeros of the Airy function.
    """
    spec = spec or DiscretizationSpec(n_points=400, length=20.0)
    n, L = spec.n_points, spec.length
    h = L / (n + 1)
    x = h * np.arange(1, n + 1)
    P = _second_difference(n, h).astype(complex) + 1j * np.diag(x)
    return OperatorMatrix(-P, label=f"airy(n={n},L={L:g})")


def build_davies_oscillator(spec: DiscretizationSpec | None = None) -> OperatorMatrix:
    """A = -(D_x^2 + i x^2) on (-L, L), Dirichlet; spectrum on the
    e^{i pi/4} ray at odd integers."""
    spec = spec or DiscretizationSpec(n_points=600, length=12.0)
    n, L = spec.n_points, spec.length
    h = 2.0 * L / (n + 1)
    x = -L + h * np.arange(1, n + 1)
    P = _second_difference(n, h).astype(complex) + 1j * np.diag(x**2)
    return OperatorMatrix(-P, label=f"davies(n={n},L={L:g})")


def build_kfp_quadratic(gamma: float = 1.0,
                        spec2d: DiscretizationSpec | None = None) -> OperatorMatrix:
    """Kinetic transport plus velocity friction with quadratic potential.

    A = -P with P = y d_x - x d_y + (gamma/2)(y - d_y)(y + d_y) on a
    tensor Dirichlet grid over (-L, L)^2.  The transport discretises to an
    exactly skew matrix and the friction factor to an exactly PSD product,
    so Re <Pu, u> >= 0 holds for every discrete u.
    """
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    spec2d = spec2d or DiscretizationSpec(n_points=40, length=6.0)
    n, L = spec2d.n_points, spec2d.length
    h = 2.0 * L / (n + 1)
    g = -L + h * np.arange(1, n + 1)
    C = _centered_difference(n, h)
    X = np.diag(g)
    eye = np.eye(n)
    transport = np.kron(C, X) - np.kron(X, C)  # y d_x - x d_y
    creator = X + C  # (y + d_y); its transpose is (y - d_y)
    friction = np.kron(eye, creator.T @ creator)
    P = transport + 0.5 * gamma * friction
    return OperatorMatrix(-P, label=f"kfp(gamma={gamma:g},n={n},L={L:g})")


def build_jordan(n: int, lam: complex) -> OperatorMatrix:
    """Jordan block: lam on the diagonal, ones on the superdiagonal."""
    if n < 1:
        raise ValueError("need n >= 1")
    A = np.diag(np.full(n, complex(lam))) + np.diag(np.ones(n - 1, dtype=complex), 1)
    return OperatorMatrix(A, label=f"jordan(n={n},lambda={lam})")


def build_toeplitz(first_col, first_row, n: int) -> OperatorMatrix:
    """Toeplitz matrix from leading column/row stubs, zero-padded to size n."""
    col = np.zeros(n, dtype=complex)
    row = np.zeros(n, dtype=complex)
    fc = np.asarray(first_col, dtype=complex).ravel()
    fr = np.asarray(first_row, dtype=complex).ravel()
    if fc.size == 0 or fc.size > n or fr.size > n:
        raise ValueError("column/row stubs must be nonempty and fit in n")
    if fr.size and fr[0] != fc[0]:
        raise ValueError("first_col[0] and first_row[0] must agree")
    col[:fc.size] = fc
    row[:fr.size] = fr if fr.size else fc[:1]
    row[0] = col[0]
    return OperatorMatrix(sla.toeplitz(col, row), label=f"toeplitz(n={n})")


def build_random_nonnormal(n: int, seed: int, departure: float) -> OperatorMatrix:
    """Unitarily disguised Schur form D + departure * N.

    D has eigenvalues with Re in [-2, -0.5]; N is strictly upper
    triangular with unit spectral norm, so ``departure`` directly scales
    the departure from normality.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if departure < 0.0:
        raise ValueError("departure must be >= 0")
    rng = np.random.default_rng(seed)
    re = rng.uniform(-2.0, -0.5, size=n)
    im = rng.uniform(-1.0, 1.0, size=n)
    D = np.diag(re + 1j * im)
    N = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1)
    norm_n = np.linalg.norm(N, 2)
    if norm_n > 0.0:
        N /= norm_n
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    A = Q @ (D + departure * N) @ Q.conj().T
    return OperatorMatrix(A, label=f"random(n={n},seed={seed},departure={departure:g})")


def _airy_from_params(params: dict) -> OperatorMatrix:
    return build_complex_airy(DiscretizationSpec(
        n_points=int(params.get("n_points", 400)),
        length=float(params.get("length", 20.0))))


def _davies_from_params(params: dict) -> OperatorMatrix:
    return build_davies_oscillator(DiscretizationSpec(
        n_points=int(params.get("n_points", 600)),
        length=float(params.get("length", 12.0))))


def _kfp_from_params(params: dict) -> OperatorMatrix:
    return build_kfp_quadratic(
        gamma=float(params.get("gamma", 1.0)),
        spec2d=DiscretizationSpec(
            n_points=int(params.get("n_points", 40)),
            length=float(params.get("length", 6.0))))


def _jordan_from_params(params: dict) -> OperatorMatrix:
    lam = params.get("eigenvalue", -1.0)
    if isinstance(lam, (list, tuple)):
        lam = complex(lam[0], lam[1])
    return build_jordan(int(params.get("n", 2)), complex(lam))


def _toeplitz_from_params(params: dict) -> OperatorMatrix:
    def as_complex_list(values):
        return [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
                for v in values]
    return build_toeplitz(
        as_complex_list(params["first_col"]),
        as_complex_list(params.get("first_row", params["first_col"][:1])),
        int(params["n"]))


def _random_from_params(params: dict) -> OperatorMatrix:
    return build_random_nonnormal(
        n=int(params.get("n", 8)),
        seed=int(params.get("seed", 0)),
        departure=float(params.get("departure", 1.0)))


GALLERY_BUILDERS = {
    "airy": _airy_from_params,
    "davies": _davies_from_params,
    "kfp": _kfp_from_params,
    "jordan": _jordan_from_params,
    "toeplitz": _toeplitz_from_params,
    "random": _random_from_params,
}


def build_by_name(name: str, params: dict | None = None) -> OperatorMatrix:
    """Gallery lookup used by the CLI; raises ValueError on unknown names."""
    try:
        builder = GALLERY_BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown gallery operator {name!r}; choose from "
            f"{sorted(GALLERY_BUILDERS)}"
        ) from None
    return builder(params or {})
