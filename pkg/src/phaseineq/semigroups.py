"""Heat, attenuator, amplifier and quantum Ornstein-Uhlenbeck semigroups.

Generators act on truncated Fock-space states; time evolution is fixed-step
RK4 with a stability-capped step.  Thermal (diagonal-geometric) inputs take
the closed-form photon-number maps unless the integrator is forced, which
keeps the two paths available for cross-validation.  The classical-quantum
convolution f *_t rho is evaluated by Gauss-Hermite quadrature for Gaussian
densities and exactly for finite atom mixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock_core import (
    DensityMatrix,
    TruncationError,
    IllConditionedError,
    ladder_operators,
    quadrature_operators,
    state_edge_mass,
    thermal_state,
    thermal_tail_mass,
    von_neumann_entropy,
    relative_entropy,
    weyl_operator,
)


@dataclass(frozen=True)
class Heat:
    """Quantum heat diffusion: L(rho) = -pi sum_j [R_j, [R_j, rho]]."""


@dataclass(frozen=True)
class Attenuator:
    """Photon loss: L(rho) = a rho a_dag - (1/2){a_dag a, rho}."""


@dataclass(frozen=True)
class Amplifier:
    """Photon gain: L(rho) = a_dag rho a - (1/2){a a_dag, rho}."""


@dataclass(frozen=True)
class QOU:
    """Ornstein-Uhlenbeck mixture mu^2 L_- + lam^2 L_+ with mu > lam > 0."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (self.mu > self.lam > 0):
            raise ValueError(f"QOU requires mu > lam > 0, got {self.mu}, {self.lam}")

    @property
    def nu(self) -> float:
        return self.lam**2 / self.mu**2

    @property
    def zeta(self) -> float:
        return self.mu**2 - self.lam**2

    @property
    def n_fixed(self) -> float:
        return self.lam**2 / self.zeta


SemigroupKind = Heat | Attenuator | Amplifier | QOU


@dataclass(frozen=True)
class SolverOptions:
    step: float = 1e-3
    method: str = "rk4_fixed"
    trace_tolerance: float = 1e-9
    edge_mass_tolerance: float = 1e-6
    force_integrator: bool = False

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.method != "rk4_fixed":
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class GaussianDensity:
    """Gaussian phase-space density with mean (2,) and SPD covariance (2,2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (2,) or cov.shape != (2, 2):
            raise ValueError("GaussianDensity needs a 2-vector mean and 2x2 cov")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise ValueError("covariance must be positive definite")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class AtomMixture:
    """Finite mixture of phase-space points with weights summing to 1."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        if pts.shape[1] != 2 or w.shape != (pts.shape[0],):
            raise ValueError("points must be (m, 2) and weights (m,)")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)


PhaseDensity = GaussianDensity | AtomMixture


def standard_gaussian() -> GaussianDensity:
    """The unit-variance centered density f_Z."""
    return GaussianDensity(mean=np.zeros(2), cov=np.eye(2))


class QuadratureError(RuntimeError):
    """Raised when the convolution quadrature fails to conserve trace."""


class StepSizeError(RuntimeError):
    """Raised when RK4 trace drift exceeds the configured tolerance."""


class _Generators:
    """Cached operator products for one truncation size."""

    def __init__(self, dim: int):
        self.a, self.a_dag, self.n_op = ladder_operators(dim)
        self.q, self.p = quadrature_operators(dim)
        self.q2 = self.q @ self.q
        self.p2 = self.p @ self.p
        self.ad_a = self.a_dag @ self.a
        self.a_ad = self.a @ self.a_dag


_GEN_CACHE: dict[int, _Generators] = {}


def _gens(dim: int) -> _Generators:
    g = _GEN_CACHE.get(dim)
    if g is None:
        g = _Generators(dim)
        _GEN_CACHE[dim] = g
    return g


def _attenuator_apply(g: _Generators, x: np.ndarray) -> np.ndarray:
    return g.a @ x @ g.a_dag - 0.5 * (g.ad_a @ x + x @ g.ad_a)


def _amplifier_apply(g: _Generators, x: np.ndarray) -> np.ndarray:
    return g.a_dag @ x @ g.a - 0.5 * (g.a_ad @ x + x @ g.a_ad)


def _heat_apply(g: _Generators, x: np.ndarray) -> np.ndarray:
    out = g.q2 @ x - 2.0 * (g.q @ x @ g.q) + x @ g.q2
    out += g.p2 @ x - 2.0 * (g.p @ x @ g.p) + x @ g.p2
    return -math.pi * out


def _apply_raw(kind: SemigroupKind, x: np.ndarray) -> np.ndarray:
    g = _gens(x.shape[0])
    if isinstance(kind, Heat):
        return _heat_apply(g, x)
    if isinstance(kind, Attenuator):
        return _attenuator_apply(g, x)
    if isinstance(kind, Amplifier):
        return _amplifier_apply(g, x)
    if isinstance(kind, QOU):
        return kind.mu**2 * _attenuator_apply(g, x) + kind.lam**2 * _amplifier_apply(g, x)
    raise TypeError(f"unknown semigroup kind {kind!r}")


def liouvillian_apply(kind: SemigroupKind, rho: DensityMatrix) -> np.ndarray:
    """L(rho) for the requested semigroup; Hermitian and traceless."""
    if rho.dim < 4:
        raise ValueError(f"dim must be >= 4, got {rho.dim}")
    out = _apply_raw(kind, rho.mat)
    return 0.5 * (out + out.conj().T)


def _rate_bound(kind: SemigroupKind, dim: int) -> float:
    # Gershgorin-style spectral-radius bound of the superoperator (decay
    # rates plus the comparable inflow couplings); caps the RK4 step.
    if isinstance(kind, Heat):
        return 8.0 * math.pi * (dim + 1.0)
    if isinstance(kind, Attenuator):
        return 4.0 * dim
    if isinstance(kind, Amplifier):
        return 4.0 * (dim + 1.0)
    return 4.0 * (kind.mu**2 * dim + kind.lam**2 * (dim + 1.0))


def _is_geometric_diagonal(mat: np.ndarray, tol: float = 1e-12) -> float | None:
    """Mean photon number if mat is a diagonal-geometric state, else None."""
    dim = mat.shape[0]
    off = mat - np.diag(np.diag(mat))
    if np.max(np.abs(off)) > tol:
        return None
    d = np.real(np.diag(mat))
    if np.any(d < -tol) or d[0] <= tol:
        return None
    if np.max(d[1:]) <= tol:  # vacuum
        return 0.0
    r = d[1] / d[0]
    if not 0 < r < 1:
        return None
    expected = d[0] * r ** np.arange(dim)
    if np.max(np.abs(d - expected)) > tol:
        return None
    return r / (1.0 - r)


def _thermal_photon_map(kind: SemigroupKind, n0: float, t: float) -> float:
    if isinstance(kind, Heat):
        return n0 + 2.0 * math.pi * t
    if isinstance(kind, Attenuator):
        return math.exp(-t) * n0
    if isinstance(kind, Amplifier):
        return math.exp(t) * (n0 + 1.0) - 1.0
    decay = math.exp(-kind.zeta * t)
    return decay * n0 + (1.0 - decay) * kind.n_fixed


def evolve(rho: DensityMatrix, kind: SemigroupKind, t: float,
           opts: SolverOptions = SolverOptions()) -> DensityMatrix:
    """e^{tL}(rho) by fixed-step RK4 (closed form for thermal inputs)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return rho
    dim = rho.dim
    if not opts.force_integrator:
        n0 = _is_geometric_diagonal(rho.mat)
        if n0 is not None:
            nt = _thermal_photon_map(kind, n0, t)
            if thermal_tail_mass(nt, dim) > opts.edge_mass_tolerance:
                raise TruncationError(
                    f"thermal fast path: n_t = {nt:.4g} does not fit dim {dim}"
                )
            return thermal_state(nt, dim, leakage_tol=opts.edge_mass_tolerance)
    h = min(opts.step, 2.0 / _rate_bound(kind, dim))
    nsteps = max(1, int(math.ceil(t / h)))
    h = t / nsteps
    x = np.array(rho.mat, dtype=complex)
    for _ in range(nsteps):
        k1 = _apply_raw(kind, x)
        k2 = _apply_raw(kind, x + 0.5 * h * k1)
        k3 = _apply_raw(kind, x + 0.5 * h * k2)
        k4 = _apply_raw(kind, x + h * k3)
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if state_edge_mass(x) > opts.edge_mass_tolerance:
            raise TruncationError(
                f"edge mass exceeded {opts.edge_mass_tolerance:.1e} during "
                f"evolution; increase dim"
            )
    drift = abs(np.trace(x).real - 1.0)
    if drift > opts.trace_tolerance:
        raise StepSizeError(
            f"trace drift {drift:.3e} exceeds {opts.trace_tolerance:.1e}; "
            f"reduce step below {h:.2e}"
        )
    x = 0.5 * (x + x.conj().T)
    x /= np.trace(x).real
    return DensityMatrix(x)


def convolve(f: PhaseDensity, rho: DensityMatrix, t: float,
             quad_order: int = 20) -> DensityMatrix:
    """Classical-quantum convolution f *_t rho.

    Gaussian densities use tensor Gauss-Hermite quadrature of order
    quad_order per axis; atom mixtures are exact weighted sums of
    displaced states.

    The Weyl matrix elements oscillate in the displacement at a rate that
    grows like sqrt(dim * t), so a fixed-order rule under-resolves large
    t * dim.  Gaussian convolutions compose exactly (means and covariances
    add), so the integral is split into sequential steps small enough for
    the rule, each at the same quad_order.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    dim = rho.dim
    st = math.sqrt(t)
    if isinstance(f, AtomMixture):
        out = np.zeros((dim, dim), dtype=complex)
        for pt, wgt in zip(f.points, f.weights):
            if wgt == 0.0:
                continue
            w = weyl_operator(st * pt, dim)
            out += wgt * (w @ rho.mat @ w.conj().T)
    elif isinstance(f, GaussianDensity):
        if quad_order < 8:
            raise ValueError(f"quad_order must be >= 8, got {quad_order}")
        nodes, weights = np.polynomial.hermite.hermgauss(quad_order)
        u = math.sqrt(2.0) * nodes
        wn = weights / math.sqrt(math.pi)
        lam_max = float(np.linalg.eigvalsh(f.cov)[-1])
        # Empirically, order-20 tensor quadrature resolves the integrand
        # up to dim * t * lam_max ~ 3; scale the split count to that.
        nsteps = max(1, math.ceil(dim * t * lam_max * (20.0 / quad_order) / 3.0))
        chol = np.linalg.cholesky(f.cov / nsteps)
        mean_step = f.mean / nsteps
        out = np.array(rho.mat, dtype=complex)
        for _ in range(nsteps):
            acc = np.zeros((dim, dim), dtype=complex)
            for i in range(quad_order):
                for j in range(quad_order):
                    xi = mean_step + chol @ np.array([u[i], u[j]])
                    w = weyl_operator(st * xi, dim)
                    acc += (wn[i] * wn[j]) * (w @ out @ w.conj().T)
            out = acc
    else:
        raise TypeError(f"unknown phase density {f!r}")
    out = 0.5 * (out + out.conj().T)
    trace = np.trace(out).real
    if abs(trace - 1.0) >= 1e-8:
        raise QuadratureError(
            f"convolution trace deviates by {abs(trace - 1.0):.3e}; increase "
            f"quad_order or dim"
        )
    edge = state_edge_mass(out)
    if edge > 1e-6:
        raise TruncationError(
            f"convolution pushed edge mass {edge:.3e} beyond 1e-06; "
            f"increase dim or reduce t"
        )
    return DensityMatrix(out / trace)


def _log_density(rho: DensityMatrix) -> np.ndarray:
    lam, vecs = np.linalg.eigh(rho.mat)
    # Exactly-zero eigenvalues make the entropy derivative diverge; tiny
    # positive ones (thermal tails) contribute finitely through the log,
    # and tiny negatives beneath roundoff are images of positive tails.
    if lam[0] == 0.0 or lam[0] <= -1e-12:
        raise IllConditionedError(
            f"entropy rate needs a full-rank state (min eigenvalue {lam[0]:.3e})"
        )
    return (vecs * np.log(np.clip(lam, 1e-300, None))) @ vecs.conj().T


def entropy_rate(rho: DensityMatrix, kind: SemigroupKind, h: float = 1e-4,
                 opts: SolverOptions = SolverOptions(),
                 method: str = "exact") -> float:
    """2 dS/dt at t = 0 under e^{tL}.

    The default evaluates the algebraic derivative -2 tr(L(rho) log rho),
    which is exact at t = 0.  method="fd" instead uses Richardson-
    extrapolated forward differences of step h over the integrated flow
    (for cross-validation; it cannot resolve the derivative when the
    spectrum reaches far below h's resolution scale).
    """
    if method == "exact":
        log_rho = _log_density(rho)
        lind = liouvillian_apply(kind, rho)
        return -2.0 * float(np.trace(lind @ log_rho).real)
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    if not 1e-5 <= h <= 1e-2:
        raise ValueError(f"h must lie in [1e-5, 1e-2], got {h}")
    _log_density(rho)  # full-rank precondition
    s0 = von_neumann_entropy(rho)
    rho_half = evolve(rho, kind, 0.5 * h, opts)
    rho_full = evolve(rho_half, kind, 0.5 * h, opts)
    d_half = (von_neumann_entropy(rho_half) - s0) / (0.5 * h)
    d_full = (von_neumann_entropy(rho_full) - s0) / h
    return 2.0 * (2.0 * d_half - d_full)


def relent_decay_rate(rho: DensityMatrix, mu: float, lam: float,
                      h: float = 1e-4,
                      opts: SolverOptions = SolverOptions()) -> tuple[float, float]:
    """(d/dt D(e^{tL}rho || sigma) at 0, assembled decay-identity RHS).

    The rate is the algebraic derivative tr(L(rho)(log rho - log sigma)).
    The second element is mu^2/2 J_- + lam^2/2 J_+ + zeta S + lam^2 log nu
    + zeta log(1 - nu), built from independent entropy-rate calls, which
    must equal -zeta D(rho||sigma) - dD/dt.
    """
    kind = QOU(mu, lam)
    sigma = thermal_state(kind.n_fixed, rho.dim)
    lind = liouvillian_apply(kind, rho)
    rate = float(np.trace(lind @ (_log_density(rho) - _log_density(sigma))).real)

    j_minus = entropy_rate(rho, Attenuator(), h, opts)
    j_plus = entropy_rate(rho, Amplifier(), h, opts)
    zeta, nu = kind.zeta, kind.nu
    rhs = (0.5 * mu**2 * j_minus + 0.5 * lam**2 * j_plus
           + zeta * von_neumann_entropy(rho)
           + lam**2 * math.log(nu) + zeta * math.log(1.0 - nu))
    return rate, rhs


def photon_trajectory(n0: float, mu: float, lam: float, t: float) -> float:
    """Mean photon number at time t under the qOU semigroup (closed form)."""
    kind = QOU(mu, lam)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    decay = math.exp(-kind.zeta * t)
    return decay * n0 + (1.0 - decay) * kind.n_fixed
