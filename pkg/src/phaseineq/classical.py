"""Classical pure-death process on {0, ..., K} and entropy-rate extremizers.

The process p_dot_n = -n p_n + (n+1) p_{n+1} is the number-basis diagonal
restriction of the photon-loss semigroup.  Includes the entropy rate
J_-(p) = -2 sum_n (C p)_n log p_n, the geometric family, the f/F threshold
machinery, and a projected-gradient oracle for the energy-constrained
minimum of J_-.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .fock_core import TruncationError
from .gaussian import g_entropy, g_inverse

_INTERIOR_FLOOR = 1e-12


@dataclass(frozen=True)
class ClassicalPMF:
    """Probability vector on {0, ..., K}."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("probs must be a vector of length >= 2")
        if np.any(p < -1e-12):
            raise ValueError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p = np.maximum(p, 0.0)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def K(self) -> int:
        return self.probs.size - 1

    def mean(self) -> float:
        return float(np.arange(self.probs.size) @ self.probs)

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p @ np.log(p)))


def death_generator(p: ClassicalPMF) -> np.ndarray:
    """(C p)_n = -n p_n + (n+1) p_{n+1}; the top level only loses mass,
    so the vector sums to -K p_K (zero when the edge is unpopulated)."""
    v = p.probs
    n = np.arange(v.size, dtype=float)
    out = -n * v
    out[:-1] += n[1:] * v[1:]
    return out


def death_evolve(p: ClassicalPMF, t: float, step: float = 1e-3) -> ClassicalPMF:
    """Fixed-step RK4 integration of p_dot = C p."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return p
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    # RK4 stability bound for the stiffest (top-level) decay rate.
    h = min(step, 2.5 / max(1.0, float(p.K)))
    nsteps = max(1, int(math.ceil(t / h)))
    h = t / nsteps

    def rate(v: np.ndarray) -> np.ndarray:
        n = np.arange(v.size, dtype=float)
        out = -n * v
        out[:-1] += n[1:] * v[1:]
        return out

    v = np.array(p.probs, dtype=float)
    for _ in range(nsteps):
        k1 = rate(v)
        k2 = rate(v + 0.5 * h * k1)
        k3 = rate(v + 0.5 * h * k2)
        k4 = rate(v + h * k3)
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if v.min() < -1e-10:
            raise RuntimeError(
                f"negativity {v.min():.3e} during death evolution; reduce step"
            )
    drift = abs(v.sum() - 1.0)
    if drift > 1e-10:
        raise RuntimeError(f"normalization drift {drift:.3e}; reduce step")
    return ClassicalPMF(np.maximum(v, 0.0) / v.sum())


def death_entropy_rate(p: ClassicalPMF) -> float:
    """J_-(p) = 2 dH/dt = -2 sum_n (C p)_n log p_n.

    Returns +inf when mass flows into an empty level (the entropy
    derivative genuinely diverges there).
    """
    flux = death_generator(p)
    v = p.probs
    total = 0.0
    for n in range(v.size):
        if flux[n] == 0.0:
            continue
        if v[n] <= 0.0:
            return math.inf if flux[n] > 0 else -math.inf
        total += flux[n] * math.log(v[n])
    return -2.0 * total


def geometric_pmf(n: float, K: int, tail_tol: float = 1e-9) -> ClassicalPMF:
    """Geometric distribution with mean n on {0, ..., K}, renormalized."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        v = np.zeros(K + 1)
        v[0] = 1.0
        return ClassicalPMF(v)
    r = n / (n + 1.0)
    tail = r ** (K + 1)
    if tail > tail_tol:
        min_k = math.ceil(math.log(tail_tol) / math.log(r))
        raise TruncationError(
            f"geometric tail mass {tail:.3e} exceeds {tail_tol:.1e}; "
            f"need K >= {min_k}",
            min_adequate_dim=min_k,
        )
    v = (1.0 - r) * r ** np.arange(K + 1)
    return ClassicalPMF(v / v.sum())


def f_of_H(s: float) -> float:
    """Minimal half-entropy-rate at fixed entropy: f(S) = -n log(1 + 1/n)
    with n = g_inverse(S)."""
    if s <= 0:
        raise ValueError(f"S must be > 0, got {s}")
    n = g_inverse(s)
    return -n * math.log(1.0 + 1.0 / n)


def F_of_S0(s0: float, mu2: float, zeta: float) -> float:
    """inf over n >= g_inverse(S0) of mu2 * (-n log(1 + 1/n)) + zeta * g(n)."""
    if s0 <= 0:
        raise ValueError(f"S0 must be > 0, got {s0}")
    if mu2 <= 0 or zeta <= 0:
        raise ValueError("mu2 and zeta must be positive")
    n_lo = g_inverse(s0)

    def phi(n: float) -> float:
        return mu2 * (-n * math.log(1.0 + 1.0 / n)) + zeta * g_entropy(n)

    # phi is eventually increasing; bracket the interior minimum against
    # the left endpoint.
    res = minimize_scalar(phi, bounds=(n_lo, max(10.0 * n_lo, n_lo + 50.0)),
                          method="bounded",
                          options={"xatol": 1e-10, "maxiter": 500})
    return min(phi(n_lo), float(res.fun))


def _project_capped_simplex(y: np.ndarray, floor: float) -> np.ndarray:
    """Euclidean projection onto {p : p >= floor, sum p = 1} (sort-based)."""
    z = y - floor
    budget = 1.0 - floor * y.size
    u = np.sort(z)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, u.size + 1)
    cond = u - (css - budget) / idx > 0
    k = int(np.nonzero(cond)[0][-1]) + 1
    tau = (css[k - 1] - budget) / k
    return np.maximum(z - tau, 0.0) + floor


def _project_constraints(y: np.ndarray, n_cap: float, floor: float) -> np.ndarray:
    """Projection onto {p >= floor, sum p = 1, E[N] <= n_cap}.

    If the plain floored-simplex projection violates the energy cap, the
    cap is active; a Lagrange multiplier beta on E[N] is then found by
    bisection (E[N] of the projection of y - beta*levels is decreasing
    in beta).
    """
    levels = np.arange(y.size, dtype=float)
    x = _project_capped_simplex(y, floor)
    if float(levels @ x) <= n_cap + 1e-12:
        return x

    def energy(beta: float) -> float:
        return float(levels @ _project_capped_simplex(y - beta * levels, floor))

    hi = 1.0
    while energy(hi) > n_cap and hi < 1e12:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if energy(mid) > n_cap:
            lo = mid
        else:
            hi = mid
    return _project_capped_simplex(y - hi * levels, floor)


def _rate_and_grad(v: np.ndarray) -> tuple[float, np.ndarray]:
    levels = np.arange(v.size, dtype=float)
    flux = -levels * v
    flux[:-1] += levels[1:] * v[1:]
    logv = np.log(v)
    rate = -2.0 * float(flux @ logv)
    # d/dp_n of -2 sum_m (Cp)_m log p_m:
    #   flux enters through C^T log p, plus the diagonal term (Cp)_n / p_n.
    ct_log = -levels * logv
    ct_log[1:] += levels[1:] * logv[:-1]
    grad = -2.0 * (ct_log + flux / v)
    return rate, grad


def min_entropy_rate_constrained(n: float, K: int, starts: int = 8,
                                 iters: int = 600, seed: int = 0,
                                 ) -> tuple[ClassicalPMF, float]:
    """Minimize J_-(p) over strictly positive p on {0,...,K} with E[N] <= n.

    Projected gradient with backtracking line search and multi-start
    (geometric(n) plus random interior points); returns the best iterate
    and its rate.  The minimum is expected at the geometric distribution
    with value -2 n log(1 + 1/n).
    """
    if n <= 0:
        raise ValueError(f"n must be > 0, got {n}")
    rng = np.random.default_rng(seed)
    floor = _INTERIOR_FLOOR
    inits = [geometric_pmf(n, K).probs]
    for _ in range(starts - 1):
        w = rng.dirichlet(np.ones(K + 1) * 0.8)
        inits.append(_project_constraints(w, n, floor))

    best_v, best_rate = None, math.inf
    for v0 in inits:
        v = _project_constraints(np.maximum(v0, floor), n, floor)
        rate, grad = _rate_and_grad(v)
        step = 0.1
        for _ in range(iters):
            trial = _project_constraints(v - step * grad, n, floor)
            new_rate, new_grad = _rate_and_grad(trial)
            if new_rate < rate - 1e-14:
                v, rate, grad = trial, new_rate, new_grad
                step = min(step * 1.5, 10.0)
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if rate < best_rate:
            best_rate, best_v = rate, v
    return ClassicalPMF(best_v / best_v.sum()), best_rate
