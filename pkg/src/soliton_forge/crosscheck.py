"""Closed-form curvature against the finite-difference oracle on product charts."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curvature import hessian_from_partials, radial_partials, ricci_from_partials, scalar_from_partials
from .oracle import DEFAULT_STEP, hessian_numeric, product_chart, ricci_numeric, scalar_numeric

ORACLE_TOL = 1e-5


@dataclass
class OracleComparison:
    ricci_max: float
    hessian_max: float
    scalar_max: float
    n_points: int
    tol: float
    seed: int
    experimental: bool = False

    @property
    def passed(self) -> bool:
        return max(self.ricci_max, self.hessian_max, self.scalar_max) < self.tol

    def to_dict(self):
        return {**self.__dict__, "pass": self.passed}


def sample_points(profile, sig, fiber, n_points, seed=0, r_range=(0.25, 4.0)):
    """Seeded base points with ``r`` log-uniform in ``r_range`` and fiber points near the origin."""
    rng = np.random.default_rng(seed)
    lo, hi = r_range
    if profile.domain[1] <= 0:
        lo, hi = -hi, -lo
    lo, hi = max(lo, profile.domain[0]), min(hi, profile.domain[1])
    sign = 1.0 if hi > 0 else -1.0
    a, b = sorted((abs(lo), abs(hi)))
    r = sign * np.exp(rng.uniform(np.log(a), np.log(b), size=n_points))

    eps = sig.array
    dirs = np.empty((n_points, sig.n))
    filled = 0
    while filled < n_points:
        cand = rng.normal(size=(4 * n_points, sig.n))
        q = cand**2 @ eps
        good = cand[np.sign(q) == sign]
        good = good / np.sqrt(np.abs(good**2 @ eps))[:, None]
        take = min(len(good), n_points - filled)
        dirs[filled:filled + take] = good[:take]
        filled += take
    x = dirs * np.sqrt(np.abs(r))[:, None]

    u = np.concatenate(
        [rng.uniform(-0.5, 0.5, size=(n_points, m)) * R for (_kind, m, R) in fiber.factors], axis=1
    ) if fiber.factors else np.zeros((n_points, fiber.m))
    return x, u


def oracle_compare(profile, sig, params, fiber, n_points=50, seed=0, tol=ORACLE_TOL,
                   step=DEFAULT_STEP, r_range=(0.25, 4.0), workers=1) -> OracleComparison:
    """Infinity-norm gaps between closed forms and the oracle on ``base x fiber``.

    Ricci is compared as a full ``(n+m)``-square matrix (base block, zero mixed
    block, ``lambda_F g_F`` fiber block); likewise the Hessian of ``h``, whose
    mixed and fiber blocks vanish.  Chunks of points may be spread over a
    thread pool; results are merged in point order.
    """
    n, m = sig.n, fiber.m
    x, u = sample_points(profile, sig, fiber, n_points, seed, r_range)
    chart = product_chart((profile, sig), fiber)
    pts = np.concatenate([x, u], axis=1)

    def h_of(p):
        return profile.h(sig.radius(p[..., :n]))

    def evaluate(chunk):
        ric_num = ricci_numeric(chart, pts[chunk], step)
        hess_num = hessian_numeric(chart, h_of, pts[chunk], step)
        scal_num = scalar_numeric(chart, pts[chunk], step, ricci=ric_num)
        return ric_num, hess_num, scal_num

    chunks = np.array_split(np.arange(n_points), max(1, workers))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(evaluate, chunks))
    else:
        parts = [evaluate(c) for c in chunks]
    ric_num = np.concatenate([p[0] for p in parts])
    hess_num = np.concatenate([p[1] for p in parts])
    scal_num = np.concatenate([p[2] for p in parts])

    P = radial_partials(profile, sig, x)
    d = n + m
    ric = np.zeros((n_points, d, d))
    ric[:, :n, :n] = ricci_from_partials(P, n)
    ric[:, n:, n:] = float(params.lambdaF) * fiber.chart.metric(u)
    hess = np.zeros((n_points, d, d))
    hess[:, :n, :n] = hessian_from_partials(P)
    K = scalar_from_partials(P, n) + float(params.lambdaF) * params.m

    return OracleComparison(
        ricci_max=float(np.max(np.abs(ric - ric_num))),
        hessian_max=float(np.max(np.abs(hess - hess_num))),
        scalar_max=float(np.max(np.abs(K - scal_num))),
        n_points=n_points,
        tol=tol,
        seed=seed,
        experimental=not sig.is_riemannian,
    )
