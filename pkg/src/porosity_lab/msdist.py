"""The Macias-Segovia quasi-distance of a finite quasi-metric space.

For a ratio ``a`` in (0, 1/(2K)) a pair (x, y) is r-linked at depth n when a
chain x = w_0, ..., w_{2n+1} = y exists whose steps obey the strict bounds
a^n r, ..., a r, r, a r, ..., a^n r.  delta(x, y) is the infimum of r over
all linked depths.

Because every bound is strict, the infimum over chains is a bottleneck
(minimax) path value, so delta is computed exactly by layered min-max
products: L_0 is 0 on the diagonal and +inf elsewhere,
``L_n = (D / a^n) (x) L_{n-1}`` and ``delta_n = L_n (x) D (x) L_n^T`` where
``(x)`` is the min-max product.  delta = min_n delta_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import DepthCapTooSmall, NonPositiveRadius, ParamOutOfRange
from .qspace import AugmentedSpace, validate_quasi_metric


@dataclass(frozen=True)
class MSParams:
    a: float
    n_max: int

    def check(self, K: float):
        if not (0 < self.a and self.a * 2.0 * K < 1.0):
            raise ParamOutOfRange(f"need 0 < a < 1/(2K) = {1 / (2 * K)!r}, got a={self.a!r}")
        if self.n_max < 1:
            raise ParamOutOfRange(f"n_max must be >= 1, got {self.n_max}")


@dataclass(frozen=True)
class MSDistanceResult:
    delta: np.ndarray
    beta: float
    K_delta_bound: float
    a: float
    n_max: int
    K_d: float


def default_params(space: AugmentedSpace, a: float | None = None) -> MSParams:
    """a = 1/(4K) unless given; depth cap from the smallest positive distance."""
    K = space.K
    if a is None:
        a = 1.0 / (4.0 * K)
    D = space.dist
    pos = D[D > 0]
    diam = float(pos.max())
    min_pos = float(pos.min())
    n_max = math.ceil(math.log(min_pos / (2.0 * diam)) / math.log(a))
    return MSParams(a=float(a), n_max=max(1, n_max))


def hole_shrink_exponent(a: float, K: float) -> int:
    """The integer p with a**p < 2K <= a**(p-1)."""
    two_k = 2.0 * K
    p = math.floor(math.log(two_k) / math.log(a)) + 1
    while a**p >= two_k:
        p += 1
    while a ** (p - 1) < two_k:
        p -= 1
    return p


def hole_shrink_beta(a: float, K: float) -> float:
    """beta = a^(3-p) / (3 K^4) with p from :func:`hole_shrink_exponent`."""
    return a ** (3 - hole_shrink_exponent(a, K)) / (3.0 * K**4)


def _initial_layer(N):
    L = np.full((N, N), np.inf)
    np.fill_diagonal(L, 0.0)
    return L


def ms_distance(space: AugmentedSpace, params: MSParams | None = None) -> MSDistanceResult:
    """Exact delta table over sample and obstacle points."""
    K = space.K
    if params is None:
        params = default_params(space)
    params.check(K)
    D = np.ascontiguousarray(space.dist)
    N = D.shape[0]
    bound = float(D.max())
    delta = D.copy()
    L = _initial_layer(N)
    for n in range(1, params.n_max + 2):
        L = kern.minmax_product(np.ascontiguousarray(D / params.a**n), L, bound)
        T = kern.minmax_product(L, D, bound)
        dn = kern.minmax_product(T, np.ascontiguousarray(L.T), bound)
        if n <= params.n_max:
            np.minimum(delta, dn, out=delta)
        elif np.any(dn < delta):
            raise DepthCapTooSmall(f"depth {n} still shortens delta; raise n_max above {params.n_max}")
    np.fill_diagonal(delta, 0.0)
    return MSDistanceResult(
        delta=delta,
        beta=hole_shrink_beta(params.a, K),
        K_delta_bound=3.0 * K**3,
        a=params.a,
        n_max=params.n_max,
        K_d=K,
    )


def ms_membership(space: AugmentedSpace, params: MSParams, r: float, x: int, y: int) -> bool:
    """Is (x, y) linked at radius r at some depth <= n_max?  x, y are point ids.

    Layered breadth-first reachability, one layer per step bound.
    """
    if not r > 0:
        raise NonPositiveRadius(f"radius must be positive, got {r}")
    D = space.dist
    i = space.index_of(x)
    j = space.index_of(y)
    if i == j:
        return True
    for n in range(params.n_max + 1):
        reach = np.zeros(D.shape[0], dtype=bool)
        reach[i] = True
        for p in list(range(n, 0, -1)) + [0] + list(range(1, n + 1)):
            step = D / params.a**p < r if p else D < r
            reach = reach | step[reach].any(axis=0)
        if reach[j]:
            return True
    return False


def delta_space(space: AugmentedSpace, result: MSDistanceResult) -> AugmentedSpace:
    """The same points and measure under the delta table."""
    return space.with_table(result.delta)


def sandwich_holds(space: AugmentedSpace, result: MSDistanceResult) -> bool:
    D = space.dist
    dl = result.delta
    return bool(np.all(dl <= D) and np.all(D <= 3.0 * result.K_d**2 * dl))


def k_bound_holds(result: MSDistanceResult, slack: float = 1e-9) -> bool:
    return validate_quasi_metric(result.delta) <= result.K_delta_bound + slack
