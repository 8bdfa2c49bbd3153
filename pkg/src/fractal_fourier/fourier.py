"""Fourier transforms of self-similar measures, with certified error bounds.

Three evaluation schemes, all driven by the stopping-time cylinder
structure of the measure:

* ``exact_recursion`` (mu_hat): expand the one-step functional equation

      mu_hat(xi) = sum_i p_i e^{-2 pi i <xi, t_i>} mu_hat(r_i O_i^T xi)

  along the stopping tree until every leaf frequency eta satisfies
  2 pi |eta| R <= tol (R the support-ball radius), then close each leaf
  with e^{-2 pi i <eta, b>}.  The leaf error is at most 2 pi |eta| R per
  unit weight, so the summed bound is certified.

* ``order0`` quadrature for images mu_f: the weighted exponential sum
  sum_w p_w e^{-2 pi i <xi, f(x_w)>} over cylinder anchors, with error
  2 pi |xi| L_f r_w R per cylinder (L_f a Lipschitz bound of f on the
  support ball).

* ``order1`` quadrature: each cylinder is linearised at its anchor and
  the linear phase integrated exactly through mu_hat at the rotated,
  rescaled frequency r_w O_w^T (J_f(x_w)^T xi); the per-cylinder Taylor
  error is pi |xi| H_f (r_w R)^2.

Error bounds are upper bounds on |value - true transform| whenever the
supplied Lipschitz/Hessian bounds are valid on the support ball; maps
with merely estimated bounds mark their samples as uncertified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadConfig,
    FractalFourierError,
    MissingHessianBound,
    ResourceExceeded,
    Unsupported,
)
from .ifs import (
    DEFAULT_LEAF_BUDGET,
    SelfSimilarIFS,
    _enumerate_stopping,
    _homogeneous_depth,
    _homogeneous_leaf_arrays,
    chaos_game,
)

TWO_PI = 2.0 * math.pi


def _roundoff(n_terms: int) -> float:
    """Pessimistic pairwise-summation roundoff allowance for n unit terms."""
    return 1e-15 * (1.0 + math.log2(n_terms + 1.0))


def _cis(theta):
    """exp(-i theta), vectorised."""
    return np.cos(theta) - 1j * np.sin(theta)


class _Kahan:
    """Compensated accumulator for complex scalars."""

    __slots__ = ("re", "im", "cre", "cim")

    def __init__(self):
        self.re = self.im = self.cre = self.cim = 0.0

    def add(self, z: complex):
        for attr, carry, val in (("re", "cre", z.real), ("im", "cim", z.imag)):
            v = val + getattr(self, carry)
            s = getattr(self, attr)
            t = s + v
            setattr(self, carry, v - (t - s))
            setattr(self, attr, t)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


def compensated_sum(values: np.ndarray, chunk: int = 1 << 15) -> complex:
    """Kahan-combined chunkwise pairwise sum of a complex array."""
    acc = _Kahan()
    for start in range(0, values.size, chunk):
        acc.add(complex(np.sum(values[start : start + chunk])))
    return acc.value


@dataclass(frozen=True)
class FrequencySample:
    """One evaluated frequency: value, certified error bound, provenance."""

    xi: np.ndarray
    value: complex
    error_bound: float
    scheme: str
    leaves_used: int
    certified: bool = True

    def __post_init__(self):
        if abs(self.value) > 1.0 + self.error_bound + 1e-12:
            raise FractalFourierError(
                f"probability bound violated: |value|={abs(self.value)} "
                f"exceeds 1 + error_bound={self.error_bound}"
            )


def _freq_vector(xi, k: int) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(xi, dtype=float))
    if vec.shape != (k,):
        raise BadConfig(f"frequency must have {k} components, got shape {vec.shape}")
    return vec


# ---------------------------------------------------------------------------
# mu_hat: the transform of the measure itself
# ---------------------------------------------------------------------------


def mu_hat(
    ifs: SelfSimilarIFS,
    xi,
    tol: float = 1e-9,
    budget: Optional[int] = None,
) -> FrequencySample:
    """Evaluate mu_hat(xi) by the self-similarity recursion.

    The returned ``error_bound`` adds the leaf closure bound
    2 pi |eta| R per unit weight and a roundoff allowance; it certifies
    |value - mu_hat(xi)| <= error_bound.
    """
    if tol <= 0.0:
        raise BadConfig("tol must be positive")
    budget = DEFAULT_LEAF_BUDGET if budget is None else budget
    k = ifs.ambient_dim
    vec = _freq_vector(xi, k)
    radius = ifs.support_radius
    b = ifs.barycenter
    if ifs.is_homogeneous:
        value, err, depth = _mu_hat_homog_single(ifs, vec, tol)
        return FrequencySample(
            xi=vec,
            value=value,
            error_bound=err,
            scheme="exact_recursion",
            leaves_used=ifs.n_maps**depth,
        )
    # General path: depth-first expansion carrying (eta, phase, weight);
    # eta_{w i} = r_i O_i^T eta_w and phase_{w i} = phase_w + <eta_w, t_i>.
    trans = [m.translation for m in ifs.maps]
    mats = [m.ratio * m.orientation.T for m in ifs.maps]
    acc = _Kahan()
    err_acc = 0.0
    leaves = 0
    stack = [(vec, 0.0, 1.0)]
    while stack:
        eta, phase, weight = stack.pop()
        scale = TWO_PI * float(np.linalg.norm(eta)) * radius
        if scale <= tol:
            leaves += 1
            if leaves > budget:
                raise ResourceExceeded(
                    f"mu_hat expansion exceeded {budget} leaves "
                    f"(set FRACTAL_FOURIER_BUDGET to raise)",
                    "leaf_budget",
                )
            theta = TWO_PI * (phase + float(eta @ b))
            acc.add(weight * complex(math.cos(theta), -math.sin(theta)))
            err_acc += weight * scale
            continue
        for i in range(ifs.n_maps - 1, -1, -1):
            stack.append(
                (
                    mats[i] @ eta,
                    phase + float(eta @ trans[i]),
                    weight * ifs.weights[i],
                )
            )
    return FrequencySample(
        xi=vec,
        value=acc.value,
        error_bound=err_acc + _roundoff(leaves),
        scheme="exact_recursion",
        leaves_used=leaves,
    )


def _mu_hat_homog_single(ifs, vec, tol):
    """Product-form evaluation for homogeneous systems (O(depth) work).

    All depth-m leaves share the frequency (r O^T)^m xi, so the stopping
    tree collapses to a product of one-step factors; the value equals the
    full tree sum exactly.
    """
    radius = ifs.support_radius
    step = ifs.maps[0].ratio * ifs.maps[0].orientation.T
    weights = ifs.weight_array
    trans = np.array([m.translation for m in ifs.maps])
    eta = vec.astype(float)
    value = complex(1.0, 0.0)
    depth = 0
    while TWO_PI * float(np.linalg.norm(eta)) * radius > tol:
        phases = TWO_PI * (trans @ eta)
        value *= complex(np.sum(weights * np.cos(phases)), -np.sum(weights * np.sin(phases)))
        eta = step @ eta
        depth += 1
    theta = TWO_PI * float(eta @ ifs.barycenter)
    value *= complex(math.cos(theta), -math.sin(theta))
    err = TWO_PI * float(np.linalg.norm(eta)) * radius + _roundoff(depth + 1)
    return value, err, depth


def _mu_hat_homog_many(ifs, etas: np.ndarray, tol: float):
    """Vectorised product-form mu_hat over rows of ``etas`` (n, k).

    Iterates to the depth required by the largest frequency; returns
    (values (n,), error bounds (n,), depth).
    """
    radius = ifs.support_radius
    r = ifs.maps[0].ratio
    orient = ifs.maps[0].orientation
    weights = ifs.weight_array
    trans = np.array([m.translation for m in ifs.maps])
    cur = etas.astype(float).copy()
    values = np.ones(len(cur), dtype=complex)
    depth = 0
    norms = np.linalg.norm(cur, axis=1)
    while TWO_PI * float(norms.max(initial=0.0)) * radius > tol:
        factor = np.zeros(len(cur), dtype=complex)
        for w, t in zip(weights, trans):
            factor += w * _cis(TWO_PI * (cur @ t))
        values *= factor
        cur = r * (cur @ orient)
        norms *= r
        depth += 1
        if depth > 5000:
            raise FractalFourierError("homogeneous recursion failed to contract")
    values *= _cis(TWO_PI * (cur @ ifs.barycenter))
    # recompute final norms: the tracked ones carry ~depth ulps of drift
    errs = TWO_PI * np.linalg.norm(cur, axis=1) * radius + _roundoff(depth + 1)
    return values, errs, depth


# ---------------------------------------------------------------------------
# pushforward maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PushforwardMap:
    """A C^2 map f: R^k -> R^d with bounds valid on the support ball.

    ``evaluator`` maps an (n, k) batch to (n,) when d = 1, else (n, d).
    ``gradient`` returns (n, k) when d = 1, else the Jacobian (n, d, k).
    ``hessian`` (d = 1 only) returns (n, k, k).  ``lipschitz_bound`` and
    ``hessian_bound`` bound |f'| and the operator norm of the Hessian of
    <v, f> (unit v) on the stated ball; ``bounds_certified`` records
    whether they are analytic or sampled estimates.
    """

    evaluator: Callable
    in_dim: int = 1
    out_dim: int = 1
    gradient: Optional[Callable] = None
    hessian: Optional[Callable] = None
    lipschitz_bound: Optional[float] = None
    hessian_bound: Optional[float] = None
    kind: str = "generic_c2"
    label: str = "f"
    bounds_certified: bool = True
    quad_hessians: Optional[np.ndarray] = None
    complex_derivatives: Optional[tuple] = None

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.evaluator(np.atleast_2d(np.asarray(points, dtype=float)))


def _ball_sup(ifs: SelfSimilarIFS) -> float:
    return ifs.max_point_norm


def identity_map(ifs: SelfSimilarIFS) -> PushforwardMap:
    k = ifs.ambient_dim
    return PushforwardMap(
        evaluator=lambda pts: pts[:, 0] if k == 1 else pts,
        in_dim=k,
        out_dim=k,
        gradient=(lambda pts: np.ones_like(pts)) if k == 1 else None,
        hessian=(lambda pts: np.zeros((len(pts), 1, 1))) if k == 1 else None,
        lipschitz_bound=1.0,
        hessian_bound=0.0,
        kind="generic_c2",
        label="identity",
    )


def constant_map(ifs: SelfSimilarIFS, c: float) -> PushforwardMap:
    return PushforwardMap(
        evaluator=lambda pts: np.full(len(pts), float(c)),
        in_dim=ifs.ambient_dim,
        out_dim=1,
        gradient=lambda pts: np.zeros_like(pts),
        hessian=lambda pts: np.zeros((len(pts),) + (ifs.ambient_dim,) * 2),
        lipschitz_bound=0.0,
        hessian_bound=0.0,
        label=f"constant({c})",
    )


def square_map(ifs: SelfSimilarIFS) -> PushforwardMap:
    """f(x) = x^2 on the line; |f'| <= 2 sup|x|, f'' = 2."""
    if ifs.ambient_dim != 1:
        raise Unsupported("square_map is one-dimensional; see sum_of_squares_map")
    sup = _ball_sup(ifs)
    return PushforwardMap(
        evaluator=lambda pts: pts[:, 0] ** 2,
        in_dim=1,
        out_dim=1,
        gradient=lambda pts: 2.0 * pts,
        hessian=lambda pts: np.full((len(pts), 1, 1), 2.0),
        lipschitz_bound=2.0 * sup,
        hessian_bound=2.0,
        label="square",
    )


def cube_map(ifs: SelfSimilarIFS) -> PushforwardMap:
    """f(x) = x^3 on the line; curvature vanishes at the origin."""
    sup = _ball_sup(ifs)
    return PushforwardMap(
        evaluator=lambda pts: pts[:, 0] ** 3,
        in_dim=1,
        out_dim=1,
        gradient=lambda pts: 3.0 * pts**2,
        hessian=lambda pts: 6.0 * pts[:, :, None],
        lipschitz_bound=3.0 * sup**2,
        hessian_bound=6.0 * sup,
        label="cube",
    )


def sum_of_squares_map(ifs: SelfSimilarIFS) -> PushforwardMap:
    """f(x) = x_1^2 + ... + x_k^2; Hessian 2I everywhere."""
    k = ifs.ambient_dim
    sup = _ball_sup(ifs)
    return PushforwardMap(
        evaluator=lambda pts: np.sum(pts**2, axis=1),
        in_dim=k,
        out_dim=1,
        gradient=lambda pts: 2.0 * pts,
        hessian=lambda pts: np.broadcast_to(2.0 * np.eye(k), (len(pts), k, k)).copy(),
        lipschitz_bound=2.0 * sup,
        hessian_bound=2.0,
        label="sum_of_squares",
    )


def _positive_margin(ifs: SelfSimilarIFS, shift: float) -> float:
    lo = float(ifs.barycenter[0]) - ifs.support_radius - shift
    if lo <= 0.0:
        from .errors import SupportNotPositive

        raise SupportNotPositive(
            f"support ball reaches {lo + shift} but the map needs x > {shift}"
        )
    return lo


def log_map(ifs: SelfSimilarIFS, shift: float = 0.0) -> PushforwardMap:
    """f(x) = log(x - shift); requires the support ball right of the shift."""
    lo = _positive_margin(ifs, shift)
    return PushforwardMap(
        evaluator=lambda pts: np.log(pts[:, 0] - shift),
        in_dim=1,
        out_dim=1,
        gradient=lambda pts: 1.0 / (pts - shift),
        hessian=lambda pts: (-1.0 / (pts[:, :, None] - shift) ** 2),
        lipschitz_bound=1.0 / lo,
        hessian_bound=1.0 / lo**2,
        label=f"log(x-{shift})" if shift else "log",
    )


def neg_log_map(ifs: SelfSimilarIFS, shift: float = 0.0) -> PushforwardMap:
    """f(y) = -log(y - shift); the second factor of radial-projection form."""
    lo = _positive_margin(ifs, shift)
    return PushforwardMap(
        evaluator=lambda pts: -np.log(pts[:, 0] - shift),
        in_dim=1,
        out_dim=1,
        gradient=lambda pts: -1.0 / (pts - shift),
        hessian=lambda pts: (1.0 / (pts[:, :, None] - shift) ** 2),
        lipschitz_bound=1.0 / lo,
        hessian_bound=1.0 / lo**2,
        label=f"-log(y-{shift})" if shift else "-log",
    )


def quadratic_map(
    ifs: SelfSimilarIFS,
    coefficients,
    linear=None,
    constant=None,
) -> PushforwardMap:
    """Quadratic map R^k -> R^d from upper-triangular coefficients.

    ``coefficients[i][(p, q)]`` (p <= q, zero-based) is the coefficient of
    x_p x_q in component i; ``linear`` is an optional (d, k) affine part.
    Component Hessians are constant, so the directional Hessian
    sum_i v_i H_i has constant determinant in x.
    """
    k = ifs.ambient_dim
    coefficients = [dict(c) for c in coefficients]
    d = len(coefficients)
    hessians = np.zeros((d, k, k))
    for i, comp in enumerate(coefficients):
        for (p, q), c in comp.items():
            if p == q:
                hessians[i, p, p] += 2.0 * c
            else:
                hessians[i, p, q] += c
                hessians[i, q, p] += c
    lin = np.zeros((d, k)) if linear is None else np.asarray(linear, dtype=float)
    const = np.zeros(d) if constant is None else np.asarray(constant, dtype=float)

    def evaluator(pts):
        vals = 0.5 * np.einsum("np,ipq,nq->ni", pts, hessians, pts)
        vals += pts @ lin.T + const
        return vals[:, 0] if d == 1 else vals

    def jacobian(pts):
        jac = np.einsum("ipq,nq->nip", hessians, pts) + lin[None, :, :]
        return jac[:, 0, :] if d == 1 else jac

    spectral = np.array([np.linalg.norm(h, 2) for h in hessians])
    sup = _ball_sup(ifs)
    lipschitz = float(np.linalg.norm(spectral * sup + np.linalg.norm(lin, axis=1)))
    hessian_bound = float(np.linalg.norm(spectral))
    return PushforwardMap(
        evaluator=evaluator,
        in_dim=k,
        out_dim=d,
        gradient=jacobian,
        hessian=(lambda pts: np.broadcast_to(hessians[0], (len(pts), k, k)).copy())
        if d == 1
        else None,
        lipschitz_bound=lipschitz,
        hessian_bound=hessian_bound,
        kind="quadratic",
        label="quadratic",
        quad_hessians=hessians,
    )


def holomorphic_map(
    ifs: SelfSimilarIFS,
    f: Callable[[complex], complex],
    df: Callable[[complex], complex],
    d2f: Callable[[complex], complex],
    lipschitz_bound: Optional[float] = None,
    hessian_bound: Optional[float] = None,
) -> PushforwardMap:
    """A holomorphic map C -> C viewed as R^2 -> R^2.

    Derivative bounds on the support ball may be passed explicitly;
    otherwise they are estimated from chaos-game samples (x 1.5 headroom)
    and the map is marked uncertified.
    """
    if ifs.ambient_dim != 2:
        raise Unsupported("holomorphic maps live on the plane (k = 2)")

    def to_complex(pts):
        return pts[:, 0] + 1j * pts[:, 1]

    def evaluator(pts):
        w = np.array([f(z) for z in to_complex(pts)])
        return np.column_stack([w.real, w.imag])

    def jacobian(pts):
        # Cauchy-Riemann: J = [[Re f', -Im f'], [Im f', Re f']].
        fp = np.array([df(z) for z in to_complex(pts)])
        jac = np.empty((len(pts), 2, 2))
        jac[:, 0, 0] = fp.real
        jac[:, 0, 1] = -fp.imag
        jac[:, 1, 0] = fp.imag
        jac[:, 1, 1] = fp.real
        return jac

    certified = lipschitz_bound is not None and hessian_bound is not None
    if not certified:
        pts = chaos_game(ifs, 10_000, seed=7)
        z = to_complex(pts)
        d1 = np.abs(np.array([df(v) for v in z]))
        d2 = np.abs(np.array([d2f(v) for v in z]))
        lipschitz_bound = lipschitz_bound or 1.5 * float(d1.max())
        hessian_bound = hessian_bound or 1.5 * float(d2.max())
    return PushforwardMap(
        evaluator=evaluator,
        in_dim=2,
        out_dim=2,
        gradient=jacobian,
        lipschitz_bound=float(lipschitz_bound),
        hessian_bound=float(hessian_bound),
        kind="holomorphic",
        label="holomorphic",
        bounds_certified=certified,
        complex_derivatives=(f, df, d2f),
    )


def graph_lift(ifs: SelfSimilarIFS, pmap: PushforwardMap) -> PushforwardMap:
    """T(x) = (x, f(x)): the lift of f onto its graph in R^(k+d).

    Evaluating the lifted transform at (0, xi) recovers the image
    transform at xi through the same quadrature code path.
    """
    k = pmap.in_dim

    def evaluator(pts):
        f_vals = pmap.evaluator(pts)
        if f_vals.ndim == 1:
            f_vals = f_vals[:, None]
        return np.concatenate([pts, f_vals], axis=1)

    lip = None
    if pmap.lipschitz_bound is not None:
        lip = math.sqrt(1.0 + pmap.lipschitz_bound**2)
    return PushforwardMap(
        evaluator=evaluator,
        in_dim=k,
        out_dim=k + pmap.out_dim,
        lipschitz_bound=lip,
        hessian_bound=pmap.hessian_bound,
        kind="generic_c2",
        label=f"graph_lift({pmap.label})",
        bounds_certified=pmap.bounds_certified,
    )


def estimate_bounds(
    ifs: SelfSimilarIFS, pmap: PushforwardMap, seed: int = 0, n_samples: int = 10_000
) -> PushforwardMap:
    """Fill missing Lipschitz/Hessian bounds from finite differences.

    Estimates take 1.5 x the sampled maximum and mark the map (and hence
    every sample computed with it) as uncertified.
    """
    pts = chaos_game(ifs, n_samples, seed=seed)
    h = 1e-5 * (1.0 + _ball_sup(ifs))
    lip = pmap.lipschitz_bound
    hess = pmap.hessian_bound
    if lip is None:
        grads = _fd_gradient(pmap, pts, h)
        norms = np.linalg.norm(grads, axis=-1)
        if norms.ndim > 1:
            norms = np.linalg.norm(norms, axis=-1)
        lip = 1.5 * float(norms.max())
    if hess is None:
        hmats = _fd_hessian_scalar(pmap, pts, math.sqrt(h))
        hess = 1.5 * float(np.abs(np.linalg.eigvalsh(hmats)).max())
    return replace(
        pmap, lipschitz_bound=lip, hessian_bound=hess, bounds_certified=False
    )


def _fd_gradient(pmap: PushforwardMap, pts: np.ndarray, h: float) -> np.ndarray:
    k = pts.shape[1]
    cols = []
    for axis in range(k):
        e = np.zeros(k)
        e[axis] = h
        cols.append((pmap.evaluator(pts + e) - pmap.evaluator(pts - e)) / (2 * h))
    stacked = np.stack(cols, axis=-1)
    return stacked


def _fd_hessian_scalar(pmap: PushforwardMap, pts: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Hessian for scalar-valued maps, (n, k, k)."""
    if pmap.out_dim != 1:
        raise Unsupported("finite-difference Hessian implemented for scalar maps")
    k = pts.shape[1]
    n = len(pts)
    out = np.empty((n, k, k))
    f0 = pmap.evaluator(pts)
    basis = np.eye(k) * h
    for p in range(k):
        fpp = pmap.evaluator(pts + basis[p])
        fpm = pmap.evaluator(pts - basis[p])
        out[:, p, p] = (fpp - 2.0 * f0 + fpm) / h**2
        for q in range(p + 1, k):
            fa = pmap.evaluator(pts + basis[p] + basis[q])
            fb = pmap.evaluator(pts + basis[p] - basis[q])
            fc = pmap.evaluator(pts - basis[p] + basis[q])
            fd = pmap.evaluator(pts - basis[p] - basis[q])
            out[:, p, q] = out[:, q, p] = (fa - fb - fc + fd) / (4.0 * h**2)
    return out


# ---------------------------------------------------------------------------
# leaf data shared by the quadrature schemes
# ---------------------------------------------------------------------------


class _LeafData:
    """Columnar stopping-decomposition data used by the quadratures."""

    __slots__ = ("weights", "ratios", "anchors", "orientation", "orientations", "n")

    def __init__(self, weights, ratios, anchors, orientation=None, orientations=None):
        self.weights = weights
        self.ratios = ratios
        self.anchors = anchors
        self.orientation = orientation      # shared (k, k) for homogeneous
        self.orientations = orientations    # per-leaf (n, k, k) otherwise
        self.n = len(weights)


@lru_cache(maxsize=64)
def _homog_leaf_cache(ifs: SelfSimilarIFS, depth: int, budget: int) -> _LeafData:
    ratio, orient, weights, _, anchors = _homogeneous_leaf_arrays(ifs, depth, budget)
    return _LeafData(
        weights=weights,
        ratios=np.full(len(weights), ratio),
        anchors=anchors,
        orientation=orient,
    )


def _leaf_data(ifs: SelfSimilarIFS, scale: float, budget: int) -> _LeafData:
    if scale >= 1.0:
        k = ifs.ambient_dim
        return _LeafData(
            weights=np.ones(1),
            ratios=np.ones(1),
            anchors=ifs.barycenter[None, :],
            orientation=np.eye(k),
        )
    if ifs.is_homogeneous:
        return _homog_leaf_cache(ifs, _homogeneous_depth(ifs, scale), budget)
    words = _enumerate_stopping(ifs, scale, budget)
    return _LeafData(
        weights=np.array([w.weight for w in words]),
        ratios=np.array([w.ratio for w in words]),
        anchors=np.array([w.anchor for w in words]),
        orientations=np.array([w.orientation for w in words]),
    )


# ---------------------------------------------------------------------------
# order-0 and order-1 image quadratures
# ---------------------------------------------------------------------------


def _trivial_sample(vec, scheme) -> FrequencySample:
    return FrequencySample(
        xi=vec, value=1.0 + 0.0j, error_bound=0.0, scheme=scheme, leaves_used=1
    )


def pushforward_hat_order0(
    ifs: SelfSimilarIFS,
    pmap: PushforwardMap,
    xi,
    tol: float = 1e-4,
    scale: Optional[float] = None,
    budget: Optional[int] = None,
) -> FrequencySample:
    """Order-0 cylinder quadrature of the image transform mu_f-hat(xi)."""
    if tol <= 0.0:
        raise BadConfig("tol must be positive")
    budget = DEFAULT_LEAF_BUDGET if budget is None else budget
    vec = _freq_vector(xi, pmap.out_dim)
    xi_norm = float(np.linalg.norm(vec))
    if xi_norm == 0.0:
        return _trivial_sample(vec, "order0")
    if pmap.lipschitz_bound is None:
        raise BadConfig("order0 needs lipschitz_bound (use estimate_bounds)")
    lip = pmap.lipschitz_bound
    radius = ifs.support_radius
    if scale is None:
        scale = math.inf if lip == 0.0 else tol / (TWO_PI * xi_norm * lip * radius)
    leaves = _leaf_data(ifs, scale, budget)
    f_vals = pmap.evaluator(leaves.anchors)
    phases = f_vals * vec[0] if pmap.out_dim == 1 else f_vals @ vec
    value = compensated_sum(leaves.weights * _cis(TWO_PI * phases))
    err = (
        TWO_PI * xi_norm * lip * radius * float(np.sum(leaves.weights * leaves.ratios))
        + _roundoff(leaves.n)
    )
    return FrequencySample(
        xi=vec,
        value=value,
        error_bound=err,
        scheme="order0",
        leaves_used=leaves.n,
        certified=pmap.bounds_certified,
    )


def _order1_leaf_terms(ifs, pmap, leaves: _LeafData, vec):
    """Per-leaf phase constants and inner frequencies for the order-1 scheme.

    Returns (a_w, eta_w) with a_w = <xi, f(x_w)> - <eta_w, b> and
    eta_w = r_w O_w^T (J_f(x_w)^T xi); the cylinder contribution is
    p_w e^{-2 pi i a_w} mu_hat(eta_w).
    """
    f_vals = pmap.evaluator(leaves.anchors)
    grads = pmap.gradient(leaves.anchors)
    if pmap.out_dim == 1:
        zeta = grads * vec[0]                      # (n, k)
        f_phase = f_vals * vec[0]
    else:
        zeta = np.einsum("ndk,d->nk", grads, vec)
        f_phase = f_vals @ vec
    if leaves.orientation is not None:
        eta = leaves.ratios[:, None] * (zeta @ leaves.orientation)
    else:
        eta = leaves.ratios[:, None] * np.einsum(
            "nij,ni->nj", leaves.orientations, zeta
        )
    a_w = f_phase - eta @ ifs.barycenter
    return a_w, eta


def pushforward_hat_order1(
    ifs: SelfSimilarIFS,
    pmap: PushforwardMap,
    xi,
    tol: float = 1e-4,
    scale: Optional[float] = None,
    budget: Optional[int] = None,
    inner_tol: Optional[float] = None,
) -> FrequencySample:
    """Order-1 (linearised) cylinder quadrature of the image transform.

    Each cylinder integrates its tangent approximation exactly through
    mu_hat; stopping scale ~ sqrt(tol / (pi |xi| H)) / R, so far fewer
    leaves are needed than order-0 at the same tolerance.
    """
    if tol <= 0.0:
        raise BadConfig("tol must be positive")
    budget = DEFAULT_LEAF_BUDGET if budget is None else budget
    vec = _freq_vector(xi, pmap.out_dim)
    xi_norm = float(np.linalg.norm(vec))
    if xi_norm == 0.0:
        return _trivial_sample(vec, "order1")
    if pmap.hessian_bound is None:
        raise MissingHessianBound("order1 needs hessian_bound (use estimate_bounds)")
    if pmap.gradient is None:
        raise BadConfig("order1 needs a gradient evaluator")
    hess = pmap.hessian_bound
    radius = ifs.support_radius
    tol_taylor = 0.5 * tol
    if inner_tol is None:
        inner_tol = 0.5 * tol
    if scale is None:
        scale = (
            math.inf
            if hess == 0.0
            else math.sqrt(tol_taylor / (math.pi * xi_norm * hess)) / radius
        )
    leaves = _leaf_data(ifs, scale, budget)
    a_w, eta = _order1_leaf_terms(ifs, pmap, leaves, vec)
    if ifs.is_homogeneous:
        inner_vals, inner_errs, _ = _mu_hat_homog_many(ifs, eta, inner_tol)
    else:
        singles = [mu_hat(ifs, e, inner_tol, budget=budget) for e in eta]
        inner_vals = np.array([s.value for s in singles])
        inner_errs = np.array([s.error_bound for s in singles])
    value = compensated_sum(leaves.weights * _cis(TWO_PI * a_w) * inner_vals)
    taylor = (
        math.pi * xi_norm * hess * radius**2
        * float(np.sum(leaves.weights * leaves.ratios**2))
    )
    err = (
        taylor
        + float(np.sum(leaves.weights * inner_errs))
        + _roundoff(leaves.n)
    )
    return FrequencySample(
        xi=vec,
        value=value,
        error_bound=err,
        scheme="order1",
        leaves_used=leaves.n,
        certified=pmap.bounds_certified,
    )


# ---------------------------------------------------------------------------
# batched evaluation over frequency arrays (scalar images, k arbitrary)
# ---------------------------------------------------------------------------


class _MuHatTable:
    """Uniform-grid linear-interpolation table for mu_hat on the line.

    ``slack`` certifies |lookup(eta) - mu_hat(eta)| for |eta| <= eta_max;
    negative frequencies resolve through conjugate symmetry.
    """

    __slots__ = ("h", "values", "slack", "eta_max")

    def __init__(self, ifs, eta_max: float, table_tol: float):
        sup = ifs.max_point_norm
        second = (TWO_PI * sup) ** 2
        h = math.sqrt(8.0 * table_tol / second)
        n = int(eta_max / h) + 3
        if n > 4_000_000:
            n = 4_000_000
            h = eta_max / (n - 3)
        grid = np.arange(n) * h
        etas = np.zeros((n, ifs.ambient_dim))
        etas[:, 0] = grid
        vals, errs, _ = _mu_hat_homog_many(ifs, etas, table_tol)
        self.h = h
        self.values = vals
        self.eta_max = grid[-2]
        self.slack = float(errs.max(initial=0.0)) + (h**2 / 8.0) * second

    def lookup(self, eta: np.ndarray) -> np.ndarray:
        mag = np.abs(eta)
        pos = mag * (1.0 / self.h)
        idx = pos.astype(np.int64)
        frac = pos - idx
        lo = self.values[idx]
        out = lo + frac * (self.values[idx + 1] - lo)
        np.multiply(out.imag, np.sign(eta), out=out.imag)
        return out


def _batch_scalar_order1_homog(
    ifs, pmap, xis, tol, budget, threads, scale=None
):
    """Vectorised order-1 for homogeneous 1-d systems and scalar images.

    With ``scale`` fixed, one decomposition serves every frequency
    (uniform inversion grids); otherwise frequencies are grouped by
    octave and each group gets the tolerance-driven stopping scale.
    """
    radius = ifs.support_radius
    hess = pmap.hessian_bound
    abs_xi = np.abs(xis)
    values = np.empty(len(xis), dtype=complex)
    errors = np.empty(len(xis))
    leaves_used = np.empty(len(xis), dtype=np.int64)
    zero_mask = abs_xi == 0.0
    values[zero_mask] = 1.0
    errors[zero_mask] = 0.0
    leaves_used[zero_mask] = 1

    tol_taylor = 0.5 * tol
    active = np.flatnonzero(~zero_mask)
    if len(active) == 0:
        return values, errors, leaves_used
    if scale is not None:
        groups = [active]
        scales = [scale]
    else:
        octaves = np.floor(np.log2(np.maximum(abs_xi[active], 1.0))).astype(int)
        groups, scales = [], []
        for octave in np.unique(octaves):
            idx = active[octaves == octave]
            groups.append(idx)
            xi_top = float(abs_xi[idx].max())
            scales.append(
                math.inf
                if hess == 0.0
                else math.sqrt(tol_taylor / (math.pi * xi_top * hess)) / radius
            )

    prepared = []
    eta_max = 0.0
    for idx, grp_scale in zip(groups, scales):
        leaves = _leaf_data(ifs, grp_scale, budget)
        f_vals = pmap.evaluator(leaves.anchors)
        grads = pmap.gradient(leaves.anchors)[:, 0]
        orient = float(leaves.orientation[0, 0])
        b_coef = leaves.ratios * orient * grads
        a_coef = f_vals - b_coef * float(ifs.barycenter[0])
        prepared.append((idx, leaves, a_coef, b_coef))
        eta_max = max(
            eta_max, float(abs_xi[idx].max()) * float(np.abs(b_coef).max(initial=0.0))
        )

    table = _MuHatTable(ifs, eta_max * 1.0001 + 1e-9, min(tol / 8.0, 1e-8))

    jobs = []
    for idx, leaves, a_coef, b_coef in prepared:
        chunk_len = max(16, int(4_000_000 / max(leaves.n, 1)))
        taylor_coef = (
            math.pi * hess * radius**2 * float(np.sum(leaves.weights * leaves.ratios**2))
        )
        for start in range(0, len(idx), chunk_len):
            sel = idx[start : start + chunk_len]
            jobs.append((sel, leaves, a_coef, b_coef, taylor_coef))

    def run_job(job):
        sel, leaves, a_coef, b_coef, taylor_coef = job
        xi_chunk = xis[sel]
        theta = np.outer(xi_chunk, TWO_PI * a_coef)
        ct = np.cos(theta)
        st = np.sin(theta, out=theta)
        inner = table.lookup(np.outer(xi_chunk, b_coef))
        # (cos - i sin)(a + i b) summed against the weights, in real arithmetic.
        re = ct * inner.real
        re += st * inner.imag
        im = ct * inner.imag
        im -= st * inner.real
        vals = np.einsum("nw,w->n", re, leaves.weights) + 1j * np.einsum(
            "nw,w->n", im, leaves.weights
        )
        errs = np.abs(xi_chunk) * taylor_coef + table.slack + _roundoff(leaves.n)
        return sel, vals, errs, leaves.n

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_job, jobs))
    else:
        results = [run_job(j) for j in jobs]
    for sel, vals, errs, n in results:
        values[sel] = vals
        errors[sel] = errs
        leaves_used[sel] = n
    return values, errors, leaves_used


def pushforward_batch(
    ifs: SelfSimilarIFS,
    pmap: PushforwardMap,
    xis: Sequence[float],
    tol: float = 1e-4,
    scheme: str = "order1",
    threads: int = 1,
    budget: Optional[int] = None,
    scale: Optional[float] = None,
):
    """Evaluate the scalar image transform on an array of frequencies.

    Returns (values, error_bounds, leaves_used) aligned with ``xis``.
    Results are independent of ``threads`` (fixed chunking, fixed
    reduction order).  Homogeneous 1-d systems with scalar images take a
    vectorised path; everything else falls back to per-frequency calls.
    A fixed ``scale`` pins the stopping decomposition (one cover for all
    frequencies, error bounds still per frequency), which is how uniform
    inversion grids are evaluated cheaply.
    """
    if pmap.out_dim != 1:
        raise Unsupported("batched evaluation expects scalar images (d = 1)")
    if scheme not in ("order0", "order1", "exact_recursion"):
        raise BadConfig(f"unknown scheme {scheme!r}")
    budget = DEFAULT_LEAF_BUDGET if budget is None else budget
    xis = np.asarray(xis, dtype=float)
    if (
        scheme == "order1"
        and ifs.is_homogeneous
        and ifs.ambient_dim == 1
        and pmap.hessian_bound is not None
        and pmap.hessian_bound > 0.0
        and pmap.gradient is not None
    ):
        return _batch_scalar_order1_homog(
            ifs, pmap, xis, tol, budget, threads, scale=scale
        )

    def single(x):
        if scheme == "order0":
            return pushforward_hat_order0(ifs, pmap, x, tol, scale=scale, budget=budget)
        if scheme == "order1":
            return pushforward_hat_order1(ifs, pmap, x, tol, scale=scale, budget=budget)
        return mu_hat(ifs, x, tol, budget=budget)

    chunk_len = 64
    chunks = [xis[i : i + chunk_len] for i in range(0, len(xis), chunk_len)]

    def run(chunk):
        return [single(float(x)) for x in chunk]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            groups = list(pool.map(run, chunks))
    else:
        groups = [run(c) for c in chunks]
    samples = [s for grp in groups for s in grp]
    values = np.array([s.value for s in samples])
    errors = np.array([s.error_bound for s in samples])
    leaves = np.array([s.leaves_used for s in samples], dtype=np.int64)
    return values, errors, leaves


# ---------------------------------------------------------------------------
# curvature and Hessian diagnostics
# ---------------------------------------------------------------------------


def curvature_diagnostic(
    ifs: SelfSimilarIFS,
    pmap: PushforwardMap,
    n_samples: int = 4096,
    seed: int = 0,
) -> Tuple[float, bool]:
    """(min |det Hess f| over support samples, vanishing flag).

    The Gaussian curvature of the graph of a scalar f is a nowhere-zero
    multiple of det Hess f, so a vanishing determinant on the support
    voids the curvature hypothesis.  The sample set is the chaos game
    plus every map's fixed point (exact attractor members, so isolated
    zeros sitting at fixed points are not missed).
    """
    if pmap.out_dim != 1:
        raise Unsupported("curvature diagnostic expects a scalar map")
    pts = np.concatenate(
        [np.array([m.fixed_point() for m in ifs.maps]), chaos_game(ifs, n_samples, seed=seed)]
    )
    if pmap.hessian is not None:
        hmats = pmap.hessian(pts)
    else:
        hmats = _fd_hessian_scalar(pmap, pts, 1e-4 * (1.0 + _ball_sup(ifs)))
    dets = np.linalg.det(hmats)
    min_abs = float(np.abs(dets).min())
    return min_abs, bool(min_abs < 1e-8)


def quadratic_directional_hessian(
    pmap: PushforwardMap, v: Sequence[float]
) -> Tuple[np.ndarray, float]:
    """Directional Hessian sum_i v_i Hess f_i of a quadratic map and its det.

    Constant in x by construction; |v| must be 1 within 1e-12.
    """
    if pmap.kind != "quadratic" or pmap.quad_hessians is None:
        raise Unsupported("directional Hessians are defined for quadratic maps")
    vec = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
        raise BadConfig("direction v must be a unit vector (within 1e-12)")
    if vec.shape != (pmap.out_dim,):
        raise BadConfig(f"v must have {pmap.out_dim} components")
    h = np.einsum("i,ipq->pq", vec, pmap.quad_hessians)
    return h, float(np.linalg.det(h))


def holomorphic_hessian_identity(
    pmap: PushforwardMap, z: complex, v: Sequence[float] = (1.0, 0.0)
) -> Tuple[float, Tuple[float, float]]:
    """det and eigenvalue magnitudes of the directional Hessian of v1 U + v2 V.

    For holomorphic f = U + iV the directional Hessian has eigenvalues
    +/- |f''(z)| with orthogonal eigenspaces, so det = -|f''(z)|^2
    independently of the unit direction v.
    """
    if pmap.kind != "holomorphic" or pmap.complex_derivatives is None:
        raise Unsupported("identity available for holomorphic maps only")
    vec = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
        raise BadConfig("direction v must be a unit vector (within 1e-12)")
    _, _, d2f = pmap.complex_derivatives
    mag = abs(d2f(complex(z)))
    return -(mag**2), (mag, mag)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def write_samples_csv(path, xis, values, errors, scheme, leaves) -> None:
    """Batch output: one row per frequency with certified error bounds."""
    xis = np.asarray(xis)
    if xis.ndim == 1:
        xis = xis[:, None]
    d = xis.shape[1]
    header = [f"xi{i}" for i in range(d)] if d > 1 else ["xi"]
    header += ["re", "im", "abs", "error_bound", "scheme", "leaves_used"]
    lines = [",".join(header)]
    for row in range(len(values)):
        cells = [repr(float(x)) for x in xis[row]]
        v = values[row]
        cells += [
            repr(float(v.real)),
            repr(float(v.imag)),
            repr(float(abs(v))),
            repr(float(errors[row])),
            scheme,
            str(int(leaves[row])),
        ]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
