"""Catalog of functions with closed-form proximal operators.

Every member exposes evaluation, ``prox``, the reflected prox
``2*prox - id``, and the conjugate prox through the Moreau identity.  The
catalog covers quadratics (optionally restricted to an affine set), the zero
function, indicators of {0} and of affine sets, box indicators, weighted l1
norms, per-coordinate piecewise-linear penalties, and separable
compositions.

All instances are immutable and safe to share between threads; the
quadratic kinds cache one matrix factorization per step size behind a lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    CapabilityError,
    DimensionMismatchError,
    InfeasibleConstraintError,
    SingularKktError,
)
from .linmetric import _as_dense, spectral_summary


@dataclass(frozen=True, eq=False)
class ProxQuery:
    """A prox evaluation request: step size gamma > 0 and query point."""

    gamma: float
    point: np.ndarray

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        pt = np.asarray(self.point, dtype=float)
        object.__setattr__(self, "point", pt)


class ProxFn:
    """Base class; subclasses implement ``__call__`` and ``prox``."""

    #: intrinsic dimension, or None when the function works on any dimension
    dim: int | None = None
    #: (sigma, beta) strong convexity / smoothness pair when known
    regularity: tuple[float, float] | None = None
    kind = "abstract"

    def _check_point(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.ndim != 1:
            raise DimensionMismatchError("prox queries expect 1-d points")
        if self.dim is not None and z.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"{self.kind} expects dimension {self.dim}, got {z.shape[0]}")
        return z

    def __call__(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def reflect(self, gamma: float, z: np.ndarray) -> np.ndarray:
        """Reflected prox 2*prox(gamma, z) - z."""
        z = np.asarray(z, dtype=float)
        return 2.0 * self.prox(gamma, z) - z

    def conjugate_prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        """Prox of gamma times the convex conjugate, via Moreau's identity."""
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = np.asarray(z, dtype=float)
        return z - gamma * self.prox(1.0 / gamma, z / gamma)

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        dim = "*" if self.dim is None else self.dim
        return f"{type(self).__name__}(dim={dim})"


def prox(f: ProxFn, query: ProxQuery) -> np.ndarray:
    """Minimizer of gamma*f(x) + 0.5*||x - z||^2 at z = query.point."""
    return f.prox(query.gamma, query.point)


def reflected_prox(f: ProxFn, query: ProxQuery) -> np.ndarray:
    """2*prox - identity at the query point."""
    return f.reflect(query.gamma, query.point)


def prox_conjugate(f: ProxFn, query: ProxQuery) -> np.ndarray:
    """Prox of gamma*f^* at the query point (Moreau identity)."""
    return f.conjugate_prox(query.gamma, query.point)


class Quadratic(ProxFn):
    """f(x) = 0.5 x^T Q x + q^T x with symmetric psd Q.

    The prox solves (gamma*Q + I) x = z - gamma*q with a Cholesky
    factorization cached per gamma.  Regularity metadata is the extreme
    eigenvalue pair of Q.
    """

    kind = "quadratic"

    def __init__(self, q_matrix, q_vector=None):
        qm = _as_dense(q_matrix)
        if qm.ndim != 2 or qm.shape[0] != qm.shape[1]:
            raise DimensionMismatchError("Q must be square")
        if np.abs(qm - qm.T).max(initial=0.0) > 1e-10 * max(
                1.0, np.abs(qm).max(initial=0.0)):
            raise ValueError("Q must be symmetric")
        qm = 0.5 * (qm + qm.T)
        n = qm.shape[0]
        qv = np.zeros(n) if q_vector is None else np.asarray(q_vector,
                                                             dtype=float)
        if qv.shape != (n,):
            raise DimensionMismatchError("q must match Q's dimension")
        summary = spectral_summary(qm)
        if summary.lambda_min < 0:
            raise ValueError("Q must be positive semidefinite")
        self.Q = qm
        self.q = qv
        self.dim = n
        self.regularity = (summary.lambda_min, summary.lambda_max)
        self._cache: dict[float, tuple] = {}
        self._lock = threading.Lock()

    @property
    def is_positive_definite(self) -> bool:
        return self.regularity[0] > 0

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        return float(0.5 * x @ self.Q @ x + self.q @ x)

    def _factor(self, gamma: float):
        with self._lock:
            fac = self._cache.get(gamma)
            if fac is None:
                fac = scipy.linalg.cho_factor(
                    gamma * self.Q + np.eye(self.dim))
                self._cache[gamma] = fac
        return fac

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = self._check_point(z)
        return scipy.linalg.cho_solve(self._factor(gamma),
                                      z - gamma * self.q)

    def solve_shifted(self, rho: float, rhs: np.ndarray) -> np.ndarray:
        """Solve (Q + rho*I) x = rhs (used by dual constructions)."""
        if rho < 0:
            raise ValueError("rho must be >= 0")
        return scipy.linalg.solve(self.Q + rho * np.eye(self.dim), rhs,
                                  assume_a="pos")

    def to_json(self) -> dict:
        from .linmetric import Matrix
        return {"kind": self.kind, "Q": Matrix(self.Q).to_json(),
                "q": self.q.tolist()}


class QuadraticAffine(ProxFn):
    """Quadratic plus the indicator of an affine set {x : L x = b}.

    f(x) = 0.5 x^T Q x + q^T x restricted to L x = b.  The prox is the
    equality-constrained least squares solve through the saddle system
    [[gamma*Q + I, L^T], [L, 0]], factorized once per gamma.
    """

    kind = "quadratic_affine"

    def __init__(self, q_matrix, q_vector, l_matrix, b_vector):
        qm = _as_dense(q_matrix)
        n = qm.shape[0]
        qv = (np.zeros(n) if q_vector is None
              else np.asarray(q_vector, dtype=float))
        lm = _as_dense(l_matrix)
        if lm.size == 0:
            lm = lm.reshape(0, n)
        bv = np.asarray(b_vector, dtype=float).ravel()
        if lm.shape[1] != n or bv.shape[0] != lm.shape[0]:
            raise DimensionMismatchError("L, b shapes inconsistent with Q")
        if np.abs(qm - qm.T).max(initial=0.0) > 1e-10 * max(
                1.0, np.abs(qm).max(initial=0.0)):
            raise ValueError("Q must be symmetric")
        self.Q = 0.5 * (qm + qm.T)
        self.q = qv
        self.L = lm
        self.b = bv
        self.dim = n
        self._cache: dict[float, tuple] = {}
        self._lock = threading.Lock()

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        if self.L.shape[0] and np.linalg.norm(
                self.L @ x - self.b, np.inf) > 1e-9 * max(
                    1.0, np.abs(self.b).max(initial=0.0)):
            return np.inf
        return float(0.5 * x @ self.Q @ x + self.q @ x)

    def _factor(self, gamma: float):
        with self._lock:
            fac = self._cache.get(gamma)
            if fac is None:
                n, p = self.dim, self.L.shape[0]
                kkt = np.block([
                    [gamma * self.Q + np.eye(n), self.L.T],
                    [self.L, np.zeros((p, p))],
                ])
                try:
                    fac = scipy.linalg.lu_factor(kkt)
                except (scipy.linalg.LinAlgError, ValueError) as exc:
                    raise SingularKktError(
                        f"singular prox system for {self.kind}: {exc}",
                        size=n + p) from exc
                self._cache[gamma] = fac
        return fac

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = self._check_point(z)
        p = self.L.shape[0]
        rhs = np.concatenate([z - gamma * self.q, self.b])
        sol = scipy.linalg.lu_solve(self._factor(gamma), rhs)
        x = sol[:self.dim]
        if p and not np.all(np.isfinite(x)):
            raise SingularKktError("prox system solved to non-finite values",
                                   size=self.dim + p)
        return x

    def to_json(self) -> dict:
        from .linmetric import Matrix
        return {"kind": self.kind, "Q": Matrix(self.Q).to_json(),
                "q": self.q.tolist(), "L": Matrix(self.L).to_json(),
                "b": self.b.tolist()}


class Zero(ProxFn):
    """The identically-zero function; its prox is the identity map."""

    kind = "zero"

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def __call__(self, x: np.ndarray) -> float:
        self._check_point(x)
        return 0.0

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        return self._check_point(z).copy()

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


class IndicatorZero(ProxFn):
    """Indicator of the origin; prox maps everything to 0."""

    kind = "indicator_zero"

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        return 0.0 if not x.size or np.abs(x).max() == 0.0 else np.inf

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        return np.zeros_like(self._check_point(z))

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


class IndicatorAffine(ProxFn):
    """Indicator of {x : L x = b}; prox is Euclidean projection onto it.

    Raises InfeasibleConstraintError at construction when the set is empty
    (b outside the range of L).
    """

    kind = "indicator_affine"

    def __init__(self, l_matrix, b_vector):
        lm = _as_dense(l_matrix)
        bv = np.asarray(b_vector, dtype=float).ravel()
        if lm.ndim != 2 or bv.shape[0] != lm.shape[0]:
            raise DimensionMismatchError("L and b shapes are inconsistent")
        self.L = lm
        self.b = bv
        self.dim = lm.shape[1]
        self._pinv = np.linalg.pinv(lm)
        anchor = self._pinv @ bv
        if np.linalg.norm(lm @ anchor - bv) > 1e-8 * max(
                1.0, float(np.linalg.norm(bv))):
            raise InfeasibleConstraintError(
                "no point satisfies L x = b (b outside range of L)")
        self._anchor = anchor

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        if self.L.shape[0] == 0:
            return 0.0
        resid = np.linalg.norm(self.L @ x - self.b, np.inf)
        return 0.0 if resid <= 1e-9 * max(
            1.0, np.abs(self.b).max(initial=0.0)) else np.inf

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = self._check_point(z)
        return z - self._pinv @ (self.L @ z - self.b)

    def to_json(self) -> dict:
        from .linmetric import Matrix
        return {"kind": self.kind, "L": Matrix(self.L).to_json(),
                "b": self.b.tolist()}


class Box(ProxFn):
    """Indicator of the box [lo, hi]; prox clips coordinatewise."""

    kind = "box"

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise DimensionMismatchError("lo and hi must have equal length")
        if np.any(lo > hi):
            raise ValueError("need lo <= hi elementwise")
        self.lo = lo
        self.hi = hi
        self.dim = lo.shape[0]

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        inside = np.all(x >= self.lo - 1e-12) and np.all(x <= self.hi + 1e-12)
        return 0.0 if inside else np.inf

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        return np.clip(self._check_point(z), self.lo, self.hi)

    def to_json(self) -> dict:
        return {"kind": self.kind, "lo": self.lo.tolist(),
                "hi": self.hi.tolist()}


class WeightedL1(ProxFn):
    """f(x) = sum_i w_i |x_i| with nonnegative weights; prox soft-thresholds."""

    kind = "weighted_l1"

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        self.w = w
        self.dim = w.shape[0]

    def __call__(self, x: np.ndarray) -> float:
        return float(self.w @ np.abs(self._check_point(x)))

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = self._check_point(z)
        return np.sign(z) * np.maximum(np.abs(z) - gamma * self.w, 0.0)

    def to_json(self) -> dict:
        return {"kind": self.kind, "w": self.w.tolist()}


class PwlPenalty(ProxFn):
    """Per-coordinate penalty s * max(0, x - hi, lo - x) (soft band [lo, hi]).

    The prox shrinks toward the band: with t = gamma*s, points beyond the
    band by more than t move in by t, points within t of the band land on
    the nearest edge, and points inside the band stay put.
    """

    kind = "pwl_penalty"

    def __init__(self, lo: float, hi: float, slope: float,
                 dim: int | None = None):
        if not lo <= hi:
            raise ValueError("need lo <= hi")
        if slope < 0:
            raise ValueError("slope must be nonnegative")
        self.lo = float(lo)
        self.hi = float(hi)
        self.slope = float(slope)
        self.dim = dim

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        over = np.maximum(x - self.hi, 0.0)
        under = np.maximum(self.lo - x, 0.0)
        return float(self.slope * np.sum(over + under))

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = self._check_point(z)
        t = gamma * self.slope
        out = z.copy()
        out = np.where(z > self.hi + t, z - t, out)
        out = np.where((z > self.hi) & (z <= self.hi + t), self.hi, out)
        out = np.where(z < self.lo - t, z + t, out)
        out = np.where((z < self.lo) & (z >= self.lo - t), self.lo, out)
        return out

    def to_json(self) -> dict:
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi,
                "slope": self.slope, "dim": self.dim}


class Separable(ProxFn):
    """Sum of catalog members acting on disjoint index ranges.

    ``members`` is a list of (start, stop, fn) covering [0, dim) without
    gaps or overlaps; the prox applies each member prox on its slice.
    """

    kind = "separable"

    def __init__(self, members: list[tuple[int, int, ProxFn]]):
        members = sorted(((int(a), int(b), f) for a, b, f in members),
                         key=lambda m: m[0])
        if not members:
            raise ValueError("Separable needs at least one member")
        pos = 0
        for start, stop, fn in members:
            if start != pos or stop <= start:
                raise ValueError(
                    "member ranges must be disjoint, ascending, and cover "
                    "[0, dim) without gaps")
            if fn.dim is not None and fn.dim != stop - start:
                raise DimensionMismatchError(
                    f"member of kind {fn.kind} has dim {fn.dim}, "
                    f"range has length {stop - start}")
            pos = stop
        self.members = tuple(members)
        self.dim = pos

    def __call__(self, x: np.ndarray) -> float:
        x = self._check_point(x)
        return float(sum(fn(x[a:b]) for a, b, fn in self.members))

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        z = self._check_point(z)
        out = np.empty_like(z)
        for a, b, fn in self.members:
            out[a:b] = fn.prox(gamma, z[a:b])
        return out

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "members": [{"start": a, "stop": b, "fn": fn.to_json()}
                            for a, b, fn in self.members]}


class ConjugateOf(ProxFn):
    """The convex conjugate of a catalog member, prox via Moreau's identity.

    Used to run the splitting engine on dual formulations; not part of the
    JSON wire catalog.
    """

    kind = "conjugate"

    def __init__(self, inner: ProxFn):
        self.inner = inner
        self.dim = inner.dim

    def __call__(self, x: np.ndarray) -> float:
        raise CapabilityError(
            "conjugate values are not evaluable in closed form in general")

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        return self.inner.conjugate_prox(gamma, z)


def dual_prox_d1(f: Quadratic, a, c, query: ProxQuery) -> np.ndarray:
    """Prox of gamma*d1 where d1(mu) = f^*(-A^T mu) + <c, mu>.

    Requires a strictly convex quadratic f (positive definite Q), in which
    case d1 is the quadratic with Hessian A Q^-1 A^T and linear term
    A Q^-1 q + c, and the prox solves
    (gamma A Q^-1 A^T + I) mu = z - gamma (A Q^-1 q + c).
    """
    return dual_quadratic(f, a, c).prox(query.gamma, query.point)


def dual_quadratic(f: Quadratic, a, c) -> Quadratic:
    """The smooth dual term of a strictly convex quadratic, as a Quadratic.

    d1(mu) = 0.5 mu^T (A Q^-1 A^T) mu + (A Q^-1 q + c)^T mu up to an
    additive constant.
    """
    if not isinstance(f, Quadratic):
        raise CapabilityError("dual term needs a quadratic smooth part")
    if not f.is_positive_definite:
        raise CapabilityError(
            "dual prox requires a strongly convex quadratic (Q singular)")
    a = _as_dense(a)
    if a.shape[1] != f.dim:
        raise DimensionMismatchError("A must have as many columns as f's dim")
    c = (np.zeros(a.shape[0]) if c is None
         else np.asarray(c, dtype=float).ravel())
    if c.shape[0] != a.shape[0]:
        raise DimensionMismatchError("c must match A's row count")
    qinv_at = f.solve_shifted(0.0, a.T)
    hess = a @ qinv_at
    lin = a @ scipy.linalg.solve(f.Q, f.q, assume_a="pos") + c
    return Quadratic(0.5 * (hess + hess.T), lin)


def diag_scale(f: ProxFn, d: np.ndarray, sign: int = 1) -> ProxFn:
    """The function t -> f(sign * D^-1 t) for positive diagonal D.

    Every catalog kind stays inside the catalog under this change of
    variables, which is what makes diagonal constraint scalings solvable in
    prox form.
    """
    d = np.asarray(d, dtype=float).ravel()
    if np.any(d <= 0):
        raise ValueError("diagonal entries must be positive")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if f.dim is not None and f.dim != d.shape[0]:
        raise DimensionMismatchError("diagonal length does not match f")
    s = float(sign)
    if isinstance(f, Zero):
        return Zero(d.shape[0])
    if isinstance(f, IndicatorZero):
        return IndicatorZero(d.shape[0])
    if isinstance(f, WeightedL1):
        return WeightedL1(f.w / d)
    if isinstance(f, Box):
        if s > 0:
            return Box(f.lo * d, f.hi * d)
        return Box(-f.hi * d, -f.lo * d)
    if isinstance(f, PwlPenalty):
        if not np.all(d == d[0]):
            members = [(i, i + 1, diag_scale(
                PwlPenalty(f.lo, f.hi, f.slope, 1), d[i:i + 1], sign))
                for i in range(d.shape[0])]
            return Separable(members)
        di = float(d[0])
        if s > 0:
            return PwlPenalty(f.lo * di, f.hi * di, f.slope / di, d.shape[0])
        return PwlPenalty(-f.hi * di, -f.lo * di, f.slope / di, d.shape[0])
    if isinstance(f, Quadratic):
        dinv = 1.0 / d
        return Quadratic(f.Q * np.outer(dinv, dinv), s * f.q * dinv)
    if isinstance(f, QuadraticAffine):
        dinv = 1.0 / d
        return QuadraticAffine(f.Q * np.outer(dinv, dinv), s * f.q * dinv,
                               s * f.L * dinv[None, :], f.b)
    if isinstance(f, IndicatorAffine):
        return IndicatorAffine(s * f.L / d[None, :], f.b)
    if isinstance(f, Separable):
        return Separable([(a, b, diag_scale(fn, d[a:b], sign))
                          for a, b, fn in f.members])
    raise CapabilityError(
        f"no diagonal scaling rule for catalog kind {f.kind!r}")


_KINDS = {}


def _register(cls):
    _KINDS[cls.kind] = cls
    return cls


for _cls in (Quadratic, QuadraticAffine, Zero, IndicatorZero,
             IndicatorAffine, Box, WeightedL1, PwlPenalty, Separable):
    _register(_cls)


def proxfn_from_json(obj: dict) -> ProxFn:
    """Rebuild a catalog member from its tagged-union JSON encoding."""
    from .linmetric import Matrix
    kind = obj.get("kind")
    if kind == "quadratic":
        return Quadratic(Matrix.from_json(obj["Q"]).toarray(),
                         np.asarray(obj["q"], dtype=float))
    if kind == "quadratic_affine":
        return QuadraticAffine(Matrix.from_json(obj["Q"]).toarray(),
                               np.asarray(obj["q"], dtype=float),
                               Matrix.from_json(obj["L"]).toarray(),
                               np.asarray(obj["b"], dtype=float))
    if kind == "zero":
        return Zero(obj.get("dim"))
    if kind == "indicator_zero":
        return IndicatorZero(obj.get("dim"))
    if kind == "indicator_affine":
        return IndicatorAffine(Matrix.from_json(obj["L"]).toarray(),
                               np.asarray(obj["b"], dtype=float))
    if kind == "box":
        return Box(obj["lo"], obj["hi"])
    if kind == "weighted_l1":
        return WeightedL1(obj["w"])
    if kind == "pwl_penalty":
        return PwlPenalty(obj["lo"], obj["hi"], obj["slope"], obj.get("dim"))
    if kind == "separable":
        return Separable([(m["start"], m["stop"], proxfn_from_json(m["fn"]))
                          for m in obj["members"]])
    raise ValueError(f"unknown ProxFn kind {kind!r}")
