"""Finite-dimensional complex sequence spaces and their norms.

Four families are supported: plain p-norm spaces, nested block p-q spaces,
Orlicz spaces with the Luxemburg norm, and weighted Lorentz spaces.  Scalars
are always complex; real input is promoted with zero imaginary parts.  Every
operation is a pure function of immutable inputs, so concurrent use needs no
locking.

Vectors are plain 1-d complex numpy arrays.  Batched variants operate on
(batch, n) arrays row by row; the optimizers in this package lean on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError

__all__ = [
    "LorentzSpace",
    "LpLqSpace",
    "LpSpace",
    "OrliczFunction",
    "OrliczSpace",
    "Rearrangement",
    "SequenceSpace",
    "as_vector",
    "conj_phases",
    "decreasing_rearrangement",
    "dual_space",
    "log_periodic_orlicz",
    "norm",
    "numerical_support",
    "power_orlicz",
    "support",
    "two_piece_orlicz",
    "vector_support",
]


def as_vector(x, n=None):
    """Coerce ``x`` to a 1-d complex array, checking length and finiteness."""
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d coordinate vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"dimension mismatch: expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValueError("non-finite coordinate")
    return v


def support(x):
    """Indices of exactly nonzero coordinates (exact test on stored values)."""
    v = np.asarray(x)
    return tuple(int(i) for i in np.flatnonzero(v != 0))


def numerical_support(x, rel_tol=1e-9):
    """Indices with modulus above ``rel_tol`` times the largest modulus.

    Meant for vectors produced by floating-point computation (matrix columns,
    optimizer output) where exact zero tests would pick up roundoff dust.
    """
    m = np.abs(np.asarray(x))
    top = m.max() if m.size else 0.0
    if top == 0.0:
        return ()
    return tuple(int(i) for i in np.flatnonzero(m > rel_tol * top))


def conj_phases(z):
    """Componentwise conj(z)/|z| with the convention 0/0 = 0."""
    z = np.asarray(z, dtype=complex)
    m = np.abs(z)
    out = np.zeros_like(z)
    nz = m > 0
    out[nz] = np.conj(z[nz]) / m[nz]
    return out


def _p_power_norm(A, p):
    # Row-wise (sum A**p)**(1/p) for a nonnegative (B, k) array, scaled by the
    # row maximum so large p stays well conditioned.
    if p == 1.0:
        return A.sum(axis=1)
    if p == 2.0:
        return np.sqrt((A * A).sum(axis=1))
    m = A.max(axis=1)
    out = np.zeros_like(m)
    nz = m > 0
    if np.any(nz):
        scaled = A[nz] / m[nz, None]
        out[nz] = m[nz] * (scaled**p).sum(axis=1) ** (1.0 / p)
    return out


def _check_exponent(p, name="p"):
    p = float(p)
    if not (1.0 <= p < math.inf):
        raise ValueError(f"{name} must be finite and >= 1, got {p}")
    return p


class SequenceSpace:
    """Base class: a norm on C^n with a 1-unconditional standard basis."""

    kind = "base"
    n: int

    def norm_batch(self, X):
        raise NotImplementedError

    def norm(self, x) -> float:
        v = as_vector(x, self.n)
        return float(self.norm_batch(v[None, :])[0])

    def normalize_rows(self, X):
        """Scale each nonzero row to unit norm; zero rows are left alone."""
        X = np.asarray(X, dtype=complex)
        nm = self.norm_batch(X)
        safe = np.where(nm > 0, nm, 1.0)
        return X / safe[:, None]

    def unit(self, x):
        v = as_vector(x, self.n)
        nm = self.norm(v)
        if nm == 0:
            raise ValueError("cannot normalize the zero vector")
        return v / nm


class LpSpace(SequenceSpace):
    """C^n with the p-power norm."""

    kind = "Lp"

    def __init__(self, p, n):
        self.p = _check_exponent(p)
        self.n = int(n)
        if self.n < 1:
            raise ValueError("n must be positive")

    def norm_batch(self, X):
        return _p_power_norm(np.abs(X), self.p)

    def __repr__(self):
        return f"LpSpace(p={self.p:g}, n={self.n})"


class LpLqSpace(SequenceSpace):
    """Nested space: outer p-norm across blocks, inner q-norm inside blocks."""

    kind = "LpLq"

    def __init__(self, p, q, blocks):
        self.p = _check_exponent(p, "p")
        self.q = _check_exponent(q, "q")
        blocks = tuple(int(b) for b in blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError("blocks must be a nonempty list of positive lengths")
        self.blocks = blocks
        self.n = sum(blocks)
        self._starts = np.concatenate([[0], np.cumsum(blocks)[:-1]]).astype(int)

    @property
    def num_blocks(self):
        return len(self.blocks)

    def block_slices(self):
        return [slice(int(s), int(s) + b) for s, b in zip(self._starts, self.blocks)]

    def block_norms_batch(self, X):
        A = np.abs(X)
        if self.q == 1.0:
            return np.add.reduceat(A, self._starts, axis=1)
        if self.q == 2.0:
            return np.sqrt(np.add.reduceat(A * A, self._starts, axis=1))
        return np.add.reduceat(A**self.q, self._starts, axis=1) ** (1.0 / self.q)

    def block_norms(self, x):
        v = as_vector(x, self.n)
        return self.block_norms_batch(v[None, :])[0]

    def vector_support(self, x):
        """Indices of blocks containing at least one exactly nonzero entry."""
        v = as_vector(x, self.n)
        out = []
        for k, sl in enumerate(self.block_slices()):
            if np.any(v[sl] != 0):
                out.append(k)
        return tuple(out)

    def norm_batch(self, X):
        return _p_power_norm(self.block_norms_batch(np.asarray(X, complex)), self.p)

    def __repr__(self):
        return f"LpLqSpace(p={self.p:g}, q={self.q:g}, blocks={self.blocks})"


class OrliczFunction:
    """A convex gauge for the Luxemburg norm.

    Wraps a vectorized evaluator together with a right derivative and the
    sorted abscissae of its kinks.  Construction validates, on a sampled grid,
    that the function vanishes at zero, is finite, non-decreasing, convex
    (second differences above -1e-12 relative), and strictly positive away
    from zero.
    """

    def __init__(self, fn, derivative=None, breakpoints=(), name="custom", check_upper=2.0):
        self._fn = fn
        self._derivative = derivative
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        self.name = str(name)
        self._validate(float(check_upper))
        self.normalized = abs(float(self(1.0)) - 1.0) <= 1e-9

    def __call__(self, t):
        return self._fn(np.asarray(t, dtype=float))

    def right_derivative(self, t):
        t = np.asarray(t, dtype=float)
        if self._derivative is not None:
            return self._derivative(t)
        h = 1e-7 * np.maximum(1.0, t)
        return (self._fn(t + h) - self._fn(t)) / h

    def _validate(self, upper):
        grid = np.linspace(0.0, upper, 513)
        vals = np.asarray(self._fn(grid), dtype=float)
        if vals.shape != grid.shape:
            raise ValueError("gauge evaluator must be vectorized")
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"gauge '{self.name}' is not finite on [0, {upper:g}]")
        if abs(vals[0]) > 1e-12:
            raise ValueError(f"gauge '{self.name}' must vanish at 0, got {vals[0]!r}")
        scale = max(1.0, float(vals.max()))
        d1 = np.diff(vals)
        if d1.min() < -1e-12 * scale:
            raise ValueError(f"gauge '{self.name}' is not non-decreasing")
        d2 = np.diff(vals, 2)
        if d2.min() < -1e-12 * scale:
            raise ValueError(f"gauge '{self.name}' fails the convexity check")
        if np.any(vals[1:] <= 0):
            raise ValueError(f"gauge '{self.name}' must be strictly positive for t > 0")

    def __repr__(self):
        return f"OrliczFunction({self.name!r})"


def power_orlicz(p):
    """The gauge t**p, normalized at 1."""
    p = _check_exponent(p)

    def fn(t):
        return np.power(t, p)

    def deriv(t):
        if p == 1.0:
            return np.ones_like(t)
        return p * np.power(t, p - 1.0)

    return OrliczFunction(fn, deriv, name=f"t^{p:g}")


def two_piece_orlicz(a):
    """Quadratic up to ``a`` then linear, continuous with slope 1 + a.

    Normalized at 1 for every a in (0, 1); convex because 2a <= 1 + a.
    """
    a = float(a)
    if not (0.0 < a < 1.0):
        raise ValueError("the knee must satisfy 0 < a < 1")

    def fn(t):
        return np.where(t <= a, t * t, (1.0 + a) * t - a)

    def deriv(t):
        # right derivative, so the kink at t = a takes the linear slope
        return np.where(t < a, 2.0 * t, np.full_like(t, 1.0 + a))

    return OrliczFunction(fn, deriv, breakpoints=(a,), name=f"quad-linear(a={a:g})")


def log_periodic_orlicz(p=2.0, gamma=2.0, eps=0.01):
    """t**p modulated by a log-periodic factor exp(eps*sin(2*pi*ln t/ln gamma)).

    Multiplying the argument by any integer power of ``gamma`` scales the value
    by the matching power of gamma**p exactly.  Convexity restricts eps; the
    constructor's grid check rejects values that break it.
    """
    p = _check_exponent(p)
    gamma = float(gamma)
    eps = float(eps)
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    w = math.log(gamma)
    c = 2.0 * math.pi / w

    def fn(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        m = t > 0
        tm = t[m]
        out[m] = tm**p * np.exp(eps * np.sin(c * np.log(tm)))
        return out

    def deriv(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        m = t > 0
        tm = t[m]
        s = np.log(tm)
        out[m] = tm ** (p - 1.0) * np.exp(eps * np.sin(c * s)) * (p + eps * c * np.cos(c * s))
        return out

    return OrliczFunction(fn, deriv, name=f"log-periodic(p={p:g}, gamma={gamma:g}, eps={eps:g})")


def _luxemburg_batch(phi, A, rel_tol=1e-14, max_iter=200):
    # Row-wise Luxemburg norm of the modulus array A: the smallest rho with
    # sum phi(A/rho) <= 1, found by bisection on a bracketed interval.
    B = A.shape[0]
    out = np.zeros(B)
    sup = A.max(axis=1)
    nz = sup > 0
    if not np.any(nz):
        return out
    A = A[nz]
    lo = sup[nz].copy()
    hi = np.maximum(A.sum(axis=1), lo)

    def total(rho):
        return phi(A / rho[:, None]).sum(axis=1)

    for _ in range(64):
        bad = total(lo) < 1.0
        if not np.any(bad):
            break
        lo[bad] *= 0.5
    else:
        raise ValueError("Luxemburg bisection failed to bracket from below (invalid gauge)")
    for _ in range(64):
        bad = total(hi) > 1.0
        if not np.any(bad):
            break
        hi[bad] *= 2.0
    else:
        raise ValueError("Luxemburg bisection failed to bracket from above (invalid gauge)")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        inside = total(mid) <= 1.0
        hi[inside] = mid[inside]
        lo[~inside] = mid[~inside]
        if np.all(hi - lo <= rel_tol * hi):
            break
    out[nz] = hi
    return out


class OrliczSpace(SequenceSpace):
    """C^n under the Luxemburg norm of a convex gauge.

    The norm is the smallest rho > 0 with sum phi(|x_i|/rho) <= 1; the closed
    inequality is used, so the gauge sum evaluated at the norm equals 1 for
    continuous finite gauges.
    """

    kind = "Orlicz"

    def __init__(self, phi, n):
        if not isinstance(phi, OrliczFunction):
            phi = OrliczFunction(phi)
        self.phi = phi
        self.n = int(n)
        if self.n < 1:
            raise ValueError("n must be positive")

    def norm_batch(self, X):
        return _luxemburg_batch(self.phi, np.abs(np.asarray(X, complex)))

    def __repr__(self):
        return f"OrliczSpace({self.phi!r}, n={self.n})"


class LorentzSpace(SequenceSpace):
    """Weighted space: p-power pairing of the decreasing rearrangement with w.

    The weight sequence must be non-increasing with w[0] = 1 and all entries
    strictly positive, which keeps the norm strictly monotone.  Pairing the
    sorted moduli with the sorted weights realizes the supremum over all
    coordinate permutations.
    """

    kind = "Lorentz"

    def __init__(self, w, p):
        w = np.asarray(w, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("w must be a nonempty 1-d weight sequence")
        if abs(w[0] - 1.0) > 1e-12:
            raise ValueError("the leading weight must equal 1")
        if np.any(np.diff(w) > 1e-15):
            raise ValueError("weights must be non-increasing")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        self.w = w.copy()
        self.p = _check_exponent(p)
        self.n = int(w.size)

    def norm_batch(self, X):
        A = np.sort(np.abs(np.asarray(X, complex)), axis=1)[:, ::-1]
        if self.p == 1.0:
            return A @ self.w
        if self.p == 2.0:
            return np.sqrt((A * A) @ self.w)
        return ((A**self.p) @ self.w) ** (1.0 / self.p)

    def __repr__(self):
        return f"LorentzSpace(w={np.array2string(self.w, precision=4)}, p={self.p:g})"


def norm(space, x) -> float:
    """Norm of ``x`` in ``space``; validates dimension and finiteness."""
    return space.norm(x)


def dual_space(space):
    """Conjugate-exponent space for the p and p-q families.

    Orlicz and Lorentz duals have no closed form here; callers fall back to
    numerical estimation over the unit ball instead.
    """
    if isinstance(space, LpSpace):
        if space.p <= 1.0:
            raise CapabilityError("the conjugate exponent of p = 1 is out of scope")
        return LpSpace(space.p / (space.p - 1.0), space.n)
    if isinstance(space, LpLqSpace):
        if space.p <= 1.0 or space.q <= 1.0:
            raise CapabilityError("conjugate exponents require p, q > 1")
        return LpLqSpace(space.p / (space.p - 1.0), space.q / (space.q - 1.0), space.blocks)
    raise CapabilityError(f"no closed-form dual norm for kind '{space.kind}'")


def vector_support(space, x):
    """Block support for block spaces; raises for the scalar families."""
    if isinstance(space, LpLqSpace):
        return space.vector_support(x)
    raise CapabilityError(f"vector support is only defined for block spaces, not '{space.kind}'")


def _round_sig(value, digits):
    if value == 0.0:
        return 0.0
    return float(f"%.{digits}g" % value)


@dataclass
class Rearrangement:
    """Distinct moduli of a vector with their level sets and index windows.

    ``values`` lists the strictly decreasing distinct moduli.  ``level_sets``
    holds, per value, the 0-based coordinate indices carrying it.  Windows are
    the consecutive 0-based position ranges the level sets occupy after
    sorting, so ``windows[j]`` indexes the weight entries matched with level j.
    """

    values: np.ndarray
    level_sets: list = field(default_factory=list)
    cumulative_sizes: list = field(default_factory=list)
    windows: list = field(default_factory=list)

    @property
    def num_levels(self):
        return len(self.level_sets)


def decreasing_rearrangement(x, sig_digits=12):
    """Group the nonzero moduli of ``x`` into decreasing level sets.

    Moduli are considered tied when they agree after rounding to
    ``sig_digits`` significant digits; inputs are expected to be user-given
    rationals where ties are exact.
    """
    v = as_vector(x)
    m = np.abs(v)
    if not np.any(m > 0):
        raise ValueError("the zero vector has no decreasing rearrangement")
    keys = {}
    for i in np.flatnonzero(m > 0):
        keys.setdefault(_round_sig(float(m[i]), sig_digits), []).append(int(i))
    ordered = sorted(keys.items(), key=lambda kv: -kv[0])
    values = []
    level_sets = []
    cum = []
    windows = []
    total = 0
    for _, idxs in ordered:
        idxs = sorted(idxs)
        values.append(float(max(m[idxs])))
        level_sets.append(idxs)
        windows.append(range(total, total + len(idxs)))
        total += len(idxs)
        cum.append(total)
    return Rearrangement(
        values=np.asarray(values),
        level_sets=level_sets,
        cumulative_sizes=cum,
        windows=windows,
    )
