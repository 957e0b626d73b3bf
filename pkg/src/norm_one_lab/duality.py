"""Norming functionals and duality maps for the four space families.

A norming functional of a nonzero vector z is a dual element f with dual norm
one and f(z) = ||z||, where the pairing is the plain coordinate sum
<f, x> = sum_i f_i x_i (bilinear, no conjugation).  Closed forms are used for
every family; ``verify_norming`` checks any candidate against the definition
numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError
from .optimize import dual_norm_lower_bound
from .spaces import (
    LorentzSpace,
    LpLqSpace,
    LpSpace,
    OrliczSpace,
    as_vector,
    conj_phases,
    decreasing_rearrangement,
    dual_space,
)

__all__ = [
    "NormingReport",
    "duality_map",
    "inverse_duality_map",
    "norming_functional",
    "pairing",
    "verify_norming",
]


def pairing(f, x) -> complex:
    """Bilinear dual pairing sum_i f_i x_i."""
    return complex(np.asarray(f, dtype=complex) @ np.asarray(x, dtype=complex))


def _lp_functional(p, z, nm):
    t = np.abs(z) / nm
    return np.power(t, p - 1.0) * conj_phases(z)


def _lplq_functional(space, z, nm):
    m = np.abs(z)
    bn = space.block_norms(z)
    scale = np.zeros_like(bn)
    nz = bn > 0
    scale[nz] = bn[nz] ** (space.p - space.q)
    f = np.zeros_like(z)
    for k, sl in enumerate(space.block_slices()):
        if not nz[k]:
            continue
        mk = m[sl]
        radial = np.zeros_like(mk)
        pos = mk > 0
        radial[pos] = mk[pos] ** (space.q - 1.0)
        f[sl] = scale[k] * radial * conj_phases(z[sl])
    return f * nm ** (1.0 - space.p)


def _orlicz_functional(space, z, nm):
    m = np.abs(z)
    t = m / nm
    d = space.phi.right_derivative(t)
    raw = d * conj_phases(z)
    weight = float((d * m).sum())
    if weight <= 0:
        raise ValueError("gauge derivative vanished on the support; cannot normalize")
    kink = False
    for b in space.phi.breakpoints:
        if np.any(np.abs(t[m > 0] - b) <= 1e-12 * max(1.0, b)):
            kink = True
            break
    return raw * (nm / weight), kink


def _lorentz_functional(space, z, nm):
    rearr = decreasing_rearrangement(z)
    ph = conj_phases(z)
    f = np.zeros_like(z)
    for value, idxs, window in zip(rearr.values, rearr.level_sets, rearr.windows):
        mean_w = float(space.w[list(window)].mean())
        mag = (value / nm) ** (space.p - 1.0) * mean_w
        f[idxs] = mag * ph[idxs]
    return f


def norming_functional(space, z, return_info=False):
    """Closed-form norming functional of a nonzero vector.

    For the p and p-q families the functional is the unique one whenever the
    exponents exceed 1; at p = 1 or q = 1 the same formula still returns a
    valid selection.  For Orlicz spaces the right derivative of the gauge is
    used at kinks, and the result is rescaled so the pairing matches the norm
    exactly.  For Lorentz spaces ties are resolved by averaging the weights
    over each level window, a canonical choice among the valid selections.

    With ``return_info=True`` also returns a dict; for Orlicz spaces it
    carries ``subdifferential_choice``, set when some modulus ratio sits
    exactly on a kink of the gauge.
    """
    z = as_vector(z, space.n)
    nm = space.norm(z)
    if nm == 0:
        raise ValueError("the zero vector has no norming functional")
    info = {"kind": space.kind}
    if isinstance(space, LpSpace):
        f = _lp_functional(space.p, z, nm)
    elif isinstance(space, LpLqSpace):
        f = _lplq_functional(space, z, nm)
    elif isinstance(space, OrliczSpace):
        f, kink = _orlicz_functional(space, z, nm)
        info["subdifferential_choice"] = kink
    elif isinstance(space, LorentzSpace):
        f = _lorentz_functional(space, z, nm)
    else:
        raise CapabilityError(f"no norming functional formula for kind '{space.kind}'")
    if return_info:
        return f, info
    return f


@dataclass
class NormingReport:
    """Numeric evidence that a functional norms a vector."""

    pairing_err: float
    dual_norm_estimate: float
    analytic_dual_norm: float | None = None
    multistart_estimate: float | None = None


def verify_norming(space, z, f, restarts=64, seed=0, multistart="auto"):
    """Check the defining equalities of a norming functional numerically.

    Reports the pairing error |<f, z> - ||z||| and an estimate of the dual
    norm of f, taken as the maximum of the conjugate-exponent dual norm (when
    a closed form exists) and a multistart maximization of |<f, u>| over the
    unit sphere.  With ``multistart="auto"`` the maximization is skipped when
    the analytic dual norm is available.
    """
    z = as_vector(z, space.n)
    f = as_vector(f, space.n)
    nm = space.norm(z)
    perr = abs(pairing(f, z) - nm)
    analytic = None
    try:
        analytic = dual_space(space).norm(f)
    except CapabilityError:
        pass
    ms = None
    if multistart is True or (multistart == "auto" and analytic is None):
        ms = dual_norm_lower_bound(space, f, restarts=restarts, seed=seed)
    candidates = [v for v in (analytic, ms) if v is not None]
    return NormingReport(
        pairing_err=float(perr),
        dual_norm_estimate=float(max(candidates)),
        analytic_dual_norm=analytic,
        multistart_estimate=ms,
    )


def duality_map(space, y):
    """J(y) = ||y|| times a norming functional of y, with J(0) = 0."""
    y = as_vector(y, space.n)
    nm = space.norm(y)
    if nm == 0:
        return np.zeros(space.n, dtype=complex)
    return nm * norming_functional(space, y)


def inverse_duality_map(space, f):
    """The unique y with J(y) = f, for smooth strictly convex p / p-q spaces.

    Applies the conjugate space's norming formula to f and rescales by the
    dual norm; round-trips with :func:`duality_map` to within roundoff.
    """
    if isinstance(space, LpSpace):
        if space.p <= 1.0:
            raise CapabilityError("inverting the duality map requires p > 1")
    elif isinstance(space, LpLqSpace):
        if space.p <= 1.0 or space.q <= 1.0:
            raise CapabilityError("inverting the duality map requires p, q > 1")
    else:
        raise CapabilityError(
            f"no inverse duality map for kind '{space.kind}'; handle it numerically"
        )
    f = as_vector(f, space.n)
    dual = dual_space(space)
    nf = dual.norm(f)
    if nf == 0:
        return np.zeros(space.n, dtype=complex)
    return nf * norming_functional(dual, f)
