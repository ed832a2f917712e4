"""Intensity-weighted circular statistics of complex mode phases.

Phases enter as phi = (atan2(Im psi, Re psi) + 2pi) mod 2pi with weights
|psi|^2; everything downstream (resultants R_k, the doubling map, the
mu_2 alignment, lobe imbalance, probability current) is built to be invariant
under a global phase rotation of the mode.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, field

from .models import Mode, neighbor_view


class EmptySet(Exception):
    """No samples survive: nothing to take statistics of."""


class DegenerateAlignment(Exception):
    """R_2 ~ 0: the doubled distribution has no preferred direction, so the
    mu_2 alignment is undefined. Callers fall back to zero offset and flag."""


def fold_sum(values) -> complex:
    # strict left-to-right accumulation; never a pairwise or parallel
    # reduction, so published numbers are bitwise reproducible
    return sum(values.tolist())


@dataclass
class WeightedPhaseSet:
    phases: np.ndarray
    weights: np.ndarray
    total_weight: float = field(init=False)

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.phases.shape != self.weights.shape or self.phases.ndim != 1:
            raise ValueError("phases and weights must be equal-length 1-D")
        if self.phases.size == 0:
            raise EmptySet("no phase samples")
        if np.any(self.phases < 0.0) or np.any(self.phases >= 2.0 * np.pi):
            raise ValueError("phases must lie in [0, 2pi)")
        if np.any(self.weights < 0.0):
            raise ValueError("weights must be nonnegative")
        self.total_weight = float(fold_sum(self.weights))
        if not self.total_weight > 0.0:
            raise EmptySet("total weight is zero")


@dataclass(frozen=True)
class Resultant:
    k: int
    Z_k: complex
    R_k: float
    mu_k: float


@dataclass(frozen=True)
class AlignedAngles:
    theta_shift: np.ndarray
    N_bins: int
    mu2: float


@dataclass(frozen=True)
class CurrentField:
    jx: np.ndarray
    jy: np.ndarray
    h: float

    def magnitude(self) -> np.ndarray:
        return np.sqrt(self.jx**2 + self.jy**2)


def extract_phases(m: Mode, node_cutoff: float = 1e-12) -> WeightedPhaseSet:
    """Principal phases and intensity weights, nodal points excluded.

    A sample is kept when its intensity exceeds node_cutoff times the peak
    intensity; the cutoff only needs to guard atan2(0, 0) at true nodes.
    """
    if not (0.0 <= node_cutoff < 1.0):
        raise ValueError("node_cutoff must lie in [0, 1)")
    w = np.abs(m.psi) ** 2
    peak = w.max() if w.size else 0.0
    keep = w > node_cutoff * peak
    if not keep.any():
        raise EmptySet("every sample fell below the node cutoff")
    psi = m.psi[keep]
    phi = np.mod(np.arctan2(psi.imag, psi.real) + 2.0 * np.pi, 2.0 * np.pi)
    return WeightedPhaseSet(phi, w[keep])


def _wrap(angles: np.ndarray) -> np.ndarray:
    """mod 2pi, with the rounding alias at exactly 2pi sent back to 0.

    np.mod of a tiny negative input rounds up to 2pi itself, which is the
    same direction but outside the [0, 2pi) contract.
    """
    out = np.mod(angles, 2.0 * np.pi)
    out[out >= 2.0 * np.pi] = 0.0
    return out


def resultant(s: WeightedPhaseSet, k: int) -> Resultant:
    """Z_k = sum w e^{i k phi} / sum w, accumulated in index order."""
    if k < 1:
        raise ValueError("order k must be >= 1")
    z = fold_sum(s.weights * np.exp(1j * k * s.phases)) / s.total_weight
    return Resultant(k, complex(z), min(abs(z), 1.0), float(np.angle(z)))


def doubled_align(s: WeightedPhaseSet, N_bins: int) -> AlignedAngles:
    """Doubled angles theta = 2 phi mod 2pi, rotated so the mean doubled
    direction mu_2 sits at the half-bin center: (theta - mu_2 + D/2) mod 2pi."""
    if N_bins < 2:
        raise ValueError("N_bins must be >= 2")
    r2 = resultant(s, 2)
    if abs(r2.Z_k) < 1e-12:
        raise DegenerateAlignment(
            f"|Z_2| = {abs(r2.Z_k):.3e}: no preferred doubled direction")
    delta = 2.0 * np.pi / N_bins
    theta = _wrap(2.0 * s.phases)
    shifted = _wrap(theta - r2.mu_k + delta / 2.0)
    return AlignedAngles(shifted, N_bins, r2.mu_k)


def lobe_imbalance(s: WeightedPhaseSet) -> float:
    """R_1 of the two-lobe split: |W+ - W-| / (W+ + W-).

    Lobes are decided on phi itself, so the only samples excluded are the
    exactly representable cos phi = 0 angles pi/2 and 3pi/2.
    """
    phi = s.phases
    half = np.pi / 2.0
    plus = (phi < half) | (phi > 3.0 * half)
    minus = (phi > half) & (phi < 3.0 * half)
    if not plus.any() and not minus.any():
        raise EmptySet("both lobes empty")
    wp = float(fold_sum(s.weights * plus))
    wm = float(fold_sum(s.weights * minus))
    return abs(wp - wm) / (wp + wm)


def aligned_lobe_imbalance(s: WeightedPhaseSet) -> float:
    """Lobe imbalance after rotating phases by -mu_2/2.

    The alignment pins the dominant phase pair to the real axis first, which
    is what makes the split rotation-invariant: a global phase moves mu_2
    along with the samples (up to a half-turn, which only swaps the lobes).
    """
    r2 = resultant(s, 2)
    if abs(r2.Z_k) < 1e-12:
        raise DegenerateAlignment(
            f"|Z_2| = {abs(r2.Z_k):.3e}: lobe alignment undefined")
    rotated = WeightedPhaseSet(
        _wrap(s.phases - r2.mu_k / 2.0), s.weights)
    return lobe_imbalance(rotated)


def current_field(m: Mode) -> CurrentField:
    """Probability current j = Im(psi* grad psi) on the interior points.

    Central differences where both neighbors are interior, one-sided at mask
    edges, zero where a direction has no interior neighbor at all.
    """
    g = m.geometry
    if g is None:
        raise ValueError("current is defined on grid modes only")
    G = g.embed(m.psi)
    mask = g.interior_mask
    h = g.h
    center = m.psi
    out = []
    for dx, dy in ((1, 0), (0, 1)):
        fwd = neighbor_view(mask, dx, dy, False)[mask]
        bwd = neighbor_view(mask, -dx, -dy, False)[mask]
        vf = neighbor_view(G, dx, dy, 0.0)[mask]
        vb = neighbor_view(G, -dx, -dy, 0.0)[mask]
        grad = np.where(
            fwd & bwd, (vf - vb) / (2.0 * h),
            np.where(fwd, (vf - center) / h,
                     np.where(bwd, (center - vb) / h, 0.0)))
        out.append((np.conj(center) * grad).imag)
    return CurrentField(out[0], out[1], h)
