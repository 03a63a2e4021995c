"""Far-field power patterns of a weighted surface, peak search and sidelobe stats.

The pattern projects the aperture field (weights times reference field) onto
the incident steering profile of every grid direction; that projection is the
same per-direction phase factor the downlink tap model applies, so a pattern
peak at a direction means the link actually delivers power there. Grid
evaluation uses factored axis sums and must match the direct per-element
double sum to 1e-9 (the unit tests hold it to that).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .holography import WeightMatrix
from .surface import Direction, ReferenceWaveSpec, SurfaceGeometry, reference_field


@dataclass(frozen=True)
class PatternGrid:
    """Normalized power pattern over a (theta, phi) grid.

    power_db has its maximum at exactly 0 dB; peak_linear is the
    pre-normalization peak power.
    """

    theta_rad: np.ndarray = field(repr=False)
    phi_rad: np.ndarray = field(repr=False)
    power_db: np.ndarray = field(repr=False)
    peak_linear: float = 1.0

    def __post_init__(self):
        t = np.asarray(self.theta_rad, dtype=float)
        p = np.asarray(self.phi_rad, dtype=float)
        if t.ndim != 1 or p.ndim != 1 or t.size == 0 or p.size == 0:
            raise ValueError("pattern axes must be nonempty 1-D arrays")
        if np.any(np.diff(t) <= 0) or np.any(np.diff(p) <= 0):
            raise ValueError("pattern axes must be strictly increasing")
        db = np.asarray(self.power_db, dtype=float)
        if db.shape != (t.size, p.size):
            raise ValueError("power grid shape does not match axes")
        object.__setattr__(self, "theta_rad", t)
        object.__setattr__(self, "phi_rad", p)
        object.__setattr__(self, "power_db", db)

    def linear(self) -> np.ndarray:
        """Normalized linear power (peak 1)."""
        return 10.0 ** (self.power_db / 10.0)

    def value_at(self, direction: Direction) -> float:
        """power_db at the nearest grid point to a direction."""
        it = int(np.argmin(np.abs(self.theta_rad - direction.theta)))
        ip = int(np.argmin(np.abs(self.phi_rad - direction.phi)))
        return float(self.power_db[it, ip])


def default_axes(step_deg: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """theta in [0, 90] deg inclusive, phi in [0, 360) deg, both in radians."""
    theta = np.radians(np.arange(0.0, 90.0 + step_deg / 2, step_deg))
    phi = np.radians(np.arange(0.0, 360.0, step_deg))
    return theta, phi


def _weight_values(weights) -> np.ndarray:
    return weights.values if isinstance(weights, WeightMatrix) else np.asarray(weights)


def array_factor(
    geom: SurfaceGeometry,
    ref: ReferenceWaveSpec,
    weights,
    theta_rad: np.ndarray,
    phi_rad: np.ndarray,
) -> PatternGrid:
    """Normalized far-field power pattern of the weighted, reference-fed surface.

    P(theta, phi) = |sum_{m,n} W(m,n) * E_r(m,n) * exp(-j*k_free*d_mn(theta,phi))|^2,
    normalized to its peak. ``weights`` may be a WeightMatrix or a raw
    nonnegative array (the pattern is invariant to positive scaling).

    Raises:
        ValueError: all-zero weights or empty axes.
    """
    w = _weight_values(weights)
    if w.shape != geom.shape:
        raise ValueError(f"weights shape {w.shape} does not match grid {geom.shape}")
    if not np.any(w):
        raise ValueError("cannot form a pattern from all-zero weights")
    theta = np.asarray(theta_rad, dtype=float)
    phi = np.asarray(phi_rad, dtype=float)
    if theta.size == 0 or phi.size == 0:
        raise ValueError("pattern axes must be nonempty")

    aperture = w * reference_field(geom, ref).values
    x = geom.element_x()
    y = geom.element_y()
    k = geom.k_free
    cos_phi = np.cos(phi)
    sin_phi = np.sin(phi)

    power = np.empty((theta.size, phi.size), dtype=float)
    for it, th in enumerate(theta):
        st = math.sin(th)
        u = st * cos_phi  # (P,)
        v = st * sin_phi
        ay = np.exp(-1j * k * np.outer(y, v))  # (N, P)
        ax = np.exp(-1j * k * np.outer(x, u))  # (M, P)
        f_row = np.sum(ax * (aperture @ ay), axis=0)
        power[it, :] = np.abs(f_row) ** 2

    peak = float(np.max(power))
    with np.errstate(divide="ignore"):
        power_db = 10.0 * np.log10(power / peak)
    return PatternGrid(theta, phi, power_db, peak)


def angular_separation(a: Direction, b: Direction) -> float:
    """Great-circle angle in radians between two directions."""
    dot = float(np.dot(a.unit_vector(), b.unit_vector()))
    return math.acos(min(1.0, max(-1.0, dot)))


class PeakSearchResult(NamedTuple):
    peaks: list[tuple[Direction, float]]
    complete: bool


def find_peaks(
    pattern: PatternGrid, count: int, min_separation_deg: float
) -> PeakSearchResult:
    """Top-k separated local maxima of a pattern, strongest first.

    Local maxima are grid points not below any of their 8 neighbors (the phi
    axis wraps when it spans the full circle). Candidates are taken greedily
    in (-power, theta, phi) order, skipping any candidate closer than
    min_separation_deg (great-circle) to an already accepted one. If fewer
    than ``count`` separated peaks exist, the result carries complete=False.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    db = pattern.power_db
    nt, npnts = db.shape
    phi_step = pattern.phi_rad[1] - pattern.phi_rad[0] if npnts > 1 else 0.0
    phi_wraps = (
        npnts > 2
        and abs((pattern.phi_rad[-1] + phi_step) % (2 * math.pi) - pattern.phi_rad[0])
        < 1e-9
    )

    candidates = []
    for it in range(nt):
        for ip in range(npnts):
            val = db[it, ip]
            is_max = True
            for dt in (-1, 0, 1):
                for dp in (-1, 0, 1):
                    if dt == 0 and dp == 0:
                        continue
                    jt = it + dt
                    jp = ip + dp
                    if jt < 0 or jt >= nt:
                        continue
                    if jp < 0 or jp >= npnts:
                        if not phi_wraps:
                            continue
                        jp %= npnts
                    if db[jt, jp] > val:
                        is_max = False
                        break
                if not is_max:
                    break
            if is_max:
                candidates.append(
                    (float(pattern.theta_rad[it]), float(pattern.phi_rad[ip]), float(val))
                )

    candidates.sort(key=lambda c: (-c[2], c[0], c[1]))
    min_sep = math.radians(min_separation_deg)
    selected: list[tuple[Direction, float]] = []
    for th, ph, val in candidates:
        d = Direction(th, ph)
        if all(angular_separation(d, s) >= min_sep for s, _ in selected):
            selected.append((d, val))
        if len(selected) == count:
            break
    return PeakSearchResult(selected, complete=len(selected) == count)


def sidelobe_metrics(
    pattern: PatternGrid, mainlobe_dirs: list[Direction], guard_deg: float
) -> dict[str, float]:
    """Peak and mean sidelobe level outside guard cones around the mainlobes.

    A grid point is a sidelobe point if its great-circle distance to every
    mainlobe direction exceeds guard_deg. The mean is taken over linear
    power and converted to dB.

    Raises:
        ValueError: nonpositive guard, or guard cones covering the whole grid.
    """
    if guard_deg <= 0:
        raise ValueError("guard_deg must be positive")
    guard = math.radians(guard_deg)
    ct = np.cos(pattern.theta_rad)[:, None]
    st = np.sin(pattern.theta_rad)[:, None]
    cp = np.cos(pattern.phi_rad)[None, :]
    sp = np.sin(pattern.phi_rad)[None, :]
    mask = np.ones(pattern.power_db.shape, dtype=bool)
    for d in mainlobe_dirs:
        ux, uy, uz = d.unit_vector()
        cos_sep = st * cp * ux + st * sp * uy + ct * uz
        mask &= np.arccos(np.clip(cos_sep, -1.0, 1.0)) > guard
    if not np.any(mask):
        raise ValueError("guard regions cover the entire pattern grid")
    linear = pattern.linear()[mask]
    return {
        "peak_sidelobe_db": float(np.max(pattern.power_db[mask])),
        "mean_sidelobe_db": float(10.0 * np.log10(np.mean(linear))),
    }


def export_pattern_csv(pattern: PatternGrid, path) -> None:
    """Write `theta_deg,phi_deg,power_db` rows, row-major over theta then phi."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("theta_deg,phi_deg,power_db\n")
        for it, th in enumerate(np.degrees(pattern.theta_rad)):
            for ip, ph in enumerate(np.degrees(pattern.phi_rad)):
                fh.write(f"{th:.9g},{ph:.9g},{pattern.power_db[it, ip]:.9g}\n")
