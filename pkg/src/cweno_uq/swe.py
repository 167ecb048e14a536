"""Second-order central-upwind finite volumes for the 1-D Saint-Venant system.

The conserved variables are the water surface ``w = h + Z`` and the
discharge ``hu``. The bottom is sampled at cell interfaces and taken
piecewise linear, which together with the source quadrature below keeps
lake-at-rest states steady to round-off. Piecewise-linear reconstruction
uses the generalized minmod limiter, interface depths are kept
non-negative by the usual surface correction, and time stepping is
two-stage SSP Runge-Kutta with an adaptive CFL step.

Batches of independent runs (one per collocation point) are stacked along
a leading axis. Each member keeps its own clock and time step, so a
batched run reproduces the corresponding single runs.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SweConfig",
    "SweState",
    "UnsupportedConfigurationError",
    "NegativeDepthError",
    "example6_topography",
    "dam_break_initial",
    "example7_initial",
    "run_dam_break",
    "run_batch",
    "solve",
    "thread_count",
]

NGHOST = 2


class UnsupportedConfigurationError(ValueError):
    pass


class NegativeDepthError(RuntimeError):
    pass


def thread_count() -> int:
    """Worker cap from ``CWENO_UQ_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("CWENO_UQ_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"CWENO_UQ_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("CWENO_UQ_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


@dataclass(frozen=True)
class SweConfig:
    x_lo: float = -1.0
    x_hi: float = 1.0
    cells: int = 800
    g: float = 1.0
    cfl: float = 0.4
    theta: float = 1.3
    final_time: float = 0.8
    h_min: float | None = None

    def __post_init__(self):
        if self.cells < 2:
            raise ValueError("the solver needs at least two cells")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty spatial domain")
        if not 0.0 < self.cfl <= 0.5:
            raise ValueError(f"CFL number must lie in (0, 0.5], got {self.cfl}")
        if not 1.0 <= self.theta <= 2.0:
            raise ValueError(f"minmod parameter must lie in [1, 2], got {self.theta}")
        if not self.final_time > 0:
            raise ValueError("final time must be positive")
        if self.g <= 0:
            raise ValueError("gravity must be positive")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.cells

    @property
    def dry_tolerance(self) -> float:
        return 1e-8 * self.dx if self.h_min is None else self.h_min

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + self.dx * (np.arange(self.cells) + 0.5)

    @property
    def interfaces(self) -> np.ndarray:
        return self.x_lo + self.dx * np.arange(self.cells + 1)

    def ghost_interfaces(self) -> np.ndarray:
        """Interfaces of the mesh extended by the ghost cells."""
        return self.x_lo + self.dx * np.arange(-NGHOST, self.cells + NGHOST + 1)


@dataclass(frozen=True)
class SweState:
    """Cell averages of ``w`` and ``hu`` with a leading batch shape, plus interface bottom."""

    x: np.ndarray
    w: np.ndarray
    hu: np.ndarray
    z_interfaces: np.ndarray
    time: float = 0.0

    @property
    def z(self) -> np.ndarray:
        return 0.5 * (self.z_interfaces[..., 1:] + self.z_interfaces[..., :-1])

    @property
    def h(self) -> np.ndarray:
        return self.w - self.z

    def to_csv(self, path, member: int | tuple[int, ...] = ()) -> None:
        """Write one run as CSV with columns ``x, w, hu, Z``."""
        w, hu, z = (np.asarray(a)[member] for a in (self.w, self.hu, self.z))
        with open(path, "w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh)
            out.writerow(["x", "w", "hu", "Z"])
            for row in zip(self.x, w, hu, z):
                out.writerow([repr(float(v)) for v in row])


# {{{ study configurations


def example6_topography(x, xi):
    """Bottom with a cosine hump on ``|x| < 0.2``, lifted by ``0.125 * xi``."""
    x = np.asarray(x, dtype=float)
    hump = 0.125 * (np.cos(5.0 * np.pi * x) + 2.0)
    return 0.125 * np.asarray(xi, dtype=float) + np.where(np.abs(x) < 0.2, hump, 0.125)


def dam_break_initial(x, position=0.0):
    """``w = 1`` left of ``position``, ``0.5`` right of it, fluid at rest."""
    x = np.asarray(x, dtype=float)
    w = np.where(x < position, 1.0, 0.5)
    return w, np.zeros_like(w)


def example7_initial(x, eta):
    """Dam break with the discontinuity moved to ``x = 0.1 * eta``."""
    return dam_break_initial(x, 0.1 * eta)


# }}}


# {{{ scheme


def _minmod3(a, b, c):
    lo = np.minimum(np.minimum(a, b), c)
    hi = np.maximum(np.maximum(a, b), c)
    return np.where(lo > 0, lo, np.where(hi < 0, hi, 0.0))


def _slopes(q, theta):
    """Limited slope times dx for the cells ``1..n-2`` of ``q[..., n]``."""
    left = q[..., 1:-1] - q[..., :-2]
    right = q[..., 2:] - q[..., 1:-1]
    return _minmod3(theta * left, 0.5 * (left + right), theta * right)


def _pad(q):
    return np.concatenate([q[..., :1], q[..., :1], q, q[..., -1:], q[..., -1:]], axis=-1)


def _rhs(w, hu, zi, dx, g, theta, hmin):
    """Semi-discrete right-hand side and the largest local speed per member.

    ``zi`` holds the bottom at the interfaces of the ghost-extended mesh.
    """
    W, HU = _pad(w), _pad(hu)
    Wc, HUc = W[..., 1:-1], HU[..., 1:-1]
    sw, shu = _slopes(W, theta), _slopes(HU, theta)
    wE, wW = Wc + 0.5 * sw, Wc - 0.5 * sw
    zE, zW = zi[..., 2:-1], zi[..., 1:-2]

    # keep interface depths non-negative
    low = wE < zE
    wE = np.where(low, zE, wE)
    wW = np.where(low, 2.0 * Wc - zE, wW)
    low = wW < zW
    wW = np.where(low, zW, wW)
    wE = np.where(low, 2.0 * Wc - zW, wE)

    huE, huW = HUc + 0.5 * shu, HUc - 0.5 * shu

    zf = zi[..., 2:-2]
    wm, wp = wE[..., :-1], wW[..., 1:]
    hm = np.maximum(wm - zf, 0.0)
    hp = np.maximum(wp - zf, 0.0)
    hmin2 = hmin * hmin
    um = 2.0 * hm * huE[..., :-1] / (hm * hm + np.maximum(hm * hm, hmin2))
    up = 2.0 * hp * huW[..., 1:] / (hp * hp + np.maximum(hp * hp, hmin2))
    qm, qp = hm * um, hp * up

    cm, cp = np.sqrt(g * hm), np.sqrt(g * hp)
    ap = np.maximum(np.maximum(up + cp, um + cm), 0.0)
    am = np.minimum(np.minimum(up - cp, um - cm), 0.0)
    denom = ap - am
    ok = denom > 1e-14
    inv = np.where(ok, 1.0 / np.where(ok, denom, 1.0), 0.0)
    cross = ap * am * inv

    f2m = qm * um + 0.5 * g * hm * hm
    f2p = qp * up + 0.5 * g * hp * hp
    H1 = (ap * qm - am * qp) * inv + cross * (wp - wm)
    H2 = (ap * f2m - am * f2p) * inv + cross * (qp - qm)

    inner = slice(1, -1)
    hbar = 0.5 * ((wE[..., inner] - zE[..., inner]) + (wW[..., inner] - zW[..., inner]))
    source = -g * hbar * (zE[..., inner] - zW[..., inner]) / dx

    dw = -(H1[..., 1:] - H1[..., :-1]) / dx
    dhu = -(H2[..., 1:] - H2[..., :-1]) / dx + source
    amax = np.max(np.maximum(ap, -am), axis=-1)
    return dw, dhu, amax


def _solve_block(config: SweConfig, w, hu, zi, max_steps):
    dx, g, theta = config.dx, config.g, config.theta
    hmin = config.dry_tolerance
    T = config.final_time
    zc = 0.5 * (zi[..., NGHOST + 1 : -NGHOST] + zi[..., NGHOST : -NGHOST - 1])
    t = np.zeros(w.shape[:-1])
    steps = 0
    while np.any(t < T):
        dw, dhu, amax = _rhs(w, hu, zi, dx, g, theta, hmin)
        with np.errstate(divide="ignore"):
            dt = np.where(amax > 0, config.cfl * dx / amax, np.inf)
        dt = np.minimum(dt, T - t)
        dt = np.where(t < T, dt, 0.0)[..., None]

        w1, hu1 = w + dt * dw, hu + dt * dhu
        dw, dhu, _ = _rhs(w1, hu1, zi, dx, g, theta, hmin)
        w = 0.5 * (w + w1 + dt * dw)
        hu = 0.5 * (hu + hu1 + dt * dhu)

        depth = w - zc
        if np.any(depth < -1e-10) or not np.all(np.isfinite(w)):
            bad = np.unravel_index(np.argmin(np.where(np.isfinite(depth), depth, -np.inf)), depth.shape)
            raise NegativeDepthError(
                f"negative depth {depth[bad]:.3e} at x = {config.centers[bad[-1]]:.5f} "
                f"(member {bad[:-1]}, t = {float(t[bad[:-1]]):.5f})"
            )
        w = np.maximum(w, zc)

        t = np.where(dt[..., 0] >= T - t, T, t + dt[..., 0])
        steps += 1
        if steps > max_steps:
            raise RuntimeError(f"no convergence to T = {T} within {max_steps} steps")
    return w, hu


def solve(config: SweConfig, w0, hu0, z_ghost_interfaces, max_steps: int = 10**6):
    """Evolve cell averages ``w0, hu0`` (batch + (N,)) to the final time.

    ``z_ghost_interfaces`` holds the bottom at the ``N + 5`` interfaces of
    the ghost-extended mesh. Members of the batch are split among up to
    ``thread_count()`` workers.
    """
    zi = np.asarray(z_ghost_interfaces, dtype=float)
    w0 = np.asarray(w0, dtype=float)
    hu0 = np.asarray(hu0, dtype=float)
    N = config.cells
    if w0.shape[-1] != N or hu0.shape != w0.shape:
        raise ValueError(f"initial arrays must have {N} cells on the last axis")
    zi = np.broadcast_to(zi, w0.shape[:-1] + (N + 2 * NGHOST + 1,))
    zc = 0.5 * (zi[..., NGHOST + 1 : -NGHOST] + zi[..., NGHOST : -NGHOST - 1])
    if np.any(w0 - zc < config.dry_tolerance):
        raise UnsupportedConfigurationError("initial data contains dry cells")

    batch = w0.shape[:-1]
    w0, hu0 = w0.reshape(-1, N), hu0.reshape(-1, N)
    zi = zi.reshape(-1, zi.shape[-1])
    B = w0.shape[0]
    workers = min(thread_count(), B)
    if workers <= 1:
        w, hu = _solve_block(config, w0, hu0, zi, max_steps)
    else:
        parts = np.array_split(np.arange(B), workers)
        with ThreadPoolExecutor(workers) as pool:
            done = list(pool.map(lambda p: _solve_block(config, w0[p], hu0[p], zi[p], max_steps), parts))
        w = np.concatenate([d[0] for d in done])
        hu = np.concatenate([d[1] for d in done])
    return w.reshape(batch + (N,)), hu.reshape(batch + (N,))


def run_batch(
    config: SweConfig,
    topographies: Sequence[Callable],
    initials: Sequence[Callable],
) -> SweState:
    """Solve one run per ``(topography, initial)`` pair; returns a batched state."""
    if len(topographies) != len(initials):
        raise ValueError("one initial condition per topography is required")
    xg = config.ghost_interfaces()
    x = config.centers
    zi = np.stack([np.broadcast_to(np.asarray(f(xg), dtype=float), xg.shape) for f in topographies])
    w0, hu0 = [], []
    for zrow, init in zip(zi, initials):
        w, u = init(x)
        zc = 0.5 * (zrow[NGHOST + 1 : -NGHOST] + zrow[NGHOST : -NGHOST - 1])
        w = np.broadcast_to(np.asarray(w, dtype=float), x.shape)
        w0.append(w)
        hu0.append((w - zc) * np.broadcast_to(np.asarray(u, dtype=float), x.shape))
    w, hu = solve(config, np.stack(w0), np.stack(hu0), zi)
    return SweState(x, w, hu, zi[:, NGHOST:-NGHOST], config.final_time)


def run_dam_break(config: SweConfig, topography: Callable, initial: Callable) -> SweState:
    """Single run: ``topography(x) -> Z`` and ``initial(x) -> (w, u)``."""
    state = run_batch(config, [topography], [initial])
    return SweState(state.x, state.w[0], state.hu[0], state.z_interfaces[0], state.time)


# }}}
