"""Time-domain integration of the coupled array.

Fixed-step classical 4th-order integration of the mass-normalized
second-order dynamics, with the quadratic energy and the synchronization
error recorded at every step.  Also constructs the explicit periodic
trajectories that certify a failed synchronization verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criteria import subspace_analysis
from .errors import InvalidInputError
from .linalg import orthonormal_columns, sym_eig
from .model import ArraySystem, array_stiffness

# RK4 keeps purely oscillatory modes stable up to |omega * dt| = 2*sqrt(2);
# user-supplied steps are rejected beyond this fraction of that limit.
_STABILITY_LIMIT = 2.5


@dataclass(frozen=True)
class SimulationTrace:
    """One integrated trajectory on a uniform time grid.

    ``sync_error[k]`` is the distance of the position state from the
    synchronous subspace (all oscillators equal) at ``times[k]``;
    ``energy`` is the quadratic energy driving the dissipation argument.
    """

    times: np.ndarray       # (m,)
    positions: np.ndarray   # (m, qn) mass-normalized positions
    velocities: np.ndarray  # (m, qn)
    energy: np.ndarray      # (m,)
    sync_error: np.ndarray  # (m,)
    dt: float
    epsilon: float
    seed: int | None = None

    def to_csv(self, path):
        """Write the trace as CSV with 17 significant digits per number."""
        qn = self.positions.shape[1]
        header = ("t,e,W,"
                  + ",".join(f"z_{i + 1}" for i in range(qn)) + ","
                  + ",".join(f"v_{i + 1}" for i in range(qn)))
        with open(path, "w", newline="") as fh:
            if self.seed is not None:
                fh.write(f"# seed={self.seed}\n")
            fh.write(header + "\n")
            for k in range(self.times.size):
                row = [self.times[k], self.sync_error[k], self.energy[k],
                       *self.positions[k], *self.velocities[k]]
                fh.write(",".join(format(float(x), ".17g") for x in row) + "\n")


@dataclass(frozen=True)
class CounterexampleMode:
    """A periodic, non-synchronizing solution of the array dynamics.

    Starting from position ``shape`` at rest, the array oscillates as
    ``cos(omega t) * shape`` forever; ``shape`` lies outside the
    synchronous subspace, so the synchronization error returns to its
    initial value every ``period``.
    """

    omega: float
    shape: np.ndarray    # (qn,) real unit vector
    period: float


def sync_error(z, q, n) -> float:
    """Distance of a stacked position vector from the synchronous subspace."""
    block = np.reshape(z, (q, n))
    return float(np.linalg.norm(block - block.mean(axis=0)))


def energy(sys: ArraySystem, z, zdot, eps=None) -> float:
    """Quadratic energy: half the position-coupling form plus kinetic term."""
    s = array_stiffness(sys, eps)
    z = np.asarray(z, dtype=float).ravel()
    zdot = np.asarray(zdot, dtype=float).ravel()
    if z.size != s.shape[0] or zdot.size != s.shape[0]:
        raise InvalidInputError(
            f"state dimension must be {s.shape[0]}, got {z.size} and {zdot.size}")
    return float(0.5 * (z @ (s @ z)) + 0.5 * (zdot @ zdot))


def _omega_max(sys, eps):
    s = array_stiffness(sys, eps)
    svals, _ = sym_eig(s)
    ld_norm = 0.0
    if np.any(sys.lap_dissipative):
        dvals, _ = sym_eig(sys.lap_dissipative)
        ld_norm = max(abs(dvals[0]), abs(dvals[-1]))
    return math.sqrt(max(svals[-1], 0.0)) + 2.0 * ld_norm


def default_time_step(sys: ArraySystem, eps=None) -> float:
    """Conservative step size: resolves the fastest mode by a factor of ten."""
    return min(0.01, 0.1 / _omega_max(sys, eps))


def integrate(sys: ArraySystem, z0, v0, t_final, eps=None, dt=None,
              seed=None) -> SimulationTrace:
    """Integrate the array from ``(z0, v0)`` up to at least ``t_final``.

    Classical fixed-step 4th-order integration of the first-order form of
    the mass-normalized dynamics.  ``dt`` defaults to
    :func:`default_time_step`; steps beyond the stability limit are
    rejected with a suggested value.
    """
    e = sys.graph.epsilon if eps is None else float(eps)
    s = array_stiffness(sys, e)
    ld = sys.lap_dissipative
    dim = s.shape[0]
    z = np.asarray(z0, dtype=float).ravel().copy()
    v = np.asarray(v0, dtype=float).ravel().copy()
    if z.size != dim or v.size != dim:
        raise InvalidInputError(
            f"state dimension must be {dim}, got {z.size} and {v.size}")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(v))):
        raise InvalidInputError("initial state must be finite")
    omega_max = _omega_max(sys, e)
    if dt is None:
        dt = min(0.01, 0.1 / omega_max)
    dt = float(dt)
    if not np.isfinite(dt) or dt <= 0.0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if omega_max > 0.0 and dt > _STABILITY_LIMIT / omega_max:
        raise InvalidInputError(
            f"dt={dt:.6g} exceeds the stability bound "
            f"{_STABILITY_LIMIT / omega_max:.6g}; "
            f"try dt={min(0.01, 0.1 / omega_max):.6g}")
    t_final = float(t_final)
    if t_final < dt:
        raise InvalidInputError(f"t_final must be at least dt={dt:.6g}")
    steps = max(1, int(math.ceil(t_final / dt - 1e-9)))

    q, n = sys.q, sys.n
    times = dt * np.arange(steps + 1)
    positions = np.empty((steps + 1, dim))
    velocities = np.empty((steps + 1, dim))
    energies = np.empty(steps + 1)
    errors = np.empty(steps + 1)

    def record(k, z, v):
        positions[k] = z
        velocities[k] = v
        energies[k] = 0.5 * (z @ (s @ z)) + 0.5 * (v @ v)
        errors[k] = sync_error(z, q, n)

    record(0, z, v)
    half = 0.5 * dt
    for k in range(1, steps + 1):
        a1 = -(s @ z) - ld @ v
        z2 = z + half * v
        v2 = v + half * a1
        a2 = -(s @ z2) - ld @ v2
        z3 = z + half * v2
        v3 = v + half * a2
        a3 = -(s @ z3) - ld @ v3
        z4 = z + dt * v3
        v4 = v + dt * a3
        a4 = -(s @ z4) - ld @ v4
        z = z + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        record(k, z, v)
    return SimulationTrace(times, positions, velocities, energies, errors,
                           dt, e, seed)


def random_initial_state(sys: ArraySystem, seed=0, scale=1.0):
    """Reproducible random initial state (standard normal entries)."""
    rng = np.random.default_rng(seed)
    dim = sys.q * sys.n
    return scale * rng.standard_normal(dim), scale * rng.standard_normal(dim)


def counterexample_ic(sys: ArraySystem, eps=None) -> CounterexampleMode | None:
    """Initial condition certifying a failed synchronization verdict.

    Returns None when the array synchronizes.  Otherwise picks, from the
    highest-frequency eigenspace of the position coupling that meets the
    null space of the dissipative Laplacian outside the synchronous
    subspace, the first basis direction after removing the synchronous
    component.
    """
    analysis = subspace_analysis(sys, eps)
    if analysis.count <= sys.n:
        return None
    q, n = sys.q, sys.n
    for rho, shared in sorted(analysis.components, key=lambda t: -t[0]):
        vectors = shared.vectors
        block = vectors.reshape(q, n, -1)
        deflated = (block - block.mean(axis=0)).reshape(q * n, -1)
        basis = orthonormal_columns(deflated, drop_tol=1e-6)
        if basis.shape[1]:
            omega = math.sqrt(rho)
            return CounterexampleMode(omega, basis[:, 0], 2.0 * math.pi / omega)
    return None
