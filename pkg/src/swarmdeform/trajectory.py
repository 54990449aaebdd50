"""Rest-to-rest leader trajectories through timed waypoints.

Each consecutive waypoint pair is joined by a quintic ease curve

    s(tau) = 6 tau^5 - 15 tau^4 + 10 tau^3,   tau in [0, 1]

whose velocity and acceleration vanish at both ends.  Stitching segments
with that profile yields a C^2 path that is momentarily at rest at every
waypoint, so a team of leaders sharing the same waypoint times deforms
through a blend of its endpoint configurations.
"""

from __future__ import annotations

import numpy as np


def ease(tau: float) -> tuple[float, float, float]:
    """Quintic ease value and its first two derivatives with respect to tau."""
    s = tau**3 * (10.0 + tau * (-15.0 + 6.0 * tau))
    ds = 30.0 * tau**2 * (1.0 - tau) ** 2
    dds = 60.0 * tau * (1.0 - tau) * (1.0 - 2.0 * tau)
    return s, ds, dds


class WaypointPath:
    """Piecewise-quintic path through timed waypoints, at rest at each one.

    Parameters
    ----------
    waypoints:
        Sequence of (time, point) pairs with strictly increasing times.
        A single waypoint gives a constant path.

    Queries before the first waypoint time raise ValueError.  Queries after
    the last waypoint hold its position with zero velocity and
    acceleration, so a run may settle longer than the commanded motion.
    """

    def __init__(self, waypoints):
        if len(waypoints) < 1:
            raise ValueError("need at least one waypoint")
        times = np.array([float(t) for t, _ in waypoints])
        points = np.array([np.asarray(p, dtype=float) for _, p in waypoints])
        if points.ndim != 2:
            raise ValueError("waypoint positions must share a common dimension")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("waypoint times must be strictly increasing")
        self.times = times
        self.points = points

    @property
    def t_start(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def state(self, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Position, velocity and acceleration at time t."""
        if t < self.times[0]:
            raise ValueError(f"time {t} precedes the first waypoint at {self.times[0]}")
        if t >= self.times[-1]:
            p = self.points[-1]
            z = np.zeros_like(p)
            return p.copy(), z, z.copy()
        seg = int(np.searchsorted(self.times, t, side="right")) - 1
        t0 = self.times[seg]
        t1 = self.times[seg + 1]
        dt = t1 - t0
        tau = (t - t0) / dt
        s, ds, dds = ease(tau)
        delta = self.points[seg + 1] - self.points[seg]
        pos = self.points[seg] + s * delta
        vel = (ds / dt) * delta
        acc = (dds / dt**2) * delta
        return pos, vel, acc

    def position(self, t: float) -> np.ndarray:
        return self.state(t)[0]

    def velocity(self, t: float) -> np.ndarray:
        return self.state(t)[1]

    def acceleration(self, t: float) -> np.ndarray:
        return self.state(t)[2]
