"""Static rotor aerodynamics: power and thrust coefficient surfaces."""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from scipy.optimize import minimize_scalar

BETZ_LIMIT = 16.0 / 27.0

# Heier-type exponential surface, pitch in degrees
DEFAULT_CP_COEFFS = (0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068)


class AeroDomainError(ValueError):
    pass


def thrust_from_power_coefficient(cp: float) -> float:
    """Momentum-theory thrust coefficient for a given power coefficient.

    Solves ``cp = 4a(1-a)^2`` on the branch ``a in [0, 1/3]`` in closed form
    and returns ``ct = 4a(1-a)``.
    """
    cp = min(max(cp, 0.0), BETZ_LIMIT)
    # with b = 1 - a: b^3 - b^2 + cp/4 = 0, depressed cubic in t = b - 1/3
    arg = min(max(-27.0 * (cp / 4.0 - 2.0 / 27.0) / 2.0, -1.0), 1.0)
    b = 1.0 / 3.0 + (2.0 / 3.0) * math.cos(math.acos(arg) / 3.0)
    a = 1.0 - b
    return 4.0 * a * (1.0 - a)


@dataclass
class ParametricAero:
    """Exponential cP(lambda, beta) surface calibrated to a target optimum.

    The raw surface ``g`` is rescaled in tip-speed ratio and amplitude so that
    its maximum over lambda at zero pitch sits exactly at
    ``(lambda_opt, cp_max)``.  Thrust follows from momentum theory.  The
    empirical form is singular at -1 deg, so negative pitch is evaluated at 0.
    """

    lambda_opt: float
    cp_max: float
    coeffs: tuple = DEFAULT_CP_COEFFS
    _lam_scale: float = field(init=False, repr=False)
    _amp: float = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.cp_max < BETZ_LIMIT:
            raise ValueError(f"cp_max must lie in (0, 16/27), got {self.cp_max}")
        self.coeffs = tuple(float(c) for c in self.coeffs)
        res = minimize_scalar(lambda lam: -self._raw(lam, 0.0), bounds=(1.0, 25.0),
                              method="bounded", options={"xatol": 1e-10})
        g_max = -res.fun
        if g_max <= 0.0:
            raise ValueError("cP coefficients give no positive power coefficient")
        self._lam_scale = float(res.x) / self.lambda_opt
        self._amp = self.cp_max / float(g_max)

    def _raw(self, lam: float, beta_deg: float) -> float:
        c1, c2, c3, c4, c5, c6 = self.coeffs
        inv_li = 1.0 / (lam + 0.08 * beta_deg) - 0.035 / (beta_deg ** 3 + 1.0)
        return c1 * (c2 * inv_li - c3 * beta_deg - c4) * math.exp(-c5 * inv_li) + c6 * lam

    def cp(self, lam: float, beta: float) -> float:
        if not lam > 0.0:
            raise AeroDomainError(f"tip-speed ratio must be positive, got {lam}")
        value = self._amp * self._raw(lam * self._lam_scale, max(math.degrees(beta), 0.0))
        return float(min(max(value, 0.0), BETZ_LIMIT))

    def ct(self, lam: float, beta: float) -> float:
        return thrust_from_power_coefficient(self.cp(lam, beta))


class TabulatedAero:
    """Bilinear interpolation on a rectangular (lambda, beta) grid.

    Queries outside the grid are clamped to its edge.
    """

    def __init__(self, lambdas, betas_deg, cp_grid, ct_grid):
        self.lambdas = [float(x) for x in lambdas]
        self.betas = [math.radians(float(b)) for b in betas_deg]
        self.cp_grid = [[float(x) for x in row] for row in cp_grid]
        self.ct_grid = [[float(x) for x in row] for row in ct_grid]
        if len(self.lambdas) < 2 or len(self.betas) < 2:
            raise ValueError("aero table needs at least 2 lambda and 2 beta values")
        for axis in (self.lambdas, self.betas):
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ValueError("aero table axes must be strictly increasing")

    @classmethod
    def from_csv(cls, path) -> "TabulatedAero":
        """Load a ``lambda, beta_deg, cp, ct`` table, lambda varying slowest."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            if header != ["lambda", "beta_deg", "cp", "ct"]:
                raise ValueError(f"{path}: unexpected header {header}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    rows.append(tuple(float(x) for x in row))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
                if len(rows[-1]) != 4:
                    raise ValueError(f"{path}:{lineno}: expected 4 columns")
        lambdas = sorted({r[0] for r in rows})
        betas = sorted({r[1] for r in rows})
        if len(rows) != len(lambdas) * len(betas):
            raise ValueError(f"{path}: grid is not rectangular")
        cp = [[0.0] * len(betas) for _ in lambdas]
        ct = [[0.0] * len(betas) for _ in lambdas]
        for k, (lam, beta, cp_v, ct_v) in enumerate(rows):
            i, j = divmod(k, len(betas))
            if lam != lambdas[i] or beta != betas[j]:
                raise ValueError(f"{path}:{k + 2}: rows are not in row-major grid order")
            cp[i][j], ct[i][j] = cp_v, ct_v
        return cls(lambdas, betas, cp, ct)

    def _interp(self, grid, lam, beta):
        def locate(axis, x):
            x = min(max(x, axis[0]), axis[-1])
            i = min(max(bisect.bisect_right(axis, x) - 1, 0), len(axis) - 2)
            return i, (x - axis[i]) / (axis[i + 1] - axis[i])

        i, s = locate(self.lambdas, lam)
        j, r = locate(self.betas, beta)
        return ((1 - s) * (1 - r) * grid[i][j] + s * (1 - r) * grid[i + 1][j]
                + (1 - s) * r * grid[i][j + 1] + s * r * grid[i + 1][j + 1])

    def cp(self, lam: float, beta: float) -> float:
        if not lam > 0.0:
            raise AeroDomainError(f"tip-speed ratio must be positive, got {lam}")
        return min(max(self._interp(self.cp_grid, lam, beta), 0.0), BETZ_LIMIT)

    def ct(self, lam: float, beta: float) -> float:
        if not lam > 0.0:
            raise AeroDomainError(f"tip-speed ratio must be positive, got {lam}")
        return min(max(self._interp(self.ct_grid, lam, beta), 0.0), 2.0)
