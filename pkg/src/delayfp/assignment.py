"""User partitioning: user id <-> (group, delay index) and the delay grid."""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_TOL = 2


@dataclass(frozen=True)
class SchemeParams:
    """Scheme geometry. Defaults are the 64-user reference configuration."""

    M: int = 16
    P: int = 4
    n: int = 1024
    delta_d: int = 20
    alpha: float = 0.05

    def __post_init__(self):
        if self.M < 1 or self.P < 1:
            raise ValueError("M and P must be positive")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.delta_d < 1:
            raise ValueError("delta_d must be >= 1")
        if (self.P - 1) * self.delta_d >= self.n:
            raise ValueError("(P - 1) * delta_d must be < n so group delays stay distinct")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def N(self) -> int:
        return self.M * self.P

    def delay(self, j: int) -> int:
        return j * self.delta_d


@dataclass(frozen=True)
class UserAssignment:
    user_id: int
    group_id: int
    delay_index: int
    delay: int


def user_to_params(t: int, params: SchemeParams) -> UserAssignment:
    if not 0 <= t < params.N:
        raise ValueError(f"user id {t} outside [0, {params.N})")
    i, j = divmod(t, params.P)
    return UserAssignment(t, i, j, params.delay(j))


def params_to_user(i: int, j: int, params: SchemeParams) -> int:
    if not 0 <= i < params.M:
        raise ValueError(f"group id {i} outside [0, {params.M})")
    if not 0 <= j < params.P:
        raise ValueError(f"delay index {j} outside [0, {params.P})")
    return i * params.P + j


def delay_to_index(d_hat: int, params: SchemeParams, tol: int = DEFAULT_TOL) -> int | None:
    """Map a detected delay onto the delay grid; ``None`` if it is off-grid.

    Distance is measured cyclically modulo ``n``.
    """
    n = params.n
    if not 0 <= d_hat < n:
        raise ValueError(f"detected delay {d_hat} outside [0, {n})")
    if not 0 <= 2 * tol < params.delta_d:
        raise ValueError("tol must be < delta_d / 2")
    for j in range(params.P):
        r = (d_hat - params.delay(j)) % n
        if min(r, n - r) <= tol:
            return j
    return None
