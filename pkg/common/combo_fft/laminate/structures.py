import attr
import numpy as np

from combo_fft.exceptions import ComboError

NORMAL_TOLERANCE = 1e-12


def _as_vector(value):
    return np.asarray(value, dtype=float).reshape(3)


def _validate_normal(instance, attribute, value):
    if abs(np.linalg.norm(value) - 1.0) > NORMAL_TOLERANCE:
        raise ComboError(
            f"Interface normal must be a unit vector, got {value}"
        )


def _validate_fraction(instance, attribute, value):
    if not 0.0 < value < 1.0:
        raise ComboError(f"c_plus must lie in (0, 1), got {value}")


@attr.s(frozen=True, eq=False)
class ComboMeta(object):
    """Laminate description of one composite boxel.

    Args:
        normal (np.ndarray): Unit normal pointing out of phase +.
        c_plus (float): Volume fraction of phase +.
    """

    normal = attr.ib(converter=_as_vector, validator=_validate_normal)
    c_plus = attr.ib(converter=float, validator=_validate_fraction)

    @classmethod
    def from_direction(cls, direction, c_plus):
        direction = _as_vector(direction)
        return cls(direction / np.linalg.norm(direction), c_plus)

    @property
    def c_minus(self):
        return 1.0 - self.c_plus


@attr.s
class JumpVectorState(object):
    """Iteration state of the jump vector of one composite boxel."""

    a = attr.ib(converter=_as_vector)
    converged = attr.ib(default=False)
    iterations = attr.ib(default=0)
    residual = attr.ib(default=float("inf"))
    back_projections = attr.ib(default=0)


@attr.s
class LaminateResult(object):
    """Phase-wise and effective response of one composite boxel."""

    F_plus = attr.ib()
    F_minus = attr.ib()
    P_plus = attr.ib()
    P_minus = attr.ib()
    P_box = attr.ib()
    S_box = attr.ib()
    A_box = attr.ib()
    traction = attr.ib()


@attr.s
class LaminateBatch(object):
    """Batched laminate solution for many composite boxels.

    Arrays share the leading dimension of the boxel batch. 'A_box' is None
    when tangents were not requested.
    """

    a = attr.ib()
    F_plus = attr.ib()
    F_minus = attr.ib()
    P_plus = attr.ib()
    P_minus = attr.ib()
    P_box = attr.ib()
    A_box = attr.ib()
    traction = attr.ib()
    converged = attr.ib()
    iterations = attr.ib()
    residual = attr.ib()
    back_projections = attr.ib()

    @property
    def count(self):
        return int(self.a.shape[0])

    @property
    def failed_count(self):
        return int(np.count_nonzero(~self.converged))

    def result_at(self, index, F_box):
        """Single boxel view as 'LaminateResult'."""
        P_box = self.P_box[index]
        A_box = None if self.A_box is None else self.A_box[index]
        return LaminateResult(
            F_plus=self.F_plus[index],
            F_minus=self.F_minus[index],
            P_plus=self.P_plus[index],
            P_minus=self.P_minus[index],
            P_box=P_box,
            S_box=np.linalg.solve(F_box, P_box),
            A_box=A_box,
            traction=self.traction[index],
        )

    def state_at(self, index):
        return JumpVectorState(
            a=self.a[index],
            converged=bool(self.converged[index]),
            iterations=int(self.iterations[index]),
            residual=float(self.residual[index]),
            back_projections=int(self.back_projections[index]),
        )
