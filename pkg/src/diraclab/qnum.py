"""q-arithmetic: half-integer labels, q-numbers, q-powers.

Every spin/weight label in this package is a half-integer stored by its
doubled value, so index arithmetic stays exact and hashable.  All scalar
coefficient formulas funnel through :func:`q_number` and :func:`q_power`.
"""

from __future__ import annotations

from typing import NamedTuple


class HalfInt(NamedTuple):
    """Exact half-integer, stored as twice its value.

    ``HalfInt(3)`` is the number 3/2.  Use :func:`half` to build one from
    a float or int when that reads better.
    """

    twice: int

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other):
        return HalfInt(self.twice + other.twice)

    def __sub__(self, other):
        return HalfInt(self.twice - other.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def half(x) -> HalfInt:
    """Coerce an int, float or HalfInt to a HalfInt.

    Raises ValueError if x is not an exact multiple of 1/2.
    """
    if isinstance(x, HalfInt):
        return x
    t = 2 * x
    if t != int(t):
        raise ValueError(f"{x!r} is not a half-integer")
    return HalfInt(int(t))


def validate_q(q: float) -> float:
    """Check the deformation parameter: q must lie strictly inside (0, 1)."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ValueError(f"deformation parameter must be in (0, 1), got {q}")
    return q


def q_number(m, q: float) -> float:
    """The q-number [m] = (q^m - q^{-m}) / (q - q^{-1}).

    Parameters
    ----------
    m : HalfInt, int or float
        Any half-integer (or real) order.
    q : float
        Deformation parameter in (0, 1).

    Notes
    -----
    [m] is an odd function of m, [0] = 0, [1] = 1, and [m] -> m as q -> 1.
    The recursion [m+1] = (q + q^{-1})[m] - [m-1] holds exactly.
    """
    q = validate_q(q)
    mv = m.value if isinstance(m, HalfInt) else float(m)
    return (q**mv - q**(-mv)) / (q - 1.0 / q)


def q_power(e, q: float) -> float:
    """q raised to a (half-integer-combination) exponent e."""
    ev = e.value if isinstance(e, HalfInt) else float(e)
    return float(q) ** ev
