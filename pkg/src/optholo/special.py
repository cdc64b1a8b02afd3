"""Coefficient functions with removable singularities at the origin.

Each closed-form coefficient of the coherent-operator calculus is a ratio like
sin(2r)/(2r) that is 0/0 at r = 0. Below ``DEFAULTS.series_threshold`` the
functions switch to Taylor series through fourth order.
"""

from __future__ import annotations

import math

from .config import DEFAULTS


def _small(r: float) -> bool:
    return r < DEFAULTS.series_threshold


def sinc(r: float) -> float:
    """sin(r) / r"""
    if _small(r):
        r2 = r * r
        return 1.0 - r2 / 6.0 + r2 * r2 / 120.0
    return math.sin(r) / r


def sinhc(r: float) -> float:
    """sinh(r) / r"""
    if _small(r):
        r2 = r * r
        return 1.0 + r2 / 6.0 + r2 * r2 / 120.0
    return math.sinh(r) / r


def sin2c(r: float) -> float:
    """sin(2r) / (2r)"""
    return sinc(2.0 * r)


def sinh2c(r: float) -> float:
    """sinh(2r) / (2r)"""
    return sinhc(2.0 * r)


def one_minus_cos2_over(r: float) -> float:
    """(1 - cos 2r) / (2 r^2), equal to sinc(r)^2."""
    return sinc(r) ** 2


def cosh2_minus_one_over(r: float) -> float:
    """(cosh 2r - 1) / (2 r^2), equal to sinhc(r)^2."""
    return sinhc(r) ** 2


def sin2c_minus_one_over(r: float) -> float:
    """(sin(2r)/(2r) - 1) / (2 r^2)"""
    if _small(r):
        r2 = r * r
        return -1.0 / 3.0 + 2.0 * r2 / 15.0 - 4.0 * r2 * r2 / 315.0
    return (sin2c(r) - 1.0) / (2.0 * r * r)


def sinh2c_minus_one_over(r: float) -> float:
    """(sinh(2r)/(2r) - 1) / (2 r^2)"""
    if _small(r):
        r2 = r * r
        return 1.0 / 3.0 + 2.0 * r2 / 15.0 + 4.0 * r2 * r2 / 315.0
    return (sinh2c(r) - 1.0) / (2.0 * r * r)
