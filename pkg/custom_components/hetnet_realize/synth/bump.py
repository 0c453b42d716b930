"""Compactly supported C2 bump functions"""
import numpy as np


def smoothstep(s: np.ndarray | float) -> np.ndarray | float:
    """Quintic smoothstep on [0, 1], clipped outside"""
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def bump(
    r: np.ndarray | float, r_inner: np.ndarray | float, r_outer: np.ndarray | float
) -> np.ndarray | float:
    """1 on [0, r_inner], 0 beyond r_outer, monotone quintic in between"""
    return smoothstep((np.asarray(r_outer) - r) / (np.asarray(r_outer) - r_inner))


def ramp(
    r: np.ndarray | float, r_start: float, r_full: float
) -> np.ndarray | float:
    """0 below r_start, 1 beyond r_full"""
    return smoothstep((np.asarray(r) - r_start) / (r_full - r_start))


# Largest derivative of smoothstep, reached at s = 1/2
SMOOTHSTEP_MAX_SLOPE = 1.875


def bump_max_slope(r_inner: float, r_outer: float) -> float:
    return SMOOTHSTEP_MAX_SLOPE / (r_outer - r_inner)
