"""Numerical tolerances shared across the toolkit.

All tol_* thresholds are relative to the scale of the matrix at hand and can
be multiplied globally through the environment variable
``Z2FLOW_TOLERANCE_SCALE`` (default 1).  The window-continuity bound
``WINDOW_EPS`` and the pair-certificate gap ``PAIR_GAP_MIN`` are structural
constants of the algorithms, not tolerances, and are therefore not scaled.
"""

import os

SYM_REL = 1e-10        # symmetry checks: ||M - M^T|| or ||M + M^T|| vs ||M||
PROJ_REL = 1e-10       # projection idempotency / trace checks
INV_REL = 1e-10        # invertibility: sigma_min vs sigma_max
GAP_REL = 1e-8         # window radius vs singular-value collision
FRAME_ABS = 1e-9       # orthonormal frame Gram deviation (frames are unit scale)
TRANSPORT_MIN = 1e-6   # smallest singular value allowed in a polar transport
EIG_IMAG_REL = 1e-8    # eigenvalue realness threshold vs ||K||

PAIR_KERNEL_ABS = 1e-7   # kernel-proxy cluster bound for sums of complex structures
PAIR_GAP_MIN = 0.1       # the rest of that spectrum must sit above this
PAIR_PARTITION_ABS = 1e-3  # looser cluster bound for consecutive phases along a path

WINDOW_EPS = 0.5        # ||Q(t) - Q(t')|| bound inside one spectral window
MIN_SEGMENT = 1e-6      # refinement floor for partition segments / sample spacing


def scale() -> float:
    """Global multiplier for the tol_* family, read from the environment."""
    return float(os.environ.get("Z2FLOW_TOLERANCE_SCALE", "1"))


def sym(magnitude: float) -> float:
    return SYM_REL * magnitude * scale()


def proj(magnitude: float) -> float:
    return PROJ_REL * magnitude * scale()


def inv(sigma_max: float) -> float:
    return INV_REL * sigma_max * scale()


def gap(sigma_max: float) -> float:
    return GAP_REL * sigma_max * scale()


def frame() -> float:
    return FRAME_ABS * scale()


def transport() -> float:
    return TRANSPORT_MIN * scale()


def eig_imag(sigma_max: float) -> float:
    return EIG_IMAG_REL * sigma_max * scale()


def pair_kernel() -> float:
    return PAIR_KERNEL_ABS * scale()


def snapshot() -> dict:
    """All tolerance constants after scaling, for run reports."""
    s = scale()
    return {
        "scale": s,
        "sym_rel": SYM_REL * s,
        "proj_rel": PROJ_REL * s,
        "inv_rel": INV_REL * s,
        "gap_rel": GAP_REL * s,
        "frame_abs": FRAME_ABS * s,
        "transport_min": TRANSPORT_MIN * s,
        "eig_imag_rel": EIG_IMAG_REL * s,
        "pair_kernel_abs": PAIR_KERNEL_ABS * s,
        "pair_gap_min": PAIR_GAP_MIN,
        "window_eps": WINDOW_EPS,
    }
