"""Parametrized operator families and their symmetry classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import tolerances as tol
from .errors import ConfigError, DimensionError, SymmetryError
from .linalg import as_real_matrix, max_abs

__all__ = ["SYMMETRY_TAGS", "ChiralFrame", "OperatorPath", "validate_symmetry"]

SYMMETRY_TAGS = ("general", "skew", "chiral-skew", "chiral-selfadjoint")


@dataclass(frozen=True)
class ChiralFrame:
    """Block sizes of the chiral grading in its spectral representation."""

    n_plus: int
    n_minus: int

    def __post_init__(self):
        if self.n_plus < 0 or self.n_minus < 0:
            raise ConfigError("chiral block sizes must be non-negative")

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus

    def grading(self) -> np.ndarray:
        """The grading matrix diag(+1, ..., +1, -1, ..., -1)."""
        return np.diag(np.concatenate(
            [np.ones(self.n_plus), -np.ones(self.n_minus)]))


def validate_symmetry(mat: np.ndarray, tag: str, frame: Optional[ChiralFrame]) -> None:
    """Check that a matrix satisfies its declared symmetry class."""
    m = as_real_matrix(mat)
    scale = max_abs(m)
    t = tol.sym(scale)
    if tag == "general":
        return
    if mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"{tag} requires a square matrix, got {mat.shape}")
    if tag == "skew":
        if max_abs(m + m.T) > t:
            raise SymmetryError("matrix is not skew-symmetric within tolerance")
        return
    if frame is None:
        raise ConfigError(f"symmetry tag {tag!r} requires a chiral frame")
    if frame.dim != m.shape[0]:
        raise DimensionError("chiral frame does not match matrix dimension")
    np_, nm = frame.n_plus, frame.n_minus
    if tag == "chiral-skew":
        if max_abs(m + m.T) > t:
            raise SymmetryError("matrix is not skew-symmetric within tolerance")
    elif tag == "chiral-selfadjoint":
        if max_abs(m - m.T) > t:
            raise SymmetryError("matrix is not symmetric within tolerance")
    else:
        raise ConfigError(f"unknown symmetry tag {tag!r}")
    # chiral operators are exactly off-diagonal in the grading
    if max_abs(m[:np_, :np_]) > t or max_abs(m[np_:, np_:]) > t:
        raise SymmetryError("matrix does not anticommute with the chiral grading")


@dataclass(frozen=True)
class OperatorPath:
    """A continuous family t -> matrix over an interval.

    The evaluator must return matrices of a fixed shape; the symmetry tag is
    validated at every evaluated parameter.  ``declared_index`` is the block
    index rows - cols of the off-diagonal block (0 for square families).
    """

    interval: tuple
    evaluator: Callable[[float], np.ndarray] = field(repr=False)
    symmetry_tag: str = "general"
    frame: Optional[ChiralFrame] = None
    declared_index: int = 0

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ConfigError(f"invalid parameter interval {self.interval}")
        if self.symmetry_tag not in SYMMETRY_TAGS:
            raise ConfigError(f"unknown symmetry tag {self.symmetry_tag!r}")
        if self.symmetry_tag.startswith("chiral") and self.frame is None:
            raise ConfigError("chiral symmetry tags require a chiral frame")
        m0 = as_real_matrix(self.evaluator(lo))
        if self.symmetry_tag == "general":
            expected = m0.shape[0] - m0.shape[1]
        else:
            if self.frame is not None:
                expected = self.frame.n_plus - self.frame.n_minus
            else:
                expected = 0
        if self.declared_index != expected:
            raise ConfigError(
                f"declared index {self.declared_index} inconsistent with "
                f"block shape (expected {expected})"
            )

    @property
    def t_start(self) -> float:
        return self.interval[0]

    @property
    def t_end(self) -> float:
        return self.interval[1]

    def at(self, t: float) -> np.ndarray:
        """Evaluate the path and validate the symmetry tag at t."""
        m = as_real_matrix(self.evaluator(t))
        validate_symmetry(m, self.symmetry_tag, self.frame)
        return m

    @staticmethod
    def from_samples(ts: Sequence[float], mats: Sequence[np.ndarray],
                     symmetry_tag: str = "general",
                     frame: Optional[ChiralFrame] = None) -> "OperatorPath":
        """Piecewise-linear path through the given samples."""
        ts = np.asarray([float(t) for t in ts])
        if ts.size < 2 or np.any(np.diff(ts) <= 0):
            raise ConfigError("samples require strictly increasing parameters")
        mats = [as_real_matrix(m) for m in mats]
        if len(mats) != ts.size:
            raise ConfigError("sample count mismatch")
        shape = mats[0].shape
        if any(m.shape != shape for m in mats):
            raise ConfigError("all samples must share one matrix shape")
        stacked = np.stack(mats)

        def evaluator(t, _ts=ts, _m=stacked):
            if t <= _ts[0]:
                return _m[0]
            if t >= _ts[-1]:
                return _m[-1]
            j = int(np.searchsorted(_ts, t, side="right")) - 1
            h = (_ts[j + 1] - _ts[j])
            w = (t - _ts[j]) / h
            return (1.0 - w) * _m[j] + w * _m[j + 1]

        if symmetry_tag == "general":
            index = shape[0] - shape[1]
        elif frame is not None:
            index = frame.n_plus - frame.n_minus
        else:
            index = 0
        return OperatorPath((float(ts[0]), float(ts[-1])), evaluator,
                            symmetry_tag, frame, index)
