"""Fredholm pairs of chiral complex structures and their Z2-index.

A chiral complex structure is a real matrix that is simultaneously skew,
orthogonal and anticommuting with the grading, hence of the form
[[0, U], [-U^T, 0]] with U orthogonal.  The Z2-index of a certified pair is
read off the kernel of the sum; it agrees with the straight-line flow
between the two structures and feeds the index map over grading-preserving
orthogonals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import (
    DimensionError,
    NotFredholmPairError,
    RefinementError,
    StructureError,
    SymmetryError,
)
from .flow import sf2_path
from .linalg import as_real_matrix, max_abs, singular_values
from .paths import ChiralFrame, OperatorPath
from .z2 import Z2, z2_product

__all__ = [
    "ComplexStructure",
    "FredholmPair",
    "pi_index",
    "straight_line_sf2",
    "phase_complete",
    "parity_via_pairs",
    "j_index",
    "index_pairing_rhs",
]


@dataclass(frozen=True)
class ComplexStructure:
    """A real chiral complex structure: skew, orthogonal, anticommuting
    with the grading."""

    matrix: np.ndarray
    frame: ChiralFrame

    def __post_init__(self):
        m = as_real_matrix(self.matrix)
        n = m.shape[0]
        if m.shape[0] != m.shape[1] or n != self.frame.dim:
            raise DimensionError("matrix does not match the chiral frame")
        if self.frame.n_plus != self.frame.n_minus:
            raise DimensionError("chiral complex structures need balanced blocks")
        t = tol.sym(max(max_abs(m), 1.0))
        if max_abs(m + m.T) > t:
            raise SymmetryError("complex structure must be skew")
        if max_abs(m.T @ m - np.eye(n)) > 10 * t:
            raise SymmetryError("complex structure must be orthogonal")
        np_ = self.frame.n_plus
        if max_abs(m[:np_, :np_]) > t or max_abs(m[np_:, np_:]) > t:
            raise SymmetryError("complex structure must anticommute with the grading")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FredholmPair:
    """Two chiral complex structures whose sum certifies a spectral gap.

    The singular values of first + second must split into a kernel proxy
    below the pair tolerance and a remainder above the structural gap; the
    size of the proxy is stored as the gap certificate.
    """

    first: ComplexStructure
    second: ComplexStructure
    gap_certificate: int = -1

    def __post_init__(self):
        if self.first.dim != self.second.dim or self.first.frame != self.second.frame:
            raise DimensionError("pair members must share shape and frame")
        sv = singular_values(self.first.matrix + self.second.matrix)
        kernel_tol = tol.pair_kernel()
        cluster = int((sv < kernel_tol).sum())
        rest = sv[cluster:]
        if rest.size and float(rest.min()) <= tol.PAIR_GAP_MIN:
            raise NotFredholmPairError(
                "no spectral gap: singular values of the sum fall between "
                f"{kernel_tol:.1e} and {tol.PAIR_GAP_MIN}"
            )
        object.__setattr__(self, "gap_certificate", cluster)


def pi_index(pair: FredholmPair) -> Z2:
    """Z2-index of a certified pair: parity of half the kernel dimension
    of the sum.

    Cross-checked against the equivalent complex count, the kernel dimension
    of first - second +/- 2i over the complexification, for both signs.
    """
    k = pair.gap_certificate
    if k % 2:
        raise StructureError(
            f"kernel proxy of the sum has odd dimension {k}; inputs invalid"
        )
    value = Z2(1) if (k // 2) % 2 == 0 else Z2(-1)

    diff = pair.first.matrix - pair.second.matrix
    n = diff.shape[0]
    kernel_tol = tol.pair_kernel()
    counts = []
    for sign in (+1.0, -1.0):
        a = diff.astype(complex) + sign * 2j * np.eye(n)
        sv = np.linalg.svd(a, compute_uv=False)
        counts.append(int((sv < kernel_tol).sum()))
    if counts[0] != counts[1] or counts[0] % 2 != (k // 2) % 2:
        raise StructureError(
            f"index formulas disagree (kernel/2={k // 2}, complex counts={counts})"
        )
    return value


def straight_line_sf2(pair: FredholmPair, *, rng=None) -> Z2:
    """Flow of the straight-line path between the two structures."""
    i0 = pair.first.matrix
    i1 = pair.second.matrix
    path = OperatorPath(
        (0.0, 1.0),
        lambda t: (1.0 - t) * i0 + t * i1,
        "chiral-skew",
        pair.first.frame,
        0,
    )
    return sf2_path(path, rng=rng).value


def phase_complete(t_mat, frame: ChiralFrame, *, _kernel_mix=None) -> ComplexStructure:
    """Complete the phase of a chiral skew matrix to a complex structure.

    With T = [[0, B], [-B^T, 0]] and the full SVD B = W S V^T, the result is
    built from the orthogonal factor W V^T, which agrees with the phase of T
    on the range of |T| and extends it over the kernel.  The SVD signs are
    fixed deterministically (largest-magnitude entry of each left singular
    vector positive).
    """
    t = as_real_matrix(t_mat)
    if frame.n_plus != frame.n_minus:
        raise DimensionError("phase completion needs balanced chiral blocks")
    if t.shape[0] != t.shape[1] or t.shape[0] != frame.dim:
        raise DimensionError("matrix does not match the chiral frame")
    n = frame.n_plus
    b = t[:n, n:]
    w, s, vt = np.linalg.svd(b)
    for j in range(n):
        i = int(np.argmax(np.abs(w[:, j])))
        if w[i, j] < 0:
            w[:, j] = -w[:, j]
            vt[j, :] = -vt[j, :]
    if _kernel_mix is not None:
        kernel_tol = tol.gap(max(float(s[0]) if s.size else 0.0, 1.0))
        k_idx = np.where(s < kernel_tol)[0]
        if k_idx.size:
            mix = _kernel_mix(int(k_idx.size))
            w = w.copy()
            w[:, k_idx] = w[:, k_idx] @ mix
    u = w @ vt
    return ComplexStructure(embed_unitary(u), frame)


def embed_unitary(u: np.ndarray) -> np.ndarray:
    """Assemble [[0, U], [-U^T, 0]] from an orthogonal block."""
    n = u.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[:n, n:] = u
    out[n:, :n] = -u.T
    return out


def _half_kernel_parity(i0: np.ndarray, i1: np.ndarray) -> Z2:
    """Z2-index of a consecutive phase pair along a partition.

    Unlike the rigid certificate of :class:`FredholmPair`, a pair that
    straddles a crossing of the underlying path has a kernel proxy that is
    only dynamically small (it shrinks with the partition spacing but never
    reaches machine zero), so the cluster is recognized through a relative
    spectral gap: everything below the partition bound counts as kernel and
    nothing may fall between that bound and the structural gap.
    """
    sv = singular_values(i0 + i1)
    cluster_tol = tol.PAIR_PARTITION_ABS * tol.scale()
    cluster = int((sv < cluster_tol).sum())
    rest = sv[cluster:]
    if rest.size and float(rest.min()) <= tol.PAIR_GAP_MIN:
        raise NotFredholmPairError(
            "phase pair has spectrum between the kernel proxy and the gap"
        )
    if cluster % 2:
        raise StructureError(
            f"kernel proxy of a phase pair has odd dimension {cluster}"
        )
    return Z2(1) if (cluster // 2) % 2 == 0 else Z2(-1)


def parity_via_pairs(path: OperatorPath, *, rng=None) -> Z2:
    """Parity of a chiral skew path through consecutive phase pairs.

    The partition is refined until every consecutive pair of phase
    completions certifies (kernel proxy cleanly separated from the rest of
    the spectrum of the sum); the parity is the product of their
    Z2-indices.  Interior kernel completions appear in two adjacent pairs
    and cancel, so randomizing them (via ``rng``) leaves the result
    unchanged.
    """
    if path.symmetry_tag != "chiral-skew":
        raise DimensionError("parity_via_pairs expects a chiral-skew path")
    frame = path.frame
    t0, t1 = path.interval

    phases = {}

    def phase(t):
        key = float(t)
        if key not in phases:
            mix = None
            if rng is not None and key not in (float(t0), float(t1)):
                def mix(k, _rng=rng):
                    q, r = np.linalg.qr(_rng.standard_normal((k, k)))
                    return q * np.sign(np.diag(r))
            phases[key] = phase_complete(path.at(key), frame, _kernel_mix=mix)
        return phases[key]

    points = list(np.linspace(t0, t1, 9))
    stack = [(points[i], points[i + 1]) for i in range(len(points) - 1)]
    certified = {}
    while stack:
        a, b = stack.pop()
        try:
            certified[(a, b)] = _half_kernel_parity(
                phase(a).matrix, phase(b).matrix)
        except NotFredholmPairError:
            if b - a < tol.MIN_SEGMENT:
                raise RefinementError(
                    f"no certifiable phase pair above spacing {tol.MIN_SEGMENT}"
                )
            mid = a + (b - a) / 2.0
            stack.append((a, mid))
            stack.append((mid, b))
    return z2_product(certified[key] for key in sorted(certified))


def _require_grading_orthogonal(o_mat, frame: ChiralFrame) -> np.ndarray:
    o = as_real_matrix(o_mat)
    n = o.shape[0]
    if o.shape[0] != o.shape[1] or n != frame.dim:
        raise DimensionError("orthogonal does not match the chiral frame")
    t = tol.sym(max(max_abs(o), 1.0))
    if max_abs(o.T @ o - np.eye(n)) > 10 * t:
        raise SymmetryError("matrix is not orthogonal")
    np_ = frame.n_plus
    if max_abs(o[:np_, np_:]) > t or max_abs(o[np_:, :np_]) > t:
        raise SymmetryError("matrix does not commute with the grading")
    return o


def j_index(structure: ComplexStructure, o_mat) -> Z2:
    """Index map over grading-preserving orthogonals: the Z2-index of the
    pair (I, O I O^T)."""
    o = _require_grading_orthogonal(o_mat, structure.frame)
    conjugated = ComplexStructure(o @ structure.matrix @ o.T, structure.frame)
    return pi_index(FredholmPair(structure, conjugated))


def index_pairing_rhs(structure: ComplexStructure, o_mat) -> int:
    """Right-hand side of the index theorem: the complex kernel dimension of
    P O P + 1 - P mod 2, with P the positive-imaginary spectral projection
    of the complexified structure."""
    o = _require_grading_orthogonal(o_mat, structure.frame)
    n = structure.dim
    p = (np.eye(n) - 1j * structure.matrix) / 2.0
    a = p @ o.astype(complex) @ p + np.eye(n) - p
    sv = np.linalg.svd(a, compute_uv=False)
    smax = float(sv[0]) if sv.size else 0.0
    count = int((sv < tol.inv(max(smax, 1e-300))).sum())
    return count % 2
