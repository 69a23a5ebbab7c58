"""Parity and Z2-valued spectral flow engines.

The finite-dimensional formulas (endpoint determinant and Pfaffian signs),
the windowed path algorithm that accumulates the flow on small spectral
subspaces, the Leray-Schauder degree, and the symmetry-class conversions
between chiral self-adjoint and chiral skew-adjoint families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tolerances as tol
from .errors import (
    ConfigError,
    DimensionError,
    NotAdmissibleError,
    RefinementError,
    SingularError,
    SymmetryError,
    TransportError,
)
from .linalg import (
    as_real_matrix,
    max_abs,
    pfaffian_sign,
    sign_det,
    singular_values,
    skew_singular_system,
)
from .paths import ChiralFrame, OperatorPath
from .z2 import Z2, z2_product

__all__ = [
    "SpectralWindow",
    "FlowResult",
    "parity_finite",
    "embed_chiral",
    "embed_chiral_path",
    "sf2_finite",
    "sf2_path",
    "parity_path",
    "parity_path_general",
    "leray_schauder_degree",
    "selfadjoint_to_skew",
    "selfadjoint_path_to_skew",
    "k_real_reduce",
]

# pairwise window continuity: ||Q(t) - Q(t')|| < WINDOW_EPS, expressed as a
# lower bound on the smallest principal cosine between the two subspaces
_COS_MIN = math.sqrt(1.0 - tol.WINDOW_EPS ** 2)


@dataclass
class SpectralWindow:
    """One partition segment of the windowed flow computation."""

    t_lo: float
    t_hi: float
    a: float
    rank: int
    factor: Z2
    frame_lo: np.ndarray = field(repr=False)
    restricted_lo: np.ndarray = field(repr=False)
    restricted_hi: np.ndarray = field(repr=False)
    perturbation_lo: np.ndarray = field(repr=False)
    perturbation_hi: np.ndarray = field(repr=False)


@dataclass
class FlowResult:
    """Value of a windowed flow computation plus its audit trail."""

    value: Z2
    windows: list
    refinement_depth: int
    evaluations: int

    def window_product(self) -> Z2:
        return z2_product(w.factor for w in self.windows)


# ---------------------------------------------------------------------------
# finite-dimensional formulas


def parity_finite(path: OperatorPath) -> Z2:
    """Parity of an admissible path of square matrices.

    The product of the determinant signs of the endpoint matrices.
    """
    b0 = path.at(path.t_start)
    b1 = path.at(path.t_end)
    if b0.shape[0] != b0.shape[1]:
        raise DimensionError("parity of square families only; see parity_path_general")
    try:
        return sign_det(b1) * sign_det(b0)
    except Exception as exc:
        raise NotAdmissibleError(f"endpoint matrix is singular: {exc}") from exc


def embed_chiral(b) -> np.ndarray:
    """Embed a (possibly rectangular) block B as [[0, B], [-B^T, 0]].

    The result is skew-symmetric and anticommutes with the grading
    diag(1_rows, -1_cols).
    """
    b = as_real_matrix(b)
    n, m = b.shape
    t = np.zeros((n + m, n + m))
    t[:n, n:] = b
    t[n:, :n] = -b.T
    return t


def embed_chiral_path(path: OperatorPath) -> OperatorPath:
    """Chiral skew-adjoint doubling of a path of general matrices."""
    n, m = path.at(path.t_start).shape
    frame = ChiralFrame(n, m)
    return OperatorPath(
        path.interval,
        lambda t: embed_chiral(path.evaluator(t)),
        "chiral-skew",
        frame,
        n - m,
    )


def sf2_finite(t0, t1) -> Z2:
    """Two-endpoint Z2 flow of invertible skew matrices of equal dimension.

    Equal to the product of the Pfaffian signs, which coincides with the
    determinant sign of any invertible congruence mapping one endpoint to
    the other.
    """
    a0 = as_real_matrix(t0)
    a1 = as_real_matrix(t1)
    if a0.shape != a1.shape or a0.shape[0] != a0.shape[1]:
        raise DimensionError(f"matching square shapes required: {a0.shape} vs {a1.shape}")
    if a0.shape[0] % 2:
        raise DimensionError("even dimension required")
    for a in (a0, a1):
        sv = singular_values(a)
        if sv.size and sv[0] <= tol.inv(sv[-1]):
            raise NotAdmissibleError("skew endpoint is singular within tolerance")
    s0 = pfaffian_sign(a0)
    s1 = pfaffian_sign(a1)
    if s0 == 0 or s1 == 0:
        raise NotAdmissibleError("Pfaffian sign vanished on a nominally invertible input")
    return Z2(s0) * Z2(s1)


# ---------------------------------------------------------------------------
# windowed path engine


class _PathData:
    """Caches path evaluations and the eigensystem of -T^2 per parameter."""

    def __init__(self, path: OperatorPath):
        self.path = path
        self._cache = {}
        self.sigma_scale = 0.0
        self.step_bound = math.inf

    def at(self, t: float):
        key = float(t)
        rec = self._cache.get(key)
        if rec is None:
            m = self.path.at(key)
            m = (m - m.T) / 2.0
            sv, v = skew_singular_system(m)
            rec = (m, sv, v)
            self._cache[key] = rec
            if sv.size:
                self.sigma_scale = max(self.sigma_scale, float(sv[-1]))
        return rec

    @property
    def evaluations(self) -> int:
        return len(self._cache)


def _pairwise_window_continuity(bases) -> bool:
    """Check that all pairs of equal-rank subspaces stay WINDOW_EPS-close."""
    k = bases[0].shape[1]
    if k == 0:
        return True
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            overlap = bases[i].T @ bases[j]
            smin = np.linalg.svd(overlap, compute_uv=False)[-1]
            if smin < _COS_MIN:
                return False
    return True


def _segment_window(data: _PathData, lo: float, hi: float, n_grid: int, rng):
    """Try to find a valid window radius for one segment.

    Returns (a, rank) or None when the segment must be bisected.  A valid
    radius lies in a gap of the singular spectrum common to all samples,
    inflated by the largest step between consecutive samples: by Weyl's
    inequality this guarantees that no singular value can cross the radius
    between samples, so the window rank is constant over the whole segment
    (a crossing inside a segment is forced into a positive-rank window).
    The windowed subspaces of all samples must also be pairwise
    WINDOW_EPS-close.
    """
    ts = np.linspace(lo, hi, n_grid)
    recs = [data.at(t) for t in ts]
    n = recs[0][0].shape[0]
    svs = np.stack([r[1] for r in recs])
    s_seg = float(svs.max()) if svs.size else 0.0

    # path continuity at this sampling resolution
    bound = data.step_bound
    steps = [np.linalg.norm(r0[0] - r1[0], 2) for r0, r1 in zip(recs[:-1], recs[1:])]
    if steps and max(steps) > bound:
        return None
    slack = 0.75 * max(steps) if steps else 0.0

    margin = 4.0 * tol.gap(max(s_seg, 1e-300)) + slack
    lo_env = svs.max(axis=0)
    hi_env = svs.min(axis=0)

    candidates = []
    for k in range(0, n + 1, 2):
        glo = float(lo_env[k - 1]) if k > 0 else 0.0
        ghi = float(hi_env[k]) if k < n else math.inf
        if ghi - glo > 2.0 * margin:
            candidates.append((k, glo, ghi))
    if not candidates:
        return None

    # preferred radius: half the smallest nonzero endpoint singular value
    floor = tol.inv(max(data.sigma_scale, 1e-300))
    pref = None
    end_sv = np.concatenate([recs[0][1], recs[-1][1]])
    positive = end_sv[end_sv > max(floor, margin)]
    if positive.size:
        pref = float(positive.min()) / 2.0

    def order_key(c):
        k, glo, ghi = c
        contains_pref = pref is not None and glo + margin < pref < ghi - margin
        return (0 if contains_pref else 1, k)

    candidates.sort(key=order_key)
    if rng is not None:
        rng.shuffle(candidates)

    for k, glo, ghi in candidates:
        if math.isinf(ghi):
            a = glo + margin + max(s_seg, glo, 1.0) * 0.75
        elif pref is not None and glo + margin < pref < ghi - margin and rng is None:
            a = pref
        else:
            u = 0.5 if rng is None else float(rng.uniform(0.3, 0.7))
            a = (glo + margin) + u * ((ghi - margin) - (glo + margin))
        if a <= margin:
            continue
        bases = [r[2][:, :k] for r in recs]
        if not _pairwise_window_continuity(bases):
            continue
        return a, k
    return None


def _kernel_lift(data: _PathData, t: float, a_min: float,
                 frame: Optional[ChiralFrame], rng) -> Optional[np.ndarray]:
    """Skew perturbation lifting the near-kernel of the path matrix at t.

    Pairs of near-kernel directions receive canonical 2x2 skew blocks of
    scale delta = a_min/10 (kept inside both adjacent windows); in the
    chiral case each pair joins a +grading vector with a -grading vector so
    the perturbation stays chiral.  Directions strictly below delta/2 count
    as kernel, so the lifted block dominates them and the unlifted part is
    untouched (the cluster spans an invariant subspace).
    """
    delta = a_min / 10.0
    if rng is not None:
        delta *= float(rng.uniform(0.2, 1.0))
    threshold = delta / 2.0
    _, sv, v = data.at(t)
    cluster = sv < threshold
    m = int(cluster.sum())
    if m == 0:
        return None
    if m % 2:
        raise RefinementError(
            f"odd near-kernel cluster of size {m} at t={t}; cannot lift"
        )
    basis = v[:, cluster]

    pairs = []
    if frame is not None:
        j_diag = np.concatenate([np.ones(frame.n_plus), -np.ones(frame.n_minus)])
        c = basis.T @ (j_diag[:, None] * basis)
        c = (c + c.T) / 2.0
        w, rot = np.linalg.eigh(c)
        if np.all(np.abs(np.abs(w) - 1.0) < 0.1):
            minus = basis @ rot[:, w < 0]
            plus = basis @ rot[:, w > 0]
            if plus.shape[1] == minus.shape[1]:
                if rng is not None:
                    plus = plus @ _random_orthogonal(rng, plus.shape[1])
                    minus = minus @ _random_orthogonal(rng, minus.shape[1])
                pairs = [(plus[:, i], minus[:, i]) for i in range(plus.shape[1])]
    if not pairs:
        if rng is not None:
            basis = basis @ _random_orthogonal(rng, m)
        pairs = [(basis[:, 2 * i], basis[:, 2 * i + 1]) for i in range(m // 2)]

    r = np.zeros((basis.shape[0], basis.shape[0]))
    for u, w_ in pairs:
        r += delta * (np.outer(u, w_) - np.outer(w_, u))
    return r


def _random_orthogonal(rng, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0))
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def sf2_path(path: OperatorPath, *, rng=None, initial_samples: int = 9,
             presplit=()) -> FlowResult:
    """Z2-valued spectral flow of an admissible path of skew matrices.

    The interval is partitioned adaptively; on each segment the flow is
    accumulated on the spectral subspace below a window radius chosen in a
    gap of the singular spectrum common to the whole segment.  Interior
    partition points with a kernel are lifted by a small skew perturbation
    shared between the two adjacent windows.  The returned report records
    every window with its radius, rank and Z2 factor; their product is the
    flow.

    A generator ``rng`` randomizes all admissible choices (partition,
    radii, lift perturbations); by the well-definedness of the flow the
    result does not depend on them.
    """
    if path.symmetry_tag not in ("skew", "chiral-skew"):
        raise ConfigError("sf2_path requires a skew or chiral-skew path")
    data = _PathData(path)
    t0, t1 = path.interval

    for t in (t0, t1):
        # a true SVD resolves tiny singular values that the squared
        # eigendecomposition floors at sqrt(eps) * sigma_max
        sv = singular_values(data.at(t)[0])
        if sv.size == 0:
            continue
        if sv[0] <= tol.inv(sv[-1]):
            raise NotAdmissibleError(
                f"path endpoint at t={t} is singular (sigma_min={sv[0]:.3e})"
            )
    if data.at(t0)[0].shape[0] % 2:
        raise DimensionError("skew flow requires even ambient dimension")

    data.step_bound = 0.1 * min(
        float(data.at(t0)[1][0]) if data.at(t0)[1].size else math.inf,
        float(data.at(t1)[1][0]) if data.at(t1)[1].size else math.inf,
    )
    if not math.isfinite(data.step_bound):
        data.step_bound = math.inf  # 0-dimensional path

    n_grid = max(3, int(initial_samples))

    cuts = sorted(set(float(c) for c in presplit if t0 < float(c) < t1))
    if rng is not None and not cuts:
        extra = int(rng.integers(0, 3))
        pad = 0.05 * (t1 - t0)
        cuts = sorted(float(t) for t in
                      rng.uniform(t0 + pad, t1 - pad, size=extra))
    points = [t0]
    for c in cuts:  # keep segments comfortably above the refinement floor
        if c - points[-1] > 10 * tol.MIN_SEGMENT and t1 - c > 10 * tol.MIN_SEGMENT:
            points.append(c)
    points.append(t1)
    stack = [(points[i], points[i + 1], 0) for i in range(len(points) - 1)]

    accepted = []
    max_depth = 0
    while stack:
        lo, hi, depth = stack.pop()
        max_depth = max(max_depth, depth)
        choice = _segment_window(data, lo, hi, n_grid, rng)
        if choice is None:
            if hi - lo < tol.MIN_SEGMENT:
                raise RefinementError(
                    f"no valid spectral window above segment length "
                    f"{tol.MIN_SEGMENT} near t={lo}"
                )
            mid = lo + (hi - lo) / 2.0
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
            continue
        accepted.append((lo, hi, choice[0], choice[1]))
    accepted.sort(key=lambda seg: seg[0])

    # shared kernel lifts at interior partition points
    lifts = {}
    for i in range(len(accepted) - 1):
        t_mid = accepted[i][1]
        a_min = min(accepted[i][2], accepted[i + 1][2])
        r = _kernel_lift(data, t_mid, a_min, path.frame, rng)
        if r is not None:
            lifts[t_mid] = r

    windows = []
    for lo, hi, a, k in accepted:
        windows.append(_window_factor(data, lo, hi, a, k, lifts))
    value = z2_product(w.factor for w in windows)
    return FlowResult(value, windows, max_depth, data.evaluations)


def _window_factor(data: _PathData, lo: float, hi: float, a: float, k: int,
                   lifts) -> SpectralWindow:
    m_lo, sv_lo, v_lo = data.at(lo)
    m_hi, sv_hi, v_hi = data.at(hi)
    if int((sv_lo < a).sum()) != k or int((sv_hi < a).sum()) != k:
        raise RefinementError("window rank drifted between validation and use")
    u_p = v_lo[:, :k]
    u_q = v_hi[:, :k]

    r_lo = lifts.get(lo)
    r_hi = lifts.get(hi)
    pert_lo = u_p.T @ r_lo @ u_p if r_lo is not None else np.zeros((k, k))
    s_lo = u_p.T @ m_lo @ u_p + pert_lo
    s_lo = (s_lo - s_lo.T) / 2.0

    if k:
        overlap = u_q.T @ u_p
        phi, sig, psit = np.linalg.svd(overlap)
        if sig[-1] < max(tol.transport(), _COS_MIN / 2.0):
            raise TransportError(
                f"window transport ill-conditioned on [{lo}, {hi}]"
            )
        f_q = u_q @ (phi @ psit)
    else:
        f_q = u_q
    pert_hi = f_q.T @ r_hi @ f_q if r_hi is not None else np.zeros((k, k))
    s_hi = f_q.T @ m_hi @ f_q + pert_hi
    s_hi = (s_hi - s_hi.T) / 2.0

    try:
        factor = sf2_finite(s_lo, s_hi)
    except NotAdmissibleError as exc:
        raise RefinementError(
            f"restricted endpoint singular on window [{lo}, {hi}]: {exc}"
        ) from exc
    return SpectralWindow(lo, hi, a, k, factor, u_p, s_lo, s_hi, pert_lo, pert_hi)


# ---------------------------------------------------------------------------
# parity engines


def parity_path(path: OperatorPath, *, rng=None, initial_samples: int = 9) -> Z2:
    """Parity of an admissible path, via the windowed Z2 flow.

    General square families are doubled to chiral skew-adjoint form first;
    chiral self-adjoint families are converted through the grading root;
    skew families are passed through unchanged.
    """
    tag = path.symmetry_tag
    if tag == "general":
        b = path.at(path.t_start)
        if b.shape[0] != b.shape[1]:
            raise DimensionError(
                "rectangular families need parity_path_general"
            )
        flow = sf2_path(embed_chiral_path(path), rng=rng,
                        initial_samples=initial_samples)
    elif tag == "chiral-selfadjoint":
        flow = sf2_path(selfadjoint_path_to_skew(path), rng=rng,
                        initial_samples=initial_samples)
    else:
        flow = sf2_path(path, rng=rng, initial_samples=initial_samples)
    return flow.value


def parity_path_general(path: OperatorPath, *, rng=None,
                        n_samples: int = 65) -> Z2:
    """Parity of a path of rectangular blocks with constant nonzero index.

    At the endpoints the doubled skew operator must have kernel dimension
    exactly ``|declared_index|``.  A continuous grading-invariant family of
    kernel projections is tracked along the path; the flow of the family
    restricted to its orthocomplement (expressed in transported frames) is
    the parity.  The result does not depend on the kernel-family choice.
    """
    if path.symmetry_tag != "general":
        raise ConfigError("parity_path_general expects a path of plain blocks")
    b0 = path.at(path.t_start)
    n_rows, n_cols = b0.shape
    d = abs(path.declared_index)
    if d != abs(n_rows - n_cols):
        raise ConfigError("declared index inconsistent with block shape")
    if d == 0:
        return parity_path(path, rng=rng)

    embedded = embed_chiral_path(path)
    data = _PathData(embedded)
    t0, t1 = path.interval
    dim = n_rows + n_cols
    j_diag = np.concatenate([np.ones(n_rows), -np.ones(n_cols)])

    # endpoint admissibility: kernel dimension exactly the block index,
    # counted on a true SVD (accurate for tiny singular values)
    for t in (t0, t1):
        sv = singular_values(data.at(t)[0])
        k_dim = int((sv <= tol.inv(float(sv[-1])) * 10).sum())
        if k_dim != d:
            raise NotAdmissibleError(
                f"endpoint kernel dimension {k_dim} != |index| {d} at t={t}"
            )

    ts = list(np.linspace(t0, t1, max(3, n_samples)))
    frames = {}

    def kernel_frame(t, prev):
        _, sv, v = data.at(t)
        floor = tol.inv(max(data.sigma_scale, 1e-300)) * 10
        theta = max(floor, 2.0 * float(sv[d - 1]))
        c = int((sv < theta).sum())
        if c < d:
            raise RefinementError(f"kernel family lost rank at t={t}")
        cluster = v[:, :c]
        if c == d or prev is None:
            f = cluster[:, :d]
        else:
            coords = cluster.T @ prev
            phi, sig, psit = np.linalg.svd(coords, full_matrices=False)
            if sig[-1] < tol.transport():
                raise RefinementError(
                    f"kernel family discontinuous at t={t}"
                )
            f = cluster @ (phi @ psit)
        # symmetrize to a grading-invariant family and re-project
        p = f @ f.T
        p = (p + (j_diag[:, None] * p) * j_diag[None, :]) / 2.0
        w, vec = np.linalg.eigh((p + p.T) / 2.0)
        if w[-d] < 0.5:
            raise RefinementError(
                f"kernel family is not grading-invariant at t={t}"
            )
        return vec[:, -d:]

    # first pass with refinement of the sample grid
    while True:
        ok = True
        prev = None
        frames.clear()
        inserts = []
        for i, t in enumerate(ts):
            f = kernel_frame(t, prev)
            if prev is not None:
                smin = np.linalg.svd(prev.T @ f, compute_uv=False)[-1]
                if smin < _COS_MIN:
                    if ts[i] - ts[i - 1] < tol.MIN_SEGMENT:
                        raise RefinementError(
                            "kernel family discontinuous at the resolution floor"
                        )
                    inserts.append((i, (ts[i - 1] + ts[i]) / 2.0))
                    ok = False
            frames[t] = f
            prev = f
        if ok:
            break
        for i, t_new in reversed(inserts):
            ts.insert(i, t_new)

    # complement frames, transported along the samples
    comp = np.linalg.svd(frames[ts[0]], full_matrices=True)[0][:, d:]
    restricted = []
    for t in ts:
        f = frames[t]
        q = np.eye(dim) - f @ f.T
        x = q @ comp
        phi, sig, psit = np.linalg.svd(x, full_matrices=False)
        if sig[-1] < tol.transport():
            raise RefinementError(f"complement transport degenerate at t={t}")
        comp = phi @ psit
        m = data.at(t)[0]
        s = comp.T @ m @ comp
        restricted.append((s - s.T) / 2.0)

    reduced = OperatorPath.from_samples(ts, restricted, "skew")
    return sf2_path(reduced, rng=rng).value


# ---------------------------------------------------------------------------
# degree and symmetry conversions


def leray_schauder_degree(k_mat) -> Z2:
    """Degree of 1 + K: (-1)^n with n the eigenvalue count of K below -1.

    Complex-conjugate eigenvalue pairs cannot contribute; eigenvalues are
    treated as real when their imaginary part is below the realness
    threshold.  Coincides with the determinant sign of 1 + K.
    """
    k = as_real_matrix(k_mat)
    if k.shape[0] != k.shape[1]:
        raise DimensionError("square matrix required")
    n = k.shape[0]
    if n == 0:
        return Z2(1)
    one_plus = np.eye(n) + k
    sv = singular_values(one_plus)
    if sv[0] <= tol.inv(sv[-1]):
        raise SingularError("1 + K is singular within tolerance")
    eig = np.linalg.eigvals(k)
    smax = float(singular_values(k)[-1]) if max_abs(k) else 0.0
    real = eig[np.abs(eig.imag) <= tol.eig_imag(max(smax, 1e-300))]
    count = int(np.sum(real.real < -1.0))
    return Z2(1) if count % 2 == 0 else Z2(-1)


def selfadjoint_to_skew(h_mat, frame: ChiralFrame) -> np.ndarray:
    """Convert a chiral self-adjoint matrix to its chiral skew-adjoint form.

    For H = [[0, B], [B^T, 0]] the result is [[0, B], [-B^T, 0]]; this is the
    real form of conjugation by the square root of the grading.
    """
    h = as_real_matrix(h_mat)
    if h.shape[0] != h.shape[1] or h.shape[0] != frame.dim:
        raise DimensionError("matrix does not match the chiral frame")
    t = tol.sym(max_abs(h))
    if max_abs(h - h.T) > t:
        raise SymmetryError("matrix is not symmetric")
    np_ = frame.n_plus
    if max_abs(h[:np_, :np_]) > t or max_abs(h[np_:, np_:]) > t:
        raise SymmetryError("matrix does not anticommute with the grading")
    return embed_chiral(h[:np_, np_:])


def selfadjoint_path_to_skew(path: OperatorPath) -> OperatorPath:
    """Pointwise chiral-selfadjoint to chiral-skew conversion of a path."""
    if path.symmetry_tag != "chiral-selfadjoint":
        raise ConfigError("expected a chiral-selfadjoint path")
    frame = path.frame
    return OperatorPath(
        path.interval,
        lambda t: selfadjoint_to_skew(path.evaluator(t), frame),
        "chiral-skew",
        frame,
        frame.n_plus - frame.n_minus,
    )


def k_real_reduce(h_mat, k_mat, frame: ChiralFrame) -> np.ndarray:
    """Reduce a K-real chiral self-adjoint complex matrix to its real form.

    K must be a real symmetric involution commuting with the grading, and H
    must satisfy K conj(H) K = H.  Conjugation by the root of K with spectrum
    {1, i} produces a real symmetric chiral matrix with the same spectrum.
    """
    h = np.asarray(h_mat, dtype=complex)
    k = as_real_matrix(k_mat)
    n = k.shape[0]
    if k.shape[0] != k.shape[1] or h.shape != k.shape or frame.dim != n:
        raise DimensionError("H, K and the frame must share one dimension")
    scale_k = max(max_abs(k), 1.0)
    t_k = tol.sym(scale_k)
    if max_abs(k - k.T) > t_k or max_abs(k @ k - np.eye(n)) > 10 * t_k:
        raise SymmetryError("K is not a symmetric involution")
    j = frame.grading()
    if max_abs(k @ j - j @ k) > t_k:
        raise SymmetryError("K does not commute with the grading")
    scale_h = max(float(np.max(np.abs(h))) if h.size else 0.0, 1e-300)
    t_h = tol.sym(scale_h)
    if float(np.max(np.abs(h - h.conj().T))) > t_h:
        raise SymmetryError("H is not self-adjoint")
    if float(np.max(np.abs(j @ h @ j + h))) > t_h:
        raise SymmetryError("H is not chiral")
    if float(np.max(np.abs(k @ h.conj() @ k - h))) > t_h:
        raise SymmetryError("H is not K-real")
    p_minus = (np.eye(n) - k) / 2.0
    l_root = (np.eye(n) - p_minus) + 1j * p_minus
    reduced = l_root.conj().T @ h @ l_root
    if float(np.max(np.abs(reduced.imag))) > 10 * t_h:
        raise SymmetryError("reduction did not produce a real matrix")
    out = reduced.real
    return (out + out.T) / 2.0
