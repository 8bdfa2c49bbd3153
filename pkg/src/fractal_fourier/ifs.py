"""Self-similar iterated function systems and their cylinder structure.

An IFS here is a finite family of contracting similarities

    f_i(x) = r_i * O_i x + t_i,      0 < r_i < 1,  O_i orthogonal,

together with probability weights p_i.  The attractor K and the invariant
measure mu (mu = sum_i p_i f_i(mu)) are never constructed explicitly; all
geometry is routed through a certified support ball: the closed ball
centred at the barycenter b of mu with radius

    R = max_i |f_i(b) - b| / (1 - r_i),

which is invariant under every f_i and therefore contains K.

The central combinatorial object is the stopping decomposition at scale
delta: the antichain of composition words w whose accumulated ratio first
drops to <= delta.  Its cylinders cover supp(mu), carry weights summing
to one, and have ratios in [rho_min * delta, delta].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import BadConfig, InvalidIFS, ResourceExceeded, Unsupported

ORTHOGONALITY_TOL = 1e-9     # max-entry deviation of O^T O from identity
DEDUP_TOL = 1e-8             # orientation-product dedup tolerance
WEIGHT_SUM_TOL = 1e-12
FIXED_POINT_TOL = 1e-12      # below this, fixed points count as shared
DEFAULT_LEAF_BUDGET = 10_000_000

SEPARATION_KINDS = ("SSC", "OSC", "ESC", "none")


def _as_matrix(value, k: int) -> np.ndarray:
    mat = np.asarray(value, dtype=float)
    if mat.shape == (k * k,):
        mat = mat.reshape(k, k)
    if mat.shape != (k, k):
        raise InvalidIFS(f"orientation must be {k}x{k}, got shape {mat.shape}")
    return mat


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SimilarityMap:
    """One contracting similarity x -> ratio * orientation @ x + translation."""

    ratio: float
    orientation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        translation = np.atleast_1d(np.asarray(self.translation, dtype=float))
        k = translation.shape[0]
        orientation = _as_matrix(self.orientation, k)
        if not (0.0 < self.ratio < 1.0):
            raise InvalidIFS(f"ratio must lie in (0, 1), got {self.ratio}")
        defect = np.max(np.abs(orientation.T @ orientation - np.eye(k)))
        if defect > ORTHOGONALITY_TOL:
            raise InvalidIFS(
                f"orientation is not orthogonal (defect {defect:.3e} > {ORTHOGONALITY_TOL})"
            )
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "orientation", _readonly(orientation))
        object.__setattr__(self, "translation", _readonly(translation))

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    @property
    def linear_part(self) -> np.ndarray:
        return self.ratio * self.orientation

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Apply the map to one point (k,) or a batch (n, k)."""
        pts = np.asarray(points, dtype=float)
        return pts @ (self.ratio * self.orientation.T) + self.translation

    def fixed_point(self) -> np.ndarray:
        """The unique x with f(x) = x, from the linear solve (I - rO) x = t."""
        k = self.dim
        return np.linalg.solve(np.eye(k) - self.linear_part, self.translation)


def fixed_point(m: SimilarityMap) -> np.ndarray:
    """Fixed point of a contracting similarity (residual <= 1e-10)."""
    return m.fixed_point()


@dataclass(frozen=True, eq=False)
class SelfSimilarIFS:
    """A weighted self-similar IFS; immutable and safe to share across threads."""

    maps: tuple
    weights: tuple
    ambient_dim: int = 0

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) < 2:
            raise InvalidIFS("an IFS needs at least two maps")
        k = maps[0].dim
        if any(m.dim != k for m in maps):
            raise InvalidIFS("all maps must share one ambient dimension")
        if self.ambient_dim and self.ambient_dim != k:
            raise InvalidIFS(
                f"ambient_dim={self.ambient_dim} disagrees with maps (k={k})"
            )
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(maps):
            raise InvalidIFS("weights and maps must have equal length")
        if any(not (0.0 < w < 1.0) for w in weights):
            raise InvalidIFS("weights must lie strictly in (0, 1)")
        if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidIFS(
                f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got {sum(weights)!r}"
            )
        fps = np.array([m.fixed_point() for m in maps])
        spread = max(
            float(np.linalg.norm(fps[i] - fps[j]))
            for i in range(len(maps))
            for j in range(i + 1, len(maps))
        )
        if spread < FIXED_POINT_TOL:
            raise InvalidIFS(
                "maps share a common fixed point; the invariant measure would be an atom"
            )
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "ambient_dim", k)

    # -- derived geometry ---------------------------------------------------

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @cached_property
    def ratios(self) -> np.ndarray:
        return _readonly(np.array([m.ratio for m in self.maps]))

    @cached_property
    def weight_array(self) -> np.ndarray:
        return _readonly(np.array(self.weights))

    @cached_property
    def min_ratio(self) -> float:
        return float(min(m.ratio for m in self.maps))

    @cached_property
    def barycenter(self) -> np.ndarray:
        """b = int x dmu, from the stationarity equation (I - sum p_i r_i O_i) b = sum p_i t_i."""
        k = self.ambient_dim
        lin = sum(w * m.linear_part for w, m in zip(self.weights, self.maps))
        rhs = sum(w * m.translation for w, m in zip(self.weights, self.maps))
        return _readonly(np.linalg.solve(np.eye(k) - lin, rhs))

    @cached_property
    def support_radius(self) -> float:
        """Radius of the certified support ball around the barycenter.

        The ball B(b, R) with R = max_i |f_i(b)-b|/(1-r_i) satisfies
        f_i(B) subset B for every i, hence contains the attractor.
        """
        b = self.barycenter
        return max(
            float(np.linalg.norm(m(b) - b)) / (1.0 - m.ratio) for m in self.maps
        )

    @cached_property
    def support_diameter(self) -> float:
        return 2.0 * self.support_radius

    @cached_property
    def max_point_norm(self) -> float:
        """sup_{x in supp(mu)} |x| <= |b| + R; bounds derivatives of mu-hat."""
        return float(np.linalg.norm(self.barycenter)) + self.support_radius

    @cached_property
    def is_homogeneous(self) -> bool:
        """True iff all linear parts r_i O_i agree entrywise within 1e-12."""
        first = self.maps[0].linear_part
        return all(
            np.max(np.abs(m.linear_part - first)) <= 1e-12 for m in self.maps[1:]
        )

    def config_key(self) -> tuple:
        """Hashable identity used to recognise repeated factor measures."""
        return tuple(
            (m.ratio, m.orientation.tobytes(), m.translation.tobytes(), w)
            for m, w in zip(self.maps, self.weights)
        )


def is_homogeneous(ifs: SelfSimilarIFS) -> bool:
    return ifs.is_homogeneous


# -- convenience constructors -------------------------------------------------


def ifs_1d(
    ratios: Sequence[float],
    translations: Sequence[float],
    weights: Optional[Sequence[float]] = None,
    signs: Optional[Sequence[int]] = None,
) -> SelfSimilarIFS:
    """Build an IFS on the line from per-map (ratio, translation[, sign])."""
    n = len(ratios)
    if weights is None:
        weights = [1.0 / n] * n
    if signs is None:
        signs = [1] * n
    maps = tuple(
        SimilarityMap(r, np.array([[float(s)]]), np.array([t]))
        for r, t, s in zip(ratios, translations, signs)
    )
    return SelfSimilarIFS(maps, tuple(weights))


def cantor_ifs() -> SelfSimilarIFS:
    """Middle-thirds Cantor system {x/3, x/3 + 2/3} with equal weights."""
    return ifs_1d([1 / 3, 1 / 3], [0.0, 2 / 3])


def uniform_ifs(lo: float = 0.0, hi: float = 1.0) -> SelfSimilarIFS:
    """{x/2 + lo/2, x/2 + hi/2}: generates the uniform measure on [lo, hi]."""
    if not hi > lo:
        raise BadConfig("need hi > lo")
    return ifs_1d([0.5, 0.5], [lo / 2.0, hi / 2.0])


def missing_digit_ifs(base: int, digits: Sequence[int]) -> SelfSimilarIFS:
    """Base-b system keeping the digit set D: maps x -> (x + d)/b, equal weights."""
    if base < 2 or len(digits) < 2:
        raise BadConfig("need base >= 2 and at least two digits")
    return ifs_1d([1.0 / base] * len(digits), [d / base for d in digits])


# -- cylinder words and stopping decompositions -------------------------------


@dataclass(frozen=True, eq=False)
class CylinderWord:
    """A finite composition word with its accumulated similarity data.

    ``anchor`` is the image of the support barycenter under the word; it is
    the representative point used by all quadrature schemes.
    """

    letters: tuple
    ratio: float
    orientation: np.ndarray
    translation: np.ndarray
    weight: float
    anchor: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.letters)


class _WordArrays:
    """Column-wise storage of an antichain of cylinder words."""

    __slots__ = ("letters", "ratio", "weight", "translation", "orientation", "anchor")

    def __init__(self, letters, ratio, weight, translation, orientation, anchor):
        self.letters = letters          # tuple of letter tuples
        self.ratio = ratio              # (n,)
        self.weight = weight            # (n,)
        self.translation = translation  # (n, k)
        self.orientation = orientation  # (n, k, k)
        self.anchor = anchor            # (n, k)


@dataclass(frozen=True, eq=False)
class StoppingDecomposition:
    """Cylinder cover of supp(mu) by first-passage words at a given scale."""

    scale: float
    ratio_floor: float
    words: tuple

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([w.weight for w in self.words])

    @cached_property
    def ratios(self) -> np.ndarray:
        return np.array([w.ratio for w in self.words])

    @cached_property
    def anchors(self) -> np.ndarray:
        return np.array([w.anchor for w in self.words])

    @cached_property
    def translations(self) -> np.ndarray:
        return np.array([w.translation for w in self.words])

    @cached_property
    def orientations(self) -> np.ndarray:
        return np.array([w.orientation for w in self.words])

    def __len__(self) -> int:
        return len(self.words)


def _enumerate_stopping(ifs: SelfSimilarIFS, scale: float, budget: int):
    """Depth-first enumeration of the stopping antichain, lexicographic order."""
    k = ifs.ambient_dim
    b = ifs.barycenter
    out = []
    # Stack holds (letters, ratio, orientation, translation, weight); children
    # are pushed in reverse letter order so pops visit letters ascending.
    root = ((), 1.0, np.eye(k), np.zeros(k), 1.0)
    stack = [root]
    while stack:
        letters, ratio, orient, trans, weight = stack.pop()
        if ratio <= scale:
            out.append(
                CylinderWord(
                    letters=letters,
                    ratio=ratio,
                    orientation=_readonly(orient),
                    translation=_readonly(trans),
                    weight=weight,
                    anchor=_readonly(ratio * orient @ b + trans),
                )
            )
            if len(out) > budget:
                raise ResourceExceeded(
                    f"stopping decomposition exceeds {budget} leaves", "leaf_budget"
                )
            continue
        for i in range(ifs.n_maps - 1, -1, -1):
            m = ifs.maps[i]
            stack.append(
                (
                    letters + (i,),
                    ratio * m.ratio,
                    orient @ m.orientation,
                    trans + ratio * orient @ m.translation,
                    weight * ifs.weights[i],
                )
            )
    return tuple(out)


def stopping_decomposition(
    ifs: SelfSimilarIFS,
    scale: float,
    budget: int = DEFAULT_LEAF_BUDGET,
) -> StoppingDecomposition:
    """First-passage cylinder cover at the given scale.

    Every returned word has ratio <= scale while its parent prefix has
    ratio > scale; ratios therefore lie in [min_ratio * scale, scale] and
    weights sum to one.
    """
    if not (0.0 < scale < 1.0):
        raise BadConfig(f"scale must lie in (0, 1), got {scale}")
    words = _enumerate_stopping(ifs, scale, budget)
    return StoppingDecomposition(
        scale=scale, ratio_floor=ifs.min_ratio * scale, words=words
    )


def _homogeneous_depth(ifs: SelfSimilarIFS, scale: float) -> int:
    """Least d with r^d <= scale, accumulated exactly as word ratios are."""
    depth, ratio = 0, 1.0
    r = ifs.maps[0].ratio
    while ratio > scale:
        ratio *= r
        depth += 1
    return depth


def _homogeneous_leaf_arrays(ifs: SelfSimilarIFS, depth: int, budget: int):
    """Vectorised leaf data for a homogeneous system at uniform depth.

    Returns (ratio, weights, translations, anchors) with rows in
    lexicographic word order; the shared orientation is O^depth.
    """
    n_leaves = ifs.n_maps ** depth
    if n_leaves > budget:
        raise ResourceExceeded(
            f"homogeneous depth-{depth} decomposition needs {n_leaves} leaves > budget {budget}",
            "leaf_budget",
        )
    k = ifs.ambient_dim
    trans = np.zeros((1, k))
    weights = np.ones(1)
    ratio = 1.0
    orient = np.eye(k)
    # Prepend letters one at a time: words in lexicographic order satisfy
    # t_{i w} = t_i + r_i O_i t_w, so each level concatenates letter-major.
    for _ in range(depth):
        blocks = [
            m.translation + (trans @ (m.ratio * m.orientation.T)) for m in ifs.maps
        ]
        trans = np.concatenate(blocks, axis=0)
        weights = np.concatenate([w * weights for w in ifs.weights])
        ratio *= ifs.maps[0].ratio
        orient = ifs.maps[0].orientation @ orient
    anchors = trans + ratio * (ifs.barycenter @ orient.T)
    return ratio, orient, weights, trans, anchors


def chaos_game(
    ifs: SelfSimilarIFS,
    n_points: int,
    seed: int = 0,
    burn_in: int = 64,
    n_chains: int = 1024,
) -> np.ndarray:
    """Deterministic chaos-game sample of supp(mu), shape (n_points, k).

    Runs a fixed number of parallel chains so the output depends only on
    the seed, never on thread count or chunking.
    """
    if n_points <= 0:
        raise BadConfig("n_points must be positive")
    rng = np.random.default_rng(seed)
    chains = min(n_chains, n_points)
    steps = burn_in + -(-n_points // chains)  # ceil division
    x = np.tile(ifs.barycenter, (chains, 1))
    letters = rng.choice(ifs.n_maps, size=(steps, chains), p=ifs.weight_array)
    keep = []
    for s in range(steps):
        row = letters[s]
        new = np.empty_like(x)
        for i, m in enumerate(ifs.maps):
            mask = row == i
            if np.any(mask):
                new[mask] = m(x[mask])
        x = new
        if s >= burn_in:
            keep.append(x.copy())
    pts = np.concatenate(keep, axis=0)
    return pts[:n_points]


# -- structural diagnostics ----------------------------------------------------


class GrowthVerdict(str, Enum):
    NON_EXPANDING = "NonExpanding"
    EXPANDING = "Expanding"
    INCONCLUSIVE = "Inconclusive"


def _dedup_count(mats: Iterable[np.ndarray], tol: float = DEDUP_TOL):
    """Deduplicate matrices by rounding entries to the tolerance grid."""
    seen = {}
    for m in mats:
        key = tuple(np.round(m.flatten() / tol).astype(np.int64).tolist())
        if key not in seen:
            seen[key] = m
    return seen


def non_expanding_heuristic(
    ifs: SelfSimilarIFS, depth: int = 12, cap: int = 10_000
) -> GrowthVerdict:
    """Finite-horizon growth test for the orientation semigroup.

    NonExpanding is certain for k <= 2, for commuting orientation parts and
    for semigroups that close up within the horizon.  Expanding is reported
    when the distinct-product counts keep growing geometrically up to the
    horizon (or past the ``cap`` enumeration budget).  Everything else is
    Inconclusive; this is a diagnostic, not a classification of the true
    semigroup.
    """
    if depth < 1:
        raise BadConfig("depth must be >= 1")
    if ifs.ambient_dim <= 2:
        return GrowthVerdict.NON_EXPANDING
    gens = [m.orientation for m in ifs.maps]
    commuting = all(
        np.max(np.abs(a @ b - b @ a)) <= 1e-10 for a in gens for b in gens
    )
    if commuting:
        return GrowthVerdict.NON_EXPANDING
    current = _dedup_count(gens)
    counts = [len(current)]
    total = dict(current)
    for _ in range(1, depth):
        nxt = {}
        for m in current.values():
            for g in gens:
                prod = m @ g
                key = tuple(np.round(prod.flatten() / DEDUP_TOL).astype(np.int64).tolist())
                if key not in total and key not in nxt:
                    nxt[key] = prod
        if not nxt:
            return GrowthVerdict.NON_EXPANDING  # semigroup closed up
        total.update(nxt)
        counts.append(len(nxt))
        current = nxt
        if len(total) > cap:
            break
    # Sustained geometric growth of the per-length counts signals expansion.
    tail = counts[-3:]
    geometric = len(tail) == 3 and all(
        b >= 1.5 * a for a, b in zip(tail, tail[1:])
    )
    if geometric and len(total) >= 64:
        return GrowthVerdict.EXPANDING
    return GrowthVerdict.INCONCLUSIVE


@dataclass(frozen=True)
class SeparationDiagnostic:
    """Finite-depth separation evidence; never a proof about the true IFS."""

    ssc_ok: bool
    overlaps_detected: bool
    esc_distance: float
    depth: int
    note: str = "finite-depth diagnostic only"


def separation_diagnostic(
    ifs: SelfSimilarIFS, depth: int = 5, budget: int = 200_000
) -> SeparationDiagnostic:
    """Probe separation at a fixed depth.

    * ``ssc_ok``: the level-1 images of the support ball are pairwise
      disjoint (sufficient for the SSC, not necessary).
    * ``esc_distance``: min over distinct equal-ratio depth-n word pairs of
      |f_i(0) - f_j(0)|; inf when no two words share a ratio.
    * ``overlaps_detected``: an equal-ratio pair essentially collides
      (distance < 1e-12) or depth-n support-ball images overlap by more
      than the tolerance.
    """
    if ifs.n_maps ** depth > budget:
        raise ResourceExceeded(
            f"{ifs.n_maps}^{depth} words exceed separation budget {budget}",
            "separation_budget",
        )
    b, radius = ifs.barycenter, ifs.support_radius
    centers = np.array([m(b) for m in ifs.maps])
    radii = np.array([m.ratio * radius for m in ifs.maps])
    ssc_ok = True
    for i in range(ifs.n_maps):
        for j in range(i + 1, ifs.n_maps):
            gap = np.linalg.norm(centers[i] - centers[j]) - (radii[i] + radii[j])
            if gap <= 0.0:
                ssc_ok = False
    ratios, trans, weights, orients = _all_words_at_depth(ifs, depth)
    # Group by ratio (quantised log) and take min pairwise translation gap.
    keys = np.round(np.log(ratios) / 1e-9).astype(np.int64)
    esc = math.inf
    for key in np.unique(keys):
        group = trans[keys == key]
        if len(group) < 2:
            continue
        if ifs.ambient_dim == 1:
            srt = np.sort(group[:, 0])
            esc = min(esc, float(np.min(np.diff(srt))))
        else:
            diffs = group[:, None, :] - group[None, :, :]
            dist = np.linalg.norm(diffs, axis=-1)
            np.fill_diagonal(dist, np.inf)
            esc = min(esc, float(dist.min()))
    # Hull-image overlap at depth n: cylinder support balls interpenetrating
    # by more than the tolerance is treated as an observed overlap.
    cyl_centers = trans + np.einsum("n,nij,j->ni", ratios, orients, b)
    cyl_radii = ratios * radius
    dist = np.linalg.norm(cyl_centers[:, None, :] - cyl_centers[None, :, :], axis=-1)
    pen = (cyl_radii[:, None] + cyl_radii[None, :]) - dist
    np.fill_diagonal(pen, -np.inf)
    overlap = float(pen.max()) > 1e-12 or esc < 1e-12
    return SeparationDiagnostic(
        ssc_ok=ssc_ok, overlaps_detected=overlap, esc_distance=esc, depth=depth
    )


def _all_words_at_depth(ifs: SelfSimilarIFS, depth: int):
    """(ratios, translations, weights, orientations) for every depth-n word."""
    k = ifs.ambient_dim
    ratios = np.ones(1)
    trans = np.zeros((1, k))
    weights = np.ones(1)
    orients = np.eye(k)[None, :, :]
    for _ in range(depth):
        new_r, new_t, new_w, new_o = [], [], [], []
        for i, m in enumerate(ifs.maps):
            new_r.append(ratios * m.ratio)
            new_t.append(trans + np.einsum("n,nij,j->ni", ratios, orients, m.translation))
            new_w.append(weights * ifs.weights[i])
            new_o.append(np.einsum("nij,jk->nik", orients, m.orientation))
        ratios = np.concatenate(new_r)
        trans = np.concatenate(new_t)
        weights = np.concatenate(new_w)
        orients = np.concatenate(new_o)
    return ratios, trans, weights, orients


def porosity_flag(
    ifs: SelfSimilarIFS, declared_separation: str, similarity_dim: float
) -> bool:
    """Porosity of the attractor on the line.

    True iff the declared separation implies the weak separation condition
    (SSC or OSC here) and the similarity dimension is strictly below 1.
    Documentation-level flag; no uncertainty exponent is computed.
    """
    if ifs.ambient_dim != 1:
        raise Unsupported("porosity flag is defined for ambient dimension 1 only")
    if declared_separation not in SEPARATION_KINDS:
        raise BadConfig(f"unknown separation kind {declared_separation!r}")
    return declared_separation in ("SSC", "OSC") and similarity_dim < 1.0


# -- JSON description files ---------------------------------------------------


@dataclass(frozen=True)
class IFSDocument:
    """Parsed IFS description file: the system plus its declarations."""

    ifs: SelfSimilarIFS
    declared_separation: str = "none"
    exponents: Mapping[str, float] = field(default_factory=dict)


_IFS_FIELDS = {"ambient_dim", "maps", "weights", "declared_separation", "exponents"}
_MAP_FIELDS = {"ratio", "orientation", "translation"}


def ifs_from_dict(doc: Mapping) -> IFSDocument:
    unknown = set(doc) - _IFS_FIELDS
    if unknown:
        raise BadConfig(f"unknown IFS fields: {sorted(unknown)}")
    try:
        k = int(doc["ambient_dim"])
        raw_maps = doc["maps"]
        weights = doc["weights"]
    except KeyError as exc:
        raise BadConfig(f"missing IFS field: {exc.args[0]}") from exc
    maps = []
    for entry in raw_maps:
        bad = set(entry) - _MAP_FIELDS
        if bad:
            raise BadConfig(f"unknown map fields: {sorted(bad)}")
        try:
            maps.append(
                SimilarityMap(
                    ratio=float(entry["ratio"]),
                    orientation=_as_matrix(entry["orientation"], k),
                    translation=np.asarray(entry["translation"], dtype=float),
                )
            )
        except KeyError as exc:
            raise BadConfig(f"map missing field: {exc.args[0]}") from exc
    separation = doc.get("declared_separation", "none")
    if separation not in SEPARATION_KINDS:
        raise BadConfig(
            f"declared_separation must be one of {SEPARATION_KINDS}, got {separation!r}"
        )
    exponents = dict(doc.get("exponents", {}))
    ifs = SelfSimilarIFS(tuple(maps), tuple(float(w) for w in weights), k)
    return IFSDocument(ifs=ifs, declared_separation=separation, exponents=exponents)


def ifs_to_dict(document: IFSDocument) -> dict:
    ifs = document.ifs
    return {
        "ambient_dim": ifs.ambient_dim,
        "maps": [
            {
                "ratio": m.ratio,
                "orientation": m.orientation.flatten().tolist(),
                "translation": m.translation.tolist(),
            }
            for m in ifs.maps
        ],
        "weights": list(ifs.weights),
        "declared_separation": document.declared_separation,
        "exponents": dict(document.exponents),
    }


def load_ifs(path) -> IFSDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise BadConfig(f"cannot read IFS file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"IFS file {path} is not valid JSON: {exc}") from exc
    return ifs_from_dict(doc)
