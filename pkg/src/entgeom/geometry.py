"""Triangle and tetrahedron geometry of entanglement edge values.

Tetrahedron edge assignment: the tripartition X|Y|ZW (singleton blocks X
and Y) is the skeleton edge joining vertices X and Y.  Under this rule the
polygamy relation E(X|Y|ZW) <= E(X|YW|Z) + E(XW|Y|Z) is exactly the triangle
inequality on face {X, Y, Z}, and it is the only assignment with that
property.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .bipartite import Kind, SPECTRAL_KINDS, as_measure, batch_measure
from .combine import ZERO_TOL
from .errors import (
    FaceInequalityViolation,
    InfeasibleError,
    NotApplicable,
    NotATriangle,
    StrategyError,
)
from .qstate import PureState, make_pure_state

log = logging.getLogger(__name__)

TRIANGLE_SLACK = 1e-12
FACE_SLACK = 1e-9
DEGENERATE_AREA = 1e-14
CASE_TOL = 1e-9
VERTICES = ("A", "B", "C", "D")


def triangle_check(x: float, y: float, z: float, gamma: float = 1.0) -> bool:
    """True iff the largest of x^g, y^g, z^g is at most the sum of the others."""
    p = sorted((float(x) ** gamma, float(y) ** gamma, float(z) ** gamma))
    return p[2] <= (p[0] + p[1]) + TRIANGLE_SLACK * p[2]


def gamma_star(x: float, y: float, z: float) -> float:
    """Largest gamma with (y/x)^gamma + (z/x)^gamma >= 1, for x strictly largest.

    The left side falls strictly from 2 (gamma = 0) towards 0, so the root is
    unique; it is bracketed by doubling and then bisected to 1e-10.
    """
    if x <= max(y, z):
        raise NotApplicable("x is not strictly the largest edge: the relation holds for every exponent")
    if min(y, z) <= 0:
        raise InfeasibleError("an edge below a strictly larger one is zero: no exponent satisfies the relation")
    a, b = y / x, z / x

    def g(t):
        return a**t + b**t - 1.0

    hi = 1.0
    while g(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            raise InfeasibleError("exponent bracket diverged")
    lo = hi / 2.0 if hi > 1.0 else 0.0
    if g(lo) == 0:
        return lo
    return float(bisect(g, lo, hi, xtol=1e-10, rtol=1e-15, maxiter=400))


def gamma_star_unordered(edges) -> float:
    """gamma_star after moving the largest edge first; ties at the top are NotApplicable."""
    a, b, c = sorted((float(v) for v in edges), reverse=True)
    if a - b <= 1e-12 * max(1.0, a):
        raise NotApplicable("top two edges tie")
    return gamma_star(a, b, c)


# ---------------------------------------------------------------- triangles


@dataclass(frozen=True)
class TriangleGeom:
    a: float
    b: float
    c: float
    area: float
    R: float | None
    r: float
    degenerate: bool

    @property
    def rr_product(self) -> float:
        """abc / (2(a+b+c)), equal to R*r for nondegenerate triangles."""
        s = self.a + self.b + self.c
        return self.a * self.b * self.c / (2.0 * s) if s > 0 else 0.0

    def as_dict(self) -> dict:
        return {
            "edges": [self.a, self.b, self.c],
            "area": self.area,
            "circumradius": self.R,
            "inradius": self.r,
            "R_times_r": self.R * self.r if self.R is not None else None,
            "rr_closed_form": self.rr_product,
            "degenerate": self.degenerate,
        }


def heron_area(a: float, b: float, c: float) -> float:
    """Area by Heron's formula in the cancellation-safe sorted form."""
    a, b, c = sorted((float(a), float(b), float(c)), reverse=True)
    q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(q) if q > 0 else 0.0


def triangle_geom(a: float, b: float, c: float) -> TriangleGeom:
    if min(a, b, c) < 0:
        raise NotATriangle("negative edge length", edges=(a, b, c))
    if not triangle_check(a, b, c, 1.0):
        raise NotATriangle(f"edges {a!r}, {b!r}, {c!r} violate the triangle inequality", edges=(a, b, c))
    area = heron_area(a, b, c)
    if area <= DEGENERATE_AREA:
        return TriangleGeom(a, b, c, 0.0, None, 0.0, True)
    return TriangleGeom(a, b, c, area, a * b * c / (4.0 * area), 2.0 * area / (a + b + c), False)


# ------------------------------------------------------------- tetrahedra


def cayley_menger_volume(edges: dict) -> float | None:
    """Volume from six edge lengths keyed by vertex pair ("AB" or ("A", "B")).

    Returns None when the Cayley-Menger determinant is below -1e-12, i.e.
    the lengths do not embed in three dimensions.
    """
    lengths = {}
    for key, val in edges.items():
        lengths[frozenset(key)] = float(val)
    verts = sorted({v for k in lengths for v in k})
    if len(verts) != 4 or len(lengths) != 6:
        raise ValueError("need six edges over four vertices")
    cm = np.ones((5, 5))
    cm[0, 0] = 0.0
    for i, u in enumerate(verts):
        for j, v in enumerate(verts):
            cm[i + 1, j + 1] = 0.0 if i == j else lengths[frozenset((u, v))] ** 2
    det = float(np.linalg.det(cm))
    if det < -1e-12:
        return None
    return math.sqrt(max(det, 0.0) / 288.0)


@dataclass
class TetraGeom:
    values: dict
    gamma: float
    edges: dict
    faces: dict
    case: str
    volume: float | None
    reduced_edge: float | None = None
    pair_values: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "tripartition_values": self.values,
            "edges": self.edges,
            "faces": self.faces,
            "case": self.case,
            "volume": self.volume,
            "reduced_edge": self.reduced_edge,
            "pair_values": self.pair_values,
        }


def tripartition_edge(label: str) -> tuple[str, str, str]:
    """(X, Y, merged block) for a label like "AC|B|D" -> ("B", "D", "AC")."""
    blocks = label.split("|")
    singles = sorted(b for b in blocks if len(b) == 1)
    pair = [b for b in blocks if len(b) == 2]
    if len(blocks) != 3 or len(singles) != 2 or len(pair) != 1:
        raise ValueError(f"{label!r} is not a tripartition of four parties")
    return singles[0], singles[1], pair[0]


def classify_faces(faces: dict) -> str:
    """'A', 'B' or 'C' by comparing each face with the sum of the other three."""
    total = sum(faces.values())
    status = []
    for area in faces.values():
        diff = (total - area) - area
        if abs(diff) <= CASE_TOL * max(1.0, area):
            status.append("B")
        elif diff < 0:
            status.append("C")
        else:
            status.append("A")
    if "C" in status:
        return "C"
    if "B" in status:
        return "B"
    return "A"


def tetra_from_tripartitions(e, gamma: float = 1.0, pair_values: dict | None = None) -> TetraGeom:
    """Tetrahedron skeleton from six tripartition values.

    ``e`` is an EdgeVector4Tri or a mapping label -> value.  ``pair_values``
    maps a tripartition label to the bipartite value of its merged block
    (E(ZW) for X|Y|ZW); it separates case B2 from B3.  Without it, B3 is
    assigned only when every value vanishes.
    """
    values = e.as_dict() if hasattr(e, "as_dict") else dict(e)
    if len(values) != 6:
        raise ValueError("need six tripartition values")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    edges = {}
    merged = {}
    for label, val in values.items():
        x, y, zw = tripartition_edge(label)
        edges[x + y] = float(val) ** gamma
        merged[label] = zw
    faces = {}
    for tri in itertools.combinations(VERTICES, 3):
        sides = [edges[u + v] for u, v in itertools.combinations(tri, 2)]
        top = max(sides)
        if top > sum(sides) - top + FACE_SLACK:
            raise FaceInequalityViolation(
                f"face {''.join(tri)} violates the triangle relation: {sides}",
                face="".join(tri),
                edges=sides,
            )
        faces["".join(tri)] = heron_area(*sides)
    case = classify_faces(faces)
    reduced = None
    if case == "B":
        zeros = [lab for lab, v in values.items() if v <= ZERO_TOL]
        if not zeros:
            case = "B1"
        elif pair_values is not None:
            pairs = [pair_values[lab] for lab in zeros]
            if any(p <= ZERO_TOL for p in pairs):
                case = "B3"
            else:
                case, reduced = "B2", float(pairs[0])
        else:
            case = "B3" if len(zeros) == len(values) else "B2"
            if case == "B2":
                reduced = max(values.values())
    volume = cayley_menger_volume(edges)
    return TetraGeom(
        values=values,
        gamma=gamma,
        edges=edges,
        faces=faces,
        case=case,
        volume=volume,
        reduced_edge=reduced,
        pair_values=dict(pair_values or {}),
    )


# ------------------------------------------------ bipartition triangle (4 parties)

BALANCED_CUTS = (("AB|CD", [0, 1]), ("AC|BD", [0, 2]), ("AD|BC", [0, 3]))


@dataclass
class BipTriangle:
    triangle: TriangleGeom
    cut_values: dict
    gamma: float
    iso_realizable: bool
    iso_volume: float | None

    def as_dict(self) -> dict:
        out = self.triangle.as_dict()
        out.update(
            {
                "gamma": self.gamma,
                "cut_values": self.cut_values,
                "iso_tetrahedron": {"realizable": self.iso_realizable, "volume": self.iso_volume},
            }
        )
        return out


def balanced_cut_values(state: PureState, d) -> dict:
    d = as_measure(d)
    return {
        label: float(batch_measure(state.amplitudes[None, :], state.dims, side, d.kind)[0])
        for label, side in BALANCED_CUTS
    }


def iso_tetra_edges(a: float, b: float, c: float) -> dict:
    """Skeleton with opposite edges equal: AB=CD=a, AC=BD=b, AD=BC=c."""
    return {"AB": a, "CD": a, "AC": b, "BD": b, "AD": c, "BC": c}


def bip_triangle_4(state: PureState, d, gamma: float = 1.0) -> BipTriangle:
    d = as_measure(d)
    if d.kind not in SPECTRAL_KINDS:
        raise StrategyError(f"{d.name} is not one of the marginal-spectrum measures {sorted(k.value for k in SPECTRAL_KINDS)}")
    if state.num_parties != 4:
        raise NotApplicable("bipartition triangle needs four parties")
    vals = balanced_cut_values(state, d)
    a, b, c = (vals[label] ** gamma for label, _ in BALANCED_CUTS)
    if not triangle_check(a, b, c, 1.0):
        raise NotATriangle(f"balanced-cut values {a!r}, {b!r}, {c!r} violate the triangle relation", edges=(a, b, c))
    tri = triangle_geom(a, b, c)
    vol = cayley_menger_volume(iso_tetra_edges(a, b, c))
    return BipTriangle(tri, vals, gamma, vol is not None, vol)


# ------------------------------------------------------------- alpha scans


@dataclass
class RefineConfig:
    iterations: int = 200
    scale: float = 0.05
    seed: int = 0


@dataclass
class AlphaEstimate:
    alpha_hat: float
    witness: PureState
    witness_edges: tuple
    samples: int
    applicable: int
    not_applicable: int
    infeasible: int
    records: list
    refined: bool = False

    def summary(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "samples": self.samples,
            "applicable": self.applicable,
            "not_applicable": self.not_applicable,
            "infeasible": self.infeasible,
            "violations_at_gamma_1": sum(1 for r in self.records if r["gamma_star"] is not None and r["gamma_star"] < 1.0),
            "witness_edges": list(self.witness_edges),
            "refined": self.refined,
            "upper_bound_on_infimum": True,
        }


def sample_seed(seed: int, index: int) -> int:
    """Per-sample integer seed; haar_random_pure(dims, sample_seed(s, i)) regenerates sample i."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def _tri_edges(amps: np.ndarray, dims, kind: Kind) -> np.ndarray:
    return np.stack([batch_measure(amps, dims, side, kind) for side in ([0], [2], [1])], axis=1)


def _gamma_or_none(edges):
    try:
        return gamma_star_unordered(edges), None
    except NotApplicable:
        return None, "not_applicable"
    except InfeasibleError:
        return None, "infeasible"


def alpha_estimate(dims, d, samples: int, seed: int = 0, refine: RefineConfig | None = None) -> AlphaEstimate:
    """Sample minimum of gamma_star over Haar-random three-party states.

    The result is an upper bound on the infimum over all states.  With
    ``refine`` the best sample is perturbed at random and perturbations that
    lower gamma_star are kept.
    """
    from .qstate import haar_random_pure

    dims = tuple(int(x) for x in dims)
    if len(dims) != 3:
        raise NotApplicable("alpha estimation needs exactly three parties")
    if samples < 1:
        raise ValueError("samples must be positive")
    seeds = [sample_seed(seed, i) for i in range(samples)]
    amps = np.stack([haar_random_pure(dims, s).amplitudes for s in seeds])
    return _alpha_from_amplitudes(amps, dims, as_measure(d), seeds, refine)


def alpha_from_states(states, d, refine: RefineConfig | None = None) -> AlphaEstimate:
    """alpha_estimate over an explicit list of three-party pure states."""
    states = list(states)
    if not states:
        raise ValueError("no states given")
    dims = states[0].dims
    if len(dims) != 3 or any(s.dims != dims for s in states):
        raise NotApplicable("states must share one three-party layout")
    amps = np.stack([s.amplitudes for s in states])
    return _alpha_from_amplitudes(amps, dims, as_measure(d), [None] * len(states), refine)


def _alpha_from_amplitudes(amps, dims, d, seeds, refine) -> AlphaEstimate:
    samples, n = amps.shape
    edges = _tri_edges(amps, dims, d.kind)
    records = []
    counts = {"not_applicable": 0, "infeasible": 0}
    best = (math.inf, None)
    for i in range(samples):
        g, why = _gamma_or_none(edges[i])
        if why:
            counts[why] += 1
        elif g < best[0]:
            best = (g, i)
        records.append({"seed": seeds[i], "gamma_star": g, "x": edges[i, 0], "y": edges[i, 1], "z": edges[i, 2]})
    if best[1] is None:
        raise NotApplicable("no sample has a strictly largest edge")
    alpha_hat, idx = best
    witness_amps = amps[idx]
    witness_edges = tuple(float(v) for v in edges[idx])
    refined = False
    if refine is not None:
        rng = np.random.default_rng(refine.seed)
        scale = refine.scale
        for _ in range(refine.iterations):
            trial = witness_amps + scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
            trial /= np.linalg.norm(trial)
            te = _tri_edges(trial[None, :], dims, d.kind)[0]
            g, why = _gamma_or_none(te)
            if why is None and g < alpha_hat:
                alpha_hat, witness_amps, witness_edges = g, trial, tuple(float(v) for v in te)
                refined = True
            else:
                scale *= 0.98
    applicable = samples - counts["not_applicable"] - counts["infeasible"]
    return AlphaEstimate(
        alpha_hat=alpha_hat,
        witness=make_pure_state(witness_amps, dims),
        witness_edges=witness_edges,
        samples=samples,
        applicable=applicable,
        not_applicable=counts["not_applicable"],
        infeasible=counts["infeasible"],
        records=records,
        refined=refined,
    )


# ------------------------------------------------------- state-level tetra


def _pair_measure(kind) -> str:
    from .quadripartite import TriKind, as_tri_kind

    k = as_tri_kind(kind)
    return {TriKind.TAU3: "tangle", TriKind.EF3: "eof"}.get(k)


def tetra_of_state(state: PureState, tri_kind="tau3", d="tangle", gamma: float = 1.0, variant="ratio", cfg=None) -> TetraGeom:
    """Evaluate the six tripartition values of a pure state and build the tetrahedron.

    For zero-valued entries X|Y|ZW the merged pair ZW is measured across
    Z|W with the bipartite measure underlying ``tri_kind`` (tangle for tau3,
    EoF for ef3, ``d`` for the composites).
    """
    from .bipartite import mixed_measure, pure_measure
    from .partitions import make_partition
    from .qstate import partial_trace, purity
    from .quadripartite import TRI_PARTITIONS, edge_vector_4_tri, positional

    e = edge_vector_4_tri(state, tri_kind, d, variant, cfg)
    pair_d = _pair_measure(tri_kind) or d
    pair_values = {}
    for p, val in zip(TRI_PARTITIONS, e.values):
        if val > ZERO_TOL:
            continue
        label = "|".join("".join(b) for b in p.blocks)
        (pair_block,) = [b for b in positional(p, state.party_labels).blocks if len(b) == 2]
        rho = partial_trace(state, list(pair_block))
        cut = make_partition([[pair_block[0]], [pair_block[1]]], rho.party_labels)
        if purity(rho) > 1 - 1e-10:
            lam, vecs = np.linalg.eigh(rho.matrix)
            psi = make_pure_state(vecs[:, -1], rho.dims, rho.party_labels)
            pair_values[label] = pure_measure(psi, cut, pair_d)
        else:
            pair_values[label] = mixed_measure(rho, cut, pair_d, cfg)
    return tetra_from_tripartitions(e, gamma, pair_values)
