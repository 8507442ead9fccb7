"""Synthetic benchmark manifolds and noise injection.

The catalog covers the classic intrinsic-dimension benchmark suite
(sphere, affine maps, hypercubes, swiss roll, helices, Moebius band,
S-curve, spiral, Gaussian) plus generic builtins ``sphere``,
``gaussian`` and ``cube``.  Manifolds whose defining formulas come from
external benchmark conventions not spelled out here are cataloged with
their (d, D) signature but deliberately left unimplemented rather than
guessed; asking for one raises :class:`UnimplementedManifoldError`
listing what is available.

All generators are deterministic per seed, draw "uniformly" with
respect to the construction's parameter domain unless the standard
benchmark form is area-uniform (the swiss roll), and optionally add
i.i.d. ambient Gaussian noise as a final step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .seeding import derive_seed

__all__ = [
    "ManifoldSpec",
    "UnimplementedManifoldError",
    "CATALOG",
    "generate",
    "sphere_uniform",
    "add_noise",
    "list_manifolds",
]


class UnimplementedManifoldError(NotImplementedError):
    """The manifold id is known or unknown but has no generator."""


@dataclass(frozen=True)
class CatalogRow:
    intrinsic_d: int
    ambient_D: int
    implemented: bool
    note: str = ""


# Benchmark ids with their (intrinsic d, ambient D) signature.  The
# unimplemented rows follow external construction conventions that are
# not reproduced here; they stay visible in the catalog so `--list`
# shows the full suite.
CATALOG: dict[str, CatalogRow] = {
    "M1_Sphere":        CatalogRow(10, 11, True,  "uniform 10-sphere"),
    "M2_Affine_3to5":   CatalogRow(3, 5, True,   "affine embedding of a cube"),
    "M3_Nonlinear_4to6": CatalogRow(4, 6, False),
    "M4_Nonlinear":     CatalogRow(4, 8, False),
    "M5a_Helix1d":      CatalogRow(1, 3, True,   "toroidal helix curve"),
    "M5b_Helix2d":      CatalogRow(2, 3, True,   "helicoid strip"),
    "M6_Nonlinear":     CatalogRow(6, 36, False),
    "M7_Roll":          CatalogRow(2, 3, True,   "swiss roll, area-uniform"),
    "M8_Nonlinear":     CatalogRow(12, 72, False),
    "M9_Affine":        CatalogRow(20, 20, True, "rotated full-dimensional cube"),
    "M10a_Cubic":       CatalogRow(10, 11, True, "uniform hypercube"),
    "M10b_Cubic":       CatalogRow(17, 18, True, "uniform hypercube"),
    "M10c_Cubic":       CatalogRow(24, 25, True, "uniform hypercube"),
    "M10d_Cubic":       CatalogRow(70, 71, True, "uniform hypercube"),
    "M11_Moebius":      CatalogRow(2, 3, True,  "Moebius band, 10 half-twists"),
    "M12_Norm":         CatalogRow(20, 20, True, "standard Gaussian"),
    "M13a_Scurve":      CatalogRow(2, 3, True,  "S-shaped sheet"),
    "M13b_Spiral":      CatalogRow(1, 13, True, "planar spiral curve, zero-padded"),
    "Mbeta":            CatalogRow(10, 40, False),
    "Mn1_Nonlinear":    CatalogRow(18, 72, False),
    "Mn2_Nonlinear":    CatalogRow(24, 96, False),
    "Mp1_Paraboloid":   CatalogRow(3, 12, False),
    "Mp2_Paraboloid":   CatalogRow(6, 21, False),
    "Mp3_Paraboloid":   CatalogRow(9, 30, False),
}

BUILTINS = ("sphere", "gaussian", "cube")


@dataclass(frozen=True)
class ManifoldSpec:
    """Recipe for one synthetic cloud.

    For benchmark ids, ``intrinsic_d``/``ambient_D`` may be omitted
    (None) and are filled from the catalog; passing values inconsistent
    with the catalog is an error.  Builtins (``sphere``, ``gaussian``,
    ``cube``) require an explicit ``intrinsic_d``.
    """

    name: str
    n: int
    seed: int
    intrinsic_d: int | None = None
    ambient_D: int | None = None
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.name in CATALOG:
            row = CATALOG[self.name]
            d = row.intrinsic_d if self.intrinsic_d is None else self.intrinsic_d
            D = row.ambient_D if self.ambient_D is None else self.ambient_D
            if (d, D) != (row.intrinsic_d, row.ambient_D):
                raise ValueError(
                    f"{self.name} has (d, D) = ({row.intrinsic_d}, {row.ambient_D}); "
                    f"got ({d}, {D})")
            object.__setattr__(self, "intrinsic_d", d)
            object.__setattr__(self, "ambient_D", D)
        elif self.name in BUILTINS:
            if self.intrinsic_d is None:
                raise ValueError(f"builtin {self.name!r} needs an explicit intrinsic_d")
            if self.ambient_D is None:
                default_D = self.intrinsic_d + 1 if self.name == "sphere" else self.intrinsic_d
                object.__setattr__(self, "ambient_D", default_D)
        if self.intrinsic_d is not None and self.ambient_D is not None:
            if self.intrinsic_d > self.ambient_D:
                raise ValueError("intrinsic_d cannot exceed ambient_D")


def _pad(points: np.ndarray, ambient_D: int) -> np.ndarray:
    n, w = points.shape
    if w > ambient_D:
        raise ValueError(f"construction width {w} exceeds ambient dimension {ambient_D}")
    if w == ambient_D:
        return points
    return np.hstack([points, np.zeros((n, ambient_D - w))])


def sphere_uniform(d: int, n: int, ambient_D: int | None = None,
                   seed: int = 0) -> PointCloud:
    """Uniform sample of the unit d-sphere, zero-padded into R^ambient_D.

    Normalized (d+1)-dimensional Gaussian draws are exactly uniform on
    the sphere; remaining ambient coordinates are zero.
    """
    if ambient_D is None:
        ambient_D = d + 1
    if ambient_D < d + 1:
        raise ValueError(f"ambient_D must be >= d+1 = {d + 1}")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return PointCloud(_pad(x, ambient_D))


def add_noise(cloud: PointCloud, sigma: float, seed: int = 0) -> PointCloud:
    """Add i.i.d. N(0, sigma^2) to every ambient coordinate (sigma=0: identity)."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return cloud
    rng = np.random.default_rng(seed)
    return PointCloud(cloud.points + sigma * rng.standard_normal(cloud.points.shape))


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def _affine(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    # Isometric embedding: uniform cube pushed through orthonormal rows,
    # so the image keeps the cube's geometry and has rank exactly d.
    frame, _ = np.linalg.qr(rng.standard_normal((D, d)))
    u = rng.uniform(0.0, 1.0, size=(n, d))
    return u @ frame.T


def _cube(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    return _pad(rng.uniform(0.0, 1.0, size=(n, d)), D)


def _gaussian(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    return _pad(rng.standard_normal((n, d)), D)


def _sphere(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    x = rng.standard_normal((n, d + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return _pad(x, D)


def _helix1d(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    t = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.column_stack([(2.0 + np.cos(8.0 * t)) * np.cos(t),
                            (2.0 + np.cos(8.0 * t)) * np.sin(t),
                            np.sin(8.0 * t)])


def _helix2d(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    u = rng.uniform(-1.0, 1.0, size=n)
    v = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.column_stack([u * np.cos(v), u * np.sin(v), 0.5 * v])


def _swiss_roll(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    t0, t1 = 1.5 * math.pi, 4.5 * math.pi
    # sqrt-warped angle makes the sample area-uniform on the rolled sheet
    t = np.sqrt(t0 ** 2 + rng.uniform(0.0, 1.0, size=n) * (t1 ** 2 - t0 ** 2))
    height = rng.uniform(0.0, 21.0, size=n)
    return np.column_stack([t * np.cos(t), height, t * np.sin(t)])


def _moebius(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    # 10-half-twist band (the conventional benchmark form)
    u = rng.uniform(0.0, 2.0 * math.pi, size=n)
    w = rng.uniform(-1.0, 1.0, size=n)
    half = 1.0 + 0.5 * w * np.cos(5.0 * u)
    return np.column_stack([half * np.cos(u), half * np.sin(u),
                            0.5 * w * np.sin(5.0 * u)])


def _scurve(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    t = rng.uniform(-1.5 * math.pi, 1.5 * math.pi, size=n)
    y = rng.uniform(0.0, 2.0, size=n)
    return np.column_stack([np.sin(t), y, np.sign(t) * (np.cos(t) - 1.0)])


def _spiral(rng: np.random.Generator, n: int, d: int, D: int) -> np.ndarray:
    # planar Archimedean spiral; winding gap far exceeds the neighbor
    # spacing at benchmark sample sizes, keeping the curve 1-dimensional
    # at the statistic's scale
    t = rng.uniform(math.pi, 4.0 * math.pi, size=n)
    r = t / (3.0 * math.pi)
    return _pad(np.column_stack([r * np.cos(t), r * np.sin(t)]), D)


_BUILDERS = {
    "M1_Sphere": _sphere,
    "M2_Affine_3to5": _affine,
    "M5a_Helix1d": _helix1d,
    "M5b_Helix2d": _helix2d,
    "M7_Roll": _swiss_roll,
    "M9_Affine": _affine,
    "M10a_Cubic": _cube,
    "M10b_Cubic": _cube,
    "M10c_Cubic": _cube,
    "M10d_Cubic": _cube,
    "M11_Moebius": _moebius,
    "M12_Norm": _gaussian,
    "M13a_Scurve": _scurve,
    "M13b_Spiral": _spiral,
    "sphere": _sphere,
    "gaussian": _gaussian,
    "cube": _cube,
}


def list_manifolds(implemented_only: bool = False) -> list[tuple[str, int, int, bool]]:
    """Catalog rows as (name, intrinsic_d, ambient_D, implemented)."""
    rows = [(name, row.intrinsic_d, row.ambient_D, row.implemented)
            for name, row in CATALOG.items()
            if row.implemented or not implemented_only]
    return rows


def generate(spec: ManifoldSpec) -> PointCloud:
    """Generate the cloud described by ``spec``.

    Construction happens on a generator seeded by ``spec.seed``; ambient
    noise, when requested, uses a sub-seed derived from it, so the clean
    and noisy clouds for one seed share the same underlying sample.
    """
    builder = _BUILDERS.get(spec.name)
    if builder is None:
        available = ", ".join(sorted(list(_BUILDERS)))
        raise UnimplementedManifoldError(
            f"manifold {spec.name!r} has no generator; available: {available}")
    rng = np.random.default_rng(spec.seed)
    points = builder(rng, spec.n, spec.intrinsic_d, spec.ambient_D)
    cloud = PointCloud(_pad(points, spec.ambient_D))
    if spec.noise_sigma > 0:
        cloud = add_noise(cloud, spec.noise_sigma,
                          seed=derive_seed(spec.seed, "ambient-noise"))
    return cloud
