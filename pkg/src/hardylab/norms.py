"""Hardy-type norm scans along boundary-approaching grids, divergence
classification, local and level-set variants, and the metric on intersection
spaces.

A scan evaluates I(r) = int |f(r z)|^p dsigma (or its level-set analogue
I(eps)) along a geometric grid approaching the boundary, then ``classify``
decides between Bounded, LogDivergent and PowerDivergent growth, which is the
trichotomy the membership thresholds of the function zoo exhibit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import functions as fn
from . import quadrature as quad
from .geometry import Domain, Ellipsoid, Rescaled, UnitBall

LN2 = math.log(2.0)
GRID_FLOOR = 1e-9


class NormError(RuntimeError):
    pass


class NotInSpaceError(NormError):
    pass


# ---------------------------------------------------------------------------
# Grids and surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproachGrid:
    """Boundary-approaching grid: radial r_k = 1 - 2^-k or level eps_k = eps0 2^-k."""

    kind: str
    k_min: int = 2
    k_max: int = 12
    eps0: float = 0.2

    def __post_init__(self):
        if self.kind not in ("radial", "level"):
            raise NormError(f"unknown grid kind {self.kind!r}")
        if self.k_max < self.k_min:
            raise NormError("empty grid")
        vals = self.values()
        if self.kind == "radial" and np.any(1.0 - vals < GRID_FLOOR):
            raise NormError("radial grid exceeds the 1 - r >= 1e-9 floor")
        if self.kind == "level" and np.any(vals < GRID_FLOOR):
            raise NormError("level grid exceeds the eps >= 1e-9 floor")

    def ks(self):
        return np.arange(self.k_min, self.k_max + 1)

    def values(self):
        k = np.arange(self.k_min, self.k_max + 1)
        if self.kind == "radial":
            return 1.0 - 2.0 ** (-k.astype(float))
        return self.eps0 * 2.0 ** (-k.astype(float))


# defaults: deep grids for the deterministic paths, shallow for MC-backed
# scans; k_max 29 keeps 1 - r >= 1e-9 (2^-30 would cross the floor), and the
# harmonic depth certifies boundedness at exponents hugging the threshold
RADIAL_ZONAL = ApproachGrid("radial", 2, 29)
RADIAL_MC = ApproachGrid("radial", 2, 12)
LEVEL_GRID = ApproachGrid("level", 0, 12)
LEVEL_HARMONIC = ApproachGrid("level", 0, 24)


@dataclass(frozen=True)
class OpenBall:
    """Open Euclidean ball in the ambient space (the U of local Hardy norms)."""

    center: tuple
    radius: float

    def indicator(self, Z):
        c = np.asarray(self.center)
        if np.iscomplexobj(Z) or np.iscomplexobj(c):
            d = np.linalg.norm(np.asarray(Z, dtype=complex) - c.astype(complex), axis=-1)
        else:
            d = np.linalg.norm(np.asarray(Z, dtype=float) - c.astype(float), axis=-1)
        return (d < self.radius).astype(float)


@dataclass(frozen=True)
class SphereSurface:
    n: int

    def describe(self):
        return f"sphere:n={self.n}"


@dataclass(frozen=True)
class CapSurface:
    n: int
    center: tuple
    radius: float
    complement: bool = False

    def describe(self):
        side = "complement" if self.complement else "cap"
        return f"{side}:n={self.n};r={self.radius:g}"


@dataclass(frozen=True)
class LevelSurface:
    domain: Domain
    method: str = "parametrized"
    restrict: OpenBall = None

    def describe(self):
        u = ";U" if self.restrict is not None else ""
        return f"level:{self.domain.describe()};{self.method}{u}"


@dataclass(frozen=True)
class RealLevelSurface:
    """Inner level spheres {|x|^2 = 1 - eps} of the real unit ball."""

    n: int
    restrict: OpenBall = None

    def describe(self):
        u = ";U" if self.restrict is not None else ""
        return f"real-level:n={self.n}{u}"


@dataclass(frozen=True)
class QuadConfig:
    seed: int = 7
    mc_count: int = 100_000
    level_count: int = 100_000
    thin_shell_proposals: int = 4_000_000
    zonal: quad.ZonalGrid = quad.ZonalGrid()
    force_mc: bool = False          # disable deterministic fast paths (oracles)
    mc_guard_depth: float = 1e-2    # 1 - r below which noisy MC is rejected
    mc_guard_rel: float = 0.02

    def with_seed(self, seed):
        return replace(self, seed=seed)


# ---------------------------------------------------------------------------
# Single-point integrals
# ---------------------------------------------------------------------------

def _point_seed(cfg, k):
    return (cfg.seed * 0x9E3779B1 + 0x51ED + int(k)) & 0x7FFFFFFFFFFFFFFF


def _mc_guard(est, r, cfg):
    if est.overflowed:
        return est, "overflow"
    if 1.0 - r < cfg.mc_guard_depth and est.stderr > cfg.mc_guard_rel * max(abs(est.value), 1e-300):
        return est, "failed: mc variance guard (stderr/value > 0.02 near boundary)"
    return est, ""


def _ball_level_scale(domain):
    """c such that rho = c(|z|^2 - 1) when the level sets are spheres, else None."""
    d = domain.defining
    scale = 1.0
    while isinstance(d, Rescaled):
        scale *= d.c
        d = d.base
    if isinstance(d, UnitBall):
        return scale
    if isinstance(d, Ellipsoid) and all(a == 1.0 for a in d.a):
        return scale
    return None


def _restrict_cap_threshold(center, restrict, R):
    """Re-pairing threshold of {|R x - center| < radius} on the unit-sphere chart."""
    return (R * R + 1.0 - restrict.radius ** 2) / (2.0 * R)


def _cap_indicator(surface):
    c = np.asarray(surface.center, dtype=complex)
    if surface.complement:
        return lambda Z: (np.linalg.norm(Z - c, axis=-1) >= surface.radius).astype(float)
    return lambda Z: (np.linalg.norm(Z - c, axis=-1) < surface.radius).astype(float)


def point_integral(fspec, p, surface, xval, cfg, k=0):
    """One surface integral of |f|^p; returns (IntegralEstimate, flag)."""
    if isinstance(surface, SphereSurface):
        r = float(xval)
        zc = fn.zonal_center(fspec)
        if zc is not None and not cfg.force_mc:
            gt = lambda lam: np.abs(fn.zonal_eval(fspec, r * lam)) ** p
            est = quad.integrate_zonal(gt, surface.n, cfg.zonal)
            return est, ("overflow" if est.overflowed else "")
        g = lambda Z: np.abs(fn.evaluate(fspec, r * Z)) ** p
        centers = fn.singular_points(fspec)
        if centers:
            est = quad.integrate_sphere_importance(
                g, surface.n, centers, math.sqrt(2.0 * (1.0 - r)),
                cfg.mc_count, _point_seed(cfg, k))
        else:
            est = quad.integrate_sphere(g, surface.n, cfg.mc_count, _point_seed(cfg, k))
        return _mc_guard(est, r, cfg)

    if isinstance(surface, CapSurface):
        r = float(xval)
        zc = fn.zonal_center(fspec)
        aligned = zc is not None and (isinstance(zc, str) or
                                      np.allclose(zc, np.asarray(surface.center), atol=1e-12))
        if aligned and not cfg.force_mc:
            c = 1.0 - surface.radius ** 2 / 2.0
            gt = lambda lam: np.abs(fn.zonal_eval(fspec, r * lam)) ** p
            if c <= -1.0:
                region = "full" if not surface.complement else None
                if region is None:
                    return quad.IntegralEstimate(0.0, 0.0, 0, "zonal"), ""
                est = quad.integrate_zonal(gt, surface.n, cfg.zonal)
            else:
                region = "complement" if surface.complement else "cap"
                est = quad.integrate_zonal(gt, surface.n, cfg.zonal, region=region, c=c)
            return est, ("overflow" if est.overflowed else "")
        g = lambda Z: np.abs(fn.evaluate(fspec, r * Z)) ** p
        centers = fn.singular_points(fspec)
        in_region = [c for c in centers
                     if (np.linalg.norm(np.asarray(c) - np.asarray(surface.center))
                         < surface.radius) != surface.complement]
        if in_region:
            cmask = _cap_indicator(surface)
            est = quad.integrate_sphere_importance(
                lambda Z: g(Z) * cmask(Z), surface.n, in_region,
                math.sqrt(2.0 * (1.0 - r)), cfg.mc_count, _point_seed(cfg, k))
        else:
            est = quad.integrate_cap(g, surface.center, surface.radius, surface.n,
                                     cfg.mc_count, _point_seed(cfg, k),
                                     complement=surface.complement)
        return _mc_guard(est, r, cfg)

    if isinstance(surface, LevelSurface):
        eps = float(xval)
        domain = surface.domain
        n = domain.n
        scale = _ball_level_scale(domain)
        zc = fn.zonal_center(fspec)
        if scale is not None and zc is not None and not cfg.force_mc:
            eps_eff = eps / scale
            if eps_eff >= 1.0:
                raise NormError("level set empty")
            R = math.sqrt(1.0 - eps_eff)
            gt = lambda lam: np.abs(fn.zonal_eval(fspec, R * lam)) ** p
            area_factor = R ** (2 * n - 1)
            restrict = surface.restrict
            if restrict is None:
                est = quad.integrate_zonal(gt, n, cfg.zonal)
            elif not isinstance(zc, str) and np.allclose(
                    np.asarray(restrict.center), zc, atol=1e-12):
                c = _restrict_cap_threshold(zc, restrict, R)
                if c <= -1.0:
                    est = quad.integrate_zonal(gt, n, cfg.zonal)
                elif c >= 1.0:
                    est = quad.IntegralEstimate(0.0, 0.0, 0, "zonal")
                else:
                    est = quad.integrate_zonal(gt, n, cfg.zonal, region="cap", c=c)
            else:
                est = None  # restriction not aligned with the zonal center
            if est is not None:
                est = quad.IntegralEstimate(est.value * area_factor,
                                            est.stderr * area_factor,
                                            est.count, est.method, est.overflowed)
                return est, ("overflow" if est.overflowed else "")
        g = lambda Z: np.abs(fn.evaluate(fspec, Z)) ** p
        restrict = surface.restrict.indicator if surface.restrict is not None else None
        restrict_ball = None
        if surface.restrict is not None:
            restrict_ball = (surface.restrict.center, surface.restrict.radius)
        centers = [np.asarray(c, dtype=complex) for c in fn.singular_points(fspec)]
        singular = centers[0] if centers else None
        count = (cfg.thin_shell_proposals if surface.method == "thin-shell"
                 else cfg.level_count)
        est = quad.integrate_level_set(g, domain, eps, method=surface.method,
                                       count=count, seed=_point_seed(cfg, k),
                                       restrict=restrict, singular_center=singular,
                                       restrict_ball=restrict_ball)
        return est, ("overflow" if est.overflowed else "")

    if isinstance(surface, RealLevelSurface):
        eps = float(xval)
        if not isinstance(fspec, fn.HarmonicKernel):
            raise NormError("real level scans expect a harmonic kernel spec")
        n = surface.n
        R = math.sqrt(1.0 - eps)
        gap = eps / (1.0 + R)  # 1 - R without cancellation
        y = np.asarray(fspec.y, dtype=float)
        if abs(np.linalg.norm(y) - 1.0) > 1e-9:
            raise NormError("harmonic kernel pole must lie on the unit sphere")
        expo = (n - 2) * p / 2.0
        # |R x - y|^2 = (1-R)^2 + 2 R u in the gap variable u = 1 - x.y
        G = lambda u: (gap * gap + 2.0 * R * u) ** (-expo)
        u_hi = 2.0
        if surface.restrict is not None:
            if not np.allclose(np.asarray(surface.restrict.center), y, atol=1e-12):
                raise NormError("harmonic restriction must be centered at the pole")
            u_hi = (surface.restrict.radius ** 2 - gap * gap) / (2.0 * R)
        est = quad.integrate_real_zonal(G, n, u_hi=u_hi)
        est = quad.IntegralEstimate(est.value * R ** (n - 1), est.stderr * R ** (n - 1),
                                    est.count, est.method, est.overflowed)
        return est, ("overflow" if est.overflowed else "")

    raise NormError(f"unknown surface {surface!r}")


def radial_integral(fspec, p, r, cfg=None, surface=None):
    """I(r) = int_S |f(r z)|^p dsigma(z), zonal fast path when available."""
    cfg = cfg or QuadConfig()
    if not 0.0 < r < 1.0:
        raise NormError("radius must lie in (0, 1)")
    if p < 1.0:
        raise NormError("p must be >= 1")
    surface = surface or SphereSurface(fn.ambient_dim(fspec))
    est, flag = point_integral(fspec, p, surface, r, cfg)
    if flag.startswith("failed"):
        raise NormError(flag)
    return est


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------

DETERMINISTIC_METHODS = ("zonal", "real-zonal", "exact-empty")


@dataclass
class NormScan:
    p: float
    grid: ApproachGrid
    surface: object
    fspec: object
    values: np.ndarray
    stderrs: np.ndarray
    flags: list
    methods: list = None

    def usable_mask(self):
        """Points trusted for fits and sups: finite, unflagged, and either
        deterministic or with relative error below 5% (a Monte Carlo zero
        carries no information and is dropped)."""
        v = self.values
        s = self.stderrs
        ok = np.isfinite(v) & np.isfinite(s)
        for i, fl in enumerate(self.flags):
            if fl:
                ok[i] = False
        methods = self.methods or [""] * len(v)
        det = np.array([m in DETERMINISTIC_METHODS for m in methods])
        with np.errstate(invalid="ignore"):
            rel_ok = (v > 0) & (s <= 0.05 * v)
        return ok & (det | rel_ok)

    def has_overflow(self):
        return any(f == "overflow" for f in self.flags)

    def describe(self):
        return (f"scan(f={fn.describe(self.fspec)}, p={self.p:g}, "
                f"surface={self.surface.describe()})")


def scan(fspec, p, grid, surface, cfg=None):
    """Surface integrals of |f|^p along the grid; failures truncate the scan."""
    cfg = cfg or QuadConfig()
    xs = grid.values()
    ks = grid.ks()
    values = np.full(len(xs), np.nan)
    stderrs = np.full(len(xs), np.nan)
    flags = [""] * len(xs)
    methods = [""] * len(xs)
    for i, (k, x) in enumerate(zip(ks, xs)):
        try:
            est, flag = point_integral(fspec, p, surface, x, cfg, k=int(k))
        except Exception as exc:  # record and truncate per the scan contract
            flags[i] = f"failed: {exc}"
            for j in range(i + 1, len(xs)):
                flags[j] = "truncated"
            break
        values[i] = est.value
        stderrs[i] = est.stderr
        flags[i] = flag
        methods[i] = est.method
        if flag.startswith("failed"):
            for j in range(i + 1, len(xs)):
                flags[j] = "truncated"
            break
    return NormScan(p=p, grid=grid, surface=surface, fspec=fspec,
                    values=values, stderrs=stderrs, flags=flags, methods=methods)


# ---------------------------------------------------------------------------
# Divergence classification
# ---------------------------------------------------------------------------

@dataclass
class DivergenceVerdict:
    klass: str               # Bounded | LogDivergent | PowerDivergent | Inconclusive
    rate: float = float("nan")
    r2: float = float("nan")
    sup_estimate: float = float("nan")
    n_used: int = 0
    note: str = ""

    @property
    def divergent(self):
        return self.klass in ("LogDivergent", "PowerDivergent")


def _linfit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(coef[0]), r2


MIN_POINTS = 6
POWER_SLOPE_MIN = 0.05
FIT_R2_MIN = 0.98
BOUNDED_TAIL_FRAC = 0.05


def classify(sc):
    """Trichotomy verdict for a scan: power model first, then log model, then
    a bounded tail test; anything else is Inconclusive.

    Models are fit against x = k ln 2, so that a scan growing like
    log(1/(1-r)) is linear and one growing like (1-r)^-alpha is linear in the
    log of the values with slope alpha.
    """
    mask = sc.usable_mask()
    x_all = sc.grid.ks().astype(float) * LN2
    x = x_all[mask]
    y = sc.values[mask]
    n_used = int(mask.sum())

    if sc.has_overflow():
        note = "overflow forced divergent classification"
        if n_used >= 2 and np.all(y > 0):
            slope, r2 = _linfit(x, np.log(y))
            return DivergenceVerdict("PowerDivergent", rate=slope, r2=r2,
                                     n_used=n_used, note=note)
        return DivergenceVerdict("PowerDivergent", n_used=n_used, note=note)

    if n_used < MIN_POINTS:
        return DivergenceVerdict("Inconclusive", n_used=n_used,
                                 note="insufficient usable points")

    if np.all(y > 0):
        slope_p, r2_p = _linfit(x, np.log(y))
        if slope_p > POWER_SLOPE_MIN and r2_p >= FIT_R2_MIN:
            return DivergenceVerdict("PowerDivergent", rate=slope_p, r2=r2_p,
                                     n_used=n_used)
    slope_l, r2_l = _linfit(x, y)
    # positive slope must describe growth above float noise on the window
    grows = slope_l * (x[-1] - x[0]) > 1e-9 * float(np.max(np.abs(y)))
    if grows and r2_l >= FIT_R2_MIN:
        return DivergenceVerdict("LogDivergent", rate=slope_l, r2=r2_l,
                                 n_used=n_used)
    i23 = (2 * len(y)) // 3
    y_max = float(np.max(y))
    if y_max - y[i23] <= BOUNDED_TAIL_FRAC * y_max:
        return DivergenceVerdict("Bounded", rate=slope_l, r2=r2_l,
                                 sup_estimate=y_max, n_used=n_used)
    return DivergenceVerdict("Inconclusive", rate=slope_l, r2=r2_l, n_used=n_used,
                             note="neither fit accepted and tail still rising")


# ---------------------------------------------------------------------------
# Membership and named scan variants
# ---------------------------------------------------------------------------

@dataclass
class Membership:
    status: str              # In | Out | Inconclusive
    verdict: DivergenceVerdict
    scan: NormScan


def membership_from_verdict(v):
    if v.klass == "Bounded":
        return "In"
    if v.divergent:
        return "Out"
    return "Inconclusive"


def membership_verdict(fspec, p, surface, grid=None, cfg=None):
    """In/Out/Inconclusive decision for f against one Hardy-type space."""
    cfg = cfg or QuadConfig()
    if grid is None:
        grid = _default_grid(fspec, surface, cfg)
    sc = scan(fspec, p, grid, surface, cfg)
    v = classify(sc)
    return Membership(membership_from_verdict(v), v, sc)


def _default_grid(fspec, surface, cfg):
    if isinstance(surface, (LevelSurface,)):
        return LEVEL_GRID
    if isinstance(surface, RealLevelSurface):
        return LEVEL_GRID
    zonal_ok = fn.zonal_center(fspec) is not None and not cfg.force_mc
    if isinstance(surface, CapSurface):
        zc = fn.zonal_center(fspec)
        zonal_ok = zonal_ok and (isinstance(zc, str) or
                                 np.allclose(zc, np.asarray(surface.center), atol=1e-12))
    return RADIAL_ZONAL if zonal_ok else RADIAL_MC


def local_scan_ball(fspec, p, center, radius, grid=None, cfg=None, complement=False):
    """Radial scan restricted to the cap G = S cap B(center, radius)."""
    cfg = cfg or QuadConfig()
    surface = CapSurface(fn.ambient_dim(fspec), tuple(complex(c) for c in center),
                         float(radius), complement=complement)
    if grid is None:
        grid = _default_grid(fspec, surface, cfg)
    return scan(fspec, p, grid, surface, cfg)


def level_scan_domain(fspec, p, domain, grid=None, cfg=None, restrict=None,
                      method="parametrized"):
    """Scan of level-set integrals of |f|^p over {rho = -eps}, optionally
    restricted to an open set U."""
    cfg = cfg or QuadConfig()
    surface = LevelSurface(domain, method=method, restrict=restrict)
    return scan(fspec, p, grid or LEVEL_GRID, surface, cfg)


def harmonic_scan(y, p, n, grid=None, cfg=None, restrict=None):
    """Scan of intphi_y^p over the inner level spheres of the real unit ball."""
    if n < 3:
        raise NormError("harmonic scans require n >= 3")
    cfg = cfg or QuadConfig()
    fspec = fn.HarmonicKernel(tuple(float(v) for v in y), n)
    surface = RealLevelSurface(n, restrict=restrict)
    return scan(fspec, p, grid or LEVEL_HARMONIC, surface, cfg)


def seminorm_estimate(sc):
    """Grid estimate sup_k I_k^{1/p} over usable points (lower bound of the norm)."""
    mask = sc.usable_mask()
    if not mask.any():
        raise NormError("no usable scan points for a seminorm estimate")
    return float(np.max(sc.values[mask]) ** (1.0 / sc.p))


def hardy_seminorm(fspec, p, grid=None, surface=None, cfg=None):
    """sup over the grid of I^{1/p}; raises if the scan diverges."""
    cfg = cfg or QuadConfig()
    surface = surface or SphereSurface(fn.ambient_dim(fspec))
    if grid is None:
        grid = _default_grid(fspec, surface, cfg)
    sc = scan(fspec, p, grid, surface, cfg)
    v = classify(sc)
    if v.divergent:
        raise NotInSpaceError(f"not in H^p: {sc.describe()} classified {v.klass}")
    return seminorm_estimate(sc)


# ---------------------------------------------------------------------------
# The metric on intersection spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntersectionMetricSpec:
    """Exponent ladder p_1 < p_2 < ... < q with p_j -> q, truncated at J terms.

    The default ladder is q - (q-1)/2^j (j+1 for q = infinity); ``powers``
    overrides it with an explicit increasing sequence below q.
    """

    q: float
    J: int = 20
    powers: tuple = None

    def __post_init__(self):
        if self.powers is not None:
            ps = np.asarray(self.powers, dtype=float)
            if np.any(np.diff(ps) <= 0) or np.any(ps >= self.q):
                raise NormError("powers must increase strictly and stay below q")

    def p_list(self):
        if self.powers is not None:
            return np.asarray(self.powers, dtype=float)
        j = np.arange(1, self.J + 1)
        if math.isinf(self.q):
            return (j + 1).astype(float)
        return self.q - (self.q - 1.0) / 2.0 ** j


@dataclass
class MetricResult:
    value: float
    uncertainty: float
    terms: tuple     # (p_j, seminorm estimate, classification)

    def __float__(self):
        return self.value


def intersection_metric(f, g, mspec, grid=None, cfg=None, surface=None):
    """Truncated metric d(f, g) = sum_j 2^-j N_j/(1+N_j), N_j = ||f-g||_{p_j}.

    Seminorms are grid sups, lower estimates of the true norms.  Because the
    exponent ladder hugs q, the component scans of in-space functions
    legitimately look divergent on any finite grid (their saturation horizon
    exceeds the deepest reachable radius), so per-term classifications are
    reported in the result rather than being fatal; only a scan overflowing
    float range raises, which certifies f - g outside the space.
    """
    cfg = cfg or QuadConfig()
    diff = fn.subtract(f, g)
    p_values = mspec.p_list()
    tail = 2.0 ** (-len(p_values))
    if fn.is_zero(diff):
        return MetricResult(0.0, tail, ())
    surface = surface or SphereSurface(fn.ambient_dim(diff))
    if grid is None:
        if fn.zonal_center(diff) is not None and not cfg.force_mc:
            grid = RADIAL_ZONAL
        else:
            grid = RADIAL_MC
    value = 0.0
    uncertainty = tail
    terms = []
    for j, pj in enumerate(p_values, start=1):
        sc = scan(diff, float(pj), grid, surface, cfg)
        v = classify(sc)
        if sc.has_overflow():
            raise NotInSpaceError(
                f"not in intersection space: ||f-g||_{pj:g} overflowed")
        mask = sc.usable_mask()
        if not mask.any():
            raise NormError(f"no usable points for metric term p={pj:g}")
        idx = int(np.argmax(np.where(mask, sc.values, -np.inf)))
        norm_j = sc.values[idx] ** (1.0 / pj)
        dnorm = (sc.stderrs[idx] / pj) * sc.values[idx] ** (1.0 / pj - 1.0) \
            if sc.values[idx] > 0 else 0.0
        w = 2.0 ** (-j)
        value += w * norm_j / (1.0 + norm_j)
        uncertainty += w * dnorm / (1.0 + norm_j) ** 2
        terms.append((float(pj), float(norm_j), v.klass))
    return MetricResult(float(value), float(uncertainty), tuple(terms))
