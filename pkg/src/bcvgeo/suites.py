"""Named verification suites behind the `verify` command.

Each suite draws its samples from a seeded generator, evaluates a family of
residuals, and reports one entry {name, samples, max_residual, tolerance,
pass}.  Simple suites report the raw worst residual against its tolerance;
compound suites (several residual families with different tolerances)
report the worst residual-to-tolerance ratio against 1.0 and explain the
breakdown in `note`.

The registry order is fixed, and every suite derives its own RNG stream
from (seed, suite index), so reports are reproducible for given flags.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import ambient, biconservative as bic, immersion as imm, rotation as rot
from .ambient import AmbientPoint, BcvParams, TangentVector

__all__ = [
    "SuiteResult",
    "SUITE_NAMES",
    "run_suite",
    "run_report",
    "sample_domain_points",
    "domain_radius",
    "worker_count",
]


@dataclass
class SuiteResult:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    note: str = ""

    def as_dict(self):
        return {
            "name": self.name,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "note": self.note,
        }


def domain_radius(params: BcvParams, fill: float = 0.75) -> float:
    """Safe sampling radius: a fraction of the boundary radius for
    kappa < 0, a fixed window otherwise."""
    if params.kappa < 0.0:
        return fill * 2.0 / math.sqrt(-params.kappa)
    return 1.5


def sample_domain_points(params: BcvParams, rng, n: int, z_span: float = 1.0):
    """n reproducible points well inside the domain."""
    rmax = domain_radius(params)
    pts = []
    for _ in range(n):
        rho = rmax * math.sqrt(rng.uniform(0.0, 1.0))
        phi = rng.uniform(0.0, 2.0 * math.pi)
        z = rng.uniform(-z_span, z_span)
        pts.append(AmbientPoint(params, rho * math.cos(phi), rho * math.sin(phi), z))
    return pts


def _cylinder_radii(params: BcvParams, radii=(0.5, 1.0, 2.0), floor: float = 0.1):
    """Requested cylinder radii restricted to the domain (F above floor)."""
    return [r for r in radii if ambient.smoothing_factor(params, r, 0.0) > floor]


def _scaled_ellipse(params: BcvParams):
    a = min(1.6, 0.6 * domain_radius(params, fill=1.0))
    return rot.ellipse_curve(a, 0.625 * a)


def _suite_frame(params: BcvParams, rng) -> SuiteResult:
    pts = sample_domain_points(params, rng, 100)
    worst = 0.0
    for p in pts:
        frame = ambient.frame_at(params, p)
        for i in range(3):
            for j in range(3):
                val = ambient.metric(params, frame[i], frame[j])
                worst = max(worst, abs(val - (1.0 if i == j else 0.0)))
    return SuiteResult("frame", len(pts), worst, 1e-10, worst < 1e-10)


def _suite_ricci(params: BcvParams, rng) -> SuiteResult:
    pts = sample_domain_points(params, rng, 20)
    worst = 0.0
    checks = 0
    for p in pts:
        frame = ambient.frame_at(params, p)
        vecs = list(frame)
        for _ in range(2):
            vecs.append(TangentVector(p, rng.normal(size=3)))
        ric_fd = ambient.ricci_tensor_fd(params, p)
        for X in vecs:
            for Y in vecs:
                closed = ambient.ricci(params, X, Y)
                fd = float(X.comps @ ric_fd @ Y.comps)
                worst = max(worst, abs(closed - fd))
                checks += 1
    return SuiteResult("ricci", checks, worst, 1e-4, worst < 1e-4)


def _suite_submersion(params: BcvParams, rng) -> SuiteResult:
    pts = sample_domain_points(params, rng, 50)
    worst = 0.0
    for p in pts:
        e1, e2, e3 = ambient.frame_at(params, p)
        a1, a2 = rng.normal(size=2)
        H = a1 * e1 + a2 * e2
        img = ambient.hopf_dpsi(H)
        h_norm = math.sqrt(ambient.base_metric(params, p.x, p.y, img, img))
        worst = max(worst, abs(h_norm - ambient.norm(params, H)))
        worst = max(worst, float(np.abs(ambient.hopf_dpsi(e3)).max()))
    return SuiteResult("submersion", len(pts), worst, 1e-8, worst < 1e-8)


def _structural_surfaces(params: BcvParams):
    surfaces = []
    for r0 in _cylinder_radii(params):
        surfaces.append((rot.hopf_cylinder(params, r0), 4, 3))
    rmax = domain_radius(params)
    r_mid = min(1.2, 0.55 * rmax)
    surfaces.append(
        (rot.generic_revolution_surface(params, r_mid=r_mid, amp=0.2 * r_mid,
                                        pitch=0.4 * r_mid), 5, 4)
    )
    curve, dcurve = _scaled_ellipse(params)
    surfaces.append((rot.hopf_tube(params, curve, dcurve), 6, 3))
    return surfaces


def _interior_grid(surface, nu, nv, margin=0.12):
    (u0, u1), (v0, v1) = surface.domain
    du, dv = u1 - u0, v1 - v0
    us = np.linspace(u0 + margin * du, u1 - margin * du, nu)
    vs = np.linspace(v0 + margin * dv, v1 - margin * dv, nv)
    return us, vs


def _suite_gauss_codazzi(params: BcvParams, rng) -> SuiteResult:
    ratios = {"jet": 0.0, "gauss": 0.0, "codazzi": 0.0, "compat": 0.0}
    tols = {"jet": 1e-9, "gauss": 1e-4, "codazzi": 1e-3, "compat": 1e-4}
    samples = 0
    for surface, nu, nv in _structural_surfaces(params):
        us, vs = _interior_grid(surface, nu, nv)
        for u in us:
            for v in vs:
                jet = imm.surface_jet(surface, params, u, v)
                samples += 1
                t_norm2 = ambient.metric(params, jet.T, jet.T)
                ratios["jet"] = max(ratios["jet"], abs(t_norm2 - jet.sin_alpha ** 2))
                e3 = TangentVector(jet.p, (0.0, 0.0, 1.0))
                decberr = (e3 - jet.T - jet.cos_alpha * jet.N).comps
                ratios["jet"] = max(ratios["jet"], float(np.abs(decberr).max()))
                ratios["gauss"] = max(
                    ratios["gauss"], abs(imm.gauss_residual(surface, params, u, v))
                )
                cot_ok = jet.adapted and jet.sin_alpha > 0.1 and \
                    abs(jet.cos_alpha / jet.sin_alpha) < 10.0
                if cot_ok:
                    c1, c2 = imm.codazzi_residual(surface, params, u, v)
                    ratios["codazzi"] = max(ratios["codazzi"], abs(c1), abs(c2))
                    vec, sc = imm.compatibility_residual(surface, params, u, v, jet.e2)
                    ratios["compat"] = max(
                        ratios["compat"], ambient.norm(params, vec), abs(sc)
                    )
    worst = max(ratios[k] / tols[k] for k in ratios)
    note = "; ".join(f"{k} {ratios[k]:.2e}/{tols[k]:.0e}" for k in ratios)
    return SuiteResult("gauss-codazzi", samples, worst, 1.0, worst < 1.0, note)


def _suite_biconservative(params: BcvParams, rng) -> SuiteResult:
    worst_tb = 0.0
    worst_red = 0.0
    samples = 0
    for r0 in _cylinder_radii(params):
        cyl = rot.hopf_cylinder(params, r0)
        us, vs = _interior_grid(cyl, 3, 3)
        f = rot.reduced_mean_curvature(
            params, rot.ProfileState(0.0, r0, 0.0, math.pi / 2), 0.0
        )
        for u in us:
            for v in vs:
                tb = bic.tangential_bitension(cyl, params, u, v)
                worst_tb = max(worst_tb, ambient.norm(params, tb))
                samples += 1
        for z in vs:
            state = rot.ProfileState(0.0, r0, z, math.pi / 2)
            r1, r2 = rot.reduced_bicon_system(params, state, f, 0.0)
            worst_red = max(worst_red, abs(r1), abs(r2))
    worst = max(worst_tb / 1e-6, worst_red / 1e-8)
    note = f"cylinder bitension {worst_tb:.2e}/1e-06; reduced pair {worst_red:.2e}/1e-08"
    return SuiteResult("biconservative", samples, worst, 1.0, worst < 1.0, note)


def _suite_theorem44(params: BcvParams, rng) -> SuiteResult:
    """CMC tube stays conservative, non-CMC tube visibly is not."""
    radii = _cylinder_radii(params, radii=(1.0, 0.5))
    circle_worst = 0.0
    samples = 0
    if radii:
        cyl = rot.hopf_cylinder(params, radii[0])
        us, vs = _interior_grid(cyl, 4, 3)
        for u in us:
            for v in vs:
                tb = bic.tangential_bitension(cyl, params, u, v)
                circle_worst = max(circle_worst, ambient.norm(params, tb))
                samples += 1
    curve, dcurve = _scaled_ellipse(params)
    tube = rot.hopf_tube(params, curve, dcurve)
    ellipse_max = 0.0
    for u in np.linspace(0.0, 2.0 * math.pi, 13):
        tb = bic.tangential_bitension(tube, params, u, 0.1)
        ellipse_max = max(ellipse_max, ambient.norm(params, tb))
        samples += 1
    passed = circle_worst < 1e-6 and ellipse_max > 1e-3
    note = (f"circular tube {circle_worst:.2e} < 1e-06; "
            f"ellipse tube max {ellipse_max:.2e} > 1e-03")
    return SuiteResult("theorem44", samples, circle_worst / 1e-6, 1.0, passed, note)


def _random_branch_state(params: BcvParams, rng) -> rot.ProfileState:
    rmax = domain_radius(params)
    r0 = rng.uniform(0.6, min(1.6, 0.8 * rmax))
    while True:
        sigma0 = rng.uniform(0.15, math.pi - 0.15)
        if abs(math.cos(sigma0)) > 0.1:
            return rot.ProfileState(0.0, r0, 0.0, sigma0)


def _branch_r1(params, state):
    f = rot.branch_mean_curvature(state)
    fp = rot.branch_f_prime(state)
    return rot.reduced_bicon_system(params, state, f, fp)[0]


def _suite_theorem52(params: BcvParams, rng, runs: int = 3) -> SuiteResult:
    """The non-CMC branch never closes the system away from cylinders."""
    if params.tau == 0.0 or params.is_space_form:
        return SuiteResult("theorem52", 0, 0.0, 1.0, True,
                           "skipped: needs tau != 0 and kappa != 4 tau^2")
    worst_r2 = 0.0
    worst_window = 0.0
    min_r1 = math.inf
    samples = 0
    for _ in range(runs):
        init = _random_branch_state(params, rng)
        traj = rot.integrate_noncmc_branch(
            params, init, rot.IntegrationConfig(s_max=3.0, r_stop=0.05)
        )
        samples += len(traj)
        worst_r2 = max(worst_r2, float(np.abs(traj.column("R2")).max()))
        min_r1 = min(min_r1, float(np.abs(traj.column("R1")).max()))
        R1 = traj.column("R1")
        flips = np.where(R1[:-1] * R1[1:] < 0.0)[0]
        for i in flips:
            s_r1 = rot.refine_sign_change(params, traj, int(i), _branch_r1)
            s_ob = rot.refine_sign_change(params, traj, int(i),
                                          rot.theorem52_obstruction)
            worst_window = max(worst_window, abs(s_r1 - s_ob))
    worst = max(worst_r2 / 1e-10, worst_window / 1e-8)
    passed = worst < 1.0 and min_r1 > 1e-3
    note = (f"max |R2| {worst_r2:.2e} < 1e-10; min over runs of max |R1| "
            f"{min_r1:.2e} > 1e-03; zero windows {worst_window:.2e} < 1e-08")
    return SuiteResult("theorem52", samples, worst, 1.0, passed, note)


_REGISTRY = (
    ("frame", _suite_frame),
    ("ricci", _suite_ricci),
    ("submersion", _suite_submersion),
    ("gauss-codazzi", _suite_gauss_codazzi),
    ("biconservative", _suite_biconservative),
    ("theorem44", _suite_theorem44),
    ("theorem52", _suite_theorem52),
)

SUITE_NAMES = tuple(name for name, _ in _REGISTRY)


def worker_count() -> int:
    """Worker cap from BCV_THREADS (default 1)."""
    raw = os.environ.get("BCV_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_suite(name: str, params: BcvParams, seed: int = 42) -> SuiteResult:
    for idx, (nm, fn) in enumerate(_REGISTRY):
        if nm == name:
            rng = np.random.default_rng([seed, idx])
            return fn(params, rng)
    raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITE_NAMES)}")


def run_report(params: BcvParams, names=None, seed: int = 42, threads: int = None) -> dict:
    """Run the selected suites and assemble the report dictionary.

    Suites execute on a worker pool capped by `threads` (default: the
    BCV_THREADS environment variable); assembly keeps registry order so
    reports are deterministic for given flags and seed.
    """
    if names is None:
        names = SUITE_NAMES
    unknown = [n for n in names if n not in SUITE_NAMES]
    if unknown:
        raise KeyError(f"unknown suite {unknown[0]!r}; known: {', '.join(SUITE_NAMES)}")
    if threads is None:
        threads = worker_count()
    ordered = [n for n in SUITE_NAMES if n in set(names)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {n: pool.submit(run_suite, n, params, seed) for n in ordered}
            results = [futures[n].result() for n in ordered]
    else:
        results = [run_suite(n, params, seed) for n in ordered]
    return {
        "kappa": params.kappa,
        "tau": params.tau,
        "seed": seed,
        "suites": [r.as_dict() for r in results],
        "pass": all(r.passed for r in results),
    }
