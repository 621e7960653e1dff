"""Experiment suites: named bundles of runs behind the command line.

Each suite reads its section of the config, writes CSV tables into the
output directory, and returns a SuiteResult whose assertions decide the
process exit code. Numerical failures (non-positive squared frequency,
unitarity violation, degenerate fit, inadequate cutoff) are caught per
suite and reported as a failing assertion instead of a crash, so a run
always leaves a manifest behind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adiabatic import FrequencyChain, rj_multipliers, symbol_order_probe
from .bogoliubov import UNITARITY_TOL, order_vs_order_scan, particle_number_evolution
from .config import ExperimentConfig
from .detector import WindowFunction, bound_exponent, detector_response, slope_fit
from .errors import AdiavacError
from .modes import adiabatic_initial_data, solve_mode_batch
from .reporting import write_csv
from .states import ModeQuasifreeState, mu_sobolev_ratio, purity_check

PURITY_SWEEP_TOL = 1e-12
SIGMA_RECOVERY_TOL = 1e-12
CS_RELATIVE_TOL = 1e-12
PSD_RELATIVE_TOL = 1e-12
SOBOLEV_SPREAD_LIMIT = 1e3


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class SuiteResult:
    name: str
    assertions: list[Assertion] = field(default_factory=list)
    files: dict[str, str] = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.assertions.append(Assertion(name, bool(passed), detail))

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "assertions": [a.as_dict() for a in self.assertions],
            "files": dict(sorted(self.files.items())),
            "info": self.info,
        }


def run_frequencies(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("frequencies")
    res = SuiteResult("frequencies")
    n_top = max(sc.orders)
    rows = []
    clamped_channels = 0
    for k in sc.k_values:
        chain = FrequencyChain(
            cfg.background, k, cfg.mass, n_top, sc.t0, sc.positivity_action
        )
        for n in sorted(sc.orders):
            freq = chain.frequency(n)
            r, Omega = rj_multipliers(cfg.background, freq)
            rows.append((k, n, chain.omega0, Omega, freq.log_rate, r, freq.clamped))
            clamped_channels += int(freq.clamped)
    res.files["frequencies.csv"] = write_csv(
        f"{outdir}/frequencies.csv",
        ["k", "n", "omega0", "Omega_n", "log_rate", "r", "clamped"],
        rows,
    )
    finite = all(math.isfinite(row[3]) and math.isfinite(row[5]) for row in rows)
    positive = all(row[3] > 0.0 for row in rows)
    res.check(
        "frequencies_finite_positive",
        finite and positive,
        f"{len(rows)} channel/order combinations, {clamped_channels} clamped",
    )
    res.info["channels"] = len(rows)
    res.info["clamped"] = clamped_channels
    return res


def run_symbol_orders(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("symbol_orders")
    res = SuiteResult("symbol_orders")
    grid = np.geomspace(sc.omega_min, sc.omega_max, sc.points)
    point_rows = []
    fit_rows = []
    fits = {}
    for n in sorted(sc.orders):
        probe = symbol_order_probe(cfg.background, cfg.mass, n, sc.t0, grid)
        for (k, omega, diff) in probe.rows:
            point_rows.append((n, k, omega, diff))
        bound = -2.0 * n
        ok = probe.slope <= bound + sc.slope_margin
        fit_rows.append((n, probe.slope, probe.fit.stderr, probe.fit.npoints, bound))
        fits[str(n)] = {"slope": float(probe.slope), "stderr": float(probe.fit.stderr)}
        res.check(
            f"update_decay_n{n}",
            ok,
            f"slope {probe.slope:.3f} vs bound {bound:+.0f} (margin {sc.slope_margin})",
        )
    res.files["symbol_order_points.csv"] = write_csv(
        f"{outdir}/symbol_order_points.csv", ["n", "k", "omega", "diff"], point_rows
    )
    res.files["symbol_order_fits.csv"] = write_csv(
        f"{outdir}/symbol_order_fits.csv",
        ["n", "slope", "stderr", "npoints", "bound"],
        fit_rows,
    )
    res.info["fits"] = fits
    return res


def run_modes(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("modes")
    res = SuiteResult("modes")
    datas = []
    multipliers = []
    for k in sc.k_values:
        chain = FrequencyChain(cfg.background, k, cfg.mass, sc.order, sc.t0)
        freq = chain.frequency(sc.order)
        multipliers.append(rj_multipliers(cfg.background, freq))
        datas.append(adiabatic_initial_data(cfg.background, freq))
    span = (min(sc.t0, sc.t1), max(sc.t0, sc.t1))
    grid = np.linspace(span[0], span[1], sc.samples)
    trajs = solve_mode_batch(
        cfg.background, cfg.mass, datas, span, sc.tol, samples=grid,
        chunk_size=64, workers=workers,
    )
    summary_rows = []
    sample_rows = []
    for (k, traj, (r, Omega)) in zip(sc.k_values, trajs, multipliers):
        summary_rows.append(
            (k, Omega, r, traj.max_drift, traj.steps, traj.rejected, traj.rhs_evals)
        )
        for i, t in enumerate(traj.times):
            sample_rows.append(
                (
                    k, float(t),
                    float(traj.W[i].real), float(traj.W[i].imag),
                    float(traj.Wdot[i].real), float(traj.Wdot[i].imag),
                    float(traj.wronskian_drift[i]),
                )
            )
    res.files["modes_summary.csv"] = write_csv(
        f"{outdir}/modes_summary.csv",
        ["k", "Omega", "r", "max_drift", "steps", "rejected", "rhs_evals"],
        summary_rows,
    )
    res.files["modes_trajectories.csv"] = write_csv(
        f"{outdir}/modes_trajectories.csv",
        ["k", "t", "re_W", "im_W", "re_Wdot", "im_Wdot", "wronskian_drift"],
        sample_rows,
    )
    worst = max(row[3] for row in summary_rows)
    res.check(
        "wronskian_drift_bounded",
        worst <= sc.drift_tol,
        f"max drift {worst:.3e} vs allowance {sc.drift_tol:.1e}",
    )
    res.info["max_drift"] = float(worst)
    return res


def run_bogoliubov(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("bogoliubov")
    res = SuiteResult("bogoliubov")
    ks = np.unique(
        np.rint(np.geomspace(max(sc.k_min, 1), sc.k_max, sc.k_count)).astype(int)
    )
    point_rows = []
    fit_rows = []
    verdicts = {}
    for (n1, n2) in sc.order_pairs:
        pairs, diag = order_vs_order_scan(
            cfg.background, cfg.mass, n1, n2, sc.t0, ks
        )
        for p in pairs:
            point_rows.append(
                (n1, n2, p.k, abs(p.alpha), abs(p.beta), p.unitarity_defect)
            )
        fit_rows.append(
            (n1, n2, diag.p, diag.fit.stderr, diag.fit.npoints, diag.tail_sum, diag.verdict)
        )
        verdicts[f"{n1},{n2}"] = {
            "p": float(diag.p),
            "verdict": diag.verdict,
            "partial_sums": [float(s) for s in diag.partial_sums],
        }
        worst = max(p.unitarity_defect for p in pairs)
        res.check(
            f"unitarity_{n1}_{n2}",
            worst <= UNITARITY_TOL,
            f"max |alpha|^2 - |beta|^2 - 1 defect {worst:.3e} over {len(pairs)} channels",
        )
    res.files["bogoliubov_points.csv"] = write_csv(
        f"{outdir}/bogoliubov_points.csv",
        ["n1", "n2", "k", "abs_alpha", "abs_beta", "unitarity_defect"],
        point_rows,
    )
    res.files["bogoliubov_fits.csv"] = write_csv(
        f"{outdir}/bogoliubov_fits.csv",
        ["n1", "n2", "p", "stderr", "npoints", "tail_sum", "verdict"],
        fit_rows,
    )
    res.info["verdicts"] = verdicts
    return res


def run_particle_numbers(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("particle_numbers")
    res = SuiteResult("particle_numbers")
    k_lo = 1 if cfg.mass == 0.0 else 0
    ks = list(range(k_lo, sc.k_max + 1))
    numbers = particle_number_evolution(
        cfg.background, cfg.mass, sc.order, sc.t0, sc.t1, ks,
        tol=sc.tol, workers=workers,
    )
    rows = [
        (p.k, abs(p.beta), p.number, p.unitarity_defect) for p in numbers.pairs
    ]
    res.files["particle_numbers.csv"] = write_csv(
        f"{outdir}/particle_numbers.csv",
        ["k", "abs_beta", "number", "unitarity_defect"],
        rows,
    )
    total = math.fsum((p.k + 1) ** 2 * p.number for p in numbers.pairs)
    res.check(
        "occupations_finite",
        all(math.isfinite(row[2]) for row in rows),
        f"degeneracy-weighted total {total:.6e} over {len(rows)} channels",
    )
    res.info["weighted_total"] = float(total)
    return res


def run_detector(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("detector")
    res = SuiteResult("detector")
    window = WindowFunction(
        sc.window_kind, sc.window_start, sc.window_end, rel_width=sc.window_rel_width
    )
    energies = np.geomspace(sc.energy_min, sc.energy_max, sc.energy_count)
    response_rows = []
    fit_rows = []
    slopes = {}
    for n in sorted(sc.orders):
        curve = detector_response(
            cfg.background, cfg.mass, n, sc.t0, window, energies, sc.k_cutoff,
            tol=sc.tol, require_adequate=False, workers=workers,
        )
        for E, F in zip(curve.energies, curve.values):
            response_rows.append((n, float(E), float(F), curve.cutoff_adequate))
        fit = slope_fit(curve, (sc.fit_min, sc.fit_max))
        fit_rows.append((n, fit.slope, fit.stderr, fit.npoints, sc.fit_min, sc.fit_max))
        slopes[str(n)] = {
            "slope": float(fit.slope),
            "stderr": float(fit.stderr),
            "bound_exponent": bound_exponent(n),
            "quadrature_rel_err": float(curve.quadrature_rel_err),
            "unresolved_channels": len(curve.unresolved_ks),
        }
        res.check(
            f"cutoff_adequate_n{n}",
            curve.cutoff_adequate,
            f"k_cutoff {sc.k_cutoff} against top energy {sc.energy_max}",
        )
        res.check(
            f"response_nonnegative_n{n}",
            bool(np.all(curve.values >= 0.0)),
            f"{curve.values.size} energies",
        )
    res.files["detector_response.csv"] = write_csv(
        f"{outdir}/detector_response.csv",
        ["n", "E", "F", "cutoff_adequate"],
        response_rows,
    )
    res.files["detector_fits.csv"] = write_csv(
        f"{outdir}/detector_fits.csv",
        ["n", "slope", "stderr", "npoints", "fit_min", "fit_max"],
        fit_rows,
    )
    res.info["fits"] = slopes
    return res


def run_invariants(cfg: ExperimentConfig, outdir: str, workers: int) -> SuiteResult:
    sc = cfg.section("invariants")
    res = SuiteResult("invariants")
    rng = np.random.default_rng(cfg.seed)
    rows = []

    def sweep(name, samples, worst, threshold):
        rows.append((name, samples, worst, threshold, worst <= threshold))
        res.check(name, worst <= threshold, f"max defect {worst:.3e} over {samples} draws")

    r_draws = rng.uniform(-2.0, 2.0, sc.samples)
    om_draws = np.exp(rng.uniform(math.log(0.2), math.log(20.0), sc.samples))
    worst = max(purity_check(r, Om) for r, Om in zip(r_draws, om_draws))
    sweep("purity_projector", sc.samples, float(worst), PURITY_SWEEP_TOL)

    # antisymmetric part of the two-point matrix must return sigma exactly
    data = rng.uniform(-1.0, 1.0, (sc.samples, 4))
    worst = 0.0
    for (r, Om, row) in zip(r_draws, om_draws, data):
        st = ModeQuasifreeState(k=0, r=float(r), Omega=float(Om))
        F1, F2 = row[:2], row[2:]
        got = 2.0 * st.lam(F1, F2).imag
        want = st.sigma(F1, F2)
        worst = max(worst, abs(got - want))
    sweep("sigma_recovery", sc.samples, float(worst), SIGMA_RECOVERY_TOL)

    worst = 0.0
    for (r, Om, row) in zip(r_draws, om_draws, data):
        st = ModeQuasifreeState(k=0, r=float(r), Omega=float(Om))
        F1, F2 = row[:2], row[2:]
        scale = max(1.0, st.mu(F1, F1) * st.mu(F2, F2))
        worst = max(worst, st.cauchy_schwarz_defect(F1, F2) / scale)
    sweep("cauchy_schwarz", sc.samples, float(worst), CS_RELATIVE_TOL)

    worst = 0.0
    for (r, Om) in zip(r_draws, om_draws):
        st = ModeQuasifreeState(k=0, r=float(r), Omega=float(Om))
        lam = st.lambda_matrix
        eigs = np.linalg.eigvalsh(lam)
        worst = max(worst, max(0.0, -float(eigs[0])) / float(np.trace(lam).real))
    sweep("lambda_positive", sc.samples, float(worst), PSD_RELATIVE_TOL)

    # norm equivalence spot check on the configured background
    multipliers = []
    for k in range(1, 65):
        chain = FrequencyChain(cfg.background, k, cfg.mass, 1, 0.0)
        r, Om = rj_multipliers(cfg.background, chain.frequency(1))
        multipliers.append((k, r, Om))
    ensemble = [
        [(float(q), float(p)) for q, p in rng.uniform(-1.0, 1.0, (64, 2))]
        for _ in range(16)
    ]
    comparison = mu_sobolev_ratio(multipliers, ensemble)
    rows.append(
        ("sobolev_ratio_spread", 16, comparison.spread, SOBOLEV_SPREAD_LIMIT,
         comparison.spread <= SOBOLEV_SPREAD_LIMIT)
    )
    res.check(
        "sobolev_ratio_spread",
        comparison.spread <= SOBOLEV_SPREAD_LIMIT,
        f"ratio spread {comparison.spread:.3f} over 16 draws, 64 channels",
    )
    res.info["sobolev_spread"] = float(comparison.spread)

    res.files["invariants.csv"] = write_csv(
        f"{outdir}/invariants.csv",
        ["check", "samples", "max_defect", "threshold", "passed"],
        rows,
    )
    return res


SUITES = {
    "frequencies": run_frequencies,
    "symbol_orders": run_symbol_orders,
    "modes": run_modes,
    "bogoliubov": run_bogoliubov,
    "particle_numbers": run_particle_numbers,
    "detector": run_detector,
    "invariants": run_invariants,
}


def run_suites(
    cfg: ExperimentConfig, names: list[str], outdir: str, workers: int
) -> dict[str, SuiteResult]:
    results = {}
    for name in names:
        try:
            results[name] = SUITES[name](cfg, outdir, workers)
        except AdiavacError as exc:
            failed = SuiteResult(name)
            failed.check("completed", False, f"{type(exc).__name__}: {exc}")
            results[name] = failed
    return results
