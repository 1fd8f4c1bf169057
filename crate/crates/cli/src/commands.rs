use lpp_core::cache::Cache;
use lpp_core::exact_dist::{
    external_table, model_table, prob_external, prob_lattice, prob_square, prob_triangle_fs_via_ogroup,
    square_edge_cutoff, triangle_odd, DistTable, ScaledCdf, WEYL_MAX_ELL,
};
use lpp_core::fredholm::{fredholm_log_det, identity_checks, IntegrableKernelSpec, IDENTITY_TOL};
use lpp_core::montecarlo::{
    cross_check, haar_orthogonal_expectation, poissonized_square_oracle, run, GPrime, SimConfig,
};
use lpp_core::opuc::{build_opuc, dpii_residual, recurrence_checks};
use lpp_core::painleve::{corner_study, f_goe, f_gse, f_gue, solve_cached, PiiSolution, DEFAULT_TOL};
use lpp_core::symbols::{normalization_log_z, orthogonal_weight, ModelKind, ModelSpec, SymbolSpec};
use serde_json::json;

use crate::args::{Cli, Command, GridArgs, ModelArgs, Suite, TwKind};
use crate::manifest::Run;
use crate::Failure;

/// Thresholds shared with the acceptance suite.
pub const DPII_TOL: f64 = 1e-8;
pub const RECURRENCE_TOL: f64 = 1e-9;
pub const DET_TOL: f64 = 1e-10;
pub const CORNER_ORDER: f64 = -2.0 / 3.0;
pub const CORNER_ORDER_SLACK: f64 = 0.2;
pub const MC_SIGMAS: f64 = 3.0;

/// Painlevé II range used by every command that needs `F_GUE`.
const PII_RANGE: (f64, f64) = (-10.0, 8.0);

pub fn dispatch(cli: &Cli) -> Result<(), Failure> {
    if cli.workers == 0 {
        return Err(Failure::Validation("--workers must be at least 1".into()));
    }
    match &cli.command {
        Command::Dist { model, lmax } => dist(cli, model, *lmax),
        Command::Tw { which, grid, tol } => tw(cli, *which, grid, *tol),
        Command::Verify { suite } => verify(cli, suite),
        Command::Converge { t, grid } => converge(cli, t, grid),
        Command::Mc { model, trials } => mc(cli, model, *trials),
    }
}

fn table_rows(t: &DistTable) -> Vec<(usize, f64)> {
    t.entries.iter().map(|e| (e.ell, e.p)).collect()
}

fn exact_table(cli: &Cli, spec: &ModelSpec, lmax: usize) -> Result<DistTable, Failure> {
    Ok(model_table(spec, lmax, cli.precision_profile)?)
}

fn dist(cli: &Cli, model: &ModelArgs, lmax: usize) -> Result<(), Failure> {
    let spec = model.spec();
    spec.validate()?;
    let table = exact_table(cli, &spec, lmax)?;
    let mut run = Run::new(&cli.out_dir, "dist", None)?;
    run.param("model", &spec);
    run.param("lmax", lmax);
    run.param("precision_profile", cli.precision_profile);
    let slug = model.slug();
    run.write(&format!("dist_{slug}.csv"), table.to_csv().as_bytes())?;
    run.write_json(&format!("dist_{slug}.json"), &table)?;
    run.finish()?;
    print!("{}", table.to_csv());
    Ok(())
}

fn painleve(run: &mut Run, x_lo: f64, tol: f64) -> Result<PiiSolution, Failure> {
    let lo = PII_RANGE.0.min(x_lo.floor());
    let (sol, hit) = solve_cached(&Cache::from_env(), lo, PII_RANGE.1, tol)?;
    run.cache_hit(hit);
    run.param("painleve_range", [lo, PII_RANGE.1]);
    run.param("painleve_tol", tol);
    Ok(sol)
}

fn tw(cli: &Cli, which: TwKind, grid: &GridArgs, tol: f64) -> Result<(), Failure> {
    let xs = grid.points().map_err(Failure::Validation)?;
    let mut run = Run::new(&cli.out_dir, "tw", None)?;
    let name = match which {
        TwKind::Gue => "gue",
        TwKind::Goe => "goe",
        TwKind::Gse => "gse",
    };
    run.param("which", name);
    run.param("grid", [grid.x_min, grid.x_max, grid.step]);
    let sol = painleve(&mut run, grid.x_min, tol)?;
    let f = match which {
        TwKind::Gue => f_gue,
        TwKind::Goe => f_goe,
        TwKind::Gse => f_gse,
    };
    let mut csv = String::from("x,F\n");
    for &x in &xs {
        csv.push_str(&format!("{x},{:.17e}\n", f(&sol, x)?));
    }
    run.write(&format!("tw_{name}.csv"), csv.as_bytes())?;
    run.finish()?;
    print!("{csv}");
    Ok(())
}

fn mc(cli: &Cli, model: &ModelArgs, trials: u64) -> Result<(), Failure> {
    let spec = model.spec();
    spec.validate()?;
    let cfg = SimConfig {
        model: spec.clone(),
        trials,
        seed: cli.seed,
        workers: cli.workers,
    };
    let emp = run(&cfg)?;
    let mut r = Run::new(&cli.out_dir, "mc", Some(cli.seed))?;
    r.param("model", &spec);
    r.param("trials", trials);
    let slug = model.slug();
    r.write(&format!("mc_{slug}.csv"), emp.to_csv().as_bytes())?;
    r.write_json(
        &format!("mc_{slug}.json"),
        &json!({ "model": spec, "trials": trials, "seed": cli.seed, "counts": emp.counts }),
    )?;
    r.finish()?;
    print!("{}", emp.to_csv());
    Ok(())
}

fn finish_verify(mut run: Run, suite: &str, pass: bool, report: serde_json::Value) -> Result<(), Failure> {
    let report = json!({ "suite": suite, "pass": pass, "report": report });
    run.write_json(&format!("verify_{suite}.json"), &report)?;
    run.finish()?;
    println!("{suite}: {}", if pass { "pass" } else { "FAIL" });
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "suite {suite} has residuals above threshold; see verify_{suite}.json"
        )))
    }
}

fn verify(cli: &Cli, suite: &Suite) -> Result<(), Failure> {
    match suite {
        Suite::Dpii { t, kmax } => verify_dpii(cli, *t, *kmax),
        Suite::Fredholm { t, kmax, nodes } => verify_fredholm(cli, *t, *kmax, *nodes),
        Suite::CornerAsymptotics { x, k } => verify_corner(cli, x, k),
        Suite::McCross { model, trials, lmax } => verify_mc_cross(cli, model, *trials, *lmax),
        Suite::Oracles { trials } => verify_oracles(cli, *trials),
    }
}

fn verify_dpii(cli: &Cli, t: f64, kmax: usize) -> Result<(), Failure> {
    if !(t > 0.0 && t.is_finite()) || kmax < 2 {
        return Err(Failure::Validation(format!(
            "need t > 0 and kmax ≥ 2 (got t = {t}, kmax = {kmax})"
        )));
    }
    let opuc = build_opuc(&SymbolSpec::poisson_square(t), kmax + 1, cli.precision_profile)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 2..=kmax {
        let r = dpii_residual(&opuc, t, k)?;
        worst = worst.max(r.abs());
        rows.push(json!({ "k": k, "b": opuc.b(k), "residual": r }));
    }
    let rec = recurrence_checks(&opuc)?;
    let pass = worst < DPII_TOL
        && rec.a_deviation < RECURRENCE_TOL
        && rec.d_deviation < RECURRENCE_TOL
        && rec.det_deviation < DET_TOL;
    let mut run = Run::new(&cli.out_dir, "verify dpii", None)?;
    run.param("t", t);
    run.param("kmax", kmax);
    run.param("precision_profile", cli.precision_profile);
    let report = json!({
        "precision_bits": opuc.source.precision_bits,
        "max_residual": worst,
        "threshold": DPII_TOL,
        "residuals": rows,
        "recurrences": rec,
        "recurrence_threshold": RECURRENCE_TOL,
        "det_threshold": DET_TOL,
    });
    finish_verify(run, "dpii", pass, report)
}

fn verify_fredholm(cli: &Cli, t: f64, kmax: usize, nodes: usize) -> Result<(), Failure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Failure::Validation(format!(
            "t must be finite and nonnegative (got {t})"
        )));
    }
    let opuc = build_opuc(&SymbolSpec::poisson_square(t), kmax.max(1), cli.precision_profile)?;
    let rep = identity_checks(t, kmax, &opuc, nodes)?;
    // Far past the edge, 2^{−k} det(1 − K_k) → 1.
    let k0 = (2.0 * t + 15.0).ceil() as usize;
    let mut limit_rows = Vec::new();
    let mut limit_worst: f64 = 0.0;
    for k in k0..k0 + 3 {
        let ld = fredholm_log_det(&IntegrableKernelSpec::square(t, k, nodes))?;
        let v = (ld.re - k as f64 * std::f64::consts::LN_2).exp();
        limit_worst = limit_worst.max((v - 1.0).abs());
        limit_rows.push(json!({ "k": k, "normalized": v }));
    }
    let pass = rep.passed() && limit_worst < IDENTITY_TOL;
    let mut run = Run::new(&cli.out_dir, "verify fredholm", None)?;
    run.param("t", t);
    run.param("kmax", kmax);
    run.param("nodes", nodes);
    let report = json!({
        "threshold": IDENTITY_TOL,
        "identities": rep,
        "limit": { "rows": limit_rows, "max_deviation": limit_worst },
    });
    finish_verify(run, "fredholm", pass, report)
}

fn verify_corner(cli: &Cli, xs: &[f64], ks: &[usize]) -> Result<(), Failure> {
    let mut run = Run::new(&cli.out_dir, "verify corner-asymptotics", None)?;
    run.param("x", xs);
    run.param("k", ks);
    let sol = painleve(&mut run, PII_RANGE.0, DEFAULT_TOL)?;
    let mut studies = Vec::new();
    let mut pass = true;
    for &x in xs {
        let s = corner_study(x, ks, &sol, cli.precision_profile)?;
        let decreasing = s
            .rows
            .windows(2)
            .all(|w| w[1].dev_y21 < w[0].dev_y21 && w[1].dev_y11 < w[0].dev_y11);
        let ok21 = (s.slope_y21 - CORNER_ORDER).abs() <= CORNER_ORDER_SLACK;
        let ok11 = (s.slope_y11 - CORNER_ORDER).abs() <= CORNER_ORDER_SLACK;
        pass &= decreasing && ok21 && ok11;
        studies.push(json!({
            "study": s,
            "decreasing": decreasing,
            "y21_order_ok": ok21,
            "y11_order_ok": ok11,
        }));
    }
    let report = json!({
        "expected_order": CORNER_ORDER,
        "slack": CORNER_ORDER_SLACK,
        "studies": studies,
    });
    finish_verify(run, "corner-asymptotics", pass, report)
}

fn verify_mc_cross(cli: &Cli, model: &ModelArgs, trials: u64, lmax: usize) -> Result<(), Failure> {
    let spec = model.spec();
    spec.validate()?;
    let lmax = match spec.kind {
        ModelKind::SymmetricLatticeA | ModelKind::SymmetricLatticeC => lmax.min(WEYL_MAX_ELL),
        _ => lmax,
    };
    let table = exact_table(cli, &spec, lmax)?;
    let emp = run(&SimConfig {
        model: spec.clone(),
        trials,
        seed: cli.seed,
        workers: cli.workers,
    })?;
    let rows = cross_check(&emp, &table_rows(&table), MC_SIGMAS, 0.01, 0.99);
    let pass = rows.iter().all(|r| r.pass);
    let mut run = Run::new(&cli.out_dir, "verify mc-cross", Some(cli.seed))?;
    run.param("model", &spec);
    run.param("trials", trials);
    run.param("lmax", lmax);
    let report = json!({
        "sigmas": MC_SIGMAS,
        "tested_mass": [0.01, 0.99],
        "rows": rows,
    });
    finish_verify(run, "mc-cross", pass, report)
}

struct Check {
    rows: Vec<serde_json::Value>,
    pass: bool,
}

impl Check {
    fn add(&mut self, name: &str, value: f64, reference: f64, tol: f64) {
        let ok = (value - reference).abs() <= tol;
        self.pass &= ok;
        self.rows.push(json!({
            "name": name, "value": value, "reference": reference, "tolerance": tol, "pass": ok,
        }));
    }
}

fn verify_oracles(cli: &Cli, trials: u64) -> Result<(), Failure> {
    let profile = cli.precision_profile;
    let mut c = Check {
        rows: Vec::new(),
        pass: true,
    };
    let sq = build_opuc(&SymbolSpec::poisson_square(1.0), 40, profile)?;
    for ell in 1..=5 {
        let (oracle, tail) = poissonized_square_oracle(1.0, ell, 30)?;
        c.add(
            &format!("square t=1 l={ell} vs permutation counts"),
            prob_square(1.0, ell, &sq)?,
            oracle,
            1e-8 + tail,
        );
    }
    for (kind, ell, p) in [
        (ModelKind::LatticeA, 0, 0.8),
        (ModelKind::LatticeA, 1, 0.96),
        (ModelKind::LatticeB, 0, 1.0 / 1.2),
        (ModelKind::LatticeB, 1, 1.0),
    ] {
        let m = ModelSpec::lattice(kind, vec![0.5], vec![0.4]);
        c.add(
            &format!("{kind:?} 1x1 l={ell}"),
            prob_lattice(&m, ell, profile)?,
            p,
            1e-10,
        );
    }
    let ext = external_table(1.0, 0.0, 0.0, 10, profile)?;
    for e in &ext.entries {
        c.add(
            &format!("external(0,0) l={} vs square", e.ell),
            e.p,
            prob_square(1.0, e.ell, &sq)?,
            1e-12,
        );
    }
    for alpha in [0.0, 0.5, 1.5] {
        for m in 0..=3 {
            let ell = 2 * m + 1;
            c.add(
                &format!("triangle t=1 a={alpha} l={ell} vs Weyl quadrature"),
                triangle_odd(1.0, alpha, m, profile)?.p,
                prob_triangle_fs_via_ogroup(1.0, alpha, ell)?,
                1e-6,
            );
        }
        let exact1 = 0.5 * ((1.0 + alpha) * 1f64.exp() + (1.0 - alpha) * (-1f64).exp()) / (alpha + 0.5f64).exp();
        c.add(
            &format!("triangle t=1 a={alpha} l=1 vs O(1)"),
            triangle_odd(1.0, alpha, 0, profile)?.p,
            exact1,
            1e-12,
        );
    }
    let fs = ModelSpec::triangle_fs(1.0, 0.5);
    let (mean, se) = haar_orthogonal_expectation(&orthogonal_weight(&fs)?, 5, trials, cli.seed, cli.workers)?;
    let z = normalization_log_z(&fs)?.exp();
    c.add(
        "Haar O(5) vs Weyl quadrature",
        mean / z,
        prob_triangle_fs_via_ogroup(1.0, 0.5, 5)?,
        MC_SIGMAS * se / z,
    );
    let fk0 = fredholm_log_det(&IntegrableKernelSpec::square(1.0, 0, 128))?;
    c.add("log det(1-K_0) at t=1", fk0.re, -1.0, 1e-8);
    let near = prob_external(
        1.0,
        2.0,
        0.5,
        4,
        &build_opuc(&SymbolSpec::poisson_square(1.0), square_edge_cutoff(1.0), profile)?,
    )?;
    c.add("external at a+·a- = 1 lies in [0, 1]", near.clamp(0.0, 1.0), near, 0.0);
    let g = GPrime::new(0.5, 0.3)?;
    c.add(
        "g' normalization (0.5, 0.3)",
        (0..400).map(|k| g.pmf(k)).sum(),
        1.0,
        1e-12,
    );

    let mut run = Run::new(&cli.out_dir, "verify oracles", Some(cli.seed))?;
    run.param("haar_trials", trials);
    run.param("precision_profile", profile);
    finish_verify(run, "oracles", c.pass, json!({ "checks": c.rows }))
}

fn converge(cli: &Cli, ts: &[f64], grid: &GridArgs) -> Result<(), Failure> {
    let xs = grid.points().map_err(Failure::Validation)?;
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0 && t <= 12.0)) {
        return Err(Failure::Validation(format!(
            "t values must lie in (0, 12] (got {ts:?})"
        )));
    }
    let mut run = Run::new(&cli.out_dir, "converge", None)?;
    run.param("t", ts);
    run.param("grid", [grid.x_min, grid.x_max, grid.step]);
    run.param("precision_profile", cli.precision_profile);
    let sol = painleve(&mut run, grid.x_min, DEFAULT_TOL)?;
    let mut csv = String::from("t,x,ell,scaled_cdf,f_gue,diff\n");
    let mut summary = Vec::new();
    let mut sups = Vec::new();
    for &t in ts {
        let s = ScaledCdf::new(t, cli.precision_profile)?;
        let mut sup: f64 = 0.0;
        for &x in &xs {
            let p = s.eval(x)?;
            let f = f_gue(&sol, x)?;
            sup = sup.max((p - f).abs());
            csv.push_str(&format!("{t},{x},{},{p:.17e},{f:.17e},{:.17e}\n", s.ell(x), p - f));
        }
        // At x_ℓ = (ℓ − 2t)/t^{1/3} the step function equals P(L ≤ ℓ) exactly,
        // which isolates the convergence from the lattice discretization.
        let mut aligned: f64 = 0.0;
        let lo = (2.0 * t + grid.x_min * t.cbrt()).ceil().max(0.0) as usize;
        let hi = (2.0 * t + grid.x_max * t.cbrt()).floor().max(0.0) as usize;
        for ell in lo..=hi {
            let x = (ell as f64 - 2.0 * t) / t.cbrt();
            aligned = aligned.max((s.eval(x)? - f_gue(&sol, x)?).abs());
        }
        sups.push(sup);
        summary.push(json!({ "t": t, "sup_norm": sup, "sup_norm_at_lattice_points": aligned }));
    }
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    run.write("converge.csv", csv.as_bytes())?;
    run.write_json(
        "converge_summary.json",
        &json!({ "rows": summary, "decreasing": decreasing }),
    )?;
    run.finish()?;
    for row in &summary {
        println!("t={} sup={:.6}", row["t"], row["sup_norm"].as_f64().unwrap_or(f64::NAN));
    }
    if decreasing {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "sup-norms {sups:?} do not decrease along the t-list"
        )))
    }
}
