use std::fmt::Write as _;
use std::path::Path;

use geoqm::lie::{self, LieBasis};
use geoqm::phasespace::grid::{oscillator_wigner, wigner_function};
use geoqm::phasespace::moyal::{self, semiclassical_convergence};
use geoqm::phasespace::{PhaseSpaceGrid, QGrid, Warning, WaveFunction1D};
use geoqm::u4chart;
use geoqm::validation::{self, CriterionResult};
use geoqm::witness::{self, RhoTParams};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{merge, RunConfig, DEFAULT_LOCUS_TOL};
use crate::{
    emit, num, Algebra, Chart, CheckArgs, CliError, Command, LocusArgs, MoyalArgs, SweepArgs, Symbol, TensorsArgs,
    WignerArgs, WitnessCommand,
};

pub const DEFAULT_FIELD_POINTS: usize = 20;
pub const DEFAULT_SWEEP_STEPS: usize = 21;
pub const DEFAULT_LOCUS_STEPS: usize = 100;
pub const DEFAULT_WIGNER_N: usize = 512;
pub const DEFAULT_HBARS: [f64; 3] = [0.2, 0.1, 0.05];

pub fn dispatch(cmd: Command, mut cfg: RunConfig) -> Result<(), CliError> {
    match cmd {
        Command::Check(a) => check(a, &cfg),
        Command::Structure(a) => {
            merge(&mut cfg.structure.algebra, a.algebra.map(|x| format!("{x:?}").to_lowercase()));
            merge(&mut cfg.structure.symbol, a.symbol.map(|x| format!("{x:?}").to_lowercase()));
            merge(&mut cfg.structure.tol, a.tol);
            structure(&cfg)
        }
        Command::Tensors(a) => {
            merge(&mut cfg.tensors.points, a.points);
            tensors(&a, &cfg)
        }
        Command::Witness { action: WitnessCommand::Sweep(a) } => {
            merge_sweep(&mut cfg, a);
            witness_sweep(&cfg)
        }
        Command::Witness { action: WitnessCommand::Locus(LocusArgs { steps }) } => {
            merge(&mut cfg.witness.steps, steps);
            witness_locus(&cfg)
        }
        Command::Wigner(a) => {
            let WignerArgs { state, n, q0, p0, sigma } = a;
            merge(&mut cfg.wigner.state, state);
            merge(&mut cfg.wigner.n, n);
            merge(&mut cfg.wigner.q0, q0);
            merge(&mut cfg.wigner.p0, p0);
            merge(&mut cfg.wigner.sigma, sigma);
            wigner(&cfg)
        }
        Command::Moyal(a) => {
            merge(&mut cfg.moyal.hbars, a.hbars.clone());
            moyal_cmd(&a, &cfg)
        }
    }
}

fn merge_sweep(cfg: &mut RunConfig, a: SweepArgs) {
    let w = &mut cfg.witness;
    merge(&mut w.a_min, a.a_min);
    merge(&mut w.a_max, a.a_max);
    merge(&mut w.steps, a.steps);
    merge(&mut w.b, a.b);
    merge(&mut w.c_frac, a.c_frac);
    merge(&mut w.phi, a.phi);
}

fn summary(cfg: &RunConfig, command: &str, stats: Value) -> Result<(), CliError> {
    let Some(path) = &cfg.summary else { return Ok(()) };
    let v = json!({
        "tool": "geoqm",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
        "stats": stats,
    });
    write_json(path, &v)
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Validation(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn report_warnings(warnings: &[Warning]) {
    for w in warnings {
        eprintln!("geoqm: warning: {w:?}");
    }
}

fn check(a: CheckArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let ids: Vec<u8> = if a.all {
        (1..=8).collect()
    } else if a.criterion.is_empty() {
        return Err(CliError::Usage("check needs --all or --criterion N[,N...]".into()));
    } else {
        a.criterion.clone()
    };
    let seed = cfg.seed();
    let mut results: Vec<CriterionResult> = Vec::new();
    for id in ids {
        let r = validation::run_one(id, seed).ok_or_else(|| CliError::Usage(format!("no criterion {id} (1-8)")))?;
        eprintln!("{}", r.summary_line());
        results.push(r);
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let v = json!({
        "tool": "geoqm",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "check",
        "config": cfg,
        "seed": seed,
        "passed": failed.is_empty(),
        "criteria": results,
    });
    let text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Validation(e.to_string()))? + "\n";
    emit(cfg.out.as_ref(), &text)?;
    if let Some(p) = &cfg.summary {
        write_json(p, &v)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(format!("criteria {failed:?} failed")))
    }
}

fn structure(cfg: &RunConfig) -> Result<(), CliError> {
    let s = &cfg.structure;
    let algebra = match s.algebra.as_deref().unwrap_or("u3") {
        "u2" => Algebra::U2,
        "u3" => Algebra::U3,
        "u4" => Algebra::U4,
        other => return Err(CliError::Usage(format!("unknown algebra {other:?} (u2|u3|u4)"))),
    };
    let symbol = match s.symbol.as_deref().unwrap_or("c") {
        "c" => Symbol::C,
        "d" => Symbol::D,
        other => return Err(CliError::Usage(format!("unknown symbol {other:?} (c|d)"))),
    };
    let tol = s.tol.unwrap_or(lie::BASIS_TOL);
    let basis = match algebra {
        Algebra::U2 => LieBasis::u2(),
        Algebra::U3 => LieBasis::u3(),
        Algebra::U4 => LieBasis::u4(),
    };
    let sc = lie::structure_constants(&basis);
    let rows = match symbol {
        Symbol::C => sc.c_table(tol),
        Symbol::D => sc.d_table(tol),
    };
    emit(cfg.out.as_ref(), &lie::table_csv(&rows))?;
    summary(cfg, "structure", json!({ "dim": sc.dim(), "rows": rows.len() }))
}

fn seeded_points(seed: u64, n: usize) -> Vec<u4chart::U4ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| u4chart::random_point(&mut rng)).collect()
}

fn tensors(a: &TensorsArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let Chart::U4 = a.chart;
    let n = cfg.tensors.points.unwrap_or(DEFAULT_FIELD_POINTS);
    if n == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let pts = seeded_points(cfg.seed(), n);
    if !a.verify_fields {
        let mut out = String::from("point_id,row,col,poisson,jordan\n");
        for (pid, p) in pts.iter().enumerate() {
            let (pm, rm) = u4chart::chart_tensors(p);
            for i in 0..u4chart::DIM {
                for j in 0..u4chart::DIM {
                    let _ = writeln!(
                        out,
                        "{pid},{},{},{},{}",
                        u4chart::LABELS[i],
                        u4chart::LABELS[j],
                        num(pm[(i, j)]),
                        num(rm[(i, j)])
                    );
                }
            }
        }
        emit(cfg.out.as_ref(), &out)?;
        let points: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vector().to_vec()).collect();
        return summary(cfg, "tensors", json!({ "points": points }));
    }
    let report = u4chart::compare_fields(&pts);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["field", "component", "point_id", "derived", "printed", "delta"]).map_err(csv_err)?;
    for r in &report.rows {
        let pid = r.point_id.to_string();
        w.write_record([r.field, r.component, &pid, &num(r.derived), &num(r.printed), &num(r.delta)])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Validation(e.to_string()))?;
    emit(cfg.out.as_ref(), &String::from_utf8_lossy(&bytes))?;
    for s in &report.summaries {
        let verdict = if s.matches {
            "match".to_string()
        } else if s.matches_up_to_sign {
            "match up to global sign".to_string()
        } else {
            format!("mismatch in {:?}", s.mismatched_components)
        };
        eprintln!("{:>8}: max delta {:.3e}, {verdict}", s.field, s.max_delta);
    }
    summary(cfg, "tensors", json!({ "chain_rule_residual": report.chain_rule_residual, "fields": report.summaries }))?;
    if a.strict && !report.all_match() {
        return Err(CliError::Validation("listed fields disagree with the derived ones".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    a: f64,
    b: f64,
    c: f64,
    phi: f64,
    s: f64,
    conc: f64,
    wedge: f64,
    bracket: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn witness_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let w = &cfg.witness;
    let (a_min, a_max) = (w.a_min.unwrap_or(0.35), w.a_max.unwrap_or(0.45));
    let steps = w.steps.unwrap_or(DEFAULT_SWEEP_STEPS);
    let frac = w.c_frac.unwrap_or(0.5);
    let phi = w.phi.unwrap_or(0.0);
    if a_min.is_nan() || a_max.is_nan() || a_min > a_max || steps == 0 || !(0.0..=1.0).contains(&frac) {
        return Err(CliError::Usage("need a-min <= a-max, steps > 0 and c-frac in [0, 1]".into()));
    }
    let rows: Vec<Result<SweepRow, String>> = linspace(a_min, a_max, steps)
        .into_par_iter()
        .map(|a| {
            let b = w.b.unwrap_or(a);
            let c = (frac * 2.0 * (a * b).max(0.0).sqrt()).min(1.0);
            let p = RhoTParams::new(a, b, c, phi);
            let rec = witness::witness_differentials(p).map_err(|e| format!("a = {a}: {e}"))?;
            let bracket = witness::poisson_bracket_sc(p).map_err(|e| format!("a = {a}: {e}"))?;
            Ok(SweepRow { a, b, c, phi, s: rec.entropy, conc: rec.concurrence, wedge: rec.wedge_norm, bracket })
        })
        .collect();
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_, _>>().map_err(CliError::Validation)?;
    let mut out = String::from("a,b,c,phi,S,C,wedge_norm,bracket_SC\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.a),
            num(r.b),
            num(r.c),
            num(r.phi),
            num(r.s),
            num(r.conc),
            num(r.wedge),
            num(r.bracket)
        );
    }
    emit(cfg.out.as_ref(), &out)?;
    let max_bracket = rows.iter().map(|r| r.bracket.abs()).fold(0.0, f64::max);
    let min_wedge = rows.iter().map(|r| r.wedge).fold(f64::INFINITY, f64::min);
    summary(
        cfg,
        "witness sweep",
        json!({ "rows": rows.len(), "max_abs_bracket_SC": max_bracket, "min_wedge_norm": min_wedge }),
    )
}

/// `steps` values of `a` strictly inside `(1/3, 1/2)`, where the curve is real and `ρ_t` interior.
pub fn locus_grid(steps: usize) -> Vec<f64> {
    let (lo, hi) = (1.0 / 3.0, 0.5);
    (0..steps).map(|k| lo + (hi - lo) * (k + 1) as f64 / (steps + 1) as f64).collect()
}

fn witness_locus(cfg: &RunConfig) -> Result<(), CliError> {
    let steps = cfg.witness.steps.unwrap_or(DEFAULT_LOCUS_STEPS);
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }
    let tol = cfg.tolerance("locus", DEFAULT_LOCUS_TOL);
    let pts: Vec<Option<witness::LocusPoint>> =
        locus_grid(steps).into_par_iter().map(witness::independence_point).collect();
    let mut out = String::from("a,b,c,c_closed_form,delta,wedge_norm\n");
    let mut worst = 0.0f64;
    let mut missing = Vec::new();
    for (a, p) in locus_grid(steps).into_iter().zip(pts) {
        let Some(p) = p else {
            missing.push(a);
            continue;
        };
        let cf = witness::locus_closed_form(a).unwrap_or(f64::NAN);
        let delta = (p.c - cf).abs();
        worst = if delta.is_nan() { f64::INFINITY } else { worst.max(delta) };
        let _ =
            writeln!(out, "{},{},{},{},{},{}", num(p.a), num(p.b), num(p.c), num(cf), num(delta), num(p.wedge_norm));
    }
    emit(cfg.out.as_ref(), &out)?;
    summary(cfg, "witness locus", json!({ "steps": steps, "max_delta": worst, "tolerance": tol, "missing": missing }))?;
    if !missing.is_empty() {
        return Err(CliError::Validation(format!("no locus point found for a in {missing:?}")));
    }
    if worst > tol {
        return Err(CliError::Validation(format!("locus deviates from the closed form by {worst:.3e} > {tol:.1e}")));
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn read_state_file(path: &str) -> Result<(Vec<f64>, Vec<Complex64>), CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err)?;
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != ["q", "re", "im"] {
        return Err(CliError::Usage(format!("{path}: expected header q,re,im")));
    }
    let mut qs = Vec::new();
    let mut vs = Vec::new();
    for rec in rdr.deserialize::<(f64, f64, f64)>() {
        let (q, re, im) = rec.map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
        qs.push(q);
        vs.push(Complex64::new(re, im));
    }
    Ok((qs, vs))
}

/// Uniform q-grid reconstructed from file samples.
fn grid_from_samples(qs: &[f64]) -> Result<QGrid, CliError> {
    let n = qs.len();
    if n < 2 {
        return Err(CliError::Validation("state file needs at least two samples".into()));
    }
    let step = (qs[n - 1] - qs[0]) / (n - 1) as f64;
    let uneven = qs.windows(2).map(|w| (w[1] - w[0] - step).abs()).fold(0.0, f64::max);
    if step.is_nan() || step <= 0.0 || uneven > 1e-9 * step.abs().max(1.0) {
        return Err(CliError::Validation("state file q-samples must be increasing and uniform".into()));
    }
    Ok(QGrid::new(qs[0], qs[0] + step * n as f64, n)?)
}

fn wigner(cfg: &RunConfig) -> Result<(), CliError> {
    let hbar = cfg.hbar()?;
    let w = &cfg.wigner;
    let spec = w.state.as_deref().unwrap_or("gaussian");
    let default = PhaseSpaceGrid::default_for(hbar)?;
    let n = w.n.unwrap_or(DEFAULT_WIGNER_N);
    let (l_lo, l_hi) = (default.q.min, default.q.min + default.q.length());
    let sized = QGrid::new(l_lo, l_hi, n)?;
    let mut analytic: Option<usize> = None;
    let psi = if spec == "gaussian" {
        let sigma = w.sigma.unwrap_or(hbar.sqrt());
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(CliError::Validation(format!("sigma must be positive, got {sigma}")));
        }
        WaveFunction1D::gaussian_packet(sized, w.q0.unwrap_or(0.0), w.p0.unwrap_or(0.0), sigma, hbar)?
    } else if let Some(k) = spec.strip_prefix("fock:") {
        let level: usize = k.parse().map_err(|_| CliError::Usage(format!("bad Fock level {k:?}")))?;
        analytic = Some(level);
        WaveFunction1D::oscillator(sized, level, hbar)?
    } else if let Some(path) = spec.strip_prefix("file:") {
        let (qs, vs) = read_state_file(path)?;
        WaveFunction1D::normalized(grid_from_samples(&qs)?, vs)?
    } else {
        return Err(CliError::Usage(format!("unknown state {spec:?} (gaussian|fock:N|file:PATH)")));
    };
    let pgrid = QGrid::new(l_lo, l_hi, psi.grid.n)?;
    let grid = PhaseSpaceGrid::new(psi.grid, pgrid, hbar)?;
    let res = wigner_function(&psi, &grid)?;
    report_warnings(&res.warnings);
    let vals = res.function.real();
    let (qs, ps) = (grid.q.points(), grid.p.points());
    let mut out = String::with_capacity(qs.len() * ps.len() * 72);
    out.push_str("q,p,W\n");
    for (i, q) in qs.iter().enumerate() {
        for (j, p) in ps.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", num(*q), num(*p), num(vals[(i, j)]));
        }
    }
    emit(cfg.out.as_ref(), &out)?;
    let norm = res.function.integral().re;
    let analytic_err = analytic.map(|level| {
        let mut e = 0.0f64;
        for (i, q) in qs.iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                e = e.max((vals[(i, j)] - oscillator_wigner(level, *q, *p, hbar)).abs());
            }
        }
        e
    });
    summary(
        cfg,
        "wigner",
        json!({
            "grid": grid,
            "normalization": norm,
            "max_abs_error_vs_analytic": analytic_err,
            "warnings": res.warnings,
        }),
    )
}

fn moyal_cmd(a: &MoyalArgs, cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(level) = a.stationary {
        let hbar = cfg.hbar()?;
        let grid = PhaseSpaceGrid::for_moyal(hbar, 8.0 * hbar.sqrt(), 128, 8.0 * hbar.sqrt(), 1)?;
        let energy = hbar * (level as f64 + 0.5);
        let res = moyal::stationary_moyal_check(&grid, level, energy);
        emit(
            cfg.out.as_ref(),
            &format!("level,hbar,energy,residual\n{level},{},{},{}\n", num(hbar), num(energy), num(res)),
        )?;
        return summary(cfg, "moyal stationary", json!({ "level": level, "residual": res }));
    }
    if !a.hbar_sweep {
        return Err(CliError::Usage("moyal needs --hbar-sweep or --stationary N".into()));
    }
    let hbars = cfg.moyal.hbars.clone().unwrap_or_else(|| DEFAULT_HBARS.to_vec());
    if hbars.len() < 2 || hbars.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(CliError::Validation("need at least two positive hbar values".into()));
    }
    let rep = semiclassical_convergence(&hbars)?;
    report_warnings(&rep.warnings);
    let mut out = String::from("hbar,max_error,n_q,n_p\n");
    for p in &rep.points {
        let _ = writeln!(out, "{},{},{},{}", num(p.hbar), num(p.max_error), p.n_q, p.n_p);
    }
    emit(cfg.out.as_ref(), &out)?;
    eprintln!("log-log slope {:.4}", rep.slope);
    summary(cfg, "moyal hbar-sweep", json!({ "slope": rep.slope, "points": rep.points, "warnings": rep.warnings }))
}
