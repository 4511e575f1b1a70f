//! The seven subcommands. Exit-code contract: 0 success, 1 check failure,
//! 2 usage or config error.

use crate::config::*;
use conewarp::report::{fmt_f64, Table};
use conewarp::*;
use std::f64::consts::PI;
use std::path::Path;

type CliResult<T> = std::result::Result<T, String>;
use std::sync::Arc;

pub struct Outcome {
    pub exit: i32,
    pub summary: String,
}

fn write_file(out: &Path, name: &str, text: &str) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
    std::fs::write(out.join(name), text).map_err(|e| e.to_string())
}

fn plot_script(tables: &[(&str, &str, &str)]) -> String {
    let mut s = String::from(
        "#!/usr/bin/env python3\n\
         # Renders the run's tables; the data live in the csv files next to\n\
         # this script.\n\
         import csv\n\
         import sys\n\
         \n\
         import matplotlib.pyplot as plt\n\
         \n\
         \n\
         def load(name):\n\
         \x20   rows = []\n\
         \x20   with open(name) as fh:\n\
         \x20       for row in csv.DictReader(r for r in fh if not r.startswith(\"#\")):\n\
         \x20           rows.append({k: float(v) if v.replace(\".\", \"\").replace(\"-\", \"\")\n\
         \x20                        .replace(\"e\", \"\").replace(\"+\", \"\").isdigit() else v\n\
         \x20                        for k, v in row.items()})\n\
         \x20   return rows\n\
         \n\
         \n",
    );
    for (file, xcol, ycol) in tables {
        s.push_str(&format!(
            "rows = load(\"{file}\")\n\
             plt.figure()\n\
             plt.plot([r[\"{xcol}\"] for r in rows], [r[\"{ycol}\"] for r in rows], \"o-\")\n\
             plt.xlabel(\"{xcol}\")\n\
             plt.ylabel(\"{ycol}\")\n\
             plt.title(\"{file}\")\n\
             plt.savefig(\"{file}.png\", dpi=120)\n\n"
        ));
    }
    s.push_str("print(\"wrote\", len(sys.argv) and \"figures\")\n");
    s
}

fn verify_family(
    name: &str,
    n: usize,
    m_max: usize,
    cycles: usize,
) -> CliResult<Arc<dyn CrossSectionFamily>> {
    match name {
        "stationary-round" => Ok(Arc::new(round_family(n - 1, 1.0))),
        "example1-loop" => {
            let built = build_example1_family(n, m_max, cycles).map_err(|e| e.to_string())?;
            Ok(built.family)
        }
        other => Err(format!("unknown family '{other}' (stationary-round | example1-loop)")),
    }
}

fn default_params(n: usize, h_inf: f64) -> LemmaParams {
    LemmaParams { n, amp_e: 0.5, amp_f: 0.005, r0: 0.1, h_inf, d_const: 16.0 * n as f64 }
}

fn report_table(report: &RicciReport, params: &LemmaParams) -> Table {
    let mut t = Table::new(&[
        "l3",
        "normalized_min",
        "delta_grid_min",
        "slack",
        "case1_min",
        "case2_min",
        "verdict",
    ]);
    t.meta("family_dimension", params.n - 1);
    t.meta("amp_e", fmt_f64(params.amp_e));
    t.meta("amp_f", fmt_f64(params.amp_f));
    t.meta("r0", fmt_f64(params.r0));
    t.meta("d_const", fmt_f64(params.d_const));
    t.meta(
        "units",
        "minima and slack normalized by the local radial estimate E/(2 L2^2 L1)",
    );
    t.meta("argmin_l3", fmt_f64(report.argmin.0));
    t.meta("argmin_delta", fmt_f64(report.argmin.1));
    t.meta("measured_mixed_norm", fmt_f64(report.measured_mixed_norm));
    t.row(vec![
        fmt_f64(report.argmin.0),
        fmt_f64(report.min_value),
        fmt_f64(report.grid_delta_min),
        fmt_f64(report.slack),
        fmt_f64(report.case1_min),
        fmt_f64(report.case2_min),
        report.verdict.to_string(),
    ]);
    t
}

/// Min-Ricci profile over the radius grid for the plot script.
fn profile_table(cone: &ConeMetric, grid: &DirectionalGrid) -> CliResult<Table> {
    let mut t = Table::new(&["l3", "normalized_min"]);
    for chunk in 0..12 {
        let lo = grid.l3_lo + (grid.l3_hi - grid.l3_lo) * chunk as f64 / 12.0;
        let hi = grid.l3_lo + (grid.l3_hi - grid.l3_lo) * (chunk as f64 + 1.0) / 12.0;
        let sub = DirectionalGrid {
            l3_lo: lo,
            l3_hi: hi,
            n_radii: 4,
            n_deltas: grid.n_deltas.min(21),
            n_samples: grid.n_samples.min(8),
            n_directions: grid.n_directions.min(3),
            seed: grid.seed,
        };
        let rep = directional_ricci_min(cone, &sub).map_err(|e| e.to_string())?;
        t.row(vec![fmt_f64(0.5 * (lo + hi)), fmt_f64(rep.min_value)]);
    }
    Ok(t)
}

pub fn cmd_lemma_verify(cfg: &LemmaVerifyConfig, out: &Path) -> CliResult<Outcome> {
    let family = verify_family(&cfg.family, cfg.n, cfg.m_max, cfg.cycles)?;
    let params = cfg.params.unwrap_or_else(|| default_params(cfg.n, cfg.h_inf));
    let cone = ConeMetric::new_unchecked(params, family);
    let grid = cfg.grid.to_directional(cfg.seed);
    let report = directional_ricci_min(&cone, &grid).map_err(|e| e.to_string())?;
    write_file(out, "lemma_verify.csv", &report_table(&report, &params).to_text())?;
    write_file(out, "min_ricci_profile.csv", &profile_table(&cone, &grid)?.to_text())?;
    write_file(
        out,
        "plot.py",
        &plot_script(&[("min_ricci_profile.csv", "l3", "normalized_min")]),
    )?;
    let ok = report.verdict && report.case1_min >= 0.0 && report.case2_min >= 0.0;
    Ok(Outcome {
        exit: if ok { 0 } else { 1 },
        summary: format!(
            "verdict {} (normalized min {} slack {} at l3 {} delta {})",
            ok,
            fmt_f64(report.min_value),
            fmt_f64(report.slack),
            fmt_f64(report.argmin.0),
            fmt_f64(report.argmin.1)
        ),
    })
}

pub fn cmd_lemma_search(cfg: &LemmaSearchConfig, out: &Path) -> CliResult<Outcome> {
    let sweep = cfg.sweep.clone().unwrap_or_default();
    if sweep.f_values.is_empty() || sweep.e_multipliers.is_empty() || sweep.r0_values.is_empty() {
        return Err("empty sweep schedule".into());
    }
    let family = verify_family(&cfg.family, cfg.n, cfg.m_max, cfg.cycles)?;
    let grid = cfg.grid.to_directional(cfg.seed);
    match feasibility_search(cfg.n, family, cfg.h_inf, &sweep, &grid) {
        Ok((params, report)) => {
            let mut text = serde_json::to_string_pretty(&params).map_err(|e| e.to_string())?;
            text.push('\n');
            write_file(out, "lemma_params.json", &text)?;
            write_file(out, "certificate.csv", &report_table(&report, &params).to_text())?;
            Ok(Outcome {
                exit: 0,
                summary: format!(
                    "feasible: E={} F={} r0={} D={} (normalized min {})",
                    fmt_f64(params.amp_e),
                    fmt_f64(params.amp_f),
                    fmt_f64(params.r0),
                    fmt_f64(params.d_const),
                    fmt_f64(report.min_value)
                ),
            })
        }
        Err(Error::SweepExhausted { violation, context }) => {
            write_file(out, "infeasible.txt", &format!("{violation}\n{context}\n"))?;
            Ok(Outcome { exit: 1, summary: format!("sweep exhausted: {context}") })
        }
        Err(e) => Err(e.to_string()),
    }
}

pub fn cmd_example1(cfg: &Example1Config, out: &Path) -> CliResult<Outcome> {
    let n = cfg.n;
    let mut ok = true;
    // Boundary limits and the product law.
    let mut limits = Table::new(&["k", "t_k", "product_law_residual"]);
    for k in 0..=(n - 2) {
        let spec = omega_boundary_limit(n, k).map_err(|e| e.to_string())?;
        let residual = OmegaPoint::product_law(&spec) - 1.0;
        ok &= residual.abs() < 1e-12;
        limits.row(vec![k.to_string(), fmt_f64(spec.ts[k]), fmt_f64(residual)]);
    }
    write_file(out, "boundary_limits.csv", &limits.to_text())?;

    // Volume law at sampled parameters plus the smoothing report (n = 3).
    let mut volumes = Table::new(&["u", "volume", "reference", "ratio_minus_one"]);
    let reference = suspension_volume(&SuspensionSpec::new(n, vec![0.5; n - 1]).unwrap())
        .map_err(|e| e.to_string())?;
    for i in 0..cfg.check_points {
        let u = 0.5 + 0.499 * i as f64 / cfg.check_points.max(1) as f64;
        let t_last = 2.0f64.powi(-(n as i32 - 1)) / u.powi(n as i32 - 2);
        let mut ts = vec![u; n - 2];
        ts.push(t_last);
        let spec = SuspensionSpec::new(n, ts).map_err(|e| e.to_string())?;
        let vol = suspension_volume(&spec).map_err(|e| e.to_string())?;
        ok &= ((vol - reference) / reference).abs() < 1e-9;
        volumes.row(vec![
            fmt_f64(u),
            fmt_f64(vol),
            fmt_f64(reference),
            fmt_f64(vol / reference - 1.0),
        ]);
    }
    write_file(out, "volume_law.csv", &volumes.to_text())?;

    // Family conditions of the recurrent family.
    let built = build_example1_family(n, 8, 1).map_err(|e| e.to_string())?;
    let c = built.conditions;
    let mut fam = Table::new(&["max_dg", "max_ddg", "max_grad_dg", "max_trace", "ricci_margin"]);
    fam.row(vec![
        fmt_f64(c.max_dg),
        fmt_f64(c.max_ddg),
        fmt_f64(c.max_grad_dg),
        fmt_f64(c.max_trace),
        fmt_f64(c.ricci_margin),
    ]);
    ok &= c.max_dg <= 1.0 && c.max_ddg <= 1.0 && c.max_grad_dg <= 1.0 && c.ricci_margin >= 0.0;
    if n == 3 {
        ok &= c.max_trace < 1e-8;
        let spec = SuspensionSpec::new(3, vec![0.8, 0.25 / 0.8]).unwrap();
        let (_, smooth) = smooth_suspension(&spec, cfg.sigma).map_err(|e| e.to_string())?;
        fam.meta("smoothed_sec_min", fmt_f64(smooth.sec_min));
        fam.meta("smoothing_volume_change", fmt_f64(smooth.volume_change));
        ok &= smooth.sec_min >= 1.0;
    }
    write_file(out, "family_conditions.csv", &fam.to_text())?;

    Ok(Outcome {
        exit: if ok { 0 } else { 1 },
        summary: format!("omega checks {}", if ok { "pass" } else { "fail" }),
    })
}

pub fn cmd_example2(cfg: &Example2Config, out: &Path) -> CliResult<Outcome> {
    let step1_grid: Vec<f64> = cfg.step1_t.clone();
    let ell_bar = ell_bar_search(cfg.b0, &step1_grid).map_err(|e| e.to_string())?;
    let lambda1 = gluing::bubble_lambda(1.0, cfg.b0).map_err(|e| e.to_string())?;
    let base = ExampleIIFamilySpec {
        stage: Stage::Step1,
        b0: cfg.b0,
        ell: ell_bar / 2.0,
        delta: lambda1 / 200.0,
        smoothing: cfg.smoothing,
    };
    let mut t = Table::new(&["t", "stage", "glue_margin", "ricci_min", "volume", "seam_radius"]);
    t.meta("b0", fmt_f64(cfg.b0));
    t.meta("ell_bar", fmt_f64(ell_bar));
    t.meta("lambda_1", fmt_f64(lambda1));
    let mut eta = f64::INFINITY;
    let mut ok = true;
    for (stage, grid) in [(Stage::Step1, &cfg.step1_t), (Stage::Step2, &cfg.step2_t)] {
        let spec = ExampleIIFamilySpec { stage, ..base.clone() };
        for &tv in grid {
            let rep = example2_family(&spec, tv).map_err(|e| e.to_string())?;
            eta = eta.min(rep.ricci_min).min(rep.volume);
            ok &= rep.glue_margin >= 0.0 && rep.ricci_min > 0.0 && rep.volume > 0.0;
            t.row(vec![
                fmt_f64(tv),
                format!("{stage:?}"),
                fmt_f64(rep.glue_margin),
                fmt_f64(rep.ricci_min),
                fmt_f64(rep.volume),
                fmt_f64(rep.seam_radius),
            ]);
        }
    }
    t.meta("eta", fmt_f64(eta));
    write_file(out, "example2.csv", &t.to_text())?;
    write_file(out, "plot.py", &plot_script(&[("example2.csv", "t", "ricci_min")]))?;
    ok &= eta > 0.0;
    Ok(Outcome {
        exit: if ok { 0 } else { 1 },
        summary: format!("uniform bound eta = {}", fmt_f64(eta)),
    })
}

pub fn cmd_cobordism(cfg: &CobordismConfig, out: &Path) -> CliResult<Outcome> {
    let (b0, b1, e0, report) = match (cfg.b0, cfg.b1, cfg.e0) {
        (Some(b0), Some(b1), Some(e0)) => {
            let (_, _, r) = cobordism_pieces(b0, b1, e0).map_err(|e| e.to_string())?;
            (b0, b1, e0, r)
        }
        (None, None, None) => cobordism_search().map_err(|e| e.to_string())?,
        _ => return Err("give all of b0, b1, e0 or none (search)".into()),
    };
    let mut t = Table::new(&[
        "s0",
        "cone_ricci_min",
        "cap_ricci_min",
        "cap_sff_min",
        "glue_margin",
        "glue_feasible",
        "isometry_deviation",
    ]);
    t.meta("b0", fmt_f64(b0));
    t.meta("b1", fmt_f64(b1));
    t.meta("e0", fmt_f64(e0));
    t.row(vec![
        fmt_f64(report.s0),
        fmt_f64(report.cone_ricci_min),
        fmt_f64(report.cap_ricci_min),
        fmt_f64(report.cap_sff_min),
        fmt_f64(report.glue.margin),
        report.glue.feasible.to_string(),
        fmt_f64(report.glue.isometry_deviation),
    ]);
    write_file(out, "cobordism.csv", &t.to_text())?;
    let ok = report.glue.feasible
        && report.cone_ricci_min >= -1e-8
        && report.cap_ricci_min > 0.0
        && report.cap_sff_min > 0.0;
    Ok(Outcome {
        exit: if ok { 0 } else { 1 },
        summary: format!(
            "s0 = {}, glue margin = {}, cone/cap Ricci minima = {} / {}",
            fmt_f64(report.s0),
            fmt_f64(report.glue.margin),
            fmt_f64(report.cone_ricci_min),
            fmt_f64(report.cap_ricci_min)
        ),
    })
}

pub fn cmd_gh(cfg: &GhCommandConfig, out: &Path) -> CliResult<Outcome> {
    let sample = SampleConfig { n: cfg.n_sample, graph_degree: cfg.graph_degree, seed: cfg.seed };
    if cfg.mode == "smoke" {
        // Identical spaces: both bounds vanish.
        let chart = conewarp::chart::round_sphere_chart(2, 0.5)
            .with_box(vec![(0.06, PI - 0.06), (0.02, 2.0 * PI - 0.02)]);
        let space = sample_space(&chart, &sample).map_err(|e| e.to_string())?;
        let up = gh_upper_bound(&space, &space, cfg.gh_iterations).map_err(|e| e.to_string())?;
        let lo = gh_lower_bound(&space, &space).map_err(|e| e.to_string())?;
        let mut t = Table::new(&["lower", "upper"]);
        t.row(vec![fmt_f64(lo.lower), fmt_f64(up.upper)]);
        write_file(out, "gh_smoke.csv", &t.to_text())?;
        let ok = lo.lower == 0.0 && up.upper == 0.0;
        return Ok(Outcome {
            exit: if ok { 0 } else { 1 },
            summary: format!("smoke bounds ({}, {})", fmt_f64(lo.lower), fmt_f64(up.upper)),
        });
    }
    if cfg.mode != "demo" {
        return Err(format!("unknown gh mode '{}'", cfg.mode));
    }
    let built = build_example1_family(3, cfg.m_max, 1).map_err(|e| e.to_string())?;
    let params = LemmaParams {
        n: 3,
        amp_e: 0.5,
        amp_f: 0.05,
        r0: 0.1,
        h_inf: 0.5,
        d_const: 4.0,
    };
    let cone = ConeMetric::new(params, built.family.clone()).map_err(|e| e.to_string())?;
    let (lo_u, hi_u) = built.omega.value_range();
    let targets = vec![("round".to_string(), lo_u), ("split".to_string(), hi_u)];
    let radius = (hi_u - lo_u) / (cfg.m_max as f64 * 5.0 / 6.0);
    let mut scales = Vec::new();
    for (k, &(_, u)) in targets.iter().enumerate() {
        let mut after = 0.0;
        for _ in 0..cfg.scales_per_target {
            let wp = built
                .path
                .visit_after(u, radius, after)
                .ok_or_else(|| format!("no visit of target {k} within {radius}"))?;
            after = wp.time;
            scales.push((k, LogRadius::from_l3(wp.time / params.amp_f)));
        }
    }
    let sample_box = vec![(0.03, PI / 2.0 - 0.03), (0.02, 2.0 * PI - 0.02)];
    let periods = vec![None, Some(2.0 * PI)];
    let gh_cfg = GhConfig { sample, gh_iterations: cfg.gh_iterations };
    let rows = tangent_cone_experiment(
        &built.family,
        &cone,
        &targets,
        &scales,
        &sample_box,
        &periods,
        &gh_cfg,
    )
    .map_err(|e| e.to_string())?;
    let mut t = Table::new(&[
        "target",
        "l3",
        "own_upper",
        "own_lower",
        "other_lower",
        "other_upper",
    ]);
    t.meta("own_upper_threshold", fmt_f64(cfg.own_upper_threshold));
    t.meta("cross_lower_threshold", fmt_f64(cfg.cross_lower_threshold));
    let mut ok = true;
    for row in &rows {
        let own = targets.iter().position(|(name, _)| *name == row.target).unwrap();
        let other = 1 - own;
        ok &= row.own_upper < cfg.own_upper_threshold
            && row.lowers[other] > cfg.cross_lower_threshold;
        t.row(vec![
            row.target.clone(),
            fmt_f64(row.l3),
            fmt_f64(row.own_upper),
            fmt_f64(row.lowers[own]),
            fmt_f64(row.lowers[other]),
            fmt_f64(row.uppers[other]),
        ]);
    }
    write_file(out, "gh_bounds.csv", &t.to_text())?;
    write_file(out, "plot.py", &plot_script(&[("gh_bounds.csv", "l3", "own_upper")]))?;
    Ok(Outcome {
        exit: if ok { 0 } else { 1 },
        summary: format!("{} scales, crossover {}", rows.len(), if ok { "holds" } else { "fails" }),
    })
}

pub fn cmd_oracle_crosscheck(cfg: &OracleCrosscheckConfig, out: &Path) -> CliResult<Outcome> {
    use conewarp::berger::{berger_ricci_coords, five_d_ricci_coords};
    use conewarp::chart::{berger_chart, double5d_chart};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut t = Table::new(&["draw", "max_componentwise_error"]);
    t.meta("ansatz", &cfg.ansatz);
    t.meta("tolerance", fmt_f64(cfg.tolerance));
    let mut worst: f64 = 0.0;
    for draw in 0..cfg.draws {
        let (analytic, fd) = match cfg.ansatz.as_str() {
            "football-unit" | "berger" => {
                let ansatz = if cfg.ansatz == "football-unit" {
                    football(1.0, 0.05).map_err(|e| e.to_string())?
                } else {
                    bubble(rng.random_range(0.0..1.0), rng.random_range(0.05..0.8))
                        .map_err(|e| e.to_string())?
                };
                let chart = berger_chart(&ansatz);
                let x: Vec<f64> = chart
                    .chart_box
                    .iter()
                    .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
                    .collect();
                (
                    berger_ricci_coords(&ansatz, &x).map_err(|e| e.to_string())?,
                    ricci_fd(&chart, &x, OracleConfig::default()).map_err(|e| e.to_string())?,
                )
            }
            "five-d" => {
                let ansatz = gluing::cone_piece(rng.random_range(0.05..0.5), 6.0);
                let chart = double5d_chart(&ansatz);
                let x: Vec<f64> = chart
                    .chart_box
                    .iter()
                    .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
                    .collect();
                (
                    five_d_ricci_coords(&ansatz, &x).map_err(|e| e.to_string())?,
                    ricci_fd(&chart, &x, OracleConfig::default()).map_err(|e| e.to_string())?,
                )
            }
            "flat-cone" => {
                let fam = Arc::new(round_family(2, 1.0));
                let chart = conewarp::cone::cone_chart(fam.clone(), (0.5, 1.5), |_| 1.0, |_| 0.0);
                let x: Vec<f64> = chart
                    .chart_box
                    .iter()
                    .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
                    .collect();
                (
                    ricci_cone_analytic(3, x[0], (1.0, 0.0, 0.0), (0.0, 0.0, 0.0), fam.as_ref(), &x[1..])
                        .map_err(|e| e.to_string())?,
                    ricci_fd(&chart, &x, OracleConfig::default()).map_err(|e| e.to_string())?,
                )
            }
            other => return Err(format!("unknown ansatz '{other}'")),
        };
        let scale = analytic.amax().max(fd.amax()).max(1.0);
        let mut err: f64 = 0.0;
        for (a, b) in analytic.iter().zip(fd.iter()) {
            let tol_scale = a.abs().max(b.abs()).max(1e-8 * scale / cfg.tolerance);
            err = err.max((a - b).abs() / tol_scale);
        }
        worst = worst.max(err);
        t.row(vec![draw.to_string(), fmt_f64(err)]);
    }
    t.meta("max_error", fmt_f64(worst));
    write_file(out, "oracle_crosscheck.csv", &t.to_text())?;
    Ok(Outcome {
        exit: if worst <= cfg.tolerance { 0 } else { 1 },
        summary: format!("max relative error {}", fmt_f64(worst)),
    })
}
