//! One function per subcommand. Each returns the input description, the
//! JSON result and a CSV table; rendering happens in `report`.

use serde::Serialize;
use serde_json::{json, Value};
use specball_core::cmatrix::{jordan_profile, spectral_radius, ComplexMatrix, JordanOptions};
use specball_core::domains::{
    max_root_modulus, polydisk_membership, shilov_sample_with_angles, sigma, spectral_ball_membership,
};
use specball_core::green_lab::{
    exponent_fit, make_gap_x, make_remark_x, make_roots_of_unity_x, theorem2_report, GreenError, ReportConfig,
};
use specball_core::metrics::{
    admissible, asymptotics_report, best_mnt_on_grid, bounds_table, boundary_point_from_t, gamma_lower,
    gamma_upper, lalo_check, lalo_interval, minimax_mn, mnt_value, t_star_report, MinimaxProblem, SolverConfig,
};
use specball_core::splitting::{block_diagonalize, choose_delta, local_factor};
use specball_core::Complex64;

use crate::config::RunConfig;
use crate::input::{self, Source};
use crate::report::{num, Outcome, Table};
use crate::{Failure, Kind, ResultExt};

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::new(Kind::Io, e.into()))
}

fn load_matrix(arg: &str) -> Result<(ComplexMatrix, Source), Failure> {
    input::matrix(arg).kind(Kind::Input)
}

fn jordan_options(config: &RunConfig) -> JordanOptions {
    JordanOptions {
        cluster_radius: config.tolerances.root,
        rank_tol: config.tolerances.rank,
    }
}

fn cplx(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn analyze_matrix(matrix: &str, config: &RunConfig) -> Result<Outcome, Failure> {
    let (m, source) = load_matrix(matrix)?;
    let profile = jordan_profile(&m, &jordan_options(config)).context_kind(Kind::Module, "Jordan profile")?;
    let rho = spectral_radius(&m).context_kind(Kind::Module, "spectral radius")?;
    let membership =
        spectral_ball_membership(&m, config.tolerances.boundary).context_kind(Kind::Module, "membership")?;
    let mut table = Table::new("lambda_re,lambda_im,alg_mult,nilpotence,block_sizes");
    for e in &profile.eigenvalues {
        let blocks: Vec<String> = e.block_sizes.iter().map(|b| b.to_string()).collect();
        let [re, im] = cplx(e.lambda);
        table.push(&[re, im, e.alg_mult.to_string(), e.nilpotence.to_string(), blocks.join(";")]);
    }
    Ok(Outcome {
        input: json!({ "matrix": source }),
        result: json!({
            "matrix": to_value(&m)?,
            "sigma": to_value(&sigma(&m))?,
            "spectral_radius": rho,
            "membership": membership,
            "cyclic": profile.cyclic,
            "profile": to_value(&profile)?,
        }),
        table,
    })
}

pub fn membership(point: Option<&str>, matrix: Option<&str>, config: &RunConfig) -> Result<Outcome, Failure> {
    let tol = config.tolerances.boundary;
    let mut table = Table::new("domain,n,max_modulus,membership");
    let (input, result) = match (point, matrix) {
        (Some(arg), None) => {
            let (p, source) = input::point(arg).kind(Kind::Input)?;
            let rho = max_root_modulus(&p).context_kind(Kind::Module, "roots of the point polynomial")?;
            let state = polydisk_membership(&p, tol).context_kind(Kind::Module, "membership")?;
            let result = json!({
                "domain": "G_n",
                "n": p.n,
                "point": to_value(&p)?,
                "max_root_modulus": rho,
                "membership": state,
            });
            table.push(&["G_n".into(), p.n.to_string(), num(rho), to_value(&state)?.as_str().unwrap_or("").into()]);
            (json!({ "point": source }), result)
        }
        (None, Some(arg)) => {
            let (m, source) = load_matrix(arg)?;
            let rho = spectral_radius(&m).context_kind(Kind::Module, "spectral radius")?;
            let state = spectral_ball_membership(&m, tol).context_kind(Kind::Module, "membership")?;
            let s = sigma(&m);
            let image = polydisk_membership(&s, tol).context_kind(Kind::Module, "membership of sigma")?;
            let result = json!({
                "domain": "Omega_n",
                "n": m.n(),
                "spectral_radius": rho,
                "membership": state,
                "sigma": to_value(&s)?,
                "sigma_membership": image,
            });
            table.push(&["Omega_n".into(), m.n().to_string(), num(rho), to_value(&state)?.as_str().unwrap_or("").into()]);
            (json!({ "matrix": source }), result)
        }
        _ => return Err(Failure::msg(Kind::Usage, "give exactly one of --point and --matrix")),
    };
    Ok(Outcome { input, result, table })
}

pub fn split(matrix: &str, center: &str, delta: Option<f64>, config: &RunConfig) -> Result<Outcome, Failure> {
    let (m, source) = load_matrix(matrix)?;
    let c = input::complex(center).kind(Kind::Input)?;
    let (delta, chosen) = match delta {
        Some(d) if d.is_finite() && d > 0.0 => (d, false),
        Some(d) => return Err(Failure::msg(Kind::Input, format!("--delta must be positive, got {d}"))),
        None => (
            choose_delta(&m, c, config.tolerances.root).context_kind(Kind::Module, "contour radius")?,
            true,
        ),
    };
    let factor = local_factor(&m, c, delta).context_kind(Kind::Module, "local factorization")?;
    let blocks = block_diagonalize(&m, c, delta).context_kind(Kind::Module, "block diagonalization")?;
    let mut table = Table::new("j,sigma0_re,sigma0_im");
    for (j, s) in factor.sigma0.values().iter().enumerate() {
        let [re, im] = cplx(*s);
        table.push(&[(j + 1).to_string(), re, im]);
    }
    Ok(Outcome {
        input: json!({ "matrix": source, "center": center, "delta": if chosen { Value::Null } else { json!(delta) } }),
        result: json!({
            "delta": delta,
            "delta_chosen": chosen,
            "factor": to_value(&factor)?,
            "blocks": to_value(&blocks)?,
        }),
        table,
    })
}

/// The direction `X` of an exponent fit and a description of how it was made.
fn direction(spec: &str, v: &ComplexMatrix, seed: u64) -> Result<(ComplexMatrix, String, Value), Failure> {
    let n = v.n();
    match spec {
        "remark" => {
            let x = make_remark_x(v).context_kind(Kind::Module, "remark direction")?;
            Ok((x, "E_{m,1} on the leading Jordan block of size m".into(), Value::Null))
        }
        "unity" => Ok((make_roots_of_unity_x(n), "companion matrix of t^n - 1".into(), Value::Null)),
        _ => {
            if let Some(m) = spec.strip_prefix("gap:") {
                let m: usize = m
                    .trim()
                    .parse()
                    .map_err(|_| Failure::msg(Kind::Input, format!("cannot parse gap index in {spec:?}")))?;
                let gap = make_gap_x(n, m, seed).context_kind(Kind::Module, "gap direction")?;
                let desc = format!(
                    "companion matrix with sigma_1..sigma_{m} = 0 and seeded sigma_{}..sigma_{n} of modulus in [1/4, 1]",
                    m + 1
                );
                let info = to_value(&gap)?;
                return Ok((gap.matrix, desc, info));
            }
            let (x, source) = load_matrix(spec)?;
            if x.n() != n {
                return Err(Failure::msg(
                    Kind::Input,
                    format!("direction has size {} but the matrix has size {n}", x.n()),
                ));
            }
            Ok((x, "user supplied".into(), to_value(&source)?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// ln ρ(V + ζX)
    LogRho,
    /// ln ‖σ(V + ζX) − σ(V)‖
    LogSigma,
}

pub fn exponent_fit_cmd(
    matrix: &str,
    x_spec: &str,
    quantity: Quantity,
    expect: Option<f64>,
    config: &RunConfig,
) -> Result<Outcome, Failure> {
    let (v, source) = load_matrix(matrix)?;
    let (x, construction, detail) = direction(x_spec, &v, config.seed)?;
    let base = sigma(&v);
    let h = |zeta: Complex64| -> Result<f64, GreenError> {
        let w = &v + &x.scale(zeta);
        Ok(match quantity {
            Quantity::LogRho => spectral_radius(&w)?.ln(),
            Quantity::LogSigma => sigma(&w).distance(&base).ln(),
        })
    };
    let fit = exponent_fit(h, &config.grids.radii, config.grids.angles, config.seed)
        .context_kind(Kind::Module, "exponent fit")?;
    let within = expect.map(|e| (fit.slope - e).abs() <= config.tolerances.fit);
    let mut table = Table::new("radius,log_radius,value,fitted");
    for row in fit.rows() {
        table.push(&row.map(num));
    }
    Ok(Outcome {
        input: json!({ "matrix": source, "x": x_spec, "quantity": quantity, "expected_slope": expect }),
        result: json!({
            "construction": construction,
            "construction_detail": detail,
            "x": to_value(&x)?,
            "fit": to_value(&fit)?,
            "within_tolerance": within,
        }),
        table,
    })
}

pub fn theorem2(matrix: &str, config: &RunConfig) -> Result<Outcome, Failure> {
    let (v, source) = load_matrix(matrix)?;
    let rc = ReportConfig {
        radii: config.grids.radii.clone(),
        angles: config.grids.angles,
        seed: config.seed,
        ball_samples: config.grids.samples,
        cluster_radius: config.tolerances.root,
        rank_tol: config.tolerances.rank,
    };
    let report = theorem2_report(&v, &rc).context_kind(Kind::Module, "exponent-gap report")?;
    let checks: Vec<Value> = report
        .series
        .iter()
        .map(|s| {
            json!({
                "series": s.name,
                "expected_slope": s.expected_slope,
                "slope": s.fit.slope,
                "within_tolerance": (s.fit.slope - s.expected_slope).abs() <= config.tolerances.fit,
            })
        })
        .collect();
    Ok(Outcome {
        input: json!({ "matrix": source }),
        result: json!({ "report": to_value(&report)?, "checks": checks }),
        table: Table::from_csv(&report.samples_csv()),
    })
}

pub fn metrics_table(n_min: usize, n_max: usize) -> Result<Outcome, Failure> {
    let rows = bounds_table(n_min, n_max).context_kind(Kind::Module, "bounds table")?;
    let mut table = Table::new("n,lower,upper,strict_gap");
    for r in &rows {
        table.push(&[r.n.to_string(), num(r.lower), num(r.upper), r.strict_gap.to_string()]);
    }
    Ok(Outcome {
        input: json!({ "nmin": n_min, "nmax": n_max }),
        result: json!({ "rows": to_value(&rows)? }),
        table,
    })
}

pub struct MinimaxArgs {
    pub n: usize,
    pub restricted: bool,
    pub iterations: usize,
    pub restarts: usize,
    pub step: f64,
}

pub fn minimax(args: &MinimaxArgs, config: &RunConfig) -> Result<Outcome, Failure> {
    let n = args.n;
    let problem = MinimaxProblem::with_boundary_families(n, config.grids.samples, config.seed, args.restricted)
        .context_kind(Kind::Module, "minimax problem")?;
    let solver = SolverConfig {
        iterations: args.iterations,
        restarts: args.restarts,
        step: args.step,
        seed: config.seed,
        ..SolverConfig::default()
    };
    let result = minimax_mn(&problem, &solver).context_kind(Kind::Module, "minimax solver")?;
    let (grid_best, grid_t) = best_mnt_on_grid(n).context_kind(Kind::Module, "mnt grid")?;
    let mut table = Table::new("iteration,best");
    for (k, v) in result.trace.iter().enumerate() {
        table.push(&[k.to_string(), num(*v)]);
    }
    Ok(Outcome {
        input: json!({ "n": n, "restricted": args.restricted }),
        result: json!({
            "index_set": problem.index_set,
            "samples": "seeded Silov boundary points plus the boundary families p_{n,t} and the corner point",
            "solver": to_value(&solver)?,
            "minimax": to_value(&result)?,
            "best_mnt_on_grid": { "value": grid_best, "t": grid_t },
            "gamma_lower": gamma_lower(n).ok(),
            "gamma_upper": gamma_upper(n).ok(),
        }),
        table,
    })
}

const LALO_GRID: usize = 100;

pub fn lalo(n: usize, t: Option<f64>, config: &RunConfig) -> Result<Outcome, Failure> {
    let tol = config.tolerances.boundary;
    let star = t_star_report(n).context_kind(Kind::Module, "optimal t")?;
    let ts = match t {
        Some(t) => vec![t],
        None => lalo_interval(n).context_kind(Kind::Module, "interval")?.grid(LALO_GRID),
    };
    let mut table = Table::new("t,condition,admissible,on_circle,deviation,mnt");
    let mut checks = Vec::with_capacity(ts.len());
    for &t in &ts {
        let c = lalo_check(n, t, tol).context_kind(Kind::Module, "unit-circle check")?;
        let ok = admissible(n, t);
        let mnt = mnt_value(n, t);
        table.push(&[
            num(t),
            c.condition.to_string(),
            ok.to_string(),
            c.on_circle.to_string(),
            num(c.deviation),
            num(mnt),
        ]);
        let point = boundary_point_from_t(n, t).ok();
        checks.push(json!({
            "check": to_value(&c)?,
            "admissible": ok,
            "mnt": mnt,
            "boundary_point": point.as_ref().map(to_value).transpose()?,
        }));
    }
    Ok(Outcome {
        input: json!({ "n": n, "t": t }),
        result: json!({ "t_star": to_value(&star)?, "points": checks }),
        table,
    })
}

pub fn asymptotics(n_max: usize) -> Result<Outcome, Failure> {
    let report = asymptotics_report(n_max).context_kind(Kind::Module, "asymptotics")?;
    let mut table = Table::new("n,upper_scaled,lower_scaled");
    for r in &report.rows {
        table.push(&[r.n.to_string(), num(r.upper_scaled), num(r.lower_scaled)]);
    }
    Ok(Outcome {
        input: json!({ "nmax": n_max }),
        result: to_value(&report)?,
        table,
    })
}

pub fn shilov_sample(n: usize, count: usize, config: &RunConfig) -> Result<Outcome, Failure> {
    if n == 0 {
        return Err(Failure::msg(Kind::Input, "--n must be at least 1"));
    }
    let samples = shilov_sample_with_angles(n, count, config.seed);
    let header: Vec<String> = (1..=n)
        .map(|i| format!("angle_{i}"))
        .chain((1..=n).map(|i| format!("z_{i}")))
        .collect();
    let mut table = Table::new(header.join(","));
    for s in &samples {
        let cells: Vec<String> =
            s.angles.iter().map(|a| num(*a)).chain(s.point.z.iter().map(|z| z.to_string())).collect();
        table.push(&cells);
    }
    Ok(Outcome {
        input: json!({ "n": n, "count": count }),
        result: json!({ "samples": to_value(&samples)? }),
        table,
    })
}

