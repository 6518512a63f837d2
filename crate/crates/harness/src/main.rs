use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use serde_json::{json, Value};
use unidisc::functionals::{fp_norm, growth_norm, weighted_area_trend, FunctionalReport, Net, SupGrid};
use unidisc::quadrature::PolarQuadrature;
use unidisc::schwarzian::QuotientMap;
use unidisc::stopping::{generation_floor, nontangential_max_inv, quotient_modulus, weak_lp_fit, StoppingForest};
use unidisc::zeros::find_zeros;
use unidisc::SolutionBasis;
use unidisc_harness::report::lint;
use unidisc_harness::scenario::parse_number;
use unidisc_harness::{run_suite, Format, HarnessError, Result, Scenario, SuiteId, SuiteReport};

#[derive(Parser)]
#[command(name = "unidisc", version, about = "Linear ODEs f'' + Af = 0 in the unit disc")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Flags {
    /// key = value scenario file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coefficient A(z), e.g. "-4*z/(1-z)^4".
    #[arg(long, global = true, allow_hyphen_values = true)]
    coefficient: Option<String>,
    /// Radius of the region under study, below 1 [default: 0.95].
    #[arg(long, global = true)]
    rmax: Option<String>,
    /// Tolerance for residual-type checks [default: 1e-8].
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Deepest dyadic generation for stopping squares [default: 20].
    #[arg(long, global = true)]
    max_generation: Option<String>,
    /// Stopping constant C0 > 1 [default: 2].
    #[arg(long, global = true)]
    c0: Option<String>,
    /// Stopping ratio ε0 [default: 0.125].
    #[arg(long, global = true)]
    eps0: Option<String>,
    /// Stolz aperture.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// f(0) of the solution under study.
    #[arg(long, global = true, allow_hyphen_values = true)]
    f0: Option<String>,
    /// f'(0) of the solution under study.
    #[arg(long, global = true, allow_hyphen_values = true)]
    df0: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the normalized basis f1, f2 and their derivatives.
    Solve {
        /// Evaluation points, comma separated (default: the radii on the real axis).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Zeros of the solution in |z| < rmax.
    Zeros,
    /// H^∞_2, F¹ and weighted area norms of the coefficient.
    Norms,
    /// Quotient w = f1/f2: poles, pre-Schwarzian and Schwarzian.
    Quotient,
    /// Stopping-time forest for |w'| and the weak-L^p fit of (1/w')*.
    Stoptime,
    /// Run one verification suite.
    Verify { suite: String },
    /// Run the suites selected by the scenario.
    Report,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("unidisc: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &HarnessError) -> u8 {
    match e {
        HarnessError::Usage(_) | HarnessError::Scenario { .. } => 2,
        HarnessError::Core(
            unidisc::Error::Syntax { .. }
            | unidisc::Error::UnknownIdentifier { .. }
            | unidisc::Error::ZeroDenominator { .. }
            | unidisc::Error::InvalidArgument(_),
        ) => 2,
        _ => 1,
    }
}

fn scenario(f: &Flags) -> Result<Scenario> {
    let mut sc = match &f.config {
        Some(p) => Scenario::parse(&fs::read_to_string(p)?)?,
        None => Scenario::default(),
    };
    let pairs = [
        ("coefficient", &f.coefficient),
        ("rmax", &f.rmax),
        ("tol", &f.tol),
        ("max_generation", &f.max_generation),
        ("c0", &f.c0),
        ("eps0", &f.eps0),
        ("alpha", &f.alpha),
        ("f0", &f.f0),
        ("df0", &f.df0),
        ("format", &f.format),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            sc.set(k, v)?;
        }
    }
    if let Some(o) = &f.out {
        sc.out = Some(o.clone());
    }
    if sc.f0.is_some() != sc.df0.is_some() {
        return Err(HarnessError::Usage("--f0 and --df0 must be given together".into()));
    }
    sc.validate()?;
    Ok(sc)
}

fn run(cli: Cli) -> Result<bool> {
    let sc = scenario(&cli.flags)?;
    match cli.command {
        Command::Solve { at } => solve(&sc, &at),
        Command::Zeros => zeros(&sc),
        Command::Norms => norms(&sc),
        Command::Quotient => quotient(&sc),
        Command::Stoptime => stoptime(&sc),
        Command::Verify { suite } => {
            let id: SuiteId = suite.parse()?;
            reports(&sc, &[id])
        }
        Command::Report => reports(&sc, &sc.suites),
    }
}

/// Writes `name` into the output directory, or to stdout without one.
fn emit(sc: &Scenario, name: &str, body: &str) -> Result<()> {
    match &sc.out {
        Some(dir) => write_file(dir, name, body),
        None => {
            print!("{body}");
            if !body.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), body)?;
    Ok(())
}

fn pair(z: C) -> Value {
    json!([z.re, z.im])
}

fn csv_table(header: &str, rows: &[Vec<f64>]) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.15e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn solve(sc: &Scenario, at: &[String]) -> Result<bool> {
    let a = sc.coefficient_expr()?;
    let basis = SolutionBasis::standard(a.clone(), sc.solver())?;
    let points: Vec<C> = if at.is_empty() {
        sc.radii.iter().map(|&r| C::new(r, 0.0)).collect()
    } else {
        at.iter().map(|s| parse_number(s)).collect::<Result<_>>()?
    };
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &z in &points {
        let [u, v] = basis.jets(z, 2)?;
        let az = a.eval(z)?;
        let residual = (u[2] + az * u[0]).norm().max((v[2] + az * v[0]).norm());
        let w = basis.wronskian(z)?;
        let mut row = json!({
            "z": pair(z), "f1": pair(u[0]), "df1": pair(u[1]), "f2": pair(v[0]), "df2": pair(v[1]),
            "wronskian": pair(w), "residual": residual,
        });
        let mut cells = vec![z.re, z.im, u[0].re, u[0].im, u[1].re, u[1].im, v[0].re, v[0].im, v[1].re, v[1].im, w.re, w.im, residual];
        if let Some((f0, df0)) = sc.initial() {
            let f = basis.combination(f0, df0, z, 1)?;
            row["f"] = pair(f[0]);
            row["df"] = pair(f[1]);
            cells.extend([f[0].re, f[0].im, f[1].re, f[1].im]);
        }
        rows.push(row);
        table.push(cells);
    }
    match sc.format.unwrap_or(Format::Json) {
        Format::Json => emit(sc, "solve.json", &serde_json::to_string_pretty(&json!({ "coefficient": sc.coefficient, "points": rows }))?)?,
        Format::Csv => {
            let mut header = String::from("re,im,f1_re,f1_im,df1_re,df1_im,f2_re,f2_im,df2_re,df2_im,w_re,w_im,residual");
            if sc.initial().is_some() {
                header.push_str(",f_re,f_im,df_re,df_im");
            }
            emit(sc, "solve.csv", &csv_table(&header, &table))?
        }
    }
    Ok(true)
}

fn zeros(sc: &Scenario) -> Result<bool> {
    let basis = SolutionBasis::standard(sc.coefficient_expr()?, sc.solver())?;
    let (f0, df0) = sc.initial().unwrap_or((C::new(0.0, 0.0), C::new(1.0, 0.0)));
    let zs = find_zeros(
        |z| {
            let v = basis.combination(f0, df0, z, 1)?;
            Ok((v[0], v[1]))
        },
        sc.r_max,
    )?;
    match sc.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(sc, "zeros.csv", &zs.to_csv())?,
        Format::Json => {
            let pts: Vec<Value> = zs.points.iter().zip(&zs.multiplicities).map(|(z, m)| json!({ "z": pair(*z), "multiplicity": m })).collect();
            let body = json!({ "coefficient": sc.coefficient, "radius": zs.capture_radius, "count": zs.count(), "zeros": pts });
            emit(sc, "zeros.json", &serde_json::to_string_pretty(&body)?)?
        }
    }
    Ok(true)
}

fn norms(sc: &Scenario) -> Result<bool> {
    let a = sc.coefficient_expr()?;
    let eval = |z| a.eval(z);
    let grid = SupGrid::boundary(10, sc.solver_rmax);
    let mut out = vec![FunctionalReport::from_sup("h_inf_2", &growth_norm(eval, 2.0, &grid)?).param("alpha", 2.0)];
    let f1 = fp_norm(eval, 1.0, &Net::dyadic(sc.net_depth), &PolarQuadrature::new(sc.solver_rmax))?;
    out.push(FunctionalReport::from_net("f1_norm", &f1).param("p", 1.0));
    out.push(weighted_area_trend(eval, 2.0, 3.0)?);
    match sc.format.unwrap_or(Format::Json) {
        Format::Json => emit(sc, "norms.json", &serde_json::to_string_pretty(&out)?)?,
        Format::Csv => {
            let mut s = String::from("name,value\n");
            for r in &out {
                s.push_str(&format!("{},{:.15e}\n", r.name, r.value));
            }
            emit(sc, "norms.csv", &s)?
        }
    }
    Ok(true)
}

fn quotient(sc: &Scenario) -> Result<bool> {
    let a = sc.coefficient_expr()?;
    let q = QuotientMap::new(SolutionBasis::for_quotient(a.clone(), sc.solver())?)?.with_poles(sc.r_max)?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &r in sc.radii.iter().filter(|&&r| r <= sc.r_max) {
        for k in 0..8 {
            let z = C::from_polar(r, std::f64::consts::TAU * k as f64 / 8.0);
            if q.excluded(z) {
                continue;
            }
            let j = q.jet(z)?;
            let pre = q.pre_schwarzian(z)?;
            let s = q.schwarzian(z)?;
            let two_a = a.eval(z)? * 2.0;
            rows.push(json!({
                "z": pair(z), "w": pair(j[0]), "w_prime": pair(j[1]),
                "pre_schwarzian": pair(pre), "schwarzian": pair(s), "two_a": pair(two_a),
            }));
            table.push(vec![z.re, z.im, j[0].re, j[0].im, j[1].re, j[1].im, pre.re, pre.im, s.re, s.im, two_a.re, two_a.im]);
        }
    }
    let poles: Vec<Value> = q.poles.iter().map(|(p, e)| json!({ "pole": pair(*p), "exclusion": e })).collect();
    match sc.format.unwrap_or(Format::Json) {
        Format::Json => {
            let body = json!({ "coefficient": sc.coefficient, "poles": poles, "points": rows });
            emit(sc, "quotient.json", &serde_json::to_string_pretty(&body)?)?
        }
        Format::Csv => emit(
            sc,
            "quotient.csv",
            &csv_table("re,im,w_re,w_im,dw_re,dw_im,pre_re,pre_im,s_re,s_im,two_a_re,two_a_im", &table),
        )?,
    }
    Ok(true)
}

fn stoptime(sc: &Scenario) -> Result<bool> {
    let q = QuotientMap::new(SolutionBasis::for_quotient(sc.coefficient_expr()?, sc.solver())?)?;
    let w = quotient_modulus(&q);
    let floor = sc.max_generation.min(generation_floor(sc.solver_rmax));
    let forest = StoppingForest::build(&w, sc.c0, sc.eps0, floor, 5)?;
    let ok = forest.check_invariants().is_ok();
    let samples = nontangential_max_inv(&w, sc.alpha, 1024, sc.solver_rmax)?;
    let mut dist = String::from("lambda,measure\n");
    let fit = weak_lp_fit(&samples.values).ok();
    if let Some(fit) = &fit {
        for (l, m) in &fit.distribution {
            dist.push_str(&format!("{l:.15e},{m:.15e}\n"));
        }
    }
    let summary = json!({
        "coefficient": sc.coefficient,
        "l": forest.l, "m": forest.m,
        "effective_generation": floor,
        "generations": forest.generations.len(),
        "length_sums": forest.length_sums(),
        "invariants": ok,
        "weak_lp_p": fit.as_ref().map(|f| f.p),
        "weak_lp_constant": fit.as_ref().map(|f| f.constant),
    });
    match &sc.out {
        Some(dir) => {
            write_file(dir, "forest.jsonl", &forest.json_lines())?;
            write_file(dir, "distribution.csv", &dist)?;
            write_file(dir, "stoptime.json", &serde_json::to_string_pretty(&summary)?)?;
        }
        None => println!("{}", serde_json::to_string_pretty(&summary)?),
    }
    Ok(ok)
}

fn reports(sc: &Scenario, ids: &[SuiteId]) -> Result<bool> {
    let mut all: Vec<SuiteReport> = Vec::new();
    for &id in ids {
        all.push(run_suite(id, sc)?);
    }
    if let Err(bad) = lint(&all) {
        return Err(HarnessError::Usage(format!("checks without anchors: {}", bad.join(", "))));
    }
    let format = sc.format.unwrap_or(Format::Json);
    for r in &all {
        match format {
            Format::Json => emit(sc, &format!("{}.json", r.suite), &r.to_json()?)?,
            Format::Csv => emit(sc, &format!("{}.csv", r.suite), &r.to_csv())?,
        }
        for c in r.failures() {
            eprintln!("{}: {} failed", r.suite, c.name);
        }
    }
    Ok(all.iter().all(SuiteReport::passed))
}
