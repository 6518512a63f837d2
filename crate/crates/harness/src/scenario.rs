//! Run configuration: flat `key = value` text and the defaults behind every flag.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unidisc::{parse_expr, Complex64, Expr64, SolverConfig};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SuiteId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [SuiteId::S1, SuiteId::S2, SuiteId::S3, SuiteId::S4, SuiteId::S5, SuiteId::S6, SuiteId::S7];

    pub fn title(self) -> &'static str {
        match self {
            SuiteId::S1 => "zero separation",
            SuiteId::S2 => "factorization f = gW",
            SuiteId::S3 => "zero-free solutions",
            SuiteId::S4 => "normality equivalences",
            SuiteId::S5 => "stopping time and weak L^p",
            SuiteId::S6 => "rational map R(z) = z + 1/(2z^2)",
            SuiteId::S7 => "area integral chain",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for SuiteId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .iter()
            .copied()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HarnessError::Usage(format!("unknown suite {s:?} (expected S1..S7)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(HarnessError::Usage(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub coefficient: String,
    /// Initial data of the solution under study; `None` lets each suite pick.
    pub f0: Option<Complex64>,
    pub df0: Option<Complex64>,
    /// Working radius for zero sets and sup grids.
    pub r_max: f64,
    /// Outer radius of the continuation solver and of area quadratures.
    pub solver_rmax: f64,
    pub radii: Vec<f64>,
    pub tol: f64,
    pub max_generation: u32,
    pub c0: f64,
    pub eps0: f64,
    pub alpha: f64,
    /// Disc radius factor for zero neighbourhoods `D(z_n, c(1-|z_n|))`.
    pub disc_c: f64,
    pub net_depth: u32,
    pub seed: u64,
    pub suites: Vec<SuiteId>,
    /// Output directory; `None` writes to stdout.
    pub out: Option<PathBuf>,
    /// `None` leaves the choice to the command.
    pub format: Option<Format>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            coefficient: "0".into(),
            f0: None,
            df0: None,
            r_max: 0.95,
            solver_rmax: 0.999,
            radii: vec![0.5, 0.9, 0.95],
            tol: 1e-8,
            max_generation: unidisc::stopping::DEFAULT_STOP_GENERATION,
            c0: unidisc::stopping::DEFAULT_C0,
            eps0: unidisc::stopping::DEFAULT_EPS0,
            alpha: 2.0,
            disc_c: 0.3,
            net_depth: 10,
            seed: 1,
            suites: SuiteId::ALL.to_vec(),
            out: None,
            format: None,
        }
    }
}

/// A number written in the coefficient language, e.g. `1/8` or `0.5-0.2*i`.
pub fn parse_number(s: &str) -> Result<Complex64> {
    let e: Expr64 = parse_expr(s)?;
    if e.root.contains_var() {
        return Err(HarnessError::Usage(format!("{s:?} is not a constant")));
    }
    Ok(e.eval(Complex64::new(0.0, 0.0))?)
}

pub fn parse_real(s: &str) -> Result<f64> {
    let z = parse_number(s)?;
    if z.im != 0.0 {
        return Err(HarnessError::Usage(format!("{s:?} is not real")));
    }
    Ok(z.re)
}

impl Scenario {
    /// Reads `key = value` lines; `#` starts a comment. Keys match the CLI flags.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Scenario::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Scenario { line: i + 1, msg: format!("expected key = value, got {line:?}") })?;
            s.set(k.trim(), v.trim()).map_err(|e| HarnessError::Scenario { line: i + 1, msg: e.to_string() })?;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let count = |v: &str| -> Result<u64> {
            v.parse::<u64>().map_err(|_| HarnessError::Usage(format!("{key}: {v:?} is not a count")))
        };
        match key.replace('-', "_").as_str() {
            "coefficient" => {
                parse_expr::<f64>(value)?;
                self.coefficient = value.trim_matches('"').to_string();
            }
            "f0" => self.f0 = Some(parse_number(value)?),
            "df0" => self.df0 = Some(parse_number(value)?),
            "rmax" | "r_max" => {
                self.r_max = parse_real(value)?;
                self.solver_rmax = self.solver_rmax.max(self.r_max);
            }
            "solver_rmax" => self.solver_rmax = parse_real(value)?,
            "radii" => self.radii = value.split(',').map(parse_real).collect::<Result<_>>()?,
            "tol" => self.tol = parse_real(value)?,
            "max_generation" => self.max_generation = count(value)? as u32,
            "c0" => self.c0 = parse_real(value)?,
            "eps0" => self.eps0 = parse_real(value)?,
            "alpha" => self.alpha = parse_real(value)?,
            "disc_c" => self.disc_c = parse_real(value)?,
            "net_depth" => self.net_depth = count(value)? as u32,
            "seed" => self.seed = count(value)?,
            "suites" => self.suites = value.split(',').map(str::parse).collect::<Result<_>>()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            other => return Err(HarnessError::Usage(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Usage(m));
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return bad(format!("rmax {} outside (0, 1)", self.r_max));
        }
        if !(self.solver_rmax >= self.r_max && self.solver_rmax < 1.0) {
            return bad(format!("solver radius {} must lie in [rmax, 1)", self.solver_rmax));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return bad(format!("radius {r} outside (0, 1)"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol {} must be positive", self.tol));
        }
        if self.alpha.is_nan() || self.alpha <= 1.0 {
            return bad(format!("aperture {} must exceed 1", self.alpha));
        }
        if !(self.disc_c > 0.0 && self.disc_c < 1.0) {
            return bad(format!("disc factor {} outside (0, 1)", self.disc_c));
        }
        if self.suites.is_empty() {
            return bad("no suites selected".into());
        }
        Ok(())
    }

    pub fn coefficient_expr(&self) -> Result<Expr64> {
        Ok(parse_expr(&self.coefficient)?)
    }

    pub fn solver(&self) -> SolverConfig<f64> {
        SolverConfig::default().with_r_max(self.solver_rmax)
    }

    /// `(f(0), f'(0))` if both were given.
    pub fn initial(&self) -> Option<(Complex64, Complex64)> {
        Some((self.f0?, self.df0?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let s = Scenario::parse("coefficient = 1/(1-z)\n# comment\neps0 = 1/16 # inline\nsuites = s1, S5\nradii = 0.3,0.6\nf0 = 1+i\ndf0=0\n").unwrap();
        assert_eq!(s.coefficient, "1/(1-z)");
        assert_eq!(s.eps0, 0.0625);
        assert_eq!(s.suites, vec![SuiteId::S1, SuiteId::S5]);
        assert_eq!(s.radii, vec![0.3, 0.6]);
        assert_eq!(s.initial(), Some((Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0))));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Scenario::parse("rmax = 1.2"), Err(HarnessError::Usage(_))));
        assert!(matches!(Scenario::parse("radii = 0.5, 1"), Err(HarnessError::Usage(_))));
        assert!(matches!(Scenario::parse("suites = S9"), Err(HarnessError::Scenario { line: 1, .. })));
        assert!(matches!(Scenario::parse("colour = red"), Err(HarnessError::Scenario { .. })));
        assert!(matches!(Scenario::parse("no equals sign"), Err(HarnessError::Scenario { .. })));
        assert!(Scenario::parse("coefficient = z +").is_err());
        assert!(parse_real("z").is_err());
        assert!(parse_real("i").is_err());
    }
}
