//! Experiment driver: run the solvers on generated matrices and measure the
//! componentwise error of each against the double-word reference.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::baseline::cr_sqrt_standard;
use crate::error::{Error, Result};
use crate::numeric::DenseMatrix;
use crate::sqrt::{cr_sqrt, in_sqrt, shifted_cr_sqrt, SqrtOptions, SqrtResult};
use crate::testgen::{Family, TestSpec};
use crate::triplet::TripletRep;
use crate::xp::{comp_error, xp_sqrtm_reference_triplet, XpMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Alg {
    Cr,
    CrShifted,
    In,
    CrStd,
}

impl Alg {
    pub const ALL: [Alg; 4] = [Alg::Cr, Alg::In, Alg::CrShifted, Alg::CrStd];

    pub fn as_str(&self) -> &'static str {
        match self {
            Alg::Cr => "cr",
            Alg::CrShifted => "cr-shifted",
            Alg::In => "in",
            Alg::CrStd => "cr-std",
        }
    }
}

impl fmt::Display for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cr" => Ok(Alg::Cr),
            "cr-shifted" => Ok(Alg::CrShifted),
            "in" => Ok(Alg::In),
            "cr-std" => Ok(Alg::CrStd),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm {s:?} (expected cr, cr-shifted, in, cr-std)"))),
        }
    }
}

/// Runs `alg` on the matrix represented by `t`. The conventional baseline
/// sees only the reconstructed matrix.
pub fn run_alg(alg: Alg, t: &TripletRep, opts: &SqrtOptions) -> Result<SqrtResult> {
    match alg {
        Alg::Cr => cr_sqrt(t, opts),
        Alg::CrShifted => shifted_cr_sqrt(t, opts),
        Alg::In => in_sqrt(t, opts),
        Alg::CrStd => cr_sqrt_standard(&t.reconstruct(), opts),
    }
}

/// One report line.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub family: Family,
    pub n: usize,
    /// Only meaningful for Test 2.
    pub eps: Option<f64>,
    pub alg: Alg,
    /// `None` when the solver failed without producing an iterate.
    pub max_err: Option<f64>,
    pub iterations: usize,
    pub time_s: f64,
    /// Solver status, or the error code of the failure.
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub row: ExperimentRow,
    pub errors: Option<DenseMatrix>,
}

/// A generated matrix together with its reference square root.
pub struct Case {
    pub spec: TestSpec,
    pub triplet: TripletRep,
    pub reference: std::result::Result<XpMatrix, Error>,
}

impl Case {
    pub fn new(spec: TestSpec) -> Result<Self> {
        let triplet = spec.generate()?;
        let reference = xp_sqrtm_reference_triplet(&triplet);
        Ok(Case { spec, triplet, reference })
    }

    fn eps(&self) -> Option<f64> {
        (self.spec.family == Family::Test2).then_some(self.spec.eps)
    }

    pub fn run(&self, alg: Alg, opts: &SqrtOptions) -> CaseOutcome {
        let start = Instant::now();
        let out = run_alg(alg, &self.triplet, opts);
        let time_s = start.elapsed().as_secs_f64();
        let (result, status) = match out {
            Ok(r) => {
                let status = r.status.as_str().to_string();
                (Some(r), status)
            }
            Err(Error::NotConverged { result }) => {
                let status = result.status.as_str().to_string();
                (Some(*result), status)
            }
            Err(e) => (None, e.code().to_string()),
        };
        let mut row = ExperimentRow {
            family: self.spec.family,
            n: self.spec.n,
            eps: self.eps(),
            alg,
            max_err: None,
            iterations: result.as_ref().map_or(0, |r| r.iterations),
            time_s,
            status,
        };
        let mut errors = None;
        match (&self.reference, result) {
            (Ok(reference), Some(r)) => match comp_error(&r.x, reference) {
                Ok(ce) => {
                    row.max_err = Some(ce.max_rel);
                    errors = Some(ce.error_matrix);
                }
                Err(e) => row.status = e.code().to_string(),
            },
            (Err(e), _) => row.status = format!("reference_{}", e.code()),
            (Ok(_), None) => {}
        }
        CaseOutcome { row, errors }
    }
}

/// Runs every algorithm on every case, in order.
pub fn run_experiment(specs: &[TestSpec], algs: &[Alg], opts: &SqrtOptions) -> Result<Vec<CaseOutcome>> {
    opts.validate()?;
    let mut out = Vec::with_capacity(specs.len() * algs.len());
    for spec in specs {
        let case = Case::new(*spec)?;
        for &alg in algs {
            out.push(case.run(alg, opts));
        }
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 8] = ["family", "n", "eps", "alg", "max_err", "iters", "time", "status"];

/// Writes the report as CSV. With `with_time = false` the time column is
/// left empty so that the output is byte-identical across runs.
pub fn write_csv<W: Write>(w: W, rows: &[ExperimentRow], with_time: bool) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for r in rows {
        wtr.write_record([
            r.family.as_str().to_string(),
            r.n.to_string(),
            r.eps.map(|e| format!("{e:e}")).unwrap_or_default(),
            r.alg.as_str().to_string(),
            r.max_err.map(|e| format!("{e:.6e}")).unwrap_or_default(),
            r.iterations.to_string(),
            if with_time { format!("{:.6}", r.time_s) } else { String::new() },
            r.status.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// File name used by [`dump_errors`] for a row.
pub fn error_file_name(row: &ExperimentRow) -> String {
    match row.eps {
        Some(e) => format!("{}_n{}_eps{:e}_{}.csv", row.family.as_str(), row.n, e, row.alg),
        None => format!("{}_n{}_{}.csv", row.family.as_str(), row.n, row.alg),
    }
}

/// Writes each available error matrix as a headerless CSV grid into `dir`.
pub fn dump_errors(dir: &Path, outcomes: &[CaseOutcome]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for o in outcomes {
        let Some(e) = &o.errors else { continue };
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_path(dir.join(error_file_name(&o.row)))?;
        for i in 0..e.n_rows() {
            wtr.write_record(e.row(i).iter().map(|x| format!("{x:.6e}")))?;
        }
        wtr.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alg_names_round_trip() {
        for a in Alg::ALL {
            assert_eq!(a.as_str().parse::<Alg>().unwrap(), a);
        }
        assert!("sqrtm".parse::<Alg>().is_err());
    }

    #[test]
    fn small_experiment() {
        let specs = [TestSpec::new(Family::Test3, 8), TestSpec { eps: 1e-3, ..TestSpec::new(Family::Test2, 6) }];
        let out = run_experiment(&specs, &Alg::ALL, &SqrtOptions::default()).unwrap();
        assert_eq!(out.len(), 8);
        for o in out[..4].iter().filter(|o| o.row.alg != Alg::CrShifted) {
            assert!(o.row.max_err.unwrap() <= 1e-12, "{:?}", o.row);
        }
        // Shifted CR refuses the nonsingular Test 3 matrix.
        assert_eq!(out[2].row.status, "not_singular_input");
        assert!(out[2].errors.is_none());
        assert_eq!(out[4].row.eps, Some(1e-3));

        let rows: Vec<_> = out.iter().map(|o| o.row.clone()).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&mut a, &rows, false).unwrap();
        write_csv(&mut b, &rows, false).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("family,n,eps,alg,max_err,iters,time,status\n"));
        assert_eq!(text.lines().count(), 9);
    }
}
