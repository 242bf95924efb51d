//! The full pipeline: `l(Q)`, `l(R¹π_*)` and their sum, with bound checks,
//! certificates, and seeded sweeps over random transition polynomials.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand_pcg::Pcg32;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cech::{self, CechError};
use crate::laurent::{normal_form_window, BiLaurentPoly, BundleData, BundleError, ParseError};
use crate::linalg::Rat;
use crate::sections::{self, SectionsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Window(#[from] BundleError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Sections(#[from] SectionsError),
}

impl InvariantError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) | Self::Window(_) | Self::InvalidConfig(_) => EXIT_INPUT,
            Self::Cech(_) | Self::Sections(_) => EXIT_CERTIFICATION,
        }
    }

    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            Self::Parse(_) => "ParseError",
            Self::Window(_) => "WindowViolation",
            Self::InvalidConfig(_) => "InvalidConfig",
            Self::Cech(CechError::NonStabilization { .. }) => "NonStabilization",
            Self::Cech(_) | Self::Sections(_) => "CertificationFailure",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_BOUNDS: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificates {
    /// z-window of the last Čech level used for the stable h¹.
    pub cech_window: [i64; 2],
    /// Degree bound at which the sections-module presentation was certified.
    pub sections_n: u32,
    /// 𝔪-power at which the colength of `Q` stabilized.
    pub colength_m: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub cech_ms: f64,
    pub sections_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub j: u32,
    pub p: String,
    #[serde(rename = "lQ")]
    pub l_q: usize,
    #[serde(rename = "lR1")]
    pub l_r1: usize,
    pub gap: usize,
    #[serde(rename = "boundsOk")]
    pub bounds_ok: bool,
    pub certificates: Certificates,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl InvariantReport {
    pub fn without_timings(mut self) -> Self {
        self.timings = None;
        self
    }
}

/// `j ≤ gap ≤ j²`.
pub fn bounds_hold(j: u32, gap: usize) -> bool {
    let j = j as usize;
    j <= gap && gap <= j * j
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

pub fn parse_p(text: &str) -> Result<BiLaurentPoly, InvariantError> {
    Ok(text.parse::<BiLaurentPoly>()?)
}

pub fn compute_text(j: u32, p: &str) -> Result<InvariantReport, InvariantError> {
    compute(j, &parse_p(p)?)
}

/// Runs the full pipeline on a validated bundle.
pub fn compute(j: u32, p: &BiLaurentPoly) -> Result<InvariantReport, InvariantError> {
    let bundle = BundleData::new(j, p.clone())?;
    let start = Instant::now();
    let r1 = cech::r1_length(&bundle)?;
    let cech_ms = millis(start);
    let mid = Instant::now();
    let lq = sections::l_of_Q_for_bundle(&bundle)?;
    let sections_ms = millis(mid);
    let gap = lq.value + r1.value;
    Ok(InvariantReport {
        j,
        p: p.to_string(),
        l_q: lq.value,
        l_r1: r1.value,
        gap,
        bounds_ok: bounds_hold(j, gap),
        certificates: Certificates {
            cech_window: r1.window_certificate.window_used.as_pair(),
            sections_n: lq.sections_bound,
            colength_m: lq.colength_m,
        },
        timings: Some(Timings {
            cech_ms,
            sections_ms,
            total_ms: millis(start),
        }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepConfig {
    pub j: u32,
    pub samples: usize,
    pub coeff_min: i64,
    pub coeff_max: i64,
    pub seed: u64,
    pub density: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), InvariantError> {
        if self.coeff_min > self.coeff_max {
            return Err(InvariantError::InvalidConfig(format!(
                "empty coefficient range [{}, {}]",
                self.coeff_min, self.coeff_max
            )));
        }
        if self.coeff_min == 0 && self.coeff_max == 0 {
            return Err(InvariantError::InvalidConfig(
                "coefficient range contains no nonzero integer".into(),
            ));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(InvariantError::InvalidConfig(format!(
                "density {} outside (0, 1]",
                self.density
            )));
        }
        Ok(())
    }

    /// The `index`-th random polynomial. Each sample draws from its own PCG32
    /// stream (`Pcg32::new(seed, index)`), so samples do not depend on each
    /// other or on scheduling. Window monomials are visited in ascending
    /// `(i, k)` order; each is kept with probability `density` and given a
    /// coefficient uniform on the nonzero integers of the range.
    pub fn sample(&self, index: usize) -> BiLaurentPoly {
        let mut rng = Pcg32::new(self.seed, index as u64);
        let zero_inside = self.coeff_min <= 0 && 0 <= self.coeff_max;
        let count = self.coeff_max - self.coeff_min + 1 - i64::from(zero_inside);
        let mut p = BiLaurentPoly::zero();
        for m in normal_form_window(self.j) {
            if !rng.gen_bool(self.density) {
                continue;
            }
            let mut c = self.coeff_min + rng.gen_range(0..count);
            if zero_inside && c >= 0 {
                c += 1;
            }
            p.add_term(m, Rat::from_integer(c.into()));
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSummary {
    pub samples: usize,
    pub min_gap: Option<usize>,
    pub max_gap: Option<usize>,
    pub gap_histogram: BTreeMap<usize, usize>,
    pub all_bounds_ok: bool,
}

#[derive(Debug)]
pub struct SweepOutcome {
    /// Reports in sample order, up to the first failure.
    pub reports: Vec<InvariantReport>,
    pub failure: Option<(usize, InvariantError)>,
}

impl SweepOutcome {
    pub fn summary(&self) -> SweepSummary {
        let mut gap_histogram = BTreeMap::new();
        for r in &self.reports {
            *gap_histogram.entry(r.gap).or_insert(0) += 1;
        }
        SweepSummary {
            samples: self.reports.len(),
            min_gap: self.reports.iter().map(|r| r.gap).min(),
            max_gap: self.reports.iter().map(|r| r.gap).max(),
            gap_histogram,
            all_bounds_ok: self.reports.iter().all(|r| r.bounds_ok),
        }
    }
}

/// Runs `cfg.samples` random bundles on up to `jobs` threads (0 means the
/// rayon default); output order is the sample order.
pub fn sweep(cfg: &SweepConfig, jobs: usize) -> Result<SweepOutcome, InvariantError> {
    cfg.validate()?;
    let run = || -> Vec<Result<InvariantReport, InvariantError>> {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| compute(cfg.j, &cfg.sample(i)))
            .collect()
    };
    let results = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| InvariantError::InvalidConfig(e.to_string()))?
        .install(run);
    let mut reports = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                return Ok(SweepOutcome {
                    reports,
                    failure: Some((i, e)),
                })
            }
        }
    }
    Ok(SweepOutcome {
        reports,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::in_normal_form_window;

    fn cfg(j: u32, seed: u64) -> SweepConfig {
        SweepConfig {
            j,
            samples: 20,
            coeff_min: -5,
            coeff_max: 5,
            seed,
            density: 0.5,
        }
    }

    #[test]
    fn split_and_lower_bound_examples() {
        let r = compute_text(3, "0").unwrap();
        assert_eq!((r.l_q, r.l_r1, r.gap, r.bounds_ok), (6, 3, 9, true));
        let r = compute_text(3, "u").unwrap();
        assert_eq!((r.l_q, r.l_r1, r.gap, r.bounds_ok), (1, 2, 3, true));
        let r = compute_text(1, "0").unwrap();
        assert_eq!(r.gap, 1);
    }

    #[test]
    fn input_errors_map_to_exit_code_two() {
        let e = compute_text(2, "z^^2").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_INPUT);
        assert_eq!(e.code(), "ParseError");
        let e = compute_text(2, "u^3").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_INPUT);
        assert_eq!(e.code(), "WindowViolation");
    }

    #[test]
    fn samples_respect_window_and_range() {
        let c = cfg(3, 7);
        for i in 0..50 {
            let p = c.sample(i);
            for (m, v) in p.terms() {
                assert!(in_normal_form_window(3, m));
                assert!(*v != Rat::from_integer(0.into()));
                assert!(*v >= Rat::from_integer((-5).into()) && *v <= Rat::from_integer(5.into()));
            }
        }
        assert_eq!(c.sample(3), cfg(3, 7).sample(3));
        assert!((0..10).any(|i| c.sample(i) != cfg(3, 8).sample(i)));
    }

    #[test]
    fn degenerate_windows() {
        for j in [0, 1] {
            let out = sweep(&cfg(j, 1), 2).unwrap();
            assert!(out.failure.is_none());
            assert!(out
                .reports
                .iter()
                .all(|r| r.p == "0" && r.gap == j as usize));
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(2, 0);
        c.density = 0.0;
        assert!(c.validate().is_err());
        c.density = 1.0;
        c.coeff_min = 3;
        c.coeff_max = 2;
        assert!(c.validate().is_err());
        c.coeff_min = 0;
        c.coeff_max = 0;
        assert!(c.validate().is_err());
    }
}
