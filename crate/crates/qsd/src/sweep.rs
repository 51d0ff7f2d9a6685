//! Parameter-sweep harness: grids over p or γ, one record per
//! (grid value, scheme), written as deterministic CSV.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzKind, AnsatzSpec};
use crate::bounds::{bob_only_bound, helstrom_bound, ppt_bound, SdpConfig};
use crate::optimize::{derive_seed, train, OptimizerConfig};
use crate::par::par_map;
use crate::protocol::{success_probability, AngleSet, MixingRule, ProtocolConfig};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    P,
    Gamma,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::P => "p",
            SweepVariable::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    LoccnetBaseline,
    NaLoccnetS1,
    NaLoccnetS2,
    PptS1,
    PptS2,
    HelstromS1,
    HelstromS2,
    BobOnlyS2,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::LoccnetBaseline,
        Scheme::NaLoccnetS1,
        Scheme::NaLoccnetS2,
        Scheme::PptS1,
        Scheme::PptS2,
        Scheme::HelstromS1,
        Scheme::HelstromS2,
        Scheme::BobOnlyS2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::LoccnetBaseline => "loccnet_baseline",
            Scheme::NaLoccnetS1 => "na_loccnet_s1",
            Scheme::NaLoccnetS2 => "na_loccnet_s2",
            Scheme::PptS1 => "ppt_s1",
            Scheme::PptS2 => "ppt_s2",
            Scheme::HelstromS1 => "helstrom_s1",
            Scheme::HelstromS2 => "helstrom_s2",
            Scheme::BobOnlyS2 => "bob_only_s2",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        Scheme::ALL.iter().copied().find(|v| v.name() == s)
    }

    fn pairs(self) -> usize {
        match self {
            Scheme::LoccnetBaseline | Scheme::NaLoccnetS1 | Scheme::PptS1 | Scheme::HelstromS1 => 1,
            _ => 2,
        }
    }

    fn is_bound(self) -> bool {
        matches!(
            self,
            Scheme::PptS1
                | Scheme::PptS2
                | Scheme::HelstromS1
                | Scheme::HelstromS2
                | Scheme::BobOnlyS2
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// The noise parameter held fixed (γ when sweeping p, p when sweeping γ).
    pub fixed: f64,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub sdp: SdpConfig,
}

impl SweepSpec {
    /// Success probability vs p at γ = 0.8, 26 grid points.
    pub fn fig4_preset(seed: u64) -> Self {
        Self {
            variable: SweepVariable::P,
            from: 0.0,
            to: 0.5,
            steps: 26,
            fixed: 0.8,
            schemes: Scheme::ALL.to_vec(),
            seed,
            optimizer: OptimizerConfig::default(),
            sdp: SdpConfig::default(),
        }
    }

    /// Success probability vs γ at p = 0.25, 21 grid points.
    pub fn fig5_preset(seed: u64) -> Self {
        Self {
            variable: SweepVariable::Gamma,
            from: 0.0,
            to: 1.0,
            steps: 21,
            fixed: 0.25,
            schemes: Scheme::ALL.to_vec(),
            seed,
            optimizer: OptimizerConfig::default(),
            sdp: SdpConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.from > self.to {
            return Err(Error::ParameterOutOfRange {
                name: "from",
                value: self.from,
            });
        }
        if self.steps < 2 {
            return Err(Error::ParameterOutOfRange {
                name: "steps",
                value: self.steps as f64,
            });
        }
        let (lo, hi, fixed_hi) = match self.variable {
            SweepVariable::P => (0.0, 0.5, 1.0),
            SweepVariable::Gamma => (0.0, 1.0, 0.5),
        };
        if self.from < lo || self.to > hi {
            return Err(Error::ParameterOutOfRange {
                name: "to",
                value: self.to,
            });
        }
        if !(0.0..=fixed_hi).contains(&self.fixed) {
            return Err(Error::ParameterOutOfRange {
                name: "fixed",
                value: self.fixed,
            });
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|j| self.from + (self.to - self.from) * j as f64 / (self.steps - 1) as f64)
            .collect()
    }

    fn gamma_p_at(&self, value: f64) -> (f64, f64) {
        match self.variable {
            SweepVariable::P => (self.fixed, value),
            SweepVariable::Gamma => (value, self.fixed),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub variable: String,
    pub value: f64,
    pub scheme: String,
    pub success_prob: f64,
    pub converged: bool,
    pub angles_json: String,
    pub wall_time_ms: u128,
}

fn scheme_stream(point: usize, scheme: Scheme) -> u64 {
    point as u64 * Scheme::ALL.len() as u64
        + Scheme::ALL.iter().position(|&s| s == scheme).unwrap() as u64
}

fn protocol_config(s: usize, gamma: f64, p: f64) -> Result<ProtocolConfig, Error> {
    let kind = if s == 1 { AnsatzKind::S1 } else { AnsatzKind::S2 };
    ProtocolConfig::new(AnsatzSpec::new(kind), gamma, p, MixingRule::Bayes)
}

/// Trained angles for the noise-unaware baseline, one entry per grid point.
/// When p is the swept variable the single p = 0 training is shared.
fn baseline_angles(spec: &SweepSpec, grid: &[f64]) -> Result<Vec<AngleSet>, Error> {
    match spec.variable {
        SweepVariable::P => {
            let config = protocol_config(1, spec.fixed, 0.0)?;
            let opt = OptimizerConfig {
                seed: derive_seed(spec.seed, scheme_stream(0, Scheme::LoccnetBaseline)),
                ..spec.optimizer
            };
            let result = train(&config, &opt)?;
            Ok(vec![result.best_angles; grid.len()])
        }
        SweepVariable::Gamma => {
            let tasks: Vec<(usize, f64)> = grid.iter().copied().enumerate().collect();
            par_map(tasks, |(j, gamma)| {
                let config = protocol_config(1, gamma, 0.0)?;
                let opt = OptimizerConfig {
                    seed: derive_seed(spec.seed, scheme_stream(j, Scheme::LoccnetBaseline)),
                    ..spec.optimizer
                };
                Ok(train(&config, &opt)?.best_angles)
            })
            .into_iter()
            .collect()
        }
    }
}

fn run_point(
    spec: &SweepSpec,
    point: usize,
    value: f64,
    scheme: Scheme,
    baseline: &[AngleSet],
) -> Result<SweepRecord, Error> {
    let start = Instant::now();
    let (gamma, p) = spec.gamma_p_at(value);
    let s = scheme.pairs();
    let (success_prob, converged, angles_json) = match scheme {
        Scheme::HelstromS1 | Scheme::HelstromS2 => (helstrom_bound(gamma, s)?, true, String::new()),
        Scheme::BobOnlyS2 => (bob_only_bound(gamma, s)?, true, String::new()),
        Scheme::PptS1 | Scheme::PptS2 => {
            let result = ppt_bound(gamma, s, &spec.sdp)?;
            (result.value, result.converged, String::new())
        }
        Scheme::LoccnetBaseline => {
            let angles = &baseline[point];
            let config = protocol_config(1, gamma, p)?;
            (
                success_probability(angles, &config)?,
                true,
                serde_json::to_string(angles)?,
            )
        }
        Scheme::NaLoccnetS1 | Scheme::NaLoccnetS2 => {
            let config = protocol_config(s, gamma, p)?;
            let opt = OptimizerConfig {
                seed: derive_seed(spec.seed, scheme_stream(point, scheme)),
                ..spec.optimizer
            };
            let result = train(&config, &opt)?;
            (
                result.best_value,
                true,
                serde_json::to_string(&result.best_angles)?,
            )
        }
    };
    Ok(SweepRecord {
        variable: spec.variable.name().to_string(),
        value,
        scheme: scheme.name().to_string(),
        success_prob,
        converged,
        angles_json,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Runs the full sweep. Rows come back in grid order (all schemes per grid
/// value, in the order listed in the spec) regardless of worker scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>, Error> {
    spec.validate()?;
    let grid = spec.grid();
    let baseline = if spec.schemes.contains(&Scheme::LoccnetBaseline) {
        baseline_angles(spec, &grid)?
    } else {
        Vec::new()
    };

    // bound schemes only depend on γ; share results across a p sweep
    let mut tasks = Vec::new();
    for (point, &value) in grid.iter().enumerate() {
        for &scheme in &spec.schemes {
            let shared_with_first = scheme.is_bound() && spec.variable == SweepVariable::P && point > 0;
            tasks.push((point, value, scheme, shared_with_first));
        }
    }
    let computed: Vec<Result<Option<SweepRecord>, Error>> =
        par_map(tasks, |(point, value, scheme, shared)| {
            if shared {
                return Ok(None);
            }
            run_point(spec, point, value, scheme, &baseline).map(Some)
        });

    let mut records = Vec::with_capacity(grid.len() * spec.schemes.len());
    let mut first_row: Vec<Option<SweepRecord>> = vec![None; spec.schemes.len()];
    let mut it = computed.into_iter();
    for (point, &value) in grid.iter().enumerate() {
        for (si, &scheme) in spec.schemes.iter().enumerate() {
            let slot = it.next().expect("one result per task")?;
            let record = match slot {
                Some(r) => {
                    if point == 0 && scheme.is_bound() {
                        first_row[si] = Some(r.clone());
                    }
                    r
                }
                None => {
                    let mut r = first_row[si]
                        .clone()
                        .expect("bound computed at the first grid point");
                    r.value = value;
                    r
                }
            };
            records.push(record);
        }
    }
    Ok(records)
}

/// 17-significant-digit float formatting shared by the CSV and documents.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub const CSV_HEADER: &str = "variable,value,scheme,success_prob,converged,angles_json,wall_time_ms";

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.variable,
            fmt_f64(r.value),
            r.scheme,
            fmt_f64(r.success_prob),
            r.converged,
            csv_escape(&r.angles_json),
            r.wall_time_ms
        );
    }
    out
}
