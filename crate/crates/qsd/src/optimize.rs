//! Gradient-based maximization of the success probability over all circuit
//! angles: parameter-shift or finite-difference gradients, Adam updates,
//! uniform random restarts, and an exhaustive grid oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par::par_map;
use crate::protocol::{
    alice_branches, bsc_prob, parity_projectors, success_from_branches, success_probability,
    AngleSet, MixingRule, ProtocolConfig,
};
use crate::quantum::born_probability;
use crate::Error;

/// Deterministic per-stream seed derivation (splitmix64 over seed ⊕ stream).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMethod {
    /// Exact [f(θ+π/2) - f(θ-π/2)] / 2; valid because every gate is
    /// exp(-iθG/2) with G² = I and the objective is linear in each
    /// conjugation.
    ParameterShift,
    /// Central differences with `fd_step`.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub gradient_method: GradientMethod,
    pub adam_betas: (f64, f64),
    pub adam_epsilon: f64,
    pub fd_step: f64,
    /// Record the per-iteration objective of the best restart.
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            iterations: 1000,
            restarts: 8,
            seed: 0,
            gradient_method: GradientMethod::ParameterShift,
            adam_betas: (0.9, 0.999),
            adam_epsilon: 1e-8,
            fd_step: 1e-6,
            record_trace: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.learning_rate <= 0.0 {
            return Err(Error::ParameterOutOfRange {
                name: "learning_rate",
                value: self.learning_rate,
            });
        }
        if self.iterations == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "iterations",
                value: 0.0,
            });
        }
        if self.restarts == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "restarts",
                value: 0.0,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_angles: AngleSet,
    pub best_value: f64,
    pub per_restart_values: Vec<f64>,
    pub trace: Option<Vec<f64>>,
}

/// Gradient of the success probability with respect to the flattened angle
/// vector (Alice first, then Bob by message). Alice branches are cached
/// while Bob parameters are shifted.
pub fn gradient(
    angles: &AngleSet,
    config: &ProtocolConfig,
    method: GradientMethod,
    fd_step: f64,
) -> Result<Vec<f64>, Error> {
    angles.validate(&config.ansatz)?;
    let flat = angles.flatten();
    let na = config.ansatz.alice_param_count();
    let branches = alice_branches(angles, config)?;
    let (shift, denom) = match method {
        GradientMethod::ParameterShift => (std::f64::consts::FRAC_PI_2, 2.0),
        GradientMethod::FiniteDifference => (fd_step, 2.0 * fd_step),
    };
    let mut grad = Vec::with_capacity(flat.len());
    for k in 0..flat.len() {
        let eval = |delta: f64| -> Result<f64, Error> {
            let mut shifted = flat.clone();
            shifted[k] += delta;
            let shifted = AngleSet::unflatten(&config.ansatz, &shifted)?;
            if k < na {
                success_probability(&shifted, config)
            } else {
                success_from_branches(&branches, &shifted, config)
            }
        };
        grad.push((eval(shift)? - eval(-shift)?) / denom);
    }
    Ok(grad)
}

fn adam_ascent(
    init: Vec<f64>,
    config: &ProtocolConfig,
    opt: &OptimizerConfig,
) -> Result<(AngleSet, f64, Option<Vec<f64>>), Error> {
    let (b1, b2) = opt.adam_betas;
    let n = init.len();
    let mut theta = init;
    let mut m = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut trace = opt.record_trace.then(Vec::new);
    for t in 1..=opt.iterations {
        let angles = AngleSet::unflatten(&config.ansatz, &theta)?;
        if let Some(tr) = trace.as_mut() {
            tr.push(success_probability(&angles, config)?);
        }
        let g = gradient(&angles, config, opt.gradient_method, opt.fd_step)?;
        let bc1 = 1.0 - b1.powi(t as i32);
        let bc2 = 1.0 - b2.powi(t as i32);
        for k in 0..n {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            theta[k] += opt.learning_rate * m_hat / (v_hat.sqrt() + opt.adam_epsilon);
        }
    }
    let angles = AngleSet::unflatten(&config.ansatz, &theta)?;
    let value = success_probability(&angles, config)?;
    Ok((angles, value, trace))
}

/// Noise-aware training: Adam ascent from `restarts` uniform random starts,
/// best final objective wins (lowest restart index on ties). Deterministic
/// for a fixed seed.
pub fn train(config: &ProtocolConfig, opt: &OptimizerConfig) -> Result<OptimizationResult, Error> {
    opt.validate()?;
    let spec = config.ansatz;
    let n_params = spec.alice_param_count() + spec.message_count() * spec.bob_param_count_per_message();
    let inits: Vec<Vec<f64>> = (0..opt.restarts)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opt.seed, r as u64));
            (0..n_params)
                .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
                .collect()
        })
        .collect();
    let runs = par_map(inits, |init| adam_ascent(init, config, opt));
    let mut best: Option<(AngleSet, f64, Option<Vec<f64>>)> = None;
    let mut per_restart_values = Vec::with_capacity(opt.restarts);
    for run in runs {
        let (angles, value, trace) = run?;
        per_restart_values.push(value);
        let better = match &best {
            None => true,
            Some((_, bv, _)) => value > *bv,
        };
        if better {
            best = Some((angles, value, trace));
        }
    }
    let (best_angles, best_value, trace) = best.expect("restarts >= 1");
    Ok(OptimizationResult {
        best_angles,
        best_value,
        per_restart_values,
        trace,
    })
}

/// Training with p forced to 0 (the noise-unaware baseline); the caller
/// evaluates the returned angles at the true p.
pub fn train_noise_unaware(
    config: &ProtocolConfig,
    opt: &OptimizerConfig,
) -> Result<OptimizationResult, Error> {
    let mut unaware = *config;
    unaware.p = 0.0;
    train(&unaware, opt)
}

const GRID_CAP: u64 = 10_000_000;

/// Exhaustive evaluation over the uniform angle grid [0, 2π)^k. The inner
/// Bob combinations are enumerated through a per-message lookup table, which
/// a unit test pins against `success_probability`.
pub fn grid_oracle(
    config: &ProtocolConfig,
    steps_per_param: usize,
) -> Result<(AngleSet, f64), Error> {
    let spec = config.ansatz;
    let msgs = spec.message_count();
    let k = 1 + msgs;
    let total = (steps_per_param as u64).pow(k as u32);
    if total > GRID_CAP {
        return Err(Error::GridTooLarge {
            size: total,
            limit: GRID_CAP,
        });
    }
    let grid: Vec<f64> = (0..steps_per_param)
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / steps_per_param as f64)
        .collect();

    let alice_results = par_map((0..steps_per_param).collect::<Vec<_>>(), |ai| {
        best_over_bob_grid(config, grid[ai], &grid).map(|(combo, value)| (ai, combo, value))
    });

    let mut best: Option<(usize, Vec<usize>, f64)> = None;
    for r in alice_results {
        let (ai, combo, value) = r?;
        let better = match &best {
            None => true,
            Some((_, _, bv)) => value > *bv,
        };
        if better {
            best = Some((ai, combo, value));
        }
    }
    let (ai, combo, value) = best.expect("steps_per_param >= 1");
    let angles = AngleSet {
        alice: vec![grid[ai]],
        bob: combo.iter().map(|&j| vec![grid[j]]).collect(),
    };
    Ok((angles, value))
}

/// For a fixed Alice angle, tabulates per-message odd-parity contributions
/// and enumerates every Bob grid combination by table lookup.
fn best_over_bob_grid(
    config: &ProtocolConfig,
    alice_angle: f64,
    grid: &[f64],
) -> Result<(Vec<usize>, f64), Error> {
    let spec = config.ansatz;
    let s = config.pairs();
    let msgs = spec.message_count();
    let steps = grid.len();
    let probe = AngleSet {
        alice: vec![alice_angle],
        bob: vec![vec![0.0]; msgs],
    };
    let branches = alice_branches(&probe, config)?;
    let parity = parity_projectors(s)?;
    let odd = &parity.projectors()[1];

    // odd-parity mass tr(Π_odd U σ_{a|i} U†) per (i, outcome, grid angle)
    let mut e = vec![vec![vec![0.0; steps]; msgs]; 2];
    let mut u_odd = Vec::with_capacity(steps);
    for &theta in grid {
        let u = spec.bob_unitary(&[theta])?;
        u_odd.push(u.dagger().matmul(odd).matmul(&u));
    }
    for i in 0..2 {
        for branch in &branches[i] {
            if branch.negligible {
                continue;
            }
            for (j, muj) in u_odd.iter().enumerate() {
                e[i][branch.outcome][j] = born_probability(&branch.post_state, muj)?;
            }
        }
    }

    // per-message gain table: choosing grid angle j for message m contributes
    // g[m][j] to 2·P_succ - 1
    let mut gain = vec![vec![0.0; steps]; msgs];
    for m in 0..msgs {
        for (j, g) in gain[m].iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..2 {
                for branch in &branches[i] {
                    let w = match config.mixing_rule {
                        MixingRule::Bayes => branch.prob * bsc_prob(branch.outcome, m, s, config.p),
                        MixingRule::Literal => {
                            let p_b: f64 = branches[i]
                                .iter()
                                .map(|b| bsc_prob(b.outcome, m, s, config.p) * b.prob)
                                .sum();
                            p_b * bsc_prob(branch.outcome, m, s, config.p)
                        }
                    };
                    let odd_mass = w * e[i][branch.outcome][j];
                    acc += if i == 0 { -odd_mass } else { odd_mass };
                }
            }
            *g = acc;
        }
    }

    let mut best_combo = vec![0usize; msgs];
    let mut best_value = f64::NEG_INFINITY;
    let mut combo = vec![0usize; msgs];
    loop {
        let total: f64 = (0..msgs).map(|m| gain[m][combo[m]]).sum();
        let value = 0.5 * (1.0 + total);
        if value > best_value {
            best_value = value;
            best_combo = combo.clone();
        }
        // odometer over the combo space
        let mut pos = msgs;
        loop {
            if pos == 0 {
                return Ok((best_combo, best_value.clamp(0.0, 1.0)));
            }
            pos -= 1;
            combo[pos] += 1;
            if combo[pos] < steps {
                break;
            }
            combo[pos] = 0;
        }
    }
}
