//! Upper bounds on distributed discrimination: the Helstrom bound, the PPT
//! bound via a from-scratch first-order SDP solver, and the Bob-only
//! marginal bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{
    hermitian_eig, partial_trace, partial_transpose, trace_norm, ComplexMatrix, Subsystem, C64,
};
use crate::protocol::ordered_product_state;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpConfig {
    /// Tolerance on primal change and constraint violation.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Multiplier on the scale-free base step 0.1 / ‖Δ‖_F.
    pub step_parameter: f64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            max_iterations: 50_000,
            step_parameter: 1.0,
        }
    }
}

/// Outcome of one PPT solve. `residuals` holds the worst negative-eigenvalue
/// violations of [M ⪰ 0, I−M ⪰ 0, M^{T_B} ⪰ 0, I−M^{T_B} ⪰ 0] at the
/// reported M.
#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub iterations_used: usize,
    pub residuals: [f64; 4],
    pub converged: bool,
    /// The POVM element M = M_0 behind the reported value; M_1 = I − M.
    #[serde(skip)]
    pub m: ComplexMatrix,
}

/// Δ = ρ_0^{⊗S} − ρ_1^{⊗S} in Alice-before-Bob qubit order.
pub fn state_difference(gamma: f64, s: usize) -> Result<ComplexMatrix, Error> {
    let rho0 = ordered_product_state(0, gamma, s)?;
    let rho1 = ordered_product_state(1, gamma, s)?;
    Ok(rho0.sub(&rho1))
}

/// Helstrom bound ½ + ¼‖ρ_0^{⊗S} − ρ_1^{⊗S}‖₁.
pub fn helstrom_bound(gamma: f64, s: usize) -> Result<f64, Error> {
    Ok(0.5 + 0.25 * trace_norm(&state_difference(gamma, s)?)?)
}

/// Bob-only bound ½ + ¼‖tr_A(ρ_0^{⊗S}) − tr_A(ρ_1^{⊗S})‖₁.
pub fn bob_only_bound(gamma: f64, s: usize) -> Result<f64, Error> {
    let diff = state_difference(gamma, s)?;
    let marginal = partial_trace(&diff, s, s, Subsystem::A)?;
    Ok(0.5 + 0.25 * trace_norm(&marginal)?)
}

/// Eigen-clip onto the spectahedral box {0 ⪯ M ⪯ I}.
fn project_box(m: &ComplexMatrix) -> Result<ComplexMatrix, Error> {
    let herm = m.add(&m.dagger()).scale_real(0.5);
    let eig = hermitian_eig(&herm)?;
    Ok(eig.map_eigenvalues(|l| l.clamp(0.0, 1.0)))
}

/// Same box constraint seen through the partial transpose.
fn project_box_pt(m: &ComplexMatrix, s: usize) -> Result<ComplexMatrix, Error> {
    let pt = partial_transpose(m, s, s)?;
    let clipped = project_box(&pt)?;
    partial_transpose(&clipped, s, s)
}

/// Dykstra's alternating projection onto the intersection of the direct and
/// partial-transpose spectahedral boxes.
fn dykstra(m: &ComplexMatrix, s: usize, tol: f64, max_cycles: usize) -> Result<ComplexMatrix, Error> {
    let dim = m.dim();
    let mut x = m.clone();
    let mut p = ComplexMatrix::zeros(dim);
    let mut q = ComplexMatrix::zeros(dim);
    for _ in 0..max_cycles {
        let y = project_box(&x.add(&p))?;
        p = x.add(&p).sub(&y);
        let x_next = project_box_pt(&y.add(&q), s)?;
        q = y.add(&q).sub(&x_next);
        let change = x_next.max_abs_diff(&x);
        x = x_next;
        if change < tol {
            break;
        }
    }
    Ok(x)
}

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64, Error> {
    Ok(hermitian_eig(&m.add(&m.dagger()).scale_real(0.5))?.eigenvalues[0])
}

fn constraint_residuals(m: &ComplexMatrix, s: usize) -> Result<[f64; 4], Error> {
    let id = ComplexMatrix::identity(m.dim());
    let pt = partial_transpose(m, s, s)?;
    Ok([
        (-min_eigenvalue(m)?).max(0.0),
        (-min_eigenvalue(&id.sub(m))?).max(0.0),
        (-min_eigenvalue(&pt)?).max(0.0),
        (-min_eigenvalue(&id.sub(&pt))?).max(0.0),
    ])
}

fn objective(m: &ComplexMatrix, delta: &ComplexMatrix) -> f64 {
    0.5 + 0.5 * m.matmul(delta).trace().re
}

/// PPT bound by projected-subgradient ascent on the reduced variable
/// M = M_0 (so M_1 = I − M): maximize ½ + ½ tr(M Δ) over the intersection
/// of {0 ⪯ M ⪯ I} and {0 ⪯ M^{T_B} ⪯ I}. Steps diminish as c/√k and each
/// iterate is restored to feasibility by Dykstra projection; the best
/// feasible iterate is reported, re-clipped onto the direct box so that the
/// value can never exceed the Helstrom bound.
pub fn ppt_bound(gamma: f64, s: usize, cfg: &SdpConfig) -> Result<BoundResult, Error> {
    if cfg.tolerance <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "tolerance",
            value: cfg.tolerance,
        });
    }
    let delta = state_difference(gamma, s)?;
    let dim = delta.dim();
    let c = cfg.step_parameter * 0.1 / delta.frobenius_norm().max(1e-12);

    let mut m = ComplexMatrix::identity(dim).scale_real(0.5); // feasible start
    let mut best_m = m.clone();
    let mut best_value = objective(&m, &delta);
    let mut stall = 0usize;
    let mut iterations_used = cfg.max_iterations;
    let mut converged = false;

    for k in 1..=cfg.max_iterations {
        let step = c / (k as f64).sqrt();
        m = m.add(&delta.scale(C64::new(step, 0.0)));
        m = dykstra(&m, s, cfg.tolerance * 0.1, 30)?;
        let value = objective(&m, &delta);
        if value > best_value + cfg.tolerance {
            best_value = value;
            best_m = m.clone();
            stall = 0;
        } else {
            if value > best_value {
                best_value = value;
                best_m = m.clone();
            }
            stall += 1;
        }
        if stall >= 100 {
            iterations_used = k;
            converged = true;
            break;
        }
    }

    // exact direct-box feasibility caps the value at the Helstrom bound
    let m_final = project_box(&best_m)?;
    let value = objective(&m_final, &delta).max(0.5);
    let residuals = constraint_residuals(&m_final, s)?;
    let converged = converged && residuals.iter().all(|&r| r <= cfg.tolerance);
    Ok(BoundResult {
        value,
        iterations_used,
        residuals,
        converged,
        m: m_final,
    })
}

/// Cross-validation hook: perturbs the claimed optimum in 1000 random
/// feasible directions and returns the largest objective improvement found
/// (negative or ~0 when the claim stands).
pub fn verify_ppt_optimum(
    result: &BoundResult,
    gamma: f64,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<f64, Error> {
    let delta = state_difference(gamma, s)?;
    let dim = delta.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut h = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                if i == j {
                    h.set(i, i, C64::new(rng.gen::<f64>() - 0.5, 0.0));
                } else {
                    let v = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                    h.set(i, j, v);
                    h.set(j, i, v.conj());
                }
            }
        }
        let scale = 0.05 / h.frobenius_norm().max(1e-12);
        let candidate = result.m.add(&h.scale_real(scale));
        let feasible = project_box(&dykstra(&candidate, s, 1e-9, 60)?)?;
        let gain = objective(&feasible, &delta) - result.value;
        worst = worst.max(gain);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helstrom_closed_values() {
        assert!((helstrom_bound(0.0, 1).unwrap() - 1.0).abs() < 1e-9);
        assert!((helstrom_bound(0.0, 2).unwrap() - 1.0).abs() < 1e-9);
        let expect = 0.5 + 2f64.sqrt() / 4.0;
        assert!((helstrom_bound(1.0, 1).unwrap() - expect).abs() < 1e-6);
    }

    #[test]
    fn helstrom_monotone_in_copies() {
        for k in 0..=10 {
            let gamma = k as f64 / 10.0;
            let h1 = helstrom_bound(gamma, 1).unwrap();
            let h2 = helstrom_bound(gamma, 2).unwrap();
            assert!(h2 >= h1 - 1e-10, "gamma {gamma}: {h2} < {h1}");
        }
    }

    #[test]
    fn bob_only_endpoints() {
        assert!((bob_only_bound(0.0, 2).unwrap() - 0.5).abs() < 1e-12);
        assert!((bob_only_bound(0.8, 2).unwrap() - 0.78).abs() < 1e-12);
        // single pair: marginals I/2 vs diag(1, 0), trace norm 1
        assert!((bob_only_bound(1.0, 1).unwrap() - 0.75).abs() < 1e-12);
        // two pairs: marginals I/4 vs diag(1, 0, 0, 0), trace norm 3/2
        assert!((bob_only_bound(1.0, 2).unwrap() - 0.875).abs() < 1e-12);
    }

    #[test]
    fn bob_only_below_helstrom_and_monotone() {
        for s in [1usize, 2] {
            let mut prev = -1.0;
            for k in 0..=20 {
                let gamma = k as f64 * 0.05;
                let bob = bob_only_bound(gamma, s).unwrap();
                let hel = helstrom_bound(gamma, s).unwrap();
                assert!(bob <= hel + 1e-9);
                assert!(bob >= prev - 1e-10, "gamma {gamma}, s {s}");
                prev = bob;
            }
        }
    }

    #[test]
    fn ppt_orthogonal_pure_states() {
        let result = ppt_bound(0.0, 1, &SdpConfig::default()).unwrap();
        assert!((result.value - 1.0).abs() < 1e-3, "value {}", result.value);
        assert!(result.residuals.iter().all(|&r| r < 1e-6));
    }

    #[test]
    fn ppt_dominated_by_helstrom() {
        let cfg = SdpConfig::default();
        for s in [1usize, 2] {
            for k in [0, 5, 10] {
                let gamma = k as f64 / 10.0;
                let ppt = ppt_bound(gamma, s, &cfg).unwrap();
                let hel = helstrom_bound(gamma, s).unwrap();
                assert!(
                    ppt.value <= hel + 1e-6,
                    "gamma {gamma} s {s}: ppt {} hel {hel}",
                    ppt.value
                );
                assert!(ppt.value >= 0.5 - 1e-9);
            }
        }
    }

    #[test]
    fn ppt_monotone_under_tolerance_tightening() {
        let loose = ppt_bound(0.6, 1, &SdpConfig { tolerance: 1e-5, ..SdpConfig::default() }).unwrap();
        let tight = ppt_bound(0.6, 1, &SdpConfig::default()).unwrap();
        assert!(loose.value >= tight.value - 1e-4);
    }

    #[test]
    fn ppt_verifier_finds_no_improvement() {
        let result = ppt_bound(0.5, 1, &SdpConfig::default()).unwrap();
        let gain = verify_ppt_optimum(&result, 0.5, 1, 200, 77).unwrap();
        assert!(gain <= 1e-5, "gain {gain}");
    }

    #[test]
    fn dykstra_leaves_feasible_points_alone() {
        let half = ComplexMatrix::identity(4).scale_real(0.5);
        let projected = dykstra(&half, 1, 1e-10, 30).unwrap();
        assert!(projected.max_abs_diff(&half) < 1e-9);
        let delta = state_difference(0.3, 1).unwrap();
        assert!((objective(&half, &delta) - 0.5).abs() < 1e-12);
    }
}
