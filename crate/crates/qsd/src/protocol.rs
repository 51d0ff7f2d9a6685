//! Exact evaluation of the discrimination pipeline: Alice's circuit and
//! measurement, the binary symmetric channel, Bob's conditional unitaries,
//! and the parity detection that produces the average success probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::linalg::{kron, permute_qubits, ComplexMatrix, C64};
use crate::quantum::{born_probability, source_state, DensityMatrix, ProjectorSet};
use crate::Error;

/// Branches below this Alice-outcome probability are skipped in the
/// mixtures; the literal rule would otherwise divide by them.
pub const NEGLIGIBLE_PROB: f64 = 1e-14;

/// How the BSC-weighted Bob-side mixture is assembled; see `bob_final_state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixingRule {
    /// Physically consistent joint mixture Σ_{a,â} P^A_{a|i} P_{â|a} U_â σ_{a|i} U_â†.
    Bayes,
    /// Verbatim two-stage composition: Σ_â P^B_{â|i} U_â [Σ_a P_{â|a} σ_{a|i}] U_â†.
    Literal,
}

/// Full specification of one discrimination instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub ansatz: AnsatzSpec,
    /// Amplitude-damping noise parameter.
    pub gamma: f64,
    /// BSC bit-flip probability.
    pub p: f64,
    pub mixing_rule: MixingRule,
}

impl ProtocolConfig {
    pub fn new(ansatz: AnsatzSpec, gamma: f64, p: f64, mixing_rule: MixingRule) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::ParameterOutOfRange {
                name: "gamma",
                value: gamma,
            });
        }
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::ParameterOutOfRange { name: "p", value: p });
        }
        Ok(Self {
            ansatz,
            gamma,
            p,
            mixing_rule,
        })
    }

    /// Number of qubit pairs S.
    pub fn pairs(&self) -> usize {
        self.ansatz.pairs()
    }
}

/// Alice parameters plus Bob's per-message parameters. Message â is encoded
/// as an index with qubit 0 in the most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub alice: Vec<f64>,
    pub bob: Vec<Vec<f64>>,
}

impl AngleSet {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self {
            alice: vec![0.0; spec.alice_param_count()],
            bob: vec![vec![0.0; spec.bob_param_count_per_message()]; spec.message_count()],
        }
    }

    pub fn validate(&self, spec: &AnsatzSpec) -> Result<(), Error> {
        if self.alice.len() != spec.alice_param_count()
            || self.bob.len() != spec.message_count()
            || self.bob.iter().any(|b| b.len() != spec.bob_param_count_per_message())
        {
            return Err(Error::ParamCountMismatch {
                expected: spec.alice_param_count()
                    + spec.message_count() * spec.bob_param_count_per_message(),
                got: self.alice.len() + self.bob.iter().map(Vec::len).sum::<usize>(),
            });
        }
        Ok(())
    }

    /// Concatenated parameter vector: Alice first, then Bob by message index.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.alice.clone();
        for b in &self.bob {
            v.extend_from_slice(b);
        }
        v
    }

    pub fn unflatten(spec: &AnsatzSpec, flat: &[f64]) -> Result<Self, Error> {
        let na = spec.alice_param_count();
        let nb = spec.bob_param_count_per_message();
        let expect = na + spec.message_count() * nb;
        if flat.len() != expect {
            return Err(Error::ParamCountMismatch {
                expected: expect,
                got: flat.len(),
            });
        }
        let alice = flat[..na].to_vec();
        let bob = (0..spec.message_count())
            .map(|m| flat[na + m * nb..na + (m + 1) * nb].to_vec())
            .collect();
        Ok(Self { alice, bob })
    }
}

/// One Alice measurement outcome with its conditional Bob-side state.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    /// Outcome bit string a, encoded as an index.
    pub outcome: usize,
    /// P^A_{a|i}
    pub prob: f64,
    /// Normalized conditional state at Bob, or the maximally mixed
    /// placeholder when `negligible` is set.
    pub post_state: DensityMatrix,
    pub negligible: bool,
}

/// ρ_i^{⊗S} with Alice's qubits in the most-significant positions.
pub fn ordered_product_state(i: u8, gamma: f64, s: usize) -> Result<ComplexMatrix, Error> {
    let pair = source_state(i, gamma)?;
    let mut interleaved = pair.matrix().clone();
    for _ in 1..s {
        interleaved = kron(&interleaved, pair.matrix());
    }
    let mut perm = vec![0usize; 2 * s];
    for k in 0..s {
        perm[2 * k] = k;
        perm[2 * k + 1] = s + k;
    }
    permute_qubits(&interleaved, &perm)
}

/// Output state of Alice's circuit on all 2S qubits (Alice qubits first).
pub fn alice_output_state(
    i: u8,
    angles: &AngleSet,
    config: &ProtocolConfig,
) -> Result<DensityMatrix, Error> {
    angles.validate(&config.ansatz)?;
    let s = config.pairs();
    let ordered = ordered_product_state(i, config.gamma, s)?;
    let u = kron(
        &config.ansatz.alice_unitary(&angles.alice)?,
        &ComplexMatrix::identity(1 << s),
    );
    Ok(DensityMatrix::from_valid(ordered.conjugate_by(&u)))
}

/// Projects onto Alice's computational basis: one branch per outcome
/// a ∈ {0,1}^S with its probability and normalized conditional Bob state.
pub fn alice_measure(rho_ab: &DensityMatrix, s: usize) -> Result<Vec<MeasurementBranch>, Error> {
    let db = 1usize << s;
    if rho_ab.dim() != db * db {
        return Err(Error::DimensionMismatch {
            expected: db * db,
            got: rho_ab.dim(),
        });
    }
    let m = rho_ab.matrix();
    let mut branches = Vec::with_capacity(db);
    for a in 0..db {
        // Bob-side block (⟨a|⊗I) ρ (|a⟩⊗I)
        let mut block = ComplexMatrix::zeros(db);
        for k in 0..db {
            for l in 0..db {
                block.set(k, l, m.get(a * db + k, a * db + l));
            }
        }
        let prob = block.trace().re;
        if prob <= NEGLIGIBLE_PROB {
            branches.push(MeasurementBranch {
                outcome: a,
                prob: prob.max(0.0),
                post_state: DensityMatrix::maximally_mixed(db),
                negligible: true,
            });
        } else {
            branches.push(MeasurementBranch {
                outcome: a,
                prob,
                post_state: DensityMatrix::from_valid(block.scale_real(1.0 / prob)),
                negligible: false,
            });
        }
    }
    Ok(branches)
}

/// BSC transition probability p^d (1-p)^{S-d}, d the Hamming distance.
pub fn bsc_prob(a: usize, a_hat: usize, s: usize, p: f64) -> f64 {
    let d = ((a ^ a_hat) & ((1 << s) - 1)).count_ones() as i32;
    p.powi(d) * (1.0 - p).powi(s as i32 - d)
}

/// P^B_{â|i} = Σ_a P_{â|a} P^A_{a|i}
pub fn bob_message_prob(
    i: u8,
    a_hat: usize,
    angles: &AngleSet,
    config: &ProtocolConfig,
) -> Result<f64, Error> {
    let rho = alice_output_state(i, angles, config)?;
    let branches = alice_measure(&rho, config.pairs())?;
    Ok(branches
        .iter()
        .map(|b| bsc_prob(b.outcome, a_hat, config.pairs(), config.p) * b.prob)
        .sum())
}

fn bob_unitaries(angles: &AngleSet, config: &ProtocolConfig) -> Result<Vec<ComplexMatrix>, Error> {
    angles
        .bob
        .iter()
        .map(|b| config.ansatz.bob_unitary(b))
        .collect()
}

/// Bob's final mixed state for true hypothesis `i`, after the BSC and his
/// conditional unitaries.
pub fn bob_final_state(
    i: u8,
    angles: &AngleSet,
    config: &ProtocolConfig,
) -> Result<DensityMatrix, Error> {
    let branches = alice_measure(&alice_output_state(i, angles, config)?, config.pairs())?;
    bob_final_state_from_branches(&branches, angles, config)
}

/// Same as `bob_final_state` but reusing precomputed Alice branches, so the
/// Alice side is not rebuilt when only Bob angles change.
pub fn bob_final_state_from_branches(
    branches: &[MeasurementBranch],
    angles: &AngleSet,
    config: &ProtocolConfig,
) -> Result<DensityMatrix, Error> {
    let s = config.pairs();
    let db = 1usize << s;
    let us = bob_unitaries(angles, config)?;
    let mut out = ComplexMatrix::zeros(db);
    match config.mixing_rule {
        MixingRule::Bayes => {
            for branch in branches {
                if branch.negligible {
                    continue;
                }
                for (a_hat, u) in us.iter().enumerate() {
                    let w = branch.prob * bsc_prob(branch.outcome, a_hat, s, config.p);
                    if w == 0.0 {
                        continue;
                    }
                    out = out.add(&branch.post_state.matrix().conjugate_by(u).scale_real(w));
                }
            }
        }
        MixingRule::Literal => {
            for (a_hat, u) in us.iter().enumerate() {
                // Eq-style two-stage form: ρ^B_{â|i} = Σ_a P_{â|a} σ_{a|i},
                // then reweighted by P^B_{â|i}.
                let mut inner = ComplexMatrix::zeros(db);
                let mut p_b = 0.0;
                for branch in branches {
                    let w = bsc_prob(branch.outcome, a_hat, s, config.p);
                    p_b += w * branch.prob;
                    if branch.negligible {
                        continue;
                    }
                    inner = inner.add(&branch.post_state.matrix().scale_real(w));
                }
                out = out.add(&inner.conjugate_by(u).scale_real(p_b));
            }
        }
    }
    Ok(DensityMatrix::from_valid(out))
}

/// Parity measurement on S qubits: even-weight strings map to outcome 0.
pub fn parity_projectors(s: usize) -> Result<ProjectorSet, Error> {
    if s == 0 {
        return Err(Error::ParameterOutOfRange { name: "S", value: 0.0 });
    }
    let dim = 1usize << s;
    let mut even = ComplexMatrix::zeros(dim);
    let mut odd = ComplexMatrix::zeros(dim);
    for b in 0..dim {
        if b.count_ones() % 2 == 0 {
            even.set(b, b, C64::new(1.0, 0.0));
        } else {
            odd.set(b, b, C64::new(1.0, 0.0));
        }
    }
    ProjectorSet::new(vec![even, odd], vec![0, 1])
}

/// Average success probability over equiprobable hypotheses:
/// ½ Σ_i tr(Π_i ρ_i^B).
pub fn success_probability(angles: &AngleSet, config: &ProtocolConfig) -> Result<f64, Error> {
    let parity = parity_projectors(config.pairs())?;
    let mut total = 0.0;
    for i in 0..2u8 {
        let rho_b = bob_final_state(i, angles, config)?;
        total += born_probability(&rho_b, &parity.projectors()[i as usize])?;
    }
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Success probability given precomputed Alice branches for i = 0, 1.
pub fn success_from_branches(
    branches: &[Vec<MeasurementBranch>; 2],
    angles: &AngleSet,
    config: &ProtocolConfig,
) -> Result<f64, Error> {
    let parity = parity_projectors(config.pairs())?;
    let mut total = 0.0;
    for i in 0..2usize {
        let rho_b = bob_final_state_from_branches(&branches[i], angles, config)?;
        total += born_probability(&rho_b, &parity.projectors()[i])?;
    }
    Ok((0.5 * total).clamp(0.0, 1.0))
}

/// Alice branches for both hypotheses; the Bob-side stages reuse these.
pub fn alice_branches(
    angles: &AngleSet,
    config: &ProtocolConfig,
) -> Result<[Vec<MeasurementBranch>; 2], Error> {
    let b0 = alice_measure(&alice_output_state(0, angles, config)?, config.pairs())?;
    let b1 = alice_measure(&alice_output_state(1, angles, config)?, config.pairs())?;
    Ok([b0, b1])
}

/// Monte Carlo cross-check of the analytic pipeline: samples the hypothesis,
/// Alice's outcome, the BSC flips, and Bob's parity outcome. Deterministic
/// for a fixed seed.
pub fn mc_estimate(
    angles: &AngleSet,
    config: &ProtocolConfig,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64), Error> {
    if n_samples == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "n_samples",
            value: 0.0,
        });
    }
    let s = config.pairs();
    let msgs = 1usize << s;
    let parity = parity_projectors(s)?;
    let odd = &parity.projectors()[1];
    let us = bob_unitaries(angles, config)?;

    // per-hypothesis outcome distribution and odd-parity table over (a, â)
    let mut probs = [vec![0.0; msgs], vec![0.0; msgs]];
    let mut p_odd = [vec![vec![0.0; msgs]; msgs], vec![vec![0.0; msgs]; msgs]];
    for i in 0..2usize {
        let branches = alice_measure(&alice_output_state(i as u8, angles, config)?, s)?;
        for branch in &branches {
            probs[i][branch.outcome] = branch.prob;
            for (a_hat, u) in us.iter().enumerate() {
                let evolved = branch.post_state.evolve(u);
                p_odd[i][branch.outcome][a_hat] = born_probability(&evolved, odd)?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0usize;
    for _ in 0..n_samples {
        let i = usize::from(rng.gen::<bool>());
        // categorical draw of Alice's outcome
        let mut x: f64 = rng.gen();
        let mut a = msgs - 1;
        for (idx, &pr) in probs[i].iter().enumerate() {
            if x < pr {
                a = idx;
                break;
            }
            x -= pr;
        }
        let mut a_hat = a;
        for bit in 0..s {
            if rng.gen::<f64>() < config.p {
                a_hat ^= 1 << bit;
            }
        }
        let i_hat = usize::from(rng.gen::<f64>() < p_odd[i][a][a_hat]);
        if i_hat == i {
            successes += 1;
        }
    }
    let rate = successes as f64 / n_samples as f64;
    let stderr = (rate * (1.0 - rate) / n_samples as f64).sqrt();
    Ok((rate, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzKind;
    use crate::quantum::{bell_state, BellKind, Ket};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn cfg_s1(gamma: f64, p: f64, rule: MixingRule) -> ProtocolConfig {
        ProtocolConfig::new(AnsatzSpec::new(AnsatzKind::S1), gamma, p, rule).unwrap()
    }

    fn cfg_s2(gamma: f64, p: f64) -> ProtocolConfig {
        ProtocolConfig::new(AnsatzSpec::new(AnsatzKind::S2), gamma, p, MixingRule::Bayes).unwrap()
    }

    fn random_angles(spec: &AnsatzSpec, rng: &mut impl Rng) -> AngleSet {
        AngleSet {
            alice: (0..spec.alice_param_count())
                .map(|_| rng.gen::<f64>() * 2.0 * PI)
                .collect(),
            bob: (0..spec.message_count())
                .map(|_| {
                    (0..spec.bob_param_count_per_message())
                        .map(|_| rng.gen::<f64>() * 2.0 * PI)
                        .collect()
                })
                .collect(),
        }
    }

    /// Witness for perfect discrimination at γ = 0, p = 0.
    fn witness_angles() -> AngleSet {
        AngleSet {
            alice: vec![PI / 2.0],
            bob: vec![vec![PI / 2.0], vec![-PI / 2.0]],
        }
    }

    #[test]
    fn alice_output_identity_circuit() {
        let config = cfg_s1(0.3, 0.0, MixingRule::Bayes);
        let angles = AngleSet::zeros(&config.ansatz);
        let out = alice_output_state(0, &angles, &config).unwrap();
        let bell = bell_state(BellKind::Plus).projector();
        assert!(out.matrix().max_abs_diff(bell.matrix()) < 1e-12);
    }

    #[test]
    fn alice_output_s2_fully_damped() {
        let config = cfg_s2(1.0, 0.0);
        let angles = AngleSet::zeros(&config.ansatz);
        let out = alice_output_state(1, &angles, &config).unwrap();
        // θ^A = 0 leaves a CNOT, which fixes |0000>
        let expect = Ket::basis(16, 0).projector();
        assert!(out.matrix().max_abs_diff(expect.matrix()) < 1e-12);
    }

    #[test]
    fn alice_output_valid_state_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..10 {
            let config = cfg_s2(rng.gen(), 0.0);
            let angles = random_angles(&config.ansatz, &mut rng);
            let out = alice_output_state(1, &angles, &config).unwrap();
            DensityMatrix::new(out.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn alice_measure_bell_branches() {
        let config = cfg_s1(0.0, 0.0, MixingRule::Bayes);
        let angles = AngleSet::zeros(&config.ansatz);
        let rho = alice_output_state(0, &angles, &config).unwrap();
        let branches = alice_measure(&rho, 1).unwrap();
        assert_eq!(branches.len(), 2);
        for (a, branch) in branches.iter().enumerate() {
            assert!((branch.prob - 0.5).abs() < 1e-12);
            let expect = Ket::basis(2, a).projector();
            assert!(branch.post_state.matrix().max_abs_diff(expect.matrix()) < 1e-12);
        }
    }

    #[test]
    fn alice_measure_probs_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let config = cfg_s2(rng.gen(), 0.0);
            let angles = random_angles(&config.ansatz, &mut rng);
            let rho = alice_output_state(1, &angles, &config).unwrap();
            let branches = alice_measure(&rho, 2).unwrap();
            let total: f64 = branches.iter().map(|b| b.prob).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn alice_measure_product_basis_state() {
        let config = cfg_s2(1.0, 0.0);
        let angles = AngleSet::zeros(&config.ansatz);
        let rho = alice_output_state(1, &angles, &config).unwrap();
        let branches = alice_measure(&rho, 2).unwrap();
        assert!((branches[0].prob - 1.0).abs() < 1e-12);
        assert!(branches[1].negligible && branches[2].negligible && branches[3].negligible);
    }

    #[test]
    fn bsc_prob_cases() {
        assert!((bsc_prob(0b00, 0b11, 2, 0.3) - 0.09).abs() < 1e-15);
        assert_eq!(bsc_prob(0b01, 0b01, 2, 0.0), 1.0);
        assert_eq!(bsc_prob(0b01, 0b11, 2, 0.0), 0.0);
        for a in 0..4 {
            for a_hat in 0..4 {
                assert!((bsc_prob(a, a_hat, 2, 0.5) - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bob_message_prob_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let config = cfg_s1(0.4, 0.0, MixingRule::Bayes);
        let angles = random_angles(&config.ansatz, &mut rng);
        // p = 0: message distribution equals Alice's outcome distribution
        let rho = alice_output_state(0, &angles, &config).unwrap();
        let branches = alice_measure(&rho, 1).unwrap();
        for a_hat in 0..2 {
            let pm = bob_message_prob(0, a_hat, &angles, &config).unwrap();
            assert!((pm - branches[a_hat].prob).abs() < 1e-12);
        }
        // p = 0.5: uniform
        let config = cfg_s1(0.4, 0.5, MixingRule::Bayes);
        let mut total = 0.0;
        for a_hat in 0..2 {
            let pm = bob_message_prob(1, a_hat, &angles, &config).unwrap();
            assert!((pm - 0.5).abs() < 1e-12);
            total += pm;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixing_rules_agree_at_p_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let gamma: f64 = rng.gen();
            let bayes = cfg_s1(gamma, 0.0, MixingRule::Bayes);
            let literal = cfg_s1(gamma, 0.0, MixingRule::Literal);
            let angles = random_angles(&bayes.ansatz, &mut rng);
            for i in 0..2u8 {
                let a = bob_final_state(i, &angles, &bayes).unwrap();
                let b = bob_final_state(i, &angles, &literal).unwrap();
                assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn bob_state_unit_trace_both_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for rule in [MixingRule::Bayes, MixingRule::Literal] {
            for _ in 0..10 {
                let config = ProtocolConfig::new(
                    AnsatzSpec::new(AnsatzKind::S2),
                    rng.gen(),
                    rng.gen::<f64>() * 0.5,
                    rule,
                )
                .unwrap();
                let angles = random_angles(&config.ansatz, &mut rng);
                for i in 0..2u8 {
                    let rho = bob_final_state(i, &angles, &config).unwrap();
                    // full invariant check: Hermitian, PSD, unit trace
                    DensityMatrix::new(rho.matrix().clone()).unwrap();
                }
            }
        }
    }

    #[test]
    fn witness_gives_pure_zero_state() {
        let config = cfg_s1(0.0, 0.0, MixingRule::Bayes);
        let rho = bob_final_state(0, &witness_angles(), &config).unwrap();
        let expect = Ket::basis(2, 0).projector();
        assert!(rho.matrix().max_abs_diff(expect.matrix()) < 1e-12);
    }

    #[test]
    fn parity_projector_structure() {
        let p1 = parity_projectors(1).unwrap();
        assert_eq!(p1.projectors()[0].get(0, 0).re, 1.0);
        assert_eq!(p1.projectors()[1].get(1, 1).re, 1.0);
        let p2 = parity_projectors(2).unwrap();
        let even = &p2.projectors()[0];
        assert_eq!(even.get(0b00, 0b00).re, 1.0);
        assert_eq!(even.get(0b11, 0b11).re, 1.0);
        assert_eq!(even.get(0b01, 0b01).re, 0.0);
    }

    #[test]
    fn success_probability_landmarks() {
        let config = cfg_s1(0.0, 0.0, MixingRule::Bayes);
        let flat = success_probability(&AngleSet::zeros(&config.ansatz), &config).unwrap();
        assert!((flat - 0.5).abs() < 1e-12);
        let perfect = success_probability(&witness_angles(), &config).unwrap();
        assert!((perfect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn success_probability_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..20 {
            let config = cfg_s2(rng.gen(), rng.gen::<f64>() * 0.5);
            let angles = random_angles(&config.ansatz, &mut rng);
            let v = success_probability(&angles, &config).unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn success_invariant_under_4pi_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let config = cfg_s2(0.6, 0.2);
        let angles = random_angles(&config.ansatz, &mut rng);
        let base = success_probability(&angles, &config).unwrap();
        let mut shifted = angles.clone();
        shifted.alice[0] += 4.0 * PI;
        assert!((success_probability(&shifted, &config).unwrap() - base).abs() < 1e-12);
        let mut shifted = angles.clone();
        shifted.bob[2][0] += 4.0 * PI;
        assert!((success_probability(&shifted, &config).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn success_affine_in_p_for_fixed_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..10 {
            let gamma: f64 = rng.gen();
            let angles = random_angles(&AnsatzSpec::new(AnsatzKind::S1), &mut rng);
            let f = |p: f64| {
                success_probability(&angles, &cfg_s1(gamma, p, MixingRule::Bayes)).unwrap()
            };
            let residual = (f(0.25) - (f(0.0) + f(0.5)) / 2.0).abs();
            assert!(residual < 1e-10, "residual {residual}");
        }
    }

    #[test]
    fn success_at_half_p_ignores_alice_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let config = cfg_s1(0.7, 0.5, MixingRule::Bayes);
        let mut angles = random_angles(&config.ansatz, &mut rng);
        let base = success_probability(&angles, &config).unwrap();
        for _ in 0..5 {
            angles.alice[0] = rng.gen::<f64>() * 2.0 * PI;
            let v = success_probability(&angles, &config).unwrap();
            assert!((v - base).abs() < 1e-10);
        }
    }

    #[test]
    fn mc_estimate_degenerate_and_deterministic() {
        let config = cfg_s1(0.0, 0.0, MixingRule::Bayes);
        let (est, _) = mc_estimate(&witness_angles(), &config, 2000, 7).unwrap();
        assert_eq!(est, 1.0);
        let config = cfg_s1(0.3, 0.2, MixingRule::Bayes);
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let angles = random_angles(&config.ansatz, &mut rng);
        let (a, sa) = mc_estimate(&angles, &config, 5000, 123).unwrap();
        let (b, sb) = mc_estimate(&angles, &config, 5000, 123).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn mc_estimate_matches_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for trial in 0..5 {
            let config = cfg_s1(rng.gen(), rng.gen::<f64>() * 0.5, MixingRule::Bayes);
            let angles = random_angles(&config.ansatz, &mut rng);
            let analytic = success_probability(&angles, &config).unwrap();
            let (est, stderr) = mc_estimate(&angles, &config, 100_000, 1000 + trial).unwrap();
            assert!(
                (analytic - est).abs() <= 4.0 * stderr.max(1e-6),
                "trial {trial}: analytic {analytic} vs {est} ± {stderr}"
            );
        }
    }
}
