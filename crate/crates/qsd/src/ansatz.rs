//! Circuit families for the two protocol sizes: the single-pair R_Y ansatz
//! and the two-pair R_ZY + CNOT ansatz, plus the closed-form single-pair
//! reference angles.

use crate::linalg::ComplexMatrix;
use crate::protocol::AngleSet;
use crate::quantum::{cnot, ry, rzy};
use crate::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnsatzKind {
    /// One qubit pair, R_Y rotations on both sides.
    S1,
    /// Two qubit pairs, R_ZY rotation plus CNOT on both sides.
    S2,
}

/// CNOT wiring for the two-pair ansatz. The circuit figure leaves the
/// orientation open; optimization compensates for either choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CnotConvention {
    /// control = lower-indexed qubit, target = higher-indexed (default)
    ControlLow,
    /// control = higher-indexed qubit, target = lower-indexed
    ControlHigh,
}

impl CnotConvention {
    fn control_target(self) -> (usize, usize) {
        match self {
            CnotConvention::ControlLow => (0, 1),
            CnotConvention::ControlHigh => (1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub cnot: CnotConvention,
}

impl AnsatzSpec {
    pub fn new(kind: AnsatzKind) -> Self {
        Self {
            kind,
            cnot: CnotConvention::ControlLow,
        }
    }

    pub fn with_cnot(kind: AnsatzKind, cnot: CnotConvention) -> Self {
        Self { kind, cnot }
    }

    pub fn pairs(&self) -> usize {
        match self.kind {
            AnsatzKind::S1 => 1,
            AnsatzKind::S2 => 2,
        }
    }

    pub fn alice_param_count(&self) -> usize {
        1
    }

    pub fn bob_param_count_per_message(&self) -> usize {
        1
    }

    pub fn message_count(&self) -> usize {
        1 << self.pairs()
    }

    fn check_params(&self, theta: &[f64], expect: usize) -> Result<(), Error> {
        if theta.len() != expect {
            return Err(Error::ParamCountMismatch {
                expected: expect,
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// Alice's local unitary on her S qubits. Two-pair circuit order is
    /// rotation first, then CNOT.
    pub fn alice_unitary(&self, theta_a: &[f64]) -> Result<ComplexMatrix, Error> {
        self.check_params(theta_a, self.alice_param_count())?;
        match self.kind {
            AnsatzKind::S1 => Ok(ry(theta_a[0])),
            AnsatzKind::S2 => {
                let (c, t) = self.cnot.control_target();
                Ok(cnot(c, t, 2)?.matmul(&rzy(theta_a[0])))
            }
        }
    }

    /// Bob's conditional unitary for one received message. Two-pair circuit
    /// order is CNOT first, then rotation.
    pub fn bob_unitary(&self, theta_b: &[f64]) -> Result<ComplexMatrix, Error> {
        self.check_params(theta_b, self.bob_param_count_per_message())?;
        match self.kind {
            AnsatzKind::S1 => Ok(ry(theta_b[0])),
            AnsatzKind::S2 => {
                let (c, t) = self.cnot.control_target();
                Ok(rzy(theta_b[0]).matmul(&cnot(c, t, 2)?))
            }
        }
    }
}

/// Closed-form single-pair reference angles:
/// θ^A = π/2, θ^B_â = (-1)^â (π - arctan α), α = (2 - γ)/2.
pub fn loccnet_reference_angles(gamma: f64) -> Result<AngleSet, Error> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::ParameterOutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    let alpha = (2.0 - gamma) / 2.0;
    let base = std::f64::consts::PI - alpha.atan();
    Ok(AngleSet {
        alice: vec![std::f64::consts::FRAC_PI_2],
        bob: vec![vec![base], vec![-base]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn s1_zero_angle_is_identity() {
        let spec = AnsatzSpec::new(AnsatzKind::S1);
        let u = spec.alice_unitary(&[0.0]).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let v = spec.bob_unitary(&[0.0]).unwrap();
        assert!(v.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn s2_zero_angle_collapses_to_cnot() {
        let spec = AnsatzSpec::new(AnsatzKind::S2);
        let expect = cnot(0, 1, 2).unwrap();
        assert!(spec.alice_unitary(&[0.0]).unwrap().max_abs_diff(&expect) < 1e-15);
        assert!(spec.bob_unitary(&[0.0]).unwrap().max_abs_diff(&expect) < 1e-15);

        let rev = AnsatzSpec::with_cnot(AnsatzKind::S2, CnotConvention::ControlHigh);
        let expect_rev = cnot(1, 0, 2).unwrap();
        assert!(rev.alice_unitary(&[0.0]).unwrap().max_abs_diff(&expect_rev) < 1e-15);
    }

    #[test]
    fn unitarity_random_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for spec in [AnsatzSpec::new(AnsatzKind::S1), AnsatzSpec::new(AnsatzKind::S2)] {
            let dim = 1 << spec.pairs();
            for _ in 0..20 {
                let t: f64 = rng.gen::<f64>() * 4.0 * PI;
                let u = spec.alice_unitary(&[t]).unwrap();
                assert!(u.dagger().matmul(&u).max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-12);
                let v = spec.bob_unitary(&[t]).unwrap();
                assert!(v.matmul(&v.dagger()).max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-12);
            }
        }
    }

    #[test]
    fn param_count_enforced() {
        let spec = AnsatzSpec::new(AnsatzKind::S1);
        assert!(spec.alice_unitary(&[0.0, 1.0]).is_err());
        assert!(spec.bob_unitary(&[]).is_err());
    }

    #[test]
    fn reference_angles_endpoints() {
        let a = loccnet_reference_angles(0.0).unwrap();
        assert!((a.alice[0] - PI / 2.0).abs() < 1e-15);
        assert!((a.bob[0][0] - 3.0 * PI / 4.0).abs() < 1e-12); // π - arctan 1
        assert!((a.bob[1][0] + 3.0 * PI / 4.0).abs() < 1e-12);

        let b = loccnet_reference_angles(1.0).unwrap();
        assert!((b.bob[0][0] - (PI - 0.5f64.atan())).abs() < 1e-12);
    }

    #[test]
    fn reference_angles_alpha_monotone_and_bounded() {
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let gamma = k as f64 / 20.0;
            let angles = loccnet_reference_angles(gamma).unwrap();
            for v in angles
                .alice
                .iter()
                .chain(angles.bob.iter().flatten())
            {
                assert!(v.is_finite());
                assert!(*v > -PI && *v <= PI);
            }
            // α = (2-γ)/2 decreasing in γ means θ^B_0 = π - arctan α increasing
            let alpha = (PI - angles.bob[0][0]).tan();
            assert!(alpha < prev + 1e-12);
            prev = alpha;
        }
    }
}
