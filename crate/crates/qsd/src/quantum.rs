//! Quantum primitives: Bell states, the amplitude-damping channel, rotation
//! gates, CNOT, and projective measurement via the Born rule.

use num_complex::Complex64;

use crate::linalg::{hermitian_eig, kron, ComplexMatrix, C64};
use crate::Error;

const HERM_TOL: f64 = 1e-10;
const EIG_FLOOR: f64 = -1e-10;
const TRACE_TOL: f64 = 1e-10;
const PROJ_TOL: f64 = 1e-12;

/// Pure state vector; amplitudes normalized to 1 within 1e-12.
#[derive(Debug, Clone)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, Error> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state |index> in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |psi><psi|
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::outer(&self.amplitudes))
            .expect("projector of a normalized ket is a valid state")
    }
}

/// Hermitian, PSD, unit-trace operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, Error> {
        if !matrix.is_hermitian(HERM_TOL) {
            return Err(Error::NotHermitian);
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace: tr.re });
        }
        let eig = hermitian_eig(&matrix)?;
        if eig.eigenvalues[0] < EIG_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.eigenvalues[0],
            });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for intermediate values whose invariants hold by
    /// construction (unitary conjugation, convex mixtures of valid states).
    pub(crate) fn from_valid(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// U ρ U†
    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        Self::from_valid(self.matrix.conjugate_by(u))
    }
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self, Error> {
        if kraus_ops.is_empty() {
            return Err(Error::EmptyChannel);
        }
        let dim = kraus_ops[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &kraus_ops {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            sum = sum.add(&k.dagger().matmul(k));
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > 1e-12 {
            return Err(Error::IncompleteChannel);
        }
        Ok(Self { kraus_ops })
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, Error> {
        let dim = self.kraus_ops[0].dim();
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(dim);
        for k in &self.kraus_ops {
            out = out.add(&rho.matrix().conjugate_by(k));
        }
        Ok(DensityMatrix::from_valid(out))
    }
}

/// Projective measurement: Hermitian, idempotent, mutually orthogonal
/// projectors resolving the identity.
#[derive(Debug, Clone)]
pub struct ProjectorSet {
    projectors: Vec<ComplexMatrix>,
    labels: Vec<usize>,
}

impl ProjectorSet {
    pub fn new(projectors: Vec<ComplexMatrix>, labels: Vec<usize>) -> Result<Self, Error> {
        if projectors.is_empty() || projectors.len() != labels.len() {
            return Err(Error::BadProjectorSet("empty or mismatched labels"));
        }
        let dim = projectors[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for p in &projectors {
            if !p.is_hermitian(PROJ_TOL) {
                return Err(Error::BadProjectorSet("projector not Hermitian"));
            }
            if p.matmul(p).max_abs_diff(p) > PROJ_TOL {
                return Err(Error::BadProjectorSet("projector not idempotent"));
            }
            sum = sum.add(p);
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > PROJ_TOL {
            return Err(Error::BadProjectorSet("projectors do not resolve identity"));
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let prod = projectors[i].matmul(&projectors[j]);
                if prod.max_abs_diff(&ComplexMatrix::zeros(dim)) > PROJ_TOL {
                    return Err(Error::BadProjectorSet("projectors not orthogonal"));
                }
            }
        }
        Ok(Self { projectors, labels })
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    Plus,
    Minus,
}

/// (|00> ± |11>)/√2
pub fn bell_state(kind: BellKind) -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = match kind {
        BellKind::Plus => 1.0,
        BellKind::Minus => -1.0,
    };
    Ket::new(vec![
        C64::new(s, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(sign * s, 0.0),
    ])
    .expect("bell state is normalized")
}

/// Single-qubit amplitude-damping Kraus pair (E_0, E_1).
pub fn ad_kraus_pair(gamma: f64) -> Result<(ComplexMatrix, ComplexMatrix), Error> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::ParameterOutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    let e0 = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]);
    let e1 = ComplexMatrix::from_real(2, &[0.0, gamma.sqrt(), 0.0, 0.0]);
    Ok((e0, e1))
}

/// Two-qubit product amplitude-damping channel: Kraus operators
/// E_ij = E_i ⊗ E_j.
pub fn ad_channel(gamma: f64) -> Result<KrausChannel, Error> {
    let (e0, e1) = ad_kraus_pair(gamma)?;
    let pair = [e0, e1];
    let mut ops = Vec::with_capacity(4);
    for ei in &pair {
        for ej in &pair {
            ops.push(kron(ei, ej));
        }
    }
    KrausChannel::new(ops)
}

/// Source state for one qubit pair: i=0 → |Φ+><Φ+|, i=1 → AD(γ) of |Φ-><Φ-|.
pub fn source_state(i: u8, gamma: f64) -> Result<DensityMatrix, Error> {
    match i {
        0 => Ok(bell_state(BellKind::Plus).projector()),
        1 => ad_channel(gamma)?.apply(&bell_state(BellKind::Minus).projector()),
        _ => Err(Error::ParameterOutOfRange {
            name: "i",
            value: i as f64,
        }),
    }
}

/// R_Y(θ) = [[cos(θ/2), -sin(θ/2)], [sin(θ/2), cos(θ/2)]]
pub fn ry(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real(2, &[c, -s, s, c])
}

/// R_ZY(θ) = exp(-i θ/2 (Z ⊗ Y)); Z acts on the lower-indexed qubit.
pub fn rzy(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let z = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
    let y = ComplexMatrix::new(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("pauli y");
    let zy = kron(&z, &y);
    // (Z⊗Y)² = I, so the exponential closes: cos(θ/2) I - i sin(θ/2) (Z⊗Y)
    ComplexMatrix::identity(4)
        .scale(C64::new(c, 0.0))
        .add(&zy.scale(C64::new(0.0, -s)))
}

/// CNOT on `n_qubits`, qubit 0 the most significant basis-index bit.
pub fn cnot(control: usize, target: usize, n_qubits: usize) -> Result<ComplexMatrix, Error> {
    if control == target || control >= n_qubits || target >= n_qubits {
        return Err(Error::BadQubitIndex { control, target });
    }
    let dim = 1usize << n_qubits;
    let mut m = ComplexMatrix::zeros(dim);
    for x in 0..dim {
        let cbit = (x >> (n_qubits - 1 - control)) & 1;
        let y = if cbit == 1 {
            x ^ (1usize << (n_qubits - 1 - target))
        } else {
            x
        };
        m.set(y, x, C64::new(1.0, 0.0));
    }
    Ok(m)
}

/// Born rule tr(Π ρ); the imaginary residue must be negligible.
pub fn born_probability(rho: &DensityMatrix, proj: &ComplexMatrix) -> Result<f64, Error> {
    if rho.dim() != proj.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: proj.dim(),
        });
    }
    let t: Complex64 = proj.matmul(rho.matrix()).trace();
    debug_assert!(t.im.abs() <= 1e-12);
    Ok(t.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, partial_trace, Subsystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
        let entries: Vec<C64> = (0..n * n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let m = ComplexMatrix::new(n, entries).unwrap();
        let psd = m.matmul(&m.dagger());
        let tr = psd.trace().re;
        DensityMatrix::new(psd.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn bell_states_amplitudes_and_orthogonality() {
        let s = 1.0 / 2f64.sqrt();
        let plus = bell_state(BellKind::Plus);
        let minus = bell_state(BellKind::Minus);
        assert!((plus.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((plus.amplitudes()[3].re - s).abs() < 1e-15);
        assert!((minus.amplitudes()[3].re + s).abs() < 1e-15);
        assert!(plus.inner(&minus).norm() < 1e-15);
        assert!((plus.projector().matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ad_channel_at_zero_is_identity() {
        let ch = ad_channel(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let rho = random_density(&mut rng, 4);
        let out = ch.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn ad_channel_at_one_breaks_bell_minus() {
        let out = source_state(1, 1.0).unwrap();
        let ground = Ket::basis(4, 0).projector();
        assert!(out.matrix().max_abs_diff(ground.matrix()) < 1e-12);
    }

    #[test]
    fn ad_single_qubit_on_excited_state() {
        let gamma = 0.3;
        let (e0, e1) = ad_kraus_pair(gamma).unwrap();
        let excited = ComplexMatrix::outer(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let out = excited.conjugate_by(&e0).add(&excited.conjugate_by(&e1));
        let expect = ComplexMatrix::from_real(2, &[gamma, 0.0, 0.0, 1.0 - gamma]);
        assert!(out.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn ad_channel_rejects_bad_gamma() {
        assert!(ad_channel(-0.1).is_err());
        assert!(ad_channel(1.1).is_err());
    }

    #[test]
    fn channel_preserves_state_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let gamma: f64 = rng.gen();
            let ch = ad_channel(gamma).unwrap();
            let rho = random_density(&mut rng, 4);
            let out = ch.apply(&rho).unwrap();
            // re-validate: Hermitian, PSD, unit trace
            DensityMatrix::new(out.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn ad_completeness_on_gamma_grid() {
        for k in 0..=20 {
            let gamma = k as f64 / 20.0;
            ad_channel(gamma).unwrap(); // constructor checks Σ E†E = I
            let rho = source_state(1, gamma).unwrap();
            DensityMatrix::new(rho.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn source_state_zero_is_gamma_independent() {
        let a = source_state(0, 0.0).unwrap();
        let b = source_state(0, 0.7).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
        let c = source_state(1, 0.0).unwrap();
        let minus = bell_state(BellKind::Minus).projector();
        assert!(c.matrix().max_abs_diff(minus.matrix()) < 1e-12);
    }

    #[test]
    fn ry_values_and_inverse() {
        assert!(ry(0.0).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let half_turn = ry(PI);
        let expect = ComplexMatrix::from_real(2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(half_turn.max_abs_diff(&expect) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let t: f64 = rng.gen::<f64>() * 4.0 * PI - 2.0 * PI;
            let u = ry(t);
            assert!(u.matmul(&ry(-t)).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
            assert!(u.dagger().matmul(&u).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn rzy_closed_form_and_group_law() {
        assert!(rzy(0.0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        // rzy(π) = -i (Z⊗Y)
        let zy = {
            let z = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
            let y = ComplexMatrix::new(
                2,
                vec![
                    C64::new(0.0, 0.0),
                    C64::new(0.0, -1.0),
                    C64::new(0.0, 1.0),
                    C64::new(0.0, 0.0),
                ],
            )
            .unwrap();
            kron(&z, &y)
        };
        assert!(rzy(PI).max_abs_diff(&zy.scale(C64::new(0.0, -1.0))) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let (t1, t2): (f64, f64) = (rng.gen::<f64>() * 6.0, rng.gen::<f64>() * 6.0);
            let lhs = rzy(t1).matmul(&rzy(t2));
            assert!(lhs.max_abs_diff(&rzy(t1 + t2)) < 1e-12);
            let u = rzy(t1);
            assert!(u.dagger().matmul(&u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        }
    }

    #[test]
    fn cnot_action_and_involution() {
        let u = cnot(0, 1, 2).unwrap();
        let on10 = u.apply(Ket::basis(4, 0b10).amplitudes());
        assert!((on10[0b11].re - 1.0).abs() < 1e-15);
        let on00 = u.apply(Ket::basis(4, 0b00).amplitudes());
        assert!((on00[0b00].re - 1.0).abs() < 1e-15);
        assert!(u.matmul(&u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        assert!(cnot(1, 1, 2).is_err());
        assert!(cnot(0, 2, 2).is_err());
    }

    #[test]
    fn born_rule_on_bell_state() {
        let rho = bell_state(BellKind::Plus).projector();
        // Π_{a=0}^A = |0><0| ⊗ I
        let p0 = kron(
            &ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]),
            &ComplexMatrix::identity(2),
        );
        assert!((born_probability(&rho, &p0).unwrap() - 0.5).abs() < 1e-12);
        assert!((born_probability(&rho, &ComplexMatrix::identity(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_set_completeness_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let rho = random_density(&mut rng, 4);
        let projs: Vec<ComplexMatrix> = (0..4)
            .map(|k| ComplexMatrix::outer(Ket::basis(4, k).amplitudes()))
            .collect();
        let set = ProjectorSet::new(projs, vec![0, 1, 2, 3]).unwrap();
        let total: f64 = set
            .projectors()
            .iter()
            .map(|p| born_probability(&rho, p).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_set_rejects_non_projector() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(ProjectorSet::new(vec![half.clone(), half], vec![0, 1]).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell_state(BellKind::Plus).projector();
        let marg = partial_trace(rho.matrix(), 1, 1, Subsystem::A).unwrap();
        assert!(marg.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-12);
        let eig = hermitian_eig(rho.matrix()).unwrap();
        assert!(eig.eigenvalues[3] > 1.0 - 1e-12);
    }
}
