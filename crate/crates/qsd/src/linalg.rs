//! Dense complex linear algebra for small qubit operators (dim <= 64).
//!
//! Everything here is written directly against row-major `Vec<Complex64>`
//! storage; at a 16x16 ceiling there is nothing to gain from sparsity or
//! an external solver.

use num_complex::Complex64;

use crate::Error;

pub type C64 = Complex64;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

/// Which tensor factor a bipartite operation acts on. Subsystem A occupies
/// the most-significant qubit positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Eigendecomposition of a Hermitian matrix: `h = V diag(eigenvalues) V†`,
/// eigenvalues in non-decreasing order.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self, Error> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from real entries (imaginary parts zero).
    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            entries: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Rank-one projector |v><v| (v need not be normalized).
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Applies this matrix to a vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.dagger())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest |entry| difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.set(i * nb + k, j * nb + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product over a slice of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!factors.is_empty());
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = kron(&acc, f);
    }
    acc
}

fn check_bipartite(m: &ComplexMatrix, qubits_a: usize, qubits_b: usize) -> Result<(), Error> {
    let expect = 1usize << (qubits_a + qubits_b);
    if m.dim() != expect {
        return Err(Error::DimensionMismatch {
            expected: expect,
            got: m.dim(),
        });
    }
    Ok(())
}

/// Partial trace over one subsystem of a bipartite operator. Subsystem A
/// holds the `qubits_a` most-significant qubit positions.
pub fn partial_trace(
    m: &ComplexMatrix,
    qubits_a: usize,
    qubits_b: usize,
    over: Subsystem,
) -> Result<ComplexMatrix, Error> {
    check_bipartite(m, qubits_a, qubits_b)?;
    let da = 1usize << qubits_a;
    let db = 1usize << qubits_b;
    match over {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(db);
            for k in 0..db {
                for l in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..da {
                        acc += m.get(i * db + k, i * db + l);
                    }
                    out.set(k, l, acc);
                }
            }
            Ok(out)
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(da);
            for i in 0..da {
                for j in 0..da {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..db {
                        acc += m.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
    }
}

/// Partial transpose over subsystem B: |i><j| ⊗ |k><l|  →  |i><j| ⊗ |l><k|.
pub fn partial_transpose(
    m: &ComplexMatrix,
    qubits_a: usize,
    qubits_b: usize,
) -> Result<ComplexMatrix, Error> {
    check_bipartite(m, qubits_a, qubits_b)?;
    let da = 1usize << qubits_a;
    let db = 1usize << qubits_b;
    let mut out = ComplexMatrix::zeros(m.dim());
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + l, j * db + k, m.get(i * db + k, j * db + l));
                }
            }
        }
    }
    Ok(out)
}

/// Relabels qubits: the qubit at position `k` of the input moves to position
/// `perm[k]` of the output. Qubit 0 is the most significant bit of the
/// computational-basis index.
pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix, Error> {
    let n_qubits = perm.len();
    if m.dim() != 1usize << n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1usize << n_qubits,
            got: m.dim(),
        });
    }
    let mut seen = vec![false; n_qubits];
    for &p in perm {
        if p >= n_qubits || seen[p] {
            return Err(Error::InvalidPermutation);
        }
        seen[p] = true;
    }
    let dim = m.dim();
    // basis index map: bit k of x (counting from MSB) -> bit perm[k] of y
    let mut index_map = vec![0usize; dim];
    for x in 0..dim {
        let mut y = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            let bit = (x >> (n_qubits - 1 - k)) & 1;
            y |= bit << (n_qubits - 1 - p);
        }
        index_map[x] = y;
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.set(index_map[i], index_map[j], m.get(i, j));
        }
    }
    Ok(out)
}

const HERMITIAN_TOL: f64 = 1e-12;
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigDecomposition, Error> {
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian);
    }
    let n = h.dim();
    let mut a = h.clone();
    // force exact Hermitian symmetry so rotations stay consistent
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
        let d = a.get(i, i);
        a.set(i, i, C64::new(d.re, 0.0));
    }
    let mut v = ComplexMatrix::identity(n);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += a.get(i, j).norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        if off <= JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= JACOBI_OFF_TOL / (n as f64) {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // unitary U: identity except
                //   U[p][p] = c, U[p][q] = s*phase, U[q][p] = -s*conj(phase), U[q][q] = c
                // update A <- U† A U, columns then rows
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c - aiq * s * phase.conj());
                    a.set(i, q, aip * s * phase + aiq * c);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c - aqj * s * phase);
                    a.set(q, j, apj * s * phase.conj() + aqj * c);
                }
                // rounding can leave a tiny imaginary residue on the diagonal
                let dp = a.get(p, p);
                let dq = a.get(q, q);
                a.set(p, p, C64::new(dp.re, 0.0));
                a.set(q, q, C64::new(dq.re, 0.0));
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * s * phase.conj());
                    v.set(i, q, vip * s * phase + viq * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

impl EigDecomposition {
    /// V diag(f(λ)) V†
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    let add = v.get(i, k) * v.get(j, k).conj() * fl;
                    let cur = out.get(i, j);
                    out.set(i, j, cur + add);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x)
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(h: &ComplexMatrix) -> Result<f64, Error> {
    let eig = hermitian_eig(h)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}
