//! Fixed-size complex matrices for one and two qubits.
//!
//! Only the dimensions 2 and 4 are used anywhere in the crate, so matrices are
//! stack arrays indexed by a const generic. Basis order is (|H⟩, |V⟩) per qubit
//! and A⊗B for pairs, i.e. |HH⟩, |HV⟩, |VH⟩, |VV⟩.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Serialized as `{"re": [[..]], "im": [[..]]}`; `im` may be omitted for real matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[Complex64; N]; N]);

/// Single-qubit operator.
pub type Op2 = Matrix<2>;
/// Two-qubit operator, A⊗B ordering.
pub type Op4 = Matrix<4>;

impl<const N: usize> Matrix<N> {
    pub fn zero() -> Self {
        Matrix([[C0; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = C1;
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.0[i][j] = Complex64::new(v, 0.0);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Max |M − M†| entrywise.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Real part of Tr(self · other). Exact for Hermitian pairs up to rounding.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let mut acc = C0;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc.re
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues of the Hermitian part of the matrix, ascending.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        if N == 2 {
            let a = self.0[0][0].re;
            let d = self.0[1][1].re;
            let b = (self.0[0][1] + self.0[1][0].conj()) * 0.5;
            let mid = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            return vec![mid - r, mid + r];
        }
        // Real symmetric embedding [[Re, −Im], [Im, Re]] doubles every eigenvalue.
        let n2 = 2 * N;
        let mut s = vec![vec![0.0; n2]; n2];
        for i in 0..N {
            for j in 0..N {
                let h = (self.0[i][j] + self.0[j][i].conj()) * 0.5;
                s[i][j] = h.re;
                s[i + N][j + N] = h.re;
                s[i][j + N] = -h.im;
                s[i + N][j] = h.im;
            }
        }
        let mut ev = jacobi_eigenvalues(s);
        ev.sort_by(|a, b| a.total_cmp(b));
        ev.into_iter().step_by(2).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues_hermitian()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues_hermitian().last().expect("non-empty spectrum")
    }
}

impl Op2 {
    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Op2) -> Op4 {
        let mut m = Op4::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = self.0[i][j] * other.0[k][l];
                    }
                }
            }
        }
        m
    }

    /// Projector onto the linear polarization at `angle_deg` (0° = H, 90° = V).
    pub fn polarization_projector(angle_deg: f64) -> Op2 {
        let (s, c) = angle_deg.to_radians().sin_cos();
        Op2::from_real([[c * c, c * s], [c * s, s * s]])
    }
}

impl Op4 {
    /// Tr_B, leaving the A-side operator.
    pub fn partial_trace_b(&self) -> Op2 {
        let mut m = Op2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[2 * i][2 * j] + self.0[2 * i + 1][2 * j + 1];
            }
        }
        m
    }

    /// Tr_A, leaving the B-side operator.
    pub fn partial_trace_a(&self) -> Op2 {
        let mut m = Op2::zero();
        for k in 0..2 {
            for l in 0..2 {
                m.0[k][l] = self.0[k][l] + self.0[2 + k][2 + l];
            }
        }
        m
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

impl<const N: usize> Serialize for Matrix<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let part = |f: fn(&Complex64) -> f64| self.0.iter().map(|r| r.iter().map(f).collect()).collect();
        MatrixRepr { re: part(|z| z.re), im: Some(part(|z| z.im)) }.serialize(serializer)
    }
}

impl<'de, const N: usize> Deserialize<'de> for Matrix<N> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let check = |rows: &Vec<Vec<f64>>, name: &str| {
            if rows.len() != N || rows.iter().any(|r| r.len() != N) {
                Err(de::Error::custom(format!("`{name}` must be a {N}x{N} array")))
            } else {
                Ok(())
            }
        };
        check(&repr.re, "re")?;
        if let Some(im) = &repr.im {
            check(im, "im")?;
        }
        let mut m = Matrix::zero();
        for i in 0..N {
            for j in 0..N {
                let im = repr.im.as_ref().map_or(0.0, |im| im[i][j]);
                m.0[i][j] = Complex64::new(repr.re[i][j], im);
            }
        }
        Ok(m)
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == C0 {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

// Relative to the Frobenius norm; the absolute eigenvalue error stays well below 1e-12.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi rotations on a real symmetric matrix. Returns the diagonal
/// once the off-diagonal norm drops below `JACOBI_TOL · max(‖A‖, 1)`.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let total: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_TOL * total.max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for (k, (apk, aqk)) in rp.iter().zip(rq.iter()).enumerate() {
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_2x2_matches_pauli_spectrum() {
        let sy = Matrix([[C0, c(0.0, -1.0)], [c(0.0, 1.0), C0]]);
        let ev = sy.eigenvalues_hermitian();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_handles_diagonal_and_complex_entries() {
        let d =
            Op4::from_real([[3.0, 0.0, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0], [0.0, 0.0, 0.0, 2.0]]);
        assert_eq!(d.eigenvalues_hermitian(), vec![-1.0, 0.5, 2.0, 3.0]);

        // σy ⊗ σy has spectrum {−1, −1, 1, 1}; σz ⊗ I + σy ⊗ σy: {−2, 0, 0, 2}
        let sy = Matrix([[C0, c(0.0, -1.0)], [c(0.0, 1.0), C0]]);
        let sz = Op2::from_real([[1.0, 0.0], [0.0, -1.0]]);
        let m = sz.kron(&Op2::identity()) + sy.kron(&sy);
        let ev = m.eigenvalues_hermitian();
        let sq = 2f64.sqrt();
        for (got, want) in ev.iter().zip([-sq, -sq, sq, sq]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn partial_traces_of_product_operator() {
        let a = Op2::polarization_projector(30.0);
        let b = Op2::polarization_projector(100.0);
        let ab = a.kron(&b);
        assert!(ab.partial_trace_b().max_abs_diff(&a) < 1e-15);
        assert!(ab.partial_trace_a().max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn projector_is_idempotent() {
        let p = Op2::polarization_projector(22.5);
        assert!((p * p).max_abs_diff(&p) < 1e-15);
        assert!((p.trace().re - 1.0).abs() < 1e-15);
    }
}
