use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance used for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-14;

/// Dense complex matrix of dimension 2 or 3, stored row-major in a fixed
/// 3×3 buffer. Entries outside `dim × dim` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: [[Complex64; 3]; 3],
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            dim,
            entries: [[ZERO; 3]; 3],
        })
    }

    pub fn from_rows2(rows: [[Complex64; 2]; 2]) -> Self {
        let mut entries = [[ZERO; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            entries[i][..2].copy_from_slice(row);
        }
        Self { dim: 2, entries }
    }

    pub fn from_rows3(rows: [[Complex64; 3]; 3]) -> Self {
        Self {
            dim: 3,
            entries: rows,
        }
    }

    /// Build from a row-major slice of `dim * dim` entries.
    pub fn from_row_major(dim: usize, data: &[Complex64]) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        if data.len() != dim * dim {
            return Err(Error::BadInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i][j] = data[i * dim + j];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(i < self.dim && j < self.dim, "index out of range");
        self.entries[i][j] = value;
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.indices()
            .map(|(i, j)| self.entries[i][j].norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm; an upper bound for the spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.indices()
            .map(|(i, j)| self.entries[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i][i]).sum()
    }

    /// `max |H[i][j] - conj(H[j][i])|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        self.indices()
            .map(|(i, j)| (self.entries[i][j] - self.entries[j][i].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_asymmetry() <= HERMITIAN_TOL * (1.0 + self.max_norm())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (i, slot) in out.iter_mut().enumerate().take(self.dim) {
            *slot = (0..self.dim).map(|j| self.entries[i][j] * v[j]).sum();
        }
        out
    }

    fn indices(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.dim;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    dim: usize,
    values: [f64; 3],
    vectors: [[Complex64; 3]; 3],
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    /// Unit eigenvector belonging to `values()[k]`.
    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k][..self.dim]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Complex64]> + '_ {
        (0..self.dim).map(move |k| self.vector(k))
    }
}

/// Diagonalize a 2×2 or 3×3 Hermitian matrix with cyclic complex Jacobi
/// rotations.
///
/// Each returned eigenvector has its largest-modulus component real and
/// positive; among components whose moduli agree to within a relative 1e-12
/// the lowest index wins.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenSystem> {
    let asymmetry = h.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOL * (1.0 + h.max_norm()) {
        return Err(Error::NotHermitian { asymmetry });
    }
    let n = h.dim;

    // Work on the exactly Hermitian part.
    let mut a = [[ZERO; 3]; 3];
    for i in 0..n {
        a[i][i] = Complex64::new(h.entries[i][i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (h.entries[i][j] + h.entries[j][i].conj()) * 0.5;
            a[i][j] = avg;
            a[j][i] = avg.conj();
        }
    }
    let mut v = [[ZERO; 3]; 3];
    for (i, row) in v.iter_mut().enumerate().take(n) {
        row[i] = ONE;
    }

    let scale = h.frobenius_norm();
    if scale > 0.0 {
        for _sweep in 0..64 {
            let off: f64 = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j].norm_sqr())
                .sum();
            if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, n, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].re.total_cmp(&a[y][y].re));

    let mut values = [0.0; 3];
    let mut vectors = [[ZERO; 3]; 3];
    for (k, &col) in order.iter().enumerate() {
        values[k] = a[col][col].re;
        let mut vec = [ZERO; 3];
        for i in 0..n {
            vec[i] = v[i][col];
        }
        fix_phase(&mut vec[..n]);
        vectors[k] = vec;
    }
    Ok(EigenSystem {
        dim: n,
        values,
        vectors,
    })
}

/// Annihilate `a[p][q]` with a unitary plane rotation `J = Φ·P`, where `Φ`
/// makes the pivot real and `P` is the classical real Jacobi rotation.
/// Accumulates `v ← v·J`.
fn rotate(a: &mut [[Complex64; 3]; 3], v: &mut [[Complex64; 3]; 3], n: usize, p: usize, q: usize) {
    let mag = a[p][q].norm();
    if mag == 0.0 {
        return;
    }
    let unphase = a[p][q].conj() / mag;
    let theta = (a[q][q].re - a[p][p].re) / (2.0 * mag);
    if theta.is_infinite() {
        return;
    }
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = unphase * -s;
    let jqq = unphase * c;

    for i in 0..n {
        let (aip, aiq) = (a[i][p], a[i][q]);
        a[i][p] = aip * jpp + aiq * jqp;
        a[i][q] = aip * jpq + aiq * jqq;
    }
    for j in 0..n {
        let (apj, aqj) = (a[p][j], a[q][j]);
        a[p][j] = jpp.conj() * apj + jqp.conj() * aqj;
        a[q][j] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    a[p][q] = ZERO;
    a[q][p] = ZERO;
    a[p][p] = Complex64::new(a[p][p].re, 0.0);
    a[q][q] = Complex64::new(a[q][q].re, 0.0);

    for row in v.iter_mut().take(n) {
        let (vip, viq) = (row[p], row[q]);
        row[p] = vip * jpp + viq * jqp;
        row[q] = vip * jpq + viq * jqq;
    }
}

fn fix_phase(vec: &mut [Complex64]) {
    let norm = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let max = vec.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = vec
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let z = vec[pivot];
    let rot = if z.norm() > 0.0 {
        z.conj() / z.norm()
    } else {
        ONE
    };
    for x in vec.iter_mut() {
        *x = *x * rot / norm;
    }
    vec[pivot] = Complex64::new(vec[pivot].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_level(rc: f64, r: f64, phi: f64) -> ComplexMatrix {
        let off = Complex64::from_polar(r, phi);
        ComplexMatrix::from_rows2([[c(rc, 0.0), off], [off.conj(), c(-rc, 0.0)]])
    }

    #[test]
    fn diagonal_two_level() {
        for phi in [0.0, 1.3, -2.0] {
            let es = eig_hermitian(&two_level(1.0, 0.0, phi)).unwrap();
            assert_eq!(es.values(), &[-1.0, 1.0]);
        }
    }

    #[test]
    fn pythagorean_two_level() {
        // λ² = Rc² + r² = 25
        let es = eig_hermitian(&two_level(3.0, 4.0, 0.7)).unwrap();
        assert!((es.values()[0] + 5.0).abs() < 1e-13);
        assert!((es.values()[1] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows2([[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
        let m =
            ComplexMatrix::from_rows2([[c(1.0, 1e-3), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_values_keep_orthonormal_vectors() {
        let m = ComplexMatrix::from_rows3([
            [c(2.0, 0.0), ZERO, ZERO],
            [ZERO, c(2.0, 0.0), ZERO],
            [ZERO, ZERO, c(-1.0, 0.0)],
        ]);
        let es = eig_hermitian(&m).unwrap();
        assert_eq!(es.values(), &[-1.0, 2.0, 2.0]);
        for j in 0..3 {
            for k in 0..3 {
                let dot: Complex64 = es
                    .vector(j)
                    .iter()
                    .zip(es.vector(k))
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((dot - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_matrix() {
        let es = eig_hermitian(&ComplexMatrix::zeros(3).unwrap()).unwrap();
        assert_eq!(es.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn phase_convention_largest_component_real_positive() {
        let es = eig_hermitian(&two_level(0.3, 2.0, 2.1)).unwrap();
        for v in es.vectors() {
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let k = v
                .iter()
                .position(|z| z.norm() >= max * (1.0 - 1e-12))
                .unwrap();
            assert!(v[k].re > 0.0 && v[k].im == 0.0);
        }
    }

    #[test]
    fn tie_broken_by_lowest_index() {
        // Rc = 0: both components of each eigenvector have modulus 1/√2.
        let es = eig_hermitian(&two_level(0.0, 1.0, 0.9)).unwrap();
        for v in es.vectors() {
            assert_eq!(v[0].im, 0.0);
            assert!(v[0].re > 0.0);
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert_eq!(ComplexMatrix::zeros(4), Err(Error::UnsupportedDimension(4)));
        assert!(ComplexMatrix::from_row_major(2, &[ZERO; 3]).is_err());
    }
}
