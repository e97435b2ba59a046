//! Dense complex matrices, a cyclic Jacobi eigensolver for Hermitian input,
//! and the real/imaginary and positive/negative part decompositions.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Hermitian check: ‖H − H*‖_F ≤ HERMITIAN_TOL · (1 + ‖H‖_F).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Jacobi stops once off-diagonal Frobenius mass ≤ JACOBI_TOL · (1 + ‖H‖_F).
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues with |t| ≤ SPECTRAL_ZERO · ‖H‖_F count as zero when splitting.
pub const SPECTRAL_ZERO: f64 = 1e-12;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must form a square array"));
        }
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(CMatrix { n, data })
    }

    /// Real matrix from row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n);
        CMatrix {
            n,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn fill_zero(&mut self) {
        self.data.fill(ZERO);
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| c * z).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        assert_eq!(n, other.n, "matrix size mismatch");
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// ‖H − H*‖_F
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL * (1.0 + self.frobenius_norm())
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Spectral decomposition H = U diag(λ) U* with λ ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors.
    pub vectors: CMatrix,
}

impl HermEig {
    /// U diag(f(λ)) U*
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let u = &self.vectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n);
        for (k, &fk) in fl.iter().enumerate() {
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += uik * u[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.size();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermEig> {
    let n = h.size();
    let norm = h.frobenius_norm();
    if !norm.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    if h.hermitian_defect() > HERMITIAN_TOL * (1.0 + norm) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {:.3e})",
            h.hermitian_defect()
        )));
    }

    // Work on the exactly Hermitian part so rotations keep the symmetry.
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let target = JACOBI_TOL * (1.0 + norm);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (n = {n})"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermEig { eigenvalues, vectors })
}

/// One Jacobi step annihilating a[p][q]. With a_pq = b·e^{iφ}, the unitary
/// block [[c, s], [−s·e^{−iφ}, c·e^{−iφ}]] first makes the pair real, then
/// rotates it away.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.size();
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already negligible against the diagonal.
    if b < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let e = apq / b;
    let ec = e.conj();
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // A ← A U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
    }
    // A ← U* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * b, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * b, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
}

/// Re(T) = (T + T*)/2
pub fn real_part(t: &CMatrix) -> CMatrix {
    let n = t.size();
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (t[(i, j)] + t[(j, i)].conj()) * 0.5;
        }
    }
    out
}

/// Im(T) = (T − T*)/(2i)
pub fn imag_part(t: &CMatrix) -> CMatrix {
    let n = t.size();
    let mut out = CMatrix::zeros(n);
    let half_i = Complex64::new(0.0, -0.5);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (t[(i, j)] - t[(j, i)].conj()) * half_i;
        }
    }
    out
}

/// Spectral split of a Hermitian matrix: eigenvalues at or below the zero
/// threshold belong to neither part.
#[derive(Clone, Debug)]
pub struct SignSplit {
    pub eig: HermEig,
    pub threshold: f64,
}

impl SignSplit {
    pub fn new(h: &CMatrix) -> Result<Self> {
        let threshold = SPECTRAL_ZERO * h.frobenius_norm();
        Ok(SignSplit { eig: hermitian_eig(h)?, threshold })
    }

    pub fn positive_value(&self, l: f64) -> f64 {
        if l > self.threshold {
            l
        } else {
            0.0
        }
    }

    pub fn negative_value(&self, l: f64) -> f64 {
        if l < -self.threshold {
            -l
        } else {
            0.0
        }
    }

    pub fn pos(&self) -> CMatrix {
        self.eig.apply(|l| self.positive_value(l))
    }

    pub fn neg(&self) -> CMatrix {
        self.eig.apply(|l| self.negative_value(l))
    }

    pub fn abs(&self) -> CMatrix {
        self.eig.apply(|l| self.positive_value(l) + self.negative_value(l))
    }

    /// (Tr H⁺, Tr H⁻)
    pub fn traces(&self) -> (f64, f64) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for &l in &self.eig.eigenvalues {
            pos += self.positive_value(l);
            neg += self.negative_value(l);
        }
        (pos, neg)
    }
}

/// H⁺ = (H + |H|)/2
pub fn pos_part(h: &CMatrix) -> Result<CMatrix> {
    Ok(SignSplit::new(h)?.pos())
}

/// H⁻ = (|H| − H)/2
pub fn neg_part(h: &CMatrix) -> Result<CMatrix> {
    Ok(SignSplit::new(h)?.neg())
}

/// |H| = U |D| U*
pub fn abs_part(h: &CMatrix) -> Result<CMatrix> {
    Ok(SignSplit::new(h)?.abs())
}

/// Tr|T| = Σ singular values. Hermitian input uses Σ|λ|; otherwise the
/// square roots of the spectrum of T*T.
pub fn trace_abs(t: &CMatrix) -> Result<f64> {
    if t.is_hermitian() {
        let split = SignSplit::new(t)?;
        let (p, n) = split.traces();
        return Ok(p + n);
    }
    let gram = t.adjoint().matmul(t);
    let eig = hermitian_eig(&gram)?;
    Ok(eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum())
}
