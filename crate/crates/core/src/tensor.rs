//! Dense complex linear algebra over composite finite-dimensional spaces.
//!
//! Site ordering follows ket labels read left to right: site 0 is the
//! slowest-varying index of the flattened amplitude vector.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                what: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &[Complex<T>], bra: &[Complex<T>]) -> Self {
        Self::from_fn(ket.len(), bra.len(), |r, c| ket[r] * bra[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut dev = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    /// Integer power of a square matrix; `pow(0)` is the identity.
    pub fn pow(&self, n: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(result)
    }

    /// `self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// Converts entries to another precision.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| {
                    Complex::new(
                        U::from(z.re).unwrap_or_else(U::nan),
                        U::from(z.im).unwrap_or_else(U::nan),
                    )
                })
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = Matrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a[(ar, ac)];
            if s.is_zero() {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = s * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a, T: Real>(factors: impl IntoIterator<Item = &'a Matrix<T>>) -> Matrix<T> {
    factors
        .into_iter()
        .fold(Matrix::identity(1), |acc, f| kron(&acc, f))
}

/// Places `op` on `site` with identities on every other factor of `dims`.
pub fn embed_local<T: Real>(op: &Matrix<T>, site: usize, dims: &[usize]) -> Result<Matrix<T>> {
    check_local(op, site, dims)?;
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    Ok(kron(&kron(&Matrix::identity(left), op), &Matrix::identity(right)))
}

fn check_local<T: Real>(op: &Matrix<T>, site: usize, dims: &[usize]) -> Result<()> {
    if site >= dims.len() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: dims.len(),
        });
    }
    if !op.is_square() || op.rows != dims[site] {
        return Err(Error::DimensionMismatch {
            expected: dims[site],
            found: op.rows,
        });
    }
    Ok(())
}

/// Applies a single-site operator to a flattened amplitude vector without
/// materializing the full embedded matrix.
pub fn apply_local<T: Real>(
    op: &Matrix<T>,
    site: usize,
    dims: &[usize],
    amps: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    check_local(op, site, dims)?;
    let total: usize = dims.iter().product();
    if amps.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: amps.len(),
        });
    }
    let d = dims[site];
    let stride: usize = dims[site + 1..].iter().product();
    let block = d * stride;
    let mut out = vec![Complex::zero(); total];
    for base in (0..total).step_by(block) {
        for inner in 0..stride {
            for r in 0..d {
                let mut acc = Complex::zero();
                for c in 0..d {
                    let m = op[(r, c)];
                    if !m.is_zero() {
                        acc += m * amps[base + c * stride + inner];
                    }
                }
                out[base + r * stride + inner] = acc;
            }
        }
    }
    Ok(out)
}

/// `⟨a|b⟩`
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
}

/// Pure state over a composite space of qudits or truncated modes.
#[derive(Clone, Debug, PartialEq)]
pub struct State<T: Real> {
    dims: Vec<usize>,
    amps: Vec<Complex<T>>,
}

impl<T: Real> State<T> {
    /// Validates that `amps` is unit-norm over `dims`.
    pub fn new(dims: Vec<usize>, amps: Vec<Complex<T>>) -> Result<Self> {
        Self::check_shape(&dims, &amps)?;
        let n = norm_sqr(&amps);
        if (n - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::NotNormalized(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { dims, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: Vec<usize>, mut amps: Vec<Complex<T>>) -> Result<Self> {
        Self::check_shape(&dims, &amps)?;
        let n = norm_sqr(&amps).sqrt();
        if n.is_zero() || !n.is_finite() {
            return Err(Error::NotNormalized(0.0));
        }
        let inv = T::one() / n;
        for a in &mut amps {
            *a = a.scale(inv);
        }
        Ok(Self { dims, amps })
    }

    fn check_shape(dims: &[usize], amps: &[Complex<T>]) -> Result<()> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidParameter("state dims must be non-empty and positive".into()));
        }
        if total != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amps.len(),
            });
        }
        Ok(())
    }

    /// Computational basis ket `|levels[0] levels[1] …⟩`.
    pub fn basis(dims: &[usize], levels: &[usize]) -> Result<Self> {
        if dims.len() != levels.len() {
            return Err(Error::LengthMismatch {
                what: "levels",
                expected: dims.len(),
                found: levels.len(),
            });
        }
        let idx = flat_index(dims, levels)?;
        let total: usize = dims.iter().product();
        let mut amps = vec![Complex::zero(); total];
        amps[idx] = Complex::one();
        Self::new(dims.to_vec(), amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        inner(&self.amps, &other.amps)
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    /// `self ⊗ other`
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, amps }
    }

    pub fn product(states: &[Self]) -> Result<Self> {
        let (first, rest) = states
            .split_first()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, s| acc.tensor(s)))
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: T) -> Self {
        let p = Complex::from_polar(T::one(), phi);
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * p).collect(),
        }
    }

    pub fn apply(&self, m: &Matrix<T>) -> Result<Vec<Complex<T>>> {
        m.apply(&self.amps)
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix {
            dims: self.dims.clone(),
            rho: Matrix::outer(&self.amps, &self.amps),
        }
    }
}

/// Row-major flat index of a multi-index.
pub fn flat_index(dims: &[usize], levels: &[usize]) -> Result<usize> {
    let mut idx = 0;
    for (site, (&l, &d)) in levels.iter().zip(dims).enumerate() {
        if l >= d {
            return Err(Error::InvalidParameter(format!(
                "level {l} at site {site} exceeds dimension {d}"
            )));
        }
        idx = idx * d + l;
    }
    Ok(idx)
}

/// Inverse of [`flat_index`].
pub fn multi_index(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut levels = vec![0; dims.len()];
    for (slot, &d) in levels.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    levels
}

/// Mixed state over a composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dims: Vec<usize>,
    rho: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Requires a Hermitian, unit-trace square matrix of matching size.
    pub fn new(dims: Vec<usize>, rho: Matrix<T>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !rho.is_square() || rho.rows() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: rho.rows(),
            });
        }
        let dev = rho.hermitian_deviation();
        if dev > T::default_tolerance() {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        let tr = rho.trace().re;
        if (tr - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::NotNormalized(tr.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { dims, rho })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        Self {
            dims: dims.to_vec(),
            rho: Matrix::identity(total).scale(Complex::from(T::one() / T::from_count(total))),
        }
    }

    /// Convex mixture `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(components: &[(T, State<T>)]) -> Result<Self> {
        let (_, first) = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let dims = first.dims().to_vec();
        let mut rho = Matrix::zeros(first.total_dim(), first.total_dim());
        for (p, s) in components {
            if s.dims() != dims.as_slice() {
                return Err(Error::DimensionMismatch {
                    expected: first.total_dim(),
                    found: s.total_dim(),
                });
            }
            rho = &rho + &Matrix::outer(s.amplitudes(), s.amplitudes()).scale(Complex::from(*p));
        }
        Self::new(dims, rho)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.rho
    }

    /// Traces out every site not listed in `keep` (kept sites retain their order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            if k >= self.dims.len() {
                return Err(Error::SiteOutOfRange {
                    site: k,
                    n_sites: self.dims.len(),
                });
            }
        }
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let mut out = Matrix::zeros(kept_total, kept_total);
        let total = self.rho.rows();
        for r in 0..total {
            let rl = multi_index(&self.dims, r);
            for c in 0..total {
                let cl = multi_index(&self.dims, c);
                let traced_match = (0..self.dims.len())
                    .filter(|s| !keep.contains(s))
                    .all(|s| rl[s] == cl[s]);
                if !traced_match {
                    continue;
                }
                let kr: Vec<usize> = keep.iter().map(|&k| rl[k]).collect();
                let kc: Vec<usize> = keep.iter().map(|&k| cl[k]).collect();
                let (ir, ic) = (flat_index(&kept_dims, &kr)?, flat_index(&kept_dims, &kc)?);
                out[(ir, ic)] += self.rho[(r, c)];
            }
        }
        Ok(Self {
            dims: kept_dims,
            rho: out,
        })
    }
}

/// Anything that can produce expectation values of dense operators.
pub trait Expectation<T: Real> {
    fn total_dim(&self) -> usize;

    fn dims(&self) -> &[usize];

    /// `⟨m⟩`
    fn expect(&self, m: &Matrix<T>) -> Result<Complex<T>>;

    /// `⟨m†m⟩`, which equals `⟨m²⟩` for Hermitian `m`.
    fn expect_gram(&self, m: &Matrix<T>) -> Result<T>;
}

fn check_square<T: Real>(m: &Matrix<T>, total: usize) -> Result<()> {
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: m.rows(),
        });
    }
    Ok(())
}

impl<T: Real> Expectation<T> for State<T> {
    fn total_dim(&self) -> usize {
        self.amps.len()
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn expect(&self, m: &Matrix<T>) -> Result<Complex<T>> {
        check_square(m, self.amps.len())?;
        Ok(inner(&self.amps, &m.apply(&self.amps)?))
    }

    fn expect_gram(&self, m: &Matrix<T>) -> Result<T> {
        check_square(m, self.amps.len())?;
        Ok(norm_sqr(&m.apply(&self.amps)?))
    }
}

impl<T: Real> Expectation<T> for DensityMatrix<T> {
    fn total_dim(&self) -> usize {
        self.rho.rows()
    }

    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn expect(&self, m: &Matrix<T>) -> Result<Complex<T>> {
        check_square(m, self.rho.rows())?;
        // Tr(ρ m) = Σ_ij ρ_ij m_ji
        let n = self.rho.rows();
        let mut acc = Complex::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[(i, j)] * m[(j, i)];
            }
        }
        Ok(acc)
    }

    fn expect_gram(&self, m: &Matrix<T>) -> Result<T> {
        check_square(m, self.rho.rows())?;
        let g = m.adjoint().matmul(m)?;
        Ok(self.expect(&g)?.re)
    }
}

/// `⟨s|m|s⟩` (or `Tr(ρ m)` for mixed states).
pub fn expectation<T: Real, S: Expectation<T> + ?Sized>(s: &S, m: &Matrix<T>) -> Result<Complex<T>> {
    s.expect(m)
}

/// `⟨m²⟩ − ⟨m⟩²` for Hermitian `m`.
pub fn variance<T: Real, S: Expectation<T> + ?Sized>(s: &S, m: &Matrix<T>) -> Result<T> {
    let dev = m.hermitian_deviation();
    if dev > T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * (T::one() + m.frobenius_norm()) {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mean = s.expect(m)?.re;
    Ok(s.expect_gram(m)? - mean * mean)
}

/// Weighted sum of single-site operators, `Σ_k c_k · op_k[site_k]`, applied
/// factor-by-factor. Used where the embedded dense matrix would be too large.
#[derive(Clone, Debug)]
pub struct LocalSum<T: Real> {
    dims: Vec<usize>,
    terms: Vec<(Complex<T>, usize, Matrix<T>)>,
}

impl<T: Real> LocalSum<T> {
    pub fn new(dims: &[usize]) -> Self {
        Self {
            dims: dims.to_vec(),
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, coeff: Complex<T>, site: usize, op: Matrix<T>) -> Result<Self> {
        check_local(&op, site, &self.dims)?;
        self.terms.push((coeff, site, op));
        Ok(self)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn apply(&self, amps: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::zero(); amps.len()];
        for (c, site, op) in &self.terms {
            let part = apply_local(op, *site, &self.dims, amps)?;
            for (o, p) in out.iter_mut().zip(part) {
                *o += *c * p;
            }
        }
        Ok(out)
    }

    /// Hermitian when every coefficient is real and every factor Hermitian.
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.terms
            .iter()
            .all(|(c, _, op)| c.im.abs() <= tol && op.is_hermitian(tol))
    }

    pub fn to_matrix(&self) -> Result<Matrix<T>> {
        let total: usize = self.dims.iter().product();
        let mut m = Matrix::zeros(total, total);
        for (c, site, op) in &self.terms {
            m = &m + &embed_local(op, *site, &self.dims)?.scale(*c);
        }
        Ok(m)
    }

    pub fn expectation(&self, s: &State<T>) -> Result<Complex<T>> {
        Ok(inner(s.amplitudes(), &self.apply(s.amplitudes())?))
    }

    /// `⟨A²⟩ − ⟨A⟩²` on a pure state; requires Hermitian terms.
    pub fn variance(&self, s: &State<T>) -> Result<T> {
        if !self.is_hermitian(T::norm_tolerance()) {
            return Err(Error::NotHermitian { deviation: f64::NAN });
        }
        if s.dims() != self.dims.as_slice() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.iter().product(),
                found: s.total_dim(),
            });
        }
        let a_psi = self.apply(s.amplitudes())?;
        let mean = inner(s.amplitudes(), &a_psi).re;
        Ok(norm_sqr(&a_psi) - mean * mean)
    }
}
