//! Brute-force `N² × N²` realization of the operators and maps.
//!
//! Basis convention: each factor uses `|j m⟩` with `m` descending, so local
//! index `i` holds `m = j − i`, and the product index of `|m₁⟩⊗|m₂⟩` is
//! `i₁·N + i₂`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::halfint::HalfInt;
use crate::invariant::AlphaVector;
use crate::wigner::{clebsch_gordan, three_j};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default positivity threshold on minimum eigenvalues.
pub const PSD_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn spin(n: usize) -> Result<HalfInt> {
    if n < 2 {
        return domain(format!("local dimension must be at least 2, got {n}"));
    }
    HalfInt::spin_of_dim(n)
}

fn projection(j: HalfInt, i: usize) -> HalfInt {
    j - HalfInt::from_twice(2 * i as i32)
}

fn parity(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Largest entry modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().sum()
}

/// Operator on `ℂᴺ ⊗ ℂᴺ` in the product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(n: usize, matrix: CMatrix) -> Result<Self> {
        spin(n)?;
        let d = n * n;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(DenseOperator { n, matrix })
    }

    pub fn identity(n: usize) -> Result<Self> {
        DenseOperator::new(n, CMatrix::identity(n * n, n * n))
    }

    /// `|ψ⟩⟨ψ|` for a vector in the product space.
    pub fn pure(n: usize, psi: &CVector) -> Result<Self> {
        DenseOperator::new(n, psi * psi.adjoint())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            n: self.n,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.matrix, &self.matrix.adjoint()) <= tol
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    pub fn is_unit_trace(&self, tol: f64) -> bool {
        (self.trace() - ONE).norm() <= tol
    }

    pub fn is_density(&self, tol: f64) -> bool {
        self.is_psd(tol) && self.is_unit_trace(tol)
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.matrix)
    }

    /// `⟨a|ρ|b⟩` for product indices.
    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        self.matrix[(a, b)]
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `tr(A B)`.
    pub fn trace_product(&self, other: &DenseOperator) -> Complex64 {
        let m = &self.matrix;
        let o = &other.matrix;
        let d = m.nrows();
        let mut s = ZERO;
        for a in 0..d {
            for b in 0..d {
                s += m[(a, b)] * o[(b, a)];
            }
        }
        s
    }
}

impl Serialize for DenseOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            n: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let rows = |f: fn(&Complex64) -> f64| self.matrix.row_iter().map(|r| r.iter().map(f).collect()).collect();
        Wire {
            n: self.n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let w = Wire::deserialize(d)?;
        let dim = w.n * w.n;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if !shape_ok(&w.re) || !shape_ok(&w.im) {
            return Err(D::Error::custom(format!("expected {dim}x{dim} re/im arrays")));
        }
        let m = CMatrix::from_fn(dim, dim, |a, b| Complex64::new(w.re[a][b], w.im[a][b]));
        DenseOperator::new(w.n, m).map_err(D::Error::custom)
    }
}

/// Pure single-particle state with amplitudes `c_m`, `m` descending.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalState {
    amplitudes: CVector,
}

impl LocalState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        spin(amplitudes.len())?;
        Ok(LocalState {
            amplitudes: CVector::from_vec(amplitudes),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        LocalState::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Basis vector `|j m⟩`.
    pub fn basis(n: usize, m: HalfInt) -> Result<Self> {
        let j = spin(n)?;
        j.check_projection(m)?;
        let mut c = vec![ZERO; n];
        c[((j - m).twice() / 2) as usize] = ONE;
        LocalState::new(c)
    }

    /// Haar-random pure state: normalized complex standard-normal vector.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        spin(n)?;
        let c: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Ok(LocalState::new(c)?.normalized())
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> LocalState {
        LocalState {
            amplitudes: self.amplitudes.unscale(self.norm()),
        }
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &LocalState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|self⟩ ⊗ |other⟩` in the product basis.
    pub fn tensor(&self, other: &LocalState) -> CVector {
        self.amplitudes.kronecker(&other.amplitudes)
    }
}

/// Spin matrices `(ĵ₁, ĵ₂, ĵ₃)` for spin `j = (n−1)/2`.
pub fn spin_matrices(n: usize) -> Result<[CMatrix; 3]> {
    let j = spin(n)?;
    let jf = j.to_f64();
    let mut jz = CMatrix::zeros(n, n);
    let mut jp = CMatrix::zeros(n, n);
    for i in 0..n {
        let m = projection(j, i).to_f64();
        jz[(i, i)] = Complex64::new(m, 0.0);
        if i > 0 {
            // ĵ₊|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩ and |m+1⟩ sits at index i−1
            jp[(i - 1, i)] = Complex64::new((jf * (jf + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale(0.5);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    Ok([jx, jy, jz])
}

/// Total spin `Ĵ_k = ĵ_k ⊗ I + I ⊗ ĵ_k`.
pub fn total_spin(n: usize) -> Result<[CMatrix; 3]> {
    let id = CMatrix::identity(n, n);
    let [a, b, c] = spin_matrices(n)?;
    let lift = |x: &CMatrix| x.kronecker(&id) + id.kronecker(x);
    Ok([lift(&a), lift(&b), lift(&c)])
}

/// `D(R) = exp(−i n·ĵ)` for an axis-angle vector.
pub fn rotation(n: usize, axis_angle: [f64; 3]) -> Result<CMatrix> {
    if axis_angle.iter().any(|x| !x.is_finite()) {
        return domain("axis-angle vector must be finite");
    }
    let s = spin_matrices(n)?;
    let g = s[0].scale(axis_angle[0]) + s[1].scale(axis_angle[1]) + s[2].scale(axis_angle[2]);
    let eig = g.symmetric_eigen();
    let u = eig.eigenvectors.clone();
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| (-I * l).exp()));
    Ok(&u * phases * u.adjoint())
}

/// `⟨m′|V|m⟩ = (−1)^{j−m} δ_{m′,−m}`; equal to `D(0, π, 0)`.
pub fn v_matrix(n: usize) -> Result<CMatrix> {
    spin(n)?;
    let mut v = CMatrix::zeros(n, n);
    for i in 0..n {
        v[(n - 1 - i, i)] = Complex64::new(parity(i as i32), 0.0);
    }
    Ok(v)
}

/// One coupled basis vector `|J M⟩`.
#[derive(Clone, Debug)]
pub struct CoupledVector {
    pub big_j: usize,
    pub big_m: i32,
    pub vector: CVector,
}

/// `|J M⟩ = Σ ⟨j m₁ j m₂|J M⟩ |m₁ m₂⟩`, `J = 0 … 2j`, `M = J … −J`.
pub fn coupled_basis(n: usize) -> Result<Vec<CoupledVector>> {
    let j = spin(n)?;
    let mut out = Vec::with_capacity(n * n);
    for big_j in 0..n {
        let jj = HalfInt::integer(big_j as i32);
        for big_m in jj.projections() {
            out.push(CoupledVector {
                big_j,
                big_m: big_m.twice() / 2,
                vector: coupled_vector(n, j, jj, big_m)?,
            });
        }
    }
    Ok(out)
}

fn coupled_vector(n: usize, j: HalfInt, jj: HalfInt, big_m: HalfInt) -> Result<CVector> {
    let mut v = CVector::zeros(n * n);
    for a in 0..n {
        let m1 = projection(j, a);
        let m2 = big_m - m1;
        if m2.twice().abs() > j.twice() {
            continue;
        }
        let b = ((j - m2).twice() / 2) as usize;
        let c = clebsch_gordan(j, m1, j, m2, jj, big_m)?.to_f64();
        v[a * n + b] = Complex64::new(c, 0.0);
    }
    Ok(v)
}

fn check_coupled(n: usize, big_j: usize) -> Result<HalfInt> {
    let j = spin(n)?;
    if big_j >= n {
        return domain(format!("J = {big_j} outside 0..={}", n - 1));
    }
    Ok(j)
}

/// `P_J = Σ_M |J M⟩⟨J M|`.
pub fn projector(n: usize, big_j: usize) -> Result<DenseOperator> {
    let j = check_coupled(n, big_j)?;
    let jj = HalfInt::integer(big_j as i32);
    let mut p = CMatrix::zeros(n * n, n * n);
    for big_m in jj.projections() {
        let v = coupled_vector(n, j, jj, big_m)?;
        p += &v * v.adjoint();
    }
    DenseOperator::new(n, p)
}

pub fn projectors(n: usize) -> Result<Vec<DenseOperator>> {
    (0..n).map(|k| projector(n, k)).collect()
}

/// `T₂`: `⟨a b|T₂ρ|c d⟩ = ⟨a d|ρ|c b⟩`.
pub fn partial_transpose(rho: &DenseOperator) -> DenseOperator {
    let n = rho.n;
    let m = &rho.matrix;
    let out = CMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, b) = (r / n, r % n);
        let (cc, d) = (c / n, c % n);
        m[(a * n + d, cc * n + b)]
    });
    DenseOperator { n, matrix: out }
}

/// `ϑ₂ρ = (I⊗V)(T₂ρ)(I⊗V)†`.
pub fn partial_time_reversal(rho: &DenseOperator) -> DenseOperator {
    let v = v_matrix(rho.n).expect("operator dimension already validated");
    partial_time_reversal_with(rho, &v).expect("V has matching size")
}

/// [`partial_time_reversal`] with a caller-supplied local unitary.
pub fn partial_time_reversal_with(rho: &DenseOperator, v: &CMatrix) -> Result<DenseOperator> {
    let n = rho.n;
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v.nrows(),
        });
    }
    let w = CMatrix::identity(n, n).kronecker(v);
    let t = partial_transpose(rho);
    DenseOperator::new(n, &w * t.matrix * w.adjoint())
}

/// `Θ_JK = tr(P_J ϑ₂P_K) / √((2J+1)(2K+1))`, computed from dense operators.
pub fn theta_from_trace(n: usize) -> Result<DMatrix<f64>> {
    let ps = projectors(n)?;
    let flipped: Vec<DenseOperator> = ps.iter().map(partial_time_reversal).collect();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let w = (((2 * a + 1) * (2 * b + 1)) as f64).sqrt();
        ps[a].trace_product(&flipped[b]).re / w
    }))
}

/// `⟨j m|T_JM|j m′⟩ = (−1)^{j−m} √(2J+1) (j j J; m −m′ −M)`.
pub fn tensor_operator(n: usize, big_j: usize, big_m: i32) -> Result<CMatrix> {
    let j = check_coupled(n, big_j)?;
    if big_m.unsigned_abs() as usize > big_j {
        return domain(format!("|M| = {} exceeds J = {big_j}", big_m.abs()));
    }
    let jj = HalfInt::integer(big_j as i32);
    let mm = HalfInt::integer(big_m);
    let scale = ((2 * big_j + 1) as f64).sqrt();
    let mut t = CMatrix::zeros(n, n);
    for a in 0..n {
        let m = projection(j, a);
        for b in 0..n {
            let mp = projection(j, b);
            if m - mp != mm {
                continue;
            }
            let w = three_j(j, j, jj, m, -mp, -mm)?.to_f64();
            t[(a, b)] = Complex64::new(parity(a as i32) * scale * w, 0.0);
        }
    }
    Ok(t)
}

/// `Q_J = Σ_M T_JM ⊗ T_JM†`.
pub fn q_operator(n: usize, big_j: usize) -> Result<DenseOperator> {
    check_coupled(n, big_j)?;
    let mut q = CMatrix::zeros(n * n, n * n);
    for big_m in -(big_j as i32)..=big_j as i32 {
        let t = tensor_operator(n, big_j, big_m)?;
        q += t.kronecker(&t.adjoint());
    }
    DenseOperator::new(n, q)
}

/// Swap operator `𝔽|m₁ m₂⟩ = |m₂ m₁⟩`.
pub fn flip(n: usize) -> Result<DenseOperator> {
    spin(n)?;
    let mut f = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            f[(b * n + a, a * n + b)] = ONE;
        }
    }
    DenseOperator::new(n, f)
}

/// `ρ = (1/N) Σ_J α_J/√(2J+1) · P_J`.
pub fn invariant_operator(alpha: &AlphaVector) -> Result<DenseOperator> {
    let n = alpha.n();
    let ps = projectors(n)?;
    Ok(invariant_operator_from(alpha, &ps))
}

/// [`invariant_operator`] reusing precomputed projectors.
pub fn invariant_operator_from(alpha: &AlphaVector, projectors: &[DenseOperator]) -> DenseOperator {
    let n = alpha.n();
    let mut m = CMatrix::zeros(n * n, n * n);
    for (k, (a, p)) in alpha.values().iter().zip(projectors).enumerate() {
        m += p.matrix.scale(a / (n as f64 * ((2 * k + 1) as f64).sqrt()));
    }
    DenseOperator { n, matrix: m }
}

/// Projection `Πρ` onto invariant operators, returned with its α-vector
/// `α_J = N/√(2J+1) · tr(P_J ρ)`.
pub fn twirl(rho: &DenseOperator) -> Result<(AlphaVector, DenseOperator)> {
    let ps = projectors(rho.n)?;
    twirl_with(rho, &ps)
}

pub fn twirl_with(rho: &DenseOperator, projectors: &[DenseOperator]) -> Result<(AlphaVector, DenseOperator)> {
    let n = rho.n;
    let values = projectors
        .iter()
        .enumerate()
        .map(|(k, p)| n as f64 / ((2 * k + 1) as f64).sqrt() * p.trace_product(rho).re)
        .collect();
    let alpha = AlphaVector::from_f64(values)?;
    let op = invariant_operator_from(&alpha, projectors);
    Ok((alpha, op))
}

/// Which of the two equivalent functional forms to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Functional {
    /// `N/√(2J+1) ⟨φ₁φ₂|P_J|φ₁φ₂⟩`
    Projector,
    /// `N/√(2J+1) Σ_M |⟨φ₁|T_JM|φ₂⟩|²`
    Tensor,
}

/// Parameter point `α̃[φ₁, φ₂]` of a product state.
pub fn alpha_functionals(phi1: &LocalState, phi2: &LocalState, form: Functional) -> Result<AlphaVector> {
    let n = phi1.n();
    if phi2.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: phi2.n(),
        });
    }
    if !phi1.is_normalized(1e-12) || !phi2.is_normalized(1e-12) {
        return domain("product-state factors must be normalized");
    }
    let values = match form {
        Functional::Projector => {
            let psi = phi1.tensor(phi2);
            (0..n)
                .map(|k| {
                    let p = projector(n, k)?;
                    let e = psi.dotc(&(p.matrix() * &psi)).re;
                    Ok(n as f64 / ((2 * k + 1) as f64).sqrt() * e)
                })
                .collect::<Result<Vec<f64>>>()?
        }
        Functional::Tensor => (0..n)
            .map(|k| {
                let mut s = 0.0;
                for big_m in -(k as i32)..=k as i32 {
                    let t = tensor_operator(n, k, big_m)?;
                    s += phi1.amplitudes().dotc(&(t * phi2.amplitudes())).norm_sqr();
                }
                Ok(n as f64 / ((2 * k + 1) as f64).sqrt() * s)
            })
            .collect::<Result<Vec<f64>>>()?,
    };
    AlphaVector::from_f64(values)
}

/// Anti-unitary time reversal `τφ = Σ c_m* (−1)^{j−m} |j, −m⟩`.
pub fn time_reversal_local(phi: &LocalState) -> LocalState {
    let v = v_matrix(phi.n()).expect("state dimension already validated");
    LocalState {
        amplitudes: v * phi.amplitudes.conjugate(),
    }
}

/// `tr₁ρ` as an `N × N` matrix.
pub fn partial_trace_first(rho: &DenseOperator) -> CMatrix {
    let n = rho.n;
    CMatrix::from_fn(n, n, |b, d| (0..n).map(|a| rho.matrix[(a * n + b, a * n + d)]).sum())
}

/// `tr₂ρ` as an `N × N` matrix.
pub fn partial_trace_second(rho: &DenseOperator) -> CMatrix {
    let n = rho.n;
    CMatrix::from_fn(n, n, |a, c| (0..n).map(|b| rho.matrix[(a * n + b, c * n + b)]).sum())
}

/// Realignment `R[(a c), (b d)] = ρ[(a b), (c d)]`.
pub fn realignment(rho: &DenseOperator) -> CMatrix {
    let n = rho.n;
    let m = &rho.matrix;
    CMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, cc) = (r / n, r % n);
        let (b, d) = (c / n, c % n);
        m[(a * n + b, cc * n + d)]
    })
}

/// `A = (4/√5) Σ_M T_2M |φ⟩⟨φ| T_2M†` for `N = 4`.
pub fn quadrupole_form(phi2: &LocalState) -> Result<CMatrix> {
    if phi2.n() != 4 {
        return domain(format!("operator A is defined for N = 4, got N = {}", phi2.n()));
    }
    let proj = phi2.amplitudes() * phi2.amplitudes().adjoint();
    let mut a = CMatrix::zeros(4, 4);
    for big_m in -2..=2 {
        let t = tensor_operator(4, 2, big_m)?;
        a += &t * &proj * t.adjoint();
    }
    Ok(a.scale(4.0 / 5f64.sqrt()))
}

/// Closed form of [`quadrupole_form`] in the amplitudes `c₁ … c₄`.
pub fn quadrupole_form_explicit(c: [Complex64; 4]) -> CMatrix {
    let [c1, c2, c3, c4] = c;
    let n2 = |z: Complex64| Complex64::new(z.norm_sqr(), 0.0);
    let two = Complex64::new(2.0, 0.0);
    let rows = [
        [
            n2(c1) + two * n2(c2) + two * n2(c3),
            -c1 * c2.conj() + two * c3 * c4.conj(),
            -c1 * c3.conj() - two * c2 * c4.conj(),
            c1 * c4.conj(),
        ],
        [
            -c1.conj() * c2 + two * c3.conj() * c4,
            n2(c2) + two * n2(c1) + two * n2(c4),
            c2 * c3.conj(),
            -c2 * c4.conj() - two * c1 * c3.conj(),
        ],
        [
            -c1.conj() * c3 - two * c2.conj() * c4,
            c2.conj() * c3,
            n2(c3) + two * n2(c4) + two * n2(c1),
            -c3 * c4.conj() + two * c1 * c2.conj(),
        ],
        [
            c1.conj() * c4,
            -c2.conj() * c4 - two * c1.conj() * c3,
            -c3.conj() * c4 + two * c1.conj() * c2,
            n2(c4) + two * n2(c3) + two * n2(c2),
        ],
    ];
    CMatrix::from_fn(4, 4, |a, b| rows[a][b]).unscale(5f64.sqrt())
}
