//! Parameter space of rotationally invariant operators.
//!
//! An invariant Hermitian operator on `ℂᴺ ⊗ ℂᴺ` is
//! `ρ = (1/N) Σ_J α_J/√(2J+1) · P_J`, so it is fixed by the real vector
//! `α = (α_0, …, α_{2j})`. Partial time reversal acts on that vector through
//! the symmetric orthogonal involution [`ThetaMatrix`].

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::halfint::HalfInt;
use crate::sqrt_rational::SignedSqrtRational;
use crate::surd::Surd;
use crate::wigner::six_j;

/// Default tolerance for floating-point state checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("local dimension must be at least 2, got {n}"));
    }
    Ok(())
}

/// `√(2J+1)/N`, the weight of `α_J` in the trace functional.
pub fn trace_weight(n: usize, big_j: usize) -> f64 {
    ((2 * big_j + 1) as f64).sqrt() / n as f64
}

pub fn trace_weight_exact(n: usize, big_j: usize) -> Surd {
    &Surd::sqrt_int((2 * big_j + 1) as u64) * &Surd::from_ratio(1, n as i64)
}

/// Parameter vector `(α_0, …, α_{2j})` of an invariant operator.
///
/// Always carries a float view; carries exact components when they are
/// known, in which case every predicate is decided exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaVector {
    values: Vec<f64>,
    exact: Option<Vec<Surd>>,
}

impl AlphaVector {
    pub fn from_f64(values: Vec<f64>) -> Result<Self> {
        check_dim(values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return domain("alpha components must be finite");
        }
        Ok(AlphaVector { values, exact: None })
    }

    pub fn from_exact(exact: Vec<Surd>) -> Result<Self> {
        check_dim(exact.len())?;
        let values = exact.iter().map(Surd::to_f64).collect();
        Ok(AlphaVector {
            values,
            exact: Some(exact),
        })
    }

    /// Lifts reduced coordinates `(α_0, …, α_{2j−1})` to the full vector by
    /// solving the unit-trace condition for `α_{2j}`.
    pub fn from_reduced_f64(n: usize, reduced: &[f64]) -> Result<Self> {
        check_dim(n)?;
        if reduced.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                actual: reduced.len(),
            });
        }
        let partial: f64 = reduced.iter().enumerate().map(|(k, a)| trace_weight(n, k) * a).sum();
        let mut values = reduced.to_vec();
        values.push((1.0 - partial) / trace_weight(n, n - 1));
        AlphaVector::from_f64(values)
    }

    pub fn from_reduced_exact(n: usize, reduced: &[Surd]) -> Result<Self> {
        check_dim(n)?;
        if reduced.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                actual: reduced.len(),
            });
        }
        let partial: Surd = reduced
            .iter()
            .enumerate()
            .map(|(k, a)| &trace_weight_exact(n, k) * a)
            .sum();
        let last = &(&Surd::one() - &partial) / &trace_weight_exact(n, n - 1);
        let mut exact = reduced.to_vec();
        exact.push(last);
        AlphaVector::from_exact(exact)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact(&self) -> Option<&[Surd]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Drops the exact components, keeping the float view.
    pub fn to_float(&self) -> AlphaVector {
        AlphaVector {
            values: self.values.clone(),
            exact: None,
        }
    }

    /// Reduced coordinates `(α_0, …, α_{2j−1})`.
    pub fn reduced(&self) -> &[f64] {
        &self.values[..self.n() - 1]
    }

    /// `tr ρ = Σ_J √(2J+1)/N · α_J`.
    pub fn trace(&self) -> f64 {
        let n = self.n();
        self.values
            .iter()
            .enumerate()
            .map(|(k, a)| trace_weight(n, k) * a)
            .sum()
    }

    pub fn trace_exact(&self) -> Option<Surd> {
        let n = self.n();
        self.exact
            .as_ref()
            .map(|ex| ex.iter().enumerate().map(|(k, a)| &trace_weight_exact(n, k) * a).sum())
    }

    /// Density-matrix test: all `α_J ≥ 0` and unit trace. Exact vectors are
    /// decided exactly and ignore `tol`.
    pub fn is_state_with(&self, tol: f64) -> bool {
        match &self.exact {
            Some(ex) => ex.iter().all(|a| a.signum() >= 0) && self.trace_exact().is_some_and(|t| t == Surd::one()),
            None => self.values.iter().all(|a| *a >= -tol) && (self.trace() - 1.0).abs() <= tol,
        }
    }

    pub fn is_state(&self) -> bool {
        self.is_state_with(DEFAULT_TOLERANCE)
    }
}

impl Serialize for AlphaVector {
    /// `{"n": N, "alpha": [...]}`; components that are a single exact radical
    /// are written as `{"sign", "num", "den"}` triples, others as numbers.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Component {
            Exact(SignedSqrtRational),
            Float(f64),
        }
        #[derive(Serialize)]
        struct Wire {
            n: usize,
            alpha: Vec<Component>,
        }
        let alpha = match &self.exact {
            Some(ex) => ex
                .iter()
                .zip(&self.values)
                .map(|(e, v)| match SignedSqrtRational::from_surd(e) {
                    Some(x) => Component::Exact(x),
                    None => Component::Float(*v),
                })
                .collect(),
            None => self.values.iter().map(|v| Component::Float(*v)).collect(),
        };
        Wire { n: self.n(), alpha }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlphaVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Component {
            Exact(SignedSqrtRational),
            Float(f64),
        }
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            alpha: Vec<Component>,
        }
        let w = Wire::deserialize(d)?;
        if w.alpha.len() != w.n {
            return Err(D::Error::custom(format!(
                "expected {} components, got {}",
                w.n,
                w.alpha.len()
            )));
        }
        let all_exact = w.alpha.iter().all(|c| matches!(c, Component::Exact(_)));
        let out = if all_exact {
            let ex = w
                .alpha
                .into_iter()
                .map(|c| match c {
                    Component::Exact(x) => x.to_surd(),
                    Component::Float(_) => unreachable!(),
                })
                .collect();
            AlphaVector::from_exact(ex)
        } else {
            let vals = w
                .alpha
                .into_iter()
                .map(|c| match c {
                    Component::Exact(x) => x.to_f64(),
                    Component::Float(v) => v,
                })
                .collect();
            AlphaVector::from_f64(vals)
        };
        out.map_err(D::Error::custom)
    }
}

/// Matrix of partial time reversal on parameter space,
/// `Θ_JK = √((2J+1)(2K+1)) · {j j J; j j K}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    n: usize,
    exact: Vec<SignedSqrtRational>,
    values: Vec<f64>,
}

impl ThetaMatrix {
    /// Builds a matrix from exact row-major entries.
    pub fn from_exact(n: usize, exact: Vec<SignedSqrtRational>) -> Result<Self> {
        check_dim(n)?;
        if exact.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: exact.len(),
            });
        }
        let values = exact.iter().map(SignedSqrtRational::to_f64).collect();
        Ok(ThetaMatrix { n, exact, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n + k]
    }

    pub fn exact(&self, j: usize, k: usize) -> &SignedSqrtRational {
        &self.exact[j * self.n + k]
    }

    pub fn surd(&self, j: usize, k: usize) -> Surd {
        self.exact(j, k).to_surd()
    }

    /// Row-major float entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn surd_rows(&self) -> Vec<Vec<Surd>> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| self.surd(j, k)).collect())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|j| (0..j).all(|k| self.exact(j, k) == self.exact(k, j)))
    }

    /// `Θ²` computed exactly.
    pub fn square_exact(&self) -> Vec<Vec<Surd>> {
        let rows = self.surd_rows();
        (0..self.n)
            .map(|j| {
                (0..self.n)
                    .map(|l| (0..self.n).map(|k| &rows[j][k] * &rows[k][l]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn is_involution(&self) -> bool {
        self.square_exact().iter().enumerate().all(|(j, row)| {
            row.iter()
                .enumerate()
                .all(|(l, x)| if j == l { *x == Surd::one() } else { x.is_zero() })
        })
    }

    pub fn trace_exact(&self) -> Surd {
        (0..self.n).map(|j| self.surd(j, j)).sum()
    }

    pub fn apply_f64(&self, alpha: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| self.get(j, k) * alpha[k]).sum())
            .collect()
    }

    pub fn apply_exact(&self, alpha: &[Surd]) -> Vec<Surd> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| &self.surd(j, k) * &alpha[k]).sum())
            .collect()
    }
}

impl Serialize for ThetaMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            n: usize,
            entries: Vec<Vec<f64>>,
            exact: Vec<&'a [SignedSqrtRational]>,
        }
        Wire {
            n: self.n,
            entries: self.rows(),
            exact: self.exact.chunks(self.n).collect(),
        }
        .serialize(s)
    }
}

static THETA_CACHE: LazyLock<RwLock<HashMap<usize, ThetaMatrix>>> = LazyLock::new(Default::default);

/// Θ for local dimension `n` from Racah 6-j symbols.
pub fn theta_matrix(n: usize) -> Result<ThetaMatrix> {
    check_dim(n)?;
    if let Some(t) = THETA_CACHE.read().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return Ok(t.clone());
    }
    let t = theta_matrix_uncached(n)?;
    THETA_CACHE
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(n, t.clone());
    Ok(t)
}

/// Same as [`theta_matrix`] but always recomputes.
pub fn theta_matrix_uncached(n: usize) -> Result<ThetaMatrix> {
    check_dim(n)?;
    let j = HalfInt::spin_of_dim(n)?;
    let mut exact = Vec::with_capacity(n * n);
    for big_j in 0..n {
        for big_k in 0..n {
            let w = six_j(
                j,
                j,
                HalfInt::integer(big_j as i32),
                j,
                j,
                HalfInt::integer(big_k as i32),
            );
            let scale = BigRational::from_integer(BigInt::from((2 * big_j + 1) * (2 * big_k + 1)));
            exact.push(SignedSqrtRational::from_parts(w.sign(), scale * w.radicand()));
        }
    }
    ThetaMatrix::from_exact(n, exact)
}

fn check_coupled(n: usize, big_j: usize) -> Result<()> {
    check_dim(n)?;
    if big_j >= n {
        return domain(format!("J = {big_j} outside 0..={}", n - 1));
    }
    Ok(())
}

fn parity(k: usize) -> i8 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Closed form `Θ_J0 = √(2J+1)/N · (−1)^{2j+J}`.
pub fn theta_row0(n: usize, big_j: usize) -> Result<SignedSqrtRational> {
    check_coupled(n, big_j)?;
    let two_j = n - 1;
    let sq = BigRational::new(BigInt::from(2 * big_j + 1), BigInt::from(n * n));
    Ok(SignedSqrtRational::from_parts(parity(two_j + big_j), sq))
}

/// Closed form
/// `Θ_J1 = √(3(2J+1)) · ((N−1)(N+1) − 2J(J+1)) / (N(N−1)(N+1)) · (−1)^{2j+1+J}`.
pub fn theta_row1(n: usize, big_j: usize) -> Result<SignedSqrtRational> {
    check_coupled(n, big_j)?;
    let two_j = n - 1;
    let nn = n as i64;
    let jj = big_j as i64;
    let r = BigRational::new(
        BigInt::from(nn * nn - 1 - 2 * jj * (jj + 1)),
        BigInt::from(nn * (nn * nn - 1)),
    );
    let sign = parity(two_j + 1 + big_j) * if r.is_negative() { -1 } else { 1 };
    let sq = BigRational::from_integer(BigInt::from(3 * (2 * jj + 1))) * &r * &r;
    Ok(SignedSqrtRational::from_parts(sign, sq))
}

/// `α′ = Θ α`; exact when the input is exact.
pub fn apply_theta(theta: &ThetaMatrix, alpha: &AlphaVector) -> Result<AlphaVector> {
    if theta.n() != alpha.n() {
        return Err(Error::DimensionMismatch {
            expected: theta.n(),
            actual: alpha.n(),
        });
    }
    match alpha.exact() {
        Some(ex) => AlphaVector::from_exact(theta.apply_exact(ex)),
        None => AlphaVector::from_f64(theta.apply_f64(alpha.values())),
    }
}

/// Eigenvectors `α^{(L)}_J = (−1)^J Θ_JL` with eigenvalues `(−1)^L`.
pub fn theta_eigenvectors(theta: &ThetaMatrix) -> Vec<(AlphaVector, i32)> {
    let n = theta.n();
    (0..n)
        .map(|l| {
            let v = (0..n)
                .map(|j| {
                    let x = theta.surd(j, l);
                    if j % 2 == 0 {
                        x
                    } else {
                        -x
                    }
                })
                .collect();
            let vec = AlphaVector::from_exact(v).expect("n ≥ 2");
            (vec, i32::from(parity(l)))
        })
        .collect()
}

/// Singlet projector `P_0`: `α = (N, 0, …, 0)`.
pub fn singlet_alpha(n: usize) -> Result<AlphaVector> {
    check_dim(n)?;
    let mut ex = vec![Surd::zero(); n];
    ex[0] = Surd::from_integer(n as i64);
    AlphaVector::from_exact(ex)
}

/// Maximally mixed state `I/N²`: `α_J = √(2J+1)/N`.
pub fn max_entropy_alpha(n: usize) -> Result<AlphaVector> {
    check_dim(n)?;
    AlphaVector::from_exact((0..n).map(|k| trace_weight_exact(n, k)).collect())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&lambda) {
        return domain(format!("Werner parameter {lambda} outside [-1, 1]"));
    }
    Ok(())
}

/// Werner state `((N−λ) I + (Nλ−1) 𝔽)/(N³−N)`:
/// `α_J = √(2J+1)/(N²−1) · [N − λ + (−1)^{2j+J}(Nλ − 1)]`.
pub fn werner_alpha(n: usize, lambda: f64) -> Result<AlphaVector> {
    check_dim(n)?;
    check_lambda(lambda)?;
    let nf = n as f64;
    let values = (0..n)
        .map(|k| {
            let s = f64::from(parity(n - 1 + k));
            ((2 * k + 1) as f64).sqrt() / (nf * nf - 1.0) * (nf - lambda + s * (nf * lambda - 1.0))
        })
        .collect();
    AlphaVector::from_f64(values)
}

/// [`werner_alpha`] for a rational `λ`, with exact components.
pub fn werner_alpha_exact(n: usize, lambda: &BigRational) -> Result<AlphaVector> {
    check_dim(n)?;
    let one = BigRational::from_integer(1.into());
    if lambda > &one || lambda < &-one.clone() {
        return domain(format!("Werner parameter {lambda} outside [-1, 1]"));
    }
    let nq = BigRational::from_integer(BigInt::from(n));
    let ex = (0..n)
        .map(|k| {
            let bracket = if parity(n - 1 + k) > 0 {
                &nq - lambda + (&nq * lambda - &one)
            } else {
                &nq - lambda - (&nq * lambda - &one)
            };
            let c = bracket / (&nq * &nq - &one);
            &Surd::sqrt_int((2 * k + 1) as u64) * &Surd::from_rational(c)
        })
        .collect();
    AlphaVector::from_exact(ex)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Surd {
        x.parse().unwrap()
    }

    fn surds(xs: &[&str]) -> Vec<Surd> {
        xs.iter().map(|x| s(x)).collect()
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(theta_matrix(1).is_err());
        assert!(theta_matrix(0).is_err());
        assert!(AlphaVector::from_f64(vec![1.0]).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(theta_row0(4, 0).unwrap().to_surd(), s("-1/4"));
        assert_eq!(theta_row1(2, 0).unwrap().to_surd(), s("sqrt(3)/2"));
        assert_eq!(theta_row0(3, 2).unwrap().to_surd(), s("sqrt(5)/3"));
        assert!(theta_row0(3, 3).is_err());
    }

    #[test]
    fn apply_theta_examples() {
        let t2 = theta_matrix(2).unwrap();
        let out = apply_theta(&t2, &singlet_alpha(2).unwrap()).unwrap();
        assert_eq!(out.exact().unwrap(), surds(&["-1", "sqrt(3)"]).as_slice());

        let t4 = theta_matrix(4).unwrap();
        let out = apply_theta(&t4, &singlet_alpha(4).unwrap()).unwrap();
        assert_eq!(
            out.exact().unwrap(),
            surds(&["-1", "sqrt(3)", "-sqrt(5)", "sqrt(7)"]).as_slice()
        );

        for n in 2..=7 {
            let me = max_entropy_alpha(n).unwrap();
            let out = apply_theta(&theta_matrix(n).unwrap(), &me).unwrap();
            assert_eq!(out, me);
        }
        assert!(apply_theta(&t2, &singlet_alpha(3).unwrap()).is_err());
    }

    #[test]
    fn named_vectors() {
        assert_eq!(singlet_alpha(4).unwrap().values(), &[4.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            max_entropy_alpha(3).unwrap().exact().unwrap(),
            surds(&["1/3", "sqrt(3)/3", "sqrt(5)/3"]).as_slice()
        );
        for n in 2..=8 {
            assert_eq!(singlet_alpha(n).unwrap().trace_exact().unwrap(), Surd::one());
            assert_eq!(max_entropy_alpha(n).unwrap().trace_exact().unwrap(), Surd::one());
            assert!(singlet_alpha(n).unwrap().is_state());
        }
    }

    #[test]
    fn werner_examples() {
        let w = werner_alpha(2, -1.0).unwrap();
        assert!((w.values()[0] - 2.0).abs() < 1e-15 && w.values()[1].abs() < 1e-15);
        let w = werner_alpha(2, 1.0).unwrap();
        assert!(w.values()[0].abs() < 1e-15);
        assert!((w.values()[1] - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        for n in 2..=8 {
            let w = werner_alpha_exact(n, &BigRational::new(1.into(), BigInt::from(n))).unwrap();
            assert_eq!(w, max_entropy_alpha(n).unwrap());
            for lambda in [-1.0, -0.3, 0.0, 0.5, 1.0] {
                assert!(werner_alpha(n, lambda).unwrap().is_state());
            }
        }
        assert!(werner_alpha(3, 1.5).is_err());
        assert!(werner_alpha(3, -1.0001).is_err());
    }

    #[test]
    fn eigenvectors_first_is_max_entropy_direction() {
        for n in 2..=6 {
            let t = theta_matrix(n).unwrap();
            let eig = theta_eigenvectors(&t);
            let (v0, e0) = &eig[0];
            assert_eq!(*e0, 1);
            let me = max_entropy_alpha(n).unwrap();
            let sign = if (n - 1) % 2 == 0 {
                Surd::one()
            } else {
                Surd::from_integer(-1)
            };
            let scaled: Vec<Surd> = me.exact().unwrap().iter().map(|x| &sign * x).collect();
            assert_eq!(v0.exact().unwrap(), scaled.as_slice());
        }
    }

    #[test]
    fn reduced_lift_round_trip() {
        let e = AlphaVector::from_reduced_exact(4, &surds(&["2/3", "0", "0"])).unwrap();
        assert_eq!(e.exact().unwrap()[3], s("10/3*sqrt(1/7)"));
        assert!(e.is_state());
        let f = AlphaVector::from_reduced_f64(4, &[2.0 / 3.0, 0.0, 0.0]).unwrap();
        assert!((f.values()[3] - 10.0 / (3.0 * 7f64.sqrt())).abs() < 1e-14);
        assert!(AlphaVector::from_reduced_f64(4, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn json_forms() {
        let me = max_entropy_alpha(3).unwrap();
        let j = serde_json::to_value(&me).unwrap();
        assert_eq!(j["n"], 3);
        assert_eq!(j["alpha"][0], serde_json::json!({"sign": 1, "num": "1", "den": "9"}));
        let back: AlphaVector = serde_json::from_value(j).unwrap();
        assert_eq!(back, me);

        let mixed: AlphaVector =
            serde_json::from_str(r#"{"n": 2, "alpha": [0.5, {"sign": 1, "num": "3", "den": "4"}]}"#).unwrap();
        assert!(!mixed.is_exact());
        assert!((mixed.values()[1] - 0.75f64.sqrt()).abs() < 1e-16);
        assert!(serde_json::from_str::<AlphaVector>(r#"{"n": 3, "alpha": [1, 2]}"#).is_err());
    }
}
