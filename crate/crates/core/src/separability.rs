//! Entanglement criteria for invariant states.
//!
//! Exact α-vectors are decided exactly. Float vectors use a `1e−12` slack on
//! each inequality, with boundary points counted on the closed side.

use serde::{Deserialize, Serialize};

use crate::dense::{self, DenseOperator, PSD_TOLERANCE};
use crate::error::{domain, Error, Result};
use crate::invariant::{theta_matrix, trace_weight, trace_weight_exact, AlphaVector, DEFAULT_TOLERANCE};
use crate::surd::Surd;

/// Slack applied to each float inequality.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    NotAState,
    Separable,
    #[serde(rename = "BoundEntangledPPT")]
    BoundEntangledPpt,
    #[serde(rename = "NPTEntangled")]
    NptEntangled,
    #[serde(rename = "PPTUnknown")]
    PptUnknown,
}

impl Classification {
    pub fn tag(self) -> &'static str {
        match self {
            Classification::NotAState => "NotAState",
            Classification::Separable => "Separable",
            Classification::BoundEntangledPpt => "BoundEntangledPPT",
            Classification::NptEntangled => "NPTEntangled",
            Classification::PptUnknown => "PPTUnknown",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Every criterion evaluated on one α-vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub classification: Classification,
    pub ppt: bool,
    /// Only defined for `N = 4`.
    pub prism_inequality: Option<bool>,
    /// `tr((P₂ − P₀)ρ)`, only defined for `N = 4`.
    pub witness_value: Option<f64>,
    pub reduction_ok: bool,
    pub cross_norm: f64,
    pub cross_norm_ok: bool,
    pub negativity_trace_norm: f64,
}

fn require_state(alpha: &AlphaVector) -> Result<()> {
    if !alpha.is_state() {
        return domain("alpha does not describe a density matrix");
    }
    Ok(())
}

fn nonneg(exact: Option<Surd>, float: f64) -> bool {
    match exact {
        Some(x) => x.signum() >= 0,
        None => float >= -BOUNDARY_TOLERANCE,
    }
}

fn ppt_unchecked(alpha: &AlphaVector) -> Result<bool> {
    let theta = theta_matrix(alpha.n())?;
    Ok(match alpha.exact() {
        Some(ex) => theta.apply_exact(ex).iter().all(|x| x.signum() >= 0),
        None => theta
            .apply_f64(alpha.values())
            .iter()
            .all(|x| *x >= -BOUNDARY_TOLERANCE),
    })
}

/// Positivity under partial transposition: every component of `Θα` is
/// non-negative.
pub fn is_ppt(alpha: &AlphaVector) -> Result<bool> {
    require_state(alpha)?;
    ppt_unchecked(alpha)
}

fn require_four(alpha: &AlphaVector) -> Result<()> {
    if alpha.n() != 4 {
        return domain(format!("defined for N = 4 only, got N = {}", alpha.n()));
    }
    Ok(())
}

/// `√5·α₂ − α₀`, exactly when available.
fn prism_gap(alpha: &AlphaVector) -> (Option<Surd>, f64) {
    let v = alpha.values();
    let exact = alpha.exact().map(|ex| &(&Surd::sqrt_int(5) * &ex[2]) - &ex[0]);
    (exact, 5f64.sqrt() * v[2] - v[0])
}

/// `α₂ ≥ α₀/√5`, the face of the separable prism at `N = 4`.
pub fn prism_inequality(alpha: &AlphaVector) -> Result<bool> {
    require_four(alpha)?;
    let (exact, float) = prism_gap(alpha);
    Ok(nonneg(exact, float / 5f64.sqrt()))
}

/// Decides the region of `α` in `S_s ⊂ S_p ⊂ S`.
pub fn classify(alpha: &AlphaVector) -> Classification {
    classify_with(alpha, DEFAULT_TOLERANCE)
}

/// [`classify`] with a caller-chosen tolerance for the float state test.
pub fn classify_with(alpha: &AlphaVector, state_tolerance: f64) -> Classification {
    if !alpha.is_state_with(state_tolerance) {
        return Classification::NotAState;
    }
    let ppt = ppt_unchecked(alpha).expect("state vectors have n ≥ 2");
    if !ppt {
        return Classification::NptEntangled;
    }
    match alpha.n() {
        2 | 3 => Classification::Separable,
        4 => {
            if prism_inequality(alpha).expect("n = 4") {
                Classification::Separable
            } else {
                Classification::BoundEntangledPpt
            }
        }
        _ => Classification::PptUnknown,
    }
}

/// `tr((P₂ − P₀)ρ) = (√5·α₂ − α₀)/N` for `N = 4`.
pub fn witness_expectation(alpha: &AlphaVector) -> Result<f64> {
    require_four(alpha)?;
    require_state(alpha)?;
    Ok(prism_gap(alpha).1 / 4.0)
}

pub fn witness_expectation_exact(alpha: &AlphaVector) -> Result<Option<Surd>> {
    require_four(alpha)?;
    require_state(alpha)?;
    Ok(prism_gap(alpha).0.map(|g| &g * &Surd::from_ratio(1, 4)))
}

/// `(I⊗Φ)ρ` with `ΦB = Σ_M T_2M B T_2M† − T₀₀ B T₀₀†`, for `N = 4`.
pub fn phi_map(rho: &DenseOperator) -> Result<DenseOperator> {
    if rho.n() != 4 {
        return domain(format!("Φ is defined for N = 4, got N = {}", rho.n()));
    }
    let id = dense::CMatrix::identity(4, 4);
    let conj = |t: &dense::CMatrix| {
        let w = id.kronecker(t);
        &w * rho.matrix() * w.adjoint()
    };
    let mut out = -conj(&dense::tensor_operator(4, 0, 0)?);
    for big_m in -2..=2 {
        out += conj(&dense::tensor_operator(4, 2, big_m)?);
    }
    DenseOperator::new(4, out)
}

/// Positivity of `(I⊗Φ)ρ` within [`PSD_TOLERANCE`].
pub fn phi_map_check(rho: &DenseOperator) -> Result<bool> {
    Ok(phi_map(rho)?.min_eigenvalue() >= -PSD_TOLERANCE)
}

/// Reduction criterion `α_J ≤ √(2J+1)` for every `J`.
pub fn reduction_criterion(alpha: &AlphaVector) -> bool {
    match alpha.exact() {
        Some(ex) => ex
            .iter()
            .enumerate()
            .all(|(k, a)| (&Surd::sqrt_int((2 * k + 1) as u64) - a).signum() >= 0),
        None => alpha
            .values()
            .iter()
            .enumerate()
            .all(|(k, a)| ((2 * k + 1) as f64).sqrt() - a >= -BOUNDARY_TOLERANCE),
    }
}

fn weighted_abs_sum(n: usize, v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(k, x)| trace_weight(n, k) * x.abs()).sum()
}

fn weighted_abs_sum_exact(n: usize, v: &[Surd]) -> Surd {
    v.iter()
        .enumerate()
        .map(|(k, x)| &trace_weight_exact(n, k) * &x.abs())
        .sum()
}

fn alternate<T: Clone + std::ops::Neg<Output = T>>(v: &[T]) -> Vec<T> {
    v.iter()
        .enumerate()
        .map(|(k, x)| if k % 2 == 0 { x.clone() } else { -x.clone() })
        .collect()
}

/// `‖ϑ₂ρ‖₁ = Σ_J √(2J+1)/N · |(Θα)_J|`.
pub fn negativity_trace_norm(alpha: &AlphaVector) -> f64 {
    let theta = theta_matrix(alpha.n()).expect("alpha vectors have n ≥ 2");
    weighted_abs_sum(alpha.n(), &theta.apply_f64(alpha.values()))
}

pub fn negativity_trace_norm_exact(alpha: &AlphaVector) -> Option<Surd> {
    let theta = theta_matrix(alpha.n()).expect("alpha vectors have n ≥ 2");
    alpha
        .exact()
        .map(|ex| weighted_abs_sum_exact(alpha.n(), &theta.apply_exact(ex)))
}

/// Trace norm of the realigned state,
/// `Σ_J √(2J+1)/N · |Σ_K Θ_JK (−1)^K α_K|`.
pub fn cross_norm(alpha: &AlphaVector) -> f64 {
    let theta = theta_matrix(alpha.n()).expect("alpha vectors have n ≥ 2");
    weighted_abs_sum(alpha.n(), &theta.apply_f64(&alternate(alpha.values())))
}

pub fn cross_norm_exact(alpha: &AlphaVector) -> Option<Surd> {
    let theta = theta_matrix(alpha.n()).expect("alpha vectors have n ≥ 2");
    alpha
        .exact()
        .map(|ex| weighted_abs_sum_exact(alpha.n(), &theta.apply_exact(&alternate(ex))))
}

/// Cross-norm criterion `‖Φ_ρ‖₁ ≤ 1`.
pub fn cross_norm_ok(alpha: &AlphaVector) -> bool {
    match cross_norm_exact(alpha) {
        Some(x) => (&Surd::one() - &x).signum() >= 0,
        None => cross_norm(alpha) <= 1.0 + BOUNDARY_TOLERANCE,
    }
}

/// Evaluates every criterion. Values are reported even for vectors that are
/// not states, with `classification` set to `NotAState`.
pub fn criteria_report(alpha: &AlphaVector) -> Result<CriteriaReport> {
    criteria_report_with(alpha, DEFAULT_TOLERANCE)
}

pub fn criteria_report_with(alpha: &AlphaVector, state_tolerance: f64) -> Result<CriteriaReport> {
    if alpha.n() < 2 {
        return Err(Error::Domain("alpha needs at least two components".into()));
    }
    let four = alpha.n() == 4;
    Ok(CriteriaReport {
        classification: classify_with(alpha, state_tolerance),
        ppt: ppt_unchecked(alpha)?,
        prism_inequality: if four { Some(prism_inequality(alpha)?) } else { None },
        witness_value: if four { Some(prism_gap(alpha).1 / 4.0) } else { None },
        reduction_ok: reduction_criterion(alpha),
        cross_norm: cross_norm(alpha),
        cross_norm_ok: cross_norm_ok(alpha),
        negativity_trace_norm: negativity_trace_norm(alpha),
    })
}

/// An `N = 4` state that satisfies the reduction criterion strictly but is
/// not PPT, found by seeded rejection sampling over `S`.
pub fn reduction_not_ppt_example() -> AlphaVector {
    AlphaVector::from_f64(REDUCTION_NOT_PPT_N4.to_vec()).expect("four finite components")
}

/// Seed 2024, ChaCha8, second draw of the Dirichlet sampler over `S`.
pub const REDUCTION_NOT_PPT_N4: [f64; 4] = [
    0.2655232511221817,
    0.29076137032422855,
    1.0714703730306556,
    0.3155937933895698,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::{max_entropy_alpha, singlet_alpha};

    fn exact(xs: &[&str]) -> AlphaVector {
        AlphaVector::from_exact(xs.iter().map(|x| x.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn two_qubit_interval() {
        for (a0, want) in [("0", true), ("1/2", true), ("1", true), ("3/2", false), ("2", false)] {
            let a = AlphaVector::from_reduced_exact(2, &[a0.parse().unwrap()]).unwrap();
            assert_eq!(is_ppt(&a).unwrap(), want, "α₀ = {a0}");
        }
    }

    #[test]
    fn named_states() {
        for n in 2..=7 {
            let s = singlet_alpha(n).unwrap();
            let m = max_entropy_alpha(n).unwrap();
            assert!(!is_ppt(&s).unwrap());
            assert!(is_ppt(&m).unwrap());
            assert!(!reduction_criterion(&s));
            assert!(reduction_criterion(&m));
            assert_eq!(negativity_trace_norm_exact(&s).unwrap(), Surd::from_integer(n as i64));
            assert_eq!(negativity_trace_norm_exact(&m).unwrap(), Surd::one());
            assert_eq!(cross_norm_exact(&s).unwrap(), Surd::from_integer(n as i64));
            assert_eq!(cross_norm_exact(&m).unwrap(), Surd::from_ratio(1, n as i64));
        }
    }

    #[test]
    fn four_dimensional_examples() {
        let e = AlphaVector::from_reduced_exact(4, &["2/3".parse().unwrap(), Surd::zero(), Surd::zero()]).unwrap();
        assert_eq!(classify(&e), Classification::BoundEntangledPpt);
        assert_eq!(witness_expectation_exact(&e).unwrap().unwrap(), Surd::from_ratio(-1, 6));
        let g =
            AlphaVector::from_reduced_exact(4, &[Surd::zero(), Surd::zero(), "2*sqrt(1/5)".parse().unwrap()]).unwrap();
        assert_eq!(classify(&g), Classification::Separable);
        assert_eq!(classify(&singlet_alpha(4).unwrap()), Classification::NptEntangled);
        assert_eq!(
            witness_expectation_exact(&max_entropy_alpha(4).unwrap())
                .unwrap()
                .unwrap(),
            Surd::from_ratio(1, 4)
        );
        assert!(witness_expectation(&singlet_alpha(3).unwrap()).is_err());
    }

    #[test]
    fn higher_dimensions_are_undecided() {
        assert_eq!(classify(&max_entropy_alpha(5).unwrap()), Classification::PptUnknown);
        assert_eq!(classify(&singlet_alpha(5).unwrap()), Classification::NptEntangled);
        assert_eq!(classify(&exact(&["1", "1"])), Classification::NotAState);
        assert!(is_ppt(&exact(&["1", "1"])).is_err());
    }

    #[test]
    fn regression_vector() {
        let a = reduction_not_ppt_example();
        assert!(a.is_state());
        assert!(reduction_criterion(&a));
        assert!(!is_ppt(&a).unwrap());
        assert!(negativity_trace_norm(&a) > 1.0);
    }

    #[test]
    fn report_json_carries_tag() {
        let r = criteria_report(&max_entropy_alpha(4).unwrap()).unwrap();
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["classification"], "Separable");
        assert_eq!(j["prism_inequality"], true);
        let r = criteria_report(&max_entropy_alpha(3).unwrap()).unwrap();
        assert!(r.prism_inequality.is_none());
        assert_eq!(Classification::BoundEntangledPpt.to_string(), "BoundEntangledPPT");
    }
}
