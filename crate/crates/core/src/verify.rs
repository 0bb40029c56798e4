//! Named invariant suites used by the command-line `verify` command.
//!
//! Each suite checks one family of identities for one local dimension and
//! reports the largest deviation it saw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{self, max_abs_diff, CMatrix, DenseOperator, Functional, LocalState};
use crate::error::Result;
use crate::geometry::{ppt_polytope, separable_polytope};
use crate::halfint::HalfInt;
use crate::invariant::{apply_theta, theta_matrix, theta_row0, theta_row1, AlphaVector};
use crate::separability::{classify, cross_norm, is_ppt, negativity_trace_norm, Classification};
use crate::surd::Surd;
use crate::wigner::three_j;

/// Local unitary override used to check that the suites catch a broken `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VFault {
    /// Negate the entry of `V` in column `i` (mod N).
    FlipSign(usize),
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub tolerance: f64,
    pub seed: u64,
    /// Random samples per stochastic suite.
    pub samples: usize,
    pub v_fault: Option<VFault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance: 1e-10,
            seed: 0,
            samples: 50,
            v_fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub n: usize,
    pub passed: bool,
    pub max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub results: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

pub const SUITES: &[&str] = &[
    "wigner-orthogonality",
    "theta-structure",
    "theta-dense-oracle",
    "appendix-a-identity",
    "rotational-invariance",
    "functional-transform",
    "negativity-oracle",
    "cross-norm-oracle",
    "quadrupole-eigen",
    "range-inequality",
    "geometry-vertices",
];

struct Outcome {
    err: f64,
    detail: Option<String>,
}

impl Outcome {
    fn error(err: f64) -> Self {
        Outcome { err, detail: None }
    }

    fn flag(ok: bool, what: &str) -> Self {
        Outcome {
            err: if ok { 0.0 } else { f64::INFINITY },
            detail: (!ok).then(|| what.to_string()),
        }
    }
}

fn v_for(n: usize, fault: Option<VFault>) -> Result<CMatrix> {
    let mut v = dense::v_matrix(n)?;
    if let Some(VFault::FlipSign(i)) = fault {
        let col = i % n;
        let row = n - 1 - col;
        v[(row, col)] = -v[(row, col)];
    }
    Ok(v)
}

fn random_state_alpha(n: usize, r: &mut ChaCha8Rng) -> Result<AlphaVector> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    AlphaVector::from_f64(
        w.iter()
            .enumerate()
            .map(|(k, x)| x / total * n as f64 / ((2 * k + 1) as f64).sqrt())
            .collect(),
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_suite(name: &'static str, n: usize, opts: &VerifyOptions) -> Result<Option<Outcome>> {
    let mut r = ChaCha8Rng::seed_from_u64(opts.seed ^ (n as u64) << 32 ^ fxhash(name));
    let out = match name {
        "wigner-orthogonality" => {
            let j = HalfInt::spin_of_dim(n)?;
            let mut err = 0.0f64;
            for big_j in 0..n {
                let jj = HalfInt::integer(big_j as i32);
                for m in jj.projections() {
                    let mut s = num_rational::BigRational::from_integer(0.into());
                    for m1 in j.projections() {
                        for m2 in j.projections() {
                            s += three_j(j, j, jj, m1, m2, m)?.square();
                        }
                    }
                    s *= num_rational::BigRational::from_integer((2 * big_j as i64 + 1).into());
                    err = err.max((num_traits::ToPrimitive::to_f64(&s).unwrap_or(f64::NAN) - 1.0).abs());
                }
            }
            Outcome::error(err)
        }
        "theta-structure" => {
            let t = theta_matrix(n)?;
            let closed = (0..n).all(|j| {
                theta_row0(n, j).is_ok_and(|x| &x == t.exact(j, 0))
                    && theta_row1(n, j).is_ok_and(|x| &x == t.exact(j, 1))
            });
            let trace_ok = t.trace_exact() == Surd::from_integer((n % 2) as i64);
            let ok = t.is_symmetric() && t.is_involution() && trace_ok && closed;
            Outcome::flag(ok, "exact symmetry, involution, trace or closed-form rows failed")
        }
        "theta-dense-oracle" => {
            let v = v_for(n, opts.v_fault)?;
            let ps = dense::projectors(n)?;
            let t = theta_matrix(n)?;
            let mut err = 0.0f64;
            for (k, pk) in ps.iter().enumerate() {
                let img = dense::partial_time_reversal_with(pk, &v)?;
                for (j, pj) in ps.iter().enumerate() {
                    let w = (((2 * j + 1) * (2 * k + 1)) as f64).sqrt();
                    err = err.max((pj.trace_product(&img).re / w - t.get(j, k)).abs());
                }
            }
            Outcome::error(err)
        }
        "appendix-a-identity" => {
            let v = v_for(n, opts.v_fault)?;
            let f = dense::flip(n)?;
            let mut err = 0.0f64;
            for k in 0..n {
                let lhs = dense::partial_time_reversal_with(&dense::projector(n, k)?, &v)?;
                let rhs = dense::q_operator(n, k)?.matrix() * f.matrix();
                err = err.max(max_abs_diff(lhs.matrix(), &rhs));
            }
            Outcome::error(err)
        }
        "rotational-invariance" => {
            let v = v_for(n, opts.v_fault)?;
            let ps = dense::projectors(n)?;
            let spin = dense::total_spin(n)?;
            let id = CMatrix::identity(n, n).unscale(n as f64);
            let mut err = 0.0f64;
            for _ in 0..opts.samples {
                let axis = [0, 1, 2].map(|_| r.random_range(-std::f64::consts::PI..std::f64::consts::PI));
                let d = dense::rotation(n, axis)?;
                err = err.max(max_abs_diff(&(&v * d.conjugate() * v.adjoint()), &d));
                let rho = dense::invariant_operator_from(&random_state_alpha(n, &mut r)?, &ps);
                for s in &spin {
                    err = err.max(dense::max_abs(&(rho.matrix() * s - s * rho.matrix())));
                }
                err = err.max(max_abs_diff(&dense::partial_trace_second(&rho), &id));
                err = err.max(max_abs_diff(&dense::partial_trace_first(&rho), &id));
            }
            Outcome::error(err)
        }
        "functional-transform" => {
            let t = theta_matrix(n)?;
            let mut err = 0.0f64;
            for _ in 0..opts.samples.min(20) {
                let p1 = LocalState::random(n, &mut r)?;
                let p2 = LocalState::random(n, &mut r)?;
                let pf = dense::alpha_functionals(&p1, &p2, Functional::Projector)?;
                let tf = dense::alpha_functionals(&p1, &p2, Functional::Tensor)?;
                err = err.max(max_diff(apply_theta(&t, &pf)?.values(), tf.values()));
            }
            Outcome::error(err)
        }
        "negativity-oracle" | "cross-norm-oracle" => {
            let ps = dense::projectors(n)?;
            let mut err = 0.0f64;
            for _ in 0..opts.samples {
                let a = random_state_alpha(n, &mut r)?;
                let rho = dense::invariant_operator_from(&a, &ps);
                let (formula, oracle) = if name == "negativity-oracle" {
                    (negativity_trace_norm(&a), dense::partial_transpose(&rho).trace_norm())
                } else {
                    (cross_norm(&a), dense::trace_norm(&dense::realignment(&rho)))
                };
                err = err.max((formula - oracle).abs());
            }
            Outcome::error(err)
        }
        "quadrupole-eigen" if n == 4 => {
            let mut err = 0.0f64;
            for _ in 0..opts.samples {
                let phi = LocalState::random(4, &mut r)?;
                let a = dense::quadrupole_form(&phi)?;
                err = err.max((&a * phi.amplitudes() - phi.amplitudes().unscale(5f64.sqrt())).norm());
                let c = [0, 1, 2, 3].map(|k| phi.amplitudes()[k]);
                err = err.max(max_abs_diff(&a, &dense::quadrupole_form_explicit(c)));
            }
            Outcome::error(err)
        }
        "range-inequality" if n == 4 => {
            let ps = dense::projectors(4)?;
            let mut worst = f64::INFINITY;
            let mut all_separable = true;
            for _ in 0..opts.samples {
                let p1 = LocalState::random(4, &mut r)?;
                let p2 = LocalState::random(4, &mut r)?;
                let a = dense::alpha_functionals(&p1, &p2, Functional::Tensor)?;
                worst = worst.min(a.values()[2] - a.values()[0] / 5f64.sqrt());
                let (tw, _) = dense::twirl_with(&DenseOperator::pure(4, &p1.tensor(&p2))?, &ps)?;
                all_separable &= classify(&tw) == Classification::Separable;
            }
            let ok = worst >= -opts.tolerance && all_separable;
            Outcome {
                err: if ok { 0.0 } else { (-worst).max(f64::MIN_POSITIVE) },
                detail: (!ok).then(|| format!("min α̃₂ − α̃₀/√5 = {worst:e}, all separable: {all_separable}")),
            }
        }
        "geometry-vertices" if n <= 4 => {
            let sp = ppt_polytope::<Surd>(n)?;
            let ss = separable_polytope::<Surd>(n)?;
            let mut ok = ss.vertices().iter().all(|v| sp.contains(v));
            for v in sp.vertices() {
                let a = AlphaVector::from_reduced_exact(n, v)?;
                ok &= is_ppt(&a)?;
                let want = if ss.has_vertex(v) {
                    Classification::Separable
                } else {
                    Classification::BoundEntangledPpt
                };
                ok &= classify(&a) == want;
            }
            let expected = match n {
                2 => (2, 2),
                3 => (4, 4),
                _ => (8, 6),
            };
            ok &= (sp.vertices().len(), ss.vertices().len()) == expected;
            Outcome::flag(ok, "polytope vertex sets disagree with the classifier")
        }
        _ => return Ok(None),
    };
    Ok(Some(out))
}

fn fxhash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    })
}

/// Runs every applicable suite for each `n`, in parallel across `n`, with
/// results ordered by `n` then suite.
pub fn run(ns: &[usize], opts: &VerifyOptions) -> VerifyReport {
    let per_n: Vec<Vec<SuiteResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ns.iter().map(|&n| scope.spawn(move || run_for(n, opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    VerifyReport {
        results: per_n.into_iter().flatten().collect(),
    }
}

fn run_for(n: usize, opts: &VerifyOptions) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .filter_map(|&suite| match run_suite(suite, n, opts) {
            Ok(None) => None,
            Ok(Some(o)) => Some(SuiteResult {
                suite,
                n,
                passed: o.err <= opts.tolerance && o.detail.is_none(),
                max_error: o.err,
                detail: o.detail,
            }),
            Err(e) => Some(SuiteResult {
                suite,
                n,
                passed: false,
                max_error: f64::INFINITY,
                detail: Some(e.to_string()),
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let opts = VerifyOptions {
            samples: 10,
            ..Default::default()
        };
        let rep = run(&[2, 3, 4], &opts);
        for r in &rep.results {
            assert!(r.passed, "{r:?}");
        }
        assert!(rep.results.iter().any(|r| r.suite == "quadrupole-eigen"));
        let order: Vec<usize> = rep.results.iter().map(|r| r.n).collect();
        assert!(order.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sign_error_in_v_is_caught() {
        for n in 2..=5 {
            let opts = VerifyOptions {
                samples: 5,
                v_fault: Some(VFault::FlipSign(0)),
                ..Default::default()
            };
            let rep = run(&[n], &opts);
            assert!(rep.failures().any(|r| r.suite == "appendix-a-identity"), "n = {n}");
        }
    }
}
