//! Exact Clebsch–Gordan coefficients and Wigner 3-j / 6-j symbols.
//!
//! All symbols are evaluated with the single-sum Racah formulas over exact
//! big-integer factorials and returned as [`SignedSqrtRational`]. Phases
//! follow the Condon–Shortley convention.
//!
//! The factorial table and the 6-j memo are process-wide and guarded by
//! reader/writer locks: lookups take a shared lock, growth takes the
//! exclusive lock once and then downgrades to reads.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::halfint::HalfInt;
use crate::sqrt_rational::SignedSqrtRational;
use crate::surd::Surd;

static FACTORIALS: LazyLock<RwLock<Vec<BigUint>>> = LazyLock::new(|| RwLock::new(vec![BigUint::one()]));

static SIX_J_MEMO: LazyLock<RwLock<HashMap<[i32; 6], SignedSqrtRational>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Runs `f` with a factorial table covering `0..=max`.
fn with_factorials<T>(max: usize, f: impl FnOnce(&[BigUint]) -> T) -> T {
    {
        let table = FACTORIALS.read().expect("factorial table poisoned");
        if table.len() > max {
            return f(&table);
        }
    }
    let mut table = FACTORIALS.write().expect("factorial table poisoned");
    while table.len() <= max {
        let k = table.len();
        let next = &table[k - 1] * BigUint::from(k);
        table.push(next);
    }
    f(&table)
}

fn big(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

fn phase(k: i32) -> i8 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Triangle rule: `|j1 − j2| ≤ j3 ≤ j1 + j2` with integral perimeter.
pub fn triangle_ok(j1: HalfInt, j2: HalfInt, j3: HalfInt) -> bool {
    let (a, b, c) = (j1.twice(), j2.twice(), j3.twice());
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c >= (a - b).abs() && c <= a + b
}

/// Squared triangle coefficient `Δ(abc)² = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)!`.
fn triangle_coefficient_sq(fact: &[BigUint], a: i32, b: i32, c: i32) -> BigRational {
    // arguments are twice-values with a valid triangle
    let n1 = ((a + b - c) / 2) as usize;
    let n2 = ((a - b + c) / 2) as usize;
    let n3 = ((-a + b + c) / 2) as usize;
    let d = ((a + b + c) / 2 + 1) as usize;
    BigRational::new(big(&(&fact[n1] * &fact[n2] * &fact[n3])), big(&fact[d]))
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Zero when `m1 + m2 + m3 ≠ 0` or the triangle rule fails; a domain error
/// when a projection is invalid for its magnitude.
pub fn three_j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<SignedSqrtRational> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j3.check_projection(m3)?;
    if (m1 + m2 + m3).twice() != 0 || !triangle_ok(j1, j2, j3) {
        return Ok(SignedSqrtRational::zero());
    }
    let (tj1, tj2, tj3) = (j1.twice(), j2.twice(), j3.twice());
    let (tm1, tm2, tm3) = (m1.twice(), m2.twice(), m3.twice());

    let max = ((tj1 + tj2 + tj3) / 2 + 1) as usize;
    with_factorials(max, |fact| {
        let f = |twice: i32| -> &BigUint { &fact[(twice / 2) as usize] };
        let delta_sq = triangle_coefficient_sq(fact, tj1, tj2, tj3);
        let proj = f(tj1 + tm1) * f(tj1 - tm1) * f(tj2 + tm2) * f(tj2 - tm2) * f(tj3 + tm3) * f(tj3 - tm3);
        let pref_sq = delta_sq * BigRational::from_integer(big(&proj));

        // k runs over integers keeping every factorial argument non-negative.
        let k_min = 0.max((tj2 - tj3 - tm1) / 2).max((tj1 - tj3 + tm2) / 2);
        let k_max = ((tj1 + tj2 - tj3) / 2).min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
        let mut sum = BigRational::zero();
        for k in k_min..=k_max {
            let den = &fact[k as usize]
                * f(tj3 - tj2 + tm1 + 2 * k)
                * f(tj3 - tj1 - tm2 + 2 * k)
                * f(tj1 + tj2 - tj3 - 2 * k)
                * f(tj1 - tm1 - 2 * k)
                * f(tj2 + tm2 - 2 * k);
            let term = BigRational::new(BigInt::one(), big(&den));
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let sign = phase((tj1 - tj2 - tm3) / 2) * sum.signum_i8();
        Ok(SignedSqrtRational::from_parts(sign, pref_sq * &sum * &sum))
    })
}

trait SignumI8 {
    fn signum_i8(&self) -> i8;
}

impl SignumI8 for BigRational {
    fn signum_i8(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// Clebsch–Gordan coefficient `⟨j1 m1 j2 m2 | J M⟩`.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<SignedSqrtRational> {
    j.check_projection(m)?;
    let w = three_j(j1, j2, j, m1, m2, -m)?;
    if w.is_zero() {
        return Ok(w);
    }
    let sign = phase((j1.twice() - j2.twice() + m.twice()) / 2);
    let mult = BigRational::from_integer(BigInt::from(j.multiplicity()));
    Ok(SignedSqrtRational::from_parts(sign * w.sign(), mult * w.radicand()))
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}`.
///
/// The Racah sum is rational and the four triangle coefficients contribute a
/// square root of a rational, so the value is carried as its signed square.
pub fn six_j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> SignedSqrtRational {
    if !(triangle_ok(j1, j2, j3) && triangle_ok(j1, j5, j6) && triangle_ok(j4, j2, j6) && triangle_ok(j4, j5, j3)) {
        return SignedSqrtRational::zero();
    }
    let key = [j1, j2, j3, j4, j5, j6].map(HalfInt::twice);
    if let Some(v) = SIX_J_MEMO.read().expect("6-j memo poisoned").get(&key) {
        return v.clone();
    }
    let value = six_j_racah(key);
    SIX_J_MEMO
        .write()
        .expect("6-j memo poisoned")
        .insert(key, value.clone());
    value
}

fn six_j_racah(t: [i32; 6]) -> SignedSqrtRational {
    let [a, b, c, d, e, f] = t;
    // triad sums and the three "quadrilateral" sums, all integral
    let alpha = [(a + b + c) / 2, (a + e + f) / 2, (d + b + f) / 2, (d + e + c) / 2];
    let beta = [(a + b + d + e) / 2, (b + c + e + f) / 2, (c + a + f + d) / 2];
    let t_min = *alpha.iter().max().expect("non-empty");
    let t_max = *beta.iter().min().expect("non-empty");
    with_factorials((t_max + 1) as usize, |fact| {
        let delta_sq = triangle_coefficient_sq(fact, a, b, c)
            * triangle_coefficient_sq(fact, a, e, f)
            * triangle_coefficient_sq(fact, d, b, f)
            * triangle_coefficient_sq(fact, d, e, c);
        let mut sum = BigRational::zero();
        for k in t_min..=t_max {
            let mut den = BigUint::one();
            for al in alpha {
                den *= &fact[(k - al) as usize];
            }
            for be in beta {
                den *= &fact[(be - k) as usize];
            }
            let term = BigRational::new(big(&fact[(k + 1) as usize]), big(&den));
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        SignedSqrtRational::from_parts(sum.signum_i8(), delta_sq * &sum * &sum)
    })
}

/// `√((2J+1)(2K+1)) · {j j J; j j K}` evaluated as the literal six-fold sum
/// over products of four 3-j symbols with the phase
/// `(−1)^{j+m1}(−1)^{j+m2}(−1)^{J+m3}(−1)^{j+m4}(−1)^{j+m5}(−1)^{K+m6}`.
///
/// This is an independent route to the Θ matrix element; it shares only the
/// 3-j kernel with [`six_j`].
pub fn six_j_via_3j_sum(j: HalfInt, big_j: i32, big_k: i32) -> Result<SignedSqrtRational> {
    j.check_magnitude()?;
    let tj = j.twice();
    for x in [big_j, big_k] {
        if x < 0 || 2 * x > 2 * tj {
            return domain(format!("coupled momentum {x} outside 0..={}", tj));
        }
    }
    let jj = HalfInt::integer(big_j);
    let kk = HalfInt::integer(big_k);
    let ms: Vec<HalfInt> = j.projections().collect();
    let m3s: Vec<HalfInt> = jj.projections().collect();
    let m6s: Vec<HalfInt> = kk.projections().collect();

    let mut cache: HashMap<[i32; 6], SignedSqrtRational> = HashMap::new();
    let mut w3 =
        |a: HalfInt, b: HalfInt, c: HalfInt, x: HalfInt, y: HalfInt, z: HalfInt| -> Result<SignedSqrtRational> {
            let key = [a, b, c, x, y, z].map(HalfInt::twice);
            if let Some(v) = cache.get(&key) {
                return Ok(v.clone());
            }
            let v = three_j(a, b, c, x, y, z)?;
            cache.insert(key, v.clone());
            Ok(v)
        };

    let mut total = Surd::zero();
    for &m1 in &ms {
        for &m2 in &ms {
            for &m3 in &m3s {
                // first symbol vanishes unless m1 + m2 + m3 = 0
                if (m1 + m2 + m3).twice() != 0 {
                    continue;
                }
                for &m4 in &ms {
                    for &m6 in &m6s {
                        // third symbol: −m4 − m2 + m6 = 0
                        if (m6 - m4 - m2).twice() != 0 {
                            continue;
                        }
                        for &m5 in &ms {
                            if (m5 - m1 - m6).twice() != 0 {
                                continue;
                            }
                            let a = w3(j, j, jj, m1, m2, m3)?;
                            let b = w3(j, j, kk, -m1, m5, -m6)?;
                            let c = w3(j, j, kk, -m4, -m2, m6)?;
                            let d = w3(j, j, jj, m4, -m5, -m3)?;
                            let prod = &(&a * &b) * &(&c * &d);
                            if prod.is_zero() {
                                continue;
                            }
                            let exponent = (tj + m1.twice()) / 2
                                + (tj + m2.twice()) / 2
                                + big_j
                                + m3.twice() / 2
                                + (tj + m4.twice()) / 2
                                + (tj + m5.twice()) / 2
                                + big_k
                                + m6.twice() / 2;
                            let term = prod.to_surd();
                            if phase(exponent) > 0 {
                                total += &term;
                            } else {
                                total -= &term;
                            }
                        }
                    }
                }
            }
        }
    }
    let scale = Surd::sqrt_int(((2 * big_j + 1) * (2 * big_k + 1)) as u64);
    let value = &total * &scale;
    match SignedSqrtRational::from_surd(&value) {
        Some(v) => Ok(v),
        None => domain(format!("3-j sum did not collapse to a single radical: {value}")),
    }
}

/// Float view of [`three_j`], for dense-matrix construction.
pub fn three_j_f64(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Result<f64> {
    three_j(j1, j2, j3, m1, m2, m3).map(|v| v.to_f64())
}
