//! Real-argument Airy functions Ai, Bi and their derivatives.
//!
//! Two evaluation routes, switched at `|t| = SERIES_LIMIT`:
//!
//! * `|t| <= SERIES_LIMIT`: the Maclaurin series `Ai = c1 f - c2 g`,
//!   `Bi = sqrt(3) (c1 f + c2 g)` summed in double-double arithmetic. The extra
//!   precision absorbs the cancellation between `f` and `g`, which for `t > 0`
//!   grows like `exp(2 zeta)`.
//! * `|t| > SERIES_LIMIT`: the asymptotic expansions in
//!   `zeta = (2/3) |t|^(3/2)`, exponential forms for `t > 0` and trigonometric
//!   forms for `t < 0`, each truncated at its smallest term. The phase
//!   `zeta - pi/4` is formed and reduced in double-double so the oscillating
//!   branch keeps full relative accuracy away from zeros.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Gamma(1/3), rounded to double.
pub const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_5;
/// Gamma(2/3), rounded to double.
pub const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_5;

// hi + lo pairs carry ~32 significant digits:
// Gamma(1/3) = 2.678938534707747633655692940974677644129...
// Gamma(2/3) = 1.354117939426400416945288028154513785519...
const GAMMA_ONE_THIRD_DD: DoubleDouble = DoubleDouble::new(GAMMA_ONE_THIRD, 1.794_779_864_822_524_4e-16);
const GAMMA_TWO_THIRDS_DD: DoubleDouble =
    DoubleDouble::new(GAMMA_TWO_THIRDS, -4.623_120_391_136_641_6e-17);
const CBRT_3_DD: DoubleDouble = DoubleDouble::new(1.442_249_570_307_408_3, 8.054_912_676_113_687e-17);
const SQRT_3_DD: DoubleDouble = DoubleDouble::new(1.732_050_807_568_877_2, 1.003_508_422_180_690_3e-16);
const FRAC_PI_2_DD: DoubleDouble = DoubleDouble::new(FRAC_PI_2, 6.123_233_995_736_766e-17);
const FRAC_PI_4_DD: DoubleDouble = DoubleDouble::new(FRAC_PI_4, 3.061_616_997_868_383e-17);

/// Boundary between the power series and the asymptotic expansions.
///
/// At |t| = 9, zeta = 18: the asymptotic remainder is ~exp(-2 zeta) ~ 2e-16,
/// and the double-double series loses ~exp(2 zeta) * 1e-32 ~ 1e-16 to
/// cancellation in Ai.
pub const SERIES_LIMIT: f64 = 9.0;

const MAX_SERIES_TERMS: usize = 200;
/// Relative size of the last kept series term, measured against the largest
/// magnitude seen in that series (the scale at which rounding happens).
const SERIES_TOL: f64 = 1e-33;
const ASYMPTOTIC_TOL: f64 = 1e-18;
const MAX_ASYMPTOTIC_TERMS: usize = 80;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Ai, Bi, Ai', Bi' evaluated at one argument `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryQuartet {
    pub t: f64,
    pub ai: f64,
    pub bi: f64,
    pub ai_prime: f64,
    pub bi_prime: f64,
}

impl AiryQuartet {
    /// `Ai Bi' - Ai' Bi`, identically `1/pi`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// Ai(0) and -Ai'(0) in double-double.
fn origin_constants() -> (DoubleDouble, DoubleDouble) {
    // Ai(0) = 3^(-2/3) / Gamma(2/3),  -Ai'(0) = 3^(-1/3) / Gamma(1/3)
    let c1 = (CBRT_3_DD * CBRT_3_DD * GAMMA_TWO_THIRDS_DD).recip();
    let c2 = (CBRT_3_DD * GAMMA_ONE_THIRD_DD).recip();
    (c1, c2)
}

/// Evaluate Ai, Bi, Ai', Bi' at a finite real `t`.
///
/// Fails with [`Error::InvalidArgument`] for non-finite `t` (or `t` so negative
/// that `zeta` is not representable, below about -4e205) and with
/// [`Error::Overflow`] once Bi or Bi' exceeds the double range (t >~ 104).
pub fn airy_eval(t: f64) -> Result<AiryQuartet> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("airy argument must be finite, got {t}")));
    }
    if t.abs() <= SERIES_LIMIT {
        Ok(maclaurin(t))
    } else if t > 0.0 {
        asymptotic_positive(t)
    } else {
        asymptotic_negative(t)
    }
}

fn maclaurin(t: f64) -> AiryQuartet {
    let (c1, c2) = origin_constants();
    let c1f = c1.to_f64();
    let c2f = c2.to_f64();
    if t == 0.0 {
        let s3 = SQRT_3_DD;
        return AiryQuartet {
            t,
            ai: c1f,
            bi: (s3 * c1).to_f64(),
            ai_prime: -c2f,
            bi_prime: (s3 * c2).to_f64(),
        };
    }

    let t3 = DoubleDouble::prod(t, t).mul_f64(t);

    // f = sum 3^k (1/3)_k t^(3k) / (3k)!      g = sum 3^k (2/3)_k t^(3k+1) / (3k+1)!
    let mut f_term = DoubleDouble::ONE;
    let mut g_term = DoubleDouble::from_f64(t);
    let mut fp_term = DoubleDouble::prod(t, t).mul_f64(0.5);
    let mut gp_term = DoubleDouble::ONE;

    let mut f = f_term;
    let mut g = g_term;
    let mut fp = fp_term;
    let mut gp = gp_term;

    let mut peak = [1.0_f64, t.abs(), fp_term.hi.abs(), 1.0];

    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        f_term = (f_term * t3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        g_term = (g_term * t3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        gp_term = (gp_term * t3).div_f64((3.0 * kf) * (3.0 * kf - 2.0));
        if k >= 2 {
            fp_term = (fp_term * t3).div_f64((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
        }

        f = f + f_term;
        g = g + g_term;
        gp = gp + gp_term;
        if k >= 2 {
            fp = fp + fp_term;
        }

        let terms = [f_term.hi, g_term.hi, fp_term.hi, gp_term.hi];
        let sums = [f.hi, g.hi, fp.hi, gp.hi];
        let mut converged = true;
        for i in 0..4 {
            peak[i] = peak[i].max(terms[i].abs()).max(sums[i].abs());
            if terms[i].abs() > SERIES_TOL * peak[i] {
                converged = false;
            }
        }
        // the k = 1 derivative term is the seed above; only k >= 2 tests it
        if converged && k >= 2 {
            break;
        }
    }

    let ai = c1 * f - c2 * g;
    let bi = SQRT_3_DD * (c1 * f + c2 * g);
    let ai_prime = c1 * fp - c2 * gp;
    let bi_prime = SQRT_3_DD * (c1 * fp + c2 * gp);
    AiryQuartet {
        t,
        ai: ai.to_f64(),
        bi: bi.to_f64(),
        ai_prime: ai_prime.to_f64(),
        bi_prime: bi_prime.to_f64(),
    }
}

/// `zeta = (2/3) x^(3/2)` in double-double.
fn zeta_dd(x: f64) -> DoubleDouble {
    let two_thirds = DoubleDouble::from_f64(2.0).div_f64(3.0);
    DoubleDouble::sqrt(x).mul_f64(x) * two_thirds
}

/// Coefficients u_k, v_k of the Airy asymptotic expansions, generated by
/// the standard recurrence.
struct AsymptoticCoefficients {
    k: usize,
    u: f64,
}

impl AsymptoticCoefficients {
    fn new() -> Self {
        Self { k: 0, u: 1.0 }
    }
}

impl Iterator for AsymptoticCoefficients {
    /// (k, u_k, v_k)
    type Item = (usize, f64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let k = self.k;
        if k > 0 {
            let kf = k as f64;
            self.u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
        }
        let kf = k as f64;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * self.u;
        self.k += 1;
        Some((k, self.u, v))
    }
}

/// Visit `(k, u_k / zeta^k, v_k / zeta^k)` until the terms drop below
/// tolerance or start to grow.
fn for_each_asymptotic_term(zeta: f64, mut visit: impl FnMut(usize, f64, f64)) {
    let mut inv_pow = 1.0;
    let mut prev = f64::INFINITY;
    for (k, u, v) in AsymptoticCoefficients::new().take(MAX_ASYMPTOTIC_TERMS) {
        let tu = u * inv_pow;
        let tv = v * inv_pow;
        let size = tu.abs().max(tv.abs());
        if k > 0 && size > prev {
            break;
        }
        visit(k, tu, tv);
        if size < ASYMPTOTIC_TOL {
            break;
        }
        prev = size;
        inv_pow /= zeta;
    }
}

fn asymptotic_positive(t: f64) -> Result<AiryQuartet> {
    let zeta = zeta_dd(t);
    let z = zeta.hi;

    let (mut su_minus, mut sv_minus, mut su_plus, mut sv_plus) = (0.0, 0.0, 0.0, 0.0);
    for_each_asymptotic_term(z, |k, tu, tv| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su_minus += sign * tu;
        sv_minus += sign * tv;
        su_plus += tu;
        sv_plus += tv;
    });

    let quarter = t.sqrt().sqrt();
    let decay = (-z).exp() * (1.0 - zeta.lo);
    let ai = decay * FRAC_1_SQRT_PI / (2.0 * quarter) * su_minus;
    let ai_prime = -decay * quarter * FRAC_1_SQRT_PI / 2.0 * sv_minus;

    // split the growing exponential so a finite result is not lost to an
    // intermediate overflow of exp(zeta)
    let half = (0.5 * z).exp();
    let correction = 1.0 + zeta.lo;
    let bi = (half * (FRAC_1_SQRT_PI / quarter * su_plus)) * half * correction;
    let bi_prime = (half * (FRAC_1_SQRT_PI * quarter * sv_plus)) * half * correction;
    if !bi.is_finite() || !bi_prime.is_finite() {
        return Err(Error::Overflow { t });
    }

    Ok(AiryQuartet {
        t,
        ai,
        bi,
        ai_prime,
        bi_prime,
    })
}

/// sin and cos of a double-double angle, reduced modulo pi/2 in double-double.
fn sin_cos_dd(theta: DoubleDouble) -> (f64, f64) {
    let n = (theta.hi / FRAC_PI_2_DD.hi).round();
    let r = theta - DoubleDouble::prod(FRAC_PI_2_DD.hi, n) - DoubleDouble::from_f64(FRAC_PI_2_DD.lo * n);
    let (s0, c0) = r.hi.sin_cos();
    let s = s0 + r.lo * c0;
    let c = c0 - r.lo * s0;
    match (n as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

fn asymptotic_negative(t: f64) -> Result<AiryQuartet> {
    let x = -t;
    let zeta = zeta_dd(x);
    if !zeta.hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "airy argument {t} is too negative for the oscillation phase to be represented"
        )));
    }
    let (sin, cos) = sin_cos_dd(zeta - FRAC_PI_4_DD);

    // P collects even k, Q odd k, both with alternating signs in k / 2
    let (mut pu, mut qu, mut pv, mut qv) = (0.0, 0.0, 0.0, 0.0);
    for_each_asymptotic_term(zeta.hi, |k, tu, tv| {
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * tu;
            pv += sign * tv;
        } else {
            qu += sign * tu;
            qv += sign * tv;
        }
    });

    let quarter = x.sqrt().sqrt();
    let amp = FRAC_1_SQRT_PI / quarter;
    let amp_prime = FRAC_1_SQRT_PI * quarter;
    Ok(AiryQuartet {
        t,
        ai: amp * (cos * pu + sin * qu),
        bi: amp * (cos * qu - sin * pu),
        ai_prime: amp_prime * (sin * pv - cos * qv),
        bi_prime: amp_prime * (cos * pv + sin * qv),
    })
}

/// Central-difference residuals `(Ai'' - t Ai, Bi'' - t Bi)` at `t`, using the
/// supplied quartet for the centre values.
pub fn airy_ode_residual(t: f64, q: &AiryQuartet, h: f64) -> Result<(f64, f64)> {
    if h <= 0.0 || !(t + h).is_finite() || !(t - h).is_finite() {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive and keep t +- h finite, got h = {h}")));
    }
    let plus = airy_eval(t + h)?;
    let minus = airy_eval(t - h)?;
    let h2 = h * h;
    let ai_dd = (plus.ai - 2.0 * q.ai + minus.ai) / h2;
    let bi_dd = (plus.bi - 2.0 * q.bi + minus.bi) / h2;
    Ok((ai_dd - t * q.ai, bi_dd - t * q.bi))
}

/// `1/pi`, the value of the Airy Wronskian.
pub const WRONSKIAN: f64 = 1.0 / PI;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // reference values: 40-digit mpmath, rounded
    #[test]
    fn values_at_origin() {
        let q = airy_eval(0.0).unwrap();
        assert!(rel(q.ai, 0.355_028_053_887_817_2) < 1e-15);
        assert!(rel(q.bi, 0.614_926_627_446_000_7) < 1e-15);
        assert!(rel(q.ai_prime, -0.258_819_403_792_806_8) < 1e-15);
        assert!(rel(q.bi_prime, 0.448_288_357_353_826_4) < 1e-15);
    }

    #[test]
    fn values_at_plus_minus_one() {
        let q = airy_eval(1.0).unwrap();
        assert!(rel(q.ai, 0.135_292_416_312_881_42) < 1e-14);
        assert!(rel(q.bi, 1.207_423_594_952_871_3) < 1e-14);
        let q = airy_eval(-1.0).unwrap();
        assert!(rel(q.ai, 0.535_560_883_292_352_1) < 1e-14);
        assert!(rel(q.bi, 0.103_997_389_496_944_6) < 1e-14);
    }

    #[test]
    fn gamma_reflection_identity() {
        // Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3), checked in double-double
        let lhs = GAMMA_ONE_THIRD_DD * GAMMA_TWO_THIRDS_DD * SQRT_3_DD;
        let two_pi = DoubleDouble::new(2.0 * PI, 2.449_293_598_294_706_4e-16);
        assert!((lhs - two_pi).to_f64().abs() < 1e-30);
        assert!((GAMMA_ONE_THIRD * GAMMA_TWO_THIRDS - 2.0 * PI / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(airy_eval(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(matches!(airy_eval(f64::INFINITY), Err(Error::InvalidArgument(_))));
        assert!(matches!(airy_eval(f64::NEG_INFINITY), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn overflow_for_large_positive() {
        assert!(airy_eval(100.0).is_ok());
        assert!(matches!(airy_eval(106.0), Err(Error::Overflow { .. })));
        assert!(matches!(airy_eval(1e10), Err(Error::Overflow { .. })));
    }

    #[test]
    fn branches_agree_near_switch() {
        // evaluate both routes on either side of the boundary
        for &t in &[8.0, 8.5, 9.0, -8.0, -8.5, -9.0] {
            let s = maclaurin(t);
            let a = if t > 0.0 { asymptotic_positive(t).unwrap() } else { asymptotic_negative(t).unwrap() };
            let scale = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
            if t > 0.0 {
                assert!(scale(s.ai, a.ai) < 5e-14, "ai {t}: {} vs {}", s.ai, a.ai);
                assert!(scale(s.ai_prime, a.ai_prime) < 5e-14, "aip {t}");
                assert!(scale(s.bi, a.bi) < 5e-14, "bi {t}");
                assert!(scale(s.bi_prime, a.bi_prime) < 5e-14, "bip {t}");
            } else {
                // oscillatory: compare against the local modulus
                let m = (s.ai * s.ai + s.bi * s.bi).sqrt();
                let n = (s.ai_prime * s.ai_prime + s.bi_prime * s.bi_prime).sqrt();
                assert!((s.ai - a.ai).abs() / m < 5e-14, "ai {t}");
                assert!((s.bi - a.bi).abs() / m < 5e-14, "bi {t}");
                assert!((s.ai_prime - a.ai_prime).abs() / n < 5e-14, "aip {t}");
                assert!((s.bi_prime - a.bi_prime).abs() / n < 5e-14, "bip {t}");
            }
        }
    }

    #[test]
    fn ode_residual_small() {
        for &t in &[0.0, 2.0, -3.0] {
            let q = airy_eval(t).unwrap();
            let (ra, rb) = airy_ode_residual(t, &q, 1e-4).unwrap();
            assert!(ra.abs() < 1e-6 && rb.abs() < 1e-6, "t={t}: {ra} {rb}");
        }
    }

    #[test]
    fn ode_residual_rejects_bad_step() {
        let q = airy_eval(0.0).unwrap();
        assert!(airy_ode_residual(0.0, &q, 0.0).is_err());
        assert!(airy_ode_residual(0.0, &q, -1e-3).is_err());
    }

    #[test]
    fn ai_sign_changes_match_bisected_zeros() {
        // count sign changes on a 0.01 grid over [-20, 0], then confirm each
        // bracket holds exactly one zero found by bisection
        let step = 0.01;
        let n = 2000;
        let mut brackets = Vec::new();
        let mut prev = airy_eval(-20.0).unwrap().ai;
        for i in 1..=n {
            let s = -20.0 + step * i as f64;
            let cur = airy_eval(s).unwrap().ai;
            if prev.signum() != cur.signum() {
                brackets.push((s - step, s));
            }
            prev = cur;
        }
        let zeros: Vec<f64> = brackets
            .iter()
            .map(|&(lo, hi)| crate::roots::bisect(|t| airy_eval(t).map(|q| q.ai).unwrap(), lo, hi, 1e-13).unwrap())
            .collect();
        // Ai has 19 zeros in [-20, 0]; the first is -2.338107410459767
        assert_eq!(zeros.len(), 19);
        assert!((zeros.last().unwrap() + 2.338_107_410_459_767).abs() < 1e-11);
        for w in zeros.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let a = airy_eval(w[0] - 1e-6).unwrap().ai.signum();
            let m = airy_eval(mid).unwrap().ai.signum();
            let b = airy_eval(w[1] + 1e-6).unwrap().ai.signum();
            assert!(a != m && m != b);
        }
    }

    proptest! {
        #[test]
        fn wronskian_holds(t in -100.0f64..100.0) {
            let q = airy_eval(t).unwrap();
            let w = q.wronskian();
            // relative to the size of the products that form it
            let scale = (q.ai * q.bi_prime).abs() + (q.ai_prime * q.bi).abs();
            prop_assert!((w - WRONSKIAN).abs() <= 1e-12 * scale.max(WRONSKIAN), "t={} w={}", t, w);
        }

        #[test]
        fn positive_axis_signs(t in 1e-6f64..100.0) {
            let q = airy_eval(t).unwrap();
            prop_assert!(q.ai > 0.0 && q.bi > 0.0 && q.ai_prime < 0.0 && q.bi_prime > 0.0);
        }

        #[test]
        fn finite_everywhere_below_overflow(t in -1e12f64..100.0) {
            let q = airy_eval(t).unwrap();
            prop_assert!(q.ai.is_finite() && q.bi.is_finite() && q.ai_prime.is_finite() && q.bi_prime.is_finite());
        }

        #[test]
        fn derivatives_match_finite_differences(t in -20.0f64..6.0) {
            let h = 1e-5;
            let p = airy_eval(t + h).unwrap();
            let m = airy_eval(t - h).unwrap();
            let q = airy_eval(t).unwrap();
            let dai = (p.ai - m.ai) / (2.0 * h);
            let dbi = (p.bi - m.bi) / (2.0 * h);
            prop_assert!((dai - q.ai_prime).abs() < 1e-7 * (1.0 + q.ai_prime.abs()));
            prop_assert!((dbi - q.bi_prime).abs() < 1e-7 * (1.0 + q.bi_prime.abs()));
        }
    }
}
