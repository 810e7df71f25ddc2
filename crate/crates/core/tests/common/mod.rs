//! Test-only arbitrary-precision Airy oracle.
//!
//! Fixed-point big integers (scale 2^640) sum the Maclaurin series exactly
//! enough to survive the ~160 bits of cancellation at t = -30. Inputs are
//! doubles, so `t` and `t^3` are exact dyadic rationals. The only external
//! constants are Gamma(1/3) and Gamma(2/3) to 100 digits; they are checked
//! against the reflection identity with pi from Machin's formula.

#![allow(dead_code)]

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

const BITS: u32 = 640;

const GAMMA_ONE_THIRD: &str = "2.678938534707747633655692940974677644128689377957301100950428327590417610167743819540982889041188789";
const GAMMA_TWO_THIRDS: &str = "1.354117939426400416945288028154513785519327266056793698394022467963782965401742541675834147952972911";

fn one() -> BigInt {
    BigInt::one() << BITS
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> BITS
}

fn div(a: &BigInt, b: &BigInt) -> BigInt {
    (a << BITS) / b
}

fn sqrt(a: &BigInt) -> BigInt {
    (a << BITS).sqrt()
}

fn cbrt(a: &BigInt) -> BigInt {
    (a << (2 * BITS)).cbrt()
}

fn from_decimal(s: &str) -> BigInt {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal literal");
    (digits << BITS) / BigInt::from(10u32).pow(frac.len() as u32)
}

/// Exact fixed-point image of a finite double (truncated only below 2^-640).
fn from_f64(t: f64) -> BigInt {
    if t == 0.0 {
        return BigInt::zero();
    }
    let bits = t.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let shift = e + BITS as i64;
    let mag = if shift >= 0 {
        BigInt::from(m) << shift as u32
    } else {
        BigInt::from(m) >> (-shift) as u32
    };
    if t < 0.0 {
        -mag
    } else {
        mag
    }
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().expect("finite") * 2f64.powi(-(BITS as i32))
}

/// `atan(1/x)` by its Taylor series.
fn atan_inv(x: u32) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut term = one() / &x;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        let piece = &term / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += piece;
        } else {
            sum -= piece;
        }
        term /= &x2;
        k += 1;
    }
    sum
}

fn pi() -> BigInt {
    atan_inv(5) * 16 - atan_inv(239) * 4
}

struct Constants {
    /// Ai(0)
    c1: BigInt,
    /// -Ai'(0)
    c2: BigInt,
    sqrt3: BigInt,
}

fn constants() -> &'static Constants {
    static C: OnceLock<Constants> = OnceLock::new();
    C.get_or_init(|| {
        let three = one() * 3;
        let cbrt3 = cbrt(&three);
        let g13 = from_decimal(GAMMA_ONE_THIRD);
        let g23 = from_decimal(GAMMA_TWO_THIRDS);
        Constants {
            c1: div(&one(), &mul(&mul(&cbrt3, &cbrt3), &g23)),
            c2: div(&one(), &mul(&cbrt3, &g13)),
            sqrt3: sqrt(&three),
        }
    })
}

/// Relative error of `Gamma(1/3) Gamma(2/3) = 2 pi / sqrt 3` for the stored
/// constants.
pub fn gamma_reflection_error() -> f64 {
    let lhs = mul(&from_decimal(GAMMA_ONE_THIRD), &from_decimal(GAMMA_TWO_THIRDS));
    let rhs = div(&(pi() * 2), &sqrt(&(one() * 3)));
    let diff = (&lhs - &rhs).abs();
    // to_f64 of a tiny fixed-point value would underflow; compare in bits
    if diff.is_zero() {
        0.0
    } else {
        2f64.powi(diff.bits() as i32 - rhs.bits() as i32)
    }
}

/// `pi` to double precision, as a check on the Machin series itself.
pub fn pi_f64() -> f64 {
    to_f64(&pi())
}

/// `(Ai, Bi, Ai', Bi')` at `t`, accurate far beyond double precision for
/// `|t| <= 30`.
pub fn airy(t: f64) -> [f64; 4] {
    let k = constants();
    let tt = from_f64(t);
    let t3 = mul(&mul(&tt, &tt), &tt);

    // f = sum a_k, a_k = t^{3k} / prod; fk = sum k a_k, so f' = 3 fk / t
    let (mut f, mut fk) = (BigInt::zero(), BigInt::zero());
    let mut a = one();
    let mut n = 0u64;
    while !a.is_zero() {
        f += &a;
        fk += &a * n;
        a = mul(&a, &t3) / BigInt::from((3 * n + 2) * (3 * n + 3));
        n += 1;
    }
    // g = sum b_k with b_0 = t; g' = (3 gk + g) / t
    let (mut g, mut gk) = (BigInt::zero(), BigInt::zero());
    let mut b = tt.clone();
    n = 0;
    while !b.is_zero() {
        g += &b;
        gk += &b * n;
        b = mul(&b, &t3) / BigInt::from((3 * n + 3) * (3 * n + 4));
        n += 1;
    }
    let (fp, gp) = if tt.is_zero() {
        (BigInt::zero(), one())
    } else {
        (div(&(fk * 3), &tt), div(&(gk * 3 + &g), &tt))
    };

    let ai = mul(&k.c1, &f) - mul(&k.c2, &g);
    let bi = mul(&k.sqrt3, &(mul(&k.c1, &f) + mul(&k.c2, &g)));
    let aip = mul(&k.c1, &fp) - mul(&k.c2, &gp);
    let bip = mul(&k.sqrt3, &(mul(&k.c1, &fp) + mul(&k.c2, &gp)));
    [to_f64(&ai), to_f64(&bi), to_f64(&aip), to_f64(&bip)]
}
