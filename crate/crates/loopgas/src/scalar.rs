//! Exact scalar arithmetic over the ring Z[√2, 1/2].
//!
//! Every amplitude in this crate is of the form `(a + b·√2) / 2^k` with
//! integer `a`, `b` and a non-negative exponent `k`: loop superpositions only
//! ever pick up integer multiplicities and factors of `1/√2` per merged
//! single line, so this ring is closed under all state and operator algebra
//! we perform. Working in it keeps every equality test exact — "the residual
//! is zero" means identically zero, not small.
//!
//! The representation is canonical: either `k == 0`, or at least one of `a`,
//! `b` is odd. [`ExactScalar::new`] reduces to this form, so `==` is plain
//! field comparison. There is no division anywhere in the interface; model
//! code that needs quotients (expectation values) carries numerator and
//! denominator separately as an [`ExactRatio`].
//!
//! Coefficients are `i128` and every operation uses checked arithmetic: an
//! overflow is reported as [`OverflowError`] (via the `checked_*` methods) or
//! a panic with a clear message (via the operator traits), never silent
//! wrap-around. The quantities arising at the lattice sizes this crate
//! targets — multiplicities `2^n` with `n` below a few dozen, inner products
//! of a few thousand such terms — sit many orders of magnitude below the
//! `i128` range. The one place where coefficient growth is real (fraction-free
//! Gram elimination) uses arbitrary-precision integers locally instead; see
//! `spectral::gram_rank`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arithmetic overflowed the `i128` coefficient range.
///
/// At spec'd lattice sizes this indicates a logic error (for example an
/// unintended exponential blow-up), so callers generally treat it as fatal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("exact scalar overflow during {op}: coefficients exceed i128")]
pub struct OverflowError {
    /// Operation that overflowed, for diagnostics.
    pub op: &'static str,
}

/// An element `(a + b·√2) / 2^k` of Z[√2, 1/2], kept in canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    a: i128,
    b: i128,
    k: u32,
}

impl ExactScalar {
    /// Builds `(a + b·√2) / 2^k` and reduces it to canonical form.
    pub fn new(a: i128, b: i128, k: u32) -> Self {
        let mut s = ExactScalar { a, b, k };
        s.normalize();
        s
    }

    /// The additive identity.
    pub const fn zero() -> Self {
        ExactScalar { a: 0, b: 0, k: 0 }
    }

    /// The multiplicative identity.
    pub const fn one() -> Self {
        ExactScalar { a: 1, b: 0, k: 0 }
    }

    /// The integer `n`.
    pub fn from_int(n: i128) -> Self {
        ExactScalar { a: n, b: 0, k: 0 }
    }

    /// `√2`.
    pub const fn sqrt2() -> Self {
        ExactScalar { a: 0, b: 1, k: 0 }
    }

    /// `1 / 2^k`.
    pub fn half_pow(k: u32) -> Self {
        ExactScalar::new(1, 0, k)
    }

    /// `(1/√2)^s`, the weight a merged configuration gains per single line.
    ///
    /// For even `s` this is `1/2^(s/2)`; for odd `s` it is `√2 / 2^((s+1)/2)`.
    pub fn inv_sqrt2_pow(s: u32) -> Self {
        if s % 2 == 0 {
            ExactScalar::new(1, 0, s / 2)
        } else {
            ExactScalar::new(0, 1, (s + 1) / 2)
        }
    }

    /// Restores the canonical form: `k == 0` or not both coefficients even.
    fn normalize(&mut self) {
        if self.a == 0 && self.b == 0 {
            self.k = 0;
            return;
        }
        while self.k > 0 && self.a % 2 == 0 && self.b % 2 == 0 {
            self.a /= 2;
            self.b /= 2;
            self.k -= 1;
        }
    }

    /// The canonical `(a, b, k)` triple.
    pub fn parts(&self) -> (i128, i128, u32) {
        (self.a, self.b, self.k)
    }

    /// True iff the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// True iff the value is exactly one.
    pub fn is_one(&self) -> bool {
        *self == ExactScalar::one()
    }

    /// Checked addition.
    pub fn checked_add(&self, rhs: &Self) -> Result<Self, OverflowError> {
        let err = OverflowError { op: "add" };
        // Align denominators by scaling the smaller-k operand up.
        let k = self.k.max(rhs.k);
        let scale = |x: &Self| -> Result<(i128, i128), OverflowError> {
            let shift = k - x.k;
            if shift >= 127 {
                return Err(err.clone());
            }
            let m = 1i128 << shift;
            Ok((
                x.a.checked_mul(m).ok_or_else(|| err.clone())?,
                x.b.checked_mul(m).ok_or_else(|| err.clone())?,
            ))
        };
        let (la, lb) = scale(self)?;
        let (ra, rb) = scale(rhs)?;
        Ok(ExactScalar::new(
            la.checked_add(ra).ok_or_else(|| err.clone())?,
            lb.checked_add(rb).ok_or(err)?,
            k,
        ))
    }

    /// Checked multiplication, using `√2 · √2 = 2`.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, OverflowError> {
        let err = OverflowError { op: "mul" };
        let aa = self.a.checked_mul(rhs.a).ok_or_else(|| err.clone())?;
        let bb = self.b.checked_mul(rhs.b).ok_or_else(|| err.clone())?;
        let ab = self.a.checked_mul(rhs.b).ok_or_else(|| err.clone())?;
        let ba = self.b.checked_mul(rhs.a).ok_or_else(|| err.clone())?;
        let a = aa
            .checked_add(bb.checked_mul(2).ok_or_else(|| err.clone())?)
            .ok_or_else(|| err.clone())?;
        let b = ab.checked_add(ba).ok_or_else(|| err.clone())?;
        let k = self.k.checked_add(rhs.k).ok_or(err)?;
        Ok(ExactScalar::new(a, b, k))
    }

    /// Multiplies by `2^n` exactly (no overflow possible for the reduction).
    pub fn times_pow2(&self, n: u32) -> Result<Self, OverflowError> {
        if self.k >= n {
            return Ok(ExactScalar::new(self.a, self.b, self.k - n));
        }
        let shift = n - self.k;
        let err = OverflowError { op: "times_pow2" };
        if shift >= 127 {
            return Err(err);
        }
        let m = 1i128 << shift;
        Ok(ExactScalar::new(
            self.a.checked_mul(m).ok_or_else(|| err.clone())?,
            self.b.checked_mul(m).ok_or(err)?,
            0,
        ))
    }

    /// Sign of the real value: `-1`, `0`, or `+1`, decided exactly.
    pub fn signum(&self) -> i32 {
        match (self.a.signum(), self.b.signum()) {
            (0, 0) => 0,
            (sa, 0) => sa as i32,
            (0, sb) => sb as i32,
            (1, 1) => 1,
            (-1, -1) => -1,
            // Mixed signs: compare |a| against |b|·√2 via squares.
            // a + b√2 > 0 with a > 0 > b  ⟺  a² > 2b².
            (1, -1) | (-1, 1) => {
                let a2 = self
                    .a
                    .checked_mul(self.a)
                    .expect("exact scalar overflow during signum");
                let b2 = self
                    .b
                    .checked_mul(self.b)
                    .and_then(|x| x.checked_mul(2))
                    .expect("exact scalar overflow during signum");
                let cmp = a2.cmp(&b2);
                let dominant = if cmp == Ordering::Greater {
                    self.a.signum()
                } else {
                    self.b.signum()
                };
                if cmp == Ordering::Equal {
                    // a² = 2b² with a,b ≠ 0 is impossible (√2 irrational),
                    // so this branch cannot be reached from valid states.
                    unreachable!("a² = 2b² with nonzero integers");
                }
                dominant as i32
            }
            _ => unreachable!(),
        }
    }

    /// Nearest `f64` to the exact value.
    ///
    /// For coefficients below 2^53 (every value this crate produces in
    /// practice) the result is correctly rounded to within 1 ulp.
    pub fn to_f64(&self) -> f64 {
        (self.a as f64 + (self.b as f64) * std::f64::consts::SQRT_2) * 0.5f64.powi(self.k as i32)
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        ExactScalar::zero()
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}√2)/2^{}", self.a, self.b, self.k)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("exact scalar overflow during add")
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl SubAssign for ExactScalar {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("exact scalar overflow during mul")
    }
}

impl MulAssign for ExactScalar {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> Self {
        ExactScalar { a: -self.a, b: -self.b, k: self.k }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

/// Serialized form: the canonical triple with `a`, `b` as decimal strings
/// (JSON numbers cannot carry i128 faithfully).
#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    a: String,
    b: String,
    k: u32,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr { a: self.a.to_string(), b: self.b.to_string(), k: self.k }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        let a = repr.a.parse::<i128>().map_err(D::Error::custom)?;
        let b = repr.b.parse::<i128>().map_err(D::Error::custom)?;
        Ok(ExactScalar::new(a, b, repr.k))
    }
}

/// An exact quotient of two scalars, never actually divided out.
///
/// Quotients of ring elements generally leave the ring (denominators other
/// than powers of two appear as soon as a norm like 3 shows up), so
/// expectation values are kept as numerator/denominator pairs and compared by
/// cross-multiplication.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExactRatio {
    pub num: ExactScalar,
    pub den: ExactScalar,
}

impl ExactRatio {
    /// Builds `num / den`; the denominator must be nonzero.
    pub fn new(num: ExactScalar, den: ExactScalar) -> Self {
        assert!(!den.is_zero(), "exact ratio with zero denominator");
        ExactRatio { num, den }
    }

    /// True iff the ratio is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Sign of the ratio, decided exactly.
    pub fn signum(&self) -> i32 {
        self.num.signum() * self.den.signum()
    }

    /// Float value for reports.
    pub fn to_f64(&self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }
}

impl PartialEq for ExactRatio {
    fn eq(&self, other: &Self) -> bool {
        // n₁/d₁ = n₂/d₂ ⟺ n₁d₂ = n₂d₁ (denominators nonzero by construction).
        self.num * other.den == other.num * self.den
    }
}

impl Eq for ExactRatio {}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}
