//! Exact arithmetic in Q(√D).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// The number `(a + b√D)/c` with `c > 0` and `gcd(a, b, c) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: i64,
}

impl QuadNum {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: i64) -> Self {
        let (mut a, mut b, mut c) = (a.into(), b.into(), c.into());
        assert!(!c.is_zero(), "QuadNum denominator must be nonzero");
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        QuadNum { a, b, c, d }
    }

    pub fn from_int(n: impl Into<BigInt>, d: i64) -> Self {
        QuadNum::new(n, 0, 1, d)
    }

    pub fn from_ratio(r: &BigRational, d: i64) -> Self {
        QuadNum::new(r.numer().clone(), 0, r.denom().clone(), d)
    }

    pub fn sqrt_d(d: i64) -> Self {
        QuadNum::new(0, 1, 1, d)
    }

    pub fn zero(d: i64) -> Self {
        QuadNum::from_int(0, d)
    }

    pub fn one(d: i64) -> Self {
        QuadNum::from_int(1, d)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// True when the value is a rational integer.
    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.c.is_one()
    }

    pub fn rational_part(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.c.clone())
    }

    pub fn irrational_part(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.c.clone())
    }

    pub fn conj(&self) -> Self {
        QuadNum { a: self.a.clone(), b: -&self.b, c: self.c.clone(), d: self.d }
    }

    pub fn norm(&self) -> BigRational {
        let num = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        BigRational::new(num, &self.c * &self.c)
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(BigInt::from(2) * &self.a, self.c.clone())
    }

    /// Sign of the real value under the embedding `√D > 0` (requires `D > 0`).
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigInt::from(self.d);
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.signum() > 0 && self.conj().signum() > 0
    }

    /// Algebraic integer test for the order `Z[√D]` when `maximal` is false,
    /// or for `Z[(1+√D)/2]` when it is true (`D ≡ 1 mod 4`).
    pub fn is_in_order(&self, maximal: bool) -> bool {
        if self.c.is_one() {
            return true;
        }
        if !maximal || self.c != BigInt::from(2) {
            return false;
        }
        self.a.is_odd() && self.b.is_odd()
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // 1/((a+b√D)/c) = c(a − b√D)/(a² − Db²)
        let n = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        Some(QuadNum::new(&self.c * &self.a, -(&self.c * &self.b), n, self.d))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QuadNum::one(self.d);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Real value under `√D > 0`, computed without cancellation.
    pub fn to_f64(&self) -> f64 {
        let sd = (self.d as f64).sqrt();
        let a = big_to_f64(&self.a);
        let b = big_to_f64(&self.b);
        let c = big_to_f64(&self.c);
        let direct = a + b * sd;
        if sign_of(&self.a) * sign_of(&self.b) >= 0 || direct.abs() > 1e-3 * a.abs() {
            return direct / c;
        }
        // a + b√D = (a² − Db²)/(a − b√D)
        let n = &self.a * &self.a - BigInt::from(self.d) * &self.b * &self.b;
        big_to_f64(&n) / (a - b * sd) / c
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.d, other.d, "QuadNum operands from different fields");
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let surd = |b: &BigInt| if b.is_one() { format!("√{}", self.d) } else { format!("{b}√{}", self.d) };
        let num = match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => format!("{}", self.a),
            (true, false) if self.b.is_negative() => format!("-{}", surd(&self.b.abs())),
            (true, false) => surd(&self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                format!("{} {} {}", self.a, sign, surd(&self.b.abs()))
            }
        };
        if self.c.is_one() {
            write!(f, "{num}")
        } else {
            write!(f, "({num})/{}", self.c)
        }
    }
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNum {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: &QuadNum) -> QuadNum {
        self.check_same(rhs);
        QuadNum::new(
            &self.a * &rhs.c + &rhs.a * &self.c,
            &self.b * &rhs.c + &rhs.b * &self.c,
            &self.c * &rhs.c,
            self.d,
        )
    }
}

impl<'a> Sub<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: &QuadNum) -> QuadNum {
        self.check_same(rhs);
        QuadNum::new(
            &self.a * &rhs.c - &rhs.a * &self.c,
            &self.b * &rhs.c - &rhs.b * &self.c,
            &self.c * &rhs.c,
            self.d,
        )
    }
}

impl<'a> Mul<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: &QuadNum) -> QuadNum {
        self.check_same(rhs);
        let d = BigInt::from(self.d);
        QuadNum::new(
            &self.a * &rhs.a + d * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
            &self.c * &rhs.c,
            self.d,
        )
    }
}

impl<'a> Div<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn div(self, rhs: &QuadNum) -> QuadNum {
        self * &rhs.recip().expect("division by zero QuadNum")
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -&self.a, b: -&self.b, c: self.c.clone(), d: self.d }
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: QuadNum) -> QuadNum {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: &QuadNum) -> QuadNum {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<QuadNum> for &'a QuadNum {
            type Output = QuadNum;
            fn $m(self, rhs: QuadNum) -> QuadNum {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);
