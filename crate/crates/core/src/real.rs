//! Scalar abstraction shared by the double-precision and multiprecision paths.
//!
//! Toeplitz moment matrices of exponential symbols have condition numbers of
//! order `exp(4t)`, and the Hastings–McLeod separatrix amplifies local
//! integration errors by `exp((2√2/3)|x|^{3/2})` on the negative axis. Both
//! the Levinson recursion and the Painlevé integrator are therefore written
//! against [`Real`] so that they can run in `f64` or in [`MpFloat`] with a
//! working precision chosen from the problem's dynamic range.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Field operations plus the handful of elementary functions the solvers need.
///
/// Constants are created through [`Real::cst`] on an existing value so that a
/// multiprecision computation never silently drops to a lower precision.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant carrying the same precision as `self`.
    fn cst(&self, x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn cos(&self) -> Self;
    fn sin(&self) -> Self;
    fn pi(&self) -> Self;

    fn zero_like(&self) -> Self {
        self.cst(0.0)
    }

    fn one_like(&self) -> Self {
        self.cst(1.0)
    }

    /// Working precision in bits (53 for `f64`).
    fn precision_bits(&self) -> usize;

    fn powi(&self, n: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            n >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn cst(&self, x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn pi(&self) -> Self {
        std::f64::consts::PI
    }
    fn precision_bits(&self) -> usize {
        53
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

/// Binary floating point number with a fixed mantissa length.
///
/// Binary operations run at the larger of the two operand precisions.
#[derive(Clone)]
pub struct MpFloat {
    v: BigFloat,
    prec: usize,
}

impl MpFloat {
    pub fn new(x: f64, prec: usize) -> Self {
        Self {
            v: BigFloat::from_f64(x, prec),
            prec,
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: usize) -> Self {
        let n = BigFloat::from_f64(num as f64, prec);
        let d = BigFloat::from_f64(den as f64, prec);
        Self {
            v: n.div(&d, prec, RM),
            prec,
        }
    }

    fn wrap(v: BigFloat, prec: usize) -> Self {
        Self { v, prec }
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpFloat({:e}; {} bits)", self.to_f64(), self.prec)
    }
}

impl PartialEq for MpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                let p = self.prec.max(rhs.prec);
                MpFloat::wrap(self.v.$method(&rhs.v, p, RM), p)
            }
        }
    };
}

mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        let p = self.prec;
        MpFloat::wrap(self.v.neg(), p)
    }
}

impl Real for MpFloat {
    fn cst(&self, x: f64) -> Self {
        MpFloat::new(x, self.prec)
    }

    fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exp, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        // Mantissa words are little-endian and normalized, value = 0.m × 2^exp.
        let n = words.len();
        if n == 0 || words[n - 1] == 0 {
            return 0.0;
        }
        let hi = words[n - 1] as f64;
        let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        let mant = hi + lo * 2f64.powi(-64);
        let e = exp - 64;
        let mag = if e < -1000 {
            mant * 2f64.powi(-1000) * 2f64.powi(e + 1000)
        } else if e > 1000 {
            mant * 2f64.powi(1000) * 2f64.powi(e - 1000)
        } else {
            mant * 2f64.powi(e)
        };
        match sign {
            Sign::Pos => mag,
            Sign::Neg => -mag,
        }
    }

    fn abs(&self) -> Self {
        MpFloat::wrap(self.v.abs(), self.prec)
    }

    fn sqrt(&self) -> Self {
        MpFloat::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    fn exp(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.exp(self.prec, RM, &mut cc.borrow_mut()));
        MpFloat::wrap(v, self.prec)
    }

    fn ln(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.ln(self.prec, RM, &mut cc.borrow_mut()));
        MpFloat::wrap(v, self.prec)
    }

    fn cos(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.cos(self.prec, RM, &mut cc.borrow_mut()));
        MpFloat::wrap(v, self.prec)
    }

    fn sin(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.sin(self.prec, RM, &mut cc.borrow_mut()));
        MpFloat::wrap(v, self.prec)
    }

    fn pi(&self) -> Self {
        let v = CONSTS.with(|cc| cc.borrow_mut().pi(self.prec, RM));
        MpFloat::wrap(v, self.prec)
    }

    fn precision_bits(&self) -> usize {
        self.prec
    }
}

/// Minimal complex arithmetic over a [`Real`], enough for symbol evaluation.
#[derive(Clone, Debug)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let den = o.re.clone() * o.re.clone() + o.im.clone() * o.im.clone();
        Self {
            re: (self.re.clone() * o.re.clone() + self.im.clone() * o.im.clone()) / den.clone(),
            im: (self.im.clone() * o.re.clone() - self.re.clone() * o.im.clone()) / den,
        }
    }

    /// `exp(a + ib)`
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Self {
            re: m.clone() * self.im.cos(),
            im: m * self.im.sin(),
        }
    }
}
