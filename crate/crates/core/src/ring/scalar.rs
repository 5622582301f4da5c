use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default prime used when a finite field is requested without a modulus.
pub const DEFAULT_PRIME: u64 = 32003;

/// Coefficient field of a polynomial ring: the rationals or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Builds the field of the given characteristic (0 or a prime below 2^32).
    pub fn from_characteristic(ch: u64) -> Option<Field> {
        match ch {
            0 => Some(Field::Rational),
            p if p < (1 << 32) && is_prime(p) => Some(Field::Prime(p)),
            _ => None,
        }
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Modular {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Option<Scalar> {
        if den.is_zero() {
            return None;
        }
        match self {
            Field::Rational => Some(Scalar::Rational(BigRational::new(num.clone(), den.clone()))),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let n = num.mod_floor(&pb).to_u64().unwrap();
                let d = den.mod_floor(&pb).to_u64().unwrap();
                if d == 0 {
                    return None;
                }
                let n = Scalar::Modular {
                    value: n,
                    modulus: p,
                };
                let d = Scalar::Modular {
                    value: d,
                    modulus: p,
                };
                Some(n * d.inverse())
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element of a coefficient field.
///
/// Modular scalars carry their modulus, so every scalar is self-describing;
/// mixing scalars from different fields is a logic error and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Modular { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inverse(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero scalar");
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        }
    }

    /// Signed integer representative, if the value is integral and small.
    /// Modular values use the symmetric range.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) if r.is_integer() => r.numer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Modular { value, modulus } => Some(symmetric(*value, *modulus)),
        }
    }

    /// True when the printed form starts with a minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Modular { value, modulus } => symmetric(*value, *modulus) < 0,
        }
    }

    pub fn abs_display(&self) -> String {
        match self {
            Scalar::Rational(r) => r.abs().to_string(),
            Scalar::Modular { value, modulus } => symmetric(*value, *modulus).abs().to_string(),
        }
    }
}

fn symmetric(v: u64, p: u64) -> i64 {
    if v > p / 2 {
        v as i64 - p as i64
    } else {
        v as i64
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn same_modulus(a: u64, b: u64) -> u64 {
    assert_eq!(a, b, "scalars from different prime fields");
    a
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (
                Scalar::Modular {
                    value: a,
                    modulus: p,
                },
                Scalar::Modular {
                    value: b,
                    modulus: q,
                },
            ) => {
                let p = same_modulus(*p, *q);
                Scalar::Modular {
                    value: (a + b) % p,
                    modulus: p,
                }
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (
                Scalar::Modular {
                    value: a,
                    modulus: p,
                },
                Scalar::Modular {
                    value: b,
                    modulus: q,
                },
            ) => {
                let p = same_modulus(*p, *q);
                Scalar::Modular {
                    value: (a + p - b) % p,
                    modulus: p,
                }
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (
                Scalar::Modular {
                    value: a,
                    modulus: p,
                },
                Scalar::Modular {
                    value: b,
                    modulus: q,
                },
            ) => {
                let p = same_modulus(*p, *q);
                Scalar::Modular {
                    value: a * b % p,
                    modulus: p,
                }
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", r),
            Scalar::Modular { value, modulus } => write!(f, "{}", symmetric(*value, *modulus)),
        }
    }
}
