//! The small expression language for circle monodromies.
//!
//! ```text
//! expr   := term ('*' term)*
//! term   := 'exp(' phase ')' | 'zeta(' p '/' q ')' | '1' | 'diag(' expr (',' expr)* ')'
//! phase  := factor ('*' factor)*        -- must contain pi and i, optionally t or (t+a)
//! ```
//!
//! Every accepted expression is diagonal: a product of factors
//! `exp(c pi i t) * exp(2 pi i theta)` with rational `c` and `theta`.
//! A scalar expression is broadcast to the requested rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::{Germ, GermMat};
use crate::matrix::Mat;
use crate::scalar::{parse_rational, Scalar};

/// `exp(rate * pi * i * t) * exp(2 pi i * phase)`, `phase` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    #[serde(with = "rational_str")]
    pub rate: BigRational,
    #[serde(with = "rational_str")]
    pub phase: BigRational,
}

mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::scalar::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

impl Factor {
    pub fn one() -> Self {
        Factor { rate: BigRational::zero(), phase: BigRational::zero() }
    }

    pub fn new(rate: BigRational, phase: BigRational) -> Self {
        Factor { rate, phase: frac(&phase) }
    }

    fn times(&self, o: &Factor) -> Factor {
        Factor::new(&self.rate + &o.rate, &self.phase + &o.phase)
    }

    /// True when the factor is `1` at `t = 0`.
    pub fn trivial_at_zero(&self) -> bool {
        self.phase.is_zero()
    }

    /// The factor as a germ. Backends without `pi` use the rescaled time
    /// `t' = pi t`, which changes no signature.
    pub fn germ<F: Scalar>(&self, order: usize) -> Result<Germ<F>> {
        let rate = F::from_rational(&self.rate);
        let a = match F::pi() {
            Some(pi) => rate * pi * F::imag_unit(),
            None => rate * F::imag_unit(),
        };
        let (p, q) = (self.phase.numer(), self.phase.denom());
        let zeta = F::root_of_unity(
            p.to_i64().ok_or_else(|| Error::Input("phase numerator too large".into()))?,
            q.to_u64().ok_or_else(|| Error::Input("phase denominator too large".into()))?,
        )
        .ok_or_else(|| Error::Unsupported(format!("root of unity exp(2 pi i {}) in backend {}", self.phase, F::NAME)))?;
        Ok(Germ::exp_linear(&a, order).scale(&zeta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monodromy {
    Scalar(Factor),
    Diag(Vec<Factor>),
}

impl Monodromy {
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let m = p.expr()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(m)
    }

    /// Diagonal entries at the given rank.
    pub fn factors(&self, rank: usize) -> Result<Vec<Factor>> {
        match self {
            Monodromy::Scalar(f) => Ok(vec![f.clone(); rank]),
            Monodromy::Diag(v) if v.len() == rank => Ok(v.clone()),
            Monodromy::Diag(v) => Err(Error::Input(format!("diag has {} entries but rank is {rank}", v.len()))),
        }
    }

    fn mul(self, o: Monodromy) -> Result<Monodromy> {
        Ok(match (self, o) {
            (Monodromy::Scalar(a), Monodromy::Scalar(b)) => Monodromy::Scalar(a.times(&b)),
            (Monodromy::Scalar(a), Monodromy::Diag(v)) | (Monodromy::Diag(v), Monodromy::Scalar(a)) => {
                Monodromy::Diag(v.iter().map(|x| x.times(&a)).collect())
            }
            (Monodromy::Diag(a), Monodromy::Diag(b)) => {
                if a.len() != b.len() {
                    return Err(Error::Input("diag products need equal sizes".into()));
                }
                Monodromy::Diag(a.iter().zip(&b).map(|(x, y)| x.times(y)).collect())
            }
        })
    }
}

/// Diagonal germ matrix of the factors.
pub fn diagonal_matrix<F: Scalar>(factors: &[Factor], order: usize) -> Result<GermMat<F>> {
    let m = factors.len();
    let germs = factors.iter().map(|f| f.germ::<F>(order)).collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_fn(m, m, |r, c| if r == c { germs[r].clone() } else { Germ::zero(order) }))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: 1, column: self.pos + 1, message: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{tok}'")))
        }
    }

    fn expr(&mut self) -> Result<Monodromy> {
        let mut m = self.term()?;
        while self.eat("*") {
            let t = self.term()?;
            m = m.mul(t).map_err(|e| self.err(&e.to_string()))?;
        }
        Ok(m)
    }

    fn term(&mut self) -> Result<Monodromy> {
        if self.eat("exp(") {
            let f = self.phase()?;
            self.expect(")")?;
            Ok(Monodromy::Scalar(f))
        } else if self.eat("zeta(") {
            let q = self.number()?;
            self.expect(")")?;
            Ok(Monodromy::Scalar(Factor::new(BigRational::zero(), q)))
        } else if self.eat("diag(") {
            let mut v = Vec::new();
            loop {
                match self.expr()? {
                    Monodromy::Scalar(f) => v.push(f),
                    Monodromy::Diag(_) => return Err(self.err("nested diag")),
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
            Ok(Monodromy::Diag(v))
        } else {
            let start = self.pos;
            let q = self.number()?;
            if q != BigRational::one() {
                self.pos = start;
                return Err(self.err("only the constant 1 is allowed; use zeta(p/q) for roots of unity"));
            }
            Ok(Monodromy::Scalar(Factor::one()))
        }
    }

    fn number(&mut self) -> Result<BigRational> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || b"+-./eE".contains(&self.s[self.pos])) {
            // stop before a sign that is not the first character or after an exponent
            let c = self.s[self.pos];
            if (c == b'+' || c == b'-') && self.pos > start && !matches!(self.s[self.pos - 1], b'e' | b'E') {
                break;
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        if text.is_empty() {
            return Err(self.err("expected a number"));
        }
        parse_rational(text).map_err(|_| {
            self.pos = start;
            self.err(&format!("bad number {text:?}"))
        })
    }

    /// Product such as `2*pi*i*t`, `-pi*i*(t+1/3)`, `pi*i`.
    fn phase(&mut self) -> Result<Factor> {
        let mut coef = BigRational::one();
        let (mut pi, mut i, mut t) = (false, false, None::<BigRational>);
        loop {
            self.ws();
            if self.eat("-") {
                coef = -coef;
                continue;
            }
            if self.eat("pi") {
                if pi {
                    return Err(self.err("pi appears twice"));
                }
                pi = true;
            } else if self.eat("i") {
                if i {
                    return Err(self.err("i appears twice"));
                }
                i = true;
            } else if self.eat("(") {
                self.expect("t")?;
                let shift = if self.eat("+") {
                    self.number()?
                } else if self.eat("-") {
                    -self.number()?
                } else {
                    BigRational::zero()
                };
                self.expect(")")?;
                if t.is_some() {
                    return Err(self.err("t appears twice"));
                }
                t = Some(shift);
            } else if self.eat("t") {
                if t.is_some() {
                    return Err(self.err("t appears twice"));
                }
                t = Some(BigRational::zero());
            } else {
                coef *= self.number()?;
            }
            if !self.eat("*") {
                break;
            }
        }
        if !(pi && i) {
            return Err(self.err("exponent must be of the form c*pi*i*t"));
        }
        // exp(c pi i (t + a)) = exp(c pi i t) exp(2 pi i (c a / 2))
        Ok(match t {
            Some(a) => Factor::new(coef.clone(), &coef * &a / BigRational::from_integer(BigInt::from(2))),
            None => Factor::new(BigRational::zero(), coef / BigRational::from_integer(BigInt::from(2))),
        })
    }
}

/// `p/q` in lowest terms with `q > 0`.
pub fn reduced_fraction(q: &BigRational) -> (i64, u64) {
    let g = q.numer().gcd(q.denom());
    let p = (q.numer() / &g).to_i64().unwrap_or(0);
    let d = (q.denom() / &g).abs().to_u64().unwrap_or(1);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Cyclo, GaussRat};
    use num_complex::Complex64;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn parses_circle_examples() {
        let m = Monodromy::parse("exp(2*pi*i*t)").unwrap();
        assert_eq!(m, Monodromy::Scalar(Factor::new(r(2, 1), r(0, 1))));
        let m = Monodromy::parse("exp(2*pi*i*(t+1/3))").unwrap();
        assert_eq!(m, Monodromy::Scalar(Factor::new(r(2, 1), r(1, 3))));
        let m = Monodromy::parse("diag(exp(2*pi*i*t), exp(-2*pi*i*t)) * zeta(1/4)").unwrap();
        assert_eq!(m.factors(2).unwrap(), vec![Factor::new(r(2, 1), r(1, 4)), Factor::new(r(-2, 1), r(1, 4))]);
        assert_eq!(Monodromy::parse("1").unwrap().factors(3).unwrap().len(), 3);
        assert_eq!(Monodromy::parse("exp(pi*i)").unwrap(), Monodromy::Scalar(Factor::new(r(0, 1), r(1, 2))));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match Monodromy::parse("exp(2*pi*t)") {
            Err(Error::Parse { column, .. }) => assert!(column > 1),
            other => panic!("{other:?}"),
        }
        assert!(Monodromy::parse("2").is_err());
        assert!(Monodromy::parse("exp(2*pi*i*t) junk").is_err());
        assert!(Monodromy::parse("diag(1, 1)").unwrap().factors(3).is_err());
    }

    #[test]
    fn germs_agree_across_backends() {
        let f = Factor::new(r(2, 1), r(1, 3));
        let exact: Germ<Cyclo> = f.germ(5).unwrap();
        let float: Germ<Complex64> = f.germ(5).unwrap();
        // exact coefficients are in rescaled time t' = pi t
        for k in 0..=5 {
            let scale = std::f64::consts::PI.powi(k as i32);
            assert!((exact.coeff(k).to_complex() * scale - float.coeff(k)).norm() < 1e-9);
        }
        assert!(Factor::new(r(1, 1), r(1, 3)).germ::<GaussRat>(3).is_err());
    }
}
