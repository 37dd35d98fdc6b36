use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{parse_rational, Inertia, Scalar, Tol};
use crate::error::{Error, Result};
use crate::matrix::Mat;

fn parse_f64(s: &str) -> Result<f64> {
    if let Ok(x) = s.trim().parse::<f64>() {
        return Ok(x);
    }
    parse_rational(s)?
        .to_f64()
        .ok_or_else(|| Error::Input(format!("not a float: {s:?}")))
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    const NAME: &'static str = "complex-float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn root_of_unity(p: i64, q: u64) -> Option<Self> {
        if q == 0 {
            return None;
        }
        let k = p.rem_euclid(q as i64);
        Some(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / q as f64))
    }

    fn pi() -> Option<Self> {
        Some(Complex64::new(PI, 0.0))
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn inv(&self) -> Option<Self> {
        (!Scalar::is_zero(self)).then(|| Complex64::inv(self))
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn real_sign(&self) -> Result<Ordering> {
        Ok(self.re.partial_cmp(&0.0).unwrap_or(Ordering::Equal))
    }

    fn to_real_rational(&self) -> Option<BigRational> {
        None
    }

    fn parse_pair(re: &str, im: &str) -> Result<Self> {
        Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?))
    }

    fn to_pair(&self) -> (String, String) {
        (format!("{:?}", self.re), format!("{:?}", self.im))
    }

    /// Eigenvalue count with the threshold `tol * max|h_ij|`.
    fn hermitian_inertia(h: &Mat<Self>, tol: Tol) -> Result<Inertia> {
        let n = h.rows();
        if n == 0 {
            return Ok(Inertia::default());
        }
        let scale = h.max_magnitude();
        let m = DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
        let ev = m.symmetric_eigenvalues();
        let cut = tol.0 * scale * n as f64;
        let mut out = Inertia::default();
        for &e in ev.iter() {
            if e > cut {
                out.pos += 1;
            } else if e < -cut {
                out.neg += 1;
            } else {
                out.zero += 1;
            }
        }
        Ok(out)
    }
}
