//! Polynomials in barycentric coordinates with exact integration.

use std::collections::BTreeMap;

use crate::error::{PampaError, Result};
use crate::field::Field;

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `int_K l1^m l2^n l3^q / |K|` as a reduced fraction.
pub fn bary_integral_ratio(m: u32, n: u32, q: u32) -> (u128, u128) {
    let num = 2 * factorial(m) * factorial(n) * factorial(q);
    let den = factorial(m + n + q + 2);
    let g = gcd(num, den);
    (num / g, den / g)
}

/// `int_K l1^m l2^n l3^q dx = 2 |K| m! n! q! / (m + n + q + 2)!`.
pub fn bary_integral<T: Field>(m: u32, n: u32, q: u32, area: T) -> T {
    let (num, den) = bary_integral_ratio(m, n, q);
    // exponents stay small (< 16 in total), so both fit in i64
    area * T::from_ratio(num as i64, den as i64)
}

pub type Exponent = [u32; 3];

/// Sparse polynomial `sum c_e l1^e0 l2^e1 l3^e2`. The representation is not
/// unique because `l1 + l2 + l3 = 1` is not imposed.
#[derive(Debug, Clone, PartialEq)]
pub struct BaryPoly<T> {
    pub terms: BTreeMap<Exponent, T>,
}

impl<T: Field> BaryPoly<T> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(e: Exponent, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if c != T::zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn lambda(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(e, T::one())
    }

    /// `l1 l2 l3`.
    pub fn bubble() -> Self {
        Self::monomial([1, 1, 1], T::one())
    }

    fn push(&mut self, e: Exponent, c: T) {
        let v = self.terms.remove(&e).unwrap_or_else(T::zero) + c;
        if v != T::zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.push(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.push(*e, c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.push(
                    [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]],
                    ca.clone() * cb.clone(),
                );
            }
        }
        out
    }

    pub fn eval(&self, l: &[T; 3]) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            acc + c.clone() * l[0].powi(e[0]) * l[1].powi(e[1]) * l[2].powi(e[2])
        })
    }

    /// `int_K p dx` for a triangle of the given area.
    pub fn integrate(&self, area: &T) -> T {
        self.terms.iter().fold(T::zero(), |acc, (e, c)| {
            acc + c.clone() * bary_integral(e[0], e[1], e[2], area.clone())
        })
    }

    /// Partial derivative with respect to `l_i`, the three coordinates
    /// treated as independent.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                out.push(f, c.clone() * T::from_int(e[i] as i64));
            }
        }
        out
    }

    /// Relabels coordinates: `l_i` becomes `l_{perm[i]}`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut f = [0; 3];
            for i in 0..3 {
                f[perm[i]] = e[i];
            }
            out.push(f, c.clone());
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }
}

/// Barycentric point check: nonnegative entries summing to one.
pub fn validate_barycentric(l: &[f64; 3]) -> Result<()> {
    let ok = l.iter().all(|&v| v.is_finite() && v >= -1e-14)
        && (l.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
    if ok {
        Ok(())
    } else {
        Err(PampaError::InvalidArgument(format!(
            "{l:?} is not a barycentric point"
        )))
    }
}
