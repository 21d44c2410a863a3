//! Real roots of `root-obj` polynomials, isolated with Sturm sequences.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::sexpr::SExpr;

/// Dense polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    fn trimmed(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    fn constant(v: BigRational) -> Self {
        Poly::trimmed(alloc::vec![v])
    }

    fn var() -> Self {
        Poly(alloc::vec![BigRational::zero(), BigRational::one()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Poly::trimmed((0..n).map(|i| self.0.get(i).unwrap_or(&zero) + other.0.get(i).unwrap_or(&zero)).collect())
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = alloc::vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::trimmed(out)
    }

    fn derivative(&self) -> Poly {
        Poly::trimmed(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect(),
        )
    }

    /// Remainder of polynomial division by a nonzero divisor.
    fn rem(&self, divisor: &Poly) -> Poly {
        let mut r = self.0.clone();
        let d = divisor.0.len() - 1;
        let lead = divisor.0[d].clone();
        while r.len() > d && !r.is_empty() {
            let shift = r.len() - 1 - d;
            let factor = r.last().unwrap() / &lead;
            for (i, c) in divisor.0.iter().enumerate() {
                r[shift + i] -= &factor * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Poly::trimmed(r)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

/// Reads the polynomial of a `root-obj` in the variable `x`.
pub fn parse_poly(form: &SExpr) -> Option<Poly> {
    if let Some(v) = form.as_rational() {
        return Some(Poly::constant(v));
    }
    if form.as_symbol().is_some() {
        return Some(Poly::var());
    }
    let items = form.as_list()?;
    let (head, args) = items.split_first()?;
    let head = head.as_symbol()?;
    let polys = args.iter().map(parse_poly).collect::<Option<Vec<_>>>()?;
    match head {
        "+" => Some(polys.iter().fold(Poly(Vec::new()), |acc, p| acc.add(p))),
        "*" => Some(polys.iter().fold(Poly::constant(BigRational::one()), |acc, p| acc.mul(p))),
        "-" => match polys.split_first()? {
            (only, []) => Some(only.neg()),
            (first, rest) => Some(rest.iter().fold(first.clone(), |acc, p| acc.add(&p.neg()))),
        },
        "^" => {
            let [base, exp] = polys.as_slice() else { return None };
            let e = match exp.0.as_slice() {
                [] => 0,
                [c] if c.is_integer() && !c.is_negative() => c.to_integer().to_u32()?,
                _ => return None,
            };
            Some((0..e).fold(Poly::constant(BigRational::one()), |acc, _| acc.mul(base)))
        }
        _ => None,
    }
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = alloc::vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        chain.push(r);
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &BigRational) -> usize {
    let mut changes = 0;
    let mut last: Option<bool> = None;
    for p in chain {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            changes += 1;
        }
        last = Some(pos);
    }
    changes
}

/// Approximates the `index`-th (1-based, ascending) real root of `p`.
pub fn real_root(p: &Poly, index: usize) -> Option<f64> {
    let deg = p.degree()?;
    if deg == 0 || index == 0 {
        return None;
    }
    let lead = p.0[deg].abs();
    let bound =
        BigRational::one() + p.0[..deg].iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| a.max(b));
    let chain = sturm_chain(p);
    let mut lo = -bound.clone();
    let mut hi = bound;
    let mut v_lo = sign_changes(&chain, &lo);
    let v_hi = sign_changes(&chain, &hi);
    if v_lo.checked_sub(v_hi)? < index {
        return None;
    }
    let mut k = index;
    let two = BigRational::from_integer(BigInt::from(2));
    let tolerance = BigRational::new(BigInt::one(), BigInt::from(1u8) << 80usize);
    for _ in 0..400 {
        if &hi - &lo <= tolerance {
            break;
        }
        let mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_zero() && v_lo - sign_changes(&chain, &mid) == k {
            return mid.to_f64();
        }
        let v_mid = sign_changes(&chain, &mid);
        let below = v_lo - v_mid;
        if below >= k {
            hi = mid;
        } else {
            k -= below;
            lo = mid;
            v_lo = v_mid;
        }
    }
    ((&lo + &hi) / &two).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_one;

    fn poly(text: &str) -> Poly {
        parse_poly(&parse_one(text).unwrap()).unwrap()
    }

    #[test]
    fn sqrt_two() {
        let p = poly("(+ (^ x 2) (- 2))");
        let r = real_root(&p, 2).unwrap();
        assert!((r * r - 2.0).abs() < 1e-12);
        assert!(r > 0.0);
        let neg = real_root(&p, 1).unwrap();
        assert!((neg + r).abs() < 1e-12);
        assert_eq!(real_root(&p, 3), None);
    }

    #[test]
    fn cubic_roots_ascending() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = poly("(+ (^ x 3) (* (- 7) x) 6)");
        let roots: Vec<f64> = (1..=3).map(|k| real_root(&p, k).unwrap()).collect();
        for (got, want) in roots.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn non_monic() {
        // 2x^2 - 3 has roots ±sqrt(3/2)
        let p = poly("(+ (* 2 (^ x 2)) (- 3))");
        let r = real_root(&p, 2).unwrap();
        assert!((r - 1.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_junk() {
        assert!(parse_poly(&parse_one("(sin x)").unwrap()).is_none());
        assert!(parse_poly(&parse_one("(^ x y)").unwrap()).is_none());
    }
}
