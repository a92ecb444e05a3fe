//! Test manifolds as bags of Chern numbers.
//!
//! A genus consumes nothing but the complex dimension and the Chern
//! numbers indexed by partitions of it, so that is all a manifold is
//! here.  Complete intersections in projective space provide an exactly
//! computable supply (K3, the quintic threefold, projective spaces), and
//! products are formed through the Whitney formula.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use crate::coeff::{Coeff, Rat};
use crate::error::{Error, Result};
use crate::series::{MultiSeries, VarSpec};

/// A partition as a non-increasing list of positive parts.
pub type Partition = Vec<u8>;

pub fn partitions_of(d: usize) -> Vec<Partition> {
    fn rec(d: usize, max: usize, cur: &mut Partition, out: &mut Vec<Partition>) {
        if d == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=d.min(max)).rev() {
            cur.push(part as u8);
            rec(d - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d.max(1), &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct ManifoldClass {
    pub dim: usize,
    /// Chern numbers: integral of c_{i1} ... c_{ir} per partition of dim.
    pub chern: BTreeMap<Partition, BigInt>,
    pub c1_zero: bool,
    /// When the first Chern class is an integer multiple gamma of a
    /// generator, |gamma| (0 means c1 = 0); c1 = 0 mod N iff N divides it.
    pub c1_mod_base: Option<u64>,
    pub label: String,
}

impl ManifoldClass {
    pub fn point() -> Self {
        let mut chern = BTreeMap::new();
        chern.insert(Vec::new(), BigInt::one());
        ManifoldClass {
            dim: 0,
            chern,
            c1_zero: true,
            c1_mod_base: Some(0),
            label: "pt".into(),
        }
    }

    pub fn from_chern_numbers(
        dim: usize,
        numbers: BTreeMap<Partition, BigInt>,
        c1_zero: bool,
        c1_mod_base: Option<u64>,
        label: &str,
    ) -> Result<Self> {
        for lam in partitions_of(dim) {
            if !numbers.contains_key(&lam) {
                return Err(Error::InvalidInput(format!(
                    "missing Chern number for partition {lam:?}"
                )));
            }
        }
        let m = ManifoldClass {
            dim,
            chern: BTreeMap::new(),
            c1_zero,
            c1_mod_base,
            label: label.into(),
        };
        Ok(m.normalized(numbers))
    }

    fn normalized(mut self, numbers: BTreeMap<Partition, BigInt>) -> Self {
        self.chern = numbers;
        if self.c1_zero {
            // c1 = 0 forces every Chern number whose partition has a part 1
            // to vanish.
            for (lam, v) in self.chern.iter_mut() {
                if lam.contains(&1) {
                    *v = BigInt::zero();
                }
            }
        }
        self
    }

    pub fn chern_number(&self, lam: &Partition) -> BigInt {
        self.chern.get(lam).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn c1_divisible_by(&self, n: u32) -> bool {
        if self.c1_zero {
            return true;
        }
        match self.c1_mod_base {
            Some(base) => base % (n as u64) == 0,
            None => false,
        }
    }
}

/// A smooth complete intersection of hypersurfaces of the given degrees in
/// P^ambient.  The total Chern class is (1+h)^{ambient+1} / prod (1 + d_j h)
/// truncated at h^(dim+1); a Chern monomial integrates to the product of
/// its coefficient numbers times the degree prod d_j of the fundamental
/// class.
pub fn complete_intersection(ambient: usize, degrees: &[i64]) -> Result<ManifoldClass> {
    if degrees.len() > ambient {
        return Err(Error::Bounds("more hypersurfaces than dimensions".into()));
    }
    if degrees.iter().any(|&d| d < 1) {
        return Err(Error::Bounds("degrees must be positive".into()));
    }
    let dim = ambient - degrees.len();
    let vars = vec![VarSpec::power("h", dim as i64 + 1)];
    let one = MultiSeries::one(&vars);
    let h = MultiSeries::var(&vars, "h");
    let mut total = one.add(&h)?.pow(ambient as i64 + 1)?;
    for &dj in degrees {
        let f = one.add(&h.scale(&Coeff::from_int(dj))?)?;
        total = total.mul(&f.invert()?)?;
    }
    // integer coefficients gamma_i of c_i = gamma_i h^i.
    let mut gamma: Vec<BigInt> = Vec::with_capacity(dim + 1);
    for i in 0..=dim {
        let c = total.coeff(&[("h", i as i64)]);
        let r = c.as_rat().cloned().unwrap_or_else(Rat::zero);
        if !r.denom().is_one() {
            return Err(Error::InvalidInput("non-integral Chern class".into()));
        }
        gamma.push(r.numer().clone());
    }
    let fundamental: BigInt = degrees.iter().map(|&d| BigInt::from(d)).product();
    let mut chern = BTreeMap::new();
    for lam in partitions_of(dim) {
        let mut val = fundamental.clone();
        for &part in &lam {
            val *= &gamma[part as usize];
        }
        chern.insert(lam, val);
    }
    let gamma1: i64 = ambient as i64 + 1 - degrees.iter().sum::<i64>();
    let label = if degrees.is_empty() {
        format!("CP{ambient}")
    } else {
        format!("X({ambient};{degrees:?})")
    };
    Ok(ManifoldClass {
        dim,
        chern,
        c1_zero: gamma1 == 0,
        c1_mod_base: Some(gamma1.unsigned_abs()),
        label,
    })
}

/// Chern numbers of a product via the Whitney formula: each part of a
/// partition splits over the two factors, and a split contributes the
/// product of the factors' Chern numbers whenever the split weights match
/// the dimensions.
pub fn product_manifold(a: &ManifoldClass, b: &ManifoldClass) -> ManifoldClass {
    let dim = a.dim + b.dim;
    let mut chern: BTreeMap<Partition, BigInt> = BTreeMap::new();
    for lam in partitions_of(dim) {
        let mut total = BigInt::zero();
        // all ways to split each part j into (i, j - i)
        let parts = &lam;
        let mut splits: Vec<(Partition, Partition)> = vec![(Vec::new(), Vec::new())];
        for &j in parts {
            let mut next = Vec::new();
            for (pa, pb) in &splits {
                for i in 0..=j {
                    let mut na = pa.clone();
                    let mut nb = pb.clone();
                    if i > 0 {
                        na.push(i);
                    }
                    if j - i > 0 {
                        nb.push(j - i);
                    }
                    next.push((na, nb));
                }
            }
            splits = next;
        }
        for (mut pa, mut pb) in splits {
            let wa: usize = pa.iter().map(|&x| x as usize).sum();
            if wa != a.dim {
                continue;
            }
            pa.sort_unstable_by(|x, y| y.cmp(x));
            pb.sort_unstable_by(|x, y| y.cmp(x));
            total += a.chern_number(&pa) * b.chern_number(&pb);
        }
        chern.insert(lam, total);
    }
    let c1_zero = a.c1_zero && b.c1_zero;
    let c1_mod_base = match (a.c1_mod_base, b.c1_mod_base) {
        (Some(x), Some(y)) => Some(num_integer::gcd(x, y)),
        _ => None,
    };
    ManifoldClass {
        dim,
        chern,
        c1_zero,
        c1_mod_base,
        label: format!("{} x {}", a.label, b.label),
    }
}
