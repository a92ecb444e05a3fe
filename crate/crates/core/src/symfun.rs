//! The truncated symmetric-function ring used by the genus evaluator.
//!
//! Elements are sparse maps from partitions (monomials in the elementary
//! symmetric polynomials e_1, e_2, ...) to series coefficients, graded by
//! weight and truncated above a fixed cap.  Power sums arrive through the
//! Newton identities; pairing the weight-d component against a manifold's
//! Chern numbers under e_j = c_j is the Hirzebruch evaluation.

use num_bigint::BigInt;
use std::collections::BTreeMap;

use crate::coeff::{Coeff, Rat};
use crate::error::Result;
use crate::manifold::{ManifoldClass, Partition};
use crate::series::MultiSeries;

#[derive(Clone, Debug)]
pub struct SymPoly {
    pub cap: usize,
    pub coeffs: BTreeMap<Partition, MultiSeries>,
}

fn weight(lam: &Partition) -> usize {
    lam.iter().map(|&x| x as usize).sum()
}

fn merge(a: &Partition, b: &Partition) -> Partition {
    let mut out = a.clone();
    out.extend_from_slice(b);
    out.sort_unstable_by(|x, y| y.cmp(x));
    out
}

impl SymPoly {
    pub fn zero(cap: usize) -> Self {
        SymPoly { cap, coeffs: BTreeMap::new() }
    }

    pub fn constant(cap: usize, c: MultiSeries) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(Vec::new(), c);
        }
        SymPoly { cap, coeffs }
    }

    pub fn elementary(cap: usize, j: u8) -> Self {
        let mut coeffs = BTreeMap::new();
        if (j as usize) <= cap {
            coeffs.insert(vec![j], MultiSeries::one(&[]));
        }
        SymPoly { cap, coeffs }
    }

    fn insert_add(&mut self, lam: Partition, c: MultiSeries) -> Result<()> {
        if weight(&lam) > self.cap || c.is_zero() {
            return Ok(());
        }
        match self.coeffs.entry(lam) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c)?;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (lam, c) in &other.coeffs {
            out.insert_add(lam.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.cap);
        for (la, ca) in &self.coeffs {
            for (lb, cb) in &other.coeffs {
                let lam = merge(la, lb);
                if weight(&lam) > self.cap {
                    continue;
                }
                out.insert_add(lam, ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &MultiSeries) -> Result<Self> {
        let mut out = Self::zero(self.cap);
        for (lam, x) in &self.coeffs {
            out.insert_add(lam.clone(), x.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn scale_rat(&self, r: &Rat) -> Result<Self> {
        let mut out = Self::zero(self.cap);
        for (lam, x) in &self.coeffs {
            out.insert_add(lam.clone(), x.scale(&Coeff::Rat(r.clone()))?)?;
        }
        Ok(out)
    }

    /// e^A for A with zero weight-0 part; terminates because every term of
    /// A has weight at least 1.
    pub fn exp(&self) -> Result<Self> {
        assert!(
            !self.coeffs.contains_key(&Vec::new()),
            "exp needs vanishing constant part"
        );
        let mut acc = Self::constant(self.cap, MultiSeries::one(&[]));
        let mut power = acc.clone();
        let mut kfac = Rat::from_integer(BigInt::from(1));
        for k in 1..=self.cap {
            power = power.mul(self)?;
            kfac *= Rat::from_integer(BigInt::from(k as i64));
            acc = acc.add(&power.scale_rat(&kfac.recip())?)?;
            if power.coeffs.is_empty() {
                break;
            }
        }
        Ok(acc)
    }

    /// The power sum p_k expressed in the elementary basis through the
    /// Newton identity p_k = (-1)^(k-1) k e_k + sum_i (-1)^(k-1-i) e_{k-i} p_i.
    pub fn power_sum(cap: usize, k: u8) -> Result<Self> {
        let mut cache: Vec<SymPoly> = Vec::new();
        for kk in 1..=k {
            let sign = |m: i64| if m % 2 == 0 { 1 } else { -1 };
            let lead = sign(kk as i64 - 1) * kk as i64;
            let mut p = Self::elementary(cap, kk)
                .scale(&MultiSeries::constant(&[], Coeff::from_int(lead)))?;
            for i in 1..kk {
                let e = Self::elementary(cap, kk - i);
                let term = e
                    .mul(&cache[(i - 1) as usize])?
                    .scale(&MultiSeries::constant(
                        &[],
                        Coeff::from_int(sign(kk as i64 - 1 - i as i64)),
                    ))?;
                p = p.add(&term)?;
            }
            cache.push(p);
        }
        Ok(cache.pop().expect("k >= 1"))
    }

    /// Pair the weight-d component against Chern numbers under e_j = c_j.
    pub fn pair_with(&self, m: &ManifoldClass) -> Result<MultiSeries> {
        let mut acc = MultiSeries::zero(&[]);
        for (lam, c) in &self.coeffs {
            if weight(lam) != m.dim {
                continue;
            }
            let number = m.chern_number(lam);
            let coeff = Coeff::Rat(Rat::from_integer(number));
            acc = acc.add(&c.scale(&coeff)?)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff_i64;

    fn const_coeff(p: &SymPoly, lam: &[u8]) -> i64 {
        p.coeffs
            .get(&lam.to_vec())
            .map(|c| coeff_i64(&c.coeff(&[])).unwrap())
            .unwrap_or(0)
    }

    #[test]
    fn newton_identities_small() {
        // p1 = e1, p2 = e1^2 - 2 e2, p3 = e1^3 - 3 e1 e2 + 3 e3.
        let p1 = SymPoly::power_sum(4, 1).unwrap();
        assert_eq!(const_coeff(&p1, &[1]), 1);
        let p2 = SymPoly::power_sum(4, 2).unwrap();
        assert_eq!(const_coeff(&p2, &[1, 1]), 1);
        assert_eq!(const_coeff(&p2, &[2]), -2);
        let p3 = SymPoly::power_sum(4, 3).unwrap();
        assert_eq!(const_coeff(&p3, &[1, 1, 1]), 1);
        assert_eq!(const_coeff(&p3, &[2, 1]), -3);
        assert_eq!(const_coeff(&p3, &[3]), 3);
        let p4 = SymPoly::power_sum(4, 4).unwrap();
        assert_eq!(const_coeff(&p4, &[1, 1, 1, 1]), 1);
        assert_eq!(const_coeff(&p4, &[2, 1, 1]), -4);
        assert_eq!(const_coeff(&p4, &[2, 2]), 2);
        assert_eq!(const_coeff(&p4, &[3, 1]), 4);
        assert_eq!(const_coeff(&p4, &[4]), -4);
    }

    #[test]
    fn exp_of_weighted_sum_truncates() {
        let p1 = SymPoly::power_sum(2, 1).unwrap();
        let g = p1.exp().unwrap();
        // exp(e1) = 1 + e1 + e1^2/2 + ... capped at weight 2.
        assert_eq!(const_coeff(&g, &[]), 1);
        assert_eq!(const_coeff(&g, &[1]), 1);
        assert_eq!(
            g.coeffs.get(&vec![1, 1]).unwrap().coeff(&[]),
            Coeff::from_rat(1, 2)
        );
        assert!(g.coeffs.get(&vec![1, 1, 1]).is_none());
    }
}
