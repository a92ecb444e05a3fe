//! Truncated sparse multivariate power/Laurent series over an exact
//! coefficient field.
//!
//! A `MultiSeries` is a finite map from exponent vectors to nonzero
//! coefficients together with a *window* per variable: exponents live in
//! `[floor, order)`.  Power-kind variables have `floor = 0`; Laurent-kind
//! variables allow a finite negative floor (finite-tailed Laurent series).
//! Coefficients below the floor are known to be zero; coefficients at or
//! above the order are unknown (truncated).  Every operation propagates
//! windows pessimistically, so all equalities are exact within the stated
//! window.
//!
//! Variable order is semantic: Laurent variables precede power variables,
//! which is the distinction between R((y))[[x]] and R[[x]]((y)).  Inversion
//! uses this order to locate the leading unit monomial: series of the form
//! y + o(x) are invertible because y is already a unit of R((y)).

use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{Coeff, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKind {
    Laurent,
    Power,
}

/// One variable of the ambient ring: name, kind and truncation window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSpec {
    pub name: String,
    pub kind: VarKind,
    /// Exclusive upper bound on exponents.
    pub order: i64,
    /// Inclusive lower bound on exponents; 0 for power variables.
    pub floor: i64,
}

impl VarSpec {
    pub fn power(name: &str, order: i64) -> Self {
        VarSpec { name: name.into(), kind: VarKind::Power, order, floor: 0 }
    }

    pub fn laurent(name: &str, floor: i64, order: i64) -> Self {
        VarSpec { name: name.into(), kind: VarKind::Laurent, order, floor }
    }

    fn validate(&self) -> Result<()> {
        // A Laurent window need not contain exponent zero; [floor, order)
        // must merely be nonempty.  Power windows must admit constants.
        let ok = match self.kind {
            VarKind::Power => self.floor == 0 && self.order >= 1,
            VarKind::Laurent => self.floor <= 0 && self.order > self.floor,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::WindowUnderflow { var: self.name.clone() })
        }
    }
}

/// Sparse truncated series.  Exponent vectors index `vars` positionally.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiSeries {
    vars: Vec<VarSpec>,
    terms: BTreeMap<Vec<i64>, Coeff>,
}

fn canonical_order(vars: &mut Vec<VarSpec>) {
    vars.sort_by(|a, b| (a.kind, &a.name).cmp(&(b.kind, &b.name)));
}

impl MultiSeries {
    // ----- constructors -------------------------------------------------

    pub fn zero(vars: &[VarSpec]) -> Self {
        let mut vs = vars.to_vec();
        canonical_order(&mut vs);
        for v in &vs {
            v.validate().expect("invalid variable window");
        }
        MultiSeries { vars: vs, terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[VarSpec], c: Coeff) -> Self {
        let mut s = Self::zero(vars);
        if !c.is_zero() {
            s.terms.insert(vec![0; s.vars.len()], c);
        }
        s.tighten_floors()
    }

    pub fn one(vars: &[VarSpec]) -> Self {
        Self::constant(vars, Coeff::one())
    }

    /// The variable `name` as a series (exponent 1).
    pub fn var(vars: &[VarSpec], name: &str) -> Self {
        let mut s = Self::zero(vars);
        let i = s.index_of(name).expect("unknown variable");
        let mut e = vec![0; s.vars.len()];
        e[i] = 1;
        assert!(s.in_window(&e), "variable outside its own window");
        s.terms.insert(e, Coeff::one());
        s.tighten_floors()
    }

    /// A single monomial given by (name, exponent) pairs.
    pub fn monomial(vars: &[VarSpec], exps: &[(&str, i64)], c: Coeff) -> Self {
        let mut s = Self::zero(vars);
        if c.is_zero() {
            return s;
        }
        let mut e = vec![0; s.vars.len()];
        for (name, k) in exps {
            let i = s.index_of(name).expect("unknown variable");
            e[i] += k;
        }
        assert!(s.in_window(&e), "monomial outside window");
        s.terms.insert(e, c);
        s.tighten_floors()
    }

    pub fn from_terms(vars: &[VarSpec], terms: Vec<(Vec<(&str, i64)>, Coeff)>) -> Self {
        let mut acc = Self::zero(vars);
        for (exps, c) in terms {
            let m = Self::monomial(vars, &exps, c);
            acc = acc.add(&m).expect("from_terms");
        }
        acc
    }

    // ----- accessors ----------------------------------------------------

    pub fn vars(&self) -> &[VarSpec] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn spec_of(&self, name: &str) -> Option<&VarSpec> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Coeff)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map_or(false, |(e, c)| e.iter().all(|&x| x == 0) && c.is_one())
    }

    /// Coefficient of a monomial given by (name, exponent) pairs (zero for
    /// unnamed variables' exponents).
    pub fn coeff(&self, exps: &[(&str, i64)]) -> Coeff {
        let mut e = vec![0; self.vars.len()];
        for (name, k) in exps {
            match self.index_of(name) {
                Some(i) => e[i] += k,
                None => {
                    if *k != 0 {
                        return Coeff::zero();
                    }
                }
            }
        }
        self.terms.get(&e).cloned().unwrap_or_else(Coeff::zero)
    }

    /// The coefficient of the all-zero exponent vector.
    pub fn constant_term(&self) -> Coeff {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    fn in_window(&self, e: &[i64]) -> bool {
        e.iter()
            .zip(&self.vars)
            .all(|(&x, v)| x >= v.floor && x < v.order)
    }

    /// Raise floor claims to the actual term support.  Sound whenever the
    /// stored terms are all the true terms inside the window, which every
    /// operation guarantees; coefficients below the floor are known zero,
    /// and a tight floor keeps later multiplications from over-shrinking
    /// their claimed orders.
    fn tighten_floors(mut self) -> Self {
        for i in 0..self.vars.len() {
            if self.vars[i].kind != VarKind::Laurent {
                continue;
            }
            let support = self
                .terms
                .keys()
                .map(|e| e[i])
                .min()
                .unwrap_or(0)
                .min(0);
            if support > self.vars[i].floor {
                self.vars[i].floor = support;
            }
        }
        self
    }

    fn insert_add(&mut self, e: Vec<i64>, c: Coeff) -> Result<()> {
        if c.is_zero() || !self.in_window(&e) {
            return Ok(());
        }
        match self.terms.entry(e) {
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

    // ----- variable-list merging ----------------------------------------

    /// Union of two variable lists.  A variable absent from one operand is
    /// treated as a fully-known constant direction there, so only shared
    /// variables intersect windows.  Same name with different kind is an
    /// error.
    fn merge_vars(a: &[VarSpec], b: &[VarSpec], mul: bool) -> Result<Vec<VarSpec>> {
        let mut out: Vec<VarSpec> = Vec::new();
        for v in a.iter().chain(b.iter()) {
            if let Some(existing) = out.iter_mut().find(|w| w.name == v.name) {
                if existing.kind != v.kind {
                    return Err(Error::IncompatibleVars(v.name.clone()));
                }
                if mul {
                    // order_out = min(order_a + floor_b, order_b + floor_a)
                    let o = (existing.order + v.floor).min(v.order + existing.floor);
                    let f = existing.floor + v.floor;
                    existing.order = o;
                    existing.floor = f;
                } else {
                    existing.order = existing.order.min(v.order);
                    existing.floor = existing.floor.min(v.floor);
                }
            } else {
                out.push(v.clone());
            }
        }
        canonical_order(&mut out);
        for v in &out {
            v.validate()?;
        }
        Ok(out)
    }

    fn remap(&self, target: &[VarSpec]) -> Vec<(Vec<i64>, Coeff)> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|w| w.name == v.name).unwrap())
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut out = vec![0; target.len()];
                for (i, &x) in e.iter().enumerate() {
                    out[map[i]] = x;
                }
                (out, c.clone())
            })
            .collect()
    }

    // ----- ring operations ----------------------------------------------

    pub fn add(&self, other: &Self) -> Result<Self> {
        let vars = Self::merge_vars(&self.vars, &other.vars, false)?;
        let mut out = Self::zero(&vars);
        for (e, c) in self.remap(&vars) {
            out.insert_add(e, c)?;
        }
        for (e, c) in other.remap(&vars) {
            out.insert_add(e, c)?;
        }
        Ok(out.tighten_floors())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Result<Self> {
        let mut out = Self::zero(&self.vars);
        if c.is_zero() {
            return Ok(out);
        }
        for (e, x) in &self.terms {
            out.insert_add(e.clone(), x.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let vars = Self::merge_vars(&self.vars, &other.vars, true)?;
        let mut out = Self::zero(&vars);
        let a = self.remap(&vars);
        let b = other.remap(&vars);
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !out.in_window(&e) {
                    continue;
                }
                out.insert_add(e, ca.mul(cb)?)?;
            }
        }
        Ok(out.tighten_floors())
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut acc = Self::one(&self.vars);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Term-by-term product of two series already on the layout `vars`,
    /// keeping everything inside the given window.  This deliberately skips
    /// the pessimistic window propagation of `mul`; callers (inversion,
    /// exp/log) justify their working window by a budget argument and
    /// attach honest claims afterwards.
    fn mul_raw(a: &Self, b: &Self, vars: &[VarSpec]) -> Result<Self> {
        debug_assert!(a.vars.iter().map(|v| &v.name).eq(vars.iter().map(|v| &v.name)));
        debug_assert!(b.vars.iter().map(|v| &v.name).eq(vars.iter().map(|v| &v.name)));
        let mut out = Self::zero(vars);
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                if !out.in_window(&e) {
                    continue;
                }
                out.insert_add(e, ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    fn reframe(&self, vars: &[VarSpec]) -> Self {
        let mut out = Self::zero(vars);
        for (e, c) in self.remap(vars) {
            out.insert_add(e, c).unwrap();
        }
        out
    }

    // ----- inversion ------------------------------------------------------

    /// Total degree in power-kind variables.
    fn power_total(&self, e: &[i64]) -> i64 {
        e.iter()
            .zip(&self.vars)
            .filter(|(_, v)| v.kind == VarKind::Power)
            .map(|(&x, _)| x)
            .sum()
    }

    /// The leading term: minimal by (power-total degree, exponent vector)
    /// where the vector comparison is lexicographic in the canonical
    /// Laurent-first variable order.
    fn leading_term(&self) -> Option<(Vec<i64>, Coeff)> {
        self.terms
            .iter()
            .min_by(|(e1, _), (e2, _)| {
                (self.power_total(e1), e1.as_slice()).cmp(&(self.power_total(e2), e2.as_slice()))
            })
            .map(|(e, c)| (e.clone(), c.clone()))
    }

    /// Multiplicative inverse.
    ///
    /// Writes `a = c * m * (1 + r)` with `m` the leading monomial (which
    /// must involve only Laurent variables), and inverts `1 + r` by a
    /// geometric series.  Window propagation: a Laurent variable `v` that
    /// `r` digs into (some term of `r` lowers `v` by up to `D`) loses
    /// `D * B` from its claimed order and gains a floor of `-D * B` relative
    /// to `1/m`, where `B` is the total raising budget of all other
    /// variables within the window.  Unsupported: two Laurent variables
    /// digging into each other.
    pub fn invert(&self) -> Result<Self> {
        let (m, c) = self
            .leading_term()
            .ok_or_else(|| Error::NotAUnit("zero series".into()))?;
        for (i, v) in self.vars.iter().enumerate() {
            if v.kind == VarKind::Power && m[i] != 0 {
                return Err(Error::NotAUnit(format!(
                    "leading term divisible by power variable {}",
                    v.name
                )));
            }
        }
        let c_inv = c.inv()?;

        // Relative series r with window shifted by -m.
        let mut rel_vars = self.vars.clone();
        for (i, v) in rel_vars.iter_mut().enumerate() {
            v.order -= m[i];
            v.floor -= m[i];
        }
        let mut digging: Option<usize> = None;
        let mut r_terms: Vec<(Vec<i64>, Coeff)> = Vec::new();
        for (e, x) in &self.terms {
            let d: Vec<i64> = e.iter().zip(&m).map(|(a, b)| a - b).collect();
            if d.iter().all(|&v| v == 0) {
                continue;
            }
            for (i, &dv) in d.iter().enumerate() {
                if dv < 0 {
                    match digging {
                        None => digging = Some(i),
                        Some(j) if j == i => {}
                        Some(_) => {
                            return Err(Error::NotAUnit(
                                "multi-directional Laurent inversion is not supported".into(),
                            ))
                        }
                    }
                }
            }
            r_terms.push((d, x.mul(&c_inv)?.neg()));
        }
        // Every term of r that digs into the Laurent variable must raise the
        // other variables; `rho` is the worst dig per unit of raise, and the
        // total raise within the window is bounded by `budget`, so the dig
        // over any product is bounded by rho * budget.  That is both the
        // working floor and the loss in the claimable order (one factor of a
        // product may come from beyond the input window).
        let mut shrink: i64 = 0;
        if let Some(dv) = digging {
            let budget: i64 = (0..rel_vars.len())
                .filter(|&i| i != dv)
                .map(|i| (rel_vars[i].order - 1).max(0))
                .sum();
            let mut rho: i64 = 0;
            for (d, _) in &r_terms {
                if d[dv] >= 0 {
                    continue;
                }
                let raise: i64 = d
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != dv)
                    .map(|(_, &x)| x.max(0))
                    .sum();
                if raise <= 0 {
                    return Err(Error::NotAUnit(
                        "Laurent dig without a financing raise".into(),
                    ));
                }
                rho = rho.max((-d[dv] + raise - 1) / raise);
            }
            shrink = rho * budget;
        }

        // Working window for the geometric series (relative exponents).
        let mut work_vars = rel_vars.clone();
        if let Some(dv) = digging {
            work_vars[dv].floor = work_vars[dv].floor.min(-shrink);
        }
        for v in &mut work_vars {
            if v.kind == VarKind::Power {
                v.floor = 0;
            }
            v.validate()?;
        }

        let mut neg_r = Self::zero(&work_vars);
        for (e, x) in r_terms {
            neg_r.insert_add(e, x)?;
        }
        // accumulators keep the full working window (one() would tighten
        // its floor and then refuse negative-exponent inserts).
        let mut acc = Self::zero(&work_vars);
        acc.insert_add(vec![0; work_vars.len()], Coeff::one())?;
        let mut term = acc.clone();
        let mut guard = 0usize;
        while !term.is_zero() {
            term = Self::mul_raw(&term, &neg_r, &work_vars)?;
            for (e, c2) in &term.terms {
                acc.insert_add(e.clone(), c2.clone())?;
            }
            guard += 1;
            assert!(guard < 100_000, "inversion failed to terminate");
        }

        // Shift back by -m and attach the claimed output window.
        let mut out_vars = self.vars.clone();
        for (i, v) in out_vars.iter_mut().enumerate() {
            let s = if digging == Some(i) { shrink } else { 0 };
            v.order = v.order - 2 * m[i] - s;
            v.floor = (-m[i] - s).min(0);
            if v.kind == VarKind::Power {
                v.floor = 0;
            }
            v.validate()?;
        }
        let mut out = Self::zero(&out_vars);
        for (e, x) in acc.terms {
            let shifted: Vec<i64> = e.iter().zip(&m).map(|(a, b)| a - b).collect();
            out.insert_add(shifted, x.mul(&c_inv)?)?;
        }
        Ok(out.tighten_floors())
    }

    // ----- substitution ---------------------------------------------------

    /// Substitute `value` for the variable `name`.  Negative exponents of
    /// the variable require `value` to pass `invert`'s precondition.
    pub fn substitute(&self, name: &str, value: &Self) -> Result<Self> {
        let idx = match self.index_of(name) {
            Some(i) => i,
            None => return Ok(self.clone()),
        };
        // Variables of the result: ours without `name`, merged with value's.
        let mut rest_vars: Vec<VarSpec> = self
            .vars
            .iter()
            .filter(|v| v.name != name)
            .cloned()
            .collect();
        canonical_order(&mut rest_vars);

        // Group our terms by the exponent of `name`.
        let mut groups: BTreeMap<i64, MultiSeries> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[idx];
            let mut rest: Vec<i64> = Vec::with_capacity(e.len() - 1);
            for (i, &x) in e.iter().enumerate() {
                if i != idx {
                    rest.push(x);
                }
            }
            // rest is ordered by self.vars order sans idx, which matches
            // rest_vars' canonical order (removal preserves sortedness).
            let entry = groups
                .entry(k)
                .or_insert_with(|| MultiSeries::zero(&rest_vars));
            entry.insert_add(rest, c.clone())?;
        }
        if groups.is_empty() {
            return Ok(Self::zero(&Self::merge_vars(&rest_vars, value.vars(), false)?));
        }

        let min_e = *groups.keys().next().unwrap();
        let inv = if min_e < 0 { Some(value.invert()?) } else { None };

        let mut acc: Option<MultiSeries> = None;
        // positive powers ascending, negative powers descending, sharing
        // the running power to avoid recomputation.
        let mut pow_cache: BTreeMap<i64, MultiSeries> = BTreeMap::new();
        for (&k, part) in &groups {
            let piece = if k == 0 {
                part.clone()
            } else {
                let base = if k > 0 { value } else { inv.as_ref().unwrap() };
                let ak = k.abs();
                if !pow_cache.contains_key(&k) {
                    let mut p = base.clone();
                    for _ in 1..ak {
                        p = p.mul(base)?;
                    }
                    pow_cache.insert(k, p);
                }
                pow_cache[&k].mul(part)?
            };
            acc = Some(match acc {
                None => piece,
                Some(s) => s.add(&piece)?,
            });
        }
        Ok(acc.unwrap())
    }

    /// Substitute a plain coefficient for a variable.
    pub fn substitute_const(&self, name: &str, value: Coeff) -> Result<Self> {
        let rest: Vec<VarSpec> = self
            .vars
            .iter()
            .filter(|v| v.name != name)
            .cloned()
            .collect();
        let val = Self::constant(&rest, value);
        self.substitute(name, &val)
    }

    // ----- exp / log -------------------------------------------------------

    fn check_positive_power_order(&self, what: &str) -> Result<()> {
        for e in self.terms.keys() {
            if self.power_total(e) < 1 {
                return Err(Error::ExpLogPrecondition(format!(
                    "{what} requires strictly positive order in power variables"
                )));
            }
        }
        Ok(())
    }

    /// Window bookkeeping for power sums Σ c_k a^k where every term of `a`
    /// has positive power-total degree.  A Laurent variable dug into by
    /// terms of `a` loses rho * budget from its claimable order and gains a
    /// floor of -rho * budget, where rho is the worst dig per unit raise in
    /// the other variables and budget is the total raise available within
    /// their windows (same argument as `invert`).
    fn power_sum_frame(&self) -> Result<(Vec<VarSpec>, Vec<VarSpec>)> {
        let mut work = self.vars.clone();
        let mut claim = self.vars.clone();
        for (i, v) in self.vars.iter().enumerate() {
            if v.kind != VarKind::Laurent {
                continue;
            }
            let mut rho: i64 = 0;
            for e in self.terms.keys() {
                if e[i] >= 0 {
                    continue;
                }
                let raise: i64 = e
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &x)| x.max(0))
                    .sum();
                if raise <= 0 {
                    return Err(Error::ExpLogPrecondition(
                        "Laurent dig without a financing raise".into(),
                    ));
                }
                rho = rho.max((-e[i] + raise - 1) / raise);
            }
            if rho > 0 {
                let budget: i64 = self
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, w)| (w.order - 1).max(0))
                    .sum();
                let shrink = rho * budget;
                work[i].floor = work[i].floor.min(-shrink);
                claim[i].floor = claim[i].floor.min(-shrink);
                claim[i].order -= shrink;
                claim[i].validate()?;
            }
        }
        Ok((work, claim))
    }

    /// Formal exponential; the argument must vanish in the power directions.
    pub fn exp(&self) -> Result<Self> {
        self.check_positive_power_order("exp")?;
        let (work, claim) = self.power_sum_frame()?;
        let a = self.reframe(&work);
        let mut acc = Self::zero(&work);
        acc.insert_add(vec![0; work.len()], Coeff::one())?;
        let mut power = acc.clone();
        let mut k: i64 = 0;
        let mut kfac = Rat::one();
        while !power.is_zero() {
            k += 1;
            kfac *= Rat::from_integer(k.into());
            power = Self::mul_raw(&power, &a, &work)?;
            let term = power.scale(&Coeff::Rat(kfac.recip()))?;
            for (e, c) in term.terms {
                acc.insert_add(e, c)?;
            }
            assert!(k < 10_000, "exp failed to terminate");
        }
        Ok(acc.reframe(&claim).tighten_floors())
    }

    /// Formal logarithm; the argument must have constant term 1.
    pub fn log(&self) -> Result<Self> {
        let r = self.sub(&Self::one(&self.vars))?;
        r.check_positive_power_order("log")?;
        let (work, claim) = r.power_sum_frame()?;
        let a = r.reframe(&work);
        let mut acc = Self::zero(&work);
        let mut power = Self::zero(&work);
        power.insert_add(vec![0; work.len()], Coeff::one())?;
        let mut k: i64 = 0;
        loop {
            k += 1;
            power = Self::mul_raw(&power, &a, &work)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let term = power.scale(&Coeff::from_rat(sign, k))?;
            for (e, c) in term.terms {
                acc.insert_add(e, c)?;
            }
            assert!(k < 10_000, "log failed to terminate");
        }
        Ok(acc.reframe(&claim).tighten_floors())
    }

    // ----- window and layer helpers ----------------------------------------

    /// Drop terms whose total degree over the named variables exceeds `cap`.
    /// Used for working to a fixed total degree alongside the per-variable
    /// windows.
    pub fn truncate_total_degree(&self, names: &[&str], cap: i64) -> Self {
        let idxs: Vec<usize> = names.iter().filter_map(|n| self.index_of(n)).collect();
        let mut out = self.clone();
        out.terms
            .retain(|e, _| idxs.iter().map(|&i| e[i]).sum::<i64>() <= cap);
        out
    }

    /// Like `truncate_total_degree`, but a designated Laurent variable
    /// counts with its positive part only: a group coordinate moved to the
    /// Laurent base keeps its share of the working degree while poles stay
    /// unrestricted.
    pub fn truncate_group_degree(&self, names: &[&str], laurent: &str, cap: i64) -> Self {
        let idxs: Vec<usize> = names.iter().filter_map(|n| self.index_of(n)).collect();
        let yi = self.index_of(laurent);
        let mut out = self.clone();
        out.terms.retain(|e, _| {
            let mut total: i64 = idxs.iter().map(|&i| e[i]).sum();
            if let Some(i) = yi {
                total += e[i].max(0);
            }
            total <= cap
        });
        out
    }


    /// Widen a variable's floor claim (a weaker statement, always sound)
    /// and make it Laurent so negative exponents become representable.
    pub fn widen_to_laurent(&self, name: &str, floor: i64) -> Result<Self> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::IncompatibleVars(name.into()))?;
        let mut out = self.clone();
        out.vars[i].kind = VarKind::Laurent;
        out.vars[i].floor = out.vars[i].floor.min(floor).min(0);
        Ok(out)
    }

    /// Restrict to a sub-window of an existing variable (soundness: shrink
    /// only).  Widening is rejected.
    pub fn restrict_window(&self, name: &str, floor: i64, order: i64) -> Result<Self> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::IncompatibleVars(name.into()))?;
        let v = &self.vars[i];
        if floor < v.floor || order > v.order {
            return Err(Error::Bounds(format!(
                "cannot widen window of {name}"
            )));
        }
        let mut out = self.clone();
        out.vars[i].floor = floor;
        out.vars[i].order = order;
        out.vars[i].validate()?;
        out.terms.retain(|e, _| e[i] >= floor && e[i] < order);
        Ok(out)
    }

    /// Assert a window for a variable on a series *constructed exactly*
    /// (polynomials, monomial products).  The caller certifies that the
    /// value has no terms outside the asserted window.
    pub fn assert_window(&self, name: &str, floor: i64, order: i64) -> Result<Self> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::IncompatibleVars(name.into()))?;
        for e in self.terms.keys() {
            if e[i] < floor || e[i] >= order {
                return Err(Error::Bounds(format!(
                    "assert_window: existing term outside [{floor}, {order}) in {name}"
                )));
            }
        }
        let mut out = self.clone();
        out.vars[i].floor = floor;
        out.vars[i].order = order;
        out.vars[i].validate()?;
        Ok(out)
    }

    /// Introduce extra variables (windows as given) without changing terms.
    pub fn extend_vars(&self, extra: &[VarSpec]) -> Result<Self> {
        let vars = Self::merge_vars(&self.vars, extra, false)?;
        let mut out = Self::zero(&vars);
        for (e, c) in self.remap(&vars) {
            out.insert_add(e, c)?;
        }
        Ok(out)
    }

    /// The coefficient of `name^k` as a series in the remaining variables.
    pub fn layer(&self, name: &str, k: i64) -> Self {
        let idx = match self.index_of(name) {
            Some(i) => i,
            None => {
                return if k == 0 {
                    self.clone()
                } else {
                    Self::zero(&self.vars)
                }
            }
        };
        let mut rest_vars: Vec<VarSpec> = self
            .vars
            .iter()
            .filter(|v| v.name != name)
            .cloned()
            .collect();
        canonical_order(&mut rest_vars);
        let mut out = Self::zero(&rest_vars);
        for (e, c) in &self.terms {
            if e[idx] != k {
                continue;
            }
            let rest: Vec<i64> = e
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, &x)| x)
                .collect();
            out.insert_add(rest, c.clone()).unwrap();
        }
        out
    }

    /// Rename a variable, re-sorting into canonical order.
    pub fn rename_var(&self, from: &str, to: &str) -> Result<Self> {
        if self.index_of(to).is_some() {
            return Err(Error::IncompatibleVars(format!(
                "rename target {to} already present"
            )));
        }
        let idx = match self.index_of(from) {
            Some(i) => i,
            None => return Ok(self.clone()),
        };
        let mut vars = self.vars.clone();
        vars[idx].name = to.to_string();
        let mut sorted = vars.clone();
        canonical_order(&mut sorted);
        let mut out = Self::zero(&sorted);
        let map: Vec<usize> = vars
            .iter()
            .map(|v| sorted.iter().position(|w| w.name == v.name).unwrap())
            .collect();
        for (e, c) in &self.terms {
            let mut ne = vec![0; e.len()];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] = x;
            }
            out.insert_add(ne, c.clone())?;
        }
        Ok(out)
    }

    /// Multiply by a power of a variable (exponent shift).  The window
    /// shifts along with the terms.  A power variable keeps its kind as long
    /// as no shifted exponent goes negative; otherwise it becomes Laurent.
    pub fn shift_var(&self, name: &str, k: i64) -> Result<Self> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::IncompatibleVars(name.into()))?;
        let min_shifted = self.terms.keys().map(|e| e[i] + k).min().unwrap_or(0);
        let mut vars = self.vars.clone();
        vars[i].order += k;
        if vars[i].kind == VarKind::Power && min_shifted >= 0 {
            vars[i].floor = 0;
        } else {
            vars[i].kind = VarKind::Laurent;
            vars[i].floor = (vars[i].floor + k).min(0);
        }
        vars[i].validate()?;
        let names: Vec<String> = self.vars.iter().map(|v| v.name.clone()).collect();
        let mut sorted = vars.clone();
        canonical_order(&mut sorted);
        let mut out = Self::zero(&sorted);
        for (e, c) in &self.terms {
            let mut full = vec![0; sorted.len()];
            for (j, &x) in e.iter().enumerate() {
                let p = sorted.iter().position(|w| w.name == names[j]).unwrap();
                full[p] = if j == i { x + k } else { x };
            }
            out.insert_add(full, c.clone())?;
        }
        Ok(out)
    }

    /// Exact division by the variable `name`: every term must have exponent
    /// at least one there.
    pub fn div_by_var(&self, name: &str) -> Result<Self> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::IncompatibleVars(name.into()))?;
        if self.terms.keys().any(|e| e[i] < 1) {
            return Err(Error::NotAUnit(format!(
                "series not divisible by {name}"
            )));
        }
        self.shift_var(name, -1)
    }

    /// Apply a Galois automorphism (zeta -> zeta^a) to every coefficient.
    pub fn galois(&self, a: u32) -> Result<Self> {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            out.insert_add(e.clone(), c.galois(a)?)?;
        }
        Ok(out)
    }

    /// Equality on the intersection of the windows.
    pub fn eq_within(&self, other: &Self) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Largest window this value claims for `name` (None if absent).
    pub fn window_of(&self, name: &str) -> Option<(i64, i64)> {
        self.spec_of(name).map(|v| (v.floor, v.order))
    }
}

impl fmt::Debug for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    write!(f, "*{}^{}", self.vars[i].name, x)?;
                }
            }
        }
        write!(f, "  [")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{:?}[{},{})", v.name, v.kind, v.floor, v.order)?;
        }
        write!(f, "]")
    }
}

/// A formal quotient of series; equality is by cross-multiplication within
/// the common window.  Carrier for meromorphic objects that have no
/// canonical one-sided expansion.
#[derive(Clone, Debug)]
pub struct SeriesFraction {
    pub num: MultiSeries,
    pub den: MultiSeries,
}

impl SeriesFraction {
    pub fn new(num: MultiSeries, den: MultiSeries) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NotAUnit("fraction with zero denominator".into()));
        }
        Ok(SeriesFraction { num, den })
    }

    pub fn from_series(s: MultiSeries) -> Self {
        let one = MultiSeries::one(&[]);
        SeriesFraction { num: s, den: one }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(SeriesFraction {
            num: self.num.mul(&other.num)?,
            den: self.den.mul(&other.den)?,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.num.is_zero() {
            return Err(Error::NotAUnit("division by zero fraction".into()));
        }
        Ok(SeriesFraction {
            num: self.num.mul(&other.den)?,
            den: self.den.mul(&other.num)?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(SeriesFraction {
            num: self
                .num
                .mul(&other.den)?
                .add(&other.num.mul(&self.den)?)?,
            den: self.den.mul(&other.den)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&SeriesFraction {
            num: other.num.neg(),
            den: other.den.clone(),
        })
    }

    /// Cross-multiplied equality within the common window.
    pub fn eq_within(&self, other: &Self) -> Result<bool> {
        let lhs = self.num.mul(&other.den)?;
        let rhs = other.num.mul(&self.den)?;
        lhs.eq_within(&rhs)
    }

    pub fn substitute(&self, name: &str, value: &MultiSeries) -> Result<Self> {
        Ok(SeriesFraction {
            num: self.num.substitute(name, value)?,
            den: self.den.substitute(name, value)?,
        })
    }

    /// Expand to a series by inverting the denominator (which chooses the
    /// finite-tailed direction determined by the denominator's leading
    /// unit monomial).
    pub fn expand(&self) -> Result<MultiSeries> {
        self.num.mul(&self.den.invert()?)
    }
}

/// Parse helpers shared by tests and the wire format.
pub fn rat_from_strings(num: &str, den: &str) -> Result<Rat> {
    let n: num_bigint::BigInt = num
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad integer {num}")))?;
    let d: num_bigint::BigInt = den
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad integer {den}")))?;
    if d.is_zero() {
        return Err(Error::InvalidInput("zero denominator".into()));
    }
    Ok(Rat::new(n, d))
}

/// A sanity helper for tests: the i64 value of a rational coefficient.
pub fn coeff_i64(c: &Coeff) -> Option<i64> {
    match c {
        Coeff::Rat(r) => {
            if r.denom().is_one() {
                r.numer().to_i64()
            } else {
                None
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q6() -> Vec<VarSpec> {
        vec![VarSpec::power("q", 6)]
    }

    #[test]
    fn difference_of_squares() {
        let vars = vec![VarSpec::power("q", 3)];
        let one = MultiSeries::one(&vars);
        let q = MultiSeries::var(&vars, "q");
        let prod = one.add(&q).unwrap().mul(&one.sub(&q).unwrap()).unwrap();
        let expected = one.sub(&q.mul(&q).unwrap()).unwrap();
        assert!(prod.eq_within(&expected).unwrap());
    }

    #[test]
    fn laurent_cancellation() {
        // (y^-1 + x) + (y - x) = y^-1 + y
        let vars = vec![VarSpec::laurent("y", -2, 3), VarSpec::power("x", 4)];
        let a = MultiSeries::from_terms(
            &vars,
            vec![(vec![("y", -1)], Coeff::one()), (vec![("x", 1)], Coeff::one())],
        );
        let b = MultiSeries::from_terms(
            &vars,
            vec![(vec![("y", 1)], Coeff::one()), (vec![("x", 1)], Coeff::from_int(-1))],
        );
        let s = a.add(&b).unwrap();
        assert_eq!(s.num_terms(), 2);
        assert!(s.coeff(&[("y", -1)]).is_one());
        assert!(s.coeff(&[("y", 1)]).is_one());
    }

    #[test]
    fn truncated_geometric_times_one_minus_q() {
        // (sum_{n<5} q^n) * (1 - q) = 1 - q^5 -> 1 within window q < 5.
        let vars = vec![VarSpec::power("q", 5)];
        let mut geo = MultiSeries::zero(&vars);
        for n in 0..5 {
            geo = geo
                .add(&MultiSeries::monomial(&vars, &[("q", n)], Coeff::one()))
                .unwrap();
        }
        let one_minus_q = MultiSeries::one(&vars)
            .sub(&MultiSeries::var(&vars, "q"))
            .unwrap();
        let prod = geo.mul(&one_minus_q).unwrap();
        assert!(prod.is_one());
    }

    #[test]
    fn invert_geometric() {
        let vars = q6();
        let one_minus_q = MultiSeries::one(&vars)
            .sub(&MultiSeries::var(&vars, "q"))
            .unwrap();
        let inv = one_minus_q.invert().unwrap();
        for n in 0..6 {
            assert!(inv.coeff(&[("q", n)]).is_one(), "coefficient of q^{n}");
        }
        assert!(one_minus_q.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn invert_y_plus_x() {
        // 1/(y + x) = y^-1 - y^-2 x + y^-3 x^2 - ... in Q((y))[[x]].
        // generous y-order: the inverse's claimed window shrinks by the
        // digging budget (one y-step per x-step, x-budget 3).
        let vars = vec![VarSpec::laurent("y", -1, 12), VarSpec::power("x", 4)];
        let a = MultiSeries::var(&vars, "y")
            .add(&MultiSeries::var(&vars, "x"))
            .unwrap();
        let inv = a.invert().unwrap();
        for k in 0..4i64 {
            let c = inv.coeff(&[("y", -1 - k), ("x", k)]);
            let expected = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(coeff_i64(&c), Some(expected), "term y^{} x^{}", -1 - k, k);
        }
        let prod = a.mul(&inv).unwrap();
        assert!(prod.is_one(), "certificate: {prod}");
    }

    #[test]
    fn invert_x_fails_in_power_ring() {
        let vars = vec![VarSpec::power("x", 5)];
        let x = MultiSeries::var(&vars, "x");
        match x.invert() {
            Err(Error::NotAUnit(_)) => {}
            other => panic!("expected NotAUnit, got {other:?}"),
        }
    }

    #[test]
    fn substitute_to_zero() {
        let vars = vec![VarSpec::power("x", 5)];
        let x = MultiSeries::var(&vars, "x");
        let s = x.mul(&x).unwrap().add(&x).unwrap();
        let z = MultiSeries::zero(&[]);
        assert!(s.substitute("x", &z).unwrap().is_zero());
    }

    #[test]
    fn substitute_y_maps_to_qy() {
        // 1/(1-y) = sum y^n; y -> q y gives 1 + qy + q^2 y^2 within windows.
        let vars = vec![VarSpec::laurent("y", 0, 3)];
        let mut geo = MultiSeries::zero(&vars);
        for n in 0..3 {
            geo = geo
                .add(&MultiSeries::monomial(&vars, &[("y", n)], Coeff::one()))
                .unwrap();
        }
        let target = vec![VarSpec::power("q", 3), VarSpec::laurent("y", 0, 3)];
        let qy = MultiSeries::var(&target, "q")
            .mul(&MultiSeries::var(&target, "y"))
            .unwrap();
        let out = geo.substitute("y", &qy).unwrap();
        assert!(out.coeff(&[]).is_one());
        assert!(out.coeff(&[("q", 1), ("y", 1)]).is_one());
        assert!(out.coeff(&[("q", 2), ("y", 2)]).is_one());
        assert_eq!(out.num_terms(), 3);
    }

    #[test]
    fn substitute_additive_law_slot_by_laurent() {
        // F(x1, x2) = x1 + x2 with x2 -> y gives x1 + y, a unit of Q((y))[[x1]].
        let vars = vec![VarSpec::power("x1", 5), VarSpec::power("x2", 5)];
        let f = MultiSeries::var(&vars, "x1")
            .add(&MultiSeries::var(&vars, "x2"))
            .unwrap();
        let yv = vec![VarSpec::laurent("y", -1, 16)];
        let y = MultiSeries::var(&yv, "y");
        let g = f.substitute("x2", &y).unwrap();
        let inv = g.invert().unwrap();
        assert!(g.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn exp_log_round_trip() {
        let vars = vec![
            VarSpec::power("x", 4),
            VarSpec::power("q", 3),
            VarSpec::laurent("y", -2, 3),
        ];
        // log(1 + x + yqx), then exp, must return the argument.
        let a = MultiSeries::one(&vars)
            .add(&MultiSeries::var(&vars, "x"))
            .unwrap()
            .add(&MultiSeries::monomial(
                &vars,
                &[("y", 1), ("q", 1), ("x", 1)],
                Coeff::one(),
            ))
            .unwrap();
        let round = a.log().unwrap().exp().unwrap();
        assert!(round.eq_within(&a).unwrap());
    }

    #[test]
    fn mercator_series() {
        let vars = q6();
        let a = MultiSeries::one(&vars)
            .sub(&MultiSeries::var(&vars, "q"))
            .unwrap();
        let l = a.log().unwrap();
        for n in 1..6 {
            assert_eq!(
                l.coeff(&[("q", n)]),
                Coeff::from_rat(-1, n),
                "log(1-q) coefficient of q^{n}"
            );
        }
    }

    #[test]
    fn exp_of_zero() {
        let vars = q6();
        assert!(MultiSeries::zero(&vars).exp().unwrap().is_one());
    }

    #[test]
    fn mul_window_shrinks_with_laurent_floor() {
        // multiplying two series with y-floor -2 costs each side's order.
        let vars = vec![VarSpec::laurent("y", -2, 6)];
        let a = MultiSeries::var(&vars, "y");
        let prod = a.mul(&a).unwrap();
        // constructed values carry support-tight floors, so y * y keeps the
        // full order; the floor claim stays at the support.
        assert_eq!(prod.window_of("y"), Some((0, 6)));
        let b = MultiSeries::monomial(&vars, &[("y", -2)], Coeff::one());
        let prod2 = a.mul(&b).unwrap();
        assert_eq!(prod2.window_of("y"), Some((-1, 4)));
    }

    #[test]
    fn fraction_equality_cross_multiplies() {
        // x / x^2 = 1 / x as fractions.
        let vars = vec![VarSpec::power("x", 5)];
        let x = MultiSeries::var(&vars, "x");
        let x2 = x.mul(&x).unwrap();
        let f1 = SeriesFraction::new(x.clone(), x2.clone()).unwrap();
        let f2 = SeriesFraction::new(MultiSeries::one(&vars), x.clone()).unwrap();
        assert!(f1.eq_within(&f2).unwrap());
        let f3 = SeriesFraction::new(MultiSeries::one(&vars), x2).unwrap();
        assert!(!f1.eq_within(&f3).unwrap());
    }
}
