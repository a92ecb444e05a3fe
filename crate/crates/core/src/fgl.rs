//! Formal group laws to a truncation degree: construction from a
//! coordinate, axiom certificates, formal inverses, and the change of base
//! to Laurent coefficients (the unit F(x, y) of R((y))[[x]]).

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::series::{MultiSeries, VarSpec};

pub const DEFAULT_DEGREE: i64 = 8;

/// Names of the two formal variables of a law.
pub const X1: &str = "x1";
pub const X2: &str = "x2";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Additive,
    Multiplicative,
    FromCoordinate,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseLaw {
    Additive,
    Multiplicative,
}

/// A one-variable series f with f(0) = 0 and f'(0) = 1, possibly with
/// extra base variables (a q-expansion coordinate carries q along).
#[derive(Clone, Debug)]
pub struct Coordinate {
    /// The distinguished series variable.
    pub var: String,
    pub series: MultiSeries,
}

impl Coordinate {
    pub fn new(var: &str, series: MultiSeries) -> Result<Self> {
        let zero_layer = series.layer(var, 0);
        if !zero_layer.is_zero() {
            return Err(Error::NotACoordinate("f(0) != 0".into()));
        }
        if !series.layer(var, 1).is_one() {
            return Err(Error::NotACoordinate("f'(0) != 1".into()));
        }
        Ok(Coordinate { var: var.into(), series })
    }

    /// The identity coordinate x to degree `d`.
    pub fn identity(var: &str, d: i64) -> Self {
        let vars = vec![VarSpec::power(var, d + 1)];
        Coordinate { var: var.into(), series: MultiSeries::var(&vars, var) }
    }

    /// 1 - e^{-x} to degree `d`.
    pub fn one_minus_exp(var: &str, d: i64) -> Self {
        let vars = vec![VarSpec::power(var, d + 1)];
        let x = MultiSeries::var(&vars, var);
        let series = MultiSeries::one(&vars)
            .sub(&x.neg().exp().unwrap())
            .unwrap();
        Coordinate { var: var.into(), series }
    }

    /// Coordinate from explicit higher coefficients: x + sum c_k x^k.
    pub fn from_coeffs(var: &str, d: i64, higher: &[(i64, Coeff)]) -> Result<Self> {
        let vars = vec![VarSpec::power(var, d + 1)];
        let mut s = MultiSeries::var(&vars, var);
        for (k, c) in higher {
            if *k < 2 {
                return Err(Error::NotACoordinate("coefficients must start at x^2".into()));
            }
            s = s.add(&MultiSeries::monomial(&vars, &[(var, *k)], c.clone()))?;
        }
        Coordinate::new(var, s)
    }

    /// Truncation degree in the distinguished variable.
    pub fn degree(&self) -> i64 {
        self.series.spec_of(&self.var).map(|v| v.order - 1).unwrap_or(0)
    }

    /// f(t)/t, a unit series.
    pub fn unit_part(&self) -> MultiSeries {
        self.series.div_by_var(&self.var).expect("f(0) = 0")
    }

    /// The compositional inverse g with f(g(x)) = x, solved degree by
    /// degree.
    pub fn compositional_inverse(&self) -> Result<Coordinate> {
        let d = self.degree();
        let vars: Vec<VarSpec> = self.series.vars().to_vec();
        let var = self.var.as_str();
        let mut g = MultiSeries::var(&vars, var);
        for deg in 2..=d {
            // residual = f(g(x)) - x, exact below degree deg+1.
            let fg = self.series.substitute(var, &g)?;
            let resid = fg.sub(&MultiSeries::var(&vars, var))?;
            let layer = resid.layer(var, deg);
            if layer.is_zero() {
                continue;
            }
            // f(g + c x^deg) = f(g) + c x^deg + higher, so subtract.
            let correction = layer
                .extend_vars(&vars)?
                .mul(&MultiSeries::monomial(&vars, &[(var, deg)], Coeff::one()))?
                .neg();
            g = g.add(&correction)?;
        }
        Coordinate::new(var, g)
    }
}

/// F(x1, x2) truncated to total degree D, with provenance.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    pub series: MultiSeries,
    pub degree: i64,
    pub provenance: Provenance,
}

fn law_vars(d: i64) -> Vec<VarSpec> {
    vec![VarSpec::power(X1, d + 1), VarSpec::power(X2, d + 1)]
}

impl FormalGroupLaw {
    pub fn additive(d: i64) -> Self {
        let vars = law_vars(d);
        let f = MultiSeries::var(&vars, X1)
            .add(&MultiSeries::var(&vars, X2))
            .unwrap();
        FormalGroupLaw { series: f, degree: d, provenance: Provenance::Additive }
    }

    /// x1 + x2 - x1 x2 (the law of 1 - e^{-x} over the additive group).
    pub fn multiplicative(d: i64) -> Self {
        let vars = law_vars(d);
        let x1 = MultiSeries::var(&vars, X1);
        let x2 = MultiSeries::var(&vars, X2);
        let f = x1.add(&x2).unwrap().sub(&x1.mul(&x2).unwrap()).unwrap();
        FormalGroupLaw { series: f, degree: d, provenance: Provenance::Multiplicative }
    }

    fn trim(&self, s: MultiSeries) -> MultiSeries {
        s.truncate_total_degree(&[X1, X2], self.degree)
    }

    /// The group sum of an arbitrary list of series, folded left through F.
    /// Associativity makes the fold order immaterial to the working degree.
    /// The law's own slots are renamed away first so that arguments whose
    /// variables happen to be called x1/x2 are not captured.
    pub fn sum_of(&self, args: &[MultiSeries]) -> Result<MultiSeries> {
        match args.len() {
            0 => Ok(MultiSeries::zero(&[])),
            1 => Ok(args[0].clone()),
            _ => {
                let fresh = self
                    .series
                    .rename_var(X1, "__fgl_a")?
                    .rename_var(X2, "__fgl_b")?;
                let mut acc = args[0].clone();
                for a in &args[1..] {
                    acc = fresh.substitute("__fgl_a", &acc)?.substitute("__fgl_b", a)?;
                }
                Ok(acc)
            }
        }
    }

    /// Apply F to two named variables of an ambient ring.
    pub fn sum_vars(&self, vars: &[VarSpec], a: &str, b: &str) -> Result<MultiSeries> {
        self.sum_of(&[MultiSeries::var(vars, a), MultiSeries::var(vars, b)])
    }
}

/// F(x1, x2) = f(f^{-1}(x1) . f^{-1}(x2)) where `.` is the base law.
pub fn fgl_from_coordinate(f: &Coordinate, base: BaseLaw, d: i64) -> Result<FormalGroupLaw> {
    if f.degree() < d {
        return Err(Error::Bounds(format!(
            "coordinate degree {} below requested {d}",
            f.degree()
        )));
    }
    let vars = law_vars(d);
    let finv = f.compositional_inverse()?;
    let a = finv.series.rename_var(&finv.var, X1)?.extend_vars(&vars)?;
    let b = finv.series.rename_var(&finv.var, X2)?.extend_vars(&vars)?;
    let combined = match base {
        BaseLaw::Additive => a.add(&b)?,
        BaseLaw::Multiplicative => a.add(&b)?.sub(&a.mul(&b)?)?,
    };
    let series = f
        .series
        .substitute(&f.var, &combined)?
        .truncate_total_degree(&[X1, X2], d);
    Ok(FormalGroupLaw { series, degree: d, provenance: Provenance::FromCoordinate })
}

/// Exact residuals of the three formal-group axioms; each must be zero.
#[derive(Debug)]
pub struct FglAxiomReport {
    pub unit_residual: MultiSeries,
    pub commutativity_residual: MultiSeries,
    pub associativity_residual: MultiSeries,
}

impl FglAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.unit_residual.is_zero()
            && self.commutativity_residual.is_zero()
            && self.associativity_residual.is_zero()
    }
}

pub fn check_fgl_axioms(law: &FormalGroupLaw) -> Result<FglAxiomReport> {
    let d = law.degree;
    let vars = law_vars(d);
    let x1 = MultiSeries::var(&vars, X1);

    // F(x1, 0) = x1
    let unit = law
        .series
        .substitute(X2, &MultiSeries::zero(&[]))?
        .sub(&x1)?;

    // F(x1, x2) = F(x2, x1): swap via a temporary name.
    let swapped = law
        .series
        .rename_var(X1, "__t")?
        .rename_var(X2, X1)?
        .rename_var("__t", X2)?;
    let comm = law.series.sub(&swapped)?;

    // F(F(x1,x2),x3) = F(x1,F(x2,x3)) to total degree D.
    let tri = vec![
        VarSpec::power(X1, d + 1),
        VarSpec::power(X2, d + 1),
        VarSpec::power("x3", d + 1),
    ];
    let a12 = law.sum_vars(&tri, X1, X2)?;
    let a23 = law.sum_vars(&tri, X2, "x3")?;
    let left = law.sum_of(&[a12, MultiSeries::var(&tri, "x3")])?;
    let right = law.sum_of(&[MultiSeries::var(&tri, X1), a23])?;
    let assoc = left.sub(&right)?.truncate_total_degree(&[X1, X2, "x3"], d);

    Ok(FglAxiomReport {
        unit_residual: law.trim(unit),
        commutativity_residual: law.trim(comm),
        associativity_residual: assoc,
    })
}

/// The formal inverse: iota with F(x, iota(x)) = 0 to degree D, solved
/// degree by degree.
pub fn formal_inverse(law: &FormalGroupLaw) -> Result<MultiSeries> {
    let d = law.degree;
    let vars = vec![VarSpec::power("x", d + 1)];
    let x = MultiSeries::var(&vars, "x");
    let mut iota = x.neg();
    for deg in 2..=d {
        let fx = law
            .series
            .substitute(X1, &x)?
            .substitute(X2, &iota)?
            .truncate_total_degree(&["x"], d);
        let layer = fx.layer("x", deg);
        if layer.is_zero() {
            continue;
        }
        // F(x, iota + c x^deg) = F(x, iota) + c x^deg + higher.
        let corr = layer
            .extend_vars(&vars)?
            .mul(&MultiSeries::monomial(&vars, &[("x", deg)], Coeff::one()))?
            .neg();
        iota = iota.add(&corr)?;
    }
    Ok(iota)
}

/// F(x, y) expanded over the Laurent base R((y))[[x]], together with its
/// inverse certifying that it is a unit there.
pub struct LaurentUnit {
    pub value: MultiSeries,
    pub inverse: MultiSeries,
}

/// Change of base: substitute a Laurent variable for the second slot of F.
/// The expansion is y + sum a_i(y) x^i whose constant term y is a unit.
pub fn base_change_laurent(
    law: &FormalGroupLaw,
    y: &str,
    y_floor: i64,
    y_order: i64,
) -> Result<LaurentUnit> {
    let yv = vec![VarSpec::laurent(y, y_floor, y_order)];
    let yy = MultiSeries::var(&yv, y);
    let value = law.series.substitute(X2, &yy)?.rename_var(X1, "x")?;
    let inverse = value.invert()?;
    Ok(LaurentUnit { value, inverse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coeff;

    #[test]
    fn identity_coordinate_gives_additive_law() {
        let f = Coordinate::identity("t", 8);
        let law = fgl_from_coordinate(&f, BaseLaw::Additive, 8).unwrap();
        assert!(law.series.eq_within(&FormalGroupLaw::additive(8).series).unwrap());
        assert!(check_fgl_axioms(&law).unwrap().all_pass());
    }

    #[test]
    fn one_minus_exp_gives_multiplicative_law() {
        // f = 1 - e^{-x} over the additive base gives x1 + x2 - x1 x2
        // exactly: the law is polynomial, so the window sees all of it.
        let f = Coordinate::one_minus_exp("t", 8);
        let law = fgl_from_coordinate(&f, BaseLaw::Additive, 8).unwrap();
        let expected = FormalGroupLaw::multiplicative(8);
        assert!(law.series.eq_within(&expected.series).unwrap());
    }

    #[test]
    fn cubic_coordinate_passes_axioms() {
        let f = Coordinate::from_coeffs("t", 8, &[(3, Coeff::one())]).unwrap();
        let law = fgl_from_coordinate(&f, BaseLaw::Additive, 8).unwrap();
        let report = check_fgl_axioms(&law).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn compositional_inverse_round_trip() {
        let f = Coordinate::from_coeffs(
            "t",
            8,
            &[(2, Coeff::from_rat(1, 2)), (4, Coeff::from_int(-3))],
        )
        .unwrap();
        let g = f.compositional_inverse().unwrap();
        let round = f.series.substitute("t", &g.series).unwrap();
        let t = MultiSeries::var(g.series.vars(), "t");
        assert!(round.eq_within(&t).unwrap());
    }

    #[test]
    fn additive_and_multiplicative_pass_axioms() {
        for law in [FormalGroupLaw::additive(8), FormalGroupLaw::multiplicative(8)] {
            assert!(check_fgl_axioms(&law).unwrap().all_pass());
        }
    }

    #[test]
    fn perturbed_law_fails_associativity() {
        let d = 4;
        let vars = law_vars(d);
        let x1 = MultiSeries::var(&vars, X1);
        let x2 = MultiSeries::var(&vars, X2);
        let bad = x1
            .add(&x2)
            .unwrap()
            .add(&x1.mul(&x1).unwrap().mul(&x2).unwrap())
            .unwrap();
        let law = FormalGroupLaw { series: bad, degree: d, provenance: Provenance::Random };
        let report = check_fgl_axioms(&law).unwrap();
        assert!(!report.associativity_residual.is_zero());
    }

    #[test]
    fn formal_inverse_additive_and_multiplicative() {
        let add = FormalGroupLaw::additive(8);
        let iota = formal_inverse(&add).unwrap();
        let vars = vec![VarSpec::power("x", 9)];
        let x = MultiSeries::var(&vars, "x");
        assert!(iota.eq_within(&x.neg()).unwrap());

        // multiplicative: iota = -x/(1-x) = -x - x^2 - x^3 - ...
        let mult = FormalGroupLaw::multiplicative(8);
        let iota = formal_inverse(&mult).unwrap();
        for k in 1..=8 {
            assert_eq!(
                iota.coeff(&[("x", k)]),
                Coeff::from_int(-1),
                "iota coefficient of x^{k}"
            );
        }
    }

    #[test]
    fn inverse_is_an_involution() {
        let f = Coordinate::from_coeffs(
            "t",
            8,
            &[(2, Coeff::from_rat(2, 3)), (3, Coeff::from_rat(-1, 5))],
        )
        .unwrap();
        let law = fgl_from_coordinate(&f, BaseLaw::Additive, 8).unwrap();
        let iota = formal_inverse(&law).unwrap();
        let twice = iota
            .substitute("x", &iota)
            .unwrap()
            .truncate_total_degree(&["x"], 8);
        let x = MultiSeries::var(iota.vars(), "x");
        assert!(twice.eq_within(&x).unwrap());
    }

    #[test]
    fn base_change_certificates() {
        // additive: F(x, y) = x + y, with a product-certified inverse.
        let add = FormalGroupLaw::additive(6);
        let u = base_change_laurent(&add, "y", -1, 20).unwrap();
        let prod = u.value.mul(&u.inverse).unwrap();
        assert!(prod.is_one(), "additive certificate: {prod}");
        assert_eq!(u.inverse.coeff(&[("y", -1)]), Coeff::one());
        assert_eq!(u.inverse.coeff(&[("y", -2), ("x", 1)]), Coeff::from_int(-1));

        // multiplicative: F(x, y) = y + x(1 - y).
        let mult = FormalGroupLaw::multiplicative(6);
        let u = base_change_laurent(&mult, "y", -1, 20).unwrap();
        let expected_vars = vec![VarSpec::laurent("y", -1, 20), VarSpec::power("x", 7)];
        let expected = MultiSeries::from_terms(
            &expected_vars,
            vec![
                (vec![("y", 1)], Coeff::one()),
                (vec![("x", 1)], Coeff::one()),
                (vec![("x", 1), ("y", 1)], Coeff::from_int(-1)),
            ],
        );
        assert!(u.value.eq_within(&expected).unwrap());
        assert!(u.value.mul(&u.inverse).unwrap().is_one());
    }

    #[test]
    fn base_change_power_kind_is_not_a_unit() {
        // substituting a power variable for the second slot leaves a
        // non-unit: inversion must fail.
        let add = FormalGroupLaw::additive(6);
        let vars = vec![VarSpec::power("y", 7)];
        let yy = MultiSeries::var(&vars, "y");
        let g = add.series.substitute(X2, &yy).unwrap();
        match g.invert() {
            Err(Error::NotAUnit(_)) => {}
            other => panic!("expected NotAUnit, got {other:?}"),
        }
    }
}
