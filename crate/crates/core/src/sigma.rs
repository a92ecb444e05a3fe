//! q-expansions of the Weierstrass-type series Phi and sigma, their
//! quasi-periodicity, the meromorphic function W, the canonical cubical
//! structure over Q[[q]], and torsion-point translate factors over
//! cyclotomic fields.
//!
//!   Phi(u, q) = (1 - u^{-1}) prod_{n>=1} (1 - q^n u)(1 - q^n u^{-1}) / (1 - q^n)^2
//!   sigma     = u^{1/2} Phi
//!
//! with u = e^x and q = e^{2 pi i tau}.  The half-integral u-power of
//! sigma lives in the `half_u_shift` field; every stored body is integral.
//! In exponential coordinates Phi = x + O(x^2) with linear coefficient
//! exactly 1, which is the d(Phi)_0 = 1 rigidification used throughout.

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::fgl::{Coordinate, FormalGroupLaw};
use crate::series::{MultiSeries, SeriesFraction, VarSpec};
use crate::theta::{theta_p_from_trivialization, ThetaSection};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coords {
    /// Multiplicative: Laurent variable u.
    Mult,
    /// Exponential: power variable x with u = e^x expanded.
    Exp,
}

#[derive(Clone, Debug)]
pub struct SigmaSeries {
    pub body: MultiSeries,
    pub coords: Coords,
    /// sigma = u^{1/2} Phi carries shift 1; Phi carries shift 0.
    pub half_u_shift: i64,
}

/// Geometric series 1/(1 - q^n) constructed directly.
pub fn geom_series(vars: &[VarSpec], q: &str, n: i64, q_order: i64) -> MultiSeries {
    let mut acc = MultiSeries::zero(vars);
    let mut j = 0;
    while j * n < q_order {
        acc = acc
            .add(&MultiSeries::monomial(vars, &[(q, j * n)], Coeff::one()))
            .unwrap();
        j += 1;
    }
    acc
}

/// Phi in multiplicative coordinates over the given (q, u) windows.
pub fn phi_series_mult(q_order: i64, u_floor: i64, u_order: i64) -> Result<MultiSeries> {
    if q_order < 1 || u_order < 2 || u_floor > -1 {
        return Err(Error::Bounds("phi_series_mult windows too small".into()));
    }
    let vars = vec![
        VarSpec::power("q", q_order),
        VarSpec::laurent("u", u_floor, u_order),
    ];
    let one = MultiSeries::one(&vars);
    let mut acc = one.sub(&MultiSeries::monomial(&vars, &[("u", -1)], Coeff::one()))?;
    for n in 1..q_order {
        let f1 = one.sub(&MultiSeries::monomial(&vars, &[("q", n), ("u", 1)], Coeff::one()))?;
        let f2 = one.sub(&MultiSeries::monomial(&vars, &[("q", n), ("u", -1)], Coeff::one()))?;
        let g = geom_series(&vars, "q", n, q_order);
        acc = acc.mul(&f1)?.mul(&f2)?.mul(&g)?.mul(&g)?;
        // the factors are exact polynomials, so the full orders stay
        // claimable; floors stay at the tightened support (a deep floor
        // claim would only worsen later order propagation).
        let fu = acc.window_of("u").unwrap().0;
        acc = acc
            .assert_window("u", fu, u_order)?
            .assert_window("q", 0, q_order)?;
    }
    Ok(acc)
}

/// Phi in exponential coordinates: a series in (q, x) with dPhi_0 = 1.
pub fn phi_series_exp(q_order: i64, x_order: i64) -> Result<MultiSeries> {
    if q_order < 1 || x_order < 2 {
        return Err(Error::Bounds("phi_series_exp windows too small".into()));
    }
    let vars = vec![VarSpec::power("q", q_order), VarSpec::power("x", x_order)];
    let x = MultiSeries::var(&vars, "x");
    let one = MultiSeries::one(&vars);
    let e_neg = x.neg().exp()?;
    let e_pos = x.exp()?;
    let mut acc = one.sub(&e_neg)?;
    for n in 1..q_order {
        let qn = MultiSeries::monomial(&vars, &[("q", n)], Coeff::one());
        let f1 = one.sub(&qn.mul(&e_pos)?)?;
        let f2 = one.sub(&qn.mul(&e_neg)?)?;
        let g = geom_series(&vars, "q", n, q_order);
        acc = acc.mul(&f1)?.mul(&f2)?.mul(&g)?.mul(&g)?;
    }
    Ok(acc)
}

pub fn phi_series(q_order: i64, span: i64, coords: Coords) -> Result<SigmaSeries> {
    let body = match coords {
        Coords::Mult => phi_series_mult(q_order, -span, span + 1)?,
        Coords::Exp => phi_series_exp(q_order, span)?,
    };
    Ok(SigmaSeries { body, coords, half_u_shift: 0 })
}

pub fn sigma_series(q_order: i64, span: i64, coords: Coords) -> Result<SigmaSeries> {
    let mut s = phi_series(q_order, span, coords)?;
    s.half_u_shift = 1;
    Ok(s)
}

/// Phi as a rigid coordinate on the formal group: exponential coordinates,
/// distinguished variable x, base variable q.
pub fn phi_coordinate(q_order: i64, x_degree: i64) -> Result<Coordinate> {
    let body = phi_series_exp(q_order, x_degree + 1)?;
    Coordinate::new("x", body)
}

/// Quasi-periodicity: Phi(u q^n) = (-1)^n u^{-n} q^{-n(n+1)/2} Phi(u).
/// Returns the exact residual of the cross-multiplied identity
///   q^{n(n+1)/2} u^{n} Phi(u q^n) - (-1)^n Phi(u).
/// Both sides are assembled directly from the defining product with
/// u q^n in place of u, over a q-Laurent ring wide enough for the shifts;
/// every factor is an exact polynomial, so the full windows remain
/// claimable.
pub fn quasiperiodicity_residual(n: i64, q_order: i64, u_span: i64) -> Result<MultiSeries> {
    if n.unsigned_abs() > 3 {
        return Err(Error::Bounds("quasi-periodicity checked for |n| <= 3".into()));
    }
    let na = n.abs();
    let u_floor = -(u_span + na + 1);
    let u_order = u_span + na + 2;
    let q_floor = -(na * (u_span + na + 2) + 3);
    let vars = vec![
        VarSpec::laurent("q", q_floor, q_order),
        VarSpec::laurent("u", u_floor, u_order),
    ];
    let one = MultiSeries::one(&vars);
    let keep = |s: MultiSeries| -> Result<MultiSeries> {
        let fu = s.window_of("u").unwrap().0;
        let fq = s.window_of("q").unwrap().0;
        s.assert_window("u", fu, u_order)?.assert_window("q", fq, q_order)
    };

    // Phi with u replaced by u q^shift, from the product formula.  A
    // factor whose q-power exceeds the window is 1 there and is skipped.
    let factor = |qe: i64, ue: i64| -> Result<MultiSeries> {
        if qe >= q_order {
            return Ok(one.clone());
        }
        Ok(one.sub(&MultiSeries::monomial(&vars, &[("q", qe), ("u", ue)], Coeff::one()))?)
    };
    let build = |shift: i64| -> Result<MultiSeries> {
        let mut acc = factor(-shift, -1)?;
        // shifted factors still land inside the q-window for
        // m up to q_order + |shift|.
        for m in 1..q_order + shift.abs() {
            let f1 = factor(m + shift, 1)?;
            let f2 = factor(m - shift, -1)?;
            let g = geom_series(&vars, "q", m, q_order);
            acc = keep(acc.mul(&f1)?.mul(&f2)?.mul(&g)?.mul(&g)?)?;
        }
        Ok(acc)
    };

    let lhs = build(n)?
        .shift_var("q", n * (n + 1) / 2)?
        .shift_var("u", n)?;
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let rhs = build(0)?.scale(&Coeff::from_int(sign))?;
    let out = lhs.sub(&rhs)?;
    // restrict the report to the honestly shared region.
    out.restrict_window("q", 0, q_order)
}

/// W(x, y, z) = Phi(x+y) Phi(x+z) / (Phi(x) Phi(x+y+z)) as a formal
/// fraction in exponential coordinates.
pub fn w_series(q_order: i64, x_order: i64) -> Result<SeriesFraction> {
    let phi = phi_series_exp(q_order, x_order)?.rename_var("x", "t")?;
    let vars = vec![
        VarSpec::power("q", q_order),
        VarSpec::power("x", x_order),
        VarSpec::power("y", x_order),
        VarSpec::power("z", x_order),
    ];
    let x = MultiSeries::var(&vars, "x");
    let y = MultiSeries::var(&vars, "y");
    let z = MultiSeries::var(&vars, "z");
    // substituting a sum of variables for t is exact only up to the total
    // degree the t-window provided; keep the cap explicit on both parts.
    let cap = x_order - 1;
    let names = ["x", "y", "z"];
    let at = |arg: &MultiSeries| -> Result<MultiSeries> {
        Ok(phi.substitute("t", arg)?.truncate_total_degree(&names, cap))
    };
    let num = at(&x.add(&y)?)?
        .mul(&at(&x.add(&z)?)?)?
        .truncate_total_degree(&names, cap);
    let den = at(&x)?
        .mul(&at(&x.add(&y)?.add(&z)?)?)?
        .truncate_total_degree(&names, cap);
    SeriesFraction::new(num, den)
}

/// The canonical cubical structure: the Theta^3-section of the coordinate
/// Phi over the additive formal group of Q[[q]].  Passes rigidity, all
/// symmetries and the cocycle identity (the computational Theorem of the
/// Cube).
pub fn cubical_structure_series(q_order: i64, degree: i64) -> Result<ThetaSection> {
    let f = phi_coordinate(q_order, degree + 1)?;
    let law = FormalGroupLaw::additive(degree);
    theta_p_from_trivialization(&f, &law, 3)
}

/// An N-torsion point a = (2 pi i / N)(l + k tau), with its exact order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorsionPoint {
    pub n: u32,
    pub l: u32,
    pub k: u32,
}

impl TorsionPoint {
    pub fn new(n: u32, l: u32, k: u32) -> Result<Self> {
        if n < 2 || n > 12 {
            return Err(Error::Bounds(format!("level N = {n} outside 2..=12")));
        }
        if l >= n || k >= n {
            return Err(Error::Bounds("torsion indices must satisfy 0 <= l, k < N".into()));
        }
        if l == 0 && k == 0 {
            return Err(Error::DegenerateTorsionPoint);
        }
        Ok(TorsionPoint { n, l, k })
    }

    pub fn exact_order(&self) -> u32 {
        let g = num_integer::gcd(num_integer::gcd(self.l, self.k), self.n);
        self.n / g
    }
}

/// The single-root translate factor
///   h_a(x) = x e^{-k x / N} sigma(x - a) / (sigma(x) sigma(-a)),
/// a genuine series with constant term 1 over Q(zeta_N) in (Q, x), with
/// q = Q^N.  The multiplicative product formula is used with
/// u -> u zeta^{-l} Q^{-k}; for 0 <= k < N every factor is already a
/// power series in Q (the quasi-periodicity law in product form), and the
/// half-integral u-powers cancel in the quotient.
pub fn level_translate_factor(a: &TorsionPoint, q_order: i64, x_order: i64) -> Result<MultiSeries> {
    let nn = a.n as i64;
    let l = a.l as i64;
    let k = a.k as i64;
    let q_cap = nn * q_order + 1;
    let vars = vec![VarSpec::power("Q", q_cap), VarSpec::power("x", x_order)];
    let one = MultiSeries::one(&vars);
    let x = MultiSeries::var(&vars, "x");
    let e_pos = x.exp()?;
    let e_neg = x.neg().exp()?;
    let zeta = |e: i64| Coeff::zeta(a.n, e);

    let mono = |qe: i64, ze: i64, u: Option<&MultiSeries>| -> Result<MultiSeries> {
        let mut t = MultiSeries::monomial(&vars, &[("Q", qe)], zeta(ze));
        if let Some(us) = u {
            t = t.mul(us)?;
        }
        Ok(t)
    };

    // Phi(u w) with w = zeta^{-l} Q^{-k}; the (1 - q^n)^{-2} normalizers of
    // the three Phi's cancel in the ratio up to one leftover factor
    // prod (1 - Q^{Nn})^2 in the numerator.
    let mut num = one.sub(&mono(k, l, Some(&e_neg))?)?;
    let mut m = 1;
    while nn * m - k < q_cap {
        num = num.mul(&one.sub(&mono(nn * m - k, -l, Some(&e_pos))?)?)?;
        if nn * m + k < q_cap {
            num = num.mul(&one.sub(&mono(nn * m + k, l, Some(&e_neg))?)?)?;
        }
        m += 1;
    }
    let mut m = 1;
    while nn * m < q_cap {
        let f = one.sub(&mono(nn * m, 0, None)?)?;
        num = num.mul(&f)?.mul(&f)?;
        m += 1;
    }

    // Phi(u): (1 - u^{-1}) prod (1 - Q^{Nn} u)(1 - Q^{Nn} u^{-1}).
    let mut den_u = one.sub(&e_neg)?;
    let mut m = 1;
    while nn * m < q_cap {
        den_u = den_u
            .mul(&one.sub(&mono(nn * m, 0, Some(&e_pos))?)?)?
            .mul(&one.sub(&mono(nn * m, 0, Some(&e_neg))?)?)?;
        m += 1;
    }

    // Phi(w): (1 - zeta^l Q^k) prod (1 - Q^{Nn-k} zeta^{-l})(1 - Q^{Nn+k} zeta^l).
    let mut den_w = one.sub(&mono(k, l, None)?)?;
    let mut m = 1;
    while nn * m - k < q_cap {
        den_w = den_w.mul(&one.sub(&mono(nn * m - k, -l, None)?)?)?;
        if nn * m + k < q_cap {
            den_w = den_w.mul(&one.sub(&mono(nn * m + k, l, None)?)?)?;
        }
        m += 1;
    }

    // x / Phi(u) is regular: Phi(u) = (1 - e^{-x}) * rest vanishes to
    // first order in x.
    let den = den_u.mul(&den_w)?.div_by_var("x")?;
    let expk = x.scale(&Coeff::from_rat(-k, nn))?.exp()?;
    num.mul(&expk)?.mul(&den.invert()?)
}

/// Both quotients of the arity-2 structure formula built once from Phi and
/// once from sigma = u^{1/2} Phi; the explicit e^{x/2}-factors cancel and
/// the two routes agree exactly.  Returns the cross-multiplied residual.
pub fn sigma_phi_quotient_residual(q_order: i64, x_order: i64) -> Result<MultiSeries> {
    let phi = phi_series_exp(q_order, x_order)?.rename_var("x", "t")?;
    let vars = vec![
        VarSpec::power("q", q_order),
        VarSpec::power("x", x_order),
        VarSpec::power("z", x_order),
    ];
    let x = MultiSeries::var(&vars, "x");
    let z = MultiSeries::var(&vars, "z");
    let xz = x.add(&z)?;
    let half = |arg: &MultiSeries| -> Result<MultiSeries> {
        arg.scale(&Coeff::from_rat(1, 2))?.exp()
    };
    let phi_at = |arg: &MultiSeries| -> Result<MultiSeries> { phi.substitute("t", arg) };
    // Phi-route numerator/denominator of Phi(x+z)/(Phi(x) Phi(z)).
    let phi_num = phi_at(&xz)?;
    let phi_den = phi_at(&x)?.mul(&phi_at(&z)?)?;
    // sigma-route: sigma(t) = e^{t/2} Phi(t).
    let sig_num = half(&xz)?.mul(&phi_num)?;
    let sig_den = half(&x)?
        .mul(&phi_at(&x)?)?
        .mul(&half(&z)?.mul(&phi_at(&z)?)?)?;
    sig_num.mul(&phi_den)?.sub(&phi_num.mul(&sig_den)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff_i64;
    use crate::theta::check_axioms;

    #[test]
    fn phi_mult_q0_layer() {
        let phi = phi_series_mult(4, -5, 6).unwrap();
        let layer0 = phi.layer("q", 0);
        // 1 - u^{-1} exactly
        assert_eq!(layer0.num_terms(), 2);
        assert!(layer0.coeff(&[]).is_one());
        assert_eq!(coeff_i64(&layer0.coeff(&[("u", -1)])), Some(-1));
    }

    #[test]
    fn phi_mult_q1_layer() {
        // hand expansion: q^1 terms of (1-u^{-1})(1-qu)(1-qu^{-1})/(1-q)^2
        // give (1 - u^{-1})(2 - u - u^{-1}).
        let phi = phi_series_mult(4, -5, 6).unwrap();
        let layer1 = phi.layer("q", 1);
        let vars = vec![VarSpec::laurent("u", -5, 6)];
        let one = MultiSeries::one(&vars);
        let u = MultiSeries::var(&vars, "u");
        let uinv = MultiSeries::monomial(&vars, &[("u", -1)], Coeff::one());
        let expected = one
            .sub(&uinv)
            .unwrap()
            .mul(
                &one.scale(&Coeff::from_int(2))
                    .unwrap()
                    .sub(&u)
                    .unwrap()
                    .sub(&uinv)
                    .unwrap(),
            )
            .unwrap();
        assert!(layer1.eq_within(&expected).unwrap(), "{layer1}");
    }

    #[test]
    fn phi_exp_is_rigid_coordinate() {
        let phi = phi_series_exp(5, 7).unwrap();
        assert!(phi.layer("x", 0).is_zero());
        assert!(phi.layer("x", 1).is_one());
        // q^0 layer is 1 - e^{-x}: x^2-coefficient -1/2.
        assert_eq!(phi.coeff(&[("x", 2)]), Coeff::from_rat(-1, 2));
        // the coordinate constructor accepts it.
        phi_coordinate(5, 5).unwrap();
    }

    #[test]
    fn quasiperiodicity_n0_n1_n2() {
        for n in [0i64, 1, 2, -1] {
            let r = quasiperiodicity_residual(n, 6, 6).unwrap();
            assert!(r.is_zero(), "n = {n}: {r}");
        }
    }

    #[test]
    fn w_series_z_zero_is_one() {
        let w = w_series(3, 5).unwrap();
        let z0 = w.substitute("z", &MultiSeries::zero(&[])).unwrap();
        assert!(z0.num.eq_within(&z0.den).unwrap());
    }

    #[test]
    fn w_series_symmetric_in_y_z() {
        let w = w_series(3, 5).unwrap();
        let swap = |m: &MultiSeries| {
            m.rename_var("y", "__w")
                .unwrap()
                .rename_var("z", "y")
                .unwrap()
                .rename_var("__w", "z")
                .unwrap()
        };
        let num_s = swap(&w.num);
        let den_s = swap(&w.den);
        let lhs = w.num.mul(&den_s).unwrap();
        let rhs = num_s.mul(&w.den).unwrap();
        assert!(lhs.eq_within(&rhs).unwrap());
    }

    #[test]
    fn w_series_q0_matches_rational_model() {
        // at q = 0, Phi(x) = 1 - e^{-x}; the same fraction built from the
        // rational coordinate must agree.
        let w = w_series(3, 5).unwrap();
        let q0_num = w.num.layer("q", 0);
        let q0_den = w.den.layer("q", 0);
        let f = Coordinate::one_minus_exp("t", 5);
        let vars = vec![
            VarSpec::power("x", 5),
            VarSpec::power("y", 5),
            VarSpec::power("z", 5),
        ];
        let x = MultiSeries::var(&vars, "x");
        let y = MultiSeries::var(&vars, "y");
        let z = MultiSeries::var(&vars, "z");
        let names = ["x", "y", "z"];
        let at = |arg: &MultiSeries| {
            f.series
                .substitute("t", arg)
                .unwrap()
                .truncate_total_degree(&names, 4)
        };
        let num = at(&x.add(&y).unwrap()).mul(&at(&x.add(&z).unwrap())).unwrap();
        let den = at(&x)
            .mul(&at(&x.add(&y).unwrap().add(&z).unwrap()))
            .unwrap();
        let lhs = q0_num.mul(&den).unwrap().truncate_total_degree(&names, 4);
        let rhs = num.mul(&q0_den).unwrap().truncate_total_degree(&names, 4);
        assert!(lhs.eq_within(&rhs).unwrap());
    }

    #[test]
    fn cubical_structure_passes_all_axioms() {
        let s = cubical_structure_series(3, 4).unwrap();
        assert!(s.has_structure_pattern());
        let report = check_axioms(&s).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn cubical_q0_matches_one_minus_exp_section() {
        let s = cubical_structure_series(3, 4).unwrap();
        let f = Coordinate::one_minus_exp("t", 6);
        let law = FormalGroupLaw::additive(4);
        let t3 = theta_p_from_trivialization(&f, &law, 3).unwrap();
        let q0_unit = s.unit.layer("q", 0);
        assert!(q0_unit.eq_within(&t3.unit).unwrap());
        assert_eq!(s.eps, t3.eps);
    }

    #[test]
    fn torsion_point_validation() {
        assert!(TorsionPoint::new(3, 0, 0).is_err());
        assert_eq!(TorsionPoint::new(4, 2, 0).unwrap().exact_order(), 2);
        assert_eq!(TorsionPoint::new(3, 1, 2).unwrap().exact_order(), 3);
    }

    #[test]
    fn level2_factor_is_coth_at_q0() {
        // h(x)|_{q=0} = (x/2) coth(x/2) = 1 + x^2/12 - x^4/720 + x^6/30240.
        let a = TorsionPoint::new(2, 1, 0).unwrap();
        let h = level_translate_factor(&a, 3, 8).unwrap();
        let q0 = h.layer("Q", 0);
        assert!(q0.coeff(&[]).is_one());
        assert_eq!(q0.coeff(&[("x", 1)]), Coeff::zero());
        assert_eq!(q0.coeff(&[("x", 2)]), Coeff::from_rat(1, 12));
        assert_eq!(q0.coeff(&[("x", 3)]), Coeff::zero());
        assert_eq!(q0.coeff(&[("x", 4)]), Coeff::from_rat(-1, 720));
        assert_eq!(q0.coeff(&[("x", 6)]), Coeff::from_rat(1, 30240));
    }

    #[test]
    fn level_factor_constant_term_one() {
        for (n, l, k) in [(2u32, 1u32, 0u32), (3, 1, 0), (3, 2, 1), (4, 1, 2)] {
            let a = TorsionPoint::new(n, l, k).unwrap();
            let h = level_translate_factor(&a, 2, 4).unwrap();
            let x0 = h.layer("x", 0);
            assert!(x0.is_one(), "(N,l,k) = ({n},{l},{k}): {x0}");
        }
    }

    #[test]
    fn level_factor_k0_is_pure_q_series() {
        let a = TorsionPoint::new(3, 1, 0).unwrap();
        let h = level_translate_factor(&a, 3, 5).unwrap();
        let qi = h.index_of("Q").unwrap();
        for (e, _) in h.iter_terms() {
            assert_eq!(e[qi] % 3, 0, "fractional q-power Q^{}", e[qi]);
        }
    }

    #[test]
    fn level3_galois_conjugation() {
        // complex conjugation zeta -> zeta^2 maps h_(1,0) to h_(2,0).
        let h1 = level_translate_factor(&TorsionPoint::new(3, 1, 0).unwrap(), 2, 5).unwrap();
        let h2 = level_translate_factor(&TorsionPoint::new(3, 2, 0).unwrap(), 2, 5).unwrap();
        let conj = h1.galois(2).unwrap();
        assert!(conj.eq_within(&h2).unwrap());
    }

    #[test]
    fn sigma_and_phi_quotients_agree() {
        let r = sigma_phi_quotient_residual(3, 5).unwrap();
        assert!(r.is_zero(), "{r}");
    }
}
