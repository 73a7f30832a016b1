//! Reduced forms and the lower bounds on the Hessian they enjoy.
//!
//! A positive-discriminant cubic is *reduced* when its Hessian
//! `A x^2 + B x y + C y^2` satisfies `C >= A >= |B|`. Reduction runs Gauss
//! reduction on the (positive definite) Hessian and mirrors every move onto
//! the cubic; covariance of the Hessian makes the two agree.

use rug::ops::DivRounding;
use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{CubicForm, QuadraticForm, UnimodularMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub reduced_form: CubicForm,
    pub transform: UnimodularMatrix,
    pub steps: u64,
}

/// A cubic form known to be irreducible, reduced and of positive discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    form: CubicForm,
    discriminant: Integer,
    hessian: QuadraticForm,
}

impl ReducedForm {
    pub fn new(form: CubicForm) -> Result<Self> {
        let discriminant = positive_discriminant(&form)?;
        if !form.is_irreducible() {
            return Err(Error::Reducible);
        }
        let hessian = form.hessian();
        if !hessian.is_reduced() {
            return Err(Error::NotReduced);
        }
        Ok(ReducedForm { form, discriminant, hessian })
    }

    pub fn form(&self) -> &CubicForm {
        &self.form
    }

    pub fn into_form(self) -> CubicForm {
        self.form
    }

    pub fn discriminant(&self) -> &Integer {
        &self.discriminant
    }

    pub fn hessian(&self) -> &QuadraticForm {
        &self.hessian
    }

    /// `H(x, y) >= sqrt(3D) / 2`, checked as `4 H^2 >= 3 D`.
    pub fn check_hessian_lower_bound(&self, x: &Integer, y: &Integer) -> Result<bool> {
        if *y == 0 {
            return Err(Error::ZeroY);
        }
        let h = self.hessian.eval(x, y);
        Ok(4 * Integer::from(&h * &h) >= Integer::from(&self.discriminant * 3))
    }

    /// `H(x, y) >= (3/4) D^(1/2) y^2`, and `H(x, y) >= (3/2) D^(1/2) y^2`
    /// when `|x| >= |2y|`, both checked squared in integers.
    pub fn check_hessian_y_bound(&self, x: &Integer, y: &Integer) -> bool {
        let h = self.hessian.eval(x, y);
        let h2 = Integer::from(&h * &h);
        let y2 = Integer::from(y * y);
        let rhs = Integer::from(&self.discriminant * 9) * Integer::from(&y2 * &y2);
        if Integer::from(&h2 * 16) < rhs {
            return false;
        }
        let two_y = Integer::from(y * 2).abs();
        if *x.as_abs() >= two_y && Integer::from(&h2 * 4) < rhs {
            return false;
        }
        true
    }
}

fn positive_discriminant(f: &CubicForm) -> Result<Integer> {
    let d = f.discriminant();
    if d <= 0 {
        return Err(Error::NonPositiveDiscriminant(d));
    }
    Ok(d)
}

/// Whether the Hessian of `f` satisfies `C >= A >= |B|`; requires `D > 0`.
pub fn is_reduced(f: &CubicForm) -> Result<bool> {
    positive_discriminant(f)?;
    Ok(f.hessian().is_reduced())
}

/// Reduce an irreducible positive-discriminant form.
///
/// Returns `R = f o T` with `R` reduced. Boundary cases (`A = C` or
/// `A = |B|`) are accepted as they stand.
pub fn reduce(f: &CubicForm) -> Result<ReductionResult> {
    positive_discriminant(f)?;
    if !f.is_irreducible() {
        return Err(Error::Reducible);
    }
    Ok(reduce_unchecked(f))
}

/// Reduction without the irreducibility guard; needs `D > 0` for termination.
pub(crate) fn reduce_unchecked(f: &CubicForm) -> ReductionResult {
    let mut form = f.clone();
    let mut transform = UnimodularMatrix::identity();
    let mut steps = 0u64;
    loop {
        let h = form.hessian();
        if *h.b.as_abs() > h.a {
            // nearest integer to -B / (2A)
            let two_a = Integer::from(&h.a * 2);
            let t = (Integer::from(&h.a - &h.b)).div_floor(two_a);
            form = translate(&form, &t);
            transform = transform.compose(&UnimodularMatrix::translation(t));
        } else if h.a > h.c {
            form = rotate(&form);
            transform = transform.compose(&UnimodularMatrix::rotation());
        } else {
            break;
        }
        steps += 1;
    }
    ReductionResult { reduced_form: form, transform, steps }
}

/// `F(x + t y, y)`.
fn translate(f: &CubicForm, t: &Integer) -> CubicForm {
    let (a, b, c, d) = (f.a(), f.b(), f.c(), f.d());
    let t2 = Integer::from(t * t);
    let t3 = Integer::from(&t2 * t);
    let nb = Integer::from(a * t) * 3u32 + b;
    let nc = Integer::from(a * &t2) * 3u32 + Integer::from(b * t) * 2u32 + c;
    let nd = Integer::from(a * &t3) + Integer::from(b * &t2) + Integer::from(c * t) + d;
    CubicForm::new(a.clone(), nb, nc, nd)
}

/// `F(-y, x)`.
fn rotate(f: &CubicForm) -> CubicForm {
    CubicForm::new(f.d().clone(), Integer::from(-f.c()), f.b().clone(), Integer::from(-f.a()))
}

/// All `(p, q)` with `h(p, q) = m` for a positive definite `h`.
pub fn representations(h: &QuadraticForm, m: &Integer) -> Vec<(Integer, Integer)> {
    // 4A h(p, q) = (2Ap + Bq)^2 + N q^2 with N = 4AC - B^2 > 0
    let n = -h.discriminant();
    assert!(h.a > 0 && n > 0, "representations needs a positive definite form");
    let mut out = Vec::new();
    if *m < 0 {
        return out;
    }
    let four_am = Integer::from(&h.a * m) * 4u32;
    let q_max = Integer::from(&four_am / &n).sqrt();
    let two_a = Integer::from(&h.a * 2u32);
    let mut q = Integer::from(-&q_max);
    while q <= q_max {
        let r = Integer::from(&four_am - Integer::from(&n * &q) * &q);
        if r >= 0 && r.is_perfect_square() {
            let s = r.sqrt();
            let bq = Integer::from(&h.b * &q);
            for sign in [1i32, -1] {
                if sign == -1 && s == 0 {
                    continue;
                }
                let num = Integer::from(&s * sign) - &bq;
                if num.is_divisible(&two_a) {
                    out.push((num.div_exact(&two_a), q.clone()));
                }
            }
        }
        q += 1u32;
    }
    out.sort();
    out
}

/// Some `gamma` with `f1 o gamma = f2`, or `None` if the forms are inequivalent.
///
/// Both forms must have positive discriminant. The forms are reduced first;
/// between reduced forms the columns of `gamma` must represent `A` and `C`
/// of the target Hessian, which leaves a short exact search.
pub fn find_equivalence(f1: &CubicForm, f2: &CubicForm) -> Result<Option<UnimodularMatrix>> {
    let d1 = positive_discriminant(f1)?;
    let d2 = positive_discriminant(f2)?;
    if d1 != d2 {
        return Ok(None);
    }
    let r1 = reduce_unchecked(f1);
    let r2 = reduce_unchecked(f2);
    let h1 = r1.reduced_form.hessian();
    let h2 = r2.reduced_form.hessian();
    if h1.a != h2.a || h1.c != h2.c || *h1.b.as_abs() != *h2.b.as_abs() {
        return Ok(None);
    }
    let Some(g) = equivalence_between(&r1.reduced_form, &r2.reduced_form) else {
        return Ok(None);
    };
    // f1 o T1 o g = f2 o T2  =>  f1 o (T1 g T2^-1) = f2
    Ok(Some(r1.transform.compose(&g).compose(&r2.transform.inverse())))
}

fn equivalence_between(f1: &CubicForm, f2: &CubicForm) -> Option<UnimodularMatrix> {
    let h1 = f1.hessian();
    let h2 = f2.hessian();
    let firsts = representations(&h1, &h2.a);
    let seconds = representations(&h1, &h2.c);
    for (a1, a3) in &firsts {
        for (a2, a4) in &seconds {
            let Ok(m) = UnimodularMatrix::new(a1.clone(), a2.clone(), a3.clone(), a4.clone()) else {
                continue;
            };
            if h1.apply(&m) == h2 && f1.apply(&m) == *f2 {
                return Some(m);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(a: i64, b: i64, c: i64, d: i64) -> CubicForm {
        CubicForm::new(a, b, c, d)
    }

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    #[test]
    fn reducedness_examples() {
        assert!(is_reduced(&cf(1, 0, -3, 1)).unwrap());
        assert!(is_reduced(&cf(1, 1, -2, -1)).unwrap());
        assert!(matches!(is_reduced(&cf(1, 0, 0, 1)), Err(Error::NonPositiveDiscriminant(_))));
    }

    #[test]
    fn swapped_simplest_cubic_is_reduced_on_the_boundary() {
        // (1,-3,0,1) has Hessian (9,-9,9) as well: the swap fixes it.
        assert_eq!(cf(1, -3, 0, 1).hessian(), QuadraticForm::new(9, -9, 9));
        assert!(is_reduced(&cf(1, -3, 0, 1)).unwrap());
        // a translate of it is not reduced
        let t = cf(1, -3, 0, 1).apply(&UnimodularMatrix::translation(2));
        assert!(!is_reduced(&t).unwrap());
    }

    #[test]
    fn reduce_is_identity_on_reduced_forms() {
        for f in [cf(1, 0, -3, 1), cf(1, 1, -2, -1)] {
            let r = reduce(&f).unwrap();
            assert_eq!(r.reduced_form, f);
            assert_eq!(r.transform, UnimodularMatrix::identity());
            assert_eq!(r.steps, 0);
        }
    }

    #[test]
    fn scramble_then_reduce() {
        let f = cf(1, 0, -3, 1);
        let g = f.apply(&UnimodularMatrix::translation(5));
        let r = reduce(&g).unwrap();
        assert!(r.reduced_form.hessian().is_reduced());
        assert_eq!(r.reduced_form.discriminant(), 81);
        assert_eq!(g.apply(&r.transform), r.reduced_form);
        assert_eq!(reduce(&r.reduced_form).unwrap().steps, 0);
    }

    #[test]
    fn reduce_rejects_bad_input() {
        assert!(matches!(reduce(&cf(1, 0, 0, 1)), Err(Error::NonPositiveDiscriminant(_))));
        // x (x - y)(x + y) = x^3 - x y^2, D = 4
        assert!(matches!(reduce(&cf(1, 0, -1, 0)), Err(Error::Reducible)));
    }

    #[test]
    fn hessian_lower_bound_examples() {
        let f = ReducedForm::new(cf(1, 0, -3, 1)).unwrap();
        assert!(f.check_hessian_lower_bound(&int(0), &int(1)).unwrap());
        assert!(f.check_hessian_lower_bound(&int(1), &int(-1)).unwrap());
        let g = ReducedForm::new(cf(1, 1, -2, -1)).unwrap();
        assert_eq!(g.hessian().eval(&int(1), &int(1)), 21);
        assert!(g.check_hessian_lower_bound(&int(1), &int(1)).unwrap());
        assert!(matches!(f.check_hessian_lower_bound(&int(1), &int(0)), Err(Error::ZeroY)));
    }

    #[test]
    fn hessian_y_bound_examples() {
        let f = ReducedForm::new(cf(1, 0, -3, 1)).unwrap();
        assert!(f.check_hessian_y_bound(&int(0), &int(1)));
        assert_eq!(f.hessian().eval(&int(3), &int(1)), 63);
        assert!(f.check_hessian_y_bound(&int(3), &int(1)));
        assert!(f.check_hessian_y_bound(&int(7), &int(0)));
    }

    #[test]
    fn reduced_form_guards() {
        assert!(matches!(ReducedForm::new(cf(1, 0, -1, 0)), Err(Error::Reducible)));
        let unreduced = cf(1, 0, -3, 1).apply(&UnimodularMatrix::translation(3));
        assert!(matches!(ReducedForm::new(unreduced), Err(Error::NotReduced)));
    }

    #[test]
    fn representations_of_small_values() {
        let h = QuadraticForm::new(1, 0, 1);
        let reps = representations(&h, &int(25));
        assert_eq!(reps.len(), 12);
        for (p, q) in &reps {
            assert_eq!(h.eval(p, q), 25);
        }
        let h = QuadraticForm::new(7, 7, 7);
        assert_eq!(representations(&h, &int(7)).len(), 6);
    }

    #[test]
    fn equivalence_recovers_witness() {
        let f = cf(1, 1, -2, -1);
        let m = UnimodularMatrix::new(3, 2, 4, 3).unwrap();
        let g = f.apply(&m).negate();
        let w = find_equivalence(&f, &g).unwrap().expect("equivalent");
        assert_eq!(f.apply(&w), g);
        assert!(find_equivalence(&cf(1, 1, -2, -1), &cf(1, 0, -3, 1)).unwrap().is_none());
    }
}
