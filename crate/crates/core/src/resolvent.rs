//! Resolvent linear forms over Q(sqrt(-3D)).
//!
//! For a form with positive discriminant, `U = (G + 3 sqrt(-3D) F)/2` and its
//! conjugate `V` are cubes of linear forms `xi` and `eta` with `xi * eta = H`.
//! The coefficients live in an imaginary quadratic field and are handled as
//! certified complex intervals.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{CubicForm, GCovariant, QuadraticForm};
use crate::real::{with_escalation, CertifiedValue, Complex, Real, DEFAULT_PRECISION};

/// Points at which the defining identities are checked after construction.
pub const PROBE_POINTS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (2, -1)];

/// One of the three pairs `(w^k xi, w^{2k} eta)`.
#[derive(Clone, Debug)]
pub struct ResolventPair {
    pub branch: u8,
    /// `(p, q)` with `xi(x, y) = p x + q y`.
    pub xi_coeffs: (Complex, Complex),
    /// Complex conjugates of `xi_coeffs`.
    pub eta_coeffs: (Complex, Complex),
    pub working_precision: u32,
    /// Bound on the distance from each computed coefficient midpoint to the
    /// true coefficient.
    pub error_radius: Float,
}

impl ResolventPair {
    pub fn xi(&self, x: &Integer, y: &Integer) -> Complex {
        linear(&self.xi_coeffs, x, y)
    }

    pub fn eta(&self, x: &Integer, y: &Integer) -> Complex {
        linear(&self.eta_coeffs, x, y)
    }
}

fn linear((p, q): &(Complex, Complex), x: &Integer, y: &Integer) -> Complex {
    p.scale_int(x).add(&q.scale_int(y))
}

/// The three resolvent pairs of a form together with the data needed to
/// evaluate and classify points.
#[derive(Clone, Debug)]
pub struct ResolventSet {
    form: CubicForm,
    discriminant: Integer,
    hessian: QuadraticForm,
    g: GCovariant,
    pairs: [ResolventPair; 3],
    precision: u32,
}

impl ResolventSet {
    pub fn form(&self) -> &CubicForm {
        &self.form
    }

    pub fn discriminant(&self) -> &Integer {
        &self.discriminant
    }

    pub fn pairs(&self) -> &[ResolventPair; 3] {
        &self.pairs
    }

    pub fn pair(&self, k: u8) -> &ResolventPair {
        &self.pairs[k as usize % 3]
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `3 i sqrt(3D)` at the working precision.
    fn three_sqrt_m3d(&self, prec: u32) -> Complex {
        let s = Real::from_int(&self.discriminant, prec).mul_int(&Integer::from(3)).sqrt();
        Complex::new(Real::zero(prec), s.mul_int(&Integer::from(3)))
    }
}

/// Builds the resolvent pairs at the default precision.
pub fn build_resolvents(f: &CubicForm) -> Result<ResolventSet> {
    build_resolvents_with_precision(f, DEFAULT_PRECISION)
}

/// Builds the resolvent pairs starting at `prec` bits, doubling on
/// certification failure.
pub fn build_resolvents_with_precision(f: &CubicForm, prec: u32) -> Result<ResolventSet> {
    let d = f.discriminant();
    if d <= 0 {
        return Err(Error::NonPositiveDiscriminant(d));
    }
    if !f.is_irreducible() {
        return Err(Error::Reducible);
    }
    let hessian = f.hessian();
    let g = f.g_covariant();
    let mut last = prec;
    let built = with_escalation(prec, |p| {
        last = p;
        match try_build(f, &d, &hessian, &g, p) {
            Ok(set) => Some(Ok(set)),
            Err(Attempt::Retry) => None,
            // A violated identity is not a precision problem; stop here.
            Err(Attempt::Violated(what)) => Some(Err(what)),
        }
    });
    match built {
        Some((Ok(set), _)) => Ok(set),
        Some((Err(what), _)) => Err(Error::IdentityViolated { what }),
        None => Err(Error::precision("resolvent identities", last)),
    }
}

enum Attempt {
    Retry,
    Violated(String),
}

fn try_build(
    f: &CubicForm,
    d: &Integer,
    hessian: &QuadraticForm,
    g: &GCovariant,
    prec: u32,
) -> std::result::Result<ResolventSet, Attempt> {
    let s = Real::from_int(d, prec).mul_int(&Integer::from(3)).sqrt();
    let three_s = s.mul_int(&Integer::from(3));
    let half = Real::from_ratio(1, 2, prec);
    // u_i = (g_i + 3 i sqrt(3D) f_i) / 2 for the two leading coefficients.
    let u = |gi: &Integer, fi: &Integer| {
        Complex::new(
            Real::from_int(gi, prec).mul(&half),
            three_s.mul_int(fi).mul(&half),
        )
    };
    let u0 = u(&g.g0, f.a());
    let u1 = u(&g.g1, f.b());

    // |u0|^2 = A^3 > 0 by the syzygy at (1, 0), and a != 0 for an
    // irreducible form, so the principal cube root of u0 is the base.
    let a_h = &hessian.a;
    let (pre, pim) = u0.cbrt_principal_point();
    let p_point = Complex::new(Real::from_bounds(pre.clone(), pre), Real::from_bounds(pim.clone(), pim));
    let resid = p_point.cube().sub(&u0);
    let r = Float::with_val_round(prec, resid.re.mag().hypot_ref(&resid.im.mag()), Round::Up).0;
    // With 64 r^2 <= A^3 the nearest cube root lies within r / A of the
    // computed point (|p|^2 = A exactly).
    let a3 = a_h.clone().pow(3u32);
    let lhs = Float::with_val_round(2 * prec, r.square_ref(), Round::Up).0 * 64u32;
    if !(lhs <= a3) {
        return Err(Attempt::Retry);
    }
    let rho = Float::with_val_round(prec, &r / a_h, Round::Up).0;
    let p = Complex::new(p_point.re.widen(&rho), p_point.im.widen(&rho));
    let three = Integer::from(3);
    let q = u1.div(&p.sqr().scale_int(&three));
    if !q.re.is_finite() || !q.im.is_finite() {
        return Err(Attempt::Retry);
    }

    let mut pairs = Vec::with_capacity(3);
    for k in 0..3u32 {
        let w = Complex::omega_pow(k, prec);
        let xp = w.mul(&p);
        let xq = w.mul(&q);
        let err = xp.radius().max(&xq.radius()).clone();
        pairs.push(ResolventPair {
            branch: k as u8,
            eta_coeffs: (xp.conj(), xq.conj()),
            xi_coeffs: (xp, xq),
            working_precision: prec,
            error_radius: err,
        });
    }
    let set = ResolventSet {
        form: f.clone(),
        discriminant: d.clone(),
        hessian: hessian.clone(),
        g: g.clone(),
        pairs: pairs.try_into().map_err(|_| Attempt::Retry)?,
        precision: prec,
    };
    check_probes(&set, prec)?;
    Ok(set)
}

/// The three identities at the probe points, for every pair. The residual
/// interval must contain zero and be narrow relative to the magnitudes
/// involved.
fn check_probes(set: &ResolventSet, prec: u32) -> std::result::Result<(), Attempt> {
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    let c = set.three_sqrt_m3d(prec);
    for pair in set.pairs.iter() {
        for &(x, y) in PROBE_POINTS.iter() {
            let (x, y) = (Integer::from(x), Integer::from(y));
            let xi = pair.xi(&x, &y);
            let eta = pair.eta(&x, &y);
            let h = Real::from_int(&set.hessian.eval(&x, &y), prec);
            let fv = set.form.eval(&x, &y);
            let gv = Real::from_int(&set.g.eval(&x, &y), prec);
            let xi3 = xi.cube();
            let eta3 = eta.cube();
            let checks = [
                ("xi*eta = H", xi.mul(&eta).sub(&Complex::real(h.clone())), h.mag()),
                (
                    "xi^3 - eta^3 = 3 sqrt(-3D) F",
                    xi3.sub(&eta3).sub(&c.scale_int(&fv)),
                    c.im.mag() * Float::with_val(prec, Integer::from(fv.abs_ref())),
                ),
                ("xi^3 + eta^3 = G", xi3.add(&eta3).sub(&Complex::real(gv.clone())), gv.mag()),
                ("eta = conj(xi)", eta.sub(&xi.conj()), Float::with_val(prec, 1)),
            ];
            for (what, res, scale) in checks {
                if !res.re.contains_zero() || !res.im.contains_zero() {
                    return Err(Attempt::Violated(format!("{what} at ({x}, {y}) on branch {}", pair.branch)));
                }
                let scale = if scale > 1 { scale } else { Float::with_val(prec, 1) };
                let bound = Float::with_val(prec, &scale * &tol);
                if res.radius() > bound {
                    return Err(Attempt::Retry);
                }
            }
        }
    }
    Ok(())
}

/// Rectangular rendering of a certified complex value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: CertifiedValue,
    pub im: CertifiedValue,
}

impl ComplexValue {
    pub fn from_complex(z: &Complex) -> ComplexValue {
        ComplexValue { re: z.re.certified(), im: z.im.certified() }
    }
}

/// Resolvent data attached to one point `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionResolventData {
    /// `z = 1 - eta^3 / xi^3`, the same for every branch.
    pub z: ComplexValue,
    pub z_abs: CertifiedValue,
    /// `arg(eta_k / xi_k)` at the related branch, so `3 theta = arg(eta^3/xi^3)`.
    pub theta: CertifiedValue,
    /// Index of the pair minimising `|1 - eta_k/xi_k|`.
    pub related_branch: u8,
    /// Two branches are equidistant. Happens exactly when `G(x, y) = 0`.
    pub tie: bool,
    pub xi_abs: CertifiedValue,
    /// `|1 - eta_k/xi_k|` at the related branch.
    pub related_distance: CertifiedValue,
    /// Certified verdicts of the two trigonometric inequalities. The second
    /// is `None` when `|z| >= 1`.
    pub cosi_pi6: bool,
    pub cosi_pi9: Option<bool>,
    pub precision: u32,
}

/// Classifies `(x, y)` against the three pairs.
pub fn classify(set: &ResolventSet, x: &Integer, y: &Integer) -> Result<SolutionResolventData> {
    if x.is_zero() && y.is_zero() {
        return Err(Error::ZeroPoint);
    }
    let start = set.precision;
    let mut local: Option<ResolventSet> = None;
    let mut failure: Option<Error> = None;
    let out = with_escalation(start, |p| {
        let s = if p == set.precision {
            set
        } else {
            match build_resolvents_with_precision(&set.form, p) {
                Ok(s) => local.insert(s),
                Err(e) => {
                    failure = Some(e);
                    return Some(None);
                }
            }
        };
        classify_at(s, x, y).map(Some)
    });
    if let Some(e) = failure {
        return Err(e);
    }
    match out {
        Some((Some(data), _)) => Ok(data),
        _ => Err(Error::precision(format!("relatedness of ({x}, {y})"), crate::real::MAX_PRECISION)),
    }
}

fn classify_at(set: &ResolventSet, x: &Integer, y: &Integer) -> Option<SolutionResolventData> {
    let prec = set.precision;
    let h = set.hessian.eval(x, y);
    let fv = set.form.eval(x, y);
    let gv = set.g.eval(x, y);

    // At integer points eta_k = conj(xi_k), so |1 - eta_k/xi_k| = 2|Im xi_k|/|xi|.
    let xis: Vec<Complex> = set.pairs.iter().map(|pr| pr.xi(x, y)).collect();
    let ims: Vec<Real> = xis.iter().map(|z| z.im.abs()).collect();
    let tie = gv.is_zero();
    let branch = if tie {
        // Exactly two branches are equidistant; the third is far away.
        let far = (0..3).find(|&k| (0..3).all(|j| j == k || ims[j].lt(&ims[k]) == Some(true)))?;
        (0..3).find(|&k| k != far)?
    } else {
        (0..3).find(|&k| (0..3).all(|j| j == k || ims[k].lt(&ims[j]) == Some(true)))?
    };
    let xi = &xis[branch];
    let xi_abs = Real::from_int(&h, prec).sqrt();
    let two = Integer::from(2);
    let dist = ims[branch].mul_int(&two).div(&xi_abs);

    let pair = &set.pairs[branch];
    let eta = pair.eta(x, y);
    let ratio = eta.div(xi);
    let theta = ratio.arg()?;

    // z = 3 i sqrt(3D) F / xi^3; the direct quotient avoids cancellation.
    let c = set.three_sqrt_m3d(prec).scale_int(&fv);
    let z = c.div(&xi.cube());
    let z_abs = set
        .three_sqrt_m3d(prec)
        .im
        .mul_int(&Integer::from(fv.abs_ref()))
        .div(&xi_abs.mul(&xi_abs).mul(&xi_abs));

    let pi = Real::pi(prec);
    let rhs6 = pi.div_int(&Integer::from(6)).mul(&z_abs);
    let cosi_pi6 = if fv.is_zero() { true } else { dist.lt(&rhs6)? };
    // |z|^2 = 27 D F^2 / H^3, so |z| < 1 is decided exactly.
    let z_small = Integer::from(27) * &set.discriminant * Integer::from(fv.square_ref()) < h.clone().pow(3u32);
    let cosi_pi9 = match z_small {
        true => {
            let rhs9 = pi.div_int(&Integer::from(9)).mul(&z_abs);
            Some(if fv.is_zero() { true } else { dist.lt(&rhs9)? })
        }
        false => None,
    };

    Some(SolutionResolventData {
        z: ComplexValue::from_complex(&z),
        z_abs: z_abs.certified(),
        theta: theta.certified(),
        related_branch: branch as u8,
        tie,
        xi_abs: xi_abs.certified(),
        related_distance: dist.certified(),
        cosi_pi6,
        cosi_pi9,
        precision: prec,
    })
}

/// The trigonometric inequalities `|1 - eta_k/xi_k| < (pi/6)|z|` and, when
/// `|z| < 1`, `< (pi/9)|z|`, as certified during classification.
pub fn check_cosi(data: &SolutionResolventData) -> bool {
    data.cosi_pi6 && data.cosi_pi9.unwrap_or(true)
}
