//! Euler and Navier-Stokes flows as processes on the hydrodynamic action.
//!
//! The action is `A = v·dr - Φ dt` with `Φ = v·v/2 + φ - λ div v`, and the process is
//! `ρ[v, 1]`. With `a = ∂v/∂t + grad Φ` and `ω = curl v` the work 1-form is
//! `W = ρ(a - v×ω)·dr - ρ(v·a) dt`.

use super::vector::{self, Frame, Vec3};
use super::PhysicsError;
use crate::exterior::{d, DifferentialForm, DirectionField, Variety};
use crate::symbolic::{is_zero, Expr, SamplerConfig, ZeroVerdict};

/// Flow fields and material coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct NSParams {
    pub velocity: Vec3,
    pub density: Expr,
    pub pressure: Expr,
    /// Body-force potential.
    pub potential: Expr,
    /// Shear viscosity υ.
    pub shear: Expr,
    /// Bulk viscosity μ_B.
    pub bulk: Expr,
    /// Expansion coefficient λ; `None` means `μ_B - υ`.
    pub expansion: Option<Expr>,
    /// Drop every `grad div v` term.
    pub incompressible: bool,
}

impl NSParams {
    /// Inviscid flow with unit density and no body force.
    pub fn new(velocity: Vec3, pressure: Expr) -> Self {
        NSParams {
            velocity,
            density: Expr::one(),
            pressure,
            potential: Expr::zero(),
            shear: Expr::zero(),
            bulk: Expr::zero(),
            expansion: None,
            incompressible: false,
        }
    }

    pub fn with_viscosity(mut self, shear: Expr, bulk: Expr) -> Self {
        self.shear = shear;
        self.bulk = bulk;
        self
    }

    pub fn with_density(mut self, density: Expr) -> Self {
        self.density = density;
        self
    }

    pub fn with_potential(mut self, potential: Expr) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_expansion(mut self, expansion: Expr) -> Self {
        self.expansion = Some(expansion);
        self
    }

    pub fn incompressible(mut self, on: bool) -> Self {
        self.incompressible = on;
        self
    }

    pub fn expansion(&self) -> Expr {
        self.expansion.clone().unwrap_or_else(|| &self.bulk - &self.shear)
    }

    /// Zero test of `λ - (μ_B - υ)`.
    pub fn check_viscosity_relation(&self, cfg: &SamplerConfig) -> ZeroVerdict {
        is_zero(&(&self.expansion() - &(&self.bulk - &self.shear)), cfg)
    }

    fn grad_div(&self, f: &Frame) -> Vec3 {
        if self.incompressible {
            vector::zero()
        } else {
            f.grad(&f.div(&self.velocity))
        }
    }

    fn div_v(&self, f: &Frame) -> Expr {
        if self.incompressible {
            Expr::zero()
        } else {
            f.div(&self.velocity)
        }
    }

    fn pressure_force(&self, f: &Frame) -> Vec3 {
        let inv = self.density.checked_recip().expect("density must be non-zero");
        vector::scale(&inv, &f.grad(&self.pressure))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub components: Vec3,
    pub verdicts: [ZeroVerdict; 3],
}

impl Residual {
    fn new(components: Vec3, cfg: &SamplerConfig) -> Self {
        let verdicts = [is_zero(&components[0], cfg), is_zero(&components[1], cfg), is_zero(&components[2], cfg)];
        Residual { components, verdicts }
    }

    pub fn vanishes(&self) -> bool {
        self.verdicts.iter().all(ZeroVerdict::is_zero)
    }
}

/// `∂v/∂t + grad(v·v/2) - v×ω + grad φ + grad P/ρ - υΔv + (μ_B + υ) grad div v`.
pub fn ns_residual(p: &NSParams, variety: &Variety, cfg: &SamplerConfig) -> Result<Residual, PhysicsError> {
    Ok(Residual::new(ns_residual_exprs(p, &Frame::of(variety)?), cfg))
}

pub(crate) fn ns_residual_exprs(p: &NSParams, f: &Frame) -> Vec3 {
    let v = &p.velocity;
    let omega = f.curl(v);
    let half_v2 = &vector::dot(v, v) * &Expr::ratio(1, 2);
    let mut r = vector::add(&f.dt(v), &f.grad(&half_v2));
    r = vector::sub(&r, &vector::cross(v, &omega));
    r = vector::add(&r, &f.grad(&p.potential));
    r = vector::add(&r, &p.pressure_force(f));
    let gd = p.grad_div(f);
    let laplacian = vector::sub(&gd, &f.curl(&omega));
    r = vector::sub(&r, &vector::scale(&p.shear, &laplacian));
    vector::add(&r, &vector::scale(&(&p.bulk + &p.shear), &gd))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerCheck {
    /// `∂v/∂t + grad(v·v/2) - v×ω + grad φ + grad P/ρ`.
    pub residual: Residual,
    /// `∂P/∂t - ρ v·a` with `a = ∂v/∂t + grad(v·v/2 + φ)`.
    pub time_relation: Expr,
    pub time_verdict: ZeroVerdict,
    /// `curl(v×ω) - ∂ω/∂t`.
    pub helmholtz: Vec3,
    pub helmholtz_verdict: ZeroVerdict,
}

/// Inviscid momentum balance; viscous coefficients are ignored.
pub fn euler_check(p: &NSParams, variety: &Variety, cfg: &SamplerConfig) -> Result<EulerCheck, PhysicsError> {
    let f = Frame::of(variety)?;
    let inviscid = NSParams { shear: Expr::zero(), bulk: Expr::zero(), expansion: Some(Expr::zero()), ..p.clone() };
    let residual = Residual::new(ns_residual_exprs(&inviscid, &f), cfg);
    let v = &p.velocity;
    let half_v2 = &vector::dot(v, v) * &Expr::ratio(1, 2);
    let accel = vector::add(&f.dt(v), &f.grad(&(&half_v2 + &p.potential)));
    let time_relation = &p.pressure.diff(&f.time) - &(&p.density * &vector::dot(v, &accel));
    let omega = f.curl(v);
    let helmholtz = vector::sub(&f.curl(&vector::cross(v, &omega)), &f.dt(&omega));
    let time_verdict = is_zero(&time_relation, cfg);
    let helmholtz_verdict = combine3(&helmholtz, cfg);
    Ok(EulerCheck { residual, time_relation, time_verdict, helmholtz, helmholtz_verdict })
}

fn combine3(v: &Vec3, cfg: &SamplerConfig) -> ZeroVerdict {
    v.iter().map(|c| is_zero(c, cfg)).find(|z| !z.is_zero()).unwrap_or_else(|| is_zero(&Expr::zero(), cfg))
}

/// `A = v·dr - (v·v/2 + φ - λ div v) dt`.
pub fn hydro_action(p: &NSParams, variety: &Variety) -> Result<DifferentialForm, PhysicsError> {
    let f = Frame::of(variety)?;
    let v = &p.velocity;
    let phi = hydro_potential(p, &f);
    Ok(DifferentialForm::one_form(variety, &[v[0].clone(), v[1].clone(), v[2].clone(), -phi]))
}

fn hydro_potential(p: &NSParams, f: &Frame) -> Expr {
    let v = &p.velocity;
    let half_v2 = &vector::dot(v, v) * &Expr::ratio(1, 2);
    &(&half_v2 + &p.potential) - &(&p.expansion() * &p.div_v(f))
}

/// The process `ρ[v, 1]`.
pub fn flow_field(p: &NSParams, variety: &Variety) -> Result<DirectionField, PhysicsError> {
    let v = &p.velocity;
    Ok(DirectionField::new(variety, vec![v[0].clone(), v[1].clone(), v[2].clone(), Expr::one()])?
        .with_rho(p.density.clone()))
}

/// The viscous closure `ϖ = -ρ(υ curl curl v + (μ_B + λ) grad div v)`.
pub fn default_closure(p: &NSParams, variety: &Variety) -> Result<Vec3, PhysicsError> {
    let f = Frame::of(variety)?;
    let ccv = f.curl(&f.curl(&p.velocity));
    let gd = p.grad_div(&f);
    let inner = vector::add(&vector::scale(&p.shear, &ccv), &vector::scale(&(&p.bulk + &p.expansion()), &gd));
    Ok(vector::scale(&-&p.density, &inner))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkDecomposition {
    pub action: DifferentialForm,
    pub work: DifferentialForm,
    /// `ϖ`, the fluctuation covector.
    pub closure: Vec3,
    /// Spatial part of `W + dP - ϖ·(dx - v dt)`; equals `ρ R` with R the NS residual.
    pub spatial: Vec3,
    /// `spatial - ρR` vanishes identically.
    pub spatial_matches_residual: ZeroVerdict,
    /// The NS residual vanishes.
    pub ns_satisfied: ZeroVerdict,
}

/// Decomposes the work of `ρ[v, 1]` as `W = -dP + ϖ·(dx - v dt) + ρR·dr`.
///
/// Fails with `DecompositionFailure` when the dt coefficient of `W + dP - ϖ·(dx - v dt)`
/// does not vanish.
pub fn ns_work_form(
    p: &NSParams,
    variety: &Variety,
    closure: Option<Vec3>,
    cfg: &SamplerConfig,
) -> Result<WorkDecomposition, PhysicsError> {
    let f = Frame::of(variety)?;
    let action = hydro_action(p, variety)?;
    let field = flow_field(p, variety)?;
    let work = crate::exterior::interior(&field, &d(&action))?;
    let closure = match closure {
        Some(c) => c,
        None => default_closure(p, variety)?,
    };
    let v = &p.velocity;
    let dp = d(&DifferentialForm::scalar(variety, p.pressure.clone()));
    let fluct = DifferentialForm::one_form(
        variety,
        &[closure[0].clone(), closure[1].clone(), closure[2].clone(), -vector::dot(&closure, v)],
    );
    let rest = work.add(&dp)?.sub(&fluct)?;
    let c = rest.components();
    let dt_residual = c[3].clone();
    let verdict = is_zero(&dt_residual, cfg);
    if !verdict.is_zero() {
        return Err(PhysicsError::DecompositionFailure { residual: dt_residual.to_string() });
    }
    let spatial: Vec3 = [c[0].clone(), c[1].clone(), c[2].clone()];
    let r = ns_residual_exprs(p, &f);
    let spatial_matches_residual = combine3(&vector::sub(&spatial, &vector::scale(&p.density, &r)), cfg);
    let ns_satisfied = combine3(&r, cfg);
    Ok(WorkDecomposition { action, work, closure, spatial, spatial_matches_residual, ns_satisfied })
}

/// Torsion vector of the hydrodynamic action with the acceleration eliminated through the
/// NS equations:
/// `T = (v·v/2)ω - h v + v×(grad P/ρ) + υ v×curl curl v + (μ_B + λ) v×grad div v - (φ - λ div v)ω`,
/// fourth component `-h`, with `h = v·ω`.
pub fn hydro_torsion(p: &NSParams, variety: &Variety) -> Result<DirectionField, PhysicsError> {
    let f = Frame::of(variety)?;
    let v = &p.velocity;
    let omega = f.curl(v);
    let h = vector::dot(v, &omega);
    let half_v2 = &vector::dot(v, v) * &Expr::ratio(1, 2);
    let ccv = f.curl(&omega);
    let gd = p.grad_div(&f);
    let lambda = p.expansion();
    let mut t = vector::sub(&vector::scale(&half_v2, &omega), &vector::scale(&h, v));
    t = vector::add(&t, &vector::cross(v, &p.pressure_force(&f)));
    t = vector::add(&t, &vector::scale(&p.shear, &vector::cross(v, &ccv)));
    t = vector::add(&t, &vector::scale(&(&p.bulk + &lambda), &vector::cross(v, &gd)));
    let shifted = &p.potential - &(&lambda * &p.div_v(&f));
    t = vector::sub(&t, &vector::scale(&shifted, &omega));
    let [t0, t1, t2] = t;
    Ok(DirectionField::new(variety, vec![t0, t1, t2, -h])?)
}

/// Terms of the dissipation coefficient after eliminating the acceleration.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroSigma {
    pub sigma: Expr,
    /// `(grad P/ρ)·ω`
    pub pressure_term: Expr,
    /// `υ ω·curl ω`
    pub shear_term: Expr,
    /// `(μ_B + λ) ω·grad div v`
    pub bulk_term: Expr,
}

pub fn hydro_sigma(p: &NSParams, variety: &Variety) -> Result<HydroSigma, PhysicsError> {
    let f = Frame::of(variety)?;
    let omega = f.curl(&p.velocity);
    let pressure_term = vector::dot(&p.pressure_force(&f), &omega);
    let shear_term = &p.shear * &vector::dot(&omega, &f.curl(&omega));
    let bulk_term = &(&p.bulk + &p.expansion()) * &vector::dot(&omega, &p.grad_div(&f));
    let sigma = &(&pressure_term + &shear_term) + &bulk_term;
    Ok(HydroSigma { sigma, pressure_term, shear_term, bulk_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_expr;

    const VARS: [&str; 6] = ["x", "y", "z", "t", "nu", "k"];

    fn e(s: &str) -> Expr {
        parse_expr(s, &VARS).unwrap()
    }

    fn xyzt() -> Variety {
        Variety::new(&["x", "y", "z", "t"]).unwrap()
    }

    #[test]
    fn rigid_rotation_is_euler() {
        let p = NSParams::new([e("-y"), e("x"), e("0")], e("(x^2 + y^2)/2"));
        let cfg = SamplerConfig::default();
        let r = euler_check(&p, &xyzt(), &cfg).unwrap();
        assert!(vector::is_zero(&r.residual.components));
        assert!(r.time_relation.is_zero());
        assert!(vector::is_zero(&r.helmholtz));
    }

    #[test]
    fn viscous_mode_solves_ns() {
        let p = NSParams::new([e("exp(-nu*k^2*t)*sin(k*y)"), e("0"), e("0")], e("1"))
            .with_viscosity(e("nu"), e("0"));
        let r = ns_residual(&p, &xyzt(), &SamplerConfig::default()).unwrap();
        assert!(vector::is_zero(&r.components), "{:?}", r.components);
    }

    #[test]
    fn shear_flow_pressure_balance() {
        let p = NSParams::new([e("y^2"), e("0"), e("0")], e("2*nu*x")).with_viscosity(e("nu"), e("0"));
        let r = ns_residual(&p, &xyzt(), &SamplerConfig::default()).unwrap();
        assert!(vector::is_zero(&r.components), "{:?}", r.components);
    }

    #[test]
    fn euler_reduction() {
        let p = NSParams::new([e("x*y"), e("y*z"), e("z*x")], e("x"));
        let f = Frame::of(&xyzt()).unwrap();
        let cfg = SamplerConfig::default();
        let ns = ns_residual_exprs(&p, &f);
        let eu = euler_check(&p, &xyzt(), &cfg).unwrap();
        assert_eq!(ns, eu.residual.components);
    }

    #[test]
    fn rest_state_is_hydrostatic() {
        let p = NSParams::new(vector::zero(), e("z")).with_potential(e("-z"));
        let cfg = SamplerConfig::default();
        let w = ns_work_form(&p, &xyzt(), None, &cfg).unwrap();
        assert!(vector::is_zero(&w.closure));
        assert!(w.ns_satisfied.is_zero());
        assert_eq!(w.work.add(&d(&DifferentialForm::scalar(&xyzt(), e("z")))).unwrap().len(), 0);
    }

    #[test]
    fn moving_pressure_fails_decomposition() {
        // pressure grows in time with no acceleration to balance it
        let p = NSParams::new([e("1"), e("0"), e("0")], e("t"));
        let err = ns_work_form(&p, &xyzt(), None, &SamplerConfig::default()).unwrap_err();
        assert!(matches!(err, PhysicsError::DecompositionFailure { .. }));
    }

    #[test]
    fn beltrami_mode_matches_thermo() {
        let p = NSParams::new(
            [e("exp(-nu*k^2*t)*sin(k*z)"), e("exp(-nu*k^2*t)*cos(k*z)"), e("0")],
            e("1"),
        )
        .with_viscosity(e("nu"), e("0"));
        let cfg = SamplerConfig::default();
        let v = xyzt();
        assert!(ns_residual(&p, &v, &cfg).unwrap().vanishes());
        let a = hydro_action(&p, &v).unwrap();
        let t = crate::thermo::torsion_vector(&a).unwrap();
        let h = hydro_torsion(&p, &v).unwrap();
        for (x, y) in t.components().iter().zip(h.components()) {
            assert!((x - y).is_zero(), "{x} vs {y}");
        }
        let s = crate::thermo::sigma(&a).unwrap().sigma;
        let hs = hydro_sigma(&p, &v).unwrap();
        assert!((&s - &hs.sigma).is_zero(), "{s} vs {}", hs.sigma);
        assert!(!hs.shear_term.is_zero());
    }
}
