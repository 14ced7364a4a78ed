//! Field extraction from a 4-potential and the Lorentz decomposition of work.

use serde::Serialize;

use super::vector::{self, Frame, Vec3};
use super::PhysicsError;
use crate::exterior::{d, interior, matrix_of_2form, DifferentialForm, DirectionField};
use crate::symbolic::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Em,
    Hydro,
}

/// Fields of an action `A = A·dr - φ dt`.
///
/// In the hydrodynamic reading `a = -E` is the acceleration and `ω = B` the vorticity.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldBundle {
    pub flavor: Flavor,
    pub potential: Vec3,
    pub scalar_potential: Expr,
    pub electric: Vec3,
    pub magnetic: Vec3,
    /// `curl E + ∂B/∂t`, zero for every action.
    pub faraday: Vec3,
    /// `div B`, zero for every action.
    pub gauss: Expr,
    /// E and B agree with the entries of the matrix of `dA`.
    pub matrix_consistent: bool,
}

impl FieldBundle {
    /// Acceleration `a = -E`.
    pub fn acceleration(&self) -> Vec3 {
        vector::scale(&Expr::int(-1), &self.electric)
    }

    pub fn vorticity(&self) -> &Vec3 {
        &self.magnetic
    }

    /// `E·B`.
    pub fn parity(&self) -> Expr {
        vector::dot(&self.electric, &self.magnetic)
    }
}

pub fn em_fields(a: &DifferentialForm) -> Result<FieldBundle, PhysicsError> {
    fields(a, Flavor::Em)
}

pub fn hydro_fields(a: &DifferentialForm) -> Result<FieldBundle, PhysicsError> {
    fields(a, Flavor::Hydro)
}

fn fields(a: &DifferentialForm, flavor: Flavor) -> Result<FieldBundle, PhysicsError> {
    let frame = Frame::of(a.variety())?;
    if a.degree() != 1 {
        return Err(crate::exterior::ExteriorError::DegreeError { expected: 1, found: a.degree() }.into());
    }
    let c = a.components();
    let potential: Vec3 = [c[0].clone(), c[1].clone(), c[2].clone()];
    let scalar_potential = -&c[3];
    let electric = vector::sub(&vector::scale(&Expr::int(-1), &frame.dt(&potential)), &frame.grad(&scalar_potential));
    let magnetic = frame.curl(&potential);
    let faraday = vector::add(&frame.curl(&electric), &frame.dt(&magnetic));
    let gauss = frame.div(&magnetic);
    let m = matrix_of_2form(&d(a))?;
    let matrix_consistent = m[0][1] == magnetic[2]
        && m[1][2] == magnetic[0]
        && m[0][2] == -&magnetic[1]
        && (0..3).all(|i| m[i][3] == electric[i]);
    Ok(FieldBundle { flavor, potential, scalar_potential, electric, magnetic, faraday, gauss, matrix_consistent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzWork {
    pub work: DifferentialForm,
    /// `-ρ(E + V×B)`, the spatial covector of W.
    pub force: Vec3,
    /// `ρ V·E`, the dt coefficient of W.
    pub power: Expr,
    /// `force·dr + power dt` equals `i(ρV)dA` exactly.
    pub recombines: bool,
}

/// Work of the process `ρ[V, 1]` split into Lorentz force and power.
pub fn lorentz_work(a: &DifferentialForm, v: &DirectionField) -> Result<LorentzWork, PhysicsError> {
    let f = em_fields(a)?;
    if !v.components()[3].is_one() {
        return Err(PhysicsError::TimeComponent);
    }
    let rho = v.rho();
    let vel: Vec3 = [v.components()[0].clone(), v.components()[1].clone(), v.components()[2].clone()];
    let force = vector::scale(&-rho, &vector::add(&f.electric, &vector::cross(&vel, &f.magnetic)));
    let power = rho * &vector::dot(&vel, &f.electric);
    let work = interior(v, &d(a))?;
    let rebuilt =
        DifferentialForm::one_form(a.variety(), &[force[0].clone(), force[1].clone(), force[2].clone(), power.clone()]);
    let recombines = rebuilt == work;
    Ok(LorentzWork { work, force, power, recombines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Variety;

    fn xyzt() -> Variety {
        Variety::new(&["x", "y", "z", "t"]).unwrap()
    }

    #[test]
    fn uniform_magnetic_field() {
        let v = xyzt();
        let a = DifferentialForm::one_form(&v, &[-Expr::var("y"), Expr::var("x"), Expr::zero(), Expr::zero()]);
        let f = em_fields(&a).unwrap();
        assert_eq!(f.magnetic, [Expr::zero(), Expr::zero(), Expr::int(2)]);
        assert!(vector::is_zero(&f.electric));
        assert!(f.matrix_consistent);
    }

    #[test]
    fn pure_gauge_has_no_fields() {
        let v = xyzt();
        let g = &(&Expr::var("x") * &Expr::var("t")) + &Expr::sin(&Expr::var("y"));
        let a = d(&DifferentialForm::scalar(&v, g));
        let f = em_fields(&a).unwrap();
        assert!(vector::is_zero(&f.electric) && vector::is_zero(&f.magnetic));
    }

    #[test]
    fn force_free_motion_along_b() {
        let v = xyzt();
        let a = DifferentialForm::one_form(&v, &[-Expr::var("y"), Expr::var("x"), Expr::zero(), Expr::zero()]);
        let k = Expr::var("k");
        let field = DirectionField::new(&v, vec![Expr::zero(), Expr::zero(), k, Expr::one()]).unwrap();
        let w = lorentz_work(&a, &field).unwrap();
        assert!(w.work.is_zero());
        assert!(w.recombines);
    }
}
