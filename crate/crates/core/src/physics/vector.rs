//! Vector calculus over the spatial triple of a 4-variable variety.

use crate::exterior::{ExteriorError, Variety};
use crate::symbolic::Expr;

pub type Vec3 = [Expr; 3];

/// Names of the spatial coordinates and of time (the fourth coordinate).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub space: [String; 3],
    pub time: String,
}

impl Frame {
    pub fn of(variety: &Variety) -> Result<Self, ExteriorError> {
        variety.check_dim(4)?;
        let n = variety.names();
        Ok(Frame { space: [n[0].clone(), n[1].clone(), n[2].clone()], time: n[3].clone() })
    }

    pub fn grad(&self, f: &Expr) -> Vec3 {
        [f.diff(&self.space[0]), f.diff(&self.space[1]), f.diff(&self.space[2])]
    }

    pub fn div(&self, v: &Vec3) -> Expr {
        &(&v[0].diff(&self.space[0]) + &v[1].diff(&self.space[1])) + &v[2].diff(&self.space[2])
    }

    pub fn curl(&self, v: &Vec3) -> Vec3 {
        let [x, y, z] = &self.space;
        [&v[2].diff(y) - &v[1].diff(z), &v[0].diff(z) - &v[2].diff(x), &v[1].diff(x) - &v[0].diff(y)]
    }

    /// `Δv = grad div v - curl curl v`.
    pub fn laplacian(&self, v: &Vec3) -> Vec3 {
        sub(&self.grad(&self.div(v)), &self.curl(&self.curl(v)))
    }

    pub fn dt(&self, v: &Vec3) -> Vec3 {
        v.clone().map(|c| c.diff(&self.time))
    }
}

pub fn zero() -> Vec3 {
    [Expr::zero(), Expr::zero(), Expr::zero()]
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn scale(s: &Expr, a: &Vec3) -> Vec3 {
    [s * &a[0], s * &a[1], s * &a[2]]
}

pub fn dot(a: &Vec3, b: &Vec3) -> Expr {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

pub fn is_zero(a: &Vec3) -> bool {
    a.iter().all(Expr::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame::of(&Variety::new(&["x", "y", "z", "t"]).unwrap()).unwrap()
    }

    #[test]
    fn rotation_curl() {
        let f = frame();
        let v = [-Expr::var("y"), Expr::var("x"), Expr::zero()];
        assert_eq!(f.curl(&v), [Expr::zero(), Expr::zero(), Expr::int(2)]);
        assert!(f.div(&v).is_zero());
    }

    #[test]
    fn identities() {
        let f = frame();
        let (x, y, z) = (Expr::var("x"), Expr::var("y"), Expr::var("z"));
        let v = [&x * &(&y * &y), Expr::sin(&z), &(&x * &z) + &y];
        assert!(f.div(&f.curl(&v)).is_zero());
        assert!(is_zero(&f.curl(&f.grad(&(&x * &Expr::exp(&y))))));
    }
}
