//! Differential forms over an ordered set of coordinates.
//!
//! A p-form is stored as a map from strictly increasing index tuples to coefficients, with
//! `Σ_{j<k} F_jk dx^j∧dx^k` as the 2-form convention (no factor ½).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::symbolic::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("operands live on different varieties")]
    VarietyMismatch,
    #[error("expected a {expected}-form, got a {found}-form")]
    DegreeError { expected: usize, found: usize },
    #[error("variety needs at least one coordinate")]
    EmptyVariety,
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("direction field needs {expected} components, got {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("expected a variety of dimension {expected}, got {found}")]
    VarietyDimensionError { expected: usize, found: usize },
}

/// Ordered coordinate names; the order fixes the orientation `dx^1∧…∧dx^n`.
#[derive(Debug, Clone)]
pub struct Variety(Arc<Vec<String>>);

impl PartialEq for Variety {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for Variety {}

impl Variety {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ExteriorError> {
        if names.is_empty() {
            return Err(ExteriorError::EmptyVariety);
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in names {
            if !seen.insert(n.as_ref()) {
                return Err(ExteriorError::DuplicateCoordinate(n.as_ref().to_string()));
            }
        }
        Ok(Variety(Arc::new(names.iter().map(|n| n.as_ref().to_string()).collect())))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, k: usize) -> &str {
        &self.0[k]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn coord(&self, k: usize) -> Expr {
        Expr::var(&self.0[k])
    }

    /// The volume form `dx^1∧…∧dx^n`.
    pub fn volume(&self) -> DifferentialForm {
        DifferentialForm::monomial(self, (0..self.dim()).collect(), Expr::one())
    }

    pub fn differential(&self, k: usize) -> DifferentialForm {
        DifferentialForm::monomial(self, vec![k], Expr::one())
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<(), ExteriorError> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(ExteriorError::VarietyDimensionError { expected: n, found: self.dim() })
        }
    }
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on a repeated index.
fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn accumulate(map: &mut BTreeMap<Vec<usize>, Expr>, key: Vec<usize>, value: Expr) {
    if value.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(value);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &value;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialForm {
    variety: Variety,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

impl DifferentialForm {
    pub fn zero(variety: &Variety, degree: usize) -> Self {
        DifferentialForm { variety: variety.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn scalar(variety: &Variety, value: Expr) -> Self {
        Self::monomial(variety, Vec::new(), value)
    }

    /// `coeff * dx^{i1}∧…∧dx^{ip}` for indices in any order.
    pub fn monomial(variety: &Variety, mut indices: Vec<usize>, coeff: Expr) -> Self {
        let degree = indices.len();
        let mut out = Self::zero(variety, degree);
        assert!(indices.iter().all(|&i| i < variety.dim()), "basis index out of range");
        if let Some(sign) = sort_with_sign(&mut indices) {
            accumulate(&mut out.terms, indices, &coeff * &Expr::int(sign));
        }
        out
    }

    /// Builds a p-form from `(indices, coefficient)` pairs in any index order.
    pub fn from_terms<I>(variety: &Variety, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut out = Self::zero(variety, degree);
        for (mut idx, c) in terms {
            assert_eq!(idx.len(), degree, "index tuple length must equal the degree");
            assert!(idx.iter().all(|&i| i < variety.dim()), "basis index out of range");
            if let Some(sign) = sort_with_sign(&mut idx) {
                accumulate(&mut out.terms, idx, &c * &Expr::int(sign));
            }
        }
        out
    }

    /// A 1-form `Σ c_k dx^k`.
    pub fn one_form(variety: &Variety, coeffs: &[Expr]) -> Self {
        Self::from_terms(variety, 1, coeffs.iter().enumerate().map(|(k, c)| (vec![k], c.clone())))
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the monomial with the given indices (any order, sign absorbed).
    pub fn coeff(&self, indices: &[usize]) -> Expr {
        let mut idx = indices.to_vec();
        match sort_with_sign(&mut idx) {
            Some(sign) => self.terms.get(&idx).map(|c| c * &Expr::int(sign)).unwrap_or_else(Expr::zero),
            None => Expr::zero(),
        }
    }

    /// The coefficient of a 0-form.
    pub fn as_scalar(&self) -> Expr {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Expr::zero)
    }

    /// Components of a 1-form, one per coordinate.
    pub fn components(&self) -> Vec<Expr> {
        (0..self.variety.dim()).map(|k| self.coeff(&[k])).collect()
    }

    fn same(&self, other: &Self) -> Result<(), ExteriorError> {
        if self.variety == other.variety {
            Ok(())
        } else {
            Err(ExteriorError::VarietyMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.same(other)?;
        // an empty form adapts to the other operand's degree
        if self.is_zero() {
            return Ok(if other.is_zero() { self.clone() } else { other.clone() });
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(ExteriorError::DegreeError { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            accumulate(&mut out.terms, k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Expr::int(-1))
    }

    /// Multiplies every coefficient by the scalar `f`.
    pub fn scale(&self, f: &Expr) -> Self {
        self.map_coeffs(|c| c * f)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let mut out = Self::zero(&self.variety, self.degree);
        for (k, v) in &self.terms {
            accumulate(&mut out.terms, k.clone(), f(v));
        }
        out
    }

    /// Fallible coefficient map, e.g. for substitutions that can hit a zero denominator.
    pub fn try_map_coeffs(&self, f: impl Fn(&Expr) -> Option<Expr>) -> Option<Self> {
        let mut out = Self::zero(&self.variety, self.degree);
        for (k, v) in &self.terms {
            accumulate(&mut out.terms, k.clone(), f(v)?);
        }
        Some(out)
    }

    pub fn subst(&self, map: &BTreeMap<String, Expr>) -> Self {
        self.map_coeffs(|c| c.subst(map))
    }

    /// All coefficients, in index order.
    pub fn coefficients(&self) -> impl Iterator<Item = &Expr> {
        self.terms.values()
    }
}

/// `a ∧ b`.
pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm, ExteriorError> {
    a.same(b)?;
    let degree = a.degree + b.degree;
    let mut out = DifferentialForm::zero(&a.variety, degree);
    if degree > a.variety.dim() {
        return Ok(out);
    }
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            let mut idx: Vec<usize> = ia.iter().chain(ib.iter()).copied().collect();
            if let Some(sign) = sort_with_sign(&mut idx) {
                let c = ca * cb;
                accumulate(&mut out.terms, idx, if sign < 0 { -c } else { c });
            }
        }
    }
    Ok(out)
}

/// Exterior derivative; coordinates are the variety's variables, everything else is constant.
pub fn d(a: &DifferentialForm) -> DifferentialForm {
    let n = a.variety.dim();
    let mut out = DifferentialForm::zero(&a.variety, a.degree + 1);
    if a.degree + 1 > n {
        return out;
    }
    for (idx, c) in &a.terms {
        for j in 0..n {
            if idx.contains(&j) {
                continue;
            }
            let dc = c.diff(a.variety.name(j));
            if dc.is_zero() {
                continue;
            }
            let before = idx.iter().filter(|&&i| i < j).count();
            let mut key = idx.clone();
            key.insert(before, j);
            accumulate(&mut out.terms, key, if before % 2 == 1 { -dc } else { dc });
        }
    }
    out
}

/// Contravariant direction field with an overall scale factor `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionField {
    variety: Variety,
    components: Vec<Expr>,
    rho: Expr,
}

impl DirectionField {
    pub fn new(variety: &Variety, components: Vec<Expr>) -> Result<Self, ExteriorError> {
        if components.len() != variety.dim() {
            return Err(ExteriorError::ComponentCount { expected: variety.dim(), found: components.len() });
        }
        Ok(DirectionField { variety: variety.clone(), components, rho: Expr::one() })
    }

    pub fn with_rho(mut self, rho: Expr) -> Self {
        self.rho = rho;
        self
    }

    pub fn variety(&self) -> &Variety {
        &self.variety
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    /// `rho * V^k`.
    pub fn scaled(&self, k: usize) -> Expr {
        &self.rho * &self.components[k]
    }

    pub fn is_zero(&self) -> bool {
        self.rho.is_zero() || self.components.iter().all(Expr::is_zero)
    }
}

/// Interior product `i(ρV) a`; a 0-form maps to the zero 0-form.
pub fn interior(v: &DirectionField, a: &DifferentialForm) -> Result<DifferentialForm, ExteriorError> {
    if v.variety != a.variety {
        return Err(ExteriorError::VarietyMismatch);
    }
    if a.degree == 0 {
        return Ok(DifferentialForm::zero(&a.variety, 0));
    }
    let scaled: Vec<Expr> = (0..v.components.len()).map(|k| v.scaled(k)).collect();
    let mut out = DifferentialForm::zero(&a.variety, a.degree - 1);
    for (idx, c) in &a.terms {
        for (k, &i) in idx.iter().enumerate() {
            if scaled[i].is_zero() {
                continue;
            }
            let mut key = idx.clone();
            key.remove(k);
            let term = &scaled[i] * c;
            accumulate(&mut out.terms, key, if k % 2 == 1 { -term } else { term });
        }
    }
    Ok(out)
}

/// Cartan decomposition of the Lie derivative of a 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct LieParts {
    /// `Q = W + dU`
    pub heat: DifferentialForm,
    /// `W = i(ρV) dA`
    pub work: DifferentialForm,
    /// `U = i(ρV) A`
    pub energy: DifferentialForm,
}

pub fn lie(v: &DirectionField, a: &DifferentialForm) -> Result<LieParts, ExteriorError> {
    if a.degree != 1 {
        return Err(ExteriorError::DegreeError { expected: 1, found: a.degree });
    }
    let work = interior(v, &d(a))?;
    let energy = interior(v, a)?;
    let heat = work.add(&d(&energy))?;
    Ok(LieParts { heat, work, energy })
}

/// Lie derivative of a form of any degree, `i(V)dα + d(i(V)α)`.
pub fn lie_derivative(v: &DirectionField, a: &DifferentialForm) -> Result<DifferentialForm, ExteriorError> {
    let first = interior(v, &d(a))?;
    if a.degree == 0 {
        return Ok(first);
    }
    let second = d(&interior(v, a)?);
    first.add(&second)
}

/// `M[j][k]` = coefficient of `dx^j∧dx^k` for `j<k`, antisymmetrically extended.
pub fn matrix_of_2form(f: &DifferentialForm) -> Result<Vec<Vec<Expr>>, ExteriorError> {
    if f.degree != 2 {
        return Err(ExteriorError::DegreeError { expected: 2, found: f.degree });
    }
    let n = f.variety.dim();
    let mut m = vec![vec![Expr::zero(); n]; n];
    for (idx, c) in &f.terms {
        let (j, k) = (idx[0], idx[1]);
        m[j][k] = c.clone();
        m[k][j] = -c;
    }
    Ok(m)
}

/// Inverse of [`matrix_of_2form`], reading the upper triangle.
pub fn form_from_matrix(variety: &Variety, m: &[Vec<Expr>]) -> DifferentialForm {
    let n = variety.dim();
    let mut terms = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            terms.push((vec![j, k], m[j][k].clone()));
        }
    }
    DifferentialForm::from_terms(variety, 2, terms)
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            let basis: Vec<String> = idx.iter().map(|&i| format!("d{}", self.variety.name(i))).collect();
            let basis = basis.join("^");
            let body = if idx.is_empty() {
                c.to_string()
            } else if c.is_one() {
                basis
            } else if (-c).is_one() {
                format!("-{basis}")
            } else if c.term_count() == 1 {
                format!("{c}*{basis}")
            } else {
                format!("({c})*{basis}")
            };
            if n == 0 {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Variety {
        Variety::new(&["x", "y", "z"]).unwrap()
    }

    fn contact(v: &Variety) -> DifferentialForm {
        DifferentialForm::one_form(v, &[Expr::zero(), Expr::var("x"), Expr::one()])
    }

    #[test]
    fn wedge_is_antisymmetric() {
        let v = xyz();
        let (dx, dy) = (v.differential(0), v.differential(1));
        assert_eq!(wedge(&dx, &dy).unwrap(), DifferentialForm::monomial(&v, vec![0, 1], Expr::one()));
        assert_eq!(wedge(&dy, &dx).unwrap(), DifferentialForm::monomial(&v, vec![0, 1], Expr::int(-1)));
        let a = contact(&v);
        assert!(wedge(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn contact_sequence_elements() {
        let v = xyz();
        let a = contact(&v);
        let da = d(&a);
        assert_eq!(da, DifferentialForm::monomial(&v, vec![0, 1], Expr::one()));
        assert_eq!(wedge(&a, &da).unwrap(), v.volume());
        assert_eq!(a.to_string(), "x*dy + dz");
        assert_eq!(da.to_string(), "dx^dy");
    }

    #[test]
    fn interior_examples() {
        let v = xyz();
        let rho = Expr::func("rho", vec![Expr::var("x"), Expr::var("y"), Expr::var("z")]);
        let vx = DirectionField::new(&v, vec![Expr::one(), Expr::zero(), Expr::zero()]).unwrap().with_rho(rho.clone());
        let dxdy = DifferentialForm::monomial(&v, vec![0, 1], Expr::one());
        assert_eq!(interior(&vx, &dxdy).unwrap(), DifferentialForm::monomial(&v, vec![1], rho.clone()));
        let e = DirectionField::new(&v, vec![Expr::zero(), Expr::zero(), Expr::one()]).unwrap().with_rho(rho.clone());
        assert_eq!(interior(&e, &contact(&v)).unwrap(), DifferentialForm::scalar(&v, rho));
    }

    #[test]
    fn lie_vy_gives_x_drho() {
        let v = xyz();
        let rho = Expr::func("rho", vec![Expr::var("x"), Expr::var("y"), Expr::var("z")]);
        let vy = DirectionField::new(&v, vec![Expr::zero(), Expr::one(), Expr::zero()]).unwrap().with_rho(rho.clone());
        let parts = lie(&vy, &contact(&v)).unwrap();
        assert_eq!(parts.energy.as_scalar(), &rho * &Expr::var("x"));
        assert_eq!(parts.work, DifferentialForm::monomial(&v, vec![0], -&rho));
        let x_drho = d(&DifferentialForm::scalar(&v, rho)).scale(&Expr::var("x"));
        assert_eq!(parts.heat, x_drho);
    }

    #[test]
    fn matrix_convention() {
        let v = xyz();
        let m = matrix_of_2form(&DifferentialForm::monomial(&v, vec![0, 1], Expr::one())).unwrap();
        assert_eq!(m[0][1], Expr::one());
        assert_eq!(m[1][0], Expr::int(-1));
        assert!(m[2].iter().all(Expr::is_zero));
        assert!(matrix_of_2form(&contact(&v)).is_err());
    }

    #[test]
    fn mismatched_varieties() {
        let a = xyz().differential(0);
        let b = Variety::new(&["x", "y"]).unwrap().differential(0);
        assert_eq!(wedge(&a, &b), Err(ExteriorError::VarietyMismatch));
        assert!(Variety::new(&["x", "x"]).is_err());
    }
}
