//! Eigen-analysis of antisymmetric matrices of 2-forms: extremal vectors and isotropic spinors.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{d, matrix_of_2form, DifferentialForm, DirectionField, ExteriorError};
use crate::symbolic::{eval, rational_sqrt, CRational, EvalError, Expr, Point, SamplerConfig, Value, ZeroVerdict};
use crate::thermo::{first_law, ptd, ProcessReport, ThermoError};

pub const ZERO_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinorError {
    #[error("matrix is not antisymmetric")]
    NotAntisymmetric,
    #[error("eigen-analysis supports sizes 2 to 4, got {0}")]
    SizeUnsupported(usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("the spinor experiment needs an action of Pfaff dimension 3 on 3 variables with constant dA")]
    NotPtd3,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    ExtremalVector,
    Spinor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub kind: EigenKind,
    /// Exact eigenvalue and direction when the matrix is rational and the spectrum is too.
    pub exact: Option<(CRational, Vec<CRational>)>,
    /// The eigenvalue has a multi-dimensional eigenspace.
    pub degenerate: bool,
}

trait Field: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn negligible(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn negligible(&self) -> bool {
        self.norm() < 1e-9
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Field for CRational {
    fn zero() -> Self {
        CRational::zero()
    }
    fn one() -> Self {
        CRational::one()
    }
    fn negligible(&self) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self * &o.inv().expect("pivot is non-zero")
    }
}

/// Basis of the null space of `a` by Gauss-Jordan elimination with partial pivoting.
fn null_space<F: Field>(mut a: Vec<Vec<F>>) -> Vec<Vec<F>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows).max_by(|&i, &j| a[i][c].magnitude().total_cmp(&a[j][c].magnitude())).unwrap();
        if a[best][c].negligible() {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c].clone();
        for k in 0..cols {
            a[r][k] = a[r][k].div(&p);
        }
        for i in 0..rows {
            if i != r && !a[i][c].negligible() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let v = a[r][k].mul(&f);
                    a[i][k] = a[i][k].sub(&v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![F::zero(); cols];
            v[fc] = F::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = F::zero().sub(&a[row][fc]);
            }
            v
        })
        .collect()
}

fn normalize_c64(v: &mut [Complex64]) {
    if let Some(lead) = v.iter().find(|c| c.norm() > ZERO_THRESHOLD).copied() {
        for c in v.iter_mut() {
            *c /= lead;
            if c.re.abs() < 1e-14 {
                c.re = 0.0;
            }
            if c.im.abs() < 1e-14 {
                c.im = 0.0;
            }
        }
    }
}

fn normalize_exact(v: &mut [CRational]) {
    if let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() {
        let inv = lead.inv().expect("non-zero");
        for c in v.iter_mut() {
            *c = &*c * &inv;
        }
    }
}

fn check_shape<T>(m: &[Vec<T>]) -> Result<usize, SpinorError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(SpinorError::NotSquare);
    }
    if !(2..=4).contains(&n) {
        return Err(SpinorError::SizeUnsupported(n));
    }
    Ok(n)
}

/// Squared moduli `μ²` of the non-zero eigenvalue pairs `±iμ`, largest first.
fn mu_squared(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut p = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            p += m[i][j] * m[i][j];
        }
    }
    match n {
        2 | 3 => vec![p],
        _ => {
            let pf = m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2];
            let q = pf * pf;
            let disc = (p * p - 4.0 * q).max(0.0);
            let big = (p + disc.sqrt()) / 2.0;
            let small = if big > 0.0 { q / big } else { 0.0 };
            vec![big, small]
        }
    }
}

fn eigvecs_c64(m: &[Vec<f64>], lambda: Complex64) -> Vec<Vec<Complex64>> {
    let n = m.len();
    let a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(m[i][j], 0.0) - if i == j { lambda } else { Complex64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    null_space(a)
}

/// Eigenpairs of a real antisymmetric matrix of size 2 to 4, via closed-form characteristic
/// polynomials. Order: `+iμ` (largest μ first), then `-iμ`, then the zero eigenvalues.
pub fn eigen_antisymmetric(m: &[Vec<f64>]) -> Result<Vec<EigenPair>, SpinorError> {
    let n = check_shape(m)?;
    let scale = m.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
    for i in 0..n {
        for j in 0..n {
            if (m[i][j] + m[j][i]).abs() >= ZERO_THRESHOLD.max(ZERO_THRESHOLD * scale) {
                return Err(SpinorError::NotAntisymmetric);
            }
        }
    }
    let unit = if scale > 0.0 { scale } else { 1.0 };
    let scaled: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|x| x / unit).collect()).collect();
    let mut mus: Vec<f64> = mu_squared(&scaled).into_iter().map(|s| s.max(0.0).sqrt()).filter(|&mu| mu >= ZERO_THRESHOLD).collect();
    // merge a repeated pair into one degenerate eigenspace
    let degenerate_pair = mus.len() == 2 && (mus[0] - mus[1]).abs() < 1e-9;
    if degenerate_pair {
        mus.truncate(1);
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for &mu in &mus {
        for (sign, out) in [(1.0, &mut plus), (-1.0, &mut minus)] {
            let lambda = Complex64::new(0.0, sign * mu);
            let mut vecs = eigvecs_c64(&scaled, lambda);
            if !degenerate_pair {
                vecs.truncate(1);
            }
            let degenerate = vecs.len() > 1;
            for mut v in vecs {
                normalize_c64(&mut v);
                out.push(EigenPair {
                    value: lambda * unit,
                    vector: v,
                    kind: EigenKind::Spinor,
                    exact: None,
                    degenerate,
                });
            }
        }
    }
    let zeros = n - plus.len() - minus.len();
    let mut zero_vecs = eigvecs_c64(&scaled, Complex64::new(0.0, 0.0));
    zero_vecs.truncate(zeros);
    let degenerate = zeros > 1;
    let mut out = plus;
    out.extend(minus);
    for mut v in zero_vecs {
        normalize_c64(&mut v);
        out.push(EigenPair {
            value: Complex64::new(0.0, 0.0),
            vector: v,
            kind: EigenKind::ExtremalVector,
            exact: None,
            degenerate,
        });
    }
    Ok(out)
}

fn exact_mus(m: &[Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut p = BigRational::zero();
    for i in 0..n {
        for j in i + 1..n {
            p += &m[i][j] * &m[i][j];
        }
    }
    let squares = if n < 4 {
        vec![p]
    } else {
        let pf = &m[0][1] * &m[2][3] - &m[0][2] * &m[1][3] + &m[0][3] * &m[1][2];
        let q = &pf * &pf;
        let four = BigRational::from_integer(4.into());
        let two = BigRational::from_integer(2.into());
        let root = rational_sqrt(&(&p * &p - &four * &q))?;
        vec![(&p + &root) / &two, (&p - &root) / &two]
    };
    let mut mus = Vec::new();
    for s in squares {
        if s.is_positive() {
            let mu = rational_sqrt(&s)?;
            if !mus.contains(&mu) {
                mus.push(mu);
            }
        }
    }
    Some(mus)
}

/// Exact eigen-analysis of a rational antisymmetric matrix when its spectrum is rational
/// multiples of `i`; otherwise the numeric result.
pub fn eigen_antisymmetric_rational(m: &[Vec<BigRational>]) -> Result<Vec<EigenPair>, SpinorError> {
    let n = check_shape(m)?;
    for i in 0..n {
        for j in 0..n {
            if !(&m[i][j] + &m[j][i]).is_zero() {
                return Err(SpinorError::NotAntisymmetric);
            }
        }
    }
    let floats: Vec<Vec<f64>> =
        m.iter().map(|r| r.iter().map(|x| CRational::real(x.clone()).to_c64().re).collect()).collect();
    let Some(mus) = exact_mus(m) else {
        return eigen_antisymmetric(&floats);
    };
    let entry = |i: usize, j: usize, lambda: &CRational| {
        let c = CRational::real(m[i][j].clone());
        if i == j {
            &c - lambda
        } else {
            c
        }
    };
    let shifted = |lambda: &CRational| -> Vec<Vec<CRational>> {
        (0..n).map(|i| (0..n).map(|j| entry(i, j, lambda)).collect()).collect()
    };
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for mu in &mus {
        for (sign, out) in [(1, &mut plus), (-1, &mut minus)] {
            let lambda = CRational::new(BigRational::zero(), mu * BigRational::from_integer(sign.into()));
            let vecs = null_space(shifted(&lambda));
            let degenerate = vecs.len() > 1;
            for mut v in vecs {
                normalize_exact(&mut v);
                out.push(EigenPair {
                    value: lambda.to_c64(),
                    vector: v.iter().map(CRational::to_c64).collect(),
                    kind: EigenKind::Spinor,
                    exact: Some((lambda.clone(), v)),
                    degenerate,
                });
            }
        }
    }
    let zero_vecs = null_space(shifted(&CRational::zero()));
    let degenerate = zero_vecs.len() > 1;
    let mut out = plus;
    out.extend(minus);
    for mut v in zero_vecs {
        normalize_exact(&mut v);
        out.push(EigenPair {
            value: Complex64::new(0.0, 0.0),
            vector: v.iter().map(CRational::to_c64).collect(),
            kind: EigenKind::ExtremalVector,
            exact: Some((CRational::zero(), v)),
            degenerate,
        });
    }
    Ok(out)
}

/// `Σ s_k² = 0` (no conjugation).
pub fn is_isotropic(s: &[Complex64]) -> bool {
    s.iter().map(|c| c * c).sum::<Complex64>().norm() < ZERO_THRESHOLD
}

pub fn is_isotropic_exact(s: &[CRational]) -> bool {
    s.iter().fold(CRational::zero(), |acc, c| &acc + &(c * c)).is_zero()
}

/// Covector action `(v·M)_k = Σ_j v^j M[j][k]`, the action that produces `i(V)F`.
pub fn covector_action(m: &[Vec<CRational>], v: &[CRational]) -> Vec<CRational> {
    let n = v.len();
    (0..n).map(|k| (0..n).fold(CRational::zero(), |acc, j| &acc + &(&v[j] * &m[j][k]))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSplit {
    pub matrix: Vec<Vec<Value>>,
    pub extremals: Vec<EigenPair>,
    pub spinors: Vec<EigenPair>,
    pub rank: usize,
    pub ptd: usize,
    /// Extremal count equals `n - 2⌊PTD/2⌋`.
    pub counts_consistent: bool,
}

/// Evaluates `[dA]` at `at` and splits its eigendirections.
pub fn classify_eigendirections(a: &DifferentialForm, at: &Point, cfg: &SamplerConfig) -> Result<EigenSplit, SpinorError> {
    let m = matrix_of_2form(&d(a))?;
    let values: Vec<Vec<Value>> =
        m.iter().map(|row| row.iter().map(|e| eval(e, at)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let exact: Option<Vec<Vec<BigRational>>> = values
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| match v {
                    Value::Exact(c) if c.is_real() => Some(c.re.clone()),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let pairs = match exact {
        Some(q) => eigen_antisymmetric_rational(&q)?,
        None => {
            let f: Vec<Vec<f64>> = values.iter().map(|r| r.iter().map(|v| v.to_c64().re).collect()).collect();
            eigen_antisymmetric(&f)?
        }
    };
    let (extremals, spinors): (Vec<_>, Vec<_>) = pairs.into_iter().partition(|p| p.kind == EigenKind::ExtremalVector);
    let n = a.variety().dim();
    let rank = n - extremals.len();
    let report = ptd(a, Some(at), cfg)?;
    let counts_consistent = extremals.len() == n - 2 * (report.ptd / 2);
    Ok(EigenSplit { matrix: values, extremals, spinors, rank, ptd: report.ptd, counts_consistent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinationReport {
    pub spinors: [Vec<CRational>; 2],
    pub field: DirectionField,
    pub orthogonal: DirectionField,
    pub process: ProcessReport,
    pub orthogonal_process: ProcessReport,
    /// Zero test of `a² - b²`, the cancellation requirement.
    pub balance: ZeroVerdict,
}

/// Processes along `V = (a·Sp1 + b·Sp2)/2` and `V⊥ = -i(a·Sp1 - b·Sp2)/2`.
pub fn spinor_combination_experiment(
    a: &DifferentialForm,
    alpha: &Expr,
    beta: &Expr,
    rho: &Expr,
    cfg: &SamplerConfig,
) -> Result<CombinationReport, SpinorError> {
    let variety = a.variety();
    if variety.dim() != 3 || ptd(a, None, cfg)?.ptd != 3 {
        return Err(SpinorError::NotPtd3);
    }
    let m = matrix_of_2form(&d(a))?;
    let rational: Option<Vec<Vec<BigRational>>> = m
        .iter()
        .map(|row| row.iter().map(|e| e.as_constant().filter(CRational::is_real).map(|c| c.re)).collect())
        .collect();
    let rational = rational.ok_or(SpinorError::NotPtd3)?;
    let pairs = eigen_antisymmetric_rational(&rational)?;
    let mut exact_spinors = pairs.iter().filter(|p| p.kind == EigenKind::Spinor).filter_map(|p| p.exact.clone());
    let (Some((_, sp1)), Some((_, sp2))) = (exact_spinors.next(), exact_spinors.next()) else {
        return Err(SpinorError::NotPtd3);
    };
    let half = Expr::ratio(1, 2);
    let minus_half_i = &Expr::imag() * &Expr::ratio(-1, 2);
    let comps = |f: &dyn Fn(Expr, Expr) -> Expr| -> Vec<Expr> {
        sp1.iter()
            .zip(&sp2)
            .map(|(s1, s2)| f(alpha * &Expr::constant(s1.clone()), beta * &Expr::constant(s2.clone())))
            .collect()
    };
    let field = DirectionField::new(variety, comps(&|p, q| &(&p + &q) * &half))?.with_rho(rho.clone());
    let orthogonal = DirectionField::new(variety, comps(&|p, q| &(&p - &q) * &minus_half_i))?.with_rho(rho.clone());
    let process = first_law(a, &field, cfg)?;
    let orthogonal_process = first_law(a, &orthogonal, cfg)?;
    let balance = crate::symbolic::is_zero(&(&(alpha * alpha) - &(beta * beta)), cfg);
    Ok(CombinationReport { spinors: [sp1, sp2], field, orthogonal, process, orthogonal_process, balance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn planar_rotation_matrix_exact() {
        let m = vec![vec![q(0), q(1), q(0)], vec![q(-1), q(0), q(0)], vec![q(0), q(0), q(0)]];
        let pairs = eigen_antisymmetric_rational(&m).unwrap();
        assert_eq!(pairs.len(), 3);
        let (l0, v0) = pairs[0].exact.clone().unwrap();
        assert_eq!(l0, CRational::imag_unit());
        assert_eq!(v0, vec![CRational::one(), CRational::imag_unit(), CRational::zero()]);
        assert!(is_isotropic_exact(&v0));
        let (l1, v1) = pairs[1].exact.clone().unwrap();
        assert_eq!(l1, -&CRational::imag_unit());
        assert_eq!(v1[1], -&CRational::imag_unit());
        let (l2, v2) = pairs[2].exact.clone().unwrap();
        assert!(l2.is_zero());
        assert_eq!(v2, vec![CRational::zero(), CRational::zero(), CRational::one()]);
        assert_eq!(pairs[2].kind, EigenKind::ExtremalVector);
    }

    #[test]
    fn zero_matrix_is_all_extremal() {
        let m = vec![vec![0.0; 3]; 3];
        let pairs = eigen_antisymmetric(&m).unwrap();
        assert!(pairs.iter().all(|p| p.kind == EigenKind::ExtremalVector && p.value.norm() == 0.0));
        assert_eq!(pairs[0].vector, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(eigen_antisymmetric(&[vec![0.0, 1.0], vec![1.0, 0.0]]), Err(SpinorError::NotAntisymmetric));
        assert_eq!(eigen_antisymmetric(&vec![vec![0.0; 5]; 5]), Err(SpinorError::SizeUnsupported(5)));
    }

    #[test]
    fn full_rank_four_has_no_extremals() {
        let m = vec![
            vec![0.0, 1.0, 2.0, 0.5],
            vec![-1.0, 0.0, 0.3, -1.0],
            vec![-2.0, -0.3, 0.0, 0.7],
            vec![-0.5, 1.0, -0.7, 0.0],
        ];
        let pairs = eigen_antisymmetric(&m).unwrap();
        assert!(pairs.iter().all(|p| p.kind == EigenKind::Spinor));
        for p in &pairs {
            assert!(is_isotropic(&p.vector));
        }
    }

    #[test]
    fn degenerate_pair() {
        // μ = 1 twice: two-dimensional eigenspaces
        let m = vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0, 0.0],
        ];
        let pairs = eigen_antisymmetric(&m).unwrap();
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().all(|p| p.degenerate && p.kind == EigenKind::Spinor));
    }
}
