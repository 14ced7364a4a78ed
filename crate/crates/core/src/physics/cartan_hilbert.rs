//! The Cartan–Hilbert action `A = L dt + Σ p_k (dq^k - v^k dt)` and its top Pfaffian.

use super::PhysicsError;
use crate::exterior::{d, wedge, DifferentialForm, Variety};
use crate::symbolic::{is_zero, Expr, SamplerConfig, ZeroVerdict};
use crate::thermo::{form_is_zero, ptd};

/// Coordinates `q.., v.., p.., t`; unsuffixed names when `n = 1`.
pub fn cartan_hilbert_variety(n: usize) -> Result<Variety, PhysicsError> {
    if !(1..=2).contains(&n) {
        return Err(PhysicsError::SizeUnsupported(n));
    }
    let names = |base: &str| -> Vec<String> {
        if n == 1 {
            vec![base.to_string()]
        } else {
            (1..=n).map(|k| format!("{base}{k}")).collect()
        }
    };
    let mut all = names("q");
    all.extend(names("v"));
    all.extend(names("p"));
    all.push("t".into());
    Ok(Variety::new(&all)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartanHilbertReport {
    pub n: usize,
    pub lagrangian: Expr,
    pub action: DifferentialForm,
    /// `(dA)^{n+1}`
    pub top: DifferentialForm,
    pub top_verdict: ZeroVerdict,
    /// `A∧(dA)^{n+1}`
    pub closure: DifferentialForm,
    pub closure_verdict: ZeroVerdict,
    /// `Σ (∂L/∂v^k - p_k) dv^k`
    pub momentum_defect: DifferentialForm,
    /// `(dA)^{n+1} - (n+1)! defect∧dp_1∧dq^1∧…∧dp_n∧dq^n∧dt`
    pub factorization_verdict: ZeroVerdict,
    /// `(dA)^{n+1}` after `p_k = ∂L/∂v^k`.
    pub canonical_top_verdict: ZeroVerdict,
    pub ptd: usize,
}

impl CartanHilbertReport {
    pub fn rank(&self) -> usize {
        2 * self.n + 2
    }

    pub fn all_hold(&self) -> bool {
        self.top_verdict.is_nonzero()
            && self.closure_verdict.is_zero()
            && self.factorization_verdict.is_zero()
            && self.canonical_top_verdict.is_zero()
            && self.ptd == self.rank()
    }
}

/// Default Lagrangian `Σ (v^k)²/2`.
pub fn free_lagrangian(variety: &Variety, n: usize) -> Expr {
    (0..n).map(|k| &variety.coord(n + k).powi(2) * &Expr::ratio(1, 2)).sum()
}

fn action(variety: &Variety, n: usize, lagrangian: &Expr, momenta: &[Expr]) -> DifferentialForm {
    let mut coeffs = vec![Expr::zero(); 3 * n + 1];
    let mut dt = lagrangian.clone();
    for k in 0..n {
        coeffs[k] = momenta[k].clone();
        dt = &dt - &(&momenta[k] * &variety.coord(n + k));
    }
    coeffs[3 * n] = dt;
    DifferentialForm::one_form(variety, &coeffs)
}

fn power(f: &DifferentialForm, k: usize) -> Result<DifferentialForm, PhysicsError> {
    let mut acc = f.clone();
    for _ in 1..k {
        acc = wedge(&acc, f)?;
    }
    Ok(acc)
}

/// Builds the action for `n` degrees of freedom and checks that its top Pfaffian has degree
/// `2n + 2`. `lagrangian` defaults to `Σ (v^k)²/2`.
pub fn cartan_hilbert(
    n: usize,
    lagrangian: Option<Expr>,
    cfg: &SamplerConfig,
) -> Result<CartanHilbertReport, PhysicsError> {
    let variety = cartan_hilbert_variety(n)?;
    let lagrangian = lagrangian.unwrap_or_else(|| free_lagrangian(&variety, n));
    let momenta: Vec<Expr> = (0..n).map(|k| variety.coord(2 * n + k)).collect();
    let a = action(&variety, n, &lagrangian, &momenta);
    let da = d(&a);
    let top = power(&da, n + 1)?;
    let closure = wedge(&a, &top)?;

    let defect = DifferentialForm::from_terms(
        &variety,
        1,
        (0..n).map(|k| (vec![n + k], &lagrangian.diff(variety.name(n + k)) - &momenta[k])),
    );
    let mut omega = DifferentialForm::scalar(&variety, Expr::int(factorial(n + 1)));
    for k in (0..n).flat_map(|k| [2 * n + k, k]).chain(std::iter::once(3 * n)) {
        omega = wedge(&omega, &variety.differential(k))?;
    }
    let factored = wedge(&defect, &omega)?;

    let canonical: Vec<Expr> = (0..n).map(|k| lagrangian.diff(variety.name(n + k))).collect();
    let canonical_top = power(&d(&action(&variety, n, &lagrangian, &canonical)), n + 1)?;

    Ok(CartanHilbertReport {
        n,
        top_verdict: form_is_zero(&top, cfg),
        closure_verdict: form_is_zero(&closure, cfg),
        factorization_verdict: form_is_zero(&top.sub(&factored)?, cfg),
        canonical_top_verdict: form_is_zero(&canonical_top, cfg),
        ptd: ptd(&a, None, cfg)?.ptd,
        momentum_defect: defect,
        lagrangian,
        action: a,
        top,
        closure,
    })
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Zero test of a scalar after the canonical momentum substitution, for callers that build
/// their own Lagrangians.
pub fn momentum_defect_vanishes(report: &CartanHilbertReport, cfg: &SamplerConfig) -> bool {
    let n = report.n;
    let v = report.action.variety();
    let map = (0..n).map(|k| (v.name(2 * n + k).to_string(), report.lagrangian.diff(v.name(n + k)))).collect();
    report.momentum_defect.coefficients().all(|c| is_zero(&c.subst(&map), cfg).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_expr;

    #[test]
    fn free_particle_one_dof() {
        let r = cartan_hilbert(1, None, &SamplerConfig::default()).unwrap();
        assert!(r.all_hold(), "{r:?}");
        assert_eq!(r.top.len(), 1);
        assert!(momentum_defect_vanishes(&r, &SamplerConfig::default()));
    }

    #[test]
    fn two_dof_with_potential() {
        let l = parse_expr("(v1^2 + v2^2)/2 - q1*q2 + t*v1", &["q1", "q2", "v1", "v2", "t"]).unwrap();
        let r = cartan_hilbert(2, Some(l), &SamplerConfig::default()).unwrap();
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn size_bounds() {
        assert!(matches!(cartan_hilbert(3, None, &SamplerConfig::default()), Err(PhysicsError::SizeUnsupported(3))));
        assert!(matches!(cartan_hilbert_variety(0), Err(PhysicsError::SizeUnsupported(0))));
    }
}
