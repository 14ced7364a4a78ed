//! Pfaff sequences, Pfaff topological dimension, torsion vectors and thermodynamic processes.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exterior::{d, interior, lie, wedge, DifferentialForm, DirectionField, ExteriorError};
use crate::symbolic::{is_zero, CRational, Confidence, Expr, Point, SamplerConfig, ZeroStatus, ZeroVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("point `{0}` makes a denominator vanish")]
    DomainError(String),
    #[error("`{0}` is not a coordinate or parameter of this system")]
    UnboundVariable(String),
}

/// Thermodynamic class of a system by the Pfaff dimension of its action 1-form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermoClass {
    Equilibrium,
    Isolated,
    Closed,
    Open,
    Higher,
}

pub fn thermo_class(ptd: usize) -> Option<ThermoClass> {
    match ptd {
        0 => None,
        1 => Some(ThermoClass::Equilibrium),
        2 => Some(ThermoClass::Isolated),
        3 => Some(ThermoClass::Closed),
        4 => Some(ThermoClass::Open),
        _ => Some(ThermoClass::Higher),
    }
}

/// `[A, dA, A∧dA, dA∧dA, A∧dA∧dA, …]` up to degree n.
pub fn pfaff_sequence(a: &DifferentialForm) -> Result<Vec<DifferentialForm>, ThermoError> {
    if a.degree() != 1 {
        return Err(ExteriorError::DegreeError { expected: 1, found: a.degree() }.into());
    }
    let n = a.variety().dim();
    let da = d(a);
    let mut out = vec![a.clone()];
    if n >= 2 {
        out.push(da.clone());
    }
    let mut power = da.clone();
    let mut k = 1;
    loop {
        if 2 * k < n {
            out.push(wedge(a, &power)?);
        } else {
            break;
        }
        if 2 * k + 2 <= n {
            power = wedge(&power, &da)?;
            out.push(power.clone());
        } else {
            break;
        }
        k += 1;
    }
    Ok(out)
}

fn combine(verdicts: impl IntoIterator<Item = ZeroVerdict>, seed: u64) -> ZeroVerdict {
    let mut out = ZeroVerdict::exact_zero(seed);
    let mut unknown = false;
    for v in verdicts {
        match v.status {
            ZeroStatus::NonZero => return v,
            ZeroStatus::Unknown => unknown = true,
            ZeroStatus::Zero => {
                out.confidence = out.confidence.max(v.confidence);
                out.samples = out.samples.max(v.samples);
            }
        }
    }
    if unknown {
        out.status = ZeroStatus::Unknown;
        out.confidence = Confidence::Probabilistic;
    }
    out
}

/// Whether every coefficient of `f` vanishes.
pub fn form_is_zero(f: &DifferentialForm, cfg: &SamplerConfig) -> ZeroVerdict {
    combine(f.coefficients().map(|c| is_zero(c, cfg)), cfg.seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainScan {
    pub max_ptd: usize,
    /// Sample points where the pointwise dimension is below the maximum.
    pub drops: Vec<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfaffReport {
    pub sequence: Vec<DifferentialForm>,
    pub verdicts: Vec<ZeroVerdict>,
    pub ptd: usize,
    pub class: Option<ThermoClass>,
    pub point: Option<Point>,
    pub confidence: Confidence,
    /// NonZero elements form a prefix of the sequence.
    pub monotone: bool,
    pub domain: Option<DomainScan>,
    pub notes: Vec<String>,
}

fn substitute_point(f: &DifferentialForm, p: &Point) -> Result<DifferentialForm, ThermoError> {
    let map = p.exact_bindings();
    f.try_map_coeffs(|c| c.try_subst(&map)).ok_or_else(|| ThermoError::DomainError(describe_point(p)))
}

fn describe_point(p: &Point) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn ptd_of(verdicts: &[ZeroVerdict]) -> (usize, bool) {
    let last = verdicts.iter().rposition(ZeroVerdict::is_nonzero).map_or(0, |k| k + 1);
    let prefix = verdicts.iter().take_while(|v| v.is_nonzero()).count();
    (last, last == prefix)
}

/// Pfaff topological dimension, optionally at a point.
///
/// At a point the sequence is specialised by exact substitution before zero testing; any
/// abstract functions that remain are sampled. Without a point and with no abstract
/// functions, a domain scan over the sampler's points is attached.
pub fn ptd(a: &DifferentialForm, at: Option<&Point>, cfg: &SamplerConfig) -> Result<PfaffReport, ThermoError> {
    let sequence = pfaff_sequence(a)?;
    let mut notes = Vec::new();
    let tested: Vec<DifferentialForm> = match at {
        Some(p) => sequence.iter().map(|f| substitute_point(f, p)).collect::<Result<_, _>>()?,
        None => sequence.clone(),
    };
    let verdicts: Vec<ZeroVerdict> = tested.iter().map(|f| form_is_zero(f, cfg)).collect();
    let (ptd, monotone) = ptd_of(&verdicts);
    if !monotone {
        notes.push("non-monotone vanishing in the Pfaff sequence (sampling artefact or engine bug)".into());
    }
    let n = a.variety().dim();
    let class = thermo_class(ptd);
    if n != 4 && class.is_some() {
        notes.push(format!("topological classes are defined for 4 variables; this variety has {n}"));
    }
    let confidence = verdicts.iter().map(|v| v.confidence).max().unwrap_or(Confidence::Exact);
    let no_functions = a.coefficients().all(|c| c.functions().is_empty());
    let domain = if at.is_none() && no_functions { Some(domain_scan(&sequence, cfg)) } else { None };
    Ok(PfaffReport { sequence, verdicts, ptd, class, point: at.cloned(), confidence, monotone, domain, notes })
}

fn domain_scan(sequence: &[DifferentialForm], cfg: &SamplerConfig) -> DomainScan {
    let mut vars = std::collections::BTreeSet::new();
    for f in sequence {
        for c in f.coefficients() {
            vars.extend(c.free_vars().iter().map(|v| v.to_string()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_d0a1);
    let mut points = Vec::new();
    for _ in 0..cfg.samples {
        let mut p = Point::new();
        for v in &vars {
            // include 0 so coordinate hyperplanes are hit
            let k = rng.gen_range(cfg.lo * 4..=cfg.hi * 4);
            p.set(v, CRational::ratio(k, 4));
        }
        points.push(p);
    }
    let mut results = Vec::new();
    for p in &points {
        let mut verdicts = Vec::new();
        for f in sequence {
            let nonzero = f.coefficients().any(|c| {
                crate::symbolic::eval(c, p).map(|v| !v.is_zero_within(cfg.threshold)).unwrap_or(false)
            });
            verdicts.push(nonzero);
        }
        let ptd = verdicts.iter().rposition(|&b| b).map_or(0, |k| k + 1);
        results.push(ptd);
    }
    let max_ptd = results.iter().copied().max().unwrap_or(0);
    let drops = points
        .iter()
        .zip(&results)
        .filter(|(_, &r)| r < max_ptd)
        .map(|(p, _)| p.iter().map(|(k, v)| (k.clone(), v.to_string())).collect())
        .collect();
    DomainScan { max_ptd, drops }
}

/// Torsion vector `T` with `i(T)Ω = A∧dA` on a 4-variable variety.
pub fn torsion_vector(a: &DifferentialForm) -> Result<DirectionField, ThermoError> {
    let v = a.variety();
    v.check_dim(4)?;
    if a.degree() != 1 {
        return Err(ExteriorError::DegreeError { expected: 1, found: a.degree() }.into());
    }
    let three = wedge(a, &d(a))?;
    let comps = (0..4)
        .map(|m| {
            let rest: Vec<usize> = (0..4).filter(|&k| k != m).collect();
            let c = three.coeff(&rest);
            if m % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    Ok(DirectionField::new(v, comps)?)
}

/// `Σ ∂_m T^m` over the variety's coordinates.
pub fn divergence(t: &DirectionField) -> Expr {
    let v = t.variety();
    (0..v.dim()).map(|m| t.scaled(m).diff(v.name(m))).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaReport {
    /// Half the volume coefficient of `dA∧dA`.
    pub sigma: Expr,
    pub div_torsion: Expr,
    /// `dA∧dA = d(A∧dA) = (div T) Ω` holds structurally.
    pub identity_holds: bool,
}

pub fn sigma(a: &DifferentialForm) -> Result<SigmaReport, ThermoError> {
    let v = a.variety();
    v.check_dim(4)?;
    let da = d(a);
    let parity = wedge(&da, &da)?;
    let top = parity.coeff(&[0, 1, 2, 3]);
    let sigma = &top * &Expr::ratio(1, 2);
    let t = torsion_vector(a)?;
    let div_torsion = divergence(&t);
    let via_d = d(&wedge(a, &da)?);
    let identity_holds = via_d == parity && (&top - &div_torsion).is_zero();
    Ok(SigmaReport { sigma, div_torsion, identity_holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub verdict: ZeroVerdict,
}

/// The five torsion identities, each as a zero test on the canonical difference.
pub fn torsion_property_check(a: &DifferentialForm, cfg: &SamplerConfig) -> Result<Vec<PropertyCheck>, ThermoError> {
    let t = torsion_vector(a)?;
    let s = sigma(a)?;
    let parts = lie(&t, a)?;
    let da = d(a);
    let a_da = wedge(a, &da)?;
    let q_dq = wedge(&parts.heat, &d(&parts.heat))?;
    let vol = a.variety().volume();
    let checks = [
        ("i(T)A = 0", parts.energy.clone()),
        ("W - sigma*A = 0", parts.work.sub(&a.scale(&s.sigma))?),
        ("Q^dQ - sigma^2*A^dA = 0", q_dq.sub(&a_da.scale(&(&s.sigma * &s.sigma)))?),
        ("i(T)Q = 0", interior(&t, &parts.heat)?),
        ("d(A^dA) - div(T)*vol = 0", d(&a_da).sub(&vol.scale(&s.div_torsion))?),
    ];
    Ok(checks
        .into_iter()
        .map(|(name, f)| PropertyCheck { name: name.to_string(), verdict: form_is_zero(&f, cfg) })
        .collect())
}

/// `σ` with `W = σ A`, if one exists.
pub fn find_proportionality(w: &DifferentialForm, a: &DifferentialForm, cfg: &SamplerConfig) -> Option<Expr> {
    if w.variety() != a.variety() || w.degree() != 1 || a.degree() != 1 {
        return None;
    }
    let (wc, ac) = (w.components(), a.components());
    let ratio = if w.is_zero() {
        Expr::zero()
    } else {
        let k = (0..wc.len()).find(|&k| !wc[k].is_zero() && !ac[k].is_zero())?;
        wc[k].checked_div(&ac[k])?
    };
    let consistent = wc.iter().zip(&ac).all(|(wk, ak)| is_zero(&(wk - &(&ratio * ak)), cfg).is_zero());
    consistent.then_some(ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessClass {
    Associated,
    Extremal,
    Characteristic,
    Helmholtz,
    /// `dW = 0`; a global potential is not constructed.
    BernoulliClosed,
    Adiabatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessReport {
    pub energy: DifferentialForm,
    pub work: DifferentialForm,
    pub heat: DifferentialForm,
    pub d_work: DifferentialForm,
    pub d_heat: DifferentialForm,
    pub heat_twist: DifferentialForm,
    pub work_twist: DifferentialForm,
    pub classes: Vec<ProcessClass>,
    /// Zero test of `Q∧dQ`; Zero means reversible.
    pub reversible: ZeroVerdict,
    pub notes: Vec<String>,
}

impl ProcessReport {
    pub fn is_reversible(&self) -> bool {
        self.reversible.is_zero()
    }

    pub fn has(&self, c: ProcessClass) -> bool {
        self.classes.contains(&c)
    }
}

/// First-law decomposition `Q = W + dU` of the process `V` acting on the action `A`.
pub fn first_law(a: &DifferentialForm, v: &DirectionField, cfg: &SamplerConfig) -> Result<ProcessReport, ThermoError> {
    let parts = lie(v, a)?;
    let d_work = d(&parts.work);
    let d_heat = d(&parts.heat);
    let heat_twist = wedge(&parts.heat, &d_heat)?;
    let work_twist = wedge(&parts.work, &d_work)?;
    let mut classes = Vec::new();
    let mut notes = Vec::new();
    let associated = form_is_zero(&parts.energy, cfg).is_zero();
    let extremal = form_is_zero(&parts.work, cfg).is_zero();
    if associated {
        classes.push(ProcessClass::Associated);
    }
    if extremal {
        classes.push(ProcessClass::Extremal);
    }
    if associated && extremal {
        classes.push(ProcessClass::Characteristic);
    }
    if form_is_zero(&d_work, cfg).is_zero() {
        classes.push(ProcessClass::Helmholtz);
        classes.push(ProcessClass::BernoulliClosed);
        notes.push("W is closed; potential construction not attempted".into());
    }
    if form_is_zero(&interior(v, &parts.heat)?, cfg).is_zero() {
        classes.push(ProcessClass::Adiabatic);
    }
    let reversible = form_is_zero(&heat_twist, cfg);
    Ok(ProcessReport {
        energy: parts.energy,
        work: parts.work,
        heat: parts.heat,
        d_work,
        d_heat,
        heat_twist,
        work_twist,
        classes,
        reversible,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Variety;

    fn contact() -> DifferentialForm {
        let v = Variety::new(&["x", "y", "z"]).unwrap();
        DifferentialForm::one_form(&v, &[Expr::zero(), Expr::var("x"), Expr::one()])
    }

    #[test]
    fn table_one() {
        assert_eq!(thermo_class(0), None);
        assert_eq!(thermo_class(1), Some(ThermoClass::Equilibrium));
        assert_eq!(thermo_class(2), Some(ThermoClass::Isolated));
        assert_eq!(thermo_class(3), Some(ThermoClass::Closed));
        assert_eq!(thermo_class(4), Some(ThermoClass::Open));
        assert_eq!(thermo_class(7), Some(ThermoClass::Higher));
    }

    #[test]
    fn contact_form_is_closed_class() {
        let a = contact();
        let seq = pfaff_sequence(&a).unwrap();
        assert_eq!(seq.len(), 3);
        let r = ptd(&a, None, &SamplerConfig::default()).unwrap();
        assert_eq!(r.ptd, 3);
        assert_eq!(r.class, Some(ThermoClass::Closed));
        assert_eq!(r.confidence, Confidence::Exact);
        assert!(r.monotone);
    }

    #[test]
    fn exact_form_has_dimension_one() {
        let v = Variety::new(&["x", "y", "z"]).unwrap();
        let r = ptd(&v.differential(2), None, &SamplerConfig::default()).unwrap();
        assert_eq!(r.ptd, 1);
    }

    #[test]
    fn pointwise_dimension_drops() {
        let v = Variety::new(&["x", "y", "z"]).unwrap();
        let a = DifferentialForm::one_form(&v, &[Expr::zero(), Expr::var("x"), Expr::zero()]);
        let cfg = SamplerConfig::default();
        assert_eq!(ptd(&a, None, &cfg).unwrap().ptd, 2);
        let p = Point::new().with("x", CRational::zero()).with("y", CRational::one()).with("z", CRational::one());
        let r = ptd(&a, Some(&p), &cfg).unwrap();
        assert_eq!(r.ptd, 2);
        assert!(!r.monotone);
        assert!(r.verdicts[0].is_zero());
    }

    #[test]
    fn proportionality() {
        let v = Variety::new(&["x", "y", "z"]).unwrap();
        let x = Expr::var("x");
        let w = DifferentialForm::one_form(&v, &[Expr::zero(), &x * &Expr::int(2), Expr::zero()]);
        let a = DifferentialForm::one_form(&v, &[Expr::zero(), x.clone(), Expr::zero()]);
        let cfg = SamplerConfig::default();
        assert_eq!(find_proportionality(&w, &a, &cfg), Some(Expr::int(2)));
        let rho = Expr::var("rho");
        let w = DifferentialForm::one_form(&v, &[Expr::zero(), rho, Expr::zero()]);
        assert_eq!(find_proportionality(&w, &contact(), &cfg), None);
    }

    #[test]
    fn torsion_of_exact_form_vanishes() {
        let v = Variety::new(&["x", "y", "z", "t"]).unwrap();
        let t = torsion_vector(&v.differential(3)).unwrap();
        assert!(t.is_zero());
        assert!(torsion_vector(&contact()).is_err());
    }
}
