//! Canonical symbolic expressions.
//!
//! Every [`Expr`] is kept in one normal form: an expanded sum of terms, each term a
//! complex-rational coefficient times a product of atom powers. Atoms are variables,
//! elementary functions of a canonical argument, abstract function symbols (with the
//! multiset of partial derivatives applied to them) and reciprocals of multi-term sums.
//! Terms and atoms are sorted by a fixed total order, so two expressions that normalise to
//! the same form compare equal with `==`.
//!
//! The normal form also applies these rewrites:
//! - `i^2 = -1` (the imaginary unit lives in the coefficient field),
//! - `cos(u)^k = cos(u)^(k-2) (1 - sin(u)^2)` for `k >= 2`,
//! - `exp(a) exp(b) = exp(a + b)`, `exp(n ln w) = w^n`, `ln(exp u) = u`,
//! - `sin(-u) = -sin(u)`, `cos(-u) = cos(u)`, and the values at zero.

// `Expr` keys carry a lazily filled cache that does not take part in ordering.
#![allow(clippy::mutable_key_type)]

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use super::number::CRational;

/// Application of an abstract function symbol, possibly differentiated.
///
/// `partials` holds argument slots (0-based), sorted, one entry per derivative taken.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncApp {
    pub name: Arc<str>,
    pub args: Vec<Expr>,
    pub partials: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(Arc<str>),
    Func(Arc<FuncApp>),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
    Ln(Expr),
    /// `1 / p` for a multi-term sum `p` whose first coefficient is 1.
    Recip(Expr),
}

pub(crate) type Mono = Vec<(Atom, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Term {
    pub(crate) mono: Mono,
    pub(crate) coeff: CRational,
}

#[derive(Debug)]
pub(crate) struct Node {
    pub(crate) terms: Vec<Term>,
    /// Cache derived from `terms`; never read by `Eq`, `Ord` or `Hash`.
    vars: OnceLock<Arc<BTreeSet<Arc<str>>>>,
}

/// A canonical symbolic scalar expression. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Expr(pub(crate) Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.terms == other.0.terms
    }
}
impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.terms.cmp(&other.0.terms)
    }
}
impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.terms.hash(state)
    }
}

type Acc = BTreeMap<Mono, CRational>;

fn acc_add(acc: &mut Acc, mono: Mono, coeff: CRational) {
    if coeff.is_zero() {
        return;
    }
    match acc.entry(mono) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &coeff;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

fn merge_monos(a: &Mono, b: &Mono) -> Mono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn needs_normalizing(mono: &Mono) -> bool {
    let mut exps = 0;
    for (atom, e) in mono {
        match atom {
            Atom::Exp(_) => {
                exps += 1;
                if *e != 1 || exps > 1 {
                    return true;
                }
            }
            Atom::Cos(_) if *e >= 2 => return true,
            Atom::Recip(_) if *e < 0 => return true,
            _ => {}
        }
    }
    false
}

/// Adds `coeff * mono` to the accumulator, applying the monomial rewrites.
fn acc_add_mono(acc: &mut Acc, mono: Mono, coeff: CRational) {
    if coeff.is_zero() {
        return;
    }
    if !needs_normalizing(&mono) {
        acc_add(acc, mono, coeff);
        return;
    }
    let mut rest: Mono = Vec::new();
    let mut exp_arg = Expr::zero();
    let mut factors: Vec<Expr> = Vec::new();
    for (atom, e) in mono {
        match atom {
            Atom::Exp(u) => exp_arg = &exp_arg + &(&u * &Expr::int(e)),
            Atom::Cos(u) if e >= 2 => {
                let s = Expr::from_atom(Atom::Sin(u.clone()));
                let one_minus = &Expr::one() - &(&s * &s);
                for _ in 0..e / 2 {
                    factors.push(one_minus.clone());
                }
                if e % 2 == 1 {
                    rest.push((Atom::Cos(u), 1));
                }
            }
            Atom::Recip(p) if e < 0 => factors.push(p.powi(-e)),
            other => rest.push((other, e)),
        }
    }
    // `rest` is still sorted because we only removed entries or kept cos with a lower power.
    if !exp_arg.is_zero() {
        factors.push(Expr::exp(&exp_arg));
    }
    let mut result = Expr::from_terms(vec![Term { mono: rest, coeff }]);
    for f in factors {
        result = &result * &f;
    }
    for t in result.0.terms.iter() {
        acc_add(acc, t.mono.clone(), t.coeff.clone());
    }
}

impl Expr {
    pub(crate) fn from_terms(terms: Vec<Term>) -> Expr {
        Expr(Arc::new(Node { terms, vars: OnceLock::new() }))
    }

    fn from_acc(acc: Acc) -> Expr {
        Expr::from_terms(acc.into_iter().map(|(mono, coeff)| Term { mono, coeff }).collect())
    }

    pub(crate) fn from_atom(atom: Atom) -> Expr {
        Expr::from_terms(vec![Term { mono: vec![(atom, 1)], coeff: CRational::one() }])
    }

    pub(crate) fn terms(&self) -> &[Term] {
        &self.0.terms
    }

    pub fn zero() -> Expr {
        Expr::from_terms(Vec::new())
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(CRational::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::constant(CRational::ratio(n, d))
    }

    /// The imaginary unit `i`.
    pub fn imag() -> Expr {
        Expr::constant(CRational::imag_unit())
    }

    pub fn constant(c: CRational) -> Expr {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr::from_terms(vec![Term { mono: Vec::new(), coeff: c }])
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_atom(Atom::Var(Arc::from(name)))
    }

    /// Abstract function symbol applied to `args`.
    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        Expr::from_atom(Atom::Func(Arc::new(FuncApp { name: Arc::from(name), args, partials: Vec::new() })))
    }

    /// Formal partial derivative of an abstract function: `partials` are argument slots.
    pub fn func_partial(name: &str, args: Vec<Expr>, mut partials: Vec<usize>) -> Expr {
        partials.sort_unstable();
        Expr::from_atom(Atom::Func(Arc::new(FuncApp { name: Arc::from(name), args, partials })))
    }

    pub fn exp(u: &Expr) -> Expr {
        if u.is_zero() {
            return Expr::one();
        }
        if let [t] = u.terms() {
            if let [(Atom::Ln(w), 1)] = t.mono.as_slice() {
                if let Some(n) = t.coeff.as_i64() {
                    return w.powi(n);
                }
            }
        }
        Expr::from_atom(Atom::Exp(u.clone()))
    }

    pub fn ln(u: &Expr) -> Expr {
        if u.is_one() {
            return Expr::zero();
        }
        if let [t] = u.terms() {
            if t.coeff.is_one() {
                if let [(Atom::Exp(w), 1)] = t.mono.as_slice() {
                    return w.clone();
                }
            }
        }
        Expr::from_atom(Atom::Ln(u.clone()))
    }

    pub fn sin(u: &Expr) -> Expr {
        if u.is_zero() {
            return Expr::zero();
        }
        if u.leading_negative() {
            return -Expr::from_atom(Atom::Sin(-u));
        }
        Expr::from_atom(Atom::Sin(u.clone()))
    }

    pub fn cos(u: &Expr) -> Expr {
        if u.is_zero() {
            return Expr::one();
        }
        if u.leading_negative() {
            return Expr::from_atom(Atom::Cos(-u));
        }
        Expr::from_atom(Atom::Cos(u.clone()))
    }

    fn leading_negative(&self) -> bool {
        self.terms().first().is_some_and(|t| t.coeff.is_negative_leading())
    }

    pub fn is_zero(&self) -> bool {
        self.terms().is_empty()
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms(), [t] if t.mono.is_empty() && t.coeff.is_one())
    }

    /// The constant value, if the expression has no atoms.
    pub fn as_constant(&self) -> Option<CRational> {
        match self.terms() {
            [] => Some(CRational::zero()),
            [t] if t.mono.is_empty() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Name of the variable, if the expression is exactly one variable.
    pub fn as_var(&self) -> Option<&str> {
        match self.terms() {
            [t] if t.coeff.is_one() => match t.mono.as_slice() {
                [(Atom::Var(n), 1)] => Some(n),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms().len()
    }

    /// Integer power. Negative powers of a zero expression are undefined and return `None`.
    pub fn checked_powi(&self, n: i64) -> Option<Expr> {
        if n == 0 {
            return Some(Expr::one());
        }
        if n == 1 {
            return Some(self.clone());
        }
        match self.terms() {
            [] => {
                if n > 0 {
                    Some(Expr::zero())
                } else {
                    None
                }
            }
            [t] => {
                let coeff = t.coeff.powi(n)?;
                let mono: Mono = t.mono.iter().map(|(a, e)| (a.clone(), e * n)).collect();
                let mut acc = Acc::new();
                acc_add_mono(&mut acc, mono, coeff);
                Some(Expr::from_acc(acc))
            }
            terms => {
                if n > 0 {
                    let mut base = self.clone();
                    let mut acc = Expr::one();
                    let mut e = n as u64;
                    while e > 0 {
                        if e & 1 == 1 {
                            acc = &acc * &base;
                        }
                        e >>= 1;
                        if e > 0 {
                            base = &base * &base;
                        }
                    }
                    Some(acc)
                } else {
                    let lead = terms[0].coeff.clone();
                    let lead_inv = lead.inv()?;
                    let monic = self * &Expr::constant(lead_inv);
                    let c = lead.powi(n)?;
                    let mono = vec![(Atom::Recip(monic), -n)];
                    Some(Expr::from_terms(vec![Term { mono, coeff: c }]))
                }
            }
        }
    }

    /// Integer power; panics on a negative power of zero.
    pub fn powi(&self, n: i64) -> Expr {
        self.checked_powi(n).expect("negative power of a zero expression")
    }

    pub fn checked_recip(&self) -> Option<Expr> {
        self.checked_powi(-1)
    }

    pub fn checked_div(&self, rhs: &Expr) -> Option<Expr> {
        Some(self * &rhs.checked_recip()?)
    }

    pub fn scale(&self, c: &CRational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::from_terms(
            self.terms().iter().map(|t| Term { mono: t.mono.clone(), coeff: &t.coeff * c }).collect(),
        )
    }

    /// Variables appearing anywhere in the expression (including inside function arguments).
    pub fn free_vars(&self) -> Arc<BTreeSet<Arc<str>>> {
        self.0
            .vars
            .get_or_init(|| {
                let mut set = BTreeSet::new();
                for t in self.terms() {
                    for (a, _) in &t.mono {
                        a.collect_vars(&mut set);
                    }
                }
                Arc::new(set)
            })
            .clone()
    }

    pub fn depends_on(&self, v: &str) -> bool {
        self.free_vars().contains(v)
    }

    /// Abstract function symbols used, with their arities.
    pub fn functions(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.collect_functions(&mut out);
        out
    }

    fn collect_functions(&self, out: &mut BTreeMap<String, usize>) {
        for t in self.terms() {
            for (a, _) in &t.mono {
                match a {
                    Atom::Var(_) => {}
                    Atom::Func(app) => {
                        out.insert(app.name.to_string(), app.args.len());
                        for arg in &app.args {
                            arg.collect_functions(out);
                        }
                    }
                    Atom::Exp(u) | Atom::Sin(u) | Atom::Cos(u) | Atom::Ln(u) | Atom::Recip(u) => {
                        u.collect_functions(out)
                    }
                }
            }
        }
    }

    /// Partial derivative with respect to the variable `v`.
    pub fn diff(&self, v: &str) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        let mut acc = Acc::new();
        for t in self.terms() {
            for (i, (atom, e)) in t.mono.iter().enumerate() {
                let da = atom.diff(v);
                if da.is_zero() {
                    continue;
                }
                let mut rest = t.mono.clone();
                if *e == 1 {
                    rest.remove(i);
                } else {
                    rest[i].1 = e - 1;
                }
                let coeff = &t.coeff * &CRational::from_int(*e);
                let mut part = Acc::new();
                acc_add_mono(&mut part, rest, coeff);
                let prod = &Expr::from_acc(part) * &da;
                for pt in prod.terms() {
                    acc_add(&mut acc, pt.mono.clone(), pt.coeff.clone());
                }
            }
        }
        Expr::from_acc(acc)
    }

    /// Rebuilds the expression with variables replaced per `map`.
    ///
    /// Panics if a substituted denominator becomes zero; use [`Expr::try_subst`] when that can happen.
    pub fn subst(&self, map: &BTreeMap<String, Expr>) -> Expr {
        self.try_subst(map).expect("substitution produced a zero denominator")
    }

    /// Like [`Expr::subst`], returning `None` when a denominator collapses to zero.
    pub fn try_subst(&self, map: &BTreeMap<String, Expr>) -> Option<Expr> {
        if map.is_empty() || !self.free_vars().iter().any(|v| map.contains_key(v.as_ref())) {
            return Some(self.clone());
        }
        self.rebuild_with(&|name| map.get(name).cloned())
    }

    /// Re-derives the canonical form from scratch through the public constructors.
    pub fn rebuild(&self) -> Expr {
        self.rebuild_with(&|_| None).expect("canonical denominators are non-zero")
    }

    fn rebuild_with(&self, f: &dyn Fn(&str) -> Option<Expr>) -> Option<Expr> {
        let mut sum = Expr::zero();
        for t in self.terms() {
            let mut prod = Expr::constant(t.coeff.clone());
            for (a, e) in &t.mono {
                let base = match a {
                    Atom::Var(n) => f(n).unwrap_or_else(|| Expr::var(n)),
                    Atom::Func(app) => {
                        let args = app.args.iter().map(|x| x.rebuild_with(f)).collect::<Option<Vec<_>>>()?;
                        Expr::func_partial(&app.name, args, app.partials.clone())
                    }
                    Atom::Exp(u) => Expr::exp(&u.rebuild_with(f)?),
                    Atom::Sin(u) => Expr::sin(&u.rebuild_with(f)?),
                    Atom::Cos(u) => Expr::cos(&u.rebuild_with(f)?),
                    Atom::Ln(u) => Expr::ln(&u.rebuild_with(f)?),
                    Atom::Recip(u) => u.rebuild_with(f)?.checked_recip()?,
                };
                prod = &prod * &base.checked_powi(*e)?;
            }
            sum = &sum + &prod;
        }
        Some(sum)
    }
}

impl Atom {
    fn collect_vars(&self, set: &mut BTreeSet<Arc<str>>) {
        match self {
            Atom::Var(n) => {
                set.insert(n.clone());
            }
            Atom::Func(app) => {
                for a in &app.args {
                    set.extend(a.free_vars().iter().cloned());
                }
            }
            Atom::Exp(u) | Atom::Sin(u) | Atom::Cos(u) | Atom::Ln(u) | Atom::Recip(u) => {
                set.extend(u.free_vars().iter().cloned())
            }
        }
    }

    fn diff(&self, v: &str) -> Expr {
        match self {
            Atom::Var(n) => {
                if n.as_ref() == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Atom::Func(app) => {
                let mut out = Expr::zero();
                for (j, arg) in app.args.iter().enumerate() {
                    let da = arg.diff(v);
                    if da.is_zero() {
                        continue;
                    }
                    let mut partials = app.partials.clone();
                    partials.push(j);
                    let f = Expr::func_partial(&app.name, app.args.clone(), partials);
                    out = &out + &(&f * &da);
                }
                out
            }
            Atom::Exp(u) => &Expr::from_atom(self.clone()) * &u.diff(v),
            Atom::Sin(u) => &Expr::cos(u) * &u.diff(v),
            Atom::Cos(u) => -(&Expr::sin(u) * &u.diff(v)),
            Atom::Ln(u) => {
                let du = u.diff(v);
                if du.is_zero() {
                    Expr::zero()
                } else {
                    &du * &u.powi(-1)
                }
            }
            Atom::Recip(p) => {
                let dp = p.diff(v);
                if dp.is_zero() {
                    return Expr::zero();
                }
                let r = Expr::from_atom(self.clone());
                -(&(&r * &r) * &dp)
            }
        }
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b) = (self.terms(), rhs.terms());
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].mono.cmp(&b[j].mono) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].coeff + &b[j].coeff;
                    if !c.is_zero() {
                        out.push(Term { mono: a[i].mono.clone(), coeff: c });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Expr::from_terms(out)
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut acc = Acc::new();
        for a in self.terms() {
            for b in rhs.terms() {
                let mono = merge_monos(&a.mono, &b.mono);
                acc_add_mono(&mut acc, mono, &a.coeff * &b.coeff);
            }
        }
        Expr::from_acc(acc)
    }
}

impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by a zero expression")
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&CRational::from_int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| &a + &b)
    }
}
