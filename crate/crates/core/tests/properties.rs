use std::collections::BTreeMap;

use num_complex::Complex64;
use pfaff_core::exterior::{
    d, form_from_matrix, interior, lie_derivative, matrix_of_2form, wedge, DifferentialForm, DirectionField, Variety,
};
use pfaff_core::spinor::{eigen_antisymmetric, is_isotropic, EigenKind};
use pfaff_core::symbolic::{eval, is_zero, Point, SamplerConfig};
use pfaff_core::{CRational, Expr};
use proptest::prelude::*;

const NAMES: [&str; 5] = ["x", "y", "z", "t", "s"];

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![(-3i64..=3).prop_map(Expr::int), (0usize..3).prop_map(|k| Expr::var(NAMES[k]))]
}

/// Smooth expressions of depth at most 6.
fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), 0i64..3).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| Expr::sin(&a)),
            inner.clone().prop_map(|a| Expr::cos(&a)),
            inner.prop_map(|a| Expr::exp(&a)),
        ]
    })
}

/// Polynomial in the first `n` coordinates with total degree at most `deg`.
fn poly(n: usize, deg: u32) -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0u32..=deg, n)), 1..4).prop_map(move |terms| {
        terms
            .into_iter()
            .map(|(c, exps)| {
                let mut budget = deg;
                let mut m = Expr::int(c);
                for (k, e) in exps.into_iter().enumerate() {
                    let e = e.min(budget);
                    budget -= e;
                    m = &m * &Expr::var(NAMES[k]).powi(e as i64);
                }
                m
            })
            .sum()
    })
}

fn variety(n: usize) -> Variety {
    Variety::new(&NAMES[..n]).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn form(n: usize, k: usize) -> impl Strategy<Value = DifferentialForm> {
    let slots = subsets(n, k);
    let count = slots.len();
    prop::collection::vec(poly(n, 3), count)
        .prop_map(move |cs| DifferentialForm::from_terms(&variety(n), k, slots.clone().into_iter().zip(cs)))
}

/// `(n, a, b)` with `deg a + deg b ≤ n`.
fn form_pair() -> impl Strategy<Value = (usize, DifferentialForm, DifferentialForm)> {
    (2usize..=4)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, p)| (Just(n), Just(p), 0..=n - p))
        .prop_flat_map(|(n, p, q)| (Just(n), form(n, p), form(n, q)))
}

fn field(n: usize) -> impl Strategy<Value = DirectionField> {
    prop::collection::vec(poly(n, 2), n).prop_map(move |c| DirectionField::new(&variety(n), c).unwrap())
}

fn sign(k: usize) -> Expr {
    Expr::int(if k % 2 == 0 { 1 } else { -1 })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn canonical_form_is_idempotent(e in expr()) {
        let once = e.rebuild();
        prop_assert_eq!(&once.rebuild(), &once);
        prop_assert_eq!(&once, &e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn diff_is_leibniz_and_linear(a in expr(), b in expr(), k in -3i64..=3) {
        let prod = &(&a * &b).diff("x") - &(&(&a.diff("x") * &b) + &(&a * &b.diff("x")));
        prop_assert!(is_zero(&prod, &SamplerConfig::default()).is_zero());
        let lin = &(&(&a * &Expr::int(k)) + &b).diff("y") - &(&(&a.diff("y") * &Expr::int(k)) + &b.diff("y"));
        prop_assert!(lin.is_zero());
    }

    #[test]
    fn mixed_partials_commute(e in expr()) {
        let r = &e.diff("x").diff("y") - &e.diff("y").diff("x");
        prop_assert!(is_zero(&r, &SamplerConfig::default()).is_zero());
    }

    #[test]
    fn derivative_matches_central_difference(e in poly(3, 4), px in -8i64..=8, py in -8i64..=8, pz in -8i64..=8) {
        let (px, py, pz) = (px as f64 / 4.0, py as f64 / 4.0, pz as f64 / 4.0);
        let at = |x: f64| {
            let mut p = Point::new();
            p.set_float("x", Complex64::new(x, 0.0));
            p.set_float("y", Complex64::new(py, 0.0));
            p.set_float("z", Complex64::new(pz, 0.0));
            p
        };
        let h = 1e-4;
        let fd = (eval(&e, &at(px + h)).unwrap().to_c64().re - eval(&e, &at(px - h)).unwrap().to_c64().re) / (2.0 * h);
        let exact = eval(&e.diff("x"), &at(px)).unwrap().to_c64().re;
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "fd {} exact {}", fd, exact);
    }

    #[test]
    fn dd_vanishes((n, a, _b) in form_pair()) {
        prop_assert!(d(&d(&a)).is_zero());
        prop_assert_eq!(a.variety().dim(), n);
    }

    #[test]
    fn wedge_is_graded_commutative((_n, a, b) in form_pair()) {
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap().scale(&sign(a.degree() * b.degree()));
        prop_assert!(ab.sub(&ba).unwrap().is_zero());
    }

    #[test]
    fn d_is_graded_leibniz((n, a, b) in form_pair()) {
        prop_assume!(a.degree() + b.degree() < n);
        let lhs = d(&wedge(&a, &b).unwrap());
        let rhs = wedge(&d(&a), &b).unwrap().add(&wedge(&a, &d(&b)).unwrap().scale(&sign(a.degree()))).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn interior_is_antiderivation((n, a, b, v) in form_pair().prop_flat_map(|(n, a, b)| (Just(n), Just(a), Just(b), field(n)))) {
        let lhs = interior(&v, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&interior(&v, &a).unwrap(), &b)
            .unwrap()
            .add(&wedge(&a, &interior(&v, &b).unwrap()).unwrap().scale(&sign(a.degree())))
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero(), "n = {}", n);
    }

    #[test]
    fn lie_derivative_is_derivation((_n, a, b, v) in form_pair().prop_flat_map(|(n, a, b)| (Just(n), Just(a), Just(b), field(n)))) {
        let lhs = lie_derivative(&v, &wedge(&a, &b).unwrap()).unwrap();
        let rhs = wedge(&lie_derivative(&v, &a).unwrap(), &b)
            .unwrap()
            .add(&wedge(&a, &lie_derivative(&v, &b).unwrap()).unwrap())
            .unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn two_form_matrix_round_trip(f in (2usize..=5).prop_flat_map(|n| form(n, 2))) {
        let m = matrix_of_2form(&f).unwrap();
        for (j, row) in m.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                prop_assert_eq!(e, &-&m[k][j]);
            }
        }
        prop_assert_eq!(form_from_matrix(f.variety(), &m), f);
    }

    #[test]
    fn antisymmetric_spectrum_pairs_up(n in 2usize..=4, entries in prop::collection::vec(-50i32..=50, 6)) {
        let mut m = vec![vec![0.0; n]; n];
        let mut it = entries.into_iter();
        for j in 0..n {
            for k in j + 1..n {
                let x = it.next().unwrap() as f64 / 7.0;
                m[j][k] = x;
                m[k][j] = -x;
            }
        }
        let pairs = eigen_antisymmetric(&m).unwrap();
        // degenerate eigenspaces are listed one basis direction per pair
        let mut total = Complex64::new(0.0, 0.0);
        let count = pairs.len();
        for p in &pairs {
            total += p.value;
            prop_assert!(p.value.re.abs() < 1e-9);
            if p.kind == EigenKind::Spinor {
                prop_assert!(is_isotropic(&p.vector));
                prop_assert!(pairs.iter().any(|q| (q.value + p.value).norm() < 1e-9));
            }
        }
        prop_assert!(total.norm() < 1e-9);
        prop_assert!(count <= n);
    }
}

#[test]
fn substitution_of_identity_map_is_identity() {
    let e = &Expr::sin(&Expr::var("x")) * &Expr::exp(&Expr::var("y"));
    let map: BTreeMap<String, Expr> = [("x".to_string(), Expr::var("x"))].into();
    assert_eq!(e.subst(&map), e);
    assert_eq!(Expr::constant(CRational::imag_unit()).powi(2), Expr::int(-1));
}
