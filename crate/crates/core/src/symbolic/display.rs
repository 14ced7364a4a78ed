use std::fmt;

use super::expr::{Atom, Expr, FuncApp, Term};

fn fmt_func(app: &FuncApp, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for &slot in &app.partials {
        match app.args.get(slot).and_then(Expr::as_var) {
            Some(v) => write!(f, "∂_{v}")?,
            None => write!(f, "∂_{}", slot + 1)?,
        }
    }
    if !app.partials.is_empty() {
        write!(f, " ")?;
    }
    write!(f, "{}(", app.name)?;
    for (k, a) in app.args.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

fn fmt_atom(atom: &Atom, power: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match atom {
        Atom::Var(n) => write!(f, "{n}")?,
        Atom::Func(app) => {
            if power != 1 && !app.partials.is_empty() {
                write!(f, "(")?;
                fmt_func(app, f)?;
                write!(f, ")")?;
            } else {
                fmt_func(app, f)?;
            }
        }
        Atom::Exp(u) => write!(f, "exp({u})")?,
        Atom::Sin(u) => write!(f, "sin({u})")?,
        Atom::Cos(u) => write!(f, "cos({u})")?,
        Atom::Ln(u) => write!(f, "ln({u})")?,
        Atom::Recip(p) => return write!(f, "({p})^-{power}"),
    }
    if power != 1 {
        write!(f, "^{power}")?;
    }
    Ok(())
}

fn term_string(t: &Term) -> String {
    struct Mono<'a>(&'a Term);
    impl fmt::Display for Mono<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            for (k, (a, e)) in self.0.mono.iter().enumerate() {
                if k > 0 {
                    write!(f, "*")?;
                }
                fmt_atom(a, *e, f)?;
            }
            Ok(())
        }
    }
    let mono = Mono(t);
    if t.mono.is_empty() {
        return t.coeff.to_string();
    }
    if t.coeff.is_one() {
        return mono.to_string();
    }
    if (-&t.coeff).is_one() {
        return format!("-{mono}");
    }
    format!("{}*{mono}", t.coeff)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        // higher total degree first, then the canonical order
        let mut order: Vec<&Term> = terms.iter().collect();
        order.sort_by_key(|t| std::cmp::Reverse(t.mono.iter().map(|(_, e)| *e).sum::<i64>()));
        for (k, t) in order.into_iter().enumerate() {
            let s = term_string(t);
            if k == 0 {
                write!(f, "{s}")?;
            } else if let Some(rest) = s.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {s}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_prints_constant_last() {
        let e = &(&Expr::var("x") * &Expr::var("y")) + &Expr::int(2);
        assert_eq!(e.to_string(), "x*y + 2");
    }

    #[test]
    fn partial_symbol_uses_variable_name() {
        let a = Expr::func("A_x", vec![Expr::var("z")]);
        assert_eq!(a.diff("z").to_string(), "∂_z A_x(z)");
    }

    #[test]
    fn negative_and_imaginary_terms() {
        let e = &Expr::var("x") - &(&Expr::imag() * &Expr::var("y"));
        assert_eq!(e.to_string(), "x - i*y");
        assert_eq!(Expr::var("x").powi(-1).to_string(), "x^-1");
    }
}
