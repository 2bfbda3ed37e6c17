use super::{BinaryOp, Expr, UnaryOp, Var};

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Constant(c) if *c == 0.0)
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Constant(c) if *c == 1.0)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (is_zero(&a), is_zero(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => Expr::binary(BinaryOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (is_zero(&a), is_zero(&b)) {
        (_, true) => a,
        (true, _) => neg(b),
        _ => Expr::binary(BinaryOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        Expr::Constant(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Expr::binary(BinaryOp::Mul, a, b)
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        Expr::Constant(0.0)
    } else {
        Expr::binary(BinaryOp::Div, a, b)
    }
}

fn neg(a: Expr) -> Expr {
    if is_zero(&a) {
        a
    } else {
        Expr::unary(UnaryOp::Neg, a)
    }
}

pub(super) fn differentiate(e: &Expr, v: Var) -> Expr {
    match e {
        Expr::Constant(_) | Expr::Pi => Expr::Constant(0.0),
        Expr::Variable(w) => Expr::Constant(if *w == v { 1.0 } else { 0.0 }),
        Expr::Unary(op, child) => {
            let dc = differentiate(child, v);
            if is_zero(&dc) {
                return dc;
            }
            let u = (**child).clone();
            let outer = match op {
                UnaryOp::Neg => return neg(dc),
                UnaryOp::Sin => Expr::unary(UnaryOp::Cos, u),
                UnaryOp::Cos => neg(Expr::unary(UnaryOp::Sin, u)),
                UnaryOp::Exp => e.clone(),
                UnaryOp::Ln => return div(dc, u),
                // d sqrt(u) = u' / (2 sqrt(u))
                UnaryOp::Sqrt => {
                    return div(dc, mul(Expr::Constant(2.0), e.clone()));
                }
            };
            mul(outer, dc)
        }
        Expr::Binary(op, left, right) => {
            let dl = differentiate(left, v);
            let dr = differentiate(right, v);
            let (l, r) = ((**left).clone(), (**right).clone());
            match op {
                BinaryOp::Add => add(dl, dr),
                BinaryOp::Sub => sub(dl, dr),
                BinaryOp::Mul => add(mul(dl, r), mul(l, dr)),
                BinaryOp::Div => {
                    if is_zero(&dr) {
                        div(dl, r)
                    } else {
                        let numerator = sub(mul(dl, r.clone()), mul(l, dr));
                        div(numerator, Expr::binary(BinaryOp::Pow, r, Expr::Constant(2.0)))
                    }
                }
                BinaryOp::Pow => {
                    if !right.depends_on(v) {
                        // r * l^(r-1) * l'
                        let reduced = Expr::binary(BinaryOp::Sub, r.clone(), Expr::Constant(1.0));
                        let power = Expr::binary(BinaryOp::Pow, l, reduced);
                        mul(mul(r, power), dl)
                    } else if !left.depends_on(v) {
                        // l^r * ln(l) * r'
                        mul(mul(e.clone(), Expr::unary(UnaryOp::Ln, l)), dr)
                    } else {
                        // l^r * (r' ln(l) + r l' / l)
                        let log_term = mul(dr, Expr::unary(UnaryOp::Ln, l.clone()));
                        let ratio_term = div(mul(r, dl), l);
                        mul(e.clone(), add(log_term, ratio_term))
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Expr, Var};

    fn d_at(text: &str, v: Var, t: f64, s: f64) -> f64 {
        let e: Expr = text.parse().unwrap();
        e.differentiate(v).eval(t, s).unwrap()
    }

    fn central_difference(text: &str, t: f64) -> f64 {
        let e: Expr = text.parse().unwrap();
        let h = 1e-6;
        (e.eval_t(t + h).unwrap() - e.eval_t(t - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn polynomial_rhs_derivative_vanishes_at_origin() {
        let text = "t^4/108 - 25*t^3/81";
        let symbolic = d_at(text, Var::T, 0.0, 0.0);
        assert_eq!(symbolic, 0.0);
        assert!((symbolic - central_difference(text, 0.0)).abs() < 1e-6);
        let at_one = d_at(text, Var::T, 1.0, 0.0);
        assert!((at_one - central_difference(text, 1.0)).abs() < 1e-6);
    }

    #[test]
    fn chain_rule() {
        let e: Expr = "sin(t/2)".parse().unwrap();
        let d = e.differentiate(Var::T);
        assert_eq!(d.eval_t(0.0).unwrap(), 0.5);
        let expected: Expr = "cos(t/2)/2".parse().unwrap();
        for t in [0.3, 1.7, -2.0] {
            assert!((d.eval_t(t).unwrap() - expected.eval_t(t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn constants_differentiate_to_zero() {
        assert_eq!("pi".parse::<Expr>().unwrap().differentiate(Var::T), Expr::Constant(0.0));
        assert_eq!(
            "3*s^2".parse::<Expr>().unwrap().differentiate(Var::T),
            Expr::Constant(0.0)
        );
    }

    #[test]
    fn partial_derivative_in_s() {
        assert_eq!(d_at("1 + t - s", Var::S, 0.4, 0.1), -1.0);
        assert!((d_at("t*s^2", Var::S, 2.0, 3.0) - 12.0).abs() < 1e-14);
    }

    #[test]
    fn variable_exponent() {
        // d/dt t^t = t^t (ln t + 1)
        let v = d_at("t^t", Var::T, 2.0, 0.0);
        assert!((v - 4.0 * (2f64.ln() + 1.0)).abs() < 1e-12);
        let v = d_at("2^t", Var::T, 3.0, 0.0);
        assert!((v - 8.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sqrt_and_ln() {
        assert!((d_at("sqrt(t)", Var::T, 4.0, 0.0) - 0.25).abs() < 1e-15);
        assert!((d_at("ln(t^2)", Var::T, 2.0, 0.0) - 1.0).abs() < 1e-15);
    }
}
