//! Integrand expressions over the variable `s`.
//!
//! Expressions evaluate to a value plus derivative in one pass (dual-number
//! propagation), and report where they fail to be smooth (`floor`, `abs`),
//! so integrators can split cells at the break points.

mod parse;
pub mod scale_text;

use crate::error::{Error, Result};

pub use parse::parse;

/// Builtin unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Floor,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Floor => "floor",
            Func::Abs => "abs",
        }
    }
}

/// Parsed integrand over the single variable `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var,
    Lit(f64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Value and derivative of an expression at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValDer {
    pub value: f64,
    pub derivative: f64,
    /// False when the point sits on a break set of `floor`/`abs` (or at a
    /// boundary of the smooth domain); the derivative is then one-sided.
    pub smooth_at_point: bool,
}

/// Is `x` within break tolerance of an integer?
fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-12 * x.abs().max(1.0)
}

impl Expr {
    pub fn lit(x: f64) -> Expr {
        Expr::Lit(x)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    /// Value together with derivative via dual-number propagation.
    pub fn eval_vd(&self, s: f64) -> Result<ValDer> {
        let (value, derivative, smooth) = self.eval_dual(s)?;
        Ok(ValDer { value, derivative, smooth_at_point: smooth })
    }

    /// Value only; the fast path for integration loops.
    pub fn eval(&self, s: f64) -> Result<f64> {
        match self {
            Expr::Var => Ok(s),
            Expr::Lit(x) => Ok(*x),
            Expr::Neg(a) => Ok(-a.eval(s)?),
            Expr::Add(a, b) => Ok(a.eval(s)? + b.eval(s)?),
            Expr::Sub(a, b) => Ok(a.eval(s)? - b.eval(s)?),
            Expr::Mul(a, b) => Ok(a.eval(s)? * b.eval(s)?),
            Expr::Div(a, b) => {
                let d = b.eval(s)?;
                if d == 0.0 {
                    return Err(Error::Domain { reason: "division by zero", s });
                }
                Ok(a.eval(s)? / d)
            }
            Expr::Pow(a, b) => {
                let base = a.eval(s)?;
                let exp = b.eval(s)?;
                pow_value(base, exp, s)
            }
            Expr::Call(f, a) => {
                let x = a.eval(s)?;
                match f {
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Exp => Ok(x.exp()),
                    Func::Log => {
                        if x <= 0.0 {
                            Err(Error::Domain { reason: "log of a non-positive value", s })
                        } else {
                            Ok(x.ln())
                        }
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            Err(Error::Domain { reason: "sqrt of a negative value", s })
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    Func::Floor => Ok(x.floor()),
                    Func::Abs => Ok(x.abs()),
                }
            }
        }
    }

    fn eval_dual(&self, s: f64) -> Result<(f64, f64, bool)> {
        match self {
            Expr::Var => Ok((s, 1.0, true)),
            Expr::Lit(x) => Ok((*x, 0.0, true)),
            Expr::Neg(a) => {
                let (v, d, sm) = a.eval_dual(s)?;
                Ok((-v, -d, sm))
            }
            Expr::Add(a, b) => {
                let (va, da, sa) = a.eval_dual(s)?;
                let (vb, db, sb) = b.eval_dual(s)?;
                Ok((va + vb, da + db, sa && sb))
            }
            Expr::Sub(a, b) => {
                let (va, da, sa) = a.eval_dual(s)?;
                let (vb, db, sb) = b.eval_dual(s)?;
                Ok((va - vb, da - db, sa && sb))
            }
            Expr::Mul(a, b) => {
                let (va, da, sa) = a.eval_dual(s)?;
                let (vb, db, sb) = b.eval_dual(s)?;
                Ok((va * vb, da * vb + va * db, sa && sb))
            }
            Expr::Div(a, b) => {
                let (va, da, sa) = a.eval_dual(s)?;
                let (vb, db, sb) = b.eval_dual(s)?;
                if vb == 0.0 {
                    return Err(Error::Domain { reason: "division by zero", s });
                }
                Ok(((va / vb), (da * vb - va * db) / (vb * vb), sa && sb))
            }
            Expr::Pow(a, b) => {
                let (va, da, sa) = a.eval_dual(s)?;
                let (vb, db, sb) = b.eval_dual(s)?;
                if db == 0.0 && near_integer(vb) && vb.abs() < 2_147_483_000.0 {
                    let n = vb.round() as i32;
                    let value = va.powi(n);
                    if n < 0 && va == 0.0 {
                        return Err(Error::Domain { reason: "zero to a negative power", s });
                    }
                    let derivative = if n == 0 { 0.0 } else { f64::from(n) * va.powi(n - 1) * da };
                    return Ok((value, derivative, sa && sb));
                }
                if va <= 0.0 {
                    return Err(Error::Domain {
                        reason: "non-integer power of a non-positive base",
                        s,
                    });
                }
                let value = (vb * va.ln()).exp();
                let derivative = value * (db * va.ln() + vb * da / va);
                Ok((value, derivative, sa && sb))
            }
            Expr::Call(f, a) => {
                let (v, d, sm) = a.eval_dual(s)?;
                match f {
                    Func::Sin => Ok((v.sin(), v.cos() * d, sm)),
                    Func::Cos => Ok((v.cos(), -v.sin() * d, sm)),
                    Func::Exp => Ok((v.exp(), v.exp() * d, sm)),
                    Func::Log => {
                        if v <= 0.0 {
                            Err(Error::Domain { reason: "log of a non-positive value", s })
                        } else {
                            Ok((v.ln(), d / v, sm))
                        }
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            Err(Error::Domain { reason: "sqrt of a negative value", s })
                        } else if v == 0.0 {
                            Ok((0.0, f64::INFINITY, false))
                        } else {
                            let r = v.sqrt();
                            Ok((r, d / (2.0 * r), sm))
                        }
                    }
                    Func::Floor => {
                        // locally constant away from integers
                        Ok((v.floor(), 0.0, sm && !near_integer(v)))
                    }
                    Func::Abs => {
                        let at_zero = v.abs() <= 1e-12;
                        Ok((v.abs(), if at_zero { 0.0 } else { v.signum() * d }, sm && !at_zero))
                    }
                }
            }
        }
    }

    /// Linear form `slope * s + intercept`, when the expression is affine.
    fn affine(&self) -> Option<(f64, f64)> {
        match self {
            Expr::Var => Some((1.0, 0.0)),
            Expr::Lit(x) => Some((0.0, *x)),
            Expr::Neg(a) => a.affine().map(|(m, c)| (-m, -c)),
            Expr::Add(a, b) => {
                let (ma, ca) = a.affine()?;
                let (mb, cb) = b.affine()?;
                Some((ma + mb, ca + cb))
            }
            Expr::Sub(a, b) => {
                let (ma, ca) = a.affine()?;
                let (mb, cb) = b.affine()?;
                Some((ma - mb, ca - cb))
            }
            Expr::Mul(a, b) => {
                let (ma, ca) = a.affine()?;
                let (mb, cb) = b.affine()?;
                if ma == 0.0 {
                    Some((ca * mb, ca * cb))
                } else if mb == 0.0 {
                    Some((cb * ma, cb * ca))
                } else {
                    None
                }
            }
            Expr::Div(a, b) => {
                let (ma, ca) = a.affine()?;
                let (mb, cb) = b.affine()?;
                if mb == 0.0 && cb != 0.0 {
                    Some((ma / cb, ca / cb))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Points in `(lo, hi)` where the expression is non-smooth: integer
    /// crossings of `floor` arguments and zero crossings of `abs` arguments.
    /// Affine arguments are solved exactly; others are located by scanning
    /// and bisection.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breaks(lo, hi, &mut out);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * a.abs().max(1.0));
        out.retain(|&x| x > lo && x < hi);
        out
    }

    fn collect_breaks(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        match self {
            Expr::Var | Expr::Lit(_) => {}
            Expr::Neg(a) => a.collect_breaks(lo, hi, out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.collect_breaks(lo, hi, out);
                b.collect_breaks(lo, hi, out);
            }
            Expr::Call(Func::Floor, a) => {
                a.collect_breaks(lo, hi, out);
                if let Some((m, c)) = a.affine() {
                    if m != 0.0 {
                        let (ga, gb) = ((m * lo + c).min(m * hi + c), (m * lo + c).max(m * hi + c));
                        if (gb - ga) < 65536.0 {
                            let mut k = ga.ceil();
                            while k <= gb {
                                out.push((k - c) / m);
                                k += 1.0;
                            }
                            return;
                        }
                    } else {
                        return;
                    }
                }
                scan_breaks(|s| a.eval(s).map(f64::floor), lo, hi, out);
            }
            Expr::Call(Func::Abs, a) => {
                a.collect_breaks(lo, hi, out);
                if let Some((m, c)) = a.affine() {
                    if m != 0.0 {
                        out.push(-c / m);
                    }
                    return;
                }
                scan_breaks(|s| a.eval(s).map(f64::signum), lo, hi, out);
            }
            Expr::Call(_, a) => a.collect_breaks(lo, hi, out),
        }
    }
}

/// Locate discontinuities of a step-valued classifier by scanning and
/// bisection.
fn scan_breaks(classify: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, out: &mut Vec<f64>) {
    const SAMPLES: usize = 256;
    let h = (hi - lo) / SAMPLES as f64;
    let mut prev = classify(lo).ok();
    for i in 1..=SAMPLES {
        let x = lo + i as f64 * h;
        let cur = classify(x).ok();
        if let (Some(p), Some(c)) = (prev, cur) {
            if p != c {
                let (mut l, mut r) = (x - h, x);
                for _ in 0..80 {
                    let mid = 0.5 * (l + r);
                    match classify(mid).ok() {
                        Some(v) if v == p => l = mid,
                        _ => r = mid,
                    }
                }
                out.push(r);
            }
        }
        prev = cur;
    }
}

fn pow_value(base: f64, exp: f64, s: f64) -> Result<f64> {
    if near_integer(exp) && exp.abs() < 2_147_483_000.0 {
        let n = exp.round() as i32;
        if n < 0 && base == 0.0 {
            return Err(Error::Domain { reason: "zero to a negative power", s });
        }
        return Ok(base.powi(n));
    }
    if base <= 0.0 {
        return Err(Error::Domain { reason: "non-integer power of a non-positive base", s });
    }
    Ok(base.powf(exp))
}

/// Shortest decimal form that round-trips through f64; integral values
/// print without a trailing `.0`.
pub(crate) fn fmt_float(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", print_prec(self, 0))
    }
}

/// Precedence levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom.
fn prec_of(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Lit(x) if *x < 0.0 => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn print_prec(e: &Expr, ctx: u8) -> String {
    let body = match e {
        Expr::Var => "s".to_string(),
        Expr::Lit(x) => fmt_float(*x),
        Expr::Neg(a) => format!("-{}", print_prec(a, 4)),
        Expr::Add(a, b) => format!("{}+{}", print_prec(a, 1), print_prec(b, 2)),
        Expr::Sub(a, b) => format!("{}-{}", print_prec(a, 1), print_prec(b, 2)),
        Expr::Mul(a, b) => format!("{}*{}", print_prec(a, 2), print_prec(b, 3)),
        Expr::Div(a, b) => format!("{}/{}", print_prec(a, 2), print_prec(b, 3)),
        Expr::Pow(a, b) => format!("{}^{}", print_prec(a, 5), print_prec(b, 4)),
        Expr::Call(f, a) => format!("{}({})", f.name(), print_prec(a, 0)),
    };
    if prec_of(e) < ctx {
        format!("({body})")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Expr {
        parse(text).unwrap()
    }

    #[test]
    fn eval_examples() {
        let e = p("s^2");
        let vd = e.eval_vd(3.0).unwrap();
        assert_eq!((vd.value, vd.derivative), (9.0, 6.0));

        let e = p("floor(s)");
        let vd = e.eval_vd(1.5).unwrap();
        assert_eq!((vd.value, vd.derivative), (1.0, 0.0));
        assert!(vd.smooth_at_point);
        assert!(!e.eval_vd(2.0).unwrap().smooth_at_point);

        let e = p("sin(s)");
        let vd = e.eval_vd(0.0).unwrap();
        assert_eq!((vd.value, vd.derivative), (0.0, 1.0));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(p("log(s)").eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(p("1/s").eval(0.0), Err(Error::Domain { .. })));
        assert!(matches!(p("s^0.5").eval(-2.0), Err(Error::Domain { .. })));
        // integer exponents allow negative bases
        assert_eq!(p("s^3").eval(-2.0).unwrap(), -8.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let corpus = [
            "s^2", "s^3-2*s", "sin(s)*cos(s)", "exp(s/2)", "log(s+5)", "sqrt(s+4)",
            "(s+1)/(s^2+1)", "2^s", "s^4-s^2+0.5*s",
        ];
        let h = 1e-5;
        for text in corpus {
            let e = p(text);
            for i in 0..100 {
                let s = -1.5 + 3.0 * (i as f64) / 99.0;
                let vd = e.eval_vd(s).unwrap();
                if !vd.smooth_at_point {
                    continue;
                }
                let fd = (e.eval(s + h).unwrap() - e.eval(s - h).unwrap()) / (2.0 * h);
                assert!(
                    (vd.derivative - fd).abs() <= 1e-6 * vd.derivative.abs().max(1.0),
                    "{text} at {s}: ad={} fd={}",
                    vd.derivative,
                    fd
                );
            }
        }
    }

    #[test]
    fn breakpoints_of_floor_are_integers() {
        let e = p("floor(s)*2*s");
        assert_eq!(e.breakpoints(0.0, 3.0), vec![1.0, 2.0]);
        let e = p("floor(2*s+0.5)");
        assert_eq!(e.breakpoints(0.0, 1.0), vec![0.25, 0.75]);
    }

    #[test]
    fn breakpoints_of_nonaffine_floor_by_bisection() {
        let e = p("floor(s^2)");
        let b = e.breakpoints(0.5, 2.1);
        assert_eq!(b.len(), 4);
        for (got, want) in b.iter().zip([1.0, 2f64.sqrt(), 3f64.sqrt(), 2.0]) {
            assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
        }
    }

    #[test]
    fn abs_break_at_root() {
        let e = p("abs(s-1.25)");
        assert_eq!(e.breakpoints(0.0, 2.0), vec![1.25]);
    }

    #[test]
    fn print_parse_roundtrip() {
        for text in [
            "s^2",
            "floor(s)*2*s",
            "-(s+1)*s",
            "2^-s",
            "s^2^3",
            "(s+1)/(s-1)/s",
            "1-2-3",
            "-2*s",
            "abs(s)-sin(2*s+1)",
        ] {
            let e = p(text);
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(e, reparsed, "{text} printed as {printed}");
        }
    }
}
