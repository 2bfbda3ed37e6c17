//! Equation instances and well-posedness diagnostics.
//!
//! A [`Problem`] describes
//!
//! ```text
//! ∫₀ᵗ K(t,s) x(s) ds = f(t),   0 ≤ s ≤ t ≤ T,
//! ```
//!
//! where `K = K_i` on the strip `α_{i-1}(t) < s < α_i(t)`, with the implicit
//! bounding curves `α_0(t) = 0` and `α_n(t) = t`. Only the interior curves
//! `α_1 … α_{n-1}` are stored.

use crate::expr::{Expr, ExprError, Var};

/// Tolerance for the `f(0) = 0` and `α_i(0) = 0` endpoint conditions.
pub const ENDPOINT_TOL: f64 = 1e-12;
/// Number of uniform sample points used by the ordering check.
pub const ORDERING_SAMPLES: usize = 1000;
/// `|B(j)|` below this value is flagged.
pub const B_FLAG_TOL: f64 = 1e-10;
/// `|K_n(0,0)|` below this value makes `D(0)` undefined.
pub const KERNEL_DIAGONAL_TOL: f64 = 1e-12;
pub const DEFAULT_J_MAX: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("expected {expected} kernels for {curves} curves, got {got}")]
    KernelCount { expected: usize, curves: usize, got: usize },
    #[error("horizon T must be finite and positive, got {0}")]
    Horizon(f64),
    #[error("|K_n(0,0)| = {0:e} is too small")]
    DegenerateDiagonal(f64),
    #[error("{context}: {source}")]
    Eval {
        context: String,
        #[source]
        source: ExprError,
    },
}

fn eval_ctx(context: impl Into<String>) -> impl FnOnce(ExprError) -> ProblemError {
    let context = context.into();
    move |source| ProblemError::Eval { context, source }
}

/// One equation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    t_end: f64,
    curves: Vec<Expr>,
    kernels: Vec<Expr>,
    rhs: Expr,
    exact: Option<Expr>,
    label: String,
}

impl Problem {
    /// Builds a problem after structural checks only. Use [`Problem::validate`]
    /// for the ordering and endpoint conditions.
    pub fn new(
        t_end: f64,
        curves: Vec<Expr>,
        kernels: Vec<Expr>,
        rhs: Expr,
        exact: Option<Expr>,
    ) -> Result<Self, ProblemError> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(ProblemError::Horizon(t_end));
        }
        if kernels.len() != curves.len() + 1 {
            return Err(ProblemError::KernelCount {
                expected: curves.len() + 1,
                curves: curves.len(),
                got: kernels.len(),
            });
        }
        Ok(Self {
            t_end,
            curves,
            kernels,
            rhs,
            exact,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same problem on a different horizon.
    pub fn with_horizon(mut self, t_end: f64) -> Result<Self, ProblemError> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(ProblemError::Horizon(t_end));
        }
        self.t_end = t_end;
        Ok(self)
    }

    /// Number of kernel pieces `n`.
    pub fn pieces(&self) -> usize {
        self.kernels.len()
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Interior curves `α_1 … α_{n-1}`.
    pub fn curves(&self) -> &[Expr] {
        &self.curves
    }

    pub fn kernels(&self) -> &[Expr] {
        &self.kernels
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn exact(&self) -> Option<&Expr> {
        self.exact.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `α_i(t)` for `i = 0..=n`, including the implicit bounds.
    pub fn curve_value(&self, i: usize, t: f64) -> Result<f64, ExprError> {
        if i == 0 {
            Ok(0.0)
        } else if i == self.pieces() {
            Ok(t)
        } else {
            self.curves[i - 1].eval_t(t)
        }
    }

    /// `α_i'(0)` for `i = 0..=n`, from the symbolic derivative.
    pub fn curve_slope_at_origin(&self, i: usize) -> Result<f64, ExprError> {
        if i == 0 {
            Ok(0.0)
        } else if i == self.pieces() {
            Ok(1.0)
        } else {
            self.curves[i - 1].differentiate(Var::T).eval_t(0.0)
        }
    }

    /// `K_i(t, s)` for `i = 1..=n`.
    pub fn kernel(&self, i: usize, t: f64, s: f64) -> Result<f64, ExprError> {
        self.kernels[i - 1].eval(t, s)
    }

    /// Scale every kernel and the right-hand side by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |e: &Expr| Expr::binary(crate::expr::BinaryOp::Mul, Expr::Constant(factor), e.clone());
        Self {
            kernels: self.kernels.iter().map(scale).collect(),
            rhs: scale(&self.rhs),
            ..self.clone()
        }
    }

    /// Checks `f(0) = 0`, `α_i(0) = 0`, and the strict ordering
    /// `0 < α_1(t) < … < α_{n-1}(t) < t` on a uniform sample of `(0, T]`.
    pub fn validate(&self) -> Diagnostics {
        let mut diag = Diagnostics {
            ordering_ok: true,
            ..Diagnostics::default()
        };
        let fail = |diag: &mut Diagnostics, msg: String| {
            diag.ordering_ok = false;
            diag.messages.push(msg);
        };

        match self.rhs.eval_t(0.0) {
            Ok(f0) if f0.abs() <= ENDPOINT_TOL => {}
            Ok(f0) => fail(&mut diag, format!("f(0) ≠ 0 (f(0) = {f0:e})")),
            Err(e) => fail(&mut diag, format!("f(0) could not be evaluated: {e}")),
        }
        for (idx, curve) in self.curves.iter().enumerate() {
            let i = idx + 1;
            match curve.eval_t(0.0) {
                Ok(a0) if a0.abs() <= ENDPOINT_TOL => {}
                Ok(a0) => fail(&mut diag, format!("alpha_{i}(0) ≠ 0 (alpha_{i}(0) = {a0:e})")),
                Err(e) => fail(&mut diag, format!("alpha_{i}(0) could not be evaluated: {e}")),
            }
        }

        // Report each violated pair once, at the first sample where it fails.
        let n = self.pieces();
        let mut reported = vec![false; n];
        let mut eval_failed = vec![false; n + 1];
        for m in 1..=ORDERING_SAMPLES {
            let t = self.t_end * m as f64 / ORDERING_SAMPLES as f64;
            let mut values = Vec::with_capacity(n + 1);
            for i in 0..=n {
                match self.curve_value(i, t) {
                    Ok(v) => values.push(Some(v)),
                    Err(e) => {
                        if !eval_failed[i] {
                            eval_failed[i] = true;
                            fail(&mut diag, format!("alpha_{i}({t}) could not be evaluated: {e}"));
                        }
                        values.push(None);
                    }
                }
            }
            for pair in 0..n {
                if let (Some(lo), Some(hi)) = (values[pair], values[pair + 1]) {
                    if !(lo < hi) && !reported[pair] {
                        reported[pair] = true;
                        let lo_name = pair_name(pair, n);
                        let hi_name = pair_name(pair + 1, n);
                        fail(
                            &mut diag,
                            format!("ordering {lo_name} < {hi_name} violated at t = {t} ({lo} vs {hi})"),
                        );
                    }
                }
            }
        }
        diag
    }

    /// `D(t) = Σ_{i=1}^{n-1} |α_i'(t) / K_n(t,t)| · |K_i(t,α_i(t)) − K_{i+1}(t,α_i(t))|`.
    pub fn d_function(&self, t: f64) -> Result<f64, ProblemError> {
        let n = self.pieces();
        let diagonal = self.kernel(n, t, t).map_err(eval_ctx("K_n(t,t)"))?;
        if diagonal.abs() < KERNEL_DIAGONAL_TOL {
            return Err(ProblemError::DegenerateDiagonal(diagonal));
        }
        let mut total = 0.0;
        for i in 1..n {
            let slope = self.curves[i - 1]
                .differentiate(Var::T)
                .eval_t(t)
                .map_err(eval_ctx(format!("alpha_{i}'(t)")))?;
            let a = self.curve_value(i, t).map_err(eval_ctx(format!("alpha_{i}(t)")))?;
            let jump = self.kernel(i, t, a).map_err(eval_ctx(format!("K_{i}")))?
                - self.kernel(i + 1, t, a).map_err(eval_ctx(format!("K_{}", i + 1)))?;
            total += (slope / diagonal).abs() * jump.abs();
        }
        Ok(total)
    }

    /// `D(0)`; a unique local continuous solution is guaranteed when it is below one.
    pub fn compute_d0(&self) -> Result<f64, ProblemError> {
        self.d_function(0.0)
    }

    /// `B(j) = K_n(0,0) + Σ_{i=1}^{n-1} α_i'(0)^{1+j} (K_i(0,0) − K_{i+1}(0,0))`
    /// for `j = 0..=j_max`.
    pub fn compute_bj(&self, j_max: usize) -> Result<Vec<f64>, ProblemError> {
        let n = self.pieces();
        let k00 = (1..=n)
            .map(|i| self.kernel(i, 0.0, 0.0).map_err(eval_ctx(format!("K_{i}(0,0)"))))
            .collect::<Result<Vec<_>, _>>()?;
        let slopes = (1..n)
            .map(|i| {
                self.curve_slope_at_origin(i)
                    .map_err(eval_ctx(format!("alpha_{i}'(0)")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((0..=j_max)
            .map(|j| {
                let sum: f64 = (1..n)
                    .map(|i| slopes[i - 1].powi(1 + j as i32) * (k00[i - 1] - k00[i]))
                    .sum();
                k00[n - 1] + sum
            })
            .collect())
    }

    /// `Σ_{i=1}^{n} K_i(0,0) [α_i'(0) − α_{i-1}'(0)]`, the denominator of `x(0)`.
    pub fn x0_denominator(&self) -> Result<f64, ProblemError> {
        let mut total = 0.0;
        for i in 1..=self.pieces() {
            let k = self.kernel(i, 0.0, 0.0).map_err(eval_ctx(format!("K_{i}(0,0)")))?;
            let upper = self
                .curve_slope_at_origin(i)
                .map_err(eval_ctx(format!("alpha_{i}'(0)")))?;
            let lower = self
                .curve_slope_at_origin(i - 1)
                .map_err(eval_ctx(format!("alpha_{}'(0)", i - 1)))?;
            total += k * (upper - lower);
        }
        Ok(total)
    }

    /// Ordering checks plus every scalar diagnostic. Failures to compute a
    /// quantity are recorded as messages; this never fails.
    pub fn diagnose(&self, j_max: usize) -> Diagnostics {
        let mut diag = self.validate();
        match self.compute_d0() {
            Ok(d0) => {
                if d0 >= 1.0 {
                    diag.warnings.push(format!(
                        "D(0) = {d0:.16e} >= 1: the sufficient condition for a unique local solution is not met"
                    ));
                }
                diag.d0 = Some(d0);
            }
            Err(e) => diag.warnings.push(format!("D(0) undefined: {e}")),
        }
        match self.x0_denominator() {
            Ok(den) => {
                if den.abs() <= crate::solver::X0_DENOMINATOR_TOL {
                    diag.warnings
                        .push(format!("x(0) denominator {den:e} vanishes: x(0) is not determined"));
                }
                diag.x0_denominator = Some(den);
            }
            Err(e) => diag.warnings.push(format!("x(0) denominator undefined: {e}")),
        }
        match self.compute_bj(j_max) {
            Ok(b) => {
                for (j, value) in b.iter().enumerate() {
                    if value.abs() < B_FLAG_TOL {
                        diag.flagged_b.push(j);
                        diag.warnings.push(format!(
                            "B({j}) = {value:e} is approximately zero: the solution may not be unique"
                        ));
                    }
                }
                diag.b = b;
            }
            Err(e) => diag.warnings.push(format!("B(j) undefined: {e}")),
        }
        // Slopes at the origin should satisfy 0 < α_1'(0) ≤ … ≤ α_{n-1}'(0) < 1.
        let n = self.pieces();
        let slopes: Result<Vec<f64>, _> = (0..=n).map(|i| self.curve_slope_at_origin(i)).collect();
        if let Ok(slopes) = slopes {
            for i in 1..n {
                let ok_lower = if i == 1 {
                    slopes[i] > 0.0
                } else {
                    slopes[i] >= slopes[i - 1]
                };
                if !ok_lower || !(slopes[i] < 1.0) {
                    diag.warnings.push(format!(
                        "alpha_{i}'(0) = {} breaks 0 < alpha_1'(0) <= ... <= alpha_(n-1)'(0) < 1",
                        slopes[i]
                    ));
                }
            }
        }
        diag
    }
}

fn pair_name(i: usize, n: usize) -> String {
    if i == 0 {
        "0".to_owned()
    } else if i == n {
        "t".to_owned()
    } else {
        format!("alpha_{i}(t)")
    }
}

/// Solvability annotations for a problem. Only the ordering/endpoint checks
/// (`ordering_ok`, `messages`) are hard failures; everything else is advisory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub d0: Option<f64>,
    pub x0_denominator: Option<f64>,
    /// `B(0) … B(j_max)`.
    pub b: Vec<f64>,
    /// Indices `j` with `|B(j)| < 1e-10`.
    pub flagged_b: Vec<usize>,
    pub ordering_ok: bool,
    /// Violations of the ordering and endpoint conditions.
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(t_end: f64, curves: &[&str], kernels: &[&str], rhs: &str) -> Problem {
        let p = |s: &&str| s.parse::<Expr>().unwrap();
        Problem::new(
            t_end,
            curves.iter().map(p).collect(),
            kernels.iter().map(p).collect(),
            rhs.parse().unwrap(),
            None,
        )
        .unwrap()
    }

    fn example1() -> Problem {
        problem(2.0, &["t/3"], &["1+t-s", "-1"], "t^4/108 - 25*t^3/81")
    }

    fn example2() -> Problem {
        problem(
            2.0,
            &["t/9", "2*t/9", "4*t/9"],
            &["1+t-s", "-1", "-2", "1"],
            "11*t^4/26244 + 547*t^3/2187",
        )
    }

    fn ill_posed() -> Problem {
        problem(1.0, &["t/2"], &["1", "-1"], "t")
    }

    #[test]
    fn kernel_count_mismatch() {
        let e: Expr = "1".parse().unwrap();
        let err = Problem::new(1.0, vec![e.clone()], vec![e.clone()], e, None).unwrap_err();
        assert!(matches!(err, ProblemError::KernelCount { expected: 2, .. }));
    }

    #[test]
    fn example1_is_ordered() {
        let d = example1().validate();
        assert!(d.ordering_ok, "{:?}", d.messages);
        assert!(d.messages.is_empty());
    }

    #[test]
    fn wrong_curve_order_names_pair() {
        let d = problem(1.0, &["t", "t/2"], &["1", "1", "1"], "t").validate();
        assert!(!d.ordering_ok);
        assert!(
            d.messages.iter().any(|m| m.contains("alpha_1(t) < alpha_2(t)")),
            "{:?}",
            d.messages
        );
        assert_eq!(d.messages.len(), 1);
    }

    #[test]
    fn nonzero_rhs_at_origin() {
        let d = problem(1.0, &[], &["1"], "t + 1").validate();
        assert!(!d.ordering_ok);
        assert!(d.messages.iter().any(|m| m.contains("f(0) ≠ 0")));
    }

    #[test]
    fn curve_eval_failure_is_a_message() {
        let d = problem(1.0, &["ln(t - 0.5)"], &["1", "1"], "t").validate();
        assert!(!d.ordering_ok);
        assert!(!d.messages.is_empty());
    }

    #[test]
    fn d0_values() {
        assert_eq!(problem(1.0, &[], &["1"], "t").compute_d0().unwrap(), 0.0);
        assert!((example1().compute_d0().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((example2().compute_d0().unwrap() - 16.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn d0_rejects_vanishing_diagonal() {
        let p = problem(1.0, &["t/2"], &["1", "t - s"], "t");
        assert!(matches!(p.compute_d0(), Err(ProblemError::DegenerateDiagonal(_))));
    }

    #[test]
    fn bj_values() {
        let b = problem(1.0, &[], &["3"], "t").compute_bj(4).unwrap();
        assert_eq!(b, vec![3.0; 5]);
        let b = example2().compute_bj(0).unwrap();
        assert!((b[0] - 1.0 / 9.0).abs() < 1e-15);
        let b = ill_posed().compute_bj(DEFAULT_J_MAX).unwrap();
        assert_eq!(b.len(), DEFAULT_J_MAX + 1);
        assert!(b[0].abs() < B_FLAG_TOL);
    }

    #[test]
    fn x0_denominator_values() {
        assert!((example1().x0_denominator().unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(problem(1.0, &[], &["1"], "t").x0_denominator().unwrap(), 1.0);
        assert_eq!(ill_posed().x0_denominator().unwrap(), 0.0);
    }

    #[test]
    fn b0_equals_x0_denominator() {
        for p in [example1(), example2(), ill_posed()] {
            let b0 = p.compute_bj(0).unwrap()[0];
            assert!((b0 - p.x0_denominator().unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn diagnose_warns_without_failing() {
        let d = example2().diagnose(DEFAULT_J_MAX);
        assert!(d.ordering_ok);
        assert!(d.warnings.iter().any(|w| w.contains("D(0)")));
        let d = ill_posed().diagnose(DEFAULT_J_MAX);
        assert!(d.ordering_ok);
        assert_eq!(d.flagged_b.first(), Some(&0));
    }

    #[test]
    fn slope_ordering_warning() {
        let d = problem(1.0, &["t/2", "t/4"], &["1", "2", "3"], "t").diagnose(0);
        assert!(d.warnings.iter().any(|w| w.contains("alpha_2'(0)")));
    }
}
