//! Special functions and the damped Newton solver shared by the device model
//! and the circuit engine.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `1/e`, the left end of the principal branch domain.
pub const INV_E: f64 = 0.367_879_441_171_442_33;

/// Above this exponent `W(e^y)` is solved in log space instead of forming `e^y`.
pub const EXP_CLAMP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub abs_tolerance: f64,
    pub rel_tolerance: f64,
    pub damping_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 100,
            abs_tolerance: 1e-10,
            rel_tolerance: 1e-9,
            damping_floor: 1.0 / 1024.0,
        }
    }
}

impl SolverConfig {
    /// Tolerances used for nodal analysis: 1 pA KCL residual, 1e-6 relative.
    pub fn circuit() -> Self {
        SolverConfig {
            max_iterations: 150,
            abs_tolerance: 1e-12,
            rel_tolerance: 1e-6,
            damping_floor: 1.0 / 1024.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        if !(self.abs_tolerance > 0.0) || !(self.rel_tolerance > 0.0) {
            return Err(Error::InvalidParameter("solver tolerances must be > 0".into()));
        }
        if !(self.damping_floor > 0.0 && self.damping_floor <= 1.0) {
            return Err(Error::InvalidParameter("damping_floor must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Principal branch of the Lambert W function.
///
/// The starting point comes from the branch-point series near `-1/e`, a
/// logarithmic approximation in the middle range and the two-term asymptotic
/// expansion for large arguments; Halley steps then polish it to machine
/// precision.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w0 of NaN".into()));
    }
    if x < -INV_E {
        return Err(Error::Domain(format!("lambert_w0 argument {x} is below -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = if x < -0.32 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        if p < 1e-9 {
            return Ok(-1.0 + p);
        }
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        if !dw.is_finite() {
            break;
        }
        w -= dw;
        if dw.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// `W0(exp(y))` for any finite `y`.
///
/// For `y` beyond [`EXP_CLAMP`] the exponential would overflow, so the
/// equivalent relation `w + ln w = y` is solved directly.
pub fn lambert_w0_exp(y: f64) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    if y <= EXP_CLAMP {
        // exp underflows to zero well before W loses positivity.
        return lambert_w0(y.exp()).unwrap_or(0.0);
    }
    let mut w = y - y.ln();
    for _ in 0..32 {
        let f = w + w.ln() - y;
        let df = 1.0 + 1.0 / w;
        let step = f / df;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn inf_norm(v: &[f64]) -> (f64, usize) {
    let mut worst = 0;
    let mut norm = 0.0f64;
    for (i, x) in v.iter().enumerate() {
        let a = if x.is_finite() { x.abs() } else { f64::INFINITY };
        if a > norm {
            norm = a;
            worst = i;
        }
    }
    (norm, worst)
}

/// Damped Newton iteration on `residual(x) = 0`.
///
/// When a full step fails to reduce the infinity norm of the residual the
/// step is halved, down to `cfg.damping_floor`; the floor step is taken
/// regardless so the iteration can leave a local plateau.
pub fn newton_solve<F, J>(mut residual: F, mut jacobian: J, x0: &[f64], cfg: &SolverConfig) -> Result<NewtonOutcome>
where
    F: FnMut(&[f64]) -> Vec<f64>,
    J: FnMut(&[f64]) -> DMatrix<f64>,
{
    cfg.validate()?;
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = residual(&x);
    let (mut norm, mut worst) = inf_norm(&r);
    let mut iterations = 0;

    while norm > cfg.abs_tolerance {
        if iterations >= cfg.max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                residual: norm,
                worst_index: worst,
            });
        }
        let jac = jacobian(&x);
        debug_assert_eq!(jac.nrows(), n);
        let rhs = DVector::from_column_slice(&r);
        let dx = jac.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
        if dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian);
        }

        let mut alpha = 1.0;
        let mut trial = vec![0.0; n];
        loop {
            for i in 0..n {
                trial[i] = x[i] - alpha * dx[i];
            }
            let r_try = residual(&trial);
            let (n_try, w_try) = inf_norm(&r_try);
            if n_try < norm || alpha <= cfg.damping_floor {
                if !n_try.is_finite() {
                    return Err(Error::NonConvergence {
                        iterations: iterations + 1,
                        residual: n_try,
                        worst_index: w_try,
                    });
                }
                std::mem::swap(&mut x, &mut trial);
                r = r_try;
                norm = n_try;
                worst = w_try;
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;

        // A step that no longer moves the iterate cannot reduce the residual further.
        let step = alpha * dx.amax();
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if step <= f64::EPSILON * scale && norm > cfg.abs_tolerance {
            return Err(Error::NonConvergence {
                iterations,
                residual: norm,
                worst_index: worst,
            });
        }
    }

    Ok(NewtonOutcome {
        solution: x,
        iterations,
        residual_norm: norm,
    })
}

/// Ordinary least-squares fit `y = intercept + slope * x`.
///
/// Returns `(slope, intercept, r_squared)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(
            "linear regression needs at least two paired samples".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "linear regression abscissae are all equal".into(),
        ));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, intercept, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Bisection on `w e^w - x`, independent of the Halley path.
    fn w_bisect(x: f64) -> f64 {
        let (mut lo, mut hi) = (-1.0, x.max(1.0));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() - x > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_relative_eq!(lambert_w0(std::f64::consts::E).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(lambert_w0(-INV_E).unwrap(), -1.0, epsilon = 1e-7);
    }

    #[test]
    fn omega_constant_matches_bisection_oracle() {
        let oracle = w_bisect(1.0);
        assert!((oracle - 0.567_143_290_4).abs() < 1e-10);
        assert_relative_eq!(lambert_w0(1.0).unwrap(), oracle, max_relative = 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(lambert_w0(-0.5), Err(Error::Domain(_))));
        assert!(matches!(lambert_w0(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn log_space_branch_agrees_across_clamp() {
        let below = lambert_w0_exp(EXP_CLAMP - 1e-9);
        let above = lambert_w0_exp(EXP_CLAMP + 1e-9);
        // inputs differ by 2e-9, and dW/dy = W/(1+W) < 1
        assert!((below - above).abs() < 2.1e-9);
        let w = lambert_w0_exp(5000.0);
        assert_relative_eq!(w + w.ln(), 5000.0, max_relative = 1e-15);
        assert_eq!(lambert_w0_exp(-800.0), 0.0);
    }

    #[test]
    fn newton_linear_system_one_step() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 2.0]);
        let b = [1.0, 2.0, 3.0];
        let a2 = a.clone();
        let out = newton_solve(
            |x| {
                let v = &a * DVector::from_column_slice(x);
                (0..3).map(|i| v[i] - b[i]).collect()
            },
            |_| a2.clone(),
            &[0.0; 3],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(out.iterations, 1);
        let exact = a.lu().solve(&DVector::from_column_slice(&b)).unwrap();
        for i in 0..3 {
            assert_relative_eq!(out.solution[i], exact[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn newton_scalar_quadratic() {
        let out = newton_solve(
            |x| vec![x[0] * x[0] - 4.0],
            |x| DMatrix::from_element(1, 1, 2.0 * x[0]),
            &[3.0],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(out.solution[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn newton_diode_divider_matches_bisection() {
        // 1 V source, 1 kOhm resistor, exponential element to ground.
        let (is, vt, r) = (1e-14, 0.025_852, 1e3);
        let kcl = |v: f64| (v - 1.0) / r + is * ((v / vt).exp() - 1.0);
        let out = newton_solve(
            |x| vec![kcl(x[0])],
            |x| DMatrix::from_element(1, 1, 1.0 / r + is / vt * (x[0] / vt).exp()),
            &[0.0],
            &SolverConfig {
                abs_tolerance: 1e-15,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if kcl(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        assert_relative_eq!(out.solution[0], 0.5 * (lo + hi), max_relative = 1e-10);
    }

    #[test]
    fn newton_reports_singular_jacobian() {
        let res = newton_solve(
            |x| vec![x[0] + x[1] - 1.0, x[0] + x[1] - 2.0],
            |_| DMatrix::from_element(2, 2, 1.0),
            &[0.0, 0.0],
            &SolverConfig::default(),
        );
        assert!(matches!(res, Err(Error::SingularJacobian)));
    }

    #[test]
    fn newton_reports_non_convergence() {
        // x^2 + 1 has no real root.
        let res = newton_solve(
            |x| vec![x[0] * x[0] + 1.0],
            |x| DMatrix::from_element(1, 1, 2.0 * x[0] + 1e-3),
            &[0.3],
            &SolverConfig {
                max_iterations: 20,
                ..SolverConfig::default()
            },
        );
        assert!(matches!(res, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn regression_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (s, i, r2) = linear_regression(&x, &y).unwrap();
        assert_relative_eq!(s, 2.5, epsilon = 1e-12);
        assert_relative_eq!(i, -1.0, epsilon = 1e-12);
        assert_relative_eq!(r2, 1.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn w_residual_small(e in -12.0f64..10.0) {
            let x = -INV_E + 10f64.powf(e);
            let w = lambert_w0(x).unwrap();
            prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
            prop_assert!(w >= -1.0);
        }

        #[test]
        fn w_monotone(a in -0.36f64..1e6, b in -0.36f64..1e6) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(lambert_w0(lo).unwrap() <= lambert_w0(hi).unwrap());
        }

        #[test]
        fn newton_solves_diagonally_dominant_systems(
            d in proptest::collection::vec(2.0f64..10.0, 3),
            o in proptest::collection::vec(-0.5f64..0.5, 6),
            b in proptest::collection::vec(-5.0f64..5.0, 3),
        ) {
            let a = DMatrix::from_row_slice(3, 3, &[
                d[0], o[0], o[1],
                o[2], d[1], o[3],
                o[4], o[5], d[2],
            ]);
            let a2 = a.clone();
            let b2 = b.clone();
            let out = newton_solve(
                |x| {
                    let v = &a * DVector::from_column_slice(x);
                    (0..3).map(|i| v[i] - b2[i]).collect()
                },
                |_| a2.clone(),
                &[0.0; 3],
                &SolverConfig::default(),
            ).unwrap();
            prop_assert_eq!(out.iterations, 1);
        }
    }
}
