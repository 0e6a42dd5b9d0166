//! Classical minimizers: Nelder-Mead simplex and BFGS with central finite differences.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Derivative-free downhill simplex.
    NelderMead,
    /// Quasi-Newton (BFGS inverse-Hessian updates) on central-difference gradients.
    Bfgs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_iterations: usize,
    /// Stop once the simplex spread (Nelder-Mead) or the per-step decrease (BFGS) drops below this.
    pub function_tolerance: f64,
    /// Central-difference step (BFGS only).
    pub fd_step: f64,
    /// Edge length of the initial simplex (Nelder-Mead only).
    pub initial_step: f64,
}

impl OptimizerConfig {
    pub fn nelder_mead(max_iterations: usize) -> Self {
        Self {
            method: Method::NelderMead,
            max_iterations,
            function_tolerance: 1e-8,
            fd_step: 1e-5,
            initial_step: 0.25,
        }
    }

    pub fn bfgs(max_iterations: usize) -> Self {
        Self {
            method: Method::Bfgs,
            max_iterations,
            function_tolerance: 1e-10,
            fd_step: 1e-5,
            initial_step: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        for (name, v) in [
            ("function_tolerance", self.function_tolerance),
            ("fd_step", self.fd_step),
            ("initial_step", self.initial_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::nelder_mead(1000)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub theta_star: Vec<T>,
    /// Objective value at `theta_star`, as last evaluated.
    pub value: T,
    pub n_evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Wraps the objective with call counting and a finiteness check.
struct Counted<F> {
    f: F,
    calls: usize,
}

impl<F> Counted<F> {
    fn eval<T: Real>(&mut self, x: &[T]) -> Result<T>
    where
        F: FnMut(&[T]) -> Result<T>,
    {
        self.calls += 1;
        let v = (self.f)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                value: v.to_f64_lossy(),
                evaluations: self.calls,
            })
        }
    }
}

/// Minimizes `objective` from `theta0`. Every objective call is counted in
/// [`OptResult::n_evaluations`].
pub fn minimize<T, F>(objective: F, theta0: &[T], cfg: &OptimizerConfig) -> Result<OptResult<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T>,
{
    cfg.validate()?;
    if theta0.iter().any(|x| !x.is_finite()) {
        return Err(invalid("initial point is not finite"));
    }
    let mut f = Counted {
        f: objective,
        calls: 0,
    };
    let mut res = match cfg.method {
        Method::NelderMead => nelder_mead(&mut f, theta0, cfg)?,
        Method::Bfgs => bfgs(&mut f, theta0, cfg)?,
    };
    res.n_evaluations = f.calls;
    Ok(res)
}

fn nelder_mead<T, F>(f: &mut Counted<F>, x0: &[T], cfg: &OptimizerConfig) -> Result<OptResult<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T>,
{
    let d = x0.len();
    if d == 0 {
        let v = f.eval(x0)?;
        return Ok(OptResult {
            theta_star: Vec::new(),
            value: v,
            n_evaluations: 0,
            iterations: 0,
            converged: true,
        });
    }
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let tol = T::lit(cfg.function_tolerance);
    let step = T::lit(cfg.initial_step);

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f.eval(x0)?));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] = x[i] + step;
        let v = f.eval(&x)?;
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    let lerp = |a: &[T], b: &[T], t: T| -> Vec<T> {
        a.iter()
            .zip(b)
            .map(|(&ai, &bi)| ai + t * (bi - ai))
            .collect()
    };
    loop {
        // Stable sort keeps the earlier vertex first among ties.
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite values"));
        let spread = simplex[d].1 - simplex[0].1;
        if spread <= tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iterations {
            break;
        }
        iterations += 1;

        let inv = T::one() / T::from_usize(d).expect("dimension fits");
        let mut centroid = vec![T::zero(); d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c = *c + *xi * inv;
            }
        }
        let worst = simplex[d].0.clone();
        let (f_best, f_second, f_worst) = (simplex[0].1, simplex[d - 1].1, simplex[d].1);

        let xr = lerp(&centroid, &worst, -alpha);
        let fr = f.eval(&xr)?;
        if fr < f_best {
            let xe = lerp(&centroid, &worst, -gamma);
            let fe = f.eval(&xe)?;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = lerp(&centroid, &xr, rho);
            let fc = f.eval(&xc)?;
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &worst, rho);
            let fc = f.eval(&xc)?;
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best, &vertex.0, sigma);
            let v = f.eval(&x)?;
            *vertex = (x, v);
        }
    }
    let (theta_star, value) = simplex.swap_remove(0);
    Ok(OptResult {
        theta_star,
        value,
        n_evaluations: 0,
        iterations,
        converged,
    })
}

fn gradient<T, F>(f: &mut Counted<F>, x: &[T], h: T) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T>,
{
    let mut probe = x.to_vec();
    let two_h = h + h;
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f.eval(&probe)?;
        probe[i] = x[i] - h;
        let down = f.eval(&probe)?;
        probe[i] = x[i];
        g.push((up - down) / two_h);
    }
    Ok(g)
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn bfgs<T, F>(f: &mut Counted<F>, x0: &[T], cfg: &OptimizerConfig) -> Result<OptResult<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T>,
{
    let d = x0.len();
    let h = T::lit(cfg.fd_step);
    let tol = T::lit(cfg.function_tolerance);
    let c1 = T::lit(1e-4);
    let half = T::lit(0.5);

    let mut x = x0.to_vec();
    let mut fx = f.eval(&x)?;
    let mut g = gradient(f, &x, h)?;
    // Inverse Hessian approximation, row-major.
    let identity = |d: usize| {
        let mut m = vec![T::zero(); d * d];
        (0..d).for_each(|i| m[i * d + i] = T::one());
        m
    };
    let mut hinv = identity(d);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        if g.iter().all(|gi| gi.abs() <= T::EPS) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut p: Vec<T> = (0..d)
            .map(|i| -(0..d).map(|j| hinv[i * d + j] * g[j]).sum::<T>())
            .collect();
        let mut slope = dot(&g, &p);
        if slope >= T::zero() {
            hinv = identity(d);
            p = g.iter().map(|gi| -*gi).collect();
            slope = dot(&g, &p);
        }

        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<T> = x.iter().zip(&p).map(|(xi, pi)| *xi + step * *pi).collect();
            let ft = f.eval(&trial)?;
            if ft <= fx + c1 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step = step * half;
        }
        let Some((x_new, f_new)) = accepted else {
            // No decrease along a descent direction: we are at the noise floor.
            converged = true;
            break;
        };
        let g_new = gradient(f, &x_new, h)?;
        let s: Vec<T> = x_new.iter().zip(&x).map(|(a, b)| *a - *b).collect();
        let y: Vec<T> = g_new.iter().zip(&g).map(|(a, b)| *a - *b).collect();
        let decrease = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if decrease.abs() < tol {
            converged = true;
            break;
        }
        let sy = dot(&s, &y);
        if sy > T::EPS * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            let rho = T::one() / sy;
            let hy: Vec<T> = (0..d)
                .map(|i| (0..d).map(|j| hinv[i * d + j] * y[j]).sum())
                .collect();
            let yhy = dot(&y, &hy);
            let coef = (T::one() + rho * yhy) * rho;
            for i in 0..d {
                for j in 0..d {
                    hinv[i * d + j] =
                        hinv[i * d + j] + coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
    }
    Ok(OptResult {
        theta_star: x,
        value: fx,
        n_evaluations: 0,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Result<f64> {
        Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2))
    }

    #[test]
    fn one_dimensional_parabola() {
        for cfg in [
            OptimizerConfig::nelder_mead(500),
            OptimizerConfig::bfgs(100),
        ] {
            let r = minimize(|x: &[f64]| Ok((x[0] - 1.0).powi(2)), &[0.0], &cfg).unwrap();
            assert!((r.theta_star[0] - 1.0).abs() < 1e-4, "{cfg:?}: {r:?}");
            assert!(r.converged);
        }
    }

    #[test]
    fn constant_objective_converges_after_setup() {
        let cfg = OptimizerConfig::nelder_mead(100);
        let r = minimize(|_: &[f64]| Ok(3.0), &[0.0, 0.0, 0.0], &cfg).unwrap();
        assert!(r.converged);
        assert!(r.n_evaluations <= 4 + 2, "{}", r.n_evaluations);
    }

    #[test]
    fn rosenbrock_quasi_newton() {
        let mut cfg = OptimizerConfig::bfgs(2000);
        cfg.function_tolerance = 1e-14;
        let r = minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert!(r.value <= 1e-6, "{r:?}");
    }

    #[test]
    fn rosenbrock_simplex() {
        let mut cfg = OptimizerConfig::nelder_mead(5000);
        cfg.function_tolerance = 1e-14;
        let r = minimize(rosenbrock, &[-1.2, 1.0], &cfg).unwrap();
        assert!(r.value <= 1e-6, "{r:?}");
    }

    #[test]
    fn evaluation_counter_matches_calls() {
        for cfg in [OptimizerConfig::nelder_mead(50), OptimizerConfig::bfgs(20)] {
            let mut calls = 0;
            let r = minimize(
                |x: &[f64]| {
                    calls += 1;
                    Ok(x.iter().map(|v| (v - 0.3).powi(2)).sum())
                },
                &[1.0, -1.0, 0.5],
                &cfg,
            )
            .unwrap();
            assert_eq!(r.n_evaluations, calls);
            assert!(r.n_evaluations >= 1);
        }
    }

    #[test]
    fn non_finite_objective_aborts() {
        let cfg = OptimizerConfig::nelder_mead(50);
        let err = minimize(
            |x: &[f64]| Ok(if x[0] > 0.1 { f64::NAN } else { x[0] }),
            &[0.0],
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { evaluations: 2, .. }));
        let mut bad = cfg;
        bad.max_iterations = 0;
        assert!(minimize(|x: &[f64]| Ok(x[0]), &[0.0], &bad).is_err());
        assert!(minimize(|x: &[f64]| Ok(x[0]), &[f64::INFINITY], &cfg).is_err());
    }
}
