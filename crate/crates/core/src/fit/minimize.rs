//! Derivative-free minimisers: Brent's method in one dimension and a
//! bounded Nelder–Mead simplex.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Min1d {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
    /// Final bracket width fell below the tolerance.
    pub converged: bool,
}

const GOLD: f64 = 0.381_966_011_250_105_1;

/// Brent's minimiser on a bracket `a < b < c` with `f(b) ≤ f(a), f(c)`.
/// Stops when the bracket is narrower than `2·(rel_tol·|x| + 1e-300)`
/// around the current best point.
pub fn brent(f: impl Fn(f64) -> f64, a: f64, b: f64, c: f64, rel_tol: f64, max_iter: usize) -> Min1d {
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let mut x = b;
    let mut w = b;
    let mut v = b;
    let mut fx = f(x);
    let mut evals = 1;
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let tol1 = rel_tol * x.abs() + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            return Min1d {
                x,
                fx,
                evaluations: evals,
                converged: true,
            };
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = if mid > x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + if d > 0.0 { tol1 } else { -tol1 }
        };
        let fu = f(u);
        evals += 1;
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Min1d {
        x,
        fx,
        evaluations: evals,
        converged: false,
    }
}

/// Coarse scan of `[lo, hi]` with `points` samples, then Brent on the best
/// interior grid cell. An endpoint minimum is a bracketing error.
pub fn grid_then_brent(
    f: impl Fn(f64) -> f64 + Sync,
    lo: f64,
    hi: f64,
    points: usize,
    rel_tol: f64,
) -> Result<Min1d> {
    use rayon::prelude::*;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Bracket(format!("invalid interval [{lo}, {hi}]")));
    }
    let n = points.max(3);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let fs: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    if let Some(i) = fs.iter().position(|v| v.is_nan()) {
        return Err(Error::Numeric(format!("objective is NaN at {}", xs[i])));
    }
    let (ib, _) = fs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    if ib == 0 || ib == n - 1 {
        return Err(Error::Bracket(format!(
            "no interior minimum in [{lo}, {hi}]: lowest value at {}",
            xs[ib]
        )));
    }
    let mut m = brent(&f, xs[ib - 1], xs[ib], xs[ib + 1], rel_tol, 500);
    m.evaluations += n;
    if fs[ib] < m.fx {
        m = Min1d {
            x: xs[ib],
            fx: fs[ib],
            ..m
        };
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinNd {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop when the simplex values span less than `f_tol·(|f_best| + 1e-30)`
    /// and the simplex diameter is below `x_tol` (in transformed units).
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_evals: usize,
    /// Number of restarts after the first run.
    pub restarts: usize,
    pub seed: u64,
    /// Initial simplex step, as a fraction of each parameter's bound width.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-12,
            x_tol: 1e-9,
            max_evals: 20_000,
            restarts: 3,
            seed: 0,
            initial_step: 0.05,
        }
    }
}

/// Maps an unbounded coordinate into `[lo, hi]`.
fn to_bounded(u: f64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * 0.5 * (1.0 + u.sin())
}

fn to_unbounded(x: f64, lo: f64, hi: f64) -> f64 {
    let s = (2.0 * (x - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0);
    s.asin()
}

fn nelder_mead_once(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64, usize, bool) {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += if p[i] > 0.0 { -step } else { step };
        simplex.push(p);
    }
    let mut fs: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;
    while evals < opts.max_evals {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        fs = idx.iter().map(|&i| fs[i]).collect();
        let spread = fs[n] - fs[0];
        let diam = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol * (fs[0].abs() + 1e-30) && diam <= opts.x_tol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < fs[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                fs[n] = fe;
            } else {
                simplex[n] = xr;
                fs[n] = fr;
            }
        } else if fr < fs[n - 1] {
            simplex[n] = xr;
            fs[n] = fr;
        } else {
            let (xc, fc) = if fr < fs[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < fs[n].min(fr) {
                simplex[n] = xc;
                fs[n] = fc;
            } else {
                for i in 1..=n {
                    for j in 0..n {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    fs[i] = f(&simplex[i]);
                }
                evals += n;
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).unwrap();
    (simplex[best].clone(), fs[best], evals, converged)
}

/// Box-constrained Nelder–Mead with seeded random restarts.
///
/// Each restart begins from the best point so far perturbed by a random
/// fraction of the bound widths; the best result over all runs is returned.
/// `converged` reports whether the run that produced it met the tolerances.
pub fn nelder_mead_bounded(
    f: impl Fn(&[f64]) -> f64,
    init: &[f64],
    bounds: &[(f64, f64)],
    opts: &NelderMeadOptions,
) -> Result<MinNd> {
    if init.len() != bounds.len() || init.is_empty() {
        return Err(Error::invariant("init", "needs one bound per parameter and at least one parameter"));
    }
    for (i, (&x, &(lo, hi))) in init.iter().zip(bounds).enumerate() {
        if !(lo < hi) || !(x >= lo && x <= hi) {
            return Err(Error::invariant(
                format!("init[{i}]"),
                format!("{x} outside bounds [{lo}, {hi}]"),
            ));
        }
    }
    let map = |u: &[f64]| -> Vec<f64> { u.iter().zip(bounds).map(|(&u, &(lo, hi))| to_bounded(u, lo, hi)).collect() };
    let g = |u: &[f64]| {
        let v = f(&map(u));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let step = opts.initial_step * std::f64::consts::PI;
    let u0: Vec<f64> = init.iter().zip(bounds).map(|(&x, &(lo, hi))| to_unbounded(x, lo, hi)).collect();
    let (mut best_u, mut best_f, mut evals, mut converged) = nelder_mead_once(&g, &u0, step, opts);
    // Polish from the optimum once, as simplices can collapse early.
    let (u, fu, e, c) = nelder_mead_once(&g, &best_u, step * 0.1, opts);
    evals += e;
    if fu <= best_f {
        best_u = u;
        best_f = fu;
        converged = c;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let start: Vec<f64> = best_u.iter().map(|&u| u + rng.gen_range(-0.3..0.3)).collect();
        let (u, fu, e, c) = nelder_mead_once(&g, &start, step, opts);
        evals += e;
        if fu < best_f {
            best_u = u;
            best_f = fu;
            converged = c;
        }
    }
    Ok(MinNd {
        x: map(&best_u),
        fx: best_f,
        evaluations: evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_on_parabola() {
        let m = brent(|x| (x - 1.234).powi(2), 0.0, 1.0, 5.0, 1e-10, 200);
        assert!(m.converged);
        assert!((m.x - 1.234).abs() < 1e-8);
    }

    #[test]
    fn grid_endpoint_is_bracket_error() {
        assert!(matches!(grid_then_brent(|x| x, 0.0, 1.0, 11, 1e-8), Err(Error::Bracket(_))));
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let m = nelder_mead_bounded(f, &[-1.0, 2.0], &[(-3.0, 3.0), (-3.0, 3.0)], &NelderMeadOptions::default()).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }
}
