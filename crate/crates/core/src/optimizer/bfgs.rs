//! Dense BFGS with a strong-Wolfe line search.
//!
//! Every accepted step satisfies `f(new) ≤ f(old)`. Near a minimum, predicted
//! decreases can fall below the resolution of `f`; steps there are accepted
//! when they do not increase `f` and shrink the gradient.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::objective::ReductionObjective;

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub b: DMatrix<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Point {
    x: DVector<f64>,
    f: f64,
    g: DVector<f64>,
}

struct Problem<'a> {
    obj: &'a ReductionObjective,
    rows: usize,
    cols: usize,
}

impl Problem<'_> {
    fn eval(&self, x: &DVector<f64>) -> Point {
        let b = DMatrix::from_column_slice(self.rows, self.cols, x.as_slice());
        let (f, g) = self.obj.value_and_gradient(&b);
        Point { x: x.clone(), f, g: DVector::from_column_slice(g.as_slice()) }
    }

    fn to_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.rows, self.cols, x.as_slice())
    }
}

fn converged(p: &Point, tol: f64) -> bool {
    p.g.norm() < tol * (1.0 + p.f.abs())
}

pub(crate) fn minimize(
    obj: &ReductionObjective,
    b0: &DMatrix<f64>,
    max_iterations: usize,
    tol: f64,
) -> Result<Outcome> {
    let problem = Problem { obj, rows: b0.nrows(), cols: b0.ncols() };
    let n = b0.len();
    let mut cur = problem.eval(&DVector::from_column_slice(b0.as_slice()));
    if !cur.f.is_finite() {
        return Err(Error::Search {
            message: "objective is not finite at the start".into(),
            last_b: Box::new(b0.clone()),
            last_value: cur.f,
        });
    }
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    let mut iterations = 0;

    while iterations < max_iterations && !converged(&cur, tol) {
        iterations += 1;
        let mut d = -(&hinv * &cur.g);
        if cur.g.dot(&d) >= 0.0 {
            hinv.fill_with_identity();
            scaled = false;
            d = -cur.g.clone();
        }
        let first_step = if scaled { 1.0 } else { (1.0 / cur.g.norm()).min(1.0) };
        let next = match line_search(&problem, &cur, &d, first_step) {
            Some(p) => p,
            None if !scaled => break,
            None => {
                // retry once along steepest descent with a fresh metric
                hinv.fill_with_identity();
                scaled = false;
                let d = -cur.g.clone();
                match line_search(&problem, &cur, &d, (1.0 / cur.g.norm()).min(1.0)) {
                    Some(p) => p,
                    None => break,
                }
            }
        };
        if !next.f.is_finite() {
            return Err(Error::Search {
                message: format!("objective became non-finite at iteration {iterations}"),
                last_b: Box::new(problem.to_matrix(&cur.x)),
                last_value: cur.f,
            });
        }

        let s = &next.x - &cur.x;
        let y = &next.g - &cur.g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                hinv.fill_with_identity();
                hinv *= sy / y.norm_squared();
                scaled = true;
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            // H⁺ = H − ρ(s·(Hy)' + (Hy)·s') + (ρ²·y'Hy + ρ)·ss'
            hinv -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }
        cur = next;
    }

    Ok(Outcome {
        b: problem.to_matrix(&cur.x),
        value: cur.f,
        gradient_norm: cur.g.norm(),
        iterations,
        converged: converged(&cur, tol),
    })
}

/// Strong-Wolfe bracketing search. Returns `None` when no point with
/// `f ≤ f(start)` and a smaller gradient or a strict decrease is found.
fn line_search(problem: &Problem, start: &Point, d: &DVector<f64>, first: f64) -> Option<Point> {
    let dphi0 = start.g.dot(d);
    let f0 = start.f;
    // below this the predicted Armijo decrease is lost in rounding
    let noise = 8.0 * f64::EPSILON * f0.abs().max(f64::MIN_POSITIVE);
    let sufficient = |alpha: f64, f: f64| f <= f0 + C1 * alpha * dphi0 || (f <= f0 && -C1 * alpha * dphi0 < noise);
    let curvature = |p: &Point| p.g.dot(d).abs() <= -C2 * dphi0;

    let mut best: Option<Point> = None;
    let remember = |p: &Point, best: &mut Option<Point>| {
        let improves = p.f < f0 || (p.f <= f0 && p.g.norm() < start.g.norm());
        if improves && best.as_ref().is_none_or(|b| p.f < b.f || (p.f == b.f && p.g.norm() < b.g.norm())) {
            *best = Some(Point { x: p.x.clone(), f: p.f, g: p.g.clone() });
        }
    };

    let at = |alpha: f64| problem.eval(&(&start.x + d * alpha));
    let mut lo = (0.0, f0, dphi0);
    let mut alpha = first;
    let mut hi = None;

    for i in 0..60 {
        let p = at(alpha);
        if !p.f.is_finite() {
            hi = Some((alpha, f64::INFINITY, 0.0));
            break;
        }
        remember(&p, &mut best);
        let dphi = p.g.dot(d);
        if !sufficient(alpha, p.f) || (i > 0 && p.f >= lo.1) {
            hi = Some((alpha, p.f, dphi));
            break;
        }
        if curvature(&p) {
            return Some(p);
        }
        if dphi >= 0.0 {
            hi = Some(lo);
            lo = (alpha, p.f, dphi);
            break;
        }
        lo = (alpha, p.f, dphi);
        alpha *= 2.0;
    }

    let Some(mut hi) = hi else {
        return best;
    };
    for _ in 0..60 {
        let (a_lo, a_hi) = (lo.0, hi.0);
        let width = (a_hi - a_lo).abs();
        if width <= 1e-16 * a_lo.abs().max(a_hi.abs()) {
            break;
        }
        let alpha = interpolate(lo, hi).filter(|a| {
            let (min, max) = (a_lo.min(a_hi), a_lo.max(a_hi));
            *a > min + 0.1 * width && *a < max - 0.1 * width
        });
        let alpha = alpha.unwrap_or(0.5 * (a_lo + a_hi));
        let p = at(alpha);
        if !p.f.is_finite() {
            hi = (alpha, f64::INFINITY, 0.0);
            continue;
        }
        remember(&p, &mut best);
        let dphi = p.g.dot(d);
        if !sufficient(alpha, p.f) || p.f >= lo.1 {
            hi = (alpha, p.f, dphi);
        } else {
            if curvature(&p) {
                return Some(p);
            }
            if dphi * (a_hi - a_lo) >= 0.0 {
                hi = lo;
            }
            lo = (alpha, p.f, dphi);
        }
    }
    best
}

/// Minimizer of the cubic matching value and slope at both ends.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> Option<f64> {
    let (a0, f0, d0) = lo;
    let (a1, f1, d1) = hi;
    if !f1.is_finite() {
        return None;
    }
    let t1 = d0 + d1 - 3.0 * (f0 - f1) / (a0 - a1);
    let disc = t1 * t1 - d0 * d1;
    if disc < 0.0 {
        return None;
    }
    let t2 = (a1 - a0).signum() * disc.sqrt();
    let a = a1 - (a1 - a0) * (d1 + t2 - t1) / (d1 - d0 + 2.0 * t2);
    a.is_finite().then_some(a)
}
