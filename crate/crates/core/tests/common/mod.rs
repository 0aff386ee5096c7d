#![allow(dead_code)]

use eqsearch::representation::{Equation, TokenPool};

/// Objective minimized by `lasso_fit`, evaluated from scratch in the
/// original coordinates.
pub fn lasso_objective(cols: &[Vec<f64>], y: &[f64], coef: &[f64], lambda: f64) -> f64 {
    let n = y.len() as f64;
    let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let sy = rms(y);
    let mut rss = 0.0;
    for i in 0..y.len() {
        let pred: f64 = cols.iter().zip(coef).map(|(c, a)| a * c[i]).sum();
        rss += (y[i] - pred).powi(2);
    }
    let pen: f64 = cols.iter().zip(coef).map(|(c, a)| rms(c) / sy * a.abs()).sum();
    rss / (2.0 * n * sy * sy) + lambda * pen
}

/// Projected gradient on the split `α = p − q`, `p, q ≥ 0`, run to
/// stagnation. Works on raw cross products, not on standardized columns.
pub fn projected_gradient_lasso(cols: &[Vec<f64>], y: &[f64], lambda: f64) -> Vec<f64> {
    let k = cols.len();
    let n = y.len() as f64;
    let sy2 = y.iter().map(|v| v * v).sum::<f64>() / n;
    let weights: Vec<f64> = cols
        .iter()
        .map(|c| lambda * (c.iter().map(|x| x * x).sum::<f64>() / n).sqrt() / sy2.sqrt())
        .collect();
    // H = XᵀX / (n s_y²), b = Xᵀy / (n s_y²)
    let mut h = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            h[i * k + j] = cols[i].iter().zip(&cols[j]).map(|(a, c)| a * c).sum::<f64>() / (n * sy2);
        }
        b[i] = cols[i].iter().zip(y).map(|(a, c)| a * c).sum::<f64>() / (n * sy2);
    }
    // largest eigenvalue by power iteration
    let mut v = vec![1.0; k];
    let mut top = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..k).map(|i| (0..k).map(|j| h[i * k + j] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        top = norm;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    let step = 1.0 / (2.0 * top * 1.01);
    let mut p = vec![0.0; k];
    let mut q = vec![0.0; k];
    for _ in 0..2_000_000 {
        let a: Vec<f64> = p.iter().zip(&q).map(|(x, y)| x - y).collect();
        let mut moved: f64 = 0.0;
        for i in 0..k {
            let grad: f64 = (0..k).map(|j| h[i * k + j] * a[j]).sum::<f64>() - b[i];
            let np = (p[i] - step * (grad + weights[i])).max(0.0);
            let nq = (q[i] - step * (-grad + weights[i])).max(0.0);
            moved = moved.max((np - p[i]).abs()).max((nq - q[i]).abs());
            p[i] = np;
            q[i] = nq;
        }
        if moved < 1e-15 {
            break;
        }
    }
    p.iter().zip(&q).map(|(x, y)| x - y).collect()
}

/// Checks every structural invariant of an equation against its pool.
pub fn check_equation(eq: &Equation, pool: &TokenPool) -> Result<(), String> {
    let terms = eq.terms();
    if terms.len() < 2 || terms.len() > pool.max_terms {
        return Err(format!("term count {} outside 2..={}", terms.len(), pool.max_terms));
    }
    if eq.rhs_index() >= terms.len() {
        return Err("rhs index out of range".into());
    }
    for (i, a) in terms.iter().enumerate() {
        if terms[i + 1..].contains(a) {
            return Err(format!("duplicate term {a}"));
        }
        if a.is_empty() || a.len() > pool.max_factors {
            return Err(format!("term {a} has {} factors", a.len()));
        }
        if !pool.admits(a) {
            return Err(format!("term {a} not admitted by the pool"));
        }
        for (j, t) in a.tokens().iter().enumerate() {
            if t.parametric().is_some() && a.tokens()[j + 1..].contains(t) {
                return Err(format!("duplicate parametric token in {a}"));
            }
            if let Some(p) = t.parametric() {
                if p.frequency < pool.frequency.lo || p.frequency > pool.frequency.hi {
                    return Err(format!("frequency {} out of bounds", p.frequency));
                }
            }
        }
    }
    if let Some(fit) = eq.fit() {
        if fit.coefficients.len() != terms.len() - 1 {
            return Err("coefficient count mismatch".into());
        }
    }
    Ok(())
}
