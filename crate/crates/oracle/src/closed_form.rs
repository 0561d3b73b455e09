//! Closed-form special cases: lambda = (1, ..., 1) gives the l1 norm and
//! lambda = (1, 0, ..., 0) the l-infinity norm.

/// `sum_i lambda_i |x|_(i)` with a full sort, no shortcuts.
pub fn owl_norm(x: &[f64], lambda: &[f64]) -> f64 {
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    a.iter().zip(lambda).map(|(v, l)| v * l).sum()
}

pub fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn soft_threshold(v: &[f64], t: f64) -> Vec<f64> {
    v.iter()
        .map(|&x| x.signum() * (x.abs() - t).max(0.0))
        .collect()
}

/// Projection onto the l1 ball by sorting and scanning for the threshold.
pub fn l1_ball_projection(b: &[f64], radius: f64) -> Vec<f64> {
    if l1_norm(b) <= radius {
        return b.to_vec();
    }
    let mut u: Vec<f64> = b.iter().map(|v| v.abs()).collect();
    u.sort_by(|p, q| q.total_cmp(p));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - radius) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    soft_threshold(b, theta)
}

/// Projection onto the l-infinity ball: entrywise clipping.
pub fn linf_ball_projection(b: &[f64], radius: f64) -> Vec<f64> {
    b.iter().map(|&x| x.clamp(-radius, radius)).collect()
}
