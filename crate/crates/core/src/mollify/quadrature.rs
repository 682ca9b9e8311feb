use crate::scalar::{re, Complex};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule over `[u, v]`, split at `breaks` and into
/// panels no longer than `max_panel`.
pub fn integrate(f: impl Fn(f64) -> Complex, u: f64, v: f64, breaks: &[f64], max_panel: f64, order: usize) -> Complex {
    let (x, w) = gauss_legendre(order);
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > u && b < v).collect();
    pts.push(u);
    pts.push(v);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = re(0.0);
    for win in pts.windows(2) {
        let (a, b) = (win[0], win[1]);
        let m = ((b - a) / max_panel).ceil().max(1.0) as usize;
        let h = (b - a) / m as f64;
        for j in 0..m {
            let l = a + j as f64 * h;
            let mid = l + 0.5 * h;
            let half = 0.5 * h;
            for (xi, wi) in x.iter().zip(&w) {
                total += f(mid + half * xi) * (wi * half);
            }
        }
    }
    total
}
