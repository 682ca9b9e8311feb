use std::fmt::Write as _;

use crate::cauchy::{solve_cauchy, CauchyProblem};
use crate::dist::{pair, TestFunction};
use crate::error::{Error, Result};
use crate::scalar::{re, Complex};

use super::family::{regularize, DeltaFamily, DEFAULT_EPSILONS};
use super::integrate::{ode_solve_numeric, Trajectory};
use super::quadrature::integrate;

/// Errors below this are treated as numerical noise.
pub const NOISE_FLOOR: f64 = 1e-9;
/// Pairings whose reference is below this use absolute error as the relative error.
const REL_FLOOR: f64 = 1e-12;

/// One `(ε, φ, component)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub test: usize,
    pub component: usize,
    pub numeric: Complex,
    pub symbolic: Complex,
    pub abs_error: f64,
    pub rel_error: f64,
    /// `log(e_prev / e) / log(ε_prev / ε)` against the previous ε, when both errors exceed the noise floor.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    fn series(&self, test: usize, component: usize) -> Vec<&ConvergenceRow> {
        let mut v: Vec<&ConvergenceRow> =
            self.rows.iter().filter(|r| r.test == test && r.component == component).collect();
        v.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        v
    }

    fn keys(&self) -> Vec<(usize, usize)> {
        let mut k: Vec<(usize, usize)> = self.rows.iter().map(|r| (r.test, r.component)).collect();
        k.sort();
        k.dedup();
        k
    }

    /// Number of steps along the ε grid (from step `from` on) where some error grows by more than `noise_floor`.
    pub fn violations(&self, noise_floor: f64, from: usize) -> usize {
        self.keys()
            .into_iter()
            .map(|(t, c)| {
                let s = self.series(t, c);
                s.windows(2)
                    .skip(from)
                    .filter(|w| w[1].abs_error > w[0].abs_error + noise_floor)
                    .count()
            })
            .sum()
    }

    /// True when, for every `(φ, component)`, errors are nonincreasing along the grid
    /// from step `from` on with at most `allowed` violations per series.
    pub fn is_monotone(&self, noise_floor: f64, from: usize, allowed: usize) -> bool {
        self.keys().into_iter().all(|(t, c)| {
            let s = self.series(t, c);
            s.windows(2)
                .skip(from)
                .filter(|w| w[1].abs_error > w[0].abs_error + noise_floor)
                .count()
                <= allowed
        })
    }

    /// Largest relative error at the smallest ε.
    pub fn final_max_rel_error(&self) -> f64 {
        let eps = self.epsilons.iter().copied().fold(f64::INFINITY, f64::min);
        self.rows.iter().filter(|r| r.eps == eps).map(|r| r.rel_error).fold(0.0, f64::max)
    }

    /// Numeric pairings at the smallest ε, keyed by `(test, component)`.
    pub fn final_numeric(&self) -> Vec<((usize, usize), Complex)> {
        let eps = self.epsilons.iter().copied().fold(f64::INFINITY, f64::min);
        self.rows.iter().filter(|r| r.eps == eps).map(|r| ((r.test, r.component), r.numeric)).collect()
    }

    /// Least-squares slope of `log error` against `log ε` per series, over points above the noise floor.
    pub fn observed_rates(&self) -> Vec<((usize, usize), Option<f64>)> {
        self.keys()
            .into_iter()
            .map(|(t, c)| {
                let pts: Vec<(f64, f64)> = self
                    .series(t, c)
                    .iter()
                    .filter(|r| r.abs_error > NOISE_FLOOR)
                    .map(|r| (r.eps.ln(), r.abs_error.ln()))
                    .collect();
                if pts.len() < 2 {
                    return ((t, c), None);
                }
                let n = pts.len() as f64;
                let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
                let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
                let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
                let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
                ((t, c), (sxx > 0.0).then(|| sxy / sxx))
            })
            .collect()
    }

    /// Tab-separated table with a header line.
    pub fn to_table(&self) -> String {
        let mut s = String::from("eps\ttest\tcomponent\tabs_error\trel_error\trate\n");
        for r in &self.rows {
            let rate = r.rate.map_or("-".to_string(), |x| format!("{x:.3}"));
            let _ = writeln!(s, "{:e}\t{}\t{}\t{:.3e}\t{:.3e}\t{}", r.eps, r.test, r.component, r.abs_error, r.rel_error, rate);
        }
        s
    }

    /// Two-column `eps error` text for one series.
    pub fn coordinates(&self, test: usize, component: usize) -> String {
        self.series(test, component)
            .iter()
            .map(|r| format!("{:e} {:e}\n", r.eps, r.abs_error))
            .collect()
    }
}

/// `∫ x_i φ` for a numerical trajectory that is zero left of its start.
pub fn pair_numeric(traj: &Trajectory, component: usize, phi: &TestFunction, breaks: &[f64]) -> Complex {
    let (u, v) = phi.support();
    let body = phi.body();
    let mut cuts: Vec<f64> = breaks.to_vec();
    cuts.extend_from_slice(body.breakpoints());
    cuts.push(traj.start());
    let f = |t: f64| match traj.eval(t) {
        Some(y) => y[component] * body.eval(t),
        None => re(0.0),
    };
    integrate(f, u, v, &cuts, (v - u) / 64.0, 8)
}

/// Integrator tolerance used for the regularized problems.
pub const ODE_TOL: f64 = 1e-11;

pub fn convergence_report(p: &CauchyProblem, fams: &[DeltaFamily], suite: &[TestFunction]) -> Result<ConvergenceReport> {
    convergence_report_with(p, fams, suite, ODE_TOL)
}

/// Tabulates `|∫ x_ε φ - (x, φ)|` over the ε grid of `fams`, where `x_ε` solves the problem
/// with every atom (including the initial-condition atom) replaced by its family member.
pub fn convergence_report_with(
    p: &CauchyProblem,
    fams: &[DeltaFamily],
    suite: &[TestFunction],
    ode_tol: f64,
) -> Result<ConvergenceReport> {
    if suite.is_empty() {
        return Err(Error::Precondition("empty test-function suite".into()));
    }
    let epsilons = match fams.first() {
        Some(f) => f.epsilons.clone(),
        None => DEFAULT_EPSILONS.to_vec(),
    };
    if fams.iter().any(|f| f.epsilons != epsilons) {
        return Err(Error::Precondition("all delta families must share one ε grid".into()));
    }
    let sol = solve_cauchy(p)?;
    let n = p.dim();
    let forcing = p.total_forcing()?;
    let symbolic: Vec<Vec<Complex>> = suite
        .iter()
        .map(|phi| sol.x.iter().map(|xi| pair(xi, phi)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let t_end = suite.iter().map(|phi| phi.support().1).fold(p.t0, f64::max);

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    let mut prev: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; n]; suite.len()];
    for &eps in &epsilons {
        let annotate = |e: Error| match e {
            Error::Integration(m) => Error::Integration(format!("ε = {eps}: {m}")),
            other => other,
        };
        let g = forcing.iter().map(|f| regularize(f, fams, eps)).collect::<Result<Vec<_>>>()?;
        let start = forcing
            .iter()
            .flat_map(|f| f.atoms().iter().map(|a| a.site - eps))
            .fold(p.t0, f64::min);
        let traj = ode_solve_numeric(&p.a, &g, start, &vec![re(0.0); n], t_end.max(start), ode_tol).map_err(annotate)?;
        let mut breaks: Vec<f64> = p.a.breakpoints().to_vec();
        for gi in &g {
            breaks.extend_from_slice(gi.breakpoints());
        }
        for (j, phi) in suite.iter().enumerate() {
            for i in 0..n {
                let numeric = pair_numeric(&traj, i, phi, &breaks);
                let reference = symbolic[j][i];
                let abs_error = (numeric - reference).norm();
                let rel_error = if reference.norm() > REL_FLOOR { abs_error / reference.norm() } else { abs_error };
                let rate = prev[j][i].and_then(|(pe, perr)| {
                    (perr > NOISE_FLOOR && abs_error > NOISE_FLOOR).then(|| (perr / abs_error).ln() / (pe / eps).ln())
                });
                prev[j][i] = Some((eps, abs_error));
                rows.push(ConvergenceRow { eps, test: j, component: i, numeric, symbolic: reference, abs_error, rel_error, rate });
            }
        }
    }
    Ok(ConvergenceReport { epsilons, rows })
}

/// Families for every atom site of the problem's total forcing, with smoothness equal to
/// the largest atom order found there and `α` taken from the atom weights where defined.
pub fn families_for(p: &CauchyProblem, epsilons: &[f64]) -> Result<Vec<DeltaFamily>> {
    let mut fams: Vec<DeltaFamily> = Vec::new();
    for f in p.total_forcing()? {
        for a in f.atoms() {
            let w = a.classical_weight();
            let alpha = if w.norm() > 0.0 { a.plus / w } else { re(1.0) };
            match fams.iter_mut().find(|fam| fam.site == a.site) {
                Some(fam) => fam.smoothness = fam.smoothness.max(a.order),
                None => fams.push(DeltaFamily::new(a.site, alpha, a.order).with_epsilons(epsilons.to_vec())),
            }
        }
    }
    Ok(fams)
}
