//! Checks that two charts sharing a facet lie on opposite sides of it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::BarycentricChart;
use crate::error::Result;
use crate::model_space::ModelPoint;

/// Scale factor the facet argument is stated for.
pub const FACET_SCALE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetCheckOptions {
    /// Barycentric lattice with weights `k/depth`.
    pub lattice_depth: usize,
    pub random_samples: usize,
    pub seed: u64,
    /// Largest accepted positive coordinate of the opposite vertex.
    pub tolerance: f64,
}

impl Default for FacetCheckOptions {
    fn default() -> Self {
        Self { lattice_depth: 40, random_samples: 1000, seed: 0, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FacetVerdict {
    Pass { worst_violation: f64, samples: usize },
    Violation { worst_violation: f64, samples: usize, worst_weights: Vec<f64> },
    NotApplicable(String),
}

impl FacetVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, FacetVerdict::Pass { .. })
    }
}

pub fn shared_facet_check(
    chart_sigma: &BarycentricChart,
    chart_tau: &BarycentricChart,
    samples: usize,
) -> Result<FacetVerdict> {
    let options = FacetCheckOptions { random_samples: samples, ..FacetCheckOptions::default() };
    shared_facet_check_with(chart_sigma, chart_tau, &options)
}

/// Samples both Riemannian simplices (images of nonnegative weights) and
/// checks that every sample of one has a nonpositive coordinate for the
/// opposite vertex of the other, up to `options.tolerance`.
pub fn shared_facet_check_with(
    chart_sigma: &BarycentricChart,
    chart_tau: &BarycentricChart,
    options: &FacetCheckOptions,
) -> Result<FacetVerdict> {
    let (sigma_only, tau_only) = match unshared_vertices(chart_sigma, chart_tau) {
        Ok(pair) => pair,
        Err(reason) => return Ok(FacetVerdict::NotApplicable(reason)),
    };
    for chart in [chart_sigma, chart_tau] {
        if chart.scale() != FACET_SCALE {
            return Ok(FacetVerdict::NotApplicable(format!("scale {} is not 3/2", chart.scale())));
        }
        if !chart.is_certified() {
            return Ok(FacetVerdict::NotApplicable("chart is not certified".into()));
        }
    }
    let (la, lb) = (chart_sigma.edge_bound(), chart_tau.edge_bound());
    if (la - lb).abs() > 1e-12 * la.max(lb) {
        return Ok(FacetVerdict::NotApplicable(format!("edge bounds {la} and {lb} differ")));
    }
    if chart_sigma.orientation()? != chart_tau.orientation()? {
        return Ok(FacetVerdict::NotApplicable("charts are oppositely oriented".into()));
    }

    let weights = sample_weights(chart_sigma.space().dimension(), options);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_weights = Vec::new();
    for (from, to, opposite) in [(chart_sigma, chart_tau, tau_only), (chart_tau, chart_sigma, sigma_only)] {
        for lambda in &weights {
            let x = from.forward_weights(lambda)?;
            let mu = to.inverse_map(&x)?;
            if mu[opposite] > worst {
                worst = mu[opposite];
                worst_weights = lambda.clone();
            }
        }
    }
    let worst_violation = worst.max(0.0);
    let samples = 2 * weights.len();
    Ok(if worst_violation <= options.tolerance {
        FacetVerdict::Pass { worst_violation, samples }
    } else {
        FacetVerdict::Violation { worst_violation, samples, worst_weights }
    })
}

fn same_point(a: &ModelPoint, b: &ModelPoint) -> bool {
    a.space() == b.space() && (a.coords() - b.coords()).amax() <= 1e-12 * a.coords().amax().max(1.0)
}

// Index of the vertex each chart does not share with the other.
fn unshared_vertices(a: &BarycentricChart, b: &BarycentricChart) -> std::result::Result<(usize, usize), String> {
    if a.space() != b.space() {
        return Err("charts live in different spaces".into());
    }
    let only = |x: &BarycentricChart, y: &BarycentricChart| -> Vec<usize> {
        (0..x.sigma().len())
            .filter(|&i| !y.sigma().iter().any(|q| same_point(&x.sigma()[i], q)))
            .collect()
    };
    match (only(a, b).as_slice(), only(b, a).as_slice()) {
        ([i], [j]) => Ok((*i, *j)),
        _ => Err("charts do not share exactly n vertices".into()),
    }
}

fn sample_weights(n: usize, options: &FacetCheckOptions) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let depth = options.lattice_depth;
    if depth > 0 {
        let mut counts = vec![0usize; n + 1];
        lattice(&mut counts, 0, depth, depth, &mut out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for _ in 0..options.random_samples {
        // Normalized exponentials are uniform on the simplex.
        let e: Vec<f64> = (0..=n).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = e.iter().sum();
        let mut lambda: Vec<f64> = e.iter().map(|x| x / total).collect();
        lambda[n] = 1.0 - lambda[..n].iter().sum::<f64>();
        out.push(lambda);
    }
    out
}

fn lattice(counts: &mut Vec<usize>, i: usize, left: usize, depth: usize, out: &mut Vec<Vec<f64>>) {
    if i + 1 == counts.len() {
        counts[i] = left;
        out.push(counts.iter().map(|&k| k as f64 / depth as f64).collect());
        return;
    }
    for k in 0..=left {
        counts[i] = k;
        lattice(counts, i + 1, left - k, depth, out);
    }
}
