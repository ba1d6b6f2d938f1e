//! Independent numerical oracles: comparison orderings from the cosine rules,
//! the second-order expansion of the squared distance, boundary probes,
//! brute-force grid minimization and finite differences.

use nalgebra::DVector;
use rand::Rng;

use crate::certificate::{gradient_outward_certificate, Certificate};
use crate::energy::{energy, f_kappa, gradient};
use crate::error::{Error, Result};
use crate::measure::SignedDiscreteMeasure;
use crate::model_space::{cosine_rule_side, triangle_angle, ModelPoint};
use crate::sampling::{random_unit_vector, seeded_rng};

/// Slack allowed in comparison orderings.
pub const COMPARISON_TOLERANCE: f64 = 1e-12;

/// Three curvatures `lo ≤ mid ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureTriple {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
}

impl CurvatureTriple {
    pub fn new(lo: f64, mid: f64, hi: f64) -> Result<Self> {
        if !(lo <= mid && mid <= hi) || ![lo, mid, hi].iter().all(|k| k.is_finite()) {
            return Err(Error::Domain(format!("curvatures ({lo}, {mid}, {hi}) are not ordered")));
        }
        Ok(Self { lo, mid, hi })
    }
}

/// Third sides of the same hinge in three curvatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeComparison {
    pub a_hi: f64,
    pub a_mid: f64,
    pub a_lo: f64,
}

impl HingeComparison {
    /// `a_hi ≤ a_mid ≤ a_lo` up to [`COMPARISON_TOLERANCE`].
    pub fn ordered(&self) -> bool {
        self.a_hi <= self.a_mid + COMPARISON_TOLERANCE && self.a_mid <= self.a_lo + COMPARISON_TOLERANCE
    }
}

pub fn hinge_comparison_check(kappas: &CurvatureTriple, c: f64, delta: f64, alpha: f64) -> Result<HingeComparison> {
    Ok(HingeComparison {
        a_hi: cosine_rule_side(kappas.hi, c, delta, alpha)?,
        a_mid: cosine_rule_side(kappas.mid, c, delta, alpha)?,
        a_lo: cosine_rule_side(kappas.lo, c, delta, alpha)?,
    })
}

/// Corner angles of one triangle in three curvatures; index `i` is the
/// angle opposite side `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleComparison {
    pub lo: [f64; 3],
    pub mid: [f64; 3],
    pub hi: [f64; 3],
}

impl AngleComparison {
    /// `α_lo ≤ α_mid ≤ α_hi` at every corner up to [`COMPARISON_TOLERANCE`].
    pub fn ordered(&self) -> bool {
        (0..3).all(|i| {
            self.lo[i] <= self.mid[i] + COMPARISON_TOLERANCE && self.mid[i] <= self.hi[i] + COMPARISON_TOLERANCE
        })
    }
}

pub fn angle_comparison_check(kappas: &CurvatureTriple, sides: [f64; 3]) -> Result<AngleComparison> {
    let corners = |kappa: f64| -> Result<[f64; 3]> {
        let [a, b, c] = sides;
        Ok([
            triangle_angle(kappa, a, b, c)?,
            triangle_angle(kappa, b, c, a)?,
            triangle_angle(kappa, c, a, b)?,
        ])
    };
    Ok(AngleComparison { lo: corners(kappas.lo)?, mid: corners(kappas.mid)?, hi: corners(kappas.hi)? })
}

/// Extrapolated `δ²` coefficient of `d(w,y)² − ‖log_x w − log_x y‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionFit {
    pub coefficient: f64,
    /// `f_κ(α, c) − 1`.
    pub expected: f64,
    /// Observed decay order of successive differences of `R(δ)/δ²`; `None`
    /// when they are at rounding level throughout.
    pub order: Option<f64>,
    /// `R(δ)/δ²` along the ladder.
    pub ratios: Vec<f64>,
}

impl ExpansionFit {
    pub const TOLERANCE: f64 = 1e-6;

    pub fn error(&self) -> f64 {
        (self.coefficient - self.expected).abs()
    }

    /// Coefficient within [`Self::TOLERANCE`] and residual decay at least linear.
    pub fn holds(&self) -> bool {
        self.error() <= Self::TOLERANCE && self.order.is_none_or(|p| p >= 0.9)
    }
}

/// `δ_k = c/10 · 2^{-k}` for `k < count`.
pub fn geometric_ladder(c: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| c / 10.0 * 0.5f64.powi(k as i32)).collect()
}

/// `R(δ) = d(w,y)² − ‖log_x w − log_x y‖²` for the hinge `(c, δ, α)` at `x`,
/// written as `(a − e)(a + e)` so only the difference of the sides cancels.
pub fn expansion_remainder(kappa: f64, c: f64, delta: f64, alpha: f64) -> Result<f64> {
    let a = cosine_rule_side(kappa, c, delta, alpha)?;
    let e = cosine_rule_side(0.0, c, delta, alpha)?;
    Ok((a - e) * (a + e))
}

/// Fits the `δ²` coefficient of [`expansion_remainder`] by Richardson
/// extrapolation of `R(δ)/δ²` to `δ = 0` along a geometric ladder.
pub fn expansion_order_check(kappa: f64, c: f64, alpha: f64, deltas: &[f64]) -> Result<ExpansionFit> {
    if deltas.len() < 3 {
        return Err(Error::Domain("at least three δ values are needed".into()));
    }
    if !(c > 0.0) || deltas.iter().any(|d| !(*d > 0.0 && *d <= c / 10.0)) {
        return Err(Error::Domain("δ values must lie in (0, c/10]".into()));
    }
    let q = deltas[1] / deltas[0];
    if !(q > 0.0 && q < 1.0) || deltas.windows(2).any(|w| ((w[1] / w[0]) - q).abs() > 1e-9 * q) {
        return Err(Error::Domain("δ values must decrease geometrically".into()));
    }
    let ratios: Vec<f64> = deltas
        .iter()
        .map(|&d| expansion_remainder(kappa, c, d, alpha).map(|r| r / (d * d)))
        .collect::<Result<_>>()?;

    // Row k of the table eliminates the first k powers of δ.
    let mut table = ratios.clone();
    for j in 1..table.len() {
        let qj = q.powi(j as i32);
        for k in (j..table.len()).rev() {
            table[k] = (table[k] - qj * table[k - 1]) / (1.0 - qj);
        }
    }
    let coefficient = *table.last().expect("nonempty ladder");

    // R carries an absolute rounding error of order ε c², so R/δ² is only
    // resolved down to about ε (c/δ)². Successive differences decay like the
    // residual itself and do not depend on the extrapolated value.
    let noise = |d: f64| 256.0 * f64::EPSILON * (c / d).powi(2) * (1.0 + coefficient.abs());
    let steps: Vec<(f64, f64)> = ratios.windows(2).zip(deltas.windows(2)).map(|(r, d)| ((r[0] - r[1]).abs(), d[1])).collect();
    let mut orders: Vec<f64> = steps
        .windows(2)
        .filter(|w| w[0].0 > noise(w[0].1) && w[1].0 > noise(w[1].1))
        .map(|w| (w[0].0 / w[1].0).ln() / (1.0 / q).ln())
        .collect();
    orders.sort_by(f64::total_cmp);
    let order = (!orders.is_empty()).then(|| orders[orders.len() / 2]);

    Ok(ExpansionFit { coefficient, expected: f_kappa(kappa, alpha, c)? - 1.0, order, ratios })
}

/// Minimum over sampled boundary points of `⟨N(x), grad E(x)⟩`.
#[derive(Debug, Clone)]
pub struct OutwardnessProbe {
    pub min_inner: f64,
    pub samples: usize,
    pub certificate: Certificate,
}

/// Samples `∂B_ρ(c)` and evaluates the gradient against the outward normal
/// `N(x) = −log_x(c)/ρ`. The outwardness certificate is evaluated alongside
/// but does not gate the probe.
pub fn boundary_outwardness_check(
    m: &SignedDiscreteMeasure,
    c: &ModelPoint,
    rho: f64,
    samples: usize,
    seed: u64,
) -> Result<OutwardnessProbe> {
    let masses = m.jordan_masses();
    let certificate = gradient_outward_certificate(masses.plus, masses.minus, rho, m.support_radius(c)?)?;
    let frame = c.frame();
    let n = c.space().dimension();
    let mut rng = seeded_rng(seed);
    let mut min_inner = f64::INFINITY;
    for _ in 0..samples {
        let dir = random_unit_vector(&mut rng, n) * rho;
        let x = frame.point_at(dir.as_slice())?;
        let inward = x.log(c)?;
        let normal = inward.scaled(-1.0 / inward.norm());
        min_inner = min_inner.min(normal.inner(&gradient(m, &x)?)?);
    }
    Ok(OutwardnessProbe { min_inner, samples, certificate })
}

#[derive(Debug, Clone)]
pub struct GridMinimum {
    pub point: ModelPoint,
    pub value: f64,
    /// Grid-local minima on the coarse grid; strict comparison with ties
    /// broken by grid index, so a plateau counts once.
    pub local_min_count: usize,
    /// Final grid spacing, at most the requested resolution.
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Coarse grid points per half-axis; defaults depend on the dimension.
    pub coarse_per_side: Option<usize>,
    /// Refinement factor per zoom level.
    pub zoom: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { coarse_per_side: None, zoom: 4 }
    }
}

fn default_coarse_per_side(n: usize) -> usize {
    match n {
        1 => 1000,
        2 => 60,
        _ => 15,
    }
}

pub fn grid_minimize(m: &SignedDiscreteMeasure, c: &ModelPoint, rho: f64, resolution: f64) -> Result<GridMinimum> {
    grid_minimize_with(m, c, rho, resolution, &GridOptions::default())
}

/// Energy on a normal-coordinate grid over `B̄_ρ(c)`: a coarse pass that
/// counts grid-local minima, then repeated zooms around the best point until
/// the spacing is at most `resolution`.
pub fn grid_minimize_with(
    m: &SignedDiscreteMeasure,
    c: &ModelPoint,
    rho: f64,
    resolution: f64,
    options: &GridOptions,
) -> Result<GridMinimum> {
    let n = c.space().dimension();
    if n > 3 {
        return Err(Error::DimensionTooLarge(n));
    }
    if !(rho > 0.0 && resolution > 0.0) || options.zoom < 2 {
        return Err(Error::Domain("radius and resolution must be positive, zoom at least 2".into()));
    }
    let frame = c.frame();
    let eval = |coords: &[f64]| -> Result<f64> { energy(m, &frame.point_at(coords)?) };

    let per_side = options.coarse_per_side.unwrap_or_else(|| default_coarse_per_side(n)).max(1);
    let mut h = (rho / per_side as f64).max(resolution);
    let side = (rho / h).floor() as i64;
    let width = (2 * side + 1) as usize;
    let total = width.pow(n as u32);
    let index_to_offsets = |mut idx: usize| -> Vec<i64> {
        (0..n)
            .map(|_| {
                let o = (idx % width) as i64 - side;
                idx /= width;
                o
            })
            .collect()
    };
    let mut values = vec![f64::NAN; total];
    for (idx, value) in values.iter_mut().enumerate() {
        let coords: Vec<f64> = index_to_offsets(idx).iter().map(|&o| o as f64 * h).collect();
        if coords.iter().map(|x| x * x).sum::<f64>().sqrt() <= rho {
            *value = eval(&coords)?;
        }
    }

    let mut local_min_count = 0;
    let mut best = (f64::INFINITY, 0usize);
    let stencil: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let o = (k % 3) as i64 - 1;
                    k /= 3;
                    o
                })
                .collect()
        })
        .filter(|o: &Vec<i64>| o.iter().any(|x| *x != 0))
        .collect();
    for idx in 0..total {
        let v = values[idx];
        if v.is_nan() {
            continue;
        }
        if v < best.0 {
            best = (v, idx);
        }
        let offsets = index_to_offsets(idx);
        let is_min = stencil.iter().all(|step| {
            let mut nb = 0usize;
            let mut stride = 1usize;
            for (o, s) in offsets.iter().zip(step) {
                let p = o + s;
                if p.abs() > side {
                    return true;
                }
                nb += (p + side) as usize * stride;
                stride *= width;
            }
            let w = values[nb];
            w.is_nan() || (v, idx) < (w, nb)
        });
        if is_min {
            local_min_count += 1;
        }
    }

    let mut center: Vec<f64> = index_to_offsets(best.1).iter().map(|&o| o as f64 * h).collect();
    let mut value = best.0;
    let half = 2 * options.zoom as i64;
    while h > resolution {
        let h_new = h / options.zoom as f64;
        let mut level_best = (value, center.clone());
        let count = (2 * half + 1).pow(n as u32);
        for k in 0..count {
            let mut kk = k;
            let coords: Vec<f64> = center
                .iter()
                .map(|x| {
                    let o = kk % (2 * half + 1) - half;
                    kk /= 2 * half + 1;
                    x + o as f64 * h_new
                })
                .collect();
            if coords.iter().map(|x| x * x).sum::<f64>().sqrt() > rho {
                continue;
            }
            let v = eval(&coords)?;
            if v < level_best.0 {
                level_best = (v, coords);
            }
        }
        (value, center) = level_best;
        h = h_new;
    }

    Ok(GridMinimum { point: frame.point_at(&center)?, value, local_min_count, spacing: h })
}

/// Distance from `x` to the farthest support point, used to scale
/// finite-difference steps.
fn support_scale(m: &SignedDiscreteMeasure, x: &ModelPoint) -> Result<f64> {
    m.support_radius(x)
}

/// Central second difference of `t ↦ E(exp_x(t u))` at `t = 0`. The step is
/// `ε^{1/4}(1 + scale)`, which balances truncation against rounding for a
/// second difference.
pub fn numeric_second_derivative(m: &SignedDiscreteMeasure, x: &ModelPoint, u: &DVector<f64>) -> Result<f64> {
    let frame = x.frame();
    let h = f64::EPSILON.powf(0.25) * (1.0 + support_scale(m, x)?);
    let step = u * h;
    let plus = energy(m, &frame.point_at(step.as_slice())?)?;
    let minus = energy(m, &frame.point_at((-&step).as_slice())?)?;
    let mid = energy(m, x)?;
    Ok((plus - 2.0 * mid + minus) / (h * h))
}

/// Central-difference gradient in the normal frame [`ModelPoint::frame`] at
/// `x`, with step `ε^{1/3}(1 + scale)`.
pub fn numeric_gradient(m: &SignedDiscreteMeasure, x: &ModelPoint) -> Result<DVector<f64>> {
    let frame = x.frame();
    let n = x.space().dimension();
    let h = f64::EPSILON.cbrt() * (1.0 + support_scale(m, x)?);
    let mut g = DVector::zeros(n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = h;
        let plus = energy(m, &frame.point_at(&e)?)?;
        e[i] = -h;
        let minus = energy(m, &frame.point_at(&e)?)?;
        g[i] = (plus - minus) / (2.0 * h);
    }
    Ok(g)
}

/// Draws a hinge valid in every curvature of `kappas`.
pub fn random_hinge<R: Rng>(rng: &mut R, kappas: &CurvatureTriple) -> (f64, f64, f64) {
    let cap = if kappas.hi > 0.0 { 0.99 * std::f64::consts::FRAC_PI_2 / kappas.hi.sqrt() } else { 3.0 };
    let c = rng.random_range(0.0..cap);
    let delta = rng.random_range(0.0..cap);
    let alpha = rng.random_range(0.0..=std::f64::consts::PI);
    (c, delta, alpha)
}

/// Draws triangle sides realizable in every curvature of `kappas`.
pub fn random_triangle<R: Rng>(rng: &mut R, kappas: &CurvatureTriple) -> [f64; 3] {
    let perimeter_cap = if kappas.hi > 0.0 { 0.99 * 2.0 * std::f64::consts::PI / kappas.hi.sqrt() } else { 6.0 };
    loop {
        let b = rng.random_range(0.01..perimeter_cap / 2.0);
        let c = rng.random_range(0.01..perimeter_cap / 2.0);
        let alpha = rng.random_range(0.0..std::f64::consts::PI);
        // Build side `a` from a Euclidean hinge so the inequalities hold.
        let a = cosine_rule_side(0.0, b, c, alpha).expect("euclidean hinge");
        if a + b + c < perimeter_cap && a > 0.0 {
            return [a, b, c];
        }
    }
}
