//! KMS states for the generalized gauge action: the inverse temperature,
//! the random-walk step measure `μ`, the stationary boundary measure `ν`
//! and numerical cross-checks.

use nalgebra::{DMatrix, DVector};
use num::rational::Ratio;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::{AmalgamSpec, FiniteFactor, Letter, NormalFormWord, Syllable};
use crate::boundary::{act, cylinders, Cylinder};
use crate::error::{Error, Result};
use crate::ktheory::{irreducible, AGammaMatrix};

/// Tolerance on the residual of the temperature equation.
pub const BETA_TOLERANCE: f64 = 1e-12;

/// Positive weights `ω_i`, one per factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeWeights(Vec<f64>);

impl GaugeWeights {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if let Some(w) = omega.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("{w} is not a positive real")));
        }
        Ok(Self(omega))
    }

    /// `ω = (1, …, 1)`.
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn check(&self, spec: &AmalgamSpec) -> Result<()> {
        if self.0.len() != spec.num_factors() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} factors",
                self.0.len(),
                spec.num_factors()
            )));
        }
        Ok(())
    }
}

/// `β`, `e^{−βω_i}`, `λ_i` and `μ_i` for one spec and gauge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmsSolution {
    pub beta: f64,
    /// `e^{−βω_i}`.
    pub decay: Vec<f64>,
    /// `λ_i = e^{−βω_i}([G_i:H] − 1)`.
    pub lambda: Vec<f64>,
    /// Weight of each `g ∈ G_i ∖ H`.
    pub mu: Vec<f64>,
    /// `[G_i : H]`.
    pub index: Vec<usize>,
    /// `g_i = |G_i ∖ H|`.
    pub outside: Vec<usize>,
    pub subgroup_order: usize,
    /// `Σ_i 1/(1+λ_i) − (|I|−1)` at `beta`.
    pub residual: f64,
    /// Largest deviation of `μ` from the linear stationarity system.
    pub mu_linear_defect: f64,
}

fn temperature_gap(index: &[usize], omega: &[f64], beta: f64) -> f64 {
    let n = index.len() as f64;
    index.iter().zip(omega).map(|(&k, &w)| 1.0 / (1.0 + (-beta * w).exp() * (k as f64 - 1.0))).sum::<f64>() - (n - 1.0)
}

fn temperature_slope(index: &[usize], omega: &[f64], beta: f64) -> f64 {
    index
        .iter()
        .zip(omega)
        .map(|(&k, &w)| {
            let l = (-beta * w).exp() * (k as f64 - 1.0);
            w * l / ((1.0 + l) * (1.0 + l))
        })
        .sum()
}

/// Root of `Σ_i 1/(1 + λ_i(β)) = |I| − 1` by bisection then Newton.
pub fn solve_beta(spec: &AmalgamSpec, omega: &GaugeWeights) -> Result<f64> {
    let factors = spec.finite_factors("solve_beta")?;
    omega.check(spec)?;
    let index: Vec<usize> = factors.iter().map(|f| f.index()).collect();
    let w = omega.values();
    let gap = |b: f64| temperature_gap(&index, w, b);
    let at_zero = gap(0.0);
    if at_zero > 0.0 {
        return Err(Error::Degenerate(format!("Σ 1/[G_i:H] exceeds |I| − 1 by {at_zero}")));
    }
    if at_zero == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while gap(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("no sign change in the temperature equation".into()));
        }
    }
    let grid: Vec<f64> = (0..=64).map(|k| gap(hi * k as f64 / 64.0)).collect();
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Numerical("temperature equation is not increasing on the bracket".into()));
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let mut beta = 0.5 * (lo + hi);
    for _ in 0..8 {
        let step = gap(beta) / temperature_slope(&index, w, beta);
        if !step.is_finite() {
            break;
        }
        beta -= step;
        if step.abs() < 1e-17 {
            break;
        }
    }
    let residual = gap(beta).abs();
    if residual > BETA_TOLERANCE {
        return Err(Error::Numerical(format!("temperature residual {residual:e}")));
    }
    Ok(beta)
}

/// Closed-form `μ_i`, checked against the linear stationarity system
/// `1 = |H| e^{βω_i} μ_i + (g_i − |H|) μ_i + Σ_{j≠i} g_j e^{−βω_j} μ_j`.
pub fn mu_weights(spec: &AmalgamSpec, omega: &GaugeWeights, beta: f64) -> Result<KmsSolution> {
    let factors = spec.finite_factors("mu_weights")?;
    omega.check(spec)?;
    let w = omega.values();
    let n = factors.len();
    let h = spec.subgroup().order() as f64;
    let index: Vec<usize> = factors.iter().map(|f| f.index()).collect();
    let outside: Vec<usize> = factors.iter().map(|f| f.group.order() - f.embedding.subgroup_order()).collect();
    let decay: Vec<f64> = w.iter().map(|&wi| (-beta * wi).exp()).collect();
    let lambda: Vec<f64> = decay.iter().zip(&index).map(|(t, &k)| t * (k as f64 - 1.0)).collect();
    let c: Vec<f64> =
        (0..n).map(|i| (1.0 - decay[i]) * outside[i] as f64 - (1.0 - 1.0 / decay[i]) * h).collect();
    if let Some(i) = (0..n).find(|&i| c[i] <= 0.0) {
        return Err(Error::Numerical(format!("C_{i} = {} is not positive", c[i])));
    }
    let prod_except = |i: usize| (0..n).filter(|&j| j != i).map(|j| c[j]).product::<f64>();
    let denom: f64 = (0..n).map(|k| outside[k] as f64 * prod_except(k)).sum();
    let mu: Vec<f64> = (0..n).map(|i| prod_except(i) / denom).collect();

    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            h / decay[i] + outside[i] as f64 - h
        } else {
            outside[j] as f64 * decay[j]
        }
    });
    let solved = m
        .lu()
        .solve(&DVector::from_element(n, 1.0))
        .ok_or_else(|| Error::Numerical("stationarity system is singular".into()))?;
    let mu_linear_defect = (0..n).map(|i| (solved[i] - mu[i]).abs()).fold(0.0, f64::max);
    if mu_linear_defect > 1e-10 {
        return Err(Error::Numerical(format!("closed-form μ deviates from the linear system by {mu_linear_defect:e}")));
    }
    Ok(KmsSolution {
        beta,
        decay,
        lambda,
        mu,
        index,
        outside,
        subgroup_order: spec.subgroup().order(),
        residual: temperature_gap(
            &factors.iter().map(|f| f.index()).collect::<Vec<_>>(),
            w,
            beta,
        )
        .abs(),
        mu_linear_defect,
    })
}

/// `solve_beta` followed by `mu_weights`.
pub fn solve(spec: &AmalgamSpec, omega: &GaugeWeights) -> Result<KmsSolution> {
    let beta = solve_beta(spec, omega)?;
    mu_weights(spec, omega, beta)
}

impl KmsSolution {
    /// `ν(Ω(x₁ ⋯ x_m)) = e^{−βω_{i₁}} ⋯ e^{−βω_{i_{m−1}}} / ([G_{i_m}:H] − 1 + e^{βω_{i_m}})`.
    pub fn nu(&self, c: &Cylinder) -> f64 {
        let p = c.prefix();
        let Some(&(last, _)) = p.last() else { return 1.0 };
        let head: f64 = p[..p.len() - 1].iter().map(|&(i, _)| self.decay[i]).product();
        head / (self.index[last] as f64 - 1.0 + 1.0 / self.decay[last])
    }

    /// `ν(Y_i)`.
    pub fn nu_factor(&self, i: usize) -> f64 {
        let k = self.index[i] as f64 - 1.0;
        k / (k + 1.0 / self.decay[i])
    }

    /// `Σ_i g_i μ_i`.
    pub fn total_mass(&self) -> f64 {
        self.mu.iter().zip(&self.outside).map(|(m, &g)| m * g as f64).sum()
    }
}

/// Elements of `G_i ∖ H`.
fn outside_elements(f: &FiniteFactor) -> Vec<usize> {
    (0..f.group.order()).filter(|&x| f.embedding.preimage(x).is_none()).collect()
}

/// Worst deviation of `μ ∗ ν` from `ν`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationarityReport {
    pub max_residual: f64,
    pub worst_cylinder: String,
    pub cylinders_checked: usize,
    pub passed: bool,
}

/// `Σ_g μ(g) ν(g⁻¹ c) = ν(c)` for every cylinder of depth at most `max_depth`.
pub fn verify_stationarity(
    spec: &AmalgamSpec,
    sol: &KmsSolution,
    max_depth: usize,
    tolerance: f64,
) -> Result<StationarityReport> {
    let factors = spec.finite_factors("verify_stationarity")?;
    let mut steps: Vec<(NormalFormWord, f64)> = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        for x in outside_elements(f) {
            let g_inv = spec.letter_word(Letter::Finite { factor: i, element: f.group.inv(x) });
            steps.push((g_inv, sol.mu[i]));
        }
    }
    let mut all = Vec::new();
    for d in 0..=max_depth {
        all.extend(cylinders(spec, d)?);
    }
    let residuals: Vec<(f64, usize)> = all
        .par_iter()
        .enumerate()
        .map(|(k, c)| -> Result<(f64, usize)> {
            let mut total = 0.0;
            for (g_inv, weight) in &steps {
                let image: f64 = act(spec, g_inv, c)?.iter().map(|p| sol.nu(p)).sum();
                total += weight * image;
            }
            Ok(((total - sol.nu(c)).abs(), k))
        })
        .collect::<Result<_>>()?;
    let (max_residual, worst) = residuals.iter().copied().fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    Ok(StationarityReport {
        max_residual,
        worst_cylinder: all[worst].display(spec),
        cylinders_checked: all.len(),
        passed: max_residual <= tolerance,
    })
}

/// Increment sampler for `μ`.
struct StepSampler {
    factor: WeightedIndex<f64>,
    elements: Vec<Vec<usize>>,
}

impl StepSampler {
    fn new(spec: &AmalgamSpec, sol: &KmsSolution) -> Result<Self> {
        let factors = spec.finite_factors("random_walk")?;
        let weights: Vec<f64> = sol.mu.iter().zip(&sol.outside).map(|(m, &g)| m * g as f64).collect();
        let factor = WeightedIndex::new(&weights).map_err(|e| Error::Numerical(format!("step measure: {e}")))?;
        Ok(Self { factor, elements: factors.iter().map(|f| outside_elements(f)).collect() })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Letter {
        let factor = self.factor.sample(rng);
        let list = &self.elements[factor];
        Letter::Finite { factor, element: list[rng.random_range(0..list.len())] }
    }
}

/// Empirical first-letter distribution of the walk's boundary limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkReport {
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
    /// Trials whose first syllable was constant over the final quarter.
    pub stable: usize,
    /// `(factor, coset position, count)` per depth-1 cylinder.
    pub counts: Vec<(usize, usize, u64)>,
    /// Set when more than 1% of trials never stabilized.
    pub unstable_warning: bool,
}

impl WalkReport {
    /// `(frequency, standard error)` of a depth-1 cylinder among stable trials.
    pub fn frequency(&self, factor: usize, coset: usize) -> (f64, f64) {
        let n = self.stable.max(1) as f64;
        let count = self.counts.iter().find(|c| c.0 == factor && c.1 == coset).map_or(0, |c| c.2);
        let p = count as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }

    /// `(frequency, standard error)` of `Y_i`.
    pub fn factor_frequency(&self, factor: usize) -> (f64, f64) {
        let n = self.stable.max(1) as f64;
        let count: u64 = self.counts.iter().filter(|c| c.0 == factor).map(|c| c.2).sum();
        let p = count as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }
}

/// Right-increment walks `g₁ g₂ ⋯ g_n`; trial `k` uses the stream
/// `seed + k`.
pub fn random_walk(spec: &AmalgamSpec, sol: &KmsSolution, trials: usize, horizon: usize, seed: u64) -> Result<WalkReport> {
    let sampler = StepSampler::new(spec, sol)?;
    let quiet_from = horizon - horizon / 4;
    let outcomes: Vec<Option<Syllable>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let mut w = spec.identity();
            let mut first = None;
            let mut changed_at = 0;
            for step in 1..=horizon {
                spec.push(&mut w, sampler.sample(&mut rng));
                let now = w.syllables().first().copied();
                if now != first {
                    first = now;
                    changed_at = step;
                }
            }
            if changed_at < quiet_from || horizon == 0 { first } else { None }
        })
        .collect();
    let mut counts: Vec<(usize, usize, u64)> = Vec::new();
    for (i, f) in spec.finite_factors("random_walk")?.iter().enumerate() {
        counts.extend((1..f.index()).map(|c| (i, c, 0)));
    }
    let mut stable = 0;
    for s in outcomes.iter().flatten() {
        if let Syllable::Coset { factor, coset } = *s {
            stable += 1;
            if let Some(c) = counts.iter_mut().find(|c| c.0 == factor && c.1 == coset) {
                c.2 += 1;
            }
        }
    }
    Ok(WalkReport {
        trials,
        horizon,
        seed,
        stable,
        counts,
        unstable_warning: (trials - stable) * 100 > trials,
    })
}

/// Spectral radius of `B = [e^{−βω_i} A_Γᵗ((i,k),(j,l))]` and its
/// eigenvector normalized by `Σ n_k y(i,k) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronReport {
    pub radius: f64,
    pub vector: Vec<f64>,
    pub positive: bool,
    pub irreducible: bool,
}

/// Dominant eigenvalue and eigenvector of a nonnegative matrix by power
/// iteration on `M + I`.
pub fn perron_root(m: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Degenerate("empty matrix".into()));
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut radius = 0.0;
    for _ in 0..100_000 {
        let mut y: Vec<f64> = (0..n).map(|i| x[i] + (0..n).map(|j| m[i][j] * x[j]).sum::<f64>()).collect();
        let norm: f64 = y.iter().sum();
        if norm == 0.0 {
            return Ok((0.0, x));
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let next = norm - 1.0;
        let delta = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if delta < 1e-15 && (next - radius).abs() < 1e-15 {
            return Ok((next, x));
        }
        radius = next;
    }
    Ok((radius, x))
}

pub fn perron_check(sol: &KmsSolution, a: &AGammaMatrix, degrees: &[usize]) -> Result<PerronReport> {
    let n = a.size();
    let r = a.characters;
    if degrees.len() != r || sol.decay.len() != a.factors {
        return Err(Error::Degenerate("A_Γ shape does not match the solution".into()));
    }
    let b: Vec<Vec<f64>> =
        (0..n).map(|p| (0..n).map(|q| sol.decay[p / r] * a.entry(q, p) as f64).collect()).collect();
    let (radius, mut vector) = perron_root(&b)?;
    let mass: f64 = vector.iter().enumerate().map(|(p, y)| degrees[p % r] as f64 * y).sum();
    vector.iter_mut().for_each(|y| *y /= mass);
    let positive = vector.iter().all(|&y| y > 0.0);
    Ok(PerronReport { radius, vector, positive, irreducible: irreducible(a) })
}

/// `λ` of the type `III_λ` factor in the homogeneous case: every factor is
/// the same group with the same embedding and `ω = (1, …, 1)`.
pub fn factor_type(spec: &AmalgamSpec, omega: &GaugeWeights) -> Option<Ratio<i64>> {
    let factors = spec.finite_factors("factor_type").ok()?;
    let first = factors[0];
    let homogeneous = factors.iter().all(|f| {
        f.group.order() == first.group.order()
            && (0..f.group.order()).all(|a| (0..f.group.order()).all(|b| f.group.mul(a, b) == first.group.mul(a, b)))
            && f.embedding.images() == first.embedding.images()
    });
    if !homogeneous || omega.values().iter().any(|&w| w != 1.0) {
        return None;
    }
    let index = first.index() as i64 - 1;
    let n = factors.len() as i64;
    Some(if n == 2 { Ratio::new(1, index * index) } else { Ratio::new(1, (n - 1) * index) })
}

/// Monte Carlo estimate of the total probability of reaching `H` from
/// `g⁻¹`, against the Radon–Nikodym ratio `ν(g⁻¹C)/ν(C)` on a cylinder
/// `C` outside `Y_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartinReport {
    pub factor: usize,
    pub element: String,
    pub exact: f64,
    pub estimate: f64,
    pub standard_error: f64,
    /// Upper bound on the probability lost by stopping at the escape radius
    /// or the horizon.
    pub truncation_bias: f64,
    /// Fraction of walks that neither reached `H` nor left the escape ball.
    pub undecided: f64,
    pub non_transient_warning: bool,
    pub passed: bool,
}

pub fn martin_kernel_crosscheck(
    spec: &AmalgamSpec,
    sol: &KmsSolution,
    generator: (usize, usize),
    trials: usize,
    horizon: usize,
    seed: u64,
) -> Result<MartinReport> {
    let factors = spec.finite_factors("martin_kernel_crosscheck")?;
    let (i, x) = generator;
    let f = factors.get(i).ok_or_else(|| Error::Degenerate(format!("factor {i} does not exist")))?;
    if x >= f.group.order() || f.embedding.preimage(x).is_some() {
        return Err(Error::Degenerate("the generator must lie in G_i ∖ H".into()));
    }
    let g_inv = spec.letter_word(Letter::Finite { factor: i, element: f.group.inv(x) });

    // exact side: any depth-1 cylinder in another factor
    let j = (0..factors.len()).find(|&j| j != i).expect("at least two factors");
    let c = Cylinder::new(spec, vec![(j, 1)])?;
    let exact = act(spec, &g_inv, &c)?.iter().map(|p| sol.nu(p)).sum::<f64>() / sol.nu(&c);

    // P(reach H from a word) = Π_k e^{−βω_{i_k}}, so stopping at radius R loses at most q^R
    let q = sol.decay.iter().copied().fold(0.0, f64::max);
    let radius = ((1e-6f64).ln() / q.ln()).ceil().max(1.0) as usize;
    let sampler = StepSampler::new(spec, sol)?;
    let outcomes: Vec<u8> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let mut w = g_inv.clone();
            for _ in 0..horizon {
                spec.push(&mut w, sampler.sample(&mut rng));
                if w.in_subgroup() {
                    return 1;
                }
                if w.length() >= radius {
                    return 0;
                }
            }
            2
        })
        .collect();
    let hits = outcomes.iter().filter(|&&o| o == 1).count() as f64;
    let undecided = outcomes.iter().filter(|&&o| o == 2).count() as f64 / trials.max(1) as f64;
    let n = trials.max(1) as f64;
    let estimate = hits / n;
    let standard_error = (estimate * (1.0 - estimate) / n).sqrt();
    let truncation_bias = q.powi(radius as i32) + undecided;
    let passed = (estimate - exact).abs() <= 3.0 * standard_error + truncation_bias;
    Ok(MartinReport {
        factor: i,
        element: f.group.label(x).to_string(),
        exact,
        estimate,
        standard_error,
        truncation_bias,
        undecided,
        non_transient_warning: undecided > 0.05,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{s4_s4, sl2z, Factor, FiniteFactor};
    use crate::boundary::refine;
    use crate::chartab::character_table;
    use crate::group::{FiniteGroup, SubgroupEmbedding};
    use crate::ktheory::build_a_gamma;
    use approx::assert_abs_diff_eq;

    fn z2_cubed() -> AmalgamSpec {
        let h = FiniteGroup::trivial();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let emb = SubgroupEmbedding::from_map(&h, &z2, vec![0]).unwrap();
        let f = || Factor::Finite(FiniteFactor::new("Z2", z2.clone(), emb.clone()));
        AmalgamSpec::new(h, vec![f(), f(), f()]).unwrap()
    }

    #[test]
    fn sl2z_temperature_and_weights() {
        let spec = sl2z();
        let sol = solve(&spec, &GaugeWeights::uniform(2)).unwrap();
        let t = 0.5f64.sqrt();
        assert_abs_diff_eq!(sol.decay[0], t, epsilon = 1e-12);
        assert!(sol.residual <= BETA_TOLERANCE);
        let s2 = 2f64.sqrt();
        assert_abs_diff_eq!(sol.mu[0], 2.0 / (4.0 + 4.0 * s2), epsilon = 1e-14);
        assert_abs_diff_eq!(sol.mu[1], s2 / (4.0 + 4.0 * s2), epsilon = 1e-14);
        assert_abs_diff_eq!(sol.total_mass(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sol.nu_factor(0), 1.0 / (1.0 + s2), epsilon = 1e-14);
        assert_abs_diff_eq!(sol.nu_factor(1), 2.0 / (2.0 + s2), epsilon = 1e-14);
    }

    #[test]
    fn s4_and_homogeneous_temperatures() {
        let sol = solve(&s4_s4(), &GaugeWeights::uniform(2)).unwrap();
        assert_abs_diff_eq!(sol.decay[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.mu[0], sol.mu[1], epsilon = 1e-15);
        assert_abs_diff_eq!(sol.mu[0], 1.0 / 36.0, epsilon = 1e-14);
        let spec = z2_cubed();
        let sol = solve(&spec, &GaugeWeights::uniform(3)).unwrap();
        assert_abs_diff_eq!(sol.decay[0], 0.5, epsilon = 1e-12);
        assert_eq!(factor_type(&spec, &GaugeWeights::uniform(3)), Some(Ratio::new(1, 2)));
        assert_eq!(factor_type(&s4_s4(), &GaugeWeights::uniform(2)), Some(Ratio::new(1, 9)));
        assert_eq!(factor_type(&sl2z(), &GaugeWeights::uniform(2)), None);
        assert_eq!(factor_type(&s4_s4(), &GaugeWeights::new(vec![1.0, 2.0]).unwrap()), None);
    }

    #[test]
    fn weights_validated() {
        assert!(GaugeWeights::new(vec![1.0, 0.0]).is_err());
        assert!(GaugeWeights::new(vec![1.0, f64::NAN]).is_err());
        assert!(solve_beta(&sl2z(), &GaugeWeights::uniform(3)).is_err());
    }

    #[test]
    fn nu_is_additive_and_normalized() {
        let spec = s4_s4();
        let sol = solve(&spec, &GaugeWeights::new(vec![1.0, 2.5]).unwrap()).unwrap();
        assert_eq!(sol.nu(&Cylinder::whole()), 1.0);
        for d in 0..3 {
            for c in cylinders(&spec, d).unwrap() {
                let parts: f64 = refine(&spec, &c, d + 2).unwrap().iter().map(|p| sol.nu(p)).sum();
                assert_abs_diff_eq!(parts, sol.nu(&c), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn stationarity_with_unequal_weights() {
        for spec in [sl2z(), s4_s4()] {
            let sol = solve(&spec, &GaugeWeights::new(vec![0.7, 1.9]).unwrap()).unwrap();
            let report = verify_stationarity(&spec, &sol, 3, 1e-10).unwrap();
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn stationarity_detects_wrong_weights() {
        let spec = sl2z();
        let mut sol = solve(&spec, &GaugeWeights::uniform(2)).unwrap();
        sol.mu = vec![0.5 / sol.outside[0] as f64, 0.5 / sol.outside[1] as f64];
        assert!(!verify_stationarity(&spec, &sol, 2, 1e-10).unwrap().passed);
    }

    #[test]
    fn perron_matches_eigen_solver() {
        for spec in [sl2z(), s4_s4()] {
            let a = build_a_gamma(&spec, &character_table(spec.subgroup()).unwrap()).unwrap();
            let m = DMatrix::from_fn(a.size(), a.size(), |i, j| a.entry(i, j) as f64);
            let oracle = m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let (root, _) = perron_root(&a.to_f64()).unwrap();
            assert_abs_diff_eq!(root, oracle, epsilon = 1e-9);
        }
        let spec = s4_s4();
        let sol = solve(&spec, &GaugeWeights::uniform(2)).unwrap();
        let a = build_a_gamma(&spec, &character_table(spec.subgroup()).unwrap()).unwrap();
        let report = perron_check(&sol, &a, &[1, 1, 2]).unwrap();
        assert_abs_diff_eq!(report.radius, 1.0, epsilon = 1e-9);
        assert!(report.positive && report.irreducible);
        let mass: f64 = report.vector.iter().enumerate().map(|(p, y)| [1.0, 1.0, 2.0][p % 3] * y).sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn walk_is_deterministic_and_close() {
        let spec = sl2z();
        let sol = solve(&spec, &GaugeWeights::uniform(2)).unwrap();
        let a = random_walk(&spec, &sol, 4000, 48, 9).unwrap();
        let b = random_walk(&spec, &sol, 4000, 48, 9).unwrap();
        assert_eq!(a, b);
        let (p, se) = a.factor_frequency(0);
        assert!((p - sol.nu_factor(0)).abs() <= 4.0 * se, "{p} {se}");
    }

    #[test]
    fn martin_kernel_small_run() {
        let spec = sl2z();
        let sol = solve(&spec, &GaugeWeights::uniform(2)).unwrap();
        let z6 = &spec.factor(1).as_finite().unwrap().group;
        let report = martin_kernel_crosscheck(&spec, &sol, (1, z6.find("1").unwrap()), 4000, 400, 3).unwrap();
        assert_abs_diff_eq!(report.exact, 0.5f64.sqrt(), epsilon = 1e-12);
        assert!(report.passed, "{report:?}");
        assert!(martin_kernel_crosscheck(&spec, &sol, (1, z6.find("3").unwrap()), 10, 10, 0).is_err());
    }
}
