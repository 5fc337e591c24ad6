//! Numerical verification of the weighted polynomial estimates: Bernstein-type
//! sup bounds for normalized Jacobi polynomials, connection-coefficient norm
//! ratios, Gegenbauer weighted-norm asymptotics, and the operator norm of the
//! weighted projector ψ^{-β} P_k ψ^{-β} on L²(Ω).
//!
//! Checks report empirical suprema and fitted growth exponents; constants are
//! measured, never asserted. Sup scans use Chebyshev-distributed grids (the
//! extrema of weighted Jacobi polynomials cluster at the endpoints).

use num_traits::FromPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::GrushinConfig;
use crate::harmonics::{admissible_pairs, build_basis_element, HarmonicIndex, HarmonicsError};
use crate::quadrature::{omega_inner_product, QuadError};
use crate::ratpoly::Rational;
use crate::specfun::{
    connection_i, gegenbauer_j, gegenbauer_norm_b, jacobi_eval_all, log_gamma, norm_b,
    JacobiParams, SpecFunError,
};

#[derive(Debug, Error)]
pub enum EstimatesError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("critical line mu = lambda - 1/2 (mu = {0})")]
    CriticalLine(f64),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("non-integrable weight (combined exponent {0})")]
    NonIntegrableWeight(f64),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
}

impl From<QuadError> for EstimatesError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::NonIntegrableWeight(a) => EstimatesError::NonIntegrableWeight(a),
            other => EstimatesError::ParameterOutOfRange(other.to_string()),
        }
    }
}

/// One CSV-able data point of a bound check.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub params: String,
    pub k: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub parameter_grid: String,
    /// Empirical sup of LHS/RHS with constants stripped; semantics per bound.
    pub worst_ratio: f64,
    pub worst_point: String,
    pub fitted_exponent: Option<f64>,
    pub pass: bool,
    pub rows: Vec<BoundRow>,
}

fn chebyshev_grid(size: usize) -> Vec<f64> {
    (0..size)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / size as f64).cos())
        .collect()
}

/// Least-squares fit of log(value) against log(k+1).
/// Returns (exponent, leading constant, r²).
pub fn growth_fit(series: &[(u32, f64)]) -> Result<(f64, f64, f64), EstimatesError> {
    if series.len() < 4 {
        return Err(EstimatesError::DegenerateData(format!(
            "need >= 4 points, got {}",
            series.len()
        )));
    }
    if series.iter().any(|&(_, v)| v <= 0.0 || !v.is_finite()) {
        return Err(EstimatesError::DegenerateData(
            "non-positive or non-finite value in series".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|&(k, v)| ((k as f64 + 1.0).ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(EstimatesError::DegenerateData("degenerate abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ybar = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - ybar).powi(2)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, intercept.exp(), r2))
}

/// For one (a, b): sup over the grid and n ≤ n_max of
/// |(1-x²)^{1/4} g_n^{(a,b)}(x)| (2n+a+b+1)^{1/4}, per degree n.
fn bernstein_family_sup(a: f64, b: f64, n_max: u32, grid: &[f64]) -> Vec<f64> {
    let mut per_n = vec![0.0f64; n_max as usize + 1];
    for &x in grid {
        let all = jacobi_eval_all(n_max, JacobiParams::new(a, b), x);
        let wa = ((1.0 - x) / 2.0).max(0.0);
        let wb = ((1.0 + x) / 2.0).max(0.0);
        let weight = (1.0 - x * x).max(0.0).powf(0.25) * wa.powf(a / 2.0) * wb.powf(b / 2.0);
        // normalization prefactor, updated incrementally in n
        let mut pref = (0.5 * (log_gamma(a + b + 1.0).unwrap()
            - log_gamma(a + 1.0).unwrap()
            - log_gamma(b + 1.0).unwrap()))
        .exp();
        for (n, pn) in all.iter().enumerate() {
            let nf = n as f64;
            let v = (weight * pref * pn).abs() * (2.0 * nf + a + b + 1.0).powf(0.25);
            if v > per_n[n] {
                per_n[n] = v;
            }
            pref *= ((nf + 1.0) * (nf + a + b + 1.0) / ((nf + a + 1.0) * (nf + b + 1.0))).sqrt();
        }
    }
    per_n
}

/// Sup of |(1-x²)^{1/4} g_n^{(a,b)}(x)| (2n+a+b+1)^{1/4}; the claim is a
/// uniform constant < 12.
pub fn bernstein_check(a_max: f64, b_max: f64, n_max: u32, grid_size: usize) -> BoundReport {
    let grid = chebyshev_grid(grid_size);
    let samples = |mx: f64| -> Vec<f64> {
        (0..8).map(|t| mx * t as f64 / 7.0).collect()
    };
    let cells: Vec<(f64, f64)> = samples(a_max)
        .into_iter()
        .flat_map(|a| samples(b_max).into_iter().map(move |b| (a, b)))
        .collect();
    let sups: Vec<((f64, f64), Vec<f64>)> = cells
        .par_iter()
        .map(|&(a, b)| ((a, b), bernstein_family_sup(a, b, n_max, &grid)))
        .collect();
    let mut worst = 0.0f64;
    let mut worst_point = String::new();
    let mut rows = Vec::new();
    for ((a, b), per_n) in &sups {
        let (n_at, sup) = per_n
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .unwrap();
        rows.push(BoundRow {
            params: format!("a={a:.3},b={b:.3}"),
            k: n_at as u64,
            lhs: *sup,
            rhs: 12.0,
            ratio: sup / 12.0,
            pass: *sup < 12.0,
        });
        if *sup > worst {
            worst = *sup;
            worst_point = format!("a={a:.3}, b={b:.3}, n={n_at}");
        }
    }
    BoundReport {
        bound_name: "bernstein_sup".into(),
        parameter_grid: format!(
            "a,b in 8x8 samples of [0,{a_max}]x[0,{b_max}], n <= {n_max}, {grid_size} Chebyshev nodes"
        ),
        worst_ratio: worst,
        worst_point,
        fitted_exponent: None,
        pass: worst < 12.0,
        rows,
    }
}

/// Sup of |g_n^{(a,b)}(x)| over integer a, b ≤ 20; the claim is ≤ 1.
pub fn unit_bound_check(n_max: u32) -> BoundReport {
    let grid = chebyshev_grid(801);
    let cells: Vec<(u32, u32)> = (0..=20u32)
        .flat_map(|a| (0..=20u32).map(move |b| (a, b)))
        .collect();
    let results: Vec<((u32, u32), f64, u32)> = cells
        .par_iter()
        .map(|&(a, b)| {
            let (af, bf) = (a as f64, b as f64);
            let mut sup = 0.0f64;
            let mut n_at = 0u32;
            for &x in &grid {
                let all = jacobi_eval_all(n_max, JacobiParams::new(af, bf), x);
                let wa = ((1.0 - x) / 2.0).max(0.0);
                let wb = ((1.0 + x) / 2.0).max(0.0);
                let w = wa.powf(af / 2.0) * wb.powf(bf / 2.0);
                let mut pref = (0.5 * (log_gamma(af + bf + 1.0).unwrap()
                    - log_gamma(af + 1.0).unwrap()
                    - log_gamma(bf + 1.0).unwrap()))
                .exp();
                for (n, pn) in all.iter().enumerate() {
                    let nf = n as f64;
                    let v = (w * pref * pn).abs();
                    if v > sup {
                        sup = v;
                        n_at = n as u32;
                    }
                    pref *= ((nf + 1.0) * (nf + af + bf + 1.0)
                        / ((nf + af + 1.0) * (nf + bf + 1.0)))
                    .sqrt();
                }
            }
            ((a, b), sup, n_at)
        })
        .collect();
    let mut worst = 0.0;
    let mut worst_point = String::new();
    let mut rows = Vec::new();
    for ((a, b), sup, n_at) in results {
        rows.push(BoundRow {
            params: format!("a={a},b={b}"),
            k: n_at as u64,
            lhs: sup,
            rhs: 1.0,
            ratio: sup,
            pass: sup <= 1.0 + 1e-12,
        });
        if sup > worst {
            worst = sup;
            worst_point = format!("a={a}, b={b}, n={n_at}");
        }
    }
    BoundReport {
        bound_name: "unit_bound".into(),
        parameter_grid: format!("integer a,b <= 20, n <= {n_max}, 801 Chebyshev nodes"),
        worst_ratio: worst,
        worst_point,
        fitted_exponent: None,
        pass: worst <= 1.0 + 1e-12,
        rows,
    }
}

/// I_n^{(γ,α;β)}/B_n^{(α,β)} ≤ ((2n+γ+β+1)/γ)^{γ-α} for γ-1 < α < γ.
pub fn kl1_check(gamma: f64, beta: f64, n_max: u32) -> Result<BoundReport, EstimatesError> {
    if gamma <= 0.0 || beta <= -1.0 {
        return Err(EstimatesError::ParameterOutOfRange(format!(
            "need gamma > 0, beta > -1, got ({gamma}, {beta})"
        )));
    }
    let alphas: Vec<f64> = (1..=5).map(|t| gamma - 1.0 + t as f64 / 6.0).collect();
    let mut worst = 0.0f64;
    let mut worst_point = String::new();
    let mut rows = Vec::new();
    for &alpha in &alphas {
        for n in 0..=n_max {
            let i = connection_i(n, gamma, alpha, beta)?;
            let b = norm_b(n, JacobiParams::new(alpha, beta))?;
            let lhs = i / b;
            let rhs = ((2.0 * n as f64 + gamma + beta + 1.0) / gamma).powf(gamma - alpha);
            let ratio = lhs / rhs;
            rows.push(BoundRow {
                params: format!("gamma={gamma},alpha={alpha:.4},beta={beta}"),
                k: n as u64,
                lhs,
                rhs,
                ratio,
                pass: ratio <= 1.0 + 1e-10,
            });
            if ratio > worst {
                worst = ratio;
                worst_point = format!("alpha={alpha:.4}, n={n}");
            }
        }
    }
    Ok(BoundReport {
        bound_name: "norm_ratio_kl1".into(),
        parameter_grid: format!("gamma={gamma}, beta={beta}, 5 alphas in (gamma-1,gamma), n <= {n_max}"),
        worst_ratio: worst,
        worst_point,
        fitted_exponent: None,
        pass: worst <= 1.0 + 1e-10,
        rows,
    })
}

/// (I/B)/(2n+γ+β+1)^{(γ-α)/(1-ε)} stays bounded in n (covers the γ = 0 case
/// the sharp ratio bound excludes); the empirical sup is the reported constant.
pub fn dxsa1_check(
    gamma: u32,
    beta: u32,
    alpha: f64,
    epsilon: f64,
    n_max: u32,
) -> Result<BoundReport, EstimatesError> {
    let g = gamma as f64;
    if !(g - 1.0 < alpha && alpha < g) {
        return Err(EstimatesError::ParameterOutOfRange(format!(
            "need gamma-1 < alpha < gamma, got alpha={alpha}, gamma={gamma}"
        )));
    }
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(EstimatesError::ParameterOutOfRange(format!(
            "need 0 < epsilon < 1, got {epsilon}"
        )));
    }
    let b = beta as f64;
    let expnt = (g - alpha) / (1.0 - epsilon);
    let mut series = Vec::new();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_point = String::new();
    for n in 0..=n_max {
        let i = connection_i(n, g, alpha, b)?;
        let bb = norm_b(n, JacobiParams::new(alpha, b))?;
        let lhs = i / bb;
        let rhs = (2.0 * n as f64 + g + b + 1.0).powf(expnt);
        let c = lhs / rhs;
        series.push((n, c));
        rows.push(BoundRow {
            params: format!("gamma={gamma},beta={beta},alpha={alpha},eps={epsilon}"),
            k: n as u64,
            lhs,
            rhs,
            ratio: c,
            pass: true,
        });
        if c > worst {
            worst = c;
            worst_point = format!("n={n}");
        }
    }
    // boundedness: no upward trend on the tail
    let tail: Vec<(u32, f64)> = series
        .iter()
        .copied()
        .filter(|&(n, _)| n >= n_max / 2 && n >= 1)
        .collect();
    let (slope, _, _) = growth_fit(&tail)?;
    let pass = slope <= 0.05;
    Ok(BoundReport {
        bound_name: "norm_ratio_dxsa1".into(),
        parameter_grid: format!(
            "gamma={gamma}, beta={beta}, alpha={alpha}, epsilon={epsilon}, n <= {n_max}"
        ),
        worst_ratio: worst,
        worst_point,
        fitted_exponent: Some(slope),
        pass,
        rows,
    })
}

/// Shifted Gegenbauer weighted norms: the per-term ratio
/// (j-2k)(j+2μ-2k)/(j(j+2λ)) ≤ 1 exactly (μ ≤ λ), and the sequence
/// ℓ ↦ (b_{j-ℓ}^{(λ+ℓ)})² J_{j-ℓ}^{(λ+ℓ; μ+ℓ)} is non-increasing, bounded for
/// λ-1/2 < μ ≤ λ and O(j^{2(λ-μ)-1}) for μ < λ-1/2.
pub fn iin_check(
    lambda: f64,
    mu: f64,
    j_max: u32,
    ell_max: u32,
) -> Result<BoundReport, EstimatesError> {
    if lambda <= 0.0 || mu <= -0.5 {
        return Err(EstimatesError::ParameterOutOfRange(format!(
            "need lambda > 0, mu > -1/2, got ({lambda}, {mu})"
        )));
    }
    let mut worst = 0.0f64;
    let mut worst_point = String::new();
    let mut rows = Vec::new();

    // (i) exact per-term ratio check (f64 inputs are exact binary rationals)
    if mu <= lambda {
        let lam_r = Rational::from_f64(lambda).unwrap();
        let mu_r = Rational::from_f64(mu).unwrap();
        let two = Rational::from_f64(2.0).unwrap();
        for j in 1..=j_max.min(60) {
            let j_r = Rational::from_f64(j as f64).unwrap();
            for k in 0..=(j / 2) {
                let k_r = Rational::from_f64(k as f64).unwrap();
                let num = (&j_r - &two * &k_r) * (&j_r + &two * &mu_r - &two * &k_r);
                let den = &j_r * (&j_r + &two * &lam_r);
                assert!(num <= den, "per-term ratio exceeds 1 at j={j}, k={k}");
            }
        }
    }

    // (ii) shifted-norm sequence
    let shifted = |j: u32, ell: u32| -> Result<f64, EstimatesError> {
        let deg = j - ell;
        let b = gegenbauer_norm_b(deg, lambda + ell as f64)?;
        Ok(b * b * gegenbauer_j(deg, lambda + ell as f64, mu + ell as f64)?)
    };
    let mut top_series = Vec::new();
    for j in 1..=j_max {
        let mut prev = f64::INFINITY;
        for ell in 0..=ell_max.min(j) {
            let t = shifted(j, ell)?;
            let ratio = if prev.is_finite() { t / prev } else { 0.0 };
            if ratio > worst {
                worst = ratio;
                worst_point = format!("j={j}, ell={ell}");
            }
            rows.push(BoundRow {
                params: format!("lambda={lambda},mu={mu},ell={ell}"),
                k: j as u64,
                lhs: t,
                rhs: prev.min(f64::MAX),
                ratio,
                pass: ratio <= 1.0 + 1e-9,
            });
            prev = t;
        }
        top_series.push((j, shifted(j, 0)?));
    }
    let tail: Vec<(u32, f64)> = top_series
        .iter()
        .copied()
        .filter(|&(j, _)| j >= j_max / 2)
        .collect();
    let (slope, _, _) = growth_fit(&tail)?;
    let claim = if mu < lambda - 0.5 {
        Some(2.0 * (lambda - mu) - 1.0)
    } else if mu <= lambda {
        Some(0.0)
    } else {
        None
    };
    let growth_ok = match claim {
        Some(s) => slope <= s + 0.3,
        None => true,
    };
    let pass = worst <= 1.0 + 1e-9 && growth_ok;
    Ok(BoundReport {
        bound_name: "shifted_gegenbauer_norms".into(),
        parameter_grid: format!("lambda={lambda}, mu={mu}, j <= {j_max}, ell <= {ell_max}"),
        worst_ratio: worst,
        worst_point,
        fitted_exponent: Some(slope),
        pass,
        rows,
    })
}

/// Asymptotics of J_j^{(λ;μ)}: slope 2λ-2 for μ > λ-1/2, 4λ-2μ-3 for
/// μ < λ-1/2, with the printed leading constants.
pub fn j_asymptotic_check(lambda: f64, mu: f64, j_max: u32) -> Result<BoundReport, EstimatesError> {
    if lambda <= 0.0 || mu <= -0.5 {
        return Err(EstimatesError::ParameterOutOfRange(format!(
            "need lambda > 0, mu > -1/2, got ({lambda}, {mu})"
        )));
    }
    if (mu - (lambda - 0.5)).abs() < 1e-9 {
        return Err(EstimatesError::CriticalLine(mu));
    }
    let (slope_claim, ln_const) = if mu > lambda - 0.5 {
        (
            2.0 * lambda - 2.0,
            0.5 * std::f64::consts::PI.ln() + log_gamma(mu + 0.5 - lambda)?
                - (2.0 * lambda - 1.0) * 2f64.ln()
                - 2.0 * log_gamma(lambda)?
                - log_gamma(mu + 1.0 - lambda)?,
        )
    } else {
        (
            4.0 * lambda - 2.0 * mu - 3.0,
            0.5 * std::f64::consts::PI.ln()
                + log_gamma(lambda - mu - 0.5)?
                + log_gamma(mu + 0.5)?
                - (2.0 * lambda - 1.0) * 2f64.ln()
                - 2.0 * log_gamma(lambda)?
                - log_gamma(lambda - mu)?
                - log_gamma(2.0 * lambda - mu - 0.5)?,
        )
    };
    let mut series = Vec::new();
    let mut rows = Vec::new();
    for j in (j_max / 2).max(4)..=j_max {
        let v = gegenbauer_j(j, lambda, mu)?;
        series.push((j, v));
        rows.push(BoundRow {
            params: format!("lambda={lambda},mu={mu}"),
            k: j as u64,
            lhs: v,
            rhs: ln_const.exp() * (j as f64).powf(slope_claim),
            ratio: v / (ln_const.exp() * (j as f64).powf(slope_claim)),
            pass: true,
        });
    }
    let (slope, _, _) = growth_fit(&series)?;
    let const_ratio = series.last().map(|&(j, v)| {
        v / (ln_const.exp() * (j as f64).powf(slope_claim))
    });
    let const_ok = const_ratio
        .map(|r| (r - 1.0).abs() <= 0.15)
        .unwrap_or(false);
    let pass = (slope - slope_claim).abs() <= 0.3 && const_ok;
    Ok(BoundReport {
        bound_name: "gegenbauer_j_asymptotics".into(),
        parameter_grid: format!("lambda={lambda}, mu={mu}, j in [{}, {j_max}]", (j_max / 2).max(4)),
        worst_ratio: const_ratio.unwrap_or(f64::NAN),
        worst_point: format!("slope claim {slope_claim}"),
        fitted_exponent: Some(slope),
        pass,
        rows,
    })
}

/// Operator norm of ψ^{-β} P_k ψ^{-β} on L²(Ω): λ_max of the weighted Gram
/// W_ij = ⟨ψ^{-β}e_i, ψ^{-β}e_j⟩. Within fixed k the angular labels separate
/// the basis, so W is diagonal over (ℓ, j) and λ_max is the largest diagonal
/// entry; duplicated (p, q) slots share the same value.
pub fn projector_weighted_norm(
    cfg: GrushinConfig,
    k: u32,
    beta: f64,
    resolution: u32,
) -> Result<f64, EstimatesError> {
    let mut best = 0.0f64;
    for (ell, j, _) in admissible_pairs(cfg, k) {
        let idx = HarmonicIndex { k, ell, j, p: 1, q: 1 };
        let e = build_basis_element(cfg, idx)?.omega_function(true);
        let d = omega_inner_product(&e, &e, -2.0 * beta, cfg, resolution)?;
        if d > best {
            best = d;
        }
    }
    Ok(best)
}
