//! Jacobi and Gegenbauer polynomial evaluation plus the closed-form weighted
//! norms and connection-coefficient sums attached to them: B_n^{(a,b)},
//! I_n^{(γ,α;β)}, J_j^{(λ;μ)}, and the normalized Bernstein form g_n^{(a,b)}.
//!
//! Evaluation is by three-term recurrence (stable at high degree); all
//! Gamma-ratio prefactors are computed in log space with separate sign
//! tracking, and the connection sums accumulate with compensated summation.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecFunError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("domain error: {0}")]
    DomainError(String),
}

/// Exponent pair (a, b) of the Jacobi weight (1-x)^a (1+x)^b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams {
    pub a: f64,
    pub b: f64,
}

impl JacobiParams {
    pub fn new(a: f64, b: f64) -> Self {
        JacobiParams { a, b }
    }
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, 9 coefficients; relative error ≲ 1e-15).
pub fn log_gamma(x: f64) -> Result<f64, SpecFunError> {
    if x <= 0.0 {
        return Err(SpecFunError::DomainError(format!(
            "log_gamma needs x > 0, got {x}"
        )));
    }
    Ok(log_gamma_unchecked(x))
}

fn log_gamma_unchecked(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π/sin(πx); x ∈ (0, 0.5) here
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - log_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Pochhammer (x)_k as (sign, ln|value|); handles negative x by direct product.
fn ln_poch(x: f64, k: u32) -> (f64, f64) {
    let mut sign = 1.0;
    let mut ln = 0.0;
    for i in 0..k {
        let f = x + i as f64;
        if f == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln += f.abs().ln();
    }
    (sign, ln)
}

/// Pochhammer (x)_k in plain f64 (safe for small k).
pub fn pochhammer(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x + i as f64))
}

/// P_deg^{(a,b)}(x) by the three-term recurrence.
pub fn jacobi_eval(deg: u32, params: JacobiParams, x: f64) -> f64 {
    *jacobi_eval_all(deg, params, x).last().unwrap()
}

/// Values P_0 .. P_deg at x (one recurrence sweep).
pub fn jacobi_eval_all(deg: u32, params: JacobiParams, x: f64) -> Vec<f64> {
    let (a, b) = (params.a, params.b);
    let mut out = Vec::with_capacity(deg as usize + 1);
    out.push(1.0);
    if deg == 0 {
        return out;
    }
    out.push(0.5 * ((a + b + 2.0) * x + a - b));
    for n in 2..=deg {
        let n = n as f64;
        let c = 2.0 * n + a + b;
        // 2n(n+a+b)(c-2) P_n = (c-1)[c(c-2)x + a²-b²] P_{n-1} - 2(n+a-1)(n+b-1)c P_{n-2}
        let p1 = out[out.len() - 1];
        let p2 = out[out.len() - 2];
        let num = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b) * p1
            - 2.0 * (n + a - 1.0) * (n + b - 1.0) * c * p2;
        out.push(num / (2.0 * n * (n + a + b) * (c - 2.0)));
    }
    out
}

/// d/dx P_deg^{(a,b)}(x) = (deg+a+b+1)/2 · P_{deg-1}^{(a+1,b+1)}(x).
pub fn jacobi_deriv(deg: u32, params: JacobiParams, x: f64) -> f64 {
    if deg == 0 {
        return 0.0;
    }
    0.5 * (deg as f64 + params.a + params.b + 1.0)
        * jacobi_eval(deg - 1, JacobiParams::new(params.a + 1.0, params.b + 1.0), x)
}

/// C_deg^{(λ)}(x) via the Jacobi rescaling C_n^{(λ)} = ((2λ)_n/(λ+1/2)_n) P_n^{(λ-1/2,λ-1/2)}.
pub fn gegenbauer_eval(deg: u32, lambda: f64, x: f64) -> Result<f64, SpecFunError> {
    if lambda == 0.0 {
        return Err(SpecFunError::DegenerateParameter(
            "gegenbauer lambda = 0".into(),
        ));
    }
    let mut pref = 1.0;
    for i in 0..deg {
        pref *= (2.0 * lambda + i as f64) / (lambda + 0.5 + i as f64);
    }
    Ok(pref * jacobi_eval(deg, JacobiParams::new(lambda - 0.5, lambda - 0.5), x))
}

/// B_deg^{(a,b)} = ∫₀^{π/2} sin^{2a+1}φ cos^{2b+1}φ (P_deg^{(a,b)}(cos 2φ))² dφ
/// by its closed form.
pub fn norm_b(deg: u32, params: JacobiParams) -> Result<f64, SpecFunError> {
    let (a, b) = (params.a, params.b);
    if a <= -1.0 || b <= -1.0 {
        return Err(SpecFunError::ParameterOutOfRange(format!(
            "norm_B needs a, b > -1, got ({a}, {b})"
        )));
    }
    let n = deg as f64;
    let ln = log_gamma(n + a + 1.0)? + log_gamma(n + b + 1.0)?
        - log_gamma(n + a + b + 1.0)?
        - log_gamma(n + 1.0)?;
    Ok(ln.exp() / (2.0 * (2.0 * n + a + b + 1.0)))
}

/// ln B_deg^{(a,b)}; useful where B itself would underflow.
pub fn ln_norm_b(deg: u32, params: JacobiParams) -> Result<f64, SpecFunError> {
    let (a, b) = (params.a, params.b);
    if a <= -1.0 || b <= -1.0 {
        return Err(SpecFunError::ParameterOutOfRange(format!(
            "norm_B needs a, b > -1, got ({a}, {b})"
        )));
    }
    let n = deg as f64;
    Ok(log_gamma(n + a + 1.0)? + log_gamma(n + b + 1.0)?
        - log_gamma(n + a + b + 1.0)?
        - log_gamma(n + 1.0)?
        - (2.0 * (2.0 * n + a + b + 1.0)).ln())
}

/// The uniformly normalized Jacobi form
/// g_n^{(a,b)}(x) = (Γ(n+1)Γ(n+a+b+1)/(Γ(n+a+1)Γ(n+b+1)))^{1/2}
///                  ((1-x)/2)^{a/2} ((1+x)/2)^{b/2} P_n^{(a,b)}(x).
pub fn normalized_g(deg: u32, params: JacobiParams, x: f64) -> Result<f64, SpecFunError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(SpecFunError::DomainError(format!("|x| > 1: {x}")));
    }
    if params.a < 0.0 || params.b < 0.0 {
        return Err(SpecFunError::ParameterOutOfRange(
            "normalized_g needs a, b >= 0".into(),
        ));
    }
    let n = deg as f64;
    let (a, b) = (params.a, params.b);
    let ln_pref = 0.5
        * (log_gamma(n + 1.0)? + log_gamma(n + a + b + 1.0)?
            - log_gamma(n + a + 1.0)?
            - log_gamma(n + b + 1.0)?);
    let wa = ((1.0 - x) / 2.0).max(0.0);
    let wb = ((1.0 + x) / 2.0).max(0.0);
    Ok(ln_pref.exp() * wa.powf(a / 2.0) * wb.powf(b / 2.0) * jacobi_eval(deg, params, x))
}

/// Kahan-compensated accumulator for the connection sums.
#[derive(Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// I_deg^{(γ,α;β)} = ∫₀^{π/2} (P_deg^{(γ,β)}(cos 2θ))² sin^{2α+1}θ cos^{2β+1}θ dθ
/// by the connection-coefficient finite sum.
pub fn connection_i(deg: u32, gamma: f64, alpha: f64, beta: f64) -> Result<f64, SpecFunError> {
    if gamma <= -1.0 || alpha <= -1.0 || beta <= -1.0 {
        return Err(SpecFunError::ParameterOutOfRange(format!(
            "connection_I needs gamma, alpha, beta > -1, got ({gamma}, {alpha}, {beta})"
        )));
    }
    let n = deg;
    let nf = n as f64;
    // prefactor ((β+1)_n / (α+β+2)_n)², in logs
    let (_, ln_b1n) = ln_poch(beta + 1.0, n);
    let (_, ln_ab2n) = ln_poch(alpha + beta + 2.0, n);
    let ln_pref = 2.0 * (ln_b1n - ln_ab2n);
    // each summand is a square times B_k ≥ 0: sum largest-first in log space
    let mut logs = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let (_, ln_ga) = ln_poch(gamma - alpha, n - k);
        let (_, ln_ab1) = ln_poch(alpha + beta + 1.0, k);
        let (_, ln_bg) = ln_poch(beta + gamma + nf + 1.0, k);
        let (_, ln_fac) = ln_poch(1.0, n - k);
        let (_, ln_b1) = ln_poch(beta + 1.0, k);
        let (_, ln_abn2) = ln_poch(alpha + beta + nf + 2.0, k);
        let kf = k as f64;
        let ratio = (alpha + beta + 2.0 * kf + 1.0) / (alpha + beta + 1.0);
        let ln_coef = ratio.abs().ln() + ln_ga + ln_ab1 + ln_bg - ln_fac - ln_b1 - ln_abn2;
        let ln_bk = ln_norm_b(k, JacobiParams::new(alpha, beta))?;
        logs.push(2.0 * ln_coef + ln_bk);
    }
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mut acc = Kahan::default();
    for l in logs {
        acc.add((l - max).exp());
    }
    Ok((ln_pref + max).exp() * acc.sum)
}

/// The closed form I_deg^{(γ,γ-1;β)} = Γ(γ+n+1)Γ(β+n+1)/(2γ Γ(γ+β+n+1) n!).
pub fn connection_i_special(deg: u32, gamma: f64, beta: f64) -> Result<f64, SpecFunError> {
    if gamma <= 0.0 || beta <= -1.0 {
        return Err(SpecFunError::ParameterOutOfRange(
            "special form needs gamma > 0, beta > -1".into(),
        ));
    }
    let n = deg as f64;
    let ln = log_gamma(gamma + n + 1.0)? + log_gamma(beta + n + 1.0)?
        - log_gamma(gamma + beta + n + 1.0)?
        - log_gamma(n + 1.0)?;
    Ok(ln.exp() / (2.0 * gamma))
}

/// J_deg^{(λ;μ)} = ∫₀^π |C_deg^{(λ)}(cos θ)|² sin^{2μ}θ dθ by the finite sum.
pub fn gegenbauer_j(deg: u32, lambda: f64, mu: f64) -> Result<f64, SpecFunError> {
    if lambda <= 0.0 || mu <= -0.5 {
        return Err(SpecFunError::ParameterOutOfRange(format!(
            "gegenbauer_J needs lambda > 0, mu > -1/2, got ({lambda}, {mu})"
        )));
    }
    if mu == 0.0 {
        return Err(SpecFunError::DegenerateParameter(
            "gegenbauer_J has a 1/mu prefactor; mu = 0 rejected".into(),
        ));
    }
    let j = deg;
    let jf = j as f64;
    let ln_pref = 0.5 * std::f64::consts::PI.ln() + log_gamma(mu + 0.5)? - log_gamma(mu + 1.0)?;
    // terms: (λ)_{j-k}² (λ-μ)_k² / ((μ+1)_{j-k}² (k!)²) · (j+μ-2k) · (2μ)_{j-2k}/(j-2k)!
    let mut entries: Vec<(f64, f64)> = Vec::with_capacity(j as usize / 2 + 1);
    for k in 0..=(j / 2) {
        let (_, ln_l) = ln_poch(lambda, j - k);
        let (_, ln_lm) = ln_poch(lambda - mu, k);
        let (_, ln_m1) = ln_poch(mu + 1.0, j - k);
        let (_, ln_kf) = ln_poch(1.0, k);
        let (s2m, ln_2m) = ln_poch(2.0 * mu, j - 2 * k);
        let (_, ln_jk) = ln_poch(1.0, j - 2 * k);
        let kf = k as f64;
        let lin = jf + mu - 2.0 * kf;
        let sign = s2m * lin.signum();
        let ln = 2.0 * (ln_l + ln_lm - ln_m1 - ln_kf) + lin.abs().ln() + ln_2m - ln_jk;
        entries.push((sign, ln));
    }
    let max = entries
        .iter()
        .map(|&(_, l)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mut acc = Kahan::default();
    for (s, l) in entries {
        acc.add(s * (l - max).exp());
    }
    Ok((ln_pref + max).exp() * acc.sum / mu)
}

/// Gegenbauer orthogonality normalizer b_j^{(λ)} with
/// (b_j^{(λ)})^{-2} = ∫₀^π (C_j^{(λ)}(cos θ))² sin^{2λ}θ dθ
///                  = 2^{1-2λ} π Γ(j+2λ) / (Γ(λ)² (j+λ) Γ(j+1)).
pub fn gegenbauer_norm_b(deg: u32, lambda: f64) -> Result<f64, SpecFunError> {
    if lambda <= -0.5 || lambda == 0.0 {
        return Err(SpecFunError::DegenerateParameter(format!(
            "b_j^(lambda) needs lambda > -1/2, lambda != 0, got {lambda}"
        )));
    }
    let j = deg as f64;
    let ln_inv_sq = (1.0 - 2.0 * lambda) * 2f64.ln() + std::f64::consts::PI.ln()
        + log_gamma(j + 2.0 * lambda)?
        - 2.0 * log_gamma(lambda)?
        - (j + lambda).ln()
        - log_gamma(j + 1.0)?;
    Ok((-0.5 * ln_inv_sq).exp())
}
