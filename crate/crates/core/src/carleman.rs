//! Carleman-inequality layer: the exact exponent table for the two-sided
//! weighted L^p→L^q estimate, the complex spectral symbol a_s(η,k), a
//! derivative-based residual check of the eigenrelation
//! ρ^{-s+2}Δ_α(ρ^{s+iη}u_k) = -(k-(s+iη))(k+Q-2+s+iη) ψ u_k,
//! and a desk-scale evaluation of both sides of the inequality on separable
//! test functions (smooth radial bump × radial-profile harmonic), using the
//! factorization ρ^{-Q} dx dy = (α+1)^{-m} ψ^{-1} dt dΩ with t = ln ρ.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::config::GrushinConfig;
use crate::harmonics::{h_profile, HarmonicIndex, HarmonicsError};
use crate::quadrature::{gauss_jacobi_rule, sphere_area, QuadError};
use crate::ratpoly::{rat, rational_to_f64, Rational};
use crate::specfun::{gegenbauer_eval, jacobi_eval, JacobiParams, SpecFunError};

#[derive(Debug, Error)]
pub enum CarlemanError {
    #[error("no exponent-table coverage: {0}")]
    UncoveredCase(String),
    #[error("symbol pole: {0}")]
    PoleHit(String),
    #[error("test function not smooth/admissible: {0}")]
    NonSmoothTestFunction(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn rational_str<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// One row of the exponent table: the dual pair (p, q) of the two-sided
/// estimate and the strict lower bound for the potential-space exponent r.
/// The gap identity 1/p − 1/q = 1/r_threshold holds on every row; on the
/// generic m ≥ 2 rows r_threshold = (α+1)(n+m−2)+1.
#[derive(Clone, Debug, Serialize)]
pub struct ExponentRow {
    pub n: usize,
    pub m: usize,
    pub alpha: u32,
    #[serde(serialize_with = "rational_str")]
    pub p: Rational,
    #[serde(serialize_with = "rational_str")]
    pub q: Rational,
    #[serde(serialize_with = "rational_str")]
    pub r_threshold: Rational,
    /// Which table branch applied.
    pub branch: String,
}

/// Exact exponents for the covered (n, m, α) branches.
pub fn exponents(cfg: GrushinConfig) -> Result<ExponentRow, CarlemanError> {
    let (n, m, a) = (cfg.n as i64, cfg.m as i64, cfg.alpha as i64);
    if cfg.alpha == 0 {
        return Err(CarlemanError::UncoveredCase(format!(
            "{cfg}: alpha = 0 (Euclidean) is outside the table"
        )));
    }
    if n < 2 {
        return Err(CarlemanError::UncoveredCase(format!("{cfg}: n = 1")));
    }
    let row = |p: Rational, q: Rational, branch: &str| -> ExponentRow {
        let gap = p.recip() - q.recip();
        ExponentRow {
            n: cfg.n,
            m: cfg.m,
            alpha: cfg.alpha,
            p,
            q,
            r_threshold: gap.recip(),
            branch: branch.into(),
        }
    };
    if m == 1 {
        if a == 1 {
            return Ok(row(rat(2 * n, n + 1), rat(2 * n, n - 1), "m=1, alpha=1"));
        }
        if n <= 3 {
            return Ok(row(
                rat(6 * a + 10, 3 * a + 7),
                rat(6 * a + 10, 3 * a + 3),
                "m=1, n<=3, alpha>=2",
            ));
        }
        let d = (a + 1) * (n - 1);
        return Ok(row(
            rat(4 + 2 * d, 4 + d),
            rat(4 + 2 * d, d),
            "m=1, n>=4, alpha>=2",
        ));
    }
    // m >= 2: exponents are 2(d + 1/(α+1))/(d + 2/(α+1)) and 2(d + 1/(α+1))/d
    // with d = m+2 on the (n=3, α>=2) branch and d = n+m-2 otherwise
    let generic = |d: i64, branch: &str| -> ExponentRow {
        let num = rat(2 * (d * (a + 1) + 1), 1);
        row(
            &num / rat(d * (a + 1) + 2, 1),
            &num / rat(d * (a + 1), 1),
            branch,
        )
    };
    if n == 3 && a >= 2 {
        return Ok(generic(m + 2, "m>=2, n=3, alpha>=2"));
    }
    if (n == 2 || n == 3) && a == 1 {
        return Ok(generic(n + m - 2, "m>=2, n in {2,3}, alpha=1"));
    }
    if n >= 4 {
        return Ok(generic(n + m - 2, "m>=2, n>=4"));
    }
    Err(CarlemanError::UncoveredCase(format!(
        "{cfg}: n=2, m>=2, alpha>=2 has no table row"
    )))
}

/// The spectral symbol a_s(η, k) = −((k−(s+iη))(k+Q−2+s+iη))^{-1}.
pub fn symbol_a(s: f64, eta: f64, k: u32, q: u64) -> Result<Complex64, CarlemanError> {
    let sh = Complex64::new(s, eta);
    let den = (Complex64::from(k as f64) - sh) * (Complex64::from(k as f64 + q as f64 - 2.0) + sh);
    if den.norm() < 1e-14 {
        return Err(CarlemanError::PoleHit(format!(
            "denominator vanishes at s={s}, eta={eta}, k={k}"
        )));
    }
    Ok(-den.inv())
}

/// Dyadic support predicate |k − s − iη| ∈ [δ 2^{γ-2}, 2^γ] (diagnostics only).
pub fn dyadic_support(s: f64, eta: f64, k: u32, delta: f64, gamma: i32) -> bool {
    let d = Complex64::new(k as f64 - s, -eta).norm();
    d >= delta * 2f64.powi(gamma - 2) && d <= 2f64.powi(gamma)
}

/// h, h′, h″ of the φ-profile, from the closed derivative formulas of the
/// Jacobi/Gegenbauer families (no finite differences).
pub fn h_profile_derivs(
    cfg: GrushinConfig,
    ell: u32,
    j: u32,
    ktilde: u32,
    phi: f64,
) -> (f64, f64, f64) {
    let av = cfg.step() as f64;
    let mu = (cfg.n as f64 - 2.0 + 2.0 * ell as f64) / (2.0 * av);
    let c = ell as f64 / av;
    let (sn, cs) = (phi.sin(), phi.cos());
    if cfg.m == 1 {
        // h = sin^c φ C_d^{(λ)}(cos φ)
        let d = 2 * ktilde + j;
        let lam = mu + 0.5;
        let u = cs;
        let p0 = gegenbauer_eval(d, lam, u).unwrap_or(0.0);
        let p1 = if d >= 1 {
            2.0 * lam * gegenbauer_eval(d - 1, lam + 1.0, u).unwrap_or(0.0)
        } else {
            0.0
        };
        let p2 = if d >= 2 {
            4.0 * lam * (lam + 1.0) * gegenbauer_eval(d - 2, lam + 2.0, u).unwrap_or(0.0)
        } else {
            0.0
        };
        let w = sn.max(0.0).powf(c);
        let w1 = c * (cs / sn) * w;
        let w2 = ((c * cs / sn).powi(2) - c / (sn * sn)) * w;
        let (u1, u2) = (-sn, -cs);
        let h = w * p0;
        let h1 = w1 * p0 + w * p1 * u1;
        let h2 = w2 * p0 + 2.0 * w1 * p1 * u1 + w * (p2 * u1 * u1 + p1 * u2);
        (h, h1, h2)
    } else {
        // h = cos^j φ sin^c φ P_k̃^{(μ,γ-1)}(cos 2φ)
        let gamma = j as f64 + cfg.m as f64 / 2.0;
        let params = JacobiParams::new(mu, gamma - 1.0);
        let u = (2.0 * phi).cos();
        let p0 = jacobi_eval(ktilde, params, u);
        let p1 = if ktilde >= 1 {
            0.5 * (ktilde as f64 + mu + gamma)
                * jacobi_eval(ktilde - 1, JacobiParams::new(mu + 1.0, gamma), u)
        } else {
            0.0
        };
        let p2 = if ktilde >= 2 {
            0.25 * (ktilde as f64 + mu + gamma) * (ktilde as f64 + mu + gamma + 1.0)
                * jacobi_eval(ktilde - 2, JacobiParams::new(mu + 2.0, gamma + 1.0), u)
        } else {
            0.0
        };
        let jf = j as f64;
        let w = cs.powi(j as i32) * sn.max(0.0).powf(c);
        let lw1 = c * cs / sn - jf * sn / cs; // w'/w
        let w1 = lw1 * w;
        let w2 = (lw1 * lw1 - c / (sn * sn) - jf / (cs * cs)) * w;
        let (u1, u2) = (-2.0 * (2.0 * phi).sin(), -4.0 * u);
        let h = w * p0;
        let h1 = w1 * p0 + w * p1 * u1;
        let h2 = w2 * p0 + 2.0 * w1 * p1 * u1 + w * (p2 * u1 * u1 + p1 * u2);
        (h, h1, h2)
    }
}

/// Δ_σ h evaluated from the derivative formulas plus the exact spherical
/// eigenvalues: (α+1)²h″ + [(n+α−1)(α+1)cot φ − (m−1)(α+1)² tan φ]h′
/// − ℓ(ℓ+n−2) sin^{-2}φ h − (α+1)² j(j+m−2) cos^{-2}φ h.
pub fn delta_sigma_h(cfg: GrushinConfig, ell: u32, j: u32, ktilde: u32, phi: f64) -> f64 {
    let av = cfg.step() as f64;
    let (h, h1, h2) = h_profile_derivs(cfg, ell, j, ktilde, phi);
    let (sn, cs) = (phi.sin(), phi.cos());
    let mut v = av * av * h2
        + ((cfg.n as f64 + cfg.alpha as f64 - 1.0) * av * cs / sn
            - (cfg.m as f64 - 1.0) * av * av * sn / cs)
            * h1;
    if ell > 0 {
        v -= ell as f64 * (ell as f64 + cfg.n as f64 - 2.0) / (sn * sn) * h;
    }
    let jf = j as f64;
    if j > 0 && cfg.m >= 2 {
        v -= av * av * jf * (jf + cfg.m as f64 - 2.0) / (cs * cs) * h;
    }
    v
}

/// Max over a φ-grid of the (scale-normalized) residual of the eigenrelation
/// ρ^{-s+2}Δ_α(ρ^{s+iη}u_k) = −(k−(s+iη))(k+Q−2+s+iη) ψ u_k, with Δ_α applied
/// through its polar form and Δ_σ computed from derivatives (not from the
/// claimed eigenvalue). Residuals are divided by (1+|s+iη|)² max|h|.
pub fn eigenrelation_residual(
    cfg: GrushinConfig,
    index: HarmonicIndex,
    s: f64,
    eta: f64,
    sample_points: usize,
) -> Result<f64, CarlemanError> {
    let kt = index.ktilde(cfg).ok_or_else(|| {
        CarlemanError::ParameterOutOfRange(format!("inadmissible index {index:?} for {cfg}"))
    })?;
    let upper = if cfg.m == 1 {
        std::f64::consts::PI
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let a = Complex64::new(s, eta);
    let qf = cfg.q_f64();
    let (k, ell, j) = (index.k, index.ell, index.j);
    let mut worst = 0.0f64;
    let mut hmax = 0.0f64;
    let mut residuals = Vec::with_capacity(sample_points);
    for i in 0..sample_points {
        let phi = upper * (i as f64 + 0.5) / sample_points as f64;
        let h = h_profile(cfg, ell, j, kt, phi);
        hmax = hmax.max(h.abs());
        let dsh = delta_sigma_h(cfg, ell, j, kt, phi);
        // ρ^{-a+2}Δ_α(ρ^a h Y Y)/ψ = a(a+Q−2)h + Δ_σ h, against the claimed
        // −(k−a)(k+Q−2+a)h
        let lhs = a * (a + qf - 2.0) * h + dsh;
        let rhs = -(Complex64::from(k as f64) - a) * (Complex64::from(k as f64 + qf - 2.0) + a) * h;
        residuals.push((lhs - rhs).norm());
    }
    let scale = (1.0 + a.norm()).powi(2) * hmax.max(1e-300);
    for r in residuals {
        worst = worst.max(r / scale);
    }
    Ok(worst)
}

/// Built-in separable test function: amplitude · f(ρ) · ρ^k h_{k,0,0}(φ), with
/// f the C^∞ bump exp(−c/((ρ−r0)(r1−ρ))) supported on [r0, r1]. The
/// `sharpness` c makes the family closed under anisotropic dilation:
/// f(λρ) is the bump with parameters (r0/λ, r1/λ, c/λ²).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TestFamily {
    /// Degree of the radial-profile harmonic factor (ℓ = j = 0; must satisfy
    /// k ≡ 0 mod 2(α+1)).
    pub k: u32,
    pub r0: f64,
    pub r1: f64,
    pub sharpness: f64,
    pub amplitude: f64,
}

impl TestFamily {
    pub fn bump(r0: f64, r1: f64) -> Self {
        TestFamily { k: 0, r0, r1, sharpness: 1.0, amplitude: 1.0 }
    }

    /// The pullback of this family under δ_λ, up to a constant multiple.
    pub fn dilate(self, lambda: f64) -> Self {
        TestFamily {
            r0: self.r0 / lambda,
            r1: self.r1 / lambda,
            sharpness: self.sharpness / (lambda * lambda),
            ..self
        }
    }
}

fn bump_derivs(r0: f64, r1: f64, c: f64, rho: f64) -> (f64, f64, f64) {
    if rho <= r0 || rho >= r1 {
        return (0.0, 0.0, 0.0);
    }
    let w = (rho - r0) * (r1 - rho);
    let w1 = r0 + r1 - 2.0 * rho;
    let f = (-c / w).exp();
    let f1 = c * f * w1 / (w * w);
    let f2 = f
        * ((c * w1 / (w * w)).powi(2) + c * (-2.0) / (w * w)
            - 2.0 * c * w1 * w1 / (w * w * w));
    (f, f1, f2)
}

/// log of ∫ e^{c·t} |W(e^t)|^e dt over [ln r0, ln r1], max-shifted.
fn ln_t_integral(c: f64, e: f64, r0: f64, r1: f64, w: impl Fn(f64) -> f64, npts: u32) -> f64 {
    let rule = gauss_jacobi_rule(0.0, 0.0, npts).unwrap();
    let (t0, t1) = (r0.ln(), r1.ln());
    let half = (t1 - t0) / 2.0;
    let mid = (t1 + t0) / 2.0;
    let mut terms: Vec<f64> = Vec::with_capacity(rule.nodes.len());
    for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let t = mid + half * x;
        let v = w(t.exp()).abs();
        if v > 0.0 {
            terms.push(c * t + e * v.ln() + (wt * half).ln());
        }
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|&t| (t - m).exp()).sum::<f64>().ln()
}

/// log of ∫_Ω |h(φ)|^e ψ^{x} dΩ (radial-profile h, ℓ = j = 0), by folding all
/// sin/cos powers into a Gauss–Jacobi weight.
fn ln_omega_integral(
    cfg: GrushinConfig,
    ktilde: u32,
    e: f64,
    psi_exp: f64,
    npts: u32,
) -> Result<f64, CarlemanError> {
    let av = cfg.step() as f64;
    let e0 = (cfg.n as f64 - 2.0) / av + 1.0;
    let s_exp = e0 + 2.0 * cfg.alpha as f64 * psi_exp / av;
    let area1 = sphere_area(cfg.n);
    if cfg.m == 1 {
        let a = (s_exp - 1.0) / 2.0;
        if a <= -1.0 {
            return Err(CarlemanError::ParameterOutOfRange(format!(
                "non-integrable weight exponent {a}"
            )));
        }
        let d = 2 * ktilde; // ℓ = j = 0 requires even Gegenbauer degree
        let lam = (cfg.n as f64 - 2.0) / (2.0 * av) + 0.5;
        let rule = gauss_jacobi_rule(a, a, npts)?;
        let v = rule.integrate(|t| gegenbauer_eval(d, lam, t).unwrap_or(0.0).abs().powf(e));
        Ok(v.ln() + area1.ln())
    } else {
        let c_exp = cfg.m as f64 - 1.0;
        let a = (s_exp - 1.0) / 2.0;
        let b = (c_exp - 1.0) / 2.0;
        if a <= -1.0 || b <= -1.0 {
            return Err(CarlemanError::ParameterOutOfRange(format!(
                "non-integrable weight exponents ({a}, {b})"
            )));
        }
        let mu = (cfg.n as f64 - 2.0) / (2.0 * av);
        let params = JacobiParams::new(mu, cfg.m as f64 / 2.0 - 1.0);
        let rule = gauss_jacobi_rule(a, b, npts)?;
        let v = rule.integrate(|t| jacobi_eval(ktilde, params, t).abs().powf(e));
        let pref = -((s_exp + c_exp) / 2.0 + 1.0) * 2f64.ln();
        Ok(v.ln() + pref + area1.ln() + sphere_area(cfg.m).ln())
    }
}

/// Both sides of the two-sided estimate on a built-in test function:
/// lhs = ‖ρ^{-s}ψ^ε g‖_{L^q(ρ^{-Q}dxdy)},
/// rhs = ‖ρ^{-s+2}ψ^{-ε}Δ_α g‖_{L^p(ρ^{-Q}dxdy)}, with (p, q) from the
/// exponent table. Returns (lhs, rhs, lhs/rhs).
pub fn carleman_ratio(
    cfg: GrushinConfig,
    s: f64,
    epsilon: f64,
    family: TestFamily,
) -> Result<(f64, f64, f64), CarlemanError> {
    if !(0.0 < epsilon && epsilon < 0.125) {
        return Err(CarlemanError::ParameterOutOfRange(format!(
            "need 0 < epsilon < 1/8, got {epsilon}"
        )));
    }
    if (s - s.round()).abs() < 1e-9 {
        return Err(CarlemanError::ParameterOutOfRange(format!(
            "need dist(s, N) > 0, got s = {s}"
        )));
    }
    if !(0.0 < family.r0 && family.r0 < family.r1)
        || !(family.sharpness > 0.0)
        || family.amplitude == 0.0
    {
        return Err(CarlemanError::NonSmoothTestFunction(format!(
            "bump support [{}, {}] invalid",
            family.r0, family.r1
        )));
    }
    let step = 2 * cfg.step();
    if family.k % step != 0 {
        return Err(CarlemanError::NonSmoothTestFunction(format!(
            "k = {} not admissible for the radial-profile family (need k ≡ 0 mod {step})",
            family.k
        )));
    }
    let ktilde = family.k / step;
    let row = exponents(cfg)?;
    let p = rational_to_f64(&row.p);
    let q = rational_to_f64(&row.q);
    let kf = family.k as f64;
    let qdim = cfg.q_f64();
    let amp = family.amplitude.abs();
    let (r0, r1, sharp) = (family.r0, family.r1, family.sharpness);
    // F(ρ) = amplitude f(ρ) ρ^k and G = F″ + (Q−1)F′/ρ − k(k+Q−2)F/ρ²
    let ffun = move |rho: f64| {
        let (f, _, _) = bump_derivs(r0, r1, sharp, rho);
        amp * f * rho.powf(kf)
    };
    let gfun = move |rho: f64| {
        let (f, f1, f2) = bump_derivs(r0, r1, sharp, rho);
        let rk = rho.powf(kf);
        let fv = f * rk;
        let fp = f1 * rk + kf * f * rk / rho;
        let fpp = f2 * rk + 2.0 * kf * f1 * rk / rho + kf * (kf - 1.0) * f * rk / (rho * rho);
        amp * (fpp + (qdim - 1.0) * fp / rho - kf * (kf + qdim - 2.0) * fv / (rho * rho))
    };
    let pref = -(cfg.m as f64) * (cfg.step() as f64).ln();
    let npts_t = 240;
    let npts_phi = 160;
    let ln_lhs = (ln_t_integral(-s * q, q, r0, r1, ffun, npts_t)
        + ln_omega_integral(cfg, ktilde, q, epsilon * q - 1.0, npts_phi)?
        + pref)
        / q;
    let ln_rhs = (ln_t_integral((-s + 2.0) * p, p, r0, r1, gfun, npts_t)
        + ln_omega_integral(cfg, ktilde, p, (1.0 - epsilon) * p - 1.0, npts_phi)?
        + pref)
        / p;
    Ok((ln_lhs.exp(), ln_rhs.exp(), (ln_lhs - ln_rhs).exp()))
}
