//! The sl₂ spectral layer over the Grushin-harmonic decomposition.
//!
//! With 𝓛_α = ψ(φ)^{-1} Δ_α, the eigenrelation 𝓛_α(ρ^a g_k) =
//! (a−k)(a+k+Q−2) ρ^{a-2} g_k turns a shell decomposition
//! f = Σ_p ρ^{2p} h_{k-2p} into a finite-dimensional diagonal model: every
//! identity about 𝓛_α, ρ² and the Euler operator becomes exact rational
//! arithmetic on shell scalars. The Proj coefficients that extract a single
//! shell are validated by telescoping, with no floating point anywhere.
//! A separate harness measures the Fischer-type decomposition numerically
//! (it reports masses and residuals, it does not assert them).

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::config::GrushinConfig;
use crate::harmonics::{build_basis, restrict_to_omega, HarmonicsError};
use crate::quadrature::{omega_inner_product, QuadError};
use crate::ratpoly::{delta_degree, rat_int, RatPolyError, Rational, RationalPolynomial};

#[derive(Debug, Error)]
pub enum FischerError {
    #[error("invalid shell: {0}")]
    InvalidShell(String),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    RatPoly(#[from] RatPolyError),
}

/// A δ-degree-k function Σ_p ρ^{2p}·(shell-p member of 𝓗_{k-2p}^α), stored as
/// coordinate vectors in the normalized harmonic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRep {
    pub k: u32,
    /// shells[p] holds the coordinates of the degree-(k−2p) harmonic.
    pub shells: Vec<Vec<Rational>>,
}

impl SpectralRep {
    pub fn zero(k: u32) -> Self {
        let shells = (0..=(k / 2)).map(|_| Vec::new()).collect();
        SpectralRep { k, shells }
    }

    /// Unit rep: a single 1 in shell p (one abstract coordinate).
    pub fn unit(k: u32, p: usize) -> Self {
        let mut rep = SpectralRep::zero(k);
        rep.shells[p] = vec![Rational::one()];
        rep
    }

    pub fn is_zero(&self) -> bool {
        self.shells
            .iter()
            .all(|s| s.iter().all(|c| c.is_zero()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SpectralRep {
            k: self.k,
            shells: self
                .shells
                .iter()
                .map(|s| s.iter().map(|v| v * c).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        let len = self.shells.len().max(other.shells.len());
        let mut shells = Vec::with_capacity(len);
        for p in 0..len {
            let a = self.shells.get(p).cloned().unwrap_or_default();
            let b = other.shells.get(p).cloned().unwrap_or_default();
            let width = a.len().max(b.len());
            let mut s = vec![Rational::zero(); width];
            for (i, v) in a.into_iter().enumerate() {
                s[i] += v;
            }
            for (i, v) in b.into_iter().enumerate() {
                s[i] += v;
            }
            shells.push(s);
        }
        SpectralRep { k: self.k, shells }
    }
}

/// 𝓛_α on a shell decomposition: shell p of harmonic degree k−2p picks up the
/// factor (a−s)(a+s+Q−2) = 2p(2p + 2(k−2p) + Q − 2) and drops to shell p−1 of
/// the degree-(k−2) rep; the harmonic top shell is annihilated.
pub fn spectral_l(cfg: GrushinConfig, rep: &SpectralRep) -> SpectralRep {
    let q = cfg.q() as i64;
    let k2 = rep.k.saturating_sub(2);
    let mut out = SpectralRep::zero(k2);
    for (p, shell) in rep.shells.iter().enumerate().skip(1) {
        if rep.k < 2 * p as u32 {
            continue;
        }
        let s = (rep.k - 2 * p as u32) as i64;
        let factor = rat_int(2 * p as i64) * rat_int(2 * p as i64 + 2 * s + q - 2);
        out.shells[p - 1] = shell.iter().map(|c| c * &factor).collect();
    }
    out
}

/// Multiplication by ρ²: shell p moves to shell p+1 of the degree-(k+2) rep.
pub fn spectral_rho2(rep: &SpectralRep) -> SpectralRep {
    let mut out = SpectralRep::zero(rep.k + 2);
    for (p, shell) in rep.shells.iter().enumerate() {
        out.shells[p + 1] = shell.clone();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjCoefficients {
    pub k: u32,
    pub ell: u32,
    /// α_j, j = 0..⌊k/2⌋−ℓ, exact (serialized as "p/q" strings).
    #[serde(serialize_with = "serialize_rationals")]
    pub alphas: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

/// α_j = (−1)^j (Q/2+k−2ℓ−1) / (4^{j+ℓ} j! ℓ! (Q/2+k−2ℓ−j−1)_{ℓ+j+1}), the
/// Γ-ratio telescoped over its integer gap (exact for half-integer Q/2).
pub fn proj_coefficients(
    cfg: GrushinConfig,
    k: u32,
    ell: u32,
) -> Result<ProjCoefficients, FischerError> {
    if 2 * ell > k {
        return Err(FischerError::InvalidShell(format!(
            "shell ℓ = {ell} exceeds ⌊k/2⌋ for k = {k}"
        )));
    }
    let half_q = Rational::new((cfg.q() as i64).into(), 2.into());
    let lead = &half_q + rat_int(k as i64 - 2 * ell as i64 - 1);
    let mut alphas = Vec::new();
    for j in 0..=(k / 2 - ell) {
        let w = &half_q + rat_int(k as i64 - 2 * ell as i64 - j as i64 - 1);
        let mut den = Rational::one();
        for t in 0..(ell + j + 1) {
            let factor = &w + rat_int(t as i64);
            if factor.is_zero() {
                return Err(FischerError::InvalidShell(format!(
                    "degenerate Γ-ratio at (k, ℓ, j) = ({k}, {ell}, {j})"
                )));
            }
            den *= factor;
        }
        den *= rat_int(4i64.pow(j + ell));
        for t in 1..=j {
            den *= rat_int(t as i64);
        }
        for t in 1..=ell {
            den *= rat_int(t as i64);
        }
        let mut a = &lead / den;
        if j % 2 == 1 {
            a = -a;
        }
        alphas.push(a);
    }
    Ok(ProjCoefficients { k, ell, alphas })
}

/// Apply Proj_ℓ^k = Σ_j α_j ρ^{2j} 𝓛_α^{j+ℓ} to a degree-k rep; the result has
/// degree k−2ℓ.
pub fn apply_proj(cfg: GrushinConfig, coeffs: &ProjCoefficients, rep: &SpectralRep) -> SpectralRep {
    let mut out = SpectralRep::zero(rep.k - 2 * coeffs.ell);
    for (j, a) in coeffs.alphas.iter().enumerate() {
        let mut v = rep.clone();
        for _ in 0..(j as u32 + coeffs.ell) {
            v = spectral_l(cfg, &v);
        }
        for _ in 0..j {
            v = spectral_rho2(&v);
        }
        out = out.add(&v.scale(a));
    }
    out
}

/// Exact validation that Proj_ℓ^k selects shell ℓ: returns every
/// (ell, input shell, output shell) with the wrong coefficient. Empty = pass.
pub fn verify_proj_identity(cfg: GrushinConfig, k: u32) -> Vec<(u32, usize, usize)> {
    let mut failures = Vec::new();
    for ell in 0..=(k / 2) {
        let coeffs = match proj_coefficients(cfg, k, ell) {
            Ok(c) => c,
            Err(_) => {
                failures.push((ell, usize::MAX, usize::MAX));
                continue;
            }
        };
        for p in 0..=(k as usize / 2) {
            let out = apply_proj(cfg, &coeffs, &SpectralRep::unit(k, p));
            for (s, shell) in out.shells.iter().enumerate() {
                let got = shell.first().cloned().unwrap_or_else(Rational::zero);
                let want = if p == ell as usize && s == 0 {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                if got != want {
                    failures.push((ell, p, s));
                }
            }
        }
    }
    failures
}

/// Symbol-level commutator residuals on ρ^a g_k:
/// [𝓛_α, ρ²] − 4(𝔼_α + Q/2), [𝓛_α, 𝔼_α + Q/2] − 2𝓛_α, [ρ², 𝔼_α + Q/2] + 2ρ².
/// All three must be exactly zero.
pub fn sl2_commutator_check(cfg: GrushinConfig, a: &Rational, k: u32) -> (Rational, Rational, Rational) {
    let q = rat_int(cfg.q() as i64);
    let half_q = &q / rat_int(2);
    let kk = rat_int(k as i64);
    // eigenvalue of 𝓛_α at exponent a: λ(a) = (a−k)(a+k+Q−2)
    let lam = |e: &Rational| (e - &kk) * (e + &kk + &q - rat_int(2));
    let two = rat_int(2);
    // [𝓛, ρ²] at exponent a (coefficient of ρ^a g_k)
    let r1 = lam(&(a + &two)) - lam(a) - (rat_int(4) * a + rat_int(2) * &q);
    // [𝓛, 𝔼+Q/2] at exponent a−2: (a+Q/2)λ(a) − (a−2+Q/2)λ(a) − 2λ(a)
    let r2 = (a + &half_q) * lam(a) - (a - &two + &half_q) * lam(a) - &two * lam(a);
    // [ρ², 𝔼+Q/2] at exponent a+2: (a+Q/2) − (a+2+Q/2) + 2
    let r3 = (a + &half_q) - (a + &two + &half_q) + two;
    (r1, r2, r3)
}

/// Pointwise residual of [𝓛_α, ρ²]u = 4(𝔼_α + Q/2)u for a Grushin-harmonic
/// polynomial u, evaluated analytically: since 𝓛_α u = 0 the left side is
/// ψ^{-1} Δ_α(ρ² u), expanded by the product rule with ρ² = R^{1/(α+1)},
/// R = |x|^{2(α+1)} + (α+1)²|y|².
pub fn sl2_pointwise_residual(
    cfg: GrushinConfig,
    u: &RationalPolynomial,
    k: u32,
    x: &[f64],
    y: &[f64],
) -> f64 {
    let av = cfg.step() as f64;
    let step = cfg.step();
    let rpoly = RationalPolynomial::x_norm_sq(cfg.n, cfg.m).pow(step).add(
        &RationalPolynomial::y_norm_sq(cfg.n, cfg.m).scale(&rat_int((step * step) as i64)),
    );
    let r = rpoly.eval_f64(x, y);
    let e = 1.0 / av; // ρ² = R^e
    let xsq: f64 = x.iter().map(|t| t * t).sum();
    let psi_inv = {
        // ψ = (|x|/ρ)^{2α}; ρ² = R^{1/(α+1)}
        let rho2 = r.powf(e);
        (xsq / rho2).powi(-(cfg.alpha as i32))
    };

    // gradients
    let grad = |p: &RationalPolynomial| -> (Vec<f64>, Vec<f64>) {
        (
            (0..cfg.n).map(|i| p.deriv_x(i).eval_f64(x, y)).collect(),
            (0..cfg.m).map(|i| p.deriv_y(i).eval_f64(x, y)).collect(),
        )
    };
    let (rgx, rgy) = grad(&rpoly);
    let (ugx, ugy) = grad(u);
    let w = xsq.powi(cfg.alpha as i32);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(s, t)| s * t).sum::<f64>();
    let grad_alpha_dot = |ax: &[f64], ay: &[f64], bx: &[f64], by: &[f64]| {
        dot(ax, bx) + w * dot(ay, by)
    };
    let lap_alpha_r = rpoly.laplace_x(cfg.n).eval_f64(x, y)
        + w * rpoly.laplace_y(cfg.m).eval_f64(x, y);
    // Δ_α ρ² = e(e−1)R^{e−2}|∇R|²_α + e R^{e−1} Δ_α R
    let lap_rho2 = e * (e - 1.0) * r.powf(e - 2.0) * grad_alpha_dot(&rgx, &rgy, &rgx, &rgy)
        + e * r.powf(e - 1.0) * lap_alpha_r;
    // Δ_α(ρ²u) = ρ²Δ_αu + 2⟨∇ρ², ∇u⟩_α + uΔ_αρ²; Δ_α u = 0
    let cross = 2.0 * e * r.powf(e - 1.0) * grad_alpha_dot(&rgx, &rgy, &ugx, &ugy);
    let uval = u.eval_f64(x, y);
    let lhs = psi_inv * (cross + uval * lap_rho2);
    let rhs = (4.0 * k as f64 + 2.0 * cfg.q_f64()) * uval;
    (lhs - rhs).abs() / (1.0 + rhs.abs())
}

/// Fischer-type decomposition measurement of f|_Ω.
#[derive(Clone, Debug, Serialize)]
pub struct FischerReport {
    pub k: u32,
    pub k_cut: u32,
    /// (degree k−2p, L²(Ω) mass) inside the Fischer range.
    pub shells: Vec<(u32, f64)>,
    /// (degree, mass) for degrees ≤ k_cut outside the Fischer range.
    pub out_of_range: Vec<(u32, f64)>,
    pub total_norm_sq: f64,
    /// ‖f|_Ω − Σ_{Fischer range} P_{k-2p} f‖.
    pub residual_norm: f64,
}

pub fn fischer_decompose(
    cfg: GrushinConfig,
    f: &RationalPolynomial,
    k_cut: u32,
    resolution: u32,
) -> Result<FischerReport, FischerError> {
    let k = delta_degree(f, cfg)? as u32;
    let g = restrict_to_omega(f, cfg);
    let total = omega_inner_product(&g, &g, 0.0, cfg, resolution)?;
    let mass_at = |kp: u32| -> Result<f64, FischerError> {
        let mut mass = 0.0;
        for e in build_basis(cfg, kp)? {
            let c = omega_inner_product(&g, &e.omega_function(true), 0.0, cfg, resolution)?;
            mass += c * c;
        }
        Ok(mass)
    };
    let fischer_range: Vec<u32> = (0..=(k / 2)).map(|p| k - 2 * p).collect();
    let mut shells = Vec::new();
    let mut inside = 0.0;
    for &kp in &fischer_range {
        let m = mass_at(kp)?;
        inside += m;
        shells.push((kp, m));
    }
    let mut out_of_range = Vec::new();
    for kp in 0..=k_cut {
        if fischer_range.contains(&kp) {
            continue;
        }
        out_of_range.push((kp, mass_at(kp)?));
    }
    Ok(FischerReport {
        k,
        k_cut,
        shells,
        out_of_range,
        total_norm_sq: total,
        residual_norm: (total - inside).max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::build_basis_element;
    use crate::harmonics::HarmonicIndex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spectral_l_basics() {
        let cfg = GrushinConfig::new(2, 2, 1); // Q = 6
        // harmonic rep is annihilated
        let rep = SpectralRep::unit(5, 0);
        assert!(spectral_l(cfg, &rep).is_zero());
        // single shell p=1 at degree k: factor 2(Q + 2k − 4)
        for k in 2..=9u32 {
            let rep = SpectralRep::unit(k, 1);
            let out = spectral_l(cfg, &rep);
            let expect = rat_int(2 * (cfg.q() as i64 + 2 * k as i64 - 4));
            assert_eq!(out.shells[0][0], expect, "k={k}");
        }
    }

    #[test]
    fn iterated_l_matches_double_factorial_product() {
        // 𝓛^v(ρ^{2p}g_s) = ∏_{t=0}^{v-1} 2(p−t)(2(p−t)+2s+Q−2) · ρ^{2(p−v)}g_s
        for cfg in [GrushinConfig::new(2, 2, 1), GrushinConfig::new(3, 1, 2)] {
            let q = cfg.q() as i64;
            for k in 0..=12u32 {
                for p in 0..=(k as usize / 2) {
                    let s = k as i64 - 2 * p as i64;
                    for v in 0..=(p + 1) {
                        let mut rep = SpectralRep::unit(k, p);
                        for _ in 0..v {
                            rep = spectral_l(cfg, &rep);
                        }
                        if v > p {
                            assert!(rep.is_zero());
                            continue;
                        }
                        let mut expect = Rational::one();
                        for t in 0..v as i64 {
                            expect *= rat_int(2 * (p as i64 - t))
                                * rat_int(2 * (p as i64 - t) + 2 * s + q - 2);
                        }
                        assert_eq!(rep.shells[p - v][0], expect, "{cfg} k={k} p={p} v={v}");
                    }
                }
            }
        }
    }

    #[test]
    fn proj_coefficient_examples() {
        let cfg = GrushinConfig::new(2, 2, 1);
        for k in [0u32, 2, 6, 9] {
            let c = proj_coefficients(cfg, k, 0).unwrap();
            assert_eq!(c.alphas[0], Rational::one(), "k={k}");
        }
        // Q = 4: n=2, m=1, α=1
        let cfg4 = GrushinConfig::new(2, 1, 1);
        assert_eq!(cfg4.q(), 4);
        let c = proj_coefficients(cfg4, 2, 1).unwrap();
        assert_eq!(c.alphas, vec![Rational::new(1.into(), 8.into())]);
        assert!(proj_coefficients(cfg, 3, 2).is_err());
    }

    #[test]
    fn proj_identity_exact() {
        for cfg in [
            GrushinConfig::new(2, 2, 1),
            GrushinConfig::new(3, 2, 2),
            GrushinConfig::new(2, 1, 3),
            GrushinConfig::new(4, 3, 1),
        ] {
            for k in 0..=12u32 {
                let failures = verify_proj_identity(cfg, k);
                assert!(failures.is_empty(), "{cfg} k={k}: {failures:?}");
            }
        }
        // k=2 shell-selector pattern by hand
        let cfg = GrushinConfig::new(2, 2, 1);
        for ell in 0..=1u32 {
            let c = proj_coefficients(cfg, 2, ell).unwrap();
            for p in 0..=1usize {
                let out = apply_proj(cfg, &c, &SpectralRep::unit(2, p));
                let got = out.shells[0].first().cloned().unwrap_or_else(Rational::zero);
                assert_eq!(got == Rational::one(), p == ell as usize);
            }
        }
    }

    #[test]
    fn commutators_vanish_exactly() {
        let cfg = GrushinConfig::new(2, 2, 1);
        let (r1, r2, r3) = sl2_commutator_check(cfg, &Rational::zero(), 0);
        assert!(r1.is_zero() && r2.is_zero() && r3.is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for cfg in [
            GrushinConfig::new(2, 2, 1),
            GrushinConfig::new(3, 1, 2),
            GrushinConfig::new(4, 2, 3),
        ] {
            for k in 0..=10u32 {
                for _ in 0..5 {
                    let a = Rational::new(
                        rng.gen_range(-40i64..40).into(),
                        rng.gen_range(1i64..12).into(),
                    );
                    let (r1, r2, r3) = sl2_commutator_check(cfg, &a, k);
                    assert!(r1.is_zero(), "{cfg} a={a} k={k}: r1={r1}");
                    assert!(r2.is_zero(), "{cfg} a={a} k={k}: r2={r2}");
                    assert!(r3.is_zero(), "{cfg} a={a} k={k}: r3={r3}");
                }
            }
        }
    }

    #[test]
    fn commutator_pointwise_on_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for cfg in [GrushinConfig::new(2, 2, 1), GrushinConfig::new(3, 1, 2)] {
            for k in 1..=5u32 {
                for e in crate::harmonics::build_basis(cfg, k).unwrap() {
                    for _ in 0..5 {
                        let x: Vec<f64> =
                            (0..cfg.n).map(|_| rng.gen_range(0.3..1.2)).collect();
                        let y: Vec<f64> =
                            (0..cfg.m).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        let r = sl2_pointwise_residual(cfg, &e.cartesian, k, &x, &y);
                        assert!(r < 1e-8, "{cfg} k={k} {:?}: {r}", e.index);
                    }
                }
            }
        }
    }

    #[test]
    fn fischer_alpha_zero_is_classical() {
        let cfg = GrushinConfig::new(3, 2, 0);
        let f = RationalPolynomial::x_norm_sq(3, 2)
            .mul(&RationalPolynomial::var_x(0, 3, 2))
            .add(&RationalPolynomial::var_y(1, 3, 2).pow(3).scale(&rat_int(2)));
        let rep = fischer_decompose(cfg, &f, 9, 24).unwrap();
        assert_eq!(rep.k, 3);
        assert!(rep.residual_norm < 1e-10, "residual {}", rep.residual_norm);
        for (kp, mass) in &rep.out_of_range {
            assert!(*mass < 1e-18, "k'={kp} mass {mass}");
        }
    }

    #[test]
    fn fischer_on_harmonic_is_single_shell() {
        let cfg = GrushinConfig::new(2, 2, 1);
        let e = build_basis_element(cfg, HarmonicIndex { k: 4, ell: 0, j: 0, p: 1, q: 1 }).unwrap();
        let rep = fischer_decompose(cfg, &e.cartesian, 8, 24).unwrap();
        assert!(rep.residual_norm < 1e-10);
        let top = rep.shells[0];
        assert_eq!(top.0, 4);
        assert!((top.1 - rep.total_norm_sq).abs() < 1e-9 * rep.total_norm_sq);
        for &(_, m) in &rep.shells[1..] {
            assert!(m < 1e-18);
        }
    }

    #[test]
    fn fischer_measurement_is_deterministic_and_parseval() {
        let cfg = GrushinConfig::new(2, 2, 1);
        let f = RationalPolynomial::x_norm_sq(2, 2);
        let a = fischer_decompose(cfg, &f, 12, 24).unwrap();
        let b = fischer_decompose(cfg, &f, 12, 24).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let covered: f64 = a.shells.iter().map(|t| t.1).sum::<f64>()
            + a.out_of_range.iter().map(|t| t.1).sum::<f64>();
        assert!(covered <= a.total_norm_sq * (1.0 + 1e-9));
        // monotone convergence of covered mass in k_cut
        let small = fischer_decompose(cfg, &f, 4, 24).unwrap();
        let covered_small: f64 = small.shells.iter().map(|t| t.1).sum::<f64>()
            + small.out_of_range.iter().map(|t| t.1).sum::<f64>();
        assert!(covered_small <= covered * (1.0 + 1e-12));
    }
}
