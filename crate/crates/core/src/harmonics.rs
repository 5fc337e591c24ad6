//! The orthogonal basis of Grushin-harmonic polynomials, dimensions of the
//! graded spaces, reproducing kernels on spheres and on the gauge sphere Ω,
//! the projector P_k, and the product-formula residual check.
//!
//! Every degree-k Grushin-harmonic polynomial separates in the gauge polar
//! coordinates as ρ^k h_{k,ℓ,j}(φ) Y_ℓ(ω₁) Y_j(ω₂), where the φ-profile is a
//! Jacobi polynomial in cos 2φ dressed with cos^j φ sin^{ℓ/(α+1)} φ. For m = 1
//! the y-direction is scalar and the profile collapses to a Gegenbauer
//! polynomial in cos φ with φ ∈ (0, π). Each element carries a dual
//! representation: an exact rational Cartesian polynomial (annihilated by the
//! Grushin operator with zero tolerance) and a fast trigonometric evaluator.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::GrushinConfig;
use crate::quadrature::{
    omega_inner_product, sphere_area, sphere_poly_integral, OmegaFunction, OmegaPoint, OmegaTerm,
    QuadError,
};
use crate::ratpoly::{rat_int, rational_to_f64, Monomial, Rational, RationalPolynomial};
use crate::specfun::{
    gegenbauer_eval, gegenbauer_norm_b, jacobi_eval, log_gamma, norm_b, pochhammer, JacobiParams,
    SpecFunError,
};

#[derive(Debug, Error)]
pub enum HarmonicsError {
    #[error("polar map undefined at the origin")]
    OriginUndefined,
    #[error("inadmissible index: {0}")]
    InadmissibleIndex(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Label of one basis element of 𝓗_k^α: angular degrees (ℓ, j) on the two
/// spheres and 1-based positions (p, q) within the spherical bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub k: u32,
    pub ell: u32,
    pub j: u32,
    pub p: usize,
    pub q: usize,
}

impl HarmonicIndex {
    /// Jacobi degree k̃ = (k − ℓ − j(α+1)) / (2(α+1)), if admissible.
    pub fn ktilde(&self, cfg: GrushinConfig) -> Option<u32> {
        let step = cfg.step();
        let need = self.ell as i64 + self.j as i64 * step as i64;
        let rem = self.k as i64 - need;
        if rem < 0 || rem % (2 * step as i64) != 0 {
            return None;
        }
        Some((rem / (2 * step as i64)) as u32)
    }

    pub fn mu(&self, cfg: GrushinConfig) -> f64 {
        (cfg.n as f64 - 2.0 + 2.0 * self.ell as f64) / (2.0 * cfg.step() as f64)
    }

    pub fn gamma(&self, cfg: GrushinConfig) -> f64 {
        self.j as f64 + cfg.m as f64 / 2.0
    }
}

/// Gauge polar coordinates: x = ρ sin^{1/(α+1)}φ ω₁, y = ρ^{α+1} cos φ ω₂/(α+1).
/// φ ∈ [0, π/2] for m ≥ 2; φ ∈ [0, π] for m = 1 (ω₂ ≡ 1, sign in cos φ).
#[derive(Clone, Debug)]
pub struct PolarPoint {
    pub rho: f64,
    pub phi: f64,
    pub omega1: Vec<f64>,
    pub omega2: Vec<f64>,
}

impl PolarPoint {
    pub fn omega_point(&self) -> OmegaPoint {
        OmegaPoint {
            phi: self.phi,
            omega1: self.omega1.clone(),
            omega2: self.omega2.clone(),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

pub fn polar_map(x: &[f64], y: &[f64], cfg: GrushinConfig) -> Result<PolarPoint, HarmonicsError> {
    assert_eq!(x.len(), cfg.n);
    assert_eq!(y.len(), cfg.m);
    let av = cfg.step() as f64;
    let r1 = norm(x);
    let r2 = norm(y);
    if r1 == 0.0 && r2 == 0.0 {
        return Err(HarmonicsError::OriginUndefined);
    }
    let rho = (r1.powf(2.0 * av) + av * av * r2 * r2).powf(1.0 / (2.0 * av));
    let sin_phi = (r1 / rho).powf(av);
    let omega1 = if r1 > 0.0 {
        x.iter().map(|t| t / r1).collect()
    } else {
        let mut e = vec![0.0; cfg.n];
        e[0] = 1.0;
        e
    };
    if cfg.m == 1 {
        let cos_phi = av * y[0] / rho.powf(av);
        Ok(PolarPoint {
            rho,
            phi: sin_phi.atan2(cos_phi),
            omega1,
            omega2: vec![1.0],
        })
    } else {
        let cos_phi = av * r2 / rho.powf(av);
        let omega2 = if r2 > 0.0 {
            y.iter().map(|t| t / r2).collect()
        } else {
            let mut e = vec![0.0; cfg.m];
            e[0] = 1.0;
            e
        };
        Ok(PolarPoint {
            rho,
            phi: sin_phi.atan2(cos_phi),
            omega1,
            omega2,
        })
    }
}

pub fn polar_inverse(pt: &PolarPoint, cfg: GrushinConfig) -> (Vec<f64>, Vec<f64>) {
    let av = cfg.step() as f64;
    let r1 = pt.rho * pt.phi.sin().max(0.0).powf(1.0 / av);
    let r2 = pt.rho.powf(av) * pt.phi.cos() / av;
    let x = pt.omega1.iter().map(|t| t * r1).collect();
    let y = pt.omega2.iter().map(|t| t * r2).collect();
    (x, y)
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Dimension d_ℓ(n) of degree-ℓ spherical harmonics on S^{n-1}
/// (n = 1: 1 for ℓ ∈ {0, 1}, else 0).
pub fn dim_sphere(n: usize, ell: u32) -> u64 {
    if n == 1 {
        return if ell <= 1 { 1 } else { 0 };
    }
    let (n, l) = (n as u64, ell as u64);
    binom(n + l - 1, l) - if l >= 2 { binom(n + l - 3, l - 2) } else { 0 }
}

/// Dimension of the δ-homogeneous polynomials 𝒫_k^α by the binomial sum.
pub fn dim_p(cfg: GrushinConfig, k: u32) -> u64 {
    let step = cfg.step() as u64;
    let (n, m, k) = (cfg.n as u64, cfg.m as u64, k as u64);
    let mut total = 0u64;
    let mut j = 0u64;
    while j * step <= k {
        total += binom(m + j - 1, m - 1) * binom(n + k - j * step - 1, n - 1);
        j += 1;
    }
    total
}

/// (dim 𝒫_k^α, dim 𝓗_k^α).
pub fn dims(cfg: GrushinConfig, k: u32) -> (u64, u64) {
    let dp = dim_p(cfg, k);
    let dh = if k >= 2 { dp - dim_p(cfg, k - 2) } else { dp };
    (dp, dh)
}

/// Admissible angular degree pairs (ℓ, j, k̃) at level k.
/// For m ≥ 2: ℓ + (α+1)j ≡ k mod 2(α+1) with ℓ + (α+1)j ≤ k.
/// For m = 1: ℓ ≡ k mod (α+1); the Gegenbauer degree is d = 2k̃ + j, j = d mod 2.
pub fn admissible_pairs(cfg: GrushinConfig, k: u32) -> Vec<(u32, u32, u32)> {
    let step = cfg.step();
    let mut out = Vec::new();
    if cfg.m == 1 {
        for ell in 0..=k {
            if (k - ell) % step != 0 {
                continue;
            }
            let d = (k - ell) / step;
            out.push((ell, d % 2, d / 2));
        }
    } else {
        for j in 0..=(k / step) {
            let rest = k - j * step;
            for kt in 0..=(rest / (2 * step)) {
                let ell = rest - 2 * step * kt;
                out.push((ell, j, kt));
            }
        }
        out.sort();
    }
    out
}

/// All basis labels of 𝓗_k^α, with spherical multiplicities expanded.
pub fn enumerate_indices(cfg: GrushinConfig, k: u32) -> Vec<HarmonicIndex> {
    let mut out = Vec::new();
    for (ell, j, _) in admissible_pairs(cfg, k) {
        let dp = dim_sphere(cfg.n, ell);
        let dq = if cfg.m == 1 { 1 } else { dim_sphere(cfg.m, j) };
        for p in 1..=dp as usize {
            for q in 1..=dq as usize {
                out.push(HarmonicIndex { k, ell, j, p, q });
            }
        }
    }
    out
}

fn rat_poch(x: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= x + rat_int(i as i64);
    }
    acc
}

type SphericalBasis = Arc<Vec<(RationalPolynomial, Rational)>>;

fn spherical_cache() -> &'static RwLock<HashMap<(usize, u32), SphericalBasis>> {
    static CACHE: OnceLock<RwLock<HashMap<(usize, u32), SphericalBasis>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// |x|^e C_e^{(λ)}(x_last/|x|) as a polynomial in dim variables (λ rational).
fn solid_gegenbauer(dim: usize, e: u32, lambda: &Rational) -> RationalPolynomial {
    let r2 = RationalPolynomial::x_norm_sq(dim, 0);
    let xn = RationalPolynomial::var_x(dim - 1, dim, 0);
    let mut out = RationalPolynomial::zero();
    for i in 0..=(e / 2) {
        let mut c = rat_poch(lambda, e - i);
        // divide by i! (e-2i)!
        for t in 1..=i {
            c /= rat_int(t as i64);
        }
        for t in 1..=(e - 2 * i) {
            c /= rat_int(t as i64);
        }
        c *= rat_int(2i64.pow(e - 2 * i));
        if i % 2 == 1 {
            c = -c;
        }
        out = out.add(&xn.pow(e - 2 * i).mul(&r2.pow(i)).scale(&c));
    }
    out
}

/// Orthogonal basis of the degree-ℓ harmonic polynomials on R^n together with
/// exact squared norms of their sphere restrictions (normalized measure).
/// Built by the tower x = (x', x_n): Y'_d(x') · |x|^{ℓ-d} C_{ℓ-d}^{(d+(n-2)/2)}(x_n/|x|),
/// bottoming out at n = 2 (real/imaginary parts of (x₁+ix₂)^ℓ) and n = 1.
pub fn spherical_basis(n: usize, ell: u32) -> SphericalBasis {
    if let Some(b) = spherical_cache().read().unwrap().get(&(n, ell)) {
        return Arc::clone(b);
    }
    let mut basis: Vec<RationalPolynomial> = Vec::new();
    if n == 1 {
        if ell <= 1 {
            basis.push(RationalPolynomial::from_monomial(
                Monomial::new(vec![ell], vec![]),
                Rational::one(),
            ));
        }
    } else if n == 2 {
        if ell == 0 {
            basis.push(RationalPolynomial::constant(Rational::one(), 2, 0));
        } else {
            // Re and Im of (x₁ + i x₂)^ℓ
            let mut re = RationalPolynomial::zero();
            let mut im = RationalPolynomial::zero();
            for i in 0..=ell {
                let c = rat_int(binom(ell as u64, i as u64) as i64);
                let mono = Monomial::new(vec![ell - i, i], vec![]);
                match i % 4 {
                    0 => re.add_term(mono, c),
                    1 => im.add_term(mono, c),
                    2 => re.add_term(mono, -c),
                    _ => im.add_term(mono, -c),
                }
            }
            basis.push(re);
            basis.push(im);
        }
    } else {
        for d in 0..=ell {
            let lambda = Rational::new((2 * d as i64 + n as i64 - 2).into(), 2.into());
            let radial = solid_gegenbauer(n, ell - d, &lambda);
            for (lower, _) in spherical_basis(n - 1, d).iter() {
                // embed the (n-1)-variable harmonic into the first n-1 coords
                let mut lifted = RationalPolynomial::zero();
                for (mono, c) in lower.terms() {
                    let mut xp = mono.xpow.clone();
                    xp.push(0);
                    lifted.add_term(Monomial::new(xp, vec![]), c.clone());
                }
                basis.push(lifted.mul(&radial));
            }
        }
    }
    let with_norms: Vec<(RationalPolynomial, Rational)> = basis
        .into_iter()
        .map(|b| {
            let nsq = sphere_poly_integral(n, &b, &b);
            (b, nsq)
        })
        .collect();
    let arc = Arc::new(with_norms);
    spherical_cache()
        .write()
        .unwrap()
        .entry((n, ell))
        .or_insert_with(|| Arc::clone(&arc));
    arc
}

/// Reproducing kernel of degree-k spherical harmonics on S^{n-1} in L²(dω):
/// d_k(n)/|S^{n-1}| · C_k^{((n-2)/2)}(cos τ)/C_k^{((n-2)/2)}(1), with the
/// Chebyshev limit for n = 2 and the two-point space for n = 1.
pub fn kernel_k(n: usize, k: u32, cos_tau: f64) -> Result<f64, HarmonicsError> {
    if cos_tau.abs() > 1.0 + 1e-12 {
        return Err(HarmonicsError::DomainError(format!(
            "|cos τ| > 1: {cos_tau}"
        )));
    }
    let ct = cos_tau.clamp(-1.0, 1.0);
    match n {
        1 => Ok(match k {
            0 => 0.5,
            1 => 0.5 * ct,
            _ => 0.0,
        }),
        2 => {
            let tau = ct.acos();
            let pref = if k == 0 { 1.0 } else { 2.0 };
            Ok(pref * (k as f64 * tau).cos() / (2.0 * std::f64::consts::PI))
        }
        _ => {
            let lam = (n as f64 - 2.0) / 2.0;
            let at_one = pochhammer(2.0 * lam, k) / pochhammer(1.0, k);
            Ok(dim_sphere(n, k) as f64 / sphere_area(n) * gegenbauer_eval(k, lam, ct)? / at_one)
        }
    }
}

/// The φ-profile h_{k,ℓ,j}(φ) (unnormalized):
/// m ≥ 2: cos^j φ sin^{ℓ/(α+1)} φ P_k̃^{(μ, γ-1)}(cos 2φ);
/// m = 1: sin^{ℓ/(α+1)} φ C_{2k̃+j}^{(λ)}(cos φ), λ = μ + 1/2.
pub fn h_profile(cfg: GrushinConfig, ell: u32, j: u32, ktilde: u32, phi: f64) -> f64 {
    let av = cfg.step() as f64;
    let mu = (cfg.n as f64 - 2.0 + 2.0 * ell as f64) / (2.0 * av);
    let sin_pow = phi.sin().max(0.0).powf(ell as f64 / av);
    if cfg.m == 1 {
        let d = 2 * ktilde + j;
        sin_pow * gegenbauer_eval(d, mu + 0.5, phi.cos()).unwrap_or(0.0)
    } else {
        let gamma = j as f64 + cfg.m as f64 / 2.0;
        let params = JacobiParams::new(mu, gamma - 1.0);
        phi.cos().powi(j as i32) * sin_pow * jacobi_eval(ktilde, params, (2.0 * phi).cos())
    }
}

/// Normalization constant b_{k,ℓ,j}: (B_k̃^{(μ,γ-1)})^{-1/2} for m ≥ 2, the
/// Gegenbauer normalizer b_d^{(μ+1/2)} for m = 1.
pub fn norm_constant(cfg: GrushinConfig, ell: u32, j: u32, ktilde: u32) -> Result<f64, HarmonicsError> {
    let av = cfg.step() as f64;
    let mu = (cfg.n as f64 - 2.0 + 2.0 * ell as f64) / (2.0 * av);
    if cfg.m == 1 {
        Ok(gegenbauer_norm_b(2 * ktilde + j, mu + 0.5)?)
    } else {
        let gamma = j as f64 + cfg.m as f64 / 2.0;
        Ok(1.0 / norm_b(ktilde, JacobiParams::new(mu, gamma - 1.0))?.sqrt())
    }
}

/// One basis element of 𝓗_k^α in dual representation.
pub struct BasisElement {
    pub index: HarmonicIndex,
    /// Exact, unnormalized: equals ρ^k h(φ) Ỹ_ℓ(ω₁) Ỹ_j(ω₂) through the polar map.
    pub cartesian: RationalPolynomial,
    /// b_{k,ℓ,j} — normalizes the φ-profile alone.
    pub norm_constant: f64,
    cfg: GrushinConfig,
    ang1: RationalPolynomial,
    ang2: Option<RationalPolynomial>,
    /// L²(S^{n-1}, dω) norms of the angular restrictions (ang2_norm = 1 for m = 1).
    ang1_norm: f64,
    ang2_norm: f64,
}

impl BasisElement {
    /// ρ^k h_{k,ℓ,j}(φ) Y_ℓ(ω₁) Y_j(ω₂) at ρ = 1, with the same unnormalized
    /// angular polynomials as `cartesian`.
    pub fn trig_eval(&self, phi: f64, omega1: &[f64], omega2: &[f64]) -> f64 {
        let idx = self.index;
        let kt = idx.ktilde(self.cfg).unwrap();
        let mut v = h_profile(self.cfg, idx.ell, idx.j, kt, phi) * self.ang1.eval_f64(omega1, &[]);
        if let Some(a2) = &self.ang2 {
            v *= a2.eval_f64(omega2, &[]);
        }
        v
    }

    /// Scale factor making ⟨scale·elem, scale·elem⟩_Ω = 1.
    pub fn normalizer(&self) -> f64 {
        self.norm_constant / (self.ang1_norm * self.ang2_norm)
    }

    pub fn eval_normalized(&self, pt: &OmegaPoint) -> f64 {
        self.normalizer() * self.trig_eval(pt.phi, &pt.omega1, &pt.omega2)
    }

    /// Separable Ω-representation (normalized when `normalized`).
    pub fn omega_function(&self, normalized: bool) -> OmegaFunction {
        let cfg = self.cfg;
        let idx = self.index;
        let kt = idx.ktilde(cfg).unwrap();
        let av = cfg.step() as f64;
        let mu = idx.mu(cfg);
        let scale = if normalized { self.normalizer() } else { 1.0 };
        let (smooth, degree, cos_exp): (Arc<dyn Fn(f64) -> f64 + Send + Sync>, u32, f64) =
            if cfg.m == 1 {
                let d = 2 * kt + idx.j;
                let lam = mu + 0.5;
                (
                    Arc::new(move |t| scale * gegenbauer_eval(d, lam, t).unwrap_or(0.0)),
                    d,
                    0.0,
                )
            } else {
                let params = JacobiParams::new(mu, idx.gamma(cfg) - 1.0);
                (
                    Arc::new(move |t| scale * jacobi_eval(kt, params, t)),
                    kt,
                    idx.j as f64,
                )
            };
        let ang2 = self
            .ang2
            .clone()
            .unwrap_or_else(|| RationalPolynomial::constant(Rational::one(), cfg.m, 0));
        OmegaFunction {
            terms: vec![OmegaTerm {
                sin_exp: idx.ell as f64 / av,
                cos_exp,
                smooth,
                smooth_degree: Some(degree),
                ang1: self.ang1.clone(),
                ang2,
            }],
        }
    }
}

fn lift_to_x(p: &RationalPolynomial, m: usize) -> RationalPolynomial {
    let mut out = RationalPolynomial::zero();
    for (mono, c) in p.terms() {
        out.add_term(Monomial::new(mono.xpow.clone(), vec![0; m]), c.clone());
    }
    out
}

fn lift_to_y(p: &RationalPolynomial, n: usize) -> RationalPolynomial {
    let mut out = RationalPolynomial::zero();
    for (mono, c) in p.terms() {
        out.add_term(Monomial::new(vec![0; n], mono.xpow.clone()), c.clone());
    }
    out
}

pub fn build_basis_element(
    cfg: GrushinConfig,
    index: HarmonicIndex,
) -> Result<BasisElement, HarmonicsError> {
    let step = cfg.step();
    let kt = index
        .ktilde(cfg)
        .ok_or_else(|| HarmonicsError::InadmissibleIndex(format!("{index:?} for {cfg}")))?;
    if cfg.m == 1 && index.j > 1 {
        return Err(HarmonicsError::InadmissibleIndex(format!(
            "m = 1 requires j ∈ {{0, 1}}, got {}",
            index.j
        )));
    }
    let b1 = spherical_basis(cfg.n, index.ell);
    let dq = if cfg.m == 1 { 1 } else { dim_sphere(cfg.m, index.j) as usize };
    if index.p == 0 || index.p > b1.len() || index.q == 0 || index.q > dq {
        return Err(HarmonicsError::InadmissibleIndex(format!(
            "(p, q) = ({}, {}) out of range for (ℓ, j) = ({}, {})",
            index.p, index.q, index.ell, index.j
        )));
    }
    let (y1, n1sq) = &b1[index.p - 1];
    let solid_x = lift_to_x(y1, cfg.m);

    // R = ρ^{2(α+1)} = |x|^{2(α+1)} + (α+1)²|y|² and X = |x|^{2(α+1)}
    let xpoly = RationalPolynomial::x_norm_sq(cfg.n, cfg.m).pow(step);
    let rpoly = xpoly.add(
        &RationalPolynomial::y_norm_sq(cfg.n, cfg.m).scale(&rat_int((step * step) as i64)),
    );

    let mu = Rational::new(
        (cfg.n as i64 - 2 + 2 * index.ell as i64).into(),
        (2 * step as i64).into(),
    );

    let (cartesian, ang2, ang2_norm) = if cfg.m == 1 {
        // ρ^{k-ℓ} C_d^{(λ)}(cos φ) = Σ_i (-1)^i (λ)_{d-i}/(i!(d-2i)!) ((α+1)·2y)^{d-2i} R^i
        let d = 2 * kt + index.j;
        let lam = &mu + Rational::new(1.into(), 2.into());
        let yv = RationalPolynomial::var_y(0, cfg.n, cfg.m);
        let mut radial = RationalPolynomial::zero();
        for i in 0..=(d / 2) {
            let mut c = rat_poch(&lam, d - i);
            for t in 1..=i {
                c /= rat_int(t as i64);
            }
            for t in 1..=(d - 2 * i) {
                c /= rat_int(t as i64);
            }
            c *= rat_int((2 * step as i64).pow(d - 2 * i));
            if i % 2 == 1 {
                c = -c;
            }
            radial = radial.add(&yv.pow(d - 2 * i).mul(&rpoly.pow(i)).scale(&c));
        }
        (solid_x.mul(&radial), None, 1.0)
    } else {
        // R^{k̃} P_k̃^{(μ,γ-1)}(cos 2φ) = Σ_s e_s X^s R^{k̃-s}, sin²φ = X/R
        let gamma = Rational::new((2 * index.j as i64 + cfg.m as i64).into(), 2.into());
        let mu1 = &mu + Rational::one();
        let mut pref = rat_poch(&mu1, kt);
        for t in 1..=kt {
            pref /= rat_int(t as i64);
        }
        let mut radial = RationalPolynomial::zero();
        for s in 0..=kt {
            // (-k̃)_s = (-1)^s k̃!/(k̃-s)!
            let mut c = pref.clone();
            for t in 0..s {
                c *= rat_int((kt - t) as i64);
            }
            if s % 2 == 1 {
                c = -c;
            }
            let shift = &mu + &gamma + rat_int(kt as i64);
            c *= rat_poch(&shift, s);
            c /= rat_poch(&mu1, s);
            for t in 1..=s {
                c /= rat_int(t as i64);
            }
            radial = radial.add(&xpoly.pow(s).mul(&rpoly.pow(kt - s)).scale(&c));
        }
        let b2 = spherical_basis(cfg.m, index.j);
        let (y2, n2sq) = &b2[index.q - 1];
        let solid_y = lift_to_y(y2, cfg.n).scale(&rat_int((step as i64).pow(index.j)));
        let cart = solid_x.mul(&solid_y).mul(&radial);
        let a2norm = (sphere_area(cfg.m) * rational_to_f64(n2sq)).sqrt();
        (cart, Some(y2.clone()), a2norm)
    };

    Ok(BasisElement {
        index,
        cartesian,
        norm_constant: norm_constant(cfg, index.ell, index.j, kt)?,
        cfg,
        ang1: y1.clone(),
        ang2,
        ang1_norm: (sphere_area(cfg.n) * rational_to_f64(n1sq)).sqrt(),
        ang2_norm,
    })
}

/// The full basis of 𝓗_k^α.
pub fn build_basis(cfg: GrushinConfig, k: u32) -> Result<Vec<BasisElement>, HarmonicsError> {
    enumerate_indices(cfg, k)
        .into_iter()
        .map(|idx| build_basis_element(cfg, idx))
        .collect()
}

/// Reproducing kernel of 𝓗_k^α on Ω: Σ b²_{k,ℓ,j} h(φ₁) h(φ₂) K_ℓ^n K_j^m
/// over admissible (ℓ, j) (for m = 1 the y-parity lives in the φ-profile).
pub fn kernel_g(
    cfg: GrushinConfig,
    k: u32,
    pt1: &OmegaPoint,
    pt2: &OmegaPoint,
) -> Result<f64, HarmonicsError> {
    let dot1: f64 = pt1.omega1.iter().zip(&pt2.omega1).map(|(a, b)| a * b).sum();
    let dot2: f64 = pt1.omega2.iter().zip(&pt2.omega2).map(|(a, b)| a * b).sum();
    let mut acc = 0.0;
    for (ell, j, kt) in admissible_pairs(cfg, k) {
        let b = norm_constant(cfg, ell, j, kt)?;
        let mut term = b
            * b
            * h_profile(cfg, ell, j, kt, pt1.phi)
            * h_profile(cfg, ell, j, kt, pt2.phi)
            * kernel_k(cfg.n, ell, dot1)?;
        if cfg.m >= 2 {
            term *= kernel_k(cfg.m, j, dot2)?;
        }
        acc += term;
    }
    Ok(acc)
}

/// L²(Ω, dΩ)-orthogonal projection onto 𝓗_k^α, as Σ ⟨f, e_i⟩ e_i over the
/// orthonormal basis.
pub fn project_pk(
    cfg: GrushinConfig,
    k: u32,
    f: &OmegaFunction,
    resolution: u32,
) -> Result<OmegaFunction, HarmonicsError> {
    let mut out = OmegaFunction::default();
    for elem in build_basis(cfg, k)? {
        let e = elem.omega_function(true);
        let c = omega_inner_product(f, &e, 0.0, cfg, resolution)?;
        if c != 0.0 {
            out = out.add(&e.scale(c));
        }
    }
    Ok(out)
}

/// |LHS − RHS| of the Gegenbauer product decomposition
/// C_k^{((u+v)/2-1)}(cos φ cos ξ cos θ₁ + sin φ sin ξ cos θ₂)
///   = Σ c_{k,ℓ,j} f_{k,ℓ,j}(φ) f_{k,ℓ,j}(ξ) C_j^{(u/2-1)}(cos θ₁) C_ℓ^{(v/2-1)}(cos θ₂).
pub fn addition_formula_residual(
    u: f64,
    v: f64,
    k: u32,
    phi: f64,
    xi: f64,
    theta1: f64,
    theta2: f64,
) -> Result<f64, HarmonicsError> {
    if u == 2.0 || v == 2.0 {
        return Err(HarmonicsError::SpecFun(SpecFunError::DegenerateParameter(
            "inner Gegenbauer order u/2-1 or v/2-1 vanishes".into(),
        )));
    }
    if u <= 1.0 || v <= 1.0 {
        return Err(HarmonicsError::DomainError(format!(
            "need u, v > 1, got ({u}, {v})"
        )));
    }
    let arg = phi.cos() * xi.cos() * theta1.cos() + phi.sin() * xi.sin() * theta2.cos();
    let lhs = gegenbauer_eval(k, (u + v) / 2.0 - 1.0, arg.clamp(-1.0, 1.0))?;
    let lg = log_gamma(u / 2.0 - 1.0)? + log_gamma(v / 2.0 - 1.0)? - log_gamma((u + v) / 2.0 - 1.0)?;
    let f_eval = |ell: u32, j: u32, i: u32, theta: f64| -> Result<f64, HarmonicsError> {
        let params = JacobiParams::new(v / 2.0 - 1.0 + ell as f64, u / 2.0 - 1.0 + j as f64);
        let b = norm_b(i, params)?;
        Ok(theta.cos().powi(j as i32) * theta.sin().powi(ell as i32)
            * jacobi_eval(i, params, (2.0 * theta).cos())
            / b.sqrt())
    };
    let mut rhs = 0.0;
    for i in 0..=(k / 2) {
        for ell in 0..=(k - 2 * i) {
            let j = k - 2 * i - ell;
            let c = (2.0 * j as f64 + u - 2.0) * (2.0 * ell as f64 + v - 2.0) * lg.exp()
                / (4.0 * (2.0 * k as f64 + u + v - 2.0));
            rhs += c
                * f_eval(ell, j, i, phi)?
                * f_eval(ell, j, i, xi)?
                * gegenbauer_eval(j, u / 2.0 - 1.0, theta1.cos())?
                * gegenbauer_eval(ell, v / 2.0 - 1.0, theta2.cos())?;
        }
    }
    Ok((lhs - rhs).abs())
}

/// Restriction of a polynomial to the gauge sphere Ω as a separable Ω-function:
/// each monomial x^a y^b becomes sin^{|a|/(α+1)}φ (cos φ/(α+1))^{|b|} ω₁^a ω₂^b
/// at ρ = 1 (for m = 1 the signed cos-power folds into the smooth factor).
pub fn restrict_to_omega(f: &RationalPolynomial, cfg: GrushinConfig) -> OmegaFunction {
    let av = cfg.step() as f64;
    let mut terms = Vec::new();
    for (mono, c) in f.terms() {
        let xa = mono.x_degree() as f64;
        let yb = mono.y_degree() as u32;
        let scale = rational_to_f64(c) / av.powi(yb as i32);
        let ang1 = RationalPolynomial::from_monomial(
            Monomial::new(mono.xpow.clone(), vec![]),
            Rational::one(),
        );
        if cfg.m == 1 {
            terms.push(OmegaTerm {
                sin_exp: xa / av,
                cos_exp: 0.0,
                smooth: Arc::new(move |t: f64| scale * t.powi(yb as i32)),
                smooth_degree: Some(yb),
                ang1,
                ang2: RationalPolynomial::constant(Rational::one(), 1, 0),
            });
        } else {
            terms.push(OmegaTerm {
                sin_exp: xa / av,
                cos_exp: yb as f64,
                smooth: Arc::new(move |_| scale),
                smooth_degree: Some(0),
                ang1,
                ang2: RationalPolynomial::from_monomial(
                    Monomial::new(mono.ypow.clone(), vec![]),
                    Rational::one(),
                ),
            });
        }
    }
    OmegaFunction { terms }
}

/// Max over a φ-grid of Σ (b_{k,ℓ,j} h_{k,ℓ,j}(φ))² (ℓ+1)^{n-2} (j+1)^{m-2} —
/// the diagonal kernel series with the spherical dimension growth made explicit.
pub fn kernel_diag_sup(cfg: GrushinConfig, k: u32, grid_size: usize) -> Result<f64, HarmonicsError> {
    let upper = if cfg.m == 1 {
        std::f64::consts::PI
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let pairs = admissible_pairs(cfg, k);
    let mut sup = 0.0f64;
    for g in 0..grid_size {
        let phi = upper * (g as f64 + 0.5) / grid_size as f64;
        let mut acc = 0.0;
        for &(ell, j, kt) in &pairs {
            let bh = norm_constant(cfg, ell, j, kt)? * h_profile(cfg, ell, j, kt, phi);
            acc += bh
                * bh
                * (ell as f64 + 1.0).powi(cfg.n as i32 - 2)
                * (j as f64 + 1.0).powi(cfg.m as i32 - 2);
        }
        sup = sup.max(acc);
    }
    Ok(sup)
}
