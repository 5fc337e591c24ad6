//! Gauss–Jacobi quadrature on [-1, 1] for arbitrary weight exponents, exact
//! rational sphere monomial integrals, a cyclic-Jacobi symmetric eigensolver,
//! and the composite inner product on the gauge sphere Ω with measure
//! dΩ = sin^{(n-2)/(α+1)+1}φ cos^{m-1}φ dφ dω₁ dω₂ (for m = 1: the Gegenbauer
//! convention φ ∈ (0, π), measure sin^{(n-2)/(α+1)+1}φ dφ dω₁).
//!
//! Ω-functions are finite sums of separable terms (sin/cos powers × a smooth
//! factor in the quadrature variable t) × polynomial angular parts. The sin/cos
//! powers are folded into the Jacobi weight so the smooth factor is integrated
//! with Gaussian exactness whenever it is a polynomial in t; the angular parts
//! are integrated exactly in rational arithmetic, never sampled.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::config::GrushinConfig;
use crate::ratpoly::{rational_to_f64, Rational, RationalPolynomial};
use crate::specfun::log_gamma;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("matrix not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("non-integrable weight: combined exponent {0} <= -1")]
    NonIntegrableWeight(f64),
}

/// Nodes/weights for ∫_{-1}^{1} (1-t)^A (1+t)^B f(t) dt.
#[derive(Clone, Debug)]
pub struct QuadRule {
    pub weight_a: f64,
    pub weight_b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Returns eigenvalues ascending; eigenvectors (as rows of the returned matrix,
/// row i belonging to eigenvalue i) if requested.
pub fn sym_eigen(
    mat: &[Vec<f64>],
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<Vec<f64>>>), QuadError> {
    let n = mat.len();
    let mut norm = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            norm = norm.max(mat[i][j].abs());
        }
    }
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((mat[i][j] - mat[j][i]).abs());
        }
    }
    if asym > 1e-12 * norm.max(1.0) {
        return Err(QuadError::NotSymmetric(asym));
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    // v holds the accumulated rotations; v[r] is the r-th transformed basis row
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = 1e-15 * norm.max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= tol * (n as f64) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() <= tol {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vpk = v[p][k];
                    let vqk = v[q][k];
                    v[p][k] = c * vpk - s * vqk;
                    v[q][k] = s * vpk + c * vqk;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = if want_vectors {
        Some(idx.iter().map(|&i| v[i].clone()).collect())
    } else {
        None
    };
    Ok((vals, vecs))
}

fn rule_cache() -> &'static RwLock<HashMap<(u64, u64, u32), Arc<QuadRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u64, u32), Arc<QuadRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gauss–Jacobi rule via Golub–Welsch on the symmetric tridiagonal recurrence
/// matrix; cached per (A, B, npoints).
pub fn gauss_jacobi_rule(a: f64, b: f64, npoints: u32) -> Result<Arc<QuadRule>, QuadError> {
    if a <= -1.0 || b <= -1.0 {
        return Err(QuadError::ParameterOutOfRange(format!(
            "gauss_jacobi_rule needs A, B > -1, got ({a}, {b})"
        )));
    }
    if npoints == 0 {
        return Err(QuadError::ParameterOutOfRange("npoints >= 1".into()));
    }
    let key = (a.to_bits(), b.to_bits(), npoints);
    if let Some(r) = rule_cache().read().unwrap().get(&key) {
        return Ok(Arc::clone(r));
    }
    let n = npoints as usize;
    let mut m = vec![vec![0.0f64; n]; n];
    for k in 0..n {
        let kf = k as f64;
        let denom = (2.0 * kf + a + b) * (2.0 * kf + a + b + 2.0);
        m[k][k] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / denom
        };
        if k >= 1 {
            let num = 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b);
            let den = (2.0 * kf + a + b).powi(2) * (2.0 * kf + a + b + 1.0) * (2.0 * kf + a + b - 1.0);
            let beta = (num / den).sqrt();
            m[k][k - 1] = beta;
            m[k - 1][k] = beta;
        }
    }
    let (vals, vecs) = sym_eigen(&m, true)?;
    let vecs = vecs.unwrap();
    // total mass μ0 = ∫ (1-t)^A (1+t)^B dt = 2^{A+B+1} B(A+1, B+1)
    let mu0 = ((a + b + 1.0) * 2f64.ln()
        + log_gamma(a + 1.0).unwrap()
        + log_gamma(b + 1.0).unwrap()
        - log_gamma(a + b + 2.0).unwrap())
    .exp();
    let weights: Vec<f64> = vecs.iter().map(|row| mu0 * row[0] * row[0]).collect();
    let rule = Arc::new(QuadRule {
        weight_a: a,
        weight_b: b,
        nodes: vals,
        weights,
    });
    rule_cache()
        .write()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// ∫_{S^{n-1}} x^powers dω / |S^{n-1}| as an exact rational:
/// zero if any power is odd, else ∏ (1/2)_{p_i/2} / (n/2)_{Σ p_i/2}.
pub fn sphere_monomial_integral(n: usize, powers: &[u32]) -> Rational {
    assert_eq!(powers.len(), n);
    if powers.iter().any(|&p| p % 2 == 1) {
        return Rational::zero();
    }
    if n == 1 {
        // S^0 = {±1} with normalized counting measure; even powers average to 1
        return Rational::one();
    }
    let mut num = Rational::one();
    let mut total = 0u32;
    for &p in powers {
        let q = p / 2;
        total += q;
        // (1/2)_q
        for i in 0..q {
            num *= Rational::new((1 + 2 * i as i64).into(), 2.into());
        }
    }
    let mut den = Rational::one();
    // (n/2)_total
    for i in 0..total {
        den *= Rational::new((n as i64 + 2 * i as i64).into(), 2.into());
    }
    num / den
}

/// Exact normalized sphere integral of a product of two polynomials in the
/// ambient coordinates (x-variables only; the y-block of the monomials must be
/// empty or zero).
pub fn sphere_poly_integral(n: usize, p: &RationalPolynomial, q: &RationalPolynomial) -> Rational {
    let mut acc = Rational::zero();
    for (mp, cp) in p.terms() {
        for (mq, cq) in q.terms() {
            let powers: Vec<u32> = mp
                .xpow
                .iter()
                .zip(&mq.xpow)
                .map(|(a, b)| a + b)
                .collect();
            if powers.iter().any(|&w| w % 2 == 1) {
                continue;
            }
            acc += cp.clone() * cq * sphere_monomial_integral(n, &powers);
        }
    }
    acc
}

/// Same as [`sphere_poly_integral`] but accumulated in f64 (the monomial
/// integrals themselves are still the exact rationals, rounded once).
pub fn sphere_poly_integral_f64(n: usize, p: &RationalPolynomial, q: &RationalPolynomial) -> f64 {
    let mut acc = 0.0f64;
    for (mp, cp) in p.terms() {
        for (mq, cq) in q.terms() {
            let powers: Vec<u32> = mp
                .xpow
                .iter()
                .zip(&mq.xpow)
                .map(|(a, b)| a + b)
                .collect();
            if powers.iter().any(|&w| w % 2 == 1) {
                continue;
            }
            acc += rational_to_f64(cp)
                * rational_to_f64(cq)
                * rational_to_f64(&sphere_monomial_integral(n, &powers));
        }
    }
    acc
}

/// Surface area |S^{n-1}| = 2 π^{n/2} / Γ(n/2); |S^0| = 2.
pub fn sphere_area(n: usize) -> f64 {
    if n == 1 {
        return 2.0;
    }
    let nf = n as f64;
    (2f64.ln() + 0.5 * nf * std::f64::consts::PI.ln() - log_gamma(nf / 2.0).unwrap()).exp()
}

/// A point of the gauge sphere Ω.
#[derive(Clone, Debug)]
pub struct OmegaPoint {
    /// φ ∈ (0, π/2) for m ≥ 2; φ ∈ (0, π) for m = 1.
    pub phi: f64,
    pub omega1: Vec<f64>,
    pub omega2: Vec<f64>,
}

/// One separable term of an Ω-function:
/// sin^{sin_exp}φ · cos^{cos_exp}φ · smooth(t) · ang1(ω₁) · ang2(ω₂),
/// where t = cos 2φ for m ≥ 2 and t = cos φ for m = 1.
#[derive(Clone)]
pub struct OmegaTerm {
    pub sin_exp: f64,
    pub cos_exp: f64,
    pub smooth: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Degree in t when `smooth` is a polynomial (enables exact quadrature).
    pub smooth_degree: Option<u32>,
    /// Polynomial in the n ambient x-coordinates, restricted to S^{n-1}.
    pub ang1: RationalPolynomial,
    /// Polynomial in the m ambient y-coordinates, restricted to S^{m-1}.
    pub ang2: RationalPolynomial,
}

impl OmegaTerm {
    /// Constant angular parts (pure φ-profile).
    pub fn radial(
        n: usize,
        m: usize,
        sin_exp: f64,
        cos_exp: f64,
        smooth: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        smooth_degree: Option<u32>,
    ) -> Self {
        OmegaTerm {
            sin_exp,
            cos_exp,
            smooth,
            smooth_degree,
            ang1: RationalPolynomial::constant(Rational::one(), n, 0),
            ang2: RationalPolynomial::constant(Rational::one(), m, 0),
        }
    }
}

/// Finite sum of separable terms — the Ω-evaluator type used across modules.
#[derive(Clone, Default)]
pub struct OmegaFunction {
    pub terms: Vec<OmegaTerm>,
}

impl OmegaFunction {
    pub fn one(cfg: GrushinConfig) -> Self {
        OmegaFunction {
            terms: vec![OmegaTerm::radial(
                cfg.n,
                cfg.m,
                0.0,
                0.0,
                Arc::new(|_| 1.0),
                Some(0),
            )],
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for term in &mut out.terms {
            let f = Arc::clone(&term.smooth);
            term.smooth = Arc::new(move |t| c * f(t));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn eval(&self, cfg: GrushinConfig, pt: &OmegaPoint) -> f64 {
        let (sin_phi, cos_phi) = (pt.phi.sin(), pt.phi.cos());
        let t = if cfg.m == 1 {
            cos_phi
        } else {
            (2.0 * pt.phi).cos()
        };
        let empty_y: Vec<f64> = vec![];
        self.terms
            .iter()
            .map(|term| {
                let s = pow_signed(sin_phi, term.sin_exp) * pow_signed(cos_phi, term.cos_exp);
                s * (term.smooth)(t)
                    * term.ang1.eval_f64(&pt.omega1, &empty_y)
                    * term.ang2.eval_f64(&pt.omega2, &empty_y)
            })
            .sum()
    }
}

fn pow_signed(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        1.0
    } else if exp.fract() == 0.0 && exp.abs() < 1e6 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}

/// ⟨f, ψ^{psi_shift} g⟩_{L²(Ω, dΩ)} by Gauss–Jacobi in t (sin/cos powers folded
/// into the weight) tensored with exact sphere integration of the angular parts.
/// `resolution` is the minimum number of quadrature nodes (used when a term has
/// no known polynomial degree; the spec default is k̃_max + 8).
pub fn omega_inner_product(
    f: &OmegaFunction,
    g: &OmegaFunction,
    psi_shift: f64,
    cfg: GrushinConfig,
    resolution: u32,
) -> Result<f64, QuadError> {
    let n = cfg.n;
    let m = cfg.m;
    let av = cfg.alpha as f64 + 1.0;
    // base measure exponents plus the ψ^{psi_shift} = sin^{2α·shift/(α+1)} factor
    let e0 = (n as f64 - 2.0) / av + 1.0 + 2.0 * cfg.alpha as f64 * psi_shift / av;
    // for m = 1 the φ-interval (0, π) already covers both signs of y, so the
    // measure carries no S^0 factor; ang2 still enters as its S^0 average
    let area = sphere_area(n) * if m == 1 { 1.0 } else { sphere_area(m) };
    let mut acc = 0.0f64;
    for tf in &f.terms {
        for tg in &g.terms {
            let ang1 = sphere_poly_integral_f64(n, &tf.ang1, &tg.ang1);
            if ang1 == 0.0 {
                continue;
            }
            let ang2 = sphere_poly_integral_f64(m, &tf.ang2, &tg.ang2);
            if ang2 == 0.0 {
                continue;
            }
            let s_exp = e0 + tf.sin_exp + tg.sin_exp;
            let deg_known = tf.smooth_degree.zip(tg.smooth_degree).map(|(a, b)| a + b);
            let phi_int = if m == 1 {
                // t = cos φ on (0, π); integer cos powers become t-powers
                let c_exp = tf.cos_exp + tg.cos_exp;
                if c_exp.fract() != 0.0 {
                    return Err(QuadError::ParameterOutOfRange(
                        "m = 1 terms need integer cos exponents".into(),
                    ));
                }
                let a = (s_exp - 1.0) / 2.0;
                if a <= -1.0 {
                    return Err(QuadError::NonIntegrableWeight(a));
                }
                let needed = deg_known
                    .map(|d| d / 2 + c_exp as u32 / 2 + 2)
                    .unwrap_or(0)
                    .max(resolution)
                    .max(1);
                let rule = gauss_jacobi_rule(a, a, needed)?;
                let cp = c_exp as i32;
                rule.integrate(|t| (tf.smooth)(t) * (tg.smooth)(t) * t.powi(cp))
            } else {
                // t = cos 2φ on (0, π/2)
                let c_exp = (m as f64 - 1.0) + tf.cos_exp + tg.cos_exp;
                let a = (s_exp - 1.0) / 2.0;
                let b = (c_exp - 1.0) / 2.0;
                if a <= -1.0 {
                    return Err(QuadError::NonIntegrableWeight(a));
                }
                if b <= -1.0 {
                    return Err(QuadError::NonIntegrableWeight(b));
                }
                let needed = deg_known
                    .map(|d| d / 2 + 2)
                    .unwrap_or(0)
                    .max(resolution)
                    .max(1);
                let rule = gauss_jacobi_rule(a, b, needed)?;
                let pref = 2f64.powf(-(s_exp + c_exp) / 2.0 - 1.0);
                pref * rule.integrate(|t| (tf.smooth)(t) * (tg.smooth)(t))
            };
            acc += phi_int * ang1 * ang2 * area;
        }
    }
    Ok(acc)
}
