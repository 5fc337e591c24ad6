//! Exact rational multivariate polynomials graded by the anisotropic δ-degree,
//! with the Grushin and Euler differential operators and the exact linear
//! algebra (nullspaces, Gram–Schmidt, constructive Δ_α-preimages) used as the
//! ground-truth oracle by every other module.
//!
//! No floating point enters this module: harmonicity and rank statements are
//! checked with zero tolerance.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::config::GrushinConfig;

pub type Rational = num_rational::BigRational;

/// Convenience: rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatPolyError {
    #[error("polynomial has monomials of differing δ-degrees ({0} vs {1})")]
    MixedDegree(u64, u64),
    #[error("zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("gram-schmidt input is linearly dependent (vector {0})")]
    DependentInput(usize),
    #[error("polynomial parse error: {0}")]
    Parse(String),
}

/// A monomial x^a y^b. Variable counts must match the active `GrushinConfig`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub xpow: Vec<u32>,
    pub ypow: Vec<u32>,
}

impl Monomial {
    pub fn new(xpow: Vec<u32>, ypow: Vec<u32>) -> Self {
        Monomial { xpow, ypow }
    }

    pub fn one(n: usize, m: usize) -> Self {
        Monomial {
            xpow: vec![0; n],
            ypow: vec![0; m],
        }
    }

    pub fn x_degree(&self) -> u64 {
        self.xpow.iter().map(|&p| p as u64).sum()
    }

    pub fn y_degree(&self) -> u64 {
        self.ypow.iter().map(|&p| p as u64).sum()
    }

    /// δ-degree: Σ xpow + (α+1) Σ ypow.
    pub fn delta_degree(&self, alpha: u32) -> u64 {
        self.x_degree() + (alpha as u64 + 1) * self.y_degree()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            xpow: self
                .xpow
                .iter()
                .zip(&other.xpow)
                .map(|(a, b)| a + b)
                .collect(),
            ypow: self
                .ypow
                .iter()
                .zip(&other.ypow)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Exact multivariate polynomial over the rationals in x₁..x_n, y₁..y_m.
/// Terms are stored with lexicographic keys; graded orderings are applied at
/// serialization time (the grading needs α).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        RationalPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational, n: usize, m: usize) -> Self {
        let mut p = RationalPolynomial::zero();
        p.add_term(Monomial::one(n, m), c);
        p
    }

    pub fn from_monomial(mono: Monomial, c: Rational) -> Self {
        let mut p = RationalPolynomial::zero();
        p.add_term(mono, c);
        p
    }

    /// The coordinate function x_i (0-based) in an (n, m)-variable ring.
    pub fn var_x(i: usize, n: usize, m: usize) -> Self {
        let mut mono = Monomial::one(n, m);
        mono.xpow[i] = 1;
        Self::from_monomial(mono, Rational::one())
    }

    pub fn var_y(j: usize, n: usize, m: usize) -> Self {
        let mut mono = Monomial::one(n, m);
        mono.ypow[j] = 1;
        Self::from_monomial(mono, Rational::one())
    }

    /// |x|² = Σ x_i².
    pub fn x_norm_sq(n: usize, m: usize) -> Self {
        let mut p = RationalPolynomial::zero();
        for i in 0..n {
            let mut mono = Monomial::one(n, m);
            mono.xpow[i] = 2;
            p.add_term(mono, Rational::one());
        }
        p
    }

    pub fn y_norm_sq(n: usize, m: usize) -> Self {
        let mut p = RationalPolynomial::zero();
        for j in 0..m {
            let mut mono = Monomial::one(n, m);
            mono.ypow[j] = 2;
            p.add_term(mono, Rational::one());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(mono.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        RationalPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), -v.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = RationalPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        if self.terms.is_empty() {
            // 0^0 = 1 by convention is avoided: caller must not raise zero to 0
            return if e == 0 {
                panic!("0^0 in polynomial pow")
            } else {
                Self::zero()
            };
        }
        let (n, m) = {
            let mono = self.terms.keys().next().unwrap();
            (mono.xpow.len(), mono.ypow.len())
        };
        let mut acc = RationalPolynomial::constant(Rational::one(), n, m);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn deriv_x(&self, i: usize) -> Self {
        let mut out = RationalPolynomial::zero();
        for (mono, c) in &self.terms {
            let p = mono.xpow[i];
            if p == 0 {
                continue;
            }
            let mut m2 = mono.clone();
            m2.xpow[i] = p - 1;
            out.add_term(m2, c.clone() * rat_int(p as i64));
        }
        out
    }

    pub fn deriv_y(&self, j: usize) -> Self {
        let mut out = RationalPolynomial::zero();
        for (mono, c) in &self.terms {
            let p = mono.ypow[j];
            if p == 0 {
                continue;
            }
            let mut m2 = mono.clone();
            m2.ypow[j] = p - 1;
            out.add_term(m2, c.clone() * rat_int(p as i64));
        }
        out
    }

    /// Δ_x p = Σ_i ∂²p/∂x_i².
    pub fn laplace_x(&self, n: usize) -> Self {
        let mut out = RationalPolynomial::zero();
        for (mono, c) in &self.terms {
            for i in 0..n {
                let p = mono.xpow[i];
                if p < 2 {
                    continue;
                }
                let mut m2 = mono.clone();
                m2.xpow[i] = p - 2;
                out.add_term(m2, c.clone() * rat_int((p as i64) * (p as i64 - 1)));
            }
        }
        out
    }

    pub fn laplace_y(&self, m: usize) -> Self {
        let mut out = RationalPolynomial::zero();
        for (mono, c) in &self.terms {
            for j in 0..m {
                let p = mono.ypow[j];
                if p < 2 {
                    continue;
                }
                let mut m2 = mono.clone();
                m2.ypow[j] = p - 2;
                out.add_term(m2, c.clone() * rat_int((p as i64) * (p as i64 - 1)));
            }
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (mono, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, &p) in mono.xpow.iter().enumerate() {
                t *= x[i].powi(p as i32);
            }
            for (j, &p) in mono.ypow.iter().enumerate() {
                t *= y[j].powi(p as i32);
            }
            acc += t;
        }
        acc
    }

    pub fn eval_rational(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (mono, c) in &self.terms {
            let mut t = c.clone();
            for (i, &p) in mono.xpow.iter().enumerate() {
                for _ in 0..p {
                    t *= &x[i];
                }
            }
            for (j, &p) in mono.ypow.iter().enumerate() {
                for _ in 0..p {
                    t *= &y[j];
                }
            }
            acc += t;
        }
        acc
    }

    /// Terms sorted by (δ-degree, lex) — the canonical graded-lex order used for
    /// serialization and nullspace fixtures.
    pub fn sorted_terms(&self, alpha: u32) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            a.delta_degree(alpha)
                .cmp(&b.delta_degree(alpha))
                .then_with(|| a.cmp(b))
        });
        v
    }

    /// JSON form: array of {"coeff": "p/q", "x": [..], "y": [..]}.
    pub fn to_json(&self, cfg: GrushinConfig) -> serde_json::Value {
        let arr: Vec<serde_json::Value> = self
            .sorted_terms(cfg.alpha)
            .into_iter()
            .map(|(mono, c)| {
                serde_json::json!({
                    "coeff": format!("{}/{}", c.numer(), c.denom()),
                    "x": mono.xpow,
                    "y": mono.ypow,
                })
            })
            .collect();
        serde_json::Value::Array(arr)
    }

    pub fn from_json(v: &serde_json::Value, n: usize, m: usize) -> Result<Self, RatPolyError> {
        let arr = v
            .as_array()
            .ok_or_else(|| RatPolyError::Parse("expected JSON array".into()))?;
        let mut p = RationalPolynomial::zero();
        for item in arr {
            let coeff = item
                .get("coeff")
                .and_then(|c| c.as_str())
                .ok_or_else(|| RatPolyError::Parse("missing coeff".into()))?;
            let c = parse_rational(coeff)?;
            if c.is_zero() {
                return Err(RatPolyError::Parse("zero coefficient stored".into()));
            }
            let xs = parse_powers(item.get("x"), "x")?;
            let ys = parse_powers(item.get("y"), "y")?;
            if xs.len() != n || ys.len() != m {
                return Err(RatPolyError::Parse(format!(
                    "variable count mismatch: got ({}, {}), expected ({}, {})",
                    xs.len(),
                    ys.len(),
                    n,
                    m
                )));
            }
            p.add_term(Monomial::new(xs, ys), c);
        }
        Ok(p)
    }
}

fn parse_powers(v: Option<&serde_json::Value>, which: &str) -> Result<Vec<u32>, RatPolyError> {
    let arr = v
        .and_then(|v| v.as_array())
        .ok_or_else(|| RatPolyError::Parse(format!("missing {which} powers")))?;
    arr.iter()
        .map(|e| {
            e.as_u64()
                .map(|u| u as u32)
                .ok_or_else(|| RatPolyError::Parse(format!("bad {which} power")))
        })
        .collect()
}

pub fn parse_rational(s: &str) -> Result<Rational, RatPolyError> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n: BigInt = num
        .trim()
        .parse()
        .map_err(|_| RatPolyError::Parse(format!("bad numerator in {s:?}")))?;
    let d: BigInt = den
        .trim()
        .parse()
        .map_err(|_| RatPolyError::Parse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(RatPolyError::Parse("zero denominator".into()));
    }
    Ok(Rational::new(n, d))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    // BigRational -> f64 with enough care for large numerators/denominators.
    let n = r.numer();
    let d = r.denom();
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    if nf.is_finite() && df.is_finite() && df != 0.0 {
        nf / df
    } else {
        // fall back to log-scale division
        let (sn, ln) = bigint_log_abs(n);
        let (_, ld) = bigint_log_abs(d);
        sn * (ln - ld).exp()
    }
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(f64::INFINITY)
}

fn bigint_log_abs(b: &BigInt) -> (f64, f64) {
    let sign = if b.is_negative() { -1.0 } else { 1.0 };
    let (_, digits) = b.abs().to_radix_be(1 << 16);
    let mut acc: f64 = 0.0;
    let mut log = 0.0f64;
    for &d in digits.iter() {
        acc = acc * 65536.0 + d as f64;
        if acc > 1e280 {
            log += acc.ln();
            acc = 1.0;
        }
    }
    (sign, log + acc.ln() + 0.0)
}

// --- δ-grading and the Grushin/Euler operators ------------------------------

/// δ-degree of a δ-homogeneous polynomial.
pub fn delta_degree(p: &RationalPolynomial, cfg: GrushinConfig) -> Result<u64, RatPolyError> {
    let mut deg: Option<u64> = None;
    for (mono, _) in p.terms() {
        let d = mono.delta_degree(cfg.alpha);
        match deg {
            None => deg = Some(d),
            Some(d0) if d0 != d => return Err(RatPolyError::MixedDegree(d0, d)),
            _ => {}
        }
    }
    deg.ok_or(RatPolyError::ZeroPolynomial)
}

/// Δ_α p = Δ_x p + |x|^{2α} Δ_y p, exactly.
pub fn apply_grushin(p: &RationalPolynomial, cfg: GrushinConfig) -> RationalPolynomial {
    let lx = p.laplace_x(cfg.n);
    let ly = p.laplace_y(cfg.m);
    if ly.is_zero() {
        return lx;
    }
    let weight = RationalPolynomial::x_norm_sq(cfg.n, cfg.m).pow(cfg.alpha);
    lx.add(&weight.mul(&ly))
}

/// 𝔼_α p = Σ x_i ∂_{x_i} p + (α+1) Σ y_j ∂_{y_j} p; equals k·p on δ-homogeneous p.
pub fn apply_euler(p: &RationalPolynomial, cfg: GrushinConfig) -> RationalPolynomial {
    let mut out = RationalPolynomial::zero();
    for (mono, c) in p.terms() {
        let k = mono.x_degree() as i64 + cfg.step() as i64 * mono.y_degree() as i64;
        out.add_term(mono.clone(), c.clone() * rat_int(k));
    }
    out
}

/// All monomials of δ-degree exactly k, in graded-lex order.
pub fn enumerate_monomials(cfg: GrushinConfig, k: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let step = cfg.step() as u64;
    // split k = xdeg + step * ydeg
    let mut ydeg = 0u64;
    while step * ydeg <= k {
        let xdeg = k - step * ydeg;
        let xparts = compositions(xdeg, cfg.n);
        let yparts = compositions(ydeg, cfg.m);
        for xs in &xparts {
            for ys in &yparts {
                out.push(Monomial::new(xs.clone(), ys.clone()));
            }
        }
        ydeg += 1;
    }
    out.sort();
    out
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: u64, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(total: u64, idx: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx + 1 == cur.len() {
            cur[idx] = total as u32;
            out.push(cur.clone());
            return;
        }
        for v in 0..=total {
            cur[idx] = v as u32;
            rec(total - v, idx + 1, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(total, 0, &mut cur, &mut out);
    out
}

// --- constructive preimage ---------------------------------------------------

/// Euclidean Laplace preimage in the x-variables only: returns X with
/// Δ_x X = q for q homogeneous of x-degree d, via the closed-form ansatz
/// X = Σ_{j≥1} a_j |x|^{2j} Δ_x^{j-1} q,  a_1 = 1/(2(n+2d)),
/// a_{j+1} = -a_j / (2(j+1)(n+2d-2j)).
fn laplace_preimage_x(q: &RationalPolynomial, cfg: GrushinConfig) -> RationalPolynomial {
    if q.is_zero() {
        return RationalPolynomial::zero();
    }
    let n = cfg.n;
    let d = q.terms().next().map(|(m, _)| m.x_degree()).unwrap() as i64;
    let xsq = RationalPolynomial::x_norm_sq(cfg.n, cfg.m);
    let mut out = RationalPolynomial::zero();
    let mut a = Rational::one() / rat_int(2 * (n as i64 + 2 * d));
    let mut lap = q.clone(); // Δ^{j-1} q
    let mut xpow = xsq.clone(); // |x|^{2j}
    let mut j: i64 = 1;
    loop {
        out = out.add(&xpow.mul(&lap).scale(&a));
        lap = lap.laplace_x(n);
        if lap.is_zero() {
            break;
        }
        a = -a / rat_int(2 * (j + 1) * (n as i64 + 2 * d - 2 * j));
        xpow = xpow.mul(&xsq);
        j += 1;
    }
    out
}

/// A δ-homogeneous g with Δ_α g = f, by the telescoping alternating sum
/// g = Σ_ℓ (−1)^{ℓ−1} X_ℓ Δ_y^{ℓ−1} Y applied per (x-part × y-part) of f,
/// where Δ_x X_1 = X and Δ_x X_ℓ = |x|^{2α} X_{ℓ−1}.
pub fn grushin_preimage(f: &RationalPolynomial, cfg: GrushinConfig) -> RationalPolynomial {
    let weight = RationalPolynomial::x_norm_sq(cfg.n, cfg.m).pow(cfg.alpha);
    // group terms of f by their y-monomial
    let mut groups: BTreeMap<Vec<u32>, RationalPolynomial> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let mut xonly = mono.clone();
        xonly.ypow = vec![0; cfg.m];
        groups
            .entry(mono.ypow.clone())
            .or_insert_with(RationalPolynomial::zero)
            .add_term(xonly, c.clone());
    }
    let mut g = RationalPolynomial::zero();
    for (ypow, xpoly) in groups {
        let ymono = RationalPolynomial::from_monomial(
            Monomial::new(vec![0; cfg.n], ypow.clone()),
            Rational::one(),
        );
        let jdeg: u64 = ypow.iter().map(|&p| p as u64).sum();
        let nsteps = (jdeg / 2 + 1) as usize;
        let mut xell = laplace_preimage_x(&xpoly, cfg); // X_1
        let mut ylap = ymono; // Δ_y^{ℓ-1} Y
        for ell in 1..=nsteps {
            let sign = if ell % 2 == 1 {
                Rational::one()
            } else {
                -Rational::one()
            };
            g = g.add(&xell.mul(&ylap).scale(&sign));
            ylap = ylap.laplace_y(cfg.m);
            if ylap.is_zero() {
                break;
            }
            xell = laplace_preimage_x(&weight.mul(&xell), cfg);
        }
    }
    g
}

// --- exact linear algebra ----------------------------------------------------

/// Exact basis of ker(Δ_α) ∩ 𝒫_k^α via the nullspace of the Δ_α matrix in the
/// monomial basis (fraction-free Bareiss elimination over BigInt).
pub fn nullspace_harmonics(cfg: GrushinConfig, k: u64) -> Vec<RationalPolynomial> {
    let cols = enumerate_monomials(cfg, k);
    if k < 2 {
        // Δ_α annihilates everything of δ-degree < 2
        return cols
            .into_iter()
            .map(|m| RationalPolynomial::from_monomial(m, Rational::one()))
            .collect();
    }
    let rows = enumerate_monomials(cfg, k - 2);
    let row_index: BTreeMap<&Monomial, usize> =
        rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (cidx, mono) in cols.iter().enumerate() {
        let image = apply_grushin(
            &RationalPolynomial::from_monomial(mono.clone(), Rational::one()),
            cfg,
        );
        for (m2, c) in image.terms() {
            let r = *row_index.get(m2).expect("image outside 𝒫_{k-2}");
            // differentiation of integer monomials stays integral
            debug_assert!(c.denom().is_one());
            mat[r][cidx] = c.numer().clone();
        }
    }
    integer_nullspace(&mat, cols.len())
        .into_iter()
        .map(|vec| {
            let mut p = RationalPolynomial::zero();
            for (cidx, v) in vec.into_iter().enumerate() {
                if !v.is_zero() {
                    p.add_term(cols[cidx].clone(), Rational::from(v));
                }
            }
            p
        })
        .collect()
}

/// Rank of the Δ_α matrix 𝒫_k^α → 𝒫_{k-2}^α, exactly.
pub fn grushin_rank(cfg: GrushinConfig, k: u64) -> usize {
    if k < 2 {
        return 0;
    }
    let cols = enumerate_monomials(cfg, k);
    grushin_rank_from(cfg, k).min(cols.len())
}

fn grushin_rank_from(cfg: GrushinConfig, k: u64) -> usize {
    let cols = enumerate_monomials(cfg, k);
    let rows = enumerate_monomials(cfg, k - 2);
    let row_index: BTreeMap<&Monomial, usize> =
        rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (cidx, mono) in cols.iter().enumerate() {
        let image = apply_grushin(
            &RationalPolynomial::from_monomial(mono.clone(), Rational::one()),
            cfg,
        );
        for (m2, c) in image.terms() {
            let r = *row_index.get(m2).unwrap();
            mat[r][cidx] = c.numer().clone();
        }
    }
    let (_, pivots) = bareiss_echelon(mat);
    pivots.len()
}

/// Fraction-free (Bareiss) row echelon. Returns the echelon matrix and the
/// pivot column indices.
pub fn bareiss_echelon(mut mat: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = mat.len();
    let ncols = if nrows == 0 { 0 } else { mat[0].len() };
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..ncols {
        if r >= nrows {
            break;
        }
        // find a pivot in column c at row >= r
        let Some(pr) = (r..nrows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, pr);
        let pivot = mat[r][c].clone();
        // Bareiss update of every row below the pivot row, including rows whose
        // leading entry is already zero (keeps the exact-division invariant).
        for i in (r + 1)..nrows {
            for cc in (c + 1)..ncols {
                let num = &pivot * &mat[i][cc] - &mat[i][c] * &mat[r][cc];
                mat[i][cc] = &num / &prev;
            }
            mat[i][c] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    (mat, pivots)
}

/// Nullspace basis (integer vectors, denominators cleared) of an integer matrix
/// with `ncols` columns.
fn integer_nullspace(mat: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let (ech, pivots) = bareiss_echelon(mat.to_vec());
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        // back-substitute with the free column set to 1
        let mut sol = vec![Rational::zero(); ncols];
        sol[fc] = Rational::one();
        for (ri, &pc) in pivots.iter().enumerate().rev() {
            // row ri: ech[ri][pc] * sol[pc] + Σ_{c>pc} ech[ri][c] * sol[c] = 0
            let mut acc = Rational::zero();
            for c in (pc + 1)..ncols {
                if !ech[ri][c].is_zero() && !sol[c].is_zero() {
                    acc += Rational::from(ech[ri][c].clone()) * &sol[c];
                }
            }
            sol[pc] = -acc / Rational::from(ech[ri][pc].clone());
        }
        // clear denominators
        let mut lcm = BigInt::one();
        for s in &sol {
            if !s.is_zero() {
                lcm = num_integer::lcm(lcm, s.denom().clone());
            }
        }
        basis.push(
            sol.into_iter()
                .map(|s| s.numer() * (&lcm / s.denom()))
                .collect(),
        );
    }
    basis
}

/// Abstract vector usable by [`rational_gram_schmidt`].
pub trait QVector: Clone {
    /// self += c · other
    fn axpy(&mut self, c: &Rational, other: &Self);
}

impl QVector for RationalPolynomial {
    fn axpy(&mut self, c: &Rational, other: &Self) {
        for (mono, v) in &other.terms {
            self.add_term(mono.clone(), v.clone() * c);
        }
    }
}

impl QVector for Vec<Rational> {
    fn axpy(&mut self, c: &Rational, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += c.clone() * b;
        }
    }
}

/// Classical Gram–Schmidt over an exact rational inner-product oracle.
/// Returns an orthogonal (not normalized) basis and its exact squared norms.
pub fn rational_gram_schmidt<V: QVector>(
    vectors: &[V],
    ip: impl Fn(&V, &V) -> Rational,
) -> Result<(Vec<V>, Vec<Rational>), RatPolyError> {
    let mut basis: Vec<V> = Vec::with_capacity(vectors.len());
    let mut norms: Vec<Rational> = Vec::with_capacity(vectors.len());
    for (idx, v) in vectors.iter().enumerate() {
        let mut u = v.clone();
        for (b, nb) in basis.iter().zip(&norms) {
            let c = -ip(v, b) / nb.clone();
            u.axpy(&c, b);
        }
        let nu = ip(&u, &u);
        if nu.is_zero() {
            return Err(RatPolyError::DependentInput(idx));
        }
        basis.push(u);
        norms.push(nu);
    }
    Ok((basis, norms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, m: usize, alpha: u32) -> GrushinConfig {
        GrushinConfig::new(n, m, alpha)
    }

    fn xsq(i: usize, n: usize, m: usize) -> RationalPolynomial {
        let x = RationalPolynomial::var_x(i, n, m);
        x.mul(&x)
    }

    #[test]
    fn delta_degree_basics() {
        let c = cfg(2, 1, 1);
        assert_eq!(delta_degree(&xsq(0, 2, 1), c).unwrap(), 2);
        assert_eq!(
            delta_degree(&RationalPolynomial::var_y(0, 2, 1), c).unwrap(),
            2
        );
        let mixed = RationalPolynomial::var_x(0, 2, 1).add(&RationalPolynomial::var_y(0, 2, 1));
        assert!(matches!(
            delta_degree(&mixed, c),
            Err(RatPolyError::MixedDegree(_, _))
        ));
        assert_eq!(
            delta_degree(&RationalPolynomial::zero(), c),
            Err(RatPolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn grushin_operator_examples() {
        let c = cfg(2, 1, 1);
        let two = RationalPolynomial::constant(rat_int(2), 2, 1);
        assert_eq!(apply_grushin(&xsq(0, 2, 1), c), two);
        assert!(apply_grushin(&RationalPolynomial::var_y(0, 2, 1), c).is_zero());

        // 4(y1²+y2²) − (x1²+x2²)² is Grushin-harmonic for (2,2,1)
        let c22 = cfg(2, 2, 1);
        let p = RationalPolynomial::y_norm_sq(2, 2)
            .scale(&rat_int(4))
            .sub(&RationalPolynomial::x_norm_sq(2, 2).pow(2));
        assert!(apply_grushin(&p, c22).is_zero());
    }

    #[test]
    fn euler_operator() {
        let c = cfg(2, 1, 1);
        let p = RationalPolynomial::var_x(0, 2, 1).mul(&RationalPolynomial::var_x(1, 2, 1));
        assert_eq!(apply_euler(&p, c), p.scale(&rat_int(2)));
        let y = RationalPolynomial::var_y(0, 2, 1);
        assert_eq!(apply_euler(&y, c), y.scale(&rat_int(2)));
        assert!(apply_euler(&RationalPolynomial::constant(rat_int(1), 2, 1), c).is_zero());
    }

    #[test]
    fn monomial_enumeration() {
        let c = cfg(1, 1, 1);
        assert_eq!(enumerate_monomials(c, 2).len(), 2);
        let c22 = cfg(2, 2, 1);
        assert_eq!(enumerate_monomials(c22, 2).len(), 5);
        // α = 0: classical count C(n+m+k-1, k)
        let c0 = cfg(2, 2, 0);
        assert_eq!(enumerate_monomials(c0, 3).len(), 20); // C(6,3)
    }

    #[test]
    fn preimage_roundtrip() {
        for (n, m, alpha) in [(2, 1, 1), (2, 2, 1), (3, 2, 2), (2, 1, 3)] {
            let c = cfg(n, m, alpha);
            for k in 0..=8u64 {
                for mono in enumerate_monomials(c, k) {
                    let f = RationalPolynomial::from_monomial(mono, rat(3, 7));
                    let g = grushin_preimage(&f, c);
                    assert_eq!(apply_grushin(&g, c), f);
                    assert_eq!(delta_degree(&g, c).unwrap(), k + 2);
                }
            }
        }
    }

    #[test]
    fn preimage_spec_examples() {
        let c = cfg(2, 1, 1);
        let f = RationalPolynomial::constant(rat_int(2), 2, 1);
        let g = grushin_preimage(&f, c);
        assert_eq!(apply_grushin(&g, c), f);

        let c22 = cfg(2, 2, 1);
        let f = RationalPolynomial::var_y(0, 2, 2);
        let g = grushin_preimage(&f, c22);
        assert_eq!(apply_grushin(&g, c22), f);
        assert_eq!(delta_degree(&g, c22).unwrap(), 4);
    }

    #[test]
    fn nullspace_dimensions() {
        let c22 = cfg(2, 2, 1);
        let h2 = nullspace_harmonics(c22, 2);
        assert_eq!(h2.len(), 4);
        for p in &h2 {
            assert!(apply_grushin(p, c22).is_zero());
        }
        // α=0 classical: dim of harmonics of degree 2 in R^4 is 9
        let c0 = cfg(2, 2, 0);
        assert_eq!(nullspace_harmonics(c0, 2).len(), 9);
        // (2,1,2), k=1: linear x-polynomials
        let c212 = cfg(2, 1, 2);
        assert_eq!(nullspace_harmonics(c212, 1).len(), 2);
    }

    #[test]
    fn rank_is_surjective() {
        for (n, m, alpha) in [(2, 2, 1), (2, 1, 2), (3, 2, 1)] {
            let c = cfg(n, m, alpha);
            for k in 2..=7u64 {
                assert_eq!(grushin_rank(c, k), enumerate_monomials(c, k - 2).len());
            }
        }
    }

    #[test]
    fn gram_schmidt_legendre_shift() {
        // {1, t} with ip = ∫₀¹ dt on coefficient vectors (1, t)
        let v1 = vec![Rational::one(), Rational::zero()];
        let v2 = vec![Rational::zero(), Rational::one()];
        let ip = |a: &Vec<Rational>, b: &Vec<Rational>| {
            // ∫₀¹ (a0 + a1 t)(b0 + b1 t) dt
            a[0].clone() * &b[0]
                + (a[0].clone() * &b[1] + a[1].clone() * &b[0]) / rat_int(2)
                + a[1].clone() * &b[1] / rat_int(3)
        };
        let (basis, norms) = rational_gram_schmidt(&[v1, v2], ip).unwrap();
        assert_eq!(basis[1], vec![rat(-1, 2), Rational::one()]);
        assert_eq!(norms, vec![Rational::one(), rat(1, 12)]);

        let dep = vec![
            vec![Rational::one(), Rational::one()],
            vec![rat_int(2), rat_int(2)],
        ];
        let ip2 = |a: &Vec<Rational>, b: &Vec<Rational>| {
            a[0].clone() * &b[0] + a[1].clone() * &b[1]
        };
        assert!(matches!(
            rational_gram_schmidt(&dep, ip2),
            Err(RatPolyError::DependentInput(1))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let c = cfg(2, 2, 1);
        let p = RationalPolynomial::y_norm_sq(2, 2)
            .scale(&rat(4, 3))
            .sub(&RationalPolynomial::x_norm_sq(2, 2).pow(2));
        let j = p.to_json(c);
        let back = RationalPolynomial::from_json(&j, 2, 2).unwrap();
        assert_eq!(p, back);
        // zero coefficient rejected
        let bad = serde_json::json!([{"coeff": "0/1", "x": [0,0], "y": [0,0]}]);
        assert!(RationalPolynomial::from_json(&bad, 2, 2).is_err());
        // length mismatch rejected
        let bad2 = serde_json::json!([{"coeff": "1/1", "x": [0], "y": [0,0]}]);
        assert!(RationalPolynomial::from_json(&bad2, 2, 2).is_err());
    }

    #[test]
    fn alpha_zero_is_euclidean() {
        let c = cfg(2, 2, 0);
        for k in 0..=6u64 {
            for mono in enumerate_monomials(c, k) {
                let p = RationalPolynomial::from_monomial(mono, Rational::one());
                let lhs = apply_grushin(&p, c);
                let rhs = p.laplace_x(2).add(&p.laplace_y(2));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn homogeneity_preserved() {
        let c = cfg(3, 2, 2);
        for k in 2..=10u64 {
            for mono in enumerate_monomials(c, k) {
                let p = RationalPolynomial::from_monomial(mono, rat(5, 3));
                let g = apply_grushin(&p, c);
                if !g.is_zero() {
                    assert_eq!(delta_degree(&g, c).unwrap(), k - 2);
                }
            }
        }
    }
}
