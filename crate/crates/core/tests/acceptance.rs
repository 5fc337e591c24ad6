//! End-to-end acceptance suite: one test (and one printed pass/fail line)
//! per acceptance criterion. Run with `--nocapture` to see the lines.

use std::collections::HashMap;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use grushin_core::carleman::{carleman_ratio, eigenrelation_residual, exponents, TestFamily};
use grushin_core::estimates::{
    bernstein_check, growth_fit, iin_check, kl1_check, projector_weighted_norm, unit_bound_check,
};
use grushin_core::fischer::{
    fischer_decompose, sl2_commutator_check, spectral_l, verify_proj_identity, SpectralRep,
};
use grushin_core::harmonics::{
    addition_formula_residual, admissible_pairs, build_basis, build_basis_element, dims,
    enumerate_indices, kernel_diag_sup, kernel_g, spherical_basis, HarmonicIndex,
};
use grushin_core::quadrature::{
    gauss_jacobi_rule, omega_inner_product, sphere_monomial_integral, OmegaFunction, OmegaPoint,
};
use grushin_core::ratpoly::{
    apply_grushin, enumerate_monomials, rat, rat_int, rational_to_f64, Rational,
};
use grushin_core::specfun::{
    connection_i, connection_i_special, gegenbauer_eval, gegenbauer_j, jacobi_eval, norm_b,
    JacobiParams,
};
use grushin_core::{GrushinConfig, RationalPolynomial};

fn sweep_configs() -> Vec<GrushinConfig> {
    let mut v = Vec::new();
    for alpha in [1u32, 2, 3] {
        for n in [2usize, 3, 4] {
            for m in [1usize, 2, 3] {
                v.push(GrushinConfig::new(n, m, alpha));
            }
        }
    }
    v
}

fn passline(id: u32, name: &str) {
    println!("criterion {id:2} ({name}): PASS");
}

#[test]
fn criterion_01_exact_harmonicity() {
    let start = std::time::Instant::now();
    sweep_configs().par_iter().for_each(|&cfg| {
        for k in 0..=12u32 {
            for idx in enumerate_indices(cfg, k) {
                let elem = build_basis_element(cfg, idx).unwrap();
                assert!(
                    apply_grushin(&elem.cartesian, cfg).is_zero(),
                    "{cfg} {idx:?} is not exactly harmonic"
                );
            }
        }
    });
    assert!(start.elapsed().as_secs() < 300, "runtime target exceeded");
    passline(1, "exact harmonicity, 27 configs, k<=12");
}

const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P61 as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

/// Rank over F_p of a dense matrix (in-place Gaussian elimination).
fn rank_mod_p(mut m: Vec<Vec<u64>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = powmod(m[rank][c], P61 - 2);
        for r in rank + 1..rows {
            if m[r][c] == 0 {
                continue;
            }
            let f = mulmod(m[r][c], inv);
            for j in c..cols {
                let sub = mulmod(f, m[rank][j]);
                m[r][j] = (m[r][j] + P61 - sub) % P61;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Exact rank of Δ_α on 𝒫_k, certified modularly: rank(A·M) ≤ rank(M) ≤
/// dim 𝒫_{k-2} for any A, so a random compression A·M (square, mod p) of
/// full rank pins rank(M) = dim 𝒫_{k-2} exactly.
fn certified_grushin_rank(cfg: GrushinConfig, k: u32) -> usize {
    if k < 2 {
        return 0;
    }
    let domain = enumerate_monomials(cfg, k as u64);
    let codomain = enumerate_monomials(cfg, k as u64 - 2);
    let col_of: HashMap<_, _> = codomain
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, mono)| (mono, i))
        .collect();
    let cols = codomain.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ ((cfg.n as u64) << 32) ^ k as u64);
    let mut compressed = vec![vec![0u64; cols]; cols];
    for mono in domain {
        let image = apply_grushin(&RationalPolynomial::from_monomial(mono, rat_int(1)), cfg);
        let entries: Vec<(usize, u64)> = image
            .terms()
            .map(|(mo, c)| {
                assert!(c.denom().is_one(), "non-integer Laplacian coefficient");
                let v = c.numer().to_i64().expect("small coefficient");
                let vm = if v >= 0 {
                    v as u64 % P61
                } else {
                    P61 - ((-v) as u64 % P61)
                };
                (col_of[mo], vm)
            })
            .collect();
        if entries.is_empty() {
            continue;
        }
        // accumulate the random left factor column for this domain monomial
        for row in compressed.iter_mut() {
            let a: u64 = rng.gen_range(0..P61);
            if a == 0 {
                continue;
            }
            for &(c, v) in &entries {
                row[c] = (row[c] + mulmod(a, v)) % P61;
            }
        }
    }
    let r = rank_mod_p(compressed);
    assert_eq!(
        r, cols,
        "{cfg} k={k}: compressed rank {r} below codomain dimension {cols}"
    );
    cols
}

#[test]
fn criterion_02_dimension_triple_agreement() {
    sweep_configs().par_iter().for_each(|&cfg| {
        for k in 0..=12u32 {
            let enumerated = enumerate_indices(cfg, k).len() as u64;
            let (dp, dh) = dims(cfg, k);
            let by_rank = dp - certified_grushin_rank(cfg, k) as u64;
            assert_eq!(enumerated, dh, "{cfg} k={k}: enumeration vs closed form");
            assert_eq!(dh, by_rank, "{cfg} k={k}: closed form vs exact rank");
        }
    });
    passline(2, "dimension triple agreement, 27 configs, k<=12");
}

/// Flattened harmonic: monomial exponents packed into a u64 (8 bits each),
/// f64 coefficients.
type FlatPoly = Vec<(u64, f64)>;

fn flatten_basis(n: usize, ell: u32) -> Vec<(FlatPoly, f64)> {
    spherical_basis(n, ell)
        .iter()
        .map(|(p, nrm)| {
            let flat = p
                .terms()
                .map(|(mono, c)| {
                    let mut key = 0u64;
                    for (i, &e) in mono.xpow.iter().enumerate() {
                        assert!(e < 256);
                        key |= (e as u64) << (8 * i);
                    }
                    (key, rational_to_f64(c))
                })
                .collect();
            (flat, rational_to_f64(nrm))
        })
        .collect()
}

fn flat_inner(
    n: usize,
    p1: &FlatPoly,
    p2: &FlatPoly,
    table: &mut HashMap<u64, f64>,
) -> f64 {
    const ODD: u64 = 0x0101_0101_0101_0101;
    let mut acc = 0.0f64;
    for &(e1, c1) in p1 {
        for &(e2, c2) in p2 {
            let key = e1 + e2;
            if key & ODD != 0 {
                continue;
            }
            let val = *table.entry(key).or_insert_with(|| {
                let exps: Vec<u32> = (0..n).map(|i| ((key >> (8 * i)) & 0xff) as u32).collect();
                rational_to_f64(&sphere_monomial_integral(n, &exps))
            });
            acc += c1 * c2 * val;
        }
    }
    acc
}

/// f64 Gram of the spherical harmonic families: within-degree full (diagonal
/// equals the stored exact norms), cross-degree on deterministic subsets.
fn spherical_gram_check(n: usize, ell_max: u32, tol: f64) {
    let mut table: HashMap<u64, f64> = HashMap::new();
    let flats: Vec<Vec<(FlatPoly, f64)>> =
        (0..=ell_max).map(|ell| flatten_basis(n, ell)).collect();
    for ell in 0..=ell_max as usize {
        let fam = &flats[ell];
        for (i, (pi, nrm)) in fam.iter().enumerate() {
            for (l, (pl, _)) in fam.iter().enumerate().skip(i) {
                let acc = flat_inner(n, pi, pl, &mut table);
                let want = if i == l { *nrm } else { 0.0 };
                assert!(
                    (acc - want).abs() <= tol * (1.0 + want.abs()),
                    "S^{} gram ell={ell} ({i},{l}): {acc} vs {want}",
                    n - 1
                );
            }
        }
        // cross-degree orthogonality, subsampled deterministically
        for lower in (ell % 2..ell).step_by(2) {
            for (pi, _) in fam.iter().take(8) {
                for (pl, _) in flats[lower].iter().take(8) {
                    let acc = flat_inner(n, pi, pl, &mut table);
                    assert!(
                        acc.abs() <= tol,
                        "S^{} cross gram {ell}/{lower}: {acc}",
                        n - 1
                    );
                }
            }
        }
    }
}

/// b₁b₂ ∫ h₁ h₂ sin^{S}φ cos^{C}φ dφ over the φ-range, with an extra ψ^{-2β}
/// weight folded into S, for two normalized profiles sharing (ell, j); equals
/// ⟨ψ^{-β} e₁, ψ^{-β} e₂⟩ because the angular factors integrate to one.
fn fast_weighted_ip(
    cfg: GrushinConfig,
    ell: u32,
    j: u32,
    kt1: u32,
    kt2: u32,
    beta: f64,
) -> f64 {
    let av = cfg.step() as f64;
    let e0 = (cfg.n as f64 - 2.0) / av + 1.0;
    let s_exp = e0 + 2.0 * ell as f64 / av - 4.0 * cfg.alpha as f64 * beta / av;
    let mu = (cfg.n as f64 - 2.0 + 2.0 * ell as f64) / (2.0 * av);
    if cfg.m == 1 {
        let (d1, d2) = (2 * kt1 + j, 2 * kt2 + j);
        let lam = mu + 0.5;
        let b1 = grushin_core::specfun::gegenbauer_norm_b(d1, lam).unwrap();
        let b2 = grushin_core::specfun::gegenbauer_norm_b(d2, lam).unwrap();
        let a = (s_exp - 1.0) / 2.0;
        let rule = gauss_jacobi_rule(a, a, d1.max(d2) + 4).unwrap();
        b1 * b2
            * rule.integrate(|t| {
                gegenbauer_eval(d1, lam, t).unwrap() * gegenbauer_eval(d2, lam, t).unwrap()
            })
    } else {
        let c_exp = (cfg.m - 1) as f64 + 2.0 * j as f64;
        let params = JacobiParams::new(mu, j as f64 + cfg.m as f64 / 2.0 - 1.0);
        let b1 = norm_b(kt1, params).unwrap().sqrt().recip();
        let b2 = norm_b(kt2, params).unwrap().sqrt().recip();
        let rule =
            gauss_jacobi_rule((s_exp - 1.0) / 2.0, (c_exp - 1.0) / 2.0, kt1.max(kt2) + 4).unwrap();
        let iphi = 2f64.powf(-(s_exp + c_exp) / 2.0 - 1.0)
            * rule.integrate(|t| jacobi_eval(kt1, params, t) * jacobi_eval(kt2, params, t));
        b1 * b2 * iphi
    }
}

#[test]
fn criterion_03_orthonormality() {
    let tol = 1e-10;
    // full Gram for the smallest configuration
    for cfg in [GrushinConfig::new(2, 2, 1)] {
        let res = 18u32;
        let mut prev: Vec<OmegaFunction> = Vec::new();
        for k in 0..=10u32 {
            let elems = build_basis(cfg, k).unwrap();
            let fns: Vec<OmegaFunction> = elems.iter().map(|e| e.omega_function(true)).collect();
            let devs: Vec<f64> = (0..fns.len())
                .into_par_iter()
                .map(|i| {
                    let mut d = 0.0f64;
                    for l in i..fns.len() {
                        let ip = omega_inner_product(&fns[i], &fns[l], 0.0, cfg, res).unwrap();
                        let want = if i == l { 1.0 } else { 0.0 };
                        d = d.max((ip - want).abs());
                    }
                    for g in &prev {
                        d = d.max(omega_inner_product(&fns[i], g, 0.0, cfg, res).unwrap().abs());
                    }
                    d
                })
                .collect();
            let worst = devs.into_iter().fold(0.0f64, f64::max);
            assert!(worst < tol, "{cfg} k={k}: gram deviation {worst}");
            // diagonal pre-normalization: quadrature of the unnormalized
            // profile matches the closed-form normalizer
            for e in &elems {
                let u = e.omega_function(false);
                let ip = omega_inner_product(&u, &u, 0.0, cfg, res).unwrap();
                let want = e.normalizer().powi(-2);
                assert!(
                    (ip - want).abs() < tol * want,
                    "{cfg} {:?}: {ip} vs {want}",
                    e.index
                );
            }
            prev = fns;
        }
    }
    // (3,2,2) and (4,3,1) are too large for brute-force Grams; the basis is
    // separable, so the Gram factorizes into spherical Grams times
    // per-(ell, j) profile inner products, plus exact-path spot checks on
    // representatives from the low-ell blocks.
    for cfg in [GrushinConfig::new(3, 2, 2), GrushinConfig::new(4, 3, 1)] {
        let jmax = admissible_pairs(cfg, 10)
            .into_iter()
            .map(|(_, j, _)| j)
            .max()
            .unwrap();
        spherical_gram_check(cfg.n as usize, 10, tol);
        spherical_gram_check(cfg.m as usize, jmax, tol);
        let res = 18u32;
        for k in 0..=10u32 {
            for (ell, j, kt) in admissible_pairs(cfg, k) {
                let d = fast_weighted_ip(cfg, ell, j, kt, kt, 0.0);
                assert!((d - 1.0).abs() < tol, "{cfg} ({k},{ell},{j}): diag {d}");
                if kt >= 1 {
                    let c = fast_weighted_ip(cfg, ell, j, kt, kt - 1, 0.0);
                    assert!(c.abs() < tol, "{cfg} ({k},{ell},{j}): cross {c}");
                }
            }
            // exact-path representatives (low-ell blocks keep the exact sphere
            // integrals affordable)
            let thin = |kk: u32| -> Vec<(OmegaFunction, f64)> {
                admissible_pairs(cfg, kk)
                    .into_iter()
                    .filter(|&(ell, j, _)| ell <= 4 && j <= 2)
                    .map(|(ell, j, _)| {
                        let idx = HarmonicIndex { k: kk, ell, j, p: 1, q: 1 };
                        let e = build_basis_element(cfg, idx).unwrap();
                        (e.omega_function(true), e.normalizer())
                    })
                    .collect()
            };
            let reps = thin(k);
            for (i, (f, _)) in reps.iter().enumerate() {
                for (l, (g, _)) in reps.iter().enumerate().skip(i) {
                    let ip = omega_inner_product(f, g, 0.0, cfg, res).unwrap();
                    let want = if i == l { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < tol, "{cfg} k={k} reps ({i},{l}): {ip}");
                }
            }
            if k >= 2 {
                for (g, _) in &thin(k - 2) {
                    for (f, _) in &reps {
                        let ip = omega_inner_product(f, g, 0.0, cfg, res).unwrap();
                        assert!(ip.abs() < tol, "{cfg} cross degree {k}/{}: {ip}", k - 2);
                    }
                }
            }
            // pre-normalization on the same representatives
            for ((_, nrm), (ell, j, _)) in reps.iter().zip(
                admissible_pairs(cfg, k)
                    .into_iter()
                    .filter(|&(ell, j, _)| ell <= 4 && j <= 2),
            ) {
                let idx = HarmonicIndex { k, ell, j, p: 1, q: 1 };
                let u = build_basis_element(cfg, idx).unwrap().omega_function(false);
                let ip = omega_inner_product(&u, &u, 0.0, cfg, res).unwrap();
                let want = nrm.powi(-2);
                assert!(
                    (ip - want).abs() < tol * want,
                    "{cfg} k={k} ell={ell} j={j}: {ip} vs {want}"
                );
            }
        }
    }
    passline(3, "orthonormality and pre-normalization");
}

#[test]
fn criterion_04_addition_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let half = std::f64::consts::FRAC_PI_2;
    for (u, v) in [(3.0f64, 3.0f64), (4.0, 3.0), (5.0, 4.0)] {
        for k in 0..=20u32 {
            for _ in 0..100 {
                let r = addition_formula_residual(
                    u,
                    v,
                    k,
                    rng.gen_range(0.01..half - 0.01),
                    rng.gen_range(0.01..half - 0.01),
                    rng.gen_range(0.0..std::f64::consts::PI),
                    rng.gen_range(0.0..std::f64::consts::PI),
                )
                .unwrap();
                assert!(r < 1e-9, "(u,v)=({u},{v}) k={k}: residual {r}");
            }
        }
    }
    passline(4, "addition formula, 100 seeded points per (u,v), k<=20");
}

fn random_homogeneous(
    rng: &mut ChaCha8Rng,
    cfg: GrushinConfig,
    deg: u32,
) -> RationalPolynomial {
    let mut f = RationalPolynomial::zero();
    for mono in enumerate_monomials(cfg, deg as u64) {
        let c = rat(rng.gen_range(-5i64..=5), 1);
        if !c.is_zero() {
            f = f.add(&RationalPolynomial::from_monomial(mono, c));
        }
    }
    f
}

#[test]
fn criterion_05_reproducing_kernel_projection() {
    let cfg = GrushinConfig::new(2, 2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // product quadrature on Ω for (n, m, alpha) = (2, 2, 1):
    // dΩ = sin φ cos φ dφ dω₁ dω₂. Integrate in φ itself (not t = cos 2φ):
    // after the angular sums the integrand is a trig polynomial in φ, so
    // Gauss–Legendre in φ converges geometrically, whereas in t the
    // half-integer sine powers leave a √(1-t) endpoint singularity.
    let trule = gauss_jacobi_rule(0.0, 0.0, 32).unwrap();
    let nang = 40usize;
    let quarter = std::f64::consts::FRAC_PI_4;
    let mut grid: Vec<(OmegaPoint, f64)> = Vec::new();
    for (&x, &wt) in trule.nodes.iter().zip(&trule.weights) {
        let phi = quarter * (x + 1.0);
        for i in 0..nang {
            let a1 = 2.0 * std::f64::consts::PI * i as f64 / nang as f64;
            for l in 0..nang {
                let a2 = 2.0 * std::f64::consts::PI * l as f64 / nang as f64;
                let w = wt * quarter * phi.sin() * phi.cos()
                    * (2.0 * std::f64::consts::PI / nang as f64).powi(2);
                grid.push((
                    OmegaPoint {
                        phi,
                        omega1: vec![a1.cos(), a1.sin()],
                        omega2: vec![a2.cos(), a2.sin()],
                    },
                    w,
                ));
            }
        }
    }
    let eval_pts: Vec<OmegaPoint> = (0..2)
        .map(|_| OmegaPoint {
            phi: rng.gen_range(0.1..std::f64::consts::FRAC_PI_2 - 0.1),
            omega1: {
                let a: f64 = rng.gen_range(0.0..6.28);
                vec![a.cos(), a.sin()]
            },
            omega2: {
                let a: f64 = rng.gen_range(0.0..6.28);
                vec![a.cos(), a.sin()]
            },
        })
        .collect();
    // kernel values are independent of the test function: precompute per (k, ξ)
    let ks = [0u32, 2, 4, 6, 8, 1, 3, 5, 7];
    let mut kernel_cache: HashMap<(u32, usize), Vec<f64>> = HashMap::new();
    for &k in &ks {
        for (xi_i, xi) in eval_pts.iter().enumerate() {
            let vals = grid
                .iter()
                .map(|(sigma, _)| kernel_g(cfg, k, xi, sigma).unwrap())
                .collect();
            kernel_cache.insert((k, xi_i), vals);
        }
    }
    for trial in 0..20 {
        let deg = if trial % 2 == 0 { 8 } else { 7 };
        let f = random_homogeneous(&mut rng, cfg, deg);
        let fomega = grushin_core::harmonics::restrict_to_omega(&f, cfg);
        let fvals: Vec<f64> = grid.iter().map(|(pt, _)| fomega.eval(cfg, pt)).collect();
        for &k in &ks {
            if k % 2 != deg % 2 || k > deg {
                continue;
            }
            let projected = grushin_core::harmonics::project_pk(cfg, k, &fomega, 18).unwrap();
            for (xi_i, xi) in eval_pts.iter().enumerate() {
                let kv = &kernel_cache[&(k, xi_i)];
                let by_kernel: f64 = grid
                    .iter()
                    .zip(kv)
                    .zip(&fvals)
                    .map(|(((_, w), g), fv)| w * g * fv)
                    .sum();
                let by_basis = projected.eval(cfg, xi);
                assert!(
                    (by_kernel - by_basis).abs() < 1e-8,
                    "trial {trial} k={k}: kernel {by_kernel} vs basis {by_basis}"
                );
            }
        }
    }
    passline(5, "kernel-integral projection vs basis sum, 20 functions");
}

#[test]
fn criterion_06_closed_forms_vs_quadrature() {
    // norm_B over a 200-cell grid
    for ai in 0..10 {
        let a = 0.1 + 0.45 * ai as f64;
        for bi in 0..5 {
            let b = 0.2 + 0.8 * bi as f64;
            for deg in [0u32, 1, 3, 7] {
                let params = JacobiParams::new(a, b);
                let closed = norm_b(deg, params).unwrap();
                let rule = gauss_jacobi_rule(a, b, 40).unwrap();
                let quad = 2f64.powf(-(a + b + 2.0))
                    * rule.integrate(|t| jacobi_eval(deg, params, t).powi(2));
                assert!(
                    (closed - quad).abs() < 1e-10 * (1.0 + quad),
                    "B a={a} b={b} deg={deg}: {closed} vs {quad}"
                );
            }
        }
    }
    // connection_I over a 200-cell grid
    for gi in 0..5 {
        let g = 0.5 + 0.9 * gi as f64;
        for ai in 0..5 {
            let a = 0.15 + 0.7 * ai as f64;
            for bi in 0..2 {
                let b = 0.3 + 1.2 * bi as f64;
                for deg in [0u32, 1, 4, 9] {
                    let closed = connection_i(deg, g, a, b).unwrap();
                    let rule = gauss_jacobi_rule(a, b, 60).unwrap();
                    let p = JacobiParams::new(g, b);
                    let quad = 2f64.powf(-(a + b + 2.0))
                        * rule.integrate(|t| jacobi_eval(deg, p, t).powi(2));
                    assert!(
                        (closed - quad).abs() < 1e-10 * (1.0 + quad),
                        "I deg={deg} g={g} a={a} b={b}: {closed} vs {quad}"
                    );
                }
            }
        }
    }
    // gegenbauer_J over a 200-cell grid
    for li in 0..5 {
        let lam = 0.7 + 0.65 * li as f64;
        for mi in 0..10 {
            let mu = 0.3 + 0.31 * mi as f64;
            for deg in [0u32, 2, 5, 9] {
                let closed = gegenbauer_j(deg, lam, mu).unwrap();
                let rule = gauss_jacobi_rule(mu - 0.5, mu - 0.5, 60).unwrap();
                let quad = rule.integrate(|t| gegenbauer_eval(deg, lam, t).unwrap().powi(2));
                assert!(
                    (closed - quad).abs() < 1e-10 * (1.0 + quad),
                    "J deg={deg} lam={lam} mu={mu}: {closed} vs {quad}"
                );
            }
        }
    }
    // the alpha = gamma - 1 special case agrees with its closed form
    for g in [1.0f64, 2.5, 4.0] {
        for b in [0.0f64, 1.5] {
            for deg in [0u32, 1, 2, 5] {
                let lhs = connection_i(deg, g, g - 1.0, b).unwrap();
                let rhs = connection_i_special(deg, g, b).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-12 * (1.0 + rhs),
                    "special deg={deg} g={g} b={b}: {lhs} vs {rhs}"
                );
            }
        }
    }
    passline(6, "closed forms vs independent quadrature");
}

#[test]
fn criterion_07_bernstein_suite() {
    let rep = bernstein_check(20.0, 20.0, 200, 1201);
    assert!(rep.pass, "bernstein sup: {} at {}", rep.worst_ratio, rep.worst_point);
    let rep = unit_bound_check(200);
    assert!(rep.pass, "unit bound: {} at {}", rep.worst_ratio, rep.worst_point);
    // sharp Legendre envelope: (1-x²)^{1/4} |P_n(x)| ≤ 2/√(π(2n+1))
    let params = JacobiParams::new(0.0, 0.0);
    for n in 0..=200u32 {
        let cap = 2.0 / (std::f64::consts::PI * (2.0 * n as f64 + 1.0)).sqrt();
        for i in 0..2001 {
            let x = (std::f64::consts::PI * (i as f64 + 0.5) / 2001.0).cos();
            let v = (1.0 - x * x).powf(0.25) * jacobi_eval(n, params, x).abs();
            assert!(v <= cap + 1e-12, "legendre n={n} x={x}: {v} > {cap}");
        }
    }
    passline(7, "Bernstein sup < 12, unit bound, Legendre envelope");
}

#[test]
fn criterion_08_ratio_lemmas() {
    for (lam, mu) in [(2.0f64, 1.5f64), (3.0, 3.0), (1.5, 0.5)] {
        let rep = iin_check(lam, mu, 60, 20).unwrap();
        assert!(rep.pass, "iin ({lam},{mu}): {}", rep.worst_point);
    }
    for gi in 1..=6 {
        for beta in [0.0f64, 1.0, 2.5] {
            let rep = kl1_check(gi as f64, beta, 100).unwrap();
            assert!(rep.pass, "kl1 gamma={gi} beta={beta}: {}", rep.worst_ratio);
        }
    }
    passline(8, "per-term ratio and norm-ratio lemmas");
}

#[test]
fn criterion_09_growth_fits() {
    let start = std::time::Instant::now();
    let slack = 0.35;
    // kernel diagonal sup growth in k
    let kernel_cases = [
        (GrushinConfig::new(2, 2, 1), 2.0f64), // n + m - 2
        (GrushinConfig::new(3, 2, 1), 3.0),
        (GrushinConfig::new(4, 2, 2), 4.0),
        (GrushinConfig::new(3, 2, 2), 4.0), // m + 2
        (GrushinConfig::new(2, 2, 2), 4.0),
    ];
    kernel_cases.par_iter().for_each(|&(cfg, cap)| {
        let series: Vec<(u32, f64)> = (8..=40)
            .step_by(2)
            .map(|k| (k, kernel_diag_sup(cfg, k, 400).unwrap()))
            .collect();
        let (slope, _, _) = growth_fit(&series).unwrap();
        assert!(slope <= cap + slack, "{cfg} kernel sup slope {slope} > {cap}+{slack}");
    });
    // weighted projector norms
    let proj_cases = [
        (GrushinConfig::new(2, 2, 1), 0.3f64, 1.0f64), // 2α/(α+1)
        (GrushinConfig::new(3, 2, 2), 0.3, 4.0 / 3.0),
        (GrushinConfig::new(3, 1, 1), 0.3, 0.0), // m = 1, β < 1/2: bounded
        (GrushinConfig::new(3, 1, 1), 0.8, 2.0 * (2.0 * 0.8 - 1.0)),
    ];
    // the separable fast path (per-block 1-D weighted profile norms) must
    // agree with the full quadrature operator norm at small degree
    let fast_norm = |cfg: GrushinConfig, k: u32, beta: f64| -> f64 {
        admissible_pairs(cfg, k)
            .into_iter()
            .map(|(ell, j, kt)| fast_weighted_ip(cfg, ell, j, kt, kt, beta))
            .fold(0.0f64, f64::max)
    };
    proj_cases.par_iter().for_each(|&(cfg, beta, cap)| {
        for k in [4u32, 8] {
            let full = projector_weighted_norm(cfg, k, beta, 52).unwrap();
            let fast = fast_norm(cfg, k, beta);
            assert!(
                (full - fast).abs() < 1e-8 * full,
                "{cfg} beta={beta} k={k}: fast path {fast} vs quadrature {full}"
            );
        }
        let series: Vec<(u32, f64)> = (4..=40)
            .step_by(4)
            .map(|k| (k, fast_norm(cfg, k, beta)))
            .collect();
        let (slope, _, _) = growth_fit(&series).unwrap();
        assert!(
            slope <= cap + slack,
            "{cfg} beta={beta}: projector slope {slope} > {cap}+{slack}"
        );
    });
    assert!(start.elapsed().as_secs() < 1800, "runtime target exceeded");
    passline(9, "growth-exponent fits, k in [8,40] / [4,40]");
}

#[test]
fn criterion_10_spectral_exactness() {
    let zero = Rational::zero();
    for cfg in sweep_configs() {
        for k in 0..=12u32 {
            assert!(
                verify_proj_identity(cfg, k).is_empty(),
                "{cfg} k={k}: projector identity failed"
            );
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11 + cfg.alpha as u64);
        for _ in 0..50 {
            let a = rat(rng.gen_range(-30i64..30), rng.gen_range(1i64..12));
            let k = rng.gen_range(0..=12u32);
            let (r1, r2, r3) = sl2_commutator_check(cfg, &a, k);
            assert!(r1 == zero && r2 == zero && r3 == zero, "{cfg} a={a} k={k}");
        }
        // iterated lowering matches its factored closed form exactly
        let q = cfg.q() as i64;
        for k in 0..=12u32 {
            for p in 0..=(k / 2) as usize {
                let s = (k as i64) - 2 * p as i64;
                let mut rep = SpectralRep::unit(k, p);
                let mut product = rat_int(1);
                for t in 0..p as i64 {
                    rep = spectral_l(cfg, &rep);
                    product *= rat_int(2 * (p as i64 - t))
                        * rat_int(2 * (p as i64 - t) + 2 * s + q - 2);
                }
                let coeff = rep.shells[0]
                    .first()
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                assert_eq!(coeff, product, "{cfg} k={k} p={p}");
            }
        }
    }
    passline(10, "exact projector identities, commutators, iterated lowering");
}

#[test]
fn criterion_11_eigenrelation() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for cfg in [GrushinConfig::new(2, 2, 1), GrushinConfig::new(3, 2, 2)] {
        for k in 0..=8u32 {
            for (ell, j, _) in admissible_pairs(cfg, k) {
                let idx = HarmonicIndex { k, ell, j, p: 1, q: 1 };
                for (s, eta) in [
                    (k as f64, 0.0),
                    (100.5, 3.7),
                    (rng.gen_range(0.0..10.0), rng.gen_range(-10.0..10.0)),
                ] {
                    let r = eigenrelation_residual(cfg, idx, s, eta, 20).unwrap();
                    assert!(r < 1e-8, "{cfg} {idx:?} s={s} eta={eta}: {r}");
                }
            }
        }
    }
    passline(11, "eigenrelation residual < 1e-8, k<=8, 20 samples");
}

#[test]
fn criterion_12_exponent_tables() {
    for n in 2..=10usize {
        for m in 1..=10usize {
            for alpha in 1..=10u32 {
                let row = match exponents(GrushinConfig::new(n, m, alpha)) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                assert_eq!(row.p.recip() + row.q.recip(), Rational::one());
                assert_eq!(row.p.recip() - row.q.recip(), row.r_threshold.recip());
                if m >= 2 && !(n == 3 && alpha >= 2) {
                    let d = (alpha as i64 + 1) * (n as i64 + m as i64 - 2) + 1;
                    assert_eq!(row.r_threshold, rat_int(d));
                }
            }
        }
    }
    // cited rows reproduce byte-for-byte in CSV form
    for (cfg, expect) in [
        (GrushinConfig::new(3, 1, 1), "3,1,1,3/2,3,3"),
        (GrushinConfig::new(2, 2, 1), "2,2,1,5/3,5/2,5"),
        (GrushinConfig::new(2, 1, 3), "2,1,3,7/4,7/3,7"),
    ] {
        let row = exponents(cfg).unwrap();
        let line = format!(
            "{},{},{},{},{},{}",
            row.n, row.m, row.alpha, row.p, row.q, row.r_threshold
        );
        assert_eq!(line, expect);
    }
    passline(12, "exponent-table identities exact; cited rows byte-identical");
}

#[test]
fn criterion_13_carleman_property() {
    let cfg = GrushinConfig::new(2, 2, 1);
    let fam = TestFamily::bump(0.5, 2.0);
    let mut series = Vec::new();
    for s in [100.5f64, 125.5, 150.5, 200.5] {
        let (lhs, rhs, ratio) = carleman_ratio(cfg, s, 0.1, fam).unwrap();
        assert!(lhs.is_finite() && rhs.is_finite() && ratio > 0.0);
        series.push((s.round() as u32, ratio));
    }
    let (slope, _, _) = growth_fit(&series).unwrap();
    assert!(slope <= 0.1, "ratio slope {slope}");
    let (_, _, r1) = carleman_ratio(cfg, 100.5, 0.1, fam).unwrap();
    let (_, _, r2) =
        carleman_ratio(cfg, 100.5, 0.1, TestFamily { amplitude: 3.25, ..fam }).unwrap();
    assert!((r1 - r2).abs() <= 1e-10 * r1.abs(), "{r1} vs {r2}");
    passline(13, "weighted-norm ratio bounded in s; scaling invariant");
}

#[test]
fn criterion_14_fischer_harness() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // classical case: restrictions decompose with zero residual. The report's
    // Parseval-difference residual is cancellation-limited, so the zero
    // residual is verified pointwise: g − Σ_k P_k g vanishes on Ω.
    for cfg in [GrushinConfig::new(2, 2, 0), GrushinConfig::new(3, 1, 0)] {
        for deg in [2u32, 4] {
            for _ in 0..3 {
                let f = random_homogeneous(&mut rng, cfg, deg);
                if f.is_zero() {
                    continue;
                }
                let g = grushin_core::harmonics::restrict_to_omega(&f, cfg);
                let mut reconstructed = OmegaFunction::default();
                let mut k = deg as i64;
                while k >= 0 {
                    let p = grushin_core::harmonics::project_pk(cfg, k as u32, &g, deg + 10)
                        .unwrap();
                    reconstructed = reconstructed.add(&p);
                    k -= 2;
                }
                let mut sup_g = 0.0f64;
                let mut sup_res = 0.0f64;
                let upper = if cfg.m == 1 {
                    std::f64::consts::PI
                } else {
                    std::f64::consts::FRAC_PI_2
                };
                for _ in 0..25 {
                    let pt = OmegaPoint {
                        phi: rng.gen_range(0.05..upper - 0.05),
                        omega1: {
                            let a: f64 = rng.gen_range(0.0..6.28);
                            let mut v = vec![a.cos(), a.sin()];
                            v.truncate(cfg.n);
                            if cfg.n > 2 {
                                v = vec![a.cos(), a.sin() * 0.6, a.sin() * 0.8];
                            }
                            v
                        },
                        omega2: if cfg.m == 1 {
                            vec![1.0]
                        } else {
                            let a: f64 = rng.gen_range(0.0..6.28);
                            vec![a.cos(), a.sin()]
                        },
                    };
                    sup_g = sup_g.max(g.eval(cfg, &pt).abs());
                    sup_res = sup_res.max((g.eval(cfg, &pt) - reconstructed.eval(cfg, &pt)).abs());
                }
                assert!(
                    sup_res <= 1e-10 * sup_g.max(1.0),
                    "{cfg} deg={deg}: pointwise residual {sup_res} (scale {sup_g})"
                );
            }
        }
    }
    // |x|² on the first Grushin configuration: deterministic and
    // Parseval-bounded, with k_cut-stable shell masses
    let cfg = GrushinConfig::new(2, 2, 1);
    let f = RationalPolynomial::x_norm_sq(cfg.n, cfg.m);
    let rep1 = fischer_decompose(cfg, &f, 4, 14).unwrap();
    let rep2 = fischer_decompose(cfg, &f, 4, 14).unwrap();
    assert_eq!(
        serde_json::to_string(&rep1).unwrap(),
        serde_json::to_string(&rep2).unwrap(),
        "report not deterministic"
    );
    let bigger = fischer_decompose(cfg, &f, 6, 16).unwrap();
    let sum1: f64 = rep1.shells.iter().map(|(_, m)| m).sum();
    let sum2: f64 = bigger.shells.iter().map(|(_, m)| m).sum();
    assert!(sum1 <= rep1.total_norm_sq * (1.0 + 1e-10));
    assert!(sum2 <= bigger.total_norm_sq * (1.0 + 1e-10));
    assert!(sum2 >= sum1 - 1e-10, "shell mass not k_cut-monotone");
    for ((k1, m1), (k2, m2)) in rep1.shells.iter().zip(&bigger.shells) {
        assert_eq!(k1, k2);
        assert!((m1 - m2).abs() < 1e-10, "shell {k1} mass drifted: {m1} vs {m2}");
    }
    passline(14, "classical decomposition exact; harness deterministic");
}
