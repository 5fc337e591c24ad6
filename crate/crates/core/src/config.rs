use serde::{Deserialize, Serialize};

/// The triple (n, m, α) fixing a Grushin space R^n_x × R^m_y with operator
/// Δ_α = Δ_x + |x|^{2α} Δ_y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrushinConfig {
    /// Dimension of the x-block (the non-degenerate directions).
    pub n: usize,
    /// Dimension of the y-block (directions weighted α+1 under dilation).
    pub m: usize,
    /// Degeneracy order α ≥ 0; α = 0 is the Euclidean Laplacian.
    pub alpha: u32,
}

impl GrushinConfig {
    pub fn new(n: usize, m: usize, alpha: u32) -> Self {
        assert!(n >= 1 && m >= 1, "need n ≥ 1 and m ≥ 1");
        GrushinConfig { n, m, alpha }
    }

    /// Dilation weight of the y-variables: α + 1.
    pub fn step(&self) -> u32 {
        self.alpha + 1
    }

    /// Homogeneous dimension Q = n + m(α+1).
    pub fn q(&self) -> u64 {
        self.n as u64 + self.m as u64 * self.step() as u64
    }

    pub fn q_f64(&self) -> f64 {
        self.q() as f64
    }
}

impl std::fmt::Display for GrushinConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(n={}, m={}, alpha={})", self.n, self.m, self.alpha)
    }
}
