//! Test-signal generators: the strong-set-plus-tail model, the two-class
//! nonuniform model, and plain k-sparse Gaussian signals.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complement, restricted_l1};
use crate::sampling::Seed;

/// A signal whose entries on `strong_set` all have magnitude at least
/// `amplitude_floor`, plus a tail of small nonzeros off that set whose total
/// ℓ1 mass is `tail_mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSignal {
    pub x: Vec<f64>,
    pub strong_set: Vec<usize>,
    pub amplitude_floor: f64,
    pub tail_mass: f64,
    pub support: Vec<usize>,
    pub k_total: usize,
    pub seed: Seed,
}

impl ModelSignal {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Checks the three model invariants exactly.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n();
        if let Some(&i) = self.strong_set.iter().find(|&&i| self.x[i].abs() < self.amplitude_floor) {
            return Err(Error::InvalidParameter(format!(
                "strong entry {i} has magnitude {} below the floor {}",
                self.x[i].abs(),
                self.amplitude_floor
            )));
        }
        let off = restricted_l1(&self.x, &complement(&self.strong_set, n))?;
        if off > self.tail_mass {
            return Err(Error::InvalidParameter(format!(
                "tail mass {off} exceeds the recorded bound {}",
                self.tail_mass
            )));
        }
        let nonzeros: Vec<usize> = (0..n).filter(|&i| self.x[i] != 0.0).collect();
        if nonzeros != self.support || self.support.len() != self.k_total {
            return Err(Error::InvalidParameter("support metadata does not match x".into()));
        }
        if !self.strong_set.iter().all(|i| self.support.binary_search(i).is_ok()) {
            return Err(Error::InvalidParameter("strong set is not inside the support".into()));
        }
        Ok(())
    }

    pub fn metadata(&self) -> SignalMetadata {
        SignalMetadata {
            schema_version: 1,
            n: self.n(),
            k: self.strong_set.clone(),
            a1: self.amplitude_floor,
            delta: self.tail_mass,
            k_total_set: self.support.clone(),
            seed: self.seed.0,
        }
    }
}

/// JSON sidecar written next to a signal CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalMetadata {
    pub schema_version: u32,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub a1: f64,
    pub delta: f64,
    #[serde(rename = "K_total")]
    pub k_total_set: Vec<usize>,
    pub seed: u64,
}

/// Draws a [`ModelSignal`].
///
/// The strong set is a uniformly random `k_strong`-subset with magnitudes
/// uniform on `[a1, 2 a1]` and random signs. The `k_total - k_strong` tail
/// entries sit at uniformly random positions off the strong set and each
/// carry magnitude `delta / (k_total - k_strong)` with a random sign.
pub fn generate_model_signal(
    n: usize,
    k_strong: usize,
    a1: f64,
    delta: f64,
    k_total: usize,
    seed: Seed,
) -> Result<ModelSignal> {
    if k_strong > k_total || k_total > n {
        return Err(Error::InvalidCounts(format!(
            "need k_strong <= k_total <= n, got {k_strong}, {k_total}, {n}"
        )));
    }
    if !(a1.is_finite() && a1 > 0.0) {
        return Err(Error::InvalidParameter(format!("amplitude floor must be positive, got {a1}")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("tail mass must be nonnegative, got {delta}")));
    }
    let k_tail = k_total - k_strong;
    if k_tail > 0 && delta == 0.0 {
        return Err(Error::InvalidCounts(format!(
            "{k_tail} tail entries requested with zero tail mass"
        )));
    }

    let mut rng = seed.rng();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut strong_set = order[..k_strong].to_vec();
    strong_set.sort_unstable();
    let mut x = vec![0.0; n];
    for &i in &strong_set {
        let mag = a1 * (1.0 + rng.random::<f64>());
        x[i] = if rng.random::<bool>() { mag } else { -mag };
    }
    let tail_mass = if k_tail > 0 {
        let each = delta / k_tail as f64;
        for &i in &order[k_strong..k_total] {
            x[i] = if rng.random::<bool>() { each } else { -each };
        }
        // Record the realized mass so the bound holds exactly in floating point.
        restricted_l1(&x, &order[k_strong..k_total])?
    } else {
        0.0
    };
    let mut support = order[..k_total].to_vec();
    support.sort_unstable();

    let signal = ModelSignal { x, strong_set, amplitude_floor: a1, tail_mass, support, k_total, seed };
    signal.check_invariants()?;
    Ok(signal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeLaw {
    Gaussian,
    Flat,
}

impl AmplitudeLaw {
    fn draw<R: Rng>(self, rng: &mut R) -> f64 {
        match self {
            AmplitudeLaw::Gaussian => StandardNormal.sample(rng),
            AmplitudeLaw::Flat => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Two-class signal: entries of class `i` are independently nonzero with
/// probability `pᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonuniformSignal {
    pub x: Vec<f64>,
    pub class1: Vec<usize>,
    pub class2: Vec<usize>,
    pub gamma1: f64,
    pub p1: f64,
    pub p2: f64,
    pub amp_law: AmplitudeLaw,
    pub seed: Seed,
}

impl NonuniformSignal {
    pub fn support(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&i| self.x[i] != 0.0).collect()
    }
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidFraction(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

/// Class 1 is the first `⌊gamma1·n⌋` indices of a seeded permutation.
pub fn generate_nonuniform_signal(
    n: usize,
    gamma1: f64,
    p1: f64,
    p2: f64,
    amp_law: AmplitudeLaw,
    seed: Seed,
) -> Result<NonuniformSignal> {
    check_fraction("gamma1", gamma1)?;
    check_fraction("p1", p1)?;
    check_fraction("p2", p2)?;
    let mut rng = seed.rng();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let n1 = (gamma1 * n as f64).floor() as usize;
    let mut class1 = order[..n1].to_vec();
    let mut class2 = order[n1..].to_vec();
    class1.sort_unstable();
    class2.sort_unstable();
    let mut x = vec![0.0; n];
    // Visit in index order so a given seed fixes every entry independently of the split.
    let mut in_class1 = vec![false; n];
    class1.iter().for_each(|&i| in_class1[i] = true);
    for i in 0..n {
        let p = if in_class1[i] { p1 } else { p2 };
        if rng.random::<f64>() < p {
            let mut v = amp_law.draw(&mut rng);
            while v == 0.0 {
                v = amp_law.draw(&mut rng);
            }
            x[i] = v;
        }
    }
    Ok(NonuniformSignal { x, class1, class2, gamma1, p1, p2, amp_law, seed })
}

/// `n (γ₁ p₁ + (1 - γ₁) p₂)`.
pub fn expected_nonzeros(n: usize, gamma1: f64, p1: f64, p2: f64) -> f64 {
    n as f64 * (gamma1 * p1 + (1.0 - gamma1) * p2)
}

/// `k`-sparse signal with uniformly random support and standard normal
/// amplitudes.
pub fn sparse_gaussian_signal(n: usize, k: usize, seed: Seed) -> Result<Vec<f64>> {
    if k > n {
        return Err(Error::InvalidCounts(format!("sparsity {k} exceeds length {n}")));
    }
    let mut rng = seed.rng();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut x = vec![0.0; n];
    for &i in &order[..k] {
        let mut v: f64 = StandardNormal.sample(&mut rng);
        while v == 0.0 {
            v = StandardNormal.sample(&mut rng);
        }
        x[i] = v;
    }
    Ok(x)
}
