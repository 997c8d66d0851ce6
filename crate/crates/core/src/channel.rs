//! Symbol mapping into the reals and the memoryless Gaussian channel.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::convcode::Codeword;
use crate::{Error, Result};

/// Injective map `g_q` from GF(q) to the reals, applied per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMapper {
    table: Vec<f64>,
}

impl SymbolMapper {
    /// Symmetric PAM: `g(v) = (q - 1) - 2v`. For `q = 2` this is BPSK with
    /// `0 -> +1`, `1 -> -1`.
    pub fn pam(q: u32) -> Self {
        let table = (0..q).map(|v| (q as f64 - 1.0) - 2.0 * v as f64).collect();
        SymbolMapper { table }
    }

    /// User table; must have one finite, distinct value per field element.
    pub fn from_table(table: Vec<f64>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::config("symbol map needs at least two entries"));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("symbol map entries must be finite"));
        }
        for (i, a) in table.iter().enumerate() {
            if table[i + 1..].contains(a) {
                return Err(Error::config(format!(
                    "symbol map is not injective: value {a} appears twice"
                )));
            }
        }
        Ok(SymbolMapper { table })
    }

    pub fn q(&self) -> u32 {
        self.table.len() as u32
    }

    #[inline]
    pub fn map(&self, v: u32) -> f64 {
        self.table[v as usize]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Real images of every `n`-dimensional symbol, indexed by symbol index
    /// (row-major, `n` reals per symbol). `q^n` must fit the budget.
    pub fn constellation(&self, n: usize, budget: usize) -> Result<Vec<f64>> {
        let q = self.table.len();
        let count = alphabet_size(q, n, budget)?;
        let mut out = Vec::with_capacity(count * n);
        for mut ix in 0..count {
            for _ in 0..n {
                out.push(self.table[ix % q]);
                ix /= q;
            }
        }
        Ok(out)
    }
}

fn alphabet_size(q: usize, n: usize, budget: usize) -> Result<usize> {
    let mut count: usize = 1;
    for _ in 0..n {
        count = count.checked_mul(q).filter(|&c| c <= budget).ok_or(Error::Budget {
            what: "symbol alphabet enumeration",
            required: (q as u128).saturating_pow(n as u32),
            allowed: budget as u128,
        })?;
    }
    Ok(count)
}

/// Gaussian noise of variance `sigma2` per real coordinate; `snr = 1 / sigma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    /// `sigma2 = 0` is accepted and gives a noiseless channel.
    pub fn from_sigma2(sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::config(format!("noise variance {sigma2} must be finite and >= 0")));
        }
        Ok(NoiseModel { sigma2 })
    }

    pub fn from_snr(snr: f64) -> Result<Self> {
        if !(snr > 0.0) {
            return Err(Error::config(format!("snr {snr} must be positive")));
        }
        Self::from_sigma2(1.0 / snr)
    }

    #[inline]
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Infinite for the noiseless channel.
    #[inline]
    pub fn snr(&self) -> f64 {
        1.0 / self.sigma2
    }
}

/// Channel observations `r[d]`, `n` reals per time index.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSequence {
    n: usize,
    samples: Vec<f64>,
}

impl ReceivedSequence {
    pub fn new(n: usize, samples: Vec<f64>) -> Result<Self> {
        if n == 0 || !samples.len().is_multiple_of(n) {
            return Err(Error::contract(format!(
                "{} samples do not form whole {n}-dimensional observations",
                samples.len()
            )));
        }
        Ok(ReceivedSequence { n, samples })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of time indices.
    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len() / self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    #[inline]
    pub fn at(&self, d: usize) -> &[f64] {
        &self.samples[d * self.n..(d + 1) * self.n]
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Applies the mapper to every codeword coordinate.
pub fn modulate(cw: &Codeword, mapper: &SymbolMapper) -> ReceivedSequence {
    ReceivedSequence {
        n: cw.n(),
        samples: cw.values().iter().map(|&v| mapper.map(v)).collect(),
    }
}

/// `r[d] = g(y[d]) + n[d]` with i.i.d. `N(0, sigma2)` coordinates drawn from
/// `rng` in time-major, coordinate-minor order.
pub fn transmit<R: Rng + ?Sized>(
    modulated: &ReceivedSequence,
    noise: &NoiseModel,
    rng: &mut R,
) -> ReceivedSequence {
    let sigma = libm::sqrt(noise.sigma2());
    let samples = modulated
        .samples
        .iter()
        .map(|&s| {
            let z: f64 = StandardNormal.sample(rng);
            s + sigma * z
        })
        .collect();
    ReceivedSequence {
        n: modulated.n,
        samples,
    }
}

/// Minimum and maximum squared distance between the images of distinct
/// `n`-dimensional symbols, by enumeration of all pairs.
pub fn signal_distances(mapper: &SymbolMapper, n: usize, budget: usize) -> Result<(f64, f64)> {
    let points = mapper.constellation(n, budget)?;
    let count = points.len() / n;
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for a in 0..count {
        let pa = &points[a * n..(a + 1) * n];
        for b in a + 1..count {
            let pb = &points[b * n..(b + 1) * n];
            let d2: f64 = pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum();
            dmin = dmin.min(d2);
            dmax = dmax.max(d2);
        }
    }
    Ok((dmin, dmax))
}
