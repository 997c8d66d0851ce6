use alloc::vec::Vec;

use super::{HmmSystem, Observation};
use crate::channel::{signal_distances, SymbolMapper};
use crate::convcode::ConvCode;
use crate::metrics::squared_distance;
use crate::Result;

const ALPHABET_BUDGET: usize = 1 << 16;

/// Memoryless Gaussian observation `r = g(y) + n` with `n ~ N(0, I / snr)`.
///
/// The bounds follow from the triangle inequality with `e = ||r - g(y)||`:
/// `L_l = snr/2 ((d_min - e)_+^2 - e^2)`, which is `snr/2 d_min (d_min - 2e)`
/// whenever `e <= d_min`, and `L_u = snr (e^2 + d_max^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianObservation {
    points: Vec<f64>,
    n: usize,
    snr: f64,
    d_min: f64,
    d_max2: f64,
    log_norm: f64,
}

impl GaussianObservation {
    /// `points` holds `n` reals per processed symbol.
    pub fn new(points: Vec<f64>, n: usize, snr: f64, d_min2: f64, d_max2: f64) -> Self {
        let log_norm = -0.5 * n as f64 * libm::log(2.0 * core::f64::consts::PI / snr);
        GaussianObservation {
            points,
            n,
            snr,
            d_min: libm::sqrt(d_min2),
            d_max2,
            log_norm,
        }
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    #[inline]
    fn residual2(&self, r: &[f64], y: u32) -> f64 {
        let y = y as usize;
        squared_distance(r, &self.points[y * self.n..(y + 1) * self.n])
    }
}

impl Observation for GaussianObservation {
    fn log_density(&self, r: &[f64], y: u32) -> f64 {
        self.log_norm - 0.5 * self.snr * self.residual2(r, y)
    }

    fn bound_lower(&self, r: &[f64], y: u32) -> f64 {
        let e2 = self.residual2(r, y);
        let gap = (self.d_min - libm::sqrt(e2)).max(0.0);
        0.5 * self.snr * (gap * gap - e2)
    }

    fn bound_upper(&self, r: &[f64], y: u32) -> f64 {
        self.snr * (self.residual2(r, y) + self.d_max2)
    }
}

/// The code as a hidden Markov system: states are the code's Markov states,
/// every input is equally likely, the processed symbol is the codeword
/// symbol and the chain returns to the zero state after the tail. A
/// sequence of `N + nu - 1` states corresponds to a message of length `N`.
pub fn gaussian_conv_system(code: &ConvCode, mapper: &SymbolMapper, snr: f64) -> Result<HmmSystem<GaussianObservation>> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(crate::Error::config(alloc::format!("snr {snr} must be positive and finite")));
    }
    if mapper.q() != code.q() {
        return Err(crate::Error::config("symbol map does not match the code field"));
    }
    let s = code.num_states();
    let qk = code.input_alphabet();
    let log_p = -libm::log(qk as f64);
    let mut log_trans = alloc::vec![f64::NEG_INFINITY; s * s];
    for u in 0..s {
        for a in 0..qk {
            log_trans[u * s + code.next_state(u, a)] = log_p;
        }
    }
    let process = (0..s).map(|u| code.output_index(u)).collect();
    let points = mapper.constellation(code.n(), ALPHABET_BUDGET)?;
    let (d_min2, d_max2) = signal_distances(mapper, code.n(), ALPHABET_BUDGET)?;
    let obs = GaussianObservation::new(points, code.n(), snr, d_min2, d_max2);
    HmmSystem::new(log_trans, process, code.output_alphabet() as u32, obs, code.nu(), true)
}

/// `rho = xi snr / (3 nu)`, under which the Gaussian system's flank
/// conditions reduce to `sum ||e||^2 <= M xi - nu d_max^2`.
pub fn rho_for_xi(xi: f64, snr: f64, nu: usize) -> f64 {
    xi * snr / (3.0 * nu as f64)
}
