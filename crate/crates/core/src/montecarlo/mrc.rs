//! Pilot training and MRC reception at the reference base station.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::drop::DropRealization;
use super::rng::{stream, Stream};
use super::FadingModel;
use crate::config::{ExclusionDesign, NetworkConfig};

/// Terms of the MRC statistic that survive as `M → ∞`, as powers averaged
/// over data symbols.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherentTerms {
    pub signal: f64,
    pub copilot: f64,
    pub d2d: f64,
}

impl CoherentTerms {
    pub fn interference(&self) -> f64 {
        self.copilot + self.d2d
    }
}

/// Exact finite-`M` powers of `(1/M)·ĥᴴy`, grouped by transmitter class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FiniteTerms {
    pub signal: f64,
    pub copilot: f64,
    pub d2d: f64,
    /// Cellular users on other pilots.
    pub other_cellular: f64,
    pub noise: f64,
}

impl FiniteTerms {
    pub fn total(&self) -> f64 {
        self.signal + self.copilot + self.d2d + self.other_cellular + self.noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropStatistics {
    pub coherent: CoherentTerms,
    /// `σ²‖ĥ‖²/M²`.
    pub noise: f64,
    /// Only produced with explicit fading.
    pub finite: Option<FiniteTerms>,
    /// `ĥᴴRĥ/M²` for the data-phase covariance `R`; explicit fading only.
    pub quadratic_total: Option<f64>,
    /// Per-antenna MSE of `ĥ/√P_c` against the reference channel.
    pub mse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Reference,
    Copilot,
    Other,
    D2d,
}

struct Transmitter {
    class: Class,
    pilot: usize,
    /// `P·r^(−α)`.
    rx_power: f64,
}

fn transmitters(drop: &DropRealization, cfg: &NetworkConfig, x: &ExclusionDesign) -> Vec<Transmitter> {
    let p_c = x.p_c(cfg);
    let gain = |r: f64| r.powf(-cfg.alpha);
    let mut out = Vec::with_capacity(1 + drop.cellular.len() + drop.d2d.len());
    out.push(Transmitter {
        class: Class::Reference,
        pilot: 0,
        rx_power: p_c * gain(drop.reference.position.norm()),
    });
    for u in &drop.cellular {
        out.push(Transmitter {
            class: if u.pilot == 0 { Class::Copilot } else { Class::Other },
            pilot: u.pilot,
            rx_power: p_c * gain(u.position.norm()),
        });
    }
    for p in &drop.d2d {
        out.push(Transmitter {
            class: Class::D2d,
            pilot: usize::MAX,
            rx_power: cfg.p_d * gain(p.tx.norm()),
        });
    }
    out
}

fn cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Orthonormal DFT pilot book: column `k` is pilot `k`, so `QᴴQ = I`.
pub fn pilot_matrix(t_p: usize) -> Vec<Vec<Complex64>> {
    let scale = 1.0 / (t_p as f64).sqrt();
    (0..t_p)
        .map(|k| {
            (0..t_p)
                .map(|n| Complex64::from_polar(scale, -2.0 * PI * (n * k) as f64 / t_p as f64))
                .collect()
        })
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Channel vectors and the reference user's estimate for one drop.
#[derive(Debug, Clone)]
pub struct ExplicitChannels {
    /// One `M`-vector per transmitter: reference, `drop.cellular`, `drop.d2d`.
    pub h: Vec<Vec<Complex64>>,
    /// Coefficient of each `h_t` in `ĥ`.
    pub coefficient: Vec<Complex64>,
    /// `ĥ = Y^p q_0`.
    pub estimate: Vec<Complex64>,
}

/// Training with explicit `M`-antenna channels: every transmitter sends its
/// pilot (cellular) or `T_p` Gaussian symbols (active D2D), the base station
/// adds noise and projects on the reference pilot.
pub fn training_phase(
    drop: &DropRealization,
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
) -> ExplicitChannels {
    let m = cfg.antennas;
    let t_p = cfg.pilots;
    let q = pilot_matrix(t_p);
    let q0 = &q[0];
    let mut rng = stream(drop.seed, Stream::Fading);
    let txs = transmitters(drop, cfg, x);
    let mut h = Vec::with_capacity(txs.len());
    let mut coefficient = Vec::with_capacity(txs.len());
    let mut estimate = vec![Complex64::new(0.0, 0.0); m];
    for t in &txs {
        let ht: Vec<Complex64> = (0..m).map(|_| cn(&mut rng)).collect();
        let amp = t.rx_power.sqrt();
        let projection = match t.class {
            Class::D2d => {
                let u: Vec<Complex64> = (0..t_p).map(|_| cn(&mut rng)).collect();
                if cfg.training_mode.d2d_active() {
                    u.iter().zip(q0).map(|(a, b)| a * b).sum()
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            _ => dot(&q[t.pilot], q0),
        };
        let c = projection * amp;
        for (e, v) in estimate.iter_mut().zip(&ht) {
            *e += c * v;
        }
        coefficient.push(c);
        h.push(ht);
    }
    let sigma = cfg.sigma2_bs.sqrt();
    for e in estimate.iter_mut() {
        let n_row: Vec<Complex64> = (0..t_p).map(|_| cn(&mut rng) * sigma).collect();
        *e += n_row.iter().zip(q0).map(|(a, b)| a * b).sum::<Complex64>();
    }
    ExplicitChannels {
        h,
        coefficient,
        estimate,
    }
}

/// Decomposes the MRC statistic `(1/M)·ĥᴴy` of one drop.
pub fn uplink_mrc(
    drop: &DropRealization,
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    fading: FadingModel,
) -> DropStatistics {
    match fading {
        FadingModel::Statistical => statistical(drop, cfg, x),
        FadingModel::Explicit => explicit(drop, cfg, x, &training_phase(drop, cfg, x)),
    }
}

fn explicit(
    drop: &DropRealization,
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    ch: &ExplicitChannels,
) -> DropStatistics {
    let m = cfg.antennas as f64;
    let m2 = m * m;
    let txs = transmitters(drop, cfg, x);
    let mut coherent = CoherentTerms::default();
    let mut finite = FiniteTerms::default();
    let mut quad = 0.0;
    for (i, t) in txs.iter().enumerate() {
        let ht = &ch.h[i];
        let kappa = norm_sq(ht) / m;
        let coh = ch.coefficient[i].norm_sqr() * t.rx_power * kappa * kappa;
        let fin = t.rx_power * dot(&ch.estimate, ht).norm_sqr() / m2;
        quad += fin;
        match t.class {
            Class::Reference => {
                coherent.signal += coh;
                finite.signal += fin;
            }
            Class::Copilot => {
                coherent.copilot += coh;
                finite.copilot += fin;
            }
            Class::Other => {
                coherent.copilot += coh;
                finite.other_cellular += fin;
            }
            Class::D2d => {
                coherent.d2d += coh;
                finite.d2d += fin;
            }
        }
    }
    let noise = cfg.sigma2_bs * norm_sq(&ch.estimate) / m2;
    finite.noise = noise;
    quad += noise;

    let p_c = x.p_c(cfg);
    let scale = 1.0 / p_c.sqrt();
    let direct = txs[0].rx_power.sqrt() * scale;
    let mse = ch
        .estimate
        .iter()
        .zip(&ch.h[0])
        .map(|(e, h)| (e * scale - h * direct).norm_sqr())
        .sum::<f64>()
        / m;

    DropStatistics {
        coherent,
        noise,
        finite: Some(finite),
        quadratic_total: Some(quad),
        mse,
    }
}

/// Same statistics from per-user chi-square summaries: `ĥ` is the reference
/// channel plus an independent isotropic Gaussian error whose variance is
/// fixed by the drop geometry.
fn statistical(drop: &DropRealization, cfg: &NetworkConfig, x: &ExclusionDesign) -> DropStatistics {
    let m = cfg.antennas as f64;
    let p_c = x.p_c(cfg);
    let a = cfg.alpha;
    let active = cfg.training_mode.d2d_active();

    let beta0 = drop.reference.position.norm().powf(-a);
    let k0 = drop.reference.draw.kappa;
    let signal = (p_c * beta0 * k0).powi(2);

    let mut copilot = 0.0;
    let mut err = 0.0;
    for u in drop.copilots() {
        let beta = u.position.norm().powf(-a);
        copilot += (p_c * beta * u.draw.kappa).powi(2);
        err += beta;
    }
    let mut d2d = 0.0;
    if active {
        let ratio = cfg.p_d / p_c;
        for p in &drop.d2d {
            let beta = p.tx.norm().powf(-a);
            d2d += (cfg.p_d * beta * p.draw.kappa).powi(2) * p.draw.leak;
            err += ratio * beta * p.draw.leak;
        }
    }
    err += cfg.sigma2_bs / p_c;

    let ex = drop.extras;
    let along = Complex64::new((p_c * beta0 * m * k0).sqrt(), 0.0)
        + Complex64::new(ex.error_along.0, ex.error_along.1) * (p_c * err).sqrt();
    let h_norm_sq = along.norm_sqr() + p_c * err * ex.error_across;

    DropStatistics {
        coherent: CoherentTerms {
            signal,
            copilot,
            d2d,
        },
        noise: cfg.sigma2_bs * h_norm_sq / (m * m),
        finite: None,
        quadratic_total: None,
        mse: err * ex.error_energy,
    }
}
