//! Drop generation: user placement, mode selection and pilot scheduling.
//!
//! A drop is sampled once per seed in an exclusion-radius-free form
//! ([`DropGeometry`]) and then realized for any `R_e`. Every random choice
//! (positions, scheduling priorities, pilot permutations, per-user fading
//! summaries) is drawn before `R_e` is known, so a sweep over `R_e` sees common
//! random numbers.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::rng::{stream, Stream};
use super::{SimulationConfig, Topology};
use crate::analytics::copilot_floor;
use crate::config::{ExclusionDesign, NetworkConfig};
use crate::error::{ensure, Error, Result};
use crate::geometry::{
    hex_layout, nearest_site, poisson_count, Annulus, Point2D, SiteIndex,
};

/// Per-user fading summary for the statistical path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatDraw {
    /// `‖h‖²/M`, distributed as `Gamma(M, 1)/M`.
    pub kappa: f64,
    /// `|uᵀq|²` of a D2D training sequence against the reference pilot, `Exp(1)`.
    pub leak: f64,
}

/// Drop-wide draws used by the statistical path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropExtras {
    /// `Gamma(M, 1)/M` scaling of the estimation-error energy.
    pub error_energy: f64,
    /// Standard complex normal, estimation error along the reference channel.
    pub error_along: (f64, f64),
    /// `Gamma(M − 1, 1)`, estimation error orthogonal to the reference channel.
    pub error_across: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    pos: Point2D,
    site: Option<usize>,
    site_dist: f64,
    priority: f64,
    rx_angle: f64,
    draw: StatDraw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct LayerUser {
    pos: Point2D,
    pilot: usize,
    draw: StatDraw,
}

/// Exclusion-radius-independent part of a drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DropGeometry {
    pub seed: u64,
    /// Base-station sites; index 0 is the reference base station at the origin.
    pub sites: Vec<Point2D>,
    topology: Topology,
    cell_radius: f64,
    region_radius: f64,
    candidates: Vec<Candidate>,
    layers: Vec<LayerUser>,
    /// Pilot order per cell; entry 0 of the reference cell is unused.
    pilot_orders: Vec<Vec<usize>>,
    reference: LayerUser,
    extras: DropExtras,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledUser {
    pub position: Point2D,
    /// Serving cell. Poisson co-pilot layers use virtual ids past `sites.len()`.
    pub cell: usize,
    /// Zero-based pilot index; pilot 0 is the reference user's pilot.
    pub pilot: usize,
    pub draw: StatDraw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dPair {
    pub tx: Point2D,
    pub rx: Point2D,
    pub draw: StatDraw,
}

/// One drop at a fixed exclusion radius.
#[derive(Debug, Clone, PartialEq)]
pub struct DropRealization {
    pub seed: u64,
    pub re: f64,
    pub sites: Vec<Point2D>,
    pub reference: ScheduledUser,
    /// Scheduled cellular users other than the reference user.
    pub cellular: Vec<ScheduledUser>,
    pub d2d: Vec<D2dPair>,
    /// Region over which D2D transmitters are fully sampled.
    pub d2d_window: Annulus,
    /// Number of cellular-mode candidates in each real cell, scheduled or not.
    pub cellular_candidates: Vec<usize>,
    pub extras: DropExtras,
}

impl DropRealization {
    /// Users sharing the reference pilot in other cells.
    pub fn copilots(&self) -> impl Iterator<Item = &ScheduledUser> {
        self.cellular.iter().filter(|u| u.pilot == 0)
    }

    /// Nearest co-pilot interferer to the reference base station.
    pub fn min_copilot_distance(&self) -> f64 {
        self.copilots()
            .map(|u| u.position.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// D2D transmitters inside [`Self::d2d_window`].
    pub fn d2d_in_window(&self) -> usize {
        self.d2d
            .iter()
            .filter(|p| self.d2d_window.contains(&p.tx))
            .count()
    }
}

fn stat_draw<R: Rng + ?Sized>(gamma: &Gamma<f64>, m: f64, rng: &mut R) -> StatDraw {
    StatDraw {
        kappa: gamma.sample(rng) / m,
        leak: Exp1.sample(rng),
    }
}

fn disk_points<R: Rng + ?Sized>(region: &Annulus, density: f64, rng: &mut R) -> Vec<Point2D> {
    let n = poisson_count(density * region.area(), rng);
    (0..n).map(|_| region.sample_uniform(rng)).collect()
}

/// Samples everything about a drop that does not depend on `R_e`.
pub fn sample_geometry(
    cfg: &NetworkConfig,
    sim: &SimulationConfig,
    seed: u64,
) -> Result<DropGeometry> {
    cfg.validate()?;
    sim.validate(cfg)?;
    let mut rng = stream(seed, Stream::Geometry);
    let m = cfg.antennas as f64;
    let gamma = Gamma::new(m, 1.0).expect("antenna count is positive");
    let rc = cfg.cell_radius;
    let lambda = cfg.lambda();

    let (sites, user_disk) = match sim.topology {
        Topology::Poisson => {
            let mut sites = vec![Point2D::ORIGIN];
            let hole_disk = Annulus::disk(Point2D::ORIGIN, sim.region_radius + rc)?;
            sites.extend(disk_points(&hole_disk, cfg.lambda_b, &mut rng));
            (sites, Annulus::disk(Point2D::ORIGIN, sim.region_radius)?)
        }
        Topology::Hexagonal { cell_count } => {
            let layout = hex_layout(rc, cell_count)?;
            let radius = layout.max_site_distance() + 3.0 * rc;
            (layout.sites, Annulus::disk(Point2D::ORIGIN, radius)?)
        }
    };

    let index = SiteIndex::new(&sites, rc);
    let positions = disk_points(&user_disk, lambda, &mut rng);
    let mut candidates = Vec::with_capacity(positions.len());
    for pos in positions {
        let nearest = match sim.topology {
            Topology::Poisson => index.nearest_within(&pos, rc),
            Topology::Hexagonal { .. } => nearest_site(&pos, &sites),
        };
        candidates.push(Candidate {
            pos,
            site: nearest.map(|(i, _)| i),
            site_dist: nearest.map_or(f64::INFINITY, |(_, d)| d),
            priority: rng.random(),
            rx_angle: rng.random::<f64>() * TAU,
            draw: stat_draw(&gamma, m, &mut rng),
        });
    }

    let mut layers = Vec::new();
    if let Topology::Poisson = sim.topology {
        for pilot in 0..cfg.pilots {
            let outer = if pilot == 0 {
                sim.copilot_radius
            } else {
                sim.region_radius
            };
            if outer <= rc {
                continue;
            }
            let ring = Annulus::new(Point2D::ORIGIN, rc, outer)?;
            for pos in disk_points(&ring, cfg.lambda_b, &mut rng) {
                layers.push(LayerUser {
                    pos,
                    pilot,
                    draw: stat_draw(&gamma, m, &mut rng),
                });
            }
        }
    }

    let mut pilot_orders = Vec::with_capacity(sites.len());
    for cell in 0..sites.len() {
        let mut order: Vec<usize> = if cell == 0 {
            (1..cfg.pilots).collect()
        } else {
            (0..cfg.pilots).collect()
        };
        order.shuffle(&mut rng);
        pilot_orders.push(order);
    }

    let reference = LayerUser {
        pos: Point2D::from_polar(sim.r_ref, rng.random::<f64>() * TAU),
        pilot: 0,
        draw: stat_draw(&gamma, m, &mut rng),
    };
    let along: (f64, f64) = (
        rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2,
        rng.sample::<f64, _>(StandardNormal) * std::f64::consts::FRAC_1_SQRT_2,
    );
    let extras = DropExtras {
        error_energy: gamma.sample(&mut rng) / m,
        error_along: along,
        error_across: if cfg.antennas > 1 {
            Gamma::new(m - 1.0, 1.0)
                .expect("shape is positive")
                .sample(&mut rng)
        } else {
            0.0
        },
    };

    Ok(DropGeometry {
        seed,
        sites,
        topology: sim.topology,
        cell_radius: rc,
        region_radius: sim.region_radius,
        candidates,
        layers,
        pilot_orders,
        reference,
        extras,
    })
}

impl DropGeometry {
    /// Mode selection and scheduling at exclusion radius `x.re`.
    pub fn realize(
        &self,
        cfg: &NetworkConfig,
        x: &ExclusionDesign,
        sim: &SimulationConfig,
    ) -> Result<DropRealization> {
        x.validate(cfg)?;
        let re = x.re;
        if sim.r_ref >= re {
            return Err(Error::ReferenceNotCellular {
                r_ref: sim.r_ref,
                re,
            });
        }
        let n_cells = self.sites.len();

        // Cellular candidates per real cell, in priority order.
        let mut per_cell: Vec<Vec<&Candidate>> = vec![Vec::new(); n_cells];
        let mut d2d_tx = Vec::new();
        for c in &self.candidates {
            match c.site {
                Some(s) if c.site_dist < re => per_cell[s].push(c),
                _ => d2d_tx.push(c),
            }
        }
        let cellular_candidates: Vec<usize> = per_cell.iter().map(Vec::len).collect();

        let mut cellular = Vec::new();
        for (cell, users) in per_cell.iter_mut().enumerate() {
            // Poisson outer cells are represented by the co-pilot layers.
            if cell > 0 && matches!(self.topology, Topology::Poisson) {
                continue;
            }
            users.sort_by(|a, b| a.priority.total_cmp(&b.priority));
            let order = &self.pilot_orders[cell];
            for (u, &pilot) in users.iter().zip(order.iter()) {
                cellular.push(ScheduledUser {
                    position: u.pos,
                    cell,
                    pilot,
                    draw: u.draw,
                });
            }
        }
        let floor = copilot_floor(cfg, re);
        for (i, l) in self.layers.iter().enumerate() {
            if l.pos.norm() >= floor {
                cellular.push(ScheduledUser {
                    position: l.pos,
                    cell: n_cells + i,
                    pilot: l.pilot,
                    draw: l.draw,
                });
            }
        }

        let index = SiteIndex::new(&self.sites, self.cell_radius);
        let d2d = d2d_tx
            .into_iter()
            .map(|c| D2dPair {
                tx: c.pos,
                rx: self.place_receiver(c, re, sim.link_dist, &index),
                draw: c.draw,
            })
            .collect();

        let outer = match self.topology {
            Topology::Poisson => self.region_radius,
            Topology::Hexagonal { .. } => {
                self.sites.iter().map(Point2D::norm).fold(0.0, f64::max) + self.cell_radius
            }
        };

        Ok(DropRealization {
            seed: self.seed,
            re,
            sites: self.sites.clone(),
            reference: ScheduledUser {
                position: self.reference.pos,
                cell: 0,
                pilot: 0,
                draw: self.reference.draw,
            },
            cellular,
            d2d,
            d2d_window: Annulus::new(Point2D::ORIGIN, re, outer.max(re))?,
            cellular_candidates,
            extras: self.extras,
        })
    }

    /// Receiver at `link_dist` and the pre-drawn angle, pushed radially out of
    /// any exclusion disk it lands in.
    fn place_receiver(&self, c: &Candidate, re: f64, link_dist: f64, index: &SiteIndex) -> Point2D {
        let rx = c.pos + Point2D::from_polar(link_dist, c.rx_angle);
        if c.site_dist >= re + link_dist && (c.site.is_some() || self.cell_radius >= re + link_dist) {
            return rx;
        }
        let hit = match self.topology {
            Topology::Poisson => index.nearest_within(&rx, re),
            Topology::Hexagonal { .. } => nearest_site(&rx, &self.sites).filter(|&(_, d)| d < re),
        };
        match hit {
            Some((s, d)) if d > 0.0 => {
                let site = self.sites[s];
                let k = re / d;
                Point2D::new(site.x + (rx.x - site.x) * k, site.y + (rx.y - site.y) * k)
            }
            _ => rx,
        }
    }
}

/// Samples and realizes one drop.
pub fn generate_drop(
    cfg: &NetworkConfig,
    x: &ExclusionDesign,
    sim: &SimulationConfig,
    seed: u64,
) -> Result<DropRealization> {
    sample_geometry(cfg, sim, seed)?.realize(cfg, x, sim)
}

pub(crate) fn check_re(cfg: &NetworkConfig, re: f64) -> Result<()> {
    ensure(
        re > 0.0 && re <= cfg.cell_radius,
        "re",
        re,
        "simulated exclusion radius must lie in (0, R_c]",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TrainingMode;
    use crate::montecarlo::rng::drop_seed;
    use crate::montecarlo::stats::ratio_estimate;

    fn hex(cells: usize) -> SimulationConfig {
        SimulationConfig {
            topology: Topology::Hexagonal { cell_count: cells },
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn same_seed_same_drop() {
        let cfg = NetworkConfig::table_one();
        let x = ExclusionDesign::new(0.5, 10.0);
        for sim in [SimulationConfig::default(), hex(7)] {
            let a = generate_drop(&cfg, &x, &sim, 11).unwrap();
            let b = generate_drop(&cfg, &x, &sim, 11).unwrap();
            assert_eq!(a, b);
            let c = generate_drop(&cfg, &x, &sim, 12).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn reference_user_needs_cellular_mode() {
        let cfg = NetworkConfig::table_one();
        let sim = SimulationConfig::default();
        assert!(matches!(
            generate_drop(&cfg, &ExclusionDesign::new(0.2, 2.0), &sim, 1),
            Err(Error::ReferenceNotCellular { .. })
        ));
    }

    #[test]
    fn drop_invariants_hold() {
        let cfg = NetworkConfig::table_one();
        let x = ExclusionDesign::new(0.8, 4.0);
        for sim in [SimulationConfig::default(), hex(31)] {
            let d = generate_drop(&cfg, &x, &sim, 5).unwrap();
            assert!((d.reference.position.norm() - sim.r_ref).abs() < 1e-12);
            // Distinct pilots within a cell and at most T_p per cell.
            let mut seen = std::collections::HashSet::new();
            seen.insert((0usize, 0usize));
            for u in &d.cellular {
                assert!(u.pilot < cfg.pilots);
                assert!(seen.insert((u.cell, u.pilot)), "duplicate pilot in cell {}", u.cell);
                if u.cell < d.sites.len() {
                    assert!(u.position.distance(&d.sites[u.cell]) < x.re);
                }
            }
            for p in &d.d2d {
                for s in &d.sites {
                    assert!(p.tx.distance(s) >= x.re);
                }
                assert!(nearest_site(&p.rx, &d.sites).unwrap().1 >= x.re - 1e-12);
            }
        }
    }

    #[test]
    fn scheduling_cap() {
        let cfg = NetworkConfig::table_one();
        let x = ExclusionDesign::new(1.0, 4.0);
        let d = generate_drop(&cfg, &x, &hex(7), 3).unwrap();
        for cell in 0..7 {
            let scheduled = d.cellular.iter().filter(|u| u.cell == cell).count()
                + usize::from(cell == 0);
            let available = d.cellular_candidates[cell] + usize::from(cell == 0);
            assert!(available >= cfg.pilots, "cell {cell} has {available}");
            assert_eq!(scheduled, cfg.pilots);
        }
    }

    #[test]
    fn copilots_respect_floor_in_poisson_model() {
        let cfg = NetworkConfig::table_one();
        let sim = SimulationConfig::default();
        let geo = sample_geometry(&cfg, &sim, 9).unwrap();
        let mut prev = 0;
        for re in [0.4, 0.6, 0.8, 1.0] {
            let d = geo.realize(&cfg, &ExclusionDesign::new(re, 2.0), &sim).unwrap();
            assert!(d.min_copilot_distance() >= 2.0 - re);
            let n = d.copilots().count();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn hexagonal_copilots_can_beat_the_floor() {
        let cfg = NetworkConfig::table_one();
        let sim = hex(7);
        let x = ExclusionDesign::new(0.9, 2.0);
        let min = (0..50)
            .map(|i| generate_drop(&cfg, &x, &sim, i).unwrap().min_copilot_distance())
            .fold(f64::INFINITY, f64::min);
        assert!(min < 2.0 - x.re, "{min}");
    }

    #[test]
    fn d2d_density_matches_hole_process() {
        // Beyond R_e from the reference site, a user is D2D with probability
        // exp(−πλ_b R_e²) = exp(−(R_e/R_c)²).
        let cfg = NetworkConfig::table_one();
        let sim = SimulationConfig {
            region_radius: 2.0,
            copilot_radius: 1.0,
            ..SimulationConfig::default()
        };
        let x = ExclusionDesign::new(0.5, 2.0);
        let n = 10_000;
        let (mut kept, mut all) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let geo = sample_geometry(&cfg, &sim, drop_seed(77, i as u64)).unwrap();
            let r = geo.realize(&cfg, &x, &sim).unwrap();
            kept.push(r.d2d_in_window() as f64);
            all.push(
                geo.candidates
                    .iter()
                    .filter(|c| r.d2d_window.contains(&c.pos))
                    .count() as f64,
            );
        }
        let est = ratio_estimate(&kept, &all);
        let expected = (-0.25f64).exp();
        assert!(
            est.within_sigmas(expected, 3.0),
            "{} vs {expected} ± {}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn muting_does_not_change_geometry() {
        let cfg = NetworkConfig::table_one();
        let sim = SimulationConfig::default();
        let x = ExclusionDesign::new(0.5, 2.0);
        let a = generate_drop(&cfg, &x, &sim, 4).unwrap();
        let b = generate_drop(&cfg.with_training(TrainingMode::MutedD2D), &x, &sim, 4).unwrap();
        assert_eq!(a, b);
    }
}
