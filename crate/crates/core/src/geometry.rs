//! Planar point processes and shot-noise moments.
//!
//! Lengths are kilometres and densities are points per km². Everything here is
//! a pure function of its inputs; randomness comes from an explicit seed or an
//! explicit RNG.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            x: radius * c,
            y: radius * s,
        }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point2D {
    type Output = Point2D;
    fn add(self, rhs: Point2D) -> Point2D {
        Point2D::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Ring `r_inner <= |p - center| <= r_outer`. A disk has `r_inner == 0`;
/// `r_outer` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub center: Point2D,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Annulus {
    pub fn new(center: Point2D, r_inner: f64, r_outer: f64) -> Result<Self> {
        ensure(center.is_finite(), "center", f64::NAN, "must be finite")?;
        ensure(
            r_inner >= 0.0 && r_inner.is_finite(),
            "r_inner",
            r_inner,
            "must be finite and non-negative",
        )?;
        ensure(r_outer > r_inner, "r_outer", r_outer, "must exceed r_inner")?;
        Ok(Self {
            center,
            r_inner,
            r_outer,
        })
    }

    pub fn disk(center: Point2D, radius: f64) -> Result<Self> {
        Self::new(center, 0.0, radius)
    }

    pub fn is_bounded(&self) -> bool {
        self.r_outer.is_finite()
    }

    pub fn area(&self) -> f64 {
        PI * (self.r_outer * self.r_outer - self.r_inner * self.r_inner)
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        let r = p.distance(&self.center);
        r >= self.r_inner && r <= self.r_outer
    }

    /// Uniform point in the ring.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        let lo = self.r_inner * self.r_inner;
        let hi = self.r_outer * self.r_outer;
        let r = (lo + (hi - lo) * rng.random::<f64>()).sqrt();
        let theta = TAU * rng.random::<f64>();
        self.center + Point2D::from_polar(r, theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point2D>,
    pub density: f64,
    pub region: Annulus,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Homogeneous Poisson point process on `region`, seeded.
pub fn sample_ppp(region: &Annulus, density: f64, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ppp_with(region, density, &mut rng)
}

pub fn sample_ppp_with<R: Rng + ?Sized>(
    region: &Annulus,
    density: f64,
    rng: &mut R,
) -> Result<PointSet> {
    ensure(
        density >= 0.0 && density.is_finite(),
        "density",
        density,
        "must be finite and non-negative",
    )?;
    if density == 0.0 {
        return Ok(PointSet {
            points: Vec::new(),
            density,
            region: *region,
        });
    }
    if !region.is_bounded() {
        return Err(Error::UnboundedRegion { density });
    }
    let n = poisson_count(density * region.area(), rng);
    let points = (0..n).map(|_| region.sample_uniform(rng)).collect();
    Ok(PointSet {
        points,
        density,
        region: *region,
    })
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-positive or non-finite means.
    let dist = Poisson::new(mean).expect("positive finite mean");
    let n: f64 = dist.sample(rng);
    n as usize
}

/// Base-station sites on a hexagonal grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HexLayout {
    pub sites: Vec<Point2D>,
    pub cell_side: f64,
    pub count: usize,
}

impl HexLayout {
    /// Site spacing, `√3 · cell_side`.
    pub fn spacing(&self) -> f64 {
        3f64.sqrt() * self.cell_side
    }

    pub fn max_site_distance(&self) -> f64 {
        self.sites.iter().map(Point2D::norm).fold(0.0, f64::max)
    }
}

/// The `count` sites of a triangular lattice (spacing `√3 · cell_side`) nearest
/// the origin, ordered by distance then angle. The origin comes first.
pub fn hex_layout(cell_side: f64, count: usize) -> Result<HexLayout> {
    ensure(count >= 1, "count", count as f64, "at least one cell")?;
    ensure(
        cell_side > 0.0 && cell_side.is_finite(),
        "cell_side",
        cell_side,
        "must be positive",
    )?;

    // Shell k of the lattice holds 6k sites, so k shells cover 3k(k+1)+1.
    let mut shells: i64 = 0;
    while 3 * shells * (shells + 1) + 1 < count as i64 {
        shells += 1;
    }
    // Lattice-norm ties can straddle a shell boundary; one extra ring covers them.
    let reach = shells + 1;

    let spacing = 3f64.sqrt() * cell_side;
    let mut candidates: Vec<(i64, f64, Point2D)> = Vec::new();
    for i in -2 * reach..=2 * reach {
        for j in -2 * reach..=2 * reach {
            // |i·a1 + j·a2|² / spacing² for a1 = (1, 0), a2 = (1/2, √3/2).
            let norm = i * i + i * j + j * j;
            if norm > 3 * reach * reach {
                continue;
            }
            let p = Point2D::new(
                spacing * (i as f64 + 0.5 * j as f64),
                spacing * (3f64.sqrt() / 2.0) * j as f64,
            );
            let angle = if norm == 0 { 0.0 } else { p.angle() };
            candidates.push((norm, angle, p));
        }
    }
    candidates.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    let sites: Vec<Point2D> = candidates
        .into_iter()
        .take(count)
        .map(|(norm, _, p)| if norm == 0 { Point2D::ORIGIN } else { p })
        .collect();
    Ok(HexLayout {
        sites,
        cell_side,
        count,
    })
}

/// Bucket grid over point sites for fixed-radius proximity queries.
#[derive(Debug, Clone)]
pub struct SiteIndex {
    cell: f64,
    buckets: std::collections::HashMap<(i64, i64), Vec<usize>>,
    sites: Vec<Point2D>,
}

impl SiteIndex {
    pub fn new(sites: &[Point2D], cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> =
            std::collections::HashMap::new();
        for (i, s) in sites.iter().enumerate() {
            buckets.entry(Self::key(cell, s)).or_default().push(i);
        }
        Self {
            cell,
            buckets,
            sites: sites.to_vec(),
        }
    }

    fn key(cell: f64, p: &Point2D) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Index of and distance to the nearest site strictly closer than `radius`.
    pub fn nearest_within(&self, p: &Point2D, radius: f64) -> Option<(usize, f64)> {
        if radius <= 0.0 {
            return None;
        }
        let span = (radius / self.cell).ceil() as i64;
        let (kx, ky) = Self::key(self.cell, p);
        let mut best: Option<(usize, f64)> = None;
        for dx in -span..=span {
            for dy in -span..=span {
                if let Some(ids) = self.buckets.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        let d = p.distance(&self.sites[i]);
                        if d < radius && best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((i, d));
                        }
                    }
                }
            }
        }
        best
    }
}

/// Keeps the candidates whose distance to every hole center is at least
/// `hole_radius`: holes are open disks, so a point on a hole boundary survives.
pub fn thin_hole_process(
    candidates: &PointSet,
    holes: &[Point2D],
    hole_radius: f64,
) -> Result<PointSet> {
    ensure(
        hole_radius >= 0.0 && hole_radius.is_finite(),
        "hole_radius",
        hole_radius,
        "must be finite and non-negative",
    )?;
    let index = SiteIndex::new(holes, hole_radius);
    let points: Vec<Point2D> = candidates
        .points
        .iter()
        .copied()
        .filter(|p| index.nearest_within(p, hole_radius).is_none())
        .collect();
    let density = if candidates.is_empty() {
        candidates.density
    } else {
        candidates.density * points.len() as f64 / candidates.len() as f64
    };
    Ok(PointSet {
        points,
        density,
        region: candidates.region,
    })
}

/// Density of a Poisson hole process: `λ · exp(−λ_holes · π · r²)`.
pub fn hole_process_density(density: f64, hole_density: f64, hole_radius: f64) -> f64 {
    density * (-hole_density * PI * hole_radius * hole_radius).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Cellular,
    D2D,
}

impl Mode {
    /// Cellular strictly inside the exclusion radius, D2D on or beyond it.
    pub fn for_distance(nearest_bs: f64, re: f64) -> Mode {
        if nearest_bs < re {
            Mode::Cellular
        } else {
            Mode::D2D
        }
    }
}

pub fn nearest_site(p: &Point2D, sites: &[Point2D]) -> Option<(usize, f64)> {
    sites
        .iter()
        .enumerate()
        .map(|(i, s)| (i, p.distance(s)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
}

pub fn classify_mode(user: Point2D, layout: &HexLayout, re: f64) -> Result<Mode> {
    ensure(
        (0.0..=layout.cell_side).contains(&re),
        "re",
        re,
        "exclusion radius must lie in [0, cell_side]",
    )?;
    let nearest = nearest_site(&user, &layout.sites).map_or(f64::INFINITY, |(_, d)| d);
    Ok(Mode::for_distance(nearest, re))
}

/// `E[Σ r_i^(−exponent)]` over a PPP of `density` restricted to `r >= r_min`,
/// i.e. `2π·λ·r_min^(2−exponent) / (exponent − 2)`.
pub fn campbell_moment(density: f64, r_min: f64, exponent: f64) -> Result<f64> {
    if exponent <= 2.0 {
        return Err(Error::Divergent("path-loss exponent must exceed 2"));
    }
    if !(r_min > 0.0) {
        return Err(Error::Divergent("minimum range must be positive"));
    }
    ensure(
        density >= 0.0 && density.is_finite(),
        "density",
        density,
        "must be finite and non-negative",
    )?;
    Ok(TAU * density * r_min.powf(2.0 - exponent) / (exponent - 2.0))
}
