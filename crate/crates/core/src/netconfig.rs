//! Network-wide parameters, per-link geometry, and random UE drops.
//!
//! Everything downstream of this module works in linear power units (watts)
//! and radians. Decibels, dBm, and degrees exist only at the configuration
//! boundary; the helpers here do the conversion once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Array geometry at every BS. It selects which one-ring correlation model
/// applies and constrains the antenna count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayGeometry {
    /// Horizontal uniform linear array with half-wavelength spacing; channel
    /// statistics depend on azimuth only.
    Linear,
    /// `sqrt(M) x sqrt(M)` planar array with half-wavelength spacing on both
    /// axes; statistics depend on azimuth and elevation. Requires square `M`.
    Planar,
}

/// Static parameters shared by the whole network. Powers are in watts,
/// angles in radians, distances in meters.
#[derive(Debug, Clone)]
pub struct NetworkConfig {
    /// Number of cells L.
    pub cells: usize,
    /// UEs per cell K.
    pub ues_per_cell: usize,
    /// BS antennas M.
    pub antennas: usize,
    /// Spreading-signature length N.
    pub spreading: usize,
    /// Coherence block length (channel uses).
    pub tau_c: usize,
    /// Pilot length within the block.
    pub tau_p: usize,
    /// Uplink data samples within the block.
    pub tau_u: usize,
    /// Downlink data samples within the block.
    pub tau_d: usize,
    /// Uplink transmit power per UE, flat-indexed `[l * K + k]`, watts.
    pub p_ul: Vec<f64>,
    /// Downlink transmit power allotted to each UE, same indexing, watts.
    pub rho_dl: Vec<f64>,
    /// Uplink noise power, watts.
    pub sigma2_ul: f64,
    /// Downlink noise power, watts.
    pub sigma2_dl: f64,
    /// Square cell side, meters.
    pub cell_side: f64,
    /// BS antenna height above ground, meters.
    pub bs_height: f64,
    /// UE antenna height, meters.
    pub ue_height: f64,
    /// Minimum horizontal BS-UE distance enforced in drops, meters.
    pub min_bs_dist: f64,
    /// Shadow-fading standard deviation, dB.
    pub shadow_std_db: f64,
    /// Half-width of the local-scattering azimuth interval, radians.
    pub azimuth_spread: f64,
    /// Half-width of the elevation interval (planar arrays), radians.
    pub elevation_spread: f64,
    pub array: ArrayGeometry,
}

impl NetworkConfig {
    /// Urban-macro baseline used by all bundled experiments: 250 m square
    /// cells, 20 dBm per-UE power both ways, -94 dBm noise, 200-sample
    /// coherence blocks with the non-pilot half split evenly between uplink
    /// and downlink data, 10 dB log-normal shadowing, and a 2 degree
    /// scattering spread.
    pub fn urban_macro(
        cells: usize,
        ues_per_cell: usize,
        antennas: usize,
        spreading: usize,
    ) -> Self {
        let total = cells * ues_per_cell;
        let tau_c = 200;
        let tau_p = ues_per_cell.min(tau_c);
        let rem = tau_c - tau_p;
        let tau_u = rem / 2;
        let tau_d = rem - tau_u;
        let p = dbm_to_watt(20.0);
        NetworkConfig {
            cells,
            ues_per_cell,
            antennas,
            spreading,
            tau_c,
            tau_p,
            tau_u,
            tau_d,
            p_ul: vec![p; total],
            rho_dl: vec![p; total],
            sigma2_ul: dbm_to_watt(-94.0),
            sigma2_dl: dbm_to_watt(-94.0),
            cell_side: 250.0,
            bs_height: 25.0,
            ue_height: 1.5,
            min_bs_dist: 10.0,
            shadow_std_db: 10.0,
            azimuth_spread: 2f64.to_radians(),
            elevation_spread: 2f64.to_radians(),
            array: ArrayGeometry::Linear,
        }
    }

    /// Flat UE index for cell `l`, in-cell index `k`.
    pub fn flat(&self, l: usize, k: usize) -> usize {
        l * self.ues_per_cell + k
    }

    pub fn total_ues(&self) -> usize {
        self.cells * self.ues_per_cell
    }

    pub fn p_ul(&self, l: usize, k: usize) -> f64 {
        self.p_ul[self.flat(l, k)]
    }

    pub fn rho_dl(&self, l: usize, k: usize) -> f64 {
        self.rho_dl[self.flat(l, k)]
    }

    /// Set `tau_p` and re-split the remaining block samples evenly between
    /// uplink and downlink data (odd remainders favor the downlink by one).
    pub fn with_tau_p(mut self, tau_p: usize) -> Self {
        self.tau_p = tau_p;
        let rem = self.tau_c.saturating_sub(tau_p);
        self.tau_u = rem / 2;
        self.tau_d = rem - self.tau_u;
        self
    }

    /// Checks every structural invariant, collecting all violations.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if self.cells == 0 {
            errs.push("cells must be >= 1".to_string());
        }
        if self.ues_per_cell == 0 {
            errs.push("ues_per_cell must be >= 1".to_string());
        }
        if self.antennas == 0 {
            errs.push("antennas must be >= 1".to_string());
        }
        if self.spreading == 0 {
            errs.push("spreading must be >= 1".to_string());
        }
        if self.tau_p == 0 {
            errs.push("tau_p must be >= 1".to_string());
        }
        if self.tau_p + self.tau_u + self.tau_d != self.tau_c {
            errs.push(format!(
                "block split must be exact: tau_p + tau_u + tau_d = {} != tau_c = {}",
                self.tau_p + self.tau_u + self.tau_d,
                self.tau_c
            ));
        }
        let total = self.cells * self.ues_per_cell;
        if self.p_ul.len() != total {
            errs.push(format!("p_ul has {} entries, expected {}", self.p_ul.len(), total));
        }
        if self.rho_dl.len() != total {
            errs.push(format!("rho_dl has {} entries, expected {}", self.rho_dl.len(), total));
        }
        if self.p_ul.iter().any(|&p| !(p > 0.0)) {
            errs.push("all uplink powers must be positive".to_string());
        }
        if self.rho_dl.iter().any(|&p| !(p > 0.0)) {
            errs.push("all downlink powers must be positive".to_string());
        }
        if !(self.sigma2_ul > 0.0) {
            errs.push("sigma2_ul must be positive".to_string());
        }
        if !(self.sigma2_dl > 0.0) {
            errs.push("sigma2_dl must be positive".to_string());
        }
        if !(self.cell_side > 0.0) {
            errs.push("cell_side must be positive".to_string());
        }
        if !(self.min_bs_dist > 0.0) || self.min_bs_dist >= self.cell_side / 2.0 {
            errs.push("min_bs_dist must be positive and below half the cell side".to_string());
        }
        if self.bs_height <= self.ue_height {
            errs.push("bs_height must exceed ue_height".to_string());
        }
        if self.azimuth_spread < 0.0 || self.elevation_spread < 0.0 {
            errs.push("angular spreads must be non-negative".to_string());
        }
        if self.shadow_std_db < 0.0 {
            errs.push("shadow_std_db must be non-negative".to_string());
        }
        if self.array == ArrayGeometry::Planar {
            let s = (self.antennas as f64).sqrt().round() as usize;
            if s * s != self.antennas {
                errs.push(format!(
                    "planar arrays need a square antenna count, got M = {}",
                    self.antennas
                ));
            }
        }
        if errs.is_empty() { Ok(()) } else { Err(errs) }
    }
}

/// Large-scale geometry of one BS-UE link.
#[derive(Debug, Clone, Copy)]
pub struct LinkGeometry {
    /// 3D BS-UE distance in meters (includes the antenna-height offset).
    pub distance: f64,
    /// Shadow-fading realization, dB.
    pub shadow_db: f64,
    /// Nominal azimuth of the UE as seen from the BS, radians, measured
    /// from the global +x axis.
    pub azimuth: f64,
    /// Nominal elevation (depression angle from the horizontal plane down
    /// toward the UE), radians, non-negative.
    pub elevation: f64,
    /// Azimuth scattering half-width, radians.
    pub spread_az: f64,
    /// Elevation scattering half-width, radians.
    pub spread_el: f64,
}

/// Urban-macro pathloss: beta = -148.1 - 37.6 log10(d / 1 km) + F dB, with
/// `F` the link's shadow-fading term. Returns the *linear* average channel
/// gain. Errors on non-positive distance.
pub fn large_scale_fading(link: &LinkGeometry) -> Result<f64> {
    if !(link.distance > 0.0) {
        return Err(Error::domain(format!(
            "pathloss needs a positive distance, got {}",
            link.distance
        )));
    }
    let beta_db = -148.1 - 37.6 * (link.distance / 1000.0).log10() + link.shadow_db;
    Ok(db_to_lin(beta_db))
}

/// How UEs are placed inside each cell, relative to the serving BS.
#[derive(Debug, Clone, Copy)]
pub enum DropKind {
    /// Uniform over the whole cell square (minimum-distance disc excluded).
    UniformCell,
    /// All UEs at the same fixed distance from the BS, azimuths uniform in a
    /// sector of half-width `half_angle` around a random center direction;
    /// the center is drawn so the whole sector stays within +/- 60 degrees
    /// of broadside.
    SectorArc { half_angle: f64, distance: f64 },
    /// Uniform over a filled disc sector of half-width `half_angle` around
    /// broadside (+x), radii between the minimum distance and `radius`.
    SectorFilled { half_angle: f64, radius: f64 },
    /// `clusters` discs of radius `radius`, centers uniform in the cell with
    /// a margin so each disc fits; `K / clusters` UEs uniform in each disc.
    Clusters { clusters: usize, radius: f64 },
}

/// A drop description: the placement rule applied in every cell.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub drop: DropKind,
}

/// One realized drop: global UE positions plus the large-scale geometry of
/// every (BS, UE) link.
#[derive(Debug, Clone)]
pub struct NetworkDrop {
    /// `positions[l][k]` is the global (x, y) of UE k in cell l, meters.
    pub positions: Vec<Vec<(f64, f64)>>,
    /// Links flat-indexed `[bs * L * K ... ]`; use [`NetworkDrop::link`].
    links: Vec<LinkGeometry>,
    cells: usize,
    ues_per_cell: usize,
}

impl NetworkDrop {
    /// Geometry of the link from BS `bs` to UE `k` of cell `l`.
    pub fn link(&self, bs: usize, l: usize, k: usize) -> &LinkGeometry {
        &self.links[(bs * self.cells + l) * self.ues_per_cell + k]
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn ues_per_cell(&self) -> usize {
        self.ues_per_cell
    }
}

/// BS positions on a `ceil(sqrt(L))`-wide grid of square cells centered at
/// the origin, one BS at each cell center.
pub fn bs_positions(cells: usize, cell_side: f64) -> Vec<(f64, f64)> {
    let g = (cells as f64).sqrt().ceil() as usize;
    (0..cells)
        .map(|l| {
            let col = (l % g) as f64;
            let row = (l / g) as f64;
            let half = (g - 1) as f64 / 2.0;
            ((col - half) * cell_side, (row - half) * cell_side)
        })
        .collect()
}

/// Draws one network drop. Positions honor the minimum horizontal distance
/// to the *serving* BS; shadow fading is drawn i.i.d. per (UE, BS) pair.
///
/// The draw order is fixed (per cell: all positions, then per UE all BS
/// shadow terms), so a given `(config, scenario, rng_seed)` triple always
/// produces the same drop.
pub fn drop_ues(config: &NetworkConfig, scenario: &Scenario, rng_seed: u64) -> Result<NetworkDrop> {
    config
        .validate()
        .map_err(|v| Error::config(format!("invalid network config: {}", v.join("; "))))?;
    if let DropKind::Clusters { clusters, radius } = scenario.drop {
        if clusters == 0 || !config.ues_per_cell.is_multiple_of(clusters) {
            return Err(Error::config(format!(
                "cluster drop needs clusters >= 1 dividing K: K = {}, clusters = {clusters}",
                config.ues_per_cell
            )));
        }
        if !(radius > 0.0) || 2.0 * radius >= config.cell_side {
            return Err(Error::config(format!(
                "cluster radius {radius} m does not fit a {} m cell",
                config.cell_side
            )));
        }
    }
    if let DropKind::SectorArc { half_angle, distance } = scenario.drop {
        if !(distance >= config.min_bs_dist) {
            return Err(Error::config("sector-arc distance below the minimum BS-UE distance"));
        }
        if !(half_angle > 0.0) || half_angle > std::f64::consts::FRAC_PI_3 {
            return Err(Error::config("sector-arc half-angle must lie in (0, 60] degrees"));
        }
    }
    if let DropKind::SectorFilled { half_angle, radius } = scenario.drop {
        if !(half_angle > 0.0) || half_angle > std::f64::consts::PI {
            return Err(Error::config("sector half-angle must be positive and at most 180 degrees"));
        }
        if !(radius > config.min_bs_dist) {
            return Err(Error::config("sector radius must exceed the minimum BS-UE distance"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let bs = bs_positions(config.cells, config.cell_side);
    let half_side = config.cell_side / 2.0;
    let dh = config.bs_height - config.ue_height;

    let mut positions: Vec<Vec<(f64, f64)>> = Vec::with_capacity(config.cells);
    for l in 0..config.cells {
        let (cx, cy) = bs[l];
        let mut cell_pos = Vec::with_capacity(config.ues_per_cell);
        match scenario.drop {
            DropKind::UniformCell => {
                for _ in 0..config.ues_per_cell {
                    loop {
                        let x: f64 = rng.gen_range(-half_side..half_side);
                        let y: f64 = rng.gen_range(-half_side..half_side);
                        if x.hypot(y) >= config.min_bs_dist {
                            cell_pos.push((cx + x, cy + y));
                            break;
                        }
                    }
                }
            }
            DropKind::SectorArc { half_angle, distance } => {
                let lim = std::f64::consts::FRAC_PI_3 - half_angle;
                let center: f64 = if lim > 0.0 { rng.gen_range(-lim..lim) } else { 0.0 };
                for _ in 0..config.ues_per_cell {
                    let az = center + rng.gen_range(-half_angle..half_angle);
                    cell_pos.push((cx + distance * az.cos(), cy + distance * az.sin()));
                }
            }
            DropKind::SectorFilled { half_angle, radius } => {
                let r2min = config.min_bs_dist * config.min_bs_dist;
                let r2max = radius * radius;
                for _ in 0..config.ues_per_cell {
                    let az = rng.gen_range(-half_angle..half_angle);
                    let r = rng.gen_range(r2min..r2max).sqrt();
                    cell_pos.push((cx + r * az.cos(), cy + r * az.sin()));
                }
            }
            DropKind::Clusters { clusters, radius } => {
                let per = config.ues_per_cell / clusters;
                let margin = half_side - radius;
                for _ in 0..clusters {
                    // keep the whole disc inside the cell and clear of the BS
                    let (ccx, ccy) = loop {
                        let x: f64 = rng.gen_range(-margin..margin);
                        let y: f64 = rng.gen_range(-margin..margin);
                        if x.hypot(y) >= config.min_bs_dist + radius {
                            break (x, y);
                        }
                    };
                    for _ in 0..per {
                        let az = rng.gen_range(0.0..std::f64::consts::TAU);
                        let r = radius * rng.gen::<f64>().sqrt();
                        cell_pos.push((cx + ccx + r * az.cos(), cy + ccy + r * az.sin()));
                    }
                }
            }
        }
        cell_pos.truncate(config.ues_per_cell);
        positions.push(cell_pos);
    }

    // Shadow terms: per cell, per UE, one draw toward every BS.
    let total = config.cells * config.ues_per_cell;
    let mut shadows = vec![0.0f64; config.cells * total];
    for l in 0..config.cells {
        for k in 0..config.ues_per_cell {
            for j in 0..config.cells {
                let z: f64 = rng.sample(StandardNormal);
                let t = l * config.ues_per_cell + k;
                shadows[j * total + t] = config.shadow_std_db * z;
            }
        }
    }

    let mut links = Vec::with_capacity(config.cells * total);
    for j in 0..config.cells {
        let (bx, by) = bs[j];
        for l in 0..config.cells {
            for k in 0..config.ues_per_cell {
                let (ux, uy) = positions[l][k];
                let d_h = (ux - bx).hypot(uy - by).max(1e-3);
                links.push(LinkGeometry {
                    distance: d_h.hypot(dh),
                    shadow_db: shadows[j * total + l * config.ues_per_cell + k],
                    azimuth: (uy - by).atan2(ux - bx),
                    elevation: dh.atan2(d_h),
                    spread_az: config.azimuth_spread,
                    spread_el: config.elevation_spread,
                });
            }
        }
    }

    Ok(NetworkDrop {
        positions,
        links,
        cells: config.cells,
        ues_per_cell: config.ues_per_cell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn link_at(distance: f64, shadow_db: f64) -> LinkGeometry {
        LinkGeometry {
            distance,
            shadow_db,
            azimuth: 0.0,
            elevation: 0.0,
            spread_az: 0.0,
            spread_el: 0.0,
        }
    }

    // Anchors computed independently from the dB formula at fixed inputs.
    #[test]
    fn test_pathloss_anchors() {
        assert_relative_eq!(
            large_scale_fading(&link_at(250.0, 3.0)).unwrap(),
            5.672122052316427e-13,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            large_scale_fading(&link_at(100.0, 0.0)).unwrap(),
            8.912509381337441e-12,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            large_scale_fading(&link_at(353.5533905932738, -2.0)).unwrap(),
            4.8731432223656164e-14,
            max_relative = 1e-12
        );
    }

    #[test]
    fn test_pathloss_monotone_in_distance() {
        let mut prev = f64::INFINITY;
        for d in [10.0, 20.0, 50.0, 100.0, 200.0, 400.0, 800.0] {
            let b = large_scale_fading(&link_at(d, 0.0)).unwrap();
            assert!(b < prev, "beta must decrease with distance");
            prev = b;
        }
    }

    #[test]
    fn test_pathloss_rejects_nonpositive_distance() {
        assert!(large_scale_fading(&link_at(0.0, 0.0)).is_err());
        assert!(large_scale_fading(&link_at(-5.0, 0.0)).is_err());
    }

    #[test]
    fn test_db_helpers_roundtrip() {
        assert_relative_eq!(db_to_lin(0.0), 1.0);
        assert_relative_eq!(dbm_to_watt(30.0), 1.0);
        assert_relative_eq!(dbm_to_watt(20.0), 0.1);
        assert_relative_eq!(lin_to_db(db_to_lin(-17.3)), -17.3, epsilon = 1e-12);
    }

    #[test]
    fn test_bs_grid_2x2() {
        let bs = bs_positions(4, 250.0);
        assert_eq!(bs.len(), 4);
        assert_relative_eq!(bs[0].0, -125.0);
        assert_relative_eq!(bs[0].1, -125.0);
        assert_relative_eq!(bs[3].0, 125.0);
        assert_relative_eq!(bs[3].1, 125.0);
        // adjacent BSs sit one cell side apart
        assert_relative_eq!((bs[1].0 - bs[0].0).hypot(bs[1].1 - bs[0].1), 250.0);
    }

    #[test]
    fn test_urban_macro_defaults() {
        let c = NetworkConfig::urban_macro(4, 32, 64, 8);
        c.validate().unwrap();
        assert_eq!(c.tau_p, 32);
        assert_eq!(c.tau_u + c.tau_d + c.tau_p, c.tau_c);
        assert_eq!(c.tau_u, 84);
        assert_relative_eq!(c.p_ul[0], 0.1);
        assert_relative_eq!(c.sigma2_ul, 3.981071705534969e-13, max_relative = 1e-12);
    }

    #[test]
    fn test_validate_collects_all_violations() {
        let mut c = NetworkConfig::urban_macro(2, 4, 16, 2);
        c.sigma2_ul = 0.0;
        c.tau_u += 1;
        c.p_ul[3] = -1.0;
        let errs = c.validate().unwrap_err();
        assert!(errs.len() >= 3, "expected all violations listed, got {errs:?}");
    }

    #[test]
    fn test_drop_deterministic_and_in_cell() {
        let c = NetworkConfig::urban_macro(4, 16, 64, 4);
        let s = Scenario { drop: DropKind::UniformCell };
        let d1 = drop_ues(&c, &s, 42).unwrap();
        let d2 = drop_ues(&c, &s, 42).unwrap();
        let bs = bs_positions(4, 250.0);
        for l in 0..4 {
            for k in 0..16 {
                assert_eq!(d1.positions[l][k], d2.positions[l][k]);
                let (x, y) = d1.positions[l][k];
                assert!((x - bs[l].0).abs() <= 125.0 && (y - bs[l].1).abs() <= 125.0);
                let dist = (x - bs[l].0).hypot(y - bs[l].1);
                assert!(dist >= c.min_bs_dist, "min distance violated: {dist}");
            }
        }
        let d3 = drop_ues(&c, &s, 43).unwrap();
        assert_ne!(d1.positions[0][0], d3.positions[0][0]);
    }

    #[test]
    fn test_drop_links_consistent_with_geometry() {
        let c = NetworkConfig::urban_macro(4, 8, 64, 4);
        let s = Scenario { drop: DropKind::UniformCell };
        let d = drop_ues(&c, &s, 7).unwrap();
        let bs = bs_positions(4, 250.0);
        for j in 0..4 {
            for l in 0..4 {
                for k in 0..8 {
                    let g = d.link(j, l, k);
                    let (x, y) = d.positions[l][k];
                    let dh = (x - bs[j].0).hypot(y - bs[j].1);
                    assert_relative_eq!(g.distance, dh.hypot(23.5), max_relative = 1e-12);
                    assert!(g.elevation > 0.0 && g.elevation < std::f64::consts::FRAC_PI_2);
                    assert_relative_eq!(
                        (g.azimuth - (y - bs[j].1).atan2(x - bs[j].0)).abs(),
                        0.0,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn test_sector_arc_drop_fixed_distance() {
        let c = NetworkConfig::urban_macro(1, 16, 64, 4);
        let s = Scenario { drop: DropKind::SectorArc { half_angle: 15f64.to_radians(), distance: 100.0 } };
        let d = drop_ues(&c, &s, 5).unwrap();
        let mut azs = Vec::new();
        for k in 0..16 {
            let (x, y) = d.positions[0][k];
            assert_relative_eq!(x.hypot(y), 100.0, max_relative = 1e-12);
            azs.push(y.atan2(x));
        }
        let span = azs.iter().cloned().fold(f64::MIN, f64::max)
            - azs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(span <= 30f64.to_radians() + 1e-9, "sector wider than 30 degrees: {span}");
    }

    #[test]
    fn test_cluster_drop_shape() {
        let c = NetworkConfig::urban_macro(4, 32, 64, 8);
        let s = Scenario { drop: DropKind::Clusters { clusters: 4, radius: 20.0 } };
        let d = drop_ues(&c, &s, 11).unwrap();
        let bs = bs_positions(4, 250.0);
        for l in 0..4 {
            // 8 UEs per cluster; all inside the cell, clear of the BS
            for k in 0..32 {
                let (x, y) = d.positions[l][k];
                assert!((x - bs[l].0).abs() <= 125.0 && (y - bs[l].1).abs() <= 125.0);
                assert!((x - bs[l].0).hypot(y - bs[l].1) >= c.min_bs_dist);
            }
            for cl in 0..4 {
                let members = &d.positions[l][cl * 8..(cl + 1) * 8];
                for w in members.windows(2) {
                    let dd = (w[0].0 - w[1].0).hypot(w[0].1 - w[1].1);
                    assert!(dd <= 40.0 + 1e-9, "cluster diameter exceeded: {dd}");
                }
            }
        }
        let bad = Scenario { drop: DropKind::Clusters { clusters: 5, radius: 20.0 } };
        assert!(drop_ues(&c, &bad, 1).is_err());
    }
}
