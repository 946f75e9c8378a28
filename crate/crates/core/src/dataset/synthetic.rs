//! Seeded synthetic shipment generator.
//!
//! # Generative story
//!
//! The generator exists to exercise the classifiers, not to model freight.
//! Each record is produced as follows:
//!
//! 1. The mode is drawn from `target_mode_shares`.
//! 2. The expansion weight is drawn from a log-normal distribution that does
//!    not depend on the mode, so weighted shares converge to the targets.
//! 3. Attributes are drawn in groups (size/value/distance, commodity,
//!    industry, hazard/handling flags, origin-destination areas). For each
//!    group a *source mode* is picked: the record's own mode with probability
//!    `1 - noise_level`, otherwise a mode drawn from the target shares. The
//!    group is then sampled from the source mode's profile. `noise_level`
//!    therefore controls class overlap.
//! 4. Spatial densities are not drawn per record. Each area carries fixed
//!    attributes and the record takes those of its origin and destination.
//!
//! Profiles are fixed and independent of the seed. Size, value per pound and
//! distance come from a mixture of log-normal components per mode:
//!
//! * parcel shipments are light and cheap and travel any distance;
//! * air shipments are light, valuable and long-haul;
//! * for-hire trucks carry heavy loads far or light loads locally;
//! * private trucks carry heavy loads locally or light loads far;
//! * the other group carries very heavy, low-value bulk over long distances.
//!
//! The two truck modes thus split along an interaction of size and distance
//! that no single linear score separates.
//!
//! Commodity, industry and area profiles put most of their mass on a few
//! scattered vocabulary codes, so their effect is not monotone in the integer
//! code. Linear models on the raw codes cannot use them while trees can.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, LogNormal, Uniform};
use serde::{Deserialize, Serialize};

use super::record::ShipmentRecord;
use super::schema::{ModeClass, SchemaRegistry, N_CLASSES};
use crate::error::{Error, Result};

/// Weighted mode shares of the consolidated 2012 survey sample:
/// for-hire truck, private truck, parcel, air, other.
/// The published figures are rounded and sum to 1.0001.
pub const SURVEY_MODE_SHARES: [f64; N_CLASSES] = [0.1658, 0.2606, 0.5585, 0.0136, 0.0016];

/// [`SURVEY_MODE_SHARES`] rescaled to sum to one.
pub fn survey_mode_shares_normalized() -> [f64; N_CLASSES] {
    let total: f64 = SURVEY_MODE_SHARES.iter().sum();
    SURVEY_MODE_SHARES.map(|s| s / total)
}

/// Parameters of one synthetic draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_records: usize,
    pub target_mode_shares: [f64; N_CLASSES],
    pub seed: u64,
    pub noise_level: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_records: 20_000,
            target_mode_shares: survey_mode_shares_normalized(),
            seed: 0,
            noise_level: 0.3,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_records == 0 {
            return Err(Error::validation("n_records must be positive"));
        }
        let s = &self.target_mode_shares;
        if s.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::validation("target_mode_shares must be nonnegative"));
        }
        let total: f64 = s.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "target_mode_shares must sum to 1, got {total}"
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_level) {
            return Err(Error::validation("noise_level must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Seed for the fixed mode profiles; unrelated to the per-draw seed.
const PROFILE_SEED: u64 = 0x5eed_f4e1_9417;

/// Log-normal size, value-per-pound and distance of one mixture component.
#[derive(Clone, Copy)]
struct Shape {
    size_median_lb: f64,
    size_sigma: f64,
    value_per_lb_median: f64,
    distance_median_mi: f64,
    distance_sigma: f64,
}

const fn shape(size: f64, size_sigma: f64, per_lb: f64, distance: f64, distance_sigma: f64) -> Shape {
    Shape {
        size_median_lb: size,
        size_sigma,
        value_per_lb_median: per_lb,
        distance_median_mi: distance,
        distance_sigma,
    }
}

/// Per-mode attribute distributions.
struct ModeProfile {
    /// Mixture of (probability, shipment shape) components.
    shapes: Vec<(f64, Shape)>,
    hazmat: [f64; 3],
    temp_controlled: f64,
    export: f64,
    commodity: Vec<f64>,
    naics: Vec<f64>,
    origin_areas: Vec<f64>,
    dest_areas: Vec<f64>,
}

/// Scattered peaked weights over `n` codes: a few random codes get most mass.
fn peaked(rng: &mut ChaCha8Rng, n: usize, peaks: usize, peak_mass: f64) -> Vec<f64> {
    let mut w = vec![(1.0 - peak_mass) / n as f64; n];
    let codes: Vec<usize> = (0..n).collect();
    let chosen: Vec<usize> = codes.choose_multiple(rng, peaks.min(n)).copied().collect();
    for (rank, &c) in chosen.iter().enumerate() {
        // Geometric decay across the peaks.
        w[c] += peak_mass * 0.5f64.powi(rank as i32 + 1) / (1.0 - 0.5f64.powi(chosen.len() as i32));
    }
    w
}

fn profiles(registry: &SchemaRegistry) -> Vec<ModeProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROFILE_SEED);
    let v = &registry.vocabularies;
    let (nc, nn, na) = (v.commodity.len(), v.naics.len(), v.cfs_area.len());
    // (size median lb, size sigma, $/lb, distance median mi, distance sigma)
    let shapes: [Vec<(f64, Shape)>; N_CLASSES] = [
        // for-hire truck: long-haul truckload or local less-than-truckload
        vec![
            (0.5, shape(20000.0, 0.6, 1.0, 800.0, 0.5)),
            (0.5, shape(400.0, 0.6, 4.0, 40.0, 0.5)),
        ],
        // private truck: heavy local runs or light long-haul deliveries
        vec![
            (0.5, shape(20000.0, 0.6, 1.0, 40.0, 0.5)),
            (0.5, shape(400.0, 0.6, 4.0, 800.0, 0.5)),
        ],
        // parcel: small packages at any distance, plus bulkier local parcels
        vec![
            (0.7, shape(6.0, 0.9, 30.0, 350.0, 1.0)),
            (0.3, shape(80.0, 0.7, 12.0, 40.0, 0.6)),
        ],
        // air: light, valuable, long-haul
        vec![(1.0, shape(30.0, 1.0, 150.0, 1500.0, 0.4))],
        // other: bulk, either long-haul rail/water or short pipeline/water
        vec![
            (0.5, shape(40000.0, 0.8, 0.1, 1200.0, 0.5)),
            (0.5, shape(40000.0, 0.8, 0.3, 50.0, 0.5)),
        ],
    ];
    let handling = [
        // hazmat (class 3, other, none), temp controlled, export
        ([0.04, 0.04, 0.92], 0.08, 0.03),
        ([0.06, 0.03, 0.91], 0.20, 0.01),
        ([0.002, 0.008, 0.99], 0.02, 0.02),
        ([0.005, 0.02, 0.975], 0.05, 0.20),
        ([0.45, 0.15, 0.40], 0.02, 0.25),
    ];
    (0..N_CLASSES)
        .map(|m| {
            let (hazmat, temp_controlled, export) = handling[m];
            ModeProfile {
                shapes: shapes[m].clone(),
                hazmat,
                temp_controlled,
                export,
                commodity: peaked(&mut rng, nc, 3, 0.75),
                naics: peaked(&mut rng, nn, 4, 0.9),
                origin_areas: peaked(&mut rng, na, 10, 0.7),
                dest_areas: peaked(&mut rng, na, 10, 0.6),
            }
        })
        .collect()
}

/// Spatial attributes of one CFS area, shared by every shipment that starts
/// or ends there.
struct AreaAttributes {
    employee_density: f64,
    warehouse_count: u32,
    highway_density: f64,
    railway_density: f64,
    warm: bool,
    population_density: f64,
    low_income: bool,
}

fn area_attributes(registry: &SchemaRegistry) -> Vec<AreaAttributes> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROFILE_SEED ^ 0xa5ea);
    (0..registry.vocabularies.cfs_area.len())
        .map(|_| AreaAttributes {
            employee_density: lognormal(100.0, 0.8).sample(&mut rng),
            warehouse_count: poisson_like(&mut rng, 8.0),
            highway_density: lognormal(1.0, 0.4).sample(&mut rng),
            railway_density: lognormal(0.2, 0.6).sample(&mut rng),
            warm: rng.random_bool(0.45),
            population_density: lognormal(1.2, 0.9).sample(&mut rng),
            low_income: rng.random_bool(0.4),
        })
        .collect()
}

fn lognormal(median: f64, sigma: f64) -> LogNormal<f64> {
    LogNormal::new(median.ln(), sigma).expect("finite log-normal parameters")
}

/// Draws `spec.n_records` records. Identical specs give identical output.
pub fn generate_synthetic(spec: &SyntheticSpec, registry: &SchemaRegistry) -> Result<Vec<ShipmentRecord>> {
    spec.validate()?;
    let profiles = profiles(registry);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mode_dist = WeightedIndex::new(spec.target_mode_shares)
        .map_err(|e| Error::validation(format!("target_mode_shares: {e}")))?;
    let weight_dist = lognormal(1.0, 0.5);
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let areas = area_attributes(registry);

    let mut records = Vec::with_capacity(spec.n_records);
    for _ in 0..spec.n_records {
        let mode = mode_dist.sample(&mut rng);
        let weight = weight_dist.sample(&mut rng);
        let source = |rng: &mut ChaCha8Rng| -> &ModeProfile {
            if unit.sample(rng) < spec.noise_level {
                &profiles[mode_dist.sample(rng)]
            } else {
                &profiles[mode]
            }
        };

        let p = source(&mut rng);
        let probs: Vec<f64> = p.shapes.iter().map(|(w, _)| *w).collect();
        let sh = p.shapes[categorical(&mut rng, &probs)].1;
        let size_lb = lognormal(sh.size_median_lb, sh.size_sigma).sample(&mut rng);
        let value_usd = size_lb * lognormal(sh.value_per_lb_median, 0.6).sample(&mut rng);
        let distance_mi = lognormal(sh.distance_median_mi, sh.distance_sigma).sample(&mut rng);

        let p = source(&mut rng);
        let commodity = categorical(&mut rng, &p.commodity);
        let p = source(&mut rng);
        let naics = categorical(&mut rng, &p.naics);

        let p = source(&mut rng);
        let hazmat = categorical(&mut rng, &p.hazmat);
        let temp_controlled = rng.random_bool(p.temp_controlled);
        let export = rng.random_bool(p.export);

        let p = source(&mut rng);
        let origin_cfs = categorical(&mut rng, &p.origin_areas);
        let dest_cfs = categorical(&mut rng, &p.dest_areas);

        let (o, d) = (&areas[origin_cfs], &areas[dest_cfs]);
        let origin_employee_density = o.employee_density;
        let origin_warehouse_count = o.warehouse_count;
        let origin_highway_density = o.highway_density;
        let origin_railway_density = o.railway_density;
        let origin_temp_over_60f = o.warm;
        let dest_population_density = d.population_density;
        let dest_income_under_50k = d.low_income;
        let dest_temp_over_60f = d.warm;
        let dest_highway_density = d.highway_density;
        let dest_railway_density = d.railway_density;

        records.push(ShipmentRecord {
            mode: ModeClass::ALL[mode],
            size_lb,
            value_usd,
            distance_mi,
            commodity,
            hazmat,
            temp_controlled,
            export,
            origin_cfs,
            dest_cfs,
            naics,
            origin_employee_density,
            origin_warehouse_count,
            origin_highway_density,
            origin_railway_density,
            origin_temp_over_60f,
            dest_population_density,
            dest_income_under_50k,
            dest_temp_over_60f,
            dest_highway_density,
            dest_railway_density,
            weight,
        });
    }
    Ok(records)
}

fn categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Small nonnegative integer count with the given mean (sum of Bernoulli draws).
fn poisson_like(rng: &mut ChaCha8Rng, mean: f64) -> u32 {
    let trials = (mean * 2.0).ceil() as u32;
    (0..trials).filter(|_| rng.random_bool(0.5)).count() as u32
}
