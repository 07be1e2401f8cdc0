//! Random scenario generation: node placement, distance-based path loss and
//! i.i.d. Rayleigh small-scale fading, all reproducible from a seed.
//!
//! Geometry: the secondary BS sits at the origin, the primary transmitter at
//! `(bs_separation, 0)`, and the IRS on the segment between them. SUs are
//! uniform in the secondary cell (radius `cell_radius` around the BS), PUs
//! uniform in the primary cell.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::system_model::{dbm_to_watts, ChannelSet, ScenarioDims};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// How the reflected path BS → IRS → user is attenuated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrsLinkModel {
    /// Each hop has its own distance law; the cascade gain is the product of
    /// two path gains.
    PerHop,
    /// The reflected path is one link of length `d_BI + d_IU`: `F` carries
    /// only the BS antenna gain and `g_R`, `l_R` carry the path gain.
    DistanceSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Radius of both the primary and the secondary cell, meters.
    pub cell_radius: f64,
    /// Distance between the secondary BS and the primary transmitter, meters.
    pub bs_separation: f64,
    /// IRS location as a fraction of the BS → primary-transmitter segment.
    pub irs_position: f64,
    pub carrier_hz: f64,
    /// Path-loss exponent of the direct BS → user links.
    pub pathloss_exponent: f64,
    /// Path-loss exponent of the BS → IRS and IRS → user hops.
    pub irs_pathloss_exponent: f64,
    pub irs_link_model: IrsLinkModel,
    pub bs_gain_dbi: f64,
    /// Reference distance of the path-loss law, meters.
    pub reference_distance: f64,
    pub su_noise_dbm: f64,
    pub pu_noise_dbm: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            cell_radius: 100.0,
            bs_separation: 180.0,
            irs_position: 0.5,
            carrier_hz: 2.5e9,
            pathloss_exponent: 3.5,
            irs_pathloss_exponent: 3.5,
            irs_link_model: IrsLinkModel::DistanceSum,
            bs_gain_dbi: 10.0,
            reference_distance: 1.0,
            su_noise_dbm: -90.0,
            pu_noise_dbm: -90.0,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cell_radius", self.cell_radius),
            ("bs_separation", self.bs_separation),
            ("carrier_hz", self.carrier_hz),
            ("pathloss_exponent", self.pathloss_exponent),
            ("irs_pathloss_exponent", self.irs_pathloss_exponent),
            ("reference_distance", self.reference_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.irs_position) {
            return Err(Error::Config(format!(
                "irs_position must lie in [0, 1], got {}",
                self.irs_position
            )));
        }
        if self.reference_distance >= self.cell_radius {
            return Err(Error::Config(
                "reference_distance must be smaller than cell_radius".into(),
            ));
        }
        Ok(())
    }

    /// Free-space gain at the reference distance, `(c / (4π f_c d₀))²`.
    pub fn reference_gain(&self) -> f64 {
        let x = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * self.carrier_hz * self.reference_distance);
        x * x
    }

    pub fn bs_gain(&self) -> f64 {
        10f64.powf(self.bs_gain_dbi / 10.0)
    }
}

/// Linear power gain `G_ref · (d / d₀)^{−α}` of a direct link (no antenna gain).
pub fn path_gain(distance: f64, cfg: &GeometryConfig) -> Result<f64> {
    path_gain_with_exponent(distance, cfg, cfg.pathloss_exponent)
}

pub fn path_gain_with_exponent(distance: f64, cfg: &GeometryConfig, exponent: f64) -> Result<f64> {
    if !(distance >= cfg.reference_distance) {
        return Err(Error::InvalidParameter(format!(
            "distance {distance} m below the reference distance {} m",
            cfg.reference_distance
        )));
    }
    Ok(cfg.reference_gain() * (distance / cfg.reference_distance).powf(-exponent))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub bs: Point2,
    pub primary_tx: Point2,
    pub irs: Point2,
    pub sus: Vec<Point2>,
    pub pus: Vec<Point2>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRealization {
    pub dims: ScenarioDims,
    pub placement: Placement,
    pub channels: ChannelSet,
    pub seed: u64,
}

const POSITION_STREAM: u64 = 1;
const FADING_STREAM: u64 = 2;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point in the annulus `r₀ ≤ r ≤ R` around `center`.
fn uniform_in_cell<R: Rng>(rng: &mut R, center: Point2, radius: f64, r_min: f64) -> Point2 {
    let u: f64 = rng.random();
    let r = (r_min * r_min + u * (radius * radius - r_min * r_min)).sqrt();
    let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    Point2::new(center.x + r * phi.cos(), center.y + r * phi.sin())
}

/// Node positions for one realization. Users closer than the reference
/// distance to their cell center are excluded.
pub fn sample_positions(dims: &ScenarioDims, cfg: &GeometryConfig, seed: u64) -> Result<Placement> {
    cfg.validate()?;
    let mut rng = rng_for(seed, POSITION_STREAM);
    let bs = Point2::new(0.0, 0.0);
    let primary_tx = Point2::new(cfg.bs_separation, 0.0);
    let irs = Point2::new(cfg.irs_position * cfg.bs_separation, 0.0);
    let sus = (0..dims.k_users)
        .map(|_| uniform_in_cell(&mut rng, bs, cfg.cell_radius, cfg.reference_distance))
        .collect();
    let pus = (0..dims.i_users)
        .map(|_| uniform_in_cell(&mut rng, primary_tx, cfg.cell_radius, cfg.reference_distance))
        .collect();
    Ok(Placement {
        bs,
        primary_tx,
        irs,
        sus,
        pus,
    })
}

fn cn01<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn fading_vector<R: Rng>(rng: &mut R, len: usize, gain: f64) -> CVec {
    let amp = gain.sqrt();
    CVec::from_iterator(len, (0..len).map(|_| cn01(rng) * amp))
}

/// Channel coefficients for a placement: `sqrt(path gain) · CN(0, 1)` per
/// entry, with the BS antenna gain applied to every BS-side link.
///
/// Each link draws from its own sub-stream, so the first entries of a link
/// do not depend on how many IRS elements or antennas follow them.
pub fn generate_channels(
    placement: &Placement,
    dims: &ScenarioDims,
    cfg: &GeometryConfig,
    seed: u64,
) -> Result<ChannelSet> {
    cfg.validate()?;
    if placement.sus.len() != dims.k_users || placement.pus.len() != dims.i_users {
        return Err(Error::DimensionMismatch(
            "placement user counts differ from scenario dims".into(),
        ));
    }
    let d0 = cfg.reference_distance;
    let direct = |a: &Point2, b: &Point2| path_gain(a.distance(b).max(d0), cfg);
    let hop = |d: f64| path_gain_with_exponent(d.max(d0), cfg, cfg.irs_pathloss_exponent);
    let d_bi = placement.bs.distance(&placement.irs);
    let (f_gain, reflected): (f64, Box<dyn Fn(&Point2) -> Result<f64>>) = match cfg.irs_link_model {
        IrsLinkModel::PerHop => (
            cfg.bs_gain() * hop(d_bi)?,
            Box::new(|u: &Point2| hop(placement.irs.distance(u))),
        ),
        IrsLinkModel::DistanceSum => (
            cfg.bs_gain(),
            Box::new(move |u: &Point2| hop(d_bi + placement.irs.distance(u))),
        ),
    };
    let g_bs = cfg.bs_gain();
    let mut link = 0u64;
    let mut next_rng = || {
        link += 1;
        rng_for(seed, FADING_STREAM + (link << 8))
    };

    let mut rng = next_rng();
    let mut f_mat = CMat::zeros(dims.m, dims.n_t);
    let amp = f_gain.sqrt();
    for r in 0..dims.m {
        for c in 0..dims.n_t {
            f_mat[(r, c)] = cn01(&mut rng) * amp;
        }
    }

    let mut g_d = Vec::with_capacity(dims.k_users);
    let mut g_r = Vec::with_capacity(dims.k_users);
    for su in &placement.sus {
        g_d.push(fading_vector(&mut next_rng(), dims.n_t, g_bs * direct(&placement.bs, su)?));
        g_r.push(fading_vector(&mut next_rng(), dims.m, reflected(su)?));
    }
    let mut l_d = Vec::with_capacity(dims.i_users);
    let mut l_r = Vec::with_capacity(dims.i_users);
    for pu in &placement.pus {
        l_d.push(fading_vector(&mut next_rng(), dims.n_t, g_bs * direct(&placement.bs, pu)?));
        l_r.push(fading_vector(&mut next_rng(), dims.m, reflected(pu)?));
    }
    ChannelSet::new(
        f_mat,
        g_d,
        g_r,
        l_d,
        l_r,
        vec![dbm_to_watts(cfg.su_noise_dbm); dims.k_users],
        vec![dbm_to_watts(cfg.pu_noise_dbm); dims.i_users],
    )
}

/// Placement plus channels for one seed.
pub fn realize(dims: &ScenarioDims, cfg: &GeometryConfig, seed: u64) -> Result<ScenarioRealization> {
    let placement = sample_positions(dims, cfg, seed)?;
    let channels = generate_channels(&placement, dims, cfg, seed)?;
    Ok(ScenarioRealization {
        dims: *dims,
        placement,
        channels,
        seed,
    })
}

/// Portable text form of a realization: one `key value...` line per item,
/// complex numbers as `re im` pairs.
pub fn realization_to_text(r: &ScenarioRealization) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let d = &r.dims;
    let _ = writeln!(out, "seed {}", r.seed);
    let _ = writeln!(out, "dims {} {} {} {}", d.n_t, d.m, d.k_users, d.i_users);
    let p = &r.placement;
    for (name, pt) in [("bs", p.bs), ("primary_tx", p.primary_tx), ("irs", p.irs)] {
        let _ = writeln!(out, "{name} {:e} {:e}", pt.x, pt.y);
    }
    for pt in &p.sus {
        let _ = writeln!(out, "su {:e} {:e}", pt.x, pt.y);
    }
    for pt in &p.pus {
        let _ = writeln!(out, "pu {:e} {:e}", pt.x, pt.y);
    }
    let ch = &r.channels;
    let write_vec = |out: &mut String, name: &str, v: &CVec| {
        let _ = write!(out, "{name}");
        for z in v.iter() {
            let _ = write!(out, " {:e} {:e}", z.re, z.im);
        }
        let _ = writeln!(out);
    };
    for row in 0..ch.f_mat.nrows() {
        write_vec(&mut out, "f_row", &ch.f_mat.row(row).transpose());
    }
    for k in 0..ch.g_d.len() {
        write_vec(&mut out, "g_d", &ch.g_d[k]);
        write_vec(&mut out, "g_r", &ch.g_r[k]);
    }
    for i in 0..ch.l_d.len() {
        write_vec(&mut out, "l_d", &ch.l_d[i]);
        write_vec(&mut out, "l_r", &ch.l_r[i]);
    }
    let _ = write!(out, "noise");
    for s in &ch.noise_power {
        let _ = write!(out, " {s:e}");
    }
    let _ = writeln!(out);
    let _ = write!(out, "pu_noise");
    for s in &ch.pu_noise_power {
        let _ = write!(out, " {s:e}");
    }
    let _ = writeln!(out);
    out
}

pub fn realization_from_text(text: &str) -> Result<ScenarioRealization> {
    let bad = |msg: String| Error::Config(format!("realization text: {msg}"));
    let mut seed = None;
    let mut dims = None;
    let mut pts: std::collections::HashMap<&str, Point2> = Default::default();
    let (mut sus, mut pus) = (Vec::new(), Vec::new());
    let (mut f_rows, mut g_d, mut g_r, mut l_d, mut l_r) = (vec![], vec![], vec![], vec![], vec![]);
    let (mut noise, mut pu_noise) = (vec![], vec![]);
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let mut it = line.split_whitespace();
        let key = it.next().unwrap_or_default();
        if key == "seed" {
            // parsed as an integer: seeds above 2^53 do not survive an f64
            let v = it.next().ok_or_else(|| bad("seed needs a value".into()))?;
            seed = Some(v.parse::<u64>().map_err(|e| bad(format!("{v}: {e}")))?);
            continue;
        }
        let nums: Vec<f64> = it
            .map(|s| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}"))))
            .collect::<Result<_>>()?;
        let complex = |nums: &[f64]| -> Result<CVec> {
            if nums.len() % 2 != 0 {
                return Err(bad(format!("odd number of values for {key}")));
            }
            Ok(CVec::from_iterator(
                nums.len() / 2,
                nums.chunks(2).map(|p| C64::new(p[0], p[1])),
            ))
        };
        let point = |nums: &[f64]| -> Result<Point2> {
            match nums {
                [x, y] => Ok(Point2::new(*x, *y)),
                _ => Err(bad(format!("{key} needs two coordinates"))),
            }
        };
        match key {
            "dims" => {
                if nums.len() != 4 {
                    return Err(bad("dims needs four values".into()));
                }
                dims = Some(ScenarioDims {
                    n_t: nums[0] as usize,
                    m: nums[1] as usize,
                    k_users: nums[2] as usize,
                    i_users: nums[3] as usize,
                });
            }
            "bs" | "primary_tx" | "irs" => {
                let name = match key {
                    "bs" => "bs",
                    "irs" => "irs",
                    _ => "primary_tx",
                };
                pts.insert(name, point(&nums)?);
            }
            "su" => sus.push(point(&nums)?),
            "pu" => pus.push(point(&nums)?),
            "f_row" => f_rows.push(complex(&nums)?),
            "g_d" => g_d.push(complex(&nums)?),
            "g_r" => g_r.push(complex(&nums)?),
            "l_d" => l_d.push(complex(&nums)?),
            "l_r" => l_r.push(complex(&nums)?),
            "noise" => noise = nums,
            "pu_noise" => pu_noise = nums,
            other => return Err(bad(format!("unknown key {other}"))),
        }
    }
    let dims = dims.ok_or_else(|| bad("missing dims".into()))?;
    let mut f_mat = CMat::zeros(dims.m, dims.n_t);
    if f_rows.len() != dims.m {
        return Err(bad("wrong number of F rows".into()));
    }
    for (r, row) in f_rows.iter().enumerate() {
        if row.len() != dims.n_t {
            return Err(bad("wrong F row length".into()));
        }
        for c in 0..dims.n_t {
            f_mat[(r, c)] = row[c];
        }
    }
    let get = |name: &str| pts.get(name).copied().ok_or_else(|| bad(format!("missing {name}")));
    let placement = Placement {
        bs: get("bs")?,
        primary_tx: get("primary_tx")?,
        irs: get("irs")?,
        sus,
        pus,
    };
    let channels = ChannelSet::new(f_mat, g_d, g_r, l_d, l_r, noise, pu_noise)?;
    if channels.dims() != dims {
        return Err(bad("channel shapes disagree with dims".into()));
    }
    Ok(ScenarioRealization {
        dims,
        placement,
        channels,
        seed: seed.ok_or_else(|| bad("missing seed".into()))?,
    })
}
