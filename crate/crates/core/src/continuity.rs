//! Continuity corridor around balls of distillable states.
//!
//! For a center `ρ` whose trace-distance ball `B` of radius `ε` stays
//! certified-distillable, let `r = min_B E_d / max_B E_c` and
//! `κ(p) = p / (p + r/(1 − r))`. Every asymptotic measure then satisfies
//! `E(ρ_p) ≥ (1 − κ(p))E(ρ)` and `E(ρ) ≥ (1 − κ(p))E(ρ_p)` along
//! `ρ_p = (1 − p)ρ + pσ` for `σ` on the surface of `B`, which yields
//! `|E(ρ) − E(ρ')| ≤ (Δ/ε)·T(ρ, ρ')` with `Δ = E_c(B)(1 − r)/r`.
//!
//! The true extrema over `B` are not computable. Everything here uses the
//! certified surrogates (`ed_lower`, `ec_upper`) evaluated on a seeded
//! sample of the ball, and labels the extrema accordingly.

use rand::Rng;
use serde::Serialize;

use crate::eof_search::EofSearch;
use crate::error::{Error, Result};
use crate::linalg::{mix, trace_distance, DensityMatrix};
use crate::measures::{self, eof_2x2, is_ppt, log_negativity, MeasureValue};
use crate::random::{ginibre_state, rng_from_seed};
use crate::states::StatePath;

/// Slack on every corridor inequality.
pub const CORRIDOR_SLACK: f64 = 1e-9;
const MAX_DIRECTION_ATTEMPTS: usize = 64;

/// The lower/upper surrogate pair the harness evaluates.
pub trait Surrogates {
    fn ed_lower(&self, rho: &DensityMatrix) -> MeasureValue;
    fn ec_upper(&self, rho: &DensityMatrix) -> MeasureValue;
}

/// Hashing after twirl below, entanglement of formation above.
#[derive(Clone, Debug, Default)]
pub struct StandardSurrogates {
    pub eof_search: EofSearch,
}

impl Surrogates for StandardSurrogates {
    fn ed_lower(&self, rho: &DensityMatrix) -> MeasureValue {
        measures::ed_lower(rho)
    }

    fn ec_upper(&self, rho: &DensityMatrix) -> MeasureValue {
        measures::ec_upper_with(rho, &self.eof_search)
    }
}

#[derive(Clone, Debug)]
pub struct BallSpec {
    pub center: DensityMatrix,
    /// Trace-distance radius.
    pub epsilon: f64,
    /// Interior samples.
    pub sample_count: usize,
    /// Extra samples placed exactly on the surface; these are the `σ` used
    /// for the mixing family.
    pub surface_count: usize,
    pub seed: u64,
}

impl BallSpec {
    pub fn new(center: DensityMatrix, epsilon: f64, sample_count: usize, seed: u64) -> Result<Self> {
        let spec = Self { center, epsilon, sample_count, surface_count: 4, seed };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} outside (0, 1]", self.epsilon)));
        }
        if self.sample_count == 0 {
            return Err(Error::InvalidParameter("sample_count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct BallPoint {
    pub state: DensityMatrix,
    /// `T(center, state)`.
    pub distance: f64,
    pub on_surface: bool,
}

/// Interior samples first (radius `u·ε`, `u` uniform on `(0, 1]`), then the
/// surface points. Directions are Ginibre states; the same seed gives the
/// same directions and radii fractions for every `ε`.
pub fn sample_ball(spec: &BallSpec) -> Result<Vec<BallPoint>> {
    spec.check()?;
    let mut rng = rng_from_seed(spec.seed);
    let (da, db) = (spec.center.dim_a(), spec.center.dim_b());
    let total = spec.sample_count + spec.surface_count;
    let mut points = Vec::with_capacity(total);
    for i in 0..total {
        let on_surface = i >= spec.sample_count;
        let u = 1.0 - rng.gen::<f64>();
        let target = if on_surface { spec.epsilon } else { u * spec.epsilon };
        let mut attempts = 0;
        let point = loop {
            if attempts == MAX_DIRECTION_ATTEMPTS {
                return Err(Error::RescaleFailed { attempts });
            }
            attempts += 1;
            let direction = ginibre_state(da, db, &mut rng);
            let full = trace_distance(&spec.center, &direction)?;
            if full < target || full <= 1e-12 {
                continue;
            }
            let t = target / full;
            let state = mix(&spec.center, &direction, t)?;
            break BallPoint { state, distance: t * full, on_surface };
        };
        points.push(point);
    }
    Ok(points)
}

/// How the ball extrema were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremaMode {
    /// Extrema over the sample set and the center.
    Sampled,
    /// Sampled extrema widened by `L·ε`, with `L` the largest observed
    /// surrogate slope away from the center.
    Conservative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallConstants {
    pub ed_min_lower: f64,
    pub ec_max_upper: f64,
    pub r: f64,
    pub delta: f64,
    /// `r = 1`: zero gap, so `κ ≡ 0` and the Lipschitz bound vanishes.
    pub reversible: bool,
    pub mode: ExtremaMode,
    pub ed_method: String,
    pub ec_method: String,
    pub ed_slope: f64,
    pub ec_slope: f64,
    pub points_evaluated: usize,
}

impl BallConstants {
    /// Derives `r` and `Δ = E_c(B)(1 − r)/r` from the extrema.
    pub fn from_extrema(ed_min_lower: f64, ec_max_upper: f64) -> Result<Self> {
        if !(ed_min_lower > 0.0) || !(ec_max_upper > 0.0) {
            return Err(Error::NotCertified(format!(
                "extrema ed = {ed_min_lower}, ec = {ec_max_upper} do not certify distillability"
            )));
        }
        let r = (ed_min_lower / ec_max_upper).min(1.0);
        let reversible = r >= 1.0;
        let delta = if reversible { 0.0 } else { ec_max_upper * (1.0 - r) / r };
        Ok(Self {
            ed_min_lower,
            ec_max_upper,
            r,
            delta,
            reversible,
            mode: ExtremaMode::Sampled,
            ed_method: String::new(),
            ec_method: String::new(),
            ed_slope: 0.0,
            ec_slope: 0.0,
            points_evaluated: 0,
        })
    }
}

/// Surrogate values at one ball point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointValues {
    pub distance: f64,
    pub ed_lower: f64,
    pub ec_upper: f64,
}

fn evaluate_points(surrogates: &dyn Surrogates, points: &[BallPoint]) -> Vec<PointValues> {
    points
        .iter()
        .map(|pt| PointValues {
            distance: pt.distance,
            ed_lower: surrogates.ed_lower(&pt.state).value,
            ec_upper: surrogates.ec_upper(&pt.state).value,
        })
        .collect()
}

/// Ball constants from already-sampled points.
pub fn ball_constants_from(
    surrogates: &dyn Surrogates,
    center: &DensityMatrix,
    epsilon: f64,
    points: &[BallPoint],
    mode: ExtremaMode,
) -> Result<(BallConstants, Vec<PointValues>)> {
    let ed_center = surrogates.ed_lower(center);
    let ec_center = surrogates.ec_upper(center);
    if ed_center.value <= 0.0 {
        return Err(Error::NotCertified("center has ed_lower = 0".into()));
    }
    let values = evaluate_points(surrogates, points);
    if let Some(index) = values.iter().position(|v| v.ed_lower <= 0.0) {
        return Err(Error::BallNotCertified { index });
    }
    let mut ed_min = ed_center.value;
    let mut ec_max = ec_center.value;
    let (mut ed_slope, mut ec_slope) = (0.0f64, 0.0f64);
    for v in &values {
        ed_min = ed_min.min(v.ed_lower);
        ec_max = ec_max.max(v.ec_upper);
        if v.distance > 0.0 {
            ed_slope = ed_slope.max((v.ed_lower - ed_center.value).abs() / v.distance);
            ec_slope = ec_slope.max((v.ec_upper - ec_center.value).abs() / v.distance);
        }
    }
    if mode == ExtremaMode::Conservative {
        ed_min = ed_min.min(ed_center.value - ed_slope * epsilon);
        ec_max = ec_max.max(ec_center.value + ec_slope * epsilon);
    }
    let mut constants = BallConstants::from_extrema(ed_min, ec_max)?;
    constants.mode = mode;
    constants.ed_method = ed_center.method;
    constants.ec_method = ec_center.method;
    constants.ed_slope = ed_slope;
    constants.ec_slope = ec_slope;
    constants.points_evaluated = values.len() + 1;
    Ok((constants, values))
}

/// Samples the ball and reduces the surrogates to `(E_d(B), E_c(B), r, Δ)`.
pub fn ball_constants(spec: &BallSpec) -> Result<BallConstants> {
    let points = sample_ball(spec)?;
    Ok(ball_constants_from(&StandardSurrogates::default(), &spec.center, spec.epsilon, &points, ExtremaMode::Sampled)?
        .0)
}

/// `κ(p) = p / (p + r/(1 − r))`, with `κ ≡ 0` at `r = 1`.
pub fn kappa(p: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidParameter(format!("r = {r} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    if r == 1.0 {
        return Ok(0.0);
    }
    let num = p * (1.0 - r);
    Ok(num / (num + r))
}

/// `(Δ/ε)·T(center, other)`: the ceiling on `|E(center) − E(other)|`.
pub fn lipschitz_bound(
    center: &DensityMatrix,
    other: &DensityMatrix,
    constants: &BallConstants,
    epsilon: f64,
) -> Result<f64> {
    let distance = trace_distance(center, other)?;
    if distance > epsilon + CORRIDOR_SLACK {
        return Err(Error::OutsideBall { distance, epsilon });
    }
    Ok(constants.delta / epsilon * distance)
}

/// One point of the corridor check along `ρ_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorridorRow {
    pub p: f64,
    pub kappa: f64,
    /// `T(ρ, ρ_p)`.
    pub distance: f64,
    /// `(1 − κ)·ed_lower(ρ)` against `ec_upper(ρ_p)`.
    pub forth_lhs: f64,
    pub forth_rhs: f64,
    /// `(1 − κ)·ed_lower(ρ_p)` against `ec_upper(ρ)`.
    pub back_lhs: f64,
    pub back_rhs: f64,
    /// Whether `ρ_{p−1} = (2 − p)ρ + (p − 1)σ` is a state, which the
    /// backward transformation needs.
    pub back_state_exists: bool,
    pub lipschitz_bound: f64,
    pub forth_pass: bool,
    pub back_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorridorReport {
    pub surface_distance: f64,
    pub rows: Vec<CorridorRow>,
    pub violations: usize,
    /// Rows whose backward check was skipped because `ρ_{p−1}` does not exist.
    pub skipped_back: usize,
    pub pass: bool,
}

pub fn corridor_consistency_check(
    center: &DensityMatrix,
    sigma_surface: &DensityMatrix,
    constants: &BallConstants,
    p_grid: &[f64],
) -> Result<CorridorReport> {
    corridor_consistency_check_with(
        &StandardSurrogates::default(),
        center,
        sigma_surface,
        constants,
        p_grid,
        CORRIDOR_SLACK,
    )
}

pub fn corridor_consistency_check_with(
    surrogates: &dyn Surrogates,
    center: &DensityMatrix,
    sigma_surface: &DensityMatrix,
    constants: &BallConstants,
    p_grid: &[f64],
    slack: f64,
) -> Result<CorridorReport> {
    let surface_distance = trace_distance(center, sigma_surface)?;
    let ed_center = surrogates.ed_lower(center).value;
    let ec_center = surrogates.ec_upper(center).value;
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let k = kappa(p, constants.r)?;
        let rho_p = mix(center, sigma_surface, p)?;
        let back_state_exists = mix(center, sigma_surface, p - 1.0).is_ok();
        let forth_lhs = (1.0 - k) * ed_center;
        let forth_rhs = surrogates.ec_upper(&rho_p).value;
        let back_lhs = (1.0 - k) * surrogates.ed_lower(&rho_p).value;
        let back_rhs = ec_center;
        let distance = trace_distance(center, &rho_p)?;
        let lipschitz = if surface_distance > 0.0 { constants.delta / surface_distance * distance } else { 0.0 };
        rows.push(CorridorRow {
            p,
            kappa: k,
            distance,
            forth_lhs,
            forth_rhs,
            back_lhs,
            back_rhs,
            back_state_exists,
            lipschitz_bound: lipschitz,
            forth_pass: forth_lhs <= forth_rhs + slack,
            back_pass: !back_state_exists || back_lhs <= back_rhs + slack,
        });
    }
    let violations = rows.iter().filter(|r| !r.forth_pass || !r.back_pass).count();
    let skipped_back = rows.iter().filter(|r| !r.back_state_exists).count();
    Ok(CorridorReport { surface_distance, rows, violations, skipped_back, pass: violations == 0 })
}

/// `count` evenly spaced points on `[0, 1]`.
pub fn unit_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub on_surface: bool,
    pub distance: f64,
    pub ed_lower: f64,
    pub ec_upper: f64,
    pub lipschitz_bound: f64,
}

/// Everything one ball experiment produces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallScanReport {
    pub seed: u64,
    pub epsilon: f64,
    pub sample_count: usize,
    pub surface_count: usize,
    pub p_grid: Vec<f64>,
    pub slack: f64,
    pub constants: BallConstants,
    pub samples: Vec<SampleRow>,
    pub corridors: Vec<CorridorReport>,
    pub pass: bool,
}

/// Samples the ball, derives its constants, runs the corridor check along
/// every surface direction and tabulates the Lipschitz bound per sample.
pub fn ball_scan(spec: &BallSpec, p_points: usize, mode: ExtremaMode) -> Result<BallScanReport> {
    ball_scan_with(&StandardSurrogates::default(), spec, p_points, mode, CORRIDOR_SLACK)
}

pub fn ball_scan_with(
    surrogates: &dyn Surrogates,
    spec: &BallSpec,
    p_points: usize,
    mode: ExtremaMode,
    slack: f64,
) -> Result<BallScanReport> {
    if p_points == 0 {
        return Err(Error::InvalidParameter("p grid needs at least one point".into()));
    }
    let points = sample_ball(spec)?;
    let (constants, values) = ball_constants_from(surrogates, &spec.center, spec.epsilon, &points, mode)?;
    let p_grid = unit_grid(p_points);
    let corridors = points
        .iter()
        .filter(|pt| pt.on_surface)
        .map(|pt| corridor_consistency_check_with(surrogates, &spec.center, &pt.state, &constants, &p_grid, slack))
        .collect::<Result<Vec<_>>>()?;
    let samples = points
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(index, (pt, v))| SampleRow {
            index,
            on_surface: pt.on_surface,
            distance: v.distance,
            ed_lower: v.ed_lower,
            ec_upper: v.ec_upper,
            lipschitz_bound: constants.delta / spec.epsilon * v.distance,
        })
        .collect();
    let pass = corridors.iter().all(|c| c.pass);
    Ok(BallScanReport {
        seed: spec.seed,
        epsilon: spec.epsilon,
        sample_count: spec.sample_count,
        surface_count: spec.surface_count,
        p_grid,
        slack,
        constants,
        samples,
        corridors,
        pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Border2x2Row {
    pub param: f64,
    pub eof: f64,
    pub log_neg: f64,
    pub ppt_margin: f64,
}

/// Entanglement of formation, log-negativity and PPT margin along a
/// two-qubit path.
pub fn border_scan_2x2(path: &dyn StatePath, grid: &[f64]) -> Result<Vec<Border2x2Row>> {
    if path.dims() != (2, 2) {
        let (a, b) = path.dims();
        return Err(Error::DimensionMismatch { left: format!("{a}x{b}"), right: "2x2".into() });
    }
    grid.iter()
        .map(|&param| {
            let rho = checked_state(path, param)?;
            Ok(Border2x2Row {
                param,
                eof: eof_2x2(&rho)?.value,
                log_neg: log_negativity(&rho).value,
                ppt_margin: is_ppt(&rho).margin,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Border2xNRow {
    pub param: f64,
    pub log_neg: f64,
    pub ppt_margin: f64,
    pub eof_upper: Option<f64>,
}

/// Log-negativity and PPT margin along a `2 × N` path; optionally the
/// searched entanglement-of-formation bound as well.
pub fn border_scan_2xn(path: &dyn StatePath, grid: &[f64], eof: Option<&EofSearch>) -> Result<Vec<Border2xNRow>> {
    if path.dims().0 != 2 {
        let (a, b) = path.dims();
        return Err(Error::DimensionMismatch { left: format!("{a}x{b}"), right: "2xN".into() });
    }
    grid.iter()
        .map(|&param| {
            let rho = checked_state(path, param)?;
            let eof_upper = match eof {
                Some(search) => Some(crate::eof_search::eof_upper_general(&rho, search)?.value),
                None => None,
            };
            Ok(Border2xNRow { param, log_neg: log_negativity(&rho).value, ppt_margin: is_ppt(&rho).margin, eof_upper })
        })
        .collect()
}

fn checked_state(path: &dyn StatePath, param: f64) -> Result<DensityMatrix> {
    let rho = path.state(param)?;
    let diag = rho.validate();
    if !diag.pass {
        return Err(Error::InvalidState(diag));
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{phi_plus_state, werner, Isotropic2x3Path, WernerPath};

    #[test]
    fn kappa_examples() {
        for r in [0.1, 0.5, 0.9, 1.0] {
            assert_eq!(kappa(0.0, r).unwrap(), 0.0);
            assert_eq!(kappa(1.0, r).unwrap(), 1.0 - r);
        }
        assert!((kappa(0.5, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(kappa(0.5, 0.0).is_err());
        assert!(kappa(0.5, 1.2).is_err());
        assert!(kappa(1.5, 0.5).is_err());
    }

    #[test]
    fn samples_stay_in_the_ball_and_are_reproducible() {
        let spec = BallSpec::new(werner(0.9).unwrap(), 0.05, 30, 7).unwrap();
        let a = sample_ball(&spec).unwrap();
        let b = sample_ball(&spec).unwrap();
        assert_eq!(a.len(), 34);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.state, y.state);
            let t = trace_distance(&spec.center, &x.state).unwrap();
            assert!(t <= spec.epsilon + 1e-9);
            assert!((t - x.distance).abs() < 1e-12);
            assert!(x.state.validate().pass);
        }
        assert!(a.iter().filter(|p| p.on_surface).all(|p| (p.distance - 0.05).abs() < 1e-12));
    }

    #[test]
    fn tiny_radius_collapses_onto_center() {
        let spec = BallSpec::new(werner(0.9).unwrap(), 1e-12, 10, 3).unwrap();
        for pt in sample_ball(&spec).unwrap() {
            assert!((pt.state.matrix() - spec.center.matrix()).norm() < 1e-11);
        }
    }

    #[test]
    fn ball_spec_validation() {
        assert!(BallSpec::new(werner(0.9).unwrap(), 0.0, 10, 1).is_err());
        assert!(BallSpec::new(werner(0.9).unwrap(), 1e-3, 0, 1).is_err());
    }

    #[test]
    fn constants_examples() {
        let c = ball_constants(&BallSpec::new(werner(0.95).unwrap(), 1e-4, 40, 1).unwrap()).unwrap();
        assert!(c.r > 0.0 && c.r <= 1.0 && c.delta.is_finite());
        assert!((c.delta - c.ec_max_upper * (1.0 - c.r) / c.r).abs() < 1e-12);
        let c = ball_constants(&BallSpec::new(phi_plus_state(), 1e-3, 40, 2).unwrap()).unwrap();
        assert!(c.ed_min_lower > 0.98);
        let wide = BallSpec::new(werner(0.95).unwrap(), 0.5, 40, 3).unwrap();
        assert!(matches!(ball_constants(&wide), Err(Error::BallNotCertified { .. })));
        let sep = BallSpec::new(werner(0.2).unwrap(), 1e-3, 5, 4).unwrap();
        assert!(matches!(ball_constants(&sep), Err(Error::NotCertified(_))));
    }

    #[test]
    fn conservative_mode_widens_the_extrema() {
        let spec = BallSpec::new(werner(0.9).unwrap(), 1e-3, 40, 5).unwrap();
        let points = sample_ball(&spec).unwrap();
        let s = StandardSurrogates::default();
        let (sampled, _) = ball_constants_from(&s, &spec.center, spec.epsilon, &points, ExtremaMode::Sampled).unwrap();
        let (wide, _) =
            ball_constants_from(&s, &spec.center, spec.epsilon, &points, ExtremaMode::Conservative).unwrap();
        assert!(wide.ed_min_lower <= sampled.ed_min_lower && wide.ec_max_upper >= sampled.ec_max_upper);
        assert!(wide.delta >= sampled.delta);
    }

    #[test]
    fn reversible_ball_has_zero_delta() {
        let c = BallConstants::from_extrema(0.7, 0.7).unwrap();
        assert!(c.reversible && c.delta == 0.0 && c.r == 1.0);
        assert_eq!(kappa(0.3, c.r).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_bound_examples() {
        let spec = BallSpec::new(werner(0.9).unwrap(), 1e-3, 20, 6).unwrap();
        let c = ball_constants(&spec).unwrap();
        let pts = sample_ball(&spec).unwrap();
        let surface = &pts.iter().find(|p| p.on_surface).unwrap().state;
        assert_eq!(lipschitz_bound(&spec.center, &spec.center, &c, 1e-3).unwrap(), 0.0);
        assert!((lipschitz_bound(&spec.center, surface, &c, 1e-3).unwrap() - c.delta).abs() < 1e-9 * c.delta.max(1.0));
        let b = |p: f64| lipschitz_bound(&spec.center, &mix(&spec.center, surface, p).unwrap(), &c, 1e-3).unwrap();
        assert!((b(0.5) - 0.5 * b(1.0)).abs() < 1e-9);
        assert!((b(0.2) - 0.2 * b(1.0)).abs() < 1e-9);
        let far = werner(0.5).unwrap();
        assert!(matches!(lipschitz_bound(&spec.center, &far, &c, 1e-3), Err(Error::OutsideBall { .. })));
    }

    struct HalvedCost(StandardSurrogates);

    impl Surrogates for HalvedCost {
        fn ed_lower(&self, rho: &DensityMatrix) -> MeasureValue {
            self.0.ed_lower(rho)
        }
        fn ec_upper(&self, rho: &DensityMatrix) -> MeasureValue {
            let mut v = self.0.ec_upper(rho);
            v.value *= 0.5;
            v
        }
    }

    #[test]
    fn corridor_passes_and_negative_control_fails() {
        let spec = BallSpec::new(werner(0.9).unwrap(), 1e-3, 30, 8).unwrap();
        let pts = sample_ball(&spec).unwrap();
        let c = ball_constants(&spec).unwrap();
        let sigma = &pts.iter().find(|p| p.on_surface).unwrap().state;
        let grid = unit_grid(20);
        let report = corridor_consistency_check(&spec.center, sigma, &c, &grid).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.skipped_back, 0);
        // at p = 0 both checks are the plain sandwich
        let r0 = &report.rows[0];
        assert_eq!(r0.kappa, 0.0);
        assert_eq!(r0.forth_lhs, measures::ed_lower(&spec.center).value);
        let bad = corridor_consistency_check_with(
            &HalvedCost(StandardSurrogates::default()),
            &spec.center,
            sigma,
            &c,
            &grid,
            CORRIDOR_SLACK,
        )
        .unwrap();
        assert!(!bad.pass && bad.violations > 0);
    }

    #[test]
    fn corridor_affine_distance_identity() {
        let spec = BallSpec::new(werner(0.95).unwrap(), 1e-3, 10, 9).unwrap();
        let pts = sample_ball(&spec).unwrap();
        let c = ball_constants(&spec).unwrap();
        let sigma = &pts.iter().find(|p| p.on_surface).unwrap().state;
        let report = corridor_consistency_check(&spec.center, sigma, &c, &unit_grid(11)).unwrap();
        for row in &report.rows {
            assert!((row.distance - row.p * report.surface_distance).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_shrinks_with_the_radius() {
        let center = werner(0.95).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 3e-3, 1e-3, 3e-4, 1e-4] {
            let c = ball_constants(&BallSpec::new(center.clone(), eps, 50, 10).unwrap()).unwrap();
            assert!(c.delta <= last + 1e-6, "eps {eps}: {} > {last}", c.delta);
            last = c.delta;
        }
    }

    #[test]
    fn werner_border() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let rows = border_scan_2x2(&WernerPath, &grid).unwrap();
        for row in &rows {
            if row.param <= 1.0 / 3.0 {
                assert_eq!((row.eof, row.log_neg), (0.0, 0.0));
                assert!(row.ppt_margin >= -1e-9);
            } else {
                assert!(row.eof > 0.0 && row.log_neg > 0.0 && row.ppt_margin < 0.0);
            }
        }
        let near = border_scan_2x2(&WernerPath, &[1.0 / 3.0 + 1e-4]).unwrap()[0];
        assert!(near.eof <= 1e-3 && near.log_neg <= 1e-3 && near.eof > 0.0);
        assert!(border_scan_2x2(&Isotropic2x3Path, &[0.5]).is_err());
    }

    #[test]
    fn isotropic_2x3_border() {
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let rows = border_scan_2xn(&Isotropic2x3Path, &grid, None).unwrap();
        for row in rows {
            assert_eq!(row.log_neg == 0.0, row.ppt_margin >= -1e-9);
            assert_eq!(row.ppt_margin < -1e-9, row.param > 0.25);
        }
        let with_eof =
            border_scan_2xn(&Isotropic2x3Path, &[0.1], Some(&EofSearch { budget: 200, ..Default::default() })).unwrap();
        assert!(with_eof[0].eof_upper.is_some());
    }
}
