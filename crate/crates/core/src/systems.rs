//! Finite prefixes of inverse systems on `[-1, 1]`, and their rewiring into
//! systems whose bonding maps have no negative radial departures.

use std::fmt;

use crate::bridging::{build_bridged_s, verify_bridged, BridgeReport, BridgedFactor};
use crate::contour::{find_radial_departure, radial_contour_factor, Orientation, RadialDeparture};
use crate::error::{Error, Result};
use crate::plmap::PointedMap;
use crate::scalar::Scalar;

/// Bonding maps `f₁, …, f_N`, where `fₙ` maps level `n + 1` to level `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemPrefix<T: Scalar> {
    maps: Vec<PointedMap<T>>,
}

impl<T: Scalar> SystemPrefix<T> {
    pub fn new(maps: Vec<PointedMap<T>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Domain("a system prefix needs at least one map".into()));
        }
        Ok(SystemPrefix { maps })
    }

    pub fn maps(&self) -> &[PointedMap<T>] {
        &self.maps
    }

    pub fn into_maps(self) -> Vec<PointedMap<T>> {
        self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `fₙ`, 1-based.
    pub fn get(&self, n: usize) -> Option<&PointedMap<T>> {
        n.checked_sub(1).and_then(|i| self.maps.get(i))
    }

    /// `f^m_n = fₙ ∘ fₙ₊₁ ∘ ⋯ ∘ f_{m−1}` for `1 ≤ n < m ≤ N + 1`.
    pub fn composite(&self, n: usize, m: usize) -> Result<PointedMap<T>> {
        if n == 0 || n >= m || m > self.len() + 1 {
            return Err(Error::Domain(format!("no composite f^{m}_{n} in a prefix of {} maps", self.len())));
        }
        let mut acc = self.maps[n - 1].clone();
        for f in &self.maps[n..m - 1] {
            acc = acc.compose(f)?;
        }
        Ok(acc)
    }
}

/// Composes blocks of bonding maps between consecutive cut levels.
pub fn compose_schedule<T: Scalar>(p: &SystemPrefix<T>, cuts: &[usize]) -> Result<SystemPrefix<T>> {
    if cuts.first() != Some(&1) {
        return Err(Error::Domain("a schedule starts at level 1".into()));
    }
    if cuts.len() < 2 {
        return Err(Error::Domain("a schedule needs at least two levels".into()));
    }
    if let Some(w) = cuts.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("schedule is not increasing at {} → {}", w[0], w[1])));
    }
    let last = *cuts.last().expect("nonempty");
    if last > p.len() + 1 {
        return Err(Error::Domain(format!("level {last} is beyond the prefix ({} maps)", p.len())));
    }
    let maps = cuts.windows(2).map(|w| p.composite(w[0], w[1])).collect::<Result<Vec<_>>>()?;
    SystemPrefix::new(maps)
}

/// Removes the maps below level `n0`.
pub fn drop_prefix<T: Scalar>(p: &SystemPrefix<T>, n0: usize) -> Result<SystemPrefix<T>> {
    if n0 == 0 || n0 > p.len() {
        return Err(Error::Domain(format!("cannot drop to level {n0} of a prefix of {} maps", p.len())));
    }
    SystemPrefix::new(p.maps[n0 - 1..].to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainVerdict {
    Holds,
    /// `t_{fₙ} ≠ t_{fₙ∘fₙ₊₁}` at this `n`.
    FailsAt(usize),
    /// `fₙ` or `fₙ ∘ fₙ₊₁` is constant on one side.
    DegenerateAt(usize),
}

impl ChainVerdict {
    pub fn holds(self) -> bool {
        self == ChainVerdict::Holds
    }
}

/// Whether `fₙ` and `fₙ ∘ fₙ₊₁` share a radial contour factor for every `n < N`.
pub fn check_same_contour_chain<T: Scalar>(p: &SystemPrefix<T>) -> ChainVerdict {
    for n in 1..p.len() {
        let f = &p.maps[n - 1];
        let both = match f.compose(&p.maps[n]) {
            Ok(c) => c,
            Err(_) => return ChainVerdict::DegenerateAt(n),
        };
        match (radial_contour_factor(f), radial_contour_factor(&both)) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => return ChainVerdict::FailsAt(n),
            _ => return ChainVerdict::DegenerateAt(n),
        }
    }
    ChainVerdict::Holds
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrientationClass {
    None,
    PositiveOnly,
    NegativeOnly,
    Both,
}

impl OrientationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrientationClass::None => "none",
            OrientationClass::PositiveOnly => "positive-only",
            OrientationClass::NegativeOnly => "negative-only",
            OrientationClass::Both => "both",
        }
    }
}

impl fmt::Display for OrientationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapOrientations<T: Scalar> {
    pub positive: Option<RadialDeparture<T>>,
    pub negative: Option<RadialDeparture<T>>,
}

impl<T: Scalar> MapOrientations<T> {
    pub fn of(f: &PointedMap<T>) -> Self {
        MapOrientations {
            positive: find_radial_departure(f.map(), Orientation::Positive),
            negative: find_radial_departure(f.map(), Orientation::Negative),
        }
    }

    pub fn class(&self) -> OrientationClass {
        match (self.positive.is_some(), self.negative.is_some()) {
            (false, false) => OrientationClass::None,
            (true, false) => OrientationClass::PositiveOnly,
            (false, true) => OrientationClass::NegativeOnly,
            (true, true) => OrientationClass::Both,
        }
    }
}

/// Orientations of radial departures of each map; the certificate holds when
/// no map mixes both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagReport<T: Scalar> {
    pub per_map: Vec<MapOrientations<T>>,
}

impl<T: Scalar> ZigzagReport<T> {
    pub fn certificate(&self) -> bool {
        self.per_map.iter().all(|m| m.class() != OrientationClass::Both)
    }
}

pub fn check_zigzag_free<T: Scalar>(p: &SystemPrefix<T>) -> ZigzagReport<T> {
    ZigzagReport { per_map: p.maps.iter().map(MapOrientations::of).collect() }
}

/// One bridging step of a rewire: the factors for odd `n` and the rewired map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewireStep<T: Scalar> {
    /// The odd level `n`.
    pub level: usize,
    pub bridged: BridgedFactor<T>,
    pub report: BridgeReport,
    /// `s̃ₙ ∘ tₙ₊₂`.
    pub rewired: PointedMap<T>,
    pub orientations: MapOrientations<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewireResult<T: Scalar> {
    pub original: SystemPrefix<T>,
    pub rewired: SystemPrefix<T>,
    pub steps: Vec<RewireStep<T>>,
    /// Levels of the original prefix that no bridging step consumed.
    pub unused_levels: Vec<usize>,
}

impl<T: Scalar> RewireResult<T> {
    /// `(tₙ, s̃ₙ)` for each odd `n`.
    pub fn factors(&self) -> Vec<(&PointedMap<T>, &PointedMap<T>)> {
        self.steps.iter().map(|s| (&s.bridged.t1, &s.bridged.s_tilde)).collect()
    }

    pub fn certificates_pass(&self) -> bool {
        self.steps.iter().all(|s| s.report.passed() && s.orientations.negative.is_none())
    }

    /// Human-readable form of the coordinate homeomorphism.
    pub fn coordinate_map(&self) -> CoordinateMapDescription {
        CoordinateMapDescription { levels: self.steps.iter().map(|s| s.level).collect() }
    }
}

/// `h(⟨xₙ⟩) = ⟨s̃_{2k−1}(x_{2k+1})⟩ₖ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMapDescription {
    pub levels: Vec<usize>,
}

impl fmt::Display for CoordinateMapDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, n) in self.levels.iter().enumerate() {
            writeln!(f, "y_{} = s~_{n}(x_{})", k + 1, n + 2)?;
        }
        Ok(())
    }
}

fn rewire_step<T: Scalar>(p: &SystemPrefix<T>, n: usize) -> Result<RewireStep<T>> {
    let (f1, f2, f3) = (&p.maps[n - 1], &p.maps[n], &p.maps[n + 1]);
    let bridged = build_bridged_s(f1, f2, f3).map_err(|e| match e {
        Error::Hypothesis(m) => Error::Hypothesis(format!("at level {n}: {m}")),
        Error::InvariantViolation(m) => Error::InvariantViolation(format!("at level {n}: {m}")),
        other => other,
    })?;
    let report = verify_bridged(&bridged, &bridged.t1, &bridged.f1f2, &bridged.t3);
    let rewired = bridged.s_tilde.compose(&bridged.t3)?;
    let orientations = MapOrientations::of(&rewired);
    Ok(RewireStep { level: n, bridged, report, rewired, orientations })
}

/// Rewires `p` via the bridged factors at every odd level, using up to `jobs` threads.
pub fn rewire_with_jobs<T: Scalar + Send + Sync>(p: &SystemPrefix<T>, jobs: usize) -> Result<RewireResult<T>> {
    if p.len() < 3 {
        return Err(Error::Precondition(format!("rewiring needs at least 3 maps, got {}", p.len())));
    }
    match check_same_contour_chain(p) {
        ChainVerdict::Holds => {}
        ChainVerdict::FailsAt(n) => {
            return Err(Error::Hypothesis(format!("t_(f{n}) ≠ t_(f{n}∘f{}) at index {n}", n + 1)))
        }
        ChainVerdict::DegenerateAt(n) => return Err(Error::DegenerateSide(if n % 2 == 1 { "odd-level" } else { "even-level" })),
    }
    let levels: Vec<usize> = (1..=p.len()).step_by(2).filter(|n| n + 2 <= p.len()).collect();
    let jobs = jobs.max(1).min(levels.len());
    let steps: Vec<Result<RewireStep<T>>> = if jobs <= 1 {
        levels.iter().map(|&n| rewire_step(p, n)).collect()
    } else {
        let mut slots: Vec<Option<Result<RewireStep<T>>>> = (0..levels.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            for (chunk_slots, chunk_levels) in slots.chunks_mut(levels.len().div_ceil(jobs)).zip(levels.chunks(levels.len().div_ceil(jobs))) {
                scope.spawn(move || {
                    for (slot, &n) in chunk_slots.iter_mut().zip(chunk_levels) {
                        *slot = Some(rewire_step(p, n));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.expect("every slot filled")).collect()
    };
    let steps = steps.into_iter().collect::<Result<Vec<_>>>()?;
    let last_used = levels.last().map_or(0, |n| n + 2);
    let unused_levels = (last_used + 1..=p.len()).collect();
    let rewired = SystemPrefix::new(steps.iter().map(|s| s.rewired.clone()).collect())?;
    Ok(RewireResult { original: p.clone(), rewired, steps, unused_levels })
}

pub fn rewire<T: Scalar + Send + Sync>(p: &SystemPrefix<T>) -> Result<RewireResult<T>> {
    rewire_with_jobs(p, 1)
}

/// Checks `fₙ(xₙ₊₁) = xₙ` for every level where both coordinates are given.
pub fn check_thread<T: Scalar>(maps: &[PointedMap<T>], x: &[T]) -> Result<()> {
    for (n, f) in maps.iter().enumerate() {
        let (Some(lo), Some(hi)) = (x.get(n), x.get(n + 1)) else { break };
        let img = f.at(hi);
        if img != *lo {
            return Err(Error::Thread {
                level: n + 1,
                msg: format!("f{}({hi}) = {img} ≠ x{} = {lo}", n + 1, n + 1),
            });
        }
    }
    Ok(())
}

/// Image of a thread prefix under `h(⟨xₙ⟩) = ⟨s̃_{2k−1}(x_{2k+1})⟩ₖ`, checked
/// to be a thread of the rewired system.
pub fn coordinate_map_h<T: Scalar>(r: &RewireResult<T>, x: &[T]) -> Result<Vec<T>> {
    check_thread(r.original.maps(), x)?;
    let out: Vec<T> = r
        .steps
        .iter()
        .filter_map(|s| x.get(s.level + 1).map(|xn| s.bridged.s_tilde.at(xn)))
        .collect();
    check_thread(r.rewired.maps(), &out).map_err(|e| match e {
        Error::Thread { level, msg } => {
            Error::InvariantViolation(format!("image is not a thread of the rewired system at level {level}: {msg}"))
        }
        other => other,
    })?;
    Ok(out)
}
