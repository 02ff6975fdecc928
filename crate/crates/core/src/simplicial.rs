//! Simplicial inverse systems of arcs: vertex sets `Sₙ`, normalization of a
//! thread to the zero thread, and the pigeonhole schedule that feeds
//! [`crate::systems::rewire`].

use std::collections::BTreeMap;
use std::fmt;

use crate::contour::radial_contour_factor;
use crate::error::{Error, Result};
use crate::plmap::{PlMap, PointedMap};
use crate::scalar::Scalar;
use crate::systems::{check_thread, compose_schedule, rewire_with_jobs, RewireResult, SystemPrefix};

/// Bonding maps `f₁, …, f_N` with vertex sets `S₁, …, S_{N+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialSystem<T: Scalar> {
    maps: Vec<PlMap<T>>,
    sets: Vec<Vec<T>>,
}

impl<T: Scalar> SimplicialSystem<T> {
    /// Sets are sorted and deduplicated; there must be one more set than maps.
    pub fn new(maps: Vec<PlMap<T>>, sets: Vec<Vec<T>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Domain("a simplicial system needs at least one map".into()));
        }
        if sets.len() != maps.len() + 1 {
            return Err(Error::Domain(format!("{} maps need {} vertex sets, got {}", maps.len(), maps.len() + 1, sets.len())));
        }
        let unit = (-T::one(), T::one());
        for (n, f) in maps.iter().enumerate() {
            let (a, b) = f.domain();
            if (a, b) != (&unit.0, &unit.1) {
                return Err(Error::Domain(format!("f{} is not defined on [-1, 1]", n + 1)));
            }
        }
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort();
                s.dedup();
                s
            })
            .collect();
        Ok(SimplicialSystem { maps, sets })
    }

    pub fn maps(&self) -> &[PlMap<T>] {
        &self.maps
    }

    pub fn sets(&self) -> &[Vec<T>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `Sₙ`, 1-based.
    pub fn set(&self, n: usize) -> &[T] {
        &self.sets[n - 1]
    }

    /// The bonding maps as a pointed prefix; fails unless every map fixes 0.
    pub fn pointed_prefix(&self) -> Result<SystemPrefix<T>> {
        let maps = self.maps.iter().cloned().map(PointedMap::new).collect::<Result<Vec<_>>>()?;
        SystemPrefix::new(maps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// `-1` or `1` is missing from `Sₙ`.
    MissingEndpoint,
    /// Some vertex of `Sₙ₊₁` is sent outside `Sₙ`.
    VertexImage,
    /// `fₙ` bends inside a component of `[-1, 1] ∖ Sₙ₊₁` without being constant there.
    NotLinear,
    /// `fₙ` is linear on a component but its image meets `Sₙ`.
    ImageMeetsSet,
}

impl Clause {
    pub fn as_str(self) -> &'static str {
        match self {
            Clause::MissingEndpoint => "-1 and 1 belong to S_n",
            Clause::VertexImage => "f_n(S_{n+1}) ⊆ S_n",
            Clause::NotLinear => "f_n constant or linear on each component",
            Clause::ImageMeetsSet => "f_n(I) ∩ S_n = ∅",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialFailure<T> {
    pub level: usize,
    /// The offending component `(u, v)`, or the offending point as `(x, x)`.
    pub component: (T, T),
    pub clause: Clause,
}

impl<T: Scalar> fmt::Display for SimplicialFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, v) = &self.component;
        if u == v {
            write!(f, "level {}: at {u}: {}", self.level, self.clause.as_str())
        } else {
            write!(f, "level {}: on ({u}, {v}): {}", self.level, self.clause.as_str())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialReport<T> {
    pub failures: Vec<SimplicialFailure<T>>,
}

impl<T> SimplicialReport<T> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn contains<T: Ord>(set: &[T], x: &T) -> bool {
    set.binary_search(x).is_ok()
}

/// Checks both defining conditions at every level.
pub fn check_simplicial<T: Scalar>(sys: &SimplicialSystem<T>) -> SimplicialReport<T> {
    let mut failures = Vec::new();
    let (lo, hi) = (-T::one(), T::one());
    for (i, s) in sys.sets.iter().enumerate() {
        for e in [&lo, &hi] {
            if !contains(s, e) {
                failures.push(SimplicialFailure { level: i + 1, component: (e.clone(), e.clone()), clause: Clause::MissingEndpoint });
            }
        }
    }
    for (i, f) in sys.maps.iter().enumerate() {
        let level = i + 1;
        let (below, above) = (&sys.sets[i], &sys.sets[i + 1]);
        let f = f.canonicalize();
        for x in above {
            if !contains(below, &f.at(x)) {
                failures.push(SimplicialFailure { level, component: (x.clone(), x.clone()), clause: Clause::VertexImage });
            }
        }
        for w in above.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            if f.is_constant_on(u, v) {
                continue;
            }
            if !f.breakpoints_between(u, v).is_empty() {
                failures.push(SimplicialFailure { level, component: (u.clone(), v.clone()), clause: Clause::NotLinear });
                continue;
            }
            let (a, b) = (f.at(u), f.at(v));
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            let start = below.partition_point(|y| *y <= a);
            if below.get(start).is_some_and(|y| *y < b) {
                failures.push(SimplicialFailure { level, component: (u.clone(), v.clone()), clause: Clause::ImageMeetsSet });
            }
        }
    }
    SimplicialReport { failures }
}

/// The single-bonding-map system `⟨[-1, 1], f⟩` with `Sₙ₊₁ = f⁻¹(Sₙ) ∪ {breakpoints of f}`.
pub fn markov_refine<T: Scalar>(f: &PlMap<T>, s1: &[T], depth: usize) -> Result<SimplicialSystem<T>> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let (lo, hi) = (-T::one(), T::one());
    if f.domain() != (&lo, &hi) {
        return Err(Error::Domain("the bonding map is not defined on [-1, 1]".into()));
    }
    let f = f.canonicalize();
    let mut first: Vec<T> = s1.to_vec();
    first.sort();
    first.dedup();
    let mut required: Vec<T> = vec![lo.clone(), hi.clone()];
    required.extend(f.points().iter().map(|p| p.1.clone()));
    required.sort();
    required.dedup();
    let missing: Vec<String> = required.iter().filter(|y| !contains(&first, y)).map(|y| y.to_string()).collect();
    if !missing.is_empty() {
        return Err(Error::Precondition(format!("S_1 must contain ±1 and the breakpoint values; missing {}", missing.join(", "))));
    }
    let mut sets = vec![first];
    for _ in 0..depth {
        let prev = sets.last().expect("nonempty");
        let mut next: Vec<T> = f.xs().cloned().collect();
        for y in prev {
            next.extend(f.preimages(y, &lo, &hi));
        }
        next.sort();
        next.dedup();
        sets.push(next);
    }
    let sys = SimplicialSystem::new(vec![f; depth], sets)?;
    let report = check_simplicial(&sys);
    if let Some(fail) = report.failures.first() {
        return Err(Error::InvariantViolation(format!("refined system is not simplicial: {fail}")));
    }
    Ok(sys)
}

/// Ways a thread or system can fall outside the rewiring argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Some coordinate is `±1`; the point is an endpoint.
    Endpoint { level: usize },
    /// Every `Sₙ` is `{-1, 1}`; the limit is an arc or a point.
    ArcOrPoint,
    /// A composite is constant on one side, so no map has radial departures.
    ConstantSide { from: usize, to: usize, side: &'static str },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Endpoint { level } => write!(f, "endpoint: x_{level} = ±1, so the point is an endpoint of the limit"),
            Verdict::ArcOrPoint => write!(f, "arc-or-point: every S_n is {{-1, 1}}"),
            Verdict::ConstantSide { from, to, side } => {
                write!(f, "constant-side: f^{to}_{from} is constant on the {side} side, so there are no radial departures")
            }
        }
    }
}

/// The homeomorphisms `hₙ` of a normalization, one per level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationMaps<T: Scalar> {
    pub h: Vec<PlMap<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized<T: Scalar> {
    System { sys: SimplicialSystem<T>, h: NormalizationMaps<T> },
    Verdict(Verdict),
}

fn even_steps<T: Scalar>(from: &T, to: &T, count: usize) -> Vec<T> {
    // `count` points starting at `from`, evenly spaced, stopping one step short of `to`.
    let step = (to.clone() - from.clone()) / T::int(count as i64);
    (0..count).map(|j| from.clone() + step.clone() * T::int(j as i64)).collect()
}

/// The canonical `hₙ` for vertex set `s` and coordinate `x`.
fn canonical_h<T: Scalar>(s: &[T], x: &T, level: usize) -> Result<PlMap<T>> {
    let (lo, hi) = (-T::one(), T::one());
    let zero = T::zero();
    let mut pts: Vec<(T, T)> = Vec::with_capacity(s.len() + 1);
    if contains(s, x) {
        let left: Vec<&T> = s.iter().filter(|v| *v < x).collect();
        let right: Vec<&T> = s.iter().filter(|v| *v > x).collect();
        for (v, img) in left.iter().zip(even_steps(&lo, &zero, left.len())) {
            pts.push(((*v).clone(), img));
        }
        pts.push((x.clone(), zero.clone()));
        let r = right.len() as i64;
        for (k, v) in right.iter().enumerate() {
            pts.push(((*v).clone(), T::frac(k as i64 + 1, r)));
        }
    } else {
        let k = s.partition_point(|v| v < x);
        let (p, q) = (&s[k - 1], &s[k]);
        let (a, b) = (k, s.len() - k);
        let scale = if p == &lo && q == &hi {
            if !x.is_zero() {
                return Err(Error::Precondition(format!(
                    "level {level}: S_n = {{-1, 1}} forces h_n to be the identity, which does not send x_n = {x} to 0"
                )));
            }
            T::one()
        } else if p == &lo {
            T::one() / (x.clone() + T::one())
        } else if q == &hi {
            T::one() / (T::one() - x.clone())
        } else {
            let cl = T::one() / (T::int(a as i64) * (x.clone() - p.clone()));
            let cr = T::one() / (T::int(b as i64) * (q.clone() - x.clone()));
            cl.min(cr)
        };
        let hp = -(scale.clone() * (x.clone() - p.clone()));
        let hq = scale * (q.clone() - x.clone());
        if hp < lo || hq > hi {
            return Err(Error::Precondition(format!(
                "level {level}: no homeomorphism linear on ({p}, {q}) sends -1 and 1 to themselves and x_n = {x} to 0"
            )));
        }
        for (v, img) in s[..k - 1].iter().zip(even_steps(&lo, &hp, a - 1)) {
            pts.push((v.clone(), img));
        }
        pts.push((p.clone(), hp));
        pts.push((x.clone(), zero.clone()));
        pts.push((q.clone(), hq.clone()));
        let rest = &s[k + 1..];
        let step = (hi.clone() - hq.clone()) / T::int(rest.len().max(1) as i64);
        for (j, v) in rest.iter().enumerate() {
            pts.push((v.clone(), hq.clone() + step.clone() * T::int(j as i64 + 1)));
        }
    }
    let h = PlMap::new(pts)?;
    if !h.is_injective_on(&lo, &hi) {
        return Err(Error::Precondition(format!("level {level}: no increasing h_n exists for x_n = {x}")));
    }
    Ok(h)
}

/// Conjugates the system so that the thread `x` becomes the zero thread.
pub fn normalize_point<T: Scalar>(sys: &SimplicialSystem<T>, x: &[T]) -> Result<Normalized<T>> {
    if x.len() != sys.sets.len() {
        return Err(Error::Domain(format!("a thread of this system has {} coordinates, got {}", sys.sets.len(), x.len())));
    }
    check_thread_plain(&sys.maps, x)?;
    let (lo, hi) = (-T::one(), T::one());
    if let Some(n) = x.iter().position(|v| *v == lo || *v == hi) {
        return Ok(Normalized::Verdict(Verdict::Endpoint { level: n + 1 }));
    }
    if sys.sets.iter().all(|s| s.len() == 2) {
        return Ok(Normalized::Verdict(Verdict::ArcOrPoint));
    }
    let h = sys
        .sets
        .iter()
        .zip(x)
        .enumerate()
        .map(|(n, (s, xn))| canonical_h(s, xn, n + 1))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = Vec::with_capacity(sys.maps.len());
    for (n, f) in sys.maps.iter().enumerate() {
        let conj = h[n].compose(f)?.compose(&h[n + 1].inverse()?)?.canonicalize();
        if conj.compose(&h[n + 1])? != h[n].compose(f)? {
            return Err(Error::InvariantViolation(format!("f'_{0} ∘ h_{1} ≠ h_{0} ∘ f_{0}", n + 1, n + 2)));
        }
        maps.push(conj);
    }
    let sets = sys.sets.iter().zip(&h).map(|(s, hn)| s.iter().map(|v| hn.at(v)).collect()).collect();
    let out = SimplicialSystem::new(maps, sets)?;
    if let Some(fail) = check_simplicial(&out).failures.first() {
        return Err(Error::InvariantViolation(format!("normalized system is not simplicial: {fail}")));
    }
    let image: Vec<T> = x.iter().zip(&h).map(|(v, hn)| hn.at(v)).collect();
    if let Some(n) = image.iter().position(|v| !v.is_zero()) {
        return Err(Error::InvariantViolation(format!("h_{0}(x_{0}) = {1} ≠ 0", n + 1, image[n])));
    }
    Ok(Normalized::System { sys: out, h: NormalizationMaps { h } })
}

fn check_thread_plain<T: Scalar>(maps: &[PlMap<T>], x: &[T]) -> Result<()> {
    for (n, f) in maps.iter().enumerate() {
        let img = f.at(&x[n + 1]);
        if img != x[n] {
            return Err(Error::Thread { level: n + 1, msg: format!("f{}({}) = {img} ≠ x{} = {}", n + 1, x[n + 1], n + 1, x[n]) });
        }
    }
    Ok(())
}

/// Levels `n₁ = 1 < n₂ < ⋯ < n_K` and the radial contour factor `t_{F_k}` of each block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule<T: Scalar> {
    pub indices: Vec<usize>,
    pub keys: Vec<PointedMap<T>>,
    /// Per stage, the number of candidate composites seen for each distinct key.
    pub census: Vec<Vec<usize>>,
}

impl<T: Scalar> Schedule<T> {
    /// `t_{F_k} = t_{F_k ∘ F_{k+1}}` for every consecutive pair, recomputed from scratch.
    pub fn verify(&self, p: &SystemPrefix<T>) -> Result<()> {
        let blocks = compose_schedule(p, &self.indices)?;
        for (k, w) in blocks.maps().windows(2).enumerate() {
            let single = radial_contour_factor(&w[0])?;
            let double = radial_contour_factor(&w[0].compose(&w[1])?)?;
            if single != double {
                return Err(Error::InvariantViolation(format!("t(F_{0}) ≠ t(F_{0} ∘ F_{1})", k + 1, k + 2)));
            }
            if single != self.keys[k] {
                return Err(Error::InvariantViolation(format!("recorded key of stage {} is stale", k + 1)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scheduled<T: Scalar> {
    Schedule(Schedule<T>),
    Verdict(Verdict),
}

fn census_string<T: Scalar>(groups: &BTreeMap<PlMap<T>, Vec<usize>>) -> String {
    let parts: Vec<String> = groups
        .iter()
        .map(|(key, ms)| {
            let ms: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
            format!("key {} ← m ∈ {{{}}}", key, ms.join(", "))
        })
        .collect();
    format!("{} distinct keys: {}", groups.len(), parts.join("; "))
}

/// Pigeonhole selection of cut levels within the prefix. Each stage looks at
/// most `budget` levels past the current cut.
pub fn find_schedule<T: Scalar + Send + Sync>(sys: &SimplicialSystem<T>, budget: usize) -> Result<Scheduled<T>> {
    find_schedule_with_jobs(sys, budget, 1)
}

pub fn find_schedule_with_jobs<T: Scalar + Send + Sync>(
    sys: &SimplicialSystem<T>,
    budget: usize,
    jobs: usize,
) -> Result<Scheduled<T>> {
    if budget == 0 {
        return Err(Error::Domain("budget must be at least 1".into()));
    }
    let p = sys.pointed_prefix()?;
    check_thread(p.maps(), &vec![T::zero(); sys.sets.len()])?;
    let top = sys.len() + 1;
    let mut indices = vec![1usize];
    let mut keys: Vec<PointedMap<T>> = Vec::new();
    let mut census = Vec::new();
    let mut frontier: Vec<usize> = (2..=top).collect();
    loop {
        let nk = *indices.last().expect("nonempty");
        let stage = indices.len();
        let candidates: Vec<usize> = frontier.iter().copied().filter(|&m| m > nk && m <= nk + budget).collect();
        let truncated = frontier.iter().any(|&m| m > nk + budget);
        if candidates.is_empty() {
            break;
        }
        let composites = composites_from(&p, nk, &candidates, jobs)?;
        let mut groups: BTreeMap<PlMap<T>, Vec<usize>> = BTreeMap::new();
        for (m, f) in candidates.iter().zip(composites) {
            if !f.right_nonconstant() {
                return Ok(Scheduled::Verdict(Verdict::ConstantSide { from: nk, to: *m, side: "right" }));
            }
            if !f.left_nonconstant() {
                return Ok(Scheduled::Verdict(Verdict::ConstantSide { from: nk, to: *m, side: "left" }));
            }
            let key = radial_contour_factor(&f)?;
            let vertices = sys.set(nk);
            if let Some((_, v)) = key.map().points().iter().find(|(x, v)| !x.is_zero() && !contains(vertices, v)) {
                return Err(Error::InvariantViolation(format!("contour value {v} of f^{m}_{nk} is not in S_{nk}")));
            }
            groups.entry(key.into_map().canonicalize()).or_default().push(*m);
        }
        census.push(groups.values().map(Vec::len).collect());
        let chosen = groups.iter().filter(|(_, ms)| ms.len() >= 2).min_by_key(|(_, ms)| ms[0]);
        match chosen {
            Some((key, ms)) => {
                keys.push(PointedMap::new(key.clone())?);
                indices.push(ms[0]);
                frontier = ms.clone();
            }
            None if truncated => return Err(Error::Budget { stage, census: census_string(&groups) }),
            None => break,
        }
    }
    let schedule = Schedule { indices, keys, census };
    schedule.verify(&p)?;
    Ok(Scheduled::Schedule(schedule))
}

/// `f^m_n` for each candidate `m`, built incrementally.
fn composites_from<T: Scalar + Send + Sync>(
    p: &SystemPrefix<T>,
    n: usize,
    candidates: &[usize],
    jobs: usize,
) -> Result<Vec<PointedMap<T>>> {
    if jobs <= 1 || candidates.len() < 2 {
        let mut out = Vec::with_capacity(candidates.len());
        let mut acc = p.get(n).expect("level in range").clone();
        let mut reached = n + 1;
        for &m in candidates {
            while reached < m {
                acc = acc.compose(p.get(reached).expect("level in range"))?;
                reached += 1;
            }
            out.push(acc.clone());
        }
        return Ok(out);
    }
    let chunk = candidates.len().div_ceil(jobs);
    let results: Vec<Result<PointedMap<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .chunks(chunk)
            .map(|ms| scope.spawn(move || ms.iter().map(|&m| p.composite(n, m)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("composite worker panicked")).collect()
    });
    results.into_iter().collect()
}

/// What the end-to-end run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PipelineOutcome<T: Scalar> {
    Rewired { normalized: SimplicialSystem<T>, schedule: Schedule<T>, result: Box<RewireResult<T>> },
    Verdict(Verdict),
}

/// The stage a pipeline error came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Check,
    Normalize,
    Schedule,
    Compose,
    Rewire,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Check => "check",
            Stage::Normalize => "normalize",
            Stage::Schedule => "schedule",
            Stage::Compose => "compose",
            Stage::Rewire => "rewire",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage.as_str(), self.error)
    }
}

impl std::error::Error for PipelineError {}

/// Check, normalize at `x`, schedule, compose and rewire.
pub fn pipeline<T: Scalar + Send + Sync>(
    sys: &SimplicialSystem<T>,
    x: &[T],
    budget: usize,
    jobs: usize,
) -> std::result::Result<PipelineOutcome<T>, PipelineError> {
    let tag = |stage: Stage| move |error: Error| PipelineError { stage, error };
    if let Some(fail) = check_simplicial(sys).failures.first() {
        return Err(PipelineError { stage: Stage::Check, error: Error::Precondition(format!("not simplicial: {fail}")) });
    }
    let normalized = match normalize_point(sys, x).map_err(tag(Stage::Normalize))? {
        Normalized::Verdict(v) => return Ok(PipelineOutcome::Verdict(v)),
        Normalized::System { sys, .. } => sys,
    };
    let schedule = match find_schedule_with_jobs(&normalized, budget, jobs).map_err(tag(Stage::Schedule))? {
        Scheduled::Verdict(v) => return Ok(PipelineOutcome::Verdict(v)),
        Scheduled::Schedule(s) => s,
    };
    if schedule.indices.len() < 4 {
        return Err(PipelineError {
            stage: Stage::Schedule,
            error: Error::Budget {
                stage: schedule.indices.len(),
                census: format!("only {} cut levels {:?}; rewiring needs at least 4", schedule.indices.len(), schedule.indices),
            },
        });
    }
    let p = normalized.pointed_prefix().map_err(tag(Stage::Compose))?;
    let blocks = compose_schedule(&p, &schedule.indices).map_err(tag(Stage::Compose))?;
    let result = rewire_with_jobs(&blocks, jobs).map_err(tag(Stage::Rewire))?;
    Ok(PipelineOutcome::Rewired { normalized, schedule, result: Box::new(result) })
}
