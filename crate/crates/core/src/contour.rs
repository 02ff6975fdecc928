//! Departures, contour points, contour factors and radial departures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plmap::{PlMap, PointedMap};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    /// Orientation of a departure with value `v`; `None` for `v == 0`.
    pub fn of<T: Scalar>(v: &T) -> Option<Self> {
        if v.is_positive() {
            Some(Orientation::Positive)
        } else if v.is_negative() {
            Some(Orientation::Negative)
        } else {
            None
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Positive => "positive",
            Orientation::Negative => "negative",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// A maximal run of departures along consecutive linear pieces.
///
/// On the right the segment is `(near, far]` with `near < far`; on the left it
/// is `[far, near)` with `far < near`. `far` is always a breakpoint or an end
/// of the domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepartureSegment<T> {
    pub near: T,
    pub far: T,
    pub orientation: Orientation,
}

impl<T: Scalar> DepartureSegment<T> {
    pub fn contains(&self, x: &T) -> bool {
        if self.near < self.far {
            *x > self.near && *x <= self.far
        } else {
            *x >= self.far && *x < self.near
        }
    }

    fn mirrored(&self) -> Self {
        DepartureSegment { near: -self.near.clone(), far: -self.far.clone(), orientation: self.orientation }
    }
}

/// A contour point with its value. Index 0 of each side is the sentinel `0`,
/// which carries no orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContourPoint<T> {
    pub point: T,
    pub value: T,
    pub orientation: Option<Orientation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContourData<T> {
    /// `α₀ = 0 < α₁ < … < αₙ`.
    pub right: Vec<ContourPoint<T>>,
    /// `β₀ = 0 > β₁ > … > βₘ`.
    pub left: Vec<ContourPoint<T>>,
}

impl<T: Scalar> ContourData<T> {
    pub fn n(&self) -> usize {
        self.right.len() - 1
    }

    pub fn m(&self) -> usize {
        self.left.len() - 1
    }

    pub fn alpha(&self, i: usize) -> &T {
        &self.right[i].point
    }

    pub fn beta(&self, j: usize) -> &T {
        &self.left[j].point
    }

    pub fn side(&self, side: Side) -> &[ContourPoint<T>] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// One line per contour point (sentinels omitted): side, point, value, orientation.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (side, pts) in [(Side::Right, &self.right), (Side::Left, &self.left)] {
            for (i, p) in pts.iter().enumerate().skip(1) {
                let o = p.orientation.map(|o| o.as_str()).unwrap_or("none");
                out.push_str(&format!(
                    "{} {} {} {} {}\n",
                    side.as_str(),
                    i,
                    p.point.to_frac_string(),
                    p.value.to_frac_string(),
                    o
                ));
            }
        }
        out
    }
}

/// Departure segments of a map measured from the left end of its domain.
pub(crate) fn segments_from_start<T: Scalar>(g: &PlMap<T>) -> Vec<DepartureSegment<T>> {
    let pts = g.points();
    let mut hi = pts[0].1.clone();
    let mut lo = pts[0].1.clone();
    let mut out: Vec<DepartureSegment<T>> = Vec::new();
    for w in pts.windows(2) {
        let (x0, y0) = &w[0];
        let (x1, y1) = &w[1];
        let found = if *y1 > hi {
            let c = crossing(x0, y0, x1, y1, &hi);
            hi = y1.clone();
            Some((c, Orientation::Positive))
        } else if *y1 < lo {
            let c = crossing(x0, y0, x1, y1, &lo);
            lo = y1.clone();
            Some((c, Orientation::Negative))
        } else {
            None
        };
        if let Some((c, orientation)) = found {
            match out.last_mut() {
                Some(last) if last.far == c && last.orientation == orientation => last.far = x1.clone(),
                _ => out.push(DepartureSegment { near: c, far: x1.clone(), orientation }),
            }
        }
    }
    out
}

fn crossing<T: Scalar>(x0: &T, y0: &T, x1: &T, y1: &T, level: &T) -> T {
    if y0 == level {
        return x0.clone();
    }
    x0.clone() + (level.clone() - y0.clone()) * (x1.clone() - x0.clone()) / (y1.clone() - y0.clone())
}

fn right_part<T: Scalar>(f: &PointedMap<T>) -> PlMap<T> {
    f.map().restrict(&T::zero(), &T::one()).expect("pointed maps contain [0, 1]")
}

fn left_part_reflected<T: Scalar>(f: &PointedMap<T>) -> PlMap<T> {
    f.map().restrict(&-T::one(), &T::zero()).expect("pointed maps contain [-1, 0]").reflect()
}

fn side_nonconstant<T: Scalar>(f: &PointedMap<T>, side: Side) -> Result<()> {
    let ok = match side {
        Side::Left => f.left_nonconstant(),
        Side::Right => f.right_nonconstant(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DegenerateSide(side.as_str()))
    }
}

/// Maximal departure segments on one side, ordered away from 0.
pub fn departures<T: Scalar>(f: &PointedMap<T>, side: Side) -> Result<Vec<DepartureSegment<T>>> {
    side_nonconstant(f, side)?;
    Ok(match side {
        Side::Right => segments_from_start(&right_part(f)),
        Side::Left => segments_from_start(&left_part_reflected(f)).iter().map(|s| s.mirrored()).collect(),
    })
}

/// Whether `x ≠ 0` is a departure, and of which orientation.
pub fn departure_at<T: Scalar>(f: &PlMap<T>, x: &T) -> Option<Orientation> {
    let zero = T::zero();
    if x.is_zero() || !f.contains(x) {
        return None;
    }
    let v = f.at(x);
    let o = Orientation::of(&v)?;
    let (a, b) = if *x > zero { (zero, x.clone()) } else { (x.clone(), zero) };
    let mut prior = vec![f.at(if x.is_positive() { &a } else { &b })];
    prior.extend(f.points().iter().filter(|(p, _)| *p > a && *p < b).map(|(_, y)| y.clone()));
    let beats = match o {
        Orientation::Positive => prior.iter().all(|y| *y < v),
        Orientation::Negative => prior.iter().all(|y| *y > v),
    };
    beats.then_some(o)
}

fn contour_from_segments<T: Scalar>(
    g: &PlMap<T>,
    segs: &[DepartureSegment<T>],
    mirror: bool,
) -> Vec<ContourPoint<T>> {
    let mut out = vec![ContourPoint { point: T::zero(), value: T::zero(), orientation: None }];
    for (i, s) in segs.iter().enumerate() {
        let last_of_run = segs.get(i + 1).is_none_or(|n| n.orientation != s.orientation);
        if last_of_run {
            let value = g.at(&s.far);
            let point = if mirror { -s.far.clone() } else { s.far.clone() };
            out.push(ContourPoint { point, value, orientation: Some(s.orientation) });
        }
    }
    out
}

/// Contour points of one side, sentinel first.
pub fn contour_side<T: Scalar>(f: &PointedMap<T>, side: Side) -> Result<Vec<ContourPoint<T>>> {
    side_nonconstant(f, side)?;
    Ok(match side {
        Side::Right => {
            let g = right_part(f);
            contour_from_segments(&g, &segments_from_start(&g), false)
        }
        Side::Left => {
            let g = left_part_reflected(f);
            contour_from_segments(&g, &segments_from_start(&g), true)
        }
    })
}

pub fn contour_points<T: Scalar>(f: &PointedMap<T>) -> Result<ContourData<T>> {
    Ok(ContourData { right: contour_side(f, Side::Right)?, left: contour_side(f, Side::Left)? })
}

/// The radial contour factor `t_f`: the zig-zag through the contour values.
pub fn radial_contour_factor<T: Scalar>(f: &PointedMap<T>) -> Result<PointedMap<T>> {
    let c = contour_points(f)?;
    Ok(factor_from_contour(&c))
}

pub(crate) fn factor_from_contour<T: Scalar>(c: &ContourData<T>) -> PointedMap<T> {
    let n = c.n() as i64;
    let m = c.m() as i64;
    let mut pts: Vec<(T, T)> = Vec::with_capacity(c.right.len() + c.left.len());
    for j in (1..=m).rev() {
        pts.push((T::frac(-j, m), c.left[j as usize].value.clone()));
    }
    for i in 0..=n {
        pts.push((T::frac(i, n), c.right[i as usize].value.clone()));
    }
    let map = PlMap::new(pts).expect("contour values lie in [-1, 1]").canonicalize();
    PointedMap::new(map).expect("contour factor fixes 0")
}

/// One-sided minimal lift of `g` (domain `[0, b]`, `g(0) = 0`) through the
/// zig-zag with nodes `i/n ↦ vᵢ`.
fn lift_one_side<T: Scalar>(g: &PlMap<T>) -> Result<PlMap<T>> {
    let segs = segments_from_start(g);
    let contour = contour_from_segments(g, &segs, false);
    let n = contour.len() - 1;
    // Near end of the first segment of each run.
    let mut run_starts: Vec<T> = Vec::with_capacity(n);
    for (i, s) in segs.iter().enumerate() {
        if i == 0 || segs[i - 1].orientation != s.orientation {
            run_starts.push(s.near.clone());
        }
    }
    let (_, b) = g.domain();
    let mut taus: Vec<T> = vec![T::zero()];
    for k in 1..n {
        let target = &contour[k].value;
        let hits = g.preimages(target, &contour[k].point, &run_starts[k]);
        let tau = hits.last().cloned().ok_or_else(|| {
            Error::InvariantViolation(format!("no return to contour value {target} before the next run"))
        })?;
        taus.push(tau);
    }
    taus.push(b.clone());
    let nn = T::int(n as i64);
    let mut parts: Vec<PlMap<T>> = Vec::with_capacity(n);
    for k in 1..=n {
        let piece = g.restrict(&taus[k - 1], &taus[k])?;
        let v0 = contour[k - 1].value.clone();
        let v1 = contour[k].value.clone();
        let base = T::int(k as i64 - 1) / nn.clone();
        let pts = piece
            .points()
            .iter()
            .map(|(x, y)| {
                let u = (y.clone() - v0.clone()) / (v1.clone() - v0.clone());
                (x.clone(), base.clone() + u / nn.clone())
            })
            .collect();
        parts.push(PlMap::spanning(pts)?);
    }
    PlMap::concat(&parts)
}

/// The minimal sign-preserving `s` with `t_f ∘ s = f`.
pub fn meandering_lift<T: Scalar>(f: &PointedMap<T>) -> Result<PointedMap<T>> {
    let t = radial_contour_factor(f)?;
    let right = lift_one_side(&right_part(f))?;
    let left = lift_one_side(&left_part_reflected(f))?.reflect().negate_values();
    let s = PlMap::concat(&[left, right])?.recodomain(-T::one(), T::one())?;
    let s = PointedMap::new(s)?;
    let back = t.map().compose(s.map())?;
    if back != *f.map() {
        return Err(Error::InvariantViolation(format!("t_f ∘ s = {back} differs from f = {}", f.map())));
    }
    Ok(s)
}

/// A pair `⟨x1, x2⟩` with `x1 < 0 < x2` witnessing a radial departure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RadialDeparture<T> {
    pub x1: T,
    pub x2: T,
    pub orientation: Orientation,
}

/// Pointwise classification of `⟨x1, x2⟩` (no range checks beyond `x1 < 0 < x2`).
pub fn classify_pair<T: Scalar>(f: &PlMap<T>, x1: &T, x2: &T) -> Option<Orientation> {
    if !x1.is_negative() || !x2.is_positive() || !f.contains(x1) || !f.contains(x2) {
        return None;
    }
    let a = f.at(x1);
    let b = f.at(x2);
    let zero = T::zero();
    let inner = f
        .points()
        .iter()
        .filter(|(x, _)| x > x1 && x < x2)
        .map(|(_, y)| y)
        .cloned()
        .chain(std::iter::once(f.at(&zero)))
        .collect::<Vec<T>>();
    if a < b && inner.iter().all(|y| a < *y && *y < b) {
        Some(Orientation::Positive)
    } else if b < a && inner.iter().all(|y| b < *y && *y < a) {
        Some(Orientation::Negative)
    } else {
        None
    }
}

/// Classifies a specific pair as a radial departure.
pub fn radial_departure_through<T: Scalar>(f: &PointedMap<T>, x1: &T, x2: &T) -> Result<Option<Orientation>> {
    let one = T::one();
    if *x1 < -one.clone() || !x1.is_negative() || !x2.is_positive() || *x2 > one {
        return Err(Error::Domain(format!("⟨{x1}, {x2}⟩ needs -1 ≤ x1 < 0 < x2 ≤ 1")));
    }
    Ok(classify_pair(f.map(), x1, x2))
}

#[derive(Clone, Debug)]
struct Record<T> {
    x: T,
    y: T,
    prior_min: T,
    prior_max: T,
}

/// Breakpoints that are strict records on one side, with the extremes of the
/// values strictly between them and 0.
fn records<T: Scalar>(f: &PlMap<T>, right: bool) -> Vec<Record<T>> {
    let zero = T::zero();
    let pts: Vec<&(T, T)> = if right {
        f.points().iter().filter(|(x, _)| x.is_positive()).collect()
    } else {
        f.points().iter().filter(|(x, _)| x.is_negative()).rev().collect()
    };
    let f0 = f.at(&zero);
    let mut lo = f0.clone();
    let mut hi = f0;
    let mut out = Vec::new();
    for (x, y) in pts {
        if *y < lo || *y > hi {
            out.push(Record { x: x.clone(), y: y.clone(), prior_min: lo.clone(), prior_max: hi.clone() });
        }
        if *y < lo {
            lo = y.clone();
        }
        if *y > hi {
            hi = y.clone();
        }
    }
    out
}

/// Every radial departure with both ends at record breakpoints, in the given
/// orientation. Every radial departure can be widened to one of these.
pub fn radial_departures<T: Scalar>(f: &PlMap<T>, orientation: Orientation) -> Vec<RadialDeparture<T>> {
    let left = records(f, false);
    let right = records(f, true);
    let mut out = Vec::new();
    for l in &left {
        for r in &right {
            let ok = match orientation {
                Orientation::Positive => {
                    l.y < l.prior_min && r.y > r.prior_max && r.y > l.prior_max && l.y < r.prior_min
                }
                Orientation::Negative => {
                    l.y > l.prior_max && r.y < r.prior_min && r.y < l.prior_min && l.y > r.prior_max
                }
            };
            if ok {
                out.push(RadialDeparture { x1: l.x.clone(), x2: r.x.clone(), orientation });
            }
        }
    }
    out
}

/// A witness of a radial departure of the given orientation, if one exists.
pub fn radial_departure_exists<T: Scalar>(f: &PointedMap<T>, orientation: Orientation) -> Option<RadialDeparture<T>> {
    find_radial_departure(f.map(), orientation)
}

pub(crate) fn find_radial_departure<T: Scalar>(f: &PlMap<T>, orientation: Orientation) -> Option<RadialDeparture<T>> {
    let w = radial_departures(f, orientation).into_iter().next()?;
    assert_eq!(
        classify_pair(f, &w.x1, &w.x2),
        Some(orientation),
        "record pair ⟨{}, {}⟩ failed the pointwise check",
        w.x1,
        w.x2
    );
    Some(w)
}

/// The smallest `L > 0` with `t([0, L]) ⊇ t([y, 0])`.
pub fn reach<T: Scalar>(t: &PlMap<T>, y: &T) -> Result<T> {
    let zero = T::zero();
    if !y.is_negative() || !t.contains(y) {
        return Err(Error::Domain(format!("L needs y < 0 in the domain, got {y}")));
    }
    let (m, big_m) = t.image(y, &zero)?;
    let (_, b) = t.domain();
    let (rm, r_big_m) = t.image(&zero, b)?;
    if m < rm || big_m > r_big_m {
        return Err(Error::NotLiftable(format!(
            "t([0, {b}]) = [{rm}, {r_big_m}] does not cover t([{y}, 0]) = [{m}, {big_m}]"
        )));
    }
    if m.is_zero() && big_m.is_zero() {
        return Err(Error::NotLiftable(format!("t vanishes on [{y}, 0], so L({y}) is not attained")));
    }
    let first = |v: &T| -> T {
        t.preimages(v, &zero, b).into_iter().next().expect("covered value has a preimage")
    };
    Ok(first(&m).max(first(&big_m)))
}

/// Decides whether `[y_minus, y_plus]` is a liftable range for `t`.
pub fn is_liftable_range<T: Scalar>(t: &PointedMap<T>, y_minus: &T, y_plus: &T) -> Result<bool> {
    let zero = T::zero();
    let one = T::one();
    if *y_minus > zero || *y_plus < zero || *y_minus < -one.clone() || *y_plus > one {
        return Err(Error::Domain(format!("[{y_minus}, {y_plus}] must contain 0 and lie in [-1, 1]")));
    }
    let tm = t.map();
    if y_minus.is_negative() {
        let (m, big_m) = tm.image(y_minus, &zero)?;
        let (rm, r_big_m) = tm.image(&zero, &one)?;
        if m < rm || big_m > r_big_m {
            return Ok(false);
        }
    }
    Ok(spanning_departure(tm, y_minus, y_plus).is_none())
}

/// A radial departure `⟨y1, y2⟩` of `t` with `y_minus ≤ y1` and `y_plus < y2`.
pub fn spanning_departure<T: Scalar>(t: &PlMap<T>, y_minus: &T, y_plus: &T) -> Option<RadialDeparture<T>> {
    if !y_minus.is_negative() {
        return None;
    }
    let mut lefts: Vec<T> = t.xs().filter(|x| *x >= y_minus && x.is_negative()).cloned().collect();
    lefts.push(y_minus.clone());
    let rights: Vec<T> = t.xs().filter(|x| *x > y_plus && x.is_positive()).cloned().collect();
    for y1 in &lefts {
        for y2 in &rights {
            if let Some(orientation) = classify_pair(t, y1, y2) {
                return Some(RadialDeparture { x1: y1.clone(), x2: y2.clone(), orientation });
            }
        }
    }
    None
}

/// Checks the hypotheses of the liftable-range lemma for `s` on `[x, x']` and,
/// when they hold, returns whether `[min s([x, x']), s(x)]` is liftable for `t`.
pub fn liftable_from_departure<T: Scalar>(
    t: &PointedMap<T>,
    s: &PointedMap<T>,
    x: &T,
    x_prime: &T,
) -> Result<bool> {
    let zero = T::zero();
    if *x < zero || x >= x_prime || *x_prime > T::one() {
        return Err(Error::Precondition(format!("need 0 ≤ x < x' ≤ 1, got x = {x}, x' = {x_prime}")));
    }
    if !x.is_zero() && departure_at(s.map(), x) != Some(Orientation::Positive) {
        return Err(Error::Precondition(format!("{x} is not a positive right departure of s")));
    }
    let (y_minus, y_plus) = s.map().image(x, x_prime)?;
    if s.at(x) != y_plus {
        return Err(Error::Precondition(format!("s({x}) = {} is not the maximum {y_plus} of s on [x, x']", s.at(x))));
    }
    if !y_minus.is_negative() {
        return Err(Error::Precondition(format!("s stays nonnegative on [{x}, {x_prime}]")));
    }
    is_liftable_range(t, &y_minus, &y_plus)
}
