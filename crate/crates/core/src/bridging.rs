//! Stay-right lifting, the two bridging constructions, and the bridged factor `s̃`.

use std::fmt;

use crate::contour::{
    classify_pair, contour_points, contour_side, departure_at, departures, find_radial_departure,
    is_liftable_range, meandering_lift, radial_contour_factor, reach, spanning_departure, ContourData,
    ContourPoint, DepartureSegment, Orientation, Side,
};
use crate::error::{Error, Result};
use crate::oracle::oracle_factorization;
use crate::plmap::{PlMap, PointedMap};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiftCase {
    One,
    Two,
}

/// How a stay-right lift was assembled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StayRightPlan<T> {
    /// Largest right contour point of `t` below `L(y⁻)`, or 0.
    pub gamma: T,
    /// `L(y⁻)`.
    pub reach: T,
    pub case: LiftCase,
    /// `γ₀ < γ₁ < … < γₖ₊₁ = L(y⁻)` (case two only).
    pub gammas: Vec<T>,
    /// `δ₁ > δ₂ > … > δₖ₊₁` (case two only).
    pub deltas: Vec<T>,
    /// `x₀ = a, x₁, …, xₖ₊₁` (case two only).
    pub crossings: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StayRight<T: Scalar> {
    pub s_hat: PlMap<T>,
    /// `None` when `y⁻ = 0`, in which case `ŝ` is `s` itself.
    pub plan: Option<StayRightPlan<T>>,
}

/// Largest sup of `ŝ` over the set where `ŝ ≠ s`, and whether it is attained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangedMax<T> {
    pub value: T,
    pub attained_at: Option<T>,
}

/// `sup {ŝ(x) : ŝ(x) ≠ s(x)}` over the domain of `s_hat`; `None` if they agree.
pub fn changed_max<T: Scalar>(s_hat: &PlMap<T>, s: &PlMap<T>) -> Option<ChangedMax<T>> {
    let (a, b) = s_hat.domain();
    let mut xs: Vec<T> = s_hat.xs().cloned().collect();
    xs.extend(s.breakpoints_between(a, b));
    xs.sort();
    xs.dedup();
    let mut best: Option<ChangedMax<T>> = None;
    for w in xs.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let (hp, hq) = (s_hat.at(p), s_hat.at(q));
        let (dp, dq) = (hp.clone() - s.at(p), hq.clone() - s.at(q));
        if dp.is_zero() && dq.is_zero() {
            continue;
        }
        let top = hp.clone().max(hq.clone());
        let witness = if hp > hq {
            (!dp.is_zero()).then(|| p.clone())
        } else if hq > hp {
            (!dq.is_zero()).then(|| q.clone())
        } else {
            let m = T::mid(p, q);
            let m = if s_hat.at(&m) == s.at(&m) { T::mid(p, &m) } else { m };
            Some(m)
        };
        match &mut best {
            Some(cur) if cur.value > top => {}
            Some(cur) if cur.value == top => {
                if cur.attained_at.is_none() {
                    cur.attained_at = witness;
                }
            }
            _ => best = Some(ChangedMax { value: top, attained_at: witness }),
        }
    }
    best
}

/// First point of `[a, b]` where `g ≥ h` fails, checked on the common partition.
fn domination_failure<T: Scalar>(g: &PlMap<T>, h: &PlMap<T>) -> Option<T> {
    let (a, b) = g.domain();
    let mut xs: Vec<T> = g.xs().cloned().collect();
    xs.extend(h.breakpoints_between(a, b));
    xs.sort();
    xs.dedup();
    xs.into_iter().find(|x| g.at(x) < h.at(x))
}

fn mirror_plan<T: Scalar>(p: StayRightPlan<T>) -> StayRightPlan<T> {
    StayRightPlan { crossings: p.crossings.into_iter().map(|x| -x).collect(), ..p }
}

/// The branch of `t` on `[lo, hi]` (where it is one-to-one), inverted.
fn branch_inverse<T: Scalar>(t: &PlMap<T>, lo: &T, hi: &T) -> Result<PlMap<T>> {
    t.restrict(lo, hi)?
        .inverse()
        .map_err(|_| Error::InvariantViolation(format!("t is not one-to-one on [{lo}, {hi}]")))
}

/// Modifies `s` on the interval `I` with endpoints `a`, `b` so that it stays in
/// `[0, 1]` while keeping `t ∘ ŝ = f` there.
#[allow(clippy::too_many_arguments)]
pub fn stay_right_lift<T: Scalar>(
    t: &PointedMap<T>,
    f: &PlMap<T>,
    s: &PlMap<T>,
    a: &T,
    b: &T,
    y_minus: &T,
    y_plus: &T,
) -> Result<StayRight<T>> {
    if a == b {
        return Err(Error::Domain(format!("degenerate interval at {a}")));
    }
    if a > b {
        let sr = s.restrict(b, a)?.reflect();
        let fr = f.restrict(b, a)?.reflect();
        let out = stay_right_lift(t, &fr, &sr, &-a.clone(), &-b.clone(), y_minus, y_plus)?;
        return Ok(StayRight { s_hat: out.s_hat.reflect(), plan: out.plan.map(mirror_plan) });
    }
    let s_i = s.restrict(a, b)?;
    let f_i = f.restrict(a, b)?;
    let (lo, hi) = s_i.value_range();
    if lo != *y_minus || hi != *y_plus {
        return Err(Error::Precondition(format!(
            "s([{a}, {b}]) = [{lo}, {hi}], expected [{y_minus}, {y_plus}]"
        )));
    }
    if s.at(a) != *y_plus {
        return Err(Error::Precondition(format!("s({a}) = {} is not y⁺ = {y_plus}", s.at(a))));
    }
    let tm = t.map();
    if tm.compose(&s_i)? != f_i {
        return Err(Error::Precondition(format!("f ≠ t ∘ s on [{a}, {b}]")));
    }
    if !is_liftable_range(t, y_minus, y_plus)? {
        let why = match spanning_departure(tm, y_minus, y_plus) {
            Some(w) => format!("radial departure ⟨{}, {}⟩ of t spans it", w.x1, w.x2),
            None => "t([0, 1]) does not cover t([y⁻, 0])".to_string(),
        };
        return Err(Error::Precondition(format!("[{y_minus}, {y_plus}] is not a liftable range: {why}")));
    }
    if !y_minus.is_negative() {
        let s_hat = s_i.recodomain(T::zero(), T::one())?;
        return Ok(StayRight { s_hat, plan: None });
    }

    let l = reach(tm, y_minus)?;
    let contour = contour_side(t, Side::Right)?;
    let gamma = contour.iter().map(|c| c.point.clone()).filter(|p| *p < l).max().expect("sentinel 0 < L");

    let (s_hat, plan) = if *y_plus >= gamma {
        let top = y_plus.clone().min(l.clone());
        let inv = branch_inverse(tm, &gamma, &l)?;
        let low_part = inv.compose(&tm.restrict(y_minus, &top)?).map_err(|e| {
            Error::InvariantViolation(format!("t([γ, L]) does not cover t([y⁻, L]): {e}"))
        })?;
        let phi = if *y_plus > l {
            PlMap::concat(&[low_part, PlMap::identity(l.clone(), y_plus.clone())?])?
        } else {
            low_part
        };
        let s_hat = phi.compose(&s_i)?;
        let plan = StayRightPlan {
            gamma: gamma.clone(),
            reach: l.clone(),
            case: LiftCase::One,
            gammas: vec![],
            deltas: vec![],
            crossings: vec![],
        };
        (s_hat, plan)
    } else {
        case_two(tm, &contour, &f_i, &s_i, a, b, y_minus, y_plus, &gamma, &l)?
    };
    let s_hat = s_hat.recodomain(T::zero(), T::one()).map_err(|e| {
        Error::InvariantViolation(format!("lift leaves [0, 1]: {e}"))
    })?;
    verify_stay_right(tm, &f_i, &s_i, a, b, y_plus, &l, &s_hat)?;
    Ok(StayRight { s_hat, plan: Some(plan) })
}

#[allow(clippy::too_many_arguments)]
fn case_two<T: Scalar>(
    tm: &PlMap<T>,
    contour: &[ContourPoint<T>],
    f_i: &PlMap<T>,
    s_i: &PlMap<T>,
    a: &T,
    b: &T,
    y_minus: &T,
    y_plus: &T,
    gamma: &T,
    l: &T,
) -> Result<(PlMap<T>, StayRightPlan<T>)> {
    let zero = T::zero();
    let points: Vec<T> = contour.iter().map(|c| c.point.clone()).collect();
    let first = points.iter().position(|p| p > y_plus && p < l).ok_or_else(|| {
        Error::InvariantViolation(format!("no contour point of t strictly between {y_plus} and {l}"))
    })?;
    let mut gammas: Vec<T> = vec![points[first - 1].clone()];
    gammas.extend(points.iter().filter(|p| *p > y_plus && *p < l).cloned());
    debug_assert_eq!(gammas.last(), Some(gamma));
    gammas.push(l.clone());
    let k = gammas.len() - 2;

    // deltas[i] = δᵢ for 1 ≤ i ≤ k+1; index 0 unused.
    let mut deltas: Vec<T> = vec![zero.clone(); k + 2];
    let t_l = tm.at(l);
    deltas[k + 1] = tm
        .preimages(&t_l, y_minus, &zero)
        .into_iter()
        .filter(|d| d.is_negative())
        .last()
        .ok_or_else(|| Error::InvariantViolation(format!("t(L) = {t_l} is not attained on [{y_minus}, 0)")))?;
    for i in (1..=k).rev() {
        let v = tm.at(&gammas[i]);
        let d = tm
            .preimages(&v, &deltas[i + 1], &zero)
            .into_iter()
            .filter(|d| *d > deltas[i + 1] && d.is_negative())
            .last()
            .ok_or_else(|| {
                Error::InvariantViolation(format!("no δ in ({}, 0) with t(δ) = t(γ_{i}) = {v}", deltas[i + 1]))
            })?;
        deltas[i] = d;
    }

    let mut crossings: Vec<T> = vec![a.clone()];
    for d in deltas.iter().skip(1) {
        let x = s_i.preimages(d, a, b).into_iter().next().ok_or_else(|| {
            Error::InvariantViolation(format!("s never reaches δ = {d} on [{a}, {b}]"))
        })?;
        crossings.push(x);
    }
    for w in crossings.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvariantViolation(format!("crossings not increasing: {} then {}", w[0], w[1])));
        }
    }

    let mut parts: Vec<PlMap<T>> = Vec::with_capacity(k + 2);
    for i in 1..=k + 1 {
        let inv = branch_inverse(tm, &gammas[i - 1], &gammas[i])?;
        let piece = f_i.restrict(&crossings[i - 1], &crossings[i])?;
        parts.push(inv.compose(&piece).map_err(|e| {
            Error::InvariantViolation(format!("segment {i} of the δ-ladder escapes its branch: {e}"))
        })?);
    }
    if crossings[k + 1] < *b {
        let inv = branch_inverse(tm, &gammas[k], l)?;
        let piece = f_i.restrict(&crossings[k + 1], b)?;
        parts.push(inv.compose(&piece).map_err(|e| {
            Error::InvariantViolation(format!("tail after x_(k+1) escapes [γ, L]: {e}"))
        })?);
    }
    let s_hat = PlMap::concat(&parts)?;
    let plan = StayRightPlan {
        gamma: gamma.clone(),
        reach: l.clone(),
        case: LiftCase::Two,
        gammas,
        deltas: deltas.into_iter().skip(1).collect(),
        crossings,
    };
    Ok((s_hat, plan))
}

#[allow(clippy::too_many_arguments)]
fn verify_stay_right<T: Scalar>(
    tm: &PlMap<T>,
    f_i: &PlMap<T>,
    s_i: &PlMap<T>,
    a: &T,
    b: &T,
    y_plus: &T,
    l: &T,
    s_hat: &PlMap<T>,
) -> Result<()> {
    let fail = |n: u8, msg: String| Err(Error::InvariantViolation(format!("stay-right property ({n}): {msg}")));
    if let Some(d) = oracle_factorization(tm, s_hat, f_i)? {
        return fail(1, format!("t(ŝ({})) = {} but f = {}", d.x, d.composed, d.expected));
    }
    if s_hat.at(a) != *y_plus {
        return fail(2, format!("ŝ({a}) = {}", s_hat.at(a)));
    }
    if let Some(x) = domination_failure(s_hat, s_i) {
        return fail(3, format!("ŝ({x}) < s({x})"));
    }
    match changed_max(s_hat, s_i) {
        Some(ChangedMax { value, attained_at: Some(_) }) if value == *l => {}
        other => return fail(4, format!("max of changed values is {other:?}, expected {l}")),
    }
    if s_i.at(b) <= *l {
        let want = tm.preimages(&f_i.at(b), &T::zero(), l).into_iter().last();
        if want.as_ref() != Some(&s_hat.at(b)) {
            return fail(5, format!("ŝ({b}) = {}, expected {want:?}", s_hat.at(b)));
        }
    }
    Ok(())
}

/// A Bridging-I lift around the negative right contour point `αᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSiteI<T: Scalar> {
    pub index: usize,
    pub domain: (T, T),
    pub s_hat: PlMap<T>,
    /// `L(s(αᵢ))`.
    pub reach: T,
}

/// A Bridging-II lift around the negative left contour point `βⱼ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSiteII<T: Scalar> {
    pub index: usize,
    /// The index `i` satisfying `s(αᵢ) ≤ s(βⱼ)` and `s(αᵢ₋₁) ≤ s(βⱼ₋₁)`.
    pub partner: usize,
    pub domain: (T, T),
    pub s_hat: PlMap<T>,
    pub reach: T,
}

/// The right-side construction shared by both bridging lemmas. `right` is the
/// right contour data of `s`, sentinel first.
fn bridge_right<T: Scalar>(
    t: &PointedMap<T>,
    f: &PlMap<T>,
    s: &PlMap<T>,
    right: &[ContourPoint<T>],
    i: usize,
) -> Result<(PlMap<T>, T)> {
    let n = right.len() - 1;
    if i == 0 || i > n || right[i].orientation != Some(Orientation::Negative) {
        return Err(Error::Precondition(format!("α_{i} is not a negative right contour point of s")));
    }
    let one = T::one();
    let alpha = |k: usize| right[k].point.clone();
    let sv = |x: &T| s.at(x);
    let y_minus = sv(&alpha(i));
    let l = reach(t.map(), &y_minus)?;
    let lift = |a: &T, b: &T, ym: &T, yp: &T| -> Result<PlMap<T>> {
        Ok(stay_right_lift(t, f, s, a, b, ym, yp)?.s_hat)
    };

    let s_hat = if i == n {
        lift(&alpha(i - 1), &one, &y_minus, &sv(&alpha(i - 1)))?
    } else {
        let left_half = lift(&alpha(i - 1), &alpha(i), &y_minus, &sv(&alpha(i - 1)))?;
        let right_half = lift(&alpha(i + 1), &alpha(i), &y_minus, &sv(&alpha(i + 1)))?;
        let (hl, hr) = (left_half.at(&alpha(i)), right_half.at(&alpha(i)));
        if hl != hr {
            return Err(Error::InvariantViolation(format!("halves disagree at α_{i}: {hl} vs {hr}")));
        }
        let mut parts = vec![left_half, right_half];
        if i + 1 == n && alpha(n) < one {
            let (tail_min, _) = s.image(&alpha(n), &one)?;
            let tail = if tail_min.is_negative() {
                lift(&alpha(n), &one, &tail_min, &sv(&alpha(n)))?
            } else {
                s.restrict(&alpha(n), &one)?
            };
            parts.push(tail);
        }
        PlMap::concat(&parts)?
    };

    let fail = |n: u8, msg: String| Err(Error::InvariantViolation(format!("bridging property ({n}) at α_{i}: {msg}")));
    let (lo, hi) = s_hat.domain();
    let s_dom = s.restrict(lo, hi)?;
    if let Some(d) = oracle_factorization(t.map(), &s_hat, &f.restrict(lo, hi)?)? {
        return fail(1, format!("t(ŝ({})) = {} but f = {}", d.x, d.composed, d.expected));
    }
    if s_hat.at(&alpha(i - 1)) != sv(&alpha(i - 1)) {
        return fail(2, format!("ŝ(α_{}) moved", i - 1));
    }
    if i < n && s_hat.at(&alpha(i + 1)) != sv(&alpha(i + 1)) {
        return fail(2, format!("ŝ(α_{}) moved", i + 1));
    }
    if let Some(x) = domination_failure(&s_hat, &s_dom) {
        return fail(3, format!("ŝ({x}) < s({x})"));
    }
    match changed_max(&s_hat, &s_dom) {
        Some(ChangedMax { value, attained_at: Some(_) }) if value == l => {}
        other => return fail(4, format!("max of changed values is {other:?}, expected {l}")),
    }
    let (lo4, hi4) = s_hat.image(&alpha(i - 1), &alpha(i))?;
    if l < lo4 || l > hi4 {
        return fail(4, format!("L = {l} is not attained on [α_{}, α_{i}]", i - 1));
    }
    Ok((s_hat.recodomain(T::zero(), one)?, l))
}

fn check_factorization<T: Scalar>(t: &PointedMap<T>, f: &PointedMap<T>, s: &PointedMap<T>) -> Result<()> {
    if t.map().compose(s.map())? != *f.map() {
        return Err(Error::Precondition("f ≠ t ∘ s".into()));
    }
    Ok(())
}

/// Bridging I at the negative right contour point `αᵢ` of `s` (1-based).
pub fn bridging_i<T: Scalar>(
    t: &PointedMap<T>,
    f: &PointedMap<T>,
    s: &PointedMap<T>,
    i: usize,
) -> Result<BridgeSiteI<T>> {
    check_factorization(t, f, s)?;
    let right = contour_side(s, Side::Right)?;
    let (s_hat, reach) = bridge_right(t, f.map(), s.map(), &right, i)?;
    let (lo, hi) = s_hat.domain();
    Ok(BridgeSiteI { index: i, domain: (lo.clone(), hi.clone()), s_hat, reach })
}

/// Bridging II at the negative left contour point `βⱼ` of `s`, using the
/// partner index `i` for the liftability comparison.
pub fn bridging_ii<T: Scalar>(
    t: &PointedMap<T>,
    f: &PointedMap<T>,
    s: &PointedMap<T>,
    j: usize,
    i: usize,
) -> Result<BridgeSiteII<T>> {
    check_factorization(t, f, s)?;
    let c = contour_points(s)?;
    if j == 0 || j > c.m() || c.left[j].orientation != Some(Orientation::Negative) {
        return Err(Error::Precondition(format!("β_{j} is not a negative left contour point of s")));
    }
    if i == 0 || i > c.n() {
        return Err(Error::Precondition(format!("partner index {i} is out of range 1..={}", c.n())));
    }
    let sv = |x: &T| s.at(x);
    if sv(c.alpha(i)) > sv(c.beta(j)) {
        return Err(Error::Precondition(format!(
            "(†) fails: s(α_{i}) = {} > s(β_{j}) = {}",
            sv(c.alpha(i)),
            sv(c.beta(j))
        )));
    }
    if sv(c.alpha(i - 1)) > sv(c.beta(j - 1)) {
        return Err(Error::Precondition(format!(
            "(†) fails: s(α_{}) = {} > s(β_{}) = {}",
            i - 1,
            sv(c.alpha(i - 1)),
            j - 1,
            sv(c.beta(j - 1))
        )));
    }
    let s_r = s.reflect();
    let f_r = f.reflect();
    let right = contour_side(&s_r, Side::Right)?;
    let (s_hat, reach) = bridge_right(t, f_r.map(), s_r.map(), &right, j)?;
    let s_hat = s_hat.reflect();
    let (lo, hi) = s_hat.domain();
    Ok(BridgeSiteII { index: j, partner: i, domain: (lo.clone(), hi.clone()), s_hat, reach })
}

/// Membership of `αᵢ` in `B₁`, with the left end of a witnessing departure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B1Member<T> {
    pub index: usize,
    pub witness: T,
}

/// Indices `i` such that `αᵢ` is a negative right contour point of `s` and
/// `⟨x, αᵢ⟩` is a negative radial departure of `s` for some `x < 0`.
pub fn compute_b1<T: Scalar>(s: &PointedMap<T>) -> Result<Vec<B1Member<T>>> {
    let right = contour_side(s, Side::Right)?;
    let lefts: Vec<T> = s.map().xs().filter(|x| x.is_negative()).cloned().collect();
    let mut out = Vec::new();
    for (i, c) in right.iter().enumerate().skip(1) {
        if c.orientation != Some(Orientation::Negative) {
            continue;
        }
        // A witness can always be pushed out to the far end of its departure segment, a breakpoint.
        if let Some(x) = lefts.iter().rev().find(|x| classify_pair(s.map(), x, &c.point) == Some(Orientation::Negative)) {
            out.push(B1Member { index: i, witness: x.clone() });
        }
    }
    Ok(out)
}

/// A verified `B₂` membership: `βⱼ` with witnesses for conditions (a)–(e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B2Site<T> {
    pub index: usize,
    pub x1: T,
    pub x2: T,
    /// The negative radial departure `⟨w1, w2⟩` of `t₃` with `t₃(w1) = x2`, `t₃(w2) = x1`.
    pub w1: T,
    pub w2: T,
    pub partner: usize,
}

/// An interval with independently open or closed ends.
#[derive(Clone, Debug)]
struct Span<T> {
    lo: T,
    lo_closed: bool,
    hi: T,
    hi_closed: bool,
}

impl<T: Scalar> Span<T> {
    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn contains(&self, x: &T) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }

    fn meet(&self, o: &Span<T>) -> Span<T> {
        let (lo, lo_closed) = match self.lo.cmp(&o.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (o.lo.clone(), o.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && o.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&o.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (o.hi.clone(), o.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && o.hi_closed),
        };
        Span { lo, lo_closed, hi, hi_closed }
    }
}

/// A point of `span` where `s < bound`, preferring the minimiser of `s`.
fn point_below<T: Scalar>(s: &PlMap<T>, span: &Span<T>, bound: &T) -> Option<T> {
    if span.is_empty() {
        return None;
    }
    let mut cands: Vec<T> = s.breakpoints_between(&span.lo, &span.hi);
    if span.lo_closed {
        cands.push(span.lo.clone());
    }
    if span.hi_closed {
        cands.push(span.hi.clone());
    }
    if let Some(best) = cands.iter().min_by(|a, b| s.at(a).cmp(&s.at(b)).then(a.cmp(b))) {
        if s.at(best) < *bound {
            return Some(best.clone());
        }
    }
    // Only an open end can still get below the bound; step inside from it.
    let inner = s.breakpoints_between(&span.lo, &span.hi);
    for (end, toward) in [
        (&span.lo, inner.first().unwrap_or(&span.hi)),
        (&span.hi, inner.last().unwrap_or(&span.lo)),
    ] {
        if s.at(end) >= *bound || !s.contains(end) {
            continue;
        }
        let (ve, vt) = (s.at(end), s.at(toward));
        let stop = if vt < *bound {
            toward.clone()
        } else {
            end.clone() + (bound.clone() - ve.clone()) * (toward.clone() - end.clone()) / (vt - ve)
        };
        let x = T::mid(end, &stop);
        if span.contains(&x) && s.at(&x) < *bound {
            return Some(x);
        }
    }
    None
}

/// A rectangle of `(x1, x2)` values realised by negative radial departures of `t₃`.
#[derive(Clone, Debug)]
struct Box2<T> {
    x1: Span<T>,
    x2: Span<T>,
}

fn realisable_boxes<T: Scalar>(t3: &PointedMap<T>) -> Result<Vec<Box2<T>>> {
    let zero = T::zero();
    let tm = t3.map();
    let lefts: Vec<DepartureSegment<T>> =
        departures(t3, Side::Left)?.into_iter().filter(|d| d.orientation == Orientation::Positive).collect();
    let rights: Vec<DepartureSegment<T>> =
        departures(t3, Side::Right)?.into_iter().filter(|d| d.orientation == Orientation::Negative).collect();
    let mut out = Vec::new();
    for sl in &lefts {
        let (cl, _) = tm.image(&sl.near, &zero)?;
        for sr in &rights {
            let (_, cr) = tm.image(&zero, &sr.near)?;
            let x2 = Span {
                lo: tm.at(&sl.near).max(cr),
                lo_closed: false,
                hi: tm.at(&sl.far),
                hi_closed: true,
            };
            let x1 = Span {
                lo: tm.at(&sr.far),
                lo_closed: true,
                hi: tm.at(&sr.near).min(cl.clone()),
                hi_closed: false,
            };
            if !x1.is_empty() && !x2.is_empty() {
                out.push(Box2 { x1, x2 });
            }
        }
    }
    Ok(out)
}

/// Decides `B₂` for the left contour points of `s` against the right-bridged
/// map `s_tilde` and `t₃`. `b1` lists the members of `B₁`.
pub fn compute_b2<T: Scalar>(
    s: &PointedMap<T>,
    s_tilde: &PointedMap<T>,
    t3: &PointedMap<T>,
    b1: &[usize],
) -> Result<Vec<B2Site<T>>> {
    let zero = T::zero();
    let c = contour_points(s)?;
    let boxes = realisable_boxes(t3)?;
    let pos: Vec<DepartureSegment<T>> = departures(s_tilde, Side::Right)?
        .into_iter()
        .filter(|d| d.orientation == Orientation::Positive)
        .collect();
    let sm = s.map();
    let st = s_tilde.map();
    let mut out = Vec::new();
    for j in 1..=c.m() {
        if c.left[j].orientation != Some(Orientation::Negative) {
            continue;
        }
        let slot = Span { lo: c.beta(j).clone(), lo_closed: true, hi: c.beta(j - 1).clone(), hi_closed: false };
        let mut found: Option<(T, T)> = None;
        'search: for bx in &boxes {
            for p in &pos {
                let k = bx.x2.meet(&Span { lo: p.near.clone(), lo_closed: false, hi: p.far.clone(), hi_closed: true });
                if k.is_empty() {
                    continue;
                }
                let x2 = k.hi.clone();
                let (a_min, _) = st.image(&zero, &p.near)?;
                let b_val = st.at(&x2);
                // Points x ≤ 0 with max s on [x, 0] < B form an interval ending at 0.
                let cut = sm.preimages(&b_val, &-T::one(), &zero).into_iter().filter(|x| *x <= zero).last();
                let below_b = match &cut {
                    Some(x) => Span { lo: x.clone(), lo_closed: false, hi: zero.clone(), hi_closed: true },
                    None => Span { lo: -T::one(), lo_closed: true, hi: zero.clone(), hi_closed: true },
                };
                let j_span = bx.x1.meet(&slot).meet(&below_b);
                if let Some(x1) = point_below(sm, &j_span, &a_min) {
                    found = Some((x1, x2));
                    break 'search;
                }
            }
        }
        let Some((x1, x2)) = found else { continue };
        let site = finish_b2_site(s, s_tilde, t3, &c, b1, j, x1, x2)?;
        out.push(site);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn finish_b2_site<T: Scalar>(
    s: &PointedMap<T>,
    s_tilde: &PointedMap<T>,
    t3: &PointedMap<T>,
    c: &ContourData<T>,
    b1: &[usize],
    j: usize,
    x1: T,
    x2: T,
) -> Result<B2Site<T>> {
    let zero = T::zero();
    let one = T::one();
    let tm = t3.map();
    let w1 = tm.preimages(&x2, &-one.clone(), &zero).into_iter().filter(|w| w.is_negative()).last();
    let w2 = tm.preimages(&x1, &zero, &one).into_iter().find(|w| w.is_positive());
    let bad = |clause: &str, msg: String| Error::InvariantViolation(format!("B₂ witness for β_{j} fails ({clause}): {msg}"));
    let (w1, w2) = match (w1, w2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(bad("a", format!("no preimages of ({x1}, {x2}) under t₃"))),
    };
    if classify_pair(tm, &w1, &w2) != Some(Orientation::Negative) {
        return Err(bad("a", format!("⟨{w1}, {w2}⟩ is not a negative radial departure of t₃")));
    }
    if departure_at(s_tilde.map(), &x2) != Some(Orientation::Positive) {
        return Err(bad("b", format!("{x2} is not a positive right departure of s̃")));
    }
    let (_, max_s) = s.map().image(&x1, &zero)?;
    if s_tilde.at(&x2) <= max_s {
        return Err(bad("c", format!("s̃({x2}) = {} ≤ {max_s}", s_tilde.at(&x2))));
    }
    if !(x1 >= *c.beta(j) && x1 < *c.beta(j - 1)) {
        return Err(bad("d", format!("{x1} ∉ [β_{j}, β_{})", j - 1)));
    }
    let (min_st, _) = s_tilde.map().image(&zero, &x2)?;
    if s.at(&x1) >= min_st {
        return Err(bad("e", format!("s({x1}) = {} ≥ {min_st}", s.at(&x1))));
    }
    let sv = |x: &T| s.at(x);
    let partner = (1..=c.n()).find(|&k| sv(c.alpha(k)) <= sv(c.beta(j))).ok_or_else(|| {
        Error::InvariantViolation(format!("no α_k with s(α_k) ≤ s(β_{j})"))
    })?;
    if sv(c.alpha(partner - 1)) > sv(c.beta(j - 1)) || !b1.contains(&partner) {
        return Err(Error::InvariantViolation(format!(
            "partner α_{partner} of β_{j} fails (†) or lies outside B₁"
        )));
    }
    Ok(B2Site { index: j, x1, x2, w1, w2, partner })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Original,
    BridgedI(usize),
    BridgedII(usize),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Original => write!(f, "original"),
            Provenance::BridgedI(i) => write!(f, "bridged-I({i})"),
            Provenance::BridgedII(j) => write!(f, "bridged-II({j})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgedFactor<T: Scalar> {
    pub s_tilde: PointedMap<T>,
    /// `s₁ ∘ f₂`, the map being bridged.
    pub s: PointedMap<T>,
    pub t1: PointedMap<T>,
    pub t3: PointedMap<T>,
    pub f1f2: PointedMap<T>,
    pub contour: ContourData<T>,
    pub b1: Vec<B1Member<T>>,
    pub sites_i: Vec<BridgeSiteI<T>>,
    pub b2: Vec<B2Site<T>>,
    pub sites_ii: Vec<BridgeSiteII<T>>,
    /// Consecutive intervals covering `[-1, 1]`.
    pub provenance: Vec<(T, T, Provenance)>,
}

impl<T: Scalar> BridgedFactor<T> {
    pub fn b1_indices(&self) -> Vec<usize> {
        self.b1.iter().map(|m| m.index).collect()
    }

    pub fn b2_indices(&self) -> Vec<usize> {
        self.b2.iter().map(|m| m.index).collect()
    }

    /// `interval → tag` lines.
    pub fn provenance_report(&self) -> String {
        self.provenance
            .iter()
            .map(|(a, b, p)| format!("{} {} {p}\n", a.to_frac_string(), b.to_frac_string()))
            .collect()
    }
}

/// Deliberate sabotage used to show that the verifier notices missing steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Leave the right side of `s₁ ∘ f₂` unbridged.
    SkipB1,
}

/// Checks `t_{f₁} = t_{f₁∘f₂}` and `t_{f₂} = t_{f₂∘f₃}`.
pub fn check_bridge_hypotheses<T: Scalar>(
    f1: &PointedMap<T>,
    f2: &PointedMap<T>,
    f3: &PointedMap<T>,
) -> Result<()> {
    if radial_contour_factor(f1)? != radial_contour_factor(&f1.compose(f2)?)? {
        return Err(Error::Hypothesis("t_{f1} ≠ t_{f1∘f2}".into()));
    }
    if radial_contour_factor(f2)? != radial_contour_factor(&f2.compose(f3)?)? {
        return Err(Error::Hypothesis("t_{f2} ≠ t_{f2∘f3}".into()));
    }
    Ok(())
}

fn provenance_of<T: Scalar>(
    sites_i: &[BridgeSiteI<T>],
    sites_ii: &[BridgeSiteII<T>],
) -> Vec<(T, T, Provenance)> {
    let mut marked: Vec<(T, T, Provenance)> = sites_i
        .iter()
        .map(|s| (s.domain.0.clone(), s.domain.1.clone(), Provenance::BridgedI(s.index)))
        .chain(sites_ii.iter().map(|s| (s.domain.0.clone(), s.domain.1.clone(), Provenance::BridgedII(s.index))))
        .collect();
    marked.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::new();
    let mut cursor = -T::one();
    for (a, b, p) in marked {
        if a > cursor {
            out.push((cursor.clone(), a.clone(), Provenance::Original));
        }
        out.push((a, b.clone(), p));
        cursor = b;
    }
    if cursor < T::one() {
        out.push((cursor, T::one(), Provenance::Original));
    }
    out
}

/// Builds `s̃` without the final verification pass.
pub fn construct_bridged<T: Scalar>(
    f1: &PointedMap<T>,
    f2: &PointedMap<T>,
    f3: &PointedMap<T>,
    mutation: Option<Mutation>,
) -> Result<BridgedFactor<T>> {
    check_bridge_hypotheses(f1, f2, f3)?;
    let t1 = radial_contour_factor(f1)?;
    let t3 = radial_contour_factor(f3)?;
    let s1 = meandering_lift(f1)?;
    let s = s1.compose(f2)?;
    let f1f2 = f1.compose(f2)?;
    let contour = contour_points(&s)?;

    let b1 = compute_b1(&s)?;
    let mut sites_i = Vec::with_capacity(b1.len());
    for m in &b1 {
        sites_i.push(bridging_i(&t1, &f1f2, &s, m.index)?);
    }
    let right_bridged = {
        let patches: Vec<&PlMap<T>> = sites_i.iter().map(|x| &x.s_hat).collect();
        PointedMap::new(s.map().paste(&patches)?)?
    };
    let b1_idx: Vec<usize> = b1.iter().map(|m| m.index).collect();
    let b2 = compute_b2(&s, &right_bridged, &t3, &b1_idx)?;
    let mut sites_ii = Vec::with_capacity(b2.len());
    for site in &b2 {
        sites_ii.push(bridging_ii(&t1, &f1f2, &s, site.index, site.partner)?);
    }

    let kept_i: &[BridgeSiteI<T>] = if mutation == Some(Mutation::SkipB1) { &[] } else { &sites_i };
    let patches: Vec<&PlMap<T>> =
        kept_i.iter().map(|x| &x.s_hat).chain(sites_ii.iter().map(|x| &x.s_hat)).collect();
    let s_tilde = PointedMap::new(s.map().paste(&patches)?)?;
    let provenance = provenance_of(kept_i, &sites_ii);
    Ok(BridgedFactor { s_tilde, s, t1, t3, f1f2, contour, b1, sites_i, b2, sites_ii, provenance })
}

/// Builds the bridged factor `s̃` for `f₁, f₂, f₃` and verifies it.
pub fn build_bridged_s<T: Scalar>(
    f1: &PointedMap<T>,
    f2: &PointedMap<T>,
    f3: &PointedMap<T>,
) -> Result<BridgedFactor<T>> {
    let bf = construct_bridged(f1, f2, f3, None)?;
    let report = verify_bridged(&bf, &bf.t1, &bf.f1f2, &bf.t3);
    if let Some(c) = report.checks.iter().find(|c| !c.passed) {
        return Err(Error::InvariantViolation(format!("bridged factor check '{}' failed: {}", c.name, c.detail)));
    }
    Ok(bf)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BridgeReport {
    pub checks: Vec<Check>,
}

impl BridgeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Samples on one side that see every change in departure status of `g` and `h`.
fn departure_samples<T: Scalar>(g: &PlMap<T>, h: &PlMap<T>, side: Side) -> Vec<T> {
    let zero = T::zero();
    let one = T::one();
    let (a, b) = match side {
        Side::Right => (zero.clone(), one),
        Side::Left => (-one, zero.clone()),
    };
    let mut xs: Vec<T> = vec![a.clone(), b.clone()];
    for m in [g, h] {
        xs.extend(m.breakpoints_between(&a, &b));
        let mut vals: Vec<T> = m.points().iter().map(|p| p.1.clone()).collect();
        vals.sort();
        vals.dedup();
        for v in vals {
            xs.extend(g.preimages(&v, &a, &b));
            xs.extend(h.preimages(&v, &a, &b));
        }
    }
    xs.sort();
    xs.dedup();
    let mut out = Vec::with_capacity(xs.len() * 2);
    for w in xs.windows(2) {
        out.push(w[0].clone());
        out.push(T::mid(&w[0], &w[1]));
    }
    out.extend(xs.last().cloned());
    out.retain(|x| !x.is_zero());
    out
}

/// Re-checks a bridged factor against `t₁`, `f₁ ∘ f₂` and `t₃`.
pub fn verify_bridged<T: Scalar>(
    bf: &BridgedFactor<T>,
    t1: &PointedMap<T>,
    f1f2: &PointedMap<T>,
    t3: &PointedMap<T>,
) -> BridgeReport {
    let mut checks = Vec::new();
    let st = bf.s_tilde.map();
    let sm = bf.s.map();

    let (passed, detail) = match oracle_factorization(t1.map(), st, f1f2.map()) {
        Ok(None) => (true, "t₁ ∘ s̃ = f₁ ∘ f₂".to_string()),
        Ok(Some(d)) => (false, format!("t₁(s̃({})) = {} but f₁∘f₂ = {}", d.x, d.composed, d.expected)),
        Err(e) => (false, e.to_string()),
    };
    checks.push(Check { name: "factorization", passed, detail });

    let (passed, detail) = match st.compose(t3.map()) {
        Ok(comp) => match find_radial_departure(&comp, Orientation::Negative) {
            None => (true, "s̃ ∘ t₃ has no negative radial departure".to_string()),
            Some(w) => (false, format!("negative radial departure ⟨{}, {}⟩ of s̃ ∘ t₃", w.x1, w.x2)),
        },
        Err(e) => (false, e.to_string()),
    };
    checks.push(Check { name: "no-negative-radial-departure", passed, detail });

    let (passed, detail) = match domination_failure(st, sm) {
        None => (true, "s̃ ≥ s₁ ∘ f₂".to_string()),
        Some(x) => (false, format!("s̃({x}) < s({x})")),
    };
    checks.push(Check { name: "domination", passed, detail });

    let c = &bf.contour;
    let b1 = bf.b1_indices();
    let b2 = bf.b2_indices();
    let in_alpha_cell = |x: &T, set: &dyn Fn(usize) -> bool| {
        (1..=c.n()).any(|i| set(i) && x > c.alpha(i - 1) && x <= c.alpha(i))
    };
    let in_beta_cell = |x: &T, set: &dyn Fn(usize) -> bool| {
        (1..=c.m()).any(|j| set(j) && x >= c.beta(j) && x < c.beta(j - 1))
    };
    let neg_alpha = |i: usize| c.right[i].orientation == Some(Orientation::Negative);
    let neg_beta = |j: usize| c.left[j].orientation == Some(Orientation::Negative);
    let mut claim = [(true, String::new()), (true, String::new()), (true, String::new()), (true, String::new())];
    for side in [Side::Right, Side::Left] {
        for x in departure_samples(st, sm, side) {
            let Some(o) = departure_at(st, &x) else { continue };
            let idx = match (side, o) {
                (Side::Right, Orientation::Positive) => 0,
                (Side::Right, Orientation::Negative) => 1,
                (Side::Left, Orientation::Positive) => 2,
                (Side::Left, Orientation::Negative) => 3,
            };
            let ok = match idx {
                0 => {
                    (departure_at(sm, &x) == Some(Orientation::Positive) && st.at(&x) == sm.at(&x))
                        || in_alpha_cell(&x, &|i| b1.contains(&i))
                }
                1 => in_alpha_cell(&x, &|i| neg_alpha(i) && !b1.contains(&i)),
                2 => {
                    (departure_at(sm, &x) == Some(Orientation::Positive) && st.at(&x) == sm.at(&x))
                        || in_beta_cell(&x, &|j| b2.contains(&j))
                }
                _ => in_beta_cell(&x, &|j| neg_beta(j) && !b2.contains(&j)),
            };
            if !ok && claim[idx].0 {
                claim[idx] = (false, format!("{} {} departure of s̃ at {x} is out of place", side.as_str(), o.as_str()));
            }
        }
    }
    let names = ["claim-right-positive", "claim-right-negative", "claim-left-positive", "claim-left-negative"];
    for (name, (passed, detail)) in names.into_iter().zip(claim) {
        let detail = if passed { "departures located as claimed".to_string() } else { detail };
        checks.push(Check { name, passed, detail });
    }
    BridgeReport { checks }
}
