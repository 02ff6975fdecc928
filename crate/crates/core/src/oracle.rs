//! Brute-force re-checks of the contour machinery, straight from the definitions.
//!
//! Nothing here calls into [`crate::contour`]'s scanning code; the only shared
//! vocabulary is the result types.

use crate::contour::{ContourData, ContourPoint, Orientation, RadialDeparture, Side};
use crate::error::{Error, Result};
use crate::plmap::{PlMap, PointedMap};
use crate::scalar::Scalar;

/// Multiples of `1/resolution`, plus every breakpoint and every point where
/// the map crosses one of its breakpoint values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: u32,
}

impl GridSpec {
    pub fn new(resolution: u32) -> Self {
        assert!(resolution > 0, "grid resolution must be positive");
        GridSpec { resolution }
    }

    /// Grid points of `f` inside `[a, b]`, sorted and deduplicated.
    pub fn points<T: Scalar>(&self, f: &PlMap<T>, a: &T, b: &T) -> Vec<T> {
        let d = self.resolution as i64;
        let mut out: Vec<T> = Vec::new();
        for k in -d..=d {
            let x = T::frac(k, d);
            if x >= *a && x <= *b {
                out.push(x);
            }
        }
        out.extend(critical_points(f, a, b));
        out.sort();
        out.dedup();
        out
    }
}

/// Breakpoints in `[a, b]`, the ends, and all preimages there of breakpoint values.
fn critical_points<T: Scalar>(f: &PlMap<T>, a: &T, b: &T) -> Vec<T> {
    let mut out = vec![a.clone(), b.clone()];
    out.extend(f.xs().filter(|x| *x >= a && *x <= b).cloned());
    let mut values: Vec<T> = f.points().iter().map(|p| p.1.clone()).collect();
    values.push(f.at(a));
    values.push(f.at(b));
    values.sort();
    values.dedup();
    for v in &values {
        out.extend(f.preimages(v, a, b));
    }
    out.sort();
    out.dedup();
    out
}

/// Every grid pair `⟨x1, x2⟩` that is a radial departure, checked pointwise.
pub fn oracle_radial_departures<T: Scalar>(f: &PointedMap<T>, grid: GridSpec) -> Vec<RadialDeparture<T>> {
    let map = f.map();
    let zero = T::zero();
    let one = T::one();
    let pts = grid.points(map, &-one.clone(), &one);
    let zi = pts.iter().position(|x| x.is_zero()).expect("grid contains 0");
    let vals: Vec<T> = pts.iter().map(|x| map.at(x)).collect();
    // Extremes over the grid points strictly between each point and 0 (0 included).
    let n = pts.len();
    let mut inner_min: Vec<T> = vec![zero.clone(); n];
    let mut inner_max: Vec<T> = vec![zero.clone(); n];
    let (mut lo, mut hi) = (vals[zi].clone(), vals[zi].clone());
    for i in (0..zi).rev() {
        inner_min[i] = lo.clone();
        inner_max[i] = hi.clone();
        lo = lo.min(vals[i].clone());
        hi = hi.max(vals[i].clone());
    }
    let (mut lo, mut hi) = (vals[zi].clone(), vals[zi].clone());
    for i in zi + 1..n {
        inner_min[i] = lo.clone();
        inner_max[i] = hi.clone();
        lo = lo.min(vals[i].clone());
        hi = hi.max(vals[i].clone());
    }
    let mut out = Vec::new();
    for i in 0..zi {
        for j in zi + 1..n {
            let lo = inner_min[i].clone().min(inner_min[j].clone());
            let hi = inner_max[i].clone().max(inner_max[j].clone());
            let (a, b) = (&vals[i], &vals[j]);
            let orientation = if *a < lo && hi < *b {
                Some(Orientation::Positive)
            } else if *b < lo && hi < *a {
                Some(Orientation::Negative)
            } else {
                None
            };
            if let Some(orientation) = orientation {
                out.push(RadialDeparture { x1: pts[i].clone(), x2: pts[j].clone(), orientation });
            }
        }
    }
    out
}

/// Which orientations occur among the grid witnesses.
pub fn oracle_orientations<T: Scalar>(f: &PointedMap<T>, grid: GridSpec) -> (bool, bool) {
    let all = oracle_radial_departures(f, grid);
    (
        all.iter().any(|w| w.orientation == Orientation::Positive),
        all.iter().any(|w| w.orientation == Orientation::Negative),
    )
}

/// Samples of one side moving away from 0: every critical point and every cell midpoint.
fn side_samples<T: Scalar>(f: &PlMap<T>, side: Side) -> Vec<T> {
    let zero = T::zero();
    let one = T::one();
    let crit = match side {
        Side::Right => critical_points(f, &zero, &one),
        Side::Left => critical_points(f, &-one.clone(), &zero),
    };
    let mut out: Vec<T> = Vec::with_capacity(crit.len() * 2);
    for w in crit.windows(2) {
        out.push(w[0].clone());
        out.push(T::mid(&w[0], &w[1]));
    }
    out.push(crit[crit.len() - 1].clone());
    out.retain(|x| !x.is_zero());
    if side == Side::Left {
        out.reverse();
    }
    out
}

/// `f(x) ∉ f([0, x))` (or `f((x, 0])` on the left), from the definition.
fn is_departure<T: Scalar>(f: &PlMap<T>, x: &T) -> Option<Orientation> {
    let zero = T::zero();
    let v = f.at(x);
    let o = Orientation::of(&v)?;
    let (a, b) = if x.is_positive() { (zero, x.clone()) } else { (x.clone(), zero) };
    // Attained values on the half-open interval: the near end plus every breakpoint strictly inside.
    let near = if x.is_positive() { f.at(&a) } else { f.at(&b) };
    let mut attained = vec![near];
    attained.extend(f.points().iter().filter(|(p, _)| *p > a && *p < b).map(|(_, y)| y.clone()));
    let outside = match o {
        Orientation::Positive => attained.iter().all(|y| *y < v),
        Orientation::Negative => attained.iter().all(|y| *y > v),
    };
    outside.then_some(o)
}

fn oracle_side<T: Scalar>(f: &PlMap<T>, side: Side) -> Vec<ContourPoint<T>> {
    let deps: Vec<(T, Orientation)> = side_samples(f, side)
        .into_iter()
        .filter_map(|x| is_departure(f, &x).map(|o| (x, o)))
        .collect();
    let mut out = vec![ContourPoint { point: T::zero(), value: T::zero(), orientation: None }];
    for (i, (alpha, o)) in deps.iter().enumerate() {
        // For each later departure x, some opposite departure y lies in (α, x].
        let mut seen_opposite = false;
        let qualifies = deps[i + 1..].iter().all(|(_, ox)| {
            seen_opposite |= *ox != *o;
            seen_opposite
        });
        if qualifies {
            out.push(ContourPoint { point: alpha.clone(), value: f.at(alpha), orientation: Some(*o) });
        }
    }
    out
}

/// Contour points by literal evaluation of the defining quantifiers.
pub fn oracle_contour_points<T: Scalar>(f: &PointedMap<T>) -> Result<ContourData<T>> {
    if !f.right_nonconstant() {
        return Err(Error::DegenerateSide("right"));
    }
    if !f.left_nonconstant() {
        return Err(Error::DegenerateSide("left"));
    }
    Ok(ContourData { right: oracle_side(f.map(), Side::Right), left: oracle_side(f.map(), Side::Left) })
}

/// A point where `t ∘ s` and `f` differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement<T> {
    pub x: T,
    pub composed: T,
    pub expected: T,
}

/// Compares `t ∘ s` with `f` on the common refinement of their breakpoints.
/// `Ok(None)` means they agree everywhere.
pub fn oracle_factorization<T: Scalar>(t: &PlMap<T>, s: &PlMap<T>, f: &PlMap<T>) -> Result<Option<Disagreement<T>>> {
    if s.domain() != f.domain() {
        return Err(Error::Domain("s and f have different domains".into()));
    }
    let (a, b) = s.domain();
    let mut xs: Vec<T> = s.xs().chain(f.xs()).cloned().collect();
    for c in t.xs() {
        xs.extend(s.preimages(c, a, b));
    }
    xs.sort();
    xs.dedup();
    for x in xs {
        let y = s.at(&x);
        let composed = t.evaluate(&y).map_err(|_| Error::Composition(format!("s({x}) = {y} leaves dom t")))?;
        let expected = f.at(&x);
        if composed != expected {
            return Ok(Some(Disagreement { x, composed, expected }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{contour_points, meandering_lift, radial_departure_exists};
    use crate::fixtures::*;
    use crate::Q;

    #[test]
    fn radial_oracle_examples() {
        let g = GridSpec::new(16);
        assert!(oracle_radial_departures(&z_p(), g).iter().any(|w| w.orientation == Orientation::Negative));
        assert!(radial_departure_exists(&z_p(), Orientation::Negative).is_some());
        for d in [4, 16, 64] {
            assert!(!oracle_orientations(&w_p(), GridSpec::new(d)).1);
        }
        assert_eq!(oracle_orientations(&id_p(), g), (true, false));
    }

    #[test]
    fn contour_oracle_examples() {
        assert_eq!(oracle_contour_points(&m_p()).unwrap(), contour_points(&m_p()).unwrap());
        assert_eq!(oracle_contour_points(&w_p()).unwrap(), contour_points(&w_p()).unwrap());
        let c = oracle_contour_points(&id_p()).unwrap();
        assert_eq!((c.alpha(1), c.beta(1)), (&Q::int(1), &Q::int(-1)));
    }

    #[test]
    fn factorization_oracle_examples() {
        let s = meandering_lift(&m_p()).unwrap();
        assert_eq!(oracle_factorization(&w(), s.map(), &m()).unwrap(), None);
        let bad = PlMap::new(vec![(Q::int(-1), Q::int(-1)), (Q::frac(1, 3), Q::frac(1, 2)), (Q::int(1), Q::int(1))]).unwrap();
        let d = oracle_factorization(&w(), &bad, &w()).unwrap().unwrap();
        assert!(d.composed != d.expected);
        assert_eq!(oracle_factorization(&id(), &z(), &z()).unwrap(), None);
    }
}
