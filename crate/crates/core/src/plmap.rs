//! Piecewise-linear maps on closed rational intervals.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A continuous piecewise-linear map given by its breakpoints.
///
/// The x-coordinates are strictly increasing; the map is linear between
/// consecutive breakpoints. `codomain` is declared metadata and every
/// breakpoint value must lie inside it.
///
/// Equality compares canonical forms, so two breakpoint lists describing the
/// same function are equal.
#[derive(Clone)]
pub struct PlMap<T> {
    points: Vec<(T, T)>,
    codomain: (T, T),
}

impl<T: Scalar> PlMap<T> {
    /// A map into `[-1, 1]`.
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        Self::with_codomain(points, -T::one(), T::one())
    }

    pub fn with_codomain(points: Vec<(T, T)>, lo: T, hi: T) -> Result<Self> {
        if lo > hi {
            return Err(Error::Codomain(format!("empty codomain [{lo}, {hi}]")));
        }
        if points.len() < 2 {
            return Err(Error::Domain("a map needs at least two breakpoints".into()));
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Domain(format!(
                    "breakpoint x-coordinates must increase strictly ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some((x, y)) = points.iter().find(|(_, y)| *y < lo || *y > hi) {
            return Err(Error::Codomain(format!(
                "value {y} at {x} lies outside [{lo}, {hi}]"
            )));
        }
        Ok(PlMap { points, codomain: (lo, hi) })
    }

    /// A map whose codomain is the hull of its values.
    pub fn spanning(points: Vec<(T, T)>) -> Result<Self> {
        let lo = points.iter().map(|p| p.1.clone()).min();
        let hi = points.iter().map(|p| p.1.clone()).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => Self::with_codomain(points, lo, hi),
            _ => Err(Error::Domain("a map needs at least two breakpoints".into())),
        }
    }

    pub fn identity(a: T, b: T) -> Result<Self> {
        Self::spanning(vec![(a.clone(), a), (b.clone(), b)])
    }

    pub fn constant(a: T, b: T, value: T) -> Result<Self> {
        Self::spanning(vec![(a, value.clone()), (b, value)])
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = &T> {
        self.points.iter().map(|p| &p.0)
    }

    pub fn domain(&self) -> (&T, &T) {
        (&self.points[0].0, &self.points[self.points.len() - 1].0)
    }

    pub fn codomain(&self) -> (&T, &T) {
        (&self.codomain.0, &self.codomain.1)
    }

    /// Replaces the declared codomain, checking every value against it.
    pub fn recodomain(&self, lo: T, hi: T) -> Result<Self> {
        Self::with_codomain(self.points.clone(), lo, hi)
    }

    pub fn contains(&self, x: &T) -> bool {
        let (a, b) = self.domain();
        a <= x && x <= b
    }

    /// Exact value at `x`.
    pub fn evaluate(&self, x: &T) -> Result<T> {
        if !self.contains(x) {
            let (a, b) = self.domain();
            return Err(Error::Domain(format!("{x} is outside [{a}, {b}]")));
        }
        Ok(self.at(x))
    }

    /// Exact value at `x`; panics outside the domain.
    pub fn at(&self, x: &T) -> T {
        let idx = self.points.partition_point(|p| p.0 < *x);
        assert!(idx < self.points.len(), "{x} is outside the domain");
        let (px, py) = &self.points[idx];
        if px == x {
            return py.clone();
        }
        assert!(idx > 0, "{x} is outside the domain");
        lerp(&self.points[idx - 1], &self.points[idx], x)
    }

    /// Removes interior breakpoints collinear with their neighbours.
    pub fn canonicalize(&self) -> Self {
        let mut out: Vec<(T, T)> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], p) {
                out.pop();
            }
            out.push(p.clone());
        }
        PlMap { points: out, codomain: self.codomain.clone() }
    }

    pub fn is_canonical(&self) -> bool {
        self.points.windows(3).all(|w| !collinear(&w[0], &w[1], &w[2]))
    }

    /// `self ∘ inner`. The image of `inner` must lie in the domain of `self`.
    pub fn compose(&self, inner: &PlMap<T>) -> Result<Self> {
        let (lo, hi) = inner.value_range();
        if !self.contains(&lo) || !self.contains(&hi) {
            let (a, b) = self.domain();
            return Err(Error::Composition(format!(
                "inner image [{lo}, {hi}] escapes outer domain [{a}, {b}]"
            )));
        }
        let outer_xs: Vec<&T> = self.xs().collect();
        let mut pts: Vec<(T, T)> = Vec::with_capacity(inner.points.len() * 2);
        for w in inner.points.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            pts.push((x0.clone(), self.at(y0)));
            if y0 != y1 {
                let (ylo, yhi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
                let start = outer_xs.partition_point(|c| *c <= ylo);
                let end = outer_xs.partition_point(|c| *c < yhi);
                let mut cuts: Vec<T> = outer_xs[start..end]
                    .iter()
                    .map(|c| {
                        x0.clone()
                            + ((*c).clone() - y0.clone()) * (x1.clone() - x0.clone())
                                / (y1.clone() - y0.clone())
                    })
                    .collect();
                if y0 > y1 {
                    cuts.reverse();
                }
                for x in cuts {
                    let y = inner.at(&x);
                    pts.push((x, self.at(&y)));
                }
            }
        }
        let (xl, yl) = &inner.points[inner.points.len() - 1];
        pts.push((xl.clone(), self.at(yl)));
        let out = PlMap { points: pts, codomain: self.codomain.clone() };
        Ok(out.canonicalize())
    }

    /// `x ↦ self(-x)` on the negated domain.
    pub fn reflect(&self) -> Self {
        let points = self
            .points
            .iter()
            .rev()
            .map(|(x, y)| (-x.clone(), y.clone()))
            .collect();
        PlMap { points, codomain: self.codomain.clone() }
    }

    /// `x ↦ -self(x)`.
    pub fn negate_values(&self) -> Self {
        let points = self.points.iter().map(|(x, y)| (x.clone(), -y.clone())).collect();
        PlMap { points, codomain: (-self.codomain.1.clone(), -self.codomain.0.clone()) }
    }

    /// The restriction to `[a, b]`, with interpolated endpoints.
    pub fn restrict(&self, a: &T, b: &T) -> Result<Self> {
        if a >= b || !self.contains(a) || !self.contains(b) {
            let (lo, hi) = self.domain();
            return Err(Error::Domain(format!(
                "[{a}, {b}] is not a nondegenerate subinterval of [{lo}, {hi}]"
            )));
        }
        let mut pts = vec![(a.clone(), self.at(a))];
        pts.extend(self.points.iter().filter(|(x, _)| x > a && x < b).cloned());
        pts.push((b.clone(), self.at(b)));
        Ok(PlMap { points: pts, codomain: self.codomain.clone() })
    }

    /// Exact minimum and maximum over `[a, b]` (`a == b` allowed).
    pub fn image(&self, a: &T, b: &T) -> Result<(T, T)> {
        if a > b || !self.contains(a) || !self.contains(b) {
            let (lo, hi) = self.domain();
            return Err(Error::Domain(format!("[{a}, {b}] is not inside [{lo}, {hi}]")));
        }
        Ok(self.image_unchecked(a, b))
    }

    pub(crate) fn image_unchecked(&self, a: &T, b: &T) -> (T, T) {
        let fa = self.at(a);
        let fb = self.at(b);
        let mut lo = fa.clone().min(fb.clone());
        let mut hi = fa.max(fb);
        for (x, y) in &self.points {
            if x > a && x < b {
                if *y < lo {
                    lo = y.clone();
                }
                if *y > hi {
                    hi = y.clone();
                }
            }
        }
        (lo, hi)
    }

    /// Minimum and maximum over the whole domain.
    pub fn value_range(&self) -> (T, T) {
        let lo = self.points.iter().map(|p| &p.1).min().cloned().expect("nonempty");
        let hi = self.points.iter().map(|p| &p.1).max().cloned().expect("nonempty");
        (lo, hi)
    }

    pub fn is_constant_on(&self, a: &T, b: &T) -> bool {
        let (lo, hi) = self.image_unchecked(a, b);
        lo == hi
    }

    /// Breakpoint x-coordinates strictly inside `(a, b)`.
    pub fn breakpoints_between(&self, a: &T, b: &T) -> Vec<T> {
        self.xs().filter(|x| *x > a && *x < b).cloned().collect()
    }

    /// All `x ∈ [a, b]` with `self(x) == y`, increasing. On an interval where the
    /// map is constantly `y`, only the endpoints of that interval are listed.
    pub fn preimages(&self, y: &T, a: &T, b: &T) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        let push = |x: T, out: &mut Vec<T>| {
            if out.last() != Some(&x) {
                out.push(x);
            }
        };
        let r = match self.restrict(a, b) {
            Ok(r) => r,
            Err(_) => {
                if a == b && self.contains(a) && self.at(a) == *y {
                    return vec![a.clone()];
                }
                return out;
            }
        };
        for w in r.points.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if y0 == y && y1 == y {
                push(x0.clone(), &mut out);
                push(x1.clone(), &mut out);
                continue;
            }
            if y0 == y {
                push(x0.clone(), &mut out);
            } else if (y0 < y && y < y1) || (y1 < y && y < y0) {
                let x = x0.clone()
                    + (y.clone() - y0.clone()) * (x1.clone() - x0.clone()) / (y1.clone() - y0.clone());
                push(x, &mut out);
            }
            if y1 == y {
                push(x1.clone(), &mut out);
            }
        }
        // Drop interior points of constant runs: keep first and last of each run.
        let mut trimmed: Vec<T> = Vec::with_capacity(out.len());
        for (i, x) in out.iter().enumerate() {
            let interior = i > 0
                && i + 1 < out.len()
                && r.is_constant_on(&out[i - 1], x)
                && r.is_constant_on(x, &out[i + 1]);
            if !interior {
                trimmed.push(x.clone());
            }
        }
        trimmed
    }

    /// Whether the map is strictly monotone on `[a, b]`.
    pub fn is_injective_on(&self, a: &T, b: &T) -> bool {
        if a == b {
            return true;
        }
        let Ok(r) = self.restrict(a, b) else { return false };
        let inc = r.points.windows(2).all(|w| w[0].1 < w[1].1);
        let dec = r.points.windows(2).all(|w| w[0].1 > w[1].1);
        inc || dec
    }

    /// The inverse of a strictly monotone map.
    pub fn inverse(&self) -> Result<Self> {
        let (a, b) = self.domain();
        if !self.is_injective_on(a, b) {
            return Err(Error::Domain("map is not strictly monotone".into()));
        }
        let mut pts: Vec<(T, T)> = self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        if pts[0].0 > pts[1].0 {
            pts.reverse();
        }
        PlMap::with_codomain(pts, a.clone(), b.clone())
    }

    /// Glues maps on consecutive intervals. Adjacent pieces must agree at the seam.
    pub fn concat(parts: &[PlMap<T>]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("nothing to concatenate".into()))?;
        let mut pts = first.points.clone();
        let mut lo = first.codomain.0.clone();
        let mut hi = first.codomain.1.clone();
        for p in &parts[1..] {
            let (lx, ly) = pts.last().expect("nonempty");
            let (fx, fy) = &p.points[0];
            if lx != fx || ly != fy {
                return Err(Error::InvariantViolation(format!(
                    "pieces do not meet: ({lx}, {ly}) then ({fx}, {fy})"
                )));
            }
            pts.extend(p.points[1..].iter().cloned());
            lo = lo.min(p.codomain.0.clone());
            hi = hi.max(p.codomain.1.clone());
        }
        Ok(PlMap { points: pts, codomain: (lo, hi) }.canonicalize())
    }

    /// Overwrites the map on the domains of `patches`, which must lie inside
    /// this map's domain, have disjoint interiors and agree with it at their ends.
    pub fn paste(&self, patches: &[&PlMap<T>]) -> Result<Self> {
        let mut sorted: Vec<&PlMap<T>> = patches.to_vec();
        sorted.sort_by(|a, b| a.domain().0.cmp(b.domain().0));
        let (a, b) = self.domain();
        let mut parts: Vec<PlMap<T>> = Vec::new();
        let mut cursor = a.clone();
        for p in sorted {
            let (pa, pb) = p.domain();
            if pa < &cursor || pb > b {
                return Err(Error::InvariantViolation(format!(
                    "patch on [{pa}, {pb}] overlaps or leaves the domain"
                )));
            }
            if *pa > cursor {
                parts.push(self.restrict(&cursor, pa)?);
            }
            parts.push(p.clone());
            cursor = pb.clone();
        }
        if cursor < *b {
            parts.push(self.restrict(&cursor, b)?);
        }
        let glued = Self::concat(&parts)?;
        Ok(PlMap { points: glued.points, codomain: self.codomain.clone() }.canonicalize())
    }

    /// Union of the breakpoint x-coordinates of several maps on a common domain.
    pub fn common_partition(maps: &[&PlMap<T>]) -> Vec<T> {
        let mut xs: Vec<T> = maps.iter().flat_map(|m| m.xs().cloned()).collect();
        xs.sort();
        xs.dedup();
        xs
    }
}

pub(crate) fn lerp<T: Scalar>(p0: &(T, T), p1: &(T, T), x: &T) -> T {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    y0.clone() + (y1.clone() - y0.clone()) * (x.clone() - x0.clone()) / (x1.clone() - x0.clone())
}

fn collinear<T: Scalar>(a: &(T, T), b: &(T, T), c: &(T, T)) -> bool {
    (b.1.clone() - a.1.clone()) * (c.0.clone() - b.0.clone())
        == (c.1.clone() - b.1.clone()) * (b.0.clone() - a.0.clone())
}

impl<T: Scalar> PartialEq for PlMap<T> {
    fn eq(&self, other: &Self) -> bool {
        self.canonicalize().points == other.canonicalize().points
    }
}

impl<T: Scalar> Eq for PlMap<T> {}

impl<T: Scalar> PartialOrd for PlMap<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on canonical breakpoint lists; used for map-valued keys.
impl<T: Scalar> Ord for PlMap<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonicalize().points.cmp(&other.canonicalize().points)
    }
}

impl<T: Scalar> std::hash::Hash for PlMap<T> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonicalize().points.hash(state);
    }
}

impl<T: Scalar> fmt::Debug for PlMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PlMap[")?;
        for (i, (x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({x}, {y})")?;
        }
        f.write_str("]")
    }
}

impl<T: Scalar> fmt::Display for PlMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A map `[-1, 1] → [-1, 1]` fixing `0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PointedMap<T: Scalar> {
    map: PlMap<T>,
    left_nonconstant: bool,
    right_nonconstant: bool,
}

impl<T: Scalar> PointedMap<T> {
    pub fn new(map: PlMap<T>) -> Result<Self> {
        let (a, b) = map.domain();
        let one = T::one();
        if *a != -one.clone() || *b != one {
            return Err(Error::Domain(format!("pointed maps live on [-1, 1], not [{a}, {b}]")));
        }
        let (lo, hi) = map.value_range();
        if lo < -one.clone() || hi > one {
            return Err(Error::Codomain(format!("values [{lo}, {hi}] leave [-1, 1]")));
        }
        let zero = T::zero();
        let v = map.at(&zero);
        if !v.is_zero() {
            return Err(Error::Domain(format!("f(0) = {v}, expected 0")));
        }
        let map = map.recodomain(-T::one(), T::one())?;
        let left_nonconstant = !map.is_constant_on(&-T::one(), &zero);
        let right_nonconstant = !map.is_constant_on(&zero, &T::one());
        Ok(PointedMap { map, left_nonconstant, right_nonconstant })
    }

    pub fn from_points(points: Vec<(T, T)>) -> Result<Self> {
        Self::new(PlMap::new(points)?)
    }

    pub fn identity() -> Self {
        Self::from_points(vec![(-T::one(), -T::one()), (T::one(), T::one())]).expect("identity")
    }

    pub fn map(&self) -> &PlMap<T> {
        &self.map
    }

    pub fn into_map(self) -> PlMap<T> {
        self.map
    }

    pub fn at(&self, x: &T) -> T {
        self.map.at(x)
    }

    pub fn left_nonconstant(&self) -> bool {
        self.left_nonconstant
    }

    pub fn right_nonconstant(&self) -> bool {
        self.right_nonconstant
    }

    pub fn sides_nonconstant(&self) -> bool {
        self.left_nonconstant && self.right_nonconstant
    }

    pub fn compose(&self, inner: &PointedMap<T>) -> Result<Self> {
        Self::new(self.map.compose(&inner.map)?)
    }

    /// `x ↦ self(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(self.map.reflect()).expect("reflection of a pointed map is pointed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::Q;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Q {
        Q::frac(n, d)
    }

    fn pts(v: &[(i64, i64, i64, i64)]) -> Vec<(Q, Q)> {
        v.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(id().evaluate(&q(1, 3)).unwrap(), q(1, 3));
        assert_eq!(w().evaluate(&q(3, 4)).unwrap(), q(1, 4));
        assert_eq!(tent().evaluate(&q(1, 3)).unwrap(), q(1, 3));
        assert!(matches!(w().evaluate(&q(3, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(id().compose(&w()).unwrap(), w());
        assert_eq!(w().compose(&id()).unwrap(), w());
        let ww = w().compose(&w()).unwrap();
        let right = ww.restrict(&q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(
            right.points(),
            &pts(&[(0, 1, 0, 1), (1, 4, 1, 1), (1, 2, -1, 2), (2, 3, 1, 1), (5, 6, 0, 1), (1, 1, -1, 2)])[..]
        );
        let left = ww.restrict(&q(-1, 1), &q(0, 1)).unwrap();
        assert_eq!(left, PlMap::identity(q(-1, 1), q(0, 1)).unwrap());
    }

    #[test]
    fn compose_rejects_image_escape() {
        let g = PlMap::spanning(pts(&[(0, 1, 0, 1), (1, 1, 2, 1)])).unwrap();
        assert!(matches!(id().compose(&g), Err(Error::Composition(_))));
    }

    #[test]
    fn reflect_examples() {
        let left_id = id().restrict(&q(-1, 1), &q(0, 1)).unwrap();
        assert_eq!(left_id.reflect().points(), &pts(&[(0, 1, 0, 1), (1, 1, -1, 1)])[..]);
        let left_z = z().restrict(&q(-1, 1), &q(0, 1)).unwrap();
        assert_eq!(left_z.reflect().points(), &pts(&[(0, 1, 0, 1), (1, 2, 1, 4), (1, 1, 1, 1)])[..]);
        assert_eq!(m().reflect().reflect().points(), m().points());
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(w().restrict(&q(0, 1), &q(1, 1)).unwrap().points(), &pts(&[(0, 1, 0, 1), (1, 2, 1, 1), (1, 1, -1, 2)])[..]);
        assert_eq!(id().restrict(&q(-1, 1), &q(0, 1)).unwrap().points(), &pts(&[(-1, 1, -1, 1), (0, 1, 0, 1)])[..]);
        assert_eq!(
            w().restrict(&q(1, 4), &q(3, 4)).unwrap().points(),
            &pts(&[(1, 4, 1, 2), (1, 2, 1, 1), (3, 4, 1, 4)])[..]
        );
        assert!(matches!(w().restrict(&q(1, 2), &q(1, 4)), Err(Error::Domain(_))));
    }

    #[test]
    fn canonicalize_examples() {
        let raw = PlMap::new(pts(&[(-1, 1, -1, 1), (0, 1, 0, 1), (1, 1, 1, 1)])).unwrap();
        assert_eq!(raw.canonicalize().points(), id().points());
        assert_eq!(w().canonicalize().points(), w().points());
        assert_eq!(id().compose(&id()).unwrap().canonicalize().points(), id().points());
    }

    #[test]
    fn image_examples() {
        assert_eq!(w().image(&q(0, 1), &q(1, 1)).unwrap(), (q(-1, 2), q(1, 1)));
        assert_eq!(id().image(&q(-1, 1), &q(0, 1)).unwrap(), (q(-1, 1), q(0, 1)));
        assert_eq!(w().image(&q(-1, 4), &q(0, 1)).unwrap(), (q(-1, 4), q(0, 1)));
        assert!(w().image(&q(1, 2), &q(0, 1)).is_err());
    }

    #[test]
    fn codomain_is_checked() {
        assert!(matches!(PlMap::new(pts(&[(0, 1, 0, 1), (1, 1, 3, 2)])), Err(Error::Codomain(_))));
        let unit = PlMap::with_codomain(pts(&[(0, 1, 0, 1), (1, 1, 1, 2)]), q(0, 1), q(1, 1)).unwrap();
        assert_eq!(unit.codomain(), (&q(0, 1), &q(1, 1)));
    }

    #[test]
    fn preimages_handle_flat_runs() {
        let f = PlMap::new(pts(&[(0, 1, 0, 1), (1, 4, 1, 2), (1, 2, 1, 2), (3, 4, 1, 2), (1, 1, 0, 1)])).unwrap();
        assert_eq!(f.preimages(&q(1, 2), &q(0, 1), &q(1, 1)), vec![q(1, 4), q(3, 4)]);
        assert_eq!(f.preimages(&q(1, 4), &q(0, 1), &q(1, 1)), vec![q(1, 8), q(7, 8)]);
    }

    #[test]
    fn pointed_map_flags_constant_sides() {
        let f = PointedMap::from_points(pts(&[(-1, 1, 0, 1), (0, 1, 0, 1), (1, 1, 1, 1)])).unwrap();
        assert!(!f.left_nonconstant());
        assert!(f.right_nonconstant());
        assert!(PointedMap::new(tent()).is_err());
    }

    fn arb_map() -> impl Strategy<Value = PlMap<Q>> {
        (1usize..8, proptest::collection::vec((1i64..64, -64i64..=64), 1..8)).prop_map(|(_, raw)| {
            let mut xs: Vec<Q> = raw.iter().map(|(n, _)| q(*n, 64) * q(2, 1) - q(1, 1)).collect();
            xs.push(q(-1, 1));
            xs.push(q(1, 1));
            xs.sort();
            xs.dedup();
            let pts = xs.iter().enumerate().map(|(i, x)| (x.clone(), q(raw[i % raw.len()].1, 64))).collect();
            PlMap::new(pts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative(f in arb_map(), g in arb_map(), h in arb_map()) {
            let left = f.compose(&g).unwrap().compose(&h).unwrap();
            let right = f.compose(&g.compose(&h).unwrap()).unwrap();
            prop_assert_eq!(left.canonicalize().points().to_vec(), right.canonicalize().points().to_vec());
        }

        #[test]
        fn compose_agrees_pointwise(f in arb_map(), g in arb_map(), n in -64i64..=64) {
            let x = q(n, 64);
            let fg = f.compose(&g).unwrap();
            prop_assert_eq!(fg.at(&x), f.at(&g.at(&x)));
        }

        #[test]
        fn canonicalize_is_idempotent(f in arb_map(), n in -64i64..=64) {
            let c = f.canonicalize();
            prop_assert_eq!(c.canonicalize().points().to_vec(), c.points().to_vec());
            prop_assert!(c.is_canonical());
            let x = q(n, 64);
            prop_assert_eq!(c.at(&x), f.at(&x));
        }

        #[test]
        fn image_matches_breakpoint_scan(f in arb_map(), a in -64i64..=64, b in -64i64..=64) {
            let (a, b) = if a <= b { (q(a, 64), q(b, 64)) } else { (q(b, 64), q(a, 64)) };
            let mut vals = vec![f.at(&a), f.at(&b)];
            vals.extend(f.points().iter().filter(|p| p.0 >= a && p.0 <= b).map(|p| p.1.clone()));
            let lo = vals.iter().min().unwrap().clone();
            let hi = vals.iter().max().unwrap().clone();
            prop_assert_eq!(f.image(&a, &b).unwrap(), (lo, hi));
        }
    }
}
