//! Instance checks shared by the property suites and the acceptance run. Each
//! returns how many non-trivial comparisons it made, or a description of the
//! first violation.

use zigzag::bridging::construct_bridged;
use zigzag::contour::{
    classify_pair, contour_points, meandering_lift, radial_contour_factor, radial_departure_exists, radial_departures, reach,
    Orientation, RadialDeparture,
};
use zigzag::oracle::{oracle_contour_points, oracle_factorization, oracle_orientations, oracle_radial_departures, GridSpec};
use zigzag::plmap::{PlMap, PointedMap};
use zigzag::{Scalar, Q};

pub type Check = Result<usize, String>;

/// Witnesses from the record enumerator (both orientations) and the grid oracle.
pub fn witnesses(f: &PointedMap<Q>, grid: u32) -> Vec<RadialDeparture<Q>> {
    let mut out = radial_departures(f.map(), Orientation::Positive);
    out.extend(radial_departures(f.map(), Orientation::Negative));
    out.extend(oracle_radial_departures(f, GridSpec::new(grid)));
    out.sort_by(|a, b| (&a.x1, &a.x2).cmp(&(&b.x1, &b.x2)));
    out.dedup();
    out
}

fn nests(a1: &Q, a2: &Q, b1: &Q, b2: &Q) -> bool {
    let z = Q::int(0);
    (a1 < b1 && *b1 < z && z < *b2 && b2 < a2) || (b1 < a1 && *a1 < z && z < *a2 && a2 < b2)
}

/// `t_f ∘ s_f = f` exactly, `s_f` sign-preserving, and `t_{t_f} = t_f`.
pub fn factorization(f: &PointedMap<Q>) -> Check {
    let t = radial_contour_factor(f).map_err(|e| e.to_string())?;
    let s = meandering_lift(f).map_err(|e| e.to_string())?;
    let composed = t.map().compose(s.map()).map_err(|e| e.to_string())?;
    if composed.canonicalize().points() != f.map().canonicalize().points() {
        return Err(format!("t∘s ≠ f for f = {}", f.map()));
    }
    if let Some(d) = oracle_factorization(t.map(), s.map(), f.map()).map_err(|e| e.to_string())? {
        return Err(format!("oracle: t(s({})) = {} ≠ {}", d.x, d.composed, d.expected));
    }
    if let Some((x, y)) = s.map().points().iter().find(|(x, y)| x.clone() * y.clone() < Q::int(0)) {
        return Err(format!("lift is not sign-preserving at ({x}, {y}) for f = {}", f.map()));
    }
    if radial_contour_factor(&t).map_err(|e| e.to_string())? != t {
        return Err(format!("t_(t_f) ≠ t_f for f = {}", f.map()));
    }
    Ok(1)
}

/// Contour points and radial-departure verdicts agree with the oracle at `grid` and `2·grid`.
pub fn oracle_agreement(f: &PointedMap<Q>, grid: u32) -> Check {
    let fast = contour_points(f).map_err(|e| e.to_string())?;
    let slow = oracle_contour_points(f).map_err(|e| e.to_string())?;
    if fast != slow {
        return Err(format!("contour points differ for f = {}:\n{}vs\n{}", f.map(), fast.report(), slow.report()));
    }
    let decided = (
        radial_departure_exists(f, Orientation::Positive).is_some(),
        radial_departure_exists(f, Orientation::Negative).is_some(),
    );
    for d in [grid, 2 * grid] {
        let seen = oracle_orientations(f, GridSpec::new(d));
        if seen != decided {
            return Err(format!("grid {d}: oracle {seen:?} vs decision {decided:?} for f = {}", f.map()));
        }
    }
    Ok(1)
}

/// Opposite-orientation witnesses nest, in the domain and in the values.
pub fn prop_a(f: &PointedMap<Q>, grid: u32) -> Check {
    let ws = witnesses(f, grid);
    let (pos, neg): (Vec<_>, Vec<_>) = ws.iter().partition(|w| w.orientation == Orientation::Positive);
    let z = Q::int(0);
    let at = |x: &Q| f.at(x);
    for p in &pos {
        for n in &neg {
            if !nests(&p.x1, &p.x2, &n.x1, &n.x2) {
                return Err(format!("⟨{}, {}⟩+ and ⟨{}, {}⟩- do not nest in f = {}", p.x1, p.x2, n.x1, n.x2, f.map()));
            }
            let (a, b, c, d) = (at(&p.x1), at(&p.x2), at(&n.x1), at(&n.x2));
            let ok = (a < d && d < z && z < c && c < b) || (d < a && a < z && z < b && b < c);
            if !ok {
                return Err(format!("values of ⟨{}, {}⟩+ and ⟨{}, {}⟩- do not nest in f = {}", p.x1, p.x2, n.x1, n.x2, f.map()));
            }
        }
    }
    Ok(pos.len() * neg.len())
}

/// Orientation of `⟨x1, x2⟩` for `f ∘ g` from its orientation for `g` and the pushed-forward pair for `f`.
pub fn prop_c(f: &PointedMap<Q>, g: &PointedMap<Q>, grid: u32) -> Check {
    let fg = f.map().compose(g.map()).map_err(|e| e.to_string())?;
    let one = Q::int(1);
    let pts = GridSpec::new(grid).points(&fg, &-one.clone(), &one);
    let (left, right): (Vec<&Q>, Vec<&Q>) = pts.iter().filter(|x| **x != Q::int(0)).partition(|x| **x < Q::int(0));
    let mut seen = 0;
    for x1 in &left {
        for x2 in &right {
            let direct = classify_pair(&fg, x1, x2);
            let derived = match classify_pair(g.map(), x1, x2) {
                Some(Orientation::Positive) => classify_pair(f.map(), &g.at(x1), &g.at(x2)),
                Some(Orientation::Negative) => classify_pair(f.map(), &g.at(x2), &g.at(x1)).map(Orientation::opposite),
                None => None,
            };
            if direct != derived {
                return Err(format!("⟨{x1}, {x2}⟩: f∘g says {direct:?}, rule says {derived:?}; f = {}, g = {}", f.map(), g.map()));
            }
            seen += usize::from(direct.is_some());
        }
    }
    Ok(seen)
}

/// Every witness of `f` is a positive witness of the lift and lands on a witness of `t_f`.
pub fn lemma_d(f: &PointedMap<Q>, grid: u32) -> Check {
    let t = radial_contour_factor(f).map_err(|e| e.to_string())?;
    let mut lifts = vec![meandering_lift(f).map_err(|e| e.to_string())?];
    if t == *f {
        lifts.push(PointedMap::identity());
    }
    let ws = witnesses(f, grid);
    for s in &lifts {
        for w in &ws {
            if classify_pair(s.map(), &w.x1, &w.x2) != Some(Orientation::Positive) {
                return Err(format!("⟨{}, {}⟩ is not a positive departure of the lift {}", w.x1, w.x2, s.map()));
            }
            let (y1, y2) = (s.at(&w.x1), s.at(&w.x2));
            if classify_pair(t.map(), &y1, &y2).is_none() {
                return Err(format!("⟨{y1}, {y2}⟩ is not a departure of t_f = {}", t.map()));
            }
        }
    }
    Ok(ws.len() * lifts.len())
}

pub fn same_contour(f1: &PointedMap<Q>, f2: &PointedMap<Q>) -> bool {
    match (radial_contour_factor(f1), f1.compose(f2).and_then(|c| radial_contour_factor(&c))) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Negative witnesses of `f2` straddle every witness of `f1`, given `t_{f1} = t_{f1∘f2}`.
pub fn prop_e(f1: &PointedMap<Q>, f2: &PointedMap<Q>, grid: u32) -> Check {
    if !same_contour(f1, f2) {
        return Err("hypothesis t_(f1) = t_(f1∘f2) does not hold".into());
    }
    let neg: Vec<_> = witnesses(f2, grid).into_iter().filter(|w| w.orientation == Orientation::Negative).collect();
    let ys = witnesses(f1, grid);
    for n in &neg {
        let (a, b) = (f2.at(&n.x2), f2.at(&n.x1));
        for y in &ys {
            if !nests(&a, &b, &y.x1, &y.x2) {
                return Err(format!(
                    "negative ⟨{}, {}⟩ of f2 maps to ⟨{a}, {b}⟩, not nested with ⟨{}, {}⟩ of f1; f1 = {}, f2 = {}",
                    n.x1,
                    n.x2,
                    y.x1,
                    y.x2,
                    f1.map(),
                    f2.map()
                ));
            }
        }
    }
    Ok(neg.len() * ys.len())
}

/// `y ≤ y′ < 0` implies `L(y′) ≤ L(y)`, over breakpoints and midpoints of the left side.
pub fn l_monotone(t: &PlMap<Q>) -> Check {
    let zero = Q::int(0);
    let mut ys: Vec<Q> = t.xs().filter(|x| **x < zero).cloned().collect();
    let mids: Vec<Q> = ys.windows(2).map(|w| Q::mid(&w[0], &w[1])).collect();
    ys.extend(mids);
    if let Some(last) = ys.iter().max().cloned() {
        ys.push(Q::mid(&last, &zero));
    }
    ys.sort();
    ys.dedup();
    let ls: Vec<(Q, Q)> = ys.iter().filter_map(|y| reach(t, y).ok().map(|l| (y.clone(), l))).collect();
    let mut n = 0;
    for (i, (y, l)) in ls.iter().enumerate() {
        for (y2, l2) in &ls[i..] {
            if l2 > l {
                return Err(format!("L({y2}) = {l2} > L({y}) = {l} for t = {t}"));
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Every witness of `s₁ ∘ f₂` strictly nests with every bridging pair `⟨x₁⁽ʲ⁾, x₂⁽ʲ⁾⟩`.
pub fn star(f1: &PointedMap<Q>, f2: &PointedMap<Q>, f3: &PointedMap<Q>, grid: u32) -> Check {
    let bf = construct_bridged(f1, f2, f3, None).map_err(|e| e.to_string())?;
    let ws = witnesses(&bf.s, grid);
    for site in &bf.b2 {
        for w in &ws {
            if !nests(&w.x1, &w.x2, &site.x1, &site.x2) {
                return Err(format!("⟨{}, {}⟩ of s₁∘f₂ does not nest with ⟨{}, {}⟩ (j = {})", w.x1, w.x2, site.x1, site.x2, site.index));
            }
        }
    }
    Ok(ws.len() * bf.b2.len())
}
