//! Seeded random maps shared by the integration suites.
#![allow(dead_code)]
pub mod props;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zigzag::plmap::{PlMap, PointedMap};
use zigzag::{Scalar, Q};

pub const DEN: i64 = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn side_xs(rng: &mut ChaCha8Rng, count: usize, negative: bool) -> Vec<Q> {
    sample(rng, (DEN - 1) as usize, count)
        .into_iter()
        .map(|i| {
            let n = i as i64 + 1;
            Q::frac(if negative { -n } else { n }, DEN)
        })
        .collect()
}

/// A random map `[-1, 1] → [-1, 1]` with `f(0) = 0`, at most `max_points`
/// breakpoints, coordinates over `1/64`, and non-constant on both sides.
pub fn random_pointed(rng: &mut ChaCha8Rng, max_points: usize) -> PointedMap<Q> {
    assert!(max_points >= 5);
    loop {
        let interior = rng.gen_range(0..=max_points - 3);
        let left = rng.gen_range(0..=interior);
        let mut xs = side_xs(rng, left, true);
        xs.extend(side_xs(rng, interior - left, false));
        xs.extend([Q::int(-1), Q::int(1)]);
        xs.sort();
        let mut pts: Vec<(Q, Q)> = xs.into_iter().map(|x| (x, Q::frac(rng.gen_range(-DEN..=DEN), DEN))).collect();
        pts.push((Q::int(0), Q::int(0)));
        pts.sort();
        if let Ok(p) = PointedMap::new(PlMap::new(pts).expect("valid")) {
            if p.sides_nonconstant() {
                return p;
            }
        }
    }
}

/// Like [`random_pointed`], with `f(±1) = ±1` so that both sides sweep far.
pub fn random_sweeping(rng: &mut ChaCha8Rng, max_points: usize) -> PointedMap<Q> {
    let f = random_pointed(rng, max_points);
    let mut pts = f.map().points().to_vec();
    let last = pts.len() - 1;
    pts[0].1 = Q::int(-1);
    pts[last].1 = Q::int(1);
    PointedMap::new(PlMap::new(pts).expect("valid")).expect("pointed")
}

/// `f` with every breakpoint other than `0` and `±1` nudged by at most `1/(2·den)`
/// in each coordinate (only in x unless `move_y`), keeping the x-order and the
/// range `[-1, 1]`.
pub fn perturb(rng: &mut ChaCha8Rng, f: &PointedMap<Q>, den: i64, move_y: bool) -> PointedMap<Q> {
    let pts = f.map().points().to_vec();
    let last = pts.len() - 1;
    let jitter = |rng: &mut ChaCha8Rng| Q::frac(rng.gen_range(-2..=2), 4 * den);
    let mut out = Vec::with_capacity(pts.len());
    for (i, (x, y)) in pts.iter().enumerate() {
        let fixed_x = i == 0 || i == last || *x == Q::int(0);
        let nx = if fixed_x { x.clone() } else { x.clone() + jitter(rng) };
        let ny = if *x == Q::int(0) || !move_y { y.clone() } else { (y.clone() + jitter(rng)).clamp(Q::int(-1), Q::int(1)) };
        out.push((nx, ny));
    }
    let ordered = out.windows(2).all(|w| w[0].0 < w[1].0);
    match ordered.then(|| PlMap::new(out).ok().and_then(|m| PointedMap::new(m).ok())).flatten() {
        Some(p) if p.sides_nonconstant() => p,
        _ => f.clone(),
    }
}

/// A pair with `t_{f1} = t_{f1∘f2}`, or `None` when the draw misses.
pub fn hypothesis_pair(rng: &mut ChaCha8Rng) -> Option<(PointedMap<Q>, PointedMap<Q>)> {
    let f1 = random_pointed(rng, 6);
    let f2 = random_sweeping(rng, 12);
    props::same_contour(&f1, &f2).then_some((f1, f2))
}

/// A perturbation of the three-map example that still satisfies both contour
/// hypotheses, or `None` when the draw breaks them.
pub fn ex4_triple(rng: &mut ChaCha8Rng) -> Option<[PointedMap<Q>; 3]> {
    let [f1, f2, f3] = zigzag::fixtures::ex4();
    let den = rng.gen_range(10..=80);
    let t = [perturb(rng, &f1, den, false), perturb(rng, &f2, den, false), perturb(rng, &f3, den, true)];
    zigzag::bridging::check_bridge_hypotheses(&t[0], &t[1], &t[2]).is_ok().then_some(t)
}
