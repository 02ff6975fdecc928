//! Small named maps used throughout the tests, examples and CLI.

use crate::plmap::{PlMap, PointedMap};
use crate::scalar::Scalar;
use crate::Q;

fn build<T: Scalar>(v: &[(i64, i64, i64, i64)]) -> PlMap<T> {
    PlMap::new(v.iter().map(|&(a, b, c, d)| (T::frac(a, b), T::frac(c, d))).collect())
        .expect("fixture breakpoints are valid")
}

pub fn id_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, -1, 1), (1, 1, 1, 1)])
}

pub fn w_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, -1, 1), (0, 1, 0, 1), (1, 2, 1, 1), (1, 1, -1, 2)])
}

pub fn m_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, -1, 1), (0, 1, 0, 1), (1, 4, 1, 2), (3, 8, 1, 4), (1, 2, 1, 1), (1, 1, -1, 2)])
}

pub fn z_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, 1, 1), (-1, 2, 1, 4), (0, 1, 0, 1), (1, 4, -1, 2), (1, 1, 1, 1)])
}

/// The full tent map; it does not fix 0.
pub fn tent_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, -1, 1), (0, 1, 1, 1), (1, 1, -1, 1)])
}

/// First map of the three-map bridging example: `|x|` on the left, a zig-zag on the right.
pub fn ex4_f1_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, 1, 1), (0, 1, 0, 1), (1, 2, 1, 1), (1, 1, -1, 2)])
}

/// Middle map of the three-map bridging example. Its breakpoints `b₁ < … < b₈`
/// are the multiples of `1/5` other than `0`, `±1`, plus `3/10` where it
/// reaches `-2/5` before turning back up.
pub fn ex4_f2_in<T: Scalar>() -> PlMap<T> {
    build(&[
        (-1, 1, -1, 1),
        (-4, 5, 3, 5),
        (-3, 5, -1, 2),
        (-2, 5, 1, 10),
        (-1, 5, -1, 10),
        (0, 1, 0, 1),
        (1, 5, 1, 10),
        (3, 10, -2, 5),
        (2, 5, -3, 10),
        (3, 5, -3, 5),
        (4, 5, 1, 1),
        (1, 1, -4, 5),
    ])
}

/// Last map of the three-map bridging example; a zig-zag with a negative radial departure.
pub fn ex4_f3_in<T: Scalar>() -> PlMap<T> {
    build(&[(-1, 1, -1, 1), (-2, 3, 2, 5), (-1, 3, -1, 5), (0, 1, 0, 1), (1, 3, 1, 5), (2, 3, -3, 5), (1, 1, 1, 1)])
}

/// The breakpoints `b₁, …, b₈` of [`ex4_f2_in`], in order.
pub fn ex4_b<T: Scalar>() -> [T; 8] {
    [(-4, 5), (-3, 5), (-2, 5), (-1, 5), (1, 5), (2, 5), (3, 5), (4, 5)].map(|(n, d)| T::frac(n, d))
}

/// The three maps of the bridging example, as pointed maps.
pub fn ex4() -> [PointedMap<Q>; 3] {
    [ex4_f1_in(), ex4_f2_in(), ex4_f3_in()].map(|m| PointedMap::new(m).expect("pointed"))
}

pub fn id() -> PlMap<Q> {
    id_in()
}

pub fn w() -> PlMap<Q> {
    w_in()
}

pub fn m() -> PlMap<Q> {
    m_in()
}

pub fn z() -> PlMap<Q> {
    z_in()
}

pub fn tent() -> PlMap<Q> {
    tent_in()
}

pub fn id_p() -> PointedMap<Q> {
    PointedMap::new(id()).expect("pointed")
}

pub fn w_p() -> PointedMap<Q> {
    PointedMap::new(w()).expect("pointed")
}

pub fn m_p() -> PointedMap<Q> {
    PointedMap::new(m()).expect("pointed")
}

pub fn z_p() -> PointedMap<Q> {
    PointedMap::new(z()).expect("pointed")
}

/// Looks up a fixture by its conventional name.
pub fn by_name(name: &str) -> Option<PlMap<Q>> {
    match name.to_ascii_uppercase().as_str() {
        "ID" => Some(id()),
        "W" => Some(w()),
        "M" => Some(m()),
        "Z" => Some(z()),
        "TENT" => Some(tent()),
        "EX4.F1" => Some(ex4_f1_in()),
        "EX4.F2" => Some(ex4_f2_in()),
        "EX4.F3" => Some(ex4_f3_in()),
        _ => None,
    }
}
