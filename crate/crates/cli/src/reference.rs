//! Known values for catalog entries, used as the reference column.

use std::f64::consts::PI;

use stratlk::germ::{ConeGerm, Link};
use stratlk::lkmeasure::{Geometry, Shape};

fn args(name: &str) -> (String, Vec<f64>) {
    let mut parts = name.split(':');
    let kind = parts.next().unwrap_or("").to_string();
    (kind, parts.filter_map(|p| p.parse().ok()).collect())
}

/// `Lambda_k` of a catalog shape, when known in closed form.
pub fn shape_lambda(shape: &Shape, name: &str, k: usize) -> Option<f64> {
    if k == 0 {
        return Some(shape.euler_characteristic() as f64);
    }
    if k > shape.dim() {
        return Some(0.0);
    }
    if let Geometry::Pl(c) = &shape.geometry {
        if k == c.dim() {
            return Some(c.cells().filter(|(_, v)| v.len() == k + 1).map(|(id, _)| c.cell_volume(id)).sum());
        }
    }
    let (kind, a) = args(name);
    let v = match (kind.as_str(), k) {
        ("cube", _) => 3.0,
        ("sphere", 1) | ("torus", 1) => 0.0,
        ("sphere", 2) => 4.0 * PI * a[0] * a[0],
        ("torus", 2) => 4.0 * PI * PI * a[0] * a[1],
        ("disk", 1) | ("hemisphere", 1) => PI * a[0],
        ("disk", 2) => PI * a[0] * a[0],
        ("hemisphere", 2) => 2.0 * PI * a[0] * a[0],
        ("circle", 1) => 2.0 * PI * a[0],
        ("ball", 1) => 4.0 * a[0],
        ("ball", 2) => 2.0 * PI * a[0] * a[0],
        ("ball", 3) => 4.0 * PI * a[0].powi(3) / 3.0,
        _ => return None,
    };
    Some(v)
}

/// `L_k^loc` of a catalog germ, when known in closed form.
pub fn germ_local(x: &ConeGerm, k: usize) -> Option<f64> {
    let (kind, a) = args(&x.name);
    match (&x.link, kind.as_str()) {
        (_, "rays") => {
            let h = a[0] / 2.0;
            Some(match k {
                0 => 1.0 - h,
                1 => h,
                _ => 0.0,
            })
        }
        (_, "halfplane") => Some(if k == 1 || k == 2 { 0.5 } else { 0.0 }),
        (Link::Circle { theta }, _) => Some(match k {
            0 => 1.0 - theta.sin(),
            2 => theta.sin(),
            _ => 0.0,
        }),
        _ => None,
    }
}
