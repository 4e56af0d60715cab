//! Slow cross-check for `alpha`: indices from Euler characteristics of
//! explicit level sets of the slice `X ∩ Q` inside a small ball.

use nalgebra::DVector;

use crate::smoothshape::SmoothStratum;

const WALK_STEPS: usize = 400;
const LINE_STEPS: usize = 801;

/// Points of the branch of `top ∩ span(e1, e2)` through `x` leaving in the
/// direction `e1`, up to distance `eps` or until the branch leaves the stratum.
fn walk_branch(top: &SmoothStratum, x: &DVector<f64>, e1: &DVector<f64>, e2: &DVector<f64>, eps: f64) -> Vec<DVector<f64>> {
    let mut out = vec![x.clone()];
    let mut b = 0.0;
    for k in 1..=WALK_STEPS {
        let a = eps * k as f64 / WALK_STEPS as f64;
        let mut ok = false;
        for _ in 0..30 {
            let y = x + e1 * a + e2 * b;
            let f = top.implicit(&y)[0];
            let df = (top.implicit_jacobian(&y).row(0) * e2)[(0, 0)];
            if df.abs() < 1e-14 {
                break;
            }
            let step = f / df;
            b -= step;
            if step.abs() < 1e-14 * eps.max(1.0) {
                ok = true;
                break;
            }
        }
        let y = x + e1 * a + e2 * b;
        if !ok || (&y - x).norm() > eps || !top.in_region(&y) {
            break;
        }
        out.push(y);
    }
    out
}

/// Number of points where `<w, y - x> = -delta` along a branch.
fn level_crossings(branch: &[DVector<f64>], x: &DVector<f64>, w: &DVector<f64>, delta: f64) -> i64 {
    let phi: Vec<f64> = branch.iter().map(|y| w.dot(&(y - x)) + delta).collect();
    phi.windows(2).filter(|p| (p[0] > 0.0) != (p[1] > 0.0)).count() as i64
}

/// Index of `<w, .>` at a fold point `x` of a surface stratum, on the slice
/// through `x` spanned by the kernel direction `p` and the normal `n`.
/// `solid` is the open top stratum when the surface bounds a solid.
pub(crate) fn fold_index(
    st: &SmoothStratum,
    solid: Option<&SmoothStratum>,
    x: &DVector<f64>,
    p: &DVector<f64>,
    n: &DVector<f64>,
    w: &DVector<f64>,
    delta: f64,
    eps: f64,
) -> i64 {
    let chi = match solid {
        Some(top) => {
            // The slice is a planar region; its level set is a union of chords.
            let mut runs = 0;
            let mut inside = false;
            for k in 0..LINE_STEPS {
                let s = -eps + 2.0 * eps * k as f64 / (LINE_STEPS - 1) as f64;
                let y = x - w * delta + p * s;
                let now = (&y - x).norm() <= eps && top.in_region(&y);
                if now && !inside {
                    runs += 1;
                }
                inside = now;
            }
            runs
        }
        None => {
            let fwd = walk_branch(st, x, p, n, eps);
            let back = walk_branch(st, x, &(-p), n, eps);
            level_crossings(&fwd, x, w, delta) + level_crossings(&back, x, w, delta)
        }
    };
    1 - chi
}

/// Index of `<w, .>` at a boundary-curve point `x`: the slice is the half
/// branch of the top stratum leaving `x` along `h`, with `m` the other slice
/// direction.
pub(crate) fn rim_index(
    top: &SmoothStratum,
    x: &DVector<f64>,
    h: &DVector<f64>,
    m: &DVector<f64>,
    w: &DVector<f64>,
    delta: f64,
    eps: f64,
) -> i64 {
    let branch = walk_branch(top, x, h, m, eps);
    1 - level_crossings(&branch, x, w, delta)
}
