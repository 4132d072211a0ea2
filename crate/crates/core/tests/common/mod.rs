//! Shared helpers and independent oracles for the integration tests. The
//! oracles deliberately avoid the library's own formulas.

#![allow(dead_code)]

use std::path::PathBuf;

use ara_nav::types::parse_episode_file;
use ara_nav::{Action, Episode};

pub const FIG1: &str =
    "Go ahead\u{2026} em, to that girl in blue shirt. Turn right when you are close enough to her.";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn synthetic20() -> Vec<Episode> {
    parse_episode_file(&std::fs::read(fixture("synthetic20.json")).unwrap()).unwrap()
}

/// Kinematics oracle: the heading is a unit vector rotated by explicit 2x2
/// rotation matrices, never an angle. Returns the position after each action
/// and the final direction vector.
pub fn rotation_oracle(
    start: (f64, f64, f64),
    actions: &[Action],
    forward_step: f64,
    rotate_deg: f64,
) -> (Vec<(f64, f64)>, (f64, f64)) {
    let (mut x, mut y, h) = start;
    let h = h.to_radians();
    // Compass heading h (clockwise from +y) has direction (sin h, cos h).
    let (mut ux, mut uy) = (h.sin(), h.cos());
    let t = rotate_deg.to_radians();
    let (c, s) = (t.cos(), t.sin());
    let mut positions = vec![(x, y)];
    for a in actions {
        match a {
            Action::Forward => {
                x += forward_step * ux;
                y += forward_step * uy;
            }
            // Clockwise by t: [c s; -s c].
            Action::RightRotate => (ux, uy) = (c * ux + s * uy, -s * ux + c * uy),
            // Counter-clockwise by t: [c -s; s c].
            Action::LeftRotate => (ux, uy) = (c * ux - s * uy, s * ux + c * uy),
            Action::Stop => {}
        }
        positions.push((x, y));
    }
    (positions, (ux, uy))
}

/// Compass heading in [0, 360) of a direction vector.
pub fn compass_of(u: (f64, f64)) -> f64 {
    u.0.atan2(u.1).to_degrees().rem_euclid(360.0)
}

/// Smallest angular difference in degrees.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

// Double-double arithmetic for the distance oracle.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn dd_add(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (s, e) = two_sum(a.0, b.0);
    let e = e + a.1 + b.1;
    let (s2, e2) = two_sum(s, e);
    (s2, e2)
}

fn dd_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (p, e) = two_prod(a.0, b.0);
    let e = e + a.0 * b.1 + a.1 * b.0;
    two_sum(p, e)
}

/// Euclidean distance in double-double precision: exact differences, exact
/// squares, then one Newton step on the square root.
pub fn distance_oracle(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = two_sum(b.0, -a.0);
    let dy = two_sum(b.1, -a.1);
    let sq = dd_add(dd_mul(dx, dx), dd_mul(dy, dy));
    if sq.0 == 0.0 {
        return 0.0;
    }
    let r = sq.0.sqrt();
    // r' = r + (sq - r²) / 2r
    let r2 = dd_mul((r, 0.0), (r, 0.0));
    let resid = dd_add(sq, (-r2.0, -r2.1));
    r + (resid.0 + resid.1) / (2.0 * r)
}

/// BERTScore oracle: explicit double loop over raw vectors, cosine computed
/// with norms rather than assuming unit length.
pub fn bertscore_oracle(orig: &[Vec<f64>], trans: &[Vec<f64>]) -> f64 {
    let cos = |a: &Vec<f64>, b: &Vec<f64>| {
        let mut dot = 0.0;
        let mut na = 0.0;
        let mut nb = 0.0;
        for k in 0..a.len() {
            dot += a[k] * b[k];
            na += a[k] * a[k];
            nb += b[k] * b[k];
        }
        dot / (na.sqrt() * nb.sqrt())
    };
    let mut sim = vec![vec![0.0; orig.len()]; trans.len()];
    for (i, t) in trans.iter().enumerate() {
        for (j, o) in orig.iter().enumerate() {
            sim[i][j] = cos(t, o);
        }
    }
    let mut p = 0.0;
    for row in &sim {
        let mut best = f64::NEG_INFINITY;
        for v in row {
            if *v > best {
                best = *v;
            }
        }
        p += best;
    }
    p /= trans.len() as f64;
    let mut r = 0.0;
    for j in 0..orig.len() {
        let mut best = f64::NEG_INFINITY;
        for row in &sim {
            if row[j] > best {
                best = row[j];
            }
        }
        r += best;
    }
    r /= orig.len() as f64;
    if p + r <= 0.0 {
        return 0.0;
    }
    (2.0 * p * r / (p + r)).clamp(0.0, 1.0)
}

/// Independent re-simulation of the scripted ε-policy: one uniform draw per
/// step, and on a hit a second draw picks among the other three actions in
/// FORWARD, LEFT_ROTATE, RIGHT_ROTATE, STOP order.
pub fn scripted_oracle_actions(label: &[Action], epsilon: f64, seed: u64, steps: usize) -> Vec<Action> {
    use rand::{Rng, SeedableRng};
    const ORDER: [Action; 4] = [Action::Forward, Action::LeftRotate, Action::RightRotate, Action::Stop];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..steps)
        .map(|t| {
            let intended = *label.get(t).unwrap_or(&Action::Stop);
            let u: f64 = rng.random();
            if u < epsilon {
                let others: Vec<Action> = ORDER.into_iter().filter(|a| *a != intended).collect();
                others[rng.random_range(0..3)]
            } else {
                intended
            }
        })
        .collect()
}

/// Per-episode seed rebuilt from its definition.
pub fn seed_for(run_seed: u64, id: &str) -> u64 {
    use sha2::{Digest, Sha256};
    let d = Sha256::digest(format!("{run_seed}:{id}").as_bytes());
    u64::from_be_bytes(d[..8].try_into().unwrap())
}
