//! Test-only oracles and random generators.
//!
//! The oracles here deliberately avoid the engine's own code paths: the
//! plane oracle runs a cyclic Jacobi eigen-solver on plain arrays, and the
//! drip oracle re-derives the seeded generator from its published constants.

use gesto_core::artwork::{Artwork, PlacementTransform, Stroke};
use gesto_core::brush::BrushParams;
use gesto_core::canvas::{CanvasPlane, DrawMode};
use gesto_core::centerline::Centerline;
use gesto_core::drip::DripSeed;
use gesto_core::pose::{PoseSample, Tool};
use gesto_core::Vector3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use uuid::Uuid;

pub type Mat3 = [[f64; 3]; 3];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigen-decomposition of a symmetric 3x3 matrix. Returns
/// eigenvalues and the matching eigenvectors as columns of the second value.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigen(mut a: Mat3) -> ([f64; 3], Mat3) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..100 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off < 1e-30 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- J^T A J
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Oracle plane through `samples`: unit normal (sign unspecified) and the
/// offset that goes with it.
pub fn oracle_plane(samples: &[[f64; 3]]) -> ([f64; 3], f64) {
    let n = samples.len() as f64;
    let mut c = [0.0; 3];
    for s in samples {
        for k in 0..3 {
            c[k] += s[k] / n;
        }
    }
    let mut cov = [[0.0; 3]; 3];
    for s in samples {
        let d = [s[0] - c[0], s[1] - c[1], s[2] - c[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j] / n;
            }
        }
    }
    let (vals, vecs) = jacobi_eigen(cov);
    let mut min = 0;
    for k in 1..3 {
        if vals[k] < vals[min] {
            min = k;
        }
    }
    let mut normal = [vecs[0][min], vecs[1][min], vecs[2][min]];
    let len = (normal[0].powi(2) + normal[1].powi(2) + normal[2].powi(2)).sqrt();
    for x in normal.iter_mut() {
        *x /= len;
    }
    let offset = normal[0] * c[0] + normal[1] * c[1] + normal[2] * c[2];
    (normal, offset)
}

/// Independent rendition of the drip generator contract: splitmix64 seeding
/// followed by xorshift64*.
pub struct ReferenceXorShift(u64);

impl ReferenceXorShift {
    pub fn seeded(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        Self(if z == 0 { 0x9E3779B97F4A7C15 } else { z })
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / 9007199254740992.0
    }
}

/// Expected `(candidate index, length)` pairs for a drip run over
/// `n_points` centerline points.
pub fn oracle_drips(n_points: usize, probability: f64, max_length: f64, seed: u64) -> Vec<(usize, f64)> {
    let mut g = ReferenceXorShift::seeded(seed);
    let mut out = Vec::new();
    let mut i = 0;
    while i < n_points {
        if g.unit() < probability {
            let r = g.unit();
            out.push((i, (0.3 + 0.7 * r) * max_length));
        }
        i += 4;
    }
    out
}

pub fn unit_vector(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random unit quaternion `(w, x, y, z)`.
pub fn unit_quaternion(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return q.map(|c| c / n);
        }
    }
}

/// Random walk of `n` points with steps in `[0.005, 0.05]` m.
pub fn random_walk(rng: &mut impl Rng, n: usize) -> Vec<Vector3<f64>> {
    let mut p = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut dir = unit_vector(rng);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(p);
        dir = (dir + unit_vector(rng) * 0.5).normalize();
        p += dir * rng.random_range(0.005..0.05);
    }
    out
}

pub fn random_centerline(rng: &mut impl Rng, n: usize, tool: Tool) -> Centerline {
    let pts = random_walk(rng, n);
    let times = (0..n).map(|i| i as f64 / 60.0).collect();
    let pressure = (0..n).map(|_| rng.random_range(0.2..=1.0)).collect();
    Centerline::new(pts, times, pressure, tool).unwrap()
}

/// `n` samples on the plane `normal · x = offset`, spread over a 2 m square
/// and displaced along the normal by uniform noise in `[-noise, noise]`.
pub fn noisy_plane(rng: &mut impl Rng, normal: Vector3<f64>, offset: f64, n: usize, noise: f64) -> Vec<Vector3<f64>> {
    let helper = if normal.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let a = normal.cross(&helper).normalize();
    let b = normal.cross(&a);
    (0..n)
        .map(|_| {
            let e = if noise > 0.0 { rng.random_range(-noise..=noise) } else { 0.0 };
            normal * (offset + e) + a * rng.random_range(-1.0..1.0) + b * rng.random_range(-1.0..1.0)
        })
        .collect()
}

fn random_text(rng: &mut impl Rng, max_bytes: usize) -> String {
    const ALPHABET: &[&str] = &["a", "b", "Z", "7", " ", "é", "ß", "グ", "🎨", "-"];
    let mut s = String::new();
    let target = rng.random_range(0..=max_bytes);
    loop {
        let piece = ALPHABET[rng.random_range(0..ALPHABET.len())];
        if s.len() + piece.len() > target {
            return s;
        }
        s.push_str(piece);
    }
}

/// Random valid artwork: optional canvas, up to `max_strokes` strokes of
/// either tool and mode, random placement.
pub fn random_artwork(rng: &mut impl Rng, max_strokes: usize) -> Artwork {
    let id = Uuid::from_u128(rng.random());
    let mut art = Artwork::new(id, &random_text(rng, 64), &random_text(rng, 256), rng.random_range(0..4_000_000_000)).unwrap();
    if rng.random_bool(0.6) {
        let plane = CanvasPlane::from_normal(unit_vector(rng), rng.random_range(-3.0..3.0), [-1.5, 1.5, -1.0, 1.0]).unwrap();
        art = art.with_canvas(Some(plane)).unwrap();
    }
    let count = rng.random_range(0..=max_strokes);
    for k in 0..count {
        let tool = if rng.random_bool(0.5) { Tool::Spray } else { Tool::DripMop };
        let mode = if rng.random_bool(0.5) { DrawMode::Canvas2D } else { DrawMode::Free3D };
        let n = rng.random_range(1..40);
        let line = random_centerline(rng, n, tool);
        let brush = BrushParams {
            tool,
            base_width: rng.random_range(0.005..0.2),
            color: std::array::from_fn(|_| rng.random_range(0.0..=1.0)),
            spray_cone_half_angle: rng.random_range(0.05..0.78),
            spray_range: rng.random_range(0.1..2.0),
            drip_probability: rng.random_range(0.0..=1.0),
            drip_max_length: rng.random_range(0.0..0.5),
        };
        let drips = if tool == Tool::DripMop {
            (0..rng.random_range(0..4))
                .map(|_| DripSeed {
                    anchor: Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    length: rng.random_range(0.0..0.5),
                    width: rng.random_range(0.0..0.1),
                })
                .collect()
        } else {
            Vec::new()
        };
        let id = k as u64 * 1_000_003 + rng.random_range(0..1000);
        art = art.add_stroke(Stroke::new(id, line, brush, mode, drips).unwrap()).unwrap();
    }
    let placement = PlacementTransform::new(
        Vector3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
        unit_quaternion(rng),
        rng.random_range(0.1..10.0),
    )
    .unwrap();
    art.with_placement(placement)
}

/// Pose stream of `n` pressed samples at 60 Hz along `path` (device
/// positions; identity orientation).
pub fn pressed_stream(path: &[Vector3<f64>], tool: Tool) -> Vec<PoseSample> {
    path.iter().enumerate().map(|(i, p)| PoseSample::at(i as f64 / 60.0, *p, true, tool)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 1.0]];
        let (vals, vecs) = jacobi_eigen(m);
        for k in 0..3 {
            let v = [vecs[0][k], vecs[1][k], vecs[2][k]];
            for i in 0..3 {
                let mv = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
                assert!((mv - vals[k] * v[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn reference_generator_first_value() {
        // splitmix64(0) from the reference implementation.
        let g = ReferenceXorShift::seeded(0);
        assert_eq!(g.0, 0xE220A8397B1DCDAF);
    }
}
