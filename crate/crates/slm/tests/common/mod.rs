//! Independent oracles shared by the integration tests. Everything here
//! recomputes from first principles, without going through the library's
//! candidate enumeration or evaluation plumbing.

#![allow(dead_code)]

use slm::grid::{DyadicPoint, SearchDomain};
use slm::labeling::Sense;

/// Brute-force reimplementation of the vertex labeling rule.
///
/// Enumerates every half-step candidate around the vertex by plain integer
/// loops,
/// evaluates with raw coordinate arithmetic, and applies the same total
/// order used by the library: sense-adjusted value, then squared distance
/// to the incumbent (a zero vector when there is none), then enumeration
/// order with axis 0 as the most significant offset digit.
pub fn brute_force_label(
    objective: &dyn Fn(&[f64]) -> f64,
    domain: &SearchDomain,
    sense: Sense,
    incumbent: Option<&[f64]>,
    vertex_level: u32,
    vertex_k: &[u64],
) -> (usize, Vec<f64>) {
    let n = vertex_k.len();
    let fine = vertex_level + 1;
    let bound = 1u64 << fine;
    let coords_of = |k: &[u64]| -> Vec<f64> {
        (0..n)
            .map(|i| domain.lower()[i] + (k[i] as f64 / bound as f64) * domain.span(i))
            .collect()
    };
    let vertex_fine: Vec<u64> = vertex_k.iter().map(|&k| 2 * k).collect();
    let vertex_coords = coords_of(&vertex_fine);

    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    let mut offsets = vec![-1i64; n];
    loop {
        let mut k = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..n {
            let ki = vertex_fine[i] as i64 + offsets[i];
            if ki < 0 || ki as u64 > bound {
                ok = false;
                break;
            }
            k.push(ki as u64);
        }
        if ok {
            let c = coords_of(&k);
            let score = sense.score(objective(&c));
            let dist2: f64 = match incumbent {
                Some(inc) => c.iter().zip(inc).map(|(a, b)| (a - b) * (a - b)).sum(),
                None => 0.0,
            };
            let better = match &best {
                None => true,
                Some((_, bs, bd)) => match score.total_cmp(bs) {
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Greater => false,
                    std::cmp::Ordering::Equal => {
                        dist2.total_cmp(bd) == std::cmp::Ordering::Less
                    }
                },
            };
            if better {
                best = Some((c, score, dist2));
            }
        }
        // Advance the offset counter, least significant axis last.
        let mut axis = n;
        loop {
            if axis == 0 {
                let (best_coords, _, _) = best.expect("the vertex itself is always in range");
                let mut label = 0;
                for i in 0..n {
                    if best_coords[i] - vertex_coords[i] < 0.0 {
                        label = i + 1;
                    }
                }
                return (label, best_coords);
            }
            axis -= 1;
            if offsets[axis] < 1 {
                offsets[axis] += 1;
                break;
            }
            offsets[axis] = -1;
        }
    }
}

/// Shekel's foxholes by direct summation over a literal table of the 25
/// well positions, written out rather than generated.
pub fn foxholes_direct(x: &[f64]) -> f64 {
    assert_eq!(x.len(), 2);
    const WELLS: [(f64, f64); 25] = [
        (-32.0, -32.0),
        (-16.0, -32.0),
        (0.0, -32.0),
        (16.0, -32.0),
        (32.0, -32.0),
        (-32.0, -16.0),
        (-16.0, -16.0),
        (0.0, -16.0),
        (16.0, -16.0),
        (32.0, -16.0),
        (-32.0, 0.0),
        (-16.0, 0.0),
        (0.0, 0.0),
        (16.0, 0.0),
        (32.0, 0.0),
        (-32.0, 16.0),
        (-16.0, 16.0),
        (0.0, 16.0),
        (16.0, 16.0),
        (32.0, 16.0),
        (-32.0, 32.0),
        (-16.0, 32.0),
        (0.0, 32.0),
        (16.0, 32.0),
        (32.0, 32.0),
    ];
    let mut sum = 0.002;
    for (i, (a0, a1)) in WELLS.iter().enumerate() {
        let d0 = x[0] - a0;
        let d1 = x[1] - a1;
        sum += 1.0 / ((i as f64 + 1.0) + d0.powi(6) + d1.powi(6));
    }
    1.0 / sum
}

/// Coordinates of a canonical grid point, recomputed without DyadicPoint.
pub fn raw_coords(domain: &SearchDomain, p: &DyadicPoint) -> Vec<f64> {
    let scale = (1u64 << p.level()) as f64;
    p.indices()
        .iter()
        .enumerate()
        .map(|(i, &k)| domain.lower()[i] + (k as f64 / scale) * domain.span(i))
        .collect()
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual}, expected {expected} within {tol}"
    );
}
