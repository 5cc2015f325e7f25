//! Deterministic sample grids over chart boxes.

use rand::Rng;
use rand_pcg::Pcg32;

use crate::jets::{ChartPoint, Interval};

/// The PRNG used by every randomized suite.
pub fn rng(seed: u64) -> Pcg32 {
    Pcg32::new(seed, 0x0a02_bdbf_7bb3_c0a7)
}

/// Tensor product of per-axis sample values, first axis slowest.
pub fn tensor_grid(axes: &[Vec<f64>]) -> Vec<ChartPoint> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &x in axis {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(ChartPoint::new).collect()
}

/// `count` evenly spaced interior values of an interval, keeping a margin of
/// `margin` (fraction of the width) at both ends.
pub fn interior_axis(iv: Interval, count: usize, margin: f64) -> Vec<f64> {
    let lo = iv.lo + margin * (iv.hi - iv.lo);
    let hi = iv.hi - margin * (iv.hi - iv.lo);
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Uniform random points in the box shrunk by `margin` on every side.
pub fn random_points(domain: &[Interval], count: usize, margin: f64, rng: &mut Pcg32) -> Vec<ChartPoint> {
    (0..count)
        .map(|_| {
            ChartPoint::new(
                domain
                    .iter()
                    .map(|iv| {
                        let w = iv.hi - iv.lo;
                        rng.random_range((iv.lo + margin * w)..(iv.hi - margin * w))
                    })
                    .collect(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_grid_order_and_size() {
        let g = tensor_grid(&[vec![0.0, 1.0], vec![5.0, 6.0, 7.0]]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[1].coords, vec![0.0, 6.0]);
        assert_eq!(g[3].coords, vec![1.0, 5.0]);
    }

    #[test]
    fn random_points_stay_inside_and_repeat() {
        let dom = [Interval::new(-1.0, 1.0), Interval::new(2.0, 3.0)];
        let a = random_points(&dom, 30, 0.1, &mut rng(7));
        let b = random_points(&dom, 30, 0.1, &mut rng(7));
        assert_eq!(a, b);
        for p in &a {
            assert!(p.coords[0].abs() <= 0.8 && (2.1..=2.9).contains(&p.coords[1]));
        }
    }

    #[test]
    fn interior_axis_margins() {
        assert_eq!(interior_axis(Interval::new(0.0, 10.0), 3, 0.1), vec![1.0, 5.0, 9.0]);
    }
}
