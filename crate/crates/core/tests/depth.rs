mod common;

use common::*;
use midepth::depth::{bisection_witness, captured_volume, estimate_depth, Side};
use midepth::hull::{vertex_enumerate, HPolytope, Halfspace, MixedBody};
use midepth::measure::unit_ball_volume;
use midepth::necessity::BallFiberBody;
use proptest::prelude::*;
use rand::Rng;

/// Captured mixed volume of an `n = d = 1` body, clipping each fiber interval by hand.
fn captured_oracle(p: &HPolytope, h: &Halfspace) -> f64 {
    let (a, c) = (h.normal(), h.offset());
    let mut total = 0.0;
    for z in -6..=6 {
        let z = z as f64;
        let Some((lo, hi)) = fiber_interval(p, z) else { continue };
        // a₀z + a₁x ≥ c.
        let rest = c - a[0] * z;
        let (l, u) = if a[1].abs() < 1e-15 {
            if rest <= 0.0 { (lo, hi) } else { (0.0, 0.0) }
        } else if a[1] > 0.0 {
            (lo.max(rest / a[1]), hi)
        } else {
            (lo, hi.min(rest / a[1]))
        };
        total += (u - l).max(0.0);
    }
    total
}

#[test]
fn strip_point_has_depth_five_twelfths() {
    let b = MixedBody::cube(1, 1, &[0.5, 0.0], &[6.5, 1.0]).unwrap();
    let axis = Halfspace::new(vec![-1.0, 0.0], -3.0).unwrap();
    assert!((captured_volume(&b, &axis).unwrap() - 3.0).abs() < 1e-12);
    // A cut of slope 2 through (3, ½) keeps two whole fibers and half of a third.
    let tilted = Halfspace::through(vec![-1.0, 2.0], &[3.0, 0.5]).unwrap();
    assert!((captured_volume(&b, &tilted).unwrap() - 2.5).abs() < 1e-12);
    let r = estimate_depth(&b, &[3.0, 0.5], 4000, 0).unwrap();
    assert!(r.min_ratio <= 5.0 / 12.0 + 1e-3, "{}", r.min_ratio);
    assert!(r.min_ratio >= 5.0 / 12.0 - 1e-9);
}

#[test]
fn corner_point_is_shallow() {
    let b = MixedBody::cube(2, 1, &[0.0; 3], &[1.0; 3]).unwrap();
    let r = estimate_depth(&b, &[0.0, 0.0, 0.3], 200, 1).unwrap();
    assert!(r.min_ratio <= 0.25 + 1e-12);
}

#[test]
fn ball_fiber_diagonal_cut() {
    let b = MixedBody::ball_fiber(BallFiberBody::new(2, 4, 2).unwrap());
    let h = Halfspace::new(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0], 6.0).unwrap();
    let want = 0.75f64.powi(4) + 5.0 * 0.25f64.powi(4);
    assert!((captured_volume(&b, &h).unwrap() / unit_ball_volume(4) - want).abs() < 1e-12);
}

#[test]
fn more_directions_never_raise_the_estimate() {
    let b = planar_body(2, 0.3, 4.0, 5);
    let (lo, hi) = fiber_interval(b.as_polytope().unwrap(), 1.0).unwrap();
    let y = [1.0, 0.5 * (lo + hi)];
    let coarse = estimate_depth(&b, &y, 200, 9).unwrap();
    let fine = estimate_depth(&b, &y, 2000, 9).unwrap();
    assert!(fine.min_ratio <= coarse.min_ratio + 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn captured_volume_matches_clipped_intervals(seed in any::<u64>(), angle in 0.0f64..std::f64::consts::TAU, c in -3.0f64..3.0) {
        let b = planar_body(seed, 0.2, 3.0, 4);
        let p = b.as_polytope().unwrap();
        let h = Halfspace::new(vec![angle.cos(), angle.sin()], c).unwrap();
        prop_assert!((captured_volume(&b, &h).unwrap() - captured_oracle(p, &h)).abs() < 1e-9);
    }

    #[test]
    fn report_ratio_matches_its_halfspace(seed in any::<u64>()) {
        let b = planar_body(seed, 0.0, 3.0, 4);
        let z = rng(seed).gen_range(-2..=2) as f64;
        let Some((lo, hi)) = fiber_interval(b.as_polytope().unwrap(), z) else { return Ok(()) };
        let y = [z, 0.5 * (lo + hi)];
        let r = estimate_depth(&b, &y, 300, seed).unwrap();
        let cap = captured_volume(&b, &r.argmin_halfspace).unwrap();
        prop_assert!((r.min_ratio * r.total_mi_volume - cap).abs() < 1e-6);
        prop_assert!(r.argmin_halfspace.contains(&y, 1e-9));
    }

    #[test]
    fn pushing_the_boundary_to_y_only_loses_volume(seed in any::<u64>(), angle in 0.0f64..std::f64::consts::TAU, drop in 0.0f64..2.0) {
        let b = planar_body(seed, 0.0, 3.0, 4);
        let mut r = rng(seed ^ 1);
        let z = r.gen_range(-2..=2) as f64;
        let Some((lo, hi)) = fiber_interval(b.as_polytope().unwrap(), z) else { return Ok(()) };
        let y = [z, r.gen_range(lo..=hi)];
        let a = vec![angle.cos(), angle.sin()];
        let at_y = Halfspace::through(a.clone(), &y).unwrap();
        let below = Halfspace::new(a, at_y.offset() - drop).unwrap();
        prop_assert!(captured_volume(&b, &at_y).unwrap() <= captured_volume(&b, &below).unwrap() + 1e-12);
    }

    #[test]
    fn shrinking_the_body_only_loses_volume(seed in any::<u64>(), angle in 0.0f64..std::f64::consts::TAU, c in -3.0f64..3.0, cut in -1.0f64..1.0) {
        let b = planar_body(seed, 0.0, 3.0, 4);
        let p = b.as_polytope().unwrap();
        let smaller = p.with_row(vec![0.3, 1.0], cut);
        if smaller.is_empty() || !smaller.has_interior() {
            return Ok(());
        }
        let b2 = MixedBody::polytope(1, 1, smaller).unwrap();
        let h = Halfspace::new(vec![angle.cos(), angle.sin()], c).unwrap();
        prop_assert!(captured_volume(&b2, &h).unwrap() <= captured_volume(&b, &h).unwrap() + 1e-12);
    }

    #[test]
    fn bisection_translates_land_inside(pts in cloud(3, 5, 10), seed in any::<u64>(), tie in any::<bool>()) {
        let Some(p) = body_of(&pts) else { return Ok(()) };
        let verts = vertex_enumerate(&p).unwrap();
        let mut r = rng(seed);
        let a: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
        let dots: Vec<f64> = verts.vertices().iter().map(|v| v.iter().zip(&a).map(|(x, y)| x * y).sum()).collect();
        let (lo, hi) = dots.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let theta = 0.5 * (lo + hi);
        let c = if tie { theta } else { r.gen_range(lo..=hi) };
        let h = Halfspace::new(a, c).unwrap();
        let w = bisection_witness(&p, &h).unwrap();
        // Both sides at a tie; the c ≤ θ rule otherwise.
        let sides: Vec<Side> = if tie { vec![Side::H, Side::HBar] } else { vec![w.side] };
        if !tie {
            prop_assert_eq!(w.side == Side::H, h.offset() <= w.theta);
        }
        let (ip, im) = (
            dots.iter().enumerate().fold(0, |b, (i, &v)| if v > dots[b] { i } else { b }),
            dots.iter().enumerate().fold(0, |b, (i, &v)| if v < dots[b] { i } else { b }),
        );
        for side in sides {
            let anchor = match side { Side::H => &verts.vertices()[ip], Side::HBar => &verts.vertices()[im] };
            for v in verts.vertices() {
                let q: Vec<f64> = v.iter().zip(anchor).map(|(x, t)| 0.5 * (x + t)).collect();
                prop_assert!(inside(p.rows(), p.offsets(), &q, 1e-9));
                let s = h.value(&q);
                let ok = match side {
                    Side::H => s >= -1e-9,
                    Side::HBar => s <= 1e-9,
                };
                prop_assert!(ok);
            }
        }
    }
}
