use handdigit_core::features::{
    detect_peaks, extract, feature_vector, project_histogram, Histogram, Peak, PeakParams,
    MAX_PEAKS,
};
use handdigit_core::BinaryMask;
use proptest::prelude::*;

/// Enumerates peaks from the definition: a bin starts a plateau, and the
/// nearest differing bins on both sides (zero past the ends) are lower.
fn brute_peaks(bins: &[f64], rel: f64, sep: usize) -> Vec<Peak> {
    let max = bins.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let at = |i: isize| {
        if i < 0 || i as usize >= bins.len() {
            0.0
        } else {
            bins[i as usize]
        }
    };
    let mut all = Vec::new();
    for i in 0..bins.len() {
        let v = bins[i];
        if i > 0 && bins[i - 1] == v {
            continue;
        }
        let mut j = i as isize;
        while at(j + 1) == v && ((j + 1) as usize) < bins.len() {
            j += 1;
        }
        if at(i as isize - 1) < v && at(j + 1) < v && v >= rel * max {
            all.push(Peak { x: i, y: v });
        }
    }
    // repeatedly take the tallest (leftmost on ties) peak that is far enough
    let mut kept: Vec<Peak> = Vec::new();
    while kept.len() < MAX_PEAKS {
        let next = all
            .iter()
            .filter(|p| !kept.contains(p))
            .filter(|p| kept.iter().all(|k| k.x.abs_diff(p.x) > sep))
            .fold(None::<Peak>, |best, p| match best {
                Some(b) if b.y > p.y || (b.y == p.y && b.x < p.x) => Some(b),
                _ => Some(*p),
            });
        let Some(p) = next else { break };
        all.retain(|q| *q != p);
        kept.push(p);
    }
    kept.sort_by_key(|p| p.x);
    kept
}

/// Histograms with repeated values, so plateaus are common.
fn bins() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0..6u8, 0..60)
        .prop_map(|v| v.into_iter().map(|b| b as f64 * 0.25).collect())
}

/// Vertical bars standing on a common base line, with margins on both sides.
fn finger_mask() -> impl Strategy<Value = (BinaryMask, usize)> {
    proptest::collection::vec((3..8usize, 5..40usize, 2..14usize), 1..5).prop_map(|bars| {
        let margin = 20;
        let width = margin * 2 + bars.iter().map(|&(w, _, gap)| w + gap).sum::<usize>();
        let mut m = BinaryMask::new(width, 50);
        let mut x = margin;
        for (w, h, gap) in bars {
            for xx in x..x + w {
                for yy in 50 - h..50 {
                    m.set(xx, yy, true);
                }
            }
            x += w + gap;
        }
        (m, margin)
    })
}

proptest! {
    #[test]
    fn peaks_match_brute_force(bins in bins(), rel in 0.05..0.95f64, sep in 0..8usize) {
        let h = Histogram { bins: bins.clone(), hand_length: 1.0 };
        prop_assert_eq!(detect_peaks(&h, rel, sep).unwrap(), brute_peaks(&bins, rel, sep));
    }

    #[test]
    fn horizontal_shift_keeps_the_vector((m, margin) in finger_mask(), shift in 0..12usize, length in 40.0..120.0f64) {
        let params = PeakParams::default();
        let left = m.translated(m.width(), m.height(), 8 - margin as i64, 0);
        let moved = left.translated(m.width(), m.height(), shift as i64, 0);
        let (_, a) = extract(&left, length, &params).unwrap();
        let (_, b) = extract(&moved, length, &params).unwrap();
        prop_assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
    }

    #[test]
    fn scaling_x_keeps_ratios(xs in proptest::collection::btree_set(0..500usize, 0..=5), ys in proptest::collection::vec(0.01..1.0f64, 5), s in 2..9usize) {
        let peaks: Vec<Peak> = xs.iter().zip(&ys).map(|(&x, &y)| Peak { x, y }).collect();
        let scaled: Vec<Peak> = peaks.iter().map(|p| Peak { x: p.x * s, y: p.y }).collect();
        let a = feature_vector(&peaks).unwrap();
        let b = feature_vector(&scaled).unwrap();
        for i in 0..4 {
            prop_assert_eq!(b.dist_x[i], a.dist_x[i] * s as f64);
            prop_assert_eq!(b.r_x[i], a.r_x[i]);
        }
    }

    #[test]
    fn unused_slots_are_zero(xs in proptest::collection::btree_set(0..500usize, 0..=5), ys in proptest::collection::vec(0.0..1.0f64, 5)) {
        let peaks: Vec<Peak> = xs.iter().zip(&ys).map(|(&x, &y)| Peak { x, y }).collect();
        let v = feature_vector(&peaks).unwrap();
        prop_assert_eq!(v.n as usize, peaks.len());
        for i in peaks.len().saturating_sub(1)..4 {
            prop_assert!(v.dist_x[i] == 0.0 && v.dist_y[i] == 0.0);
        }
        prop_assert!(v.r_x[3] == 0.0 && v.r_y[3] == 0.0);
    }

    #[test]
    fn supersampling_keeps_amplitudes((m, _) in finger_mask(), length in 40.0..120.0f64) {
        let big = BinaryMask::from_fn(m.width() * 2, m.height() * 2, |x, y| m.get(x / 2, y / 2));
        let h1 = project_histogram(&m, length).unwrap();
        let h2 = project_histogram(&big, 2.0 * length).unwrap();
        for (x, &v) in h2.bins.iter().enumerate() {
            let orig = h1.bins[x / 2];
            prop_assert!((v - orig).abs() <= 0.02 * orig.max(1e-12), "bin {x}: {v} vs {orig}");
        }
    }
}
