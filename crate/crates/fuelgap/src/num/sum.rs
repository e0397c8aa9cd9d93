//! Pairwise summation. Keeps large sums reproducible to well below 1e-9
//! regardless of how callers might chunk the same data.

/// Sum by recursive halving; error grows like O(log n) rather than O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_on_small_input() {
        let xs = [1.5, -2.25, 3.0, 0.125];
        assert_eq!(pairwise_sum(&xs), 2.375);
    }

    #[test]
    fn partition_independent_to_1e9() {
        // ill-conditioned-ish alternating series, n = 1e6
        let xs: Vec<f64> = (0..1_000_000)
            .map(|i| {
                let x = (i as f64) * 1e-3;
                x.sin() * 700.0 / 1_000_000.0
            })
            .collect();
        let full = pairwise_sum(&xs);
        for chunks in [3usize, 7, 64, 1001] {
            let sz = xs.len().div_ceil(chunks);
            let chunked: f64 = xs.chunks(sz).map(pairwise_sum).sum();
            assert!(
                (full - chunked).abs() < 1e-9,
                "chunks={chunks}: {full} vs {chunked}"
            );
        }
    }
}
