//! Level-by-level enumeration of integer lattice points.
//!
//! Level `t` lists every nonzero integer vector in `[−t, t]^d` in
//! lexicographic order (first coordinate most significant, starting from
//! `(−t, …, −t)`). The number of free coordinates `d` may depend on the level.

/// Number of nonzero lattice points at radius `t` with `free` coordinates.
pub(crate) fn level_size(free: usize, t: usize) -> u128 {
    let base = 2 * t as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..free {
        total = total.saturating_mul(base);
    }
    total - 1
}

/// Maps a 1-based net index to `(level, offset within level)`.
pub(crate) fn locate(k: usize, free_at: impl Fn(usize) -> usize) -> (usize, u128) {
    debug_assert!(k >= 1);
    let mut rest = (k - 1) as u128;
    let mut t = 1;
    loop {
        let size = level_size(free_at(t), t);
        if rest < size {
            return (t, rest);
        }
        rest -= size;
        t += 1;
    }
}

/// Decodes the `offset`-th nonzero vector of level `t`.
pub(crate) fn decode(offset: u128, free: usize, t: usize) -> Vec<i64> {
    let base = 2 * t as u128 + 1;
    // the zero vector sits at the all-`t` digit string
    let mut zero_pos: u128 = 0;
    for _ in 0..free {
        zero_pos = zero_pos * base + t as u128;
    }
    let mut idx = if offset >= zero_pos { offset + 1 } else { offset };
    let mut digits = vec![0_i64; free];
    for slot in digits.iter_mut().rev() {
        *slot = (idx % base) as i64 - t as i64;
        idx /= base;
    }
    digits
}

/// Total number of net points through level `level`.
pub(crate) fn count_through(level: usize, free_at: impl Fn(usize) -> usize) -> u128 {
    (1..=level).map(|t| level_size(free_at(t), t)).fold(0, u128::saturating_add)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_in_two_dims() {
        let pts: Vec<Vec<i64>> = (0..8).map(|o| decode(o, 2, 1)).collect();
        assert_eq!(
            pts,
            vec![
                vec![-1, -1],
                vec![-1, 0],
                vec![-1, 1],
                vec![0, -1],
                vec![0, 1],
                vec![1, -1],
                vec![1, 0],
                vec![1, 1],
            ]
        );
    }

    #[test]
    fn locate_walks_levels() {
        assert_eq!(locate(1, |_| 2), (1, 0));
        assert_eq!(locate(8, |_| 2), (1, 7));
        assert_eq!(locate(9, |_| 2), (2, 0));
        assert_eq!(locate(9 + 23, |_| 2), (2, 23));
        assert_eq!(locate(9 + 24, |_| 2), (3, 0));
        assert_eq!(count_through(2, |_| 2), 32);
    }

    #[test]
    fn level_enumeration_is_exhaustive() {
        for free in 1..=3 {
            for t in 1..=3 {
                let size = level_size(free, t) as usize;
                let mut seen: Vec<Vec<i64>> = (0..size as u128).map(|o| decode(o, free, t)).collect();
                assert!(seen.iter().all(|v| v.iter().any(|d| *d != 0)));
                assert!(seen.windows(2).all(|w| w[0] < w[1]), "lexicographic");
                seen.dedup();
                assert_eq!(seen.len(), size);
            }
        }
    }

    #[test]
    fn sizes_saturate() {
        assert_eq!(level_size(200, 1000), u128::MAX - 1);
    }
}
