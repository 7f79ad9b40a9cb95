//! Enumeration of the symmetric group S_L (with signs) and of the
//! sign-flip group R_L ≅ (Z₂)^L used by the crossing-symmetrized sums.
//!
//! Serial traversal uses Heap's algorithm with incremental sign tracking.
//! Chunked traversal walks a lexicographic window located by unranking in
//! the factorial number system, so parallel callers can split S_L into
//! deterministic pieces independent of the thread count.

use crate::error::{Error, Result};

pub const MAX_PERMUTATION_L: usize = 12;
pub const MAX_REFLECTION_L: usize = 24;

/// Visits every permutation of `0..l` exactly once as `(perm, sign)`.
///
/// Heap's algorithm, iterative; each step is a single transposition so the
/// sign just alternates relative to the previous visit.
pub fn for_each_permutation<F: FnMut(&[usize], i32)>(l: usize, mut visit: F) -> Result<()> {
    check_perm_size(l)?;
    let mut a: Vec<usize> = (0..l).collect();
    let mut c = vec![0usize; l];
    let mut sign = 1i32;
    visit(&a, sign);
    let mut i = 0;
    while i < l {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            visit(&a, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

/// Visits `count` permutations of `0..l` starting at lexicographic rank
/// `start`, as `(perm, sign)`.
pub fn for_each_permutation_chunk<F: FnMut(&[usize], i32)>(
    l: usize,
    start: u64,
    count: u64,
    mut visit: F,
) -> Result<()> {
    check_perm_size(l)?;
    let total = factorial(l);
    if start >= total {
        return Ok(());
    }
    let mut a = unrank_lexicographic(l, start);
    let mut sign = permutation_sign(&a);
    let end = total.min(start.saturating_add(count));
    let mut rank = start;
    loop {
        visit(&a, sign);
        rank += 1;
        if rank >= end {
            break;
        }
        sign *= next_lexicographic(&mut a);
    }
    Ok(())
}

/// Visits every reflection (subset bitmask over `0..l`) exactly once with
/// sign `(-1)^{popcount}`.
pub fn for_each_reflection<F: FnMut(u32, i32)>(l: usize, mut visit: F) -> Result<()> {
    if l == 0 || l > MAX_REFLECTION_L {
        return Err(Error::SizeLimit {
            what: "reflection enumeration",
            limit: MAX_REFLECTION_L,
            got: l,
        });
    }
    for mask in 0u32..(1u32 << l) {
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        visit(mask, sign);
    }
    Ok(())
}

/// Sign of a permutation from its inversion count.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn factorial(l: usize) -> u64 {
    (1..=l as u64).product()
}

/// Permutation of `0..l` at lexicographic rank `r` (factorial number system).
fn unrank_lexicographic(l: usize, mut r: u64) -> Vec<usize> {
    let mut avail: Vec<usize> = (0..l).collect();
    let mut out = Vec::with_capacity(l);
    for pos in 0..l {
        let f = factorial(l - 1 - pos);
        let idx = (r / f) as usize;
        r %= f;
        out.push(avail.remove(idx));
    }
    out
}

/// Advances `a` to its lexicographic successor, returning the sign change
/// (`-1` raised to the number of transpositions performed).
fn next_lexicographic(a: &mut [usize]) -> i32 {
    let n = a.len();
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    debug_assert!(i > 0, "successor of the last permutation requested");
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    let swaps = 1 + (n - i) / 2;
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn check_perm_size(l: usize) -> Result<()> {
    if l == 0 || l > MAX_PERMUTATION_L {
        return Err(Error::SizeLimit {
            what: "permutation enumeration",
            limit: MAX_PERMUTATION_L,
            got: l,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn l1_is_identity_with_plus_sign() {
        let mut seen = vec![];
        for_each_permutation(1, |p, s| seen.push((p.to_vec(), s))).unwrap();
        assert_eq!(seen, vec![(vec![0], 1)]);
    }

    #[test]
    fn l3_visits_all_with_balanced_signs() {
        let mut count = 0;
        let mut sign_sum = 0i32;
        let mut distinct = HashSet::new();
        for_each_permutation(3, |p, s| {
            count += 1;
            sign_sum += s;
            distinct.insert(p.to_vec());
            assert_eq!(s, permutation_sign(p));
        })
        .unwrap();
        assert_eq!(count, 6);
        assert_eq!(sign_sum, 0);
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn l4_heap_signs_match_inversion_parity() {
        let mut distinct = HashSet::new();
        for_each_permutation(4, |p, s| {
            assert_eq!(s, permutation_sign(p));
            distinct.insert(p.to_vec());
        })
        .unwrap();
        assert_eq!(distinct.len(), 24);
    }

    #[test]
    fn chunked_traversal_covers_sl() {
        for l in 1..=6usize {
            let total = factorial(l);
            let chunk = (total / 3).max(1);
            let mut distinct = HashSet::new();
            let mut start = 0;
            while start < total {
                for_each_permutation_chunk(l, start, chunk, |p, s| {
                    assert_eq!(s, permutation_sign(p));
                    distinct.insert(p.to_vec());
                })
                .unwrap();
                start += chunk;
            }
            assert_eq!(distinct.len() as u64, total);
        }
    }

    #[test]
    fn reflections_l3() {
        let mut count = 0;
        let mut sign_sum = 0i32;
        for_each_reflection(3, |mask, s| {
            count += 1;
            sign_sum += s;
            assert_eq!(s, if mask.count_ones() % 2 == 0 { 1 } else { -1 });
        })
        .unwrap();
        assert_eq!(count, 8);
        assert_eq!(sign_sum, 0);
    }

    #[test]
    fn size_limits() {
        assert!(for_each_permutation(13, |_, _| {}).is_err());
        assert!(for_each_reflection(25, |_, _| {}).is_err());
        assert!(for_each_permutation(0, |_, _| {}).is_err());
    }
}
