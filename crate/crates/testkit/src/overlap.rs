//! Exhaustive subsequence enumeration.

/// Every subsequence of `sup`, one per subset of positions.
pub fn subsequences<T: Clone>(sup: &[T]) -> Vec<Vec<T>> {
    assert!(sup.len() < 16, "enumeration is exponential");
    (0u32..1 << sup.len())
        .map(|mask| {
            sup.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// `sub` occurs in order within `sup`, decided by enumerating all of them.
pub fn is_subsequence_brute<T: Clone + PartialEq>(sub: &[T], sup: &[T]) -> bool {
    subsequences(sup).iter().any(|s| s.as_slice() == sub)
}

/// Every list of length at most `max_len` over `alphabet`.
pub fn all_lists<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for list in &frontier {
            for a in alphabet {
                let mut l: Vec<T> = list.clone();
                l.push(a.clone());
                next.push(l);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(subsequences(&[1, 2, 3]).len(), 8);
        assert_eq!(
            all_lists(&['a', 'b', 'c'], 5).len(),
            1 + 3 + 9 + 27 + 81 + 243
        );
        assert!(is_subsequence_brute(&[1, 3], &[1, 2, 3]));
        assert!(!is_subsequence_brute(&[3, 1], &[1, 2, 3]));
    }
}
