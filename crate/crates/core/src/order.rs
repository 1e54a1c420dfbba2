//! Partial orders over completed state spaces, Hoare comparison of finite
//! sets and antichain maintenance.
//!
//! Every domain in this crate carries two orders: the semantic partial order
//! exposed through [`OrderedDomain::leq`], and a total tie-break order (`Ord`)
//! used only to print sets deterministically.

/// A state space with a decidable partial order.
pub trait OrderedDomain {
    /// The partial order. Must be reflexive, transitive and antisymmetric on
    /// canonical representations.
    fn leq(&self, other: &Self) -> bool;

    /// True for proper limits, i.e. elements that are not the embedding of a
    /// concrete state.
    fn is_limit(&self) -> bool;

    /// Strict part of [`OrderedDomain::leq`].
    fn less(&self, other: &Self) -> bool
    where
        Self: PartialEq,
    {
        self != other && self.leq(other)
    }
}

/// `A ≤♭ B`: every element of `a` lies below some element of `b`, i.e. the
/// downward closure of `a` is contained in that of `b`.
pub fn hoare_leq<E: OrderedDomain>(a: &[E], b: &[E]) -> bool {
    a.iter().all(|x| is_dominated(x, b))
}

/// True iff `x` belongs to the downward closure of `set`.
pub fn is_dominated<E: OrderedDomain>(x: &E, set: &[E]) -> bool {
    set.iter().any(|y| x.leq(y))
}

/// Maximal elements of `set`, deduplicated and sorted by the tie-break order.
pub fn max_of<E: OrderedDomain + Ord + Clone>(set: &[E]) -> Vec<E> {
    let mut out: Vec<E> = Vec::new();
    for x in set {
        insert_reduced(&mut out, x.clone());
    }
    out
}

/// Inserts `x` into the antichain `set`, keeping it an antichain with the
/// same downward closure as `set ∪ {x}`.
///
/// Returns `true` iff the downward closure strictly grew. The set is left
/// sorted by the tie-break order.
pub fn insert_reduced<E: OrderedDomain + Ord>(set: &mut Vec<E>, x: E) -> bool {
    if is_dominated(&x, set) {
        return false;
    }
    set.retain(|y| !y.leq(&x));
    let pos = set.binary_search(&x).unwrap_or_else(|p| p);
    set.insert(pos, x);
    true
}

/// True iff no two distinct members of `set` are comparable.
pub fn is_antichain<E: OrderedDomain>(set: &[E]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, x)| set.iter().enumerate().all(|(j, y)| i == j || !x.leq(y)))
}

/// Rado's structure `{(m, n) ∈ ℕ² | m < n}`, a wqo whose ideal completion is
/// not well-ordered. Kept as a fixture that exhibits the failure mode of
/// non-ω²-wqo state spaces.
pub mod rado {
    use std::fmt;

    #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
    pub struct RadoPair {
        m: u64,
        n: u64,
    }

    impl RadoPair {
        /// Returns `None` unless `m < n`.
        pub fn new(m: u64, n: u64) -> Option<Self> {
            (m < n).then_some(RadoPair { m, n })
        }

        pub fn m(&self) -> u64 {
            self.m
        }

        pub fn n(&self) -> u64 {
            self.n
        }
    }

    impl fmt::Display for RadoPair {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "({},{})", self.m, self.n)
        }
    }

    /// `(m,n) ≤ (m',n')` iff `m = m'` and `n ≤ n'`, or `n < m'`.
    pub fn rado_leq(p: RadoPair, q: RadoPair) -> bool {
        (p.m == q.m && p.n <= q.n) || p.n < q.m
    }

    /// The ideal `ω_i`, represented symbolically and never enumerated.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub struct OmegaIdeal {
        pub i: u64,
    }

    impl OmegaIdeal {
        /// `(m,n) ∈ ω_i` iff `m = i ∧ n ≥ i+1`, or `n ≤ i-1`.
        pub fn contains(&self, p: RadoPair) -> bool {
            rado_omega_ideal_member(self.i, p)
        }
    }

    pub fn rado_omega_ideal_member(i: u64, p: RadoPair) -> bool {
        (p.m == i && p.n > i) || p.n < i
    }
}

#[cfg(test)]
mod tests {
    use super::rado::*;
    use super::*;

    #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
    struct P(u32, u32);

    impl OrderedDomain for P {
        fn leq(&self, o: &Self) -> bool {
            self.0 <= o.0 && self.1 <= o.1
        }
        fn is_limit(&self) -> bool {
            false
        }
    }

    #[test]
    fn hoare_on_empty_and_simple_sets() {
        assert!(hoare_leq::<P>(&[], &[]));
        assert!(hoare_leq(&[], &[P(0, 0)]));
        assert!(!hoare_leq(&[P(0, 0)], &[]));
        assert!(!hoare_leq(&[P(2, 0), P(0, 2)], &[P(1, 1)]));
        assert!(hoare_leq(&[P(2, 0), P(0, 2)], &[P(2, 2)]));
    }

    #[test]
    fn max_keeps_maximal_elements() {
        assert_eq!(max_of(&[P(1, 2), P(1, 1), P(0, 3)]), vec![P(0, 3), P(1, 2)]);
        assert!(max_of::<P>(&[]).is_empty());
        assert_eq!(max_of(&[P(1, 1), P(1, 1)]), vec![P(1, 1)]);
    }

    #[test]
    fn insert_reduced_cases() {
        let mut a = vec![P(1, 2)];
        assert!(!insert_reduced(&mut a, P(1, 1)));
        assert_eq!(a, vec![P(1, 2)]);
        assert!(insert_reduced(&mut a, P(0, 3)));
        assert_eq!(a, vec![P(0, 3), P(1, 2)]);
        assert!(insert_reduced(&mut a, P(2, 2)));
        assert_eq!(a, vec![P(0, 3), P(2, 2)]);
        assert!(is_antichain(&a));
    }

    #[test]
    fn rado_pairs() {
        let p = |m, n| RadoPair::new(m, n).unwrap();
        assert!(RadoPair::new(3, 3).is_none());
        assert!(rado_leq(p(0, 1), p(0, 5)));
        assert!(rado_leq(p(0, 1), p(2, 3)));
        assert!(!rado_leq(p(0, 2), p(1, 2)));
        assert!(!rado_leq(p(1, 2), p(0, 2)));
        assert!(rado_omega_ideal_member(2, p(2, 5)));
        assert!(rado_omega_ideal_member(2, p(0, 1)));
        assert!(!rado_omega_ideal_member(2, p(0, 3)));
    }
}
