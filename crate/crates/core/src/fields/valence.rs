//! Component bookkeeping for fields valued in `Λ^p T^{1,0} ⊗ Λ^q T^{*0,1}`.
//!
//! A component is a pair of index subsets of `{0..n-1}` stored as bitmasks:
//! the monomial `θ_A ∧ χ_B` with `θ_a = ∂_{z^a}`, `χ_b = dz̄^b`, indices
//! ascending and all θ factors written before all χ factors.

/// Bidegree of a tensor field: `vec` slots in `T^{1,0}`, `form` slots in
/// `T^{*0,1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Valence {
    pub vec: usize,
    pub form: usize,
}

impl Valence {
    pub const SCALAR: Valence = Valence { vec: 0, form: 0 };

    pub fn new(vec: usize, form: usize) -> Self {
        Self { vec, form }
    }

    /// Total (unshifted) degree in `Λ^• L̃`.
    pub fn degree(&self) -> usize {
        self.vec + self.form
    }

    /// All components `(A, B)` in storage order: A ascending, then B.
    pub fn components(&self, n: usize) -> Vec<(u32, u32)> {
        let vs = subsets(n, self.vec);
        let fs = subsets(n, self.form);
        let mut out = Vec::with_capacity(vs.len() * fs.len());
        for &a in &vs {
            for &b in &fs {
                out.push((a, b));
            }
        }
        out
    }

    pub fn component_count(&self, n: usize) -> usize {
        binom(n, self.vec) * binom(n, self.form)
    }

    /// Index of component `(a, b)` in storage order.
    pub fn component_index(&self, n: usize, a: u32, b: u32) -> usize {
        subset_rank(n, self.vec, a) * binom(n, self.form) + subset_rank(n, self.form, b)
    }
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Subsets of `{0..n-1}` of size `k`, ordered by bitmask value.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for m in 0u32..(1 << n) {
        if m.count_ones() as usize == k {
            out.push(m);
        }
    }
    out
}

fn subset_rank(n: usize, k: usize, mask: u32) -> usize {
    subsets(n, k).iter().position(|&m| m == mask).expect("mask of wrong size")
}

/// Sign of merging two disjoint ascending index lists given as bitmasks:
/// the parity of the number of transpositions needed to sort `A ++ B`.
pub fn merge_sign(a: u32, b: u32) -> i32 {
    debug_assert_eq!(a & b, 0);
    let mut sign = 1i32;
    let mut bb = b;
    while bb != 0 {
        let lowest = bb & bb.wrapping_neg();
        let idx = lowest.trailing_zeros();
        // elements of `a` strictly above idx must be jumped over
        let above = (a >> (idx + 1)).count_ones();
        if above % 2 == 1 {
            sign = -sign;
        }
        bb &= bb - 1;
    }
    sign
}

/// Sign picked up by the left odd derivative `∂/∂θ_i` acting on `θ_A`:
/// `(-1)^{#{j in A : j < i}}`; `i` must be a member of `A`.
pub fn removal_sign(a: u32, i: u32) -> i32 {
    debug_assert!(a & (1 << i) != 0);
    let below = (a & ((1u32 << i) - 1)).count_ones();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_signs() {
        // {0} then {1}: already sorted
        assert_eq!(merge_sign(0b01, 0b10), 1);
        // {1} then {0}: one swap
        assert_eq!(merge_sign(0b10, 0b01), -1);
        // {1} then {0,2}: 0 jumps over 1 -> -1; 2 in place
        assert_eq!(merge_sign(0b010, 0b101), -1);
    }

    #[test]
    fn removal_signs() {
        assert_eq!(removal_sign(0b11, 0), 1);
        assert_eq!(removal_sign(0b11, 1), -1);
    }

    #[test]
    fn component_enumeration() {
        let v = Valence::new(1, 1);
        let comps = v.components(2);
        assert_eq!(comps.len(), 4);
        assert_eq!(v.component_count(2), 4);
        for (i, &(a, b)) in comps.iter().enumerate() {
            assert_eq!(v.component_index(2, a, b), i);
        }
    }
}
