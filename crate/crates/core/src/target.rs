//! Cohomological data of a real symplectic sixfold `(X, ω, φ)` needed on both
//! sides of the WDVV relations, and the shipped instance `(ℙ³, τ₃)`.
//!
//! Degrees of cohomology classes are half-degrees throughout: `h^j` has
//! half-degree `j`.

use crate::algebra::{int, MultiIndex, Rational};
use num_traits::Zero;

/// Multiple `d` of the generator of `H₂`; the line class for ℙ³.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeClass(pub i64);

impl std::ops::Add for DegreeClass {
    type Output = DegreeClass;
    fn add(self, rhs: DegreeClass) -> DegreeClass {
        DegreeClass(self.0 + rhs.0)
    }
}

/// Sign of `φ*` on a homogeneous generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: &'static str,
    pub half_degree: u32,
    pub phi_sign: PhiSign,
}

/// What the relations need to know about the target.
///
/// Only [`ProjectiveThreeSpace`] ships; other real sixfolds plug in here.
pub trait TargetModel: Send + Sync {
    fn id(&self) -> &'static str;

    /// Homogeneous basis of `H⁰ ⊕ H²₋ ⊕ H⁴₊ ⊕ H⁶`.
    fn basis(&self) -> &[Generator];

    /// `g_ij = ⟨μ_i μ_j, [X]⟩`
    fn pairing(&self, i: usize, j: usize) -> Rational;

    /// `g^{ij}`
    fn inverse_pairing(&self, i: usize, j: usize) -> Rational;

    /// `⟨μ_a μ_b μ_c, [X]⟩`, the degree-0 three-point invariant.
    fn triple_intersection(&self, a: usize, b: usize, c: usize) -> Rational;

    /// `ℓ_ω(B) = ⟨c₁(X), B⟩`
    fn ell_omega(&self, degree: DegreeClass) -> i64;

    /// `𝔡(B′) = B′ − φ_*(B′)`
    fn doubling(&self, degree: DegreeClass) -> DegreeClass;

    /// Whether `B` is `(X̌^φ, ℤ₂)`-trivial.
    fn z2_trivial(&self, degree: DegreeClass) -> bool;

    /// `⟨μ_j, B⟩` for a generator of half-degree 1.
    fn divisor_pairing(&self, j: usize, degree: DegreeClass) -> Rational;

    /// Complex invariants taken as input rather than derived.
    fn complex_seeds(&self) -> Vec<(u32, MultiIndex, Rational)>;

    fn rank(&self) -> usize {
        self.basis().len()
    }

    fn half_degrees(&self) -> Vec<u32> {
        self.basis().iter().map(|g| g.half_degree).collect()
    }

    fn unit_index(&self) -> usize {
        self.basis()
            .iter()
            .position(|g| g.half_degree == 0)
            .expect("basis contains H^0")
    }

    /// Slots that survive divisor and unit reduction and so index stored keys.
    fn primary_slots(&self) -> Vec<usize> {
        self.basis()
            .iter()
            .enumerate()
            .filter(|(_, g)| g.half_degree >= 2)
            .map(|(j, _)| j)
            .collect()
    }

    /// Generators in `H²₊ ⊕ H⁴₋`, on which the averaged disk functional vanishes.
    fn real_vanishing_generator(&self, j: usize) -> bool {
        let g = &self.basis()[j];
        matches!(
            (g.half_degree, g.phi_sign),
            (1, PhiSign::Plus) | (2, PhiSign::Minus)
        )
    }

    /// Vanishing of the disk invariant forced by the averager: `B` is
    /// ℤ₂-trivial and `ℓ_ω(B)/2` has the parity of the number of `H⁴`
    /// insertions.
    fn parity_vanishes(&self, degree: DegreeClass, insertions: &MultiIndex) -> bool {
        let h4: u32 = self
            .basis()
            .iter()
            .enumerate()
            .filter(|(_, g)| g.half_degree == 2)
            .map(|(j, _)| insertions.get(j))
            .sum();
        self.z2_trivial(degree) && (self.ell_omega(degree) / 2 - h4 as i64).rem_euclid(2) == 0
    }

    /// Complex dimension of `X`.
    fn complex_dimension(&self) -> u32 {
        3
    }

    /// All insertion patterns supported on [`primary_slots`](Self::primary_slots)
    /// with `Σ λ_j (|μ_j| − 1)` equal to `excess`.
    fn primary_patterns(&self, excess: u32) -> Vec<MultiIndex> {
        let slots = self.primary_slots();
        let weights: Vec<u32> = slots
            .iter()
            .map(|&j| self.basis()[j].half_degree - 1)
            .collect();
        let mut out = Vec::new();
        let mut current = MultiIndex::zeros(self.rank());
        fill_patterns(&slots, &weights, 0, excess, &mut current, &mut out);
        out
    }

    /// Dimension count `k_B(μ)` of real points.
    fn real_point_count(&self, degree: DegreeClass, insertions: &MultiIndex) -> i64 {
        let l = insertions.total() as i64;
        let deg: i64 = 2 * insertions.weighted(&self.half_degrees()) as i64;
        let twice = self.ell_omega(degree) + 2 * l - deg;
        debug_assert!(twice % 2 == 0, "odd dimension count");
        twice / 2
    }
}

fn fill_patterns(
    slots: &[usize],
    weights: &[u32],
    pos: usize,
    remaining: u32,
    current: &mut MultiIndex,
    out: &mut Vec<MultiIndex>,
) {
    if pos == slots.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    for n in 0..=remaining / weights[pos] {
        current.set(slots[pos], n);
        fill_patterns(slots, weights, pos + 1, remaining - n * weights[pos], current, out);
    }
    current.set(slots[pos], 0);
}

const P3_BASIS: [Generator; 4] = [
    Generator {
        label: "1",
        half_degree: 0,
        phi_sign: PhiSign::Plus,
    },
    Generator {
        label: "h",
        half_degree: 1,
        phi_sign: PhiSign::Minus,
    },
    Generator {
        label: "h2",
        half_degree: 2,
        phi_sign: PhiSign::Plus,
    },
    Generator {
        label: "h3",
        half_degree: 3,
        phi_sign: PhiSign::Minus,
    },
];

/// `(ℙ³, τ₃)` with basis `1, h, h², h³`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProjectiveThreeSpace;

impl ProjectiveThreeSpace {
    pub const UNIT: usize = 0;
    pub const HYPERPLANE: usize = 1;
    pub const LINE: usize = 2;
    pub const POINT: usize = 3;

    /// Multi-index with `lines` copies of `h²` and `points` copies of `h³`.
    pub fn insertions(lines: u32, points: u32) -> MultiIndex {
        MultiIndex::from_counts(&[0, 0, lines, points])
    }
}

impl TargetModel for ProjectiveThreeSpace {
    fn id(&self) -> &'static str {
        "p3"
    }

    fn basis(&self) -> &[Generator] {
        &P3_BASIS
    }

    fn pairing(&self, i: usize, j: usize) -> Rational {
        if i + j == 3 {
            int(1)
        } else {
            Rational::zero()
        }
    }

    // The pairing is an involutive permutation matrix.
    fn inverse_pairing(&self, i: usize, j: usize) -> Rational {
        self.pairing(i, j)
    }

    fn triple_intersection(&self, a: usize, b: usize, c: usize) -> Rational {
        if a + b + c == 3 {
            int(1)
        } else {
            Rational::zero()
        }
    }

    fn ell_omega(&self, degree: DegreeClass) -> i64 {
        4 * degree.0
    }

    // φ_* ℓ = −ℓ
    fn doubling(&self, degree: DegreeClass) -> DegreeClass {
        DegreeClass(2 * degree.0)
    }

    fn z2_trivial(&self, degree: DegreeClass) -> bool {
        degree.0 % 2 == 0
    }

    fn divisor_pairing(&self, j: usize, degree: DegreeClass) -> Rational {
        debug_assert_eq!(j, Self::HYPERPLANE);
        int(degree.0)
    }

    fn complex_seeds(&self) -> Vec<(u32, MultiIndex, Rational)> {
        vec![
            (1, Self::insertions(4, 0), int(2)),
            (1, Self::insertions(2, 1), int(1)),
            (1, Self::insertions(0, 2), int(1)),
        ]
    }

    /// On ℙ³ the disk invariants `⟨ℓ̃^a pt^b⟩_d` vanish whenever `d + a` is
    /// even; this covers the averager case (d, a both even) and the odd one.
    fn parity_vanishes(&self, degree: DegreeClass, insertions: &MultiIndex) -> bool {
        (degree.0 + insertions.get(Self::LINE) as i64) % 2 == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P3: ProjectiveThreeSpace = ProjectiveThreeSpace;

    #[test]
    fn basis_shape() {
        assert_eq!(P3.rank(), 4);
        assert_eq!(P3.half_degrees(), vec![0, 1, 2, 3]);
        assert_eq!(P3.unit_index(), 0);
        assert_eq!(P3.primary_slots(), vec![2, 3]);
        for j in 0..4 {
            assert!(!P3.real_vanishing_generator(j));
        }
    }

    #[test]
    fn pairing_inverse_is_exact() {
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(P3.pairing(i, j), P3.pairing(j, i));
                let mut acc = Rational::zero();
                for m in 0..4 {
                    acc += P3.inverse_pairing(i, m) * P3.pairing(m, j);
                }
                assert_eq!(acc, if i == j { int(1) } else { int(0) });
            }
        }
        assert_eq!(P3.pairing(0, 3), int(1));
        assert_eq!(P3.pairing(1, 2), int(1));
        assert_eq!(P3.pairing(1, 1), int(0));
    }

    #[test]
    fn phi_signs_alternate() {
        for g in P3.basis() {
            let expected = if g.half_degree % 2 == 0 {
                PhiSign::Plus
            } else {
                PhiSign::Minus
            };
            assert_eq!(g.phi_sign, expected);
        }
    }

    #[test]
    fn patterns_enumerate_dimension_solutions() {
        let pats = P3.primary_patterns(4);
        let ab: Vec<(u32, u32)> = pats.iter().map(|m| (m.get(2), m.get(3))).collect();
        assert_eq!(ab, vec![(0, 2), (2, 1), (4, 0)]);
        assert_eq!(P3.primary_patterns(0), vec![MultiIndex::zeros(4)]);
    }

    #[test]
    fn chern_and_doubling() {
        assert_eq!(P3.ell_omega(DegreeClass(1)), 4);
        assert_eq!(P3.ell_omega(DegreeClass(0)), 0);
        assert_eq!(P3.ell_omega(DegreeClass(3)), 12);
        assert_eq!(P3.doubling(DegreeClass(1)), DegreeClass(2));
        assert_eq!(P3.doubling(DegreeClass(0)), DegreeClass(0));
        assert_eq!(P3.doubling(DegreeClass(3)), DegreeClass(6));
    }

    #[test]
    fn z2_triviality() {
        assert!(P3.z2_trivial(DegreeClass(2)));
        assert!(!P3.z2_trivial(DegreeClass(1)));
        assert!(P3.z2_trivial(DegreeClass(0)));
    }

    #[test]
    fn point_count_matches_table_convention() {
        // k = 2d − a − 2b
        for d in 1..5 {
            for a in 0..5 {
                for b in 0..3 {
                    let k = P3.real_point_count(
                        DegreeClass(d),
                        &ProjectiveThreeSpace::insertions(a, b),
                    );
                    assert_eq!(k, 2 * d - a as i64 - 2 * b as i64);
                }
            }
        }
        // h insertions leave k unchanged
        let with_h = MultiIndex::from_counts(&[0, 3, 1, 0]);
        assert_eq!(P3.real_point_count(DegreeClass(2), &with_h), 3);
    }

    #[test]
    fn averager_parity_is_implied() {
        // The ℙ³ rule contains the generic one.
        struct Generic;
        impl TargetModel for Generic {
            fn id(&self) -> &'static str { "generic-p3" }
            fn basis(&self) -> &[Generator] { P3.basis() }
            fn pairing(&self, i: usize, j: usize) -> Rational { P3.pairing(i, j) }
            fn inverse_pairing(&self, i: usize, j: usize) -> Rational { P3.inverse_pairing(i, j) }
            fn triple_intersection(&self, a: usize, b: usize, c: usize) -> Rational { P3.triple_intersection(a, b, c) }
            fn ell_omega(&self, d: DegreeClass) -> i64 { P3.ell_omega(d) }
            fn doubling(&self, d: DegreeClass) -> DegreeClass { P3.doubling(d) }
            fn z2_trivial(&self, d: DegreeClass) -> bool { P3.z2_trivial(d) }
            fn divisor_pairing(&self, j: usize, d: DegreeClass) -> Rational { P3.divisor_pairing(j, d) }
            fn complex_seeds(&self) -> Vec<(u32, MultiIndex, Rational)> { P3.complex_seeds() }
        }
        for d in 0..6 {
            for a in 0..6 {
                let ins = ProjectiveThreeSpace::insertions(a, 0);
                if Generic.parity_vanishes(DegreeClass(d), &ins) {
                    assert!(P3.parity_vanishes(DegreeClass(d), &ins));
                    assert!(d % 2 == 0 && a % 2 == 0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn ell_omega_additive(a in -50i64..50, b in -50i64..50) {
            prop_assert_eq!(
                P3.ell_omega(DegreeClass(a) + DegreeClass(b)),
                P3.ell_omega(DegreeClass(a)) + P3.ell_omega(DegreeClass(b))
            );
        }
    }
}
