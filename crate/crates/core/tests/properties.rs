//! Seeded property suites. None of them need fixture files.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(96, 0x5eed_0001))]

    #[test]
    fn pfaffian_squared_is_det(n in even_dim(), raw in skew_entries(6)) {
        common::pfaffian_squared_is_det(n, &raw)?;
    }

    #[test]
    fn type_invariant_under_congruence(
        n in prop::sample::select(vec![4usize, 6]),
        raw in skew_entries(6),
        ops in basis_ops(6, 1..12, 3),
    ) {
        common::type_invariant_under_congruence(n, &raw, &ops)?;
    }

    #[test]
    fn primitive_part_scales(raw in skew_entries(4), k in 1i64..20) {
        common::primitive_part_scales(&raw, k)?;
    }
}

proptest! {
    #![proptest_config(config(64, 0x5eed_0002))]

    #[test]
    fn twist_composition(t in (-5i64..=5, -5i64..=5), s in (-5i64..=5, -5i64..=5)) {
        common::twist_composition(t, s)?;
    }

    #[test]
    fn principality_survives_basis_change(ops in basis_ops(4, 1..8, 2)) {
        common::principality_survives_basis_change(&ops)?;
    }
}

proptest! {
    #![proptest_config(config(120, 0x5eed_0003))]

    #[test]
    fn norm_solver_matches_brute_force(disc in prop::sample::select(real_discs()), d in -20i64..=20) {
        common::norm_solver_matches_brute_force(disc, d)?;
    }

    #[test]
    fn fundamental_unit_is_minimal(disc in prop::sample::select(real_discs())) {
        common::fundamental_unit_is_minimal(disc)?;
    }
}

proptest! {
    #![proptest_config(config(24, 0x5eed_0004))]

    #[test]
    fn theta_factors_on_diagonal(t1 in tau(), t2 in tau()) {
        common::theta_factors_on_diagonal(t1, t2)?;
    }
}

proptest! {
    #![proptest_config(config(48, 0x5eed_0005))]

    #[test]
    fn igusa_invariant_under_substitution(c in sextic(), m in prop::array::uniform4(-3i64..=3), k in 1i64..5) {
        common::igusa_invariant_under_substitution(c, m, k)?;
    }
}
