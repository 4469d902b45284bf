mod props;

use proptest::prelude::*;

use detool_core::Kind;
use props::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn dot_matches_pointwise_product(
        a in depoly(3, 1, 3, 4), b in depoly(3, 1, 3, 4), y in signal(24), u in signal(24)
    ) {
        dot_numeric(&a, &b, &y, &u)?;
    }

    #[test]
    fn star_matches_composition(
        a in depoly(3, 1, 3, 4), (l, m) in lin_pair(), y in signal(24), u in signal(24)
    ) {
        star_numeric(&a, &l, &m, &y, &u)?;
    }

    #[test]
    fn star_distributes_and_composes(
        a in depoly(2, 1, 2, 3), b in depoly(2, 1, 2, 3), (l1, m1) in lin_pair(), (l2, m2) in lin_pair()
    ) {
        star_laws(&a, &b, &l1, &m1, &l2, &m2)?;
    }

    #[test]
    fn homogeneous_star_round_trip(
        t in index(1, 3, 4), la in rational(), mu in nonzero(), (l, m) in lin_pair()
    ) {
        homogeneous_round_trip(&t, &la, &mu, &l, &m)?;
    }

    #[test]
    fn factorization_reconstructs(a in factorizable(), v in prop::collection::vec(rational(), 1..4)) {
        reconstruction(&a, &v)?;
    }

    #[test]
    fn remainder_is_pure_and_passes_decrease(a in factorizable()) {
        remainder_purity(&a)?;
    }

    #[test]
    fn gcd_and_division_laws(
        a in linear(Kind::Delta, 3), b in linear(Kind::Delta, 3), c in linear(Kind::Delta, 2),
        y in signal(16)
    ) {
        gcd_laws(&a, &b, &c, &y)?;
    }

    #[test]
    fn parameter_polynomials_form_a_ring(a in parampoly(), b in parampoly(), c in parampoly()) {
        ring_laws(&a, &b, &c)?;
    }
}

#[test]
fn star_does_not_distribute_over_signal_sums() {
    let (whole, parts) = non_distributive_witness();
    assert_ne!(whole, parts);
}
