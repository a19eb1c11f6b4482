//! Randomized cross-validation of staircase arithmetic against the
//! brute-force box oracle: colon, inverse, v-closure, and intersection must
//! agree with direct quantifier evaluation on every box point, across all
//! five supported value structures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starforge::oracle::{self, Box as OBox, DEFAULT_BOX_CAP, DEFAULT_BOX_RADIUS};
use starforge::staircase::Staircase;
use starforge::values::{ValueGroupDesc, ValueVector};

fn groups() -> Vec<ValueGroupDesc> {
    vec![
        ValueGroupDesc::componentwise_n(1),
        ValueGroupDesc::componentwise_n(2),
        ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap(),
        ValueGroupDesc::lex_z(1),
        ValueGroupDesc::lex_z(2),
    ]
}

fn random_staircase(rng: &mut ChaCha8Rng, g: &ValueGroupDesc, fractional: bool) -> Staircase {
    let arity = g.arity();
    let n_gens = rng.gen_range(1..=4);
    let lo = if fractional { -3 } else { 0 };
    let gens: Vec<ValueVector> = (0..n_gens)
        .map(|_| (0..arity).map(|_| rng.gen_range(lo..=4)).collect())
        .collect();
    Staircase::new(g.clone(), gens).expect("nonempty generator list")
}

#[test]
fn staircase_ops_match_box_oracle_on_500_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5742_0001);
    let groups = groups();
    let mut instances = 0usize;
    while instances < 500 {
        for g in &groups {
            instances += 1;
            let bx = OBox::radius(g.arity(), DEFAULT_BOX_RADIUS);
            let a = random_staircase(&mut rng, g, true);
            let b = random_staircase(&mut rng, g, false);

            let computed = a.colon(&b, true).unwrap();
            let orc = oracle::colon_in_box(&a, &b, &bx, DEFAULT_BOX_CAP).unwrap();
            if let Some(p) = oracle::agree_on_box(&computed, &orc, &bx, DEFAULT_BOX_CAP).unwrap() {
                panic!("colon disagrees at {p:?}\n  A = {a:?}\n  B = {b:?}\n  computed = {computed:?}");
            }

            let computed = a.inverse().unwrap();
            let orc = oracle::inverse_in_box(&a, &bx, DEFAULT_BOX_CAP).unwrap();
            if let Some(p) = oracle::agree_on_box(&computed, &orc, &bx, DEFAULT_BOX_CAP).unwrap() {
                panic!("inverse disagrees at {p:?}\n  A = {a:?}\n  computed = {computed:?}");
            }

            let computed = a.v_closure().unwrap();
            let orc = oracle::v_closure_in_box(&a, &bx, DEFAULT_BOX_CAP).unwrap();
            if let Some(p) = oracle::agree_on_box(&computed, &orc, &bx, DEFAULT_BOX_CAP).unwrap() {
                panic!("v_closure disagrees at {p:?}\n  A = {a:?}\n  computed = {computed:?}");
            }

            let computed = a.intersect(&b).unwrap();
            let orc = oracle::intersect_in_box(&a, &b, &bx, DEFAULT_BOX_CAP).unwrap();
            if let Some(p) = oracle::agree_on_box(&computed, &orc, &bx, DEFAULT_BOX_CAP).unwrap() {
                panic!("intersect disagrees at {p:?}\n  A = {a:?}\n  B = {b:?}\n  computed = {computed:?}");
            }
        }
    }
    assert!(instances >= 500);
}

#[test]
fn totally_ordered_staircases_are_principal() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5742_0002);
    for g in [ValueGroupDesc::lex_z(1), ValueGroupDesc::lex_z(2)] {
        for _ in 0..100 {
            let s = random_staircase(&mut rng, &g, true);
            assert!(s.is_principal(), "non-principal in totally ordered kind: {s:?}");
            // A principal times its inverse is exactly the ring.
            let prod = s.product(&s.inverse().unwrap()).unwrap();
            assert!(prod.is_ring());
        }
    }
}

#[test]
fn product_with_inverse_stays_in_ring() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5742_0003);
    for g in groups() {
        for _ in 0..50 {
            let a = random_staircase(&mut rng, &g, false);
            let prod = a.product(&a.inverse().unwrap()).unwrap();
            let ring = Staircase::ring(g.clone());
            assert!(
                prod.subset_of(&ring).unwrap(),
                "A * A^-1 not inside the ring: A = {a:?}, product = {prod:?}"
            );
        }
    }
}
