use etfforge_core::verify::{count_orthogonal_ovoid_vectors, numeric_rank, phased_bibd_dimension};
use etfforge_core::*;

fn assert_exact_matches_numeric(m: &PolyphaseMatrix) {
    let comb = verify_polyphase_combinatorial(m);
    let alg = verify_polyphase_algebraic(m);
    assert!(comb.passed(), "{comb}");
    assert!(alg.passed(), "{alg}");
    let bibd = BibdParams::from_incidence(&m.modulus_squared()).unwrap();
    let d = phased_bibd_dimension(&bibd).unwrap() as usize;
    for gamma in characters_of(m.group()).into_iter().skip(1) {
        let (rep, num) = verify_etf_numeric(&m.evaluate(&gamma).unwrap()).unwrap();
        assert!(rep.passed(), "{gamma}: {rep}");
        assert_eq!(num.d, d, "{gamma}");
        assert_eq!(num.n as u64, bibd.v);
    }
}

#[test]
fn simplex_rank_is_v_minus_1() {
    for v in 3..=9 {
        let m = simplex_phased(v).unwrap();
        assert_eq!((m.rows(), m.cols()), (v * (v - 1) / 2, v));
        for gamma in characters_of(m.group()).into_iter().skip(1) {
            assert_eq!(
                numeric_rank(&m.evaluate(&gamma).unwrap()),
                v - 1,
                "v={v} at {gamma}"
            );
        }
    }
}

#[test]
fn small_constructions_pass_exact_and_numeric_checks() {
    for v in 3..=6 {
        assert_exact_matches_numeric(&simplex_phased(v).unwrap());
    }
    assert_exact_matches_numeric(&example_9_3_3());
    for q in [2, 3, 4, 5] {
        assert_exact_matches_numeric(&affine_polyphase(q).unwrap());
    }
    for q in [2, 3] {
        assert_exact_matches_numeric(&brouwer_polyphase(q).unwrap());
    }
}

#[test]
fn affine_gram_is_q_identity_plus_psi() {
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let m = affine_polyphase(q).unwrap();
        let g = m.group().clone();
        let field = FiniteField::with_order(q).unwrap();
        // columns are indexed by field elements in the field's listing order
        let elems = field.elements();
        let to_group = |e: &FieldElement| {
            let t: Vec<usize> = e.coeffs().iter().map(|&c| c as usize).collect();
            g.encode(&t).unwrap()
        };
        let phi = m.to_group_ring();
        let gram = phi.adjoint().matmul(&phi).unwrap();
        let q = q as usize;
        assert_eq!(gram.rows(), q * q);
        for (a, (j, y)) in elems
            .iter()
            .flat_map(|j| elems.iter().map(move |y| (j, y)))
            .enumerate()
        {
            for (b, (jp, yp)) in elems
                .iter()
                .flat_map(|j| elems.iter().map(move |y| (j, y)))
                .enumerate()
            {
                // z^{-(j - j')(y + y')}
                let e = to_group(&(&(jp - j) * &(y + yp)));
                let mut want = GroupRingElement::monomial(&g, e);
                if a == b {
                    want = want.add(&GroupRingElement::scalar(&g, q as i64)).unwrap();
                }
                assert_eq!(gram.get(a, b), want, "q={q} columns {a}, {b}");
            }
        }
    }
}

#[test]
fn brouwer_q3_parameters() {
    let m = brouwer_polyphase(3).unwrap();
    assert_eq!((m.rows(), m.cols()), (63, 28));
    assert_eq!(m.group().order(), 4);
    let x = m.modulus_squared();
    assert_eq!(BibdParams::from_incidence(&x), BibdParams::new(28, 4));
    let lift = m.filter_bank_lift();
    assert_eq!((lift.rows(), lift.cols()), (252, 112));
    assert!(verify_gq_axioms(&gq_from_polyphase(&m).unwrap(), 3, 9, true).passed());
}

#[test]
fn brouwer_q3_is_real_at_the_real_character() {
    let m = brouwer_polyphase(3).unwrap();
    let gamma = m.group().real_character().unwrap();
    let phi = m.evaluate(&gamma).unwrap();
    assert!(phi.is_real(1e-12));
    for i in 0..phi.rows() {
        for j in 0..phi.cols() {
            let x = phi.get(i, j).re;
            assert!(x == 0.0 || x == 1.0 || x == -1.0, "entry ({i},{j}) = {x}");
        }
    }
    let (rep, num) = verify_etf_numeric(&phi).unwrap();
    assert!(rep.passed(), "{rep}");
    assert_eq!((num.d, num.n), (21, 28));
}

#[test]
fn ovoid_vectors_orthogonal_to_a_vertex() {
    for q in [2u64, 3] {
        let geo = brouwer_geometry(q).unwrap();
        let want = (q + 1) * (q * q - 1);
        for v in (0..geo.vertices().len()).filter(|&v| !geo.is_ovoid(v)) {
            assert_eq!(
                count_orthogonal_ovoid_vectors(&geo, v).unwrap(),
                want,
                "q={q} vertex {v}"
            );
        }
    }
}

#[test]
fn every_vertex_lies_on_q_plus_1_blocks() {
    for q in [2u64, 3] {
        let geo = brouwer_geometry(q).unwrap();
        for v in 0..geo.vertices().len() {
            assert_eq!(
                count_blocks_through_vertex(&geo, v).unwrap(),
                q as usize + 1
            );
        }
    }
}

#[test]
fn gq_round_trip_through_polyphase() {
    let m = affine_polyphase(3).unwrap();
    let z = gq_from_polyphase(&m).unwrap();
    let back = polyphase_from_gq(&z, m.group()).unwrap();
    assert!(verify_polyphase_algebraic(&back).passed());
    assert_eq!(back.modulus_squared(), m.modulus_squared());
}
