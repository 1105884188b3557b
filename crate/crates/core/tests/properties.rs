use etfforge_core::verify::{u_dimension_identity, numeric_rank, reciprocal_welch_identities};
use etfforge_core::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn group_strategy() -> impl Strategy<Value = AbelianGroup> {
    prop::collection::vec(2usize..=5, 1..=2).prop_map(|f| AbelianGroup::new(&f).unwrap())
}

fn element(group: &AbelianGroup) -> impl Strategy<Value = GroupRingElement> {
    let g = group.clone();
    prop::collection::vec(-3i64..=3, group.order())
        .prop_map(move |c| GroupRingElement::from_coeffs(&g, c).unwrap())
}

fn group_and_elements(n: usize) -> impl Strategy<Value = (AbelianGroup, Vec<GroupRingElement>)> {
    group_strategy().prop_flat_map(move |g| {
        let es = prop::collection::vec(element(&g), n);
        (Just(g), es)
    })
}

fn gr_matrix(
    group: &AbelianGroup,
    rows: usize,
    cols: usize,
) -> impl Strategy<Value = GroupRingMatrix> {
    let g = group.clone();
    prop::collection::vec(-2i64..=2, rows * cols * group.order()).prop_map(move |data| {
        let f = g.order();
        let mut m = GroupRingMatrix::zeros(rows, cols, &g);
        for i in 0..rows {
            for j in 0..cols {
                let at = (i * cols + j) * f;
                m.coeffs_mut(i, j).copy_from_slice(&data[at..at + f]);
            }
        }
        m
    })
}

fn matrix_chain() -> impl Strategy<Value = (AbelianGroup, GroupRingMatrix, GroupRingMatrix)> {
    (group_strategy(), 1usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(g, a, b, c)| (Just(g.clone()), gr_matrix(&g, a, b), gr_matrix(&g, b, c)))
}

fn polyphase_strategy() -> impl Strategy<Value = PolyphaseMatrix> {
    (group_strategy(), 1usize..=5, 1usize..=5).prop_flat_map(|(g, r, c)| {
        let f = g.order();
        prop::collection::vec(prop::option::of(0..f), r * c).prop_map(move |cells| {
            let rows = cells.chunks(c).map(<[_]>::to_vec).collect();
            PolyphaseMatrix::from_rows(&g, rows).unwrap()
        })
    })
}

fn int_product(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn small_etfs() -> Vec<PolyphaseMatrix> {
    vec![
        simplex_phased(4).unwrap(),
        example_9_3_3(),
        affine_polyphase(2).unwrap(),
        affine_polyphase(3).unwrap(),
        brouwer_polyphase(2).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_associative_and_commutative((_g, es) in group_and_elements(3)) {
        let (x, y, z) = (&es[0], &es[1], &es[2]);
        prop_assert_eq!(x.convolve(y).unwrap(), y.convolve(x).unwrap());
        prop_assert_eq!(
            x.convolve(y).unwrap().convolve(z).unwrap(),
            x.convolve(&y.convolve(z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.convolve(&y.add(z).unwrap()).unwrap(),
            x.convolve(y).unwrap().add(&x.convolve(z).unwrap()).unwrap()
        );
    }

    #[test]
    fn evaluation_is_a_homomorphism((g, es) in group_and_elements(2)) {
        let (x, y) = (&es[0], &es[1]);
        let xy = x.convolve(y).unwrap();
        for gamma in characters_of(&g) {
            let lhs = xy.evaluate(&gamma).unwrap();
            let rhs = x.evaluate(&gamma).unwrap() * y.evaluate(&gamma).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9);
            let inv = x.involution().evaluate(&gamma).unwrap();
            prop_assert!((inv - x.evaluate(&gamma).unwrap().conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn translation_lift_is_a_homomorphism((_g, es) in group_and_elements(2)) {
        let (x, y) = (&es[0], &es[1]);
        prop_assert_eq!(
            x.convolve(y).unwrap().translation_lift(),
            int_product(&x.translation_lift(), &y.translation_lift())
        );
        // the involution lifts to the transpose
        let lt = x.translation_lift();
        let f = lt.len();
        let t: Vec<Vec<i64>> = (0..f).map(|a| (0..f).map(|b| lt[b][a]).collect()).collect();
        prop_assert_eq!(x.involution().translation_lift(), t);
    }

    #[test]
    fn matrix_lift_and_evaluation_respect_products((g, a, b) in matrix_chain()) {
        let ab = a.matmul(&b).unwrap();
        prop_assert_eq!(ab.filter_bank_lift(), a.filter_bank_lift().matmul(&b.filter_bank_lift()).unwrap());
        for gamma in characters_of(&g) {
            let lhs = ab.evaluate(&gamma).unwrap();
            let rhs = a.evaluate(&gamma).unwrap().matmul(&b.evaluate(&gamma).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9);
        }
    }

    #[test]
    fn adjoint_reverses_products((_g, a, b) in matrix_chain()) {
        prop_assert_eq!(
            a.matmul(&b).unwrap().adjoint(),
            b.adjoint().matmul(&a.adjoint()).unwrap()
        );
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn polyphase_text_and_json_round_trip(m in polyphase_strategy()) {
        let text = m.to_text();
        let back = PolyphaseMatrix::parse_text(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_text(), text);
        let json = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(serde_json::from_str::<PolyphaseMatrix>(&json).unwrap(), m);
    }

    #[test]
    fn polyphase_lift_matches_group_ring_lift(m in polyphase_strategy()) {
        prop_assert_eq!(m.filter_bank_lift().to_int(), m.to_group_ring().filter_bank_lift());
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn incidence_text_round_trip(m in polyphase_strategy()) {
        let x = m.filter_bank_lift();
        prop_assume!(x.rows() > 0 && x.cols() > 0);
        let back = IncidenceMatrix::parse_text(&x.to_text()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn csv_round_trip_is_exact(
        rows in 1usize..=4,
        cols in 1usize..=4,
        seed in prop::collection::vec(-1e6f64..1e6, 32),
    ) {
        let m = ComplexMatrix(DMatrix::from_fn(rows, cols, |i, j| {
            C64::new(seed[2 * (i * cols + j)], seed[2 * (i * cols + j) + 1] / 7.0)
        }));
        let back = ComplexMatrix::parse_csv(&m.to_csv()).unwrap();
        prop_assert_eq!(back.0, m.0);
    }

    #[test]
    fn monomial_equivalence_preserves_etf(
        which in 0usize..5,
        row in any::<prop::sample::Index>(),
        col in any::<prop::sample::Index>(),
        gr in 0usize..16,
        gc in 0usize..16,
    ) {
        let mut m = small_etfs().swap_remove(which);
        let g = m.group().clone();
        let (i, j) = (row.index(m.rows()), col.index(m.cols()));
        let (gr, gc) = (gr % g.order(), gc % g.order());
        for c in 0..m.cols() {
            if let Some(e) = m.get(i, c) {
                m.set(i, c, Some(g.add(e, gr))).unwrap();
            }
        }
        for r in 0..m.rows() {
            if let Some(e) = m.get(r, j) {
                m.set(r, j, Some(g.add(e, gc))).unwrap();
            }
        }
        prop_assert!(verify_polyphase_combinatorial(&m).passed());
        prop_assert!(verify_polyphase_algebraic(&m).passed());
        for gamma in characters_of(&g).into_iter().skip(1) {
            let (rep, _) = verify_etf_numeric(&m.evaluate(&gamma).unwrap()).unwrap();
            prop_assert!(rep.passed(), "{}", rep);
        }
    }

    #[test]
    fn perturbed_frames_exceed_welch(
        which in 0usize..5,
        noise in prop::collection::vec(-1.0f64..1.0, 64),
        eps in 1e-3f64..1e-1,
    ) {
        let m = small_etfs().swap_remove(which);
        let gamma = characters_of(m.group()).swap_remove(1);
        let phi = m.evaluate(&gamma).unwrap();
        let (_, num) = verify_etf_numeric(&phi).unwrap();
        // left multiplication by I + eps N keeps the span, hence the rank
        let b = phi.rows();
        let pert = DMatrix::<C64>::identity(b, b)
            + DMatrix::from_fn(b, b, |i, j| C64::new(noise[(i * b + j) % 64], noise[(i * b + j + 7) % 64]) * eps);
        let p = ComplexMatrix(pert * &phi.0);
        let d = numeric_rank(&p);
        let n = p.cols();
        prop_assert_eq!(d, num.d);
        let welch = ((n - d) as f64 / (d as f64 * (n - 1) as f64)).sqrt();
        let g = p.gram();
        let mut coh: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    coh = coh.max(g.get(a, b).norm() / (g.get(a, a).re * g.get(b, b).re).sqrt());
                }
            }
        }
        prop_assert!(coh > welch + 1e-9, "coherence {coh} vs Welch {welch}");
    }
}

#[test]
fn naimark_complements_are_etfs_with_negated_signature() {
    for m in small_etfs() {
        for gamma in characters_of(m.group()).into_iter().skip(1) {
            let phi = m.evaluate(&gamma).unwrap();
            let (_, num) = verify_etf_numeric(&phi).unwrap();
            let n = num.n;
            let q = DMatrix::<C64>::identity(n, n) * C64::new(num.a, 0.0) - phi.gram().0;
            let (rep, comp) = verify_etf_numeric(&ComplexMatrix(q)).unwrap();
            assert!(rep.passed(), "{rep}");
            assert_eq!(comp.d, n - num.d);
            if let (Some(x), Some(y)) = (num.delta, comp.delta) {
                assert!((x + y).abs() < 1e-9, "delta {x} vs complement {y}");
            }
        }
    }
}

#[test]
fn screener_rows_satisfy_identities() {
    let rows = screen_parameters(3, 20).unwrap();
    assert!(!rows.is_empty());
    for row in &rows {
        assert!(u_dimension_identity(row), "{row:?}");
        assert!(reciprocal_welch_identities(row), "{row:?}");
        assert_eq!(row.b * row.k, row.v * row.r);
        assert_eq!(row.r * (row.k - 1), row.v - 1);
    }
}
