use std::collections::BTreeMap;

use proptest::prelude::*;
use stabkit::chain::{cdga_homology_box, CdgaPresentation};
use stabkit::error::Error;
use stabkit::exact::{Field, FieldSpec, PrimeField, SparseMatrix};
use stabkit::graded::{Degree, DegreeBox, GeneratorSpec, SlopeQ};
use stabkit::stability::{
    cech_localize, fit_vanishing_line, nilpotence_in_box, polymodule_actions, quantum_candidates, range_bounds,
    smith_toda_table, telescope_localize, ActionTable, BoundParams, HopfQuotientCase, ModuleGenerator, Nilpotence,
    PolyModulePresentation,
};

fn q(a: i64, b: i64) -> SlopeQ {
    SlopeQ::new(a, b).unwrap()
}

fn vars(p: u64, spec: &[(&str, i64, i64)]) -> Vec<GeneratorSpec> {
    spec.iter().map(|(name, n, d)| GeneratorSpec::natural(*name, Degree::bi(*n, *d), p)).collect()
}

fn red_blue(p: u64, relations: &[&str]) -> PolyModulePresentation {
    PolyModulePresentation::cyclic(FieldSpec::Prime { p }, vars(p, &[("r", 1, 0), ("b", 1, 0)]), relations)
}

/// Rank over F_p by dense elimination.
fn oracle_rank(p: u64, m: &SparseMatrix<PrimeField>) -> usize {
    let mut a: Vec<Vec<u64>> = m.to_dense();
    let (rows, cols) = (m.rows(), m.cols());
    let inv = |x: u64| (1..p).find(|y| x * y % p == 1).unwrap();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let s = inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + p * p - f * a[r][j] % p) % p;
                }
            }
        }
        r += 1;
    }
    r
}

fn binomial(n: i64, k: i64) -> usize {
    if k < 0 || n < k {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as usize
}

#[test]
fn cone_matches_long_exact_sequence() {
    // Two generators with a mixed relation over F3.
    let p = 3;
    let module = PolyModulePresentation {
        field: FieldSpec::Prime { p },
        variables: vars(p, &[("r", 1, 0), ("b", 1, 2)]),
        generators: vec![
            ModuleGenerator { name: "e".into(), degree: Degree::ZERO },
            ModuleGenerator { name: "g".into(), degree: Degree::bi(1, -2) },
        ],
        relations: vec![BTreeMap::from([("e".into(), "r^2".into()), ("g".into(), "b".into())])],
    };
    let field = PrimeField::new(p).unwrap();
    let out = DegreeBox::new(6, -2, 6);
    for element in ["r", "b", "r*b", "2*b^2", "r^3"] {
        let acts = polymodule_actions(&field, &module, &[element], &out).unwrap();
        let t = smith_toda_table(&acts, &out).unwrap();
        let a = &acts[0];
        let shift = a.shift;
        for y in t.reliable_subbox.meet(&out).bidegrees() {
            let z = y - shift - Degree::bi(0, 1);
            let coker = a.module.dim(y) - oracle_rank(p, &a.at(y - shift));
            let ker = a.module.dim(z) - oracle_rank(p, &a.at(z));
            assert_eq!(t.dim(y), coker + ker, "{element} at {y}");
        }
    }
}

#[test]
fn koszul_quotients_of_red_blue() {
    let field = PrimeField::new(2).unwrap();
    let out = DegreeBox::new(5, 0, 3);
    let free = red_blue(2, &[]);
    let acts = polymodule_actions(&field, &free, &["r", "b"], &out).unwrap();
    let t = smith_toda_table(&acts, &out).unwrap();
    assert_eq!(t.dim(Degree::ZERO), 1);
    assert_eq!(t.total(), 1);

    let nodal = red_blue(2, &["r*b"]);
    let acts = polymodule_actions(&field, &nodal, &["r", "b"], &out).unwrap();
    let t = smith_toda_table(&acts, &out).unwrap();
    assert_eq!(t.dim(Degree::ZERO), 1);
    assert_eq!(t.dim(Degree::bi(2, 1)), 1);
    assert_eq!(t.total(), 2);
}

#[test]
fn noncommuting_actions_are_rejected() {
    let field = PrimeField::new(2).unwrap();
    let m = red_blue(2, &[]);
    let bx = DegreeBox::new(4, 0, 0);
    let s = ActionTable::from_module(&field, &m, "r", &bx).unwrap();
    let mut matrices = BTreeMap::new();
    for y in bx.bidegrees() {
        let (rows, cols) = (s.module.dim(y + s.shift), s.module.dim(y));
        if y.n + 1 <= bx.n_max && rows > 0 && cols > 0 {
            // Sends the first basis vector to the first basis vector only.
            matrices.insert(y, SparseMatrix::from_triplets(field.clone(), rows, cols, vec![(0, 0, 1)]).unwrap());
        }
    }
    let odd = ActionTable::new(field.clone(), s.shift, s.module.clone(), s.labels.clone(), matrices).unwrap();
    let err = smith_toda_table(&[s, odd], &DegreeBox::new(2, 0, 0)).unwrap_err();
    assert!(err.to_string().contains("commute"), "{err}");
}

#[test]
fn nilpotence_verdicts() {
    let field = PrimeField::new(2).unwrap();
    let bx = DegreeBox::new(8, 0, 0);
    let collapsed = red_blue(2, &["r*b", "r+b"]);
    let a = ActionTable::from_module(&field, &collapsed, "b", &bx).unwrap();
    assert!(matches!(nilpotence_in_box(&a, &bx), Nilpotence::NilpotentInBox { power: 2, .. }));

    let nodal = red_blue(2, &["r*b"]);
    let a = ActionTable::from_module(&field, &nodal, "r", &bx).unwrap();
    match nilpotence_in_box(&a, &bx) {
        Nilpotence::NonNilpotentWitness { class, degree, box_limited, .. } => {
            assert_eq!(class, "1");
            assert_eq!(degree, Degree::ZERO);
            assert!(box_limited);
        }
        other => panic!("unexpected verdict {other:?}"),
    }

    let zero_box = DegreeBox::new(0, 0, 0);
    let a = ActionTable::from_module(&field, &nodal, "r", &zero_box).unwrap();
    assert!(matches!(nilpotence_in_box(&a, &zero_box), Nilpotence::Inconclusive { .. }));
}

#[test]
fn telescope_of_nodal_curve_and_failure_on_plane() {
    let bx = DegreeBox::new(4, 0, 0).with_n_min(-4);
    let t = telescope_localize(&red_blue(2, &["r*b"]), "r", &bx).unwrap();
    assert_eq!(t.row(0), vec![1; 9]);
    let err = telescope_localize(&red_blue(2, &[]), "r", &bx).unwrap_err();
    assert!(matches!(err, Error::NonTabulable(_)), "{err}");
}

#[test]
fn cech_with_one_generator_is_the_telescope() {
    let p = 2;
    let m = PolyModulePresentation::cyclic(
        FieldSpec::Prime { p },
        vars(p, &[("s", 1, 0), ("t", 2, 1)]),
        &["t^2", "s^3*t"],
    );
    let bx = DegreeBox::new(5, -1, 3).with_n_min(-5);
    let tel = telescope_localize(&m, "s", &bx).unwrap();
    let cech = cech_localize(&m, &["s"], &bx).unwrap();
    for y in bx.bidegrees() {
        assert_eq!(cech.dim(y), tel.dim(y), "at {y}");
    }
    assert_eq!(tel.dim(Degree::bi(-2, 0)), 1);
}

#[test]
fn top_local_cohomology_of_polynomial_rings() {
    let p = 2;
    for k in 1..=3i64 {
        let names = ["x", "y", "z"];
        let spec: Vec<(&str, i64, i64)> = names[..k as usize].iter().map(|n| (*n, 1, 0)).collect();
        let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p }, vars(p, &spec), &[]);
        let bx = DegreeBox::new(3, -(k - 1), 0).with_n_min(-6);
        let t = cech_localize(&m, &names[..k as usize], &bx).unwrap();
        for y in bx.bidegrees() {
            let want = match y.d {
                0 if k == 1 => 1,
                0 if y.n >= 0 => binomial(y.n + k - 1, k - 1),
                d if d == -(k - 1) && y.n < 0 => binomial(-y.n - 1, k - 1),
                _ => 0,
            };
            assert_eq!(t.dim(y), want, "k = {k} at {y}");
        }
    }
}

#[test]
fn cech_on_the_nodal_curve() {
    let bx = DegreeBox::new(5, -1, 0).with_n_min(-5);
    let t = cech_localize(&red_blue(2, &["r*b"]), &["r", "b"], &bx).unwrap();
    assert_eq!(t.row(0), vec![2; 11]);
    assert_eq!(t.row(-1), vec![0; 11]);
}

#[test]
fn rational_model_vanishing_line() {
    let gens = vec![
        GeneratorSpec::natural("sigma", Degree::bi(1, 0), 0),
        GeneratorSpec::natural("z", Degree::bi(2, 1), 0),
        GeneratorSpec::natural("x", Degree::bi(3, 2), 0),
        GeneratorSpec::natural("y", Degree::bi(2, 1), 0),
    ];
    let model = CdgaPresentation::new(FieldSpec::Rational, gens, &[("x", "sigma*z"), ("y", "sigma^2")]).unwrap();
    let t = cdga_homology_box(&model, &DegreeBox::new(9, 0, 9), false).unwrap();
    let line = fit_vanishing_line(&t, &quantum_candidates(10)).unwrap();
    assert_eq!((line.slope, line.kappa), (q(2, 3), -1));
    assert_eq!(line.blocked_slope, Some(q(3, 4)));
    assert_eq!(line.witness, Some(Degree::bi(7, 4)));
    assert!(t.nonzero().all(|(g, _)| !line.below(g)));
}

#[test]
fn empty_table_fits_steepest_slope() {
    let t = stabkit::chain::BoxTable::new(DegreeBox::new(4, 0, 2));
    let line = fit_vanishing_line(&t, &quantum_candidates(3)).unwrap();
    assert_eq!(line.slope, q(3, 4));
    assert!(line.certified_box.bidegrees().all(|g| line.below(g)));
}

#[test]
fn closed_form_bounds() {
    let b = |n: i64| {
        range_bounds(&BoundParams::AdamsB { lambda_prime: q(2, 3), kappa_prime: q(-1, 1), alphas: vec![Degree::bi(n, 0)] })
            .unwrap()
            .value
    };
    for n in [3, 6, 7, 12] {
        assert_eq!(b(n), q(2 * n - 6, 3));
    }
    let empty = range_bounds(&BoundParams::AdamsB { lambda_prime: q(2, 3), kappa_prime: q(-1, 1), alphas: vec![] }).unwrap();
    assert_eq!(empty.value, q(-1, 1));
    assert!(!empty.notes.is_empty());

    let conn = range_bounds(&BoundParams::LocalizationConnectivity {
        lambda: q(1, 2),
        kappa: q(1, 1),
        alphas: vec![Degree::bi(4, 1), Degree::bi(6, 0)],
        lambda_prime: Some(q(2, 3)),
    })
    .unwrap();
    assert_eq!(conn.value, q(1 + (2 - 2) + (3 - 1), 1));
    assert_eq!(conn.variant, Some(q(4, 3).add(q(8, 3).sub(q(2, 1))).add(q(3, 1))));

    let inj = range_bounds(&BoundParams::QuotientTheta { case: HopfQuotientCase::Injective, n: 5 }).unwrap();
    assert_eq!(inj.value, q(3, 5));
    assert!(range_bounds(&BoundParams::QuotientTheta { case: HopfQuotientCase::Injective, n: 1 }).is_err());
    assert_eq!(range_bounds(&BoundParams::Quantize { lambda: q(7, 10) }).unwrap().value, q(3, 4));
}

#[test]
fn bound_params_json() {
    let p: BoundParams = serde_json::from_str(r#"{"kind":"quotient_theta","case":"surjective","n":5}"#).unwrap();
    let r = range_bounds(&p).unwrap();
    assert_eq!(serde_json::to_value(&r).unwrap()["value"], "4/5");
}

fn min_over_proper_subsets(lp: SlopeQ, kp: SlopeQ, alphas: &[Degree]) -> SlopeQ {
    let k = alphas.len();
    let mut best: Option<SlopeQ> = None;
    for mask in 0..(1u32 << k) - 1 {
        let sum = (0..k)
            .filter(|i| mask >> i & 1 == 0)
            .fold(SlopeQ::integer(0), |acc, i| acc.add(lp.mul_int(alphas[i].n)).sub(SlopeQ::integer(alphas[i].d + 1)));
        best = Some(best.map_or(sum, |b| b.min(sum)));
    }
    kp.add(best.unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adams_b_matches_subset_enumeration(
        alphas in prop::collection::vec((1i64..20, -3i64..8), 1..5),
        num in 1i64..6,
        kp in -3i64..3,
    ) {
        let lp = q(num, num + 1);
        let alphas: Vec<Degree> = alphas.into_iter().map(|(n, d)| Degree::bi(n, d)).collect();
        let got = range_bounds(&BoundParams::AdamsB { lambda_prime: lp, kappa_prime: SlopeQ::integer(kp), alphas: alphas.clone() })
            .unwrap();
        prop_assert_eq!(got.value, min_over_proper_subsets(lp, SlopeQ::integer(kp), &alphas));
    }

    #[test]
    fn cone_rank_identity_on_random_modules(
        seed in prop::collection::vec(0u64..5, 4),
        e in 1u32..3,
    ) {
        let p = 5;
        let relation = format!("{}*r^2+{}*r*b+{}*b^2", seed[0], seed[1], seed[2]);
        let relation = if seed[..3].iter().all(|c| *c == 0) { "r^3".to_string() } else { relation };
        let module = red_blue(p, &[&relation]);
        let element = format!("r^{e}+{}*b^{e}", seed[3]);
        let field = PrimeField::new(p).unwrap();
        let out = DegreeBox::new(6, 0, 2);
        let acts = polymodule_actions(&field, &module, &[element.as_str()], &out).unwrap();
        let t = smith_toda_table(&acts, &out).unwrap();
        let a = &acts[0];
        for y in t.reliable_subbox.meet(&out).bidegrees() {
            let z = y - a.shift - Degree::bi(0, 1);
            let coker = a.module.dim(y) - oracle_rank(p, &a.at(y - a.shift));
            let ker = a.module.dim(z) - oracle_rank(p, &a.at(z));
            prop_assert_eq!(t.dim(y), coker + ker);
        }
        prop_assert!(field.characteristic() == p);
    }
}
