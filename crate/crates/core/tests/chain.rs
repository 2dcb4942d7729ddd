use stabkit::chain::{
    cdga_homology_box, convolve, cotor_box, koszul_quotient_box, monogenic_cotor_closed, BasisElement, CdgaPresentation,
    CoproductEntry, ExplicitHopf, HopfPresentation, MonogenicFactor, ProductEntry,
};
use stabkit::exact::{FieldSpec, Rationals};
use stabkit::graded::{enumerate_monomials, Degree, DegreeBox, GeneratorSpec};

fn q_model() -> CdgaPresentation {
    let gens = vec![
        GeneratorSpec::natural("sigma", Degree::bi(1, 0), 0),
        GeneratorSpec::natural("z", Degree::bi(2, 1), 0),
        GeneratorSpec::natural("x", Degree::bi(3, 2), 0),
        GeneratorSpec::natural("y", Degree::bi(2, 1), 0),
    ];
    CdgaPresentation::new(FieldSpec::Rational, gens, &[("x", "sigma*z"), ("y", "sigma^2")]).unwrap()
}

fn red_blue(p: u64) -> CdgaPresentation {
    let gens = vec![
        GeneratorSpec::natural("r", Degree::bi(1, 0), p),
        GeneratorSpec::natural("b", Degree::bi(1, 0), p),
    ];
    CdgaPresentation::formal(FieldSpec::Prime { p }, gens).unwrap()
}

#[test]
fn rational_counterexample_homology() {
    let b = DegreeBox::new(9, 0, 9);
    let t = cdga_homology_box(&q_model(), &b, true).unwrap();
    let expected = [(0, 0), (1, 0), (2, 1), (4, 2), (5, 3), (7, 4), (8, 5)];
    for deg in b.bidegrees() {
        let want = usize::from(expected.contains(&(deg.n, deg.d)));
        assert_eq!(t.dim(deg), want, "at {deg}");
    }
    for n in [3, 6, 9] {
        assert!(b.bidegrees().filter(|g| g.n == n).all(|g| t.dim(g) == 0));
    }
    let basis = t.basis.as_ref().unwrap();
    assert_eq!(basis[&Degree::bi(2, 1)].len(), 1);
}

#[test]
fn euler_characteristic_is_preserved() {
    let p = q_model();
    let b = DegreeBox::new(8, 0, 8);
    let t = cdga_homology_box(&p, &b, false).unwrap();
    let cx = p.chain_complex(&Rationals, &b, 20_000).unwrap();
    for n in 0..=8 {
        let sign = |d: i64| if d % 2 == 0 { 1 } else { -1 };
        let chain: i64 = (0..=8).map(|d| sign(d) * cx.dim(Degree::bi(n, d)) as i64).sum();
        let homology: i64 = (0..=8).map(|d| sign(d) * t.dim(Degree::bi(n, d)) as i64).sum();
        assert_eq!(chain, homology, "grading {n}");
    }
}

#[test]
fn red_blue_modulo_product() {
    let gens = vec![
        GeneratorSpec::natural("r", Degree::bi(1, 0), 2),
        GeneratorSpec::natural("b", Degree::bi(1, 0), 2),
        GeneratorSpec::natural("rho", Degree::bi(2, 1), 2),
    ];
    let p = CdgaPresentation::new(FieldSpec::Prime { p: 2 }, gens, &[("rho", "r*b")]).unwrap();
    let t = cdga_homology_box(&p, &DegreeBox::new(8, 0, 4), false).unwrap();
    let mut want = vec![1];
    want.extend(std::iter::repeat(2).take(8));
    assert_eq!(t.row(0), want);
}

#[test]
fn zero_differential_counts_monomials() {
    let p = red_blue(3);
    let b = DegreeBox::new(6, 0, 2);
    let t = cdga_homology_box(&p, &b, false).unwrap();
    let mono = enumerate_monomials(p.gens(), &b).unwrap();
    for deg in b.bidegrees() {
        assert_eq!(t.dim(deg), mono.get(&deg).map_or(0, Vec::len), "at {deg}");
    }
    assert!((0..=6).all(|n| t.dim(Degree::bi(n, 0)) == (n + 1) as usize));
}

#[test]
fn red_blue_quotient_is_concentrated_at_origin() {
    let b = DegreeBox::new(8, 0, 8);
    let t = koszul_quotient_box(&red_blue(2), &["r", "b"], &b, false).unwrap();
    assert_eq!(t.dim(Degree::bi(0, 0)), 1);
    for (deg, _) in t.nonzero() {
        assert!(2 * deg.d >= deg.n, "class below half slope at {deg}");
    }
    assert!((1..=8).all(|n| t.dim(Degree::bi(n, 0)) == 0));
}

#[test]
fn koszul_cone_long_exact_sequence() {
    // Killing a non-zero-divisor x at (N, D): H(A/x)_(n,d) = H(A)_(n,d) - H(A)_(n-N,d-D).
    let p = red_blue(5);
    let b = DegreeBox::new(7, 0, 3);
    let h = cdga_homology_box(&p, &b, false).unwrap();
    let q = koszul_quotient_box(&p, &["r^2"], &b, false).unwrap();
    for deg in b.bidegrees() {
        let shifted = h.dim(deg + Degree::bi(-2, 0));
        assert_eq!(q.dim(deg), h.dim(deg) - shifted, "at {deg}");
    }
}

#[test]
fn cotor_kunneth_on_pairs() {
    let pairs = [
        (FieldSpec::Prime { p: 2 }, MonogenicFactor::exterior("y", 1), MonogenicFactor::truncated("x", 2, 1)),
        (FieldSpec::Prime { p: 3 }, MonogenicFactor::polynomial("x", 2), MonogenicFactor::exterior("y", 3)),
        (FieldSpec::Rational, MonogenicFactor::polynomial("x", 2), MonogenicFactor::exterior("y", 1)),
    ];
    let b = DegreeBox::new(7, 0, 7);
    for (field, a, c) in pairs {
        let both = HopfPresentation::monogenic(field, vec![a.clone(), c.clone()]);
        let whole = cotor_box(&both, &b, false).unwrap();
        let ta = cotor_box(&HopfPresentation::monogenic(field, vec![a.clone()]), &b, false).unwrap();
        let tc = cotor_box(&HopfPresentation::monogenic(field, vec![c.clone()]), &b, false).unwrap();
        assert_eq!(whole.dims, convolve(&ta, &tc, b).dims, "{a:?} (x) {c:?}");
        assert_eq!(ta.dims, monogenic_cotor_closed(field, &a, &b).unwrap().dims);
    }
}

#[test]
fn exterior_and_truncated_square_agree() {
    let b = DegreeBox::new(8, 0, 8);
    let ext = monogenic_cotor_closed(FieldSpec::Prime { p: 2 }, &MonogenicFactor::exterior("x", 1), &b).unwrap();
    let tr = monogenic_cotor_closed(FieldSpec::Prime { p: 2 }, &MonogenicFactor::truncated("x", 1, 1), &b).unwrap();
    assert_eq!(ext.dims, tr.dims);
    assert!((0..=8).all(|n| ext.dim(Degree::bi(n, 0)) == 1));
}

#[test]
fn cotor_of_rational_polynomial() {
    let b = DegreeBox::new(8, 0, 8);
    let t = cotor_box(&HopfPresentation::monogenic(FieldSpec::Rational, vec![MonogenicFactor::polynomial("x", 2)]), &b, false)
        .unwrap();
    assert_eq!(t.dim(Degree::bi(0, 0)), 1);
    assert_eq!(t.dim(Degree::bi(2, 1)), 1);
    assert_eq!(t.dim(Degree::bi(4, 2)), 0);
    assert_eq!(t.total(), 2);
}

#[test]
fn truncated_height_three_at_three() {
    let b = DegreeBox::new(8, 0, 8);
    let t = monogenic_cotor_closed(FieldSpec::Prime { p: 3 }, &MonogenicFactor::truncated("x", 2, 1), &b).unwrap();
    assert_eq!(t.dim(Degree::bi(2, 1)), 1);
    assert_eq!(t.dim(Degree::bi(6, 4)), 1);
}

#[test]
fn explicit_hopf_reports_coassociativity() {
    let el = |n: &str, g| BasisElement { name: n.into(), grading: g };
    let with_prim = |n: &str, extra: &[(&str, &str)]| {
        let mut t = vec![(1, "1".to_string(), n.to_string()), (1, n.to_string(), "1".to_string())];
        t.extend(extra.iter().map(|(l, r)| (1, l.to_string(), r.to_string())));
        CoproductEntry { of: n.into(), terms: t }
    };
    let broken = ExplicitHopf {
        basis: vec![el("x", 1), el("y", 2), el("z", 3)],
        product: vec![],
        coproduct: vec![with_prim("y", &[("x", "x")]), with_prim("z", &[("x", "y")])],
    };
    let diags = HopfPresentation::explicit(FieldSpec::Prime { p: 2 }, broken).validate().unwrap_err();
    assert!(diags.iter().any(|d| d.path == "/hopf/coproduct/1" && d.message.contains("coassociativity")), "{diags:?}");
}

#[test]
fn explicit_truncated_polynomial_matches_monogenic() {
    let el = |n: &str, g| BasisElement { name: n.into(), grading: g };
    let prod = |l: &str, r: &str, out: &str| ProductEntry { left: l.into(), right: r.into(), result: vec![(1, out.into())] };
    let with_prim = |n: &str, extra: &[(&str, &str)]| {
        let mut t = vec![(1, "1".to_string(), n.to_string()), (1, n.to_string(), "1".to_string())];
        t.extend(extra.iter().map(|(l, r)| (1, l.to_string(), r.to_string())));
        CoproductEntry { of: n.into(), terms: t }
    };
    let table = ExplicitHopf {
        basis: vec![el("x", 1), el("x2", 2), el("x3", 3)],
        product: vec![prod("x", "x", "x2"), prod("x", "x2", "x3"), prod("x2", "x", "x3")],
        coproduct: vec![with_prim("x2", &[]), with_prim("x3", &[("x", "x2"), ("x2", "x")])],
    };
    let explicit = HopfPresentation::explicit(FieldSpec::Prime { p: 2 }, table);
    explicit.validate().unwrap();
    let b = DegreeBox::new(8, 0, 8);
    let closed = monogenic_cotor_closed(FieldSpec::Prime { p: 2 }, &MonogenicFactor::truncated("x", 1, 2), &b).unwrap();
    assert_eq!(cotor_box(&explicit, &b, false).unwrap().dims, closed.dims);

    let mut missing = explicit.clone();
    if let stabkit::chain::HopfForm::Explicit(t) = &mut missing.form {
        t.coproduct[1] = with_prim("x3", &[("x2", "x")]);
    }
    let diags = missing.validate().unwrap_err();
    assert!(diags.iter().any(|d| d.message.contains("incompatible")), "{diags:?}");
}
