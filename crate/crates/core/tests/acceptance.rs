//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{oracle_rank, random_filtered};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabkit::chain::{
    cdga_homology_box, convolve, cotor_box, koszul_quotient_box, monogenic_cotor_closed, CdgaPresentation,
    HopfPresentation, MonogenicFactor,
};
use stabkit::exact::{kernel_basis, rank, Field, FieldSpec, PrimeField, SparseMatrix};
use stabkit::graded::{quantized_slope, Degree, DegreeBox, GeneratorSpec, SlopeQ};
use stabkit::operations::{e2_below_diagonal_generators, free_ek_dimension_table, free_ek_presentation, Arity};
use stabkit::spectral::{compute_pages, infinity_page, survival_analysis, tau_modules, trace_class, FilteredComplex, Page, Survival};
use stabkit::stability::{
    cech_localize, fit_vanishing_line, polymodule_actions, quantum_candidates, range_bounds, smith_toda_table,
    BoundParams, HopfQuotientCase, PolyModulePresentation,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t < limit {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn model_gens(p: u64, filtered: bool) -> Vec<GeneratorSpec> {
    let deg = |n, d| if filtered { Degree::tri(n, d, -1) } else { Degree::bi(n, d) };
    vec![
        GeneratorSpec::natural("sigma", deg(1, 0), p),
        GeneratorSpec::natural("z", deg(2, 1), p),
        GeneratorSpec::natural("x", deg(3, 2), p),
        GeneratorSpec::natural("y", deg(2, 1), p),
    ]
}

fn rational_cdga() -> Outcome {
    let start = Instant::now();
    let model = CdgaPresentation::new(FieldSpec::Rational, model_gens(0, false), &[("x", "sigma*z"), ("y", "sigma^2")])
        .map_err(err)?;
    let bx = DegreeBox::new(9, 0, 9);
    let t = cdga_homology_box(&model, &bx, false).map_err(err)?;
    let classes = [(0, 0), (1, 0), (2, 1), (4, 2), (5, 3), (7, 4), (8, 5)];
    for g in bx.bidegrees() {
        let want = usize::from(classes.contains(&(g.n, g.d)));
        ensure!(t.dim(g) == want, "dim at {g} is {}, expected {want}", t.dim(g));
        if [3, 6, 9].contains(&g.n) {
            ensure!(t.dim(g) == 0, "column {} is nonzero at {g}", g.n);
        }
    }
    within(Duration::from_secs(10), start)?;
    Ok("seven classes, columns 3, 6, 9 empty".into())
}

fn red_blue() -> Outcome {
    let g = vec![
        GeneratorSpec::natural("r", Degree::tri(1, 0, -1), 2),
        GeneratorSpec::natural("b", Degree::tri(1, 0, -1), 2),
    ];
    let bx = DegreeBox::new(8, 0, 8);
    let free = free_ek_dimension_table(2, Arity::Finite(2), &g, &bx).map_err(err)?;
    for n in 0..=8 {
        ensure!(free.dim(Degree::bi(n, 0)) == (n + 1) as usize, "free dim at ({n},0) is {}", free.dim(Degree::bi(n, 0)));
    }
    let a = free_ek_presentation(2, Arity::Finite(2), &g, &bx).map_err(err)?;
    let quot = koszul_quotient_box(&a, &["r", "b"], &bx, false).map_err(err)?;
    for n in 0..=8 {
        let want = usize::from(n == 0);
        ensure!(quot.dim(Degree::bi(n, 0)) == want, "quotient dim at ({n},0) is {}", quot.dim(Degree::bi(n, 0)));
    }
    let line = fit_vanishing_line(&quot, &quantum_candidates(10)).ok_or("no vanishing line fits")?;
    ensure!(line.slope == SlopeQ::new(1, 2).unwrap() && line.kappa == 0, "fit gave slope {} kappa {}", line.slope, line.kappa);
    Ok("row 0 is n+1, quotient is 1 at the origin, line 1/2 with kappa 0".into())
}

fn free_e2_tower() -> Outcome {
    let s = vec![GeneratorSpec::natural("sigma", Degree::tri(1, 0, -1), 2)];
    let words = e2_below_diagonal_generators(2, &s, &DegreeBox::up_to(16)).map_err(err)?;
    let got: Vec<(i64, i64)> = words.iter().map(|w| (w.degree.n, w.degree.d)).collect();
    let want = vec![(1, 0), (2, 1), (4, 3), (8, 7), (16, 15)];
    ensure!(got == want, "generators at {got:?}");
    Ok(format!("{got:?}"))
}

fn cotor_oracles() -> Outcome {
    let start = Instant::now();
    let cases = [
        (FieldSpec::Prime { p: 2 }, MonogenicFactor::exterior("y", 1)),
        (FieldSpec::Rational, MonogenicFactor::polynomial("x", 2)),
        (FieldSpec::Prime { p: 2 }, MonogenicFactor::truncated("x", 2, 2)),
        (FieldSpec::Prime { p: 3 }, MonogenicFactor::truncated("x", 2, 1)),
    ];
    let bx = DegreeBox::new(8, 0, 8);
    for (field, factor) in cases {
        let brute = cotor_box(&HopfPresentation::monogenic(field, vec![factor.clone()]), &bx, false).map_err(err)?;
        let closed = monogenic_cotor_closed(field, &factor, &bx).map_err(err)?;
        ensure!(brute.dims == closed.dims, "{factor:?} over {field:?}: cobar {:?} vs closed {:?}", brute.dims, closed.dims);
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!("four algebras agree in {:.2}s", start.elapsed().as_secs_f64()))
}

fn cech_plane() -> Outcome {
    let vars = vec![
        GeneratorSpec::natural("r", Degree::bi(1, 0), 2),
        GeneratorSpec::natural("b", Degree::bi(1, 0), 2),
    ];
    let m = PolyModulePresentation::cyclic(FieldSpec::Prime { p: 2 }, vars, &[]);
    let bx = DegreeBox::new(6, -3, 2).with_n_min(-6);
    let t = cech_localize(&m, &["r", "b"], &bx).map_err(err)?;
    for g in bx.bidegrees() {
        let want = match g.d {
            0 if g.n >= 0 => (g.n + 1) as usize,
            -1 if g.n <= -2 => (-g.n - 1) as usize,
            _ => 0,
        };
        ensure!(t.dim(g) == want, "dim at {g} is {}, expected {want}", t.dim(g));
    }
    ensure!(t.dim(Degree::bi(-2, -1)) == 1 && t.dim(Degree::bi(-3, -1)) == 2, "low corner wrong");
    Ok("row 0 is n+1, row -1 is -n-1, other rows zero".into())
}

fn unit_vector(fc: &FilteredComplex<PrimeField>, at: Degree, label: &str) -> Result<Vec<u64>, String> {
    let cx = fc.complex();
    let f = fc.field();
    let i = cx.labels(at).iter().position(|l| l == label).ok_or(format!("no basis element {label} at {at}"))?;
    let mut v = vec![f.zero(); cx.dim(at)];
    v[i] = f.one();
    Ok(v)
}

fn mod3_spectral_sequence() -> Outcome {
    let f3 = PrimeField::new(3).unwrap();
    let model = CdgaPresentation::new(FieldSpec::Prime { p: 3 }, model_gens(3, true), &[("x", "sigma*z"), ("y", "sigma^2")])
        .map_err(err)?;
    let bx = DegreeBox::new(12, 0, 8);
    let fc = FilteredComplex::from_cdga(&model, &f3, &bx, 50_000).map_err(err)?;
    let pages = compute_pages(&fc, &bx, 1).map_err(err)?;
    let summary = pages[0].summary();
    for (src, tgt, gen, image) in [
        (Degree::tri(3, 2, -1), Degree::tri(3, 1, -2), "x", "sigma*z"),
        (Degree::tri(2, 1, -1), Degree::tri(2, 0, -2), "y", "sigma^2"),
    ] {
        let d = summary.differentials.iter().find(|d| d.source == src).ok_or(format!("no d1 out of {src}"))?;
        ensure!(d.target == tgt, "d1 out of {src} lands in {}", d.target);
        ensure!(d.images.iter().any(|(s, i)| s == gen && i == image), "d1({gen}) images {:?}", d.images);
    }
    let x = unit_vector(&fc, Degree::bi(3, 2), "x")?;
    let fate = trace_class(&fc, Degree::tri(3, 2, -1), &x, 12).map_err(err)?;
    ensure!(matches!(fate, Survival::DiesAt { page: 1, .. }), "x: {fate:?}");
    let report = survival_analysis(&fc, &bx, Degree::tri(3, 2, -1), 3, 0).map_err(err)?;
    ensure!(report.obstruction == Some(Degree::tri(3, 1, -2)), "survival of x blocked at {:?}", report.obstruction);
    let x3 = unit_vector(&fc, Degree::bi(9, 6), "x^3")?;
    let fate = trace_class(&fc, Degree::tri(9, 6, -3), &x3, 12).map_err(err)?;
    ensure!(matches!(fate, Survival::Permanent { .. }), "x^3: {fate:?}");
    Ok("d1(x) = sigma*z, d1(y) = sigma^2, x dies at E1, x^3 permanent".into())
}

fn bound_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let den = rng.gen_range(1..=1000i64);
        let num = rng.gen_range(0..den);
        let lambda = SlopeQ::new(num, den).unwrap();
        let brute = (0..=10_000i64).find(|k| k * den >= num * (k + 1)).ok_or(format!("no k <= 10^4 for {lambda}"))?;
        let got = quantized_slope(lambda).map_err(err)?;
        ensure!(got == SlopeQ::new(brute, brute + 1).unwrap(), "quantized {lambda} to {got}, expected {brute}/{}", brute + 1);
    }
    let theta = range_bounds(&BoundParams::QuotientTheta { case: HopfQuotientCase::Surjective, n: 5 }).map_err(err)?;
    ensure!(theta.value == SlopeQ::new(4, 5).unwrap(), "theta(surjective, 5) = {}", theta.value);
    Ok("200 quantizations agree with search, theta = 4/5".into())
}

const CASES: u32 = 200;

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases: CASES, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn check<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn fail<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn euler(page: &Page<PrimeField>, n: i64) -> i64 {
    page.groups.iter().filter(|(k, _)| k.n == n).map(|(k, g)| if k.d % 2 == 0 { g.dim() as i64 } else { -(g.dim() as i64) }).sum()
}

fn factor_strategy(name: &'static str, p: u64) -> BoxedStrategy<MonogenicFactor> {
    let odd = prop_oneof![Just(1i64), Just(3)];
    let even = prop_oneof![Just(2i64), Just(4)];
    let ext = if p == 2 { (1i64..4).boxed() } else { odd.boxed() };
    let exterior = ext.prop_map(move |g| MonogenicFactor::exterior(name, g));
    let poly_grading = if p == 2 { (1i64..4).boxed() } else { even.boxed() };
    let polynomial = poly_grading.clone().prop_map(move |g| MonogenicFactor::polynomial(name, g));
    if p == 0 {
        return prop_oneof![exterior, polynomial].boxed();
    }
    let truncated = (poly_grading, 1u32..3).prop_map(move |(g, h)| MonogenicFactor::truncated(name, g, h));
    prop_oneof![exterior, polynomial, truncated].boxed()
}

fn property_suites() -> Outcome {
    let start = Instant::now();
    let b = DegreeBox::new(3, -1, 4);

    check("d^r squares to zero", any::<u64>(), |seed| {
        let rf = random_filtered(seed, 2, 3, 4);
        for page in compute_pages(&rf.fc, &b, 3).map_err(fail)? {
            for (k, m) in &page.differentials {
                let next = Degree::tri(k.n, k.d - 1, k.filtration() - page.r as i64);
                if let Some(m2) = page.differentials.get(&next) {
                    prop_assert!(m2.mul(m).map_err(fail)?.is_zero(), "d{} d{} != 0 at {}", page.r, page.r, k);
                }
            }
        }
        Ok(())
    })?;

    check("Euler characteristic", any::<u64>(), |seed| {
        let rf = random_filtered(seed, 3, 3, 3);
        let pages = compute_pages(&rf.fc, &b, 4).map_err(fail)?;
        for n in 0..=3 {
            for page in &pages {
                prop_assert_eq!(euler(page, n), euler(&pages[0], n), "column {} page {}", n, page.r);
            }
        }
        Ok(())
    })?;

    check("E-infinity sums to homology", (any::<u64>(), prop_oneof![Just(2u64), Just(3), Just(5)]), |(seed, p)| {
        let rf = random_filtered(seed, p, 3, 3);
        let bx = DegreeBox::new(3, 0, 3);
        let einf = infinity_page(&rf.fc, &bx).map_err(fail)?;
        for deg in bx.bidegrees() {
            let sum: usize = einf.groups.iter().filter(|(k, _)| k.bidegree() == deg).map(|(_, g)| g.dim()).sum();
            prop_assert_eq!(sum, rf.oracle_homology(p, deg), "at {}", deg);
        }
        Ok(())
    })?;

    check("tau-Bockstein", (any::<u64>(), prop_oneof![Just(2u64), Just(3)]), |(seed, p)| {
        let rf = random_filtered(seed, p, 3, 3);
        let bx = DegreeBox::new(3, 0, 3);
        let tau = tau_modules(&rf.fc, &bx).map_err(fail)?;
        let pages = compute_pages(&rf.fc, &DegreeBox::new(3, 0, 4), rf.fc.span() + 1).map_err(fail)?;
        for deg in bx.bidegrees() {
            let module = tau.module(deg);
            for page in &pages {
                let r = page.r as i64;
                for (src, m) in &page.differentials {
                    if src.n == deg.n && src.d == deg.d + 1 {
                        prop_assert_eq!(module.torsion_count(src.filtration() - r, r), rank(m), "{} page {}", deg, r);
                    }
                }
            }
            prop_assert_eq!(module.free_rank(), rf.oracle_homology(p, deg));
        }
        Ok(())
    })?;

    let kunneth = prop_oneof![Just(0u64), Just(2), Just(3)]
        .prop_flat_map(|p| (Just(p), factor_strategy("x", p), factor_strategy("y", p)));
    check("Kunneth", kunneth, |(p, a, c)| {
        let field = if p == 0 { FieldSpec::Rational } else { FieldSpec::Prime { p } };
        let bx = DegreeBox::new(6, 0, 6);
        let whole = cotor_box(&HopfPresentation::monogenic(field, vec![a.clone(), c.clone()]), &bx, false).map_err(fail)?;
        let ta = monogenic_cotor_closed(field, &a, &bx).map_err(fail)?;
        let tc = monogenic_cotor_closed(field, &c, &bx).map_err(fail)?;
        prop_assert_eq!(&whole.dims, &convolve(&ta, &tc, bx).dims, "{:?} (x) {:?}", a, c);
        Ok(())
    })?;

    let matrices = prop_oneof![Just(2u64), Just(3), Just(5), Just(7)].prop_flat_map(|p| {
        (1usize..9, 1usize..9).prop_flat_map(move |(r, c)| (Just(p), prop::collection::vec(prop::collection::vec(0..p, c), r)))
    });
    check("rank-nullity", matrices, |(p, dense)| {
        let field = PrimeField::new(p).unwrap();
        let cols = dense[0].len();
        let m = SparseMatrix::from_dense_rows(field.clone(), cols, &dense);
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.cols(), cols);
        prop_assert_eq!(rank(&m), oracle_rank(p, dense.clone()));
        prop_assert!(m.mul(&k).map_err(fail)?.is_zero());
        prop_assert_eq!(rank(&k), k.cols());
        Ok(())
    })?;

    let modules = (prop::collection::vec(0u64..5, 4), 1u32..3);
    check("Smith-Toda rank identity", modules, |(coef, e)| {
        let p = 5;
        let relation = if coef[..3].iter().all(|c| *c == 0) {
            "r^3".to_string()
        } else {
            format!("{}*r^2+{}*r*b+{}*b^2", coef[0], coef[1], coef[2])
        };
        let vars = vec![GeneratorSpec::natural("r", Degree::bi(1, 0), p), GeneratorSpec::natural("b", Degree::bi(1, 0), p)];
        let module = PolyModulePresentation::cyclic(FieldSpec::Prime { p }, vars, &[relation.as_str()]);
        let element = format!("r^{e}+{}*b^{e}", coef[3]);
        let field = PrimeField::new(p).unwrap();
        let out = DegreeBox::new(6, 0, 2);
        let acts = polymodule_actions(&field, &module, &[element.as_str()], &out).map_err(fail)?;
        let t = smith_toda_table(&acts, &out).map_err(fail)?;
        let a = &acts[0];
        for y in t.reliable_subbox.meet(&out).bidegrees() {
            let z = y - a.shift - Degree::bi(0, 1);
            let coker = a.module.dim(y) - oracle_rank(p, a.at(y - a.shift).to_dense());
            let ker = a.module.dim(z) - oracle_rank(p, a.at(z).to_dense());
            prop_assert_eq!(t.dim(y), coker + ker, "at {}", y);
        }
        Ok(())
    })?;

    within(Duration::from_secs(120), start)?;
    Ok(format!("seven suites of {CASES} cases in {:.1}s", start.elapsed().as_secs_f64()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("rational cdga homology", rational_cdga),
        ("red-blue free algebra and quotient", red_blue),
        ("free E_2 tower on sigma", free_e2_tower),
        ("Cotor brute force against closed forms", cotor_oracles),
        ("Cech localization of the plane", cech_plane),
        ("mod-3 spectral sequence", mod3_spectral_sequence),
        ("quantization and theta", bound_formulas),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
