//! Command dispatch: each command yields one JSON document and its text rendering.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stabkit::chain::{cdga_homology_box_capped, cotor_box, koszul_quotient_box_capped, BoxTable, CdgaPresentation};
use stabkit::error::{Diagnostic, Error};
use stabkit::exact::{Field, FieldSpec};
use stabkit::graded::{quantized_slope, Degree, DegreeBox, SlopeQ};
use stabkit::operations::{free_ek_dimension_table, free_ek_presentation, generator_words, Arity};
use stabkit::spectral::{
    aug_filtered_cobar, compute_pages, infinity_page, survival_analysis, tau_modules, trace_class, FilteredComplex,
    PageSummary,
};
use stabkit::stability::{
    cech_localize, fit_vanishing_line, nilpotence_in_box, polymodule_actions, quantum_candidates, range_bounds,
    smith_toda_table, telescope_localize, ActionTable, BoundParams, PolyModulePresentation, VanishingLine,
};
use stabkit::with_field;

use crate::schema::{parse_json, read, InputError, InputFile, InputKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    FreeEk,
    Cdga,
    Cotor,
    Ss,
    SmithToda,
    Vanish,
    Localize,
    Bounds,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Cech,
    Telescope,
}

/// Everything a single invocation needs.
#[derive(Clone, Debug)]
pub struct Job {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub bounds: Option<String>,
    pub page: Option<usize>,
    pub elements: Vec<String>,
    pub ideal: Vec<String>,
    pub seed: Option<u64>,
    pub max_dim: usize,
    pub arity: Option<String>,
    pub max_power: u32,
    pub candidates: u64,
    pub method: Option<Method>,
    pub tau: bool,
}

pub enum Failure {
    Input(Vec<Diagnostic>),
    Compute(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(d) => Failure::Input(d),
            other => Failure::Compute(other),
        }
    }
}

pub struct Output {
    pub json: Value,
    pub text: String,
}

type Run<T> = Result<T, Failure>;

fn input_path(job: &Job) -> Run<&PathBuf> {
    job.input.as_ref().ok_or_else(|| Failure::Input(vec![Diagnostic::new("", "--input is required")]))
}

fn input(job: &Job) -> Run<InputFile> {
    Ok(InputFile::load(input_path(job)?)?)
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Compute(Error::usage(msg))
}

/// Parses `--box`, filling command-specific defaults.
fn degree_box(job: &Job, default_d_min: Option<i64>) -> Run<DegreeBox> {
    let spec = job.bounds.as_deref().ok_or_else(|| usage("--box is required, as in --box n=8"))?;
    let mut b = DegreeBox::parse_spec(spec)?;
    if let Some(d) = default_d_min {
        if !spec.contains("dmin") {
            b.d_min = b.d_min.min(d);
        }
        if !spec.contains("nmin") {
            b.n_min = -b.n_max;
        }
    }
    b.validate()?;
    Ok(b)
}

fn elements(job: &Job) -> Vec<&str> {
    job.elements.iter().map(String::as_str).collect()
}

fn table_text(title: &str, t: &BoxTable) -> String {
    let mut s = format!("{title}\n");
    s.push_str(&t.render_grid());
    if t.reliable_subbox != t.bounds {
        let _ = writeln!(s, "reliable sub-box: {}", t.reliable_subbox);
    }
    for n in &t.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

fn line_text(line: &Option<VanishingLine>) -> String {
    match line {
        None => "vanishing line: none among the candidates\n".into(),
        Some(l) => {
            let mut s = format!("vanishing line: lambda = {}, kappa = {} on {}\n", l.slope, l.kappa, l.certified_box);
            if let (Some(b), Some(w)) = (l.blocked_slope, l.witness) {
                let _ = writeln!(s, "steeper slope {b} blocked at {w}");
            }
            s
        }
    }
}

pub fn run(job: &Job) -> Run<Output> {
    match job.command {
        Command::FreeEk => free_ek(job),
        Command::Cdga => cdga(job),
        Command::Cotor => cotor(job),
        Command::Ss => ss(job),
        Command::SmithToda => smith_toda(job),
        Command::Vanish => vanish(job),
        Command::Localize => localize(job),
        Command::Bounds => bounds(job),
        Command::Validate => validate(job),
    }
}

/// Reruns a job on the completed part of the box after a resource error.
pub fn run_partial(job: &Job, completed: DegreeBox) -> Option<Output> {
    let mut spec = format!("n={},nmin={},dmin={},dmax={}", completed.n_max, completed.n_min, completed.d_min, completed.d_max);
    if let (Some(lo), Some(hi)) = (completed.f_min, completed.f_max) {
        let _ = write!(spec, ",f={lo}..{hi}");
    }
    let partial = Job { bounds: Some(spec), ..job.clone() };
    run(&partial).ok()
}

fn arity(job: &Job) -> Run<Arity> {
    match job.arity.as_deref() {
        None => Ok(Arity::Finite(2)),
        Some("inf" | "infinity") => Ok(Arity::Infinite),
        Some(k) => Ok(Arity::new(k.parse().map_err(|_| usage(format!("--arity `{k}` is not an integer or `inf`")))?)?),
    }
}

fn prime(field: FieldSpec) -> Run<u64> {
    match field {
        FieldSpec::Prime { p } => Ok(p),
        FieldSpec::Rational => Err(Failure::Input(vec![Diagnostic::new("/field", "free E_k tables need a prime field")])),
    }
}

fn free_ek(job: &Job) -> Run<Output> {
    let file = input(job)?;
    let p = prime(file.field)?;
    let gens = file.generator_specs()?;
    let bx = degree_box(job, None)?;
    let k = arity(job)?;
    let table = free_ek_dimension_table(p, k, &gens, &bx)?;
    let words: Vec<Value> = generator_words(p, k, &gens, &bx)?
        .iter()
        .map(|w| json!({"label": w.label(), "degree": w.degree}))
        .collect();
    let mut text = table_text(&format!("free E_{k} algebra over {}", file.field), &table);
    text.push_str("generators:\n");
    for w in &words {
        let _ = writeln!(text, "  {} {}", w["degree"].as_str().unwrap_or(""), w["label"].as_str().unwrap_or(""));
    }
    let mut doc = json!({"command": "free-ek", "arity": k.to_string(), "table": table, "generators": words});
    if !job.elements.is_empty() {
        let pres = free_ek_presentation(p, k, &gens, &bx)?;
        let quotient = koszul_quotient_box_capped(&pres, &elements(job), &bx, false, job.max_dim)?;
        let line = fit_vanishing_line(&quotient, &quantum_candidates(job.candidates));
        text.push_str(&table_text(&format!("quotient by {}", job.elements.join(", ")), &quotient));
        text.push_str(&line_text(&line));
        doc["quotient"] = json!(quotient);
        doc["vanishing_line"] = json!(line);
    }
    Ok(Output { json: doc, text })
}

fn homology(p: &CdgaPresentation, job: &Job, bx: &DegreeBox) -> Run<BoxTable> {
    Ok(if job.elements.is_empty() {
        cdga_homology_box_capped(p, bx, true, job.max_dim)?
    } else {
        koszul_quotient_box_capped(p, &elements(job), bx, true, job.max_dim)?
    })
}

fn cdga(job: &Job) -> Run<Output> {
    let p = input(job)?.cdga()?;
    let bx = degree_box(job, None)?;
    let table = homology(&p, job, &bx)?;
    let mut title = format!("homology over {}", p.field);
    if !job.elements.is_empty() {
        let _ = write!(title, " after killing {}", job.elements.join(", "));
    }
    let mut text = table_text(&title, &table);
    if let Some(basis) = &table.basis {
        for (deg, reps) in basis {
            let _ = writeln!(text, "{deg}: {}", reps.join(", "));
        }
    }
    Ok(Output { json: json!({"command": "cdga", "table": table}), text })
}

fn cotor(job: &Job) -> Run<Output> {
    let h = input(job)?.hopf()?;
    let bx = degree_box(job, None)?;
    let table = cotor_box(&h, &bx, true)?;
    let text = table_text(&format!("Cotor over {}", h.field), &table);
    Ok(Output { json: json!({"command": "cotor", "table": table}), text })
}

#[derive(Serialize)]
struct Trace {
    element: String,
    degree: Degree,
    fate: stabkit::spectral::Survival,
    #[serde(skip_serializing_if = "Option::is_none")]
    powers: Option<stabkit::spectral::PowerSurvival>,
}

/// Chain-level vector of a cdga element in the spot basis of the complex.
fn element_vector<F: Field>(fc: &FilteredComplex<F>, p: &CdgaPresentation, text: &str) -> Run<(Degree, Vec<F::Elem>)> {
    let poly = p.parse(text)?;
    let deg = p
        .homogeneous_degree(&poly)
        .ok_or_else(|| usage(format!("`{text}` is not a nonzero homogeneous element")))?;
    // The class sits in the filtration of its highest term.
    let f = poly
        .keys()
        .map(|m| m.exps.iter().zip(p.gens()).map(|(e, g)| *e as i64 * g.degree.filtration()).sum::<i64>())
        .max()
        .unwrap_or(0);
    let deg = deg.with_f(f);
    let field = fc.field();
    let cx = fc.complex();
    let labels = cx.labels(deg.bidegree());
    let mut v = vec![field.zero(); labels.len()];
    let coeffs = stabkit::chain::Poly::from_rational(field, &poly)?;
    for (m, c) in coeffs.terms {
        let label = m.render(p.gens());
        let i = labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| usage(format!("`{label}` at {deg} is outside the box")))?;
        v[i] = c;
    }
    Ok((deg, v))
}

fn ss(job: &Job) -> Run<Output> {
    let file = input(job)?;
    let bx = degree_box(job, None)?;
    let cdga = match file.kind {
        InputKind::Hopf => None,
        _ => Some(file.cdga()?),
    };
    let hopf = match file.kind {
        InputKind::Hopf => Some(file.hopf()?),
        _ => None,
    };
    with_field!(file.field, |f| {
        let fc = match (&cdga, &hopf) {
            (Some(p), _) => FilteredComplex::from_cdga(p, &f, &bx, job.max_dim)?,
            (None, Some(h)) => aug_filtered_cobar(h, &f, &bx)?,
            _ => unreachable!("one presentation is present"),
        };
        let span = fc.span();
        let r_max = job.page.unwrap_or(span + 1).max(1);
        let pages: Vec<PageSummary> = compute_pages(&fc, &bx, r_max)?.iter().map(|pg| pg.summary()).collect();
        let inf = infinity_page(&fc, &bx)?.summary();
        let mut traces = Vec::new();
        if !job.elements.is_empty() {
            let p = cdga.as_ref().ok_or_else(|| usage("--elements needs a cdga or filtered presentation"))?;
            for e in &job.elements {
                let (deg, v) = element_vector(&fc, p, e)?;
                let fate = trace_class(&fc, deg, &v, span + 1)?;
                let powers = match file.field {
                    FieldSpec::Prime { p } => Some(survival_analysis(&fc, &bx, deg, p, job.max_power)?),
                    FieldSpec::Rational => None,
                };
                traces.push(Trace { element: e.clone(), degree: deg, fate, powers });
            }
        }
        let tau = if job.tau { Some(tau_modules(&fc, &bx)?) } else { None };
        let mut text = String::new();
        for pg in pages.iter().chain(std::iter::once(&inf)) {
            let _ = match (pg.infinity, pg.page > r_max) {
                (true, true) => writeln!(text, "E^inf"),
                (true, false) => writeln!(text, "E^{} = E^inf", pg.page),
                (false, _) => writeln!(text, "E^{}", pg.page),
            };
            for g in &pg.groups {
                let _ = writeln!(text, "  ({},{},{}): {}", g.n, g.d, g.f, g.dim);
            }
            for d in &pg.differentials {
                let _ = writeln!(text, "  d: {} -> {} rank {}", d.source, d.target, d.rank);
                for (a, b) in &d.images {
                    let _ = writeln!(text, "     {a} |-> {b}");
                }
            }
        }
        for t in &traces {
            let _ = writeln!(text, "{} at {}: {}", t.element, t.degree, serde_json::to_string(&t.fate).expect("plain data"));
            if let Some(ps) = &t.powers {
                let _ = writeln!(text, "  powers: {}", serde_json::to_string(ps).expect("plain data"));
            }
        }
        if let Some(tau) = &tau {
            for (deg, m) in &tau.modules {
                let _ = writeln!(text, "tau {deg}: {}", serde_json::to_string(m).expect("plain data"));
            }
        }
        let mut doc = json!({"command": "ss", "span": span, "pages": pages, "infinity": inf});
        if !traces.is_empty() {
            doc["traces"] = json!(traces);
        }
        if let Some(tau) = tau {
            doc["tau"] = json!(tau);
        }
        Ok::<_, Failure>(Output { json: doc, text })
    })
}

fn smith_toda(job: &Job) -> Run<Output> {
    let m = input(job)?.polymodule()?;
    let out = degree_box(job, None)?;
    if job.elements.is_empty() {
        return Err(usage("smith-toda needs --elements"));
    }
    with_field!(m.field, |f| {
        let acts = polymodule_actions(&f, &m, &elements(job), &out)?;
        let table = smith_toda_table(&acts, &out)?;
        let mut text = table_text(&format!("M/({})", job.elements.join(", ")), &table);
        let verdicts: Vec<Value> = job
            .elements
            .iter()
            .zip(&acts)
            .map(|(e, a)| {
                let v = nilpotence_in_box(a, &a.module.bounds);
                let _ = writeln!(text, "{e}: {}", serde_json::to_string(&v).expect("plain data"));
                json!({"element": e, "nilpotence": v})
            })
            .collect();
        Ok::<_, Failure>(Output { json: json!({"command": "smith-toda", "table": table, "actions": verdicts}), text })
    })
}

#[derive(Deserialize)]
struct Emitted {
    table: BoxTable,
}

/// A table from a presentation, an emitted document or a bare table.
fn vanish_table(job: &Job) -> Run<(String, BoxTable)> {
    let text = read(input_path(job)?)?;
    let value: Value = parse_json(&text)?;
    if value.get("dims").is_some() {
        let t: BoxTable = parse_json(&text)?;
        t.check().map_err(Failure::Input)?;
        return Ok(("input".into(), t));
    }
    if value.get("table").is_some() {
        let t = parse_json::<Emitted>(&text)?.table;
        t.check().map_err(|d| {
            Failure::Input(d.into_iter().map(|x| Diagnostic::new(format!("/table{}", x.path), x.message)).collect())
        })?;
        return Ok(("input".into(), t));
    }
    let file: InputFile = parse_json(&text)?;
    let bx = degree_box(job, None)?;
    Ok(match file.kind {
        InputKind::Cdga | InputKind::Filtered => ("cdga".into(), homology(&file.cdga()?, job, &bx)?),
        InputKind::Hopf => ("cotor".into(), cotor_box(&file.hopf()?, &bx, false)?),
        InputKind::Polymodule => {
            let m = file.polymodule()?;
            if job.elements.is_empty() {
                ("module".into(), m.dims(&bx)?)
            } else {
                let t = with_field!(m.field, |f| {
                    let acts: Vec<ActionTable<_>> = polymodule_actions(&f, &m, &elements(job), &bx)?;
                    smith_toda_table(&acts, &bx)
                })?;
                ("smith-toda".into(), t)
            }
        }
    })
}

fn vanish(job: &Job) -> Run<Output> {
    let (source, table) = vanish_table(job)?;
    let line = fit_vanishing_line(&table, &quantum_candidates(job.candidates));
    let text = format!("{}{}", table_text(&format!("{source} table"), &table), line_text(&line));
    Ok(Output { json: json!({"command": "vanish", "source": source, "table": table, "vanishing_line": line}), text })
}

fn localize(job: &Job) -> Run<Output> {
    let m: PolyModulePresentation = input(job)?.polymodule()?;
    let ideal: Vec<&str> = job.ideal.iter().map(String::as_str).collect();
    if ideal.is_empty() {
        return Err(usage("localize needs --ideal"));
    }
    let method = job.method.unwrap_or(Method::Cech);
    let bx = degree_box(job, Some(1 - ideal.len() as i64))?;
    let table = match method {
        Method::Cech => cech_localize(&m, &ideal, &bx)?,
        Method::Telescope => {
            let [sigma] = ideal[..] else {
                return Err(usage("the telescope inverts a single element; use --method cech for an ideal"));
            };
            telescope_localize(&m, sigma, &bx)?
        }
    };
    let text = table_text(&format!("localization at ({})", job.ideal.join(", ")), &table);
    Ok(Output { json: json!({"command": "localize", "table": table}), text })
}

/// Seeded check of slope quantization against direct search.
fn quantize_samples(seed: u64) -> Run<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut text = String::from("lambda -> k/(k+1)\n");
    for _ in 0..200 {
        let den = rng.gen_range(1..=1000i64);
        let lambda = SlopeQ::new(rng.gen_range(0..den), den)?;
        let q = quantized_slope(lambda)?;
        let direct = (0..=10_000u64).map(SlopeQ::quantum).find(|c| *c >= lambda);
        if direct != Some(q) {
            return Err(Failure::Compute(Error::usage(format!("quantization of {lambda} disagrees with search"))));
        }
        let _ = writeln!(text, "{lambda} -> {q}");
        rows.push(json!({"lambda": lambda, "quantized": q}));
    }
    Ok(Output { json: json!({"command": "bounds", "seed": seed, "samples": rows}), text })
}

fn bounds(job: &Job) -> Run<Output> {
    if job.input.is_none() {
        return match job.seed {
            Some(seed) => quantize_samples(seed),
            None => Err(usage("bounds needs --input or --seed")),
        };
    }
    let params: BoundParams = parse_json(&read(input_path(job)?)?)?;
    let r = range_bounds(&params)?;
    let mut text = format!("{}: {} = {}\n", r.kind, r.formula, r.value);
    if let Some(v) = r.variant {
        let _ = writeln!(text, "variant: {v}");
    }
    for n in &r.notes {
        let _ = writeln!(text, "note: {n}");
    }
    Ok(Output { json: json!({"command": "bounds", "result": r}), text })
}

fn validate(job: &Job) -> Run<Output> {
    let text = read(input_path(job)?)?;
    let value: Value = parse_json(&text)?;
    if value.get("dims").is_some() {
        parse_json::<BoxTable>(&text)?.check().map_err(Failure::Input)?;
    } else if value.get("table").is_some() {
        parse_json::<Emitted>(&text)?.table.check().map_err(Failure::Input)?;
    } else if value.get("kind").and_then(Value::as_str).is_some_and(|k| !["cdga", "hopf", "polymodule", "filtered"].contains(&k)) {
        range_bounds(&parse_json::<BoundParams>(&text)?)?;
    } else {
        parse_json::<InputFile>(&text)?.validate()?;
    }
    Ok(Output { json: json!({"command": "validate", "status": "ok"}), text: "ok\n".into() })
}
