//! Input files: JSON presentations with pointer-addressed diagnostics.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use stabkit::chain::{CdgaPresentation, HopfForm, HopfPresentation};
use stabkit::error::Diagnostic;
use stabkit::exact::FieldSpec;
use stabkit::graded::{Degree, GeneratorSpec, Parity};
use stabkit::stability::{ModuleGenerator, PolyModulePresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Cdga,
    Hopf,
    Polymodule,
    Filtered,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityChoice {
    #[default]
    Auto,
    Polynomial,
    Exterior,
}

/// A generator with its degree given either as `n`, `d`, `f` fields or as a
/// `"degree": "(n,d[,f])"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenEntry {
    pub name: String,
    #[serde(default)]
    pub n: Option<i64>,
    #[serde(default)]
    pub d: Option<i64>,
    #[serde(default)]
    pub f: Option<i64>,
    #[serde(default)]
    pub degree: Option<Degree>,
    #[serde(default)]
    pub parity: ParityChoice,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub field: FieldSpec,
    pub kind: InputKind,
    #[serde(default)]
    pub gens: Vec<GenEntry>,
    #[serde(default)]
    pub differential: BTreeMap<String, String>,
    #[serde(default)]
    pub hopf: Option<HopfForm>,
    /// Module generators of a polymodule; `gens` are its variables.
    #[serde(default)]
    pub generators: Vec<ModuleGenerator>,
    #[serde(default)]
    pub relations: Vec<BTreeMap<String, String>>,
}

/// Failure to read an input, already split into pointer diagnostics.
#[derive(Debug)]
pub struct InputError(pub Vec<Diagnostic>);

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// Parses JSON into `T`, reporting the failing location as a JSON pointer.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = pointer(e.path());
        InputError(vec![Diagnostic::new(path, e.into_inner().to_string())])
    })
}

pub fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path)
        .map_err(|e| InputError(vec![Diagnostic::new("", format!("cannot read {}: {e}", path.display()))]))
}

impl InputFile {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        parse_json(&read(path)?)
    }

    /// Generator specs in input order.
    pub fn generator_specs(&self) -> Result<Vec<GeneratorSpec>, InputError> {
        let p = self.field.characteristic();
        let mut diags = Vec::new();
        let mut out = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let degree = match (g.degree, g.n, g.d) {
                (Some(deg), None, None) if g.f.is_none() => deg,
                (None, Some(n), Some(d)) => match g.f {
                    Some(f) => Degree::tri(n, d, f),
                    None => Degree::bi(n, d),
                },
                (Some(_), _, _) => {
                    diags.push(Diagnostic::new(format!("/gens/{i}/degree"), "give either `degree` or `n`/`d`/`f`, not both"));
                    continue;
                }
                _ => {
                    diags.push(Diagnostic::new(format!("/gens/{i}"), "generator needs `n` and `d` (or `degree`)"));
                    continue;
                }
            };
            let parity = match g.parity {
                ParityChoice::Auto => Parity::natural(degree.d, p),
                ParityChoice::Polynomial => Parity::Even,
                ParityChoice::Exterior => Parity::Odd,
            };
            out.push(GeneratorSpec::new(g.name.clone(), degree, parity));
        }
        if diags.is_empty() {
            Ok(out)
        } else {
            Err(InputError(diags))
        }
    }

    /// Maps `/gens/i` pointers of the name-sorted presentation back to input order.
    fn remap(&self, sorted: &[GeneratorSpec], diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
        diags
            .into_iter()
            .map(|mut d| {
                if let Some(rest) = d.path.strip_prefix("/gens/") {
                    let (idx, tail) = rest.split_once('/').map_or((rest, ""), |(a, b)| (a, b));
                    if let Some(name) = idx.parse::<usize>().ok().and_then(|i| sorted.get(i)).map(|g| &g.name) {
                        if let Some(j) = self.gens.iter().position(|g| &g.name == name) {
                            d.path = if tail.is_empty() { format!("/gens/{j}") } else { format!("/gens/{j}/{tail}") };
                        }
                    }
                }
                d
            })
            .collect()
    }

    pub fn cdga(&self) -> Result<CdgaPresentation, InputError> {
        if !matches!(self.kind, InputKind::Cdga | InputKind::Filtered) {
            return Err(InputError(vec![Diagnostic::new("/kind", "expected a cdga or filtered presentation")]));
        }
        if let Err(e) = self.field.validated() {
            return Err(InputError(vec![Diagnostic::new("/field", e.to_string())]));
        }
        let gens = self.generator_specs()?;
        if self.kind == InputKind::Filtered {
            let missing: Vec<Diagnostic> = gens
                .iter()
                .enumerate()
                .filter(|(_, g)| g.degree.f.is_none())
                .map(|(i, g)| Diagnostic::new(format!("/gens/{i}"), format!("filtered generator `{}` needs `f`", g.name)))
                .collect();
            if !missing.is_empty() {
                return Err(InputError(missing));
            }
        }
        let mut p = CdgaPresentation::formal(self.field, gens)
            .map_err(|e| InputError(vec![Diagnostic::new("/gens", e.to_string())]))?;
        let mut diags = Vec::new();
        for (name, text) in &self.differential {
            let path = format!("/differential/{name}");
            match p.parse(text).and_then(|poly| p.set_differential(name, poly)) {
                Ok(()) => {}
                Err(e) => diags.push(Diagnostic::new(path, e.to_string())),
            }
        }
        if !diags.is_empty() {
            return Err(InputError(diags));
        }
        p.validate().map_err(|d| InputError(self.remap(p.gens(), d)))?;
        Ok(p)
    }

    pub fn hopf(&self) -> Result<HopfPresentation, InputError> {
        let form = match (&self.kind, &self.hopf) {
            (InputKind::Hopf, Some(form)) => form.clone(),
            (InputKind::Hopf, None) => return Err(InputError(vec![Diagnostic::new("/hopf", "missing Hopf algebra data")])),
            _ => return Err(InputError(vec![Diagnostic::new("/kind", "expected a hopf presentation")])),
        };
        let h = HopfPresentation { field: self.field, form };
        h.validate().map_err(InputError)?;
        Ok(h)
    }

    pub fn polymodule(&self) -> Result<PolyModulePresentation, InputError> {
        if self.kind != InputKind::Polymodule {
            return Err(InputError(vec![Diagnostic::new("/kind", "expected a polymodule presentation")]));
        }
        let variables = self.generator_specs()?;
        let generators = if self.generators.is_empty() {
            vec![ModuleGenerator { name: "1".into(), degree: Degree::ZERO }]
        } else {
            self.generators.clone()
        };
        let m = PolyModulePresentation { field: self.field, variables, generators, relations: self.relations.clone() };
        // Module variables live under `gens` in the file.
        m.validate().map_err(|d| {
            InputError(
                d.into_iter()
                    .map(|mut x| {
                        if let Some(rest) = x.path.strip_prefix("/variables") {
                            x.path = format!("/gens{rest}");
                        }
                        x
                    })
                    .collect(),
            )
        })?;
        Ok(m)
    }

    /// Full validation for the `validate` command.
    pub fn validate(&self) -> Result<(), InputError> {
        match self.kind {
            InputKind::Cdga | InputKind::Filtered => self.cdga().map(|_| ()),
            InputKind::Hopf => self.hopf().map(|_| ()),
            InputKind::Polymodule => self.polymodule().map(|_| ()),
        }
    }
}
