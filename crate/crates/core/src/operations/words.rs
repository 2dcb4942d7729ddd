use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graded::{Degree, GeneratorSpec};

/// Arity of the little-disks operad: a finite `k >= 2` or `k = infinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arity {
    Finite(u32),
    Infinite,
}

impl Arity {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::usage(format!("E_k needs k >= 2, got {k}")));
        }
        Ok(Arity::Finite(k))
    }

    /// Homological degree of the bracket, `None` when there is none.
    pub fn bracket_shift(self) -> Option<i64> {
        match self {
            Arity::Finite(k) => Some(k as i64 - 1),
            Arity::Infinite => None,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Finite(k) => write!(f, "{k}"),
            Arity::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Arity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Arity::Infinite),
            t => Arity::new(t.parse().map_err(|_| Error::Parse(format!("bad arity `{s}`")))?),
        }
    }
}

/// A bracket expression in the generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LieTerm {
    Gen(usize),
    Bracket(Box<LieTerm>, Box<LieTerm>),
}

impl LieTerm {
    pub fn render(&self, gens: &[GeneratorSpec]) -> String {
        match self {
            LieTerm::Gen(i) => gens[*i].name.clone(),
            LieTerm::Bracket(a, b) => format!("[{},{}]", a.render(gens), b.render(gens)),
        }
    }

    /// Leftmost generator.
    pub fn head(&self) -> usize {
        match self {
            LieTerm::Gen(i) => *i,
            LieTerm::Bracket(a, _) => a.head(),
        }
    }

    pub fn brackets(&self) -> usize {
        match self {
            LieTerm::Gen(_) => 0,
            LieTerm::Bracket(a, b) => 1 + a.brackets() + b.brackets(),
        }
    }

    pub fn letters(&self, out: &mut Vec<usize>) {
        match self {
            LieTerm::Gen(i) => out.push(*i),
            LieTerm::Bracket(a, b) => {
                a.letters(out);
                b.letters(out);
            }
        }
    }
}

/// One Dyer-Lashof type operation. `Xi` and `Zeta` name the top operation
/// and its Bockstein for `k = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DlOp {
    Xi,
    Zeta,
    Q(i64),
    BetaQ(i64),
}

impl DlOp {
    fn token(self) -> String {
        match self {
            DlOp::Xi => "xi".into(),
            DlOp::Zeta => "zeta".into(),
            DlOp::Q(s) => format!("Q{s}"),
            DlOp::BetaQ(s) => format!("betaQ{s}"),
        }
    }
}

/// A generator word: operations (innermost first) applied to a bracket term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpWord {
    pub head: String,
    pub base: LieTerm,
    pub ops: Vec<DlOp>,
    pub degree: Degree,
    label: String,
}

impl OpWord {
    pub(crate) fn new(gens: &[GeneratorSpec], base: LieTerm, ops: Vec<DlOp>, degree: Degree) -> Self {
        let label = render_word(gens, &base, &ops);
        OpWord { head: gens[base.head()].name.clone(), base, ops, degree, label }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for OpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl Serialize for OpWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            word: &'a str,
            degree: Degree,
        }
        View { word: &self.label, degree: self.degree }.serialize(s)
    }
}

fn render_word(gens: &[GeneratorSpec], base: &LieTerm, ops: &[DlOp]) -> String {
    let base = base.render(gens);
    if ops.is_empty() {
        return base;
    }
    if ops.iter().all(|o| matches!(o, DlOp::Xi | DlOp::Zeta)) {
        // Function notation, grouping runs: zeta(xi^2(x)).
        let mut out = base;
        let mut i = 0;
        while i < ops.len() {
            let mut j = i;
            while j < ops.len() && ops[j] == ops[i] {
                j += 1;
            }
            let run = j - i;
            let name = ops[i].token();
            out = if run == 1 { format!("{name}({out})") } else { format!("{name}^{run}({out})") };
            i = j;
        }
        return out;
    }
    let tokens: Vec<String> = ops.iter().rev().map(|o| o.token()).collect();
    let base = if base.starts_with('[') { base } else { format!("[{base}]") };
    format!("{} {base}", tokens.join(" "))
}

/// Degree of a word recomputed from its tokens alone.
///
/// ```
/// use stabkit::graded::{Degree, GeneratorSpec, Parity};
/// use stabkit::operations::{recompute_degree, Arity, DlOp, LieTerm};
/// let g = vec![GeneratorSpec::new("x", Degree::tri(2, 1, -1), Parity::Even)];
/// let d = recompute_degree(2, Arity::Infinite, &g, &LieTerm::Gen(0), &[DlOp::Q(2), DlOp::Q(4)]).unwrap();
/// assert_eq!(d, Degree::tri(8, 7, -4));
/// ```
pub fn recompute_degree(p: u64, k: Arity, gens: &[GeneratorSpec], base: &LieTerm, ops: &[DlOp]) -> Result<Degree> {
    let mut letters = Vec::new();
    base.letters(&mut letters);
    let mut deg = Degree::ZERO;
    for i in letters {
        let g = gens.get(i).ok_or_else(|| Error::usage("word refers to a missing generator"))?;
        deg = deg + g.degree;
    }
    let brackets = base.brackets() as i64;
    if brackets > 0 {
        let shift = k.bracket_shift().ok_or_else(|| Error::usage("brackets vanish for k = infinity"))?;
        deg.d += brackets * shift;
    }
    let p = p as i64;
    for op in ops {
        deg = match op {
            DlOp::Xi if p == 2 => deg.scale(2) + Degree::bi(0, 1),
            DlOp::Xi => deg.scale(p) + Degree::bi(0, p - 1),
            DlOp::Zeta => deg.scale(p) + Degree::bi(0, p - 2),
            DlOp::Q(s) if p == 2 => Degree { n: 2 * deg.n, d: deg.d + s, f: deg.f.map(|f| 2 * f) },
            DlOp::Q(s) => Degree { n: p * deg.n, d: deg.d + 2 * s * (p - 1), f: deg.f.map(|f| p * f) },
            DlOp::BetaQ(s) => Degree { n: p * deg.n, d: deg.d + 2 * s * (p - 1) - 1, f: deg.f.map(|f| p * f) },
        };
    }
    Ok(deg)
}
