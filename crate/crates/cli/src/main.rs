use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use perverse_core::doc::{parse, serialize, Document};
use perverse_core::examples::{example_document, example_names};
use perverse_core::glued::{cokernel, i_upper_shriek, kernel, Complex};
use perverse_core::heart::{
    composition_factors_seeded, hom_module, intermediate_extension, j_shriek, j_star, j_upper_star, localization_sequence, omega0_jstar, validate_object,
    HeartObject,
};
use perverse_core::linalg::CoeffMode;
use perverse_core::local::{h0, h1, TwoTermComplex};
use perverse_core::rep::Representation;
use perverse_core::weights::{artin_verdict, weight_grading, weight_grading_matrix};
use perverse_core::Error;

#[derive(Parser)]
#[command(name = "perverse", version, about = "Gluing-data computations for perverse sheaves on curves")]
struct Cli {
    /// Coefficient ring: `Q` or `Z/ELL^N`.
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Require certified Artin verdicts everywhere.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the curve and every object.
    Validate { document: PathBuf },
    /// Apply a gluing functor to an object.
    Functor {
        document: PathBuf,
        /// j_shriek, j_star, intermediate_extension, omega0_j_star, j_upper_star, i_upper_star, i_upper_shriek
        name: String,
        object: String,
        /// Closed point label, for i_upper_star and i_upper_shriek.
        point: Option<String>,
    },
    Hom { document: PathBuf, source: String, target: String },
    Kernel { document: PathBuf, morphism: String },
    Cokernel { document: PathBuf, morphism: String },
    /// Composition factors and length.
    Factors { document: PathBuf, object: String },
    /// Frobenius weights of the point cohomology.
    Weights { document: PathBuf, object: String },
    /// Localization sequence and its exactness.
    Sequence { document: PathBuf, object: String },
    /// Print the example document of a preset.
    Examples { preset: String },
}

enum Failure {
    Usage(String),
    Check(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Check(json!({ "error": { "code": e.code(), "message": e.to_string() } }))
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn parse_mode(s: &str) -> std::result::Result<CoeffMode, String> {
    if s == "Q" || s.eq_ignore_ascii_case("rational") {
        return Ok(CoeffMode::rational());
    }
    let rest = s.strip_prefix("Z/").ok_or_else(|| format!("unrecognized mode `{s}`"))?;
    let (ell, n) = rest.split_once('^').unwrap_or((rest, "1"));
    let ell: u64 = ell.parse().map_err(|_| format!("unrecognized mode `{s}`"))?;
    let n: u32 = n.parse().map_err(|_| format!("unrecognized mode `{s}`"))?;
    CoeffMode::chain_ring(ell, n).map_err(|e| e.to_string())
}

fn load(path: &PathBuf, mode: &Option<CoeffMode>) -> std::result::Result<Document, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse(&text)?;
    if let Some(m) = mode {
        if *m != doc.mode {
            return Err(Error::UnsupportedMode(format!("document is over {}, not {m}", doc.mode)).into());
        }
    }
    Ok(doc)
}

fn summary(o: &HeartObject) -> perverse_core::Result<Value> {
    let q = o.quiver()?;
    Ok(json!({
        "branch_lengths": q.branches.iter().map(|r| r.shape.length()).collect::<Vec<_>>(),
        "point_lengths": q.points.iter().map(|p| p.p.shape.length()).collect::<Vec<_>>(),
        "point_complexes": o.point_complexes.iter().map(|m| [m.c0.length(), m.c1.length()]).collect::<Vec<_>>(),
        "zero": q.is_zero(),
    }))
}

fn object_document(curve_doc: &Document, name: &str, o: HeartObject) -> perverse_core::Result<Value> {
    let mut d = Document::new(&curve_doc.mode, &curve_doc.curve);
    d.objects.push((name.into(), o));
    Ok(serde_json::from_str(&serialize(&d)?).expect("serializer emits JSON"))
}

fn rep_value(r: &Representation) -> Value {
    json!({ "exponents": r.shape.exps, "verdict": artin_verdict(r) })
}

fn complex_value(c: &Complex) -> Value {
    let coh: Vec<Value> = (0..c.len() as i64).map(|k| json!({ "degree": c.start + k, "exponents": c.cohomology(c.start + k).shape.exps })).collect();
    json!({ "start": c.start, "terms": c.terms.iter().map(|t| t.shape.exps.clone()).collect::<Vec<_>>(), "cohomology": coh })
}

fn two_term_value(c: &TwoTermComplex) -> Value {
    json!({ "c0": c.c0.exps, "c1": c.c1.exps, "h0": h0(c).shape.exps, "h1": h1(c).shape.exps, "tags": [c.tag0, c.tag1], "twist": c.twist })
}

fn point_index(doc: &Document, label: &Option<String>) -> std::result::Result<usize, Failure> {
    let l = label.as_ref().ok_or_else(|| Failure::Usage("this functor needs a closed point".into()))?;
    doc.curve.point_index(l).ok_or_else(|| Error::Parse { code: "E_NAME", message: format!("unknown point `{l}`") }.into())
}

fn run(cli: &Cli) -> Outcome {
    let mode = cli.mode.as_deref().map(parse_mode).transpose().map_err(Failure::Usage)?;
    match &cli.command {
        Command::Examples { preset } => {
            if !example_names().contains(&preset.as_str()) {
                return Err(Failure::Usage(format!("unknown preset `{preset}`; expected one of {}", example_names().join(", "))));
            }
            let d = example_document(preset, &mode.unwrap_or_else(CoeffMode::rational))?;
            let v: Value = serde_json::from_str(&serialize(&d)?).expect("serializer emits JSON");
            Ok((v, true))
        }
        Command::Validate { document } => {
            let d = load(document, &mode)?;
            let mut ok = true;
            let mut objects = serde_json::Map::new();
            for (n, o) in &d.objects {
                let r = validate_object(o, cli.strict);
                ok &= r.valid;
                objects.insert(n.clone(), serde_json::to_value(&r).expect("report serializes"));
            }
            Ok((json!({ "command": "validate", "strict": cli.strict, "valid": ok, "objects": objects, "morphisms": d.morphisms.len() }), ok))
        }
        Command::Functor { document, name, object, point } => {
            let d = load(document, &mode)?;
            let o = d.object(object)?;
            let l = j_upper_star(o);
            let (result, value) = match name.as_str() {
                "j_shriek" => ("object", object_document(&d, name, j_shriek(&d.curve, l)?)?),
                "j_star" => ("object", object_document(&d, name, j_star(&d.curve, l)?)?),
                "intermediate_extension" => ("object", object_document(&d, name, intermediate_extension(&d.curve, l)?)?),
                "omega0_j_star" => ("object", object_document(&d, name, omega0_jstar(&d.curve, l)?)?),
                "j_upper_star" => ("branches", Value::Array(l.iter().map(rep_value).collect())),
                "i_upper_star" => ("complex", two_term_value(&o.point_complexes[point_index(&d, point)?])),
                "i_upper_shriek" => ("complex", complex_value(&i_upper_shriek(o, point_index(&d, point)?)?)),
                other => return Err(Failure::Usage(format!("unknown functor `{other}`"))),
            };
            Ok((json!({ "command": "functor", "functor": name, result: value }), true))
        }
        Command::Hom { document, source, target } => {
            let d = load(document, &mode)?;
            let h = hom_module(d.object(source)?, d.object(target)?)?;
            Ok((json!({ "command": "hom", "free_rank": h.module.free_rank, "torsion_exponents": h.module.torsion_exponents, "generators": h.basis.len() }), true))
        }
        Command::Kernel { document, morphism } | Command::Cokernel { document, morphism } => {
            let d = load(document, &mode)?;
            let f = d.morphism(morphism)?;
            let (label, o) = match &cli.command {
                Command::Kernel { .. } => ("kernel", kernel(f)?),
                _ => ("cokernel", cokernel(f)?),
            };
            Ok((json!({ "command": label, "summary": summary(&o)?, "document": object_document(&d, label, o)? }), true))
        }
        Command::Factors { document, object } => {
            let d = load(document, &mode)?;
            let fs = composition_factors_seeded(d.object(object)?, cli.seed)?;
            let list = fs.iter().map(summary).collect::<perverse_core::Result<Vec<_>>>()?;
            Ok((json!({ "command": "factors", "length": fs.len(), "factors": list }), true))
        }
        Command::Weights { document, object } => {
            let d = load(document, &mode)?;
            let o = d.object(object)?;
            let mut branches = Vec::new();
            for r in &o.branch_reps {
                branches.push(match weight_grading(r) {
                    Ok(w) => serde_json::to_value(&w).expect("report serializes"),
                    Err(e) => json!({ "error": e.code() }),
                });
            }
            let mut points = serde_json::Map::new();
            for (x, m) in o.point_complexes.iter().enumerate() {
                let label = d.curve.points[x].label.clone();
                let Some(q) = m.q else {
                    points.insert(label, json!("no Frobenius"));
                    continue;
                };
                let mut levels = Vec::new();
                for (i, h) in [h0(m), h1(m)].iter().enumerate() {
                    let Some(fi) = m.group.frobenius_index() else { break };
                    let w = weight_grading_matrix(&h.action[fi], q, m.weight_offset(i))?;
                    levels.push(serde_json::to_value(&w).expect("report serializes"));
                }
                points.insert(label, Value::Array(levels));
            }
            Ok((json!({ "command": "weights", "branches": branches, "points": points }), true))
        }
        Command::Sequence { document, object } => {
            let d = load(document, &mode)?;
            let s = localization_sequence(d.object(object)?)?;
            let terms = s.objects.iter().map(summary).collect::<perverse_core::Result<Vec<_>>>()?;
            Ok((json!({ "command": "sequence", "exact": s.exact, "failures": s.failures, "terms": terms }), s.exact))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli) {
        Ok((v, ok)) => (v, if ok { 0 } else { 1 }),
        Err(Failure::Check(v)) => (v, 1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
