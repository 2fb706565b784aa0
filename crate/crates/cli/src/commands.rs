use std::fmt::Write as _;
use std::fs;

use num_bigint::BigInt;
use serde_json::{json, Value};

use ckflow::aut::{aut_enumerate, aut_order, cuntz_picard, picard_quotient};
use ckflow::cylinder::{
    verify_ck_relations, verify_corner_transfer, verify_expansion_identities, verify_sse_basis,
    VerificationReport,
};
use ckflow::invariants::{flow_equivalent, flow_invariant, k0_with_unit, FlowInvariant};
use ckflow::io::{group_json, int_json, ints_json, matrix_json, object, parse_matrix, parse_word};
use ckflow::linalg::{det, smith_normal_form};
use ckflow::moves::{
    elementary_split, expand_at_vertex, linking_matrix, search_elementary_factorizations,
    SearchLimits,
};
use ckflow::shift::{admissible_words, edge_matrix, edges_of};
use ckflow::{Error, IntMatrix, MarkovShift, Result};

use crate::{Command, VerifyCommand};

/// What a subcommand produced before rendering.
struct Outcome {
    inputs: Value,
    result: Value,
    certificates: Value,
    /// `Some` for decision subcommands; `false` maps to exit code 1.
    decision: Option<bool>,
    summary: String,
}

impl Outcome {
    fn new(inputs: Value, result: Value, summary: String) -> Self {
        Self {
            inputs,
            result,
            certificates: json!({}),
            decision: None,
            summary,
        }
    }

    fn certificates(mut self, c: Value) -> Self {
        self.certificates = c;
        self
    }

    fn decision(mut self, d: bool) -> Self {
        self.decision = Some(d);
        self
    }
}

/// Runs a subcommand and returns the JSON document, the human summary and
/// the exit code.
pub fn run(command: &Command) -> (Value, String, u8) {
    let name = command_name(command);
    match execute(command) {
        Ok(out) => {
            let code = match out.decision {
                Some(false) => 1,
                _ => 0,
            };
            let doc = json!({
                "command": name,
                "inputs": out.inputs,
                "result": out.result,
                "certificates": out.certificates,
            });
            (doc, out.summary, code)
        }
        Err(e) => {
            let code = if e.is_resource_limit() { 3 } else { 2 };
            let doc = json!({
                "command": name,
                "error": { "kind": error_kind(&e), "message": e.to_string() },
            });
            eprintln!("error: {e}");
            (doc, format!("error: {e}"), code)
        }
    }
}

fn command_name(command: &Command) -> String {
    let name = match command {
        Command::Bf(_) => "bf",
        Command::Det(_) => "det",
        Command::Snf(_) => "snf",
        Command::Floweq { .. } => "floweq",
        Command::Edge(_) => "edge",
        Command::Words { .. } => "words",
        Command::Expand { .. } => "expand",
        Command::Elem { .. } => "elem",
        Command::Ssesearch { .. } => "ssesearch",
        Command::K0(_) => "k0",
        Command::Autord { .. } => "autord",
        Command::Picquot { .. } => "picquot",
        Command::Cuntz { .. } => "cuntz",
        Command::Verify(v) => {
            return format!(
                "verify {}",
                match v {
                    VerifyCommand::Ck(_) => "ck",
                    VerifyCommand::Expansion { .. } => "expansion",
                    VerifyCommand::Sse { .. } => "sse",
                    VerifyCommand::Corner { .. } => "corner",
                }
            )
        }
    };
    name.to_string()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::NotSquare { .. } => "not_square",
        Error::EmptyMatrix => "empty_matrix",
        Error::NegativeEntry { .. } => "negative_entry",
        Error::Reducible => "reducible",
        Error::PermutationMatrix => "permutation_matrix",
        Error::NotZeroOne => "not_zero_one",
        Error::BadVertex { .. } => "bad_vertex",
        Error::FactorizationMismatch => "factorization_mismatch",
        Error::NotAnExpansion(_) => "not_an_expansion",
        Error::ResourceLimit(_) => "resource_limit",
        Error::InfiniteGroup { .. } => "infinite_group",
        Error::AmbientMismatch => "ambient_mismatch",
        Error::InadmissibleWord(_) => "inadmissible_word",
        Error::BadProjection(_) => "bad_projection",
        Error::NoAdmissibleChoice(_) => "no_admissible_choice",
        Error::SearchExhausted(_) => "search_exhausted",
        Error::StepFailed { .. } => "step_failed",
        Error::BadElement(_) => "bad_element",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Parse(_) => "parse",
    }
}

/// Inline literal if the argument looks like JSON, otherwise a file path.
fn load_matrix(arg: &str) -> Result<IntMatrix> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        return parse_matrix(arg);
    }
    let text = fs::read_to_string(arg)
        .map_err(|e| Error::Parse(format!("cannot read matrix file '{arg}': {e}")))?;
    parse_matrix(&text)
}

fn load_shift(arg: &str) -> Result<MarkovShift> {
    MarkovShift::validate(load_matrix(arg)?)
}

/// 1-based vertex from the command line to a 0-based index.
fn vertex_index(vertex: usize, size: usize) -> Result<usize> {
    if vertex == 0 || vertex > size {
        return Err(Error::InvalidArgument(format!(
            "vertex {vertex} is out of range 1..={size}"
        )));
    }
    Ok(vertex - 1)
}

fn invariant_json(inv: &FlowInvariant) -> Value {
    json!({ "bowen_franks": group_json(&inv.bf), "det": int_json(&inv.det_value) })
}

fn snf_json(m: &IntMatrix) -> Value {
    let snf = smith_normal_form(m);
    json!({
        "diagonal": ints_json(&snf.diagonal()),
        "u": matrix_json(&snf.u),
        "v": matrix_json(&snf.v),
    })
}

fn matrix_input(name: &str, m: &IntMatrix) -> Value {
    object([(name, matrix_json(m))])
}

fn report_json(r: &VerificationReport) -> (Value, Value) {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "holds": c.holds }))
        .collect();
    let choices = object(r.choices.iter().map(|(k, w)| (k.clone(), json!(w))));
    (
        json!({ "passed": r.passed(), "checks": checks }),
        json!({ "choices": choices }),
    )
}

fn report_summary(title: &str, r: &VerificationReport) -> String {
    let mut s = format!(
        "{title}: {}\n",
        if r.passed() {
            "all checks hold"
        } else {
            "FAILED"
        }
    );
    for c in &r.checks {
        let _ = writeln!(s, "  [{}] {}", if c.holds { "ok" } else { "FAIL" }, c.name);
    }
    for (k, w) in &r.choices {
        let _ = writeln!(s, "  {k} = {w}");
    }
    s.trim_end().to_string()
}

fn verification(inputs: Value, title: &str, r: &VerificationReport) -> Outcome {
    let (result, certificates) = report_json(r);
    Outcome::new(inputs, result, report_summary(title, r))
        .certificates(certificates)
        .decision(r.passed())
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Bf(m) => {
            let shift = load_shift(&m.matrix)?;
            let inv = flow_invariant(&shift)?;
            let i_minus_a = shift.matrix().identity_minus()?;
            Ok(Outcome::new(
                matrix_input("matrix", shift.matrix()),
                group_json(&inv.bf),
                format!("BF = {}", inv.bf),
            )
            .certificates(
                json!({ "i_minus_a": matrix_json(&i_minus_a), "smith": snf_json(&i_minus_a) }),
            ))
        }
        Command::Det(m) => {
            let shift = load_shift(&m.matrix)?;
            let i_minus_a = shift.matrix().identity_minus()?;
            let d = det(&i_minus_a)?;
            Ok(Outcome::new(
                matrix_input("matrix", shift.matrix()),
                int_json(&d),
                format!("det(I - A) = {d}"),
            )
            .certificates(json!({ "i_minus_a": matrix_json(&i_minus_a) })))
        }
        Command::Snf(m) => {
            let matrix = load_matrix(&m.matrix)?;
            let snf = smith_normal_form(&matrix);
            let diag = snf.diagonal();
            let rendered: Vec<String> = diag.iter().map(ToString::to_string).collect();
            Ok(Outcome::new(
                matrix_input("matrix", &matrix),
                json!({ "diagonal": ints_json(&diag), "d": matrix_json(&snf.d) }),
                format!("diagonal = [{}]", rendered.join(", ")),
            )
            .certificates(json!({ "u": matrix_json(&snf.u), "v": matrix_json(&snf.v) })))
        }
        Command::Floweq { a, b } => {
            let (sa, sb) = (load_shift(a)?, load_shift(b)?);
            let (eq, cmp) = flow_equivalent(&sa, &sb)?;
            let summary = format!(
                "{}: BF {} vs {}, det {} vs {}",
                if eq {
                    "flow equivalent"
                } else {
                    "not flow equivalent"
                },
                cmp.left.bf,
                cmp.right.bf,
                cmp.left.det_value,
                cmp.right.det_value
            );
            Ok(Outcome::new(
                json!({ "a": matrix_json(sa.matrix()), "b": matrix_json(sb.matrix()) }),
                json!({
                    "equivalent": eq,
                    "bf_match": cmp.bf_match,
                    "det_match": cmp.det_match,
                }),
                summary,
            )
            .certificates(
                json!({ "a": invariant_json(&cmp.left), "b": invariant_json(&cmp.right) }),
            )
            .decision(eq))
        }
        Command::Edge(m) => {
            let shift = load_shift(&m.matrix)?;
            let (g, edges) = edge_matrix(&shift)?;
            let labels: Vec<String> = edges.iter().map(ToString::to_string).collect();
            Ok(Outcome::new(
                matrix_input("matrix", shift.matrix()),
                json!({ "matrix": matrix_json(g.matrix()), "edges": labels }),
                format!("edges {}\n{}", labels.join(" "), g.matrix()),
            ))
        }
        Command::Words {
            matrix,
            length,
            cap,
        } => {
            let shift = load_shift(matrix)?;
            let labels: Vec<String> = edges_of(shift.matrix())?
                .iter()
                .map(ToString::to_string)
                .collect();
            let words = admissible_words(&shift, *length, *cap)?;
            let rendered: Vec<String> = words
                .iter()
                .map(|w| {
                    w.symbols()
                        .iter()
                        .map(|&s| labels[s].as_str())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            let summary = format!("{} words of length {length}", words.len());
            Ok(Outcome::new(
                json!({ "matrix": matrix_json(shift.matrix()), "length": length, "cap": cap }),
                json!({ "count": words.len(), "words": rendered }),
                summary,
            ))
        }
        Command::Expand { matrix, vertex } => {
            let shift = load_shift(matrix)?;
            let v = vertex_index(*vertex, shift.size())?;
            let expanded = expand_at_vertex(&shift, v)?;
            let before = flow_invariant(&shift)?;
            let after = flow_invariant(&expanded)?;
            Ok(Outcome::new(
                json!({ "matrix": matrix_json(shift.matrix()), "vertex": vertex }),
                json!({ "matrix": matrix_json(expanded.matrix()) }),
                format!("{}", expanded.matrix()),
            )
            .certificates(json!({
                "invariants_before": invariant_json(&before),
                "invariants_after": invariant_json(&after),
            })))
        }
        Command::Elem { a, c, d } => {
            let (a, c, d) = (load_matrix(a)?, load_matrix(c)?, load_matrix(d)?);
            let (b, _) = elementary_split(&a, &c, &d)?;
            let z = linking_matrix(&c, &d)?;
            Ok(Outcome::new(
                json!({ "a": matrix_json(&a), "c": matrix_json(&c), "d": matrix_json(&d) }),
                json!({ "b": matrix_json(&b) }),
                format!("B = DC = {b}"),
            )
            .certificates(json!({
                "linking_matrix": matrix_json(&z),
                "linking_square": matrix_json(&z.multiply(&z)?),
            })))
        }
        Command::Ssesearch {
            matrix,
            max_inner,
            max_entry,
            node_budget,
        } => {
            let a = load_matrix(matrix)?;
            let limits = SearchLimits {
                max_inner: *max_inner,
                max_entry: *max_entry,
                node_budget: *node_budget,
            };
            let found = search_elementary_factorizations(&a, &limits)?;
            let mut list = Vec::with_capacity(found.len());
            let mut summary = format!("{} factorizations", found.len());
            for (c, d) in &found {
                let b = d.multiply(c)?;
                let _ = write!(summary, "\n  C = {c}, D = {d}, DC = {b}");
                list.push(
                    json!({ "c": matrix_json(c), "d": matrix_json(d), "b": matrix_json(&b) }),
                );
            }
            Ok(Outcome::new(
                json!({
                    "matrix": matrix_json(&a),
                    "max_inner": max_inner,
                    "max_entry": max_entry,
                    "node_budget": node_budget,
                }),
                json!({ "count": found.len(), "factorizations": list }),
                summary,
            ))
        }
        Command::K0(m) => {
            let shift = load_shift(&m.matrix)?;
            let k = k0_with_unit(&shift)?;
            let unit: Vec<String> = k.unit.iter().map(ToString::to_string).collect();
            Ok(Outcome::new(
                matrix_input("matrix", shift.matrix()),
                json!({ "group": group_json(&k.group), "unit": ints_json(&k.unit) }),
                format!("K0 = {}, [1] = ({})", k.group, unit.join(", ")),
            )
            .certificates(
                json!({ "smith": snf_json(&shift.matrix().transpose().identity_minus()?) }),
            ))
        }
        Command::Autord {
            matrix,
            enumerate,
            limit,
        } => {
            let shift = load_shift(matrix)?;
            let k = k0_with_unit(&shift)?;
            let order = aut_order(&k.group)?;
            let mut result =
                json!({ "group": group_json(&k.group), "aut_order": int_json(&order) });
            let mut summary = format!("|Aut({})| = {order}", k.group);
            if *enumerate {
                let count = aut_enumerate(&k.group, *limit)?.len();
                result["enumerated"] = json!(count);
                let _ = write!(summary, " (enumerated {count})");
            }
            Ok(Outcome::new(
                json!({ "matrix": matrix_json(shift.matrix()), "enumerate": enumerate, "limit": limit }),
                result,
                summary,
            ))
        }
        Command::Picquot { matrix, limit } => {
            let shift = load_shift(matrix)?;
            let pq = picard_quotient(&shift, *limit)?;
            let reps: Vec<Value> = pq
                .representatives
                .iter()
                .map(|(xi, image)| json!({ "matrix": xi.matrix(), "unit_image": image }))
                .collect();
            let summary = format!(
                "K0 = {}, |Aut| = {}, |Aut1| = {}, quotient order {}",
                pq.k0.group, pq.aut_order, pq.aut1_order, pq.quotient_order
            );
            Ok(Outcome::new(
                json!({ "matrix": matrix_json(shift.matrix()), "limit": limit }),
                json!({
                    "k0": group_json(&pq.k0.group),
                    "unit": ints_json(&pq.k0.unit),
                    "aut_order": int_json(&pq.aut_order),
                    "aut1_order": int_json(&pq.aut1_order),
                    "quotient_order": int_json(&pq.quotient_order),
                }),
                summary,
            )
            .certificates(json!({ "coset_representatives": reps })))
        }
        Command::Cuntz { n } => {
            let c = cuntz_picard(*n)?;
            let mut summary = format!(
                "K0(O_{n}) = {}, quotient {} of order {}",
                c.group, c.quotient, c.quotient_order
            );
            if let Some(k) = c.cyclic_quotient_order {
                let _ = write!(summary, " (N - 1 prime: cyclic of order {k})");
            }
            Ok(Outcome::new(
                json!({ "n": n }),
                json!({
                    "k0": group_json(&c.group),
                    "unit": ints_json(&c.unit),
                    "aut_order": int_json(&c.aut_order),
                    "aut1_order": int_json(&c.aut1_order),
                    "quotient_order": int_json(&c.quotient_order),
                    "quotient": group_json(&c.quotient),
                    "cyclic_quotient_order": c.cyclic_quotient_order,
                }),
                summary,
            )
            .certificates(json!({
                "bowen_franks": group_json(&c.group),
                "det": int_json(&(BigInt::from(1) - BigInt::from(*n))),
            })))
        }
        Command::Verify(v) => execute_verify(v),
    }
}

fn execute_verify(command: &VerifyCommand) -> Result<Outcome> {
    match command {
        VerifyCommand::Ck(m) => {
            let shift = load_shift(&m.matrix)?;
            let r = verify_ck_relations(&shift)?;
            Ok(verification(
                matrix_input("matrix", shift.matrix()),
                "relations",
                &r,
            ))
        }
        VerifyCommand::Expansion { matrix, vertex } => {
            let shift = load_shift(matrix)?;
            let v = vertex_index(*vertex, shift.size())?;
            let r = verify_expansion_identities(&shift, v)?;
            Ok(verification(
                json!({ "matrix": matrix_json(shift.matrix()), "vertex": vertex }),
                "expansion identities",
                &r,
            ))
        }
        VerifyCommand::Sse { c, d } => {
            let (c, d) = (load_matrix(c)?, load_matrix(d)?);
            let r = verify_sse_basis(&c, &d)?;
            Ok(verification(
                json!({ "c": matrix_json(&c), "d": matrix_json(&d) }),
                "relative bases",
                &r,
            ))
        }
        VerifyCommand::Corner {
            matrix,
            words,
            max_len,
        } => {
            let shift = load_shift(matrix)?;
            let labels: Vec<String> = edges_of(shift.matrix())?
                .iter()
                .map(ToString::to_string)
                .collect();
            let parsed = words
                .iter()
                .map(|w| parse_word(w, &labels))
                .collect::<Result<Vec<_>>>()?;
            let r = verify_corner_transfer(&shift, &parsed, *max_len)?;
            Ok(verification(
                json!({ "matrix": matrix_json(shift.matrix()), "words": words, "max_len": max_len }),
                "corner transfer",
                &r,
            ))
        }
    }
}
