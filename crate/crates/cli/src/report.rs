//! JSON report fragments. Keys come out sorted (serde_json's default map),
//! rationals as canonical strings, so identical inputs give identical bytes.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use rigidline::certify::{LiftVerdict, SuperStabilityCertificate, Verdict};
use rigidline::flex::{FlexPath, FlexWitness};
use rigidline::framework::{Configuration, Framework};
use rigidline::linalg::{MatrixR, PsdCertificate, ViolationKind};
use rigidline::scalar::{format_scalar, Scalar};
use rigidline::stress::{is_infinitesimally_rigid, Stress};

pub const SCHEMA: &str = "rigidline/1";

pub const ONE_SIDED: &str =
    "a certificate proves universal rigidity; failing to find one does not prove flexibility";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn scalars(xs: &[Scalar]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(format_scalar(x))).collect())
}

pub fn matrix(m: &MatrixR) -> Value {
    Value::Array(m.to_rows().iter().map(|r| scalars(r)).collect())
}

pub fn configuration(c: &Configuration) -> Value {
    Value::Array(c.points().iter().map(|p| scalars(p)).collect())
}

pub fn stress(w: &Stress) -> Value {
    scalars(w.values())
}

pub fn framework_summary(f: &Framework) -> Value {
    let v = f.validate();
    let reduced = f.reduce_to_span();
    let rigid = is_infinitesimally_rigid(&reduced).ok();
    let mut out = json!({
        "n": v.n,
        "m": v.m,
        "dimension": v.dim,
        "affine_span": v.affine_span,
        "connected": v.connected,
        "issues": v.issues,
        "infinitesimally_rigid_in_span": rigid,
        "edges": f.graph().edges().iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "coordinates": configuration(f.config()),
    });
    if f.dim() == 1 {
        out["line_order"] = json!(f.config().line_order());
    }
    out
}

pub fn stress_basis(basis: &[Stress]) -> Value {
    Value::Array(basis.iter().map(stress).collect())
}

pub fn psd(c: &PsdCertificate) -> Value {
    let violation = c.violation.as_ref().map(|v| {
        let kind = match &v.kind {
            ViolationKind::NegativePivot { index, value } => {
                json!({"type": "negative-pivot", "index": index + 1, "value": format_scalar(value)})
            }
            ViolationKind::Minor2x2 { i, j, off_diagonal } => {
                json!({"type": "minor-2x2", "i": i + 1, "j": j + 1, "off_diagonal": format_scalar(off_diagonal)})
            }
        };
        json!({"kind": kind, "principal_submatrix": v.indices.iter().map(|i| i + 1).collect::<Vec<_>>()})
    });
    json!({
        "psd": c.is_psd(),
        "rank": c.rank,
        "pivots": c.pivots.iter().map(|(i, d)| json!([i + 1, format_scalar(d)])).collect::<Vec<_>>(),
        "violation": violation,
    })
}

pub fn certificate(c: &SuperStabilityCertificate) -> Value {
    let reason = match &c.verdict {
        Verdict::NotCertified(r) => Some(r.to_string()),
        _ => None,
    };
    json!({
        "verdict": c.verdict.label(),
        "reason": reason,
        "span": c.span,
        "required_rank": c.required_rank,
        "stress": c.stress.as_ref().map(stress),
        "stress_matrix": c.psd.as_ref().map(psd),
        "conic_at_infinity": c.conic.as_ref().map(|q| matrix(&q.q)),
        "search": c.search.as_ref().map(|s| json!({
            "seed": s.seed,
            "stress_space_dim": s.stress_space_dim,
            "candidates_tested": s.candidates_tested,
        })),
        "note": ONE_SIDED,
    })
}

pub fn lift(v: &LiftVerdict) -> Value {
    json!({
        "certified": v.certified,
        "equilibrium_low": v.equilibrium_low,
        "equilibrium_high": v.equilibrium_high,
        "low_satisfies": v.low_satisfies,
        "psd": v.psd,
        "rank": v.rank,
        "required_rank": v.required_rank,
        "high_span": v.high_span,
        "conic_free": v.conic_free,
        "failures": v.failures(),
    })
}

fn points(q: &[[f64; 2]]) -> Value {
    json!(q.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>())
}

pub fn witness(w: &FlexWitness) -> Value {
    json!({
        "linkage": format!("{:?}", w.linkage),
        "backward": w.branch.backward,
        "side": format!("{:?}", w.branch.side),
        "theta": w.theta,
        "points": points(&w.points),
        "retained_residual": w.residual,
        "removed_residual": w.removed_residual,
        "discrepancy": w.discrepancy,
        "span": w.span,
    })
}

pub fn path(p: &FlexPath) -> Value {
    json!({
        "thetas": p.thetas,
        "residuals": p.residuals,
        "removed_gaps": p.removed_gaps,
        "frames": p.poses.iter().map(|q| points(q)).collect::<Vec<_>>(),
    })
}

/// Top-level report skeleton.
pub fn envelope(command: &str, inputs: &[Vec<u8>]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("inputs".into(), json!(inputs.iter().map(|b| sha256_hex(b)).collect::<Vec<_>>()));
    m
}

pub fn to_text(report: &Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
