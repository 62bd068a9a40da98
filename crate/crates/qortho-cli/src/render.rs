use crate::{Payload, Table};
use serde_json::Value;

pub fn json(p: &Payload) -> String {
    let mut s = serde_json::to_string_pretty(p).expect("payload serialises");
    s.push('\n');
    s
}

/// `# key=value` comment lines carrying the config header.
fn header_lines(p: &Payload) -> Vec<String> {
    let mut out = vec![format!("# qortho {} schema_version={}", p.command, p.schema_version)];
    if let Some(c) = &p.config {
        out.push(format!(
            "# q={} trunc_depth={} tail_tol={:e} cmp_tol={:e}",
            c.q, c.trunc_depth, c.tail_tol, c.cmp_tol
        ));
        for (k, v) in &c.env {
            out.push(format!("# env {k}={v}"));
        }
    }
    if let Some(f) = &p.family {
        let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push(format!("# family {} {}", f.name, params.join(" ")));
    }
    out.push(format!("# status exit_code={} ok={}", p.status.exit_code, p.status.ok));
    if let Some(m) = &p.status.message {
        out.push(format!("# message {m}"));
    }
    out
}

pub fn csv(p: &Payload, t: &Table) -> String {
    let mut s = header_lines(p).join("\n");
    s.push('\n');
    if t.headers.is_empty() {
        return s;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.headers).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r).expect("in-memory write");
    }
    s.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv"));
    s
}

fn scalar_summary(v: &Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                scalar_summary(x, &key, out);
            }
        }
        Value::Array(_) => {}
        Value::Null => {}
        other => out.push(format!("{prefix}: {other}")),
    }
}

pub fn pretty(p: &Payload, t: &Table) -> String {
    let mut lines: Vec<String> = header_lines(p).into_iter().map(|l| l.trim_start_matches("# ").to_string()).collect();
    let mut scalars = Vec::new();
    scalar_summary(&p.result, "", &mut scalars);
    lines.extend(scalars);
    if !t.headers.is_empty() {
        let widths: Vec<usize> = (0..t.headers.len())
            .map(|c| t.rows.iter().map(|r| r[c].len()).chain([t.headers[c].len()]).max().unwrap_or(0))
            .collect();
        let fmt = |cells: &[String]| -> String {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        lines.push(fmt(&t.headers));
        for r in &t.rows {
            lines.push(fmt(r));
        }
    }
    let mut s = lines.join("\n");
    s.push('\n');
    s
}
