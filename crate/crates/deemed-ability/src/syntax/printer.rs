//! Concrete-syntax printers.
//!
//! Binary connectives print with explicit parentheses, so every printed
//! formula re-parses to the same tree without precedence bookkeeping.

use super::{StaticFormula, TemporalFormula};

/// Prints a static formula in concrete syntax, e.g. `(Conf{a} p -> Dabl{a} p)`.
pub fn print_static(f: &StaticFormula) -> String {
    let mut out = String::new();
    write_static(f, &mut out);
    out
}

fn write_static(f: &StaticFormula, out: &mut String) {
    use StaticFormula::*;
    match f {
        Prop(p) => out.push_str(p),
        Top => out.push('T'),
        Bottom => out.push_str("_|_"),
        Not(x) => {
            out.push('!');
            write_static(x, out);
        }
        And(l, r) => write_static_infix(l, "&", r, out),
        Or(l, r) => write_static_infix(l, "|", r, out),
        Implies(l, r) => write_static_infix(l, "->", r, out),
        Dabl(g, x) => write_modality("Dabl", g, x, out),
        Conf(g, x) => write_modality("Conf", g, x, out),
        Disc(g, x) => write_modality("Disc", g, x, out),
        Brings(g, x) => write_modality("E", g, x, out),
        Attempts(g, x) => write_modality("Att", g, x, out),
        Task(g, a, b) => write_binary_modality("Task", g, a, b, out),
        Agree(g, a, b) => write_binary_modality("Agree", g, a, b, out),
    }
}

fn write_static_infix(l: &StaticFormula, op: &str, r: &StaticFormula, out: &mut String) {
    out.push('(');
    write_static(l, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_static(r, out);
    out.push(')');
}

fn write_modality(name: &str, g: &super::Group, x: &StaticFormula, out: &mut String) {
    out.push_str(name);
    out.push_str(&g.to_string());
    out.push(' ');
    write_static(x, out);
}

fn write_binary_modality(
    name: &str,
    g: &super::Group,
    a: &StaticFormula,
    b: &StaticFormula,
    out: &mut String,
) {
    out.push_str(name);
    out.push_str(&g.to_string());
    out.push('(');
    write_static(a, out);
    out.push_str("; ");
    write_static(b, out);
    out.push(')');
}

/// Prints a temporal formula in concrete syntax. Sugar is not re-folded:
/// what prints is the stored core-constructor expansion.
pub fn print_temporal(f: &TemporalFormula) -> String {
    let mut out = String::new();
    write_temporal(f, &mut out);
    out
}

fn write_temporal(f: &TemporalFormula, out: &mut String) {
    use TemporalFormula::*;
    match f {
        Mono(m) => write_static(m, out),
        Not(x) => {
            out.push('!');
            write_temporal(x, out);
        }
        And(l, r) => write_temporal_infix(l, "&", r, out),
        Until(l, r) => write_temporal_infix(l, "U", r, out),
        Since(l, r) => write_temporal_infix(l, "S", r, out),
    }
}

fn write_temporal_infix(l: &TemporalFormula, op: &str, r: &TemporalFormula, out: &mut String) {
    out.push('(');
    write_temporal(l, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_temporal(r, out);
    out.push(')');
}

/// Constructor-form rendering of a static formula, e.g.
/// `Implies(And(Conf({a}, Prop p), Disc({a}, Prop p)), Bottom)`.
pub fn ast_static(f: &StaticFormula) -> String {
    use StaticFormula::*;
    match f {
        Prop(p) => format!("Prop {p}"),
        Top => "Top".to_string(),
        Bottom => "Bottom".to_string(),
        Not(x) => format!("Not({})", ast_static(x)),
        And(l, r) => format!("And({}, {})", ast_static(l), ast_static(r)),
        Or(l, r) => format!("Or({}, {})", ast_static(l), ast_static(r)),
        Implies(l, r) => format!("Implies({}, {})", ast_static(l), ast_static(r)),
        Dabl(g, x) => format!("Dabl({g}, {})", ast_static(x)),
        Conf(g, x) => format!("Conf({g}, {})", ast_static(x)),
        Disc(g, x) => format!("Disc({g}, {})", ast_static(x)),
        Brings(g, x) => format!("Brings({g}, {})", ast_static(x)),
        Attempts(g, x) => format!("Attempts({g}, {})", ast_static(x)),
        Task(g, a, b) => format!("Task({g}, {}, {})", ast_static(a), ast_static(b)),
        Agree(g, a, b) => format!("Agree({g}, {}, {})", ast_static(a), ast_static(b)),
    }
}

/// Constructor-form rendering of a temporal formula.
pub fn ast_temporal(f: &TemporalFormula) -> String {
    use TemporalFormula::*;
    match f {
        Mono(m) => format!("Mono({})", ast_static(m)),
        Not(x) => format!("Not({})", ast_temporal(x)),
        And(l, r) => format!("And({}, {})", ast_temporal(l), ast_temporal(r)),
        Until(l, r) => format!("Until({}, {})", ast_temporal(l), ast_temporal(r)),
        Since(l, r) => format!("Since({}, {})", ast_temporal(l), ast_temporal(r)),
    }
}
