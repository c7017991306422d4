use std::fmt::Write;

use crate::model::{BinOp, Expr, Model, Property, Scope, Value};

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Ite(..) => 1,
        Expr::Binary(op, ..) => binop_prec(*op),
        Expr::Not(_) => 8,
        Expr::Int(i) if *i < 0 => 8,
        _ => 9,
    }
}

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => 2,
        BinOp::Or => 3,
        BinOp::And => 4,
        BinOp::Eq | BinOp::Ne => 5,
        BinOp::Lt | BinOp::Le => 6,
        BinOp::Add | BinOp::Sub => 7,
    }
}

fn write_at(out: &mut String, model: &Model, e: &Expr, min: u8) {
    if prec(e) < min {
        out.push('(');
        write_expr(out, model, e);
        out.push(')');
    } else {
        write_expr(out, model, e);
    }
}

fn write_expr(out: &mut String, model: &Model, e: &Expr) {
    match e {
        Expr::Bool(b) => write!(out, "{b}").unwrap(),
        Expr::Int(i) => write!(out, "{i}").unwrap(),
        Expr::Sym(t, i) => out.push_str(t.name(*i)),
        Expr::Var(v) => match v.scope {
            Scope::Next => write!(out, "next({})", model.var_name(*v)).unwrap(),
            _ => out.push_str(model.var_name(*v)),
        },
        Expr::Not(a) => {
            out.push('!');
            write_at(out, model, a, 8);
        }
        Expr::Binary(op, a, b) => {
            let p = binop_prec(*op);
            // `=>` associates to the right, everything else to the left
            let (lp, rp) = if *op == BinOp::Implies { (p + 1, p) } else { (p, p + 1) };
            write_at(out, model, a, lp);
            write!(out, " {} ", op.symbol()).unwrap();
            write_at(out, model, b, rp);
        }
        Expr::Ite(c, t, f) => {
            write_at(out, model, c, 2);
            out.push_str(" ? ");
            write_at(out, model, t, 1);
            out.push_str(" : ");
            write_at(out, model, f, 1);
        }
    }
}

pub fn print_expr(model: &Model, e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, model, e);
    out
}

pub fn print_model(model: &Model) -> String {
    let mut out = String::new();
    writeln!(out, "model {} {{", model.name()).unwrap();
    for v in model.state_vars() {
        write!(out, "  state {} : {}", v.name, v.domain).unwrap();
        if let Some(init) = v.init {
            let text = match init {
                Value::Sym(_) => v.domain.format_value(init),
                other => other.to_string(),
            };
            write!(out, " init {text}").unwrap();
        }
        out.push_str(";\n");
    }
    for v in model.inputs() {
        writeln!(out, "  input {} : {};", v.name, v.domain).unwrap();
    }
    let clauses = [
        ("init", model.init_predicate()),
        ("assume", model.input_assumption()),
        ("invariant", model.state_invariant()),
    ];
    for (kw, e) in clauses {
        if *e != Expr::tt() {
            writeln!(out, "  {kw} {};", print_expr(model, e)).unwrap();
        }
    }
    let assigns: Vec<String> = (0..model.state_vars().len())
        .filter_map(|i| {
            model.transition(i).map(|e| format!("    {}' = {};\n", model.state_vars()[i].name, print_expr(model, e)))
        })
        .collect();
    if !assigns.is_empty() {
        out.push_str("  trans {\n");
        assigns.iter().for_each(|a| out.push_str(a));
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

pub fn print_properties(model: &Model, props: &[Property]) -> String {
    let mut out = String::new();
    for p in props {
        writeln!(
            out,
            "property {} {{ assume {}; assert {}; }}",
            p.name,
            print_expr(model, &p.assume),
            print_expr(model, &p.assert)
        )
        .unwrap();
    }
    out
}
