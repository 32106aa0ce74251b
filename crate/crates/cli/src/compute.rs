use std::collections::BTreeMap;
use std::fs;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use ahss_core::forms::{approx_integral, approx_rational, parse_form_records, ParsedForm};
use ahss_core::simpcomplex::{resolve_space, SimplicialComplex};
use ahss_core::sseq::{
    ahss_bundle, bockstein_compare, e1_page, leibniz_check, run_with, theory, RunOptions, SseqError, TheorySpec,
};
use ahss_core::steenrod::{adem_reduce, parse_expression};

use crate::ComputeArgs;

/// Largest denominator tried when deciding whether approximate periods are rational.
const MAX_DENOMINATOR: u32 = 1000;

pub fn load_space(spec: &str) -> Result<Arc<SimplicialComplex>> {
    Ok(Arc::new(resolve_space(spec).with_context(|| format!("space '{spec}'"))?))
}

/// The integral theory whose flat rows a differential theory refines.
pub fn integral_partner(t: &TheorySpec) -> Option<TheorySpec> {
    let (name, level) = match t.id.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (t.id.as_str(), None),
    };
    let id = match (name, level) {
        ("diffK0", None) => "K0".to_string(),
        ("diffK1", None) => "K1".to_string(),
        ("diffMoravaInt", Some(n)) => format!("MoravaInt:{n}"),
        _ => return None,
    };
    theory(&id).ok()
}

fn e1_json(x: &Arc<SimplicialComplex>, t: &TheorySpec) -> Result<Value> {
    let e1 = e1_page(x, t)?;
    let mut entries = BTreeMap::new();
    let mut homology = BTreeMap::new();
    for (&(p, q), g) in &e1.entries {
        entries.insert(format!("{p},{q}"), serde_json::to_value(g)?);
        let h = e1.homology(p as usize, q);
        if !h.is_zero() {
            homology.insert(format!("{p},{q}"), serde_json::to_value(&h)?);
        }
    }
    Ok(json!({ "entries": entries, "homology": homology }))
}

pub fn run(args: &ComputeArgs) -> Result<u8> {
    let x = load_space(&args.space)?;
    let t = theory(&args.theory)?;
    let mut exact = Vec::new();
    let mut approx = Vec::new();
    if let Some(path) = &args.forms {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for rec in parse_form_records(&text)? {
            match rec.attach(&x, args.tolerance)? {
                ParsedForm::Exact(f) => exact.push(f),
                ParsedForm::Approx(f) => approx.push(f),
            }
        }
    }
    let ss = match &args.fiber {
        Some(f) => {
            if args.forms.is_some() {
                bail!("--forms cannot be combined with --fiber");
            }
            ahss_bundle(&x, &load_space(f)?, &t)?
        }
        None => run_with(&x, &t, RunOptions { max_page: args.max_page, forms: exact, ..RunOptions::default() })?,
    };
    let report = ss.report();
    let unresolved = !report.unresolved.is_empty();
    let report = if args.all_differentials { report } else { report.nonzero_only() };
    let mut out = serde_json::to_value(&report)?;
    let obj = out.as_object_mut().expect("report is an object");
    if !approx.is_empty() {
        let mut list = Vec::new();
        for f in &approx {
            let periods = f.periods(args.tolerance)?;
            list.push(json!({
                "degree": f.degree,
                "periods": periods,
                "integral_periods": approx_integral(&periods, args.tolerance),
                "rational_periods": approx_rational(&periods, args.tolerance, MAX_DENOMINATOR),
            }));
        }
        obj.insert("approximate_forms".into(), Value::Array(list));
    }
    if args.emit_e1 {
        obj.insert("E1".into(), e1_json(&x, &t)?);
    }
    if args.check_bockstein {
        let Some(int) = integral_partner(&t) else {
            bail!("--check-bockstein needs diffK0, diffK1 or diffMoravaInt:n, not {}", t.id);
        };
        let flat = run_with(&x, &t, RunOptions { max_page: args.max_page, ..RunOptions::default() })?;
        let ints = run_with(&x, &int, RunOptions { max_page: args.max_page, ..RunOptions::default() })?;
        match bockstein_compare(&flat, &ints) {
            Ok(rep) => {
                obj.insert("bockstein".into(), serde_json::to_value(&rep)?);
            }
            Err(e @ SseqError::CommutationFailure { .. }) => {
                obj.insert("bockstein".into(), json!({ "error": e.to_string() }));
                write(args, &out)?;
                return Ok(3);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if args.check_leibniz {
        let rep = leibniz_check(&t, &x, 50, 0)?;
        obj.insert("leibniz".into(), serde_json::to_value(&rep)?);
        if !rep.passed() {
            write(args, &out)?;
            return Ok(3);
        }
    }
    write(args, &out)?;
    Ok(if unresolved { 2 } else { 0 })
}

fn write(args: &ComputeArgs, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &args.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn ops(expr: &str) -> Result<u8> {
    let e = parse_expression(expr)?;
    println!("{}", adem_reduce(&e));
    Ok(0)
}
