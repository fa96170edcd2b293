use std::sync::Arc;

use lgb_core::algebra::FrobeniusAlgebra;
use lgb_core::equivalence::{describe_certificate, search_linear_equivalence, verify_substitution, EquivalenceResult};
use lgb_core::isomorphism::{
    combine_isomorphisms, extend_isomorphism, solve_scaling_iso, verify_frobenius_iso, Algebra, FrobeniusMap,
    ScalingOutcome, ScalingSolution,
};
use lgb_core::kernel::rational::fmt_rat;
use lgb_core::kernel::{Monomial, Polynomial, Rational};
use lgb_core::milnor::{verify_frobenius, MilnorRing};
use lgb_core::orbifold::{
    build_bmodel_with, describe_sectors, restrict_polynomial, verify_bmodel_axioms, BModelOptions,
};
use lgb_core::selftest::run_selftest;
use lgb_core::structure::{block_summand, classify, is_admissible, variable_blocks, webb_applicable};
use lgb_core::symmetry::{is_well_behaved, max_symmetry_group, sl_subgroup, subgroup_generated, SymmetryGroup};
use lgb_core::Exec;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::problem::{MapFile, Problem};
use crate::report::{self, Report};
use crate::CliError;

fn echo(p: &Problem) -> Value {
    json!({
        "polynomials": p.polys,
        "vars": p.vars,
        "group": p.group,
        "map": p.map.as_ref().map(|m| m.display().to_string()),
    })
}

fn first(p: &Problem) -> Result<Polynomial, CliError> {
    Ok(p.polynomials()?.remove(0))
}

fn group_for(w: &Polynomial, p: &Problem) -> Result<SymmetryGroup, CliError> {
    let gens = p.generators()?;
    if gens.is_empty() {
        Ok(SymmetryGroup::trivial(w.nvars()))
    } else {
        Ok(subgroup_generated(w, &gens)?)
    }
}

fn group_json(g: &SymmetryGroup) -> Value {
    json!({
        "order": g.order(),
        "generators": g.generators().iter().map(|e| report::rationals(e.phases())).collect::<Vec<_>>(),
    })
}

fn group_text(g: &SymmetryGroup) -> String {
    let gens: Vec<String> = g.generators().iter().map(|e| e.to_string()).collect();
    format!("order {} generated by {}", g.order(), if gens.is_empty() { "nothing".into() } else { gens.join(", ") })
}

pub fn analyze(p: &Problem) -> Result<Report, CliError> {
    let w = first(p)?;
    let mut r = Report::new("analyze", echo(p));
    r.set("polynomial", w.to_string());
    r.line(format!("W = {w}"));
    let q = match is_admissible(&w) {
        Ok(q) => q,
        Err(f) => {
            r.set("admissible", false);
            r.set("failed_clause", f.clause());
            r.set("reason", f.to_string());
            r.line(format!("admissible: no ({} clause: {f})", f.clause()));
            return Ok(r);
        }
    };
    r.set("admissible", true);
    r.set("weights", report::rationals(&q.q));
    r.set("central_charge", report::rational(&q.central_charge()));
    r.set("milnor_number", report::rational(&q.milnor_number()));
    let class = classify(&w)?;
    let names = w.vars().names();
    let blocks: Vec<Value> = class
        .blocks
        .iter()
        .map(|b| {
            json!({
                "kind": b.kind.to_string(),
                "vars": b.vars.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                "summand": b.summand.to_string(),
                "exponents": b.exponents,
            })
        })
        .collect();
    r.set("invertible", class.invertible);
    r.set("blocks", blocks);
    let webb = webb_applicable(&w)?;
    let witness = webb.witness.as_ref().map(|m| m.display(names).to_string());
    r.set("webb_applicable", webb.applicable);
    r.set("webb_witness", witness.clone());
    let gmax = max_symmetry_group(&w)?;
    let sl = sl_subgroup(&gmax);
    r.set("g_max", group_json(&gmax));
    r.set("sl", group_json(&sl));

    let mut rows = vec![
        ("admissible".to_string(), "yes".to_string()),
        ("weights".into(), q.to_string()),
        ("central charge".into(), fmt_rat(&q.central_charge())),
        ("milnor number".into(), fmt_rat(&q.milnor_number())),
        ("invertible".into(), if class.invertible { "yes" } else { "no" }.into()),
    ];
    for b in &class.blocks {
        let vs: Vec<&str> = b.vars.iter().map(|&i| names[i].as_str()).collect();
        rows.push((format!("block {}", vs.join(",")), format!("{} {}", b.kind, b.summand)));
    }
    rows.push((
        "webb".into(),
        match &witness {
            None => "applicable".into(),
            Some(m) => format!("not applicable (witness {m})"),
        },
    ));
    rows.push(("G_max".into(), group_text(&gmax)));
    rows.push(("SL(W)".into(), group_text(&sl)));
    r.text.extend(report::table(&rows));
    Ok(r)
}

pub fn milnor(p: &Problem, exec: Exec) -> Result<Report, CliError> {
    let w = first(p)?;
    let ring = MilnorRing::with_exec(&w, exec)?;
    let mut r = Report::new("milnor", echo(p));
    let names = w.vars().names();
    let basis: Vec<String> = ring.basis().iter().map(|m| m.display(names).to_string()).collect();
    let (h, top) = ring.hessian_nf();
    let hess = format!("{h}*{}", top.display(names));
    let pairing: Vec<Vec<Value>> =
        ring.pairing_matrix().iter().map(|row| row.iter().map(report::scalar).collect()).collect();
    let degrees: Vec<Value> = (0..ring.mu()).map(|i| report::rational(ring.degree(i))).collect();
    let axioms = verify_frobenius(&ring, exec);
    r.set("polynomial", w.to_string());
    r.set("mu", ring.mu());
    r.set("c_hat", report::rational(ring.c_hat()));
    r.set("basis", basis.clone());
    r.set("degrees", degrees);
    r.set("hessian", hess.clone());
    r.set("pairing", pairing);
    r.set("axioms", report::checks(&axioms.checks));
    r.line(format!("W = {w}"));
    r.text.extend(report::table(&[
        ("mu".into(), ring.mu().to_string()),
        ("c_hat".into(), fmt_rat(ring.c_hat())),
        ("hessian".into(), hess),
    ]));
    r.line("basis (degree):");
    for (i, b) in basis.iter().enumerate() {
        r.line(format!("  {b:<12} {}", fmt_rat(ring.degree(i))));
    }
    r.line("nonzero pairings:");
    for i in 0..ring.mu() {
        for j in i..ring.mu() {
            let c = ring.pairing(i, j);
            if !c.is_zero() {
                r.line(format!("  <{}, {}> = {c}", basis[i], basis[j]));
            }
        }
    }
    r.line("axioms:");
    r.text.extend(report::check_lines(&axioms.checks));
    if !axioms.passed() {
        r.finding();
    }
    Ok(r)
}

pub fn symmetry(p: &Problem) -> Result<Report, CliError> {
    let w = first(p)?;
    let mut r = Report::new("symmetry", echo(p));
    let gmax = max_symmetry_group(&w)?;
    let sl = sl_subgroup(&gmax);
    r.set("g_max", group_json(&gmax));
    r.set("sl", group_json(&sl));
    r.line(format!("W = {w}"));
    let mut rows = vec![("G_max".to_string(), group_text(&gmax)), ("SL(W)".into(), group_text(&sl))];
    if p.group.is_some() {
        let g = group_for(&w, p)?;
        let wb = is_well_behaved(&w, &g);
        let names = w.vars().names();
        let blocks: Vec<Vec<String>> =
            wb.blocks.iter().map(|b| b.iter().map(|&i| names[i].clone()).collect()).collect();
        r.set(
            "group",
            json!({
                "order": g.order(),
                "in_sl": g.in_sl(),
                "elements": g.elements().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "well_behaved": wb.verdict,
                "blocks": blocks,
                "factor_orders": wb.factors.iter().map(|f| f.order()).collect::<Vec<_>>(),
                "failure": wb.failure.as_ref().map(|f| f.to_string()),
            }),
        );
        rows.push(("G".into(), group_text(&g)));
        rows.push(("G in SL".into(), if g.in_sl() { "yes" } else { "no" }.into()));
        let shown: Vec<String> = blocks.iter().map(|b| format!("{{{}}}", b.join(","))).collect();
        rows.push((
            "well behaved".into(),
            match &wb.failure {
                None => format!("yes, blocks {}", shown.join(" ")),
                Some(f) => format!("no: {f}"),
            },
        ));
    }
    r.text.extend(report::table(&rows));
    Ok(r)
}

pub fn bmodel(p: &Problem, exec: Exec) -> Result<Report, CliError> {
    let w = first(p)?;
    let g = group_for(&w, p)?;
    let model = build_bmodel_with(&w, &g, BModelOptions { exec, ..Default::default() })?;
    let verdict = verify_bmodel_axioms(&model);
    let mut r = Report::new("bmodel", echo(p));
    let labels: Vec<String> = (0..model.dim()).map(|i| model.label(i)).collect();
    let mut products = Vec::new();
    for i in 0..model.dim() {
        for j in i..model.dim() {
            let v = model.product(i, j);
            if !v.is_empty() {
                products.push(format!("{} * {} = {}", labels[i], labels[j], model.format_vec(v)));
            }
        }
    }
    let mut pairings = Vec::new();
    for i in 0..model.dim() {
        for j in i..model.dim() {
            let c = model.pairing(i, j);
            if !c.is_zero() {
                pairings.push(json!({"left": labels[i], "right": labels[j], "value": report::scalar(c)}));
            }
        }
    }
    r.set("polynomial", w.to_string());
    r.set("group", group_json(&g));
    r.set("dim", model.dim());
    r.set("sectors", describe_sectors(&model));
    r.set(
        "basis",
        (0..model.dim())
            .map(|i| json!({"label": labels[i], "degree": report::rational(model.degree(i))}))
            .collect::<Vec<_>>(),
    );
    r.set("products", products.clone());
    r.set("pairings", pairings);
    r.set("closure_violations", model.closure_violations().to_vec());
    r.set("axioms", report::checks(&verdict.axioms.checks));
    r.set("axioms_passed", verdict.passed());
    r.set("failure_kind", verdict.failure_kind());
    r.line(format!("W = {w}, G {}", group_text(&g)));
    r.line(format!("dimension {}", model.dim()));
    r.line("sectors:");
    r.text.extend(describe_sectors(&model).into_iter().map(|s| format!("  {s}")));
    r.line("basis (degree):");
    for (i, l) in labels.iter().enumerate() {
        r.line(format!("  {l:<24} {}", fmt_rat(model.degree(i))));
    }
    r.line("products:");
    r.text.extend(products.into_iter().map(|s| format!("  {s}")));
    for v in model.closure_violations() {
        r.line(format!("closure violation: {v}"));
    }
    r.line("axioms:");
    r.text.extend(report::check_lines(&verdict.axioms.checks));
    if !verdict.passed() {
        r.finding();
        if let Some(kind) = verdict.failure_kind() {
            r.line(format!("axiom failure classified as {kind}"));
        }
    }
    Ok(r)
}

fn two(p: &Problem) -> Result<(Polynomial, Polynomial), CliError> {
    let mut polys = p.polynomials()?;
    if polys.len() != 2 {
        return Err(CliError::Input(format!("expected W and one V, got {} polynomials", polys.len())));
    }
    let v = polys.pop().unwrap();
    Ok((polys.pop().unwrap(), v))
}

pub fn equiv(p: &Problem) -> Result<Report, CliError> {
    let (w, v) = two(p)?;
    let mut r = Report::new("equiv", echo(p));
    r.line(format!("W = {w}, V = {v}"));
    match search_linear_equivalence(&w, &v)? {
        EquivalenceResult::Equivalent(h) => {
            let verified = verify_substitution(&w, &v, &h)?;
            r.set("equivalent", true);
            r.set(
                "substitution",
                json!({
                    "target_vars": h.target_vars,
                    "images": h.images.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "field": report::field(&h.field),
                    "verified": verified,
                }),
            );
            r.line("equivalent: V(h(x)) = W(x) with");
            r.line(format!("  {h}"));
            r.line(format!("  exact expansion check: {}", if verified { "pass" } else { "FAIL" }));
            if !verified {
                r.finding();
            }
        }
        EquivalenceResult::Inequivalent(c) => {
            r.set("equivalent", false);
            r.set(
                "certificate",
                json!({
                    "unknowns": c.unknowns,
                    "equations": c.equations.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "groebner_basis": c.groebner_basis.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                }),
            );
            r.line("not linearly equivalent:");
            r.line(format!("  {}", describe_certificate(&c)));
        }
    }
    Ok(r)
}

/// Variables shared by identical blocks of `w` and `v`, when they form a
/// trailing segment of the variable order and leave something to solve.
fn common_tail(w: &Polynomial, v: &Polynomial) -> Option<usize> {
    let bw = variable_blocks(w);
    let bv = variable_blocks(v);
    let mut common: Vec<usize> =
        bw.iter().filter(|b| bv.contains(b) && block_summand(w, b) == block_summand(v, b)).flatten().copied().collect();
    common.sort();
    let n = w.nvars();
    let k = n - common.len();
    (k > 0 && !common.is_empty() && common == (k..n).collect::<Vec<_>>()).then_some(k)
}

struct Solved {
    map: FrobeniusMap,
    method: String,
    solution: ScalingSolution,
}

fn solve_pair(w: &Polynomial, v: &Polynomial, exec: Exec) -> Result<Result<Solved, Vec<String>>, CliError> {
    let split = common_tail(w, v);
    let (sw, sv) = match split {
        Some(k) => {
            let head: Vec<usize> = (0..k).collect();
            (restrict_polynomial(w, &head), restrict_polynomial(v, &head))
        }
        None => (w.clone(), v.clone()),
    };
    let a = Arc::new(MilnorRing::with_exec(&sw, exec)?);
    let b = Arc::new(MilnorRing::with_exec(&sv, exec)?);
    let sol = match solve_scaling_iso(&a, &b, exec)? {
        ScalingOutcome::Found(s) => *s,
        ScalingOutcome::Infeasible(why) => return Ok(Err(why)),
    };
    let Some(k) = split else {
        return Ok(Ok(Solved { map: sol.map.clone(), method: "scaling".into(), solution: sol }));
    };
    let tail: Vec<usize> = (k..w.nvars()).collect();
    let rest = Arc::new(MilnorRing::with_exec(&restrict_polynomial(w, &tail), exec)?);
    let map = combine_isomorphisms(&sol.map, &FrobeniusMap::identity(Algebra::Milnor(rest.clone())), exec)?;
    let method = format!("scaling on {} combined with the identity on {}", sw, rest.polynomial());
    Ok(Ok(Solved { map, method, solution: sol }))
}

fn map_from_file(w: &Polynomial, v: &Polynomial, file: &MapFile, exec: Exec) -> Result<FrobeniusMap, CliError> {
    let a = Arc::new(MilnorRing::with_exec(w, exec)?);
    let b = Arc::new(MilnorRing::with_exec(v, exec)?);
    let names = w.vars().names();
    let mut images = vec![None; a.mu()];
    for line in &file.lines {
        let m: &Monomial = line.source.monomials().next().unwrap();
        let Some(i) = a.index_of(m) else {
            return Err(CliError::Input(format!("map source {} is not a basis monomial of W", m.display(names))));
        };
        if images[i].is_some() {
            return Err(CliError::Input(format!("map source {} given twice", m.display(names))));
        }
        images[i] = Some(b.reduce(&line.image));
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, img)| {
            img.ok_or_else(|| CliError::Input(format!("map gives no image for {}", a.basis()[i].display(names))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrobeniusMap::new(Algebra::Milnor(a), Algebra::Milnor(b), images)?)
}

/// Writes a Milnor ring map in the map-file format accepted by `--map`.
pub fn map_file_text(map: &FrobeniusMap) -> Option<String> {
    let (a, b) = (map.source().milnor()?, map.target().milnor()?);
    let (sn, tn) = (a.vars().names(), b.vars().names());
    let mut out = String::new();
    let mut symbol = String::new();
    for img in map.images() {
        for (_, c) in img {
            if let Some(m) = c.field().modulus() {
                if symbol.is_empty() {
                    symbol = m.symbol().to_string();
                    out.push_str(&format!("modulus: {}\n", m.poly().display(&symbol)));
                }
            }
        }
    }
    for (i, img) in map.images().iter().enumerate() {
        let mut terms: Vec<(Rational, String)> = Vec::new();
        for (j, c) in img {
            let mono = b.basis()[*j].display(tn).to_string();
            for (k, q) in c.coeffs().iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let mut factors = Vec::new();
                if k > 0 {
                    factors.push(if k == 1 { symbol.clone() } else { format!("{symbol}^{k}") });
                }
                if mono != "1" || factors.is_empty() {
                    factors.push(mono.clone());
                }
                terms.push((q.clone(), factors.join("*")));
            }
        }
        let mut rhs = String::new();
        for (n, (q, body)) in terms.iter().enumerate() {
            let mag = q.abs();
            let sign = if q.is_negative() { "-" } else { "+" };
            if n == 0 {
                if q.is_negative() {
                    rhs.push('-');
                }
            } else {
                rhs.push_str(&format!(" {sign} "));
            }
            if mag.is_one() {
                rhs.push_str(body);
            } else {
                rhs.push_str(&format!("{} * {body}", fmt_rat(&mag)));
            }
        }
        if rhs.is_empty() {
            rhs.push('0');
        }
        out.push_str(&format!("{} -> {rhs}\n", a.basis()[i].display(sn)));
    }
    Some(out)
}

fn extend_one(
    r: &mut Report,
    map: &FrobeniusMap,
    group: &SymmetryGroup,
    exec: Exec,
    entry: &mut serde_json::Map<String, Value>,
) -> Result<bool, CliError> {
    let base = verify_frobenius_iso(map, Some(group), exec);
    entry.insert("milnor_certificate".into(), report::certificate(&base));
    r.line(format!("  Milnor map certificate: {}", if base.passed() { "pass" } else { "FAIL" }));
    if !base.passed() {
        r.text.extend(report::check_lines(&base.checks).into_iter().map(|s| format!("  {s}")));
        return Ok(false);
    }
    let ext = extend_isomorphism(map, group, BModelOptions { exec, ..Default::default() })?;
    entry.insert("extension".into(), json!(ext.map.describe()));
    entry.insert("extension_certificate".into(), report::certificate(&ext.certificate));
    r.line(format!("  extension (dim {}):", ext.map.source().dim()));
    r.text.extend(ext.map.describe().into_iter().map(|s| format!("    {s}")));
    r.line(format!("  extension certificate: {}", if ext.certificate.passed() { "pass" } else { "FAIL" }));
    r.text.extend(report::check_lines(&ext.certificate.checks).into_iter().map(|s| format!("  {s}")));
    Ok(ext.certificate.passed())
}

pub fn extend(p: &Problem, solve: bool, exec: Exec) -> Result<Report, CliError> {
    let polys = p.polynomials()?;
    if polys.len() < 2 {
        return Err(CliError::Input("extend-iso needs W and at least one V".into()));
    }
    let group = group_for(&polys[0], p)?;
    let mut r = Report::new("extend-iso", echo(p));
    r.set("group", group_json(&group));
    r.line(format!("G {}", group_text(&group)));
    let mut results = Vec::new();
    let mut all_ok = true;
    match (&p.map, solve) {
        (Some(path), false) => {
            if polys.len() != 2 {
                return Err(CliError::Input("a map file applies to exactly one pair W -> V".into()));
            }
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            let file = MapFile::parse(&text, polys[0].vars().names())?;
            let map = map_from_file(&polys[0], &polys[1], &file, exec)?;
            let mut entry = serde_json::Map::new();
            entry.insert("source".into(), json!(polys[0].to_string()));
            entry.insert("target".into(), json!(polys[1].to_string()));
            entry.insert("method".into(), json!("map file"));
            entry.insert("field".into(), report::field(&file.field));
            r.line(format!("{} -> {} (map file)", polys[0], polys[1]));
            all_ok &= extend_one(&mut r, &map, &group, exec, &mut entry)?;
            results.push(Value::Object(entry));
        }
        (None, true) => {
            for i in 0..polys.len() {
                for j in i + 1..polys.len() {
                    let (w, v) = (&polys[i], &polys[j]);
                    let mut entry = serde_json::Map::new();
                    entry.insert("source".into(), json!(w.to_string()));
                    entry.insert("target".into(), json!(v.to_string()));
                    r.line(format!("{w} -> {v}"));
                    match solve_pair(w, v, exec)? {
                        Err(why) => {
                            all_ok = false;
                            entry.insert("found".into(), json!(false));
                            entry.insert("evidence".into(), json!(why));
                            r.line("  no scaling isomorphism:");
                            r.text.extend(why.iter().map(|s| format!("    {s}")));
                        }
                        Ok(s) => {
                            let vars = s.solution.map.source().polynomial().vars().names().to_vec();
                            let constants: Vec<Value> = s.solution.constants.iter().map(report::scalar).collect();
                            entry.insert("found".into(), json!(true));
                            entry.insert("method".into(), json!(s.method));
                            entry.insert("field".into(), report::field(&s.solution.field));
                            entry.insert("constants".into(), json!(constants));
                            entry.insert("top_constant".into(), report::rational(&s.solution.top_constant));
                            entry.insert(
                                "pairing_route".into(),
                                json!(s.solution.pairing_route.iter().map(|c| c.display(&vars)).collect::<Vec<_>>()),
                            );
                            entry.insert(
                                "hessian_route".into(),
                                json!(s.solution.hessian_route.iter().map(|c| c.display(&vars)).collect::<Vec<_>>()),
                            );
                            r.line(format!("  method: {}", s.method));
                            let field = s
                                .solution
                                .field
                                .modulus()
                                .map(|m| format!(" over Q[{0}]/({1})", m.symbol(), m.poly().display(m.symbol())));
                            let shown: Vec<String> = vars
                                .iter()
                                .zip(&s.solution.constants)
                                .map(
                                    |(x, c)| {
                                        if c.is_one() {
                                            format!("{x} -> {x}")
                                        } else {
                                            format!("{x} -> ({c})*{x}")
                                        }
                                    },
                                )
                                .collect();
                            r.line(format!("  {}{}", shown.join(", "), field.unwrap_or_default()));
                            r.line(format!("  top-degree constant {}", fmt_rat(&s.solution.top_constant)));
                            entry.insert("map_file".into(), json!(map_file_text(&s.map)));
                            all_ok &= extend_one(&mut r, &s.map, &group, exec, &mut entry)?;
                        }
                    }
                    results.push(Value::Object(entry));
                }
            }
        }
        (Some(_), true) => return Err(CliError::Input("give either --map or --solve, not both".into())),
        (None, false) => return Err(CliError::Input("extend-iso needs --map <file> or --solve".into())),
    }
    r.set("pairs", results);
    r.set("passed", all_ok);
    if !all_ok {
        r.finding();
    }
    Ok(r)
}

pub fn selftest(ns: &[u32], exec: Exec, timing: bool) -> Report {
    let report = run_selftest(ns, exec);
    let mut r = Report::new("selftest", json!({"family_n": ns}));
    let mut rows = Vec::new();
    for c in &report.results {
        let mut e = json!({
            "id": c.id,
            "name": c.name,
            "passed": c.ok(),
            "details": c.details,
            "known_issue": c.known_issue,
            "budget_ms": c.budget.map(|b| b.as_millis() as u64),
        });
        if timing {
            e["elapsed_ms"] = json!(c.elapsed.as_secs_f64() * 1000.0);
            r.line(c.to_string());
        } else {
            r.line(format!("[{}] criterion {} {}", if c.ok() { "PASS" } else { "FAIL" }, c.id, c.name));
        }
        r.text.extend(c.details.iter().map(|d| format!("    {d}")));
        if let Some(k) = c.known_issue {
            r.line(format!("    known issue: {k}"));
        }
        rows.push(e);
    }
    let passed = report.results.iter().filter(|c| c.ok()).count();
    r.line(format!("{passed}/{} criteria pass", report.results.len()));
    r.set("criteria", rows);
    r.set("passed", report.passed());
    if !report.passed() {
        r.finding();
    }
    r
}
