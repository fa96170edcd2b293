//! Regression driver: runs each release criterion and reports pass/fail
//! with details and timing.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::algebra::FrobeniusAlgebra;
use crate::equivalence::{describe_certificate, search_linear_equivalence, verify_substitution, EquivalenceResult};
use crate::error::Result;
use crate::exec::Exec;
use crate::isomorphism::{
    combine_extended, combine_isomorphisms, compare_constant, extend_isomorphism, verify_frobenius_iso, Algebra,
    FrobeniusMap, ScalingOutcome, ScalingSolution,
};
use crate::kernel::rational::{fmt_rat, rat};
use crate::kernel::{parse_polynomial, Monomial, Polynomial, Rational};
use crate::milnor::MilnorRing;
use crate::orbifold::{build_bmodel_with, verify_bmodel_axioms, BModel, BModelOptions, Mutation};
use crate::structure::{classify, compute_weights, exponent_matrix, predicted_milnor_number, webb_applicable};
use crate::symmetry::{max_symmetry_group, subgroup_generated, SymmetryGroup};

/// Admissible polynomials covering every atomic type in one to four variables.
pub const CORPUS: &[&str] = &[
    "x^2",
    "x^3",
    "x^6",
    "x^2 + y^6",
    "x^3 + y^3",
    "x^5 + y^3",
    "x^4 + y^4",
    "x^3*y + x*y^3",
    "x^2*y + x*y^2",
    "x^2 + x*y^3",
    "x^2*y + y^3",
    "x^3*y + y^4",
    "x^5*y + y^3",
    "x^2 + y^2 + z^2",
    "x^3 + y^3 + z^3",
    "x^2*y + y^2*z + z^2*x",
    "x^2*y + y^2*z + z^3",
    "x^2*y + y^4 + z^3",
    "x^4 + y^4 + z^2",
    "x^2 + y^3 + z^4 + w^5",
    "x^2 + y^2 + z^2 + w^2",
    "x^3*y + y^3*z + z^3*w + w^3*x",
    "x^4 + y^4 + x^2*y^2",
    "x^2 + x*y^3 + y^6",
    "x^2 + x*y^5 + y^10",
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
    pub details: Vec<String>,
    /// Set when the criterion asserts something that does not hold; the
    /// text explains why.
    pub known_issue: Option<&'static str>,
}

impl CriterionResult {
    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.elapsed <= b)
    }

    pub fn ok(&self) -> bool {
        self.passed && self.within_budget()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget = self.budget.map_or(String::new(), |b| format!(" budget {:.0?}", b));
        write!(
            f,
            "[{}] criterion {} {}: {:.2?}{}",
            if self.ok() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed,
            budget
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelftestReport {
    pub results: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.ok())
    }

    /// Failures not explained by a known issue.
    pub fn unexpected_failures(&self) -> Vec<u32> {
        self.results
            .iter()
            .filter(|r| !r.ok() && (r.known_issue.is_none() || !r.within_budget()))
            .map(|r| r.id)
            .collect()
    }
}

fn timed(
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    known_issue: Option<&'static str>,
    body: impl FnOnce(&mut Vec<String>) -> Result<bool>,
) -> CriterionResult {
    let start = Instant::now();
    let mut details = Vec::new();
    let passed = match body(&mut details) {
        Ok(p) => p,
        Err(e) => {
            details.push(format!("error: {e}"));
            false
        }
    };
    CriterionResult {
        id,
        name,
        passed,
        elapsed: start.elapsed(),
        budget,
        details,
        known_issue: if passed { None } else { known_issue },
    }
}

fn poly(s: &str) -> Polynomial {
    parse_polynomial(s, None).expect("built-in polynomial parses")
}

fn poly_in(s: &str, vars: &[&str]) -> Polynomial {
    parse_polynomial(s, Some(vars)).expect("built-in polynomial parses")
}

fn show_set(ring: &MilnorRing, ms: &[Monomial]) -> String {
    let mut names: Vec<String> = ms.iter().map(|m| m.display(ring.vars().names()).to_string()).collect();
    names.sort();
    format!("{{{}}}", names.join(", "))
}

const BASIS_NOTE: &str = "no monomial order has {x^a y^b : a,b <= 2} as standard monomials of x^3*y + x*y^3 \
(y^3 leading 3x^2*y + y^3 needs y > x, x^3 leading x^3 + 3x*y^2 needs x > y); the set is verified to be a \
monomial basis of the quotient instead";

pub fn criterion_milnor_basis() -> CriterionResult {
    timed(1, "Milnor basis golden sets", Some(Duration::from_secs(1)), Some(BASIS_NOTE), |d| {
        let golden: Vec<Monomial> = (0..3).flat_map(|a| (0..3).map(move |b| Monomial::new([a, b]))).collect();
        let mut ok = true;
        for w in ["x^4 + y^4", "x^3*y + x*y^3"] {
            let ring = MilnorRing::new(&poly_in(w, &["x", "y"]))?;
            let mut got = ring.basis().to_vec();
            got.sort();
            let mut want = golden.clone();
            want.sort();
            let equal = got == want;
            ok &= equal;
            d.push(format!(
                "{w}: standard monomials {} {} golden set; golden set is a monomial basis: {}",
                show_set(&ring, ring.basis()),
                if equal { "==" } else { "!=" },
                ring.is_monomial_basis(&golden)
            ));
        }
        Ok(ok)
    })
}

pub fn criterion_dimension_identity(exec: Exec) -> CriterionResult {
    timed(2, "dimension identity over corpus", Some(Duration::from_secs(10)), None, |d| {
        let rows = exec.map(CORPUS, |s| -> Result<(String, usize, Option<usize>)> {
            let w = poly(s);
            let ring = MilnorRing::with_exec(&w, Exec::Sequential)?;
            let q = compute_weights(&w)?;
            Ok((s.to_string(), ring.mu(), predicted_milnor_number(&q)))
        });
        let mut ok = CORPUS.len() >= 20;
        for r in rows {
            let (s, mu, pred) = r?;
            let good = pred == Some(mu);
            ok &= good;
            if !good {
                d.push(format!("{s}: {mu} standard monomials but prod(1/q_i - 1) = {pred:?}"));
            }
        }
        d.push(format!("{} corpus polynomials checked", CORPUS.len()));
        Ok(ok)
    })
}

pub fn criterion_symmetry_orders() -> CriterionResult {
    timed(3, "|G_max| = |det A| for invertible corpus", None, None, |d| {
        let mut ok = true;
        let mut count = 0;
        for s in CORPUS {
            let w = poly(s);
            if !classify(&w)?.invertible {
                continue;
            }
            count += 1;
            let g = max_symmetry_group(&w)?;
            let det = exponent_matrix(&w).abs_determinant();
            let good = det.as_ref().map(|x| x.to_string()) == Some(g.order().to_string());
            ok &= good;
            if !good || *s == "x^4 + y^4" || *s == "x^3*y + x*y^3" {
                d.push(format!("{s}: |G_max| = {}, |det A| = {:?}", g.order(), det.map(|x| x.to_string())));
            }
        }
        d.push(format!("{count} invertible polynomials checked"));
        Ok(ok)
    })
}

/// The three polynomials `x^2 + y^{2n}`, `x^2 + x y^n + y^{2n}`, `x^2 + x y^n`.
pub fn family(n: u32) -> [Polynomial; 3] {
    let vars = ["x", "y"];
    [
        poly_in(&format!("x^2 + y^{}", 2 * n), &vars),
        poly_in(&format!("x^2 + x*y^{n} + y^{}", 2 * n), &vars),
        poly_in(&format!("x^2 + x*y^{n}"), &vars),
    ]
}

fn half_group(nvars: usize, w: &Polynomial) -> Result<SymmetryGroup> {
    let g: Vec<Rational> = (0..nvars).map(|_| rat(1, 2)).collect();
    subgroup_generated(w, &[g])
}

fn expect_scaling(
    source: &Arc<MilnorRing>,
    target: &Arc<MilnorRing>,
    exec: Exec,
    d: &mut Vec<String>,
) -> Result<Option<ScalingSolution>> {
    match crate::isomorphism::solve_scaling_iso(source, target, exec)? {
        ScalingOutcome::Found(s) => Ok(Some(*s)),
        ScalingOutcome::Infeasible(why) => {
            d.push(format!("{} -> {}: no scaling map ({})", source.polynomial(), target.polynomial(), why.join("; ")));
            Ok(None)
        }
    }
}

/// Maps of the three-polynomial family checked by the pipeline: into the
/// middle polynomial from both ends, and end to end.
pub const FAMILY_MAPS: [(usize, usize); 3] = [(0, 1), (2, 1), (0, 2)];

pub fn criterion_family_pipeline(ns: &[u32], exec: Exec) -> CriterionResult {
    timed(4, "three-polynomial family pipeline", Some(Duration::from_secs(30)), None, |d| {
        let mut ok = true;
        for &n in ns {
            let polys = family(n);
            let rings: Vec<Arc<MilnorRing>> =
                polys.iter().map(|w| MilnorRing::with_exec(w, exec).map(Arc::new)).collect::<Result<_>>()?;
            let expected: Vec<Monomial> = (0..=2 * n - 2).map(|k| Monomial::new([0, k])).collect();
            for r in &rings {
                let mut got = r.basis().to_vec();
                got.sort();
                let mut want = expected.clone();
                want.sort();
                if got != want {
                    ok = false;
                    d.push(format!("n={n} {}: basis {}", r.polynomial(), show_set(r, r.basis())));
                }
            }
            let group = half_group(2, &polys[0])?;
            for (a, b) in FAMILY_MAPS {
                let Some(sol) = expect_scaling(&rings[a], &rings[b], exec, d)? else {
                    ok = false;
                    continue;
                };
                let ext = extend_isomorphism(&sol.map, &group, BModelOptions { exec, ..Default::default() })?;
                let good = sol.certificate.passed() && ext.certificate.passed();
                ok &= good;
                d.push(format!(
                    "n={n} {} -> {}: top constant {} (pairing and Hessian routes agree); Milnor certificate {}; \
extension over <(1/2,1/2)> (dim {}) certificate {}",
                    rings[a].polynomial(),
                    rings[b].polynomial(),
                    fmt_rat(&sol.top_constant),
                    if sol.certificate.passed() { "pass" } else { "FAIL" },
                    ext.map.source().dim(),
                    if ext.certificate.passed() { "pass" } else { "FAIL" }
                ));
                if !good {
                    d.push(format!("{}\n{}", sol.certificate, ext.certificate));
                }
            }
        }
        d.extend(constant_comparison(ns, exec)?);
        Ok(ok)
    })
}

/// Reference constants `c^{2n-2}` recorded for two maps of the family,
/// compared with the exact values. Agreement is reported, not required.
pub fn constant_comparison(ns: &[u32], exec: Exec) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for &n in ns {
        let polys = family(n);
        let rings: Vec<Arc<MilnorRing>> =
            polys.iter().map(|w| MilnorRing::with_exec(w, exec).map(Arc::new)).collect::<Result<_>>()?;
        let reference = [((0, 2), rat(3, 4)), ((1, 2), rat(-3, 1))];
        for ((a, b), claimed) in reference {
            let mut scratch = Vec::new();
            if let Some(sol) = expect_scaling(&rings[a], &rings[b], exec, &mut scratch)? {
                out.push(format!("n={n} comparison (stated direction): {}", compare_constant(&sol, claimed.clone())));
            }
            // the same constant read with the middle polynomial as target
            let (a2, b2) = if a == 0 { (0, 1) } else { (2, 1) };
            if let Some(sol) = expect_scaling(&rings[a2], &rings[b2], exec, &mut scratch)? {
                out.push(format!("n={n} comparison (into middle):     {}", compare_constant(&sol, claimed)));
            }
        }
    }
    Ok(out)
}

/// `(label, W, group generators)` for the orbifold axiom suite.
pub fn axiom_models(n: u32) -> Vec<(String, Polynomial, SymmetryGroup)> {
    let mut out = Vec::new();
    let mut push = |label: String, w: Polynomial, gens: Vec<Vec<Rational>>| {
        let g = subgroup_generated(&w, &gens).expect("built-in group is a symmetry");
        out.push((label, w, g));
    };
    let h = rat(1, 2);
    push("x^2 + y^6, <(1/2,1/2)>".into(), poly_in("x^2 + y^6", &["x", "y"]), vec![vec![h.clone(), h.clone()]]);
    push("x^4 + y^4, <(1/4,3/4)>".into(), poly_in("x^4 + y^4", &["x", "y"]), vec![vec![rat(1, 4), rat(3, 4)]]);
    push("z^2 + w^2, <(1/2,1/2)>".into(), poly_in("z^2 + w^2", &["z", "w"]), vec![vec![h.clone(), h.clone()]]);
    for (i, g) in sum_groups().iter().enumerate() {
        for (k, w) in family(n).iter().enumerate() {
            let full = sum_with_quadric(w);
            push(format!("W{}_{n} + z^2 + w^2, G{}", k + 1, i + 1), full, g.clone());
        }
    }
    out
}

/// Generators of `G1..G4` on `(x, y, z, w)`.
pub fn sum_groups() -> [Vec<Vec<Rational>>; 4] {
    let h = || rat(1, 2);
    let z = || rat(0, 1);
    [
        vec![],
        vec![vec![h(), h(), z(), z()]],
        vec![vec![z(), z(), h(), h()]],
        vec![vec![h(), h(), z(), z()], vec![z(), z(), h(), h()]],
    ]
}

fn quadric() -> Polynomial {
    poly_in("z^2 + w^2", &["z", "w"])
}

fn sum_with_quadric(w: &Polynomial) -> Polynomial {
    crate::isomorphism::direct_sum_polynomial(w, &quadric()).expect("disjoint variables")
}

fn build_models(n: u32, options: BModelOptions) -> Vec<(String, Result<BModel>)> {
    let models = axiom_models(n);
    options.exec.map(&models, |(label, w, g)| {
        (label.clone(), build_bmodel_with(w, g, BModelOptions { exec: Exec::Sequential, ..options }))
    })
}

pub fn criterion_bmodel_axioms(exec: Exec) -> CriterionResult {
    timed(5, "B-model axiom suite", Some(Duration::from_secs(60)), None, |d| {
        let mut ok = true;
        for (label, model) in build_models(3, BModelOptions { exec, ..Default::default() }) {
            let model = model?;
            let report = verify_bmodel_axioms(&model);
            ok &= report.passed();
            d.push(format!(
                "{label}: dim {} axioms {}",
                model.dim(),
                if report.passed() { "pass".to_string() } else { format!("FAIL {:?}", report.axioms.failed_checks()) }
            ));
            if label.starts_with("x^2 + y^6") && model.dim() != 4 {
                ok = false;
                d.push(format!("{label}: expected dimension 4"));
            }
        }
        Ok(ok)
    })
}

fn restrict_group(g: &[Vec<Rational>], range: std::ops::Range<usize>, w: &Polynomial) -> Result<SymmetryGroup> {
    let gens: Vec<Vec<Rational>> =
        g.iter().map(|v| v[range.clone()].to_vec()).filter(|v| v.iter().any(|x| *x != rat(0, 1))).collect();
    if gens.is_empty() {
        return Ok(SymmetryGroup::trivial(range.len()));
    }
    subgroup_generated(w, &gens)
}

pub fn criterion_tensor(exec: Exec) -> CriterionResult {
    timed(6, "tensor dimensions and combined extension", None, None, |d| {
        let mut ok = true;
        let opts = BModelOptions { exec, ..Default::default() };
        let n = 3;
        let polys = family(n);
        let rings: Vec<Arc<MilnorRing>> =
            polys.iter().map(|w| MilnorRing::with_exec(w, exec).map(Arc::new)).collect::<Result<_>>()?;
        let q = quadric();
        let qv = Arc::new(MilnorRing::with_exec(&q, exec)?);
        let id_v = FrobeniusMap::identity(Algebra::Milnor(qv.clone()));
        for (i, gens) in sum_groups().iter().enumerate() {
            let w = sum_with_quadric(&polys[0]);
            let g = if gens.is_empty() { SymmetryGroup::trivial(4) } else { subgroup_generated(&w, gens)? };
            let g1 = restrict_group(gens, 0..2, &polys[0])?;
            let g2 = restrict_group(gens, 2..4, &q)?;
            let whole = build_bmodel_with(&w, &g, opts)?.dim();
            let left = build_bmodel_with(&polys[0], &g1, opts)?.dim();
            let right = build_bmodel_with(&q, &g2, opts)?.dim();
            let good = whole == left * right;
            ok &= good;
            d.push(format!("G{}: dim B[W+V] = {whole}, dim B[W] * dim B[V] = {left} * {right}", i + 1));

            for (a, b) in FAMILY_MAPS {
                let mut scratch = Vec::new();
                let Some(sol) = expect_scaling(&rings[a], &rings[b], exec, &mut scratch)? else {
                    ok = false;
                    d.extend(scratch);
                    continue;
                };
                let combined = combine_isomorphisms(&sol.map, &id_v, exec)?;
                let ext = extend_isomorphism(&combined, &g, opts)?;
                let psi1 = extend_isomorphism(&sol.map, &g1, opts)?;
                let psi2 = extend_isomorphism(&id_v, &g2, opts)?;
                let other = combine_extended(&psi1.map, &psi2.map)?;
                let other_cert = verify_frobenius_iso(&other, Some(&g), exec);
                let commute = ext.map.same_images(&other);
                let good = ext.certificate.passed() && other_cert.passed() && commute;
                ok &= good;
                d.push(format!(
                    "G{} W{} -> W{}: combined-then-extended {} (dim {}), extended-then-combined {}, equal: {}",
                    i + 1,
                    a + 1,
                    b + 1,
                    if ext.certificate.passed() { "pass" } else { "FAIL" },
                    ext.map.source().dim(),
                    if other_cert.passed() { "pass" } else { "FAIL" },
                    commute
                ));
            }
        }
        Ok(ok)
    })
}

const EQUIV_NOTE: &str =
    "x^3*y + x*y^3 = 2(X^4 - Y^4) at x = X - Y, y = X + Y, and X^4 - Y^4 is x^4 + y^4 after scaling by \
fourth roots of 1/2 and -1/2; the coefficient system is solvable, so its Groebner basis is not {1}";

pub fn criterion_equivalence() -> CriterionResult {
    timed(7, "equivalence refutation and witness", Some(Duration::from_secs(30)), Some(EQUIV_NOTE), |d| {
        let vars = ["x", "y"];
        let (a, b) = (poly_in("x^4 + y^4", &vars), poly_in("x^3*y + x*y^3", &vars));
        let refuted = match search_linear_equivalence(&a, &b)? {
            EquivalenceResult::Inequivalent(c) => {
                d.push(format!("{a} vs {b}: {}", describe_certificate(&c)));
                true
            }
            EquivalenceResult::Equivalent(h) => {
                let v = verify_substitution(&a, &b, &h)?;
                d.push(format!(
                    "{a} vs {b}: substitution found (exactly verified: {v}) over a field of degree {}",
                    h.field.degree()
                ));
                false
            }
        };
        let (c, e) = (poly_in("x^2 + y^6", &vars), poly_in("x^2 + x*y^3", &vars));
        let witnessed = match search_linear_equivalence(&c, &e)? {
            EquivalenceResult::Equivalent(h) => {
                let v = verify_substitution(&c, &e, &h)?;
                d.push(format!("{c} vs {e}: {h} (exactly verified: {v})"));
                v
            }
            EquivalenceResult::Inequivalent(cert) => {
                d.push(format!("{c} vs {e}: refuted: {}", describe_certificate(&cert)));
                false
            }
        };
        Ok(refuted && witnessed)
    })
}

pub fn criterion_webb() -> CriterionResult {
    timed(8, "Webb precondition", None, None, |d| {
        let a = poly_in("x^4 + y^4", &["x", "y"]);
        let va = webb_applicable(&a)?;
        let witness = va.witness.as_ref().map(|m| m.display(a.vars().names()).to_string());
        d.push(format!("{a}: applicable {} witness {:?}", va.applicable, witness));
        let b = poly_in("x^2 + y^6", &["x", "y"]);
        let vb = webb_applicable(&b)?;
        d.push(format!("{b}: applicable {}", vb.applicable));
        Ok(!va.applicable && witness.as_deref() == Some("x^2*y^2") && vb.applicable)
    })
}

pub fn criterion_mutations(exec: Exec) -> CriterionResult {
    timed(9, "mutation sensitivity", None, None, |d| {
        let mut ok = true;
        for m in [Mutation::DropMuRatio, Mutation::RestrictionAtOne] {
            let mut caught = 0;
            let mut first: Option<String> = None;
            for (label, model) in build_models(3, BModelOptions { exec, mutation: m, ..Default::default() }) {
                let model = match model {
                    Ok(x) => x,
                    Err(e) => {
                        caught += 1;
                        first.get_or_insert(format!("{label}: construction rejected: {e}"));
                        continue;
                    }
                };
                let r = verify_bmodel_axioms(&model);
                if !r.passed() {
                    caught += 1;
                    if first.is_none() {
                        let check = r.axioms.checks.iter().find(|c| !c.passed).unwrap();
                        first = Some(format!(
                            "{label}: {} witness {}",
                            check.name,
                            check.witnesses.first().cloned().unwrap_or_default()
                        ));
                    }
                }
            }
            ok &= caught > 0 && first.is_some();
            d.push(format!("{m:?}: {caught} models fail; e.g. {}", first.unwrap_or_else(|| "none".into())));
        }
        Ok(ok)
    })
}

/// Runs every criterion; the family pipeline uses `ns`.
pub fn run_selftest(ns: &[u32], exec: Exec) -> SelftestReport {
    SelftestReport {
        results: vec![
            criterion_milnor_basis(),
            criterion_dimension_identity(exec),
            criterion_symmetry_orders(),
            criterion_family_pipeline(ns, exec),
            criterion_bmodel_axioms(exec),
            criterion_tensor(exec),
            criterion_equivalence(),
            criterion_webb(),
            criterion_mutations(exec),
        ],
    }
}
