//! The verification suite: one or more claims per acceptance criterion,
//! evaluated in a work pool and assembled into a deterministic report.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{Laurent, MultiPoly, Scalar, Window};
use crate::characters::{birkhoff, birkhoff_by_splitting, is_local, tilde_r_inv, Character, InfChar};
use crate::error::{Error, Result};
use crate::flow::{self, rk4, FlowParams, FlowTrajectory, FLOW_WINDOW};
use crate::lie::{lie_poisson_matrix, nilpotency_step, AlgebraName, LieData};
use crate::poisson::{self, HamiltonianAnsatz, PoissonPoly};
use crate::trees::{
    antipode, coproduct_forest, counit, enumerate_forests, enumerate_trees, grading_y, Forest, HopfElement,
    Orientation, RootedTree, TensorElement, TreeBasis,
};

pub const SCHEMA: &str = "1";

/// Every claim id with the acceptance criterion it belongs to.
pub const CLAIMS: &[(&str, u8)] = &[
    ("hopf.axioms", 1),
    ("trees.counts", 2),
    ("g1.structure_constants", 3),
    ("delta1.structure_constants", 3),
    ("delta2.structure_constants", 3),
    ("delta3.structure_constants", 3),
    ("g1.heisenberg_law", 4),
    ("nilpotency.steps", 5),
    ("poisson.ranks", 6),
    ("delta1.involution", 7),
    ("delta2.involution", 7),
    ("delta3.involution", 7),
    ("independence.jacobian_ranks", 8),
    ("lax.solution", 9),
    ("beta0.trivial_regime", 10),
    ("beta0.equation", 11),
    ("beta0.degrees", 12),
    ("hamiltonian.fit", 13),
    ("birkhoff.random", 14),
    ("locality", 15),
];

/// Relative tolerance of the RK4 comparison.
pub const RK4_TOLERANCE: f64 = 1e-8;
/// Local error target of the adaptive integrator.
pub const RK4_STEP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Largest tree degree for the Hopf axiom and tree count checks.
    pub degree_cap: usize,
    /// Laurent window for flows and random characters.
    pub window: Window,
    pub seed: u64,
    /// Random flows per algebra and per `p ∈ {0, −1}`.
    pub flows_per_case: usize,
    pub random_characters: usize,
    /// Debug mutation: use the swapped coproduct orientation everywhere.
    pub flip_coproduct: bool,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            degree_cap: 6,
            window: FLOW_WINDOW,
            seed: 0,
            flows_per_case: 20,
            random_characters: 100,
            flip_coproduct: false,
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn orientation(&self) -> Orientation {
        if self.flip_coproduct {
            Orientation::TrunkPruned
        } else {
            Orientation::PrunedTrunk
        }
    }

    fn rng(&self, tag: &str, index: u64) -> ChaCha8Rng {
        // FNV-1a over the tag, mixed with seed and index
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(h ^ self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index.rotate_left(32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim_id: String,
    pub criterion: u8,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: String,
    pub config: RunConfig,
    pub claims: Vec<ClaimResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.claim_id == id)
    }

    /// Whether every claim of criterion `k` passed.
    pub fn criterion_passed(&self, k: u8) -> bool {
        self.claims.iter().filter(|c| c.criterion == k).all(|c| c.status == Status::Pass)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Outcome of one claim before assembly.
struct Outcome {
    ok: bool,
    witness: Option<String>,
    details: Value,
}

impl Outcome {
    fn new(failures: Vec<String>, details: Value) -> Self {
        Outcome { ok: failures.is_empty(), witness: (!failures.is_empty()).then(|| failures.join("; ")), details }
    }
}

/// Flows shared by the criteria that examine generated trajectories.
struct FlowRecord {
    algebra: AlgebraName,
    p: i32,
    index: usize,
    params: FlowParams,
    traj: Result<FlowTrajectory>,
}

impl FlowRecord {
    fn label(&self) -> String {
        format!("{} p={} #{}", self.algebra, self.p, self.index)
    }
}

struct Context {
    config: RunConfig,
    flows: Vec<FlowRecord>,
    lie: BTreeMap<AlgebraName, Arc<LieData>>,
}

impl Context {
    fn lie(&self, a: AlgebraName) -> Arc<LieData> {
        self.lie[&a].clone()
    }

    fn basis(&self, a: AlgebraName) -> Arc<TreeBasis> {
        Arc::new(a.tree_basis(self.config.orientation()))
    }
}

fn generate_flows(config: &RunConfig) -> Vec<FlowRecord> {
    let mut jobs = Vec::new();
    for alg in [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3] {
        for p in [0, -1] {
            for index in 0..config.flows_per_case {
                jobs.push((alg, p, index));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(algebra, p, index)| {
            let basis = Arc::new(algebra.tree_basis(config.orientation()));
            let mut rng = config.rng(&format!("flow/{algebra}/{p}"), index as u64);
            let l0 = flow::random_l0(basis.clone(), config.window, &mut rng)
                .unwrap_or_else(|_| InfChar::zero(basis, config.window));
            let params = FlowParams { p, algebra, l0, window: config.window };
            let traj = flow::solve_lax(&params);
            FlowRecord { algebra, p, index, params, traj }
        })
        .collect()
}

type ClaimFn = fn(&Context) -> Result<Outcome>;

fn claim_fn(id: &str) -> ClaimFn {
    match id {
        "hopf.axioms" => hopf_axioms,
        "trees.counts" => tree_counts,
        "g1.structure_constants" => |c| structure_constants(c, AlgebraName::G1),
        "delta1.structure_constants" => |c| structure_constants(c, AlgebraName::Delta1),
        "delta2.structure_constants" => |c| structure_constants(c, AlgebraName::Delta2),
        "delta3.structure_constants" => |c| structure_constants(c, AlgebraName::Delta3),
        "g1.heisenberg_law" => heisenberg_law,
        "nilpotency.steps" => nilpotency_steps,
        "poisson.ranks" => poisson_ranks,
        "delta1.involution" => |c| involution(c, AlgebraName::Delta1),
        "delta2.involution" => |c| involution(c, AlgebraName::Delta2),
        "delta3.involution" => |c| involution(c, AlgebraName::Delta3),
        "independence.jacobian_ranks" => jacobian_ranks,
        "lax.solution" => lax_solution,
        "beta0.trivial_regime" => trivial_regime,
        "beta0.equation" => beta0_equation,
        "beta0.degrees" => beta0_degrees,
        "hamiltonian.fit" => hamiltonian_fit,
        "birkhoff.random" => birkhoff_random,
        "locality" => locality,
        _ => unreachable!("unknown claim id {id}"),
    }
}

/// Run every claim. Claims run in parallel; the report order is fixed.
pub fn verify_all(config: &RunConfig) -> VerificationReport {
    let started = Instant::now();
    let lie = AlgebraName::ALL.iter().map(|&a| (a, Arc::new(a.lie_data_with(config.orientation())))).collect();
    let ctx = Context { config: config.clone(), flows: generate_flows(config), lie };
    log::info!("generated {} flows in {:?}", ctx.flows.len(), started.elapsed());
    let claims: Vec<ClaimResult> = CLAIMS
        .par_iter()
        .map(|&(id, criterion)| {
            let t = Instant::now();
            let outcome = claim_fn(id)(&ctx).unwrap_or_else(|e| Outcome {
                ok: false,
                witness: Some(format!("error: {e}")),
                details: json!({ "error": e.to_string() }),
            });
            let elapsed = t.elapsed();
            log::info!("{id}: {} in {elapsed:?}", if outcome.ok { "pass" } else { "FAIL" });
            ClaimResult {
                claim_id: id.to_string(),
                criterion,
                status: if outcome.ok { Status::Pass } else { Status::Fail },
                witness: outcome.witness,
                details: outcome.details,
                timing_ms: config.timings.then_some(elapsed.as_millis() as u64),
            }
        })
        .collect();
    let passed = claims.iter().filter(|c| c.status == Status::Pass).count();
    VerificationReport { schema: SCHEMA.into(), config: config.clone(), failed: claims.len() - passed, passed, claims }
}

// ---------------------------------------------------------------- criterion 1

/// Direct admissible-cut coproduct of a tree: every edge subset in which no
/// root-to-leaf path is cut twice, pruned forest on the left.
pub fn admissible_cut_coproduct(t: &RootedTree) -> TensorElement {
    let mut parent = Vec::new();
    let mut kids: Vec<Vec<usize>> = Vec::new();
    fn flatten(t: &RootedTree, p: Option<usize>, parent: &mut Vec<Option<usize>>, kids: &mut Vec<Vec<usize>>) {
        let me = parent.len();
        parent.push(p);
        kids.push(Vec::new());
        if let Some(p) = p {
            kids[p].push(me);
        }
        for c in t.children() {
            flatten(c, Some(me), parent, kids);
        }
    }
    flatten(t, None, &mut parent, &mut kids);
    fn build(v: usize, kids: &[Vec<usize>], keep: &dyn Fn(usize) -> bool) -> RootedTree {
        RootedTree::graft(kids[v].iter().filter(|&&c| keep(c)).map(|&c| build(c, kids, keep)).collect())
    }
    let n = parent.len();
    let mut out = TensorElement::simple(Forest::single(t.clone()), Forest::unit());
    // edges are identified by their lower vertex 1..n
    for mask in 0u32..(1 << (n - 1)) {
        let cut = |v: usize| v > 0 && mask & (1 << (v - 1)) != 0;
        let admissible = (1..n).all(|v| {
            if !cut(v) {
                return true;
            }
            let mut u = parent[v];
            while let Some(w) = u {
                if cut(w) {
                    return false;
                }
                u = parent[w];
            }
            true
        });
        if !admissible {
            continue;
        }
        let pruned = Forest::new((1..n).filter(|&v| cut(v)).map(|v| build(v, &kids, &|c| !cut(c))).collect());
        let trunk = Forest::single(build(0, &kids, &|c| !cut(c)));
        out.add_term(pruned, trunk, &Scalar::one());
    }
    out
}

type Triple = BTreeMap<(Forest, Forest, Forest), Scalar>;

fn add3(m: &mut Triple, k: (Forest, Forest, Forest), c: Scalar) {
    let e = m.entry(k.clone()).or_insert_with(Scalar::zero);
    *e += &c;
    if e.is_zero() {
        m.remove(&k);
    }
}

fn hopf_failures(max_degree: usize, orientation: Orientation) -> (Vec<String>, usize) {
    let forests = enumerate_forests(max_degree);
    let delta = |f: &Forest| coproduct_forest(f, orientation);
    let mut failures = Vec::new();
    for t in enumerate_trees(max_degree) {
        let direct = admissible_cut_coproduct(&t);
        let direct = if orientation == Orientation::PrunedTrunk { direct } else { direct.flip() };
        if delta(&Forest::single(t.clone())) != direct {
            failures.push(format!("coproduct of {t} differs from the admissible-cut sum"));
        }
    }
    for f in &forests {
        let d = delta(f);
        let h = HopfElement::from_forest(f.clone());
        let (mut left, mut right) = (Triple::new(), Triple::new());
        for ((a, b), c) in d.terms() {
            for ((a1, a2), c1) in delta(a).terms() {
                add3(&mut left, (a1.clone(), a2.clone(), b.clone()), c * c1);
            }
            for ((b1, b2), c2) in delta(b).terms() {
                add3(&mut right, (a.clone(), b1.clone(), b2.clone()), c * c2);
            }
        }
        if left != right {
            failures.push(format!("coassociativity fails on {f}"));
        }
        let eps = |x: &Forest| HopfElement::unit().scale(&counit(&HopfElement::from_forest(x.clone())));
        let id = |x: &Forest| HopfElement::from_forest(x.clone());
        if d.contract(eps, id) != h || d.contract(id, eps) != h {
            failures.push(format!("counit fails on {f}"));
        }
        let s = |x: &Forest| antipode(&HopfElement::from_forest(x.clone()));
        let unit_eps = HopfElement::unit().scale(&counit(&h));
        if d.contract(s, id) != unit_eps || d.contract(id, s) != unit_eps {
            failures.push(format!("antipode fails on {f}"));
        }
        // Y is a coderivation: ΔY = (Y⊗id + id⊗Y)Δ
        let mut y_delta = TensorElement::zero();
        for ((a, b), c) in d.terms() {
            let w = Scalar::from_int((a.degree() + b.degree()) as i64);
            y_delta.add_term(a.clone(), b.clone(), &(c * &w));
        }
        let mut delta_y = TensorElement::zero();
        for (g, c) in grading_y(&h).terms() {
            delta_y = delta_y.add(&delta(g).scale(c));
        }
        if y_delta != delta_y {
            failures.push(format!("Y is not a coderivation on {f}"));
        }
    }
    let mut pairs = 0;
    for (i, f) in forests.iter().enumerate() {
        for g in &forests[i..] {
            if f.degree() + g.degree() > max_degree {
                continue;
            }
            pairs += 1;
            let fg = f.mul(g);
            if delta(&fg) != delta(f).mul(&delta(g)) {
                failures.push(format!("Δ is not multiplicative on {f} · {g}"));
            }
            let (hf, hg) = (HopfElement::from_forest(f.clone()), HopfElement::from_forest(g.clone()));
            if grading_y(&hf.mul(&hg)) != grading_y(&hf).mul(&hg).add(&hf.mul(&grading_y(&hg))) {
                failures.push(format!("Y is not a derivation on {f} · {g}"));
            }
        }
    }
    (failures, pairs)
}

fn hopf_axioms(ctx: &Context) -> Result<Outcome> {
    let cap = ctx.config.degree_cap;
    let (failures, pairs) = hopf_failures(cap, ctx.config.orientation());
    let forests = enumerate_forests(cap).len();
    Ok(Outcome::new(failures, json!({ "max_degree": cap, "forests": forests, "product_pairs": pairs })))
}

// ---------------------------------------------------------------- criterion 2

/// Rooted unlabeled trees with `n` vertices, by the recurrence
/// `a(n+1) = (1/n) Σ_{k=1}^{n} (Σ_{d|k} d·a(d)) a(n−k+1)`.
pub fn otter_counts(max: usize) -> Vec<u64> {
    let mut a = vec![0u64, 1];
    for n in 1..max {
        let mut sum = 0u64;
        for k in 1..=n {
            let s: u64 = (1..=k).filter(|d| k % d == 0).map(|d| d as u64 * a[d]).sum();
            sum += s * a[n - k + 1];
        }
        a.push(sum / n as u64);
    }
    a.into_iter().skip(1).take(max).collect()
}

fn tree_counts(ctx: &Context) -> Result<Outcome> {
    let cap = ctx.config.degree_cap;
    let mut counts = vec![0u64; cap];
    for t in enumerate_trees(cap) {
        counts[t.degree() - 1] += 1;
    }
    let oracle = otter_counts(cap);
    let failures = if counts == oracle { vec![] } else { vec![format!("enumerated {counts:?}, oracle {oracle:?}")] };
    Ok(Outcome::new(failures, json!({ "enumerated": counts, "oracle": oracle })))
}

// ---------------------------------------------------------------- criterion 3

/// Expected nonzero brackets of each algebra.
pub fn expected_brackets(a: AlgebraName) -> Vec<String> {
    let mut lines = vec!["[X1, X2] = 2*X3".to_string()];
    let level = a.level();
    for j in 2..=level {
        lines.push(format!("[X1, X{}] = {}*X{}", j + 1, j + 1, j + 2));
    }
    if a.is_double() {
        lines.push("[X1, X3*] = -2*X2*".into());
        lines.push("[X2, X3*] = 2*X1*".into());
        for j in 2..=level {
            lines.push(format!("[X1, X{}*] = -{}*X{}*", j + 2, j + 1, j + 1));
            lines.push(format!("[X{}, X{}*] = {}*X1*", j + 1, j + 2, j + 1));
        }
    }
    lines
}

fn structure_constants(ctx: &Context, a: AlgebraName) -> Result<Outcome> {
    let g = ctx.lie(a);
    let computed: BTreeSet<String> = g.to_string().lines().map(str::to_string).collect();
    let expected: BTreeSet<String> = expected_brackets(a).into_iter().collect();
    let mut failures: Vec<String> = computed.difference(&expected).map(|l| format!("computed {l}")).collect();
    failures.extend(expected.difference(&computed).map(|l| format!("missing {l}")));
    if let Err(e) = g.check_jacobi() {
        failures.push(format!("Jacobi identity: {e}"));
    }
    Ok(Outcome::new(failures, json!({ "algebra": a, "brackets": computed })))
}

// ---------------------------------------------------------------- criterion 4

fn random_rational<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

/// Normal coordinates of a scalar character on `c₁ = •`, `c₂ = ladder₂`, `c₃ = cherry`.
fn normal_coordinates(phi: &Character, idx: [usize; 3]) -> [Scalar; 3] {
    let v = |i: usize| phi.value(idx[i]).coeff(0).constant_term();
    let (a, b, c) = (v(0), v(1), v(2));
    let x2 = &b - &(&a.pow(2) * &Scalar::ratio(1, 2));
    let x3 = &(&c - &(&a * &b)) + &(&a.pow(3) * &Scalar::ratio(1, 6));
    [a, x2, x3]
}

fn heisenberg_law(ctx: &Context) -> Result<Outcome> {
    let basis = Arc::new(AlgebraName::G1.tree_basis(ctx.config.orientation()));
    let find = |code: &str| {
        let t: RootedTree = code.parse().expect("valid code");
        basis.index_of(&t).ok_or_else(|| Error::NotClosed(code.into()))
    };
    let idx = [find("[]")?, find("[[]]")?, find("[[][]]")?];
    let w = Window::new(0, 0);
    let mut rng = ctx.config.rng("heisenberg", 0);
    let mut failures = Vec::new();
    let trials = ctx.config.random_characters;
    for trial in 0..trials {
        let mut draw = || {
            let vals = (0..basis.len()).map(|_| Laurent::from_scalar(w, random_rational(&mut rng))).collect();
            Character::new(basis.clone(), w, vals)
        };
        let (phi, chi) = (draw()?, draw()?);
        let [x1, x2, x3] = normal_coordinates(&phi, idx);
        let [y1, y2, y3] = normal_coordinates(&chi, idx);
        let got = normal_coordinates(&phi.convolve(&chi)?, idx);
        let want = [&x1 + &y1, &x2 + &y2, &(&(&x3 + &y3) + &(&x1 * &y2)) - &(&x2 * &y1)];
        if got != want && failures.len() < 3 {
            failures.push(format!("pair {trial}: got {got:?}, Heisenberg law gives {want:?}"));
        }
    }
    Ok(Outcome::new(failures, json!({ "pairs": trials })))
}

// ---------------------------------------------------------------- criterion 5

fn nilpotency_steps(ctx: &Context) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut steps = BTreeMap::new();
    for a in AlgebraName::ALL {
        let s = nilpotency_step(&ctx.lie(a))?;
        if s != a.level() + 1 {
            failures.push(format!("{a}: step {s}, expected {}", a.level() + 1));
        }
        steps.insert(a.to_string(), s);
    }
    Ok(Outcome::new(failures, json!({ "steps": steps })))
}

// ---------------------------------------------------------------- criterion 6

const DOUBLES: [AlgebraName; 3] = [AlgebraName::Delta1, AlgebraName::Delta2, AlgebraName::Delta3];

fn poisson_ranks(ctx: &Context) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut details = BTreeMap::new();
    for a in DOUBLES {
        let g = ctx.lie(a);
        let m = lie_poisson_matrix(&g, &g.coordinates())?;
        let symbolic = m.symbolic_rank().rank;
        let points = poisson::random_points(&g, 5, &mut ctx.config.rng("poisson-ranks", a.level() as u64));
        let at_points = points.iter().map(|p| m.rank_at(std::slice::from_ref(p))).collect::<Result<Vec<_>>>()?;
        let expected = 2 * a.level();
        if symbolic != expected || at_points.iter().max() != Some(&expected) {
            failures.push(format!("{a}: symbolic rank {symbolic}, point ranks {at_points:?}, expected {expected}"));
        }
        details.insert(a.to_string(), json!({ "symbolic": symbolic, "at_points": at_points }));
    }
    Ok(Outcome::new(failures, json!(details)))
}

// ---------------------------------------------------------- criteria 7 and 8

fn first_fit(ctx: &Context, base: AlgebraName) -> Result<(MultiPoly, String)> {
    let ansatz = ansatz_for(base);
    for r in ctx.flows.iter().filter(|r| r.algebra == base) {
        let Ok(traj) = &r.traj else { continue };
        if let Ok(fit) = poisson::fit_hamiltonian(&traj.beta0(), &traj.beta_k(1 - r.p), ansatz) {
            return Ok((fit.hamiltonian, r.label()));
        }
    }
    Err(Error::Inconsistent(format!("no generated {base} flow admits a fitted Hamiltonian")))
}

fn ansatz_for(base: AlgebraName) -> HamiltonianAnsatz {
    let dim = base.level() + 2;
    if base == AlgebraName::G1 {
        HamiltonianAnsatz::Diagonal { dim }
    } else {
        HamiltonianAnsatz::FullQuadratic { dim }
    }
}

/// The family checked for involution and independence on each double.
fn family(ctx: &Context, a: AlgebraName) -> Result<(Vec<PoissonPoly>, Value)> {
    let d = ctx.lie(a);
    Ok(match a {
        AlgebraName::Delta1 => {
            let (h, source) = first_fit(ctx, AlgebraName::G1)?;
            let mut fam = poisson::delta1_family(&d);
            fam[0] = PoissonPoly::new(d.clone(), h.clone())?;
            (fam, json!({ "fitted_h": h.to_string(), "fitted_from": source }))
        }
        AlgebraName::Delta2 => (poisson::delta2_family(&d), json!({})),
        _ => {
            let (h, source) = first_fit(ctx, AlgebraName::G3)?;
            let f = poisson::delta3_family(&d);
            let combo = f[0].add(&f[4])?.add(&f[5])?.add(&f[6])?;
            let fam = vec![PoissonPoly::new(d.clone(), h.clone())?, f[1].clone(), f[2].clone(), f[3].clone(), combo];
            (fam, json!({ "fitted_h": h.to_string(), "fitted_from": source }))
        }
    })
}

fn involution(ctx: &Context, a: AlgebraName) -> Result<Outcome> {
    let (fam, mut details) = family(ctx, a)?;
    let report = poisson::check_involution(&fam)?;
    let failures = report.failures.iter().map(|(i, j, w)| format!("{{f{}, f{}}} = {w}", i + 1, j + 1)).collect();
    details["functions"] = json!(fam.iter().map(|f| f.poly().to_string()).collect::<Vec<_>>());
    details["pairs_checked"] = json!(report.pairs_checked);
    Ok(Outcome::new(failures, details))
}

fn jacobian_ranks(ctx: &Context) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut details = BTreeMap::new();
    for (a, expected) in DOUBLES.into_iter().zip([5, 6, 5]) {
        let (fam, _) = family(ctx, a)?;
        let points = poisson::random_points(&ctx.lie(a), 5, &mut ctx.config.rng("jacobian", a.level() as u64));
        let at_points = poisson::jacobian_rank(&fam, &points)?;
        let symbolic = poisson::jacobian_symbolic_rank(&fam)?.rank;
        if at_points != expected || symbolic != expected {
            failures.push(format!("{a}: rank {at_points} at points, {symbolic} symbolic, expected {expected}"));
        }
        details.insert(a.to_string(), json!({ "at_points": at_points, "symbolic": symbolic }));
    }
    Ok(Outcome::new(failures, json!(details)))
}

// ---------------------------------------------------------------- criterion 9

fn flow_error(r: &FlowRecord) -> Option<String> {
    r.traj.as_ref().err().map(|e| format!("{}: {e}", r.label()))
}

fn lax_solution(ctx: &Context) -> Result<Outcome> {
    let results: Vec<(Vec<String>, f64)> = ctx
        .flows
        .par_iter()
        .map(|r| {
            let traj = match &r.traj {
                Ok(t) => t,
                Err(e) => return (vec![format!("{}: {e}", r.label())], f64::NAN),
            };
            let mut failures = Vec::new();
            match flow::verify_lax_identity(traj, &r.params) {
                Ok(rep) if rep.holds() => {}
                Ok(rep) => failures.push(format!("{}: {}", r.label(), rep.failures().join(", "))),
                Err(e) => failures.push(format!("{}: {e}", r.label())),
            }
            let err = match rk4::compare_with_rk4(traj, &r.params, &ctx.lie(r.algebra), RK4_STEP_TOLERANCE) {
                Ok(rep) => rep.max_rel_err,
                Err(e) => {
                    failures.push(format!("{}: rk4: {e}", r.label()));
                    f64::NAN
                }
            };
            if err.is_nan() || err > RK4_TOLERANCE {
                failures.push(format!("{}: RK4 relative error {err:e}", r.label()));
            }
            (failures, err)
        })
        .collect();
    let max_err = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let failures: Vec<String> = results.into_iter().flat_map(|r| r.0).collect();
    Ok(Outcome::new(
        failures,
        json!({ "flows": ctx.flows.len(), "rk4_max_relative_error": format!("{max_err:.3e}"), "rk4_tolerance": RK4_TOLERANCE }),
    ))
}

// --------------------------------------------------------------- criterion 10

fn trivial_regime(ctx: &Context) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for a in [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3] {
        let basis = ctx.basis(a);
        for i in 0..ctx.config.flows_per_case.div_ceil(4) {
            let mut rng = ctx.config.rng(&format!("trivial/{a}"), i as u64);
            let l0 = if i % 2 == 0 {
                flow::random_l0(basis.clone(), ctx.config.window, &mut rng)?
            } else {
                flow::random_holomorphic_l0(basis.clone(), ctx.config.window, &mut rng)?
            };
            let params = FlowParams { p: 1, algebra: a, l0: l0.clone(), window: ctx.config.window };
            let traj = flow::solve_lax(&params)?;
            checked += 1;
            let phi = tilde_r_inv(&l0)?;
            if traj.phi_t != phi {
                failures.push(format!("{a} #{i}: φ_t differs from φ"));
            }
            if traj.beta0().iter().any(|c| c.degree_in(crate::algebra::Var::T) > 0) {
                failures.push(format!("{a} #{i}: β̃₀ depends on t"));
            }
        }
    }
    Ok(Outcome::new(failures, json!({ "flows": checked, "p": 1 })))
}

// --------------------------------------------------------------- criterion 11

fn beta0_equation(ctx: &Context) -> Result<Outcome> {
    let failures: Vec<String> = ctx
        .flows
        .par_iter()
        .flat_map_iter(|r| {
            let out: Vec<String> = match &r.traj {
                Err(e) => vec![format!("{}: {e}", r.label())],
                Ok(traj) => match flow::verify_beta0_equation(traj, &r.params, &ctx.lie(r.algebra)) {
                    Ok(rep) => rep.failures().into_iter().map(|f| format!("{}: {f}", r.label())).collect(),
                    Err(e) => vec![format!("{}: {e}", r.label())],
                },
            };
            out
        })
        .collect();
    Ok(Outcome::new(failures, json!({ "flows": ctx.flows.len() })))
}

// --------------------------------------------------------------- criterion 12

fn beta0_degrees(ctx: &Context) -> Result<Outcome> {
    let mut failures: Vec<String> = ctx.flows.iter().filter_map(flow_error).collect();
    let mut details = BTreeMap::new();
    for a in [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3] {
        let degrees: Vec<u32> = ctx
            .flows
            .iter()
            .filter(|r| r.algebra == a)
            .filter_map(|r| r.traj.as_ref().ok())
            .map(|t| t.beta0_degree())
            .collect();
        let bound = a.level() as u32;
        let max = degrees.iter().copied().max().unwrap_or(0);
        if max > bound {
            failures.push(format!("{a}: β̃₀ has t-degree {max} > {bound}"));
        } else if max < bound {
            failures.push(format!("{a}: no flow reaches t-degree {bound}"));
        }
        let reaching = degrees.iter().filter(|&&d| d == bound).count();
        details.insert(
            a.to_string(),
            json!({ "bound": bound, "max": max, "flows_at_bound": reaching, "flows": degrees.len() }),
        );
    }
    Ok(Outcome::new(failures, json!(details)))
}

// --------------------------------------------------------------- criterion 13

fn hamiltonian_fit(ctx: &Context) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut details = BTreeMap::new();
    let mut drift_example: Option<String> = None;
    let (mut conserved, mut fitted_total) = (0, 0);
    for a in [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3] {
        let ansatz = ansatz_for(a);
        let d = ctx.lie(a.doubled());
        let (mut consistent, mut degenerate, mut obstructed) = (0, 0, 0);
        let mut equations = BTreeSet::new();
        let mut obstruction_example = None;
        for r in ctx.flows.iter().filter(|r| r.algebra == a) {
            let Ok(traj) = &r.traj else {
                failures.push(flow_error(r).unwrap_or_default());
                continue;
            };
            let (b0, bn) = (traj.beta0(), traj.beta_k(1 - r.p));
            match poisson::fit_hamiltonian(&b0, &bn, ansatz) {
                Ok(fit) => {
                    consistent += 1;
                    equations.insert(fit.equations);
                    if poisson::fit_residual(&fit.hamiltonian, &b0, &bn).iter().any(|x| !x.is_zero()) {
                        failures.push(format!("{}: fitted H leaves a residual", r.label()));
                    }
                    fitted_total += 1;
                    let h = PoissonPoly::new(d.clone(), fit.hamiltonian.clone())?;
                    let report = flow::conservation_report(traj, &[h]);
                    if report.conserved() {
                        conserved += 1;
                    } else if drift_example.is_none() {
                        drift_example =
                            Some(format!("{}: H = {} drifts by {}", r.label(), fit.hamiltonian, report.drifts[0]));
                    }
                }
                Err(Error::Inconsistent(msg)) => {
                    if poisson::is_degenerate_flow(&b0, &bn) {
                        degenerate += 1;
                    } else {
                        obstructed += 1;
                        obstruction_example.get_or_insert_with(|| format!("{}: {msg}", r.label()));
                    }
                }
                Err(e) => failures.push(format!("{}: {e}", r.label())),
            }
        }
        if a == AlgebraName::G1 && consistent < 20 {
            failures.push(format!("g1: only {consistent} consistent fits"));
        }
        if let Some(ex) = &obstruction_example {
            failures.push(format!("{a}: {obstructed} non-degenerate flows admit no {ansatz:?} fit, e.g. {ex}"));
        }
        details.insert(
            a.to_string(),
            json!({
                "ansatz": ansatz,
                "unknowns": ansatz.unknowns(),
                "equations": equations,
                "consistent": consistent,
                "degenerate": degenerate,
                "inconsistent_non_degenerate": obstructed,
            }),
        );
    }
    if let Some(ex) = drift_example {
        failures.push(format!(
            "{} of {fitted_total} fitted Hamiltonians are not conserved, e.g. {ex}",
            fitted_total - conserved
        ));
    }
    details.insert("conserved".into(), json!({ "conserved": conserved, "fitted": fitted_total }));
    Ok(Outcome::new(failures, json!(details)))
}

// --------------------------------------------------------------- criterion 14

fn random_character<R: Rng>(basis: &Arc<TreeBasis>, window: Window, lo: i32, rng: &mut R) -> Result<Character> {
    let values = (0..basis.len())
        .map(|_| Laurent::from_terms(window, (lo..=2).map(|k| (k, MultiPoly::constant(random_rational(rng))))))
        .collect::<Result<Vec<_>>>()?;
    Character::new(basis.clone(), window, values)
}

fn full_basis(ctx: &Context, max_degree: usize) -> Result<Arc<TreeBasis>> {
    Ok(Arc::new(TreeBasis::with_orientation(enumerate_trees(max_degree), ctx.config.orientation())?))
}

fn birkhoff_random(ctx: &Context) -> Result<Outcome> {
    let basis = full_basis(ctx, 4)?;
    let n = ctx.config.random_characters;
    let failures: Vec<String> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let run = || -> Result<Vec<String>> {
                let mut rng = ctx.config.rng("birkhoff", i as u64);
                let holomorphic = i % 5 == 4;
                let phi = random_character(&basis, ctx.config.window, if holomorphic { 0 } else { -2 }, &mut rng)?;
                let pair = birkhoff(&phi)?;
                let mut out = Vec::new();
                if pair.recompose()? != phi {
                    out.push(format!("character {i}: neg⁻¹⋆pos does not recompose"));
                }
                if !pair.is_normalized() {
                    out.push(format!("character {i}: factors are not normalized"));
                }
                if holomorphic && !pair.neg.is_counit() {
                    out.push(format!("character {i}: holomorphic input has a nontrivial counterterm"));
                }
                if i % 10 == 0 && birkhoff_by_splitting(&phi)? != pair {
                    out.push(format!("character {i}: the two factorization routes disagree"));
                }
                Ok(out)
            };
            run().unwrap_or_else(|e| vec![format!("character {i}: {e}")])
        })
        .collect();
    Ok(Outcome::new(
        failures,
        json!({ "characters": n, "basis_trees": basis.len(), "holomorphic": n / 5, "cross_checked": n.div_ceil(10) }),
    ))
}

// --------------------------------------------------------------- criterion 15

fn locality(ctx: &Context) -> Result<Outcome> {
    let basis = full_basis(ctx, 4)?;
    let n = ctx.config.random_characters / 5;
    let mut failures: Vec<String> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ctx.config.rng("locality", i as u64);
            match random_character(&basis, ctx.config.window, 0, &mut rng).and_then(|phi| is_local(&phi)) {
                Ok(true) => None,
                Ok(false) => Some(format!("holomorphic character {i} is not local")),
                Err(e) => Some(format!("holomorphic character {i}: {e}")),
            }
        })
        .collect();
    failures.extend(
        ctx.flows
            .par_iter()
            .filter_map(|r| match &r.traj {
                Err(e) => Some(format!("{}: {e}", r.label())),
                Ok(traj) => match is_local(&traj.phi_t) {
                    Ok(true) => None,
                    Ok(false) => Some(format!("{}: φ_t is not local", r.label())),
                    Err(e) => Some(format!("{}: {e}", r.label())),
                },
            })
            .collect::<Vec<_>>(),
    );
    Ok(Outcome::new(failures, json!({ "holomorphic_characters": n, "flows": ctx.flows.len() })))
}
