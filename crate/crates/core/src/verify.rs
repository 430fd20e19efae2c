//! The invariant suite behind `weakot verify`.
//!
//! Every suite draws from its own seeded stream, so a report depends only on
//! the seed.

use std::fmt::Write as _;

use rand::Rng;

use crate::attacks::{
    alice_bound, alice_helstrom_attack, bob_bound, bob_closed_form, bob_purified_attack_detail,
    cheat_report, delta_quantity, f_quantity,
};
use crate::catalog::{build_cks, build_trivial, combined_bounds, random_complete_protocol, WCFPrimitive};
use crate::error::Result;
use crate::oracle::{cheat_grid, cks_alice_oracle, cks_alice_success, helstrom_oracle, uhlmann_oracle, CheatState};
use crate::protocol::{
    all_final_states, all_inputs, reduce_alice, run_honest, validate_completeness, ProtocolSpec,
    ReducedFamily,
};
use crate::qcore::{
    fidelity, guess_prob, helstrom, partial_trace, trace_norm, uhlmann_unitary, eigh, DensityOp, Factor,
    Owner, RegisterLayout, StateVector,
};
use crate::random::{random_density_any_rank, random_unit_vector, random_unitary, stream_rng, SimRng};
use crate::tradeoff::{curve, delta_star, prop3_bound, tune_lambda};
use crate::{TAU_EIG, TAU_NORM};

pub type FidelityFn = fn(&DensityOp, &DensityOp) -> Result<f64>;

/// Primitives the suites consult. Swapping one out is how the suite is
/// checked for sensitivity.
#[derive(Clone, Copy)]
pub struct Primitives {
    pub fidelity: FidelityFn,
}

impl Default for Primitives {
    fn default() -> Self {
        Primitives { fidelity }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("verify seed={}\n", self.seed);
        for s in &self.suites {
            let tag = if s.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {} {}", s.name, s.detail);
        }
        let passed = self.suites.iter().filter(|s| s.passed).count();
        let _ = writeln!(out, "{passed}/{} suites passed", self.suites.len());
        out
    }
}

/// Outcome of one suite: `Ok(detail)` or `Err(reason)`.
type Outcome = std::result::Result<String, String>;

type Suite<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: crate::Error) -> String {
    e.to_string()
}

fn random_pair(rng: &mut SimRng, dim: usize) -> (DensityOp, DensityOp) {
    (random_density_any_rank(dim, rng), random_density_any_rank(dim, rng))
}

/// Random 8-state family (not necessarily from any protocol).
pub fn random_family(rng: &mut SimRng, dim: usize) -> ReducedFamily {
    let rho = (0..8).map(|_| random_density_any_rank(dim, rng)).collect();
    ReducedFamily::new(rho).expect("equal dimensions")
}

pub fn fvdg_suite(rng: &mut SimRng, prims: &Primitives, pairs: usize) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for k in 0..pairs {
        let (rho, xi) = random_pair(rng, 2 + k % 3);
        let t = trace_norm(&(rho.mat() - xi.mat())).map_err(e2s)?;
        let f = (prims.fidelity)(&rho, &xi).map_err(e2s)?;
        let lower = 1.0 - 0.5 * t - f;
        let upper = f - (1.0 - 0.25 * t * t).max(0.0).sqrt();
        worst = worst.max(lower).max(upper);
        check(lower <= TAU_EIG && upper <= TAU_EIG, || {
            format!("pair {k}: 1-T/2={:.6} F={f:.6} sqrt(1-T²/4)={:.6}", 1.0 - 0.5 * t, (1.0 - 0.25 * t * t).max(0.0).sqrt())
        })?;
    }
    Ok(format!("pairs={pairs} worst_violation={worst:.3e}"))
}

fn norm_axioms_suite(rng: &mut SimRng) -> Outcome {
    use crate::qcore::CMat;
    use crate::random::gaussian_c64;
    for k in 0..100 {
        let d = 2 + k % 3;
        let mut g = || CMat::from_fn(d, d, |_, _| gaussian_c64(rng));
        let (a, b) = (g(), g());
        let (na, nb) = (trace_norm(&a).map_err(e2s)?, trace_norm(&b).map_err(e2s)?);
        let nab = trace_norm(&(&a + &b)).map_err(e2s)?;
        check(na >= 0.0 && nab <= na + nb + TAU_EIG, || format!("triangle inequality fails at {k}"))?;
        let u = random_unitary(d, rng);
        let v = random_unitary(d, rng);
        let rot = trace_norm(&(&(&u * &a) * &v)).map_err(e2s)?;
        check((rot - na).abs() <= TAU_EIG, || format!("unitary invariance fails at {k}"))?;
    }
    Ok("triples=100".into())
}

fn helstrom_suite(rng: &mut SimRng) -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let (rho, xi) = random_pair(rng, 2 + k % 3);
        let (m, p) = helstrom(&rho, &xi).map_err(e2s)?;
        let g = guess_prob(&rho, &xi).map_err(e2s)?;
        let direct = m.success(&rho, &xi);
        worst = worst.max((p - g).abs()).max((direct - g).abs());
        check(worst <= TAU_EIG, || format!("pair {k}: helstrom {p} vs guess_prob {g}"))?;
    }
    Ok(format!("pairs=100 max_gap={worst:.3e}"))
}

fn pure_fidelity_suite(rng: &mut SimRng, prims: &Primitives) -> Outcome {
    for k in 0..100 {
        let u = random_unit_vector(3, rng);
        let v = random_unit_vector(3, rng);
        let f = (prims.fidelity)(&DensityOp::from_pure(&u).map_err(e2s)?, &DensityOp::from_pure(&v).map_err(e2s)?)
            .map_err(e2s)?;
        let ip: num_complex::Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        check((f - ip.norm()).abs() <= TAU_EIG, || format!("pair {k}: F={f} |<u|v>|={}", ip.norm()))?;
    }
    Ok("pairs=100".into())
}

fn bipartite(dims: (usize, usize)) -> RegisterLayout {
    RegisterLayout::new(vec![Factor::new("x", dims.0, Owner::Alice), Factor::new("y", dims.1, Owner::Bob)])
        .expect("valid layout")
}

fn uhlmann_suite(rng: &mut SimRng) -> Outcome {
    for k in 0..100 {
        let l = bipartite((2 + k % 2, 2 + k % 3));
        let n = l.total_dim();
        let phi = StateVector::new(l.clone(), random_unit_vector(n, rng)).map_err(e2s)?;
        let psi = StateVector::new(l, random_unit_vector(n, rng)).map_err(e2s)?;
        let (u, ov) = uhlmann_unitary(&phi, &psi, &["y"]).map_err(e2s)?;
        let f = fidelity(&phi.reduced_on(&["x"]).map_err(e2s)?, &psi.reduced_on(&["x"]).map_err(e2s)?)
            .map_err(e2s)?;
        check(u.is_unitary(TAU_NORM), || format!("case {k}: U is not unitary"))?;
        check((ov - f).abs() <= TAU_EIG, || format!("case {k}: overlap {ov} vs fidelity {f}"))?;
    }
    Ok("cases=100".into())
}

fn partial_trace_suite(rng: &mut SimRng) -> Outcome {
    for k in 0..100 {
        let l = bipartite((2 + k % 3, 2 + (k / 3) % 3));
        let rho = random_density_any_rank(l.total_dim(), rng);
        for keep in ["x", "y"] {
            let red = partial_trace(&rho, &l, &[keep]).map_err(e2s)?;
            let (vals, _) = eigh(red.mat()).map_err(e2s)?;
            check((red.mat().trace().re - 1.0).abs() <= TAU_EIG && vals[0] >= -TAU_EIG, || {
                format!("case {k}: reduced state not a density operator")
            })?;
        }
    }
    Ok("cases=100".into())
}

fn catalog_specs(variants: u64, seed: u64) -> Vec<ProtocolSpec> {
    let mut specs = vec![build_cks(), build_trivial()];
    specs.extend((0..variants).map(|k| random_complete_protocol(seed.wrapping_add(k))));
    specs
}

fn honest_norm_suite(seed: u64) -> Outcome {
    for spec in catalog_specs(5, seed) {
        for (a, x0, x1) in all_inputs() {
            let psi = run_honest(&spec, a, x0, x1).map_err(e2s)?;
            check((psi.norm_sqr() - 1.0).abs() <= TAU_NORM, || format!("{} ({a},{x0},{x1})", spec.name()))?;
        }
    }
    Ok("specs=7".into())
}

/// Before Bob acts, Alice's registers do not depend on Bob's inputs.
fn prep_independence_suite(seed: u64) -> Outcome {
    use crate::protocol::Actor;
    for spec in catalog_specs(5, seed) {
        let alice = ProtocolSpec::acting_set(spec.layout(), Actor::Alice);
        let [i0, i1] = spec.x_indices();
        for a in 0..2u8 {
            let mut reduced = Vec::new();
            for x in 0..4usize {
                let mut d = vec![0; spec.layout().len()];
                d[i0] = x >> 1;
                d[i1] = x & 1;
                let init = StateVector::basis(spec.layout().clone(), &d).map_err(e2s)?;
                let prepared = init.apply_local(spec.alice_prep(a), &alice).map_err(e2s)?;
                reduced.push(prepared.reduced(&alice).map_err(e2s)?);
            }
            for r in &reduced[1..] {
                check(r.mat().approx_eq(reduced[0].mat(), TAU_NORM), || {
                    format!("{}: Alice's prepared state depends on Bob's inputs", spec.name())
                })?;
            }
        }
    }
    Ok("specs=7".into())
}

fn completeness_suite(seed: u64) -> Outcome {
    for spec in catalog_specs(5, seed) {
        let rep = validate_completeness(&spec);
        check(rep.passed, || format!("{}: {}", spec.name(), rep.failures.join("; ")))?;
        let rf = reduce_alice(&all_final_states(&spec).map_err(e2s)?).map_err(e2s)?;
        for other in 0..2u8 {
            let pairs = [
                (rf.get(0, 0, other), rf.get(0, 1, other)),
                (rf.get(1, other, 0), rf.get(1, other, 1)),
            ];
            for (p, q) in pairs {
                let g = guess_prob(p, q).map_err(e2s)?;
                check((g - 1.0).abs() <= TAU_EIG, || format!("{}: x_a pair not distinguishable", spec.name()))?;
            }
        }
    }
    Ok("specs=7".into())
}

fn f_delta_suite(rng: &mut SimRng, families: usize) -> Outcome {
    let mut worst = f64::INFINITY;
    for k in 0..families {
        let rf = random_family(rng, 2 + k % 3);
        let s = f_quantity(&rf).map_err(e2s)? + delta_quantity(&rf).map_err(e2s)?;
        let lhs = 2.0 * bob_bound(&rf).map_err(e2s)? + alice_bound(&rf).map_err(e2s)?;
        worst = worst.min(s);
        check(s >= 4.0 - TAU_EIG && lhs >= 2.0 - TAU_EIG, || format!("family {k}: F+Δ={s}"))?;
    }
    Ok(format!("families={families} min_F_plus_delta={worst:.9}"))
}

fn tradeoff_protocols_suite(seed: u64, count: u64) -> Outcome {
    let mut worst = f64::INFINITY;
    for k in 0..count {
        let spec = random_complete_protocol(seed.wrapping_add(k));
        let rep = cheat_report(&spec).map_err(e2s)?;
        worst = worst.min(rep.theorem1_lhs);
        check(rep.theorem1_holds(), || format!("{}: lhs {}", spec.name(), rep.theorem1_lhs))?;
    }
    Ok(format!("protocols={count} min_lhs={worst:.9}"))
}

fn purified_suite(seed: u64, variants: u64) -> Outcome {
    let mut specs = vec![build_cks(), build_trivial()];
    specs.extend((0..variants).map(|k| random_complete_protocol(seed.wrapping_add(1000 + k))));
    for spec in &specs {
        let rf = reduce_alice(&all_final_states(spec).map_err(e2s)?).map_err(e2s)?;
        for s in 0..2u8 {
            let d = bob_purified_attack_detail(spec, s).map_err(e2s)?;
            let closed = bob_closed_form(&rf, s).map_err(e2s)?;
            check((d.success - closed).abs() <= TAU_EIG, || {
                format!("{} s={s}: simulated {} vs closed form {closed}", spec.name(), d.success)
            })?;
            check((d.p_minus[s as usize] - 0.5).abs() <= TAU_EIG, || {
                format!("{} s={s}: a=s outcomes not equiprobable", spec.name())
            })?;
        }
    }
    Ok(format!("specs={}", specs.len()))
}

fn helstrom_attack_suite(seed: u64) -> Outcome {
    for spec in catalog_specs(5, seed) {
        let rf = reduce_alice(&all_final_states(&spec).map_err(e2s)?).map_err(e2s)?;
        let attack = alice_helstrom_attack(&rf).map_err(e2s)?;
        let bound = alice_bound(&rf).map_err(e2s)?;
        check((attack - bound).abs() <= TAU_EIG, || format!("{}: {attack} vs {bound}", spec.name()))?;
    }
    Ok("specs=7".into())
}

fn combined_bounds_suite() -> Outcome {
    for k in 0..=16 {
        for eps in [0.0, 0.01] {
            let w = WCFPrimitive::new(k as f64 / 16.0, eps, 4).map_err(e2s)?;
            let p = combined_bounds(&w).map_err(e2s)?;
            check((0.5..=1.0).contains(&p.a_bound) && (0.5..=0.75).contains(&p.b_bound), || {
                format!("λ={} ε={eps}: bounds out of range", w.lambda)
            })?;
            check(p.combined <= 2.0 + eps + TAU_NORM, || format!("λ={} ε={eps}: above 2+ε", w.lambda))?;
            if w.lambda >= eps && w.lambda + eps <= 1.0 {
                check((p.combined - 2.0 - eps).abs() <= TAU_NORM, || {
                    format!("λ={} ε={eps}: 2b+a={} off the line", w.lambda, p.combined)
                })?;
            }
        }
    }
    Ok("grid=17x2".into())
}

fn variants_preserve_suite(seed: u64) -> Outcome {
    for k in 0..10 {
        let spec = random_complete_protocol(seed.wrapping_add(k));
        let rf = reduce_alice(&all_final_states(&spec).map_err(e2s)?).map_err(e2s)?;
        let (d, f) = (delta_quantity(&rf).map_err(e2s)?, f_quantity(&rf).map_err(e2s)?);
        check(d.abs() <= TAU_EIG && (f - 4.0).abs() <= TAU_EIG, || format!("{}: Δ={d} F={f}", spec.name()))?;
    }
    Ok("variants=10".into())
}

fn robust_bound_monotone_suite() -> Outcome {
    let mut prev = prop3_bound(0.0).map_err(e2s)?;
    for i in 1..=1000 {
        let v = prop3_bound(0.5 * i as f64 / 1000.0).map_err(e2s)?;
        check(v >= prev, || format!("decrease at step {i}"))?;
        prev = v;
    }
    Ok("points=1000".into())
}

fn tune_lambda_suite() -> Outcome {
    let ds = delta_star();
    let mut prev = tune_lambda(0.0, 0.0).map_err(e2s)?.max_cheat;
    check((prev - 2.0 / 3.0).abs() <= TAU_NORM, || format!("max_cheat(0)={prev}"))?;
    for i in 1..=200 {
        let p = tune_lambda(ds * i as f64 / 200.0, 0.0).map_err(e2s)?;
        check(p.max_cheat >= prev - TAU_NORM && p.max_cheat - prev < 0.01, || format!("jump at step {i}"))?;
        check((0.0..=1.0).contains(&p.lambda_star), || format!("λ* out of range at step {i}"))?;
        prev = p.max_cheat;
    }
    check((prev - 0.75).abs() <= TAU_EIG, || format!("max_cheat(δ*)={prev}"))?;
    Ok("points=200".into())
}

fn curve_suite() -> Outcome {
    for n in [2usize, 3, 17, 101] {
        for p in curve(0.0, n, 20).map_err(e2s)? {
            check((p.combined - 2.0).abs() <= TAU_NORM, || format!("n={n} λ={}: {}", p.lambda, p.combined))?;
        }
    }
    Ok("curves=4".into())
}

fn closed_forms_suite(rng: &mut SimRng, count: usize) -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let cs = CheatState::random(rng);
        let s0 = cks_alice_success(&cs, 0).map_err(e2s)?;
        let s1 = cks_alice_success(&cs, 1).map_err(e2s)?;
        let g0 = (s0 - 0.5 - cs.alpha * cs.gamma).abs();
        let g1 = (s1 - 0.5 - cs.beta * cs.gamma).abs();
        worst = worst.max(g0).max(g1);
        check(g0 <= TAU_EIG && g1 <= TAU_EIG, || format!("state {k}: gaps {g0:.3e} {g1:.3e}"))?;
    }
    Ok(format!("states={count} max_gap={worst:.3e}"))
}

fn proof_bounds_suite() -> Outcome {
    let grid = 50;
    let slack = 2.0 / grid as f64;
    let mut feasible = 0usize;
    for delta in [0.0, 0.005, 0.01, 0.02, 0.0443, 0.1] {
        for (alpha, beta, gamma) in cheat_grid(grid) {
            let n = (alpha * alpha + beta * beta + gamma * gamma).sqrt();
            let cs = CheatState::orthonormal(alpha / n, beta / n, gamma / n).map_err(e2s)?;
            if cks_alice_success(&cs, 0).map_err(e2s)? >= 1.0 - delta - TAU_EIG {
                feasible += 1;
                check(cs.beta * cs.beta <= 2.0 * delta + slack, || format!("δ={delta}: β²={}", cs.beta * cs.beta))?;
                let d = cs.alpha - cs.gamma;
                check(d * d <= 2.0 * delta + slack, || format!("δ={delta}: (α−γ)²={}", d * d))?;
            }
        }
    }
    Ok(format!("feasible_points={feasible}"))
}

fn oracle_soundness_suite(rng: &mut SimRng, seed: u64) -> Outcome {
    let grid = 50;
    for i in 0..20 {
        let delta = 0.05 * i as f64 / 19.0;
        let est = cks_alice_oracle(delta, grid).map_err(e2s)?;
        let bound = prop3_bound(delta).map_err(e2s)?;
        check(est.value <= bound + est.tolerance, || format!("δ={delta}: oracle {} > bound {bound}", est.value))?;
    }
    for k in 0..20 {
        let (rho, xi) = random_pair(rng, 2 + k % 3);
        let h = helstrom_oracle(&rho, &xi, 200, seed.wrapping_add(k as u64)).map_err(e2s)?;
        check(h <= guess_prob(&rho, &xi).map_err(e2s)? + TAU_EIG, || format!("pair {k}: random measurement beats Helstrom"))?;
        let l = bipartite((2, 2));
        let phi = StateVector::new(l.clone(), random_unit_vector(4, rng)).map_err(e2s)?;
        let psi = StateVector::new(l, random_unit_vector(4, rng)).map_err(e2s)?;
        let u = uhlmann_oracle(&phi, &psi, &["y"], 200, seed.wrapping_add(k as u64)).map_err(e2s)?;
        let f = fidelity(&phi.reduced_on(&["x"]).map_err(e2s)?, &psi.reduced_on(&["x"]).map_err(e2s)?)
            .map_err(e2s)?;
        let (_, ov) = uhlmann_unitary(&phi, &psi, &["y"]).map_err(e2s)?;
        check(u <= f + TAU_EIG && ov >= u - TAU_EIG, || format!("case {k}: random unitary beats Uhlmann"))?;
    }
    Ok("deltas=20 pairs=20".into())
}

pub fn run_all(seed: u64) -> VerifyReport {
    run_all_with(seed, &Primitives::default())
}

pub fn run_all_with(seed: u64, prims: &Primitives) -> VerifyReport {
    let rng = |id: u64| stream_rng(seed, id);
    // Stable small integers from the seed for protocol generators.
    let spec_seed = rng(99).random::<u32>() as u64;
    let suites: Vec<Suite<'_>> = vec![
        ("qcore.fuchs_van_de_graaf", Box::new(|| fvdg_suite(&mut rng(1), prims, 500))),
        ("qcore.trace_norm_axioms", Box::new(|| norm_axioms_suite(&mut rng(2)))),
        ("qcore.helstrom_equals_guess_prob", Box::new(|| helstrom_suite(&mut rng(3)))),
        ("qcore.pure_state_fidelity", Box::new(|| pure_fidelity_suite(&mut rng(4), prims))),
        ("qcore.uhlmann_unitary", Box::new(|| uhlmann_suite(&mut rng(5)))),
        ("qcore.partial_trace", Box::new(|| partial_trace_suite(&mut rng(6)))),
        ("protocol.honest_normalization", Box::new(|| honest_norm_suite(spec_seed))),
        ("protocol.prep_input_independence", Box::new(|| prep_independence_suite(spec_seed))),
        ("protocol.completeness", Box::new(|| completeness_suite(spec_seed))),
        ("attacks.f_plus_delta", Box::new(|| f_delta_suite(&mut rng(7), 500))),
        ("attacks.tradeoff_random_protocols", Box::new(|| tradeoff_protocols_suite(spec_seed, 100))),
        ("attacks.purified_attack_closed_form", Box::new(|| purified_suite(spec_seed, 20))),
        ("attacks.helstrom_attack", Box::new(|| helstrom_attack_suite(spec_seed))),
        ("catalog.combined_bounds", Box::new(combined_bounds_suite)),
        ("catalog.variants_preserve_quantities", Box::new(|| variants_preserve_suite(spec_seed))),
        ("tradeoff.robust_bound_monotone", Box::new(robust_bound_monotone_suite)),
        ("tradeoff.tune_lambda", Box::new(tune_lambda_suite)),
        ("tradeoff.curve_on_line", Box::new(curve_suite)),
        ("oracle.closed_forms", Box::new(|| closed_forms_suite(&mut rng(8), 1000))),
        ("oracle.proof_bounds", Box::new(proof_bounds_suite)),
        ("oracle.soundness", Box::new(|| oracle_soundness_suite(&mut rng(9), seed))),
    ];
    let suites = suites
        .into_iter()
        .map(|(name, run)| match run() {
            Ok(detail) => SuiteResult { name, passed: true, detail },
            Err(detail) => SuiteResult { name, passed: false, detail },
        })
        .collect();
    VerifyReport { seed, suites }
}
