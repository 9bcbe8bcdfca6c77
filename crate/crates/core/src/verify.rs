//! Self-check suite behind the `verify` subcommand: quick seeded checks of
//! the invariants the solver relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cases::{catalog, find_case, PRESSURELESS_POSITIVITY};
use crate::error::Result;
use crate::jordan::{block_size, build_chain, DEFAULT_RANK_TOL};
use crate::model::{pressureless_velocity, roe_property_residual, ModelKind, StateVector, SystemModel};
use crate::scheme::{harten_fix, interface_fluxes, max_stable_dt, step, SchemeKind};

const SEED: u64 = 0x5eed_f0d5;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

fn random_state(rng: &mut ChaCha8Rng, model: ModelKind) -> StateVector<f64> {
    let nonzero = |rng: &mut ChaCha8Rng| {
        let m = rng.gen_range(0.1..5.0);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };
    match model {
        ModelKind::Pressureless => {
            let rho = rng.gen_range(1e-3..10.0);
            let u: f64 = rng.gen_range(-5.0..5.0);
            StateVector::from_slice(&[rho, rho * u])
        }
        ModelKind::ModifiedBurgers => {
            let u = rng.gen_range(-5.0..5.0);
            StateVector::from_slice(&[u, nonzero(rng)])
        }
        ModelKind::FurtherModifiedBurgers => {
            let u = rng.gen_range(-5.0..5.0);
            StateVector::from_slice(&[u, nonzero(rng), nonzero(rng), nonzero(rng)])
        }
    }
}

fn roe_property(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let model = ModelKind::Pressureless;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (ul, ur) = (random_state(rng, model), random_state(rng, model));
        let df = (model.flux(&ur)? - model.flux(&ul)?).norm_inf();
        worst = worst.max(roe_property_residual(&model, &ul, &ur)? / (1.0 + df));
    }
    Ok((worst <= 1e-10, format!("1000 pairs, worst relative residual {worst:.3e}")))
}

fn jordan_structure(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for model in ModelKind::ALL {
        for _ in 0..100 {
            let u = random_state(rng, model);
            let a = model.jacobian(&u)?;
            let lambda = model.eigenvalue(&u);
            let s = block_size(&a, lambda, DEFAULT_RANK_TOL)?;
            ok &= s == model.dim();
            let chain = build_chain(&a, lambda, s, &[], DEFAULT_RANK_TOL)?;
            worst = worst.max(chain.residual / (1.0 + a.norm_inf()));
        }
    }
    ok &= worst <= 1e-10;
    Ok((ok, format!("300 states, worst relative chain residual {worst:.3e}")))
}

fn conservation(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut runs = 0;
    for case in catalog() {
        for scheme in [SchemeKind::Fdsj, SchemeKind::Llf] {
            let cfg = case.scheme_config::<f64>(scheme);
            let mut sol = case.initial_grid::<f64>(100)?;
            let dx = sol.dx();
            for _ in 0..50 {
                let dt = rng.gen_range(0.5..1.0) * max_stable_dt(&case.model, &sol, cfg.cfl);
                let (fluxes, _) = interface_fluxes(&case.model, &sol, &cfg)?;
                let next = step(&case.model, &sol, &cfg, dt)?;
                for c in 0..case.model.dim() {
                    let before = neumaier_sum(sol.cells.iter().map(|u| u[c] * dx));
                    let after = neumaier_sum(next.cells.iter().map(|u| u[c] * dx));
                    let expected = -dt * (fluxes[sol.n_cells()][c] - fluxes[0][c]);
                    let scale = 1.0 + neumaier_sum(sol.cells.iter().map(|u| u[c].abs() * dx));
                    worst = worst.max(((after - before) - expected).abs() / scale);
                }
                sol = next;
            }
            runs += 1;
        }
    }
    Ok((worst <= 1e-12, format!("{runs} runs x 50 steps, worst relative drift {worst:.3e}")))
}

fn entropy_fix() -> (bool, String) {
    let mut ok = true;
    for eps in [0.05f64, 0.1, 0.5] {
        ok &= (harten_fix(eps, eps) - eps).abs() <= 1e-14;
        ok &= (harten_fix(-eps, eps) - eps).abs() <= 1e-14;
        ok &= harten_fix(0.0, eps) == 0.5 * eps;
        ok &= harten_fix(2.0 * eps, eps) == 2.0 * eps;
    }
    (ok, "continuity and branches for eps in {0.05, 0.1, 0.5}".into())
}

fn positivity() -> Result<(bool, String)> {
    let case = find_case(PRESSURELESS_POSITIVITY)?;
    let cfg = case.scheme_config::<f64>(SchemeKind::Fdsj);
    let mut sol = case.initial_grid::<f64>(200)?;
    let (mut rho_min, mut u_min, mut u_max) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    while sol.time < case.t_final {
        let dt = max_stable_dt(&case.model, &sol, cfg.cfl).min(case.t_final - sol.time);
        sol = step(&case.model, &sol, &cfg, dt)?;
        for c in &sol.cells {
            rho_min = rho_min.min(c[0]);
            let u = pressureless_velocity(c);
            u_min = u_min.min(u);
            u_max = u_max.max(u);
        }
    }
    let ok = rho_min >= -1e-10 && u_min >= -0.5 - 1e-8 && u_max <= 0.5 + 1e-8;
    Ok((ok, format!("min rho {rho_min:.3e}, u in [{u_min}, {u_max}]")))
}

/// Runs every check with a fixed seed.
pub fn run_suite() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (fix_ok, fix_detail) = entropy_fix();
    vec![
        Check::from_result("roe-property", roe_property(&mut rng)),
        Check::from_result("jordan-structure", jordan_structure(&mut rng)),
        Check::from_result("conservation", conservation(&mut rng)),
        Check::new("entropy-fix", fix_ok, fix_detail),
        Check::from_result("positivity", positivity()),
    ]
}
