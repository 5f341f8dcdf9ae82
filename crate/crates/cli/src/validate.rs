//! Oracle cross-check suite: every closed form in the library is checked
//! against an independent route. Any mismatch is a nonzero exit.

use backflow_core::ctime::{volterra_oracle, ContinuousModel};
use backflow_core::dynamics::{
    bruteforce_eigenvalue_trajectory, classify_divisibility, eigenvalues_recurrence,
    eigenvalues_unitary_closed_form, CollisionModel,
};
use backflow_core::env::{build_chain, ChainParams};
use backflow_core::pauli::{choi_eigenvalues_numeric, diamond_norm_lower_bound, PauliDiagonalMap};
use backflow_core::qmat::ComplexMatrix;
use backflow_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Failure;

type Check = (&'static str, Result<String, String>);

fn random_params(rng: &mut impl Rng) -> ChainParams<f64> {
    let p = rng.gen_range(0.01..0.49);
    let r = rng.gen_range(0.0..(0.5 - p) * 0.98);
    let delta = rng.gen_range(0.0..=p);
    ChainParams::closed(p, r, delta).expect("sampled inside the constraint region")
}

fn discrete_oracles(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for draw in 0..60 {
        let params = random_params(&mut rng);
        let env = build_chain(params).map_err(|e| e.to_string())?;
        let unitary = draw % 2 == 0;
        let phi = if unitary {
            -1.0
        } else {
            rng.gen_range(-1.0..1.0)
        };
        let model = CollisionModel::new(env, phi).map_err(|e| e.to_string())?;
        let brute = bruteforce_eigenvalue_trajectory(&model, 8, 0.0).map_err(|e| e.to_string())?;
        let rec = eigenvalues_recurrence(&model, 8);
        #[allow(clippy::needless_range_loop)]
        for n in 0..=8 {
            worst = worst
                .max((brute[n][1] - rec.lam(n)).abs())
                .max((brute[n][3] - rec.lam3(n)).abs());
            if unitary {
                let (lam, lam3) =
                    eigenvalues_unitary_closed_form(&params, n).map_err(|e| e.to_string())?;
                worst = worst
                    .max((brute[n][1] - lam).abs())
                    .max((brute[n][3] - lam3).abs());
            }
        }
    }
    if worst < 1e-11 {
        Ok(format!("max deviation {worst:.3e} over 60 draws, n <= 8"))
    } else {
        Err(format!("max deviation {worst:.3e} exceeds 1e-11"))
    }
}

fn volterra_vs_closed_form() -> Result<String, String> {
    let mut worst = 0.0f64;
    for kappa in [0.0, 0.5, 2.0] {
        let model = ContinuousModel::new(1.0, kappa).map_err(|e| e.to_string())?;
        let samples = volterra_oracle(&model, 5.0f64, 1e-3).map_err(|e| e.to_string())?;
        for (t, lam) in samples {
            let (closed, _) = model.lambda_t(t);
            worst = worst.max((closed - lam).abs());
        }
    }
    if worst <= 1e-6 {
        Ok(format!("max deviation {worst:.3e} on t in [0, 5]"))
    } else {
        Err(format!("max deviation {worst:.3e} exceeds 1e-6"))
    }
}

fn divisibility_verdicts() -> Result<String, String> {
    let mut checked = 0usize;
    for r in [0.0, 0.1] {
        for i in 0..12 {
            let p = 0.02 + (0.44 - r - 0.02) * i as f64 / 11.0;
            let alpha = 1.0 - 2.0 * (p + r);
            for j in 0..12 {
                let delta = (p / alpha * j as f64 / 11.0 * alpha).min(p);
                let params = ChainParams::closed(p, r, delta).map_err(|e| e.to_string())?;
                classify_divisibility(&params, 40)
                    .map_err(|e| format!("p={p}, r={r}, delta={delta}: {e}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} grid points, analytic = numeric"))
}

fn choi_vs_bell(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let map = PauliDiagonalMap::new([
            1.0,
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ])
        .map_err(|e| e.to_string())?;
        let mut bell: Vec<f64> = map.bell_coefficients().coefficients().to_vec();
        bell.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in bell.iter().zip(choi_eigenvalues_numeric(&map)) {
            worst = worst.max((a - b).abs());
        }
    }
    if worst <= 1e-10 {
        Ok(format!("max deviation {worst:.3e} over 200 maps"))
    } else {
        Err(format!("max deviation {worst:.3e} exceeds 1e-10"))
    }
}

fn diamond_norm_oracle(seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5678);
    for _ in 0..25 {
        let map = PauliDiagonalMap::new([
            1.0,
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ])
        .map_err(|e| e.to_string())?;
        let mut candidates = Vec::new();
        for _ in 0..20 {
            let mut h = ComplexMatrix::zeros(4);
            for i in 0..4 {
                h.set(i, i, C64::new(rng.gen_range(-1.0..1.0), 0.0));
                for j in (i + 1)..4 {
                    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    h.set(i, j, z);
                    h.set(j, i, z.conj());
                }
            }
            candidates.push(h);
        }
        let lower = diamond_norm_lower_bound(&map, &candidates).map_err(|e| e.to_string())?;
        let closed = map.diamond_norm();
        if lower > closed + 1e-9 {
            return Err(format!("lower bound {lower} exceeds closed form {closed}"));
        }
        if lower < closed - 1e-6 {
            return Err(format!(
                "brute force {lower} does not reach the closed form {closed}"
            ));
        }
    }
    Ok("closed form matches the brute-force bound within 1e-6 on 25 maps".into())
}

/// Runs every cross-check, printing one line per check.
pub fn run_all(seed: u64) -> Result<(), Failure> {
    let checks: Vec<Check> = vec![
        ("discrete eigenvalue oracles", discrete_oracles(seed)),
        (
            "memory-kernel integrator vs closed form",
            volterra_vs_closed_form(),
        ),
        ("divisibility analytic vs Choi", divisibility_verdicts()),
        ("Choi spectra vs Bell coefficients", choi_vs_bell(seed)),
        ("diamond norm vs brute force", diamond_norm_oracle(seed)),
    ];
    let mut failed = false;
    for (name, outcome) in checks {
        match outcome {
            Ok(detail) => println!("validate {name}: ok - {detail}"),
            Err(detail) => {
                println!("validate {name}: FAILED - {detail}");
                failed = true;
            }
        }
    }
    if failed {
        Err(Failure::Validation("oracle cross-checks failed".into()))
    } else {
        Ok(())
    }
}
