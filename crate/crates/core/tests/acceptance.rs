//! Acceptance run: one PASS/FAIL line per criterion, each combining the claim
//! status from `verify_all` with literal values and oracles kept in this file.

use std::collections::BTreeSet;
use std::process::ExitCode;

use ck_lax::claims::{verify_all, RunConfig, Status, VerificationReport, CLAIMS, RK4_TOLERANCE};
use ck_lax::lie::{lie_poisson_matrix, nilpotency_step, AlgebraName};
use ck_lax::trees::enumerate_trees;

/// Criteria that fail on the default run; the analysis is in the README.
const EXPECTED_FAILURES: &[u8] = &[13];

const NAMES: [&str; 15] = [
    "Hopf axioms on forests of degree <= 6",
    "rooted tree counts by degree",
    "structure constants",
    "Heisenberg group law on H1",
    "nilpotency steps",
    "Poisson ranks",
    "involution",
    "Jacobian independence",
    "Lax solution and RK4 agreement",
    "trivial regime p = 1",
    "beta0 equation",
    "t-degrees of beta0",
    "Hamiltonian fit and conservation",
    "Birkhoff factorization",
    "locality",
];

/// Unlabeled rooted trees by Otter's recurrence
/// `a(n+1) = (1/n) Σ_{k=1..n} (Σ_{d|k} d·a(d)) · a(n−k+1)`.
fn otter(max: usize) -> Vec<u64> {
    let mut a = vec![0u64; max + 1];
    a[1] = 1;
    for n in 1..max {
        let s: u64 =
            (1..=n).map(|k| (1..=k).filter(|d| k % d == 0).map(|d| d as u64 * a[d]).sum::<u64>() * a[n - k + 1]).sum();
        a[n + 1] = s / n as u64;
    }
    a[1..].to_vec()
}

fn reference_brackets(a: AlgebraName) -> BTreeSet<String> {
    let lines: &[&str] = match a {
        AlgebraName::G1 => &["[X1, X2] = 2*X3"],
        AlgebraName::Delta1 => &["[X1, X2] = 2*X3", "[X1, X3*] = -2*X2*", "[X2, X3*] = 2*X1*"],
        AlgebraName::Delta2 => &[
            "[X1, X2] = 2*X3",
            "[X1, X3*] = -2*X2*",
            "[X2, X3*] = 2*X1*",
            "[X1, X3] = 3*X4",
            "[X1, X4*] = -3*X3*",
            "[X3, X4*] = 3*X1*",
        ],
        AlgebraName::Delta3 => &[
            "[X1, X2] = 2*X3",
            "[X1, X3*] = -2*X2*",
            "[X2, X3*] = 2*X1*",
            "[X1, X3] = 3*X4",
            "[X1, X4*] = -3*X3*",
            "[X3, X4*] = 3*X1*",
            "[X1, X4] = 4*X5",
            "[X1, X5*] = -4*X4*",
            "[X4, X5*] = 4*X1*",
        ],
        _ => unreachable!(),
    };
    lines.iter().map(|s| s.to_string()).collect()
}

/// Independent confirmation of the criterion, where one exists outside the claim code.
fn independent(report: &VerificationReport, k: u8) -> Result<(), String> {
    let doubles = [AlgebraName::Delta1, AlgebraName::Delta2, AlgebraName::Delta3];
    match k {
        2 => {
            let mut counts = vec![0u64; 6];
            for t in enumerate_trees(6) {
                counts[t.degree() - 1] += 1;
            }
            let oracle = otter(6);
            if counts != oracle || oracle != [1, 1, 2, 4, 9, 20] {
                return Err(format!("enumerated {counts:?}, oracle {oracle:?}"));
            }
        }
        3 => {
            for a in [AlgebraName::G1, AlgebraName::Delta1, AlgebraName::Delta2, AlgebraName::Delta3] {
                let got: BTreeSet<String> = a.lie_data().to_string().lines().map(str::to_string).collect();
                if got != reference_brackets(a) {
                    return Err(format!("{a}: {got:?}"));
                }
            }
        }
        5 => {
            for (a, want) in AlgebraName::ALL.iter().zip([2, 3, 4, 2, 3, 4]) {
                let got = nilpotency_step(&a.lie_data()).map_err(|e| e.to_string())?;
                if got != want {
                    return Err(format!("{a}: step {got}, expected {want}"));
                }
            }
        }
        6 => {
            for (a, want) in doubles.iter().zip([2, 4, 6]) {
                let g = a.lie_data();
                let rank = lie_poisson_matrix(&g, &g.coordinates()).map_err(|e| e.to_string())?.symbolic_rank().rank;
                if rank != want {
                    return Err(format!("{a}: rank {rank}, expected {want}"));
                }
            }
        }
        8 => {
            let details = &report.claim("independence.jacobian_ranks").ok_or("missing claim")?.details;
            for (a, want) in doubles.iter().zip([5, 6, 5]) {
                let got = &details[a.to_string()]["at_points"];
                if got != want {
                    return Err(format!("{a}: rank {got}, expected {want}"));
                }
            }
        }
        12 => {
            let details = &report.claim("beta0.degrees").ok_or("missing claim")?.details;
            for (a, want) in ["g1", "g2", "g3"].iter().zip([1, 2, 3]) {
                if details[a]["max"] != want {
                    return Err(format!("{a}: max degree {}, expected {want}", details[a]["max"]));
                }
            }
        }
        _ => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let report = verify_all(&RunConfig::default());
    let criteria: BTreeSet<u8> = CLAIMS.iter().map(|&(_, k)| k).collect();
    let mut unexpected = 0;
    if criteria != (1..=15).collect() {
        println!("claim table does not cover criteria 1..15: {criteria:?}");
        unexpected += 1;
    }
    for k in 1..=15u8 {
        let check = independent(&report, k);
        let pass = report.criterion_passed(k) && check.is_ok();
        let tolerance = if k == 9 { format!("RK4 rel <= {RK4_TOLERANCE:e}") } else { "exact".to_string() };
        let expected_fail = EXPECTED_FAILURES.contains(&k);
        let verdict = match (pass, expected_fail) {
            (true, false) => "PASS".to_string(),
            (false, true) => "FAIL (expected, see README known deviations)".to_string(),
            (true, true) => "PASS (listed as an expected failure)".to_string(),
            (false, false) => "FAIL".to_string(),
        };
        println!("criterion {k:>2} [{tolerance}] {}: {verdict}", NAMES[k as usize - 1]);
        if pass == expected_fail {
            unexpected += 1;
        }
        if let Err(e) = &check {
            println!("    independent check: {e}");
        }
        for c in report.claims.iter().filter(|c| c.criterion == k && c.status == Status::Fail) {
            let witness = c.witness.as_deref().unwrap_or("").lines().next().unwrap_or("");
            println!("    {}: {witness}", c.claim_id);
        }
    }
    println!("{} claims passed, {} failed", report.passed, report.failed);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected outcome(s)");
        ExitCode::FAILURE
    }
}
