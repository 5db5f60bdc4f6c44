#![allow(dead_code)]

use std::path::{Path, PathBuf};

use kfree_cli::mapfile::emit_map;
use kfree_core::field::random_rational;
use kfree_core::preserver::{basis_swap_map, perturb_entry, TruncatedLinearMap};
use kfree_core::{QPoly, Rational, RationalField};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nonzero_rational(rng: &mut ChaCha8Rng, height: u64) -> Rational {
    loop {
        let q = random_rational(rng, height);
        if !q.is_zero() {
            return q;
        }
    }
}

pub fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, height: u64) -> QPoly {
    let deg = rng.gen_range(0..=max_deg);
    QPoly::new(RationalField, (0..=deg).map(|_| random_rational(rng, height)).collect())
}

/// Exit code, stdout and stderr of one in-process invocation, as one string.
pub fn transcript(args: &[String]) -> String {
    let out = kfree_cli::run(args);
    format!("exit: {}\n{}{}", out.code, out.stdout, out.stderr)
}

pub fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

pub fn write_map(dir: &Path, name: &str, map: &TruncatedLinearMap<RationalField>) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, emit_map(map)).unwrap();
    path
}

/// Map files used by the golden and determinism cases.
pub struct Fixtures {
    pub affine: String,
    pub quadratic: String,
    pub swap: String,
    pub perturbed: String,
}

pub fn fixtures(dir: &Path) -> Fixtures {
    let affine = dir.join("affine.json");
    let quadratic = dir.join("quadratic.json");
    let s = |p: &Path| p.display().to_string();
    let out = kfree_cli::run(args(&[
        "emit-map", "--a", "3", "--b", "-2", "--c", "5/7", "--n", "10", "--out", &s(&affine),
    ]));
    assert_eq!(out.code, 0, "{}", out.stderr);
    let out = kfree_cli::run(args(&[
        "emit-map", "--field", "sqrt:2", "--a", "(1+1*s)", "--b", "(0+1/2*s)", "--c", "3", "--sigma", "conj",
        "--n", "4", "--out", &s(&quadratic),
    ]));
    assert_eq!(out.code, 0, "{}", out.stderr);
    let swap = write_map(dir, "swap.json", &basis_swap_map(RationalField, 6, 1, 4).unwrap());
    let id = TruncatedLinearMap::identity(RationalField, 7);
    let perturbed = write_map(
        dir,
        "perturbed.json",
        &perturb_entry(&id, 2, 5, &kfree_core::field::rat(-1, 3)).unwrap(),
    );
    Fixtures {
        affine: s(&affine),
        quadratic: s(&quadratic),
        swap: s(&swap),
        perturbed: s(&perturbed),
    }
}

/// The representative invocations pinned by golden files.
pub fn golden_cases(fx: &Fixtures) -> Vec<(&'static str, Vec<String>)> {
    vec![
        ("kfree", args(&["kfree", "--k", "2", "X^3 - 2*X^2 + X"])),
        ("kroots", args(&["kroots", "--k", "2", "X^5 - 3*X^4 + 3*X^3 - X^2"])),
        ("recover", args(&["recover", "--map", &fx.affine, "--k", "2"])),
        ("recover_sigma", args(&["recover-sigma", "--map", &fx.quadratic, "--json"])),
        ("verify", args(&["verify", "--map", &fx.affine, "--k", "2", "--trials", "100", "--seed", "3"])),
        ("hunt", args(&["hunt", "--map", &fx.swap, "--k", "2", "--budget", "2000", "--seed", "7", "--json"])),
        ("catalan_derive", args(&["catalan-derive", "--n", "8"])),
        ("wronskian", args(&["wronskian", "X^3 + 1", "X^2 - X", "--n", "3"])),
        ("sturm", args(&["sturm", "X^5 - 5*X^3 + 4*X", "--lo", "-1", "--hi", "3/2"])),
        ("lemma54", args(&["lemma54", "X^4 - 2*X^3 + X^2", "--x", "1", "--json"])),
        (
            "codim1",
            args(&["codim1", "X^3 - 1", "X^2 + X + 1", "X^4", "X", "--n", "4", "--seed", "5"]),
        ),
        ("charp", args(&["charp", "--field", "Fp:3"])),
    ]
}

/// Every subcommand that takes `--seed` or runs on worker threads.
pub fn seeded_cases(fx: &Fixtures) -> Vec<Vec<String>> {
    vec![
        args(&["verify", "--map", &fx.perturbed, "--k", "2", "--trials", "300", "--seed", "11"]),
        args(&["verify", "--map", &fx.affine, "--k", "3", "--trials", "60", "--seed", "2", "--json"]),
        args(&["hunt", "--map", &fx.swap, "--k", "2", "--budget", "4000", "--seed", "1"]),
        args(&["hunt", "--map", &fx.perturbed, "--k", "3", "--budget", "3000", "--seed", "9", "--json"]),
        args(&["hunt", "--map", &fx.affine, "--k", "2", "--budget", "400", "--seed", "4"]),
        args(&["codim1", "X^2 - 2", "X^3", "X", "--n", "3", "--seed", "3", "--trials", "20"]),
        args(&["moment", "--n", "8", "--trials", "300", "--seed", "5"]),
        args(&["lemma42", "X^2", "X + 3", "--height", "20"]),
    ]
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}
