//! One PASS/FAIL line per criterion of the shipped suite; exits non-zero
//! if any criterion fails.

use freudhc::acceptance::{run_suite, Suite};

fn main() {
    let suite = Suite::shipped();
    println!("acceptance suite `{}` (seed {})", suite.name, suite.seed);
    let outcomes = run_suite(&suite, |o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
