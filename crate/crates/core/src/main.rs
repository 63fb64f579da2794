//! Command-line front end: witness construction, verification, range scans,
//! Mersenne chains, and Fermat sums, with text or JSON output.
//!
//! Exit status: 0 = success / applicable / all checks passed,
//! 1 = hypothesis inapplicable or a verification check failed,
//! 2 = invalid input or unsupported width.

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;

use towersum::fermat::{fermat_sum_mod, FermatSumSpec};
use towersum::mersenne::{mersenne_verify, mersenne_witness, MersenneOutcome};
use towersum::tower::{TowerContext, DEFAULT_TERM_BUDGET};
use towersum::witness::{
    build_witness, scan, verify_witness, VerificationReport, Witness, WitnessOutcome,
};
use towersum::Error;

#[derive(Parser)]
#[command(
    name = "towersum",
    about = "Divisibility witnesses for sums 1 + 2^(2^n) + ... + 2^(2^(n+m)) modulo odd N",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the certificate (s, a, l, b, k_l, k_b, d, r) for an odd modulus
    Witness {
        /// Odd modulus N >= 3
        modulus: u128,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a certificate and check family members against the oracle
    Verify {
        /// Odd modulus N >= 3
        modulus: u128,
        /// Check n = a, 2a, ..., n_multiples*a
        #[arg(long, default_value_t = 2)]
        n_multiples: u32,
        /// Check family members i = 0..=i_max
        #[arg(long, default_value_t = 1)]
        i_max: u32,
        /// Term-count cap for term-wise summation
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build witnesses for every odd modulus in a range
    Scan {
        #[arg(long)]
        from: u128,
        #[arg(long)]
        to: u128,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Double Mersenne chain q -> 2^q - 1 -> 2^(2^q - 1) - 1 with its
    /// closed-form certificate
    Mersenne {
        #[arg(long)]
        q: u32,
        /// Check n = q, 2q, ..., k_max*q
        #[arg(long, default_value_t = 2)]
        k_max: u32,
        /// Check family members i = 0..=i_max
        #[arg(long, default_value_t = 1)]
        i_max: u32,
        /// Term-count cap for term-wise summation
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sum of Fermat numbers F_n + ... + F_(n+m) modulo an odd N
    FermatSum {
        /// Odd modulus N >= 3
        modulus: u128,
        #[arg(long)]
        n: u128,
        #[arg(long)]
        m: u64,
        /// Term-count cap
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Emit a single JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Serialize)]
struct WitnessJson {
    #[serde(rename = "N")]
    n: u128,
    s: u128,
    a: u128,
    l: u32,
    b: u128,
    #[serde(rename = "kl_mod_N")]
    kl_mod_n: u128,
    #[serde(rename = "kb_mod_N")]
    kb_mod_n: u128,
    d: u128,
    r: String,
    m0: String,
    period: String,
}

impl WitnessJson {
    fn from_witness(w: &Witness) -> Self {
        WitnessJson {
            n: w.modulus(),
            s: w.chain.s,
            a: w.a(),
            l: w.l,
            b: w.b,
            kl_mod_n: w.kl.value,
            kb_mod_n: w.kb.value,
            d: w.d,
            r: w.r.to_string(),
            m0: w.m0.to_string(),
            period: w.period.to_string(),
        }
    }
}

#[derive(Serialize)]
struct InapplicableJson {
    #[serde(rename = "N")]
    n: u128,
    applicable: bool,
    reason: &'static str,
}

#[derive(Serialize)]
struct CheckJson {
    n: u128,
    m: String,
    residue: u128,
    pass: bool,
    method: &'static str,
}

#[derive(Serialize)]
struct ReportJson {
    checks: Vec<CheckJson>,
}

impl ReportJson {
    fn from_report(report: &VerificationReport) -> Self {
        ReportJson {
            checks: report
                .checks
                .iter()
                .map(|c| CheckJson {
                    n: c.n,
                    m: c.m.to_string(),
                    residue: c.residue,
                    pass: c.pass,
                    method: c.method.as_str(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum ScanEntryJson {
    Witness(WitnessJson),
    Inapplicable(InapplicableJson),
}

#[derive(Serialize)]
struct ScanJson {
    results: Vec<ScanEntryJson>,
}

fn emit<T: Serialize>(payload: &T) {
    println!("{}", serde_json::to_string(payload).expect("serializable"));
}

fn witness_text(w: &Witness) -> String {
    format!(
        "N = {}: s = {}, a = {}, l = {}, b = {}, k_l = {} (mod N), k_b = {} (mod N), d = {}\n\
         least r with k_l + r*k_b = 0 (mod N): r = {}\n\
         family m = l + r*a + i*N*a = {} + {}*i  (i = 0, 1, 2, ...)",
        w.modulus(),
        w.chain.s,
        w.a(),
        w.l,
        w.b,
        w.kl.value,
        w.kb.value,
        w.d,
        w.r,
        w.m0,
        w.period,
    )
}

fn report_text(report: &VerificationReport) -> String {
    let mut lines = Vec::new();
    for c in &report.checks {
        lines.push(format!(
            "n = {}, m = {}: residue {} [{}] {}",
            c.n,
            c.m,
            c.residue,
            c.method.as_str(),
            if c.pass { "ok" } else { "FAIL" },
        ));
    }
    lines.join("\n")
}

fn run() -> Result<i32, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Witness { modulus, out } => match build_witness(modulus)? {
            WitnessOutcome::Applicable(w) => {
                if out.json {
                    emit(&WitnessJson::from_witness(&w));
                } else {
                    println!("{}", witness_text(&w));
                }
                Ok(0)
            }
            WitnessOutcome::Inapplicable(i) => {
                if out.json {
                    emit(&InapplicableJson {
                        n: i.modulus,
                        applicable: false,
                        reason: i.reason.as_str(),
                    });
                } else {
                    println!("N = {}: inapplicable ({})", i.modulus, i.reason.as_str());
                }
                Ok(1)
            }
        },
        Command::Verify { modulus, n_multiples, i_max, budget, out } => {
            match build_witness(modulus)? {
                WitnessOutcome::Applicable(w) => {
                    let report = verify_witness(&w, n_multiples, i_max, budget)?;
                    if out.json {
                        emit(&ReportJson::from_report(&report));
                    } else {
                        println!("{}", witness_text(&w));
                        println!("{}", report_text(&report));
                    }
                    Ok(if report.all_pass() { 0 } else { 1 })
                }
                WitnessOutcome::Inapplicable(i) => {
                    if out.json {
                        emit(&InapplicableJson {
                            n: i.modulus,
                            applicable: false,
                            reason: i.reason.as_str(),
                        });
                    } else {
                        println!("N = {}: inapplicable ({})", i.modulus, i.reason.as_str());
                    }
                    Ok(1)
                }
            }
        }
        Command::Scan { from, to, out } => {
            let records = scan(from, to)?;
            if out.json {
                let results = records
                    .iter()
                    .map(|rec| match &rec.outcome {
                        WitnessOutcome::Applicable(w) => {
                            ScanEntryJson::Witness(WitnessJson::from_witness(w))
                        }
                        WitnessOutcome::Inapplicable(i) => {
                            ScanEntryJson::Inapplicable(InapplicableJson {
                                n: i.modulus,
                                applicable: false,
                                reason: i.reason.as_str(),
                            })
                        }
                    })
                    .collect();
                emit(&ScanJson { results });
            } else {
                for rec in &records {
                    match &rec.outcome {
                        WitnessOutcome::Applicable(w) => println!(
                            "N = {}: applicable, m = {} + {}*i",
                            rec.modulus, w.m0, w.period
                        ),
                        WitnessOutcome::Inapplicable(i) => {
                            println!("N = {}: inapplicable ({})", rec.modulus, i.reason.as_str())
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Mersenne { q, k_max, i_max, budget, out } => match mersenne_witness(q)? {
            MersenneOutcome::Applicable(w) => {
                let report = mersenne_verify(&w, k_max, i_max, budget)?;
                #[derive(Serialize)]
                struct MersenneJson {
                    q: u32,
                    p: u32,
                    #[serde(rename = "N")]
                    n: String,
                    p_prime: bool,
                    #[serde(rename = "N_prime")]
                    n_prime: bool,
                    s: String,
                    a: u32,
                    l: u32,
                    b: u128,
                    kl: String,
                    kb: String,
                    r: String,
                    m0: String,
                    period: String,
                    checks: Vec<CheckJson>,
                }
                if out.json {
                    emit(&MersenneJson {
                        q: w.chain.q,
                        p: w.chain.p,
                        n: w.chain.n.to_string(),
                        p_prime: w.chain.p_prime,
                        n_prime: w.chain.n_prime,
                        s: w.s.to_string(),
                        a: w.a,
                        l: w.l,
                        b: w.b,
                        kl: w.kl.to_string(),
                        kb: w.kb.to_string(),
                        r: w.r.to_string(),
                        m0: w.m0.to_string(),
                        period: w.period.to_string(),
                        checks: ReportJson::from_report(&report).checks,
                    });
                } else {
                    println!(
                        "q = {}: p = {} (prime), N = {} (prime)",
                        w.chain.q, w.chain.p, w.chain.n
                    );
                    println!(
                        "s = p = {}, a = q = {}, l = {}, b = {}, k_l = {}, k_b = {}, r = {}",
                        w.s, w.a, w.l, w.b, w.kl, w.kb, w.r
                    );
                    println!("family m = {} + {}*i", w.m0, w.period);
                    println!("{}", report_text(&report));
                }
                Ok(if report.all_pass() { 0 } else { 1 })
            }
            MersenneOutcome::Inapplicable(i) => {
                #[derive(Serialize)]
                struct ChainJson {
                    q: u32,
                    p: u32,
                    #[serde(rename = "N")]
                    n: String,
                    p_prime: bool,
                    #[serde(rename = "N_prime")]
                    n_prime: bool,
                    applicable: bool,
                    reason: &'static str,
                }
                if out.json {
                    emit(&ChainJson {
                        q: i.chain.q,
                        p: i.chain.p,
                        n: i.chain.n.to_string(),
                        p_prime: i.chain.p_prime,
                        n_prime: i.chain.n_prime,
                        applicable: false,
                        reason: i.reason.as_str(),
                    });
                } else {
                    println!(
                        "q = {}: p = {}, N = {}: inapplicable ({})",
                        i.chain.q,
                        i.chain.p,
                        i.chain.n,
                        i.reason.as_str()
                    );
                }
                Ok(1)
            }
        },
        Command::FermatSum { modulus, n, m, budget, out } => {
            let ctx = TowerContext::new(modulus)?;
            let spec = FermatSumSpec { n, m, modulus };
            let residue = fermat_sum_mod(&spec, &ctx, budget)?;
            let m_mod: BigUint = BigUint::from(m) % BigUint::from(modulus);
            if out.json {
                #[derive(Serialize)]
                struct FermatJson {
                    #[serde(rename = "N")]
                    n_modulus: u128,
                    n: String,
                    m: String,
                    residue: u128,
                    m_mod_n: String,
                }
                emit(&FermatJson {
                    n_modulus: modulus,
                    n: n.to_string(),
                    m: m.to_string(),
                    residue: residue.value,
                    m_mod_n: m_mod.to_string(),
                });
            } else {
                println!(
                    "F_{n} + ... + F_{} = {} (mod {}); m mod N = {}",
                    n + m as u128,
                    residue.value,
                    modulus,
                    m_mod
                );
            }
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
