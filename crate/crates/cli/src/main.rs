use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gufactor::field::prime_power;
use gufactor::forms::DEFAULT_BUDGET;
use gufactor::wire::{
    encode_elem, from_json, parse_instance, to_json, CertificateDoc, FieldDoc, Instance,
    SurveyFailureDoc,
};
use gufactor::{
    factor::factor_det_refined_with, factor_with, survey, verify_certificate, Elem, Error, Ext,
    FactorOptions, FactorizationCertificate, GroupElement, HermitianSpace, Kind, Matrix,
    SurveyMode, Tower,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "gufactor",
    version,
    about = "Factor similitudes into anti-unitary involutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor the element of an instance file and write its certificate.
    Factor {
        instance: PathBuf,
        /// Orthogonal spaces only: choose h1 with det(h1) = (-1)^m.
        #[arg(long)]
        refined: bool,
        /// Certificate path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed stored in the instance.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Check a certificate against an instance.
    Verify {
        instance: PathBuf,
        certificate: PathBuf,
        /// Also require det(h1) = (-1)^m.
        #[arg(long)]
        refined: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Factor and verify every element (or a seeded sample) of a standard group.
    Survey {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        selection: Selection,
        #[arg(long)]
        refined: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Write the elements of a standard group as instance documents.
    Enumerate {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        selection: Selection,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the worked example: the transvection [[1,1],[0,1]] in Sp2(F3).
    Demo {
        /// Directory for instance.json and certificate.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// sp, go-plus, go-minus or u.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Order of F; for `u` the form lives over F_{q^2}.
    #[arg(long)]
    q: u64,
    /// Multiplier, as an integer or comma-separated coordinates.
    #[arg(long, default_value = "1")]
    beta: String,
}

#[derive(Args)]
struct Selection {
    #[arg(long, conflicts_with = "sample")]
    exhaustive: bool,
    #[arg(long, requires = "seed")]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl Selection {
    fn mode(&self) -> Result<SurveyMode, Failure> {
        match (self.exhaustive, self.sample, self.seed) {
            (_, Some(count), Some(seed)) => Ok(SurveyMode::Sample { count, seed }),
            (_, Some(_), None) => Err(Failure::Input("--sample needs --seed".into())),
            (true, None, _) | (false, None, _) => Ok(SurveyMode::Exhaustive {
                budget: self.budget,
            }),
        }
    }
}

enum Failure {
    /// Exit 1.
    Check(String),
    /// Exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant { .. } | Error::SurveyFailed(_) | Error::SearchFailed(_) => {
                Failure::Check(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Outcome {
    match path {
        Some(p) => write(p, &to_json(value)),
        None => Ok(()),
    }
}

fn standard_space(group: &GroupArgs) -> Result<(HermitianSpace, Elem), Failure> {
    let kind = Kind::parse(&group.kind)?;
    let (p, k) = prime_power(group.q)
        .ok_or_else(|| Failure::Input(format!("q = {} is not a prime power", group.q)))?;
    let ext = if kind == Kind::Hermitian {
        Ext::Quadratic
    } else {
        Ext::Trivial
    };
    let f = Tower::new(p as u64, k, ext, None)?;
    let space = HermitianSpace::standard(&f, group.n, kind)?;
    let beta = parse_beta(&f, &group.beta)?;
    Ok((space, beta))
}

fn parse_beta(f: &Tower, s: &str) -> Result<Elem, Failure> {
    let bad = || Failure::Input(format!("cannot parse beta {s:?}"));
    if s.contains(',') {
        let coords: Vec<u32> = s
            .split(',')
            .map(|c| c.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        Ok(f.decode(&coords)?)
    } else {
        Ok(f.from_int(s.trim().parse::<i64>().map_err(|_| bad())?))
    }
}

fn det_label(f: &Tower, cert: &FactorizationCertificate) -> Option<String> {
    if !cert.h1.is_linear() {
        return None;
    }
    let d = cert.h1.mat.det(f).ok()?;
    Some(if d == f.one() {
        "1".into()
    } else if d == f.from_int(-1) {
        "-1".into()
    } else {
        format!("{:?}", encode_elem(f, d))
    })
}

fn histogram<'a>(labels: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for l in labels {
        *out.entry(l.to_string()).or_insert(0) += 1;
    }
    out
}

fn show_histogram(h: &BTreeMap<String, usize>) -> String {
    h.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct FactorReport {
    beta: Vec<u32>,
    cases: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    det_h1: Option<String>,
    verification: gufactor::VerifyReport,
}

fn run_factor(
    inst: &Instance,
    refined: bool,
    seed: u64,
) -> Result<FactorizationCertificate, Failure> {
    let opts = FactorOptions { seed };
    if refined {
        let f = inst.space.tower();
        if f.is_quadratic() || inst.space.epsilon() != 1 || inst.space.n() % 2 == 1 || f.p() == 2 {
            return Err(Failure::Input(
                "--refined needs an even-dimensional orthogonal instance over odd q".into(),
            ));
        }
        Ok(factor_det_refined_with(&inst.space, &inst.element, &opts)?)
    } else {
        Ok(factor_with(&inst.space, &inst.element, &opts)?)
    }
}

fn cmd_factor(
    instance: &Path,
    refined: bool,
    out: &Option<PathBuf>,
    seed: Option<u64>,
    json_out: &Option<PathBuf>,
) -> Outcome {
    let inst = parse_instance(&read(instance)?)?;
    let f = inst.space.tower();
    let cert = run_factor(&inst, refined, seed.unwrap_or(inst.seed))?;
    let doc = CertificateDoc::from_certificate(f, &cert);
    let report = FactorReport {
        beta: encode_elem(f, cert.beta),
        cases: histogram(cert.labels()),
        det_h1: det_label(f, &cert),
        verification: verify_certificate(&inst.space, &inst.element, &cert, refined),
    };
    let mut summary = vec![
        format!("beta = {:?}", report.beta),
        format!("cases: {}", show_histogram(&report.cases)),
    ];
    if let Some(d) = &report.det_h1 {
        summary.push(format!("det(h1) = {d}"));
    }
    match out {
        Some(path) => {
            write(path, &to_json(&doc))?;
            summary.push(format!("certificate written to {}", path.display()));
            println!("{}", summary.join("\n"));
        }
        None => {
            eprintln!("{}", summary.join("\n"));
            print!("{}", to_json(&doc));
        }
    }
    write_json(json_out, &report)
}

fn cmd_verify(
    instance: &Path,
    certificate: &Path,
    refined: bool,
    json_out: &Option<PathBuf>,
) -> Outcome {
    let inst = parse_instance(&read(instance)?)?;
    let doc: CertificateDoc = from_json(&read(certificate)?)?;
    if doc.field != FieldDoc::from_tower(inst.space.tower()) {
        return Err(Failure::Check(format!(
            "field mismatch: certificate over {:?}, instance over {:?}",
            doc.field,
            FieldDoc::from_tower(inst.space.tower())
        )));
    }
    let (_, cert) = doc.to_certificate()?;
    let report = verify_certificate(&inst.space, &inst.element, &cert, refined || cert.refined);
    for c in &report.checks {
        match &c.witness {
            None => println!("ok   {}", c.name),
            Some(w) => println!("FAIL {}: {w}", c.name),
        }
    }
    write_json(json_out, &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Check("certificate rejected".into()))
    }
}

fn cmd_survey(
    group: &GroupArgs,
    selection: &Selection,
    refined: bool,
    json_out: &Option<PathBuf>,
) -> Outcome {
    let (space, beta) = standard_space(group)?;
    let mode = selection.mode()?;
    match survey(&space, beta, mode, refined) {
        Ok(summary) => {
            println!("{}/{} certified", summary.passed, summary.total);
            println!("cases: {}", show_histogram(&summary.cases));
            if !summary.determinants.is_empty() {
                println!("det(h1): {}", show_histogram(&summary.determinants));
            }
            write_json(json_out, &summary)
        }
        Err(Error::SurveyFailed(failure)) => {
            let seed = match mode {
                SurveyMode::Sample { seed, .. } => seed,
                SurveyMode::Exhaustive { .. } => 0,
            };
            let doc = SurveyFailureDoc::new(&space, &failure, seed);
            eprint!("{}", to_json(&doc));
            write_json(json_out, &doc)?;
            Err(Failure::Check(format!(
                "element {} failed: {}",
                failure.index, failure.reason
            )))
        }
        Err(e) => Err(e.into()),
    }
}

fn elements(
    space: &HermitianSpace,
    beta: Elem,
    mode: SurveyMode,
) -> Result<Vec<GroupElement>, Failure> {
    Ok(match mode {
        SurveyMode::Exhaustive { budget } => space.group_enumerate(beta, budget)?,
        SurveyMode::Sample { count, seed } => space.group_sample(beta, count, seed)?,
    })
}

fn cmd_enumerate(group: &GroupArgs, selection: &Selection, out: &Option<PathBuf>) -> Outcome {
    let (space, beta) = standard_space(group)?;
    let mode = selection.mode()?;
    let seed = selection.seed.unwrap_or(0);
    let docs: Vec<_> = elements(&space, beta, mode)?
        .into_iter()
        .map(|element| {
            Instance {
                space: space.clone(),
                element,
                seed,
            }
            .to_doc()
        })
        .collect();
    eprintln!("{} elements", docs.len());
    match out {
        Some(path) => write(path, &to_json(&docs)),
        None => {
            print!("{}", to_json(&docs));
            Ok(())
        }
    }
}

fn demo_instance() -> Instance {
    let f = Tower::new(3, 1, Ext::Trivial, None).expect("F3");
    let space = HermitianSpace::standard(&f, 2, Kind::Symplectic).expect("Sp2");
    let g = Matrix::from_ints(&f, &[&[1, 1], &[0, 1]]);
    let element = GroupElement::new(&space, g).expect("transvection");
    Instance {
        space,
        element,
        seed: 0,
    }
}

fn cmd_demo(out_dir: &Option<PathBuf>, json_out: &Option<PathBuf>) -> Outcome {
    let inst = demo_instance();
    let f = inst.space.tower();
    let cert = run_factor(&inst, false, 0)?;
    let report = verify_certificate(&inst.space, &inst.element, &cert, false);
    println!("Sp2(F3), g = [[1, 1], [0, 1]], beta = 1");
    println!("cases: {}", show_histogram(&histogram(cert.labels())));
    println!("h1 = {:?}", gufactor::wire::encode_matrix(f, &cert.h1.mat));
    println!("h2 = {:?}", gufactor::wire::encode_matrix(f, &cert.h2.mat));
    for c in &report.checks {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
        write(&dir.join("instance.json"), &to_json(&inst.to_doc()))?;
        write(
            &dir.join("certificate.json"),
            &to_json(&CertificateDoc::from_certificate(f, &cert)),
        )?;
    }
    write_json(json_out, &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Check("demo certificate rejected".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Factor {
            instance,
            refined,
            out,
            seed,
            json_out,
        } => cmd_factor(instance, *refined, out, *seed, json_out),
        Command::Verify {
            instance,
            certificate,
            refined,
            json_out,
        } => cmd_verify(instance, certificate, *refined, json_out),
        Command::Survey {
            group,
            selection,
            refined,
            json_out,
        } => cmd_survey(group, selection, *refined, json_out),
        Command::Enumerate {
            group,
            selection,
            out,
        } => cmd_enumerate(group, selection, out),
        Command::Demo { out_dir, json_out } => cmd_demo(out_dir, json_out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
