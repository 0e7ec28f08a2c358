//! Analysis of a document and its JSON and text renderings.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cli::dsl::{DocumentError, SystemDocument};
use crate::exactalg::Rational;
use crate::integral::{
    character_report_in, point_frame, verify_integral_element, CharacterReport, IntegralError, MaximalSearch,
    PointFrame, DEFAULT_SEARCH_LIMIT,
};
use crate::pfaffian::{darboux_class_at, PfaffianError, PfaffianSystem};

pub const SCHEMA_VERSION: u32 = 1;
pub const SECTION_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSelection {
    /// Every point of the document, or the origin if there is none.
    All,
    Named(String),
    Coords(Vec<Rational>),
}

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub system: Option<String>,
    pub points: PointSelection,
    /// Restrict seeded chains to this seed set; all seed sets otherwise.
    pub seed: Option<String>,
    pub search_limit: usize,
    /// Random sections tried for the sampled gender; 0 disables it.
    pub section_samples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            system: None,
            points: PointSelection::All,
            seed: None,
            search_limit: DEFAULT_SEARCH_LIMIT,
            section_samples: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("point has {found} coordinates, chart has {expected}")]
    PointLength { expected: usize, found: usize },
}

fn q(x: &Rational) -> String {
    x.to_string()
}

fn qs(v: &[Rational]) -> Vec<String> {
    v.iter().map(q).collect()
}

fn qss(v: &[Vec<Rational>]) -> Vec<Vec<String>> {
    v.iter().map(|x| qs(x)).collect()
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct GeneratorEntry {
    pub label: String,
    pub form: String,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct SystemSection {
    pub name: String,
    pub coordinates: Vec<String>,
    pub n: usize,
    pub r: usize,
    pub generators: Vec<GeneratorEntry>,
    pub generic_pivots: Vec<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct FlagSection {
    pub ranks: Vec<usize>,
    pub systems: Vec<Vec<GeneratorEntry>>,
    pub terminal_integrable: bool,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Classification {
    pub integrable: bool,
    pub flag_system: bool,
    /// Flag of length zero (integrable system).
    pub flag_trivial: bool,
    pub rank_drop: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct CharacteristicSection {
    pub covector_rank: usize,
    pub covectors: Vec<Vec<String>>,
    pub characteristic_space: Vec<Vec<String>>,
    pub null_characteristics: bool,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct GenderSection {
    pub mod_system: usize,
    pub absolute: usize,
    /// Over generators and random sections, when sampling is enabled.
    pub sampled_mod_system: Option<usize>,
    pub sampled_absolute: Option<usize>,
    pub samples: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct DarbouxEntry {
    pub generator: String,
    pub class: Option<usize>,
    pub error: Option<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct MaximalSection {
    pub rho_max: Option<usize>,
    pub character_min: Option<usize>,
    pub upper_bound: Option<usize>,
    pub certified: Option<bool>,
    pub witness: Vec<Vec<String>>,
    pub witness_verified: Option<bool>,
    pub refused: Option<String>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ChainSection {
    /// `default` or the seed set name.
    pub seed: String,
    pub seed_vectors: Vec<Vec<String>>,
    pub error: Option<String>,
    pub chain: Vec<Vec<String>>,
    pub rho_chain: Option<usize>,
    pub character_chain: Option<usize>,
    pub enlarged_characters: Vec<usize>,
    /// `true`, `false` or `not-applicable`.
    pub singular_char2: String,
    pub systatic_indicator: Option<bool>,
    pub polar_increments_monotone: Option<bool>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct PointReport {
    pub name: String,
    pub coordinates: Vec<String>,
    pub degenerate: bool,
    pub diagnostic: Option<String>,
    pub sigma_dim: Option<usize>,
    pub annihilator_basis: Vec<Vec<String>>,
    pub characteristic: Option<CharacteristicSection>,
    pub gender: Option<GenderSection>,
    pub darboux: Vec<DarbouxEntry>,
    pub maximal: Option<MaximalSection>,
    pub characters: Vec<ChainSection>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool: Tool,
    pub input_digest: String,
    pub system: SystemSection,
    pub derived_flag: FlagSection,
    pub classification: Classification,
    pub points: Vec<PointReport>,
}

pub fn digest(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn generator_entries(s: &PfaffianSystem) -> Vec<GeneratorEntry> {
    s.generators()
        .iter()
        .zip(s.labels())
        .map(|(g, l)| GeneratorEntry {
            label: l.clone(),
            form: s.render(g),
        })
        .collect()
}

pub fn analyze(doc: &SystemDocument, source_text: &str, options: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let (name, system) = doc.system(options.system.as_deref())?;
    let n = system.nvars();
    let points: Vec<(String, Vec<Rational>)> = match &options.points {
        PointSelection::All if doc.points.is_empty() => vec![("origin".into(), system.origin())],
        PointSelection::All => doc.points.iter().map(|p| (p.name.clone(), p.coords.clone())).collect(),
        PointSelection::Named(p) => vec![(p.clone(), doc.point(p)?.to_vec())],
        PointSelection::Coords(c) => {
            if c.len() != n {
                return Err(AnalysisError::PointLength {
                    expected: n,
                    found: c.len(),
                });
            }
            vec![("coords".into(), c.clone())]
        }
    };
    let seed_names: Vec<String> = match &options.seed {
        Some(s) => {
            doc.seed_at(s, &system.origin())?;
            vec![s.clone()]
        }
        None => doc.seeds.iter().map(|s| s.name.clone()).collect(),
    };

    let flag = system.derived_flag();
    let class = flag.classification();
    let ranks = flag.ranks();
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool: Tool {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        },
        input_digest: digest(source_text),
        system: SystemSection {
            name,
            coordinates: system.coordinates().to_vec(),
            n,
            r: system.rank(),
            generators: generator_entries(&system),
            generic_pivots: system
                .generic_pivots()
                .iter()
                .map(|p| p.to_text(system.coordinates()))
                .collect(),
        },
        derived_flag: FlagSection {
            systems: flag.systems().iter().map(generator_entries).collect(),
            terminal_integrable: flag.terminal().is_frobenius_integrable(),
            ranks: ranks.clone(),
        },
        classification: Classification {
            integrable: system.is_frobenius_integrable(),
            flag_system: class.flag_system,
            flag_trivial: class.trivial,
            rank_drop: system.rank() - flag.first_derived().rank(),
        },
        points: points
            .iter()
            .map(|(pname, p)| analyze_point(doc, &system, pname, p, &seed_names, options))
            .collect(),
    };
    Ok(report)
}

fn analyze_point(
    doc: &SystemDocument,
    system: &PfaffianSystem,
    name: &str,
    p: &[Rational],
    seed_names: &[String],
    options: &AnalysisOptions,
) -> PointReport {
    let mut report = PointReport {
        name: name.to_string(),
        coordinates: qs(p),
        degenerate: false,
        diagnostic: None,
        sigma_dim: None,
        annihilator_basis: Vec::new(),
        characteristic: None,
        gender: None,
        darboux: Vec::new(),
        maximal: None,
        characters: Vec::new(),
    };
    report.darboux = system
        .generators()
        .iter()
        .zip(system.labels())
        .map(|(g, l)| match darboux_class_at(g, p) {
            Ok(c) => DarbouxEntry {
                generator: l.clone(),
                class: Some(c),
                error: None,
            },
            Err(e) => DarbouxEntry {
                generator: l.clone(),
                class: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let frame = match point_frame(system, p) {
        Ok(f) => f,
        Err(IntegralError::Pfaffian(e @ PfaffianError::Degenerate { .. })) => {
            report.degenerate = true;
            report.diagnostic = Some(e.to_string());
            return report;
        }
        Err(e) => {
            report.diagnostic = Some(e.to_string());
            return report;
        }
    };
    report.sigma_dim = Some(frame.dim());
    report.annihilator_basis = qss(frame.basis());
    let ch = system.characteristic_data_at(p).expect("point checked");
    report.characteristic = Some(CharacteristicSection {
        covector_rank: ch.covector_rank,
        covectors: qss(&ch.covectors),
        null_characteristics: ch.null_characteristics(),
        characteristic_space: qss(&ch.characteristic_space),
    });
    let sampled = |m: bool| {
        (options.section_samples > 0).then(|| {
            system
                .sampled_section_gender_at(p, m, options.section_samples, SECTION_SEED)
                .expect("point checked")
        })
    };
    report.gender = Some(GenderSection {
        mod_system: system.system_gender_at(p, true).expect("point checked"),
        absolute: system.system_gender_at(p, false).expect("point checked"),
        sampled_mod_system: sampled(true),
        sampled_absolute: sampled(false),
        samples: options.section_samples,
    });

    let mut chains = vec![chain_section(&frame, "default", Ok(Vec::new()), options.search_limit)];
    for s in seed_names {
        let seeds = doc.seed_at(s, p).map_err(|e| e.to_string());
        chains.push(chain_section(&frame, s, seeds, options.search_limit));
    }
    // the maximal search does not depend on the seeds
    if let Some((_, Some(r))) = chains.first() {
        report.maximal = Some(maximal_section(system, &frame, r));
    }
    report.characters = chains.into_iter().map(|(c, _)| c).collect();
    report
}

fn chain_section(
    frame: &PointFrame,
    seed: &str,
    seeds: Result<Vec<Vec<Rational>>, String>,
    limit: usize,
) -> (ChainSection, Option<CharacterReport>) {
    let mut section = ChainSection {
        seed: seed.to_string(),
        seed_vectors: Vec::new(),
        error: None,
        chain: Vec::new(),
        rho_chain: None,
        character_chain: None,
        enlarged_characters: Vec::new(),
        singular_char2: "not-applicable".into(),
        systatic_indicator: None,
        polar_increments_monotone: None,
    };
    let seeds = match seeds {
        Ok(s) => s,
        Err(e) => {
            section.error = Some(e);
            return (section, None);
        }
    };
    section.seed_vectors = qss(&seeds);
    match character_report_in(frame, &seeds, limit) {
        Ok(r) => {
            section.chain = qss(&r.chain);
            section.rho_chain = Some(r.rho_chain);
            section.character_chain = Some(r.character_chain);
            section.enlarged_characters = r.enlarged_characters.clone();
            section.singular_char2 = match r.singular_char2() {
                Some(b) => b.to_string(),
                None => "not-applicable".into(),
            };
            section.systatic_indicator = Some(r.systatic_indicator());
            section.polar_increments_monotone = Some(r.polar_increments_monotone());
            (section, Some(r))
        }
        Err(e) => {
            section.error = Some(e.to_string());
            (section, None)
        }
    }
}

fn maximal_section(system: &PfaffianSystem, frame: &PointFrame, r: &CharacterReport) -> MaximalSection {
    match &r.maximal {
        MaximalSearch::Found(m) => {
            let witness: Vec<Vec<Rational>> = m.witness.iter().map(|w| frame.to_ambient(w)).collect();
            let verified = verify_integral_element(system, frame.base_point(), &witness).ok();
            MaximalSection {
                rho_max: Some(m.rho_max),
                character_min: r.character_min(),
                upper_bound: Some(m.upper_bound),
                certified: Some(m.certified),
                witness: qss(&witness),
                witness_verified: verified,
                refused: None,
            }
        }
        MaximalSearch::Refused { dim, limit } => MaximalSection {
            rho_max: None,
            character_min: None,
            upper_bound: None,
            certified: None,
            witness: Vec::new(),
            witness_verified: None,
            refused: Some(format!("annihilator dimension {dim} exceeds search limit {limit}")),
        },
    }
}

pub fn to_json(report: &AnalysisReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or("-".to_string(), T::to_string)
}

pub fn to_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let s = &report.system;
    out.push_str(&format!("system {} on ({}), n = {}, r = {}\n", s.name, s.coordinates.join(", "), s.n, s.r));
    for g in &s.generators {
        out.push_str(&format!("  {} = {}\n", g.label, g.form));
    }
    let f = &report.derived_flag;
    out.push_str(&format!("derived flag ranks: {:?}\n", f.ranks));
    for (k, sys) in f.systems.iter().enumerate().skip(1) {
        let gens: Vec<String> = sys.iter().map(|g| g.form.clone()).collect();
        out.push_str(&format!("  P{k} = [{}]\n", gens.join(", ")));
    }
    let c = &report.classification;
    out.push_str(&format!(
        "integrable: {}, flag system: {}{}, rank drop: {}\n",
        c.integrable,
        c.flag_system,
        if c.flag_trivial { " (trivial)" } else { "" },
        c.rank_drop
    ));
    for p in &report.points {
        out.push_str(&format!("\npoint {} = ({})\n", p.name, p.coordinates.join(", ")));
        if let Some(d) = &p.diagnostic {
            out.push_str(&format!("  {}: {d}\n", if p.degenerate { "degenerate" } else { "error" }));
            continue;
        }
        out.push_str(&format!("  annihilator dimension: {}\n", opt(&p.sigma_dim)));
        if let Some(ch) = &p.characteristic {
            out.push_str(&format!(
                "  characteristic covector rank: {}, characteristic vectors: {}\n",
                ch.covector_rank,
                ch.characteristic_space.len()
            ));
        }
        if let Some(g) = &p.gender {
            out.push_str(&format!("  gender: {} mod system, {} absolute\n", g.mod_system, g.absolute));
        }
        let classes: Vec<String> = p
            .darboux
            .iter()
            .map(|d| format!("{}: {}", d.generator, opt(&d.class)))
            .collect();
        out.push_str(&format!("  Darboux classes: {}\n", classes.join(", ")));
        if let Some(m) = &p.maximal {
            match &m.refused {
                Some(reason) => out.push_str(&format!("  maximal search refused: {reason}\n")),
                None => out.push_str(&format!(
                    "  maximal integral dimension: {} (character {}, bound {}, {})\n",
                    opt(&m.rho_max),
                    opt(&m.character_min),
                    opt(&m.upper_bound),
                    if m.certified == Some(true) { "certified" } else { "grid search" }
                )),
            }
        }
        for ch in &p.characters {
            match &ch.error {
                Some(e) => out.push_str(&format!("  chain [{}]: error: {e}\n", ch.seed)),
                None => out.push_str(&format!(
                    "  chain [{}]: rho {}, character {}, s = {:?}, singular char 2: {}, systatic: {}\n",
                    ch.seed,
                    opt(&ch.rho_chain),
                    opt(&ch.character_chain),
                    ch.enlarged_characters,
                    ch.singular_char2,
                    opt(&ch.systatic_indicator)
                )),
            }
        }
    }
    out
}
