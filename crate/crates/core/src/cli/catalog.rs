//! Built-in example systems with their expected invariants.
//!
//! Each expectation records where the value comes from: a published
//! reference value, a hand derivation, or a trivial consequence of the
//! definitions. The acceptance suite and `catalog run-all` both read the
//! expectations from here.

use std::fmt;

use crate::cli::dsl::{parse_document, SystemDocument};
use crate::exactalg::Rational;
use crate::integral::{character_report, DEFAULT_SEARCH_LIMIT};
use crate::pfaffian::{darboux_class_at, PfaffianSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Reference,
    Derived,
    Trivial,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Reference => "reference value",
            Source::Derived => "hand derivation",
            Source::Trivial => "trivial",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    DerivedRanks(Vec<usize>),
    /// The first derived system is spanned by these forms.
    DerivedSpan(Vec<&'static str>),
    DerivedContains(&'static str),
    DerivedIntegrable(bool),
    Integrable(bool),
    FlagSystem(bool),
    SigmaDim(usize),
    CovectorRank(usize),
    NullCharacteristics(bool),
    /// Chain character for a named seed, or the default stream.
    CharacterChain {
        seed: Option<&'static str>,
        value: usize,
    },
    RhoMax(usize),
    /// Gender of `d(form)`.
    FormGender {
        form: &'static str,
        mod_system: bool,
        value: usize,
    },
    SystemGender {
        mod_system: bool,
        value: usize,
    },
    DarbouxClass {
        form: &'static str,
        value: usize,
    },
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conv = |m: bool| if m { "mod system" } else { "absolute" };
        match self {
            Check::DerivedRanks(_) => write!(f, "derived flag ranks"),
            Check::DerivedSpan(forms) => write!(f, "first derived system = span{{{}}}", forms.join(", ")),
            Check::DerivedContains(form) => write!(f, "first derived system contains {form}"),
            Check::DerivedIntegrable(_) => write!(f, "first derived system integrable"),
            Check::Integrable(_) => write!(f, "Frobenius integrable"),
            Check::FlagSystem(_) => write!(f, "flag system"),
            Check::SigmaDim(_) => write!(f, "annihilator dimension"),
            Check::CovectorRank(_) => write!(f, "characteristic covector rank"),
            Check::NullCharacteristics(_) => write!(f, "null characteristics"),
            Check::CharacterChain { seed, .. } => {
                write!(f, "chain character ({})", seed.unwrap_or("default stream"))
            }
            Check::RhoMax(_) => write!(f, "maximal integral element dimension"),
            Check::FormGender { form, mod_system, .. } => {
                write!(f, "gender of d({form}), {}", conv(*mod_system))
            }
            Check::SystemGender { mod_system, .. } => write!(f, "system gender, {}", conv(*mod_system)),
            Check::DarbouxClass { form, .. } => write!(f, "Darboux class of {form}"),
        }
    }
}

impl Check {
    pub fn expected(&self) -> String {
        match self {
            Check::DerivedRanks(r) => format!("{r:?}"),
            Check::DerivedSpan(_) | Check::DerivedContains(_) => "true".into(),
            Check::DerivedIntegrable(b)
            | Check::Integrable(b)
            | Check::FlagSystem(b)
            | Check::NullCharacteristics(b) => b.to_string(),
            Check::SigmaDim(v)
            | Check::CovectorRank(v)
            | Check::RhoMax(v)
            | Check::CharacterChain { value: v, .. }
            | Check::FormGender { value: v, .. }
            | Check::SystemGender { value: v, .. }
            | Check::DarbouxClass { value: v, .. } => v.to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Expectation {
    pub check: Check,
    /// Point name in the entry's document; ignored by generic checks.
    pub point: &'static str,
    pub source: Source,
    pub note: &'static str,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
    /// Seed set whose chain is the entry's designated chain; the default
    /// stream when absent.
    pub designated_seed: Option<&'static str>,
    pub expectations: Vec<Expectation>,
}

impl Entry {
    pub fn document(&self) -> SystemDocument {
        parse_document(self.text).expect("catalog documents parse")
    }

    pub fn system(&self) -> PfaffianSystem {
        self.document().system(None).expect("catalog systems are valid").1
    }
}

fn e(check: Check, point: &'static str, source: Source, note: &'static str) -> Expectation {
    Expectation {
        check,
        point,
        source,
        note,
    }
}

use Check::*;
use Source::*;

pub fn entries() -> Vec<Entry> {
    vec![
        Entry {
            name: "system-a",
            description: "dx1 + x4*dx5, dx2, dx3 on a 5-chart",
            text: include_str!("../../systems/system_a.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(Integrable(false), "origin", Reference, "dw1 = dx4∧dx5 is not congruent to zero"),
                e(DerivedRanks(vec![3, 2]), "origin", Reference, "derived system generated by w2, w3"),
                e(DerivedSpan(vec!["w2", "w3"]), "origin", Reference, "derived system generated by w2, w3"),
                e(DerivedIntegrable(true), "origin", Reference, "{dx2, dx3} is integrable"),
                e(SigmaDim(2), "origin", Reference, "annihilator is 2-dimensional"),
                e(CharacterChain { seed: None, value: 1 }, "origin", Reference, "maximal integral manifolds are lines"),
                e(CovectorRank(5), "origin", Derived, "i(e4)dw1 = dx5 and i(e5 - x4 e1)dw1 = -dx4 complete the coframe"),
                e(NullCharacteristics(true), "origin", Derived, "characteristic covectors span the cotangent space"),
                e(RhoMax(1), "origin", Reference, "the skew form on the annihilator is nondegenerate"),
                e(FormGender { form: "g", mod_system: false, value: 2 }, "origin", Reference, "d(w1 + x2*w3) = dx4∧dx5 + dx2∧dx3"),
                e(FormGender { form: "g", mod_system: true, value: 1 }, "origin", Derived, "a 4-form times the 3-form w1∧w2∧w3 vanishes on a 5-chart"),
                e(SystemGender { mod_system: true, value: 1 }, "origin", Derived, "only dw1 is nonzero"),
                e(CharacterChain { seed: None, value: 1 }, "generic", Derived, "same chain at a generic point"),
            ],
        },
        Entry {
            name: "system-a-tilde",
            description: "system A with w3 replaced by dx3 + x5*dx1",
            text: include_str!("../../systems/system_a_tilde.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DerivedRanks(vec![3, 2, 1]), "origin", Derived, "P1 = {w2, v3}, P2 = {w2}"),
                e(DerivedContains("v3"), "origin", Reference, "dv3 = dx5∧dx1 is congruent to zero"),
                e(DerivedIntegrable(false), "origin", Reference, "dv3∧w2∧v3 is nonzero"),
                e(CharacterChain { seed: None, value: 1 }, "origin", Derived, "dv3 vanishes on the annihilator at the origin"),
            ],
        },
        Entry {
            name: "system-b",
            description: "dx1 + x4*dx5, dx2 + x5*dx6, dx3 on a 6-chart",
            text: include_str!("../../systems/system_b.pfaff"),
            designated_seed: Some("tilted"),
            expectations: vec![
                e(DerivedRanks(vec![3, 1]), "origin", Reference, "rank drops by two"),
                e(DerivedSpan(vec!["w3"]), "origin", Reference, "derived system generated by dx3"),
                e(SigmaDim(3), "origin", Reference, "annihilator is 3-dimensional"),
                e(CharacterChain { seed: Some("tilted"), value: 2 }, "origin", Reference, "chain started on e5 - x4 e1 stops at once"),
                e(CharacterChain { seed: Some("tilted"), value: 2 }, "generic", Derived, "same chain at a generic point"),
                e(CharacterChain { seed: Some("plane"), value: 1 }, "origin", Derived, "e4 and e6 - x5 e2 span an integral plane"),
                e(CharacterChain { seed: None, value: 1 }, "origin", Derived, "default stream starts with e4"),
                e(RhoMax(2), "origin", Derived, "pencil rank 2 on a 3-dimensional annihilator"),
                e(NullCharacteristics(true), "origin", Derived, "i(v)dw over the annihilator completes the coframe"),
                e(FlagSystem(false), "origin", Reference, "rank drops by two"),
            ],
        },
        Entry {
            name: "system-b-tilde",
            description: "system B with w3 replaced by dx3 + x5*dx1",
            text: include_str!("../../systems/system_b_tilde.pfaff"),
            designated_seed: Some("tilted"),
            expectations: vec![
                e(DerivedSpan(vec!["v3"]), "origin", Reference, "derived system generated by v3"),
                e(DerivedIntegrable(false), "origin", Reference, "dv3∧v3 is nonzero"),
                e(DarbouxClass { form: "v3", value: 3 }, "origin", Reference, "dx3 + x5*dx1 needs three variables"),
                e(CharacterChain { seed: Some("tilted"), value: 2 }, "origin", Derived, "same chain as system B"),
            ],
        },
        Entry {
            name: "system-c",
            description: "cyclic system dx1 + x4*dx5, dx2 + x5*dx6, dx3 + x6*dx4",
            text: include_str!("../../systems/system_c.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DerivedRanks(vec![3, 0]), "origin", Reference, "the derived system is zero"),
                e(CovectorRank(6), "origin", Derived, "three interior products complete the coframe"),
                e(NullCharacteristics(true), "origin", Derived, "no vector is in involution with the whole annihilator"),
                e(CharacterChain { seed: None, value: 2 }, "origin", Derived, "only lines are integral"),
                e(RhoMax(1), "origin", Derived, "exhaustive search, witness re-verified"),
                e(SystemGender { mod_system: true, value: 1 }, "origin", Derived, "squares are 7-forms on a 6-chart"),
            ],
        },
        Entry {
            name: "integrable-plane",
            description: "dx2, dx3 on a 5-chart",
            text: include_str!("../../systems/integrable_plane.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(Integrable(true), "origin", Reference, "closed generators"),
                e(DerivedRanks(vec![2]), "origin", Trivial, "the derived system is the system itself"),
                e(FlagSystem(true), "origin", Trivial, "flag of length zero"),
                e(SigmaDim(3), "origin", Trivial, "n - r"),
                e(CovectorRank(2), "origin", Trivial, "CH = P for integrable systems"),
                e(CharacterChain { seed: None, value: 0 }, "origin", Trivial, "the annihilator is integral"),
                e(RhoMax(3), "origin", Reference, "rho = n - r exactly for integrable systems"),
                e(SystemGender { mod_system: true, value: 0 }, "origin", Reference, "gender zero for integrable systems"),
                e(SystemGender { mod_system: false, value: 0 }, "origin", Trivial, "closed generators"),
            ],
        },
        Entry {
            name: "goursat-2",
            description: "Goursat flag dy0 - y1*dx, dy1 - y2*dx",
            text: include_str!("../../systems/goursat_2.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DerivedRanks(vec![2, 1, 0]), "generic", Derived, "each step drops one"),
                e(FlagSystem(true), "generic", Derived, "ranks 2, 1, 0"),
                e(CharacterChain { seed: None, value: 1 }, "generic", Reference, "flag systems have character n - r - 1"),
                e(NullCharacteristics(true), "generic", Derived, "dy2∧dx pairs the two annihilator directions"),
            ],
        },
        Entry {
            name: "goursat-3",
            description: "Goursat flag on a 5-chart",
            text: include_str!("../../systems/goursat_3.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DerivedRanks(vec![3, 2, 1, 0]), "generic", Derived, "each step drops one"),
                e(FlagSystem(true), "generic", Derived, "ranks 3, 2, 1, 0"),
                e(CharacterChain { seed: None, value: 1 }, "generic", Reference, "flag systems have character n - r - 1"),
            ],
        },
        Entry {
            name: "darboux-h1",
            description: "normal form dy1, dz2 + p1*dz1",
            text: include_str!("../../systems/darboux_h1.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DerivedSpan(vec!["w1"]), "generic", Reference, "derived system spanned by the dy"),
                e(DerivedIntegrable(true), "generic", Reference, "derived system spanned by the dy"),
                e(CharacterChain { seed: None, value: 1 }, "generic", Reference, "normal form of character one"),
                e(DarbouxClass { form: "w2", value: 3 }, "generic", Reference, "class 2h + 1"),
            ],
        },
        Entry {
            name: "darboux-h2",
            description: "normal form dy1, dz3 + p1*dz1 + p2*dz2",
            text: include_str!("../../systems/darboux_h2.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DerivedSpan(vec!["w1"]), "generic", Reference, "derived system spanned by the dy"),
                e(DerivedIntegrable(true), "generic", Reference, "derived system spanned by the dy"),
                e(
                    CharacterChain { seed: None, value: 1 },
                    "generic",
                    Reference,
                    "normal form of character one; every chain ends on a Lagrangian plane of the 4-dimensional annihilator, so 2 is computed",
                ),
                e(DarbouxClass { form: "w2", value: 5 }, "generic", Reference, "class 2h + 1"),
            ],
        },
        Entry {
            name: "system-a-slice",
            description: "dx1 + x4*dx5 on the 3-chart (x1, x4, x5)",
            text: include_str!("../../systems/system_a_slice.pfaff"),
            designated_seed: None,
            expectations: vec![
                e(DarbouxClass { form: "w1", value: 3 }, "generic", Reference, "maximum Darboux class 3"),
                e(DarbouxClass { form: "w1", value: 3 }, "origin", Reference, "maximum Darboux class 3"),
                e(DerivedRanks(vec![1, 0]), "origin", Derived, "dw1∧w1 is nonzero"),
            ],
        },
    ]
}

pub fn entry(name: &str) -> Option<Entry> {
    entries().into_iter().find(|e| e.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub check: String,
    pub point: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
    pub source: Source,
    pub note: String,
}

/// Evaluates every expectation of `entry` against the library.
pub fn run_entry(entry: &Entry) -> Vec<Outcome> {
    let doc = entry.document();
    let (_, system) = doc.system(None).expect("catalog systems are valid");
    let flag = system.derived_flag();
    entry
        .expectations
        .iter()
        .map(|x| {
            let actual = evaluate(&doc, &system, &flag, x).unwrap_or_else(|err| format!("error: {err}"));
            let expected = x.check.expected();
            Outcome {
                check: x.check.to_string(),
                point: x.point.to_string(),
                passed: actual == expected,
                expected,
                actual,
                source: x.source,
                note: x.note.to_string(),
            }
        })
        .collect()
}

fn evaluate(
    doc: &SystemDocument,
    system: &PfaffianSystem,
    flag: &crate::pfaffian::DerivedFlag,
    x: &Expectation,
) -> Result<String, Box<dyn std::error::Error>> {
    let p: Vec<Rational> = doc.point(x.point)?.to_vec();
    let p1 = flag.first_derived();
    Ok(match &x.check {
        DerivedRanks(_) => format!("{:?}", flag.ranks()),
        DerivedSpan(forms) => {
            let span_forms: Vec<_> = forms.iter().map(|f| doc.form(f).expect("catalog form").clone()).collect();
            let target = PfaffianSystem::new(system.nvars(), span_forms)?;
            let mut same = target.rank() == p1.rank();
            for g in target.generators() {
                same &= p1.contains(g)?;
            }
            same.to_string()
        }
        DerivedContains(form) => p1.contains(doc.form(form).expect("catalog form"))?.to_string(),
        DerivedIntegrable(_) => p1.is_frobenius_integrable().to_string(),
        Integrable(_) => system.is_frobenius_integrable().to_string(),
        FlagSystem(_) => flag.classification().flag_system.to_string(),
        SigmaDim(_) => system.annihilator_at(&p)?.len().to_string(),
        CovectorRank(_) => system.characteristic_data_at(&p)?.covector_rank.to_string(),
        NullCharacteristics(_) => system.characteristic_data_at(&p)?.null_characteristics().to_string(),
        CharacterChain { seed, .. } => {
            let seeds = match seed {
                Some(s) => doc.seed_at(s, &p)?,
                None => Vec::new(),
            };
            character_report(system, &p, &seeds, DEFAULT_SEARCH_LIMIT)?
                .character_chain
                .to_string()
        }
        RhoMax(_) => character_report(system, &p, &[], DEFAULT_SEARCH_LIMIT)?
            .rho_max()
            .map_or("search refused".to_string(), |r| r.to_string()),
        FormGender { form, mod_system, .. } => {
            let omega = doc.form(form).expect("catalog form").exterior_derivative();
            system.gender_of_form_at(&omega, &p, *mod_system)?.to_string()
        }
        SystemGender { mod_system, .. } => system.system_gender_at(&p, *mod_system)?.to_string(),
        DarbouxClass { form, .. } => darboux_class_at(doc.form(form).expect("catalog form"), &p)?.to_string(),
    })
}
