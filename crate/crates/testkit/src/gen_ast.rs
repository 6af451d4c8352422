//! Random query ASTs: purely syntactic ones for round-trip tests, and
//! model-aware ones that mostly elaborate against the handshake systems.

use rand::seq::SliceRandom;
use rand::Rng;

use handshake_core::automata::{CmpOp, Ident, SystemDef};
use handshake_core::property::{Access, PathQuantifier, Pred, ProcRef, PropertyAst, Quantifier, RangeSpec, Term};

const NAMES: [&str; 10] = ["i", "j", "k", "x", "tcb", "peer", "Server", "Legit_Client", "cur_state", "LISTEN"];

fn ident<R: Rng>(rng: &mut R) -> Ident {
    Ident::lit(NAMES.choose(rng).unwrap())
}

fn int<R: Rng>(rng: &mut R) -> Term {
    Term::Int(if rng.gen_bool(0.1) { rng.gen_range(-1000..1000) } else { rng.gen_range(-3..10) })
}

fn proc_ref<R: Rng>(rng: &mut R, depth: u32) -> ProcRef {
    ProcRef { template: ident(rng), arg: rng.gen_bool(0.5).then(|| Box::new(syn_term(rng, depth.saturating_sub(1)))) }
}

fn syn_term<R: Rng>(rng: &mut R, depth: u32) -> Term {
    let pick = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..6) };
    match pick {
        0 => int(rng),
        1 => Term::Name(ident(rng)),
        2 => {
            // Without a process, an index is required: a bare name is a
            // `Term::Name` and `a.b` reads as process `a`, variable `b`.
            let process = rng.gen_bool(0.5).then(|| proc_ref(rng, depth));
            let mut index = rng.gen_bool(0.5).then(|| Box::new(syn_term(rng, depth.saturating_sub(1))));
            let field = rng.gen_bool(0.5).then(|| ident(rng));
            if process.is_none() && index.is_none() {
                index = Some(Box::new(int(rng)));
            }
            Term::Access(Access { process, var: ident(rng), index, field })
        }
        3 | 4 => Term::Add(Box::new(syn_term(rng, depth - 1)), Box::new(syn_term(rng, depth - 1))),
        _ => Term::Sub(Box::new(syn_term(rng, depth - 1)), Box::new(syn_term(rng, depth - 1))),
    }
}

fn syn_pred<R: Rng>(rng: &mut R, depth: u32) -> Pred {
    let pick = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..9) };
    let sub = |rng: &mut R| Box::new(syn_pred(rng, depth - 1));
    match pick {
        0 => Pred::Bool(rng.gen_bool(0.5)),
        1 => Pred::Cmp(*CmpOp::ALL.choose(rng).unwrap(), syn_term(rng, depth.min(2)), syn_term(rng, depth.min(2))),
        2 => Pred::At(proc_ref(rng, 1), ident(rng)),
        3 => Pred::Not(sub(rng)),
        4 => Pred::And(sub(rng), sub(rng)),
        5 => Pred::Or(sub(rng), sub(rng)),
        6 => Pred::Imply(sub(rng), sub(rng)),
        _ => {
            let range = if rng.gen_bool(0.5) {
                RangeSpec::Named(ident(rng))
            } else {
                RangeSpec::Int(syn_term(rng, 1), syn_term(rng, 1))
            };
            let kind = if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
            Pred::Quant { kind, var: ident(rng), range, body: sub(rng) }
        }
    }
}

/// An arbitrary well-formed property; names need not resolve.
pub fn random_ast<R: Rng>(rng: &mut R) -> PropertyAst {
    let quantifier = if rng.gen_bool(0.5) { PathQuantifier::Invariant } else { PathQuantifier::Reach };
    let depth = rng.gen_range(0..=5);
    PropertyAst { quantifier, pred: syn_pred(rng, depth) }
}

/// Vocabulary of a handshake system used to build resolvable queries.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub n_legit: i64,
    pub n_clients: i64,
    pub resources: i64,
    pub states: Vec<String>,
    pub server_locations: Vec<String>,
    pub client_locations: Vec<String>,
}

impl Vocabulary {
    /// Reads names off a built handshake system.
    pub fn of(def: &SystemDef) -> Vocabulary {
        let count =
            |name: &str| def.typedefs.iter().find(|(k, _)| k.as_str() == name).map_or(0, |(_, r)| r.hi - r.lo + 1);
        let locations = |t: &str| {
            def.templates
                .iter()
                .find(|x| x.name.as_str() == t)
                .map(|x| x.locations.iter().map(|l| l.name.to_string()).collect())
                .unwrap_or_default()
        };
        const RESERVED: [&str; 4] = ["NONE", "RESOURCES", "T", "MAX_RETRANS"];
        Vocabulary {
            n_legit: count("legit_ids"),
            n_clients: count("ids"),
            resources: def.constant("RESOURCES").unwrap_or(1),
            states: def.constants.keys().map(|k| k.to_string()).filter(|k| !RESERVED.contains(&k.as_str())).collect(),
            server_locations: locations("Server"),
            client_locations: locations("Legit_Client"),
        }
    }
}

struct ModelGen<'v> {
    vocab: &'v Vocabulary,
    bound: Vec<&'static str>,
}

impl ModelGen<'_> {
    /// A client id expression: a bound variable or a literal in range.
    fn client<R: Rng>(&self, rng: &mut R, legit: bool) -> Term {
        let hi = if legit { self.vocab.n_legit } else { self.vocab.n_clients };
        match self.bound.choose(rng) {
            Some(b) if rng.gen_bool(0.7) => Term::name(b),
            _ => Term::Int(rng.gen_range(0..hi.max(1))),
        }
    }

    fn slot<R: Rng>(&self, rng: &mut R) -> Term {
        match self.bound.choose(rng) {
            Some(b) if rng.gen_bool(0.5) => Term::name(b),
            _ => Term::Int(rng.gen_range(0..self.vocab.resources)),
        }
    }

    fn value<R: Rng>(&self, rng: &mut R) -> Term {
        match rng.gen_range(0..8) {
            0 => Term::name(self.vocab.states.choose(rng).unwrap()),
            1 => Term::Int(rng.gen_range(-1..5)),
            2 => Term::name("last_sender"),
            3 => Term::name("NONE"),
            4 => Term::Access(Access {
                process: Some(ProcRef { template: Ident::lit("Server"), arg: None }),
                var: Ident::lit("tcb"),
                index: Some(Box::new(self.slot(rng))),
                field: Some(Ident::lit(if rng.gen_bool(0.5) { "peer" } else { "cur_state" })),
            }),
            5 => Term::Access(Access {
                process: None,
                var: Ident::lit("tcb"),
                index: Some(Box::new(self.slot(rng))),
                field: Some(Ident::lit(if rng.gen_bool(0.5) { "peer" } else { "cur_state" })),
            }),
            6 if self.vocab.n_legit > 0 => Term::Access(Access {
                process: Some(ProcRef {
                    template: Ident::lit("Legit_Client"),
                    arg: Some(Box::new(self.client(rng, true))),
                }),
                var: Ident::lit(if rng.gen_bool(0.5) { "cur_state" } else { "counter" }),
                index: None,
                field: None,
            }),
            _ => Term::Access(Access {
                process: Some(ProcRef { template: Ident::lit("Server"), arg: None }),
                var: Ident::lit("requester"),
                index: None,
                field: None,
            }),
        }
    }

    fn term<R: Rng>(&self, rng: &mut R) -> Term {
        let t = self.value(rng);
        match rng.gen_range(0..6) {
            0 => t.plus(Term::Int(rng.gen_range(0..3))),
            1 => t.minus(self.value(rng)),
            _ => t,
        }
    }

    fn pred<R: Rng>(&mut self, rng: &mut R, depth: u32) -> Pred {
        let pick = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..10) };
        match pick {
            0 => Pred::Cmp(*CmpOp::ALL.choose(rng).unwrap(), self.term(rng), self.term(rng)),
            1 if self.vocab.n_legit > 0 => Pred::At(
                ProcRef { template: Ident::lit("Legit_Client"), arg: Some(Box::new(self.client(rng, true))) },
                Ident::lit(self.vocab.client_locations.choose(rng).unwrap()),
            ),
            1 | 2 => Pred::At(
                ProcRef { template: Ident::lit("Server"), arg: None },
                Ident::lit(self.vocab.server_locations.choose(rng).unwrap()),
            ),
            3 => Pred::Not(Box::new(self.pred(rng, depth - 1))),
            4 => Pred::And(Box::new(self.pred(rng, depth - 1)), Box::new(self.pred(rng, depth - 1))),
            5 => Pred::Or(Box::new(self.pred(rng, depth - 1)), Box::new(self.pred(rng, depth - 1))),
            6 => Pred::Imply(Box::new(self.pred(rng, depth - 1)), Box::new(self.pred(rng, depth - 1))),
            _ => {
                let var = ["i", "j", "k"][self.bound.len().min(2)];
                let range = match rng.gen_range(0..3) {
                    0 => RangeSpec::Named(Ident::lit("ids")),
                    1 => RangeSpec::Int(Term::Int(0), Term::name("RESOURCES").minus(Term::Int(1))),
                    _ => RangeSpec::Int(Term::Int(0), Term::Int(self.vocab.n_clients - 1)),
                };
                let kind = if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
                self.bound.push(var);
                let body = self.pred(rng, depth - 1);
                self.bound.pop();
                Pred::Quant { kind, var: Ident::lit(var), range, body: Box::new(body) }
            }
        }
    }
}

/// A property over `vocab` that elaborates against the matching system.
pub fn random_model_property<R: Rng>(rng: &mut R, vocab: &Vocabulary) -> PropertyAst {
    let quantifier = if rng.gen_bool(0.5) { PathQuantifier::Invariant } else { PathQuantifier::Reach };
    let mut g = ModelGen { vocab, bound: Vec::new() };
    let depth = rng.gen_range(1..=4);
    PropertyAst { quantifier, pred: g.pred(rng, depth) }
}
