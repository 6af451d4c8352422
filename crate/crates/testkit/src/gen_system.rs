//! Random small systems for differential testing of the successor relation.
//!
//! Bounds: at most 3 processes, 4 locations per template, 2 variable
//! declarations and 1 clock. Every variable ranges over `[0, 2]` and every
//! assigned value is drawn from that range, so updates never overflow.

use rand::seq::SliceRandom;
use rand::Rng;

use handshake_core::automata::{
    Channel, ClockDecl, CmpOp, Edge, Expr, Ident, Index, IntRange, IntSpec, Location, Parameter, ProcessInstance,
    ProcessTemplate, Shape, SystemDef, UpdateStep, VarRef, VariableDecl,
};

const VMAX: i64 = 2;

#[derive(Clone)]
struct VarInfo {
    name: String,
    array: bool,
    owner: Option<usize>,
}

struct Ctx<'a> {
    vars: Vec<&'a VarInfo>,
    has_param: bool,
    has_select: bool,
    clock: bool,
}

fn index<R: Rng>(rng: &mut R, cx: &Ctx<'_>) -> Index {
    let mut opts = vec![Index::Lit(0), Index::Lit(1)];
    if cx.has_select {
        opts.push(Index::Param(Ident::lit("s")));
    }
    if cx.has_param {
        opts.push(Index::Param(Ident::lit("id")));
    }
    opts.choose(rng).unwrap().clone()
}

fn var_ref<R: Rng>(rng: &mut R, cx: &Ctx<'_>) -> Option<VarRef> {
    let v = cx.vars.choose(rng)?;
    Some(VarRef { name: Ident::lit(&v.name), index: v.array.then(|| index(rng, cx)), field: None })
}

/// An integer term whose value lies in `[0, 2]` when `bounded`.
fn int_term<R: Rng>(rng: &mut R, cx: &Ctx<'_>, depth: u32, bounded: bool) -> Expr {
    if !bounded && depth > 0 && rng.gen_bool(0.3) {
        let (a, b) = (int_term(rng, cx, depth - 1, false), int_term(rng, cx, depth - 1, false));
        return if rng.gen_bool(0.5) { a.plus(b) } else { a.minus(b) };
    }
    match rng.gen_range(0..4) {
        0 => var_ref(rng, cx).map(Expr::Var).unwrap_or(Expr::Int(rng.gen_range(0..=VMAX))),
        1 if cx.has_select => Expr::param("s"),
        2 if cx.has_param => Expr::param("id"),
        _ => Expr::Int(rng.gen_range(0..=VMAX)),
    }
}

fn guard<R: Rng>(rng: &mut R, cx: &Ctx<'_>, depth: u32) -> Expr {
    if depth > 0 && rng.gen_bool(0.35) {
        let (a, b) = (guard(rng, cx, depth - 1), guard(rng, cx, depth - 1));
        return match rng.gen_range(0..4) {
            0 => a.and(b),
            1 => a.or(b),
            2 => a.imply(b),
            _ => a.not(),
        };
    }
    let op = *CmpOp::ALL.choose(rng).unwrap();
    match rng.gen_range(0..5) {
        0 => Expr::Bool(rng.gen_bool(0.8)),
        1 if cx.clock => Expr::clock("c").cmp(op, Expr::Int(rng.gen_range(0..=VMAX))),
        _ => int_term(rng, cx, 1, false).cmp(op, int_term(rng, cx, 1, false)),
    }
}

fn template<R: Rng>(rng: &mut R, k: usize, vars: &[VarInfo], clock: bool, channels: &[String]) -> ProcessTemplate {
    let mut t = ProcessTemplate::new(&format!("P{k}"));
    let has_param = rng.gen_bool(0.5);
    if has_param {
        t.parameters.push(Parameter { name: Ident::lit("id"), range: IntRange::new(0, 1) });
    }
    if clock {
        t.clocks.push(ClockDecl { name: Ident::lit("c"), ceiling: VMAX + 1 });
    }
    for v in vars.iter().filter(|v| v.owner == Some(k)) {
        t.locals.push(decl(rng, v));
    }
    let n_locs = rng.gen_range(1..=4);
    for i in 0..n_locs {
        let mut l = if i > 0 && rng.gen_bool(0.2) {
            Location::committed(&format!("L{i}"))
        } else {
            Location::normal(&format!("L{i}"))
        };
        if i == 0 {
            l = l.initial();
        }
        if clock && rng.gen_bool(0.4) {
            l = l.with_invariant(Expr::clock("c").le(Expr::Int(rng.gen_range(1..=VMAX))));
        }
        t.locations.push(l);
    }
    let visible: Vec<&VarInfo> = vars.iter().filter(|v| v.owner.is_none() || v.owner == Some(k)).collect();
    for _ in 0..rng.gen_range(1..=8) {
        let (src, dst) = (rng.gen_range(0..n_locs), rng.gen_range(0..n_locs));
        let mut e = Edge::new(&format!("L{src}"), &format!("L{dst}"));
        let has_select = rng.gen_bool(0.3);
        if has_select {
            e = e.select("s", 0, 1);
        }
        let cx = Ctx { vars: visible.clone(), has_param, has_select, clock };
        if rng.gen_bool(0.4) {
            e = e.guard(guard(rng, &cx, 2));
        }
        if !channels.is_empty() {
            let ch = channels.choose(rng).unwrap();
            e = match rng.gen_range(0..4) {
                0 => e.send(ch),
                1 => e.receive(ch),
                _ => e,
            };
        }
        for _ in 0..rng.gen_range(0..=3) {
            if clock && rng.gen_bool(0.3) {
                e.update.push(UpdateStep::ResetClock(Ident::lit("c")));
            } else if let Some(target) = var_ref(rng, &cx) {
                let value = int_term(rng, &cx, 0, true);
                e.update.push(UpdateStep::Assign(target, value));
            }
        }
        t.edges.push(e);
    }
    t
}

fn decl<R: Rng>(rng: &mut R, v: &VarInfo) -> VariableDecl {
    VariableDecl {
        name: Ident::lit(&v.name),
        len: v.array.then_some(2),
        shape: Shape::Int(IntSpec { range: IntRange::new(0, VMAX), initial: rng.gen_range(0..=VMAX) }),
    }
}

/// A random well-formed system.
pub fn random_system<R: Rng>(rng: &mut R) -> SystemDef {
    let n_procs = *[1, 2, 2, 3, 3, 3].choose(rng).unwrap();
    let channels: Vec<String> = (0..rng.gen_range(0..=2)).map(|i| format!("ch{i}")).collect();
    let vars: Vec<VarInfo> = (0..rng.gen_range(0..=2))
        .map(|i| VarInfo {
            name: format!("v{i}"),
            array: rng.gen_bool(0.4),
            owner: if rng.gen_bool(0.3) { Some(rng.gen_range(0..n_procs)) } else { None },
        })
        .collect();
    let clock_owner = rng.gen_bool(0.6).then(|| rng.gen_range(0..n_procs));
    let templates: Vec<ProcessTemplate> =
        (0..n_procs).map(|k| template(rng, k, &vars, clock_owner == Some(k), &channels)).collect();
    let processes = templates
        .iter()
        .map(|t| ProcessInstance {
            template: t.name.clone(),
            args: t.parameters.iter().map(|_| rng.gen_range(0..=1)).collect(),
        })
        .collect();
    SystemDef {
        channels: channels.iter().map(|c| Channel::broadcast(c)).collect(),
        globals: vars.iter().filter(|v| v.owner.is_none()).map(|v| decl(rng, v)).collect(),
        templates,
        processes,
        ..SystemDef::default()
    }
}
