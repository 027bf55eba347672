//! Parser for the STRIPS subset of PDDL (`:strips`, optionally `:typing`).
//!
//! Anything outside that subset (negative preconditions, conditional
//! effects, numeric fluents, derived predicates, ...) is rejected with
//! [`ParseError::Unsupported`] rather than being ignored.

mod sexpr;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

pub use sexpr::{Pos, SExpr};

pub const DEFAULT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unsupported feature `{feature}` at {line}:{col}")]
    Unsupported { feature: String, line: usize, col: usize },
    #[error("{0}")]
    Semantic(String),
}

impl ParseError {
    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax { line: pos.line, col: pos.col, message: message.into() }
    }

    fn unsupported(pos: Pos, feature: impl Into<String>) -> Self {
        ParseError::Unsupported { feature: feature.into(), line: pos.line, col: pos.col }
    }
}

/// A `?name - type` pair from a parameter or predicate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedVar {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
}

impl PredicateSchema {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

/// A predicate applied to variables and/or constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomTemplate {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub pre: Vec<AtomTemplate>,
    pub add: Vec<AtomTemplate>,
    pub del: Vec<AtomTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<String>,
    /// type -> parent type. The root `object` has no entry.
    pub types: BTreeMap<String, String>,
    pub constants: Vec<TypedVar>,
    pub predicates: Vec<PredicateSchema>,
    pub operators: Vec<OperatorSchema>,
}

/// A variable-free atom as written in a problem file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    /// Canonical text form, `pred a b`.
    pub fn signature(&self) -> String {
        let mut s = self.predicate.clone();
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedVar>,
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundAtom>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// True if `ty` equals `ancestor` or inherits from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == DEFAULT_TYPE || ty == ancestor {
            return true;
        }
        let mut cur = ty;
        // Bounded walk in case of a cyclic :types declaration.
        for _ in 0..=self.types.len() {
            match self.types.get(cur) {
                Some(parent) if parent == ancestor => return true,
                Some(parent) => cur = parent,
                None => return false,
            }
        }
        false
    }
}

const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing"];

fn single_define(text: &str, kind: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut exprs = sexpr::read_all(text)?;
    if exprs.len() != 1 {
        let pos = exprs.get(1).map(SExpr::pos).unwrap_or(Pos { line: 1, col: 1 });
        return Err(ParseError::syntax(pos, format!("expected exactly one (define ({kind} ...)) form")));
    }
    let top = exprs.pop().unwrap();
    let pos = top.pos();
    match top {
        SExpr::List(items, _) if items.first().and_then(SExpr::as_symbol) == Some("define") => Ok(items),
        _ => Err(ParseError::syntax(pos, "expected (define ...)")),
    }
}

fn header_name(expr: Option<&SExpr>, keyword: &str, fallback: Pos) -> Result<String, ParseError> {
    let expr = expr.ok_or_else(|| ParseError::syntax(fallback, format!("missing ({keyword} <name>)")))?;
    match expr.as_list() {
        Some([SExpr::Symbol(k, _), SExpr::Symbol(name, _)]) if k == keyword => Ok(name.clone()),
        _ => Err(ParseError::syntax(expr.pos(), format!("expected ({keyword} <name>)"))),
    }
}

fn section(expr: &SExpr) -> Result<(&str, &[SExpr]), ParseError> {
    match expr.as_list() {
        Some([SExpr::Symbol(k, _), rest @ ..]) if k.starts_with(':') => Ok((k.as_str(), rest)),
        _ => Err(ParseError::syntax(expr.pos(), "expected a (:section ...) form")),
    }
}

fn check_requirements(items: &[SExpr]) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    for item in items {
        let req = item.as_symbol().ok_or_else(|| ParseError::syntax(item.pos(), "requirement must be a keyword"))?;
        if !SUPPORTED_REQUIREMENTS.contains(&req) {
            return Err(ParseError::unsupported(item.pos(), req));
        }
        out.push(req.to_string());
    }
    Ok(out)
}

/// Parses `a b - t c` style lists. With `variables` set, every name must be a `?var`.
fn typed_list(items: &[SExpr], variables: bool) -> Result<Vec<TypedVar>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        let sym = item.as_symbol().ok_or_else(|| ParseError::syntax(item.pos(), "expected a name in typed list"))?;
        if sym == "-" {
            let ty_expr = items.get(i + 1).ok_or_else(|| ParseError::syntax(item.pos(), "missing type after '-'"))?;
            if ty_expr.head() == Some("either") {
                return Err(ParseError::unsupported(ty_expr.pos(), "either"));
            }
            let ty = ty_expr.as_symbol().ok_or_else(|| ParseError::syntax(ty_expr.pos(), "expected a type name"))?;
            if pending.is_empty() {
                return Err(ParseError::syntax(item.pos(), "type annotation with no names"));
            }
            out.extend(pending.drain(..).map(|name| TypedVar { name, ty: ty.to_string() }));
            i += 2;
            continue;
        }
        if variables != sym.starts_with('?') {
            let want = if variables { "a ?variable" } else { "a name" };
            return Err(ParseError::syntax(item.pos(), format!("expected {want}, found `{sym}`")));
        }
        pending.push(sym.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|name| TypedVar { name, ty: DEFAULT_TYPE.to_string() }));
    Ok(out)
}

fn atom_template(expr: &SExpr) -> Result<AtomTemplate, ParseError> {
    let items = expr.as_list().ok_or_else(|| ParseError::syntax(expr.pos(), "expected an atom (pred args...)"))?;
    let (head, args) = items.split_first().ok_or_else(|| ParseError::syntax(expr.pos(), "empty atom"))?;
    let predicate = head.as_symbol().ok_or_else(|| ParseError::syntax(head.pos(), "predicate name expected"))?;
    match predicate {
        "not" => return Err(ParseError::unsupported(expr.pos(), "negative-preconditions")),
        "=" => return Err(ParseError::unsupported(expr.pos(), "equality")),
        "or" | "imply" => return Err(ParseError::unsupported(expr.pos(), "disjunctive-preconditions")),
        "exists" => return Err(ParseError::unsupported(expr.pos(), "existential-preconditions")),
        "forall" => return Err(ParseError::unsupported(expr.pos(), "universal-preconditions")),
        "when" => return Err(ParseError::unsupported(expr.pos(), "conditional-effects")),
        "increase" | "decrease" | "assign" | "scale-up" | "scale-down" | "<" | ">" | "<=" | ">=" => {
            return Err(ParseError::unsupported(expr.pos(), "numeric-fluents"))
        }
        "and" => return Err(ParseError::syntax(expr.pos(), "nested (and ...) is not allowed here")),
        _ => {}
    }
    let args = args
        .iter()
        .map(|a| match a.as_symbol() {
            Some(s) if s.starts_with('?') => Ok(Term::Var(s.to_string())),
            Some(s) => Ok(Term::Const(s.to_string())),
            None => Err(ParseError::syntax(a.pos(), "atom arguments must be names or variables")),
        })
        .collect::<Result<_, _>>()?;
    Ok(AtomTemplate { predicate: predicate.to_string(), args })
}

/// Flattens `(and a b)`, `a`, `()` and `(and)` into a conjunction list.
fn conjunction(expr: &SExpr) -> Result<&[SExpr], ParseError> {
    match expr.as_list() {
        Some([]) => Ok(&[]),
        Some([SExpr::Symbol(h, _), rest @ ..]) if h == "and" => Ok(rest),
        Some(_) => Ok(std::slice::from_ref(expr)),
        None => Err(ParseError::syntax(expr.pos(), "expected a formula")),
    }
}

fn parse_action(rest: &[SExpr], pos: Pos) -> Result<OperatorSchema, ParseError> {
    let name = rest
        .first()
        .and_then(SExpr::as_symbol)
        .ok_or_else(|| ParseError::syntax(pos, "action needs a name"))?
        .to_string();
    let mut op = OperatorSchema { name, params: vec![], pre: vec![], add: vec![], del: vec![] };
    let mut i = 1;
    while i < rest.len() {
        let key = rest[i].as_symbol().ok_or_else(|| ParseError::syntax(rest[i].pos(), "expected an action keyword"))?;
        let value =
            rest.get(i + 1).ok_or_else(|| ParseError::syntax(rest[i].pos(), format!("missing value for {key}")))?;
        match key {
            ":parameters" => {
                let items =
                    value.as_list().ok_or_else(|| ParseError::syntax(value.pos(), "parameters must be a list"))?;
                op.params = typed_list(items, true)?;
            }
            ":precondition" => {
                for lit in conjunction(value)? {
                    op.pre.push(atom_template(lit)?);
                }
            }
            ":effect" => {
                for eff in conjunction(value)? {
                    match eff.as_list() {
                        Some([SExpr::Symbol(h, _), inner]) if h == "not" => op.del.push(atom_template(inner)?),
                        Some([SExpr::Symbol(h, _), ..]) if h == "forall" => {
                            return Err(ParseError::unsupported(eff.pos(), "universal-effects"))
                        }
                        _ => op.add.push(atom_template(eff)?),
                    }
                }
            }
            other => return Err(ParseError::unsupported(rest[i].pos(), other)),
        }
        i += 2;
    }
    Ok(op)
}

fn check_template(
    t: &AtomTemplate,
    predicates: &HashMap<&str, usize>,
    params: &BTreeSet<&str>,
    constants: &BTreeSet<&str>,
    op: &str,
) -> Result<(), ParseError> {
    let arity = predicates
        .get(t.predicate.as_str())
        .ok_or_else(|| ParseError::Semantic(format!("action `{op}` uses undeclared predicate `{}`", t.predicate)))?;
    if *arity != t.args.len() {
        return Err(ParseError::Semantic(format!(
            "action `{op}`: predicate `{}` has arity {arity}, used with {} arguments",
            t.predicate,
            t.args.len()
        )));
    }
    for arg in &t.args {
        match arg {
            Term::Var(v) if !params.contains(v.as_str()) => {
                return Err(ParseError::Semantic(format!("action `{op}` uses unbound variable `{v}`")))
            }
            Term::Const(c) if !constants.contains(c.as_str()) => {
                return Err(ParseError::Semantic(format!("action `{op}` uses undeclared constant `{c}`")))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Parses a STRIPS domain definition.
pub fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    let items = single_define(text, "domain")?;
    let name = header_name(items.get(1), "domain", items[0].pos())?;
    let mut domain = Domain {
        name,
        requirements: vec![],
        types: BTreeMap::new(),
        constants: vec![],
        predicates: vec![],
        operators: vec![],
    };
    for expr in &items[2..] {
        let (key, rest) = section(expr)?;
        match key {
            ":requirements" => domain.requirements = check_requirements(rest)?,
            ":types" => {
                for tv in typed_list(rest, false)? {
                    if tv.name != DEFAULT_TYPE {
                        domain.types.insert(tv.name, tv.ty);
                    }
                }
            }
            ":constants" => domain.constants = typed_list(rest, false)?,
            ":predicates" => {
                for p in rest {
                    let list = p
                        .as_list()
                        .ok_or_else(|| ParseError::syntax(p.pos(), "predicate declaration must be a list"))?;
                    let (head, params) =
                        list.split_first().ok_or_else(|| ParseError::syntax(p.pos(), "empty predicate declaration"))?;
                    let pname =
                        head.as_symbol().ok_or_else(|| ParseError::syntax(head.pos(), "predicate name expected"))?;
                    if domain.predicate(pname).is_some() {
                        return Err(ParseError::Semantic(format!("predicate `{pname}` declared twice")));
                    }
                    domain
                        .predicates
                        .push(PredicateSchema { name: pname.to_string(), params: typed_list(params, true)? });
                }
            }
            ":action" => domain.operators.push(parse_action(rest, expr.pos())?),
            other => return Err(ParseError::unsupported(expr.pos(), other)),
        }
    }

    let arities: HashMap<&str, usize> = domain.predicates.iter().map(|p| (p.name.as_str(), p.arity())).collect();
    let constants: BTreeSet<&str> = domain.constants.iter().map(|c| c.name.as_str()).collect();
    let mut seen = BTreeSet::new();
    for op in &domain.operators {
        if !seen.insert(op.name.as_str()) {
            return Err(ParseError::Semantic(format!("action `{}` declared twice", op.name)));
        }
        let params: BTreeSet<&str> = op.params.iter().map(|p| p.name.as_str()).collect();
        if params.len() != op.params.len() {
            return Err(ParseError::Semantic(format!("action `{}` repeats a parameter name", op.name)));
        }
        for t in op.pre.iter().chain(&op.add).chain(&op.del) {
            check_template(t, &arities, &params, &constants, &op.name)?;
        }
    }
    Ok(domain)
}

fn ground_atoms(
    exprs: &[SExpr],
    domain: &Domain,
    objects: &BTreeSet<&str>,
    section_name: &str,
) -> Result<Vec<GroundAtom>, ParseError> {
    let mut atoms = Vec::with_capacity(exprs.len());
    for e in exprs {
        let t = atom_template(e)?;
        let text = || {
            let args: Vec<String> = t
                .args
                .iter()
                .map(|a| match a {
                    Term::Var(s) | Term::Const(s) => s.clone(),
                })
                .collect();
            format!("({} {})", t.predicate, args.join(" ")).replace(" )", ")")
        };
        let schema = domain
            .predicate(&t.predicate)
            .ok_or_else(|| ParseError::Semantic(format!("{section_name}: unknown predicate in atom {}", text())))?;
        if schema.arity() != t.args.len() {
            return Err(ParseError::Semantic(format!(
                "{section_name}: atom {} has {} arguments, predicate `{}` expects {}",
                text(),
                t.args.len(),
                schema.name,
                schema.arity()
            )));
        }
        let mut args = Vec::with_capacity(t.args.len());
        for a in &t.args {
            match a {
                Term::Const(c) if objects.contains(c.as_str()) => args.push(c.clone()),
                Term::Const(c) => {
                    return Err(ParseError::Semantic(format!(
                        "{section_name}: atom {} references undeclared object `{c}`",
                        text()
                    )))
                }
                Term::Var(v) => {
                    return Err(ParseError::Semantic(format!(
                        "{section_name}: atom {} contains variable `{v}`",
                        text()
                    )))
                }
            }
        }
        atoms.push(GroundAtom { predicate: t.predicate, args });
    }
    Ok(atoms)
}

/// Parses a problem against an already-parsed domain.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, ParseError> {
    let items = single_define(text, "problem")?;
    let name = header_name(items.get(1), "problem", items[0].pos())?;
    let mut problem = Problem { name, domain: String::new(), objects: vec![], init: vec![], goal: vec![] };
    let mut init_exprs: &[SExpr] = &[];
    let mut goal_exprs: &[SExpr] = &[];
    for expr in &items[2..] {
        let (key, rest) = section(expr)?;
        match key {
            ":domain" => {
                problem.domain = rest
                    .first()
                    .and_then(SExpr::as_symbol)
                    .ok_or_else(|| ParseError::syntax(expr.pos(), "(:domain <name>) expected"))?
                    .to_string();
            }
            ":requirements" => {
                check_requirements(rest)?;
            }
            ":objects" => problem.objects = typed_list(rest, false)?,
            ":init" => init_exprs = rest,
            ":goal" => {
                goal_exprs = match rest {
                    [] => &[],
                    [g] => conjunction(g)?,
                    _ => return Err(ParseError::syntax(expr.pos(), "goal must be a single formula")),
                }
            }
            other => return Err(ParseError::unsupported(expr.pos(), other)),
        }
    }
    if !problem.domain.is_empty() && problem.domain != domain.name {
        return Err(ParseError::Semantic(format!("problem is for domain `{}`, not `{}`", problem.domain, domain.name)));
    }
    for o in &problem.objects {
        if o.ty != DEFAULT_TYPE && !domain.types.contains_key(&o.ty) {
            return Err(ParseError::Semantic(format!("object `{}` has undeclared type `{}`", o.name, o.ty)));
        }
    }
    let objects: BTreeSet<&str> = problem.objects.iter().chain(&domain.constants).map(|o| o.name.as_str()).collect();
    problem.init = ground_atoms(init_exprs, domain, &objects, "init")?;
    problem.goal = ground_atoms(goal_exprs, domain, &objects, "goal")?;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BLOCKSWORLD: &str = include_str!("../../domains/blocksworld.pddl");
    const BW2: &str = include_str!("../../domains/blocksworld-2.pddl");

    #[test]
    fn blocksworld_has_four_operators() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        let names: Vec<_> = d.operators.iter().map(|o| o.name.as_str()).collect();
        assert_eq!(names, ["pick-up", "put-down", "stack", "unstack"]);
        assert_eq!(d.predicates.len(), 5);
        let stack = &d.operators[2];
        assert_eq!(stack.pre.len(), 2);
        assert_eq!(stack.add.len(), 3);
        assert_eq!(stack.del.len(), 2);
    }

    #[test]
    fn empty_domain_has_no_operators() {
        let d = parse_domain("(define (domain empty) (:requirements :strips) (:predicates (p)))").unwrap();
        assert!(d.operators.is_empty());
    }

    #[test]
    fn unbalanced_paren_is_a_syntax_error() {
        let text = "(define (domain x)\n  (:predicates (p)";
        match parse_domain(text).unwrap_err() {
            ParseError::Syntax { line, col, .. } => assert_eq!((line, col), (2, 3)),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn adl_requirement_is_rejected_by_name() {
        let err = parse_domain("(define (domain x) (:requirements :strips :adl))").unwrap_err();
        assert_eq!(err, ParseError::Unsupported { feature: ":adl".into(), line: 1, col: 43 });
        assert!(err.to_string().contains(":adl"));
    }

    #[test]
    fn negative_precondition_is_rejected() {
        let text = "(define (domain x) (:predicates (p) (q))
            (:action a :parameters () :precondition (and (not (p))) :effect (q)))";
        assert!(
            matches!(parse_domain(text), Err(ParseError::Unsupported { feature, .. }) if feature == "negative-preconditions")
        );
    }

    #[test]
    fn conditional_effect_is_rejected() {
        let text = "(define (domain x) (:predicates (p) (q))
            (:action a :parameters () :precondition (p) :effect (when (p) (q))))";
        assert!(
            matches!(parse_domain(text), Err(ParseError::Unsupported { feature, .. }) if feature == "conditional-effects")
        );
    }

    #[test]
    fn functions_section_is_rejected() {
        let text = "(define (domain x) (:functions (total-cost)))";
        assert!(matches!(parse_domain(text), Err(ParseError::Unsupported { feature, .. }) if feature == ":functions"));
    }

    #[test]
    fn unbound_action_variable_is_semantic_error() {
        let text = "(define (domain x) (:predicates (p ?a))
            (:action a :parameters () :precondition (p ?z) :effect (p ?z)))";
        assert!(matches!(parse_domain(text), Err(ParseError::Semantic(m)) if m.contains("?z")));
    }

    #[test]
    fn two_block_problem() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        let p = parse_problem(BW2, &d).unwrap();
        let init: BTreeSet<String> = p.init.iter().map(GroundAtom::signature).collect();
        let expected: BTreeSet<String> =
            ["ontable a", "ontable b", "clear a", "clear b", "handempty"].map(String::from).into();
        assert_eq!(init, expected);
        let goal: Vec<String> = p.goal.iter().map(GroundAtom::signature).collect();
        assert_eq!(goal, ["on a b"]);
    }

    #[test]
    fn goal_with_undeclared_object() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        let text = "(define (problem p) (:domain blocksworld) (:objects a b) (:init (handempty)) (:goal (on a c)))";
        let err = parse_problem(text, &d).unwrap_err();
        assert!(matches!(&err, ParseError::Semantic(m) if m.contains("(on a c)") && m.contains("`c`")), "{err}");
    }

    #[test]
    fn arity_mismatch_names_the_atom() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        let text = "(define (problem p) (:domain blocksworld) (:objects a b) (:init (clear a b)) (:goal (and)))";
        let err = parse_problem(text, &d).unwrap_err();
        assert!(matches!(&err, ParseError::Semantic(m) if m.contains("(clear a b)")), "{err}");
    }

    #[test]
    fn unknown_predicate_in_init() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        let text = "(define (problem p) (:domain blocksworld) (:objects a) (:init (flying a)) (:goal (and)))";
        assert!(matches!(parse_problem(text, &d), Err(ParseError::Semantic(m)) if m.contains("(flying a)")));
    }

    #[test]
    fn empty_goal_section() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        for goal in ["(:goal (and))", "(:goal ())"] {
            let text = format!("(define (problem p) (:domain blocksworld) (:objects a) (:init (clear a)) {goal})");
            assert!(parse_problem(&text, &d).unwrap().goal.is_empty());
        }
    }

    #[test]
    fn typed_lists_and_subtypes() {
        let text = "(define (domain t) (:requirements :strips :typing)
            (:types truck car - vehicle vehicle place)
            (:predicates (at ?v - vehicle ?p - place)))";
        let d = parse_domain(text).unwrap();
        assert!(d.is_subtype("truck", "vehicle"));
        assert!(d.is_subtype("truck", "object"));
        assert!(!d.is_subtype("place", "vehicle"));
        assert_eq!(d.predicates[0].params[1], TypedVar { name: "?p".into(), ty: "place".into() });
    }

    #[test]
    fn problem_for_other_domain_is_rejected() {
        let d = parse_domain(BLOCKSWORLD).unwrap();
        let text = "(define (problem p) (:domain ferry) (:objects a) (:init) (:goal (and)))";
        assert!(parse_problem(text, &d).is_err());
    }
}
