//! Loading system description files into a checked [`Library`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path as FsPath, PathBuf};

use crate::diag::{Diagnostic, Span};
use crate::lang::ast::*;
use crate::lang::lint::{check_pre_guards, lint_linearity};
use crate::lang::parser::parse_file;
use crate::lang::types::{const_value, find_node_cycle, Checker, RecordDef, TypeEnv};
use crate::model::*;
use crate::value::Type;

/// Loading failed; `diagnostics` holds every error and warning found.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{}", render(.diagnostics))]
pub struct LoadError {
    pub diagnostics: Vec<Diagnostic>,
}

fn render(ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Loads every `.agv` file named by `paths`; directories contribute their
/// `.agv` files in name order.
pub fn load_system(paths: &[PathBuf]) -> Result<Library, LoadError> {
    let mut files: Vec<PathBuf> = Vec::new();
    let mut errors = Vec::new();
    for p in paths {
        if p.is_dir() {
            match std::fs::read_dir(p) {
                Ok(entries) => {
                    let mut found: Vec<PathBuf> = entries
                        .filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|f| f.extension().is_some_and(|x| x == "agv"))
                        .collect();
                    found.sort();
                    files.extend(found);
                }
                Err(e) => errors.push(io_error(p, &e)),
            }
        } else {
            files.push(p.clone());
        }
    }
    let mut sources = Vec::new();
    for f in &files {
        match std::fs::read_to_string(f) {
            Ok(text) => sources.push((f.display().to_string(), text)),
            Err(e) => errors.push(io_error(f, &e)),
        }
    }
    if !errors.is_empty() {
        return Err(LoadError { diagnostics: errors });
    }
    if sources.is_empty() {
        return Err(LoadError {
            diagnostics: vec![Diagnostic::error(Span::new(1, 1), "no .agv files found")],
        });
    }
    load_sources(&sources)
}

fn io_error(p: &FsPath, e: &std::io::Error) -> Diagnostic {
    Diagnostic::error(Span::new(1, 1), format!("cannot read: {e}")).in_file(&p.display().to_string())
}

/// Loads already-read sources given as `(file name, text)` pairs.
pub fn load_sources(sources: &[(String, String)]) -> Result<Library, LoadError> {
    let mut ld = Loader::default();
    let mut parsed = Vec::new();
    for (name, text) in sources {
        let (file, diags) = parse_file(text);
        for d in diags {
            ld.diags.push(d.in_file(name));
        }
        parsed.push((name.clone(), file));
    }
    ld.lib.files = sources.iter().map(|(n, _)| n.clone()).collect();
    ld.collect(&parsed);
    ld.check_nodes();
    ld.check_types(&parsed);
    ld.check_impls(&parsed);
    let has_error = ld.diags.iter().any(|d| d.is_error());
    if has_error {
        return Err(LoadError { diagnostics: ld.diags });
    }
    ld.lib.warnings = ld.diags;
    Ok(ld.lib)
}

#[derive(Default)]
struct Loader {
    lib: Library,
    diags: Vec<Diagnostic>,
    node_files: BTreeMap<String, String>,
    impl_names: BTreeSet<String>,
}

impl Loader {
    fn error(&mut self, file: &str, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, msg).in_file(file));
    }

    fn absorb(&mut self, file: &str, ds: Vec<Diagnostic>) {
        self.diags.extend(ds.into_iter().map(|d| d.in_file(file)));
    }

    /// Records, constants and node declarations.
    fn collect(&mut self, parsed: &[(String, SourceFile)]) {
        for (file, f) in parsed {
            for item in &f.items {
                if let Item::Record(r) = item {
                    if self.lib.records.contains_key(&r.name) {
                        self.error(file, r.span, format!("duplicate record '{}'", r.name));
                        continue;
                    }
                    self.lib.records.insert(
                        r.name.clone(),
                        RecordDef {
                            name: r.name.clone(),
                            fields: Vec::new(),
                        },
                    );
                }
            }
        }
        // Field types may name records declared later.
        for (file, f) in parsed {
            for item in &f.items {
                if let Item::Record(r) = item {
                    let env = self.lib.base_env();
                    let mut fields = Vec::new();
                    let mut seen = BTreeSet::new();
                    for p in &r.fields {
                        if !seen.insert(p.name.clone()) {
                            self.error(file, p.span, format!("duplicate field '{}'", p.name));
                        }
                        match env.type_of_name(&p.ty) {
                            Ok(t) => fields.push((p.name.clone(), t)),
                            Err(m) => self.error(file, p.span, m),
                        }
                    }
                    if let Some(def) = self.lib.records.get_mut(&r.name) {
                        if def.fields.is_empty() {
                            def.fields = fields;
                        }
                    }
                }
            }
        }
        if let Some(cycle) = record_cycle(&self.lib.records) {
            let file = parsed.first().map(|(f, _)| f.clone()).unwrap_or_default();
            self.error(&file, Span::new(1, 1), format!("recursive record type '{cycle}'"));
            self.lib.records.remove(&cycle);
        }
        for (file, f) in parsed {
            for item in &f.items {
                if let Item::Const(c) = item {
                    if self.lib.consts.contains_key(&c.name) {
                        self.error(file, c.span, format!("duplicate constant '{}'", c.name));
                        continue;
                    }
                    let env = self.lib.base_env();
                    let ty = match env.type_of_name(&c.ty) {
                        Ok(Type::Record(_)) => {
                            self.error(file, c.span, "constants must be bool, int or real");
                            continue;
                        }
                        Ok(t) => t,
                        Err(m) => {
                            self.error(file, c.span, m);
                            continue;
                        }
                    };
                    match const_value(&c.value, &ty, &env) {
                        Ok(v) => {
                            self.lib.consts.insert(c.name.clone(), v);
                        }
                        Err(ds) => self.absorb(file, ds),
                    }
                }
            }
        }
        for (_, f) in parsed {
            for item in &f.items {
                if let Item::Implementation(i) = item {
                    self.impl_names.insert(i.name.joined());
                }
            }
        }
        for (file, f) in parsed {
            for item in &f.items {
                let mut nodes: Vec<&NodeDef> = Vec::new();
                match item {
                    Item::Node(n) => nodes.push(n),
                    Item::Component(c) => nodes.extend(c.statements.iter().filter_map(stmt_node)),
                    Item::Implementation(i) => {
                        nodes.extend(i.statements.iter().filter_map(stmt_node))
                    }
                    _ => {}
                }
                for n in nodes {
                    if self.lib.nodes.contains_key(&n.name) {
                        self.error(file, n.span, format!("duplicate node '{}'", n.name));
                        continue;
                    }
                    self.lib.nodes.insert(n.name.clone(), n.clone());
                    self.node_files.insert(n.name.clone(), file.clone());
                }
            }
        }
    }

    fn check_nodes(&mut self) {
        let env = self.lib.base_env();
        let mut calls = BTreeMap::new();
        for (name, n) in &self.lib.nodes {
            let mut callees = BTreeSet::new();
            for eq in &n.equations {
                for c in eq.rhs.called_nodes() {
                    callees.insert(c.joined());
                }
            }
            calls.insert(name.clone(), callees.into_iter().collect::<Vec<_>>());
        }
        if let Some(cycle) = find_node_cycle(&calls) {
            let first = &cycle[0];
            let file = self.node_files.get(first).cloned().unwrap_or_default();
            let span = self.lib.nodes[first].span;
            self.error(&file, span, format!("recursive node call: {}", cycle.join(" -> ")));
            return;
        }
        let names: Vec<String> = self.lib.nodes.keys().cloned().collect();
        for name in names {
            let file = self.node_files[&name].clone();
            let node = self.lib.nodes[&name].clone();
            match check_node(&node, &env) {
                Ok((typed, warnings)) => {
                    self.absorb(&file, warnings);
                    self.lib.nodes.insert(name, typed);
                }
                Err(ds) => self.absorb(&file, ds),
            }
        }
    }

    fn check_types(&mut self, parsed: &[(String, SourceFile)]) {
        for (file, f) in parsed {
            for item in &f.items {
                let Item::Component(c) = item else { continue };
                if self.lib.types.contains_key(&c.name) {
                    self.error(file, c.span, format!("duplicate component '{}'", c.name));
                    continue;
                }
                let ty = self.check_type(file, c);
                self.lib.types.insert(c.name.clone(), ty);
            }
        }
    }

    fn declare(&mut self, file: &str, taken: &mut BTreeSet<String>, name: &str, span: Span) {
        if self.lib.consts.contains_key(name) {
            self.error(file, span, format!("'{name}' is already declared as a constant"));
        }
        if !taken.insert(name.to_string()) {
            self.error(file, span, format!("duplicate name '{name}'"));
        }
    }

    fn resolve_params(&mut self, file: &str, params: &[Param], taken: &mut BTreeSet<String>) -> Vec<(String, Type)> {
        let env = self.lib.base_env();
        let mut out = Vec::new();
        for p in params {
            self.declare(file, taken, &p.name, p.span);
            match env.type_of_name(&p.ty) {
                Ok(t) => out.push((p.name.clone(), t)),
                Err(m) => self.error(file, p.span, m),
            }
        }
        out
    }

    fn check_type(&mut self, file: &str, c: &ComponentDecl) -> ComponentType {
        let env0 = self.lib.base_env();
        let mut taken = BTreeSet::new();
        let mut ports = Vec::new();
        for p in &c.ports {
            self.declare(file, &mut taken, &p.name, p.span);
            match env0.type_of_name(&p.ty) {
                Ok(ty) => ports.push(Port {
                    name: p.name.clone(),
                    dir: p.dir,
                    ty,
                    span: p.span,
                }),
                Err(m) => self.error(file, p.span, m),
            }
        }
        let mut raw_eqs = Vec::new();
        for s in &c.statements {
            if let Statement::Eq { vars, def, span } = s {
                let vars = self.resolve_params(file, vars, &mut taken);
                raw_eqs.push((vars, def.clone(), *span));
            }
        }
        let mut ty = ComponentType {
            name: c.name.clone(),
            ports,
            contract: Contract::default(),
            file: file.to_string(),
            span: c.span,
        };
        for (vars, _, span) in &raw_eqs {
            ty.contract.eqs.push(EqDef {
                vars: vars.clone(),
                def: None,
                span: *span,
            });
        }
        let env = self.lib.type_env(&ty);
        let eqs = self.check_eqs(file, &env, raw_eqs);
        ty.contract.eqs = eqs;
        let outputs: BTreeSet<String> = ty.outputs().map(|p| p.name.clone()).collect();
        for s in &c.statements {
            match s {
                Statement::Assume { label, expr, span } => {
                    if let Some(e) = self.check_prop(file, &env, expr) {
                        for id in e.free_ids() {
                            if outputs.contains(&id.0[0]) {
                                self.diags.push(
                                    Diagnostic::warning(
                                        *span,
                                        format!("assumption \"{label}\" reads output '{}'", id.0[0]),
                                    )
                                    .in_file(file),
                                );
                                break;
                            }
                        }
                        ty.contract.assumptions.push(Labeled {
                            label: label.clone(),
                            expr: e,
                            span: *span,
                        });
                    }
                }
                Statement::Guarantee { label, expr, span } => {
                    if let Some(e) = self.check_prop(file, &env, expr) {
                        ty.contract.guarantees.push(Labeled {
                            label: label.clone(),
                            expr: e,
                            span: *span,
                        });
                    }
                }
                _ => {}
            }
        }
        ty
    }

    /// Typechecks a boolean contract expression and runs the lints on it.
    fn check_prop(&mut self, file: &str, env: &TypeEnv, e: &Expr) -> Option<Expr> {
        let mut c = Checker::new(env);
        let typed = c.check_as(e, &Type::Bool);
        self.absorb(file, c.errors);
        let typed = typed?;
        self.lint(file, &typed);
        Some(typed)
    }

    fn lint(&mut self, file: &str, e: &Expr) {
        let ds: Vec<Diagnostic> = check_pre_guards(e).into_iter().chain(lint_linearity(e)).collect();
        self.absorb(file, ds);
    }

    fn check_eqs(
        &mut self,
        file: &str,
        env: &TypeEnv,
        raw: Vec<(Vec<(String, Type)>, Option<Expr>, Span)>,
    ) -> Vec<EqDef> {
        let mut out = Vec::new();
        for (vars, def, span) in raw {
            let def = def.and_then(|d| {
                let mut c = Checker::new(env);
                let typed = check_definition(&mut c, &vars, &d, span);
                self.absorb(file, c.errors);
                let typed = typed?;
                self.lint(file, &typed);
                Some(typed)
            });
            out.push(EqDef { vars, def, span });
        }
        let mut deps = BTreeMap::new();
        for eq in &out {
            if let Some(d) = &eq.def {
                let reads: Vec<String> = d.current_ids().iter().map(|p| p.0[0].clone()).collect();
                for (v, _) in &eq.vars {
                    deps.insert(v.clone(), reads.clone());
                }
            }
        }
        if let Some(cycle) = find_node_cycle(&deps) {
            let span = out
                .iter()
                .find(|eq| eq.vars.iter().any(|(v, _)| *v == cycle[0]))
                .map(|eq| eq.span)
                .unwrap_or_default();
            self.error(file, span, format!("algebraic loop between equations: {}", cycle.join(" -> ")));
        }
        out
    }

    fn check_impls(&mut self, parsed: &[(String, SourceFile)]) {
        for (file, f) in parsed {
            for item in &f.items {
                let Item::Implementation(i) = item else { continue };
                let name = i.name.joined();
                if self.lib.impls.contains_key(&name) {
                    self.error(file, i.span, format!("duplicate implementation '{name}'"));
                    continue;
                }
                if i.name.0.len() < 2 {
                    self.error(file, i.span, format!("implementation name '{name}' must have the form Type.impl"));
                    continue;
                }
                let type_name = i.name.0[0].clone();
                if !self.lib.types.contains_key(&type_name) {
                    self.error(file, i.span, format!("implementation of unknown component '{type_name}'"));
                    continue;
                }
                let imp = self.check_impl(file, i, name.clone(), type_name);
                self.lib.impls.insert(name, imp);
            }
        }
    }

    fn check_impl(&mut self, file: &str, i: &ImplDecl, name: String, type_name: String) -> ComponentImpl {
        let parent = self.lib.types[&type_name].clone();
        let mut taken: BTreeSet<String> = parent.ports.iter().map(|p| p.name.clone()).collect();
        for eq in &parent.contract.eqs {
            taken.extend(eq.vars.iter().map(|(v, _)| v.clone()));
        }
        let mut subs = Vec::new();
        for s in &i.subcomponents {
            self.declare(file, &mut taken, &s.name, s.span);
            let cls = s.classifier.joined();
            let (type_name, impl_name) = if s.classifier.0.len() == 1 {
                (cls.clone(), None)
            } else {
                (s.classifier.0[0].clone(), Some(cls.clone()))
            };
            if !self.lib.types.contains_key(&type_name) {
                self.error(file, s.span, format!("unknown component '{type_name}'"));
                continue;
            }
            if let Some(imp) = &impl_name {
                if !self.impl_names.contains(imp) {
                    self.error(file, s.span, format!("unknown implementation '{imp}'"));
                    continue;
                }
            }
            subs.push(Subcomponent {
                name: s.name.clone(),
                type_name,
                impl_name,
                span: s.span,
            });
        }
        let mut raw_eqs = Vec::new();
        for s in &i.statements {
            if let Statement::Eq { vars, def, span } = s {
                let vars = self.resolve_params(file, vars, &mut taken);
                raw_eqs.push((vars, def.clone(), *span));
            }
        }
        let mut imp = ComponentImpl {
            name,
            type_name,
            subcomponents: subs,
            connections: Vec::new(),
            assertions: Vec::new(),
            lemmas: Vec::new(),
            eqs: raw_eqs
                .iter()
                .map(|(vars, _, span)| EqDef {
                    vars: vars.clone(),
                    def: None,
                    span: *span,
                })
                .collect(),
            file: file.to_string(),
            span: i.span,
        };
        let env = self.lib.impl_env(&imp);
        imp.eqs = self.check_eqs(file, &env, raw_eqs);
        let mut drivers: BTreeMap<String, Span> = BTreeMap::new();
        for c in &i.connections {
            let src = self.endpoint(file, &parent, &imp, &c.src, c.span, false);
            let dst = self.endpoint(file, &parent, &imp, &c.dst, c.span, true);
            let (Some(st), Some(dt)) = (src, dst) else { continue };
            if st != dt {
                self.error(file, c.span, format!("connection type mismatch: {} : {st} -> {} : {dt}", c.src, c.dst));
                continue;
            }
            let dst_name = c.dst.joined();
            if let Some(prev) = drivers.insert(dst_name.clone(), c.span) {
                self.error(
                    file,
                    c.span,
                    format!("multiple drivers for '{dst_name}' (first connected at {prev})"),
                );
                continue;
            }
            imp.connections.push(Connection {
                src: c.src.joined(),
                dst: dst_name,
                ty: st,
                span: c.span,
            });
        }
        for (idx, s) in i.statements.iter().enumerate() {
            match s {
                Statement::Assert { expr, span } => {
                    if let Some(e) = self.check_prop(file, &env, expr) {
                        imp.assertions.push(Labeled {
                            label: format!("assert#{}", idx + 1),
                            expr: e,
                            span: *span,
                        });
                    }
                }
                Statement::Lemma { label, expr, span } => {
                    if let Some(e) = self.check_prop(file, &env, expr) {
                        imp.lemmas.push(Labeled {
                            label: label.clone(),
                            expr: e,
                            span: *span,
                        });
                    }
                }
                _ => {}
            }
        }
        imp
    }

    /// Resolves one end of a connection and returns its type.
    fn endpoint(
        &mut self,
        file: &str,
        parent: &ComponentType,
        imp: &ComponentImpl,
        path: &Path,
        span: Span,
        is_dst: bool,
    ) -> Option<Type> {
        let parts = &path.0;
        if parts.len() == 1 {
            let name = &parts[0];
            if let Some(p) = parent.port(name) {
                let ok = if is_dst { p.dir == Direction::Out } else { p.dir == Direction::In };
                if !ok {
                    let what = if is_dst { "an output" } else { "an input" };
                    self.error(file, span, format!("'{name}' must be {what} of {} here", parent.name));
                    return None;
                }
                return Some(p.ty.clone());
            }
            if !is_dst {
                let eqs = parent.contract.eqs.iter().chain(&imp.eqs);
                for eq in eqs {
                    if let Some((_, t)) = eq.vars.iter().find(|(v, _)| v == name) {
                        return Some(t.clone());
                    }
                }
            }
            self.error(file, span, format!("unresolved connection endpoint '{name}'"));
            return None;
        }
        if parts.len() != 2 {
            self.error(
                file,
                span,
                format!("connection endpoint '{path}' must name a port (field-level connections are not supported)"),
            );
            return None;
        }
        let Some(sub) = imp.subcomponents.iter().find(|s| s.name == parts[0]) else {
            self.error(file, span, format!("unknown subcomponent '{}'", parts[0]));
            return None;
        };
        let ty = &self.lib.types[&sub.type_name];
        let Some(p) = ty.port(&parts[1]) else {
            self.error(file, span, format!("component '{}' has no port '{}'", ty.name, parts[1]));
            return None;
        };
        let ok = if is_dst { p.dir == Direction::In } else { p.dir == Direction::Out };
        if !ok {
            let what = if is_dst { "an input" } else { "an output" };
            self.error(file, span, format!("'{path}' must be {what} of subcomponent '{}'", sub.name));
            return None;
        }
        Some(p.ty.clone())
    }
}

fn stmt_node(s: &Statement) -> Option<&NodeDef> {
    match s {
        Statement::Node(n) => Some(n),
        _ => None,
    }
}

fn record_cycle(records: &BTreeMap<String, RecordDef>) -> Option<String> {
    let deps: BTreeMap<String, Vec<String>> = records
        .iter()
        .map(|(n, r)| {
            let ds = r
                .fields
                .iter()
                .filter_map(|(_, t)| match t {
                    Type::Record(x) => Some(x.clone()),
                    _ => None,
                })
                .collect();
            (n.clone(), ds)
        })
        .collect();
    find_node_cycle(&deps).map(|c| c[0].clone())
}

/// Checks the right-hand side of an equation defining `vars`.
fn check_definition(c: &mut Checker, vars: &[(String, Type)], rhs: &Expr, span: Span) -> Option<Expr> {
    if vars.len() == 1 {
        return c.check_as(rhs, &vars[0].1);
    }
    let ExprKind::Call { node, args } = &rhs.kind else {
        c.errors.push(Diagnostic::error(
            span,
            "an equation defining several variables needs a node call on the right",
        ));
        return None;
    };
    let name = node.joined();
    let Some(sig) = c.env().nodes.get(&name).cloned() else {
        c.errors.push(Diagnostic::error(rhs.span, format!("unknown node '{name}'")));
        return None;
    };
    if sig.outputs.len() != vars.len() || sig.inputs.len() != args.len() {
        c.errors.push(Diagnostic::error(
            rhs.span,
            format!(
                "node '{name}' takes {} argument(s) and returns {} value(s); {} argument(s) and {} variable(s) given",
                sig.inputs.len(),
                sig.outputs.len(),
                args.len(),
                vars.len()
            ),
        ));
        return None;
    }
    for ((v, t), o) in vars.iter().zip(&sig.outputs) {
        if t != o {
            c.errors.push(Diagnostic::error(
                span,
                format!("'{v}' has type {t} but node '{name}' returns {o} in that position"),
            ));
        }
    }
    let typed: Vec<Option<Expr>> = args.iter().zip(&sig.inputs).map(|(a, t)| c.check_as(a, t)).collect();
    let typed: Option<Vec<Expr>> = typed.into_iter().collect();
    Some(Expr {
        kind: ExprKind::Call {
            node: node.clone(),
            args: typed?,
        },
        span: rhs.span,
        ty: None,
    })
}

/// Typechecks a node body. Returns the typed node and its warnings.
fn check_node(n: &NodeDef, base: &TypeEnv) -> Result<(NodeDef, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut env = base.clone();
    let mut kinds: BTreeMap<String, (Type, bool)> = BTreeMap::new();
    let groups = [(&n.inputs, false), (&n.outputs, true), (&n.locals, true)];
    for (params, definable) in groups {
        for p in params.iter() {
            let ty = match base.type_of_name(&p.ty) {
                Ok(t) => t,
                Err(m) => {
                    errors.push(Diagnostic::error(p.span, m));
                    continue;
                }
            };
            if kinds.insert(p.name.clone(), (ty.clone(), definable)).is_some() {
                errors.push(Diagnostic::error(p.span, format!("duplicate name '{}' in node '{}'", p.name, n.name)));
            }
            env.vars.insert(p.name.clone(), ty);
        }
    }
    let mut defined: BTreeMap<String, usize> = BTreeMap::new();
    let mut equations = Vec::new();
    let mut deps = BTreeMap::new();
    for eq in &n.equations {
        let mut vars = Vec::new();
        for l in &eq.lhs {
            match kinds.get(l) {
                Some((t, true)) => vars.push((l.clone(), t.clone())),
                Some((_, false)) => errors.push(Diagnostic::error(eq.span, format!("node input '{l}' cannot be defined"))),
                None => errors.push(Diagnostic::error(eq.span, format!("'{l}' is not an output or local of node '{}'", n.name))),
            }
            *defined.entry(l.clone()).or_default() += 1;
        }
        if vars.len() != eq.lhs.len() {
            continue;
        }
        let mut c = Checker::new(&env);
        let typed = check_definition(&mut c, &vars, &eq.rhs, eq.span);
        errors.extend(c.errors);
        if let Some(t) = typed {
            errors.extend(check_pre_guards(&t));
            warnings.extend(lint_linearity(&t));
            let reads: Vec<String> = t.current_ids().iter().map(|p| p.0[0].clone()).collect();
            for l in &eq.lhs {
                deps.insert(l.clone(), reads.clone());
            }
            equations.push(NodeEquation {
                lhs: eq.lhs.clone(),
                rhs: t,
                span: eq.span,
            });
        }
    }
    for p in n.outputs.iter().chain(&n.locals) {
        match defined.get(&p.name).copied().unwrap_or(0) {
            0 => errors.push(Diagnostic::error(p.span, format!("'{}' is never defined in node '{}'", p.name, n.name))),
            1 => {}
            _ => errors.push(Diagnostic::error(p.span, format!("'{}' is defined more than once in node '{}'", p.name, n.name))),
        }
    }
    if let Some(cycle) = find_node_cycle(&deps) {
        errors.push(Diagnostic::error(n.span, format!("algebraic loop in node '{}': {}", n.name, cycle.join(" -> "))));
    }
    if errors.is_empty() {
        Ok((
            NodeDef {
                equations,
                ..n.clone()
            },
            warnings,
        ))
    } else {
        Err(errors)
    }
}
