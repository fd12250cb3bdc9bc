//! Total ordering of an implementation's subcomponents.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::ComponentImpl;

/// Subcomponent names in verification order, plus the strongly connected
/// components of the connection graph that were collapsed to reach it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcomponentOrder {
    pub order: Vec<String>,
    pub sccs: Vec<Vec<String>>,
}

impl SubcomponentOrder {
    /// Position of `name` in the order.
    pub fn rank(&self, name: &str) -> Option<usize> {
        self.order.iter().position(|n| n == name)
    }

    /// True when some connection cycle runs through several subcomponents
    /// or a subcomponent feeds itself.
    pub fn is_cyclic(&self) -> bool {
        self.sccs.iter().any(|s| s.len() > 1)
    }
}

/// Topological order of the connection graph (edge `w -> v` when an output
/// of `w` feeds an input of `v`). Strongly connected components are
/// collapsed; components and their members are ranked by declaration
/// order wherever the graph leaves a choice.
pub fn order_subcomponents(imp: &ComponentImpl) -> SubcomponentOrder {
    let names: Vec<&str> = imp.subcomponents.iter().map(|s| s.name.as_str()).collect();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let n = names.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let owner = |endpoint: &str| -> Option<usize> {
        let (head, _) = endpoint.split_once('.')?;
        index.get(head).copied()
    };
    for c in &imp.connections {
        if let (Some(w), Some(v)) = (owner(&c.src), owner(&c.dst)) {
            succ[w].insert(v);
        }
    }

    let comp = tarjan(&succ);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut csucc: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
    let mut indeg = vec![0usize; ncomp];
    for (w, vs) in succ.iter().enumerate() {
        for &v in vs {
            let (a, b) = (comp[w], comp[v]);
            if a != b && csucc[a].insert(b) {
                indeg[b] += 1;
            }
        }
    }
    // Kahn's algorithm, always picking the ready component whose first
    // member was declared earliest.
    let key = |c: usize| members[c][0];
    let mut ready: BTreeSet<(usize, usize)> = (0..ncomp).filter(|&c| indeg[c] == 0).map(|c| (key(c), c)).collect();
    let mut order = Vec::with_capacity(n);
    let mut sccs = Vec::with_capacity(ncomp);
    while let Some(&(k, c)) = ready.iter().next() {
        ready.remove(&(k, c));
        order.extend(members[c].iter().map(|&v| names[v].to_string()));
        sccs.push(members[c].iter().map(|&v| names[v].to_string()).collect());
        for &d in &csucc[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.insert((key(d), d));
            }
        }
    }
    SubcomponentOrder { order, sccs }
}

/// Tarjan's algorithm; returns the component index of every vertex.
/// Members of each component are visited in increasing vertex order.
fn tarjan(succ: &[BTreeSet<usize>]) -> Vec<usize> {
    struct St<'a> {
        succ: &'a [BTreeSet<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        comp: Vec<usize>,
        ncomp: usize,
    }
    fn visit(st: &mut St, v: usize) {
        st.index[v] = Some(st.next);
        st.low[v] = st.next;
        st.next += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in st.succ[v].iter() {
            match st.index[w] {
                None => {
                    visit(st, w);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                _ => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            loop {
                let w = st.stack.pop().expect("tarjan stack");
                st.on_stack[w] = false;
                st.comp[w] = st.ncomp;
                if w == v {
                    break;
                }
            }
            st.ncomp += 1;
        }
    }
    let n = succ.len();
    let mut st = St {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        comp: vec![0; n],
        ncomp: 0,
    };
    for v in 0..n {
        if st.index[v].is_none() {
            visit(&mut st, v);
        }
    }
    st.comp
}
