//! The instantiated component tree of a system.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::model::{order_subcomponents, Library, SubcomponentOrder};

/// One component in the instance tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceNode {
    /// Dotted path from the root; empty for the root itself.
    pub path: String,
    pub type_name: String,
    /// The implementation used, if the classifier selects one.
    pub impl_name: Option<String>,
    pub children: Vec<InstanceNode>,
    /// Verification order of `children`; empty for leaves.
    pub order: Vec<String>,
}

impl InstanceNode {
    pub fn is_leaf(&self) -> bool {
        self.impl_name.is_none()
    }

    /// Visits this node and its descendants in preorder.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a InstanceNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Name used in reports: the path, or the type name for the root.
    pub fn display_name(&self) -> &str {
        if self.path.is_empty() {
            &self.type_name
        } else {
            &self.path
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemInstance {
    pub library: Library,
    pub root: InstanceNode,
}

impl SystemInstance {
    /// Deterministic textual rendering of the library and the tree.
    pub fn elaborate(&self) -> String {
        let mut out = self.library.elaborate();
        out.push_str("instance\n");
        fn go(n: &InstanceNode, depth: usize, out: &mut String) {
            let cls = n.impl_name.clone().unwrap_or_else(|| n.type_name.clone());
            let _ = write!(out, "{}{} : {}", "  ".repeat(depth + 1), n.display_name(), cls);
            if !n.order.is_empty() {
                let _ = write!(out, " order [{}]", n.order.join(", "));
            }
            out.push('\n');
            for c in &n.children {
                go(c, depth + 1, out);
            }
        }
        go(&self.root, 0, &mut out);
        out
    }

    /// Every implementation layer in preorder, with its instance paths.
    pub fn layers(&self) -> Vec<(&InstanceNode, SubcomponentOrder)> {
        let mut out = Vec::new();
        self.root.walk(&mut |n| {
            if let Some(i) = &n.impl_name {
                out.push((n, order_subcomponents(&self.library.impls[i])));
            }
        });
        out
    }
}

impl Library {
    /// The implementation that no other implementation uses, or failing
    /// that the single component type not used as a subcomponent.
    pub fn default_root(&self) -> Result<String, String> {
        let used_impls: BTreeSet<&str> = self
            .impls
            .values()
            .flat_map(|i| i.subcomponents.iter().filter_map(|s| s.impl_name.as_deref()))
            .collect();
        let roots: Vec<&String> = self.impls.keys().filter(|k| !used_impls.contains(k.as_str())).collect();
        match roots.len() {
            1 => return Ok(roots[0].clone()),
            n if n > 1 => {
                let names: Vec<&str> = roots.iter().map(|s| s.as_str()).collect();
                return Err(format!("several top-level implementations ({}); choose one with --root", names.join(", ")));
            }
            _ => {}
        }
        let used_types: BTreeSet<&str> = self
            .impls
            .values()
            .flat_map(|i| i.subcomponents.iter().map(|s| s.type_name.as_str()))
            .collect();
        let types: Vec<&String> = self.types.keys().filter(|k| !used_types.contains(k.as_str())).collect();
        match types.as_slice() {
            [one] => Ok((*one).clone()),
            [] => Err("no component declared".to_string()),
            _ => Err("several top-level components; choose one with --root".to_string()),
        }
    }
}

/// Builds the instance tree below `root`, which names an implementation
/// (`FCS.impl`) or a component type.
pub fn instantiate(library: &Library, root: &str) -> Result<SystemInstance, String> {
    let (type_name, impl_name) = if let Some(i) = library.impls.get(root) {
        (i.type_name.clone(), Some(root.to_string()))
    } else if library.types.contains_key(root) {
        (root.to_string(), None)
    } else {
        return Err(format!("unknown root '{root}'"));
    };
    let mut stack = Vec::new();
    let node = build(library, String::new(), type_name, impl_name, &mut stack)?;
    Ok(SystemInstance {
        library: library.clone(),
        root: node,
    })
}

fn build(
    lib: &Library,
    path: String,
    type_name: String,
    impl_name: Option<String>,
    stack: &mut Vec<String>,
) -> Result<InstanceNode, String> {
    let Some(iname) = impl_name else {
        return Ok(InstanceNode {
            path,
            type_name,
            impl_name: None,
            children: Vec::new(),
            order: Vec::new(),
        });
    };
    if stack.contains(&type_name) {
        stack.push(type_name);
        return Err(format!("instantiation cycle: {}", stack.join(" -> ")));
    }
    stack.push(type_name.clone());
    let imp = &lib.impls[&iname];
    let mut children = Vec::new();
    for s in &imp.subcomponents {
        let child_path = if path.is_empty() {
            s.name.clone()
        } else {
            format!("{path}.{}", s.name)
        };
        children.push(build(lib, child_path, s.type_name.clone(), s.impl_name.clone(), stack)?);
    }
    stack.pop();
    Ok(InstanceNode {
        path,
        type_name,
        impl_name: Some(iname),
        children,
        order: order_subcomponents(imp).order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_sources;

    fn lib(src: &str) -> Library {
        load_sources(&[("t.agv".into(), src.into())]).unwrap()
    }

    #[test]
    fn leaf_root() {
        let l = lib("component A in x : int; out y : int; guarantee \"g\" : y = x; end");
        assert_eq!(l.default_root().unwrap(), "A");
        let s = instantiate(&l, "A").unwrap();
        assert!(s.root.is_leaf());
        assert!(s.layers().is_empty());
    }

    #[test]
    fn nested_tree() {
        let l = lib("component A in x : int; out y : int; end
component B in x : int; out y : int; end
implementation B.impl subcomponents a1 : A; a2 : A; connections x -> a1.x; a1.y -> a2.x; a2.y -> y; end
component C in x : int; out y : int; end
implementation C.impl subcomponents b : B.impl; connections x -> b.x; b.y -> y; end");
        assert_eq!(l.default_root().unwrap(), "C.impl");
        let s = instantiate(&l, "C.impl").unwrap();
        let mut paths = Vec::new();
        s.root.walk(&mut |n| paths.push(n.path.clone()));
        assert_eq!(paths, ["", "b", "b.a1", "b.a2"]);
        assert_eq!(s.layers().len(), 2);
    }

    #[test]
    fn self_containing_type_is_a_cycle() {
        let l = lib("component A in x : int; out y : int; end
implementation A.impl subcomponents inner : A.impl; end");
        let err = instantiate(&l, "A.impl").unwrap_err();
        assert!(err.contains("cycle"), "{err}");
    }

    #[test]
    fn int_to_real_connection_is_rejected() {
        let err = load_sources(&[(
            "t.agv".into(),
            "component A in x : real; out y : real; end
component B in x : int; out y : int; end
implementation B.impl subcomponents a : A; connections x -> a.x; end"
                .into(),
        )])
        .unwrap_err();
        assert!(err.to_string().contains("type mismatch"), "{err}");
    }

    #[test]
    fn multiple_drivers_are_rejected() {
        let err = load_sources(&[(
            "t.agv".into(),
            "component A in x : int; out y : int; end
component B in x, z : int; out y : int; end
implementation B.impl subcomponents a : A; connections x -> a.x; z -> a.x; end"
                .into(),
        )])
        .unwrap_err();
        assert!(err.to_string().contains("multiple drivers"), "{err}");
        assert!(err.to_string().starts_with("t.agv:"), "{err}");
    }
}
