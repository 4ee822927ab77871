//! Node classification by reachability from inputs and parameters.

use serde::Serialize;

use super::{Circuit, NodeId, Op};
use crate::algebra::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NodeClass {
    pub depends_on_input: bool,
    /// Depends on some basic parameter.
    pub depends_on_param: bool,
    /// Depends on no input: only scalars and basic parameters.
    pub is_parameter_node: bool,
    /// Add/Sub/Mul with both arguments input-dependent, or Div whose
    /// divisor is input-dependent.
    pub is_essential: bool,
}

impl NodeClass {
    /// Built from scalars alone.
    pub fn is_constant(&self) -> bool {
        !self.depends_on_input && !self.depends_on_param
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassTable {
    pub nodes: Vec<NodeClass>,
}

impl ClassTable {
    pub fn get(&self, i: NodeId) -> &NodeClass {
        &self.nodes[i]
    }

    pub fn essential_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].is_essential).collect()
    }
}

pub fn classify(c: &Circuit) -> ClassTable {
    let mut nodes: Vec<NodeClass> = Vec::with_capacity(c.len());
    for n in c.nodes() {
        let cls = match &n.op {
            Op::Scalar(_) => NodeClass { is_parameter_node: true, ..Default::default() },
            Op::Param(_) => NodeClass { depends_on_param: true, is_parameter_node: true, ..Default::default() },
            Op::Input(_) => NodeClass { depends_on_input: true, ..Default::default() },
            op => {
                let (a, b) = op.args().expect("internal node");
                let (ca, cb) = (nodes[a], nodes[b]);
                let dep_in = ca.depends_on_input || cb.depends_on_input;
                let essential = match op {
                    Op::Div(..) => cb.depends_on_input,
                    _ => ca.depends_on_input && cb.depends_on_input,
                };
                NodeClass {
                    depends_on_input: dep_in,
                    depends_on_param: ca.depends_on_param || cb.depends_on_param,
                    is_parameter_node: !dep_in,
                    is_essential: essential,
                }
            }
        };
        nodes.push(cls);
    }
    ClassTable { nodes }
}

/// Every division sits at a parameter node.
pub fn is_essentially_division_free(c: &Circuit) -> bool {
    let t = classify(c);
    c.nodes()
        .iter()
        .enumerate()
        .all(|(i, n)| !matches!(n.op, Op::Div(..)) || t.nodes[i].is_parameter_node)
}

/// Every division is by a nonzero constant.
pub fn is_totally_division_free(c: &Circuit) -> bool {
    let t = classify(c);
    let consts = constant_values(c, &t);
    c.nodes().iter().all(|n| match n.op {
        Op::Div(_, b) => matches!(&consts[b], Some(v) if !v.is_zero()),
        _ => true,
    })
}

/// Values of the nodes built from scalars alone (`None` elsewhere or on a
/// division by zero).
pub(crate) fn constant_values(c: &Circuit, t: &ClassTable) -> Vec<Option<Scalar>> {
    let mut vals: Vec<Option<Scalar>> = Vec::with_capacity(c.len());
    for (i, n) in c.nodes().iter().enumerate() {
        let v = if !t.nodes[i].is_constant() {
            None
        } else {
            match &n.op {
                Op::Scalar(s) => Some(s.clone()),
                Op::Add(a, b) => vals[*a].as_ref().zip(vals[*b].as_ref()).map(|(x, y)| x + y),
                Op::Sub(a, b) => vals[*a].as_ref().zip(vals[*b].as_ref()).map(|(x, y)| x - y),
                Op::Mul(a, b) => vals[*a].as_ref().zip(vals[*b].as_ref()).map(|(x, y)| x * y),
                Op::Div(a, b) => vals[*a].as_ref().zip(vals[*b].as_ref()).and_then(|(x, y)| x.checked_div(y).ok()),
                _ => None,
            }
        };
        vals.push(v);
    }
    vals
}
