//! Non-scalar (Ostrowski) cost measures.

use serde::Serialize;

use crate::circuit::{classify, Circuit, NodeId, Op};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub essential_mults: usize,
    pub essential_divs: usize,
    /// Multiplications with one input-dependent argument and one argument
    /// that is a parameter node depending on some basic parameter.
    pub param_mults: usize,
    pub nonscalar_size: usize,
    /// Multiplications and divisions other than by constants.
    pub total_mults_nonscalar: usize,
    pub node_count: usize,
    /// Essential operations on the longest path.
    pub depth: usize,
    /// Edges on the longest path.
    pub total_depth: usize,
    /// Essential parameter count `m`.
    pub essential_param_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterAudit {
    pub m: usize,
    /// Parameter nodes, depending on some basic parameter, with an edge into
    /// an input-dependent node.
    pub essential_parameters: Vec<NodeId>,
}

pub fn parameter_audit(c: &Circuit) -> ParameterAudit {
    let t = classify(c);
    let mut essential = vec![false; c.len()];
    for n in c.nodes() {
        if let Some((a, b)) = n.op.args() {
            let target_dep = t.nodes[a].depends_on_input || t.nodes[b].depends_on_input;
            if !target_dep {
                continue;
            }
            for p in [a, b] {
                let cl = &t.nodes[p];
                if cl.is_parameter_node && cl.depends_on_param {
                    essential[p] = true;
                }
            }
        }
    }
    let essential_parameters: Vec<NodeId> = (0..c.len()).filter(|&i| essential[i]).collect();
    ParameterAudit { m: essential_parameters.len(), essential_parameters }
}

pub fn cost(c: &Circuit) -> CostReport {
    let t = classify(c);
    let (mut em, mut ed, mut pm, mut total) = (0, 0, 0, 0);
    let mut depth = vec![0usize; c.len()];
    let mut tdepth = vec![0usize; c.len()];
    for (i, n) in c.nodes().iter().enumerate() {
        let Some((a, b)) = n.op.args() else { continue };
        let (ca, cb) = (&t.nodes[a], &t.nodes[b]);
        let ess = t.nodes[i].is_essential;
        match n.op {
            Op::Mul(..) => {
                if ess {
                    em += 1;
                }
                if !ca.is_constant() && !cb.is_constant() {
                    total += 1;
                }
                let param_dep = |x: &crate::circuit::NodeClass| x.is_parameter_node && x.depends_on_param;
                if (ca.depends_on_input && param_dep(cb)) || (cb.depends_on_input && param_dep(ca)) {
                    pm += 1;
                }
            }
            Op::Div(..) => {
                if ess {
                    ed += 1;
                }
                if !cb.is_constant() {
                    total += 1;
                }
            }
            _ => {}
        }
        depth[i] = depth[a].max(depth[b]) + usize::from(ess && matches!(n.op, Op::Mul(..) | Op::Div(..)));
        tdepth[i] = tdepth[a].max(tdepth[b]) + 1;
    }
    let over_outputs = |v: &[usize]| c.outputs().iter().map(|&o| v[o]).max().unwrap_or(0);
    CostReport {
        essential_mults: em,
        essential_divs: ed,
        param_mults: pm,
        nonscalar_size: em + ed,
        total_mults_nonscalar: total,
        node_count: c.len(),
        depth: over_outputs(&depth),
        total_depth: over_outputs(&tdepth),
        essential_param_count: parameter_audit(c).m,
    }
}
