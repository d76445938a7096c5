//! Graphs reduced to conjugacy of automorphisms of the random graph.

pub mod choice;
pub mod delta;
pub mod hereditary;
pub mod reduce;

pub use choice::{choice_index, choice_set, ChoiceSet};
pub use delta::{delta_adj, delta_witness, swap_vertex, DeltaGraph, SwapMemo, VertexCode};
pub use hereditary::{Transport, VertexArena, VertexId};
pub use reduce::{
    check_commuting, decide_conjugate_reduced, graph_conjugator, graph_reduce, graph_reduce_with, recover_graph_iso,
    CommuteReport, GraphConjugator, GraphReduction, RowPreserving, Verdict,
};
