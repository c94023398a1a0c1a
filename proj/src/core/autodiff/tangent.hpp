#pragma once

#include <unordered_map>

#include "autodiff/graph.hpp"

namespace bspinn::ad {

/// Value and first/second derivatives of an expression with respect to one
/// input coordinate. Each component is itself an expression over the same
/// graph, so parameter gradients of residuals built from jets work as usual.
struct Jet2 {
  Expr value;
  Expr first;
  Expr second;
};

/// Forward-mode derivative transform with respect to a single input node.
/// Memoized per instance: reusing one transform across several expressions
/// (and across repeated application for higher orders) shares work.
class InputTangent {
 public:
  /// seed must be an input node of the graph.
  InputTangent(Graph& graph, Expr seed);

  /// Derivative of e w.r.t. the seed input, as a new expression.
  /// Structurally zero derivatives come back as the constant 0.
  Expr derivative(Expr e);

 private:
  // kNoNode marks a structurally zero tangent in the memo.
  NodeId tangent(NodeId id);

  Graph* graph_;
  NodeId seed_;
  std::unordered_map<NodeId, NodeId> memo_;
};

/// u, du/dx_coord, d^2u/dx_coord^2 at the symbolic point. coord must be an
/// input node (typically one coordinate of the point the network was built
/// on).
Jet2 input_jet(Expr output, Expr coord);

/// First derivative of an arbitrary expression over network outputs with
/// respect to one input coordinate.
Expr first_deriv(Expr e, Expr coord);

}  // namespace bspinn::ad
