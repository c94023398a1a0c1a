#include "autodiff/tangent.hpp"

#include <vector>

namespace bspinn::ad {

namespace {

bool is_stride1(std::span<const NodeId> ids) {
  for (std::size_t k = 1; k < ids.size(); ++k) {
    if (ids[k] != ids[0] + k) return false;
  }
  return true;
}

}  // namespace

InputTangent::InputTangent(Graph& graph, Expr seed) : graph_(&graph) {
  if (!seed.valid() || seed.graph() != graph_) {
    throw InvalidArgument("tangent seed must belong to the graph");
  }
  if (graph.node(seed.id()).op != Op::kInput) {
    throw InvalidArgument("tangent seed must be an input node");
  }
  seed_ = seed.id();
}

Expr InputTangent::derivative(Expr e) {
  if (!e.valid() || e.graph() != graph_) {
    throw InvalidArgument("expression does not belong to the tangent's graph");
  }
  const NodeId t = tangent(e.id());
  return t == kNoNode ? graph_->constant(0.0) : Expr(graph_, t);
}

NodeId InputTangent::tangent(NodeId id) {
  if (auto it = memo_.find(id); it != memo_.end()) return it->second;

  Graph& g = *graph_;
  const Node n = g.node(id);
  const Expr self(&g, id);
  NodeId result = kNoNode;

  // Combines optional terms, treating kNoNode as zero.
  const auto combine = [&](NodeId x, NodeId y, bool y_negated) -> NodeId {
    if (x == kNoNode && y == kNoNode) return kNoNode;
    if (y == kNoNode) return x;
    const Expr ye(&g, y);
    if (x == kNoNode) return y_negated ? g.neg(ye).id() : y;
    const Expr xe(&g, x);
    return (y_negated ? g.sub(xe, ye) : g.add(xe, ye)).id();
  };

  switch (n.op) {
    case Op::kConst:
    case Op::kParam:
      break;
    case Op::kCopy:
      result = tangent(n.a);
      break;
    case Op::kInput:
      if (id == seed_) result = g.constant(1.0).id();
      break;
    case Op::kAdd:
      result = combine(tangent(n.a), tangent(n.b), false);
      break;
    case Op::kSub:
      result = combine(tangent(n.a), tangent(n.b), true);
      break;
    case Op::kNeg: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) result = g.neg(Expr(&g, ta)).id();
      break;
    }
    case Op::kMul: {
      const NodeId ta = tangent(n.a);
      const NodeId tb = tangent(n.b);
      NodeId left = kNoNode, right = kNoNode;
      if (ta != kNoNode) left = g.mul(Expr(&g, ta), Expr(&g, n.b)).id();
      if (tb != kNoNode) right = g.mul(Expr(&g, n.a), Expr(&g, tb)).id();
      result = combine(left, right, false);
      break;
    }
    case Op::kDiv: {
      // d(a/b) = (da - (a/b)*db) / b
      const NodeId ta = tangent(n.a);
      const NodeId tb = tangent(n.b);
      if (ta == kNoNode && tb == kNoNode) break;
      NodeId num = ta;
      if (tb != kNoNode) {
        const NodeId scaled = g.mul(self, Expr(&g, tb)).id();
        num = combine(ta, scaled, true);
      }
      result = g.div(Expr(&g, num), Expr(&g, n.b)).id();
      break;
    }
    case Op::kSin: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) {
        result = g.mul(g.cos(Expr(&g, n.a)), Expr(&g, ta)).id();
      }
      break;
    }
    case Op::kCos: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) {
        result = g.neg(g.mul(g.sin(Expr(&g, n.a)), Expr(&g, ta))).id();
      }
      break;
    }
    case Op::kExp: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) result = g.mul(self, Expr(&g, ta)).id();
      break;
    }
    case Op::kTanh: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) {
        const Expr sech2 = g.sub(g.constant(1.0), g.square(self));
        result = g.mul(sech2, Expr(&g, ta)).id();
      }
      break;
    }
    case Op::kSigmoid: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) {
        const Expr ds = g.mul(self, g.sub(g.constant(1.0), self));
        result = g.mul(ds, Expr(&g, ta)).id();
      }
      break;
    }
    case Op::kSquare: {
      const NodeId ta = tangent(n.a);
      if (ta != kNoNode) {
        const Expr two_a = g.mul(g.constant(2.0), Expr(&g, n.a));
        result = g.mul(two_a, Expr(&g, ta)).id();
      }
      break;
    }
    case Op::kAffine:
    case Op::kAffineSeq: {
      // d(bias + sum c_i*x_i) = d(bias) + sum [dc_i*x_i + c_i*dx_i].
      // Tangents of the argument range are materialized first, in index
      // order, so the derivative affine usually stays sequential.
      const std::uint32_t count =
          n.op == Op::kAffineSeq ? AffineMeta::count(n.b) : n.b;
      std::vector<Expr> coeffs, args;
      coeffs.reserve(count * 2);
      args.reserve(count * 2);
      const auto each_pair = [&](auto&& fn) {
        if (n.op == Op::kAffineSeq) {
          const std::uint32_t cs = AffineMeta::cstride(n.b);
          const std::uint32_t as = AffineMeta::astride(n.b);
          for (std::uint32_t k = 0; k < count; ++k) {
            fn(n.a + k * cs, n.d + k * as);
          }
        } else {
          const auto pool = g.pool();
          for (std::uint32_t k = 0; k < count; ++k) {
            fn(pool[n.a + k].first, pool[n.a + k].second);
          }
        }
      };
      each_pair([&](NodeId ck, NodeId xk) {
        const NodeId txk = tangent(xk);
        if (txk != kNoNode) {
          coeffs.push_back(Expr(&g, ck));
          args.push_back(Expr(&g, txk));
        }
      });
      each_pair([&](NodeId ck, NodeId xk) {
        const NodeId tck = tangent(ck);
        if (tck != kNoNode) {
          coeffs.push_back(Expr(&g, tck));
          args.push_back(Expr(&g, xk));
        }
      });
      Expr dbias;
      if (n.c != kNoNode) {
        const NodeId tb = tangent(n.c);
        if (tb != kNoNode) dbias = Expr(&g, tb);
      }
      if (!coeffs.empty() || dbias.valid()) {
        result = g.affine(dbias, coeffs, args).id();
      }
      break;
    }
    case Op::kAffinePSeq:
    case Op::kAffinePGather: {
      // Parameter-slot coefficients are constants of the tangent; the
      // derivative keeps the same weight slot base over the arg tangents.
      const std::uint32_t count =
          n.op == Op::kAffinePSeq ? AffineMeta::count(n.b) : n.b;
      std::vector<NodeId> xs(count);
      std::vector<NodeId> targs(count, kNoNode);
      bool any = false;
      bool all = true;
      for (std::uint32_t k = 0; k < count; ++k) {
        xs[k] = n.op == Op::kAffinePSeq ? n.d + k * AffineMeta::astride(n.b)
                                        : g.arg_pool()[n.d + k];
        targs[k] = tangent(xs[k]);
        any = any || targs[k] != kNoNode;
        all = all && targs[k] != kNoNode;
      }
      if (!any) break;
      // Wide tangent runs are compacted into consecutive relay nodes so
      // the derivative affine (and every sibling row reusing the memo)
      // reads its arguments at stride 1.
      if (all && count >= 16 && !is_stride1(targs)) {
        for (std::uint32_t k = 0; k < count; ++k) {
          const NodeId relay = g.emit(Node{Op::kCopy, targs[k]}).id();
          targs[k] = relay;
          memo_[xs[k]] = relay;
        }
      }
      // Dropping zero-tangent terms would shift the slot alignment, so
      // they are kept as explicit zeros (only the input map hits this).
      for (NodeId& t : targs) {
        if (t == kNoNode) t = g.constant(0.0).id();
      }
      result = g.affine_params_ids(n.a, kNoNode, targs).id();
      break;
    }
  }

  memo_.emplace(id, result);
  return result;
}

Jet2 input_jet(Expr output, Expr coord) {
  if (!output.valid()) throw InvalidArgument("input_jet: invalid output");
  InputTangent t(*output.graph(), coord);
  const Expr first = t.derivative(output);
  const Expr second = t.derivative(first);
  return Jet2{output, first, second};
}

Expr first_deriv(Expr e, Expr coord) {
  if (!e.valid()) throw InvalidArgument("first_deriv: invalid expression");
  InputTangent t(*e.graph(), coord);
  return t.derivative(e);
}

}  // namespace bspinn::ad
