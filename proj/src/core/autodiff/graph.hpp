#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "common.hpp"

namespace bspinn::ad {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

/// Primitive set. The affine primitive computes bias + sum(coeff_i*arg_i);
/// it comes in several encodings so network-shaped graphs keep their hot
/// loops free of per-element indirection:
///   kAffine       general (coeff, arg) node pairs from the pair pool
///   kAffineSeq    node-space coeffs and args, each a strided id sequence
///   kAffinePSeq   coeffs are consecutive parameter slots, args strided ids
///   kAffinePGather coeffs are consecutive parameter slots, args pooled ids
enum class Op : std::uint8_t {
  kConst,
  kInput,
  kParam,
  kCopy,  // identity relay; compacts derivative runs into contiguous ids
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSin,
  kCos,
  kExp,
  kTanh,
  kSigmoid,
  kSquare,
  kAffine,
  kAffineSeq,
  kAffinePSeq,
  kAffinePGather,
};

/// Packs an affine pair count with the coeff/arg id strides.
/// count <= 2^20, strides <= 63 (otherwise the general encoding is used).
struct AffineMeta {
  static constexpr std::uint32_t kMaxCount = (1u << 20) - 1;
  static constexpr std::uint32_t kMaxStride = 63;
  static std::uint32_t pack(std::uint32_t count, std::uint32_t cstride,
                            std::uint32_t astride) {
    return count | (cstride << 20) | (astride << 26);
  }
  static std::uint32_t count(std::uint32_t b) { return b & kMaxCount; }
  static std::uint32_t cstride(std::uint32_t b) { return (b >> 20) & 63; }
  static std::uint32_t astride(std::uint32_t b) { return (b >> 26) & 63; }
};

struct Node {
  Op op;
  // kConst/kInput/kParam: a = slot index.
  // unary/binary: a, b = operand ids.
  // kAffine:      a = pair-pool begin, b = count, c = bias id.
  // kAffineSeq:   a = coeff id base, b = packed meta, c = bias id, d = arg id base.
  // kAffinePSeq:  a = param slot base, b = packed meta, c = bias param slot, d = arg id base.
  // kAffinePGather: a = param slot base, b = count, c = bias param slot, d = arg-pool begin.
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  NodeId c = kNoNode;
  NodeId d = kNoNode;
};

class Graph;

/// Handle to one node of a Graph. Cheap to copy; valid as long as the
/// graph lives.
class Expr {
 public:
  Expr() = default;
  Expr(Graph* graph, NodeId id) : graph_(graph), id_(id) {}

  Graph* graph() const { return graph_; }
  NodeId id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  Expr operator-() const;

 private:
  Graph* graph_ = nullptr;
  NodeId id_ = kNoNode;
};

class Workspace;

/// Append-only scalar expression graph. Node order is a topological order
/// by construction (operands always precede their consumers). A graph is
/// confined to one thread while nodes are being added; finished graphs can
/// be evaluated concurrently through independent Workspaces.
class Graph {
 public:
  Graph();
  ~Graph();
  Graph(Graph&&) noexcept;
  Graph& operator=(Graph&&) noexcept;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr constant(double value);
  Expr input();
  Expr parameter();
  std::vector<Expr> inputs(std::size_t n);
  std::vector<Expr> parameters(std::size_t n);

  /// Registers n parameter slots without creating nodes; slots are then
  /// referenced directly by affine_params. Returns the first slot index.
  std::uint32_t reserve_param_slots(std::size_t n);

  /// A node view of an existing parameter slot.
  Expr param_ref(std::uint32_t slot);

  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr mul(Expr a, Expr b);
  Expr div(Expr a, Expr b);
  Expr neg(Expr a);
  Expr sin(Expr a);
  Expr cos(Expr a);
  Expr exp(Expr a);
  Expr tanh(Expr a);
  Expr sigmoid(Expr a);
  Expr square(Expr a);

  /// bias + sum(coeffs[i] * args[i]). bias may be invalid (no bias term).
  Expr affine(Expr bias, std::span<const Expr> coeffs,
              std::span<const Expr> args);

  /// params[weight_slot + i] coefficients over args, plus params[bias_slot]
  /// (bias_slot == kNoNode for no bias). The fast path for network layers.
  Expr affine_params(std::uint32_t weight_slot, std::uint32_t bias_slot,
                     std::span<const Expr> args);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t input_count() const { return n_inputs_; }
  std::size_t param_count() const { return n_params_; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  double const_value(NodeId slot) const { return const_values_[slot]; }
  std::span<const std::pair<NodeId, NodeId>> pool() const { return pool_; }
  std::span<const NodeId> arg_pool() const { return arg_pool_; }

  /// Single-threaded convenience evaluation with the graph's own workspace.
  /// Checks every intermediate for finiteness; throws NumericError.
  double eval(Expr root, std::span<const double> inputs,
              std::span<const double> params = {});

  /// Reverse-accumulation gradient of a scalar w.r.t. all parameter slots.
  std::vector<double> grad_params(Expr loss, std::span<const double> inputs,
                                  std::span<const double> params);

 private:
  friend class Workspace;
  friend class InputTangent;

  Expr emit(Node n);
  void check_same_graph(Expr e) const;
  Expr affine_params_ids(std::uint32_t weight_slot, std::uint32_t bias_slot,
                         std::span<const NodeId> args);

  std::vector<Node> nodes_;
  std::vector<std::pair<NodeId, NodeId>> pool_;
  std::vector<NodeId> arg_pool_;
  std::vector<double> const_values_;
  std::unordered_map<std::uint64_t, NodeId> const_cache_;
  std::unordered_map<std::uint64_t, NodeId> unary_cache_;
  std::uint32_t n_inputs_ = 0;
  std::uint32_t n_params_ = 0;
  std::unique_ptr<Workspace> scratch_;
};

/// Dense forward/reverse sweeps over a Graph. Holds the value and adjoint
/// buffers, so concurrent evaluation uses one Workspace per thread.
class Workspace {
 public:
  explicit Workspace(const Graph& graph);

  /// Recomputes all node values. Sizes must match the graph's slot counts.
  /// Does not check finiteness (callers validate their end results).
  void forward(std::span<const double> inputs,
               std::span<const double> params = {});

  /// As forward(), but throws NumericError naming the first non-finite
  /// node, per the "non-finite intermediate" contract.
  void forward_checked(std::span<const double> inputs,
                       std::span<const double> params = {});

  double value(NodeId id) const { return values_[id]; }
  double value(Expr e) const { return values_[e.id()]; }

  /// Reverse sweep from the given seed adjoints; parameter adjoints are
  /// accumulated (+=) into grad, which must have param_count entries.
  /// params must be the same values the preceding forward() used.
  void reverse(std::span<const std::pair<NodeId, double>> seeds,
               std::span<double> grad, std::span<const double> params = {});

  const Graph& graph() const { return *graph_; }

  /// Re-reads the graph's node count (after more nodes were added).
  void resize_to_graph();

 private:
  const Graph* graph_;
  std::vector<double> values_;
  std::vector<double> aux_;  // cos at sin nodes / sin at cos nodes
  std::vector<double> adjoints_;
};

// Operator sugar; scalars are promoted to constant nodes.
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator+(Expr a, double b);
Expr operator+(double a, Expr b);
Expr operator-(Expr a, double b);
Expr operator-(double a, Expr b);
Expr operator*(Expr a, double b);
Expr operator*(double a, Expr b);
Expr operator/(Expr a, double b);
Expr operator/(double a, Expr b);
Expr sin(Expr a);
Expr cos(Expr a);
Expr exp(Expr a);
Expr tanh(Expr a);
Expr sigmoid(Expr a);
Expr square(Expr a);

}  // namespace bspinn::ad
