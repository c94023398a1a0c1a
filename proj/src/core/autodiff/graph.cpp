#include "autodiff/graph.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace bspinn::ad {

namespace {

const char* op_name(Op op) {
  switch (op) {
    case Op::kConst: return "const";
    case Op::kInput: return "input";
    case Op::kParam: return "param";
    case Op::kCopy: return "copy";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kNeg: return "neg";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kExp: return "exp";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kSquare: return "square";
    case Op::kAffine:
    case Op::kAffineSeq:
    case Op::kAffinePSeq:
    case Op::kAffinePGather: return "affine";
  }
  return "?";
}

/// ids[k] == ids[0] + k*stride for some stride in [0, kMaxStride]?
bool uniform_stride(std::span<const NodeId> ids, std::uint32_t& stride) {
  if (ids.size() <= 1) {
    stride = 0;
    return true;
  }
  if (ids[1] < ids[0]) return false;
  const std::uint32_t s = ids[1] - ids[0];
  if (s > AffineMeta::kMaxStride) return false;
  for (std::size_t k = 2; k < ids.size(); ++k) {
    if (ids[k] != ids[0] + static_cast<NodeId>(k) * s) return false;
  }
  stride = s;
  return true;
}

}  // namespace

Graph::Graph() = default;
Graph::~Graph() = default;
Graph::Graph(Graph&&) noexcept = default;
Graph& Graph::operator=(Graph&&) noexcept = default;

Expr Graph::emit(Node n) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(n);
  return Expr(this, id);
}

void Graph::check_same_graph(Expr e) const {
  if (!e.valid() || e.graph() != this || e.id() >= nodes_.size()) {
    throw InvalidArgument("expression does not belong to this graph");
  }
}

Expr Graph::constant(double value) {
  const std::uint64_t key = std::bit_cast<std::uint64_t>(value);
  if (auto it = const_cache_.find(key); it != const_cache_.end()) {
    return Expr(this, it->second);
  }
  const NodeId slot = static_cast<NodeId>(const_values_.size());
  const_values_.push_back(value);
  Expr e = emit(Node{Op::kConst, slot});
  const_cache_.emplace(key, e.id());
  return e;
}

Expr Graph::input() { return emit(Node{Op::kInput, n_inputs_++}); }

Expr Graph::parameter() { return emit(Node{Op::kParam, n_params_++}); }

std::vector<Expr> Graph::inputs(std::size_t n) {
  std::vector<Expr> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(input());
  return out;
}

std::vector<Expr> Graph::parameters(std::size_t n) {
  std::vector<Expr> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(parameter());
  return out;
}

std::uint32_t Graph::reserve_param_slots(std::size_t n) {
  const std::uint32_t first = n_params_;
  n_params_ += static_cast<std::uint32_t>(n);
  return first;
}

Expr Graph::param_ref(std::uint32_t slot) {
  if (slot >= n_params_) throw InvalidArgument("param_ref: no such slot");
  return emit(Node{Op::kParam, slot});
}

#define BSPINN_BINOP(name, opcode)                \
  Expr Graph::name(Expr a, Expr b) {              \
    check_same_graph(a);                          \
    check_same_graph(b);                          \
    return emit(Node{opcode, a.id(), b.id()});    \
  }

BSPINN_BINOP(add, Op::kAdd)
BSPINN_BINOP(sub, Op::kSub)
BSPINN_BINOP(mul, Op::kMul)
BSPINN_BINOP(div, Op::kDiv)
#undef BSPINN_BINOP

#define BSPINN_UNOP(name, opcode)                                        \
  Expr Graph::name(Expr a) {                                             \
    check_same_graph(a);                                                 \
    const std::uint64_t key =                                            \
        (static_cast<std::uint64_t>(opcode) << 32) | a.id();             \
    if (auto it = unary_cache_.find(key); it != unary_cache_.end()) {    \
      return Expr(this, it->second);                                     \
    }                                                                    \
    Expr e = emit(Node{opcode, a.id()});                                 \
    unary_cache_.emplace(key, e.id());                                   \
    return e;                                                            \
  }

BSPINN_UNOP(neg, Op::kNeg)
BSPINN_UNOP(sin, Op::kSin)
BSPINN_UNOP(cos, Op::kCos)
BSPINN_UNOP(exp, Op::kExp)
BSPINN_UNOP(tanh, Op::kTanh)
BSPINN_UNOP(sigmoid, Op::kSigmoid)
BSPINN_UNOP(square, Op::kSquare)
#undef BSPINN_UNOP

Expr Graph::affine(Expr bias, std::span<const Expr> coeffs,
                   std::span<const Expr> args) {
  if (coeffs.size() != args.size()) {
    throw InvalidArgument("affine: coeff/arg count mismatch");
  }
  if (bias.valid()) check_same_graph(bias);
  for (Expr e : coeffs) check_same_graph(e);
  for (Expr e : args) check_same_graph(e);

  const std::uint32_t n = static_cast<std::uint32_t>(coeffs.size());
  const NodeId bias_id = bias.valid() ? bias.id() : kNoNode;
  if (n == 0) {
    return bias.valid() ? bias : constant(0.0);
  }

  std::vector<NodeId> cid(n), aid(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    cid[k] = coeffs[k].id();
    aid[k] = args[k].id();
  }
  std::uint32_t cs = 0, as = 0;
  if (n <= AffineMeta::kMaxCount && uniform_stride(cid, cs) &&
      uniform_stride(aid, as)) {
    return emit(Node{Op::kAffineSeq, cid[0], AffineMeta::pack(n, cs, as),
                     bias_id, aid[0]});
  }
  const NodeId begin = static_cast<NodeId>(pool_.size());
  pool_.reserve(pool_.size() + n);
  for (std::uint32_t k = 0; k < n; ++k) pool_.emplace_back(cid[k], aid[k]);
  return emit(Node{Op::kAffine, begin, n, bias_id});
}

Expr Graph::affine_params(std::uint32_t weight_slot, std::uint32_t bias_slot,
                          std::span<const Expr> args) {
  std::vector<NodeId> ids(args.size());
  for (std::size_t k = 0; k < args.size(); ++k) {
    check_same_graph(args[k]);
    ids[k] = args[k].id();
  }
  return affine_params_ids(weight_slot, bias_slot, ids);
}

Expr Graph::affine_params_ids(std::uint32_t weight_slot, std::uint32_t bias_slot,
                              std::span<const NodeId> args) {
  const std::uint32_t n = static_cast<std::uint32_t>(args.size());
  if (n == 0 || weight_slot + n > n_params_ ||
      (bias_slot != kNoNode && bias_slot >= n_params_)) {
    throw InvalidArgument("affine_params: bad parameter slot range");
  }
  std::uint32_t as = 0;
  if (n <= AffineMeta::kMaxCount && uniform_stride(args, as)) {
    return emit(Node{Op::kAffinePSeq, weight_slot, AffineMeta::pack(n, 1, as),
                     bias_slot, args[0]});
  }
  const NodeId begin = static_cast<NodeId>(arg_pool_.size());
  arg_pool_.insert(arg_pool_.end(), args.begin(), args.end());
  return emit(Node{Op::kAffinePGather, weight_slot, n, bias_slot, begin});
}

double Graph::eval(Expr root, std::span<const double> inputs,
                   std::span<const double> params) {
  check_same_graph(root);
  if (!scratch_) scratch_ = std::make_unique<Workspace>(*this);
  scratch_->forward_checked(inputs, params);
  return scratch_->value(root);
}

std::vector<double> Graph::grad_params(Expr loss, std::span<const double> inputs,
                                       std::span<const double> params) {
  check_same_graph(loss);
  if (!scratch_) scratch_ = std::make_unique<Workspace>(*this);
  scratch_->forward_checked(inputs, params);
  std::vector<double> grad(n_params_, 0.0);
  const std::pair<NodeId, double> seed{loss.id(), 1.0};
  scratch_->reverse({&seed, 1}, grad, params);
  return grad;
}

Workspace::Workspace(const Graph& graph) : graph_(&graph) {
  resize_to_graph();
}

void Workspace::resize_to_graph() {
  if (values_.size() != graph_->node_count()) {
    values_.resize(graph_->node_count());
    aux_.resize(graph_->node_count());
  }
}

namespace {

/// Unit-stride dot with four accumulators combined in a fixed order; the
/// explicit lanes both vectorize and keep results run-to-run identical.
inline double dot1(const double* __restrict c, const double* __restrict x,
                   std::uint32_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::uint32_t k = 0;
  for (; k + 4 <= n; k += 4) {
    a0 += c[k] * x[k];
    a1 += c[k + 1] * x[k + 1];
    a2 += c[k + 2] * x[k + 2];
    a3 += c[k + 3] * x[k + 3];
  }
  for (; k < n; ++k) a0 += c[k] * x[k];
  return (a0 + a1) + (a2 + a3);
}

/// gw += a*xv, xa += a*cw over disjoint unit-stride ranges.
inline void axpy_pair(double a, const double* __restrict cw,
                      const double* __restrict xv, double* __restrict gw,
                      double* __restrict xa, std::uint32_t n) {
  for (std::uint32_t k = 0; k < n; ++k) {
    gw[k] += a * xv[k];
    xa[k] += a * cw[k];
  }
}

inline void axpy1(double a, const double* __restrict x, double* __restrict y,
                  std::uint32_t n) {
  for (std::uint32_t k = 0; k < n; ++k) y[k] += a * x[k];
}

/// xa += W^T * ar for four consecutive weight rows.
inline void xty4(const double* __restrict w, std::uint32_t cnt,
                 const double ar[4], double* __restrict xa) {
  const double a0 = ar[0], a1 = ar[1], a2 = ar[2], a3 = ar[3];
  for (std::uint32_t k = 0; k < cnt; ++k) {
    xa[k] += a0 * w[k] + a1 * w[cnt + k] + a2 * w[2 * cnt + k] +
             a3 * w[3 * cnt + k];
  }
}

/// General strided dot, same accumulator order as dot1.
inline double strided_dot(const double* c, std::size_t cs, const double* x,
                          std::size_t xs, std::uint32_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::uint32_t k = 0;
  for (; k + 4 <= n; k += 4) {
    a0 += c[(k + 0) * cs] * x[(k + 0) * xs];
    a1 += c[(k + 1) * cs] * x[(k + 1) * xs];
    a2 += c[(k + 2) * cs] * x[(k + 2) * xs];
    a3 += c[(k + 3) * cs] * x[(k + 3) * xs];
  }
  for (; k < n; ++k) a0 += c[k * cs] * x[k * xs];
  return (a0 + a1) + (a2 + a3);
}

}  // namespace

void Workspace::forward(std::span<const double> inputs,
                        std::span<const double> params) {
  resize_to_graph();
  if (inputs.size() != graph_->input_count()) {
    throw InvalidArgument("forward: unbound inputs (expected " +
                          std::to_string(graph_->input_count()) + ", got " +
                          std::to_string(inputs.size()) + ")");
  }
  if (params.size() != graph_->param_count()) {
    throw InvalidArgument("forward: unbound parameters (expected " +
                          std::to_string(graph_->param_count()) + ", got " +
                          std::to_string(params.size()) + ")");
  }

  const Node* nodes = graph_->nodes_.data();
  const std::size_t count = graph_->nodes_.size();
  const auto* pool = graph_->pool_.data();
  const NodeId* apool = graph_->arg_pool_.data();
  const double* cv = graph_->const_values_.data();
  const double* pv = params.data();
  double* v = values_.data();
  double* aux = aux_.data();

  for (std::size_t i = 0; i < count; ++i) {
    const Node& n = nodes[i];
    switch (n.op) {
      case Op::kConst: v[i] = cv[n.a]; break;
      case Op::kInput: v[i] = inputs[n.a]; break;
      case Op::kParam: v[i] = pv[n.a]; break;
      case Op::kCopy: v[i] = v[n.a]; break;
      case Op::kAdd: v[i] = v[n.a] + v[n.b]; break;
      case Op::kSub: v[i] = v[n.a] - v[n.b]; break;
      case Op::kMul: v[i] = v[n.a] * v[n.b]; break;
      case Op::kDiv: v[i] = v[n.a] / v[n.b]; break;
      case Op::kNeg: v[i] = -v[n.a]; break;
      case Op::kSin: {
        double sv, cv2;
        ::sincos(v[n.a], &sv, &cv2);
        v[i] = sv;
        aux[i] = cv2;
        break;
      }
      case Op::kCos: {
        double sv, cv2;
        ::sincos(v[n.a], &sv, &cv2);
        v[i] = cv2;
        aux[i] = sv;
        break;
      }
      case Op::kExp: v[i] = std::exp(v[n.a]); break;
      case Op::kTanh: v[i] = std::tanh(v[n.a]); break;
      case Op::kSigmoid: v[i] = 1.0 / (1.0 + std::exp(-v[n.a])); break;
      case Op::kSquare: v[i] = v[n.a] * v[n.a]; break;
      case Op::kAffine: {
        double a0 = 0.0, a1 = 0.0;
        const auto* p = pool + n.a;
        std::uint32_t k = 0;
        for (; k + 2 <= n.b; k += 2) {
          a0 += v[p[k].first] * v[p[k].second];
          a1 += v[p[k + 1].first] * v[p[k + 1].second];
        }
        if (k < n.b) a0 += v[p[k].first] * v[p[k].second];
        double acc = a0 + a1;
        if (n.c != kNoNode) acc += v[n.c];
        v[i] = acc;
        break;
      }
      case Op::kAffineSeq: {
        const std::uint32_t cnt = AffineMeta::count(n.b);
        const std::uint32_t cs = AffineMeta::cstride(n.b);
        const std::uint32_t as = AffineMeta::astride(n.b);
        double acc = (cs == 1 && as == 1)
                         ? dot1(v + n.a, v + n.d, cnt)
                         : strided_dot(v + n.a, cs, v + n.d, as, cnt);
        if (n.c != kNoNode) acc += v[n.c];
        v[i] = acc;
        break;
      }
      case Op::kAffinePSeq: {
        const std::uint32_t cnt = AffineMeta::count(n.b);
        const std::uint32_t as = AffineMeta::astride(n.b);
        double acc = as == 1 ? dot1(pv + n.a, v + n.d, cnt)
                             : strided_dot(pv + n.a, 1, v + n.d, as, cnt);
        if (n.c != kNoNode) acc += pv[n.c];
        v[i] = acc;
        break;
      }
      case Op::kAffinePGather: {
        const double* c = pv + n.a;
        const NodeId* xs = apool + n.d;
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        std::uint32_t k = 0;
        for (; k + 4 <= n.b; k += 4) {
          a0 += c[k] * v[xs[k]];
          a1 += c[k + 1] * v[xs[k + 1]];
          a2 += c[k + 2] * v[xs[k + 2]];
          a3 += c[k + 3] * v[xs[k + 3]];
        }
        for (; k < n.b; ++k) a0 += c[k] * v[xs[k]];
        double acc = (a0 + a1) + (a2 + a3);
        if (n.c != kNoNode) acc += pv[n.c];
        v[i] = acc;
        break;
      }
    }
  }
}

void Workspace::forward_checked(std::span<const double> inputs,
                                std::span<const double> params) {
  forward(inputs, params);
  const Node* nodes = graph_->nodes_.data();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericError("non-finite value at node " + std::to_string(i) +
                         " (" + op_name(nodes[i].op) + ")");
    }
  }
}

void Workspace::reverse(std::span<const std::pair<NodeId, double>> seeds,
                        std::span<double> grad, std::span<const double> params) {
  if (grad.size() != graph_->param_count()) {
    throw InvalidArgument("reverse: gradient buffer size mismatch");
  }
  if (params.size() != graph_->param_count()) {
    throw InvalidArgument("reverse: parameter values required");
  }
  adjoints_.assign(values_.size(), 0.0);
  NodeId top = 0;
  for (const auto& [id, w] : seeds) {
    if (id >= values_.size()) throw InvalidArgument("reverse: bad seed node");
    adjoints_[id] += w;
    if (id > top) top = id;
  }

  const Node* nodes = graph_->nodes_.data();
  const auto* pool = graph_->pool_.data();
  const NodeId* apool = graph_->arg_pool_.data();
  const double* pv = params.data();
  const double* v = values_.data();
  const double* aux = aux_.data();
  double* adj = adjoints_.data();
  double* g = grad.data();

  for (NodeId i = top;; --i) {
    const double a = adj[i];
    if (a != 0.0) {
      const Node& n = nodes[i];
      switch (n.op) {
        case Op::kConst:
        case Op::kInput:
          break;
        case Op::kParam:
          g[n.a] += a;
          break;
        case Op::kCopy:
          adj[n.a] += a;
          break;
        case Op::kAdd:
          adj[n.a] += a;
          adj[n.b] += a;
          break;
        case Op::kSub:
          adj[n.a] += a;
          adj[n.b] -= a;
          break;
        case Op::kMul:
          adj[n.a] += a * v[n.b];
          adj[n.b] += a * v[n.a];
          break;
        case Op::kDiv: {
          const double inv = 1.0 / v[n.b];
          adj[n.a] += a * inv;
          adj[n.b] -= a * v[i] * inv;
          break;
        }
        case Op::kNeg:
          adj[n.a] -= a;
          break;
        case Op::kSin:
          adj[n.a] += a * aux[i];
          break;
        case Op::kCos:
          adj[n.a] -= a * aux[i];
          break;
        case Op::kExp:
          adj[n.a] += a * v[i];
          break;
        case Op::kTanh: {
          const double t = v[i];
          adj[n.a] += a * (1.0 - t * t);
          break;
        }
        case Op::kSigmoid: {
          const double s = v[i];
          adj[n.a] += a * s * (1.0 - s);
          break;
        }
        case Op::kSquare:
          adj[n.a] += 2.0 * a * v[n.a];
          break;
        case Op::kAffine: {
          const auto* p = pool + n.a;
          for (std::uint32_t k = 0; k < n.b; ++k) {
            adj[p[k].first] += a * v[p[k].second];
            adj[p[k].second] += a * v[p[k].first];
          }
          if (n.c != kNoNode) adj[n.c] += a;
          break;
        }
        case Op::kAffineSeq: {
          const std::uint32_t cnt = AffineMeta::count(n.b);
          const std::size_t cs = AffineMeta::cstride(n.b);
          const std::size_t as = AffineMeta::astride(n.b);
          const double* cv2 = v + n.a;
          const double* xv = v + n.d;
          double* ca = adj + n.a;
          double* xa = adj + n.d;
          for (std::uint32_t k = 0; k < cnt; ++k) {
            ca[k * cs] += a * xv[k * as];
            xa[k * as] += a * cv2[k * cs];
          }
          if (n.c != kNoNode) adj[n.c] += a;
          break;
        }
        case Op::kAffinePSeq: {
          const std::uint32_t cnt = AffineMeta::count(n.b);
          const std::size_t as = AffineMeta::astride(n.b);
          const double* cw = pv + n.a;
          const double* xv = v + n.d;
          double* gw = g + n.a;
          double* xa = adj + n.d;
          if (as == 1) {
            // Rows of one affine map sit on consecutive ids with weight
            // slots advancing by cnt; batching four rows makes a single
            // pass over the argument adjoints.
            std::uint32_t rows = 1;
            while (rows < 4 && i >= rows) {
              const Node& m = nodes[i - rows];
              if (m.op != Op::kAffinePSeq || m.b != n.b || m.d != n.d ||
                  m.a + rows * cnt != n.a) {
                break;
              }
              ++rows;
            }
            if (rows > 1) {
              const NodeId base = i - (rows - 1);
              double ar[4] = {0.0, 0.0, 0.0, 0.0};
              for (std::uint32_t r = 0; r < rows; ++r) ar[r] = adj[base + r];
              const double* w0 = pv + nodes[base].a;
              double* g0 = g + nodes[base].a;
              for (std::uint32_t r = 0; r < rows; ++r) {
                axpy1(ar[r], xv, g0 + r * cnt, cnt);
              }
              if (rows == 4) {
                xty4(w0, cnt, ar, xa);
              } else {
                for (std::uint32_t r = 0; r < rows; ++r) {
                  axpy1(ar[r], w0 + r * cnt, xa, cnt);
                }
              }
              for (std::uint32_t r = 0; r < rows; ++r) {
                const Node& m = nodes[base + r];
                if (m.c != kNoNode) g[m.c] += ar[r];
              }
              i = base;
              if (i == 0) return;
              continue;
            }
            axpy_pair(a, cw, xv, gw, xa, cnt);
          } else {
            for (std::uint32_t k = 0; k < cnt; ++k) {
              gw[k] += a * xv[k * as];
              xa[k * as] += a * cw[k];
            }
          }
          if (n.c != kNoNode) g[n.c] += a;
          break;
        }
        case Op::kAffinePGather: {
          const double* cw = pv + n.a;
          const NodeId* xs = apool + n.d;
          double* gw = g + n.a;
          for (std::uint32_t k = 0; k < n.b; ++k) {
            const NodeId x = xs[k];
            gw[k] += a * v[x];
            adj[x] += a * cw[k];
          }
          if (n.c != kNoNode) g[n.c] += a;
          break;
        }
      }
    }
    if (i == 0) break;
  }
}

Expr Expr::operator-() const { return graph_->neg(*this); }

Expr operator+(Expr a, Expr b) { return a.graph()->add(a, b); }
Expr operator-(Expr a, Expr b) { return a.graph()->sub(a, b); }
Expr operator*(Expr a, Expr b) { return a.graph()->mul(a, b); }
Expr operator/(Expr a, Expr b) { return a.graph()->div(a, b); }
Expr operator+(Expr a, double b) { return a + a.graph()->constant(b); }
Expr operator+(double a, Expr b) { return b.graph()->constant(a) + b; }
Expr operator-(Expr a, double b) { return a - a.graph()->constant(b); }
Expr operator-(double a, Expr b) { return b.graph()->constant(a) - b; }
Expr operator*(Expr a, double b) { return a * a.graph()->constant(b); }
Expr operator*(double a, Expr b) { return b.graph()->constant(a) * b; }
Expr operator/(Expr a, double b) { return a / a.graph()->constant(b); }
Expr operator/(double a, Expr b) { return b.graph()->constant(a) / b; }
Expr sin(Expr a) { return a.graph()->sin(a); }
Expr cos(Expr a) { return a.graph()->cos(a); }
Expr exp(Expr a) { return a.graph()->exp(a); }
Expr tanh(Expr a) { return a.graph()->tanh(a); }
Expr sigmoid(Expr a) { return a.graph()->sigmoid(a); }
Expr square(Expr a) { return a.graph()->square(a); }

}  // namespace bspinn::ad
