#include "fdct/nn/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_set>

#include "fdct/errors.hpp"

namespace fdct::nn {

namespace {
std::atomic<std::uint64_t> g_next_id{1};
thread_local bool g_grad_enabled = true;

NodePtr new_node(Shape shape, std::vector<double> value) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(value);
    n->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
    return n;
}
}  // namespace

std::int64_t shape_numel(const Shape& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << "]";
    return os.str();
}

std::vector<std::int64_t> shape_strides(const Shape& s) {
    std::vector<std::int64_t> st(s.size(), 1);
    for (int i = static_cast<int>(s.size()) - 2; i >= 0; --i) st[i] = st[i + 1] * s[i + 1];
    return st;
}

Tensor Tensor::zeros(const Shape& s, bool requires_grad) {
    auto n = new_node(s, std::vector<double>(static_cast<std::size_t>(shape_numel(s)), 0.0));
    n->requires_grad = requires_grad;
    n->leaf = true;
    return Tensor(n);
}

Tensor Tensor::full(const Shape& s, double v) {
    auto n = new_node(s, std::vector<double>(static_cast<std::size_t>(shape_numel(s)), v));
    n->leaf = true;
    return Tensor(n);
}

Tensor Tensor::from_data(const Shape& s, std::vector<double> data, bool requires_grad) {
    if (static_cast<std::int64_t>(data.size()) != shape_numel(s))
        throw ShapeError("from_data: " + shape_str(s) + " needs " +
                         std::to_string(shape_numel(s)) + " values, got " +
                         std::to_string(data.size()));
    auto n = new_node(s, std::move(data));
    n->requires_grad = requires_grad;
    n->leaf = true;
    return Tensor(n);
}

std::int64_t Tensor::dim(int i) const {
    const int nd = ndim();
    if (i < 0) i += nd;
    if (i < 0 || i >= nd) throw ShapeError("dim index out of range");
    return node_->shape[static_cast<std::size_t>(i)];
}

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item: tensor is not a scalar");
    return node_->value[0];
}

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

bool grad_enabled() { return g_grad_enabled; }

Tensor make_op(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
               std::function<void(Node&)> backward_fn) {
    auto n = new_node(std::move(shape), std::move(value));
    bool needs = false;
    if (g_grad_enabled) {
        for (const auto& p : parents)
            if (p && p->requires_grad) {
                needs = true;
                break;
            }
    }
    if (needs) {
        n->requires_grad = true;
        n->parents = std::move(parents);
        n->backward_fn = std::move(backward_fn);
    }
    return Tensor(n);
}

void backward(const Tensor& loss) {
    if (!loss.defined() || loss.numel() != 1)
        throw DomainError("backward: loss must be a defined scalar tensor");
    NodePtr root = loss.node();
    if (!root->requires_grad) return;  // nothing reachable requires grad

    // Collect the requires_grad subgraph.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<Node*> stack{root.get()};
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        order.push_back(n);
        for (const auto& p : n->parents)
            if (p && p->requires_grad) stack.push_back(p.get());
    }
    std::sort(order.begin(), order.end(), [](Node* a, Node* b) { return a->id > b->id; });

    for (Node* n : order) n->ensure_grad();
    root->grad[0] += 1.0;
    for (Node* n : order)
        if (n->backward_fn) n->backward_fn(*n);
}

}  // namespace fdct::nn
