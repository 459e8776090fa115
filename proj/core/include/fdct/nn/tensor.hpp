#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fdct::nn {

using Shape = std::vector<std::int64_t>;

std::int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);
// Row-major element strides.
std::vector<std::int64_t> shape_strides(const Shape& s);

struct Node;
using NodePtr = std::shared_ptr<Node>;

// One record in the dynamically built compute graph. backward_fn reads this
// node's grad and accumulates into the parents' grads; creation ids give the
// reverse-topological visit order.
struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    bool leaf = false;
    std::vector<NodePtr> parents;
    std::function<void(Node&)> backward_fn;
    std::uint64_t id = 0;

    void ensure_grad() {
        if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
};

// Value-semantic handle to a graph node. Dense row-major doubles; gradients
// are accumulated in 64-bit as well.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(NodePtr n) : node_(std::move(n)) {}

    static Tensor zeros(const Shape& s, bool requires_grad = false);
    static Tensor full(const Shape& s, double v);
    static Tensor from_data(const Shape& s, std::vector<double> data, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    int ndim() const { return static_cast<int>(node_->shape.size()); }
    std::int64_t dim(int i) const;
    std::int64_t numel() const { return static_cast<std::int64_t>(node_->value.size()); }
    bool requires_grad() const { return node_->requires_grad; }

    const std::vector<double>& data() const { return node_->value; }
    // Mutable access for leaves (parameter updates, input staging).
    std::vector<double>& raw() { return node_->value; }
    std::vector<double>& grad() {
        node_->ensure_grad();
        return node_->grad;
    }
    void zero_grad() {
        node_->ensure_grad();
        std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
    }
    double item() const;

    NodePtr node() const { return node_; }

private:
    NodePtr node_;
};

// Reverse-mode sweep from a scalar loss. Every reachable requires_grad node
// receives its gradient; leaves keep theirs afterwards.
void backward(const Tensor& loss);

// While alive, newly created ops record no graph (inference mode).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

bool grad_enabled();

// Internal: construct an op result node. parents/backward dropped when grad
// recording is off or no parent requires grad.
Tensor make_op(Shape shape, std::vector<double> value, std::vector<NodePtr> parents,
               std::function<void(Node&)> backward_fn);

}  // namespace fdct::nn
