// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include <armadillo>

namespace risnet {

/// Fully connected net, ReLU on hidden layers, identity output, 64-bit floats.
struct DenseNet {
    std::vector<int> layer_sizes;    // [input, hidden..., output]
    std::vector<arma::mat> weights;  // [l]: layer_sizes[l+1] x layer_sizes[l]
    std::vector<arma::vec> biases;

    /// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
    static DenseNet make(const std::vector<int>& sizes, std::mt19937_64& rng);
    static DenseNet zeros(const std::vector<int>& sizes);

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    std::size_t parameter_count() const;
};

struct ForwardCache {
    std::vector<arma::vec> activations;  // [0] = input, [L] = output
    std::vector<arma::vec> pre;          // pre-activation per layer
    const arma::vec& output() const { return activations.back(); }
};

arma::vec forward(const DenseNet& net, const arma::vec& x);
ForwardCache forward_cached(const DenseNet& net, const arma::vec& x);

struct NetGradients {
    std::vector<arma::mat> weights;
    std::vector<arma::vec> biases;

    static NetGradients zeros_like(const DenseNet& net);
    void add(const NetGradients& other);
    void scale(double s);
};

/// Reverse accumulation from an output-space gradient. When input_gradient is
/// non-null it also receives dL/dx (used to push critic signal into the actor).
NetGradients backward(const DenseNet& net, const ForwardCache& cache,
                      const arma::vec& output_gradient,
                      arma::vec* input_gradient = nullptr);
void backward_accumulate(const DenseNet& net, const ForwardCache& cache,
                         const arma::vec& output_gradient, NetGradients& into,
                         arma::vec* input_gradient = nullptr);

struct AdamState {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<arma::mat> m_w, v_w;
    std::vector<arma::vec> m_b, v_b;

    static AdamState make(const DenseNet& net, double learning_rate);
};

/// Standard bias-corrected Adam update in place.
void adam_step(AdamState& state, DenseNet& net, const NetGradients& grads);

struct ScalarAdam {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    double m = 0.0, v = 0.0;
};

double adam_step_scalar(ScalarAdam& state, double param, double grad);

/// target <- tau * online + (1 - tau) * target, element-wise.
void soft_update(DenseNet& target, const DenseNet& online, double tau);

// Flat little-endian f64 arrays behind a length-prefixed layer-shape header.
void serialize_net(const DenseNet& net, std::ostream& out);
DenseNet deserialize_net(std::istream& in);

void write_u64_le(std::ostream& out, std::uint64_t v);
std::uint64_t read_u64_le(std::istream& in);
void write_f64_le(std::ostream& out, double v);
double read_f64_le(std::istream& in);

}  // namespace risnet
