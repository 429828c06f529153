// SPDX-License-Identifier: Apache-2.0
#include "risnet/net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace risnet {

DenseNet DenseNet::make(const std::vector<int>& sizes, std::mt19937_64& rng) {
    if (sizes.size() < 2)
        throw std::invalid_argument("DenseNet: need at least input and output layers");
    DenseNet net;
    net.layer_sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        if (sizes[l] < 1 || sizes[l + 1] < 1)
            throw std::invalid_argument("DenseNet: layer sizes must be positive");
        double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        arma::mat w(sizes[l + 1], sizes[l]);
        for (auto& x : w) x = u(rng);
        arma::vec b(sizes[l + 1]);
        for (auto& x : b) x = u(rng);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

DenseNet DenseNet::zeros(const std::vector<int>& sizes) {
    std::mt19937_64 rng(0);
    DenseNet net = make(sizes, rng);
    for (auto& w : net.weights) w.zeros();
    for (auto& b : net.biases) b.zeros();
    return net;
}

std::size_t DenseNet::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].n_elem + biases[l].n_elem;
    return n;
}

arma::vec forward(const DenseNet& net, const arma::vec& x) {
    if (static_cast<int>(x.n_elem) != net.input_dim())
        throw std::invalid_argument("forward: input dimension mismatch");
    arma::vec a = x;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        a = net.weights[l] * a + net.biases[l];
        if (l + 1 < net.weights.size()) a = arma::clamp(a, 0.0, arma::datum::inf);
    }
    return a;
}

ForwardCache forward_cached(const DenseNet& net, const arma::vec& x) {
    if (static_cast<int>(x.n_elem) != net.input_dim())
        throw std::invalid_argument("forward: input dimension mismatch");
    ForwardCache cache;
    cache.activations.reserve(net.weights.size() + 1);
    cache.pre.reserve(net.weights.size());
    cache.activations.push_back(x);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        arma::vec z = net.weights[l] * cache.activations.back() + net.biases[l];
        cache.pre.push_back(z);
        if (l + 1 < net.weights.size())
            cache.activations.push_back(arma::clamp(z, 0.0, arma::datum::inf));
        else
            cache.activations.push_back(z);
    }
    return cache;
}

NetGradients NetGradients::zeros_like(const DenseNet& net) {
    NetGradients g;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.emplace_back(net.weights[l].n_rows, net.weights[l].n_cols,
                               arma::fill::zeros);
        g.biases.emplace_back(net.biases[l].n_elem, arma::fill::zeros);
    }
    return g;
}

void NetGradients::add(const NetGradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += other.weights[l];
        biases[l] += other.biases[l];
    }
}

void NetGradients::scale(double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] *= s;
        biases[l] *= s;
    }
}

void backward_accumulate(const DenseNet& net, const ForwardCache& cache,
                         const arma::vec& output_gradient, NetGradients& into,
                         arma::vec* input_gradient) {
    auto layers = net.weights.size();
    arma::vec delta = output_gradient;
    for (std::size_t l = layers; l-- > 0;) {
        if (l + 1 < layers) delta %= arma::conv_to<arma::vec>::from(cache.pre[l] > 0.0);
        into.weights[l] += delta * cache.activations[l].t();
        into.biases[l] += delta;
        if (l > 0 || input_gradient) delta = net.weights[l].t() * delta;
    }
    if (input_gradient) *input_gradient = delta;
}

NetGradients backward(const DenseNet& net, const ForwardCache& cache,
                      const arma::vec& output_gradient, arma::vec* input_gradient) {
    NetGradients g = NetGradients::zeros_like(net);
    backward_accumulate(net, cache, output_gradient, g, input_gradient);
    return g;
}

AdamState AdamState::make(const DenseNet& net, double learning_rate) {
    AdamState st;
    st.learning_rate = learning_rate;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        st.m_w.emplace_back(arma::size(net.weights[l]), arma::fill::zeros);
        st.v_w.emplace_back(arma::size(net.weights[l]), arma::fill::zeros);
        st.m_b.emplace_back(net.biases[l].n_elem, arma::fill::zeros);
        st.v_b.emplace_back(net.biases[l].n_elem, arma::fill::zeros);
    }
    return st;
}

namespace {

template <typename T>
void adam_update(T& param, T& m, T& v, const T& g, const AdamState& st, double bc1,
                 double bc2) {
    m = st.beta1 * m + (1.0 - st.beta1) * g;
    v = st.beta2 * v + (1.0 - st.beta2) * (g % g);
    param -= st.learning_rate * (m / bc1) / (arma::sqrt(v / bc2) + st.epsilon);
}

}  // namespace

void adam_step(AdamState& state, DenseNet& net, const NetGradients& grads) {
    ++state.step;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_update(net.weights[l], state.m_w[l], state.v_w[l], grads.weights[l], state,
                    bc1, bc2);
        adam_update(net.biases[l], state.m_b[l], state.v_b[l], grads.biases[l], state, bc1,
                    bc2);
    }
}

double adam_step_scalar(ScalarAdam& state, double param, double grad) {
    ++state.step;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad;
    double m_hat = state.m / (1.0 - std::pow(state.beta1, static_cast<double>(state.step)));
    double v_hat = state.v / (1.0 - std::pow(state.beta2, static_cast<double>(state.step)));
    return param - state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
}

void soft_update(DenseNet& target, const DenseNet& online, double tau) {
    if (target.layer_sizes != online.layer_sizes)
        throw std::invalid_argument("soft_update: shape mismatch");
    for (std::size_t l = 0; l < target.weights.size(); ++l) {
        target.weights[l] = tau * online.weights[l] + (1.0 - tau) * target.weights[l];
        target.biases[l] = tau * online.biases[l] + (1.0 - tau) * target.biases[l];
    }
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw std::runtime_error("checkpoint: truncated u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_f64_le(std::ostream& out, double v) {
    write_u64_le(out, std::bit_cast<std::uint64_t>(v));
}

double read_f64_le(std::istream& in) { return std::bit_cast<double>(read_u64_le(in)); }

void serialize_net(const DenseNet& net, std::ostream& out) {
    write_u64_le(out, net.layer_sizes.size());
    for (int s : net.layer_sizes) write_u64_le(out, static_cast<std::uint64_t>(s));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        // row-major weights, then biases
        for (arma::uword r = 0; r < net.weights[l].n_rows; ++r)
            for (arma::uword c = 0; c < net.weights[l].n_cols; ++c)
                write_f64_le(out, net.weights[l](r, c));
        for (double b : net.biases[l]) write_f64_le(out, b);
    }
    if (!out) throw std::runtime_error("checkpoint: write failure");
}

DenseNet deserialize_net(std::istream& in) {
    auto count = read_u64_le(in);
    if (count < 2 || count > 64) throw std::runtime_error("checkpoint: bad layer count");
    std::vector<int> sizes(count);
    for (auto& s : sizes) {
        auto v = read_u64_le(in);
        if (v < 1 || v > (1u << 20)) throw std::runtime_error("checkpoint: bad layer size");
        s = static_cast<int>(v);
    }
    DenseNet net = DenseNet::zeros(sizes);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (arma::uword r = 0; r < net.weights[l].n_rows; ++r)
            for (arma::uword c = 0; c < net.weights[l].n_cols; ++c)
                net.weights[l](r, c) = read_f64_le(in);
        for (arma::uword i = 0; i < net.biases[l].n_elem; ++i)
            net.biases[l](i) = read_f64_le(in);
    }
    return net;
}

}  // namespace risnet
