// SPDX-License-Identifier: Apache-2.0
#include "risnet/network.hpp"

#include <cmath>

namespace risnet {

AssociationMatrix AssociationMatrix::from_indices(int ris_bs, const std::vector<int>& ue_bs,
                                                  int num_bs) {
    if (ris_bs < 0 || ris_bs >= num_bs)
        throw std::invalid_argument("association: ris_bs out of range");
    AssociationMatrix a;
    a.c0 = arma::uvec(num_bs, arma::fill::zeros);
    a.c0(ris_bs) = 1;
    a.c = arma::umat(num_bs, ue_bs.size(), arma::fill::zeros);
    for (std::size_t k = 0; k < ue_bs.size(); ++k) {
        if (ue_bs[k] < 0 || ue_bs[k] >= num_bs)
            throw std::invalid_argument("association: ue_bs out of range");
        a.c(ue_bs[k], k) = 1;
    }
    return a;
}

int AssociationMatrix::ris_bs() const {
    for (arma::uword j = 0; j < c0.n_elem; ++j)
        if (c0(j)) return static_cast<int>(j);
    throw std::logic_error("association: RIS attached to no BS");
}

int AssociationMatrix::serving_bs(int k) const {
    for (arma::uword j = 0; j < c.n_rows; ++j)
        if (c(j, k)) return static_cast<int>(j);
    throw std::logic_error("association: UE attached to no BS");
}

std::vector<int> AssociationMatrix::served_ues(int j) const {
    std::vector<int> out;
    for (arma::uword k = 0; k < c.n_cols; ++k)
        if (c(j, k)) out.push_back(static_cast<int>(k));
    return out;
}

arma::cx_rowvec equivalent_channel(const arma::cx_vec& h_d, const arma::cx_vec& h_r,
                                   const arma::cx_mat& g, const arma::cx_vec& psi_diag,
                                   bool ue_bit, bool ris_bit) {
    if (g.n_rows != h_r.n_elem || g.n_rows != psi_diag.n_elem || g.n_cols != h_d.n_elem)
        throw std::invalid_argument("equivalent_channel: dimension mismatch");
    if (!ue_bit) return arma::cx_rowvec(h_d.n_elem, arma::fill::zeros);
    arma::cx_rowvec h = h_d.t();  // h_d^H
    if (ris_bit) {
        // h_r^H Psi G with Psi = diag(psi_diag)
        arma::cx_rowvec scaled = (arma::conj(h_r) % psi_diag).st();
        h += arma::cx_rowvec(scaled * g);
    }
    return h;
}

namespace {

arma::cx_mat scale_to_power(const arma::cx_mat& w0, double total_power) {
    double norm = arma::norm(w0, "fro");
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw SingularMatrixError("zf_precoder: degenerate precoder norm");
    return std::sqrt(total_power) / norm * w0;
}

}  // namespace

arma::cx_mat zf_precoder(const arma::cx_mat& h, double total_power) {
    if (h.n_cols == 0) return arma::cx_mat(h.n_rows, 0);
    if (h.n_cols > h.n_rows)
        throw SingularMatrixError("zf_precoder: more users than antennas");
    arma::cx_mat gram = h.t() * h;
    if (arma::rcond(gram) < 1e-12)
        throw SingularMatrixError("zf_precoder: rank-deficient channel matrix");
    arma::cx_mat w0 = h * arma::inv(gram);
    return scale_to_power(w0, total_power);
}

arma::cx_mat zf_precoder_regularized(const arma::cx_mat& h, double total_power) {
    if (h.n_cols == 0) return arma::cx_mat(h.n_rows, 0);
    arma::cx_mat gram = h.t() * h;
    double eps = 1e-9 * std::abs(arma::trace(gram)) / static_cast<double>(h.n_cols);
    if (!(eps > 0.0)) eps = 1e-30;
    gram.diag() += eps;
    arma::cx_mat w0 = h * arma::inv(gram);
    return scale_to_power(w0, total_power);
}

arma::mat compute_sinr(const std::vector<std::vector<arma::cx_rowvec>>& equivalent,
                       const std::vector<arma::cx_mat>& precoders,
                       const std::vector<std::vector<int>>& served, double noise_power) {
    auto num_bs = equivalent.size();
    auto num_ue = num_bs ? equivalent[0].size() : 0;
    arma::mat sinr(num_bs, num_ue, arma::fill::zeros);
    for (std::size_t j = 0; j < num_bs; ++j) {
        const auto& users = served[j];
        for (std::size_t q = 0; q < users.size(); ++q) {
            int k = users[q];
            const arma::cx_rowvec& h = equivalent[j][k];
            double signal = 0.0, interference = 0.0;
            for (std::size_t i = 0; i < users.size(); ++i) {
                std::complex<double> rx = arma::as_scalar(h * precoders[j].col(i));
                double p = std::norm(rx);
                (i == q ? signal : interference) += p;
            }
            sinr(j, k) = signal / (interference + noise_power);
        }
    }
    return sinr;
}

std::pair<arma::vec, double> sum_rate(const arma::mat& sinr) {
    arma::vec rates(sinr.n_cols, arma::fill::zeros);
    for (arma::uword k = 0; k < sinr.n_cols; ++k)
        for (arma::uword j = 0; j < sinr.n_rows; ++j)
            rates(k) += std::log2(1.0 + sinr(j, k));
    return {rates, arma::accu(rates)};
}

ConstraintReport check_constraints(const AssociationMatrix& assoc, const LinkBudget& budget,
                                   double r_min) {
    ConstraintReport rep;
    for (arma::uword k = 0; k < budget.rates.n_elem; ++k)
        if (budget.rates(k) < r_min) rep.qos = false;
    for (const auto& w : budget.precoders) {
        double p = arma::norm(w, "fro");
        if (p * p > budget.power_budget + 1e-9) rep.power = false;
    }
    for (arma::uword k = 0; k < assoc.c.n_cols; ++k)
        if (arma::accu(assoc.c.col(k)) != 1) rep.ue_unique = false;
    for (arma::uword j = 0; j < assoc.c.n_rows; ++j)
        if (arma::accu(assoc.c.row(j)) < 1) rep.bs_loaded = false;
    if (arma::accu(assoc.c0) != 1) rep.ris_unique = false;
    return rep;
}

AssociationMatrix repair_association(const AssociationMatrix& assoc,
                                     const arma::mat& channel_norms) {
    auto num_bs = assoc.c.n_rows;
    auto num_ue = assoc.c.n_cols;
    if (num_ue < num_bs)
        throw InfeasibleAssociationError("repair_association: fewer UEs than BSs");
    AssociationMatrix out = assoc;
    for (arma::uword j = 0; j < num_bs; ++j) {
        if (arma::accu(out.c.row(j)) >= 1) continue;
        long best_k = -1;
        double best_norm = -1.0;
        for (arma::uword k = 0; k < num_ue; ++k) {
            arma::uword donor = out.serving_bs(static_cast<int>(k));
            if (arma::accu(out.c.row(donor)) < 2) continue;
            if (channel_norms(j, k) > best_norm) {
                best_norm = channel_norms(j, k);
                best_k = static_cast<long>(k);
            }
        }
        if (best_k < 0)
            throw InfeasibleAssociationError("repair_association: no movable UE");
        out.c.col(best_k).zeros();
        out.c(j, best_k) = 1;
    }
    return out;
}

LinkBudget build_link_budget(const ChannelSet& channels, const arma::cx_vec& psi_diag,
                             const AssociationMatrix& assoc, double power_budget_w,
                             double noise_w, bool use_ris) {
    auto num_bs = channels.bs_ris.size();
    auto num_ue = channels.ris_ue.size();
    LinkBudget budget;
    budget.noise_power = noise_w;
    budget.power_budget = power_budget_w;
    budget.equivalent.assign(num_bs, {});
    budget.precoders.resize(num_bs);
    budget.served.resize(num_bs);
    for (std::size_t j = 0; j < num_bs; ++j) {
        bool ris_bit = use_ris && assoc.c0(j) == 1;
        budget.equivalent[j].reserve(num_ue);
        for (std::size_t k = 0; k < num_ue; ++k) {
            bool ue_bit = assoc.c(j, k) == 1;
            budget.equivalent[j].push_back(
                equivalent_channel(channels.direct[j][k], channels.ris_ue[k],
                                   channels.bs_ris[j], psi_diag, ue_bit, ris_bit));
        }
        budget.served[j] = assoc.served_ues(static_cast<int>(j));
        arma::cx_mat h(channels.direct[j][0].n_elem, budget.served[j].size());
        for (std::size_t q = 0; q < budget.served[j].size(); ++q)
            h.col(q) = budget.equivalent[j][budget.served[j][q]].t();
        try {
            budget.precoders[j] = zf_precoder(h, power_budget_w);
        } catch (const SingularMatrixError&) {
            try {
                budget.precoders[j] = zf_precoder_regularized(h, power_budget_w);
            } catch (const SingularMatrixError&) {
                // all served channels vanish; transmitting nothing is optimal
                budget.precoders[j] = arma::cx_mat(h.n_rows, h.n_cols, arma::fill::zeros);
            }
        }
    }
    budget.sinr = compute_sinr(budget.equivalent, budget.precoders, budget.served, noise_w);
    std::tie(budget.rates, budget.sum_rate) = sum_rate(budget.sinr);
    return budget;
}

}  // namespace risnet
