// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <vector>

#include <armadillo>

#include "risnet/channel.hpp"
#include "risnet/ris.hpp"

namespace risnet {

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleAssociationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// BS assignment of the RIS (c0) and of every UE (one column per UE, exactly
/// one nonzero each).
struct AssociationMatrix {
    arma::uvec c0;  // length J
    arma::umat c;   // J x K

    static AssociationMatrix from_indices(int ris_bs, const std::vector<int>& ue_bs,
                                          int num_bs);
    int ris_bs() const;         // owning BS of the RIS
    int serving_bs(int k) const;
    std::vector<int> served_ues(int j) const;
};

/// Everything downstream of a (channels, RIS state, association) triple.
struct LinkBudget {
    std::vector<std::vector<arma::cx_rowvec>> equivalent;  // [j][k], length N
    std::vector<arma::cx_mat> precoders;                   // [j], N x |Q_j|
    std::vector<std::vector<int>> served;                  // [j], column order of precoders
    arma::mat sinr;   // J x K
    arma::vec rates;  // K
    double sum_rate = 0.0;
    double noise_power = 0.0;
    double power_budget = 0.0;  // per-BS P_j, watts
};

/// c_jk * (h_d^H + c_j0 * h_r^H * Psi * G); psi_diag is the diagonal of Psi.
arma::cx_rowvec equivalent_channel(const arma::cx_vec& h_d, const arma::cx_vec& h_r,
                                   const arma::cx_mat& g, const arma::cx_vec& psi_diag,
                                   bool ue_bit, bool ris_bit);

/// Zero-forcing precoder for stacked conjugated user channels (columns of H).
/// W = sqrt(P) * W0 / ||W0||_F with W0 = H (H^H H)^{-1}; throws
/// SingularMatrixError when H^H H is numerically singular.
arma::cx_mat zf_precoder(const arma::cx_mat& h, double total_power);

/// Tikhonov-regularized variant used as the fallback for rank-deficient H:
/// (H^H H + eps I)^{-1} with eps = 1e-9 * trace(H^H H)/Q.
arma::cx_mat zf_precoder_regularized(const arma::cx_mat& h, double total_power);

/// gamma_{j,k} = |h~ w_k|^2 / (sum_{i != k in Q_j} |h~ w_i|^2 + sigma^2) for the
/// serving BS, zero elsewhere.
arma::mat compute_sinr(const std::vector<std::vector<arma::cx_rowvec>>& equivalent,
                       const std::vector<arma::cx_mat>& precoders,
                       const std::vector<std::vector<int>>& served, double noise_power);

/// Per-UE rates R_k = sum_j log2(1 + gamma_{j,k}) and their sum.
std::pair<arma::vec, double> sum_rate(const arma::mat& sinr);

struct ConstraintReport {
    bool qos = true;           // R_k >= r_min for every UE
    bool power = true;         // per-BS Frobenius power within budget
    bool ue_unique = true;     // one BS per UE
    bool bs_loaded = true;     // every BS serves at least one UE
    bool ris_unique = true;    // RIS attached to exactly one BS
    bool all_hard() const { return power && ue_unique && ris_unique; }
};

/// Never throws; reports each constraint separately.
ConstraintReport check_constraints(const AssociationMatrix& assoc, const LinkBudget& budget,
                                   double r_min);

/// Moves UEs onto idle BSs (ascending BS index), taking from donors serving at
/// least two UEs the UE with the largest channel norm toward the idle BS.
/// channel_norms is J x K. Throws InfeasibleAssociationError when K < J.
AssociationMatrix repair_association(const AssociationMatrix& assoc,
                                     const arma::mat& channel_norms);

/// Full pipeline: equivalent channels -> per-BS ZF -> SINR -> rates.
LinkBudget build_link_budget(const ChannelSet& channels, const arma::cx_vec& psi_diag,
                             const AssociationMatrix& assoc, double power_budget_w,
                             double noise_w, bool use_ris = true);

}  // namespace risnet
