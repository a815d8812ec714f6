// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include "chanest/correlation.hpp"
#include "chanest/linalg.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace chanest {

// Direct grid neighbors. For antenna r = m + M g: left r - M, right r + M,
// up r - 1, down r + 1. composite[r] is [r, then existing neighbors in that order].
struct NeighborhoodMap {
    std::vector<std::vector<int>> neighbors;
    std::vector<std::vector<int>> composite;

    int nodes() const { return static_cast<int>(neighbors.size()); }
    // Local block position of antenna `global` in node's composite, or -1.
    int position(int node, int global) const;
};

NeighborhoodMap build_neighborhoods(const ArrayGeometry& geom);

struct NodeState {
    cvec h_w;                  // weighted composite estimate
    cmat p_mat;                // inverse error covariance of the composite
    cmat r_hc;                 // prior correlation of the composite
    std::vector<int> block_index;
    int iteration = 0;

    int blocks() const { return static_cast<int>(block_index.size()); }
    int taps() const { return static_cast<int>(h_w.size()) / blocks(); }
    int position(int global) const;
};

// A message sent by one antenna to one neighbor: exactly two L-blocks keyed by
// global antenna index, the sender's and the receiver's.
struct PartialMessage {
    int sender = -1;
    int receiver = -1;
    int iteration = 0;
    std::vector<std::pair<int, cvec>> blocks;

    std::size_t complex_values() const;
};

// Partial information and prior matrices in the receiver's composite ordering.
struct PartialMatrices {
    cmat p;
    cmat r;
};

NodeState local_estimation_step(const cvec& y_c, const cmat& a_p, const cmat& r_hc, double noise_var,
                                std::vector<int> block_index);

// Same step from a sufficient statistic s = A^H R_w^-1 y and gram = A^H R_w^-1 A.
NodeState local_estimation_from_statistic(const cvec& s_c, const cmat& gram, const cmat& r_hc,
                                          std::vector<int> block_index);

// Sender's two shared blocks (own, receiver) of P and R_h^c placed in the
// receiver's composite ordering. Unshared diagonal blocks get a_weight * I in
// p and I in r; all cross terms of unshared blocks are zero.
PartialMatrices make_partial_matrices(const NodeState& sender, const std::vector<int>& receiver_index,
                                      int receiver, double a_weight);

// Zeroes every block outside `shared` positions and writes fill * I on the
// unshared diagonal blocks. Idempotent.
cmat mask_blocks(const cmat& m, int taps, const std::vector<int>& shared, double fill);

// Raw weighted blocks (own, receiver) of the sender's h_w.
PartialMessage make_message(const NodeState& sender, int receiver);

// h_w += sum of embedded messages; p += sum (P_j - inv(R_j)). Messages are
// applied in ascending sender order so delivery order does not matter.
NodeState update_step(const NodeState& node, std::vector<PartialMessage> messages,
                      std::vector<PartialMatrices> partials);

// Center block of (P^c)^-1 h_w.
cvec center_estimate(const NodeState& node);

enum class FusionRule {
    Paper,    // raw weighted blocks with sub-block partial matrices
    Marginal  // extrinsic marginal information over the two shared blocks
};

enum class OutputRule {
    Local, // center block of (P^c)^-1 h_w
    Fused  // LMMSE combination of the node's message history
};

struct DlmmseOptions {
    int iterations = 3;
    double a_weight = 1e-6;
    FusionRule rule = FusionRule::Marginal;
    OutputRule output = OutputRule::Fused;
    // Keep estimates after every round in DlmmseResult::per_iteration.
    bool trace_iterations = false;
    // Track the linear maps from the statistics to every message even when
    // the output rule does not need them (enables design_mse for Local).
    bool track_maps = false;
};

struct DlmmseResult {
    cvec h_hat;                            // RL composite, antenna r at [rL, rL+L)
    std::vector<cmat> center_cov;          // per-antenna error covariance used by the output rule
    std::vector<cvec> per_iteration;       // h_hat after 0..D rounds when traced
    std::vector<std::size_t> messages_per_round;
    std::vector<std::size_t> values_per_round;
    std::vector<std::vector<std::size_t>> sent_per_node; // [round][antenna]
    std::size_t max_message_values = 0;
    std::size_t min_message_values = 0;
};

// Data-independent part of the distributed estimator: information matrices of
// every round, message operators and (for OutputRule::Fused) combiner weights.
// grams[r] = A_r^H R_w^-1 A_r of antenna r.
class DlmmsePlan {
public:
    DlmmsePlan(const ArrayGeometry& geom, const ChannelStats& stats, std::vector<cmat> grams,
               DlmmseOptions options);

    // statistics[r] = A_r^H R_w^-1 y_r (length L).
    DlmmseResult run(const std::vector<cvec>& statistics) const;

    const NeighborhoodMap& neighborhoods() const { return nb_; }
    const DlmmseOptions& options() const { return opt_; }

    // Information matrix of node c after round t (0 <= t <= iterations).
    const cmat& information(int t, int c) const { return p_[t][c]; }

    // Exact MSE (sum over antennas) of the output after round t, computed from
    // the statistics alone; needs maps.
    double design_mse(int t) const;
    double design_mse() const { return design_mse(opt_.iterations); }
    bool has_maps() const { return !mse_.empty(); }
    double min_information_eigenvalue() const { return min_eig_; }

private:
    struct Edge {
        int sender;
        int receiver;
        cmat gather;                     // 2L x n_sender L
        std::vector<int> shared_sender;  // sender positions of [sender, receiver]
        std::vector<int> shared_receiver;// receiver positions of [sender, receiver]
        std::vector<int> echo_positions; // sender positions of [receiver, sender]
        int echo_edge = -1;              // edge index of receiver -> sender in the previous round
        cmat delta_info;                 // information added at the receiver, order [sender, receiver]
        cmat full_update;                // Paper rule: P_j - inv(R_j) in receiver ordering
    };

    void build_rounds();
    void build_maps();

    cmat r_array_;
    cmat r_tap_;
    std::vector<cmat> grams_;
    DlmmseOptions opt_;
    NeighborhoodMap nb_;
    int taps_;
    std::vector<std::vector<cmat>> p_;       // [round][node]
    std::vector<std::vector<Edge>> edges_;   // [round-1][edge]
    std::vector<std::vector<int>> inbox_;    // per node, edge indices sorted by sender
    std::vector<std::vector<cmat>> local_out_;  // [round][node] L x nL rows of P^-1
    std::vector<std::vector<cmat>> fused_w_;    // [round][node] L x dim(z)
    std::vector<std::vector<cmat>> fused_cov_;  // [round][node]
    std::vector<std::vector<double>> mse_;      // [round][node]
    std::vector<bool> designed_;
    double min_eig_ = 0.0;
};

// Convenience wrapper for pilot observations shared by every antenna.
// y_all holds R blocks of K pilot observations.
DlmmseResult run_dlmmse(const cvec& y_all, const cmat& a_p, const ArrayGeometry& geom,
                        const ChannelStats& stats, double noise_var, const DlmmseOptions& options = {});

// Largest D with 2D(D+1)+1 <= R.
int max_iterations_bound(int r);

// Closed-form per-antenna prediction: iteration 0 is the localized LMMSE
// error; iteration 1 averages the first-tier spatial eigenvalues of `antenna`.
double predicted_mse_per_iteration(const ChannelStats& stats, const ArrayGeometry& geom, double rho, int k,
                                   int iteration, int antenna);

} // namespace chanest
