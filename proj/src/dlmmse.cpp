// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/dlmmse.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace chanest {

int NeighborhoodMap::position(int node, int global) const
{
    const auto& idx = composite.at(node);
    auto it = std::find(idx.begin(), idx.end(), global);
    return it == idx.end() ? -1 : static_cast<int>(it - idx.begin());
}

NeighborhoodMap build_neighborhoods(const ArrayGeometry& geom)
{
    geom.validate();
    int count = geom.antenna_count();
    NeighborhoodMap map;
    map.neighbors.resize(count);
    map.composite.resize(count);
    for (int r = 0; r < count; ++r) {
        int m = geom.row_of(r);
        int g = geom.col_of(r);
        auto& out = map.neighbors[r];
        if (g > 0)
            out.push_back(r - geom.m_rows);
        if (g < geom.g_cols - 1)
            out.push_back(r + geom.m_rows);
        if (m > 0)
            out.push_back(r - 1);
        if (m < geom.m_rows - 1)
            out.push_back(r + 1);
        map.composite[r].push_back(r);
        map.composite[r].insert(map.composite[r].end(), out.begin(), out.end());
    }
    return map;
}

int NodeState::position(int global) const
{
    auto it = std::find(block_index.begin(), block_index.end(), global);
    return it == block_index.end() ? -1 : static_cast<int>(it - block_index.begin());
}

std::size_t PartialMessage::complex_values() const
{
    std::size_t n = 0;
    for (const auto& b : blocks)
        n += static_cast<std::size_t>(b.second.size());
    return n;
}

NodeState local_estimation_from_statistic(const cvec& s_c, const cmat& gram, const cmat& r_hc,
                                          std::vector<int> block_index)
{
    Eigen::Index l = s_c.size();
    Eigen::Index n = static_cast<Eigen::Index>(block_index.size());
    if (n < 1 || r_hc.rows() != n * l || r_hc.cols() != n * l || gram.rows() != l || gram.cols() != l)
        throw std::invalid_argument("local_estimation_step: dimension mismatch");
    NodeState st;
    st.r_hc = r_hc;
    st.p_mat = hermitian_inverse(r_hc);
    st.p_mat.topLeftCorner(l, l) += gram;
    st.p_mat = hermitian_part(st.p_mat);
    st.h_w = cvec::Zero(n * l);
    st.h_w.head(l) = s_c;
    st.block_index = std::move(block_index);
    return st;
}

NodeState local_estimation_step(const cvec& y_c, const cmat& a_p, const cmat& r_hc, double noise_var,
                                std::vector<int> block_index)
{
    if (!(noise_var > 0.0))
        throw std::invalid_argument("local_estimation_step: noise variance must be positive");
    if (y_c.size() != a_p.rows())
        throw std::invalid_argument("local_estimation_step: observation length mismatch");
    return local_estimation_from_statistic(a_p.adjoint() * y_c / noise_var, a_p.adjoint() * a_p / noise_var,
                                           r_hc, std::move(block_index));
}

cmat mask_blocks(const cmat& m, int taps, const std::vector<int>& shared, double fill)
{
    Eigen::Index l = taps;
    Eigen::Index n = m.rows() / l;
    cmat out = m;
    auto is_shared = [&](Eigen::Index i) {
        return std::find(shared.begin(), shared.end(), static_cast<int>(i)) != shared.end();
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (is_shared(i) && is_shared(j))
                continue;
            out.block(i * l, j * l, l, l).setZero();
            if (i == j)
                out.block(i * l, i * l, l, l).diagonal().setConstant(fill);
        }
    return out;
}

PartialMatrices make_partial_matrices(const NodeState& sender, const std::vector<int>& receiver_index,
                                      int receiver, double a_weight)
{
    if (!(a_weight > 0.0 && a_weight < 1.0))
        throw std::invalid_argument("make_partial_matrices: a_weight must lie in (0, 1)");
    int l = sender.taps();
    int self = sender.block_index.at(0);
    int ps_self = 0;
    int ps_recv = sender.position(receiver);
    auto find = [&](int global) {
        auto it = std::find(receiver_index.begin(), receiver_index.end(), global);
        return it == receiver_index.end() ? -1 : static_cast<int>(it - receiver_index.begin());
    };
    int pr_self = find(self);
    int pr_recv = find(receiver);
    if (ps_recv < 0 || pr_self < 0 || pr_recv < 0)
        throw std::invalid_argument("make_partial_matrices: sender and receiver are not neighbors");
    Eigen::Index n = static_cast<Eigen::Index>(receiver_index.size()) * l;
    PartialMatrices out{cmat::Zero(n, n), cmat::Zero(n, n)};
    const int src[2] = {ps_self, ps_recv};
    const int dst[2] = {pr_self, pr_recv};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            out.p.block(dst[a] * l, dst[b] * l, l, l) = sender.p_mat.block(src[a] * l, src[b] * l, l, l);
            out.r.block(dst[a] * l, dst[b] * l, l, l) = sender.r_hc.block(src[a] * l, src[b] * l, l, l);
        }
    std::vector<int> shared = {pr_self, pr_recv};
    out.p = mask_blocks(out.p, l, shared, a_weight);
    out.r = mask_blocks(out.r, l, shared, 1.0);
    return out;
}

PartialMessage make_message(const NodeState& sender, int receiver)
{
    int l = sender.taps();
    int pos = sender.position(receiver);
    if (pos < 0)
        throw std::invalid_argument("make_message: receiver is not a neighbor");
    PartialMessage msg;
    msg.sender = sender.block_index.at(0);
    msg.receiver = receiver;
    msg.iteration = sender.iteration + 1;
    msg.blocks.emplace_back(msg.sender, sender.h_w.segment(0, l));
    msg.blocks.emplace_back(receiver, sender.h_w.segment(pos * l, l));
    return msg;
}

NodeState update_step(const NodeState& node, std::vector<PartialMessage> messages,
                      std::vector<PartialMatrices> partials)
{
    if (messages.size() != partials.size())
        throw std::invalid_argument("update_step: one partial matrix pair per message required");
    if (messages.empty())
        return node;
    std::vector<std::size_t> order(messages.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return messages[a].sender < messages[b].sender;
    });
    NodeState out = node;
    int l = node.taps();
    Eigen::Index n = node.p_mat.rows();
    for (std::size_t i : order) {
        const PartialMessage& msg = messages[i];
        const PartialMatrices& pm = partials[i];
        if (msg.receiver >= 0 && msg.receiver != node.block_index.at(0))
            throw std::invalid_argument("update_step: message addressed to another antenna");
        if (pm.p.rows() != n || pm.r.rows() != n)
            throw std::invalid_argument("update_step: partial matrices do not match the composite size");
        for (const auto& [global, value] : msg.blocks) {
            int pos = node.position(global);
            if (pos < 0 || value.size() != l)
                throw std::invalid_argument("update_step: message block is not aligned with the composite");
            out.h_w.segment(pos * l, l) += value;
        }
        out.p_mat += pm.p - hermitian_inverse(pm.r);
    }
    out.p_mat = hermitian_part(out.p_mat);
    out.iteration = node.iteration + 1;
    return out;
}

cvec center_estimate(const NodeState& node)
{
    int l = node.taps();
    return hermitian_solve(node.p_mat, node.h_w).topRows(l);
}

namespace {

// Linear map from the statistics of a sorted antenna subset to some vector.
struct SupportMap {
    std::vector<int> ants;
    cmat m;
};

std::vector<int> union_sorted(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

cmat expand_columns(const SupportMap& map, const std::vector<int>& ants, Eigen::Index l)
{
    cmat out = cmat::Zero(map.m.rows(), static_cast<Eigen::Index>(ants.size()) * l);
    std::size_t j = 0;
    for (std::size_t i = 0; i < map.ants.size(); ++i) {
        while (ants[j] != map.ants[i])
            ++j;
        out.middleCols(static_cast<Eigen::Index>(j) * l, l) = map.m.middleCols(static_cast<Eigen::Index>(i) * l, l);
    }
    return out;
}

cmat gather_blocks(const cmat& m, const std::vector<int>& rows, const std::vector<int>& cols, Eigen::Index l)
{
    cmat out(static_cast<Eigen::Index>(rows.size()) * l, static_cast<Eigen::Index>(cols.size()) * l);
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            out.block(static_cast<Eigen::Index>(a) * l, static_cast<Eigen::Index>(b) * l, l, l)
                = m.block(rows[a] * l, cols[b] * l, l, l);
    return out;
}

void scatter_add(cmat& m, const cmat& add, const std::vector<int>& pos, Eigen::Index l)
{
    for (std::size_t a = 0; a < pos.size(); ++a)
        for (std::size_t b = 0; b < pos.size(); ++b)
            m.block(pos[a] * l, pos[b] * l, l, l)
                += add.block(static_cast<Eigen::Index>(a) * l, static_cast<Eigen::Index>(b) * l, l, l);
}

} // namespace

DlmmsePlan::DlmmsePlan(const ArrayGeometry& geom, const ChannelStats& stats, std::vector<cmat> grams,
                       DlmmseOptions options)
    : r_array_(stats.r_array())
    , r_tap_(stats.r_tap())
    , grams_(std::move(grams))
    , opt_(options)
    , nb_(build_neighborhoods(geom))
    , taps_(stats.taps())
{
    if (geom.antenna_count() != stats.antennas())
        throw std::invalid_argument("DlmmsePlan: geometry and statistics disagree on the antenna count");
    if (static_cast<int>(grams_.size()) != stats.antennas())
        throw std::invalid_argument("DlmmsePlan: one gram matrix per antenna required");
    for (const cmat& g : grams_)
        if (g.rows() != taps_ || g.cols() != taps_)
            throw std::invalid_argument("DlmmsePlan: gram matrix has the wrong size");
    if (opt_.iterations < 0)
        throw std::invalid_argument("DlmmsePlan: iteration count must be non-negative");
    if (opt_.rule == FusionRule::Paper && !(opt_.a_weight > 0.0 && opt_.a_weight < 1.0))
        throw std::invalid_argument("DlmmsePlan: a_weight must lie in (0, 1)");
    build_rounds();
    if (opt_.output == OutputRule::Fused || opt_.track_maps)
        build_maps();
}

void DlmmsePlan::build_rounds()
{
    int nodes = nb_.nodes();
    Eigen::Index l = taps_;
    int d = opt_.iterations;
    p_.assign(d + 1, std::vector<cmat>(nodes));
    edges_.assign(d, {});
    inbox_.assign(nodes, {});
    std::vector<cmat> priors(nodes);
    min_eig_ = std::numeric_limits<double>::infinity();
    for (int c = 0; c < nodes; ++c) {
        priors[c] = hermitian_part(kron(gather_blocks(r_array_, nb_.composite[c], nb_.composite[c], 1), r_tap_));
        cmat p = hermitian_inverse(priors[c]);
        p.topLeftCorner(l, l) += grams_[c];
        p_[0][c] = hermitian_part(p);
    }

    // Edge order: receivers ascending, senders ascending within a receiver.
    std::vector<std::pair<int, int>> order;
    for (int c = 0; c < nodes; ++c) {
        std::vector<int> senders = nb_.neighbors[c];
        std::sort(senders.begin(), senders.end());
        for (int j : senders)
            order.emplace_back(j, c);
    }
    auto edge_of = [&](int sender, int receiver) {
        auto it = std::find(order.begin(), order.end(), std::make_pair(sender, receiver));
        return static_cast<int>(it - order.begin());
    };
    for (std::size_t e = 0; e < order.size(); ++e)
        inbox_[order[e].second].push_back(static_cast<int>(e));

    for (int t = 1; t <= d; ++t) {
        auto& round = edges_[t - 1];
        round.reserve(order.size());
        for (int c = 0; c < nodes; ++c)
            p_[t][c] = p_[t - 1][c];
        for (const auto& [j, c] : order) {
            Edge e;
            e.sender = j;
            e.receiver = c;
            e.shared_sender = {0, nb_.position(j, c)};
            e.shared_receiver = {nb_.position(c, j), 0};
            e.echo_positions = {nb_.position(j, c), 0};
            const cmat& pj = p_[t - 1][j];
            if (opt_.rule == FusionRule::Marginal) {
                cmat reduced = pj;
                if (t >= 2) {
                    e.echo_edge = edge_of(c, j);
                    scatter_add(reduced, -edges_[t - 2][e.echo_edge].delta_info, e.echo_positions, l);
                }
                cmat cov = hermitian_inverse(reduced);
                cmat cov_s = gather_blocks(cov, e.shared_sender, e.shared_sender, l);
                cmat info_s = hermitian_inverse(cov_s);
                cmat prior_s = gather_blocks(priors[j], e.shared_sender, e.shared_sender, l);
                e.delta_info = hermitian_part(info_s - hermitian_inverse(prior_s));
                cmat rows(2 * l, cov.cols());
                rows.topRows(l) = cov.middleRows(e.shared_sender[0] * l, l);
                rows.bottomRows(l) = cov.middleRows(e.shared_sender[1] * l, l);
                e.gather = info_s * rows;
                scatter_add(p_[t][c], e.delta_info, e.shared_receiver, l);
            } else {
                NodeState sender;
                sender.p_mat = pj;
                sender.r_hc = priors[j];
                sender.block_index = nb_.composite[j];
                sender.h_w = cvec::Zero(pj.rows());
                PartialMatrices pm = make_partial_matrices(sender, nb_.composite[c], c, opt_.a_weight);
                e.full_update = pm.p - hermitian_inverse(pm.r);
                e.gather = cmat::Zero(2 * l, pj.cols());
                e.gather.block(0, e.shared_sender[0] * l, l, l).setIdentity();
                e.gather.block(l, e.shared_sender[1] * l, l, l).setIdentity();
                p_[t][c] += e.full_update;
            }
            round.push_back(std::move(e));
        }
        for (int c = 0; c < nodes; ++c)
            p_[t][c] = hermitian_part(p_[t][c]);
    }
    for (int t = 0; t <= d; ++t)
        for (int c = 0; c < nodes; ++c)
            min_eig_ = std::min(min_eig_, min_eigenvalue(p_[t][c]));

    local_out_.assign(d + 1, std::vector<cmat>(nodes));
    for (int t = 0; t <= d; ++t) {
        if (t != d && !opt_.trace_iterations && !opt_.track_maps)
            continue;
        for (int c = 0; c < nodes; ++c) {
            cmat sel = cmat::Zero(p_[t][c].rows(), l);
            sel.topRows(l).setIdentity();
            // LU rather than Cholesky: the Paper rule can leave P indefinite.
            local_out_[t][c] = Eigen::PartialPivLU<cmat>(p_[t][c]).solve(sel).adjoint();
        }
    }
}

void DlmmsePlan::build_maps()
{
    int nodes = nb_.nodes();
    Eigen::Index l = taps_;
    int d = opt_.iterations;

    std::vector<SupportMap> hw(nodes);
    std::vector<std::vector<SupportMap>> history(nodes);
    for (int c = 0; c < nodes; ++c) {
        hw[c].ants = {c};
        hw[c].m = cmat::Zero(static_cast<Eigen::Index>(nb_.composite[c].size()) * l, l);
        hw[c].m.topRows(l).setIdentity();
        history[c].push_back({{c}, cmat::Identity(l, l)});
    }

    auto cov_s = [&](const std::vector<int>& ants) {
        Eigen::Index n = static_cast<Eigen::Index>(ants.size());
        cmat out(n * l, n * l);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) {
                cmat blk = grams_[ants[a]] * (r_array_(ants[a], ants[b]) * r_tap_) * grams_[ants[b]];
                if (a == b)
                    blk += grams_[ants[a]];
                out.block(a * l, b * l, l, l) = blk;
            }
        return out;
    };
    auto cov_hs = [&](int c, const std::vector<int>& ants) {
        Eigen::Index n = static_cast<Eigen::Index>(ants.size());
        cmat out(l, n * l);
        for (Eigen::Index b = 0; b < n; ++b)
            out.middleCols(b * l, l) = r_array_(c, ants[b]) * r_tap_ * grams_[ants[b]];
        return out;
    };

    fused_w_.assign(d + 1, std::vector<cmat>(nodes));
    fused_cov_.assign(d + 1, std::vector<cmat>(nodes));
    mse_.assign(d + 1, std::vector<double>(nodes, 0.0));
    designed_.assign(d + 1, false);

    auto design = [&](int t) {
        designed_[t] = true;
        for (int c = 0; c < nodes; ++c) {
            cmat r_cc = r_array_(c, c) * r_tap_;
            if (opt_.output == OutputRule::Fused) {
                std::vector<int> ants;
                for (const auto& h : history[c])
                    ants = union_sorted(ants, h.ants);
                Eigen::Index rows = 0;
                for (const auto& h : history[c])
                    rows += h.m.rows();
                cmat z(rows, static_cast<Eigen::Index>(ants.size()) * l);
                Eigen::Index at = 0;
                for (const auto& h : history[c]) {
                    z.middleRows(at, h.m.rows()) = expand_columns(h, ants, l);
                    at += h.m.rows();
                }
                cmat czz = hermitian_part(z * cov_s(ants) * z.adjoint());
                cmat chz = cov_hs(c, ants) * z.adjoint();
                cmat w = chz * hermitian_pinv(czz);
                fused_w_[t][c] = w;
                fused_cov_[t][c] = hermitian_part(r_cc - w * chz.adjoint());
                mse_[t][c] = fused_cov_[t][c].trace().real();
            } else {
                cmat w_map = local_out_[t][c] * hw[c].m;
                cmat czz = w_map * cov_s(hw[c].ants) * w_map.adjoint();
                cmat chz = cov_hs(c, hw[c].ants) * w_map.adjoint();
                cmat err = r_cc - chz - chz.adjoint() + czz;
                mse_[t][c] = err.trace().real();
            }
        }
    };

    if (d == 0 || opt_.trace_iterations || opt_.track_maps)
        design(0);
    std::vector<SupportMap> prev_msgs;
    for (int t = 1; t <= d; ++t) {
        const auto& round = edges_[t - 1];
        std::vector<SupportMap> msgs(round.size());
        for (std::size_t ei = 0; ei < round.size(); ++ei) {
            const Edge& e = round[ei];
            SupportMap v = hw[e.sender];
            if (e.echo_edge >= 0) {
                const SupportMap& echo = prev_msgs[e.echo_edge];
                std::vector<int> ants = union_sorted(v.ants, echo.ants);
                cmat m = expand_columns(v, ants, l);
                cmat em = expand_columns(echo, ants, l);
                for (int b = 0; b < 2; ++b)
                    m.middleRows(e.echo_positions[b] * l, l) -= em.middleRows(b * l, l);
                v = {ants, m};
            }
            msgs[ei] = {v.ants, e.gather * v.m};
        }
        std::vector<SupportMap> next = hw;
        for (int c = 0; c < nodes; ++c) {
            std::vector<int> ants = next[c].ants;
            for (int ei : inbox_[c])
                ants = union_sorted(ants, msgs[ei].ants);
            cmat m = expand_columns(next[c], ants, l);
            for (int ei : inbox_[c]) {
                const Edge& e = round[ei];
                cmat add = expand_columns(msgs[ei], ants, l);
                for (int b = 0; b < 2; ++b)
                    m.middleRows(e.shared_receiver[b] * l, l) += add.middleRows(b * l, l);
                history[c].push_back(msgs[ei]);
            }
            next[c] = {ants, m};
        }
        hw = std::move(next);
        prev_msgs = std::move(msgs);
        if (t == d || opt_.trace_iterations || opt_.track_maps)
            design(t);
    }
}

double DlmmsePlan::design_mse(int t) const
{
    if (mse_.empty())
        throw std::logic_error("DlmmsePlan: linear maps were not tracked");
    if (t < 0 || t > opt_.iterations)
        throw std::out_of_range("DlmmsePlan: round out of range");
    if (!designed_[t])
        throw std::logic_error("DlmmsePlan: round not designed; enable trace_iterations");
    double total = 0.0;
    for (double v : mse_[t])
        total += v;
    return total;
}

DlmmseResult DlmmsePlan::run(const std::vector<cvec>& statistics) const
{
    int nodes = nb_.nodes();
    Eigen::Index l = taps_;
    int d = opt_.iterations;
    if (static_cast<int>(statistics.size()) != nodes)
        throw std::invalid_argument("DlmmsePlan::run: one statistic per antenna required");

    std::vector<cvec> hw(nodes);
    std::vector<std::vector<cvec>> history(nodes);
    for (int c = 0; c < nodes; ++c) {
        if (statistics[c].size() != l)
            throw std::invalid_argument("DlmmsePlan::run: statistic has the wrong length");
        hw[c] = cvec::Zero(static_cast<Eigen::Index>(nb_.composite[c].size()) * l);
        hw[c].head(l) = statistics[c];
        if (opt_.output == OutputRule::Fused)
            history[c].push_back(statistics[c]);
    }

    DlmmseResult res;
    auto emit = [&](int t) {
        cvec h(static_cast<Eigen::Index>(nodes) * l);
        for (int c = 0; c < nodes; ++c) {
            if (opt_.output == OutputRule::Local) {
                h.segment(c * l, l) = local_out_[t][c] * hw[c];
            } else {
                cvec z(fused_w_[t][c].cols());
                Eigen::Index at = 0;
                for (const cvec& part : history[c]) {
                    if (at >= z.size())
                        break;
                    z.segment(at, part.size()) = part;
                    at += part.size();
                }
                h.segment(c * l, l) = fused_w_[t][c] * z;
            }
        }
        return h;
    };
    if (opt_.trace_iterations)
        res.per_iteration.push_back(emit(0));

    std::vector<cvec> prev_msgs;
    res.min_message_values = d > 0 ? std::numeric_limits<std::size_t>::max() : 0;
    for (int t = 1; t <= d; ++t) {
        const auto& round = edges_[t - 1];
        std::vector<cvec> msgs(round.size());
        std::vector<std::size_t> sent(nodes, 0);
        std::size_t values = 0;
        for (std::size_t ei = 0; ei < round.size(); ++ei) {
            const Edge& e = round[ei];
            cvec v = hw[e.sender];
            if (e.echo_edge >= 0) {
                const cvec& echo = prev_msgs[e.echo_edge];
                for (int b = 0; b < 2; ++b)
                    v.segment(e.echo_positions[b] * l, l) -= echo.segment(b * l, l);
            }
            msgs[ei] = e.gather * v;
            PartialMessage pm;
            pm.sender = e.sender;
            pm.receiver = e.receiver;
            pm.iteration = t;
            pm.blocks.emplace_back(e.sender, msgs[ei].head(l));
            pm.blocks.emplace_back(e.receiver, msgs[ei].tail(l));
            std::size_t n = pm.complex_values();
            values += n;
            res.max_message_values = std::max(res.max_message_values, n);
            res.min_message_values = std::min(res.min_message_values, n);
            ++sent[e.sender];
        }
        for (int c = 0; c < nodes; ++c)
            for (int ei : inbox_[c]) {
                const Edge& e = round[ei];
                for (int b = 0; b < 2; ++b)
                    hw[c].segment(e.shared_receiver[b] * l, l) += msgs[ei].segment(b * l, l);
                if (opt_.output == OutputRule::Fused)
                    history[c].push_back(msgs[ei]);
            }
        res.messages_per_round.push_back(round.size());
        res.values_per_round.push_back(values);
        res.sent_per_node.push_back(std::move(sent));
        prev_msgs = std::move(msgs);
        if (opt_.trace_iterations)
            res.per_iteration.push_back(emit(t));
    }
    res.h_hat = opt_.trace_iterations ? res.per_iteration.back() : emit(d);
    res.center_cov.resize(nodes);
    for (int c = 0; c < nodes; ++c) {
        if (opt_.output == OutputRule::Fused)
            res.center_cov[c] = fused_cov_[d][c];
        else
            res.center_cov[c] = hermitian_part(local_out_[d][c].leftCols(l));
    }
    return res;
}

DlmmseResult run_dlmmse(const cvec& y_all, const cmat& a_p, const ArrayGeometry& geom,
                        const ChannelStats& stats, double noise_var, const DlmmseOptions& options)
{
    if (!(noise_var > 0.0))
        throw std::invalid_argument("run_dlmmse: noise variance must be positive");
    Eigen::Index k = a_p.rows();
    int r = stats.antennas();
    if (y_all.size() != k * r)
        throw std::invalid_argument("run_dlmmse: observation length mismatch");
    cmat gram = a_p.adjoint() * a_p / noise_var;
    std::vector<cvec> s(r);
    for (int i = 0; i < r; ++i)
        s[i] = a_p.adjoint() * y_all.segment(i * k, k) / noise_var;
    DlmmsePlan plan(geom, stats, std::vector<cmat>(r, gram), options);
    return plan.run(s);
}

int max_iterations_bound(int r)
{
    if (r < 1)
        throw std::invalid_argument("max_iterations_bound: need R >= 1");
    int d = 0;
    while (2 * (d + 1) * (d + 2) + 1 <= r)
        ++d;
    return d;
}

double predicted_mse_per_iteration(const ChannelStats& stats, const ArrayGeometry& geom, double rho, int k,
                                   int iteration, int antenna)
{
    const rvec& deltas = stats.eigenvalues_tap();
    if (iteration == 0) {
        double sum = 0.0;
        for (double d : deltas)
            sum += d / (1.0 + rho * k * d);
        return sum;
    }
    if (iteration != 1)
        throw std::invalid_argument("predicted_mse_per_iteration: only iterations 0 and 1 have a closed form");
    NeighborhoodMap nb = build_neighborhoods(geom);
    const auto& idx = nb.composite.at(antenna);
    rvec etas = eigenvalues_descending(gather_blocks(stats.r_array(), idx, idx, 1));
    double sum = 0.0;
    for (double e : etas)
        for (double d : deltas) {
            double lam = std::max(e * d, 0.0);
            sum += lam / (1.0 + rho * k * lam);
        }
    return sum / static_cast<double>(idx.size());
}

} // namespace chanest
