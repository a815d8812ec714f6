// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/estimators.hpp"

#include <stdexcept>

namespace chanest {

EstimateWithCovariance EstimateWithCovariance::to_weighted() const
{
    if (weighted)
        return *this;
    EstimateWithCovariance out;
    out.err_cov = hermitian_inverse(err_cov);
    out.h_hat = out.err_cov * h_hat;
    out.weighted = true;
    return out;
}

EstimateWithCovariance EstimateWithCovariance::to_plain() const
{
    if (!weighted)
        return *this;
    EstimateWithCovariance out;
    out.err_cov = hermitian_inverse(err_cov);
    out.h_hat = out.err_cov * h_hat;
    out.weighted = false;
    return out;
}

namespace {

bool well_conditioned_pd(const cmat& a, Eigen::LLT<cmat>& llt)
{
    llt.compute(hermitian_part(a));
    if (llt.info() != Eigen::Success)
        return false;
    auto d = llt.matrixLLT().diagonal().real();
    double lo = d.minCoeff();
    double hi = d.maxCoeff();
    return lo > 0.0 && (lo / hi) * (lo / hi) > 1.0 / kConditionLimit;
}

void check_blocks(const cvec& y_all, const cmat& a_p)
{
    if (a_p.rows() == 0 || y_all.size() % a_p.rows() != 0)
        throw std::invalid_argument("observation length is not a multiple of the pilot count");
}

} // namespace

cvec ls_estimate(const cvec& y, const cmat& a_p)
{
    if (a_p.rows() < a_p.cols())
        throw std::invalid_argument("ls_estimate: fewer pilots than taps");
    if (y.size() != a_p.rows())
        throw std::invalid_argument("ls_estimate: observation length mismatch");
    Eigen::LLT<cmat> llt;
    if (!well_conditioned_pd(a_p.adjoint() * a_p, llt))
        throw std::invalid_argument("ls_estimate: observation matrix is rank deficient");
    return llt.solve(a_p.adjoint() * y);
}

cvec cls_estimate(const cvec& y_all, const cmat& a_p)
{
    check_blocks(y_all, a_p);
    Eigen::Index k = a_p.rows();
    Eigen::Index l = a_p.cols();
    Eigen::Index r = y_all.size() / k;
    cvec out(r * l);
    for (Eigen::Index i = 0; i < r; ++i)
        out.segment(i * l, l) = ls_estimate(y_all.segment(i * k, k), a_p);
    return out;
}

EstimateWithCovariance llmmse_estimate(const cvec& y, const cmat& a_p, const cmat& r_tap,
                                       double noise_var, double interference_var)
{
    if (y.size() != a_p.rows() || r_tap.rows() != a_p.cols())
        throw std::invalid_argument("llmmse_estimate: dimension mismatch");
    if (!(noise_var > 0.0) || interference_var < 0.0)
        throw std::invalid_argument("llmmse_estimate: noise variance must be positive");
    EstimateWithCovariance out;
    if (interference_var == 0.0) {
        Eigen::LLT<cmat> llt;
        if (!well_conditioned_pd(r_tap, llt))
            throw std::invalid_argument("llmmse_estimate: tap correlation is singular");
        cmat info = llt.solve(cmat::Identity(r_tap.rows(), r_tap.cols()));
        info += a_p.adjoint() * a_p / noise_var;
        out.err_cov = hermitian_inverse(info);
        out.h_hat = out.err_cov * (a_p.adjoint() * y / noise_var);
        return out;
    }
    cmat ra = r_tap * a_p.adjoint();
    cmat cov_y = (1.0 + interference_var) * a_p * ra;
    cov_y.diagonal().array() += noise_var;
    cmat gain = hermitian_solve(cov_y, ra.adjoint()).adjoint();
    out.h_hat = gain * y;
    out.err_cov = hermitian_part(r_tap - gain * ra.adjoint());
    return out;
}

cvec llmmse_estimate_all(const cvec& y_all, const cmat& a_p, const cmat& r_tap,
                         double noise_var, double interference_var)
{
    check_blocks(y_all, a_p);
    Eigen::Index k = a_p.rows();
    Eigen::Index l = a_p.cols();
    Eigen::Index r = y_all.size() / k;
    // Same gain for every antenna; build it once.
    cmat gain;
    if (interference_var == 0.0) {
        Eigen::LLT<cmat> llt;
        if (!well_conditioned_pd(r_tap, llt))
            throw std::invalid_argument("llmmse_estimate: tap correlation is singular");
        cmat info = llt.solve(cmat::Identity(l, l)) + a_p.adjoint() * a_p / noise_var;
        gain = hermitian_solve(info, a_p.adjoint() / noise_var);
    } else {
        cmat ra = r_tap * a_p.adjoint();
        cmat cov_y = (1.0 + interference_var) * a_p * ra;
        cov_y.diagonal().array() += noise_var;
        gain = hermitian_solve(cov_y, ra.adjoint()).adjoint();
    }
    cvec out(r * l);
    for (Eigen::Index i = 0; i < r; ++i)
        out.segment(i * l, l) = gain * y_all.segment(i * k, k);
    return out;
}

double gram_scale(const cmat& a_p, double tol)
{
    cmat g = a_p.adjoint() * a_p;
    double c = g.diagonal().real().mean();
    if (!(c > 0.0))
        return -1.0;
    cmat dev = g - c * cmat::Identity(g.rows(), g.cols());
    return dev.cwiseAbs().maxCoeff() <= tol * c ? c : -1.0;
}

namespace {

EstimateWithCovariance olmmse_eigen(const cvec& y_all, const cmat& a_p, const ChannelStats& stats,
                                    double noise_var, double interference_var, double c, bool with_cov)
{
    Eigen::Index k = a_p.rows();
    Eigen::Index l = stats.taps();
    Eigen::Index r = stats.antennas();
    cmat s(l, r);
    for (Eigen::Index i = 0; i < r; ++i)
        s.col(i) = a_p.adjoint() * y_all.segment(i * k, k);
    const cmat& v = stats.eigenvectors_array();
    const cmat& q = stats.eigenvectors_tap();
    cmat rotated = q.adjoint() * s * v.conjugate();
    Eigen::MatrixXd err(l, r);
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index i = 0; i < l; ++i) {
            double lam = std::max(stats.eigenvalues_array()(j) * stats.eigenvalues_tap()(i), 0.0);
            double denom = noise_var + c * lam * (1.0 + interference_var);
            double gain = denom > 0.0 ? lam / denom : 0.0;
            rotated(i, j) *= gain;
            err(i, j) = denom > 0.0 ? lam * (noise_var + c * lam * interference_var) / denom : 0.0;
        }
    cmat h = q * rotated * v.transpose();
    EstimateWithCovariance out;
    out.h_hat = Eigen::Map<cvec>(h.data(), h.size());
    if (with_cov) {
        if (stats.dim() > ChannelStats::kMaterializationCap)
            throw std::length_error("olmmse_estimate: covariance exceeds materialization cap");
        cmat basis = kron(v, q);
        rvec e = Eigen::Map<rvec>(err.data(), err.size());
        out.err_cov = hermitian_part(basis * e.asDiagonal() * basis.adjoint());
    }
    return out;
}

EstimateWithCovariance olmmse_dense(const cvec& y_all, const cmat& a_p, const ChannelStats& stats,
                                    double noise_var, double interference_var, bool with_cov)
{
    Eigen::Index k = a_p.rows();
    Eigen::Index l = stats.taps();
    Eigen::Index r = stats.antennas();
    cmat rh = stats.composite();
    EstimateWithCovariance out;
    if (interference_var == 0.0) {
        // (R_h^-1 + B)^-1 = (I + R_h B)^-1 R_h, never forming R_h^-1.
        cmat gram = a_p.adjoint() * a_p / noise_var;
        cvec s(r * l);
        for (Eigen::Index i = 0; i < r; ++i)
            s.segment(i * l, l) = a_p.adjoint() * y_all.segment(i * k, k) / noise_var;
        cmat m = cmat::Identity(r * l, r * l);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < r; ++j)
                m.block(i * l, j * l, l, l) += rh.block(i * l, j * l, l, l) * gram;
        Eigen::PartialPivLU<cmat> lu(m);
        out.h_hat = lu.solve(rh * s);
        if (with_cov)
            out.err_cov = hermitian_part(lu.solve(rh));
        return out;
    }
    cmat ara(r * k, r * k);
    cmat rat = stats.r_tap() * a_p.adjoint();
    cmat core = a_p * rat;
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            ara.block(i * k, j * k, k, k) = stats.r_array()(i, j) * core;
    cmat cov_y = (1.0 + interference_var) * ara;
    cov_y.diagonal().array() += noise_var;
    // cross = R_h A'^H, blockwise r_array(i,j) R_tap A^H
    cmat cross(r * l, r * k);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            cross.block(i * l, j * k, l, k) = stats.r_array()(i, j) * rat;
    Eigen::LLT<cmat> llt(hermitian_part(cov_y));
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("olmmse_estimate: observation covariance is not positive definite");
    out.h_hat = cross * llt.solve(y_all);
    if (with_cov)
        out.err_cov = hermitian_part(rh - cross * llt.solve(cross.adjoint()));
    return out;
}

} // namespace

EstimateWithCovariance olmmse_estimate(const cvec& y_all, const cmat& a_p, const ChannelStats& stats,
                                       double noise_var, double interference_var, OlmmseRoute route,
                                       bool with_covariance)
{
    check_blocks(y_all, a_p);
    if (a_p.cols() != stats.taps() || y_all.size() / a_p.rows() != stats.antennas())
        throw std::invalid_argument("olmmse_estimate: dimension mismatch");
    if (!(noise_var > 0.0) || interference_var < 0.0)
        throw std::invalid_argument("olmmse_estimate: noise variance must be positive");
    double c = gram_scale(a_p);
    if (route == OlmmseRoute::Eigen && c < 0.0)
        throw std::invalid_argument("olmmse_estimate: eigen route needs A^H A = c I");
    if (route == OlmmseRoute::Eigen || (route == OlmmseRoute::Auto && c > 0.0))
        return olmmse_eigen(y_all, a_p, stats, noise_var, interference_var, c, with_covariance);
    if (stats.dim() > ChannelStats::kMaterializationCap)
        throw std::length_error("olmmse_estimate: R * L exceeds materialization cap");
    return olmmse_dense(y_all, a_p, stats, noise_var, interference_var, with_covariance);
}

double mse_ls_awgn(int r, int l, double rho, int k)
{
    if (r < 1 || l < 1 || k < 1 || !(rho > 0.0))
        throw std::invalid_argument("mse_ls_awgn: arguments must be positive");
    return static_cast<double>(r) * l / (rho * k);
}

double mse_llmmse_awgn(int r, const rvec& deltas, double rho, int k)
{
    double sum = 0.0;
    for (double d : deltas)
        sum += d / (1.0 + rho * k * d);
    return r * sum;
}

double mse_olmmse_awgn(const rvec& etas, const rvec& deltas, double rho, int k)
{
    double sum = 0.0;
    for (double e : etas)
        for (double d : deltas) {
            double lam = std::max(e * d, 0.0);
            sum += lam / (1.0 + rho * k * lam);
        }
    return sum;
}

} // namespace chanest
