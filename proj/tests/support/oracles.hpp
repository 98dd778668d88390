// Independent reference implementations used by unit and acceptance tests.
// Written straight from the formulas; no library SINR code is called here.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "aerocf/rate.hpp"
#include "aerocf/socp.hpp"

namespace oracle {

// Single-expression closed form, plain loops.
inline double sinr_direct(const aerocf::LinkBudget& b, const Eigen::MatrixXd& P, int k) {
    const int K = static_cast<int>(b.beta2.rows());
    const int M = static_cast<int>(b.beta2.cols());
    const double G = b.g_tx, N = b.n_rx, S = b.s_rx, Md = M;
    double coh = 0.0, inter = 0.0, fwd = 0.0, all = 0.0;
    for (int m = 0; m < M; ++m) {
        double Rm = 0.0;
        for (int j = 0; j < K; ++j) Rm += b.beta2(j, m) * b.user_power[j];
        all += Rm;
        coh += std::sqrt(b.gamma2[m]) * std::sqrt(P(k, m)) * std::sqrt(b.beta2(k, m));
        inter += b.rho2[m] * P(k, m) * Rm;
        fwd += b.rho2[m] * P(k, m) * b.sigma2;
    }
    const double num = Md * G * G * N * S * b.user_power[k] * coh * coh;
    const double den = Md * G * G * inter + Md * G * G * fwd + b.sigma2_haps * (all + Md * b.sigma2);
    return num / den;
}

struct SinrTerms {
    double f2, ds2, iu, in, ir, nh;
    double sinr() const { return ds2 / (iu + in + ir + nh); }
};

// Term-by-term appendix expressions with the printed normalization moment.
inline SinrTerms sinr_terms(const aerocf::LinkBudget& b, const Eigen::MatrixXd& P, int k) {
    const int K = static_cast<int>(b.beta2.rows());
    const int M = static_cast<int>(b.beta2.cols());
    const double G = b.g_tx, N = b.n_rx, S = b.s_rx, Md = M;
    std::vector<double> R(M, 0.0);
    double all = 0.0;
    for (int m = 0; m < M; ++m) {
        for (int j = 0; j < K; ++j) R[m] += b.beta2(j, m) * b.user_power[j];
        all += R[m];
    }
    SinrTerms t{};
    t.f2 = N / (Md * Md) * (all + Md * b.sigma2);
    double coh = 0.0, u = 0.0, n = 0.0, r = 0.0;
    for (int m = 0; m < M; ++m) {
        const double g2 = b.rho2[m] * b.tau[m];
        const double r2 = (1.0 - b.tau[m]) * b.rho2[m];
        coh += std::sqrt(g2) * std::sqrt(P(k, m)) * std::sqrt(b.beta2(k, m));
        u += g2 * P(k, m) * R[m];
        n += g2 * P(k, m) * b.sigma2;
        r += r2 * P(k, m) * (R[m] + b.sigma2);
    }
    const double ds = G * N * S * std::sqrt(b.user_power[k]) / std::sqrt(t.f2) * coh;
    t.ds2 = ds * ds;
    t.iu = N * S * G * G / t.f2 * u;
    t.in = N * S * G * G / t.f2 * n;
    t.ir = N * S * G * G / t.f2 * r;
    t.nh = Md * S * b.sigma2_haps;
    return t;
}

// Random link budget with gains spread over realistic orders of magnitude.
template <class Rng>
aerocf::LinkBudget random_budget(Rng& rng, int K, int M) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    aerocf::LinkBudget b;
    b.n_rx = 1 + static_cast<int>(u(rng) * 16);
    b.g_tx = 1 + static_cast<int>(u(rng) * 16);
    b.s_rx = 1 + static_cast<int>(u(rng) * 400);
    b.sigma2 = 4e-15 * (0.5 + u(rng));
    b.sigma2_haps = 4e-15 * (0.5 + u(rng));
    b.user_power = Eigen::VectorXd(K);
    b.beta2 = Eigen::MatrixXd(K, M);
    b.gamma2 = Eigen::VectorXd(M);
    b.rho2 = Eigen::VectorXd(M);
    b.tau = Eigen::VectorXd(M);
    for (int k = 0; k < K; ++k) b.user_power[k] = 0.05 + 0.3 * u(rng);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) b.beta2(k, m) = std::pow(10.0, -8.0 - 4.0 * u(rng));
    for (int m = 0; m < M; ++m) {
        b.rho2[m] = std::pow(10.0, -16.0 - 0.2 * u(rng));
        b.tau[m] = 0.5 + 0.5 * u(rng);
        b.gamma2[m] = b.rho2[m] * b.tau[m];
    }
    return b;
}

template <class Rng>
Eigen::MatrixXd random_powers(Rng& rng, int K, int M, double budget) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Eigen::MatrixXd P(K, M);
    for (int m = 0; m < M; ++m) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) s += (P(k, m) = u(rng));
        P.col(m) *= budget / s;
    }
    return P;
}

// Random SOCP whose optimum is certified by construction: pick x*, make a few
// cones active there, and set the objective to a nonnegative combination of the
// active constraint gradients (KKT). Inactive cones and a loose box are added.
struct KnownSocp {
    aerocf::ConeProgram p;
    Eigen::VectorXd x_star;
    double value = 0.0;
};

template <class Rng>
KnownSocp random_known_socp(Rng& rng, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    KnownSocp out{aerocf::ConeProgram(static_cast<std::size_t>(n)), Eigen::VectorXd(n), 0.0};
    for (int i = 0; i < n; ++i) out.x_star[i] = 2.0 * u(rng) - 1.0;
    const int active = std::max(1, n / 2) + 1;
    const int inactive = 2 + n / 3;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < active + inactive; ++i) {
        const int rows = 1 + static_cast<int>(u(rng) * 4);
        aerocf::SocConstraint c;
        c.A = Eigen::MatrixXd(rows, n);
        c.b = Eigen::VectorXd(rows);
        c.c = Eigen::VectorXd(n);
        for (int r = 0; r < rows; ++r) {
            c.b[r] = nd(rng);
            for (int j = 0; j < n; ++j) c.A(r, j) = nd(rng);
        }
        for (int j = 0; j < n; ++j) c.c[j] = 0.3 * nd(rng);
        const Eigen::VectorXd res = c.A * out.x_star + c.b;
        const double slack = i < active ? 0.0 : 0.5 + u(rng);
        c.d = res.norm() - c.c.dot(out.x_star) + slack;
        if (i < active) {
            const Eigen::VectorXd grad = c.A.transpose() * res / res.norm() - c.c;
            f += (0.2 + u(rng)) * grad;
        }
        out.p.soc.push_back(std::move(c));
    }
    out.p.objective = f;
    out.p.lo = Eigen::VectorXd::Constant(n, -10.0);
    out.p.hi = Eigen::VectorXd::Constant(n, 10.0);
    out.value = f.dot(out.x_star);
    return out;
}

// Maximizes a linear objective over a 2-D program by refining a grid around the
// best feasible point; exhaustive on the first pass.
inline double grid_max_2d(const aerocf::ConeProgram& p) {
    auto feasible = [&](double x, double y) {
        Eigen::Vector2d v(x, y);
        for (const auto& c : p.soc)
            if ((c.A * v + c.b).norm() > c.c.dot(v) + c.d) return false;
        for (const auto& l : p.linear)
            if (l.g.dot(v) > l.h) return false;
        return true;
    };
    double cx = 0.5 * (p.lo[0] + p.hi[0]), cy = 0.5 * (p.lo[1] + p.hi[1]);
    double hx = 0.5 * (p.hi[0] - p.lo[0]), hy = 0.5 * (p.hi[1] - p.lo[1]);
    double best = -INFINITY;
    const int g = 400;
    for (int pass = 0; pass < 12; ++pass) {
        double bx = cx, by = cy;
        for (int i = 0; i <= g; ++i) {
            for (int j = 0; j <= g; ++j) {
                const double x = std::clamp(cx - hx + 2.0 * hx * i / g, p.lo[0], p.hi[0]);
                const double y = std::clamp(cy - hy + 2.0 * hy * j / g, p.lo[1], p.hi[1]);
                const double v = p.objective[0] * x + p.objective[1] * y;
                if (v > best && feasible(x, y)) {
                    best = v;
                    bx = x;
                    by = y;
                }
            }
        }
        cx = bx;
        cy = by;
        hx *= 0.1;
        hy *= 0.1;
    }
    return best;
}

// Brute-force transceiver chain for one trial set, written without any of the
// library's precomputation: per-antenna UxNB processing, explicit per-element
// HAPS signal with independent noise per element, then combining.
struct ChainInput {
    int K, M, N, G, S;
    std::vector<std::vector<Eigen::VectorXcd>> a;  // [k][m] access steering (N)
    std::vector<Eigen::VectorXcd> bvec;            // [m] UxNB tx steering (G)
    std::vector<Eigen::VectorXcd> cvec;            // [m] HAPS rx steering (S)
    Eigen::MatrixXd beta2, P;                      // K x M
    std::vector<double> pk, gamma, rho_re;         // rho_re = rho sqrt(1 - tau)
    double sigma2, sigma2_h;
};

struct ChainEstimate {
    std::vector<double> sinr;
};

template <class Rng>
ChainEstimate brute_force_chain(const ChainInput& in, int trials, Rng& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    auto cn = [&](double var) { return std::sqrt(var) * std::complex<double>(nd(rng), nd(rng)); };
    const std::complex<double> J(0.0, 1.0);
    std::vector<std::complex<double>> ys(in.K, 0.0);
    std::vector<double> yy(in.K, 0.0);
    for (int t = 0; t < trials; ++t) {
        std::vector<std::complex<double>> s(in.K);
        for (int k = 0; k < in.K; ++k) s[k] = std::exp(J * ph(rng));
        // UxNB outputs y_km
        Eigen::MatrixXcd y(in.K, in.M);
        for (int m = 0; m < in.M; ++m) {
            Eigen::VectorXcd rx = Eigen::VectorXcd::Zero(in.N);
            for (int k = 0; k < in.K; ++k) rx += std::sqrt(in.beta2(k, m) * in.pk[k]) * s[k] * in.a[k][m];
            for (int n = 0; n < in.N; ++n) rx[n] += cn(in.sigma2);
            for (int k = 0; k < in.K; ++k) {
                std::complex<double> comb = 0.0;
                for (int n = 0; n < in.N; ++n) {
                    const auto h = std::sqrt(in.beta2(k, m)) * in.a[k][m][n];
                    comb += rx[n] * std::conj(h) / std::abs(h);
                }
                y(k, m) = std::sqrt(in.P(k, m)) * comb / std::abs(comb);
            }
        }
        std::vector<double> omega(in.M);
        for (int m = 0; m < in.M; ++m) omega[m] = ph(rng);
        for (int k = 0; k < in.K; ++k) {
            // Per-element HAPS signal on resource block k.
            Eigen::VectorXcd hs = Eigen::VectorXcd::Zero(in.S);
            for (int m = 0; m < in.M; ++m) {
                // Transmit beam is the conjugate of b_m; the channel is b_m.
                std::complex<double> bb = 0.0;
                for (int g = 0; g < in.G; ++g) bb += std::conj(in.bvec[m][g]) * in.bvec[m][g];
                const auto amp = bb * (in.gamma[m] + in.rho_re[m] * std::exp(J * omega[m])) * y(k, m);
                hs += amp * in.cvec[m];
            }
            for (int e = 0; e < in.S; ++e) hs[e] += cn(in.sigma2_h);
            std::complex<double> out = 0.0;
            for (int m = 0; m < in.M; ++m) out += in.cvec[m].dot(hs);
            ys[k] += out * std::conj(s[k]);
            yy[k] += std::norm(out);
        }
    }
    ChainEstimate e;
    for (int k = 0; k < in.K; ++k) {
        const double a2 = std::norm(ys[k] / static_cast<double>(trials));
        const double tot = yy[k] / trials;
        e.sinr.push_back(a2 / (tot - a2));
    }
    return e;
}

}  // namespace oracle
