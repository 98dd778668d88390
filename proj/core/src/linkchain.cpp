#include "aerocf/linkchain.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "aerocf/error.hpp"
#include "aerocf/random.hpp"
#include "json.hpp"

namespace aerocf {

using cd = std::complex<double>;

void McOptions::validate() const {
    if (trials < 1000) throw ConfigError("mc.trials", "at least 1000 trials are required");
    if (batches < 2 || batches > trials) throw ConfigError("mc.batches", "must be in [2, trials]");
    if (workers < 1) throw ConfigError("mc.workers", "must be >= 1");
}

namespace {

// Per-user sums over one batch of trials.
struct Accum {
    cd ys{0.0, 0.0};
    double yy = 0.0;
    double du = 0.0;  // |desired + other users|^2
    double nn = 0.0;
    double rr = 0.0;
    double hh = 0.0;
};

struct Batch {
    std::vector<Accum> user;   // K
    Eigen::MatrixXd comb2;     // K x M, sum |y^COMB|^2
    std::size_t used = 0;
    std::size_t discarded = 0;
};

struct Chain {
    const NetworkScenario& s;
    const LinkGains& gains;
    const PowerAllocation& alloc;
    const McOptions& opts;
    std::size_t K, M;
    int N;
    std::vector<AccessGain> access;          // k * M + m
    std::vector<ComplexVector> steer;        // k * M + m
    std::vector<cd> direct;                  // per m, full HAPS-side coefficient of the direct path
    std::vector<double> reemit_amp;          // per m, magnitude of the re-emitted path coefficient
    std::vector<cd> reemit_base;             // per m, coefficient without exp(j omega)
    double haps_noise_var = 0.0;             // per user RB, after combining
    std::vector<double> sqrt_pk;

    Chain(const NetworkScenario& sc, const LinkGains& g, const PowerAllocation& a, const McOptions& o)
        : s(sc), gains(g), alloc(a), opts(o), K(sc.num_users()), M(sc.num_uxnbs()), N(sc.radio.n_rx()) {
        access.resize(K * M);
        steer.resize(K * M);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t m = 0; m < M; ++m) {
                const auto geom = access_geometry(s, k, m);
                AccessGain ag;
                ag.beta2 = gains.beta2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
                ag.p_los = gains.p_los(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
                ag.eta = gains.eta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
                access[k * M + m] = ag;
                steer[k * M + m] = steering_access(geom, s.radio);
            }
        }
        // HAPS side: every UxNB beams with b*_m, the HAPS combines RB k with
        // sum_m c*_m on each element.
        std::vector<ComplexVector> c(M);
        std::vector<cd> tx_gain(M);
        for (std::size_t m = 0; m < M; ++m) {
            const auto bg = backhaul_geometry(s, m);
            c[m] = steering_backhaul_rx(bg, s.radio);
            const ComplexVector b = steering_backhaul_tx(bg, s.radio);
            tx_gain[m] = (b.conjugate().array() * b.array()).sum();
        }
        const int S = s.radio.s_rx();
        ComplexVector w = ComplexVector::Zero(S);
        for (std::size_t m = 0; m < M; ++m) w += c[m].conjugate();
        haps_noise_var = s.radio.sigma2_haps_w * w.squaredNorm();
        direct.resize(M);
        reemit_base.resize(M);
        reemit_amp.resize(M);
        for (std::size_t m = 0; m < M; ++m) {
            const cd array = (w.array() * c[m].array()).sum();
            const auto& bh = gains.backhaul[m];
            direct[m] = tx_gain[m] * array * std::sqrt(bh.gamma2);
            reemit_amp[m] = std::sqrt(std::max(0.0, 1.0 - bh.tau)) * std::sqrt(bh.rho2);
            reemit_base[m] = tx_gain[m] * array * reemit_amp[m];
        }
        sqrt_pk.resize(K);
        for (std::size_t k = 0; k < K; ++k) sqrt_pk[k] = std::sqrt(s.user_power_w[k]);
    }

    cd draw_symbol(std::mt19937_64& eng) const {
        if (opts.symbols == SymbolModel::gaussian) return complex_normal(eng);
        return std::polar(1.0, uniform_phase(eng));
    }

    void run_batch(std::size_t first, std::size_t last, Batch& out) const {
        out.user.assign(K, Accum{});
        out.comb2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(M));

        std::vector<cd> sym(K);
        std::vector<ComplexVector> h(K);
        ComplexVector z(N), mf(N);
        // Per (k, m) pieces of the normalized UxNB output, split by origin.
        std::vector<cd> y_self(K * M), y_users(K * M), y_noise(K * M), y_all(K * M);
        Eigen::MatrixXd comb2_trial(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(M));
        std::vector<cd> phase(M);

        for (std::size_t t = first; t < last; ++t) {
            auto sym_eng = make_engine(opts.seed, {stream_tag::symbols, t});
            for (auto& v : sym) v = draw_symbol(sym_eng);
            auto ph_eng = make_engine(opts.seed, {stream_tag::reemission_phase, t});
            for (auto& p : phase) p = std::polar(1.0, uniform_phase(ph_eng));

            bool discard = false;
            for (std::size_t m = 0; m < M && !discard; ++m) {
                auto z_eng = make_engine(opts.seed, {stream_tag::uxnb_noise, t, m});
                for (int n = 0; n < N; ++n) z[n] = complex_normal(z_eng, s.radio.sigma2_uxnb_w);
                for (std::size_t k = 0; k < K; ++k) {
                    auto h_eng = make_engine(opts.seed, {stream_tag::access_channel, t, k, m});
                    h[k] = sample_access_channel(access[k * M + m], steer[k * M + m], h_eng);
                }
                for (std::size_t k = 0; k < K; ++k) {
                    const auto idx = k * M + m;
                    const double pkm = alloc.p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
                    for (int n = 0; n < N; ++n) {
                        const double mag = std::abs(h[k][n]);
                        mf[n] = mag > 0.0 ? std::conj(h[k][n]) / mag : cd{0.0, 0.0};
                    }
                    cd self{0.0, 0.0}, users{0.0, 0.0};
                    for (std::size_t j = 0; j < K; ++j) {
                        const cd part = (mf.array() * h[j].array()).sum() * sqrt_pk[j] * sym[j];
                        if (j == k) self = part;
                        else users += part;
                    }
                    const cd noise = (mf.array() * z.array()).sum();
                    const cd comb = self + users + noise;
                    const double mag = std::abs(comb);
                    comb2_trial(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = mag * mag;
                    if (pkm == 0.0) {
                        y_self[idx] = y_users[idx] = y_noise[idx] = y_all[idx] = 0.0;
                        continue;
                    }
                    if (mag == 0.0) {
                        discard = true;
                        break;
                    }
                    const double g = std::sqrt(pkm) / mag;
                    y_self[idx] = g * self;
                    y_users[idx] = g * users;
                    y_noise[idx] = g * noise;
                    y_all[idx] = g * comb;
                }
            }
            if (discard) {
                ++out.discarded;
                continue;
            }
            ++out.used;
            out.comb2 += comb2_trial;

            for (std::size_t k = 0; k < K; ++k) {
                cd d{0.0, 0.0}, u{0.0, 0.0}, nz{0.0, 0.0}, r{0.0, 0.0};
                for (std::size_t m = 0; m < M; ++m) {
                    const auto idx = k * M + m;
                    d += direct[m] * y_self[idx];
                    u += direct[m] * y_users[idx];
                    nz += direct[m] * y_noise[idx];
                    if (reemit_amp[m] > 0.0) r += reemit_base[m] * phase[m] * y_all[idx];
                }
                // The combined HAPS noise sum_s w_s Z_Hs is exactly CN(0, sigma2_H ||w||^2).
                auto hn_eng = make_engine(opts.seed, {stream_tag::haps_noise, t, k});
                const cd hn = complex_normal(hn_eng, haps_noise_var);
                const cd y = d + u + nz + r + hn;
                auto& a = out.user[k];
                const cd sc = std::conj(sym[k]);
                a.ys += y * sc;
                a.yy += std::norm(y);
                a.du += std::norm(d + u);
                a.nn += std::norm(nz);
                a.rr += std::norm(r);
                a.hh += std::norm(hn);
            }
        }
    }
};

double use_and_forget(cd alpha, double total) {
    const double desired = std::norm(alpha);
    const double rest = total - desired;
    if (rest <= 1e-12 * total) return std::numeric_limits<double>::infinity();
    return desired / rest;
}

}  // namespace

McReport estimate_empirical_sinr(const NetworkScenario& s, const LinkGains& gains,
                                 const PowerAllocation& alloc, const McOptions& opts) {
    opts.validate();
    s.validate();
    alloc.validate(s.num_users(), s.num_uxnbs());
    const Chain chain(s, gains, alloc, opts);
    const std::size_t K = chain.K;
    const std::size_t B = opts.batches;

    std::vector<Batch> batches(B);
    auto bounds = [&](std::size_t b) { return std::pair{b * opts.trials / B, (b + 1) * opts.trials / B}; };
    const unsigned workers = std::min<unsigned>(opts.workers, static_cast<unsigned>(B));
    if (workers <= 1) {
        for (std::size_t b = 0; b < B; ++b) chain.run_batch(bounds(b).first, bounds(b).second, batches[b]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < B; b += workers)
                    chain.run_batch(bounds(b).first, bounds(b).second, batches[b]);
            });
        }
        for (auto& th : pool) th.join();
    }

    McReport rep;
    rep.seed = opts.seed;
    rep.closed_form = closed_form_sinr(s, gains, alloc);
    rep.norm_moment = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(chain.M));
    for (const auto& b : batches) {
        rep.trials += b.used;
        rep.discarded += b.discarded;
        rep.norm_moment += b.comb2;
    }
    if (rep.trials == 0) throw DomainError("every Monte Carlo trial was discarded");
    const double n = static_cast<double>(rep.trials);
    rep.norm_moment /= n;

    rep.users.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        Accum tot;
        std::vector<double> batch_sinr;
        for (const auto& b : batches) {
            const auto& a = b.user[k];
            tot.ys += a.ys;
            tot.yy += a.yy;
            tot.du += a.du;
            tot.nn += a.nn;
            tot.rr += a.rr;
            tot.hh += a.hh;
            if (b.used > 0) {
                const double nb = static_cast<double>(b.used);
                batch_sinr.push_back(use_and_forget(a.ys / nb, a.yy / nb));
            }
        }
        auto& e = rep.users[k];
        e.trials = rep.trials;
        e.alpha = tot.ys / n;
        e.total_power = tot.yy / n;
        e.sinr = use_and_forget(e.alpha, e.total_power);
        e.terms.desired_power = std::norm(e.alpha);
        e.terms.user_interference = std::max(0.0, tot.du / n - e.terms.desired_power);
        e.terms.forwarded_noise = tot.nn / n;
        e.terms.reemission = tot.rr / n;
        e.terms.haps_noise = tot.hh / n;

        bool finite = std::isfinite(e.sinr);
        double mean = 0.0, mean_db = 0.0;
        for (double v : batch_sinr) {
            finite = finite && std::isfinite(v) && v > 0.0;
            mean += v;
        }
        if (finite && batch_sinr.size() > 1) {
            const double nb = static_cast<double>(batch_sinr.size());
            mean /= nb;
            for (double v : batch_sinr) mean_db += to_db(v);
            mean_db /= nb;
            double var = 0.0, var_db = 0.0;
            for (double v : batch_sinr) {
                var += (v - mean) * (v - mean);
                var_db += (to_db(v) - mean_db) * (to_db(v) - mean_db);
            }
            e.ci95 = 1.96 * std::sqrt(var / (nb - 1.0) / nb);
            e.ci95_db = 1.96 * std::sqrt(var_db / (nb - 1.0) / nb);
        } else {
            e.ci95 = e.ci95_db = std::numeric_limits<double>::infinity();
        }
    }

    const auto budget = make_link_budget(s, gains);
    rep.corrected_sinr = corrected_closed_form_sinr(budget, alloc, rep.norm_moment);
    if (rep.closed_form.f_norm2 > 0.0)
        rep.normalization_gap_db = to_db(rep.norm_moment.mean() / rep.closed_form.f_norm2);
    return rep;
}

std::vector<double> corrected_closed_form_sinr(const LinkBudget& b, const PowerAllocation& a,
                                               const Eigen::MatrixXd& norm_moment) {
    b.validate();
    a.validate(b.num_users(), b.num_uxnbs());
    const auto K = b.beta2.rows();
    const auto M = b.beta2.cols();
    if (norm_moment.rows() != K || norm_moment.cols() != M)
        throw ConfigError("norm_moment", "shape must be K x M");
    const Eigen::VectorXd R = b.received_power();
    const double G2 = static_cast<double>(b.g_tx) * b.g_tx;
    const double N = b.n_rx, S = b.s_rx;
    std::vector<double> out(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k) {
        double ds = 0.0, rest = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) {
            const double f2 = norm_moment(k, m);
            if (f2 <= 0.0) continue;
            const double pkm = a.p(k, m);
            ds += std::sqrt(b.gamma2[m] * pkm * b.beta2(k, m) / f2);
            rest += (b.gamma2[m] * pkm * (R[m] + b.sigma2) +
                     (1.0 - b.tau[m]) * b.rho2[m] * pkm * (R[m] + b.sigma2)) / f2;
        }
        const double desired = G2 * N * N * S * S * b.user_power[k] * ds * ds;
        const double den = N * S * G2 * rest + static_cast<double>(M) * S * b.sigma2_haps;
        out[static_cast<std::size_t>(k)] =
            desired == 0.0 ? 0.0 : (den == 0.0 ? std::numeric_limits<double>::infinity() : desired / den);
    }
    return out;
}

std::string McReport::to_json() const {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    };
    nlohmann::json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["discarded"] = discarded;
    j["f_norm2_closed_form"] = closed_form.f_norm2;
    j["norm_moment_mean"] = norm_moment.size() ? norm_moment.mean() : 0.0;
    j["normalization_gap_db"] = normalization_gap_db;
    j["users"] = nlohmann::json::array();
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& e = users[k];
        const auto& c = closed_form.terms[k];
        const double cf = closed_form.sinr[k];
        j["users"].push_back({
            {"user", k},
            {"closed_form_sinr_db", num(to_db(cf))},
            {"empirical_sinr_db", num(to_db(e.sinr))},
            {"ci95_db", num(e.ci95_db)},
            {"gap_db", num(to_db(e.sinr) - to_db(cf))},
            {"corrected_closed_form_sinr_db", num(to_db(corrected_sinr[k]))},
            {"terms",
             {{"desired_power", {{"closed_form", c.desired_power}, {"empirical", e.terms.desired_power}}},
              {"user_interference",
               {{"closed_form", c.user_interference}, {"empirical", e.terms.user_interference}}},
              {"forwarded_noise", {{"closed_form", c.forwarded_noise}, {"empirical", e.terms.forwarded_noise}}},
              {"reemission", {{"closed_form", c.reemission}, {"empirical", e.terms.reemission}}},
              {"haps_noise", {{"closed_form", c.haps_noise}, {"empirical", e.terms.haps_noise}}}}},
            {"empirical_total_power", e.total_power},
        });
    }
    return j.dump(2);
}

}  // namespace aerocf
