#include "aerocf/socp.hpp"

#include <algorithm>
#include <cmath>

#include "aerocf/error.hpp"
#include "json.hpp"

namespace aerocf {

ConeProgram::ConeProgram(std::size_t n)
    : n_vars(n),
      objective(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      lo(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), -std::numeric_limits<double>::infinity())),
      hi(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), std::numeric_limits<double>::infinity())) {}

void ConeProgram::validate() const {
    const auto n = static_cast<Eigen::Index>(n_vars);
    if (objective.size() != n) throw ConfigError("objective", "length must equal n_vars");
    if (lo.size() != n || hi.size() != n) throw ConfigError("bounds", "length must equal n_vars");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isnan(lo[i]) || std::isnan(hi[i]) || !(lo[i] < hi[i]))
            throw ConfigError("bounds", "need lo < hi for variable " + std::to_string(i));
    }
    for (std::size_t i = 0; i < soc.size(); ++i) {
        const auto& c = soc[i];
        if (c.A.cols() != n || c.c.size() != n || c.b.size() != c.A.rows())
            throw ConfigError("soc[" + std::to_string(i) + "]", "dimension mismatch");
        if (!c.A.allFinite() || !c.b.allFinite() || !c.c.allFinite() || !std::isfinite(c.d))
            throw ConfigError("soc[" + std::to_string(i) + "]", "non-finite data");
    }
    for (std::size_t i = 0; i < linear.size(); ++i) {
        if (linear[i].g.size() != n) throw ConfigError("linear[" + std::to_string(i) + "]", "dimension mismatch");
        if (!linear[i].g.allFinite() || !std::isfinite(linear[i].h))
            throw ConfigError("linear[" + std::to_string(i) + "]", "non-finite data");
    }
    if (!objective.allFinite()) throw ConfigError("objective", "non-finite data");
}

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible_point: return "feasible_point";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

double ResidualReport::worst() const noexcept { return std::max({max_soc, max_linear, bound}); }

ResidualReport check_point(const ConeProgram& p, const Eigen::VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(p.n_vars)) throw ConfigError("x", "length must equal n_vars");
    ResidualReport r;
    for (const auto& c : p.soc) {
        const double v = (c.A * x + c.b).norm() - (c.c.dot(x) + c.d);
        r.soc.push_back(v);
        r.max_soc = std::max(r.max_soc, v);
    }
    for (const auto& l : p.linear) {
        const double v = l.g.dot(x) - l.h;
        r.linear.push_back(v);
        r.max_linear = std::max(r.max_linear, v);
    }
    r.bound = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) r.bound = std::max({r.bound, p.lo[i] - x[i], x[i] - p.hi[i]});
    return r;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constraint data restricted to the columns it actually touches.
struct Cone {
    std::vector<Eigen::Index> idx;
    Eigen::MatrixXd A;
    Eigen::VectorXd b, c;
    double d = 0.0;
    Eigen::MatrixXd Q;  // A^T A - c c^T
};

struct Lin {
    std::vector<Eigen::Index> idx;
    Eigen::VectorXd g;
    double h = 0.0;
};

std::vector<Eigen::Index> support(const Eigen::MatrixXd& A, const Eigen::VectorXd& c) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < c.size(); ++j)
        if (c[j] != 0.0 || (A.rows() > 0 && A.col(j).cwiseAbs().maxCoeff() != 0.0)) idx.push_back(j);
    return idx;
}

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[idx[i]];
    return v;
}

class Barrier {
public:
    Eigen::Index n = 0;
    std::vector<Cone> cones;
    std::vector<Lin> lins;
    Eigen::VectorXd lo, hi;

    // A cone contributes 2 to the barrier parameter, everything else 1.
    double theta() const {
        double th = 2.0 * static_cast<double>(cones.size()) + static_cast<double>(lins.size());
        for (Eigen::Index i = 0; i < n; ++i) th += std::isfinite(lo[i]) + std::isfinite(hi[i]);
        return th;
    }

    void add_cone(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double d) {
        Cone k;
        k.idx = support(A, c);
        k.A.resize(A.rows(), static_cast<Eigen::Index>(k.idx.size()));
        for (std::size_t j = 0; j < k.idx.size(); ++j) k.A.col(static_cast<Eigen::Index>(j)) = A.col(k.idx[j]);
        k.b = b;
        k.c = gather(c, k.idx);
        k.d = d;
        k.Q = k.A.transpose() * k.A - k.c * k.c.transpose();
        cones.push_back(std::move(k));
    }

    void add_lin(const Eigen::VectorXd& g, double h) {
        Lin l;
        for (Eigen::Index j = 0; j < g.size(); ++j)
            if (g[j] != 0.0) l.idx.push_back(j);
        l.g = gather(g, l.idx);
        l.h = h;
        lins.push_back(std::move(l));
    }

    // phi(x), or +inf outside the domain.
    double value(const Eigen::VectorXd& x) const {
        double phi = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::isfinite(lo[i])) {
                const double s = x[i] - lo[i];
                if (!(s > 0.0)) return kInf;
                phi -= std::log(s);
            }
            if (std::isfinite(hi[i])) {
                const double s = hi[i] - x[i];
                if (!(s > 0.0)) return kInf;
                phi -= std::log(s);
            }
        }
        for (const auto& l : lins) {
            const double s = l.h - l.g.dot(gather(x, l.idx));
            if (!(s > 0.0)) return kInf;
            phi -= std::log(s);
        }
        for (const auto& k : cones) {
            const Eigen::VectorXd xs = gather(x, k.idx);
            const double u = k.c.dot(xs) + k.d;
            const double wn = (k.A * xs + k.b).norm();
            if (!(u > 0.0) || !(u > wn)) return kInf;
            const double D = (u - wn) * (u + wn);
            if (!(D > 0.0)) return kInf;
            phi -= std::log(D);
        }
        return phi;
    }

    void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& H) const {
        g.setZero(n);
        H.setZero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::isfinite(lo[i])) {
                const double s = x[i] - lo[i];
                g[i] -= 1.0 / s;
                H(i, i) += 1.0 / (s * s);
            }
            if (std::isfinite(hi[i])) {
                const double s = hi[i] - x[i];
                g[i] += 1.0 / s;
                H(i, i) += 1.0 / (s * s);
            }
        }
        for (const auto& l : lins) {
            const double s = l.h - l.g.dot(gather(x, l.idx));
            const Eigen::VectorXd gs = l.g / s;
            for (std::size_t a = 0; a < l.idx.size(); ++a) {
                g[l.idx[a]] += gs[static_cast<Eigen::Index>(a)];
                for (std::size_t b = 0; b < l.idx.size(); ++b)
                    H(l.idx[a], l.idx[b]) += gs[static_cast<Eigen::Index>(a)] * gs[static_cast<Eigen::Index>(b)];
            }
        }
        for (const auto& k : cones) {
            const Eigen::VectorXd xs = gather(x, k.idx);
            const double u = k.c.dot(xs) + k.d;
            const Eigen::VectorXd w = k.A * xs + k.b;
            const double wn = w.norm();
            const double D = (u - wn) * (u + wn);
            // grad D = 2 (u c - A^T w)
            const Eigen::VectorXd gd = 2.0 * (u * k.c - k.A.transpose() * w);
            const Eigen::VectorXd gk = -gd / D;
            const Eigen::MatrixXd Hk = (2.0 / D) * k.Q + (gd * gd.transpose()) / (D * D);
            for (std::size_t a = 0; a < k.idx.size(); ++a) {
                g[k.idx[a]] += gk[static_cast<Eigen::Index>(a)];
                for (std::size_t b = 0; b < k.idx.size(); ++b)
                    H(k.idx[a], k.idx[b]) += Hk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
    }
};

enum class CenterOutcome { centered, early_exit, stalled, budget };

struct Centering {
    const Barrier& bar;
    const Eigen::VectorXd& q;  // minimize t q^T x + phi(x)
    std::size_t& iterations;
    std::size_t max_iter;

    template <class EarlyExit>
    CenterOutcome run(Eigen::VectorXd& x, double t, EarlyExit&& early) {
        Eigen::VectorXd g;
        Eigen::MatrixXd H;
        double f = t * q.dot(x) + bar.value(x);
        for (int inner = 0; inner < 200; ++inner) {
            if (iterations >= max_iter) return CenterOutcome::budget;
            bar.derivatives(x, g, H);
            g += t * q;
            Eigen::VectorXd dx;
            if (!newton_step(H, g, dx)) return CenterOutcome::stalled;
            const double lambda2 = -g.dot(dx);
            if (!std::isfinite(lambda2)) return CenterOutcome::stalled;
            if (lambda2 <= 2e-10) return CenterOutcome::centered;
            ++iterations;
            double alpha = 1.0;
            double fn = kInf;
            Eigen::VectorXd xn;
            for (int ls = 0; ls < 80; ++ls) {
                xn = x + alpha * dx;
                const double phi = bar.value(xn);
                if (std::isfinite(phi)) {
                    fn = t * q.dot(xn) + phi;
                    if (fn <= f - 0.25 * alpha * lambda2) break;
                }
                alpha *= 0.5;
            }
            if (!(fn <= f - 0.25 * alpha * lambda2)) {
                // No decrease representable in double precision; the iterate is as centred as it gets.
                return lambda2 < 1e-6 ? CenterOutcome::centered : CenterOutcome::stalled;
            }
            x = xn;
            f = fn;
            if (early(x)) return CenterOutcome::early_exit;
        }
        return CenterOutcome::stalled;
    }

    static bool newton_step(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, Eigen::VectorXd& dx) {
        Eigen::LLT<Eigen::MatrixXd> ldlt(H);
        if (ldlt.info() == Eigen::Success) {
            dx = ldlt.solve(-g);
            if (dx.allFinite()) return true;
        }
        const double ridge = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
        Eigen::MatrixXd Hr = H;
        Hr.diagonal().array() += ridge;
        ldlt.compute(Hr);
        if (ldlt.info() != Eigen::Success) return false;
        dx = ldlt.solve(-g);
        return dx.allFinite();
    }
};

Eigen::VectorXd interior_start(const ConeProgram& p, const Eigen::VectorXd* start) {
    const auto n = static_cast<Eigen::Index>(p.n_vars);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lo = p.lo[i], hi = p.hi[i];
        double v = start ? (*start)[i] : 0.0;
        if (!start) {
            if (std::isfinite(lo) && std::isfinite(hi)) v = 0.5 * (lo + hi);
            else if (std::isfinite(lo)) v = lo + 1.0;
            else if (std::isfinite(hi)) v = hi - 1.0;
        }
        const double margin = (std::isfinite(lo) && std::isfinite(hi)) ? 1e-3 * (hi - lo) : 1e-3;
        if (std::isfinite(lo) && v < lo + margin) v = lo + margin;
        if (std::isfinite(hi) && v > hi - margin) v = hi - margin;
        x[i] = v;
    }
    return x;
}

void fill_residuals(const ConeProgram& p, SolveResult& r) {
    const auto rep = check_point(p, r.x);
    r.max_soc_residual = p.soc.empty() ? 0.0 : rep.max_soc;
    r.max_linear_residual = p.linear.empty() ? 0.0 : rep.max_linear;
    r.objective_value = p.objective.dot(r.x);
}

}  // namespace

SolveResult solve(const ConeProgram& p, const SolveOptions& opts, const Eigen::VectorXd* start) {
    p.validate();
    if (start && start->size() != static_cast<Eigen::Index>(p.n_vars))
        throw ConfigError("start", "length must equal n_vars");
    const auto n = static_cast<Eigen::Index>(p.n_vars);
    SolveResult res;
    Eigen::VectorXd x = interior_start(p, start);

    // Largest violation of the start point; < 0 means strictly feasible already.
    const auto rep0 = check_point(p, x);
    double viol = std::max(rep0.max_soc, rep0.max_linear);
    for (const auto& c : p.soc) viol = std::max(viol, -(c.c.dot(x) + c.d));
    if (p.soc.empty() && p.linear.empty()) viol = -1.0;

    if (viol >= 0.0 || !std::isfinite(viol)) {
        // Phase I over (x, s): every cone and row relaxed by s, s >= -1.
        Barrier ph1;
        ph1.n = n + 1;
        ph1.lo.resize(n + 1);
        ph1.hi.resize(n + 1);
        ph1.lo.head(n) = p.lo;
        ph1.hi.head(n) = p.hi;
        ph1.lo[n] = -1.0;
        ph1.hi[n] = kInf;
        for (const auto& c : p.soc) {
            Eigen::MatrixXd A(c.A.rows(), n + 1);
            A << c.A, Eigen::VectorXd::Zero(c.A.rows());
            Eigen::VectorXd cc(n + 1);
            cc << c.c, 1.0;
            ph1.add_cone(A, c.b, cc, c.d);
        }
        for (const auto& l : p.linear) {
            Eigen::VectorXd g(n + 1);
            g << l.g, -1.0;
            ph1.add_lin(g, l.h);
        }
        Eigen::VectorXd z(n + 1);
        z << x, viol + 1.0;
        Eigen::VectorXd q = Eigen::VectorXd::Zero(n + 1);
        q[n] = 1.0;
        Centering cen{ph1, q, res.iterations, opts.max_iter};
        const double th = ph1.theta();
        double t = 1.0 / std::max(1.0, std::abs(z[n]));
        bool found = false;
        for (;;) {
            const auto out = cen.run(z, t, [&](const Eigen::VectorXd& v) { return v[n] < 0.0; });
            res.phase1_slack = z[n];
            if (out == CenterOutcome::early_exit || z[n] < 0.0) {
                found = true;
                break;
            }
            if (out == CenterOutcome::budget) {
                res.status = SolveStatus::max_iter;
                res.x = z.head(n);
                fill_residuals(p, res);
                return res;
            }
            const double bound = z[n] - th / t;
            if (bound > opts.tol_feas) {
                res.status = SolveStatus::infeasible;
                res.x = z.head(n);
                fill_residuals(p, res);
                return res;
            }
            if (th / t < opts.tol_feas || out == CenterOutcome::stalled) {
                // Converged (or stuck) with a slack at the feasibility boundary.
                res.x = z.head(n);
                fill_residuals(p, res);
                if (z[n] <= opts.tol_feas && std::max(res.max_soc_residual, res.max_linear_residual) <= opts.tol_feas) {
                    res.status = SolveStatus::feasible_point;
                } else {
                    res.status = out == CenterOutcome::stalled ? SolveStatus::numerical_failure
                                                               : SolveStatus::infeasible;
                }
                return res;
            }
            t *= opts.mu;
        }
        if (found) x = z.head(n);
    }

    if (opts.feasibility_only) {
        res.status = SolveStatus::feasible_point;
        res.x = x;
        fill_residuals(p, res);
        return res;
    }

    Barrier ph2;
    ph2.n = n;
    ph2.lo = p.lo;
    ph2.hi = p.hi;
    for (const auto& c : p.soc) ph2.add_cone(c.A, c.b, c.c, c.d);
    for (const auto& l : p.linear) ph2.add_lin(l.g, l.h);
    const Eigen::VectorXd q = -p.objective;
    const double th = ph2.theta();
    Centering cen{ph2, q, res.iterations, opts.max_iter};
    double t = 1.0;
    for (;;) {
        const auto out = cen.run(x, t, [](const Eigen::VectorXd&) { return false; });
        res.x = x;
        fill_residuals(p, res);
        if (out == CenterOutcome::budget) {
            res.status = SolveStatus::max_iter;
            return res;
        }
        if (out == CenterOutcome::stalled) {
            // Strictly feasible but uncertified.
            res.status = SolveStatus::feasible_point;
            return res;
        }
        res.gap_history.push_back(th / t);
        if (th / t <= opts.tol_gap * std::max(1.0, std::abs(res.objective_value))) {
            res.status = SolveStatus::optimal;
            return res;
        }
        t *= opts.mu;
    }
}

std::string ConeProgram::to_json() const {
    auto vec = [](const Eigen::VectorXd& v) {
        nlohmann::json a = nlohmann::json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::isfinite(v[i])) a.push_back(v[i]);
            else a.push_back(v[i] > 0 ? "inf" : "-inf");
        }
        return a;
    };
    nlohmann::json j;
    j["schema_version"] = 1;
    j["sense"] = "maximize";
    j["n_vars"] = n_vars;
    j["objective"] = vec(objective);
    j["lo"] = vec(lo);
    j["hi"] = vec(hi);
    j["soc"] = nlohmann::json::array();
    for (const auto& c : soc) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < c.A.rows(); ++r) rows.push_back(vec(c.A.row(r).transpose()));
        j["soc"].push_back({{"A", rows}, {"b", vec(c.b)}, {"c", vec(c.c)}, {"d", c.d}});
    }
    j["linear"] = nlohmann::json::array();
    for (const auto& l : linear) j["linear"].push_back({{"g", vec(l.g)}, {"h", l.h}});
    return j.dump();
}

ConeProgram ConeProgram::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cone_program", e.what());
    }
    auto num = [](const nlohmann::json& v) -> double {
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf") return kInf;
            if (s == "-inf") return -kInf;
            throw ConfigError("cone_program", "bad number " + s);
        }
        return v.get<double>();
    };
    auto vec = [&](const nlohmann::json& a) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
        for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = num(a[i]);
        return v;
    };
    try {
        if (j.value("schema_version", 0) != 1) throw ConfigError("schema_version", "unsupported");
        ConeProgram p(j.at("n_vars").get<std::size_t>());
        p.objective = vec(j.at("objective"));
        p.lo = vec(j.at("lo"));
        p.hi = vec(j.at("hi"));
        for (const auto& c : j.at("soc")) {
            SocConstraint s;
            const auto& rows = c.at("A");
            s.A.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p.n_vars));
            for (std::size_t r = 0; r < rows.size(); ++r) s.A.row(static_cast<Eigen::Index>(r)) = vec(rows[r]).transpose();
            s.b = vec(c.at("b"));
            s.c = vec(c.at("c"));
            s.d = num(c.at("d"));
            p.soc.push_back(std::move(s));
        }
        for (const auto& l : j.at("linear")) p.linear.push_back({vec(l.at("g")), num(l.at("h"))});
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cone_program", e.what());
    }
}

}  // namespace aerocf
