#include "twospin/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twospin/error.hpp"

namespace twospin {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kRelTol = 1e-13;
constexpr double kTiny = std::numeric_limits<double>::min();

// Bisection for the sign change of a decreasing predicate on (lo, hi) with
// lo, hi > 0. `positive(x)` is true left of the root. Bisects geometrically so
// roots spanning hundreds of orders of magnitude converge within the cap.
template <class Positive>
double bisect_decreasing(double lo, double hi, Positive positive) {
    for (int i = 0; i < kMaxBisection; ++i) {
        if (hi - lo <= kRelTol * 1e-3 * hi) break;
        double mid = (hi / lo > 4.0) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (positive(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double log_hardcore_term(double gamma, int d) {
    return (d + 1) * std::log(gamma) + d * std::log(static_cast<double>(d)) -
           (d + 1) * std::log(static_cast<double>(d - 1));
}

double hardcore_term(double gamma, int d) {
    const double direct = std::pow(gamma, d + 1) * std::pow(static_cast<double>(d), d) /
                          std::pow(static_cast<double>(d - 1), d + 1);
    if (std::isfinite(direct) && direct > 0.0) return direct;
    return std::exp(log_hardcore_term(gamma, d));
}

// log(d lambda / gamma^d), the bound on |f_d'(x_d)| available when gamma > 1.
double log_tail(const SpinSystem& s, int d) {
    return std::log(static_cast<double>(d)) + std::log(s.lambda) - d * std::log(s.gamma);
}

}  // namespace

DegreeBound DegreeBound::parse(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf" || text == "INF") return unbounded();
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size() || v < 0 || v > std::numeric_limits<int>::max())
            throw InvalidArgument("bad degree bound: " + text);
        return finite(static_cast<int>(v));
    } catch (const std::logic_error&) {
        throw InvalidArgument("bad degree bound: " + text);
    }
}

int DegreeBound::value() const {
    if (is_infinite()) throw InvalidArgument("degree bound is unbounded");
    return value_;
}

std::string DegreeBound::to_string() const {
    return is_infinite() ? std::string("inf") : std::to_string(value_);
}

FixedPointResult fixed_point(const SpinSystem& s, int d) {
    require_antiferromagnetic(s);
    if (d <= 0) throw InvalidArgument("degree must be positive");

    // f_d(x) > x  <=>  log f_d(x) > log x, evaluated in log space to survive
    // gamma^{-d} overflow and underflow.
    auto above = [&](double x) { return log_symmetric_f(s, d, x) > std::log(x); };

    double hi = symmetric_f(s, d, 0.0);
    if (!std::isfinite(hi) || hi <= 0.0) {
        hi = 1.0;
        while (above(hi) && hi < 1e300) hi *= 2.0;
    }
    // x_hat <= hi implies x_hat = f(x_hat) >= f(hi).
    double lo = std::max(symmetric_f(s, d, hi), kTiny);
    if (lo > hi) std::swap(lo, hi);

    FixedPointResult r;
    r.d = d;
    r.x_hat = (lo == hi) ? lo : bisect_decreasing(lo, hi, above);
    r.residual = std::abs(symmetric_f(s, d, r.x_hat) - r.x_hat);
    r.derivative_abs = fixed_point_derivative(s, d, r.x_hat);
    return r;
}

int uniqueness_tail_start(const SpinSystem& s) {
    require_antiferromagnetic(s);
    if (!(s.gamma > 1.0)) throw PreconditionError("tail bound needs gamma > 1");
    // d lambda / gamma^d increases up to floor(1/(gamma-1)) + 1 and decreases after.
    const double peak = std::floor(1.0 / (s.gamma - 1.0)) + 1.0;
    if (peak > 1e8) throw InvalidArgument("gamma too close to 1 for an explicit degree scan");
    int d = static_cast<int>(peak);
    while (log_tail(s, d) >= 0.0) ++d;
    return d;
}

UniquenessReport check_uniqueness(const SpinSystem& s, DegreeBound delta) {
    require_antiferromagnetic(s);
    UniquenessReport report;
    int last = 0;
    if (delta.is_infinite()) {
        if (!(s.gamma > 1.0)) {
            // Non-unique at every sufficiently large degree.
            report.unique = false;
            return report;
        }
        report.tail_start = uniqueness_tail_start(s);
        last = *report.tail_start - 1;
    } else {
        if (delta.value() < 2) throw InvalidArgument("degree bound must be at least 2");
        last = delta.value() - 1;
    }
    report.checks.reserve(static_cast<std::size_t>(last));
    for (int d = 1; d <= last; ++d) {
        const FixedPointResult fp = fixed_point(s, d);
        const bool ok = fp.derivative_abs < 1.0;
        report.checks.push_back({d, fp.derivative_abs, ok});
        if (!ok && !report.violating_d) report.violating_d = d;
    }
    report.unique = !report.violating_d.has_value();
    return report;
}

bool is_unique_up_to(const SpinSystem& s, DegreeBound delta) {
    return check_uniqueness(s, delta).unique;
}

double alpha_maximizer(const SpinSystem& s, int d) {
    require_antiferromagnetic(s);
    if (d <= 0) throw InvalidArgument("degree must be positive");
    const double c = d * (1.0 - s.beta * s.gamma);
    // lhs - rhs decreases strictly from +inf to a negative limit.
    auto positive = [&](double x) {
        const double f = symmetric_f(s, d, x);
        const double lhs = (s.gamma - s.beta * x * x) / (c * x);
        const double rhs = (s.gamma - s.beta * f * f) / ((s.beta * f + 1.0) * (f + s.gamma));
        return lhs > rhs;
    };
    double lo = 1.0, hi = 1.0;
    while (positive(hi) && hi < 1e300) hi *= 2.0;
    while (!positive(lo) && lo > 1e-300) lo *= 0.5;
    if (lo == hi) return lo;
    return bisect_decreasing(lo, hi, positive);
}

double max_alpha_at_degree(const SpinSystem& s, int d) {
    return alpha_sym(s, d, alpha_maximizer(s, d));
}

ContractionResult contraction_bound(const SpinSystem& s, DegreeBound delta) {
    const UniquenessReport report = check_uniqueness(s, delta);
    if (!report.unique) {
        std::ostringstream os;
        os << "system is not unique up to " << delta.to_string();
        if (report.violating_d)
            os << ": |f_d'(x_d)| >= 1 at d=" << *report.violating_d;
        else
            os << ": gamma <= 1 admits no universal uniqueness";
        throw PreconditionError(os.str(), report.violating_d.value_or(0));
    }
    ContractionResult out;
    out.per_degree.reserve(report.checks.size());
    for (const DegreeCheck& check : report.checks) {
        DegreeContraction dc;
        dc.d = check.d;
        dc.x_max = alpha_maximizer(s, check.d);
        dc.alpha_max = alpha_sym(s, check.d, dc.x_max);
        dc.sqrt_derivative = std::sqrt(check.derivative_abs);
        if (dc.alpha_max > dc.sqrt_derivative + 1e-9) out.certified = false;
        if (dc.alpha_max > out.alpha) {
            out.alpha = dc.alpha_max;
            out.witness_d = dc.d;
        }
        out.per_degree.push_back(dc);
    }
    if (report.tail_start) {
        out.tail_bound = std::exp(0.5 * log_tail(s, *report.tail_start));
        if (*out.tail_bound > out.alpha) {
            out.alpha = *out.tail_bound;
            out.witness_d = *report.tail_start;
        }
    }
    return out;
}

std::string to_string(ThresholdKind k) {
    switch (k) {
        case ThresholdKind::HardcoreLambda: return "hardcore_lambda";
        case ThresholdKind::SoftLambdaPair: return "soft_lambda_pair";
        case ThresholdKind::GammaCritical: return "gamma_c";
        case ThresholdKind::UniversalLambda: return "universal_lambda";
        case ThresholdKind::Contraction: return "contraction";
        case ThresholdKind::MConstant: return "M_constant";
    }
    return "unknown";
}

ThresholdReport hardcore_threshold(double gamma, DegreeBound delta) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
    ThresholdReport report;
    report.kind = ThresholdKind::HardcoreLambda;
    report.delta = delta;

    double best = std::numeric_limits<double>::infinity();
    int witness = 0;
    if (delta.is_infinite()) {
        if (gamma <= 1.0)
            throw NoThreshold("hardcore with gamma <= 1 has no field unique on unbounded degrees");
        // Unimodal in d; increments are positive once (d-1) log gamma > 2.
        const int safe = static_cast<int>(std::ceil(1.0 + 2.0 / std::log(gamma))) + 1;
        int since_best = 0;
        for (int d = 2; d <= safe || since_best < 50; ++d) {
            const double v = log_hardcore_term(gamma, d);
            if (v < best) {
                best = v;
                witness = d;
                since_best = 0;
            } else {
                ++since_best;
            }
        }
    } else {
        if (delta.value() < 3) throw InvalidArgument("hardcore threshold needs delta >= 3");
        for (int d = 2; d < delta.value(); ++d) {
            const double v = log_hardcore_term(gamma, d);
            if (v < best) {
                best = v;
                witness = d;
            }
        }
    }
    report.values = {hardcore_term(gamma, witness)};
    report.witness_d = witness;
    return report;
}

int first_admissible_degree(double beta, double gamma) {
    const double s = std::sqrt(beta * gamma);
    if (!(s < 1.0)) throw InvalidArgument("needs beta * gamma < 1");
    int d = std::max(1, static_cast<int>(std::ceil((1.0 + s) / (1.0 - s))) - 2);
    while (s > static_cast<double>(d - 1) / (d + 1)) ++d;
    while (d > 1 && s <= static_cast<double>(d - 2) / d) --d;
    return d;
}

std::optional<CriticalRoots> critical_roots(double beta, double gamma, int d) {
    if (!(beta > 0.0) || d < 1) return std::nullopt;
    const double bg = beta * gamma;
    if (!(bg < 1.0)) return std::nullopt;
    if (std::sqrt(bg) > static_cast<double>(d - 1) / (d + 1)) return std::nullopt;
    const double b = -1.0 - bg + d * (1.0 - bg);
    const double disc = std::max(0.0, b * b - 4.0 * bg);
    const double big = b + std::sqrt(disc);
    CriticalRoots r;
    r.x2 = big / (2.0 * beta);
    // x1 x2 = gamma / beta; avoids cancellation in b - sqrt(disc).
    r.x1 = 2.0 * gamma / big;
    auto lambda_at = [&](double x) {
        return std::exp(std::log(x) + d * (std::log(x + gamma) - std::log(beta * x + 1.0)));
    };
    r.lambda1 = lambda_at(r.x1);
    r.lambda2 = lambda_at(r.x2);
    return r;
}

ThresholdReport soft_thresholds(double beta, double gamma, int delta) {
    if (!(beta > 0.0)) throw InvalidArgument("beta = 0 is the hard-constraint case; use hardcore_threshold");
    if (!(gamma >= beta) || !(beta * gamma < 1.0))
        throw InvalidParameter("soft thresholds need 0 < beta <= gamma and beta * gamma < 1");
    if (delta < 3) throw InvalidArgument("soft thresholds need delta >= 3");
    ThresholdReport report;
    report.kind = ThresholdKind::SoftLambdaPair;
    report.delta = DegreeBound::finite(delta);
    if (std::sqrt(beta * gamma) > static_cast<double>(delta - 2) / delta) {
        report.all_lambda_unique = true;
        return report;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int d = first_admissible_degree(beta, gamma); d < delta; ++d) {
        const auto roots = critical_roots(beta, gamma, d);
        if (!roots) continue;
        if (roots->lambda1 < lo) {
            lo = roots->lambda1;
            report.witness_d = d;
        }
        if (roots->lambda2 > hi) {
            hi = roots->lambda2;
            report.witness_d_upper = d;
        }
    }
    report.values = {lo, hi};
    return report;
}

ThresholdReport gamma_threshold(double beta, double lambda, DegreeBound delta) {
    if (!(beta >= 0.0) || !(beta < 1.0)) throw InvalidArgument("gamma threshold needs 0 <= beta < 1");
    if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive");
    auto unique = [&](double gamma) {
        const SpinSystem s{beta, gamma, lambda};
        return is_antiferromagnetic(s) && is_unique_up_to(s, delta);
    };
    ThresholdReport report;
    report.kind = ThresholdKind::GammaCritical;
    report.delta = delta;

    double hi = beta > 0.0 ? (1.0 / beta) * (1.0 - 1e-9) : 1.0;
    while (!unique(hi)) {
        if (beta > 0.0 || hi > 1e300) throw NoThreshold("no gamma below 1/beta gives uniqueness");
        hi *= 2.0;
    }
    double lo = beta > 0.0 ? beta : std::min(hi, 1.0);
    if (beta > 0.0) {
        if (unique(lo)) {
            report.values = {lo};
            return report;
        }
    } else {
        while (unique(lo)) {
            lo *= 0.5;
            if (lo < 1e-300) {
                report.values = {0.0};
                return report;
            }
        }
    }
    // unique(gamma) is false below gamma_c and true above.
    report.values = {bisect_decreasing(lo, hi, [&](double g) { return !unique(g); })};
    return report;
}

ThresholdReport universal_lambda_threshold(double beta, double gamma) {
    if (!(beta > 0.0)) throw InvalidArgument("universal threshold needs beta > 0");
    if (!(gamma > 1.0)) throw NoThreshold("gamma <= 1 admits no universally unique field");
    if (!(beta * gamma < 1.0) || beta > gamma) throw InvalidParameter("system is not anti-ferromagnetic");
    ThresholdReport report;
    report.kind = ThresholdKind::UniversalLambda;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    // lambda_1(d) grows without bound, so the running minimum settles.
    for (int d = first_admissible_degree(beta, gamma); since_best < 50; ++d) {
        const auto roots = critical_roots(beta, gamma, d);
        if (!roots) continue;
        if (roots->lambda1 < best) {
            best = roots->lambda1;
            report.witness_d = d;
            since_best = 0;
        } else {
            ++since_best;
        }
    }
    report.values = {best};
    return report;
}

int m_depth_increment(double M, int d) {
    if (!(M > 1.0)) throw InvalidArgument("M must exceed 1");
    int k = 0;
    double power = 1.0;
    while (power < d + 1.0) {
        power *= M;
        ++k;
    }
    return k;
}

double choose_M(const SpinSystem& s, double alpha) {
    require_antiferromagnetic(s);
    if (!(s.gamma > 1.0)) throw PreconditionError("M-based depth needs gamma > 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    const double log_alpha = std::log(alpha);
    const double log_gamma = std::log(s.gamma);
    const double log_lambda = std::log(s.lambda);

    // log of the unconditional bound d sqrt(lambda / gamma^{d+1}).
    auto log_unconditional = [&](int d) {
        return std::log(static_cast<double>(d)) + 0.5 * (log_lambda - (d + 1) * log_gamma);
    };
    std::vector<double> exact_cache;  // log max_x alpha_d(x), index d
    auto log_exact = [&](int d) {
        if (static_cast<int>(exact_cache.size()) <= d)
            exact_cache.resize(static_cast<std::size_t>(d) + 1, std::numeric_limits<double>::quiet_NaN());
        double& slot = exact_cache[static_cast<std::size_t>(d)];
        if (std::isnan(slot)) slot = std::log(max_alpha_at_degree(s, d));
        return slot;
    };

    constexpr int kMaxDegreeScan = 1000000;
    for (int step = 1; step <= 100000; ++step) {
        const double M = 1.0 + 0.1 * step;
        const double log_M = std::log(M);
        // phi(d) >= 0 certifies the unconditional bound against alpha^{log_M(d+1)+1};
        // phi' is increasing, so phi(D) >= 0 and phi'(D) >= 0 cover every d >= D.
        auto phi = [&](double d) {
            return log_alpha * (1.0 + std::log(d + 1.0) / log_M) - std::log(d) - 0.5 * log_lambda +
                   0.5 * (d + 1.0) * log_gamma;
        };
        auto phi_slope = [&](double d) { return log_alpha / ((d + 1.0) * log_M) - 1.0 / d + 0.5 * log_gamma; };

        bool ok = true;
        bool tail_certified = false;
        for (int d = 1; d <= kMaxDegreeScan; ++d) {
            if (phi(d) >= 0.0 && phi_slope(d) >= 0.0) {
                tail_certified = true;
                break;
            }
            const int k = m_depth_increment(M, d);
            if (k <= 1) continue;  // alpha_d <= alpha already
            const double target = k * log_alpha;
            if (log_unconditional(d) <= target) continue;
            if (log_exact(d) <= target) continue;
            ok = false;
            break;
        }
        if (ok && tail_certified) return M;
    }
    throw NoThreshold("no M on the search grid satisfies the degree-weighted contraction bound");
}

std::vector<DegreeCheck> uniqueness_profile(const SpinSystem& s, int d_max) {
    require_antiferromagnetic(s);
    std::vector<DegreeCheck> out;
    out.reserve(static_cast<std::size_t>(std::max(d_max, 0)));
    for (int d = 1; d <= d_max; ++d) {
        const FixedPointResult fp = fixed_point(s, d);
        out.push_back({d, fp.derivative_abs, fp.derivative_abs < 1.0});
    }
    return out;
}

std::optional<NonMonotoneWitness> find_non_monotone_witness(int d_max) {
    const double betas[] = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
    const double gammas[] = {1.1, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    const double multipliers[] = {1.01, 1.1, 1.5, 2.0};
    for (double beta : betas) {
        for (double gamma : gammas) {
            if (!(beta * gamma < 1.0)) continue;
            const double lambda_c = universal_lambda_threshold(beta, gamma).values.front();
            for (double m : multipliers) {
                const SpinSystem s{beta, gamma, lambda_c * m};
                const auto profile = uniqueness_profile(s, d_max);
                const auto bad = std::find_if(profile.begin(), profile.end(),
                                              [](const DegreeCheck& c) { return !c.unique; });
                if (bad == profile.end()) continue;
                const auto good = std::find_if(bad, profile.end(),
                                               [](const DegreeCheck& c) { return c.unique; });
                if (good == profile.end()) continue;
                return NonMonotoneWitness{s, bad->d, good->d};
            }
        }
    }
    return std::nullopt;
}

}  // namespace twospin
