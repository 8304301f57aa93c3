#include "twospin/spin_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twospin/error.hpp"

namespace twospin {

namespace {

constexpr int kLogDomainDegree = 32;

bool is_nonnegative_finite(double v) { return std::isfinite(v) && v >= 0.0; }

void check_parameters(const SpinSystem& s) {
    if (!is_nonnegative_finite(s.beta) || !is_nonnegative_finite(s.gamma)) {
        std::ostringstream os;
        os << "edge weights must be finite and nonnegative (beta=" << s.beta
           << ", gamma=" << s.gamma << ")";
        throw InvalidParameter(os.str());
    }
    if (!(std::isfinite(s.lambda) && s.lambda > 0.0)) {
        std::ostringstream os;
        os << "external field must be positive (lambda=" << s.lambda << ")";
        throw InvalidParameter(os.str());
    }
}

double clamp_finite(double v) {
    constexpr double kMax = std::numeric_limits<double>::max();
    return v > kMax ? kMax : v;
}

}  // namespace

std::string to_string(SpinClass c) {
    switch (c) {
        case SpinClass::AntiFerromagnetic: return "anti-ferromagnetic";
        case SpinClass::Ferromagnetic: return "ferromagnetic";
        case SpinClass::Degenerate: return "degenerate";
    }
    return "unknown";
}

Classification classify(const SpinSystem& s) {
    check_parameters(s);
    Classification out{SpinClass::AntiFerromagnetic, false, s};
    if (s.beta > s.gamma) {
        out.swapped = true;
        out.normalized = {s.gamma, s.beta, 1.0 / s.lambda};
    }
    const SpinSystem& n = out.normalized;
    const double product = n.beta * n.gamma;
    if (n.gamma == 0.0 || product == 1.0)
        out.kind = SpinClass::Degenerate;
    else if (product > 1.0)
        out.kind = SpinClass::Ferromagnetic;
    return out;
}

bool is_antiferromagnetic(const SpinSystem& s) {
    if (!is_nonnegative_finite(s.beta) || !is_nonnegative_finite(s.gamma) ||
        !(std::isfinite(s.lambda) && s.lambda > 0.0))
        return false;
    return s.beta <= s.gamma && s.gamma > 0.0 && s.beta * s.gamma < 1.0;
}

void require_antiferromagnetic(const SpinSystem& s) {
    check_parameters(s);
    if (!is_antiferromagnetic(s)) {
        std::ostringstream os;
        os << "system (beta=" << s.beta << ", gamma=" << s.gamma << ", lambda=" << s.lambda
           << ") is not anti-ferromagnetic with beta <= gamma";
        throw InvalidParameter(os.str());
    }
}

ExtendedRatio ExtendedRatio::from_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0,1]");
    if (p == 1.0) return infinity();
    return finite(p / (1.0 - p));
}

double ExtendedRatio::value() const {
    if (infinite_) throw DomainError("infinite ratio has no finite value");
    return value_;
}

double ExtendedRatio::as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

double ExtendedRatio::probability() const {
    if (infinite_) return 1.0;
    return value_ / (1.0 + value_);
}

std::partial_ordering operator<=>(const ExtendedRatio& a, const ExtendedRatio& b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
}

bool operator==(const ExtendedRatio& a, const ExtendedRatio& b) {
    return (a <=> b) == std::partial_ordering::equivalent;
}

double edge_factor(const SpinSystem& s, ExtendedRatio r) {
    if (r.is_infinite()) return s.beta;
    const double x = r.value();
    return (s.beta * x + 1.0) / (x + s.gamma);
}

ExtendedRatio recursion_f(const SpinSystem& s, double lambda_v,
                          std::span<const ExtendedRatio> children) {
    if (children.size() <= kLogDomainDegree) {
        double product = lambda_v;
        for (const auto& c : children) product *= edge_factor(s, c);
        return ExtendedRatio::finite(clamp_finite(product));
    }
    double log_product = std::log(lambda_v);
    for (const auto& c : children) {
        const double factor = edge_factor(s, c);
        if (factor == 0.0) return ExtendedRatio::zero();
        log_product += std::log(factor);
    }
    return ExtendedRatio::finite(clamp_finite(std::exp(log_product)));
}

double log_symmetric_f(const SpinSystem& s, int d, double x) {
    if (d <= 0) throw InvalidArgument("degree must be positive");
    return std::log(s.lambda) + d * (std::log(s.beta * x + 1.0) - std::log(x + s.gamma));
}

double symmetric_f(const SpinSystem& s, int d, double x) {
    if (d <= 0) throw InvalidArgument("degree must be positive");
    if (d <= kLogDomainDegree)
        return s.lambda * std::pow((s.beta * x + 1.0) / (x + s.gamma), d);
    return std::exp(log_symmetric_f(s, d, x));
}

double potential_phi(const SpinSystem& s, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("potential is defined on (0, inf)");
    return 1.0 / std::sqrt(r * (s.beta * r + 1.0) * (r + s.gamma));
}

namespace {

// sqrt(x / ((beta x + 1)(x + gamma))), one summand of alpha.
double summand(const SpinSystem& s, double x) {
    return std::sqrt(x / ((s.beta * x + 1.0) * (x + s.gamma)));
}

// (1 - beta gamma) sqrt(F / ((beta F + 1)(F + gamma))) for the root ratio F.
double prefactor(const SpinSystem& s, double f) {
    return (1.0 - s.beta * s.gamma) * summand(s, f);
}

}  // namespace

double alpha(const SpinSystem& s, std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    std::vector<ExtendedRatio> children;
    children.reserve(xs.size());
    double sum = 0.0;
    for (double x : xs) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("alpha needs finite nonnegative inputs");
        children.push_back(ExtendedRatio::finite(x));
        sum += summand(s, x);
    }
    const double f = recursion_f(s, s.lambda, children).value();
    return prefactor(s, f) * sum;
}

double alpha_sym(const SpinSystem& s, int d, double x) {
    if (d <= 0) throw InvalidArgument("degree must be positive");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("alpha needs finite nonnegative inputs");
    return d * prefactor(s, symmetric_f(s, d, x)) * summand(s, x);
}

double fixed_point_derivative(const SpinSystem& s, int d, double x) {
    return d * (1.0 - s.beta * s.gamma) * x / ((s.beta * x + 1.0) * (x + s.gamma));
}

}  // namespace twospin
