#pragma once

// Uniqueness of the Gibbs measure on infinite regular trees, its threshold
// forms, and the contraction rate used to pick truncation depths.

#include <optional>
#include <string>
#include <vector>

#include "twospin/spin_core.hpp"

namespace twospin {

/// Degree bound Delta: a finite integer or unbounded.
class DegreeBound {
public:
    static constexpr DegreeBound finite(int delta) { return DegreeBound(delta); }
    static constexpr DegreeBound unbounded() { return DegreeBound(-1); }
    /// Parses "inf"/"infinity" or a decimal integer. Throws InvalidArgument.
    static DegreeBound parse(const std::string& text);

    constexpr bool is_infinite() const { return value_ < 0; }
    /// Finite value; throws InvalidArgument when unbounded.
    int value() const;
    std::string to_string() const;

    friend constexpr bool operator==(DegreeBound a, DegreeBound b) { return a.value_ == b.value_; }

private:
    constexpr explicit DegreeBound(int v) : value_(v) {}
    int value_;
};

struct FixedPointResult {
    double x_hat = 0.0;
    double derivative_abs = 0.0;
    int d = 0;
    double residual = 0.0;
};

/// Positive fixed point of f_d by bisection on f_d(x) - x.
FixedPointResult fixed_point(const SpinSystem& s, int d);

struct DegreeCheck {
    int d = 0;
    double derivative_abs = 0.0;
    bool unique = false;
};

struct UniquenessReport {
    bool unique = false;
    /// Explicitly checked degrees in increasing order.
    std::vector<DegreeCheck> checks;
    /// First degree with |f_d'(x_d)| >= 1, if any.
    std::optional<int> violating_d;
    /// Unbounded case: every d >= tail_start satisfies d lambda / gamma^d < 1,
    /// which bounds |f_d'(x_d)| without a fixed-point solve.
    std::optional<int> tail_start;
};

/// Checks |f_d'(x_d)| < 1 for all 1 <= d < delta. Throws InvalidArgument for delta < 2.
UniquenessReport check_uniqueness(const SpinSystem& s, DegreeBound delta);

bool is_unique_up_to(const SpinSystem& s, DegreeBound delta);

/// First d >= 1 from which d lambda / gamma^d < 1 holds for all larger d.
/// Requires gamma > 1.
int uniqueness_tail_start(const SpinSystem& s);

struct DegreeContraction {
    int d = 0;
    double x_max = 0.0;          ///< maximizer of alpha_d
    double alpha_max = 0.0;      ///< alpha_d(x_max)
    double sqrt_derivative = 0.0;  ///< sqrt|f_d'(x_d)| at the fixed point
};

struct ContractionResult {
    double alpha = 0.0;
    int witness_d = 0;
    std::vector<DegreeContraction> per_degree;
    /// Unbounded case: sqrt(d lambda / gamma^d) at the tail start, which bounds
    /// alpha_d for every degree beyond the explicit ones.
    std::optional<double> tail_bound;
    /// Every per-degree maximum sits under its sqrt|f_d'| certificate.
    bool certified = true;
};

/// Unique root in (0, inf) of the stationarity condition of alpha_d.
double alpha_maximizer(const SpinSystem& s, int d);

/// max over x >= 0 of alpha_d(x).
double max_alpha_at_degree(const SpinSystem& s, int d);

/// Contraction rate alpha < 1 valid for all d < delta. Throws PreconditionError
/// naming the first non-unique degree.
ContractionResult contraction_bound(const SpinSystem& s, DegreeBound delta);

enum class ThresholdKind { HardcoreLambda, SoftLambdaPair, GammaCritical, UniversalLambda, Contraction, MConstant };

std::string to_string(ThresholdKind k);

struct ThresholdReport {
    ThresholdKind kind = ThresholdKind::HardcoreLambda;
    std::vector<double> values;
    DegreeBound delta = DegreeBound::unbounded();
    int witness_d = 0;
    /// Second witness for two-sided reports (degree attaining the upper threshold).
    int witness_d_upper = 0;
    /// Soft constraints only: uniqueness holds for every lambda.
    bool all_lambda_unique = false;
};

/// lambda_c(gamma, Delta) = min_{1<d<Delta} gamma^{d+1} d^d / (d-1)^{d+1}.
/// Unique up to Delta iff lambda < lambda_c.
ThresholdReport hardcore_threshold(double gamma, DegreeBound delta);

/// The two positive roots of d(1-beta gamma) x = (beta x + 1)(x + gamma) and
/// the fields lambda_i = x_i ((x_i + gamma)/(beta x_i + 1))^d at which they are fixed points.
struct CriticalRoots {
    double x1 = 0.0;
    double x2 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Defined iff beta > 0 and sqrt(beta gamma) <= (d-1)/(d+1).
std::optional<CriticalRoots> critical_roots(double beta, double gamma, int d);

/// Smallest d with sqrt(beta gamma) <= (d-1)/(d+1).
int first_admissible_degree(double beta, double gamma);

/// Soft constraints (beta > 0): unique up to Delta iff lambda < lambda_c or
/// lambda > lambda_bar_c. values = {lambda_c, lambda_bar_c} unless all_lambda_unique.
ThresholdReport soft_thresholds(double beta, double gamma, int delta);

/// gamma_c such that (beta, gamma, lambda) is unique up to Delta iff gamma in (gamma_c, 1/beta).
ThresholdReport gamma_threshold(double beta, double lambda, DegreeBound delta);

/// lambda_c(beta, gamma) for universal uniqueness; requires beta > 0, gamma > 1.
ThresholdReport universal_lambda_threshold(double beta, double gamma);

/// Smallest M on the grid 1.1, 1.2, ... such that the contraction at degree d
/// is at most alpha^{ceil(log_M(d+1))} for every d. Requires gamma > 1.
double choose_M(const SpinSystem& s, double alpha);

/// ceil(log_M(d+1)), computed without floating-point rounding at exact powers.
int m_depth_increment(double M, int d);

/// Per-degree uniqueness for d = 1..d_max.
std::vector<DegreeCheck> uniqueness_profile(const SpinSystem& s, int d_max);

struct NonMonotoneWitness {
    SpinSystem system;
    int non_unique_d = 0;  ///< d' with |f'| >= 1
    int unique_d = 0;      ///< d > d' with |f'| < 1
};

/// Scans the default grid (beta in 0.05..0.5, gamma in 1.1..8, lambda a
/// multiple 1.01..2 of the universal threshold) for a system that is
/// non-unique at some degree and unique at a larger one.
std::optional<NonMonotoneWitness> find_non_monotone_witness(int d_max = 200);

}  // namespace twospin
