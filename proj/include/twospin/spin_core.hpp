#pragma once

// Parameters of a two-state spin system and the tree recursion underlying
// every estimate in this library.
//
// Normalization: a blue-green edge and a green vertex have weight 1, so the
// system is fully described by (beta, gamma, lambda). The blue/green ratio
// R = p / (1 - p) at the root of a tree obeys
//
//     R = lambda_v * prod_i (beta R_i + 1) / (R_i + gamma)
//
// over the children i.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace twospin {

struct SpinSystem {
    double beta = 0.0;
    double gamma = 1.0;
    double lambda = 1.0;

    static SpinSystem hardcore(double lambda) { return {0.0, 1.0, lambda}; }
    static SpinSystem ising(double b, double lambda) { return {b, b, lambda}; }
};

enum class SpinClass { AntiFerromagnetic, Ferromagnetic, Degenerate };

std::string to_string(SpinClass c);

struct Classification {
    SpinClass kind;
    /// True when beta > gamma on input and the two spins were exchanged.
    bool swapped;
    /// The system after the exchange, with beta <= gamma. Fields are inverted
    /// when swapped (lambda -> 1/lambda).
    SpinSystem normalized;
};

/// Throws InvalidParameter on negative weights or lambda <= 0.
Classification classify(const SpinSystem& s);

bool is_antiferromagnetic(const SpinSystem& s);

/// Throws InvalidParameter unless `s` is anti-ferromagnetic with beta <= gamma.
void require_antiferromagnetic(const SpinSystem& s);

/// Element of [0, +inf]. Infinity is a tag, never a floating-point inf, so the
/// limit (beta R + 1)/(R + gamma) -> beta is applied exactly.
class ExtendedRatio {
public:
    constexpr ExtendedRatio() = default;

    static constexpr ExtendedRatio finite(double v) { return ExtendedRatio(v, false); }
    static constexpr ExtendedRatio infinity() { return ExtendedRatio(0.0, true); }
    static constexpr ExtendedRatio zero() { return ExtendedRatio(0.0, false); }
    /// Ratio of a blue probability; p == 1 maps to infinity.
    static ExtendedRatio from_probability(double p);

    constexpr bool is_infinite() const { return infinite_; }
    /// Finite value; throws DomainError when infinite.
    double value() const;
    /// Finite value or +inf as a double, for printing and comparisons.
    double as_double() const;
    /// p = R / (1 + R), 1 at infinity.
    double probability() const;

    friend std::partial_ordering operator<=>(const ExtendedRatio& a, const ExtendedRatio& b);
    friend bool operator==(const ExtendedRatio& a, const ExtendedRatio& b);

private:
    constexpr ExtendedRatio(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_ = 0.0;
    bool infinite_ = false;
};

/// (beta r + 1) / (r + gamma); beta at r = inf.
double edge_factor(const SpinSystem& s, ExtendedRatio r);

/// lambda_v * prod edge_factor(children). Empty product is 1. Degrees above 32
/// accumulate in log space.
ExtendedRatio recursion_f(const SpinSystem& s, double lambda_v,
                          std::span<const ExtendedRatio> children);

/// f_d(x) = lambda ((beta x + 1)/(x + gamma))^d.
double symmetric_f(const SpinSystem& s, int d, double x);

/// log f_d(x); finite even when f_d under- or overflows. -inf only if the
/// factor itself is 0 (beta = 0 and x = inf never reaches here).
double log_symmetric_f(const SpinSystem& s, int d, double x);

/// Phi(R) = 1 / sqrt(R (beta R + 1)(R + gamma)).
double potential_phi(const SpinSystem& s, double r);

/// Amortized contraction rate alpha(d; x_1..x_d) of one recursion step
/// measured in the potential Phi. Empty input yields 0.
double alpha(const SpinSystem& s, std::span<const double> xs);

/// alpha(d; x, ..., x).
double alpha_sym(const SpinSystem& s, int d, double x);

/// |f_d'(x)| written in the fixed-point form d(1-beta gamma) x / ((beta x+1)(x+gamma)).
/// Equals the true derivative only at the fixed point of f_d.
double fixed_point_derivative(const SpinSystem& s, int d, double x);

}  // namespace twospin
