#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/rational.hpp>

#include "ultraheat/rng.hpp"

namespace ultraheat {

using Rational = boost::rational<std::int64_t>;

/// Default number of known digit positions carried by p-adic values.
inline constexpr int kDefaultPadicPrecision = 32;

bool is_prime(std::int64_t m);

/// p-adic number with a finite digit budget.
///
/// The value is sum_k digit(k) p^k for valuation <= k < precision; positions at
/// or above `precision` are unknown and every operation truncates there. Digits
/// are stored from the valuation up to the highest nonzero known position, so
/// the first stored digit is nonzero unless the value is the exact zero.
class PAdic {
public:
    static PAdic zero(int prime, int precision);
    static PAdic from_integer(std::int64_t m, int prime, int precision);
    /// Builds sum_k digits[k] p^(lowest + k); digits are normalised (leading zeros
    /// shift the valuation, positions >= precision are dropped).
    static PAdic from_digits(int prime, int lowest, const std::vector<int>& digits, int precision);

    int prime() const noexcept { return prime_; }
    int valuation() const noexcept { return valuation_; }
    int precision() const noexcept { return precision_; }
    bool is_zero() const noexcept { return digits_.empty(); }
    const std::vector<int>& digits() const noexcept { return digits_; }

    /// Digit at absolute position k (0 below the valuation or above the stored range).
    int digit(int k) const noexcept;

    /// sum of digits at positions [0, count) as an integer (the residue mod p^count).
    std::uint64_t residue(int count) const;

    PAdic operator-() const;
    PAdic operator+(const PAdic& other) const;
    PAdic operator-(const PAdic& other) const;
    /// Multiplication by a nonnegative machine integer.
    PAdic scaled(std::int64_t factor) const;
    /// Multiplication by p^k (shifts valuation and precision together).
    PAdic shifted(int k) const;
    /// Same value truncated to a smaller (or equal) precision.
    PAdic truncated(int precision) const;

    bool operator==(const PAdic& other) const = default;

private:
    PAdic(int prime, int valuation, std::vector<int> digits, int precision);
    void normalise();

    int prime_ = 2;
    int valuation_ = 0;
    std::vector<int> digits_;
    int precision_ = kDefaultPadicPrecision;
};

/// |x|_p = p^(-valuation), 0 for zero.
Rational padic_abs(const PAdic& x);
double padic_abs_value(const PAdic& x);

/// sum_{k = valuation}^{-1} d_k p^k, exact; 0 when the valuation is nonnegative.
Rational fractional_part(const PAdic& x);

/// exp(2 pi i q) with exact values at quarter turns.
std::complex<double> unit_circle(const Rational& q);

/// chi_p(x) = exp(2 pi i {x}_p).
std::complex<double> additive_character(const PAdic& x);

/// Closed ball {x : |x - center|_p <= p^(-radius_exponent)} with canonical center.
class Ball {
public:
    Ball(const PAdic& center, int radius_exponent);

    const PAdic& center() const noexcept { return center_; }
    int radius_exponent() const noexcept { return radius_exponent_; }
    /// Haar volume p^(-r) with the unit ball normalised to 1.
    double volume() const;
    bool contains(const PAdic& x) const;
    bool contains(const Ball& other) const;
    bool disjoint(const Ball& other) const;

    bool operator==(const Ball& other) const = default;

private:
    PAdic center_;
    int radius_exponent_;
};

/// Embedding of vertices 0..n-1 as the p-adic integers with base-p digits of k.
struct Embedding {
    int vertices = 0;
    int prime = 2;
    int level = 0;
    int precision = kDefaultPadicPrecision;
    std::vector<PAdic> centers;

    Ball ball(int vertex) const { return Ball(centers.at(vertex), level); }
    /// Vertex whose ball contains x, or nothing when x lies outside K_N.
    std::optional<int> vertex_of(const PAdic& x) const;
    /// Haar volume of K_N, n p^(-N).
    double volume() const;
};

Embedding vertex_embedding(int n, int prime, std::optional<int> level_override = std::nullopt,
                           int precision = kDefaultPadicPrecision);

/// Canonical centers of the p^(r-N) sub-balls of radius p^(-r) inside B_{p^-N}(center),
/// ordered lexicographically by the added digits (a_N, ..., a_{r-1}).
std::vector<PAdic> subball_centers(const PAdic& center, int level, int r);

/// Haar-uniform point of `ball` resolved down to position `depth` - 1.
PAdic sample_uniform(const Ball& ball, int depth, RngStream& rng);

}  // namespace ultraheat
