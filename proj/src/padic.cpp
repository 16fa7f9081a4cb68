#include "ultraheat/padic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ultraheat/errors.hpp"

namespace ultraheat {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw ValidationError("p-adic value exceeds 64-bit range");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw ValidationError("p-adic value exceeds 64-bit range");
    return out;
}

void require_prime(std::int64_t p) {
    if (!is_prime(p)) throw ValidationError("p-adic prime must be prime, got " + std::to_string(p));
}

}  // namespace

bool is_prime(std::int64_t m) {
    if (m < 2) return false;
    for (std::int64_t d = 2; d * d <= m; ++d) {
        if (m % d == 0) return false;
    }
    return true;
}

PAdic::PAdic(int prime, int valuation, std::vector<int> digits, int precision)
    : prime_(prime), valuation_(valuation), digits_(std::move(digits)), precision_(precision) {
    normalise();
}

void PAdic::normalise() {
    // Drop unknown positions, then strip zeros from both ends.
    const int known = precision_ - valuation_;
    if (known <= 0) {
        digits_.clear();
    } else if (static_cast<int>(digits_.size()) > known) {
        digits_.resize(static_cast<std::size_t>(known));
    }
    std::size_t lead = 0;
    while (lead < digits_.size() && digits_[lead] == 0) ++lead;
    if (lead == digits_.size()) {
        digits_.clear();
        valuation_ = precision_;
        return;
    }
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<std::ptrdiff_t>(lead));
    valuation_ += static_cast<int>(lead);
    while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
}

PAdic PAdic::zero(int prime, int precision) {
    require_prime(prime);
    return PAdic(prime, precision, {}, precision);
}

PAdic PAdic::from_integer(std::int64_t m, int prime, int precision) {
    require_prime(prime);
    if (precision < 1) throw ValidationError("p-adic precision must be >= 1");
    std::vector<int> digits;
    digits.reserve(static_cast<std::size_t>(precision));
    for (int k = 0; k < precision; ++k) {
        std::int64_t d = m % prime;
        if (d < 0) d += prime;
        digits.push_back(static_cast<int>(d));
        // floor division keeps negative values in p-complement form
        m = (m - d) / prime;
    }
    return PAdic(prime, 0, std::move(digits), precision);
}

PAdic PAdic::from_digits(int prime, int lowest, const std::vector<int>& digits, int precision) {
    require_prime(prime);
    for (int d : digits) {
        if (d < 0 || d >= prime) throw ValidationError("p-adic digit out of range: " + std::to_string(d));
    }
    return PAdic(prime, lowest, digits, precision);
}

int PAdic::digit(int k) const noexcept {
    const int offset = k - valuation_;
    if (offset < 0 || offset >= static_cast<int>(digits_.size())) return 0;
    return digits_[static_cast<std::size_t>(offset)];
}

std::uint64_t PAdic::residue(int count) const {
    if (count > precision_) throw ValidationError("residue requested beyond known precision");
    std::uint64_t value = 0;
    std::uint64_t power = 1;
    for (int k = 0; k < count; ++k) {
        const auto d = static_cast<std::uint64_t>(digit(k));
        if (d != 0) {
            if (power > std::numeric_limits<std::uint64_t>::max() / d) throw ValidationError("residue overflow");
            value += d * power;
        }
        if (k + 1 < count) {
            if (power > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(prime_))
                throw ValidationError("residue overflow");
            power *= static_cast<std::uint64_t>(prime_);
        }
    }
    return value;
}

PAdic PAdic::operator-() const { return zero(prime_, precision_) - *this; }

PAdic PAdic::operator+(const PAdic& other) const {
    if (other.prime_ != prime_) throw ValidationError("p-adic prime mismatch");
    const int precision = std::min(precision_, other.precision_);
    const int lo = std::min(valuation_, other.valuation_);
    std::vector<int> out;
    int carry = 0;
    for (int k = lo; k < precision; ++k) {
        int d = digit(k) + other.digit(k) + carry;
        carry = d / prime_;
        out.push_back(d % prime_);
    }
    return PAdic(prime_, lo, std::move(out), precision);
}

PAdic PAdic::operator-(const PAdic& other) const {
    if (other.prime_ != prime_) throw ValidationError("p-adic prime mismatch");
    const int precision = std::min(precision_, other.precision_);
    const int lo = std::min(valuation_, other.valuation_);
    std::vector<int> out;
    int borrow = 0;
    for (int k = lo; k < precision; ++k) {
        int d = digit(k) - other.digit(k) - borrow;
        borrow = 0;
        if (d < 0) {
            d += prime_;
            borrow = 1;
        }
        out.push_back(d);
    }
    return PAdic(prime_, lo, std::move(out), precision);
}

PAdic PAdic::scaled(std::int64_t factor) const {
    if (factor < 0) throw ValidationError("scaled() expects a nonnegative factor");
    if (factor > (std::int64_t{1} << 31)) throw ValidationError("scale factor too large");
    std::vector<int> out;
    std::int64_t carry = 0;
    for (int k = valuation_; k < precision_; ++k) {
        const std::int64_t v = static_cast<std::int64_t>(digit(k)) * factor + carry;
        out.push_back(static_cast<int>(v % prime_));
        carry = v / prime_;
    }
    return PAdic(prime_, valuation_, std::move(out), precision_);
}

PAdic PAdic::shifted(int k) const {
    if (is_zero()) return PAdic(prime_, precision_ + k, {}, precision_ + k);
    return PAdic(prime_, valuation_ + k, digits_, precision_ + k);
}

PAdic PAdic::truncated(int precision) const {
    return PAdic(prime_, valuation_, digits_, std::min(precision, precision_));
}

Rational padic_abs(const PAdic& x) {
    if (x.is_zero()) return Rational(0);
    std::int64_t power = 1;
    for (int k = 0; k < std::abs(x.valuation()); ++k) power = checked_mul(power, x.prime());
    return x.valuation() >= 0 ? Rational(1, power) : Rational(power);
}

double padic_abs_value(const PAdic& x) {
    if (x.is_zero()) return 0.0;
    return std::pow(static_cast<double>(x.prime()), -x.valuation());
}

Rational fractional_part(const PAdic& x) {
    if (x.is_zero() || x.valuation() >= 0) return Rational(0);
    std::int64_t numerator = 0;
    std::int64_t power = 1;
    for (int k = x.valuation(); k < 0; ++k) {
        numerator = checked_add(numerator, checked_mul(x.digit(k), power));
        power = checked_mul(power, x.prime());
    }
    return Rational(numerator, power);
}

std::complex<double> unit_circle(const Rational& q) {
    std::int64_t num = q.numerator() % q.denominator();
    const std::int64_t den = q.denominator();
    if (num < 0) num += den;
    if (num == 0) return {1.0, 0.0};
    if (2 * num == den) return {-1.0, 0.0};
    if (4 * num == den) return {0.0, 1.0};
    if (4 * num == 3 * den) return {0.0, -1.0};
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
    return std::polar(1.0, angle);
}

std::complex<double> additive_character(const PAdic& x) { return unit_circle(fractional_part(x)); }

Ball::Ball(const PAdic& center, int radius_exponent) : center_(center), radius_exponent_(radius_exponent) {
    if (center.precision() < radius_exponent) throw ValidationError("ball center has fewer digits than its radius");
    std::vector<int> kept;
    const int lowest = center.valuation();
    for (int k = lowest; k < radius_exponent; ++k) kept.push_back(center.digit(k));
    center_ = PAdic::from_digits(center.prime(), lowest, kept, center.precision());
}

double Ball::volume() const { return std::pow(static_cast<double>(center_.prime()), -radius_exponent_); }

bool Ball::contains(const PAdic& x) const {
    if (x.precision() < radius_exponent_) throw ValidationError("point has fewer digits than the ball radius");
    const PAdic diff = x - center_;
    return diff.is_zero() || diff.valuation() >= radius_exponent_;
}

bool Ball::contains(const Ball& other) const {
    return other.radius_exponent_ >= radius_exponent_ && contains(other.center_);
}

bool Ball::disjoint(const Ball& other) const { return !contains(other) && !other.contains(*this); }

std::optional<int> Embedding::vertex_of(const PAdic& x) const {
    if (!x.is_zero() && x.valuation() < 0) return std::nullopt;
    const std::uint64_t k = x.residue(level);
    if (k >= static_cast<std::uint64_t>(vertices)) return std::nullopt;
    return static_cast<int>(k);
}

double Embedding::volume() const { return vertices * std::pow(static_cast<double>(prime), -level); }

Embedding vertex_embedding(int n, int prime, std::optional<int> level_override, int precision) {
    require_prime(prime);
    if (n < 1) throw ValidationError("graph needs at least one vertex");
    int level = 0;
    std::int64_t capacity = 1;
    while (capacity < n) {
        capacity *= prime;
        ++level;
    }
    if (level_override) {
        if (*level_override < 0) throw ValidationError("level must be nonnegative");
        std::int64_t cap = 1;
        for (int k = 0; k < *level_override && cap < n; ++k) cap *= prime;
        if (cap < n) {
            throw ValidationError("level " + std::to_string(*level_override) + " too small: p^N < n for n = " +
                                  std::to_string(n));
        }
        level = *level_override;
    }
    if (precision <= level) throw ValidationError("p-adic precision must exceed the level N");
    Embedding e;
    e.vertices = n;
    e.prime = prime;
    e.level = level;
    e.precision = precision;
    e.centers.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) e.centers.push_back(PAdic::from_integer(k, prime, precision));
    return e;
}

std::vector<PAdic> subball_centers(const PAdic& center, int level, int r) {
    if (r < level) throw ValidationError("sub-ball radius exponent must be >= level");
    const int p = center.prime();
    const PAdic base = Ball(center, level).center();
    std::int64_t count = 1;
    for (int k = level; k < r; ++k) count = checked_mul(count, p);
    std::vector<PAdic> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> extra(static_cast<std::size_t>(r - level));
    for (std::int64_t idx = 0; idx < count; ++idx) {
        std::int64_t rest = idx;
        for (int k = r - 1; k >= level; --k) {
            extra[static_cast<std::size_t>(k - level)] = static_cast<int>(rest % p);
            rest /= p;
        }
        out.push_back(base + PAdic::from_digits(p, level, extra, base.precision()));
    }
    return out;
}

PAdic sample_uniform(const Ball& ball, int depth, RngStream& rng) {
    const int r = ball.radius_exponent();
    if (depth <= r) throw ValidationError("sampling depth must exceed the ball radius exponent");
    const PAdic& c = ball.center();
    const int p = c.prime();
    const int lowest = std::min(c.valuation(), r);
    std::vector<int> digits;
    for (int k = lowest; k < depth; ++k) {
        digits.push_back(k < r ? c.digit(k) : static_cast<int>(rng.below(static_cast<std::uint64_t>(p))));
    }
    return PAdic::from_digits(p, lowest, digits, depth);
}

}  // namespace ultraheat
