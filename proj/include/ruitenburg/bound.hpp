#pragma once

// Non-negative integers that may be far too large to materialize, such as the
// iterated exponentials produced by class-count recurrences.
//
// A value is either an exact integer or `base + coef * 2^exp` where exp is
// itself a BigBound. Values are exact in both forms; only their decimal
// rendering is abbreviated.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <memory>
#include <stdexcept>
#include <string>

namespace ruitenburg {

class BigBound {
public:
    using Int = boost::multiprecision::cpp_int;

    // Exact values up to this many bits are materialized.
    static constexpr std::size_t kExactBits = std::size_t{1} << 20;

    BigBound() = default;
    BigBound(Int exact) : base_(std::move(exact)) {}  // NOLINT: numeric literal convenience
    BigBound(long long exact) : base_(exact) {}       // NOLINT

    bool isExact() const noexcept { return exp_ == nullptr; }
    // Only meaningful when isExact().
    const Int& exact() const {
        if (!isExact()) throw std::logic_error("BigBound: value is not materialized");
        return base_;
    }

    // coef * 2^e
    static BigBound timesPow2(const Int& coef, const BigBound& e) {
        if (coef == 0) return BigBound(0);
        if (e.isExact() && e.base_ <= Int(kExactBits) && msb(coef) + e.base_.convert_to<std::size_t>() <= kExactBits) {
            return BigBound(Int(coef << e.base_.convert_to<std::size_t>()));
        }
        BigBound out;
        out.coef_ = coef;
        out.exp_ = std::make_shared<const BigBound>(e);
        return out;
    }

    BigBound operator+(const Int& k) const {
        BigBound out = *this;
        out.base_ += k;
        return out;
    }

    BigBound operator*(const Int& k) const {
        if (isExact()) return BigBound(Int(base_ * k));
        BigBound out = *this;
        out.base_ *= k;
        out.coef_ *= k;
        return out;
    }

    BigBound squared() const {
        if (isExact()) {
            if (2 * msb(base_) <= kExactBits) return BigBound(Int(base_ * base_));
            // b^2 = b^2 / 2^s * 2^s is not exact in general, so keep the square symbolic
            // through the exponent of its top bit only when b is a power of two times coef.
            auto shift = lsb(base_);
            Int odd = base_ >> shift;
            return timesPow2(Int(odd * odd), BigBound(Int(2 * shift)));
        }
        if (base_ != 0) throw std::logic_error("BigBound: squaring a value with a nonzero base is unsupported");
        return timesPow2(Int(coef_ * coef_), *exp_ * 2);
    }

    friend std::strong_ordering operator<=>(const BigBound& a, const BigBound& b) {
        if (a.isExact() && b.isExact()) return cmp(a.base_, b.base_);
        // A symbolic value exceeds every materialized one.
        if (a.isExact()) return std::strong_ordering::less;
        if (b.isExact()) return std::strong_ordering::greater;
        if (auto c = *a.exp_ <=> *b.exp_; c != 0) {
            if (a.exp_->isExact() && b.exp_->isExact()) {
                // coef_a * 2^ea vs coef_b * 2^eb with both exponents known exactly.
                const Int& ea = a.exp_->base_;
                const Int& eb = b.exp_->base_;
                Int gap = ea > eb ? Int(ea - eb) : Int(eb - ea);
                const Int& small = ea > eb ? b.coef_ : a.coef_;
                if (gap > Int(msb(small) + 1)) return c;
                auto g = gap.convert_to<std::size_t>();
                Int lhs = ea > eb ? Int(a.coef_ << g) : a.coef_;
                Int rhs = ea > eb ? b.coef_ : Int(b.coef_ << g);
                if (auto d = cmp(lhs, rhs); d != 0) return d;
                return cmp(a.base_, b.base_);
            }
            // Exponents differ by an astronomically large amount relative to the coefficients.
            return c;
        }
        if (auto c = cmp(a.coef_, b.coef_); c != 0) return c;
        return cmp(a.base_, b.base_);
    }
    friend bool operator==(const BigBound& a, const BigBound& b) { return (a <=> b) == 0; }

    std::string toString() const {
        if (isExact()) {
            std::string digits = base_.str();
            if (digits.size() <= 80) return digits;
            return "2^" + std::to_string(msb(base_)) + "*~" + digits.substr(0, 6) + "... (" +
                   std::to_string(digits.size()) + " digits)";
        }
        std::string s;
        if (base_ != 0) s += base_.str() + " + ";
        if (coef_ != 1) s += coef_.str() + "*";
        return s + "2^(" + exp_->toString() + ")";
    }

private:
    static std::size_t msb(const Int& v) { return v == 0 ? 0 : boost::multiprecision::msb(v) + 1; }
    static std::size_t lsb(const Int& v) { return v == 0 ? 0 : boost::multiprecision::lsb(v); }
    static std::strong_ordering cmp(const Int& a, const Int& b) {
        return a < b ? std::strong_ordering::less : (a > b ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    Int base_ = 0;
    Int coef_ = 0;
    std::shared_ptr<const BigBound> exp_;
};

}  // namespace ruitenburg
