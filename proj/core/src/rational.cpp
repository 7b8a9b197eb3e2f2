#include "tout/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "tout/error.hpp"

namespace tout {

namespace {

WideInt gcd128(WideInt a, WideInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    WideInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(std::int64_t numerator) : num_(numerator), den_(1) {}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  *this = from_wide(numerator, denominator);
}

Rational Rational::from_wide(WideInt numerator, WideInt denominator) {
  if (denominator == 0) throw ArithmeticError("division by zero");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  const WideInt g = gcd128(numerator, denominator);
  if (g > 1) {
    numerator /= g;
    denominator /= g;
  }
  constexpr WideInt kMax = std::numeric_limits<std::int64_t>::max();
  if (numerator > kMax || numerator < -kMax || denominator > kMax) {
    throw ArithmeticError("rational overflow");
  }
  Rational r;
  r.num_ = static_cast<std::int64_t>(numerator);
  r.den_ = static_cast<std::int64_t>(denominator);
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<WideInt>(a.num_) * b.den_ + static_cast<WideInt>(b.num_) * a.den_,
                             static_cast<WideInt>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<WideInt>(a.num_) * b.den_ - static_cast<WideInt>(b.num_) * a.den_,
                             static_cast<WideInt>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<WideInt>(a.num_) * b.num_, static_cast<WideInt>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw ArithmeticError("division by zero");
  return Rational::from_wide(static_cast<WideInt>(a.num_) * b.den_, static_cast<WideInt>(a.den_) * b.num_);
}

Rational Rational::operator-() const { return from_wide(-static_cast<WideInt>(num_), den_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const WideInt lhs = static_cast<WideInt>(a.num_) * b.den_;
  const WideInt rhs = static_cast<WideInt>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::parse(std::string_view text) {
  auto read = [](std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  const auto slash = text.find('/');
  std::int64_t num = 0;
  std::int64_t den = 1;
  if (slash == std::string_view::npos) {
    if (!read(text, num)) return std::nullopt;
  } else {
    std::string_view den_text = text.substr(slash + 1);
    if (!read(text.substr(0, slash), num) || den_text.starts_with('-') || !read(den_text, den) || den == 0) {
      return std::nullopt;
    }
  }
  try {
    return Rational(num, den);
  } catch (const ArithmeticError&) {
    return std::nullopt;
  }
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace tout
