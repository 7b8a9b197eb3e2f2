#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace tout {

__extension__ using WideInt = __int128;

/// Exact fraction kept in lowest terms with a positive denominator.
/// Operations throw ArithmeticError on division by zero or 64-bit overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t numerator);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t numerator, std::int64_t denominator);

  std::int64_t numerator() const noexcept { return num_; }
  std::int64_t denominator() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// "n" or "n/d".
  std::string to_string() const;
  /// Parses "n", "-n" or "n/d"; nullopt on anything else.
  static std::optional<Rational> parse(std::string_view text);

 private:
  static Rational from_wide(WideInt numerator, WideInt denominator);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace tout
