#include "qiline/parse.hpp"

#include <cctype>
#include <cmath>

#include "qiline/errors.hpp"

namespace qiline {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  MapExpr parse() {
    MapExpr m = map();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return m;
  }

  Rational number_only() {
    Rational q = number();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (src_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  Rational decimal() {
    std::size_t start = pos_;
    bool negative = false;
    if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
      negative = src_[pos_] == '-';
      ++pos_;
    }
    BigInt digits = 0;
    int frac_digits = 0;
    bool any = false, dot = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits = digits * 10 + (c - '0');
        if (dot) ++frac_digits;
        any = true;
      } else if (c == '.' && !dot) {
        dot = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (!any) {
      pos_ = start;
      fail("expected a number");
    }
    long exponent = 0;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      bool eneg = false;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) eneg = src_[pos_++] == '-';
      long e = 0;
      bool edigits = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        e = e * 10 + (src_[pos_++] - '0');
        if (e > 100000) fail("exponent out of range");
        edigits = true;
      }
      if (!edigits) {
        pos_ = save;
      } else {
        exponent = eneg ? -e : e;
      }
    }
    exponent -= frac_digits;
    Rational q(digits);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exponent)));
    if (exponent >= 0) {
      q *= scale;
    } else {
      q /= scale;
    }
    return negative ? Rational(-q) : q;
  }

  Rational number() {
    skip_ws();
    std::size_t start = pos_;
    Rational q = decimal();
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '/') {
      ++pos_;
      skip_ws();
      std::size_t den_pos = pos_;
      Rational d = decimal();
      if (d == 0) {
        pos_ = den_pos;
        fail("zero denominator");
      }
      q /= d;
    }
    (void)start;
    return q;
  }

  double real() { return to_double(number()); }

  template <class Fn>
  MapExpr guarded(std::size_t at, Fn&& build) {
    try {
      return build();
    } catch (const InvariantError& e) {
      throw ParseError(at, e.what());
    }
  }

  std::vector<RationalPL::Breakpoint> points(bool stop_at_slopes) {
    std::vector<RationalPL::Breakpoint> pts;
    for (;;) {
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ']') break;
      if (stop_at_slopes && src_.substr(pos_, 6) == "slopes") break;
      Rational x = number();
      expect(":");
      Rational y = number();
      expect(";");
      pts.push_back({std::move(x), std::move(y)});
    }
    if (pts.empty()) fail("expected at least one breakpoint x:y;");
    return pts;
  }

  MapExpr term() {
    skip_ws();
    const std::size_t at = pos_;
    std::string name = identifier();
    if (name.empty()) fail("expected a map term");

    if (name == "id") return MapExpr::identity();
    if (name == "h") return MapExpr::exp_glue();
    if (name == "refl") return MapExpr::reflect();

    if (name == "A") {
      expect("(");
      double t = real();
      expect(")");
      return guarded(at, [&] {
        if (!(t > 0)) throw InvariantError("t must be > 0");
        return MapExpr::affine(t, 0);
      });
    }
    if (name == "a") {
      expect("(");
      double t = real();
      expect(")");
      return guarded(at, [&] {
        if (!(t > 0)) throw InvariantError("t must be > 0");
        return MapExpr::affine(1, std::log(t));
      });
    }
    if (name == "B" || name == "b") {
      expect("(");
      double i = real();
      expect(",");
      double s = real();
      expect(")");
      return guarded(at, [&] {
        return name == "B" ? MapExpr::power_shift(i, s) : MapExpr::log_power(i, s);
      });
    }
    if (name == "logshift") {
      expect("(");
      double s = real();
      expect(")");
      return guarded(at, [&] { return MapExpr::log_shift(s); });
    }
    if (name == "affine") {
      expect("(");
      double a = real();
      expect(",");
      double b = real();
      expect(")");
      return guarded(at, [&] { return MapExpr::affine(a, b); });
    }
    if (name == "pl") {
      expect("[");
      auto pts = points(true);
      expect("slopes");
      expect("(");
      Rational l = number();
      expect(",");
      Rational r = number();
      expect(")");
      expect("]");
      return guarded(at, [&] { return MapExpr::pl(RationalPL(pts, l, r)); });
    }
    if (name == "lift") {
      expect("[");
      auto pts = points(true);
      if (accept("slopes")) {
        // accepted for symmetry with pl[...]; a lift's end slopes are implied
        expect("(");
        number();
        expect(",");
        number();
        expect(")");
      }
      expect("]");
      return guarded(at, [&] {
        if (pts.front().x != 0 || pts.back().x != 1)
          throw InvariantError("lift breakpoints must start at x = 0 and end at x = 1");
        if (pts.size() < 2) throw InvariantError("lift needs breakpoints at 0 and 1");
        Rational first = (pts[1].y - pts[0].y) / (pts[1].x - pts[0].x);
        const auto n = pts.size();
        Rational last = (pts[n - 1].y - pts[n - 2].y) / (pts[n - 1].x - pts[n - 2].x);
        return MapExpr::periodic_lift(RationalPL(pts, first, last));
      });
    }
    if (name == "inv") {
      expect("(");
      MapExpr inner = map();
      expect(")");
      return guarded(at, [&] { return MapExpr::inverse(inner); });
    }
    if (name == "ext") {
      expect("(");
      MapExpr inner = map();
      expect(",");
      double glue = real();
      expect(")");
      return guarded(at, [&] { return MapExpr::extend(inner, glue); });
    }
    if (name == "diag") {
      expect("[");
      std::vector<ChartInterval> charts;
      while (!accept("]")) {
        double lo = real();
        expect(",");
        double hi = real();
        expect(";");
        charts.push_back({lo, hi});
      }
      expect("(");
      MapExpr inner = map();
      expect(")");
      return guarded(at, [&] { return MapExpr::diagonal(charts, inner); });
    }
    pos_ = at;
    fail("unknown map term '" + name + "'");
  }

  MapExpr map() {
    MapExpr acc = term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (!accept("*")) break;
      MapExpr rhs = term();
      acc = guarded(at, [&] { return MapExpr::compose(acc, rhs); });
    }
    return acc;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

MapExpr parse_map(std::string_view src) { return Parser(src).parse(); }

Rational parse_number(std::string_view text) { return Parser(text).number_only(); }

}  // namespace qiline
