#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace elliptica {

using ScalarFn = std::function<double(double)>;

enum class SignKind { Nonnegative, NonnegativeThenNonpositive, SignChanging, Nonpositive };

struct SignClass {
  SignKind kind = SignKind::SignChanging;
  double z = 0.0;  // switch point for NonnegativeThenNonpositive

  static SignClass nonnegative() { return {SignKind::Nonnegative, 0.0}; }
  static SignClass nonpositive() { return {SignKind::Nonpositive, 0.0}; }
  static SignClass sign_changing() { return {SignKind::SignChanging, 0.0}; }
  static SignClass nonnegative_then_nonpositive(double z) {
    return {SignKind::NonnegativeThenNonpositive, z};
  }
};

inline const char* to_string(SignKind k) {
  switch (k) {
    case SignKind::Nonnegative: return "Nonnegative";
    case SignKind::NonnegativeThenNonpositive: return "NonnegativeThenNonpositive";
    case SignKind::SignChanging: return "SignChanging";
    case SignKind::Nonpositive: return "Nonpositive";
  }
  return "?";
}

// C1 covers (t+)^p with 1 < p < 2, whose derivative is only Holder.
enum class Smoothness { C1, C11, C21, C31 };

inline const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C1: return "C1";
    case Smoothness::C11: return "C11";
    case Smoothness::C21: return "C21";
    case Smoothness::C31: return "C31";
  }
  return "?";
}

enum class BuiltinKind { Exp, Power, Truncated, AllenCahn, Constant, Custom };

struct Nonlinearity {
  std::string name;
  ScalarFn eval;
  ScalarFn deriv1;
  std::optional<ScalarFn> deriv2;
  std::optional<ScalarFn> deriv3;
  SignClass sign_class;
  std::vector<double> zeros;
  Smoothness smoothness = Smoothness::C31;
  std::pair<double, double> declared_range{-4.0, 4.0};
  std::vector<double> kinks;  // points where some listed derivative is not smooth

  BuiltinKind kind = BuiltinKind::Custom;
  double p = 0.0;     // Power / Truncated exponent
  double beta = 0.0;  // Truncated shift
  double c = 0.0;     // Constant value

  double operator()(double t) const { return eval(t); }
};

namespace detail {

inline double pos_pow(double t, double q) { return t > 0.0 ? std::pow(t, q) : 0.0; }

inline Smoothness power_smoothness(double p) {
  if (p >= 4.0) return Smoothness::C31;
  if (p >= 3.0) return Smoothness::C21;
  if (p >= 2.0) return Smoothness::C11;
  return Smoothness::C1;
}

// (t - shift)_+^p with derivatives; shift = 0 gives the power nonlinearity.
inline void fill_shifted_power(Nonlinearity& f, double p, double shift) {
  f.eval = [p, shift](double t) { return pos_pow(t - shift, p); };
  f.deriv1 = [p, shift](double t) { return p * pos_pow(t - shift, p - 1.0); };
  if (p >= 2.0)
    f.deriv2 = [p, shift](double t) { return p * (p - 1.0) * pos_pow(t - shift, p - 2.0); };
  if (p >= 3.0)
    f.deriv3 = [p, shift](double t) {
      return p * (p - 1.0) * (p - 2.0) * pos_pow(t - shift, p - 3.0);
    };
  f.smoothness = power_smoothness(p);
  f.sign_class = SignClass::nonnegative();
  f.kinks = {shift};
}

}  // namespace detail

inline Nonlinearity make_exp() {
  Nonlinearity f;
  f.name = "exp";
  f.kind = BuiltinKind::Exp;
  f.eval = [](double t) { return std::exp(t); };
  f.deriv1 = f.eval;
  f.deriv2 = f.eval;
  f.deriv3 = f.eval;
  f.sign_class = SignClass::nonnegative();
  f.smoothness = Smoothness::C31;
  f.declared_range = {-20.0, 20.0};
  return f;
}

/// f(t) = (t+)^p. Extended by zero for t < 0 so that the sign class is honest.
inline Nonlinearity make_power(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("power nonlinearity needs p > 1");
  Nonlinearity f;
  f.name = "power:" + std::to_string(p);
  f.kind = BuiltinKind::Power;
  f.p = p;
  detail::fill_shifted_power(f, p, 0.0);
  f.zeros = {0.0};
  f.declared_range = {-2.0, 4.0};
  return f;
}

inline Nonlinearity make_truncated(double p, double beta) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("truncated nonlinearity needs p > 1");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("truncated nonlinearity needs beta > 0");
  Nonlinearity f;
  f.name = "truncated:" + std::to_string(p) + ":" + std::to_string(beta);
  f.kind = BuiltinKind::Truncated;
  f.p = p;
  f.beta = beta;
  detail::fill_shifted_power(f, p, beta);
  f.zeros = {0.0, beta};
  f.declared_range = {-2.0, beta + 4.0};
  return f;
}

inline Nonlinearity make_allen_cahn() {
  Nonlinearity f;
  f.name = "allen-cahn";
  f.kind = BuiltinKind::AllenCahn;
  f.eval = [](double t) { return t - t * t * t; };
  f.deriv1 = [](double t) { return 1.0 - 3.0 * t * t; };
  f.deriv2 = [](double t) { return -6.0 * t; };
  f.deriv3 = [](double) { return -6.0; };
  f.sign_class = SignClass::sign_changing();
  f.zeros = {-1.0, 0.0, 1.0};
  f.smoothness = Smoothness::C31;
  f.declared_range = {-3.0, 3.0};
  return f;
}

inline Nonlinearity make_constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("constant nonlinearity needs a finite value");
  Nonlinearity f;
  f.name = "constant:" + std::to_string(c);
  f.kind = BuiltinKind::Constant;
  f.c = c;
  f.eval = [c](double) { return c; };
  f.deriv1 = [](double) { return 0.0; };
  f.deriv2 = f.deriv1;
  f.deriv3 = f.deriv1;
  f.sign_class = c >= 0.0 ? SignClass::nonnegative() : SignClass::nonpositive();
  if (c == 0.0) f.zeros = {0.0};
  f.smoothness = Smoothness::C31;
  return f;
}

/// Wraps user callables. No derivative is synthesised: deriv1 is required.
inline Nonlinearity make_custom(std::string name, ScalarFn eval, ScalarFn deriv1,
                                SignClass sign, std::vector<double> zeros,
                                std::pair<double, double> range,
                                Smoothness smooth = Smoothness::C31) {
  if (!eval || !deriv1) throw std::invalid_argument("custom nonlinearity needs eval and deriv1");
  Nonlinearity f;
  f.name = std::move(name);
  f.eval = std::move(eval);
  f.deriv1 = std::move(deriv1);
  f.sign_class = sign;
  f.zeros = std::move(zeros);
  f.declared_range = range;
  f.smoothness = smooth;
  return f;
}

/// f(t) = t(1 - t), the logistic (KPP) reaction term.
inline Nonlinearity make_logistic() {
  auto f = make_custom(
      "logistic", [](double t) { return t * (1.0 - t); }, [](double t) { return 1.0 - 2.0 * t; },
      SignClass::sign_changing(), {0.0, 1.0}, {-1.0, 2.0});
  f.deriv2 = [](double) { return -2.0; };
  f.deriv3 = [](double) { return 0.0; };
  return f;
}

inline Nonlinearity make_sine() {
  using std::numbers::pi;
  auto f = make_custom(
      "sine", [](double t) { return std::sin(pi * t); },
      [](double t) { return pi * std::cos(pi * t); }, SignClass::sign_changing(),
      {-1.0, 0.0, 1.0}, {-2.0, 2.0});
  f.deriv2 = [](double t) { return -pi * pi * std::sin(pi * t); };
  f.deriv3 = [](double t) { return -pi * pi * pi * std::cos(pi * t); };
  return f;
}

enum class BuiltinName { Exp, Power, Truncated, AllenCahn, Constant };

struct BuiltinSpec {
  BuiltinName name = BuiltinName::Exp;
  double p = 0.0;
  double beta = 0.0;
  double c = 0.0;
};

inline Nonlinearity make_builtin_nonlinearity(const BuiltinSpec& s) {
  switch (s.name) {
    case BuiltinName::Exp: return make_exp();
    case BuiltinName::Power: return make_power(s.p);
    case BuiltinName::Truncated: return make_truncated(s.p, s.beta);
    case BuiltinName::AllenCahn: return make_allen_cahn();
    case BuiltinName::Constant: return make_constant(s.c);
  }
  throw std::invalid_argument("unknown builtin nonlinearity");
}

/// Parses "exp", "power:7", "truncated:2:1", "allen-cahn", "constant:6", "logistic", "sine".
inline Nonlinearity parse_nonlinearity(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  auto num = [&](std::size_t i) {
    if (i >= parts.size()) throw std::invalid_argument("missing parameter in '" + spec + "'");
    std::size_t used = 0;
    double v = std::stod(parts[i], &used);
    if (used != parts[i].size()) throw std::invalid_argument("bad number in '" + spec + "'");
    return v;
  };
  auto expect = [&](std::size_t n) {
    if (parts.size() != n) throw std::invalid_argument("wrong parameter count in '" + spec + "'");
  };
  const std::string& head = parts[0];
  if (head == "exp") { expect(1); return make_exp(); }
  if (head == "power") { expect(2); return make_power(num(1)); }
  if (head == "truncated") { expect(3); return make_truncated(num(1), num(2)); }
  if (head == "allen-cahn" || head == "allencahn") { expect(1); return make_allen_cahn(); }
  if (head == "constant") { expect(2); return make_constant(num(1)); }
  if (head == "logistic") { expect(1); return make_logistic(); }
  if (head == "sine") { expect(1); return make_sine(); }
  throw std::invalid_argument("unknown nonlinearity '" + spec + "'");
}

struct NonlinearityCheck {
  double deriv1_max_rel = 0.0;
  double deriv2_max_rel = 0.0;
  double deriv3_max_rel = 0.0;
  double zero_max_abs = 0.0;
  bool sign_ok = true;
  bool passed = true;
  std::size_t samples = 0;
};

/// Spot-checks the declared metadata: centred differences against the listed derivatives,
/// the sign class on the declared range, and the listed zeros.
inline NonlinearityCheck check_nonlinearity(const Nonlinearity& f, std::size_t samples = 401,
                                            double rel_tol = 1e-6) {
  NonlinearityCheck rep;
  auto [lo, hi] = f.declared_range;
  auto near_kink = [&](double t, double h) {
    return std::any_of(f.kinks.begin(), f.kinks.end(),
                       [&](double k) { return std::abs(t - k) <= 4.0 * h; });
  };
  auto rel = [](double a, double b) {
    double s = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) / s;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    double h = 1e-5 * (1.0 + std::abs(t));
    double v = f.eval(t);
    switch (f.sign_class.kind) {
      case SignKind::Nonnegative: rep.sign_ok &= v >= 0.0; break;
      case SignKind::Nonpositive: rep.sign_ok &= v <= 0.0; break;
      case SignKind::NonnegativeThenNonpositive:
        rep.sign_ok &= (t <= f.sign_class.z) ? v >= 0.0 : v <= 0.0;
        break;
      case SignKind::SignChanging: break;
    }
    if (near_kink(t, h)) continue;
    ++rep.samples;
    double fd1 = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
    rep.deriv1_max_rel = std::max(rep.deriv1_max_rel, rel(f.deriv1(t), fd1));
    if (f.deriv2) {
      double fd2 = (f.deriv1(t + h) - f.deriv1(t - h)) / (2.0 * h);
      rep.deriv2_max_rel = std::max(rep.deriv2_max_rel, rel((*f.deriv2)(t), fd2));
    }
    if (f.deriv3 && f.deriv2) {
      double fd3 = ((*f.deriv2)(t + h) - (*f.deriv2)(t - h)) / (2.0 * h);
      rep.deriv3_max_rel = std::max(rep.deriv3_max_rel, rel((*f.deriv3)(t), fd3));
    }
  }
  for (double z : f.zeros) {
    double e = std::abs(f.eval(z)) / (1.0 + std::abs(z));
    rep.zero_max_abs = std::max(rep.zero_max_abs, e);
  }
  rep.passed = rep.sign_ok && rep.deriv1_max_rel <= rel_tol && rep.deriv2_max_rel <= rel_tol &&
               rep.deriv3_max_rel <= rel_tol && rep.zero_max_abs <= 1e-12;
  return rep;
}

}  // namespace elliptica
