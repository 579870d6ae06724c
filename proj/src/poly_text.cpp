#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "polyvf/poly.hpp"

namespace polyvf {

namespace {

std::string trim(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

double parse_double(const std::string& s, std::string_view whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw Error(ErrorKind::InvalidInput, "bad number '" + std::string(whole) + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string shortest(double x) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace

cplx parse_complex(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::InvalidInput, "empty complex number");
  if (s.back() != 'i') return {parse_double(s, text), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not an exponent sign.
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  if (cut == std::string::npos) return {0.0, parse_double(body, text)};
  return {parse_double(body.substr(0, cut), text), parse_double(body.substr(cut), text)};
}

std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return shortest(z.real() == 0.0 ? 0.0 : z.real());
  std::string im = shortest(z.imag());
  if (im[0] != '-') im = "+" + im;
  return shortest(z.real() == 0.0 ? 0.0 : z.real()) + im + "i";
}

Polynomial parse_polynomial(std::string_view text) {
  const std::string s = trim(text);
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::InvalidInput, "expected 'coeffs:' or 'roots:' prefix");
  const std::string kind = s.substr(0, colon);
  const auto items = split(s.substr(colon + 1), ',');
  if (kind == "coeffs") {
    std::vector<cplx> c;
    for (const auto& it : items) c.push_back(parse_complex(it));
    return Polynomial::from_coefficients(std::move(c));
  }
  if (kind == "roots") {
    std::vector<Root> r;
    for (const auto& it : items) {
      const auto caret = it.find('^');
      Root root;
      root.position = parse_complex(it.substr(0, caret));
      if (caret != std::string::npos) {
        const std::string m = it.substr(caret + 1);
        char* end = nullptr;
        const long v = std::strtol(m.c_str(), &end, 10);
        if (m.empty() || end != m.c_str() + m.size() || v < 1)
          throw Error(ErrorKind::InvalidInput, "bad multiplicity '" + m + "'");
        root.multiplicity = static_cast<int>(v);
      }
      r.push_back(root);
    }
    return Polynomial::from_roots(std::move(r));
  }
  throw Error(ErrorKind::InvalidInput, "unknown polynomial form '" + kind + "'");
}

std::string format_coefficients(const Polynomial& p) {
  std::string out = "coeffs: ";
  const auto& c = p.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += format_complex(c[i]);
  }
  return out;
}

std::string format_roots(const Polynomial& p) {
  std::string out = "roots: ";
  bool first = true;
  for (const auto& r : p.roots()) {
    if (!first) out += ",";
    first = false;
    out += format_complex(r.position);
    if (r.multiplicity > 1) out += "^" + std::to_string(r.multiplicity);
  }
  return out;
}

}  // namespace polyvf
